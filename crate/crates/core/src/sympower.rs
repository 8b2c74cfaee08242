//! Chebyshev machinery for general test functions V(theta) and exact
//! symmetric-power power sums.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::euler::EulerData;

/// U_m(theta) = sin((m+1) theta) / sin(theta), by the Chebyshev recurrence in cos(theta).
pub fn u_m(m: u32, theta: f64) -> f64 {
    let x = theta.cos();
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    if m == 0 {
        return 1.0;
    }
    for _ in 1..m {
        let next = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = next;
    }
    u1
}

/// U_m(2 theta) as (index, coefficient) over U_{2m}, U_{2m-2}, ..., U_0.
pub fn double_angle_expand(m: u32) -> Vec<(u32, i8)> {
    (0..=m)
        .map(|j| (2 * (m - j), if j % 2 == 0 { 1 } else { -1 }))
        .collect()
}

/// Target absolute accuracy of [`fourier_coeff`].
pub const FOURIER_TOL: f64 = 1e-10;

/// <V, U_m> = (2/pi) int_0^pi V U_m sin^2.
pub fn fourier_coeff(v: &dyn Fn(f64) -> f64, m: u32) -> Result<f64> {
    let f = |t: f64| {
        let s = t.sin();
        v(t) * u_m(m, t) * s * s
    };
    let out = quadrature::double_exponential::integrate(f, 0.0, PI, FOURIER_TOL * PI / 2.0);
    if !out.integral.is_finite() || out.error_estimate > FOURIER_TOL * PI / 2.0 * 10.0 {
        return Err(Error::Quadrature);
    }
    Ok(out.integral * 2.0 / PI)
}

/// V given by its coefficients V_1, ..., V_M (V_0 stored separately).
#[derive(Clone, Debug, PartialEq)]
pub struct FourierProfile {
    /// coeffs[m] = <V, U_m>, m = 0..=M.
    pub coeffs: Vec<f64>,
    /// Caller-supplied decay exponent: |V_m| <= C m^{-3-eta}.
    pub eta: Option<f64>,
}

impl FourierProfile {
    pub fn new(coeffs: Vec<f64>, eta: Option<f64>) -> Self {
        FourierProfile { coeffs, eta }
    }

    pub fn from_fn(v: &dyn Fn(f64) -> f64, m_cut: u32) -> Result<Self> {
        let coeffs = (0..=m_cut)
            .map(|m| fourier_coeff(v, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(FourierProfile { coeffs, eta: None })
    }

    pub fn coeff(&self, m: u32) -> f64 {
        self.coeffs.get(m as usize).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * u_m(m as u32, theta))
            .sum()
    }

    /// <V, U_0> = 0 up to `tol`.
    pub fn is_centered(&self, tol: f64) -> bool {
        self.coeff(0).abs() <= tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymPowerSum {
    pub m: u32,
    pub n: usize,
    /// S'_{m,N} = -sum_j gamma_{m,j}^N.
    pub exact: i128,
    /// sum_j e^{i N theta_{m,j}} = -S'_{m,N} / q^{(m+1)N/2}.
    pub normalized: f64,
}

pub fn sym_power_sums(ed: &mut EulerData, m: u32, n: usize) -> Result<SymPowerSum> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let exact = ed.sym_power_sum(m, n)?;
    let q = ed.q() as f64;
    let normalized = -(exact as f64) / q.powf((m as f64 + 1.0) * n as f64 / 2.0) + 0.0;
    Ok(SymPowerSum {
        m,
        n,
        exact,
        normalized,
    })
}

/// (N/q^{N/2}) sum_{deg v = N, good} U_m(theta_v).
pub fn place_sum(ed: &mut EulerData, m: u32, n: usize) -> Result<f64> {
    let q = ed.q() as f64;
    let s: f64 = ed
        .degree(n)?
        .iter()
        .filter_map(|r| r.theta)
        .map(|t| u_m(m, t))
        .sum();
    Ok(n as f64 / q.powf(n as f64 / 2.0) * s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub lhs: f64,
    /// (-1)^{m+1} E(N) - sum_j e^{i N theta_{m,j}}
    pub bracket: f64,
    pub residual: f64,
}

pub fn explicit_formula_residual(ed: &mut EulerData, m: u32, n: usize) -> Result<Residual> {
    let s = sym_power_sums(ed, m, n)?;
    let lhs = place_sum(ed, m, n)?;
    let eps = if n % 2 == 0 { 1.0 } else { 0.0 };
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let bracket = sign * eps - s.normalized;
    Ok(Residual {
        lhs,
        bracket,
        residual: lhs - bracket,
    })
}

/// T_V(1..=max_x) = (X/q^{X/2}) sum_{deg v <= X, good} V(theta_v).
pub fn t_v_direct_series(
    ed: &mut EulerData,
    v: &dyn Fn(f64) -> f64,
    max_x: usize,
) -> Result<Vec<f64>> {
    let q = ed.q() as f64;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(max_x);
    for x in 1..=max_x {
        if !ed.affordable(x) {
            return Err(Error::WorkBound {
                bound: "max_residue_field",
                limit: ed.max_residue_field(),
                required: ed.q().saturating_pow(x as u32),
            });
        }
        acc += ed
            .degree(x)?
            .iter()
            .filter_map(|r| r.theta)
            .map(v)
            .sum::<f64>();
        out.push(x as f64 / q.powf(x as f64 / 2.0) * acc);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MmEstimate {
    pub m: u32,
    /// Mean of Re sum_j e^{i N theta_{m,j}} over N <= n_max.
    pub value: f64,
    /// Running means for N = 1..=n_max.
    pub running: Vec<f64>,
    /// |mean over all N - mean over the first half|.
    pub drift: f64,
}

/// Estimate of M_m(1), the multiplicity of theta = 0 among the Sym^m zeros.
pub fn m_m_estimate(ed: &mut EulerData, m: u32, n_max: usize) -> Result<MmEstimate> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be positive".into()));
    }
    let mut total = 0.0;
    let mut running = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        total += sym_power_sums(ed, m, n)?.normalized;
        running.push(total / n as f64);
    }
    let value = *running.last().expect("nonempty");
    let drift = (value - running[(n_max - 1) / 2]).abs();
    Ok(MmEstimate {
        m,
        value,
        running,
        drift,
    })
}

/// c_pm(X) as a float.
fn c_pm_f64(x: u64, q: f64) -> f64 {
    if x % 2 == 0 {
        q / (q - 1.0)
    } else {
        q.sqrt() / (q - 1.0)
    }
}

/// Q_V(X) = sum_m ((-1)^{m+1} c_pm(X) - sqrt q/(sqrt q - 1) M_m(1)) V_m, with M_m(1) supplied
/// for m = 1..=mm.len().
pub fn q_v(profile: &FourierProfile, mm: &[f64], q: u64, x: u64) -> f64 {
    let qf = q as f64;
    let sq = qf.sqrt();
    let c = c_pm_f64(x, qf);
    (1..profile.coeffs.len())
        .map(|m| {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            let mult = mm.get(m - 1).copied().unwrap_or(0.0);
            (sign * c - sq / (sq - 1.0) * mult) * profile.coeffs[m]
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::ulmer_curve;
    use crate::field::make_field;

    #[test]
    fn chebyshev_values() {
        assert!((u_m(1, PI / 3.0) - 1.0).abs() < 1e-15);
        assert!((u_m(2, PI / 2.0) + 1.0).abs() < 1e-15);
        assert_eq!(u_m(5, 0.0), 6.0);
        assert!((u_m(5, PI) + 6.0).abs() < 1e-12);
        for m in 0..8 {
            for k in 1..20 {
                let t = k as f64 * 0.15;
                let direct = ((m as f64 + 1.0) * t).sin() / t.sin();
                assert!((u_m(m, t) - direct).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn double_angle() {
        assert_eq!(double_angle_expand(0), vec![(0, 1)]);
        assert_eq!(double_angle_expand(1), vec![(2, 1), (0, -1)]);
        assert_eq!(double_angle_expand(2), vec![(4, 1), (2, -1), (0, 1)]);
    }

    #[test]
    fn coefficients() {
        let v = |t: f64| -u_m(1, t);
        assert!((fourier_coeff(&v, 1).unwrap() + 1.0).abs() < 1e-10);
        assert!(fourier_coeff(&v, 2).unwrap().abs() < 1e-10);
        let w = |t: f64| u_m(1, 2.0 * t);
        assert!((fourier_coeff(&w, 2).unwrap() - 1.0).abs() < 1e-10);
        assert!((fourier_coeff(&w, 0).unwrap() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn e5_sums() {
        let f = make_field(3, 1).unwrap();
        let e = ulmer_curve(&f, 5).unwrap();
        let mut ed = EulerData::new(&e, 729);
        let r = explicit_formula_residual(&mut ed, 1, 4).unwrap();
        assert!((r.bracket + 3.0).abs() < 1e-12);
        let s = t_v_direct_series(&mut ed, &|t| u_m(2, t), 1).unwrap();
        assert!((s[0] + 3f64.sqrt() / 9.0).abs() < 1e-12);
        let d = t_v_direct_series(&mut ed, &|t| -u_m(1, t), 5).unwrap();
        let direct = crate::race::t_direct_series(&mut ed, 5).unwrap();
        for (a, b) in d.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
