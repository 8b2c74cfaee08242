//! The bias series T_E(X): direct evaluation from places, evaluation through the
//! spectrum, densities, and moments of the limiting distribution.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{lcm, ramanujan_sum};
use crate::error::{Error, Result};
use crate::euler::EulerData;
use crate::lpoly::Spectrum;
use crate::qsqrt::QSqrt;

/// c_pm(X): q/(q-1) for even X, sqrt(q)/(q-1) for odd X.
pub fn c_pm(x: u64, q: u64) -> QSqrt {
    let inv = BigRational::new(BigInt::one(), BigInt::from(q - 1));
    if x % 2 == 0 {
        QSqrt::rational(q, inv * BigInt::from(q))
    } else {
        QSqrt::new(q, BigRational::zero(), inv)
    }
}

/// 1 / (1 - q^{-l/2}) exactly.
fn geometric(q: u64, l: u64) -> QSqrt {
    (&QSqrt::int(q, 1) - &QSqrt::q_pow_neg_half(q, l))
        .inv()
        .expect("q > 1")
}

/// T_E(1..=max_x) from the good places of degree at most max_x.
pub fn t_direct_series(ed: &mut EulerData, max_x: usize) -> Result<Vec<f64>> {
    let q = ed.q() as f64;
    let mut out = Vec::with_capacity(max_x);
    let mut acc = 0.0;
    for x in 1..=max_x {
        if !ed.affordable(x) {
            return Err(Error::WorkBound {
                bound: "max_residue_field",
                limit: ed.max_residue_field(),
                required: ed.q().saturating_pow(x as u32),
            });
        }
        acc += ed.good_trace_sum(x)? as f64 / q.powf(x as f64 / 2.0);
        out.push(-(x as f64) / q.powf(x as f64 / 2.0) * acc);
    }
    Ok(out)
}

pub fn t_direct(ed: &mut EulerData, x: usize) -> Result<f64> {
    if x == 0 {
        return Err(Error::InvalidArgument("X must be positive".into()));
    }
    Ok(*t_direct_series(ed, x)?.last().expect("nonempty"))
}

/// Q_E(X) + R_E(X) evaluated in floating point.
pub fn t_explicit_f64(s: &Spectrum, x: u64) -> f64 {
    let q = s.q as f64;
    let sq = q.sqrt();
    let cpm = if x % 2 == 0 {
        q / (q - 1.0)
    } else {
        sq / (q - 1.0)
    };
    let mut total = sq / (sq - 1.0) * s.rank as f64 - cpm;
    let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
    total += s.m_minus_q as f64 * sign / (1.0 + 1.0 / sq);
    for &(t, m) in &s.angles {
        let e = Complex64::from_polar(1.0, t * x as f64);
        let den = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0 / sq, -t);
        total += m as f64 * (e / den).re;
    }
    total
}

/// Exact Q_E(X) + R_E(X), available when the spectrum is cyclotomic.
pub fn t_explicit_exact(s: &Spectrum, x: u64) -> Result<QSqrt> {
    let cyc = s
        .cyclotomic
        .as_ref()
        .ok_or_else(|| Error::Unsupported("spectrum angles are not known to be rational".into()))?;
    let q = s.q;
    let mut total = -&c_pm(x, q);
    for &(l, m) in cyc {
        let m = QSqrt::int(q, m as i64);
        if l == 1 {
            total = &total + &(&m * &geometric(q, 1));
            continue;
        }
        let mut block = QSqrt::zero(q);
        for r in 0..l {
            let c = ramanujan_sum(l, x as i64 - r as i64);
            if c != 0 {
                block = &block + &(&QSqrt::int(q, c) * &QSqrt::q_pow_neg_half(q, r));
            }
        }
        total = &total + &(&m * &(&block * &geometric(q, l)));
    }
    Ok(total)
}

/// Period of the exact periodic part: lcm of 2 and the cyclotomic indices.
pub fn exact_period(s: &Spectrum) -> Option<u64> {
    let cyc = s.cyclotomic.as_ref()?;
    Some(cyc.iter().fold(2, |acc, &(l, _)| lcm(acc, l)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityMethod {
    ExactPeriodic,
    TimeAverage,
    LimitLawMc,
    LimitLawCf,
}

impl DensityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DensityMethod::ExactPeriodic => "exact-periodic",
            DensityMethod::TimeAverage => "time-average",
            DensityMethod::LimitLawMc => "limit-law-mc",
            DensityMethod::LimitLawCf => "limit-law-cf",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensityValue {
    Exact(BigRational),
    Interval(BigRational, BigRational),
    Estimate { value: f64, std_error: Option<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub value: DensityValue,
    pub method: DensityMethod,
    /// Residues X mod period where the periodic part vanishes.
    pub boundary_classes: Vec<u64>,
    pub period: Option<u64>,
    /// Sign of the periodic part on each class X = period, 1, ..., period - 1.
    pub class_signs: Vec<i8>,
}

impl DensityReport {
    /// Lower and upper ends (equal unless an interval).
    pub fn bounds_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        match &self.value {
            DensityValue::Exact(r) => {
                let v = r.to_f64().unwrap_or(f64::NAN);
                (v, v)
            }
            DensityValue::Interval(lo, hi) => (
                lo.to_f64().unwrap_or(f64::NAN),
                hi.to_f64().unwrap_or(f64::NAN),
            ),
            DensityValue::Estimate { value, .. } => (*value, *value),
        }
    }

    pub fn exact_bounds(&self) -> Option<(BigRational, BigRational)> {
        match &self.value {
            DensityValue::Exact(r) => Some((r.clone(), r.clone())),
            DensityValue::Interval(lo, hi) => Some((lo.clone(), hi.clone())),
            DensityValue::Estimate { .. } => None,
        }
    }
}

/// Density from the signs of an exactly periodic function on one period.
/// `signs[r]` is the sign on X ≡ r.
pub fn density_from_signs(signs: Vec<i8>) -> DensityReport {
    let period = signs.len() as u64;
    let pos = signs.iter().filter(|&&s| s > 0).count() as u64;
    let neg = signs.iter().filter(|&&s| s < 0).count() as u64;
    let boundary: Vec<u64> = (0..period).filter(|&r| signs[r as usize] == 0).collect();
    let den = BigInt::from(period);
    let lo = BigRational::new(BigInt::from(pos), den.clone());
    let value = if boundary.is_empty() {
        DensityValue::Exact(lo)
    } else {
        DensityValue::Interval(lo, BigRational::new(BigInt::from(period - neg), den))
    };
    DensityReport {
        value,
        method: DensityMethod::ExactPeriodic,
        boundary_classes: boundary,
        period: Some(period),
        class_signs: signs,
    }
}

pub fn density_exact_periodic(s: &Spectrum) -> Result<DensityReport> {
    let period = exact_period(s).ok_or_else(|| {
        Error::Unsupported(
            "exact-periodic density needs angles that are rational multiples of pi".into(),
        )
    })?;
    let mut signs = Vec::with_capacity(period as usize);
    for r in 0..period {
        let x = if r == 0 { period } else { r };
        signs.push(t_explicit_exact(s, x)?.signum());
    }
    Ok(density_from_signs(signs))
}

/// (1/M) #{X <= M : T(X) > 0}
pub fn density_time_average(values: &[f64]) -> DensityReport {
    let m = values.len().max(1) as f64;
    let pos = values.iter().filter(|&&v| v > 0.0).count() as f64;
    DensityReport {
        value: DensityValue::Estimate {
            value: pos / m,
            std_error: None,
        },
        method: DensityMethod::TimeAverage,
        boundary_classes: vec![],
        period: None,
        class_signs: vec![],
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanVariance {
    pub mean: f64,
    pub variance_paper: f64,
    pub variance_corrected: f64,
}

pub fn mean_variance(s: &Spectrum) -> MeanVariance {
    let q = s.q as f64;
    let sq = q.sqrt();
    let mean = sq / (sq - 1.0) * (s.rank as f64 - 0.5);
    let mut var = 0.25 * (sq / (sq + 1.0)).powi(2);
    let term = |t: f64| {
        let den = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0 / sq, -t);
        1.0 / den.norm_sqr()
    };
    for &(t, m) in &s.angles {
        var += (m as f64).powi(2) * term(t);
    }
    let mpi = s.m_minus_q as f64;
    var += mpi * mpi * term(PI);
    MeanVariance {
        mean,
        variance_paper: var,
        variance_corrected: var - mpi * q / (sq + 1.0).powi(2),
    }
}

/// Time-average mean and variance of a series.
pub fn empirical_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::ulmer_curve;
    use crate::field::make_field;
    use crate::lpoly::{spectrum, LPolynomial};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn e5() -> Spectrum {
        spectrum(&LPolynomial::from_i64(3, &[1, 0, 0, 0, -81]).unwrap()).unwrap()
    }

    #[test]
    fn cpm_values() {
        assert_eq!(c_pm(2, 3), QSqrt::rational(3, r(3, 2)));
        assert_eq!(c_pm(1, 3), QSqrt::new(3, r(0, 1), r(1, 2)));
        assert_eq!(c_pm(1, 4), QSqrt::rational(4, r(2, 3)));
    }

    #[test]
    fn exact_periodic_part() {
        let s = e5();
        let v: Vec<QSqrt> = (1..=8).map(|x| t_explicit_exact(&s, x).unwrap()).collect();
        assert_eq!(v[3], QSqrt::int(3, 3));
        assert_eq!(v[0], QSqrt::sqrt_q(3));
        assert!(v[1].is_zero() && v[2].is_zero());
        assert_eq!(v[7], v[3]);
        for x in 1..=20 {
            let a = t_explicit_exact(&s, x).unwrap().to_f64();
            assert!((a - t_explicit_f64(&s, x)).abs() < 1e-12);
        }
        let d = density_exact_periodic(&s).unwrap();
        assert_eq!(d.value, DensityValue::Interval(r(1, 2), r(1, 1)));
        assert_eq!(d.boundary_classes, vec![2, 3]);
    }

    #[test]
    fn empty_spectrum() {
        let s = spectrum(&LPolynomial::from_i64(5, &[1]).unwrap()).unwrap();
        assert_eq!(
            t_explicit_exact(&s, 2).unwrap(),
            QSqrt::rational(5, r(-5, 4))
        );
        let mv = mean_variance(&s);
        assert_eq!(mv.variance_paper, mv.variance_corrected);
    }

    #[test]
    fn moments_e5() {
        let mv = mean_variance(&e5());
        assert!((mv.mean - 1.1830).abs() < 1e-4);
        assert!((mv.variance_paper - 2.0024).abs() < 1e-4);
        assert!((mv.variance_corrected - 1.6005).abs() < 1e-4);
    }

    #[test]
    fn direct_first_term() {
        let f = make_field(3, 1).unwrap();
        let e = ulmer_curve(&f, 5).unwrap();
        let mut ed = EulerData::new(&e, 729);
        assert!((t_direct(&mut ed, 1).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!(t_direct(&mut ed, 7).is_err());
    }
}
