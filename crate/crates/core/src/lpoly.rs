//! L-polynomials of elliptic curves over F_q(t): reconstruction from power sums,
//! functional equation, and the spectrum of inverse zeros.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{euler_phi, gcd};
use crate::curve::{conductor_degree, CurveModel, DEFAULT_MAX_RESIDUE_FIELD};
use crate::error::{Error, Result};
use crate::euler::EulerData;

/// Integer polynomial 1 + a_1 T + ... + a_N T^N together with q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    q: u64,
    coeffs: Vec<BigInt>,
}

impl LPolynomial {
    pub fn new(q: u64, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.first() != Some(&BigInt::one()) {
            return Err(Error::InvalidArgument(
                "L-polynomial must have constant term 1".into(),
            ));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(LPolynomial { q, coeffs })
    }

    pub fn from_i64(q: u64, coeffs: &[i64]) -> Result<Self> {
        Self::new(q, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Newton reconstruction from p_1..p_N.
    pub fn from_power_sums(q: u64, p: &[BigInt]) -> Result<Self> {
        let n = p.len();
        let mut e = vec![BigInt::one()];
        for k in 1..=n {
            let mut acc = BigInt::zero();
            for i in 1..=k {
                let term = &e[k - i] * &p[i - 1];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            let (quo, rem) = acc.div_rem(&BigInt::from(k));
            if !rem.is_zero() {
                return Err(Error::Stabilization(format!(
                    "power sums are not those of an integer polynomial (step {k})"
                )));
            }
            e.push(quo);
        }
        let coeffs = e
            .into_iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c } else { c })
            .collect();
        Self::new(q, coeffs)
    }

    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// p_1..p_n of the inverse zeros.
    pub fn power_sums(&self, n: usize) -> Vec<BigInt> {
        let deg = self.degree();
        let e = |i: usize| -> BigInt {
            if i > deg {
                BigInt::zero()
            } else if i % 2 == 1 {
                -&self.coeffs[i]
            } else {
                self.coeffs[i].clone()
            }
        };
        let mut p: Vec<BigInt> = Vec::with_capacity(n);
        for k in 1..=n {
            let mut acc = BigInt::zero();
            for i in 1..k {
                let term = e(i) * &p[k - i - 1];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            let last = e(k) * BigInt::from(k);
            if k % 2 == 1 {
                acc += last;
            } else {
                acc -= last;
            }
            p.push(acc);
        }
        p
    }

    pub fn mul(&self, other: &LPolynomial) -> LPolynomial {
        LPolynomial {
            q: self.q,
            coeffs: mul_int(&self.coeffs, &other.coeffs),
        }
    }

    /// Sign ε with a_{N-i} = ε q^{N-2i} a_i.
    pub fn functional_equation_sign(&self) -> Result<i8> {
        let n = self.degree();
        let q = BigInt::from(self.q);
        'eps: for eps in [1i8, -1] {
            for i in 0..=n / 2 {
                let rhs =
                    &self.coeffs[i] * num_traits::pow(q.clone(), n - 2 * i) * BigInt::from(eps);
                if self.coeffs[n - i] != rhs {
                    continue 'eps;
                }
            }
            return Ok(eps);
        }
        Err(Error::NotSelfDual)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact polynomial division by (1 - cT); None if not divisible.
    fn divide_linear(coeffs: &[BigInt], c: &BigInt) -> Option<Vec<BigInt>> {
        if coeffs.len() < 2 {
            return None;
        }
        let n = coeffs.len() - 1;
        let mut out = Vec::with_capacity(n);
        let mut prev = BigInt::zero();
        for a in coeffs.iter().take(n) {
            let b = a + c * &prev;
            out.push(b.clone());
            prev = b;
        }
        if &coeffs[n] + c * &prev == BigInt::zero() {
            Some(out)
        } else {
            None
        }
    }
}

impl std::fmt::Display for LPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "T")?;
                    } else {
                        write!(f, "T^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Options for [`compute_lpolynomial`].
#[derive(Clone, Debug)]
pub struct LOptions {
    pub degree_hint: Option<usize>,
    pub max_residue_field: u64,
    pub extra_checks: usize,
}

impl Default for LOptions {
    fn default() -> Self {
        LOptions {
            degree_hint: None,
            max_residue_field: DEFAULT_MAX_RESIDUE_FIELD,
            extra_checks: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LComputation {
    pub lpoly: LPolynomial,
    pub epsilon: i8,
    /// Largest n with p_n checked against the curve.
    pub verified_through: usize,
}

/// Reconstructs L(E, T) from place counts up to its degree.
pub fn compute_lpolynomial(curve: &CurveModel, opts: &LOptions) -> Result<LComputation> {
    let q = curve.ctx().q();
    let n = match opts.degree_hint {
        Some(h) => h,
        None if curve.ctx().p() >= 5 => {
            let c = conductor_degree(curve)?;
            if c.l_degree < 0 {
                return Err(Error::InvalidArgument("negative L-degree".into()));
            }
            c.l_degree as usize
        }
        None => {
            return Err(Error::Unsupported(
                "degree hint required in characteristic 2 and 3".into(),
            ))
        }
    };
    let mut ed = EulerData::new(curve, opts.max_residue_field);
    let bound = |k: usize| Error::WorkBound {
        bound: "max_residue_field",
        limit: opts.max_residue_field,
        required: q.saturating_pow(k as u32),
    };
    let h = n / 2;
    if h > 0 && !ed.affordable(h) {
        return Err(bound(h));
    }
    let mut p = Vec::with_capacity(n);
    for k in 1..=h {
        p.push(BigInt::from(ed.power_sum(k)?));
    }
    let mut low = LPolynomial::from_power_sums(q, &p)?.coeffs;
    low.resize(h + 1, BigInt::zero());
    let mut candidates: Vec<(i8, LPolynomial)> = [1i8, -1]
        .into_iter()
        .filter_map(|eps| complete_from_half(q, n, &low, eps).map(|l| (eps, l)))
        .collect();
    let mut k = h;
    let mut verified = h;
    while candidates.len() > 1 || k < n + opts.extra_checks {
        k += 1;
        if !ed.affordable(k) {
            if candidates.len() > 1 {
                return Err(bound(k));
            }
            break;
        }
        let actual = BigInt::from(ed.power_sum(k)?);
        candidates.retain(|(_, l)| l.power_sums(k)[k - 1] == actual);
        if candidates.is_empty() {
            return Err(Error::Stabilization(format!(
                "p_{k} = {actual} matches no degree-{n} polynomial with a functional equation"
            )));
        }
        verified = k;
    }
    let Some((epsilon, lpoly)) = candidates.pop() else {
        return Err(Error::Stabilization("no self-dual completion".into()));
    };
    Ok(LComputation {
        lpoly,
        epsilon,
        verified_through: verified,
    })
}

/// Fills a_{h+1}..a_N from a_0..a_h by the functional equation with sign `eps`.
fn complete_from_half(q: u64, n: usize, low: &[BigInt], eps: i8) -> Option<LPolynomial> {
    let h = n / 2;
    if n % 2 == 0 && eps == -1 && !low[h].is_zero() {
        return None;
    }
    let qb = BigInt::from(q);
    let mut c = low[..=h].to_vec();
    for j in h + 1..=n {
        c.push(&low[n - j] * num_traits::pow(qb.clone(), 2 * j - n) * BigInt::from(eps));
    }
    Some(LPolynomial { q, coeffs: c })
}

// ---------------------------------------------------------------- spectrum

/// Cyclotomic description: L(x/q) = (1-x)^{m_1} prod Phi_l(x)^{m_l}.
pub type CyclotomicFactors = Vec<(u64, u32)>;

/// Inverse zeros gamma = q e^{i theta}, angles in [0, 2pi).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub q: u64,
    pub degree: usize,
    pub epsilon: i8,
    pub rank: u32,
    pub m_minus_q: u32,
    /// (theta, multiplicity), theta in (0, 2pi) minus {pi}, sorted.
    pub angles: Vec<(f64, u32)>,
    pub forced_zeros: Vec<i64>,
    pub purity_residual: f64,
    pub cyclotomic: Option<CyclotomicFactors>,
}

pub const ANGLE_CLUSTER_TOL: f64 = 1e-8;

/// Forced real inverse zeros for a given degree and sign.
pub fn forced_zeros(q: u64, degree: usize, epsilon: i8) -> Vec<i64> {
    let q = q as i64;
    if degree % 2 == 1 {
        vec![-(epsilon as i64) * q]
    } else if epsilon == -1 {
        vec![q, -q]
    } else {
        vec![]
    }
}

impl Spectrum {
    /// Spectrum given directly by angles in [0, 2pi); conjugates are added as needed.
    pub fn from_angles(q: u64, rank: u32, m_minus_q: u32, angles: &[(f64, u32)]) -> Result<Self> {
        let mut all: Vec<(f64, u32)> = Vec::new();
        for &(t, m) in angles {
            let t = t.rem_euclid(2.0 * PI);
            if t < ANGLE_CLUSTER_TOL
                || (t - PI).abs() < ANGLE_CLUSTER_TOL
                || 2.0 * PI - t < ANGLE_CLUSTER_TOL
            {
                return Err(Error::InvalidArgument(
                    "real angles are given through rank and m_minus_q".into(),
                ));
            }
            if m == 0 {
                continue;
            }
            all.push((t, m));
        }
        let mut sym = all.clone();
        for &(t, m) in &all {
            let c = 2.0 * PI - t;
            if !all.iter().any(|&(s, _)| (s - c).abs() < ANGLE_CLUSTER_TOL) {
                sym.push((c, m));
            }
        }
        let angles = cluster(sym);
        for &(t, m) in &angles {
            let c = 2.0 * PI - t;
            let mc = angles
                .iter()
                .find(|&&(s, _)| (s - c).abs() < ANGLE_CLUSTER_TOL)
                .map(|x| x.1);
            if mc != Some(m) {
                return Err(Error::InvalidArgument(
                    "angles are not closed under conjugation".into(),
                ));
            }
        }
        let degree =
            rank as usize + m_minus_q as usize + angles.iter().map(|a| a.1 as usize).sum::<usize>();
        let epsilon = if rank % 2 == 0 { 1 } else { -1 };
        Ok(Spectrum {
            q,
            degree,
            epsilon,
            rank,
            m_minus_q,
            angles,
            forced_zeros: forced_zeros(q, degree, epsilon),
            purity_residual: 0.0,
            cyclotomic: None,
        })
    }

    /// Spectrum from cyclotomic multiplicities (exact angles).
    pub fn from_cyclotomic(q: u64, factors: &[(u64, u32)]) -> Result<Self> {
        let mut rank = 0;
        let mut mm = 0;
        let mut angles = Vec::new();
        for &(l, m) in factors {
            match l {
                0 => return Err(Error::InvalidArgument("cyclotomic index 0".into())),
                1 => rank += m,
                2 => mm += m,
                _ => {
                    for j in 1..l {
                        if gcd(j, l) == 1 {
                            angles.push((2.0 * PI * j as f64 / l as f64, m));
                        }
                    }
                }
            }
        }
        let mut s = Spectrum::from_angles(q, rank, mm, &angles)?;
        let mut f: Vec<(u64, u32)> = factors.iter().copied().filter(|x| x.1 > 0).collect();
        f.sort();
        s.cyclotomic = Some(f);
        Ok(s)
    }

    /// Distinct angles in (0, pi) with multiplicities.
    pub fn upper_angles(&self) -> Vec<(f64, u32)> {
        self.angles.iter().copied().filter(|a| a.0 < PI).collect()
    }

    /// Inverse zeros as complex numbers, with multiplicity.
    pub fn inverse_zeros(&self) -> Vec<Complex64> {
        let q = self.q as f64;
        let mut out = Vec::with_capacity(self.degree);
        out.extend(std::iter::repeat_n(
            Complex64::new(q, 0.0),
            self.rank as usize,
        ));
        out.extend(std::iter::repeat_n(
            Complex64::new(-q, 0.0),
            self.m_minus_q as usize,
        ));
        for &(t, m) in &self.angles {
            out.extend(std::iter::repeat_n(Complex64::from_polar(q, t), m as usize));
        }
        out
    }

    /// sum of gamma^n / q^{n/2} over the spectrum, i.e. q^{-n/2} p_n.
    pub fn normalized_power_sum(&self, n: u32) -> f64 {
        let sq = (self.q as f64).sqrt().powi(n as i32);
        let mut s = self.rank as f64 + self.m_minus_q as f64 * if n % 2 == 0 { 1.0 } else { -1.0 };
        for &(t, m) in &self.angles {
            s += m as f64 * (n as f64 * t).cos();
        }
        s * sq
    }
}

fn cluster(mut v: Vec<(f64, u32)>) -> Vec<(f64, u32)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, u32, f64)> = Vec::new();
    for (t, m) in v {
        match out.last_mut() {
            Some(last) if (t - last.2).abs() < ANGLE_CLUSTER_TOL => {
                last.0 = (last.0 * last.1 as f64 + t * m as f64) / (last.1 + m) as f64;
                last.1 += m;
                last.2 = t;
            }
            _ => out.push((t, m, t)),
        }
    }
    out.into_iter().map(|(t, m, _)| (t, m)).collect()
}

/// Purity tolerance relative to q used when accepting numerically found roots.
pub const PURITY_TOL: f64 = 1e-6;

pub fn spectrum(l: &LPolynomial) -> Result<Spectrum> {
    let q = l.q();
    let epsilon = l.functional_equation_sign()?;
    let bq = BigInt::from(q);
    let mut rest = l.coeffs().to_vec();
    let mut rank = 0u32;
    while let Some(r) = LPolynomial::divide_linear(&rest, &bq) {
        rest = r;
        rank += 1;
    }
    let mut mm = 0u32;
    let nq = -bq.clone();
    while let Some(r) = LPolynomial::divide_linear(&rest, &nq) {
        rest = r;
        mm += 1;
    }
    if let Some(mut cyc) = cyclotomic_factors(&rest, q) {
        if rank > 0 {
            cyc.push((1, rank));
        }
        if mm > 0 {
            cyc.push((2, mm));
        }
        let mut s = Spectrum::from_cyclotomic(q, &cyc)?;
        s.epsilon = epsilon;
        s.degree = l.degree();
        s.forced_zeros = forced_zeros(q, s.degree, epsilon);
        return Ok(s);
    }
    // squarefree decomposition over Q, then roots of each factor in z = qT.
    let qf = q as f64;
    let rat: Vec<BigRational> = rest
        .iter()
        .enumerate()
        .map(|(i, c)| BigRational::new(c.clone(), num_traits::pow(bq.clone(), i)))
        .collect();
    let mut angles = Vec::new();
    let mut residual = 0.0f64;
    for (factor, mult) in yun(&rat) {
        if factor.len() < 2 {
            continue;
        }
        let fc: Vec<f64> = factor
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        for z in aberth(&fc)? {
            let gamma = Complex64::new(qf, 0.0) / z;
            residual = residual.max((gamma.norm() - qf).abs());
            let t = gamma.arg().rem_euclid(2.0 * PI);
            angles.push((t, mult));
        }
    }
    if residual > PURITY_TOL * qf {
        return Err(Error::Purity(residual));
    }
    let angles = cluster(angles);
    let degree = l.degree();
    Ok(Spectrum {
        q,
        degree,
        epsilon,
        rank,
        m_minus_q: mm,
        angles,
        forced_zeros: forced_zeros(q, degree, epsilon),
        purity_residual: residual,
        cyclotomic: None,
    })
}

/// Psi_l(x) = prod (1 - zeta x) over primitive l-th roots, low degree first.
pub fn cyclotomic_poly(l: u64) -> Vec<BigInt> {
    if l == 1 {
        return vec![BigInt::one(), -BigInt::one()];
    }
    // x^l - 1 divided by Phi_d for proper divisors d
    let mut num = vec![BigInt::zero(); l as usize + 1];
    num[0] = -BigInt::one();
    num[l as usize] = BigInt::one();
    for d in 1..l {
        if l % d == 0 {
            let phi_d = if d == 1 {
                vec![-BigInt::one(), BigInt::one()]
            } else {
                cyclotomic_poly(d)
            };
            num = div_monic_high(&num, &phi_d);
        }
    }
    num
}

fn div_monic_high(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut quo = vec![BigInt::zero(); a.len() - db];
    for i in (0..quo.len()).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        quo[i] = c;
    }
    quo
}

/// Power-series division by a polynomial with constant term 1; None if inexact.
fn div_unit_low(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    if b.len() > a.len() {
        return None;
    }
    let n = a.len() - b.len() + 1;
    let mut r = a.to_vec();
    let mut quo = Vec::with_capacity(n);
    for i in 0..n {
        let c = r[i].clone();
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        quo.push(c);
    }
    if r.iter().all(|x| x.is_zero()) {
        Some(quo)
    } else {
        None
    }
}

/// Factor L(x/q) into Psi_l, l >= 3, if it has that shape.
fn cyclotomic_factors(rest: &[BigInt], q: u64) -> Option<CyclotomicFactors> {
    let bq = BigInt::from(q);
    let mut p = Vec::with_capacity(rest.len());
    for (i, c) in rest.iter().enumerate() {
        let (quo, rem) = c.div_rem(&num_traits::pow(bq.clone(), i));
        if !rem.is_zero() {
            return None;
        }
        p.push(quo);
    }
    let mut out = Vec::new();
    let mut l = 3u64;
    while p.len() > 1 {
        let deg = (p.len() - 1) as u64;
        if l > 2 * deg * deg + 2 {
            return None;
        }
        if euler_phi(l) <= deg {
            let psi = cyclotomic_poly(l);
            let mut m = 0;
            while let Some(next) = div_unit_low(&p, &psi) {
                p = next;
                m += 1;
            }
            if m > 0 {
                out.push((l, m));
            }
        }
        l += 1;
    }
    Some(out)
}

// ------------------------------------------------------------ Q[x] helpers

type QPoly = Vec<BigRational>;

fn qtrim(mut a: QPoly) -> QPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn qderiv(a: &QPoly) -> QPoly {
    qtrim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

fn qdivmod(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut r = a.clone();
    let db = b.len() - 1;
    if r.len() <= db {
        return (vec![], qtrim(r));
    }
    let lead = b[db].clone();
    let mut quo = vec![BigRational::zero(); r.len() - db];
    for i in (0..quo.len()).rev() {
        let c = &r[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let t = &c * bj;
            r[i + j] -= t;
        }
        quo[i] = c;
    }
    (qtrim(quo), qtrim(r))
}

fn qmonic(a: QPoly) -> QPoly {
    let lead = a.last().cloned().expect("nonzero");
    a.into_iter().map(|c| c / &lead).collect()
}

fn qgcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (qtrim(a.clone()), qtrim(b.clone()));
    while !y.is_empty() {
        let r = qdivmod(&x, &y).1;
        x = y;
        y = r;
    }
    qmonic(x)
}

/// Squarefree decomposition: returns (a_i, i) with f = c * prod a_i^i.
fn yun(f: &QPoly) -> Vec<(QPoly, u32)> {
    let f = qtrim(f.clone());
    if f.len() < 2 {
        return vec![];
    }
    let fp = qderiv(&f);
    let a0 = qgcd(&f, &fp);
    let mut b = qdivmod(&f, &a0).0;
    let c = qdivmod(&fp, &a0).0;
    let bp = qderiv(&b);
    let mut d = qtrim(sub(&c, &bp));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = qgcd(&b, &d);
        b = qdivmod(&b, &a).0;
        let c = qdivmod(&d, &a).0;
        d = qtrim(sub(&c, &qderiv(&b)));
        if a.len() > 1 {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

fn sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect()
}

/// All complex roots of a squarefree real polynomial (low degree first).
pub fn aberth(c: &[f64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = c[n];
    let a: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &ai in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + ai;
        }
        (p, dp)
    };
    // Cauchy-like radius for the starting circle
    let radius = a[..n]
        .iter()
        .enumerate()
        .map(|(i, x)| x.abs().powf(1.0 / (n - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..1000 {
        let mut maxstep = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            maxstep = maxstep.max(w.norm() / z[i].norm().max(1.0));
        }
        if maxstep < 1e-15 {
            converged = true;
            break;
        }
    }
    // final Newton polish
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    if !converged && z.iter().any(|&zi| eval(zi).0.norm() > 1e-8) {
        return Err(Error::Purity(f64::NAN));
    }
    Ok(z)
}

// ------------------------------------------------------------- LI check

#[derive(Clone, Debug, PartialEq)]
pub struct LiReport {
    pub satisfied: bool,
    pub reasons: Vec<String>,
}

/// Diagnostic for linear independence of the non-forced angles in (0, pi).
pub fn li_diagnostic(s: &Spectrum, max_den: u64, tol: f64) -> LiReport {
    let mut reasons = Vec::new();
    let forced_q = s.forced_zeros.iter().filter(|&&z| z > 0).count() as u32;
    let forced_mq = s.forced_zeros.iter().filter(|&&z| z < 0).count() as u32;
    if s.rank > forced_q {
        reasons.push(format!(
            "zero at q of multiplicity {} beyond the forced {forced_q}",
            s.rank
        ));
    }
    if s.m_minus_q > forced_mq {
        reasons.push(format!(
            "zero at -q of multiplicity {} beyond the forced {forced_mq}",
            s.m_minus_q
        ));
    }
    for (t, m) in s.upper_angles() {
        if m > 1 {
            reasons.push(format!("angle {t:.12} has multiplicity {m}"));
        }
        let x = t / PI;
        for den in 1..=max_den {
            let num = (x * den as f64).round();
            if (x - num / den as f64).abs() < tol {
                reasons.push(format!("angle {t:.12} is close to {num}/{den} * pi"));
                break;
            }
        }
    }
    LiReport {
        satisfied: reasons.is_empty(),
        reasons,
    }
}
