//! Ulmer's curves y^2 + xy = x^3 - t^d: closed-form L-functions, ranks,
//! exact periodic parts of T_d(X), densities and theorem checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{divisors, euler_phi, gcd, is_prime, lcm, mult_order, pow_mod};
use crate::error::{Error, Result};
use crate::lpoly::{LPolynomial, Spectrum};
use crate::qsqrt::QSqrt;
use crate::race::{c_pm, density_from_signs, DensityReport};

/// Largest d handled.
pub const MAX_D: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UlmerSpec {
    pub p: u64,
    pub k: u32,
    pub d: u64,
    /// Least n >= 1 with d | p^n + 1.
    pub n: u64,
    pub q: u64,
}

pub fn validate(p: u64, k: u32, d: u64) -> Result<UlmerSpec> {
    if p == 2 {
        return Err(Error::Unsupported("Ulmer family needs odd p".into()));
    }
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if k == 0 || d == 0 {
        return Err(Error::InvalidArgument("k and d must be positive".into()));
    }
    if d > MAX_D {
        return Err(Error::WorkBound {
            bound: "d",
            limit: MAX_D,
            required: d,
        });
    }
    let q = p.checked_pow(k).ok_or(Error::Overflow("q = p^k"))?;
    let ord = mult_order(p, d)
        .ok_or_else(|| Error::InvalidArgument(format!("p = {p} divides d = {d}")))?;
    let target = (d - 1) % d;
    let n = (1..=ord)
        .find(|&n| pow_mod(p, n, d) == target)
        .ok_or_else(|| Error::InvalidArgument(format!("d = {d} divides no {p}^n + 1")))?;
    Ok(UlmerSpec { p, k, d, n, q })
}

/// The integer epsilon_d in {0, 1, 2, 3}.
pub fn epsilon_d(s: &UlmerSpec) -> u32 {
    let two = u32::from(s.d % 2 == 0 && (s.q - 1) % 4 == 0);
    let three = match (s.d % 3 == 0, (s.q - 1) % 3 == 0) {
        (false, _) => 0,
        (true, false) => 1,
        (true, true) => 2,
    };
    two + three
}

/// Number of inverse zeros at -q: one for 2 | d with q ≡ 3 mod 4, one for 3 | d with q ≡ 2 mod 3.
pub fn epsilon_minus(s: &UlmerSpec) -> u32 {
    u32::from(s.d % 2 == 0 && (s.q - 1) % 4 != 0) + u32::from(s.d % 3 == 0 && (s.q - 1) % 3 != 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivisorTerm {
    pub e: u64,
    pub phi: u64,
    /// Order of q modulo e.
    pub order: u64,
}

/// Divisors e of d with e not dividing 6.
pub fn divisor_terms(s: &UlmerSpec) -> Vec<DivisorTerm> {
    divisors(s.d)
        .into_iter()
        .filter(|e| 6 % e != 0)
        .map(|e| {
            let order = mult_order(s.q % e, e).expect("q is prime to d");
            let phi = euler_phi(e);
            assert!(phi % order == 0, "order of q mod {e} does not divide phi");
            DivisorTerm { e, phi, order }
        })
        .collect()
}

pub fn rank(s: &UlmerSpec) -> u64 {
    epsilon_d(s) as u64
        + divisor_terms(s)
            .iter()
            .map(|t| t.phi / t.order)
            .sum::<u64>()
}

pub fn l_degree(s: &UlmerSpec) -> u64 {
    printed_l_degree(s) + epsilon_minus(s) as u64
}

pub fn printed_l_degree(s: &UlmerSpec) -> u64 {
    epsilon_d(s) as u64 + divisor_terms(s).iter().map(|t| t.phi).sum::<u64>()
}

/// L(x/q) = (1-x)^{m_1} (1+x)^{m_2} prod Phi_l(x)^{m_l}.
pub fn cyclotomic_factors(s: &UlmerSpec) -> Vec<(u64, u32)> {
    let mut m: std::collections::BTreeMap<u64, u32> = Default::default();
    *m.entry(1).or_default() += epsilon_d(s);
    *m.entry(2).or_default() += epsilon_minus(s);
    for t in divisor_terms(s) {
        for l in divisors(t.order) {
            *m.entry(l).or_default() += (t.phi / t.order) as u32;
        }
    }
    m.into_iter().filter(|x| x.1 > 0).collect()
}

pub fn closed_form_spectrum(s: &UlmerSpec) -> Result<Spectrum> {
    Spectrum::from_cyclotomic(s.q, &cyclotomic_factors(s))
}

/// (1 - c (qT)^o)^e multiplied into `acc`.
fn mul_binomial_power(acc: &mut Vec<BigInt>, qo: &BigInt, sign: i64, o: usize, e: u64) {
    for _ in 0..e {
        let mut next = acc.clone();
        next.resize(acc.len() + o, BigInt::zero());
        for (i, c) in acc.iter().enumerate() {
            if !c.is_zero() {
                next[i + o] -= c * qo * sign;
            }
        }
        *acc = next;
    }
}

fn build_l(s: &UlmerSpec, with_minus: bool) -> Result<LPolynomial> {
    let bq = BigInt::from(s.q);
    let mut acc = vec![BigInt::one()];
    mul_binomial_power(&mut acc, &bq, 1, 1, epsilon_d(s) as u64);
    if with_minus {
        mul_binomial_power(&mut acc, &bq, -1, 1, epsilon_minus(s) as u64);
    }
    for t in divisor_terms(s) {
        let qo = num_traits::pow(bq.clone(), t.order as usize);
        mul_binomial_power(&mut acc, &qo, 1, t.order as usize, t.phi / t.order);
    }
    LPolynomial::new(s.q, acc)
}

/// L(E_d, T) in closed form.
pub fn closed_form_l(s: &UlmerSpec) -> Result<LPolynomial> {
    build_l(s, true)
}

/// The product without the factors (1 + qT).
pub fn printed_closed_form_l(s: &UlmerSpec) -> Result<LPolynomial> {
    build_l(s, false)
}

fn geometric(q: u64, l: u64) -> QSqrt {
    (&QSqrt::int(q, 1) - &QSqrt::q_pow_neg_half(q, l))
        .inv()
        .expect("q > 1")
}

/// Exact periodic part of T_d(X) in Q(sqrt q).
pub fn t_per(s: &UlmerSpec, x: u64) -> QSqrt {
    let q = s.q;
    let mut total = -&c_pm(x, q);
    let eps = epsilon_d(s);
    if eps > 0 {
        total = &total + &(&QSqrt::int(q, eps as i64) * &geometric(q, 1));
    }
    let em = epsilon_minus(s);
    if em > 0 {
        let one_plus = &QSqrt::int(q, 1) + &QSqrt::q_pow_neg_half(q, 1);
        let sign = if x % 2 == 0 { em as i64 } else { -(em as i64) };
        total = &total + &QSqrt::int(q, sign).div(&one_plus).expect("nonzero");
    }
    for t in divisor_terms(s) {
        let term = &QSqrt::q_pow_neg_half(q, x % t.order) * &geometric(q, t.order);
        total = &total + &(&QSqrt::int(q, t.phi as i64) * &term);
    }
    total
}

/// lcm of 2 and the orders o_e(q).
pub fn period(s: &UlmerSpec) -> u64 {
    divisor_terms(s).iter().fold(2, |acc, t| lcm(acc, t.order))
}

pub fn delta_exact(s: &UlmerSpec) -> DensityReport {
    let per = period(s);
    let signs = (0..per)
        .map(|r| t_per(s, if r == 0 { per } else { r }).signum())
        .collect();
    density_from_signs(signs)
}

// ------------------------------------------------------------ theorem checks

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremEntry {
    pub name: &'static str,
    pub applicable: bool,
    pub conclusion: String,
    /// Some(true) confirmed, Some(false) refuted, None undecided or not applicable.
    pub holds: Option<bool>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub spec: UlmerSpec,
    pub delta: DensityReport,
    pub rank: u64,
    pub entries: Vec<TheoremEntry>,
}

impl TheoremReport {
    pub fn entry(&self, name: &str) -> Option<&TheoremEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
    /// No applicable entry is refuted.
    pub fn consistent(&self) -> bool {
        self.entries.iter().all(|e| e.holds != Some(false))
    }
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Compares the density bounds with [a, b].
pub fn check_bounds(delta: &DensityReport, a: &BigRational, b: &BigRational) -> Option<bool> {
    let (lo, hi) = delta.exact_bounds()?;
    if &lo >= a && &hi <= b {
        Some(true)
    } else if &hi < a || &lo > b {
        Some(false)
    } else {
        None
    }
}

fn check_value(delta: &DensityReport, v: &BigRational) -> Option<bool> {
    check_bounds(delta, v, v)
}

fn p_pow_plus_one(p: u64, n: u64) -> Option<u128> {
    (p as u128).checked_pow(n.try_into().ok()?)?.checked_add(1)
}

pub fn theorem_check(s: &UlmerSpec) -> TheoremReport {
    let delta = delta_exact(s);
    let r = rank(s);
    let (p, k, d, n, q) = (s.p, s.k as u64, s.d, s.n, s.q);
    let d_is_pn1 = p_pow_plus_one(p, n) == Some(d as u128);
    let mut entries = Vec::new();
    let mut push = |name, applicable: bool, conclusion: String, holds: Option<bool>, note: &str| {
        entries.push(TheoremEntry {
            name,
            applicable,
            conclusion,
            holds: if applicable { holds } else { None },
            note: note.to_string(),
        })
    };

    let one = BigRational::one();
    let a = (d % 2 == 0 && q % 4 == 1) || d % 3 == 0;
    push(
        "thm-1.4-i",
        a,
        "delta = 1".into(),
        check_value(&delta, &one),
        "",
    );

    let a = d_is_pn1 && n % k == 0;
    push(
        "thm-1.4-ii",
        a,
        "delta = 1".into(),
        check_value(&delta, &one),
        "hypothesis also requires p large",
    );

    let a = p % 4 == 3 && d >= 5 && (p * p + 1) % d == 0 && k % 4 == 1 && k >= 5;
    let half = frac(1, 2);
    let expected_rank = match d % 4 {
        1 => Some((d - 1) / 4),
        2 => Some((d - 2) / 4),
        _ => None,
    };
    let holds = match check_value(&delta, &half) {
        Some(true) => Some(expected_rank == Some(r)),
        other => other,
    };
    push(
        "thm-1.5",
        a,
        format!("delta = 1/2, rank = {:?}", expected_rank),
        holds,
        "",
    );

    let a = d >= 7 && is_prime(d) && mult_order(p, d) == Some(d - 1) && k == (d - 1) / 2 + 1;
    push(
        "prop-3.5-i",
        a,
        format!("1/{} <= delta <= 4/{}", d - 1, d - 1),
        check_bounds(&delta, &frac(1, d as i64 - 1), &frac(4, d as i64 - 1)),
        "",
    );

    let a = d_is_pn1
        && d % 2 == 0
        && d / 2 >= 7
        && is_prime(d / 2)
        && p % 4 == 3
        && n >= 4
        && n % 2 == 0
        && k + 1 == n;
    push(
        "prop-3.5-ii",
        a,
        format!("1/{} <= delta <= 2/{n}", 2 * n),
        check_bounds(&delta, &frac(1, 2 * n as i64), &frac(2, n as i64)),
        "",
    );

    let a = d_is_pn1 && n >= 2 && n % 2 == 0 && p % 4 == 3 && k > n && (k - 1) % n == 0;
    push(
        "prop-3.6",
        a,
        format!("1/{} <= delta <= 1 - 1/{}", 2 * n, 2 * n),
        check_bounds(
            &delta,
            &frac(1, 2 * n as i64),
            &frac(2 * n as i64 - 1, 2 * n as i64),
        ),
        "hypothesis also requires p large",
    );

    let a = p >= 17
        && n >= 3
        && is_prime(n)
        && (p + 1) % n != 0
        && p_pow_plus_one(p, n) == Some(d as u128 * (p as u128 + 1))
        && k >= 4
        && k % 2 == 0
        && gcd(k, n) == 1;
    let lo = frac(1, k as i64) - frac(2, (n * k) as i64);
    let hi = frac(1, k as i64) + frac(1, 2 * n as i64);
    let holds = match check_bounds(&delta, &lo, &hi) {
        Some(true) => Some(r * n == d - 1),
        other => other,
    };
    push(
        "prop-3.9",
        a,
        format!("{lo} <= delta <= {hi}, rank = (d - 1)/{n}"),
        holds,
        "",
    );

    let a = d >= 7;
    let per_ok = (2 * n) % period(s) == 0;
    let holds = match check_bounds(&delta, &frac(1, 2 * n as i64), &one) {
        Some(true) => Some(per_ok),
        other => other,
    };
    push(
        "cor-3.3",
        a,
        format!("delta >= 1/{}, period divides {}", 2 * n, 2 * n),
        holds,
        "",
    );

    TheoremReport {
        spec: *s,
        delta,
        rank: r,
        entries,
    }
}

// ------------------------------------------------------------------- scans

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub spec: UlmerSpec,
    pub epsilon_d: u32,
    pub rank: u64,
    pub period: u64,
    pub delta: DensityReport,
}

/// All valid specs with odd prime p <= p_max, d <= d_max, k <= k_max.
pub fn scan(p_max: u64, d_max: u64, k_max: u32) -> Vec<ScanRow> {
    let mut rows = Vec::new();
    for p in (3..=p_max).filter(|&p| is_prime(p)) {
        for k in 1..=k_max {
            for d in 1..=d_max.min(MAX_D) {
                let Ok(spec) = validate(p, k, d) else {
                    continue;
                };
                rows.push(ScanRow {
                    spec,
                    epsilon_d: epsilon_d(&spec),
                    rank: rank(&spec),
                    period: period(&spec),
                    delta: delta_exact(&spec),
                });
            }
        }
    }
    rows
}

/// A spec of the shape d = (p^n + 1)/(p + 1), q = p^{2m}, with exact density within 1/6 of 1/(2m).
pub fn find_limit_point(m: u32) -> Option<(UlmerSpec, DensityReport)> {
    let k = 2 * m;
    let target = frac(1, 2 * m as i64);
    let tol = frac(1, 6);
    for p in (17..=50u64).filter(|&p| is_prime(p)) {
        for n in (3..=13u64).filter(|&n| is_prime(n)) {
            if (p + 1) % n == 0 || gcd(k as u64, n) != 1 {
                continue;
            }
            let Some(num) = p_pow_plus_one(p, n) else {
                continue;
            };
            let d = num / (p as u128 + 1);
            if d > MAX_D as u128 {
                continue;
            }
            let Ok(spec) = validate(p, k, d as u64) else {
                continue;
            };
            let delta = delta_exact(&spec);
            let Some((lo, hi)) = delta.exact_bounds() else {
                continue;
            };
            let dist = |x: &BigRational| {
                let diff = x - &target;
                if diff < BigRational::zero() {
                    -diff
                } else {
                    diff
                }
            };
            if dist(&lo) <= tol && dist(&hi) <= tol {
                return Some((spec, delta));
            }
        }
    }
    None
}

/// The scan row whose exact density interval lies closest to `target` (max distance of both ends).
pub fn nearest_density<'a>(
    rows: &'a [ScanRow],
    target: &BigRational,
) -> Option<(&'a ScanRow, BigRational)> {
    let abs = |x: BigRational| if x < BigRational::zero() { -x } else { x };
    rows.iter()
        .filter_map(|r| {
            let (lo, hi) = r.delta.exact_bounds()?;
            let dist = abs(&lo - target).max(abs(&hi - target));
            Some((r, dist))
        })
        .min_by(|a, b| a.1.cmp(&b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::race::DensityValue;

    #[test]
    fn limit_point_search() {
        let rows = scan(13, 100, 3);
        for m in 1..=3 {
            let (row, dist) = nearest_density(&rows, &frac(1, 2 * m)).unwrap();
            assert!(dist.is_zero(), "{:?}", row.spec);
        }
        // the k = 2m construction lands near 2/k rather than 1/k
        let s = validate(17, 4, 78881).unwrap();
        assert_eq!(
            delta_exact(&s).exact_bounds().unwrap(),
            (frac(1, 2), frac(1, 2))
        );
        assert_eq!(rank(&s), (78881 - 1) / 5);
    }

    #[test]
    fn validation() {
        assert_eq!(validate(3, 1, 5).unwrap().n, 2);
        assert_eq!(validate(3, 4, 7).unwrap().n, 3);
        assert!(validate(3, 1, 11).is_err());
        assert!(validate(2, 1, 3).is_err());
        assert!(validate(3, 1, 3).is_err());
    }

    #[test]
    fn epsilons() {
        assert_eq!(epsilon_d(&validate(3, 1, 5).unwrap()), 0);
        assert_eq!(epsilon_d(&validate(5, 1, 3).unwrap()), 1);
        assert_eq!(epsilon_d(&validate(5, 1, 6).unwrap()), 2);
        assert_eq!(epsilon_minus(&validate(5, 1, 3).unwrap()), 1);
        assert_eq!(epsilon_minus(&validate(5, 1, 6).unwrap()), 1);
        assert_eq!(epsilon_minus(&validate(3, 1, 5).unwrap()), 0);
    }

    #[test]
    fn closed_forms() {
        let s = validate(3, 1, 5).unwrap();
        assert_eq!(
            closed_form_l(&s).unwrap(),
            LPolynomial::from_i64(3, &[1, 0, 0, 0, -81]).unwrap()
        );
        assert_eq!(rank(&s), 1);
        let s = validate(3, 1, 10).unwrap();
        let l = closed_form_l(&s).unwrap();
        assert_eq!(l.degree(), 9);
        let printed = printed_closed_form_l(&s).unwrap();
        assert_eq!(
            printed,
            LPolynomial::from_i64(3, &[1, 0, 0, 0, -162, 0, 0, 0, 6561]).unwrap()
        );
        let s = validate(5, 1, 6).unwrap();
        assert_eq!(
            closed_form_l(&s).unwrap(),
            LPolynomial::from_i64(5, &[1, -5, -25, 125]).unwrap()
        );
        assert_eq!(
            printed_closed_form_l(&s).unwrap(),
            LPolynomial::from_i64(5, &[1, -10, 25]).unwrap()
        );
    }

    #[test]
    fn t_per_e5() {
        let s = validate(3, 1, 5).unwrap();
        assert_eq!(t_per(&s, 4), QSqrt::int(3, 3));
        assert_eq!(t_per(&s, 1), QSqrt::sqrt_q(3));
        assert!(t_per(&s, 2).is_zero() && t_per(&s, 3).is_zero());
        let spec = closed_form_spectrum(&s).unwrap();
        for x in 1..=12 {
            assert_eq!(
                crate::race::t_explicit_exact(&spec, x).unwrap(),
                t_per(&s, x)
            );
        }
    }

    #[test]
    fn t_per_agrees_with_spectrum() {
        for (p, k, d) in [
            (5, 1, 3),
            (5, 1, 6),
            (3, 1, 10),
            (3, 4, 7),
            (5, 1, 26),
            (7, 1, 10),
        ] {
            let s = validate(p, k, d).unwrap();
            let spec = closed_form_spectrum(&s).unwrap();
            assert_eq!(spec.degree as u64, l_degree(&s));
            assert_eq!(spec.rank as u64, rank(&s));
            for x in 1..=2 * s.n + 2 {
                assert_eq!(
                    crate::race::t_explicit_exact(&spec, x).unwrap(),
                    t_per(&s, x),
                    "{p} {k} {d} {x}"
                );
            }
        }
    }

    #[test]
    fn densities() {
        let d = delta_exact(&validate(5, 1, 3).unwrap());
        assert_eq!(d.value, DensityValue::Exact(frac(1, 1)));
        let d = delta_exact(&validate(3, 5, 5).unwrap());
        assert_eq!(d.value, DensityValue::Exact(frac(1, 2)));
        let d = delta_exact(&validate(5, 1, 26).unwrap());
        assert_eq!(d.value, DensityValue::Exact(frac(1, 1)));
        let s = validate(3, 4, 7).unwrap();
        let signs: Vec<i8> = (1..=6).map(|x| t_per(&s, x).signum()).collect();
        // X = 1..6; class 0 is X = 6
        assert_eq!(signs, vec![1, -1, 1, -1, -1, 1]);
        assert_eq!(delta_exact(&s).value, DensityValue::Exact(frac(1, 2)));
    }

    #[test]
    fn theorem_reports() {
        let r = theorem_check(&validate(3, 5, 5).unwrap());
        assert_eq!(r.entry("thm-1.5").unwrap().holds, Some(true));
        let r = theorem_check(&validate(3, 4, 7).unwrap());
        assert_eq!(r.entry("prop-3.5-i").unwrap().holds, Some(true));
        let r = theorem_check(&validate(17, 4, 273).unwrap());
        assert!(!r.entry("prop-3.9").unwrap().applicable);
    }
}
