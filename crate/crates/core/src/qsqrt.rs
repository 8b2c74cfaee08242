//! Exact arithmetic in Q(sqrt q).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// a + b*sqrt(q) with rational a, b. When q is a perfect square, b is folded into a.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt {
    q: u64,
    a: BigRational,
    b: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn exact_sqrt(q: u64) -> Option<u64> {
    let s = q.sqrt();
    (s * s == q).then_some(s)
}

impl QSqrt {
    pub fn new(q: u64, a: BigRational, b: BigRational) -> Self {
        match exact_sqrt(q) {
            Some(s) => QSqrt {
                q,
                a: a + b * rat(s as i64),
                b: BigRational::zero(),
            },
            None => QSqrt { q, a, b },
        }
    }
    pub fn zero(q: u64) -> Self {
        Self::new(q, BigRational::zero(), BigRational::zero())
    }
    pub fn rational(q: u64, a: BigRational) -> Self {
        Self::new(q, a, BigRational::zero())
    }
    pub fn int(q: u64, a: i64) -> Self {
        Self::rational(q, rat(a))
    }
    pub fn sqrt_q(q: u64) -> Self {
        Self::new(q, BigRational::zero(), BigRational::one())
    }
    /// q^{-r/2}
    pub fn q_pow_neg_half(q: u64, r: u64) -> Self {
        let qi = BigInt::from(q);
        if r % 2 == 0 {
            Self::rational(
                q,
                BigRational::new(BigInt::one(), num_traits::pow(qi, (r / 2) as usize)),
            )
        } else {
            let den = num_traits::pow(qi, (r / 2 + 1) as usize);
            Self::new(q, BigRational::zero(), BigRational::new(BigInt::one(), den))
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn a(&self) -> &BigRational {
        &self.a
    }
    pub fn b(&self) -> &BigRational {
        &self.b
    }
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn check(&self, other: &QSqrt) {
        assert_eq!(self.q, other.q, "mixing Q(sqrt q) for different q");
    }

    pub fn inv(&self) -> Result<QSqrt> {
        let norm = &self.a * &self.a - &self.b * &self.b * rat(self.q as i64);
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QSqrt::new(self.q, &self.a / &norm, -&self.b / &norm))
    }

    pub fn div(&self, other: &QSqrt) -> Result<QSqrt> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, c: &BigRational) -> QSqrt {
        QSqrt::new(self.q, &self.a * c, &self.b * c)
    }

    /// Exact sign in {-1, 0, 1}.
    pub fn signum(&self) -> i8 {
        let sa = sgn(&self.a);
        let sb = sgn(&self.b);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let qb2 = &self.b * &self.b * rat(self.q as i64);
        match a2.cmp(&qb2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.q as f64).sqrt()
    }
}

fn sgn(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for &QSqrt {
    type Output = QSqrt;
    fn add(self, o: &QSqrt) -> QSqrt {
        self.check(o);
        QSqrt::new(self.q, &self.a + &o.a, &self.b + &o.b)
    }
}
impl Sub for &QSqrt {
    type Output = QSqrt;
    fn sub(self, o: &QSqrt) -> QSqrt {
        self.check(o);
        QSqrt::new(self.q, &self.a - &o.a, &self.b - &o.b)
    }
}
impl Mul for &QSqrt {
    type Output = QSqrt;
    fn mul(self, o: &QSqrt) -> QSqrt {
        self.check(o);
        let q = rat(self.q as i64);
        QSqrt::new(
            self.q,
            &self.a * &o.a + &self.b * &o.b * q,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}
impl Neg for &QSqrt {
    type Output = QSqrt;
    fn neg(self) -> QSqrt {
        QSqrt::new(self.q, -&self.a, -&self.b)
    }
}
impl Add for QSqrt {
    type Output = QSqrt;
    fn add(self, o: QSqrt) -> QSqrt {
        &self + &o
    }
}
impl Sub for QSqrt {
    type Output = QSqrt;
    fn sub(self, o: QSqrt) -> QSqrt {
        &self - &o
    }
}
impl Mul for QSqrt {
    type Output = QSqrt;
    fn mul(self, o: QSqrt) -> QSqrt {
        &self * &o
    }
}
impl Neg for QSqrt {
    type Output = QSqrt;
    fn neg(self) -> QSqrt {
        -&self
    }
}

impl PartialOrd for QSqrt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.q != other.q {
            return None;
        }
        Some(match (self - other).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }
}

impl fmt::Display for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt({})", self.b, self.q),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{} - {}*sqrt({})", self.a, -&self.b, self.q)
                } else {
                    write!(f, "{} + {}*sqrt({})", self.a, self.b, self.q)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn field_ops() {
        let s = QSqrt::sqrt_q(3);
        assert_eq!(&s * &s, QSqrt::int(3, 3));
        let x = QSqrt::new(3, r(1, 2), r(-1, 3));
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, QSqrt::int(3, 1));
        assert_eq!(QSqrt::q_pow_neg_half(3, 3), QSqrt::new(3, r(0, 1), r(1, 9)));
        assert!(QSqrt::zero(3).inv().is_err());
    }

    #[test]
    fn signs() {
        // 2 - sqrt(3) > 0, 1 - sqrt(3) < 0
        assert_eq!(QSqrt::new(3, r(2, 1), r(-1, 1)).signum(), 1);
        assert_eq!(QSqrt::new(3, r(1, 1), r(-1, 1)).signum(), -1);
        assert_eq!(QSqrt::new(3, r(-2, 1), r(1, 1)).signum(), -1);
        assert_eq!(QSqrt::zero(3).signum(), 0);
        // perfect square folds
        let x = QSqrt::new(9, r(-3, 1), r(1, 1));
        assert!(x.is_zero());
        assert_eq!(x.signum(), 0);
    }

    #[test]
    fn float_agrees() {
        let x = QSqrt::new(5, r(-5, 4), r(3, 7));
        assert!((x.to_f64() - (-1.25 + 3.0 / 7.0 * 5f64.sqrt())).abs() < 1e-15);
    }
}
