//! Finite fields F_{p^k} in polynomial basis.
//!
//! An element is stored as the packed integer `sum c_i p^i` of its coordinates
//! `c_0 + c_1 u + ... + c_{k-1} u^{k-1}` modulo the defining polynomial. The
//! packing is a bijection onto `0..q`, so the representation is canonical.

use std::fmt;
use std::sync::Arc;

use crate::arith;
use crate::error::{invalid, Error, Result};

/// Log-domain sentinel for the zero element.
pub const LOG_ZERO: u32 = u32::MAX;

/// Largest field for which log tables are built; residue fields are limited to this size.
pub const TABLE_LIMIT: u64 = 1 << 21;
const FIELD_LIMIT: u64 = 1 << 40;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub(crate) u64);

impl FieldElement {
    pub fn index(self) -> u64 {
        self.0
    }
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Discrete log tables relative to a fixed primitive element `g`.
pub struct Tables {
    /// `log[x]` for a packed element index, `LOG_ZERO` at 0.
    pub log: Vec<u32>,
    /// `exp[i] = g^i` as a packed index, for `0 <= i < q - 1`.
    pub exp: Vec<u32>,
    /// `zech[d] = log(1 + g^d)`.
    pub zech: Vec<u32>,
    pub order: u32,
}

impl Tables {
    #[inline]
    pub fn lmul(&self, a: u32, b: u32) -> u32 {
        if a == LOG_ZERO || b == LOG_ZERO {
            return LOG_ZERO;
        }
        let s = a + b;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn ladd(&self, a: u32, b: u32) -> u32 {
        if a == LOG_ZERO {
            return b;
        }
        if b == LOG_ZERO {
            return a;
        }
        let d = if b >= a { b - a } else { b + self.order - a };
        let z = self.zech[d as usize];
        if z == LOG_ZERO {
            return LOG_ZERO;
        }
        let s = a + z;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    /// Log of `x^e` for a log `a`.
    #[inline]
    pub fn lpow(&self, a: u32, e: u64) -> u32 {
        if a == LOG_ZERO {
            return if e == 0 { 0 } else { LOG_ZERO };
        }
        ((a as u64 * (e % self.order as u64)) % self.order as u64) as u32
    }
}

struct Inner {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    pow_p: Vec<u64>,
    generator: u64,
    tables: Option<Tables>,
}

/// Immutable description of F_{p^k}; cheap to clone.
#[derive(Clone)]
pub struct FieldContext {
    inner: Arc<Inner>,
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}
impl Eq for FieldContext {}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{}^{} mod {:?}",
            self.inner.p, self.inner.k, self.inner.modulus
        )
    }
}

/// Builds F_{p^k} with the smallest monic irreducible modulus of degree `k`.
pub fn make_field(p: u64, k: u32) -> Result<FieldContext> {
    FieldContext::new(p, k)
}

impl FieldContext {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !arith::is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        if k < 1 {
            return invalid("extension degree must be at least 1");
        }
        let q = match p.checked_pow(k) {
            Some(q) if q <= FIELD_LIMIT => q,
            _ => return invalid(format!("field {p}^{k} too large")),
        };
        let modulus = smallest_irreducible(p, k as usize);
        Ok(Self::with_modulus(p, k, q, modulus))
    }

    fn with_modulus(p: u64, k: u32, q: u64, modulus: Vec<u64>) -> Self {
        let mut pow_p = Vec::with_capacity(k as usize + 1);
        let mut acc = 1u64;
        for _ in 0..=k {
            pow_p.push(acc);
            acc = acc.saturating_mul(p);
        }
        let bare = FieldContext {
            inner: Arc::new(Inner {
                p,
                k,
                q,
                modulus,
                pow_p,
                generator: 0,
                tables: None,
            }),
        };
        let g = bare.find_primitive();
        let tables = (q <= TABLE_LIMIT).then(|| bare.build_tables(g));
        let mut inner = Arc::try_unwrap(bare.inner).ok().expect("sole owner");
        inner.generator = g.0;
        inner.tables = tables;
        FieldContext {
            inner: Arc::new(inner),
        }
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }
    pub fn k(&self) -> u32 {
        self.inner.k
    }
    pub fn q(&self) -> u64 {
        self.inner.q
    }
    /// Monic modulus, coefficients low to high.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }
    pub fn tables(&self) -> Option<&Tables> {
        self.inner.tables.as_ref()
    }
    /// The primitive element whose powers index the log tables.
    pub fn generator(&self) -> FieldElement {
        FieldElement(self.inner.generator)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }
    /// The class of `u` (the generator of the polynomial basis); equals `p` as a packed index when k > 1.
    pub fn u(&self) -> FieldElement {
        if self.inner.k == 1 {
            FieldElement((self.inner.p - self.inner.modulus[0]) % self.inner.p)
        } else {
            FieldElement(self.inner.p)
        }
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.inner.p as i64) as u64)
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.inner.q {
            return invalid(format!("element index {index} out of range"));
        }
        Ok(FieldElement(index))
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<FieldElement> {
        if coords.len() > self.inner.k as usize {
            return invalid("too many coordinates");
        }
        let mut idx = 0;
        for (i, &c) in coords.iter().enumerate() {
            if c >= self.inner.p {
                return invalid(format!("coordinate {c} not reduced mod {}", self.inner.p));
            }
            idx += c * self.inner.pow_p[i];
        }
        Ok(FieldElement(idx))
    }

    pub fn coords(&self, a: FieldElement) -> Vec<u64> {
        let p = self.inner.p;
        let mut x = a.0;
        (0..self.inner.k)
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    }

    /// Whether `a` lies in the prime field.
    pub fn is_prime_field_element(&self, a: FieldElement) -> bool {
        a.0 < self.inner.p
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.inner.q).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.inner.p;
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.inner.k == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        for i in 0..self.inner.k as usize {
            let c = (x % p + y % p) % p;
            out += c * self.inner.pow_p[i];
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.inner.p;
        if p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0;
        for i in 0..self.inner.k as usize {
            let c = (p - x % p) % p;
            out += c * self.inner.pow_p[i];
            x /= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        if self.inner.k == 1 {
            return FieldElement(arith::mul_mod(a.0, b.0, self.inner.p));
        }
        if let Some(t) = &self.inner.tables {
            let l = t.lmul(t.log[a.0 as usize], t.log[b.0 as usize]);
            return FieldElement(t.exp[l as usize] as u64);
        }
        self.mul_schoolbook(a, b)
    }

    fn mul_schoolbook(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.inner.p;
        let k = self.inner.k as usize;
        let x = self.coords(a);
        let y = self.coords(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + arith::mul_mod(x[i], y[j], p)) % p;
            }
        }
        let m = &self.inner.modulus;
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                let sub = arith::mul_mod(c, m[j], p);
                prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
            }
        }
        let mut idx = 0;
        for (i, &c) in prod.iter().take(k).enumerate() {
            idx += c * self.inner.pow_p[i];
        }
        FieldElement(idx)
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        if let Some(t) = &self.inner.tables {
            if a.0 == 0 {
                return if e == 0 { self.one() } else { self.zero() };
            }
            let l = t.lpow(t.log[a.0 as usize], e);
            return FieldElement(t.exp[l as usize] as u64);
        }
        let mut base = a;
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.inner.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// The p-th power map.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.inner.p)
    }

    /// Quadratic character: 0, 1 or -1 (odd characteristic only).
    pub fn chi(&self, a: FieldElement) -> i32 {
        if a.0 == 0 {
            return 0;
        }
        if let Some(t) = &self.inner.tables {
            return if t.log[a.0 as usize] % 2 == 0 { 1 } else { -1 };
        }
        if self.pow(a, (self.inner.q - 1) / 2) == self.one() {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        self.inner.p == 2 || self.chi(a) >= 0
    }

    /// Absolute trace to F_p, returned as a residue.
    pub fn trace(&self, a: FieldElement) -> u64 {
        let mut s = self.zero();
        let mut x = a;
        for _ in 0..self.inner.k {
            s = self.add(s, x);
            x = self.frobenius(x);
        }
        s.0
    }

    /// Log of `a` with respect to `generator()`; requires tables.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        self.inner.tables.as_ref().map(|t| t.log[a.0 as usize])
    }

    pub fn from_log(&self, l: u32) -> FieldElement {
        match &self.inner.tables {
            Some(t) if l != LOG_ZERO => FieldElement(t.exp[l as usize] as u64),
            Some(_) => self.zero(),
            None => {
                if l == LOG_ZERO {
                    self.zero()
                } else {
                    self.pow(self.generator(), l as u64)
                }
            }
        }
    }

    fn find_primitive(&self) -> FieldElement {
        let order = self.inner.q - 1;
        if order == 1 {
            return self.one();
        }
        let primes: Vec<u64> = arith::factorize(order)
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        for idx in 1..self.inner.q {
            let g = FieldElement(idx);
            if primes
                .iter()
                .all(|&r| self.pow_plain(g, order / r) != self.one())
            {
                return g;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    fn pow_plain(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    fn build_tables(&self, g: FieldElement) -> Tables {
        let q = self.inner.q as usize;
        let order = (q - 1) as u32;
        let mut log = vec![LOG_ZERO; q];
        let mut exp = vec![0u32; q - 1];
        let mut x = self.one();
        for i in 0..q - 1 {
            exp[i] = x.0 as u32;
            log[x.0 as usize] = i as u32;
            x = self.mul(x, g);
        }
        let one = self.one();
        let zech = exp
            .iter()
            .map(|&e| log[self.add(FieldElement(e as u64), one).0 as usize])
            .collect();
        Tables {
            log,
            exp,
            zech,
            order,
        }
    }
}

/// Smallest monic irreducible of degree `k` over F_p, ordering candidates by
/// the packed integer of their non-leading coefficients.
fn smallest_irreducible(p: u64, k: usize) -> Vec<u64> {
    let total = p.pow(k as u32);
    for m in 0..total {
        let mut f = Vec::with_capacity(k + 1);
        let mut x = m;
        for _ in 0..k {
            f.push(x % p);
            x /= p;
        }
        f.push(1);
        if k == 1 || (f[0] != 0 && prime_poly::is_irreducible(&f, p)) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Dense polynomial helpers over F_p used only to pick moduli.
mod prime_poly {
    use crate::arith::{mul_mod, pow_mod};

    fn trim(f: &mut Vec<u64>) {
        while f.len() > 1 && *f.last().unwrap() == 0 {
            f.pop();
        }
    }

    fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv_lead = pow_mod(m[dm], p - 2, p);
        while r.len() > dm {
            let dr = r.len() - 1;
            let c = mul_mod(r[dr], inv_lead, p);
            for j in 0..=dm {
                let s = mul_mod(c, m[j], p);
                r[dr - dm + j] = (r[dr - dm + j] + p - s) % p;
            }
            r.pop();
            trim(&mut r);
        }
        if r.is_empty() {
            r.push(0);
        }
        r
    }

    fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        rem(&prod, m, p)
    }

    fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(&r, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        r
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !(b.len() == 1 && b[0] == 0) {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// x^(p^i) mod f, iterated.
    fn frob_iter(f: &[u64], i: usize, p: u64) -> Vec<u64> {
        let mut x = vec![0, 1];
        for _ in 0..i {
            x = powmod(&x, p, f, p);
        }
        x
    }

    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        let xn = frob_iter(f, n, p);
        let mut diff = xn.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        if !(diff.len() == 1 && diff[0] == 0) {
            return false;
        }
        for (r, _) in crate::arith::factorize(n as u64) {
            let mut h = frob_iter(f, n / r as usize, p);
            h.resize(h.len().max(2), 0);
            h[1] = (h[1] + p - 1) % p;
            trim(&mut h);
            let g = gcd(f, &h, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field() {
        let f = make_field(3, 1).unwrap();
        assert_eq!(f.q(), 3);
        assert_eq!(f.inv(f.from_int(2)).unwrap(), f.from_int(2));
        let all: Vec<u64> = f.elements().map(|e| e.index()).collect();
        assert_eq!(all, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_field(4, 1).is_err());
        assert!(make_field(3, 0).is_err());
    }

    #[test]
    fn f4_multiplication() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let u = f.u();
        assert_eq!(f.coords(f.mul(u, u)), vec![1, 1]);
    }

    #[test]
    fn f9_modulus_and_squares() {
        let f = make_field(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        let sq: std::collections::BTreeSet<_> = f
            .elements()
            .filter(|e| !e.is_zero())
            .map(|e| f.square(e))
            .collect();
        assert_eq!(sq.len(), 4);
    }

    #[test]
    fn f243_modulus_is_smallest() {
        let f = make_field(3, 5).unwrap();
        // brute force: a quintic is reducible iff it has a factor of degree 1 or 2
        let p = 3u64;
        let mut best = None;
        'm: for m in 0..243u64 {
            let mut c = Vec::new();
            let mut x = m;
            for _ in 0..5 {
                c.push(x % p);
                x /= p;
            }
            c.push(1);
            let eval = |t: u64| c.iter().rev().fold(0, |acc, &a| (acc * t + a) % p);
            if (0..3).any(|t| eval(t) == 0) {
                continue;
            }
            for a in 0..3u64 {
                for b in 0..3u64 {
                    let quad = [b, a, 1u64];
                    let mut r = c.clone();
                    for i in (2..6).rev() {
                        let lead = r[i];
                        for j in 0..3 {
                            r[i - 2 + j] = (r[i - 2 + j] + 3 * p - lead * quad[j] % p) % p;
                        }
                    }
                    if r[0] == 0 && r[1] == 0 {
                        continue 'm;
                    }
                }
            }
            best = Some(c);
            break;
        }
        assert_eq!(f.modulus(), best.unwrap().as_slice());
    }

    #[test]
    fn schoolbook_matches_tables() {
        for (p, k) in [(2u64, 5u32), (3, 4), (5, 2), (7, 3)] {
            let f = make_field(p, k).unwrap();
            for a in f.elements().step_by(3) {
                for b in f.elements().step_by(7) {
                    assert_eq!(f.mul(a, b), f.mul_schoolbook(a, b));
                }
            }
        }
    }

    #[test]
    fn fermat_and_frobenius() {
        for (p, k) in [(2u64, 3u32), (3, 3), (5, 2), (2, 6)] {
            let f = make_field(p, k).unwrap();
            for a in f.elements() {
                assert_eq!(f.pow(a, f.q()), a);
                let mut x = a;
                for _ in 0..k {
                    x = f.frobenius(x);
                }
                assert_eq!(x, a);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
            }
        }
    }

    #[test]
    fn zech_addition_agrees() {
        let f = make_field(3, 3).unwrap();
        let t = f.tables().unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let l = t.ladd(t.log[a.0 as usize], t.log[b.0 as usize]);
                assert_eq!(f.from_log(l), f.add(a, b));
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = make_field(2, 23).unwrap();
        assert!(f.tables().is_none());
        let a = f.element(12345).unwrap();
        assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        assert_eq!(f.pow(a, f.q()), a);
    }
}
