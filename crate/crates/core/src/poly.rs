//! Dense univariate polynomials over F_q.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::field::{FieldContext, FieldElement};

#[derive(Clone)]
pub struct Poly {
    ctx: FieldContext,
    /// Lowest degree first; no trailing zeros.
    coeffs: Vec<FieldElement>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.ctx == other.ctx
    }
}
impl Eq for Poly {}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = if self.ctx.k() == 1 {
                format!("{}", c.index())
            } else {
                format!("{:?}", self.ctx.coords(*c))
            };
            match i {
                0 => write!(f, "{cs}")?,
                _ => {
                    if *c != self.ctx.one() {
                        write!(f, "{cs}*")?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(ctx: &FieldContext, coeffs: Vec<FieldElement>) -> Self {
        let mut p = Poly {
            ctx: ctx.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    pub fn from_ints(ctx: &FieldContext, coeffs: &[i64]) -> Self {
        Self::new(ctx, coeffs.iter().map(|&c| ctx.from_int(c)).collect())
    }

    pub fn zero(ctx: &FieldContext) -> Self {
        Self::new(ctx, Vec::new())
    }
    pub fn one(ctx: &FieldContext) -> Self {
        Self::constant(ctx, ctx.one())
    }
    pub fn constant(ctx: &FieldContext, c: FieldElement) -> Self {
        Self::new(ctx, vec![c])
    }
    /// The monomial `c t^n`.
    pub fn monomial(ctx: &FieldContext, c: FieldElement, n: usize) -> Self {
        let mut v = vec![ctx.zero(); n + 1];
        v[n] = c;
        Self::new(ctx, v)
    }
    pub fn t(ctx: &FieldContext) -> Self {
        Self::monomial(ctx, ctx.one(), 1)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or_default()
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    /// Degree with deg 0 = 0 convention for the zero polynomial.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
    pub fn lead(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or_default()
    }
    pub fn is_monic(&self) -> bool {
        self.lead() == self.ctx.one()
    }
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::MixedContexts);
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    fn add_unchecked(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| self.ctx.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::new(&self.ctx, v)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(
            &self.ctx,
            self.coeffs.iter().map(|&c| self.ctx.neg(c)).collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let f = &self.ctx;
        let mut v = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, v)
    }

    pub fn scale(&self, c: FieldElement) -> Poly {
        Poly::new(
            &self.ctx,
            self.coeffs.iter().map(|&a| self.ctx.mul(a, c)).collect(),
        )
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut r = Poly::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        r
    }

    /// Multiplies by t^n.
    pub fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.ctx.zero(); n];
        v.extend_from_slice(&self.coeffs);
        Poly::new(&self.ctx, v)
    }

    pub fn divmod(&self, d: &Poly) -> Result<(Poly, Poly)> {
        self.check(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.ctx;
        let dd = d.deg();
        let inv = f.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quo = vec![f.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = f.mul(r[i], inv);
            if c.is_zero() {
                continue;
            }
            quo[i - dd] = c;
            for j in 0..=dd {
                r[i - dd + j] = f.sub(r[i - dd + j], f.mul(c, d.coeffs[j]));
            }
        }
        r.truncate(dd);
        Ok((Poly::new(f, quo), Poly::new(f, r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.divmod(d)?.1)
    }

    /// Exact quotient; errors when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(d)?;
        if !r.is_zero() {
            return invalid("inexact polynomial division");
        }
        Ok(q)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.ctx.inv(self.lead()).expect("nonzero lead");
        self.scale(inv)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let f = &self.ctx;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.ctx;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.from_int((i as u64 % f.p()) as i64), c))
            .collect();
        Poly::new(f, v)
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly) -> Result<Poly> {
        self.mul(other)?.rem(m)
    }

    pub fn powmod(&self, mut e: u128, m: &Poly) -> Result<Poly> {
        let mut base = self.rem(m)?;
        let mut r = Poly::one(&self.ctx).rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod(&base, m)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mulmod(&base, m)?;
            }
        }
        Ok(r)
    }

    /// Multiplicity of the irreducible `pi` in `self` (self nonzero).
    pub fn valuation(&self, pi: &Poly) -> Result<u32> {
        if self.is_zero() {
            return invalid("valuation of the zero polynomial");
        }
        let mut v = 0;
        let mut f = self.clone();
        loop {
            let (q, r) = f.divmod(pi)?;
            if !r.is_zero() {
                return Ok(v);
            }
            v += 1;
            f = q;
        }
    }

    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return invalid("zero polynomial");
        }
        let d = self.derivative();
        if d.is_zero() {
            return Ok(self.is_constant());
        }
        Ok(self.gcd(&d)?.is_constant())
    }

    /// Rabin's test: gcd(f, t^{q^i} - t) = 1 for i <= deg/2 and f | t^{q^n} - t.
    pub fn is_irreducible(&self) -> Result<bool> {
        if self.is_zero() {
            return invalid("zero polynomial");
        }
        let n = self.deg();
        if n == 0 {
            return Ok(false);
        }
        if n == 1 {
            return Ok(true);
        }
        let q = self.ctx.q() as u128;
        let t = Poly::t(&self.ctx);
        let mut x = t.clone();
        for _ in 1..=n / 2 {
            x = x.powmod(q, self)?;
            let g = self.gcd(&x.sub(&t)?)?;
            if !g.is_constant() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Irreducibility by trial division over every monic polynomial of degree <= n/2.
    pub fn is_irreducible_exhaustive(&self) -> Result<bool> {
        if self.is_zero() {
            return invalid("zero polynomial");
        }
        let n = self.deg();
        if n == 0 {
            return Ok(false);
        }
        for d in 1..=n / 2 {
            for g in monic_polys(&self.ctx, d) {
                if self.rem(&g)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted by (degree, generator). The leading coefficient is returned separately.
    pub fn factor(&self) -> Result<(FieldElement, Vec<(Poly, u32)>)> {
        if self.is_zero() {
            return invalid("cannot factor zero");
        }
        let lead = self.lead();
        let mut out: Vec<(Poly, u32)> = Vec::new();
        for (sf, mult) in self.monic().squarefree_decomposition()? {
            for (deg, part) in sf.distinct_degree()? {
                for g in part.equal_degree(deg)? {
                    match out.iter_mut().find(|(h, _)| *h == g) {
                        Some(e) => e.1 += mult,
                        None => out.push((g, mult)),
                    }
                }
            }
        }
        out.sort();
        Ok((lead, out))
    }

    /// Squarefree parts with multiplicities for a monic polynomial (handles p-th powers).
    fn squarefree_decomposition(&self) -> Result<Vec<(Poly, u32)>> {
        let f = &self.ctx;
        let p = f.p();
        let mut out = Vec::new();
        if self.is_constant() {
            return Ok(out);
        }
        let d = self.derivative();
        if d.is_zero() {
            // self = g(t^p) = h^p with h the p-th root of coefficients
            let root = self.pth_root();
            for (g, m) in root.squarefree_decomposition()? {
                out.push((g, m * p as u32));
            }
            return Ok(out);
        }
        let mut c = self.gcd(&d)?;
        let mut w = self.div_exact(&c)?;
        let mut i = 1u32;
        while !w.is_constant() {
            let y = w.gcd(&c)?;
            let z = w.div_exact(&y)?;
            if !z.is_constant() {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = c.div_exact(&w)?;
        }
        if !c.is_constant() {
            let root = c.pth_root();
            for (g, m) in root.squarefree_decomposition()? {
                out.push((g, m * p as u32));
            }
        }
        Ok(out)
    }

    fn pth_root(&self) -> Poly {
        let f = &self.ctx;
        let p = f.p() as usize;
        let e = f.q() / f.p();
        let v = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|&c| f.pow(c, e))
            .collect();
        Poly::new(f, v)
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn distinct_degree(&self) -> Result<Vec<(usize, Poly)>> {
        let q = self.ctx.q() as u128;
        let t = Poly::t(&self.ctx);
        let mut out = Vec::new();
        let mut f = self.clone();
        let mut x = t.clone();
        let mut d = 0;
        while f.deg() >= 2 * (d + 1) {
            d += 1;
            x = x.powmod(q, &f)?;
            let g = f.gcd(&x.sub(&t)?)?;
            if !g.is_constant() {
                f = f.div_exact(&g)?;
                x = x.rem(&f)?;
                out.push((d, g));
            }
        }
        if !f.is_constant() {
            out.push((f.deg(), f));
        }
        Ok(out)
    }

    /// Splits a product of distinct monic irreducibles of degree `d`.
    fn equal_degree(&self, d: usize) -> Result<Vec<Poly>> {
        if self.deg() == d {
            return Ok(vec![self.clone()]);
        }
        let f = &self.ctx;
        let qd = (f.q() as u128).pow(d as u32);
        for a in splitting_candidates(f, self.deg()) {
            let h = if f.p() == 2 {
                let mut s = a.rem(self)?;
                let mut acc = s.clone();
                for _ in 1..(d as u32 * f.k()) {
                    s = s.mulmod(&s, self)?;
                    acc = acc.add(&s)?;
                }
                acc
            } else {
                a.powmod((qd - 1) / 2, self)?.sub(&Poly::one(f))?
            };
            let g = self.gcd(&h)?;
            if !g.is_constant() && g.deg() < self.deg() {
                let mut parts = g.equal_degree(d)?;
                parts.extend(self.div_exact(&g)?.equal_degree(d)?);
                return Ok(parts);
            }
        }
        unreachable!("deterministic splitting search exhausted")
    }

    /// Rewrites `self(t)` in the variable `u = 1/t` scaled by `u^n`: u^n self(1/u).
    pub fn reverse_scaled(&self, n: usize) -> Result<Poly> {
        if !self.is_zero() && self.deg() > n {
            return invalid("scaling exponent below degree");
        }
        let mut v = vec![self.ctx.zero(); n + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            v[n - j] = c;
        }
        Ok(Poly::new(&self.ctx, v))
    }

    /// Substitutes t -> t + c.
    pub fn translate(&self, c: FieldElement) -> Poly {
        let lin = Poly::new(&self.ctx, vec![c, self.ctx.one()]);
        let mut acc = Poly::zero(&self.ctx);
        for &a in self.coeffs.iter().rev() {
            acc = acc
                .mul_unchecked(&lin)
                .add_unchecked(&Poly::constant(&self.ctx, a));
        }
        acc
    }
}

/// Nonconstant polynomials of degree < n in a fixed order, used as random-free splitting probes.
fn splitting_candidates(f: &FieldContext, n: usize) -> impl Iterator<Item = Poly> + '_ {
    (1..n)
        .flat_map(move |d| monic_polys(f, d))
        .chain((1..n).flat_map(move |d| {
            f.elements()
                .skip(2)
                .flat_map(move |c| monic_polys(f, d).map(move |g| g.scale(c)))
        }))
}

/// All monic polynomials of degree `d`, in increasing order.
pub fn monic_polys(f: &FieldContext, d: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = f.q();
    let total = q.checked_pow(d as u32).expect("enumeration size");
    (0..total).map(move |mut m| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push(FieldElement(m % q));
            m /= q;
        }
        v.push(f.one());
        Poly::new(f, v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn spec_examples() {
        let f3 = make_field(3, 1).unwrap();
        let a = Poly::from_ints(&f3, &[1, 1]);
        let b = Poly::from_ints(&f3, &[2, 1]);
        assert_eq!(a.mul(&b).unwrap(), Poly::from_ints(&f3, &[2, 0, 1]));
        let f5 = make_field(5, 1).unwrap();
        let g = Poly::from_ints(&f5, &[-1, 0, 1])
            .gcd(&Poly::from_ints(&f5, &[-1, 1]))
            .unwrap();
        assert_eq!(g, Poly::from_ints(&f5, &[-1, 1]));
        assert!(Poly::from_ints(&f3, &[-2, 0, 0, 1])
            .eval(f3.from_int(2))
            .is_zero());
    }

    #[test]
    fn irreducibility_examples() {
        let f2 = make_field(2, 1).unwrap();
        assert!(Poly::from_ints(&f2, &[1, 1, 1]).is_irreducible().unwrap());
        assert!(!Poly::from_ints(&f2, &[1, 0, 1]).is_irreducible().unwrap());
        assert!(Poly::from_ints(&f2, &[1, 1, 0, 0, 1])
            .is_irreducible()
            .unwrap());
    }

    #[test]
    fn rabin_matches_exhaustive() {
        for (p, k, maxd) in [(2u64, 1u32, 6usize), (3, 1, 4), (2, 2, 3), (5, 1, 3)] {
            let f = make_field(p, k).unwrap();
            for d in 1..=maxd {
                for g in monic_polys(&f, d) {
                    assert_eq!(
                        g.is_irreducible().unwrap(),
                        g.is_irreducible_exhaustive().unwrap(),
                        "{g}"
                    );
                }
            }
        }
    }

    #[test]
    fn factor_reconstructs() {
        for (p, k) in [(2u64, 1u32), (3, 1), (5, 1), (2, 2), (3, 2)] {
            let f = make_field(p, k).unwrap();
            for g in monic_polys(&f, 4).step_by(3).take(200) {
                let h = g.mul(&g).unwrap().mul(&Poly::t(&f)).unwrap();
                let (lead, fac) = h.factor().unwrap();
                let mut prod = Poly::constant(&f, lead);
                for (pi, m) in &fac {
                    assert!(pi.is_irreducible().unwrap());
                    prod = prod.mul(&pi.pow(*m as u64)).unwrap();
                }
                assert_eq!(prod, h);
            }
        }
    }

    #[test]
    fn divmod_identity() {
        let f = make_field(3, 2).unwrap();
        let a = Poly::new(&f, f.elements().take(7).collect());
        let b = Poly::new(&f, f.elements().skip(3).take(3).collect());
        let (q, r) = a.divmod(&b).unwrap();
        assert!(r.deg() < b.deg());
        assert_eq!(q.mul(&b).unwrap().add(&r).unwrap(), a);
    }

    #[test]
    fn mixed_contexts_rejected() {
        let a = Poly::one(&make_field(3, 1).unwrap());
        let b = Poly::one(&make_field(5, 1).unwrap());
        assert_eq!(a.add(&b), Err(Error::MixedContexts));
        assert!(a.divmod(&Poly::zero(a.ctx())).is_err());
    }
}
