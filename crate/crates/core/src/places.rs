//! Places of F_q(t) and their residue fields.

use std::collections::HashMap;
use std::fmt;

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::field::{FieldContext, FieldElement, LOG_ZERO};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceKind {
    Infinite,
    Finite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub kind: PlaceKind,
    /// Monic irreducible generator (finite places only).
    pub generator: Option<Poly>,
    pub degree: usize,
}

impl Place {
    pub fn infinity() -> Self {
        Place {
            kind: PlaceKind::Infinite,
            generator: None,
            degree: 1,
        }
    }

    pub fn finite(generator: Poly) -> Result<Self> {
        if !generator.is_monic() || !generator.is_irreducible()? {
            return invalid(format!("{generator} is not monic irreducible"));
        }
        Ok(Self::finite_unchecked(generator))
    }

    pub(crate) fn finite_unchecked(generator: Poly) -> Self {
        Place {
            kind: PlaceKind::Finite,
            degree: generator.deg(),
            generator: Some(generator),
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == PlaceKind::Infinite
    }

    /// Size q_v of the residue field.
    pub fn residue_size(&self, q: u64) -> Option<u64> {
        q.checked_pow(self.degree as u32)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.generator {
            None => write!(f, "inf"),
            Some(g) => write!(f, "{g}"),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree, then infinity first, then generator.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree
            .cmp(&other.degree)
            .then(self.kind.cmp(&other.kind))
            .then_with(|| self.generator.cmp(&other.generator))
    }
}

/// F_{q^d} together with an embedding of F_q.
pub struct ResidueField {
    pub base: FieldContext,
    pub ext: FieldContext,
    pub degree: usize,
    embed: Vec<FieldElement>,
    back: HashMap<u64, FieldElement>,
}

impl ResidueField {
    pub fn new(base: &FieldContext, degree: usize) -> Result<Self> {
        if degree < 1 {
            return invalid("place degree must be at least 1");
        }
        let kd = base
            .k()
            .checked_mul(degree as u32)
            .ok_or(Error::Overflow("residue degree"))?;
        let ext = FieldContext::new(base.p(), kd)?;
        let root = if base.k() == 1 {
            ext.zero()
        } else {
            let m = base.modulus();
            ext.elements()
                .find(|&x| {
                    m.iter()
                        .rev()
                        .fold(ext.zero(), |acc, &c| {
                            ext.add(ext.mul(acc, x), ext.from_int(c as i64))
                        })
                        .is_zero()
                })
                .expect("modulus splits in the extension")
        };
        let embed: Vec<FieldElement> = if base.k() == 1 {
            base.elements().map(|c| FieldElement(c.index())).collect()
        } else {
            base.elements()
                .map(|a| {
                    base.coords(a).iter().rev().fold(ext.zero(), |acc, &c| {
                        ext.add(ext.mul(acc, root), ext.from_int(c as i64))
                    })
                })
                .collect()
        };
        let back = embed
            .iter()
            .enumerate()
            .map(|(i, e)| (e.index(), FieldElement(i as u64)))
            .collect();
        Ok(ResidueField {
            base: base.clone(),
            ext,
            degree,
            embed,
            back,
        })
    }

    pub fn embed(&self, a: FieldElement) -> FieldElement {
        self.embed[a.index() as usize]
    }

    /// Maps an element of the image of F_q back to F_q.
    pub fn restrict(&self, a: FieldElement) -> Option<FieldElement> {
        self.back.get(&a.index()).copied()
    }

    /// Evaluates a polynomial over F_q at an element of F_{q^d}.
    pub fn eval(&self, f: &Poly, x: FieldElement) -> FieldElement {
        let e = &self.ext;
        f.coeffs()
            .iter()
            .rev()
            .fold(e.zero(), |acc, &c| e.add(e.mul(acc, x), self.embed(c)))
    }

    /// The q-power Frobenius acting on logs.
    fn frob_log(&self, l: u32, order: u64) -> u32 {
        ((l as u64 * (self.base.q() % order)) % order) as u32
    }

    /// Some root of the monic irreducible `g` (degree d) in F_{q^d}, smallest by index.
    pub fn root_of(&self, g: &Poly) -> Result<FieldElement> {
        self.ext
            .elements()
            .find(|&x| self.eval(g, x).is_zero())
            .ok_or_else(|| Error::InvalidArgument(format!("{g} has no root in residue field")))
    }
}

/// A finite place of degree d given by a Frobenius orbit in F_{q^d}.
pub struct OrbitPlace {
    pub place: Place,
    /// A root of the generator, as a log in the residue field (`LOG_ZERO` for t).
    pub root_log: u32,
}

/// Finite places of exact degree `d`, each with a root in `rf`, sorted by generator.
pub fn orbit_places(rf: &ResidueField) -> Result<Vec<OrbitPlace>> {
    let d = rf.degree;
    let ext = &rf.ext;
    let t = ext.tables().ok_or(Error::WorkBound {
        bound: "residue field table size",
        limit: 1 << 21,
        required: ext.q(),
    })?;
    let order = t.order as u64;
    let mut out = Vec::new();
    if d == 1 {
        out.push(OrbitPlace {
            place: Place::finite_unchecked(Poly::t(&rf.base)),
            root_log: LOG_ZERO,
        });
    }
    let mut seen = vec![false; order as usize];
    let mut orbit = Vec::with_capacity(d);
    for l in 0..order as u32 {
        if seen[l as usize] {
            continue;
        }
        orbit.clear();
        let mut x = l;
        loop {
            seen[x as usize] = true;
            orbit.push(x);
            x = rf.frob_log(x, order);
            if x == l {
                break;
            }
        }
        if orbit.len() != d {
            continue;
        }
        let mut g = vec![ext.one()];
        for &r in &orbit {
            let neg = ext.neg(ext.from_log(r));
            let mut next = vec![ext.zero(); g.len() + 1];
            for (i, &c) in g.iter().enumerate() {
                next[i + 1] = ext.add(next[i + 1], c);
                next[i] = ext.add(next[i], ext.mul(c, neg));
            }
            g = next;
        }
        let coeffs = g
            .iter()
            .map(|&c| {
                rf.restrict(c)
                    .expect("orbit polynomial has base coefficients")
            })
            .collect();
        out.push(OrbitPlace {
            place: Place::finite_unchecked(Poly::new(&rf.base, coeffs)),
            root_log: l,
        });
    }
    out.sort_by(|a, b| a.place.cmp(&b.place));
    Ok(out)
}

/// All places of degree `d`: infinity first (d = 1), then finite places by generator.
pub fn places_of_degree(ctx: &FieldContext, d: usize) -> Result<Vec<Place>> {
    let rf = ResidueField::new(ctx, d)?;
    let mut out = Vec::new();
    if d == 1 {
        out.push(Place::infinity());
    }
    out.extend(orbit_places(&rf)?.into_iter().map(|o| o.place));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaceCount {
    pub degree: usize,
    pub count: u64,
    /// |count - q^d / d|
    pub residual: f64,
    /// q^{d/2} / (1 - 1/q), the genus-zero bound.
    pub bound: f64,
}

impl PlaceCount {
    pub fn within_bound(&self) -> bool {
        self.residual <= self.bound
    }
}

/// Counts degree-`d` places by enumerating Frobenius orbits of F_{q^d}.
pub fn count_places(ctx: &FieldContext, d: usize) -> Result<PlaceCount> {
    if d < 1 {
        return invalid("place degree must be at least 1");
    }
    let q = ctx.q();
    let big = q.checked_pow(d as u32).ok_or(Error::Overflow("q^d"))?;
    if big > 1 << 24 {
        return Err(Error::WorkBound {
            bound: "place enumeration size",
            limit: 1 << 24,
            required: big,
        });
    }
    // orbit sizes of x -> x^q on F_{q^d}^* via logs
    let order = big - 1;
    let mut seen = vec![false; order as usize];
    let mut count = 0u64;
    for l in 0..order {
        if seen[l as usize] {
            continue;
        }
        let mut x = l;
        let mut size = 0;
        loop {
            seen[x as usize] = true;
            size += 1;
            x = ((x as u128 * q as u128) % order as u128) as u64;
            if x == l {
                break;
            }
        }
        if size == d {
            count += 1;
        }
    }
    if d == 1 {
        count += 2; // t and infinity
    }
    let qd = big as f64;
    Ok(PlaceCount {
        degree: d,
        count,
        residual: (count as f64 - qd / d as f64).abs(),
        bound: qd.sqrt() / (1.0 - 1.0 / q as f64),
    })
}

/// (1/d) sum_{e|d} mu(e) q^{d/e}: the number of monic irreducibles of degree d.
pub fn gauss_count(q: u64, d: usize) -> u64 {
    let s: i128 = arith::divisors(d as u64)
        .into_iter()
        .map(|e| arith::mobius(e) as i128 * (q as i128).pow((d as u64 / e) as u32))
        .sum();
    (s / d as i128) as u64
}
