//! Group order of an elliptic curve over a tabulated finite field by
//! baby-step giant-step on the Hasse interval.

use std::collections::HashMap;

use crate::arith::{factorize, lcm};
use crate::field::{FieldContext, FieldElement, Tables, LOG_ZERO};

type Pt = Option<(u32, u32)>;

/// Curve with coefficients held as logarithms.
pub(crate) struct LogCurve<'a> {
    t: &'a Tables,
    a: [u32; 5],
    char2: bool,
    neg_one: u32,
    two: u32,
    three: u32,
    /// For char 2: log z with z^2 + z = w, indexed by log w (LOG_ZERO when none).
    as_root: &'a [u32],
}

impl<'a> LogCurve<'a> {
    pub(crate) fn new(
        f: &FieldContext,
        t: &'a Tables,
        a: &[FieldElement; 5],
        as_root: &'a [u32],
    ) -> Self {
        let lg = |x: FieldElement| t.log[x.index() as usize];
        let char2 = f.p() == 2;
        LogCurve {
            t,
            a: a.map(lg),
            char2,
            neg_one: lg(f.neg(f.one())),
            two: lg(f.from_int(2)),
            three: lg(f.from_int(3)),
            as_root,
        }
    }

    fn neg_l(&self, x: u32) -> u32 {
        self.t.lmul(x, self.neg_one)
    }
    fn sub_l(&self, x: u32, y: u32) -> u32 {
        self.t.ladd(x, self.neg_l(y))
    }
    fn inv_l(&self, x: u32) -> u32 {
        debug_assert!(x != LOG_ZERO);
        if x == 0 {
            0
        } else {
            self.t.order - x
        }
    }
    fn div_l(&self, x: u32, y: u32) -> u32 {
        self.t.lmul(x, self.inv_l(y))
    }

    fn neg(&self, p: Pt) -> Pt {
        let (x, y) = p?;
        let [a1, _, a3, _, _] = self.a;
        let s = self.t.ladd(self.t.ladd(y, self.t.lmul(a1, x)), a3);
        Some((x, self.neg_l(s)))
    }

    fn add(&self, p: Pt, q: Pt) -> Pt {
        let t = self.t;
        let [a1, a2, a3, a4, a6] = self.a;
        let Some((x1, y1)) = p else { return q };
        let Some((x2, y2)) = q else { return p };
        let (lam, nu);
        if x1 == x2 {
            // y1 + y2 + a1 x2 + a3
            let s = t.ladd(t.ladd(y1, y2), t.ladd(t.lmul(a1, x2), a3));
            if s == LOG_ZERO {
                return None;
            }
            let den = t.ladd(t.ladd(t.lmul(self.two, y1), t.lmul(a1, x1)), a3);
            let x1sq = t.lmul(x1, x1);
            let num_l = self.sub_l(
                t.ladd(
                    t.ladd(t.lmul(self.three, x1sq), t.lmul(self.two, t.lmul(a2, x1))),
                    a4,
                ),
                t.lmul(a1, y1),
            );
            let num_n = self.sub_l(
                t.ladd(
                    t.ladd(self.neg_l(t.lmul(x1sq, x1)), t.lmul(a4, x1)),
                    t.lmul(self.two, a6),
                ),
                t.lmul(a3, y1),
            );
            lam = self.div_l(num_l, den);
            nu = self.div_l(num_n, den);
        } else {
            let den = self.sub_l(x2, x1);
            lam = self.div_l(self.sub_l(y2, y1), den);
            nu = self.div_l(self.sub_l(t.lmul(y1, x2), t.lmul(y2, x1)), den);
        }
        let x3 = self.sub_l(
            self.sub_l(
                self.sub_l(t.ladd(t.lmul(lam, lam), t.lmul(a1, lam)), a2),
                x1,
            ),
            x2,
        );
        let y3 = self.neg_l(t.ladd(t.ladd(t.lmul(t.ladd(lam, a1), x3), nu), a3));
        Some((x3, y3))
    }

    fn mul(&self, mut n: u64, p: Pt) -> Pt {
        let mut acc: Pt = None;
        let mut base = p;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            n >>= 1;
        }
        acc
    }

    /// A point with the given x-coordinate, if any.
    fn lift_x(&self, x: u32) -> Pt {
        let t = self.t;
        let [a1, a2, a3, a4, a6] = self.a;
        let b = t.ladd(t.lmul(a1, x), a3);
        let c = t.ladd(t.lmul(t.ladd(t.lmul(t.ladd(x, a2), x), a4), x), a6);
        if self.char2 {
            if b == LOG_ZERO {
                // y = sqrt(c)
                let y = if c == LOG_ZERO {
                    LOG_ZERO
                } else {
                    ((c as u64 * ((t.order as u64 + 1) / 2)) % t.order as u64) as u32
                };
                return Some((x, y));
            }
            if c == LOG_ZERO {
                return Some((x, LOG_ZERO));
            }
            let w = self.div_l(c, t.lmul(b, b));
            let z = self.as_root[w as usize];
            if z == LOG_ZERO {
                return None;
            }
            return Some((x, t.lmul(b, z)));
        }
        // y = (-b + sqrt(b^2 + 4c)) / 2
        let four = t.lmul(self.two, self.two);
        let disc = t.ladd(t.lmul(b, b), t.lmul(four, c));
        let s = if disc == LOG_ZERO {
            LOG_ZERO
        } else if disc % 2 == 0 {
            disc / 2
        } else {
            return None;
        };
        Some((x, self.div_l(self.sub_l(s, b), self.two)))
    }

    /// Some n in [lo, hi] with nP = O.
    fn bsgs(&self, p: Pt, lo: u64, hi: u64) -> Option<u64> {
        let width = hi - lo + 1;
        let m = ((width as f64).sqrt().ceil() as u64).max(1);
        let mut baby: HashMap<(u32, u32), u64> = HashMap::with_capacity(m as usize + 1);
        let mut jp: Pt = None;
        for j in 0..=m {
            if let Some(c) = jp {
                baby.entry(c).or_insert(j);
            }
            jp = self.add(jp, p);
        }
        let step = self.mul(m, p);
        let mut g = self.mul(lo, p);
        let mut base = lo;
        while base <= hi + m {
            match g {
                None => {
                    if (lo..=hi).contains(&base) {
                        return Some(base);
                    }
                }
                Some(c) => {
                    if let Some(&j) = baby.get(&c) {
                        // g = jP
                        if base >= j && (lo..=hi).contains(&(base - j)) {
                            return Some(base - j);
                        }
                    }
                    if let Some(neg) = self.neg(g) {
                        if let Some(&j) = baby.get(&neg) {
                            if (lo..=hi).contains(&(base + j)) {
                                return Some(base + j);
                            }
                        }
                    }
                }
            }
            g = self.add(g, step);
            base += m;
        }
        None
    }

    fn order_of(&self, p: Pt, multiple: u64) -> u64 {
        let mut ord = multiple;
        for (r, _) in factorize(multiple) {
            while ord % r == 0 && self.mul(ord / r, p).is_none() {
                ord /= r;
            }
        }
        ord
    }

    /// #E(F_q) if the points tried pin it down uniquely in the Hasse interval.
    pub(crate) fn group_order(&self, q: u64) -> Option<u64> {
        let w = (2.0 * (q as f64).sqrt()).floor() as u64 + 1;
        let lo = (q + 1).saturating_sub(w).max(1);
        let hi = q + 1 + w;
        let order = self.t.order as u64;
        let mut l = 1u64;
        let mut tried = 0;
        let mut i = 1u64;
        while tried < 40 && i < order.max(64) * 4 {
            let x = ((i.wrapping_mul(0x9E37_79B9)) % order) as u32;
            i += 1;
            let Some(pt) = self.lift_x(x) else { continue };
            tried += 1;
            let n = self.bsgs(Some(pt), lo, hi)?;
            l = lcm(l, self.order_of(Some(pt), n));
            let first = lo.div_ceil(l) * l;
            if first <= hi && first + l > hi {
                return Some(first);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn roots_table(f: &FieldContext, t: &Tables) -> Vec<u32> {
        let mut out = vec![LOG_ZERO; t.order as usize];
        for z in f.elements() {
            let w = f.add(f.square(z), z);
            if !w.is_zero() {
                out[t.log[w.index() as usize] as usize] = t.log[z.index() as usize];
            }
        }
        out
    }

    #[test]
    fn group_law_is_associative() {
        let f = make_field(7, 2).unwrap();
        let t = f.tables().unwrap();
        let a = [2, 3, 1, 5, 6].map(|c| f.from_int(c));
        let roots = roots_table(&f, t);
        let c = LogCurve::new(&f, t, &a, &roots);
        let pts: Vec<Pt> = (0..t.order)
            .filter_map(|x| c.lift_x(x))
            .map(Some)
            .take(6)
            .collect();
        for &p in &pts {
            for &q in &pts {
                assert_eq!(c.add(p, q), c.add(q, p));
                for &r in &pts {
                    assert_eq!(c.add(c.add(p, q), r), c.add(p, c.add(q, r)));
                }
            }
            assert_eq!(c.add(p, c.neg(p)), None);
        }
    }
}
