//! Place-by-place data of a curve and the exact power sums built from it.

use crate::curve::{reduce_degree, CurveModel, ReductionData, DEFAULT_MAX_RESIDUE_FIELD};
use crate::error::{Error, Result};
use crate::field::TABLE_LIMIT;

/// Lazily computed reduction tables, one per place degree.
pub struct EulerData {
    curve: CurveModel,
    max_residue_field: u64,
    by_degree: Vec<Option<Vec<ReductionData>>>,
}

/// alpha^k + beta^k for a good place with trace a and norm qv.
pub fn frobenius_power_sum(a: i64, qv: u64, k: u32) -> Result<i128> {
    let (a, qv) = (a as i128, qv as i128);
    let (mut s0, mut s1) = (2i128, a);
    if k == 0 {
        return Ok(2);
    }
    for _ in 1..k {
        let next = a
            .checked_mul(s1)
            .and_then(|x| qv.checked_mul(s0).and_then(|y| x.checked_sub(y)))
            .ok_or(Error::Overflow("Frobenius power sum"))?;
        s0 = s1;
        s1 = next;
    }
    Ok(s1)
}

/// Complete homogeneous sum h_m(alpha^k, beta^k) = sum_j alpha^{k(m-j)} beta^{kj}.
pub fn sym_power_trace(a: i64, qv: u64, k: u32, m: u32) -> Result<i128> {
    let sk = frobenius_power_sum(a, qv, k)?;
    let qk = (qv as i128)
        .checked_pow(k)
        .ok_or(Error::Overflow("q_v^k"))?;
    let (mut h0, mut h1) = (1i128, sk);
    if m == 0 {
        return Ok(1);
    }
    for _ in 1..m {
        let next = sk
            .checked_mul(h1)
            .and_then(|x| qk.checked_mul(h0).and_then(|y| x.checked_sub(y)))
            .ok_or(Error::Overflow("symmetric power trace"))?;
        h0 = h1;
        h1 = next;
    }
    Ok(h1)
}

impl EulerData {
    pub fn new(curve: &CurveModel, max_residue_field: u64) -> Self {
        EulerData {
            curve: curve.clone(),
            max_residue_field,
            by_degree: Vec::new(),
        }
    }

    pub fn with_default_bound(curve: &CurveModel) -> Self {
        Self::new(curve, DEFAULT_MAX_RESIDUE_FIELD)
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }
    pub fn q(&self) -> u64 {
        self.curve.ctx().q()
    }
    pub fn max_residue_field(&self) -> u64 {
        self.max_residue_field
    }

    /// Whether places of degree `d` fit under the work bound.
    pub fn affordable(&self, d: usize) -> bool {
        self.q()
            .checked_pow(d as u32)
            .is_some_and(|qv| qv <= self.max_residue_field && qv <= TABLE_LIMIT)
    }

    pub fn degree(&mut self, d: usize) -> Result<&[ReductionData]> {
        if self.by_degree.len() <= d {
            self.by_degree.resize(d + 1, None);
        }
        if self.by_degree[d].is_none() {
            let data = reduce_degree(&self.curve, d, self.max_residue_field)?;
            self.by_degree[d] = Some(data);
        }
        Ok(self.by_degree[d].as_deref().expect("just filled"))
    }

    /// S'_{m,N} = -sum_j gamma_{m,j}^N, exactly.
    pub fn sym_power_sum(&mut self, m: u32, n: usize) -> Result<i128> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        let q = self.q();
        let mut total = 0i128;
        for d in (1..=n).filter(|d| n % d == 0) {
            let k = (n / d) as u32;
            let qv = q.pow(d as u32);
            let mut inner = 0i128;
            for r in self.degree(d)? {
                let term = if r.kind.is_good() {
                    sym_power_trace(r.a_v, qv, k, m)?
                } else {
                    (r.a_v as i128).pow(m * k)
                };
                inner = inner
                    .checked_add(term)
                    .ok_or(Error::Overflow("power sum"))?;
            }
            total = inner
                .checked_mul(d as i128)
                .and_then(|x| x.checked_add(total))
                .ok_or(Error::Overflow("power sum"))?;
        }
        Ok(total)
    }

    /// p_N = sum_j gamma_j^N for L(E, T).
    pub fn power_sum(&mut self, n: usize) -> Result<i128> {
        Ok(-self.sym_power_sum(1, n)?)
    }

    /// sum over good places of degree d of a_v.
    pub fn good_trace_sum(&mut self, d: usize) -> Result<i64> {
        Ok(self
            .degree(d)?
            .iter()
            .filter(|r| r.kind.is_good())
            .map(|r| r.a_v)
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::ulmer_curve;
    use crate::field::make_field;

    #[test]
    fn recurrences() {
        // alpha, beta roots of x^2 - a x + q
        assert_eq!(frobenius_power_sum(1, 3, 1).unwrap(), 1);
        assert_eq!(frobenius_power_sum(1, 3, 2).unwrap(), 1 - 6);
        assert_eq!(sym_power_trace(1, 3, 1, 2).unwrap(), 1 - 3);
        assert_eq!(sym_power_trace(2, 5, 1, 1).unwrap(), 2);
        assert_eq!(sym_power_trace(2, 5, 3, 0).unwrap(), 1);
    }

    #[test]
    fn ulmer_e5_power_sums() {
        let f = make_field(3, 1).unwrap();
        let e = ulmer_curve(&f, 5).unwrap();
        let mut ed = EulerData::new(&e, 81);
        let ps: Vec<i128> = (1..=4).map(|n| ed.power_sum(n).unwrap()).collect();
        assert_eq!(ps, vec![0, 0, 0, 324]);
        assert!(ed.power_sum(5).is_err());
    }
}
