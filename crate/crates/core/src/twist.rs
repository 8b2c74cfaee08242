//! Surveys of quadratic twists E_f over the twisting space of monic squarefree f.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{conductor_degree, quadratic_twist, CurveModel};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::limit::{build_rv, delta_cf, delta_two_point, DEFAULT_CF_CAP};
use crate::lpoly::{compute_lpolynomial, li_diagnostic, spectrum, LOptions, LPolynomial, Spectrum};
use crate::poly::{monic_polys, Poly};
use crate::race::mean_variance;

const ENUMERATION_LIMIT: u64 = 1 << 20;

/// Monic squarefree f of degree `d` prime to the multiplicative locus.
/// Enumerates everything when at most `limit` exist, else draws `limit` of them with `seed`.
pub fn enumerate_twisting_space(
    base: &CurveModel,
    d: usize,
    limit: usize,
    seed: u64,
) -> Result<Vec<Poly>> {
    let ctx = base.ctx();
    if ctx.p() < 5 {
        return Err(Error::Unsupported(
            "twisting space requires characteristic at least 5".into(),
        ));
    }
    let m = base.multiplicative_locus()?;
    if m.is_constant() {
        return Err(Error::InvalidArgument(
            "base curve has no finite place of multiplicative reduction".into(),
        ));
    }
    let valid = |f: &Poly| -> Result<bool> { Ok(f.is_squarefree()? && f.gcd(&m)?.is_constant()) };
    let total = ctx.q().checked_pow(d as u32).unwrap_or(u64::MAX);
    if total <= ENUMERATION_LIMIT {
        let mut all = Vec::new();
        for f in monic_polys(ctx, d) {
            if valid(&f)? {
                all.push(f);
            }
        }
        if all.len() <= limit {
            return Ok(all);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, all.len(), limit).into_vec();
        idx.sort_unstable();
        return Ok(idx.into_iter().map(|i| all[i].clone()).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Poly> = Vec::with_capacity(limit);
    let mut tries = 0u64;
    while out.len() < limit {
        tries += 1;
        if tries > 1000 * limit as u64 + 1000 {
            return Err(Error::Stabilization(
                "rejection sampling of twists stalled".into(),
            ));
        }
        let mut c: Vec<FieldElement> = (0..d)
            .map(|_| FieldElement(rng.gen_range(0..ctx.q())))
            .collect();
        c.push(ctx.one());
        let f = Poly::new(ctx, c);
        if valid(&f)? && !out.contains(&f) {
            out.push(f);
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurveyOptions {
    pub max_q: u64,
    pub max_d: usize,
    pub max_residue_field: u64,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        SurveyOptions {
            max_q: 9,
            max_d: 4,
            max_residue_field: 1 << 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwistSample {
    pub f: Poly,
    pub l_degree: usize,
    pub lpoly: LPolynomial,
    pub epsilon: i8,
    pub spectrum: Spectrum,
    pub li_satisfied: bool,
    pub li_reasons: Vec<String>,
    pub delta: f64,
    pub delta_method: &'static str,
    pub mean: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurveySummary {
    pub d: usize,
    pub requested: usize,
    pub computed: usize,
    pub failed: usize,
    pub l_degrees: Vec<usize>,
    pub l_degree_constant: bool,
    pub rank_le_one_fraction: f64,
    /// Counts of delta in [i/10, (i+1)/10).
    pub delta_histogram: Vec<u32>,
    pub max_deviation: f64,
    /// max |delta - 1/2| times sqrt(d)
    pub fitted_c: f64,
    /// Samples whose delta - 1/2 has the sign of the limiting mean.
    pub mean_sign_agreement: usize,
}

#[derive(Clone, Debug)]
pub struct Survey {
    pub samples: Vec<TwistSample>,
    pub failures: Vec<(Poly, Error)>,
    pub summary: SurveySummary,
}

const LI_MAX_DEN: u64 = 24;
const LI_TOL: f64 = 1e-9;

pub fn analyze_twist(base: &CurveModel, f: &Poly, max_residue_field: u64) -> Result<TwistSample> {
    let tw = quadratic_twist(base, f)?;
    let cond = conductor_degree(&tw)?;
    if cond.l_degree < 0 {
        return Err(Error::InvalidArgument("negative L-degree".into()));
    }
    let opts = LOptions {
        degree_hint: Some(cond.l_degree as usize),
        max_residue_field,
        ..LOptions::default()
    };
    let lc = compute_lpolynomial(&tw, &opts)?;
    let s = spectrum(&lc.lpoly)?;
    let li = li_diagnostic(&s, LI_MAX_DEN, LI_TOL);
    let rv = build_rv(&s);
    let (delta, delta_method) = if rv.k() == 0 {
        (delta_two_point(&rv), "exact-two-point")
    } else {
        (delta_cf(&rv, DEFAULT_CF_CAP)?.delta, "limit-law-cf")
    };
    Ok(TwistSample {
        f: f.clone(),
        l_degree: cond.l_degree as usize,
        lpoly: lc.lpoly,
        epsilon: lc.epsilon,
        mean: mean_variance(&s).mean,
        spectrum: s,
        li_satisfied: li.satisfied,
        li_reasons: li.reasons,
        delta,
        delta_method,
    })
}

pub fn survey(
    base: &CurveModel,
    d: usize,
    sample_size: usize,
    seed: u64,
    opts: &SurveyOptions,
) -> Result<Survey> {
    let q = base.ctx().q();
    if q > opts.max_q {
        return Err(Error::WorkBound {
            bound: "max_q",
            limit: opts.max_q,
            required: q,
        });
    }
    if d > opts.max_d {
        return Err(Error::WorkBound {
            bound: "max_d",
            limit: opts.max_d as u64,
            required: d as u64,
        });
    }
    let fs = enumerate_twisting_space(base, d, sample_size, seed)?;
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for f in &fs {
        match analyze_twist(base, f, opts.max_residue_field) {
            Ok(s) => samples.push(s),
            Err(e) => failures.push((f.clone(), e)),
        }
    }
    let mut l_degrees: Vec<usize> = samples.iter().map(|s| s.l_degree).collect();
    l_degrees.sort_unstable();
    l_degrees.dedup();
    let n = samples.len();
    let mut hist = vec![0u32; 10];
    for s in &samples {
        hist[((s.delta * 10.0) as usize).min(9)] += 1;
    }
    let max_deviation = samples
        .iter()
        .map(|s| (s.delta - 0.5).abs())
        .fold(0.0, f64::max);
    let summary = SurveySummary {
        d,
        requested: sample_size,
        computed: n,
        failed: failures.len(),
        l_degree_constant: l_degrees.len() <= 1,
        l_degrees,
        rank_le_one_fraction: if n == 0 {
            0.0
        } else {
            samples.iter().filter(|s| s.spectrum.rank <= 1).count() as f64 / n as f64
        },
        delta_histogram: hist,
        max_deviation,
        fitted_c: max_deviation * (d as f64).sqrt(),
        mean_sign_agreement: samples
            .iter()
            .filter(|s| (s.delta - 0.5) * s.mean > 0.0)
            .count(),
    };
    Ok(Survey {
        samples,
        failures,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{legendre_curve, ulmer_curve};
    use crate::field::make_field;

    #[test]
    fn legendre_quadratics() {
        let f = make_field(5, 1).unwrap();
        let e = legendre_curve(&f).unwrap();
        let m = Poly::from_ints(&f, &[0, -1, 1]);
        assert_eq!(e.multiplicative_locus().unwrap().monic(), m);
        let got = enumerate_twisting_space(&e, 2, 1000, 0).unwrap();
        let brute: Vec<Poly> = monic_polys(&f, 2)
            .filter(|g| g.is_squarefree().unwrap() && g.gcd(&m).unwrap().is_constant())
            .collect();
        assert_eq!(got, brute);
        assert!(!got.contains(&m));
        // 20 squarefree, minus 4 + 4 - 1 with a root at 0 or 1
        assert_eq!(got.len(), 13);
        let lin = enumerate_twisting_space(&e, 1, 1000, 0).unwrap();
        assert_eq!(lin.len(), 3);
        let few = enumerate_twisting_space(&e, 2, 5, 9).unwrap();
        assert_eq!(few.len(), 5);
        assert!(few.iter().all(|g| got.contains(g)));
        assert_eq!(few, enumerate_twisting_space(&e, 2, 5, 9).unwrap());
    }

    #[test]
    fn unsupported_bases() {
        let f3 = make_field(3, 1).unwrap();
        assert!(enumerate_twisting_space(&ulmer_curve(&f3, 5).unwrap(), 2, 10, 0).is_err());
    }

    #[test]
    fn legendre_cubic_survey() {
        let f = make_field(5, 1).unwrap();
        let e = legendre_curve(&f).unwrap();
        let sv = survey(&e, 3, 12, 4, &SurveyOptions::default()).unwrap();
        assert_eq!(sv.summary.computed, 12, "{:?}", sv.failures);
        assert_eq!(sv.summary.l_degrees, vec![5]);
        for s in &sv.samples {
            assert!(s.epsilon == 1 || s.epsilon == -1);
            assert!(s.spectrum.purity_residual < 1e-6 * 5.0);
            assert!((0.0..=1.0).contains(&s.delta));
        }
        assert_eq!(sv.summary.delta_histogram.iter().sum::<u32>(), 12);
    }

    #[test]
    fn survey_bounds() {
        let f = make_field(5, 1).unwrap();
        let e = legendre_curve(&f).unwrap();
        assert!(matches!(
            survey(&e, 5, 3, 0, &SurveyOptions::default()),
            Err(Error::WorkBound { bound: "max_d", .. })
        ));
    }
}
