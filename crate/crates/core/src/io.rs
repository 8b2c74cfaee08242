//! JSON encodings for curves, L-polynomials, spectra and density reports.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::field::{make_field, FieldContext, FieldElement};
use crate::lpoly::{spectrum, LPolynomial, Spectrum};
use crate::poly::Poly;
use crate::qsqrt::QSqrt;
use crate::race::{DensityReport, DensityValue};

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

pub fn rational_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(parse_err)?;
    let d: BigInt = d.trim().parse().map_err(parse_err)?;
    if d == BigInt::from(0) {
        return Err(Error::Parse(format!("zero denominator in {s}")));
    }
    Ok(BigRational::new(n, d))
}

pub fn qsqrt_json(x: &QSqrt) -> Value {
    json!({ "a": rational_str(x.a()), "b": rational_str(x.b()) })
}

pub fn parse_qsqrt(q: u64, v: &Value) -> Result<QSqrt> {
    let get = |k: &str| -> Result<BigRational> {
        let s = v
            .get(k)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse(format!("missing string field {k}")))?;
        parse_rational(s)
    };
    Ok(QSqrt::new(q, get("a")?, get("b")?))
}

/// Decimal string with 15 significant digits.
pub fn format_sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (14 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn bigint_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => json!(v),
        None => json!(c.to_string()),
    }
}

fn parse_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("non-integer coefficient {n}"))),
        Value::String(s) => s.trim().parse().map_err(parse_err),
        _ => Err(Error::Parse(format!("bad integer {v}"))),
    }
}

// ------------------------------------------------------------------ curves

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CoeffRepr {
    Int(i64),
    Coords(Vec<u64>),
}

/// Curve file: Weierstrass coefficients a1, a2, a3, a4, a6 as polynomials in t,
/// lowest degree first. Coefficients are integers (reduced mod p) or coordinate
/// vectors over F_p when k > 1.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub p: u64,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub a1: Vec<CoeffRepr>,
    pub a2: Vec<CoeffRepr>,
    pub a3: Vec<CoeffRepr>,
    pub a4: Vec<CoeffRepr>,
    pub a6: Vec<CoeffRepr>,
    /// Degree of the L-polynomial, needed when p < 5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_degree: Option<usize>,
}

fn poly_from_repr(ctx: &FieldContext, cs: &[CoeffRepr]) -> Result<Poly> {
    let mut v = Vec::with_capacity(cs.len());
    for c in cs {
        v.push(match c {
            CoeffRepr::Int(n) => ctx.from_int(*n),
            CoeffRepr::Coords(xs) => ctx.from_coords(xs)?,
        });
    }
    Ok(Poly::new(ctx, v))
}

fn repr_from_poly(ctx: &FieldContext, f: &Poly) -> Vec<CoeffRepr> {
    f.coeffs()
        .iter()
        .map(|&c: &FieldElement| {
            if ctx.k() == 1 {
                CoeffRepr::Int(c.index() as i64)
            } else {
                CoeffRepr::Coords(ctx.coords(c))
            }
        })
        .collect()
}

impl CurveFile {
    pub fn from_curve(curve: &CurveModel, name: Option<String>, l_degree: Option<usize>) -> Self {
        let ctx = curve.ctx();
        let a = curve.coeffs();
        CurveFile {
            p: ctx.p(),
            k: ctx.k(),
            name,
            a1: repr_from_poly(ctx, &a[0]),
            a2: repr_from_poly(ctx, &a[1]),
            a3: repr_from_poly(ctx, &a[2]),
            a4: repr_from_poly(ctx, &a[3]),
            a6: repr_from_poly(ctx, &a[4]),
            l_degree,
        }
    }

    pub fn to_curve(&self) -> Result<CurveModel> {
        let ctx = make_field(self.p, self.k)?;
        let a = [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6];
        let mut polys = Vec::with_capacity(5);
        for cs in a {
            polys.push(poly_from_repr(&ctx, cs)?);
        }
        let polys: [Poly; 5] = polys.try_into().expect("five coefficients");
        CurveModel::new(&ctx, polys)
    }
}

pub fn read_curve_file(text: &str) -> Result<CurveFile> {
    serde_json::from_str(text).map_err(parse_err)
}

// ----------------------------------------------------------- L-polynomials

pub fn lpoly_json(l: &LPolynomial) -> Value {
    json!({
        "q": l.q(),
        "degree": l.degree(),
        "coeffs": l.coeffs().iter().map(bigint_json).collect::<Vec<_>>(),
    })
}

pub fn parse_lpoly(v: &Value) -> Result<LPolynomial> {
    let q = v
        .get("q")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing q".into()))?;
    let cs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing coeffs".into()))?;
    let coeffs = cs.iter().map(parse_bigint).collect::<Result<Vec<_>>>()?;
    LPolynomial::new(q, coeffs)
}

// ----------------------------------------------------------------- spectra

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AngleEntry {
    /// Angle in (0, pi), decimal string or number.
    pub theta: Value,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

/// Spectrum file. Only the upper-half angles are listed; conjugates are implied.
/// When `cyclotomic` or `lpoly` is present the spectrum is rebuilt exactly from it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub q: u64,
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<i8>,
    #[serde(default)]
    pub rank: u32,
    #[serde(default)]
    pub m_minus_q: u32,
    #[serde(default)]
    pub angles: Vec<AngleEntry>,
    #[serde(default)]
    pub forced_zeros: Option<Vec<i64>>,
    #[serde(default)]
    pub purity_residual: Option<f64>,
    #[serde(default)]
    pub cyclotomic: Option<Vec<(u64, u32)>>,
    #[serde(default)]
    pub lpoly: Option<Vec<Value>>,
}

impl SpectrumFile {
    pub fn from_spectrum(s: &Spectrum, l: Option<&LPolynomial>) -> Self {
        SpectrumFile {
            q: s.q,
            degree: Some(s.degree),
            epsilon: Some(s.epsilon),
            rank: s.rank,
            m_minus_q: s.m_minus_q,
            angles: s
                .upper_angles()
                .into_iter()
                .map(|(t, m)| AngleEntry {
                    theta: Value::String(format_sig15(t)),
                    multiplicity: m,
                })
                .collect(),
            forced_zeros: Some(s.forced_zeros.clone()),
            purity_residual: Some(s.purity_residual),
            cyclotomic: s.cyclotomic.clone(),
            lpoly: l.map(|l| l.coeffs().iter().map(bigint_json).collect()),
        }
    }

    pub fn to_spectrum(&self) -> Result<Spectrum> {
        let s = if let Some(c) = &self.cyclotomic {
            Spectrum::from_cyclotomic(self.q, c)?
        } else if let Some(cs) = &self.lpoly {
            let coeffs = cs.iter().map(parse_bigint).collect::<Result<Vec<_>>>()?;
            spectrum(&LPolynomial::new(self.q, coeffs)?)?
        } else {
            let mut angles = Vec::with_capacity(self.angles.len());
            for a in &self.angles {
                let t = match &a.theta {
                    Value::Number(n) => n.as_f64(),
                    Value::String(s) => s.trim().parse::<f64>().ok(),
                    _ => None,
                }
                .ok_or_else(|| Error::Parse(format!("bad angle {}", a.theta)))?;
                if !(t > 0.0 && t < PI) {
                    return Err(Error::Parse(format!("angle {t} outside (0, pi)")));
                }
                angles.push((t, a.multiplicity));
            }
            Spectrum::from_angles(self.q, self.rank, self.m_minus_q, &angles)?
        };
        if let Some(d) = self.degree {
            if d != s.degree {
                return Err(Error::Parse(format!(
                    "declared degree {d} but the data give {}",
                    s.degree
                )));
            }
        }
        if (s.rank, s.m_minus_q) != (self.rank, self.m_minus_q)
            && (self.cyclotomic.is_some() || self.lpoly.is_some())
            && (self.rank, self.m_minus_q) != (0, 0)
        {
            return Err(Error::Parse(
                "rank or m_minus_q inconsistent with the data".into(),
            ));
        }
        Ok(s)
    }
}

/// Reads a spectrum from a spectrum file or from any output carrying a "spectrum" member.
pub fn read_spectrum(text: &str) -> Result<Spectrum> {
    let v: Value = serde_json::from_str(text).map_err(parse_err)?;
    let v = match v.get("spectrum") {
        Some(inner) => inner.clone(),
        None => v,
    };
    let f: SpectrumFile = serde_json::from_value(v).map_err(parse_err)?;
    f.to_spectrum()
}

pub fn spectrum_json(s: &Spectrum, l: Option<&LPolynomial>) -> Value {
    serde_json::to_value(SpectrumFile::from_spectrum(s, l)).expect("serializable")
}

// ----------------------------------------------------------------- density

pub fn density_json(d: &DensityReport) -> Value {
    let value = match &d.value {
        DensityValue::Exact(r) => json!({ "exact": rational_str(r) }),
        DensityValue::Interval(lo, hi) => {
            json!({ "interval": [rational_str(lo), rational_str(hi)] })
        }
        DensityValue::Estimate { value, std_error } => {
            json!({ "estimate": value, "std_error": std_error })
        }
    };
    let (lo, hi) = d.bounds_f64();
    json!({
        "method": d.method.as_str(),
        "value": value,
        "bounds": [lo, hi],
        "period": d.period,
        "boundary_classes": d.boundary_classes,
        "class_signs": d.class_signs,
    })
}

/// Human-readable density: "1/2", "[1/3, 2/3]" or a decimal estimate.
pub fn density_str(d: &DensityReport) -> String {
    match &d.value {
        DensityValue::Exact(r) => rational_str(r),
        DensityValue::Interval(lo, hi) => format!("[{}, {}]", rational_str(lo), rational_str(hi)),
        DensityValue::Estimate { value, .. } => format_sig15(*value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{legendre_curve, ulmer_curve};

    #[test]
    fn rationals() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(rational_str(&r), "-3/2");
        assert_eq!(rational_str(&parse_rational("7").unwrap()), "7/1");
        assert!(parse_rational("1/0").is_err());
        let x = QSqrt::new(
            3,
            parse_rational("1/2").unwrap(),
            parse_rational("-2/3").unwrap(),
        );
        assert_eq!(parse_qsqrt(3, &qsqrt_json(&x)).unwrap(), x);
    }

    #[test]
    fn sig15() {
        assert_eq!(
            format_sig15(std::f64::consts::FRAC_PI_2),
            "1.57079632679490"
        );
        assert_eq!(format_sig15(0.001234), "0.00123400000000000");
        assert_eq!(format_sig15(2.0), "2.00000000000000");
    }

    #[test]
    fn curve_round_trip() {
        let f = make_field(3, 1).unwrap();
        let e = ulmer_curve(&f, 5).unwrap();
        let cf = CurveFile::from_curve(&e, Some("ulmer".into()), Some(4));
        let text = serde_json::to_string(&cf).unwrap();
        let back = read_curve_file(&text).unwrap();
        assert_eq!(back, cf);
        assert_eq!(back.to_curve().unwrap().coeffs(), e.coeffs());
        let f9 = make_field(3, 2).unwrap();
        let e9 = legendre_curve(&f9).unwrap();
        let cf9 = CurveFile::from_curve(&e9, None, None);
        let back = read_curve_file(&serde_json::to_string(&cf9).unwrap()).unwrap();
        assert_eq!(back.to_curve().unwrap().coeffs(), e9.coeffs());
        assert!(
            read_curve_file(r#"{"p":3,"k":1,"a1":[],"a2":[],"a3":[],"a4":[],"a6":[1],"x":1}"#)
                .is_err()
        );
    }

    #[test]
    fn spectrum_round_trip() {
        let l = LPolynomial::from_i64(3, &[1, 0, 0, 0, -81]).unwrap();
        let s = spectrum(&l).unwrap();
        let text = spectrum_json(&s, Some(&l)).to_string();
        assert_eq!(read_spectrum(&text).unwrap(), s);
        let s2 = Spectrum::from_angles(5, 1, 0, &[(0.5, 1), (2.0, 2)]).unwrap();
        let back = read_spectrum(&spectrum_json(&s2, None).to_string()).unwrap();
        assert_eq!(back.degree, s2.degree);
        for (a, b) in back.angles.iter().zip(&s2.angles) {
            assert!((a.0 - b.0).abs() < 1e-13 && a.1 == b.1);
        }
        let wrapped = json!({ "other": 1, "spectrum": spectrum_json(&s, None) }).to_string();
        assert_eq!(read_spectrum(&wrapped).unwrap(), s);
        assert!(read_spectrum(r#"{"q":5,"angles":[{"theta":"4.0"}]}"#).is_err());
    }

    #[test]
    fn lpoly_round_trip() {
        let l = LPolynomial::from_i64(3, &[1, 0, 0, 0, -81]).unwrap();
        let v = lpoly_json(&l);
        assert_eq!(v["coeffs"], json!([1, 0, 0, 0, -81]));
        assert_eq!(parse_lpoly(&v).unwrap(), l);
    }
}
