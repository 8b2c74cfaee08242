//! The `ffrace` command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::prime_power;
use crate::config::{OutputFormat, RunConfig, DEFAULT_LI_TOLERANCE, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::curve::{conductor_degree, reduce_degree, CurveModel};
use crate::error::{Error, Result};
use crate::euler::EulerData;
use crate::field::make_field;
use crate::io::{
    density_json, density_str, format_sig15, lpoly_json, qsqrt_json, rational_str, read_curve_file,
    read_spectrum, spectrum_json,
};
use crate::limit::{
    berry_esseen_diagnostic, build_rv, delta_cf, delta_mc, gaussian_distance, set_max_threads,
    DEFAULT_CF_CAP, MIN_GAUSSIAN_SAMPLES,
};
use crate::lpoly::{compute_lpolynomial, li_diagnostic, spectrum, LOptions, LPolynomial, Spectrum};
use crate::places::{count_places, gauss_count, places_of_degree};
use crate::race::{
    density_exact_periodic, density_time_average, mean_variance, t_direct_series, t_explicit_exact,
    t_explicit_f64, DensityMethod, DensityReport, DensityValue,
};
use crate::sympower::{explicit_formula_residual, m_m_estimate, sym_power_sums};
use crate::twist::{survey, SurveyOptions};
use crate::ulmer;

#[derive(Parser, Debug)]
#[command(
    name = "ffrace",
    version,
    about = "Prime races for elliptic curves over F_q(t)"
)]
pub struct Cli {
    /// JSON settings file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Upper bound on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Shorthand for --format json.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Shorthand for --format csv.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Largest residue field q^d the engine may enumerate.
    #[arg(long, global = true)]
    pub max_residue_field: Option<u64>,
    #[arg(long, global = true)]
    pub max_place_degree: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DensityChoice {
    Auto,
    Exact,
    TimeAverage,
    Mc,
    Cf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RaceMethod {
    Direct,
    Explicit,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List places of F_q(t) up to a degree.
    Places {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        max_degree: usize,
        /// Print per-degree counts instead of the places.
        #[arg(long)]
        counts: bool,
    },
    /// Reduction types and traces at all places up to a degree.
    Reduce {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        max_degree: usize,
    },
    /// The L-polynomial and its spectrum.
    Lpoly {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        extra_checks: Option<usize>,
    },
    /// Normalized race T(X): direct from place counts and from the zeros.
    Race {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        spectrum: Option<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, alias = "max-X")]
        x_max: usize,
        #[arg(long, value_enum, default_value = "both")]
        method: RaceMethod,
    },
    /// Logarithmic density of X with T(X) > 0.
    Density {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, alias = "spec")]
        spectrum: Option<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_enum, default_value = "auto")]
        method: DensityChoice,
        #[arg(long, alias = "max-X", default_value_t = 2000)]
        x_max: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Symmetric-power power sums S'_{m,N}.
    Sympower {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        m: u32,
        #[arg(long, alias = "max-N")]
        n: usize,
    },
    /// Exact analysis of y^2 + xy = x^3 - t^d over F_{p^k}(t).
    Ulmer {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u64,
        /// Exit with status 1 when a theorem conclusion is contradicted.
        #[arg(long)]
        check_theorems: bool,
    },
    /// Tabulate the Ulmer family.
    UlmerScan {
        #[arg(long)]
        p_max: u64,
        #[arg(long)]
        d_max: u64,
        #[arg(long, default_value_t = 1)]
        k_max: u32,
    },
    /// Limiting distribution: Monte Carlo and inversion densities, Gaussian distance.
    Limitlaw {
        #[arg(long)]
        spectrum: Option<PathBuf>,
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Survey of quadratic twists.
    Twists {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        sample: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Places { .. } => "places",
            Command::Reduce { .. } => "reduce",
            Command::Lpoly { .. } => "lpoly",
            Command::Race { .. } => "race",
            Command::Density { .. } => "density",
            Command::Sympower { .. } => "sympower",
            Command::Ulmer { .. } => "ulmer",
            Command::UlmerScan { .. } => "ulmer-scan",
            Command::Limitlaw { .. } => "limitlaw",
            Command::Twists { .. } => "twists",
        }
    }

    fn default_format(&self) -> OutputFormat {
        match self {
            Command::Places { .. }
            | Command::Reduce { .. }
            | Command::Race { .. }
            | Command::UlmerScan { .. }
            | Command::Twists { .. } => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

/// A result both as a JSON document and as a CSV table.
pub struct Output {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
            }
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "invalid-argument",
        Error::DivisionByZero => "division-by-zero",
        Error::MixedContexts => "mixed-contexts",
        Error::WorkBound { .. } => "work-bound",
        Error::SingularCurve => "singular-curve",
        Error::ConstantJ => "constant-j",
        Error::NonMinimal(_) => "non-minimal",
        Error::WildRamification => "wild-ramification",
        Error::NotSquarefree => "not-squarefree",
        Error::GcdCondition => "gcd-condition",
        Error::Stabilization(_) => "stabilization",
        Error::NotSelfDual => "not-self-dual",
        Error::Purity(_) => "purity",
        Error::Overflow(_) => "overflow",
        Error::Quadrature => "quadrature",
        Error::Unsupported(_) => "unsupported",
        Error::TheoremCheck(_) => "theorem-check",
        Error::Parse(_) => "parse",
    }
}

pub fn error_record(e: &Error) -> Value {
    let mut rec = json!({ "kind": error_kind(e), "message": e.to_string() });
    if let Error::WorkBound {
        bound,
        limit,
        required,
    } = e
    {
        rec["bound"] = json!(bound);
        rec["limit"] = json!(limit);
        rec["required"] = json!(required);
    }
    json!({ "error": rec })
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::WorkBound { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok((output, format)) => {
            if out.write_all(output.render(format).as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_record(&e));
            exit_code(&e)
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

struct Ctx {
    cfg: RunConfig,
}

impl Ctx {
    fn curve_path(&self, arg: &Option<PathBuf>) -> Option<PathBuf> {
        arg.clone().or_else(|| self.cfg.curve.clone())
    }
    fn spectrum_path(&self, arg: &Option<PathBuf>) -> Option<PathBuf> {
        arg.clone().or_else(|| self.cfg.spectrum.clone())
    }

    /// The curve and the L-degree to use (explicit, from the file, or none).
    fn load_curve(
        &self,
        arg: &Option<PathBuf>,
        degree: Option<usize>,
    ) -> Result<(CurveModel, Option<usize>)> {
        let path = self
            .curve_path(arg)
            .ok_or_else(|| Error::InvalidArgument("a curve file is required".into()))?;
        let cf = read_curve_file(&read_text(&path)?)?;
        Ok((cf.to_curve()?, degree.or(cf.l_degree)))
    }

    fn lpoly(
        &self,
        curve: &CurveModel,
        degree: Option<usize>,
        extra: Option<usize>,
    ) -> Result<(LPolynomial, i8, usize)> {
        let mut opts = LOptions {
            degree_hint: degree,
            max_residue_field: self.cfg.max_residue_field(),
            ..LOptions::default()
        };
        if let Some(e) = extra {
            opts.extra_checks = e;
        }
        let lc = compute_lpolynomial(curve, &opts)?;
        Ok((lc.lpoly, lc.epsilon, lc.verified_through))
    }

    /// Spectrum from a spectrum file, or from a curve through its L-polynomial.
    fn load_spectrum(
        &self,
        spec: &Option<PathBuf>,
        curve: &Option<PathBuf>,
        degree: Option<usize>,
    ) -> Result<(Spectrum, Option<LPolynomial>)> {
        if let Some(p) = self.spectrum_path(spec) {
            return Ok((read_spectrum(&read_text(&p)?)?, None));
        }
        if self.curve_path(curve).is_some() {
            let (c, d) = self.load_curve(curve, degree)?;
            let (l, _, _) = self.lpoly(&c, d, None)?;
            return Ok((spectrum(&l)?, Some(l)));
        }
        Err(Error::InvalidArgument(
            "a spectrum or curve file is required".into(),
        ))
    }

    fn seed(&self, arg: Option<u64>) -> u64 {
        arg.or(self.cfg.seed).unwrap_or(DEFAULT_SEED)
    }
    fn samples(&self, arg: Option<usize>) -> usize {
        arg.or(self.cfg.samples).unwrap_or(DEFAULT_SAMPLES)
    }
    fn cf_cap(&self) -> f64 {
        self.cfg.cf_cap.unwrap_or(DEFAULT_CF_CAP)
    }

    fn check_place_degree(&self, d: usize) -> Result<()> {
        let lim = self.cfg.max_place_degree();
        if d > lim {
            return Err(Error::WorkBound {
                bound: "max_place_degree",
                limit: lim as u64,
                required: d as u64,
            });
        }
        Ok(())
    }

    fn check_residue(&self, q: u64, d: usize) -> Result<()> {
        let lim = self.cfg.max_residue_field();
        let need = q.saturating_pow(d as u32);
        if need > lim {
            return Err(Error::WorkBound {
                bound: "max_residue_field",
                limit: lim,
                required: need,
            });
        }
        Ok(())
    }
}

fn execute(cli: &Cli) -> Result<(Output, OutputFormat)> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_json(&read_text(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(sc) = &cfg.subcommand {
        if sc != cli.command.name() {
            return Err(Error::InvalidArgument(format!(
                "config is for subcommand {sc}, not {}",
                cli.command.name()
            )));
        }
    }
    if cli.max_residue_field.is_some() {
        cfg.max_residue_field = cli.max_residue_field;
    }
    if cli.max_place_degree.is_some() {
        cfg.max_place_degree = cli.max_place_degree;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.validate()?;
    set_max_threads(cfg.threads.unwrap_or(1));
    let format = if cli.json {
        OutputFormat::Json
    } else if cli.csv {
        OutputFormat::Csv
    } else {
        cli.format
            .or(cfg.format)
            .unwrap_or(cli.command.default_format())
    };
    let ctx = Ctx { cfg };
    let out = match &cli.command {
        Command::Places {
            q,
            p,
            k,
            max_degree,
            counts,
        } => cmd_places(&ctx, *q, *p, *k, *max_degree, *counts)?,
        Command::Reduce { curve, max_degree } => cmd_reduce(&ctx, curve, *max_degree)?,
        Command::Lpoly {
            curve,
            degree,
            extra_checks,
        } => cmd_lpoly(&ctx, curve, *degree, *extra_checks)?,
        Command::Race {
            curve,
            spectrum,
            degree,
            x_max,
            method,
        } => cmd_race(&ctx, curve, spectrum, *degree, *x_max, *method)?,
        Command::Density {
            curve,
            spectrum,
            degree,
            method,
            x_max,
            samples,
            seed,
        } => cmd_density(
            &ctx, curve, spectrum, *degree, *method, *x_max, *samples, *seed,
        )?,
        Command::Sympower { curve, m, n } => cmd_sympower(&ctx, curve, *m, *n)?,
        Command::Ulmer {
            p,
            k,
            d,
            check_theorems,
        } => cmd_ulmer(*p, *k, *d, *check_theorems)?,
        Command::UlmerScan {
            p_max,
            d_max,
            k_max,
        } => cmd_ulmer_scan(*p_max, *d_max, *k_max)?,
        Command::Limitlaw {
            spectrum,
            curve,
            degree,
            samples,
            seed,
        } => cmd_limitlaw(&ctx, spectrum, curve, *degree, *samples, *seed)?,
        Command::Twists {
            curve,
            d,
            sample,
            seed,
        } => cmd_twists(&ctx, curve, *d, *sample, *seed)?,
    };
    Ok((out, format))
}

fn cmd_places(
    ctx: &Ctx,
    q: Option<u64>,
    p: Option<u64>,
    k: Option<u32>,
    max_degree: usize,
    counts: bool,
) -> Result<Output> {
    let (p, k) = match (q, p) {
        (Some(q), None) => prime_power(q)
            .ok_or_else(|| Error::InvalidArgument(format!("{q} is not a prime power")))?,
        (None, Some(p)) => (p, k.unwrap_or(1)),
        _ => {
            return Err(Error::InvalidArgument(
                "give either --q or --p (with optional --k)".into(),
            ))
        }
    };
    let f = make_field(p, k)?;
    ctx.check_place_degree(max_degree)?;
    ctx.check_residue(f.q(), max_degree)?;
    let mut rows = Vec::new();
    let mut list = Vec::new();
    let mut tallies = Vec::new();
    for d in 1..=max_degree {
        let c = count_places(&f, d)?;
        tallies.push(json!({
            "degree": d,
            "count": c.count,
            "expected": gauss_count(f.q(), d),
            "residual": c.residual,
            "bound": c.bound,
        }));
        if counts {
            rows.push(vec![
                d.to_string(),
                c.count.to_string(),
                gauss_count(f.q(), d).to_string(),
            ]);
        } else {
            for pl in places_of_degree(&f, d)? {
                let qv = pl.residue_size(f.q()).unwrap_or(u64::MAX);
                list.push(json!({ "degree": d, "place": pl.to_string(), "residue_size": qv }));
                rows.push(vec![d.to_string(), pl.to_string(), qv.to_string()]);
            }
        }
    }
    let header = if counts {
        vec!["degree", "count", "expected"]
    } else {
        vec!["degree", "place", "residue_size"]
    };
    let mut json = json!({ "p": p, "k": k, "q": f.q(), "counts": tallies });
    if !counts {
        json["places"] = Value::Array(list);
    }
    Ok(Output { json, header, rows })
}

fn cmd_reduce(ctx: &Ctx, curve: &Option<PathBuf>, max_degree: usize) -> Result<Output> {
    let (c, _) = ctx.load_curve(curve, None)?;
    ctx.check_place_degree(max_degree)?;
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for d in 1..=max_degree {
        for r in reduce_degree(&c, d, ctx.cfg.max_residue_field())? {
            let theta = r.theta.map(format_sig15).unwrap_or_default();
            list.push(json!({
                "place": r.place.to_string(),
                "degree": r.place.degree,
                "type": r.kind.as_str(),
                "a_v": r.a_v,
                "theta": r.theta.map(format_sig15),
                "conductor_exponent": r.kind.conductor_exponent(),
            }));
            rows.push(vec![
                r.place.to_string(),
                r.place.degree.to_string(),
                r.kind.as_str().to_string(),
                r.a_v.to_string(),
                theta,
                r.kind.conductor_exponent().to_string(),
            ]);
        }
    }
    let mut json = json!({ "q": c.ctx().q(), "places": list });
    if c.ctx().p() >= 5 {
        if let Ok(cond) = conductor_degree(&c) {
            json["conductor_degree"] = json!(cond.degree);
            json["l_degree"] = json!(cond.l_degree);
        }
    }
    Ok(Output {
        json,
        header: vec![
            "place",
            "degree",
            "type",
            "a_v",
            "theta",
            "conductor_exponent",
        ],
        rows,
    })
}

fn cmd_lpoly(
    ctx: &Ctx,
    curve: &Option<PathBuf>,
    degree: Option<usize>,
    extra: Option<usize>,
) -> Result<Output> {
    let (c, d) = ctx.load_curve(curve, degree)?;
    let (l, eps, verified) = ctx.lpoly(&c, d, extra)?;
    let s = spectrum(&l)?;
    let mut json = lpoly_json(&l);
    json["epsilon"] = json!(eps);
    json["verified_through"] = json!(verified);
    json["display"] = json!(l.to_string());
    json["rank"] = json!(s.rank);
    json["angles"] = json!(s
        .upper_angles()
        .iter()
        .map(|&(t, m)| json!([t, m]))
        .collect::<Vec<_>>());
    json["purity_residual"] = json!(s.purity_residual);
    json["spectrum"] = spectrum_json(&s, Some(&l));
    let rows = l
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| vec![i.to_string(), a.to_string()])
        .collect();
    Ok(Output {
        json,
        header: vec!["i", "coeff"],
        rows,
    })
}

fn cmd_race(
    ctx: &Ctx,
    curve: &Option<PathBuf>,
    spec: &Option<PathBuf>,
    degree: Option<usize>,
    x_max: usize,
    method: RaceMethod,
) -> Result<Output> {
    let want_direct = method != RaceMethod::Explicit;
    let want_explicit = method != RaceMethod::Direct;
    let (s, direct) = if ctx.spectrum_path(spec).is_some() {
        if method == RaceMethod::Direct {
            return Err(Error::InvalidArgument(
                "the direct method needs --curve".into(),
            ));
        }
        (Some(ctx.load_spectrum(spec, &None, None)?.0), None)
    } else {
        let (c, d) = ctx.load_curve(curve, degree)?;
        let s = if want_explicit {
            let (l, _, _) = ctx.lpoly(&c, d, None)?;
            Some(spectrum(&l)?)
        } else {
            None
        };
        let direct = if want_direct {
            let mut ed = EulerData::new(&c, ctx.cfg.max_residue_field());
            Some(t_direct_series(&mut ed, x_max)?)
        } else {
            None
        };
        (s, direct)
    };
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for x in 1..=x_max {
        let te = s.as_ref().map(|s| t_explicit_f64(s, x as u64));
        let td = direct.as_ref().map(|v| v[x - 1]);
        let exact = match &s {
            Some(s) if s.cyclotomic.is_some() => Some(t_explicit_exact(s, x as u64)?),
            _ => None,
        };
        let sign = match &exact {
            Some(e) => e.signum() as f64,
            None => td.or(te).map_or(0.0, f64::signum),
        };
        list.push(json!({
            "x": x,
            "t_direct": td,
            "t_explicit": te,
            "t_explicit_exact": exact.as_ref().map(qsqrt_json),
            "sign": sign as i8,
        }));
        rows.push(vec![
            x.to_string(),
            td.map(format_sig15).unwrap_or_default(),
            te.map(format_sig15).unwrap_or_default(),
            (sign as i8).to_string(),
        ]);
    }
    let mut json = json!({ "q": ctx_q(&s, curve, ctx)?, "rows": list });
    if let Some(s) = &s {
        let mv = mean_variance(s);
        json["mean"] = json!(mv.mean);
        json["variance_paper"] = json!(mv.variance_paper);
        json["variance_corrected"] = json!(mv.variance_corrected);
    }
    Ok(Output {
        json,
        header: vec!["x", "t_direct", "t_explicit", "sign"],
        rows,
    })
}

fn ctx_q(s: &Option<Spectrum>, curve: &Option<PathBuf>, ctx: &Ctx) -> Result<u64> {
    match s {
        Some(s) => Ok(s.q),
        None => Ok(ctx.load_curve(curve, None)?.0.ctx().q()),
    }
}

fn estimate_report(value: f64, std_error: Option<f64>, method: DensityMethod) -> DensityReport {
    DensityReport {
        value: DensityValue::Estimate { value, std_error },
        method,
        boundary_classes: vec![],
        period: None,
        class_signs: vec![],
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    ctx: &Ctx,
    curve: &Option<PathBuf>,
    spec: &Option<PathBuf>,
    degree: Option<usize>,
    method: DensityChoice,
    x_max: usize,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Result<Output> {
    let (s, _) = ctx.load_spectrum(spec, curve, degree)?;
    let rv = build_rv(&s);
    let method = match method {
        DensityChoice::Auto if s.cyclotomic.is_some() => DensityChoice::Exact,
        DensityChoice::Auto if rv.k() > 0 => DensityChoice::Cf,
        DensityChoice::Auto => DensityChoice::Mc,
        m => m,
    };
    let seed = ctx.seed(seed);
    let samples = ctx.samples(samples);
    let mut extra = json!({});
    let report = match method {
        DensityChoice::Exact => density_exact_periodic(&s)?,
        DensityChoice::TimeAverage => {
            let v: Vec<f64> = (1..=x_max as u64).map(|x| t_explicit_f64(&s, x)).collect();
            density_time_average(&v)
        }
        DensityChoice::Mc => {
            let mc = delta_mc(&rv, samples, seed)?;
            extra = json!({ "seed": seed, "samples": samples });
            estimate_report(mc.delta, Some(mc.std_error), DensityMethod::LimitLawMc)
        }
        DensityChoice::Cf => {
            let cf = delta_cf(&rv, ctx.cf_cap())?;
            extra = json!({ "cutoff": cf.cutoff, "truncation_bound": cf.truncation_bound });
            estimate_report(cf.delta, None, DensityMethod::LimitLawCf)
        }
        DensityChoice::Auto => unreachable!("resolved above"),
    };
    let mut json = density_json(&report);
    json["delta"] = json!(density_str(&report));
    if let Value::Object(m) = extra {
        for (k, v) in m {
            json[k] = v;
        }
    }
    let (lo, hi) = report.bounds_f64();
    Ok(Output {
        json,
        header: vec!["method", "delta", "lower", "upper"],
        rows: vec![vec![
            report.method.as_str().to_string(),
            density_str(&report),
            format_sig15(lo),
            format_sig15(hi),
        ]],
    })
}

fn cmd_sympower(ctx: &Ctx, curve: &Option<PathBuf>, m: u32, n: usize) -> Result<Output> {
    let (c, _) = ctx.load_curve(curve, None)?;
    let mut ed = EulerData::new(&c, ctx.cfg.max_residue_field());
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for k in 1..=n {
        let s = sym_power_sums(&mut ed, m, k)?;
        let r = explicit_formula_residual(&mut ed, m, k)?;
        list.push(json!({
            "m": m,
            "n": k,
            "exact": s.exact.to_string(),
            "normalized": s.normalized,
            "place_sum": r.lhs,
            "bracket": r.bracket,
            "residual": r.residual,
        }));
        rows.push(vec![
            m.to_string(),
            k.to_string(),
            s.exact.to_string(),
            format_sig15(r.residual),
        ]);
    }
    let est = m_m_estimate(&mut ed, m, n)?;
    Ok(Output {
        json: json!({
            "q": c.ctx().q(),
            "m": m,
            "rows": list,
            "m_m_estimate": est.value,
            "m_m_drift": est.drift,
        }),
        header: vec!["m", "n", "s_prime", "residual"],
        rows,
    })
}

fn cmd_ulmer(p: u64, k: u32, d: u64, check_theorems: bool) -> Result<Output> {
    let s = ulmer::validate(p, k, d)?;
    let rep = ulmer::theorem_check(&s);
    if check_theorems && !rep.consistent() {
        let failed: Vec<&str> = rep
            .entries
            .iter()
            .filter(|e| e.holds == Some(false))
            .map(|e| e.name)
            .collect();
        return Err(Error::TheoremCheck(failed.join(", ")));
    }
    let l = ulmer::closed_form_l(&s)?;
    let sp = ulmer::closed_form_spectrum(&s)?;
    let entries: Vec<Value> = rep
        .entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "applicable": e.applicable,
                "conclusion": e.conclusion,
                "holds": e.holds,
                "note": e.note,
            })
        })
        .collect();
    let json = json!({
        "p": p,
        "k": k,
        "d": d,
        "q": s.q,
        "n": s.n,
        "epsilon_d": ulmer::epsilon_d(&s),
        "epsilon_minus": ulmer::epsilon_minus(&s),
        "rank": rep.rank,
        "l_degree": ulmer::l_degree(&s),
        "printed_l_degree": ulmer::printed_l_degree(&s),
        "period": ulmer::period(&s),
        "delta": density_str(&rep.delta),
        "density": density_json(&rep.delta),
        "lpoly": lpoly_json(&l),
        "spectrum": spectrum_json(&sp, None),
        "theorems": entries,
        "consistent": rep.consistent(),
    });
    Ok(Output {
        json,
        header: vec!["p", "k", "d", "q", "rank", "l_degree", "period", "delta"],
        rows: vec![vec![
            p.to_string(),
            k.to_string(),
            d.to_string(),
            s.q.to_string(),
            rep.rank.to_string(),
            ulmer::l_degree(&s).to_string(),
            ulmer::period(&s).to_string(),
            density_str(&rep.delta),
        ]],
    })
}

fn cmd_ulmer_scan(p_max: u64, d_max: u64, k_max: u32) -> Result<Output> {
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for r in ulmer::scan(p_max, d_max, k_max) {
        let (lo, hi) = r.delta.exact_bounds().expect("exact density");
        list.push(json!({
            "p": r.spec.p, "k": r.spec.k, "d": r.spec.d, "q": r.spec.q, "n": r.spec.n,
            "epsilon_d": r.epsilon_d, "rank": r.rank, "period": r.period,
            "delta": density_str(&r.delta),
        }));
        rows.push(vec![
            r.spec.p.to_string(),
            r.spec.k.to_string(),
            r.spec.d.to_string(),
            r.spec.q.to_string(),
            r.spec.n.to_string(),
            r.epsilon_d.to_string(),
            r.rank.to_string(),
            r.period.to_string(),
            rational_str(&lo),
            rational_str(&hi),
        ]);
    }
    Ok(Output {
        json: json!({ "rows": list }),
        header: vec![
            "p",
            "k",
            "d",
            "q",
            "n",
            "epsilon_d",
            "rank",
            "period",
            "delta_lo",
            "delta_hi",
        ],
        rows,
    })
}

fn cmd_limitlaw(
    ctx: &Ctx,
    spec: &Option<PathBuf>,
    curve: &Option<PathBuf>,
    degree: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Result<Output> {
    let (s, _) = ctx.load_spectrum(spec, curve, degree)?;
    let rv = build_rv(&s);
    let seed = ctx.seed(seed);
    let samples = ctx.samples(samples);
    let mc = delta_mc(&rv, samples, seed)?;
    let cf = if rv.k() > 0 {
        Some(delta_cf(&rv, ctx.cf_cap())?)
    } else {
        None
    };
    let gd = gaussian_distance(&rv, samples.max(MIN_GAUSSIAN_SAMPLES), seed)?;
    let be = berry_esseen_diagnostic(&rv, 1.0, 400);
    let mv = mean_variance(&s);
    let li = li_diagnostic(&s, 24, ctx.cfg.li_tolerance.unwrap_or(DEFAULT_LI_TOLERANCE));
    let json = json!({
        "delta_mc": mc.delta,
        "se": mc.std_error,
        "delta_cf": cf.as_ref().map(|c| c.delta),
        "cf_truncation_bound": cf.as_ref().map(|c| c.truncation_bound),
        "mean": mc.mean,
        "var": mc.variance,
        "mean_formula": mv.mean,
        "variance_corrected": mv.variance_corrected,
        "gaussian_sup_distance": gd.sup_distance,
        "gaussian_bound": gd.bound,
        "v_even": rv.v_even,
        "v_odd": rv.v_odd,
        "weights": rv.weights,
        "amplitudes": rv.amplitudes,
        "li_satisfied": li.satisfied,
        "li_reasons": li.reasons,
        "berry_esseen": be,
        "samples": samples,
        "seed": seed,
    });
    Ok(Output {
        json,
        header: vec![
            "delta_mc",
            "se",
            "delta_cf",
            "mean",
            "var",
            "gaussian_sup_distance",
        ],
        rows: vec![vec![
            format_sig15(mc.delta),
            format_sig15(mc.std_error),
            cf.map(|c| format_sig15(c.delta)).unwrap_or_default(),
            format_sig15(mc.mean),
            format_sig15(mc.variance),
            format_sig15(gd.sup_distance),
        ]],
    })
}

fn cmd_twists(
    ctx: &Ctx,
    curve: &Option<PathBuf>,
    d: usize,
    sample: usize,
    seed: Option<u64>,
) -> Result<Output> {
    let (c, _) = ctx.load_curve(curve, None)?;
    let opts = SurveyOptions {
        max_residue_field: ctx.cfg.max_residue_field(),
        ..SurveyOptions::default()
    };
    let sv = survey(&c, d, sample, ctx.seed(seed), &opts)?;
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for s in &sv.samples {
        let coeffs: Vec<String> = s.lpoly.coeffs().iter().map(|a| a.to_string()).collect();
        list.push(json!({
            "f": s.f.to_string(),
            "l_degree": s.l_degree,
            "epsilon": s.epsilon,
            "rank": s.spectrum.rank,
            "m_minus_q": s.spectrum.m_minus_q,
            "li_satisfied": s.li_satisfied,
            "delta": s.delta,
            "delta_method": s.delta_method,
            "mean": s.mean,
            "lpoly": lpoly_json(&s.lpoly),
        }));
        rows.push(vec![
            s.f.to_string(),
            s.l_degree.to_string(),
            s.epsilon.to_string(),
            s.spectrum.rank.to_string(),
            s.spectrum.m_minus_q.to_string(),
            s.li_satisfied.to_string(),
            format_sig15(s.delta),
            s.delta_method.to_string(),
            coeffs.join(" "),
        ]);
    }
    let failures: Vec<Value> = sv
        .failures
        .iter()
        .map(|(f, e)| json!({ "f": f.to_string(), "error": error_record(e)["error"] }))
        .collect();
    Ok(Output {
        json: json!({ "samples": list, "failures": failures, "summary": sv.summary }),
        header: vec![
            "f",
            "l_degree",
            "epsilon",
            "rank",
            "m_minus_q",
            "li_satisfied",
            "delta",
            "delta_method",
            "lpoly",
        ],
        rows,
    })
}
