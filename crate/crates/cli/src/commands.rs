use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use polylab::analytic::{
    arm_edge_moment, asymptotic_surplus, closed_polygon_expectations,
    exact_expected_total_curvature, exact_expected_turning_angle, green_function,
    hausdorff_constant, projection_pdf, unknot_fraction_bound, AnalyticContext,
};
use polylab::geom::Dim;
use polylab::io::PolygonCsvWriter;
use polylab::montecarlo::{
    curvature_census, estimate as mc_estimate, surplus_curve, ErrorMethod, EstimateConfig,
    Execution, Functional,
};
use polylab::quadrature::{
    expected_turning_angle_numeric, integrate_edge_moment, integrate_pairwise_normalization,
    QuadratureResult, QuadratureSpec, Truncation,
};
use polylab::samplers::{Measure, Sampler, SamplerConfig};
use polylab::Error;
use serde::Serialize;

use crate::output::{fmt17, to_json, Num, Sink};
use crate::{ChainArgs, ExecArgs, TolArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_)
            | Error::Domain(_)
            | Error::UnsupportedDimension { .. }
            | Error::Parse { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("io error: {e}"))
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn dim(d: usize) -> CliResult<Dim> {
    Dim::from_usize(d).map_err(CliError::from)
}

fn execution(e: ExecArgs) -> Execution {
    match e.workers {
        1 => Execution::Sequential,
        w => Execution::Parallel { workers: w },
    }
}

fn measure(name: &str, chain: ChainArgs) -> CliResult<Measure> {
    let m = Measure::parse(name)?;
    Ok(match m {
        Measure::EquilateralMcmc { .. } => {
            Measure::EquilateralMcmc { thinning: chain.thinning, burn_in: chain.burn_in }
        }
        other => {
            if chain.thinning.is_some() || chain.burn_in.is_some() {
                return Err(usage("--thinning and --burn-in apply only to equilateral-mcmc"));
            }
            other
        }
    })
}

fn quadrature_spec(t: TolArgs) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: t.reltol,
        abs_tol: t.abstol,
        truncation: Truncation::Auto,
        max_subdivisions: t.max_subdivisions,
    }
}

/// Parses `a..b`, `a..=b` (both inclusive) or `a,b,c`.
pub fn parse_n_range(s: &str) -> CliResult<Vec<usize>> {
    let bad = || usage(format!("cannot parse n range `{s}`"));
    let ns: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (usize, usize) =
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<CliResult<_>>()?
    };
    if ns.is_empty() {
        return Err(bad());
    }
    Ok(ns)
}

pub fn sample(
    measure_name: &str,
    n: usize,
    d: usize,
    count: u64,
    seed: u64,
    chain: ChainArgs,
    out: Option<PathBuf>,
) -> CliResult {
    let sink = Sink::new(out, Some(seed));
    let dim = dim(d)?;
    let m = measure(measure_name, chain)?;
    let mut sampler = m.build(SamplerConfig::new(n, dim, seed))?;
    let mut w = PolygonCsvWriter::new(Vec::new(), dim)?;
    for id in 0..count {
        w.write(id, &sampler.sample())?;
    }
    sink.emit(&w.finish()?)?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// total-curvature, turning-angle, unknot-bound, hausdorff-constant,
    /// surplus-limit, arm-moment, edge-moment, chord, gyradius, green,
    /// projection-pdf or single-edge-pdf.
    #[arg(long)]
    pub quantity: String,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub d: u32,
    #[arg(long, default_value_t = 2)]
    pub bridge: u32,
    #[arg(long, default_value_t = 1.0)]
    pub m1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m2: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ExactOut<'a> {
    quantity: &'a str,
    n: Option<u32>,
    value: Num,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    parameters: BTreeMap<&'static str, Num>,
}

pub fn exact(a: &ExactArgs) -> CliResult {
    let sink = Sink::new(a.out.clone(), None);
    let need = |v: Option<u32>, flag: &str| v.ok_or_else(|| usage(format!("--{flag} is required")));
    let need_f = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("--{flag} is required")));
    let mut params = BTreeMap::new();
    let value = match a.quantity.as_str() {
        "total-curvature" => exact_expected_total_curvature(need(a.n, "n")?)?,
        "turning-angle" => exact_expected_turning_angle(need(a.n, "n")?)?,
        "unknot-bound" => {
            params.insert("bridge", Num(a.bridge as f64));
            unknot_fraction_bound(need(a.n, "n")?, a.bridge)?
        }
        "hausdorff-constant" => hausdorff_constant(need(a.n, "n")?)?,
        "surplus-limit" => {
            params.insert("d", Num(a.d as f64));
            params.insert("m1", Num(a.m1));
            params.insert("m2", Num(a.m2));
            asymptotic_surplus(a.d, a.m1, a.m2)?
        }
        "arm-moment" => {
            let p = need_f(a.p, "p")?;
            if p < 0.0 || p.fract() != 0.0 {
                return Err(usage("arm-moment needs a non-negative integer --p"));
            }
            params.insert("d", Num(a.d as f64));
            params.insert("p", Num(p));
            arm_edge_moment(a.d as usize, p as u32)?
        }
        "edge-moment" => {
            let p = need_f(a.p, "p")?;
            params.insert("p", Num(p));
            closed_polygon_expectations(need(a.n, "n")?)?.edge_moment(p)?
        }
        "chord" => {
            let k = need(a.k, "k")?;
            params.insert("k", Num(k as f64));
            closed_polygon_expectations(need(a.n, "n")?)?.chord(k)?
        }
        "gyradius" => closed_polygon_expectations(need(a.n, "n")?)?.gyradius(),
        "green" => {
            let (k, r) = (need(a.k, "k")?, need_f(a.r, "r")?);
            params.insert("k", Num(k as f64));
            params.insert("r", Num(r));
            green_function(k, r)?
        }
        "projection-pdf" => {
            let (k, r) = (need(a.k, "k")?, need_f(a.r, "r")?);
            params.insert("k", Num(k as f64));
            params.insert("y", Num(r));
            projection_pdf(k, r)?
        }
        "single-edge-pdf" => {
            let r = need_f(a.r, "r")?;
            params.insert("r", Num(r));
            AnalyticContext::new(need(a.n, "n")?)?.single_edge_pdf(r)?
        }
        other => return Err(usage(format!("unknown quantity `{other}`"))),
    };
    let out = ExactOut { quantity: &a.quantity, n: a.n, value: Num(value), parameters: params };
    sink.emit(to_json(&out).as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct IntegrateOut<'a> {
    quantity: &'a str,
    n: u32,
    value: Num,
    error_bound: Num,
    evaluations: usize,
    wall_seconds: Num,
    exact: Num,
    correct_digits: Num,
}

/// `-log10(|approx - exact| / |exact|)`, floored at 0 and capped at 17.
pub fn correct_digits(approx: f64, exact: f64) -> f64 {
    let r = ((approx - exact) / exact).abs();
    if r == 0.0 {
        17.0
    } else {
        (-r.log10()).clamp(0.0, 17.0)
    }
}

fn convergence(e: Error) -> CliError {
    match e {
        Error::Convergence { .. } => CliError::Failure(e.to_string()),
        other => other.into(),
    }
}

pub fn integrate(n: u32, quantity: &str, p: f64, tol: TolArgs, out: Option<PathBuf>) -> CliResult {
    let sink = Sink::new(out, None);
    let spec = quadrature_spec(tol);
    spec.validate()?;
    let ctx = AnalyticContext::new(n)?;
    let start = Instant::now();
    let (r, exact): (QuadratureResult, f64) = match quantity {
        "turning-angle" => (
            expected_turning_angle_numeric(&ctx, &spec).map_err(convergence)?,
            exact_expected_turning_angle(n)?,
        ),
        "pair-norm" => (integrate_pairwise_normalization(&ctx, &spec).map_err(convergence)?, 1.0),
        "edge-moment" => (
            integrate_edge_moment(&ctx, p, &spec).map_err(convergence)?,
            closed_polygon_expectations(n)?.edge_moment(p)?,
        ),
        other => return Err(usage(format!("unknown quantity `{other}`"))),
    };
    let o = IntegrateOut {
        quantity,
        n,
        value: Num(r.value),
        error_bound: Num(r.error_bound),
        evaluations: r.evaluations,
        wall_seconds: Num(start.elapsed().as_secs_f64()),
        exact: Num(exact),
        correct_digits: Num(correct_digits(r.value, exact)),
    };
    sink.emit(to_json(&o).as_bytes())?;
    Ok(())
}

/// Closed-form mean of `f` under `m`, where one is known.
pub fn exact_expectation(f: Functional, m: Measure, n: usize, d: Dim) -> Option<f64> {
    let nu = n as u32;
    let nf = n as f64;
    match m {
        Measure::SymmetricClosed | Measure::HopfGaussianClosed if d == Dim::Three => {
            match f {
                Functional::TotalCurvature => return exact_expected_total_curvature(nu).ok(),
                Functional::CurvatureSurplus => {
                    return exact_expected_total_curvature(nu).ok().map(|k| k - PI / 2.0 * nf)
                }
                Functional::TurningAngle => return exact_expected_turning_angle(nu).ok(),
                _ => {}
            }
            if m == Measure::SymmetricClosed {
                return (f == Functional::TotalLength).then_some(2.0);
            }
            let e = closed_polygon_expectations(nu).ok()?;
            match f {
                Functional::FirstEdgeSquared => e.edge_moment(2.0).ok(),
                Functional::EdgeMoment(p) => e.edge_moment(p).ok(),
                Functional::Chord(k) => e.chord(k as u32).ok(),
                Functional::Gyradius => Some(e.gyradius()),
                _ => None,
            }
        }
        Measure::HopfGaussianArm | Measure::Radial(_) => {
            let moment = |p: u32| match m {
                Measure::Radial(law) => Some(law.moment(p)),
                _ => arm_edge_moment(d.as_usize(), p).ok(),
            };
            let m2 = moment(2)?;
            match f {
                Functional::TotalCurvature if n >= 1 => Some((nf - 1.0) * PI / 2.0),
                Functional::TurningAngle if n >= 2 => Some(PI / 2.0),
                Functional::FirstEdgeSquared => Some(m2),
                Functional::EdgeMoment(p) if p >= 0.0 && p.fract() == 0.0 => moment(p as u32),
                Functional::Chord(k) if k >= 1 && k <= n => Some(k as f64 * m2),
                Functional::Gyradius => Some(m2 * nf * (nf + 2.0) / (6.0 * (nf + 1.0))),
                Functional::TotalLength => Some(nf * moment(1)?),
                _ => None,
            }
        }
        _ => None,
    }
}

pub struct EstimateArgs {
    pub quantity: String,
    pub measure: String,
    pub n: usize,
    pub d: usize,
    pub count: u64,
    pub batch_size: u64,
    pub seed: u64,
    pub chain: ChainArgs,
    pub exec: ExecArgs,
    pub expect: Option<String>,
    pub sigmas: f64,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct EstimateOut {
    quantity: String,
    n: usize,
    d: usize,
    sampler: String,
    count: u64,
    mean: Num,
    std_error: Num,
    std_dev: Num,
    error_method: &'static str,
    effective_samples: Num,
    seed: u64,
    stream_id: u64,
    wall_seconds: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    standard_errors_from_expected: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_tolerance: Option<bool>,
}

pub fn estimate(a: EstimateArgs) -> CliResult {
    let sink = Sink::new(a.out, Some(a.seed));
    let dim = dim(a.d)?;
    let m = measure(&a.measure, a.chain)?;
    let f = Functional::parse(&a.quantity)?;
    let expected = match a.expect.as_deref() {
        None => None,
        Some("exact") => Some(exact_expectation(f, m, a.n, dim).ok_or_else(|| {
            usage(format!("no closed form for {} under {}", f.label(), m.label()))
        })?),
        Some(v) => Some(v.parse::<f64>().map_err(|_| usage(format!("bad --expect `{v}`")))?),
    };
    if a.sigmas.is_nan() || a.sigmas <= 0.0 {
        return Err(usage("--sigmas must be positive"));
    }
    let cfg = EstimateConfig::new(m, a.n, dim, a.seed, a.count)
        .with_batch_size(a.batch_size)
        .with_execution(execution(a.exec));
    let r = mc_estimate(&f, &cfg)?;
    let z = expected.map(|e| r.z_score(e));
    let within = z.map(|z| z <= a.sigmas);
    let o = EstimateOut {
        quantity: r.quantity.clone(),
        n: r.n,
        d: r.d,
        sampler: r.sampler.clone(),
        count: r.count,
        mean: Num(r.mean),
        std_error: Num(r.std_error),
        std_dev: Num(r.std_dev),
        error_method: match r.error_method {
            ErrorMethod::Iid => "iid",
            ErrorMethod::BatchMeans => "batch-means",
        },
        effective_samples: Num(r.effective_samples),
        seed: r.seed,
        stream_id: r.stream_id,
        wall_seconds: Num(r.wall_seconds),
        expected: expected.map(Num),
        standard_errors_from_expected: z.map(Num),
        within_tolerance: within,
    };
    sink.emit(to_json(&o).as_bytes())?;
    match (within, z) {
        (Some(false), Some(z)) => Err(CliError::Failure(format!(
            "mean {} is {z:.2} standard errors from {}",
            r.mean,
            expected.unwrap_or(f64::NAN)
        ))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct CensusOut {
    n: usize,
    threshold_multiple: Num,
    threshold: Num,
    below: u64,
    total: u64,
    fraction: Num,
    interval_95: [Num; 2],
    seed: u64,
    wall_seconds: Num,
}

pub fn census(
    n: usize,
    threshold: f64,
    count: u64,
    seed: u64,
    exec: ExecArgs,
    out: Option<PathBuf>,
) -> CliResult {
    let sink = Sink::new(out, Some(seed));
    let r = curvature_census(n, threshold, count, seed, execution(exec))?;
    let o = CensusOut {
        n: r.n,
        threshold_multiple: Num(r.threshold_multiple),
        threshold: Num(r.threshold_multiple * 2.0 * PI),
        below: r.below,
        total: r.total,
        fraction: Num(r.fraction),
        interval_95: [Num(r.interval.0), Num(r.interval.1)],
        seed: r.seed,
        wall_seconds: Num(r.wall_seconds),
    };
    sink.emit(to_json(&o).as_bytes())?;
    Ok(())
}

pub fn surplus(
    n_range: &str,
    measure_name: &str,
    count: u64,
    seed: u64,
    chain: ChainArgs,
    exec: ExecArgs,
    out: Option<PathBuf>,
) -> CliResult {
    let sink = Sink::new(out, Some(seed));
    let ns = parse_n_range(n_range)?;
    let m = measure(measure_name, chain)?;
    let rows = surplus_curve(&ns, m, count, seed, execution(exec))?;
    let mut csv = String::from("n,mean_surplus,stderr,count,seed\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            fmt17(r.mean_surplus),
            fmt17(r.std_error),
            r.count,
            r.seed
        ));
    }
    sink.emit(csv.as_bytes())?;
    Ok(())
}

pub fn compare(
    n_range: &str,
    mc_counts: &str,
    seed: u64,
    tol: TolArgs,
    exec: ExecArgs,
    out: Option<PathBuf>,
) -> CliResult {
    let sink = Sink::new(out, Some(seed));
    let ns = parse_n_range(n_range)?;
    let counts: Vec<u64> = mc_counts
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("bad --mc-counts `{mc_counts}`"))))
        .collect::<CliResult<_>>()?;
    if ns.iter().any(|&n| n < 4) {
        return Err(usage("compare needs n >= 4"));
    }
    let spec = quadrature_spec(tol);
    spec.validate()?;
    let mut header = String::from("n,exact,quadrature,quadrature_error_bound,quadrature_digits");
    for c in &counts {
        header.push_str(&format!(",mc_{c},mc_{c}_stderr,mc_{c}_digits"));
    }
    header.push('\n');
    let mut csv = header;
    for &n in &ns {
        let nu = n as u32;
        let exact = exact_expected_total_curvature(nu)?;
        let ctx = AnalyticContext::new(nu)?;
        let q = expected_turning_angle_numeric(&ctx, &spec).map_err(convergence)?;
        let quad = n as f64 * q.value;
        csv.push_str(&format!(
            "{n},{},{},{},{:.2}",
            fmt17(exact),
            fmt17(quad),
            fmt17(n as f64 * q.error_bound),
            correct_digits(quad, exact)
        ));
        for (i, &c) in counts.iter().enumerate() {
            let cfg = EstimateConfig::new(Measure::SymmetricClosed, n, Dim::Three, seed, c)
                .with_stream(((n as u64) << 8) | i as u64)
                .with_execution(execution(exec));
            let r = mc_estimate(&Functional::TotalCurvature, &cfg)?;
            csv.push_str(&format!(
                ",{},{},{:.2}",
                fmt17(r.mean),
                fmt17(r.std_error),
                correct_digits(r.mean, exact)
            ));
        }
        csv.push('\n');
    }
    sink.emit(csv.as_bytes())?;
    Ok(())
}
