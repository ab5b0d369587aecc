//! Seeded ensemble averages of polygon functionals.
//!
//! Work is cut into fixed-size batches. Batch `b` draws from its own RNG
//! stream `(stream_id << 32) ^ b` and batch results are merged in batch
//! order, so a report depends only on the configuration, never on the
//! number of worker threads or on scheduling.

mod stats;

use std::f64::consts::PI;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geom::{
    chord_squared_mean, gyradius_squared, total_curvature, total_length, total_torsion, Dim,
    EdgeChain, Polygon,
};
use crate::samplers::{EquilateralMcmc, Measure, Sampler, SamplerConfig};

pub use stats::{batch_means_std_error, binomial_interval, RunningStats};

pub const DEFAULT_BATCH_SIZE: u64 = 4096;

/// How batches are scheduled. Without the `parallel` feature, `Parallel`
/// runs sequentially; results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// `workers == 0` lets the thread pool pick its size.
    Parallel { workers: usize },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { workers: 0 }
        } else {
            Execution::Sequential
        }
    }
}

/// Runs `job` for every batch index in `0..batches` and returns the results
/// in index order.
pub fn run_batches<T, F>(batches: u64, exec: Execution, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = match exec {
        Execution::Sequential => (0..batches).map(&job).collect(),
        Execution::Parallel { workers } => run_parallel(batches, workers, &job)?,
    };
    results.into_iter().collect()
}

#[cfg(feature = "parallel")]
fn run_parallel<T, F>(batches: u64, workers: usize, job: &F) -> Result<Vec<Result<T>>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Argument(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(|| (0..batches).into_par_iter().map(job).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_parallel<T, F>(batches: u64, _workers: usize, job: &F) -> Result<Vec<Result<T>>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    Ok((0..batches).map(job).collect())
}

pub fn batch_stream(stream_id: u64, batch: u64) -> u64 {
    (stream_id << 32) ^ batch
}

/// Scalar functionals of a polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    TotalCurvature,
    /// `kappa - pi n / 2`.
    CurvatureSurplus,
    /// Mean turning angle per vertex.
    TurningAngle,
    TotalTorsion,
    /// `|e_1|^2`.
    FirstEdgeSquared,
    /// Mean of `|e_i|^p` over the edges of each polygon.
    EdgeMoment(f64),
    /// Mean squared chord over `k` consecutive edges.
    Chord(usize),
    Gyradius,
    TotalLength,
}

impl Functional {
    /// Parses `curvature`, `surplus`, `turning-angle`, `torsion`,
    /// `edge-squared`, `edge-moment:<p>`, `chord:<k>`, `gyradius`, `length`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("unknown quantity `{s}`"));
        Ok(match s {
            "curvature" | "total-curvature" => Functional::TotalCurvature,
            "surplus" => Functional::CurvatureSurplus,
            "turning-angle" => Functional::TurningAngle,
            "torsion" | "total-torsion" => Functional::TotalTorsion,
            "edge-squared" => Functional::FirstEdgeSquared,
            "gyradius" => Functional::Gyradius,
            "length" => Functional::TotalLength,
            other => {
                let (head, arg) = other.split_once(':').ok_or_else(bad)?;
                match head {
                    "edge-moment" => Functional::EdgeMoment(arg.parse().map_err(|_| bad())?),
                    "chord" => Functional::Chord(arg.parse().map_err(|_| bad())?),
                    _ => return Err(bad()),
                }
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            Functional::TotalCurvature => "curvature".into(),
            Functional::CurvatureSurplus => "surplus".into(),
            Functional::TurningAngle => "turning-angle".into(),
            Functional::TotalTorsion => "torsion".into(),
            Functional::FirstEdgeSquared => "edge-squared".into(),
            Functional::EdgeMoment(p) => format!("edge-moment:{p}"),
            Functional::Chord(k) => format!("chord:{k}"),
            Functional::Gyradius => "gyradius".into(),
            Functional::TotalLength => "length".into(),
        }
    }

    pub fn evaluate(&self, p: &Polygon) -> Result<f64> {
        let n = p.len() as f64;
        match *self {
            Functional::TotalCurvature => total_curvature(p),
            Functional::CurvatureSurplus => Ok(total_curvature(p)? - PI / 2.0 * n),
            Functional::TurningAngle => {
                let vertices = if p.is_closed() { n } else { n - 1.0 };
                if vertices < 1.0 {
                    return Err(Error::Argument("a single edge has no turning angle".into()));
                }
                Ok(total_curvature(p)? / vertices)
            }
            Functional::TotalTorsion => match p {
                Polygon::Closed(c) => total_torsion(c),
                Polygon::Arm(_) => {
                    Err(Error::Argument("torsion is defined here for closed polygons".into()))
                }
            },
            Functional::FirstEdgeSquared => Ok(p.edges()[0].norm_sq()),
            Functional::EdgeMoment(q) => {
                Ok(p.edges().iter().map(|e| e.norm().powf(q)).sum::<f64>() / n)
            }
            Functional::Chord(k) => chord_squared_mean(p, k),
            Functional::Gyradius => Ok(gyradius_squared(p)),
            Functional::TotalLength => Ok(total_length(p)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateConfig {
    pub measure: Measure,
    pub n: usize,
    pub dim: Dim,
    pub seed: u64,
    pub stream_id: u64,
    pub count: u64,
    pub batch_size: u64,
    pub execution: Execution,
}

impl EstimateConfig {
    pub fn new(measure: Measure, n: usize, dim: Dim, seed: u64, count: u64) -> Self {
        EstimateConfig {
            measure,
            n,
            dim,
            seed,
            stream_id: 0,
            count,
            batch_size: DEFAULT_BATCH_SIZE,
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_stream(mut self, stream_id: u64) -> Self {
        self.stream_id = stream_id;
        self
    }

    pub fn with_batch_size(mut self, batch_size: u64) -> Self {
        self.batch_size = batch_size;
        self
    }

    fn batches(&self) -> u64 {
        self.count.div_ceil(self.batch_size)
    }

    fn batch_len(&self, b: u64) -> u64 {
        self.batch_size.min(self.count - b * self.batch_size)
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Argument(format!("need at least 2 samples, got {}", self.count)));
        }
        if self.batch_size == 0 {
            return Err(Error::Argument("batch size must be positive".into()));
        }
        if self.measure.is_markov() && self.batches() < 2 {
            return Err(Error::Argument(
                "Markov-chain estimates need at least two batches for an error bar".into(),
            ));
        }
        // surface construction errors before spawning work
        self.measure.build(self.sampler_config(0)).map(|_| ())
    }

    fn sampler_config(&self, batch: u64) -> SamplerConfig {
        SamplerConfig::new(self.n, self.dim, self.seed)
            .with_stream(batch_stream(self.stream_id, batch))
    }
}

/// How the standard error was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMethod {
    /// Sample standard deviation over the square root of the count.
    Iid,
    /// Spread of per-batch means; each batch is an independent chain.
    BatchMeans,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub quantity: String,
    pub n: usize,
    pub d: usize,
    pub sampler: String,
    pub count: u64,
    pub mean: f64,
    pub std_error: f64,
    pub std_dev: f64,
    pub error_method: ErrorMethod,
    /// `std_dev^2 / std_error^2`; equals `count` for independent samples.
    pub effective_samples: f64,
    pub seed: u64,
    pub stream_id: u64,
    pub wall_seconds: f64,
}

impl EstimateReport {
    /// `|mean - expected|` in units of the standard error.
    pub fn z_score(&self, expected: f64) -> f64 {
        (self.mean - expected).abs() / self.std_error
    }
}

/// Averages a [`Functional`] over `cfg.count` samples.
pub fn estimate(functional: &Functional, cfg: &EstimateConfig) -> Result<EstimateReport> {
    estimate_with(&functional.label(), |p| functional.evaluate(p), cfg)
}

/// Averages an arbitrary functional. A failing evaluation aborts the run
/// with an [`Error::Sample`] that pins down the offending sample.
pub fn estimate_with<F>(label: &str, f: F, cfg: &EstimateConfig) -> Result<EstimateReport>
where
    F: Fn(&Polygon) -> Result<f64> + Sync + Send,
{
    cfg.validate()?;
    let start = Instant::now();
    let per_batch = run_batches(cfg.batches(), cfg.execution, |b| {
        let scfg = cfg.sampler_config(b);
        let mut sampler = cfg.measure.build(scfg)?;
        let mut acc = RunningStats::new();
        for i in 0..cfg.batch_len(b) {
            let p = sampler.sample();
            let v = f(&p).map_err(|e| Error::Sample {
                seed: cfg.seed,
                stream: scfg.stream_id,
                index: i as usize,
                source: Box::new(e),
            })?;
            acc.push(v);
        }
        Ok(acc)
    })?;
    Ok(build_report(label, cfg, &per_batch, start))
}

fn build_report(
    label: &str,
    cfg: &EstimateConfig,
    per_batch: &[RunningStats],
    start: Instant,
) -> EstimateReport {
    let mut total = RunningStats::new();
    per_batch.iter().for_each(|s| total.merge(s));
    let (std_error, error_method) = if cfg.measure.is_markov() {
        (batch_means_std_error(per_batch), ErrorMethod::BatchMeans)
    } else {
        (total.std_error(), ErrorMethod::Iid)
    };
    EstimateReport {
        quantity: label.to_string(),
        n: cfg.n,
        d: cfg.dim.as_usize(),
        sampler: cfg.measure.label(),
        count: total.count(),
        mean: total.mean(),
        std_error,
        std_dev: total.std_dev(),
        error_method,
        effective_samples: total.variance() / (std_error * std_error),
        seed: cfg.seed,
        stream_id: cfg.stream_id,
        wall_seconds: start.elapsed().as_secs_f64(),
    }
}

/// Total curvature (or its surplus over `pi n / 2`) along crankshaft
/// chains, read from the chain's incrementally tracked curvature instead of
/// materializing each polygon. Each batch is one independent chain with its
/// own burn-in; `cfg.measure` must be [`Measure::EquilateralMcmc`].
pub fn estimate_chain_curvature(cfg: &EstimateConfig, surplus: bool) -> Result<EstimateReport> {
    let Measure::EquilateralMcmc { thinning, burn_in } = cfg.measure else {
        return Err(Error::Argument(format!(
            "chain curvature needs the equilateral chain, got {}",
            cfg.measure.label()
        )));
    };
    cfg.validate()?;
    let n = cfg.n as u64;
    let (thinning, burn_in) = (thinning.unwrap_or(n), burn_in.unwrap_or(10 * n));
    let shift = if surplus { PI / 2.0 * cfg.n as f64 } else { 0.0 };
    let start = Instant::now();
    let per_batch = run_batches(cfg.batches(), cfg.execution, |b| {
        let mut chain = EquilateralMcmc::new(cfg.sampler_config(b), thinning, burn_in)?;
        let mut acc = RunningStats::new();
        for _ in 0..cfg.batch_len(b) {
            for _ in 0..thinning {
                chain.step();
            }
            acc.push(chain.curvature() - shift);
        }
        Ok(acc)
    })?;
    let label = if surplus { Functional::CurvatureSurplus } else { Functional::TotalCurvature };
    Ok(build_report(&label.label(), cfg, &per_batch, start))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub n: usize,
    /// Threshold as a multiple of `2 pi`.
    pub threshold_multiple: f64,
    pub below: u64,
    pub total: u64,
    pub fraction: f64,
    pub interval: (f64, f64),
    pub seed: u64,
    pub wall_seconds: f64,
}

/// Fraction of closed polygons in space (symmetric measure) whose total
/// curvature is below `threshold_multiple * 2 pi`.
pub fn curvature_census(
    n: usize,
    threshold_multiple: f64,
    count: u64,
    seed: u64,
    execution: Execution,
) -> Result<CensusReport> {
    if n < 3 {
        return Err(Error::Argument(format!("closed polygons need n >= 3, got {n}")));
    }
    if !(threshold_multiple > 1.0) {
        return Err(Error::Argument(format!(
            "threshold multiple must exceed 1, got {threshold_multiple}"
        )));
    }
    let threshold = threshold_multiple * 2.0 * PI;
    let cfg = EstimateConfig::new(Measure::SymmetricClosed, n, Dim::Three, seed, count)
        .with_execution(execution);
    let r = estimate_with(
        "census",
        |p| Ok(if total_curvature(p)? < threshold { 1.0 } else { 0.0 }),
        &cfg,
    )?;
    let below = (r.mean * r.count as f64).round() as u64;
    Ok(CensusReport {
        n,
        threshold_multiple,
        below,
        total: r.count,
        fraction: below as f64 / r.count as f64,
        interval: binomial_interval(below, r.count),
        seed,
        wall_seconds: r.wall_seconds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurplusRow {
    pub n: usize,
    pub mean_surplus: f64,
    pub std_error: f64,
    pub count: u64,
    pub seed: u64,
}

/// `E(kappa) - pi n / 2` for each `n`, using stream id `n` so rows are
/// independent and individually reproducible.
pub fn surplus_curve(
    ns: &[usize],
    measure: Measure,
    count: u64,
    seed: u64,
    execution: Execution,
) -> Result<Vec<SurplusRow>> {
    ns.iter()
        .map(|&n| {
            let cfg = EstimateConfig::new(measure, n, Dim::Three, seed, count)
                .with_stream(n as u64)
                .with_execution(execution);
            let r = estimate(&Functional::CurvatureSurplus, &cfg)?;
            Ok(SurplusRow { n, mean_surplus: r.mean, std_error: r.std_error, count: r.count, seed })
        })
        .collect()
}
