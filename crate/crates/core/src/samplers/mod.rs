//! Seeded generators for the polygon measures.
//!
//! Every sampler owns its RNG. Streams are ChaCha8 keystreams selected by
//! `(seed, stream_id)`, so parallel workers that use distinct stream ids
//! never share random numbers, and a given `(seed, stream_id, n)` always
//! reproduces the same sequence bit for bit.

mod mcmc;
mod radial;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, UnitCircle, UnitSphere};

use crate::error::{Error, Result};
use crate::geom::{ClosedPolygon, Dim, Polygon, PolygonArm, Vec3};
use crate::hopf::{hopf_map, hopf_planar_edge, PlanarComponent, Quaternion};

pub use mcmc::{EquilateralMcmc, McmcStats};
pub use radial::RadialDensity;

pub type PolyRng = ChaCha8Rng;

/// Residual norm (relative to the raw second vector) below which a frame is
/// treated as degenerate and redrawn.
const DEGENERATE_FRAME: f64 = 1e-8;

pub fn stream_rng(seed: u64, stream_id: u64) -> PolyRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SamplerConfig {
    pub n: usize,
    pub dim: Dim,
    pub seed: u64,
    pub stream_id: u64,
}

impl SamplerConfig {
    pub fn new(n: usize, dim: Dim, seed: u64) -> Self {
        SamplerConfig { n, dim, seed, stream_id: 0 }
    }

    pub fn with_stream(mut self, stream_id: u64) -> Self {
        self.stream_id = stream_id;
        self
    }

    pub fn rng(&self) -> PolyRng {
        stream_rng(self.seed, self.stream_id)
    }

    fn require_arm(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Argument("arms need n >= 1".into()));
        }
        Ok(())
    }

    fn require_closed(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::Argument(format!("closed polygons need n >= 3, got {}", self.n)));
        }
        Ok(())
    }
}

/// Object-safe sampling interface used by the estimation harness.
pub trait Sampler {
    fn sample(&mut self) -> Polygon;
}

#[inline]
fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn coin_component<R: Rng + ?Sized>(rng: &mut R) -> PlanarComponent {
    if rng.random::<bool>() {
        PlanarComponent::First
    } else {
        PlanarComponent::Second
    }
}

/// Arms whose edges are Hopf images of iid standard Gaussian quaternions
/// (space) or complex numbers on a randomly chosen component (plane).
#[derive(Debug, Clone)]
pub struct HopfGaussianArm {
    cfg: SamplerConfig,
    rng: PolyRng,
}

impl HopfGaussianArm {
    pub fn new(cfg: SamplerConfig) -> Result<Self> {
        cfg.require_arm()?;
        Ok(HopfGaussianArm { rng: cfg.rng(), cfg })
    }

    pub fn sample_arm(&mut self) -> PolygonArm {
        let n = self.cfg.n;
        let rng = &mut self.rng;
        let edges = match self.cfg.dim {
            Dim::Three => (0..n)
                .map(|_| {
                    let q = Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng));
                    hopf_map(q)
                })
                .collect(),
            Dim::Two => {
                let c = coin_component(rng);
                (0..n).map(|_| hopf_planar_edge(normal(rng), normal(rng), c)).collect()
            }
        };
        PolygonArm::new(self.cfg.dim, edges).expect("Hopf images are finite")
    }
}

impl Sampler for HopfGaussianArm {
    fn sample(&mut self) -> Polygon {
        self.sample_arm().into()
    }
}

/// Closed polygons of total length 2 under the symmetric measure: Hopf
/// images of random Hermitian (space) or real (plane) orthonormal 2-frames.
#[derive(Debug, Clone)]
pub struct SymmetricClosed {
    cfg: SamplerConfig,
    rng: PolyRng,
    u_re: Vec<f64>,
    u_im: Vec<f64>,
    v_re: Vec<f64>,
    v_im: Vec<f64>,
    resamples: u64,
}

impl SymmetricClosed {
    pub fn new(cfg: SamplerConfig) -> Result<Self> {
        cfg.require_closed()?;
        let n = cfg.n;
        Ok(SymmetricClosed {
            rng: cfg.rng(),
            cfg,
            u_re: vec![0.0; n],
            u_im: vec![0.0; n],
            v_re: vec![0.0; n],
            v_im: vec![0.0; n],
            resamples: 0,
        })
    }

    /// Number of degenerate frames redrawn so far.
    pub fn resamples(&self) -> u64 {
        self.resamples
    }

    pub fn sample_closed(&mut self) -> ClosedPolygon {
        match self.cfg.dim {
            Dim::Three => self.sample_space(),
            Dim::Two => self.sample_plane(),
        }
    }

    fn sample_space(&mut self) -> ClosedPolygon {
        let n = self.cfg.n;
        loop {
            for i in 0..n {
                self.u_re[i] = normal(&mut self.rng);
                self.u_im[i] = normal(&mut self.rng);
                self.v_re[i] = normal(&mut self.rng);
                self.v_im[i] = normal(&mut self.rng);
            }
            if hermitian_frame(&mut self.u_re, &mut self.u_im, &mut self.v_re, &mut self.v_im) {
                break;
            }
            self.resamples += 1;
        }
        // q_i = u_i + v_i j; Hopf(a + bj) = (|a|^2 - |b|^2, 2 Im(a conj b), 2 Re(a conj b))
        let edges = (0..n)
            .map(|i| {
                let q = Quaternion::new(self.u_re[i], self.u_im[i], self.v_re[i], self.v_im[i]);
                hopf_map(q)
            })
            .collect();
        ClosedPolygon::new_unchecked(Dim::Three, edges)
    }

    fn sample_plane(&mut self) -> ClosedPolygon {
        let n = self.cfg.n;
        loop {
            for i in 0..n {
                self.u_re[i] = normal(&mut self.rng);
                self.v_re[i] = normal(&mut self.rng);
            }
            if real_frame(&mut self.u_re, &mut self.v_re) {
                break;
            }
            self.resamples += 1;
        }
        let c = coin_component(&mut self.rng);
        let edges = (0..n).map(|i| hopf_planar_edge(self.u_re[i], self.v_re[i], c)).collect();
        ClosedPolygon::new_unchecked(Dim::Two, edges)
    }
}

impl Sampler for SymmetricClosed {
    fn sample(&mut self) -> Polygon {
        self.sample_closed().into()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn scale(a: &mut [f64], s: f64) {
    a.iter_mut().for_each(|x| *x *= s);
}

/// Modified Gram-Schmidt with one reorthogonalization pass on complex
/// vectors stored as split real/imaginary parts. Returns `false` when the
/// second vector is numerically dependent on the first.
fn hermitian_frame(ur: &mut [f64], ui: &mut [f64], vr: &mut [f64], vi: &mut [f64]) -> bool {
    let un = (dot(ur, ur) + dot(ui, ui)).sqrt();
    let raw_v = (dot(vr, vr) + dot(vi, vi)).sqrt();
    if un == 0.0 || raw_v == 0.0 {
        return false;
    }
    scale(ur, 1.0 / un);
    scale(ui, 1.0 / un);
    for _ in 0..2 {
        // c = <u, v> = sum conj(u_i) v_i
        let c_re = dot(ur, vr) + dot(ui, vi);
        let c_im = dot(ur, vi) - dot(ui, vr);
        for i in 0..ur.len() {
            vr[i] -= c_re * ur[i] - c_im * ui[i];
            vi[i] -= c_re * ui[i] + c_im * ur[i];
        }
    }
    let vn = (dot(vr, vr) + dot(vi, vi)).sqrt();
    if vn < DEGENERATE_FRAME * raw_v {
        return false;
    }
    scale(vr, 1.0 / vn);
    scale(vi, 1.0 / vn);
    true
}

fn real_frame(u: &mut [f64], v: &mut [f64]) -> bool {
    let un = dot(u, u).sqrt();
    let raw_v = dot(v, v).sqrt();
    if un == 0.0 || raw_v == 0.0 {
        return false;
    }
    scale(u, 1.0 / un);
    for _ in 0..2 {
        let c = dot(u, v);
        v.iter_mut().zip(u.iter()).for_each(|(x, y)| *x -= c * y);
    }
    let vn = dot(v, v).sqrt();
    if vn < DEGENERATE_FRAME * raw_v {
        return false;
    }
    scale(v, 1.0 / vn);
    true
}

/// Closed polygons under the Hopf-Gaussian measure: a symmetric-measure
/// polygon scaled to an independent chi-squared total length.
///
/// Conditioning the Gaussian on the codimension-`d` closure constraint
/// removes `2d` degrees of freedom from the length law, leaving
/// `chi2(4n - 6)` in space and `chi2(2n - 4)` in the plane.
#[derive(Debug, Clone)]
pub struct HopfGaussianClosed {
    shape: SymmetricClosed,
    length: ChiSquared<f64>,
}

impl HopfGaussianClosed {
    pub fn new(cfg: SamplerConfig) -> Result<Self> {
        let dof = closed_length_dof(cfg.dim, cfg.n)?;
        Ok(HopfGaussianClosed {
            shape: SymmetricClosed::new(cfg)?,
            length: ChiSquared::new(dof).expect("positive dof"),
        })
    }

    pub fn sample_closed(&mut self) -> ClosedPolygon {
        let p = self.shape.sample_closed();
        let len = self.length.sample(&mut self.shape.rng);
        p.scaled(len / 2.0)
    }
}

impl Sampler for HopfGaussianClosed {
    fn sample(&mut self) -> Polygon {
        self.sample_closed().into()
    }
}

/// Degrees of freedom of the total-length law of closed Hopf-Gaussian
/// polygons.
pub fn closed_length_dof(dim: Dim, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Argument(format!("closed polygons need n >= 3, got {n}")));
    }
    Ok(match dim {
        Dim::Three => (4 * n - 6) as f64,
        Dim::Two => (2 * n - 4) as f64,
    })
}

/// Arms with iid edges: a uniform direction scaled by a radius drawn from
/// a [`RadialDensity`].
#[derive(Debug, Clone)]
pub struct GeneratedArm {
    cfg: SamplerConfig,
    law: RadialDensity,
    rng: PolyRng,
}

impl GeneratedArm {
    pub fn new(cfg: SamplerConfig, law: RadialDensity) -> Result<Self> {
        cfg.require_arm()?;
        law.validate()?;
        Ok(GeneratedArm { rng: cfg.rng(), cfg, law })
    }

    pub fn sample_arm(&mut self) -> PolygonArm {
        let rng = &mut self.rng;
        let law = self.law;
        let edges = (0..self.cfg.n)
            .map(|_| {
                let r = law.sample_radius(rng);
                let dir = match self.cfg.dim {
                    Dim::Three => Vec3::from(UnitSphere.sample(rng)),
                    Dim::Two => {
                        let [x, y]: [f64; 2] = UnitCircle.sample(rng);
                        Vec3::planar(x, y)
                    }
                };
                dir * r
            })
            .collect();
        PolygonArm::new(self.cfg.dim, edges).expect("finite edges")
    }
}

impl Sampler for GeneratedArm {
    fn sample(&mut self) -> Polygon {
        self.sample_arm().into()
    }
}

/// Runtime-selectable measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    HopfGaussianArm,
    HopfGaussianClosed,
    SymmetricClosed,
    /// Crankshaft chain on closed equilateral polygons. `None` selects the
    /// defaults: thinning `n` moves, burn-in `10 n` moves.
    EquilateralMcmc { thinning: Option<u64>, burn_in: Option<u64> },
    Radial(RadialDensity),
}

impl Measure {
    /// Parses the command-line spelling: `hopf-gaussian-arm`,
    /// `hopf-gaussian-closed`, `symmetric-closed`, `equilateral-mcmc`,
    /// `radial:<law>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hopf-gaussian-arm" => Ok(Measure::HopfGaussianArm),
            "hopf-gaussian-closed" => Ok(Measure::HopfGaussianClosed),
            "symmetric-closed" => Ok(Measure::SymmetricClosed),
            "equilateral-mcmc" => Ok(Measure::EquilateralMcmc { thinning: None, burn_in: None }),
            other => match other.strip_prefix("radial:") {
                Some(law) => Ok(Measure::Radial(RadialDensity::parse(law)?)),
                None => Err(Error::Argument(format!("unknown measure `{s}`"))),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            Measure::HopfGaussianArm => "hopf-gaussian-arm".into(),
            Measure::HopfGaussianClosed => "hopf-gaussian-closed".into(),
            Measure::SymmetricClosed => "symmetric-closed".into(),
            Measure::EquilateralMcmc { .. } => "equilateral-mcmc".into(),
            Measure::Radial(law) => format!("radial:{}", law.label()),
        }
    }

    /// Whether successive samples from one stream are correlated.
    pub fn is_markov(&self) -> bool {
        matches!(self, Measure::EquilateralMcmc { .. })
    }

    pub fn is_closed(&self) -> bool {
        matches!(
            self,
            Measure::HopfGaussianClosed | Measure::SymmetricClosed | Measure::EquilateralMcmc { .. }
        )
    }

    pub fn build(&self, cfg: SamplerConfig) -> Result<AnySampler> {
        Ok(match *self {
            Measure::HopfGaussianArm => AnySampler::HopfArm(HopfGaussianArm::new(cfg)?),
            Measure::HopfGaussianClosed => AnySampler::HopfClosed(HopfGaussianClosed::new(cfg)?),
            Measure::SymmetricClosed => AnySampler::Symmetric(SymmetricClosed::new(cfg)?),
            Measure::EquilateralMcmc { thinning, burn_in } => {
                if cfg.dim != Dim::Three {
                    return Err(Error::UnsupportedDimension {
                        expected: 3,
                        found: cfg.dim.as_usize(),
                    });
                }
                let n = cfg.n as u64;
                AnySampler::Mcmc(Box::new(EquilateralMcmc::new(
                    cfg,
                    thinning.unwrap_or(n),
                    burn_in.unwrap_or(10 * n),
                )?))
            }
            Measure::Radial(law) => AnySampler::Generated(GeneratedArm::new(cfg, law)?),
        })
    }
}

/// Enum dispatch over the concrete samplers.
#[derive(Debug, Clone)]
pub enum AnySampler {
    HopfArm(HopfGaussianArm),
    HopfClosed(HopfGaussianClosed),
    Symmetric(SymmetricClosed),
    Mcmc(Box<EquilateralMcmc>),
    Generated(GeneratedArm),
}

impl Sampler for AnySampler {
    fn sample(&mut self) -> Polygon {
        match self {
            AnySampler::HopfArm(s) => s.sample(),
            AnySampler::HopfClosed(s) => s.sample(),
            AnySampler::Symmetric(s) => s.sample(),
            AnySampler::Mcmc(s) => s.sample(),
            AnySampler::Generated(s) => s.sample(),
        }
    }
}

#[cfg(test)]
mod tests;
