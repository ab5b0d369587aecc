//! Crankshaft Markov chain on closed equilateral polygons in space.

use std::f64::consts::TAU;

use rand::Rng;

use super::{PolyRng, Sampler, SamplerConfig};
use crate::error::{Error, Result};
use crate::geom::{turning_angle, ClosedPolygon, Dim, Polygon, Vec3};

/// Axis length below which a proposed crankshaft is skipped.
const MIN_AXIS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McmcStats {
    pub moves: u64,
    /// Moves skipped because the rotation axis was degenerate.
    pub skipped: u64,
}

/// Crankshaft chain: pick two vertices splitting the polygon into arcs of at
/// least two edges each and spin the shorter arc about the chord joining
/// them by a uniform angle. Each move fixes closure and edge lengths, is
/// reversible, and leaves the standard measure on equilateral polygons
/// invariant.
///
/// The chain starts at the regular planar `n`-gon. The total curvature of
/// the current state is tracked incrementally, since a move only changes the
/// turning angles at its two hinges.
#[derive(Debug, Clone)]
pub struct EquilateralMcmc {
    n: usize,
    edges: Vec<Vec3>,
    angles: Vec<f64>,
    curvature: f64,
    rng: PolyRng,
    thinning: u64,
    stats: McmcStats,
}

impl EquilateralMcmc {
    pub fn new(cfg: SamplerConfig, thinning: u64, burn_in: u64) -> Result<Self> {
        if cfg.dim != Dim::Three {
            return Err(Error::UnsupportedDimension { expected: 3, found: cfg.dim.as_usize() });
        }
        if cfg.n < 4 {
            return Err(Error::Argument(format!(
                "the crankshaft chain needs n >= 4, got {}",
                cfg.n
            )));
        }
        if thinning == 0 {
            return Err(Error::Argument("thinning must be at least 1".into()));
        }
        let n = cfg.n;
        let edges: Vec<Vec3> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                Vec3::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
        let mut chain = EquilateralMcmc {
            n,
            angles: vec![0.0; n],
            curvature: 0.0,
            edges,
            rng: cfg.rng(),
            thinning,
            stats: McmcStats::default(),
        };
        chain.refresh_curvature();
        for _ in 0..burn_in {
            chain.step();
        }
        Ok(chain)
    }

    pub fn stats(&self) -> McmcStats {
        self.stats
    }

    pub fn thinning(&self) -> u64 {
        self.thinning
    }

    pub fn edges(&self) -> &[Vec3] {
        &self.edges
    }

    /// Total curvature of the current state.
    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    fn angle_at(&self, v: usize) -> f64 {
        let prev = self.edges[(v + self.n - 1) % self.n];
        turning_angle(prev, self.edges[v]).expect("unit edges")
    }

    fn refresh_curvature(&mut self) {
        for v in 0..self.n {
            self.angles[v] = self.angle_at(v);
        }
        self.curvature = self.angles.iter().sum();
    }

    /// One crankshaft proposal.
    pub fn step(&mut self) {
        let n = self.n;
        let start = self.rng.random_range(0..n);
        let len = self.rng.random_range(2..=n - 2);
        let phi = self.rng.random_range(0.0..TAU);
        self.stats.moves += 1;

        // rotating the complementary arc about the reversed chord gives the
        // same shape up to a rigid motion, so always spin the shorter arc
        let (start, len) = if 2 * len > n { ((start + len) % n, n - len) } else { (start, len) };

        let mut axis = Vec3::ZERO;
        for i in 0..len {
            axis += self.edges[(start + i) % n];
        }
        let norm = axis.norm();
        if norm < MIN_AXIS {
            self.stats.skipped += 1;
            return;
        }
        let k = axis * (1.0 / norm);
        let rot = rodrigues(k, phi);
        for i in 0..len {
            let j = (start + i) % n;
            let e = mat_vec(&rot, self.edges[j]);
            self.edges[j] = e * (1.0 / e.norm());
        }

        let end = (start + len) % n;
        for v in [start, end] {
            let a = self.angle_at(v);
            self.curvature += a - self.angles[v];
            self.angles[v] = a;
        }
        if self.stats.moves.is_multiple_of(n as u64 * 64) {
            self.refresh_curvature();
        }
    }

    pub fn sample_closed(&mut self) -> ClosedPolygon {
        for _ in 0..self.thinning {
            self.step();
        }
        ClosedPolygon::new_unchecked(Dim::Three, self.edges.clone())
    }
}

impl Sampler for EquilateralMcmc {
    fn sample(&mut self) -> Polygon {
        self.sample_closed().into()
    }
}

fn rodrigues(k: Vec3, phi: f64) -> [[f64; 3]; 3] {
    let (s, c) = phi.sin_cos();
    let t = 1.0 - c;
    [
        [c + t * k.x * k.x, t * k.x * k.y - s * k.z, t * k.x * k.z + s * k.y],
        [t * k.x * k.y + s * k.z, c + t * k.y * k.y, t * k.y * k.z - s * k.x],
        [t * k.x * k.z - s * k.y, t * k.y * k.z + s * k.x, c + t * k.z * k.z],
    ]
}

#[inline]
fn mat_vec(m: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    Vec3::new(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )
}
