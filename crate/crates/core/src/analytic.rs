//! Closed-form densities and expectations for Hopf-Gaussian polygons.
//!
//! Everything that involves a ratio of gamma functions is assembled in log
//! space and exponentiated last, so the evaluators stay finite well past the
//! point where `Γ(2n - 4)` overflows.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::special::{ln_beta, ln_gamma, ln_reduced_bessel};

pub use crate::special::{bessel_k_half, HalfIntOrder};

const LN_PI: f64 = 1.144_729_885_849_400_2;

fn check_finite_nonneg(r: f64, what: &str) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("{what} must be finite and non-negative, got {r}")));
    }
    Ok(())
}

/// Density of the sum of `k` independent Hopf-Gaussian edges, as a function
/// of the distance `r` from the origin (density with respect to volume).
///
/// `k = 1` has a pole at the origin and returns infinity there; for `k >= 2`
/// the value at the origin is taken from the polynomial form.
pub fn green_function(k: u32, r: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Argument("green_function needs k >= 1".into()));
    }
    check_finite_nonneg(r, "radius")?;
    if k == 1 {
        if r == 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok((-0.5 * r).exp() / (16.0 * PI * r));
    }
    let kf = k as f64;
    let ln_pref = -(2.0 * kf + 2.0) * LN_2 - 1.5 * LN_PI - ln_gamma(kf);
    Ok((ln_pref + ln_reduced_bessel(k as u64 - 2, r)).exp())
}

fn ln_hausdorff_constant(n: u32) -> f64 {
    let nf = n as f64;
    ln_gamma(nf - 1.5) - 6.0 * LN_2 - 1.5 * LN_PI - ln_gamma(nf)
}

/// Density of the closure condition at the origin: the normalizing constant
/// relating the closed-polygon measure to the arm measure.
pub fn hausdorff_constant(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Argument(format!("hausdorff_constant needs n >= 2, got {n}")));
    }
    Ok(ln_hausdorff_constant(n).exp())
}

/// A point in the domain of the two-edge density, either as edge lengths
/// and the angle between the edges, or as half-sum, half-difference and
/// length of the resultant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairPoint {
    Edges { r1: f64, r2: f64, theta: f64 },
    Sum { x: f64, y: f64, z: f64 },
}

impl PairPoint {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PairPoint::Edges { r1, r2, theta } => {
                if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
                    return Err(Error::Domain(format!("edge lengths must be positive: {r1}, {r2}")));
                }
                if !(0.0..=PI).contains(&theta) {
                    return Err(Error::Domain(format!("angle {theta} outside [0, pi]")));
                }
            }
            PairPoint::Sum { x, y, z } => {
                if !(z > 0.0 && z.is_finite() && x.is_finite()) || x < 0.5 * z || y.abs() > 0.5 * z {
                    return Err(Error::Domain(format!(
                        "(x, y, z) = ({x}, {y}, {z}) violates z > 0, x >= z/2, |y| <= z/2"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Converts to `(x, y, z)` form.
    pub fn to_sum(&self) -> PairPoint {
        match *self {
            PairPoint::Edges { r1, r2, theta } => PairPoint::Sum {
                x: 0.5 * (r1 + r2),
                y: 0.5 * (r1 - r2),
                z: resultant(r1, r2, theta),
            },
            p => p,
        }
    }

    /// Converts to `(r1, r2, theta)` form; `None` if the point is not
    /// realizable by two edges.
    pub fn to_edges(&self) -> Option<PairPoint> {
        match *self {
            PairPoint::Sum { x, y, z } => {
                let (r1, r2) = (x + y, x - y);
                if !(r1 > 0.0 && r2 > 0.0) {
                    return None;
                }
                let c = ((z * z - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)).clamp(-1.0, 1.0);
                Some(PairPoint::Edges { r1, r2, theta: c.acos() })
            }
            p => Some(p),
        }
    }

    /// `|d(x, y, z) / d(r1, r2, theta)|` at this point.
    pub fn jacobian(&self) -> f64 {
        match self.to_edges() {
            Some(PairPoint::Edges { r1, r2, theta }) => {
                r1 * r2 * theta.sin() / (2.0 * resultant(r1, r2, theta))
            }
            _ => f64::NAN,
        }
    }
}

fn resultant(r1: f64, r2: f64, theta: f64) -> f64 {
    (r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * theta.cos()).max(0.0).sqrt()
}

/// Per-`n` constants for closed Hopf-Gaussian polygons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticContext {
    n: u32,
    ln_c_n: f64,
    ln_single: f64,
    ln_pair: Option<f64>,
}

impl AnalyticContext {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::Argument(format!("closed polygons need n >= 3, got {n}")));
        }
        let nf = n as f64;
        let ln_single = (nf - 1.0).ln() - (2.0 * nf - 2.0) * LN_2 - LN_PI - ln_gamma(nf - 1.5);
        let ln_pair = (n >= 4)
            .then(|| ln_gamma(nf) - LN_2 - 0.5 * LN_PI - ln_gamma(2.0 * nf - 4.0));
        Ok(AnalyticContext { n, ln_c_n: ln_hausdorff_constant(n), ln_single, ln_pair })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn hausdorff_constant(&self) -> f64 {
        self.ln_c_n.exp()
    }

    /// Log of the prefactor `Γ(n) / (2 sqrt(pi) Γ(2n - 4))` of the two-edge
    /// density.
    pub fn ln_pair_constant(&self) -> Result<f64> {
        self.ln_pair.ok_or_else(|| {
            Error::Argument(format!("the two-edge density needs n >= 4, got {}", self.n))
        })
    }

    /// Density of one edge of a closed polygon with respect to volume.
    pub fn single_edge_pdf(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("edge length must be positive, got {r}")));
        }
        let ln = self.ln_single - 0.5 * r - r.ln() + ln_reduced_bessel(self.n as u64 - 3, r);
        Ok(ln.exp())
    }

    /// Density of two adjacent edges in `(r1, r2, theta)` coordinates,
    /// including the `sin theta` area factor. Sum-form points are converted.
    pub fn pairwise_pdf(&self, pt: PairPoint) -> Result<f64> {
        let ln_c = self.ln_pair_constant()?;
        pt.validate()?;
        let Some(PairPoint::Edges { r1, r2, theta }) = pt.to_edges() else {
            return Err(Error::Domain(format!("{pt:?} is not realizable by two edges")));
        };
        let z = resultant(r1, r2, theta);
        let s = theta.sin();
        if s == 0.0 {
            return Ok(0.0);
        }
        let ln = ln_c - LN_2 + r1.ln() + r2.ln() - 0.5 * (r1 + r2)
            + s.ln()
            + ln_reduced_bessel(self.n as u64 - 4, z);
        Ok(ln.exp())
    }

    /// Density of two adjacent edges with respect to `dx dy dz`; it does not
    /// depend on `y`.
    pub fn pairwise_pdf_xyz(&self, pt: PairPoint) -> Result<f64> {
        let ln_c = self.ln_pair_constant()?;
        let pt = pt.to_sum();
        pt.validate()?;
        let PairPoint::Sum { x, z, .. } = pt else { unreachable!() };
        Ok(self.pair_profile(ln_c, x, z))
    }

    #[inline]
    fn pair_profile(&self, ln_c: f64, x: f64, z: f64) -> f64 {
        (ln_c - x + z.ln() + ln_reduced_bessel(self.n as u64 - 4, z)).exp()
    }

    /// `z`-dependent factor of the two-edge density after the `x` and `y`
    /// integrations that do not involve the integrand:
    /// `c z^2 e^{-z/2} R(z)`, where `R(z) = z^{n-7/2} K_{n-7/2}(z/2)`.
    pub fn pair_radial_weight(&self, z: f64) -> Result<f64> {
        let ln_c = self.ln_pair_constant()?;
        if !(z > 0.0) {
            return Ok(0.0);
        }
        Ok((ln_c + 2.0 * z.ln() - 0.5 * z + ln_reduced_bessel(self.n as u64 - 4, z)).exp())
    }
}

/// Expected turning angle at a vertex of a closed polygon under the
/// symmetric measure: `pi (n - 1) / (2n - 3)`.
pub fn exact_expected_turning_angle(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::Argument(format!("closed polygons need n >= 3, got {n}")));
    }
    let nf = n as f64;
    Ok(PI * (nf - 1.0) / (2.0 * nf - 3.0))
}

/// Expected total curvature of a closed polygon under the symmetric measure:
/// `pi n / 2 + (pi / 4) 2n / (2n - 3)`.
pub fn exact_expected_total_curvature(n: u32) -> Result<f64> {
    Ok(n as f64 * exact_expected_turning_angle(n)?)
}

/// Limit of `E(kappa) - pi n / 2` for closed polygons in dimension `d` whose
/// edge lengths have first and second moments `m1`, `m2`.
pub fn asymptotic_surplus(d: u32, m1: f64, m2: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Argument(format!("dimension must be at least 2, got {d}")));
    }
    if !(m1 > 0.0 && m2 > 0.0 && m1.is_finite() && m2.is_finite()) {
        return Err(Error::Argument(format!("moments must be positive: m1 = {m1}, m2 = {m2}")));
    }
    if m1 * m1 > m2 * (1.0 + 1e-12) {
        return Err(Error::Argument(format!("m1^2 = {} exceeds m2 = {m2}", m1 * m1)));
    }
    let df = d as f64;
    let ratio = (ln_beta(df / 2.0, df / 2.0) - ln_beta((df - 1.0) / 2.0, (df + 1.0) / 2.0)).exp();
    Ok(df / (df - 1.0) * ratio * m1 * m1 / m2)
}

/// `p`-th moment of edge length for arms: `2^p p!` in the plane and
/// `2^p (p+1)!` in space.
pub fn arm_edge_moment(d: usize, p: u32) -> Result<f64> {
    let top = match d {
        2 => p,
        3 => p + 1,
        _ => return Err(Error::UnsupportedDimension { expected: 3, found: d }),
    };
    let fact: f64 = (1..=top).map(f64::from).product();
    Ok(2f64.powi(p as i32) * fact)
}

/// Exact moments of closed Hopf-Gaussian polygons in space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedPolygonExpectations {
    n: u32,
}

pub fn closed_polygon_expectations(n: u32) -> Result<ClosedPolygonExpectations> {
    if n < 4 {
        return Err(Error::Argument(format!("closed-polygon expectations need n >= 4, got {n}")));
    }
    Ok(ClosedPolygonExpectations { n })
}

impl ClosedPolygonExpectations {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `E|e|^p = (n-1) Γ(2n+p-3) / (2 Γ(2n-4)) B(p+2, n-2)` for real `p > -2`.
    pub fn edge_moment(&self, p: f64) -> Result<f64> {
        if !(p > -2.0) {
            return Err(Error::Argument(format!("edge moment needs p > -2, got {p}")));
        }
        let nf = self.n as f64;
        let ln = (nf - 1.0).ln() + ln_gamma(2.0 * nf + p - 3.0)
            - LN_2
            - ln_gamma(2.0 * nf - 4.0)
            + ln_beta(p + 2.0, nf - 2.0);
        Ok(ln.exp())
    }

    /// Mean squared distance between vertices `k` steps apart.
    pub fn chord(&self, k: u32) -> Result<f64> {
        let n = self.n;
        if k == 0 || k >= n {
            return Err(Error::Argument(format!("chord skip must be in 1..={}, got {k}", n - 1)));
        }
        let (nf, kf) = (n as f64, k as f64);
        Ok((nf - kf) / nf * 12.0 * kf * (2.0 * nf - 3.0) / (nf + 1.0))
    }

    /// Mean squared radius of gyration of the vertex set.
    pub fn gyradius(&self) -> f64 {
        let nf = self.n as f64;
        (nf - 1.0) / nf * (2.0 * nf - 3.0)
    }
}

/// Lower bound on the fraction of closed `n`-gons (symmetric measure) with
/// bridge index below `bridge`, from Markov's inequality on total curvature.
pub fn unknot_fraction_bound(n: u32, bridge: u32) -> Result<f64> {
    if n < 3 || bridge < 2 {
        return Err(Error::Argument(format!("need n >= 3 and bridge >= 2, got {n}, {bridge}")));
    }
    let (nf, b) = (n as f64, bridge as f64);
    let x = (nf - 2.0) * (nf - 3.0) / ((b - 1.0) * 2.0 * (2.0 * nf - 3.0));
    Ok((1.0 - x).max(0.0))
}

/// Density of one coordinate of a sum of `k` Hopf-Gaussian edges.
pub fn projection_pdf(k: u32, y: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Argument("projection_pdf needs k >= 1".into()));
    }
    if !y.is_finite() {
        return Err(Error::Domain(format!("coordinate must be finite, got {y}")));
    }
    let kf = k as f64;
    let ln = ln_reduced_bessel(k as u64 - 1, y.abs()) - 2.0 * kf * LN_2 - 0.5 * LN_PI - ln_gamma(kf);
    Ok(ln.exp())
}
