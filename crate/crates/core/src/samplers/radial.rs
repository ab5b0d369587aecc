use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// A spherically symmetric edge law, described by its edgelength
/// distribution `f(r)` on `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialDensity {
    /// Every edge has length `r` (equilateral polygons).
    PointMass(f64),
    /// Chi-squared edgelength with the given degrees of freedom. Four degrees
    /// of freedom reproduces the spatial Hopf-Gaussian edge law, two the
    /// planar one.
    ChiSquared(f64),
    /// Edges are isotropic Gaussian vectors in R^3 with per-coordinate
    /// standard deviation `sigma`, so lengths follow a Maxwell law.
    Maxwell(f64),
}

impl RadialDensity {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialDensity::PointMass(r) => r > 0.0 && r.is_finite(),
            RadialDensity::ChiSquared(k) => k > 0.0 && k.is_finite(),
            RadialDensity::Maxwell(s) => s > 0.0 && s.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!("invalid radial law parameters: {self:?}")))
        }
    }

    /// Parses `equilateral`, `chi2-<dof>` or `maxwell`.
    pub fn parse(name: &str) -> Result<Self> {
        let law = match name {
            "equilateral" => RadialDensity::PointMass(1.0),
            "maxwell" | "gaussian" => RadialDensity::Maxwell(1.0),
            "hopf" => RadialDensity::ChiSquared(4.0),
            other => {
                let dof = other
                    .strip_prefix("chi2-")
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Argument(format!("unknown radial law `{name}`")))?;
                RadialDensity::ChiSquared(dof)
            }
        };
        law.validate()?;
        Ok(law)
    }

    pub fn label(&self) -> String {
        match *self {
            RadialDensity::PointMass(1.0) => "equilateral".into(),
            RadialDensity::PointMass(r) => format!("point-mass-{r}"),
            RadialDensity::ChiSquared(k) => format!("chi2-{k}"),
            RadialDensity::Maxwell(1.0) => "maxwell".into(),
            RadialDensity::Maxwell(s) => format!("maxwell-{s}"),
        }
    }

    pub fn sample_radius<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RadialDensity::PointMass(r) => r,
            RadialDensity::ChiSquared(k) => ChiSquared::new(k).expect("validated dof").sample(rng),
            RadialDensity::Maxwell(s) => {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                let z: f64 = rng.sample(StandardNormal);
                s * (x * x + y * y + z * z).sqrt()
            }
        }
    }

    /// Edgelength moment `m_p = E(r^p)`.
    pub fn moment(&self, p: u32) -> f64 {
        let p = p as f64;
        match *self {
            RadialDensity::PointMass(r) => r.powf(p),
            RadialDensity::ChiSquared(k) => {
                (p * 2f64.ln() + ln_gamma(k / 2.0 + p) - ln_gamma(k / 2.0)).exp()
            }
            RadialDensity::Maxwell(s) => {
                (p * s.ln() + 0.5 * p * 2f64.ln() + ln_gamma(1.5 + 0.5 * p) - ln_gamma(1.5)).exp()
            }
        }
    }

    /// Edgelength density `f(r)`, when the law has one.
    pub fn density(&self, r: f64) -> Option<f64> {
        if r < 0.0 {
            return Some(0.0);
        }
        match *self {
            RadialDensity::PointMass(_) => None,
            RadialDensity::ChiSquared(k) => {
                let h = k / 2.0;
                if r == 0.0 {
                    return Some(if h < 1.0 { f64::INFINITY } else if h == 1.0 { 0.5 } else { 0.0 });
                }
                Some(((h - 1.0) * r.ln() - r / 2.0 - h * 2f64.ln() - ln_gamma(h)).exp())
            }
            RadialDensity::Maxwell(s) => {
                Some((2.0 / PI).sqrt() * r * r * (-r * r / (2.0 * s * s)).exp() / (s * s * s))
            }
        }
    }
}
