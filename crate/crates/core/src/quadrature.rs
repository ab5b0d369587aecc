//! Adaptive Gauss-Kronrod quadrature and the reduced integrals of the
//! two-edge density.
//!
//! Semi-infinite integrals are truncated where a local exponential-decay
//! bound puts the tail below a small fraction of the absolute tolerance; the
//! tail bound is added to the reported error.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::analytic::AnalyticContext;
use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Where to cut a semi-infinite range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Search outward until the estimated tail is negligible.
    Auto,
    /// Integrate up to `lower + length`.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub truncation: Truncation,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            truncation: Truncation::Auto,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Argument(format!(
                "tolerances must be positive: rel {}, abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Argument("max_subdivisions must be positive".into()));
        }
        if let Truncation::Fixed(len) = self.truncation {
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::Argument(format!("truncation length must be positive, got {len}")));
            }
        }
        Ok(())
    }

    fn inner(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: (self.rel_tol * 1e-2).max(1e-14),
            abs_tol: self.abs_tol * 1e-2,
            truncation: Truncation::Auto,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    Panel { a, b, value, error }
}

/// Integrates `f` over the finite interval `[a, b]` by global adaptive
/// bisection of the panel with the largest error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Argument(format!("finite limits required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadratureResult { value: 0.0, error_bound: 0.0, evaluations: 0 });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut evaluations = 15;
    heap.push(first);
    let mut splits = 0;
    loop {
        if !value.is_finite() {
            return Err(Error::Domain(format!("integrand is not finite on [{a}, {b}]")));
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            break;
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::Convergence { estimate: value, error_bound: error, evaluations });
        }
        let worst = heap.pop().expect("heap holds every panel");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        evaluations += 30;
        splits += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // recompute from the panels to shed drift in the running totals
    let (value, error) =
        heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(QuadratureResult { value, error_bound: error, evaluations })
}

/// Finds a cut point `b > a` past which the integral of a non-negative,
/// eventually log-concave-decaying `f` is below `tail_tol`; returns the cut
/// and the tail bound `f(b) / rate`.
fn find_cut<F: FnMut(f64) -> f64>(f: &mut F, a: f64, tail_tol: f64) -> Result<(f64, f64, usize)> {
    const LIMIT: f64 = 1e5;
    let mut width = 1.0;
    let mut evals = 0;
    while width < LIMIT {
        let b = a + width;
        let (fb, fb1) = (f(b), f(b + 1.0));
        evals += 2;
        if fb == 0.0 {
            return Ok((b, 0.0, evals));
        }
        let rate = (fb / fb1).ln();
        if rate > 0.0 && rate.is_finite() {
            let tail = fb / rate;
            if tail < tail_tol {
                return Ok((b, tail, evals));
            }
        }
        width *= 1.5;
    }
    Err(Error::Convergence { estimate: f64::NAN, error_bound: f64::INFINITY, evaluations: evals })
}

/// Integrates a non-negative integrand over `[a, inf)` according to the
/// truncation policy in `spec`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    let (b, tail, cut_evals) = match spec.truncation {
        Truncation::Fixed(len) => (a + len, 0.0, 0),
        Truncation::Auto => find_cut(&mut f, a, 1e-2 * spec.abs_tol)?,
    };
    let mut r = integrate(f, a, b, spec)?;
    r.error_bound += tail;
    r.evaluations += cut_evals;
    Ok(r)
}

/// Measure used to integrate a spherically symmetric density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialWeight {
    /// Symmetric density on the line: `2 ∫_0^inf f`.
    Line,
    /// `∫_0^inf 2 pi r f(r) dr`.
    Plane,
    /// `∫_0^inf 4 pi r^2 f(r) dr`.
    Space,
}

impl RadialWeight {
    #[inline]
    pub fn weight(self, r: f64) -> f64 {
        match self {
            RadialWeight::Line => 2.0,
            RadialWeight::Plane => 2.0 * PI * r,
            RadialWeight::Space => 4.0 * PI * r * r,
        }
    }
}

/// Total mass of a radial density under the given weighting.
pub fn integrate_radial_density<F: FnMut(f64) -> f64>(
    mut density: F,
    weight: RadialWeight,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    integrate_semi_infinite(|r| weight.weight(r) * density(r), 0.0, spec)
}

/// Total mass of the two-edge density. The `y` integral contributes the
/// width `z` and the `x` integral `e^{-z/2}`; only the `z` integral is done
/// numerically.
pub fn integrate_pairwise_normalization(
    ctx: &AnalyticContext,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    ctx.ln_pair_constant()?;
    integrate_semi_infinite(|z| ctx.pair_radial_weight(z).unwrap_or(f64::NAN), 0.0, spec)
}

/// `4 pi ∫_0^inf e^{-s^2} s^2 / (sqrt(z + s^2) + s) ds`.
///
/// With `x = z/2 + s^2`, the bracket `pi z + pi sqrt(4x^2 - z^2) - 2 pi x`
/// left by the `y` integration of the turning angle becomes
/// `2 pi s z / (sqrt(z + s^2) + s)`, free of the square-root endpoint and of
/// cancellation, so the `x` integral is `z e^{-z/2}` times this function.
pub fn turning_angle_x_factor(z: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let mut r = integrate_semi_infinite(
        |s| {
            let s2 = s * s;
            (-s2).exp() * s2 / ((z + s2).sqrt() + s)
        },
        0.0,
        spec,
    )?;
    r.value *= 4.0 * PI;
    r.error_bound *= 4.0 * PI;
    Ok(r)
}

/// Expected turning angle of a closed polygon from the two-edge density,
/// integrating `y` in closed form, then `x`, then `z`.
pub fn expected_turning_angle_numeric(
    ctx: &AnalyticContext,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    ctx.ln_pair_constant()?;
    let inner = spec.inner();
    let mut inner_evals = 0;
    let mut inner_err: f64 = 0.0;
    let mut failure = None;
    let mut r = integrate_semi_infinite(
        |z| {
            if z <= 0.0 {
                return 0.0;
            }
            let w = ctx.pair_radial_weight(z).unwrap_or(f64::NAN);
            match turning_angle_x_factor(z, &inner) {
                Ok(h) => {
                    inner_evals += h.evaluations;
                    inner_err = inner_err.max(h.error_bound / h.value);
                    w * h.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        spec,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if let Ok(r) = r.as_mut() {
        r.evaluations += inner_evals;
        r.error_bound += inner_err * r.value.abs();
    }
    r
}

/// `p`-th moment of edge length from the single-edge density.
pub fn integrate_edge_moment(
    ctx: &AnalyticContext,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    integrate_radial_density(
        |r| r.powf(p) * ctx.single_edge_pdf(r).unwrap_or(f64::NAN),
        RadialWeight::Space,
        spec,
    )
}
