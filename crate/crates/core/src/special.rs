//! Special functions restricted to the orders and arguments this crate needs:
//! log-gamma with exact half-integer tables, and modified Bessel functions of
//! the second kind at half-integer order via Watson's finite sum.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;

/// Largest argument covered by the half-integer table.
const TABLE_MAX: usize = 512;

// lnΓ(k/2) for k = 1..=2*TABLE_MAX; index 0 unused.
#[allow(clippy::needless_range_loop)]
fn half_int_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![f64::NAN; 2 * TABLE_MAX + 1];
        // Γ(1/2) = sqrt(pi), Γ(1) = 1, then Γ(x + 1) = x Γ(x) while it fits.
        let mut g_half = PI.sqrt();
        let mut g_int = 1.0f64;
        t[1] = g_half.ln();
        t[2] = 0.0;
        for k in 3..=2 * TABLE_MAX {
            let x = k as f64 / 2.0;
            let prev = x - 1.0;
            if k % 2 == 1 {
                g_half *= prev;
                t[k] = if g_half.is_finite() { g_half.ln() } else { stirling(x) };
            } else {
                g_int *= prev;
                t[k] = if g_int.is_finite() { g_int.ln() } else { stirling(x) };
            }
        }
        t
    })
}

/// Stirling series for lnΓ, accurate to full double precision for x >= 20.
fn stirling(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    let series = r
        * (1.0 / 12.0
            - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

/// Natural log of the gamma function for `x > 0`.
///
/// Integer and half-integer arguments up to 512 come from an exact product
/// table; other arguments use the Stirling series after upward recurrence.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    let twice = 2.0 * x;
    if twice == twice.round() && twice <= (2 * TABLE_MAX) as f64 {
        return half_int_table()[twice as usize];
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 20.0 {
        shift += y.ln();
        y += 1.0;
    }
    stirling(y) - shift
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

pub fn beta(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

/// Accumulates a sum of positive terms whose magnitudes may exceed the
/// double range, tracking an external log scale.
#[derive(Debug, Clone, Copy)]
struct ScaledSum {
    sum: f64,
    comp: f64,
    ln_scale: f64,
}

const RESCALE_AT: f64 = 1e280;
const LN_RESCALE: f64 = 280.0 * std::f64::consts::LN_10;

impl ScaledSum {
    fn new() -> Self {
        ScaledSum { sum: 0.0, comp: 0.0, ln_scale: 0.0 }
    }

    /// Adds `term` (in current scaled units), returning the possibly
    /// rescaled term so the caller's recurrence stays in the same units.
    #[inline]
    fn push(&mut self, mut term: f64) -> f64 {
        if term > RESCALE_AT {
            term /= RESCALE_AT;
            self.sum /= RESCALE_AT;
            self.comp /= RESCALE_AT;
            self.ln_scale += LN_RESCALE;
        }
        // Neumaier compensated addition
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
        term
    }

    fn ln(&self) -> f64 {
        (self.sum + self.comp).ln() + self.ln_scale
    }
}

/// Order `nu = m + 1/2` of a half-integer Bessel function, `m >= -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfIntOrder(i64);

impl HalfIntOrder {
    pub fn new(m: i64) -> Result<Self> {
        if m < -1 {
            return Err(Error::Argument(format!("half-integer order index must be >= -1, got {m}")));
        }
        Ok(HalfIntOrder(m))
    }

    /// The order `nu = m + 1/2` with `m = nu - 1/2`.
    pub fn from_nu(nu: f64) -> Result<Self> {
        let m = nu - 0.5;
        if m != m.round() {
            return Err(Error::Argument(format!("{nu} is not a half-integer")));
        }
        Self::new(m as i64)
    }

    pub fn m(self) -> i64 {
        self.0
    }

    pub fn nu(self) -> f64 {
        self.0 as f64 + 0.5
    }

    /// Index of `|nu| - 1/2`, using `K_{-nu} = K_nu`.
    fn abs_index(self) -> u64 {
        if self.0 < 0 {
            0
        } else {
            self.0 as u64
        }
    }
}

/// `ln K_{m+1/2}(z)` from Watson's finite sum
/// `K_{m+1/2}(z) = sqrt(pi/2z) e^{-z} sum_{i=0}^{m} (m+i)! / (i! (m-i)! (2z)^i)`.
pub fn ln_bessel_k_half(order: HalfIntOrder, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Bessel K needs a positive finite argument, got {z}")));
    }
    let m = order.abs_index();
    let two_z = 2.0 * z;
    let mut acc = ScaledSum::new();
    let mut term = acc.push(1.0);
    for i in 0..m {
        let fi = i as f64;
        let fm = m as f64;
        term *= (fm + fi + 1.0) * (fm - fi) / ((fi + 1.0) * two_z);
        term = acc.push(term);
    }
    Ok(0.5 * (PI / two_z).ln() - z + acc.ln())
}

pub fn bessel_k_half(order: HalfIntOrder, z: f64) -> Result<f64> {
    ln_bessel_k_half(order, z).map(f64::exp)
}

/// `ln P_m(r)` for the Bessel polynomial
/// `P_m(r) = sum_{j=0}^{m} (2m-j)! / ((m-j)! j!) r^j`, `r >= 0`.
///
/// It satisfies `r^{m+1/2} K_{m+1/2}(r/2) = sqrt(pi) e^{-r/2} P_m(r)`, which is
/// finite at `r = 0` where the Bessel factor alone has a pole.
pub fn ln_bessel_poly(m: u64, r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    let fm = m as f64;
    let ln_a0 = ln_gamma(2.0 * fm + 1.0) - ln_gamma(fm + 1.0);
    let mut acc = ScaledSum::new();
    let mut term = acc.push(1.0);
    if r > 0.0 {
        for j in 0..m {
            let fj = j as f64;
            term *= r * (fm - fj) / ((2.0 * fm - fj) * (fj + 1.0));
            if term == 0.0 {
                break;
            }
            term = acc.push(term);
        }
    }
    ln_a0 + acc.ln()
}

/// `ln( r^{m+1/2} K_{m+1/2}(r/2) )` for `r >= 0`, finite at the origin.
pub fn ln_reduced_bessel(m: u64, r: f64) -> f64 {
    LN_SQRT_PI - 0.5 * r + ln_bessel_poly(m, r)
}
