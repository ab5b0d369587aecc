//! Quaternion arithmetic and the coordinatewise Hopf map.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{Dim, PolygonArm, Vec3};

/// `q0 + q1 i + q2 j + q3 k`, Hamilton convention (`ij = k`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion { q0: 1.0, q1: 0.0, q2: 0.0, q3: 0.0 };

    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Quaternion { q0, q1, q2, q3 }
    }

    /// Pure imaginary quaternion `v.x i + v.y j + v.z k`.
    pub fn imaginary(v: Vec3) -> Self {
        Quaternion::new(0.0, v.x, v.y, v.z)
    }

    pub fn imaginary_part(self) -> Vec3 {
        Vec3::new(self.q1, self.q2, self.q3)
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    pub fn norm_sq(self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    pub fn normalized(self) -> Self {
        let s = 1.0 / self.norm_sq().sqrt();
        Quaternion::new(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a0, a1, a2, a3) = (self.q0, self.q1, self.q2, self.q3);
        let (b0, b1, b2, b3) = (o.q0, o.q1, o.q2, o.q3);
        Quaternion::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

/// A quaternion written as `a + b j` with `a, b` complex.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexPair {
    pub a: Complex64,
    pub b: Complex64,
}

impl ComplexPair {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        ComplexPair { a, b }
    }
}

impl From<ComplexPair> for Quaternion {
    // (a_re + a_im i) + (b_re + b_im i) j = a_re + a_im i + b_re j + b_im k
    fn from(p: ComplexPair) -> Self {
        Quaternion::new(p.a.re, p.a.im, p.b.re, p.b.im)
    }
}

impl From<Quaternion> for ComplexPair {
    fn from(q: Quaternion) -> Self {
        ComplexPair::new(Complex64::new(q.q0, q.q1), Complex64::new(q.q2, q.q3))
    }
}

/// `conj(q) i q` as a vector in R^3; its length is `|q|^2`.
#[inline]
pub fn hopf_map(q: Quaternion) -> Vec3 {
    let Quaternion { q0, q1, q2, q3 } = q;
    // Grouped as |a|^2 - |b|^2 so the complex form is bit-identical.
    Vec3::new(
        (q0 * q0 + q1 * q1) - (q2 * q2 + q3 * q3),
        2.0 * (q1 * q2 - q0 * q3),
        2.0 * (q0 * q2 + q1 * q3),
    )
}

/// `(|a|^2 - |b|^2, 2 Im(a conj b), 2 Re(a conj b))`.
#[inline]
pub fn hopf_map_complex(p: ComplexPair) -> Vec3 {
    let ab = p.a * p.b.conj();
    Vec3::new(p.a.norm_sqr() - p.b.norm_sqr(), 2.0 * ab.im, 2.0 * ab.re)
}

/// Which copy of the planar model space a planar quaternion comes from.
///
/// Both copies land in the `i`-`k` plane, which is identified with R^2 via
/// (first, third) coordinates of [`hopf_map`]. The second copy is the mirror
/// image of the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanarComponent {
    First,
    Second,
}

/// Planar edge of `z = x + y j`: `(x^2 - y^2, 2xy)` for the first component and
/// its reflection `(x^2 - y^2, -2xy)` for the second.
#[inline]
pub fn hopf_planar_edge(x: f64, y: f64, component: PlanarComponent) -> Vec3 {
    let re = x * x - y * y;
    let im = 2.0 * x * y;
    match component {
        PlanarComponent::First => Vec3::planar(re, im),
        PlanarComponent::Second => Vec3::planar(re, -im),
    }
}

/// Coordinatewise planar Hopf map of `z_i = x_i + y_i j`.
pub fn hopf_map_planar(x: &[f64], y: &[f64], component: PlanarComponent) -> Result<Vec<Vec3>> {
    if x.len() != y.len() {
        return Err(Error::Argument(format!(
            "planar Hopf map needs equal-length inputs, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter().zip(y).map(|(&a, &b)| hopf_planar_edge(a, b, component)).collect())
}

/// Applies [`hopf_map`] to each quaternion; the result has total length
/// `sum |q_i|^2`.
pub fn coordinatewise_hopf(qs: &[Quaternion]) -> Result<PolygonArm> {
    PolygonArm::new(Dim::Three, qs.iter().map(|&q| hopf_map(q)).collect())
}

/// The rotation of R^3 induced by a unit quaternion: `v -> Im(conj(w) v w)`.
/// Satisfies `hopf_map(q * w) == rotate(w, hopf_map(q))`.
pub fn rotate(w: Quaternion, v: Vec3) -> Vec3 {
    (w.conj() * Quaternion::imaginary(v) * w).imaginary_part()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn hopf_map_examples() {
        assert_eq!(hopf_map(Quaternion::ONE), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(hopf_map(Quaternion::new(0.0, 0.0, 1.0, 0.0)), Vec3::new(-1.0, 0.0, 0.0));
        let v = hopf_map(Quaternion::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(v, Vec3::new(0.0, 0.0, 4.0));
        assert_eq!(v.norm(), 4.0);
    }

    #[test]
    fn complex_form_examples() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(hopf_map_complex(ComplexPair::new(one, zero)), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(hopf_map_complex(ComplexPair::new(zero, one)), Vec3::new(-1.0, 0.0, 0.0));
        // a = 1+i, b = 1-i: a conj(b) = (1+i)^2 = 2i
        let p = ComplexPair::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0));
        assert_eq!(hopf_map_complex(p), Vec3::new(0.0, 4.0, 0.0));
        assert_eq!(hopf_map(p.into()), Vec3::new(0.0, 4.0, 0.0));
    }

    #[test]
    fn hopf_equals_conjugation_of_i() {
        let q = Quaternion::new(0.3, -1.2, 0.7, 2.1);
        let direct = (q.conj() * Quaternion::new(0.0, 1.0, 0.0, 0.0) * q).imaginary_part();
        assert!(close(direct, hopf_map(q), 1e-14));
    }

    #[test]
    fn hamilton_convention() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
        let k = Quaternion::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
    }

    #[test]
    fn planar_examples() {
        let e = hopf_map_planar(&[1.0], &[0.0], PlanarComponent::First).unwrap();
        assert_eq!(e[0], Vec3::planar(1.0, 0.0));
        // z = 1 + j has |z|^2 = 2
        let e = hopf_map_planar(&[1.0], &[1.0], PlanarComponent::First).unwrap();
        assert_eq!(e[0], Vec3::planar(0.0, 2.0));
        assert_eq!(e[0].norm(), 2.0);
        let e = hopf_map_planar(&[0.0], &[0.0], PlanarComponent::Second).unwrap();
        assert_eq!(e[0], Vec3::ZERO);
        assert!(hopf_map_planar(&[1.0, 2.0], &[1.0], PlanarComponent::First).is_err());
    }

    #[test]
    fn planar_first_component_matches_quaternion_map() {
        let (a, b) = (0.8, -1.3);
        let full = hopf_map(Quaternion::new(a, 0.0, b, 0.0));
        assert_eq!(full.y, 0.0);
        let planar = hopf_planar_edge(a, b, PlanarComponent::First);
        assert_eq!((planar.x, planar.y), (full.x, full.z));
    }

    #[test]
    fn coordinatewise_examples() {
        let arm = coordinatewise_hopf(&[Quaternion::ONE]).unwrap();
        assert_eq!(arm.into_edges(), vec![Vec3::new(1.0, 0.0, 0.0)]);
        assert!(coordinatewise_hopf(&[]).is_err());
        let n = 5;
        let s = (2.0 / n as f64).sqrt() / 2.0;
        let qs = vec![Quaternion::new(s, s, s, s); n];
        let arm = coordinatewise_hopf(&qs).unwrap();
        assert!((crate::geom::total_length(&arm) - 2.0).abs() < 1e-14);
    }
}
