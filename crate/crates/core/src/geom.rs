//! Polygon representations and the geometric functionals measured on them.
//!
//! Polygons are stored as ordered edge vectors. Planar polygons use the same
//! [`Vec3`] storage with an identically zero third component, so every
//! functional works for both dimensions without duplication.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default relative closure tolerance for [`ClosedPolygon::new`].
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// A planar vector embedded with zero third component.
    #[inline]
    pub const fn planar(x: f64, y: f64) -> Self {
        Vec3 { x, y, z: 0.0 }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::Argument(format!("dimension must be 2 or 3, got {d}"))),
        }
    }
}

fn check_edges(dim: Dim, edges: &[Vec3]) -> Result<()> {
    for (index, e) in edges.iter().enumerate() {
        if !e.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if dim == Dim::Two && e.z != 0.0 {
            return Err(Error::Argument(format!(
                "planar polygon edge {index} has nonzero third component"
            )));
        }
    }
    Ok(())
}

/// Read-only view shared by arms and closed polygons.
pub trait EdgeChain {
    fn dim(&self) -> Dim;
    fn edges(&self) -> &[Vec3];
    fn is_closed(&self) -> bool;

    fn len(&self) -> usize {
        self.edges().len()
    }

    fn is_empty(&self) -> bool {
        self.edges().is_empty()
    }

    /// Vertex positions starting from the origin. Arms yield `n + 1`
    /// vertices; closed polygons yield their `n` distinct vertices.
    fn vertices(&self) -> Vec<Vec3> {
        let edges = self.edges();
        let count = if self.is_closed() { edges.len() } else { edges.len() + 1 };
        let mut out = Vec::with_capacity(count);
        let mut v = Vec3::ZERO;
        out.push(v);
        for e in &edges[..count - 1] {
            v += *e;
            out.push(v);
        }
        out
    }
}

/// An open polygonal chain of `n >= 1` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonArm {
    dim: Dim,
    edges: Vec<Vec3>,
}

impl PolygonArm {
    pub fn new(dim: Dim, edges: Vec<Vec3>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Argument("an arm needs at least one edge".into()));
        }
        check_edges(dim, &edges)?;
        Ok(PolygonArm { dim, edges })
    }

    pub fn into_edges(self) -> Vec<Vec3> {
        self.edges
    }
}

impl EdgeChain for PolygonArm {
    fn dim(&self) -> Dim {
        self.dim
    }
    fn edges(&self) -> &[Vec3] {
        &self.edges
    }
    fn is_closed(&self) -> bool {
        false
    }
}

/// A closed polygon of `n >= 3` edges whose edge vectors sum to zero up to
/// a relative tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedPolygon {
    dim: Dim,
    edges: Vec<Vec3>,
}

impl ClosedPolygon {
    pub fn new(dim: Dim, edges: Vec<Vec3>) -> Result<Self> {
        Self::with_tolerance(dim, edges, DEFAULT_CLOSURE_TOL)
    }

    pub fn with_tolerance(dim: Dim, edges: Vec<Vec3>, tol: f64) -> Result<Self> {
        if edges.len() < 3 {
            return Err(Error::Argument(format!(
                "a closed polygon needs at least 3 edges, got {}",
                edges.len()
            )));
        }
        check_edges(dim, &edges)?;
        let defect = relative_closure_defect(&edges);
        if !(defect <= tol) {
            return Err(Error::NotClosed { defect, tolerance: tol });
        }
        Ok(ClosedPolygon { dim, edges })
    }

    pub(crate) fn new_unchecked(dim: Dim, edges: Vec<Vec3>) -> Self {
        debug_assert!(edges.len() >= 3);
        ClosedPolygon { dim, edges }
    }

    pub fn into_edges(self) -> Vec<Vec3> {
        self.edges
    }

    /// Reinterpret as an arm (drops the closure guarantee).
    pub fn into_arm(self) -> PolygonArm {
        PolygonArm { dim: self.dim, edges: self.edges }
    }

    /// Multiplies every edge by `s > 0`.
    pub fn scaled(&self, s: f64) -> ClosedPolygon {
        ClosedPolygon {
            dim: self.dim,
            edges: self.edges.iter().map(|e| *e * s).collect(),
        }
    }
}

impl EdgeChain for ClosedPolygon {
    fn dim(&self) -> Dim {
        self.dim
    }
    fn edges(&self) -> &[Vec3] {
        &self.edges
    }
    fn is_closed(&self) -> bool {
        true
    }
}

/// Either kind of polygon, as produced by runtime-selected samplers.
#[derive(Debug, Clone, PartialEq)]
pub enum Polygon {
    Arm(PolygonArm),
    Closed(ClosedPolygon),
}

impl EdgeChain for Polygon {
    fn dim(&self) -> Dim {
        match self {
            Polygon::Arm(p) => p.dim(),
            Polygon::Closed(p) => p.dim(),
        }
    }
    fn edges(&self) -> &[Vec3] {
        match self {
            Polygon::Arm(p) => p.edges(),
            Polygon::Closed(p) => p.edges(),
        }
    }
    fn is_closed(&self) -> bool {
        matches!(self, Polygon::Closed(_))
    }
}

impl From<PolygonArm> for Polygon {
    fn from(p: PolygonArm) -> Self {
        Polygon::Arm(p)
    }
}

impl From<ClosedPolygon> for Polygon {
    fn from(p: ClosedPolygon) -> Self {
        Polygon::Closed(p)
    }
}

/// `|sum e_i| / sum |e_i|`, or 0 for an all-zero edge list.
pub fn relative_closure_defect(edges: &[Vec3]) -> f64 {
    let mut sum = Vec3::ZERO;
    let mut len = 0.0;
    for e in edges {
        sum += *e;
        len += e.norm();
    }
    let d = sum.norm();
    if d == 0.0 {
        0.0
    } else {
        d / len
    }
}

/// Angle in `[0, pi]` between two nonzero vectors.
pub fn turning_angle(e1: Vec3, e2: Vec3) -> Result<f64> {
    let n1 = e1.norm();
    let n2 = e2.norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::Domain("turning angle of a zero-length edge".into()));
    }
    Ok(angle_from_norms(e1, e2, n1, n2))
}

#[inline]
fn angle_from_norms(e1: Vec3, e2: Vec3, n1: f64, n2: f64) -> f64 {
    // |<e1,e2>| may exceed |e1||e2| by an ulp or two.
    (e1.dot(e2) / (n1 * n2)).clamp(-1.0, 1.0).acos()
}

/// Sum of turning angles: `n - 1` of them for an arm, `n` (including the
/// wraparound pair) for a closed polygon.
pub fn total_curvature<P: EdgeChain + ?Sized>(p: &P) -> Result<f64> {
    let edges = p.edges();
    let norms = edge_norms(edges)?;
    let n = edges.len();
    let mut kappa = 0.0;
    for i in 0..n - 1 {
        kappa += angle_from_norms(edges[i], edges[i + 1], norms[i], norms[i + 1]);
    }
    if p.is_closed() {
        kappa += angle_from_norms(edges[n - 1], edges[0], norms[n - 1], norms[0]);
    }
    Ok(kappa)
}

fn edge_norms(edges: &[Vec3]) -> Result<Vec<f64>> {
    edges
        .iter()
        .enumerate()
        .map(|(index, e)| {
            let r = e.norm();
            if r == 0.0 {
                Err(Error::ZeroLengthEdge { index })
            } else {
                Ok(r)
            }
        })
        .collect()
}

/// Sum over consecutive edge triples of the angle in `[0, pi]` between the
/// successive binormals `e_{i-1} x e_i` and `e_i x e_{i+1}`.
///
/// A vertex whose adjacent edges are parallel has no binormal; such a triple
/// contributes 0.
pub fn total_torsion(p: &ClosedPolygon) -> Result<f64> {
    if p.dim() != Dim::Three {
        return Err(Error::UnsupportedDimension { expected: 3, found: p.dim().as_usize() });
    }
    let edges = p.edges();
    let norms = edge_norms(edges)?;
    let n = edges.len();
    // binormal at vertex between edge i and edge i+1
    let binormals: Vec<(Vec3, f64)> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let b = edges[i].cross(edges[j]);
            let bn = b.norm();
            if bn <= 4.0 * f64::EPSILON * norms[i] * norms[j] {
                (b, 0.0)
            } else {
                (b, bn)
            }
        })
        .collect();
    let mut tau = 0.0;
    for i in 0..n {
        let (b1, n1) = binormals[i];
        let (b2, n2) = binormals[(i + 1) % n];
        if n1 > 0.0 && n2 > 0.0 {
            tau += angle_from_norms(b1, b2, n1, n2);
        }
    }
    Ok(tau)
}

/// Mean squared length of chords spanning `k` consecutive edges: over all
/// `n` cyclic start positions for a closed polygon, over the `n - k + 1`
/// windows of an arm.
pub fn chord_squared_mean<P: EdgeChain + ?Sized>(p: &P, k: usize) -> Result<f64> {
    let n = p.len();
    if k == 0 || k > n {
        return Err(Error::Argument(format!("chord skip k = {k} outside 1..={n}")));
    }
    let edges = p.edges();
    let mut prefix = Vec::with_capacity(n + 1);
    let mut v = Vec3::ZERO;
    prefix.push(v);
    for e in edges {
        v += *e;
        prefix.push(v);
    }
    let mut acc = 0.0;
    let count = if p.is_closed() {
        let total = prefix[n];
        for i in 0..n {
            let j = i + k;
            let chord = if j <= n {
                prefix[j] - prefix[i]
            } else {
                // wrap: edges i..n then 0..j-n
                (total - prefix[i]) + prefix[j - n]
            };
            acc += chord.norm_sq();
        }
        n
    } else {
        for i in 0..=n - k {
            acc += (prefix[i + k] - prefix[i]).norm_sq();
        }
        n - k + 1
    };
    Ok(acc / count as f64)
}

/// Squared radius of gyration: mean squared distance of the vertices from
/// their centroid. Arms use all `n + 1` vertices, closed polygons their
/// `n` distinct vertices.
pub fn gyradius_squared<P: EdgeChain + ?Sized>(p: &P) -> f64 {
    let verts = p.vertices();
    let m = verts.len() as f64;
    let mut c = Vec3::ZERO;
    for v in &verts {
        c += *v;
    }
    c = c * (1.0 / m);
    verts.iter().map(|v| (*v - c).norm_sq()).sum::<f64>() / m
}

/// The failure-to-close vector `sum e_i`.
pub fn closure_defect<P: EdgeChain + ?Sized>(p: &P) -> Vec3 {
    let mut s = Vec3::ZERO;
    for e in p.edges() {
        s += *e;
    }
    s
}

pub fn total_length<P: EdgeChain + ?Sized>(p: &P) -> f64 {
    p.edges().iter().map(|e| e.norm()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> ClosedPolygon {
        ClosedPolygon::new(
            Dim::Two,
            vec![
                Vec3::planar(1.0, 0.0),
                Vec3::planar(0.0, 1.0),
                Vec3::planar(-1.0, 0.0),
                Vec3::planar(0.0, -1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn turning_angle_basic_cases() {
        let x = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(turning_angle(x, x).unwrap(), 0.0);
        assert_eq!(turning_angle(x, -x).unwrap(), PI);
        assert_eq!(turning_angle(x, Vec3::new(0.0, 2.0, 0.0)).unwrap(), PI / 2.0);
        assert!(turning_angle(x, Vec3::ZERO).is_err());
    }

    #[test]
    fn nearly_parallel_edges_do_not_produce_nan() {
        let a = Vec3::new(0.1, 0.2, 0.3);
        let b = a * 3.0;
        let t = turning_angle(a, b).unwrap();
        assert!(t.is_finite() && t < 1e-7);
    }

    #[test]
    fn triangle_and_square_have_total_curvature_two_pi() {
        let tri = ClosedPolygon::new(
            Dim::Three,
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(-0.3, 2.0, 0.5), Vec3::new(-0.7, -2.0, -0.5)],
        )
        .unwrap();
        assert!((total_curvature(&tri).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((total_curvature(&unit_square()).unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn straight_arm_has_zero_curvature() {
        let e = Vec3::new(0.5, -1.0, 2.0);
        let arm = PolygonArm::new(Dim::Three, vec![e; 7]).unwrap();
        assert_eq!(total_curvature(&arm).unwrap(), 0.0);
    }

    #[test]
    fn zero_edge_is_reported_by_index() {
        let arm = PolygonArm::new(
            Dim::Three,
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO, Vec3::new(0.0, 1.0, 0.0)],
        )
        .unwrap();
        assert_eq!(total_curvature(&arm), Err(Error::ZeroLengthEdge { index: 1 }));
    }

    #[test]
    fn planar_torsion_is_zero_and_planar_dim_rejected() {
        let sq = unit_square();
        assert!(matches!(total_torsion(&sq), Err(Error::UnsupportedDimension { .. })));
        let sq3 = ClosedPolygon::new(Dim::Three, sq.edges().to_vec()).unwrap();
        assert_eq!(total_torsion(&sq3).unwrap(), 0.0);
        let tri = ClosedPolygon::new(
            Dim::Three,
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(-0.3, 2.0, 0.5), Vec3::new(-0.7, -2.0, -0.5)],
        )
        .unwrap();
        assert!(total_torsion(&tri).unwrap().abs() < 1e-12);
    }

    #[test]
    fn twisted_quadrilateral_torsion() {
        // Skew quadrilateral: each binormal pair meets at a right angle.
        let e = vec![
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(-1.0, 0.0, 1.0),
            Vec3::new(0.0, -1.0, -1.0),
        ];
        let p = ClosedPolygon::new(Dim::Three, e).unwrap();
        let tau = total_torsion(&p).unwrap();
        assert!(tau > 0.0 && tau <= 4.0 * PI);
    }

    #[test]
    fn chord_of_unit_square() {
        let sq = unit_square();
        assert!((chord_squared_mean(&sq, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!((chord_squared_mean(&sq, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(chord_squared_mean(&sq, 4).unwrap().abs() < 1e-30);
        assert!(chord_squared_mean(&sq, 0).is_err());
        assert!(chord_squared_mean(&sq, 5).is_err());
    }

    #[test]
    fn gyradius_of_coincident_vertices_is_zero() {
        let p = ClosedPolygon::new(Dim::Three, vec![Vec3::ZERO; 4]).unwrap();
        assert_eq!(gyradius_squared(&p), 0.0);
        // unit square: vertices at distance sqrt(1/2) from the center
        assert!((gyradius_squared(&unit_square()) - 0.5).abs() < 1e-15);
        // two-edge straight arm: vertices 0,1,2 -> variance 2/3
        let arm = PolygonArm::new(Dim::Two, vec![Vec3::planar(1.0, 0.0); 2]).unwrap();
        assert!((gyradius_squared(&arm) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn closure_defect_and_length() {
        let e = Vec3::new(0.3, -0.4, 1.2);
        let single = PolygonArm::new(Dim::Three, vec![e]).unwrap();
        assert_eq!(closure_defect(&single), e);
        let back = PolygonArm::new(Dim::Three, vec![e, -e]).unwrap();
        assert_eq!(closure_defect(&back), Vec3::ZERO);
        let tri = ClosedPolygon::new(
            Dim::Two,
            vec![
                Vec3::planar(1.0, 0.0),
                Vec3::planar(-0.5, 3f64.sqrt() / 2.0),
                Vec3::planar(-0.5, -(3f64.sqrt()) / 2.0),
            ],
        )
        .unwrap();
        assert!((total_length(&tri) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn construction_errors() {
        assert!(PolygonArm::new(Dim::Three, vec![]).is_err());
        assert!(matches!(
            PolygonArm::new(Dim::Three, vec![Vec3::new(f64::NAN, 0.0, 0.0)]),
            Err(Error::NonFinite { index: 0 })
        ));
        assert!(PolygonArm::new(Dim::Two, vec![Vec3::new(1.0, 0.0, 1.0)]).is_err());
        assert!(ClosedPolygon::new(Dim::Three, vec![Vec3::new(1.0, 0.0, 0.0); 2]).is_err());
        assert!(matches!(
            ClosedPolygon::new(Dim::Three, vec![Vec3::new(1.0, 0.0, 0.0); 3]),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn vertex_counts() {
        let sq = unit_square();
        assert_eq!(sq.vertices().len(), 4);
        let arm = sq.clone().into_arm();
        assert_eq!(arm.vertices().len(), 5);
    }
}
