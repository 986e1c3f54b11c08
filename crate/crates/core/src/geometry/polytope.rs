//! Rational convex polytopes: V- and H-representations, facets,
//! triangulation, volume and lattice points.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use rug::{Integer, Rational};

use super::linalg::{self, dot, nullspace, rank, sub};
use super::GeometryError;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalPoint(pub Vec<Rational>);

impl RationalPoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalPoint(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RationalPoint(coords.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        RationalPoint(vec![Rational::new(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_integral(&self) -> bool {
        linalg::is_integral(&self.0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Rational::to_f64).collect()
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(", "))
    }
}

/// The half-space `⟨normal, x⟩ ≤ offset` with a primitive integral normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Self {
        Halfspace { normal, offset }
    }

    /// `offset - ⟨normal, x⟩`, non-negative on the inside.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.offset - dot(&self.normal, x)
    }

    /// Rescales so the normal is primitive integral.
    pub fn normalized(&self) -> Halfspace {
        let ints = linalg::primitive(&self.normal);
        let idx = self.normal.iter().position(|c| c.cmp0().is_ne());
        let Some(i) = idx else {
            return self.clone();
        };
        let scale = Rational::from(&ints[i]) / self.normal[i].clone();
        Halfspace {
            normal: ints.into_iter().map(Rational::from).collect(),
            offset: Rational::from(&self.offset * &scale),
        }
    }
}

/// A facet as the half-space it bounds plus the indices of its vertices.
#[derive(Clone, Debug)]
pub struct Facet {
    pub halfspace: Halfspace,
    pub vertices: Vec<usize>,
}

/// A convex polytope stored by its sorted vertex list. Full-dimensional
/// polytopes also carry their facets.
#[derive(Clone, Debug)]
pub struct Polytope {
    ambient: usize,
    affine_dim: usize,
    vertices: Vec<RationalPoint>,
    facets: Vec<Facet>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

impl Polytope {
    /// Convex hull of a finite point set; redundant points are dropped.
    pub fn from_points(ambient: usize, points: &[RationalPoint]) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::Empty);
        }
        if let Some(p) = points.iter().find(|p| p.dim() != ambient) {
            return Err(GeometryError::DimensionMismatch {
                expected: ambient,
                found: p.dim(),
            });
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        let (k, coords) = affine_frame(&pts);
        let projected: Vec<Vec<Rational>> = pts.iter().map(|p| project(p, &coords)).collect();
        let extreme = extreme_indices(&projected, k);
        let vertices: Vec<RationalPoint> = extreme.iter().map(|&i| pts[i].clone()).collect();
        let facets = if k == ambient && k > 0 {
            facets_of(&vertices.iter().map(|v| v.0.clone()).collect::<Vec<_>>(), k)
        } else {
            Vec::new()
        };
        Ok(Polytope {
            ambient,
            affine_dim: k,
            vertices,
            facets,
        })
    }

    pub fn from_int_points(points: &[&[i64]]) -> Result<Self, GeometryError> {
        let ambient = points.first().map_or(0, |p| p.len());
        let pts: Vec<RationalPoint> = points.iter().map(|p| RationalPoint::from_ints(p)).collect();
        Self::from_points(ambient, &pts)
    }

    /// Intersection of half-spaces, which must be bounded.
    pub fn from_halfspaces(ambient: usize, hs: &[Halfspace]) -> Result<Self, GeometryError> {
        let mut found: Vec<RationalPoint> = Vec::new();
        for combo in (0..hs.len()).combinations(ambient) {
            let a: Vec<Vec<Rational>> = combo.iter().map(|&i| hs[i].normal.clone()).collect();
            let b: Vec<Rational> = combo.iter().map(|&i| hs[i].offset.clone()).collect();
            let Some(x) = linalg::solve(&a, &b) else {
                continue;
            };
            if hs.iter().all(|h| h.slack(&x).cmp0() != Ordering::Less) {
                found.push(RationalPoint(x));
            }
        }
        if found.is_empty() {
            return Err(GeometryError::Empty);
        }
        Self::from_points(ambient, &found)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == self.ambient
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    /// Facets of a full-dimensional polytope, sorted by normal.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn halfspaces(&self) -> Vec<Halfspace> {
        self.facets.iter().map(|f| f.halfspace.clone()).collect()
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().all(RationalPoint::is_integral)
    }

    /// Membership test; requires a full-dimensional polytope.
    pub fn contains(&self, x: &[Rational]) -> bool {
        assert!(self.is_full_dimensional(), "containment needs a full-dimensional polytope");
        self.facets
            .iter()
            .all(|f| f.halfspace.slack(x).cmp0() != Ordering::Less)
    }

    pub fn contains_in_interior(&self, x: &[Rational]) -> bool {
        assert!(self.is_full_dimensional(), "containment needs a full-dimensional polytope");
        self.facets
            .iter()
            .all(|f| f.halfspace.slack(x).cmp0() == Ordering::Greater)
    }

    /// Deterministic triangulation into full-dimensional simplices, each given
    /// by `affine_dim + 1` vertices. Pulls the lexicographically smallest
    /// vertex and recurses over the facets not containing it.
    pub fn triangulate(&self) -> Vec<Vec<RationalPoint>> {
        triangulate_indices(&self.vertices)
            .into_iter()
            .map(|s| s.into_iter().map(|i| self.vertices[i].clone()).collect())
            .collect()
    }

    /// Euclidean volume; zero unless full-dimensional.
    pub fn volume(&self) -> Rational {
        if !self.is_full_dimensional() {
            return Rational::new();
        }
        self.triangulate().iter().map(|s| simplex_volume(s)).sum()
    }

    pub fn vertex_barycenter(&self) -> RationalPoint {
        let n = Rational::from(self.vertices.len());
        let mut acc = vec![Rational::new(); self.ambient];
        for v in &self.vertices {
            for (a, c) in acc.iter_mut().zip(&v.0) {
                *a += c;
            }
        }
        RationalPoint(acc.into_iter().map(|a| a / n.clone()).collect())
    }

    pub fn map_linear(&self, m: &[Vec<Rational>]) -> Result<Polytope, GeometryError> {
        let pts: Vec<RationalPoint> = self
            .vertices
            .iter()
            .map(|v| RationalPoint(linalg::mat_vec(m, &v.0)))
            .collect();
        Polytope::from_points(m.len(), &pts)
    }

    pub fn translate(&self, t: &[Rational]) -> Result<Polytope, GeometryError> {
        let pts: Vec<RationalPoint> = self
            .vertices
            .iter()
            .map(|v| RationalPoint(v.0.iter().zip(t).map(|(a, b)| Rational::from(a + b)).collect()))
            .collect();
        Polytope::from_points(self.ambient, &pts)
    }

    /// Integer range of the first coordinate over `k·P`.
    pub fn first_coordinate_range(&self, k: u64) -> (Integer, Integer) {
        let k = Rational::from(k);
        let lo = self.vertices.iter().map(|v| Rational::from(&v.0[0] * &k)).min().unwrap();
        let hi = self.vertices.iter().map(|v| Rational::from(&v.0[0] * &k)).max().unwrap();
        (lo.ceil().numer().clone(), hi.floor().numer().clone())
    }

    /// Lattice points of `k·P` grouped into columns along the last axis: for
    /// every integral prefix `(x₁, …, x_{d-1})` with first coordinate `x0`,
    /// the inclusive range of the last coordinate. Requires full dimension.
    pub fn lattice_columns(&self, k: u64, x0: &Integer) -> Vec<LatticeColumn> {
        assert!(self.is_full_dimensional());
        let d = self.ambient;
        let kq = Rational::from(k);
        let hs: Vec<Halfspace> = self
            .facets
            .iter()
            .map(|f| Halfspace::new(f.halfspace.normal.clone(), Rational::from(&f.halfspace.offset * &kq)))
            .collect();
        let bounds: Vec<(Integer, Integer)> = (0..d)
            .map(|j| {
                let lo = self.vertices.iter().map(|v| Rational::from(&v.0[j] * &kq)).min().unwrap();
                let hi = self.vertices.iter().map(|v| Rational::from(&v.0[j] * &kq)).max().unwrap();
                (lo.ceil().numer().clone(), hi.floor().numer().clone())
            })
            .collect();
        let mut out = Vec::new();
        if d == 1 {
            if bounds[0].0 <= bounds[0].1 {
                out.push(LatticeColumn {
                    prefix: Vec::new(),
                    lo: bounds[0].0.clone(),
                    hi: bounds[0].1.clone(),
                });
            }
            return out;
        }
        let mut prefix = vec![x0.clone()];
        collect_columns(&hs, &bounds, &mut prefix, &mut out);
        out
    }

    pub fn lattice_point_count(&self, k: u64) -> Integer {
        let (lo, hi) = self.first_coordinate_range(k);
        let mut total = Integer::new();
        let mut x = lo;
        while x <= hi {
            for c in self.lattice_columns(k, &x) {
                total += c.len();
            }
            x += 1;
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeColumn {
    pub prefix: Vec<Integer>,
    pub lo: Integer,
    pub hi: Integer,
}

impl LatticeColumn {
    pub fn len(&self) -> Integer {
        Integer::from(&self.hi - &self.lo) + 1
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

fn collect_columns(
    hs: &[Halfspace],
    bounds: &[(Integer, Integer)],
    prefix: &mut Vec<Integer>,
    out: &mut Vec<LatticeColumn>,
) {
    let d = bounds.len();
    if prefix.len() == d - 1 {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for h in hs {
            let mut rest = h.offset.clone();
            for (c, x) in h.normal.iter().zip(prefix.iter()) {
                rest -= Rational::from(c * x);
            }
            let a = &h.normal[d - 1];
            match a.cmp0() {
                Ordering::Equal => {
                    if rest.cmp0() == Ordering::Less {
                        return;
                    }
                }
                Ordering::Greater => {
                    let b = rest / a.clone();
                    if hi.as_ref().is_none_or(|h| b < *h) {
                        hi = Some(b);
                    }
                }
                Ordering::Less => {
                    let b = rest / a.clone();
                    if lo.as_ref().is_none_or(|l| b > *l) {
                        lo = Some(b);
                    }
                }
            }
        }
        let lo = lo.map_or(bounds[d - 1].0.clone(), |l| l.ceil().numer().clone());
        let hi = hi.map_or(bounds[d - 1].1.clone(), |h| h.floor().numer().clone());
        if lo <= hi {
            out.push(LatticeColumn {
                prefix: prefix.clone(),
                lo,
                hi,
            });
        }
        return;
    }
    let j = prefix.len();
    let mut x = bounds[j].0.clone();
    while x <= bounds[j].1 {
        prefix.push(x.clone());
        collect_columns(hs, bounds, prefix, out);
        prefix.pop();
        x += 1;
    }
}

/// Volume of the simplex spanned by `d + 1` points in `ℚ^d`.
pub fn simplex_volume(s: &[RationalPoint]) -> Rational {
    let d = s.len() - 1;
    let rows: Vec<Vec<Rational>> = s[1..].iter().map(|p| sub(&p.0, &s[0].0)).collect();
    let mut det = linalg::det(&rows).abs();
    let mut f = Integer::from(1);
    for i in 2..=d as u32 {
        f *= i;
    }
    det /= Rational::from(f);
    det
}

/// Dimension of the affine hull and the coordinates onto which it projects
/// injectively.
fn affine_frame(points: &[RationalPoint]) -> (usize, Vec<usize>) {
    let mut diffs: Vec<Vec<Rational>> = points[1..].iter().map(|p| sub(&p.0, &points[0].0)).collect();
    if diffs.is_empty() {
        return (0, Vec::new());
    }
    let pivots = linalg::rref(&mut diffs);
    (pivots.len(), pivots)
}

fn project(p: &RationalPoint, coords: &[usize]) -> Vec<Rational> {
    coords.iter().map(|&c| p.0[c].clone()).collect()
}

/// Facets of the full-dimensional hull of `pts ⊂ ℚ^k`, each with the
/// indices of the points it contains.
fn facets_of(pts: &[Vec<Rational>], k: usize) -> Vec<Facet> {
    let mut facets: Vec<Facet> = Vec::new();
    for combo in (0..pts.len()).combinations(k) {
        if facets
            .iter()
            .any(|f| combo.iter().all(|i| f.vertices.contains(i)))
        {
            continue;
        }
        let rows: Vec<Vec<Rational>> = combo[1..].iter().map(|&i| sub(&pts[i], &pts[combo[0]])).collect();
        let ns = nullspace(&rows, k);
        if ns.len() != 1 {
            continue;
        }
        let n = &ns[0];
        let b = dot(n, &pts[combo[0]]);
        let mut pos = false;
        let mut neg = false;
        let mut on = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            match dot(n, p).cmp(&b) {
                Ordering::Greater => pos = true,
                Ordering::Less => neg = true,
                Ordering::Equal => on.push(i),
            }
            if pos && neg {
                break;
            }
        }
        if pos && neg {
            continue;
        }
        let h = if pos {
            Halfspace::new(n.iter().map(|c| -c.clone()).collect(), -b)
        } else {
            Halfspace::new(n.clone(), b)
        };
        facets.push(Facet {
            halfspace: h.normalized(),
            vertices: on,
        });
    }
    facets.sort_by(|a, b| a.halfspace.cmp(&b.halfspace));
    facets
}

fn extreme_indices(pts: &[Vec<Rational>], k: usize) -> Vec<usize> {
    if k == 0 {
        return vec![0];
    }
    let facets = facets_of(pts, k);
    (0..pts.len())
        .filter(|&i| {
            let normals: Vec<Vec<Rational>> = facets
                .iter()
                .filter(|f| f.vertices.contains(&i))
                .map(|f| f.halfspace.normal.clone())
                .collect();
            normals.len() >= k && rank(&normals) == k
        })
        .collect()
}

fn triangulate_indices(vertices: &[RationalPoint]) -> Vec<Vec<usize>> {
    let (k, coords) = affine_frame(vertices);
    if vertices.len() == k + 1 {
        return vec![(0..vertices.len()).collect()];
    }
    let projected: Vec<Vec<Rational>> = vertices.iter().map(|p| project(p, &coords)).collect();
    let mut facets: Vec<Vec<usize>> = facets_of(&projected, k)
        .into_iter()
        .map(|f| f.vertices)
        .filter(|vs| !vs.contains(&0))
        .collect();
    facets.sort();
    let mut out = Vec::new();
    for f in facets {
        let sub_pts: Vec<RationalPoint> = f.iter().map(|&i| vertices[i].clone()).collect();
        for s in triangulate_indices(&sub_pts) {
            let mut simplex = vec![0];
            simplex.extend(s.into_iter().map(|j| f[j]));
            out.push(simplex);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn square_with_interior_points() {
        let p = Polytope::from_int_points(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2], &[1, 1], &[1, 0]]).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
        assert_eq!(p.volume(), 4);
        assert_eq!(p.triangulate().len(), 2);
        assert!(p.contains(&[q(1, 2), q(3, 2)]));
        assert!(!p.contains(&[q(5, 2), q(1, 1)]));
    }

    #[test]
    fn cube_triangulation_volume() {
        let mut pts = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    pts.push(RationalPoint::from_ints(&[x, y, z]));
                }
            }
        }
        let c = Polytope::from_points(3, &pts).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        let simplices = c.triangulate();
        assert!(simplices.iter().all(|s| s.len() == 4));
        assert_eq!(c.volume(), 1);
    }

    #[test]
    fn halfspace_roundtrip() {
        let p = Polytope::from_int_points(&[&[-3, 0], &[-2, 1], &[2, 1], &[3, 0], &[0, -3]]).unwrap();
        let hs = p.halfspaces();
        let back = Polytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p, back);
        assert_eq!(p.volume(), q(14, 1));
    }

    #[test]
    fn lower_dimensional_hull() {
        let p = Polytope::from_int_points(&[&[0, 0, 0], &[1, 1, 0], &[2, 2, 0], &[0, 1, 0]]).unwrap();
        assert_eq!(p.affine_dim(), 2);
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.volume(), 0);
        assert_eq!(p.triangulate().len(), 1);
    }

    #[test]
    fn lattice_points_of_dilates() {
        let t = Polytope::from_int_points(&[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
        assert_eq!(t.lattice_point_count(1), 3);
        assert_eq!(t.lattice_point_count(3), 10);
        let c = Polytope::from_int_points(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]).unwrap();
        assert_eq!(c.lattice_point_count(1), 10);
    }

    #[test]
    fn empty_halfspace_system() {
        let hs = vec![
            Halfspace::new(vec![q(1, 1)], q(0, 1)),
            Halfspace::new(vec![q(-1, 1)], q(-1, 1)),
        ];
        assert!(matches!(Polytope::from_halfspaces(1, &hs), Err(GeometryError::Empty)));
    }
}
