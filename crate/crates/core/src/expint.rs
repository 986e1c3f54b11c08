//! Certified integrals of `e^{⟨ξ,u⟩}` and `⟨v,u⟩ e^{⟨ξ,u⟩}` over rational
//! polytopes.
//!
//! For a `d`-simplex with vertices `p_i` and nodes `t_i = ⟨ξ, p_i⟩`,
//!
//! ```text
//! ∫_S e^{⟨ξ,u⟩} du = d! · vol(S) · exp[t_0, …, t_d]
//! ∫_S λ_i e^{⟨ξ,u⟩} du = d! · vol(S) · exp[t_0, …, t_d, t_i]
//! ```
//!
//! where `exp[…]` is the divided difference of the exponential and `λ_i` the
//! barycentric coordinate of `p_i`. A linear weight `⟨v,u⟩ = Σ ⟨v,p_i⟩ λ_i`
//! reduces to the second formula. A divided difference over nodes whose spread
//! is not certified to exceed `τ = 1` is a Taylor series in the non-negative
//! offsets from the smallest node, with a rigorous remainder; wider node sets
//! use the recurrence, whose divisions by gaps `≥ 1` never amplify errors.
//! Coincident and nearly coincident nodes are handled uniformly.

use std::cmp::Ordering;

use rug::float::Round;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::geometry::{linalg, simplex_volume, Polytope, RationalPoint};
use crate::rigor::{self, Interval, IntervalVector, Precision};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpIntError {
    #[error("polytope of dimension {affine} in ambient dimension {ambient} is not full-dimensional")]
    NotFullDimensional { affine: usize, ambient: usize },
    #[error("simplex vertices are affinely dependent")]
    DegenerateSimplex,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Taylor truncation never starts below this many terms.
pub const MIN_TAYLOR_TERMS: u32 = 30;
/// Upper limit on Taylor terms before the remainder is accepted as is.
pub const MAX_TAYLOR_TERMS: u32 = 4000;

#[derive(Clone, Debug)]
pub struct Simplex {
    vertices: Vec<RationalPoint>,
    volume: Rational,
    /// `d! · vol`, the determinant factor.
    scale: Rational,
}

impl Simplex {
    pub fn new(vertices: Vec<RationalPoint>) -> Result<Self, ExpIntError> {
        let d = vertices.len().saturating_sub(1);
        if let Some(v) = vertices.iter().find(|v| v.dim() != d) {
            return Err(ExpIntError::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        let volume = simplex_volume(&vertices);
        if volume.cmp0() == Ordering::Equal {
            return Err(ExpIntError::DegenerateSimplex);
        }
        let mut f = Integer::from(1);
        for i in 2..=d as u32 {
            f *= i;
        }
        let scale = Rational::from(&volume * &f);
        Ok(Simplex {
            vertices,
            volume,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn volume(&self) -> &Rational {
        &self.volume
    }
}

/// Nodes of a divided difference sorted by midpoint, with clusters of
/// consecutive nodes whose separation is not certified to exceed `τ`.
#[derive(Clone, Debug)]
pub struct NodeSet {
    points: Vec<RationalPoint>,
    nodes: Vec<Interval>,
    clusters: Vec<Vec<usize>>,
    tau: Float,
}

impl NodeSet {
    pub fn new(points: &[&RationalPoint], xi: &IntervalVector) -> Self {
        let p = xi.prec();
        let mut tagged: Vec<(RationalPoint, Interval)> = points
            .iter()
            .map(|pt| ((*pt).clone(), xi.dot_rational(&pt.0)))
            .collect();
        tagged.sort_by(|a, b| {
            a.1.mid_f64()
                .partial_cmp(&b.1.mid_f64())
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        let (points, nodes): (Vec<_>, Vec<_>) = tagged.into_iter().unzip();
        let tau = separation_threshold(&nodes, p);
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for i in 0..nodes.len() {
            let joined = i > 0 && !certified_apart(&gap(xi, &points[i - 1], &points[i]), &tau);
            match clusters.last_mut() {
                Some(c) if joined => c.push(i),
                _ => clusters.push(vec![i]),
            }
        }
        NodeSet {
            points,
            nodes,
            clusters,
            tau,
        }
    }

    pub fn nodes(&self) -> &[Interval] {
        &self.nodes
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn tau(&self) -> &Float {
        &self.tau
    }
}

/// Node spread below which the Taylor expansion replaces the recurrence.
pub const SEPARATION: u32 = 1;

fn separation_threshold(_nodes: &[Interval], p: Precision) -> Float {
    Float::with_val(p.bits(), SEPARATION)
}

fn certified_apart(g: &Interval, tau: &Float) -> bool {
    *g.lower() >= *tau || *g.upper() <= -tau.clone()
}

/// `⟨ξ, b − a⟩`, computed from the exact vertex difference.
fn gap(xi: &IntervalVector, a: &RationalPoint, b: &RationalPoint) -> Interval {
    xi.dot_rational(&linalg::sub(&b.0, &a.0))
}

/// Encloses `exp[t_0, …, t_m]` for `t_i = ⟨ξ, p_i⟩`; repeated points are
/// allowed.
pub fn exp_divided_difference(points: &[&RationalPoint], xi: &IntervalVector) -> Interval {
    let ns = NodeSet::new(points, xi);
    let m = ns.nodes.len();
    let p = xi.prec();
    let mut memo: Vec<Vec<Option<Interval>>> = vec![vec![None; m]; m];
    divided(&ns, xi, 0, m - 1, p, &mut memo)
}

fn divided(
    ns: &NodeSet,
    xi: &IntervalVector,
    i: usize,
    j: usize,
    p: Precision,
    memo: &mut Vec<Vec<Option<Interval>>>,
) -> Interval {
    if let Some(v) = &memo[i][j] {
        return v.clone();
    }
    let v = if i == j {
        ns.nodes[i].exp()
    } else {
        let g = gap(xi, &ns.points[i], &ns.points[j]);
        if certified_apart(&g, &ns.tau) {
            let a = divided(ns, xi, i + 1, j, p, memo);
            let b = divided(ns, xi, i, j - 1, p, memo);
            (&a - &b) / g
        } else {
            taylor_divided_difference(ns, xi, i, j, p)
        }
    };
    memo[i][j] = Some(v.clone());
    v
}

/// `exp[t_i, …, t_j] = e^{t_i} · Σ_{m≥0} h_m(s) / (m + d)!` with
/// `s_k = t_k − t_i` and `h_m` the complete homogeneous symmetric
/// polynomials, truncated with the bound `ρ^J e^ρ / (J! d!)`, `ρ = max |s_k|`.
fn taylor_divided_difference(ns: &NodeSet, xi: &IntervalVector, i: usize, j: usize, p: Precision) -> Interval {
    let d = (j - i) as u32;
    let s: Vec<Interval> = (i..=j).map(|k| gap(xi, &ns.points[i], &ns.points[k])).collect();
    let bits = p.bits();
    let mut rho = Float::with_val(bits, 0);
    for sk in &s {
        let a = sk.mag();
        if a > rho {
            rho = a;
        }
    }
    let target = Float::with_val(bits, Float::u_exp(1, -(bits as i32) - 4));
    let mut d_fact = Float::with_val(bits, 1);
    for k in 2..=d {
        d_fact = Float::with_val_round(bits, &d_fact * k, Round::Down).0;
    }
    // Smallest J ≥ MIN_TAYLOR_TERMS with remainder below target (or the cap).
    let mut terms = MIN_TAYLOR_TERMS;
    let mut rem;
    loop {
        rem = rigor::taylor_tail_bound(&rho, terms, bits);
        rem = Float::with_val_round(bits, &rem / &d_fact, Round::Up).0;
        if rem <= target || terms >= MAX_TAYLOR_TERMS || rho.is_zero() {
            break;
        }
        terms = (terms * 2).min(MAX_TAYLOR_TERMS);
    }
    // h_m for m < terms, by the recurrence h_m^{(k)} = h_m^{(k-1)} + s_k h_{m-1}^{(k)}.
    let zero = Interval::zero(p);
    let one = Interval::one(p);
    let mut h: Vec<Interval> = vec![zero.clone(); terms as usize];
    h[0] = one.clone();
    for (idx, sk) in s.iter().enumerate() {
        if idx == 0 {
            // s_0 = 0 contributes only h_0.
            continue;
        }
        if sk.is_point() && sk.lower().is_zero() {
            continue;
        }
        for m in 1..terms as usize {
            let add = sk * &h[m - 1];
            h[m] = &h[m] + &add;
        }
    }
    // Σ h_m / (m + d)!, accumulated with a running reciprocal factorial.
    let mut inv_fact = one.clone();
    for k in 2..=d {
        inv_fact = inv_fact.div_int(k);
    }
    let mut sum = zero;
    for (m, hm) in h.iter().enumerate() {
        if m > 0 {
            inv_fact = inv_fact.div_int(m as u32 + d);
        }
        sum = &sum + &(hm * &inv_fact);
    }
    let r = Interval::from_floats(-rem.clone(), rem);
    let base = ns.nodes[i].exp();
    &base * &(&sum + &r)
}

/// `∫_S e^{⟨ξ,u⟩} du`.
pub fn simplex_exp(s: &Simplex, xi: &IntervalVector) -> Interval {
    let pts: Vec<&RationalPoint> = s.vertices.iter().collect();
    exp_divided_difference(&pts, xi).mul_rational(&s.scale)
}

/// `∫_S λ_i(u) e^{⟨ξ,u⟩} du` for the barycentric coordinate of vertex `i`.
pub fn weighted_exp(s: &Simplex, xi: &IntervalVector, i: usize) -> Interval {
    let mut pts: Vec<&RationalPoint> = s.vertices.iter().collect();
    pts.push(&s.vertices[i]);
    exp_divided_difference(&pts, xi).mul_rational(&s.scale)
}

/// `∫_S ⟨v,u⟩ e^{⟨ξ,u⟩} du`.
pub fn simplex_linear_exp(s: &Simplex, xi: &IntervalVector, v: &[Rational]) -> Interval {
    let mut acc = Interval::zero(xi.prec());
    for (i, p) in s.vertices.iter().enumerate() {
        let w = linalg::dot(v, &p.0);
        if w.cmp0() == Ordering::Equal {
            continue;
        }
        acc = &acc + &weighted_exp(s, xi, i).mul_rational(&w);
    }
    acc
}

/// A polytope with its triangulation cached for repeated integration.
#[derive(Clone, Debug)]
pub struct TriangulatedPolytope {
    polytope: Polytope,
    simplices: Vec<Simplex>,
    volume: Rational,
}

impl TriangulatedPolytope {
    pub fn new(polytope: &Polytope) -> Result<Self, ExpIntError> {
        if !polytope.is_full_dimensional() {
            return Err(ExpIntError::NotFullDimensional {
                affine: polytope.affine_dim(),
                ambient: polytope.ambient_dim(),
            });
        }
        let simplices: Vec<Simplex> = polytope
            .triangulate()
            .into_iter()
            .map(Simplex::new)
            .collect::<Result<_, _>>()?;
        let volume = simplices.iter().map(|s| s.volume.clone()).sum();
        Ok(TriangulatedPolytope {
            polytope: polytope.clone(),
            simplices,
            volume,
        })
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn volume(&self) -> &Rational {
        &self.volume
    }

    pub fn dim(&self) -> usize {
        self.polytope.ambient_dim()
    }

    fn check(&self, xi: &IntervalVector) -> Result<(), ExpIntError> {
        if xi.dim() != self.dim() {
            return Err(ExpIntError::DimensionMismatch {
                expected: self.dim(),
                found: xi.dim(),
            });
        }
        Ok(())
    }

    pub fn integrate_exp(&self, xi: &IntervalVector) -> Result<Interval, ExpIntError> {
        self.check(xi)?;
        Ok(self
            .simplices
            .iter()
            .fold(Interval::zero(xi.prec()), |acc, s| &acc + &simplex_exp(s, xi)))
    }

    pub fn integrate_linear_exp(&self, xi: &IntervalVector, v: &[Rational]) -> Result<Interval, ExpIntError> {
        self.check(xi)?;
        if v.len() != self.dim() {
            return Err(ExpIntError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(self
            .simplices
            .iter()
            .fold(Interval::zero(xi.prec()), |acc, s| &acc + &simplex_linear_exp(s, xi, v)))
    }
}

/// `∫_P e^{⟨ξ,u⟩} du` for a full-dimensional polytope.
pub fn integrate_exp(p: &Polytope, xi: &IntervalVector) -> Result<Interval, ExpIntError> {
    TriangulatedPolytope::new(p)?.integrate_exp(xi)
}

/// `∫_P ⟨v,u⟩ e^{⟨ξ,u⟩} du` for a full-dimensional polytope.
pub fn integrate_linear_exp(p: &Polytope, xi: &IntervalVector, v: &[Rational]) -> Result<Interval, ExpIntError> {
    TriangulatedPolytope::new(p)?.integrate_linear_exp(xi, v)
}
