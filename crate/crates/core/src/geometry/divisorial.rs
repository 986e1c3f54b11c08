//! Divisorial polytopes: a lattice polytope `□ ⊂ M_ℝ` with concave
//! piecewise-affine functions `Φ_y` attached to marked points of `P¹`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::linalg::{self, dot};
use super::polytope::{simplex_volume, Halfspace, Polytope, RationalPoint};
use super::GeometryError;

/// The affine function `u ↦ ⟨linear, u⟩ + constant`.
///
/// Valid data has the form `(⟨v,u⟩ − μ + 1)/μ` with `v ∈ N`, `μ ∈ ℤ_{>0}` and
/// `(v, μ)` primitive; the constant `0` is `v = 0, μ = 1`. Other affine
/// forms are representable so that validation can report them.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffinePiece {
    linear: Vec<Rational>,
    constant: Rational,
}

impl AffinePiece {
    pub fn new(linear: Vec<Rational>, constant: Rational) -> Self {
        AffinePiece { linear, constant }
    }

    pub fn zero(dim: usize) -> Self {
        AffinePiece::new(vec![Rational::new(); dim], Rational::new())
    }

    /// The piece `(⟨v,u⟩ − μ + 1)/μ`; `μ` must be positive.
    pub fn from_v_mu(v: &[Integer], mu: &Integer) -> Result<Self, GeometryError> {
        if *mu <= 0 {
            return Err(GeometryError::Malformed(format!("μ = {mu} is not positive")));
        }
        let m = Rational::from(mu);
        Ok(AffinePiece {
            linear: v.iter().map(|x| Rational::from(x) / m.clone()).collect(),
            constant: (Rational::from(1) - m.clone()) / m,
        })
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[Rational] {
        &self.linear
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn eval(&self, u: &[Rational]) -> Rational {
        dot(&self.linear, u) + &self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.constant.cmp0().is_eq() && self.linear.iter().all(|c| c.cmp0().is_eq())
    }

    /// `(v, μ)` if the piece has the required form.
    pub fn v_mu(&self) -> Option<(Vec<Integer>, Integer)> {
        let c1 = Rational::from(&self.constant + 1);
        if c1.cmp0().is_le() || *c1.numer() != 1 {
            return None;
        }
        let mu = c1.denom().clone();
        let m = Rational::from(&mu);
        let v: Vec<Rational> = self.linear.iter().map(|x| Rational::from(x * &m)).collect();
        if !linalg::is_integral(&v) {
            return None;
        }
        let v: Vec<Integer> = v.into_iter().map(|x| x.numer().clone()).collect();
        let mut g = mu.clone();
        for x in &v {
            g.gcd_mut(x);
        }
        (g == 1).then_some((v, mu))
    }
}

impl fmt::Display for AffinePiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["u", "w", "z"];
        let mut terms = Vec::new();
        for (i, c) in self.linear.iter().enumerate() {
            if c.cmp0().is_eq() {
                continue;
            }
            let var = if self.linear.len() == 1 {
                "u".to_string()
            } else {
                names.get(i).map_or(format!("u{i}"), |s| s.to_string())
            };
            terms.push(match c.to_string().as_str() {
                "1" => var,
                "-1" => format!("-{var}"),
                s => format!("{s}·{var}"),
            });
        }
        if self.constant.cmp0().is_ne() || terms.is_empty() {
            terms.push(self.constant.to_string());
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                s.push_str(&format!(" - {rest}"));
            } else {
                s.push_str(&format!(" + {t}"));
            }
        }
        f.write_str(&s)
    }
}

/// Pointwise minimum of affine pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlFunction {
    pieces: Vec<AffinePiece>,
}

impl PlFunction {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self, GeometryError> {
        let Some(first) = pieces.first() else {
            return Err(GeometryError::Malformed("piecewise-affine function without pieces".into()));
        };
        let d = first.dim();
        if let Some(p) = pieces.iter().find(|p| p.dim() != d) {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        Ok(PlFunction { pieces })
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn eval(&self, u: &[Rational]) -> Rational {
        self.pieces.iter().map(|p| p.eval(u)).min().unwrap()
    }

    /// Maximal regions of `base` on which piece `i` attains the minimum.
    pub fn cells(&self, base: &Polytope) -> Vec<(Polytope, usize)> {
        let n = base.ambient_dim();
        let mut out = Vec::new();
        'pieces: for (i, pi) in self.pieces.iter().enumerate() {
            let mut hs = base.halfspaces();
            for (j, pj) in self.pieces.iter().enumerate() {
                if i == j {
                    continue;
                }
                if pi == pj {
                    if j < i {
                        continue 'pieces;
                    }
                    continue;
                }
                hs.push(Halfspace::new(
                    linalg::sub(pi.linear(), pj.linear()),
                    Rational::from(pj.constant() - pi.constant()),
                ));
            }
            if let Ok(cell) = Polytope::from_halfspaces(n, &hs) {
                if cell.is_full_dimensional() {
                    out.push((cell, i));
                }
            }
        }
        out
    }

    /// Halfspaces cutting out the region where piece `i` is minimal.
    fn region(&self, i: usize) -> Vec<Halfspace> {
        let pi = &self.pieces[i];
        self.pieces
            .iter()
            .enumerate()
            .filter(|&(j, pj)| j != i && pj != pi)
            .map(|(_, pj)| {
                Halfspace::new(
                    linalg::sub(pi.linear(), pj.linear()),
                    Rational::from(pj.constant() - pi.constant()),
                )
            })
            .collect()
    }
}

impl fmt::Display for PlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.len() == 1 {
            return write!(f, "{}", self.pieces[0]);
        }
        f.write_str("min{")?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// A point of `P¹` carrying a non-trivial slice.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MarkedPoint {
    Zero,
    Infinity,
    One,
    Param(String),
}

impl MarkedPoint {
    pub fn parse(label: &str) -> MarkedPoint {
        match label {
            "0" => MarkedPoint::Zero,
            "inf" | "∞" | "infinity" => MarkedPoint::Infinity,
            "1" => MarkedPoint::One,
            other => MarkedPoint::Param(other.to_string()),
        }
    }

    /// Key used in data files.
    pub fn key(&self) -> &str {
        match self {
            MarkedPoint::Zero => "0",
            MarkedPoint::Infinity => "inf",
            MarkedPoint::One => "1",
            MarkedPoint::Param(s) => s,
        }
    }
}

impl fmt::Display for MarkedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkedPoint::Infinity => f.write_str("∞"),
            other => f.write_str(other.key()),
        }
    }
}

/// Which special fiber a test configuration degenerates to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FiberChoice {
    Point(MarkedPoint),
    Generic,
}

impl FiberChoice {
    pub fn parse(label: &str) -> FiberChoice {
        match label {
            "generic" | "g" => FiberChoice::Generic,
            other => FiberChoice::Point(MarkedPoint::parse(other)),
        }
    }

    pub fn key(&self) -> &str {
        match self {
            FiberChoice::Point(p) => p.key(),
            FiberChoice::Generic => "generic",
        }
    }
}

impl fmt::Display for FiberChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberChoice::Point(p) => write!(f, "{p}"),
            FiberChoice::Generic => f.write_str("generic"),
        }
    }
}

/// A cell of the common refinement with the active piece of every `Φ_y`.
#[derive(Clone, Debug)]
pub struct Cell {
    pub polytope: Polytope,
    pub pieces: BTreeMap<MarkedPoint, usize>,
}

#[derive(Clone, Debug)]
pub struct DivisorialPolytope {
    base: Polytope,
    phi: BTreeMap<MarkedPoint, PlFunction>,
    cells: OnceLock<Vec<Cell>>,
}

impl PartialEq for DivisorialPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.phi == other.phi
    }
}

impl DivisorialPolytope {
    pub fn new(base: Polytope, phi: BTreeMap<MarkedPoint, PlFunction>) -> Result<Self, GeometryError> {
        let n = base.ambient_dim();
        if n == 0 || !base.is_full_dimensional() {
            return Err(GeometryError::DegenerateInput("the box must be full-dimensional".into()));
        }
        if let Some(f) = phi.values().find(|f| f.dim() != n) {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: f.dim(),
            });
        }
        let params = phi.keys().filter(|k| matches!(k, MarkedPoint::Param(_))).count();
        if params > 1 {
            return Err(GeometryError::Malformed(format!("{params} parameter points; at most one allowed")));
        }
        Ok(DivisorialPolytope {
            base,
            phi,
            cells: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.base.ambient_dim()
    }

    pub fn base(&self) -> &Polytope {
        &self.base
    }

    pub fn phi(&self) -> &BTreeMap<MarkedPoint, PlFunction> {
        &self.phi
    }

    pub fn phi_at(&self, y: &MarkedPoint, u: &[Rational]) -> Rational {
        self.phi.get(y).map_or_else(Rational::new, |f| f.eval(u))
    }

    /// `deg Φ(u) = Σ_y Φ_y(u)`.
    pub fn deg(&self, u: &[Rational]) -> Rational {
        self.phi.values().map(|f| f.eval(u)).sum()
    }

    /// Marked points whose function is not identically zero on the box.
    pub fn support(&self) -> Vec<MarkedPoint> {
        let verts = self.subdivision_vertices();
        self.phi
            .iter()
            .filter(|(_, f)| verts.iter().any(|u| f.eval(&u.0).cmp0().is_ne()))
            .map(|(y, _)| y.clone())
            .collect()
    }

    pub fn cells(&self) -> &[Cell] {
        self.cells.get_or_init(|| compute_cells(self))
    }

    /// Vertices of the common refinement, sorted.
    pub fn subdivision_vertices(&self) -> Vec<RationalPoint> {
        let mut vs: Vec<RationalPoint> = self
            .cells()
            .iter()
            .flat_map(|c| c.polytope.vertices().iter().cloned())
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// `∫_□ (2 + deg Φ)` exactly.
    pub fn fiber_volume(&self) -> Rational {
        let mut total = Rational::new();
        for cell in self.cells() {
            for s in cell.polytope.triangulate() {
                let vol = simplex_volume(&s);
                let mut avg = Rational::new();
                for v in &s {
                    avg += Rational::from(2) + self.deg(&v.0);
                }
                avg /= Rational::from(s.len());
                total += vol * avg;
            }
        }
        total
    }
}

fn compute_cells(dp: &DivisorialPolytope) -> Vec<Cell> {
    let n = dp.dim();
    let mut partial: Vec<(Vec<Halfspace>, BTreeMap<MarkedPoint, usize>)> =
        vec![(dp.base.halfspaces(), BTreeMap::new())];
    for (y, f) in &dp.phi {
        let live: Vec<usize> = f.cells(&dp.base).into_iter().map(|(_, i)| i).collect();
        let mut next = Vec::new();
        for (hs, pieces) in &partial {
            for &i in &live {
                let mut h = hs.clone();
                h.extend(f.region(i));
                let Ok(p) = Polytope::from_halfspaces(n, &h) else {
                    continue;
                };
                if !p.is_full_dimensional() {
                    continue;
                }
                let mut pcs = pieces.clone();
                pcs.insert(y.clone(), i);
                next.push((p.halfspaces(), pcs));
            }
        }
        partial = next;
    }
    let mut cells: Vec<Cell> = partial
        .into_iter()
        .filter_map(|(hs, pieces)| {
            let polytope = Polytope::from_halfspaces(n, &hs).ok()?;
            Some(Cell { polytope, pieces })
        })
        .collect();
    cells.sort_by(|a, b| a.polytope.vertices().cmp(b.polytope.vertices()));
    cells
}

pub fn subdivision_cells(dp: &DivisorialPolytope) -> &[Cell] {
    dp.cells()
}

/// The five conditions on divisorial polytope data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Piecewise affine on a finite polyhedral subdivision of the box.
    PiecewiseAffine,
    /// Graph of every `Φ_y` has integral vertices.
    IntegralGraph,
    /// `deg Φ > -2` on the interior of the box.
    DegreeBound,
    /// Pieces of the form `(⟨v,u⟩ − μ + 1)/μ` with `(v, μ)` primitive.
    PieceForm,
    /// Facets with `deg Φ ≢ -2` have lattice distance 1 from the origin.
    LatticeDistance,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::PiecewiseAffine,
        Condition::IntegralGraph,
        Condition::DegreeBound,
        Condition::PieceForm,
        Condition::LatticeDistance,
    ];

    pub fn roman(self) -> &'static str {
        match self {
            Condition::PiecewiseAffine => "i",
            Condition::IntegralGraph => "ii",
            Condition::DegreeBound => "iii",
            Condition::PieceForm => "iv",
            Condition::LatticeDistance => "v",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Condition::PiecewiseAffine => "piecewise affine on a polyhedral subdivision",
            Condition::IntegralGraph => "graphs have integral vertices",
            Condition::DegreeBound => "deg Φ > -2 on the interior",
            Condition::PieceForm => "pieces of the form (<v,u> - μ + 1)/μ",
            Condition::LatticeDistance => "facets with deg Φ ≢ -2 at lattice distance 1",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.roman())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Option<Vec<String>>,
    pub marked: Option<MarkedPoint>,
    pub detail: String,
}

impl Witness {
    fn at(point: &RationalPoint, marked: Option<&MarkedPoint>, detail: String) -> Self {
        Witness {
            point: Some(point.0.iter().map(|c| c.to_string()).collect()),
            marked: marked.cloned(),
            detail,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.detail)?;
        if let Some(p) = &self.point {
            write!(f, " at ({})", p.join(", "))?;
        }
        if let Some(y) = &self.marked {
            write!(f, " for y = {y}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub passed: bool,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginPosition {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub results: Vec<ConditionResult>,
    pub origin: OriginPosition,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.results.iter().all(|r| r.passed) && self.origin != OriginPosition::Outside
    }

    pub fn first_failure(&self) -> Option<&ConditionResult> {
        self.results.iter().find(|r| !r.passed)
    }

    pub fn get(&self, c: Condition) -> &ConditionResult {
        self.results.iter().find(|r| r.condition == c).unwrap()
    }

    /// Error for the first failing condition, if any.
    pub fn to_error(&self) -> Option<GeometryError> {
        if let Some(r) = self.first_failure() {
            return Some(GeometryError::InvalidData {
                condition: r.condition,
                detail: r.witness.as_ref().map_or_else(String::new, |w| w.to_string()),
            });
        }
        (self.origin == OriginPosition::Outside)
            .then(|| GeometryError::Malformed("the box does not contain the origin".into()))
    }
}

/// Checks conditions (i)–(v); failures are reported with a witness.
pub fn validate(dp: &DivisorialPolytope) -> ValidationReport {
    let origin_pt = vec![Rational::new(); dp.dim()];
    let origin = if dp.base.contains_in_interior(&origin_pt) {
        OriginPosition::Interior
    } else if dp.base.contains(&origin_pt) {
        OriginPosition::Boundary
    } else {
        OriginPosition::Outside
    };
    let results = vec![
        check_piecewise(dp),
        check_integral_graph(dp),
        check_degree_bound(dp),
        check_piece_form(dp),
        check_lattice_distance(dp, origin),
    ];
    ValidationReport { results, origin }
}

fn pass(condition: Condition) -> ConditionResult {
    ConditionResult {
        condition,
        passed: true,
        witness: None,
        note: None,
    }
}

fn fail(condition: Condition, witness: Witness) -> ConditionResult {
    ConditionResult {
        condition,
        passed: false,
        witness: Some(witness),
        note: None,
    }
}

fn check_piecewise(dp: &DivisorialPolytope) -> ConditionResult {
    let covered: Rational = dp.cells().iter().map(|c| c.polytope.volume()).sum();
    let total = dp.base.volume();
    if covered != total {
        return fail(
            Condition::PiecewiseAffine,
            Witness {
                point: None,
                marked: None,
                detail: format!("cells cover volume {covered} of {total}"),
            },
        );
    }
    pass(Condition::PiecewiseAffine)
}

fn check_integral_graph(dp: &DivisorialPolytope) -> ConditionResult {
    if !dp.base.is_lattice() {
        let v = dp.base.vertices().iter().find(|v| !v.is_integral()).unwrap();
        return fail(
            Condition::IntegralGraph,
            Witness::at(v, None, "box vertex is not a lattice point".into()),
        );
    }
    for (y, f) in &dp.phi {
        for (cell, _) in f.cells(&dp.base) {
            for u in cell.vertices() {
                let val = f.eval(&u.0);
                if !u.is_integral() || *val.denom() != 1 {
                    return fail(
                        Condition::IntegralGraph,
                        Witness::at(u, Some(y), format!("graph vertex with value {val}")),
                    );
                }
            }
        }
    }
    pass(Condition::IntegralGraph)
}

fn check_degree_bound(dp: &DivisorialPolytope) -> ConditionResult {
    let minus_two = Rational::from(-2);
    let verts = dp.subdivision_vertices();
    for u in &verts {
        let d = dp.deg(&u.0);
        if d < minus_two {
            return fail(
                Condition::DegreeBound,
                Witness::at(u, None, format!("deg Φ = {d}")),
            );
        }
    }
    // A concave function attaining its minimum inside the box is constant.
    if verts.iter().all(|u| dp.deg(&u.0) == minus_two) {
        let c = dp.base.vertex_barycenter();
        return fail(
            Condition::DegreeBound,
            Witness::at(&c, None, "deg Φ ≡ -2".into()),
        );
    }
    pass(Condition::DegreeBound)
}

fn check_piece_form(dp: &DivisorialPolytope) -> ConditionResult {
    for (y, f) in &dp.phi {
        for p in f.pieces() {
            if p.v_mu().is_none() {
                return ConditionResult {
                    condition: Condition::PieceForm,
                    passed: false,
                    witness: Some(Witness {
                        point: None,
                        marked: Some(y.clone()),
                        detail: format!("piece {p} is not of the form (<v,u> - μ + 1)/μ with (v, μ) primitive"),
                    }),
                    note: None,
                };
            }
        }
    }
    pass(Condition::PieceForm)
}

fn check_lattice_distance(dp: &DivisorialPolytope, origin: OriginPosition) -> ConditionResult {
    let minus_two = Rational::from(-2);
    let verts = dp.subdivision_vertices();
    let mut note = None;
    for facet in dp.base.facets() {
        let h = &facet.halfspace;
        let on_facet: Vec<&RationalPoint> = verts.iter().filter(|u| h.slack(&u.0).cmp0().is_eq()).collect();
        if on_facet.iter().all(|u| dp.deg(&u.0) == minus_two) {
            continue;
        }
        if h.offset != 1 {
            let u = on_facet.iter().find(|u| dp.deg(&u.0) != minus_two).unwrap();
            return fail(
                Condition::LatticeDistance,
                Witness::at(
                    u,
                    None,
                    format!(
                        "facet <({}), u> <= {} has deg Φ ≢ -2 and lattice distance {}",
                        h.normal.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
                        h.offset,
                        h.offset
                    ),
                ),
            );
        }
    }
    if origin == OriginPosition::Boundary {
        note = Some("origin lies on the boundary of the box".to_string());
    }
    ConditionResult {
        note,
        ..pass(Condition::LatticeDistance)
    }
}

fn require_valid(dp: &DivisorialPolytope) -> Result<(), GeometryError> {
    match validate(dp).to_error() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// `(n+1)! · ∫_□ (2 + deg Φ)` for a box of dimension `n`, the anticanonical
/// degree of the `(n+1)`-dimensional variety.
pub fn degree(dp: &DivisorialPolytope) -> Result<Rational, GeometryError> {
    require_valid(dp)?;
    let mut f = Integer::from(1);
    for i in 2..=dp.dim() as u32 + 1 {
        f *= i;
    }
    Ok(dp.fiber_volume() * Rational::from(f))
}

/// The polytope `Δ_y ⊂ M_ℝ × ℝ` of a special fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberPolytope {
    pub polytope: Polytope,
    pub source: FiberChoice,
}

impl FiberPolytope {
    pub fn dim(&self) -> usize {
        self.polytope.ambient_dim()
    }
}

/// `Δ_y = {(u, a) : −1 − Σ_{z≠y} Φ_z(u) ≤ a ≤ 1 + Φ_y(u)}`; the generic
/// fiber uses `Φ_y ≡ 0`.
pub fn special_fiber(dp: &DivisorialPolytope, y: &FiberChoice) -> Result<FiberPolytope, GeometryError> {
    require_valid(dp)?;
    Ok(special_fiber_unchecked(dp, y))
}

pub(crate) fn special_fiber_unchecked(dp: &DivisorialPolytope, y: &FiberChoice) -> FiberPolytope {
    let n = dp.dim();
    let mut pts = Vec::new();
    for u in dp.subdivision_vertices() {
        let phi_y = match y {
            FiberChoice::Point(p) => dp.phi_at(p, &u.0),
            FiberChoice::Generic => Rational::new(),
        };
        let rest = dp.deg(&u.0) - phi_y.clone();
        let mut top = u.0.clone();
        top.push(Rational::from(1) + phi_y);
        let mut bottom = u.0.clone();
        bottom.push(Rational::from(-1) - rest);
        pts.push(RationalPoint(top));
        pts.push(RationalPoint(bottom));
    }
    let polytope = Polytope::from_points(n + 1, &pts).expect("special fiber over a full-dimensional box");
    FiberPolytope {
        polytope,
        source: y.clone(),
    }
}

/// Choices `y` for which at most one other support point has `Φ_z(0) ∉ ℤ`.
pub fn admissible_points(dp: &DivisorialPolytope) -> Result<Vec<FiberChoice>, GeometryError> {
    require_valid(dp)?;
    let zero = vec![Rational::new(); dp.dim()];
    let support = dp.support();
    let nonintegral: Vec<&MarkedPoint> = support
        .iter()
        .filter(|y| *dp.phi_at(y, &zero).denom() != 1)
        .collect();
    let mut out: Vec<FiberChoice> = support
        .iter()
        .filter(|y| nonintegral.iter().filter(|z| **z != *y).count() <= 1)
        .map(|y| FiberChoice::Point(y.clone()))
        .collect();
    if nonintegral.len() <= 1 {
        out.push(FiberChoice::Generic);
    }
    Ok(out)
}
