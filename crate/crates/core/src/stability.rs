//! Futaki characters, soliton candidates and Donaldson-Futaki invariants.
//!
//! The Futaki character of the variety is evaluated over the generic special
//! fiber `Δ` (any choice gives the same integral once the last coordinate of
//! the lifted direction is zero):
//!
//! ```text
//! F_{X,ξ}(v) = ∫_Δ ⟨u', (v,0)⟩ e^{⟨u', (ξ,0)⟩} du'      (raw)
//! ```
//!
//! and divided by `vol Δ` for the normalized value. The soliton candidate is
//! the unique `ξ` with `F_{X,ξ} = 0`. For an admissible `y` the
//! Donaldson-Futaki invariant of the test configuration `(y, v, m)` is
//! `∫_{Δ_y} ⟨u', (−m v, m)⟩ e^{⟨u', (ξ,0)⟩} du'`, evaluated with `ξ`
//! ranging over the whole candidate box.

use std::cmp::Ordering;
use std::fmt;

use log::{debug, info};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expint::{ExpIntError, TriangulatedPolytope};
use crate::geometry::divisorial::special_fiber_unchecked;
use crate::geometry::{
    self, admissible_points, fixed_subspace, linalg, symmetries, DivisorialPolytope, FiberChoice,
    FiberPolytope, GeometryError, Symmetry,
};
use crate::par::{self, Parallelism};
use crate::rigor::{refine_precision, Interval, IntervalVector, Precision, RigorError, Sign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Integration(#[from] ExpIntError),
    #[error("no certified sign change of the Futaki character in [-{window}, {window}]")]
    NoSignChange { window: f64 },
    #[error("precision cap of {cap} bits reached before the sign was certified")]
    PrecisionExhausted { cap: u32 },
    #[error("boundary gradient not certified positive on face {face}, segment {segment} (lower bound {lower_bound:e})")]
    BoundaryFailure {
        face: usize,
        segment: usize,
        lower_bound: f64,
    },
    #[error("fiber choice {0} is not admissible")]
    InadmissibleY(String),
    #[error("{points} lattice points exceed the budget of {budget}")]
    TooLarge { points: String, budget: u64 },
    #[error("the soliton candidate search needs a non-trivial direction space")]
    NoDirections,
}

impl From<RigorError> for StabilityError {
    fn from(e: RigorError) -> Self {
        match e {
            RigorError::CapReached { cap } => StabilityError::PrecisionExhausted { cap },
            RigorError::InvalidPrecision { bits, .. } => StabilityError::PrecisionExhausted { cap: bits },
        }
    }
}

/// Search window for the 1-D bracket.
pub const SEARCH_WINDOW: f64 = 64.0;

/// Settings shared by the candidate search and the verdict pipeline.
#[derive(Clone, Debug)]
pub struct Config {
    pub precision: Precision,
    pub max_precision: Precision,
    /// Target width of a 1-D candidate interval.
    pub width_target: f64,
    /// Half-width of the 2-D candidate box.
    pub epsilon: f64,
    /// Segments per boundary face of the candidate box.
    pub segments: usize,
    pub parallelism: Parallelism,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision: Precision::DEFAULT,
            max_precision: Precision::DEFAULT_CAP,
            width_target: 1e-5,
            epsilon: 1e-5,
            segments: 3000,
            parallelism: Parallelism::Parallel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Raw,
    VolumeNormalized,
}

/// A Futaki character value, raw and divided by the polytope volume.
#[derive(Clone, Debug)]
pub struct FutakiEvaluation {
    pub raw: Interval,
    pub normalized: Interval,
    pub volume: Rational,
    pub xi: IntervalVector,
    pub direction: Vec<Rational>,
}

impl FutakiEvaluation {
    fn new(raw: Interval, volume: Rational, xi: IntervalVector, direction: Vec<Rational>) -> Self {
        let normalized = raw.mul_rational(&Rational::from(volume.recip_ref()));
        FutakiEvaluation {
            raw,
            normalized,
            volume,
            xi,
            direction,
        }
    }

    pub fn value(&self, n: Normalization) -> &Interval {
        match n {
            Normalization::Raw => &self.raw,
            Normalization::VolumeNormalized => &self.normalized,
        }
    }

    pub fn sign(&self) -> Sign {
        self.raw.sign()
    }
}

/// `(1/vol Δ) ∫_Δ ⟨u', v'⟩ e^{⟨u', ξ'⟩} du'`.
pub fn futaki_character(
    delta: &FiberPolytope,
    xi_prime: &IntervalVector,
    v_prime: &[Rational],
) -> Result<FutakiEvaluation, StabilityError> {
    let t = TriangulatedPolytope::new(&delta.polytope)?;
    futaki_on(&t, xi_prime, v_prime)
}

fn futaki_on(
    t: &TriangulatedPolytope,
    xi_prime: &IntervalVector,
    v_prime: &[Rational],
) -> Result<FutakiEvaluation, StabilityError> {
    let raw = t.integrate_linear_exp(xi_prime, v_prime)?;
    Ok(FutakiEvaluation::new(
        raw,
        t.volume().clone(),
        xi_prime.clone(),
        v_prime.to_vec(),
    ))
}

fn lift_xi(xi: &IntervalVector) -> IntervalVector {
    xi.extended(Interval::zero(xi.prec()))
}

fn lift_v(v: &[Rational]) -> Vec<Rational> {
    let mut w = v.to_vec();
    w.push(Rational::new());
    w
}

/// `F_{X,ξ}(v)` computed over the generic special fiber.
pub fn futaki(dp: &DivisorialPolytope, xi: &IntervalVector, v: &[Rational]) -> Result<FutakiEvaluation, StabilityError> {
    futaki_over(dp, &FiberChoice::Generic, xi, v)
}

/// `F_{X,ξ}(v)` computed over the special fiber `Δ_y`.
pub fn futaki_over(
    dp: &DivisorialPolytope,
    y: &FiberChoice,
    xi: &IntervalVector,
    v: &[Rational],
) -> Result<FutakiEvaluation, StabilityError> {
    let delta = geometry::special_fiber(dp, y)?;
    futaki_character(&delta, &lift_xi(xi), &lift_v(v))
}

/// Exact `∫_P ⟨w, u⟩ du`, the zero-field value of a linear integrand.
fn exact_linear_integral(t: &TriangulatedPolytope, w: &[Rational]) -> Rational {
    let mut total = Rational::new();
    for s in t.simplices() {
        let k = Rational::from(s.vertices().len());
        let mut mean = Rational::new();
        for v in s.vertices() {
            mean += linalg::dot(w, &v.0);
        }
        total += Rational::from(s.volume() * &mean) / k.clone();
    }
    total
}

/// A special test configuration `(y, v, m)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TestConfiguration {
    pub y: FiberChoice,
    pub v: Vec<i64>,
    pub m: u32,
}

impl TestConfiguration {
    pub fn product(y: FiberChoice, n: usize) -> Self {
        TestConfiguration { y, v: vec![0; n], m: 1 }
    }

    /// `v' = (−m·v, m)`.
    pub fn lifted_direction(&self) -> Vec<Rational> {
        let m = Rational::from(self.m);
        let mut w: Vec<Rational> = self.v.iter().map(|&x| Rational::from(-x) * m.clone()).collect();
        w.push(m);
        w
    }
}

impl fmt::Display for TestConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.v.iter().all(|&x| x == 0) {
            "0".to_string()
        } else {
            format!("({})", self.v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        };
        write!(f, "({}, {}, {})", self.y, v, self.m)
    }
}

/// Why `ξ = 0` is the candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroReason {
    /// The symmetry group fixes no non-zero vector.
    Symmetry,
    /// `F_{X,0}` vanishes exactly on a basis of the fixed subspace.
    ExactVanishing,
}

#[derive(Clone, Debug)]
pub enum Evidence {
    /// Certified sign change of `s ↦ F_{X,s·axis}(axis)` across `[lower, upper]`.
    Ivt1d {
        axis: Vec<Rational>,
        lower: Rational,
        upper: Rational,
        f_lower: Interval,
        f_upper: Interval,
        precision: Precision,
    },
    /// Certified outward gradient of `G` on every boundary segment of the box.
    BoxGradient {
        basis: Vec<Vec<Rational>>,
        center: Vec<Rational>,
        epsilon: Rational,
        segments: usize,
        min_gradient: Float,
        /// Lower bound of the outward gradient per face, faces ordered
        /// `(0,-), (0,+), (1,-), …`.
        face_minima: Vec<Float>,
        precision: Precision,
    },
    /// `ξ = 0` exactly.
    ZeroField {
        reason: ZeroReason,
        residuals: Vec<Rational>,
    },
}

impl Evidence {
    pub fn kind(&self) -> &'static str {
        match self {
            Evidence::Ivt1d { .. } => "ivt-1d",
            Evidence::BoxGradient { .. } => "box-gradient",
            Evidence::ZeroField { .. } => "zero-field",
        }
    }
}

/// A certified box containing the soliton vector field.
#[derive(Clone, Debug)]
pub struct SolitonCandidate {
    /// Exact rational bounds per coordinate of `N_ℝ`.
    pub bounds: Vec<(Rational, Rational)>,
    pub evidence: Evidence,
    pub symmetry_used: Option<Symmetry>,
}

impl SolitonCandidate {
    pub fn xi(&self, p: Precision) -> IntervalVector {
        self.bounds
            .iter()
            .map(|(lo, hi)| Interval::from_rational_bounds(lo, hi, p))
            .collect()
    }

    pub fn is_zero_field(&self) -> bool {
        matches!(self.evidence, Evidence::ZeroField { .. })
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|(lo, hi)| (Rational::from(lo + hi) / 2u32).to_f64())
            .collect()
    }

    pub fn width(&self) -> f64 {
        self.bounds
            .iter()
            .map(|(lo, hi)| Rational::from(hi - lo).to_f64())
            .fold(0.0, f64::max)
    }
}

/// Triangulated fibers reused across evaluations.
pub struct Prepared {
    dp: DivisorialPolytope,
    generic: TriangulatedPolytope,
    fibers: Vec<(FiberChoice, TriangulatedPolytope)>,
    admissible: Vec<FiberChoice>,
    symmetries: Vec<Symmetry>,
    basis: Vec<Vec<Rational>>,
}

impl Prepared {
    pub fn new(dp: &DivisorialPolytope) -> Result<Self, StabilityError> {
        if let Some(e) = geometry::validate(dp).to_error() {
            return Err(e.into());
        }
        let admissible = admissible_points(dp)?;
        let generic = TriangulatedPolytope::new(&special_fiber_unchecked(dp, &FiberChoice::Generic).polytope)?;
        let fibers = admissible
            .iter()
            .map(|y| {
                let t = TriangulatedPolytope::new(&special_fiber_unchecked(dp, y).polytope)?;
                Ok((y.clone(), t))
            })
            .collect::<Result<Vec<_>, StabilityError>>()?;
        let symmetries = symmetries(dp);
        let basis = fixed_subspace(&symmetries);
        Ok(Prepared {
            dp: dp.clone(),
            generic,
            fibers,
            admissible,
            symmetries,
            basis,
        })
    }

    pub fn dp(&self) -> &DivisorialPolytope {
        &self.dp
    }

    pub fn admissible(&self) -> &[FiberChoice] {
        &self.admissible
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    /// Basis of the symmetry-fixed subspace of `N_ℝ`.
    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.dp.dim()
    }

    fn fiber(&self, y: &FiberChoice) -> Option<&TriangulatedPolytope> {
        self.fibers.iter().find(|(z, _)| z == y).map(|(_, t)| t)
    }

    /// Raw `F_{X,ξ}(v)`.
    pub fn futaki_raw(&self, xi: &IntervalVector, v: &[Rational]) -> Result<Interval, StabilityError> {
        Ok(self.generic.integrate_linear_exp(&lift_xi(xi), &lift_v(v))?)
    }

    pub fn futaki(&self, xi: &IntervalVector, v: &[Rational]) -> Result<FutakiEvaluation, StabilityError> {
        futaki_on(&self.generic, &lift_xi(xi), &lift_v(v))
    }

    /// Exact `F_{X,0}(v)` (raw).
    pub fn futaki_at_zero(&self, v: &[Rational]) -> Rational {
        exact_linear_integral(&self.generic, &lift_v(v))
    }

    fn futaki_f64(&self, xi: &[f64], v: &[Rational]) -> f64 {
        let x = IntervalVector::from_f64s(xi, Precision::DEFAULT);
        self.futaki_raw(&x, v).map_or(f64::NAN, |i| i.mid_f64())
    }
}

fn rat(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite float")
}

fn scaled_axis(axis: &[Rational], s: &Rational) -> Vec<Rational> {
    axis.iter().map(|a| Rational::from(a * s)).collect()
}

fn sign_at(
    prep: &Prepared,
    axis: &[Rational],
    s: &Rational,
    p: &mut Precision,
    cap: Precision,
) -> Result<(Sign, Interval), StabilityError> {
    loop {
        let xi = IntervalVector::from_rationals(&scaled_axis(axis, s), *p);
        let f = prep.futaki_raw(&xi, axis)?;
        match f.sign() {
            Sign::Unknown => {
                // An exact zero never resolves; the caller treats it separately.
                if f.width_f64() == 0.0 {
                    return Ok((Sign::Unknown, f));
                }
                *p = refine_precision(*p, cap)?;
            }
            s => return Ok((s, f)),
        }
    }
}

/// Certified interval on `span(axis)` containing the soliton candidate.
pub fn candidate_1d(
    dp: &DivisorialPolytope,
    axis: &[Rational],
    hint: Option<f64>,
    config: &Config,
) -> Result<SolitonCandidate, StabilityError> {
    let prep = Prepared::new(dp)?;
    candidate_1d_prepared(&prep, axis, hint, config)
}

pub fn candidate_1d_prepared(
    prep: &Prepared,
    axis: &[Rational],
    hint: Option<f64>,
    config: &Config,
) -> Result<SolitonCandidate, StabilityError> {
    let axis_f: Vec<f64> = axis.iter().map(Rational::to_f64).collect();
    let f = |s: f64| {
        let xi: Vec<f64> = axis_f.iter().map(|a| a * s).collect();
        prep.futaki_f64(&xi, axis)
    };
    // Floating-point bracket: F is increasing along the axis.
    let s0 = hint.unwrap_or(0.0);
    let f0 = f(s0);
    let (mut a, mut b) = if f0 == 0.0 {
        (s0 - 1e-3, s0 + 1e-3)
    } else {
        let dir = if f0 < 0.0 { 1.0 } else { -1.0 };
        let mut step = 0.25;
        let mut prev = s0;
        loop {
            let s = s0 + dir * step;
            if s.abs() > SEARCH_WINDOW {
                return Err(StabilityError::NoSignChange { window: SEARCH_WINDOW });
            }
            if f(s).signum() != f0.signum() {
                break if dir > 0.0 { (prev, s) } else { (s, prev) };
            }
            prev = s;
            step *= 2.0;
        }
    };
    // Illinois refinement of the root estimate.
    let (mut fa, mut fb) = (f(a), f(b));
    let mut side = 0;
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) || fa == fb {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            break;
        }
        let fc = f(c);
        if fc == 0.0 {
            a = c;
            b = c;
            break;
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
            if side == -1 {
                fb /= 2.0;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa /= 2.0;
            }
            side = 1;
        }
    }
    let root = 0.5 * (a + b);
    let mut p = config.precision;
    let cap = config.max_precision;
    // Tight interval around the float root first.
    let mut delta = config.width_target / 4.0;
    for _ in 0..4 {
        let lo = rat(root - delta);
        let hi = rat(root + delta);
        let (sl, fl) = sign_at(prep, axis, &lo, &mut p, cap)?;
        let (sh, fh) = sign_at(prep, axis, &hi, &mut p, cap)?;
        if sl == Sign::Negative && sh == Sign::Positive {
            return Ok(ivt_candidate(axis, lo, hi, fl, fh, p));
        }
        delta /= 2.0;
    }
    // Fall back to certified bisection of the wide bracket.
    let mut lo = rat(a.min(root) - config.width_target);
    let mut hi = rat(b.max(root) + config.width_target);
    let (sl, mut fl) = sign_at(prep, axis, &lo, &mut p, cap)?;
    let (sh, mut fh) = sign_at(prep, axis, &hi, &mut p, cap)?;
    if sl != Sign::Negative || sh != Sign::Positive {
        return Err(StabilityError::NoSignChange { window: SEARCH_WINDOW });
    }
    let target = rat(config.width_target);
    while Rational::from(&hi - &lo) > target {
        let mid = Rational::from(&lo + &hi) / 2u32;
        let (sm, fm) = sign_at(prep, axis, &mid, &mut p, cap)?;
        match sm {
            Sign::Negative => {
                lo = mid;
                fl = fm;
            }
            Sign::Positive => {
                hi = mid;
                fh = fm;
            }
            Sign::Unknown => {
                // Exact zero at a rational point.
                return Ok(SolitonCandidate {
                    bounds: scaled_axis(axis, &mid).into_iter().map(|x| (x.clone(), x)).collect(),
                    evidence: Evidence::Ivt1d {
                        axis: axis.to_vec(),
                        lower: mid.clone(),
                        upper: mid,
                        f_lower: fm.clone(),
                        f_upper: fm,
                        precision: p,
                    },
                    symmetry_used: None,
                });
            }
        }
    }
    Ok(ivt_candidate(axis, lo, hi, fl, fh, p))
}

fn ivt_candidate(axis: &[Rational], lo: Rational, hi: Rational, fl: Interval, fh: Interval, p: Precision) -> SolitonCandidate {
    let bounds = axis
        .iter()
        .map(|a| {
            let x = Rational::from(a * &lo);
            let y = Rational::from(a * &hi);
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    SolitonCandidate {
        bounds,
        evidence: Evidence::Ivt1d {
            axis: axis.to_vec(),
            lower: lo,
            upper: hi,
            f_lower: fl,
            f_upper: fh,
            precision: p,
        },
        symmetry_used: None,
    }
}

/// Non-certified minimizer of `G(c) = ∫ e^{⟨u, Σ c_l b_l⟩}` over the generic
/// fiber, by damped Newton iteration on its gradient.
pub fn minimize_g(prep: &Prepared, basis: &[Vec<Rational>]) -> Vec<f64> {
    let k = basis.len();
    let n = prep.dim();
    let xi_of = |c: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| (0..k).map(|l| c[l] * basis[l][j].to_f64()).sum())
            .collect()
    };
    let grad = |c: &[f64]| -> Vec<f64> {
        let xi = xi_of(c);
        basis.iter().map(|b| prep.futaki_f64(&xi, b)).collect()
    };
    let norm = |g: &[f64]| g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut c = vec![0.0; k];
    let mut g = grad(&c);
    for _ in 0..100 {
        if norm(&g) < 1e-13 {
            break;
        }
        let h = 1e-6;
        let mut jac = vec![vec![0.0; k]; k];
        for j in 0..k {
            let mut cp = c.clone();
            cp[j] += h;
            let gp = grad(&cp);
            for i in 0..k {
                jac[i][j] = (gp[i] - g[i]) / h;
            }
        }
        let Some(step) = solve_f64(jac, g.iter().map(|x| -x).collect()) else {
            break;
        };
        let mut t = 1.0;
        let g0 = norm(&g);
        loop {
            let trial: Vec<f64> = c.iter().zip(&step).map(|(x, s)| x + t * s).collect();
            let gt = grad(&trial);
            if norm(&gt) < g0 || t < 1e-6 {
                c = trial;
                g = gt;
                break;
            }
            t /= 2.0;
        }
    }
    c
}

fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Certifies that `∇G` points outward on every boundary segment of the box
/// `Π [center_l ± ε]` (coordinates with respect to `basis`), which then
/// contains the minimizer of the convex function `G`, i.e. the candidate.
pub fn candidate_box(
    dp: &DivisorialPolytope,
    center: &[f64],
    epsilon: f64,
    segments: usize,
    config: &Config,
) -> Result<SolitonCandidate, StabilityError> {
    let prep = Prepared::new(dp)?;
    let basis = linalg::identity(prep.dim());
    candidate_box_prepared(&prep, &basis, center, epsilon, segments, config.precision, config.parallelism)
}

pub fn candidate_box_prepared(
    prep: &Prepared,
    basis: &[Vec<Rational>],
    center: &[f64],
    epsilon: f64,
    segments: usize,
    precision: Precision,
    parallelism: Parallelism,
) -> Result<SolitonCandidate, StabilityError> {
    let k = basis.len();
    assert_eq!(center.len(), k, "center needs one coordinate per basis vector");
    assert!(segments > 0 && epsilon > 0.0);
    let n = prep.dim();
    let center_q: Vec<Rational> = center.iter().map(|&c| rat(c)).collect();
    let eps = rat(epsilon);
    let lo: Vec<Rational> = center_q.iter().map(|c| Rational::from(c - &eps)).collect();
    let hi: Vec<Rational> = center_q.iter().map(|c| Rational::from(c + &eps)).collect();
    let faces: Vec<(usize, bool)> = (0..k).flat_map(|i| [(i, false), (i, true)]).collect();
    let cells_per_face = segments.pow(k.saturating_sub(1) as u32);
    let jobs: Vec<(usize, usize)> = (0..faces.len())
        .flat_map(|f| (0..cells_per_face).map(move |s| (f, s)))
        .collect();
    let p = precision;
    let width = Rational::from(&eps * 2u32) / Rational::from(segments);
    let results: Vec<Result<Interval, StabilityError>> = par::map(&jobs, parallelism, |&(f, s)| {
        let (i, upper) = faces[f];
        // Coordinates in the basis: fixed on face i, a segment cell elsewhere.
        let mut rest = s;
        let coords: Vec<Interval> = (0..k)
            .map(|l| {
                if l == i {
                    let c = if upper { &hi[l] } else { &lo[l] };
                    Interval::from_rational(c, p)
                } else {
                    let idx = rest % segments;
                    rest /= segments;
                    let a = &lo[l] + Rational::from(&width * idx as u32);
                    let b = if idx + 1 == segments {
                        hi[l].clone()
                    } else {
                        &lo[l] + Rational::from(&width * (idx + 1) as u32)
                    };
                    Interval::from_rational_bounds(&a, &b, p)
                }
            })
            .collect();
        let xi: IntervalVector = (0..n)
            .map(|j| {
                coords
                    .iter()
                    .zip(basis)
                    .fold(Interval::zero(p), |acc, (c, b)| acc + c.mul_rational(&b[j]))
            })
            .collect();
        let g = prep.futaki_raw(&xi, &basis[i])?;
        Ok(if upper { g } else { -g })
    });
    let mut face_minima: Vec<Option<Float>> = vec![None; faces.len()];
    for ((f, s), r) in jobs.iter().zip(results) {
        let g = r?;
        if g.sign() != Sign::Positive {
            return Err(StabilityError::BoundaryFailure {
                face: *f,
                segment: *s,
                lower_bound: g.lower_f64(),
            });
        }
        let slot = &mut face_minima[*f];
        if slot.as_ref().is_none_or(|m| g.lower() < m) {
            *slot = Some(g.lower().clone());
        }
    }
    let face_minima: Vec<Float> = face_minima.into_iter().map(|m| m.expect("every face has segments")).collect();
    let min_gradient = face_minima.iter().min_by(|a, b| a.partial_cmp(b).unwrap()).unwrap().clone();
    let bounds: Vec<(Rational, Rational)> = (0..n)
        .map(|j| {
            let mut a = Rational::new();
            let mut b = Rational::new();
            for l in 0..k {
                let c = &basis[l][j];
                match c.cmp0() {
                    Ordering::Greater => {
                        a += Rational::from(c * &lo[l]);
                        b += Rational::from(c * &hi[l]);
                    }
                    Ordering::Less => {
                        a += Rational::from(c * &hi[l]);
                        b += Rational::from(c * &lo[l]);
                    }
                    Ordering::Equal => {}
                }
            }
            (a, b)
        })
        .collect();
    Ok(SolitonCandidate {
        bounds,
        evidence: Evidence::BoxGradient {
            basis: basis.to_vec(),
            center: center_q,
            epsilon: eps,
            segments,
            min_gradient,
            face_minima,
            precision: p,
        },
        symmetry_used: None,
    })
}

/// The candidate for `dp`: exact zero when forced, else a 1-D interval or a
/// box in the symmetry-fixed subspace.
pub fn find_candidate(prep: &Prepared, config: &Config, hint: Option<f64>) -> Result<SolitonCandidate, StabilityError> {
    let nontrivial = prep.symmetries.iter().find(|s| !s.is_identity()).cloned();
    if prep.basis.is_empty() {
        return Ok(SolitonCandidate {
            bounds: vec![(Rational::new(), Rational::new()); prep.dim()],
            evidence: Evidence::ZeroField {
                reason: ZeroReason::Symmetry,
                residuals: Vec::new(),
            },
            symmetry_used: nontrivial,
        });
    }
    let residuals: Vec<Rational> = prep.basis.iter().map(|b| prep.futaki_at_zero(b)).collect();
    if residuals.iter().all(|r| r.cmp0() == Ordering::Equal) {
        return Ok(SolitonCandidate {
            bounds: vec![(Rational::new(), Rational::new()); prep.dim()],
            evidence: Evidence::ZeroField {
                reason: ZeroReason::ExactVanishing,
                residuals,
            },
            symmetry_used: nontrivial,
        });
    }
    let mut cand = if prep.basis.len() == 1 {
        let axis = prep.basis[0].clone();
        candidate_1d_prepared(prep, &axis, hint, config)?
    } else {
        let center = minimize_g(prep, &prep.basis);
        debug!("numeric center {center:?}");
        candidate_box_prepared(
            prep,
            &prep.basis,
            &center,
            config.epsilon,
            config.segments,
            config.precision,
            config.parallelism,
        )?
    };
    cand.symmetry_used = nontrivial;
    Ok(cand)
}

/// `DF` of the test configuration with `ξ` ranging over the candidate box.
pub fn donaldson_futaki(
    dp: &DivisorialPolytope,
    tc: &TestConfiguration,
    candidate: &SolitonCandidate,
    precision: Precision,
) -> Result<FutakiEvaluation, StabilityError> {
    let prep = Prepared::new(dp)?;
    donaldson_futaki_prepared(&prep, tc, candidate, precision)
}

pub fn donaldson_futaki_prepared(
    prep: &Prepared,
    tc: &TestConfiguration,
    candidate: &SolitonCandidate,
    precision: Precision,
) -> Result<FutakiEvaluation, StabilityError> {
    let fiber = prep
        .fiber(&tc.y)
        .ok_or_else(|| StabilityError::InadmissibleY(tc.y.to_string()))?;
    let v_prime = tc.lifted_direction();
    if candidate.is_zero_field() {
        let exact = exact_linear_integral(fiber, &v_prime);
        let raw = Interval::from_rational(&exact, precision);
        return Ok(FutakiEvaluation::new(
            raw,
            fiber.volume().clone(),
            IntervalVector::zeros(prep.dim() + 1, precision),
            v_prime,
        ));
    }
    let xi_prime = lift_xi(&candidate.xi(precision));
    futaki_on(fiber, &xi_prime, &v_prime)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Stable,
    Unstable,
    KahlerEinsteinCandidate,
    Indeterminate,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Stable => "Stable",
            Status::Unstable => "Unstable",
            Status::KahlerEinsteinCandidate => "KahlerEinsteinCandidate",
            Status::Indeterminate => "Indeterminate",
        })
    }
}

#[derive(Clone, Debug)]
pub struct DfResult {
    pub tc: TestConfiguration,
    pub value: FutakiEvaluation,
}

impl DfResult {
    pub fn sign(&self) -> Sign {
        self.value.sign()
    }
}

#[derive(Clone, Debug)]
pub struct StabilityVerdict {
    pub status: Status,
    pub candidate: Option<SolitonCandidate>,
    pub df_results: Vec<DfResult>,
    pub destabilizer: Option<TestConfiguration>,
    pub precision_used: Precision,
    pub admissible: Vec<FiberChoice>,
    pub symmetries: Vec<Symmetry>,
    pub note: Option<String>,
}

/// Candidate, admissible test configurations and their DF signs, with
/// precision escalation until every sign is certified or the cap is hit.
pub fn certify(dp: &DivisorialPolytope, config: &Config) -> Result<StabilityVerdict, StabilityError> {
    let prep = Prepared::new(dp)?;
    certify_prepared(&prep, config, None)
}

pub fn certify_prepared(prep: &Prepared, config: &Config, hint: Option<f64>) -> Result<StabilityVerdict, StabilityError> {
    let mut cfg = config.clone();
    let n = prep.dim();
    loop {
        let verdict = |status, candidate, df_results, destabilizer, note| StabilityVerdict {
            status,
            candidate,
            df_results,
            destabilizer,
            precision_used: cfg.precision,
            admissible: prep.admissible.clone(),
            symmetries: prep.symmetries.clone(),
            note,
        };
        let candidate = match find_candidate(prep, &cfg, hint) {
            Ok(c) => c,
            Err(e @ (StabilityError::PrecisionExhausted { .. }
            | StabilityError::NoSignChange { .. }
            | StabilityError::BoundaryFailure { .. })) => {
                match refine_precision(cfg.precision, cfg.max_precision) {
                    Ok(p) if !matches!(e, StabilityError::NoSignChange { .. }) => {
                        info!("candidate failed at {}: {e}; escalating", cfg.precision);
                        cfg.precision = p;
                        continue;
                    }
                    _ => return Ok(verdict(Status::Indeterminate, None, Vec::new(), None, Some(e.to_string()))),
                }
            }
            Err(e) => return Err(e),
        };
        if prep.admissible.is_empty() {
            return Ok(verdict(
                Status::Stable,
                Some(candidate),
                Vec::new(),
                None,
                Some("no admissible special fiber".into()),
            ));
        }
        let tcs: Vec<TestConfiguration> = prep
            .admissible
            .iter()
            .map(|y| TestConfiguration::product(y.clone(), n))
            .collect();
        let p = cfg.precision;
        let values: Vec<Result<FutakiEvaluation, StabilityError>> =
            par::map(&tcs, cfg.parallelism, |tc| donaldson_futaki_prepared(prep, tc, &candidate, p));
        let mut df_results = Vec::new();
        for (tc, v) in tcs.into_iter().zip(values) {
            df_results.push(DfResult { tc, value: v? });
        }
        if let Some(d) = df_results.iter().find(|r| r.sign() == Sign::Negative) {
            let destab = d.tc.clone();
            return Ok(verdict(Status::Unstable, Some(candidate), df_results, Some(destab), None));
        }
        if df_results.iter().all(|r| r.sign() == Sign::Positive) {
            return Ok(verdict(Status::Stable, Some(candidate), df_results, None, None));
        }
        if candidate.is_zero_field() {
            // Exact rational values: the unresolved ones vanish identically.
            return Ok(verdict(
                Status::KahlerEinsteinCandidate,
                Some(candidate),
                df_results,
                None,
                Some("F_X,0 = 0 and a special test configuration has DF = 0".into()),
            ));
        }
        match refine_precision(cfg.precision, cfg.max_precision) {
            Ok(p) => {
                cfg.precision = p;
                cfg.width_target /= 16.0;
            }
            Err(_) => {
                return Ok(verdict(
                    Status::Indeterminate,
                    Some(candidate),
                    df_results,
                    None,
                    Some("a DF sign stayed uncertified at the precision cap".into()),
                ))
            }
        }
    }
}

/// Re-checks a candidate's evidence from scratch.
pub fn verify_candidate(prep: &Prepared, candidate: &SolitonCandidate, parallelism: Parallelism) -> Result<bool, StabilityError> {
    match &candidate.evidence {
        Evidence::Ivt1d {
            axis,
            lower,
            upper,
            precision,
            ..
        } => {
            let fl = prep.futaki_raw(&IntervalVector::from_rationals(&scaled_axis(axis, lower), *precision), axis)?;
            let fh = prep.futaki_raw(&IntervalVector::from_rationals(&scaled_axis(axis, upper), *precision), axis)?;
            let exact = lower == upper && fl.contains_zero();
            let bounds_ok = candidate.bounds.len() == axis.len()
                && candidate.bounds.iter().zip(axis).all(|((a, b), x)| {
                    let s = Rational::from(x * lower);
                    let t = Rational::from(x * upper);
                    (a == &s && b == &t) || (a == &t && b == &s)
                });
            Ok(bounds_ok && (exact || (fl.sign() == Sign::Negative && fh.sign() == Sign::Positive)))
        }
        Evidence::BoxGradient {
            basis,
            center,
            epsilon,
            segments,
            precision,
            ..
        } => {
            let c: Vec<f64> = center.iter().map(Rational::to_f64).collect();
            if c.iter().zip(center).any(|(f, q)| rat(*f) != *q) {
                return Ok(false);
            }
            let redo = candidate_box_prepared(prep, basis, &c, epsilon.to_f64(), *segments, *precision, parallelism);
            Ok(match redo {
                Ok(r) => r.bounds == candidate.bounds,
                Err(StabilityError::BoundaryFailure { .. }) => false,
                Err(e) => return Err(e),
            })
        }
        Evidence::ZeroField { reason, .. } => {
            let zero_box = candidate.bounds.iter().all(|(a, b)| a.cmp0().is_eq() && b.cmp0().is_eq());
            let ok = match reason {
                ZeroReason::Symmetry => prep.basis.is_empty(),
                ZeroReason::ExactVanishing => prep.basis.iter().all(|b| prep.futaki_at_zero(b).cmp0().is_eq()),
            };
            Ok(zero_box && ok)
        }
    }
}

/// `lim_{k→∞}` of [`discrete_futaki`] is `DISCRETE_LIMIT_FACTOR` times the
/// normalized Futaki character.
pub const DISCRETE_LIMIT_FACTOR: i32 = -1;

/// `−w_k(v') / (k · l_k)` where `w_k = Σ ⟨u, v'⟩ e^{⟨u, ξ'⟩/k}` over the
/// lattice points `u` of `kΔ` and `l_k` is their number.
pub fn discrete_futaki(
    delta: &FiberPolytope,
    xi_prime: &IntervalVector,
    v_prime: &[Rational],
    k: u64,
    budget: u64,
    parallelism: Parallelism,
) -> Result<Interval, StabilityError> {
    let poly = &delta.polytope;
    let d = poly.ambient_dim();
    assert!(k > 0);
    assert_eq!(xi_prime.dim(), d);
    assert_eq!(v_prime.len(), d);
    let (x_lo, x_hi) = poly.first_coordinate_range(k);
    let xs: Vec<Integer> = {
        let mut v = Vec::new();
        let mut x = x_lo;
        while x <= x_hi {
            v.push(x.clone());
            x += 1;
        }
        v
    };
    let columns: Vec<Vec<geometry::LatticeColumn>> = par::map(&xs, parallelism, |x| poly.lattice_columns(k, x));
    let count: Integer = columns.iter().flatten().map(|c| c.len()).sum();
    if count > budget {
        return Err(StabilityError::TooLarge {
            points: count.to_string(),
            budget,
        });
    }
    let p = xi_prime.prec();
    let kq = Rational::from(k);
    let last_zero = xi_prime[d - 1].is_point() && xi_prime[d - 1].lower().is_zero();
    let flat: Vec<&geometry::LatticeColumn> = columns.iter().flatten().collect();
    let partial: Vec<Interval> = par::map(&flat, parallelism, |c| {
        let prefix: Vec<Rational> = c.prefix.iter().map(Rational::from).collect();
        let vp = linalg::dot(&prefix, &v_prime[..d - 1]);
        let scaled: Vec<Rational> = prefix.iter().map(|x| Rational::from(x / &kq)).collect();
        let head: Interval = xi_prime
            .iter()
            .take(d - 1)
            .zip(&scaled)
            .fold(Interval::zero(p), |acc, (x, s)| acc + x.mul_rational(s));
        if last_zero {
            // Σ_{a=lo}^{hi} (vp + a·v_last), in closed form.
            let len = Rational::from(c.len());
            let sum_a = Rational::from(&c.lo + &c.hi) * len.clone() / 2u32;
            let total = vp * len + Rational::from(&v_prime[d - 1] * &sum_a);
            head.exp().mul_rational(&total)
        } else {
            let mut acc = Interval::zero(p);
            let mut a = c.lo.clone();
            while a <= c.hi {
                let aq = Rational::from(&a);
                let w = &vp + Rational::from(&v_prime[d - 1] * &aq);
                if w.cmp0() != Ordering::Equal {
                    let t = &head + &xi_prime[d - 1].mul_rational(&Rational::from(&aq / &kq));
                    acc = acc + t.exp().mul_rational(&w);
                }
                a += 1;
            }
            acc
        }
    });
    let w = partial.into_iter().fold(Interval::zero(p), |acc, x| acc + x);
    let denom = &kq * Rational::from(&count);
    Ok(w.mul_rational(&(-Rational::from(denom.recip_ref()))))
}
