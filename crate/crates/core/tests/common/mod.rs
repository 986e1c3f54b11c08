//! Independent oracles and seeded property drivers shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

use ksol::catalog::{self, CatalogEntry};
use ksol::expint::TriangulatedPolytope;
use ksol::geometry::{self, FiberChoice, MarkedPoint, Polytope, RationalPoint};
use ksol::par::Parallelism;
use ksol::stability::{self, Config, Prepared};
use ksol::{Interval, IntervalVector, Precision};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unimplemented!("oracle covers dimensions 1 to 3"),
    }
}

/// `∫_S w(u) e^{⟨ξ,u⟩} du` over a simplex by a collapsed-coordinate
/// Gauss-Legendre product rule, `w = 1` or `⟨v,u⟩`.
pub fn simplex_quadrature(verts: &[Vec<f64>], xi: &[f64], v: Option<&[f64]>) -> f64 {
    let d = verts.len() - 1;
    let edges: Vec<Vec<f64>> = (1..=d).map(|i| verts[i].iter().zip(&verts[0]).map(|(a, b)| a - b).collect()).collect();
    let vol_factor = det(&edges).abs();
    if vol_factor == 0.0 {
        return 0.0;
    }
    let ts: Vec<f64> = verts.iter().map(|p| dot(p, xi)).collect();
    let spread = ts.iter().cloned().fold(f64::MIN, f64::max) - ts.iter().cloned().fold(f64::MAX, f64::min);
    let n = (spread / 2.0).ceil() as usize + 14;
    let gl = gauss_legendre(n);
    let eval = |lam: &[f64]| -> f64 {
        let x: Vec<f64> = (0..verts[0].len())
            .map(|k| verts[0][k] + (0..d).map(|i| lam[i] * edges[i][k]).sum::<f64>())
            .collect();
        let w = v.map_or(1.0, |v| dot(&x, v));
        w * dot(&x, xi).exp()
    };
    let mut total = 0.0;
    match d {
        1 => {
            for &(a, wa) in &gl {
                total += wa * eval(&[a]);
            }
        }
        2 => {
            for &(a, wa) in &gl {
                for &(b, wb) in &gl {
                    total += wa * wb * (1.0 - a) * eval(&[a, (1.0 - a) * b]);
                }
            }
        }
        3 => {
            for &(a, wa) in &gl {
                for &(b, wb) in &gl {
                    let jab = (1.0 - a) * (1.0 - a) * (1.0 - b);
                    for &(c, wc) in &gl {
                        total += wa * wb * wc * jab * eval(&[a, (1.0 - a) * b, (1.0 - a) * (1.0 - b) * c]);
                    }
                }
            }
        }
        _ => unimplemented!(),
    }
    total * vol_factor
}

fn f64s(p: &RationalPoint) -> Vec<f64> {
    p.0.iter().map(Rational::to_f64).collect()
}

fn centroid(ps: &[Vec<f64>]) -> Vec<f64> {
    let n = ps.len() as f64;
    (0..ps[0].len()).map(|k| ps.iter().map(|p| p[k]).sum::<f64>() / n).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Cyclic order of coplanar points around their centroid.
fn angular_order(ps: &[Vec<f64>], normal: Option<&[f64]>) -> Vec<Vec<f64>> {
    let c = centroid(ps);
    let e1 = sub(&ps[0], &c);
    let e2 = match normal {
        Some(n) => cross(n, &e1),
        None => vec![-e1[1], e1[0]],
    };
    let mut tagged: Vec<(f64, Vec<f64>)> = ps
        .iter()
        .map(|p| {
            let w = sub(p, &c);
            (dot(&w, &e2).atan2(dot(&w, &e1)), p.clone())
        })
        .collect();
    tagged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    tagged.into_iter().map(|(_, p)| p).collect()
}

/// Fan from the vertex centroid over facets, each facet fanned from its own
/// centroid; unrelated to the library's pulling triangulation.
pub fn centroid_fan(poly: &Polytope) -> Vec<Vec<Vec<f64>>> {
    let verts: Vec<Vec<f64>> = poly.vertices().iter().map(f64s).collect();
    let c = centroid(&verts);
    match poly.ambient_dim() {
        1 => vec![vec![verts[0].clone(), verts[verts.len() - 1].clone()]],
        2 => {
            let ring = angular_order(&verts, None);
            (0..ring.len()).map(|i| vec![c.clone(), ring[i].clone(), ring[(i + 1) % ring.len()].clone()]).collect()
        }
        3 => {
            let mut out = Vec::new();
            for f in poly.facets() {
                let fv: Vec<Vec<f64>> = f.vertices.iter().map(|&i| verts[i].clone()).collect();
                let normal: Vec<f64> = f.halfspace.normal.iter().map(Rational::to_f64).collect();
                let ring = angular_order(&fv, Some(&normal));
                let fc = centroid(&fv);
                for i in 0..ring.len() {
                    out.push(vec![c.clone(), fc.clone(), ring[i].clone(), ring[(i + 1) % ring.len()].clone()]);
                }
            }
            out
        }
        _ => unimplemented!(),
    }
}

pub fn oracle_integral(poly: &Polytope, xi: &[f64], v: Option<&[f64]>) -> f64 {
    centroid_fan(poly).iter().map(|s| simplex_quadrature(s, xi, v)).sum()
}

/// Full-dimensional hull of at most `max_points` random points with
/// coordinates `k/4 ∈ [-5, 5]`.
pub fn random_polytope(rng: &mut impl Rng, dim: usize, max_points: usize) -> Polytope {
    loop {
        let n = rng.gen_range(dim + 1..=max_points);
        let pts: Vec<RationalPoint> = (0..n)
            .map(|_| RationalPoint::new((0..dim).map(|_| q(rng.gen_range(-20..=20), 4)).collect()))
            .collect();
        if let Ok(p) = Polytope::from_points(dim, &pts) {
            if p.is_full_dimensional() && p.vertices().len() <= max_points {
                return p;
            }
        }
    }
}

pub fn random_xi(rng: &mut impl Rng, dim: usize, max_norm: f64) -> Vec<Rational> {
    loop {
        let x: Vec<Rational> = (0..dim).map(|_| q(rng.gen_range(-3000..=3000), 1000)).collect();
        let norm: f64 = x.iter().map(|c| c.to_f64().powi(2)).sum::<f64>().sqrt();
        if norm <= max_norm {
            return x;
        }
    }
}

fn rel_dev(i: &Interval, exact: f64) -> (f64, f64) {
    let scale = exact.abs().max(1e-300);
    (i.width_f64() / scale, (i.mid_f64() - exact).abs() / scale)
}

/// Library integrals against quadrature on random polytopes.
pub fn expint_oracle_suite(instances: usize, seed: u64) -> Result<String, String> {
    let p = Precision::new(106).unwrap();
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for case in 0..instances {
        let dim = 1 + case % 3;
        let poly = random_polytope(&mut r, dim, 8);
        let xi = random_xi(&mut r, dim, 3.0);
        let xf: Vec<f64> = xi.iter().map(Rational::to_f64).collect();
        let t = TriangulatedPolytope::new(&poly).map_err(|e| e.to_string())?;
        let got = t.integrate_exp(&IntervalVector::from_rationals(&xi, p)).map_err(|e| e.to_string())?;
        let want = oracle_integral(&poly, &xf, None);
        let (w, d) = rel_dev(&got, want);
        worst = worst.max(w).max(d);
        if w > 1e-6 || d > 1e-6 {
            return Err(format!("case {case} (dim {dim}): {got} vs oracle {want:e}, rel width {w:e}, rel dev {d:e}"));
        }
        // A linear weight, compared at the scale of the unweighted integral.
        let v: Vec<Rational> = (0..dim).map(|_| q(r.gen_range(-3..=3), 1)).collect();
        let vf: Vec<f64> = v.iter().map(Rational::to_f64).collect();
        let got = t
            .integrate_linear_exp(&IntervalVector::from_rationals(&xi, p), &v)
            .map_err(|e| e.to_string())?;
        let want_v = oracle_integral(&poly, &xf, Some(&vf));
        let scale = want.abs() * (1.0 + vf.iter().map(|x| x.abs()).sum::<f64>() * 5.0);
        if (got.mid_f64() - want_v).abs() > 1e-6 * scale || got.width_f64() > 1e-6 * scale {
            return Err(format!("case {case}: weighted {got} vs oracle {want_v:e}"));
        }
    }
    Ok(format!("{instances} instances, worst relative deviation {worst:.1e}"))
}

/// `exp` enclosures against an exact rational Taylor bracket.
pub fn exp_series_suite(samples: usize, seed: u64) -> Result<String, String> {
    let mut r = rng(seed);
    for i in 0..samples {
        let x = q(r.gen_range(-40_000..=40_000), r.gen_range(1000..=3000));
        let bits = [11u32, 53, 106, 300][i % 4];
        let p = Precision::new(bits).unwrap();
        let e = Interval::from_rational(&x, p).exp();
        let (lo, hi) = series_bracket(&x);
        let lo_f = Float::with_val(2000, &lo);
        let hi_f = Float::with_val(2000, &hi);
        if *e.lower() > hi_f || *e.upper() < lo_f {
            return Err(format!("exp({x}) at {bits} bits: {e} misses the series bracket"));
        }
        let rel = e.width_f64() / e.mid_f64().abs().max(f64::MIN_POSITIVE);
        let allowed = 2f64.powi(-(bits as i32) + 6) * (1.0 + x.to_f64().abs());
        if rel > allowed {
            return Err(format!("exp({x}) at {bits} bits too wide: {rel:e}"));
        }
    }
    Ok(format!("{samples} samples"))
}

/// Rational bracket of `e^x`: `e^{|x|}` summed to a tail below `2^{-400}`
/// relative, inverted for negative `x`.
fn series_bracket(x: &Rational) -> (Rational, Rational) {
    let a = Rational::from(x.abs_ref());
    let mut term = Rational::from(1);
    let mut sum = Rational::from(1);
    let mut k = 1u32;
    let two_400 = Rational::from(rug::Integer::from(1) << 400u32);
    loop {
        term = term * a.clone() / k;
        sum += &term;
        k += 1;
        // Tail after term k-1 is at most term·a/k / (1 - a/k) once k > 2a.
        if k > Rational::from(&a * 2u32) && Rational::from(&term * &two_400) < sum {
            break;
        }
    }
    let tail = term * a.clone() / k * 2u32;
    let (lo, hi) = (sum.clone(), sum + tail);
    if x.cmp0().is_lt() {
        (hi.recip(), lo.recip())
    } else {
        (lo, hi)
    }
}

fn some_xi(r: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| q(r.gen_range(-800..=800), 1000)).collect()
}

/// `F_{X,ξ}` agrees over every marked point and the generic fiber.
pub fn fiber_independence_suite(seed: u64) -> Result<String, String> {
    let p = Precision::DEFAULT;
    let mut r = rng(seed);
    let mut checks = 0;
    for e in catalog::builtin() {
        let n = e.dp.dim();
        let mut choices: Vec<FiberChoice> = e.dp.phi().keys().cloned().map(FiberChoice::Point).collect();
        choices.push(FiberChoice::Generic);
        let xi = IntervalVector::from_rationals(&some_xi(&mut r, n), p);
        let v: Vec<Rational> = (0..n).map(|_| q(r.gen_range(-2..=2), 1)).collect();
        let base = stability::futaki_over(&e.dp, &FiberChoice::Generic, &xi, &v).map_err(|x| x.to_string())?;
        for y in &choices {
            let f = stability::futaki_over(&e.dp, y, &xi, &v).map_err(|x| x.to_string())?;
            if !f.raw.overlaps(&base.raw) || f.raw.width_f64() > 1e-8 * (1.0 + base.raw.mid_f64().abs()) {
                return Err(format!("{} y={y}: {} vs generic {}", e.id, f.raw, base.raw));
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} fiber comparisons"))
}

/// `F(a v + b w) = a F(v) + b F(w)`.
pub fn linearity_suite(seed: u64) -> Result<String, String> {
    let p = Precision::DEFAULT;
    let mut r = rng(seed);
    for e in catalog::builtin() {
        let n = e.dp.dim();
        let prep = Prepared::new(&e.dp).map_err(|x| x.to_string())?;
        let xi = IntervalVector::from_rationals(&some_xi(&mut r, n), p);
        let v: Vec<Rational> = (0..n).map(|_| q(r.gen_range(-3..=3), 1)).collect();
        let w: Vec<Rational> = (0..n).map(|_| q(r.gen_range(-3..=3), 1)).collect();
        let (a, b) = (q(r.gen_range(-5..=5), 2), q(r.gen_range(-5..=5), 3));
        let comb: Vec<Rational> = v.iter().zip(&w).map(|(x, y)| Rational::from(&a * x) + Rational::from(&b * y)).collect();
        let lhs = prep.futaki_raw(&xi, &comb).map_err(|x| x.to_string())?;
        let fv = prep.futaki_raw(&xi, &v).map_err(|x| x.to_string())?;
        let fw = prep.futaki_raw(&xi, &w).map_err(|x| x.to_string())?;
        let rhs = fv.mul_rational(&a) + fw.mul_rational(&b);
        if !lhs.overlaps(&rhs) {
            return Err(format!("{}: {lhs} vs {rhs}", e.id));
        }
    }
    Ok(format!("{} entries", catalog::builtin().len()))
}

/// `F_ξ(v) = F_{σᵀξ}(σᵀv)` for every symmetry `σ`.
pub fn equivariance_suite(seed: u64) -> Result<String, String> {
    let p = Precision::DEFAULT;
    let mut r = rng(seed);
    let mut checks = 0;
    for e in catalog::builtin() {
        let prep = Prepared::new(&e.dp).map_err(|x| x.to_string())?;
        let n = e.dp.dim();
        for s in prep.symmetries().iter().filter(|s| !s.is_identity()) {
            let xi = some_xi(&mut r, n);
            let v: Vec<Rational> = (0..n).map(|_| q(r.gen_range(-3..=3), 1)).collect();
            let a = prep
                .futaki_raw(&IntervalVector::from_rationals(&xi, p), &v)
                .map_err(|x| x.to_string())?;
            let b = prep
                .futaki_raw(&IntervalVector::from_rationals(&s.apply_dual(&xi), p), &s.apply_dual(&v))
                .map_err(|x| x.to_string())?;
            if !a.overlaps(&b) {
                return Err(format!("{} σ={s}: {a} vs {b}", e.id));
            }
            checks += 1;
        }
    }
    if checks == 0 {
        return Err("no symmetric entries".into());
    }
    Ok(format!("{checks} symmetric evaluations"))
}

pub const DISCRETE_KS: [u64; 4] = [10, 20, 40, 80];

/// Errors `|D_k − (−F_normalized)|` for a special fiber at the entry's
/// certified candidate.
pub fn discrete_errors(entry: &CatalogEntry, y: &FiberChoice) -> Result<(f64, Vec<f64>), String> {
    let prep = Prepared::new(&entry.dp).map_err(|x| x.to_string())?;
    let cand = stability::find_candidate(&prep, &Config::default(), None).map_err(|x| x.to_string())?;
    let xi_mid: Vec<Rational> = cand
        .bounds
        .iter()
        .map(|(a, b)| Rational::from(a + b) / 2u32)
        .collect();
    let p = Precision::DEFAULT;
    let mut xi_prime = xi_mid.clone();
    xi_prime.push(Rational::new());
    let xi_prime = IntervalVector::from_rationals(&xi_prime, p);
    let mut v = vec![Rational::new(); entry.dp.dim()];
    v.push(Rational::from(1));
    let delta = geometry::special_fiber(&entry.dp, y).map_err(|x| x.to_string())?;
    let f = stability::futaki_character(&delta, &xi_prime, &v).map_err(|x| x.to_string())?;
    let limit = f.normalized.mid_f64() * stability::DISCRETE_LIMIT_FACTOR as f64;
    let mut errs = Vec::new();
    for k in DISCRETE_KS {
        let d = stability::discrete_futaki(&delta, &xi_prime, &v, k, 50_000_000, Parallelism::Parallel)
            .map_err(|x| x.to_string())?;
        errs.push((d.mid_f64() - limit).abs());
    }
    Ok((limit, errs))
}

/// Discrete Futaki sums approach the integral as `k` doubles.
pub fn discrete_convergence_suite() -> Result<String, String> {
    let cases = [
        ("dp/13", FiberChoice::Point(MarkedPoint::Infinity)),
        ("3fold/2.30", FiberChoice::Point(MarkedPoint::Zero)),
    ];
    let mut summary = Vec::new();
    for (id, y) in cases {
        let e = catalog::find(id).unwrap();
        let (limit, errs) = discrete_errors(e, &y)?;
        for w in errs.windows(2) {
            if !(w[1] < w[0]) {
                return Err(format!("{id}: errors {errs:?} not decreasing (limit {limit})"));
            }
        }
        if !(errs[3] < errs[0] / 4.0) {
            return Err(format!("{id}: errors {errs:?} do not shrink like 1/k"));
        }
        summary.push(format!("{id} y={y}: {:.1e} → {:.1e}", errs[0], errs[3]));
    }
    Ok(summary.join("; "))
}

/// Divided differences stay narrow and change little under `10⁻¹²`
/// perturbations of `ξ`, including at coincident nodes.
pub fn continuity_suite(instances: usize, seed: u64) -> Result<String, String> {
    let p = Precision::new(106).unwrap();
    let mut r = rng(seed);
    let eps = q(1, 1_000_000_000_000);
    for case in 0..instances {
        let dim = 1 + case % 3;
        let pts: Vec<RationalPoint> = (0..=dim)
            .map(|_| RationalPoint::new((0..dim).map(|_| q(r.gen_range(-12..=12), 4)).collect()))
            .collect();
        let refs: Vec<&RationalPoint> = pts.iter().collect();
        // Coincident nodes: ξ orthogonal to a difference of points, or zero.
        let xi: Vec<Rational> = if case % 2 == 0 {
            vec![Rational::new(); dim]
        } else {
            random_xi(&mut r, dim, 3.0)
        };
        let dir: Vec<Rational> = (0..dim).map(|_| q(r.gen_range(-1000..=1000), 1000) * eps.clone()).collect();
        let moved: Vec<Rational> = xi.iter().zip(&dir).map(|(a, b)| Rational::from(a + b)).collect();
        let a = ksol::expint::exp_divided_difference(&refs, &IntervalVector::from_rationals(&xi, p));
        let b = ksol::expint::exp_divided_difference(&refs, &IntervalVector::from_rationals(&moved, p));
        let scale = a.mid_f64().abs().max(1e-300);
        // The exponent moves by at most ~ 5·dim·1e-12.
        if (a.mid_f64() - b.mid_f64()).abs() > 1e-10 * scale || a.width_f64() > 1e-20 * scale.max(1.0) || b.width_f64() > 1e-20 * scale.max(1.0) {
            return Err(format!("case {case}: {a} vs {b}"));
        }
    }
    Ok(format!("{instances} perturbed node sets"))
}
