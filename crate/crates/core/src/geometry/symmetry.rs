//! Lattice automorphisms of the box that preserve `deg Φ`.

use std::fmt;

use itertools::Itertools;
use rug::Rational;
use serde::{Deserialize, Serialize};

use super::divisorial::DivisorialPolytope;
use super::linalg::{self, Matrix};
use super::polytope::{Halfspace, Polytope, RationalPoint};

/// An integral matrix `σ` with `det σ = ±1` acting on `M` by `u ↦ σu`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symmetry {
    matrix: Matrix,
}

impl Symmetry {
    pub fn identity(n: usize) -> Self {
        Symmetry {
            matrix: linalg::identity(n),
        }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Symmetry {
            matrix: rows
                .iter()
                .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
                .collect(),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == linalg::identity(self.dim())
    }

    pub fn apply(&self, u: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.matrix, u)
    }

    /// The dual action `σ*` on `N`, i.e. the transpose.
    pub fn apply_dual(&self, v: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&linalg::transpose(&self.matrix), v)
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|x| x.numer().to_i64().unwrap_or(0)).collect())
            .collect()
    }
}

impl Serialize for Symmetry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_i64_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Symmetry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<i64>> = Vec::deserialize(d)?;
        Ok(Symmetry {
            matrix: rows
                .into_iter()
                .map(|r| r.into_iter().map(Rational::from).collect())
                .collect(),
        })
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_i64_rows()
            .iter()
            .map(|r| r.iter().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// All `σ` permuting the box vertices with `deg Φ ∘ σ = deg Φ`, identity
/// first.
pub fn symmetries(dp: &DivisorialPolytope) -> Vec<Symmetry> {
    let n = dp.dim();
    let verts = dp.base().vertices();
    let basis = independent_vertices(verts, n);
    let vmat: Matrix = basis.iter().map(|&i| verts[i].0.clone()).collect();
    let vinv = linalg::inverse(&linalg::transpose(&vmat)).expect("independent vertices");
    let mut found = Vec::new();
    for images in (0..verts.len()).permutations(n) {
        let wmat: Matrix = images.iter().map(|&i| verts[i].0.clone()).collect();
        let sigma = linalg::mat_mul(&linalg::transpose(&wmat), &vinv);
        if !sigma.iter().all(|r| linalg::is_integral(r)) {
            continue;
        }
        let det = linalg::det(&sigma);
        if det != 1 && det != -1 {
            continue;
        }
        let s = Symmetry { matrix: sigma };
        let mut imgs: Vec<RationalPoint> = verts.iter().map(|v| RationalPoint(s.apply(&v.0))).collect();
        imgs.sort();
        if imgs != verts {
            continue;
        }
        if preserves_degree(dp, &s) {
            found.push(s);
        }
    }
    found.sort();
    found.dedup();
    let id = Symmetry::identity(n);
    found.retain(|s| *s != id);
    found.insert(0, id);
    found
}

/// Indices of `n` linearly independent vertices, chosen greedily.
fn independent_vertices(verts: &[RationalPoint], n: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: Matrix = Vec::new();
    for (i, v) in verts.iter().enumerate() {
        rows.push(v.0.clone());
        if linalg::rank(&rows) == rows.len() {
            chosen.push(i);
            if chosen.len() == n {
                break;
            }
        } else {
            rows.pop();
        }
    }
    assert_eq!(chosen.len(), n, "box vertices must span M_ℝ");
    chosen
}

/// Exact check of `deg Φ(σu) = deg Φ(u)` on the common refinement of the
/// cells of `deg Φ` and their preimages under `σ`.
fn preserves_degree(dp: &DivisorialPolytope, s: &Symmetry) -> bool {
    let n = dp.dim();
    let cells = dp.cells();
    let st = linalg::transpose(s.matrix());
    for a in cells {
        for b in cells {
            let mut hs: Vec<Halfspace> = a.polytope.halfspaces();
            for h in b.polytope.halfspaces() {
                hs.push(Halfspace::new(linalg::mat_vec(&st, &h.normal), h.offset.clone()));
            }
            let Ok(p) = Polytope::from_halfspaces(n, &hs) else {
                continue;
            };
            for u in p.vertices() {
                if dp.deg(&s.apply(&u.0)) != dp.deg(&u.0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Rational basis of `{ξ ∈ N_ℝ : σᵀξ = ξ for all σ}`.
pub fn fixed_subspace(sigmas: &[Symmetry]) -> Vec<Vec<Rational>> {
    let Some(first) = sigmas.first() else {
        return Vec::new();
    };
    let n = first.dim();
    let mut rows: Matrix = Vec::new();
    for s in sigmas {
        let st = linalg::transpose(s.matrix());
        for (i, row) in st.iter().enumerate() {
            let mut r = row.clone();
            r[i] -= 1;
            rows.push(r);
        }
    }
    linalg::nullspace(&rows, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_fixes_vertical_axis() {
        let sigmas = vec![Symmetry::identity(2), Symmetry::from_ints(&[&[-1, 0], &[0, 1]])];
        let basis = fixed_subspace(&sigmas);
        assert_eq!(basis, vec![vec![Rational::new(), Rational::from(1)]]);
    }

    #[test]
    fn identity_fixes_everything() {
        assert_eq!(fixed_subspace(&[Symmetry::identity(2)]), linalg::identity(2));
        let flip = Symmetry::from_ints(&[&[-1]]);
        assert!(fixed_subspace(&[Symmetry::identity(1), flip]).is_empty());
    }
}
