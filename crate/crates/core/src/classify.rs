//! Cox ring presentations and matching against the catalog.

use std::cmp::Ordering;
use std::fmt;

use rug::Rational;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::CatalogEntry;
use crate::geometry::{self, DivisorialPolytope, GeometryError, MarkedPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{} catalog entries match: {}", .0.len(), .0.join(", "))]
    AmbiguousMatch(Vec<String>),
}

/// A generator `T_F` for a graph facet of `Φ_y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphVariable {
    pub point: MarkedPoint,
    pub piece: usize,
    pub mu: u64,
}

/// A generator `S_G` for a facet of the box with `deg Φ|_G ≢ -2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxVariable {
    pub facet: usize,
}

/// `T^{μ(p0)} + c·T^{μ(p1)} + T^{μ(p)}`, as indices into the monomial list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trinomial {
    pub terms: [usize; 3],
    pub coefficient: MarkedPoint,
}

/// `Cox(X) = ℂ[T_F, S_G] / (trinomials)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoxPresentation {
    pub graph_variables: Vec<GraphVariable>,
    pub box_variables: Vec<BoxVariable>,
    /// Per support point, the variable indices of `T^{μ(y)}`.
    pub monomials: Vec<(MarkedPoint, Vec<usize>)>,
    pub relations: Vec<Trinomial>,
}

impl CoxPresentation {
    pub fn variable_count(&self) -> usize {
        self.graph_variables.len() + self.box_variables.len()
    }

    fn monomial_text(&self, i: usize) -> String {
        self.monomials[i]
            .1
            .iter()
            .map(|&v| {
                let mu = self.graph_variables[v].mu;
                if mu == 1 {
                    format!("T{}", v + 1)
                } else {
                    format!("T{}^{}", v + 1, mu)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Exponent multiset per monomial and number of free generators, sorted;
    /// equal for presentations that differ by relabeling.
    pub fn canonical_key(&self) -> CoxKey {
        let mut monomials: Vec<Vec<u64>> = self
            .monomials
            .iter()
            .map(|(_, vars)| {
                let mut e: Vec<u64> = vars.iter().map(|&v| self.graph_variables[v].mu).collect();
                e.sort_unstable_by(|a, b| b.cmp(a));
                e
            })
            .collect();
        monomials.sort();
        CoxKey {
            relations: self.relations.len(),
            monomials,
            free: self.box_variables.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CoxKey {
    pub relations: usize,
    pub monomials: Vec<Vec<u64>>,
    pub free: usize,
}

impl fmt::Display for CoxPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.relations.is_empty() {
            return write!(f, "polynomial ring in {} variables", self.variable_count());
        }
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|r| {
                let c = match &r.coefficient {
                    MarkedPoint::One => String::new(),
                    p => format!("{}*", p.key()),
                };
                format!(
                    "{} + {}{} + {}",
                    self.monomial_text(r.terms[0]),
                    c,
                    self.monomial_text(r.terms[1]),
                    self.monomial_text(r.terms[2])
                )
            })
            .collect();
        f.write_str(&rels.join(", "))
    }
}

/// Generators and trinomial relations read off the graph facets of the `Φ_y`
/// and the box facets.
pub fn cox_ring(dp: &DivisorialPolytope) -> Result<CoxPresentation, GeometryError> {
    if let Some(e) = geometry::validate(dp).to_error() {
        return Err(e);
    }
    let support = dp.support();
    let mut graph_variables = Vec::new();
    let mut monomials = Vec::new();
    for y in &support {
        let f = &dp.phi()[y];
        let mut active: Vec<usize> = f.cells(dp.base()).into_iter().map(|(_, i)| i).collect();
        active.sort_unstable();
        active.dedup();
        let mut vars = Vec::new();
        for i in active {
            let (_, mu) = f.pieces()[i].v_mu().ok_or_else(|| GeometryError::InvalidData {
                condition: geometry::Condition::PieceForm,
                detail: format!("piece {} of Φ_{}", f.pieces()[i], y),
            })?;
            vars.push(graph_variables.len());
            graph_variables.push(GraphVariable {
                point: y.clone(),
                piece: i,
                mu: mu.to_u64().expect("small exponent"),
            });
        }
        monomials.push((y.clone(), vars));
    }
    let verts = dp.subdivision_vertices();
    let minus_two = Rational::from(-2);
    let box_variables = dp
        .base()
        .facets()
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            verts
                .iter()
                .filter(|u| g.halfspace.slack(&u.0).cmp0() == Ordering::Equal)
                .any(|u| dp.deg(&u.0) != minus_two)
        })
        .map(|(facet, _)| BoxVariable { facet })
        .collect();
    let relations = (2..monomials.len())
        .map(|k| Trinomial {
            terms: [0, 1, k],
            coefficient: monomials[k].0.clone(),
        })
        .collect();
    Ok(CoxPresentation {
        graph_variables,
        box_variables,
        monomials,
        relations,
    })
}

/// The unique entry with the same degree and Cox presentation up to
/// relabeling; `None` if nothing matches.
pub fn match_catalog<'a>(
    dp: &DivisorialPolytope,
    catalog: &'a [CatalogEntry],
) -> Result<Option<&'a CatalogEntry>, ClassifyError> {
    let degree = geometry::degree(dp)?;
    let key = cox_ring(dp)?.canonical_key();
    let mut hits = Vec::new();
    for entry in catalog.iter().filter(|e| e.dp.dim() == dp.dim()) {
        if geometry::degree(&entry.dp)? != degree {
            continue;
        }
        if cox_ring(&entry.dp)?.canonical_key() == key {
            hits.push(entry);
        }
    }
    match hits.len() {
        0 => Ok(None),
        1 => Ok(Some(hits[0])),
        _ => Err(ClassifyError::AmbiguousMatch(hits.iter().map(|e| e.id.clone()).collect())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn cubic_presentation() {
        let c = cox_ring(&catalog::find("dp/13").unwrap().dp).unwrap();
        assert_eq!(c.to_string(), "T1*T2 + T3^4 + T4^2");
        assert_eq!(c.variable_count(), 4);
        assert_eq!(c.relations.len(), 1);
    }

    #[test]
    fn row_twelve_has_three_squares() {
        let c = cox_ring(&catalog::find("dp/12").unwrap().dp).unwrap();
        assert_eq!(c.to_string(), "T1^2 + T2^2 + T3^2");
        assert_eq!(c.variable_count(), 4);
        assert_eq!(c.box_variables.len(), 1);
    }

    #[test]
    fn generator_count_matches_picard_rank() {
        for e in catalog::builtin() {
            let c = cox_ring(&e.dp).unwrap();
            let rank = c.variable_count() - c.relations.len() - (e.dp.dim() + 1);
            assert_eq!(Some(rank as u32), e.expected.rho, "{}: {c}", e.id);
        }
    }

    #[test]
    fn cubic_matches_row_13() {
        let all = catalog::builtin();
        let hit = match_catalog(&catalog::find("dp/13").unwrap().dp, all).unwrap().unwrap();
        assert_eq!(hit.id, "dp/13");
    }

    #[test]
    fn every_builtin_matches_itself() {
        let all = catalog::builtin();
        for e in all {
            let hit = match_catalog(&e.dp, all).unwrap();
            assert_eq!(hit.map(|h| h.id.as_str()), Some(e.id.as_str()));
        }
    }
}
