//! Serializable records of candidates and verdicts.
//!
//! Interval endpoints are written as outward-rounded decimals; everything a
//! re-check needs (box bounds, axes, centers, precisions) is written exactly
//! as rationals so that a parsed report can be re-verified.

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogEntry};
use crate::classify;
use crate::geometry;
use crate::rigor::{Interval, Precision, Sign};
use crate::stability::{Evidence, SolitonCandidate, StabilityVerdict, Status, ZeroReason};

/// Significant digits of decimal endpoints.
pub const DIGITS: usize = 17;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub lower: String,
    pub upper: String,
}

impl IntervalRecord {
    pub fn new(x: &Interval) -> Self {
        let (lower, upper) = x.to_decimal(DIGITS);
        IntervalRecord { lower, upper }
    }

    pub fn to_interval(&self, p: Precision) -> Option<Interval> {
        Interval::from_decimal_bounds(&self.lower, &self.upper, p)
    }
}

fn rats(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn parse_rats(xs: &[String]) -> Result<Vec<Rational>, String> {
    xs.iter().map(|x| catalog::parse_rational(x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EvidenceRecord {
    Ivt1d {
        axis: Vec<String>,
        lower: String,
        upper: String,
        f_lower: IntervalRecord,
        f_upper: IntervalRecord,
        precision: u32,
    },
    BoxGradient {
        basis: Vec<Vec<String>>,
        center: Vec<String>,
        epsilon: String,
        segments: usize,
        min_gradient_lower: String,
        face_minima_lower: Vec<String>,
        precision: u32,
    },
    ZeroField {
        reason: ZeroReason,
        residuals: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    /// Exact `[lower, upper]` per coordinate.
    pub bounds: Vec<[String; 2]>,
    pub midpoint: Vec<String>,
    pub evidence: EvidenceRecord,
    pub symmetry: Option<Vec<Vec<i64>>>,
}

fn float_lower(x: &rug::Float) -> String {
    Interval::from_floats(x.clone(), x.clone()).to_decimal(DIGITS).0
}

impl CandidateRecord {
    pub fn new(c: &SolitonCandidate) -> Self {
        let evidence = match &c.evidence {
            Evidence::Ivt1d {
                axis,
                lower,
                upper,
                f_lower,
                f_upper,
                precision,
            } => EvidenceRecord::Ivt1d {
                axis: rats(axis),
                lower: lower.to_string(),
                upper: upper.to_string(),
                f_lower: IntervalRecord::new(f_lower),
                f_upper: IntervalRecord::new(f_upper),
                precision: precision.bits(),
            },
            Evidence::BoxGradient {
                basis,
                center,
                epsilon,
                segments,
                min_gradient,
                face_minima,
                precision,
            } => EvidenceRecord::BoxGradient {
                basis: basis.iter().map(|b| rats(b)).collect(),
                center: rats(center),
                epsilon: epsilon.to_string(),
                segments: *segments,
                min_gradient_lower: float_lower(min_gradient),
                face_minima_lower: face_minima.iter().map(float_lower).collect(),
                precision: precision.bits(),
            },
            Evidence::ZeroField { reason, residuals } => EvidenceRecord::ZeroField {
                reason: reason.clone(),
                residuals: rats(residuals),
            },
        };
        CandidateRecord {
            bounds: c.bounds.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
            midpoint: c.midpoint().iter().map(|x| format!("{x:.10}")).collect(),
            evidence,
            symmetry: c.symmetry_used.as_ref().map(|s| s.to_i64_rows()),
        }
    }

    /// Rebuilds the candidate; the result is only trusted after
    /// [`crate::stability::verify_candidate`].
    pub fn to_candidate(&self) -> Result<SolitonCandidate, String> {
        let bounds = self
            .bounds
            .iter()
            .map(|[a, b]| Ok((catalog::parse_rational(a)?, catalog::parse_rational(b)?)))
            .collect::<Result<Vec<_>, String>>()?;
        let prec = |bits: u32| Precision::new(bits).map_err(|e| e.to_string());
        let evidence = match &self.evidence {
            EvidenceRecord::Ivt1d {
                axis,
                lower,
                upper,
                f_lower,
                f_upper,
                precision,
            } => {
                let p = prec(*precision)?;
                Evidence::Ivt1d {
                    axis: parse_rats(axis)?,
                    lower: catalog::parse_rational(lower)?,
                    upper: catalog::parse_rational(upper)?,
                    f_lower: f_lower.to_interval(p).ok_or("bad f_lower")?,
                    f_upper: f_upper.to_interval(p).ok_or("bad f_upper")?,
                    precision: p,
                }
            }
            EvidenceRecord::BoxGradient {
                basis,
                center,
                epsilon,
                segments,
                min_gradient_lower,
                face_minima_lower,
                precision,
            } => {
                let p = prec(*precision)?;
                let lower = |s: &str| {
                    Interval::from_decimal_bounds(s, s, p)
                        .map(|i| i.lower().clone())
                        .ok_or_else(|| format!("bad decimal {s}"))
                };
                Evidence::BoxGradient {
                    basis: basis.iter().map(|b| parse_rats(b)).collect::<Result<_, _>>()?,
                    center: parse_rats(center)?,
                    epsilon: catalog::parse_rational(epsilon)?,
                    segments: *segments,
                    min_gradient: lower(min_gradient_lower)?,
                    face_minima: face_minima_lower.iter().map(|s| lower(s)).collect::<Result<_, _>>()?,
                    precision: p,
                }
            }
            EvidenceRecord::ZeroField { reason, residuals } => Evidence::ZeroField {
                reason: reason.clone(),
                residuals: parse_rats(residuals)?,
            },
        };
        let symmetry_used = self.symmetry.as_ref().map(|rows| {
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            geometry::Symmetry::from_ints(&refs)
        });
        Ok(SolitonCandidate {
            bounds,
            evidence,
            symmetry_used,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfRecord {
    pub test_configuration: String,
    pub y: String,
    pub raw: IntervalRecord,
    pub normalized: IntervalRecord,
    pub fiber_volume: String,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: String,
    pub degree: String,
    pub cox_ring: Option<String>,
    pub status: Status,
    pub expected_status: Option<Status>,
    pub matches_expected: Option<bool>,
    pub xi_reference: Option<Vec<String>>,
    pub candidate: Option<CandidateRecord>,
    pub admissible: Vec<String>,
    pub symmetries: Vec<Vec<Vec<i64>>>,
    pub donaldson_futaki: Vec<DfRecord>,
    pub destabilizer: Option<String>,
    pub precision_bits: u32,
    pub note: Option<String>,
}

impl CaseRecord {
    pub fn new(entry: &CatalogEntry, v: &StabilityVerdict) -> Self {
        let expected_status = entry.expected.status();
        CaseRecord {
            id: entry.id.clone(),
            degree: geometry::degree(&entry.dp).map(|d| d.to_string()).unwrap_or_default(),
            cox_ring: classify::cox_ring(&entry.dp).ok().map(|c| c.to_string()),
            status: v.status,
            expected_status,
            matches_expected: expected_status.map(|s| s == v.status),
            xi_reference: entry.expected.xi_reference.clone(),
            candidate: v.candidate.as_ref().map(CandidateRecord::new),
            admissible: v.admissible.iter().map(|y| y.key().to_string()).collect(),
            symmetries: v.symmetries.iter().map(|s| s.to_i64_rows()).collect(),
            donaldson_futaki: v
                .df_results
                .iter()
                .map(|r| DfRecord {
                    test_configuration: r.tc.to_string(),
                    y: r.tc.y.key().to_string(),
                    raw: IntervalRecord::new(&r.value.raw),
                    normalized: IntervalRecord::new(&r.value.normalized),
                    fiber_volume: r.value.volume.to_string(),
                    sign: r.sign(),
                })
                .collect(),
            destabilizer: v.destabilizer.as_ref().map(|t| t.to_string()),
            precision_bits: v.precision_used.bits(),
            note: v.note.clone(),
        }
    }
}

/// Settings echoed into a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub precision: u32,
    pub max_bits: u32,
    pub width_target: String,
    pub epsilon: String,
    pub segments: usize,
}

impl ConfigRecord {
    pub fn new(c: &crate::stability::Config) -> Self {
        ConfigRecord {
            precision: c.precision.bits(),
            max_bits: c.max_precision.bits(),
            width_target: format!("{:e}", c.width_target),
            epsilon: format!("{:e}", c.epsilon),
            segments: c.segments,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ConfigRecord,
    pub cases: Vec<CaseRecord>,
}

impl Report {
    pub fn new(command: &str, config: &crate::stability::Config, cases: Vec<CaseRecord>) -> Self {
        Report {
            tool: "ksol".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: ConfigRecord::new(config),
            cases,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Parallelism;
    use crate::stability::{certify_prepared, verify_candidate, Config, Prepared};

    #[test]
    fn candidate_record_round_trip() {
        for id in ["dp/13", "dp/16", "dp/5"] {
            let e = catalog::find(id).unwrap();
            let prep = Prepared::new(&e.dp).unwrap();
            let v = certify_prepared(&prep, &Config::default(), None).unwrap();
            let rec = CaseRecord::new(e, &v);
            let back = rec.candidate.as_ref().unwrap().to_candidate().unwrap();
            let orig = v.candidate.as_ref().unwrap();
            assert_eq!(back.bounds, orig.bounds);
            if let (Evidence::Ivt1d { f_lower: a, .. }, Evidence::Ivt1d { f_lower: b, .. }) = (&back.evidence, &orig.evidence) {
                assert!(a.contains(b));
            }
            assert!(verify_candidate(&prep, &back, Parallelism::Sequential).unwrap());
        }
    }

    #[test]
    fn tampered_candidate_fails_verification() {
        let e = catalog::find("dp/13").unwrap();
        let prep = Prepared::new(&e.dp).unwrap();
        let v = certify_prepared(&prep, &Config::default(), None).unwrap();
        let mut rec = CandidateRecord::new(v.candidate.as_ref().unwrap());
        if let EvidenceRecord::Ivt1d { lower, .. } = &mut rec.evidence {
            *lower = "-1".into();
        }
        rec.bounds[0][0] = "-1".into();
        let back = rec.to_candidate().unwrap();
        assert!(!verify_candidate(&prep, &back, Parallelism::Sequential).unwrap());
    }
}
