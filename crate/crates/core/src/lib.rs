//! Certified K-stability of complexity-one T-varieties.
//!
//! A Fano T-variety of complexity one is encoded by a divisorial polytope:
//! a lattice polytope `□` together with concave piecewise-affine functions
//! `Φ_y` attached to finitely many points of `P¹`. The crate decides
//! K-stability (or the existence of a Kähler-Ricci soliton) for such data by
//! locating the soliton candidate `ξ` and evaluating Donaldson-Futaki
//! invariants of the special test configurations, all in outward-rounded
//! interval arithmetic.

pub mod catalog;
pub mod classify;
pub mod expint;
pub mod geometry;
pub mod par;
pub mod report;
pub mod rigor;
pub mod stability;

pub use rigor::{Interval, IntervalVector, Precision, RigorError, Sign};
