//! Support-point and tangent-point asymptotics of planar parametric curves.
//!
//! For a curve `γ: [a, b) → ℝ²` and a chord `[γ(a), γ(t)]`, the crate locates
//! the parameters whose points support the chord (local extrema of the signed
//! distance to the chord line) and those whose tangent is parallel to it, and
//! tracks the ratios `DS(t)/D(t)` and `DT(t)/D(t)` of the farthest such point's
//! distance from `γ(a)` to `|γ(t) − γ(a)|` as `t → a`. The same machinery
//! locates the largest mean-value points of the Cauchy, Lagrange and weighted
//! integral mean value theorems and follows their relative position as the
//! interval shrinks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arclength;
pub mod asymptote;
pub mod catalog;
pub mod curve;
pub mod error;
pub mod expr;
pub mod meanvalue;
pub mod numeric;
pub mod support;
pub mod verify;

pub use error::{Error, Result};
