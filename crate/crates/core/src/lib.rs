//! Riesz bounds of exponential systems `{e^{iλt}}` over finite unions of arcs.
//!
//! The crate builds arc sets on the circle (including the sets `S_α` of
//! circle points badly approximable at rate `δ(ℓ) = c0 / ℓ^{1/α}`), computes
//! optimal lower and upper Riesz bounds of finite frequency sets through
//! their Gram matrices, and provides the number-theoretic and
//! multiplicity-function checks that go with them.

pub mod block_union;
pub mod circle_set;
pub mod diophantine;
mod error;
pub mod multiplicity;
pub mod numeric;
pub mod riesz;
pub mod scenario;
pub mod trig_poly;

pub use circle_set::{ArcSet, SAlphaSpec, SetOp, Variant};
pub use error::{Error, Result};

pub use trig_poly::TrigPoly;
pub use riesz::{FrequencySet, GramMatrix, RieszBounds};
