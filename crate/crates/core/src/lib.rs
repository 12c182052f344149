//! Exact symbolic computation with the decorated trees of regularity
//! structures.
//!
//! The crate builds rule-generated bases of decorated trees, evaluates the
//! coproducts `Δ`, `Δ⁺`, `Δ⁻` (and its variants), `Δ̂₁` and `Δ₂` both
//! recursively and by explicit subforest enumeration, implements the
//! character groups `𝒢₊`/`𝒢₋`, and constructs renormalisation maps
//! `M = M∘R` from characters. Coefficients are polynomials over ℚ in named
//! constants, so every identity is checked exactly.

pub mod casebook;
pub mod characters;
pub mod coeff;
pub mod coproducts;
pub mod error;
pub mod labeled;
pub mod lincomb;
pub mod renorm;
pub mod report;
pub mod rules;
pub mod suites;
pub mod text;
pub mod tree;

pub use coeff::{Coefficient, Rational};
pub use error::{Error, Result};
pub use lincomb::{BasisElement, LinComb};
pub use rules::{Basis, RootConstraint, RuleTable};
pub use tree::{Edge, EdgeLabel, Forest, MultiIndex, RootedForest, Tree};
