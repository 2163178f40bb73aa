//! Finite-set maps, braids, braided morphisms and their decomposition into
//! parenthesized elementary moves.

pub mod braid;
pub mod brcom;
pub mod finmap;
pub mod pa;

pub use braid::BraidWord;
pub use brcom::BrMorphism;
pub use finmap::FinMap;
pub use pa::{pa_decompose, PaMove, PaStep, Rebracket, Tree};
