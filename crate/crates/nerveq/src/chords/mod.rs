//! Drinfeld–Kohno algebras and maps with chords.

pub mod dk;
pub mod icom;

pub use dk::{chord, ChordWord, DKElement};
pub use icom::{ICMorphism, ICMorphismSeries};
