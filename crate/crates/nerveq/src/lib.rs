//! Exact quantization of Poisson Hopf algebras via nerves of diagram
//! categories.
//!
//! Layers, bottom to top: [`exactalg`] (exact rationals, series, graded
//! maps), [`props`] (finite maps, braids, parenthesized moves), [`chords`]
//! (Drinfeld–Kohno algebras and chord-decorated maps), [`associator`],
//! [`transport`], [`hopf_backend`], [`nerve`], [`quantizer`] and [`dsl`]
//! with the command line front end in [`cli`].

pub mod error;
pub mod exactalg;
pub mod associator;
pub mod chords;
pub mod cli;
pub mod dsl;
pub mod props;
pub mod hopf_backend;
pub mod nerve;
pub mod quantizer;
pub mod transport;

pub use error::{Error, Result};
