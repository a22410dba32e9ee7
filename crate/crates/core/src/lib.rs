//! Numerical radius and numerical range geometry for complex matrix algebras,
//! together with a catalogue of lower and upper bounds for the numerical
//! radius and tools to verify them at scale.
//!
//! The algebra is `M_n(C)` with the operator norm. States are density
//! matrices or unit vectors, so `v(a) = max |<a x, x>|` over unit `x`.

pub mod bounds;
pub mod campaign;
pub mod error;
pub mod genlab;
pub mod matcore;
pub mod numrange;
pub mod optimize;
pub mod states;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, C64};
