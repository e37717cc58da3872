//! Toeplitz, Hankel and Toeplitz+Hankel determinants with Fisher-Hartwig
//! singularities, their large-n asymptotics, and the Fredholm and Painleve
//! objects that appear in the double-scaling limits.

pub mod asympt;
pub mod dd;
pub mod detcore;
pub mod error;
pub mod fredholm;
pub mod linalg;
pub mod painleve;
pub mod permlab;
pub mod quad;
pub mod specfun;
pub mod symbol;

pub use error::{Error, Result};
