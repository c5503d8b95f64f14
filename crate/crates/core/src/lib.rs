//! Step-2 rough paths over finite-dimensional Hilbert spaces.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod flows;
pub mod io;
pub mod paths;
pub mod rough;
pub mod spectral;
pub mod trig;

pub use algebra::{GroupElem, HomNorms, TruncTensor};
pub use error::{Error, Result};
