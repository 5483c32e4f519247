//! Weighted composition operators `f -> w (f o phi)` on spaces of analytic
//! functions on the unit disc.

pub mod convergence;
pub mod discmap;
pub mod error;
pub mod holofunc;
pub mod io;
pub mod isometry;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod transfer;
pub mod wco;
pub mod weight;

pub use error::{Error, Result};
