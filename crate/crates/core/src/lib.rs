//! q-additive polynomials over `F_q[t]`: finite field and polynomial arithmetic,
//! the additive polynomial algebra, Frobenius data at specializations, the
//! predicted Galois group, characteristic-polynomial census and a seeded
//! Monte Carlo harness.

pub mod additive;
pub mod census;
pub mod error;
pub mod experiments;
pub mod factor;
pub mod field;
pub mod frobenius;
pub mod gamma;
pub mod matrix;
pub mod poly;
pub mod stats;
mod util;

pub use error::{Error, Result};
pub use additive::AdditivePoly;
pub use field::{Fe, Field, Tower};
pub use matrix::Matrix;
pub use poly::{BiPoly, Poly};
