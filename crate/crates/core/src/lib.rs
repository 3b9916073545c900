//! Exact computations in the log de Rham-Witt complex of local models over `F_p`.
//!
//! Elements of `W_m Lambda` are kept in the normal form of log basic Witt
//! differentials ([`drw::DrwElement`]). Around it sit scalar and polynomial Witt
//! vector arithmetic, the canonical lift and its de Rham complex, Smith normal form
//! homology of weight pieces, the weight filtration and Steenbrink complex of a
//! semistable model, and Gauss norms.

pub mod drw;
pub mod error;
pub mod filtration_ss;
pub mod forms;
pub mod homology;
pub mod lift_dr;
pub mod overconv;
pub mod poly;
pub mod random;
pub mod weights;
pub mod witt_poly;
pub mod witt_scalar;

pub use drw::{BasisKey, DrwElement};
pub use error::{Error, Result};
pub use weights::{Entry, LocalModel, Partition, Weight};
pub use witt_scalar::WittScalar;
