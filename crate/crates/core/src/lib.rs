//! Riesz-basis tightness quantities for exponential systems on finite
//! abelian groups.
//!
//! For `E ⊆ G` and `B ⊆ Ĝ` of equal size, the Fourier matrix
//! `T(E, B) = [b_j(x_i)]` determines how far the characters in `B`,
//! restricted to `E`, are from an orthogonal basis. [`pairs`] computes the
//! quantities for one pair, [`search`] optimizes over `B`, and [`tiling`]
//! handles sets that multi-tile the group by a subgroup.

pub mod cli;
pub mod error;
pub mod families;
pub mod group;
pub mod numeric;
pub mod pairs;
pub mod real;
pub mod search;
pub mod tiling;

pub use error::{Error, Result};
pub use group::{Element, GroupSpec, Subgroup, ZLinearMap};
pub use numeric::{ComplexMatrix, SingularSpectrum};
pub use pairs::{SubsetPair, TightnessReport};
