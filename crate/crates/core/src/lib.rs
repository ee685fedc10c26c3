//! Exact GF(2) computations with unstable modules over the mod 2 Steenrod
//! algebra: Steinberg summands of polynomial algebras, Brown-Gitler modules,
//! Dickson invariants, and the injective resolution
//!
//! ```text
//! 0 -> L'_n -> L_n -> L_{n-1} (x) J(1) -> ... -> L_1 (x) J(2^{n-1}-1) -> J(2^n-1) -> 0
//! ```
//!
//! Everything is computed degree by degree up to an explicit cap, and every
//! structural claim (idempotents, bases, exactness, presentations, Poincare
//! series identities) is checked by rank computations over GF(2).

pub mod brown_gitler;
pub mod gf2;
pub mod matrix_algebra;
pub mod report;
pub mod resolution;
pub mod series;
pub mod steenrod;
pub mod steinberg;

mod error;

pub use error::{Error, Result};
