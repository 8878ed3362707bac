//! Checker for a dependent type theory of weak omega-categories extended
//! with lax limits over finite computads: the base typing judgments,
//! pasting-context recognition, cone and transfor recognition and
//! synthesis, universal cones and the universal-property constructors.

pub mod catalog;
pub mod cones;
pub mod derivation;
pub mod error;
pub mod kernel;
pub mod limits;
pub mod pasting;
pub mod print;
pub mod syntax;
pub mod transfors;

pub use derivation::Derivation;
pub use error::{CheckError, Result};
pub use syntax::{Ctx, Sub, Tm, Ty, VarName};
