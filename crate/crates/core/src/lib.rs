//! Finite-level model of modules over `Omega = F_p[[T]]`.
//!
//! * [`series`]: arithmetic in `Omega_n = F_p[T]/(T^n)`, the involution `iota`
//!   and the group-ring basis.
//! * [`submodule`]: maximal cyclic submodules of `Omega_n^2` in canonical form,
//!   with counting, intersections, quotients and tower projections.
//! * [`pairing`]: the block space with its involution-equivariant pairing,
//!   orthogonal complements and maximal isotropic enumeration.
//! * [`heuristic`]: the uniform model on pairs of maximal submodules, with
//!   exact and sampled collision probabilities.
//! * [`linalg`]: dense `F_p` linear algebra backing the above.

pub mod error;
pub mod heuristic;
pub mod linalg;
pub mod pairing;
pub mod series;
pub mod submodule;

pub use error::{Error, Result};
pub use heuristic::{ProbabilityModel, Rational, RngSpec};
pub use linalg::{FpMatrix, Subspace};
pub use pairing::{pairing, FpSubspace, SpaceElement, SpaceShape};
pub use series::{Prime, Series, MAX_LEVEL, MAX_PRIME};
pub use submodule::{CanonicalForm, CyclicSubmodule, ModuleVector, SubmoduleTower};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
