pub mod assembly;
pub mod boundary;
pub mod cli;
pub mod darboux;
pub mod error;
pub mod fixed_domain;
pub mod verify;
pub mod quadrature;
mod special;

pub use assembly::{Frame, MovingSolution, Mutation, Term};
pub use boundary::{BoundaryLaw, CustomLaw, LawKind, WallState};
pub use error::{Error, Result};
pub use fixed_domain::{Family, PotentialModel, SeedPair, StationaryMode};
