//! G-isometric PEPS at the renormalization fixed point: virtual symmetry
//! realizations, excitation operators, and two evaluators for the order
//! parameter (symbolic loop reduction and brute-force contraction).

pub mod charge;
pub mod lattice;
pub mod loops;
pub mod mono;
pub mod oracle;
pub mod protocol;
pub mod realization;

use thiserror::Error;

use crate::character::CharacterError;
use crate::extension::ExtensionError;

pub use charge::ChargeOperator;
pub use lattice::{Bond, Lattice, Site};
pub use loops::{braid_flux_around_charge, compile_protocol, LoopExpression, Sym};
pub use oracle::{dense_contract, DenseResult};
pub use protocol::{ChargePlacement, Cycle, Denominator, FluxString, ProtocolSpec};
pub use realization::SymmetryRealization;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PepsError {
    #[error("unsupported protocol geometry: {0}")]
    UnsupportedProtocolGeometry(String),
    #[error("network needs {entries} entries, above the limit of {limit}")]
    LatticeTooLarge { entries: f64, limit: f64 },
    #[error("virtual symmetry realization failed: {0}")]
    RealizationCheckFailed(String),
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("protocol carries charges but no charge operator was given")]
    MissingCharge,
    #[error("normalizing network vanishes")]
    ZeroNorm,
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}
