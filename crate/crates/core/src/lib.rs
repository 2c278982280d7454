//! Analysis and simulation of a thermal-state, central-broadcast quantum
//! key distribution protocol under a beam-splitter attack.
//!
//! * [`gaussian`]: covariance matrices, beam splitters, symplectic spectra
//!   and von Neumann entropies of Gaussian states.
//! * [`protocol`]: the six-mode circuit and its closed-form blocks.
//! * [`montecarlo`]: Fock-level sampling of the protocol and median bits.
//! * [`info`]: Shannon measures, key-rate bounds, offset correlation and an
//!   exact enumeration of the photon-count statistics.
//! * [`uncertainty`]: mutual information from estimation uncertainty.

pub mod error;
pub mod gaussian;
pub mod info;
pub mod montecarlo;
pub mod protocol;
pub mod uncertainty;

pub use error::{Error, Result};
pub use gaussian::{BeamSplitter, CovarianceMatrix, ModePartition, SymplecticSpectrum};
pub use info::{Flavor, InfoSummary};
pub use montecarlo::{BitString, MeasurementModel, TrialEnsemble};
pub use protocol::{Party, ProtocolConfig, ProtocolState};
