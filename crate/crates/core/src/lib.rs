//! Sector-length geometry of three-qubit states.
//!
//! The crate maps a three-qubit density matrix onto its local-unitary
//! invariant sector lengths (one-, two- and three-body Bloch tensor norms),
//! evaluates pure-state, mixed-state, separability and rank bounds on those
//! coordinates, builds the state families that saturate them, and runs the
//! sampling and optimization campaigns used to probe them.
//!
//! Basis convention everywhere: `|q_A q_B q_C⟩` with qubit A as the most
//! significant bit, Pauli matrices `σ₁ = X`, `σ₂ = Y`, `σ₃ = Z`.

pub mod bloch;
pub mod criteria;
pub mod error;
pub mod explorer;
pub mod figures;
pub mod invariants;
pub mod io;
pub mod optimize;
pub mod oracles;
pub mod quantum;
pub mod random;
pub mod thresholds;
pub mod tolerances;
pub mod zoo;

pub use bloch::{bloch_decompose, BlochTensors};
pub use criteria::{CriterionId, CriterionReport, Verdict};
pub use error::{Error, Result};
pub use invariants::{sector_coordinates, SectorCoordinates};
pub use quantum::{DensityMatrix, PureState, QubitLabel, C64};
