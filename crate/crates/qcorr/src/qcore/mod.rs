//! Dense complex quantum linear algebra: states, channels, purification,
//! entropies, norms and seeded random generation.

pub mod channel;
pub mod entropy;
pub mod linalg;
pub mod random;
pub mod state;

pub use channel::QuantumChannel;
pub use entropy::{mutual_information, relative_entropy, von_neumann_entropy};
pub use linalg::{frobenius_norm, trace_norm, CMatrix, CVector, C64};
pub use state::{
    bell_state, purify, werner_state, BipartiteState, DensityMatrix, Ensemble, EnsembleMember,
    PureState, Subsystem, TripartitePureState,
};
