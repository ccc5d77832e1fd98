//! Multimode bosonic states in phase space.
//!
//! Non-Gaussian states are carried as finite sums of coherent states
//! ([`CoherentSuperposition`] for pure states, [`CoherentOperatorMix`] for
//! operators such as lossy cats). Every analytic quantity reduces to pairwise
//! coherent overlaps, which keeps photon numbers of order 10² cheap where a
//! Fock truncation would need thousands of levels.

mod coherent;
mod gaussian;
pub mod io;
mod metrics;
mod stats;
mod wigner;

pub use coherent::{coherent_overlap, CoherentOperatorMix, CoherentSuperposition, Dyad, StateRef};
pub use gaussian::{log_negativity, squeezing_parameters, GaussianModeState};
pub use metrics::{
    apply_loss, branch_entropy, entanglement_entropy, mean_photon_number, purity, qfi_phase,
    GRAM_CUTOFF,
};
pub(crate) use metrics::number_moments_pure;
pub use stats::{photon_statistics, PhotonStatistics, StatsInput};
pub use wigner::{wigner, Axis, WignerGrid};
