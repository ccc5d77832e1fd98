//! Numerical core for the quantum-optical description of intense laser-matter
//! interaction.
//!
//! All physics runs in atomic units (ħ = m = e = 1). Quadratures follow
//! `x = (a + a†)/√2`, so the vacuum variance is 1/2 and a coherent state's
//! Wigner peak is 1/π.
//!
//! Module map:
//! - [`phase_space`]: coherent superpositions, Gaussian states, Wigner grids,
//!   loss, purity, QFI and entanglement measures.
//! - [`sfa`]: pulses, SFA dipole, dipole correlations, HHG spectra.
//! - [`qstate`]: harmonic coherent amplitudes, pump depletion, bilinear
//!   generator and the Gaussian output field.
//! - [`coherence`]: Heisenberg-picture correlation functions and spectra.
//! - [`conditioning`]: post-selected cat states, shot sampling, metrology.
//! - [`driver`]: averaging over non-classical driver distributions.
//! - [`ati`]: quantum optics of direct above-threshold ionization.

pub mod ati;
pub mod coherence;
pub mod conditioning;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod phase_space;
pub mod qstate;
pub mod sfa;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
