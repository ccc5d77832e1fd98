//! Strong-field approximation: pulses, dipole response, correlations, spectra.
//!
//! Conventions: atomic units, kinetic momentum `v = p − A(t)`, `E = −dA/dt`,
//! hydrogenic 1s transition dipole along the polarization axis.

mod correlation;
mod dipole;
pub mod io;
mod pulse;
mod spectrum;

pub use correlation::{dipole_correlation, DipoleCorrelation, MomentumGrid};
pub use dipole::{
    dipole_expectation, dipole_expectation_with, ionization_amplitude, semiclassical_action,
    volkov_phase, DipoleRecord, SfaOptions,
};
pub use pulse::{Envelope, LaserPulse};
pub use spectrum::{detect_cutoff, detect_cutoff_bin, hhg_spectrum, Spectrum, Window, CUTOFF_THRESHOLD, PLATEAU_EDGE_THRESHOLD};

use crate::{Error, Result};

/// Single-active-electron target with a hydrogenic ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    ip: f64,
}

impl Atom {
    pub fn new(ip: f64) -> Result<Self> {
        if !(ip > 0.0) || !ip.is_finite() {
            return Err(Error::domain(format!("ionization potential must be > 0, got {ip}")));
        }
        Ok(Self { ip })
    }

    pub fn hydrogen() -> Self {
        Self { ip: 0.5 }
    }

    pub fn ip(&self) -> f64 {
        self.ip
    }
}

/// Uniform sampling `t0 + k·dt`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0) || !t0.is_finite() || !dt.is_finite() {
            return Err(Error::domain("time step must be positive and finite"));
        }
        if n < 2 {
            return Err(Error::domain("time grid needs at least two samples"));
        }
        Ok(Self { t0, dt, n })
    }

    /// Grid covering the pulse support `[0, T]` with step at most `dt`.
    pub fn covering(pulse: &LaserPulse, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::domain("time step must be positive"));
        }
        let steps = (pulse.duration() / dt).ceil() as usize;
        Self::new(0.0, pulse.duration() / steps as f64, steps + 1)
    }

    /// Grid of `n` points covering the pulse support.
    pub fn with_points(pulse: &LaserPulse, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("time grid needs at least two samples"));
        }
        Self::new(0.0, pulse.duration() / (n - 1) as f64, n)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.time(k))
    }

    pub fn end(&self) -> f64 {
        self.time(self.n - 1)
    }

    pub fn check_nyquist(&self, omega_max: f64) -> Result<()> {
        let product = self.dt * omega_max;
        if product > std::f64::consts::PI {
            return Err(Error::Nyquist { product });
        }
        Ok(())
    }
}

/// `U_p = E0²/(4ω²)`.
pub fn ponderomotive_energy(pulse: &LaserPulse) -> f64 {
    pulse.ponderomotive_energy()
}

/// Classical HHG cutoff `3.17 U_p + I_p`.
pub fn cutoff_energy(pulse: &LaserPulse, atom: &Atom) -> f64 {
    3.17 * pulse.ponderomotive_energy() + atom.ip()
}

/// Hydrogenic bound-free dipole `2^{7/2}(2I_p)^{5/4}/π · v/(v² + 2I_p)³`.
pub fn transition_dipole(v: f64, atom: &Atom) -> f64 {
    let two_ip = 2.0 * atom.ip();
    let norm = 2f64.powf(3.5) * two_ip.powf(1.25) / std::f64::consts::PI;
    norm * v / (v * v + two_ip).powi(3)
}
