//! Quantum optical state of the driven field: harmonic displacements, pump
//! depletion and the Gaussian output state from dipole correlations.
//!
//! Field-operator convention: `E_Q(t) = i g Σ_q √q (a_q e^{iω_q t} − a_q† e^{−iω_q t})`,
//! which makes the harmonic displacement `χ_q = g√q ∫ ⟨d(t)⟩ e^{−iω_q t} dt`
//! and gives a classical driver `⟨α|E_Q|α⟩ = E_cl(t)` for
//! `α = i (E0/2g) e^{i(φ − ω t_c)}` (see [`driver_amplitude`]).

mod bilinear;
pub mod io;

pub use bilinear::{bilinear_coefficients, gaussian_output_state, generator_symplectic, BilinearCoefficients};

use num_complex::Complex64 as C64;

use crate::sfa::{DipoleRecord, LaserPulse};
use crate::{Error, Result};

/// Default light-matter coupling in atomic units.
pub const DEFAULT_G: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub g: f64,
    pub q_cutoff: usize,
    pub n_emitters: usize,
}

impl CouplingConfig {
    pub fn new(g: f64, q_cutoff: usize, n_emitters: usize) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::domain(format!("coupling g must be > 0, got {g}")));
        }
        if q_cutoff < 2 {
            return Err(Error::domain("q_cutoff must be at least 2"));
        }
        if n_emitters == 0 {
            return Err(Error::domain("at least one emitter required"));
        }
        Ok(Self { g, q_cutoff, n_emitters })
    }

    pub fn with_defaults(q_cutoff: usize) -> Result<Self> {
        Self::new(DEFAULT_G, q_cutoff, 1)
    }
}

/// Coherent displacements `χ_q`, `q = 1..=q_cutoff`, with `χ₁ ≡ δα`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicAmplitudes {
    pub chi: Vec<C64>,
    pub alpha_in: C64,
    pub omega0: f64,
}

impl HarmonicAmplitudes {
    pub fn q_cutoff(&self) -> usize {
        self.chi.len()
    }

    /// `χ_q` for 1-based harmonic order `q`.
    pub fn chi(&self, q: usize) -> C64 {
        self.chi[q - 1]
    }

    pub fn delta_alpha(&self) -> C64 {
        self.chi[0]
    }

    pub fn photon_number(&self, q: usize) -> f64 {
        self.chi(q).norm_sqr()
    }

    /// `Ω = Σ_{q≥2} |χ_q|²`.
    pub fn harmonic_photons(&self) -> f64 {
        self.chi[1..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// Fundamental amplitude after the interaction, `α + δα`.
    pub fn depleted_driver(&self) -> C64 {
        self.alpha_in + self.chi[0]
    }
}

/// Coherent amplitude of the fundamental mode that reproduces the pulse's
/// carrier as `⟨α|E_Q|α⟩`.
pub fn driver_amplitude(pulse: &LaserPulse, g: f64) -> C64 {
    let phase = pulse.cep() - pulse.omega() * pulse.center();
    C64::new(0.0, pulse.e0() / (2.0 * g)) * C64::from_polar(1.0, phase)
}

fn trapezoid_weights(n: usize, dt: f64) -> Vec<f64> {
    (0..n).map(|k| if k == 0 || k + 1 == n { 0.5 * dt } else { dt }).collect()
}

/// `χ_q = N g √q Σ_k w_k ⟨d(t_k)⟩ e^{−iω_q t_k}` with trapezoid weights.
pub fn coherent_amplitudes(record: &DipoleRecord, coupling: &CouplingConfig, alpha_in: C64) -> Result<HarmonicAmplitudes> {
    let q_max = coupling.q_cutoff;
    record.grid.check_nyquist(q_max as f64 * record.omega0)?;
    let w = trapezoid_weights(record.grid.n, record.grid.dt);
    let scale = coupling.g * coupling.n_emitters as f64;
    let chi = (1..=q_max)
        .map(|q| {
            let wq = q as f64 * record.omega0;
            let sum: C64 = record
                .grid
                .times()
                .zip(&record.values)
                .zip(&w)
                .map(|((t, d), w)| C64::from_polar(w * d, -wq * t))
                .sum();
            sum * scale * (q as f64).sqrt()
        })
        .collect();
    Ok(HarmonicAmplitudes { chi, alpha_in, omega0: record.omega0 })
}

/// `|α_in + δα(t_k)|` with `δα(t)` the running partial integral of `χ₁`.
pub fn depletion_trace(record: &DipoleRecord, coupling: &CouplingConfig, alpha_in: C64) -> Result<Vec<f64>> {
    if !alpha_in.re.is_finite() || !alpha_in.im.is_finite() {
        return Err(Error::domain("driver amplitude must be finite"));
    }
    let scale = coupling.g * coupling.n_emitters as f64;
    let dt = record.grid.dt;
    let w0 = record.omega0;
    let integrand: Vec<C64> = record
        .grid
        .times()
        .zip(&record.values)
        .map(|(t, d)| C64::from_polar(*d, -w0 * t))
        .collect();
    let mut acc = C64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(integrand.len());
    out.push(alpha_in.norm());
    for k in 1..integrand.len() {
        acc += (integrand[k - 1] + integrand[k]) * (0.5 * dt);
        out.push((alpha_in + acc * scale).norm());
    }
    Ok(out)
}
