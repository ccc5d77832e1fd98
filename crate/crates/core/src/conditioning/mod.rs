//! Conditioning on harmonic generation: entangled and cat states, shot
//! sampling with energy-conserving post-selection, and loss/QFI metrology.
//!
//! Projection convention: the POVM element `𝟙 − |0̃⟩⟨0̃|` removes the
//! component of the joint field along the undriven reference `|α⟩⊗|0…⟩`,
//! leaving `|α+δα⟩⊗|χ̄⟩ − ξ₁∏ξ_q |α⟩⊗|0̄⟩` with `ξ₁ = ⟨α|α+δα⟩` and
//! `ξ_q = ⟨0|χ_q⟩ = e^{−|χ_q|²/2}`. Reduced states follow by projecting the
//! remaining modes onto their displaced branch.

pub mod io;
mod metrology;
mod shots;

pub use metrology::{
    loss_robustness_curve, matched_cat, matched_hhg_cat, qfi_comparison, CatParity, LossCurve, QfiReport,
};
pub use shots::{
    default_window, postselect_energy_conserving, sample_shots, CatFit, PostSelection, ShotTable, SHOT_BLOCK,
};

use num_complex::Complex64 as C64;

use crate::phase_space::{coherent_overlap, CoherentSuperposition};
use crate::qstate::HarmonicAmplitudes;
use crate::{Error, Result};

const DEPLETION_TOL: f64 = 1e-12;

/// Inputs of the conditioned states. `chi[k]` is the amplitude of harmonic
/// order `k + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningInput {
    alpha_in: C64,
    delta_alpha: C64,
    chi: Vec<C64>,
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl ConditioningInput {
    /// Validated input; the driver may only lose amplitude.
    pub fn new(alpha_in: C64, delta_alpha: C64, chi: Vec<C64>) -> Result<Self> {
        let s = Self::analytic(alpha_in, delta_alpha, chi)?;
        if (alpha_in + delta_alpha).norm() > alpha_in.norm() * (1.0 + DEPLETION_TOL) + DEPLETION_TOL {
            return Err(Error::domain(format!(
                "|α + δα| = {} exceeds |α| = {}",
                (alpha_in + delta_alpha).norm(),
                alpha_in.norm()
            )));
        }
        Ok(s)
    }

    /// Input without the depletion check, for analytic limits such as
    /// `α = 0`.
    pub fn analytic(alpha_in: C64, delta_alpha: C64, chi: Vec<C64>) -> Result<Self> {
        if !finite(alpha_in) || !finite(delta_alpha) || !chi.iter().all(|c| finite(*c)) {
            return Err(Error::domain("non-finite conditioning amplitude"));
        }
        Ok(Self { alpha_in, delta_alpha, chi })
    }

    /// Input whose harmonics are summarized by a single mode with `|χ|² = Ω`.
    pub fn with_omega(alpha_in: C64, delta_alpha: C64, omega: f64) -> Result<Self> {
        if !(omega >= 0.0) {
            return Err(Error::domain("Ω must be non-negative"));
        }
        let chi = if omega > 0.0 { vec![C64::new(omega.sqrt(), 0.0)] } else { Vec::new() };
        Self::analytic(alpha_in, delta_alpha, chi)
    }

    pub fn from_amplitudes(amps: &HarmonicAmplitudes) -> Result<Self> {
        Self::new(amps.alpha_in, amps.delta_alpha(), amps.chi[1..].to_vec())
    }

    pub fn alpha_in(&self) -> C64 {
        self.alpha_in
    }

    pub fn delta_alpha(&self) -> C64 {
        self.delta_alpha
    }

    pub fn chi(&self) -> &[C64] {
        &self.chi
    }

    /// Amplitude of harmonic order `q ≥ 2`.
    pub fn chi_q(&self, q: usize) -> Option<C64> {
        q.checked_sub(2).and_then(|k| self.chi.get(k)).copied()
    }

    pub fn depleted(&self) -> C64 {
        self.alpha_in + self.delta_alpha
    }

    /// `Ω = Σ_{q≥2} |χ_q|²`.
    pub fn omega(&self) -> f64 {
        self.chi.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_q q|χ_q|²` in fundamental-photon units.
    pub fn upconverted_energy(&self) -> f64 {
        self.chi.iter().enumerate().map(|(k, c)| (k + 2) as f64 * c.norm_sqr()).sum()
    }

    /// `ξ₁ = ⟨α|α+δα⟩`.
    pub fn xi1(&self) -> C64 {
        coherent_overlap(&[self.depleted()], &[self.alpha_in]).expect("single mode")
    }

    /// Full amplitude vector of the product state, fundamental first.
    pub fn product_amplitudes(&self) -> Vec<C64> {
        std::iter::once(self.depleted()).chain(self.chi.iter().copied()).collect()
    }
}

/// Normalized two-branch state over the fundamental and all harmonics.
pub fn entangled_conditioned_state(input: &ConditioningInput) -> Result<CoherentSuperposition> {
    let modes = 1 + input.chi.len();
    let reference: Vec<C64> = std::iter::once(input.alpha_in).chain(std::iter::repeat(C64::new(0.0, 0.0)).take(modes - 1)).collect();
    let weight = -input.xi1() * (-0.5 * input.omega()).exp();
    CoherentSuperposition::new(modes, vec![(C64::new(1.0, 0.0), input.product_amplitudes()), (weight, reference)])?
        .normalized()
}

/// Fundamental-mode cat `|α+δα⟩ − ξ₁e^{−Ω}|α⟩`, normalized. Obtained from the
/// entangled state by projecting the harmonics onto `|χ̄⟩`.
pub fn hhg_cat_state(input: &ConditioningInput) -> Result<CoherentSuperposition> {
    let weight = -input.xi1() * (-input.omega()).exp();
    CoherentSuperposition::new(
        1,
        vec![(C64::new(1.0, 0.0), vec![input.depleted()]), (weight, vec![input.alpha_in])],
    )?
    .normalized()
}

/// Single-harmonic state `|χ_q⟩ − |ξ₁|² e^{−Ω+|χ_q|²/2} |0⟩`, normalized.
///
/// The fundamental is projected onto `|α+δα⟩` and every other harmonic onto
/// its displaced branch. The subtraction removes vacuum weight, so `p(0)`
/// falls below the Poisson value at equal mean.
pub fn xuv_cat_state(input: &ConditioningInput, q: usize) -> Result<CoherentSuperposition> {
    let chi = input
        .chi_q(q)
        .ok_or_else(|| Error::domain(format!("no harmonic of order {q}")))?;
    if chi.norm_sqr() == 0.0 {
        return Err(Error::domain(format!("χ_{q} = 0")));
    }
    let c = input.xi1().norm_sqr() * (-input.omega() + 0.5 * chi.norm_sqr()).exp();
    CoherentSuperposition::new(
        1,
        vec![(C64::new(1.0, 0.0), vec![chi]), (C64::new(-c, 0.0), vec![C64::new(0.0, 0.0)])],
    )?
    .normalized()
}
