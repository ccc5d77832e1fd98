use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::{hhg_cat_state, ConditioningInput};
use crate::phase_space::{number_moments_pure, CoherentSuperposition};
use crate::{Error, Result};

/// Shots per RNG stream. Stream `b` of the seed covers shots
/// `b·SHOT_BLOCK .. (b+1)·SHOT_BLOCK`, so tables do not depend on threading.
pub const SHOT_BLOCK: usize = 4096;

/// Photon counts per shot; column 0 is the fundamental, column `k` harmonic
/// order `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotTable {
    pub seed: u64,
    pub shots: usize,
    pub modes: usize,
    pub counts: Vec<u64>,
}

impl ShotTable {
    pub fn row(&self, shot: usize) -> &[u64] {
        &self.counts[shot * self.modes..(shot + 1) * self.modes]
    }

    pub fn column_mean(&self, mode: usize) -> f64 {
        (0..self.shots).map(|s| self.row(s)[mode] as f64).sum::<f64>() / self.shots as f64
    }
}

fn draw(rng: &mut impl Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as u64
}

/// Independent Poisson counts per mode of the product coherent state
/// `⊗|amplitudes_k⟩`.
pub fn sample_shots(amplitudes: &[C64], shots: usize, seed: u64) -> Result<ShotTable> {
    if shots == 0 {
        return Err(Error::domain("at least one shot required"));
    }
    if amplitudes.is_empty() {
        return Err(Error::domain("at least one mode required"));
    }
    let means: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    if means.iter().any(|m| !m.is_finite()) {
        return Err(Error::domain("non-finite amplitude"));
    }
    let modes = means.len();
    let blocks = shots.div_ceil(SHOT_BLOCK);
    let counts: Vec<u64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let n = SHOT_BLOCK.min(shots - b * SHOT_BLOCK);
            let mut out = Vec::with_capacity(n * modes);
            for _ in 0..n {
                for &m in &means {
                    out.push(draw(&mut rng, m));
                }
            }
            out
        })
        .collect();
    Ok(ShotTable { seed, shots, modes, counts })
}

/// Default half-width `max(1, 0.05·Σ_q q|χ_q|²)` in fundamental photons.
pub fn default_window(input: &ConditioningInput) -> f64 {
    (0.05 * input.upconverted_energy()).max(1.0)
}

/// Two-branch ansatz `|α + s·u⟩ − ⟨α|α + s·u⟩e^{−Ω'}|α⟩` matched to the kept
/// fundamental counts; `u` is the unit direction of `δα`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatFit {
    pub shift: f64,
    pub omega: f64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostSelection {
    pub kept: Vec<usize>,
    pub acceptance_rate: f64,
    pub window: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub fit: CatFit,
    pub reconstructed: CoherentSuperposition,
    /// `|⟨reconstructed|hhg_cat_state⟩|²`.
    pub fidelity: f64,
}

const OMEGA_MAX: f64 = 30.0;

fn ansatz(alpha: C64, dir: C64, shift: f64, omega: f64) -> Result<CoherentSuperposition> {
    let input = ConditioningInput::with_omega(alpha, dir * shift, omega)?;
    hhg_cat_state(&input)
}

fn ansatz_moments(alpha: C64, dir: C64, shift: f64, omega: f64) -> Option<(f64, f64)> {
    let s = ansatz(alpha, dir, shift, omega).ok()?;
    let (n1, n2) = number_moments_pure(&s);
    Some((n1, n2 - n1 * n1))
}

/// Keeps shots with `|Σ_{q≥2} q·n_q − (|α_in|² − n_1)| ≤ window` and matches
/// the mean and variance of the kept fundamental counts onto the cat ansatz.
pub fn postselect_energy_conserving(
    table: &ShotTable,
    input: &ConditioningInput,
    window: Option<f64>,
) -> Result<PostSelection> {
    if table.shots == 0 {
        return Err(Error::domain("empty shot table"));
    }
    if table.modes != 1 + input.chi().len() {
        return Err(Error::Dimension { expected: 1 + input.chi().len(), got: table.modes });
    }
    let window = window.unwrap_or_else(|| default_window(input));
    if !(window >= 0.0) {
        return Err(Error::domain("window must be non-negative"));
    }
    let reference = input.alpha_in().norm_sqr();
    let kept: Vec<usize> = (0..table.shots)
        .filter(|&s| {
            let row = table.row(s);
            let loss = reference - row[0] as f64;
            let up: f64 = row[1..].iter().enumerate().map(|(k, &n)| (k + 2) as f64 * n as f64).sum();
            (up - loss).abs() <= window
        })
        .collect();
    let rate = kept.len() as f64 / table.shots as f64;
    if kept.is_empty() {
        return Err(Error::SelectionEfficiency { rate });
    }
    let n = kept.len() as f64;
    let mean = kept.iter().map(|&s| table.row(s)[0] as f64).sum::<f64>() / n;
    let variance = kept.iter().map(|&s| (table.row(s)[0] as f64 - mean).powi(2)).sum::<f64>() / n;

    let alpha = input.alpha_in();
    let dir = if input.delta_alpha().norm() > 0.0 {
        input.delta_alpha() / input.delta_alpha().norm()
    } else if alpha.norm() > 0.0 {
        -alpha / alpha.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let fit = fit_cat(alpha, dir, mean, variance, n)?;
    let reconstructed = ansatz(alpha, dir, fit.shift, fit.omega)?;
    let target = hhg_cat_state(input)?;
    let fidelity = reconstructed.inner(&target)?.norm_sqr();
    Ok(PostSelection {
        kept,
        acceptance_rate: rate,
        window,
        sample_mean: mean,
        sample_variance: variance,
        fit,
        reconstructed,
        fidelity,
    })
}

/// Grid search then coordinate refinement of
/// `((m − m̂)/σ_m)² + ((v − v̂)/σ_v)²` over shift `s ≥ 0` and `Ω' ∈ [0, 30]`.
fn fit_cat(alpha: C64, dir: C64, mean: f64, variance: f64, n: f64) -> Result<CatFit> {
    let sigma_m = (variance.max(1.0) / n).sqrt();
    let sigma_v = variance.max(1.0) * (2.0 / n).sqrt();
    let cost = |s: f64, o: f64| -> f64 {
        match ansatz_moments(alpha, dir, s, o) {
            Some((m, v)) => ((m - mean) / sigma_m).powi(2) + ((v - variance) / sigma_v).powi(2),
            None => f64::INFINITY,
        }
    };
    // Shift range from the coherent-branch mean: |α + s u| ≈ √mean.
    let s_max = 2.0 * (alpha.norm() + mean.max(0.0).sqrt()) + 4.0;
    let (ns, no) = (400usize, 61usize);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=ns {
        let s = s_max * i as f64 / ns as f64;
        for j in 0..no {
            let o = OMEGA_MAX * j as f64 / (no - 1) as f64;
            let c = cost(s, o);
            if c < best.0 {
                best = (c, s, o);
            }
        }
    }
    let (mut hs, mut ho) = (s_max / ns as f64, OMEGA_MAX / (no - 1) as f64);
    for _ in 0..60 {
        let (_, s, o) = best;
        for (ds, dn) in [(hs, 0.0), (-hs, 0.0), (0.0, ho), (0.0, -ho)] {
            let (s2, o2) = ((s + ds).max(0.0), (o + dn).clamp(0.0, OMEGA_MAX));
            let c = cost(s2, o2);
            if c < best.0 {
                best = (c, s2, o2);
            }
        }
        if best.1 == s && best.2 == o {
            hs *= 0.5;
            ho *= 0.5;
        }
    }
    let (_, shift, omega) = best;
    let (m, v) = ansatz_moments(alpha, dir, shift, omega)
        .ok_or_else(|| Error::Numeric("cat ansatz fit collapsed to a zero-norm state".into()))?;
    Ok(CatFit { shift, omega, mean: m, variance: v })
}
