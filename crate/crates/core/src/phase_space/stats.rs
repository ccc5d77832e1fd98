use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::coherent::{overlap_exponent, CoherentOperatorMix, CoherentSuperposition};
use super::gaussian::GaussianModeState;
use crate::linalg::symmetric_eigh;
use crate::{Error, Result};

/// Photon-number distribution of a single mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonStatistics {
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub mandel_q: f64,
}

impl PhotonStatistics {
    fn from_pmf(pmf: Vec<f64>) -> Self {
        let mean: f64 = pmf.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let second: f64 = pmf.iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum();
        let variance = second - mean * mean;
        let mandel_q = if mean > 0.0 { (variance - mean) / mean } else { 0.0 };
        Self { pmf, mean, variance, mandel_q }
    }

    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }
}

/// State carriers accepted by [`photon_statistics`].
#[derive(Debug, Clone, Copy)]
pub enum StatsInput<'a> {
    Superposition(&'a CoherentSuperposition),
    Mixed(&'a CoherentOperatorMix),
    Gaussian(&'a GaussianModeState),
}

impl<'a> From<&'a CoherentSuperposition> for StatsInput<'a> {
    fn from(s: &'a CoherentSuperposition) -> Self {
        StatsInput::Superposition(s)
    }
}

impl<'a> From<&'a CoherentOperatorMix> for StatsInput<'a> {
    fn from(s: &'a CoherentOperatorMix) -> Self {
        StatsInput::Mixed(s)
    }
}

impl<'a> From<&'a GaussianModeState> for StatsInput<'a> {
    fn from(s: &'a GaussianModeState) -> Self {
        StatsInput::Gaussian(s)
    }
}

/// `p(n)` for `n = 0..=n_max` of one mode, other modes traced out.
pub fn photon_statistics<'a>(state: impl Into<StatsInput<'a>>, mode: usize, n_max: usize) -> Result<PhotonStatistics> {
    match state.into() {
        StatsInput::Superposition(s) => {
            let n = s.norm_sqr();
            if (n - 1.0).abs() > 1e-8 {
                return Err(Error::Structure(format!("state norm {n} differs from one")));
            }
            dyad_statistics(&s.to_operator(), mode, n_max)
        }
        StatsInput::Mixed(op) => dyad_statistics(op, mode, n_max),
        StatsInput::Gaussian(g) => gaussian_statistics(g, mode, n_max),
    }
}

fn check_truncation(mean: f64, n_max: usize) -> Result<()> {
    if (n_max as f64) < 10.0 * mean {
        return Err(Error::Truncation(format!("n_max = {n_max} below 10·⟨n⟩ = {:.3}", 10.0 * mean)));
    }
    Ok(())
}

fn dyad_statistics(op: &CoherentOperatorMix, mode: usize, n_max: usize) -> Result<PhotonStatistics> {
    if mode >= op.modes() {
        return Err(Error::Dimension { expected: op.modes(), got: mode + 1 });
    }
    // ⟨n|ρ_m|n⟩ = Σ c ⟨β̄|ᾱ⟩ e^{−β*α} (α β*)^n / n!
    let mut terms = Vec::with_capacity(op.dyads().len());
    let mut mean = C64::new(0.0, 0.0);
    for d in op.dyads() {
        if d.coeff.norm() == 0.0 {
            continue;
        }
        let a = d.ket[mode];
        let b = d.bra[mode];
        let z = a * b.conj();
        let lead = d.coeff.ln() + overlap_exponent(&d.ket, &d.bra) - z;
        mean += (lead + z).exp() * z;
        terms.push((lead, z));
    }
    check_truncation(mean.re, n_max)?;
    let mut ln_fact = 0.0;
    let mut pmf = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let mut acc = 0.0;
        for &(lead, z) in &terms {
            if n == 0 {
                acc += lead.exp().re;
            } else if z.norm() > 0.0 {
                acc += (lead + z.ln() * n as f64 - ln_fact).exp().re;
            }
        }
        pmf.push(acc.max(0.0));
    }
    Ok(PhotonStatistics::from_pmf(pmf))
}

/// Generating function `Σ p(n) zⁿ = det(I + sΣ)^{−1/2} exp(−(s/2) dᵀ(I + sΣ)^{−1} d)`,
/// `s = 1 − z`, `Σ = V − I/2`, sampled on the unit circle and inverted by FFT.
fn gaussian_statistics(g: &GaussianModeState, mode: usize, n_max: usize) -> Result<PhotonStatistics> {
    if mode >= g.modes() {
        return Err(Error::Dimension { expected: g.modes(), got: mode + 1 });
    }
    check_truncation(g.photon_number(mode), n_max)?;
    let red = g.reduced(&[mode])?;
    let sigma = red.covariance() - nalgebra::DMatrix::identity(2, 2) * 0.5;
    let (lam, u) = symmetric_eigh(&sigma);
    let d = u.transpose() * red.mean();
    let len = (8 * (n_max + 1)).max(256).next_power_of_two();
    let mut buf: Vec<C64> = (0..len)
        .map(|k| {
            let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / len as f64);
            let s = C64::new(1.0, 0.0) - z;
            let mut val = C64::new(1.0, 0.0);
            let mut quad = C64::new(0.0, 0.0);
            for i in 0..2 {
                let f = C64::new(1.0, 0.0) + s * lam[i];
                val /= f.sqrt();
                quad += d[i] * d[i] / f;
            }
            val * (-0.5 * s * quad).exp()
        })
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let pmf = buf[..=n_max].iter().map(|c| (c.re / len as f64).max(0.0)).collect();
    Ok(PhotonStatistics::from_pmf(pmf))
}
