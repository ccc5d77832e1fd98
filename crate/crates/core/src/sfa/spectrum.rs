use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::DipoleRecord;

/// Relative threshold of the cutoff-bin detector (last harmonic above the noise floor).
pub const CUTOFF_THRESHOLD: f64 = 1e-4;

/// Relative threshold locating the plateau edge: last harmonic whose peak
/// still reaches the plateau median.
pub const PLATEAU_EDGE_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Hann,
    Rectangular,
}

impl Window {
    pub fn name(&self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Rectangular => "rectangular",
        }
    }

    pub fn weights(&self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|j| (std::f64::consts::PI * j as f64 / (n - 1).max(1) as f64).sin().powi(2))
                .collect(),
        }
    }
}

/// Power spectrum `I(ω) = ω⁴ |d̃(ω)|²` on the non-negative FFT bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub intensity: Vec<f64>,
    pub omega0: f64,
    pub window: Window,
}

impl Spectrum {
    pub fn bin_width(&self) -> f64 {
        self.omega.get(1).copied().unwrap_or(0.0)
    }

    pub fn harmonic_order(&self, k: usize) -> f64 {
        self.omega[k] / self.omega0
    }

    /// Index of the bin nearest to frequency `w`.
    pub fn bin_of(&self, w: f64) -> usize {
        let k = (w / self.bin_width()).round().max(0.0) as usize;
        k.min(self.omega.len() - 1)
    }

    /// Peak intensity inside `[q − ½, q + ½)` harmonic orders.
    pub fn harmonic_peak(&self, q: f64) -> f64 {
        let lo = self.bin_of((q - 0.5) * self.omega0);
        let hi = self.bin_of((q + 0.5) * self.omega0);
        self.intensity[lo..hi.max(lo + 1).min(self.intensity.len())]
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }
}

/// Windowed spectrum of a dipole record; `d̃(ω_k) = dt·Σ_j w_j d_j e^{−iω_k t_j}`.
pub fn hhg_spectrum(record: &DipoleRecord, window: Window) -> Spectrum {
    let n = record.values.len();
    let w = window.weights(n);
    let mut buf: Vec<C64> = record.values.iter().zip(&w).map(|(d, w)| C64::new(d * w, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dt = record.grid.dt;
    let dw = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let bins = n / 2 + 1;
    let omega: Vec<f64> = (0..bins).map(|k| k as f64 * dw).collect();
    let intensity = (0..bins).map(|k| omega[k].powi(4) * buf[k].norm_sqr() * dt * dt).collect();
    Spectrum { omega, intensity, omega0: record.omega0, window }
}

/// Highest harmonic order whose per-harmonic peak exceeds `threshold` times the
/// median peak of the plateau band `[q_lo, q_hi]`. `None` for an empty spectrum.
pub fn detect_cutoff(spectrum: &Spectrum, q_lo: f64, q_hi: f64, threshold: f64) -> Option<f64> {
    let median = plateau_median(spectrum, q_lo, q_hi)?;
    let q_top = (spectrum.omega.last()? / spectrum.omega0 - 0.5).floor();
    let level = threshold * median;
    (1..=q_top as usize).rev().map(|q| q as f64).find(|&q| spectrum.harmonic_peak(q) > level)
}

/// Last bin whose intensity exceeds `threshold` times the median of the
/// per-harmonic peaks in `[q_lo, q_hi]`.
pub fn detect_cutoff_bin(spectrum: &Spectrum, q_lo: f64, q_hi: f64, threshold: f64) -> Option<usize> {
    let median = plateau_median(spectrum, q_lo, q_hi)?;
    let level = threshold * median;
    let start = spectrum.bin_of(q_lo * spectrum.omega0);
    (start..spectrum.intensity.len()).rev().find(|&k| spectrum.intensity[k] > level)
}

fn plateau_median(spectrum: &Spectrum, q_lo: f64, q_hi: f64) -> Option<f64> {
    let q_top = (spectrum.omega.last()? / spectrum.omega0 - 0.5).floor();
    if q_top < q_lo {
        return None;
    }
    let mut plateau: Vec<f64> = (q_lo.ceil() as usize..=q_hi.min(q_top).floor() as usize)
        .map(|q| spectrum.harmonic_peak(q as f64))
        .collect();
    if plateau.is_empty() {
        return None;
    }
    plateau.sort_by(f64::total_cmp);
    let median = plateau[plateau.len() / 2];
    (median > 0.0).then_some(median)
}
