//! Heisenberg-picture field observables of a harmonic mode.
//!
//! To first order in the coupling the interaction-frame mode operator is
//! `a_q(t) = a_q(0) + g√q Σ_j ∫_0^t d_j(t') e^{iω_q t'} dt'`, with `d_j` the
//! Heisenberg dipole and `⟨d(t')d(t'')⟩` the kernel of
//! [`DipoleCorrelation`]. This phase keeps the ground state dark (the
//! kernel of a static atom oscillates as `e^{−iΔ(t'−t'')}`, `Δ > 0`). The
//! harmonic amplitudes `χ_q` of the state module are the complex conjugates
//! of the means used here; every observable below is invariant under that
//! choice for a real `⟨d⟩`. With `N`
//! independent emitters the mean products carry `N²` and the fluctuation
//! kernel carries `N`. Harmonic modes start in vacuum, so normally ordered
//! moments only see the source term. Four-point moments use Wick
//! factorization of the fluctuation part.

pub mod io;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::phase_space::GaussianModeState;
use crate::qstate::{coherent_amplitudes, CouplingConfig};
use crate::sfa::{DipoleCorrelation, DipoleRecord, LaserPulse, Spectrum, TimeGrid, Window};
use crate::{Error, Result};

/// Minimum record span, in pulse durations, for the stationary limit.
pub const STATIONARY_SPAN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `G⁽¹⁾(t, t+τ)`.
    FirstOrderRaw,
    /// `g⁽¹⁾(τ)`.
    FirstOrderNormalized,
    /// `g⁽²⁾(τ)`, real.
    SecondOrder,
}

/// Correlation function on a uniform delay axis. `equal_time[k]` holds
/// `G⁽¹⁾(t+τ_k, t+τ_k)` for raw series and 1 otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub tau: Vec<f64>,
    pub values: Vec<C64>,
    pub equal_time: Vec<f64>,
    pub kind: SeriesKind,
}

impl CorrelationSeries {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    fn sum(&self, other: &Self) -> Self {
        Self {
            tau: self.tau.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            equal_time: self.equal_time.iter().zip(&other.equal_time).map(|(a, b)| a + b).collect(),
            kind: self.kind,
        }
    }
}

/// Coherent (`∝N²`) and fluctuation (`∝N`) parts of `G⁽¹⁾`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCorrelation {
    pub coherent: CorrelationSeries,
    pub fluctuation: CorrelationSeries,
}

impl FieldCorrelation {
    pub fn total(&self) -> CorrelationSeries {
        self.coherent.sum(&self.fluctuation)
    }
}

/// Reference time and number of delays. The reference snaps to the nearest
/// sample of the correlation grid; delays step by that grid's `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayWindow {
    pub t_ref: f64,
    pub n_tau: usize,
}

/// Markovian environment of the harmonic modes; convention `κ = g0²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentConfig {
    pub kappa: f64,
    pub g0: f64,
}

impl EnvironmentConfig {
    pub fn new(kappa: f64, g0: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !(g0 >= 0.0) || !kappa.is_finite() || !g0.is_finite() {
            return Err(Error::domain(format!("environment needs κ ≥ 0 and g0 ≥ 0, got κ = {kappa}, g0 = {g0}")));
        }
        Ok(Self { kappa, g0 })
    }

    pub fn from_g0(g0: f64) -> Result<Self> {
        Self::new(g0 * g0, g0)
    }
}

/// Moments of mode `q` along the delay axis.
struct ModeMoments {
    tau: Vec<f64>,
    omega: f64,
    /// `⟨a(t)⟩`, `⟨a(t+τ_k)⟩`.
    mu_ref: C64,
    mu: Vec<C64>,
    /// `⟨b(t+τ_k)†b(t+τ_k)⟩`; entry 0 is the reference.
    n_diag: Vec<f64>,
    /// `⟨b(t)†b(t+τ_k)⟩`.
    n_cross: Vec<C64>,
    /// `⟨b(t+τ_k) b(t)⟩`.
    m_cross: Vec<C64>,
}

/// Running integral `∫_{t0}^t y(s) ds` of samples `y` on a uniform grid.
struct Cumulative<'a> {
    grid: &'a TimeGrid,
    y: Vec<C64>,
    prefix: Vec<C64>,
}

impl<'a> Cumulative<'a> {
    fn new(grid: &'a TimeGrid, y: Vec<C64>) -> Self {
        let mut prefix = Vec::with_capacity(y.len());
        let mut acc = C64::new(0.0, 0.0);
        prefix.push(acc);
        for k in 1..y.len() {
            acc += 0.5 * grid.dt * (y[k - 1] + y[k]);
            prefix.push(acc);
        }
        Self { grid, y, prefix }
    }

    fn at(&self, t: f64) -> C64 {
        let x = (t - self.grid.t0) / self.grid.dt;
        if x <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let last = self.y.len() - 1;
        let nearest = x.round();
        if (x - nearest).abs() < 1e-9 {
            return self.prefix[(nearest as usize).min(last)];
        }
        let k = x.floor() as usize;
        if k >= last {
            return self.prefix[last];
        }
        let frac = x - k as f64;
        let yt = self.y[k] * (1.0 - frac) + self.y[k + 1] * frac;
        self.prefix[k] + 0.5 * frac * self.grid.dt * (self.y[k] + yt)
    }
}

fn check_mode(q: usize, coupling: &CouplingConfig) -> Result<()> {
    if q == 0 || q > coupling.q_cutoff {
        return Err(Error::domain(format!("harmonic order {q} outside 1..={}", coupling.q_cutoff)));
    }
    Ok(())
}

/// Trapezoid weights of `∫_{t0}^{t_n}` on the grid, zero beyond `n`.
fn partial_weights(n_total: usize, n: usize, dt: f64) -> Vec<f64> {
    (0..n_total)
        .map(|k| {
            if n == 0 || k > n {
                0.0
            } else if k == 0 || k == n {
                0.5 * dt
            } else {
                dt
            }
        })
        .collect()
}

fn mode_moments(
    record: &DipoleRecord,
    corr: &DipoleCorrelation,
    q: usize,
    coupling: &CouplingConfig,
    window: DelayWindow,
) -> Result<ModeMoments> {
    check_mode(q, coupling)?;
    let omega = q as f64 * record.omega0;
    record.grid.check_nyquist(omega)?;
    corr.grid.check_nyquist(omega)?;
    let cg = corr.grid;
    if window.n_tau == 0 {
        return Err(Error::domain("delay window needs at least one delay"));
    }
    let i0 = ((window.t_ref - cg.t0) / cg.dt).round();
    if !(i0 >= 0.0) || i0 as usize >= cg.n {
        return Err(Error::domain(format!("reference time {} outside the correlation grid", window.t_ref)));
    }
    let i0 = i0 as usize;
    let n_tau = window.n_tau.min(cg.n - i0);
    let n_em = coupling.n_emitters as f64;
    let amp = n_em * coupling.g * (q as f64).sqrt();
    let kernel_scale = n_em * coupling.g * coupling.g * q as f64;

    let y: Vec<C64> = record
        .grid
        .times()
        .zip(&record.values)
        .map(|(t, d)| C64::from_polar(*d, omega * t))
        .collect();
    let cum = Cumulative::new(&record.grid, y);
    let mu_ref = cum.at(cg.time(i0)) * amp;
    let mu: Vec<C64> = (0..n_tau).map(|k| cum.at(cg.time(i0 + k)) * amp).collect();

    let n = cg.n;
    let dt = cg.dt;
    let u: Vec<C64> = cg.times().map(|t| C64::from_polar(1.0, omega * t)).collect();
    let c = &corr.cov;

    // Equal-time fluctuation number D(k) = b_k† C b_k, built incrementally.
    let h: Vec<C64> = (0..n).map(|k| u[k] * if k == 0 { 0.5 * dt } else { dt }).collect();
    let last = i0 + n_tau - 1;
    let mut diag = vec![0.0; last + 1];
    let mut quad = 0.0;
    for m in 0..=last {
        let cb: C64 = (0..m).map(|k| c[(m, k)] * h[k]).sum();
        if m > 0 {
            let e = u[m] * (0.5 * dt);
            diag[m] = quad + 2.0 * (e.conj() * cb).re + e.norm_sqr() * c[(m, m)].re;
        }
        quad += 2.0 * (h[m].conj() * cb).re + h[m].norm_sqr() * c[(m, m)].re;
    }

    // r = C b_ref, then prefix sums against b_{ref+k}.
    let w_ref = partial_weights(n, i0, dt);
    let b_ref: Vec<C64> = (0..n).map(|k| u[k] * w_ref[k]).collect();
    let r: Vec<C64> = (0..n).map(|i| (0..=i0).map(|k| c[(i, k)] * b_ref[k]).sum()).collect();
    let mut n_cross = Vec::with_capacity(n_tau);
    let mut m_cross = Vec::with_capacity(n_tau);
    let (mut pn, mut pm) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for j in 0..=last {
        if j >= i0 {
            let e = if j == 0 { C64::new(0.0, 0.0) } else { u[j] * (0.5 * dt) };
            n_cross.push((pn + r[j].conj() * e) * kernel_scale);
            m_cross.push((pm + r[j] * e) * kernel_scale);
        }
        pn += r[j].conj() * h[j];
        pm += r[j] * h[j];
    }

    Ok(ModeMoments {
        tau: (0..n_tau).map(|k| k as f64 * dt).collect(),
        omega,
        mu_ref,
        mu,
        n_diag: diag[i0..=last].iter().map(|d| d * kernel_scale).collect(),
        n_cross,
        m_cross,
    })
}

/// Coherent and fluctuation parts of `G⁽¹⁾(t, t+τ) = ⟨a_q†(t) a_q(t+τ)⟩`.
///
/// Means come from the dipole record and the fluctuations from the kernel;
/// each part is integrated on its own grid.
pub fn first_order_components(
    record: &DipoleRecord,
    corr: &DipoleCorrelation,
    q: usize,
    coupling: &CouplingConfig,
    window: DelayWindow,
) -> Result<FieldCorrelation> {
    let mm = mode_moments(record, corr, q, coupling, window)?;
    let phase = |tau: f64| C64::from_polar(1.0, -mm.omega * tau);
    let coherent = CorrelationSeries {
        tau: mm.tau.clone(),
        values: mm.mu.iter().zip(&mm.tau).map(|(m, &t)| mm.mu_ref.conj() * m * phase(t)).collect(),
        equal_time: mm.mu.iter().map(|m| m.norm_sqr()).collect(),
        kind: SeriesKind::FirstOrderRaw,
    };
    let fluctuation = CorrelationSeries {
        tau: mm.tau.clone(),
        values: mm.n_cross.iter().zip(&mm.tau).map(|(n, &t)| n * phase(t)).collect(),
        equal_time: mm.n_diag.clone(),
        kind: SeriesKind::FirstOrderRaw,
    };
    Ok(FieldCorrelation { coherent, fluctuation })
}

pub fn first_order_correlation(
    record: &DipoleRecord,
    corr: &DipoleCorrelation,
    q: usize,
    coupling: &CouplingConfig,
    window: DelayWindow,
) -> Result<CorrelationSeries> {
    Ok(first_order_components(record, corr, q, coupling, window)?.total())
}

/// `g⁽¹⁾(τ) = G⁽¹⁾(t, t+τ)/√(G(t,t)·G(t+τ,t+τ))`.
pub fn g1_normalized(series: &CorrelationSeries) -> Result<CorrelationSeries> {
    if series.kind != SeriesKind::FirstOrderRaw {
        return Err(Error::domain("g1_normalized expects a raw first-order series"));
    }
    let i0 = series.equal_time.first().copied().unwrap_or(0.0);
    if !(i0 > 0.0) || series.equal_time.iter().any(|&i| !(i > 0.0)) {
        return Err(Error::domain("zero intensity in g1 normalization"));
    }
    Ok(CorrelationSeries {
        tau: series.tau.clone(),
        values: series.values.iter().zip(&series.equal_time).map(|(v, i)| v / (i0 * i).sqrt()).collect(),
        equal_time: vec![1.0; series.len()],
        kind: SeriesKind::FirstOrderNormalized,
    })
}

/// `⟨A†B†BA⟩` for `A = μ1 + b1`, `B = μ2 + b2` with Gaussian zero-mean `b`.
/// `n12 = ⟨b1†b2⟩`, `m21 = ⟨b2 b1⟩`.
fn wick_intensity_product(mu1: C64, mu2: C64, n11: f64, n22: f64, n12: C64, m21: C64) -> f64 {
    let mean = mu1.norm_sqr() * mu2.norm_sqr();
    let cross = 2.0 * (mu1.conj() * mu2.conj() * m21).re
        + 2.0 * (mu1 * mu2.conj() * n12).re
        + mu2.norm_sqr() * n11
        + mu1.norm_sqr() * n22;
    let fluct = m21.norm_sqr() + n12.norm_sqr() + n11 * n22;
    mean + cross + fluct
}

/// `g⁽²⁾(τ) = ⟨a†(t)a†(t+τ)a(t+τ)a(t)⟩ / (⟨a†a⟩(t)·⟨a†a⟩(t+τ))`.
pub fn g2(
    record: &DipoleRecord,
    corr: &DipoleCorrelation,
    q: usize,
    coupling: &CouplingConfig,
    window: DelayWindow,
) -> Result<CorrelationSeries> {
    let mm = mode_moments(record, corr, q, coupling, window)?;
    let i_ref = mm.mu_ref.norm_sqr() + mm.n_diag[0];
    if !(i_ref > 0.0) {
        return Err(Error::domain("zero intensity at the reference time"));
    }
    let mut values = Vec::with_capacity(mm.tau.len());
    for k in 0..mm.tau.len() {
        let i_k = mm.mu[k].norm_sqr() + mm.n_diag[k];
        if !(i_k > 0.0) {
            return Err(Error::domain("zero intensity in g2 normalization"));
        }
        let num = wick_intensity_product(mm.mu_ref, mm.mu[k], mm.n_diag[0], mm.n_diag[k], mm.n_cross[k], mm.m_cross[k]);
        values.push(C64::new(num / (i_ref * i_k), 0.0));
    }
    Ok(CorrelationSeries {
        tau: mm.tau,
        values,
        equal_time: vec![1.0; mm.mu.len()],
        kind: SeriesKind::SecondOrder,
    })
}

/// Equal-time `g⁽¹⁾_ij = ⟨a_i†a_j⟩/√(n_i n_j)` of a Gaussian state.
pub fn g1_gaussian(state: &GaussianModeState, i: usize, j: usize) -> Result<C64> {
    check_modes(state, i, j)?;
    let (ai, aj) = (state.amplitude(i), state.amplitude(j));
    let (ni, nj) = (state.photon_number(i), state.photon_number(j));
    if !(ni > 0.0) || !(nj > 0.0) {
        return Err(Error::domain("zero intensity in g1 normalization"));
    }
    let g = ai.conj() * aj + state.cross_moments(i, j).0;
    Ok(g / (ni * nj).sqrt())
}

/// Equal-time `g⁽²⁾_ij = ⟨a_i†a_j†a_j a_i⟩/(n_i n_j)` of a Gaussian state.
pub fn g2_gaussian(state: &GaussianModeState, i: usize, j: usize) -> Result<f64> {
    check_modes(state, i, j)?;
    let (ni, nj) = (state.photon_number(i), state.photon_number(j));
    if !(ni > 0.0) || !(nj > 0.0) {
        return Err(Error::domain("zero intensity in g2 normalization"));
    }
    let (fi, fj) = (state.fluctuation_moments(i).0, state.fluctuation_moments(j).0);
    let n12 = state.cross_moments(i, j).0;
    let m21 = state.cross_moments(j, i).1;
    let num = wick_intensity_product(state.amplitude(i), state.amplitude(j), fi, fj, n12, m21);
    Ok(num / (ni * nj))
}

fn check_modes(state: &GaussianModeState, i: usize, j: usize) -> Result<()> {
    let m = state.modes();
    if i >= m || j >= m {
        return Err(Error::Dimension { expected: m, got: i.max(j) + 1 });
    }
    Ok(())
}

/// Cauchy-Schwarz ratio `R = (g⁽²⁾_ij)²/(g⁽²⁾_ii g⁽²⁾_jj)`; `R > 1` witnesses
/// non-classical correlations.
pub fn csi_parameter(g2_ii: f64, g2_jj: f64, g2_ij: f64) -> Result<f64> {
    if !(g2_ii > 0.0) || !(g2_jj > 0.0) || !(g2_ij > 0.0) {
        return Err(Error::domain("CSI parameter needs positive correlation values"));
    }
    Ok(g2_ij * g2_ij / (g2_ii * g2_jj))
}

/// Uniform frequency bins `ω_k = k·step`, `k = 0..bins`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub step: f64,
    pub bins: usize,
}

impl FrequencyGrid {
    pub fn new(step: f64, bins: usize) -> Result<Self> {
        if !(step > 0.0) || bins < 2 {
            return Err(Error::domain("frequency grid needs step > 0 and at least two bins"));
        }
        Ok(Self { step, bins })
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.bins).map(|k| k as f64 * self.step).collect()
    }

    pub fn max(&self) -> f64 {
        (self.bins - 1) as f64 * self.step
    }

    fn bin_of(&self, w: f64) -> Option<usize> {
        let k = (w / self.step).round();
        (k >= 0.0 && (k as usize) < self.bins).then_some(k as usize)
    }
}

/// Harmonic line weights `ω_q |χ_q|²`, `q = 1..=q_cutoff`.
fn line_weights(record: &DipoleRecord, coupling: &CouplingConfig) -> Result<Vec<(f64, f64)>> {
    let amps = coherent_amplitudes(record, coupling, C64::new(0.0, 0.0))?;
    Ok((1..=amps.q_cutoff())
        .map(|q| {
            let w = q as f64 * record.omega0;
            (w, w * amps.photon_number(q))
        })
        .collect())
}

fn spectrum(grid: &FrequencyGrid, intensity: Vec<f64>, omega0: f64) -> Spectrum {
    Spectrum { omega: grid.omegas(), intensity, omega0, window: Window::Rectangular }
}

/// Stationary power spectra as bin-integrated energies per mode spacing `ω0`.
///
/// The coherent part is a set of single-bin masses `ω_q|χ_q|²`. The
/// incoherent part is `ω·n_inc(ω)·Δω/ω0` with
/// `n_inc(ω) = N g² (ω/ω0) ∫∫ e^{−iωt'} C(t',t'') e^{iωt''}`.
pub fn wkt_spectrum(
    record: &DipoleRecord,
    corr: &DipoleCorrelation,
    coupling: &CouplingConfig,
    pulse: &LaserPulse,
    grid: &FrequencyGrid,
) -> Result<(Spectrum, Spectrum)> {
    let span = record.grid.end() - record.grid.t0;
    let need = STATIONARY_SPAN * pulse.duration();
    if span < need {
        return Err(Error::Stationarity(format!("record spans {span:.1} a.u., need {need:.1}")));
    }
    corr.grid.check_nyquist(grid.max())?;
    let omega0 = record.omega0;

    let mut coh = vec![0.0; grid.bins];
    for (w, mass) in line_weights(record, coupling)? {
        if let Some(k) = grid.bin_of(w) {
            coh[k] += mass;
        }
    }

    let cg = corr.grid;
    let wts = partial_weights(cg.n, cg.n - 1, cg.dt);
    let scale = coupling.n_emitters as f64 * coupling.g * coupling.g;
    let c = &corr.cov;
    let inc = grid
        .omegas()
        .into_par_iter()
        .map(|w| {
            let v: Vec<C64> = cg.times().zip(&wts).map(|(t, &wt)| C64::from_polar(wt, w * t)).collect();
            let n_inc = quadratic_form(c, &v);
            w * scale * (w / omega0) * n_inc * grid.step / omega0
        })
        .collect();
    Ok((spectrum(grid, coh, omega0), spectrum(grid, inc, omega0)))
}

/// `v† C v` (real for Hermitian `C`).
fn quadratic_form(c: &DMatrix<C64>, v: &[C64]) -> f64 {
    let mut acc = 0.0;
    for (i, vi) in v.iter().enumerate() {
        let row: C64 = v.iter().enumerate().map(|(k, vk)| c[(i, k)] * vk).sum();
        acc += (vi.conj() * row).re;
    }
    acc
}

/// Coherent spectrum with each harmonic line broadened into a normalized
/// Lorentzian of half-width `κ`; `κ = 0` keeps single-bin masses.
pub fn damped_spectrum(
    record: &DipoleRecord,
    env: &EnvironmentConfig,
    coupling: &CouplingConfig,
    grid: &FrequencyGrid,
) -> Result<Spectrum> {
    let lines = line_weights(record, coupling)?;
    let mut out = vec![0.0; grid.bins];
    if env.kappa == 0.0 {
        for (w, mass) in lines {
            if let Some(k) = grid.bin_of(w) {
                out[k] += mass;
            }
        }
    } else {
        let kappa = env.kappa;
        for (k, w) in grid.omegas().into_iter().enumerate() {
            out[k] = lines
                .iter()
                .map(|&(wq, mass)| mass * kappa / std::f64::consts::PI / ((w - wq).powi(2) + kappa * kappa))
                .sum::<f64>()
                * grid.step;
        }
    }
    Ok(spectrum(grid, out, record.omega0))
}

/// Saturation bound `g²/g0²` of incoherent emission into a damped mode
/// (source rate `∝ g²`, loss rate `κ = g0²`).
pub fn incoherent_power_bound(g: f64, g0: f64) -> Result<f64> {
    if !(g0 > 0.0) {
        return Err(Error::domain("g0 = 0 is the undamped limit with no steady state"));
    }
    Ok(g * g / (g0 * g0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const W0: f64 = 0.057;

    fn grid(n: usize, dt: f64) -> TimeGrid {
        TimeGrid::new(0.0, dt, n).unwrap()
    }

    fn toy_record(g: TimeGrid) -> DipoleRecord {
        let span = g.end();
        let values = g
            .times()
            .map(|t| {
                let env = (std::f64::consts::PI * t / span).sin().powi(2);
                env * (0.3 * (W0 * t).cos() + 0.05 * (3.0 * W0 * t + 0.4).cos())
            })
            .collect();
        DipoleRecord::new(g, values, W0).unwrap()
    }

    fn toy_kernel(g: TimeGrid) -> DipoleCorrelation {
        // Sum of two rank-one channels with distinct carriers.
        let f1: Vec<C64> = g.times().map(|t| C64::from_polar(0.02 * (-t / 400.0).exp(), -0.7 * t)).collect();
        let f2: Vec<C64> = g.times().map(|t| C64::from_polar(0.01, -1.3 * t)).collect();
        let cov = DMatrix::from_fn(g.n, g.n, |i, j| f1[i] * f1[j].conj() + f2[i] * f2[j].conj());
        DipoleCorrelation::new(g, cov).unwrap()
    }

    fn coupling(n: usize) -> CouplingConfig {
        CouplingConfig::new(1e-3, 5, n).unwrap()
    }

    #[test]
    fn zero_sources_give_zero_series() {
        let g = grid(200, 1.0);
        let rec = DipoleRecord::zeros(g, W0);
        let corr = DipoleCorrelation::zeros(g);
        let s = first_order_correlation(&rec, &corr, 3, &coupling(1), DelayWindow { t_ref: 50.0, n_tau: 100 }).unwrap();
        assert!(s.values.iter().all(|v| v.norm() == 0.0));
        assert!(s.equal_time.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn end_intensity_matches_mode_photon_number() {
        let g = grid(400, 0.5);
        let rec = toy_record(g);
        let c = coupling(2);
        let amps = coherent_amplitudes(&rec, &c, C64::new(0.0, 0.0)).unwrap();
        let s = first_order_correlation(&rec, &DipoleCorrelation::zeros(g), 3, &c, DelayWindow { t_ref: g.end(), n_tau: 1 })
            .unwrap();
        let expect = amps.photon_number(3);
        assert!((s.values[0].re - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn emitter_scaling() {
        let g = grid(300, 0.5);
        let (rec, corr) = (toy_record(g), toy_kernel(g));
        let w = DelayWindow { t_ref: 60.0, n_tau: 40 };
        let one = first_order_components(&rec, &corr, 1, &coupling(1), w).unwrap();
        let three = first_order_components(&rec, &corr, 1, &coupling(3), w).unwrap();
        for k in 0..40 {
            assert!((three.coherent.values[k] - 9.0 * one.coherent.values[k]).norm() <= 1e-12 * three.coherent.values[k].norm().max(1e-300));
            assert!((three.fluctuation.values[k] - 3.0 * one.fluctuation.values[k]).norm() <= 1e-12 * three.fluctuation.values[k].norm().max(1e-300));
        }
    }

    #[test]
    fn coherent_only_is_first_order_coherent() {
        let g = grid(300, 0.5);
        let rec = toy_record(g);
        let s = first_order_correlation(&rec, &DipoleCorrelation::zeros(g), 1, &coupling(1), DelayWindow { t_ref: 40.0, n_tau: 200 })
            .unwrap();
        let g1 = g1_normalized(&s).unwrap();
        assert!(g1.values.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn fluctuations_respect_cauchy_schwarz() {
        let g = grid(300, 0.5);
        let s = first_order_correlation(&DipoleRecord::zeros(g, W0), &toy_kernel(g), 2, &coupling(1), DelayWindow { t_ref: 30.0, n_tau: 250 })
            .unwrap();
        let g1 = g1_normalized(&s).unwrap();
        assert!(g1.values.iter().all(|v| v.norm() <= 1.0 + 1e-9));
        assert!((g1.values[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_time_fluctuation_matches_direct_quadratic_form() {
        let g = grid(120, 0.5);
        let corr = toy_kernel(g);
        let c = coupling(1);
        let q = 2;
        let s = first_order_correlation(&DipoleRecord::zeros(g, W0), &corr, q, &c, DelayWindow { t_ref: 10.0, n_tau: 100 }).unwrap();
        let omega = q as f64 * W0;
        for (k, n) in [(0usize, 20usize), (37, 57), (99, 119)] {
            let w = partial_weights(g.n, n, g.dt);
            let v: Vec<C64> = g.times().zip(&w).map(|(t, &wt)| C64::from_polar(wt, omega * t)).collect();
            let direct = quadratic_form(&corr.cov, &v) * c.g * c.g * q as f64;
            assert!((s.equal_time[k] - direct).abs() <= 1e-12 * direct, "{k}");
        }
    }

    #[test]
    fn g2_coherent_only_is_one() {
        let g = grid(300, 0.5);
        let s = g2(&toy_record(g), &DipoleCorrelation::zeros(g), 1, &coupling(1), DelayWindow { t_ref: 40.0, n_tau: 100 }).unwrap();
        assert!(s.values.iter().all(|v| (v.re - 1.0).abs() < 1e-9 && v.im == 0.0));
    }

    #[test]
    fn thermal_and_coherent_anchors() {
        let th = GaussianModeState::thermal(2, 1.7).unwrap();
        assert!((g2_gaussian(&th, 0, 0).unwrap() - 2.0).abs() < 1e-12);
        let r = csi_parameter(g2_gaussian(&th, 0, 0).unwrap(), g2_gaussian(&th, 1, 1).unwrap(), g2_gaussian(&th, 0, 1).unwrap()).unwrap();
        assert!((r - 0.25).abs() < 1e-12);
        let coh = GaussianModeState::coherent(&[C64::new(1.2, -0.4), C64::new(0.0, 2.0)]);
        let r = csi_parameter(g2_gaussian(&coh, 0, 0).unwrap(), g2_gaussian(&coh, 1, 1).unwrap(), g2_gaussian(&coh, 0, 1).unwrap()).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!((g1_gaussian(&coh, 0, 1).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csi_rejects_nonpositive() {
        assert!(csi_parameter(0.0, 1.0, 1.0).is_err());
        assert!(csi_parameter(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn g1_needs_intensity() {
        let g = grid(50, 1.0);
        let s = first_order_correlation(&DipoleRecord::zeros(g, W0), &DipoleCorrelation::zeros(g), 1, &coupling(1), DelayWindow { t_ref: 10.0, n_tau: 5 })
            .unwrap();
        assert!(g1_normalized(&s).is_err());
    }

    #[test]
    fn mode_above_nyquist_is_rejected() {
        let g = grid(50, 20.0);
        let c = CouplingConfig::new(1e-3, 10, 1).unwrap();
        let err = first_order_correlation(&DipoleRecord::zeros(g, W0), &DipoleCorrelation::zeros(g), 5, &c, DelayWindow { t_ref: 10.0, n_tau: 5 })
            .unwrap_err();
        assert!(matches!(err, Error::Nyquist { .. }));
    }

    fn toy_pulse() -> LaserPulse {
        LaserPulse::new(0.02, W0, 0.0, crate::sfa::Envelope::Sin2 { cycles: 2.0 }).unwrap()
    }

    #[test]
    fn wkt_requires_long_window() {
        let p = toy_pulse();
        let g = TimeGrid::covering(&p, 0.5).unwrap();
        let fg = FrequencyGrid::new(W0 / 4.0, 30).unwrap();
        let err = wkt_spectrum(&toy_record(g), &DipoleCorrelation::zeros(g), &coupling(1), &p, &fg).unwrap_err();
        assert!(matches!(err, Error::Stationarity(_)));
    }

    #[test]
    fn wkt_coherent_energy_and_zero_kernel() {
        let p = toy_pulse();
        let g = grid((4.2 * p.duration() / 0.5) as usize, 0.5);
        let rec = toy_record(g);
        let c = coupling(1);
        let fg = FrequencyGrid::new(W0 / 4.0, 30).unwrap();
        let (coh, inc) = wkt_spectrum(&rec, &DipoleCorrelation::zeros(grid(40, 1.0)), &c, &p, &fg).unwrap();
        assert!(inc.intensity.iter().all(|&v| v == 0.0));
        let amps = coherent_amplitudes(&rec, &c, C64::new(0.0, 0.0)).unwrap();
        let energy: f64 = (1..=5).map(|q| q as f64 * W0 * amps.photon_number(q)).sum();
        let total: f64 = coh.intensity.iter().sum();
        assert!((total - energy).abs() <= 0.02 * energy);
        assert!(coh.intensity[4] > 0.0 && coh.intensity[5] == 0.0);
    }

    #[test]
    fn lorentzian_width_and_shared_kernel() {
        let g = grid(2000, 0.5);
        let rec = toy_record(g);
        let c = coupling(1);
        let fg = FrequencyGrid::new(W0 / 200.0, 1000).unwrap();
        let kappa = 10.0 * fg.step;
        let s = damped_spectrum(&rec, &EnvironmentConfig::new(kappa, kappa.sqrt()).unwrap(), &c, &fg).unwrap();
        let peak = 200;
        let half = s.intensity[peak] / 2.0;
        let right = (peak..fg.bins).find(|&k| s.intensity[k] < half).unwrap();
        let (k0, k1) = (right - 1, right);
        let frac = (s.intensity[k0] - half) / (s.intensity[k0] - s.intensity[k1]);
        let hwhm = (k0 as f64 + frac - peak as f64) * fg.step;
        assert!((hwhm - kappa).abs() < 0.05 * kappa, "{hwhm} vs {kappa}");

        let s2 = damped_spectrum(&rec, &EnvironmentConfig::new(2.0 * kappa, 0.0).unwrap(), &c, &fg).unwrap();
        let r1 = s.intensity[600] / s.intensity[200];
        let r2 = s2.intensity[600] / s2.intensity[200];
        assert!((r1 / r2 - 1.0).abs() < 0.05);

        let s0 = damped_spectrum(&rec, &EnvironmentConfig::new(0.0, 0.0).unwrap(), &c, &fg).unwrap();
        assert!(s0.intensity[200] > 0.0 && s0.intensity[199] == 0.0 && s0.intensity[201] == 0.0);
    }

    #[test]
    fn power_bound() {
        assert_eq!(incoherent_power_bound(0.3, 0.3).unwrap(), 1.0);
        let b = incoherent_power_bound(0.1, 0.7).unwrap();
        assert!((incoherent_power_bound(0.4, 0.7).unwrap() / b - 16.0).abs() < 1e-12);
        assert!(incoherent_power_bound(0.1, 0.0).is_err());
    }

    #[test]
    fn saturating_toy_stays_below_bound() {
        // dn/dt = g²·s(t) − κ n with a two-level source s = ρ_ee ≤ 1 relaxing to 1/2.
        let (g, g0) = (0.02, 0.1);
        let env = EnvironmentConfig::from_g0(g0).unwrap();
        let bound = incoherent_power_bound(g, g0).unwrap();
        let (mut n, mut rho, dt) = (0.0f64, 1.0f64, 0.05);
        for _ in 0..400_000 {
            n += dt * (g * g * rho - env.kappa * n);
            rho += dt * 0.01 * (0.5 - rho);
            assert!(n <= bound);
        }
        assert!(n > 0.4 * bound);
    }

    #[test]
    fn csv_roundtrip() {
        let g = grid(100, 0.5);
        let s = first_order_correlation(&toy_record(g), &toy_kernel(g), 1, &coupling(1), DelayWindow { t_ref: 10.0, n_tau: 30 }).unwrap();
        for series in [s.clone(), g1_normalized(&s).unwrap()] {
            let back = io::series_from_csv(&io::series_to_csv(&series)).unwrap();
            assert_eq!(back.kind, series.kind);
            for (a, b) in back.values.iter().zip(&series.values) {
                assert!((a - b).norm() <= 1e-14 * b.norm().max(1e-300));
            }
        }
    }
}
