use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{cutoff_energy, transition_dipole, Atom, LaserPulse, TimeGrid};
use crate::{Error, Result};

/// Dipole time series `⟨d(t)⟩` along the polarization axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleRecord {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    /// Carrier frequency used to label harmonic orders.
    pub omega0: f64,
}

impl DipoleRecord {
    pub fn new(grid: TimeGrid, values: Vec<f64>, omega0: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Dimension { expected: grid.n, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite dipole sample".into()));
        }
        Ok(Self { grid, values, omega0 })
    }

    pub fn zeros(grid: TimeGrid, omega0: f64) -> Self {
        Self { grid, values: vec![0.0; grid.n], omega0 }
    }
}

/// Numerical knobs of the SFA time integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfaOptions {
    /// Regularizer in the `(2π/(ε + iτ))^{3/2}` spreading factor.
    pub epsilon: f64,
    /// Excursion window in optical cycles.
    pub window_cycles: f64,
    /// Fraction of the window over which a cos² taper brings the integrand to zero.
    pub taper_fraction: f64,
}

impl Default for SfaOptions {
    fn default() -> Self {
        Self { epsilon: 1e-4, window_cycles: 1.0, taper_fraction: 0.15 }
    }
}

/// `S = ∫_{t'}^{t} [(p − A)²/2 + I_p] dτ`.
pub fn semiclassical_action(p: f64, t: f64, t_prime: f64, pulse: &LaserPulse, atom: &Atom) -> Result<f64> {
    if t < t_prime {
        return Err(Error::Ordering { t, t_prime });
    }
    let (a1, a2) = pulse.cumulative(t);
    let (b1, b2) = pulse.cumulative(t_prime);
    let tau = t - t_prime;
    Ok((0.5 * p * p + atom.ip()) * tau - p * (a1 - b1) + 0.5 * (a2 - b2))
}

/// Action accumulated since the start of the pulse, `S(p, t, 0)`.
pub fn volkov_phase(p: f64, t: f64, pulse: &LaserPulse, atom: &Atom) -> f64 {
    let (a1, a2) = pulse.cumulative(t);
    (0.5 * p * p + atom.ip()) * t - p * a1 + 0.5 * a2
}

/// Bound-free amplitude `E(t')·d(v − A(t'))·exp[−iS(v, t', 0)]`.
pub fn ionization_amplitude(v: f64, t_prime: f64, pulse: &LaserPulse, atom: &Atom) -> C64 {
    let e = pulse.electric_field(t_prime);
    if e == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let d = transition_dipole(v - pulse.vector_potential(t_prime), atom);
    C64::from_polar(e * d, -volkov_phase(v, t_prime, pulse, atom))
}

pub fn dipole_expectation(pulse: &LaserPulse, atom: &Atom, grid: &TimeGrid) -> Result<DipoleRecord> {
    dipole_expectation_with(pulse, atom, grid, &SfaOptions::default())
}

/// SFA dipole with the momentum integral done at the stationary point
/// `p_st = (1/τ)∫_{t−τ}^{t} A`:
///
/// `⟨d(t)⟩ = 2 Re[−i ∫₀^{τ_max} dτ (2π/(ε + iτ))^{3/2} d(p_st − A(t)) E(t−τ) d(p_st − A(t−τ)) e^{−iS_st}]`.
pub fn dipole_expectation_with(
    pulse: &LaserPulse,
    atom: &Atom,
    grid: &TimeGrid,
    opts: &SfaOptions,
) -> Result<DipoleRecord> {
    grid.check_nyquist(2.0 * cutoff_energy(pulse, atom))?;
    if !(opts.epsilon > 0.0) || !(opts.window_cycles > 0.0) || !(0.0..1.0).contains(&opts.taper_fraction) {
        return Err(Error::domain("invalid SFA options"));
    }
    let window = opts.window_cycles * pulse.period();
    let span = grid.dt * (grid.n - 1) as f64;
    if span < window {
        return Err(Error::Truncation(format!(
            "grid span {span:.3} shorter than the excursion window {window:.3}"
        )));
    }
    if pulse.e0() == 0.0 {
        return Ok(DipoleRecord::zeros(*grid, pulse.omega()));
    }
    let k_max = (window / grid.dt).floor() as usize;
    let taper_start = (1.0 - opts.taper_fraction) * k_max as f64;
    let taper: Vec<f64> = (0..=k_max)
        .map(|k| {
            let k = k as f64;
            if k <= taper_start || opts.taper_fraction == 0.0 {
                1.0
            } else {
                let x = (k - taper_start) / (k_max as f64 - taper_start);
                (0.5 * std::f64::consts::PI * x).cos().powi(2)
            }
        })
        .collect();
    let prefactor: Vec<C64> = (0..=k_max)
        .map(|k| {
            let tau = k as f64 * grid.dt;
            (C64::new(2.0 * std::f64::consts::PI, 0.0) / C64::new(opts.epsilon, tau)).powf(1.5)
        })
        .collect();

    // samples on the extended grid j = −k_max .. n−1
    let offset = k_max;
    let total = grid.n + k_max;
    let at = |j: usize| grid.t0 + grid.dt * (j as f64 - offset as f64);
    let a: Vec<f64> = (0..total).map(|j| pulse.vector_potential(at(j))).collect();
    let e: Vec<f64> = (0..total).map(|j| pulse.electric_field(at(j))).collect();
    let cum: Vec<(f64, f64)> = (0..total).map(|j| pulse.cumulative(at(j))).collect();
    let ip = atom.ip();

    let values: Vec<f64> = (0..grid.n)
        .into_par_iter()
        .map(|i| {
            let ji = i + offset;
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=k_max {
                let jp = ji - k;
                if e[jp] == 0.0 {
                    continue;
                }
                let tau = k as f64 * grid.dt;
                let d1 = cum[ji].0 - cum[jp].0;
                let d2 = cum[ji].1 - cum[jp].1;
                let p = d1 / tau;
                let s = -d1 * d1 / (2.0 * tau) + 0.5 * d2 + ip * tau;
                let amp = transition_dipole(p - a[ji], atom) * e[jp] * transition_dipole(p - a[jp], atom) * taper[k];
                acc += prefactor[k] * C64::from_polar(amp, -s);
            }
            2.0 * (C64::new(0.0, -1.0) * acc).re * grid.dt
        })
        .collect();
    DipoleRecord::new(*grid, values, pulse.omega())
}
