//! Quantum optics of direct above-threshold ionization.
//!
//! Sign conventions follow [`crate::sfa`]: canonical momentum `p`, kinetic
//! momentum `p − A(τ)`, ionization amplitude `E(t')·d(p − A(t'))·e^{−iS}`.
//! Electrons are detected at the end of the pulse where `A = 0`, so the drift
//! momentum labelling a continuum state equals its measured kinetic momentum.
//!
//! All momentum integrals run on the line along the polarization axis.
//! Field displacements act on each harmonic mode `q` with `ω_q = qω₀`. The
//! emitter count of the coupling is ignored here since a single electron is
//! followed.

pub mod io;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::phase_space::{branch_entropy, CoherentSuperposition};
use crate::qstate::{CouplingConfig, HarmonicAmplitudes};
use crate::sfa::{transition_dipole, Atom, LaserPulse, TimeGrid};
use crate::{Error, Result};

pub const MIN_CONTINUUM_POINTS: usize = 64;

/// Uniform momentum line `[−v_max, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumGrid {
    pub v_max: f64,
    pub count: usize,
}

impl ContinuumGrid {
    pub fn new(v_max: f64, count: usize) -> Result<Self> {
        if !(v_max > 0.0) || !v_max.is_finite() {
            return Err(Error::domain("v_max must be positive and finite"));
        }
        if count < MIN_CONTINUUM_POINTS {
            return Err(Error::domain(format!("continuum grid needs at least {MIN_CONTINUUM_POINTS} points")));
        }
        Ok(Self { v_max, count })
    }

    /// Grid reaching kinetic energy `4U_p` (at least `v = 1`).
    pub fn for_pulse(pulse: &LaserPulse, count: usize) -> Result<Self> {
        Self::new((8.0 * pulse.ponderomotive_energy()).sqrt().max(1.0), count)
    }

    /// Fails unless the grid reaches the `2U_p` energy.
    pub fn check_covers(&self, pulse: &LaserPulse) -> Result<()> {
        let required = (4.0 * pulse.ponderomotive_energy()).sqrt();
        if self.v_max < required {
            return Err(Error::Coverage { v_max: self.v_max, required });
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        2.0 * self.v_max / (self.count - 1) as f64
    }

    pub fn velocity(&self, i: usize) -> f64 {
        -self.v_max + self.step() * i as f64
    }

    pub fn velocities(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.velocity(i)).collect()
    }

    /// Trapezoid weights on the grid.
    fn weights(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.count).map(|i| if i == 0 || i + 1 == self.count { 0.5 * h } else { h }).collect()
    }
}

/// Keldysh parameter `√(I_p / 2U_p)`.
pub fn keldysh_parameter(pulse: &LaserPulse, atom: &Atom) -> f64 {
    (atom.ip() / (2.0 * pulse.ponderomotive_energy())).sqrt()
}

/// `Δr = ∫_{t₁}^{t} dτ [v + A(t) − A(τ)]` for kinetic momentum `v` at time `t`.
pub fn continuum_displacement(v: f64, t: f64, t1: f64, pulse: &LaserPulse) -> Result<f64> {
    if t < t1 {
        return Err(Error::Ordering { t, t_prime: t1 });
    }
    Ok((v + pulse.vector_potential(t)) * (t - t1) - (pulse.int_a(t) - pulse.int_a(t1)))
}

/// `δ_q = g√q ∫_{t'}^{t} dτ Δr(τ) e^{−iω_q τ}` for an electron of drift
/// momentum `v` released at `t'`, by trapezoid quadrature with step at most
/// `dt`.
pub fn mode_displacement(
    v: f64,
    t: f64,
    t_prime: f64,
    pulse: &LaserPulse,
    coupling: &CouplingConfig,
    q: usize,
    dt: f64,
) -> Result<C64> {
    if t < t_prime {
        return Err(Error::Ordering { t, t_prime });
    }
    if q == 0 || !(dt > 0.0) {
        return Err(Error::domain("mode order must be ≥ 1 and dt > 0"));
    }
    let omega = q as f64 * pulse.omega();
    let steps = ((t - t_prime) / dt).ceil().max(1.0) as usize;
    let h = (t - t_prime) / steps as f64;
    if omega * h > std::f64::consts::PI {
        return Err(Error::Nyquist { product: omega * h });
    }
    let i0 = pulse.int_a(t_prime);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..=steps {
        let tau = t_prime + h * j as f64;
        let dr = v * (tau - t_prime) - (pulse.int_a(tau) - i0);
        let w = if j == 0 || j == steps { 0.5 * h } else { h };
        acc += C64::from_polar(w * dr, -omega * tau);
    }
    Ok(acc * coupling.g * (q as f64).sqrt())
}

/// Field-free quantities sampled once on the ionization-time grid.
struct Trajectory {
    grid: TimeGrid,
    e: Vec<f64>,
    a: Vec<f64>,
    int_a: Vec<f64>,
    int_a2: Vec<f64>,
    ip: f64,
    omega0: f64,
}

impl Trajectory {
    fn new(pulse: &LaserPulse, atom: &Atom, grid: &TimeGrid) -> Self {
        let times: Vec<f64> = grid.times().collect();
        let cum: Vec<(f64, f64)> = times.iter().map(|&t| pulse.cumulative(t)).collect();
        Self {
            grid: *grid,
            e: times.iter().map(|&t| pulse.electric_field(t)).collect(),
            a: times.iter().map(|&t| pulse.vector_potential(t)).collect(),
            int_a: cum.iter().map(|c| c.0).collect(),
            int_a2: cum.iter().map(|c| c.1).collect(),
            ip: atom.ip(),
            omega0: pulse.omega(),
        }
    }

    fn check_phase_resolution(&self, v_max: f64) -> Result<()> {
        let a_max = self.a.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        self.grid.check_nyquist(0.5 * (v_max.abs() + a_max).powi(2) + self.ip)
    }

    /// `−i·h_k·E·d(v − A)·e^{−iS(v, t_k, 0)}` on every node with nonzero field.
    fn weights(&self, v: f64, atom: &Atom) -> Vec<(usize, C64)> {
        let n = self.grid.n;
        (0..n)
            .filter(|&k| self.e[k] != 0.0)
            .map(|k| {
                let t = self.grid.time(k);
                let s = (0.5 * v * v + self.ip) * t - v * self.int_a[k] + 0.5 * self.int_a2[k];
                let h = if k == 0 || k + 1 == n { 0.5 * self.grid.dt } else { self.grid.dt };
                let mag = h * self.e[k] * transition_dipole(v - self.a[k], atom);
                (k, C64::new(0.0, -1.0) * C64::from_polar(mag, -s))
            })
            .collect()
    }

    /// Tail integrals `∫_{t_k}^{T} f e^{−iωτ}` for `f = 1, τ, ∫A`.
    fn tails(&self, q: usize) -> Result<ModeTails> {
        let omega = q as f64 * self.omega0;
        let dt = self.grid.dt;
        if omega * dt > std::f64::consts::PI {
            return Err(Error::Nyquist { product: omega * dt });
        }
        let n = self.grid.n;
        let mut tails = ModeTails { q, c0: vec![C64::new(0.0, 0.0); n], c1: vec![C64::new(0.0, 0.0); n], ci: vec![C64::new(0.0, 0.0); n] };
        let f = |k: usize| {
            let t = self.grid.time(k);
            let e = C64::from_polar(1.0, -omega * t);
            (e, e * t, e * self.int_a[k])
        };
        let mut prev = f(n - 1);
        for k in (0..n - 1).rev() {
            let cur = f(k);
            tails.c0[k] = tails.c0[k + 1] + 0.5 * dt * (cur.0 + prev.0);
            tails.c1[k] = tails.c1[k + 1] + 0.5 * dt * (cur.1 + prev.1);
            tails.ci[k] = tails.ci[k + 1] + 0.5 * dt * (cur.2 + prev.2);
            prev = cur;
        }
        Ok(tails)
    }
}

struct ModeTails {
    q: usize,
    c0: Vec<C64>,
    c1: Vec<C64>,
    ci: Vec<C64>,
}

impl ModeTails {
    /// `δ_q` for release at node `k`, detection at the grid end.
    fn displacement(&self, traj: &Trajectory, g: f64, v: f64, k: usize) -> C64 {
        let t = traj.grid.time(k);
        let dr = v * (self.c1[k] - self.c0[k] * t) - (self.ci[k] - self.c0[k] * traj.int_a[k]);
        dr * g * (self.q as f64).sqrt()
    }
}

/// Field state of a dATI electron with drift momentum `v`:
/// `Σ_k w_k |δ̄(v, T, t'_k)⟩`, one coherent component per ionization time.
#[derive(Debug, Clone, PartialEq)]
pub struct DatiFieldState {
    pub v: f64,
    /// Harmonic orders of the displaced modes.
    pub orders: Vec<usize>,
    pub weights: Vec<C64>,
    pub displacements: Vec<Vec<C64>>,
}

impl DatiFieldState {
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Semiclassical dATI amplitude, i.e. the state with all displacements removed.
    pub fn decoupled_amplitude(&self) -> C64 {
        self.weights.iter().sum()
    }

    pub fn to_superposition(&self) -> Result<CoherentSuperposition> {
        if self.is_empty() {
            return Err(Error::ZeroNorm { norm2: 0.0 });
        }
        let terms = self.weights.iter().copied().zip(self.displacements.iter().cloned()).collect();
        CoherentSuperposition::new(self.orders.len(), terms)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_superposition().map(|s| s.norm_sqr()).unwrap_or(0.0)
    }
}

/// Builds the dATI field state on the ionization-time `grid`; detection is at
/// the grid end. Modes are `q = 1..=q_cutoff` of the coupling.
pub fn dati_field_state(
    v: f64,
    pulse: &LaserPulse,
    atom: &Atom,
    coupling: &CouplingConfig,
    grid: &TimeGrid,
) -> Result<DatiFieldState> {
    let traj = Trajectory::new(pulse, atom, grid);
    traj.check_phase_resolution(v)?;
    let orders: Vec<usize> = (1..=coupling.q_cutoff).collect();
    let tails: Vec<ModeTails> = orders.iter().map(|&q| traj.tails(q)).collect::<Result<_>>()?;
    Ok(build_state(&traj, &tails, atom, coupling.g, v, orders))
}

fn build_state(traj: &Trajectory, tails: &[ModeTails], atom: &Atom, g: f64, v: f64, orders: Vec<usize>) -> DatiFieldState {
    let nodes = traj.weights(v, atom);
    let displacements = nodes.iter().map(|&(k, _)| tails.iter().map(|m| m.displacement(traj, g, v, k)).collect()).collect();
    DatiFieldState { v, orders, weights: nodes.into_iter().map(|(_, w)| w).collect(), displacements }
}

/// dATI momentum distribution `|M(v)|²` on the continuum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotoelectronSpectrum {
    pub v: Vec<f64>,
    pub density: Vec<f64>,
    pub up: f64,
}

impl PhotoelectronSpectrum {
    /// Rows `(E, |M(v)|² + |M(−v)|²)` for `v > 0`; the grid is symmetric.
    pub fn energy_yield(&self) -> Vec<(f64, f64)> {
        let n = self.v.len();
        (0..n)
            .filter(|&i| self.v[i] > 0.0)
            .map(|i| (0.5 * self.v[i] * self.v[i], self.density[i] + self.density[n - 1 - i]))
            .collect()
    }

    /// Largest energy-resolved yield inside `[e − half_width, e + half_width]`.
    pub fn peak_near(&self, energy: f64, half_width: f64) -> f64 {
        self.energy_yield()
            .into_iter()
            .filter(|(e, _)| (e - energy).abs() <= half_width)
            .map(|(_, y)| y)
            .fold(0.0, f64::max)
    }

    /// Peak yield near `2U_p` over peak yield near `2.5U_p`, each taken over
    /// one photon energy.
    pub fn falloff_ratio(&self, omega: f64) -> f64 {
        self.peak_near(2.0 * self.up, 0.5 * omega) / self.peak_near(2.5 * self.up, 0.5 * omega)
    }

    /// `∫dv |M(v)|²` by the trapezoid rule.
    pub fn total_yield(&self) -> f64 {
        let h = self.v.get(1).map(|v1| v1 - self.v[0]).unwrap_or(0.0);
        let n = self.density.len();
        self.density.iter().enumerate().map(|(i, d)| if i == 0 || i + 1 == n { 0.5 * h * d } else { h * d }).sum()
    }
}

pub fn photoelectron_spectrum(pulse: &LaserPulse, atom: &Atom, cgrid: &ContinuumGrid, grid: &TimeGrid) -> Result<PhotoelectronSpectrum> {
    cgrid.check_covers(pulse)?;
    let traj = Trajectory::new(pulse, atom, grid);
    traj.check_phase_resolution(cgrid.v_max)?;
    let v = cgrid.velocities();
    let density = v
        .par_iter()
        .map(|&vi| traj.weights(vi, atom).iter().map(|(_, w)| w).sum::<C64>().norm_sqr())
        .collect();
    Ok(PhotoelectronSpectrum { v, density, up: pulse.ponderomotive_energy() })
}

/// `P(ω_q) = ∫dv |⟨1_q|Φ(v)⟩|²` with the field state restricted to mode `q`
/// and `⟨1|β⟩ = β e^{−|β|²/2}`.
pub fn photon_emission_probability(
    pulse: &LaserPulse,
    atom: &Atom,
    coupling: &CouplingConfig,
    q: usize,
    cgrid: &ContinuumGrid,
    grid: &TimeGrid,
) -> Result<f64> {
    if q == 0 {
        return Err(Error::domain("mode order must be ≥ 1"));
    }
    let traj = Trajectory::new(pulse, atom, grid);
    traj.check_phase_resolution(cgrid.v_max)?;
    let tails = traj.tails(q)?;
    let vw = cgrid.weights();
    let parts: Vec<f64> = cgrid
        .velocities()
        .par_iter()
        .zip(&vw)
        .map(|(&v, h)| {
            let amp: C64 = traj
                .weights(v, atom)
                .into_iter()
                .map(|(k, w)| {
                    let d = tails.displacement(&traj, coupling.g, v, k);
                    w * d * (-0.5 * d.norm_sqr()).exp()
                })
                .sum();
            h * amp.norm_sqr()
        })
        .collect();
    Ok(parts.into_iter().sum())
}

/// Single-photon probability `|χ_q|² e^{−|χ_q|²}` of a coherent harmonic mode.
pub fn hhg_photon_probability(amps: &HarmonicAmplitudes, q: usize) -> f64 {
    let n = amps.photon_number(q);
    n * (-n).exp()
}

/// Entropy of the electron label in `|+v⟩|Φ₊⟩ + |−v⟩|Φ₋⟩`.
pub fn two_branch_entropy(plus: &DatiFieldState, minus: &DatiFieldState) -> Result<f64> {
    branch_entropy(&[plus.to_superposition()?, minus.to_superposition()?])
}

/// Light-matter entanglement entropy for electrons of speed `v` emitted
/// forward and backward along the polarization axis.
pub fn light_matter_entropy(pulse: &LaserPulse, atom: &Atom, coupling: &CouplingConfig, v: f64, grid: &TimeGrid) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::domain("electron speed must be positive"));
    }
    let plus = dati_field_state(v, pulse, atom, coupling, grid)?;
    let minus = dati_field_state(-v, pulse, atom, coupling, grid)?;
    two_branch_entropy(&plus, &minus)
}
