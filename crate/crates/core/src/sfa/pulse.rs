use std::f64::consts::PI;

use crate::units;
use crate::{Error, Result};

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
pub(crate) const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
pub(crate) const GL_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

const CELLS_PER_CYCLE: f64 = 64.0;

/// Field envelope; `cycles` is the full support in optical cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Sin2 { cycles: f64 },
    /// Truncated Gaussian with intensity FWHM of `cycles/8` optical cycles,
    /// so the field at the support edge is below 1e-9 of its peak.
    Gaussian { cycles: f64 },
    /// Constant plateau with sin² ramps of `ramp_cycles` on both sides.
    FlatTop { cycles: f64, ramp_cycles: f64 },
}

impl Envelope {
    pub fn cycles(&self) -> f64 {
        match *self {
            Envelope::Sin2 { cycles } | Envelope::Gaussian { cycles } | Envelope::FlatTop { cycles, .. } => cycles,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Envelope::Sin2 { .. } => "sin2",
            Envelope::Gaussian { .. } => "gaussian",
            Envelope::FlatTop { .. } => "flat-top",
        }
    }
}

/// Linearly polarized classical driver. The pulse occupies `[0, T]`,
/// `T = cycles·2π/ω`, and `A(t) = (E0/ω) f(t) sin(ω(t − T/2) + φ)`,
/// `E = −dA/dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserPulse {
    e0: f64,
    omega: f64,
    cep: f64,
    envelope: Envelope,
    duration: f64,
    cell: f64,
    cum_a: Vec<f64>,
    cum_a2: Vec<f64>,
}

impl LaserPulse {
    pub fn new(e0: f64, omega: f64, cep: f64, envelope: Envelope) -> Result<Self> {
        if !(e0 >= 0.0) || !e0.is_finite() {
            return Err(Error::domain(format!("peak field must be finite and ≥ 0, got {e0}")));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!("carrier frequency must be > 0, got {omega}")));
        }
        if !cep.is_finite() {
            return Err(Error::domain("CEP must be finite"));
        }
        let cycles = envelope.cycles();
        if !(cycles >= 1.0) || !cycles.is_finite() {
            return Err(Error::domain(format!("cycle count must be ≥ 1, got {cycles}")));
        }
        if let Envelope::FlatTop { ramp_cycles, .. } = envelope {
            if !(ramp_cycles >= 0.0) || 2.0 * ramp_cycles > cycles {
                return Err(Error::domain("flat-top ramps must fit inside the pulse"));
            }
        }
        let period = 2.0 * PI / omega;
        let duration = cycles * period;
        let n_cells = (cycles * CELLS_PER_CYCLE).ceil() as usize;
        let cell = duration / n_cells as f64;
        let mut pulse = Self { e0, omega, cep, envelope, duration, cell, cum_a: Vec::new(), cum_a2: Vec::new() };
        let mut cum_a = Vec::with_capacity(n_cells + 1);
        let mut cum_a2 = Vec::with_capacity(n_cells + 1);
        let (mut s1, mut s2) = (0.0, 0.0);
        cum_a.push(0.0);
        cum_a2.push(0.0);
        for k in 0..n_cells {
            let (a1, a2) = pulse.gl_segment(k as f64 * cell, (k + 1) as f64 * cell);
            s1 += a1;
            s2 += a2;
            cum_a.push(s1);
            cum_a2.push(s2);
        }
        pulse.cum_a = cum_a;
        pulse.cum_a2 = cum_a2;
        Ok(pulse)
    }

    /// Pulse from wavelength in nm and peak intensity in W/cm².
    pub fn from_lab(wavelength_nm: f64, intensity_w_cm2: f64, cep: f64, envelope: Envelope) -> Result<Self> {
        if !(wavelength_nm > 0.0) || !(intensity_w_cm2 >= 0.0) {
            return Err(Error::domain("wavelength must be > 0 and intensity ≥ 0"));
        }
        Self::new(
            units::intensity_w_cm2_to_field(intensity_w_cm2),
            units::wavelength_nm_to_omega(wavelength_nm),
            cep,
            envelope,
        )
    }

    /// Same envelope and carrier with a different peak field and CEP.
    pub fn with_field(&self, e0: f64, cep: f64) -> Result<Self> {
        Self::new(e0, self.omega, cep, self.envelope)
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn cep(&self) -> f64 {
        self.cep
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn center(&self) -> f64 {
        0.5 * self.duration
    }

    pub fn ponderomotive_energy(&self) -> f64 {
        self.e0 * self.e0 / (4.0 * self.omega * self.omega)
    }

    /// Envelope value and time derivative.
    fn shape(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 || t >= self.duration {
            return (0.0, 0.0);
        }
        let tp = self.duration;
        match self.envelope {
            Envelope::Sin2 { .. } => {
                let arg = PI * t / tp;
                (arg.sin().powi(2), PI / tp * (2.0 * arg).sin())
            }
            Envelope::Gaussian { .. } => {
                let fwhm = tp / 8.0;
                let k = 2.0 * std::f64::consts::LN_2 / (fwhm * fwhm);
                let dt = t - 0.5 * tp;
                let f = (-k * dt * dt).exp();
                (f, -2.0 * k * dt * f)
            }
            Envelope::FlatTop { ramp_cycles, .. } => {
                let ramp = ramp_cycles * self.period();
                if ramp <= 0.0 {
                    return (1.0, 0.0);
                }
                let ramp_fn = |s: f64| {
                    let arg = 0.5 * PI * s / ramp;
                    (arg.sin().powi(2), 0.5 * PI / ramp * (2.0 * arg).sin())
                };
                if t < ramp {
                    ramp_fn(t)
                } else if t > tp - ramp {
                    let (f, d) = ramp_fn(tp - t);
                    (f, -d)
                } else {
                    (1.0, 0.0)
                }
            }
        }
    }

    pub fn vector_potential(&self, t: f64) -> f64 {
        let (f, _) = self.shape(t);
        self.e0 / self.omega * f * self.phase(t).sin()
    }

    pub fn electric_field(&self, t: f64) -> f64 {
        let (f, df) = self.shape(t);
        let ph = self.phase(t);
        -self.e0 / self.omega * (df * ph.sin() + self.omega * f * ph.cos())
    }

    fn phase(&self, t: f64) -> f64 {
        self.omega * (t - self.center()) + self.cep
    }

    fn gl_segment(&self, a: f64, b: f64) -> (f64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let (mut s1, mut s2) = (0.0, 0.0);
        for (x, w) in GL_X.iter().zip(GL_W.iter()) {
            let av = self.vector_potential(mid + half * x);
            s1 += w * av;
            s2 += w * av * av;
        }
        (s1 * half, s2 * half)
    }

    /// `(∫₀ᵗ A, ∫₀ᵗ A²)`.
    pub fn cumulative(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0);
        }
        let last = self.cum_a.len() - 1;
        if t >= self.duration {
            return (self.cum_a[last], self.cum_a2[last]);
        }
        let k = ((t / self.cell).floor() as usize).min(last - 1);
        let tk = k as f64 * self.cell;
        let (p1, p2) = if t > tk { self.gl_segment(tk, t) } else { (0.0, 0.0) };
        (self.cum_a[k] + p1, self.cum_a2[k] + p2)
    }

    pub fn int_a(&self, t: f64) -> f64 {
        self.cumulative(t).0
    }

    pub fn int_a2(&self, t: f64) -> f64 {
        self.cumulative(t).1
    }
}
