//! Non-classical drivers in the classical limit of the positive-P weight.
//!
//! Each driver state becomes a normalized density over coherent amplitudes
//! `α`, and every observable is an incoherent average of classical runs
//! driven by `E_α(t)`. Coherent drivers reduce to a point mass. Thermal
//! drivers use their Glauber P function, a Gaussian with variance `n̄` per
//! quadrature (`x = √2 Re α`). Squeezed drivers have no regular P function
//! and use the Wigner Gaussian instead, whose quadrature variances are
//! `e^{∓2r}/2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::symmetric_eigh;
use crate::phase_space::GaussianModeState;
use crate::sfa::{cutoff_energy, dipole_expectation_with, hhg_spectrum, Atom, LaserPulse, SfaOptions, Spectrum, TimeGrid, Window};
use crate::{Error, Result};

/// Smallest node budget accepted for a spread-out weight.
pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriverKind {
    Coherent,
    SqueezedVacuum,
    DisplacedSqueezed,
    Thermal,
}

impl DriverKind {
    pub fn name(&self) -> &'static str {
        match self {
            DriverKind::Coherent => "coherent",
            DriverKind::SqueezedVacuum => "squeezed-vacuum",
            DriverKind::DisplacedSqueezed => "displaced-squeezed",
            DriverKind::Thermal => "thermal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "coherent" => Ok(DriverKind::Coherent),
            "squeezed-vacuum" | "squeezed" | "bsv" => Ok(DriverKind::SqueezedVacuum),
            "displaced-squeezed" => Ok(DriverKind::DisplacedSqueezed),
            "thermal" => Ok(DriverKind::Thermal),
            other => Err(Error::Domain(format!("unknown driver kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverDistribution {
    pub kind: DriverKind,
    pub alpha0: C64,
    pub r: f64,
    /// Minor-axis angle of the squeezed quadrature.
    pub theta: f64,
    pub nbar: f64,
}

impl DriverDistribution {
    pub fn new(kind: DriverKind, alpha0: C64, r: f64, theta: f64, nbar: f64) -> Result<Self> {
        if !alpha0.re.is_finite() || !alpha0.im.is_finite() || !theta.is_finite() {
            return Err(Error::domain("driver parameters must be finite"));
        }
        if !(r >= 0.0) || !r.is_finite() || !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::domain("driver needs r ≥ 0 and n̄ ≥ 0"));
        }
        match kind {
            DriverKind::Coherent if r != 0.0 || nbar != 0.0 => {
                return Err(Error::domain("coherent driver has r = n̄ = 0"))
            }
            DriverKind::SqueezedVacuum if alpha0 != C64::new(0.0, 0.0) || nbar != 0.0 => {
                return Err(Error::domain("squeezed vacuum has α₀ = 0 and n̄ = 0"))
            }
            DriverKind::DisplacedSqueezed if nbar != 0.0 => return Err(Error::domain("displaced squeezed state has n̄ = 0")),
            DriverKind::Thermal if r != 0.0 || !(nbar > 0.0) => {
                return Err(Error::domain("thermal driver needs n̄ > 0 and r = 0"))
            }
            _ => {}
        }
        Ok(Self { kind, alpha0, r, theta, nbar })
    }

    pub fn coherent(alpha0: C64) -> Result<Self> {
        Self::new(DriverKind::Coherent, alpha0, 0.0, 0.0, 0.0)
    }

    pub fn squeezed_vacuum(r: f64, theta: f64) -> Result<Self> {
        Self::new(DriverKind::SqueezedVacuum, C64::new(0.0, 0.0), r, theta, 0.0)
    }

    pub fn displaced_squeezed(alpha0: C64, r: f64, theta: f64) -> Result<Self> {
        Self::new(DriverKind::DisplacedSqueezed, alpha0, r, theta, 0.0)
    }

    pub fn thermal(alpha0: C64, nbar: f64) -> Result<Self> {
        Self::new(DriverKind::Thermal, alpha0, 0.0, 0.0, nbar)
    }

    /// `⟨N⟩ = |α₀|² + sinh²r + n̄`.
    pub fn mean_photon_number(&self) -> f64 {
        self.alpha0.norm_sqr() + self.r.sinh().powi(2) + self.nbar
    }

    /// Amplitude that maps onto the template pulse: `α₀` when nonzero,
    /// otherwise the real `√⟨N⟩`.
    pub fn reference_amplitude(&self) -> C64 {
        if self.alpha0.norm() > 0.0 {
            self.alpha0
        } else {
            C64::new(self.mean_photon_number().sqrt(), 0.0)
        }
    }
}

/// Classical-limit density over `α`, in quadratures `(x, p) = √2 (Re α, Im α)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalLimitWeight {
    PointMass(C64),
    Gaussian { mean: C64, covariance: DMatrix<f64> },
}

impl ClassicalLimitWeight {
    pub fn is_point_mass(&self) -> bool {
        matches!(self, ClassicalLimitWeight::PointMass(_))
    }

    /// `E_w[|α|²]`.
    pub fn second_moment(&self) -> f64 {
        match self {
            ClassicalLimitWeight::PointMass(a) => a.norm_sqr(),
            ClassicalLimitWeight::Gaussian { mean, covariance } => {
                mean.norm_sqr() + 0.5 * (covariance[(0, 0)] + covariance[(1, 1)])
            }
        }
    }
}

pub fn classical_limit_weight(dist: &DriverDistribution) -> ClassicalLimitWeight {
    match dist.kind {
        DriverKind::Coherent => ClassicalLimitWeight::PointMass(dist.alpha0),
        DriverKind::SqueezedVacuum | DriverKind::DisplacedSqueezed => ClassicalLimitWeight::Gaussian {
            mean: dist.alpha0,
            covariance: GaussianModeState::squeezed_vacuum(dist.r, dist.theta).covariance().clone(),
        },
        DriverKind::Thermal => ClassicalLimitWeight::Gaussian {
            mean: dist.alpha0,
            covariance: DMatrix::identity(2, 2) * dist.nbar,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    /// Latin-hypercube stratified Monte Carlo with `nodes` samples.
    MonteCarlo { nodes: usize, seed: u64 },
    /// Tensor Gauss-Hermite rule with `per_axis²` nodes.
    GaussHermite { per_axis: usize },
}

impl Sampler {
    pub fn nodes(&self) -> usize {
        match self {
            Sampler::MonteCarlo { nodes, .. } => *nodes,
            Sampler::GaussHermite { per_axis } => per_axis * per_axis,
        }
    }
}

/// Physicists' Gauss-Hermite rule (weight `e^{−t²}`) by Golub-Welsch.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jac = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let (vals, vecs) = symmetric_eigh(&jac);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let weights = (0..n).map(|k| sqrt_pi * vecs[(0, k)].powi(2)).collect();
    (vals.iter().copied().collect(), weights)
}

/// Standard-normal nodes and probability weights in two dimensions.
fn unit_nodes(sampler: &Sampler) -> Vec<([f64; 2], f64)> {
    match *sampler {
        Sampler::GaussHermite { per_axis } => {
            let (t, w) = gauss_hermite(per_axis);
            let s2 = std::f64::consts::SQRT_2;
            let norm = 1.0 / std::f64::consts::PI;
            let mut out = Vec::with_capacity(per_axis * per_axis);
            for i in 0..per_axis {
                for j in 0..per_axis {
                    out.push(([s2 * t[i], s2 * t[j]], w[i] * w[j] * norm));
                }
            }
            out
        }
        Sampler::MonteCarlo { nodes, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..nodes).collect();
            for k in (1..nodes).rev() {
                perm.swap(k, rng.random_range(0..=k));
            }
            let w = 1.0 / nodes as f64;
            (0..nodes)
                .map(|k| {
                    let u1 = (k as f64 + rng.random::<f64>()) / nodes as f64;
                    let u2 = (perm[k] as f64 + rng.random::<f64>()) / nodes as f64;
                    let rad = (-2.0 * u1.max(f64::MIN_POSITIVE).ln()).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * u2;
                    ([rad * phi.cos(), rad * phi.sin()], w)
                })
                .collect()
        }
    }
}

/// Nodes `α_k` with probability weights summing to one.
pub fn weight_nodes(weight: &ClassicalLimitWeight, sampler: &Sampler) -> Result<Vec<(C64, f64)>> {
    match weight {
        ClassicalLimitWeight::PointMass(a) => Ok(vec![(*a, 1.0)]),
        ClassicalLimitWeight::Gaussian { mean, covariance } => {
            let n = sampler.nodes();
            if n < MIN_NODES {
                return Err(Error::Precision { nodes: n, min: MIN_NODES });
            }
            let (vals, vecs) = symmetric_eigh(covariance);
            let root = DMatrix::from_fn(2, 2, |i, j| vecs[(i, j)] * vals[j].max(0.0).sqrt());
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Ok(unit_nodes(sampler)
                .into_iter()
                .map(|(z, w)| {
                    let d = &root * DVector::from_column_slice(&z);
                    (mean + C64::new(d[0] * s, d[1] * s), w)
                })
                .collect())
        }
    }
}

/// Weighted mean with standard error `sd·√(Σw²)` per component.
#[derive(Debug, Clone, PartialEq)]
pub struct Averaged {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub nodes: usize,
}

/// Averages a vector-valued evaluator over the weight. Evaluations run in
/// parallel; the reduction runs in node order.
pub fn averaged_vector<F>(weight: &ClassicalLimitWeight, sampler: &Sampler, eval: F) -> Result<Averaged>
where
    F: Fn(C64) -> Result<Vec<f64>> + Sync,
{
    let nodes = weight_nodes(weight, sampler)?;
    let values: Vec<Vec<f64>> = nodes.par_iter().map(|(a, _)| eval(*a)).collect::<Result<_>>()?;
    let len = values[0].len();
    if values.iter().any(|v| v.len() != len) {
        return Err(Error::domain("evaluator returned vectors of different lengths"));
    }
    if nodes.len() == 1 {
        return Ok(Averaged { mean: values.into_iter().next().unwrap(), stderr: vec![0.0; len], nodes: 1 });
    }
    let mut mean = vec![0.0; len];
    for ((_, w), v) in nodes.iter().zip(&values) {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += w * x;
        }
    }
    let sum_w2: f64 = nodes.iter().map(|(_, w)| w * w).sum();
    let mut var = vec![0.0; len];
    for ((_, w), v) in nodes.iter().zip(&values) {
        for ((s, x), m) in var.iter_mut().zip(v).zip(&mean) {
            *s += w * (x - m).powi(2);
        }
    }
    let stderr = var.iter().map(|s| (s * sum_w2 / (1.0 - sum_w2).max(f64::MIN_POSITIVE)).sqrt()).collect();
    Ok(Averaged { mean, stderr, nodes: nodes.len() })
}

/// Scalar average and standard error.
pub fn averaged_observable<F>(weight: &ClassicalLimitWeight, sampler: &Sampler, eval: F) -> Result<(f64, f64)>
where
    F: Fn(C64) -> Result<f64> + Sync,
{
    let a = averaged_vector(weight, sampler, |alpha| eval(alpha).map(|v| vec![v]))?;
    Ok((a.mean[0], a.stderr[0]))
}

/// Template pulse rescaled to `|α|/|α_ref|·E0` with CEP shifted by
/// `arg α − arg α_ref`.
pub fn pulse_for(template: &LaserPulse, alpha: C64, reference: C64) -> Result<LaserPulse> {
    if reference.norm() == 0.0 {
        return Err(Error::domain("reference amplitude must be nonzero"));
    }
    let ratio = alpha.norm() / reference.norm();
    let shift = if alpha.norm() == 0.0 { 0.0 } else { alpha.arg() - reference.arg() };
    template.with_field(template.e0() * ratio, template.cep() + shift)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AveragedSpectrum {
    pub spectrum: Spectrum,
    pub stderr: Vec<f64>,
    pub grid: TimeGrid,
}

/// Incoherent average of HHG spectra over the driver weight. All nodes share
/// one time grid: the template's support with step at most `dt_max`,
/// refined until the strongest node satisfies the Nyquist bound.
#[allow(clippy::too_many_arguments)]
pub fn averaged_hhg_spectrum(
    dist: &DriverDistribution,
    template: &LaserPulse,
    atom: &Atom,
    dt_max: f64,
    opts: &SfaOptions,
    window: Window,
    sampler: &Sampler,
) -> Result<AveragedSpectrum> {
    let weight = classical_limit_weight(dist);
    let reference = dist.reference_amplitude();
    let nodes = weight_nodes(&weight, sampler)?;
    let strongest = nodes.iter().map(|(a, _)| a.norm()).fold(0.0, f64::max);
    let peak = pulse_for(template, C64::new(strongest, 0.0), C64::new(reference.norm(), 0.0))?;
    let dt_nyquist = 0.95 * std::f64::consts::PI / (2.0 * cutoff_energy(&peak, atom));
    let grid = TimeGrid::covering(template, dt_max.min(dt_nyquist))?;
    let spectrum_at = |alpha: C64| -> Result<Spectrum> {
        let pulse = pulse_for(template, alpha, reference)?;
        let record = dipole_expectation_with(&pulse, atom, &grid, opts)?;
        Ok(hhg_spectrum(&record, window))
    };
    let template_spec = spectrum_at(reference)?;
    let avg = averaged_vector(&weight, sampler, |alpha| spectrum_at(alpha).map(|s| s.intensity))?;
    Ok(AveragedSpectrum {
        spectrum: Spectrum { intensity: avg.mean, ..template_spec },
        stderr: avg.stderr,
        grid,
    })
}

/// `omega,harmonic_order,intensity,stderr`.
pub fn averaged_spectrum_to_csv(avg: &AveragedSpectrum) -> String {
    use std::fmt::Write as _;
    let s = &avg.spectrum;
    let mut out = format!("# omega0={:e}\n# window={}\n# omega,harmonic_order,intensity,stderr\n", s.omega0, s.window.name());
    for k in 0..s.omega.len() {
        let _ = writeln!(out, "{:e},{:e},{:e},{:e}", s.omega[k], s.harmonic_order(k), s.intensity[k], avg.stderr[k]);
    }
    out
}
