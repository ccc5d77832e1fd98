use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::linalg::{symmetric_eigh, symplectic_eigenvalues};
use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PHYSICALITY_TOL: f64 = 1e-9;

/// Multimode Gaussian state in `(x₁, p₁, x₂, p₂, …)` ordering, vacuum
/// covariance `I/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModeState {
    modes: usize,
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianModeState {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let n = covariance.nrows();
        if n == 0 || n % 2 != 0 || covariance.ncols() != n {
            return Err(Error::Dimension { expected: 2 * (n / 2).max(1), got: n });
        }
        if mean.len() != n {
            return Err(Error::Dimension { expected: n, got: mean.len() });
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite Gaussian moments"));
        }
        let scale = covariance.amax().max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::Structure("covariance is not symmetric".into()));
                }
            }
        }
        let nu = symplectic_eigenvalues(&covariance);
        if nu[0] < 0.5 - PHYSICALITY_TOL {
            return Err(Error::Structure(format!(
                "unphysical covariance: symplectic eigenvalue {} < 1/2",
                nu[0]
            )));
        }
        Ok(Self { modes: n / 2, mean, covariance })
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            modes,
            mean: DVector::zeros(2 * modes),
            covariance: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        }
    }

    /// Product coherent state; `x = √2 Re α`, `p = √2 Im α`.
    pub fn coherent(amps: &[C64]) -> Self {
        let mut s = Self::vacuum(amps.len());
        s.displace(amps);
        s
    }

    /// Two-mode squeezed vacuum with squeezing `s`.
    pub fn two_mode_squeezed(s: f64) -> Self {
        let (c, sh) = ((2.0 * s).cosh() * 0.5, (2.0 * s).sinh() * 0.5);
        let mut v = DMatrix::zeros(4, 4);
        for k in 0..4 {
            v[(k, k)] = c;
        }
        v[(0, 2)] = sh;
        v[(2, 0)] = sh;
        v[(1, 3)] = -sh;
        v[(3, 1)] = -sh;
        Self { modes: 2, mean: DVector::zeros(4), covariance: v }
    }

    /// Single-mode squeezed vacuum, minor axis at `angle` from x.
    pub fn squeezed_vacuum(r: f64, angle: f64) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        let lo = 0.5 * (-2.0 * r).exp();
        let hi = 0.5 * (2.0 * r).exp();
        let v = DMatrix::from_row_slice(2, 2, &[
            lo * c * c + hi * s * s,
            (lo - hi) * c * s,
            (lo - hi) * c * s,
            lo * s * s + hi * c * c,
        ]);
        Self { modes: 1, mean: DVector::zeros(2), covariance: v }
    }

    /// Thermal state of mean occupation `nbar` in every mode.
    pub fn thermal(modes: usize, nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) {
            return Err(Error::domain("thermal occupation must be non-negative"));
        }
        let mut s = Self::vacuum(modes);
        s.covariance *= 2.0 * nbar + 1.0;
        Ok(s)
    }

    /// Adds coherent displacements to the mean.
    pub fn displace(&mut self, amps: &[C64]) {
        let r2 = std::f64::consts::SQRT_2;
        for (k, a) in amps.iter().enumerate().take(self.modes) {
            self.mean[2 * k] += r2 * a.re;
            self.mean[2 * k + 1] += r2 * a.im;
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn amplitude(&self, mode: usize) -> C64 {
        C64::new(self.mean[2 * mode], self.mean[2 * mode + 1]) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Marginal on the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::domain("empty mode selection"));
        }
        let idx = self.quadrature_indices(modes)?;
        let n = idx.len();
        Ok(Self {
            modes: modes.len(),
            mean: DVector::from_fn(n, |i, _| self.mean[idx[i]]),
            covariance: DMatrix::from_fn(n, n, |i, j| self.covariance[(idx[i], idx[j])]),
        })
    }

    fn quadrature_indices(&self, modes: &[usize]) -> Result<Vec<usize>> {
        let mut idx = Vec::with_capacity(2 * modes.len());
        for &m in modes {
            if m >= self.modes {
                return Err(Error::Dimension { expected: self.modes, got: m + 1 });
            }
            idx.push(2 * m);
            idx.push(2 * m + 1);
        }
        Ok(idx)
    }

    /// `⟨a†a⟩` of one mode.
    pub fn photon_number(&self, mode: usize) -> f64 {
        let v = &self.covariance;
        let (i, j) = (2 * mode, 2 * mode + 1);
        0.5 * (v[(i, i)] + v[(j, j)] - 1.0) + 0.5 * (self.mean[i].powi(2) + self.mean[j].powi(2))
    }

    /// Normally ordered fluctuation moments `(⟨δa†δa⟩, ⟨δa δa⟩)` of one mode.
    pub fn fluctuation_moments(&self, mode: usize) -> (f64, C64) {
        let v = &self.covariance;
        let (i, j) = (2 * mode, 2 * mode + 1);
        let n = 0.5 * (v[(i, i)] + v[(j, j)] - 1.0);
        let m = C64::new(0.5 * (v[(i, i)] - v[(j, j)]), v[(i, j)]);
        (n, m)
    }

    /// Cross moments `(⟨δa_k† δa_l⟩, ⟨δa_k δa_l⟩)` between two modes.
    pub fn cross_moments(&self, k: usize, l: usize) -> (C64, C64) {
        let v = &self.covariance;
        let (xk, pk, xl, pl) = (2 * k, 2 * k + 1, 2 * l, 2 * l + 1);
        let delta = if k == l { 0.5 } else { 0.0 };
        let n = C64::new(
            0.5 * (v[(xk, xl)] + v[(pk, pl)]) - delta,
            0.5 * (v[(xk, pl)] - v[(pk, xl)]),
        );
        let m = C64::new(
            0.5 * (v[(xk, xl)] - v[(pk, pl)]),
            0.5 * (v[(xk, pl)] + v[(pk, xl)]),
        );
        (n, m)
    }
}

/// Squeezing `r = −½ ln(2 λ_min)` and minor-axis angle in `[0, π)` of one mode.
pub fn squeezing_parameters(state: &GaussianModeState, mode: usize) -> Result<(f64, f64)> {
    if mode >= state.modes() {
        return Err(Error::Dimension { expected: state.modes(), got: mode + 1 });
    }
    let block = state.reduced(&[mode])?.covariance;
    let (vals, vecs) = symmetric_eigh(&block);
    let r = (-0.5 * (2.0 * vals[0]).ln()).max(0.0);
    let mut angle = vecs[(1, 0)].atan2(vecs[(0, 0)]);
    if angle < 0.0 {
        angle += std::f64::consts::PI;
    }
    if angle >= std::f64::consts::PI - 1e-15 {
        angle = 0.0;
    }
    Ok((r, angle))
}

/// Gaussian logarithmic negativity across `partition | rest`.
pub fn log_negativity(state: &GaussianModeState, partition: &[usize]) -> Result<f64> {
    let m = state.modes();
    if partition.is_empty() || partition.len() >= m || partition.iter().any(|&k| k >= m) {
        return Err(Error::domain("bipartition must be nonempty on both sides"));
    }
    let mut v = state.covariance().clone();
    // partial transpose: p → −p on the partition
    for &k in partition {
        let pk = 2 * k + 1;
        for j in 0..2 * m {
            v[(pk, j)] = -v[(pk, j)];
        }
        for i in 0..2 * m {
            v[(i, pk)] = -v[(i, pk)];
        }
    }
    let nu = symplectic_eigenvalues(&v);
    Ok(nu.iter().map(|n| (-(2.0 * n).ln()).max(0.0)).sum())
}
