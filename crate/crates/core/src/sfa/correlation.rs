use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{transition_dipole, volkov_phase, Atom, LaserPulse, TimeGrid};
use crate::linalg::hermitian_eigh;
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;

/// Trapezoid grid on `[−v_max, v_max]` along the polarization axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    pub v_max: f64,
    pub n: usize,
}

impl MomentumGrid {
    pub fn new(v_max: f64, n: usize) -> Result<Self> {
        if !(v_max > 0.0) || n < 3 {
            return Err(Error::domain("momentum grid needs v_max > 0 and at least three points"));
        }
        Ok(Self { v_max, n })
    }

    /// Default 512-point grid reaching `√(2·10·U_p)` with a floor of 3 a.u.
    pub fn for_pulse(pulse: &LaserPulse) -> Self {
        let need = Self::required_v_max(pulse);
        Self { v_max: need.max(3.0) * 1.05, n: 512 }
    }

    pub fn required_v_max(pulse: &LaserPulse) -> f64 {
        (20.0 * pulse.ponderomotive_energy()).sqrt()
    }

    pub fn step(&self) -> f64 {
        2.0 * self.v_max / (self.n - 1) as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = self.step();
        (0..self.n).map(move |j| {
            let w = if j == 0 || j + 1 == self.n { 0.5 * h } else { h };
            (-self.v_max + h * j as f64, w)
        })
    }
}

/// Two-time dipole fluctuation kernel on a (coarse) time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleCorrelation {
    pub grid: TimeGrid,
    pub cov: DMatrix<C64>,
}

impl DipoleCorrelation {
    /// Validates shape and Hermiticity.
    pub fn new(grid: TimeGrid, cov: DMatrix<C64>) -> Result<Self> {
        if cov.nrows() != grid.n || cov.ncols() != grid.n {
            return Err(Error::Dimension { expected: grid.n, got: cov.nrows() });
        }
        let scale = cov.iter().fold(0.0f64, |m, c| m.max(c.norm())).max(1e-300);
        for i in 0..grid.n {
            for j in 0..=i {
                if (cov[(i, j)] - cov[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(Error::Kernel(format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        Ok(Self { grid, cov })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { grid, cov: DMatrix::from_element(grid.n, grid.n, C64::new(0.0, 0.0)) }
    }

    /// Smallest eigenvalue of the kernel matrix weighted by `dt`.
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = hermitian_eigh(&(&self.cov * C64::new(self.grid.dt, 0.0)));
        vals[0]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { grid: self.grid, cov: &self.cov * C64::new(factor, 0.0) }
    }
}

/// `C(t', t'') = Σ_v w_v f_v(t') f_v(t'')*` with `f_v(t) = d(v − A(t))·e^{−iS(v, t, 0)}`.
///
/// The ground-state intermediate term of `⟨d(t')d(t'')⟩` reproduces
/// `⟨d(t')⟩⟨d(t'')⟩` at this order, so the fluctuation kernel keeps only
/// the continuum channel. Positive semidefinite by construction.
pub fn dipole_correlation(
    pulse: &LaserPulse,
    atom: &Atom,
    grid: &TimeGrid,
    momenta: &MomentumGrid,
) -> Result<DipoleCorrelation> {
    let required = MomentumGrid::required_v_max(pulse);
    if momenta.v_max < required {
        return Err(Error::Coverage { v_max: momenta.v_max, required });
    }
    let nodes: Vec<(f64, f64)> = momenta.nodes().collect();
    let rows: Vec<Vec<C64>> = (0..grid.n)
        .into_par_iter()
        .map(|i| {
            let t = grid.time(i);
            let a = pulse.vector_potential(t);
            nodes
                .iter()
                .map(|&(v, w)| C64::from_polar(w.sqrt() * transition_dipole(v - a, atom), -volkov_phase(v, t, pulse, atom)))
                .collect()
        })
        .collect();
    let f = DMatrix::from_fn(grid.n, nodes.len(), |i, j| rows[i][j]);
    let cov = &f * f.adjoint();
    Ok(DipoleCorrelation { grid: *grid, cov })
}
