use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{CouplingConfig, HarmonicAmplitudes};
use crate::linalg::{symplectic_eigenvalues, symplectic_form};
use crate::phase_space::GaussianModeState;
use crate::sfa::DipoleCorrelation;
use crate::{Error, Result};

const KERNEL_HERMITIAN_TOL: f64 = 1e-6;
const PHYSICALITY_TOL: f64 = 1e-6;

/// Quadratic generator `H = Σ_qp [−½G_qp a_q†a_p† − ½G_qp* a_q a_p + K_qp a_q†a_p]`
/// over modes `q = 1..=q_cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearCoefficients {
    pub g: DMatrix<C64>,
    pub k: DMatrix<C64>,
}

impl BilinearCoefficients {
    pub fn zeros(modes: usize) -> Self {
        let z = DMatrix::from_element(modes, modes, C64::new(0.0, 0.0));
        Self { g: z.clone(), k: z }
    }

    pub fn modes(&self) -> usize {
        self.g.nrows()
    }

    /// Largest deviation from `G = Gᵀ`, `K = K†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.modes();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.g[(i, j)] - self.g[(j, i)]).norm());
                worst = worst.max((self.k[(i, j)] - self.k[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Real symmetric `M` with `H = ½ Rᵀ M R`, `R = (x₁, p₁, …)`.
    pub fn quadrature_matrix(&self) -> DMatrix<f64> {
        let n = self.modes();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for q in 0..n {
            for p in 0..n {
                let a = -0.5 * self.g[(q, p)];
                let b = self.k[(q, p)];
                m[(2 * q, 2 * p)] = 2.0 * a.re + b.re;
                m[(2 * q + 1, 2 * p + 1)] = -2.0 * a.re + b.re;
                m[(2 * q, 2 * p + 1)] = 2.0 * a.im - b.im;
            }
        }
        for q in 0..n {
            for p in 0..n {
                m[(2 * p + 1, 2 * q)] = m[(2 * q, 2 * p + 1)];
            }
        }
        m
    }
}

/// Double time quadratures of the symmetrized kernel:
/// `G_qp = N g²√(qp) ∫∫ Re C(t',t'') e^{−iω_q t' − iω_p t''}`,
/// `K_qp = N g²√(qp) ∫∫ Re C(t',t'') e^{−iω_q t' + iω_p t''}`.
pub fn bilinear_coefficients(corr: &DipoleCorrelation, coupling: &CouplingConfig, omega0: f64) -> Result<BilinearCoefficients> {
    let grid = corr.grid;
    let n = grid.n;
    if corr.cov.nrows() != n || corr.cov.ncols() != n {
        return Err(Error::Dimension { expected: n, got: corr.cov.nrows() });
    }
    let scale = corr.cov.iter().fold(0.0f64, |m, c| m.max(c.norm())).max(1e-300);
    for i in 0..n {
        for j in 0..i {
            if (corr.cov[(i, j)] - corr.cov[(j, i)].conj()).norm() > KERNEL_HERMITIAN_TOL * scale {
                return Err(Error::Kernel(format!("kernel not Hermitian at ({i}, {j})")));
            }
        }
    }
    let q_max = coupling.q_cutoff;
    grid.check_nyquist(q_max as f64 * omega0)?;
    let re = DMatrix::from_fn(n, n, |i, j| C64::new(0.5 * (corr.cov[(i, j)].re + corr.cov[(j, i)].re), 0.0));
    let phi = DMatrix::from_fn(q_max, n, |q, i| {
        let w = if i == 0 || i + 1 == n { 0.5 * grid.dt } else { grid.dt };
        C64::from_polar(w, -((q + 1) as f64) * omega0 * grid.time(i))
    });
    let pre = coupling.g * coupling.g * coupling.n_emitters as f64;
    let left = &phi * &re;
    let mut g = &left * phi.transpose();
    let mut k = &left * phi.adjoint();
    for q in 0..q_max {
        for p in 0..q_max {
            let w = pre * (((q + 1) * (p + 1)) as f64).sqrt();
            g[(q, p)] *= w;
            k[(q, p)] *= w;
        }
    }
    // remove round-off asymmetry
    let gs = DMatrix::from_fn(q_max, q_max, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
    let ks = DMatrix::from_fn(q_max, q_max, |i, j| 0.5 * (k[(i, j)] + k[(j, i)].conj()));
    Ok(BilinearCoefficients { g: gs, k: ks })
}

/// `S = exp(Ω M)` for the unitary `e^{−iH}`.
pub fn generator_symplectic(bil: &BilinearCoefficients) -> DMatrix<f64> {
    let m = bil.quadrature_matrix();
    let omega = symplectic_form(bil.modes());
    (omega * m).exp()
}

/// Product coherent state displaced by `χ`, squeezed/entangled by the
/// bilinear generator when given.
pub fn gaussian_output_state(amps: &HarmonicAmplitudes, bil: Option<&BilinearCoefficients>) -> Result<GaussianModeState> {
    let modes = amps.q_cutoff();
    let mut mean = DVector::zeros(2 * modes);
    let r2 = std::f64::consts::SQRT_2;
    for (q, c) in amps.chi.iter().enumerate() {
        mean[2 * q] = r2 * c.re;
        mean[2 * q + 1] = r2 * c.im;
    }
    let cov = match bil {
        None => DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        Some(b) => {
            if b.modes() != modes {
                return Err(Error::Dimension { expected: modes, got: b.modes() });
            }
            let s = generator_symplectic(b);
            let v = &s * s.transpose() * 0.5;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::GeneratorMagnitude { nu_min: f64::NAN });
            }
            let v = (&v + v.transpose()) * 0.5;
            let nu = symplectic_eigenvalues(&v);
            if nu[0] < 0.5 - PHYSICALITY_TOL {
                return Err(Error::GeneratorMagnitude { nu_min: nu[0] });
            }
            v
        }
    };
    GaussianModeState::new(mean, cov)
}
