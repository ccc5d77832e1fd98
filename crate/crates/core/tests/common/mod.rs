//! Truncated-Fock reference implementations. Test code only.
#![allow(dead_code)]

use attoqo_core::phase_space::{CoherentOperatorMix, CoherentSuperposition};
use attoqo_core::C64;
use nalgebra::{DMatrix, SymmetricEigen};

pub fn coherent_ket(alpha: C64, dim: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(dim);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        v.push(c);
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    v
}

/// Amplitudes of a multimode coherent superposition, row-major in the mode index.
pub fn superposition_ket(state: &CoherentSuperposition, dim: usize) -> Vec<C64> {
    let modes = state.modes();
    let mut out = vec![C64::new(0.0, 0.0); dim.pow(modes as u32)];
    for (w, amps) in state.terms() {
        let kets: Vec<Vec<C64>> = amps.iter().map(|&a| coherent_ket(a, dim)).collect();
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut rest = idx;
            let mut prod = w;
            for m in (0..modes).rev() {
                prod *= kets[m][rest % dim];
                rest /= dim;
            }
            *slot += prod;
        }
    }
    out
}

pub fn projector(ket: &[C64]) -> DMatrix<C64> {
    let n = ket.len();
    DMatrix::from_fn(n, n, |i, j| ket[i] * ket[j].conj())
}

/// Single-mode Fock matrix of `Σ c |ket⟩⟨bra|`.
pub fn mix_matrix(mix: &CoherentOperatorMix, dim: usize) -> DMatrix<C64> {
    assert_eq!(mix.modes(), 1);
    let mut rho = DMatrix::zeros(dim, dim);
    for d in mix.dyads() {
        let k = coherent_ket(d.ket[0], dim);
        let b = coherent_ket(d.bra[0], dim);
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] += d.coeff * k[i] * b[j].conj();
            }
        }
    }
    rho
}

/// Pure-loss channel with transmissivity `eta` via Kraus operators.
pub fn loss_channel(rho: &DMatrix<C64>, eta: f64) -> DMatrix<C64> {
    let dim = rho.nrows();
    let mut out = DMatrix::zeros(dim, dim);
    let mut lf = vec![0.0f64; dim + 1];
    for n in 1..=dim {
        lf[n] = lf[n - 1] + (n as f64).ln();
    }
    let amp = |n: usize, k: usize| -> f64 {
        if k > n {
            return 0.0;
        }
        let mut l = lf[n] - lf[k] - lf[n - k];
        if n > k {
            l += (n - k) as f64 * eta.ln();
        }
        if k > 0 {
            l += k as f64 * (1.0 - eta).ln();
        }
        (0.5 * l).exp()
    };
    for k in 0..dim {
        for m in k..dim {
            for n in k..dim {
                out[(m - k, n - k)] += rho[(m, n)] * amp(m, k) * amp(n, k);
            }
        }
    }
    out
}

pub fn trace(rho: &DMatrix<C64>) -> C64 {
    rho.diagonal().iter().sum()
}

pub fn purity(rho: &DMatrix<C64>) -> f64 {
    trace(&(rho * rho)).re
}

fn eigen(rho: &DMatrix<C64>) -> SymmetricEigen<C64, nalgebra::Dyn> {
    let h = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h)
}

pub fn von_neumann(rho: &DMatrix<C64>) -> f64 {
    eigen(rho).eigenvalues.iter().filter(|&&l| l > 1e-300).map(|&l| -l * l.ln()).sum()
}

/// Phase QFI `2 Σ (λi − λj)²/(λi + λj) |⟨i|N|j⟩|²`.
pub fn qfi_phase(rho: &DMatrix<C64>) -> f64 {
    let e = eigen(rho);
    let dim = rho.nrows();
    let v = &e.eigenvectors;
    let mut f = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let (li, lj) = (e.eigenvalues[i], e.eigenvalues[j]);
            if li + lj <= 1e-14 {
                continue;
            }
            let nij: C64 = (0..dim).map(|n| v[(n, i)].conj() * v[(n, j)] * n as f64).sum();
            f += 2.0 * (li - lj).powi(2) / (li + lj) * nij.norm_sqr();
        }
    }
    f
}

/// Columns `D(β)|k⟩`, `k < cols`, in a space of dimension `work`.
pub fn displaced_columns(beta: C64, cols: usize, work: usize) -> Vec<Vec<C64>> {
    let mut out = Vec::with_capacity(cols);
    let mut v = coherent_ket(beta, work);
    for k in 0..cols {
        out.push(v.clone());
        let mut next = vec![C64::new(0.0, 0.0); work];
        for n in 0..work {
            let up = if n > 0 { v[n - 1] * (n as f64).sqrt() } else { C64::new(0.0, 0.0) };
            next[n] = (up - beta.conj() * v[n]) / ((k + 1) as f64).sqrt();
        }
        v = next;
    }
    out
}

/// `D(β)v` by short Taylor steps of `exp(β a† − β* a)` in dimension `work`.
pub fn displace_vec(v: &[C64], beta: C64, work: usize) -> Vec<C64> {
    let mut cur = vec![C64::new(0.0, 0.0); work];
    cur[..v.len()].copy_from_slice(v);
    let steps = (4.0 * beta.norm() * (work as f64).sqrt()).ceil().max(1.0) as usize;
    let b = beta / steps as f64;
    let gen = |x: &[C64]| -> Vec<C64> {
        (0..work)
            .map(|n| {
                let up = if n > 0 { b * x[n - 1] * (n as f64).sqrt() } else { C64::new(0.0, 0.0) };
                let down = if n + 1 < work { b.conj() * x[n + 1] * ((n + 1) as f64).sqrt() } else { C64::new(0.0, 0.0) };
                up - down
            })
            .collect()
    };
    for _ in 0..steps {
        let mut term = cur.clone();
        let mut acc = cur.clone();
        for k in 1..40 {
            term = gen(&term).into_iter().map(|z| z / k as f64).collect();
            let size: f64 = term.iter().map(|z| z.norm_sqr()).sum();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if size < 1e-36 {
                break;
            }
        }
        cur = acc;
    }
    cur
}

/// Wigner function at `(x, p)` with `x = (a + a†)/√2`, from the parity of
/// `D(−β) ρ D(β)` with `β = (x + ip)/√2`.
pub fn wigner(rho: &DMatrix<C64>, x: f64, p: f64) -> f64 {
    let dim = rho.nrows();
    let beta = C64::new(x, p) / 2f64.sqrt();
    let work = ((dim as f64).sqrt() + beta.norm() + 8.0).powi(2) as usize + 20;
    let e = eigen(rho);
    let top = e.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut w = 0.0;
    for (i, &l) in e.eigenvalues.iter().enumerate() {
        if l.abs() <= 1e-15 * top {
            continue;
        }
        let v: Vec<C64> = e.eigenvectors.column(i).iter().cloned().collect();
        let u = displace_vec(&v, -beta, work);
        let parity: f64 = u.iter().enumerate().map(|(n, z)| if n % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() }).sum();
        w += l * parity;
    }
    w / std::f64::consts::PI
}

/// `ρ_A` of a two-mode pure state given row-major as `ψ[a·dim + b]`.
pub fn reduce_first(psi: &[C64], dim: usize) -> DMatrix<C64> {
    let m = DMatrix::from_fn(dim, dim, |a, b| psi[a * dim + b]);
    &m * m.adjoint()
}

/// Two-mode squeezed vacuum `Σ tanhⁿ s / cosh s |n,n⟩` displaced by `(a0, a1)`.
pub fn displaced_tmsv(s: f64, a0: C64, a1: C64, dim: usize) -> Vec<C64> {
    let work = dim;
    let d0 = displaced_columns(a0, dim, work);
    let d1 = displaced_columns(a1, dim, work);
    let t = s.tanh();
    let mut psi = vec![C64::new(0.0, 0.0); dim * dim];
    for n in 0..dim {
        let c = t.powi(n as i32) / s.cosh();
        if c < 1e-300 {
            break;
        }
        for a in 0..dim {
            for b in 0..dim {
                psi[a * dim + b] += d0[n][a] * d1[n][b] * c;
            }
        }
    }
    psi
}

/// Normally ordered two-mode moments of a pure state.
pub struct TwoModeMoments {
    pub n0: f64,
    pub n1: f64,
    pub aa0: f64,
    pub aa1: f64,
    pub n0n1: f64,
    pub a0dag_a1: C64,
}

pub fn two_mode_moments(psi: &[C64], dim: usize) -> TwoModeMoments {
    let at = |a: usize, b: usize| if a < dim && b < dim { psi[a * dim + b] } else { C64::new(0.0, 0.0) };
    let mut m = TwoModeMoments { n0: 0.0, n1: 0.0, aa0: 0.0, aa1: 0.0, n0n1: 0.0, a0dag_a1: C64::new(0.0, 0.0) };
    for a in 0..dim {
        for b in 0..dim {
            let p = at(a, b).norm_sqr();
            let (fa, fb) = (a as f64, b as f64);
            m.n0 += p * fa;
            m.n1 += p * fb;
            m.aa0 += p * fa * (fa - 1.0);
            m.aa1 += p * fb * (fb - 1.0);
            m.n0n1 += p * fa * fb;
            m.a0dag_a1 += (at(a + 1, b) * (fa + 1.0).sqrt()).conj() * at(a, b + 1) * (fb + 1.0).sqrt();
        }
    }
    m
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
