//! Closed-form state functionals built from pairwise coherent overlaps.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::coherent::{overlap_unchecked, CoherentOperatorMix, CoherentSuperposition, Dyad, StateRef};
use crate::linalg::{entropy_term, gram_orthonormalizer, hermitian_eigh};
use crate::{Error, Result};

/// Relative spectral cutoff used when orthonormalizing nearly parallel
/// coherent components.
pub const GRAM_CUTOFF: f64 = 1e-12;

const TRACE_TOL: f64 = 1e-8;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Beam-splitter loss with transmissivity `eta` applied to every mode.
///
/// `|ᾱ⟩⟨β̄| → exp[(1−η)(β̄*·ᾱ − |ᾱ|²/2 − |β̄|²/2)] |√η ᾱ⟩⟨√η β̄|`.
pub fn apply_loss(state: &CoherentSuperposition, eta: f64) -> Result<CoherentOperatorMix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(format!("transmissivity {eta} outside [0, 1]")));
    }
    let lost = 1.0 - eta;
    let scale = eta.sqrt();
    let mut dyads = Vec::with_capacity(state.len() * state.len());
    for (ck, ak) in state.terms() {
        for (cl, al) in state.terms() {
            let env = if lost == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                (super::coherent::overlap_exponent(ak, al) * lost).exp()
            };
            dyads.push(Dyad {
                coeff: ck * cl.conj() * env,
                ket: ak.iter().map(|a| a * scale).collect(),
                bra: al.iter().map(|a| a * scale).collect(),
            });
        }
    }
    CoherentOperatorMix::new(state.modes(), dyads)
}

fn check_trace(op: &CoherentOperatorMix) -> Result<()> {
    let tr = op.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
        return Err(Error::Structure(format!("trace {tr} differs from one")));
    }
    Ok(())
}

/// `Tr ρ²` from pairwise overlaps.
pub fn purity(op: &CoherentOperatorMix) -> Result<f64> {
    if !op.is_hermitian(1e-9) {
        return Err(Error::Structure("operator mix is not Hermitian".into()));
    }
    check_trace(op)?;
    let (basis, r) = op.span_representation();
    let g = gram(&basis);
    // Tr ρ² = Tr[(R G)²] with G_ij = ⟨v_i|v_j⟩
    let rg = &r * &g;
    let p = (&rg * &rg).trace();
    Ok(p.re)
}

/// Gram matrix `G_ij = ⟨v_i|v_j⟩`.
pub(crate) fn gram(vectors: &[Vec<C64>]) -> DMatrix<C64> {
    let n = vectors.len();
    DMatrix::from_fn(n, n, |i, j| overlap_unchecked(&vectors[j], &vectors[i]))
}

/// Mean total photon number `Tr[ρ N]`.
pub fn mean_photon_number<'a>(state: impl Into<StateRef<'a>>) -> f64 {
    let state = state.into();
    state
        .dyads()
        .iter()
        .map(|d| {
            let s: C64 = d.bra.iter().zip(&d.ket).map(|(b, a)| b.conj() * a).sum();
            (d.coeff * s * overlap_unchecked(&d.ket, &d.bra)).re
        })
        .sum()
}

/// Quantum Fisher information for phase imprinting `e^{−iθN}`, `N = Σ a†a`.
///
/// Pure inputs give `4·Var(N)`. Mixed inputs are diagonalized inside the
/// finite span of their coherent components.
pub fn qfi_phase<'a>(state: impl Into<StateRef<'a>>) -> Result<f64> {
    match state.into() {
        StateRef::Pure(s) => {
            let norm = s.norm_sqr();
            if (norm - 1.0).abs() > TRACE_TOL {
                return Err(Error::Structure(format!("state norm {norm} differs from one")));
            }
            let (n1, n2) = number_moments_pure(s);
            Ok(4.0 * (n2 - n1 * n1))
        }
        StateRef::Mixed(op) => qfi_mixed(op),
    }
}

pub(crate) fn number_moments_pure(s: &CoherentSuperposition) -> (f64, f64) {
    let mut n1 = zero();
    let mut n2 = zero();
    for (ck, ak) in s.terms() {
        for (cl, al) in s.terms() {
            // ⟨α_l| N |α_k⟩ etc.
            let w = cl.conj() * ck * overlap_unchecked(ak, al);
            let sv: C64 = al.iter().zip(ak).map(|(b, a)| b.conj() * a).sum();
            n1 += w * sv;
            n2 += w * (sv * sv + sv);
        }
    }
    (n1.re, n2.re)
}

fn qfi_mixed(op: &CoherentOperatorMix) -> Result<f64> {
    if !op.is_hermitian(1e-9) {
        return Err(Error::Structure("operator mix is not Hermitian".into()));
    }
    check_trace(op)?;
    let (basis, r) = op.span_representation();
    let n = basis.len();
    let g = gram(&basis);
    let s = DMatrix::from_fn(n, n, |i, j| {
        basis[i].iter().zip(&basis[j]).map(|(a, b)| a.conj() * b).sum::<C64>()
    });
    // ⟨v_i|N|v_j⟩ and ⟨v_i|N²|v_j⟩
    let nv = DMatrix::from_fn(n, n, |i, j| s[(i, j)] * g[(i, j)]);
    let n2v = DMatrix::from_fn(n, n, |i, j| (s[(i, j)] * s[(i, j)] + s[(i, j)]) * g[(i, j)]);

    let x = gram_orthonormalizer(&g, GRAM_CUTOFF);
    let xh = x.adjoint();
    let rho = &xh * &g * &r * &g * &x;
    let n_e = &xh * &nv * &x;
    let n2_e = &xh * &n2v * &x;

    let (lam, u) = hermitian_eigh(&rho);
    let uh = u.adjoint();
    let n_eig = &uh * &n_e * &u;
    let n2_eig = &uh * &n2_e * &u;

    let k = lam.len();
    let mut f = 0.0;
    for a in 0..k {
        let la = lam[a].max(0.0);
        if la <= 0.0 {
            continue;
        }
        let mut inside = 0.0;
        for b in 0..k {
            let lb = lam[b].max(0.0);
            let m2 = n_eig[(a, b)].norm_sqr();
            inside += m2;
            if lb > 0.0 && b != a {
                f += 2.0 * (la - lb).powi(2) / (la + lb) * m2;
            }
        }
        // pairs with eigenvectors outside the span (zero weight)
        let outside = (n2_eig[(a, a)].re - inside).max(0.0);
        f += 4.0 * la * outside;
    }
    Ok(f)
}

/// Von Neumann entropy of the reduced state on `partition` for a pure
/// multimode superposition.
pub fn entanglement_entropy(state: &CoherentSuperposition, partition: &[usize]) -> Result<f64> {
    let m = state.modes();
    if partition.is_empty() || partition.len() >= m {
        return Err(Error::domain("partition must leave both sides nonempty"));
    }
    if partition.iter().any(|&k| k >= m) {
        return Err(Error::domain("partition mode index out of range"));
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > TRACE_TOL {
        return Err(Error::Structure(format!("state norm {norm} differs from one")));
    }
    let rest: Vec<usize> = (0..m).filter(|k| !partition.contains(k)).collect();
    let pick = |amps: &[C64], idx: &[usize]| idx.iter().map(|&k| amps[k]).collect::<Vec<_>>();
    let a: Vec<Vec<C64>> = (0..state.len()).map(|k| pick(state.amplitudes(k), partition)).collect();
    let b: Vec<Vec<C64>> = (0..state.len()).map(|k| pick(state.amplitudes(k), &rest)).collect();
    let c = state.weights();
    let n = state.len();
    // ρ_A = Σ_kl c_k c_l* ⟨b_l|b_k⟩ |a_k⟩⟨a_l|
    let r = DMatrix::from_fn(n, n, |k, l| c[k] * c[l].conj() * overlap_unchecked(&b[k], &b[l]));
    Ok(span_entropy(&a, &r))
}

/// Entropy of `ρ = Σ_b |ψ_b⟩⟨ψ_b| / Σ_b ⟨ψ_b|ψ_b⟩` for unnormalized branches
/// attached to orthogonal labels, i.e. the entanglement entropy between the
/// label system and the field.
pub fn branch_entropy(branches: &[CoherentSuperposition]) -> Result<f64> {
    if branches.is_empty() {
        return Err(Error::domain("no branches"));
    }
    let nb = branches.len();
    let mut s = DMatrix::from_element(nb, nb, zero());
    for i in 0..nb {
        for j in 0..nb {
            s[(i, j)] = branches[i].inner(&branches[j])?;
        }
    }
    let tr: f64 = (0..nb).map(|i| s[(i, i)].re).sum();
    if !(tr > 0.0) {
        return Err(Error::ZeroNorm { norm2: tr });
    }
    // label-side reduced state has matrix elements ⟨ψ_j|ψ_i⟩
    let rho = DMatrix::from_fn(nb, nb, |i, j| s[(j, i)] / tr);
    let (lam, _) = hermitian_eigh(&rho);
    Ok(lam.into_iter().map(entropy_term).sum())
}

/// Entropy of `Σ R_kl |v_k⟩⟨v_l|` restricted to the span of `vectors`.
fn span_entropy(vectors: &[Vec<C64>], r: &DMatrix<C64>) -> f64 {
    let g = gram(vectors);
    let x = gram_orthonormalizer(&g, GRAM_CUTOFF);
    let rho = x.adjoint() * &g * r * &g * &x;
    let (lam, _) = hermitian_eigh(&rho);
    let tr: f64 = lam.iter().sum();
    lam.into_iter().map(|l| entropy_term(l / tr)).sum()
}
