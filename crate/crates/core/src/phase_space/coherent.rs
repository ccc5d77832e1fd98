use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::{Error, Result};

/// `⟨β̄|ᾱ⟩` for multimode coherent states.
pub fn coherent_overlap(alpha: &[C64], beta: &[C64]) -> Result<C64> {
    if alpha.len() != beta.len() {
        return Err(Error::Dimension { expected: alpha.len(), got: beta.len() });
    }
    Ok(overlap_unchecked(alpha, beta))
}

pub(crate) fn overlap_unchecked(alpha: &[C64], beta: &[C64]) -> C64 {
    overlap_exponent(alpha, beta).exp()
}

/// Logarithm of `⟨β̄|ᾱ⟩`.
pub(crate) fn overlap_exponent(alpha: &[C64], beta: &[C64]) -> C64 {
    alpha
        .iter()
        .zip(beta)
        .map(|(a, b)| -0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + b.conj() * a)
        .sum()
}

/// Row sums evaluated in parallel for large double sums, reduced in row order.
fn ordered_sum(work: usize, rows: usize, row: impl Fn(usize) -> C64 + Sync) -> C64 {
    if work < 1 << 14 {
        return (0..rows).map(row).sum();
    }
    let parts: Vec<C64> = (0..rows).into_par_iter().map(&row).collect();
    parts.into_iter().sum()
}

fn check_finite(v: &[C64]) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain("non-finite coherent amplitude"))
    }
}

/// Pure state `Σ_k c_k |ᾱ_k⟩` over `modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentSuperposition {
    modes: usize,
    weights: Vec<C64>,
    amplitudes: Vec<Vec<C64>>,
    normalized: bool,
}

impl CoherentSuperposition {
    pub fn new(modes: usize, terms: Vec<(C64, Vec<C64>)>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::domain("at least one mode required"));
        }
        if terms.is_empty() {
            return Err(Error::domain("at least one term required"));
        }
        let mut weights = Vec::with_capacity(terms.len());
        let mut amplitudes = Vec::with_capacity(terms.len());
        for (c, amps) in terms {
            if amps.len() != modes {
                return Err(Error::Dimension { expected: modes, got: amps.len() });
            }
            check_finite(&amps)?;
            check_finite(&[c])?;
            weights.push(c);
            amplitudes.push(amps);
        }
        Ok(Self { modes, weights, amplitudes, normalized: false })
    }

    /// Single multimode coherent state.
    pub fn coherent(amps: Vec<C64>) -> Result<Self> {
        let modes = amps.len();
        let mut s = Self::new(modes, vec![(C64::new(1.0, 0.0), amps)])?;
        s.normalized = true;
        Ok(s)
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::coherent(vec![C64::new(0.0, 0.0); modes])
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    pub fn amplitudes(&self, k: usize) -> &[C64] {
        &self.amplitudes[k]
    }

    pub fn terms(&self) -> impl Iterator<Item = (C64, &[C64])> {
        self.weights.iter().copied().zip(self.amplitudes.iter().map(|a| a.as_slice()))
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Sets the flag without rescaling when the norm is already one.
    pub(crate) fn mark_if_unit(mut self) -> Self {
        self.normalized = (self.norm_sqr() - 1.0).abs() < 1e-12;
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.modes != other.modes {
            return Err(Error::Dimension { expected: self.modes, got: other.modes });
        }
        let row = |k: usize| {
            let (ck, ak) = (self.weights[k], &self.amplitudes[k]);
            other.terms().fold(C64::new(0.0, 0.0), |acc, (cl, al)| acc + ck.conj() * cl * overlap_unchecked(al, ak))
        };
        Ok(ordered_sum(self.len() * other.len(), self.len(), row))
    }

    pub fn norm_sqr(&self) -> f64 {
        let row = |k: usize| {
            let (ck, ak) = (self.weights[k], &self.amplitudes[k]);
            let off = self.terms().skip(k + 1).fold(0.0, |acc, (cl, al)| acc + (ck.conj() * cl * overlap_unchecked(al, ak)).re);
            C64::new(ck.norm_sqr() + 2.0 * off, 0.0)
        };
        ordered_sum(self.len() * self.len(), self.len(), row).re
    }

    /// Rescales to unit norm. Fails when the state vanishes (a conditioning
    /// event of zero probability).
    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm_sqr();
        let scale: f64 = self.weights.iter().map(|c| c.norm()).sum::<f64>().powi(2);
        if !(n2 > 1e-24 * scale.max(1e-300)) {
            return Err(Error::ZeroNorm { norm2: n2 });
        }
        let s = 1.0 / n2.sqrt();
        for c in &mut self.weights {
            *c *= s;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Density operator `|ψ⟩⟨ψ|` as a dyad mix.
    pub fn to_operator(&self) -> CoherentOperatorMix {
        let mut dyads = Vec::with_capacity(self.len() * self.len());
        for (ck, ak) in self.terms() {
            for (cl, al) in self.terms() {
                dyads.push(Dyad { coeff: ck * cl.conj(), ket: ak.to_vec(), bra: al.to_vec() });
            }
        }
        CoherentOperatorMix { modes: self.modes, dyads }
    }

    /// Applies a common phase rotation `a → a·e^{iθ}` to every amplitude.
    pub fn rotated(&self, theta: f64) -> Self {
        let rot = C64::from_polar(1.0, theta);
        let mut out = self.clone();
        for amps in &mut out.amplitudes {
            for a in amps.iter_mut() {
                *a *= rot;
            }
        }
        out
    }
}

/// One term `c·|ᾱ⟩⟨β̄|` of an operator mix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dyad {
    pub coeff: C64,
    pub ket: Vec<C64>,
    pub bra: Vec<C64>,
}

/// Operator `Σ c_kl |ᾱ_k⟩⟨β̄_l|`, typically a density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentOperatorMix {
    modes: usize,
    dyads: Vec<Dyad>,
}

impl CoherentOperatorMix {
    pub fn new(modes: usize, dyads: Vec<Dyad>) -> Result<Self> {
        if dyads.is_empty() {
            return Err(Error::domain("operator mix needs at least one dyad"));
        }
        for d in &dyads {
            if d.ket.len() != modes || d.bra.len() != modes {
                return Err(Error::Dimension { expected: modes, got: d.ket.len().min(d.bra.len()) });
            }
            check_finite(&d.ket)?;
            check_finite(&d.bra)?;
        }
        Ok(Self { modes, dyads })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dyads(&self) -> &[Dyad] {
        &self.dyads
    }

    pub fn trace(&self) -> C64 {
        self.dyads.iter().map(|d| d.coeff * overlap_unchecked(&d.ket, &d.bra)).sum()
    }

    /// True when every dyad has its Hermitian-conjugate partner.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let close = |a: &[C64], b: &[C64]| a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol);
        self.dyads.iter().all(|d| {
            self.dyads.iter().any(|e| {
                (e.coeff - d.coeff.conj()).norm() <= tol * (1.0 + d.coeff.norm())
                    && close(&e.ket, &d.bra)
                    && close(&e.bra, &d.ket)
            })
        })
    }

    /// Distinct coherent vectors appearing as kets or bras, plus the
    /// coefficient matrix `R` with `ρ = Σ_ij R_ij |v_i⟩⟨v_j|`.
    pub(crate) fn span_representation(&self) -> (Vec<Vec<C64>>, nalgebra::DMatrix<C64>) {
        let mut basis: Vec<Vec<C64>> = Vec::new();
        let index = |v: &Vec<C64>, basis: &mut Vec<Vec<C64>>| -> usize {
            if let Some(i) = basis.iter().position(|b| b == v) {
                i
            } else {
                basis.push(v.clone());
                basis.len() - 1
            }
        };
        let mut pairs = Vec::with_capacity(self.dyads.len());
        for d in &self.dyads {
            let i = index(&d.ket, &mut basis);
            let j = index(&d.bra, &mut basis);
            pairs.push((i, j, d.coeff));
        }
        let n = basis.len();
        let mut r = nalgebra::DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for (i, j, c) in pairs {
            r[(i, j)] += c;
        }
        (basis, r)
    }
}

/// Borrowed view over either state carrier.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a CoherentSuperposition),
    Mixed(&'a CoherentOperatorMix),
}

impl<'a> From<&'a CoherentSuperposition> for StateRef<'a> {
    fn from(s: &'a CoherentSuperposition) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a CoherentOperatorMix> for StateRef<'a> {
    fn from(s: &'a CoherentOperatorMix) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    pub fn modes(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.modes(),
            StateRef::Mixed(m) => m.modes(),
        }
    }

    /// Dyad list of the density operator.
    pub(crate) fn dyads(&self) -> std::borrow::Cow<'_, [Dyad]> {
        match self {
            StateRef::Pure(s) => std::borrow::Cow::Owned(s.to_operator().dyads),
            StateRef::Mixed(m) => std::borrow::Cow::Borrowed(m.dyads()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn self_overlap_is_one() {
        let a = vec![c(1.3, -0.2), c(0.0, 2.0)];
        let o = coherent_overlap(&a, &a).unwrap();
        assert!((o - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn vacuum_overlap() {
        let o = coherent_overlap(&[c(2.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!((o.re - (-2.0f64).exp()).abs() < 1e-15);
        assert!((o.re - 0.1353).abs() < 1e-4);
    }

    #[test]
    fn overlap_length_mismatch() {
        let err = coherent_overlap(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }

    #[test]
    fn cancelling_terms_fail_to_normalize() {
        let s = CoherentSuperposition::new(
            1,
            vec![(c(1.0, 0.0), vec![c(0.7, 0.0)]), (c(-1.0, 0.0), vec![c(0.7, 0.0)])],
        )
        .unwrap();
        assert!(matches!(s.normalized(), Err(Error::ZeroNorm { .. })));
    }

    #[test]
    fn pure_operator_is_hermitian_trace_one() {
        let s = CoherentSuperposition::new(
            1,
            vec![(c(1.0, 0.0), vec![c(2.0, 0.0)]), (c(1.0, 0.0), vec![c(-2.0, 0.0)])],
        )
        .unwrap()
        .normalized()
        .unwrap();
        let op = s.to_operator();
        assert!(op.is_hermitian(1e-12));
        assert!((op.trace() - c(1.0, 0.0)).norm() < 1e-12);
    }
}
