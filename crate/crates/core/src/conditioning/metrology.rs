use num_complex::Complex64 as C64;

use super::{hhg_cat_state, ConditioningInput};
use crate::phase_space::{apply_loss, mean_photon_number, purity, qfi_phase, CoherentSuperposition};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatParity {
    Even,
    Odd,
}

/// Normalized `|α⟩ ± |−α⟩` with real `α` chosen so that `⟨N⟩ = mean`
/// (`|α|² tanh|α|²` for even, `|α|² coth|α|²` for odd).
pub fn matched_cat(parity: CatParity, mean: f64) -> Result<CoherentSuperposition> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::domain("target photon number must be positive"));
    }
    if parity == CatParity::Odd && mean <= 1.0 {
        return Err(Error::domain("odd cats carry more than one photon"));
    }
    let f = |x: f64| match parity {
        CatParity::Even => x * x.tanh(),
        CatParity::Odd => x / x.tanh(),
    };
    let (mut lo, mut hi) = (1e-12, mean + 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = (0.5 * (lo + hi)).sqrt();
    let sign = if parity == CatParity::Even { 1.0 } else { -1.0 };
    CoherentSuperposition::new(
        1,
        vec![(C64::new(1.0, 0.0), vec![C64::new(a, 0.0)]), (C64::new(sign, 0.0), vec![C64::new(-a, 0.0)])],
    )?
    .normalized()
}

/// HHG cat with real driver `α > 0`, fixed shift `δα` and `Ω`, with `α`
/// tuned so that `⟨N⟩ = mean`.
pub fn matched_hhg_cat(delta_alpha: C64, omega: f64, mean: f64) -> Result<(ConditioningInput, CoherentSuperposition)> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::domain("target photon number must be positive"));
    }
    let build = |a: f64| -> Result<(ConditioningInput, CoherentSuperposition)> {
        let input = ConditioningInput::with_omega(C64::new(a, 0.0), delta_alpha, omega)?;
        let state = hhg_cat_state(&input)?;
        Ok((input, state))
    };
    let n_of = |a: f64| build(a).map(|(_, s)| mean_photon_number(&s));
    let (mut lo, mut hi) = (0.0, mean.sqrt() + delta_alpha.norm() + 4.0);
    if n_of(hi)? < mean {
        return Err(Error::Numeric("photon-number bracket failed".into()));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        match n_of(mid) {
            Ok(n) if n >= mean => hi = mid,
            _ => lo = mid,
        }
    }
    let (input, state) = build(hi)?;
    let got = mean_photon_number(&state);
    if (got - mean).abs() > 1e-6 * mean.max(1.0) {
        return Err(Error::Numeric(format!("matched photon number {got} differs from {mean}")));
    }
    Ok((input, state))
}

/// Purity after loss for the HHG cat and even/odd cats at its `⟨N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    pub eta: Vec<f64>,
    pub mean_photons: f64,
    pub purity_hhg: Vec<f64>,
    pub purity_even: Vec<f64>,
    pub purity_odd: Vec<f64>,
}

pub fn loss_robustness_curve(hhg: &CoherentSuperposition, etas: &[f64]) -> Result<LossCurve> {
    check_normalized(hhg)?;
    let n = mean_photon_number(hhg);
    let even = matched_cat(CatParity::Even, n)?;
    let odd = matched_cat(CatParity::Odd, n)?;
    let curve = |s: &CoherentSuperposition| -> Result<Vec<f64>> {
        etas.iter().map(|&e| purity(&apply_loss(s, e)?)).collect()
    };
    Ok(LossCurve {
        eta: etas.to_vec(),
        mean_photons: n,
        purity_hhg: curve(hhg)?,
        purity_even: curve(&even)?,
        purity_odd: curve(&odd)?,
    })
}

/// Phase QFI of the lossy HHG cat and lossy even/odd cats against the
/// loss-free odd cat at the same `⟨N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiReport {
    pub eta: Vec<f64>,
    pub qfi_hhg: Vec<f64>,
    pub qfi_even: Vec<f64>,
    pub qfi_odd: Vec<f64>,
    pub qfi_odd_pure: f64,
    /// Widest contiguous `[η_lo, η_hi]` of the grid where the lossy HHG cat
    /// beats the pure odd cat.
    pub advantage: Option<(f64, f64)>,
}

pub fn qfi_comparison(hhg: &CoherentSuperposition, etas: &[f64]) -> Result<QfiReport> {
    check_normalized(hhg)?;
    let n = mean_photon_number(hhg);
    let even = matched_cat(CatParity::Even, n)?;
    let odd = matched_cat(CatParity::Odd, n)?;
    let curve = |s: &CoherentSuperposition| -> Result<Vec<f64>> {
        etas.iter().map(|&e| qfi_phase(&apply_loss(s, e)?)).collect()
    };
    let qfi_hhg = curve(hhg)?;
    let qfi_odd_pure = qfi_phase(&odd)?;
    let mut order: Vec<usize> = (0..etas.len()).collect();
    order.sort_by(|&a, &b| etas[a].total_cmp(&etas[b]));
    let mut best: Option<(f64, f64)> = None;
    let mut run: Option<(f64, f64)> = None;
    for &k in &order {
        if qfi_hhg[k] > qfi_odd_pure {
            run = Some(run.map_or((etas[k], etas[k]), |(lo, _)| (lo, etas[k])));
            let r = run.unwrap();
            if best.is_none_or(|b| r.1 - r.0 > b.1 - b.0) {
                best = Some(r);
            }
        } else {
            run = None;
        }
    }
    Ok(QfiReport {
        eta: etas.to_vec(),
        qfi_even: curve(&even)?,
        qfi_odd: curve(&odd)?,
        qfi_hhg,
        qfi_odd_pure,
        advantage: best,
    })
}

fn check_normalized(s: &CoherentSuperposition) -> Result<()> {
    let n = s.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Structure(format!("state norm {n} differs from one")));
    }
    Ok(())
}
