use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::coherent::{overlap_exponent, StateRef};
use crate::{Error, Result};

const MAX_STEP: f64 = 0.5;

/// Uniform axis `min + i·step`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !min.is_finite() || count < 2 {
            return Err(Error::domain("axis needs step > 0 and at least two points"));
        }
        Ok(Self { min, step, count })
    }

    /// Symmetric axis over `[-half_width, half_width]` with the given step.
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        let n = (2.0 * half_width / step).round() as usize + 1;
        Self::new(-half_width, step, n)
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + self.step * i as f64
    }

    pub fn max(&self) -> f64 {
        self.value(self.count - 1)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

/// Wigner function sampled on a rectangular grid, `values[i·p.count + j] = W(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x: Axis,
    pub p: Axis,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p.count + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p.count..(i + 1) * self.p.count]
    }

    /// Riemann sum `Σ W Δx Δp`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.x.step * self.p.step
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn interpolate(&self, x: f64, p: f64) -> Option<f64> {
        let fx = (x - self.x.min) / self.x.step;
        let fp = (p - self.p.min) / self.p.step;
        if fx < 0.0 || fp < 0.0 || fx > (self.x.count - 1) as f64 || fp > (self.p.count - 1) as f64 {
            return None;
        }
        let i = (fx.floor() as usize).min(self.x.count - 2);
        let j = (fp.floor() as usize).min(self.p.count - 2);
        let tx = fx - i as f64;
        let tp = fp - j as f64;
        Some(
            (1.0 - tx) * (1.0 - tp) * self.at(i, j)
                + tx * (1.0 - tp) * self.at(i + 1, j)
                + (1.0 - tx) * tp * self.at(i, j + 1)
                + tx * tp * self.at(i + 1, j + 1),
        )
    }
}

/// Wigner function of `mode`, all other modes traced out.
///
/// Each dyad `c|ᾱ⟩⟨β̄|` contributes
/// `(c/π)·⟨β̄|ᾱ⟩·exp(−2(γ−α_m)(γ*−β_m*))` with `γ = (x + ip)/√2`; the overlap
/// and the Gaussian are combined in the exponent so large cats stay finite.
pub fn wigner<'a>(state: impl Into<StateRef<'a>>, mode: usize, x: Axis, p: Axis) -> Result<WignerGrid> {
    let state = state.into();
    if mode >= state.modes() {
        return Err(Error::Dimension { expected: state.modes(), got: mode + 1 });
    }
    if x.step > MAX_STEP || p.step > MAX_STEP {
        return Err(Error::Resolution(format!(
            "grid step ({}, {}) exceeds {MAX_STEP}",
            x.step, p.step
        )));
    }
    if let StateRef::Pure(s) = state {
        let n = s.norm_sqr();
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::Structure(format!("state norm {n} differs from one")));
        }
    }
    let dyads = state.dyads();
    let terms: Vec<(C64, C64, C64)> = dyads
        .iter()
        .map(|d| {
            let lead = d.coeff.ln() + overlap_exponent(&d.ket, &d.bra);
            (lead, d.ket[mode], d.bra[mode])
        })
        .filter(|(lead, _, _)| lead.re.is_finite())
        .collect();
    let inv_pi = std::f64::consts::FRAC_1_PI;
    let sqrt_half = std::f64::consts::FRAC_1_SQRT_2;
    let values: Vec<f64> = (0..x.count)
        .into_par_iter()
        .flat_map_iter(|i| {
            let xv = x.value(i);
            let terms = &terms;
            (0..p.count).map(move |j| {
                let g = C64::new(xv, p.value(j)) * sqrt_half;
                let mut acc = 0.0;
                for &(lead, a, b) in terms {
                    acc += (lead - 2.0 * (g - a) * (g.conj() - b.conj())).exp().re;
                }
                acc * inv_pi
            })
        })
        .collect();
    Ok(WignerGrid { x, p, values })
}

#[cfg(test)]
mod tests {
    use super::super::coherent::CoherentSuperposition;
    use super::*;
    use std::f64::consts::FRAC_1_PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_peak() {
        let s = CoherentSuperposition::vacuum(1).unwrap();
        let ax = Axis::symmetric(5.0, 0.1).unwrap();
        let w = wigner(&s, 0, ax, ax).unwrap();
        let mid = ax.count / 2;
        assert!((w.at(mid, mid) - FRAC_1_PI).abs() < 1e-12);
        assert!((w.integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coarse_grid_rejected() {
        let s = CoherentSuperposition::vacuum(1).unwrap();
        let ax = Axis::symmetric(5.0, 1.0).unwrap();
        assert!(matches!(wigner(&s, 0, ax, ax), Err(Error::Resolution(_))));
    }

    #[test]
    fn bad_mode_rejected() {
        let s = CoherentSuperposition::vacuum(2).unwrap();
        let ax = Axis::symmetric(2.0, 0.1).unwrap();
        assert!(wigner(&s, 2, ax, ax).is_err());
    }

    #[test]
    fn coherent_peak_location() {
        let alpha = c(1.0, -0.5);
        let s = CoherentSuperposition::coherent(vec![alpha]).unwrap();
        let ax = Axis::symmetric(5.0, 0.05).unwrap();
        let w = wigner(&s, 0, ax, ax).unwrap();
        let (mut best, mut bi, mut bj) = (f64::MIN, 0, 0);
        for i in 0..ax.count {
            for j in 0..ax.count {
                if w.at(i, j) > best {
                    best = w.at(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        let sq2 = 2f64.sqrt();
        assert!((ax.value(bi) - sq2 * alpha.re).abs() < 0.05);
        assert!((ax.value(bj) - sq2 * alpha.im).abs() < 0.05);
    }

    #[test]
    fn odd_cat_negative_at_origin() {
        let a = 2.0;
        let s = CoherentSuperposition::new(1, vec![(c(1.0, 0.0), vec![c(a, 0.0)]), (c(-1.0, 0.0), vec![c(-a, 0.0)])])
            .unwrap()
            .normalized()
            .unwrap();
        let ax = Axis::new(0.0, 0.1, 2).unwrap();
        let w = wigner(&s, 0, ax, ax).unwrap();
        assert!((w.at(0, 0) + FRAC_1_PI).abs() < 1e-12);
    }

    #[test]
    fn traced_mode_irrelevant_for_product() {
        let s = CoherentSuperposition::coherent(vec![c(0.5, 0.0), c(3.0, 1.0)]).unwrap();
        let single = CoherentSuperposition::coherent(vec![c(0.5, 0.0)]).unwrap();
        let ax = Axis::symmetric(3.0, 0.25).unwrap();
        let a = wigner(&s, 0, ax, ax).unwrap();
        let b = wigner(&single, 0, ax, ax).unwrap();
        for (u, v) in a.values.iter().zip(&b.values) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let s = CoherentSuperposition::vacuum(1).unwrap();
        let ax = Axis::symmetric(2.0, 0.25).unwrap();
        let w = wigner(&s, 0, ax, ax).unwrap();
        assert!((w.interpolate(ax.value(3), ax.value(5)).unwrap() - w.at(3, 5)).abs() < 1e-14);
        assert!(w.interpolate(10.0, 0.0).is_none());
    }
}
