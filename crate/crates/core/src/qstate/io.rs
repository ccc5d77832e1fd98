//! Text serialization for harmonic amplitudes and Gaussian states.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::HarmonicAmplitudes;
use crate::phase_space::GaussianModeState;
use crate::{Error, Result};

pub fn amplitudes_to_csv(amps: &HarmonicAmplitudes) -> String {
    let mut out = format!(
        "# omega0={:e}\n# alpha_in={:e},{:e}\n# q,re_chi,im_chi,photon_number\n",
        amps.omega0, amps.alpha_in.re, amps.alpha_in.im
    );
    for (k, c) in amps.chi.iter().enumerate() {
        let _ = writeln!(out, "{},{:e},{:e},{:e}", k + 1, c.re, c.im, c.norm_sqr());
    }
    out
}

pub fn amplitudes_from_csv(text: &str) -> Result<HarmonicAmplitudes> {
    let bad = |line: usize, msg: &str| Error::Domain(format!("line {line}: {msg}"));
    let mut omega0 = None;
    let mut alpha_in = None;
    let mut chi = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if let Some(v) = c.strip_prefix("omega0=") {
                omega0 = Some(v.parse::<f64>().map_err(|_| bad(i + 1, "bad omega0"))?);
            } else if let Some(v) = c.strip_prefix("alpha_in=") {
                let parts: Vec<f64> = v.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad(i + 1, "bad alpha_in"))?;
                if parts.len() != 2 {
                    return Err(bad(i + 1, "alpha_in needs two numbers"));
                }
                alpha_in = Some(C64::new(parts[0], parts[1]));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(i + 1, "expected 4 columns"));
        }
        let q: usize = fields[0].parse().map_err(|_| bad(i + 1, "bad mode index"))?;
        if q != chi.len() + 1 {
            return Err(bad(i + 1, "mode indices must run 1, 2, …"));
        }
        let re: f64 = fields[1].parse().map_err(|_| bad(i + 1, "bad re_chi"))?;
        let im: f64 = fields[2].parse().map_err(|_| bad(i + 1, "bad im_chi"))?;
        chi.push(C64::new(re, im));
    }
    Ok(HarmonicAmplitudes {
        chi,
        alpha_in: alpha_in.ok_or_else(|| Error::domain("missing alpha_in header"))?,
        omega0: omega0.ok_or_else(|| Error::domain("missing omega0 header"))?,
    })
}

/// Mean vector on the first line, then one covariance row per line.
pub fn gaussian_to_string(state: &GaussianModeState) -> String {
    let row = |v: &mut dyn Iterator<Item = f64>| v.map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
    let mut out = format!("# modes: {}\n", state.modes());
    out.push_str(&row(&mut state.mean().iter().copied()));
    out.push('\n');
    let cov = state.covariance();
    for i in 0..cov.nrows() {
        out.push_str(&row(&mut cov.row(i).iter().copied()));
        out.push('\n');
    }
    out
}

pub fn gaussian_from_str(text: &str) -> Result<GaussianModeState> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Domain(format!("row {}: {e}", i + 1))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let (first, rest) = rows.split_first().ok_or_else(|| Error::domain("empty Gaussian record"))?;
    let n = first.len();
    if rest.len() != n || rest.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension { expected: n, got: rest.len() });
    }
    let cov = DMatrix::from_fn(n, n, |i, j| rest[i][j]);
    GaussianModeState::new(DVector::from_vec(first.clone()), cov)
}
