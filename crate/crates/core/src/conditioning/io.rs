//! CSV output of shot tables and metrology curves.

use std::fmt::Write as _;

use super::{LossCurve, QfiReport, ShotTable};
use crate::{Error, Result};

pub fn shots_to_csv(table: &ShotTable) -> String {
    let mut out = format!("# seed={}\nshot_id", table.seed);
    for k in 0..table.modes {
        let _ = write!(out, ",n_{}", k + 1);
    }
    out.push('\n');
    for s in 0..table.shots {
        let _ = write!(out, "{s}");
        for n in table.row(s) {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
    }
    out
}

pub fn shots_from_csv(text: &str) -> Result<ShotTable> {
    let mut seed = 0;
    let mut modes = None;
    let mut counts = Vec::new();
    let mut shots = 0;
    for (i, line) in text.lines().map(str::trim).enumerate().filter(|(_, l)| !l.is_empty()) {
        if let Some(c) = line.strip_prefix('#') {
            if let Some(v) = c.trim().strip_prefix("seed=") {
                seed = v.parse().map_err(|e| Error::Domain(format!("line {}: {e}", i + 1)))?;
            }
            continue;
        }
        if line.starts_with("shot_id") {
            modes = Some(line.split(',').count() - 1);
            continue;
        }
        let m = modes.ok_or_else(|| Error::domain("missing shot table header"))?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != m + 1 {
            return Err(Error::Domain(format!("line {}: expected {} columns", i + 1, m + 1)));
        }
        for f in &fields[1..] {
            counts.push(f.trim().parse().map_err(|e| Error::Domain(format!("line {}: {e}", i + 1)))?);
        }
        shots += 1;
    }
    let modes = modes.ok_or_else(|| Error::domain("missing shot table header"))?;
    Ok(ShotTable { seed, shots, modes, counts })
}

/// `eta,purity_hhg,purity_even,purity_odd,qfi_hhg,qfi_odd_pure,qfi_odd,qfi_even`.
pub fn curves_to_csv(loss: &LossCurve, qfi: &QfiReport) -> Result<String> {
    if loss.eta != qfi.eta {
        return Err(Error::domain("loss and QFI curves use different η grids"));
    }
    let mut out = format!("# mean_photons={:e}\n", loss.mean_photons);
    if let Some((lo, hi)) = qfi.advantage {
        let _ = writeln!(out, "# qfi_advantage_eta={lo:e},{hi:e}");
    }
    out.push_str("eta,purity_hhg,purity_even,purity_odd,qfi_hhg,qfi_odd_pure,qfi_odd,qfi_even\n");
    for k in 0..loss.eta.len() {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            loss.eta[k],
            loss.purity_hhg[k],
            loss.purity_even[k],
            loss.purity_odd[k],
            qfi.qfi_hhg[k],
            qfi.qfi_odd_pure,
            qfi.qfi_odd[k],
            qfi.qfi_even[k]
        );
    }
    Ok(out)
}
