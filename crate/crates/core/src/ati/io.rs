use std::fmt::Write as _;

use super::PhotoelectronSpectrum;

/// `energy_au,energy_over_Up,yield` with both emission directions summed.
pub fn photoelectron_to_csv(spec: &PhotoelectronSpectrum) -> String {
    let mut out = format!("# up={:e}\n# energy_au,energy_over_Up,yield\n", spec.up);
    for (e, y) in spec.energy_yield() {
        let rel = if spec.up > 0.0 { e / spec.up } else { 0.0 };
        let _ = writeln!(out, "{e:e},{rel:e},{y:e}");
    }
    out
}

/// `q,p_ati,p_hhg_reference`.
pub fn emission_to_csv(rows: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("# q,p_ati,p_hhg_reference\n");
    for (q, a, h) in rows {
        let _ = writeln!(out, "{q},{a:e},{h:e}");
    }
    out
}
