//! CSV serialization of dipole records and spectra.

use std::fmt::Write as _;

use super::{DipoleRecord, Spectrum, TimeGrid, Window};
use crate::{Error, Result};

pub fn record_to_csv(record: &DipoleRecord) -> String {
    let mut out = format!("# omega0={:e}\n# t,d\n", record.omega0);
    for (t, d) in record.grid.times().zip(&record.values) {
        let _ = writeln!(out, "{t:e},{d:e}");
    }
    out
}

pub(crate) fn numeric_rows(text: &str, columns: usize) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Domain(format!("line {}: {e}", i + 1))))
            .collect::<Result<_>>()?;
        if row.len() != columns {
            return Err(Error::Domain(format!("line {}: expected {columns} columns", i + 1)));
        }
        rows.push(row);
    }
    Ok((comments, rows))
}

pub(crate) fn header_value(comments: &[String], key: &str) -> Option<String> {
    comments.iter().find_map(|c| c.strip_prefix(&format!("{key}=")).map(str::to_string))
}

pub fn record_from_csv(text: &str) -> Result<DipoleRecord> {
    let (comments, rows) = numeric_rows(text, 2)?;
    if rows.len() < 2 {
        return Err(Error::domain("dipole record needs at least two samples"));
    }
    let omega0 = header_value(&comments, "omega0")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::domain("missing omega0 header"))?;
    let dt = rows[1][0] - rows[0][0];
    let grid = TimeGrid::new(rows[0][0], dt, rows.len())?;
    DipoleRecord::new(grid, rows.into_iter().map(|r| r[1]).collect(), omega0)
}

pub fn spectrum_to_csv(spectrum: &Spectrum) -> String {
    let mut out = format!("# omega0={:e}\n# window={}\n# omega,harmonic_order,intensity\n", spectrum.omega0, spectrum.window.name());
    for (k, (w, i)) in spectrum.omega.iter().zip(&spectrum.intensity).enumerate() {
        let _ = writeln!(out, "{w:e},{:e},{i:e}", spectrum.harmonic_order(k));
    }
    out
}

pub fn spectrum_from_csv(text: &str) -> Result<Spectrum> {
    let (comments, rows) = numeric_rows(text, 3)?;
    let omega0 = header_value(&comments, "omega0")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::domain("missing omega0 header"))?;
    let window = match header_value(&comments, "window").as_deref() {
        Some("rectangular") => Window::Rectangular,
        _ => Window::Hann,
    };
    Ok(Spectrum {
        omega: rows.iter().map(|r| r[0]).collect(),
        intensity: rows.iter().map(|r| r[2]).collect(),
        omega0,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trip() {
        let grid = TimeGrid::new(0.0, 0.25, 5).unwrap();
        let rec = DipoleRecord::new(grid, vec![0.0, 1e-3, -2.5e-4, 3.0, 0.125], 0.057).unwrap();
        let text = record_to_csv(&rec);
        assert!(text.contains("# t,d"));
        let back = record_from_csv(&text).unwrap();
        assert_eq!(back.values, rec.values);
        assert_eq!(back.grid.n, 5);
        assert!((back.grid.dt - 0.25).abs() < 1e-15);
    }

    #[test]
    fn spectrum_round_trip() {
        let s = Spectrum { omega: vec![0.0, 0.5, 1.0], intensity: vec![0.0, 2.0, 3.5], omega0: 0.5, window: Window::Rectangular };
        let text = spectrum_to_csv(&s);
        assert!(text.contains("# omega,harmonic_order,intensity"));
        assert_eq!(spectrum_from_csv(&text).unwrap(), s);
    }
}
