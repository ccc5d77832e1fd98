//! Text serialization for Wigner grids and coherent-state records.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use super::coherent::CoherentSuperposition;
use super::wigner::{Axis, WignerGrid};
use crate::{Error, Result};

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Domain(format!("line {line}: {msg}"))
}

/// Header `# x: min step count`, `# p: min step count`, then one row per x value.
pub fn wigner_to_string(grid: &WignerGrid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# x: {:e} {:e} {}", grid.x.min, grid.x.step, grid.x.count);
    let _ = writeln!(out, "# p: {:e} {:e} {}", grid.p.min, grid.p.step, grid.p.count);
    for i in 0..grid.x.count {
        let row: Vec<String> = grid.row(i).iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_axis(line: &str, tag: &str, lineno: usize) -> Result<Axis> {
    let rest = line
        .strip_prefix(&format!("# {tag}:"))
        .ok_or_else(|| parse_err(lineno, format!("expected '# {tag}:' header")))?;
    let parts: Vec<&str> = rest.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(parse_err(lineno, "axis header needs min step count"));
    }
    let min = parts[0].parse::<f64>().map_err(|e| parse_err(lineno, e))?;
    let step = parts[1].parse::<f64>().map_err(|e| parse_err(lineno, e))?;
    let count = parts[2].parse::<usize>().map_err(|e| parse_err(lineno, e))?;
    Axis::new(min, step, count)
}

pub fn wigner_from_str(text: &str) -> Result<WignerGrid> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (i, l) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let x = parse_axis(l.trim(), "x", i + 1)?;
    let (i, l) = lines.next().ok_or_else(|| parse_err(2, "missing p header"))?;
    let p = parse_axis(l.trim(), "p", i + 1)?;
    let mut values = Vec::with_capacity(x.count * p.count);
    let mut rows = 0;
    for (i, l) in lines {
        let row: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(i + 1, e)))
            .collect::<Result<_>>()?;
        if row.len() != p.count {
            return Err(parse_err(i + 1, format!("expected {} values, got {}", p.count, row.len())));
        }
        values.extend(row);
        rows += 1;
    }
    if rows != x.count {
        return Err(Error::Dimension { expected: x.count, got: rows });
    }
    Ok(WignerGrid { x, p, values })
}

/// One term per line: `re(c) im(c) re(α₁) im(α₁) …`.
pub fn state_to_string(state: &CoherentSuperposition) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# modes: {}", state.modes());
    for (c, amps) in state.terms() {
        let mut fields = vec![format!("{:e}", c.re), format!("{:e}", c.im)];
        for a in amps {
            fields.push(format!("{:e}", a.re));
            fields.push(format!("{:e}", a.im));
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

pub fn state_from_str(text: &str) -> Result<CoherentSuperposition> {
    let mut modes = None;
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# modes:") {
            modes = Some(rest.trim().parse::<usize>().map_err(|e| parse_err(i + 1, e))?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(i + 1, e)))
            .collect::<Result<_>>()?;
        if nums.len() < 4 || nums.len() % 2 != 0 {
            return Err(parse_err(i + 1, "term needs an even count of at least four numbers"));
        }
        let c = C64::new(nums[0], nums[1]);
        let amps = nums[2..].chunks(2).map(|p| C64::new(p[0], p[1])).collect::<Vec<_>>();
        terms.push((c, amps));
    }
    let m = modes.or_else(|| terms.first().map(|(_, a)| a.len())).unwrap_or(0);
    CoherentSuperposition::new(m, terms).map(CoherentSuperposition::mark_if_unit)
}

#[cfg(test)]
mod tests {
    use super::super::wigner::wigner;
    use super::*;

    #[test]
    fn wigner_round_trip() {
        let s = CoherentSuperposition::coherent(vec![C64::new(0.3, 0.1)]).unwrap();
        let ax = Axis::symmetric(1.0, 0.25).unwrap();
        let w = wigner(&s, 0, ax, ax).unwrap();
        let back = wigner_from_str(&wigner_to_string(&w)).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn state_round_trip() {
        let s = CoherentSuperposition::new(
            2,
            vec![
                (C64::new(0.5, -0.1), vec![C64::new(1.0, 2.0), C64::new(0.0, 0.0)]),
                (C64::new(-0.2, 0.0), vec![C64::new(-1.0, 0.5), C64::new(3.0, -1.0)]),
            ],
        )
        .unwrap();
        assert_eq!(state_from_str(&state_to_string(&s)).unwrap(), s);
    }

    #[test]
    fn bad_row_reports_line() {
        let text = "# x: 0 0.1 2\n# p: 0 0.1 2\n1 2\n1 x\n";
        let err = wigner_from_str(text).unwrap_err();
        assert!(err.to_string().contains("line 4"));
    }
}
