//! CSV serialization of correlation series.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use super::{CorrelationSeries, SeriesKind};
use crate::sfa::io::{header_value, numeric_rows};
use crate::{Error, Result};

fn kind_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::FirstOrderRaw => "g1_raw",
        SeriesKind::FirstOrderNormalized => "g1",
        SeriesKind::SecondOrder => "g2",
    }
}

/// `tau,re,im` for first-order series (raw series append `equal_time`),
/// `tau,g2` for second order.
pub fn series_to_csv(series: &CorrelationSeries) -> String {
    let mut out = format!("# kind={}\n", kind_name(series.kind));
    match series.kind {
        SeriesKind::FirstOrderRaw => {
            out.push_str("# tau,re,im,equal_time\n");
            for ((t, v), e) in series.tau.iter().zip(&series.values).zip(&series.equal_time) {
                let _ = writeln!(out, "{t:e},{:e},{:e},{e:e}", v.re, v.im);
            }
        }
        SeriesKind::FirstOrderNormalized => {
            out.push_str("# tau,re,im\n");
            for (t, v) in series.tau.iter().zip(&series.values) {
                let _ = writeln!(out, "{t:e},{:e},{:e}", v.re, v.im);
            }
        }
        SeriesKind::SecondOrder => {
            out.push_str("# tau,g2\n");
            for (t, v) in series.tau.iter().zip(&series.values) {
                let _ = writeln!(out, "{t:e},{:e}", v.re);
            }
        }
    }
    out
}

pub fn series_from_csv(text: &str) -> Result<CorrelationSeries> {
    let probe: Vec<String> = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#').map(|c| c.trim().to_string()))
        .collect();
    let kind = match header_value(&probe, "kind").as_deref() {
        Some("g1_raw") => SeriesKind::FirstOrderRaw,
        Some("g1") => SeriesKind::FirstOrderNormalized,
        Some("g2") => SeriesKind::SecondOrder,
        other => return Err(Error::Domain(format!("unknown series kind {other:?}"))),
    };
    let columns = match kind {
        SeriesKind::FirstOrderRaw => 4,
        SeriesKind::FirstOrderNormalized => 3,
        SeriesKind::SecondOrder => 2,
    };
    let (_, rows) = numeric_rows(text, columns)?;
    let tau = rows.iter().map(|r| r[0]).collect();
    let values = rows
        .iter()
        .map(|r| if columns == 2 { C64::new(r[1], 0.0) } else { C64::new(r[1], r[2]) })
        .collect();
    let equal_time = rows.iter().map(|r| if columns == 4 { r[3] } else { 1.0 }).collect();
    Ok(CorrelationSeries { tau, values, equal_time, kind })
}
