use std::io::{Read, Write};

use super::{MonitorRecord, MonitorSeries};
use crate::error::{Error, Result};

const FIXED: [&str; 8] = [
    "t",
    "lp_2",
    "lp_n",
    "lp_inf",
    "besov_m1",
    "besov_dist_omega",
    "kato_I",
    "energy",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

/// Shortest round-trip decimal; scientific outside `[1e-5, 1e16)`.
pub(crate) fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn extras(series: &MonitorSeries) -> Vec<f64> {
    let n = series.dim as f64;
    series
        .records
        .first()
        .map(|r| {
            r.lp_norms
                .iter()
                .map(|&(p, _)| p)
                .filter(|&p| p != 2.0 && p != n && p != f64::INFINITY)
                .collect()
        })
        .unwrap_or_default()
}

/// One header row, then one row per record; absent values are empty cells.
pub fn write_csv<W: Write>(series: &MonitorSeries, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let extra = extras(series);
    let mut header: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    header.extend(extra.iter().map(|p| format!("lp_{p}")));
    out.write_record(&header).map_err(csv_err)?;
    let n = series.dim as f64;
    for r in &series.records {
        let mut row = vec![
            num(r.t),
            cell(r.lp(2.0)),
            cell(r.lp(n)),
            cell(r.lp(f64::INFINITY)),
            num(r.besov_m1),
            cell(r.besov_dist_omega),
            cell(r.kato_i),
            num(r.energy),
        ];
        row.extend(extra.iter().map(|&p| cell(r.lp(p))));
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Parse a file written by [`write_csv`] for a field of dimension `dim`.
pub fn read_csv<R: Read>(r: R, dim: usize) -> Result<Vec<MonitorRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.len() < FIXED.len() || header.iter().zip(FIXED).any(|(a, b)| a != b) {
        return Err(Error::Format("unexpected monitor header".into()));
    }
    let extra: Vec<f64> = header
        .iter()
        .skip(FIXED.len())
        .map(|h| {
            h.strip_prefix("lp_")
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad column `{h}`")))
        })
        .collect::<Result<_>>()?;
    let n = dim as f64;
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let num = |i: usize| -> Result<Option<f64>> {
            let s = row.get(i).unwrap_or("");
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| Error::Format(format!("bad number `{s}`")))
            }
        };
        let need =
            |i: usize| num(i)?.ok_or_else(|| Error::Format(format!("missing `{}`", FIXED[i])));
        let mut lp_norms = Vec::new();
        for (i, p) in [(1, 2.0), (2, n), (3, f64::INFINITY)] {
            if let Some(v) = num(i)? {
                if !lp_norms.iter().any(|&(q, _)| q == p) {
                    lp_norms.push((p, v));
                }
            }
        }
        for (i, &p) in extra.iter().enumerate() {
            if let Some(v) = num(FIXED.len() + i)? {
                lp_norms.push((p, v));
            }
        }
        records.push(MonitorRecord {
            t: need(0)?,
            lp_norms,
            besov_m1: need(4)?,
            besov_dist_omega: num(5)?,
            kato_i: num(6)?,
            energy: need(7)?,
        });
    }
    Ok(records)
}
