use super::{DofRow, ReportRow};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Measures written as `ndof value` plot files.
pub const PLOT_COLUMNS: [&str; 4] = ["delta_u", "delta_p", "eps_u", "eps_p"];

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Internal(format!("csv: {other:?}")),
    }
}

fn write_rows<R: serde::Serialize>(rows: &[R], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `results.csv` and one plot file per series and measure into `dir`; returns
/// the files written.
pub fn emit_outputs(rows: &[ReportRow], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join("results.csv");
    if rows.is_empty() {
        // keep the header so an empty run still yields a readable table
        std::fs::write(&csv_path, "family,h,k,scheme,ndof,delta_u,delta_p,eps_u,eps_p,maxdiv,slope_u,slope_p\n")?;
    } else {
        write_rows(rows, &csv_path)?;
    }
    let mut written = vec![csv_path];

    let mut series: BTreeMap<(String, String, usize), Vec<&ReportRow>> = BTreeMap::new();
    for r in rows {
        series.entry((r.family.clone(), r.scheme.clone(), r.k)).or_default().push(r);
    }
    for ((family, scheme, k), mut members) in series {
        members.sort_by(|a, b| a.ndof.cmp(&b.ndof).then(b.h.total_cmp(&a.h)));
        for col in PLOT_COLUMNS {
            let pick = |r: &ReportRow| match col {
                "delta_u" => r.delta_u,
                "delta_p" => r.delta_p,
                "eps_u" => r.eps_u,
                _ => r.eps_p,
            };
            if members.iter().all(|r| pick(r).is_none()) {
                continue;
            }
            let mut text = format!("# ndof {col}\n");
            for r in &members {
                if let Some(v) = pick(r) {
                    writeln!(text, "{} {v:e}", r.ndof).expect("writing to a string");
                }
            }
            let path = dir.join(format!("{family}_{scheme}_k{k}_{col}.dat"));
            std::fs::write(&path, text)?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn write_dof_table(rows: &[DofRow], path: impl AsRef<Path>) -> Result<()> {
    if let Some(parent) = path.as_ref().parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_rows(rows, path.as_ref())
}
