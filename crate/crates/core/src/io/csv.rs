//! Diagnostics tables. Floats are written with 17 significant digits, so a
//! read-back reproduces every `f64` exactly; absent optional norms are empty fields.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{DiagnosticsSeries, Record};
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 19] = [
    "t",
    "mass",
    "momentum_x",
    "momentum_y",
    "momentum_z",
    "energy",
    "dissipation_rate",
    "cumulative_dissipation",
    "support_radius",
    "l1_norm",
    "l1_v_norm",
    "l2w_norm",
    "l2w_v_norm",
    "grad_x_l2nu",
    "grad_v_l2",
    "grad_v_l2w_v",
    "x_norm",
    "w11_norm",
    "boundary_mass",
];

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(r: &Record<f64>) -> String {
    let opt = |x: Option<f64>| x.map(format_f64).unwrap_or_default();
    let fields = [
        format_f64(r.t),
        format_f64(r.mass),
        format_f64(r.momentum[0]),
        format_f64(r.momentum[1]),
        format_f64(r.momentum[2]),
        format_f64(r.energy),
        format_f64(r.dissipation_rate),
        format_f64(r.cumulative_dissipation),
        format_f64(r.support_radius),
        format_f64(r.l1),
        format_f64(r.l1_v),
        opt(r.l2w),
        opt(r.l2w_v),
        opt(r.grad_x_l2nu),
        opt(r.grad_v_l2),
        opt(r.grad_v_l2w_v),
        opt(r.x_norm),
        opt(r.w11),
        opt(r.boundary_mass),
    ];
    fields.join(",")
}

/// Appends `series` to `path`, writing the header first when the file is new
/// or empty. An existing file with a different header is refused.
pub fn emit_csv(series: &DiagnosticsSeries<f64>, path: &Path) -> Result<()> {
    let header = CSV_COLUMNS.join(",");
    append_table(path, &header, series.records().iter().map(row))
}

/// Generic append-safe table writer shared by the study outputs.
pub fn append_table(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let io = |e| Error::io(path, e);
    let existing = match File::open(path) {
        Ok(f) => {
            let mut first = String::new();
            BufReader::new(f).read_line(&mut first).map_err(io)?;
            Some(first)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(io(e)),
    };
    let needs_header = match &existing {
        None => true,
        Some(first) if first.is_empty() => true,
        Some(first) if first.trim_end() == header => false,
        Some(first) => {
            return Err(Error::InvalidState(format!(
                "{} has a different header: {}",
                path.display(),
                first.trim_end()
            )))
        }
    };
    let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    if needs_header {
        writeln!(w, "{header}").map_err(io)?;
    }
    for r in rows {
        writeln!(w, "{r}").map_err(io)?;
    }
    w.flush().map_err(io)
}

fn parse_row(line: &str, lineno: usize) -> Result<Record<f64>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != CSV_COLUMNS.len() {
        return Err(Error::Parse {
            line: lineno,
            column: 1,
            message: format!("expected {} fields, found {}", CSV_COLUMNS.len(), fields.len()),
        });
    }
    let column_of = |i: usize| fields[..i].iter().map(|f| f.len() + 1).sum::<usize>() + 1;
    let num = |i: usize| -> Result<f64> {
        fields[i].parse().map_err(|_| Error::Parse {
            line: lineno,
            column: column_of(i),
            message: format!("bad value '{}' for {}", fields[i], CSV_COLUMNS[i]),
        })
    };
    let opt = |i: usize| -> Result<Option<f64>> {
        if fields[i].is_empty() {
            Ok(None)
        } else {
            num(i).map(Some)
        }
    };
    Ok(Record {
        t: num(0)?,
        mass: num(1)?,
        momentum: [num(2)?, num(3)?, num(4)?],
        energy: num(5)?,
        dissipation_rate: num(6)?,
        cumulative_dissipation: num(7)?,
        support_radius: num(8)?,
        l1: num(9)?,
        l1_v: num(10)?,
        l2w: opt(11)?,
        l2w_v: opt(12)?,
        grad_x_l2nu: opt(13)?,
        grad_v_l2: opt(14)?,
        grad_v_l2w_v: opt(15)?,
        x_norm: opt(16)?,
        w11: opt(17)?,
        boundary_mass: opt(18)?,
    })
}

/// Parses a file written by [`emit_csv`]. Appended runs restart the time axis,
/// so each header-delimited run is returned as its own series.
pub fn read_csv(path: &Path) -> Result<Vec<DiagnosticsSeries<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<Vec<DiagnosticsSeries<f64>>> {
    let header = CSV_COLUMNS.join(",");
    let mut out: Vec<DiagnosticsSeries<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if i == 0 {
            if line != header {
                return Err(Error::Parse {
                    line: 1,
                    column: 1,
                    message: "missing or unexpected header".into(),
                });
            }
            out.push(DiagnosticsSeries::new());
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let rec = parse_row(line, lineno)?;
        let current = out.last_mut().expect("header pushed a series");
        if current.last().is_some_and(|r| rec.t <= r.t) {
            out.push(DiagnosticsSeries::new());
        }
        out.last_mut().unwrap().push(rec)?;
    }
    Ok(out)
}
