//! Tables, their CSV/JSON encodings and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use tempfile::NamedTempFile;

use crate::config::Bindings;
use crate::error::{CliError, Result};

const SIGNIFICANT: usize = 12;

/// C-style `%.12g`.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_g(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Non-finite values become null.
            Cell::Num(x) => json!(x),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Which columns a plot script should draw, 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotHint {
    pub axes: Vec<usize>,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Absent for single-record outputs.
    pub plot: Option<PlotHint>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: Option<&str>) -> Result<Self> {
        match s.map(str::trim) {
            None | Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => Err(CliError::Config(format!(
                "unknown format `{other}` (csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Meta {
    pub command: &'static str,
    pub engine: Option<&'static str>,
    pub seed: Option<u64>,
}

pub fn render_csv(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn render_json(table: &Table, params: &Bindings, meta: &Meta) -> Result<Vec<u8>> {
    // The destination is not part of the computation.
    let params: Map<String, Value> = params
        .iter()
        .filter(|(k, _)| *k != "out")
        .map(|(k, v)| {
            let value = match v {
                [single] if k != "axis" => json!(single),
                many => json!(many),
            };
            (k.to_string(), value)
        })
        .collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            Value::Object(
                table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.clone(), cell.json()))
                    .collect(),
            )
        })
        .collect();
    let doc = json!({
        "params": params,
        "rows": rows,
        "meta": {
            "tool": "duplex",
            "version": env!("CARGO_PKG_VERSION"),
            "command": meta.command,
            "engine": meta.engine,
            "seed": meta.seed,
        },
    });
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn render(table: &Table, format: Format, params: &Bindings, meta: &Meta) -> Result<Vec<u8>> {
    match format {
        Format::Csv => render_csv(table),
        Format::Json => render_json(table, params, meta),
    }
}

/// gnuplot script drawing `hint` from the CSV file `data` in the same directory.
pub fn plot_script(table: &Table, hint: &PlotHint, data: &str) -> String {
    let label = |i: usize| table.columns[i - 1].replace('\'', "");
    let quoted = data.replace('\'', "''");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    match hint.axes[..] {
        [x] => {
            s.push_str(&format!("set xlabel '{}'\n", label(x)));
            s.push_str(&format!("set ylabel '{}'\n", label(hint.value)));
            s.push_str(&format!(
                "plot '{quoted}' using {x}:{} with lines\n",
                hint.value
            ));
        }
        [x, y, ..] => {
            s.push_str(&format!("set xlabel '{}'\n", label(x)));
            s.push_str(&format!("set ylabel '{}'\n", label(y)));
            s.push_str(&format!("set cblabel '{}'\n", label(hint.value)));
            s.push_str(&format!(
                "plot '{quoted}' using {x}:{y}:{} with image\n",
                hint.value
            ));
        }
        [] => {}
    }
    s
}

/// Where results go. File output is staged in a temporary file beside the
/// target so a failed run leaves nothing behind.
pub struct Destination {
    path: Option<PathBuf>,
    staged: Option<NamedTempFile>,
}

impl Destination {
    pub fn stdout() -> Self {
        Self {
            path: None,
            staged: None,
        }
    }

    /// Checks that the target directory is writable before any work is done.
    pub fn file(path: &Path) -> Result<Self> {
        if path.as_os_str().is_empty() || path.is_dir() {
            return Err(CliError::Config(format!(
                "output path `{}` is not a file",
                path.display()
            )));
        }
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let staged = NamedTempFile::new_in(dir)
            .map_err(|e| CliError::Config(format!("cannot write to `{}`: {e}", dir.display())))?;
        Ok(Self {
            path: Some(path.to_path_buf()),
            staged: Some(staged),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn commit(self, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
        match (self.path, self.staged) {
            (Some(path), Some(mut staged)) => {
                staged.write_all(bytes)?;
                staged.as_file().sync_all()?;
                staged.persist(&path).map_err(|e| CliError::Io(e.error))?;
            }
            _ => stdout.write_all(bytes)?,
        }
        Ok(())
    }
}
