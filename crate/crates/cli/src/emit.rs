//! Output envelope and deterministic emission.
//!
//! JSON is canonical: object keys sorted (value-tree construction goes
//! through a `BTreeMap`) and every float printed with 17 significant
//! digits, so identical runs emit identical bytes. CSV covers tabular
//! payloads only; the table format is for humans.

use qwalk_core::TolerancePolicy;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug)]
pub enum EmitError {
    FormatUnsupported(&'static str),
}

impl std::fmt::Display for EmitError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmitError::FormatUnsupported(cmd) => {
                write!(f, "csv output is only available for tabular payloads; `{cmd}` has none")
            }
        }
    }
}

#[derive(Serialize)]
pub struct OutputEnvelope {
    pub command: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub results: serde_json::Value,
    pub tolerances: TolerancePolicy,
    pub version: String,
    /// Omitted for `verify`, whose output must be byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

/// Human/table view of the results; `Rows` payloads are also CSV-able.
pub enum TableView {
    KeyValue(Vec<(String, String)>),
    Rows { headers: Vec<String>, rows: Vec<Vec<String>> },
    Sections(Vec<(String, TableView)>),
}

struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        // 17 significant digits round-trips every f64
        write!(writer, "{value:.16e}")
    }
}

/// Canonical JSON bytes of any serializable value.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // going through Value sorts object keys
    let tree = serde_json::to_value(value).expect("payloads contain only finite numbers");
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    tree.serialize(&mut ser).expect("value trees serialize");
    String::from_utf8(out).expect("json is utf-8")
}

/// Fixed float rendering used by CSV cells.
pub fn csv_float(value: f64) -> String {
    format!("{value:.16e}")
}

fn render_rows(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(cell.len());
            }
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: &[String], widths: &[usize]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths.get(i).copied().unwrap_or(0)))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    out.push_str(&fmt_row(headers, &widths));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1)));
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_row(row, &widths));
        out.push('\n');
    }
    out
}

fn render_view(view: &TableView) -> String {
    match view {
        TableView::KeyValue(pairs) => {
            let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let mut out = String::new();
            for (k, v) in pairs {
                out.push_str(&format!("{k:<width$}  {v}\n"));
            }
            out
        }
        TableView::Rows { headers, rows } => render_rows(headers, rows),
        TableView::Sections(sections) => {
            let mut out = String::new();
            for (title, inner) in sections {
                out.push_str(&format!("== {title}\n"));
                out.push_str(&render_view(inner));
                out.push('\n');
            }
            out
        }
    }
}

fn view_to_csv(view: &TableView) -> Option<String> {
    if let TableView::Rows { headers, rows } = view {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(headers).ok()?;
        for row in rows {
            writer.write_record(row).ok()?;
        }
        let bytes = writer.into_inner().ok()?;
        String::from_utf8(bytes).ok()
    } else {
        None
    }
}

/// Render the envelope in the requested format.
pub fn emit(
    envelope: &OutputEnvelope,
    format: Format,
    view: &TableView,
) -> Result<String, EmitError> {
    match format {
        Format::Json => Ok(to_canonical_json(envelope)),
        Format::Csv => view_to_csv(view).ok_or(EmitError::FormatUnsupported("this command")),
        Format::Table => Ok(render_view(view)),
    }
}
