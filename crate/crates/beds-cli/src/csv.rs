//! Deterministic CSV emission.
//!
//! Header row first, LF line endings, `.` decimal separator. Reals print
//! with 17 significant digits in scientific notation, which round-trips
//! every finite f64 bit-exactly.

use std::io::{self, Write};
use std::path::Path;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    U64(u64),
    I64(i64),
    F64(f64),
    Str(String),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::F64(v)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::U64(v)
    }
}

/// 17-significant-digit rendering; `parse::<f64>()` of the output returns
/// the identical bits for all finite inputs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_field(f: &Field) -> String {
    match f {
        Field::U64(v) => v.to_string(),
        Field::I64(v) => v.to_string(),
        Field::F64(v) => fmt_f64(*v),
        Field::Str(s) => s.clone(),
    }
}

/// Write `rows` under `header` to `path`. Row arity must match the header.
pub fn emit_csv(path: &Path, header: &[&str], rows: &[Vec<Field>]) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        assert_eq!(row.len(), header.len(), "row arity must match the header");
        let mut first = true;
        for field in row {
            if !first {
                out.push(',');
            }
            out.push_str(&render_field(field));
            first = false;
        }
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())
}
