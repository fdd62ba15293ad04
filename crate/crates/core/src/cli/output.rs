use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::Result;
use crate::verify::{Record, Relation};

/// Writes every float as `d.dddddddddddddddde±x` (17 significant digits).
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_float(value))
    }
}

pub(crate) fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

/// Compact JSON with the fixed float format, newline terminated.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

fn relation_name(r: Relation) -> &'static str {
    match r {
        Relation::AtLeast => "at_least",
        Relation::AtMost => "at_most",
    }
}

/// One row per record: `case,relation,threshold,measured,pass,error`
/// followed by one column per supporting value key (sorted, empty when a
/// record lacks the key).
pub fn records_to_csv(records: &[Record]) -> Result<Vec<u8>> {
    let keys: BTreeSet<&str> = records.iter().flat_map(|r| r.values.keys().map(String::as_str)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["case", "relation", "threshold", "measured", "pass", "error"];
    header.extend(keys.iter().copied());
    w.write_record(&header).map_err(io::Error::from)?;
    for r in records {
        let mut row = vec![
            r.case.clone(),
            relation_name(r.relation).to_string(),
            format_float(r.threshold),
            format_float(r.measured),
            r.pass.to_string(),
            r.error.clone().unwrap_or_default(),
        ];
        row.extend(keys.iter().map(|k| r.values.get(*k).map(|v| format_float(*v)).unwrap_or_default()));
        w.write_record(&row).map_err(io::Error::from)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
