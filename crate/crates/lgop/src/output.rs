use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header plus preformatted rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

/// Where a command's CSV, JSON mirror and human summary go.
///
/// With `--out FILE` the CSV lands in `FILE`, the mirror in `FILE` with a
/// `.json` extension, and the summary on stdout. Without it stdout carries the
/// CSV (or the JSON when `--json` is set) and the summary moves to stderr.
#[derive(Debug, Clone, Default)]
pub struct Emitter {
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl Emitter {
    pub fn json_path(out: &Path) -> PathBuf {
        out.with_extension("json")
    }

    pub fn emit(&self, csv: &CsvTable, mirror: &impl Serialize, summary: &str) -> CliResult<()> {
        let csv = csv.to_bytes()?;
        let mut json = serde_json::to_vec_pretty(mirror)?;
        json.push(b'\n');
        match &self.out {
            Some(path) => {
                std::fs::write(path, &csv)?;
                if self.json {
                    std::fs::write(Self::json_path(path), &json)?;
                }
                print!("{summary}");
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(if self.json { &json } else { &csv })?;
                lock.flush()?;
                eprint!("{summary}");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 8.1252e-5, 6.02e23, -0.0, f64::MIN_POSITIVE, 3.364030000000001] {
            assert_eq!(fmt_real(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn csv_uses_plain_newlines() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(String::from_utf8(t.to_bytes().unwrap()).unwrap(), "a,b\n1,\"x,y\"\n");
    }
}
