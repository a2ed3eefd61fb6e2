//! CSV and JSON tables.

use crate::config::Observable;
use crate::error::{CliError, CliResult};
use crate::sweep::SweepResult;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec!["h0".to_string(), "h1".to_string()];
    header.extend(result.columns.iter().map(|c| c.name().to_string()));
    header.push("error".into());
    w.write_record(&header)?;
    for row in &result.rows {
        let mut record = vec![format_value(row.h0), format_value(row.h1)];
        record.extend(row.values.iter().map(|&v| format_value(v)));
        record.push(row.error.clone().unwrap_or_default());
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: "<csv>".into(),
        source: e,
    })?;
    Ok(())
}

pub fn write_csv_file(result: &SweepResult, path: &Path) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_csv(result, BufWriter::new(file))
}

/// A CSV table read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Observable>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub h0: f64,
    pub h1: f64,
    pub values: Vec<f64>,
    pub error: Option<String>,
}

impl Table {
    pub fn column(&self, obs: Observable) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|&c| c == obs)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }
}

pub fn read_csv<R: Read>(input: R) -> CliResult<Table> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    let bad = || CliError::Config(format!("unexpected csv header {names:?}"));
    if names.len() < 4 || names[..2] != ["h0", "h1"] || names[names.len() - 1] != "error" {
        return Err(bad());
    }
    let columns = names[2..names.len() - 1]
        .iter()
        .map(|n| Observable::from_name(n).ok_or_else(bad))
        .collect::<CliResult<Vec<_>>>()?;
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| CliError::Config(format!("bad number {s:?}: {e}")))
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let fields: Vec<&str> = record.iter().collect();
        let values = fields[2..fields.len() - 1]
            .iter()
            .map(|s| parse(s))
            .collect::<CliResult<Vec<_>>>()?;
        let error = fields[fields.len() - 1];
        rows.push(TableRow {
            h0: parse(fields[0])?,
            h1: parse(fields[1])?,
            values,
            error: (!error.is_empty()).then(|| error.to_string()),
        });
    }
    Ok(Table { columns, rows })
}

pub fn read_csv_file(path: &Path) -> CliResult<Table> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_csv(file)
}

pub fn write_json_file(result: &SweepResult, path: &Path) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, result)?;
    out.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    out.flush().map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SweepConfig;
    use crate::sweep::{SweepMetadata, SweepRow};

    fn result(values: Vec<Vec<f64>>) -> SweepResult {
        let cfg = SweepConfig::from_json(
            r#"{"beta": 1, "h0_range": [0, 1, 2], "h1_range": [0, 1, 2], "h2": 0,
                "outputs": ["mean_w", "mu4"]}"#,
        )
        .unwrap();
        let rows = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| SweepRow {
                h0: (i / 2) as f64,
                h1: (i % 2) as f64,
                error: v[0].is_nan().then(|| "gapless mode, \"p\"".to_string()),
                values: v,
            })
            .collect();
        SweepResult {
            columns: cfg.columns(),
            h0_values: vec![0.0, 1.0],
            h1_values: vec![0.0, 1.0],
            rows,
            metadata: SweepMetadata {
                config: cfg,
                version: "0".into(),
                threads: 1,
                wall_time_s: 0.0,
            },
        }
    }

    #[test]
    fn csv_round_trips_bit_exactly() {
        let vals = vec![
            vec![0.1 + 0.2, -1.0 / 3.0],
            vec![f64::MIN_POSITIVE, 1e300],
            vec![-0.0, std::f64::consts::PI],
            vec![f64::NAN, f64::NAN],
        ];
        let res = result(vals.clone());
        let mut buf = Vec::new();
        write_csv(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("h0,h1,mean_w,mu4,error\n"));
        assert!(!text.contains('\r'));
        let table = read_csv(buf.as_slice()).unwrap();
        assert_eq!(table.columns, res.columns);
        for (row, want) in table.rows.iter().zip(&vals) {
            for (a, b) in row.values.iter().zip(want) {
                assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
            }
        }
        assert_eq!(table.rows[3].error.as_deref(), Some("gapless mode, \"p\""));
        assert!(table.rows[0].error.is_none());
    }

    #[test]
    fn rejects_foreign_headers() {
        assert!(read_csv("a,b,c\n1,2,3\n".as_bytes()).is_err());
        assert!(read_csv("h0,h1,speed,error\n1,2,3,\n".as_bytes()).is_err());
    }
}
