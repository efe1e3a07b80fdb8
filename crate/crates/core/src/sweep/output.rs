//! CSV emission with a fixed, locale-free number format.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::sweep::config::SweepKind;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn flag(b: bool) -> String {
    if b {
        "1".into()
    } else {
        "0".into()
    }
}

pub fn header(kind: SweepKind) -> &'static [&'static str] {
    match kind {
        SweepKind::Fisher => &[
            "path_label",
            "beta",
            "phi",
            "k",
            "re_z",
            "im_z",
            "branch_n",
            "is_crossing",
            "status",
        ],
        SweepKind::Rate => &[
            "gamma0", "lambda0", "gammaf", "lambdaf", "beta", "phi", "n_sites", "t", "r_t",
            "is_cusp", "status",
        ],
        SweepKind::BetaCLine => &["x_param_name", "x_value", "beta_c", "status"],
        SweepKind::DqptArea => &[
            "x_value",
            "y_value",
            "beta_c_at_max_amplitude",
            "mx",
            "my",
            "mz",
            "in_dqpt_area",
            "status",
        ],
        SweepKind::Mz | SweepKind::OrderParam => &[
            "gamma",
            "lambda",
            "beta",
            "phi",
            "mz",
            "mx",
            "my",
            "r_used",
            "converged",
            "status",
        ],
    }
}

pub type Row = Vec<String>;

pub struct CsvSink {
    writer: csv::Writer<File>,
    rows: usize,
}

impl CsvSink {
    pub fn create(path: &Path, kind: SweepKind) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        writer.write_record(header(kind))?;
        Ok(Self { writer, rows: 0 })
    }

    pub fn write(&mut self, row: &Row) -> Result<()> {
        self.writer.write_record(row)?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> Result<usize> {
        self.writer.flush()?;
        Ok(self.rows)
    }
}

/// Writes `rows` under `header` to any writer, for outputs outside the sweep kinds.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Row]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(header)?;
    for r in rows {
        writer.write_record(r)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(0.5), "5.0000000000000000e-1");
        assert_eq!(float(f64::NAN), "NaN");
        assert_eq!(float(f64::INFINITY), "inf");
    }

    #[test]
    fn table_uses_newlines() {
        let mut buf = Vec::new();
        write_table(&mut buf, &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,2\n");
    }

    #[test]
    fn every_schema_ends_in_status() {
        for kind in [
            SweepKind::Fisher,
            SweepKind::Rate,
            SweepKind::Mz,
            SweepKind::OrderParam,
            SweepKind::BetaCLine,
            SweepKind::DqptArea,
        ] {
            assert_eq!(*header(kind).last().unwrap(), "status");
        }
    }
}
