//! CSV emission.
//!
//! All experiment outputs go through [`write_csv`]: comma separated, LF line
//! endings, `.` as decimal point and reals fixed to six decimals via
//! [`fmt_real`]. Row order is the order of the slice passed in.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use crate::error::{AcpError, Result};

/// A row type with a fixed column schema.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// Six-decimal fixed formatting; infinities print as `inf` / `-inf`.
pub fn fmt_real(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x.is_nan() {
        "nan".to_string()
    } else {
        let s = format!("{x:.6}");
        // -0.000000 and 0.000000 must print the same for byte-identical output.
        if s.trim_start_matches('-')
            .bytes()
            .all(|b| b == b'0' || b == b'.')
        {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    }
}

/// Serializes rows into an in-memory CSV document.
pub fn to_csv_bytes<R: CsvRecord>(rows: &[R]) -> Result<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(R::header())?;
    for row in rows {
        writer.write_record(row.fields())?;
    }
    writer
        .into_inner()
        .map_err(|e| AcpError::Csv(csv::Error::from(e.into_error())))
}

/// Writes `rows` to `path`, creating parent directories as needed. An empty
/// slice yields a header-only file.
pub fn write_csv<R: CsvRecord>(rows: &[R], path: &Path) -> Result<()> {
    let bytes = to_csv_bytes(rows)?;
    let io_err = |source| AcpError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    let mut file = File::create(path).map_err(io_err)?;
    file.write_all(&bytes).map_err(io_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Row(f64, bool);

    impl CsvRecord for Row {
        fn header() -> &'static [&'static str] {
            &["x", "flag"]
        }
        fn fields(&self) -> Vec<String> {
            vec![fmt_real(self.0), self.1.to_string()]
        }
    }

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(1.0), "1.000000");
        assert_eq!(fmt_real(-0.0), "0.000000");
        assert_eq!(fmt_real(-1e-9), "0.000000");
        assert_eq!(fmt_real(2.0 / 3.0), "0.666667");
        assert_eq!(fmt_real(f64::INFINITY), "inf");
    }

    #[test]
    fn empty_rows_give_header_only() {
        let bytes = to_csv_bytes::<Row>(&[]).unwrap();
        assert_eq!(bytes, b"x,flag\n");
    }

    #[test]
    fn rows_keep_order_and_use_lf() {
        let bytes = to_csv_bytes(&[Row(0.5, true), Row(1.25, false)]).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "x,flag\n0.500000,true\n1.250000,false\n"
        );
    }

    #[test]
    fn write_is_byte_identical_across_runs() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("nested/a.csv");
        let b = dir.path().join("nested/b.csv");
        let rows = [Row(0.1, true), Row(3.0, false)];
        write_csv(&rows, &a).unwrap();
        write_csv(&rows, &b).unwrap();
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"").unwrap();
        let err = write_csv(&[Row(1.0, true)], &blocker.join("x.csv")).unwrap_err();
        assert!(matches!(err, AcpError::Io { .. }));
    }
}
