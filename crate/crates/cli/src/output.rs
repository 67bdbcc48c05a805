use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits in scientific notation. Parsing the text and
/// formatting it again reproduces the same bytes.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Minimal CSV builder: `,` separated, LF terminated, no quoting needed for
/// the numeric content written here.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self { buf }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.buf.push(',');
            }
            first = false;
            let _ = write!(self.buf, "{}", c.as_ref());
        }
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory and an atomic rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    let target = dir.join(name);
    let io = |e: std::io::Error| CliError::Io(format!("writing {}: {e}", target.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(&target).map_err(|e| io(e.error))?;
    log::info!("wrote {}", target.display());
    Ok(())
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("serializing {name}: {e}")))?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatted_floats_round_trip_bytewise() {
        for v in [
            0.0,
            1.0,
            -0.5,
            0.8627190000000001,
            1e-300,
            123456.789,
            f64::MIN_POSITIVE,
            -2.5e17,
        ] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
            assert_eq!(fmt_f64(back), s);
        }
    }

    #[test]
    fn csv_rows_are_lf_terminated() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(["1", "2"]);
        c.row(["3", ""]);
        assert_eq!(c.into_string(), "a,b\n1,2\n3,\n");
    }
}
