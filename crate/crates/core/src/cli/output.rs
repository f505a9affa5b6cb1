use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub(super) fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Header and records of a CSV document.
pub(super) fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: csv::Error| Error::Validation(format!("malformed CSV: {e}"));
    let header = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(bad)?;
    Ok((header, rows))
}

/// Writes to a temporary file next to `path`, then renames it into place.
pub(super) fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let perms = match std::fs::metadata(path) {
            Ok(m) => m.permissions(),
            Err(_) => std::fs::Permissions::from_mode(0o644),
        };
        tmp.as_file().set_permissions(perms)?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Shortest round-trip decimal, switching to exponent form outside `[1e-3, 1e16)`.
pub(super) fn float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-3..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Writes `text` to `path`, or to stdout without one.
pub(super) fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_short_and_exact() {
        for v in [0.0, 1.0, 0.1, 1.0 / 3.0, 6.2050967858961e-10, 2.5e-300, 1e20, -4.0e-7, f64::INFINITY] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(6.2050967858961e-10), "6.2050967858961e-10");
        assert_eq!(float(0.25), "0.25");
    }

    #[test]
    fn csv_round_trip_with_quoted_points() {
        let rows = vec![vec!["affine-left".to_string(), "0.5,2".to_string(), "0.1".to_string()]];
        let text = csv_text(&["space", "point", "value"], &rows).unwrap();
        assert_eq!(text, "space,point,value\naffine-left,\"0.5,2\",0.1\n");
        let (h, back) = read_csv(&text).unwrap();
        assert_eq!(h, ["space", "point", "value"]);
        assert_eq!(back, rows);
    }

    #[test]
    fn atomic_writes_replace_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a\n").unwrap();
        write_atomic(&path, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
