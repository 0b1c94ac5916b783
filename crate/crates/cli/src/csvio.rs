//! CSV reading and writing. Floats are written with 17 significant digits
//! so every value parses back to the same `f64`.

use std::io::Write;
use std::path::Path;

use sweep_core::{Grid, SamplePath, SweepingRun};

use crate::error::CliError;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `# line` per metadata entry, then the CSV body.
pub fn render(metadata: &[String], header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Vec<u8> {
    let mut out = Vec::new();
    for line in metadata {
        writeln!(out, "# {line}").expect("write to memory");
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(row.into_iter().map(fmt_f64)).expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

/// Rows `t, X_1..X_e, H_1..H_e, Y_1..Y_e`.
pub fn render_run(run: &SweepingRun, metadata: &[String]) -> Vec<u8> {
    let e = run.x.dim();
    let mut header = vec!["t".to_string()];
    for prefix in ["X", "H", "Y"] {
        header.extend((1..=e).map(|i| format!("{prefix}{i}")));
    }
    let times = run.grid().times();
    let rows = (0..times.len()).map(|k| {
        let mut row = Vec::with_capacity(1 + 3 * e);
        row.push(times[k]);
        row.extend_from_slice(run.x.at(k));
        row.extend_from_slice(run.h.at(k));
        row.extend_from_slice(run.y.at(k));
        row
    });
    render(metadata, &header, rows)
}

/// Rows `t, <prefix>1..<prefix>d`.
pub fn render_path(path: &SamplePath, prefix: &str, metadata: &[String]) -> Vec<u8> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=path.dim()).map(|i| format!("{prefix}{i}")));
    let rows = path.grid().times().iter().zip(path.points()).map(|(t, p)| {
        let mut row = vec![*t];
        row.extend_from_slice(p);
        row
    });
    render(metadata, &header, rows)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |source| CliError::Output { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(fail)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Parsed CSV: header names and numeric rows. `#` lines are skipped and
/// empty cells read as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Input { path: path.to_path_buf(), source })?;
    parse_table(&bytes).map_err(|message| CliError::Parse { path: path.to_path_buf(), message })
}

pub fn parse_table(bytes: &[u8]) -> Result<Table, String> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(bytes);
    let header: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let row = record
            .iter()
            .map(|s| match s {
                "" => Ok(f64::NAN),
                s => s.parse::<f64>().map_err(|_| format!("row {}: {s:?} is not a number", i + 1)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no data rows".into());
    }
    Ok(Table { header, rows })
}

/// Selected columns as a path. The grid is the `t` column when present and
/// `0, 1, 2, ...` otherwise. Without `columns`, every non-`t` column is used.
pub fn table_path(table: &Table, columns: Option<&[String]>) -> Result<SamplePath, String> {
    let t_col = table.column("t");
    let idx: Vec<usize> = match columns {
        Some(names) => names
            .iter()
            .map(|c| table.column(c).ok_or_else(|| format!("no column named {c:?}")))
            .collect::<Result<_, _>>()?,
        None => (0..table.header.len()).filter(|&i| Some(i) != t_col).collect(),
    };
    if idx.is_empty() {
        return Err("no value columns".into());
    }
    let times: Vec<f64> = match t_col {
        Some(c) => table.rows.iter().map(|r| r[c]).collect(),
        None => (0..table.rows.len()).map(|k| k as f64).collect(),
    };
    let grid = Grid::new(times).map_err(|e| e.to_string())?;
    let values = table.rows.iter().flat_map(|r| idx.iter().map(move |&i| r[i])).collect();
    SamplePath::new(grid, idx.len(), values).map_err(|e| e.to_string())
}

pub fn read_path(path: &Path, columns: Option<&[String]>) -> Result<SamplePath, CliError> {
    let table = read_table(path)?;
    table_path(&table, columns).map_err(|message| CliError::Parse { path: path.to_path_buf(), message })
}

/// Body of a rendered file with the `#` metadata lines removed.
pub fn body(bytes: &[u8]) -> Vec<u8> {
    bytes.split_inclusive(|&b| b == b'\n').filter(|l| !l.starts_with(b"#")).flatten().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0, -0.0] {
            let back: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
        }
    }

    #[test]
    fn path_round_trip() {
        let grid = Grid::uniform(1.0, 7).unwrap();
        let p = SamplePath::from_fn(grid, 2, |t, out| {
            out[0] = (3.0 * t).sin();
            out[1] = t / 3.0;
        });
        let bytes = render_path(&p, "B", &["note=1".into()]);
        let table = parse_table(&bytes).unwrap();
        assert_eq!(table.header, ["t", "B1", "B2"]);
        let back = table_path(&table, None).unwrap();
        assert_eq!(back, p);
        let one = table_path(&table, Some(&["B2".to_string()])).unwrap();
        assert_eq!(one.values(), p.select(&[1]).unwrap().values());
    }

    #[test]
    fn missing_t_uses_index_grid() {
        let table = parse_table(b"x\n0\n1\n0\n").unwrap();
        let p = table_path(&table, None).unwrap();
        assert_eq!(p.grid().times(), [0.0, 1.0, 2.0]);
        assert_eq!(p.values(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn parse_failures() {
        assert!(parse_table(b"x\n").is_err());
        assert!(parse_table(b"x\nabc\n").is_err());
        assert!(parse_table(b"x,y\n1\n").is_err());
        let table = parse_table(b"t,x\n0,1\n1,2\n").unwrap();
        assert!(table_path(&table, Some(&["z".to_string()])).is_err());
    }

    #[test]
    fn body_strips_metadata() {
        assert_eq!(body(b"# a\nt,x\n# b\n0,1\n"), b"t,x\n0,1\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
