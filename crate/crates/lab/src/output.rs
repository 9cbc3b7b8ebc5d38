//! CSV tables and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{LabError, LabResult};

/// Comma-separated table with a header row. Values are printed in the
/// shortest form that reads back to the same `f64`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    body: String,
    rows: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            header: header.iter().map(|h| h.to_string()).collect(),
            body: String::new(),
            rows: 0,
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        self.push_cells(&cells);
    }

    /// A row whose first cell is a time.
    pub fn push_timed(&mut self, t: f64, values: &[f64]) {
        let mut cells = vec![format_time(t)];
        cells.extend(values.iter().map(|v| format_value(*v)));
        self.push_cells(&cells);
    }

    pub fn push_cells(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.header.len(), "row width must match the header");
        let _ = writeln!(self.body, "{}", cells.join(","));
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

/// Shortest scientific form that reads back to the same value.
pub fn format_value(v: f64) -> String {
    format!("{v:e}")
}

/// Times are multiples of the step; print them rounded to 1e-9.
pub fn format_time(t: f64) -> String {
    let r = (t * 1e9).round() / 1e9;
    format!("{r}")
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> LabResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        LabError::io(path, e)
    })
}

/// An output directory that remembers what it wrote, so a failed run can
/// remove its partial outputs.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn new(dir: impl Into<PathBuf>) -> LabResult<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| LabError::io(&dir, e))?;
        Ok(OutputDir {
            dir,
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> LabResult<PathBuf> {
        let path = self.path(name);
        write_atomic(&path, bytes)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_csv(&mut self, name: &str, csv: &Csv) -> LabResult<PathBuf> {
        self.write(name, csv.render().as_bytes())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Deletes every file written so far.
    pub fn discard(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}
