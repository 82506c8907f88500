//! File writers. Numbers in CSV files use 17 significant digits and `\n`
//! line endings so identical runs produce identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use optoswap::phasespace::WignerGrid;
use optoswap::CONVENTION;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Csv {
    header: Vec<&'static str>,
    body: String,
}

impl Csv {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            body: String::new(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.header
    }

    fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

pub fn wigner_csv(w: &WignerGrid<f64>) -> Csv {
    let mut csv = Csv::new(&["x", "p", "w"]);
    let n = w.n();
    for i in 0..n {
        for j in 0..n {
            csv.row(&[num(w.grid.coord(i)), num(w.grid.coord(j)), num(w.at(i, j))]);
        }
    }
    csv
}

/// Writes files under one output directory and records what was written.
pub struct Writer {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        f.write_all(contents.as_bytes())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Writes `<stem>.csv` and its `<stem>.json` metadata sidecar.
    pub fn csv(&mut self, stem: &str, csv: &Csv, meta: &Metadata) -> Result<(), CliError> {
        self.write(&format!("{stem}.csv"), &csv.render())?;
        let mut m = meta.value(csv.columns());
        m["file"] = json!(format!("{stem}.csv"));
        self.json(&format!("{stem}.json"), &m)
    }
}

/// Provenance embedded alongside every output file.
pub struct Metadata {
    pub experiment: &'static str,
    pub parameters: Value,
    pub seed: Option<u64>,
}

impl Metadata {
    pub fn value(&self, columns: &[&str]) -> Value {
        let mut v = json!({
            "experiment": self.experiment,
            "convention": CONVENTION,
            "generator": format!("optoswap {}", env!("CARGO_PKG_VERSION")),
            "parameters": self.parameters,
        });
        if !columns.is_empty() {
            v["columns"] = json!(columns);
        }
        if let Some(s) = self.seed {
            v["seed"] = json!(s);
        }
        v
    }
}
