//! Run directories: CSV tables, a JSON manifest and a gnuplot script.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{io, CliError};

/// 17 significant digits, enough to round-trip any double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct RunDir {
    pub path: PathBuf,
    files: Vec<String>,
    plots: Vec<String>,
    pub manifest: Map<String, Value>,
}

impl RunDir {
    pub fn create(path: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&path).map_err(|e| io(&path.display().to_string(), e))?;
        Ok(Self {
            path,
            files: Vec::new(),
            plots: Vec::new(),
            manifest: Map::new(),
        })
    }

    pub fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.manifest.insert(key.to_string(), value.into());
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
        let path = self.path.join(name);
        let ctx = path.display().to_string();
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&ctx, e))?;
        w.write_record(header).map_err(|e| io(&ctx, e))?;
        for row in rows {
            w.write_record(&row).map_err(|e| io(&ctx, e))?;
        }
        w.flush().map_err(|e| io(&ctx, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Adds a gnuplot `plot` command over columns of an emitted CSV.
    pub fn plot(&mut self, title: &str, file: &str, x: usize, ys: &[(usize, &str)], logscale: Option<&str>) {
        let mut s = format!("set title \"{title}\"\n");
        match logscale {
            Some(axes) => s.push_str(&format!("set logscale {axes}\n")),
            None => s.push_str("unset logscale\n"),
        }
        let series: Vec<String> = ys
            .iter()
            .map(|(col, label)| format!("'{file}' using {x}:{col} with lines title \"{label}\""))
            .collect();
        s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
        self.plots.push(s);
    }

    /// Writes `manifest.json` and, if any plot was requested, `plot.gp`.
    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        if !self.plots.is_empty() {
            let script = format!(
                "# gnuplot script; run from this directory\nset datafile separator \",\"\nset key autotitle columnhead\n\n{}",
                self.plots.join("pause -1\n\n")
            );
            let path = self.path.join("plot.gp");
            std::fs::write(&path, script).map_err(|e| io(&path.display().to_string(), e))?;
            self.files.push("plot.gp".into());
        }
        self.files.push("manifest.json".into());
        self.manifest.insert(
            "files".into(),
            Value::Array(self.files.iter().cloned().map(Value::String).collect()),
        );
        let path = self.path.join("manifest.json");
        let text = serde_json::to_string_pretty(&Value::Object(self.manifest)).map_err(|e| io("manifest", e))?;
        std::fs::write(&path, text + "\n").map_err(|e| io(&path.display().to_string(), e))?;
        Ok(self.path)
    }
}

pub fn relative(base: &Path, path: &Path) -> String {
    path.strip_prefix(base).unwrap_or(path).display().to_string()
}
