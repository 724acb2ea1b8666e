//! Output directory, CSV and JSON writers, and the run manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Environment variable overriding the default output directory.
pub const OUT_ENV: &str = "DIRLAB_OUT";

/// Floats in CSV files: 17 significant digits, enough to round-trip.
pub fn csv_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV cell.
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(u64::from(v))
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => csv_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

/// Directory receiving the artifacts of one run.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> io::Result<()> {
        let mut w = csv::Writer::from_path(self.root.join(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> io::Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        fs::write(self.root.join(name), text + "\n")?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }
}

pub fn sha256_hex(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub dirlab: &'static str,
    pub dirlab_core: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Self { dirlab: env!("CARGO_PKG_VERSION"), dirlab_core: dirlab_core::VERSION }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub tol_newton: f64,
    pub gmres_tol: f64,
    pub gmres_floor: f64,
}

/// Everything needed to rerun: the canonical config, its hash and the seed.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub subcommand: String,
    pub config_sha256: String,
    pub config: String,
    pub seed: u64,
    pub versions: Versions,
    pub tolerances: Tolerances,
    pub exit_code: i32,
    pub outputs: Vec<String>,
    pub wall_ms: f64,
}
