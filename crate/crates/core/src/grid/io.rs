//! Container serialization and CSV export.
//!
//! The container is a self-describing JSON document holding the grid
//! metadata, the algebra dimension, the space tag and row-major complex
//! entries as `[re, im]` pairs. Dense operators reuse the same container
//! with `kind = "dense_operator"` and explicit row and column counts.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridFunction, SpaceTag, TorusGrid};
use crate::error::{Error, Result};

pub const CONTAINER_FORMAT: &str = "rieffel-grid/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainerKind {
    GridFunction,
    DenseOperator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Container {
    pub format: String,
    pub kind: ContainerKind,
    pub dim: usize,
    pub points: usize,
    pub length: f64,
    pub k: usize,
    pub space: SpaceTag,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl Container {
    pub fn from_function(f: &GridFunction) -> Self {
        let g = f.grid();
        Self {
            format: CONTAINER_FORMAT.to_string(),
            kind: ContainerKind::GridFunction,
            dim: g.dim(),
            points: g.points(),
            length: g.length(),
            k: f.k(),
            space: f.tag(),
            rows: g.len(),
            cols: f.k() * f.k(),
            entries: f.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dim, self.points, self.length)
    }

    pub fn complex_entries(&self) -> Vec<Complex64> {
        self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
    }

    pub fn to_function(&self) -> Result<GridFunction> {
        self.validate()?;
        if self.kind != ContainerKind::GridFunction {
            return Err(Error::Container(format!("expected a grid function, found {:?}", self.kind)));
        }
        GridFunction::from_raw(&self.grid()?, self.k, self.space, self.complex_entries())
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != CONTAINER_FORMAT {
            return Err(Error::Container(format!("unknown format tag {:?}", self.format)));
        }
        let grid = self.grid()?;
        let expected = match self.kind {
            ContainerKind::GridFunction => (grid.len(), self.k * self.k),
            ContainerKind::DenseOperator => {
                let d = grid.len() * self.k * self.k;
                (d, d)
            }
        };
        if (self.rows, self.cols) != expected {
            return Err(Error::Container(format!(
                "shape {}x{} does not match metadata (expected {}x{})",
                self.rows, self.cols, expected.0, expected.1
            )));
        }
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Container(format!(
                "{} entries for a {}x{} payload",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }
}

/// Write a container as JSON, atomically (temporary file plus rename).
pub fn write_container(path: &Path, container: &Container) -> Result<()> {
    let text = serde_json::to_string(container)?;
    write_atomic(path, text.as_bytes())
}

pub fn read_container(path: &Path) -> Result<Container> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let c: Container = serde_json::from_str(&text)?;
    c.validate()?;
    Ok(c)
}

/// CSV with one row per grid point: coordinates, then each entry as `re,im`.
pub fn function_csv(f: &GridFunction) -> String {
    let g = f.grid();
    let k = f.k();
    let mut out = String::new();
    let coord = match f.tag() {
        SpaceTag::Position => "x",
        SpaceTag::Frequency => "xi",
    };
    let mut header: Vec<String> = (0..g.dim()).map(|a| format!("{coord}{a}")).collect();
    for i in 0..k {
        for j in 0..k {
            header.push(format!("re_{i}{j}"));
            header.push(format!("im_{i}{j}"));
        }
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for p in 0..g.len() {
        let coords = match f.tag() {
            SpaceTag::Position => g.point(p),
            SpaceTag::Frequency => g.frequency(p),
        };
        let mut row: Vec<String> = coords.iter().map(|v| format!("{v:.17e}")).collect();
        for z in f.block(p) {
            row.push(format!("{:.17e}", z.re));
            row.push(format!("{:.17e}", z.im));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write bytes through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
