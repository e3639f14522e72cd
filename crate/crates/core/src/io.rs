//! JSON file formats.
//!
//! - functions: `{"r","n","values":[[re,im],…]}` or, for Boolean
//!   functions, `{"r","n","ones":[index,…]}`
//! - spectra: `{"r","n","coeffs":[[re,im],…]}`
//! - vertex sets: `{"r","n","vertices":[[c1,…,cn],…]}`
//!
//! Floats are written in shortest round-trip form and parsed with correct
//! rounding, so save → load is bit-exact. Writes go through a temporary
//! file in the target directory and an atomic rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::grid::{BooleanFunction, GridFunction, GridShape, Point, Spectrum};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    r: usize,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ones: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumFile {
    r: usize,
    n: usize,
    coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexSetFile {
    r: usize,
    n: usize,
    vertices: Vec<Vec<usize>>,
}

/// A function file decodes to either form.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedFunction {
    Dense(GridFunction),
    Boolean(BooleanFunction),
}

impl LoadedFunction {
    pub fn function(&self) -> &GridFunction {
        match self {
            LoadedFunction::Dense(f) => f,
            LoadedFunction::Boolean(b) => b.function(),
        }
    }

    pub fn into_function(self) -> GridFunction {
        match self {
            LoadedFunction::Dense(f) => f,
            LoadedFunction::Boolean(b) => b.function().clone(),
        }
    }
}

fn to_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

pub fn parse_function(text: &str, cap: usize) -> Result<LoadedFunction> {
    decode_function(parse(text, Path::new("<input>"))?, cap)
}

fn decode_function(file: FunctionFile, cap: usize) -> Result<LoadedFunction> {
    let shape = GridShape::with_cap(file.r, file.n, cap)?;
    match (file.values, file.ones) {
        (Some(values), None) => Ok(LoadedFunction::Dense(GridFunction::new(shape, from_pairs(&values))?)),
        (None, Some(ones)) => Ok(LoadedFunction::Boolean(BooleanFunction::indicator(shape, &ones)?)),
        _ => Err(Error::validation("function file needs exactly one of \"values\" or \"ones\"")),
    }
}

pub fn load_function(path: &Path, cap: usize) -> Result<LoadedFunction> {
    decode_function(parse(&read(path)?, path)?, cap)
}

pub fn function_to_json(f: &GridFunction) -> String {
    let file = FunctionFile {
        r: f.shape().r(),
        n: f.shape().n(),
        values: Some(to_pairs(f.values())),
        ones: None,
    };
    serde_json::to_string(&file).expect("plain data serializes")
}

pub fn save_function(f: &GridFunction, path: &Path) -> Result<()> {
    write_atomic(path, function_to_json(f).as_bytes())
}

pub fn spectrum_to_json(spec: &Spectrum) -> String {
    let file = SpectrumFile {
        r: spec.shape().r(),
        n: spec.shape().n(),
        coeffs: to_pairs(spec.coeffs()),
    };
    serde_json::to_string(&file).expect("plain data serializes")
}

pub fn save_spectrum(spec: &Spectrum, path: &Path) -> Result<()> {
    write_atomic(path, spectrum_to_json(spec).as_bytes())
}

pub fn load_spectrum(path: &Path, cap: usize) -> Result<Spectrum> {
    let file: SpectrumFile = parse(&read(path)?, path)?;
    Spectrum::new(GridShape::with_cap(file.r, file.n, cap)?, from_pairs(&file.coeffs))
}

pub fn parse_vertex_set(text: &str, cap: usize) -> Result<VertexSet> {
    decode_vertex_set(parse(text, Path::new("<input>"))?, cap)
}

fn decode_vertex_set(file: VertexSetFile, cap: usize) -> Result<VertexSet> {
    let shape = GridShape::with_cap(file.r, file.n, cap)?;
    let points: Vec<Point> = file.vertices.into_iter().map(Point::new).collect();
    VertexSet::from_points(shape, &points)
}

pub fn load_vertex_set(path: &Path, cap: usize) -> Result<VertexSet> {
    decode_vertex_set(parse(&read(path)?, path)?, cap)
}

pub fn vertex_set_to_json(set: &VertexSet) -> String {
    let file = VertexSetFile {
        r: set.shape().r(),
        n: set.shape().n(),
        vertices: set.points().into_iter().map(|p| p.coords().to_vec()).collect(),
    };
    serde_json::to_string(&file).expect("plain data serializes")
}

pub fn save_vertex_set(set: &VertexSet, path: &Path) -> Result<()> {
    write_atomic(path, vertex_set_to_json(set).as_bytes())
}

/// Writes `bytes` to a temporary sibling of `path`, then renames it into
/// place. Nothing is left behind on failure.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
