//! JSON file formats for designs, POVMs, and states.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested
//! arrays. Writers emit full double precision (shortest round-trip decimal);
//! readers ignore unknown fields, so files may carry a `meta` block with the
//! tool version, seed, and resolved configuration.

use std::path::Path;

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::designs::WeightedDesign;
use crate::error::{Error, Result};
use crate::linops::Operator;
use crate::povm::DiscretePOVM;

/// Provenance block embedded in files written by the tools.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileMeta {
    pub tool: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub config: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct DesignFile {
    dim: usize,
    points: Vec<Vec<[f64; 2]>>,
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<FileMeta>,
}

#[derive(Serialize, Deserialize)]
struct PovmFile {
    dim: usize,
    labels: Vec<String>,
    elements: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<FileMeta>,
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    dim: usize,
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<FileMeta>,
}

fn vector_to_json(v: &Array1<Complex64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn vector_from_json(dim: usize, raw: &[[f64; 2]]) -> Result<Array1<Complex64>> {
    if raw.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "vector has {} entries, expected {dim}",
            raw.len()
        )));
    }
    Ok(raw.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
}

fn matrix_to_json(op: &Operator) -> Vec<Vec<[f64; 2]>> {
    let d = op.dim();
    (0..d)
        .map(|i| (0..d).map(|j| [op[(i, j)].re, op[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_json(dim: usize, raw: &[Vec<[f64; 2]>]) -> Result<Operator> {
    if raw.len() != dim || raw.iter().any(|row| row.len() != dim) {
        return Err(Error::InvalidArgument(format!(
            "matrix is not {dim}×{dim}"
        )));
    }
    Operator::new(ndarray::Array2::from_shape_fn((dim, dim), |(i, j)| {
        Complex64::new(raw[i][j][0], raw[i][j][1])
    }))
}

// ---------------------------------------------------------------------------
// Designs
// ---------------------------------------------------------------------------

pub fn design_to_json(design: &WeightedDesign, meta: Option<FileMeta>) -> String {
    let file = DesignFile {
        dim: design.dim(),
        points: design.points().iter().map(vector_to_json).collect(),
        weights: design.weights().to_vec(),
        meta,
    };
    serde_json::to_string_pretty(&file).expect("design serializes")
}

/// Parses a design file; points are renormalized and the weights rescaled
/// before validation.
pub fn design_from_json(text: &str) -> Result<WeightedDesign> {
    let file: DesignFile = serde_json::from_str(text)?;
    let points = file
        .points
        .iter()
        .map(|p| vector_from_json(file.dim, p))
        .collect::<Result<Vec<_>>>()?;
    WeightedDesign::normalized(file.dim, points, file.weights)
}

pub fn write_design(
    path: impl AsRef<Path>,
    design: &WeightedDesign,
    meta: Option<FileMeta>,
) -> Result<()> {
    std::fs::write(path, design_to_json(design, meta))?;
    Ok(())
}

pub fn read_design(path: impl AsRef<Path>) -> Result<WeightedDesign> {
    design_from_json(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// POVMs
// ---------------------------------------------------------------------------

pub fn povm_to_json(povm: &DiscretePOVM, meta: Option<FileMeta>) -> String {
    let file = PovmFile {
        dim: povm.dim(),
        labels: povm.labels().to_vec(),
        elements: povm.elements().iter().map(matrix_to_json).collect(),
        meta,
    };
    serde_json::to_string_pretty(&file).expect("povm serializes")
}

/// Parses a POVM file without enforcing positivity or normalization, so
/// diagnostics can run on any well-formed candidate.
pub fn povm_from_json(text: &str) -> Result<DiscretePOVM> {
    let file: PovmFile = serde_json::from_str(text)?;
    let elements = file
        .elements
        .iter()
        .map(|e| matrix_from_json(file.dim, e))
        .collect::<Result<Vec<_>>>()?;
    let labels = if file.labels.is_empty() {
        (0..elements.len()).map(|k| k.to_string()).collect()
    } else {
        file.labels
    };
    DiscretePOVM::new_unchecked(file.dim, elements, labels)
}

/// Parses a POVM file and enforces the POVM invariants.
pub fn povm_from_json_validated(text: &str) -> Result<DiscretePOVM> {
    let povm = povm_from_json(text)?;
    let diag = povm.validate(crate::tol::POVM_SUM);
    if !diag.pass {
        return Err(Error::InvalidPovm(format!(
            "file failed validation: sum residual {:.3e}",
            diag.sum_residual
        )));
    }
    Ok(povm)
}

pub fn write_povm(
    path: impl AsRef<Path>,
    povm: &DiscretePOVM,
    meta: Option<FileMeta>,
) -> Result<()> {
    std::fs::write(path, povm_to_json(povm, meta))?;
    Ok(())
}

pub fn read_povm(path: impl AsRef<Path>) -> Result<DiscretePOVM> {
    povm_from_json(&std::fs::read_to_string(path)?)
}

pub fn read_povm_validated(path: impl AsRef<Path>) -> Result<DiscretePOVM> {
    povm_from_json_validated(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

pub fn state_to_json(state: &Operator, meta: Option<FileMeta>) -> String {
    let file = StateFile {
        dim: state.dim(),
        matrix: matrix_to_json(state),
        meta,
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

/// Parses a density-matrix file and validates it as a state.
pub fn state_from_json(text: &str) -> Result<Operator> {
    let file: StateFile = serde_json::from_str(text)?;
    let op = matrix_from_json(file.dim, &file.matrix)?;
    crate::tomo::validate_density(&op)?;
    Ok(op)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<Operator> {
    state_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_state(
    path: impl AsRef<Path>,
    state: &Operator,
    meta: Option<FileMeta>,
) -> Result<()> {
    std::fs::write(path, state_to_json(state, meta))?;
    Ok(())
}

// ---------------------------------------------------------------------------
