//! Order-2 and order-3 tensors for the exact (tensor product) backend.

use crate::error::{Error, Result};
use crate::hypervector::{check_dims, HyperVector};

/// Row-major matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension(rows.min(cols), 1));
        }
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "DenseMatrix::new",
                detail: format!("{rows}x{cols} needs {} entries, got {}", rows * cols, entries.len()),
            });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch {
                op: "DenseMatrix::from_rows",
                detail: "ragged rows".into(),
            });
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch {
                op,
                detail: format!(
                    "{}x{} vs {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(1.0, other)
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, factor: f64, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "matrix add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Row-major flattening as a vector of length `rows * cols`.
    pub fn flatten(&self) -> HyperVector {
        HyperVector::from_raw(self.entries.clone())
    }
}

/// Order-3 tensor with entries stored in `(i, j, k)` row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Order3Tensor {
    dims: [usize; 3],
    entries: Vec<f64>,
}

impl Order3Tensor {
    pub fn new(d1: usize, d2: usize, d3: usize, entries: Vec<f64>) -> Result<Self> {
        if d1 == 0 || d2 == 0 || d3 == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        if entries.len() != d1 * d2 * d3 {
            return Err(Error::ShapeMismatch {
                op: "Order3Tensor::new",
                detail: format!(
                    "{d1}x{d2}x{d3} needs {} entries, got {}",
                    d1 * d2 * d3,
                    entries.len()
                ),
            });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("order-3 tensor"));
        }
        Ok(Self {
            dims: [d1, d2, d3],
            entries,
        })
    }

    pub fn zeros(d1: usize, d2: usize, d3: usize) -> Result<Self> {
        Self::new(d1, d2, d3, vec![0.0; d1 * d2 * d3])
    }

    /// `a ⊗ b ⊗ c`
    pub fn outer3(a: &HyperVector, b: &HyperVector, c: &HyperVector) -> Self {
        let mut entries = Vec::with_capacity(a.dim() * b.dim() * c.dim());
        for &x in a.as_slice() {
            for &y in b.as_slice() {
                for &z in c.as_slice() {
                    entries.push(x * y * z);
                }
            }
        }
        Self {
            dims: [a.dim(), b.dim(), c.dim()],
            entries,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let [_, d2, d3] = self.dims;
        self.entries[(i * d2 + j) * d3 + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(1.0, other)
    }

    pub fn add_scaled(&self, factor: f64, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch {
                op: "tensor add",
                detail: format!("{:?} vs {:?}", self.dims, other.dims),
            });
        }
        Ok(Self {
            dims: self.dims,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dims: self.dims,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn flatten(&self) -> HyperVector {
        HyperVector::from_raw(self.entries.clone())
    }
}

/// Representation of a word or encoded structure under either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Vector(HyperVector),
    Matrix(DenseMatrix),
    Order3(Order3Tensor),
}

impl Payload {
    pub fn shape(&self) -> Vec<usize> {
        match self {
            Payload::Vector(v) => vec![v.dim()],
            Payload::Matrix(m) => vec![m.rows(), m.cols()],
            Payload::Order3(t) => t.dims().to_vec(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Vector(_) => "vector",
            Payload::Matrix(_) => "matrix",
            Payload::Order3(_) => "order-3 tensor",
        }
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        match self {
            Payload::Vector(v) => v.as_slice(),
            Payload::Matrix(m) => m.as_slice(),
            Payload::Order3(t) => t.as_slice(),
        }
    }

    pub fn from_shape(shape: &[usize], values: Vec<f64>) -> Result<Self> {
        match *shape {
            [_] if values.len() == shape[0] => Ok(Payload::Vector(HyperVector::new(values)?)),
            [r, c] => Ok(Payload::Matrix(DenseMatrix::new(r, c, values)?)),
            [a, b, c] => Ok(Payload::Order3(Order3Tensor::new(a, b, c, values)?)),
            _ => Err(Error::ShapeMismatch {
                op: "Payload::from_shape",
                detail: format!("shape {shape:?} with {} values", values.len()),
            }),
        }
    }

    pub fn flatten(&self) -> HyperVector {
        HyperVector::from_raw(self.values().to_vec())
    }

    pub fn norm(&self) -> f64 {
        self.values().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: f64) -> Self {
        match self {
            Payload::Vector(v) => Payload::Vector(v.scale(factor)),
            Payload::Matrix(m) => Payload::Matrix(m.scale(factor)),
            Payload::Order3(t) => Payload::Order3(t.scale(factor)),
        }
    }

    /// `self + factor * other`; both sides must have the same shape.
    pub fn add_scaled(&self, factor: f64, other: &Self) -> Result<Self> {
        match (self, other) {
            (Payload::Vector(a), Payload::Vector(b)) => Ok(Payload::Vector(a.add_scaled(factor, b)?)),
            (Payload::Matrix(a), Payload::Matrix(b)) => Ok(Payload::Matrix(a.add_scaled(factor, b)?)),
            (Payload::Order3(a), Payload::Order3(b)) => Ok(Payload::Order3(a.add_scaled(factor, b)?)),
            _ => Err(Error::ShapeMismatch {
                op: "payload add",
                detail: format!("{} vs {}", self.kind(), other.kind()),
            }),
        }
    }

    /// Euclidean distance between flattened payloads of equal shape.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(other.add_scaled(-1.0, self)?.norm())
    }

    pub fn as_vector(&self) -> Option<&HyperVector> {
        match self {
            Payload::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&DenseMatrix> {
        match self {
            Payload::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_order3(&self) -> Option<&Order3Tensor> {
        match self {
            Payload::Order3(t) => Some(t),
            _ => None,
        }
    }
}

/// `M_ij = a_i · b_j`
pub fn outer(a: &HyperVector, b: &HyperVector) -> DenseMatrix {
    let mut entries = Vec::with_capacity(a.dim() * b.dim());
    for &x in a.as_slice() {
        entries.extend(b.as_slice().iter().map(|&y| x * y));
    }
    DenseMatrix {
        rows: a.dim(),
        cols: b.dim(),
        entries,
    }
}

pub fn matvec(m: &DenseMatrix, v: &HyperVector) -> Result<HyperVector> {
    check_dims("matvec", m.cols, v.dim())?;
    let x = v.as_slice();
    Ok(HyperVector::from_raw(
        (0..m.rows)
            .map(|i| m.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect(),
    ))
}

/// `Mᵀ v` without materializing the transpose.
pub fn matvec_transpose(m: &DenseMatrix, v: &HyperVector) -> Result<HyperVector> {
    check_dims("matvec_transpose", m.rows, v.dim())?;
    let mut out = vec![0.0; m.cols];
    for (i, &vi) in v.as_slice().iter().enumerate() {
        for (o, &a) in out.iter_mut().zip(m.row(i)) {
            *o += a * vi;
        }
    }
    Ok(HyperVector::from_raw(out))
}

/// Result of [`contract3`]: a matrix when one side is contracted, a vector
/// when both are.
#[derive(Debug, Clone, PartialEq)]
pub enum Contraction {
    Matrix(DenseMatrix),
    Vector(HyperVector),
}

/// Contract index 1 of `t` with `left` and/or index 3 with `right`.
///
/// * left only: `M_jk = Σ_i t_ijk left_i`
/// * right only: `M_ij = Σ_k t_ijk right_k`
/// * both: `s_j = Σ_ik t_ijk left_i right_k`
pub fn contract3(
    t: &Order3Tensor,
    left: Option<&HyperVector>,
    right: Option<&HyperVector>,
) -> Result<Contraction> {
    let [d1, d2, d3] = t.dims;
    if let Some(l) = left {
        check_dims("contract3 (left)", d1, l.dim())?;
    }
    if let Some(r) = right {
        check_dims("contract3 (right)", d3, r.dim())?;
    }
    match (left, right) {
        (None, None) => Err(Error::InvalidArgument(
            "contract3 needs at least one vector".into(),
        )),
        (Some(l), None) => {
            let mut out = vec![0.0; d2 * d3];
            for (i, &li) in l.as_slice().iter().enumerate() {
                let slab = &t.entries[i * d2 * d3..(i + 1) * d2 * d3];
                for (o, &x) in out.iter_mut().zip(slab) {
                    *o += li * x;
                }
            }
            Ok(Contraction::Matrix(DenseMatrix::new(d2, d3, out)?))
        }
        (None, Some(r)) => {
            let rv = r.as_slice();
            let out = t
                .entries
                .chunks_exact(d3)
                .map(|fiber| fiber.iter().zip(rv).map(|(a, b)| a * b).sum())
                .collect();
            Ok(Contraction::Matrix(DenseMatrix::new(d1, d2, out)?))
        }
        (Some(l), Some(r)) => {
            let rv = r.as_slice();
            let mut out = vec![0.0; d2];
            for (i, &li) in l.as_slice().iter().enumerate() {
                for (j, o) in out.iter_mut().enumerate() {
                    let fiber = &t.entries[(i * d2 + j) * d3..(i * d2 + j + 1) * d3];
                    let s: f64 = fiber.iter().zip(rv).map(|(a, b)| a * b).sum();
                    *o += li * s;
                }
            }
            Ok(Contraction::Vector(HyperVector::from_raw(out)))
        }
    }
}
