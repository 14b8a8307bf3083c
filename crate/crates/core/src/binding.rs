//! Role-filler encoding and unbinding under the tensor or holographic backend.
//!
//! A structure `{(r_i, f_i)}` is encoded with the filler on the output side:
//! `Σ_i f_i ⊗ r_i` (a `filler_dim × role_dim` matrix) under
//! [`BindingBackend::Tensor`], or `Σ_i f_i ⊛ r_i` under [`BindingBackend::Hrr`].
//! Unbinding with a role cue therefore returns a filler. The complementary
//! extraction, filler cue to role, is [`unbind_complement`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypervector::{check_dims, circ_conv, circ_corr, HyperVector};
use crate::tensor::{matvec, matvec_transpose, outer, DenseMatrix, Payload};

/// Gram matrices with a larger 2-norm condition estimate are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BackendRepr", into = "BackendRepr")]
pub enum BindingBackend {
    /// Exact tensor product binding, contraction unbinding.
    Tensor,
    /// Circular convolution binding and correlation unbinding in `dim` dimensions.
    Hrr { dim: usize },
}

impl BindingBackend {
    pub fn hrr(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim, 2));
        }
        Ok(BindingBackend::Hrr { dim })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BindingBackend::Tensor => "tensor",
            BindingBackend::Hrr { .. } => "hrr",
        }
    }

    pub fn is_tensor(&self) -> bool {
        matches!(self, BindingBackend::Tensor)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum BackendRepr {
    Tensor,
    Hrr { dim: usize },
}

impl TryFrom<BackendRepr> for BindingBackend {
    type Error = Error;

    fn try_from(r: BackendRepr) -> Result<Self> {
        match r {
            BackendRepr::Tensor => Ok(BindingBackend::Tensor),
            BackendRepr::Hrr { dim } => BindingBackend::hrr(dim),
        }
    }
}

impl From<BindingBackend> for BackendRepr {
    fn from(b: BindingBackend) -> Self {
        match b {
            BindingBackend::Tensor => BackendRepr::Tensor,
            BindingBackend::Hrr { dim } => BackendRepr::Hrr { dim },
        }
    }
}

/// Ordered, non-empty list of `(role, filler)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleFillerStructure {
    pairs: Vec<(HyperVector, HyperVector)>,
}

impl RoleFillerStructure {
    pub fn new(pairs: Vec<(HyperVector, HyperVector)>) -> Result<Self> {
        let Some((r0, f0)) = pairs.first() else {
            return Err(Error::EmptyStructure);
        };
        let (rd, fd) = (r0.dim(), f0.dim());
        for (r, f) in &pairs {
            check_dims("role-filler structure (role)", rd, r.dim())?;
            check_dims("role-filler structure (filler)", fd, f.dim())?;
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(HyperVector, HyperVector)] {
        &self.pairs
    }

    pub fn role_dim(&self) -> usize {
        self.pairs[0].0.dim()
    }

    pub fn filler_dim(&self) -> usize {
        self.pairs[0].1.dim()
    }

    pub fn reversed(&self) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.reverse();
        Self { pairs }
    }
}

/// Bind a single filler to a role.
pub fn bind(filler: &HyperVector, role: &HyperVector, backend: BindingBackend) -> Result<Payload> {
    match backend {
        BindingBackend::Tensor => Ok(Payload::Matrix(outer(filler, role))),
        BindingBackend::Hrr { dim } => {
            check_dims("bind (filler)", dim, filler.dim())?;
            check_dims("bind (role)", dim, role.dim())?;
            Ok(Payload::Vector(circ_conv(filler, role)?))
        }
    }
}

/// `Σ_i f_i ⊗ r_i` (Tensor) or `Σ_i f_i ⊛ r_i` (Hrr).
pub fn encode(structure: &RoleFillerStructure, backend: BindingBackend) -> Result<Payload> {
    let mut terms = structure.pairs.iter().map(|(r, f)| bind(f, r, backend));
    let first = terms.next().ok_or(Error::EmptyStructure)??;
    terms.try_fold(first, |acc, term| acc.add_scaled(1.0, &term?))
}

/// Unbind with a role-side cue: `M · cue` (Tensor) or `trace ⊘ cue` (Hrr).
pub fn unbind(encoded: &Payload, cue: &HyperVector, backend: BindingBackend) -> Result<HyperVector> {
    match (backend, encoded) {
        (BindingBackend::Tensor, Payload::Matrix(m)) => matvec(m, cue),
        (BindingBackend::Hrr { dim }, Payload::Vector(trace)) => {
            check_dims("unbind", dim, trace.dim())?;
            circ_corr(trace, cue)
        }
        _ => Err(backend_mismatch("unbind", backend, encoded)),
    }
}

/// Unbind with a filler-side cue, recovering the role factor:
/// `Mᵀ · cue` (Tensor) or `trace ⊘ cue` (Hrr, where binding commutes).
pub fn unbind_complement(
    encoded: &Payload,
    cue: &HyperVector,
    backend: BindingBackend,
) -> Result<HyperVector> {
    match (backend, encoded) {
        (BindingBackend::Tensor, Payload::Matrix(m)) => matvec_transpose(m, cue),
        (BindingBackend::Hrr { .. }, Payload::Vector(_)) => unbind(encoded, cue, backend),
        _ => Err(backend_mismatch("unbind_complement", backend, encoded)),
    }
}

pub(crate) fn backend_mismatch(op: &'static str, backend: BindingBackend, p: &Payload) -> Error {
    Error::ShapeMismatch {
        op,
        detail: format!("{} payload under {} backend", p.kind(), backend.name()),
    }
}

/// Role vectors together with their unbinding (dual) vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct UnbindingBasis {
    roles: Vec<HyperVector>,
    duals: Vec<HyperVector>,
    condition: f64,
}

impl UnbindingBasis {
    pub fn roles(&self) -> &[HyperVector] {
        &self.roles
    }

    pub fn duals(&self) -> &[HyperVector] {
        &self.duals
    }

    /// 2-norm condition number of the role Gram matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Largest `|⟨r_i, u_j⟩ − δ_ij|`.
    pub fn biorthogonality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, r) in self.roles.iter().enumerate() {
            for (j, u) in self.duals.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = r.dot(u).expect("dims checked at construction");
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }
}

/// Dual vectors `u_j` with `⟨r_i, u_j⟩ = δ_ij`, lying in the span of the roles.
///
/// With `G_ij = ⟨r_i, r_j⟩`, the duals are `u_j = Σ_m (G⁻¹)_jm r_m`.
pub fn dual_basis(roles: &[HyperVector]) -> Result<UnbindingBasis> {
    let first = roles
        .first()
        .ok_or_else(|| Error::InvalidArgument("dual_basis needs at least one role".into()))?;
    let dim = first.dim();
    for r in roles {
        check_dims("dual_basis", dim, r.dim())?;
    }
    let k = roles.len();
    if k > dim {
        return Err(Error::SingularRoles {
            condition: f64::INFINITY,
        });
    }

    let gram = DMatrix::from_fn(k, k, |i, j| {
        roles[i].dot(&roles[j]).expect("dims checked above")
    });
    let sv = gram.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::SingularRoles { condition });
    }
    let inv = gram
        .lu()
        .try_inverse()
        .ok_or(Error::SingularRoles { condition })?;

    let duals = (0..k)
        .map(|j| {
            let mut acc = vec![0.0; dim];
            for (m, r) in roles.iter().enumerate() {
                let w = inv[(j, m)];
                for (a, x) in acc.iter_mut().zip(r.as_slice()) {
                    *a += w * x;
                }
            }
            HyperVector::new(acc)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(UnbindingBasis {
        roles: roles.to_vec(),
        duals,
        condition,
    })
}

/// Shape expected for an encoded structure under a backend.
pub fn encoded_shape(
    backend: BindingBackend,
    filler_dim: usize,
    role_dim: usize,
) -> Result<Vec<usize>> {
    match backend {
        BindingBackend::Tensor => Ok(vec![filler_dim, role_dim]),
        BindingBackend::Hrr { dim } => {
            check_dims("encoded_shape (filler)", dim, filler_dim)?;
            check_dims("encoded_shape (role)", dim, role_dim)?;
            Ok(vec![dim])
        }
    }
}

/// Zero structure of the right shape, useful as an accumulator.
pub fn zero_encoding(
    backend: BindingBackend,
    filler_dim: usize,
    role_dim: usize,
) -> Result<Payload> {
    match backend {
        BindingBackend::Tensor => Ok(Payload::Matrix(DenseMatrix::zeros(filler_dim, role_dim)?)),
        BindingBackend::Hrr { dim } => {
            encoded_shape(backend, filler_dim, role_dim)?;
            Ok(Payload::Vector(HyperVector::zeros(dim)?))
        }
    }
}
