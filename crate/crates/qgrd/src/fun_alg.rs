//! The function-algebra side `C_c(G)`: finitely supported families of
//! matrix blocks, the Haar weights, the modular element `C`, Sobolev norms
//! and the Fourier transform into `C[G]`.
//!
//! With the pairing `<u^alpha_ij, h> = h^alpha_ij` the transform is
//! `F(f)^alpha = dim_q(alpha) (f^alpha F^alpha)^T`, which satisfies
//! `<F(f), h> = phi(h f)` on basis elements.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grp_alg::{dense_dim, GroupAlgElement};
use crate::instance::{ModularDiag, QuantumGroupInstance};
use crate::label::Label;
use crate::length::LengthFunction;
use crate::serial::BlockJson;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// One block `p_alpha f`.
///
/// Scalar blocks `c * I` keep huge blocks (free orthogonal duals) cheap.
#[derive(Clone, Debug, PartialEq)]
pub enum CcBlock {
    Scalar { value: Complex64, dim: u64 },
    Dense(DMatrix<Complex64>),
}

impl CcBlock {
    pub fn dim(&self) -> u64 {
        match self {
            CcBlock::Scalar { dim, .. } => *dim,
            CcBlock::Dense(m) => m.nrows() as u64,
        }
    }

    /// `tr(F^p * block)` for a diagonal `F`.
    fn trace_with(&self, f: &ModularDiag, p: f64) -> Complex64 {
        match self {
            CcBlock::Scalar { value, .. } => value * f.trace_pow(p),
            CcBlock::Dense(m) => (0..m.nrows()).map(|i| m[(i, i)] * f.get(i).powf(p)).sum(),
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        match self {
            CcBlock::Dense(m) => Ok(m.clone()),
            CcBlock::Scalar { value, dim } => {
                if *dim > crate::grp_alg::MAX_DENSE_DIM {
                    return Err(Error::InvalidArgument(format!("scalar block of size {dim} is too large to expand")));
                }
                Ok(DMatrix::from_diagonal_element(*dim as usize, *dim as usize, *value))
            }
        }
    }

    fn adjoint(&self) -> Self {
        match self {
            CcBlock::Scalar { value, dim } => CcBlock::Scalar {
                value: value.conj(),
                dim: *dim,
            },
            CcBlock::Dense(m) => CcBlock::Dense(m.adjoint()),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (CcBlock::Scalar { value: a, dim }, CcBlock::Scalar { value: b, .. }) => CcBlock::Scalar {
                value: a * b,
                dim: *dim,
            },
            (CcBlock::Scalar { value, .. }, CcBlock::Dense(m)) | (CcBlock::Dense(m), CcBlock::Scalar { value, .. }) => {
                CcBlock::Dense(m * *value)
            }
            (CcBlock::Dense(a), CcBlock::Dense(b)) => CcBlock::Dense(a * b),
        }
    }
}

/// An element of `C_c(G)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CcElement {
    blocks: BTreeMap<Label, CcBlock>,
}

impl CcElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The minimal projection `p_alpha`.
    pub fn projection(instance: &QuantumGroupInstance, alpha: &Label) -> Result<Self> {
        let dim = instance.dim(alpha)?;
        let mut f = Self::zero();
        f.blocks.insert(
            alpha.clone(),
            CcBlock::Scalar {
                value: Complex64::new(1.0, 0.0),
                dim,
            },
        );
        Ok(f)
    }

    /// Builds from dense blocks, checking shapes.
    pub fn from_blocks(
        instance: &QuantumGroupInstance,
        blocks: impl IntoIterator<Item = (Label, DMatrix<Complex64>)>,
    ) -> Result<Self> {
        let mut f = Self::zero();
        for (label, m) in blocks {
            let label = instance.normalize_label(label)?;
            let d = instance.dim(&label)? as usize;
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::ShapeMismatch {
                    label,
                    expected: d,
                    found: m.nrows().max(m.ncols()),
                });
            }
            f.blocks.insert(label, CcBlock::Dense(m));
        }
        Ok(f)
    }

    pub fn insert_scalar(&mut self, instance: &QuantumGroupInstance, label: Label, value: Complex64) -> Result<()> {
        let dim = instance.dim(&label)?;
        self.blocks.insert(label, CcBlock::Scalar { value, dim });
        Ok(())
    }

    pub fn block(&self, label: &Label) -> Option<&CcBlock> {
        self.blocks.get(label)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Label, &CcBlock)> {
        self.blocks.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Label> {
        self.blocks.keys()
    }

    pub fn adjoint(&self) -> Self {
        CcElement {
            blocks: self.blocks.iter().map(|(k, b)| (k.clone(), b.adjoint())).collect(),
        }
    }

    /// Blockwise product; the support is the intersection.
    pub fn mul(&self, other: &Self) -> Self {
        CcElement {
            blocks: self
                .blocks
                .iter()
                .filter_map(|(k, a)| other.blocks.get(k).map(|b| (k.clone(), a.mul(b))))
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(k, b)| {
                let out = match b {
                    CcBlock::Scalar { value, dim } => CcBlock::Scalar {
                        value: value * c,
                        dim: *dim,
                    },
                    CcBlock::Dense(m) => CcBlock::Dense(m * c),
                };
                (k.clone(), out)
            })
            .collect();
        CcElement { blocks }
    }

    /// Largest blockwise entry difference, expanding scalar blocks.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let mut worst = 0.0f64;
        let labels: std::collections::BTreeSet<&Label> = self.blocks.keys().chain(other.blocks.keys()).collect();
        for k in labels {
            let a = self.blocks.get(k).map(|b| b.to_dense()).transpose()?;
            let b = other.blocks.get(k).map(|b| b.to_dense()).transpose()?;
            let d = match (a, b) {
                (Some(a), Some(b)) => (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max),
                (Some(m), None) | (None, Some(m)) => m.iter().map(|z| z.norm()).fold(0.0, f64::max),
                (None, None) => 0.0,
            };
            worst = worst.max(d);
        }
        Ok(worst)
    }

    /// JSON form `{"blocks": [{"label": ..., "re": [[...]], "im": [[...]]}]}`.
    pub fn to_json(&self) -> Result<String> {
        let mut blocks = Vec::new();
        for (k, b) in &self.blocks {
            blocks.push(BlockJson::from_matrix(k.clone(), &b.to_dense()?));
        }
        Ok(serde_json::to_string(&CcJson { blocks })?)
    }

    pub fn from_json(instance: &QuantumGroupInstance, text: &str) -> Result<Self> {
        let doc: CcJson = serde_json::from_str(text)?;
        let mut blocks = Vec::new();
        for b in doc.blocks {
            let m = b
                .to_matrix()
                .ok_or_else(|| Error::InvalidArgument(format!("block {} is not square", b.label)))?;
            blocks.push((b.label, m));
        }
        Self::from_blocks(instance, blocks)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CcJson {
    blocks: Vec<BlockJson>,
}

fn checked_info(instance: &QuantumGroupInstance, label: &Label, block: &CcBlock) -> Result<crate::instance::IrrepInfo> {
    let info = instance.irrep(label)?;
    if block.dim() != info.dim {
        return Err(Error::ShapeMismatch {
            label: label.clone(),
            expected: info.dim as usize,
            found: block.dim() as usize,
        });
    }
    Ok(info)
}

/// Left Haar weight `phi(f) = sum dim_q(alpha) tr(F^alpha p_alpha f)`.
pub fn haar_phi(instance: &QuantumGroupInstance, f: &CcElement) -> Result<Complex64> {
    let mut acc = ZERO;
    for (label, b) in &f.blocks {
        let info = checked_info(instance, label, b)?;
        acc += b.trace_with(&info.f_diag, 1.0) * info.qdim;
    }
    Ok(acc)
}

/// Right Haar weight `psi(f) = sum dim_q(alpha) tr((F^alpha)^-1 p_alpha f)`.
pub fn haar_psi(instance: &QuantumGroupInstance, f: &CcElement) -> Result<Complex64> {
    let mut acc = ZERO;
    for (label, b) in &f.blocks {
        let info = checked_info(instance, label, b)?;
        acc += b.trace_with(&info.f_diag, -1.0) * info.qdim;
    }
    Ok(acc)
}

/// The modular element `C = sum (dim_q / dim) F^alpha p_alpha`, raised to
/// the power `p` and truncated to `support`.
pub fn c_element_pow<'a>(
    instance: &QuantumGroupInstance,
    support: impl IntoIterator<Item = &'a Label>,
    p: f64,
) -> Result<CcElement> {
    let mut out = CcElement::zero();
    for label in support {
        let info = instance.irrep(label)?;
        let ratio = (info.qdim / info.dim as f64).powf(p);
        let block = match &info.f_diag {
            ModularDiag::Identity(dim) => CcBlock::Scalar {
                value: Complex64::new(ratio, 0.0),
                dim: *dim,
            },
            ModularDiag::Diagonal(f) => {
                let diag = f.iter().map(|x| Complex64::new(ratio * x.powf(p), 0.0));
                CcBlock::Dense(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(f.len(), diag)))
            }
        };
        out.blocks.insert(label.clone(), block);
    }
    Ok(out)
}

/// The modular element `C` truncated to `support`.
pub fn c_element<'a>(instance: &QuantumGroupInstance, support: impl IntoIterator<Item = &'a Label>) -> Result<CcElement> {
    c_element_pow(instance, support, 1.0)
}

/// The growth test element `q_n = sum_{alpha in shell} p_alpha C^-1`.
pub fn q_n<'a>(instance: &QuantumGroupInstance, shell: impl IntoIterator<Item = &'a Label>) -> Result<CcElement> {
    c_element_pow(instance, shell, -1.0)
}

/// `||f||_{2,s}^2 = sum (dim_q^2 / dim) tr(((1 + L)^s f F)^* (1 + L)^s f F)`.
pub fn sobolev_norm_cc(instance: &QuantumGroupInstance, f: &CcElement, l: &LengthFunction, s: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (label, b) in &f.blocks {
        let info = checked_info(instance, label, b)?;
        let w = (1.0 + l.get(label)?).powf(s);
        let tr = match b {
            CcBlock::Scalar { value, .. } => value.norm_sqr() * w * w * info.f_diag.trace_pow(2.0),
            CcBlock::Dense(m) => {
                let fdiag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    m.nrows(),
                    (0..m.nrows()).map(|i| Complex64::new(info.f_diag.get(i), 0.0)),
                ));
                let g = m * fdiag * Complex64::new(w, 0.0);
                (g.adjoint() * &g).trace().re
            }
        };
        acc += info.qdim * info.qdim / info.dim as f64 * tr;
    }
    Ok(acc.sqrt())
}

/// The Fourier transform `C_c(G) -> C[G]`.
pub fn fourier(instance: &QuantumGroupInstance, f: &CcElement) -> Result<GroupAlgElement> {
    let mut blocks = Vec::new();
    for (label, b) in &f.blocks {
        let info = checked_info(instance, label, b)?;
        dense_dim(instance, label)?;
        let m = b.to_dense()?;
        let a = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(j, i)] * (info.qdim * info.f_diag.get(i)));
        blocks.push((label.clone(), a));
    }
    GroupAlgElement::from_blocks(instance, blocks)
}

/// Inverse of [`fourier`]: `f^alpha = (a^alpha)^T (F^alpha)^-1 / dim_q(alpha)`.
pub fn fourier_inv(instance: &QuantumGroupInstance, x: &GroupAlgElement) -> Result<CcElement> {
    let mut blocks = Vec::new();
    for (label, a) in x.blocks() {
        let info = instance.irrep(label)?;
        let m = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(j, i)] / (info.qdim * info.f_diag.get(j)));
        blocks.push((label.clone(), m));
    }
    CcElement::from_blocks(instance, blocks)
}
