//! The group algebra `C[G]` in the matrix-coefficient basis `u^alpha_ij`.
//!
//! Products are expanded through the instance's intertwiners,
//! `u^a_ij u^b_kl = sum_g sum_rs V_(ik),r u^g_rs conj(V_(jl),s)`, and the
//! Haar state reads off the coefficient of the unit. Everything metric goes
//! through the Schur values `<u^a_ij, u^a_ij> = (F^a)^-1_ii / dim_q(a)`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{IrrepInfo, QuantumGroupInstance};
use crate::label::Label;
use crate::length::{shell_index, LengthFunction};
use crate::linalg::{spectral_norm, SparseMatrix};
use crate::serial::BlockJson;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

type Column = Vec<(usize, Complex64)>;

/// Largest block the group algebra will materialize densely.
pub const MAX_DENSE_DIM: u64 = 4096;

/// A finitely supported element `sum a^alpha_ij u^alpha_ij`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupAlgElement {
    blocks: BTreeMap<Label, DMatrix<Complex64>>,
}

impl GroupAlgElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one(instance: &QuantumGroupInstance) -> Self {
        let mut x = Self::zero();
        x.blocks
            .insert(instance.trivial(), DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)));
        x
    }

    /// The single coefficient `u^alpha_ij`.
    pub fn basis(instance: &QuantumGroupInstance, alpha: &Label, i: usize, j: usize) -> Result<Self> {
        let d = dense_dim(instance, alpha)?;
        if i >= d || j >= d {
            return Err(Error::InvalidArgument(format!("index ({i}, {j}) outside block {alpha} of size {d}")));
        }
        let mut m = DMatrix::from_element(d, d, ZERO);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        Self::from_blocks(instance, [(alpha.clone(), m)])
    }

    /// Builds an element from coefficient blocks, checking shapes. Blocks
    /// for a repeated label are added.
    pub fn from_blocks(
        instance: &QuantumGroupInstance,
        blocks: impl IntoIterator<Item = (Label, DMatrix<Complex64>)>,
    ) -> Result<Self> {
        let mut x = Self::zero();
        for (label, m) in blocks {
            let label = instance.normalize_label(label)?;
            let d = dense_dim(instance, &label)?;
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::ShapeMismatch {
                    label,
                    expected: d,
                    found: m.nrows().max(m.ncols()),
                });
            }
            x.add_block(label, &m);
        }
        Ok(x)
    }

    pub(crate) fn add_block(&mut self, label: Label, m: &DMatrix<Complex64>) {
        match self.blocks.get_mut(&label) {
            Some(b) => *b += m,
            None => {
                self.blocks.insert(label, m.clone());
            }
        }
    }

    pub fn block(&self, label: &Label) -> Option<&DMatrix<Complex64>> {
        self.blocks.get(label)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Label, &DMatrix<Complex64>)> {
        self.blocks.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Label> {
        self.blocks.keys()
    }

    pub fn coefficient(&self, label: &Label, i: usize, j: usize) -> Complex64 {
        self.blocks.get(label).map_or(ZERO, |m| m[(i, j)])
    }

    pub fn scale(&self, c: Complex64) -> Self {
        GroupAlgElement {
            blocks: self.blocks.iter().map(|(k, m)| (k.clone(), m * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, m) in &other.blocks {
            out.add_block(k.clone(), m);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Keeps the blocks whose label satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Label) -> bool) -> Self {
        GroupAlgElement {
            blocks: self
                .blocks
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, m)| (k.clone(), m.clone()))
                .collect(),
        }
    }

    /// Largest coefficient difference, treating missing blocks as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .blocks
            .values()
            .flat_map(|m| m.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// Largest length in the support.
    pub fn support_length(&self, l: &LengthFunction) -> Result<f64> {
        self.blocks.keys().try_fold(0.0f64, |acc, k| Ok(acc.max(l.get(k)?)))
    }

    /// JSON form `{"side": "group_algebra", "blocks": [...]}`.
    pub fn to_json(&self) -> String {
        let doc = ElementJson {
            side: "group_algebra".into(),
            blocks: self
                .blocks
                .iter()
                .map(|(k, m)| BlockJson::from_matrix(k.clone(), m))
                .collect(),
        };
        serde_json::to_string(&doc).expect("finite floats serialize")
    }

    pub fn from_json(instance: &QuantumGroupInstance, text: &str) -> Result<Self> {
        let doc: ElementJson = serde_json::from_str(text)?;
        if doc.side != "group_algebra" {
            return Err(Error::InvalidArgument(format!("expected side group_algebra, found {}", doc.side)));
        }
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
struct ElementJson {
    side: String,
    blocks: Vec<BlockJson>,
}

pub(crate) fn dense_dim(instance: &QuantumGroupInstance, label: &Label) -> Result<usize> {
    let d = instance.dim(label)?;
    if d > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow(label.clone()));
    }
    Ok(d as usize)
}

/// Squared GNS norm `<u^alpha_ij, u^alpha_ij> = (F^alpha)^-1_ii / dim_q(alpha)`.
pub fn schur_value(info: &IrrepInfo, i: usize) -> f64 {
    1.0 / (info.f_diag.get(i) * info.qdim)
}

/// The Haar state: the coefficient of the unit.
pub fn haar_state(instance: &QuantumGroupInstance, x: &GroupAlgElement) -> Complex64 {
    x.coefficient(&instance.trivial(), 0, 0)
}

/// `<x, y> = h(x^* y)` evaluated in closed form through Schur orthogonality.
pub fn inner_product(instance: &QuantumGroupInstance, x: &GroupAlgElement, y: &GroupAlgElement) -> Result<Complex64> {
    let mut acc = ZERO;
    for (label, a) in &x.blocks {
        let Some(b) = y.blocks.get(label) else { continue };
        let info = instance.irrep(label)?;
        for i in 0..a.nrows() {
            let w = schur_value(&info, i);
            for j in 0..a.ncols() {
                acc += a[(i, j)].conj() * b[(i, j)] * w;
            }
        }
    }
    Ok(acc)
}

/// The product in `C[G]`.
pub fn multiply(instance: &QuantumGroupInstance, x: &GroupAlgElement, y: &GroupAlgElement) -> Result<GroupAlgElement> {
    let mut out = GroupAlgElement::zero();
    for (alpha, a) in &x.blocks {
        for (beta, b) in &y.blocks {
            let set = instance.intertwiners(alpha, beta)?;
            let ab = a.kronecker(b);
            for entry in &set.entries {
                let v = &entry.isometry;
                // C = V^T (A (x) B) conj(V)
                let c = v.transpose() * &ab * v.map(|z| z.conj());
                out.add_block(entry.gamma.clone(), &c);
            }
        }
    }
    Ok(out)
}

/// The involution, obtained from the GNS form: the coefficient of `u_c` in
/// `x^*` is `conj(h(x u_c)) / <u_c, u_c>`, and `h(x u_c)` only involves the
/// invariant vector of `alpha (x) conj(alpha)`.
pub fn star(instance: &QuantumGroupInstance, x: &GroupAlgElement) -> Result<GroupAlgElement> {
    let trivial = instance.trivial();
    let mut out = GroupAlgElement::zero();
    for (alpha, a) in &x.blocks {
        let info = instance.irrep(alpha)?;
        let conj = info.conj.clone();
        let cinfo = instance.irrep(&conj)?;
        let set = instance.intertwiners(alpha, &conj)?;
        let inv = set
            .entries
            .iter()
            .find(|e| e.gamma == trivial)
            .expect("alpha (x) conj(alpha) contains the trivial corepresentation");
        let (da, dc) = (info.size(), cinfo.size());
        let w = DMatrix::from_fn(da, dc, |i, r| inv.isometry[(i * dc + r, 0)]);
        let mut c = w.adjoint() * a.map(|z| z.conj()) * &w;
        for r in 0..dc {
            let n = schur_value(&cinfo, r);
            for s in 0..dc {
                c[(r, s)] /= n;
            }
        }
        out.add_block(conj, &c);
    }
    Ok(out)
}

/// `||x||_{2,s}^2 = sum (1 / dim) (1 + l)^{2s} |a_ij|^2`.
pub fn sobolev_norm_cg(instance: &QuantumGroupInstance, x: &GroupAlgElement, l: &LengthFunction, s: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (label, a) in &x.blocks {
        let len = l.get(label)?;
        let dim = instance.dim(label)? as f64;
        acc += (1.0 + len).powf(2.0 * s) / dim * a.norm_squared();
    }
    Ok(acc.sqrt())
}

/// One irreducible block of a [`GnsBasis`].
#[derive(Clone, Debug)]
pub struct BasisBlock {
    pub label: Label,
    pub length: f64,
    pub info: IrrepInfo,
    pub offset: usize,
    /// `||Lambda(u_ij)||`, depending on the row index `i` only.
    pub norms: Vec<f64>,
}

impl BasisBlock {
    pub fn dim(&self) -> usize {
        self.info.size()
    }
}

/// Orthonormal basis `Lambda(u^alpha_ij) / ||Lambda(u^alpha_ij)||` of the
/// truncation `l(alpha) <= M` of `l^2(G)`, ordered by `(length, label, i, j)`.
#[derive(Clone, Debug)]
pub struct GnsBasis {
    m: usize,
    blocks: Vec<BasisBlock>,
    lookup: HashMap<Label, usize>,
    len: usize,
}

impl GnsBasis {
    pub fn new(instance: &QuantumGroupInstance, l: &LengthFunction, m: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut lookup = HashMap::new();
        let mut offset = 0;
        for (label, length) in l.ball(m as f64)? {
            let info = instance.irrep(&label)?;
            dense_dim(instance, &label)?;
            let norms = (0..info.size()).map(|i| schur_value(&info, i).sqrt()).collect();
            lookup.insert(label.clone(), blocks.len());
            let d = info.size();
            blocks.push(BasisBlock {
                label,
                length,
                info,
                offset,
                norms,
            });
            offset += d * d;
        }
        Ok(GnsBasis {
            m,
            blocks,
            lookup,
            len: offset,
        })
    }

    pub fn truncation(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn blocks(&self) -> &[BasisBlock] {
        &self.blocks
    }

    pub fn block(&self, label: &Label) -> Option<&BasisBlock> {
        self.lookup.get(label).map(|&b| &self.blocks[b])
    }

    pub fn index(&self, label: &Label, i: usize, j: usize) -> Option<usize> {
        self.block(label).map(|b| b.offset + i * b.dim() + j)
    }

    /// `(block, i, j)` of a basis position.
    pub fn entry(&self, idx: usize) -> (&BasisBlock, usize, usize) {
        let b = match self.blocks.binary_search_by(|b| b.offset.cmp(&idx)) {
            Ok(b) => b,
            Err(b) => b - 1,
        };
        let blk = &self.blocks[b];
        let local = idx - blk.offset;
        (blk, local / blk.dim(), local % blk.dim())
    }

    /// Length of the label of every basis vector.
    pub fn lengths(&self) -> Vec<f64> {
        self.per_vector(|b, _| b.length)
    }

    /// Shell index of every basis vector.
    pub fn shells(&self) -> Vec<usize> {
        self.per_vector(|b, _| shell_index(b.length))
    }

    /// `f(block, row index)` repeated over the basis.
    pub fn per_vector<T>(&self, f: impl Fn(&BasisBlock, usize) -> T) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len);
        for b in &self.blocks {
            for i in 0..b.dim() {
                for _ in 0..b.dim() {
                    out.push(f(b, i));
                }
            }
        }
        out
    }

    /// Coordinates of `Lambda(x)` in this basis; `None` if `x` reaches
    /// outside the truncation.
    pub fn coordinates(&self, x: &GroupAlgElement) -> Option<Vec<Complex64>> {
        let mut v = vec![ZERO; self.len];
        for (label, a) in x.blocks() {
            let b = self.block(label)?;
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    v[b.offset + i * b.dim() + j] = a[(i, j)] * b.norms[i];
                }
            }
        }
        Some(v)
    }
}

/// Matrix of `xi -> x xi` on the truncation `l <= M` of `l^2(G)`.
pub fn left_regular_matrix(
    instance: &QuantumGroupInstance,
    x: &GroupAlgElement,
    l: &LengthFunction,
    m: usize,
) -> Result<SparseMatrix> {
    let basis = GnsBasis::new(instance, l, m)?;
    left_regular_in(instance, x, l, &basis)
}

/// [`left_regular_matrix`] on a prebuilt basis.
pub fn left_regular_in(
    instance: &QuantumGroupInstance,
    x: &GroupAlgElement,
    l: &LengthFunction,
    basis: &GnsBasis,
) -> Result<SparseMatrix> {
    let support = x.support_length(l)?;
    if support > basis.truncation() as f64 + 1e-12 {
        return Err(Error::SupportTooLarge {
            support,
            truncation: basis.truncation(),
        });
    }
    let terms: Vec<(&Label, &DMatrix<Complex64>)> = x.blocks().collect();
    // warm the intertwiner cache serially so the parallel pass only reads
    for b in basis.blocks() {
        for (alpha, _) in &terms {
            instance.intertwiners(alpha, &b.label)?;
        }
    }
    let n = basis.len();
    let per_block: Vec<Result<Vec<Column>>> = basis
        .blocks()
        .par_iter()
        .map(|b| {
            let mut scratch = vec![ZERO; n];
            let mut touched: Vec<usize> = Vec::new();
            let db = b.dim();
            let mut cols = Vec::with_capacity(db * db);
            for k in 0..db {
                for lcol in 0..db {
                    for (alpha, a) in &terms {
                        let set = instance.intertwiners(alpha, &b.label)?;
                        let da = a.nrows();
                        for entry in &set.entries {
                            let Some(g) = basis.block(&entry.gamma) else { continue };
                            let dg = g.dim();
                            for i in 0..da {
                                for &(r, v1) in &entry.rows[i * db + k] {
                                    for j in 0..da {
                                        let aij = a[(i, j)];
                                        if aij == ZERO {
                                            continue;
                                        }
                                        for &(s, v2) in &entry.rows[j * db + lcol] {
                                            let idx = g.offset + r * dg + s;
                                            if scratch[idx] == ZERO {
                                                touched.push(idx);
                                            }
                                            scratch[idx] += aij * v1 * v2.conj() * (g.norms[r] / b.norms[k]);
                                        }
                                    }
                                }
                            }
                        }
                    }
                    touched.sort_unstable();
                    touched.dedup();
                    let col: Vec<(usize, Complex64)> = touched
                        .iter()
                        .map(|&r| (r, std::mem::replace(&mut scratch[r], ZERO)))
                        .filter(|&(_, v)| v != ZERO)
                        .collect();
                    touched.clear();
                    cols.push(col);
                }
            }
            Ok(cols)
        })
        .collect();
    let mut columns = Vec::with_capacity(n);
    for cols in per_block {
        columns.extend(cols?);
    }
    Ok(SparseMatrix::from_columns(n, &columns))
}

/// Result of a truncation sweep for an operator norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNormEstimate {
    /// Certified lower bound on the operator norm.
    pub value: f64,
    pub converged: bool,
    pub m_used: usize,
    /// `(M, estimate)` for every truncation visited.
    pub history: Vec<(usize, f64)>,
}

/// Spectral norm of `x` acting on `l^2(G)`, estimated on truncations
/// `M0, M0 + 2, ...` until two successive values differ by less than `tol`
/// or `m_max` is passed.
pub fn op_norm(
    instance: &QuantumGroupInstance,
    x: &GroupAlgElement,
    l: &LengthFunction,
    m0: usize,
    tol: f64,
    m_max: usize,
) -> Result<OpNormEstimate> {
    op_norm_with(m0, tol, m_max, |m| {
        let mat = left_regular_matrix(instance, x, l, m)?;
        Ok(spectral_norm(&mat))
    })
}

/// The sweep of [`op_norm`] for an arbitrary truncated operator.
pub fn op_norm_with(
    m0: usize,
    tol: f64,
    m_max: usize,
    mut norm_at: impl FnMut(usize) -> Result<f64>,
) -> Result<OpNormEstimate> {
    let mut history = Vec::new();
    let mut value = norm_at(m0)?;
    history.push((m0, value));
    let mut m = m0;
    let mut converged = false;
    while m + 2 <= m_max {
        m += 2;
        // compressions only grow the norm; clamp rounding noise
        let next = norm_at(m)?.max(value);
        history.push((m, next));
        let delta = next - value;
        value = next;
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(OpNormEstimate {
        value,
        converged,
        m_used: m,
        history,
    })
}
