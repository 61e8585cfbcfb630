//! Representation-category data of concrete discrete quantum groups.
//!
//! An instance hands out [`IrrepInfo`] records, fusion multiplicities and,
//! where the representation theory is available in closed form, isometric
//! intertwiners `H_gamma -> H_alpha (x) H_beta`. Everything downstream
//! (Haar weights, the GNS space, Dirac operators) is expressed through this
//! interface.
//!
//! Four families are supported:
//!
//! | descriptor kind | group            | labels        | intertwiners |
//! |-----------------|------------------|---------------|--------------|
//! | `z_d`           | dual of `Z^d`    | lattice point | yes (1x1)    |
//! | `free_group`    | dual of `F_k`    | reduced word  | yes (1x1)    |
//! | `su_q_2`        | dual of SU_q(2)  | doubled spin  | yes          |
//! | `o_n_plus`      | dual of O_N^+    | index `k`     | no           |

mod suq2;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{reduce_word, Label};

pub use suq2::{q_integer, SuQ2Rep};

/// Instance descriptor, the JSON form accepted by [`QuantumGroupInstance::build`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDescriptor {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

impl InstanceDescriptor {
    pub fn z_d(d: u32) -> Self {
        Self::with_kind("z_d").tap(|s| s.d = Some(d))
    }

    pub fn free_group(k: u32) -> Self {
        Self::with_kind("free_group").tap(|s| s.k = Some(k))
    }

    pub fn su_q_2(q: f64) -> Self {
        Self::with_kind("su_q_2").tap(|s| s.q = Some(q))
    }

    pub fn o_n_plus(n: u32) -> Self {
        Self::with_kind("o_n_plus").tap(|s| s.n = Some(n))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn with_kind(kind: &str) -> Self {
        InstanceDescriptor {
            kind: kind.to_string(),
            q: None,
            d: None,
            k: None,
            n: None,
        }
    }

    fn tap(mut self, f: impl FnOnce(&mut Self)) -> Self {
        f(&mut self);
        self
    }
}

/// Which concrete family an instance belongs to.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceKind {
    Lattice { d: u32 },
    FreeGroup { k: u32 },
    SuQ2 { q: f64 },
    FreeOrthogonal { n: u32 },
}

/// Diagonal of the modular matrix `F^alpha` in the canonical basis.
///
/// Kac-type blocks carry `Identity` so that huge blocks (free orthogonal
/// quantum groups) never have to be materialized.
#[derive(Clone, Debug, PartialEq)]
pub enum ModularDiag {
    Identity(u64),
    Diagonal(Vec<f64>),
}

impl ModularDiag {
    pub fn len(&self) -> u64 {
        match self {
            ModularDiag::Identity(n) => *n,
            ModularDiag::Diagonal(v) => v.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            ModularDiag::Identity(_) => 1.0,
            ModularDiag::Diagonal(v) => v[i],
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            ModularDiag::Identity(_) => true,
            ModularDiag::Diagonal(v) => v.iter().all(|&f| (f - 1.0).abs() <= 1e-12),
        }
    }

    /// `tr(F^p)` for a real exponent `p`.
    pub fn trace_pow(&self, p: f64) -> f64 {
        match self {
            ModularDiag::Identity(n) => *n as f64,
            ModularDiag::Diagonal(v) => v.iter().map(|f| f.powf(p)).sum(),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            ModularDiag::Identity(n) => vec![1.0; *n as usize],
            ModularDiag::Diagonal(v) => v.clone(),
        }
    }
}

/// One irreducible corepresentation.
#[derive(Clone, Debug, PartialEq)]
pub struct IrrepInfo {
    pub label: Label,
    pub dim: u64,
    pub qdim: f64,
    pub f_diag: ModularDiag,
    pub conj: Label,
}

impl IrrepInfo {
    /// Block size as `usize`, for code that materializes dense blocks.
    pub fn size(&self) -> usize {
        self.dim as usize
    }
}

/// One isometric intertwiner `V: H_gamma -> H_alpha (x) H_beta`.
///
/// Rows are indexed by `i * dim(beta) + k`. `rows` caches the nonzero
/// pattern of each row for the sparse products in the group algebra.
#[derive(Clone, Debug)]
pub struct Intertwiner {
    pub gamma: Label,
    pub isometry: DMatrix<Complex64>,
    pub rows: Vec<Vec<(usize, Complex64)>>,
}

impl Intertwiner {
    pub fn new(gamma: Label, isometry: DMatrix<Complex64>) -> Self {
        let rows = (0..isometry.nrows())
            .map(|r| {
                (0..isometry.ncols())
                    .filter_map(|c| {
                        let v = isometry[(r, c)];
                        (v.norm() > 0.0).then_some((c, v))
                    })
                    .collect()
            })
            .collect();
        Intertwiner {
            gamma,
            isometry,
            rows,
        }
    }
}

/// Decomposition of `alpha (x) beta` into irreducibles, one entry per copy.
#[derive(Clone, Debug)]
pub struct IntertwinerSet {
    pub alpha: Label,
    pub beta: Label,
    pub entries: Vec<Intertwiner>,
}

pub type FusionProduct = Vec<(Label, usize)>;

/// A concrete discrete quantum group.
///
/// Immutable after construction apart from memoization caches, which are
/// safe to populate concurrently (duplicated work is harmless).
#[derive(Debug)]
pub struct QuantumGroupInstance {
    name: String,
    kind: InstanceKind,
    descriptor: InstanceDescriptor,
    unimodular: bool,
    amenable: bool,
    fusion: RwLock<HashMap<(Label, Label), Arc<FusionProduct>>>,
    intertwiners: RwLock<HashMap<(Label, Label), Arc<IntertwinerSet>>>,
    su_reps: RwLock<HashMap<u32, Arc<SuQ2Rep>>>,
}

impl QuantumGroupInstance {
    pub fn build(descriptor: &InstanceDescriptor) -> Result<Self> {
        let kind = match descriptor.kind.as_str() {
            "z_d" => {
                let d = descriptor.d.ok_or(Error::ParameterOutOfRange {
                    name: "d",
                    reason: "z_d requires d >= 1".into(),
                })?;
                if d == 0 {
                    return Err(Error::ParameterOutOfRange {
                        name: "d",
                        reason: "d must be at least 1".into(),
                    });
                }
                InstanceKind::Lattice { d }
            }
            "free_group" => {
                let k = descriptor.k.ok_or(Error::ParameterOutOfRange {
                    name: "k",
                    reason: "free_group requires k >= 1".into(),
                })?;
                if !(1..=26).contains(&k) {
                    return Err(Error::ParameterOutOfRange {
                        name: "k",
                        reason: format!("k = {k} outside 1..=26"),
                    });
                }
                InstanceKind::FreeGroup { k }
            }
            "su_q_2" => {
                let q = descriptor.q.ok_or(Error::ParameterOutOfRange {
                    name: "q",
                    reason: "su_q_2 requires q in (0, 1]".into(),
                })?;
                if !(q > 0.0 && q <= 1.0) {
                    return Err(Error::ParameterOutOfRange {
                        name: "q",
                        reason: format!("q = {q} outside (0, 1]"),
                    });
                }
                InstanceKind::SuQ2 { q }
            }
            "o_n_plus" => {
                let n = descriptor.n.ok_or(Error::ParameterOutOfRange {
                    name: "N",
                    reason: "o_n_plus requires N >= 2".into(),
                })?;
                if n < 2 {
                    return Err(Error::ParameterOutOfRange {
                        name: "N",
                        reason: format!("N = {n} below 2"),
                    });
                }
                InstanceKind::FreeOrthogonal { n }
            }
            other => return Err(Error::UnknownDescriptor(other.to_string())),
        };
        let (name, unimodular, amenable) = match &kind {
            InstanceKind::Lattice { d } => (format!("dual of Z^{d}"), true, true),
            InstanceKind::FreeGroup { k } => (format!("dual of F_{k}"), true, *k == 1),
            InstanceKind::SuQ2 { q } => (format!("dual of SU_{q}(2)"), *q == 1.0, true),
            InstanceKind::FreeOrthogonal { n } => (format!("dual of O_{n}^+"), true, *n == 2),
        };
        Ok(QuantumGroupInstance {
            name,
            kind,
            descriptor: descriptor.clone(),
            unimodular,
            amenable,
            fusion: RwLock::new(HashMap::new()),
            intertwiners: RwLock::new(HashMap::new()),
            su_reps: RwLock::new(HashMap::new()),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &InstanceKind {
        &self.kind
    }

    pub fn descriptor(&self) -> &InstanceDescriptor {
        &self.descriptor
    }

    /// Numeric parameters, for provenance records.
    pub fn parameters(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        match self.kind {
            InstanceKind::Lattice { d } => {
                out.insert("d".into(), d as f64);
            }
            InstanceKind::FreeGroup { k } => {
                out.insert("k".into(), k as f64);
            }
            InstanceKind::SuQ2 { q } => {
                out.insert("q".into(), q);
            }
            InstanceKind::FreeOrthogonal { n } => {
                out.insert("N".into(), n as f64);
            }
        }
        out
    }

    pub fn is_unimodular(&self) -> bool {
        self.unimodular
    }

    /// Declared, not computed.
    pub fn is_amenable(&self) -> bool {
        self.amenable
    }

    pub fn has_intertwiners(&self) -> bool {
        !matches!(self.kind, InstanceKind::FreeOrthogonal { .. })
    }

    /// Only abelian duals admit the character states of `cqms`.
    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, InstanceKind::Lattice { .. })
            || matches!(self.kind, InstanceKind::FreeGroup { k: 1 })
    }

    pub fn trivial(&self) -> Label {
        match self.kind {
            InstanceKind::Lattice { d } => Label::Lattice(vec![0; d as usize]),
            InstanceKind::FreeGroup { .. } => Label::Word(Vec::new()),
            InstanceKind::SuQ2 { .. } | InstanceKind::FreeOrthogonal { .. } => Label::Spin(0),
        }
    }

    /// A generating set known to generate the whole of `Irr(G)`.
    pub fn canonical_generators(&self) -> Vec<Label> {
        match self.kind {
            InstanceKind::Lattice { d } => {
                let mut out = Vec::new();
                for axis in 0..d as usize {
                    for sign in [1, -1] {
                        let mut v = vec![0; d as usize];
                        v[axis] = sign;
                        out.push(Label::Lattice(v));
                    }
                }
                out
            }
            InstanceKind::FreeGroup { k } => (1..=k as i32)
                .flat_map(|g| [Label::Word(vec![g]), Label::Word(vec![-g])])
                .collect(),
            InstanceKind::SuQ2 { .. } | InstanceKind::FreeOrthogonal { .. } => {
                vec![Label::Spin(1)]
            }
        }
    }

    /// Brings a label into this instance's canonical form (integers become
    /// lattice points on `Z`), or rejects it.
    pub fn normalize_label(&self, label: Label) -> Result<Label> {
        let label = match (&self.kind, label) {
            (InstanceKind::Lattice { d: 1 }, Label::Spin(n)) => Label::Lattice(vec![n as i64]),
            (_, l) => l,
        };
        self.check(&label)?;
        Ok(label)
    }

    pub fn contains(&self, label: &Label) -> bool {
        match (&self.kind, label) {
            (InstanceKind::Lattice { d }, Label::Lattice(v)) => v.len() == *d as usize,
            (InstanceKind::FreeGroup { k }, Label::Word(w)) => {
                w.iter().all(|&g| g != 0 && g.unsigned_abs() <= *k)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (InstanceKind::SuQ2 { .. }, Label::Spin(_)) => true,
            (InstanceKind::FreeOrthogonal { .. }, Label::Spin(_)) => true,
            _ => false,
        }
    }

    fn check(&self, label: &Label) -> Result<()> {
        if self.contains(label) {
            Ok(())
        } else {
            Err(Error::UnknownLabel(label.clone()))
        }
    }

    pub fn irrep(&self, label: &Label) -> Result<IrrepInfo> {
        self.check(label)?;
        let info = match (&self.kind, label) {
            (InstanceKind::Lattice { .. }, Label::Lattice(v)) => IrrepInfo {
                label: label.clone(),
                dim: 1,
                qdim: 1.0,
                f_diag: ModularDiag::Identity(1),
                conj: Label::Lattice(v.iter().map(|x| -x).collect()),
            },
            (InstanceKind::FreeGroup { .. }, Label::Word(w)) => IrrepInfo {
                label: label.clone(),
                dim: 1,
                qdim: 1.0,
                f_diag: ModularDiag::Identity(1),
                conj: Label::Word(w.iter().rev().map(|g| -g).collect()),
            },
            (InstanceKind::SuQ2 { q }, Label::Spin(n)) => {
                let f: Vec<f64> = (0..=*n).map(|j| q.powi(*n as i32 - 2 * j as i32)).collect();
                let qdim = f.iter().sum();
                let f_diag = if *q == 1.0 {
                    ModularDiag::Identity(*n as u64 + 1)
                } else {
                    ModularDiag::Diagonal(f)
                };
                IrrepInfo {
                    label: label.clone(),
                    dim: *n as u64 + 1,
                    qdim,
                    f_diag,
                    conj: label.clone(),
                }
            }
            (InstanceKind::FreeOrthogonal { n }, Label::Spin(k)) => {
                let dim = free_orthogonal_dim(*n as u64, *k)
                    .ok_or_else(|| Error::DimensionOverflow(label.clone()))?;
                IrrepInfo {
                    label: label.clone(),
                    dim,
                    qdim: dim as f64,
                    f_diag: ModularDiag::Identity(dim),
                    conj: label.clone(),
                }
            }
            _ => unreachable!("checked above"),
        };
        Ok(info)
    }

    pub fn dim(&self, label: &Label) -> Result<u64> {
        Ok(self.irrep(label)?.dim)
    }

    pub fn conj(&self, label: &Label) -> Result<Label> {
        Ok(self.irrep(label)?.conj)
    }

    /// Fusion multiplicities of `alpha (x) beta`, sorted by label.
    pub fn fuse(&self, alpha: &Label, beta: &Label) -> Result<Arc<FusionProduct>> {
        self.check(alpha)?;
        self.check(beta)?;
        let key = (alpha.clone(), beta.clone());
        if let Some(hit) = self.fusion.read().get(&key) {
            return Ok(hit.clone());
        }
        let product = Arc::new(self.compute_fusion(alpha, beta));
        self.fusion.write().insert(key, product.clone());
        Ok(product)
    }

    fn compute_fusion(&self, alpha: &Label, beta: &Label) -> FusionProduct {
        match (alpha, beta) {
            (Label::Lattice(a), Label::Lattice(b)) => {
                vec![(Label::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect()), 1)]
            }
            (Label::Word(a), Label::Word(b)) => {
                let mut w = a.clone();
                w.extend_from_slice(b);
                vec![(Label::Word(reduce_word(w)), 1)]
            }
            (Label::Spin(a), Label::Spin(b)) => {
                let lo = a.abs_diff(*b);
                (lo..=a + b).step_by(2).map(|g| (Label::Spin(g), 1)).collect()
            }
            _ => unreachable!("labels checked against the instance"),
        }
    }

    /// Isometric intertwiners for `alpha (x) beta`, one per fusion copy.
    ///
    /// For SU_q(2) the highest-weight column of each copy is the null vector
    /// of the raising operator on the weight space, normalized with its first
    /// nonzero entry real positive; the remaining columns follow by applying
    /// the lowering operator, so that the isometry intertwines with the
    /// canonical irreducible representation exactly.
    pub fn intertwiners(&self, alpha: &Label, beta: &Label) -> Result<Arc<IntertwinerSet>> {
        if !self.has_intertwiners() {
            return Err(Error::CapabilityAbsent {
                instance: self.name.clone(),
                capability: "intertwiner",
            });
        }
        let key = (alpha.clone(), beta.clone());
        if let Some(hit) = self.intertwiners.read().get(&key) {
            return Ok(hit.clone());
        }
        let fusion = self.fuse(alpha, beta)?;
        let entries = match (&self.kind, alpha, beta) {
            (InstanceKind::SuQ2 { q }, Label::Spin(a), Label::Spin(b)) => {
                let ra = self.su_rep(*a, *q);
                let rb = self.su_rep(*b, *q);
                let mut entries = Vec::new();
                for (gamma, mult) in fusion.iter() {
                    let g = gamma.as_spin().expect("spin fusion");
                    let rg = self.su_rep(g, *q);
                    let found = suq2::highest_weight_multiplicity(*a, *b, g);
                    if found != *mult {
                        return Err(Error::RankMismatch {
                            alpha: alpha.clone(),
                            beta: beta.clone(),
                            gamma: gamma.clone(),
                            expected: *mult,
                            found,
                        });
                    }
                    let v = suq2::intertwiner(&ra, &rb, &rg);
                    entries.push(Intertwiner::new(gamma.clone(), v));
                }
                entries
            }
            _ => fusion
                .iter()
                .map(|(gamma, _)| {
                    Intertwiner::new(gamma.clone(), DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)))
                })
                .collect(),
        };
        let set = Arc::new(IntertwinerSet {
            alpha: alpha.clone(),
            beta: beta.clone(),
            entries,
        });
        self.intertwiners.write().insert(key, set.clone());
        Ok(set)
    }

    fn su_rep(&self, n: u32, q: f64) -> Arc<SuQ2Rep> {
        if let Some(hit) = self.su_reps.read().get(&n) {
            return hit.clone();
        }
        let rep = Arc::new(SuQ2Rep::new(n, q));
        self.su_reps.write().insert(n, rep.clone());
        rep
    }
}

/// `d_0 = 1, d_1 = N, d_{k+1} = N d_k - d_{k-1}`; `None` on overflow.
fn free_orthogonal_dim(n: u64, k: u32) -> Option<u64> {
    let (mut prev, mut cur) = (1u64, n);
    if k == 0 {
        return Some(1);
    }
    for _ in 1..k {
        let next = n.checked_mul(cur)?.checked_sub(prev)?;
        prev = cur;
        cur = next;
    }
    Some(cur)
}
