//! The spectral triple `(C[G], l^2(G), D)` with `D` multiplying each GNS
//! basis vector by the length of its label.
//!
//! Commutators with `D` are entrywise scalings of the left-regular matrix,
//! `[D, a]_rc = (l_r - l_c) a_rc`. The band `T_j` collects the entries whose
//! row shell exceeds the column shell by `j`, so that `delta^k(a) =
//! sum_j j^k T_j` for integer lengths.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::grp_alg::{left_regular_in, op_norm_with, BasisBlock, GnsBasis, GroupAlgElement, OpNormEstimate};
use crate::instance::QuantumGroupInstance;
use crate::length::{shell_index, shells, LengthFunction};
use crate::linalg::{spectral_norm, SparseMatrix};

/// The Dirac operator on the truncation `l <= M`.
#[derive(Clone, Debug)]
pub struct DiracTruncation {
    pub basis: GnsBasis,
    /// `l(alpha)` for every basis vector.
    pub diag: Vec<f64>,
    /// Shell index for every basis vector.
    pub shells: Vec<usize>,
}

impl DiracTruncation {
    pub fn truncation(&self) -> usize {
        self.basis.truncation()
    }

    pub fn matrix(&self) -> SparseMatrix {
        SparseMatrix::from_diagonal(&self.diag)
    }

    /// Basis positions in shell `n`, the support of `p_n`.
    pub fn shell_mask(&self, n: usize) -> Vec<usize> {
        (0..self.shells.len()).filter(|&i| self.shells[i] == n).collect()
    }

    /// Distinct eigenvalues with multiplicities, ascending.
    pub fn spectrum(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.diag {
            match out.iter_mut().find(|(x, _)| (x - v).abs() <= 1e-12) {
                Some(e) => e.1 += 1,
                None => out.push((v, 1)),
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// CSV with columns `eigenvalue,multiplicity`.
    pub fn spectrum_csv(&self) -> String {
        let mut s = String::from("eigenvalue,multiplicity\n");
        for (v, m) in self.spectrum() {
            s.push_str(&format!("{},{}\n", fmt_num(v), m));
        }
        s
    }

    /// Positions whose shell index is at most `M - p`, where edge effects
    /// of the truncation cannot reach an element of filtration degree `p`.
    pub fn interior_window(&self, p: usize) -> Vec<usize> {
        let limit = self.truncation().saturating_sub(p);
        (0..self.shells.len()).filter(|&i| self.shells[i] <= limit).collect()
    }

    /// `[D, X]` for a matrix on this truncation.
    pub fn commutator(&self, x: &SparseMatrix) -> SparseMatrix {
        let d = self.matrix();
        d.mul(x).sub(&x.mul(&d))
    }

    /// `T^k = C^{1/2}` as a scaling of the basis: `sqrt((dim_q / dim) F_ii)`.
    pub fn twist(&self) -> Vec<f64> {
        self.basis.per_vector(twist_factor)
    }
}

fn twist_factor(b: &BasisBlock, i: usize) -> f64 {
    (b.info.qdim / b.info.dim as f64 * b.info.f_diag.get(i)).sqrt()
}

pub fn dirac(instance: &QuantumGroupInstance, l: &LengthFunction, m: usize) -> Result<DiracTruncation> {
    let basis = GnsBasis::new(instance, l, m)?;
    let diag = basis.lengths();
    let shells = basis.shells();
    Ok(DiracTruncation { basis, diag, shells })
}

/// `T_j = sum_m p_m a p_{m-j}` on a truncation.
#[derive(Clone, Debug)]
pub struct BandDecomposition {
    pub m: usize,
    /// Filtration degree of the element, `ceil(max length in its support)`.
    pub p: usize,
    pub bands: BTreeMap<i64, SparseMatrix>,
}

impl BandDecomposition {
    /// `sum_j T_j`, the left-regular matrix.
    pub fn reconstruct(&self) -> SparseMatrix {
        self.weighted(|_| 1.0)
    }

    /// `sum_j j^k T_j`.
    pub fn delta_k(&self, k: u32) -> SparseMatrix {
        self.weighted(|j| (j as f64).powi(k as i32))
    }

    fn weighted(&self, w: impl Fn(i64) -> f64) -> SparseMatrix {
        let mut iter = self.bands.iter();
        let (&j0, first) = iter.next().expect("at least one band");
        let mut acc = first.scaled(Complex64::new(w(j0), 0.0));
        for (&j, t) in iter {
            acc = acc.add(&t.scaled(Complex64::new(w(j), 0.0)));
        }
        acc
    }
}

fn filtration_degree(x: &GroupAlgElement, l: &LengthFunction) -> Result<usize> {
    Ok(shell_index(x.support_length(l)?))
}

/// Splits the left-regular matrix of `a` into shell bands.
pub fn commutator_bands(
    instance: &QuantumGroupInstance,
    a: &GroupAlgElement,
    l: &LengthFunction,
    m: usize,
) -> Result<BandDecomposition> {
    let d = dirac(instance, l, m)?;
    bands_on(instance, a, l, &d)
}

/// [`commutator_bands`] on a prebuilt Dirac truncation.
pub fn bands_on(
    instance: &QuantumGroupInstance,
    a: &GroupAlgElement,
    l: &LengthFunction,
    d: &DiracTruncation,
) -> Result<BandDecomposition> {
    let p = filtration_degree(a, l)?;
    if 2 * p > d.truncation() {
        return Err(Error::SupportTooLarge {
            support: p as f64,
            truncation: d.truncation(),
        });
    }
    let x = left_regular_in(instance, a, l, &d.basis)?;
    let mut split: BTreeMap<i64, Vec<(usize, usize, Complex64)>> = BTreeMap::new();
    for (r, c, v) in x.iter() {
        let j = d.shells[r] as i64 - d.shells[c] as i64;
        split.entry(j).or_default().push((r, c, v));
    }
    let n = x.nrows();
    let mut bands: BTreeMap<i64, SparseMatrix> = split
        .into_iter()
        .map(|(j, t)| (j, SparseMatrix::from_triplets(n, n, t)))
        .collect();
    if bands.is_empty() {
        bands.insert(0, SparseMatrix::zeros(n, n));
    }
    Ok(BandDecomposition { m: d.truncation(), p, bands })
}

/// `delta^k(a) = sum_j j^k T_j` on the truncation `l <= M`.
pub fn delta_k(instance: &QuantumGroupInstance, a: &GroupAlgElement, k: u32, l: &LengthFunction, m: usize) -> Result<SparseMatrix> {
    Ok(commutator_bands(instance, a, l, m)?.delta_k(k))
}

/// `k`-fold commutator `[D, [D, ..., X]]` by sparse products.
pub fn iterated_commutator(d: &DiracTruncation, x: &SparseMatrix, k: u32) -> SparseMatrix {
    let mut out = x.clone();
    for _ in 0..k {
        out = d.commutator(&out);
    }
    out
}

/// `T^k delta^k(a) T^k` on a truncation.
pub fn twisted_delta_on(
    instance: &QuantumGroupInstance,
    a: &GroupAlgElement,
    k: u32,
    l: &LengthFunction,
    d: &DiracTruncation,
) -> Result<SparseMatrix> {
    let x = left_regular_in(instance, a, l, &d.basis)?;
    let t = d.twist();
    Ok(x.map_entries(|r, c, v| v * ((d.diag[r] - d.diag[c]).powi(k as i32) * t[r] * t[c])))
}

/// `L^k_T(a) = ||T^k delta^k(a) T^k||` at a single truncation.
pub fn lip_seminorm_at(instance: &QuantumGroupInstance, a: &GroupAlgElement, k: u32, l: &LengthFunction, m: usize) -> Result<f64> {
    let d = dirac(instance, l, m)?;
    Ok(spectral_norm(&twisted_delta_on(instance, a, k, l, &d)?))
}

/// `L^k_T(a)` with the truncation sweep of
/// [`op_norm`](crate::grp_alg::op_norm): a certified lower bound and a
/// convergence flag.
pub fn lip_seminorm(
    instance: &QuantumGroupInstance,
    a: &GroupAlgElement,
    k: u32,
    l: &LengthFunction,
    m0: usize,
    tol: f64,
    m_max: usize,
) -> Result<OpNormEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("seminorm order k must be at least 1".into()));
    }
    let m0 = m0.max(filtration_degree(a, l)?);
    op_norm_with(m0, tol, m_max.max(m0), |m| lip_seminorm_at(instance, a, k, l, m))
}

/// The untwisted `L^k(a) = ||delta^k(a)||` at a single truncation.
pub fn lip_untwisted_at(instance: &QuantumGroupInstance, a: &GroupAlgElement, k: u32, l: &LengthFunction, m: usize) -> Result<f64> {
    let d = dirac(instance, l, m)?;
    let x = left_regular_in(instance, a, l, &d.basis)?;
    Ok(spectral_norm(&x.map_entries(|r, c, v| v * (d.diag[r] - d.diag[c]).powi(k as i32))))
}

/// `sum dim(alpha)^-1 l(alpha)^{2k} |a^alpha_ij|^2`, which never exceeds
/// `L^k_T(a)^2`: it is the squared norm of the image of the unit vector.
pub fn lip_lower_bound(instance: &QuantumGroupInstance, a: &GroupAlgElement, k: u32, l: &LengthFunction) -> Result<f64> {
    let mut acc = 0.0;
    for (label, m) in a.blocks() {
        let len = l.get(label)?;
        acc += len.powi(2 * k as i32) / instance.dim(label)? as f64 * m.norm_squared();
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summability {
    Convergent,
    Divergent,
    Indeterminate,
}

/// Cutoffs of the summability heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityThresholds {
    /// Terms growing geometrically faster than this per shell diverge.
    pub ratio: f64,
    /// Terms decaying like `n^-e` with `e` above this converge.
    pub exponent: f64,
}

impl Default for SummabilityThresholds {
    fn default() -> Self {
        SummabilityThresholds {
            ratio: 1.01,
            exponent: 1.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub p: f64,
    /// `(n, sum_{0 < l <= n} dim^2 l^-p)` for `n = 1..=N`.
    pub partial_sums: Vec<(usize, f64)>,
    pub verdict: Summability,
    /// Per-shell geometric growth of the terms over the last half.
    pub tail_ratio: f64,
    /// Fitted decay exponent of the terms over the last half.
    pub decay_exponent: f64,
    /// `2 s + 1` when a growth exponent `s` was supplied.
    pub threshold: Option<f64>,
    /// Whether `p` exceeds that threshold.
    pub above_threshold: Option<bool>,
}

impl SummabilityReport {
    pub fn final_sum(&self) -> f64 {
        self.partial_sums.last().map_or(0.0, |r| r.1)
    }

    /// CSV with columns `n,partial_sum`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,partial_sum\n");
        for (n, v) in &self.partial_sums {
            s.push_str(&format!("{},{}\n", n, fmt_num(*v)));
        }
        s
    }
}

/// Partial sums of `Tr(D^-p) = sum_{alpha != e} dim(alpha)^2 l(alpha)^-p`
/// with a convergence verdict.
pub fn summability_partial(
    instance: &QuantumGroupInstance,
    l: &LengthFunction,
    p: f64,
    n_max: usize,
    s_est: Option<f64>,
    thresholds: SummabilityThresholds,
) -> Result<SummabilityReport> {
    if p <= 0.0 {
        return Err(Error::InvalidArgument(format!("p = {p} must be positive")));
    }
    let dec = shells(instance, l, n_max)?;
    let mut terms = vec![0.0f64; n_max + 1];
    for shell in dec.shells.iter().skip(1) {
        for label in &shell.labels {
            let d = instance.dim(label)? as f64;
            terms[shell.n] += d * d * l.get(label)?.powf(-p);
        }
    }
    let mut partial_sums = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    for (n, t) in terms.iter().enumerate().skip(1) {
        acc += t;
        partial_sums.push((n, acc));
    }

    let lo = n_max.div_ceil(2).max(1);
    let tail: Vec<(f64, f64)> = (lo..=n_max)
        .filter(|&n| terms[n] > 0.0)
        .map(|n| ((n as f64).ln(), terms[n].ln()))
        .collect();
    let (tail_ratio, decay_exponent, verdict) = if tail.len() < 2 {
        (f64::NAN, f64::NAN, Summability::Indeterminate)
    } else {
        let (first, last) = (tail[0], tail[tail.len() - 1]);
        let steps = last.0.exp() - first.0.exp();
        let ratio = ((last.1 - first.1) / steps).exp();
        let (slope, _, _) = least_squares(&tail);
        let exponent = -slope;
        let verdict = if ratio > thresholds.ratio {
            Summability::Divergent
        } else if exponent > thresholds.exponent {
            Summability::Convergent
        } else {
            Summability::Divergent
        };
        (ratio, exponent, verdict)
    };
    let threshold = s_est.map(|s| 2.0 * s + 1.0);
    Ok(SummabilityReport {
        p,
        partial_sums,
        verdict,
        tail_ratio,
        decay_exponent,
        threshold,
        above_threshold: threshold.map(|t| p > t),
    })
}

/// Ordinary least squares `y = slope x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| {
            let e = p.1 - slope * p.0 - intercept;
            e * e
        })
        .sum();
    (slope, intercept, (rss / n).sqrt())
}
