//! Polynomial growth and the shell form of property RD, tested
//! numerically.
//!
//! `growth_table` lists the classical and quantum shell sums, `fit_growth`
//! classifies a column as polynomial or exponential, and `rd_test` samples
//! Gaussian elements on each shell and records
//! `r_n = max ||F(f)||_op / ||f||_{2,0}`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::fun_alg::{fourier, haar_phi, q_n, sobolev_norm_cc, CcElement};
use crate::grp_alg::{left_regular_in, op_norm_with, GnsBasis};
use crate::instance::QuantumGroupInstance;
use crate::length::{shells, LengthFunction};
use crate::linalg::spectral_norm;
use crate::random::{gaussian_block, stream};
use crate::spectral::least_squares;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub count: usize,
    pub sum_dim2: u128,
    pub sum_qdim2: f64,
    /// `phi(q_n)`, evaluated through the Haar weight.
    pub phi_qn: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,count,sum_dim2,sum_qdim2,phi_qn\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                r.count,
                r.sum_dim2,
                fmt_num(r.sum_qdim2),
                fmt_num(r.phi_qn)
            ));
        }
        s
    }

    /// Largest relative gap between `sum dim^2` and `phi(q_n)`.
    pub fn cross_check(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let a = r.sum_dim2 as f64;
                (a - r.phi_qn).abs() / a.max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Shell sums for `n = 0..=N`.
pub fn growth_table(instance: &QuantumGroupInstance, l: &LengthFunction, n_max: usize) -> Result<GrowthTable> {
    let dec = shells(instance, l, n_max)?;
    let mut rows = Vec::with_capacity(n_max + 1);
    for s in dec.shells {
        let q = q_n(instance, s.labels.iter())?;
        let phi = haar_phi(instance, &q)?.re;
        rows.push(GrowthRow {
            n: s.n,
            count: s.count,
            sum_dim2: s.sum_dim2,
            sum_qdim2: s.sum_qdim2,
            phi_qn: phi,
        });
    }
    Ok(GrowthTable { rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthColumn {
    /// `sum dim(alpha)^2`
    Classical,
    /// `sum dim_q(alpha)^2`
    Quantum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    Polynomial,
    Exponential,
    Indeterminate,
}

/// Cutoffs of the growth classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthThresholds {
    /// Largest change of the log-log slope between the two quarters of
    /// the tail for a column to count as polynomial.
    pub slope_change: f64,
    /// Smallest per-step log slope for a column to count as exponential.
    pub exp_slope: f64,
}

impl Default for GrowthThresholds {
    fn default() -> Self {
        GrowthThresholds {
            slope_change: 0.25,
            exp_slope: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub column: GrowthColumn,
    pub verdict: GrowthVerdict,
    /// Slope of `log(sum)` against `log(1 + n)` over `n >= 2`.
    pub degree: f64,
    pub power_residual: f64,
    /// Slope of `log(sum)` against `n` over `n >= 2`.
    pub exp_slope: f64,
    pub exp_residual: f64,
    pub tail_slope_change: f64,
}

pub fn fit_growth(table: &GrowthTable, column: GrowthColumn) -> Result<GrowthFit> {
    fit_growth_with(table, column, GrowthThresholds::default())
}

pub fn fit_growth_with(table: &GrowthTable, column: GrowthColumn, th: GrowthThresholds) -> Result<GrowthFit> {
    if table.rows.len() < 9 {
        return Err(Error::DegenerateTable(format!(
            "{} rows, at least 9 (N >= 8) needed",
            table.rows.len()
        )));
    }
    let value = |r: &GrowthRow| match column {
        GrowthColumn::Classical => r.sum_dim2 as f64,
        GrowthColumn::Quantum => r.sum_qdim2,
    };
    if table.rows.iter().skip(1).all(|r| value(r) == 0.0) {
        return Err(Error::DegenerateTable("all shell sums vanish beyond n = 0".into()));
    }
    let rows: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.n >= 2 && value(r) > 0.0)
        .map(|r| (r.n as f64, value(r).ln()))
        .collect();
    if rows.len() < 4 {
        return Err(Error::DegenerateTable("too few nonzero shells".into()));
    }
    let loglog: Vec<(f64, f64)> = rows.iter().map(|&(n, y)| ((1.0 + n).ln(), y)).collect();
    let (degree, _, power_residual) = least_squares(&loglog);
    let (exp_slope, _, exp_residual) = least_squares(&rows);

    let half = loglog.len() / 2;
    let tail = &loglog[half..];
    let mid = tail.len() / 2;
    let (s1, _, _) = least_squares(&tail[..=mid.max(1)]);
    let (s2, _, _) = least_squares(&tail[mid.min(tail.len() - 2)..]);
    let tail_slope_change = (s2 - s1).abs();

    let verdict = if exp_residual < power_residual && exp_slope > th.exp_slope {
        GrowthVerdict::Exponential
    } else if tail_slope_change < th.slope_change {
        GrowthVerdict::Polynomial
    } else {
        GrowthVerdict::Indeterminate
    };
    Ok(GrowthFit {
        column,
        verdict,
        degree,
        power_residual,
        exp_slope,
        exp_residual,
        tail_slope_change,
    })
}

/// Classical against quantum-dimension growth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub unimodular: bool,
    pub classical: GrowthFit,
    pub quantum: GrowthFit,
}

impl ContrastReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("column,verdict,degree,power_residual,exp_slope,exp_residual,tail_slope_change\n");
        for f in [&self.classical, &self.quantum] {
            let name = match f.column {
                GrowthColumn::Classical => "classical",
                GrowthColumn::Quantum => "quantum",
            };
            let verdict = match f.verdict {
                GrowthVerdict::Polynomial => "polynomial",
                GrowthVerdict::Exponential => "exponential",
                GrowthVerdict::Indeterminate => "indeterminate",
            };
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                name,
                verdict,
                fmt_num(f.degree),
                fmt_num(f.power_residual),
                fmt_num(f.exp_slope),
                fmt_num(f.exp_residual),
                fmt_num(f.tail_slope_change)
            ));
        }
        s
    }
}

pub fn compare_modular(instance: &QuantumGroupInstance, l: &LengthFunction, n_max: usize) -> Result<ContrastReport> {
    let table = growth_table(instance, l, n_max)?;
    Ok(ContrastReport {
        unimodular: instance.is_unimodular(),
        classical: fit_growth(&table, GrowthColumn::Classical)?,
        quantum: fit_growth(&table, GrowthColumn::Quantum)?,
    })
}

/// Sampling and truncation settings of [`rd_test`].
///
/// Shell `n` is measured on truncations from `m_scale * n + m_offset` up
/// to `m_extra` beyond that, in steps of two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdConfig {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub m_scale: usize,
    pub m_offset: usize,
    pub m_extra: usize,
    /// First shell entering the regression.
    pub fit_from: usize,
}

impl RdConfig {
    /// Defaults sized to the instance: one-dimensional blocks make large
    /// truncations cheap, so shells of abelian and free duals are resolved
    /// much further out.
    pub fn for_instance(instance: &QuantumGroupInstance, samples: usize, seed: u64) -> Self {
        let cheap = matches!(
            instance.kind(),
            crate::instance::InstanceKind::Lattice { .. } | crate::instance::InstanceKind::FreeGroup { .. }
        );
        RdConfig {
            samples,
            seed,
            tol: 1e-3,
            m_scale: if cheap { 8 } else { 1 },
            m_offset: if cheap { 8 } else { 2 },
            m_extra: if cheap { 8 } else { 2 },
            fit_from: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdRow {
    pub n: usize,
    /// Largest sampled ratio.
    pub ratio: f64,
    /// `sqrt(4 sum_{S^n} dim^2)`.
    pub chain_bound: f64,
    pub bound_ok: bool,
    /// Every sample's operator norm stabilized.
    pub converged: bool,
    pub m_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdReport {
    pub config: RdConfig,
    pub rows: Vec<RdRow>,
    /// Fitted exponent of `r_n ~ c (1 + n)^s`.
    pub s: f64,
    /// Smallest `c` with `r_n <= c (1 + n)^s` on every shell.
    pub c: f64,
    pub residual: f64,
}

impl RdReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,ratio,chain_bound,bound_ok,converged,m_used\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                fmt_num(r.ratio),
                fmt_num(r.chain_bound),
                r.bound_ok,
                r.converged,
                r.m_used
            ));
        }
        s
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.rows.iter().all(|r| r.bound_ok)
    }
}

/// Samples Gaussian `f` on every shell `n <= n_max` and records the largest
/// ratio `||F(f)||_op / ||f||_{2,0}`.
pub fn rd_test(instance: &QuantumGroupInstance, l: &LengthFunction, n_max: usize, cfg: &RdConfig) -> Result<RdReport> {
    if !instance.has_intertwiners() {
        return Err(Error::CapabilityAbsent {
            instance: instance.name().to_string(),
            capability: "intertwiner",
        });
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("at least one sample per shell is needed".into()));
    }
    let dec = shells(instance, l, n_max)?;
    let mut bases: HashMap<usize, GnsBasis> = HashMap::new();
    let mut rows = Vec::with_capacity(n_max + 1);
    for shell in &dec.shells {
        let n = shell.n;
        let m0 = cfg.m_scale * n + cfg.m_offset;
        let m_max = m0 + cfg.m_extra;
        for m in (m0..=m_max).step_by(2) {
            if let std::collections::hash_map::Entry::Vacant(e) = bases.entry(m) {
                e.insert(GnsBasis::new(instance, l, m)?);
            }
        }
        let samples: Vec<Result<(f64, bool, usize)>> = (0..cfg.samples)
            .into_par_iter()
            .map(|idx| {
                let mut rng = stream(cfg.seed, n as u64, idx as u64);
                let mut blocks = Vec::new();
                for label in &shell.labels {
                    let d = instance.dim(label)? as usize;
                    blocks.push((label.clone(), gaussian_block(&mut rng, d)));
                }
                let f = CcElement::from_blocks(instance, blocks)?;
                let x = fourier(instance, &f)?;
                let denom = sobolev_norm_cc(instance, &f, l, 0.0)?;
                let est = op_norm_with(m0, cfg.tol, m_max, |m| {
                    Ok(spectral_norm(&left_regular_in(instance, &x, l, &bases[&m])?) / denom)
                })?;
                Ok((est.value, est.converged, est.m_used))
            })
            .collect();
        let mut ratio = 0.0f64;
        let mut converged = true;
        let mut m_used = 0;
        for s in samples {
            let (r, c, m) = s?;
            ratio = ratio.max(r);
            converged &= c;
            m_used = m_used.max(m);
        }
        let chain_bound = (4.0 * shell.sum_dim2 as f64).sqrt();
        rows.push(RdRow {
            n,
            ratio,
            chain_bound,
            bound_ok: ratio <= chain_bound * (1.0 + cfg.tol),
            converged,
            m_used,
        });
        if !converged {
            log::warn!("shell {n}: operator norm did not stabilize by M = {m_used}");
        }
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= cfg.fit_from && r.ratio > 0.0)
        .map(|r| ((1.0 + r.n as f64).ln(), r.ratio.ln()))
        .collect();
    let (s, _, residual) = if pts.len() >= 2 {
        least_squares(&pts)
    } else {
        (0.0, 0.0, 0.0)
    };
    let c = rows
        .iter()
        .map(|r| r.ratio / (1.0 + r.n as f64).powf(s))
        .fold(0.0, f64::max);
    Ok(RdReport {
        config: cfg.clone(),
        rows,
        s,
        c,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{q_integer, InstanceDescriptor};
    use crate::length::word_length;

    fn setup(d: InstanceDescriptor, r: usize) -> (QuantumGroupInstance, LengthFunction) {
        let g = QuantumGroupInstance::build(&d).unwrap();
        let l = word_length(&g, &g.canonical_generators(), r).unwrap();
        (g, l)
    }

    #[test]
    fn growth_rows() {
        let (g, l) = setup(InstanceDescriptor::su_q_2(0.5), 10);
        let t = growth_table(&g, &l, 10).unwrap();
        for r in &t.rows {
            let n = r.n as u32;
            assert_eq!(r.count, 1);
            assert_eq!(r.sum_dim2, ((n + 1) * (n + 1)) as u128);
            let qn = q_integer(n + 1, 0.5);
            assert!((r.sum_qdim2 - qn * qn).abs() <= 1e-12 * qn * qn);
        }
        assert!(t.cross_check() < 1e-12);
        let (on, l) = setup(InstanceDescriptor::o_n_plus(3), 3);
        let t = growth_table(&on, &l, 3).unwrap();
        let d2: Vec<u128> = t.rows.iter().map(|r| r.sum_dim2).collect();
        assert_eq!(d2, vec![1, 9, 64, 441]);
    }

    #[test]
    fn verdicts() {
        let (g, l) = setup(InstanceDescriptor::su_q_2(0.5), 40);
        let c = compare_modular(&g, &l, 40).unwrap();
        assert_eq!(c.classical.verdict, GrowthVerdict::Polynomial);
        assert!((c.classical.degree - 2.0).abs() < 0.2);
        assert_eq!(c.quantum.verdict, GrowthVerdict::Exponential);
        assert!((c.quantum.exp_slope - 4f64.ln()).abs() < 0.1);
        let (z, l) = setup(InstanceDescriptor::z_d(1), 40);
        let c = compare_modular(&z, &l, 40).unwrap();
        assert_eq!(c.classical, GrowthFit { column: GrowthColumn::Classical, ..c.quantum.clone() });
        assert_eq!(c.classical.verdict, GrowthVerdict::Polynomial);
        assert!(c.classical.degree.abs() < 1e-12);
        let (on, l) = setup(InstanceDescriptor::o_n_plus(3), 40);
        let c = compare_modular(&on, &l, 40).unwrap();
        assert_eq!(c.classical.verdict, GrowthVerdict::Exponential);
        assert_eq!(c.quantum.verdict, GrowthVerdict::Exponential);
    }

    #[test]
    fn short_tables_are_degenerate() {
        let (g, l) = setup(InstanceDescriptor::su_q_2(0.5), 5);
        let t = growth_table(&g, &l, 5).unwrap();
        assert!(matches!(fit_growth(&t, GrowthColumn::Classical), Err(Error::DegenerateTable(_))));
    }

    #[test]
    fn trivial_shell_has_ratio_one() {
        let (g, l) = setup(InstanceDescriptor::su_q_2(0.5), 10);
        let cfg = RdConfig::for_instance(&g, 3, 11);
        let r = rd_test(&g, &l, 1, &cfg).unwrap();
        assert!((r.rows[0].ratio - 1.0).abs() < 1e-12);
        assert!(r.all_bounds_hold());
        let (on, l) = setup(InstanceDescriptor::o_n_plus(3), 2);
        assert!(matches!(rd_test(&on, &l, 1, &cfg), Err(Error::CapabilityAbsent { .. })));
    }
}
