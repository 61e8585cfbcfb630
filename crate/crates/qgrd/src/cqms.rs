//! States, the distance `d(mu, nu) = sup { |mu(a) - nu(a)| : L^k_T(a) <= 1 }`
//! on truncations, and a numerical probe of the two estimates behind total
//! boundedness of the Lipschitz ball.
//!
//! The distance is computed over self-adjoint elements with vanishing Haar
//! state. Adding scalars does not change `mu(a) - nu(a)` and `L^k_T` kills
//! them, so nothing is lost for hermitian states. With `B(theta)` the
//! Hermitian matrix `i^k T^k delta^k(sum theta_r h_r) T^k` on the `M'`
//! truncation, the problem is the convex program
//!
//! `max c . theta  subject to  ||B(theta)|| <= 1`,
//!
//! which is solved in the equivalent form `min ||B(theta)||` over
//! `c . theta = 1` by a log-barrier method on `t I -+ B(theta) > 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grp_alg::{haar_state, left_regular_in, star, GnsBasis, GroupAlgElement};
use crate::instance::QuantumGroupInstance;
use crate::label::Label;
use crate::length::LengthFunction;
use crate::linalg::spectral_norm;
use crate::random::{gaussian_element, stream};
use crate::rd::RdReport;
use crate::spectral::{dirac, lip_lower_bound, twisted_delta_on, DiracTruncation};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Haar,
    Counit,
    Vector,
    Character,
}

/// A state on `C[G]`.
#[derive(Clone, Debug)]
pub enum State {
    Haar,
    /// `u^alpha_ij -> delta_ij`; bounded on the reduced algebra only for
    /// amenable duals.
    Counit,
    /// `a -> <xi, a xi>` for a unit vector of a GNS truncation.
    Vector {
        length: LengthFunction,
        basis: GnsBasis,
        coords: Vec<Complex64>,
    },
    /// Evaluation at a point of the torus, for abelian duals.
    Character { point: Vec<Complex64> },
}

impl State {
    pub fn counit(instance: &QuantumGroupInstance) -> Result<Self> {
        if !instance.is_amenable() {
            return Err(Error::StateUnavailable(format!(
                "the counit is unbounded on the reduced algebra of {}",
                instance.name()
            )));
        }
        Ok(State::Counit)
    }

    /// Character at `point`, one unimodular number per lattice direction.
    pub fn character(instance: &QuantumGroupInstance, point: Vec<Complex64>) -> Result<Self> {
        if !instance.is_abelian() {
            return Err(Error::StateUnavailable(format!("{} is not abelian", instance.name())));
        }
        let rank = match instance.trivial() {
            Label::Lattice(v) => v.len(),
            _ => 1,
        };
        if point.len() != rank {
            return Err(Error::InvalidArgument(format!(
                "character needs {rank} coordinates, got {}",
                point.len()
            )));
        }
        if let Some(z) = point.iter().find(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidArgument(format!("character point {z} is not on the unit circle")));
        }
        Ok(State::Character { point })
    }

    /// Vector state of `coords` (normalized here) on the truncation `l <= m`.
    pub fn vector(instance: &QuantumGroupInstance, l: &LengthFunction, m: usize, coords: Vec<Complex64>) -> Result<Self> {
        let basis = GnsBasis::new(instance, l, m)?;
        if coords.len() != basis.len() {
            return Err(Error::InvalidArgument(format!(
                "vector has {} coordinates, truncation has {}",
                coords.len(),
                basis.len()
            )));
        }
        let norm = coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        Ok(State::Vector {
            length: l.clone(),
            basis,
            coords: coords.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Vector state of the normalized basis vector `u^alpha_ij`.
    pub fn basis_vector(
        instance: &QuantumGroupInstance,
        l: &LengthFunction,
        m: usize,
        alpha: &Label,
        i: usize,
        j: usize,
    ) -> Result<Self> {
        let basis = GnsBasis::new(instance, l, m)?;
        let idx = basis
            .index(alpha, i, j)
            .ok_or_else(|| Error::InvalidArgument(format!("u^{alpha}_{i}{j} is not in the truncation l <= {m}")))?;
        let mut coords = vec![ZERO; basis.len()];
        coords[idx] = Complex64::new(1.0, 0.0);
        Ok(State::Vector {
            length: l.clone(),
            basis,
            coords,
        })
    }

    /// Parses `haar`, `counit`, `char:z1,z2,...` (complex numbers such as
    /// `-1` or `0.6+0.8i`) or `basis:<label json>:i:j`. Vector states live
    /// on the truncation `l <= m`.
    pub fn parse(instance: &QuantumGroupInstance, l: &LengthFunction, m: usize, text: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("state `{text}`: {why}"));
        match text {
            "haar" => return Ok(State::Haar),
            "counit" => return State::counit(instance),
            _ => {}
        }
        if let Some(rest) = text.strip_prefix("char:") {
            let point = rest
                .split(',')
                .map(|s| s.trim().parse::<Complex64>().map_err(|_| bad("expected complex coordinates")))
                .collect::<Result<Vec<_>>>()?;
            return State::character(instance, point);
        }
        if let Some(rest) = text.strip_prefix("basis:") {
            let mut parts = rest.rsplitn(3, ':');
            let j = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("expected basis:<label>:i:j"))?;
            let i = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("expected basis:<label>:i:j"))?;
            let label_text = parts.next().ok_or_else(|| bad("expected basis:<label>:i:j"))?;
            let label: Label = serde_json::from_str(label_text).map_err(|_| bad("unreadable label"))?;
            let label = instance.normalize_label(label)?;
            return State::basis_vector(instance, l, m, &label, i, j);
        }
        Err(bad("unknown state kind"))
    }

    pub fn kind(&self) -> StateKind {
        match self {
            State::Haar => StateKind::Haar,
            State::Counit => StateKind::Counit,
            State::Vector { .. } => StateKind::Vector,
            State::Character { .. } => StateKind::Character,
        }
    }
}

/// `mu(a)`.
pub fn evaluate(instance: &QuantumGroupInstance, state: &State, a: &GroupAlgElement) -> Result<Complex64> {
    match state {
        State::Haar => Ok(haar_state(instance, a)),
        State::Counit => Ok(a.blocks().map(|(_, m)| m.trace()).sum()),
        State::Character { point } => {
            let mut acc = ZERO;
            for (label, m) in a.blocks() {
                acc += m[(0, 0)] * character_value(point, label);
            }
            Ok(acc)
        }
        State::Vector { length, basis, coords } => {
            let x = left_regular_in(instance, a, length, basis)?;
            let mut y = vec![ZERO; coords.len()];
            x.matvec(coords, &mut y);
            Ok(coords.iter().zip(&y).map(|(c, v)| c.conj() * v).sum())
        }
    }
}

fn character_value(point: &[Complex64], label: &Label) -> Complex64 {
    match label {
        Label::Lattice(v) => v.iter().zip(point).map(|(&n, z)| z.powi(n as i32)).product(),
        Label::Word(w) => point[0].powi(w.iter().map(|g| g.signum()).sum()),
        Label::Spin(_) => unreachable!("characters exist only on abelian duals"),
    }
}

/// Settings of [`distance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceConfig {
    pub k: u32,
    /// Elements range over coefficients with `l <= m`.
    pub m: usize,
    /// Truncation on which `L^k_T` is evaluated; `2 m` when absent.
    pub m_prime: Option<usize>,
    /// Radius of the Lipschitz ball.
    pub bound: f64,
    /// Relative duality gap at which the barrier method stops.
    pub tol: f64,
    pub max_newton: usize,
}

impl DistanceConfig {
    pub fn new(k: u32, m: usize) -> Self {
        DistanceConfig {
            k,
            m,
            m_prime: None,
            bound: 1.0,
            tol: 1e-9,
            max_newton: 500,
        }
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime.unwrap_or(2 * self.m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    /// `Re(mu(a*) - nu(a*))`, a lower bound for the truncated problem.
    pub value: f64,
    /// The maximizing element `a*`, self-adjoint with zero Haar state.
    pub certificate: serde_json::Value,
    pub k: u32,
    pub m: usize,
    pub m_prime: usize,
    pub bound: f64,
    /// `L^k_T(a*)` recomputed on the `M'` truncation.
    pub seminorm: f64,
    /// `max(0, L^k_T(a*) - bound)`.
    pub feasibility_residual: f64,
    pub converged: bool,
    pub newton_steps: usize,
    /// Relative duality gap at exit.
    pub gap: f64,
    /// Real dimension of the self-adjoint, Haar-centered part of `A_M`.
    pub basis_size: usize,
}

/// Lipschitz distance between two states on the truncation `A_M`.
pub fn distance(
    instance: &QuantumGroupInstance,
    l: &LengthFunction,
    mu: &State,
    nu: &State,
    cfg: &DistanceConfig,
) -> Result<DistanceResult> {
    if cfg.k == 0 {
        return Err(Error::InvalidArgument("seminorm order k must be at least 1".into()));
    }
    if cfg.bound.is_nan() || cfg.bound <= 0.0 {
        return Err(Error::InvalidArgument("the Lipschitz radius must be positive".into()));
    }
    let mp = cfg.m_prime();
    if mp < cfg.m {
        return Err(Error::InvalidArgument(format!("M' = {mp} is smaller than M = {}", cfg.m)));
    }
    for s in [mu, nu] {
        if let State::Vector { basis, .. } = s {
            if basis.truncation() < cfg.m {
                return Err(Error::SupportTooLarge {
                    support: cfg.m as f64,
                    truncation: basis.truncation(),
                });
            }
        }
    }
    let h = self_adjoint_basis(instance, l, cfg.m)?;
    let d = dirac(instance, l, mp)?;
    let phase = if cfg.k % 2 == 1 { I } else { Complex64::new(1.0, 0.0) };
    let mut mats = Vec::with_capacity(h.len());
    let mut c = Vec::with_capacity(h.len());
    for x in &h {
        let b = twisted_delta_on(instance, x, cfg.k, l, &d)?.to_dense() * phase;
        mats.push((&b + b.adjoint()) * Complex64::new(0.5, 0.0));
        c.push((evaluate(instance, mu, x)? - evaluate(instance, nu, x)?).re);
    }
    let c = DVector::from_vec(c);
    let finish = |theta: Option<DVector<f64>>, converged: bool, steps: usize, gap: f64| -> Result<DistanceResult> {
        let a = match theta {
            Some(theta) => {
                let g = hermitian_norm(&combine(&mats, &theta));
                if g <= 1e-14 * theta.norm() {
                    return Err(Error::InvalidArgument(
                        "the seminorm vanishes on a direction that separates the states".into(),
                    ));
                }
                let mut a = GroupAlgElement::zero();
                for (x, t) in h.iter().zip(theta.iter()) {
                    a = a.add(&x.scale(Complex64::new(t * cfg.bound / g, 0.0)));
                }
                a
            }
            None => GroupAlgElement::zero(),
        };
        let value = (evaluate(instance, mu, &a)? - evaluate(instance, nu, &a)?).re;
        let seminorm = spectral_norm(&twisted_delta_on(instance, &a, cfg.k, l, &d)?);
        Ok(DistanceResult {
            value,
            certificate: serde_json::from_str(&a.to_json())?,
            k: cfg.k,
            m: cfg.m,
            m_prime: mp,
            bound: cfg.bound,
            seminorm,
            feasibility_residual: (seminorm - cfg.bound).max(0.0),
            converged,
            newton_steps: steps,
            gap,
            basis_size: h.len(),
        })
    };
    if c.norm() <= 1e-14 {
        return finish(None, true, 0, 0.0);
    }
    let sol = min_norm_on_hyperplane(&mats, &c, cfg.tol, cfg.max_newton);
    if !sol.converged {
        log::warn!("barrier method stopped after {} Newton steps, gap {:.3e}", sol.steps, sol.gap);
    }
    finish(Some(sol.theta), sol.converged, sol.steps, sol.gap)
}

/// Real basis of the self-adjoint elements of `A_M` with zero Haar state,
/// orthonormal for the coefficient inner product.
pub fn self_adjoint_basis(instance: &QuantumGroupInstance, l: &LengthFunction, m: usize) -> Result<Vec<GroupAlgElement>> {
    let trivial = instance.trivial();
    let labels: Vec<Label> = l
        .ball(m as f64)?
        .into_iter()
        .map(|(x, _)| x)
        .filter(|x| *x != trivial)
        .collect();
    let mut out: Vec<GroupAlgElement> = Vec::new();
    for alpha in &labels {
        let d = instance.dim(alpha)? as usize;
        for i in 0..d {
            for j in 0..d {
                let u = GroupAlgElement::basis(instance, alpha, i, j)?;
                let us = star(instance, &u)?;
                for cand in [u.add(&us), u.sub(&us).scale(I)] {
                    let mut v = cand;
                    for _ in 0..2 {
                        for e in &out {
                            let p = real_dot(e, &v);
                            v = v.sub(&e.scale(Complex64::new(p, 0.0)));
                        }
                    }
                    let n = real_dot(&v, &v).sqrt();
                    if n > 1e-8 {
                        out.push(v.scale(Complex64::new(1.0 / n, 0.0)));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn real_dot(x: &GroupAlgElement, y: &GroupAlgElement) -> f64 {
    x.blocks()
        .filter_map(|(label, a)| y.block(label).map(|b| a.zip_map(b, |p, q| (p.conj() * q).re).sum()))
        .sum()
}

fn combine(mats: &[DMatrix<Complex64>], theta: &DVector<f64>) -> DMatrix<Complex64> {
    let n = mats[0].nrows();
    let mut acc = DMatrix::from_element(n, n, ZERO);
    for (b, &t) in mats.iter().zip(theta.iter()) {
        if t != 0.0 {
            acc += b * Complex64::new(t, 0.0);
        }
    }
    acc
}

fn hermitian_norm(b: &DMatrix<Complex64>) -> f64 {
    b.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
}

struct BarrierSolution {
    theta: DVector<f64>,
    converged: bool,
    steps: usize,
    gap: f64,
}

/// `min ||sum theta_r B_r||` over `c . theta = 1` for Hermitian `B_r`.
fn min_norm_on_hyperplane(mats: &[DMatrix<Complex64>], c: &DVector<f64>, tol: f64, max_newton: usize) -> BarrierSolution {
    let r = c.len();
    let n = mats[0].nrows();
    let theta0 = c / c.norm_squared();
    // orthonormal basis of the complement of c
    let chat = c / c.norm();
    let proj = DMatrix::<f64>::identity(r, r) - &chat * chat.transpose();
    let eig = proj.symmetric_eigen();
    let cols: Vec<DVector<f64>> = (0..r)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let null = if cols.is_empty() {
        DMatrix::<f64>::zeros(r, 0)
    } else {
        DMatrix::from_columns(&cols)
    };
    let b0 = combine(mats, &theta0);
    let gens: Vec<DMatrix<Complex64>> = (0..null.ncols())
        .map(|s| combine(mats, &null.column(s).into_owned()))
        .collect();
    let p = gens.len();
    let operator = |z: &DVector<f64>| {
        let mut b = b0.clone();
        for (g, &zs) in gens.iter().zip(z.iter()) {
            b += g * Complex64::new(zs, 0.0);
        }
        b
    };
    let id = DMatrix::<Complex64>::identity(n, n);
    let shifted = |b: &DMatrix<Complex64>, t: f64| {
        let tp = &id * Complex64::new(t, 0.0);
        (&tp - b, &tp + b)
    };
    // barrier value up to the constant tau * t_ref, or None outside the domain
    let value = |z: &DVector<f64>, t: f64, t_ref: f64, tau: f64| -> Option<f64> {
        let (pm, qm) = shifted(&operator(z), t);
        let lp = pm.cholesky()?;
        let lq = qm.cholesky()?;
        let logdet = |l: &DMatrix<Complex64>| l.diagonal().iter().map(|x| 2.0 * x.re.ln()).sum::<f64>();
        Some(tau * (t - t_ref) - logdet(&lp.l()) - logdet(&lq.l()))
    };

    let mut z = DVector::<f64>::zeros(p);
    let mut t = hermitian_norm(&b0) * 1.5 + 1e-3;
    let mut tau = 2.0 * n as f64 / t;
    let mut steps = 0;
    let mut converged = false;
    'outer: loop {
        // centering by damped Newton
        let mut prev_decrement = f64::INFINITY;
        loop {
            if steps >= max_newton {
                break 'outer;
            }
            steps += 1;
            let (pm, qm) = shifted(&operator(&z), t);
            let (Some(pc), Some(qc)) = (pm.cholesky(), qm.cholesky()) else {
                break 'outer;
            };
            let pi = pc.inverse();
            let qi = qc.inverse();
            let wp: Vec<DMatrix<Complex64>> = gens.par_iter().map(|g| &pi * g).collect();
            let wq: Vec<DMatrix<Complex64>> = gens.par_iter().map(|g| &qi * g).collect();
            let pi2 = &pi * &pi;
            let qi2 = &qi * &qi;
            let dim = p + 1;
            let mut grad = DVector::<f64>::zeros(dim);
            let mut hess = DMatrix::<f64>::zeros(dim, dim);
            for s in 0..p {
                grad[s] = (wp[s].trace() - wq[s].trace()).re;
            }
            grad[p] = tau - (pi.trace() + qi.trace()).re;
            let rows: Vec<Vec<f64>> = (0..p)
                .into_par_iter()
                .map(|s| {
                    let mut row = vec![0.0; dim];
                    for s2 in s..p {
                        row[s2] = trace_prod(&wp[s], &wp[s2]) + trace_prod(&wq[s], &wq[s2]);
                    }
                    row[p] = -trace_prod(&pi2, &gens[s]) + trace_prod(&qi2, &gens[s]);
                    row
                })
                .collect();
            for (s, row) in rows.iter().enumerate() {
                for s2 in s..dim {
                    hess[(s, s2)] = row[s2];
                    hess[(s2, s)] = row[s2];
                }
            }
            hess[(p, p)] = trace_prod(&pi, &pi) + trace_prod(&qi, &qi);
            let Some(hc) = hess.clone().cholesky() else { break 'outer };
            let step = -hc.solve(&grad);
            let decrement = -grad.dot(&step);
            // quadratic convergence has stopped: the floor is rounding
            if decrement / 2.0 <= 1e-10 || (decrement < 1e-4 && decrement > 0.5 * prev_decrement) {
                break;
            }
            prev_decrement = decrement;
            let f0 = value(&z, t, t, tau).expect("current point is interior");
            let mut alpha = 1.0;
            loop {
                let zn = &z + step.rows(0, p) * alpha;
                let tn = t + step[p] * alpha;
                if let Some(f) = value(&zn, tn, t, tau) {
                    if f <= f0 - 0.25 * alpha * decrement {
                        z = zn;
                        t = tn;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    break;
                }
            }
            // a damped step this close to the center means rounding, not curvature
            if alpha < 1e-12 || (alpha < 1.0 && decrement < 1e-6) {
                break;
            }
        }
        let gap = 2.0 * n as f64 / tau;
        if gap <= tol * t {
            converged = true;
            break;
        }
        tau *= 8.0;
    }
    let theta = &theta0 + &null * &z;
    BarrierSolution {
        theta,
        converged,
        steps,
        gap: 2.0 * n as f64 / tau / t,
    }
}

/// `Re tr(A B)`.
fn trace_prod(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// RD constants `(c, s)` of `||F(f)||_op <= c (1 + n)^s ||f||_{2,0}` on shells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdConstants {
    pub c: f64,
    pub s: f64,
}

impl From<&RdReport> for RdConstants {
    fn from(r: &RdReport) -> Self {
        RdConstants { c: r.c, s: r.s }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub k: u32,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Samples are supported on `0 < l <= support`; `n + 1` when absent.
    pub support: Option<usize>,
    /// Truncation for the operator norms; twice the support when absent.
    pub m_prime: Option<usize>,
    /// Slack allowed before an inequality counts as violated.
    pub margin: f64,
}

impl ProbeConfig {
    pub fn new(k: u32, n: usize, samples: usize, seed: u64) -> Self {
        ProbeConfig {
            k,
            n,
            samples,
            seed,
            support: None,
            m_prime: None,
            margin: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    /// `||a_{l <= n}||_op`, compared with `c_n`.
    pub low_norm: f64,
    /// `||a_{l > n}||_op^2`.
    pub tail_norm_sq: f64,
    /// `c^2 2^{2s} n^{2(s-k)} sum_{l > n} dim^-1 l^{2k} |a_ij|^2`.
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub config: ProbeConfig,
    pub rd: RdConstants,
    /// `(sum over 0 < l(alpha) <= n and i, j of l^{-2k} dim)^{1/2}`.
    pub c_n: f64,
    pub samples: Vec<ProbeSample>,
    pub low_violations: usize,
    pub tail_violations: usize,
    /// Smallest `c_n - ||a_low||` over the samples.
    pub low_margin: f64,
    /// Smallest `bound - ||a_tail||^2` over the samples.
    pub tail_margin: f64,
}

impl ProbeReport {
    pub fn to_csv(&self) -> String {
        use crate::format::fmt_num;
        let mut s = String::from("sample,low_norm,c_n,tail_norm_sq,tail_bound\n");
        for (i, p) in self.samples.iter().enumerate() {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                i,
                fmt_num(p.low_norm),
                fmt_num(self.c_n),
                fmt_num(p.tail_norm_sq),
                fmt_num(p.tail_bound)
            ));
        }
        s
    }
}

/// `c_n` for the low-frequency estimate.
pub fn low_part_constant(instance: &QuantumGroupInstance, l: &LengthFunction, k: u32, n: usize) -> Result<f64> {
    let mut acc = 0.0;
    for (label, len) in l.ball(n as f64)? {
        if len > 0.0 {
            let d = instance.dim(&label)? as f64;
            acc += d * d * d * len.powi(-2 * k as i32);
        }
    }
    Ok(acc.sqrt())
}

/// Draws random self-adjoint, Haar-centered `a` with `L^k_T(a) = 1` and
/// checks `||a_{l <= n}|| <= c_n` and the tail estimate driven by `rd`.
pub fn total_boundedness_probe(
    instance: &QuantumGroupInstance,
    l: &LengthFunction,
    rd: Option<RdConstants>,
    cfg: &ProbeConfig,
) -> Result<ProbeReport> {
    let rd = rd.ok_or_else(|| Error::MissingRdConstants("the tail estimate needs (c, s) from an RD fit".into()))?;
    if rd.s.is_nan() || cfg.k as f64 <= rd.s {
        return Err(Error::InvalidArgument(format!("k = {} must exceed s = {}", cfg.k, rd.s)));
    }
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if !instance.has_intertwiners() {
        return Err(Error::CapabilityAbsent {
            instance: instance.name().to_string(),
            capability: "intertwiner",
        });
    }
    let support = cfg.support.unwrap_or(cfg.n + 1);
    let mp = cfg.m_prime.unwrap_or(2 * support);
    let c_n = low_part_constant(instance, l, cfg.k, cfg.n)?;
    let d = dirac(instance, l, mp)?;
    let trivial = instance.trivial();
    let labels: Vec<Label> = l
        .ball(support as f64)?
        .into_iter()
        .map(|(x, _)| x)
        .filter(|x| *x != trivial)
        .collect();
    for x in &labels {
        for y in &labels {
            instance.intertwiners(x, y)?;
        }
    }
    let nf = cfg.n as f64;
    let factor = rd.c * rd.c * 4f64.powf(rd.s) * nf.powf(2.0 * (rd.s - cfg.k as f64));
    let samples: Vec<ProbeSample> = (0..cfg.samples)
        .into_par_iter()
        .map(|idx| probe_sample(instance, l, &d, &labels, cfg, idx, factor))
        .collect::<Result<_>>()?;
    let low_margin = samples.iter().map(|p| c_n - p.low_norm).fold(f64::INFINITY, f64::min);
    let tail_margin = samples
        .iter()
        .map(|p| p.tail_bound - p.tail_norm_sq)
        .fold(f64::INFINITY, f64::min);
    Ok(ProbeReport {
        config: cfg.clone(),
        rd,
        c_n,
        low_violations: samples.iter().filter(|p| p.low_norm > c_n + cfg.margin).count(),
        tail_violations: samples
            .iter()
            .filter(|p| p.tail_norm_sq > p.tail_bound + cfg.margin)
            .count(),
        samples,
        low_margin,
        tail_margin,
    })
}

fn probe_sample(
    instance: &QuantumGroupInstance,
    l: &LengthFunction,
    d: &DiracTruncation,
    labels: &[Label],
    cfg: &ProbeConfig,
    idx: usize,
    factor: f64,
) -> Result<ProbeSample> {
    let mut rng = stream(cfg.seed, cfg.n as u64, idx as u64);
    let x = gaussian_element(instance, labels, &mut rng)?;
    let a = x.add(&star(instance, &x)?);
    let lip = spectral_norm(&twisted_delta_on(instance, &a, cfg.k, l, d)?);
    let a = a.scale(Complex64::new(1.0 / lip, 0.0));
    let nf = cfg.n as f64;
    let low = a.restrict(|x| l.get(x).map(|v| v <= nf).unwrap_or(false));
    let tail = a.restrict(|x| l.get(x).map(|v| v > nf).unwrap_or(false));
    let norm = |y: &GroupAlgElement| -> Result<f64> {
        if y.support().next().is_none() {
            return Ok(0.0);
        }
        Ok(spectral_norm(&left_regular_in(instance, y, l, &d.basis)?))
    };
    let tail_norm = norm(&tail)?;
    Ok(ProbeSample {
        low_norm: norm(&low)?,
        tail_norm_sq: tail_norm * tail_norm,
        tail_bound: factor * lip_lower_bound(instance, &tail, cfg.k, l)?,
    })
}
