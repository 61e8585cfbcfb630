//! Acceptance suite. Runs every criterion at its stated tolerance and
//! prints one PASS/FAIL line each; exits nonzero if any attainable
//! criterion fails.
//!
//! Oracles here are written independently of the library: closed-form Schur
//! values, direct sums, and a brute-force grid search for the distance.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use qgrd::cqms::{distance, low_part_constant, total_boundedness_probe, DistanceConfig, ProbeConfig, RdConstants, State};
use qgrd::fun_alg::{fourier, sobolev_norm_cc, CcElement};
use qgrd::grp_alg::{haar_state, left_regular_in, multiply, sobolev_norm_cg, star, GroupAlgElement};
use qgrd::instance::{q_integer, InstanceDescriptor};
use qgrd::length::{word_length, LengthFunction};
use qgrd::random::{gaussian_block, gaussian_element, stream};
use qgrd::rd::{compare_modular, growth_table, rd_test, GrowthVerdict, RdConfig, RdReport};
use qgrd::spectral::{
    bands_on, delta_k, dirac, iterated_commutator, lip_lower_bound, lip_seminorm_at, summability_partial, Summability,
    SummabilityThresholds,
};
use qgrd::{Label, QuantumGroupInstance};

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    /// Out of reach by enumeration; analysed in the decisions notes.
    Unattainable,
}

struct Report {
    lines: Vec<(Status, String)>,
}

impl Report {
    fn record(&mut self, id: &str, status: Status, detail: String, elapsed: Duration) {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unattainable => "FAIL (unattainable)",
        };
        let line = format!("[{tag}] {id}: {detail} ({:.1} s)", elapsed.as_secs_f64());
        println!("{line}");
        self.lines.push((status, line));
    }
}

fn build(d: InstanceDescriptor) -> QuantumGroupInstance {
    QuantumGroupInstance::build(&d).expect("instance builds")
}

fn words(g: &QuantumGroupInstance, r: usize) -> LengthFunction {
    word_length(g, &g.canonical_generators(), r).expect("word length")
}

fn su() -> QuantumGroupInstance {
    build(InstanceDescriptor::su_q_2(0.5))
}

fn z1() -> QuantumGroupInstance {
    build(InstanceDescriptor::z_d(1))
}

fn labels_upto(g: &QuantumGroupInstance, l: &LengthFunction, r: usize, skip_trivial: bool) -> Vec<Label> {
    let e = g.trivial();
    l.ball(r as f64)
        .unwrap()
        .into_iter()
        .map(|(x, _)| x)
        .filter(|x| !(skip_trivial && *x == e))
        .collect()
}

fn fourier_isometry(rep: &mut Report) {
    let t = Instant::now();
    let g = su();
    let l = words(&g, 6);
    let labels = labels_upto(&g, &l, 6, false);
    let mut worst = 0.0f64;
    for idx in 0..200u64 {
        let mut rng = stream(1, 0, idx);
        let blocks: Vec<_> = labels
            .iter()
            .map(|x| (x.clone(), gaussian_block(&mut rng, g.dim(x).unwrap() as usize)))
            .collect();
        let f = CcElement::from_blocks(&g, blocks).unwrap();
        let x = fourier(&g, &f).unwrap();
        for s in [0.0, 1.0, 2.0] {
            let a = sobolev_norm_cc(&g, &f, &l, s).unwrap();
            let b = sobolev_norm_cg(&g, &x, &l, s).unwrap();
            worst = worst.max((a - b).abs() / a);
        }
    }
    let el = t.elapsed();
    let ok = worst <= 1e-8 && el < Duration::from_secs(10);
    rep.record(
        "1 Fourier isometry",
        if ok { Status::Pass } else { Status::Fail },
        format!("SU_0.5(2), 200 f on l <= 6, s in {{0,1,2}}: max relative gap {worst:.2e} (tol 1e-8, limit 10 s)"),
        el,
    );
}

fn schur_gram(rep: &mut Report) {
    let t = Instant::now();
    let q: f64 = 0.5;
    let g = build(InstanceDescriptor::su_q_2(q));
    let coeffs: Vec<(u32, usize, usize)> = (0..=6u32)
        .flat_map(|n| (0..=n as usize).flat_map(move |i| (0..=n as usize).map(move |j| (n, i, j))))
        .collect();
    let elems: Vec<GroupAlgElement> = coeffs
        .iter()
        .map(|&(n, i, j)| GroupAlgElement::basis(&g, &Label::spin(n), i, j).unwrap())
        .collect();
    let stars: Vec<GroupAlgElement> = elems.iter().map(|x| star(&g, x).unwrap()).collect();
    let mut gram_err = 0.0f64;
    for (b, sb) in coeffs.iter().zip(&stars) {
        for (c, uc) in coeffs.iter().zip(&elems) {
            let got = haar_state(&g, &multiply(&g, sb, uc).unwrap());
            // <u_ij, u_ij> = 1 / (q^{n - 2i} [n + 1]_q), zero off the diagonal
            let want = if b == c {
                let (n, i, _) = *b;
                1.0 / (q.powi(n as i32 - 2 * i as i32) * q_integer(n + 1, q))
            } else {
                0.0
            };
            gram_err = gram_err.max((got - Complex64::new(want, 0.0)).norm());
        }
    }
    let mut complete_err = 0.0f64;
    for a in 0..=6u32 {
        for b in 0..=6u32 {
            let set = g.intertwiners(&Label::spin(a), &Label::spin(b)).unwrap();
            let n = ((a + 1) * (b + 1)) as usize;
            let mut acc = DMatrix::<Complex64>::zeros(n, n);
            for e in &set.entries {
                acc += &e.isometry * e.isometry.adjoint();
            }
            complete_err = complete_err.max((acc - DMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    let el = t.elapsed();
    let ok = gram_err <= 1e-9 && complete_err <= 1e-10 && el < Duration::from_secs(60);
    rep.record(
        "2 Schur orthogonality and intertwiner completeness",
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "{} coefficients l <= 6: Gram error {gram_err:.2e} (tol 1e-9); sum V V* - I {complete_err:.2e} (tol 1e-10)",
            coeffs.len()
        ),
        el,
    );
}

fn growth_contrast(rep: &mut Report) {
    let t = Instant::now();
    let g = su();
    let c = compare_modular(&g, &words(&g, 40), 40).unwrap();
    let z = z1();
    let cz = compare_modular(&z, &words(&z, 40), 40).unwrap();
    let el = t.elapsed();
    let su_ok = c.classical.verdict == GrowthVerdict::Polynomial
        && (c.classical.degree - 2.0).abs() <= 0.2
        && c.quantum.verdict == GrowthVerdict::Exponential
        && (c.quantum.exp_slope - 1.386).abs() <= 0.1;
    let z_ok = [&cz.classical, &cz.quantum]
        .iter()
        .all(|f| f.verdict == GrowthVerdict::Polynomial && f.degree.abs() < 1e-9);
    let ok = su_ok && z_ok && el < Duration::from_secs(5);
    rep.record(
        "3 Modular growth contrast",
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "SU_0.5(2), N = 40: classical {:?} degree {:.3}; quantum {:?} log-slope {:.4}; dual Z: degrees {:.1e}, {:.1e}",
            c.classical.verdict, c.classical.degree, c.quantum.verdict, c.quantum.exp_slope, cz.classical.degree, cz.quantum.degree
        ),
        el,
    );
}

fn growth_cross_check(rep: &mut Report) {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for d in [
        InstanceDescriptor::z_d(1),
        InstanceDescriptor::z_d(2),
        InstanceDescriptor::su_q_2(0.5),
        InstanceDescriptor::su_q_2(1.0),
        InstanceDescriptor::o_n_plus(3),
    ] {
        let g = build(d);
        let table = growth_table(&g, &words(&g, 30), 30).unwrap();
        worst = worst.max(table.cross_check());
        names.push(g.name().to_string());
    }
    let el = t.elapsed();
    rep.record(
        "4 Growth cross-check",
        if worst <= 1e-9 { Status::Pass } else { Status::Fail },
        format!("N = 30 on {}: max relative gap {worst:.2e} (tol 1e-9)", names.join(", ")),
        el,
    );

    // the free group does not fit: shell 30 alone holds 4 * 3^29 labels
    let t = Instant::now();
    let f2 = build(InstanceDescriptor::free_group(2));
    let table = growth_table(&f2, &words(&f2, 10), 10).unwrap();
    let gap = table.cross_check();
    rep.record(
        "4 Growth cross-check, dual F_2",
        Status::Unattainable,
        format!(
            "N = 30 needs 2.7e14 labels in the last shell alone; at N = 10 the gap is {gap:.2e} ({})",
            if gap <= 1e-9 { "within 1e-9" } else { "outside 1e-9" }
        ),
        t.elapsed(),
    );
}

fn rd_bounds(rep: &mut Report) -> RdReport {
    let t = Instant::now();
    let z = z1();
    let cz = RdConfig::for_instance(&z, 500, 5);
    let lz = words(&z, cz.m_scale * 64 + cz.m_offset + cz.m_extra);
    let rz = rd_test(&z, &lz, 64, &cz).unwrap();
    let bound = 2.0 * 2f64.sqrt();
    let z_max = rz.rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let z_ok = rz.rows.iter().all(|r| r.ratio <= bound) && rz.s.abs() <= 0.15;

    let g = su();
    let cs = RdConfig::for_instance(&g, 100, 5);
    let ls = words(&g, cs.m_scale * 12 + cs.m_offset + cs.m_extra);
    let rs = rd_test(&g, &ls, 12, &cs).unwrap();
    let su_ok = rs.rows.iter().all(|r| r.ratio <= 2.0 * (r.n as f64 + 1.0));
    let su_worst = rs
        .rows
        .iter()
        .map(|r| r.ratio / (2.0 * (r.n as f64 + 1.0)))
        .fold(0.0, f64::max);
    let el = t.elapsed();
    let ok = z_ok && su_ok && el < Duration::from_secs(600);
    rep.record(
        "5 RD shell bound",
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "dual Z, n <= 64, 500 samples: max r_n {z_max:.4} <= 2 sqrt 2, fitted s {:.4}; SU_0.5(2), n <= 12, 100 samples: max r_n / 2(n+1) = {su_worst:.3}, fitted (c, s) = ({:.3}, {:.3})",
            rz.s, rs.c, rs.s
        ),
        el,
    );
    rs
}

fn band_identity(rep: &mut Report) {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for (d, support) in [
        (InstanceDescriptor::z_d(1), 3usize),
        (InstanceDescriptor::z_d(2), 3),
        (InstanceDescriptor::su_q_2(0.5), 3),
    ] {
        let g = build(d);
        worst = worst.max(band_check(&g, 16, support));
        names.push(g.name().to_string());
    }
    let el = t.elapsed();
    rep.record(
        "6 Regularity band identity",
        if worst <= 1e-10 { Status::Pass } else { Status::Fail },
        format!(
            "M = 16, 50 random a each on {}, k in {{2,3}}: max entry gap on the interior window {worst:.2e} (tol 1e-10)",
            names.join(", ")
        ),
        el,
    );

    // the ball of radius 16 in F_2 has 8.6e7 labels
    let t = Instant::now();
    let f2 = build(InstanceDescriptor::free_group(2));
    let gap = band_check(&f2, 8, 2);
    rep.record(
        "6 Regularity band identity, dual F_2",
        Status::Unattainable,
        format!(
            "M = 16 needs a basis of 8.6e7 vectors; at M = 8 the gap is {gap:.2e} ({})",
            if gap <= 1e-10 { "within 1e-10" } else { "outside 1e-10" }
        ),
        t.elapsed(),
    );
}

fn band_check(g: &QuantumGroupInstance, m: usize, support: usize) -> f64 {
    let l = words(g, m);
    let d = dirac(g, &l, m).unwrap();
    let labels = labels_upto(g, &l, support, false);
    let mut worst = 0.0f64;
    for idx in 0..50u64 {
        let a = gaussian_element(g, &labels, &mut stream(6, m as u64, idx)).unwrap();
        let bands = bands_on(g, &a, &l, &d).unwrap();
        let x = left_regular_in(g, &a, &l, &d.basis).unwrap();
        let window = d.interior_window(bands.p);
        for k in [2u32, 3] {
            let via_bands = bands.delta_k(k).restrict(&window, &window);
            let via_commutators = iterated_commutator(&d, &x, k).restrict(&window, &window);
            worst = worst.max(via_bands.max_abs_diff(&via_commutators));
        }
    }
    worst
}

fn basis_identity_and_lower_bound(rep: &mut Report) {
    let t = Instant::now();
    let mut basis_err = 0.0f64;
    let mut violations = 0usize;
    let mut checks = 0usize;
    for (d, r) in [(InstanceDescriptor::su_q_2(0.5), 3usize), (InstanceDescriptor::z_d(1), 3)] {
        let g = build(d);
        let m = 2 * r;
        let l = words(&g, m);
        let dt = dirac(&g, &l, m).unwrap();
        let e = dt.basis.index(&g.trivial(), 0, 0).unwrap();
        for alpha in labels_upto(&g, &l, r, false) {
            let len = l.get(&alpha).unwrap();
            let dim = g.dim(&alpha).unwrap() as usize;
            for i in 0..dim {
                for j in 0..dim {
                    let u = GroupAlgElement::basis(&g, &alpha, i, j).unwrap();
                    let target = dt.basis.coordinates(&u).unwrap();
                    for k in [1u32, 2, 3] {
                        let dk = delta_k(&g, &u, k, &l, m).unwrap();
                        let lk = len.powi(k as i32);
                        for (row, want) in target.iter().enumerate() {
                            basis_err = basis_err.max((dk.get(row, e) - want * lk).norm());
                        }
                    }
                }
            }
        }
        let labels = labels_upto(&g, &l, r, false);
        for idx in 0..200u64 {
            let a = gaussian_element(&g, &labels, &mut stream(7, 0, idx)).unwrap();
            for k in [1u32, 2, 3] {
                let lip = lip_seminorm_at(&g, &a, k, &l, m).unwrap();
                let lower = lip_lower_bound(&g, &a, k, &l).unwrap();
                checks += 1;
                if lip * lip < lower - 1e-8 * lower.max(1.0) {
                    violations += 1;
                }
            }
        }
    }
    let el = t.elapsed();
    let ok = basis_err <= 1e-10 && violations == 0;
    rep.record(
        "7 Basis identity and seminorm lower bound",
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "SU_0.5(2) and dual Z, k in {{1,2,3}}: basis identity error {basis_err:.2e} (tol 1e-10); {violations} lower-bound violations in {checks} checks"
        ),
        el,
    );
}

fn summability(rep: &mut Report) {
    let t = Instant::now();
    let th = SummabilityThresholds::default();
    let z = z1();
    let rz = summability_partial(&z, &words(&z, 10_000), 2.0, 10_000, None, th).unwrap();
    let pi2_3 = std::f64::consts::PI.powi(2) / 3.0;
    let z_rel = (rz.final_sum() - pi2_3).abs() / pi2_3;

    let g = su();
    let ls = words(&g, 40);
    let s4 = summability_partial(&g, &ls, 4.0, 40, None, th).unwrap().verdict;
    let s2 = summability_partial(&g, &ls, 2.0, 40, None, th).unwrap().verdict;

    let o = build(InstanceDescriptor::o_n_plus(3));
    let lo = words(&o, 40);
    let o_ok = (1..=20).all(|p| {
        summability_partial(&o, &lo, p as f64, 40, None, th).unwrap().verdict == Summability::Divergent
    });
    let el = t.elapsed();
    let ok = z_rel <= 0.01
        && s4 == Summability::Convergent
        && s2 == Summability::Divergent
        && o_ok
        && el < Duration::from_secs(30);
    rep.record(
        "8 Summability",
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "dual Z p = 2, N = 1e4: {:.6} vs pi^2/3 (rel {z_rel:.2e}); SU_0.5(2): p = 4 {s4:?}, p = 2 {s2:?}; O_3^+ divergent for p = 1..20: {o_ok}",
            rz.final_sum()
        ),
        el,
    );
}

/// `||[D, a]||` for `a = sum_n b_n (u^n + u^-n)` on `|m| <= M'`, built from
/// the matrix entries `(|m| - |n|) a_{m - n}` of the shift representation.
fn cosine_seminorm(b: &[f64], m_prime: i64) -> f64 {
    let size = (2 * m_prime + 1) as usize;
    let mut x = DMatrix::<f64>::zeros(size, size);
    for r in -m_prime..=m_prime {
        for c in -m_prime..=m_prime {
            let j = (r - c).unsigned_abs() as usize;
            if j >= 1 && j <= b.len() {
                x[((r + m_prime) as usize, (c + m_prime) as usize)] = (r.abs() - c.abs()) as f64 * b[j - 1];
            }
        }
    }
    x.singular_values().max()
}

/// Brute-force sup of `(chi_1 - chi_{-1})(a) / ||[D, a]||` over a refined mesh.
fn grid_oracle(m: usize, m_prime: i64) -> f64 {
    // (chi_1 - chi_-1)(u^n + u^-n) = 2 - 2 (-1)^n
    let objective = |b: &[f64]| -> f64 { b.iter().enumerate().map(|(i, v)| v * (2.0 - 2.0 * (-1f64).powi(i as i32 + 1))).sum() };
    let ratio = |b: &[f64]| -> f64 {
        let lip = cosine_seminorm(b, m_prime);
        if lip < 1e-12 {
            0.0
        } else {
            objective(b) / lip
        }
    };
    // coarse mesh {-1, -1/2, 0, 1/2, 1}^m
    let mut best = vec![0.0; m];
    let mut best_val = f64::NEG_INFINITY;
    let mut cur = vec![0.0; m];
    let total = 5usize.pow(m as u32);
    for code in 0..total {
        let mut c = code;
        for v in cur.iter_mut() {
            *v = (c % 5) as f64 * 0.5 - 1.0;
            c /= 5;
        }
        let r = ratio(&cur);
        if r > best_val {
            best_val = r;
            best.clone_from(&cur);
        }
    }
    // refine with a shrinking local mesh
    let mut h = 0.25;
    while h > 1e-5 {
        let mut improved = false;
        let mut cand = best.clone();
        for code in 0..3usize.pow(m as u32) {
            let mut c = code;
            for (i, v) in cand.iter_mut().enumerate() {
                *v = best[i] + ((c % 3) as f64 - 1.0) * h;
                c /= 3;
            }
            let r = ratio(&cand);
            if r > best_val + 1e-13 {
                best_val = r;
                best.clone_from(&cand);
                improved = true;
            }
        }
        if !improved {
            h /= 2.0;
        }
    }
    best_val
}

fn distance_vs_oracle(rep: &mut Report) {
    let t = Instant::now();
    let z = z1();
    let m_prime = 16;
    let l = words(&z, m_prime);
    let mu = State::parse(&z, &l, 8, "char:1").unwrap();
    let nu = State::parse(&z, &l, 8, "char:-1").unwrap();
    let mut values = Vec::new();
    let mut residual = 0.0f64;
    let mut converged = true;
    for m in [4usize, 6, 8] {
        let mut cfg = DistanceConfig::new(1, m);
        cfg.m_prime = Some(m_prime);
        let r = distance(&z, &l, &mu, &nu, &cfg).unwrap();
        residual = residual.max(r.feasibility_residual);
        converged &= r.converged;
        values.push(r.value);
    }
    let oracle = grid_oracle(6, m_prime as i64);
    let rel = (values[1] - oracle).abs() / oracle;
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let el = t.elapsed();
    let ok = rel <= 0.05 && residual <= 1e-6 && monotone && converged && el < Duration::from_secs(300);
    rep.record(
        "9 Distance solver against grid oracle",
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "dual Z, k = 1, characters at +-1, M' = {m_prime}: solver {:.6} vs oracle {oracle:.6} at M = 6 (rel {rel:.2e}, tol 5e-2); residual {residual:.1e}; M = 4, 6, 8 gives {:.6}, {:.6}, {:.6}",
            values[1], values[0], values[1], values[2]
        ),
        el,
    );
}

fn probe(rep: &mut Report, su_rd: &RdReport) {
    let t = Instant::now();
    let z = z1();
    let lz = words(&z, 4);
    let cz = low_part_constant(&z, &lz, 2, 4).unwrap();
    let cz_oracle = (2.0 * (1..=4).map(|m| (m as f64).powi(-4)).sum::<f64>()).sqrt();

    let g = su();
    let ls = words(&g, 18);
    let rd = RdConstants::from(su_rd);
    let mut violations = 0;
    let mut cn_err = 0.0f64;
    let mut parts = Vec::new();
    for n in [2usize, 4, 8] {
        let cfg = ProbeConfig::new(3, n, 100, 10);
        let r = total_boundedness_probe(&g, &ls, Some(rd), &cfg).unwrap();
        violations += r.low_violations + r.tail_violations;
        // labels are spins m with dim m + 1 and length m
        let oracle = (1..=n).map(|m| ((m + 1) as f64).powi(3) * (m as f64).powi(-6)).sum::<f64>().sqrt();
        cn_err = cn_err.max((r.c_n - oracle).abs());
        parts.push(format!("n = {n}: c_n {:.4}, margins {:.2e} / {:.2e}", r.c_n, r.low_margin, r.tail_margin));
    }
    let el = t.elapsed();
    let ok = violations == 0 && cn_err <= 1e-12 && (cz - cz_oracle).abs() <= 1e-12;
    rep.record(
        "10 Total-boundedness probe",
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "SU_0.5(2), k = 3, 100 samples each, {violations} violations; {}; dual Z k = 2, n = 4: c_n = {cz:.6} (direct sum {cz_oracle:.6})",
            parts.join("; ")
        ),
        el,
    );
}

fn determinism(rep: &mut Report) {
    let t = Instant::now();
    let bin = env!("CARGO_BIN_EXE_qgrd");
    let runs: [&[&str]; 6] = [
        &["growth", "--instance", "su_q_2", "--q", "0.5", "--gen", "1", "--N", "40"],
        &["rd-fit", "--instance", "su_q_2", "--q", "0.5", "--N", "4", "--samples", "8", "--seed", "3"],
        &["rd-fit", "--instance", "z_d", "--d", "1", "--N", "8", "--samples", "16", "--seed", "3", "--format", "json"],
        &["summability", "--instance", "z_d", "--d", "1", "--p", "2", "--N", "10000"],
        &["distance", "--instance", "z_d", "--d", "1", "--state1", "char:1", "--state2", "char:-1", "--k", "1", "--M", "6"],
        &["probe", "--instance", "su_q_2", "--q", "0.5", "--k", "3", "--N", "2", "--samples", "10", "--s", "0.2", "--c", "1.7", "--seed", "4"],
    ];
    let mut same = 0;
    let mut failed = Vec::new();
    for args in runs {
        let a = Command::new(bin).args(args).output().expect("binary runs");
        let b = Command::new(bin).args(args).output().expect("binary runs");
        if a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty() {
            same += 1;
        } else {
            failed.push(args[0]);
        }
    }
    let el = t.elapsed();
    rep.record(
        "11 Determinism",
        if failed.is_empty() { Status::Pass } else { Status::Fail },
        format!("{same} of {} CLI runs byte-identical on repetition{}", runs.len(), if failed.is_empty() { String::new() } else { format!("; differing: {}", failed.join(", ")) }),
        el,
    );
}

fn main() -> ExitCode {
    let mut rep = Report { lines: Vec::new() };
    fourier_isometry(&mut rep);
    schur_gram(&mut rep);
    growth_contrast(&mut rep);
    growth_cross_check(&mut rep);
    let su_rd = rd_bounds(&mut rep);
    band_identity(&mut rep);
    basis_identity_and_lower_bound(&mut rep);
    summability(&mut rep);
    distance_vs_oracle(&mut rep);
    probe(&mut rep, &su_rd);
    determinism(&mut rep);
    let failed = rep.lines.iter().filter(|(s, _)| *s == Status::Fail).count();
    let unattainable = rep.lines.iter().filter(|(s, _)| *s == Status::Unattainable).count();
    println!(
        "acceptance: {} lines, {} failed, {} unattainable",
        rep.lines.len(),
        failed,
        unattainable
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
