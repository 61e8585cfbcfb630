//! Gram matrices through multiplication against closed-form Schur values.

use num_complex::Complex64;
use qgrd::grp_alg::{haar_state, inner_product, multiply, star, GroupAlgElement};
use qgrd::{InstanceDescriptor, Label, QuantumGroupInstance};

fn coefficients(g: &QuantumGroupInstance, max_spin: u32) -> Vec<GroupAlgElement> {
    let mut out = Vec::new();
    for n in 0..=max_spin {
        let d = n as usize + 1;
        for i in 0..d {
            for j in 0..d {
                out.push(GroupAlgElement::basis(g, &Label::Spin(n), i, j).unwrap());
            }
        }
    }
    out
}

fn gram_error(q: f64, max_spin: u32) -> f64 {
    let g = QuantumGroupInstance::build(&InstanceDescriptor::su_q_2(q)).unwrap();
    let basis = coefficients(&g, max_spin);
    let stars: Vec<_> = basis.iter().map(|b| star(&g, b).unwrap()).collect();
    let mut worst = 0.0f64;
    for (b, sb) in basis.iter().zip(&stars) {
        for c in &basis {
            let via_product = haar_state(&g, &multiply(&g, sb, c).unwrap());
            let closed: Complex64 = inner_product(&g, b, c).unwrap();
            worst = worst.max((via_product - closed).norm());
        }
    }
    worst
}

#[test]
fn gram_matches_schur_values() {
    for q in [1.0, 0.5, 0.8] {
        let err = gram_error(q, 3);
        assert!(err < 1e-10, "q = {q}: {err}");
    }
}

#[test]
fn involution_is_anti_multiplicative() {
    let g = QuantumGroupInstance::build(&InstanceDescriptor::su_q_2(0.5)).unwrap();
    let basis = coefficients(&g, 2);
    for (n, x) in basis.iter().enumerate() {
        let xs = star(&g, x).unwrap();
        assert!(star(&g, &xs).unwrap().max_abs_diff(x) < 1e-12);
        for y in basis.iter().skip(n % 3).step_by(3) {
            let lhs = star(&g, &multiply(&g, x, y).unwrap()).unwrap();
            let rhs = multiply(&g, &star(&g, y).unwrap(), &xs).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }
}

#[test]
fn second_orthogonality_relation() {
    let q = 0.5;
    let g = QuantumGroupInstance::build(&InstanceDescriptor::su_q_2(q)).unwrap();
    for n in 0..4u32 {
        let info = g.irrep(&Label::Spin(n)).unwrap();
        for i in 0..=n as usize {
            for j in 0..=n as usize {
                let u = GroupAlgElement::basis(&g, &Label::Spin(n), i, j).unwrap();
                let h = haar_state(&g, &multiply(&g, &u, &star(&g, &u).unwrap()).unwrap());
                let expect = info.f_diag.get(j) / info.qdim;
                assert!((h.re - expect).abs() < 1e-12 && h.im.abs() < 1e-12, "n={n} i={i} j={j}: {h} vs {expect}");
            }
        }
    }
}
