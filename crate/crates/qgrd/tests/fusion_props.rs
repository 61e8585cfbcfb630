//! Fusion rules: dimension counts, associativity, conjugation.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use proptest::prelude::*;
use qgrd::length::word_length;
use qgrd::{InstanceDescriptor, Label, QuantumGroupInstance};

static INSTANCES: LazyLock<Vec<QuantumGroupInstance>> = LazyLock::new(|| {
    [
        InstanceDescriptor::z_d(2),
        InstanceDescriptor::free_group(2),
        InstanceDescriptor::su_q_2(0.5),
        InstanceDescriptor::su_q_2(1.0),
        InstanceDescriptor::o_n_plus(3),
        InstanceDescriptor::o_n_plus(5),
    ]
    .iter()
    .map(|d| QuantumGroupInstance::build(d).unwrap())
    .collect()
});

static BALLS: LazyLock<Vec<Vec<Label>>> = LazyLock::new(|| {
    INSTANCES
        .iter()
        .map(|g| {
            let l = word_length(g, &g.canonical_generators(), 3).unwrap();
            l.ball(3.0).unwrap().into_iter().map(|(x, _)| x).collect()
        })
        .collect()
});

fn pick(which: usize, i: usize) -> Label {
    let ball = &BALLS[which];
    ball[i % ball.len()].clone()
}

fn fuse_all(g: &QuantumGroupInstance, left: &BTreeMap<Label, usize>, beta: &Label) -> BTreeMap<Label, usize> {
    let mut out = BTreeMap::new();
    for (alpha, m) in left {
        for (gamma, k) in g.fuse(alpha, beta).unwrap().iter() {
            *out.entry(gamma.clone()).or_insert(0) += m * k;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dimensions_add_up(which in 0..6usize, i in 0..64usize, j in 0..64usize) {
        let g = &INSTANCES[which];
        let (a, b) = (pick(which, i), pick(which, j));
        let fused = g.fuse(&a, &b).unwrap();
        let dim: u64 = fused.iter().map(|(c, m)| *m as u64 * g.dim(c).unwrap()).sum();
        prop_assert_eq!(dim, g.dim(&a).unwrap() * g.dim(&b).unwrap());
        let qdim: f64 = fused.iter().map(|(c, m)| *m as f64 * g.irrep(c).unwrap().qdim).sum();
        let want = g.irrep(&a).unwrap().qdim * g.irrep(&b).unwrap().qdim;
        prop_assert!((qdim - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn fusion_is_associative(which in 0..6usize, i in 0..64usize, j in 0..64usize, k in 0..64usize) {
        let g = &INSTANCES[which];
        let (a, b, c) = (pick(which, i), pick(which, j), pick(which, k));
        let left = fuse_all(g, &fuse_all(g, &BTreeMap::from([(a.clone(), 1)]), &b), &c);
        let bc: BTreeMap<Label, usize> = g.fuse(&b, &c).unwrap().iter().cloned().collect();
        let mut right = BTreeMap::new();
        for (gamma, m) in &bc {
            for (x, n) in g.fuse(&a, gamma).unwrap().iter() {
                *right.entry(x.clone()).or_insert(0) += m * n;
            }
        }
        prop_assert_eq!(left, right);
    }

    #[test]
    fn trivial_appears_once_in_a_times_conjugate(which in 0..6usize, i in 0..64usize) {
        let g = &INSTANCES[which];
        let a = pick(which, i);
        let ca = g.conj(&a).unwrap();
        prop_assert_eq!(g.conj(&ca).unwrap(), a.clone());
        prop_assert_eq!(g.dim(&ca).unwrap(), g.dim(&a).unwrap());
        let e = g.trivial();
        let count: usize = g.fuse(&a, &ca).unwrap().iter().filter(|(c, _)| *c == e).map(|(_, m)| *m).sum();
        prop_assert_eq!(count, 1);
    }
}
