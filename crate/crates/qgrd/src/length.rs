//! Central length functions, word lengths and shell decompositions.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::QuantumGroupInstance;
use crate::label::Label;

/// A length function on a ball of irreducible labels.
///
/// Values are known on every label with `l(alpha) <= radius`; queries
/// outside that ball fail rather than guess.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthFunction {
    values: BTreeMap<Label, f64>,
    generators: Option<Vec<Label>>,
    radius: f64,
}

impl LengthFunction {
    /// Wraps explicit values, declared complete up to `radius`.
    pub fn from_values(values: impl IntoIterator<Item = (Label, f64)>, radius: f64) -> Self {
        LengthFunction {
            values: values.into_iter().collect(),
            generators: None,
            radius,
        }
    }

    pub fn get(&self, label: &Label) -> Result<f64> {
        match self.values.get(label) {
            Some(&v) => Ok(v),
            None => Err(Error::LengthUndefined(label.clone())),
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn generators(&self) -> Option<&[Label]> {
        self.generators.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, f64)> {
        self.values.iter().map(|(k, &v)| (k, v))
    }

    /// Fails unless the function is known on the whole ball of radius `r`.
    pub fn require(&self, r: f64) -> Result<()> {
        if r > self.radius + 1e-12 {
            Err(Error::NotValidated {
                requested: r,
                validated: self.radius,
            })
        } else {
            Ok(())
        }
    }

    /// Labels with `l <= r`, ordered by `(length, label)`.
    pub fn ball(&self, r: f64) -> Result<Vec<(Label, f64)>> {
        self.require(r)?;
        let mut out: Vec<(Label, f64)> = self
            .values
            .iter()
            .filter(|(_, &v)| v <= r + 1e-12)
            .map(|(k, &v)| (k.clone(), v))
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }

    /// JSON array of `[label, value]` pairs.
    pub fn to_json(&self) -> String {
        let pairs: Vec<(&Label, f64)> = self.iter().collect();
        serde_json::to_string(&pairs).expect("labels and floats serialize")
    }

    /// Reads the form written by [`to_json`](Self::to_json). The radius is
    /// taken to be the largest value present, so the file must list a whole
    /// ball.
    pub fn from_json(instance: &QuantumGroupInstance, text: &str) -> Result<Self> {
        let pairs: Vec<(Label, f64)> = serde_json::from_str(text)?;
        let mut values = BTreeMap::new();
        let mut radius = 0.0f64;
        for (label, v) in pairs {
            let label = instance.normalize_label(label)?;
            radius = radius.max(v);
            values.insert(label, v);
        }
        Ok(LengthFunction {
            values,
            generators: None,
            radius,
        })
    }
}

/// Shell index `n` with `l in (n - 1, n]`.
pub fn shell_index(l: f64) -> usize {
    if l <= 0.0 {
        0
    } else {
        (l - 1e-12).ceil() as usize
    }
}

/// Word length with respect to `generators`, on the ball of the given radius.
pub fn word_length(instance: &QuantumGroupInstance, generators: &[Label], radius: usize) -> Result<LengthFunction> {
    bfs(instance, generators, radius, None)
}

/// [`word_length`] with the frontier shuffled at every level. The result
/// does not depend on the order; this entry point exists to check that.
pub fn word_length_shuffled(
    instance: &QuantumGroupInstance,
    generators: &[Label],
    radius: usize,
    seed: u64,
) -> Result<LengthFunction> {
    bfs(instance, generators, radius, Some(ChaCha8Rng::seed_from_u64(seed)))
}

fn bfs(
    instance: &QuantumGroupInstance,
    generators: &[Label],
    radius: usize,
    mut shuffle: Option<ChaCha8Rng>,
) -> Result<LengthFunction> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("generating set is empty".into()));
    }
    let trivial = instance.trivial();
    let mut gens: BTreeSet<Label> = BTreeSet::new();
    for g in generators {
        let g = instance.normalize_label(g.clone())?;
        if g == trivial {
            return Err(Error::InvalidArgument("the trivial label cannot be a generator".into()));
        }
        gens.insert(g);
    }
    let mut added = Vec::new();
    for g in gens.clone() {
        let c = instance.conj(&g)?;
        if gens.insert(c.clone()) {
            added.push(c);
        }
    }
    if !added.is_empty() {
        log::warn!(
            "generating set closed under conjugation by adding {}",
            added.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
        );
    }
    let gens: Vec<Label> = gens.into_iter().collect();

    let mut values = BTreeMap::new();
    values.insert(trivial.clone(), 0.0);
    let mut frontier = vec![trivial];
    for level in 1..=radius {
        if let Some(rng) = shuffle.as_mut() {
            frontier.shuffle(rng);
        }
        let mut next = BTreeSet::new();
        for alpha in &frontier {
            for g in &gens {
                for (gamma, _) in instance.fuse(alpha, g)?.iter() {
                    if !values.contains_key(gamma) {
                        next.insert(gamma.clone());
                    }
                }
            }
        }
        if next.is_empty() {
            // saturated: the generated subcategory is finite
            break;
        }
        for gamma in &next {
            values.insert(gamma.clone(), level as f64);
        }
        frontier = next.into_iter().collect();
    }

    for g in instance.canonical_generators() {
        if !values.contains_key(&g) {
            return Err(Error::NotGenerating {
                radius,
                reason: format!("label {g} is not reached"),
            });
        }
    }
    Ok(LengthFunction {
        values,
        generators: Some(gens),
        radius: radius as f64,
    })
}

/// One shell `S^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub n: usize,
    pub labels: Vec<Label>,
    pub count: usize,
    /// `sum dim(alpha)^2`, exact.
    pub sum_dim2: u128,
    pub sum_qdim2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellDecomposition {
    pub shells: Vec<Shell>,
}

impl ShellDecomposition {
    /// Total dimension of the coefficient space on shells `0..=n`.
    pub fn ball_dim2(&self, n: usize) -> u128 {
        self.shells.iter().take(n + 1).map(|s| s.sum_dim2).sum()
    }
}

/// The shells `S^0, ..., S^{n_max}`.
pub fn shells(instance: &QuantumGroupInstance, l: &LengthFunction, n_max: usize) -> Result<ShellDecomposition> {
    let ball = l.ball(n_max as f64)?;
    let mut shells: Vec<Shell> = (0..=n_max)
        .map(|n| Shell {
            n,
            labels: Vec::new(),
            count: 0,
            sum_dim2: 0,
            sum_qdim2: 0.0,
        })
        .collect();
    for (label, v) in ball {
        let info = instance.irrep(&label)?;
        let s = &mut shells[shell_index(v)];
        s.count += 1;
        s.sum_dim2 += (info.dim as u128) * (info.dim as u128);
        s.sum_qdim2 += info.qdim * info.qdim;
        s.labels.push(label);
    }
    Ok(ShellDecomposition { shells })
}

/// One failed length axiom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Violation {
    /// `l(e) = 0` fails.
    TrivialNonZero { value: f64 },
    /// `l(alpha) = 0` for some `alpha != e`, or a negative value.
    NotProper { label: Label, value: f64 },
    /// `l(conj alpha) != l(alpha)`.
    ConjugateAsymmetry { label: Label, value: f64, conj_value: f64 },
    /// `gamma in alpha (x) beta` but `l(gamma) > l(alpha) + l(beta)`.
    Subadditivity { alpha: Label, beta: Label, gamma: Label },
    /// A label of the ball has no value.
    Missing { label: Label },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-checks the length axioms on every label of `l` with value at most
/// `radius`, and on every fusion triple inside that ball.
pub fn validate_length(instance: &QuantumGroupInstance, l: &LengthFunction, radius: f64) -> ValidationReport {
    let mut violations = Vec::new();
    let trivial = instance.trivial();
    match l.get(&trivial) {
        Ok(0.0) => {}
        Ok(v) => violations.push(Violation::TrivialNonZero { value: v }),
        Err(_) => violations.push(Violation::Missing { label: trivial.clone() }),
    }
    let ball: Vec<(Label, f64)> = l.iter().filter(|(_, v)| *v <= radius).map(|(k, v)| (k.clone(), v)).collect();
    for (label, v) in &ball {
        if *label != trivial && *v <= 0.0 || *v < 0.0 {
            violations.push(Violation::NotProper {
                label: label.clone(),
                value: *v,
            });
        }
        let Ok(c) = instance.conj(label) else { continue };
        match l.get(&c) {
            Ok(cv) if (cv - v).abs() <= 1e-12 => {}
            Ok(cv) => violations.push(Violation::ConjugateAsymmetry {
                label: label.clone(),
                value: *v,
                conj_value: cv,
            }),
            Err(_) => violations.push(Violation::Missing { label: c }),
        }
    }
    for (alpha, la) in &ball {
        for (beta, lb) in &ball {
            let Ok(product) = instance.fuse(alpha, beta) else { continue };
            for (gamma, _) in product.iter() {
                if let Ok(lg) = l.get(gamma) {
                    if lg > la + lb + 1e-12 {
                        violations.push(Violation::Subadditivity {
                            alpha: alpha.clone(),
                            beta: beta.clone(),
                            gamma: gamma.clone(),
                        });
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}
