//! Labels of irreducible corepresentations.
//!
//! A [`Label`] is opaque to most of the crate; only the instance that issued
//! it knows how to fuse, conjugate or measure it. The JSON form is untagged:
//! spins are integers, lattice points are integer arrays, and free-group
//! words are strings over `a..z` (generators) and `A..Z` (inverses), with the
//! empty string for the identity.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// Doubled spin `n` (dimension `n + 1` for SU_q(2)); also the index `k`
    /// of the free orthogonal fusion ring.
    Spin(u32),
    /// A point of the lattice `Z^d`.
    Lattice(Vec<i64>),
    /// A reduced word in a free group. Letter `g > 0` is the `g`-th
    /// generator, `-g` its inverse.
    Word(Vec<i32>),
}

impl Label {
    pub fn spin(n: u32) -> Self {
        Label::Spin(n)
    }

    pub fn lattice<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        Label::Lattice(coords.into_iter().collect())
    }

    /// Parses a word such as `"aB"`; returns `None` on anything but ASCII letters.
    pub fn word(text: &str) -> Option<Self> {
        let mut letters = Vec::with_capacity(text.len());
        for c in text.chars() {
            let g = match c {
                'a'..='z' => (c as u8 - b'a') as i32 + 1,
                'A'..='Z' => -((c as u8 - b'A') as i32 + 1),
                _ => return None,
            };
            letters.push(g);
        }
        Some(Label::Word(reduce_word(letters)))
    }

    pub fn as_spin(&self) -> Option<u32> {
        match self {
            Label::Spin(n) => Some(*n),
            _ => None,
        }
    }
}

/// Free reduction of a word.
pub(crate) fn reduce_word(letters: Vec<i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for g in letters {
        if out.last() == Some(&-g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

fn word_text(letters: &[i32]) -> String {
    letters
        .iter()
        .map(|&g| {
            if g > 0 {
                (b'a' + (g - 1) as u8) as char
            } else {
                (b'A' + (-g - 1) as u8) as char
            }
        })
        .collect()
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Spin(n) => write!(f, "{n}"),
            Label::Lattice(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Label::Lattice(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Label::Word(w) if w.is_empty() => write!(f, "e"),
            Label::Word(w) => write!(f, "{}", word_text(w)),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LabelRepr {
    Spin(u32),
    // negative integers only ever name points of Z
    Int(i64),
    Lattice(Vec<i64>),
    Word(String),
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Label::Spin(n) => LabelRepr::Spin(*n),
            Label::Lattice(v) => LabelRepr::Lattice(v.clone()),
            Label::Word(w) => LabelRepr::Word(word_text(w)),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match LabelRepr::deserialize(deserializer)? {
            LabelRepr::Spin(n) => Ok(Label::Spin(n)),
            LabelRepr::Int(n) => Ok(Label::Lattice(vec![n])),
            LabelRepr::Lattice(v) => Ok(Label::Lattice(v)),
            LabelRepr::Word(w) => Label::word(&w)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid word label `{w}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_reduce_and_print() {
        let w = Label::word("abBA").unwrap();
        assert_eq!(w, Label::Word(vec![]));
        assert_eq!(w.to_string(), "e");
        assert_eq!(Label::word("aB").unwrap().to_string(), "aB");
        assert!(Label::word("a1").is_none());
    }

    #[test]
    fn json_forms_are_untagged() {
        let labels = vec![
            Label::Spin(3),
            Label::lattice([-5]),
            Label::lattice([1, -2]),
            Label::word("abA").unwrap(),
        ];
        let text = serde_json::to_string(&labels).unwrap();
        assert_eq!(text, r#"[3,[-5],[1,-2],"abA"]"#);
        let back: Vec<Label> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, labels);
        let neg: Label = serde_json::from_str("-5").unwrap();
        assert_eq!(neg, Label::lattice([-5]));
    }
}
