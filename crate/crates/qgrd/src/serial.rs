//! JSON shapes shared by both sides of the Fourier transform.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::label::Label;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct BlockJson {
    pub label: Label,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl BlockJson {
    pub fn from_matrix(label: Label, m: &DMatrix<Complex64>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
        };
        BlockJson {
            label,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    /// `None` when the two arrays are ragged or disagree in shape.
    pub fn to_matrix(&self) -> Option<DMatrix<Complex64>> {
        let n = self.re.len();
        if self.im.len() != n {
            return None;
        }
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for r in 0..n {
            if self.re[r].len() != n || self.im[r].len() != n {
                return None;
            }
            for c in 0..n {
                m[(r, c)] = Complex64::new(self.re[r][c], self.im[r][c]);
            }
        }
        Some(m)
    }
}
