//! Irreducible representations of U_q(su_2) and tensor-product intertwiners.
//!
//! Conventions: basis `e_0..e_n` of the doubled-spin-`n` module ordered by
//! descending weight `m_j = n - 2j`; `K e_j = q^{m_j/2} e_j`;
//! `F e_j = c_j e_{j+1}`, `E e_{j+1} = c_j e_j` with `c_j = sqrt([j+1][n-j])`;
//! coproduct `Delta(E) = E (x) K + K^-1 (x) E`, `Delta(F) = F (x) K + K^-1 (x) F`.
//! The modular matrix in this basis is `K^2 = diag(q^{n-2j})`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Quantum integer `[n]_q = (q^n - q^-n) / (q - q^-1)`, evaluated as a
/// symmetric sum so that `q = 1` needs no special case.
pub fn q_integer(n: u32, q: f64) -> f64 {
    (0..n).map(|k| q.powi(n as i32 - 1 - 2 * k as i32)).sum()
}

/// Matrix data of one irreducible module.
#[derive(Clone, Debug)]
pub struct SuQ2Rep {
    pub n: u32,
    /// `K` eigenvalues `q^{(n-2j)/2}`.
    pub k_diag: Vec<f64>,
    /// Lowering coefficients `c_j`, `j = 0..n-1`.
    pub lower: Vec<f64>,
}

impl SuQ2Rep {
    pub fn new(n: u32, q: f64) -> Self {
        let k_diag = (0..=n)
            .map(|j| q.powf((n as f64 - 2.0 * j as f64) / 2.0))
            .collect();
        let lower = (0..n)
            .map(|j| (q_integer(j + 1, q) * q_integer(n - j, q)).sqrt())
            .collect();
        SuQ2Rep { n, k_diag, lower }
    }

    pub fn dim(&self) -> usize {
        self.n as usize + 1
    }

    /// Dense matrices `(E, F, K)`, used by tests and diagnostics.
    pub fn generators(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let d = self.dim();
        let mut e = DMatrix::zeros(d, d);
        let mut f = DMatrix::zeros(d, d);
        for (j, &c) in self.lower.iter().enumerate() {
            f[(j + 1, j)] = c;
            e[(j, j + 1)] = c;
        }
        let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.k_diag.clone()));
        (e, f, k)
    }
}

/// Number of highest-weight vectors of weight `g` in `a (x) b`, read off
/// from weight-space dimensions: `dim W_g - dim W_{g+2}`.
pub(crate) fn highest_weight_multiplicity(a: u32, b: u32, g: u32) -> usize {
    let weight_dim = |w: i64| -> i64 {
        // pairs (i, k) with (a - 2i) + (b - 2k) = w
        let total = a as i64 + b as i64;
        if (total - w) % 2 != 0 || w > total || w < -total {
            return 0;
        }
        let t = (total - w) / 2;
        let lo = (t - b as i64).max(0);
        let hi = t.min(a as i64);
        (hi - lo + 1).max(0)
    };
    (weight_dim(g as i64) - weight_dim(g as i64 + 2)).max(0) as usize
}

/// Isometry `H_g -> H_a (x) H_b` intertwining the canonical modules.
pub(crate) fn intertwiner(ra: &SuQ2Rep, rb: &SuQ2Rep, rg: &SuQ2Rep) -> DMatrix<Complex64> {
    let (a, b, g) = (ra.n as usize, rb.n as usize, rg.n as usize);
    let db = b + 1;
    let t = (a + b - g) / 2;
    let mut v = DMatrix::<f64>::zeros((a + 1) * db, g + 1);

    // Null vector of the raising operator on the weight-g space, spanned by
    // e_i (x) e_{t-i}, i = 0..t. The kernel equation is bidiagonal, so forward
    // substitution from x_0 = 1 gives the unique solution up to scale.
    let mut x = vec![0.0f64; t + 1];
    x[0] = 1.0;
    for i in 0..t {
        let k = t - 1 - i;
        let num = rb.lower[k] / ra.k_diag[i];
        let den = ra.lower[i] * rb.k_diag[k];
        x[i + 1] = -x[i] * num / den;
    }
    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    for (i, c) in x.iter().enumerate() {
        v[(i * db + (t - i), 0)] = c / norm;
    }

    // Lower: V e_{j+1} = Delta(F) V e_j / c_j.
    for j in 0..g {
        let mut next = vec![0.0f64; (a + 1) * db];
        for i in 0..=a {
            for k in 0..=b {
                let c = v[(i * db + k, j)];
                if c == 0.0 {
                    continue;
                }
                if i < a {
                    next[(i + 1) * db + k] += c * ra.lower[i] * rb.k_diag[k];
                }
                if k < b {
                    next[i * db + k + 1] += c * rb.lower[k] / ra.k_diag[i];
                }
            }
        }
        let c = rg.lower[j];
        for (r, val) in next.into_iter().enumerate() {
            v[(r, j + 1)] = val / c;
        }
    }
    v.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kron(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
        x.kronecker(y)
    }

    #[test]
    fn q_integers() {
        assert_eq!(q_integer(0, 0.5), 0.0);
        assert_eq!(q_integer(1, 0.5), 1.0);
        assert!((q_integer(2, 0.5) - 2.5).abs() < 1e-15);
        assert_eq!(q_integer(7, 1.0), 7.0);
        // closed form (q^n - q^-n)/(q - q^-1)
        let q: f64 = 0.37;
        let closed = (q.powi(6) - q.powi(-6)) / (q - 1.0 / q);
        assert!((q_integer(6, q) - closed).abs() < 1e-12 * closed);
    }

    #[test]
    fn generators_satisfy_relations() {
        for &q in &[1.0, 0.5, 0.8] {
            for n in 0..6 {
                let r = SuQ2Rep::new(n, q);
                let (e, f, k) = r.generators();
                let comm = &e * &f - &f * &e;
                let k2 = &k * &k;
                let k2inv = k2.map(|x| if x == 0.0 { 0.0 } else { 1.0 / x });
                let k2inv = DMatrix::from_diagonal(&k2inv.diagonal());
                let rhs = if q == 1.0 {
                    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                        r.dim(),
                        (0..=n).map(|j| n as f64 - 2.0 * j as f64),
                    ))
                } else {
                    (&k2 - k2inv) / (q - 1.0 / q)
                };
                assert!((comm - rhs).abs().max() < 1e-12, "q={q} n={n}");
                // K E K^-1 = q E
                let kinv = DMatrix::from_diagonal(&k.diagonal().map(|x| 1.0 / x));
                assert!((&k * &e * &kinv - &e * q).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn intertwiners_intertwine_and_are_isometric() {
        let q = 0.5;
        for a in 0..4u32 {
            for b in 0..4u32 {
                let ra = SuQ2Rep::new(a, q);
                let rb = SuQ2Rep::new(b, q);
                let (ea, fa, ka) = ra.generators();
                let (eb, fb, kb) = rb.generators();
                let kainv = DMatrix::from_diagonal(&ka.diagonal().map(|x| 1.0 / x));
                let de = kron(&ea, &kb) + kron(&kainv, &eb);
                let df = kron(&fa, &kb) + kron(&kainv, &fb);
                let dk = kron(&ka, &kb);
                let mut completeness = DMatrix::<f64>::zeros(de.nrows(), de.ncols());
                for g in (a.abs_diff(b)..=a + b).step_by(2) {
                    assert_eq!(highest_weight_multiplicity(a, b, g), 1);
                    let rg = SuQ2Rep::new(g, q);
                    let (eg, fg, kg) = rg.generators();
                    let v = intertwiner(&ra, &rb, &rg).map(|z| z.re);
                    let vtv = v.transpose() * &v;
                    assert!((vtv - DMatrix::identity(g as usize + 1, g as usize + 1)).abs().max() < 1e-12);
                    assert!((&de * &v - &v * &eg).abs().max() < 1e-12);
                    assert!((&df * &v - &v * &fg).abs().max() < 1e-12);
                    assert!((&dk * &v - &v * &kg).abs().max() < 1e-12);
                    completeness += &v * v.transpose();
                }
                let id = DMatrix::identity(completeness.nrows(), completeness.ncols());
                assert!((completeness - id).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn singlet_vector() {
        for &q in &[1.0f64, 0.5] {
            let r1 = SuQ2Rep::new(1, q);
            let r0 = SuQ2Rep::new(0, q);
            let v = intertwiner(&r1, &r1, &r0);
            let c = (1.0 + q * q).sqrt();
            let expect = [0.0, q / c, -1.0 / c, 0.0];
            for (r, e) in expect.iter().enumerate() {
                assert!((v[(r, 0)].re - e).abs() < 1e-14);
            }
        }
    }
}
