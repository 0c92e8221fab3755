//! Small dense helpers: Cholesky, LU solve, tiny inverses.

use crate::error::{Error, Result};

/// In-place lower Cholesky factor of a row-major SPD n×n matrix.
pub fn cholesky_factor(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut s = a[j * n + j];
        for k in 0..j {
            s -= l[j * n + k] * l[j * n + k];
        }
        if s <= 0.0 {
            return Err(Error::InvalidParameter("matrix not positive definite".into()));
        }
        let d = s.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Ok(l)
}

/// Solve L Lᵀ x = b in place.
pub fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .unwrap();
        if m[piv * n + c] == 0.0 {
            return Err(Error::InvalidParameter("singular matrix".into()));
        }
        if piv != c {
            for k in 0..n {
                m.swap(c * n + k, piv * n + k);
            }
            x.swap(c, piv);
        }
        for r in c + 1..n {
            let f = m[r * n + c] / m[c * n + c];
            if f != 0.0 {
                for k in c..n {
                    m[r * n + k] -= f * m[c * n + k];
                }
                x[r] -= f * x[c];
            }
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for k in r + 1..n {
            s -= m[r * n + k] * x[k];
        }
        x[r] = s / m[r * n + r];
    }
    Ok(x)
}

/// Householder QR of a tall row-major m×n matrix, for least squares.
#[derive(Debug, Clone)]
pub struct QrFactor {
    m: usize,
    n: usize,
    /// R in the upper triangle, reflectors below
    a: Vec<f64>,
    beta: Vec<f64>,
}

impl QrFactor {
    pub fn new(a: &[f64], m: usize, n: usize) -> Result<Self> {
        if m < n {
            return Err(Error::DimensionMismatch { expected: n, found: m });
        }
        let mut a = a.to_vec();
        let mut beta = vec![0.0; n];
        for k in 0..n {
            let norm = (k..m).map(|i| a[i * n + k] * a[i * n + k]).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::InvalidParameter("rank-deficient least-squares matrix".into()));
            }
            let alpha = if a[k * n + k] > 0.0 { -norm } else { norm };
            // v = x - alpha e1 stored in column k, v_k kept separately via beta
            let v0 = a[k * n + k] - alpha;
            a[k * n + k] = v0;
            let vnorm2 = v0 * v0 + (k + 1..m).map(|i| a[i * n + k] * a[i * n + k]).sum::<f64>();
            let b = 2.0 / vnorm2;
            for j in k + 1..n {
                let s: f64 = (k..m).map(|i| a[i * n + k] * a[i * n + j]).sum();
                let f = b * s;
                for i in k..m {
                    a[i * n + j] -= f * a[i * n + k];
                }
            }
            beta[k] = b;
            // keep v in the strict lower part; diagonal of R is alpha
            let vk = a[k * n + k];
            a[k * n + k] = alpha;
            for i in k + 1..m {
                a[i * n + k] /= vk;
            }
            beta[k] *= vk * vk;
        }
        Ok(QrFactor { m, n, a, beta })
    }

    /// Least-squares solution of A x ≈ b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        let mut y = b.to_vec();
        for k in 0..n {
            // v = (1, a[k+1..m, k])
            let s = y[k] + (k + 1..m).map(|i| self.a[i * n + k] * y[i]).sum::<f64>();
            let f = self.beta[k] * s;
            y[k] -= f;
            for i in k + 1..m {
                y[i] -= f * self.a[i * n + k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.a[i * n + j] * x[j]).sum();
            x[i] = (y[i] - s) / self.a[i * n + i];
        }
        x
    }
}

/// Determinant of a 1×1, 2×2 or 3×3 row-major matrix.
pub fn det_small(a: &[f64], d: usize) -> f64 {
    match d {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => panic!("det_small: unsupported dimension {d}"),
    }
}

/// Inverse and determinant of a 2×2 or 3×3 row-major matrix.
pub fn invert_small(a: &[f64], d: usize) -> (Vec<f64>, f64) {
    let det = det_small(a, d);
    let inv = match d {
        1 => vec![1.0 / a[0]],
        2 => vec![a[3] / det, -a[1] / det, -a[2] / det, a[0] / det],
        3 => {
            let c = |i: usize, j: usize| a[i * 3 + j];
            let mut r = vec![0.0; 9];
            for i in 0..3 {
                for j in 0..3 {
                    let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
                    let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
                    r[i * 3 + j] = (c(i1, j1) * c(i2, j2) - c(i1, j2) * c(i2, j1)) / det;
                }
            }
            r
        }
        _ => panic!("invert_small: unsupported dimension {d}"),
    };
    (inv, det)
}
