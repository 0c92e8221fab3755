use super::quadrature::QuadratureRule;

/// Lagrange collocation differentiation matrix, row-major Q×Q:
/// `d[i*q + k] = h_k'(z_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffMatrix {
    pub q: usize,
    pub d: Vec<f64>,
}

impl DiffMatrix {
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.d[i * self.q + k]
    }
}

pub fn build_diff_matrix(rule: &QuadratureRule) -> DiffMatrix {
    diff_matrix_on(&rule.points)
}

/// Barycentric form; diagonal from the negative row sum.
pub fn diff_matrix_on(z: &[f64]) -> DiffMatrix {
    let q = z.len();
    let c: Vec<f64> = (0..q)
        .map(|i| (0..q).filter(|&j| j != i).map(|j| z[i] - z[j]).product())
        .collect();
    let mut d = vec![0.0; q * q];
    for i in 0..q {
        let mut s = 0.0;
        for k in 0..q {
            if k != i {
                let v = (c[i] / c[k]) / (z[i] - z[k]);
                d[i * q + k] = v;
                s += v;
            }
        }
        d[i * q + i] = -s;
    }
    DiffMatrix { q, d }
}

/// Value of the k-th Lagrange polynomial through `z` at `x`.
pub fn lagrange_value(z: &[f64], k: usize, x: f64) -> f64 {
    z.iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, &zj)| (x - zj) / (z[k] - zj))
        .product()
}
