//! One-dimensional bases, quadrature rules and collocation differentiation.

mod diff;
mod jacobi;
mod modified;
mod quadrature;

pub use diff::{build_diff_matrix, diff_matrix_on, lagrange_value, DiffMatrix};
pub use jacobi::{jacobi, jacobi_deriv, jacobi_zeros};
pub use modified::{eval_modified_basis, family_indices, BasisKind, Factor1D};
pub use quadrature::{compute_rule, QuadratureKind, QuadratureRule};

/// A 1D basis family sampled on a quadrature rule.
///
/// `b` and `db` are row-major Q×ncols. For the warped families the columns
/// run over the admissible index tuples of [`family_indices`].
#[derive(Debug, Clone, PartialEq)]
pub struct Basis1D {
    pub kind: BasisKind,
    pub order: usize,
    pub rule: QuadratureRule,
    pub labels: Vec<Factor1D>,
    pub b: Vec<f64>,
    pub db: Vec<f64>,
}

impl Basis1D {
    pub fn new(kind: BasisKind, order: usize, rule: QuadratureRule) -> Self {
        let q = rule.npoints();
        if kind == BasisKind::Lagrange {
            let d = build_diff_matrix(&rule);
            let mut b = vec![0.0; q * q];
            for i in 0..q {
                b[i * q + i] = 1.0;
            }
            return Basis1D {
                kind,
                order: q - 1,
                rule,
                labels: (0..q).map(Factor1D::A).collect(),
                b,
                db: d.d,
            };
        }
        let labels = family_indices(kind, order);
        let n = labels.len();
        let mut b = vec![0.0; q * n];
        let mut db = vec![0.0; q * n];
        for (i, &z) in rule.points.iter().enumerate() {
            for (m, f) in labels.iter().enumerate() {
                let (v, d) = f.eval(z);
                b[i * n + m] = v;
                db[i * n + m] = d;
            }
        }
        Basis1D { kind, order, rule, labels, b, db }
    }

    pub fn npoints(&self) -> usize {
        self.rule.npoints()
    }

    pub fn nmodes(&self) -> usize {
        self.labels.len()
    }

    pub fn diff_matrix(&self) -> DiffMatrix {
        build_diff_matrix(&self.rule)
    }
}

/// (B, DB) for the given basis.
pub fn build_basis_matrices(basis: &Basis1D) -> (Vec<f64>, Vec<f64>) {
    (basis.b.clone(), basis.db.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gll(q: usize) -> QuadratureRule {
        compute_rule(QuadratureKind::GaussLobattoLegendre, q).unwrap()
    }

    #[test]
    fn lagrange_on_own_points_is_identity() {
        let b = Basis1D::new(BasisKind::Lagrange, 4, gll(5));
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(b.b[i * 5 + j], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn linear_modified_columns() {
        let r = compute_rule(QuadratureKind::GaussRadauJacobiAlpha1, 4).unwrap();
        let b = Basis1D::new(BasisKind::ModifiedA, 1, r.clone());
        for (i, &z) in r.points.iter().enumerate() {
            assert_eq!(b.b[i * 2], (1.0 - z) / 2.0);
            assert_eq!(b.b[i * 2 + 1], (1.0 + z) / 2.0);
        }
    }

    #[test]
    fn db_equals_collocation_derivative_of_b() {
        for kind in [BasisKind::ModifiedA, BasisKind::ModifiedB, BasisKind::ModifiedC, BasisKind::ModifiedPyrC] {
            for p in 1..6 {
                for qk in [QuadratureKind::GaussLobattoLegendre, QuadratureKind::GaussRadauJacobiAlpha2] {
                    let basis = Basis1D::new(kind, p, compute_rule(qk, p + 2).unwrap());
                    let d = basis.diff_matrix();
                    let (q, n) = (basis.npoints(), basis.nmodes());
                    for i in 0..q {
                        for m in 0..n {
                            let got: f64 = (0..q).map(|k| d.at(i, k) * basis.b[k * n + m]).sum();
                            assert!((got - basis.db[i * n + m]).abs() < 1e-11, "{kind:?} p={p}");
                        }
                    }
                }
            }
        }
    }

    // Expand a random degree-P polynomial in the modified A basis by
    // interpolation at P+1 points, then sample it on the rule through B.
    #[test]
    fn b_reproduces_polynomial_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in 1..8usize {
            let c: Vec<f64> = (0..=p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = |z: f64| c.iter().rev().fold(0.0, |a, &ci| a * z + ci);
            let nodes = gll(p + 1).points;
            let n = p + 1;
            let mut a = vec![0.0; n * n];
            let mut rhs = vec![0.0; n];
            for i in 0..n {
                for m in 0..n {
                    a[i * n + m] = Factor1D::A(m).value(nodes[i]);
                }
                rhs[i] = f(nodes[i]);
            }
            let coef = crate::linalg::solve_dense(&a, &rhs, n).unwrap();
            let basis = Basis1D::new(BasisKind::ModifiedA, p, gll(p + 3));
            for (i, &z) in basis.rule.points.iter().enumerate() {
                let v: f64 = (0..n).map(|m| basis.b[i * n + m] * coef[m]).sum();
                assert!((v - f(z)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lagrange_gram_by_loop() {
        let r = gll(6);
        let b = Basis1D::new(BasisKind::Lagrange, 5, r.clone());
        let q = 6;
        for m in 0..q {
            for n in 0..q {
                let fast: f64 = (0..q).map(|l| b.b[l * q + m] * r.weights[l] * b.b[l * q + n]).sum();
                let mut slow = 0.0;
                for l in 0..q {
                    slow += r.weights[l]
                        * lagrange_value(&r.points, m, r.points[l])
                        * lagrange_value(&r.points, n, r.points[l]);
                }
                assert!((fast - slow).abs() < 1e-12);
            }
        }
    }
}
