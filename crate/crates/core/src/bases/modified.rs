//! Modified hierarchical basis families on [-1,1].
//!
//! `A`: vertex modes (1∓z)/2 and bubbles (1-z)(1+z)/4 · P^{1,1}_{p-2}.
//! `B`/`C`/`PyrC`: the warped families used in collapsed directions, carrying a
//! power of (1-z)/2 that cancels the Duffy singularity.

use super::jacobi::{jacobi, jacobi_deriv};
use crate::error::{Error, Result};

/// One 1D factor of a multi-dimensional mode.
///
/// `Unity` is the constant 1 = ψ^a_0 + ψ^a_1, used for modes through a
/// collapsed vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor1D {
    Unity,
    A(usize),
    B(usize, usize),
    C(usize, usize, usize),
    PyrC(usize, usize, usize),
}

impl Factor1D {
    /// (value, derivative) at z.
    pub fn eval(self, z: f64) -> (f64, f64) {
        match self {
            Factor1D::Unity => (1.0, 0.0),
            Factor1D::A(p) => mod_a(p, z),
            Factor1D::B(p, q) => {
                if p == 0 {
                    mod_a(q, z)
                } else {
                    warped(p, q, z)
                }
            }
            Factor1D::C(p, q, r) => {
                if p + q == 0 {
                    mod_a(r, z)
                } else {
                    warped(p + q, r, z)
                }
            }
            Factor1D::PyrC(p, q, r) => {
                if p.max(q) == 0 {
                    mod_a(r, z)
                } else {
                    warped(p.max(q), r, z)
                }
            }
        }
    }

    pub fn value(self, z: f64) -> f64 {
        self.eval(z).0
    }

    /// Polynomial degree in z.
    pub fn degree(self) -> usize {
        match self {
            Factor1D::Unity => 0,
            Factor1D::A(p) => p.max(1),
            Factor1D::B(p, q) => (p + q).max(1),
            Factor1D::C(p, q, r) => (p + q + r).max(1),
            Factor1D::PyrC(p, q, r) => (p.max(q) + r).max(1),
        }
    }
}

fn mod_a(p: usize, z: f64) -> (f64, f64) {
    match p {
        0 => (0.5 * (1.0 - z), -0.5),
        1 => (0.5 * (1.0 + z), 0.5),
        _ => {
            let j = jacobi(p - 2, 1.0, 1.0, z);
            let dj = jacobi_deriv(p - 2, 1.0, 1.0, z);
            let g = 0.25 * (1.0 - z) * (1.0 + z);
            (g * j, -0.5 * z * j + g * dj)
        }
    }
}

// ((1-z)/2)^k · g_n(z), g_0 = 1, g_n = (1+z)/2 · P^{2k-1,1}_{n-1}(z).
fn warped(k: usize, n: usize, z: f64) -> (f64, f64) {
    let h = 0.5 * (1.0 - z);
    let hk = h.powi(k as i32);
    let dhk = -0.5 * k as f64 * h.powi(k as i32 - 1);
    let (g, dg) = if n == 0 {
        (1.0, 0.0)
    } else {
        let a = (2 * k - 1) as f64;
        let j = jacobi(n - 1, a, 1.0, z);
        let dj = jacobi_deriv(n - 1, a, 1.0, z);
        (0.5 * (1.0 + z) * j, 0.5 * j + 0.5 * (1.0 + z) * dj)
    };
    (hk * g, dhk * g + hk * dg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    ModifiedA,
    ModifiedB,
    ModifiedC,
    /// Pyramid apex-direction family: exponent max(p,q) instead of p+q.
    ModifiedPyrC,
    Lagrange,
}

/// Admissible 1D index tuples of a modified family at order P, lexicographic.
pub fn family_indices(kind: BasisKind, order: usize) -> Vec<Factor1D> {
    let p_ = order;
    let mut v = Vec::new();
    match kind {
        BasisKind::ModifiedA | BasisKind::Lagrange => v.extend((0..=p_).map(Factor1D::A)),
        BasisKind::ModifiedB => {
            for p in 0..=p_ {
                for q in 0..=p_ - p {
                    v.push(Factor1D::B(p, q));
                }
            }
        }
        BasisKind::ModifiedC => {
            for p in 0..=p_ {
                for q in 0..=p_ - p {
                    for r in 0..=p_ - p - q {
                        v.push(Factor1D::C(p, q, r));
                    }
                }
            }
        }
        BasisKind::ModifiedPyrC => {
            for p in 0..=p_ {
                for q in 0..=p_ {
                    for r in 0..=p_ - p.max(q) {
                        v.push(Factor1D::PyrC(p, q, r));
                    }
                }
            }
        }
    }
    v
}

/// Pointwise value of ψ^a_p, ψ^b_pq, ψ^c_pqr (or the pyramid variant).
pub fn eval_modified_basis(kind: BasisKind, order: usize, idx: &[usize], z: f64) -> Result<f64> {
    let bad = || Error::IndexOutOfRange { index: idx.to_vec(), order };
    let f = match (kind, idx) {
        (BasisKind::ModifiedA, &[p]) if p <= order => Factor1D::A(p),
        (BasisKind::ModifiedB, &[p, q]) if p + q <= order => Factor1D::B(p, q),
        (BasisKind::ModifiedC, &[p, q, r]) if p + q + r <= order => Factor1D::C(p, q, r),
        (BasisKind::ModifiedPyrC, &[p, q, r]) if p <= order && q <= order && p.max(q) + r <= order => {
            Factor1D::PyrC(p, q, r)
        }
        _ => return Err(bad()),
    };
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::InvalidParameter(format!("z={z} outside [-1,1]")));
    }
    Ok(f.value(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vertex_modes() {
        assert_eq!(eval_modified_basis(BasisKind::ModifiedA, 3, &[0], 1.0).unwrap(), 0.0);
        assert_eq!(eval_modified_basis(BasisKind::ModifiedA, 3, &[1], 1.0).unwrap(), 1.0);
        assert_eq!(eval_modified_basis(BasisKind::ModifiedA, 3, &[0], -1.0).unwrap(), 1.0);
    }

    #[test]
    fn out_of_range_index() {
        assert!(eval_modified_basis(BasisKind::ModifiedA, 2, &[3], 0.0).is_err());
        assert!(eval_modified_basis(BasisKind::ModifiedB, 2, &[2, 1], 0.0).is_err());
        assert!(eval_modified_basis(BasisKind::ModifiedC, 2, &[1, 1, 1], 0.0).is_err());
        assert!(eval_modified_basis(BasisKind::ModifiedPyrC, 2, &[2, 1, 1], 0.0).is_err());
        assert!(eval_modified_basis(BasisKind::ModifiedPyrC, 2, &[2, 1, 0], 0.0).is_ok());
        assert!(eval_modified_basis(BasisKind::ModifiedB, 2, &[1], 0.0).is_err());
    }

    #[test]
    fn bubbles_vanish_at_ends() {
        for p in 2..8 {
            assert!(Factor1D::A(p).value(1.0).abs() < 1e-15);
            assert!(Factor1D::A(p).value(-1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn b_boundary_family_expands_to_power() {
        // ψ^b_{p0}(z) = ((1-z)/2)^p for p ≥ 1; binomial expansion in z
        for p in 1..7usize {
            for i in 0..=20 {
                let z = -1.0 + 0.1 * i as f64;
                let mut poly = 0.0;
                let mut c = 1.0;
                for j in 0..=p {
                    poly += c * (-z).powi(j as i32);
                    c = c * (p - j) as f64 / (j + 1) as f64;
                }
                poly /= 2f64.powi(p as i32);
                let v = eval_modified_basis(BasisKind::ModifiedB, p, &[p, 0], z).unwrap();
                assert!((v - poly).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn family_sizes() {
        for p in 1..8 {
            assert_eq!(family_indices(BasisKind::ModifiedA, p).len(), p + 1);
            assert_eq!(family_indices(BasisKind::ModifiedB, p).len(), (p + 1) * (p + 2) / 2);
            assert_eq!(family_indices(BasisKind::ModifiedC, p).len(), (p + 1) * (p + 2) * (p + 3) / 6);
            assert_eq!(
                family_indices(BasisKind::ModifiedPyrC, p).len(),
                (p + 1) * (p + 2) * (2 * p + 3) / 6
            );
        }
    }

    proptest! {
        #[test]
        fn derivative_matches_difference(p in 0usize..6, q in 0usize..6, r in 0usize..5, z in -0.99f64..0.99) {
            let h = 1e-6;
            for f in [Factor1D::A(p), Factor1D::B(p, q), Factor1D::C(p, q, r), Factor1D::PyrC(p, q, r)] {
                let fd = (f.value(z + h) - f.value(z - h)) / (2.0 * h);
                let (_, d) = f.eval(z);
                prop_assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()), "{:?}", f);
            }
        }

        #[test]
        fn degree_is_exact(p in 0usize..5, q in 0usize..5, r in 0usize..4) {
            // (deg+1)-th finite difference on a uniform grid vanishes for a polynomial
            for f in [Factor1D::A(p), Factor1D::B(p, q), Factor1D::C(p, q, r), Factor1D::PyrC(p, q, r)] {
                let n = f.degree() + 1;
                let h = 2.0 / n as f64;
                let mut diff: Vec<f64> = (0..=n).map(|i| f.value(-1.0 + h * i as f64)).collect();
                for _ in 0..n {
                    diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
                }
                prop_assert!(diff[0].abs() < 1e-10, "{:?}", f);
            }
        }
    }
}
