use super::jacobi::{jacobi, jacobi_deriv, jacobi_zeros};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadratureKind {
    GaussLobattoLegendre,
    /// Gauss-Radau-Jacobi with weight (1-z), including z=-1.
    GaussRadauJacobiAlpha1,
    /// Gauss-Radau-Jacobi with weight (1-z)^2, including z=-1.
    GaussRadauJacobiAlpha2,
}

impl QuadratureKind {
    /// Exponent of the (1-z) weight function.
    pub fn alpha(self) -> u32 {
        match self {
            QuadratureKind::GaussLobattoLegendre => 0,
            QuadratureKind::GaussRadauJacobiAlpha1 => 1,
            QuadratureKind::GaussRadauJacobiAlpha2 => 2,
        }
    }

    /// Highest polynomial degree integrated exactly by a Q-point rule.
    pub fn exactness(self, q: usize) -> usize {
        match self {
            QuadratureKind::GaussLobattoLegendre => 2 * q - 3,
            _ => 2 * q - 2,
        }
    }

    /// ∫_{-1}^{1} (1-z)^alpha dz
    pub fn weight_integral(self) -> f64 {
        let a = self.alpha() as i32;
        2f64.powi(a + 1) / (a + 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn npoints(&self) -> usize {
        self.points.len()
    }
}

pub fn compute_rule(kind: QuadratureKind, q: usize) -> Result<QuadratureRule> {
    if q < 2 {
        return Err(Error::TooFewPoints(q));
    }
    let (points, weights) = match kind {
        QuadratureKind::GaussLobattoLegendre => gll(q),
        QuadratureKind::GaussRadauJacobiAlpha1 => radau_jacobi(q, 1),
        QuadratureKind::GaussRadauJacobiAlpha2 => radau_jacobi(q, 2),
    };
    Ok(QuadratureRule { kind, points, weights })
}

fn gll(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut z = Vec::with_capacity(q);
    z.push(-1.0);
    z.extend(jacobi_zeros(q - 2, 1.0, 1.0));
    z.push(1.0);
    let c = 2.0 / (q * (q - 1)) as f64;
    let w = z
        .iter()
        .map(|&zi| {
            let p = jacobi(q - 1, 0.0, 0.0, zi);
            c / (p * p)
        })
        .collect();
    (z, w)
}

// Left Radau rule for (1-z)^alpha: the interior nodes are Gauss-Jacobi
// (alpha, 1) nodes and their weights pick up a 1/(1+z) factor.
fn radau_jacobi(q: usize, alpha: u32) -> (Vec<f64>, Vec<f64>) {
    let a = alpha as f64;
    let n = q - 1;
    let mut z = Vec::with_capacity(q);
    let mut w = Vec::with_capacity(q);
    z.push(-1.0);
    w.push(2f64.powi(alpha as i32 + 1) / (q as f64 * (q as f64 + a)));
    let gj = 2f64.powi(alpha as i32 + 2) * (n as f64 + 1.0) / (n as f64 + a + 1.0);
    for zi in jacobi_zeros(n, a, 1.0) {
        let dp = jacobi_deriv(n, a, 1.0, zi);
        let wt = gj / ((1.0 - zi * zi) * dp * dp);
        z.push(zi);
        w.push(wt / (1.0 + zi));
    }
    (z, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const KINDS: [QuadratureKind; 3] = [
        QuadratureKind::GaussLobattoLegendre,
        QuadratureKind::GaussRadauJacobiAlpha1,
        QuadratureKind::GaussRadauJacobiAlpha2,
    ];

    #[test]
    fn gll_two_and_three() {
        let r = compute_rule(QuadratureKind::GaussLobattoLegendre, 2).unwrap();
        assert_eq!(r.points, vec![-1.0, 1.0]);
        assert_eq!(r.weights, vec![1.0, 1.0]);
        let r = compute_rule(QuadratureKind::GaussLobattoLegendre, 3).unwrap();
        let expect_w = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
        let expect_z = [-1.0, 0.0, 1.0];
        for i in 0..3 {
            assert!((r.points[i] - expect_z[i]).abs() < 1e-15);
            assert!((r.weights[i] - expect_w[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn radau_alpha1_two_points() {
        // nodes {-1, 0}; exactness on 1, z, z^2 against (1-z) fixes weights {2/3, 4/3}
        let r = compute_rule(QuadratureKind::GaussRadauJacobiAlpha1, 2).unwrap();
        assert!((r.points[0] + 1.0).abs() < 1e-15 && r.points[1].abs() < 1e-15);
        assert!((r.weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.weights[1] - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn too_few_points() {
        assert_eq!(
            compute_rule(QuadratureKind::GaussLobattoLegendre, 1),
            Err(Error::TooFewPoints(1))
        );
    }

    #[test]
    fn weight_sums_and_ordering() {
        for kind in KINDS {
            for q in 2..20 {
                let r = compute_rule(kind, q).unwrap();
                let s: f64 = r.weights.iter().sum();
                assert!((s - kind.weight_integral()).abs() < 1e-13, "{kind:?} {q}");
                assert!(r.weights.iter().all(|&w| w > 0.0));
                assert!(r.points.windows(2).all(|p| p[0] < p[1]));
                assert!(r.points.iter().all(|&p| (-1.0..=1.0).contains(&p)));
                if kind != QuadratureKind::GaussLobattoLegendre {
                    assert!(*r.points.last().unwrap() < 1.0);
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        for kind in KINDS {
            let a = compute_rule(kind, 9).unwrap();
            let b = compute_rule(kind, 9).unwrap();
            assert_eq!(a, b);
        }
    }

    // ∫_{-1}^{1} (1-z)^a z^k dz by expanding (1-z)^a binomially.
    fn moment(a: u32, k: usize) -> f64 {
        let mut s = 0.0;
        let mut c = 1.0;
        for j in 0..=a as usize {
            let e = k + j;
            let m = if e % 2 == 0 { 2.0 / (e + 1) as f64 } else { 0.0 };
            s += c * if j % 2 == 0 { 1.0 } else { -1.0 } * m;
            c = c * (a as usize - j) as f64 / (j + 1) as f64;
        }
        s
    }

    proptest! {
        #[test]
        fn exact_for_random_polynomials(
            q in 2usize..14,
            kidx in 0usize..3,
            coeffs in proptest::collection::vec(-1.0f64..1.0, 40),
        ) {
            let kind = KINDS[kidx];
            let r = compute_rule(kind, q).unwrap();
            let deg = kind.exactness(q);
            let exact: f64 = (0..=deg).map(|k| coeffs[k] * moment(kind.alpha(), k)).sum();
            let approx: f64 = r.points.iter().zip(&r.weights).map(|(&z, &w)| {
                w * (0..=deg).rev().fold(0.0, |acc, k| acc * z + coeffs[k])
            }).sum();
            let scale = (0..=deg).map(|k| coeffs[k].abs()).sum::<f64>().max(1.0);
            prop_assert!((exact - approx).abs() <= 1e-12 * scale * 4.0,
                "{:?} q={} exact={} approx={}", kind, q, exact, approx);
        }
    }
}
