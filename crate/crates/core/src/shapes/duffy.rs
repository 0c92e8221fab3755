use super::ShapeType;
use crate::bases::QuadratureRule;
use crate::error::{Error, Result};

/// Standard region ξ to collapsed cube η. Rejects the singular vertex.
pub fn duffy_forward(shape: ShapeType, xi: &[f64]) -> Result<Vec<f64>> {
    let sing = || Error::SingularPoint(xi.to_vec());
    let div = |num: f64, den: f64| -> Result<f64> {
        if den.abs() < 1e-14 {
            Err(sing())
        } else {
            Ok(2.0 * num / den - 1.0)
        }
    };
    Ok(match shape {
        ShapeType::Quad | ShapeType::Hex => xi.to_vec(),
        ShapeType::Tri => vec![div(1.0 + xi[0], 1.0 - xi[1])?, xi[1]],
        ShapeType::Prism => vec![div(1.0 + xi[0], 1.0 - xi[2])?, xi[1], xi[2]],
        ShapeType::Pyr => vec![
            div(1.0 + xi[0], 1.0 - xi[2])?,
            div(1.0 + xi[1], 1.0 - xi[2])?,
            xi[2],
        ],
        ShapeType::Tet => {
            if (1.0 - xi[2]).abs() < 1e-14 {
                return Err(sing());
            }
            vec![
                div(1.0 + xi[0], -xi[1] - xi[2])?,
                div(1.0 + xi[1], 1.0 - xi[2])?,
                xi[2],
            ]
        }
    })
}

pub fn duffy_inverse(shape: ShapeType, eta: &[f64]) -> Vec<f64> {
    match shape {
        ShapeType::Quad | ShapeType::Hex => eta.to_vec(),
        ShapeType::Tri => vec![0.5 * (1.0 + eta[0]) * (1.0 - eta[1]) - 1.0, eta[1]],
        ShapeType::Prism => vec![0.5 * (1.0 + eta[0]) * (1.0 - eta[2]) - 1.0, eta[1], eta[2]],
        ShapeType::Pyr => vec![
            0.5 * (1.0 + eta[0]) * (1.0 - eta[2]) - 1.0,
            0.5 * (1.0 + eta[1]) * (1.0 - eta[2]) - 1.0,
            eta[2],
        ],
        ShapeType::Tet => vec![
            0.25 * (1.0 + eta[0]) * (1.0 - eta[1]) * (1.0 - eta[2]) - 1.0,
            0.5 * (1.0 + eta[1]) * (1.0 - eta[2]) - 1.0,
            eta[2],
        ],
    }
}

/// G[i][k] = ∂η_k/∂ξ_i at η, row-major d×d, so that ∇_ξ = G ∇_η.
pub fn chain_rule_factors(shape: ShapeType, eta: &[f64]) -> Vec<f64> {
    match shape {
        ShapeType::Quad => vec![1.0, 0.0, 0.0, 1.0],
        ShapeType::Hex => vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ShapeType::Tri => {
            let c = 1.0 / (1.0 - eta[1]);
            vec![2.0 * c, 0.0, (1.0 + eta[0]) * c, 1.0]
        }
        ShapeType::Prism => {
            let c = 1.0 / (1.0 - eta[2]);
            vec![2.0 * c, 0.0, 0.0, 0.0, 1.0, 0.0, (1.0 + eta[0]) * c, 0.0, 1.0]
        }
        ShapeType::Pyr => {
            let c = 1.0 / (1.0 - eta[2]);
            vec![
                2.0 * c,
                0.0,
                0.0,
                0.0,
                2.0 * c,
                0.0,
                (1.0 + eta[0]) * c,
                (1.0 + eta[1]) * c,
                1.0,
            ]
        }
        ShapeType::Tet => {
            let c2 = 1.0 / (1.0 - eta[1]);
            let c3 = 1.0 / (1.0 - eta[2]);
            let g10 = 2.0 * (1.0 + eta[0]) * c2 * c3;
            vec![
                4.0 * c2 * c3,
                0.0,
                0.0,
                g10,
                2.0 * c3,
                0.0,
                g10,
                (1.0 + eta[1]) * c3,
                1.0,
            ]
        }
    }
}

/// Chain-rule factors at every tensor quadrature point (η1 slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct CollapsedMap {
    pub shape: ShapeType,
    pub dim: usize,
    pub n_points: usize,
    /// n_points × d × d
    pub g: Vec<f64>,
}

impl CollapsedMap {
    pub fn at(&self, l: usize) -> &[f64] {
        let dd = self.dim * self.dim;
        &self.g[l * dd..(l + 1) * dd]
    }

    pub fn is_identity(&self) -> bool {
        !self.shape.is_collapsed()
    }
}

pub fn build_collapsed_metric(shape: ShapeType, rules: &[QuadratureRule]) -> Result<CollapsedMap> {
    let d = shape.dim();
    if rules.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rules.len() });
    }
    let collapsed: &[usize] = match shape {
        ShapeType::Quad | ShapeType::Hex => &[],
        ShapeType::Tri => &[1],
        ShapeType::Prism | ShapeType::Pyr => &[2],
        ShapeType::Tet => &[1, 2],
    };
    for &k in collapsed {
        if rules[k].points.iter().any(|&z| z >= 1.0) {
            return Err(Error::SingularRule { direction: k });
        }
    }
    let pts = tensor_points(rules);
    let n_points = pts.len();
    let mut g = Vec::with_capacity(n_points * d * d);
    for eta in &pts {
        g.extend(chain_rule_factors(shape, eta));
    }
    Ok(CollapsedMap { shape, dim: d, n_points, g })
}

/// All tensor points, first direction slowest.
pub fn tensor_points(rules: &[QuadratureRule]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for r in rules {
        let mut next = Vec::with_capacity(out.len() * r.npoints());
        for p in &out {
            for &z in &r.points {
                let mut v = p.clone();
                v.push(z);
                next.push(v);
            }
        }
        out = next;
    }
    out
}
