//! Element shapes, mode index sets, collapsed coordinates and standard
//! elements.

mod duffy;
mod element;
mod tree;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use duffy::{
    build_collapsed_metric, chain_rule_factors, duffy_forward, duffy_inverse, tensor_points, CollapsedMap,
};
pub use element::{build_shape_basis, build_shape_basis_with_q, eval_mode, StdElement};
pub use tree::FactorTree;

use crate::bases::{BasisKind, Factor1D, QuadratureKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShapeType {
    Quad,
    Tri,
    Hex,
    Prism,
    Pyr,
    Tet,
}

impl ShapeType {
    pub const ALL: [ShapeType; 6] = [
        ShapeType::Quad,
        ShapeType::Tri,
        ShapeType::Hex,
        ShapeType::Prism,
        ShapeType::Pyr,
        ShapeType::Tet,
    ];

    pub fn dim(self) -> usize {
        match self {
            ShapeType::Quad | ShapeType::Tri => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ShapeType::Quad => "quad",
            ShapeType::Tri => "tri",
            ShapeType::Hex => "hex",
            ShapeType::Prism => "prism",
            ShapeType::Pyr => "pyr",
            ShapeType::Tet => "tet",
        }
    }

    /// True for shapes built on collapsed coordinates.
    pub fn is_collapsed(self) -> bool {
        !matches!(self, ShapeType::Quad | ShapeType::Hex)
    }

    /// Quadrature family in each η direction.
    pub fn rule_kinds(self) -> Vec<QuadratureKind> {
        use QuadratureKind::*;
        match self {
            ShapeType::Quad => vec![GaussLobattoLegendre; 2],
            ShapeType::Tri => vec![GaussLobattoLegendre, GaussRadauJacobiAlpha1],
            ShapeType::Hex => vec![GaussLobattoLegendre; 3],
            ShapeType::Prism => vec![GaussLobattoLegendre, GaussLobattoLegendre, GaussRadauJacobiAlpha1],
            ShapeType::Pyr => vec![GaussLobattoLegendre, GaussLobattoLegendre, GaussRadauJacobiAlpha2],
            ShapeType::Tet => vec![GaussLobattoLegendre, GaussRadauJacobiAlpha1, GaussRadauJacobiAlpha2],
        }
    }

    /// Basis family in each η direction.
    pub fn basis_kinds(self) -> Vec<BasisKind> {
        use BasisKind::*;
        match self {
            ShapeType::Quad => vec![ModifiedA; 2],
            ShapeType::Tri => vec![ModifiedA, ModifiedB],
            ShapeType::Hex => vec![ModifiedA; 3],
            ShapeType::Prism => vec![ModifiedA, ModifiedA, ModifiedB],
            ShapeType::Pyr => vec![ModifiedA, ModifiedA, ModifiedPyrC],
            ShapeType::Tet => vec![ModifiedA, ModifiedB, ModifiedC],
        }
    }

    /// Constant factor relating the product of 1D weights to the reference
    /// measure once the (1-η)^α weights have absorbed the Duffy jacobian.
    pub fn weight_scale(self) -> f64 {
        match self {
            ShapeType::Quad | ShapeType::Hex => 1.0,
            ShapeType::Tri | ShapeType::Prism => 0.5,
            ShapeType::Pyr => 0.25,
            ShapeType::Tet => 0.125,
        }
    }

    /// Measure of the standard element.
    pub fn reference_volume(self) -> f64 {
        match self {
            ShapeType::Quad => 4.0,
            ShapeType::Tri => 2.0,
            ShapeType::Hex => 8.0,
            ShapeType::Prism => 4.0,
            ShapeType::Pyr => 8.0 / 3.0,
            ShapeType::Tet => 4.0 / 3.0,
        }
    }

    /// Vertices of the standard element in ξ, numbered so that vertex 0 is
    /// (-1,..,-1) and vertex 1+i is the neighbour along axis i.
    pub fn reference_vertices(self) -> Vec<Vec<f64>> {
        let v = |c: &[f64]| c.to_vec();
        match self {
            ShapeType::Quad => vec![v(&[-1., -1.]), v(&[1., -1.]), v(&[-1., 1.]), v(&[1., 1.])],
            ShapeType::Tri => vec![v(&[-1., -1.]), v(&[1., -1.]), v(&[-1., 1.])],
            ShapeType::Hex => vec![
                v(&[-1., -1., -1.]),
                v(&[1., -1., -1.]),
                v(&[-1., 1., -1.]),
                v(&[-1., -1., 1.]),
                v(&[1., 1., -1.]),
                v(&[1., -1., 1.]),
                v(&[-1., 1., 1.]),
                v(&[1., 1., 1.]),
            ],
            ShapeType::Prism => vec![
                v(&[-1., -1., -1.]),
                v(&[1., -1., -1.]),
                v(&[-1., 1., -1.]),
                v(&[-1., -1., 1.]),
                v(&[1., 1., -1.]),
                v(&[-1., 1., 1.]),
            ],
            ShapeType::Pyr => vec![
                v(&[-1., -1., -1.]),
                v(&[1., -1., -1.]),
                v(&[-1., 1., -1.]),
                v(&[-1., -1., 1.]),
                v(&[1., 1., -1.]),
            ],
            ShapeType::Tet => vec![
                v(&[-1., -1., -1.]),
                v(&[1., -1., -1.]),
                v(&[-1., 1., -1.]),
                v(&[-1., -1., 1.]),
            ],
        }
    }

    /// Whether ξ lies in the closed standard region (with tolerance).
    pub fn contains(self, xi: &[f64]) -> bool {
        let t = 1e-12;
        let in_cube = xi.iter().all(|&x| (-1.0 - t..=1.0 + t).contains(&x));
        in_cube
            && match self {
                ShapeType::Quad | ShapeType::Hex => true,
                ShapeType::Tri => xi[0] + xi[1] <= t,
                ShapeType::Prism => xi[0] + xi[2] <= t,
                ShapeType::Pyr => xi[0] + xi[2] <= t && xi[1] + xi[2] <= t,
                ShapeType::Tet => xi[0] + xi[1] + xi[2] <= -1.0 + t,
            }
    }
}

impl fmt::Display for ShapeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quad" => Ok(ShapeType::Quad),
            "tri" => Ok(ShapeType::Tri),
            "hex" => Ok(ShapeType::Hex),
            "prism" => Ok(ShapeType::Prism),
            "pyr" | "pyramid" => Ok(ShapeType::Pyr),
            "tet" => Ok(ShapeType::Tet),
            other => Err(Error::InvalidParameter(format!("unknown shape '{other}'"))),
        }
    }
}

/// Admissible (p,q[,r]) tuples in lexicographic order, p slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    pub shape: ShapeType,
    pub order: usize,
    pub modes: Vec<[usize; 3]>,
    lookup: HashMap<[usize; 3], usize>,
}

impl IndexSet {
    pub fn new(shape: ShapeType, order: usize) -> Self {
        let p_ = order;
        let mut modes = Vec::new();
        match shape {
            ShapeType::Quad => {
                for p in 0..=p_ {
                    for q in 0..=p_ {
                        modes.push([p, q, 0]);
                    }
                }
            }
            ShapeType::Tri => {
                for p in 0..=p_ {
                    for q in 0..=p_ - p {
                        modes.push([p, q, 0]);
                    }
                }
            }
            ShapeType::Hex => {
                for p in 0..=p_ {
                    for q in 0..=p_ {
                        for r in 0..=p_ {
                            modes.push([p, q, r]);
                        }
                    }
                }
            }
            ShapeType::Prism => {
                for p in 0..=p_ {
                    for q in 0..=p_ {
                        for r in 0..=p_ - p {
                            modes.push([p, q, r]);
                        }
                    }
                }
            }
            ShapeType::Pyr => {
                for p in 0..=p_ {
                    for q in 0..=p_ {
                        for r in 0..=p_ - p.max(q) {
                            modes.push([p, q, r]);
                        }
                    }
                }
            }
            ShapeType::Tet => {
                for p in 0..=p_ {
                    for q in 0..=p_ - p {
                        for r in 0..=p_ - p - q {
                            modes.push([p, q, r]);
                        }
                    }
                }
            }
        }
        let lookup = modes.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        IndexSet { shape, order, modes, lookup }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Linear index m of (p,q,r); r is ignored for 2D shapes.
    pub fn linear_index(&self, p: usize, q: usize, r: usize) -> Result<usize> {
        let r = if self.shape.dim() == 2 { 0 } else { r };
        self.lookup.get(&[p, q, r]).copied().ok_or(Error::IndexOutOfRange {
            index: vec![p, q, r],
            order: self.order,
        })
    }

    /// 1D factors of mode m, one per direction.
    pub fn factors(&self, m: usize) -> Vec<Factor1D> {
        mode_factors(self.shape, self.modes[m])
    }
}

/// The 1D factors whose product is the mode (p,q,r).
pub fn mode_factors(shape: ShapeType, [p, q, r]: [usize; 3]) -> Vec<Factor1D> {
    use Factor1D::*;
    match shape {
        ShapeType::Quad => vec![A(p), A(q)],
        ShapeType::Tri => {
            let f1 = if (p, q) == (0, 1) { Unity } else { A(p) };
            vec![f1, B(p, q)]
        }
        ShapeType::Hex => vec![A(p), A(q), A(r)],
        ShapeType::Prism => {
            let f1 = if (p, r) == (0, 1) { Unity } else { A(p) };
            vec![f1, A(q), B(p, r)]
        }
        ShapeType::Pyr => {
            if (p, q, r) == (0, 0, 1) {
                vec![Unity, Unity, PyrC(0, 0, 1)]
            } else {
                vec![A(p), A(q), PyrC(p, q, r)]
            }
        }
        ShapeType::Tet => {
            if (p, q, r) == (0, 0, 1) {
                vec![Unity, Unity, C(0, 0, 1)]
            } else if (p, q) == (0, 1) {
                vec![Unity, B(0, 1), C(0, 1, r)]
            } else {
                vec![A(p), B(p, q), C(p, q, r)]
            }
        }
    }
}

pub fn mode_count(shape: ShapeType, order: usize) -> usize {
    let p = order;
    match shape {
        ShapeType::Quad => (p + 1) * (p + 1),
        ShapeType::Tri => (p + 1) * (p + 2) / 2,
        ShapeType::Hex => (p + 1).pow(3),
        ShapeType::Prism => (p + 1) * (p + 1) * (p + 2) / 2,
        ShapeType::Pyr => (p + 1) * (p + 2) * (2 * p + 3) / 6,
        ShapeType::Tet => (p + 1) * (p + 2) * (p + 3) / 6,
    }
}

/// Default points per direction: P+2 GLL, P+1 Radau in collapsed directions.
pub fn quad_point_count(shape: ShapeType, order: usize) -> Vec<usize> {
    shape
        .rule_kinds()
        .iter()
        .map(|k| match k {
            QuadratureKind::GaussLobattoLegendre => order + 2,
            _ => order + 1,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_examples() {
        assert_eq!(mode_count(ShapeType::Quad, 3), 16);
        assert_eq!(mode_count(ShapeType::Tet, 1), 4);
        assert_eq!(mode_count(ShapeType::Tet, 3), 20);
        assert_eq!(mode_count(ShapeType::Pyr, 2), 14);
        assert_eq!(quad_point_count(ShapeType::Hex, 2), vec![4, 4, 4]);
        assert_eq!(quad_point_count(ShapeType::Tet, 2), vec![4, 3, 3]);
        assert_eq!(quad_point_count(ShapeType::Quad, 1), vec![3, 3]);
    }

    #[test]
    fn index_set_matches_count_and_is_bijective() {
        for shape in ShapeType::ALL {
            for p in 1..=10 {
                let is = IndexSet::new(shape, p);
                assert_eq!(is.len(), mode_count(shape, p));
                for (m, &[a, b, c]) in is.modes.iter().enumerate() {
                    assert_eq!(is.linear_index(a, b, c).unwrap(), m);
                }
            }
        }
    }

    #[test]
    fn lexicographic_order() {
        for shape in ShapeType::ALL {
            let is = IndexSet::new(shape, 4);
            assert!(is.modes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn outside_index() {
        let is = IndexSet::new(ShapeType::Tri, 2);
        assert!(is.linear_index(2, 1, 0).is_err());
        let is = IndexSet::new(ShapeType::Pyr, 2);
        assert!(is.linear_index(1, 2, 1).is_err());
        assert!(is.linear_index(1, 2, 0).is_ok());
    }

    #[test]
    fn parse_shapes() {
        for s in ShapeType::ALL {
            assert_eq!(s.name().parse::<ShapeType>().unwrap(), s);
        }
        assert!("cube".parse::<ShapeType>().is_err());
    }

    #[test]
    fn reference_vertices_inside() {
        for s in ShapeType::ALL {
            for v in s.reference_vertices() {
                assert!(s.contains(&v));
            }
        }
    }
}
