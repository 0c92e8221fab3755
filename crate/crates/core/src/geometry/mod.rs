//! Element maps and precomputed metric terms.

mod layout;
mod mesh;

pub use layout::MetricLayout;
pub use mesh::{affine_vertices, build_geometry, deformed_map, synthetic_affine_maps, AffineMap, DEFAULT_DEFORM_AMP};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::invert_small;
use crate::shapes::{chain_rule_factors, duffy_inverse, ShapeType, StdElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryClass {
    Regular,
    Deformed,
}

impl fmt::Display for GeometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryClass::Regular => "regular",
            GeometryClass::Deformed => "deformed",
        })
    }
}

impl FromStr for GeometryClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "regular" => Ok(GeometryClass::Regular),
            "deformed" => Ok(GeometryClass::Deformed),
            o => Err(Error::InvalidParameter(format!("unknown geometry '{o}'"))),
        }
    }
}

/// Metric terms of a block.
///
/// `dxi_dx[i*d + a] = ∂ξ_i/∂x_a`. Regular blocks store one d×d matrix and
/// one |J| per element (`wj` empty); Deformed blocks store them per
/// quadrature point together with `wj = w_ref·|J|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricFactors {
    pub class: GeometryClass,
    pub shape: ShapeType,
    pub dim: usize,
    pub n_elements: usize,
    pub n_points: usize,
    pub dxi_dx: Vec<f64>,
    pub jac: Vec<f64>,
    pub wj: Vec<f64>,
}

/// Diagonal weight payload of a block.
#[derive(Debug, Clone, PartialEq)]
pub enum FusedWeights {
    /// |J| per element, to be combined with the reference weights.
    Scalar(Vec<f64>),
    /// w_l |J_l| per element and point.
    PerPoint(Vec<f64>),
}

impl GeometricFactors {
    fn stride(&self) -> usize {
        match self.class {
            GeometryClass::Regular => 1,
            GeometryClass::Deformed => self.n_points,
        }
    }

    pub fn dxi_dx_at(&self, e: usize, l: usize) -> &[f64] {
        let dd = self.dim * self.dim;
        let k = match self.class {
            GeometryClass::Regular => e,
            GeometryClass::Deformed => e * self.n_points + l,
        };
        &self.dxi_dx[k * dd..(k + 1) * dd]
    }

    pub fn jac_at(&self, e: usize, l: usize) -> f64 {
        match self.class {
            GeometryClass::Regular => self.jac[e],
            GeometryClass::Deformed => self.jac[e * self.n_points + l],
        }
    }

    /// w_l |J_l| given the reference weights.
    pub fn wj_at(&self, e: usize, l: usize, w_ref: &[f64]) -> f64 {
        match self.class {
            GeometryClass::Regular => w_ref[l] * self.jac[e],
            GeometryClass::Deformed => self.wj[e * self.n_points + l],
        }
    }

    /// Scalars stored per element.
    pub fn storage_per_element(&self) -> usize {
        (self.dxi_dx.len() + self.jac.len() + self.wj.len()) / self.n_elements
    }

    /// Restrict to a subset of elements.
    pub fn select(&self, elems: &[usize]) -> GeometricFactors {
        let s = self.stride();
        let dd = self.dim * self.dim;
        let mut out = GeometricFactors {
            n_elements: elems.len(),
            dxi_dx: Vec::new(),
            jac: Vec::new(),
            wj: Vec::new(),
            ..self.clone()
        };
        for &e in elems {
            out.dxi_dx.extend_from_slice(&self.dxi_dx[e * s * dd..(e + 1) * s * dd]);
            out.jac.extend_from_slice(&self.jac[e * s..(e + 1) * s]);
            if !self.wj.is_empty() {
                out.wj.extend_from_slice(&self.wj[e * s..(e + 1) * s]);
            }
        }
        out
    }
}

pub fn fuse_weights(g: &GeometricFactors) -> FusedWeights {
    match g.class {
        GeometryClass::Regular => FusedWeights::Scalar(g.jac.clone()),
        GeometryClass::Deformed => FusedWeights::PerPoint(g.wj.clone()),
    }
}

/// Constant metric from per-element vertex lists, numbered like
/// [`ShapeType::reference_vertices`].
pub fn make_affine_block(shape: ShapeType, vertices: &[Vec<Vec<f64>>]) -> Result<GeometricFactors> {
    let d = shape.dim();
    let refv = shape.reference_vertices();
    let mut dxi_dx = Vec::with_capacity(vertices.len() * d * d);
    let mut jac = Vec::with_capacity(vertices.len());
    for (e, v) in vertices.iter().enumerate() {
        if v.len() != refv.len() || v.iter().any(|x| x.len() != d) {
            return Err(Error::NotAffine { element: e, shape });
        }
        // J[a][i] = ∂x_a/∂ξ_i from the edges leaving vertex 0
        let mut j = vec![0.0; d * d];
        for i in 0..d {
            for a in 0..d {
                j[a * d + i] = 0.5 * (v[1 + i][a] - v[0][a]);
            }
        }
        for (rv, x) in refv.iter().zip(v) {
            for a in 0..d {
                let pred: f64 = v[0][a] + (0..d).map(|i| j[a * d + i] * (rv[i] + 1.0)).sum::<f64>();
                let scale = 1.0 + x[a].abs();
                if (pred - x[a]).abs() > 1e-12 * scale {
                    return Err(Error::NotAffine { element: e, shape });
                }
            }
        }
        let (inv, det) = invert_small(&j, d);
        if !(det > 0.0) {
            return Err(Error::DegenerateElement { element: e, det });
        }
        dxi_dx.extend(inv);
        jac.push(det);
    }
    Ok(GeometricFactors {
        class: GeometryClass::Regular,
        shape,
        dim: d,
        n_elements: vertices.len(),
        n_points: 0,
        dxi_dx,
        jac,
        wj: Vec::new(),
    })
}

/// Per-point metric of curved elements.
///
/// The map `chi(e, ξ)` is sampled at the quadrature points, projected onto
/// the element's own expansion (iso-parametric, P_geo = P), and the
/// projection is differentiated by collocation in η and the chain rule.
pub fn make_deformed_block(
    std: &StdElement,
    n_elements: usize,
    chi: &(dyn Fn(usize, &[f64]) -> Vec<f64> + Sync),
) -> Result<GeometricFactors> {
    let d = std.dim;
    let (nq, np) = (std.n_points, std.n_modes);

    // weighted least squares on W^½ B, factored once
    let sw: Vec<f64> = std.w_ref.iter().map(|w| w.sqrt()).collect();
    let mut wb = std.b.clone();
    for l in 0..nq {
        for m in 0..np {
            wb[l * np + m] *= sw[l];
        }
    }
    let qr = crate::linalg::QrFactor::new(&wb, nq, np)?;
    let xi_pts: Vec<Vec<f64>> = (0..nq).map(|l| duffy_inverse(std.shape, std.eta_at(l))).collect();
    let g: Vec<Vec<f64>> = (0..nq).map(|l| chain_rule_factors(std.shape, std.eta_at(l))).collect();

    let mut dxi_dx = vec![0.0; n_elements * nq * d * d];
    let mut jac = vec![0.0; n_elements * nq];
    let mut wj = vec![0.0; n_elements * nq];
    let mut xh = vec![vec![0.0; nq]; d];
    for e in 0..n_elements {
        let xs: Vec<Vec<f64>> = xi_pts.iter().map(|x| chi(e, x)).collect();
        for a in 0..d {
            let rhs: Vec<f64> = (0..nq).map(|l| sw[l] * xs[l][a]).collect();
            let rhs = qr.solve(&rhs);
            for l in 0..nq {
                xh[a][l] = std.b[l * np..(l + 1) * np].iter().zip(&rhs).map(|(b, c)| b * c).sum();
            }
        }
        for l in 0..nq {
            // ∂x_a/∂η_k by tensor collocation
            let mut dx_deta = vec![0.0; d * d];
            for a in 0..d {
                let de = tensor_deriv_at(std, &xh[a], l);
                dx_deta[a * d..(a + 1) * d].copy_from_slice(&de);
            }
            // J[a][i] = Σ_k G[i][k] ∂x_a/∂η_k
            let mut j = vec![0.0; d * d];
            for a in 0..d {
                for i in 0..d {
                    j[a * d + i] = (0..d).map(|k| g[l][i * d + k] * dx_deta[a * d + k]).sum();
                }
            }
            let (inv, det) = invert_small(&j, d);
            if !(det > 0.0) {
                return Err(Error::DegenerateElement { element: e, det });
            }
            let k = e * nq + l;
            dxi_dx[k * d * d..(k + 1) * d * d].copy_from_slice(&inv);
            jac[k] = det;
            wj[k] = std.w_ref[l] * det;
        }
    }
    Ok(GeometricFactors {
        class: GeometryClass::Deformed,
        shape: std.shape,
        dim: d,
        n_elements,
        n_points: nq,
        dxi_dx,
        jac,
        wj,
    })
}

/// η-gradient at point l of point samples `u` by 1D collocation along
/// each direction.
pub(crate) fn tensor_deriv_at(std: &StdElement, u: &[f64], l: usize) -> Vec<f64> {
    let q = &std.q;
    let d = std.dim;
    let mut idx = vec![0; d];
    let mut rem = l;
    for k in (0..d).rev() {
        idx[k] = rem % q[k];
        rem /= q[k];
    }
    let mut stride = vec![1; d];
    for k in (0..d - 1).rev() {
        stride[k] = stride[k + 1] * q[k + 1];
    }
    (0..d)
        .map(|k| {
            let base = l - idx[k] * stride[k];
            (0..q[k])
                .map(|s| std.diff[k].at(idx[k], s) * u[base + s * stride[k]])
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests;
