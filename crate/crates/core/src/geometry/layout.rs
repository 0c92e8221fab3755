use super::{GeometricFactors, GeometryClass};

/// Metric terms copied into the lane-major group layout of the operand
/// data. Regular blocks have a single "point" per element.
///
/// * `lam`: `[group][point][d*d][lane]`, X Xᵀ |J| (Regular) or X Xᵀ wJ (Deformed)
/// * `dxi`: `[group][point][d*d][lane]`, X = ∂ξ/∂x
/// * `wj`:  `[group][point][lane]`, |J| (Regular) or wJ (Deformed)
///
/// Padded lanes are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLayout {
    pub class: GeometryClass,
    pub dim: usize,
    pub width: usize,
    pub n_groups: usize,
    pub n_points: usize,
    pub lam: Vec<f64>,
    pub dxi: Vec<f64>,
    pub wj: Vec<f64>,
}

impl MetricLayout {
    pub fn new(g: &GeometricFactors, width: usize) -> Self {
        let d = g.dim;
        let dd = d * d;
        let w = width.max(1);
        let n_groups = g.n_elements.div_ceil(w);
        let np = match g.class {
            GeometryClass::Regular => 1,
            GeometryClass::Deformed => g.n_points,
        };
        let mut lam = vec![0.0; n_groups * np * dd * w];
        let mut dxi = vec![0.0; n_groups * np * dd * w];
        let mut wj = vec![0.0; n_groups * np * w];
        for e in 0..g.n_elements {
            let (grp, lane) = (e / w, e % w);
            for l in 0..np {
                let x = g.dxi_dx_at(e, l);
                let s = match g.class {
                    GeometryClass::Regular => g.jac[e],
                    GeometryClass::Deformed => g.wj[e * np + l],
                };
                let base = (grp * np + l) * dd;
                for i in 0..d {
                    for j in 0..d {
                        let v: f64 = (0..d).map(|a| x[i * d + a] * x[j * d + a]).sum();
                        lam[(base + i * d + j) * w + lane] = v * s;
                        dxi[(base + i * d + j) * w + lane] = x[i * d + j];
                    }
                }
                wj[(grp * np + l) * w + lane] = s;
            }
        }
        MetricLayout { class: g.class, dim: d, width: w, n_groups, n_points: np, lam, dxi, wj }
    }

    pub fn is_regular(&self) -> bool {
        self.class == GeometryClass::Regular
    }

    /// Stored point index for quadrature point l.
    #[inline]
    pub fn pt(&self, l: usize) -> usize {
        if self.is_regular() {
            0
        } else {
            l
        }
    }

    pub fn lam_group(&self, g: usize) -> &[f64] {
        let n = self.n_points * self.dim * self.dim * self.width;
        &self.lam[g * n..(g + 1) * n]
    }

    pub fn dxi_group(&self, g: usize) -> &[f64] {
        let n = self.n_points * self.dim * self.dim * self.width;
        &self.dxi[g * n..(g + 1) * n]
    }

    pub fn wj_group(&self, g: usize) -> &[f64] {
        let n = self.n_points * self.width;
        &self.wj[g * n..(g + 1) * n]
    }
}
