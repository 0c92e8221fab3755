//! Dense elemental matrices from explicit quadrature loops.
//!
//! Only quadrature rules, collocation differentiation and pointwise mode
//! values are borrowed from the rest of the crate. Point sets, weights,
//! collapsed-coordinate partials and every contraction are rebuilt here,
//! so agreement with the fast kernels means something.

use crate::bases::{compute_rule, diff_matrix_on, QuadratureKind};
use crate::error::{Error, Result};
use crate::geometry::{GeometricFactors, GeometryClass};
use crate::operators::OperatorKind;
use crate::shapes::{eval_mode, IndexSet, ShapeType};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseElementalMatrix {
    pub kind: OperatorKind,
    pub rows: usize,
    pub cols: usize,
    /// row-major
    pub entries: Vec<f64>,
}

impl DenseElementalMatrix {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// |A − Aᵀ|_max / |A|_max
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.at(i, j) - self.at(j, i)).abs());
            }
        }
        worst / self.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// One element of a geometry block, with optional per-direction point
/// counts.
#[derive(Debug, Clone)]
pub struct Element<'a> {
    pub shape: ShapeType,
    pub order: usize,
    pub q: Vec<usize>,
    pub geom: &'a GeometricFactors,
    pub index: usize,
}

impl<'a> Element<'a> {
    pub fn new(shape: ShapeType, order: usize, geom: &'a GeometricFactors, index: usize) -> Self {
        let q = (0..shape.dim()).map(|k| if collapsed_dir(shape, k) { order + 1 } else { order + 2 }).collect();
        Element { shape, order, q, geom, index }
    }

    pub fn with_q(mut self, q: &[usize]) -> Self {
        self.q = q.to_vec();
        self
    }
}

fn collapsed_dir(shape: ShapeType, k: usize) -> bool {
    matches!((shape, k), (ShapeType::Tri, 1) | (ShapeType::Prism, 2) | (ShapeType::Pyr, 2) | (ShapeType::Tet, 1 | 2))
}

fn rule_kind(shape: ShapeType, k: usize) -> QuadratureKind {
    match (shape, k) {
        (ShapeType::Pyr, 2) | (ShapeType::Tet, 2) => QuadratureKind::GaussRadauJacobiAlpha2,
        _ if collapsed_dir(shape, k) => QuadratureKind::GaussRadauJacobiAlpha1,
        _ => QuadratureKind::GaussLobattoLegendre,
    }
}

// ∂η_k/∂ξ_i from differentiating the collapsed map directly
fn partials(shape: ShapeType, eta: &[f64]) -> [[f64; 3]; 3] {
    let mut g = [[0.0; 3]; 3];
    for (i, row) in g.iter_mut().enumerate().take(shape.dim()) {
        row[i] = 1.0;
    }
    let inv = |z: f64| 1.0 / (1.0 - z);
    match shape {
        ShapeType::Quad | ShapeType::Hex => {}
        ShapeType::Tri => {
            g[0][0] = 2.0 * inv(eta[1]);
            g[1][0] = (1.0 + eta[0]) * inv(eta[1]);
        }
        ShapeType::Prism => {
            g[0][0] = 2.0 * inv(eta[2]);
            g[2][0] = (1.0 + eta[0]) * inv(eta[2]);
        }
        ShapeType::Pyr => {
            g[0][0] = 2.0 * inv(eta[2]);
            g[1][1] = 2.0 * inv(eta[2]);
            g[2][0] = (1.0 + eta[0]) * inv(eta[2]);
            g[2][1] = (1.0 + eta[1]) * inv(eta[2]);
        }
        ShapeType::Tet => {
            // η1 = 2(1+ξ1)/(−ξ2−ξ3) − 1, −ξ2−ξ3 = (1−η2)(1−η3)/2
            let s = 0.5 * (1.0 - eta[1]) * (1.0 - eta[2]);
            g[0][0] = 2.0 / s;
            g[1][0] = (1.0 + eta[0]) / s;
            g[2][0] = (1.0 + eta[0]) / s;
            g[1][1] = 2.0 * inv(eta[2]);
            g[2][1] = (1.0 + eta[1]) * inv(eta[2]);
        }
    }
    g
}

// Tensor points and weights in η, first direction slowest, with the
// collapsed-map jacobian folded into the weights.
struct PointSet {
    d: usize,
    q: Vec<usize>,
    eta: Vec<[f64; 3]>,
    w: Vec<f64>,
    z: Vec<Vec<f64>>,
}

fn point_set(shape: ShapeType, q: &[usize]) -> Result<PointSet> {
    let d = shape.dim();
    if q.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: q.len() });
    }
    let rules = (0..d).map(|k| compute_rule(rule_kind(shape, k), q[k])).collect::<Result<Vec<_>>>()?;
    // Radau-Jacobi weights carry (1−η)^α; the map needs (1−η)^α / 2^α
    let scale: f64 = (0..d).map(|k| 0.5f64.powi(rule_kind(shape, k).alpha() as i32)).product();
    let n: usize = q.iter().product();
    let mut eta = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for l in 0..n {
        let mut rem = l;
        let mut p = [0.0; 3];
        let mut wl = scale;
        for k in (0..d).rev() {
            let i = rem % q[k];
            rem /= q[k];
            p[k] = rules[k].points[i];
            wl *= rules[k].weights[i];
        }
        eta.push(p);
        w.push(wl);
    }
    Ok(PointSet { d, q: q.to_vec(), eta, w, z: rules.into_iter().map(|r| r.points).collect() })
}

// per-point wJ and ∂ξ/∂x
fn metric_at(el: &Element, n: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let g = el.geom;
    if g.shape != el.shape || el.index >= g.n_elements {
        return Err(Error::InvalidParameter("element does not belong to the geometry block".into()));
    }
    if g.class == GeometryClass::Deformed && g.n_points != n {
        return Err(Error::DimensionMismatch { expected: g.n_points, found: n });
    }
    Ok((0..n).map(|l| (g.jac_at(el.index, l), g.dxi_dx_at(el.index, l).to_vec())).collect())
}

/// Mode values at every point, N_Q×N_P.
pub fn assemble_bwd(shape: ShapeType, order: usize, q: &[usize]) -> Result<DenseElementalMatrix> {
    let ps = point_set(shape, q)?;
    let idx = IndexSet::new(shape, order);
    let (nq, np) = (ps.eta.len(), idx.len());
    let mut entries = vec![0.0; nq * np];
    for l in 0..nq {
        for (m, &mode) in idx.modes.iter().enumerate() {
            entries[l * np + m] = eval_mode(shape, mode, &ps.eta[l][..ps.d]).0;
        }
    }
    Ok(DenseElementalMatrix { kind: OperatorKind::BwdTrans, rows: nq, cols: np, entries })
}

/// M[m][n] = Σ_l wJ_l φ_n φ_m
pub fn assemble_mass(el: &Element) -> Result<DenseElementalMatrix> {
    let b = assemble_bwd(el.shape, el.order, &el.q)?;
    let ps = point_set(el.shape, &el.q)?;
    let (nq, np) = (b.rows, b.cols);
    let met = metric_at(el, nq)?;
    let mut entries = vec![0.0; np * np];
    for m in 0..np {
        for n in 0..np {
            let mut s = 0.0;
            for l in 0..nq {
                s += ps.w[l] * met[l].0 * b.at(l, n) * b.at(l, m);
            }
            entries[m * np + n] = s;
        }
    }
    Ok(DenseElementalMatrix { kind: OperatorKind::Mass, rows: np, cols: np, entries })
}

// ∂φ_m/∂η_k at every point by collocation differentiation of the values,
// layout [k][l][m]
fn collocated_eta_grads(ps: &PointSet, b: &DenseElementalMatrix) -> Vec<f64> {
    let (nq, np, d) = (b.rows, b.cols, ps.d);
    let mut out = vec![0.0; d * nq * np];
    for k in 0..d {
        let dm = diff_matrix_on(&ps.z[k]);
        let inner: usize = ps.q[k + 1..].iter().product();
        let qk = ps.q[k];
        for l in 0..nq {
            let i = (l / inner) % qk;
            let base = l - i * inner;
            for m in 0..np {
                let s: f64 = (0..qk).map(|j| dm.at(i, j) * b.at(base + j * inner, m)).sum();
                out[(k * nq + l) * np + m] = s;
            }
        }
    }
    out
}

/// H[m][n] = Σ_l wJ_l [λ φ_n φ_m + ∇φ_n · ∇φ_m], physical gradients built
/// pointwise from collocated η-derivatives.
pub fn assemble_helmholtz(el: &Element, lambda: f64) -> Result<DenseElementalMatrix> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    let ps = point_set(el.shape, &el.q)?;
    let b = assemble_bwd(el.shape, el.order, &el.q)?;
    let (nq, np, d) = (b.rows, b.cols, ps.d);
    let met = metric_at(el, nq)?;
    let ge = collocated_eta_grads(&ps, &b);
    // physical gradients [l][m][a]
    let mut gx = vec![0.0; nq * np * d];
    for l in 0..nq {
        let g = partials(el.shape, &ps.eta[l]);
        let dxi = &met[l].1;
        for m in 0..np {
            let mut gxi = [0.0; 3];
            for (i, gi) in gxi.iter_mut().enumerate().take(d) {
                *gi = (0..d).map(|k| g[i][k] * ge[(k * nq + l) * np + m]).sum();
            }
            for a in 0..d {
                gx[(l * np + m) * d + a] = (0..d).map(|i| dxi[i * d + a] * gxi[i]).sum();
            }
        }
    }
    let mut entries = vec![0.0; np * np];
    for m in 0..np {
        for n in 0..np {
            let mut s = 0.0;
            for l in 0..nq {
                let dot: f64 = (0..d).map(|a| gx[(l * np + n) * d + a] * gx[(l * np + m) * d + a]).sum();
                s += ps.w[l] * met[l].0 * (lambda * b.at(l, n) * b.at(l, m) + dot);
            }
            entries[m * np + n] = s;
        }
    }
    Ok(DenseElementalMatrix { kind: OperatorKind::HelmholtzNonColl, rows: np, cols: np, entries })
}

/// The same operator as Bᵀ(λW)B + Σ_{k,k'} (D_k B)ᵀ diag(Λ_kk') (D_k' B)
/// with analytic η-derivatives of the modes and the metric folded into
/// Λ = G Xᵀ X Gᵀ wJ.
pub fn assemble_helmholtz_factored(el: &Element, lambda: f64) -> Result<DenseElementalMatrix> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    let ps = point_set(el.shape, &el.q)?;
    let idx = IndexSet::new(el.shape, el.order);
    let (nq, np, d) = (ps.eta.len(), idx.len(), ps.d);
    let met = metric_at(el, nq)?;
    let mut bv = vec![0.0; nq * np];
    let mut db = vec![vec![0.0; nq * np]; d];
    for l in 0..nq {
        for (m, &mode) in idx.modes.iter().enumerate() {
            let (v, g) = eval_mode(el.shape, mode, &ps.eta[l][..d]);
            bv[l * np + m] = v;
            for k in 0..d {
                db[k][l * np + m] = g[k];
            }
        }
    }
    let mut lam = vec![[[0.0; 3]; 3]; nq];
    for l in 0..nq {
        let g = partials(el.shape, &ps.eta[l]);
        let (jac, dxi) = (&met[l].0, &met[l].1);
        let wj = ps.w[l] * jac;
        for k in 0..d {
            for kk in 0..d {
                let mut s = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        let xx: f64 = (0..d).map(|a| dxi[i * d + a] * dxi[j * d + a]).sum();
                        s += g[i][k] * xx * g[j][kk];
                    }
                }
                lam[l][k][kk] = s * wj;
            }
        }
    }
    let mut entries = vec![0.0; np * np];
    // λ Bᵀ W B
    for l in 0..nq {
        let wj = ps.w[l] * met[l].0 * lambda;
        for m in 0..np {
            let bm = bv[l * np + m] * wj;
            for n in 0..np {
                entries[m * np + n] += bm * bv[l * np + n];
            }
        }
    }
    for k in 0..d {
        for kk in 0..d {
            for l in 0..nq {
                let c = lam[l][k][kk];
                for m in 0..np {
                    let a = db[k][l * np + m] * c;
                    for n in 0..np {
                        entries[m * np + n] += a * db[kk][l * np + n];
                    }
                }
            }
        }
    }
    Ok(DenseElementalMatrix { kind: OperatorKind::HelmholtzNonColl, rows: np, cols: np, entries })
}

pub fn apply_dense(a: &DenseElementalMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.cols {
        return Err(Error::DimensionMismatch { expected: a.cols, found: x.len() });
    }
    Ok((0..a.rows).map(|i| (0..a.cols).map(|j| a.entries[i * a.cols + j] * x[j]).sum()).collect())
}
