use super::duffy::{build_collapsed_metric, tensor_points, CollapsedMap};
use super::tree::FactorTree;
use super::{mode_factors, quad_point_count, IndexSet, ShapeType};
use crate::bases::{build_diff_matrix, compute_rule, Basis1D, DiffMatrix, QuadratureRule};
use crate::error::{Error, Result};

/// Everything about a standard element of given shape/order/quadrature
/// that operators and geometry need. Immutable once built.
#[derive(Debug, Clone)]
pub struct StdElement {
    pub shape: ShapeType,
    pub order: usize,
    pub dim: usize,
    pub q: Vec<usize>,
    pub rules: Vec<QuadratureRule>,
    pub bases: Vec<Basis1D>,
    pub index: IndexSet,
    pub n_modes: usize,
    pub n_points: usize,
    /// n_points × dim collapsed coordinates, η1 slowest
    pub eta: Vec<f64>,
    /// reference weights including the Duffy jacobian
    pub w_ref: Vec<f64>,
    pub diff: Vec<DiffMatrix>,
    pub cmap: CollapsedMap,
    pub tree: FactorTree,
    /// N_Q × N_P row-major
    pub b: Vec<f64>,
    /// N_P × N_Q
    pub bt: Vec<f64>,
    /// ∂/∂η_k of the basis stacked over k: (d·N_Q) × N_P, rows `[k][l]`
    pub db: Vec<f64>,
    /// N_P × (d·N_Q)
    pub dbt: Vec<f64>,
    pub metric_fault: bool,
}

pub fn build_shape_basis(shape: ShapeType, order: usize) -> Result<StdElement> {
    build_shape_basis_with_q(shape, order, &quad_point_count(shape, order))
}

pub fn build_shape_basis_with_q(shape: ShapeType, order: usize, q: &[usize]) -> Result<StdElement> {
    if order < 1 {
        return Err(Error::InvalidOrder(order));
    }
    let dim = shape.dim();
    if q.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: q.len() });
    }
    let rules: Vec<QuadratureRule> = shape
        .rule_kinds()
        .into_iter()
        .zip(q)
        .map(|(k, &n)| compute_rule(k, n))
        .collect::<Result<_>>()?;
    let bases: Vec<Basis1D> = shape
        .basis_kinds()
        .into_iter()
        .zip(&rules)
        .map(|(k, r)| Basis1D::new(k, order, r.clone()))
        .collect();
    let index = IndexSet::new(shape, order);
    let cmap = build_collapsed_metric(shape, &rules)?;
    let tree = FactorTree::new(&index, &rules);
    let diff = rules.iter().map(build_diff_matrix).collect();

    let pts = tensor_points(&rules);
    let n_points = pts.len();
    let n_modes = index.len();
    let eta: Vec<f64> = pts.iter().flatten().copied().collect();
    let scale = shape.weight_scale();
    let w_ref: Vec<f64> = tensor_points(&rules.iter().map(|r| QuadratureRule {
        kind: r.kind,
        points: r.weights.clone(),
        weights: vec![],
    }).collect::<Vec<_>>())
    .iter()
    .map(|w| scale * w.iter().product::<f64>())
    .collect();

    let mut b = vec![0.0; n_points * n_modes];
    let mut db = vec![0.0; dim * n_points * n_modes];
    for m in 0..n_modes {
        let fs = mode_factors(shape, index.modes[m]);
        for (l, e) in pts.iter().enumerate() {
            let vd: Vec<(f64, f64)> = fs.iter().zip(e).map(|(f, &z)| f.eval(z)).collect();
            b[l * n_modes + m] = vd.iter().map(|x| x.0).product();
            for k in 0..dim {
                db[(k * n_points + l) * n_modes + m] = (0..dim)
                    .map(|j| if j == k { vd[j].1 } else { vd[j].0 })
                    .product();
            }
        }
    }
    let bt = transpose(&b, n_points, n_modes);
    let dbt = transpose(&db, dim * n_points, n_modes);

    Ok(StdElement {
        shape,
        order,
        dim,
        q: q.to_vec(),
        rules,
        bases,
        index,
        n_modes,
        n_points,
        eta,
        w_ref,
        diff,
        cmap,
        tree,
        b,
        bt,
        db,
        dbt,
        metric_fault: false,
    })
}

pub(crate) fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; a.len()];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = a[i * cols + j];
        }
    }
    t
}

impl StdElement {
    /// ∂B/∂η_k, N_Q × N_P
    pub fn db_k(&self, k: usize) -> &[f64] {
        let n = self.n_points * self.n_modes;
        &self.db[k * n..(k + 1) * n]
    }

    pub fn eta_at(&self, l: usize) -> &[f64] {
        &self.eta[l * self.dim..(l + 1) * self.dim]
    }

    /// Value and η-gradient of mode m at an arbitrary η.
    pub fn eval_mode(&self, m: usize, eta: &[f64]) -> (f64, Vec<f64>) {
        eval_mode(self.shape, self.index.modes[m], eta)
    }

    /// Test hook: negate every off-diagonal chain-rule factor used by the
    /// operator kernels. Quad/Hex are unaffected since theirs are zero.
    pub fn inject_collapsed_metric_fault(&mut self) {
        let d = self.dim;
        for l in 0..self.n_points {
            for i in 0..d {
                for k in 0..d {
                    if i != k {
                        self.cmap.g[l * d * d + i * d + k] *= -1.0;
                    }
                }
            }
        }
        self.metric_fault = true;
    }
}

/// Value and η-gradient of mode (p,q,r) of `shape` at η.
pub fn eval_mode(shape: ShapeType, mode: [usize; 3], eta: &[f64]) -> (f64, Vec<f64>) {
    let fs = mode_factors(shape, mode);
    let vd: Vec<(f64, f64)> = fs.iter().zip(eta).map(|(f, &z)| f.eval(z)).collect();
    let d = fs.len();
    let v = vd.iter().map(|x| x.0).product();
    let g = (0..d)
        .map(|k| (0..d).map(|j| if j == k { vd[j].1 } else { vd[j].0 }).product())
        .collect();
    (v, g)
}
