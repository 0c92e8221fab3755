//! Kernels shared by all strategies, acting on one lane-major group.
//!
//! Point arrays are `[point][lane]`; multi-component arrays are
//! `[comp][point][lane]`.

use crate::geometry::MetricLayout;
use crate::shapes::StdElement;

/// Per-group view of the metric terms.
pub(crate) struct GroupMetric<'a> {
    pub std: &'a StdElement,
    pub m: &'a MetricLayout,
    pub lam: &'a [f64],
    pub dxi: &'a [f64],
    pub wj: &'a [f64],
    pub w: usize,
}

impl<'a> GroupMetric<'a> {
    pub fn new(std: &'a StdElement, m: &'a MetricLayout, g: usize) -> Self {
        GroupMetric { std, m, lam: m.lam_group(g), dxi: m.dxi_group(g), wj: m.wj_group(g), w: m.width }
    }

    #[inline]
    fn weight(&self, l: usize, s: usize) -> f64 {
        if self.m.is_regular() {
            self.std.w_ref[l] * self.wj[s]
        } else {
            self.wj[l * self.w + s]
        }
    }
}

/// u ← wJ u
pub(crate) fn apply_wj(gm: &GroupMetric, u: &mut [f64]) {
    let w = gm.w;
    for l in 0..gm.std.n_points {
        for s in 0..w {
            u[l * w + s] *= gm.weight(l, s);
        }
    }
}

/// u' ← u' + λ wJ u
pub(crate) fn add_lambda_wj(gm: &GroupMetric, lambda: f64, u: &[f64], out: &mut [f64]) {
    let w = gm.w;
    for l in 0..gm.std.n_points {
        for s in 0..w {
            out[l * w + s] += lambda * gm.weight(l, s) * u[l * w + s];
        }
    }
}

#[inline]
fn g_at(std: &StdElement, l: usize) -> &[f64] {
    std.cmap.at(l)
}

/// Weak-Laplacian metric on η-gradients: v ← Gᵀ Λ G v with Λ = X Xᵀ wJ.
pub(crate) fn helm_metric(gm: &GroupMetric, v: &mut [f64]) {
    let std = gm.std;
    let (d, w, nq) = (std.dim, gm.w, std.n_points);
    let dd = d * d;
    let collapsed = std.shape.is_collapsed();
    let regular = gm.m.is_regular();
    let mut s = [0.0f64; 3];
    let mut t = [0.0f64; 3];
    for l in 0..nq {
        let g = g_at(std, l);
        let (lbase, scale) = if regular { (0, std.w_ref[l]) } else { (l * dd, 1.0) };
        for lane in 0..w {
            let idx = l * w + lane;
            for k in 0..d {
                s[k] = v[k * nq * w + idx];
            }
            if collapsed {
                let mut gs = [0.0f64; 3];
                for i in 0..d {
                    gs[i] = (0..d).map(|k| g[i * d + k] * s[k]).sum();
                }
                s = gs;
            }
            for i in 0..d {
                let mut acc = 0.0;
                for j in 0..d {
                    acc += gm.lam[(lbase + i * d + j) * w + lane] * s[j];
                }
                t[i] = scale * acc;
            }
            if collapsed {
                for k in 0..d {
                    v[k * nq * w + idx] = (0..d).map(|i| g[i * d + k] * t[i]).sum();
                }
            } else {
                for k in 0..d {
                    v[k * nq * w + idx] = t[k];
                }
            }
        }
    }
}

/// ξ-components to η-components for the derivative inner product:
/// v'_k = Σ_i G_ik wJ v_i.
pub(crate) fn deriv_base_metric(gm: &GroupMetric, v: &[f64], out: &mut [f64]) {
    let std = gm.std;
    let (d, w, nq) = (std.dim, gm.w, std.n_points);
    for l in 0..nq {
        let g = g_at(std, l);
        for lane in 0..w {
            let idx = l * w + lane;
            let wj = gm.weight(l, lane);
            for k in 0..d {
                out[k * nq * w + idx] = (0..d).map(|i| g[i * d + k] * v[i * nq * w + idx]).sum::<f64>() * wj;
            }
        }
    }
}

/// η-gradients to Cartesian gradients: ∂u/∂x_a = Σ_i X_ia Σ_k G_ik v_k.
pub(crate) fn phys_metric(gm: &GroupMetric, v: &[f64], out: &mut [f64]) {
    let std = gm.std;
    let (d, w, nq) = (std.dim, gm.w, std.n_points);
    let dd = d * d;
    let regular = gm.m.is_regular();
    for l in 0..nq {
        let g = g_at(std, l);
        let xb = if regular { 0 } else { l * dd };
        for lane in 0..w {
            let idx = l * w + lane;
            let mut s = [0.0f64; 3];
            for i in 0..d {
                s[i] = (0..d).map(|k| g[i * d + k] * v[k * nq * w + idx]).sum();
            }
            for a in 0..d {
                out[a * nq * w + idx] = (0..d).map(|i| gm.dxi[(xb + i * d + a) * w + lane] * s[i]).sum();
            }
        }
    }
}

// (outer, q_k, inner·w) split of the tensor point index for direction k
fn split(std: &StdElement, k: usize, w: usize) -> (usize, usize, usize) {
    let outer: usize = std.q[..k].iter().product();
    let inner: usize = std.q[k + 1..].iter().product();
    (outer, std.q[k], inner * w)
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// v_k = D_k u for every η direction (tensor collocation).
pub(crate) fn colloc_deriv(std: &StdElement, w: usize, u: &[f64], v: &mut [f64]) {
    let stride = std.n_points * w;
    for k in 0..std.dim {
        let (outer, q, iw) = split(std, k, w);
        let dm = &std.diff[k];
        let vk = &mut v[k * stride..(k + 1) * stride];
        vk.fill(0.0);
        for o in 0..outer {
            for a in 0..q {
                let dst = (o * q + a) * iw;
                for t in 0..q {
                    let src = (o * q + t) * iw;
                    let (x, y) = (&u[src..src + iw], &mut vk[dst..dst + iw]);
                    axpy(dm.at(a, t), x, y);
                }
            }
        }
    }
}

/// out (+)= Σ_k D_kᵀ v_k
pub(crate) fn colloc_deriv_t(std: &StdElement, w: usize, v: &[f64], out: &mut [f64], accumulate: bool) {
    let stride = std.n_points * w;
    if !accumulate {
        out.fill(0.0);
    }
    for k in 0..std.dim {
        let (outer, q, iw) = split(std, k, w);
        let dm = &std.diff[k];
        let vk = &v[k * stride..(k + 1) * stride];
        for o in 0..outer {
            for t in 0..q {
                let dst = (o * q + t) * iw;
                for a in 0..q {
                    let src = (o * q + a) * iw;
                    axpy(dm.at(a, t), &vk[src..src + iw], &mut out[dst..dst + iw]);
                }
            }
        }
    }
}

/// C (+)= A Bᵀ, A: e×k, B: n×k, C: e×n, all row-major.
/// Four rows of A share each pass over a row of B.
pub(crate) fn gemm_nt(a: &[f64], b: &[f64], c: &mut [f64], e: usize, k: usize, n: usize, accumulate: bool) {
    if !accumulate {
        c[..e * n].fill(0.0);
    }
    let mut r = 0;
    while r + 4 <= e {
        let (a0, a1, a2, a3) = (
            &a[r * k..(r + 1) * k],
            &a[(r + 1) * k..(r + 2) * k],
            &a[(r + 2) * k..(r + 3) * k],
            &a[(r + 3) * k..(r + 4) * k],
        );
        for j in 0..n {
            let bj = &b[j * k..(j + 1) * k];
            let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
            for t in 0..k {
                let x = bj[t];
                s0 += a0[t] * x;
                s1 += a1[t] * x;
                s2 += a2[t] * x;
                s3 += a3[t] * x;
            }
            c[r * n + j] += s0;
            c[(r + 1) * n + j] += s1;
            c[(r + 2) * n + j] += s2;
            c[(r + 3) * n + j] += s3;
        }
        r += 4;
    }
    for r in r..e {
        let ar = &a[r * k..(r + 1) * k];
        for j in 0..n {
            let bj = &b[j * k..(j + 1) * k];
            c[r * n + j] += ar.iter().zip(bj).map(|(x, y)| x * y).sum::<f64>();
        }
    }
}

/// Y (+)= M X with X, Y lane-major: X is k×W, Y is n×W, M is n×k.
pub(crate) fn gemm_lanes<const W: usize>(m: &[f64], x: &[f64], y: &mut [f64], n: usize, k: usize, accumulate: bool) {
    for i in 0..n {
        let mut acc = [0.0f64; W];
        let row = &m[i * k..(i + 1) * k];
        for (t, &c) in row.iter().enumerate() {
            let xt = &x[t * W..(t + 1) * W];
            for s in 0..W {
                acc[s] += c * xt[s];
            }
        }
        let yi = &mut y[i * W..(i + 1) * W];
        if accumulate {
            for s in 0..W {
                yi[s] += acc[s];
            }
        } else {
            yi.copy_from_slice(&acc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{build_shape_basis, ShapeType};

    #[test]
    fn gemm_nt_matches_loops() {
        let (e, k, n) = (7, 5, 3);
        let a: Vec<f64> = (0..e * k).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..n * k).map(|i| (i as f64 * 0.11).cos()).collect();
        let mut c = vec![1.0; e * n];
        gemm_nt(&a, &b, &mut c, e, k, n, true);
        for r in 0..e {
            for j in 0..n {
                let want: f64 = 1.0 + (0..k).map(|t| a[r * k + t] * b[j * k + t]).sum::<f64>();
                assert!((c[r * n + j] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn colloc_transpose_is_adjoint() {
        for s in ShapeType::ALL {
            let std = build_shape_basis(s, 3).unwrap();
            let (nq, d, w) = (std.n_points, std.dim, 2);
            let u: Vec<f64> = (0..nq * w).map(|i| (i as f64 * 0.7).sin()).collect();
            let v: Vec<f64> = (0..d * nq * w).map(|i| (i as f64 * 0.3).cos()).collect();
            let mut du = vec![0.0; d * nq * w];
            colloc_deriv(&std, w, &u, &mut du);
            let mut dtv = vec![0.0; nq * w];
            colloc_deriv_t(&std, w, &v, &mut dtv, false);
            let lhs: f64 = du.iter().zip(&v).map(|(a, b)| a * b).sum();
            let rhs: f64 = u.iter().zip(&dtv).map(|(a, b)| a * b).sum();
            assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
        }
    }
}
