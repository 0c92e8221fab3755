//! Sum-factorised kernels over the factor tree.
//!
//! The backward sweep contracts the leaf (last, warped) direction first,
//! where the triangular index bounds live, then widens to the full tensor
//! in the η1 direction. The inner-product sweep runs the same steps in
//! reverse.

use rayon::prelude::*;

use super::kernels::{add_lambda_wj, apply_wj, colloc_deriv, colloc_deriv_t, deriv_base_metric, helm_metric};
use super::stdmat::dispatch_width;
use super::{BlockOperands, BlockStrategy, HelmholtzForm, StrategyId};
use crate::shapes::FactorTree;

#[derive(Debug, Clone, Copy, Default)]
pub struct SumFac;

/// Value or derivative tables per tree level.
#[derive(Clone, Copy)]
struct Tabs<'a> {
    t1: &'a [f64],
    t2: &'a [f64],
    tl: &'a [f64],
}

fn values(t: &FactorTree) -> Tabs<'_> {
    Tabs { t1: &t.v1, t2: &t.v2, tl: &t.vl }
}

/// Tables for ∂/∂η_k.
fn deriv(t: &FactorTree, k: usize) -> Tabs<'_> {
    let mut s = values(t);
    match (t.dim, k) {
        (_, 0) => s.t1 = &t.d1,
        (2, 1) | (3, 2) => s.tl = &t.dl,
        (3, 1) => s.t2 = &t.d2,
        _ => unreachable!(),
    }
    s
}

struct Scratch {
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl Scratch {
    fn new<const W: usize>(t: &FactorTree) -> Self {
        let (q, n1, n2) = (&t.q, t.n1, t.n2);
        if t.dim == 2 {
            Scratch { s1: vec![0.0; n1 * q[1] * W], s2: vec![] }
        } else {
            Scratch { s1: vec![0.0; n1 * q[1] * q[2] * W], s2: vec![0.0; n2 * q[2] * W] }
        }
    }
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

// out[k][s] += Σ_leaf row_leaf[k] x_mode(leaf)[s] over a leaf range
#[inline]
fn leaves_bwd<const W: usize>(t: &FactorTree, tl: &[f64], ql: usize, range: std::ops::Range<usize>, x: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for leaf in range {
        let m = t.leaf_mode[leaf];
        let xm: [f64; W] = x[m * W..(m + 1) * W].try_into().unwrap();
        let row = &tl[leaf * ql..(leaf + 1) * ql];
        for (k, &c) in row.iter().enumerate() {
            let o = &mut out[k * W..(k + 1) * W];
            for s in 0..W {
                o[s] += c * xm[s];
            }
        }
    }
}

// out_mode(leaf)[s] (+)= Σ_k row_leaf[k] src[k][s] over a leaf range
#[inline]
fn leaves_ipr<const W: usize>(
    t: &FactorTree,
    tl: &[f64],
    ql: usize,
    range: std::ops::Range<usize>,
    src: &[f64],
    out: &mut [f64],
    accumulate: bool,
) {
    for leaf in range {
        let m = t.leaf_mode[leaf];
        let row = &tl[leaf * ql..(leaf + 1) * ql];
        let mut acc = [0.0f64; W];
        for (k, &c) in row.iter().enumerate() {
            let sk = &src[k * W..(k + 1) * W];
            for s in 0..W {
                acc[s] += c * sk[s];
            }
        }
        let o = &mut out[m * W..(m + 1) * W];
        if accumulate {
            for s in 0..W {
                o[s] += acc[s];
            }
        } else {
            o.copy_from_slice(&acc);
        }
    }
}

/// u = B̃ x for the chosen tables; x is N_P×W, u is N_Q×W.
fn sweep_bwd<const W: usize>(t: &FactorTree, tb: Tabs, x: &[f64], u: &mut [f64], sc: &mut Scratch) {
    let q = &t.q;
    let q1 = q[0];
    if t.dim == 2 {
        let q2 = q[1];
        let blk = q2 * W;
        for a in 0..t.n1 {
            leaves_bwd::<W>(t, tb.tl, q2, t.c1[a]..t.c1[a + 1], x, &mut sc.s1[a * blk..(a + 1) * blk]);
        }
        u.fill(0.0);
        for i in 0..q1 {
            let ui = &mut u[i * blk..(i + 1) * blk];
            for a in 0..t.n1 {
                axpy(tb.t1[a * q1 + i], &sc.s1[a * blk..(a + 1) * blk], ui);
            }
        }
    } else {
        let (q2, q3) = (q[1], q[2]);
        let b2 = q3 * W;
        let b1 = q2 * b2;
        for b in 0..t.n2 {
            leaves_bwd::<W>(t, tb.tl, q3, t.c2[b]..t.c2[b + 1], x, &mut sc.s2[b * b2..(b + 1) * b2]);
        }
        for a in 0..t.n1 {
            let t1 = &mut sc.s1[a * b1..(a + 1) * b1];
            t1.fill(0.0);
            for b in t.c1[a]..t.c1[a + 1] {
                let t2 = &sc.s2[b * b2..(b + 1) * b2];
                for j in 0..q2 {
                    axpy(tb.t2[b * q2 + j], t2, &mut t1[j * b2..(j + 1) * b2]);
                }
            }
        }
        u.fill(0.0);
        for i in 0..q1 {
            let ui = &mut u[i * b1..(i + 1) * b1];
            for a in 0..t.n1 {
                axpy(tb.t1[a * q1 + i], &sc.s1[a * b1..(a + 1) * b1], ui);
            }
        }
    }
}

/// out (+)= B̃ᵀ u for the chosen tables.
fn sweep_ipr<const W: usize>(t: &FactorTree, tb: Tabs, u: &[f64], out: &mut [f64], sc: &mut Scratch, accumulate: bool) {
    let q = &t.q;
    let q1 = q[0];
    if t.dim == 2 {
        let q2 = q[1];
        let blk = q2 * W;
        for a in 0..t.n1 {
            let t1 = &mut sc.s1[a * blk..(a + 1) * blk];
            t1.fill(0.0);
            for i in 0..q1 {
                axpy(tb.t1[a * q1 + i], &u[i * blk..(i + 1) * blk], t1);
            }
            leaves_ipr::<W>(t, tb.tl, q2, t.c1[a]..t.c1[a + 1], t1, out, accumulate);
        }
    } else {
        let (q2, q3) = (q[1], q[2]);
        let b2 = q3 * W;
        let b1 = q2 * b2;
        for a in 0..t.n1 {
            let t1 = &mut sc.s1[a * b1..(a + 1) * b1];
            t1.fill(0.0);
            for i in 0..q1 {
                axpy(tb.t1[a * q1 + i], &u[i * b1..(i + 1) * b1], t1);
            }
            for b in t.c1[a]..t.c1[a + 1] {
                let t2 = &mut sc.s2[b * b2..(b + 1) * b2];
                t2.fill(0.0);
                for j in 0..q2 {
                    axpy(tb.t2[b * q2 + j], &t1[j * b2..(j + 1) * b2], t2);
                }
                leaves_ipr::<W>(t, tb.tl, q3, t.c2[b]..t.c2[b + 1], t2, out, accumulate);
            }
        }
    }
}

fn sf_bwd<const W: usize>(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let t = &std.tree;
    let (np, nq) = (std.n_modes, std.n_points);
    out.par_chunks_mut(nq * W).zip(input.par_chunks(np * W)).for_each_init(
        || Scratch::new::<W>(t),
        |sc, (o, x)| sweep_bwd::<W>(t, values(t), x, o, sc),
    );
}

fn sf_ipr<const W: usize>(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let t = &std.tree;
    let (np, nq) = (std.n_modes, std.n_points);
    out.par_chunks_mut(np * W).zip(input.par_chunks(nq * W)).enumerate().for_each_init(
        || (Scratch::new::<W>(t), vec![0.0; nq * W]),
        |(sc, u), (g, (o, x))| {
            u.copy_from_slice(x);
            apply_wj(&ops.group_metric(g), u);
            sweep_ipr::<W>(t, values(t), u, o, sc, false);
        },
    );
}

fn sf_ipr_deriv<const W: usize>(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let t = &std.tree;
    let (np, nq, d) = (std.n_modes, std.n_points, std.dim);
    let (ng, comp) = (nq * W, ops.n_groups * nq * W);
    out.par_chunks_mut(np * W).enumerate().for_each_init(
        || (Scratch::new::<W>(t), vec![0.0; d * ng], vec![0.0; d * ng]),
        |(sc, buf, v), (g, o)| {
            for i in 0..d {
                buf[i * ng..(i + 1) * ng].copy_from_slice(&input[i * comp + g * ng..i * comp + (g + 1) * ng]);
            }
            deriv_base_metric(&ops.group_metric(g), buf, v);
            for k in 0..d {
                sweep_ipr::<W>(t, deriv(t, k), &v[k * ng..(k + 1) * ng], o, sc, k > 0);
            }
        },
    );
}

fn sf_mass<const W: usize>(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let t = &std.tree;
    let (np, nq) = (std.n_modes, std.n_points);
    out.par_chunks_mut(np * W).zip(input.par_chunks(np * W)).enumerate().for_each_init(
        || (Scratch::new::<W>(t), vec![0.0; nq * W]),
        |(sc, u), (g, (o, x))| {
            sweep_bwd::<W>(t, values(t), x, u, sc);
            apply_wj(&ops.group_metric(g), u);
            sweep_ipr::<W>(t, values(t), u, o, sc, false);
        },
    );
}

fn sf_helm<const W: usize>(ops: &BlockOperands, lambda: f64, form: HelmholtzForm, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let t = &std.tree;
    let (np, nq, d) = (std.n_modes, std.n_points, std.dim);
    let ng = nq * W;
    out.par_chunks_mut(np * W).zip(input.par_chunks(np * W)).enumerate().for_each_init(
        || (Scratch::new::<W>(t), vec![0.0; ng], vec![0.0; d * ng], vec![0.0; ng]),
        |(sc, u, v, up), (g, (o, x))| {
            let gm = ops.group_metric(g);
            sweep_bwd::<W>(t, values(t), x, u, sc);
            match form {
                HelmholtzForm::NonColl => {
                    for k in 0..d {
                        sweep_bwd::<W>(t, deriv(t, k), x, &mut v[k * ng..(k + 1) * ng], sc);
                    }
                    helm_metric(&gm, v);
                    apply_wj(&gm, u);
                    u.iter_mut().for_each(|z| *z *= lambda);
                    sweep_ipr::<W>(t, values(t), u, o, sc, false);
                    for k in 0..d {
                        sweep_ipr::<W>(t, deriv(t, k), &v[k * ng..(k + 1) * ng], o, sc, true);
                    }
                }
                HelmholtzForm::Coll => {
                    colloc_deriv(std, W, u, v);
                    helm_metric(&gm, v);
                    colloc_deriv_t(std, W, v, up, false);
                    add_lambda_wj(&gm, lambda, u, up);
                    sweep_ipr::<W>(t, values(t), up, o, sc, false);
                }
            }
        },
    );
}

impl BlockStrategy for SumFac {
    fn id(&self) -> StrategyId {
        StrategyId::SumFac
    }

    fn bwd_trans(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, sf_bwd(ops, input, out))
    }

    fn iproduct_wrt_base(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, sf_ipr(ops, input, out))
    }

    fn iproduct_wrt_deriv_base(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, sf_ipr_deriv(ops, input, out))
    }

    fn mass(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, sf_mass(ops, input, out))
    }

    fn helmholtz(&self, ops: &BlockOperands, lambda: f64, form: HelmholtzForm, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, sf_helm(ops, lambda, form, input, out))
    }
}
