//! Dense reference-element matrix strategies.

use rayon::prelude::*;

use super::kernels::{
    add_lambda_wj, apply_wj, colloc_deriv, colloc_deriv_t, deriv_base_metric, gemm_lanes, gemm_nt, helm_metric,
};
use super::{BlockOperands, BlockStrategy, HelmholtzForm, StrategyId};

/// Elements per GEMM call.
const CHUNK: usize = 256;

/// Ungrouped dense matrices: element-major data, one GEMM per chunk of
/// elements. Always runs at interleave width 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct StdMat;

/// Dense matrices applied to lane-major groups of W elements.
#[derive(Debug, Clone, Copy, Default)]
pub struct StdMatGrouped;

impl BlockStrategy for StdMat {
    fn id(&self) -> StrategyId {
        StrategyId::StdMat
    }

    fn working_width(&self, _width: usize) -> usize {
        1
    }

    fn bwd_trans(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        let std = ops.std;
        let (np, nq) = (std.n_modes, std.n_points);
        out.par_chunks_mut(CHUNK * nq).zip(input.par_chunks(CHUNK * np)).for_each(|(o, i)| {
            gemm_nt(i, &std.b, o, i.len() / np, np, nq, false);
        });
    }

    fn iproduct_wrt_base(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        let std = ops.std;
        let (np, nq) = (std.n_modes, std.n_points);
        out.par_chunks_mut(CHUNK * np).enumerate().for_each(|(c, o)| {
            let ne = o.len() / np;
            let e0 = c * CHUNK;
            let mut t = input[e0 * nq..(e0 + ne) * nq].to_vec();
            for e in 0..ne {
                apply_wj(&ops.group_metric(e0 + e), &mut t[e * nq..(e + 1) * nq]);
            }
            gemm_nt(&t, &std.bt, o, ne, nq, np, false);
        });
    }

    fn iproduct_wrt_deriv_base(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        let std = ops.std;
        let (np, nq, d) = (std.n_modes, std.n_points, std.dim);
        let comp = ops.n_groups * nq;
        out.par_chunks_mut(CHUNK * np).enumerate().for_each(|(c, o)| {
            let ne = o.len() / np;
            let e0 = c * CHUNK;
            let mut buf = vec![0.0; d * nq];
            let mut v = vec![0.0; ne * d * nq];
            for e in 0..ne {
                for i in 0..d {
                    let s = i * comp + (e0 + e) * nq;
                    buf[i * nq..(i + 1) * nq].copy_from_slice(&input[s..s + nq]);
                }
                deriv_base_metric(&ops.group_metric(e0 + e), &buf, &mut v[e * d * nq..(e + 1) * d * nq]);
            }
            gemm_nt(&v, &std.dbt, o, ne, d * nq, np, false);
        });
    }

    fn mass(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        let std = ops.std;
        let (np, nq) = (std.n_modes, std.n_points);
        out.par_chunks_mut(CHUNK * np).zip(input.par_chunks(CHUNK * np)).enumerate().for_each(|(c, (o, i))| {
            let ne = o.len() / np;
            let e0 = c * CHUNK;
            let mut u = vec![0.0; ne * nq];
            gemm_nt(i, &std.b, &mut u, ne, np, nq, false);
            for e in 0..ne {
                apply_wj(&ops.group_metric(e0 + e), &mut u[e * nq..(e + 1) * nq]);
            }
            gemm_nt(&u, &std.bt, o, ne, nq, np, false);
        });
    }

    fn helmholtz(&self, ops: &BlockOperands, lambda: f64, form: HelmholtzForm, input: &[f64], out: &mut [f64]) {
        let std = ops.std;
        let (np, nq, d) = (std.n_modes, std.n_points, std.dim);
        out.par_chunks_mut(CHUNK * np).zip(input.par_chunks(CHUNK * np)).enumerate().for_each(|(c, (o, i))| {
            let ne = o.len() / np;
            let e0 = c * CHUNK;
            let mut u = vec![0.0; ne * nq];
            gemm_nt(i, &std.b, &mut u, ne, np, nq, false);
            match form {
                HelmholtzForm::NonColl => {
                    let mut v = vec![0.0; ne * d * nq];
                    gemm_nt(i, &std.db, &mut v, ne, np, d * nq, false);
                    for e in 0..ne {
                        let gm = ops.group_metric(e0 + e);
                        helm_metric(&gm, &mut v[e * d * nq..(e + 1) * d * nq]);
                        let ue = &mut u[e * nq..(e + 1) * nq];
                        apply_wj(&gm, ue);
                        ue.iter_mut().for_each(|x| *x *= lambda);
                    }
                    gemm_nt(&v, &std.dbt, o, ne, d * nq, np, false);
                    gemm_nt(&u, &std.bt, o, ne, nq, np, true);
                }
                HelmholtzForm::Coll => {
                    let mut v = vec![0.0; d * nq];
                    let mut up = vec![0.0; ne * nq];
                    for e in 0..ne {
                        let gm = ops.group_metric(e0 + e);
                        let ue = &u[e * nq..(e + 1) * nq];
                        let upe = &mut up[e * nq..(e + 1) * nq];
                        colloc_deriv(std, 1, ue, &mut v);
                        helm_metric(&gm, &mut v);
                        colloc_deriv_t(std, 1, &v, upe, false);
                        add_lambda_wj(&gm, lambda, ue, upe);
                    }
                    gemm_nt(&up, &std.bt, o, ne, nq, np, false);
                }
            }
        });
    }
}

macro_rules! dispatch_width {
    ($w:expr, $f:ident ( $($arg:expr),* )) => {
        match $w {
            1 => $f::<1>($($arg),*),
            2 => $f::<2>($($arg),*),
            4 => $f::<4>($($arg),*),
            8 => $f::<8>($($arg),*),
            16 => $f::<16>($($arg),*),
            w => panic!("unsupported interleave width {w}"),
        }
    };
}
pub(crate) use dispatch_width;

fn g_bwd<const W: usize>(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let (np, nq) = (std.n_modes, std.n_points);
    out.par_chunks_mut(nq * W).zip(input.par_chunks(np * W)).for_each(|(o, x)| {
        gemm_lanes::<W>(&std.b, x, o, nq, np, false);
    });
}

fn g_ipr<const W: usize>(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let (np, nq) = (std.n_modes, std.n_points);
    out.par_chunks_mut(np * W).zip(input.par_chunks(nq * W)).enumerate().for_each(|(g, (o, x))| {
        let mut t = x.to_vec();
        apply_wj(&ops.group_metric(g), &mut t);
        gemm_lanes::<W>(&std.bt, &t, o, np, nq, false);
    });
}

fn g_ipr_deriv<const W: usize>(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let (np, nq, d) = (std.n_modes, std.n_points, std.dim);
    let (ng, comp) = (nq * W, ops.n_groups * nq * W);
    out.par_chunks_mut(np * W).enumerate().for_each(|(g, o)| {
        let mut buf = vec![0.0; d * ng];
        for i in 0..d {
            buf[i * ng..(i + 1) * ng].copy_from_slice(&input[i * comp + g * ng..i * comp + (g + 1) * ng]);
        }
        let mut v = vec![0.0; d * ng];
        deriv_base_metric(&ops.group_metric(g), &buf, &mut v);
        gemm_lanes::<W>(&std.dbt, &v, o, np, d * nq, false);
    });
}

fn g_mass<const W: usize>(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let (np, nq) = (std.n_modes, std.n_points);
    out.par_chunks_mut(np * W).zip(input.par_chunks(np * W)).enumerate().for_each_init(
        || vec![0.0; nq * W],
        |u, (g, (o, x))| {
            gemm_lanes::<W>(&std.b, x, u, nq, np, false);
            apply_wj(&ops.group_metric(g), u);
            gemm_lanes::<W>(&std.bt, u, o, np, nq, false);
        },
    );
}

fn g_helm<const W: usize>(ops: &BlockOperands, lambda: f64, form: HelmholtzForm, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let (np, nq, d) = (std.n_modes, std.n_points, std.dim);
    out.par_chunks_mut(np * W).zip(input.par_chunks(np * W)).enumerate().for_each_init(
        || (vec![0.0; nq * W], vec![0.0; d * nq * W], vec![0.0; nq * W]),
        |(u, v, up), (g, (o, x))| {
            let gm = ops.group_metric(g);
            gemm_lanes::<W>(&std.b, x, u, nq, np, false);
            match form {
                HelmholtzForm::NonColl => {
                    gemm_lanes::<W>(&std.db, x, v, d * nq, np, false);
                    helm_metric(&gm, v);
                    apply_wj(&gm, u);
                    u.iter_mut().for_each(|t| *t *= lambda);
                    gemm_lanes::<W>(&std.dbt, v, o, np, d * nq, false);
                    gemm_lanes::<W>(&std.bt, u, o, np, nq, true);
                }
                HelmholtzForm::Coll => {
                    colloc_deriv(std, W, u, v);
                    helm_metric(&gm, v);
                    colloc_deriv_t(std, W, v, up, false);
                    add_lambda_wj(&gm, lambda, u, up);
                    gemm_lanes::<W>(&std.bt, up, o, np, nq, false);
                }
            }
        },
    );
}

impl BlockStrategy for StdMatGrouped {
    fn id(&self) -> StrategyId {
        StrategyId::StdMatGrouped
    }

    fn bwd_trans(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, g_bwd(ops, input, out))
    }

    fn iproduct_wrt_base(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, g_ipr(ops, input, out))
    }

    fn iproduct_wrt_deriv_base(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, g_ipr_deriv(ops, input, out))
    }

    fn mass(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, g_mass(ops, input, out))
    }

    fn helmholtz(&self, ops: &BlockOperands, lambda: f64, form: HelmholtzForm, input: &[f64], out: &mut [f64]) {
        dispatch_width!(ops.width, g_helm(ops, lambda, form, input, out))
    }
}
