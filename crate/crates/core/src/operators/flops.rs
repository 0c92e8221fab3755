//! Per-element floating-point operation counts.
//!
//! A multiply-add counts as two. Metric steps are counted from the loops
//! in `kernels`, with the reference-to-collapsed factors G included for
//! collapsed shapes only.

use super::{OperatorKind, StrategyId};
use crate::error::{Error, Result};
use crate::shapes::StdElement;

fn colloc(std: &StdElement) -> u64 {
    let nq = std.n_points as u64;
    std.q[..std.dim].iter().map(|&q| 2 * nq * q as u64).sum()
}

fn helm_metric(std: &StdElement) -> u64 {
    let (nq, d) = (std.n_points as u64, std.dim as u64);
    let g = if std.shape.is_collapsed() { 4 * d * d } else { 0 };
    nq * (2 * d * d + d + g)
}

fn deriv_metric(std: &StdElement) -> u64 {
    let (nq, d) = (std.n_points as u64, std.dim as u64);
    nq * (2 * d * d + d)
}

fn phys_metric(std: &StdElement) -> u64 {
    let (nq, d) = (std.n_points as u64, std.dim as u64);
    let g = if std.shape.is_collapsed() { 2 * d * d } else { 0 };
    nq * (2 * d * d + g)
}

/// Operation count of one operator on one element.
pub fn operator_flops(kind: OperatorKind, std: &StdElement, strategy: StrategyId) -> Result<u64> {
    let (np, nq, d) = (std.n_modes as u64, std.n_points as u64, std.dim as u64);
    // one application of B or Bᵀ (or a derivative variant)
    let sweep = match strategy {
        StrategyId::StdMat | StrategyId::StdMatGrouped => 2 * nq * np,
        StrategyId::SumFac => std.tree.sweep_flops(),
        StrategyId::SumFacTop => return Err(Error::UnsupportedStrategy(strategy.name().to_string())),
    };
    Ok(match kind {
        OperatorKind::BwdTrans => sweep,
        OperatorKind::IProductWRTBase => sweep + nq,
        OperatorKind::PhysDeriv => colloc(std) + phys_metric(std),
        OperatorKind::IProductWRTDerivBase => d * sweep + deriv_metric(std),
        OperatorKind::Mass => 2 * sweep + nq,
        OperatorKind::HelmholtzNonColl => 2 * (1 + d) * sweep + helm_metric(std) + 2 * nq,
        OperatorKind::HelmholtzColl => 2 * sweep + 2 * colloc(std) + helm_metric(std) + 3 * nq,
    })
}
