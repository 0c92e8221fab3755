//! Elemental operators under interchangeable strategies.
//!
//! Strategies implement [`BlockStrategy`] on raw block storage and are
//! looked up by name in a [`StrategyRegistry`]. The free functions
//! ([`bwd_trans`], [`helmholtz_apply_coll`], ...) check states and layouts
//! and return new blocks.

mod flops;
pub(crate) mod kernels;
mod stdmat;
mod sumfac;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use flops::operator_flops;
pub use stdmat::{StdMat, StdMatGrouped};
pub use sumfac::SumFac;

use crate::error::{Error, Result};
use crate::field_block::{Block, Field, FieldState, MemorySpace};
use crate::geometry::MetricLayout;
use crate::shapes::StdElement;
use kernels::GroupMetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyId {
    StdMat,
    StdMatGrouped,
    SumFac,
    /// Reserved; selecting it is an error.
    SumFacTop,
}

impl StrategyId {
    pub const IMPLEMENTED: [StrategyId; 3] = [StrategyId::StdMat, StrategyId::StdMatGrouped, StrategyId::SumFac];

    pub fn name(self) -> &'static str {
        match self {
            StrategyId::StdMat => "stdmat",
            StrategyId::StdMatGrouped => "stdmat-grouped",
            StrategyId::SumFac => "sumfac",
            StrategyId::SumFacTop => "sumfactop",
        }
    }

    /// Helmholtz formulation used when none is requested.
    pub fn default_form(self) -> HelmholtzForm {
        match self {
            StrategyId::SumFac | StrategyId::SumFacTop => HelmholtzForm::Coll,
            _ => HelmholtzForm::NonColl,
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "stdmat" => Ok(StrategyId::StdMat),
            "stdmat-grouped" | "stdmatgrouped" => Ok(StrategyId::StdMatGrouped),
            "sumfac" => Ok(StrategyId::SumFac),
            "sumfactop" | "sumfac-top" => Ok(StrategyId::SumFacTop),
            o => Err(Error::UnsupportedStrategy(o.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    BwdTrans,
    IProductWRTBase,
    PhysDeriv,
    IProductWRTDerivBase,
    Mass,
    HelmholtzNonColl,
    HelmholtzColl,
}

impl OperatorKind {
    /// (input state, output state)
    pub fn states(self) -> (FieldState, FieldState) {
        use FieldState::*;
        match self {
            OperatorKind::BwdTrans => (Coeff, Phys),
            OperatorKind::IProductWRTBase => (Phys, Coeff),
            OperatorKind::PhysDeriv => (Phys, Phys),
            OperatorKind::IProductWRTDerivBase => (Phys, Coeff),
            _ => (Coeff, Coeff),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HelmholtzForm {
    Coll,
    NonColl,
}

impl HelmholtzForm {
    pub fn name(self) -> &'static str {
        match self {
            HelmholtzForm::Coll => "coll",
            HelmholtzForm::NonColl => "noncoll",
        }
    }
}

impl fmt::Display for HelmholtzForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HelmholtzForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coll" | "collocated" => Ok(HelmholtzForm::Coll),
            "noncoll" | "non-collocated" => Ok(HelmholtzForm::NonColl),
            o => Err(Error::InvalidParameter(format!("unknown Helmholtz form '{o}'"))),
        }
    }
}

/// Read-only operands of a block: standard element, metric layout and
/// group geometry. Data arrays are `[comp][group][point][lane]`.
#[derive(Clone, Copy)]
pub struct BlockOperands<'a> {
    pub std: &'a StdElement,
    pub metric: &'a MetricLayout,
    pub n_groups: usize,
    pub width: usize,
}

impl<'a> BlockOperands<'a> {
    pub fn new(std: &'a StdElement, metric: &'a MetricLayout) -> Self {
        BlockOperands { std, metric, n_groups: metric.n_groups, width: metric.width }
    }

    pub fn coeff_len(&self) -> usize {
        self.n_groups * self.std.n_modes * self.width
    }

    pub fn phys_len(&self) -> usize {
        self.n_groups * self.std.n_points * self.width
    }

    pub(crate) fn group_metric(&self, g: usize) -> GroupMetric<'a> {
        GroupMetric::new(self.std, self.metric, g)
    }
}

/// One implementation strategy for the elemental operators.
pub trait BlockStrategy: Send + Sync {
    fn id(&self) -> StrategyId;

    fn name(&self) -> &'static str {
        self.id().name()
    }

    /// Interleave width the kernels need for a block stored at `width`.
    fn working_width(&self, width: usize) -> usize {
        width
    }

    /// u = B û
    fn bwd_trans(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]);

    /// f̂ = Bᵀ W u
    fn iproduct_wrt_base(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]);

    /// f̂ = Σ_i (D_ξi B)ᵀ W v_i, input holds d components
    fn iproduct_wrt_deriv_base(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]);

    /// M û = Bᵀ W B û
    fn mass(&self, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
        let mut u = vec![0.0; ops.phys_len()];
        self.bwd_trans(ops, input, &mut u);
        self.iproduct_wrt_base(ops, &u, out);
    }

    /// H û = (L + λ M) û
    fn helmholtz(&self, ops: &BlockOperands, lambda: f64, form: HelmholtzForm, input: &[f64], out: &mut [f64]);
}

/// Cartesian gradient of point values; d output components.
pub fn phys_deriv_kernel(ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    let std = ops.std;
    let (d, w) = (std.dim, ops.width);
    let ng = std.n_points * w;
    let per_group: Vec<Vec<f64>> = (0..ops.n_groups)
        .into_par_iter()
        .map(|g| {
            let mut v = vec![0.0; d * ng];
            kernels::colloc_deriv(std, w, &input[g * ng..(g + 1) * ng], &mut v);
            let mut o = vec![0.0; d * ng];
            kernels::phys_metric(&ops.group_metric(g), &v, &mut o);
            o
        })
        .collect();
    let comp = ops.n_groups * ng;
    for (g, o) in per_group.iter().enumerate() {
        for a in 0..d {
            out[a * comp + g * ng..a * comp + (g + 1) * ng].copy_from_slice(&o[a * ng..(a + 1) * ng]);
        }
    }
}

/// Name → strategy lookup.
pub struct StrategyRegistry {
    entries: Vec<Box<dyn BlockStrategy>>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        StrategyRegistry { entries: vec![Box::new(StdMat), Box::new(StdMatGrouped), Box::new(SumFac)] }
    }
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, s: Box<dyn BlockStrategy>) {
        self.entries.retain(|e| e.id() != s.id());
        self.entries.push(s);
    }

    pub fn get(&self, id: StrategyId) -> Result<&dyn BlockStrategy> {
        self.entries
            .iter()
            .find(|e| e.id() == id)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnsupportedStrategy(id.name().to_string()))
    }

    pub fn by_name(&self, name: &str) -> Result<&dyn BlockStrategy> {
        self.get(name.parse()?)
    }

    pub fn all(&self) -> impl Iterator<Item = &dyn BlockStrategy> {
        self.entries.iter().map(|b| b.as_ref())
    }
}

fn check_state(block: &Block, want: FieldState) -> Result<()> {
    if block.state != want {
        return Err(Error::StateMismatch { expected: want.name(), found: block.state.name() });
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    Ok(())
}

// Run `kernel` on the block, converting to the strategy's working width
// when needed. The output keeps the input's width.
fn run_block(
    input: &mut Block,
    strategy: Option<&dyn BlockStrategy>,
    out_state: FieldState,
    out_comp: usize,
    kernel: impl FnOnce(&BlockOperands, &[f64], &mut [f64]),
) -> Result<Block> {
    let orig = input.width;
    let ww = strategy.map_or(orig, |s| s.working_width(orig));
    let mut tmp;
    let work: &mut Block = if ww != orig {
        tmp = input.clone();
        tmp.set_interleave_width(ww)?;
        &mut tmp
    } else {
        input
    };
    let mut out = work.sibling(out_state, out_comp);
    {
        let ops = BlockOperands::new(&work.std, &work.metric);
        let src = work.data.read(MemorySpace::Host)?;
        let dst = out.data.write_only(MemorySpace::Host);
        kernel(&ops, src, dst);
    }
    if ww != orig {
        out.set_interleave_width(orig)?;
    }
    Ok(out)
}

pub fn bwd_trans(input: &mut Block, s: &dyn BlockStrategy) -> Result<Block> {
    check_state(input, FieldState::Coeff)?;
    run_block(input, Some(s), FieldState::Phys, 1, |o, i, r| s.bwd_trans(o, i, r))
}

pub fn iproduct_wrt_base(input: &mut Block, s: &dyn BlockStrategy) -> Result<Block> {
    check_state(input, FieldState::Phys)?;
    run_block(input, Some(s), FieldState::Coeff, 1, |o, i, r| s.iproduct_wrt_base(o, i, r))
}

pub fn phys_deriv(input: &mut Block) -> Result<Block> {
    check_state(input, FieldState::Phys)?;
    let d = input.std.dim;
    run_block(input, None, FieldState::Phys, d, phys_deriv_kernel)
}

pub fn iproduct_wrt_deriv_base(input: &mut Block, s: &dyn BlockStrategy) -> Result<Block> {
    check_state(input, FieldState::Phys)?;
    let d = input.std.dim;
    if input.n_components != d {
        return Err(Error::ComponentMismatch { expected: d, found: input.n_components });
    }
    run_block(input, Some(s), FieldState::Coeff, 1, |o, i, r| s.iproduct_wrt_deriv_base(o, i, r))
}

pub fn mass_apply(input: &mut Block, s: &dyn BlockStrategy) -> Result<Block> {
    check_state(input, FieldState::Coeff)?;
    run_block(input, Some(s), FieldState::Coeff, 1, |o, i, r| s.mass(o, i, r))
}

pub fn helmholtz_apply(input: &mut Block, lambda: f64, form: HelmholtzForm, s: &dyn BlockStrategy) -> Result<Block> {
    check_state(input, FieldState::Coeff)?;
    check_lambda(lambda)?;
    run_block(input, Some(s), FieldState::Coeff, 1, |o, i, r| s.helmholtz(o, lambda, form, i, r))
}

pub fn helmholtz_apply_noncoll(input: &mut Block, lambda: f64, s: &dyn BlockStrategy) -> Result<Block> {
    helmholtz_apply(input, lambda, HelmholtzForm::NonColl, s)
}

pub fn helmholtz_apply_coll(input: &mut Block, lambda: f64, s: &dyn BlockStrategy) -> Result<Block> {
    helmholtz_apply(input, lambda, HelmholtzForm::Coll, s)
}

/// Apply `kind` to one block.
pub fn apply(kind: OperatorKind, input: &mut Block, s: &dyn BlockStrategy, lambda: f64) -> Result<Block> {
    match kind {
        OperatorKind::BwdTrans => bwd_trans(input, s),
        OperatorKind::IProductWRTBase => iproduct_wrt_base(input, s),
        OperatorKind::PhysDeriv => phys_deriv(input),
        OperatorKind::IProductWRTDerivBase => iproduct_wrt_deriv_base(input, s),
        OperatorKind::Mass => mass_apply(input, s),
        OperatorKind::HelmholtzNonColl => helmholtz_apply_noncoll(input, lambda, s),
        OperatorKind::HelmholtzColl => helmholtz_apply_coll(input, lambda, s),
    }
}

/// Apply `kind` block by block. Blocks are independent.
pub fn apply_field(kind: OperatorKind, field: &mut Field, s: &dyn BlockStrategy, lambda: f64) -> Result<Field> {
    let (want, out_state) = kind.states();
    if field.state != want {
        return Err(Error::StateMismatch { expected: want.name(), found: field.state.name() });
    }
    let blocks = field
        .blocks
        .par_iter_mut()
        .map(|b| apply(kind, b, s, lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(Field { blocks, state: out_state })
}

#[cfg(test)]
mod tests;
