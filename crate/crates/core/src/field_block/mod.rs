//! Field/Block data model.

mod dump;
mod layout;
mod memory;

use std::fmt;
use std::sync::Arc;

pub use dump::{read_field_dump, write_field_dump, DumpBlock};
pub use layout::{check_width, deinterleave, detect_simd_width, interleave, padded_elements, SUPPORTED_WIDTHS};
pub use memory::{Access, AccessQualifier, MemoryRegion, MemorySpace};

use crate::error::{Error, Result};
use crate::geometry::{build_geometry, GeometricFactors, GeometryClass, MetricLayout, DEFAULT_DEFORM_AMP};
use crate::shapes::{build_shape_basis_with_q, quad_point_count, ShapeType, StdElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldState {
    Coeff,
    Phys,
}

impl FieldState {
    pub fn name(self) -> &'static str {
        match self {
            FieldState::Coeff => "Coeff",
            FieldState::Phys => "Phys",
        }
    }
}

impl fmt::Display for FieldState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Homogeneous group of elements stored as `[comp][group][point][lane]`.
#[derive(Debug, Clone)]
pub struct Block {
    pub std: Arc<StdElement>,
    pub geom: Arc<GeometricFactors>,
    pub metric: Arc<MetricLayout>,
    pub n_elements: usize,
    pub n_components: usize,
    pub width: usize,
    pub state: FieldState,
    pub data: MemoryRegion,
}

impl Block {
    /// Zero-initialised block (WriteOnly host access).
    pub fn new(
        std: Arc<StdElement>,
        geom: Arc<GeometricFactors>,
        width: usize,
        state: FieldState,
        n_components: usize,
    ) -> Result<Self> {
        check_width(width)?;
        let metric = Arc::new(MetricLayout::new(&geom, width));
        Self::with_metric(std, geom, metric, state, n_components)
    }

    fn with_metric(
        std: Arc<StdElement>,
        geom: Arc<GeometricFactors>,
        metric: Arc<MetricLayout>,
        state: FieldState,
        n_components: usize,
    ) -> Result<Self> {
        if n_components == 0 {
            return Err(Error::InvalidParameter("block needs at least one component".into()));
        }
        let n_elements = geom.n_elements;
        let width = metric.width;
        let ppe = match state {
            FieldState::Coeff => std.n_modes,
            FieldState::Phys => std.n_points,
        };
        let mut data = MemoryRegion::new(n_components * padded_elements(n_elements, width) * ppe);
        data.write_only(MemorySpace::Host);
        Ok(Block { std, geom, metric, n_elements, n_components, width, state, data })
    }

    /// Block over the same elements with a different state/component count.
    pub fn sibling(&self, state: FieldState, n_components: usize) -> Block {
        Self::with_metric(self.std.clone(), self.geom.clone(), self.metric.clone(), state, n_components)
            .expect("valid sibling")
    }

    pub fn shape(&self) -> ShapeType {
        self.std.shape
    }

    pub fn order(&self) -> usize {
        self.std.order
    }

    pub fn points_per_element(&self) -> usize {
        match self.state {
            FieldState::Coeff => self.std.n_modes,
            FieldState::Phys => self.std.n_points,
        }
    }

    pub fn n_groups(&self) -> usize {
        self.n_elements.div_ceil(self.width)
    }

    pub fn padded_elements(&self) -> usize {
        padded_elements(self.n_elements, self.width)
    }

    /// Overwrite from `[comp][elem][point]` order.
    pub fn set_canonical(&mut self, values: &[f64]) -> Result<()> {
        let ppe = self.points_per_element();
        let want = self.n_components * self.n_elements * ppe;
        if values.len() != want {
            return Err(Error::DimensionMismatch { expected: want, found: values.len() });
        }
        let il = interleave(values, self.n_elements, ppe, self.n_components, self.width);
        self.data.write_only(MemorySpace::Host).copy_from_slice(&il);
        Ok(())
    }

    /// Host contents in `[comp][elem][point]` order, padding dropped.
    pub fn canonical(&mut self) -> Result<Vec<f64>> {
        let ppe = self.points_per_element();
        let (ne, nc, w) = (self.n_elements, self.n_components, self.width);
        let d = self.data.read(MemorySpace::Host)?;
        Ok(deinterleave(d, ne, ppe, nc, w))
    }

    /// Re-layout the data and metric for a new group width.
    pub fn set_interleave_width(&mut self, width: usize) -> Result<()> {
        check_width(width)?;
        if width == self.width {
            return Ok(());
        }
        let canon = self.canonical()?;
        self.width = width;
        self.metric = Arc::new(MetricLayout::new(&self.geom, width));
        let ppe = self.points_per_element();
        self.data = MemoryRegion::new(self.n_components * self.padded_elements() * ppe);
        self.set_canonical(&canon)
    }
}

/// Collection of blocks sharing one state.
#[derive(Debug, Clone)]
pub struct Field {
    pub blocks: Vec<Block>,
    pub state: FieldState,
}

impl Field {
    pub fn n_elements(&self) -> usize {
        self.blocks.iter().map(|b| b.n_elements).sum()
    }

    /// Empty field over the same blocks in a different state.
    pub fn sibling(&self, state: FieldState, n_components: usize) -> Field {
        Field { blocks: self.blocks.iter().map(|b| b.sibling(state, n_components)).collect(), state }
    }
}

/// Parameters of one block of a synthetic field.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub shape: ShapeType,
    pub order: usize,
    pub class: GeometryClass,
    pub n_elements: usize,
    /// None selects the detected SIMD width
    pub width: Option<usize>,
    pub q: Option<Vec<usize>>,
    pub seed: u64,
    pub deform_amp: f64,
}

impl BlockSpec {
    pub fn new(shape: ShapeType, order: usize, class: GeometryClass, n_elements: usize) -> Self {
        BlockSpec {
            shape,
            order,
            class,
            n_elements,
            width: None,
            q: None,
            seed: 0,
            deform_amp: DEFAULT_DEFORM_AMP,
        }
    }

    pub fn width(mut self, w: usize) -> Self {
        self.width = Some(w);
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    pub fn qpoints(mut self, q: Vec<usize>) -> Self {
        self.q = Some(q);
        self
    }

    pub fn deform_amp(mut self, a: f64) -> Self {
        self.deform_amp = a;
        self
    }
}

/// Build a block (standard element, geometry, zeroed storage).
pub fn make_block(spec: &BlockSpec, state: FieldState, n_components: usize) -> Result<Block> {
    if spec.n_elements == 0 {
        return Err(Error::InvalidParameter("block needs at least one element".into()));
    }
    let q = spec.q.clone().unwrap_or_else(|| quad_point_count(spec.shape, spec.order));
    let std = Arc::new(build_shape_basis_with_q(spec.shape, spec.order, &q)?);
    let geom = Arc::new(build_geometry(&std, spec.class, spec.n_elements, spec.seed, spec.deform_amp)?);
    let width = spec.width.unwrap_or_else(detect_simd_width);
    Block::new(std, geom, width, state, n_components)
}

pub fn make_field(specs: &[BlockSpec], state: FieldState) -> Result<Field> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("field needs at least one block".into()));
    }
    let blocks = specs.iter().map(|s| make_block(s, state, 1)).collect::<Result<_>>()?;
    Ok(Field { blocks, state })
}
