//! Matrix-free spectral/hp element operators on mixed-element meshes.
//!
//! The crate is organised bottom-up:
//!
//! * [`bases`]: 1D quadrature rules, modified hierarchical and Lagrange bases,
//!   collocation differentiation.
//! * [`shapes`]: element shapes, mode index sets, collapsed coordinates and the
//!   standard-element data used by every kernel.
//! * [`geometry`]: affine and curvilinear element maps and their metric terms.
//! * [`field_block`]: the Field/Block data model, interleaved layout and the
//!   dual-space [`field_block::MemoryRegion`].
//! * [`operators`]: backward transform, inner products, derivatives, mass and
//!   Helmholtz kernels under interchangeable strategies.
//! * [`oracle`]: brute-force dense elemental matrices used as ground truth.

pub mod bases;
pub mod error;
pub mod field_block;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod oracle;
pub mod shapes;

pub use error::{Error, Result};
pub use linalg::{cholesky_factor, cholesky_solve, det_small, invert_small, solve_dense, QrFactor};
