//! Deterministic synthetic elements for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{make_affine_block, make_deformed_block, GeometricFactors, GeometryClass};
use crate::error::{Error, Result};
use crate::shapes::{ShapeType, StdElement};

pub const DEFAULT_DEFORM_AMP: f64 = 0.05;
const SHEAR: f64 = 0.2;

/// x = origin + M (ξ + 1), `m` row-major with `m[a*d+i] = ∂x_a/∂ξ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub origin: Vec<f64>,
    pub m: Vec<f64>,
}

impl AffineMap {
    pub fn apply(&self, xi: &[f64]) -> Vec<f64> {
        let d = self.origin.len();
        (0..d)
            .map(|a| self.origin[a] + (0..d).map(|i| self.m[a * d + i] * (xi[i] + 1.0)).sum::<f64>())
            .collect()
    }
}

fn element_rng(seed: u64, e: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (e as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// M = (h/2)(I + 0.2 S) with S uniform in [-1,1], shifted along x1 by e·h
/// (h = 1). Rows of I + 0.2 S are diagonally dominant so |M| > 0.
pub fn synthetic_affine_maps(shape: ShapeType, n_elements: usize, seed: u64) -> Vec<AffineMap> {
    (0..n_elements).map(|e| affine_map_of(shape, e, seed)).collect()
}

fn affine_map_of(shape: ShapeType, e: usize, seed: u64) -> AffineMap {
    let d = shape.dim();
    let mut rng = element_rng(seed, e);
    let mut m = vec![0.0; d * d];
    for a in 0..d {
        for i in 0..d {
            let s: f64 = rng.gen_range(-1.0..1.0);
            m[a * d + i] = 0.5 * (if a == i { 1.0 } else { 0.0 } + SHEAR * s);
        }
    }
    let mut origin = vec![0.0; d];
    origin[0] = e as f64;
    AffineMap { origin, m }
}

pub fn affine_vertices(shape: ShapeType, map: &AffineMap) -> Vec<Vec<f64>> {
    shape.reference_vertices().iter().map(|v| map.apply(v)).collect()
}

/// Affine map plus x_a += amp·sin(π/2 ξ_{a+1} + φ_{e,a}).
///
/// With amp ≤ 0.1 the added shear is at most 0.16 per row against a
/// diagonal of at least 0.4, so the jacobian stays positive.
pub fn deformed_map(shape: ShapeType, seed: u64, amp: f64) -> impl Fn(usize, &[f64]) -> Vec<f64> + Sync {
    let d = shape.dim();
    move |e: usize, xi: &[f64]| {
        let map = affine_map_of(shape, e, seed);
        let mut rng = element_rng(seed.wrapping_add(1), e);
        let mut x = map.apply(xi);
        for a in 0..d {
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            x[a] += amp * (std::f64::consts::FRAC_PI_2 * xi[(a + 1) % d] + phi).sin();
        }
        x
    }
}

/// Metric terms for `n_elements` synthetic elements of `std`'s shape.
pub fn build_geometry(
    std: &StdElement,
    class: GeometryClass,
    n_elements: usize,
    seed: u64,
    deform_amp: f64,
) -> Result<GeometricFactors> {
    if n_elements == 0 {
        return Err(Error::InvalidParameter("block needs at least one element".into()));
    }
    match class {
        GeometryClass::Regular => {
            let verts: Vec<_> = synthetic_affine_maps(std.shape, n_elements, seed)
                .iter()
                .map(|m| affine_vertices(std.shape, m))
                .collect();
            make_affine_block(std.shape, &verts)
        }
        GeometryClass::Deformed => {
            if !(0.0..=0.1).contains(&deform_amp) {
                return Err(Error::InvalidParameter(format!(
                    "deformation amplitude {deform_amp} outside [0, 0.1]"
                )));
            }
            let chi = deformed_map(std.shape, seed, deform_amp);
            make_deformed_block(std, n_elements, &chi)
        }
    }
}
