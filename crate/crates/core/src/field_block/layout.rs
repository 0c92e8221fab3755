//! Lane-major grouping of element data.
//!
//! Canonical order is `[comp][elem][point]`; interleaved order is
//! `[comp][group][point][lane]` with zero-filled padding lanes. Width 1 is
//! the canonical order.

use crate::error::{Error, Result};

pub const SUPPORTED_WIDTHS: [usize; 5] = [1, 2, 4, 8, 16];

/// Widest f64 vector lane count of the running CPU.
pub fn detect_simd_width() -> usize {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx512f") {
            return 8;
        }
        if std::arch::is_x86_feature_detected!("avx") {
            return 4;
        }
    }
    2
}

pub fn check_width(w: usize) -> Result<usize> {
    if SUPPORTED_WIDTHS.contains(&w) {
        Ok(w)
    } else {
        Err(Error::InvalidParameter(format!(
            "interleave width {w} not in {SUPPORTED_WIDTHS:?}"
        )))
    }
}

pub fn padded_elements(n_elements: usize, width: usize) -> usize {
    n_elements.div_ceil(width) * width
}

pub fn interleave(canon: &[f64], n_elements: usize, n_points: usize, n_comp: usize, width: usize) -> Vec<f64> {
    assert_eq!(canon.len(), n_elements * n_points * n_comp);
    let padded = padded_elements(n_elements, width);
    let mut out = vec![0.0; n_comp * padded * n_points];
    for c in 0..n_comp {
        let src = &canon[c * n_elements * n_points..];
        let dst = &mut out[c * padded * n_points..];
        for e in 0..n_elements {
            let (g, lane) = (e / width, e % width);
            for p in 0..n_points {
                dst[(g * n_points + p) * width + lane] = src[e * n_points + p];
            }
        }
    }
    out
}

pub fn deinterleave(data: &[f64], n_elements: usize, n_points: usize, n_comp: usize, width: usize) -> Vec<f64> {
    let padded = padded_elements(n_elements, width);
    assert_eq!(data.len(), n_comp * padded * n_points);
    let mut out = vec![0.0; n_elements * n_points * n_comp];
    for c in 0..n_comp {
        let src = &data[c * padded * n_points..];
        let dst = &mut out[c * n_elements * n_points..];
        for e in 0..n_elements {
            let (g, lane) = (e / width, e % width);
            for p in 0..n_points {
                dst[e * n_points + p] = src[(g * n_points + p) * width + lane];
            }
        }
    }
    out
}
