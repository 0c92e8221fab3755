use super::*;
use crate::linalg::solve_dense;
use crate::shapes::build_shape_basis;

fn identity_vertices(shape: ShapeType, scale: f64) -> Vec<Vec<f64>> {
    shape
        .reference_vertices()
        .into_iter()
        .map(|v| v.into_iter().map(|x| scale * x).collect())
        .collect()
}

#[test]
fn scaled_hex() {
    let h = 0.4;
    let g = make_affine_block(ShapeType::Hex, &[identity_vertices(ShapeType::Hex, h / 2.0)]).unwrap();
    assert!((g.jac[0] - (h / 2.0f64).powi(3)).abs() < 1e-15);
    for i in 0..3 {
        for a in 0..3 {
            let want = if i == a { 2.0 / h } else { 0.0 };
            assert!((g.dxi_dx[i * 3 + a] - want).abs() < 1e-13);
        }
    }
    assert_eq!(g.class, GeometryClass::Regular);
    assert_eq!(g.storage_per_element(), 10);
}

#[test]
fn identity_elements() {
    for s in ShapeType::ALL {
        let g = make_affine_block(s, &[identity_vertices(s, 1.0)]).unwrap();
        let d = s.dim();
        assert_eq!(g.jac[0], 1.0);
        for i in 0..d {
            for a in 0..d {
                assert_eq!(g.dxi_dx[i * d + a], if i == a { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(g.storage_per_element(), d * d + 1);
    }
}

#[test]
fn random_tet_inverse_by_elimination() {
    let maps = synthetic_affine_maps(ShapeType::Tet, 5, 11);
    let verts: Vec<_> = maps.iter().map(|m| affine_vertices(ShapeType::Tet, m)).collect();
    let g = make_affine_block(ShapeType::Tet, &verts).unwrap();
    for (e, v) in verts.iter().enumerate() {
        // edge matrix columns v_i - v_0 equal 2·∂x/∂ξ_i
        let mut ed = vec![0.0; 9];
        for a in 0..3 {
            for i in 0..3 {
                ed[a * 3 + i] = 0.5 * (v[1 + i][a] - v[0][a]);
            }
        }
        for a in 0..3 {
            let mut rhs = vec![0.0; 3];
            rhs[a] = 1.0;
            let col = solve_dense(&ed, &rhs, 3).unwrap();
            for i in 0..3 {
                assert!((g.dxi_dx_at(e, 0)[i * 3 + a] - col[i]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn not_affine_and_degenerate() {
    let mut v = identity_vertices(ShapeType::Hex, 1.0);
    v[7][0] += 0.1;
    assert!(matches!(make_affine_block(ShapeType::Hex, &[v]), Err(Error::NotAffine { .. })));
    let mut v = identity_vertices(ShapeType::Tri, 1.0);
    v.swap(1, 2);
    assert!(matches!(make_affine_block(ShapeType::Tri, &[v]), Err(Error::DegenerateElement { .. })));
}

#[test]
fn zero_deformation_matches_affine() {
    for s in ShapeType::ALL {
        for p in 1..=3 {
            let std = build_shape_basis(s, p).unwrap();
            let maps = synthetic_affine_maps(s, 3, 5);
            let reg = build_geometry(&std, GeometryClass::Regular, 3, 5, 0.0).unwrap();
            let chi = |e: usize, xi: &[f64]| maps[e].apply(xi);
            let def = make_deformed_block(&std, 3, &chi).unwrap();
            let same = build_geometry(&std, GeometryClass::Deformed, 3, 5, 0.0).unwrap();
            assert_eq!(def, same);
            for e in 0..3 {
                for l in 0..std.n_points {
                    let a = reg.dxi_dx_at(e, 0);
                    let b = def.dxi_dx_at(e, l);
                    for k in 0..a.len() {
                        assert!((a[k] - b[k]).abs() < 1e-12, "{s:?}");
                    }
                    assert!((reg.jac_at(e, l) - def.jac_at(e, l)).abs() < 1e-12);
                    assert!((reg.wj_at(e, l, &std.w_ref) - def.wj_at(e, l, &std.w_ref)).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn sinusoidal_quad_metric() {
    let std = crate::shapes::build_shape_basis(ShapeType::Quad, 18).unwrap();
    let chi = |_: usize, xi: &[f64]| vec![xi[0] + 0.05 * (std::f64::consts::PI * xi[1]).sin(), xi[1]];
    let g = make_deformed_block(&std, 1, &chi).unwrap();
    for l in 0..std.n_points {
        let xi = std.eta_at(l);
        let c = 0.05 * std::f64::consts::PI * (std::f64::consts::PI * xi[1]).cos();
        let want = [1.0, -c, 0.0, 1.0];
        let got = g.dxi_dx_at(0, l);
        for k in 0..4 {
            assert!((got[k] - want[k]).abs() < 1e-10, "{k} {} {}", got[k], want[k]);
        }
    }
}

fn poly_map(shape: ShapeType) -> impl Fn(usize, &[f64]) -> Vec<f64> + Sync {
    move |_, xi: &[f64]| match shape.dim() {
        2 => vec![xi[0] + 0.1 * xi[0] * xi[1] * xi[1], xi[1]],
        _ => vec![xi[0] * (1.0 + 0.1 * xi[2]), xi[1], xi[2]],
    }
}

fn poly_jac(shape: ShapeType, xi: &[f64]) -> Vec<f64> {
    match shape.dim() {
        2 => vec![1.0 + 0.1 * xi[1] * xi[1], 0.2 * xi[0] * xi[1], 0.0, 1.0],
        _ => vec![1.0 + 0.1 * xi[2], 0.0, 0.1 * xi[0], 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    }
}

#[test]
fn deformed_volume() {
    // ∫(1 + 0.1 ξ2²) over the square, ∫(1 + 0.1 ξ3) over the tet
    let cases = [
        (ShapeType::Quad, 4.0 + 0.1 * 4.0 / 3.0),
        (ShapeType::Tri, 2.0 + 0.1 * (2.0 / 3.0 + 0.0)),
        (ShapeType::Tet, 4.0 / 3.0 - 1.0 / 15.0),
        (ShapeType::Hex, 8.0),
    ];
    for (s, vol) in cases {
        let std = build_shape_basis(s, 4).unwrap();
        let g = make_deformed_block(&std, 1, &poly_map(s)).unwrap();
        let v: f64 = g.wj.iter().sum();
        assert!((v - vol).abs() < 1e-12, "{s:?} {v} {vol}");
    }
}

#[test]
fn metric_inverse_property() {
    for s in ShapeType::ALL {
        let std = build_shape_basis(s, 4).unwrap();
        let d = s.dim();
        let g = make_deformed_block(&std, 1, &poly_map(s)).unwrap();
        for l in 0..std.n_points {
            let xi = duffy_inverse(s, std.eta_at(l));
            let j = poly_jac(s, &xi);
            let x = g.dxi_dx_at(0, l);
            for i in 0..d {
                for k in 0..d {
                    let v: f64 = (0..d).map(|a| x[i * d + a] * j[a * d + k]).sum();
                    assert!((v - if i == k { 1.0 } else { 0.0 }).abs() < 1e-11, "{s:?}");
                }
            }
        }
    }
}

#[test]
fn fused_weights() {
    let std = build_shape_basis(ShapeType::Hex, 2).unwrap();
    let g = make_affine_block(ShapeType::Hex, &[identity_vertices(ShapeType::Hex, 1.0)]).unwrap();
    assert_eq!(fuse_weights(&g), FusedWeights::Scalar(vec![1.0]));
    let g = make_affine_block(ShapeType::Hex, &[identity_vertices(ShapeType::Hex, 0.5)]).unwrap();
    match fuse_weights(&g) {
        FusedWeights::Scalar(j) => {
            for l in 0..std.n_points {
                assert!((j[0] * std.w_ref[l] - 0.125 * std.w_ref[l]).abs() < 1e-16);
            }
        }
        _ => panic!(),
    }
    let std = build_shape_basis(ShapeType::Quad, 4).unwrap();
    let g = make_deformed_block(&std, 1, &poly_map(ShapeType::Quad)).unwrap();
    let FusedWeights::PerPoint(w) = fuse_weights(&g) else { panic!() };
    for l in 0..std.n_points {
        let xi = std.eta_at(l);
        let j = poly_jac(ShapeType::Quad, xi);
        let det = j[0] * j[3] - j[1] * j[2];
        assert!((w[l] - std.w_ref[l] * det).abs() < 1e-13);
    }
}

#[test]
fn synthetic_deformed_is_valid_everywhere() {
    for s in ShapeType::ALL {
        for p in 1..=4 {
            let std = build_shape_basis(s, p).unwrap();
            for amp in [DEFAULT_DEFORM_AMP, 0.1] {
                let g = build_geometry(&std, GeometryClass::Deformed, 6, 3, amp).unwrap();
                assert!(g.jac.iter().all(|&j| j > 0.0));
            }
        }
    }
    let std = build_shape_basis(ShapeType::Quad, 2).unwrap();
    assert!(build_geometry(&std, GeometryClass::Deformed, 2, 1, 0.5).is_err());
    assert!(build_geometry(&std, GeometryClass::Regular, 0, 1, 0.0).is_err());
}

#[test]
fn synthetic_is_deterministic() {
    let std = build_shape_basis(ShapeType::Tet, 3).unwrap();
    let a = build_geometry(&std, GeometryClass::Deformed, 4, 9, 0.05).unwrap();
    let b = build_geometry(&std, GeometryClass::Deformed, 4, 9, 0.05).unwrap();
    assert_eq!(a, b);
    // element e does not depend on how many elements follow it
    let c = build_geometry(&std, GeometryClass::Deformed, 7, 9, 0.05).unwrap();
    assert_eq!(a.dxi_dx[..], c.dxi_dx[..a.dxi_dx.len()]);
}

#[test]
fn layout_interleaves_and_pads() {
    let std = build_shape_basis(ShapeType::Tri, 2).unwrap();
    for class in [GeometryClass::Regular, GeometryClass::Deformed] {
        let g = build_geometry(&std, class, 5, 2, 0.05).unwrap();
        let lay = MetricLayout::new(&g, 4);
        assert_eq!(lay.n_groups, 2);
        let np = lay.n_points;
        for e in 0..8 {
            let (grp, lane) = (e / 4, e % 4);
            for l in 0..np {
                let w = lay.wj[(grp * np + l) * 4 + lane];
                if e >= 5 {
                    assert_eq!(w, 0.0);
                } else {
                    let want = match class {
                        GeometryClass::Regular => g.jac[e],
                        GeometryClass::Deformed => g.wj[e * np + l],
                    };
                    assert_eq!(w, want);
                    let x = g.dxi_dx_at(e, l);
                    let lam01 = lay.lam[((grp * np + l) * 4 + 1) * 4 + lane];
                    let want01 = (x[0] * x[2] + x[1] * x[3]) * want;
                    assert!((lam01 - want01).abs() < 1e-14);
                }
            }
        }
    }
}
