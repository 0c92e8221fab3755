use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::field_block::{make_block, BlockSpec};
use crate::geometry::{synthetic_affine_maps, GeometryClass};
use crate::linalg::{cholesky_factor, solve_dense};
use crate::shapes::{duffy_inverse, ShapeType};

const REG: GeometryClass = GeometryClass::Regular;
const DEF: GeometryClass = GeometryClass::Deformed;

fn rand_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn spec(shape: ShapeType, p: usize, class: GeometryClass, ne: usize, w: usize) -> BlockSpec {
    BlockSpec::new(shape, p, class, ne).width(w).seed(7)
}

fn coeff_block(s: &BlockSpec, seed: u64) -> Block {
    let mut b = make_block(s, FieldState::Coeff, 1).unwrap();
    let n = b.n_elements * b.std.n_modes;
    b.set_canonical(&rand_vec(n, seed)).unwrap();
    b
}

fn phys_block(s: &BlockSpec, vals: &[f64], comp: usize) -> Block {
    let mut b = make_block(s, FieldState::Phys, comp).unwrap();
    b.set_canonical(vals).unwrap();
    b
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Dense matrix (row-major n×n) of a coefficient-to-coefficient operator on
/// a single-element block.
fn dense_of(s: &BlockSpec, op: impl Fn(&mut Block) -> Block) -> (usize, Vec<f64>) {
    let mut b = make_block(s, FieldState::Coeff, 1).unwrap();
    let n = b.std.n_modes;
    let mut m = vec![0.0; n * n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        b.set_canonical(&e).unwrap();
        let col = op(&mut b).canonical().unwrap();
        for i in 0..n {
            m[i * n + j] = col[i];
        }
    }
    (n, m)
}

/// Physical coordinates at every quadrature point of a Regular block,
/// `[a][elem][point]`.
fn coords(b: &Block, seed: u64) -> Vec<Vec<f64>> {
    let std = &b.std;
    let (d, nq, ne) = (std.dim, std.n_points, b.n_elements);
    let maps = synthetic_affine_maps(std.shape, ne, seed);
    let mut x = vec![vec![0.0; ne * nq]; d];
    for (e, m) in maps.iter().enumerate() {
        for l in 0..nq {
            let xi = duffy_inverse(std.shape, std.eta_at(l));
            let p = m.apply(&xi);
            for a in 0..d {
                x[a][e * nq + l] = p[a];
            }
        }
    }
    x
}

/// û such that B û interpolates `u` in the L2 sense: M⁻¹ Bᵀ W u.
fn project(s: &BlockSpec, u: &[f64]) -> Vec<f64> {
    let reg = StrategyRegistry::new();
    let sf = reg.get(StrategyId::SumFac).unwrap();
    let (n, m) = dense_of(s, |b| mass_apply(b, sf).unwrap());
    let mut pb = phys_block(s, u, 1);
    let rhs = iproduct_wrt_base(&mut pb, sf).unwrap().canonical().unwrap();
    solve_dense(&m, &rhs, n).unwrap()
}

#[test]
fn sumfac_bwd_matches_dense_basis_matrix() {
    for shape in ShapeType::ALL {
        for p in 1..=5 {
            let s = spec(shape, p, REG, 3, 2);
            let mut b = coeff_block(&s, 11);
            let uh = b.canonical().unwrap();
            let u = bwd_trans(&mut b, &SumFac).unwrap().canonical().unwrap();
            let std = &b.std;
            let (np, nq) = (std.n_modes, std.n_points);
            for e in 0..3 {
                for l in 0..nq {
                    let want: f64 = (0..np).map(|m| std.b[l * np + m] * uh[e * np + m]).sum();
                    assert!((u[e * nq + l] - want).abs() < 1e-12, "{shape} P={p}");
                }
            }
        }
    }
}

#[test]
fn quad_sumfac_bwd_matches_kronecker_product() {
    let s = spec(ShapeType::Quad, 4, REG, 1, 1);
    let mut b = coeff_block(&s, 3);
    let uh = b.canonical().unwrap();
    let u = bwd_trans(&mut b, &SumFac).unwrap().canonical().unwrap();
    let std = &b.std;
    let (b1, b2) = (&std.bases[0], &std.bases[1]);
    let (p1, q1, q2) = (b1.nmodes(), b1.npoints(), b2.npoints());
    for i in 0..q1 {
        for j in 0..q2 {
            let mut want = 0.0;
            for a in 0..p1 {
                for c in 0..b2.nmodes() {
                    want += b1.b[i * p1 + a] * b2.b[j * b2.nmodes() + c] * uh[a * b2.nmodes() + c];
                }
            }
            assert!((u[i * q2 + j] - want).abs() < 1e-12);
        }
    }
}

fn all_ops(b: &mut Block, s: &dyn BlockStrategy, lambda: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut u = bwd_trans(b, s).unwrap();
    out.push(u.canonical().unwrap());
    out.push(iproduct_wrt_base(&mut u, s).unwrap().canonical().unwrap());
    let mut du = phys_deriv(&mut u).unwrap();
    out.push(du.canonical().unwrap());
    out.push(iproduct_wrt_deriv_base(&mut du, s).unwrap().canonical().unwrap());
    out.push(mass_apply(b, s).unwrap().canonical().unwrap());
    out.push(helmholtz_apply_noncoll(b, lambda, s).unwrap().canonical().unwrap());
    out.push(helmholtz_apply_coll(b, lambda, s).unwrap().canonical().unwrap());
    out
}

#[test]
fn strategies_agree_on_every_operator() {
    let reg = StrategyRegistry::new();
    for shape in ShapeType::ALL {
        for class in [REG, DEF] {
            for p in [1, 3, 5] {
                let s = spec(shape, p, class, 5, 4);
                let mut b = coeff_block(&s, 5);
                let base = all_ops(&mut b, reg.get(StrategyId::StdMat).unwrap(), 1.3);
                for id in [StrategyId::StdMatGrouped, StrategyId::SumFac] {
                    let got = all_ops(&mut b, reg.get(id).unwrap(), 1.3);
                    for (k, (x, y)) in base.iter().zip(&got).enumerate() {
                        let tol = 1e-12 * max_abs(x).max(1.0);
                        assert!(max_diff(x, y) < tol, "{shape} {class} P={p} {id} op {k}: {}", max_diff(x, y));
                    }
                }
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_interleave_width() {
    for shape in [ShapeType::Tri, ShapeType::Prism] {
        let mut res = Vec::new();
        for w in [1, 2, 4, 8, 16] {
            let s = spec(shape, 3, DEF, 7, w);
            let mut b = coeff_block(&s, 9);
            res.push(all_ops(&mut b, &SumFac, 0.5));
        }
        for r in &res[1..] {
            for (x, y) in res[0].iter().zip(r) {
                assert!(max_diff(x, y) < 1e-12);
            }
        }
    }
}

#[test]
fn padding_lanes_stay_zero() {
    let reg = StrategyRegistry::new();
    let s = spec(ShapeType::Hex, 2, DEF, 5, 4);
    for st in reg.all() {
        let mut b = coeff_block(&s, 1);
        let mut h = helmholtz_apply_coll(&mut b, 1.0, st).unwrap();
        let mut u = bwd_trans(&mut b, st).unwrap();
        for out in [&mut h, &mut u] {
            let ppe = out.points_per_element();
            let raw = out.data.read(MemorySpace::Host).unwrap();
            // second group holds element 4 in lane 0, lanes 1..4 are padding
            for l in 0..ppe {
                for lane in 1..4 {
                    assert_eq!(raw[ppe * 4 + l * 4 + lane], 0.0, "{}", st.name());
                }
            }
        }
    }
}

#[test]
fn helmholtz_is_symmetric_and_forms_agree() {
    for shape in ShapeType::ALL {
        for class in [REG, DEF] {
            let s = spec(shape, 3, class, 1, 1);
            let (n, hn) = dense_of(&s, |b| helmholtz_apply_noncoll(b, 0.7, &SumFac).unwrap());
            let (_, hc) = dense_of(&s, |b| helmholtz_apply_coll(b, 0.7, &SumFac).unwrap());
            let scale = max_abs(&hn);
            for i in 0..n {
                for j in 0..n {
                    assert!((hn[i * n + j] - hn[j * n + i]).abs() < 1e-12 * scale, "{shape} {class}");
                    assert!((hc[i * n + j] - hc[j * n + i]).abs() < 1e-12 * scale, "{shape} {class}");
                }
            }
            // the collocated derivative is exact for polynomials of degree P
            assert!(max_diff(&hn, &hc) < 1e-11 * scale, "{shape} {class}");
        }
    }
}

#[test]
fn mass_matrix_is_spd() {
    for shape in ShapeType::ALL {
        let s = spec(shape, 4, DEF, 1, 1);
        let (n, m) = dense_of(&s, |b| mass_apply(b, &StdMat).unwrap());
        for i in 0..n {
            for j in 0..i {
                assert!((m[i * n + j] - m[j * n + i]).abs() < 1e-13);
            }
        }
        assert!(cholesky_factor(&m, n).is_ok(), "{shape}");
    }
}

#[test]
fn constants_are_reproduced_and_annihilated() {
    for shape in ShapeType::ALL {
        let s = spec(shape, 3, DEF, 1, 1);
        let nq = make_block(&s, FieldState::Phys, 1).unwrap().std.n_points;
        let one = project(&s, &vec![1.0; nq]);
        let mut b = make_block(&s, FieldState::Coeff, 1).unwrap();
        b.set_canonical(&one).unwrap();
        let u = bwd_trans(&mut b, &SumFac).unwrap().canonical().unwrap();
        assert!(max_diff(&u, &vec![1.0; nq]) < 1e-11, "{shape}");
        for form in [HelmholtzForm::Coll, HelmholtzForm::NonColl] {
            let h = helmholtz_apply(&mut b, 0.0, form, &SumFac).unwrap().canonical().unwrap();
            assert!(max_abs(&h) < 1e-11, "{shape} {form}");
        }
    }
}

#[test]
fn projection_recovers_coefficients() {
    for shape in ShapeType::ALL {
        let s = spec(shape, 4, REG, 1, 1);
        let mut b = coeff_block(&s, 21);
        let uh = b.canonical().unwrap();
        let u = bwd_trans(&mut b, &SumFac).unwrap().canonical().unwrap();
        assert!(max_diff(&project(&s, &u), &uh) < 1e-10, "{shape}");
    }
}

#[test]
fn dirichlet_energy_of_linear_field_is_volume() {
    for shape in ShapeType::ALL {
        let s = spec(shape, 2, REG, 1, 1);
        let b = make_block(&s, FieldState::Phys, 1).unwrap();
        let x = coords(&b, 7);
        let uh = project(&s, &x[0]);
        let (n, h) = dense_of(&s, |b| helmholtz_apply_noncoll(b, 0.0, &SumFac).unwrap());
        let energy: f64 = (0..n).map(|i| (0..n).map(|j| uh[i] * h[i * n + j] * uh[j]).sum::<f64>()).sum();
        let vol = b.geom.jac_at(0, 0) * shape.reference_volume();
        assert!((energy - vol).abs() < 1e-11, "{shape}: {energy} vs {vol}");
    }
}

#[test]
fn phys_deriv_of_polynomial_fields() {
    for shape in ShapeType::ALL {
        let s = spec(shape, 2, REG, 3, 2);
        let b = make_block(&s, FieldState::Phys, 1).unwrap();
        let x = coords(&b, 7);
        let d = shape.dim();
        // u = x1 x2 + 3 x_d
        let u: Vec<f64> = (0..x[0].len()).map(|i| x[0][i] * x[1][i] + 3.0 * x[d - 1][i]).collect();
        let mut pb = phys_block(&s, &u, 1);
        let g = phys_deriv(&mut pb).unwrap().canonical().unwrap();
        let m = u.len();
        for i in 0..m {
            let mut want = vec![x[1][i], x[0][i], 0.0];
            want[d - 1] += 3.0;
            for a in 0..d {
                assert!((g[a * m + i] - want[a]).abs() < 1e-11, "{shape} a={a}");
            }
        }
    }
}

#[test]
fn inner_products_are_adjoint_to_evaluation() {
    for shape in ShapeType::ALL {
        let s = spec(shape, 3, DEF, 2, 2);
        let mut b = coeff_block(&s, 2);
        let vh = b.canonical().unwrap();
        let v = bwd_trans(&mut b, &SumFac).unwrap().canonical().unwrap();
        let std = b.std.clone();
        let u = rand_vec(v.len(), 3);
        let mut ub = phys_block(&s, &u, 1);
        let f = iproduct_wrt_base(&mut ub, &SumFac).unwrap().canonical().unwrap();
        let lhs: f64 = f.iter().zip(&vh).map(|(a, b)| a * b).sum();
        let nq = std.n_points;
        let rhs: f64 = (0..v.len()).map(|i| b.geom.wj_at(i / nq, i % nq, &std.w_ref) * u[i] * v[i]).sum();
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0), "{shape}");
    }
}

#[test]
fn laplacian_from_gradient_and_derivative_inner_product() {
    // Σ_i ∫ ∂φ/∂ξ_i (∂ξ_i/∂x_a ∂u/∂x_a) equals the stiffness action
    for shape in ShapeType::ALL {
        let s = spec(shape, 3, REG, 2, 1);
        let mut b = coeff_block(&s, 4);
        let d = shape.dim();
        let mut u = bwd_trans(&mut b, &SumFac).unwrap();
        let g = phys_deriv(&mut u).unwrap().canonical().unwrap();
        let nq = b.std.n_points;
        let m = 2 * nq;
        let mut v = vec![0.0; d * m];
        for i in 0..m {
            let dxi = b.geom.dxi_dx_at(i / nq, 0);
            for k in 0..d {
                v[k * m + i] = (0..d).map(|a| dxi[k * d + a] * g[a * m + i]).sum();
            }
        }
        let mut vb = phys_block(&s, &v, d);
        let lhs = iproduct_wrt_deriv_base(&mut vb, &SumFac).unwrap().canonical().unwrap();
        let rhs = helmholtz_apply_noncoll(&mut b, 0.0, &SumFac).unwrap().canonical().unwrap();
        assert!(max_diff(&lhs, &rhs) < 1e-11 * max_abs(&rhs).max(1.0), "{shape}");
    }
}

#[test]
fn state_and_parameter_errors() {
    let s = spec(ShapeType::Quad, 2, REG, 2, 1);
    let mut c = coeff_block(&s, 1);
    let mut p = make_block(&s, FieldState::Phys, 1).unwrap();
    assert!(matches!(bwd_trans(&mut p, &SumFac), Err(Error::StateMismatch { .. })));
    assert!(matches!(iproduct_wrt_base(&mut c, &SumFac), Err(Error::StateMismatch { .. })));
    assert!(matches!(helmholtz_apply_coll(&mut c, -1.0, &SumFac), Err(Error::NegativeLambda(_))));
    let reg = StrategyRegistry::new();
    assert!(matches!(reg.get(StrategyId::SumFacTop), Err(Error::UnsupportedStrategy(_))));
    assert!(reg.by_name("nope").is_err());
    assert_eq!(reg.by_name("stdmat-grouped").unwrap().id(), StrategyId::StdMatGrouped);
}

#[test]
fn flop_counts() {
    let e = crate::shapes::build_shape_basis(ShapeType::Quad, 3).unwrap();
    let (np, nq) = (16u64, 25u64);
    assert_eq!(operator_flops(OperatorKind::BwdTrans, &e, StrategyId::StdMat).unwrap(), 2 * nq * np);
    assert_eq!(operator_flops(OperatorKind::BwdTrans, &e, StrategyId::SumFac).unwrap(), 2 * (5 * 4 * 4 + 5 * 5 * 4));
    assert!(operator_flops(OperatorKind::Mass, &e, StrategyId::SumFacTop).is_err());
    for shape in ShapeType::ALL {
        let e = crate::shapes::build_shape_basis(shape, 7).unwrap();
        for k in [OperatorKind::BwdTrans, OperatorKind::HelmholtzColl] {
            let sm = operator_flops(k, &e, StrategyId::StdMat).unwrap();
            let sf = operator_flops(k, &e, StrategyId::SumFac).unwrap();
            assert!(sf < sm, "{shape} {k:?}");
        }
    }
}
