use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use speckern_core::field_block::{make_block, Block, BlockSpec, FieldState};
use speckern_core::geometry::GeometryClass;
use speckern_core::operators::{helmholtz_apply, mass_apply, BlockStrategy, HelmholtzForm, StrategyId, StrategyRegistry};
use speckern_core::oracle::{apply_dense, assemble_helmholtz, assemble_mass, DenseElementalMatrix, Element};
use speckern_core::shapes::ShapeType;

use crate::{with_threads, BenchError, Result};

pub const VERIFY_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerifyOp {
    Mass,
    Helmholtz,
}

impl FromStr for VerifyOp {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mass" => Ok(VerifyOp::Mass),
            "helmholtz" => Ok(VerifyOp::Helmholtz),
            o => Err(BenchError::Config(format!("verify supports mass and helmholtz, not '{o}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyScope {
    pub shapes: Vec<ShapeType>,
    pub ops: Vec<VerifyOp>,
    pub orders: (usize, usize),
    pub geometries: Vec<GeometryClass>,
    pub strategies: Vec<StrategyId>,
    pub lambdas: Vec<f64>,
    pub nelem: usize,
    pub width: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Flip the sign of the collapsed-coordinate cross terms in the fast
    /// path only; the oracle is untouched.
    pub inject_fault: bool,
}

impl Default for VerifyScope {
    fn default() -> Self {
        VerifyScope {
            shapes: ShapeType::ALL.to_vec(),
            ops: vec![VerifyOp::Mass, VerifyOp::Helmholtz],
            orders: (1, 4),
            geometries: vec![GeometryClass::Regular, GeometryClass::Deformed],
            strategies: StrategyId::IMPLEMENTED.to_vec(),
            lambdas: vec![0.0, 1.0, 2.5],
            nelem: 3,
            width: 2,
            seed: 1,
            threads: None,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyCase {
    pub shape: ShapeType,
    pub order: usize,
    pub geometry: GeometryClass,
    /// mass, helmholtz, or formulation (collocated vs non-collocated)
    pub check: &'static str,
    pub strategy: StrategyId,
    pub form: Option<HelmholtzForm>,
    pub lambda: Option<f64>,
    pub max_rel_err: f64,
    pub pass: bool,
}

impl fmt::Display for VerifyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{:.3e},{}",
            self.shape,
            self.order,
            self.geometry,
            self.check,
            self.strategy,
            self.form.map_or("none", |x| x.name()),
            self.lambda.map_or("none".to_string(), |l| l.to_string()),
            self.max_rel_err,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub cases: Vec<VerifyCase>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyCase> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn max_error(&self) -> f64 {
        self.cases.iter().map(|c| c.max_rel_err).fold(0.0, f64::max)
    }

    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "shape,P,geometry,check,strategy,form,lambda,max_rel_err,status")?;
        for c in &self.cases {
            writeln!(w, "{c}")?;
        }
        let nf = self.failures().count();
        writeln!(w, "# {} cases, {} failed, max relative error {:.3e}", self.cases.len(), nf, self.max_error())
    }
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let e = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

// Apply one dense matrix per element to the canonical coefficients.
fn dense_action(mats: &[DenseElementalMatrix], uh: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(uh.len());
    let np = mats[0].cols;
    for (e, m) in mats.iter().enumerate() {
        out.extend(apply_dense(m, &uh[e * np..(e + 1) * np])?);
    }
    Ok(out)
}

fn test_block(scope: &VerifyScope, shape: ShapeType, p: usize, class: GeometryClass) -> Result<(Block, Vec<f64>)> {
    let spec = BlockSpec::new(shape, p, class, scope.nelem).width(scope.width).seed(scope.seed);
    let mut b = make_block(&spec, FieldState::Coeff, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(scope.seed.wrapping_add(p as u64));
    let uh: Vec<f64> = (0..scope.nelem * b.std.n_modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
    b.set_canonical(&uh)?;
    if scope.inject_fault {
        let mut std = (*b.std).clone();
        std.inject_collapsed_metric_fault();
        b.std = Arc::new(std);
    }
    Ok((b, uh))
}

fn verify_one(
    scope: &VerifyScope,
    reg: &StrategyRegistry,
    shape: ShapeType,
    p: usize,
    class: GeometryClass,
) -> Result<Vec<VerifyCase>> {
    let (mut b, uh) = test_block(scope, shape, p, class)?;
    let geom = b.geom.clone();
    let q = b.std.q.clone();
    let elements: Vec<Element> = (0..scope.nelem).map(|e| Element::new(shape, p, &geom, e).with_q(&q)).collect();
    let strategies: Vec<&dyn BlockStrategy> = scope.strategies.iter().map(|&s| reg.get(s)).collect::<std::result::Result<_, _>>()?;
    let mut cases = Vec::new();
    let case = |check, s: &dyn BlockStrategy, form, lambda, err: f64| VerifyCase {
        shape,
        order: p,
        geometry: class,
        check,
        strategy: s.id(),
        form,
        lambda,
        max_rel_err: err,
        pass: err <= VERIFY_TOL,
    };
    if scope.ops.contains(&VerifyOp::Mass) {
        let mats = elements.iter().map(assemble_mass).collect::<std::result::Result<Vec<_>, _>>()?;
        let want = dense_action(&mats, &uh)?;
        for &s in &strategies {
            let got = mass_apply(&mut b, s)?.canonical()?;
            cases.push(case("mass", s, None, None, rel_err(&got, &want)));
        }
    }
    if scope.ops.contains(&VerifyOp::Helmholtz) {
        for &lambda in &scope.lambdas {
            let mats = elements
                .iter()
                .map(|el| assemble_helmholtz(el, lambda))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let want = dense_action(&mats, &uh)?;
            for &s in &strategies {
                let coll = helmholtz_apply(&mut b, lambda, HelmholtzForm::Coll, s)?.canonical()?;
                let non = helmholtz_apply(&mut b, lambda, HelmholtzForm::NonColl, s)?.canonical()?;
                cases.push(case("helmholtz", s, Some(HelmholtzForm::Coll), Some(lambda), rel_err(&coll, &want)));
                cases.push(case("helmholtz", s, Some(HelmholtzForm::NonColl), Some(lambda), rel_err(&non, &want)));
                cases.push(case("formulation", s, None, Some(lambda), rel_err(&coll, &non)));
            }
        }
    }
    Ok(cases)
}

/// Oracle and formulation equivalence over the scope. Failures are
/// reported in the returned cases, not as errors.
pub fn run_verify(scope: &VerifyScope) -> Result<VerifyReport> {
    if scope.orders.0 == 0 || scope.orders.0 > scope.orders.1 || scope.nelem == 0 {
        return Err(BenchError::Config("empty verification scope".into()));
    }
    if scope.lambdas.iter().any(|l| !(*l >= 0.0)) {
        return Err(BenchError::Config("lambda must be non-negative".into()));
    }
    let reg = StrategyRegistry::new();
    with_threads(scope.threads, || {
        let mut report = VerifyReport::default();
        for &shape in &scope.shapes {
            for p in scope.orders.0..=scope.orders.1 {
                for &class in &scope.geometries {
                    report.cases.extend(verify_one(scope, &reg, shape, p, class)?);
                }
            }
        }
        Ok(report)
    })?
}
