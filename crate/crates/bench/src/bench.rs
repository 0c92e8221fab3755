use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use speckern_core::field_block::{detect_simd_width, make_block, Block, BlockSpec, FieldState, MemorySpace};
use speckern_core::geometry::GeometryClass;
use speckern_core::operators::{operator_flops, BlockOperands, BlockStrategy, HelmholtzForm, StrategyId, StrategyRegistry};
use speckern_core::shapes::ShapeType;

use crate::config::{BenchConfig, BenchOp};
use crate::{with_threads, BenchError, Result};

pub const CSV_HEADER: &str = "op,shape,P,strategy,geometry,form,nelem,ndof,seconds,dof_per_s,flops_per_elem";

const VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub op: BenchOp,
    pub shape: ShapeType,
    pub order: usize,
    pub strategy: StrategyId,
    pub geometry: GeometryClass,
    /// Helmholtz only
    pub form: Option<HelmholtzForm>,
    pub nelem: usize,
    pub n_modes: usize,
    pub n_points: usize,
    /// nelem · N_P
    pub ndof: usize,
    /// median seconds per operator application
    pub seconds: f64,
    pub dof_per_s: f64,
    pub flops_per_elem: u64,
    pub bytes_estimate: u64,
    /// applications per timed batch
    pub iters: usize,
    /// seconds per batch, one per repetition
    pub raw: Vec<f64>,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.6e},{:.6e},{}",
            self.op,
            self.shape,
            self.order,
            self.strategy,
            self.geometry,
            self.form.map_or("none", |f| f.name()),
            self.nelem,
            self.ndof,
            self.seconds,
            self.dof_per_s,
            self.flops_per_elem
        )
    }
}

pub fn write_csv(records: &[BenchRecord], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// One row per timed batch.
pub fn write_raw(records: &[BenchRecord], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "op,shape,P,strategy,geometry,form,nelem,rep,iters,batch_seconds")?;
    for r in records {
        for (i, t) in r.raw.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{:.6e}",
                r.op,
                r.shape,
                r.order,
                r.strategy,
                r.geometry,
                r.form.map_or("none", |f| f.name()),
                r.nelem,
                i,
                r.iters,
                t
            )?;
        }
    }
    Ok(())
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

// Input block laid out at the strategy's working width.
fn input_block(cfg: &BenchConfig, shape: ShapeType, p: usize, ne: usize, s: &dyn BlockStrategy) -> Result<Block> {
    let w = s.working_width(cfg.simd_width.unwrap_or_else(detect_simd_width));
    let mut spec = BlockSpec::new(shape, p, cfg.geometry, ne).width(w).seed(cfg.seed).deform_amp(cfg.deform_amp);
    if let Some(q) = &cfg.qpoints {
        spec = spec.qpoints(q.clone());
    }
    let mut b = make_block(&spec, FieldState::Coeff, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let vals: Vec<f64> = (0..ne * b.std.n_modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
    b.set_canonical(&vals)?;
    Ok(b)
}

fn out_len(op: BenchOp, ops: &BlockOperands) -> usize {
    match op {
        BenchOp::BwdTrans => ops.phys_len(),
        _ => ops.coeff_len(),
    }
}

fn apply_raw(cfg: &BenchConfig, s: &dyn BlockStrategy, ops: &BlockOperands, input: &[f64], out: &mut [f64]) {
    match cfg.op {
        BenchOp::Mass => s.mass(ops, input, out),
        BenchOp::BwdTrans => s.bwd_trans(ops, input, out),
        BenchOp::Helmholtz => s.helmholtz(ops, cfg.lambda, cfg.form_for(s.id()), input, out),
    }
}

// Canonical-order output of one application, for cross-strategy checks.
fn canonical_result(cfg: &BenchConfig, b: &mut Block, s: &dyn BlockStrategy) -> Result<Vec<f64>> {
    use speckern_core::operators as op;
    let mut out = match cfg.op {
        BenchOp::Mass => op::mass_apply(b, s)?,
        BenchOp::BwdTrans => op::bwd_trans(b, s)?,
        BenchOp::Helmholtz => op::helmholtz_apply(b, cfg.lambda, cfg.form_for(s.id()), s)?,
    };
    Ok(out.canonical()?)
}

fn verify_pair(cfg: &BenchConfig, b: &mut Block, s: &dyn BlockStrategy, reg: &StrategyRegistry) -> Result<()> {
    let other = if s.id() == StrategyId::StdMatGrouped { StrategyId::SumFac } else { StrategyId::StdMatGrouped };
    let r = reg.get(other)?;
    let (a, c) = (canonical_result(cfg, b, s)?, canonical_result(cfg, b, r)?);
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let err = a.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
    if !(err <= VERIFY_TOL) {
        return Err(BenchError::Verification(format!(
            "{} {} P={} {}: {} vs {} differ by {err:.3e} (relative)",
            cfg.op,
            b.shape(),
            b.order(),
            cfg.geometry,
            s.name(),
            r.name()
        )));
    }
    Ok(())
}

fn measure(
    cfg: &BenchConfig,
    reg: &StrategyRegistry,
    shape: ShapeType,
    p: usize,
    ne: usize,
    sid: StrategyId,
) -> Result<BenchRecord> {
    let s = reg.get(sid)?;
    let mut b = input_block(cfg, shape, p, ne, s)?;
    verify_pair(cfg, &mut b, s, reg)?;
    let ops = BlockOperands::new(&b.std, &b.metric);
    let input = b.data.read(MemorySpace::Host)?.to_vec();
    let mut out = vec![0.0; out_len(cfg.op, &ops)];
    for _ in 0..cfg.warmup.max(1) {
        apply_raw(cfg, s, &ops, &input, &mut out);
    }
    // size batches so each lasts at least min_time
    let t0 = Instant::now();
    apply_raw(cfg, s, &ops, &input, &mut out);
    let once = t0.elapsed().as_secs_f64().max(1e-9);
    let iters = ((cfg.min_time / once).ceil() as usize).max(1);
    let mut raw = Vec::with_capacity(cfg.reps);
    for _ in 0..cfg.reps {
        let t = Instant::now();
        for _ in 0..iters {
            apply_raw(cfg, s, &ops, &input, &mut out);
        }
        raw.push(t.elapsed().as_secs_f64());
    }
    std::hint::black_box(&out);
    let form = (cfg.op == BenchOp::Helmholtz).then(|| cfg.form_for(sid));
    let kind = cfg.op.kind(cfg.form_for(sid));
    let (np, nq) = (b.std.n_modes, b.std.n_points);
    let ndof = ne * np;
    let seconds = median(&raw) / iters as f64;
    let out_points = if cfg.op == BenchOp::BwdTrans { nq } else { np };
    let bytes = 8 * (ne * (np + out_points) + b.geom.storage_per_element() * ne) as u64;
    Ok(BenchRecord {
        op: cfg.op,
        shape,
        order: p,
        strategy: sid,
        geometry: cfg.geometry,
        form,
        nelem: ne,
        n_modes: np,
        n_points: nq,
        ndof,
        seconds,
        dof_per_s: ndof as f64 / seconds,
        flops_per_elem: operator_flops(kind, &b.std, sid)?,
        bytes_estimate: bytes,
        iters,
        raw,
    })
}

/// Time every (shape, P, nelem, strategy) combination of `cfg`.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let reg = StrategyRegistry::new();
    with_threads(cfg.threads, || {
        let mut out = Vec::new();
        for &shape in &cfg.shapes {
            for p in cfg.orders.0..=cfg.orders.1 {
                for &ne in &cfg.nelem {
                    for &sid in &cfg.strategies {
                        out.push(measure(cfg, &reg, shape, p, ne, sid)?);
                    }
                }
            }
        }
        Ok(out)
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> BenchConfig {
        BenchConfig { reps: 3, min_time: 1e-4, nelem: vec![1], orders: (2, 2), ..BenchConfig::default() }
    }

    #[test]
    fn hex_mass_single_element_dofs() {
        let cfg = BenchConfig { op: BenchOp::Mass, strategies: vec![StrategyId::StdMat], ..quick() };
        let r = run_bench(&cfg).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].ndof, 27);
        assert!(r[0].dof_per_s > 0.0);
        assert_eq!(r[0].raw.len(), 3);
        assert_eq!(r[0].form, None);
    }

    #[test]
    fn tet_helmholtz_counts() {
        let cfg = BenchConfig { shapes: vec![ShapeType::Tet], orders: (3, 3), ..quick() };
        let r = &run_bench(&cfg).unwrap()[0];
        assert_eq!((r.n_modes, r.n_points), (20, 80));
        assert_eq!(r.form, Some(HelmholtzForm::Coll));
    }

    #[test]
    fn csv_layout() {
        let cfg = BenchConfig { shapes: vec![ShapeType::Quad], nelem: vec![3], ..quick() };
        let r = run_bench(&cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        let f: Vec<_> = lines[1].split(',').collect();
        assert_eq!(f.len(), 11);
        assert_eq!(&f[..8], &["helmholtz", "quad", "2", "sumfac", "regular", "coll", "3", "27"]);
        assert!(f[9].parse::<f64>().unwrap() > 0.0);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
