use std::fmt;
use std::path::Path;
use std::str::FromStr;

use speckern_core::field_block::check_width;
use speckern_core::geometry::{GeometryClass, DEFAULT_DEFORM_AMP};
use speckern_core::operators::{HelmholtzForm, OperatorKind, StrategyId};
use speckern_core::shapes::ShapeType;

use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchOp {
    Mass,
    Helmholtz,
    BwdTrans,
}

impl BenchOp {
    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Mass => "mass",
            BenchOp::Helmholtz => "helmholtz",
            BenchOp::BwdTrans => "bwdtrans",
        }
    }

    pub fn kind(self, form: HelmholtzForm) -> OperatorKind {
        match (self, form) {
            (BenchOp::Mass, _) => OperatorKind::Mass,
            (BenchOp::BwdTrans, _) => OperatorKind::BwdTrans,
            (BenchOp::Helmholtz, HelmholtzForm::Coll) => OperatorKind::HelmholtzColl,
            (BenchOp::Helmholtz, HelmholtzForm::NonColl) => OperatorKind::HelmholtzNonColl,
        }
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchOp {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mass" | "bk1" => Ok(BenchOp::Mass),
            "helmholtz" | "bk3" => Ok(BenchOp::Helmholtz),
            "bwdtrans" | "bwd" => Ok(BenchOp::BwdTrans),
            o => Err(BenchError::Config(format!("unknown operator '{o}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub op: BenchOp,
    pub shapes: Vec<ShapeType>,
    /// inclusive
    pub orders: (usize, usize),
    pub nelem: Vec<usize>,
    pub strategies: Vec<StrategyId>,
    pub geometry: GeometryClass,
    /// None: each strategy's default form
    pub form: Option<HelmholtzForm>,
    pub lambda: f64,
    pub simd_width: Option<usize>,
    pub qpoints: Option<Vec<usize>>,
    pub reps: usize,
    pub warmup: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    /// seconds per timed batch
    pub min_time: f64,
    pub deform_amp: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            op: BenchOp::Helmholtz,
            shapes: vec![ShapeType::Hex],
            orders: (1, 7),
            nelem: vec![4096],
            strategies: vec![StrategyId::SumFac],
            geometry: GeometryClass::Regular,
            form: None,
            lambda: 1.0,
            simd_width: None,
            qpoints: None,
            reps: 5,
            warmup: 1,
            seed: 1,
            threads: None,
            min_time: 0.05,
            deform_amp: DEFAULT_DEFORM_AMP,
        }
    }
}

fn cfg_err(e: impl fmt::Display) -> BenchError {
    BenchError::Config(e.to_string())
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse::<T>().map_err(cfg_err)).collect()
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| BenchError::Config(format!("bad value '{v}' for {key}")))
}

/// `a..b` (inclusive) or a single order.
pub fn parse_order_range(s: &str) -> Result<(usize, usize)> {
    let s = s.trim();
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num("order", a)?, num("order", b.trim_start_matches('='))?),
        None => {
            let p = num("order", s)?;
            (p, p)
        }
    };
    if a == 0 || a > b {
        return Err(BenchError::Config(format!("order range '{s}' is empty or starts at 0")));
    }
    Ok((a, b))
}

impl BenchConfig {
    /// Set one option by its flag name (without dashes).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "op" => self.op = v.parse()?,
            "shape" | "shapes" => self.shapes = list(v)?,
            "order" | "orders" => self.orders = parse_order_range(v)?,
            "nelem" => self.nelem = list(v)?,
            "strategy" | "strategies" => self.strategies = list(v)?,
            "geometry" => self.geometry = v.parse().map_err(cfg_err)?,
            "form" => self.form = Some(v.parse().map_err(cfg_err)?),
            "lambda" => self.lambda = num(key, v)?,
            "simd-width" => self.simd_width = Some(num(key, v)?),
            "qpoints" => self.qpoints = Some(list(v)?),
            "reps" => self.reps = num(key, v)?,
            "warmup" => self.warmup = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "threads" => self.threads = Some(num(key, v)?),
            "min-time" => self.min_time = num(key, v)?,
            "deform-amp" => self.deform_amp = num(key, v)?,
            k => return Err(BenchError::Config(format!("unknown option '{k}'"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {}: expected key=value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.shapes.is_empty() || self.nelem.is_empty() || self.strategies.is_empty() {
            return bad("shape, nelem and strategy lists must be nonempty");
        }
        if self.orders.0 == 0 || self.orders.0 > self.orders.1 {
            return bad("order range is empty");
        }
        if self.nelem.contains(&0) {
            return bad("nelem entries must be positive");
        }
        if self.reps < 3 {
            return bad("--reps must be at least 3");
        }
        if !(self.lambda >= 0.0) {
            return bad("--lambda must be non-negative");
        }
        if !(self.min_time > 0.0) {
            return bad("--min-time must be positive");
        }
        if !(0.0..=0.1).contains(&self.deform_amp) {
            return bad("--deform-amp must lie in [0, 0.1]");
        }
        if let Some(w) = self.simd_width {
            check_width(w)?;
        }
        if let Some(s) = self.strategies.iter().find(|s| !StrategyId::IMPLEMENTED.contains(s)) {
            return Err(BenchError::Core(speckern_core::Error::UnsupportedStrategy(s.name().into())));
        }
        if let Some(q) = &self.qpoints {
            if self.shapes.iter().any(|s| s.dim() != q.len()) {
                return bad("--qpoints needs one count per direction of every shape");
            }
        }
        if self.threads == Some(0) {
            return bad("--threads must be at least 1");
        }
        Ok(())
    }

    pub fn form_for(&self, s: StrategyId) -> HelmholtzForm {
        self.form.unwrap_or(s.default_form())
    }
}
