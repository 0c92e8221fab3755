use std::fmt;
use std::io::Write;
use std::str::FromStr;

use speckern_core::shapes::ShapeType;

use crate::bench::run_bench;
use crate::config::BenchConfig;
use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Geometry,
    Form,
    Strategy,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Geometry => "geometry",
            Axis::Form => "form",
            Axis::Strategy => "strategy",
        }
    }
}

impl FromStr for Axis {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "geometry" => Ok(Axis::Geometry),
            "form" => Ok(Axis::Form),
            "strategy" => Ok(Axis::Strategy),
            o => Err(BenchError::Config(format!("cannot vary '{o}'; use geometry, form or strategy"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub axis: Axis,
    /// values of the varied axis in A and B
    pub label_a: String,
    pub label_b: String,
    pub shape: ShapeType,
    pub order: usize,
    pub nelem: usize,
    pub dof_per_s_a: f64,
    pub dof_per_s_b: f64,
    /// B/A
    pub ratio: f64,
}

impl fmt::Display for CompareRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{:.6e},{:.6e},{:.4}",
            self.axis.name(),
            self.label_a,
            self.label_b,
            self.shape,
            self.order,
            self.nelem,
            self.dof_per_s_a,
            self.dof_per_s_b,
            self.ratio
        )
    }
}

pub fn write_compare(rows: &[CompareRow], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "axis,a,b,shape,P,nelem,dof_per_s_a,dof_per_s_b,ratio_b_over_a")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

/// Copies of `base` with `axis` set to `a` and `b`.
pub fn vary(base: &BenchConfig, axis: Axis, a: &str, b: &str) -> Result<(BenchConfig, BenchConfig)> {
    let (mut ca, mut cb) = (base.clone(), base.clone());
    ca.set(axis.name(), a)?;
    cb.set(axis.name(), b)?;
    Ok((ca, cb))
}

fn differing_axis(a: &BenchConfig, b: &BenchConfig) -> Result<Axis> {
    let mut rest_b = b.clone();
    let mut axes = Vec::new();
    if a.geometry != b.geometry {
        axes.push(Axis::Geometry);
        rest_b.geometry = a.geometry;
    }
    if a.form != b.form {
        axes.push(Axis::Form);
        rest_b.form = a.form;
    }
    if a.strategies != b.strategies {
        axes.push(Axis::Strategy);
        rest_b.strategies = a.strategies.clone();
    }
    if rest_b != *a {
        return Err(BenchError::Config("configurations differ outside geometry, form and strategy".into()));
    }
    match axes.as_slice() {
        [] => Err(BenchError::Config("configurations are identical: axes equal".into())),
        [x] => Ok(*x),
        _ => Err(BenchError::Config("configurations differ in more than one axis".into())),
    }
}

fn axis_label(c: &BenchConfig, axis: Axis, strategy_idx: usize) -> String {
    match axis {
        Axis::Geometry => c.geometry.to_string(),
        Axis::Form => c.form.map_or("default".into(), |f| f.name().to_string()),
        Axis::Strategy => c.strategies[strategy_idx].name().to_string(),
    }
}

/// Throughput ratios B/A per (shape, P, nelem, strategy position).
pub fn run_compare(a: &BenchConfig, b: &BenchConfig) -> Result<Vec<CompareRow>> {
    let axis = differing_axis(a, b)?;
    if a.strategies.len() != b.strategies.len() {
        return Err(BenchError::Config("strategy lists must have the same length".into()));
    }
    let (ra, rb) = (run_bench(a)?, run_bench(b)?);
    let ns = a.strategies.len();
    Ok(ra
        .iter()
        .zip(&rb)
        .enumerate()
        .map(|(i, (x, y))| CompareRow {
            axis,
            label_a: axis_label(a, axis, i % ns),
            label_b: axis_label(b, axis, i % ns),
            shape: x.shape,
            order: x.order,
            nelem: x.nelem,
            dof_per_s_a: x.dof_per_s,
            dof_per_s_b: y.dof_per_s,
            ratio: y.dof_per_s / x.dof_per_s,
        })
        .collect())
}
