use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use speckern_bench::{
    parse_order_range, run_bench, run_compare, run_verify, vary, write_compare, write_csv, write_raw, Axis, BenchConfig,
    BenchError, Result, VerifyOp, VerifyScope,
};

#[derive(Parser)]
#[command(name = "speckern", version, about = "Throughput benchmark and verification for matrix-free spectral/hp element operators")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Time operator applications and report DOF/s as CSV
    Bench(Common),
    /// Check every strategy against dense elemental matrices
    Verify(Common),
    /// Throughput ratios between two configurations differing in one axis
    Compare {
        #[command(flatten)]
        common: Common,
        /// Axis and its two values, e.g. form=noncoll,coll
        #[arg(long, value_name = "AXIS=A,B")]
        vary: String,
    },
}

#[derive(Args, Default)]
struct Common {
    /// key=value file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// mass, helmholtz or bwdtrans
    #[arg(long)]
    op: Option<String>,
    /// Comma-separated shapes (quad,tri,hex,prism,pyr,tet)
    #[arg(long)]
    shape: Option<String>,
    /// Polynomial order range a..b (inclusive) or a single order
    #[arg(long)]
    order: Option<String>,
    /// Comma-separated element counts
    #[arg(long)]
    nelem: Option<String>,
    /// Comma-separated strategies (stdmat, stdmat-grouped, sumfac)
    #[arg(long)]
    strategy: Option<String>,
    /// regular or deformed
    #[arg(long)]
    geometry: Option<String>,
    /// Helmholtz formulation: coll or noncoll
    #[arg(long)]
    form: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    /// Elements per interleaved group (1, 2, 4, 8 or 16)
    #[arg(long)]
    simd_width: Option<String>,
    /// Quadrature points per direction, comma-separated
    #[arg(long)]
    qpoints: Option<String>,
    /// Timed repetitions (at least 3)
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    warmup: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads; falls back to SPECKERN_THREADS
    #[arg(long)]
    threads: Option<String>,
    /// Minimum seconds per timed batch
    #[arg(long)]
    min_time: Option<String>,
    /// Amplitude of the sinusoidal deformation, at most 0.1
    #[arg(long)]
    deform_amp: Option<String>,
    /// Also write CSV to this path
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Dump per-repetition timings
    #[arg(long)]
    raw: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl Common {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let opts: [(&'static str, &Option<String>); 16] = [
            ("op", &self.op),
            ("shape", &self.shape),
            ("order", &self.order),
            ("nelem", &self.nelem),
            ("strategy", &self.strategy),
            ("geometry", &self.geometry),
            ("form", &self.form),
            ("lambda", &self.lambda),
            ("simd-width", &self.simd_width),
            ("qpoints", &self.qpoints),
            ("reps", &self.reps),
            ("warmup", &self.warmup),
            ("seed", &self.seed),
            ("threads", &self.threads),
            ("min-time", &self.min_time),
            ("deform-amp", &self.deform_amp),
        ];
        opts.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }

    /// defaults < config file < SPECKERN_THREADS < flags
    fn bench_config(&self) -> Result<BenchConfig> {
        let mut c = BenchConfig::default();
        if let Some(p) = &self.config {
            c.apply_file(p)?;
        }
        if let Ok(t) = std::env::var("SPECKERN_THREADS") {
            if !t.trim().is_empty() {
                c.set("threads", &t)?;
            }
        }
        for (k, v) in self.pairs() {
            if k == "lambda" && v.contains(',') {
                return Err(BenchError::Config("bench takes a single --lambda".into()));
            }
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    fn verify_scope(&self) -> Result<VerifyScope> {
        let mut s = VerifyScope::default();
        // reuse the shared parser for list-valued options
        let mut c = BenchConfig { shapes: s.shapes.clone(), strategies: s.strategies.clone(), ..BenchConfig::default() };
        if let Some(p) = &self.config {
            c.apply_file(p)?;
        }
        if let Ok(t) = std::env::var("SPECKERN_THREADS") {
            if !t.trim().is_empty() {
                c.set("threads", &t)?;
            }
        }
        for (k, v) in self.pairs() {
            match k {
                "op" => s.ops = v.split(',').map(|o| o.parse()).collect::<Result<Vec<VerifyOp>>>()?,
                "order" => s.orders = parse_order_range(v)?,
                "lambda" => {
                    s.lambdas = v
                        .split(',')
                        .map(|x| x.trim().parse().map_err(|_| BenchError::Config(format!("bad lambda '{x}'"))))
                        .collect::<Result<_>>()?
                }
                "nelem" => {
                    s.nelem = v.trim().parse().map_err(|_| BenchError::Config("verify takes a single --nelem".into()))?
                }
                _ => c.set(k, v)?,
            }
        }
        if self.geometry.is_some() {
            s.geometries = vec![c.geometry];
        }
        s.shapes = c.shapes;
        s.strategies = c.strategies;
        s.seed = c.seed;
        s.threads = c.threads;
        if let Some(w) = c.simd_width {
            speckern_core::field_block::check_width(w)?;
            s.width = w;
        }
        s.inject_fault = self.inject_fault;
        Ok(s)
    }
}

fn raw_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map_or("bench".into(), |s| s.to_string_lossy().into_owned());
    csv.with_file_name(format!("{stem}.raw.csv"))
}

fn bench(c: &Common) -> Result<()> {
    let cfg = c.bench_config()?;
    let records = run_bench(&cfg)?;
    let stdout = io::stdout();
    write_csv(&records, stdout.lock())?;
    if let Some(p) = &c.csv {
        write_csv(&records, BufWriter::new(File::create(p)?))?;
    }
    if c.raw {
        match &c.csv {
            Some(p) => write_raw(&records, BufWriter::new(File::create(raw_path(p))?))?,
            None => {
                writeln!(stdout.lock())?;
                write_raw(&records, stdout.lock())?
            }
        }
    }
    Ok(())
}

fn verify(c: &Common) -> Result<()> {
    let scope = c.verify_scope()?;
    let report = run_verify(&scope)?;
    report.write(io::stdout().lock())?;
    if let Some(p) = &c.csv {
        report.write(BufWriter::new(File::create(p)?))?;
    }
    if !report.passed() {
        let n = report.failures().count();
        return Err(BenchError::Verification(format!("{n} of {} cases exceed tolerance", report.cases.len())));
    }
    Ok(())
}

fn compare(c: &Common, arg: &str) -> Result<()> {
    let bad = || BenchError::Config(format!("--vary expects AXIS=A,B, got '{arg}'"));
    let (axis, vals) = arg.split_once('=').ok_or_else(bad)?;
    let (a, b) = vals.split_once(',').ok_or_else(bad)?;
    let axis: Axis = axis.parse()?;
    let base = c.bench_config()?;
    let (ca, cb) = vary(&base, axis, a, b)?;
    ca.validate()?;
    cb.validate()?;
    let rows = run_compare(&ca, &cb)?;
    write_compare(&rows, io::stdout().lock())?;
    if let Some(p) = &c.csv {
        write_compare(&rows, BufWriter::new(File::create(p)?))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Bench(c) => bench(c),
        Cmd::Verify(c) => verify(c),
        Cmd::Compare { common, vary } => compare(common, vary),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("speckern: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
