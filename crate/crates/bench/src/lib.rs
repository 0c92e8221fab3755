//! Benchmark, verification and comparison drivers behind the `speckern`
//! binary.

mod bench;
mod compare;
mod config;
mod verify;

pub use bench::{run_bench, write_csv, write_raw, BenchRecord, CSV_HEADER};
pub use compare::{run_compare, vary, write_compare, Axis, CompareRow};
pub use config::{parse_order_range, BenchConfig, BenchOp};
pub use verify::{run_verify, VerifyCase, VerifyOp, VerifyReport, VerifyScope};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] speckern_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl BenchError {
    /// 1 for numerical disagreement, 2 for anything the user can fix in
    /// the invocation.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Verification(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

/// Run `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(BenchError::Config("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| BenchError::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
