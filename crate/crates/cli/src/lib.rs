//! Command-line front end for `convan`.
//!
//! [`JobSpec::parse_from`] validates an argument list; [`run`] executes it
//! and returns the process exit code: 0 on success, 1 when the computation
//! fails, 2 on usage errors.

mod job;
mod run;
mod selftest;

pub use job::{CouponForm, FnSource, GraphMap, GraphSource, JobSpec, Kind, Task, UsageError, VolumeDim, TOL_ENV};
pub use run::{execute, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses an argument list (without the program name).
pub fn parse_args<I, T>(argv: I) -> Result<JobSpec, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    JobSpec::parse_from(argv)
}

/// Executes a job, writes its outputs and report, and returns the exit code.
/// Errors go to stderr. A self-test with failures exits 1.
pub fn run(job: &JobSpec) -> i32 {
    let result = execute(job).and_then(|body| {
        let failed = body.get("failed").and_then(|v| v.as_u64()).unwrap_or(0);
        run::emit(job, body)?;
        Ok(failed)
    });
    match result {
        Ok(0) => EXIT_OK,
        Ok(_) => EXIT_COMPUTE,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_COMPUTE
        }
    }
}

/// Full command-line entry: parse, then run.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(job) => run(&job),
        Err(UsageError::Clap(e)) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("run `convan help` for usage");
            EXIT_USAGE
        }
    }
}
