//! Runner for checks that report one line each instead of going through
//! the libtest harness.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

/// Outcome of one check: a detail line on success, the reason on failure.
pub type Outcome = Result<String, String>;

#[derive(Default)]
pub struct Runner {
    results: Vec<(String, bool)>,
}

impl Runner {
    /// Run `f`, treating a panic as a failure, and print one line.
    pub fn run(&mut self, id: &str, title: &str, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        let secs = fmt_secs(start.elapsed());
        let (tag, detail) = match &out {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {id:<3} {tag}  {title} ({secs}): {detail}");
        self.results.push((id.to_string(), out.is_ok()));
    }

    /// Print the tally and return the process exit code.
    pub fn finish(self) -> i32 {
        let failed: Vec<&str> = self.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
        println!("acceptance: {}/{} pass", self.results.len() - failed.len(), self.results.len());
        if failed.is_empty() {
            0
        } else {
            println!("acceptance: failing {}", failed.join(", "));
            1
        }
    }
}

fn fmt_secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

/// Fail with `msg` unless `cond` holds.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
