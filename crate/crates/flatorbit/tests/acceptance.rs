//! Acceptance criteria 1 to 11, one line each.
//!
//! Criterion 10 carries one known failure: the covariance residual is already
//! at the roundoff floor on the coarse grid because the discretization is
//! covariant for on-grid shifts, so its convergence slope cannot match the
//! nominal order. That sub-check is reported as failing and the run only
//! accepts it when both residuals are at roundoff level.

use std::process::ExitCode;
use std::time::Instant;

use flatorbit::numeric::{self, seed_from_env};
use flatorbit::suite::{self, CriterionResult};

const ROUNDOFF: f64 = 1e-10;

fn known_failure(r: &CriterionResult) -> Option<String> {
    if r.id != 10 || !r.within_budget() {
        return None;
    }
    let failing: Vec<_> = r.failing().map(|c| c.name.as_str()).collect();
    if failing != ["covariance_slope"] {
        return None;
    }
    let (_, m) = numeric::covariance_slope(128).ok()?;
    (m.coarse < ROUNDOFF && m.fine < ROUNDOFF)
        .then(|| format!("covariance residual at roundoff floor ({:.2e}, {:.2e}); slope {:.2} undefined", m.coarse, m.fine, m.slope))
}

fn main() -> ExitCode {
    let seed = seed_from_env();
    println!("acceptance suite (seed {seed:#x})");
    let start = Instant::now();
    let mut unexpected = Vec::new();
    for id in 1..=11 {
        let r = suite::run(id, seed);
        println!("{}", r.line());
        if !r.passed() {
            match known_failure(&r) {
                Some(why) => println!("        known failure: {why}"),
                None => unexpected.push(id),
            }
        }
    }
    println!("total {:.2} s", start.elapsed().as_secs_f64());
    if unexpected.is_empty() {
        println!("acceptance: all criteria pass apart from the documented covariance slope");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
