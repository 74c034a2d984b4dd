//! Stretch a code to larger blocklengths without losing its error
//! guarantee: run it over c' rounds and protect each source's round
//! sequence with an outer code of minimum distance ceil(4 eps c') + 1, so
//! up to 2 eps c' misdecoded rounds are always corrected.
//!
//! ```bash
//! cargo run -p zerrnet --example blocklength_extension
//! ```

use zerrnet::outer::extend_blocklength;
use zerrnet::samples;

fn main() -> zerrnet::Result<()> {
    // a 4-bit source with one corrupted decoder row: eps = 1/16
    let (inst, code) = samples::single_edge_identity(4);
    let bad = samples::corrupt_decoder(&code, "t", 1, 3);

    // 16 rounds: required distance ceil(4) + 1 = 5, radius 2
    let out = extend_blocklength(&inst, &bad, 16, 5, 10_000)?;
    let report = &out.report;
    assert!(!report.refused);
    println!(
        "inner error {}, rounds {}, required outer distance {}",
        report.inner_epsilon, report.rounds, report.required_distance
    );
    println!(
        "outer code: {} codewords over [16], rate {:.4} (asymptotic target {:.4})",
        report.codewords.unwrap(),
        report.outer_rate.unwrap(),
        report.rate_bound_sqrt
    );
    let mc = report.monte_carlo.as_ref().unwrap();
    println!(
        "monte carlo: {} failures over {} trials; {} trials stayed within \
         the radius and none of them failed ({} violations)",
        mc.failures, mc.trials, mc.protected_trials, mc.protected_failures
    );
    assert_eq!(mc.protected_failures, 0);

    // push the error up and the required distance stops fitting: the
    // builder refuses and reports the rate bounds instead
    let worse = samples::corrupt_decoder(&code, "t", 4, 3); // eps = 1/4
    let out = extend_blocklength(&inst, &worse, 16, 5, 100)?;
    assert!(out.report.refused);
    println!(
        "eps = {}: refused ({}); bound 1 - 5 sqrt(eps) = {:.3}",
        out.report.inner_epsilon,
        out.report.refusal_reason.as_deref().unwrap_or("?"),
        out.report.rate_bound_sqrt
    );
    Ok(())
}
