//! Build the butterfly network, validate it, run the XOR code on one source
//! tuple, and measure its exact error probability.
//!
//! ```bash
//! cargo run -p zerrnet --example validate_and_evaluate
//! ```

use zerrnet::code::{estimate_error, evaluate, exact_error};
use zerrnet::instance::{topological_order, validate_instance};
use zerrnet::samples;

fn main() -> zerrnet::Result<()> {
    let (inst, code) = samples::butterfly_xor();

    let violations = validate_instance(&inst);
    println!("violations: {violations:?}");
    assert!(violations.is_empty());

    println!("topological order: {:?}", topological_order(&inst)?);

    // one forward pass: x1 = 0, x2 = 1
    let eval = evaluate(&inst, &code, &[0, 1])?;
    println!("bottleneck symbol: {}", eval.edge_symbols["u->v"]);
    for (terminal, decoded) in &eval.terminal_outputs {
        println!("terminal {terminal} decodes {decoded:?}");
    }

    // the XOR code is zero-error; the exact measurement confirms it
    let (report, _table) = exact_error(&inst, &code)?;
    println!(
        "exact error: {} ({} of {} tuples fail)",
        report.epsilon, report.failing_tuples, report.total_tuples
    );

    // corrupt one decoder entry and re-measure, exactly and by sampling
    let bad = samples::corrupt_decoder(&code, "d1", 1, 7);
    let (report, _) = exact_error(&inst, &bad)?;
    println!(
        "after corrupting one decoder entry: epsilon = {}",
        report.epsilon
    );
    let est = estimate_error(&inst, &bad, 10_000, 42)?;
    println!(
        "monte carlo: {} failures over {} trials (estimate {})",
        est.failures, est.trials, est.estimate
    );
    Ok(())
}
