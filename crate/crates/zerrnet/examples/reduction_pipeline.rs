//! The reduction chain connecting error reduction and edge removal:
//! (a) lift the code onto a supernode extension, (b) make the extension
//! zero-error through the narrow bottleneck, (c) remove the bottleneck and
//! repair with a pluggable strategy, (d) project back onto the original
//! instance. Each step's error claim is re-measured exhaustively.
//!
//! ```bash
//! cargo run -p zerrnet --example reduction_pipeline
//! ```

use zerrnet::samples;
use zerrnet::transform::{
    reduction_pipeline, AlwaysFailStrategy, IdentityStrategy, PipelineOptions, PipelineOutcome,
};

fn print_run(label: &str, run: &zerrnet::transform::PipelineRun) {
    println!("{label}:");
    for stage in &run.stages {
        println!(
            "  step {} ({}): epsilon {}, rate {}, verified {}",
            stage.report.step,
            stage.report.description,
            stage.report.epsilon,
            stage.report.rate,
            stage.report.verified
        );
    }
    match &run.outcome {
        PipelineOutcome::Completed => println!("  -> completed"),
        PipelineOutcome::Halted { step, reason } => {
            println!("  -> halted at step {step}: {reason}")
        }
    }
}

fn main() -> zerrnet::Result<()> {
    // a zero-error toy sails through: the bottleneck never carries anything
    // the old hosts need, so dropping it is free
    let (inst, code) = samples::single_edge_identity(2);
    let options = PipelineOptions {
        cell_bits: 0,
        seed: 5,
        ..PipelineOptions::default()
    };
    let run = reduction_pipeline(&inst, &code, &options, &IdentityStrategy)?;
    print_run("identity strategy on a zero-error toy", &run);
    assert_eq!(run.outcome, PipelineOutcome::Completed);

    // a strategy that always refuses halts the chain with attribution
    let run = reduction_pipeline(&inst, &code, &options, &AlwaysFailStrategy)?;
    print_run("always-fail strategy", &run);

    // with real error the chain reaches step (c) carrying a bottleneck the
    // code genuinely uses; whether identity repair goes through depends on
    // whether the found partition needed varying cell positions
    let (inst, code) = samples::colocated_pair(2);
    let bad = samples::corrupt_decoder(&code, "t", 3, 1);
    let options = PipelineOptions {
        cell_bits: 1,
        seed: 1,
        attempts: 500,
        ..PipelineOptions::default()
    };
    let run = reduction_pipeline(&inst, &bad, &options, &IdentityStrategy)?;
    print_run("identity strategy on a 3/16-error input", &run);
    Ok(())
}
