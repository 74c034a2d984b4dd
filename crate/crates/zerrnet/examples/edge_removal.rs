//! Remove an edge from a working code: among the source tuples the code
//! decodes correctly, some value is carried on the edge with probability at
//! least 2^-width; hard-coding that value downstream keeps exactly those
//! tuples working. The re-measured error is compared against the averaging
//! bound eps' + (1 - eps')(1 - 2^-width).
//!
//! ```bash
//! cargo run -p zerrnet --example edge_removal
//! ```

use zerrnet::samples;
use zerrnet::transform::{best_fixed_value, edge_removal_transform};
use zerrnet::DEFAULT_BUDGET;

fn main() -> zerrnet::Result<()> {
    let (inst, code) = samples::butterfly_xor();

    // what does the bottleneck carry when decoding succeeds?
    let fv = best_fixed_value(&inst, &code, "u->v", DEFAULT_BUDGET)?;
    println!(
        "bottleneck: best value {} with conditional probability {} (floor {})",
        fv.value, fv.conditional_probability, fv.floor
    );

    let outcome = edge_removal_transform(&inst, &code, "u->v", DEFAULT_BUDGET)?;
    let r = &outcome.report;
    println!(
        "removing the bottleneck: error {} -> {}",
        r.epsilon_in, r.epsilon_out
    );
    println!(
        "averaging bound {} holds: {}; sharper bound {} holds: {}",
        r.bound, r.bound_holds, r.tight_bound, r.tight_bound_holds
    );
    assert!(r.bound_holds);

    // removing a direct edge instead
    let outcome = edge_removal_transform(&inst, &code, "s1->t1", DEFAULT_BUDGET)?;
    let r = &outcome.report;
    println!(
        "removing s1->t1: error {} -> {} (bound {})",
        r.epsilon_in, r.epsilon_out, r.bound
    );
    assert!(r.bound_holds);
    Ok(())
}
