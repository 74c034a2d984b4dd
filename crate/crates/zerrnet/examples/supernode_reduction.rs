//! The supernode variant of the zero-error transform, for sources that are
//! not co-located: fresh source nodes feed both the old hosts and a
//! super-node, the super-node squeezes one shared within-cell position
//! through a narrow bottleneck, and every old host reconstructs its
//! pre-encoded symbol locally.
//!
//! ```bash
//! cargo run -p zerrnet --example supernode_reduction
//! ```

use zerrnet::code::exact_error;
use zerrnet::instance::build_supernode_extension;
use zerrnet::rat::Rational;
use zerrnet::samples;
use zerrnet::transform::{lift_code_to_extension, zero_error_transform_supernode, SearchParams};

fn main() -> zerrnet::Result<()> {
    // the butterfly's sources live at different nodes
    let (inst, code) = samples::butterfly_xor();
    let (report, _) = exact_error(&inst, &code)?;
    println!(
        "base: {} nodes, exact error {}",
        inst.nodes.len(),
        report.epsilon
    );

    // bottleneck capacity 1 bit at n = 1
    let ext = build_supernode_extension(&inst, &code.rate, &Rational::one())?;
    println!(
        "extension: {} nodes, {} edges, bottleneck {:?}",
        ext.instance.nodes.len(),
        ext.instance.edges.len(),
        ext.layout.bottleneck_edge
    );

    // lifting changes nothing about failure behavior
    let lifted = lift_code_to_extension(&ext, &code)?;
    let (lift_report, _) = exact_error(&ext.instance, &lifted)?;
    println!("lifted code error: {}", lift_report.epsilon);

    // with a zero-error input, cells of size 1 suffice and the bottleneck
    // carries a constant position
    let (zec, report) = zero_error_transform_supernode(&ext, &code, 0, &SearchParams::default())?;
    println!(
        "supernode transform: error {} -> {}, rate {} -> {}",
        report.input.epsilon, report.output.epsilon, report.input.rate, report.output.rate
    );
    println!(
        "all bottleneck/relay symbols within the position alphabet: {:?}",
        report.verification.link_symbols_in_range
    );

    let (verify, _) = exact_error(&ext.instance, &zec.code)?;
    assert!(verify.epsilon.is_zero());
    println!("verified: zero failing tuples on the extension");
    Ok(())
}
