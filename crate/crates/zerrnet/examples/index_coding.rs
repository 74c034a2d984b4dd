//! Index coding: k sources feed one bottleneck, every terminal hears the
//! bottleneck plus some direct side edges. The zero-error transform runs
//! the pre-encoding at the bottleneck encoder and appends the shared
//! within-cell position to its message, so the bottleneck widens from n to
//! n + deltaRn bits while the side edges carry the new symbols verbatim.
//!
//! ```bash
//! cargo run -p zerrnet --example index_coding
//! ```

use zerrnet::binning::Mode;
use zerrnet::code::exact_error;
use zerrnet::instance::{build_index_coding_instance, IndexCodingSpec};
use zerrnet::samples;
use zerrnet::transform::{index_coding_transform, SearchParams};

fn main() -> zerrnet::Result<()> {
    // two sources, cross side information, each terminal wants "its" source
    let spec = IndexCodingSpec {
        k: 2,
        side_edges: [(0, 1), (1, 0)].into_iter().collect(),
        requirement: vec![vec![1, 0], vec![0, 1]],
    };
    let inst = build_index_coding_instance(&spec)?;
    println!(
        "template: {} nodes, {} edges, all capacity 1",
        inst.nodes.len(),
        inst.edges.len()
    );

    // the XOR code at 2 bits per source, with two corrupted decoder rows
    let (_, code) = samples::index_coding_xor(2)?;
    let bad = samples::corrupt_decoder(&code, "t2", 2, 3);
    let (before, _) = exact_error(&inst, &bad)?;
    println!(
        "input code: blocklength {}, rate {}, exact error {}",
        bad.n, bad.rate, before.epsilon
    );

    let params = SearchParams {
        attempts: 200,
        seed: 5,
        mode: Mode::Diagonal,
        budget: zerrnet::DEFAULT_BUDGET,
    };
    let (zec, report, inst) = index_coding_transform(&spec, &bad, 1, &params)?;
    println!(
        "output code: blocklength {} (bottleneck width {:?} bits), rate {}, error {}",
        zec.code.n, report.verification.bottleneck_bits, zec.code.rate, report.output.epsilon
    );
    println!(
        "side edges carry the new symbols verbatim: {:?}",
        report.verification.side_edges_verbatim
    );
    println!(
        "asymptotic widened blocklength for comparison: {:?}",
        report.asymptotic_blocklength
    );

    let (verify, _) = exact_error(&inst, &zec.code)?;
    assert!(verify.epsilon.is_zero());
    println!("verified: zero failing tuples at the widened blocklength");
    Ok(())
}
