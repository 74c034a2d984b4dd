//! The binning machinery on its own: sample partition sets, hunt for one
//! that is good for a code's failure table, and check the conditional
//! failure-probability bound that powers the whole construction.
//!
//! ```bash
//! cargo run -p zerrnet --example partition_search
//! ```

use zerrnet::binning::{
    claim31_exact_check, delta_of_epsilon, estimate_good_probability, sample_partition_set,
    search_good_partition, Mode,
};
use zerrnet::code::exact_error;
use zerrnet::samples;
use zerrnet::DEFAULT_BUDGET;

fn main() -> zerrnet::Result<()> {
    // failure table of a 3/16-error code on two co-located 2-bit sources
    let (inst, code) = samples::colocated_pair(2);
    let bad = samples::corrupt_decoder(&code, "t", 3, 5);
    let (report, table) = exact_error(&inst, &bad)?;
    println!(
        "failure table: {} of {} tuples fail",
        report.failing_tuples, report.total_tuples
    );

    // a raw sample, then a search in both witness modes
    let p = sample_partition_set(table.k, table.source_bits, 1, 99)?;
    println!(
        "sampled partitions: {} cells of {} per source, invariants {:?}",
        p.num_cells(),
        p.cell_size(),
        p.check_invariants()
    );
    for mode in [Mode::Full, Mode::Diagonal] {
        let found = search_good_partition(&table, 1, 100, 17, mode, DEFAULT_BUDGET)?;
        println!(
            "{mode} search: good partition after {} attempts: {}",
            found.attempts_used,
            found.partition.is_some()
        );
    }

    // how common are good partition sets at these parameters?
    for mode in [Mode::Full, Mode::Diagonal] {
        let est = estimate_good_probability(&table, 1, 2000, 3, mode, DEFAULT_BUDGET)?;
        println!(
            "{mode}: {} of {} sampled partition sets are good",
            est.good, est.trials
        );
    }

    // the conditional bound behind the diagonal analysis, checked exactly
    // on one realization: fix one cell-mate per source, condition on it
    let check = claim31_exact_check(&table, 1, 0, &[vec![2], vec![3]], DEFAULT_BUDGET)?;
    println!(
        "conditional failure probability {} <= bound {} : {}",
        check.exact, check.bound, check.holds
    );

    // the asymptotic rate-loss formula is advisory at desk scale
    let d = delta_of_epsilon(&report.epsilon, &bad.rate, bad.n)?;
    println!(
        "asymptotic delta({}) = {:.4}, usable: {}",
        report.epsilon, d.delta, d.in_range
    );
    Ok(())
}
