//! Acceptance suite: every criterion runs exhaustively at its stated
//! tolerance (exact rational comparison unless noted) and prints one
//! pass/fail line. Run with `cargo test -p zerrnet --test acceptance`
//! (add `-- --nocapture` to see the lines).

use std::time::Instant;

use zerrnet::binning::{
    claim31_exact_check, enumerate_partition_shapes, estimate_good_probability, Mode, PartitionSet,
};
use zerrnet::code::{exact_error, FailureTable, NetworkCode};
use zerrnet::instance::{build_index_coding_instance, IndexCodingSpec, NetworkInstance};
use zerrnet::outer::{
    extend_blocklength, gv_greedy_code, hamming, min_distance, nearest_codeword_decode,
    permute_coordinates,
};
use zerrnet::rat::Rational;
use zerrnet::rng::substream;
use zerrnet::samples;
use zerrnet::transform::{
    best_fixed_value, edge_removal_transform, reduction_pipeline, zero_error_transform_colocated,
    IdentityStrategy, PipelineOptions, PipelineOutcome, SearchParams,
};
use zerrnet::tuple::TupleSpace;
use zerrnet::DEFAULT_BUDGET;

use rand::Rng;

struct CatalogEntry {
    name: &'static str,
    inst: NetworkInstance,
    code: NetworkCode,
    cell_bits: u32,
    seed: u64,
}

/// Co-located-source instances with injected-error codes, k <= 2 and
/// Rn <= 4, measured errors between 1/16 and 1/2.
fn catalog() -> Vec<CatalogEntry> {
    let entry = |name,
                 (inst, code): (NetworkInstance, NetworkCode),
                 terminal: &str,
                 corrupt: usize,
                 cell_bits: u32,
                 seed: u64| {
        let code = samples::corrupt_decoder(&code, terminal, corrupt, 1000 + seed);
        CatalogEntry {
            name,
            inst,
            code,
            cell_bits,
            seed,
        }
    };
    vec![
        entry(
            "k1 Rn1 eps 1/2",
            samples::single_edge_identity(1),
            "t",
            1,
            1,
            11,
        ),
        entry(
            "k1 Rn2 eps 1/4",
            samples::single_edge_identity(2),
            "t",
            1,
            1,
            12,
        ),
        entry(
            "k1 Rn2 eps 1/2",
            samples::single_edge_identity(2),
            "t",
            2,
            1,
            13,
        ),
        entry(
            "k1 Rn3 eps 1/8",
            samples::single_edge_identity(3),
            "t",
            1,
            1,
            14,
        ),
        entry(
            "k1 Rn3 eps 1/2",
            samples::single_edge_identity(3),
            "t",
            4,
            2,
            15,
        ),
        entry(
            "k1 Rn4 eps 1/16",
            samples::single_edge_identity(4),
            "t",
            1,
            1,
            16,
        ),
        entry(
            "k1 Rn4 eps 1/2",
            samples::single_edge_identity(4),
            "t",
            8,
            2,
            17,
        ),
        entry("k2 Rn1 eps 1/4", samples::colocated_pair(1), "t", 1, 1, 18),
        entry("k2 Rn2 eps 1/16", samples::colocated_pair(2), "t", 1, 1, 19),
        entry("k2 Rn2 eps 3/16", samples::colocated_pair(2), "t", 3, 1, 20),
        entry("k2 Rn2 eps 1/2", samples::colocated_pair(2), "t", 8, 1, 21),
        entry(
            "k2 fork eps 1/8",
            samples::colocated_fork(2),
            "t1",
            2,
            1,
            22,
        ),
    ]
}

fn params(seed: u64) -> SearchParams {
    SearchParams {
        attempts: 500,
        seed,
        mode: Mode::Diagonal,
        budget: DEFAULT_BUDGET,
    }
}

#[test]
fn criterion_1_zero_error_transform_exactness() {
    let started = Instant::now();
    let entries = catalog();
    assert!(entries.len() >= 10);
    for e in &entries {
        let (before, _) = exact_error(&e.inst, &e.code).unwrap();
        assert!(
            before.epsilon >= Rational::new(1, 16) && before.epsilon <= Rational::new(1, 2),
            "{}: measured error {} outside [1/16, 1/2]",
            e.name,
            before.epsilon
        );

        let (zec, report) =
            zero_error_transform_colocated(&e.inst, &e.code, e.cell_bits, &params(e.seed))
                .unwrap_or_else(|err| panic!("{}: {err}", e.name));

        // exactly zero failing tuples over the whole new source space
        assert!(report.verification.zero_error, "{}: nonzero output", e.name);
        let (verify, table) = exact_error(&e.inst, &zec.code).unwrap();
        assert!(verify.epsilon.is_zero(), "{}: re-measure nonzero", e.name);
        assert_eq!(table.ones(), 0, "{}", e.name);

        // rate exactly R (1 - deltaRn / Rn)
        let source_bits = e.code.source_bits().unwrap();
        let expected_rate = &e.code.rate
            * &(&Rational::one() - &Rational::ratio_u64(e.cell_bits as u64, source_bits as u64));
        assert_eq!(zec.code.rate, expected_rate, "{}: rate accounting", e.name);
    }
    println!(
        "criterion 1 (zero-error transform on {} catalog entries): PASS ({} ms)",
        entries.len(),
        started.elapsed().as_millis()
    );
}

/// All r-subsets of `pool`.
fn combinations(pool: &[u64], r: usize) -> Vec<Vec<u64>> {
    fn rec(pool: &[u64], r: usize, start: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            rec(pool, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(pool, r, 0, &mut Vec::new(), &mut out);
    out
}

#[test]
fn criterion_2_conditional_bound_sweep() {
    let started = Instant::now();
    let mut tables_checked = 0u64;
    let mut checks = 0u64;

    for k in [1usize, 2] {
        for source_bits in [1u32, 2, 3] {
            for cell_bits in 0..=source_bits.min(2) {
                let alphabet = 1u64 << source_bits;
                let space = TupleSpace::uniform_pow2(k, source_bits).unwrap();
                let cell_size = 1u64 << cell_bits;
                let fixed_per_source = (cell_size - 1) as usize;
                let pools: Vec<Vec<u64>> =
                    combinations(&(0..alphabet).collect::<Vec<_>>(), fixed_per_source);

                // trim the table count where the realization sweep is big
                let tables = if pools.len() > 100 { 40 } else { 70 };
                for t in 0..tables {
                    let mut rng = substream(
                        424242,
                        "claim-table",
                        (k as u64) << 40
                            | (source_bits as u64) << 20
                            | (cell_bits as u64) << 10
                            | t,
                    );
                    let ones = rng.gen_range(0..=4u64.min(space.total()));
                    let mut table = FailureTable::constant(k, source_bits, 0).unwrap();
                    for _ in 0..ones {
                        table.set_flat(rng.gen_range(0..space.total()), 1);
                    }
                    tables_checked += 1;

                    // all realizations: one fixed-set choice per source
                    let mut idx = vec![0usize; k];
                    loop {
                        let realization: Vec<Vec<u64>> =
                            idx.iter().map(|&i| pools[i].clone()).collect();
                        for j0 in 0..cell_size {
                            let check = claim31_exact_check(
                                &table,
                                cell_bits,
                                j0,
                                &realization,
                                DEFAULT_BUDGET,
                            )
                            .unwrap();
                            assert!(
                                check.holds,
                                "violated: k={k} Rn={source_bits} dRn={cell_bits} \
                                 j0={j0} realization {realization:?}: {} > {}",
                                check.exact, check.bound
                            );
                            checks += 1;
                        }
                        // advance the per-source fixed-set odometer
                        let mut pos = k;
                        loop {
                            if pos == 0 {
                                break;
                            }
                            pos -= 1;
                            idx[pos] += 1;
                            if idx[pos] < pools.len() {
                                break;
                            }
                            idx[pos] = 0;
                        }
                        if idx.iter().all(|&i| i == 0) {
                            break;
                        }
                    }
                }
            }
        }
    }
    assert!(tables_checked >= 1000, "only {tables_checked} tables swept");
    println!(
        "criterion 2 (conditional bound, {tables_checked} tables, {checks} exact checks): \
         PASS ({} ms)",
        started.elapsed().as_millis()
    );
}

#[test]
fn criterion_3_averaging_argument_and_edge_removal() {
    let started = Instant::now();
    let mut edges_checked = 0u64;
    for e in &catalog() {
        for edge in &e.inst.edges.clone() {
            let fv = best_fixed_value(&e.inst, &e.code, &edge.id, DEFAULT_BUDGET)
                .unwrap_or_else(|err| panic!("{} edge {}: {err}", e.name, edge.id));
            assert!(
                fv.conditional_probability >= fv.floor,
                "{} edge {}: {} below 2^-{}",
                e.name,
                edge.id,
                fv.conditional_probability,
                fv.width_bits
            );

            let outcome =
                edge_removal_transform(&e.inst, &e.code, &edge.id, DEFAULT_BUDGET).unwrap();
            assert!(
                outcome.report.bound_holds,
                "{} edge {}: error {} exceeds bound {}",
                e.name, edge.id, outcome.report.epsilon_out, outcome.report.bound
            );
            assert!(
                outcome.report.tight_bound_holds,
                "{} edge {}",
                e.name, edge.id
            );
            edges_checked += 1;
        }
    }
    println!(
        "criterion 3 (averaging argument + edge removal over {edges_checked} edges): \
         PASS ({} ms)",
        started.elapsed().as_millis()
    );
}

#[test]
fn criterion_4_index_coding_end_to_end() {
    let started = Instant::now();
    let cross = |k: usize| IndexCodingSpec {
        k,
        side_edges: (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect(),
        requirement: (0..k)
            .map(|i| (0..k).map(|j| u8::from(i == j)).collect())
            .collect(),
    };
    let identity_req = |k: usize| -> Vec<Vec<u8>> {
        (0..k)
            .map(|i| (0..k).map(|j| u8::from(i == j)).collect())
            .collect()
    };

    // (spec, code, corrupt terminal, corrupt count, cell_bits, seed)
    let mut cases: Vec<(IndexCodingSpec, NetworkCode, &str, usize, u32, u64)> = Vec::new();

    let spec1 = IndexCodingSpec {
        k: 1,
        side_edges: Default::default(),
        requirement: vec![vec![1]],
    };
    let (_, code1) = samples::index_coding_packed(&spec1, 2).unwrap();
    cases.push((spec1, code1, "t1", 1, 1, 31));

    let spec2 = cross(2);
    let (_, code2) = samples::index_coding_xor(1).unwrap();
    cases.push((spec2, code2, "t1", 1, 1, 32));

    let spec3 = cross(2);
    let (_, code3) = samples::index_coding_xor(2).unwrap();
    cases.push((spec3, code3, "t2", 2, 1, 33));

    let spec4 = IndexCodingSpec {
        k: 2,
        side_edges: Default::default(),
        requirement: identity_req(2),
    };
    let (_, code4) = samples::index_coding_packed(&spec4, 2).unwrap();
    cases.push((spec4, code4, "t1", 1, 1, 34));

    let spec5 = cross(3);
    let (_, code5) = samples::index_coding_packed(&cross(3), 1).unwrap();
    cases.push((spec5, code5, "t2", 1, 1, 35));

    let spec6 = IndexCodingSpec {
        k: 3,
        side_edges: [(1, 0), (2, 0), (0, 1)].into_iter().collect(),
        requirement: identity_req(3),
    };
    let (_, code6) = samples::index_coding_packed(&spec6, 1).unwrap();
    cases.push((spec6, code6, "t3", 2, 1, 36));

    assert!(cases.len() >= 5);
    for (i, (spec, code, terminal, corrupt, cell_bits, seed)) in cases.into_iter().enumerate() {
        let inst = build_index_coding_instance(&spec).unwrap();
        let bad = samples::corrupt_reachable_decoder(&inst, &code, terminal, corrupt, 500 + seed);
        let (before, _) = exact_error(&inst, &bad).unwrap();
        assert!(!before.epsilon.is_zero());

        let (zec, report, inst) =
            zerrnet::transform::index_coding_transform(&spec, &bad, cell_bits, &params(seed))
                .unwrap_or_else(|err| panic!("case {i}: {err}"));

        assert!(report.verification.zero_error, "case {i}");
        let (verify, _) = exact_error(&inst, &zec.code).unwrap();
        assert!(verify.epsilon.is_zero(), "case {i}: re-measure");

        // bottleneck width exactly n + deltaRn, side payloads byte-exact
        assert_eq!(zec.code.n, bad.n + cell_bits, "case {i}: blocklength");
        assert_eq!(
            report.verification.bottleneck_bits,
            Some(bad.n + cell_bits),
            "case {i}"
        );
        assert_eq!(
            report.verification.side_edges_verbatim,
            Some(true),
            "case {i}"
        );
    }
    println!(
        "criterion 4 (index-coding transform on 6 specs): PASS ({} ms)",
        started.elapsed().as_millis()
    );
}

#[test]
fn criterion_5_reduction_pipeline_mechanics() {
    let started = Instant::now();

    // completed chains verify steps (a) and (d) by failure-table equality
    let completed_configs: Vec<(&str, NetworkInstance, NetworkCode, u32, u64)> = {
        let (i1, c1) = samples::single_edge_identity(2);
        let (i2, c2) = samples::butterfly_xor();
        vec![
            ("one-source toy", i1, c1, 0, 5),
            ("two-source butterfly", i2, c2, 0, 5),
        ]
    };
    for (name, inst, code, cell_bits, seed) in completed_configs {
        let options = PipelineOptions {
            cell_bits,
            seed,
            attempts: 500,
            ..PipelineOptions::default()
        };
        let run = reduction_pipeline(&inst, &code, &options, &IdentityStrategy)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(run.outcome, PipelineOutcome::Completed, "{name}");
        assert!(run.stages.iter().all(|s| s.report.verified), "{name}");

        // step (a): the lifted code fails on exactly the same tuples
        let (_, table_in) = exact_error(&inst, &code).unwrap();
        let (_, table_a) = exact_error(&run.stages[0].instance, &run.stages[0].code).unwrap();
        assert_eq!(table_in, table_a, "{name}: step (a) equality");

        // step (b): zero error on the extension
        let (rep_b, _) = exact_error(&run.stages[1].instance, &run.stages[1].code).unwrap();
        assert!(rep_b.epsilon.is_zero(), "{name}: step (b)");

        // step (d): projection reproduces step (c) exactly
        let (_, table_c) = exact_error(&run.stages[2].instance, &run.stages[2].code).unwrap();
        let (_, table_d) = exact_error(&run.stages[3].instance, &run.stages[3].code).unwrap();
        assert_eq!(table_c, table_d, "{name}: step (d) equality");
        assert_eq!(table_d.ones(), 0, "{name}: final zero error");
    }

    // with real error the identity strategy is not applicable: the
    // bottleneck carries varying positions and fixing it breaks tuples
    let (inst, code) = samples::colocated_pair(2);
    let bad = samples::corrupt_decoder(&code, "t", 3, 1);
    let options = PipelineOptions {
        cell_bits: 1,
        seed: 1,
        attempts: 500,
        ..PipelineOptions::default()
    };
    let run = reduction_pipeline(&inst, &bad, &options, &IdentityStrategy).unwrap();
    assert!(run.stages.iter().all(|s| s.report.verified));
    match &run.outcome {
        PipelineOutcome::Halted { step, .. } => assert_eq!(step, "c"),
        other => panic!("expected halt at c, got {other:?}"),
    }
    // steps (a) and (b) still verified exhaustively before the halt
    let (_, t_in) = exact_error(&inst, &bad).unwrap();
    let (_, t_a) = exact_error(&run.stages[0].instance, &run.stages[0].code).unwrap();
    assert_eq!(t_in, t_a);
    let (rep_b, _) = exact_error(&run.stages[1].instance, &run.stages[1].code).unwrap();
    assert!(rep_b.epsilon.is_zero());

    println!(
        "criterion 5 (pipeline steps a-d on 1- and 2-source toys): PASS ({} ms)",
        started.elapsed().as_millis()
    );
}

#[test]
fn criterion_6_outer_code_components() {
    let started = Instant::now();

    // GV volume bound across >= 20 full-scan parameter points
    let points: &[(u64, usize, usize)] = &[
        (2, 3, 1),
        (2, 3, 2),
        (2, 3, 3),
        (2, 4, 1),
        (2, 4, 2),
        (2, 4, 3),
        (2, 4, 4),
        (2, 5, 3),
        (2, 6, 3),
        (2, 6, 4),
        (2, 7, 3),
        (2, 8, 3),
        (2, 8, 5),
        (4, 3, 2),
        (4, 3, 3),
        (4, 4, 3),
        (4, 4, 4),
        (4, 5, 4),
        (4, 6, 5),
        (4, 8, 5),
        (4, 8, 7),
        (4, 8, 8),
    ];
    assert!(points.len() >= 20);
    let mut small_codes = Vec::new();
    for &(q, length, d) in points {
        let out = gv_greedy_code(length, q, d, 77).unwrap();
        assert!(out.full_scan, "q={q} c'={length} d={d} should fully scan");
        assert_eq!(
            out.gv_bound_met,
            Some(true),
            "q={q} c'={length} d={d}: {} codewords < bound {:?}",
            out.code.codewords.len(),
            out.gv_lower_bound
        );
        if out.code.codewords.len() >= 2 {
            assert!(min_distance(&out.code).unwrap() >= d);
        }
        if (2..=16).contains(&out.code.codewords.len()) && d >= 3 {
            small_codes.push(out.code);
        }
    }

    // unique decoding under every corruption of weight <= (d-1)/2
    assert!(small_codes.len() >= 3, "want several small codes to verify");
    for code in &small_codes {
        let radius = (code.min_distance - 1) / 2;
        for (idx, c) in code.codewords.iter().enumerate() {
            let positions: Vec<u64> = (0..code.length as u64).collect();
            for w in 1..=radius {
                for pos_set in combinations(&positions, w) {
                    // every wrong-symbol assignment on the chosen positions
                    let alt = TupleSpace::new(&vec![code.q - 1; w]).unwrap();
                    alt.for_each(|alts| {
                        let mut word = c.clone();
                        for (slot, &p) in pos_set.iter().enumerate() {
                            let orig = c[p as usize];
                            let a = alts[slot];
                            word[p as usize] = if a < orig { a } else { a + 1 };
                        }
                        let dec = nearest_codeword_decode(&word, code).unwrap();
                        assert_eq!(dec.index, idx, "corrupting {c:?} at {pos_set:?}");
                    });
                }
            }
        }
    }

    // coordinate permutations preserve pairwise distances exactly
    for code in &small_codes {
        let permuted = permute_coordinates(code, 31);
        for i in 0..code.codewords.len() {
            for j in i + 1..code.codewords.len() {
                assert_eq!(
                    hamming(&code.codewords[i], &code.codewords[j]),
                    hamming(&permuted.codewords[i], &permuted.codewords[j])
                );
            }
        }
    }

    // eps = 1/16 end to end: 10^4 seeded trials, every within-radius trial
    // decodes, so all failures exceed the radius
    let (inst, code) = samples::single_edge_identity(4);
    let bad = samples::corrupt_decoder(&code, "t", 1, 3);
    let out = extend_blocklength(&inst, &bad, 16, 5, 10_000).unwrap();
    assert!(!out.report.refused);
    assert_eq!(out.report.required_distance, 5);
    let mc = out.report.monte_carlo.as_ref().unwrap();
    assert_eq!(mc.trials, 10_000);
    assert_eq!(
        mc.protected_failures, 0,
        "a within-radius trial failed to decode"
    );
    assert!(mc.protected_trials > 0);

    // the refusal path triggers exactly when ceil(4 eps c') + 1 > c'
    for rounds in [1usize, 2, 3, 4, 8, 16] {
        let out = extend_blocklength(&inst, &bad, rounds, 5, 1).unwrap();
        let four_eps_c = Rational::new(1, 16).scale_u64(4 * rounds as u64);
        let required = four_eps_c.ceil_u64() + 1;
        assert_eq!(
            out.report.refused,
            required > rounds as u64,
            "rounds={rounds}: refusal boundary"
        );
    }
    let worse = samples::corrupt_decoder(&code, "t", 4, 3); // eps = 1/4
    for rounds in [4usize, 16] {
        let out = extend_blocklength(&inst, &worse, rounds, 5, 1).unwrap();
        assert!(out.report.refused, "4 eps c' + 1 > c' for eps = 1/4");
    }

    println!(
        "criterion 6 (GV bound on {} points, unique decoding, extension): PASS ({} ms)",
        points.len(),
        started.elapsed().as_millis()
    );
}

#[test]
fn criterion_7_property_suites() {
    let started = Instant::now();

    // witness re-verification and diagonal => full, over seeded tables
    for trial in 0..40u64 {
        let mut rng = substream(5150, "prop-table", trial);
        let mut table = FailureTable::constant(2, 2, 0).unwrap();
        let ones = rng.gen_range(0..10u64);
        for _ in 0..ones {
            table.set_flat(rng.gen_range(0..16), 1);
        }
        let p = zerrnet::binning::sample_partition_set(2, 2, 1, trial).unwrap();
        assert!(p.check_invariants().is_empty());
        for y in TupleSpace::new(&[2, 2]).unwrap().iter() {
            let diag = p.find_diagonal_witness(&y, &table).unwrap();
            let full = p.is_good_for(&y, &table).unwrap();
            if let Some(w) = &diag {
                assert_eq!(table.get(&w.tuple), 0);
                assert!(full.is_some(), "diagonal witness without full witness");
            }
            if let Some(t) = &full {
                assert_eq!(table.get(t), 0);
                for (i, &x) in t.iter().enumerate() {
                    assert_eq!(p.cell_of(i, x), y[i]);
                }
            }
        }
    }

    // pre-encoder round trip on a transformed code
    let (inst, code) = samples::colocated_pair(2);
    let bad = samples::corrupt_decoder(&code, "t", 3, 5);
    let (zec, report) = zero_error_transform_colocated(&inst, &bad, 1, &params(7)).unwrap();
    assert!(report.verification.witnesses_reverified);
    assert!(report.verification.pre_encoder_round_trip);
    let space = TupleSpace::uniform_pow2(2, 1).unwrap();
    for (flat, x) in zec.pre_encoder.iter().enumerate() {
        let y = space.tuple_of(flat as u64);
        for (i, &xi) in x.iter().enumerate() {
            assert_eq!(zec.partitions.cell_of(i, xi), y[i]);
        }
    }

    // permutation distance preservation on a fresh code
    let base = gv_greedy_code(5, 3, 2, 2).unwrap().code;
    for seed in 0..5 {
        let permuted = permute_coordinates(&base, seed);
        for i in 0..base.codewords.len() {
            for j in i + 1..base.codewords.len() {
                assert_eq!(
                    hamming(&base.codewords[i], &base.codewords[j]),
                    hamming(&permuted.codewords[i], &permuted.codewords[j])
                );
            }
        }
    }

    println!(
        "criterion 7 (witnesses, diagonal=>full, round trip, partitions, permutations): \
         PASS ({} ms)",
        started.elapsed().as_millis()
    );
}

#[test]
fn criterion_8_good_probability_against_enumeration() {
    let started = Instant::now();
    // k=1, Rn=2, deltaRn=1: exactly three partition shapes
    let shapes = enumerate_partition_shapes(2, 1).unwrap();
    assert_eq!(shapes.len(), 3);

    let tables: Vec<(&str, Vec<u64>)> = vec![
        ("all-pass", vec![]),
        ("one failing", vec![0]),
        ("adjacent pair", vec![0, 1]),
        ("split pair", vec![0, 3]),
        ("three failing", vec![0, 1, 2]),
        ("all failing", vec![0, 1, 2, 3]),
    ];
    assert!(tables.len() >= 5);

    for (name, ones) in &tables {
        let mut table = FailureTable::constant(1, 2, 0).unwrap();
        for &o in ones {
            table.set_flat(o, 1);
        }

        // ground truth by full enumeration of the three shapes
        let mut good_shapes = 0u64;
        for shape in &shapes {
            let p = PartitionSet::from_cells(2, 1, vec![shape.clone()]).unwrap();
            if p.is_good(&table, Mode::Full, DEFAULT_BUDGET).unwrap().good {
                good_shapes += 1;
            }
        }
        let truth = Rational::ratio_u64(good_shapes, 3);

        for mode in [Mode::Full, Mode::Diagonal] {
            let est =
                estimate_good_probability(&table, 1, 10_000, 8, mode, DEFAULT_BUDGET).unwrap();
            let gap = (est.fraction.to_f64() - truth.to_f64()).abs();
            assert!(
                gap <= 0.05,
                "{name} ({mode}): estimate {} vs truth {} (gap {gap})",
                est.fraction,
                truth
            );
        }
    }
    println!(
        "criterion 8 (good-probability estimates vs exhaustive truth on {} tables): \
         PASS ({} ms)",
        tables.len(),
        started.elapsed().as_millis()
    );
}
