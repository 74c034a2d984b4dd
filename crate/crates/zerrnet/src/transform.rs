//! Code surgeries, each re-verified by exhaustive measurement.
//!
//! * co-located zero-error transform: a pre-encoder at the single source
//!   host maps each new source tuple into a non-failing tuple of the old
//!   code, inside per-source partition cells; terminals invert by cell
//!   lookup. Rate drops from `R` to `R (1 - cell_bits/source_bits)`.
//! * supernode variant: sources sit anywhere, but a super-node sees every
//!   new symbol and broadcasts one shared within-cell position through a
//!   narrow bottleneck, so each source can reconstruct its own pre-encoded
//!   symbol locally.
//! * index-coding variant: the bottleneck encoder plays the super-node and
//!   appends the shared position to its message, widening the bottleneck
//!   from `n` to `n + cell_bits` bits.
//! * edge removal: fix the removed edge's most likely value among correctly
//!   decoded tuples and hard-code it downstream.
//! * reduction pipeline: chains the above through the supernode extension,
//!   with a pluggable repair strategy for the removed-bottleneck step.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::binning::{delta_of_epsilon, search_good_partition, DeltaEstimate, Mode, PartitionSet};
use crate::code::{exact_error_with_budget, width_bits, Evaluator, FailureTable, NetworkCode};
use crate::error::{Error, Result};
use crate::instance::{
    build_index_coding_instance, build_supernode_extension, remove_edge, IndexCodingSpec,
    NetworkInstance, SupernodeExtension,
};
use crate::rat::Rational;
use crate::tuple::TupleSpace;
use crate::DEFAULT_BUDGET;

#[derive(Debug, Clone, Serialize)]
pub struct SearchParams {
    pub attempts: u32,
    pub seed: u64,
    pub mode: Mode,
    pub budget: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            attempts: 64,
            seed: 0,
            mode: Mode::Diagonal,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodePoint {
    pub epsilon: Rational,
    pub rate: Rational,
    pub n: u32,
    pub source_bits: u32,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Verification {
    /// Exhaustively re-measured error of the output is exactly zero.
    pub zero_error: bool,
    /// Every pre-encoder image re-checks as non-failing under the input
    /// code's failure table.
    pub witnesses_reverified: bool,
    /// Cell lookup inverts the pre-encoder on every new source tuple.
    pub pre_encoder_round_trip: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link_symbols_in_range: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side_edges_verbatim: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bottleneck_bits: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformReport {
    pub transform: String,
    pub input: CodePoint,
    pub output: CodePoint,
    pub cell_bits: u32,
    /// The realized rate-loss fraction cell_bits / source_bits.
    pub delta: Rational,
    pub mode: Mode,
    pub seed: u64,
    pub attempts_used: u32,
    /// -log2(1 - epsilon_in) / n, when defined.
    pub alpha: Option<f64>,
    /// The asymptotic delta formula value for comparison, when defined.
    pub delta_formula: Option<DeltaEstimate>,
    /// Index-coding only: the asymptotic widened blocklength
    /// `n - log2(1-eps) + 2 log2(Rn)` next to the realized `n + cell_bits`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic_blocklength: Option<f64>,
    pub verification: Verification,
}

/// A zero-error code produced by one of the binning transforms, together
/// with the binning data that built it. `code` is a complete network code
/// for the transform's instance; the other fields let callers audit it.
#[derive(Debug, Clone)]
pub struct ZeroErrorCode {
    pub code: NetworkCode,
    pub partitions: PartitionSet,
    pub mode: Mode,
    /// Flat new-source-tuple index -> the original tuple communicated.
    pub pre_encoder: Vec<Vec<u64>>,
    /// Diagonal mode: flat index -> the shared within-cell position.
    pub shared_index: Option<Vec<u64>>,
}

fn alpha_of(epsilon: &Rational, n: u32) -> Option<f64> {
    if *epsilon >= Rational::one() {
        return None;
    }
    let one_minus = (&Rational::one() - epsilon).to_f64();
    Some(-one_minus.log2() / n as f64)
}

fn measure(
    inst: &NetworkInstance,
    code: &NetworkCode,
    budget: u64,
) -> Result<(Rational, FailureTable)> {
    let (report, table) = exact_error_with_budget(inst, code, budget, false)?;
    Ok((report.epsilon, table))
}

/// (partitions, pre-encoder, shared positions, attempts used).
type PreEncoding = (PartitionSet, Vec<Vec<u64>>, Option<Vec<u64>>, u32);

/// Run the good-partition search and materialize the pre-encoder maps.
fn pre_encode_tables(
    a: &FailureTable,
    cell_bits: u32,
    params: &SearchParams,
) -> Result<PreEncoding> {
    if params.attempts == 0 {
        // a zero-attempt budget is an immediate absence, not a bad input
        return Err(Error::NoGoodPartition { attempts: 0 });
    }
    let outcome = search_good_partition(
        a,
        cell_bits,
        params.attempts,
        params.seed,
        params.mode,
        params.budget,
    )?;
    let partition = outcome.partition.ok_or(Error::NoGoodPartition {
        attempts: outcome.attempts_used,
    })?;

    let realizations = TupleSpace::uniform_pow2(a.k, a.source_bits - cell_bits)?;
    let mut pre = Vec::with_capacity(realizations.total() as usize);
    let mut shared =
        (params.mode == Mode::Diagonal).then(|| Vec::with_capacity(realizations.total() as usize));
    let mut y = vec![0u64; a.k];
    loop {
        match params.mode {
            Mode::Full => {
                let w = partition
                    .is_good_for(&y, a)?
                    .expect("partition verified good");
                pre.push(w);
            }
            Mode::Diagonal => {
                let w = partition
                    .find_diagonal_witness(&y, a)?
                    .expect("partition verified good");
                shared.as_mut().unwrap().push(w.j);
                pre.push(w.tuple);
            }
        }
        if !realizations.advance(&mut y) {
            break;
        }
    }
    Ok((partition, pre, shared, outcome.attempts_used))
}

fn audit_pre_encoder(
    partition: &PartitionSet,
    pre: &[Vec<u64>],
    a: &FailureTable,
    verification: &mut Verification,
) {
    let realizations = partition
        .num_cells()
        .checked_pow(partition.k() as u32)
        .expect("realization count fits");
    debug_assert_eq!(realizations as usize, pre.len());
    let space = TupleSpace::uniform_pow2(
        partition.k(),
        partition.source_bits() - partition.cell_bits(),
    )
    .expect("realization space");
    let mut witnesses_ok = true;
    let mut round_trip_ok = true;
    for (flat, x) in pre.iter().enumerate() {
        if a.get(x) != 0 {
            witnesses_ok = false;
        }
        let y = space.tuple_of(flat as u64);
        for (i, &xi) in x.iter().enumerate() {
            if partition.cell_of(i, xi) != y[i] {
                round_trip_ok = false;
            }
        }
    }
    verification.witnesses_reverified = witnesses_ok;
    verification.pre_encoder_round_trip = round_trip_ok;
}

/// Zero-error transform for co-located sources: same
/// instance, same blocklength, rate `(source_bits - cell_bits) / n`.
pub fn zero_error_transform_colocated(
    inst: &NetworkInstance,
    code: &NetworkCode,
    cell_bits: u32,
    params: &SearchParams,
) -> Result<(ZeroErrorCode, TransformReport)> {
    let ev = Evaluator::new(inst, code)?;
    let source_bits = ev.source_bits;
    let k = ev.k;
    if k == 0 {
        return Err(Error::Parameter("instance has no sources".into()));
    }
    let host = &inst.sources[0].node;
    let offsite: Vec<String> = inst
        .sources
        .iter()
        .filter(|s| &s.node != host)
        .map(|s| s.node.clone())
        .collect();
    if !offsite.is_empty() {
        let mut hosts = vec![host.clone()];
        hosts.extend(offsite);
        return Err(Error::NotColocated(hosts));
    }
    if source_bits == 0 {
        return Err(Error::Parameter("input code carries no information".into()));
    }
    if cell_bits > source_bits {
        return Err(Error::Parameter(format!(
            "cell width {cell_bits} exceeds the source width {source_bits}"
        )));
    }
    drop(ev);

    let (eps_in, a) = measure(inst, code, params.budget)?;
    let (partition, pre, shared, attempts_used) = pre_encode_tables(&a, cell_bits, params)?;

    let new_bits = source_bits - cell_bits;
    let new_space = TupleSpace::uniform_pow2(k, new_bits)?;
    let old_space = TupleSpace::uniform_pow2(k, source_bits)?;

    let mut edge_functions = BTreeMap::new();
    for e in &inst.edges {
        let table = &code.edge_functions[&e.id];
        if &e.tail == host {
            let mut new_table = Vec::with_capacity(new_space.total() as usize);
            for flat in 0..new_space.total() {
                let x = &pre[flat as usize];
                new_table.push(table[old_space.index_of(x) as usize]);
            }
            edge_functions.insert(e.id.clone(), new_table);
        } else {
            edge_functions.insert(e.id.clone(), table.clone());
        }
    }

    let mut decoders = BTreeMap::new();
    for (t, term) in inst.terminals.iter().enumerate() {
        let demanded = inst.demanded_sources(t);
        let rows = &code.decoders[&term.id];
        let new_rows: Vec<Vec<u64>> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(demanded.iter())
                    .map(|(&x, &s)| partition.cell_of(s, x))
                    .collect()
            })
            .collect();
        decoders.insert(term.id.clone(), new_rows);
    }

    let new_code = NetworkCode {
        n: code.n,
        rate: Rational::ratio_u64(new_bits as u64, code.n as u64),
        edge_functions,
        decoders,
    };

    let (eps_out, _) = measure(inst, &new_code, params.budget)?;
    let mut verification = Verification {
        zero_error: eps_out.is_zero(),
        ..Default::default()
    };
    audit_pre_encoder(&partition, &pre, &a, &mut verification);

    let report = TransformReport {
        transform: "zero-error-colocated".to_string(),
        input: CodePoint {
            epsilon: eps_in.clone(),
            rate: code.rate.clone(),
            n: code.n,
            source_bits,
        },
        output: CodePoint {
            epsilon: eps_out,
            rate: new_code.rate.clone(),
            n: new_code.n,
            source_bits: new_bits,
        },
        cell_bits,
        delta: Rational::ratio_u64(cell_bits as u64, source_bits as u64),
        mode: params.mode,
        seed: params.seed,
        attempts_used,
        alpha: alpha_of(&eps_in, code.n),
        delta_formula: delta_of_epsilon(&eps_in, &code.rate, code.n).ok(),
        asymptotic_blocklength: None,
        verification,
    };
    Ok((
        ZeroErrorCode {
            code: new_code,
            partitions: partition,
            mode: params.mode,
            pre_encoder: pre,
            shared_index: shared,
        },
        report,
    ))
}

fn reject_colocated_terminals(ext: &SupernodeExtension) -> Result<()> {
    for arm in &ext.layout.arms {
        if ext.base.terminals.iter().any(|t| t.node == arm.old_host) {
            return Err(Error::Parameter(format!(
                "terminal co-hosted with source {:?} at {:?} is not supported",
                arm.source_id, arm.old_host
            )));
        }
    }
    Ok(())
}

/// Lift a code for the base instance onto the supernode extension: fresh
/// sources forward their symbols verbatim to the old hosts, the super-node
/// path carries constant zeros, and everything else is untouched. The
/// lifted code fails on exactly the same source tuples.
pub fn lift_code_to_extension(ext: &SupernodeExtension, code: &NetworkCode) -> Result<NetworkCode> {
    let ev = Evaluator::new(&ext.base, code)?;
    let source_bits = ev.source_bits;
    drop(ev);
    reject_colocated_terminals(ext)?;

    let inst = &ext.instance;
    let mut edge_functions = BTreeMap::new();

    for arm in &ext.layout.arms {
        let fw = inst.edge_index(&arm.forward_edge).expect("layout edge");
        let fw_width = width_bits(&inst.edges[fw].capacity, code.n, "forward edge")?;
        if fw_width < source_bits {
            return Err(Error::Parameter(format!(
                "forward edge {:?} carries {fw_width} bits, needs {source_bits}",
                arm.forward_edge
            )));
        }
        edge_functions.insert(arm.forward_edge.clone(), (0..1u64 << source_bits).collect());
        edge_functions.insert(arm.uplink_edge.clone(), vec![0; 1usize << source_bits]);
    }

    // super-node and relay send constant zeros
    let uplink_dims: Vec<u64> = inst
        .incoming_edges(&ext.layout.super_node)
        .iter()
        .map(|&e| width_bits(&inst.edges[e].capacity, code.n, "uplink").map(|w| 1u64 << w))
        .collect::<Result<_>>()?;
    let uplink_space = TupleSpace::new(&uplink_dims)?;
    edge_functions.insert(
        ext.layout.bottleneck_edge.clone(),
        vec![0; uplink_space.total() as usize],
    );
    let bneck = inst
        .edge_index(&ext.layout.bottleneck_edge)
        .expect("layout edge");
    let bneck_width = width_bits(&inst.edges[bneck].capacity, code.n, "bottleneck")?;
    for arm in &ext.layout.arms {
        edge_functions.insert(arm.downlink_edge.clone(), vec![0; 1usize << bneck_width]);
    }

    // old source hosts: pick the forwarded symbols out of the incoming
    // edges and feed the original first-hop functions
    let old_space = |k_h: usize| TupleSpace::uniform_pow2(k_h, source_bits);
    let hosts: Vec<&str> = {
        let mut h: Vec<&str> = ext
            .layout
            .arms
            .iter()
            .map(|a| a.old_host.as_str())
            .collect();
        h.sort();
        h.dedup();
        h
    };
    for host in hosts {
        let incoming = inst.incoming_edges(host);
        let dims: Vec<u64> = incoming
            .iter()
            .map(|&e| width_bits(&inst.edges[e].capacity, code.n, "incoming").map(|w| 1u64 << w))
            .collect::<Result<_>>()?;
        let space = TupleSpace::new(&dims)?;
        // sources hosted here in the base, in source-id order
        let hosted: Vec<&crate::instance::SupernodeArm> = ext
            .layout
            .arms
            .iter()
            .filter(|a| a.old_host == host)
            .collect();
        let fw_pos: Vec<usize> = hosted
            .iter()
            .map(|arm| {
                incoming
                    .iter()
                    .position(|&e| inst.edges[e].id == arm.forward_edge)
                    .expect("forward edge reaches old host")
            })
            .collect();
        let k_h = hosted.len();
        let orig_space = old_space(k_h)?;
        let source_range = 1u64 << source_bits;

        for &eidx in ext.base.outgoing_edges(host).iter() {
            let edge_id = &ext.base.edges[eidx].id;
            let orig_table = &code.edge_functions[edge_id];
            let mut table = Vec::with_capacity(space.total() as usize);
            let mut x_at = vec![0u64; k_h];
            space.for_each(|input| {
                let mut ok = true;
                for (i, &p) in fw_pos.iter().enumerate() {
                    x_at[i] = input[p];
                    if x_at[i] >= source_range {
                        ok = false;
                    }
                }
                table.push(if ok {
                    orig_table[orig_space.index_of(&x_at) as usize]
                } else {
                    0
                });
            });
            edge_functions.insert(edge_id.clone(), table);
        }
    }

    // everything else verbatim
    for e in &inst.edges {
        if !edge_functions.contains_key(&e.id) {
            edge_functions.insert(e.id.clone(), code.edge_functions[&e.id].clone());
        }
    }

    Ok(NetworkCode {
        n: code.n,
        rate: code.rate.clone(),
        edge_functions,
        decoders: code.decoders.clone(),
    })
}

/// Zero-error transform through a super-node: diagonal mode only, since the
/// bottleneck broadcasts one shared within-cell position to every source.
pub fn zero_error_transform_supernode(
    ext: &SupernodeExtension,
    code: &NetworkCode,
    cell_bits: u32,
    params: &SearchParams,
) -> Result<(ZeroErrorCode, TransformReport)> {
    if params.mode != Mode::Diagonal {
        return Err(Error::Parameter(
            "the supernode transform requires diagonal mode".into(),
        ));
    }
    let ev = Evaluator::new(&ext.base, code)?;
    let source_bits = ev.source_bits;
    let k = ev.k;
    drop(ev);
    reject_colocated_terminals(ext)?;
    if source_bits == 0 {
        return Err(Error::Parameter("input code carries no information".into()));
    }
    if cell_bits > source_bits {
        return Err(Error::Parameter(format!(
            "cell width {cell_bits} exceeds the source width {source_bits}"
        )));
    }
    let new_bits = source_bits - cell_bits;
    let inst = &ext.instance;

    // the j-links must be wide enough for a cell position, the y-links for
    // a new source symbol
    let link_width = |edge_id: &str, what: &str| -> Result<u32> {
        let idx = inst
            .edge_index(edge_id)
            .ok_or_else(|| Error::UnknownEdge(edge_id.to_string()))?;
        width_bits(&inst.edges[idx].capacity, code.n, what)
    };
    let bneck_width = link_width(&ext.layout.bottleneck_edge, "bottleneck")?;
    if bneck_width < cell_bits {
        return Err(Error::Parameter(format!(
            "bottleneck carries {bneck_width} bits, needs {cell_bits}"
        )));
    }
    for arm in &ext.layout.arms {
        let dw = link_width(&arm.downlink_edge, "downlink")?;
        if dw < cell_bits {
            return Err(Error::Parameter(format!(
                "downlink {:?} carries {dw} bits, needs {cell_bits}",
                arm.downlink_edge
            )));
        }
        for (id, what) in [(&arm.forward_edge, "forward"), (&arm.uplink_edge, "uplink")] {
            let w = link_width(id, what)?;
            if w < new_bits {
                return Err(Error::Parameter(format!(
                    "{what} edge {id:?} carries {w} bits, needs {new_bits}"
                )));
            }
        }
    }

    let (eps_in, a) = measure(&ext.base, code, params.budget)?;
    let (partition, pre, shared, attempts_used) = pre_encode_tables(&a, cell_bits, params)?;
    let shared_j = shared.as_ref().expect("diagonal mode records positions");

    let new_space = TupleSpace::uniform_pow2(k, new_bits)?;
    let new_range = 1u64 << new_bits;
    let cell_size = 1u64 << cell_bits;
    let mut edge_functions = BTreeMap::new();

    // fresh source nodes broadcast their new symbol on both links
    for arm in &ext.layout.arms {
        let identity: Vec<u64> = (0..new_range).collect();
        edge_functions.insert(arm.forward_edge.clone(), identity.clone());
        edge_functions.insert(arm.uplink_edge.clone(), identity);
    }

    // super-node: assemble the new tuple from the uplinks, emit the shared
    // position for its pre-encoded image
    let uplinks = inst.incoming_edges(&ext.layout.super_node);
    let uplink_source: Vec<usize> = uplinks
        .iter()
        .map(|&e| {
            let arm = ext
                .layout
                .arms
                .iter()
                .find(|a| a.uplink_edge == inst.edges[e].id)
                .expect("uplink belongs to an arm");
            ext.base
                .source_index(&arm.source_id)
                .expect("source id resolves")
        })
        .collect();
    let uplink_dims: Vec<u64> = uplinks
        .iter()
        .map(|&e| width_bits(&inst.edges[e].capacity, code.n, "uplink").map(|w| 1u64 << w))
        .collect::<Result<_>>()?;
    let uplink_space = TupleSpace::new(&uplink_dims)?;
    let mut bneck_table = Vec::with_capacity(uplink_space.total() as usize);
    let mut y = vec![0u64; k];
    uplink_space.for_each(|input| {
        let mut ok = true;
        for (pos, &src) in uplink_source.iter().enumerate() {
            y[src] = input[pos];
            if input[pos] >= new_range {
                ok = false;
            }
        }
        bneck_table.push(if ok {
            shared_j[new_space.index_of(&y) as usize]
        } else {
            0
        });
    });
    edge_functions.insert(ext.layout.bottleneck_edge.clone(), bneck_table);

    // relay copies the position to every old host
    let downlink_table: Vec<u64> = (0..1u64 << bneck_width)
        .map(|v| if v < cell_size { v } else { 0 })
        .collect();
    for arm in &ext.layout.arms {
        edge_functions.insert(arm.downlink_edge.clone(), downlink_table.clone());
    }

    // old hosts: reconstruct each hosted symbol from (y_i, j) and feed the
    // original first-hop functions
    let hosts: Vec<&str> = {
        let mut h: Vec<&str> = ext
            .layout
            .arms
            .iter()
            .map(|a| a.old_host.as_str())
            .collect();
        h.sort();
        h.dedup();
        h
    };
    for host in hosts {
        let incoming = inst.incoming_edges(host);
        let dims: Vec<u64> = incoming
            .iter()
            .map(|&e| width_bits(&inst.edges[e].capacity, code.n, "incoming").map(|w| 1u64 << w))
            .collect::<Result<_>>()?;
        let space = TupleSpace::new(&dims)?;
        let hosted: Vec<&crate::instance::SupernodeArm> = ext
            .layout
            .arms
            .iter()
            .filter(|a| a.old_host == host)
            .collect();
        let fw_pos: Vec<usize> = hosted
            .iter()
            .map(|arm| {
                incoming
                    .iter()
                    .position(|&e| inst.edges[e].id == arm.forward_edge)
                    .expect("forward edge reaches old host")
            })
            .collect();
        let down_pos = incoming
            .iter()
            .position(|&e| {
                ext.layout
                    .arms
                    .iter()
                    .any(|a| a.downlink_edge == inst.edges[e].id)
            })
            .expect("a downlink reaches every old host");
        let hosted_src: Vec<usize> = hosted
            .iter()
            .map(|arm| ext.base.source_index(&arm.source_id).expect("source id"))
            .collect();
        let k_h = hosted.len();
        let orig_space = TupleSpace::uniform_pow2(k_h, source_bits)?;

        for &eidx in ext.base.outgoing_edges(host).iter() {
            let edge_id = &ext.base.edges[eidx].id;
            let orig_table = &code.edge_functions[edge_id];
            let mut table = Vec::with_capacity(space.total() as usize);
            let mut x_at = vec![0u64; k_h];
            space.for_each(|input| {
                let j = input[down_pos];
                let mut ok = j < cell_size;
                if ok {
                    for (i, &p) in fw_pos.iter().enumerate() {
                        let yi = input[p];
                        if yi >= new_range {
                            ok = false;
                            break;
                        }
                        x_at[i] = partition.cell(hosted_src[i], yi)[j as usize];
                    }
                }
                table.push(if ok {
                    orig_table[orig_space.index_of(&x_at) as usize]
                } else {
                    0
                });
            });
            edge_functions.insert(edge_id.clone(), table);
        }
    }

    for e in &inst.edges {
        if !edge_functions.contains_key(&e.id) {
            edge_functions.insert(e.id.clone(), code.edge_functions[&e.id].clone());
        }
    }

    // terminals decode with the old tables, then invert by cell lookup
    let mut decoders = BTreeMap::new();
    for (t, term) in inst.terminals.iter().enumerate() {
        let demanded = inst.demanded_sources(t);
        let rows = &code.decoders[&term.id];
        decoders.insert(
            term.id.clone(),
            rows.iter()
                .map(|row| {
                    row.iter()
                        .zip(demanded.iter())
                        .map(|(&x, &s)| partition.cell_of(s, x))
                        .collect()
                })
                .collect(),
        );
    }

    let new_code = NetworkCode {
        n: code.n,
        rate: Rational::ratio_u64(new_bits as u64, code.n as u64),
        edge_functions,
        decoders,
    };

    // verification sweep: zero error and every j-link symbol in range
    let new_ev = Evaluator::new(inst, &new_code)?;
    let sweep = new_ev.source_space()?;
    if sweep.total() > params.budget {
        return Err(Error::Budget {
            needed: sweep.total() as u128,
            budget: params.budget,
        });
    }
    let mut edge_symbols = vec![0u64; inst.edges.len()];
    let mut buf = Vec::new();
    let mut failing = 0u64;
    let mut links_ok = true;
    let bneck_idx = inst.edge_index(&ext.layout.bottleneck_edge).unwrap();
    let down_idx: Vec<usize> = ext
        .layout
        .arms
        .iter()
        .map(|arm| inst.edge_index(&arm.downlink_edge).unwrap())
        .collect();
    sweep.for_each(|yy| {
        if new_ev.is_failure(yy, &mut edge_symbols, &mut buf) {
            failing += 1;
        }
        if edge_symbols[bneck_idx] >= cell_size {
            links_ok = false;
        }
        for &d in &down_idx {
            if edge_symbols[d] >= cell_size {
                links_ok = false;
            }
        }
    });
    let eps_out = Rational::ratio_u64(failing, sweep.total());

    let mut verification = Verification {
        zero_error: eps_out.is_zero(),
        link_symbols_in_range: Some(links_ok),
        ..Default::default()
    };
    audit_pre_encoder(&partition, &pre, &a, &mut verification);

    let report = TransformReport {
        transform: "zero-error-supernode".to_string(),
        input: CodePoint {
            epsilon: eps_in.clone(),
            rate: code.rate.clone(),
            n: code.n,
            source_bits,
        },
        output: CodePoint {
            epsilon: eps_out,
            rate: new_code.rate.clone(),
            n: new_code.n,
            source_bits: new_bits,
        },
        cell_bits,
        delta: Rational::ratio_u64(cell_bits as u64, source_bits as u64),
        mode: params.mode,
        seed: params.seed,
        attempts_used,
        alpha: alpha_of(&eps_in, code.n),
        delta_formula: delta_of_epsilon(&eps_in, &code.rate, code.n).ok(),
        asymptotic_blocklength: None,
        verification,
    };
    Ok((
        ZeroErrorCode {
            code: new_code,
            partitions: partition,
            mode: params.mode,
            pre_encoder: pre,
            shared_index: shared,
        },
        report,
    ))
}

/// Zero-error transform for index-coding instances: the bottleneck message
/// becomes `(z, j)` via a `cell_bits`-wider blocklength, side edges carry
/// the new source symbols verbatim, and terminals rebuild the side symbols
/// before running the original decoder.
pub fn index_coding_transform(
    spec: &IndexCodingSpec,
    code: &NetworkCode,
    cell_bits: u32,
    params: &SearchParams,
) -> Result<(ZeroErrorCode, TransformReport, NetworkInstance)> {
    if params.mode != Mode::Diagonal {
        return Err(Error::Parameter(
            "the index-coding transform requires diagonal mode".into(),
        ));
    }
    let inst = build_index_coding_instance(spec)?;
    let ev = Evaluator::new(&inst, code)?;
    let source_bits = ev.source_bits;
    let k = ev.k;
    drop(ev);
    if source_bits == 0 {
        return Err(Error::Parameter("input code carries no information".into()));
    }
    if cell_bits > source_bits {
        return Err(Error::Parameter(format!(
            "cell width {cell_bits} exceeds the source width {source_bits}"
        )));
    }
    let new_bits = source_bits - cell_bits;
    let n_prime = code.n + cell_bits;
    if new_bits > n_prime {
        return Err(Error::Parameter(format!(
            "side edges carry {n_prime} bits, new source symbols need {new_bits}"
        )));
    }

    let (eps_in, a) = measure(&inst, code, params.budget)?;
    let (partition, pre, shared, attempts_used) = pre_encode_tables(&a, cell_bits, params)?;
    let shared_j = shared.as_ref().expect("diagonal mode records positions");

    let new_space = TupleSpace::uniform_pow2(k, new_bits)?;
    let new_range = 1u64 << new_bits;
    let cell_size = 1u64 << cell_bits;
    let wide = 1u64 << n_prime;
    let source_range = 1u64 << source_bits;

    // map each feed edge (s_i, u) to the source hosted at its tail
    let feeds = inst.incoming_edges("u");
    let feed_source: Vec<usize> = feeds
        .iter()
        .map(|&e| inst.sources_at(&inst.edges[e].tail)[0])
        .collect();
    let orig_feed_dims: Vec<u64> = feeds
        .iter()
        .map(|&e| width_bits(&inst.edges[e].capacity, code.n, "feed").map(|w| 1u64 << w))
        .collect::<Result<_>>()?;
    let orig_feed_space = TupleSpace::new(&orig_feed_dims)?;

    let mut edge_functions = BTreeMap::new();
    let identity_new: Vec<u64> = (0..new_range).collect();
    let identity_wide: Vec<u64> = (0..wide).collect();

    for &(i, j) in &spec.side_edges {
        edge_functions.insert(format!("side:s{}->t{}", i + 1, j + 1), identity_new.clone());
    }
    for i in 0..k {
        edge_functions.insert(format!("s{}->u", i + 1), identity_new.clone());
        edge_functions.insert(format!("v->t{}", i + 1), identity_wide.clone());
    }

    // bottleneck encoder: pre-encode, run the old feeds + old bottleneck
    // function, append the shared position
    let orig_uv = &code.edge_functions["u->v"];
    let new_feed_space = TupleSpace::new(&vec![wide; k])?;
    let mut uv_table = Vec::with_capacity(new_feed_space.total() as usize);
    let mut y = vec![0u64; k];
    let mut w = vec![0u64; k];
    new_feed_space.for_each(|input| {
        let mut ok = true;
        for (pos, &src) in feed_source.iter().enumerate() {
            if input[pos] >= new_range {
                ok = false;
                break;
            }
            y[src] = input[pos];
        }
        if ok {
            let flat = new_space.index_of(&y) as usize;
            let x = &pre[flat];
            for (pos, &src) in feed_source.iter().enumerate() {
                w[pos] = code.edge_functions[&inst.edges[feeds[pos]].id][x[src] as usize];
            }
            let z = orig_uv[orig_feed_space.index_of(&w) as usize];
            uv_table.push((z << cell_bits) | shared_j[flat]);
        } else {
            uv_table.push(0);
        }
    });
    edge_functions.insert("u->v".to_string(), uv_table);

    // terminals: unpack (z, j), rebuild side symbols, run the original
    // decoder, invert the pre-encoding
    let mut decoders = BTreeMap::new();
    for (t, term) in inst.terminals.iter().enumerate() {
        let incoming = inst.incoming_edges(&term.node);
        let v_pos = incoming
            .iter()
            .position(|&e| inst.edges[e].tail == "v")
            .expect("every terminal hears the bottleneck");
        let side_src: Vec<Option<usize>> = incoming
            .iter()
            .map(|&e| {
                let edge = &inst.edges[e];
                (edge.tail != "v").then(|| inst.sources_at(&edge.tail)[0])
            })
            .collect();
        let orig_dims: Vec<u64> = incoming
            .iter()
            .map(|&e| width_bits(&inst.edges[e].capacity, code.n, "incoming").map(|w| 1u64 << w))
            .collect::<Result<_>>()?;
        let orig_term_space = TupleSpace::new(&orig_dims)?;
        let orig_rows = &code.decoders[&term.id];
        let demanded = inst.demanded_sources(t);

        let space = TupleSpace::new(&vec![wide; incoming.len()])?;
        let mut rows = Vec::with_capacity(space.total() as usize);
        let mut orig_input = vec![0u64; incoming.len()];
        space.for_each(|input| {
            let packed = input[v_pos];
            let z = packed >> cell_bits;
            let j = packed & (cell_size - 1);
            let mut ok = true;
            for (pos, src) in side_src.iter().enumerate() {
                match src {
                    None => {
                        let edge_id = &inst.edges[incoming[pos]].id;
                        orig_input[pos] = code.edge_functions[edge_id][z as usize];
                    }
                    Some(src) => {
                        let yi = input[pos];
                        if yi >= new_range {
                            ok = false;
                            break;
                        }
                        let xi = partition.cell(*src, yi)[j as usize];
                        debug_assert!(xi < source_range);
                        let edge_id = &inst.edges[incoming[pos]].id;
                        orig_input[pos] = code.edge_functions[edge_id][xi as usize];
                    }
                }
            }
            if ok {
                let row = &orig_rows[orig_term_space.index_of(&orig_input) as usize];
                rows.push(
                    row.iter()
                        .zip(demanded.iter())
                        .map(|(&x, &s)| partition.cell_of(s, x))
                        .collect(),
                );
            } else {
                rows.push(vec![0; demanded.len()]);
            }
        });
        decoders.insert(term.id.clone(), rows);
    }

    let new_code = NetworkCode {
        n: n_prime,
        rate: Rational::ratio_u64(new_bits as u64, n_prime as u64),
        edge_functions,
        decoders,
    };

    // verification sweep: zero error plus byte-exact side payloads
    let new_ev = Evaluator::new(&inst, &new_code)?;
    let sweep = new_ev.source_space()?;
    if sweep.total() > params.budget {
        return Err(Error::Budget {
            needed: sweep.total() as u128,
            budget: params.budget,
        });
    }
    let side_idx: Vec<(usize, usize)> = spec
        .side_edges
        .iter()
        .map(|&(i, j)| {
            let idx = inst
                .edge_index(&format!("side:s{}->t{}", i + 1, j + 1))
                .unwrap();
            (idx, inst.source_index(&format!("s{}", i + 1)).unwrap())
        })
        .collect();
    let mut edge_symbols = vec![0u64; inst.edges.len()];
    let mut buf = Vec::new();
    let mut failing = 0u64;
    let mut sides_ok = true;
    sweep.for_each(|yy| {
        if new_ev.is_failure(yy, &mut edge_symbols, &mut buf) {
            failing += 1;
        }
        for &(eidx, src) in &side_idx {
            if edge_symbols[eidx] != yy[src] {
                sides_ok = false;
            }
        }
    });
    let eps_out = Rational::ratio_u64(failing, sweep.total());

    let mut verification = Verification {
        zero_error: eps_out.is_zero(),
        side_edges_verbatim: Some(sides_ok),
        bottleneck_bits: Some(n_prime),
        ..Default::default()
    };
    audit_pre_encoder(&partition, &pre, &a, &mut verification);

    let rn = code.rate.scale_u64(code.n as u64).to_f64();
    let asymptotic_blocklength = if eps_in < Rational::one() && rn > 1.0 {
        let one_minus = (&Rational::one() - &eps_in).to_f64();
        Some(code.n as f64 - one_minus.log2() + 2.0 * rn.log2())
    } else {
        None
    };

    let report = TransformReport {
        transform: "index-coding".to_string(),
        input: CodePoint {
            epsilon: eps_in.clone(),
            rate: code.rate.clone(),
            n: code.n,
            source_bits,
        },
        output: CodePoint {
            epsilon: eps_out,
            rate: new_code.rate.clone(),
            n: new_code.n,
            source_bits: new_bits,
        },
        cell_bits,
        delta: Rational::ratio_u64(cell_bits as u64, source_bits as u64),
        mode: params.mode,
        seed: params.seed,
        attempts_used,
        alpha: alpha_of(&eps_in, code.n),
        delta_formula: delta_of_epsilon(&eps_in, &code.rate, code.n).ok(),
        asymptotic_blocklength,
        verification,
    };
    Ok((
        ZeroErrorCode {
            code: new_code,
            partitions: partition,
            mode: params.mode,
            pre_encoder: pre,
            shared_index: shared,
        },
        report,
        inst,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedValue {
    pub edge: String,
    pub value: u64,
    /// Exact Pr[edge carries `value` | the tuple decodes correctly].
    pub conditional_probability: Rational,
    pub correct_tuples: u64,
    pub width_bits: u32,
    /// The averaging floor 2^-width the probability is guaranteed to meet.
    pub floor: Rational,
}

/// The most likely symbol on `edge` among correctly decoded source tuples,
/// smallest value on ties. Undefined when no tuple decodes correctly.
pub fn best_fixed_value(
    inst: &NetworkInstance,
    code: &NetworkCode,
    edge_id: &str,
    budget: u64,
) -> Result<FixedValue> {
    let ev = Evaluator::new(inst, code)?;
    let eidx = inst
        .edge_index(edge_id)
        .ok_or_else(|| Error::UnknownEdge(edge_id.to_string()))?;
    let space = ev.source_space()?;
    if space.total() > budget {
        return Err(Error::Budget {
            needed: space.total() as u128,
            budget,
        });
    }
    let width = ev.edge_width(eidx);
    let mut counts = vec![0u64; 1usize << width];
    let mut correct = 0u64;
    let mut edge_symbols = vec![0u64; inst.edges.len()];
    let mut buf = Vec::new();
    space.for_each(|x| {
        if !ev.is_failure(x, &mut edge_symbols, &mut buf) {
            correct += 1;
            counts[edge_symbols[eidx] as usize] += 1;
        }
    });
    if correct == 0 {
        return Err(Error::NoCorrectTuple);
    }
    let (value, &count) = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("alphabet is nonempty");
    Ok(FixedValue {
        edge: edge_id.to_string(),
        value: value as u64,
        conditional_probability: Rational::ratio_u64(count, correct),
        correct_tuples: correct,
        width_bits: width,
        floor: Rational::pow2(-(width as i64)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeRemovalReport {
    pub removed_edge: String,
    pub fixed: FixedValue,
    pub epsilon_in: Rational,
    pub epsilon_out: Rational,
    /// eps' + (1 - eps')(1 - 2^-width), the averaging-argument bound.
    pub bound: Rational,
    pub bound_holds: bool,
    /// 1 - (1 - eps') p*, the sharper bound using the realized probability.
    pub tight_bound: Rational,
    pub tight_bound_holds: bool,
}

pub struct EdgeRemovalOutcome {
    pub instance: NetworkInstance,
    pub code: NetworkCode,
    pub report: EdgeRemovalReport,
}

/// Remove `edge_id` and hard-code its best fixed value into every function
/// that consumed it. Only functions at the edge's head change; the
/// re-measured error is compared against the averaging bound exactly.
pub fn edge_removal_transform(
    inst: &NetworkInstance,
    code: &NetworkCode,
    edge_id: &str,
    budget: u64,
) -> Result<EdgeRemovalOutcome> {
    let fixed = best_fixed_value(inst, code, edge_id, budget)?;
    let (eps_in, _) = measure(inst, code, budget)?;
    let eidx = inst.edge_index(edge_id).expect("checked above");
    let head = inst.edges[eidx].head.clone();

    let ev = Evaluator::new(inst, code)?;
    let source_bits = ev.source_bits;
    drop(ev);

    let new_inst = remove_edge(inst, edge_id)?;
    let mut new_code = code.clone();
    new_code.edge_functions.remove(edge_id);

    // position of the removed edge among head's inputs (incoming edges
    // sorted by id; hosted sources, if any, come after and keep their spot)
    let incoming = inst.incoming_edges(&head);
    let removed_pos = incoming
        .iter()
        .position(|&e| e == eidx)
        .expect("edge reaches its head");
    let mut dims: Vec<u64> = incoming
        .iter()
        .map(|&e| width_bits(&inst.edges[e].capacity, code.n, "incoming").map(|w| 1u64 << w))
        .collect::<Result<_>>()?;
    for _ in inst.sources_at(&head) {
        dims.push(1u64 << source_bits);
    }
    let old_space = TupleSpace::new(&dims)?;

    let restrict = |table_len: usize, get: &dyn Fn(usize) -> Vec<u64>| -> Vec<Vec<u64>> {
        debug_assert_eq!(table_len as u64, old_space.total());
        let mut out = Vec::with_capacity((old_space.total() / dims[removed_pos]) as usize);
        let mut idx = 0usize;
        old_space.for_each(|tuple| {
            if tuple[removed_pos] == fixed.value {
                out.push(get(idx));
            }
            idx += 1;
        });
        out
    };

    for &g in inst.outgoing_edges(&head).iter() {
        let gid = inst.edges[g].id.clone();
        let table = code.edge_functions[&gid].clone();
        let new_table: Vec<u64> = restrict(table.len(), &|i| vec![table[i]])
            .into_iter()
            .map(|v| v[0])
            .collect();
        new_code.edge_functions.insert(gid, new_table);
    }
    for term in inst.terminals.iter().filter(|t| t.node == head) {
        let rows = code.decoders[&term.id].clone();
        let new_rows = restrict(rows.len(), &|i| rows[i].clone());
        new_code.decoders.insert(term.id.clone(), new_rows);
    }

    let (eps_out, _) = measure(&new_inst, &new_code, budget)?;
    let one = Rational::one();
    let keep = Rational::pow2(-(fixed.width_bits as i64));
    let bound = &eps_in + &(&(&one - &eps_in) * &(&one - &keep));
    let tight_bound = &one - &(&(&one - &eps_in) * &fixed.conditional_probability);
    let report = EdgeRemovalReport {
        removed_edge: edge_id.to_string(),
        bound_holds: eps_out <= bound,
        tight_bound_holds: eps_out <= tight_bound,
        fixed,
        epsilon_in: eps_in,
        epsilon_out: eps_out,
        bound,
        tight_bound,
    };
    Ok(EdgeRemovalOutcome {
        instance: new_inst,
        code: new_code,
        report,
    })
}

/// Everything a repair strategy may look at when the bottleneck goes away.
pub struct RemovalContext<'a> {
    pub extension: &'a SupernodeExtension,
    /// The extension instance with the bottleneck removed.
    pub instance: &'a NetworkInstance,
    /// The zero-error code on the full extension.
    pub code: &'a NetworkCode,
    pub removed_edge: &'a str,
    pub budget: u64,
}

/// A stand-in for the open edge-removal hypothesis: given a code that used
/// the removed edge, produce one that does not. Refusals are ordinary
/// outcomes and halt the pipeline with attribution.
pub trait EdgeRemovalStrategy {
    fn name(&self) -> &str;
    fn repair(&self, ctx: &RemovalContext<'_>) -> std::result::Result<NetworkCode, String>;
}

/// Fix the removed edge's best value and demand that the error does not
/// change; applicable exactly when the code never really needed the edge.
pub struct IdentityStrategy;

impl EdgeRemovalStrategy for IdentityStrategy {
    fn name(&self) -> &str {
        "identity"
    }

    fn repair(&self, ctx: &RemovalContext<'_>) -> std::result::Result<NetworkCode, String> {
        let outcome = edge_removal_transform(
            &ctx.extension.instance,
            ctx.code,
            ctx.removed_edge,
            ctx.budget,
        )
        .map_err(|e| e.to_string())?;
        if outcome.report.epsilon_out != outcome.report.epsilon_in {
            return Err(format!(
                "fixing {} changed the error from {} to {}",
                ctx.removed_edge, outcome.report.epsilon_in, outcome.report.epsilon_out
            ));
        }
        Ok(outcome.code)
    }
}

/// Always refuses; exercises the halt path.
pub struct AlwaysFailStrategy;

impl EdgeRemovalStrategy for AlwaysFailStrategy {
    fn name(&self) -> &str {
        "always-fail"
    }

    fn repair(&self, _ctx: &RemovalContext<'_>) -> std::result::Result<NetworkCode, String> {
        Err("strategy always fails".to_string())
    }
}

/// Project a code for the bottleneck-less extension back onto the base
/// instance: the relay's outputs are constants, each fresh source's forward
/// function composes into the old hosts' first-hop tables, and everything
/// else carries over. Failure behavior is identical tuple by tuple.
pub fn project_code_to_base(
    ext: &SupernodeExtension,
    i1: &NetworkInstance,
    code: &NetworkCode,
) -> Result<NetworkCode> {
    let ev = Evaluator::new(i1, code)?;
    let source_bits = ev.source_bits;
    drop(ev);

    // relay has no inputs in I1, so each downlink is a single constant
    let downlink_const: BTreeMap<&str, u64> = ext
        .layout
        .arms
        .iter()
        .map(|arm| {
            let table = &code.edge_functions[&arm.downlink_edge];
            debug_assert_eq!(table.len(), 1);
            (arm.downlink_edge.as_str(), table[0])
        })
        .collect();

    let mut edge_functions = BTreeMap::new();
    let hosts: Vec<&str> = {
        let mut h: Vec<&str> = ext
            .layout
            .arms
            .iter()
            .map(|a| a.old_host.as_str())
            .collect();
        h.sort();
        h.dedup();
        h
    };
    for host in hosts {
        let incoming = i1.incoming_edges(host);
        let dims: Vec<u64> = incoming
            .iter()
            .map(|&e| width_bits(&i1.edges[e].capacity, code.n, "incoming").map(|w| 1u64 << w))
            .collect::<Result<_>>()?;
        let space = TupleSpace::new(&dims)?;
        let hosted: Vec<&crate::instance::SupernodeArm> = ext
            .layout
            .arms
            .iter()
            .filter(|a| a.old_host == host)
            .collect();
        let k_h = hosted.len();
        let base_space = TupleSpace::uniform_pow2(k_h, source_bits)?;

        for &eidx in ext.base.outgoing_edges(host).iter() {
            let edge_id = &ext.base.edges[eidx].id;
            let i1_table = &code.edge_functions[edge_id];
            let mut table = Vec::with_capacity(base_space.total() as usize);
            let mut i1_input = vec![0u64; incoming.len()];
            base_space.for_each(|y_at| {
                for (pos, &e) in incoming.iter().enumerate() {
                    let id = i1.edges[e].id.as_str();
                    if let Some(&c) = downlink_const.get(id) {
                        i1_input[pos] = c;
                    } else if let Some(h_idx) = hosted.iter().position(|arm| arm.forward_edge == id)
                    {
                        let h_table = &code.edge_functions[id];
                        i1_input[pos] = h_table[y_at[h_idx] as usize];
                    } else {
                        // an original incoming edge cannot exist: old hosts
                        // hosted sources in the base instance
                        unreachable!("unexpected incoming edge {id} at {host}");
                    }
                }
                table.push(i1_table[space.index_of(&i1_input) as usize]);
            });
            edge_functions.insert(edge_id.clone(), table);
        }
    }

    for e in &ext.base.edges {
        if !edge_functions.contains_key(&e.id) {
            edge_functions.insert(e.id.clone(), code.edge_functions[&e.id].clone());
        }
    }

    Ok(NetworkCode {
        n: code.n,
        rate: code.rate.clone(),
        edge_functions,
        decoders: code.decoders.clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub step: String,
    pub description: String,
    pub epsilon: Rational,
    pub rate: Rational,
    pub n: u32,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PipelineOutcome {
    Completed,
    Halted { step: String, reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub stages: Vec<StageReport>,
    pub outcome: PipelineOutcome,
    pub strategy: String,
    pub cell_bits: u32,
    pub delta: Rational,
    pub alpha: Option<f64>,
    /// c1 = c2 + 1 + 2 log2(Rn) / (alpha n), when c2 and alpha are given.
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

pub struct PipelineStage {
    pub report: StageReport,
    pub instance: NetworkInstance,
    pub code: NetworkCode,
}

pub struct PipelineRun {
    pub stages: Vec<PipelineStage>,
    pub outcome: PipelineOutcome,
    pub report: PipelineReport,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub cell_bits: u32,
    /// Bottleneck capacity; defaults to max(cell_bits, 1) / n.
    pub delta: Option<Rational>,
    pub attempts: u32,
    pub seed: u64,
    pub budget: u64,
    /// Target residual error for steps (c) and (d); defaults to zero.
    pub epsilon_prime: Option<Rational>,
    /// Hypothesized edge-removal constant, reported only.
    pub c2: Option<f64>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            cell_bits: 1,
            delta: None,
            attempts: 64,
            seed: 0,
            budget: DEFAULT_BUDGET,
            epsilon_prime: None,
            c2: None,
        }
    }
}

/// The reduction chain: lift onto the supernode extension (a), make the
/// extension zero-error through the bottleneck (b), remove the bottleneck
/// and repair with the supplied strategy (c), project back onto the base
/// instance (d). Every step's error claim is re-measured; the first failed
/// verification halts the chain with attribution.
pub fn reduction_pipeline(
    inst: &NetworkInstance,
    code: &NetworkCode,
    options: &PipelineOptions,
    strategy: &dyn EdgeRemovalStrategy,
) -> Result<PipelineRun> {
    let budget = options.budget;
    let (eps_in, table_in) = measure(inst, code, budget)?;
    if eps_in >= Rational::one() {
        return Err(Error::Parameter(
            "input code fails on every tuple; nothing to reduce".into(),
        ));
    }
    let alpha = alpha_of(&eps_in, code.n);
    let delta = options
        .delta
        .clone()
        .unwrap_or_else(|| Rational::ratio_u64(options.cell_bits.max(1) as u64, code.n as u64));
    let target = options.epsilon_prime.clone().unwrap_or_else(Rational::zero);

    let mut stages: Vec<PipelineStage> = Vec::new();
    let halt = |stages: Vec<PipelineStage>, step: &str, reason: String, rep: PipelineReport| {
        let outcome = PipelineOutcome::Halted {
            step: step.to_string(),
            reason,
        };
        let mut report = rep;
        report.outcome = outcome.clone();
        Ok(PipelineRun {
            stages,
            outcome,
            report,
        })
    };
    let base_report = |stages: &[PipelineStage]| PipelineReport {
        stages: stages.iter().map(|s| s.report.clone()).collect(),
        outcome: PipelineOutcome::Completed,
        strategy: strategy.name().to_string(),
        cell_bits: options.cell_bits,
        delta: delta.clone(),
        alpha,
        c1: match (options.c2, alpha) {
            (Some(c2), Some(a)) if a > 0.0 => {
                let rn = code.rate.scale_u64(code.n as u64).to_f64();
                let adjusted = if target.is_zero() {
                    a
                } else {
                    a + 1.0 / code.n as f64
                };
                Some(c2 + 1.0 + 2.0 * rn.log2() / (adjusted * code.n as f64))
            }
            _ => None,
        },
        c2: options.c2,
    };

    // (a) lift onto the extension; failure behavior must match exactly
    let ext = build_supernode_extension(inst, &code.rate, &delta)?;
    let lifted = lift_code_to_extension(&ext, code)?;
    let (eps_a, table_a) = measure(&ext.instance, &lifted, budget)?;
    let verified_a = table_a == table_in;
    stages.push(PipelineStage {
        report: StageReport {
            step: "a".into(),
            description: "lift the code onto the supernode extension".into(),
            epsilon: eps_a.clone(),
            rate: lifted.rate.clone(),
            n: lifted.n,
            verified: verified_a,
        },
        instance: ext.instance.clone(),
        code: lifted,
    });
    if !verified_a {
        let rep = base_report(&stages);
        return halt(
            stages,
            "a",
            "lifted code does not reproduce the input failure table".into(),
            rep,
        );
    }

    // (b) zero-error through the bottleneck
    let params = SearchParams {
        attempts: options.attempts,
        seed: options.seed,
        mode: Mode::Diagonal,
        budget,
    };
    let (zec, rep_b) = match zero_error_transform_supernode(&ext, code, options.cell_bits, &params)
    {
        Ok(v) => v,
        Err(Error::NoGoodPartition { attempts }) => {
            let rep = base_report(&stages);
            return halt(
                stages,
                "b",
                format!("no good partition set within {attempts} attempts"),
                rep,
            );
        }
        Err(e) => return Err(e),
    };
    let verified_b =
        rep_b.verification.zero_error && rep_b.verification.link_symbols_in_range.unwrap_or(false);
    stages.push(PipelineStage {
        report: StageReport {
            step: "b".into(),
            description: "zero-error transform through the super-node".into(),
            epsilon: rep_b.output.epsilon.clone(),
            rate: zec.code.rate.clone(),
            n: zec.code.n,
            verified: verified_b,
        },
        instance: ext.instance.clone(),
        code: zec.code.clone(),
    });
    if !verified_b {
        let rep = base_report(&stages);
        return halt(stages, "b", "zero-error verification failed".into(), rep);
    }

    // (c) drop the bottleneck, repair with the strategy
    let i1 = remove_edge(&ext.instance, &ext.layout.bottleneck_edge)?;
    let ctx = RemovalContext {
        extension: &ext,
        instance: &i1,
        code: &zec.code,
        removed_edge: &ext.layout.bottleneck_edge,
        budget,
    };
    let repaired = match strategy.repair(&ctx) {
        Ok(c) => c,
        Err(reason) => {
            let rep = base_report(&stages);
            return halt(
                stages,
                "c",
                format!("strategy {:?} refused: {reason}", strategy.name()),
                rep,
            );
        }
    };
    let (eps_c, table_c) = measure(&i1, &repaired, budget)?;
    let verified_c = eps_c <= target;
    stages.push(PipelineStage {
        report: StageReport {
            step: "c".into(),
            description: "remove the bottleneck and repair".into(),
            epsilon: eps_c.clone(),
            rate: repaired.rate.clone(),
            n: repaired.n,
            verified: verified_c,
        },
        instance: i1.clone(),
        code: repaired.clone(),
    });
    if !verified_c {
        let rep = base_report(&stages);
        return halt(
            stages,
            "c",
            format!("repaired code has error {eps_c}, target {target}"),
            rep,
        );
    }

    // (d) project back onto the base instance
    let projected = project_code_to_base(&ext, &i1, &repaired)?;
    let (eps_d, table_d) = measure(inst, &projected, budget)?;
    let verified_d = table_d == table_c && eps_d <= target;
    stages.push(PipelineStage {
        report: StageReport {
            step: "d".into(),
            description: "project the repaired code onto the base instance".into(),
            epsilon: eps_d.clone(),
            rate: projected.rate.clone(),
            n: projected.n,
            verified: verified_d,
        },
        instance: inst.clone(),
        code: projected,
    });
    if !verified_d {
        let rep = base_report(&stages);
        return halt(
            stages,
            "d",
            "projected code does not reproduce the repaired failure table".into(),
            rep,
        );
    }

    let report = base_report(&stages);
    Ok(PipelineRun {
        stages,
        outcome: PipelineOutcome::Completed,
        report,
    })
}
