//! Explicit finite-blocklength network codes and exact error measurement.
//!
//! A code assigns every edge a total lookup table over the symbols arriving
//! at its tail node (plus any source symbols hosted there), and every
//! terminal a total decoder table over its incoming-edge symbols. At
//! blocklength `n`, an edge of capacity `c` carries symbols in
//! `[2^{c n}]`; `c n` must be a nonnegative integer or the code does not
//! attach. All sources share one rate `R` with `R n` integer.
//!
//! Function-table inputs are ordered: incoming edges by edge id, then hosted
//! sources by source id. Tables are row-major with the last input fastest.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{topological_order, validate_instance, NetworkInstance};
use crate::rat::Rational;
use crate::rng::substream;
use crate::tuple::TupleSpace;
use crate::DEFAULT_BUDGET;

use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkCode {
    pub n: u32,
    #[serde(rename = "R")]
    pub rate: Rational,
    /// Per-edge table, keyed by edge id; row-major over the input ordering.
    pub edge_functions: BTreeMap<String, Vec<u64>>,
    /// Per-terminal decoder, keyed by terminal id; each row is the decoded
    /// tuple for the demanded sources in source-id order.
    pub decoders: BTreeMap<String, Vec<Vec<u64>>>,
}

impl NetworkCode {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("code serializes");
        s.push('\n');
        s
    }

    /// Source symbol width in bits (`R n`); errors unless it is an integer.
    pub fn source_bits(&self) -> Result<u32> {
        width_bits(&self.rate, self.n, "source rate")
    }
}

/// `cap * n` as a bit width, rejecting non-integers and widths over 32 bits.
pub fn width_bits(cap: &Rational, n: u32, what: &str) -> Result<u32> {
    let w = cap.scale_u64(n as u64);
    if w.is_negative() {
        return Err(Error::Parameter(format!("{what}: negative width")));
    }
    match w.to_u64() {
        Some(v) if v <= 32 => Ok(v as u32),
        Some(v) => Err(Error::Parameter(format!(
            "{what}: width {v} bits exceeds the 32-bit limit"
        ))),
        None => Err(Error::Parameter(format!(
            "{what}: {cap} * n = {w} is not an integer number of bits"
        ))),
    }
}

#[derive(Debug, Clone, Copy)]
enum InputRef {
    Edge(usize),
    Source(usize),
}

/// A code bound to an instance with all orderings and strides resolved.
/// Construction performs the full structural cross-validation.
#[derive(Debug)]
pub struct Evaluator<'a> {
    inst: &'a NetworkInstance,
    pub source_bits: u32,
    pub k: usize,
    edge_widths: Vec<u32>,
    edge_order: Vec<usize>,
    edge_inputs: Vec<Vec<InputRef>>,
    edge_spaces: Vec<TupleSpace>,
    edge_tables: Vec<&'a [u64]>,
    term_inputs: Vec<Vec<usize>>,
    term_spaces: Vec<TupleSpace>,
    term_tables: Vec<&'a [Vec<u64>]>,
    term_demands: Vec<Vec<usize>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a NetworkInstance, code: &'a NetworkCode) -> Result<Self> {
        let violations = validate_instance(inst);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(
                violations.iter().map(|v| v.to_string()).collect(),
            ));
        }
        if code.n == 0 {
            return Err(Error::Parameter("blocklength n must be positive".into()));
        }
        if code.rate.is_negative() {
            return Err(Error::Parameter("rate must be nonnegative".into()));
        }
        let source_bits = code.source_bits()?;
        let k = inst.sources.len();

        let order = topological_order(inst)?;
        let topo_pos: BTreeMap<&str, usize> = order
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();

        let mut edge_widths = Vec::with_capacity(inst.edges.len());
        for e in &inst.edges {
            edge_widths.push(width_bits(
                &e.capacity,
                code.n,
                &format!("edge {:?}", e.id),
            )?);
        }

        let mut edge_inputs = Vec::with_capacity(inst.edges.len());
        let mut edge_spaces = Vec::with_capacity(inst.edges.len());
        let mut edge_tables = Vec::with_capacity(inst.edges.len());
        for (ei, e) in inst.edges.iter().enumerate() {
            let mut inputs = Vec::new();
            let mut dims = Vec::new();
            for &inc in &inst.incoming_edges(&e.tail) {
                inputs.push(InputRef::Edge(inc));
                dims.push(1u64 << edge_widths[inc]);
            }
            for &s in &inst.sources_at(&e.tail) {
                inputs.push(InputRef::Source(s));
                dims.push(1u64 << source_bits);
            }
            let space = TupleSpace::new(&dims)?;
            let table = code
                .edge_functions
                .get(&e.id)
                .ok_or_else(|| Error::Structural {
                    location: format!("edge {:?}", e.id),
                    reason: "no function table".into(),
                })?;
            if table.len() as u64 != space.total() {
                return Err(Error::Structural {
                    location: format!("edge {:?}", e.id),
                    reason: format!(
                        "table has {} entries, input space has {}",
                        table.len(),
                        space.total()
                    ),
                });
            }
            let range = 1u64 << edge_widths[ei];
            if let Some(bad) = table.iter().find(|&&v| v >= range) {
                return Err(Error::Structural {
                    location: format!("edge {:?}", e.id),
                    reason: format!("table value {bad} outside alphabet [{range}]"),
                });
            }
            edge_inputs.push(inputs);
            edge_spaces.push(space);
            edge_tables.push(table.as_slice());
        }
        for id in code.edge_functions.keys() {
            if inst.edge_index(id).is_none() {
                return Err(Error::Structural {
                    location: format!("edge {id:?}"),
                    reason: "function table for an edge the instance does not have".into(),
                });
            }
        }

        let mut term_inputs = Vec::with_capacity(inst.terminals.len());
        let mut term_spaces = Vec::with_capacity(inst.terminals.len());
        let mut term_tables = Vec::with_capacity(inst.terminals.len());
        let mut term_demands = Vec::with_capacity(inst.terminals.len());
        for (ti, t) in inst.terminals.iter().enumerate() {
            let inputs = inst.incoming_edges(&t.node);
            let dims: Vec<u64> = inputs.iter().map(|&e| 1u64 << edge_widths[e]).collect();
            let space = TupleSpace::new(&dims)?;
            let table = code.decoders.get(&t.id).ok_or_else(|| Error::Structural {
                location: format!("terminal {:?}", t.id),
                reason: "no decoder table".into(),
            })?;
            if table.len() as u64 != space.total() {
                return Err(Error::Structural {
                    location: format!("terminal {:?}", t.id),
                    reason: format!(
                        "decoder has {} rows, input space has {}",
                        table.len(),
                        space.total()
                    ),
                });
            }
            let demands = inst.demanded_sources(ti);
            let range = 1u64 << source_bits;
            for row in table.iter() {
                if row.len() != demands.len() {
                    return Err(Error::Structural {
                        location: format!("terminal {:?}", t.id),
                        reason: format!(
                            "decoder row has {} entries, terminal demands {}",
                            row.len(),
                            demands.len()
                        ),
                    });
                }
                if let Some(bad) = row.iter().find(|&&v| v >= range) {
                    return Err(Error::Structural {
                        location: format!("terminal {:?}", t.id),
                        reason: format!("decoded symbol {bad} outside alphabet [{range}]"),
                    });
                }
            }
            term_inputs.push(inputs);
            term_spaces.push(space);
            term_tables.push(table.as_slice());
            term_demands.push(demands);
        }
        for id in code.decoders.keys() {
            if inst.terminal_index(id).is_none() {
                return Err(Error::Structural {
                    location: format!("terminal {id:?}"),
                    reason: "decoder for a terminal the instance does not have".into(),
                });
            }
        }

        let mut edge_order: Vec<usize> = (0..inst.edges.len()).collect();
        edge_order.sort_by_key(|&e| (topo_pos[inst.edges[e].tail.as_str()], e));

        Ok(Evaluator {
            inst,
            source_bits,
            k,
            edge_widths,
            edge_order,
            edge_inputs,
            edge_spaces,
            edge_tables,
            term_inputs,
            term_spaces,
            term_tables,
            term_demands,
        })
    }

    pub fn instance(&self) -> &NetworkInstance {
        self.inst
    }

    pub fn edge_width(&self, edge_idx: usize) -> u32 {
        self.edge_widths[edge_idx]
    }

    pub fn source_space(&self) -> Result<TupleSpace> {
        TupleSpace::uniform_pow2(self.k, self.source_bits)
    }

    fn check_tuple(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.k {
            return Err(Error::Parameter(format!(
                "source tuple has {} entries, instance has {} sources",
                x.len(),
                self.k
            )));
        }
        let range = 1u64 << self.source_bits;
        if let Some(bad) = x.iter().find(|&&v| v >= range) {
            return Err(Error::Parameter(format!(
                "source symbol {bad} outside alphabet [{range}]"
            )));
        }
        Ok(())
    }

    /// Forward pass: fill `edge_symbols` (indexed like `inst.edges`).
    pub fn eval_edges(&self, x: &[u64], edge_symbols: &mut [u64], buf: &mut Vec<u64>) {
        for &e in &self.edge_order {
            buf.clear();
            for input in &self.edge_inputs[e] {
                buf.push(match *input {
                    InputRef::Edge(idx) => edge_symbols[idx],
                    InputRef::Source(idx) => x[idx],
                });
            }
            edge_symbols[e] = self.edge_tables[e][self.edge_spaces[e].index_of(buf) as usize];
        }
    }

    /// Decode terminal `t` from computed edge symbols.
    pub fn decode_terminal(&self, t: usize, edge_symbols: &[u64], buf: &mut Vec<u64>) -> &[u64] {
        &self.term_tables[t][self.decoder_index(t, edge_symbols, buf) as usize]
    }

    /// Flat decoder-table row index terminal `t` consults.
    pub fn decoder_index(&self, t: usize, edge_symbols: &[u64], buf: &mut Vec<u64>) -> u64 {
        buf.clear();
        for &e in &self.term_inputs[t] {
            buf.push(edge_symbols[e]);
        }
        self.term_spaces[t].index_of(buf)
    }

    /// True iff some terminal's decoded tuple differs from its demand.
    pub fn is_failure(&self, x: &[u64], edge_symbols: &mut [u64], buf: &mut Vec<u64>) -> bool {
        self.eval_edges(x, edge_symbols, buf);
        self.failing_terminal(x, edge_symbols, buf).is_some()
    }

    /// First terminal (in id order) that misdecodes `x`, if any.
    pub fn failing_terminal(
        &self,
        x: &[u64],
        edge_symbols: &[u64],
        buf: &mut Vec<u64>,
    ) -> Option<usize> {
        for t in 0..self.term_inputs.len() {
            let decoded = self.decode_terminal(t, edge_symbols, buf);
            let demands = &self.term_demands[t];
            if decoded.iter().zip(demands.iter()).any(|(&d, &s)| d != x[s]) {
                return Some(t);
            }
        }
        None
    }

    fn scratch(&self) -> (Vec<u64>, Vec<u64>) {
        (vec![0u64; self.inst.edges.len()], Vec::new())
    }
}

/// One forward pass over the network, as id-keyed maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub edge_symbols: BTreeMap<String, u64>,
    pub terminal_outputs: BTreeMap<String, Vec<u64>>,
}

pub fn evaluate(inst: &NetworkInstance, code: &NetworkCode, x: &[u64]) -> Result<Evaluation> {
    let ev = Evaluator::new(inst, code)?;
    ev.check_tuple(x)?;
    let (mut edges, mut buf) = ev.scratch();
    ev.eval_edges(x, &mut edges, &mut buf);
    let edge_symbols = inst
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.clone(), edges[i]))
        .collect();
    let terminal_outputs = inst
        .terminals
        .iter()
        .enumerate()
        .map(|(t, term)| {
            (
                term.id.clone(),
                ev.decode_terminal(t, &edges, &mut buf).to_vec(),
            )
        })
        .collect();
    Ok(Evaluation {
        edge_symbols,
        terminal_outputs,
    })
}

/// 0 iff every terminal decodes its demanded tuple on realization `x`.
pub fn failure_indicator(inst: &NetworkInstance, code: &NetworkCode, x: &[u64]) -> Result<u8> {
    let ev = Evaluator::new(inst, code)?;
    ev.check_tuple(x)?;
    let (mut edges, mut buf) = ev.scratch();
    Ok(ev.is_failure(x, &mut edges, &mut buf) as u8)
}

/// The failure indicator over every source tuple, bit per tuple in row-major
/// source order. Its mean is the code's exact error probability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureTable {
    pub k: usize,
    pub source_bits: u32,
    bits: Vec<u8>,
}

impl FailureTable {
    pub fn constant(k: usize, source_bits: u32, value: u8) -> Result<Self> {
        let space = TupleSpace::uniform_pow2(k, source_bits)?;
        Ok(FailureTable {
            k,
            source_bits,
            bits: vec![value.min(1); space.total() as usize],
        })
    }

    pub fn from_fn(k: usize, source_bits: u32, mut f: impl FnMut(&[u64]) -> bool) -> Result<Self> {
        let space = TupleSpace::uniform_pow2(k, source_bits)?;
        let mut bits = Vec::with_capacity(space.total() as usize);
        space.for_each(|x| bits.push(f(x) as u8));
        Ok(FailureTable {
            k,
            source_bits,
            bits,
        })
    }

    pub fn space(&self) -> TupleSpace {
        TupleSpace::uniform_pow2(self.k, self.source_bits).expect("table dims are valid")
    }

    pub fn total(&self) -> u64 {
        self.bits.len() as u64
    }

    pub fn get_flat(&self, index: u64) -> u8 {
        self.bits[index as usize]
    }

    pub fn get(&self, x: &[u64]) -> u8 {
        self.bits[self.space().index_of(x) as usize]
    }

    pub fn set_flat(&mut self, index: u64, value: u8) {
        self.bits[index as usize] = value.min(1);
    }

    pub fn ones(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    /// Exact failure fraction (the mean of the indicator).
    pub fn epsilon(&self) -> Rational {
        Rational::ratio_u64(self.ones(), self.total())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: FailureTable = serde_json::from_str(text)?;
        let space = TupleSpace::uniform_pow2(t.k, t.source_bits)?;
        if t.bits.len() as u64 != space.total() {
            return Err(Error::Parameter(format!(
                "failure table has {} bits, tuple space has {}",
                t.bits.len(),
                space.total()
            )));
        }
        if t.bits.iter().any(|&b| b > 1) {
            return Err(Error::Parameter("failure table entries must be 0/1".into()));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("failure table serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub epsilon: Rational,
    pub failing_tuples: u64,
    pub total_tuples: u64,
    pub n: u32,
    pub rate: Rational,
    pub k: usize,
    pub source_bits: u32,
    pub per_terminal_failures: BTreeMap<String, u64>,
    /// Optional per-edge symbol histograms over all source tuples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_value_counts: Option<BTreeMap<String, Vec<u64>>>,
}

/// Exhaustive error measurement with the default enumeration budget.
pub fn exact_error(
    inst: &NetworkInstance,
    code: &NetworkCode,
) -> Result<(ErrorReport, FailureTable)> {
    exact_error_with_budget(inst, code, DEFAULT_BUDGET, false)
}

pub fn exact_error_with_budget(
    inst: &NetworkInstance,
    code: &NetworkCode,
    budget: u64,
    trace_edges: bool,
) -> Result<(ErrorReport, FailureTable)> {
    let ev = Evaluator::new(inst, code)?;
    let space = ev.source_space()?;
    if space.total() > budget {
        return Err(Error::Budget {
            needed: space.total() as u128,
            budget,
        });
    }

    let mut bits = Vec::with_capacity(space.total() as usize);
    let mut per_terminal = vec![0u64; inst.terminals.len()];
    let mut edge_counts: Option<Vec<Vec<u64>>> = trace_edges.then(|| {
        (0..inst.edges.len())
            .map(|e| vec![0u64; 1usize << ev.edge_width(e)])
            .collect()
    });
    let (mut edges, mut buf) = ev.scratch();

    space.for_each(|x| {
        ev.eval_edges(x, &mut edges, &mut buf);
        if let Some(counts) = edge_counts.as_mut() {
            for (e, &sym) in edges.iter().enumerate() {
                counts[e][sym as usize] += 1;
            }
        }
        let mut failed = false;
        for (t, misdecodes) in per_terminal.iter_mut().enumerate() {
            let decoded = ev.decode_terminal(t, &edges, &mut buf);
            let demands = &ev.term_demands[t];
            if decoded.iter().zip(demands.iter()).any(|(&d, &s)| d != x[s]) {
                *misdecodes += 1;
                failed = true;
            }
        }
        bits.push(failed as u8);
    });

    let table = FailureTable {
        k: ev.k,
        source_bits: ev.source_bits,
        bits,
    };
    let report = ErrorReport {
        epsilon: table.epsilon(),
        failing_tuples: table.ones(),
        total_tuples: table.total(),
        n: code.n,
        rate: code.rate.clone(),
        k: ev.k,
        source_bits: ev.source_bits,
        per_terminal_failures: inst
            .terminals
            .iter()
            .zip(per_terminal)
            .map(|(t, c)| (t.id.clone(), c))
            .collect(),
        edge_value_counts: edge_counts.map(|counts| {
            inst.edges
                .iter()
                .zip(counts)
                .map(|(e, c)| (e.id.clone(), c))
                .collect()
        }),
    };
    Ok((report, table))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorEstimate {
    pub trials: u64,
    pub failures: u64,
    pub estimate: Rational,
}

/// Monte-Carlo error estimate over `trials` uniform i.i.d. source tuples.
/// Trial `i` draws from the substream `(seed, "error-trial", i)`, so the
/// estimate is reproducible and independent of evaluation order.
pub fn estimate_error(
    inst: &NetworkInstance,
    code: &NetworkCode,
    trials: u64,
    seed: u64,
) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let ev = Evaluator::new(inst, code)?;
    let range = 1u64 << ev.source_bits;
    let k = ev.k;
    estimate_error_over(
        inst,
        code,
        (0..trials).map(move |i| {
            let mut rng = substream(seed, "error-trial", i);
            (0..k).map(|_| rng.gen_range(0..range)).collect()
        }),
    )
}

/// Measure the failure fraction over an explicit tuple stream. Feeding the
/// full enumeration through here reproduces `exact_error` exactly; that is
/// the equivalence hook the tests pin down.
pub fn estimate_error_over(
    inst: &NetworkInstance,
    code: &NetworkCode,
    tuples: impl IntoIterator<Item = Vec<u64>>,
) -> Result<ErrorEstimate> {
    let ev = Evaluator::new(inst, code)?;
    let (mut edges, mut buf) = ev.scratch();
    let mut trials = 0u64;
    let mut failures = 0u64;
    for x in tuples {
        ev.check_tuple(&x)?;
        trials += 1;
        if ev.is_failure(&x, &mut edges, &mut buf) {
            failures += 1;
        }
    }
    if trials == 0 {
        return Err(Error::Parameter("empty tuple stream".into()));
    }
    Ok(ErrorEstimate {
        trials,
        failures,
        estimate: Rational::ratio_u64(failures, trials),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub blocklength_matches: bool,
    pub rate_matches: bool,
    pub exact_error: Rational,
    pub error_bound: Rational,
}

/// Is this code a witness that the instance is (epsilon, rate, n)-feasible?
pub fn check_feasibility(
    inst: &NetworkInstance,
    code: &NetworkCode,
    epsilon: &Rational,
    rate: &Rational,
    n: u32,
) -> Result<FeasibilityVerdict> {
    let (report, _) = exact_error(inst, code)?;
    let blocklength_matches = code.n == n;
    let rate_matches = &code.rate == rate;
    Ok(FeasibilityVerdict {
        feasible: blocklength_matches && rate_matches && report.epsilon <= *epsilon,
        blocklength_matches,
        rate_matches,
        exact_error: report.epsilon,
        error_bound: epsilon.clone(),
    })
}
