//! Blocklength extension: run an inner network code over `c'` rounds and
//! protect each source's round sequence with an outer block code over
//! `[2^source_bits]` of minimum distance `ceil(4 eps c') + 1`, so any trial
//! in which at most `2 eps c'` rounds misdecode is corrected outright.
//!
//! Outer codes come from a seeded greedy scan (keep any word at distance
//! d or more from everything kept so far). When the whole word space is
//! scanned the result is maximal and meets the Gilbert-Varshamov volume
//! bound; larger spaces are sampled under an explicit scan budget and the
//! bound is not asserted.

use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::code::{exact_error_with_budget, Evaluator, NetworkCode};
use crate::error::{Error, Result};
use crate::instance::NetworkInstance;
use crate::rat::Rational;
use crate::rng::{derive_seed, substream};
use crate::DEFAULT_BUDGET;

/// Scan at most this many words when the space is too large to enumerate.
pub const GV_SCAN_BUDGET: u64 = 1 << 16;
/// Stop the greedy once this many codewords are kept in budgeted mode.
pub const GV_MAX_CODEWORDS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCode {
    pub length: usize,
    pub q: u64,
    pub codewords: Vec<Vec<u64>>,
    /// Claimed minimum distance; `min_distance` recomputes it exactly.
    pub min_distance: usize,
}

impl BlockCode {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("block code serializes");
        s.push('\n');
        s
    }

    /// log_q(#codewords) / length.
    pub fn rate(&self) -> f64 {
        (self.codewords.len() as f64).ln() / (self.q as f64).ln() / self.length as f64
    }
}

pub fn hamming(a: &[u64], b: &[u64]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Exact pairwise minimum Hamming distance; needs at least two codewords.
pub fn min_distance(code: &BlockCode) -> Result<usize> {
    if code.codewords.len() < 2 {
        return Err(Error::Parameter(
            "minimum distance needs at least two codewords".into(),
        ));
    }
    let mut best = code.length + 1;
    for (i, a) in code.codewords.iter().enumerate() {
        for b in &code.codewords[i + 1..] {
            best = best.min(hamming(a, b));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct GvOutcome {
    pub code: BlockCode,
    pub scanned: u64,
    /// Whole word space scanned: the code is maximal and the volume bound
    /// below applies.
    pub full_scan: bool,
    /// ceil(q^length / V_q(length, d-1)), set on full scans.
    pub gv_lower_bound: Option<u64>,
    pub gv_bound_met: Option<bool>,
}

/// Greedy distance-d code over `[q]^length` with the default budgets.
pub fn gv_greedy_code(length: usize, q: u64, d: usize, seed: u64) -> Result<GvOutcome> {
    gv_greedy_code_with_budget(length, q, d, seed, GV_SCAN_BUDGET, GV_MAX_CODEWORDS)
}

pub fn gv_greedy_code_with_budget(
    length: usize,
    q: u64,
    d: usize,
    seed: u64,
    scan_limit: u64,
    max_codewords: usize,
) -> Result<GvOutcome> {
    if q < 2 {
        return Err(Error::Parameter("alphabet size must be at least 2".into()));
    }
    if length == 0 || d == 0 || d > length {
        return Err(Error::Parameter(format!(
            "need 1 <= d <= length, got d={d}, length={length}"
        )));
    }

    let space: Option<u64> = {
        let mut total: u64 = 1;
        let mut ok = true;
        for _ in 0..length {
            match total.checked_mul(q) {
                Some(t) if t <= scan_limit => total = t,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        ok.then_some(total)
    };

    let mut kept: Vec<Vec<u64>> = Vec::new();
    let mut scanned = 0u64;
    let full_scan = space.is_some();

    match space {
        Some(total) => {
            let mut order: Vec<u64> = (0..total).collect();
            order.shuffle(&mut substream(seed, "gv-scan", 0));
            let mut word = vec![0u64; length];
            for flat in order {
                let mut v = flat;
                for slot in word.iter_mut().rev() {
                    *slot = v % q;
                    v /= q;
                }
                scanned += 1;
                // d = 1: distinct words always qualify, skip the scan
                if d == 1 || kept.iter().all(|c| hamming(c, &word) >= d) {
                    kept.push(word.clone());
                }
            }
        }
        None => {
            let mut rng = substream(seed, "gv-sample", 0);
            let mut word = vec![0u64; length];
            while scanned < scan_limit && kept.len() < max_codewords {
                for slot in word.iter_mut() {
                    *slot = rng.gen_range(0..q);
                }
                scanned += 1;
                if kept.iter().all(|c| hamming(c, &word) >= d) {
                    kept.push(word.clone());
                }
            }
        }
    }

    let (gv_lower_bound, gv_bound_met) = if full_scan {
        let total = space.unwrap() as u128;
        let mut volume: u128 = 0;
        let mut binom: u128 = 1; // C(length, i)
        let mut pow: u128 = 1; // (q-1)^i
        for i in 0..d as u128 {
            volume += binom * pow;
            binom = binom * (length as u128 - i) / (i + 1);
            pow *= (q - 1) as u128;
        }
        let bound = total.div_ceil(volume) as u64;
        (Some(bound), Some(kept.len() as u64 >= bound))
    } else {
        (None, None)
    };

    Ok(GvOutcome {
        code: BlockCode {
            length,
            q,
            codewords: kept,
            min_distance: d,
        },
        scanned,
        full_scan,
        gv_lower_bound,
        gv_bound_met,
    })
}

/// Apply an independent uniformly random relabeling of `[q]` to each
/// coordinate. Distances are untouched, so the minimum distance carries
/// over. Coordinate `c` draws from `(seed, "coordinate-permutation", c)`.
pub fn permute_coordinates(code: &BlockCode, seed: u64) -> BlockCode {
    let perms: Vec<Vec<u64>> = (0..code.length)
        .map(|c| {
            let mut p: Vec<u64> = (0..code.q).collect();
            p.shuffle(&mut substream(seed, "coordinate-permutation", c as u64));
            p
        })
        .collect();
    BlockCode {
        length: code.length,
        q: code.q,
        codewords: code
            .codewords
            .iter()
            .map(|w| {
                w.iter()
                    .enumerate()
                    .map(|(c, &s)| perms[c][s as usize])
                    .collect()
            })
            .collect(),
        min_distance: code.min_distance,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decoded {
    pub index: usize,
    pub codeword: Vec<u64>,
    pub distance: usize,
}

/// Closest codeword by Hamming distance, smallest index on ties. Unique
/// whenever the distance is within floor((d-1)/2).
pub fn nearest_codeword_decode(word: &[u64], code: &BlockCode) -> Result<Decoded> {
    if word.len() != code.length {
        return Err(Error::Parameter(format!(
            "word length {} does not match code length {}",
            word.len(),
            code.length
        )));
    }
    if let Some(bad) = word.iter().find(|&&s| s >= code.q) {
        return Err(Error::Parameter(format!(
            "symbol {bad} outside alphabet [{}]",
            code.q
        )));
    }
    if code.codewords.is_empty() {
        return Err(Error::Parameter("code has no codewords".into()));
    }
    let mut best = 0usize;
    let mut best_dist = usize::MAX;
    for (i, c) in code.codewords.iter().enumerate() {
        let dist = hamming(word, c);
        if dist < best_dist {
            best = i;
            best_dist = dist;
        }
    }
    Ok(Decoded {
        index: best,
        codeword: code.codewords[best].clone(),
        distance: best_dist,
    })
}

/// The q-ary entropy `x log_q(q-1) - x log_q(x) - (1-x) log_q(1-x)` on
/// `[0, 1 - 1/q]`, with the limit value 0 at x = 0.
pub fn q_ary_entropy(q: u64, x: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::Parameter("alphabet size must be at least 2".into()));
    }
    let cap = 1.0 - 1.0 / q as f64;
    if !(0.0..=cap).contains(&x) {
        return Err(Error::Parameter(format!(
            "x = {x} outside [0, {cap}] for q = {q}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let lq = (q as f64).ln();
    let log_q = |v: f64| v.ln() / lq;
    let tail = if x == 1.0 {
        0.0
    } else {
        -(1.0 - x) * log_q(1.0 - x)
    };
    Ok(x * log_q((q - 1) as f64) - x * log_q(x) + tail)
}

/// The composed protocol: `rounds` uses of the inner code, one outer code
/// per source (a shared greedy base under independent per-source coordinate
/// permutations), nearest-codeword decoding at each terminal.
#[derive(Debug, Clone)]
pub struct ConcatenatedProtocol {
    pub instance: NetworkInstance,
    pub inner: NetworkCode,
    pub inner_epsilon: Rational,
    pub rounds: usize,
    pub outer_codes: Vec<BlockCode>,
    /// 2 eps c': corruption up to here is always corrected.
    pub decode_radius: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub success: bool,
    /// Largest Hamming corruption of any (terminal, source) word.
    pub max_word_distance: usize,
    /// max_word_distance <= 2 eps c'.
    pub within_radius: bool,
    /// Rounds on which some terminal misdecoded some demanded source.
    pub failing_rounds: usize,
}

impl ConcatenatedProtocol {
    /// Number of messages per source (the codeword count).
    pub fn message_count(&self) -> u64 {
        self.outer_codes[0].codewords.len() as u64
    }

    pub fn encode(&self, source: usize, y: u64) -> &[u64] {
        &self.outer_codes[source].codewords[y as usize]
    }

    /// Decode one source's received word: (message index, distance).
    pub fn decode_word(&self, source: usize, word: &[u64]) -> Result<(u64, usize)> {
        let d = nearest_codeword_decode(word, &self.outer_codes[source])?;
        Ok((d.index as u64, d.distance))
    }

    /// Transmit the encoded words for `y` over `rounds` uses of the inner
    /// code and decode every terminal's demands.
    pub fn run_trial(&self, ev: &Evaluator<'_>, y: &[u64]) -> Result<TrialOutcome> {
        let k = self.instance.sources.len();
        if y.len() != k {
            return Err(Error::Parameter(format!(
                "expected {k} messages, got {}",
                y.len()
            )));
        }
        let m = self.message_count();
        if let Some(bad) = y.iter().find(|&&v| v >= m) {
            return Err(Error::Parameter(format!("message {bad} outside [{m}]")));
        }

        let words: Vec<&[u64]> = (0..k).map(|i| self.encode(i, y[i])).collect();
        // received[t][d][round]
        let mut received: Vec<Vec<Vec<u64>>> = self
            .instance
            .terminals
            .iter()
            .enumerate()
            .map(|(t, _)| vec![vec![0u64; self.rounds]; self.instance.demanded_sources(t).len()])
            .collect();

        let mut edge_symbols = vec![0u64; self.instance.edges.len()];
        let mut buf = Vec::new();
        let mut x = vec![0u64; k];
        let mut failing_rounds = 0usize;
        for round in 0..self.rounds {
            for i in 0..k {
                x[i] = words[i][round];
            }
            ev.eval_edges(&x, &mut edge_symbols, &mut buf);
            let mut round_failed = false;
            for (t, words_at_t) in received.iter_mut().enumerate() {
                let decoded = ev.decode_terminal(t, &edge_symbols, &mut buf).to_vec();
                let demands = self.instance.demanded_sources(t);
                for (d, (&z, &src)) in decoded.iter().zip(demands.iter()).enumerate() {
                    words_at_t[d][round] = z;
                    if z != x[src] {
                        round_failed = true;
                    }
                }
            }
            if round_failed {
                failing_rounds += 1;
            }
        }

        let mut success = true;
        let mut max_dist = 0usize;
        for (t, words_at_t) in received.iter().enumerate() {
            let demands = self.instance.demanded_sources(t);
            for (d, &src) in demands.iter().enumerate() {
                max_dist = max_dist.max(hamming(&words_at_t[d], words[src]));
                let (decoded_y, _) = self.decode_word(src, &words_at_t[d])?;
                if decoded_y != y[src] {
                    success = false;
                }
            }
        }
        Ok(TrialOutcome {
            success,
            max_word_distance: max_dist,
            within_radius: Rational::from_u64(max_dist as u64) <= self.decode_radius,
            failing_rounds,
        })
    }

    /// Seeded end-to-end measurement; trial `t` draws its messages from
    /// `(seed, "extension-trial", t)`.
    pub fn monte_carlo(&self, trials: u64, seed: u64) -> Result<McReport> {
        if trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        let ev = Evaluator::new(&self.instance, &self.inner)?;
        let k = self.instance.sources.len();
        let m = self.message_count();
        let mut failures = 0u64;
        let mut protected_trials = 0u64;
        let mut protected_failures = 0u64;
        let mut max_seen = 0usize;
        for t in 0..trials {
            let mut rng = substream(seed, "extension-trial", t);
            let y: Vec<u64> = (0..k).map(|_| rng.gen_range(0..m)).collect();
            let outcome = self.run_trial(&ev, &y)?;
            max_seen = max_seen.max(outcome.max_word_distance);
            if !outcome.success {
                failures += 1;
            }
            if outcome.within_radius {
                protected_trials += 1;
                if !outcome.success {
                    protected_failures += 1;
                }
            }
        }
        Ok(McReport {
            trials,
            failures,
            estimate: Rational::ratio_u64(failures, trials),
            protected_trials,
            protected_failures,
            max_word_distance_seen: max_seen as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McReport {
    pub trials: u64,
    pub failures: u64,
    pub estimate: Rational,
    /// Trials whose worst word corruption stayed within 2 eps c'.
    pub protected_trials: u64,
    /// Protected trials that nonetheless misdecoded; always zero when the
    /// outer distance meets its contract.
    pub protected_failures: u64,
    pub max_word_distance_seen: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionReport {
    pub inner_epsilon: Rational,
    pub rounds: usize,
    /// ceil(4 eps c') + 1.
    pub required_distance: usize,
    pub refused: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal_reason: Option<String>,
    /// 1 - 5 sqrt(eps): the asymptotic outer-rate target.
    pub rate_bound_sqrt: f64,
    /// 1 - H_q(4 eps + 1/c'), when the argument is in the entropy domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_bound_entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codewords: Option<usize>,
    /// Realized outer rate log_q(codewords) / c'.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_rate: Option<f64>,
    /// outer_rate * R, over total blocklength c' n.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_rate: Option<f64>,
    pub total_blocklength: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gv_full_scan: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<McReport>,
}

pub struct ExtensionOutcome {
    pub protocol: Option<ConcatenatedProtocol>,
    pub report: ExtensionReport,
}

/// Build and measure the concatenated protocol. Refuses (with the rate
/// bounds reported) when the required outer distance cannot fit in `rounds`
/// or the greedy code degenerates.
pub fn extend_blocklength(
    inst: &NetworkInstance,
    code: &NetworkCode,
    rounds: usize,
    seed: u64,
    trials: u64,
) -> Result<ExtensionOutcome> {
    extend_blocklength_with_budget(inst, code, rounds, seed, trials, DEFAULT_BUDGET)
}

pub fn extend_blocklength_with_budget(
    inst: &NetworkInstance,
    code: &NetworkCode,
    rounds: usize,
    seed: u64,
    trials: u64,
    budget: u64,
) -> Result<ExtensionOutcome> {
    if rounds == 0 {
        return Err(Error::Parameter("rounds must be at least 1".into()));
    }
    let ev = Evaluator::new(inst, code)?;
    let source_bits = ev.source_bits;
    drop(ev);
    let q = 1u64 << source_bits;
    if q < 2 {
        return Err(Error::Parameter(
            "inner code carries no information to protect".into(),
        ));
    }

    let (report_in, _) = exact_error_with_budget(inst, code, budget, false)?;
    let eps = report_in.epsilon.clone();

    let four_eps_c = eps.scale_u64(4 * rounds as u64);
    let required_distance = (four_eps_c.ceil_u64() + 1) as usize;
    let radius = eps.scale_u64(2 * rounds as u64);

    let rate_bound_sqrt = 1.0 - 5.0 * eps.to_f64().sqrt();
    let entropy_arg = eps.to_f64() * 4.0 + 1.0 / rounds as f64;
    let rate_bound_entropy = q_ary_entropy(q, entropy_arg).ok().map(|h| 1.0 - h);
    let total_blocklength = rounds as u64 * code.n as u64;

    let refuse = |reason: String| ExtensionOutcome {
        protocol: None,
        report: ExtensionReport {
            inner_epsilon: eps.clone(),
            rounds,
            required_distance,
            refused: true,
            refusal_reason: Some(reason),
            rate_bound_sqrt,
            rate_bound_entropy,
            codewords: None,
            outer_rate: None,
            achieved_rate: None,
            total_blocklength,
            gv_full_scan: None,
            monte_carlo: None,
        },
    };

    if required_distance > rounds {
        return Ok(refuse(format!(
            "required outer distance {required_distance} exceeds {rounds} rounds"
        )));
    }

    let gv = gv_greedy_code(
        rounds,
        q,
        required_distance,
        derive_seed(seed, "gv-base", 0),
    )?;
    if gv.code.codewords.len() < 2 {
        return Ok(refuse(format!(
            "greedy outer code kept {} codewords",
            gv.code.codewords.len()
        )));
    }

    let k = inst.sources.len();
    let outer_codes: Vec<BlockCode> = (0..k)
        .map(|i| permute_coordinates(&gv.code, derive_seed(seed, "source-permutation", i as u64)))
        .collect();

    let protocol = ConcatenatedProtocol {
        instance: inst.clone(),
        inner: code.clone(),
        inner_epsilon: eps.clone(),
        rounds,
        outer_codes,
        decode_radius: radius,
    };
    let mc = protocol.monte_carlo(trials, seed)?;

    let m = protocol.message_count() as usize;
    let outer_rate = protocol.outer_codes[0].rate();
    let achieved_rate = outer_rate * code.rate.to_f64();
    let report = ExtensionReport {
        inner_epsilon: eps,
        rounds,
        required_distance,
        refused: false,
        refusal_reason: None,
        rate_bound_sqrt,
        rate_bound_entropy,
        codewords: Some(m),
        outer_rate: Some(outer_rate),
        achieved_rate: Some(achieved_rate),
        total_blocklength,
        gv_full_scan: Some(gv.full_scan),
        monte_carlo: Some(mc),
    };
    Ok(ExtensionOutcome {
        protocol: Some(protocol),
        report,
    })
}
