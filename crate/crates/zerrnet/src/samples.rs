//! Ready-made instances and codes: small networks used across the examples
//! and tests, plus a deterministic decoder-corruption helper for
//! manufacturing codes with a chosen error probability.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::code::NetworkCode;
use crate::error::Result;
use crate::instance::{
    build_index_coding_instance, Edge, IndexCodingSpec, NetworkInstance, Source, Terminal,
};
use crate::rat::Rational;
use crate::rng::substream;
use crate::tuple::TupleSpace;

fn edge(id: &str, tail: &str, head: &str, capacity: Rational) -> Edge {
    Edge {
        id: id.to_string(),
        tail: tail.to_string(),
        head: head.to_string(),
        capacity,
    }
}

/// One source, one edge `a -> b`, one terminal; the code forwards the source
/// symbol verbatim. Blocklength 1, rate = `source_bits`.
pub fn single_edge_identity(source_bits: u32) -> (NetworkInstance, NetworkCode) {
    let cap = Rational::from_u64(source_bits as u64);
    let inst = NetworkInstance::new(
        vec!["a".into(), "b".into()],
        vec![edge("e", "a", "b", cap)],
        vec![Source {
            id: "s".into(),
            node: "a".into(),
        }],
        vec![Terminal {
            id: "t".into(),
            node: "b".into(),
        }],
        vec![vec![1]],
        None,
        None,
    );
    let m = 1u64 << source_bits;
    let code = NetworkCode {
        n: 1,
        rate: Rational::from_u64(source_bits as u64),
        edge_functions: BTreeMap::from([("e".to_string(), (0..m).collect())]),
        decoders: BTreeMap::from([("t".to_string(), (0..m).map(|x| vec![x]).collect())]),
    };
    (inst, code)
}

/// Two sources co-located at `a`, one fat edge to `b`, one terminal that
/// demands both. The edge packs the pair `(x1, x2)` as `x1 * 2^bits + x2`.
pub fn colocated_pair(source_bits: u32) -> (NetworkInstance, NetworkCode) {
    let inst = NetworkInstance::new(
        vec!["a".into(), "b".into()],
        vec![edge(
            "e",
            "a",
            "b",
            Rational::from_u64(2 * source_bits as u64),
        )],
        vec![
            Source {
                id: "s1".into(),
                node: "a".into(),
            },
            Source {
                id: "s2".into(),
                node: "a".into(),
            },
        ],
        vec![Terminal {
            id: "t".into(),
            node: "b".into(),
        }],
        vec![vec![1], vec![1]],
        None,
        None,
    );
    let m = 1u64 << source_bits;
    let pair = TupleSpace::new(&[m, m]).unwrap();
    let mut table = Vec::with_capacity((m * m) as usize);
    pair.for_each(|x| table.push((x[0] << source_bits) | x[1]));
    let decoders = BTreeMap::from([(
        "t".to_string(),
        (0..m * m)
            .map(|packed| vec![packed >> source_bits, packed & (m - 1)])
            .collect(),
    )]);
    let code = NetworkCode {
        n: 1,
        rate: Rational::from_u64(source_bits as u64),
        edge_functions: BTreeMap::from([("e".to_string(), table)]),
        decoders,
    };
    (inst, code)
}

/// Two co-located sources fanned out to two terminals over separate fat
/// edges; `t1` demands both sources, `t2` demands only `s2`.
pub fn colocated_fork(source_bits: u32) -> (NetworkInstance, NetworkCode) {
    let cap = Rational::from_u64(2 * source_bits as u64);
    let inst = NetworkInstance::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![edge("e1", "a", "b", cap.clone()), edge("e2", "a", "c", cap)],
        vec![
            Source {
                id: "s1".into(),
                node: "a".into(),
            },
            Source {
                id: "s2".into(),
                node: "a".into(),
            },
        ],
        vec![
            Terminal {
                id: "t1".into(),
                node: "b".into(),
            },
            Terminal {
                id: "t2".into(),
                node: "c".into(),
            },
        ],
        vec![vec![1, 0], vec![1, 1]],
        None,
        None,
    );
    let m = 1u64 << source_bits;
    let pair = TupleSpace::new(&[m, m]).unwrap();
    let mut table = Vec::with_capacity((m * m) as usize);
    pair.for_each(|x| table.push((x[0] << source_bits) | x[1]));
    let code = NetworkCode {
        n: 1,
        rate: Rational::from_u64(source_bits as u64),
        edge_functions: BTreeMap::from([
            ("e1".to_string(), table.clone()),
            ("e2".to_string(), table),
        ]),
        decoders: BTreeMap::from([
            (
                "t1".to_string(),
                (0..m * m)
                    .map(|p| vec![p >> source_bits, p & (m - 1)])
                    .collect(),
            ),
            (
                "t2".to_string(),
                (0..m * m).map(|p| vec![p & (m - 1)]).collect(),
            ),
        ]),
    };
    (inst, code)
}

/// The classic butterfly: two unit-rate sources at distinct nodes, a shared
/// bottleneck carrying their XOR, and two terminals that each combine the
/// bottleneck output with one direct edge to recover both sources.
pub fn butterfly_xor() -> (NetworkInstance, NetworkCode) {
    let one = Rational::one();
    let inst = NetworkInstance::new(
        vec![
            "s1".into(),
            "s2".into(),
            "u".into(),
            "v".into(),
            "t1".into(),
            "t2".into(),
        ],
        vec![
            edge("s1->u", "s1", "u", one.clone()),
            edge("s2->u", "s2", "u", one.clone()),
            edge("u->v", "u", "v", one.clone()),
            edge("v->t1", "v", "t1", one.clone()),
            edge("v->t2", "v", "t2", one.clone()),
            edge("s1->t1", "s1", "t1", one.clone()),
            edge("s2->t2", "s2", "t2", one),
        ],
        vec![
            Source {
                id: "x1".into(),
                node: "s1".into(),
            },
            Source {
                id: "x2".into(),
                node: "s2".into(),
            },
        ],
        vec![
            Terminal {
                id: "d1".into(),
                node: "t1".into(),
            },
            Terminal {
                id: "d2".into(),
                node: "t2".into(),
            },
        ],
        vec![vec![1, 1], vec![1, 1]],
        None,
        None,
    );
    let identity = vec![0u64, 1];
    let code = NetworkCode {
        n: 1,
        rate: Rational::one(),
        edge_functions: BTreeMap::from([
            ("s1->u".to_string(), identity.clone()),
            ("s2->u".to_string(), identity.clone()),
            ("u->v".to_string(), vec![0, 1, 1, 0]),
            ("v->t1".to_string(), identity.clone()),
            ("v->t2".to_string(), identity.clone()),
            ("s1->t1".to_string(), identity.clone()),
            ("s2->t2".to_string(), identity),
        ]),
        decoders: BTreeMap::from([
            // inputs sorted by edge id: ("s1->t1", "v->t1") = (x1, z)
            (
                "d1".to_string(),
                (0..4u64)
                    .map(|i| vec![i >> 1, (i >> 1) ^ (i & 1)])
                    .collect(),
            ),
            // inputs: ("s2->t2", "v->t2") = (x2, z)
            (
                "d2".to_string(),
                (0..4u64)
                    .map(|i| vec![(i >> 1) ^ (i & 1), i >> 1])
                    .collect(),
            ),
        ]),
    };
    (inst, code)
}

/// A seven-node butterfly variant with the bottleneck split through a middle
/// node; instance only.
pub fn butterfly7() -> NetworkInstance {
    let one = Rational::one();
    NetworkInstance::new(
        vec![
            "s1".into(),
            "s2".into(),
            "u".into(),
            "m".into(),
            "v".into(),
            "t1".into(),
            "t2".into(),
        ],
        vec![
            edge("s1->u", "s1", "u", one.clone()),
            edge("s2->u", "s2", "u", one.clone()),
            edge("u->m", "u", "m", one.clone()),
            edge("m->v", "m", "v", one.clone()),
            edge("v->t1", "v", "t1", one.clone()),
            edge("v->t2", "v", "t2", one.clone()),
            edge("s1->t1", "s1", "t1", one.clone()),
            edge("s2->t2", "s2", "t2", one),
        ],
        vec![
            Source {
                id: "x1".into(),
                node: "s1".into(),
            },
            Source {
                id: "x2".into(),
                node: "s2".into(),
            },
        ],
        vec![
            Terminal {
                id: "d1".into(),
                node: "t1".into(),
            },
            Terminal {
                id: "d2".into(),
                node: "t2".into(),
            },
        ],
        vec![vec![1, 1], vec![1, 1]],
        None,
        None,
    )
}

/// An index-coding instance together with a zero-error code whose bottleneck
/// packs all k source symbols side by side (blocklength `k * source_bits`,
/// so the unit-capacity bottleneck is wide enough).
pub fn index_coding_packed(
    spec: &IndexCodingSpec,
    source_bits: u32,
) -> Result<(NetworkInstance, NetworkCode)> {
    let inst = build_index_coding_instance(spec)?;
    let k = spec.k as u32;
    let n = k * source_bits;
    let width = 1u64 << n;
    let m = 1u64 << source_bits;

    let mut edge_functions = BTreeMap::new();
    for i in 0..spec.k {
        // (s_i, u): forward the hosted source symbol
        edge_functions.insert(format!("s{}->u", i + 1), (0..m).collect::<Vec<u64>>());
        // (v, t_i): forward the bottleneck symbol
        edge_functions.insert(format!("v->t{}", i + 1), (0..width).collect::<Vec<u64>>());
    }
    // (u, v): pack the k incoming symbols, in edge-id order of (s_i, u).
    // Inputs range over the full edge alphabet; symbols beyond the source
    // alphabet never occur and map to 0.
    let in_space = TupleSpace::new(&vec![width; spec.k])?;
    let mut pack = Vec::with_capacity(in_space.total() as usize);
    let id_order = source_feed_order(spec.k);
    in_space.for_each(|x| {
        if x.iter().any(|&v| v >= m) {
            pack.push(0);
        } else {
            let mut z = 0u64;
            for &i in &id_order {
                z = (z << source_bits) | x[i];
            }
            pack.push(z);
        }
    });
    edge_functions.insert("u->v".to_string(), pack);
    for &(i, j) in &spec.side_edges {
        edge_functions.insert(
            format!("side:s{}->t{}", i + 1, j + 1),
            (0..m).collect::<Vec<u64>>(),
        );
    }

    // decoders: unpack the bottleneck copy, ignore side edges
    let mut decoders = BTreeMap::new();
    for j in 0..spec.k {
        let tid = format!("t{}", j + 1);
        let incoming = inst.incoming_edges(&tid);
        let dims: Vec<u64> = incoming
            .iter()
            .map(|&e| {
                let cap = &inst.edges[e].capacity;
                1u64 << cap.scale_u64(n as u64).to_u64().unwrap()
            })
            .collect();
        let bottleneck_pos = incoming
            .iter()
            .position(|&e| inst.edges[e].id == format!("v->{tid}"))
            .unwrap();
        let demanded: Vec<usize> = (0..spec.k)
            .filter(|&s| spec.requirement[s][j] == 1)
            .collect();
        let space = TupleSpace::new(&dims)?;
        let mut rows = Vec::with_capacity(space.total() as usize);
        space.for_each(|input| {
            let z = input[bottleneck_pos];
            let row: Vec<u64> = demanded
                .iter()
                .map(|&s| {
                    let pos = id_order.iter().position(|&i| i == s).unwrap();
                    (z >> (source_bits as usize * (spec.k - 1 - pos))) & (m - 1)
                })
                .collect();
            rows.push(row);
        });
        decoders.insert(tid, rows);
    }

    let code = NetworkCode {
        n,
        rate: Rational::ratio_u64(source_bits as u64, n as u64),
        edge_functions,
        decoders,
    };
    Ok((inst, code))
}

/// Sorted order of the feed edges `s1->u .. sk->u` as source indices; for
/// k >= 10 the lexicographic edge order differs from numeric order.
fn source_feed_order(k: usize) -> Vec<usize> {
    let mut ids: Vec<(String, usize)> = (0..k).map(|i| (format!("s{}->u", i + 1), i)).collect();
    ids.sort();
    ids.into_iter().map(|(_, i)| i).collect()
}

/// The k=2 cross-side-information instance with the rate-1 XOR code: the
/// bottleneck carries `x1 ^ x2` and each terminal cancels it with its side
/// symbol. Requires `side_edges = {(0,1), (1,0)}` and identity demands.
pub fn index_coding_xor(source_bits: u32) -> Result<(NetworkInstance, NetworkCode)> {
    let spec = IndexCodingSpec {
        k: 2,
        side_edges: [(0, 1), (1, 0)].into_iter().collect(),
        requirement: vec![vec![1, 0], vec![0, 1]],
    };
    let inst = build_index_coding_instance(&spec)?;
    let n = source_bits;
    let m = 1u64 << n;
    let identity: Vec<u64> = (0..m).collect();

    let pair = TupleSpace::new(&[m, m])?;
    let mut xor = Vec::with_capacity((m * m) as usize);
    pair.for_each(|x| xor.push(x[0] ^ x[1]));

    let mut edge_functions = BTreeMap::new();
    for id in [
        "s1->u",
        "s2->u",
        "v->t1",
        "v->t2",
        "side:s1->t2",
        "side:s2->t1",
    ] {
        edge_functions.insert(id.to_string(), identity.clone());
    }
    edge_functions.insert("u->v".to_string(), xor);

    // t1 inputs sorted: ("side:s2->t1", "v->t1") = (x2, z); demands x1 = z ^ x2
    let mut d1 = Vec::with_capacity((m * m) as usize);
    pair.for_each(|x| d1.push(vec![x[0] ^ x[1]]));
    // t2 inputs sorted: ("side:s1->t2", "v->t2") = (x1, z); demands x2 = z ^ x1
    let mut d2 = Vec::with_capacity((m * m) as usize);
    pair.for_each(|x| d2.push(vec![x[0] ^ x[1]]));

    let code = NetworkCode {
        n,
        rate: Rational::one(),
        edge_functions,
        decoders: BTreeMap::from([("t1".to_string(), d1), ("t2".to_string(), d2)]),
    };
    Ok((inst, code))
}

/// Corrupt `count` distinct rows of one terminal's decoder, chosen by seeded
/// shuffle; each hit row gets its first output symbol bumped by one. On
/// codes where decoder inputs biject with source tuples this injects exactly
/// `count` failing tuples.
pub fn corrupt_decoder(code: &NetworkCode, terminal: &str, count: usize, seed: u64) -> NetworkCode {
    let mut out = code.clone();
    let source_bits = out.source_bits().expect("integer source width");
    let m = 1u64 << source_bits;
    let dec = out
        .decoders
        .get_mut(terminal)
        .unwrap_or_else(|| panic!("no decoder {terminal:?}"));
    assert!(
        count <= dec.len(),
        "cannot corrupt {count} of {} rows",
        dec.len()
    );
    let mut rows: Vec<usize> = (0..dec.len()).collect();
    rows.shuffle(&mut substream(seed, "corrupt-decoder", 0));
    for &r in rows.iter().take(count) {
        assert!(!dec[r].is_empty());
        dec[r][0] = (dec[r][0] + 1) % m;
    }
    out
}

/// Like `corrupt_decoder`, but only touches decoder rows the code actually
/// reaches on some source tuple, so every corrupted row raises the error.
pub fn corrupt_reachable_decoder(
    inst: &NetworkInstance,
    code: &NetworkCode,
    terminal: &str,
    count: usize,
    seed: u64,
) -> NetworkCode {
    use crate::code::Evaluator;
    use std::collections::BTreeSet;

    let ev = Evaluator::new(inst, code).expect("code attaches to instance");
    let t = inst
        .terminal_index(terminal)
        .unwrap_or_else(|| panic!("no terminal {terminal:?}"));
    let space = ev.source_space().expect("enumerable source space");
    let mut reachable: BTreeSet<u64> = BTreeSet::new();
    let mut edge_symbols = vec![0u64; inst.edges.len()];
    let mut buf = Vec::new();
    space.for_each(|x| {
        ev.eval_edges(x, &mut edge_symbols, &mut buf);
        reachable.insert(ev.decoder_index(t, &edge_symbols, &mut buf));
    });
    drop(ev);

    let mut rows: Vec<u64> = reachable.into_iter().collect();
    rows.shuffle(&mut substream(seed, "corrupt-reachable", 0));
    assert!(
        count <= rows.len(),
        "cannot corrupt {count} of {} reachable rows",
        rows.len()
    );
    let mut out = code.clone();
    let m = 1u64 << out.source_bits().expect("integer source width");
    let dec = out.decoders.get_mut(terminal).unwrap();
    for &r in rows.iter().take(count) {
        dec[r as usize][0] = (dec[r as usize][0] + 1) % m;
    }
    out
}
