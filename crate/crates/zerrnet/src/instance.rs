//! Network-coding instances: a DAG with edge capacities, logical sources and
//! terminals attached to host nodes, and a 0/1 requirement matrix saying
//! which terminal demands which source.
//!
//! Instances are kept in a canonical form: nodes, edges, sources, and
//! terminals are sorted by id, and the requirement matrix rows/columns follow
//! the sorted source/terminal order. All operations are pure; builders return
//! new instances.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::rat::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub id: String,
    pub node: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminal {
    pub id: String,
    pub node: String,
}

/// An index-coding instance template: k sources feed a unit-capacity
/// bottleneck, every terminal hears the bottleneck output, and terminal `j`
/// additionally hears source `i` directly for each pair `(i, j)` in
/// `side_edges`. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCodingSpec {
    pub k: usize,
    pub side_edges: BTreeSet<(usize, usize)>,
    pub requirement: Vec<Vec<u8>>,
}

impl IndexCodingSpec {
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.k == 0 {
            out.push("k must be positive".to_string());
        }
        for &(i, j) in &self.side_edges {
            if i >= self.k || j >= self.k {
                out.push(format!("side edge ({i}, {j}) outside [0, {})", self.k));
            }
        }
        if self.requirement.len() != self.k
            || self.requirement.iter().any(|row| row.len() != self.k)
        {
            out.push(format!("requirement matrix must be {0}x{0}", self.k));
        }
        for (i, row) in self.requirement.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b > 1 {
                    out.push(format!("requirement[{i}][{j}] = {b} is not 0/1"));
                }
            }
        }
        out
    }
}

/// Where the supernode builder put everything, keyed by source id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupernodeArm {
    pub source_id: String,
    pub new_node: String,
    pub old_host: String,
    pub forward_edge: String,
    pub uplink_edge: String,
    pub downlink_edge: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupernodeLayout {
    pub arms: Vec<SupernodeArm>,
    pub super_node: String,
    pub relay_node: String,
    pub bottleneck_edge: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "InstanceRepr", into = "InstanceRepr")]
pub struct NetworkInstance {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub sources: Vec<Source>,
    pub terminals: Vec<Terminal>,
    /// requirement[s][t] = 1 iff terminal t demands source s, indexed in the
    /// canonical (sorted) source/terminal order.
    pub requirement: Vec<Vec<u8>>,
    pub index_coding: Option<IndexCodingSpec>,
    pub supernode: Option<SupernodeLayout>,
}

/// JSON shape of an instance file; converted to/from the canonical form.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceRepr {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    sources: Vec<Source>,
    terminals: Vec<Terminal>,
    requirement: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index_coding: Option<IndexCodingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    supernode: Option<SupernodeLayout>,
}

impl From<InstanceRepr> for NetworkInstance {
    fn from(r: InstanceRepr) -> Self {
        NetworkInstance::new(
            r.nodes,
            r.edges,
            r.sources,
            r.terminals,
            r.requirement,
            r.index_coding,
            r.supernode,
        )
    }
}

impl From<NetworkInstance> for InstanceRepr {
    fn from(i: NetworkInstance) -> Self {
        InstanceRepr {
            nodes: i.nodes,
            edges: i.edges,
            sources: i.sources,
            terminals: i.terminals,
            requirement: i.requirement,
            index_coding: i.index_coding,
            supernode: i.supernode,
        }
    }
}

impl NetworkInstance {
    /// Build an instance, canonicalizing the order of everything. The
    /// requirement matrix is given in the same order as the source/terminal
    /// rosters passed in and is permuted along with them.
    pub fn new(
        mut nodes: Vec<String>,
        mut edges: Vec<Edge>,
        sources: Vec<Source>,
        terminals: Vec<Terminal>,
        requirement: Vec<Vec<u8>>,
        index_coding: Option<IndexCodingSpec>,
        supernode: Option<SupernodeLayout>,
    ) -> Self {
        nodes.sort();
        edges.sort_by(|a, b| a.id.cmp(&b.id));

        let mut src_order: Vec<usize> = (0..sources.len()).collect();
        src_order.sort_by(|&a, &b| sources[a].id.cmp(&sources[b].id));
        let mut term_order: Vec<usize> = (0..terminals.len()).collect();
        term_order.sort_by(|&a, &b| terminals[a].id.cmp(&terminals[b].id));

        let shape_ok = requirement.len() == sources.len()
            && requirement.iter().all(|row| row.len() == terminals.len());
        let requirement = if shape_ok {
            src_order
                .iter()
                .map(|&s| term_order.iter().map(|&t| requirement[s][t]).collect())
                .collect()
        } else {
            requirement
        };
        let sources = src_order.iter().map(|&s| sources[s].clone()).collect();
        let terminals = term_order.iter().map(|&t| terminals[t].clone()).collect();

        NetworkInstance {
            nodes,
            edges,
            sources,
            terminals,
            requirement,
            index_coding,
            supernode,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(id)).ok()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok()
    }

    pub fn source_index(&self, id: &str) -> Option<usize> {
        self.sources
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .ok()
    }

    pub fn terminal_index(&self, id: &str) -> Option<usize> {
        self.terminals
            .binary_search_by(|t| t.id.as_str().cmp(id))
            .ok()
    }

    /// Incoming edge indices of `node`, in edge-id order.
    pub fn incoming_edges(&self, node: &str) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].head == node)
            .collect()
    }

    /// Outgoing edge indices of `node`, in edge-id order.
    pub fn outgoing_edges(&self, node: &str) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].tail == node)
            .collect()
    }

    /// Source indices hosted at `node`, in source-id order.
    pub fn sources_at(&self, node: &str) -> Vec<usize> {
        (0..self.sources.len())
            .filter(|&s| self.sources[s].node == node)
            .collect()
    }

    /// Source indices demanded by terminal `t`, in source-id order.
    pub fn demanded_sources(&self, t: usize) -> Vec<usize> {
        (0..self.sources.len())
            .filter(|&s| self.requirement[s][t] == 1)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateNode {
        node: String,
    },
    DuplicateEdge {
        edge: String,
    },
    DuplicateSource {
        source: String,
    },
    DuplicateTerminal {
        terminal: String,
    },
    EdgeEndpointUnknown {
        edge: String,
        endpoint: String,
        node: String,
    },
    SourceHostUnknown {
        source: String,
        node: String,
    },
    TerminalHostUnknown {
        terminal: String,
        node: String,
    },
    NegativeCapacity {
        edge: String,
    },
    Cycle {
        witness: Vec<String>,
    },
    SourceHostHasIncoming {
        source: String,
        node: String,
        edge: String,
    },
    TerminalHostHasOutgoing {
        terminal: String,
        node: String,
        edge: String,
    },
    RequirementShape {
        expected_rows: usize,
        expected_cols: usize,
    },
    RequirementEntry {
        row: usize,
        col: usize,
        value: u8,
    },
    TerminalDemandsNothing {
        terminal: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode { node } => write!(f, "duplicate node id {node:?}"),
            Violation::DuplicateEdge { edge } => write!(f, "duplicate edge id {edge:?}"),
            Violation::DuplicateSource { source } => write!(f, "duplicate source id {source:?}"),
            Violation::DuplicateTerminal { terminal } => {
                write!(f, "duplicate terminal id {terminal:?}")
            }
            Violation::EdgeEndpointUnknown {
                edge,
                endpoint,
                node,
            } => {
                write!(
                    f,
                    "edge {edge:?} {endpoint} references unknown node {node:?}"
                )
            }
            Violation::SourceHostUnknown { source, node } => {
                write!(f, "source {source:?} hosted at unknown node {node:?}")
            }
            Violation::TerminalHostUnknown { terminal, node } => {
                write!(f, "terminal {terminal:?} hosted at unknown node {node:?}")
            }
            Violation::NegativeCapacity { edge } => {
                write!(f, "edge {edge:?} has negative capacity")
            }
            Violation::Cycle { witness } => write!(f, "cycle: {}", witness.join(" -> ")),
            Violation::SourceHostHasIncoming { source, node, edge } => write!(
                f,
                "source {source:?} host {node:?} has incoming edge {edge:?}"
            ),
            Violation::TerminalHostHasOutgoing {
                terminal,
                node,
                edge,
            } => write!(
                f,
                "terminal {terminal:?} host {node:?} has outgoing edge {edge:?}"
            ),
            Violation::RequirementShape {
                expected_rows,
                expected_cols,
            } => write!(
                f,
                "requirement matrix must be {expected_rows}x{expected_cols}"
            ),
            Violation::RequirementEntry { row, col, value } => {
                write!(f, "requirement[{row}][{col}] = {value} is not 0/1")
            }
            Violation::TerminalDemandsNothing { terminal } => {
                write!(f, "terminal {terminal:?} demands no source")
            }
        }
    }
}

/// Check every structural invariant; an empty report means the instance is
/// well-formed. Violations are data, not failures.
pub fn validate_instance(inst: &NetworkInstance) -> Vec<Violation> {
    let mut out = Vec::new();

    for w in inst.nodes.windows(2) {
        if w[0] == w[1] {
            out.push(Violation::DuplicateNode { node: w[0].clone() });
        }
    }
    for w in inst.edges.windows(2) {
        if w[0].id == w[1].id {
            out.push(Violation::DuplicateEdge {
                edge: w[0].id.clone(),
            });
        }
    }
    for w in inst.sources.windows(2) {
        if w[0].id == w[1].id {
            out.push(Violation::DuplicateSource {
                source: w[0].id.clone(),
            });
        }
    }
    for w in inst.terminals.windows(2) {
        if w[0].id == w[1].id {
            out.push(Violation::DuplicateTerminal {
                terminal: w[0].id.clone(),
            });
        }
    }

    let known: BTreeSet<&str> = inst.nodes.iter().map(|n| n.as_str()).collect();
    for e in &inst.edges {
        for (endpoint, node) in [("tail", &e.tail), ("head", &e.head)] {
            if !known.contains(node.as_str()) {
                out.push(Violation::EdgeEndpointUnknown {
                    edge: e.id.clone(),
                    endpoint: endpoint.to_string(),
                    node: node.clone(),
                });
            }
        }
        if e.capacity.is_negative() {
            out.push(Violation::NegativeCapacity { edge: e.id.clone() });
        }
    }
    for s in &inst.sources {
        if !known.contains(s.node.as_str()) {
            out.push(Violation::SourceHostUnknown {
                source: s.id.clone(),
                node: s.node.clone(),
            });
        }
    }
    for t in &inst.terminals {
        if !known.contains(t.node.as_str()) {
            out.push(Violation::TerminalHostUnknown {
                terminal: t.id.clone(),
                node: t.node.clone(),
            });
        }
    }

    if let Err(Error::Cyclic { witness }) = topological_order(inst) {
        out.push(Violation::Cycle { witness });
    }

    for s in &inst.sources {
        for &e in inst.incoming_edges(&s.node).iter().take(1) {
            out.push(Violation::SourceHostHasIncoming {
                source: s.id.clone(),
                node: s.node.clone(),
                edge: inst.edges[e].id.clone(),
            });
        }
    }
    for t in &inst.terminals {
        for &e in inst.outgoing_edges(&t.node).iter().take(1) {
            out.push(Violation::TerminalHostHasOutgoing {
                terminal: t.id.clone(),
                node: t.node.clone(),
                edge: inst.edges[e].id.clone(),
            });
        }
    }

    let shape_ok = inst.requirement.len() == inst.sources.len()
        && inst
            .requirement
            .iter()
            .all(|row| row.len() == inst.terminals.len());
    if !shape_ok {
        out.push(Violation::RequirementShape {
            expected_rows: inst.sources.len(),
            expected_cols: inst.terminals.len(),
        });
    } else {
        for (i, row) in inst.requirement.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b > 1 {
                    out.push(Violation::RequirementEntry {
                        row: i,
                        col: j,
                        value: b,
                    });
                }
            }
        }
        for (j, t) in inst.terminals.iter().enumerate() {
            if inst.requirement.iter().all(|row| row[j] == 0) {
                out.push(Violation::TerminalDemandsNothing {
                    terminal: t.id.clone(),
                });
            }
        }
    }

    out
}

/// A topological order of the nodes, deterministic with ties broken by node
/// id. Errors with a cycle witness if the edge relation is cyclic.
pub fn topological_order(inst: &NetworkInstance) -> Result<Vec<String>> {
    let mut indegree: BTreeMap<&str, usize> = inst.nodes.iter().map(|n| (n.as_str(), 0)).collect();
    for e in &inst.edges {
        if indegree.contains_key(e.tail.as_str()) {
            if let Some(d) = indegree.get_mut(e.head.as_str()) {
                *d += 1;
            }
        }
    }

    let mut ready: BTreeSet<&str> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&n, _)| n)
        .collect();
    let mut order = Vec::with_capacity(inst.nodes.len());
    let mut remaining = indegree.clone();

    while let Some(&node) = ready.iter().next() {
        ready.remove(node);
        remaining.remove(node);
        order.push(node.to_string());
        for e in &inst.edges {
            if e.tail == node {
                if let Some(d) = remaining.get_mut(e.head.as_str()) {
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(e.head.as_str());
                    }
                }
            }
        }
    }

    if order.len() != inst.nodes.len() {
        return Err(Error::Cyclic {
            witness: cycle_witness(inst, &remaining),
        });
    }
    Ok(order)
}

/// Walk successor pointers among the stuck nodes until one repeats.
fn cycle_witness(inst: &NetworkInstance, stuck: &BTreeMap<&str, usize>) -> Vec<String> {
    let start = match stuck.keys().next() {
        Some(&n) => n,
        None => return Vec::new(),
    };
    let mut path: Vec<&str> = vec![start];
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    seen.insert(start, 0);
    let mut cur = start;
    loop {
        let next = inst
            .edges
            .iter()
            .find(|e| e.tail == cur && stuck.contains_key(e.head.as_str()))
            .map(|e| e.head.as_str());
        let next = match next {
            Some(n) => n,
            None => return path.iter().map(|s| s.to_string()).collect(),
        };
        if let Some(&pos) = seen.get(next) {
            let mut cycle: Vec<String> = path[pos..].iter().map(|s| s.to_string()).collect();
            cycle.push(next.to_string());
            return cycle;
        }
        seen.insert(next, path.len());
        path.push(next);
        cur = next;
    }
}

/// Instantiate the index-coding template: nodes `s1..sk, t1..tk, u, v`;
/// edges `(s_i, u)`, the bottleneck `(u, v)`, `(v, t_j)`, and one direct
/// edge per side-information pair. All capacities are 1.
pub fn build_index_coding_instance(spec: &IndexCodingSpec) -> Result<NetworkInstance> {
    let problems = spec.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidInstance(problems));
    }
    let k = spec.k;
    let one = Rational::one();

    let mut nodes: Vec<String> = Vec::with_capacity(2 * k + 2);
    let mut edges = Vec::new();
    let mut sources = Vec::with_capacity(k);
    let mut terminals = Vec::with_capacity(k);

    for i in 0..k {
        let s = format!("s{}", i + 1);
        let t = format!("t{}", i + 1);
        sources.push(Source {
            id: s.clone(),
            node: s.clone(),
        });
        terminals.push(Terminal {
            id: t.clone(),
            node: t.clone(),
        });
        edges.push(Edge {
            id: format!("{s}->u"),
            tail: s.clone(),
            head: "u".to_string(),
            capacity: one.clone(),
        });
        edges.push(Edge {
            id: format!("v->{t}"),
            tail: "v".to_string(),
            head: t.clone(),
            capacity: one.clone(),
        });
        nodes.push(s);
        nodes.push(t);
    }
    nodes.push("u".to_string());
    nodes.push("v".to_string());
    edges.push(Edge {
        id: "u->v".to_string(),
        tail: "u".to_string(),
        head: "v".to_string(),
        capacity: one.clone(),
    });
    for &(i, j) in &spec.side_edges {
        edges.push(Edge {
            id: format!("side:s{}->t{}", i + 1, j + 1),
            tail: format!("s{}", i + 1),
            head: format!("t{}", j + 1),
            capacity: one.clone(),
        });
    }

    Ok(NetworkInstance::new(
        nodes,
        edges,
        sources,
        terminals,
        spec.requirement.clone(),
        Some(spec.clone()),
        None,
    ))
}

/// The supernode construction plus everything needed to use it afterwards.
#[derive(Debug, Clone)]
pub struct SupernodeExtension {
    /// The original instance the extension was built from.
    pub base: NetworkInstance,
    /// The extended instance: fresh per-source feed nodes, a super-node that
    /// sees every source symbol, and a relay reached through one bottleneck.
    pub instance: NetworkInstance,
    pub layout: SupernodeLayout,
}

/// Extend `inst` with k fresh source nodes, a super-node, and a relay.
///
/// Per source (in canonical order): a capacity-`rate` edge from its fresh
/// node to the old host, a capacity-`rate` edge to the super-node; plus one
/// capacity-`delta` bottleneck from super-node to relay and capacity-`delta`
/// edges from the relay back to each old host. The source roster moves to
/// the fresh nodes (keeping source ids, so the requirement matrix is
/// untouched); terminals are unchanged. Adds k+2 nodes and 3k+1 edges.
pub fn build_supernode_extension(
    inst: &NetworkInstance,
    rate: &Rational,
    delta: &Rational,
) -> Result<SupernodeExtension> {
    let problems = validate_instance(inst);
    if !problems.is_empty() {
        return Err(Error::InvalidInstance(
            problems.iter().map(|v| v.to_string()).collect(),
        ));
    }
    if delta.is_zero() || delta.is_negative() {
        return Err(Error::Parameter("delta must be positive".into()));
    }
    if rate.is_zero() || rate.is_negative() {
        return Err(Error::Parameter("rate must be positive".into()));
    }

    let super_node = "sn:super".to_string();
    let relay_node = "sn:relay".to_string();
    let bottleneck_edge = "sn:bottleneck".to_string();

    let mut nodes = inst.nodes.clone();
    let mut edges = inst.edges.clone();
    let node_taken: BTreeSet<&String> = inst.nodes.iter().collect();
    let edge_taken: BTreeSet<&String> = inst.edges.iter().map(|e| &e.id).collect();

    let fresh_node = |name: String| -> Result<String> {
        if node_taken.contains(&name) {
            return Err(Error::Parameter(format!("node id {name:?} already taken")));
        }
        Ok(name)
    };
    let fresh_edge = |name: String| -> Result<String> {
        if edge_taken.contains(&name) {
            return Err(Error::Parameter(format!("edge id {name:?} already taken")));
        }
        Ok(name)
    };

    let super_node = fresh_node(super_node)?;
    let relay_node = fresh_node(relay_node)?;
    let bottleneck_edge = fresh_edge(bottleneck_edge)?;

    let mut arms = Vec::with_capacity(inst.sources.len());
    let mut new_sources = Vec::with_capacity(inst.sources.len());
    for src in &inst.sources {
        let new_node = fresh_node(format!("sn:src:{}", src.id))?;
        let forward_edge = fresh_edge(format!("sn:fwd:{}", src.id))?;
        let uplink_edge = fresh_edge(format!("sn:up:{}", src.id))?;
        let downlink_edge = fresh_edge(format!("sn:down:{}", src.id))?;

        edges.push(Edge {
            id: forward_edge.clone(),
            tail: new_node.clone(),
            head: src.node.clone(),
            capacity: rate.clone(),
        });
        edges.push(Edge {
            id: uplink_edge.clone(),
            tail: new_node.clone(),
            head: super_node.clone(),
            capacity: rate.clone(),
        });
        edges.push(Edge {
            id: downlink_edge.clone(),
            tail: relay_node.clone(),
            head: src.node.clone(),
            capacity: delta.clone(),
        });
        new_sources.push(Source {
            id: src.id.clone(),
            node: new_node.clone(),
        });
        arms.push(SupernodeArm {
            source_id: src.id.clone(),
            new_node: new_node.clone(),
            old_host: src.node.clone(),
            forward_edge,
            uplink_edge,
            downlink_edge,
        });
        nodes.push(new_node);
    }
    edges.push(Edge {
        id: bottleneck_edge.clone(),
        tail: super_node.clone(),
        head: relay_node.clone(),
        capacity: delta.clone(),
    });
    nodes.push(super_node.clone());
    nodes.push(relay_node.clone());

    let layout = SupernodeLayout {
        arms,
        super_node,
        relay_node,
        bottleneck_edge,
    };
    let instance = NetworkInstance::new(
        nodes,
        edges,
        new_sources,
        inst.terminals.clone(),
        inst.requirement.clone(),
        None,
        Some(layout.clone()),
    );
    debug_assert!(validate_instance(&instance).is_empty());

    Ok(SupernodeExtension {
        base: inst.clone(),
        instance,
        layout,
    })
}

impl SupernodeExtension {
    /// Rebuild the extension (including the base instance) from an instance
    /// that carries the builder's `supernode` layout block.
    pub fn from_instance(inst: &NetworkInstance) -> Result<Self> {
        let layout = inst
            .supernode
            .clone()
            .ok_or_else(|| Error::Parameter("instance has no supernode layout block".into()))?;

        let mut drop_nodes: BTreeSet<&str> =
            [layout.super_node.as_str(), layout.relay_node.as_str()].into();
        let mut drop_edges: BTreeSet<&str> = [layout.bottleneck_edge.as_str()].into();
        let mut base_sources = Vec::with_capacity(layout.arms.len());
        for arm in &layout.arms {
            drop_nodes.insert(arm.new_node.as_str());
            drop_edges.insert(arm.forward_edge.as_str());
            drop_edges.insert(arm.uplink_edge.as_str());
            drop_edges.insert(arm.downlink_edge.as_str());
            base_sources.push(Source {
                id: arm.source_id.clone(),
                node: arm.old_host.clone(),
            });
        }
        for id in drop_nodes.iter() {
            if inst.node_index(id).is_none() {
                return Err(Error::Parameter(format!(
                    "layout references missing node {id:?}"
                )));
            }
        }
        for id in drop_edges.iter() {
            if inst.edge_index(id).is_none() {
                return Err(Error::Parameter(format!(
                    "layout references missing edge {id:?}"
                )));
            }
        }

        let base = NetworkInstance::new(
            inst.nodes
                .iter()
                .filter(|n| !drop_nodes.contains(n.as_str()))
                .cloned()
                .collect(),
            inst.edges
                .iter()
                .filter(|e| !drop_edges.contains(e.id.as_str()))
                .cloned()
                .collect(),
            base_sources,
            inst.terminals.clone(),
            // requirement rows are keyed by source id, which the arms keep
            inst.requirement.clone(),
            None,
            None,
        );
        let problems = validate_instance(&base);
        if !problems.is_empty() {
            return Err(Error::InvalidInstance(
                problems.iter().map(|v| v.to_string()).collect(),
            ));
        }
        Ok(SupernodeExtension {
            base,
            instance: inst.clone(),
            layout,
        })
    }
}

/// The same instance with one edge deleted. Removal never invalidates an
/// instance; whether communication survives is a property of codes, not of
/// the instance.
pub fn remove_edge(inst: &NetworkInstance, edge_id: &str) -> Result<NetworkInstance> {
    let idx = inst
        .edge_index(edge_id)
        .ok_or_else(|| Error::UnknownEdge(edge_id.to_string()))?;
    let mut out = inst.clone();
    out.edges.remove(idx);
    Ok(out)
}

/// Re-insert an edge (the inverse of `remove_edge`).
pub fn add_edge(inst: &NetworkInstance, edge: Edge) -> Result<NetworkInstance> {
    if inst.edge_index(&edge.id).is_some() {
        return Err(Error::Parameter(format!(
            "edge id {:?} already present",
            edge.id
        )));
    }
    let mut edges = inst.edges.clone();
    edges.push(edge);
    edges.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = inst.clone();
    out.edges = edges;
    Ok(out)
}
