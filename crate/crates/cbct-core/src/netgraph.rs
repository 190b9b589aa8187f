//! General-network data model: node states with energies and rates, direct
//! edges, CB/CT virtual edges with helper sets, random scenario generation,
//! per-node lifetime accounting, and the scenario document format.
//!
//! Edges are directed. A `cbct` edge `i -> m` means node `i` recruits its
//! helper set to reach `m` beyond the direct range; sending one packet over
//! it costs one energy unit at `i` and one at every helper.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linkmodel::{
    cb_gain_lower_bound, ct_gain_analytic, trial_rng, ChannelParams, LinkError,
};

/// Which cooperative technique backs the virtual edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainMode {
    Cb,
    Ct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Direct,
    Cbct,
}

/// One node: position, battery, and information-generation rate.
/// Sinks carry a negative rate and absorb flow.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub energy_initial: f64,
    pub energy_remaining: f64,
    pub rate: f64,
}

impl NodeState {
    pub fn is_sink(&self) -> bool {
        self.rate < 0.0
    }

    pub fn is_origin(&self) -> bool {
        self.rate > 0.0
    }
}

/// Directed link. `helpers` is empty exactly for direct edges and never
/// contains the endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
    pub helpers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Network {
    pub nodes: Vec<NodeState>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetError {
    NegativeFlow { edge: usize, value: f64 },
    FlowLengthMismatch { expected: usize, got: usize },
    UnknownNode(usize),
}

impl fmt::Display for NetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetError::NegativeFlow { edge, value } => {
                write!(f, "edge {edge} carries negative flow {value}")
            }
            NetError::FlowLengthMismatch { expected, got } => {
                write!(f, "flow vector has {got} entries, network has {expected} edges")
            }
            NetError::UnknownNode(id) => write!(f, "unknown node id {id}"),
        }
    }
}

impl std::error::Error for NetError {}

impl Network {
    /// Index of the node with this id.
    pub fn index_of(&self, id: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn sinks(&self) -> impl Iterator<Item = &NodeState> {
        self.nodes.iter().filter(|n| n.is_sink())
    }

    pub fn origins(&self) -> impl Iterator<Item = &NodeState> {
        self.nodes.iter().filter(|n| n.is_origin())
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let a = &self.nodes[i];
        let b = &self.nodes[j];
        ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
    }

    /// Copy of the network with the CB/CT virtual edges removed.
    pub fn strip_cbct(&self) -> Network {
        Network {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .filter(|e| e.kind == EdgeKind::Direct)
                .cloned()
                .collect(),
        }
    }

    /// Per-node energy use of a flow assignment: everything a node transmits
    /// (direct or as a CB/CT source) plus one unit per packet on every edge
    /// that recruits it as a helper.
    pub fn energy_use(&self, flows: &[f64]) -> Result<Vec<f64>, NetError> {
        if flows.len() != self.edges.len() {
            return Err(NetError::FlowLengthMismatch {
                expected: self.edges.len(),
                got: flows.len(),
            });
        }
        let mut use_by_index = vec![0.0; self.nodes.len()];
        for (ei, (edge, &q)) in self.edges.iter().zip(flows).enumerate() {
            if q < 0.0 {
                return Err(NetError::NegativeFlow { edge: ei, value: q });
            }
            let src = self.index_of(edge.src).ok_or(NetError::UnknownNode(edge.src))?;
            use_by_index[src] += q;
            for &h in &edge.helpers {
                let hi = self.index_of(h).ok_or(NetError::UnknownNode(h))?;
                use_by_index[hi] += q;
            }
        }
        Ok(use_by_index)
    }
}

/// Random square deployment: `n_nodes` points i.i.d. uniform on
/// `[0, side] x [0, side]`; the first `n_sinks` ids become sinks. All nodes
/// start with unit energy; origins generate at unit rate and the sinks
/// absorb the total.
pub fn generate_random(side: f64, n_nodes: usize, n_sinks: usize, seed: u64) -> Network {
    assert!(n_nodes >= 1 && n_sinks >= 1 && n_sinks <= n_nodes);
    let mut rng = trial_rng(seed, 0);
    let origin_count = (n_nodes - n_sinks) as f64;
    let sink_rate = -origin_count / n_sinks as f64;
    let nodes = (0..n_nodes)
        .map(|id| {
            let x = rng.gen::<f64>() * side;
            let y = rng.gen::<f64>() * side;
            let rate = if id < n_sinks { sink_rate } else { 1.0 };
            NodeState {
                id,
                x,
                y,
                energy_initial: 1.0,
                energy_remaining: 1.0,
                rate,
            }
        })
        .collect();
    Network {
        nodes,
        edges: Vec::new(),
    }
}

/// Populates the edge set from node positions.
///
/// Direct edges join every ordered pair within the direct range `A0`. For a
/// pair beyond `A0`, the source's nearest neighbor (excluding the target)
/// becomes the single helper of a CB/CT edge if that neighbor is itself
/// within `A0` and the two-node gain closes the link budget at the target.
pub fn build_edges(network: &mut Network, params: &ChannelParams, mode: GainMode) {
    let a0 = params.max_direct_range();
    let n = network.nodes.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for m in 0..n {
            if i == m {
                continue;
            }
            let d = network.distance(i, m);
            if d <= a0 {
                edges.push(Edge {
                    src: network.nodes[i].id,
                    dst: network.nodes[m].id,
                    kind: EdgeKind::Direct,
                    helpers: Vec::new(),
                });
                continue;
            }
            let helper = (0..n).filter(|&j| j != i && j != m).min_by(|&a, &b| {
                network
                    .distance(i, a)
                    .partial_cmp(&network.distance(i, b))
                    .unwrap()
                    .then(network.nodes[a].id.cmp(&network.nodes[b].id))
            });
            let Some(j) = helper else { continue };
            let dj = network.distance(i, j);
            if dj > a0 {
                continue;
            }
            let gain = match mode {
                GainMode::Cb => cb_gain_lower_bound(2, dj, params.wavelength()),
                GainMode::Ct => match ct_gain_analytic(params, 2, dj) {
                    Ok(g) => g,
                    Err(_) => continue,
                },
            };
            let snr = gain * params.tx_power() * d.powf(-params.alpha()) / params.noise();
            if snr >= params.gamma0() {
                edges.push(Edge {
                    src: network.nodes[i].id,
                    dst: network.nodes[m].id,
                    kind: EdgeKind::Cbct,
                    helpers: vec![network.nodes[j].id],
                });
            }
        }
    }
    network.edges = edges;
}

/// Per-node lifetimes under flow rates `q` (aligned with `network.edges`):
/// initial energy over total depletion rate, infinite where a node spends
/// nothing.
pub fn node_lifetime(network: &Network, q: &[f64]) -> Result<Vec<f64>, NetError> {
    let usage = network.energy_use(q)?;
    Ok(network
        .nodes
        .iter()
        .zip(&usage)
        .map(|(node, &u)| {
            if u <= 0.0 {
                f64::INFINITY
            } else {
                node.energy_initial / u
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Scenario document
// ---------------------------------------------------------------------------

/// Channel parameters in configuration units (dBm / dB), as they appear in a
/// scenario document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub alpha: f64,
    pub wavelength: f64,
    pub packet_len: u32,
    pub gamma0_db: f64,
}

impl ChannelConfig {
    pub fn to_params(&self) -> Result<ChannelParams, LinkError> {
        ChannelParams::from_db(
            self.tx_power_dbm,
            self.noise_dbm,
            self.alpha,
            self.wavelength,
            self.packet_len,
            self.gamma0_db,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub helpers: Vec<usize>,
}

/// On-disk scenario: channel parameters, nodes, and optionally an explicit
/// edge list. Without `edges` the graph is derived from positions via
/// [`build_edges`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub params: ChannelConfig,
    pub nodes: Vec<NodeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeSpec>>,
}

#[derive(Debug)]
pub enum ScenarioError {
    Parse(toml::de::Error),
    Channel(LinkError),
    DuplicateNode(usize),
    EdgeEndpoint(usize),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse(e) => write!(f, "scenario parse error: {e}"),
            ScenarioError::Channel(e) => write!(f, "scenario channel params: {e}"),
            ScenarioError::DuplicateNode(id) => write!(f, "duplicate node id {id}"),
            ScenarioError::EdgeEndpoint(id) => {
                write!(f, "edge references unknown node id {id}")
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

impl Scenario {
    /// Serializes to the TOML document format with stable field order.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialization cannot fail")
    }

    /// Parses and validates a scenario document.
    pub fn from_toml(text: &str) -> Result<Scenario, ScenarioError> {
        let scenario: Scenario = toml::from_str(text).map_err(ScenarioError::Parse)?;
        scenario.params.to_params().map_err(ScenarioError::Channel)?;
        let mut seen = BTreeSet::new();
        for n in &scenario.nodes {
            if !seen.insert(n.id) {
                return Err(ScenarioError::DuplicateNode(n.id));
            }
        }
        if let Some(edges) = &scenario.edges {
            for e in edges {
                for id in [e.src, e.dst].iter().chain(&e.helpers) {
                    if !seen.contains(id) {
                        return Err(ScenarioError::EdgeEndpoint(*id));
                    }
                }
            }
        }
        Ok(scenario)
    }

    /// Captures a network (and channel parameters) as a document. The edge
    /// list is written explicitly.
    pub fn from_network(network: &Network, config: ChannelConfig) -> Scenario {
        Scenario {
            params: config,
            nodes: network
                .nodes
                .iter()
                .map(|n| NodeSpec {
                    id: n.id,
                    x: n.x,
                    y: n.y,
                    energy: n.energy_initial,
                    rate: n.rate,
                })
                .collect(),
            edges: Some(
                network
                    .edges
                    .iter()
                    .map(|e| EdgeSpec {
                        src: e.src,
                        dst: e.dst,
                        kind: e.kind,
                        helpers: e.helpers.clone(),
                    })
                    .collect(),
            ),
        }
    }

    /// Materializes the network; explicit edges win, otherwise the graph is
    /// built from positions in the given mode.
    pub fn into_network(&self, mode: GainMode) -> Result<(ChannelParams, Network), ScenarioError> {
        let params = self.params.to_params().map_err(ScenarioError::Channel)?;
        let mut network = Network {
            nodes: self
                .nodes
                .iter()
                .map(|s| NodeState {
                    id: s.id,
                    x: s.x,
                    y: s.y,
                    energy_initial: s.energy,
                    energy_remaining: s.energy,
                    rate: s.rate,
                })
                .collect(),
            edges: Vec::new(),
        };
        match &self.edges {
            Some(list) => {
                network.edges = list
                    .iter()
                    .map(|e| Edge {
                        src: e.src,
                        dst: e.dst,
                        kind: e.kind,
                        helpers: e.helpers.clone(),
                    })
                    .collect();
            }
            None => build_edges(&mut network, &params, mode),
        }
        Ok((params, network))
    }
}
