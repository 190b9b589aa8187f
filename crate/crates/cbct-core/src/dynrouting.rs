//! Dynamic-rate operation: link costs driven by remaining energy,
//! Bellman-Ford routes refreshed every HELLO epoch, and a time-stepped
//! fluid simulation that débits batteries until the first node dies.
//!
//! Costs follow `(E_i / remaining_i)^beta1` for the transmitter plus
//! `(E_l / remaining_l)^beta2` for every CB/CT helper, so depleted nodes
//! price themselves out of the routing tables. One simulation step equals
//! one HELLO interval: recompute costs, recompute routes, inject
//! `rate * dt` packets per origin and walk them hop by hop to a sink.

use std::fmt;

use crate::exec;
use crate::linkmodel::ChannelParams;
use crate::netgraph::{build_edges, generate_random, Edge, EdgeKind, GainMode, Network};

#[derive(Debug, Clone, PartialEq)]
pub enum DynError {
    InvalidParams(&'static str),
    InvalidStep(f64),
}

impl fmt::Display for DynError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynError::InvalidParams(what) => write!(f, "invalid cost parameters: {what}"),
            DynError::InvalidStep(dt) => write!(f, "time step must be positive, got {dt}"),
        }
    }
}

impl std::error::Error for DynError {}

/// Exponents of the energy-aware cost and the depletion clamp.
///
/// `beta1` prices the transmitting node, `beta2` the helpers. Fields are
/// public so baselines can use degenerate settings (`beta1 = 0` freezes all
/// costs at hop count); [`CostParams::new`] validates the paper-regime
/// ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub beta1: f64,
    pub beta2: f64,
    /// Remaining energy enters costs clamped below at this fraction of the
    /// initial energy, so a nearly dead node gets a steep but finite price.
    pub epsilon_floor: f64,
}

impl CostParams {
    pub fn new(beta1: f64, beta2: f64, epsilon_floor: f64) -> Result<Self, DynError> {
        if !(beta1 > 0.0) {
            return Err(DynError::InvalidParams("beta1 must be > 0"));
        }
        if !(beta2 >= 0.0) {
            return Err(DynError::InvalidParams("beta2 must be >= 0"));
        }
        if !(epsilon_floor > 0.0 && epsilon_floor <= 1e-3) {
            return Err(DynError::InvalidParams("epsilon_floor must be in (0, 1e-3]"));
        }
        Ok(CostParams {
            beta1,
            beta2,
            epsilon_floor,
        })
    }
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            beta1: 1.0,
            beta2: 1.0,
            epsilon_floor: 1e-6,
        }
    }
}

/// Cost of one transmission over `edge` given per-node remaining energies
/// (indexed like `network.nodes`).
pub fn link_cost(
    network: &Network,
    remaining: &[f64],
    edge: &Edge,
    params: &CostParams,
) -> f64 {
    let price = |idx: usize, beta: f64| {
        let initial = network.nodes[idx].energy_initial;
        let floor = params.epsilon_floor * initial;
        (initial / remaining[idx].max(floor)).powf(beta)
    };
    let src = network.index_of(edge.src).expect("edge src exists");
    let mut cost = price(src, params.beta1);
    for &h in &edge.helpers {
        let hi = network.index_of(h).expect("helper exists");
        cost += price(hi, params.beta2);
    }
    cost
}

/// Next-hop routing table toward the cheapest sink.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteTable {
    /// Chosen outgoing edge index per node, `None` at sinks and unreachable
    /// nodes.
    pub next_edge: Vec<Option<usize>>,
    /// Total route cost per node (0 at sinks, infinite when unreachable).
    pub dist: Vec<f64>,
}

/// Bellman-Ford over the mixed direct/CB/CT edge set with the given
/// per-edge costs (`f64::INFINITY` marks an unusable edge).
///
/// Ties between equal-cost candidates prefer a direct edge over a CB/CT
/// edge, then the lower next-hop id; this fixes a deterministic table.
pub fn shortest_paths(network: &Network, edge_costs: &[f64]) -> RouteTable {
    let n = network.nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    // (kind rank, next-hop id) of the current choice, for tie-breaking
    let mut choice_key = vec![(u8::MAX, usize::MAX); n];
    let mut next_edge = vec![None; n];
    for (i, node) in network.nodes.iter().enumerate() {
        if node.is_sink() {
            dist[i] = 0.0;
        }
    }
    let arcs: Vec<(usize, usize, usize)> = network
        .edges
        .iter()
        .enumerate()
        .filter(|(ei, _)| edge_costs[*ei].is_finite())
        .map(|(ei, e)| {
            (
                ei,
                network.index_of(e.src).expect("src exists"),
                network.index_of(e.dst).expect("dst exists"),
            )
        })
        .collect();
    // one extra round beyond |V|-1 lets tie-break keys settle after the
    // distances have converged
    for _ in 0..n {
        let mut changed = false;
        for &(ei, si, di) in &arcs {
            if network.nodes[si].is_sink() || dist[di].is_infinite() {
                continue;
            }
            let cand = edge_costs[ei] + dist[di];
            let edge = &network.edges[ei];
            let key = (u8::from(edge.kind == EdgeKind::Cbct), edge.dst);
            if cand < dist[si] || (cand == dist[si] && key < choice_key[si]) {
                dist[si] = cand;
                choice_key[si] = key;
                next_edge[si] = Some(ei);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    RouteTable { next_edge, dist }
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    /// Sample instants, starting at 0.
    pub times: Vec<f64>,
    /// Remaining energy per node (outer index follows `network.nodes`),
    /// one entry per instant.
    pub energy: Vec<Vec<f64>>,
    /// Cost per edge at each instant (`INFINITY` once an endpoint or helper
    /// died), aligned with `network.edges`.
    pub costs: Vec<Vec<f64>>,
    pub first_failure: Option<FirstFailure>,
    /// Origins whose traffic halted for lack of a route, with the time of
    /// the first occurrence.
    pub halted: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstFailure {
    pub time: f64,
    pub node: usize,
}

impl SimTrace {
    /// Network lifetime recorded by this run, falling back to the horizon.
    pub fn lifetime(&self, horizon: f64) -> f64 {
        self.first_failure.map_or(horizon, |f| f.time)
    }
}

/// Runs the fluid simulation until the first node dies or `horizon` passes.
///
/// Each step recomputes costs and Bellman-Ford routes (the HELLO update),
/// then every origin injects `rate * dt` packets that traverse their whole
/// route within the step, debiting one unit per packet at each transmitter
/// and helper. Nodes at zero energy are removed together with incident
/// edges. The `seed` is part of the reproducibility contract; the fluid
/// model itself is deterministic.
pub fn simulate(
    network: &Network,
    params: &CostParams,
    dt: f64,
    horizon: f64,
    seed: u64,
) -> Result<SimTrace, DynError> {
    let _ = seed;
    if !(dt > 0.0) {
        return Err(DynError::InvalidStep(dt));
    }
    let n = network.nodes.len();
    let mut remaining: Vec<f64> = network.nodes.iter().map(|nd| nd.energy_initial).collect();
    let mut alive = vec![true; n];
    let mut halted_flags = vec![false; n];

    let mut trace = SimTrace {
        times: Vec::new(),
        energy: Vec::new(),
        costs: Vec::new(),
        first_failure: None,
        halted: Vec::new(),
    };

    let edge_usable = |alive: &[bool], edge: &Edge| {
        let si = network.index_of(edge.src).unwrap();
        let di = network.index_of(edge.dst).unwrap();
        alive[si]
            && alive[di]
            && edge
                .helpers
                .iter()
                .all(|&h| alive[network.index_of(h).unwrap()])
    };

    let compute_costs = |alive: &[bool], remaining: &[f64]| -> Vec<f64> {
        network
            .edges
            .iter()
            .map(|e| {
                if edge_usable(alive, e) {
                    link_cost(network, remaining, e, params)
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    };

    // instant 0: full batteries, pre-transmission costs
    trace.times.push(0.0);
    trace.energy.push(remaining.clone());
    trace.costs.push(compute_costs(&alive, &remaining));

    let steps = (horizon / dt).ceil() as usize;
    for step in 1..=steps {
        let time = step as f64 * dt;
        let costs = compute_costs(&alive, &remaining);
        let routes = shortest_paths(network, &costs);

        let mut debit = vec![0.0; n];
        let mut route_units = 0.0; // hops plus helpers, packet-weighted
        for (i, node) in network.nodes.iter().enumerate() {
            if !alive[i] || !node.is_origin() {
                continue;
            }
            if routes.next_edge[i].is_none() {
                if !halted_flags[i] {
                    halted_flags[i] = true;
                    trace.halted.push((time, node.id));
                }
                continue;
            }
            let amount = node.rate * dt;
            let mut at = i;
            let mut hops = 0usize;
            while let Some(ei) = routes.next_edge[at] {
                let edge = &network.edges[ei];
                debit[at] += amount;
                for &h in &edge.helpers {
                    debit[network.index_of(h).unwrap()] += amount;
                }
                route_units += amount * (1.0 + edge.helpers.len() as f64);
                at = network.index_of(edge.dst).unwrap();
                hops += 1;
                assert!(hops <= n, "routing loop");
            }
        }
        // conservation audit: total battery drain equals route length
        // (hop count plus helpers traversed) per delivered packet
        let applied: f64 = debit.iter().sum();
        assert!(
            (applied - route_units).abs() <= 1e-9 * route_units.max(1.0),
            "energy audit: debited {applied}, routes account for {route_units}"
        );

        for i in 0..n {
            remaining[i] -= debit[i];
        }
        trace.times.push(time);
        trace.energy.push(remaining.clone());
        trace.costs.push(compute_costs(&alive, &remaining));

        let mut newly_dead: Vec<usize> = (0..n)
            .filter(|&i| alive[i] && remaining[i] <= 0.0)
            .collect();
        if !newly_dead.is_empty() {
            newly_dead.sort_by_key(|&i| network.nodes[i].id);
            for &i in &newly_dead {
                alive[i] = false;
            }
            trace.first_failure = Some(FirstFailure {
                time,
                node: network.nodes[newly_dead[0]].id,
            });
            break;
        }
    }
    // column-major costs: one series per edge
    let per_edge: Vec<Vec<f64>> = (0..network.edges.len())
        .map(|ei| trace.costs.iter().map(|row| row[ei]).collect())
        .collect();
    // energy likewise, one series per node
    let per_node: Vec<Vec<f64>> = (0..n)
        .map(|i| trace.energy.iter().map(|row| row[i]).collect())
        .collect();
    trace.energy = per_node;
    trace.costs = per_edge;
    Ok(trace)
}

/// The three routing policies compared in the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Constant costs on the CB/CT-free graph (plain shortest path).
    HopCount,
    /// Residual-energy costs on the CB/CT-free graph.
    ResidualEnergy,
    /// Residual-energy costs with helper pricing on the full graph.
    CbctAware,
}

/// Generator settings for one family of random networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub side: f64,
    pub n_nodes: usize,
    pub n_sinks: usize,
}

/// Mean lifetimes of the three policies at one `(beta1, beta2)` setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineRow {
    pub beta1: f64,
    pub beta2: f64,
    pub mean_hop_count: f64,
    pub mean_residual: f64,
    pub mean_cbct: f64,
    /// `mean_cbct / mean_residual - 1`.
    pub improvement: f64,
}

fn run_policy(
    network: &Network,
    policy: Policy,
    beta1: f64,
    beta2: f64,
    dt: f64,
    horizon: f64,
) -> f64 {
    let (net, params) = match policy {
        Policy::HopCount => (
            network.strip_cbct(),
            CostParams {
                beta1: 0.0,
                beta2: 0.0,
                epsilon_floor: 1e-6,
            },
        ),
        Policy::ResidualEnergy => (
            network.strip_cbct(),
            CostParams {
                beta1,
                beta2: 0.0,
                epsilon_floor: 1e-6,
            },
        ),
        Policy::CbctAware => (
            network.clone(),
            CostParams {
                beta1,
                beta2,
                epsilon_floor: 1e-6,
            },
        ),
    };
    simulate(&net, &params, dt, horizon, 0)
        .expect("validated dt")
        .lifetime(horizon)
}

/// Runs the three policies over `repetitions` random networks (seeds
/// `seed, seed+1, ...`) for every `(beta1, beta2)` pair and reports mean
/// lifetimes. Repetitions fan out across the worker pool.
#[allow(clippy::too_many_arguments)]
pub fn compare_baselines(
    spec: &SweepSpec,
    channel: &ChannelParams,
    mode: GainMode,
    betas: &[(f64, f64)],
    repetitions: u64,
    seed: u64,
    dt: f64,
    horizon: f64,
) -> Result<Vec<BaselineRow>, DynError> {
    if !(dt > 0.0) {
        return Err(DynError::InvalidStep(dt));
    }
    let spec = *spec;
    let channel = *channel;
    // lifetimes[rep] = (hop, residual-per-beta1, cbct-per-pair)
    let per_rep: Vec<(f64, Vec<f64>, Vec<f64>)> = exec::indexed_map(repetitions, move |rep| {
        let mut net = generate_random(spec.side, spec.n_nodes, spec.n_sinks, seed + rep);
        build_edges(&mut net, &channel, mode);
        let hop = run_policy(&net, Policy::HopCount, 1.0, 0.0, dt, horizon);
        let residual = betas
            .iter()
            .map(|&(b1, _)| run_policy(&net, Policy::ResidualEnergy, b1, 0.0, dt, horizon))
            .collect();
        let cbct = betas
            .iter()
            .map(|&(b1, b2)| run_policy(&net, Policy::CbctAware, b1, b2, dt, horizon))
            .collect();
        (hop, residual, cbct)
    });
    let reps = repetitions as f64;
    let mean_hop = per_rep.iter().map(|r| r.0).sum::<f64>() / reps;
    Ok(betas
        .iter()
        .enumerate()
        .map(|(bi, &(beta1, beta2))| {
            let mean_residual = per_rep.iter().map(|r| r.1[bi]).sum::<f64>() / reps;
            let mean_cbct = per_rep.iter().map(|r| r.2[bi]).sum::<f64>() / reps;
            BaselineRow {
                beta1,
                beta2,
                mean_hop_count: mean_hop,
                mean_residual,
                mean_cbct,
                improvement: mean_cbct / mean_residual - 1.0,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::NodeState;

    fn node(id: usize, rate: f64) -> NodeState {
        NodeState {
            id,
            x: 0.0,
            y: 0.0,
            energy_initial: 1.0,
            energy_remaining: 1.0,
            rate,
        }
    }

    fn direct(src: usize, dst: usize) -> Edge {
        Edge {
            src,
            dst,
            kind: EdgeKind::Direct,
            helpers: Vec::new(),
        }
    }

    /// The six-node snapshot: node 1 is the sink, 2 is its only direct
    /// neighbor, and 6 can reach it over CB/CT with node 5 helping.
    fn snapshot(with_cbct: bool) -> Network {
        let mut edges = Vec::new();
        for (a, b) in [(2, 1), (3, 2), (5, 2), (6, 2), (3, 6), (4, 5), (4, 6), (5, 6)] {
            edges.push(direct(a, b));
            edges.push(direct(b, a));
        }
        if with_cbct {
            edges.push(Edge {
                src: 6,
                dst: 1,
                kind: EdgeKind::Cbct,
                helpers: vec![5],
            });
        }
        Network {
            nodes: vec![
                node(1, -5.0),
                node(2, 1.0),
                node(3, 1.0),
                node(4, 1.0),
                node(5, 1.0),
                node(6, 1.0),
            ],
            edges,
        }
    }

    #[test]
    fn cost_params_validation() {
        assert!(CostParams::new(1.0, 1.0, 1e-6).is_ok());
        assert!(CostParams::new(0.0, 1.0, 1e-6).is_err());
        assert!(CostParams::new(1.0, -0.1, 1e-6).is_err());
        assert!(CostParams::new(1.0, 1.0, 0.01).is_err());
    }

    #[test]
    fn full_energy_direct_edge_costs_one() {
        let net = snapshot(false);
        let remaining = vec![1.0; 6];
        let params = CostParams::default();
        let cost = link_cost(&net, &remaining, &net.edges[0], &params);
        assert_eq!(cost, 1.0);
    }

    #[test]
    fn helper_free_beta2_costs_one_extra() {
        let net = snapshot(true);
        let remaining = vec![1.0; 6];
        let params = CostParams::new(1.0, 0.0, 1e-6).unwrap();
        let cbct = net.edges.iter().find(|e| e.kind == EdgeKind::Cbct).unwrap();
        let cost = link_cost(&net, &remaining, cbct, &params);
        assert_eq!(cost, 2.0); // (E/E)^b1 + (E/E)^0
    }

    #[test]
    fn depleted_nodes_price_up() {
        let net = snapshot(true);
        let mut remaining = vec![1.0; 6];
        remaining[1] = 0.5; // node id 2
        remaining[4] = 0.25; // node id 5
        let params = CostParams::default();
        let e21 = net
            .edges
            .iter()
            .find(|e| e.src == 2 && e.dst == 1)
            .unwrap();
        assert_eq!(link_cost(&net, &remaining, e21, &params), 2.0);
        let cbct = net.edges.iter().find(|e| e.kind == EdgeKind::Cbct).unwrap();
        // source 6 at full energy (1) plus helper 5 at quarter energy (4)
        let mut r2 = vec![1.0; 6];
        r2[4] = 0.25;
        r2[5] = 0.5;
        assert_eq!(link_cost(&net, &r2, cbct, &params), 2.0 + 4.0);
    }

    #[test]
    fn uniform_costs_give_hop_count_routes() {
        let net = snapshot(false);
        let costs = vec![1.0; net.edges.len()];
        let routes = shortest_paths(&net, &costs);
        let idx = |id: usize| net.index_of(id).unwrap();
        assert_eq!(routes.dist[idx(1)], 0.0);
        assert_eq!(routes.dist[idx(2)], 1.0);
        assert_eq!(routes.dist[idx(3)], 2.0);
        assert_eq!(routes.dist[idx(6)], 2.0);
        assert_eq!(routes.dist[idx(4)], 3.0);
        // node 3 has equal-cost routes via 2; the chosen next hop is 2
        let e = routes.next_edge[idx(3)].unwrap();
        assert_eq!(net.edges[e].dst, 2);
    }

    #[test]
    fn snapshot_tie_resolves_direct_first() {
        // At full energy the cbct edge 6->1 costs 2 and the two-hop path
        // 6->2->1 also costs 2; the direct edge wins the tie.
        let net = snapshot(true);
        let remaining = vec![1.0; 6];
        let costs: Vec<f64> = net
            .edges
            .iter()
            .map(|e| link_cost(&net, &remaining, e, &CostParams::default()))
            .collect();
        let routes = shortest_paths(&net, &costs);
        let idx = |id: usize| net.index_of(id).unwrap();
        assert_eq!(routes.dist[idx(6)], 2.0);
        let e = routes.next_edge[idx(6)].unwrap();
        assert_eq!(net.edges[e].kind, EdgeKind::Direct);
        assert_eq!(net.edges[e].dst, 2);
    }

    #[test]
    fn depleting_the_relay_flips_the_tie() {
        let net = snapshot(true);
        let mut remaining = vec![1.0; 6];
        remaining[net.index_of(2).unwrap()] = 0.5;
        let costs: Vec<f64> = net
            .edges
            .iter()
            .map(|e| link_cost(&net, &remaining, e, &CostParams::default()))
            .collect();
        let routes = shortest_paths(&net, &costs);
        let e = routes.next_edge[net.index_of(6).unwrap()].unwrap();
        assert_eq!(net.edges[e].kind, EdgeKind::Cbct);
    }

    #[test]
    fn unreachable_node_is_flagged() {
        let mut net = snapshot(false);
        net.nodes.push(node(9, 1.0));
        let costs = vec![1.0; net.edges.len()];
        let routes = shortest_paths(&net, &costs);
        let i = net.index_of(9).unwrap();
        assert!(routes.next_edge[i].is_none());
        assert!(routes.dist[i].is_infinite());
    }

    #[test]
    fn single_pair_dies_at_unit_time() {
        let net = Network {
            nodes: vec![node(0, -1.0), node(1, 1.0)],
            edges: vec![direct(1, 0), direct(0, 1)],
        };
        let trace = simulate(&net, &CostParams::default(), 0.01, 2.0, 0).unwrap();
        let failure = trace.first_failure.unwrap();
        assert_eq!(failure.node, 1);
        assert!((failure.time - 1.0).abs() <= 0.01 + 1e-9);
    }

    #[test]
    fn snapshot_without_cbct_dies_at_point_two() {
        let trace = simulate(&snapshot(false), &CostParams::default(), 0.005, 2.0, 0).unwrap();
        let failure = trace.first_failure.unwrap();
        assert_eq!(failure.node, 2);
        assert!((failure.time - 0.2).abs() <= 0.005 + 1e-9);
        // node 2's energy series hits zero exactly at the end
        let i2 = snapshot(false).index_of(2).unwrap();
        let series = &trace.energy[i2];
        assert!(series.last().unwrap() <= &1e-12);
    }

    #[test]
    fn snapshot_with_cbct_lives_longer() {
        let trace = simulate(&snapshot(true), &CostParams::default(), 0.005, 2.0, 0).unwrap();
        let failure = trace.first_failure.unwrap();
        assert!(
            (failure.time - 1.0 / 3.0).abs() <= 0.05 / 3.0,
            "failure at {}",
            failure.time
        );
    }

    #[test]
    fn simulation_is_deterministic() {
        let a = simulate(&snapshot(true), &CostParams::default(), 0.005, 2.0, 42).unwrap();
        let b = simulate(&snapshot(true), &CostParams::default(), 0.005, 2.0, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn energy_never_increases_and_costs_never_decrease() {
        let trace = simulate(&snapshot(true), &CostParams::default(), 0.005, 2.0, 0).unwrap();
        for series in &trace.energy {
            for w in series.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
        for series in &trace.costs {
            for w in series.windows(2) {
                assert!(w[1] >= w[0] - 1e-12);
            }
        }
    }

    #[test]
    fn rejects_nonpositive_step() {
        assert!(matches!(
            simulate(&snapshot(false), &CostParams::default(), 0.0, 1.0, 0),
            Err(DynError::InvalidStep(_))
        ));
    }

    #[test]
    fn disconnected_origin_halts_not_aborts() {
        let mut net = snapshot(false);
        net.nodes.push(node(9, 1.0));
        let trace = simulate(&net, &CostParams::default(), 0.005, 2.0, 0).unwrap();
        assert!(trace.halted.iter().any(|&(_, id)| id == 9));
        assert!(trace.first_failure.is_some());
    }

    #[test]
    fn baselines_coincide_without_cbct_edges() {
        let net = snapshot(false);
        let b = run_policy(&net, Policy::ResidualEnergy, 1.0, 0.0, 0.005, 2.0);
        let c = run_policy(&net, Policy::CbctAware, 1.0, 0.0, 0.005, 2.0);
        assert_eq!(b, c);
    }

    #[test]
    fn compare_baselines_smoke() {
        let channel = ChannelParams::from_db(10.0, -70.0, 4.0, 0.125, 100, 10.0).unwrap();
        let spec = SweepSpec {
            side: 100.0,
            n_nodes: 12,
            n_sinks: 1,
        };
        let rows = compare_baselines(
            &spec,
            &channel,
            GainMode::Ct,
            &[(1.0, 1.0)],
            4,
            7,
            0.01,
            2.0,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert!(row.mean_hop_count > 0.0);
        assert!(row.mean_residual > 0.0);
        assert!(row.mean_cbct > 0.0);
    }
}
