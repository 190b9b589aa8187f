//! Max-min network lifetime as a linear program over the CB/CT-augmented
//! graph.
//!
//! With fixed generation rates, scaling flows by the lifetime `T` turns the
//! max-min problem into a plain LP: maximize `T` subject to one energy
//! budget per node and flow conservation at every non-sink. The solver is a
//! self-contained dense two-phase simplex (see [`simplex`]).

pub mod simplex;

use std::fmt;

use crate::netgraph::{EdgeKind, NetError, Network};
pub use simplex::{Constraint, LpProblem, Relation, Solution, SolveStatus};

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    /// An origin has no directed path to any sink, so its traffic can never
    /// drain and the formulation is meaningless.
    DisconnectedOrigin(usize),
    /// The solver reported infeasible; zero flow at T = 0 is always
    /// feasible, so this indicates a broken formulation.
    UnexpectedInfeasible,
    Net(NetError),
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DisconnectedOrigin(id) => {
                write!(f, "origin node {id} has no path to any sink")
            }
            LpError::UnexpectedInfeasible => {
                write!(f, "solver reported infeasible on a valid network")
            }
            LpError::Net(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LpError {}

impl From<NetError> for LpError {
    fn from(e: NetError) -> Self {
        LpError::Net(e)
    }
}

/// Lifetime-scaled flow totals plus the achieved lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    /// Packets per edge over the whole lifetime, aligned with
    /// `network.edges`.
    pub flows: Vec<f64>,
    pub lifetime: f64,
}

/// Result of solving a network, distinguishing traffic-free networks whose
/// lifetime is unbounded.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkLifetime {
    Finite(FlowSolution),
    Unbounded,
}

impl NetworkLifetime {
    pub fn lifetime(&self) -> f64 {
        match self {
            NetworkLifetime::Finite(s) => s.lifetime,
            NetworkLifetime::Unbounded => f64::INFINITY,
        }
    }
}

/// Builds the lifetime LP: variables are the per-edge flow totals and `T`;
/// maximize `T` subject to
///   (energy) out-flows plus helper loads within the initial energy,
///   (conservation) in-flows plus `T Q_i` equal out-flows at non-sinks.
pub fn formulate(network: &Network) -> Result<LpProblem, LpError> {
    check_reachability(network)?;
    let n_edges = network.edges.len();
    let t_var = n_edges;
    let n_vars = n_edges + 1;

    let mut names: Vec<String> = network
        .edges
        .iter()
        .map(|e| match e.kind {
            EdgeKind::Direct => format!("q{}->{}", e.src, e.dst),
            EdgeKind::Cbct => {
                let helpers: Vec<String> = e.helpers.iter().map(|h| h.to_string()).collect();
                format!("q{}->{}|{}", e.src, e.dst, helpers.join(","))
            }
        })
        .collect();
    names.push("T".to_string());

    let mut objective = vec![0.0; n_vars];
    objective[t_var] = 1.0;

    let mut rows = Vec::new();
    for node in &network.nodes {
        let mut coeffs = vec![0.0; n_vars];
        for (ei, edge) in network.edges.iter().enumerate() {
            if edge.src == node.id {
                coeffs[ei] += 1.0;
            }
            if edge.helpers.contains(&node.id) {
                coeffs[ei] += 1.0;
            }
        }
        rows.push(Constraint {
            coeffs,
            rel: Relation::Le,
            rhs: node.energy_initial,
        });
    }
    for node in &network.nodes {
        if node.is_sink() {
            continue;
        }
        let mut coeffs = vec![0.0; n_vars];
        for (ei, edge) in network.edges.iter().enumerate() {
            if edge.dst == node.id {
                coeffs[ei] += 1.0;
            }
            if edge.src == node.id {
                coeffs[ei] -= 1.0;
            }
        }
        coeffs[t_var] = node.rate;
        rows.push(Constraint {
            coeffs,
            rel: Relation::Eq,
            rhs: 0.0,
        });
    }
    Ok(LpProblem {
        objective,
        rows,
        names,
    })
}

fn check_reachability(network: &Network) -> Result<(), LpError> {
    // reverse reachability from the sink set over directed edges
    let n = network.nodes.len();
    let mut reaches_sink = vec![false; n];
    for (i, node) in network.nodes.iter().enumerate() {
        reaches_sink[i] = node.is_sink();
    }
    let mut changed = true;
    while changed {
        changed = false;
        for edge in &network.edges {
            let (Some(si), Some(di)) = (network.index_of(edge.src), network.index_of(edge.dst))
            else {
                continue;
            };
            if reaches_sink[di] && !reaches_sink[si] {
                reaches_sink[si] = true;
                changed = true;
            }
        }
    }
    for (i, node) in network.nodes.iter().enumerate() {
        if node.is_origin() && !reaches_sink[i] {
            return Err(LpError::DisconnectedOrigin(node.id));
        }
    }
    Ok(())
}

/// Formulates and solves a network, splitting out the flow vector.
pub fn solve_network(network: &Network) -> Result<NetworkLifetime, LpError> {
    let problem = formulate(network)?;
    match simplex::solve(&problem) {
        SolveStatus::Optimal(sol) => {
            let flows = sol.x[..network.edges.len()].to_vec();
            let lifetime = sol.x[network.edges.len()];
            Ok(NetworkLifetime::Finite(FlowSolution { flows, lifetime }))
        }
        SolveStatus::Unbounded => Ok(NetworkLifetime::Unbounded),
        SolveStatus::Infeasible => Err(LpError::UnexpectedInfeasible),
    }
}

/// Constraint residuals of a flow solution, recomputed from the network
/// without going through the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditReport {
    /// Worst energy overdraw `use_i - E_i` (positive means violated).
    pub max_energy_excess: f64,
    /// Worst absolute conservation residual at a non-sink.
    pub max_conservation_gap: f64,
    /// Minimum per-node lifetime under the solution's flow rates.
    pub min_node_lifetime: f64,
}

impl AuditReport {
    pub fn within(&self, tol: f64) -> bool {
        self.max_energy_excess <= tol && self.max_conservation_gap <= tol
    }
}

/// Recomputes every constraint of `solution` directly on the network.
pub fn audit(network: &Network, solution: &FlowSolution) -> Result<AuditReport, LpError> {
    let usage = network.energy_use(&solution.flows)?;
    let mut max_energy_excess = f64::NEG_INFINITY;
    for (node, &u) in network.nodes.iter().zip(&usage) {
        max_energy_excess = max_energy_excess.max(u - node.energy_initial);
    }
    let mut max_gap = 0.0f64;
    for node in &network.nodes {
        if node.is_sink() {
            continue;
        }
        let mut balance = solution.lifetime * node.rate;
        for (edge, &q) in network.edges.iter().zip(&solution.flows) {
            if edge.dst == node.id {
                balance += q;
            }
            if edge.src == node.id {
                balance -= q;
            }
        }
        max_gap = max_gap.max(balance.abs());
    }
    // per-node lifetimes under the flow *rates* q = flows / T
    let min_node_lifetime = if solution.lifetime > 0.0 {
        let rates: Vec<f64> = solution
            .flows
            .iter()
            .map(|q| q / solution.lifetime)
            .collect();
        crate::netgraph::node_lifetime(network, &rates)?
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    } else {
        f64::INFINITY
    };
    Ok(AuditReport {
        max_energy_excess,
        max_conservation_gap: max_gap,
        min_node_lifetime,
    })
}

/// Lifetimes with and without the CB/CT edges, and the relative gain.
#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub with_cbct: NetworkLifetime,
    pub without_cbct: NetworkLifetime,
    /// `T_with / T_without - 1`; `None` flags an infinite gain (no path at
    /// all without the virtual edges).
    pub gain: Option<f64>,
}

/// Solves the network twice, with the full edge set and with `kind = cbct`
/// edges stripped, and reports the lifetime improvement.
pub fn lifetime_gain(network: &Network) -> Result<GainReport, LpError> {
    let with_cbct = solve_network(network)?;
    let stripped = network.strip_cbct();
    let without_cbct = match solve_network(&stripped) {
        Ok(r) => r,
        Err(LpError::DisconnectedOrigin(_)) => {
            // no route at all without CB/CT: treat as zero lifetime
            return Ok(GainReport {
                with_cbct,
                without_cbct: NetworkLifetime::Finite(FlowSolution {
                    flows: vec![0.0; stripped.edges.len()],
                    lifetime: 0.0,
                }),
                gain: None,
            });
        }
        Err(e) => return Err(e),
    };
    let t_with = with_cbct.lifetime();
    let t_without = without_cbct.lifetime();
    let gain = if t_without == 0.0 {
        None
    } else if t_with.is_infinite() && t_without.is_infinite() {
        Some(0.0)
    } else {
        Some(t_with / t_without - 1.0)
    };
    Ok(GainReport {
        with_cbct,
        without_cbct,
        gain,
    })
}
