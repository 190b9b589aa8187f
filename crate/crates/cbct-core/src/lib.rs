//! Link-gain models and lifetime optimization for wireless sensor networks
//! that use collaborative beamforming (CB) and cooperative transmission (CT).
//!
//! The crate is organized in three layers:
//!
//! * [`linkmodel`] — physical-layer quantities: direct SNR, the CB
//!   directivity bound and its Monte Carlo beam-pattern estimator, the CT
//!   gain (closed form and Monte Carlo), packet success probability, and a
//!   Gauss hypergeometric evaluator for the terminating series the CT gain
//!   reduces to.
//! * [`diskcase`] — the analytical 2D-disk network: per-radius payload under
//!   packet forwarding, pure CB/CT and the joint scheme, with a bisection
//!   optimizer that minimizes the heaviest payload.
//! * [`netgraph`], [`lifetime_lp`], [`dynrouting`] — general networks:
//!   graph construction with CB/CT virtual edges, max-min lifetime as a
//!   linear program over the augmented graph, and an energy-aware dynamic
//!   routing simulator.
//!
//! Monte Carlo entry points take an explicit seed and derive one RNG
//! substream per trial, so results are identical whether the `parallel`
//! feature (rayon) is enabled or not.

pub mod diskcase;
pub mod dynrouting;
pub mod exec;
pub mod lifetime_lp;
pub mod linkmodel;
pub mod netgraph;

pub use linkmodel::ChannelParams;
pub use netgraph::{Edge, EdgeKind, GainMode, Network, NodeState, Scenario};
