//! NUMA-aware task scheduling toolkit: machine topology modeling,
//! core-priority thread placement, locality-aware work-stealing policies,
//! a discrete-event simulator with first-touch page placement, and a
//! native thread-pool executor for the same task graphs.

pub mod config;
pub mod error;
pub mod executor;
pub mod experiment;
pub mod policy;
pub mod priority;
pub mod sim;
pub mod taskgen;
pub mod topology;

pub use config::{load_config, ExperimentConfig, OutputFormat, PlacementMode};
pub use error::{ConfigError, ExecError, GraphError, PriorityError, SimError, TopologyError};
pub use executor::{run_graph, trace_check, ExecutionTrace};
pub use experiment::{emit_summary, run_experiment, ResultRow, ResultSet};
pub use policy::{build_priority_lists, victim_sequence, PolicyKind, PriorityList};
pub use priority::{
    build_placement, compute_priorities, compute_v1, compute_v2, naive_placement, CorePriority,
    PlacementPlan, PriorityTable, WeightVector,
};
pub use sim::{compare_runs, critical_path, serial_cost, simulate, LatencyModel, SimReport, StealCost};
pub use taskgen::{gen_graph, graph_stats, Benchmark, GraphSpec, TaskGraph, TaskNode};
pub use topology::{load_topology, slit_to_hops, CoreId, NodeId, NumaNode, Topology};
