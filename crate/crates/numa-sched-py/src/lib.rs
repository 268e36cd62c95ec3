//! Python bindings for the numa-sched toolkit.

use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use numa_sched::config::PlacementMode;
use numa_sched::policy::PolicyKind;
use numa_sched::priority::{
    build_placement, compute_priorities, naive_placement, PlacementPlan, WeightVector,
};
use numa_sched::sim::{serial_cost, simulate, LatencyModel};
use numa_sched::taskgen::{gen_graph, graph_stats, Benchmark, GraphSpec, TaskGraph};
use numa_sched::topology::load_topology;
use numa_sched::executor::{run_graph, trace_check};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Topology", frozen)]
struct PyTopology {
    inner: numa_sched::Topology,
}

#[pymethods]
impl PyTopology {
    /// Parses a topology from its text form.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyTopology { inner: load_topology(text).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(err)?;
        Self::parse(&text)
    }

    #[getter]
    fn core_count(&self) -> usize {
        self.inner.core_count()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn max_numa_distance(&self) -> u32 {
        self.inner.max_numa_distance()
    }

    fn node_of(&self, core: usize) -> PyResult<usize> {
        self.inner.node_of(core).map_err(err)
    }

    fn hops(&self, core_a: usize, core_b: usize) -> PyResult<u32> {
        self.inner.hops_between(core_a, core_b).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Topology(nodes={}, cores={}, max_distance={})",
            self.inner.node_count(),
            self.inner.core_count(),
            self.inner.max_numa_distance()
        )
    }
}

#[pyclass(name = "TaskGraph", frozen)]
struct PyTaskGraph {
    inner: TaskGraph,
}

#[pymethods]
impl PyTaskGraph {
    #[getter]
    fn task_count(&self) -> usize {
        self.inner.tasks.len()
    }

    #[getter]
    fn depth(&self) -> u64 {
        graph_stats(&self.inner).depth
    }

    #[getter]
    fn total_pages(&self) -> u64 {
        graph_stats(&self.inner).total_pages
    }

    fn __repr__(&self) -> String {
        format!("TaskGraph(tasks={}, depth={})", self.inner.tasks.len(), self.depth())
    }
}

fn weights_for(t: &numa_sched::Topology, weights: Option<Vec<u128>>) -> PyResult<WeightVector> {
    match weights {
        Some(w) => WeightVector::new(w).map_err(err),
        None => Ok(WeightVector::default_for(t)),
    }
}

fn plan_for(
    t: &numa_sched::Topology,
    team: usize,
    seed: u64,
    weights: Option<Vec<u128>>,
    placement: &str,
) -> PyResult<PlacementPlan> {
    match PlacementMode::from_str(placement).map_err(err)? {
        PlacementMode::NumaAware => {
            let w = weights_for(t, weights)?;
            let pt = compute_priorities(t, &w).map_err(err)?;
            build_placement(t, &pt, team, seed).map_err(err)
        }
        PlacementMode::NaiveFirstCore => naive_placement(t, team, seed).map_err(err),
    }
}

/// Per-core (v1, v2, final) priorities, ordered by core id.
#[pyfunction]
#[pyo3(signature = (topology, weights=None))]
fn priorities(topology: &PyTopology, weights: Option<Vec<u128>>) -> PyResult<Vec<(usize, u128, u128, u128)>> {
    let w = weights_for(&topology.inner, weights)?;
    let pt = compute_priorities(&topology.inner, &w).map_err(err)?;
    Ok(pt
        .entries()
        .iter()
        .map(|e| (e.core, e.v1, e.v2, e.final_priority))
        .collect())
}

/// Thread-to-core placement: (master_core, [worker cores...]).
#[pyfunction]
#[pyo3(signature = (topology, team, seed=1, weights=None, placement="numa"))]
fn placement(
    topology: &PyTopology,
    team: usize,
    seed: u64,
    weights: Option<Vec<u128>>,
    placement: &str,
) -> PyResult<(usize, Vec<usize>)> {
    let plan = plan_for(&topology.inner, team, seed, weights, placement)?;
    Ok((plan.master_core, plan.worker_order.clone()))
}

/// Generates a benchmark-shaped task graph.
#[pyfunction]
#[pyo3(signature = (benchmark, n=None, cutoff=None, seed=1, jitter=0))]
fn graph(
    benchmark: &str,
    n: Option<u64>,
    cutoff: Option<u64>,
    seed: u64,
    jitter: u64,
) -> PyResult<PyTaskGraph> {
    let bench = Benchmark::from_str(benchmark).map_err(err)?;
    let mut spec = GraphSpec::desk_scale(bench, seed);
    if let Some(n) = n {
        spec.n = n;
    }
    if let Some(c) = cutoff {
        spec.cutoff = c;
    }
    spec.jitter = jitter;
    Ok(PyTaskGraph { inner: gen_graph(&spec).map_err(err)? })
}

/// Simulates one run and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (graph, topology, policy="dfwspt", team=1, seed=1, placement="numa", weights=None))]
#[allow(clippy::too_many_arguments)]
fn run_sim(
    py: Python<'_>,
    graph: &PyTaskGraph,
    topology: &PyTopology,
    policy: &str,
    team: usize,
    seed: u64,
    placement: &str,
    weights: Option<Vec<u128>>,
) -> PyResult<Py<PyDict>> {
    let kind = PolicyKind::from_str(policy).map_err(err)?;
    let plan = plan_for(&topology.inner, team, seed, weights, placement)?;
    let lm = LatencyModel::default();
    let r = simulate(&graph.inner, &topology.inner, &plan, kind, &lm, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("policy", r.policy.name())?;
    d.set_item("team", r.team_size)?;
    d.set_item("master_core", r.master_core)?;
    d.set_item("makespan", r.makespan)?;
    d.set_item("serial_cost", serial_cost(&graph.inner, &lm))?;
    d.set_item("steals", r.total_steals())?;
    d.set_item("steal_successes_by_hop", r.steal_successes_by_hop.clone())?;
    d.set_item("local_pages", r.local_page_accesses)?;
    d.set_item("remote_pages", r.remote_page_accesses)?;
    d.set_item("remote_latency", r.remote_latency)?;
    Ok(d.unbind())
}

/// Runs the graph on real threads; returns discipline violations (empty
/// list means the trace checked out) and the task count executed.
#[pyfunction]
#[pyo3(signature = (graph, topology, policy="dfwspt", team=2, seed=1, placement="numa", pin=false))]
fn run_native(
    graph: &PyTaskGraph,
    topology: &PyTopology,
    policy: &str,
    team: usize,
    seed: u64,
    placement: &str,
    pin: bool,
) -> PyResult<(Vec<String>, usize)> {
    let kind = PolicyKind::from_str(policy).map_err(err)?;
    let plan = plan_for(&topology.inner, team, seed, None, placement)?;
    let trace = run_graph(&graph.inner, &topology.inner, &plan, kind, pin, seed).map_err(err)?;
    let executed = trace.per_worker.iter().map(|w| w.len()).sum();
    Ok((trace_check(&trace, &graph.inner), executed))
}

#[pymodule]
fn numasched(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTopology>()?;
    m.add_class::<PyTaskGraph>()?;
    m.add_function(wrap_pyfunction!(priorities, m)?)?;
    m.add_function(wrap_pyfunction!(placement, m)?)?;
    m.add_function(wrap_pyfunction!(graph, m)?)?;
    m.add_function(wrap_pyfunction!(run_sim, m)?)?;
    m.add_function(wrap_pyfunction!(run_native, m)?)?;
    Ok(())
}
