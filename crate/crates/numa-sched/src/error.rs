use thiserror::Error;

/// Errors produced by topology parsing and validation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("distance matrix row {row}: {msg}")]
    BadMatrix { row: usize, msg: String },
    #[error("node {node}: {msg}")]
    BadNode { node: usize, msg: String },
    #[error("unknown core id {0}")]
    UnknownCore (usize),
    #[error("core ids must cover 0..{expected} exactly; {msg}")]
    CoreCoverage { expected: usize, msg: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PriorityError {
    #[error("no weight defined for hop distance {0}")]
    MissingWeight(u32),
    #[error("weights must be strictly decreasing and positive: {0}")]
    BadWeights(String),
    #[error("priority arithmetic overflow (weights too large for this machine size)")]
    Overflow,
    #[error("team size {given} out of range 1..={max}")]
    BadTeamSize { given: usize, max: usize },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown benchmark '{0}' (expected fib|nqueens|sort|fft|strassen|sparselu)")]
    UnknownBenchmark(String),
    #[error("scale parameter {name} must be positive (got {value})")]
    BadScale { name: &'static str, value: i64 },
    #[error("malformed task graph: {0}")]
    Malformed(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("latency model invalid: {0}")]
    BadLatencyModel(String),
    #[error("placement covers {plan} threads but graph/run requested {requested}")]
    TeamMismatch { plan: usize, requested: usize },
    #[error("all nodes out of page capacity while homing page {page} of region {region}")]
    CapacityExhausted { region: usize, page: u64 },
    #[error("page range {start}..{end} outside region {region} of {size} pages")]
    PageOutOfRange { region: usize, start: u64, end: u64, size: u64 },
    #[error("reports compare different graphs ({0} vs {1} tasks)")]
    MismatchedReports(u64, u64),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Priority(#[from] PriorityError),
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("worker thread panicked")]
    WorkerPanic,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: missing required key '{key}'")]
    MissingKey { path: String, key: String },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
