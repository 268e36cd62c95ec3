//! Machine model: NUMA nodes, cores and inter-node hop distances.
//!
//! Distances are abstract hop counts: cores on the same node are 0 hops
//! apart, adjacent nodes 1 hop, and so on. This differs from SLIT tables
//! where local distance is 10; see [`slit_to_hops`] for the conversion.
//! A `Topology` is immutable after construction and safe to share
//! read-only across threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::TopologyError;

pub type CoreId = usize;
pub type NodeId = usize;

/// One processor socket plus its directly attached memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumaNode {
    pub id: NodeId,
    pub cores: Vec<CoreId>,
    /// Page capacity used by the simulator's first-touch model.
    /// `u64::MAX` means effectively unlimited (the default for parsed files,
    /// which carry no capacity field).
    pub memory_capacity_pages: u64,
}

/// A core together with its owning node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreRef {
    pub core_id: CoreId,
    pub node_id: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    nodes: Vec<NumaNode>,
    /// Square hop matrix indexed by node id. Symmetric, zero diagonal.
    distance: Vec<Vec<u32>>,
    core_count: usize,
    /// core id -> owning node id.
    core_node: Vec<NodeId>,
}

impl Topology {
    /// Builds and validates a topology from nodes and a hop matrix.
    pub fn new(nodes: Vec<NumaNode>, distance: Vec<Vec<u32>>) -> Result<Self, TopologyError> {
        let n = nodes.len();
        if n == 0 {
            return Err(TopologyError::BadNode { node: 0, msg: "topology has no nodes".into() });
        }
        if distance.len() != n {
            return Err(TopologyError::BadMatrix {
                row: distance.len(),
                msg: format!("matrix has {} rows for {} nodes", distance.len(), n),
            });
        }
        for (i, row) in distance.iter().enumerate() {
            if row.len() != n {
                return Err(TopologyError::BadMatrix {
                    row: i,
                    msg: format!("row has {} entries for {} nodes", row.len(), n),
                });
            }
            if row[i] != 0 {
                return Err(TopologyError::BadMatrix {
                    row: i,
                    msg: format!("diagonal entry is {}, must be 0", row[i]),
                });
            }
            for (j, &d) in row.iter().enumerate() {
                if i != j && d == 0 {
                    return Err(TopologyError::BadMatrix {
                        row: i,
                        msg: format!("distance[{i}][{j}] = 0 for distinct nodes"),
                    });
                }
                if d != distance[j][i] {
                    return Err(TopologyError::BadMatrix {
                        row: i,
                        msg: format!(
                            "asymmetric: distance[{i}][{j}] = {} but distance[{j}][{i}] = {}",
                            d, distance[j][i]
                        ),
                    });
                }
            }
        }
        for (idx, node) in nodes.iter().enumerate() {
            if node.id != idx {
                return Err(TopologyError::BadNode {
                    node: idx,
                    msg: format!("node ids must be dense and ordered; found id {}", node.id),
                });
            }
            if node.cores.is_empty() {
                return Err(TopologyError::BadNode { node: idx, msg: "node has no cores".into() });
            }
        }
        let core_count: usize = nodes.iter().map(|nd| nd.cores.len()).sum();
        let mut core_node = vec![usize::MAX; core_count];
        for node in &nodes {
            for &c in &node.cores {
                if c >= core_count {
                    return Err(TopologyError::CoreCoverage {
                        expected: core_count,
                        msg: format!("core id {c} out of range"),
                    });
                }
                if core_node[c] != usize::MAX {
                    return Err(TopologyError::CoreCoverage {
                        expected: core_count,
                        msg: format!("core id {c} appears in more than one node"),
                    });
                }
                core_node[c] = node.id;
            }
        }
        Ok(Topology { nodes, distance, core_count, core_node })
    }

    pub fn nodes(&self) -> &[NumaNode] {
        &self.nodes
    }

    pub fn core_count(&self) -> usize {
        self.core_count
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_of(&self, core: CoreId) -> Result<NodeId, TopologyError> {
        self.core_node.get(core).copied().ok_or(TopologyError::UnknownCore(core))
    }

    pub fn core_ref(&self, core: CoreId) -> Result<CoreRef, TopologyError> {
        Ok(CoreRef { core_id: core, node_id: self.node_of(core)? })
    }

    pub fn node_distance(&self, a: NodeId, b: NodeId) -> u32 {
        self.distance[a][b]
    }

    /// Largest hop count in the matrix.
    pub fn max_numa_distance(&self) -> u32 {
        self.distance.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Hop distance between the nodes owning two cores. Same node (and the
    /// same core) is 0 hops.
    pub fn hops_between(&self, core_a: CoreId, core_b: CoreId) -> Result<u32, TopologyError> {
        let na = self.node_of(core_a)?;
        let nb = self.node_of(core_b)?;
        Ok(self.distance[na][nb])
    }

    /// Partitions all other cores into hop-distance tiers around `core`.
    /// Tiers with no cores are omitted, so the union of the returned sets
    /// has exactly `core_count - 1` members.
    pub fn cores_at_hops(&self, core: CoreId) -> Result<BTreeMap<u32, Vec<CoreId>>, TopologyError> {
        let my_node = self.node_of(core)?;
        let mut tiers: BTreeMap<u32, Vec<CoreId>> = BTreeMap::new();
        for other in 0..self.core_count {
            if other == core {
                continue;
            }
            let d = self.distance[my_node][self.core_node[other]];
            tiers.entry(d).or_default().push(other);
        }
        Ok(tiers)
    }

    /// Replaces every node's page capacity (simulator configuration).
    pub fn with_capacities(mut self, pages_per_node: u64) -> Self {
        for node in &mut self.nodes {
            node.memory_capacity_pages = pages_per_node;
        }
        self
    }

    /// Serializes back to the topology file format accepted by
    /// [`load_topology`].
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nodes {}", self.nodes.len());
        for node in &self.nodes {
            let cores: Vec<String> = node.cores.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "node {} cores {}", node.id, cores.join(","));
        }
        for row in &self.distance {
            let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "dist {}", cells.join(" "));
        }
        out
    }
}

/// Converts a SLIT-style latency figure (local = 10) to abstract hops
/// (local = 0): `hops = round((slit - 10) / 10)`.
pub fn slit_to_hops(slit: u32) -> u32 {
    (slit.saturating_sub(10) + 5) / 10
}

/// Parses the line-oriented topology file format.
///
/// ```text
/// # comment lines and blank lines are ignored
/// nodes 2
/// node 0 cores 0,1,2,3
/// node 1 cores 4,5
/// dist 0 1
/// dist 1 0
/// ```
///
/// The header names the node count N, followed by exactly N `node` lines
/// and N `dist` rows. Anything after the last row is rejected.
pub fn load_topology(text: &str) -> Result<Topology, TopologyError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or(TopologyError::Parse { line: 0, msg: "empty topology file".into() })?;
    let n: usize = match header.strip_prefix("nodes ") {
        Some(rest) => rest.trim().parse().map_err(|_| TopologyError::Parse {
            line: hline,
            msg: format!("bad node count '{}'", rest.trim()),
        })?,
        None => {
            return Err(TopologyError::Parse {
                line: hline,
                msg: format!("expected 'nodes N' header, got '{header}'"),
            })
        }
    };

    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = lines.next().ok_or(TopologyError::Parse {
            line: hline,
            msg: format!("expected {n} 'node' lines"),
        })?;
        let rest = line.strip_prefix("node ").ok_or_else(|| TopologyError::Parse {
            line: ln,
            msg: format!("expected 'node <id> cores <list>', got '{line}'"),
        })?;
        let (id_str, cores_part) =
            rest.split_once(" cores ").ok_or_else(|| TopologyError::Parse {
                line: ln,
                msg: "missing 'cores' keyword".into(),
            })?;
        let id: usize = id_str.trim().parse().map_err(|_| TopologyError::Parse {
            line: ln,
            msg: format!("bad node id '{}'", id_str.trim()),
        })?;
        let mut cores = Vec::new();
        for tok in cores_part.split(',') {
            let c: usize = tok.trim().parse().map_err(|_| TopologyError::Parse {
                line: ln,
                msg: format!("bad core id '{}'", tok.trim()),
            })?;
            cores.push(c);
        }
        nodes.push(NumaNode { id, cores, memory_capacity_pages: u64::MAX });
    }

    let mut distance = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = lines.next().ok_or(TopologyError::Parse {
            line: hline,
            msg: format!("expected {n} 'dist' rows"),
        })?;
        let rest = line.strip_prefix("dist ").ok_or_else(|| TopologyError::Parse {
            line: ln,
            msg: format!("expected 'dist <row>', got '{line}'"),
        })?;
        let mut row = Vec::with_capacity(n);
        for tok in rest.split_whitespace() {
            let d: u32 = tok.parse().map_err(|_| TopologyError::Parse {
                line: ln,
                msg: format!("bad distance '{tok}'"),
            })?;
            row.push(d);
        }
        distance.push(row);
    }

    if let Some((ln, line)) = lines.next() {
        return Err(TopologyError::Parse {
            line: ln,
            msg: format!("trailing garbage after distance matrix: '{line}'"),
        });
    }

    Topology::new(nodes, distance)
}
