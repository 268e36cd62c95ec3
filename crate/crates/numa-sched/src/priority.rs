//! Two-level core priority computation and thread placement.
//!
//! Every core gets a first-level value `V1 = sum over hop tiers i of
//! alpha_i * N_i` (N_i = number of other cores at i hops), then a single
//! refinement pass `V2 = sum over tiers i, cores j in tier i, of
//! alpha_i * V1(j)`. The final priority is `V1 + V2`. The master thread
//! binds to a highest-priority core and workers fill in nearest-first.
//!
//! All arithmetic is u128 with overflow checks; with hops <= 15 and the
//! default weights this supports machines far beyond anything the rest of
//! the toolkit simulates.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::PriorityError;
use crate::topology::{CoreId, Topology};

/// Per-hop weights alpha_0 > alpha_1 > ... > alpha_max > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    alpha: Vec<u128>,
}

impl WeightVector {
    pub fn new(alpha: Vec<u128>) -> Result<Self, PriorityError> {
        if alpha.is_empty() {
            return Err(PriorityError::BadWeights("empty weight vector".into()));
        }
        for (i, w) in alpha.iter().enumerate() {
            if *w == 0 {
                return Err(PriorityError::BadWeights(format!("alpha[{i}] = 0")));
            }
            if i + 1 < alpha.len() && alpha[i + 1] >= *w {
                return Err(PriorityError::BadWeights(format!(
                    "alpha[{}] = {} >= alpha[{i}] = {w}",
                    i + 1,
                    alpha[i + 1]
                )));
            }
        }
        Ok(WeightVector { alpha })
    }

    /// Default rule: alpha_i = 2^(max_numa_distance - i).
    pub fn default_for(t: &Topology) -> Self {
        let max = t.max_numa_distance();
        let alpha = (0..=max).map(|i| 1u128 << (max - i)).collect();
        WeightVector { alpha }
    }

    /// Weight for a hop distance; distances beyond the defined range weigh 0.
    pub fn weight(&self, hops: u32) -> u128 {
        self.alpha.get(hops as usize).copied().unwrap_or(0)
    }

    fn require(&self, hops: u32) -> Result<u128, PriorityError> {
        self.alpha
            .get(hops as usize)
            .copied()
            .ok_or(PriorityError::MissingWeight(hops))
    }

    pub fn as_slice(&self) -> &[u128] {
        &self.alpha
    }

    pub fn scaled(&self, c: u128) -> Result<Self, PriorityError> {
        let alpha = self
            .alpha
            .iter()
            .map(|w| w.checked_mul(c).ok_or(PriorityError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        WeightVector::new(alpha)
    }
}

/// One row of the priority table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorePriority {
    pub core: CoreId,
    pub v1: u128,
    pub v2: u128,
    pub final_priority: u128,
    /// N_i inputs: cores found at each hop tier.
    pub tier_counts: Vec<(u32, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityTable {
    entries: Vec<CorePriority>,
}

impl PriorityTable {
    pub fn entries(&self) -> &[CorePriority] {
        &self.entries
    }

    pub fn entry(&self, core: CoreId) -> &CorePriority {
        &self.entries[core]
    }

    pub fn final_of(&self, core: CoreId) -> u128 {
        self.entries[core].final_priority
    }
}

/// Thread-to-core assignment: `master_core` for thread 0, then
/// `worker_order[k]` for thread k+1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementPlan {
    pub master_core: CoreId,
    pub worker_order: Vec<CoreId>,
    pub rng_seed: u64,
}

impl PlacementPlan {
    pub fn team_size(&self) -> usize {
        1 + self.worker_order.len()
    }

    /// Core bound to a team thread (0 = master).
    pub fn core_of(&self, thread: usize) -> CoreId {
        if thread == 0 {
            self.master_core
        } else {
            self.worker_order[thread - 1]
        }
    }

    pub fn cores(&self) -> Vec<CoreId> {
        (0..self.team_size()).map(|t| self.core_of(t)).collect()
    }
}

fn add(a: u128, b: u128) -> Result<u128, PriorityError> {
    a.checked_add(b).ok_or(PriorityError::Overflow)
}

fn mul(a: u128, b: u128) -> Result<u128, PriorityError> {
    a.checked_mul(b).ok_or(PriorityError::Overflow)
}

/// First-level value: sum over hop tiers of alpha_i * N_i.
pub fn compute_v1(t: &Topology, w: &WeightVector, core: CoreId) -> Result<u128, PriorityError> {
    let mut v1 = 0u128;
    for (hops, cores) in t.cores_at_hops(core)? {
        let alpha = w.require(hops)?;
        v1 = add(v1, mul(alpha, cores.len() as u128)?)?;
    }
    Ok(v1)
}

/// Second-level value: sum over hop tiers i and cores j at i hops of
/// alpha_i * v1_table[j]. One refinement pass; no fixed-point iteration.
pub fn compute_v2(
    t: &Topology,
    w: &WeightVector,
    v1_table: &[u128],
    core: CoreId,
) -> Result<u128, PriorityError> {
    let mut v2 = 0u128;
    for (hops, cores) in t.cores_at_hops(core)? {
        let alpha = w.require(hops)?;
        for j in cores {
            v2 = add(v2, mul(alpha, v1_table[j])?)?;
        }
    }
    Ok(v2)
}

/// Full two-level priority computation for every core.
pub fn compute_priorities(t: &Topology, w: &WeightVector) -> Result<PriorityTable, PriorityError> {
    let cores = t.core_count();
    let mut v1_table = Vec::with_capacity(cores);
    let mut tier_counts = Vec::with_capacity(cores);
    for core in 0..cores {
        v1_table.push(compute_v1(t, w, core)?);
        let counts = t
            .cores_at_hops(core)?
            .into_iter()
            .map(|(h, cs)| (h, cs.len()))
            .collect();
        tier_counts.push(counts);
    }
    let mut entries = Vec::with_capacity(cores);
    for core in 0..cores {
        let v1 = v1_table[core];
        let v2 = compute_v2(t, w, &v1_table, core)?;
        entries.push(CorePriority {
            core,
            v1,
            v2,
            final_priority: add(v1, v2)?,
            tier_counts: std::mem::take(&mut tier_counts[core]),
        });
    }
    Ok(PriorityTable { entries })
}

/// Picks the master core (seeded-random among the highest-priority cores)
/// and orders worker cores by (hops to master ascending, final priority
/// descending, seeded-random tie-break). Deterministic for a fixed seed.
pub fn build_placement(
    t: &Topology,
    pt: &PriorityTable,
    team_size: usize,
    seed: u64,
) -> Result<PlacementPlan, PriorityError> {
    let cores = t.core_count();
    if team_size == 0 || team_size > cores {
        return Err(PriorityError::BadTeamSize { given: team_size, max: cores });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let best = pt.entries().iter().map(|e| e.final_priority).max().unwrap();
    let candidates: Vec<CoreId> = (0..cores).filter(|&c| pt.final_of(c) == best).collect();
    let master_core = candidates[rng.random_range(0..candidates.len())];

    // Random token per core breaks (hops, priority) ties reproducibly.
    let tokens: Vec<u64> = (0..cores).map(|_| rng.random()).collect();
    let mut rest: Vec<CoreId> = (0..cores).filter(|&c| c != master_core).collect();
    rest.sort_by_key(|&c| {
        (
            t.hops_between(master_core, c).expect("validated core id"),
            std::cmp::Reverse(pt.final_of(c)),
            tokens[c],
        )
    });
    rest.truncate(team_size - 1);

    Ok(PlacementPlan { master_core, worker_order: rest, rng_seed: seed })
}

/// Naive baseline placement: master on core 0, workers on ascending core
/// ids (the behavior of a runtime that ignores the topology).
pub fn naive_placement(t: &Topology, team_size: usize, seed: u64) -> Result<PlacementPlan, PriorityError> {
    let cores = t.core_count();
    if team_size == 0 || team_size > cores {
        return Err(PriorityError::BadTeamSize { given: team_size, max: cores });
    }
    Ok(PlacementPlan {
        master_core: 0,
        worker_order: (1..team_size).collect(),
        rng_seed: seed,
    })
}
