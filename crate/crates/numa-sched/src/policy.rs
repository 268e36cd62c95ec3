//! Scheduling policy decisions shared by the simulator and the native
//! executor: which end tasks are queued at, and in what order an idle
//! thread probes victims.
//!
//! All decisions are pure: the same inputs and rng state always produce
//! the same output, which keeps both engines replayable.

use std::ops::Range;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::TopologyError;
use crate::priority::PlacementPlan;
use crate::topology::Topology;

pub type ThreadId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Single shared FIFO pool, no stealing.
    BreadthFirst,
    /// Depth-first with uniform-random victim selection.
    WorkFirst,
    /// Depth-first, victims swept in fixed nearest-first priority order.
    Dfwspt,
    /// Depth-first, nearest tier first but random victim within a tier.
    Dfwsrpt,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] =
        [PolicyKind::BreadthFirst, PolicyKind::WorkFirst, PolicyKind::Dfwspt, PolicyKind::Dfwsrpt];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::BreadthFirst => "bf",
            PolicyKind::WorkFirst => "wf",
            PolicyKind::Dfwspt => "dfwspt",
            PolicyKind::Dfwsrpt => "dfwsrpt",
        }
    }

    pub fn steals(self) -> bool {
        !matches!(self, PolicyKind::BreadthFirst)
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bf" => Ok(PolicyKind::BreadthFirst),
            "wf" => Ok(PolicyKind::WorkFirst),
            "dfwspt" => Ok(PolicyKind::Dfwspt),
            "dfwsrpt" => Ok(PolicyKind::Dfwsrpt),
            other => Err(format!("unknown scheduler '{other}' (expected bf|wf|dfwspt|dfwsrpt)")),
        }
    }
}

/// Where a spawned task is queued.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnqueueSide {
    /// Front of the owner's deque; the owner pops from the front (LIFO),
    /// thieves take from the back.
    Front,
    Back,
    /// Single global FIFO shared by the whole team.
    SharedQueue,
}

pub fn enqueue_side(kind: PolicyKind) -> EnqueueSide {
    match kind {
        PolicyKind::BreadthFirst => EnqueueSide::SharedQueue,
        PolicyKind::WorkFirst | PolicyKind::Dfwspt | PolicyKind::Dfwsrpt => EnqueueSide::Front,
    }
}

/// Per-thread victim ranking: other threads ordered by (hops to this
/// thread's core ascending, thread id ascending), with `tiers` marking the
/// index ranges of `order` that share one hop distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityList {
    pub thread: ThreadId,
    pub order: Vec<ThreadId>,
    pub tiers: Vec<(u32, Range<usize>)>,
}

/// Ordered victims an idle thread will probe, nearest intent first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StealDecision {
    pub victims: Vec<ThreadId>,
}

/// Builds every thread's priority list from the placement's core binding.
pub fn build_priority_lists(
    plan: &PlacementPlan,
    t: &Topology,
) -> Result<Vec<PriorityList>, TopologyError> {
    let team = plan.team_size();
    let mut lists = Vec::with_capacity(team);
    for me in 0..team {
        let my_core = plan.core_of(me);
        let mut ranked: Vec<(u32, ThreadId)> = Vec::with_capacity(team - 1);
        for other in 0..team {
            if other == me {
                continue;
            }
            ranked.push((t.hops_between(my_core, plan.core_of(other))?, other));
        }
        ranked.sort_unstable();
        let order: Vec<ThreadId> = ranked.iter().map(|&(_, id)| id).collect();
        let mut tiers: Vec<(u32, Range<usize>)> = Vec::new();
        for (idx, &(h, _)) in ranked.iter().enumerate() {
            match tiers.last_mut() {
                Some((hops, range)) if *hops == h => range.end = idx + 1,
                _ => tiers.push((h, idx..idx + 1)),
            }
        }
        lists.push(PriorityList { thread: me, order, tiers });
    }
    Ok(lists)
}

/// Victim probe order for one steal sweep.
///
/// * `Dfwspt`: exactly the requester's priority list, every sweep.
/// * `Dfwsrpt`: tiers in ascending distance order, victims within a tier
///   shuffled without replacement.
/// * `WorkFirst`: a uniform random permutation of all other threads.
/// * `BreadthFirst`: empty (shared queue, nothing to steal).
pub fn victim_sequence<R: Rng>(
    kind: PolicyKind,
    me: ThreadId,
    lists: &[PriorityList],
    rng: &mut R,
) -> StealDecision {
    let list = &lists[me];
    debug_assert_eq!(list.thread, me);
    let victims = match kind {
        PolicyKind::BreadthFirst => Vec::new(),
        PolicyKind::Dfwspt => list.order.clone(),
        PolicyKind::Dfwsrpt => {
            let mut out = Vec::with_capacity(list.order.len());
            for (_, range) in &list.tiers {
                let mut tier = list.order[range.clone()].to_vec();
                tier.shuffle(rng);
                out.extend(tier);
            }
            out
        }
        PolicyKind::WorkFirst => {
            let mut out = list.order.clone();
            out.shuffle(rng);
            out
        }
    };
    StealDecision { victims }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priority::PlacementPlan;
    use crate::topology::load_topology;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    /// Three nodes in a line: thread 0 on node 0, thread 1 at 1 hop,
    /// thread 2 at 2 hops.
    fn line3() -> (Topology, PlacementPlan) {
        let t = load_topology(
            "nodes 3\nnode 0 cores 0\nnode 1 cores 1\nnode 2 cores 2\n\
             dist 0 1 2\ndist 1 0 1\ndist 2 1 0\n",
        )
        .unwrap();
        let plan = PlacementPlan { master_core: 0, worker_order: vec![1, 2], rng_seed: 0 };
        (t, plan)
    }

    #[test]
    fn priority_list_ranks_by_distance_then_id() {
        let (t, plan) = line3();
        let lists = build_priority_lists(&plan, &t).unwrap();
        assert_eq!(lists[0].order, vec![1, 2]);
        assert_eq!(lists[0].tiers, vec![(1, 0..1), (2, 1..2)]);
        assert_eq!(lists[1].order, vec![0, 2]);
        assert_eq!(lists[2].order, vec![1, 0]);
    }

    #[test]
    fn priority_list_single_tier_is_id_order() {
        let t = load_topology("nodes 1\nnode 0 cores 0,1,2,3\ndist 0\n").unwrap();
        let plan = PlacementPlan { master_core: 0, worker_order: vec![1, 2, 3], rng_seed: 0 };
        let lists = build_priority_lists(&plan, &t).unwrap();
        assert_eq!(lists[2].order, vec![0, 1, 3]);
        assert_eq!(lists[2].tiers.len(), 1);
    }

    #[test]
    fn two_thread_lists() {
        let t = load_topology("nodes 1\nnode 0 cores 0,1\ndist 0\n").unwrap();
        let plan = PlacementPlan { master_core: 0, worker_order: vec![1], rng_seed: 0 };
        let lists = build_priority_lists(&plan, &t).unwrap();
        assert_eq!(lists[0].order, vec![1]);
        assert_eq!(lists[1].order, vec![0]);
    }

    #[test]
    fn enqueue_sides() {
        assert_eq!(enqueue_side(PolicyKind::Dfwspt), EnqueueSide::Front);
        assert_eq!(enqueue_side(PolicyKind::Dfwsrpt), EnqueueSide::Front);
        assert_eq!(enqueue_side(PolicyKind::WorkFirst), EnqueueSide::Front);
        assert_eq!(enqueue_side(PolicyKind::BreadthFirst), EnqueueSide::SharedQueue);
    }

    #[test]
    fn dfwspt_sequence_is_the_priority_list() {
        let (t, plan) = line3();
        let lists = build_priority_lists(&plan, &t).unwrap();
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = victim_sequence(PolicyKind::Dfwspt, 0, &lists, &mut rng);
            assert_eq!(d.victims, vec![1, 2]);
        }
    }

    #[test]
    fn dfwsrpt_respects_tiers_and_covers_permutations() {
        // 4 threads: {1,2} at 1 hop from thread 0, {3} at 2 hops.
        let t = load_topology(
            "nodes 3\nnode 0 cores 0\nnode 1 cores 1,2\nnode 2 cores 3\n\
             dist 0 1 2\ndist 1 0 1\ndist 2 1 0\n",
        )
        .unwrap();
        let plan = PlacementPlan { master_core: 0, worker_order: vec![1, 2, 3], rng_seed: 0 };
        let lists = build_priority_lists(&plan, &t).unwrap();
        let mut seen = HashSet::new();
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = victim_sequence(PolicyKind::Dfwsrpt, 0, &lists, &mut rng);
            assert_eq!(d.victims[2], 3, "far tier probed last: {:?}", d.victims);
            let near: HashSet<_> = d.victims[..2].iter().copied().collect();
            assert_eq!(near, HashSet::from([1, 2]));
            seen.insert(d.victims.clone());
        }
        assert_eq!(seen.len(), 2, "both within-tier permutations appear");
    }

    #[test]
    fn sequences_duplicate_free_and_exclude_requester() {
        let (t, plan) = line3();
        let lists = build_priority_lists(&plan, &t).unwrap();
        for kind in PolicyKind::ALL {
            for me in 0..3 {
                let mut rng = ChaCha8Rng::seed_from_u64(me as u64);
                let d = victim_sequence(kind, me, &lists, &mut rng);
                let set: HashSet<_> = d.victims.iter().copied().collect();
                assert_eq!(set.len(), d.victims.len());
                assert!(!set.contains(&me));
                if kind == PolicyKind::BreadthFirst {
                    assert!(d.victims.is_empty());
                } else {
                    assert_eq!(d.victims.len(), 2);
                }
            }
        }
    }

    #[test]
    fn team_of_two_always_probes_the_other() {
        let t = load_topology("nodes 1\nnode 0 cores 0,1\ndist 0\n").unwrap();
        let plan = PlacementPlan { master_core: 0, worker_order: vec![1], rng_seed: 0 };
        let lists = build_priority_lists(&plan, &t).unwrap();
        for kind in [PolicyKind::WorkFirst, PolicyKind::Dfwspt, PolicyKind::Dfwsrpt] {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            assert_eq!(victim_sequence(kind, 1, &lists, &mut rng).victims, vec![0]);
        }
    }

    #[test]
    fn policy_names_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("cilk".parse::<PolicyKind>().is_err());
    }
}
