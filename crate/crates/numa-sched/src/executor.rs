//! Native work-stealing thread pool running task graphs as busy-loop
//! stubs, with the same policy decisions as the simulator.
//!
//! One worker per team slot; per-worker deques (owner pushes and pops at
//! the front, thieves take from the back) are the only shared task
//! containers, lock-based and linearizable by construction. Timing comes
//! from a global logical clock so trace checks are insensitive to real
//! scheduling jitter. Core pinning is best-effort: when the host cannot
//! bind a thread the run proceeds unpinned with a warning.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::ExecError;
use crate::policy::{enqueue_side, victim_sequence, EnqueueSide, PolicyKind, ThreadId};
use crate::policy::{build_priority_lists, PriorityList};
use crate::priority::PlacementPlan;
use crate::taskgen::{validate, TaskGraph, TaskId};
use crate::topology::Topology;

const NO_THREAD: usize = usize::MAX;

/// One executed task in a worker's log. Stamps are logical (a global
/// atomic counter), not wall-clock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub task: TaskId,
    pub start: u64,
    pub finish: u64,
    pub stolen: Option<StealRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StealRecord {
    pub victim: ThreadId,
    /// Victims probed this sweep, in order, ending with the one that
    /// yielded the task.
    pub probe_prefix: Vec<ThreadId>,
}

#[derive(Debug, Clone)]
pub struct ExecutionTrace {
    pub policy: PolicyKind,
    pub team_size: usize,
    pub per_worker: Vec<Vec<TraceEvent>>,
    /// Per-task logical stamp at completion (after taskwait).
    pub completed_stamp: Vec<u64>,
    /// Thread that enqueued each task (the root counts as enqueued by 0).
    pub spawner: Vec<ThreadId>,
    /// Whether every worker was successfully bound to its planned core.
    pub pinned: bool,
}

struct Shared<'g> {
    g: &'g TaskGraph,
    side: EnqueueSide,
    deques: Vec<Mutex<VecDeque<TaskId>>>,
    shared_q: Mutex<VecDeque<TaskId>>,
    pending: Vec<AtomicUsize>,
    next_serial: Vec<AtomicUsize>,
    completed_stamp: Vec<AtomicU64>,
    spawner: Vec<AtomicUsize>,
    clock: AtomicU64,
    remaining: AtomicUsize,
    done: AtomicBool,
}

impl<'g> Shared<'g> {
    fn stamp(&self) -> u64 {
        self.clock.fetch_add(1, Ordering::SeqCst) + 1
    }

    fn enqueue(&self, task: TaskId, me: ThreadId) {
        self.spawner[task].store(me, Ordering::SeqCst);
        match self.side {
            EnqueueSide::Front => self.deques[me].lock().unwrap().push_front(task),
            EnqueueSide::Back => self.deques[me].lock().unwrap().push_back(task),
            EnqueueSide::SharedQueue => self.shared_q.lock().unwrap().push_back(task),
        }
    }

    /// Marks a task complete and walks taskwait/serial bookkeeping up the
    /// tree, spawning the next serial sibling where due.
    fn complete(&self, task: TaskId, me: ThreadId) {
        self.completed_stamp[task].store(self.stamp(), Ordering::SeqCst);
        if self.remaining.fetch_sub(1, Ordering::SeqCst) == 1 {
            self.done.store(true, Ordering::SeqCst);
        }
        let mut cur = task;
        while let Some(parent) = self.g.tasks[cur].parent {
            let pnode = &self.g.tasks[parent];
            if pnode.serial_children {
                let idx = self.next_serial[parent].fetch_add(1, Ordering::SeqCst);
                if idx < pnode.children.len() {
                    self.pending[parent].fetch_sub(1, Ordering::SeqCst);
                    self.enqueue(pnode.children[idx], me);
                    return;
                }
            }
            if self.pending[parent].fetch_sub(1, Ordering::SeqCst) == 1 {
                self.completed_stamp[parent].store(self.stamp(), Ordering::SeqCst);
                if self.remaining.fetch_sub(1, Ordering::SeqCst) == 1 {
                    self.done.store(true, Ordering::SeqCst);
                }
                cur = parent;
            } else {
                return;
            }
        }
    }
}

/// Deterministic busy work standing in for a task kernel; written so the
/// optimizer cannot remove it, and cheap enough for stress testing.
fn burn(cost: u64) {
    let mut acc = 0u64;
    for i in 0..cost * 8 {
        acc = acc.wrapping_mul(6364136223846793005).wrapping_add(i);
        std::hint::black_box(acc);
    }
}

#[cfg(target_os = "linux")]
fn pin_current_thread(core: usize) -> bool {
    let ncpus = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cpu = core % ncpus;
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(cpu, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
fn pin_current_thread(_core: usize) -> bool {
    false
}

struct Worker<'g, 's> {
    me: ThreadId,
    shared: &'s Shared<'g>,
    lists: &'s [PriorityList],
    kind: PolicyKind,
    rng: ChaCha8Rng,
    log: Vec<TraceEvent>,
}

impl Worker<'_, '_> {
    fn run_task(&mut self, task: TaskId, stolen: Option<StealRecord>) {
        let start = self.shared.stamp();
        burn(self.shared.g.tasks[task].compute_cost);
        let finish = self.shared.stamp();
        self.log.push(TraceEvent { task, start, finish, stolen });

        let node = &self.shared.g.tasks[task];
        if node.children.is_empty() {
            self.shared.complete(task, self.me);
        } else if node.serial_children {
            self.shared.enqueue(node.children[0], self.me);
        } else {
            match self.shared.side {
                EnqueueSide::Front => {
                    for &c in node.children.iter().rev() {
                        self.shared.enqueue(c, self.me);
                    }
                }
                _ => {
                    for &c in &node.children {
                        self.shared.enqueue(c, self.me);
                    }
                }
            }
        }
    }

    fn acquire(&mut self) -> Option<(TaskId, Option<StealRecord>)> {
        if self.shared.side == EnqueueSide::SharedQueue {
            return self.shared.shared_q.lock().unwrap().pop_front().map(|t| (t, None));
        }
        if let Some(task) = self.shared.deques[self.me].lock().unwrap().pop_front() {
            return Some((task, None));
        }
        if self.kind.steals() {
            let decision = victim_sequence(self.kind, self.me, self.lists, &mut self.rng);
            let mut prefix = Vec::new();
            for victim in decision.victims {
                prefix.push(victim);
                if let Some(task) = self.shared.deques[victim].lock().unwrap().pop_back() {
                    return Some((task, Some(StealRecord { victim, probe_prefix: prefix })));
                }
            }
        }
        None
    }

    fn run(&mut self) {
        while !self.shared.done.load(Ordering::SeqCst) {
            match self.acquire() {
                Some((task, stolen)) => self.run_task(task, stolen),
                None => std::thread::yield_now(),
            }
        }
    }
}

/// Executes a graph on real OS threads under the given policy and
/// placement, returning the per-worker trace.
pub fn run_graph(
    g: &TaskGraph,
    t: &Topology,
    plan: &PlacementPlan,
    kind: PolicyKind,
    pin: bool,
    seed: u64,
) -> Result<ExecutionTrace, ExecError> {
    validate(g)?;
    let team = plan.team_size();
    let lists = build_priority_lists(plan, t)?;
    let n = g.tasks.len();

    let shared = Shared {
        g,
        side: enqueue_side(kind),
        deques: (0..team).map(|_| Mutex::new(VecDeque::new())).collect(),
        shared_q: Mutex::new(VecDeque::new()),
        pending: g.tasks.iter().map(|t| AtomicUsize::new(t.children.len())).collect(),
        next_serial: (0..n).map(|_| AtomicUsize::new(1)).collect(),
        completed_stamp: (0..n).map(|_| AtomicU64::new(0)).collect(),
        spawner: (0..n).map(|_| AtomicUsize::new(NO_THREAD)).collect(),
        clock: AtomicU64::new(0),
        remaining: AtomicUsize::new(n),
        done: AtomicBool::new(false),
    };
    shared.enqueue(g.root, 0);

    let pin_failed = AtomicBool::new(false);
    let logs: Vec<Vec<TraceEvent>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..team)
            .map(|me| {
                let shared = &shared;
                let lists = &lists;
                let pin_failed = &pin_failed;
                let core = plan.core_of(me);
                scope.spawn(move || {
                    if pin && !pin_current_thread(core) {
                        pin_failed.store(true, Ordering::SeqCst);
                    }
                    let mut worker = Worker {
                        me,
                        shared,
                        lists,
                        kind,
                        rng: ChaCha8Rng::seed_from_u64(
                            seed.wrapping_add(me as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                        ),
                        log: Vec::new(),
                    };
                    worker.run();
                    worker.log
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().map_err(|_| ExecError::WorkerPanic))
            .collect::<Result<Vec<_>, _>>()
    })?;

    if pin && pin_failed.load(Ordering::SeqCst) {
        eprintln!("warning: core pinning unsupported or denied on this host; running unpinned");
    }

    Ok(ExecutionTrace {
        policy: kind,
        team_size: team,
        per_worker: logs,
        completed_stamp: shared.completed_stamp.iter().map(|s| s.load(Ordering::SeqCst)).collect(),
        spawner: shared.spawner.iter().map(|s| s.load(Ordering::SeqCst)).collect(),
        pinned: pin && !pin_failed.load(Ordering::SeqCst),
    })
}

/// Verifies a trace against its graph: exactly-once execution, fork-join
/// ordering (children start after the parent body and complete before the
/// parent's taskwait), serial-sibling ordering, and steal discipline
/// (a thief never takes from itself, and the stolen task really was in
/// the victim's pool). Empty violation list means pass.
pub fn trace_check(tr: &ExecutionTrace, g: &TaskGraph) -> Vec<String> {
    let n = g.tasks.len();
    let mut violations = Vec::new();
    let mut starts = vec![0u64; n];
    let mut finishes = vec![0u64; n];
    let mut seen = vec![0u32; n];
    for (worker, log) in tr.per_worker.iter().enumerate() {
        for ev in log {
            if ev.task >= n {
                violations.push(format!("worker {worker} logged unknown task {}", ev.task));
                continue;
            }
            seen[ev.task] += 1;
            starts[ev.task] = ev.start;
            finishes[ev.task] = ev.finish;
            if let Some(steal) = &ev.stolen {
                if steal.victim == worker {
                    violations.push(format!("worker {worker} stole task {} from itself", ev.task));
                }
                if steal.victim >= tr.team_size {
                    violations.push(format!("steal of task {} from invalid thread {}", ev.task, steal.victim));
                } else if tr.spawner[ev.task] != steal.victim {
                    violations.push(format!(
                        "task {} stolen from {} but was enqueued by {}",
                        ev.task, steal.victim, tr.spawner[ev.task]
                    ));
                }
                if steal.probe_prefix.last() != Some(&steal.victim) {
                    violations.push(format!("probe prefix for task {} does not end at its victim", ev.task));
                }
            }
        }
    }
    for (id, &count) in seen.iter().enumerate() {
        if count != 1 {
            violations.push(format!("task {id} executed {count} times"));
        }
    }
    if violations.iter().any(|v| v.contains("executed")) {
        return violations; // stamp checks are meaningless on a broken census
    }
    for task in &g.tasks {
        for &child in &task.children {
            if starts[child] <= finishes[task.id] && !task.serial_children {
                // parallel children are enqueued after the parent body
                violations.push(format!("child {child} started before parent {} body finished", task.id));
            }
            if task.sync_after_children && tr.completed_stamp[task.id] <= tr.completed_stamp[child] {
                violations.push(format!(
                    "parent {} continuation preceded completion of child {child}",
                    task.id
                ));
            }
        }
        if task.serial_children {
            for pair in task.children.windows(2) {
                if starts[pair[1]] <= tr.completed_stamp[pair[0]] {
                    violations.push(format!(
                        "serial child {} started before sibling {} completed",
                        pair[1], pair[0]
                    ));
                }
            }
        }
    }
    violations
}
