//! Deterministic fork-join task-graph generators shaped like the BOTS
//! benchmarks: deep compute-only recursions (fib, nqueens), recursive
//! divide-and-conquer over large shared arrays (sort, fft), blocked matrix
//! recursion (strassen) and phased factorization (sparselu).
//!
//! Only the scheduling shape matters here: compute costs are abstract
//! units and data accesses are page ranges, not real kernels.

use std::fmt::Write as _;
use std::ops::Range;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;

pub type TaskId = usize;
pub type RegionId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessKind {
    Read,
    Write,
}

/// One page-range access of a task against a data region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Access {
    pub region: RegionId,
    pub pages: Range<u64>,
    pub kind: AccessKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskNode {
    pub id: TaskId,
    pub parent: Option<TaskId>,
    pub children: Vec<TaskId>,
    pub compute_cost: u64,
    pub accesses: Vec<Access>,
    /// Taskwait: the task only completes once all children have.
    pub sync_after_children: bool,
    /// When set, children run one after another (each child's subtree
    /// completes before the next child is spawned). Used for phased
    /// benchmarks like sparselu.
    pub serial_children: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataRegion {
    pub id: RegionId,
    pub size_pages: u64,
    /// First touched during the master's serial initialization.
    pub initialized_by_master: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskGraph {
    pub tasks: Vec<TaskNode>,
    pub root: TaskId,
    pub regions: Vec<DataRegion>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Fib,
    Nqueens,
    Sort,
    Fft,
    Strassen,
    Sparselu,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Fib => "fib",
            Benchmark::Nqueens => "nqueens",
            Benchmark::Sort => "sort",
            Benchmark::Fft => "fft",
            Benchmark::Strassen => "strassen",
            Benchmark::Sparselu => "sparselu",
        }
    }

    pub fn data_intensive(self) -> bool {
        matches!(self, Benchmark::Sort | Benchmark::Fft | Benchmark::Strassen | Benchmark::Sparselu)
    }
}

impl FromStr for Benchmark {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fib" => Ok(Benchmark::Fib),
            "nqueens" => Ok(Benchmark::Nqueens),
            "sort" => Ok(Benchmark::Sort),
            "fft" => Ok(Benchmark::Fft),
            "strassen" => Ok(Benchmark::Strassen),
            "sparselu" => Ok(Benchmark::Sparselu),
            other => Err(GraphError::UnknownBenchmark(other.to_string())),
        }
    }
}

/// Benchmark name plus scale parameters. `n` is the benchmark's main size
/// (fib argument, array length, matrix dimension, block count); `cutoff`
/// is the recursion leaf size where it applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    pub benchmark: Benchmark,
    pub n: u64,
    pub cutoff: u64,
    pub seed: u64,
    /// Max seeded per-task cost jitter (0 = constant costs).
    pub jitter: u64,
}

impl GraphSpec {
    /// Desk-scale defaults: 10^4..10^6 tasks, 10^3..10^5 pages.
    pub fn desk_scale(benchmark: Benchmark, seed: u64) -> Self {
        let (n, cutoff) = match benchmark {
            Benchmark::Fib => (20, 2),
            Benchmark::Nqueens => (9, 3),
            Benchmark::Sort => (1 << 17, 16),
            Benchmark::Fft => (1 << 17, 16),
            Benchmark::Strassen => (1024, 32),
            Benchmark::Sparselu => (24, 4),
        };
        GraphSpec { benchmark, n, cutoff, seed, jitter: 0 }
    }
}

/// Points/elements per simulator page for the array benchmarks.
const ELEMS_PER_PAGE: u64 = 16;
/// Matrix elements per page for strassen.
const MAT_ELEMS_PER_PAGE: u64 = 256;

struct Builder {
    tasks: Vec<TaskNode>,
    regions: Vec<DataRegion>,
    rng: ChaCha8Rng,
    jitter: u64,
}

impl Builder {
    fn new(seed: u64, jitter: u64) -> Self {
        Builder { tasks: Vec::new(), regions: Vec::new(), rng: ChaCha8Rng::seed_from_u64(seed), jitter }
    }

    fn region(&mut self, size_pages: u64, initialized_by_master: bool) -> RegionId {
        let id = self.regions.len();
        self.regions.push(DataRegion { id, size_pages, initialized_by_master });
        id
    }

    fn task(&mut self, parent: Option<TaskId>, cost: u64, accesses: Vec<Access>) -> TaskId {
        let id = self.tasks.len();
        let jitter = if self.jitter > 0 { self.rng.random_range(0..=self.jitter) } else { 0 };
        self.tasks.push(TaskNode {
            id,
            parent,
            children: Vec::new(),
            compute_cost: cost + jitter,
            accesses,
            sync_after_children: false,
            serial_children: false,
        });
        if let Some(p) = parent {
            self.tasks[p].children.push(id);
            self.tasks[p].sync_after_children = true;
        }
        id
    }

    fn finish(self, root: TaskId) -> TaskGraph {
        TaskGraph { tasks: self.tasks, root, regions: self.regions }
    }
}

fn positive(name: &'static str, v: u64) -> Result<u64, GraphError> {
    if v == 0 {
        Err(GraphError::BadScale { name, value: 0 })
    } else {
        Ok(v)
    }
}

/// Generates the task graph for a benchmark spec. Pure function of the
/// spec: identical inputs give identical graphs.
pub fn gen_graph(spec: &GraphSpec) -> Result<TaskGraph, GraphError> {
    let n = positive("n", spec.n)?;
    let cutoff = positive("cutoff", spec.cutoff)?;
    let mut b = Builder::new(spec.seed, spec.jitter);
    let root = match spec.benchmark {
        Benchmark::Fib => gen_fib(&mut b, None, n),
        Benchmark::Nqueens => gen_nqueens(&mut b, n as usize),
        Benchmark::Sort | Benchmark::Fft => gen_array_recursion(&mut b, n, cutoff),
        Benchmark::Strassen => gen_strassen(&mut b, n, cutoff)?,
        Benchmark::Sparselu => gen_sparselu(&mut b, n, cutoff),
    };
    Ok(b.finish(root))
}

/// fib(n): binary call tree, base cases n < 2, no data regions.
fn gen_fib(b: &mut Builder, parent: Option<TaskId>, n: u64) -> TaskId {
    let id = b.task(parent, 10, Vec::new());
    if n >= 2 {
        gen_fib(b, Some(id), n - 1);
        gen_fib(b, Some(id), n - 2);
    }
    id
}

/// nqueens(n): one task per safe partial placement, pruned by the usual
/// column/diagonal conflict test. Negligible data.
fn gen_nqueens(b: &mut Builder, n: usize) -> TaskId {
    fn safe(cols: &[usize], col: usize) -> bool {
        let row = cols.len();
        cols.iter().enumerate().all(|(r, &c)| {
            c != col && (row - r) != col.abs_diff(c)
        })
    }
    fn rec(b: &mut Builder, parent: Option<TaskId>, n: usize, cols: &mut Vec<usize>) -> TaskId {
        let id = b.task(parent, 10, Vec::new());
        if cols.len() < n {
            for col in 0..n {
                if safe(cols, col) {
                    cols.push(col);
                    rec(b, Some(id), n, cols);
                    cols.pop();
                }
            }
        }
        id
    }
    rec(b, None, n, &mut Vec::new())
}

/// Shared shape of sort and fft: binary recursion over a large array.
/// Leaves read the master-initialized input and write their slice of a
/// scratch region (homed by first touch). A combine phase ordered after
/// both halves re-reads the scratch slice; like the BOTS sort it is
/// itself a parallel recursion over chunks, so where the leaves ran
/// decides what the combine chunks pay.
fn gen_array_recursion(b: &mut Builder, n: u64, cutoff: u64) -> TaskId {
    let pages = n.div_ceil(ELEMS_PER_PAGE);
    let input = b.region(pages, true);
    let scratch = b.region(pages, false);
    fn page_span(lo: u64, len: u64, total: u64) -> Range<u64> {
        let start = lo / ELEMS_PER_PAGE;
        let end = ((lo + len).div_ceil(ELEMS_PER_PAGE)).min(total);
        start..end.max(start + 1)
    }
    fn merge_rec(
        b: &mut Builder,
        parent: Option<TaskId>,
        regions: (RegionId, RegionId),
        lo: u64,
        len: u64,
        chunk: u64,
        total: u64,
    ) -> TaskId {
        let (input, scratch) = regions;
        if len <= chunk {
            let span = page_span(lo, len, total);
            let acc = vec![
                Access { region: input, pages: span.clone(), kind: AccessKind::Read },
                Access { region: scratch, pages: span.clone(), kind: AccessKind::Read },
                Access { region: scratch, pages: span, kind: AccessKind::Write },
            ];
            b.task(parent, len / 16 + 1, acc)
        } else {
            let id = b.task(parent, 1, Vec::new());
            let half = len / 2;
            merge_rec(b, Some(id), regions, lo, half, chunk, total);
            merge_rec(b, Some(id), regions, lo + half, len - half, chunk, total);
            id
        }
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        b: &mut Builder,
        parent: Option<TaskId>,
        input: RegionId,
        scratch: RegionId,
        lo: u64,
        len: u64,
        cutoff: u64,
        total: u64,
    ) -> TaskId {
        if len <= cutoff {
            // leaf kernel: read its input slice, write its scratch slice
            let span = page_span(lo, len, total);
            let acc = vec![
                Access { region: input, pages: span.clone(), kind: AccessKind::Read },
                Access { region: scratch, pages: span, kind: AccessKind::Write },
            ];
            b.task(parent, len / 4 + 1, acc)
        } else {
            // two halves in parallel, then the combine wave over the slice
            let id = b.task(parent, 1, Vec::new());
            b.tasks[id].serial_children = true;
            let fork = b.task(Some(id), 1, Vec::new());
            let half = len / 2;
            rec(b, Some(fork), input, scratch, lo, half, cutoff, total);
            rec(b, Some(fork), input, scratch, lo + half, len - half, cutoff, total);
            merge_rec(b, Some(id), (input, scratch), lo, len, 4 * cutoff, total);
            id
        }
    }
    rec(b, None, input, scratch, 0, n, cutoff, pages)
}

/// strassen(n, cutoff): 7-way recursion on an n x n matrix until blocks
/// reach the cutoff; three regions model A, B and the output C.
fn gen_strassen(b: &mut Builder, n: u64, cutoff: u64) -> Result<TaskId, GraphError> {
    if !n.is_power_of_two() || !cutoff.is_power_of_two() || cutoff > n {
        return Err(GraphError::Malformed(format!(
            "strassen needs power-of-two n >= cutoff (got n={n}, cutoff={cutoff})"
        )));
    }
    let mat_pages = (n * n).div_ceil(MAT_ELEMS_PER_PAGE);
    let a = b.region(mat_pages, true);
    let bb = b.region(mat_pages, true);
    let c = b.region(mat_pages, true);

    fn rec(
        b: &mut Builder,
        parent: Option<TaskId>,
        regions: (RegionId, RegionId, RegionId),
        off: u64,
        size: u64,
        cutoff: u64,
        mat_pages: u64,
    ) -> TaskId {
        let block_pages = ((size * size).div_ceil(MAT_ELEMS_PER_PAGE)).max(1);
        let start = off % mat_pages;
        let end = (start + block_pages).min(mat_pages);
        let span = start..end.max(start + 1).min(mat_pages).max(start + 1);
        if size <= cutoff {
            let acc = vec![
                Access { region: regions.0, pages: span.clone(), kind: AccessKind::Read },
                Access { region: regions.1, pages: span.clone(), kind: AccessKind::Read },
                Access { region: regions.2, pages: span, kind: AccessKind::Write },
            ];
            b.task(parent, size * size / 64 + 1, acc)
        } else {
            let id = b.task(parent, 10, Vec::new());
            let sub = ((size / 2) * (size / 2)).div_ceil(MAT_ELEMS_PER_PAGE).max(1);
            for m in 0..7u64 {
                rec(b, Some(id), regions, off + m * sub, size / 2, cutoff, mat_pages);
            }
            id
        }
    }
    Ok(rec(b, None, (a, bb, c), 0, n, cutoff, mat_pages))
}

/// sparselu(blocks, pages_per_block): for each pivot k, a serial chain of
/// lu0, then the fwd/bdiv wave, then the bmod wave (the B^3 term).
fn gen_sparselu(b: &mut Builder, blocks: u64, pages_per_block: u64) -> TaskId {
    let region = b.region(blocks * blocks * pages_per_block, true);
    let block = |i: u64, j: u64| -> Range<u64> {
        let start = (i * blocks + j) * pages_per_block;
        start..start + pages_per_block
    };
    let root = b.task(None, 1, Vec::new());
    b.tasks[root].serial_children = true;
    for k in 0..blocks {
        let diag = block(k, k);
        b.task(
            Some(root),
            pages_per_block * 4,
            vec![Access { region, pages: diag.clone(), kind: AccessKind::Write }],
        );
        if k + 1 == blocks {
            continue;
        }
        let fb = b.task(Some(root), 1, Vec::new());
        for j in k + 1..blocks {
            b.task(
                Some(fb),
                pages_per_block * 4,
                vec![
                    Access { region, pages: diag.clone(), kind: AccessKind::Read },
                    Access { region, pages: block(k, j), kind: AccessKind::Write },
                ],
            );
            b.task(
                Some(fb),
                pages_per_block * 4,
                vec![
                    Access { region, pages: diag.clone(), kind: AccessKind::Read },
                    Access { region, pages: block(j, k), kind: AccessKind::Write },
                ],
            );
        }
        let bmod = b.task(Some(root), 1, Vec::new());
        for i in k + 1..blocks {
            for j in k + 1..blocks {
                b.task(
                    Some(bmod),
                    pages_per_block * 6,
                    vec![
                        Access { region, pages: block(i, k), kind: AccessKind::Read },
                        Access { region, pages: block(k, j), kind: AccessKind::Read },
                        Access { region, pages: block(i, j), kind: AccessKind::Write },
                    ],
                );
            }
        }
    }
    root
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub tasks: u64,
    pub edges: u64,
    pub regions: u64,
    pub total_pages: u64,
    /// Longest root-to-leaf path, counted in tasks (single task = 1).
    pub depth: u64,
}

pub fn graph_stats(g: &TaskGraph) -> GraphStats {
    fn depth_of(g: &TaskGraph, id: TaskId) -> u64 {
        1 + g.tasks[id].children.iter().map(|&c| depth_of(g, c)).max().unwrap_or(0)
    }
    GraphStats {
        tasks: g.tasks.len() as u64,
        edges: (g.tasks.len() - 1) as u64,
        regions: g.regions.len() as u64,
        total_pages: g.regions.iter().map(|r| r.size_pages).sum(),
        depth: depth_of(g, g.root),
    }
}

/// Total page touches across all tasks (used to separate data-intensive
/// shapes from compute-only ones).
pub fn total_page_accesses(g: &TaskGraph) -> u64 {
    g.tasks
        .iter()
        .flat_map(|t| t.accesses.iter())
        .map(|a| a.pages.end - a.pages.start)
        .sum()
}

/// Structural validation: single root, consistent parent/child links,
/// acyclic reachability, page ranges inside their regions.
pub fn validate(g: &TaskGraph) -> Result<(), GraphError> {
    if g.root >= g.tasks.len() {
        return Err(GraphError::Malformed("root id out of range".into()));
    }
    if g.tasks[g.root].parent.is_some() {
        return Err(GraphError::Malformed("root has a parent".into()));
    }
    let mut seen = vec![false; g.tasks.len()];
    let mut stack = vec![g.root];
    while let Some(id) = stack.pop() {
        if seen[id] {
            return Err(GraphError::Malformed(format!("task {id} reachable twice")));
        }
        seen[id] = true;
        for &c in &g.tasks[id].children {
            if g.tasks[c].parent != Some(id) {
                return Err(GraphError::Malformed(format!("task {c} parent link broken")));
            }
            stack.push(c);
        }
    }
    if let Some(unreach) = seen.iter().position(|s| !s) {
        return Err(GraphError::Malformed(format!("task {unreach} unreachable from root")));
    }
    for t in &g.tasks {
        for a in &t.accesses {
            let region = g
                .regions
                .get(a.region)
                .ok_or_else(|| GraphError::Malformed(format!("task {} unknown region {}", t.id, a.region)))?;
            if a.pages.start >= a.pages.end || a.pages.end > region.size_pages {
                return Err(GraphError::Malformed(format!(
                    "task {} access {}..{} outside region {} of {} pages",
                    t.id, a.pages.start, a.pages.end, a.region, region.size_pages
                )));
            }
        }
    }
    Ok(())
}

/// Line-oriented debug dump of a graph.
pub fn dump_text(g: &TaskGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph tasks {} root {} regions {}", g.tasks.len(), g.root, g.regions.len());
    for r in &g.regions {
        let _ = writeln!(out, "region {} pages {} master_init {}", r.id, r.size_pages, r.initialized_by_master as u8);
    }
    for t in &g.tasks {
        let parent = t.parent.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
        let children: Vec<String> = t.children.iter().map(|c| c.to_string()).collect();
        let accesses: Vec<String> = t
            .accesses
            .iter()
            .map(|a| {
                let k = if a.kind == AccessKind::Read { 'r' } else { 'w' };
                format!("{}:{}-{}:{}", a.region, a.pages.start, a.pages.end, k)
            })
            .collect();
        let _ = writeln!(
            out,
            "task {} parent {} cost {} sync {} serial {} children [{}] access [{}]",
            t.id,
            parent,
            t.compute_cost,
            t.sync_after_children as u8,
            t.serial_children as u8,
            children.join(","),
            accesses.join(",")
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(benchmark: Benchmark, n: u64, cutoff: u64) -> GraphSpec {
        GraphSpec { benchmark, n, cutoff, seed: 1, jitter: 0 }
    }

    /// Independent oracle: count of calls in the fib call tree.
    fn fib_calls(n: u64) -> u64 {
        if n < 2 {
            1
        } else {
            1 + fib_calls(n - 1) + fib_calls(n - 2)
        }
    }

    #[test]
    fn fib5_matches_call_tree_oracle() {
        let g = gen_graph(&spec(Benchmark::Fib, 5, 2)).unwrap();
        validate(&g).unwrap();
        let s = graph_stats(&g);
        assert_eq!(fib_calls(5), 15);
        assert_eq!(s.tasks, 15);
        assert_eq!(s.depth, 5);
        assert_eq!(s.regions, 0);
        assert_eq!(total_page_accesses(&g), 0);
    }

    #[test]
    fn fib_counts_more_sizes() {
        for n in [1, 3, 10, 16] {
            let g = gen_graph(&spec(Benchmark::Fib, n, 2)).unwrap();
            assert_eq!(g.tasks.len() as u64, fib_calls(n), "fib({n})");
        }
    }

    #[test]
    fn sort_single_leaf_degenerates() {
        let g = gen_graph(&spec(Benchmark::Sort, 8, 16)).unwrap();
        validate(&g).unwrap();
        assert_eq!(g.tasks.len(), 1);
        assert_eq!(g.regions.len(), 2);
        assert!(!g.tasks[0].sync_after_children);
        assert_eq!(graph_stats(&g).depth, 1);
    }

    #[test]
    fn fft_matches_recursion_count_oracle() {
        // Independent count of the binary split recursion: each inner
        // slice contributes itself, a fork task, and a combine subtree
        // over 4*cutoff-element chunks.
        fn merges(len: u64, chunk: u64) -> u64 {
            if len <= chunk {
                1
            } else {
                1 + merges(len / 2, chunk) + merges(len - len / 2, chunk)
            }
        }
        fn count(len: u64, cutoff: u64) -> u64 {
            if len <= cutoff {
                1
            } else {
                2 + count(len / 2, cutoff) + count(len - len / 2, cutoff)
                    + merges(len, 4 * cutoff)
            }
        }
        let g = gen_graph(&spec(Benchmark::Fft, 1 << 14, 1 << 6)).unwrap();
        validate(&g).unwrap();
        let s = graph_stats(&g);
        assert_eq!(s.tasks, count(1 << 14, 1 << 6));
        // input + scratch regions of equal size
        assert_eq!(s.total_pages, 2 * (1u64 << 14) / ELEMS_PER_PAGE);
    }

    #[test]
    fn nqueens_matches_independent_recursion() {
        fn count(n: usize, cols: &mut Vec<usize>) -> u64 {
            let mut total = 1;
            if cols.len() < n {
                for col in 0..n {
                    let row = cols.len();
                    if cols.iter().enumerate().all(|(r, &c)| c != col && (row - r) != col.abs_diff(c)) {
                        cols.push(col);
                        total += count(n, cols);
                        cols.pop();
                    }
                }
            }
            total
        }
        let g = gen_graph(&spec(Benchmark::Nqueens, 6, 1)).unwrap();
        validate(&g).unwrap();
        assert_eq!(g.tasks.len() as u64, count(6, &mut Vec::new()));
    }

    #[test]
    fn sparselu_block_cubed_dominates() {
        // Oracle: walk the generator's loop nest independently.
        fn count(blocks: u64) -> u64 {
            let mut total = 1; // root
            for k in 0..blocks {
                total += 1; // lu0
                if k + 1 == blocks {
                    continue;
                }
                let rem = blocks - k - 1;
                total += 2 + 2 * rem + rem * rem; // stage tasks + fwd/bdiv + bmod
            }
            total
        }
        for blocks in [2u64, 4, 8, 12] {
            let g = gen_graph(&spec(Benchmark::Sparselu, blocks, 4)).unwrap();
            validate(&g).unwrap();
            assert_eq!(g.tasks.len() as u64, count(blocks), "blocks={blocks}");
        }
        // cubic growth
        let t16 = gen_graph(&spec(Benchmark::Sparselu, 16, 4)).unwrap().tasks.len() as f64;
        let t8 = gen_graph(&spec(Benchmark::Sparselu, 8, 4)).unwrap().tasks.len() as f64;
        assert!(t16 / t8 > 5.0, "expected near-cubic growth, got {}", t16 / t8);
    }

    #[test]
    fn strassen_seven_way_counts() {
        let g = gen_graph(&spec(Benchmark::Strassen, 256, 64)).unwrap();
        validate(&g).unwrap();
        // depth-2 recursion: 1 + 7 + 49 leaves
        assert_eq!(g.tasks.len(), 57);
        assert_eq!(g.regions.len(), 3);
    }

    #[test]
    fn generation_is_pure() {
        for bench in [Benchmark::Fib, Benchmark::Sort, Benchmark::Sparselu] {
            let mut s = GraphSpec::desk_scale(bench, 3);
            s.jitter = 5;
            assert_eq!(gen_graph(&s).unwrap(), gen_graph(&s).unwrap());
        }
    }

    #[test]
    fn data_intensity_separates_benchmark_classes() {
        let mut per_task = std::collections::HashMap::new();
        for bench in [
            Benchmark::Fib,
            Benchmark::Nqueens,
            Benchmark::Sort,
            Benchmark::Fft,
            Benchmark::Strassen,
            Benchmark::Sparselu,
        ] {
            let g = gen_graph(&GraphSpec::desk_scale(bench, 1)).unwrap();
            per_task.insert(bench, total_page_accesses(&g) as f64 / g.tasks.len() as f64);
        }
        for light in [Benchmark::Fib, Benchmark::Nqueens] {
            assert_eq!(per_task[&light], 0.0);
        }
        for heavy in [Benchmark::Sort, Benchmark::Fft, Benchmark::Strassen, Benchmark::Sparselu] {
            assert!(per_task[&heavy] >= 1.0, "{:?}: {}", heavy, per_task[&heavy]);
        }
    }

    #[test]
    fn desk_scale_sizes_in_range() {
        for bench in [Benchmark::Fib, Benchmark::Sort, Benchmark::Fft, Benchmark::Strassen, Benchmark::Sparselu] {
            let g = gen_graph(&GraphSpec::desk_scale(bench, 0)).unwrap();
            let s = graph_stats(&g);
            assert!(s.tasks >= 4_000 && s.tasks <= 1_000_000, "{:?}: {} tasks", bench, s.tasks);
            if bench.data_intensive() {
                assert!(s.total_pages >= 1_000 && s.total_pages <= 100_000, "{:?}: {} pages", bench, s.total_pages);
            }
        }
    }

    #[test]
    fn errors_on_bad_specs() {
        assert!(matches!(
            gen_graph(&spec(Benchmark::Fib, 0, 2)),
            Err(GraphError::BadScale { name: "n", .. })
        ));
        assert!("mergesort".parse::<Benchmark>().is_err());
        assert!(gen_graph(&spec(Benchmark::Strassen, 100, 32)).is_err());
    }

    #[test]
    fn dump_round_describes_graph() {
        let g = gen_graph(&spec(Benchmark::Sort, 64, 16)).unwrap();
        let dump = dump_text(&g);
        assert!(dump.starts_with(&format!("graph tasks {} root {} regions 2", g.tasks.len(), g.root)));
        assert_eq!(dump.lines().count(), 1 + 2 + g.tasks.len());
    }
}
