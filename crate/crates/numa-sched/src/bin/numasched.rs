use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;

use numa_sched::config::{OutputFormat, PlacementMode};
use numa_sched::policy::PolicyKind;
use numa_sched::taskgen::{dump_text, gen_graph, graph_stats};
use numa_sched::{emit_summary, load_config, load_topology, run_experiment};

/// NUMA-aware scheduling experiments: sweep schedulers, placements and
/// team sizes over generated task graphs.
#[derive(Parser, Debug)]
#[command(name = "numasched", version)]
struct Args {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,

    /// Run only this scheduler (bf|wf|dfwspt|dfwsrpt), overriding the sweep.
    #[arg(long)]
    scheduler: Option<PolicyKind>,

    /// Run only this placement (numa|naive), overriding the sweep.
    #[arg(long)]
    placement: Option<PlacementMode>,

    /// Run only this team size, overriding the sweep.
    #[arg(long)]
    threads: Option<usize>,

    /// Override the experiment seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override repetitions per cell (best of N is reported).
    #[arg(long)]
    reps: Option<usize>,

    /// Execute on real threads instead of the simulator.
    /// Makespans become wall-clock microseconds.
    #[arg(long)]
    native: bool,

    /// Pin native workers to their placement cores (Linux, best effort).
    #[arg(long, requires = "native")]
    pin: bool,

    /// Write the summary here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Summary format.
    #[arg(long)]
    format: Option<OutputFormat>,

    /// Print the generated task graph and exit.
    #[arg(long)]
    dump_graph: bool,
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let mut cfg = load_config(&args.config)?;

    if let Some(s) = args.scheduler {
        cfg.policies = vec![s];
    }
    if let Some(p) = args.placement {
        cfg.placements = vec![p];
    }
    if let Some(n) = args.threads {
        cfg.team_sizes = vec![n];
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = args.reps {
        anyhow::ensure!(reps >= 1, "--reps must be >= 1");
        cfg.repetitions = reps;
    }
    cfg.native = args.native;
    cfg.pin = args.pin;
    if let Some(out) = args.out {
        cfg.out = Some(out);
    }
    if let Some(format) = args.format {
        cfg.format = format;
    }

    if args.dump_graph {
        let g = gen_graph(&cfg.benchmark)?;
        let s = graph_stats(&g);
        println!("{}", dump_text(&g));
        eprintln!("{} tasks, depth {}, {} data pages", s.tasks, s.depth, s.total_pages);
        return Ok(());
    }

    let topo_text = std::fs::read_to_string(&cfg.topology_path)
        .with_context(|| format!("reading topology {}", cfg.topology_path.display()))?;
    let topo = load_topology(&topo_text)
        .with_context(|| format!("parsing topology {}", cfg.topology_path.display()))?;

    let results = run_experiment(&cfg, &topo)?;
    for err in &results.errors {
        eprintln!("cell failed: {err}");
    }

    let summary = emit_summary(&results, cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, &summary)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{summary}"),
    }

    if results.rows.is_empty() {
        anyhow::bail!("no cell completed");
    }
    Ok(())
}
