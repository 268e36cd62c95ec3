use numa_sched::config::PlacementMode;
use numa_sched::policy::PolicyKind;
use numa_sched::priority::{build_placement, compute_priorities, naive_placement, WeightVector};
use numa_sched::sim::{serial_cost, simulate, LatencyModel};
use numa_sched::taskgen::{gen_graph, Benchmark, GraphSpec};
use numa_sched::topology::load_topology;

fn main() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/x4600_like.topo"
    ))
    .unwrap();
    let t = load_topology(&text).unwrap();
    let lm = LatencyModel::default();
    let g = gen_graph(&GraphSpec::desk_scale(Benchmark::Fft, 1)).unwrap();
    let pt = compute_priorities(&t, &WeightVector::default_for(&t)).unwrap();
    println!("serial {}", serial_cost(&g, &lm));
    for (kind, placement) in [
        (PolicyKind::WorkFirst, PlacementMode::NumaAware),
        (PolicyKind::WorkFirst, PlacementMode::NaiveFirstCore),
        (PolicyKind::Dfwspt, PlacementMode::NumaAware),
        (PolicyKind::Dfwsrpt, PlacementMode::NumaAware),
    ] {
        let mut mk = vec![];
        let mut rl = vec![];
        let mut idle = vec![];
        let mut stealt = vec![];
        let mut steals = vec![];
        let mut shops = vec![];
        for seed in 0..10u64 {
            let plan = match placement {
                PlacementMode::NumaAware => build_placement(&t, &pt, 16, seed).unwrap(),
                PlacementMode::NaiveFirstCore => naive_placement(&t, 16, seed).unwrap(),
            };
            let r = simulate(&g, &t, &plan, kind, &lm, seed).unwrap();
            mk.push(r.makespan);
            rl.push(r.remote_latency);
            idle.push(r.threads.iter().map(|x| x.idle).sum::<f64>());
            stealt.push(r.threads.iter().map(|x| x.steal_time).sum::<f64>());
            steals.push(r.total_steals());
            shops.push(r.mean_steal_hops());
        }
        let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!(
            "{:8} {:6} makespan {:9.0} (min {:9.0} max {:9.0}) remote {:9.0} idle {:9.0} stealT {:8.0} steals {:6.1} hops {:.3}",
            kind.name(),
            placement.name(),
            avg(&mk),
            mk.iter().cloned().fold(f64::INFINITY, f64::min),
            mk.iter().cloned().fold(0.0, f64::max),
            avg(&rl),
            avg(&idle),
            avg(&stealt),
            steals.iter().sum::<u64>() as f64 / 10.0,
            avg(&shops),
        );
    }
}
