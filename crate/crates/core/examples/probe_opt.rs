use gridse_core::isga::{benchmarks::benchmark, run, OptimizerConfig, Variant};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

fn main() {
    let mut total_ok = 0;
    for id in 1..=23usize {
        let b = benchmark(id, 30).unwrap();
        let mut fi_all = Vec::new();
        let mut fs_all = Vec::new();
        let mut wins = 0;
        for seed in 0..10u64 {
            let ci = OptimizerConfig::new(Variant::Isga, b.bounds.clone(), seed);
            let cs = OptimizerConfig::new(Variant::Sga, b.bounds.clone(), seed);
            let fi = run(|x| b.eval(x), &ci).unwrap().best_fitness;
            let fs = run(|x| b.eval(x), &cs).unwrap().best_fitness;
            if fi <= fs { wins += 1; }
            fi_all.push(fi);
            fs_all.push(fs);
        }
        let mi = median(fi_all);
        let ms = median(fs_all);
        let ok = mi <= ms;
        if ok { total_ok += 1; }
        println!("F{id:2}: isga={mi:.4e} sga={ms:.4e} wins={wins}/10 ok={ok}");
    }
    println!("functions with isga<=sga median: {total_ok}/23");

    // PSO on F12 for the three-way ordering.
    let b = benchmark(12, 30).unwrap();
    let finals: Vec<f64> = (0..10u64)
        .map(|seed| {
            let cfg = OptimizerConfig::new(Variant::Pso, b.bounds.clone(), seed);
            run(|x| b.eval(x), &cfg).unwrap().best_fitness
        })
        .collect();
    println!("F12 PSO median={:.4e}", median(finals));
}
