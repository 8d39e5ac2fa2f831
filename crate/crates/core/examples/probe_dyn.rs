use gridse_core::isga::{benchmarks::benchmark, run, OptimizerConfig, Variant};
use nalgebra::DVector;

fn main() {
    let b = benchmark(1, 30).unwrap();
    let mut cfg = OptimizerConfig::new(Variant::Isga, b.bounds.clone(), 0);
    cfg.max_iters = 500;
    let res = run(|x: &DVector<f64>| b.eval(x), &cfg).unwrap();
    for (t, v) in res.curve.iter().enumerate() {
        if (t + 1) % 25 == 0 || t < 6 {
            println!("iter {:3} best {:.6e}", t + 1, v);
        }
    }
}
