//! Convergence of MSE with budget, and a pool-size sweep for herding.

use shapley_qmc::harness::{run_convergence, run_sweep, ExperimentConfig, Sweep};
use shapley_qmc::{GameSpec, Method, Result};

pub fn run_example() -> Result<()> {
    let mut cfg = ExperimentConfig::new(
        vec![Method::MonteCarlo, Method::Antithetic, Method::Orthogonal],
        vec![],
        vec![8, 32, 128],
    );
    cfg.trials = 5;
    cfg.game = Some(GameSpec::RandomInteraction {
        d: 8,
        counts: vec![8, 8, 8, 4],
        seed: 3,
    });
    let (rows, reference) = run_convergence(&cfg)?;
    println!("reference has {} values", reference.values().len());
    for r in &rows {
        println!(
            "{:<12} n={:<4} mse = {:.3e} ± {:.1e}",
            r.algorithm, r.n, r.mse_mean, r.mse_ci95
        );
    }

    let mut sweep = ExperimentConfig::new(vec![Method::Herding], vec![8], vec![30]);
    sweep.trials = 3;
    sweep.sweep = Some(Sweep::PoolSize(vec![5, 25]));
    for r in run_sweep(&sweep)? {
        println!("pool {:<3} D = {:.4}", r.value, r.disc_mean);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
