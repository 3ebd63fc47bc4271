//! Mean Mallows discrepancy of every sampler at d=10 over a few trials.

use shapley_qmc::harness::{run_discrepancy_table, write_report, ExperimentConfig};
use shapley_qmc::{Algorithm, Method, Result};

pub fn run_example() -> Result<()> {
    let methods = Algorithm::ALL.into_iter().map(Method::from).collect();
    let mut cfg = ExperimentConfig::new(methods, vec![10], vec![20, 100]);
    cfg.trials = 3;
    cfg.record_timing = false;
    let rows = run_discrepancy_table(&cfg)?;
    for r in &rows {
        println!(
            "n={:<4} {:<12} {:.4} ± {:.4}",
            r.n, r.algorithm, r.disc_mean, r.disc_std
        );
    }
    write_report(std::io::sink(), &cfg, &rows)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
