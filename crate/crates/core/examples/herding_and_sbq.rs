//! Kernel herding and Bayesian quadrature against plain Monte Carlo.

use shapley_qmc::{discrepancy, sample, Algorithm, Dimension, KernelSpec, Result, SamplerConfig};

pub fn run_example() -> Result<()> {
    let d = Dimension::new(8)?;
    let kernel = KernelSpec::mallows(4.0);
    for alg in [Algorithm::MonteCarlo, Algorithm::Herding, Algorithm::Sbq] {
        let cfg = SamplerConfig::new(alg, 40, d)
            .with_seed(3)
            .with_kernel(kernel)
            .with_pool_size(25);
        let set = sample(&cfg)?;
        println!(
            "{:<12} D = {:.4}  weight sum = {:.3}  kernel evals = {}",
            alg.name(),
            discrepancy(&set, &kernel)?,
            set.weight_sum(),
            set.meta.kernel_evals
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
