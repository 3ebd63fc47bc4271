//! Permutations, the three kernels and their closed-form expectations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shapley_qmc::perm::random_permutation;
use shapley_qmc::{expected_kernel_uniform, kernel_matrix, Dimension, KernelSpec, Permutation, Result};

pub fn run_example() -> Result<()> {
    let d = Dimension::new(6)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = random_permutation(d, &mut rng);
    let q = p.reverse();
    println!("p = {p}, reversed = {q}, inverse = {}", p.inverse());
    println!("discordant pairs: {}", shapley_qmc::perm::n_discordant(&p, &q)?);

    let identity = Permutation::identity(6)?;
    for spec in [KernelSpec::kendall(), KernelSpec::mallows(4.0), KernelSpec::spearman()] {
        println!(
            "{:<24} K(id, p) = {:+.4}  E[K] = {:.6}",
            spec.to_string(),
            spec.eval(&identity, &p)?,
            expected_kernel_uniform(&spec, d)?
        );
    }

    let samples: Vec<Permutation> = (0..4).map(|_| random_permutation(d, &mut rng)).collect();
    let k = kernel_matrix(&samples, &KernelSpec::mallows(4.0))?;
    println!(
        "4x4 Mallows Gram matrix diagonal: {:?}",
        (0..4).map(|i| k.get(i, i)).collect::<Vec<_>>()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
