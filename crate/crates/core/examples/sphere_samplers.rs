//! From points on the sphere to permutations: Monte Carlo, orthogonal codes and Sobol.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shapley_qmc::sphere::{
    polar_to_cartesian, sphere_to_permutation, uniform_sphere_point, ProjectionMatrix, SobolState, SphericalInverseCdf,
};
use shapley_qmc::{sample, Algorithm, Dimension, Result, SamplerConfig};

pub fn run_example() -> Result<()> {
    let d = 6;
    let u = ProjectionMatrix::new(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let x = uniform_sphere_point(Dimension::new(d)?, &mut rng)?;
    println!("random sphere point -> {}", sphere_to_permutation(&x, &u)?);

    // Sobol points in [0,1)^{d-2} become polar angles, then Cartesian points.
    let inv = SphericalInverseCdf::new(d)?;
    let mut sobol = SobolState::random_shift(d - 2, &mut rng)?;
    for _ in 0..3 {
        let angles = inv.angles(&sobol.next_point()?)?;
        println!(
            "sobol point -> {}",
            sphere_to_permutation(&polar_to_cartesian(&angles), &u)?
        );
    }

    // Orthogonal codes come in antipodal pairs: the second is the reverse of the first.
    let set = sample(&SamplerConfig::new(Algorithm::Orthogonal, 4, Dimension::new(d)?).with_seed(2))?;
    for pair in set.samples().chunks(2) {
        println!("{} <-> {}", pair[0], pair[1]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
