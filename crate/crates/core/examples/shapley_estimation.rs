//! Estimating Shapley values of built-in games with every method.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shapley_qmc::estimators::{exact_shapley_subsets, mse};
use shapley_qmc::games::{glove_game, InteractionGame};
use shapley_qmc::{estimate, Dimension, EstimateOptions, Method, Result};

pub fn run_example() -> Result<()> {
    let exact = exact_shapley_subsets(&mut glove_game())?;
    println!("glove exact: {:?}", exact.values);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let game = InteractionGame::random(Dimension::new(8)?, &[8, 8, 8, 4], &mut rng)?;
    let reference = exact_shapley_subsets(&mut game.clone().into_game())?.values;
    let opts = EstimateOptions::default();
    for method in [
        Method::MonteCarlo,
        Method::Antithetic,
        Method::Orthogonal,
        Method::Sobol,
        Method::Herding,
        Method::Owen,
        Method::Stratified,
    ] {
        let est = estimate(&mut game.clone().into_game(), method, 64, 0, &opts)?;
        println!(
            "{:<16} mse = {:.3e}  marginals = {}",
            method.name(),
            mse(std::slice::from_ref(&reference), &[est.values])?,
            est.marginal_evals
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
