//! Explaining a model that lives in another process.
//!
//! The predictor reads `{"rows": [[...], ...]}` lines on stdin and answers
//! each with `{"preds": [...]}`. Here it is a few lines of Python.

use std::io::Write;

use shapley_qmc::estimators::exact_shapley_subsets;
use shapley_qmc::games::{marginalization_game, ExternalPredictor};
use shapley_qmc::{estimate, EstimateOptions, Method, Result};

const MODEL: &str = "import json, sys
for line in sys.stdin:
    rows = json.loads(line)['rows']
    print(json.dumps({'preds': [2 * r[0] - r[1] + r[0] * r[2] for r in rows]}), flush=True)
";

pub fn run_example() -> Result<()> {
    let mut script = tempfile::Builder::new().suffix(".py").tempfile()?;
    script.write_all(MODEL.as_bytes())?;
    let path = script.path().to_string_lossy().into_owned();

    let foreground = vec![1.0, 2.0, 3.0];
    let background = vec![vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0], vec![-1.0, 0.5, 2.0]];
    let predictor = ExternalPredictor::spawn(&["python3", path.as_str()])?;
    let mut game = marginalization_game(Box::new(predictor), foreground, background)?;

    let exact = exact_shapley_subsets(&mut game)?;
    let approx = estimate(&mut game, Method::Antithetic, 4, 1, &EstimateOptions::default())?;
    println!("exact:      {:?}", exact.values);
    println!("antithetic: {:?}", approx.values);
    println!(
        "v calls across both runs: {}, of which reached the model: {}",
        game.v_evals(),
        game.fresh_evals()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
