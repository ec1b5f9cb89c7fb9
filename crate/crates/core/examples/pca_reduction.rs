//! PCA with a variance target, projection of new rows and reconstruction.

use pcai::harness::{generate_synthetic, SyntheticSpec};
use pcai::{fit_pca, project, Components};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SyntheticSpec {
        rows: 500,
        cols: 60,
        rank: 5,
        noise: 0.01,
        classes: 2,
        seed: 7,
    })?;
    let x = ds.data();

    for target in [0.8, 0.95, 0.99] {
        let (_, model) = fit_pca(x, Components::VarianceTarget(target))?;
        let total: f64 = model.explained_ratio().iter().sum();
        println!("target {target}: k = {}, cumulative ratio {total:.4}", model.k());
    }

    let (scores, model) = fit_pca(x, Components::default())?;
    println!("scores: {} x {}", scores.nrows(), scores.ncols());

    let head = x.rows(0, 3).into_owned();
    let projected = project(&model, &head)?;
    let rebuilt = model.reconstruct(&projected);
    println!("reconstruction error on 3 rows: {:.2e}", (&rebuilt - &head).norm());
    Ok(())
}
