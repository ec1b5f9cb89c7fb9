//! Every imputer on the same masked low-rank matrix.

use pcai::data::apply_mcar;
use pcai::eval::mse_masked;
use pcai::harness::{generate_synthetic, SyntheticSpec};
use pcai::{impute, ImputerKind, ImputerSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = generate_synthetic(&SyntheticSpec {
        rows: 300,
        cols: 40,
        rank: 4,
        noise: 0.02,
        classes: 2,
        seed: 1,
    })?
    .with_partition(0)?;
    let masked = apply_mcar(&truth, 0.3, 2)?;
    println!("{} missing entries", masked.mask().count_missing());

    for kind in ImputerKind::ALL {
        let spec = ImputerSpec {
            svd_rank: 4,
            ..ImputerSpec::new(kind)
        };
        let out = impute(&spec, masked.data(), masked.mask())?;
        let mse = mse_masked(&out.completed, truth.data(), masked.mask())?;
        println!(
            "{kind:<14} mse {mse:.5}  iterations {:>3}  converged {}",
            out.iterations_run, out.converged
        );
    }
    Ok(())
}
