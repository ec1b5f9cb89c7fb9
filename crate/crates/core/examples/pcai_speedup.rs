//! Traditional imputation versus PCAI on the same masked data.
//!
//! `cargo run --release --example pcai_speedup`

use pcai::data::apply_mcar;
use pcai::eval::mse_masked;
use pcai::harness::{generate_synthetic, SyntheticSpec};
use pcai::pipeline::run_imputation;
use pcai::{ImputerSpec, PipelineSpec, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = generate_synthetic(&SyntheticSpec {
        rows: 1000,
        cols: 300,
        rank: 8,
        noise: 0.01,
        classes: 3,
        seed: 0,
    })?
    .with_partition(250)?;
    let (truth_m, _) = truth.missing_block();

    for rate in [0.2, 0.4] {
        let ds = apply_mcar(&truth, rate, 1)?;
        let (_, m_mask) = ds.missing_block();
        for strategy in [Strategy::Traditional, Strategy::Pcai] {
            let out = run_imputation(&ds, &PipelineSpec::new(strategy, ImputerSpec::soft_impute()))?;
            let mse = mse_masked(&out.m_prime, &truth_m, &m_mask)?;
            let k = out.pca.as_ref().map_or(String::new(), |m| format!(", k = {}", m.k()));
            println!(
                "rate {rate} {strategy:<12} mse {mse:.5}  {:.3} s{k}",
                out.timings.total()
            );
        }
    }
    Ok(())
}
