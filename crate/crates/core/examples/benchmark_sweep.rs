//! A small sweep over rates, strategies and imputers, written as JSONL and a
//! text table under `target/sweep`.

use std::path::Path;

use pcai::harness::{emit_report, render_table, run_experiments, DatasetSource, ReportFormat, RunConfig, SyntheticSpec};
use pcai::{ImputerKind, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig {
        source: DatasetSource::Synthetic(SyntheticSpec {
            rows: 400,
            cols: 90,
            rank: 5,
            noise: 0.02,
            classes: 3,
            seed: 11,
        }),
        missing_rates: vec![0.2, 0.4, 0.6],
        strategies: vec![Strategy::Traditional, Strategy::Pcai, Strategy::PicReduce],
        imputers: vec![ImputerKind::Mean, ImputerKind::Knn, ImputerKind::SoftImpute],
        seed: 1,
        ..RunConfig::default()
    };
    let records = run_experiments(&config)?;
    print!("{}", render_table(&records, config.workers));
    for path in emit_report(&records, Path::new("target/sweep/report"), ReportFormat::Both, config.workers)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
