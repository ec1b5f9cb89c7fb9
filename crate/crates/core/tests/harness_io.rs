use std::io::Write;

use pcai::harness::{
    emit_report, generate_synthetic, load_csv, parse_jsonl, run_experiments, write_csv, ConfigFile,
    DatasetSource, ReportFormat, RunConfig, SyntheticSpec,
};
use pcai::{ImputerKind, Strategy};

fn synthetic_csv(dir: &std::path::Path) -> std::path::PathBuf {
    let ds = generate_synthetic(&SyntheticSpec {
        rows: 90,
        cols: 12,
        rank: 3,
        noise: 0.02,
        classes: 2,
        seed: 4,
    })
    .unwrap();
    let names: Vec<String> = (0..12).map(|j| format!("x{j}")).collect();
    let labels: Vec<String> = ds
        .labels()
        .unwrap()
        .iter()
        .map(|&c| if c == 0 { "neg".to_owned() } else { "pos".to_owned() })
        .collect();
    let path = dir.join("truth.csv");
    write_csv(&path, &names, ds.data(), None, Some(("class", &labels))).unwrap();
    path
}

#[test]
fn sweep_over_csv_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synthetic_csv(dir.path());
    let config_path = dir.path().join("run.toml");
    let mut f = std::fs::File::create(&config_path).unwrap();
    writeln!(
        f,
        "csv = {:?}\nlabel_column = \"class\"\nq = 9\nmissing_rates = [0.2, 0.4]\n\
         strategies = [\"traditional\", \"pcai\", \"pic\"]\nimputers = [\"mean\", \"knn\"]\n\
         folds = 3\nseed = 5",
        csv.display().to_string()
    )
    .unwrap();
    let config = RunConfig::from_file(&config_path).unwrap();
    assert!(matches!(config.source, DatasetSource::Csv { .. }));
    let records = run_experiments(&config).unwrap();
    assert_eq!(records.len(), 2 * 3 * 2);
    for r in &records {
        assert!(!r.na, "{:?}", r.na_reason);
        assert_eq!(r.mse.is_some(), !r.strategy.is_classification());
        assert_eq!(r.accuracy.is_some(), r.strategy.is_classification());
        assert!((r.total_seconds - r.stage_seconds.values().sum::<f64>()).abs() < 1e-12);
    }

    let base = dir.path().join("reports/sweep");
    let paths = emit_report(&records, &base, ReportFormat::Both, 1).unwrap();
    let text = std::fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(parse_jsonl(&text).unwrap(), records);
    let table = std::fs::read_to_string(&paths[1]).unwrap();
    assert!(table.contains("knn / pic"));
    assert!(table.contains("20%") && table.contains("40%"));
}

#[test]
fn csv_ground_truth_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("raw.csv");
    std::fs::write(&path, "a,b,c\n1,10,5\n3,20,5\n2,40,5\n").unwrap();
    let config = RunConfig {
        source: DatasetSource::Csv {
            path: path.clone(),
            label_column: None,
        },
        q: Some(2),
        ..RunConfig::default()
    };
    let truth = pcai::harness::load_ground_truth(&config).unwrap();
    let d = truth.data();
    assert_eq!(d.column(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 0.5]);
    assert!(d.column(2).iter().all(|&v| v == 0.0));
    assert_eq!(truth.q(), 2);
    assert_eq!(load_csv(&path, None).unwrap().dataset.rows(), 3);
}

#[test]
fn csv_with_missing_cells_cannot_be_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gappy.csv");
    std::fs::write(&path, "a,b\n1,\n2,3\n4,5\n").unwrap();
    let config = RunConfig {
        source: DatasetSource::Csv {
            path,
            label_column: None,
        },
        q: Some(1),
        ..RunConfig::default()
    };
    assert!(matches!(run_experiments(&config), Err(pcai::Error::Config(_))));
}

#[test]
fn flag_overlay_beats_file() {
    let file = ConfigFile::from_toml_str("imputers = [\"mean\"]\nworkers = 2").unwrap();
    let flags = ConfigFile {
        imputers: Some(vec!["soft_impute".into(), "mice".into()]),
        ..ConfigFile::default()
    };
    let cfg = file.overlay(flags).into_run_config().unwrap();
    assert_eq!(cfg.imputers, vec![ImputerKind::SoftImpute, ImputerKind::MiceRidge]);
    assert_eq!(cfg.workers, 2);
    assert_eq!(cfg.strategies, vec![Strategy::Traditional, Strategy::Pcai]);
}

#[test]
fn q_must_leave_columns_to_mask() {
    let config = RunConfig {
        source: DatasetSource::Synthetic(SyntheticSpec {
            rows: 40,
            cols: 6,
            rank: 2,
            ..SyntheticSpec::default()
        }),
        q: Some(6),
        ..RunConfig::default()
    };
    assert!(matches!(run_experiments(&config), Err(pcai::Error::Config(_))));
}
