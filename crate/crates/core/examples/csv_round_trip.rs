//! Load a CSV with gaps, impute with PCAI and write the completed file back
//! in the original column order.

use pcai::data::restore_column_order;
use pcai::harness::{load_csv, write_csv};
use pcai::{pipeline::pcai_impute, Components, ImputerSpec};

const INPUT: &str = "\
height,weight,age,score,grade
1.62,58,31,0.71,b
1.80,,45,0.64,a
1.75,80,29,,a
1.58,51,52,0.80,b
1.91,95,38,0.55,a
1.66,62,,0.77,b
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("pcai_csv_round_trip");
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("people.csv");
    std::fs::write(&input, INPUT)?;

    let loaded = load_csv(&input, Some("grade"))?;
    let ds = &loaded.dataset;
    println!(
        "{} rows, q = {} fully observed columns, order {:?}",
        ds.rows(),
        ds.q(),
        loaded.rearranged_names()
    );

    let out = pcai_impute(ds, &ImputerSpec::knn(2), Components::default())?;
    let mut full = ds.data().clone();
    full.columns_mut(ds.q(), ds.cols() - ds.q()).copy_from(&out.m_prime);
    let completed = restore_column_order(&full, &loaded.permutation);

    let output = dir.join("people_completed.csv");
    let labels = loaded.label_strings().unwrap();
    write_csv(&output, &loaded.feature_names, &completed, None, Some(("grade", &labels)))?;
    print!("{}", std::fs::read_to_string(&output)?);
    Ok(())
}
