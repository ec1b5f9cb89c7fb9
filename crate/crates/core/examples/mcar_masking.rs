//! MCAR masking of the trailing columns of a complete dataset.

use pcai::data::{apply_mcar, mcar_count, ColumnPartition, Mask, MaskedDataset, Matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (rows, cols, q) = (8, 6, 4);
    let data = Matrix::from_fn(rows, cols, |i, j| (i * cols + j) as f64);
    let truth = MaskedDataset::new(data, Mask::new(rows, cols), ColumnPartition::new(q), None)?;

    for rate in [0.2, 0.5] {
        let masked = apply_mcar(&truth, rate, 42)?;
        println!(
            "rate {rate}: {} of {} cells in columns {q}..{cols} masked (expected {})",
            masked.mask().count_missing(),
            rows * (cols - q),
            mcar_count(rate, rows * (cols - q))
        );
        for i in 0..rows {
            let line: Vec<String> = (0..cols)
                .map(|j| {
                    if masked.mask().is_missing(i, j) {
                        "  .".to_owned()
                    } else {
                        format!("{:3}", masked.data()[(i, j)])
                    }
                })
                .collect();
            println!("  {}", line.join(" "));
        }
    }

    let again = apply_mcar(&truth, 0.5, 42)?;
    println!("same seed, same mask: {}", again.mask() == apply_mcar(&truth, 0.5, 42)?.mask());
    Ok(())
}
