use pcai::data::{apply_mcar, split_rows, ColumnPartition, Mask, MaskedDataset, Matrix};
use pcai::eval::{accuracy, mse_masked, train_linear_svm, SvmConfig};
use pcai::harness::{generate_synthetic, SyntheticSpec};
use pcai::pipeline::{
    pca_on_full, pcai_impute, pic_predict, pic_run, traditional_impute, PipelineSpec, Strategy,
};
use pcai::rng::rng_from_seed;
use pcai::{Components, ImputerSpec};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn labeled_truth(rows: usize, cols: usize, q: usize, seed: u64) -> MaskedDataset {
    generate_synthetic(&SyntheticSpec {
        rows,
        cols,
        rank: 4,
        noise: 0.02,
        classes: 3,
        seed,
    })
    .unwrap()
    .with_partition(q)
    .unwrap()
}

fn row(m: &Matrix, i: usize) -> Vec<f64> {
    m.row(i).iter().copied().collect()
}

#[test]
fn pic_predict_agrees_with_batch_predictions() {
    let truth = labeled_truth(240, 30, 24, 1);
    let (train, test) = split_rows(&truth, 0.25, 2, true).unwrap();
    let train = apply_mcar(&train, 0.2, 3).unwrap();
    for strategy in [Strategy::Pic, Strategy::PicReduce] {
        let spec = PipelineSpec::new(strategy, ImputerSpec::soft_impute()).with_seed(4);
        let out = pic_run(&train, &test, &spec).unwrap();
        for i in 0..test.rows() {
            let x = row(test.data(), i);
            assert_eq!(pic_predict(&out.model, &x).unwrap(), out.predictions[i], "{strategy} row {i}");
            assert_eq!(pic_predict(&out.model, &x).unwrap(), pic_predict(&out.model, &x.clone()).unwrap());
        }
    }
}

#[test]
fn pic_predict_ignores_null_space_of_components() {
    let truth = labeled_truth(200, 20, 16, 5);
    let (train, test) = split_rows(&apply_mcar(&truth, 0.2, 6).unwrap(), 0.2, 7, true).unwrap();
    let spec = PipelineSpec::new(Strategy::PicReduce, ImputerSpec::mean()).with_seed(8);
    let out = pic_run(&train, &test, &spec).unwrap();
    let v = out.model.pca_f.components();
    assert!(v.ncols() < v.nrows(), "need a nontrivial null space");

    let mut rng = rng_from_seed(9);
    let complete = truth.data();
    for i in 0..20 {
        let raw = Matrix::from_fn(16, 1, |_, _| rng.random_range(-1.0..1.0));
        let null = &raw - v * (v.transpose() * &raw);
        assert!((v.transpose() * &null).amax() < 1e-12);
        let x = row(complete, i);
        let mut moved = x.clone();
        for j in 0..16 {
            moved[j] += 5.0 * null[(j, 0)];
        }
        assert_eq!(pic_predict(&out.model, &x).unwrap(), pic_predict(&out.model, &moved).unwrap());
    }
    assert!(pic_predict(&out.model, &[0.0; 3]).is_err());
}

#[test]
fn pca_on_full_uses_one_projection() {
    let truth = labeled_truth(200, 24, 20, 10);
    let ds = apply_mcar(&truth, 0.3, 11).unwrap();
    let (train, test) = split_rows(&ds, 0.25, 12, true).unwrap();
    let spec = PipelineSpec::new(Strategy::PcaOnFull, ImputerSpec::mean());
    let out = pca_on_full(&train, &test, &spec).unwrap();
    let full = traditional_impute(&train, &spec.imputer).unwrap().completed;
    let (_, model) = pcai::fit_pca(&full, Components::default()).unwrap();
    assert_eq!(out.input_width, model.k());
    assert!(out.accuracy > 0.6);
}

#[test]
fn pipelines_are_deterministic() {
    let truth = labeled_truth(150, 18, 15, 13);
    let ds = apply_mcar(&truth, 0.3, 14).unwrap();
    let (train, test) = split_rows(&ds, 0.3, 15, true).unwrap();
    let spec = PipelineSpec::new(Strategy::Pic, ImputerSpec::knn(4)).with_seed(16);
    let a = pic_run(&train, &test, &spec).unwrap();
    let b = pic_run(&train, &test, &spec).unwrap();
    assert_eq!(a.predictions, b.predictions);
    assert_eq!(a.model.classifier, b.model.classifier);
}

#[test]
fn pcai_knn_beats_mean_on_low_rank_data() {
    let truth = labeled_truth(300, 40, 32, 17);
    let ds = apply_mcar(&truth, 0.3, 18).unwrap();
    let (truth_m, _) = truth.missing_block();
    let (_, m_mask) = ds.missing_block();
    let knn = pcai_impute(&ds, &ImputerSpec::knn(5), Components::default()).unwrap();
    let mean = pcai_impute(&ds, &ImputerSpec::mean(), Components::default()).unwrap();
    let knn_mse = mse_masked(&knn.m_prime, &truth_m, &m_mask).unwrap();
    let mean_mse = mse_masked(&mean.m_prime, &truth_m, &m_mask).unwrap();
    assert!(knn_mse < 0.5 * mean_mse, "knn {knn_mse} vs mean {mean_mse}");
}

#[test]
fn every_imputer_through_pcai_preserves_f_width() {
    let truth = labeled_truth(80, 12, 9, 19);
    let ds = apply_mcar(&truth, 0.2, 20).unwrap();
    for kind in pcai::ImputerKind::ALL {
        let spec = ImputerSpec {
            svd_rank: 2,
            ..ImputerSpec::new(kind)
        };
        let out = pcai_impute(&ds, &spec, Components::default()).unwrap();
        assert_eq!(out.m_prime.shape(), (80, 3));
        assert!(out.m_prime.iter().all(|v| v.is_finite()));
    }
}

/// Reference one-vs-rest linear SVM: dual coordinate descent on the hinge
/// loss with the bias as an augmented constant feature and C = 1 / (λ n).
fn dual_cd_svm(x: &Matrix, y: &[usize], classes: usize, lambda: f64) -> Vec<Vec<f64>> {
    let (n, d) = x.shape();
    let c = 1.0 / (lambda * n as f64);
    let aug: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..d).map(|j| x[(i, j)]).chain(std::iter::once(1.0)).collect())
        .collect();
    let sq: Vec<f64> = aug.iter().map(|a| a.iter().map(|v| v * v).sum()).collect();
    (0..classes)
        .map(|k| {
            let t: Vec<f64> = y.iter().map(|&l| if l == k { 1.0 } else { -1.0 }).collect();
            let mut alpha = vec![0.0; n];
            let mut w = vec![0.0; d + 1];
            for _ in 0..200 {
                let mut max_step: f64 = 0.0;
                for i in 0..n {
                    let g = t[i] * aug[i].iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - 1.0;
                    let new = (alpha[i] - g / sq[i]).clamp(0.0, c);
                    let delta = new - alpha[i];
                    if delta != 0.0 {
                        for (wj, aj) in w.iter_mut().zip(&aug[i]) {
                            *wj += delta * t[i] * aj;
                        }
                        alpha[i] = new;
                        max_step = max_step.max(delta.abs());
                    }
                }
                if max_step < 1e-10 {
                    break;
                }
            }
            w
        })
        .collect()
}

#[test]
fn pegasos_matches_dual_reference_on_blobs() {
    let mut rng = rng_from_seed(21);
    let centers = [[0.0, 0.0, 0.0], [4.0, 0.0, 1.0], [0.0, 4.0, -1.0]];
    let n = 300;
    let y: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let x = Matrix::from_fn(n, 3, |i, j| {
        let z: f64 = StandardNormal.sample(&mut rng);
        centers[y[i]][j] + 0.6 * z
    });
    let cfg = SvmConfig::default();
    let model = train_linear_svm(&x, &y, &cfg).unwrap();
    let ours = accuracy(&model.predict(&x), &y);

    let w = dual_cd_svm(&x, &y, 3, cfg.reg_lambda);
    let reference: Vec<usize> = (0..n)
        .map(|i| {
            let scores: Vec<f64> = w
                .iter()
                .map(|wk| (0..3).map(|j| wk[j] * x[(i, j)]).sum::<f64>() + wk[3])
                .collect();
            (0..3).fold(0, |b, c| if scores[c] > scores[b] { c } else { b })
        })
        .collect();
    let theirs = accuracy(&reference, &y);
    assert!(ours >= 0.98, "pegasos accuracy {ours}");
    assert!(theirs >= 0.98, "reference accuracy {theirs}");
    assert!((ours - theirs).abs() <= 0.02, "{ours} vs {theirs}");
}

#[test]
fn complete_dataset_round_trip_through_partition() {
    let data = Matrix::from_fn(10, 4, |i, j| (i * 4 + j) as f64);
    let ds = MaskedDataset::new(data.clone(), Mask::new(10, 4), ColumnPartition::new(3), None).unwrap();
    let out = pcai_impute(&apply_mcar(&ds, 0.5, 1).unwrap(), &ImputerSpec::mean(), Components::Fixed(2)).unwrap();
    assert_eq!(out.model.k(), 2);
    assert_eq!(out.m_prime.ncols(), 1);
}
