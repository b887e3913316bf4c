//! Year prediction from paper vectors: OLS with an intercept, evaluated on a
//! seeded 80/20 split.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{paper_vector, AnalysisError};
use crate::corpus::Corpus;
use crate::embed::EmbeddingModel;

pub const RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionEval {
    /// None when the test split has a single distinct year (undefined).
    pub r2: Option<f64>,
    pub mae: f64,
    pub split_seed: u64,
    pub train_fraction: f64,
    pub train_size: usize,
    pub test_size: usize,
    /// Papers dropped because every token was out of vocabulary.
    pub oov_excluded: usize,
}

/// Solves (XᵀX + ridge·I)β = Xᵀy where X carries a leading intercept column.
/// Returns β with the intercept first.
pub fn fit_ols(
    features: &[Vec<f64>],
    targets: &[f64],
    ridge: f64,
) -> Result<Vec<f64>, AnalysisError> {
    let n = features.len();
    let d = features.first().map(Vec::len).unwrap_or(0) + 1;
    let mut x = DMatrix::zeros(n, d);
    for (i, row) in features.iter().enumerate() {
        x[(i, 0)] = 1.0;
        for (j, &v) in row.iter().enumerate() {
            x[(i, j + 1)] = v;
        }
    }
    let y = DVector::from_column_slice(targets);
    let xt = x.transpose();
    let mut gram = &xt * &x;
    for j in 0..d {
        gram[(j, j)] += ridge;
    }
    let rhs = &xt * y;
    let beta = gram
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .or_else(|| gram.lu().solve(&rhs))
        .ok_or(AnalysisError::SolveFailed("normal equations are singular"))?;
    Ok(beta.iter().copied().collect())
}

pub fn predict(beta: &[f64], features: &[f64]) -> f64 {
    beta[0]
        + beta[1..]
            .iter()
            .zip(features)
            .map(|(b, x)| b * x)
            .sum::<f64>()
}

/// R² = 1 − SS_res/SS_tot; None when all actual values are equal.
pub fn r_squared(predicted: &[f64], actual: &[f64]) -> Option<f64> {
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    let ss_tot: f64 = actual.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return None;
    }
    let ss_res: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, y)| (p - y) * (p - y))
        .sum();
    Some(1.0 - ss_res / ss_tot)
}

pub fn mean_absolute_error(predicted: &[f64], actual: &[f64]) -> f64 {
    let n = actual.len() as f64;
    predicted
        .iter()
        .zip(actual)
        .map(|(p, y)| (p - y).abs())
        .sum::<f64>()
        / n
}

/// Fits year ~ paper_vector on a seeded shuffled train split and evaluates
/// on the rest. OOV papers are excluded and counted.
pub fn year_regression_eval(
    model: &EmbeddingModel,
    corpus: &Corpus,
    split_seed: u64,
    train_fraction: f64,
) -> Result<RegressionEval, AnalysisError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(AnalysisError::InvalidFraction(train_fraction));
    }
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut oov_excluded = 0usize;
    for p in corpus.papers() {
        let (v, oov) = paper_vector(model, p);
        if oov {
            oov_excluded += 1;
            continue;
        }
        xs.push(v);
        ys.push(p.year as f64);
    }
    let n = xs.len();
    let need = model.dim + 2;
    if n < need {
        return Err(AnalysisError::TooFewPapers { need, have: n });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(split_seed));
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let (train_idx, test_idx) = order.split_at(n_train);

    let train_x: Vec<Vec<f64>> = train_idx.iter().map(|&i| xs[i].clone()).collect();
    let train_y: Vec<f64> = train_idx.iter().map(|&i| ys[i]).collect();
    let beta = fit_ols(&train_x, &train_y, RIDGE)?;

    let predicted: Vec<f64> = test_idx.iter().map(|&i| predict(&beta, &xs[i])).collect();
    let actual: Vec<f64> = test_idx.iter().map(|&i| ys[i]).collect();
    Ok(RegressionEval {
        r2: r_squared(&predicted, &actual),
        mae: mean_absolute_error(&predicted, &actual),
        split_seed,
        train_fraction,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
        oov_excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn exact_linear_data_recovers_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let true_beta = [5.0, 2.0, -1.5, 0.25];
        let xs: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| predict(&true_beta, x)).collect();
        let beta = fit_ols(&xs, &ys, RIDGE).unwrap();
        for (b, t) in beta.iter().zip(true_beta) {
            assert!((b - t).abs() / t.abs() < 1e-6, "got {b}, want {t}");
        }
        let preds: Vec<f64> = xs.iter().map(|x| predict(&beta, x)).collect();
        assert!((r_squared(&preds, &ys).unwrap() - 1.0).abs() < 1e-9);
        assert!(mean_absolute_error(&preds, &ys) <= 1e-6);
    }

    #[test]
    fn intercept_only_prediction_has_zero_r2() {
        let actual = vec![1998.0, 2002.0, 2000.0, 2004.0, 1996.0];
        let mean = actual.iter().sum::<f64>() / actual.len() as f64;
        let predicted = vec![mean; actual.len()];
        let r2 = r_squared(&predicted, &actual).unwrap();
        assert!(r2.abs() < 1e-9);
    }

    #[test]
    fn constant_actuals_make_r2_undefined() {
        assert_eq!(r_squared(&[1.0, 2.0], &[5.0, 5.0]), None);
    }

    #[test]
    fn fraction_bounds_are_enforced() {
        use crate::embed::{EntityId, EntityKind, TrainConfig, Vocab};
        use crate::matrix::Matrix;
        let model = EmbeddingModel {
            dim: 2,
            entities: vec![EntityId::new(EntityKind::Venue, "V")],
            vocab: Vocab::new(vec![("w".into(), 1)], 1),
            entity_vectors: Matrix::zeros(1, 2),
            word_vectors: Matrix::zeros(1, 2),
            config: TrainConfig {
                dim: 2,
                min_count: 1,
                ..TrainConfig::default()
            },
        };
        let corpus = Corpus::new(vec![]).unwrap();
        let err = year_regression_eval(&model, &corpus, 1, 1.2).unwrap_err();
        assert!(matches!(err, AnalysisError::InvalidFraction(_)));
        let err = year_regression_eval(&model, &corpus, 1, 0.8).unwrap_err();
        assert!(matches!(
            err,
            AnalysisError::TooFewPapers { need: 4, have: 0 }
        ));
    }
}
