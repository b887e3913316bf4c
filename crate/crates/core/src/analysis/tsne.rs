//! Exact t-SNE to two dimensions.
//!
//! Faithful to the reference algorithm: per-point bisection matches each
//! conditional distribution's entropy to ln(perplexity); the symmetrized
//! affinities are exaggerated x12 for the first 250 iterations; gradient
//! descent runs with momentum 0.5 (switching to 0.8 at iteration 250) and
//! per-coordinate adaptive gains. Selections here are hundreds of points,
//! so no Barnes-Hut approximation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::AnalysisError;
use crate::embed::{EmbeddingModel, EntityId};

const P_FLOOR: f64 = 1e-12;
const EXAGGERATION: f64 = 12.0;
const EXAGGERATION_ITERS: usize = 250;
const MOMENTUM_SWITCH_ITER: usize = 250;
const INITIAL_MOMENTUM: f64 = 0.5;
const FINAL_MOMENTUM: f64 = 0.8;
const INIT_SCALE: f64 = 1e-4;
const BISECTION_ITERS: usize = 50;
const ENTROPY_TOL: f64 = 1e-5;
const MIN_POINTS: usize = 4;
const MIN_GAIN: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iters: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iters: 1000,
            learning_rate: 200.0,
            seed: 42,
        }
    }
}

/// 2-D layout with the KL divergence before and after optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Tsne2d {
    pub coords: Vec<[f64; 2]>,
    pub initial_kl: f64,
    pub final_kl: f64,
}

/// [`Tsne2d`] plus the entity each row belongs to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection2D {
    pub labels: Vec<EntityId>,
    pub coords: Vec<[f64; 2]>,
    pub initial_kl: f64,
    pub final_kl: f64,
}

/// Embeds the selected entity vectors.
pub fn tsne_project(
    model: &EmbeddingModel,
    selection: &[usize],
    cfg: &TsneConfig,
) -> Result<Projection2D, AnalysisError> {
    let points: Vec<Vec<f64>> = selection
        .iter()
        .map(|&i| model.entity_vector(i).iter().map(|&v| v as f64).collect())
        .collect();
    let out = tsne_embed(&points, cfg)?;
    Ok(Projection2D {
        labels: selection
            .iter()
            .map(|&i| model.entities[i].clone())
            .collect(),
        coords: out.coords,
        initial_kl: out.initial_kl,
        final_kl: out.final_kl,
    })
}

pub fn tsne_embed(points: &[Vec<f64>], cfg: &TsneConfig) -> Result<Tsne2d, AnalysisError> {
    let n = points.len();
    if n < MIN_POINTS {
        return Err(AnalysisError::TooFewPoints {
            need: MIN_POINTS,
            have: n,
        });
    }
    let perplexity = cfg.perplexity.min((n - 1) as f64 / 3.0);

    let d2 = squared_distances(points);
    let p = symmetrized_affinities(&d2, n, perplexity);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut y: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            [a * INIT_SCALE, b * INIT_SCALE]
        })
        .collect();
    let mut velocity = vec![[0.0f64; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut grad = vec![[0.0f64; 2]; n];
    let mut t_num = vec![0.0f64; n * n];

    let initial_kl = kl_divergence(&p, &q_from_layout(&y, &mut t_num), n);

    for iter in 0..cfg.iters {
        let exaggeration = if iter < EXAGGERATION_ITERS {
            EXAGGERATION
        } else {
            1.0
        };
        let momentum = if iter < MOMENTUM_SWITCH_ITER {
            INITIAL_MOMENTUM
        } else {
            FINAL_MOMENTUM
        };
        let q = q_from_layout(&y, &mut t_num);

        for g in grad.iter_mut() {
            *g = [0.0, 0.0];
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let coeff = 4.0 * (exaggeration * p[i * n + j] - q[i * n + j]) * t_num[i * n + j];
                grad[i][0] += coeff * (y[i][0] - y[j][0]);
                grad[i][1] += coeff * (y[i][1] - y[j][1]);
            }
        }

        let mut mean = [0.0f64; 2];
        for i in 0..n {
            for d in 0..2 {
                // Per-coordinate gains: grow when the gradient opposes the
                // current velocity, shrink when they agree.
                let same_sign = (grad[i][d] > 0.0) == (velocity[i][d] > 0.0);
                gains[i][d] = if same_sign {
                    (gains[i][d] * 0.8).max(MIN_GAIN)
                } else {
                    gains[i][d] + 0.2
                };
                velocity[i][d] =
                    momentum * velocity[i][d] - cfg.learning_rate * gains[i][d] * grad[i][d];
                y[i][d] += velocity[i][d];
                mean[d] += y[i][d];
            }
        }
        for yi in y.iter_mut() {
            yi[0] -= mean[0] / n as f64;
            yi[1] -= mean[1] / n as f64;
        }
    }

    let final_kl = kl_divergence(&p, &q_from_layout(&y, &mut t_num), n);
    if !y.iter().all(|c| c[0].is_finite() && c[1].is_finite()) {
        return Err(AnalysisError::SolveFailed(
            "t-SNE diverged to non-finite coordinates",
        ));
    }
    Ok(Tsne2d {
        coords: y,
        initial_kl,
        final_kl,
    })
}

fn squared_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut d2 = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2[i * n + j] = d;
            d2[j * n + i] = d;
        }
    }
    d2
}

/// Bisects each point's precision so the conditional entropy hits
/// ln(perplexity), then symmetrizes and floors the joint distribution.
fn symmetrized_affinities(d2: &[f64], n: usize, perplexity: f64) -> Vec<f64> {
    let target_entropy = perplexity.ln();
    let mut p = vec![0.0f64; n * n];
    let mut row = vec![0.0f64; n];
    for i in 0..n {
        let mut beta = 1.0f64;
        let mut beta_min = f64::NEG_INFINITY;
        let mut beta_max = f64::INFINITY;
        for _ in 0..BISECTION_ITERS {
            // H(beta) = ln Σp + beta·E[d]; p_j = exp(−d_j·beta).
            let mut sum_p = 0.0f64;
            let mut sum_dp = 0.0f64;
            for j in 0..n {
                if j == i {
                    row[j] = 0.0;
                    continue;
                }
                let pj = (-d2[i * n + j] * beta).exp();
                row[j] = pj;
                sum_p += pj;
                sum_dp += d2[i * n + j] * pj;
            }
            let entropy = if sum_p > 0.0 {
                sum_p.ln() + beta * sum_dp / sum_p
            } else {
                0.0
            };
            let diff = entropy - target_entropy;
            if diff.abs() < ENTROPY_TOL {
                break;
            }
            if diff > 0.0 {
                beta_min = beta;
                beta = if beta_max.is_finite() {
                    (beta + beta_max) / 2.0
                } else {
                    beta * 2.0
                };
            } else {
                beta_max = beta;
                beta = if beta_min.is_finite() {
                    (beta + beta_min) / 2.0
                } else {
                    beta / 2.0
                };
            }
        }
        let sum_p: f64 = row.iter().sum();
        if sum_p > 0.0 {
            for j in 0..n {
                p[i * n + j] = row[j] / sum_p;
            }
        } else {
            // Degenerate row (all duplicates at distance 0 underflowed):
            // fall back to uniform over the others.
            for j in 0..n {
                p[i * n + j] = if j == i { 0.0 } else { 1.0 / (n - 1) as f64 };
            }
        }
    }
    let mut joint = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                joint[i * n + j] = ((p[i * n + j] + p[j * n + i]) / (2.0 * n as f64)).max(P_FLOOR);
            }
        }
    }
    joint
}

/// Student-t numerators into `t_num`; returns the normalized, floored Q.
fn q_from_layout(y: &[[f64; 2]], t_num: &mut [f64]) -> Vec<f64> {
    let n = y.len();
    let mut total = 0.0f64;
    for i in 0..n {
        t_num[i * n + i] = 0.0;
        for j in (i + 1)..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let t = 1.0 / (1.0 + dx * dx + dy * dy);
            t_num[i * n + j] = t;
            t_num[j * n + i] = t;
            total += 2.0 * t;
        }
    }
    t_num.iter().map(|&t| (t / total).max(P_FLOOR)).collect()
}

fn kl_divergence(p: &[f64], q: &[f64], n: usize) -> f64 {
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = p[i * n + j];
            if pij > 0.0 {
                kl += pij * (pij / q[i * n + j]).ln();
            }
        }
    }
    kl
}
