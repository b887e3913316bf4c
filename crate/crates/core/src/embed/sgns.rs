//! Negative-sampling loss and analytic gradients.

use num_traits::Float;

/// Scores are clamped to this magnitude before exponentiation.
pub const SCORE_CLAMP: f64 = 30.0;

fn clamped_sigmoid<T: Float>(x: T) -> T {
    let c = T::from(SCORE_CLAMP).unwrap();
    let x = x.max(-c).min(c);
    T::one() / (T::one() + (-x).exp())
}

fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Loss and gradients of one negative-sampling step:
///
///   loss = −ln σ(v·u⁺) − Σ_neg ln σ(−v·u⁻)
///
/// Returns (loss, ∂loss/∂v, [∂loss/∂u⁺, ∂loss/∂u⁻ …]). Generic so tests can
/// run the identical code in f64 against finite differences while training
/// runs in f32.
pub fn negative_sampling_loss_and_grad<T: Float>(
    entity: &[T],
    pos: &[T],
    negs: &[&[T]],
) -> (T, Vec<T>, Vec<Vec<T>>) {
    let dim = entity.len();
    debug_assert_eq!(pos.len(), dim);
    debug_assert!(negs.iter().all(|n| n.len() == dim));

    let mut grad_entity = vec![T::zero(); dim];
    let mut grad_words = Vec::with_capacity(1 + negs.len());

    let sig_pos = clamped_sigmoid(dot(entity, pos));
    let mut loss = -sig_pos.ln();
    // d/ds[−ln σ(s)] = σ(s) − 1
    let coeff_pos = sig_pos - T::one();
    for (g, &u) in grad_entity.iter_mut().zip(pos) {
        *g = *g + coeff_pos * u;
    }
    grad_words.push(entity.iter().map(|&v| coeff_pos * v).collect());

    for neg in negs {
        let sig_neg = clamped_sigmoid(dot(entity, neg));
        // −ln σ(−s) = −ln(1 − σ(s)); d/ds = σ(s)
        loss = loss - (T::one() - sig_neg).ln();
        let coeff = sig_neg;
        for (g, &u) in grad_entity.iter_mut().zip(*neg) {
            *g = *g + coeff * u;
        }
        grad_words.push(entity.iter().map(|&v| coeff * v).collect());
    }

    (loss, grad_entity, grad_words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_score_no_negatives_is_ln2() {
        let v = vec![0.0f64; 4];
        let u = vec![1.0f64, 0.0, 0.0, 0.0];
        let (loss, grad_v, grad_w) = negative_sampling_loss_and_grad(&v, &u, &[]);
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
        // grad wrt v = (σ(0)−1)·u = −0.5·u
        assert!((grad_v[0] + 0.5).abs() < 1e-12);
        // grad wrt u = (σ(0)−1)·v = 0 here
        assert!(grad_w[0].iter().all(|g| *g == 0.0));
    }

    #[test]
    fn saturated_positive_loss_vanishes() {
        let v = vec![10.0f64, 0.0];
        let u = vec![10.0f64, 0.0]; // score 100, clamped to 30
        let (loss, _, _) = negative_sampling_loss_and_grad(&v, &u, &[]);
        assert!(loss < 1e-12, "loss {loss}");
    }

    #[test]
    fn negatives_add_their_terms() {
        let v = vec![0.0f64; 3];
        let u = vec![0.0f64; 3];
        let n1 = vec![0.0f64; 3];
        let n2 = vec![0.0f64; 3];
        let (loss, _, grad_w) =
            negative_sampling_loss_and_grad(&v, &u, &[n1.as_slice(), n2.as_slice()]);
        assert!((loss - 3.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(grad_w.len(), 3);
    }

    fn finite_diff_check(dim: usize, n_negs: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut next_vec = || {
            (0..dim)
                .map(|_| rng.random_range(-0.5..0.5))
                .collect::<Vec<f64>>()
        };
        let v = next_vec();
        let pos = next_vec();
        let negs: Vec<Vec<f64>> = (0..n_negs).map(|_| next_vec()).collect();
        let neg_refs: Vec<&[f64]> = negs.iter().map(Vec::as_slice).collect();

        let loss_at = |v: &[f64], pos: &[f64], negs: &[&[f64]]| {
            negative_sampling_loss_and_grad(v, pos, negs).0
        };
        let (_, grad_v, grad_w) = negative_sampling_loss_and_grad(&v, &pos, &neg_refs);

        let h = 1e-4;
        let mut worst: f64 = 0.0;
        let mut check = |analytic: &[f64], numeric: &[f64]| {
            let diff: f64 = analytic
                .iter()
                .zip(numeric)
                .map(|(a, n)| (a - n) * (a - n))
                .sum::<f64>()
                .sqrt();
            let norm_a = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
            let norm_n = numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
            worst = worst.max(diff / norm_a.max(norm_n).max(1e-3));
        };

        let mut numeric = vec![0.0; dim];
        for i in 0..dim {
            let mut hi = v.clone();
            let mut lo = v.clone();
            hi[i] += h;
            lo[i] -= h;
            numeric[i] =
                (loss_at(&hi, &pos, &neg_refs) - loss_at(&lo, &pos, &neg_refs)) / (2.0 * h);
        }
        check(&grad_v, &numeric);

        for i in 0..dim {
            let mut hi = pos.clone();
            let mut lo = pos.clone();
            hi[i] += h;
            lo[i] -= h;
            numeric[i] = (loss_at(&v, &hi, &neg_refs) - loss_at(&v, &lo, &neg_refs)) / (2.0 * h);
        }
        check(&grad_w[0], &numeric);

        for (k, neg) in negs.iter().enumerate() {
            for i in 0..dim {
                let mut hi = neg.clone();
                let mut lo = neg.clone();
                hi[i] += h;
                lo[i] -= h;
                let mut refs_hi = neg_refs.clone();
                let mut refs_lo = neg_refs.clone();
                refs_hi[k] = &hi;
                refs_lo[k] = &lo;
                numeric[i] =
                    (loss_at(&v, &pos, &refs_hi) - loss_at(&v, &pos, &refs_lo)) / (2.0 * h);
            }
            check(&grad_w[k + 1], &numeric);
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences() {
        let worst = finite_diff_check(8, 3, 7);
        assert!(worst < 1e-4, "worst relative error {worst}");
    }
}
