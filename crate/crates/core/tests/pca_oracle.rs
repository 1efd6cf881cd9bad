use embias_core::rng::{gaussian, keyed_rng};
use embias_core::subspace::{
    canonical_sign, centered_samples, correlation_matrix, pair_directions, pca, DefiningSetFamily,
};
use embias_core::vector::dot;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

/// Dense eigendecomposition of the scatter matrix via nalgebra, sorted by
/// descending eigenvalue and signed with the same canonical rule.
fn oracle(samples: &[Vec<f64>], k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let dim = samples[0].len();
    let data = DMatrix::from_fn(samples.len(), dim, |i, j| samples[i][j]);
    let scatter = data.transpose() * &data;
    let eig = SymmetricEigen::new(scatter);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let total: f64 = eig.eigenvalues.iter().sum();
    let comps = order[..k]
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            canonical_sign(&mut v);
            v
        })
        .collect();
    let ratios = order[..k]
        .iter()
        .map(|&i| eig.eigenvalues[i] / total)
        .collect();
    (comps, ratios)
}

fn random_samples(seed: u64) -> (Vec<Vec<f64>>, usize) {
    let mut rng = keyed_rng(seed, 0);
    let dim = rng.random_range(2..=10);
    let n = rng.random_range(dim..=dim + 15);
    // anisotropic scales keep the spectrum well separated
    let scales: Vec<f64> = (0..dim).map(|j| 1.0 + 1.5 * j as f64).collect();
    let samples = (0..n)
        .map(|_| scales.iter().map(|s| s * gaussian(&mut rng)).collect())
        .collect();
    (samples, rng.random_range(1..=dim))
}

#[test]
fn pca_matches_dense_eigendecomposition() {
    for seed in 0..100 {
        let (samples, k) = random_samples(seed);
        let sub = pca(&samples, k).unwrap();
        let (comps, ratios) = oracle(&samples, k);
        for (i, (c, o)) in sub.components().iter().zip(&comps).enumerate() {
            let aligned = dot(c, o).abs();
            assert!((aligned - 1.0).abs() < 1e-8, "seed {seed} component {i}");
            for (x, y) in c.iter().zip(o) {
                assert!(
                    (x - y).abs() < 1e-8,
                    "seed {seed} component {i}: {c:?} vs {o:?}"
                );
            }
        }
        for (r, o) in sub.explained_variance_ratios().iter().zip(&ratios) {
            assert!((r - o).abs() < 1e-8, "seed {seed}");
        }
    }
}

#[test]
fn gram_route_matches_oracle() {
    // more dimensions than samples
    for seed in 0..30 {
        let mut rng = keyed_rng(seed, 5);
        let dim = rng.random_range(6..=12);
        let n = rng.random_range(2..dim);
        let samples: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..dim)
                    .map(|_| (1.0 + i as f64) * gaussian(&mut rng))
                    .collect()
            })
            .collect();
        let k = rng.random_range(1..=n);
        let sub = pca(&samples, k).unwrap();
        let (comps, ratios) = oracle(&samples, k);
        for (c, o) in sub.components().iter().zip(&comps) {
            assert!((dot(c, o).abs() - 1.0).abs() < 1e-8, "seed {seed}");
        }
        for (r, o) in sub.explained_variance_ratios().iter().zip(&ratios) {
            assert!((r - o).abs() < 1e-8);
        }
    }
}

#[test]
fn components_orthonormal_and_eigen_consistent() {
    for seed in 0..40 {
        let (samples, k) = random_samples(1000 + seed);
        let sub = pca(&samples, k).unwrap();
        let comps = sub.components();
        for (i, a) in comps.iter().enumerate() {
            assert!((dot(a, a) - 1.0).abs() < 1e-10);
            for b in &comps[i + 1..] {
                assert!(dot(a, b).abs() < 1e-8);
            }
            // scatter · v = λ v
            let lambda = sub.eigenvalues()[i];
            let sv: Vec<f64> = (0..a.len())
                .map(|r| samples.iter().map(|s| s[r] * dot(s, a)).sum())
                .collect();
            for (x, y) in sv.iter().zip(a) {
                assert!((x - lambda * y).abs() <= 1e-6 * lambda.max(1.0));
            }
        }
        let ratios = sub.explained_variance_ratios();
        assert!(ratios.windows(2).all(|w| w[0] >= w[1]));
        assert!(ratios.iter().sum::<f64>() <= 1.0 + 1e-10);
    }
}

proptest! {
    #[test]
    fn pca_invariant_under_sample_permutation(seed in 0u64..500, shuffle_seed in any::<u64>()) {
        let (samples, k) = random_samples(seed);
        let mut shuffled = samples.clone();
        let mut rng = keyed_rng(shuffle_seed, 0);
        for i in (1..shuffled.len()).rev() {
            let j = rng.random_range(0..=i);
            shuffled.swap(i, j);
        }
        let a = pca(&samples, k).unwrap();
        let b = pca(&shuffled, k).unwrap();
        for (u, v) in a.components().iter().zip(b.components()) {
            for (x, y) in u.iter().zip(v) {
                prop_assert!((x - y).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn correlation_matrix_symmetric(seed in 0u64..500) {
        let mut rng = keyed_rng(seed, 3);
        let dim = rng.random_range(2..6);
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..rng.random_range(1..6))
            .map(|_| {
                let a = (0..dim).map(|_| gaussian(&mut rng)).collect();
                let b = (0..dim).map(|_| gaussian(&mut rng)).collect();
                (a, b)
            })
            .collect();
        let family = DefiningSetFamily::from_pairs(pairs).unwrap();
        let dirs = pair_directions(&family).unwrap();
        let pc1 = pca(&centered_samples(&family), 1).unwrap();
        let m = correlation_matrix(&dirs, Some(pc1.first())).unwrap();
        for (i, row) in m.iter().enumerate() {
            prop_assert_eq!(row[i], 1.0);
            for (j, value) in row.iter().enumerate() {
                prop_assert_eq!(*value, m[j][i]);
            }
        }
    }
}

#[test]
fn pair_pc1_follows_dominant_pair_direction() {
    // centered pair samples are ±(a − c)/2; a single pair gives PC1 ∝ a − c
    let family =
        DefiningSetFamily::from_pairs(vec![(vec![3.0, 1.0, 0.0], vec![1.0, 1.0, 0.0])]).unwrap();
    let samples = centered_samples(&family);
    assert_eq!(samples, vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]]);
    let sub = pca(&samples, 1).unwrap();
    assert_eq!(sub.first(), &[1.0, 0.0, 0.0]);
}
