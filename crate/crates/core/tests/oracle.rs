//! Distances and class relevances against exact integer arithmetic.

mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texplain::metric::{class_mean_distance, distance, texture_relevance};
use texplain::saliency::FeatureVector;

const REL_1E9: u64 = 1_000_000_000;

#[test]
fn oracle_agrees_with_pythagoras() {
    let d = oracle_distance(&[0.0, 0.0], &[3.0, 4.0]);
    assert!(rel_close(5.0, &d, 1, u64::MAX));
    assert!(!rel_close(5.0 * (1.0 + 1e-8), &d, 1, REL_1E9));
    assert!(rel_close(5.0 * (1.0 + 1e-10), &d, 1, REL_1E9));
}

#[test]
fn wide_distances_match_exact_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spread in [1e-3, 1.0, 1e4] {
        for _ in 0..10 {
            let a = random_vec(&mut rng, 2048, spread);
            let b = random_vec(&mut rng, 2048, spread);
            let d = distance(&FeatureVector::new(a.clone()), &FeatureVector::new(b.clone())).unwrap();
            assert!(rel_close(d, &oracle_distance(&a, &b), 1, REL_1E9), "spread {spread}: {d}");
        }
    }
}

#[test]
fn nearly_equal_vectors_keep_relative_accuracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = random_vec(&mut rng, 2048, 1.0);
    let b: Vec<f64> = a.iter().map(|x| x + rng.random_range(-1e-9..1e-9)).collect();
    let d = distance(&FeatureVector::new(a.clone()), &FeatureVector::new(b.clone())).unwrap();
    assert!(rel_close(d, &oracle_distance(&a, &b), 1, REL_1E9));
}

#[test]
fn three_vector_class_mean() {
    let class = vec![vec![1.0, 2.0, 2.0], vec![-1.0, 0.5, 0.0], vec![0.0, 0.0, 7.0]];
    let z = vec![0.25, -1.0, 3.0];
    let got = class_mean_distance(&features(&class), &FeatureVector::new(z.clone())).unwrap();
    let (num, den) = oracle_class_mean(&class, &z);
    assert!(rel_close(got, &num, den, REL_1E9));
}

#[test]
fn two_by_three_grand_mean() {
    let sem = vec![vec![0.0, 1.0], vec![2.0, -1.0]];
    let tex = vec![vec![3.0, 3.0], vec![-2.0, 0.0], vec![0.5, 0.5]];
    let got = texture_relevance(&features(&sem), &features(&tex)).unwrap();
    let (num, den) = oracle_relevance(&sem, &tex);
    assert!(rel_close(got, &num, den, REL_1E9));
}

#[test]
fn random_small_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let dim = rng.random_range(1..=64);
        let spread = [1e-6, 1.0, 1e6][rng.random_range(0..3)];
        let sem: Vec<Vec<f64>> = (0..rng.random_range(1..=5)).map(|_| random_vec(&mut rng, dim, spread)).collect();
        let tex: Vec<Vec<f64>> = (0..rng.random_range(1..=5)).map(|_| random_vec(&mut rng, dim, spread)).collect();
        let z = &tex[0];
        let got = class_mean_distance(&features(&sem), &FeatureVector::new(z.clone())).unwrap();
        let (num, den) = oracle_class_mean(&sem, z);
        assert!(rel_close(got, &num, den, REL_1E9));
        let got = texture_relevance(&features(&sem), &features(&tex)).unwrap();
        let (num, den) = oracle_relevance(&sem, &tex);
        assert!(rel_close(got, &num, den, REL_1E9));
    }
}
