//! Helpers shared by the integration tests: an exact fixed-point oracle for
//! Euclidean distances and seeded random fixtures.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Float, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use texplain::saliency::FeatureVector;

/// Every finite f64 is an integer multiple of 2^-1074, so shifting by this
/// many bits makes all inputs exact integers.
const SCALE: usize = 1100;
/// Extra fraction bits kept by the integer square root.
const EXTRA: usize = 200;

pub fn exact(x: f64) -> BigInt {
    let (mantissa, exponent, sign) = Float::integer_decode(x);
    let v = BigInt::from(mantissa) << (exponent as i64 + SCALE as i64) as usize;
    if sign < 0 {
        -v
    } else {
        v
    }
}

/// Euclidean distance as a fixed-point integer with `SCALE + EXTRA` fraction
/// bits, exact up to the final floor of the square root.
pub fn oracle_distance(a: &[f64], b: &[f64]) -> BigInt {
    let sum: BigInt = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = exact(*x) - exact(*y);
            &d * &d
        })
        .sum();
    (sum << (2 * EXTRA)).sqrt()
}

/// Checks `value ≈ num / (den · 2^(SCALE+EXTRA))` within `rel` relative error.
pub fn rel_close(value: f64, num: &BigInt, den: u64, rel_inv: u64) -> bool {
    let lhs = (exact(value) << EXTRA) * BigInt::from(den);
    let err = (lhs - num).abs();
    if num.is_zero() {
        return err.is_zero();
    }
    err * BigInt::from(rel_inv) <= num.abs()
}

/// Oracle for the mean distance from `z` to the members of `class`, returned
/// as a numerator over `class.len()`.
pub fn oracle_class_mean(class: &[Vec<f64>], z: &[f64]) -> (BigInt, u64) {
    let num = class.iter().map(|c| oracle_distance(c, z)).sum();
    (num, class.len() as u64)
}

/// Oracle for the grand mean over all cross pairs.
pub fn oracle_relevance(sem: &[Vec<f64>], tex: &[Vec<f64>]) -> (BigInt, u64) {
    let num = tex
        .iter()
        .flat_map(|t| sem.iter().map(move |s| oracle_distance(s, t)))
        .sum();
    (num, (sem.len() * tex.len()) as u64)
}

pub fn random_vec(rng: &mut ChaCha8Rng, dim: usize, spread: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-spread..spread)).collect()
}

pub fn features(vs: &[Vec<f64>]) -> Vec<FeatureVector> {
    vs.iter().map(|v| FeatureVector::new(v.clone())).collect()
}
