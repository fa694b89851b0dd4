use proptest::prelude::*;

use texplain::correlation::{
    batch_similarity, batch_texture_profiles, cosine, texture_cps_correlations, znorm, BatchProfile, CpsVector,
    SignConvention,
};
use texplain::exchange::{read_tensor, write_tensor, Tensor};
use texplain::metric::{class_mean_distance, distance, texture_relevance, RelevanceMatrix};
use texplain::saliency::{combine_maps, normalize_map, salient_location, smoe_statistic, MapStage, SaliencyMap};
use texplain::saliency::FeatureVector;

fn tensor() -> impl Strategy<Value = Tensor> {
    prop::collection::vec(1usize..5, 1..=4).prop_flat_map(|shape| {
        let n: usize = shape.iter().product();
        prop::collection::vec(prop::num::f32::NORMAL | prop::num::f32::SUBNORMAL | prop::num::f32::ZERO, n)
            .prop_map(move |data| Tensor::new(shape.clone(), data).unwrap())
    })
}

fn vectors(count: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-100.0f64..100.0, dim), count)
}

fn fv(v: &[f64]) -> FeatureVector {
    FeatureVector::new(v.to_vec())
}

/// Non-negative activations, `C × H × W`.
fn activation() -> impl Strategy<Value = Tensor> {
    (1usize..8, 1usize..6, 1usize..6).prop_flat_map(|(c, h, w)| {
        prop::collection::vec(0.0f32..50.0, c * h * w).prop_map(move |d| Tensor::new(vec![c, h, w], d).unwrap())
    })
}

fn non_constant(min_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, min_len..40).prop_filter("needs spread", |v| {
        let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        hi - lo > 1e-3
    })
}

proptest! {
    #[test]
    fn tensor_round_trip(t in tensor()) {
        let mut bytes = Vec::new();
        write_tensor(&t, &mut bytes).unwrap();
        let back = read_tensor(bytes.as_slice()).unwrap();
        prop_assert!(back.bit_eq(&t));
        let mut again = Vec::new();
        write_tensor(&back, &mut again).unwrap();
        prop_assert_eq!(again, bytes);
    }

    #[test]
    fn distance_is_a_metric(v in vectors(3, 7)) {
        let (a, b, c) = (fv(&v[0]), fv(&v[1]), fv(&v[2]));
        let ab = distance(&a, &b).unwrap();
        prop_assert_eq!(ab, distance(&b, &a).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(distance(&a, &a).unwrap(), 0.0);
        let ac = distance(&a, &c).unwrap();
        let cb = distance(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-9 * (ac + cb));
    }

    #[test]
    fn relevance_is_symmetric_in_roles(a in vectors(3, 4), b in vectors(2, 4)) {
        let (fa, fb): (Vec<_>, Vec<_>) = (a.iter().map(|v| fv(v)).collect(), b.iter().map(|v| fv(v)).collect());
        let ab = texture_relevance(&fa, &fb).unwrap();
        let ba = texture_relevance(&fb, &fa).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
    }

    #[test]
    fn duplicating_a_class_keeps_its_mean(a in vectors(4, 5), z in prop::collection::vec(-100.0f64..100.0, 5)) {
        let class: Vec<_> = a.iter().map(|v| fv(v)).collect();
        let doubled: Vec<_> = class.iter().chain(&class).cloned().collect();
        let once = class_mean_distance(&class, &fv(&z)).unwrap();
        let twice = class_mean_distance(&doubled, &fv(&z)).unwrap();
        prop_assert!((once - twice).abs() <= 1e-12 * once.max(1.0));
    }

    #[test]
    fn znorm_ignores_positive_affine_maps(v in non_constant(2), a in 1e-3f64..10.0, b in -10.0f64..10.0) {
        let base = znorm(&v, "v").unwrap();
        let moved: Vec<f64> = v.iter().map(|x| a * x + b).collect();
        let z = znorm(&moved, "moved").unwrap();
        for (x, y) in base.iter().zip(&z) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let sd = (z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        prop_assert!(mean.abs() <= 1e-9 && (sd - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn cosine_is_symmetric_and_bounded(w in non_constant(3), shift in -5.0f64..5.0) {
        let y: Vec<f64> = w.iter().rev().map(|x| x + shift).collect();
        if let (Ok(a), Ok(b)) = (cosine(&w, &y), cosine(&y, &w)) {
            prop_assert_eq!(a, b);
            prop_assert!((-1.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn correlations_flip_sign_and_ignore_class_order(
        values in prop::collection::vec(0.0f64..10.0, 12),
        cps in non_constant(4).prop_map(|v| v[..4].to_vec()),
        rotate in 0usize..4,
    ) {
        prop_assume!(cps.iter().any(|&c| c != cps[0]));
        let ids: Vec<String> = (0..4).map(|i| format!("c{i}")).collect();
        let tex: Vec<String> = vec!["t0".into(), "t1".into(), "t2".into()];
        let r = RelevanceMatrix::new(ids.clone(), tex.clone(), values.clone()).unwrap();
        let cv = CpsVector::new(ids.iter().cloned().zip(cps.iter().copied()).collect()).unwrap();
        let sim = texture_cps_correlations(&r, &cv, SignConvention::Similarity).unwrap();
        let dist = texture_cps_correlations(&r, &cv, SignConvention::Distance).unwrap();
        for e in &sim.entries {
            prop_assert!((-1.0..=1.0).contains(&e.s));
            let d = dist.get(&e.texture_id).unwrap();
            prop_assert!(e.s == -d.s || (e.degenerate && d.degenerate));
        }

        // renaming classes so that canonical order rotates permutes rows and cps together
        let renamed: Vec<String> = (0..4).map(|i| format!("c{}", (i + rotate) % 4)).collect();
        let mut rows: Vec<(String, &[f64], f64)> =
            (0..4).map(|i| (renamed[i].clone(), &values[3 * i..3 * i + 3], cps[i])).collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.1.iter().copied()).collect();
        let r2 = RelevanceMatrix::new(rows.iter().map(|r| r.0.clone()).collect(), tex, flat).unwrap();
        let cv2 = CpsVector::new(rows.iter().map(|r| (r.0.clone(), r.2)).collect()).unwrap();
        let permuted = texture_cps_correlations(&r2, &cv2, SignConvention::Similarity).unwrap();
        for e in &sim.entries {
            let p = permuted.get(&e.texture_id).unwrap();
            prop_assert!((e.s - p.s).abs() <= 1e-12, "{} vs {}", e.s, p.s);
        }
    }

    #[test]
    fn batch_similarity_is_symmetric_with_unit_diagonal(values in prop::collection::vec(0.0f64..10.0, 20)) {
        let ids: Vec<String> = (0..4).map(|i| format!("c{i}")).collect();
        let tex: Vec<String> = (0..5).map(|i| format!("t{i}")).collect();
        let r = RelevanceMatrix::new(ids.clone(), tex, values).unwrap();
        let cv = CpsVector::new(ids.into_iter().zip([1.0, 2.0, 3.0, 5.0]).collect()).unwrap();
        let Ok(profiles) = batch_texture_profiles(&r, &cv, SignConvention::Similarity) else {
            return Ok(());
        };
        let m = batch_similarity(&profiles).unwrap();
        for i in 0..4 {
            prop_assert!((m.get(i, i) - 1.0).abs() <= 1e-12);
            for j in 0..4 {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn smoe_argmax_survives_positive_scaling(t in activation(), c in prop::sample::select(vec![0.1f32, 3.0, 1000.0])) {
        let scaled = Tensor::new(t.shape().to_vec(), t.data().iter().map(|v| v * c).collect()).unwrap();
        let a = smoe_statistic(&t, 1).unwrap();
        let b = smoe_statistic(&scaled, 1).unwrap();
        // the epsilon clamp is the only thing that does not scale; skip near ties
        let mut sorted = a.values().to_vec();
        sorted.sort_by(|x, y| y.total_cmp(x));
        prop_assume!(sorted.len() < 2 || sorted[0] - sorted[1] > 1e-6 * sorted[0].abs().max(1e-3));
        prop_assert_eq!(salient_location(&a), salient_location(&b));
    }

    #[test]
    fn normalize_keeps_order(v in prop::collection::vec(-1e3f64..1e3, 1..30)) {
        let m = SaliencyMap::new(1, v.len(), v.clone(), MapStage::Stage(2)).unwrap();
        let n = normalize_map(&m);
        for i in 0..v.len() {
            prop_assert!((0.0..=1.0).contains(&n.values()[i]));
            for j in 0..v.len() {
                if v[i] < v[j] {
                    prop_assert!(n.values()[i] <= n.values()[j]);
                }
            }
        }
    }

    #[test]
    fn combined_map_stays_within_input_range(
        seeds in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 16), 5),
        raw in prop::collection::vec(0.01f64..1.0, 5),
    ) {
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        prop_assume!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let sides = [4usize, 4, 2, 2, 1];
        let maps: Vec<SaliencyMap> = seeds
            .iter()
            .zip(sides)
            .map(|(s, side)| normalize_map(&SaliencyMap::new(side, side, s[..side * side].to_vec(), MapStage::Stage(1)).unwrap()))
            .collect();
        let lo = maps.iter().flat_map(|m| m.values()).cloned().fold(f64::MAX, f64::min);
        let hi = maps.iter().flat_map(|m| m.values()).cloned().fold(f64::MIN, f64::max);
        let out = combine_maps(&maps, (4, 4), &weights).unwrap();
        for v in out.values() {
            prop_assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
        }
    }
}

#[test]
fn identical_profiles_give_all_ones() {
    let p = BatchProfile { class_id: "a".into(), cps: 1.0, values: vec![1.0, -1.0, 0.5] };
    let profiles: Vec<_> = ["a", "b", "c"].iter().map(|id| BatchProfile { class_id: id.to_string(), ..p.clone() }).collect();
    let m = batch_similarity(&profiles).unwrap();
    assert!(m.values().iter().all(|v| (v - 1.0).abs() <= 1e-12));
}
