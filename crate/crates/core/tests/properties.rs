use proptest::prelude::*;

use roughlift::experiments::ExperimentConfig;
use roughlift::gaussian::{FbmBackend, FbmSampler, FBMSpec, PathSampler};
use roughlift::norms::{
    inhom_distance, n_beta_alpha, p_variation, pl_control, Control, InhomDistanceParams,
};
use roughlift::signature::{chen_product, path_signature, segment_signature, signature_coefficient};
use roughlift::words::shuffle;
use roughlift::{PairSet, Path, TimeGrid, Word};

/// Piecewise-linear path on `[0, 1]` with uneven segments.
fn path_strategy(max_segments: usize, dim: usize) -> impl Strategy<Value = Path> {
    (1..=max_segments).prop_flat_map(move |m| {
        (
            prop::collection::vec(0.1f64..1.0, m),
            prop::collection::vec(-1.5f64..1.5, (m + 1) * dim),
        )
            .prop_map(move |(gaps, values)| {
                let total: f64 = gaps.iter().sum();
                let mut times = vec![0.0];
                let mut acc = 0.0;
                for g in &gaps[..m - 1] {
                    acc += g / total;
                    times.push(acc);
                }
                times.push(1.0);
                Path::new(TimeGrid::new(times).unwrap(), dim, values).unwrap()
            })
    })
}

fn word_strategy(d: u8, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=d, 0..=max_len).prop_map(|l| Word::new(l).unwrap())
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn same_grid_pair(max_segments: usize, dim: usize) -> impl Strategy<Value = (Path, Path)> {
    path_strategy(max_segments, dim).prop_flat_map(move |x| {
        let n = x.len() * dim;
        let x2 = x.clone();
        prop::collection::vec(-1.5f64..1.5, n)
            .prop_map(move |v| (x2.clone(), Path::new(x2.grid().clone(), dim, v).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interpolation_is_exact_on_the_grid(x in path_strategy(12, 2), extra in prop::collection::vec(0.0f64..1.0, 0..10)) {
        let mut pts = x.times().to_vec();
        pts.extend(extra);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let fine = TimeGrid::new(pts).unwrap();
        let y = x.pl_interpolate(&fine).unwrap();
        let back = y.pl_interpolate(x.grid()).unwrap();
        for i in 0..x.len() {
            for c in 0..2 {
                prop_assert!((back.point(i)[c] - x.point(i)[c]).abs() <= 1e-15 * (1.0 + x.point(i)[c].abs()));
            }
        }
    }

    #[test]
    fn restrict_composes(x in path_strategy(10, 2), a in 0.0f64..0.3, b in 0.35f64..0.6, c in 0.65f64..1.0) {
        let outer = x.restrict(a, c).unwrap().restrict(a, b).unwrap();
        let direct = x.restrict(a, b).unwrap();
        prop_assert_eq!(outer.times(), direct.times());
        for (u, v) in outer.values().iter().zip(direct.values()) {
            prop_assert!((u - v).abs() <= 1e-15 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn shuffle_commutes_and_associates(u in word_strategy(3, 2), v in word_strategy(3, 2), w in word_strategy(3, 2)) {
        prop_assert_eq!(shuffle(&u, &v), shuffle(&v, &u));
        let left = shuffle(&u, &v).shuffle_with(&roughlift::ShuffleExpansion::word(w.clone()));
        let right = roughlift::ShuffleExpansion::word(u.clone()).shuffle_with(&shuffle(&v, &w));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn shuffle_mass_is_binomial(u in word_strategy(3, 4), v in word_strategy(3, 4)) {
        prop_assert_eq!(shuffle(&u, &v).mass(), binomial(u.len() + v.len(), u.len()));
    }

    #[test]
    fn shuffle_relation_on_paths(x in path_strategy(20, 3), u in word_strategy(3, 2), v in word_strategy(3, 2)) {
        let sig = path_signature(&x, 0.0, 1.0, 4).unwrap();
        let c = |w: &Word| sig.coefficient(w).unwrap();
        let lhs = c(&u) * c(&v);
        let exp = shuffle(&u, &v);
        let rhs = exp.evaluate(c);
        let mass: f64 = exp.terms().map(|(w, k)| (k as f64 * c(w)).abs()).sum();
        let length: f64 = (0..x.segments())
            .map(|a| x.point(a).iter().zip(x.point(a + 1)).map(|(p, q)| (q - p) * (q - p)).sum::<f64>().sqrt())
            .sum();
        let n = u.len() + v.len();
        let natural = length.powi(n as i32) / (1..=n).product::<usize>() as f64;
        let scale = lhs.abs().max(mass).max(natural).max(f64::MIN_POSITIVE);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn chen_identity(x in path_strategy(15, 3), split in 0.01f64..0.99) {
        let whole = path_signature(&x, 0.0, 1.0, 5).unwrap();
        let joined = chen_product(
            &path_signature(&x, 0.0, split, 5).unwrap(),
            &path_signature(&x, split, 1.0, 5).unwrap(),
        ).unwrap();
        for (a, b) in whole.coefficients().iter().zip(joined.coefficients()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn one_segment_signature_is_the_exponential(v in prop::collection::vec(-2.0f64..2.0, 2), level in 1usize..=5) {
        let grid = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let mut values = vec![0.0, 0.0];
        values.extend(&v);
        let x = Path::new(grid, 2, values).unwrap();
        let a = path_signature(&x, 0.0, 1.0, level).unwrap();
        let b = segment_signature(&v, level).unwrap();
        prop_assert_eq!(a.coefficients(), b.coefficients());
    }

    #[test]
    fn distance_is_a_pseudometric((x, y) in same_grid_pair(8, 2), seed in prop::collection::vec(-1.5f64..1.5, 18), level in 1usize..=3) {
        let z = Path::new(x.grid().clone(), 2, seed[..x.len() * 2].to_vec());
        prop_assume!(z.is_ok());
        let z = z.unwrap();
        let params = InhomDistanceParams::new(0.3, 0.4, level, PairSet::AllGridPairs).unwrap();
        let d = |a: &Path, b: &Path| inhom_distance(a, b, &params).unwrap();
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
    }

    #[test]
    fn p_variation_is_monotone(x in path_strategy(10, 2), p in 1.0f64..4.0, dp in 0.0f64..2.0, s in 0.0f64..0.4, t in 0.6f64..1.0) {
        let a = p_variation(&x, p, 0.0, 1.0).unwrap();
        let b = p_variation(&x, p + dp, 0.0, 1.0).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
        let inner = p_variation(&x, p, s, t).unwrap();
        prop_assert!(inner <= a * (1.0 + 1e-12));
    }

    #[test]
    fn variation_interpolation_inequality(x in path_strategy(10, 1), q in 1.0f64..2.5, gap in 0.1f64..3.0) {
        let p = q + gap;
        let sup = x.sup_norm();
        let lhs = p_variation(&x, p, 0.0, 1.0).unwrap().powf(p);
        let rhs = p_variation(&x, q, 0.0, 1.0).unwrap().powf(q) * (2.0 * sup).powf(p - q);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn pl_control_is_superadditive(
        pts in prop::collection::vec(0.02f64..0.98, 1..6),
        probes in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 10),
        r in 0.3f64..0.7,
        p in 1.5f64..3.0,
    ) {
        // An additive control raised to a power >= 1 is superadditive.
        let omega = Control::user((0.0, 1.0), |s, t| (t - s).powf(1.7));
        let mut grid = vec![0.0, 1.0];
        grid.extend(pts);
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let d = TimeGrid::new(grid).unwrap();
        let wd = pl_control(&omega, &d, p, r).unwrap();
        for (a, b, c) in probes {
            let mut v = [a, b, c];
            v.sort_by(f64::total_cmp);
            prop_assert!(wd.superadditivity_excess(v[0], v[1], v[2]) <= 1e-12);
        }
        prop_assert!(wd.eval(0.0, 1.0) <= omega.eval(0.0, 1.0) * (1.0 + 1e-12));
    }

    #[test]
    fn auto_level_respects_the_cap(alpha in 0.2f64..0.9, frac in 0.1f64..0.99) {
        let beta = (alpha * frac).max(0.05);
        prop_assume!(beta - 0.02 > 0.0 && beta <= alpha);
        let json = format!(
            r#"{{"kind": "kl-convergence", "model": {{"type": "fourier", "d": 1, "grid": {{"m": 16}},
               "coefficients": {{"decay": {{"c": 1.0, "alpha": 0.5, "n_max": 4}}}}}},
               "alpha": {alpha}, "beta": {beta}, "ladder": [1, 2, 4]}}"#
        );
        let cfg = ExperimentConfig::from_json(&json).unwrap();
        let n = cfg.resolved_level().unwrap();
        let raw = n_beta_alpha(beta - 0.02, alpha).unwrap();
        prop_assert!(n <= raw);
        if beta + 3.0 * alpha > 1.0 {
            prop_assert!(n <= 3);
        } else {
            prop_assert_eq!(n, raw.min(5));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn samplers_are_pure_functions_of_seed_and_index(seed in any::<u64>(), index in 0u64..1000, hurst in 0.3f64..0.9) {
        let spec = FBMSpec::new(hurst, 2, TimeGrid::uniform(1.0, 32).unwrap(), FbmBackend::Dense).unwrap();
        let sampler = FbmSampler::new(spec).unwrap();
        let a = sampler.sample(seed, index).unwrap();
        let b = sampler.sample(seed, index).unwrap();
        prop_assert_eq!(a.values(), b.values());
        let c = sampler.sample(seed, index + 1).unwrap();
        prop_assert_ne!(a.values(), c.values());
    }

    #[test]
    fn signature_coefficients_agree_with_the_dense_tensor(x in path_strategy(10, 2), w in word_strategy(2, 4), s in 0.0f64..0.5, t in 0.5f64..1.0) {
        let dense = path_signature(&x, s, t, 4).unwrap().coefficient(&w).unwrap();
        let single = signature_coefficient(&x, &w, s, t).unwrap();
        prop_assert!((dense - single).abs() <= 1e-12 * dense.abs().max(1.0));
    }
}
