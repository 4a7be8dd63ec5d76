mod common;

use common::{all_families, small_observation, theta_at};
use efseg::dp::BRUTE_FORCE_MAX_N;
use efseg::select::penalty_shape;
use efseg::*;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = FamilySpec> {
    proptest::sample::select(all_families())
}

fn family_and_theta() -> impl Strategy<Value = (FamilySpec, Vec<f64>)> {
    family().prop_flat_map(|spec| {
        proptest::collection::vec(0.0..=1.0f64, spec.dim())
            .prop_map(move |u| (spec, theta_at(&spec, &u)))
    })
}

fn partition(n: usize) -> impl Strategy<Value = Partition> {
    proptest::collection::btree_set(1..n, 0..n.min(8)).prop_map(move |s| {
        let breaks: Vec<usize> = s.into_iter().collect();
        Partition::from_breaks(n, &breaks).unwrap()
    })
}

proptest! {
    #[test]
    fn gradient_round_trip((spec, theta) in family_and_theta()) {
        let mu = spec.grad_log_partition(&theta).unwrap();
        let back = spec.inv_grad_log_partition(&mu).unwrap();
        for (a, b) in theta.iter().zip(back.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{spec:?}: {a} vs {b}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences((spec, theta) in family_and_theta()) {
        let grad = spec.grad_log_partition(&theta).unwrap();
        for i in 0..theta.len() {
            let h = 1e-4 * theta[i].abs().max(1.0);
            let at = |delta: f64| {
                let mut t = theta.clone();
                t[i] += delta;
                spec.log_partition(&t).unwrap()
            };
            let fd = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
            prop_assert!((fd - grad[i]).abs() <= 1e-6 * grad[i].abs().max(1.0), "{spec:?} {i}: {fd} vs {}", grad[i]);
        }
    }

    #[test]
    fn divergences_are_bounded(((spec, a), u) in family_and_theta().prop_flat_map(|(s, t)| {
        (Just((s, t)), proptest::collection::vec(0.0..=1.0f64, s.dim()))
    })) {
        let b = theta_at(&spec, &u);
        let kl = spec.kullback(&a, &b).unwrap();
        let h = spec.hellinger_sq(&a, &b).unwrap();
        prop_assert!(kl >= 0.0);
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert!(spec.kullback(&a, &a).unwrap().abs() < 1e-12);
        prop_assert!(spec.hellinger_sq(&a, &a).unwrap().abs() < 1e-12);
        // h² ≤ KL/2 follows from Pinsker-type bounds on the Bhattacharyya affinity
        prop_assert!(h <= kl / 2.0 + 1e-9, "h²={h} KL={kl}");
        prop_assert!((spec.hellinger_sq(&b, &a).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn segment_cost_is_optimal((spec, theta) in family_and_theta(), codes in proptest::collection::vec(any::<u8>(), 2..20)) {
        let data: Vec<f64> = codes.iter().map(|&c| small_observation(&spec, c)).collect();
        let prefix = PrefixStats::build(spec, &data).unwrap();
        let Ok(cost) = prefix.cost(0, data.len()) else { return Ok(()) };
        // the contrast at any parameter is at least the minimal one
        let sum = prefix.segment_sum(0, data.len());
        let len = data.len() as f64;
        let contrast = len * spec.log_partition(&theta).unwrap()
            - theta.iter().zip(sum.iter()).map(|(t, s)| t * s).sum::<f64>();
        prop_assert!(contrast >= cost - 1e-9 * (1.0 + cost.abs()), "{contrast} < {cost}");
    }

    #[test]
    fn dp_matches_brute_force(
        spec in proptest::sample::select(vec![
            FamilySpec::Poisson,
            FamilySpec::Exponential,
            FamilySpec::Categorical { dim: 3 },
            FamilySpec::Binomial { trials: 3 },
        ]),
        codes in proptest::collection::vec(any::<u8>(), 2..=BRUTE_FORCE_MAX_N.min(12)),
        kmax in 1usize..5,
        min_len in 1usize..3,
    ) {
        let data: Vec<f64> = codes.iter().map(|&c| small_observation(&spec, c)).collect();
        let n = data.len();
        prop_assume!(kmax * min_len <= n);
        let prefix = PrefixStats::build(spec, &data).unwrap();
        let pruned = segment_neighborhood(&prefix, kmax, min_len, true).unwrap();
        let plain = segment_neighborhood(&prefix, kmax, min_len, false).unwrap();
        for k in 1..=kmax {
            let (c, p) = brute_force_best(&prefix, k, min_len).unwrap();
            for curve in [&pruned, &plain] {
                prop_assert!((curve.cost(k).unwrap() - c).abs() <= 1e-9 * (1.0 + c.abs()));
                prop_assert_eq!(curve.argmin(k).unwrap(), &p);
            }
        }
    }

    #[test]
    fn cost_curve_is_nonincreasing(codes in proptest::collection::vec(any::<u8>(), 30..120), kmax in 1usize..12) {
        let data: Vec<f64> = codes.iter().map(|&c| 1.0 + c as f64 / 16.0).collect();
        let prefix = PrefixStats::build(FamilySpec::Exponential, &data).unwrap();
        let curve = segment_neighborhood(&prefix, kmax, 1, true).unwrap();
        let costs: Vec<f64> = curve.feasible().map(|(_, c)| c).collect();
        for w in costs.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()));
        }
        if kmax * 3 > data.len() {
            prop_assert!(matches!(segment_neighborhood(&prefix, kmax, 3, true), Err(Error::Infeasible(_))));
            return Ok(());
        }
        let constrained = segment_neighborhood(&prefix, kmax, 3, true).unwrap();
        for k in 1..=kmax {
            prop_assert!(constrained.argmin(k).unwrap().min_segment_len() >= 3);
            prop_assert!(constrained.cost(k).unwrap() >= curve.cost(k).unwrap() - 1e-9);
        }
    }

    #[test]
    fn grid_search_is_consistent(codes in proptest::collection::vec(any::<u8>(), 10..80), kmax in 1usize..8, budget in 1usize..20) {
        let data: Vec<f64> = codes.iter().map(|&c| (c % 5) as f64 + if c > 200 { 10.0 } else { 0.0 }).collect();
        let n = data.len();
        let prefix = PrefixStats::build(FamilySpec::Poisson, &data).unwrap();
        let full = segment_neighborhood(&prefix, kmax, 1, true).unwrap();
        let every: Vec<usize> = (1..n).collect();
        let grid = dp_on_grid(&prefix, &every, kmax, 1).unwrap();
        for k in 1..=kmax {
            prop_assert_eq!(grid.cost(k), full.cost(k));
            prop_assert_eq!(grid.argmin(k), full.argmin(k));
        }
        let cands = greedy_binary_candidates(&prefix, budget, 1, 0.0).unwrap();
        prop_assert!(cands.gains.iter().all(|&g| g >= -1e-9));
        let restricted = dp_on_grid(&prefix, &cands.positions, kmax, 1).unwrap();
        for k in 1..=kmax {
            if let Some(c) = restricted.cost(k) {
                prop_assert!(c >= full.cost(k).unwrap() - 1e-9 * (1.0 + c.abs()));
                let used = restricted.argmin(k).unwrap().breaks().iter().all(|b| cands.positions.contains(b));
                prop_assert!(used);
            }
        }
    }

    #[test]
    fn hausdorff_is_a_metric((a, b, c) in (5usize..200).prop_flat_map(|n| (partition(n), partition(n), partition(n)))) {
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff(&b, &a).unwrap());
        prop_assert!(hausdorff(&a, &c).unwrap() <= ab + hausdorff(&b, &c).unwrap());
        prop_assert_eq!(hausdorff(&a, &a).unwrap(), 0);
    }

    #[test]
    fn refinement_reduces_divergence(a in partition(100), b in partition(100), extra in proptest::collection::btree_set(1usize..100, 0..5)) {
        let mut refined: Vec<usize> = a.breaks().to_vec();
        refined.extend(extra);
        refined.sort_unstable();
        refined.dedup();
        let fine = Partition::from_breaks(100, &refined).unwrap();
        prop_assert!(partition_divergence(&fine, &b).unwrap() <= partition_divergence(&a, &b).unwrap());
        prop_assert!(partition_divergence(&b, &fine).unwrap() >= partition_divergence(&b, &a).unwrap());
    }

    #[test]
    fn penalty_is_increasing(n in 20usize..100_000, d in 1usize..5) {
        let kmax = n.min(200);
        let mut prev = 0.0;
        for k in 1..=kmax {
            let p = penalty_value(n, k, d, 1.0).unwrap();
            prop_assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn selected_dimension_decreases_with_beta(codes in proptest::collection::vec(any::<u8>(), 40..100)) {
        let data: Vec<f64> = codes.iter().enumerate().map(|(i, &c)| (c % 4) as f64 + if i % 20 < 10 { 0.0 } else { 6.0 }).collect();
        let n = data.len();
        let prefix = PrefixStats::build(FamilySpec::Poisson, &data).unwrap();
        let curve = segment_neighborhood(&prefix, 10, 1, true).unwrap();
        let mut prev = usize::MAX;
        for i in 0..60 {
            let beta = 1e-4 * 1.3f64.powi(i);
            let k = select_fixed_beta(&curve, n, 1, beta).unwrap().k_hat;
            prop_assert!(k <= prev);
            prev = k;
        }
    }

    #[test]
    fn scaling_costs_preserves_selection(scale in 0.01f64..100.0, beta in 0.001f64..1.0) {
        let n = 5000;
        let costs: Vec<f64> = (1..=30)
            .map(|k| 3e3 * (12usize.saturating_sub(k)) as f64 - 0.4 * penalty_shape(n, k, 1, 1.1).unwrap())
            .collect();
        let curve = CostCurve::from_costs(n, &costs);
        let a = select_fixed_beta(&curve, n, 1, beta).unwrap();
        let b = select_fixed_beta(&curve.scaled(scale), n, 1, beta * scale).unwrap();
        prop_assert_eq!(a.k_hat, b.k_hat);
        for method in [CalibrationMethod::DimensionJump, CalibrationMethod::SlopeFit] {
            let a = calibrate_slope_heuristic(&curve, n, 1, method).unwrap();
            let b = calibrate_slope_heuristic(&curve.scaled(scale), n, 1, method).unwrap();
            prop_assert_eq!(a.k_hat, b.k_hat);
            prop_assert!((b.beta_hat - scale * a.beta_hat).abs() <= 1e-9 * b.beta_hat);
        }
    }
}
