use brwss::ballot::{ballot_exact, BallotQuery};
use brwss::hypercube::{log_sphere_size, transition_log_prob, ModelParams};
use brwss::numerics::{lambert_w0, predict_fast, regime_constants, solve_first_moment, SolverConfig};
use brwss::simulator::{run_ensemble, run_replica, simulate_cover_time, survived_barrier, replica_rng, SimConfig, SimMode};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transition_probabilities_sum_to_one(b in 2u32..6, d in 1usize..300, t in 1e-3f64..1e3) {
        let p = ModelParams::from_rho(b, d, 1.5).unwrap();
        let terms: Vec<f64> = (0..=d)
            .map(|m| log_sphere_size(d as u64, b, m as u64).unwrap() + transition_log_prob(&p, m, t).unwrap().0)
            .collect();
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = terms.iter().map(|x| (x - top).exp()).sum();
        prop_assert!(((top + sum.ln()).exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn transition_probability_decreases_with_distance(b in 2u32..6, d in 2usize..200, t in 1e-2f64..1e2) {
        let p = ModelParams::from_rho(b, d, 1.5).unwrap();
        let q: Vec<f64> = (0..=d).map(|m| transition_log_prob(&p, m, t).unwrap().0).collect();
        prop_assert!(q.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn lambert_inverts(x in 1e-8f64..1e12) {
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.max(1.0));
    }

    #[test]
    fn x0_decreases_and_r_increases_in_rho(b in 2u32..8, rho in 1.01f64..2.6, step in 1e-3f64..0.1) {
        let lo = regime_constants(b, rho).unwrap();
        let hi = regime_constants(b, rho + step).unwrap();
        prop_assert!(hi.x0 < lo.x0);
        prop_assert!(hi.r > lo.r);
    }

    #[test]
    fn root_increases_with_distance(b in 2u32..5, d in 10usize..500, rho in 1.1f64..8.0) {
        prop_assume!((rho.ln() - 1.0).abs() > 1e-3);
        let p = ModelParams::from_rho(b, d, rho).unwrap();
        let t1 = solve_first_moment(&p, 1).unwrap();
        let t2 = solve_first_moment(&p, 2).unwrap();
        prop_assert!(0.0 < t1 && t1 < t2);
    }

    #[test]
    fn fast_prediction_satisfies_identity(d in 100usize..1_000_000, rho in 2.8f64..50.0, m in 1usize..30) {
        let p = ModelParams::from_rho(2, d, rho).unwrap();
        let t = predict_fast(&p, m, &SolverConfig::default()).unwrap().t_predicted;
        let res = t * (rho.ln() - 1.0) + m as f64 * (t / d as f64).ln();
        prop_assert!(res.abs() <= 1e-9 * (1.0 + t));
    }

    #[test]
    fn ballot_probability_monotone_in_barrier(n in 1usize..60, a in 0.1f64..5.0, da in 0.0f64..2.0, db in 0.0f64..2.0) {
        let b_end = a + 1.0;
        let low = ballot_exact(&BallotQuery::new(n, a, b_end).unwrap()).unwrap();
        let high = ballot_exact(&BallotQuery::new(n, a + da, b_end + db).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&low));
        prop_assert!(high >= low - 1e-12);
    }

    #[test]
    fn barrier_survival_is_kept_when_jumps_move_later(
        mut times in prop::collection::vec(0.0f64..1.0, 0..8),
        m in 1usize..8,
    ) {
        times.sort_by(f64::total_cmp);
        let later: Vec<f64> = times.iter().map(|s| s + 0.5 * (1.0 - s)).collect();
        if survived_barrier(&times, m, 1.0).unwrap() {
            prop_assert!(survived_barrier(&later, m, 1.0).unwrap());
        }
        if times.len() > m {
            prop_assert!(!survived_barrier(&times, m, 1.0).unwrap());
        }
    }

    #[test]
    fn replica_does_not_depend_on_ensemble(seed in any::<u64>(), index in 0u64..20) {
        let p = ModelParams::from_rho(2, 6, 1.5).unwrap();
        let cfg = SimConfig::new(p, 2).unwrap().with_seed(seed).with_replicas(20);
        let stats = run_ensemble(&cfg).unwrap();
        prop_assert_eq!(run_replica(&cfg, index).unwrap(), stats.samples[index as usize].clone());
    }
}

#[test]
fn start_on_target_hits_at_zero() {
    let p = ModelParams::from_rho(2, 8, 1.5).unwrap();
    for mode in [SimMode::Projected, SimMode::FullGenotype] {
        let cfg = SimConfig::new(p, 0).unwrap().with_mode(mode).with_replicas(5);
        let stats = run_ensemble(&cfg).unwrap();
        assert!(stats.samples.iter().all(|s| s.hit_time == Some(0.0)), "{mode:?}");
    }
}

#[test]
fn cover_of_single_edge_is_first_mutation() {
    // with d = 1 and b = 2 the first mutation visits the only other vertex
    let p = ModelParams::new(2, 1, 0.5, 1.0).unwrap();
    let cfg = SimConfig::cover(p).unwrap().with_t_max(1e6);
    let n = 4000;
    let mean = (0..n)
        .map(|i| simulate_cover_time(&cfg, &mut replica_rng(3, i)).unwrap().hit_time.unwrap())
        .sum::<f64>()
        / n as f64;
    // each event is a mutation with probability 1/3; before the k-th event
    // the population is k, so E = sum_k 3^-k / (1.5 (k + 1)) = 2 log 1.5
    assert!((mean - 2.0 * 1.5f64.ln()).abs() < 0.05, "mean {mean}");
}

#[test]
fn projected_and_full_medians_agree() {
    let p = ModelParams::from_rho(3, 5, 1.8).unwrap();
    let median = |mode, seed| {
        let cfg = SimConfig::new(p, 3).unwrap().with_mode(mode).with_replicas(4000).with_seed(seed);
        run_ensemble(&cfg).unwrap().median().unwrap()
    };
    let (a, b) = (median(SimMode::Projected, 1), median(SimMode::FullGenotype, 2));
    assert!((a - b).abs() < 0.1 * a, "{a} vs {b}");
}
