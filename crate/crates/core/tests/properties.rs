use proptest::prelude::*;

use msn_core::msn::{backtrack, num_selections, search_radius, spawn_probe, step, update_integrity, MsnState, NoiseKind, RoleTag};
use msn_core::objectives::FnObjective;
use msn_core::optimizer::{evaluate_pool, Control, TerminationRule};
use msn_core::vecmath::canberra_distance;
use msn_core::{msn, Msn, MsnConfig, Objective, ParameterVector, RngHandle};

fn small_config(anchors: usize, probes: usize, pool_extra: usize, min_distance: f64, noise: NoiseKind) -> MsnConfig {
    MsnConfig {
        pool_size: 1 + anchors + anchors * probes + pool_extra,
        num_anchors: anchors,
        probes_per_anchor: probes,
        min_distance,
        noise,
        ..MsnConfig::default()
    }
}

fn bumpy(p: &[f64]) -> f64 {
    -p.iter().map(|x| x * x + (3.0 * x).sin()).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generations_keep_their_invariants(
        seed in any::<u64>(),
        dim in 2usize..12,
        anchors in 1usize..5,
        probes in 1usize..6,
        extra in 0usize..6,
        min_distance in 0.01f64..2.0,
    ) {
        let cfg = small_config(anchors, probes, extra, min_distance, NoiseKind::Uniform);
        let obj = FnObjective::new(dim, bumpy);
        let mut opt = Msn::new(cfg.clone(), &obj, seed).unwrap();
        let mut last_elite = f64::NEG_INFINITY;
        for _ in 0..25 {
            let rewards = evaluate_pool(&obj, &opt.pool().members, false).unwrap();
            let before = opt.pool().clone();
            opt.tell(&rewards).unwrap();
            let (state, pool) = (opt.state(), opt.pool());

            prop_assert_eq!(pool.len(), cfg.pool_size);
            prop_assert_eq!(pool.count(|r| *r == RoleTag::Elite), 1);
            let elite = state.elite.as_ref().unwrap();
            prop_assert!(elite.reward >= last_elite);
            last_elite = elite.reward;
            prop_assert_eq!(&pool.members[0], &elite.params);

            // anchors are copies of evaluated samples or of the elite
            for a in &state.anchors {
                prop_assert!(before.members.contains(&a.params) || a.params == elite.params);
            }
            let radius = search_radius(state.integrity, cfg.lambda, state.effective_lr);
            let k = num_selections(state.integrity, state.effective_alpha, cfg.beta, dim);
            for (m, role) in pool.members.iter().zip(&pool.roles) {
                if let RoleTag::Probe(i) = role {
                    let anchor = &state.anchors[*i].params;
                    let moved = m.iter().zip(anchor.iter()).filter(|(x, y)| x != y).count();
                    prop_assert!(moved <= k);
                    prop_assert!(m.iter().zip(anchor.iter()).all(|(x, y)| (x - y).abs() < radius));
                }
            }
        }
    }

    #[test]
    fn admitted_anchors_are_separated(seed in any::<u64>(), min_distance in 0.1f64..3.0) {
        let obj = FnObjective::new(4, bumpy);
        let samples: Vec<ParameterVector> = (0..40).map(|i| obj.initial_params(RngHandle::new(seed, i))).collect();
        let rewards: Vec<f64> = samples.iter().map(|s| bumpy(s)).collect();
        let idx = msn_core::msn::select_anchors(&samples, &rewards, 6, min_distance);
        prop_assert!(!idx.is_empty());
        let best = rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(rewards[idx[0]], best);
        for (i, &a) in idx.iter().enumerate() {
            for &b in &idx[..i] {
                prop_assert!(canberra_distance(&samples[a], &samples[b]).unwrap() >= min_distance);
            }
        }
    }

    #[test]
    fn gaussian_probes_touch_at_most_k_coordinates(seed in any::<u64>(), k in 1usize..10, radius in 0.01f64..3.0) {
        let anchor = ParameterVector::new((0..10).map(|i| i as f64).collect());
        let p = spawn_probe(&anchor, radius, k, NoiseKind::Gaussian, RngHandle::from_seed(seed));
        prop_assert!(p.iter().zip(anchor.iter()).filter(|(x, y)| x != y).count() <= k);
    }

    #[test]
    fn integrity_stays_in_unit_interval(
        start in 0.0f64..=1.0,
        step_size in 0.0f64..0.5,
        best in -10.0f64..10.0,
        gen_best in -10.0f64..10.0,
    ) {
        let cfg = MsnConfig { step_size, ..MsnConfig::default() };
        let mut state = MsnState::new(&cfg, RngHandle::from_seed(0));
        state.integrity = start;
        state.elite = Some(msn_core::msn::Elite { params: ParameterVector::zeros(1), reward: best });
        let next = update_integrity(&cfg, &state, gen_best);
        prop_assert!((0.0..=1.0).contains(&next.integrity));
        prop_assert!(next.integrity <= start);
        let mut exhausted = next.clone();
        exhausted.fail_count = cfg.patience;
        let reset = backtrack(&cfg, &exhausted);
        prop_assert_eq!(reset.integrity, 1.0);
        prop_assert_eq!(reset.fail_count, 0);
    }
}

#[test]
fn constant_objective_backtracks_every_patience_generations() {
    for patience in [1, 3, 10] {
        let cfg = MsnConfig {
            patience,
            ..MsnConfig::default()
        };
        let obj = FnObjective::new(3, |_: &[f64]| -1.0);
        let mut opt = Msn::new(cfg.clone(), &obj, 2).unwrap();
        let mut resets = Vec::new();
        let mut fails = Vec::new();
        for g in 0..40 {
            opt.tell(&vec![-1.0; cfg.pool_size]).unwrap();
            if opt.state().integrity == 1.0 {
                resets.push(g);
            }
            fails.push(opt.state().fail_count);
        }
        assert_eq!(resets, (0..40).step_by(patience).collect::<Vec<_>>(), "patience {patience}");
        assert!(fails.iter().all(|&f| f < patience));
    }
}

#[test]
fn step_is_a_pure_function_of_its_inputs() {
    let cfg = MsnConfig::default();
    let obj = FnObjective::new(5, bumpy);
    let opt = Msn::new(cfg.clone(), &obj, 77).unwrap();
    let rewards = evaluate_pool(&obj, &opt.pool().members, false).unwrap();
    let a = step(&cfg, opt.state(), opt.pool(), &rewards).unwrap();
    let b = step(&cfg, opt.state(), opt.pool(), &rewards).unwrap();
    assert_eq!(a.1, b.1);
    assert_eq!(a.0.integrity, b.0.integrity);
}

#[test]
fn parallel_evaluation_is_bit_identical() {
    let obj = FnObjective::new(30, bumpy);
    let rule = TerminationRule::max_steps(60);
    let run = |parallel| msn::run_with(&obj, &MsnConfig::default(), &rule, 4, parallel, |_, _| Control::Continue).unwrap();
    let (a, b) = (run(false), run(true));
    assert_eq!(a, b);
    let c = msn::run_with(&obj, &MsnConfig::default(), &rule, 5, false, |_, _| Control::Continue).unwrap();
    assert_ne!(a.trace, c.trace);
}

#[test]
fn rejects_bad_rewards() {
    let cfg = MsnConfig::default();
    let obj = FnObjective::new(2, bumpy);
    let mut opt = Msn::new(cfg.clone(), &obj, 0).unwrap();
    assert!(opt.tell(&[0.0; 3]).is_err());
    let mut r = vec![0.0; cfg.pool_size];
    r[7] = f64::INFINITY;
    assert!(matches!(opt.tell(&r), Err(msn_core::Error::Evaluation { slot: 7, .. })));
    // a rejected tell leaves the optimizer untouched
    assert_eq!(opt.state().generation, 0);
}
