use sstack::distributional::{
    all_first_probability, binomial_allowance, context_free_generalization, hard_instance, log_log_slope,
    pac_experiment, sufficient_sample_size, ContextDistribution, PacConfig, SeenSetEvaluator,
};
use sstack::polytope::Solver;
use sstack::presets::load_preset;
use sstack::rational::{int, one, rat, to_f64, Rational};

#[test]
fn pac_failure_rate_falls_and_vanishes_at_sufficient_m() {
    let trials = 200;
    for name in ["perm2", "perm3", "soa-example", "greedy-gap"] {
        let p = load_preset(name).unwrap();
        let solver = Solver::new(&p.game);
        let gamma = rat(1, 4);
        let epsilon = rat(1, 10);
        let dist = ContextDistribution::uniform(p.class.num_contexts()).unwrap();
        for target in p.class.hypotheses().iter().take(3) {
            let eval = SeenSetEvaluator::new(&solver, &p.class, dist.clone(), target.clone(), gamma.clone()).unwrap();
            let target_p = Rational::new(1.into(), (100 * trials as i64).into());
            let m_star = sufficient_sample_size(&eval, &epsilon, &target_p, 500).unwrap().expect("finite sufficient m");
            let mut sizes = vec![0, 1, 2, 4, 8];
            sizes.push(m_star);
            sizes.sort_unstable();
            sizes.dedup();
            let config = PacConfig { epsilon: epsilon.clone(), gamma: gamma.clone(), trials, sample_sizes: sizes, seed: 7 };
            let (_, summary) = pac_experiment(&eval, &config).unwrap();
            for w in summary.windows(2) {
                let (a, b) = (to_f64(&w[0].failure_rate), to_f64(&w[1].failure_rate));
                assert!(b <= a + binomial_allowance(a, b, trials), "{name}: rate rose from {a} to {b}");
                // the exact failure probability is non-increasing as well
                assert!(eval.failure_probability(w[1].m, &epsilon).unwrap() <= eval.failure_probability(w[0].m, &epsilon).unwrap());
            }
            let last = summary.iter().find(|s| s.m == m_star).unwrap();
            assert_eq!(last.failures, 0, "{name}: failures at sufficient m = {m_star}");
        }
    }
}

#[test]
fn pac_rows_are_reproducible() {
    let p = load_preset("perm3").unwrap();
    let solver = Solver::new(&p.game);
    let dist = ContextDistribution::uniform(3).unwrap();
    let eval = SeenSetEvaluator::new(&solver, &p.class, dist, p.class.hypotheses()[0].clone(), rat(1, 4)).unwrap();
    let config = PacConfig { epsilon: rat(1, 10), gamma: rat(1, 4), trials: 50, sample_sizes: vec![0, 2, 4, 8], seed: 7 };
    assert_eq!(pac_experiment(&eval, &config).unwrap(), pac_experiment(&eval, &config).unwrap());
}

#[test]
fn hard_instance_closed_forms() {
    // perm3 has no SN-shattered pair (two disjoint label pairs need four labels)
    let p3 = load_preset("perm3").unwrap();
    assert!(hard_instance(&Solver::new(&p3.game), &p3.class, &rat(1, 4), &rat(1, 64)).is_err());
    let p = load_preset("perm4").unwrap();
    let solver = Solver::new(&p.game);
    let eps = rat(1, 64);
    let inst = hard_instance(&solver, &p.class, &rat(1, 4), &eps).unwrap();
    let d = inst.witness.contexts.len();
    assert!(d >= 2);
    let masses = inst.distribution.masses();
    assert_eq!(masses[0], one() - int(16) * &eps);
    for m in &masses[1..] {
        assert_eq!(*m, int(16) * &eps / int(d as i64 - 1));
    }
    assert_eq!(masses.iter().sum::<Rational>(), one());
    // all draws landing on the heavy context
    let delta = rat(1, 10);
    let limit = ((1.0f64 / 0.1).ln() / (32.0 * to_f64(&eps))).floor() as usize;
    for m in 0..=limit {
        let pr = all_first_probability(&eps, m);
        assert_eq!(pr, num::pow(masses[0].clone(), m));
        assert!(pr > delta, "m = {m}");
    }
    assert!(hard_instance(&solver, &p.class, &rat(1, 4), &rat(1, 16)).is_err());
}

#[test]
fn erm_gap_shrinks_like_inverse_sqrt() {
    let p = load_preset("table3a").unwrap();
    let solver = Solver::new(&p.game);
    let uniform = vec![rat(1, 2), rat(1, 2)];
    let (rows, summary) = context_free_generalization(&solver, 0, &uniform, &[4, 16, 64, 256], 500, 7).unwrap();
    assert_eq!(rows.len(), 2000);
    assert!(rows.iter().all(|r| r.gap >= int(0)));
    for w in summary.windows(2) {
        assert!(w[1].mean_gap < w[0].mean_gap, "gap rose from m = {} to m = {}", w[0].m, w[1].m);
    }
    let slope = log_log_slope(&summary).expect("positive gaps");
    println!("slope {slope:.3}");
    assert!((-0.8..=-0.2).contains(&slope), "slope {slope}");
}
