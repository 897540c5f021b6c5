use sstack::decision_list::{
    all_inputs, mistake_bound, run_dl_adversarial, run_dl_online, DecisionList, Demotion, Literal, Rule,
};

/// Every decision list over `n` variables and `k` labels with exactly `len` rules.
fn all_lists(n: usize, k: usize, len: usize) -> Vec<DecisionList> {
    let rules: Vec<Rule> = (0..n)
        .flat_map(|var| [false, true].map(|polarity| Literal { var, polarity }))
        .flat_map(|literal| (0..k).map(move |label| Rule { literal, label }))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; len];
    loop {
        for d in 0..k {
            out.push(DecisionList::new(n, k, idx.iter().map(|&i| rules[i]).collect(), d).unwrap());
        }
        let mut p = 0;
        loop {
            if p == len {
                return out;
            }
            idx[p] += 1;
            if idx[p] < rules.len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// Independent learner: each rule carries a level number; prediction takes
/// the lowest level with a satisfied rule, first in (var, polarity, label)
/// order; wrong satisfied rules at that level move one level down.
fn oracle_mistakes(n: usize, k: usize, target: &DecisionList, stream: &[Vec<bool>]) -> usize {
    let mut rules: Vec<(usize, bool, usize, usize)> = Vec::new();
    for var in 0..n {
        for pol in [false, true] {
            for label in 0..k {
                rules.push((var, pol, label, 0));
            }
        }
    }
    let mut mistakes = 0;
    for z in stream {
        let truth = target.evaluate(z).unwrap();
        let fired = rules
            .iter()
            .filter(|r| z[r.0] == r.1)
            .min_by_key(|r| (r.3, r.0, r.1, r.2))
            .copied()
            .unwrap();
        if fired.2 == truth {
            continue;
        }
        mistakes += 1;
        let level = fired.3;
        for r in rules.iter_mut() {
            if r.3 == level && z[r.0] == r.1 && r.2 != truth {
                r.3 += 1;
            }
        }
        // empty levels collapse
        let mut used: Vec<usize> = rules.iter().map(|r| r.3).collect();
        used.sort_unstable();
        used.dedup();
        for r in rules.iter_mut() {
            r.3 = used.binary_search(&r.3).unwrap();
        }
    }
    mistakes
}

#[test]
fn exhaustive_targets_respect_mistake_bound() {
    let start = std::time::Instant::now();
    let mut targets = 0;
    let mut worst_ratio = 0.0f64;
    for n in 1..=3 {
        let inputs = all_inputs(n);
        let cycled: Vec<Vec<bool>> = (0..100).flat_map(|_| inputs.iter().cloned()).collect();
        for k in 1..=3 {
            for len in 0..=3 {
                let bound = mistake_bound(n, k, len);
                for target in all_lists(n, k, len) {
                    targets += 1;
                    let adv = run_dl_adversarial(n, k, &target, Demotion::MergeNext).unwrap();
                    assert!(adv.mistakes <= bound, "adversarial {} > {bound} for {}", adv.mistakes, target.to_json());
                    let cyc = run_dl_online(n, k, &target, &cycled).unwrap();
                    assert!(cyc.mistakes <= bound);
                    assert_eq!(cyc.mistakes, oracle_mistakes(n, k, &target, &cycled), "{}", target.to_json());
                    // a full clean pass means the learner has converged
                    let tail = &cyc.rounds[cyc.rounds.len() - inputs.len()..];
                    assert!(tail.iter().all(|r| !r.mistake));
                    worst_ratio = worst_ratio.max(adv.mistakes as f64 / bound as f64);
                }
            }
        }
    }
    println!("{targets} targets, worst mistakes/bound {worst_ratio:.3}, {:?}", start.elapsed());
    assert!(start.elapsed().as_secs() < 300);
}

#[test]
fn repeated_input_costs_at_most_k_minus_one() {
    for k in 1..=3 {
        for target in all_lists(2, k, 2) {
            for z in all_inputs(2) {
                let stream = vec![z; 20];
                assert!(run_dl_online(2, k, &target, &stream).unwrap().mistakes <= k - 1);
            }
        }
    }
}
