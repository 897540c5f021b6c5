//! Random search for a small instance on which the zero-offset greedy
//! learner pays more than the SL value against the adaptive adversary.
//! Prints the first hit as game and class JSON.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sstack::dims::SlSolver;
use sstack::hypothesis::HypothesisClass;
use sstack::online::{run_online, Environment, LearnerKind};
use sstack::rational::rat;
use sstack::StackelbergGame;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let contexts = vec!["1".to_string(), "2".to_string()];
    for attempt in 0..20_000 {
        let cell = |rng: &mut ChaCha8Rng| rat(rng.gen_range(0..=4), 4);
        let leader: Vec<_> = (0..2)
            .map(|_| (0..2).map(|_| (0..2).map(|_| cell(&mut rng)).collect()).collect())
            .collect();
        let follower: Vec<Vec<Vec<Vec<_>>>> = (0..3)
            .map(|_| (0..2).map(|_| (0..2).map(|_| (0..2).map(|_| cell(&mut rng)).collect()).collect()).collect())
            .collect();
        let Ok(game) = StackelbergGame::new(contexts.clone(), leader, follower, vec![0, 1]) else { continue };
        let table: Vec<Vec<usize>> = (0..9)
            .filter(|_| rng.gen_bool(0.5))
            .map(|h| vec![h / 3, h % 3])
            .collect();
        if table.len() < 2 {
            continue;
        }
        let class = HypothesisClass::new(contexts.clone(), 3, table).unwrap();
        let sl = SlSolver::new(&game, &class).unwrap();
        let value = sl.value(&class.full()).unwrap();
        let greedy = run_online(&sl, LearnerKind::Greedy, &Environment::Adversary, 4).unwrap();
        let ssoa = run_online(&sl, LearnerKind::Ssoa, &Environment::Adversary, 4).unwrap();
        if ssoa.rounds.iter().any(|r| !r.attained) {
            continue;
        }
        // attained runs are exactly tight
        assert_eq!(ssoa.cumulative_regret, value);
        assert!(greedy.cumulative_regret >= value);
        if greedy.cumulative_regret > value && greedy.rounds.iter().all(|r| r.attained) {
            eprintln!("attempt {attempt}: SL {value}, greedy {}", greedy.cumulative_regret);
            println!("{}", game.to_json());
            println!("{}", class.to_json());
            return;
        }
    }
    eprintln!("no instance found");
}
