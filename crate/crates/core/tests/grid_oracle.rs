mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sstack::polytope::Solver;
use sstack::rational::{int, one, rat, Rational};
use sstack::{MixedStrategy, StackelbergGame};

const STEPS: i64 = 1000;
const DENOM: i64 = 10;

/// Utility entry as an integer number of `1/DENOM` units.
fn units(v: &Rational) -> i64 {
    let scaled = v * int(DENOM);
    assert!(scaled.is_integer(), "utilities must be multiples of 1/{DENOM}");
    scaled.to_integer().try_into().unwrap()
}

/// Integer payoff tables for one context, so the brute force avoids
/// rational arithmetic: values are in units of `1/(DENOM * STEPS)`.
struct Tables {
    leader: Vec<[i64; 2]>,
    follower: Vec<Vec<[i64; 2]>>,
    orders: Vec<Vec<usize>>,
}

impl Tables {
    fn new(game: &StackelbergGame, z: usize) -> Self {
        let k = game.follower_actions();
        let col = |f: &dyn Fn(usize, usize) -> Rational, a: usize| [units(&f(0, a)), units(&f(1, a))];
        let leader = (0..k).map(|a| col(&|l, f| game.leader_utility(z, l, f).clone(), a)).collect();
        let follower = (0..game.num_types())
            .map(|ty| (0..k).map(|a| col(&|l, f| game.follower_utility(ty, z, l, f).clone(), a)).collect())
            .collect();
        let orders = (0..game.num_types()).map(|ty| game.tie_order(ty).to_vec()).collect();
        Self { leader, follower, orders }
    }

    /// Follower response by direct comparison, ties to the earliest action in
    /// the type's order.
    fn respond(&self, ty: usize, i: i64) -> usize {
        let value = |f: usize| i * self.follower[ty][f][0] + (STEPS - i) * self.follower[ty][f][1];
        let mut best = self.orders[ty][0];
        for &f in &self.orders[ty] {
            if value(f) > value(best) {
                best = f;
            }
        }
        best
    }

    fn commit(&self, ty: usize, i: i64) -> i64 {
        let f = self.respond(ty, i);
        i * self.leader[f][0] + (STEPS - i) * self.leader[f][1]
    }
}

fn scaled(v: i64) -> Rational {
    rat(v, DENOM * STEPS)
}

fn commit_value(game: &StackelbergGame, ty: usize, z: usize, x: &[Rational]) -> Rational {
    let f = sstack::best_response(game, ty, z, &MixedStrategy::new(x.to_vec()).unwrap()).unwrap();
    (0..2).map(|l| &x[l] * game.leader_utility(z, l, f)).sum()
}

#[test]
fn lp_solutions_match_grid_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let delta = rat(1, STEPS);
    for inst in 0..300 {
        let nt = rng.gen_range(1..=3);
        let k = rng.gen_range(2..=3);
        let game = common::random_game(&mut rng, 1, nt, 2, k, 10);
        let solver = Solver::new(&game);
        let slack = &delta * game.lipschitz_constant();
        let tables = Tables::new(&game, 0);
        let z = 0;

        // optimal commitment per type
        let mut ustar = Vec::new();
        for ty in 0..nt {
            let grid_best = scaled((0..=STEPS).map(|i| tables.commit(ty, i)).max().unwrap());
            let c = solver.optimal_commitment(z, ty).unwrap();
            assert!(c.value >= grid_best, "instance {inst}: LP {} below grid {}", c.value, grid_best);
            assert!(&c.value - &grid_best <= slack, "instance {inst}: LP {} vs grid {}", c.value, grid_best);
            let earned = commit_value(&game, ty, z, c.strategy.weights());
            assert!(&c.value - &earned <= slack);
            if c.attained {
                assert_eq!(earned, c.value);
            }
            ustar.push(c.value);
        }

        // robust min-max with random offsets
        let mut offsets: Vec<(usize, Rational)> = Vec::new();
        for ty in 0..nt {
            if rng.gen_bool(0.8) {
                offsets.push((ty, rat(rng.gen_range(0..=4), 8)));
            }
        }
        if !offsets.is_empty() {
            let objective = |x: &[Rational]| -> Rational {
                offsets
                    .iter()
                    .map(|(ty, c)| c + &ustar[*ty] - commit_value(&game, *ty, z, x))
                    .max()
                    .unwrap()
            };
            let grid_best = (0..=STEPS)
                .map(|i| {
                    offsets
                        .iter()
                        .map(|(ty, c)| c + &ustar[*ty] - scaled(tables.commit(*ty, i)))
                        .max()
                        .unwrap()
                })
                .min()
                .unwrap();
            let r = solver.robust_minmax(z, &offsets).unwrap();
            assert!(r.value <= grid_best, "instance {inst}: min-max {} above grid {}", r.value, grid_best);
            assert!(&grid_best - &r.value <= slack, "instance {inst}: min-max {} vs grid {}", r.value, grid_best);
            let earned = objective(r.strategy.weights());
            assert!(&earned - &r.value <= slack);
            if r.attained {
                assert_eq!(earned, r.value);
            }
        }

        // empirical utility maximizer on a random sample
        let sample: Vec<usize> = (0..rng.gen_range(1..=8)).map(|_| rng.gen_range(0..nt)).collect();
        let n = int(sample.len() as i64);
        let average = |x: &[Rational]| -> Rational {
            sample.iter().map(|&ty| commit_value(&game, ty, z, x)).sum::<Rational>() / &n
        };
        let grid_best = scaled((0..=STEPS).map(|i| sample.iter().map(|&ty| tables.commit(ty, i)).sum::<i64>()).max().unwrap()) / &n;
        let e = solver.empirical_utility_maximizer(z, &sample).unwrap();
        assert_eq!(e.value, average(e.strategy.weights()));
        assert!(e.supremum >= grid_best, "instance {inst}: ERM sup {} below grid {}", e.supremum, grid_best);
        assert!(&e.supremum - &grid_best <= slack, "instance {inst}: ERM sup {} vs grid {}", e.supremum, grid_best);
        assert!(&grid_best - &e.value <= slack, "instance {inst}: ERM value {} vs grid {}", e.value, grid_best);
        assert_eq!(e.strategy.weights().iter().sum::<Rational>(), one());
        let _ = MixedStrategy::new(e.strategy.weights().to_vec()).unwrap();
    }
}
