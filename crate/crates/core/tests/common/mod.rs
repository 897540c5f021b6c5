#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sstack::hypothesis::HypothesisClass;
use sstack::rational::{rat, Rational};
use sstack::StackelbergGame;

pub fn cell<R: Rng>(rng: &mut R, denom: i64) -> Rational {
    rat(rng.gen_range(0..=denom), denom)
}

/// Random game with utilities in multiples of `1/denom`.
pub fn random_game<R: Rng>(rng: &mut R, contexts: usize, types: usize, m: usize, k: usize, denom: i64) -> StackelbergGame {
    let ids: Vec<String> = (1..=contexts).map(|i| i.to_string()).collect();
    let leader = (0..contexts)
        .map(|_| (0..m).map(|_| (0..k).map(|_| cell(rng, denom)).collect()).collect())
        .collect();
    let follower = (0..types)
        .map(|_| {
            (0..contexts)
                .map(|_| (0..m).map(|_| (0..k).map(|_| cell(rng, denom)).collect()).collect())
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    StackelbergGame::new(ids, leader, follower, order).expect("random game is valid")
}

/// Random class of at most `max_size` distinct rows (at least one).
pub fn random_class<R: Rng>(rng: &mut R, contexts: usize, types: usize, max_size: usize) -> HypothesisClass {
    let ids: Vec<String> = (1..=contexts).map(|i| i.to_string()).collect();
    let size = rng.gen_range(1..=max_size);
    let table = (0..size).map(|_| (0..contexts).map(|_| rng.gen_range(0..types)).collect()).collect();
    HypothesisClass::new(ids, types, table).expect("random class is valid")
}

/// Random instance within the given bounds on contexts, types, actions and class size.
pub fn random_instance<R: Rng>(rng: &mut R, max_dim: usize, max_class: usize, denom: i64) -> (StackelbergGame, HypothesisClass) {
    let nz = rng.gen_range(1..=max_dim);
    let nt = rng.gen_range(1..=max_dim);
    let m = rng.gen_range(2..=max_dim.max(2));
    let k = rng.gen_range(1..=max_dim);
    let game = random_game(rng, nz, nt, m, k, denom);
    let class = random_class(rng, nz, nt, max_class);
    (game, class)
}
