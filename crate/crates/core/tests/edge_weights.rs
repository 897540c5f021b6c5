mod common;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sstack::dims::{sl_dim, validate_edge_weight_equivalence, SlNode};
use sstack::hypothesis::{HypothesisClass, VersionSpace};
use sstack::presets::load_preset;
use sstack::rational::{int, rat};
use std::collections::BTreeMap;

/// Random shattered tree: each internal node queries a context where the
/// path's version space still splits and keeps a random subset (size >= 2)
/// of the realizable labels.
fn random_tree<R: Rng>(rng: &mut R, class: &HypothesisClass, vs: &VersionSpace, depth: usize) -> SlNode {
    let splitting: Vec<usize> = (0..class.num_contexts()).filter(|&z| vs.project(class, z).len() >= 2).collect();
    if depth == 0 || splitting.is_empty() || rng.gen_bool(0.15) {
        return SlNode::leaf();
    }
    let z = *splitting.choose(rng).unwrap();
    let mut labels = vs.project(class, z);
    labels.shuffle(rng);
    let keep = rng.gen_range(2..=labels.len());
    let children: BTreeMap<usize, SlNode> = labels[..keep]
        .iter()
        .map(|&j| (j, random_tree(rng, class, &vs.restrict(class, z, j), depth - 1)))
        .collect();
    SlNode { context: Some(z), weight: int(0), children }
}

#[test]
fn permutation_witness_node_and_edge_values_agree() {
    let p = load_preset("perm3").unwrap();
    let tree = sl_dim(&p.game, &p.class).unwrap().witness;
    let r = validate_edge_weight_equivalence(&p.game, &p.class, &tree).unwrap();
    assert!(r.weights_valid);
    assert_eq!(r.node_value, rat(7, 6));
    assert_eq!(r.edge_value, rat(7, 6));
}

#[test]
fn random_trees_node_and_edge_values_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut nontrivial = 0;
    while checked < 120 {
        let (game, class) = common::random_instance(&mut rng, 3, 12, 4);
        let tree = random_tree(&mut rng, &class, &class.full(), 4);
        if tree.context.is_none() {
            continue;
        }
        let r = validate_edge_weight_equivalence(&game, &class, &tree).unwrap();
        assert!(r.weights_valid, "instance {checked}");
        assert_eq!(r.node_value, r.edge_value, "instance {checked}");
        nontrivial += (r.node_value > int(0)) as usize;
        checked += 1;
    }
    assert!(nontrivial >= 30, "only {nontrivial} trees with positive value");
}
