mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sstack::dims::{shatter_dim, verify_witness, ShatterKind, DEFAULT_MAX_SUBSET};
use sstack::hypothesis::HypothesisClass;
use sstack::polytope::Solver;
use sstack::rational::{rat, zero, Rational};

fn pair_loss(solver: &Solver<'_>, z: usize, a: usize, b: usize) -> Rational {
    solver.robust_minmax(z, &[(a, zero()), (b, zero())]).unwrap().value
}

/// Every assignment of `len` values from `0..base`.
fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..base).map(move |v| [t.clone(), vec![v]].concat())).collect();
    }
    out
}

/// Exhaustive search over all subsets, all ordered label pairs (SN) and all
/// reference labelings including ones outside the class (SG).
fn brute_dim(solver: &Solver<'_>, class: &HypothesisClass, gamma: &Rational, kind: ShatterKind) -> usize {
    let n = class.num_contexts();
    let k = class.num_types();
    let mut best = 0;
    for mask in 1usize..1 << n {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let d = subset.len();
        if d <= best {
            continue;
        }
        let shattered = match kind {
            ShatterKind::Natarajan => tuples(k * k, d).into_iter().any(|codes| {
                let pairs: Vec<(usize, usize)> = codes.iter().map(|c| (c / k, c % k)).collect();
                if subset.iter().zip(&pairs).any(|(&z, &(a, b))| a == b || pair_loss(solver, z, a, b) <= *gamma) {
                    return false;
                }
                (0..1usize << d).all(|p| {
                    class.hypotheses().iter().any(|row| {
                        subset.iter().zip(&pairs).enumerate().all(|(i, (&z, &(a, b)))| row[z] == if p >> i & 1 == 1 { b } else { a })
                    })
                })
            }),
            ShatterKind::Graph => tuples(k, d).into_iter().any(|g| {
                (0..1usize << d).all(|p| {
                    class.hypotheses().iter().any(|row| {
                        subset.iter().zip(&g).enumerate().all(|(i, (&z, &gi))| {
                            if p >> i & 1 == 1 {
                                pair_loss(solver, z, gi, row[z]) >= *gamma
                            } else {
                                row[z] == gi
                            }
                        })
                    })
                })
            }),
        };
        if shattered {
            best = d;
        }
    }
    best
}

#[test]
fn order_and_anti_monotonicity_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let gammas = [rat(1, 8), rat(1, 4), rat(1, 2)];
    let mut positive = 0;
    for i in 0..200 {
        let (game, class) = common::random_instance(&mut rng, 3, 16, 4);
        let solver = Solver::new(&game);
        let mut sn = Vec::new();
        let mut sg = Vec::new();
        for g in &gammas {
            let a = shatter_dim(&solver, &class, g, ShatterKind::Natarajan, DEFAULT_MAX_SUBSET).unwrap();
            let b = shatter_dim(&solver, &class, g, ShatterKind::Graph, DEFAULT_MAX_SUBSET).unwrap();
            if a.dim > 0 {
                assert!(verify_witness(&solver, &class, g, ShatterKind::Natarajan, &a.witness).unwrap());
            }
            if b.dim > 0 {
                assert!(verify_witness(&solver, &class, g, ShatterKind::Graph, &b.witness).unwrap());
            }
            assert!(a.dim <= b.dim, "instance {i}, gamma {g}: SN {} > SG {}", a.dim, b.dim);
            sn.push(a.dim);
            sg.push(b.dim);
        }
        assert!(sn.windows(2).all(|w| w[0] >= w[1]), "instance {i}: SN {sn:?}");
        assert!(sg.windows(2).all(|w| w[0] >= w[1]), "instance {i}: SG {sg:?}");
        positive += (sn[0] > 0) as usize;
    }
    assert!(positive >= 20, "only {positive} instances with positive SN");
}

#[test]
fn level_search_matches_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..60 {
        let (game, class) = common::random_instance(&mut rng, 3, 14, 4);
        let solver = Solver::new(&game);
        for g in [rat(1, 8), rat(1, 4)] {
            for kind in [ShatterKind::Natarajan, ShatterKind::Graph] {
                let fast = shatter_dim(&solver, &class, &g, kind, DEFAULT_MAX_SUBSET).unwrap().dim;
                assert_eq!(fast, brute_dim(&solver, &class, &g, kind), "{kind:?} at {g}");
            }
        }
    }
}
