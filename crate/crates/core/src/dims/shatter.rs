//! γ-SN and γ-SG shattering dimensions by level-wise subset search.
//!
//! Both properties are inherited by subsets, so a size-`n` subset is tested
//! only when all of its `(n-1)`-subsets are shattered.

use crate::error::{Error, Result};
use crate::game::StackelbergGame;
use crate::hypothesis::HypothesisClass;
use crate::polytope::Solver;
use crate::rational::{zero, Rational};
use num::Signed;
use std::collections::{BTreeSet, HashMap, HashSet};

pub const DEFAULT_MAX_SUBSET: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShatterKind {
    /// Per-context label pairs, pairwise loss strictly above γ.
    Natarajan,
    /// A reference labeling `g`, deviations with pairwise loss at least γ.
    Graph,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShatterWitness {
    pub contexts: Vec<usize>,
    /// SN: `(g0, g1)` labels per context.
    pub pairs: Vec<(usize, usize)>,
    /// SG: reference label per context.
    pub reference: Vec<usize>,
    /// Class row realizing each pattern; bit `i` of the pattern index is `b_i`.
    pub pattern_hypotheses: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShatterResult {
    pub dim: usize,
    pub witness: ShatterWitness,
}

/// Zero-offset pairwise min-max values, cached per context and label pair.
struct PairLoss<'s, 'g> {
    solver: &'s Solver<'g>,
    cache: HashMap<(usize, usize, usize), Rational>,
}

impl PairLoss<'_, '_> {
    fn get(&mut self, z: usize, a: usize, b: usize) -> Result<Rational> {
        if a == b {
            return Ok(zero());
        }
        let key = (z, a.min(b), a.max(b));
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let v = self.solver.robust_minmax(z, &[(a, zero()), (b, zero())])?.value;
        self.cache.insert(key, v.clone());
        Ok(v)
    }
}

pub fn sn_dim(game: &StackelbergGame, class: &HypothesisClass, gamma: &Rational) -> Result<ShatterResult> {
    shatter_dim(&Solver::new(game), class, gamma, ShatterKind::Natarajan, DEFAULT_MAX_SUBSET)
}

pub fn sg_dim(game: &StackelbergGame, class: &HypothesisClass, gamma: &Rational) -> Result<ShatterResult> {
    shatter_dim(&Solver::new(game), class, gamma, ShatterKind::Graph, DEFAULT_MAX_SUBSET)
}

/// Largest shattered subset. When subsets beyond `max_subset` would still
/// need testing the search stops with [`Error::ShatterCapped`].
pub fn shatter_dim(
    solver: &Solver<'_>,
    class: &HypothesisClass,
    gamma: &Rational,
    kind: ShatterKind,
    max_subset: usize,
) -> Result<ShatterResult> {
    class.check_compatible(solver.game())?;
    if !gamma.is_positive() {
        return Err(Error::InvalidInput("gamma must be positive".into()));
    }
    let mut losses = PairLoss { solver, cache: HashMap::new() };
    let nz = class.num_contexts();
    let mut best = ShatterResult { dim: 0, witness: ShatterWitness::default() };
    let mut level: Vec<Vec<usize>> = Vec::new();
    for z in 0..nz {
        if let Some(w) = test_subset(class, &mut losses, gamma, kind, &[z])? {
            if best.dim == 0 {
                best = ShatterResult { dim: 1, witness: w };
            }
            level.push(vec![z]);
        }
    }
    let mut size = 1;
    while !level.is_empty() {
        let known: HashSet<&Vec<usize>> = level.iter().collect();
        let mut candidates = Vec::new();
        for (i, a) in level.iter().enumerate() {
            for b in &level[i + 1..] {
                if a[..size - 1] != b[..size - 1] {
                    continue;
                }
                let mut joined = a.clone();
                joined.push(b[size - 1]);
                let closed = (0..joined.len()).all(|skip| {
                    let sub: Vec<usize> = joined
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != skip)
                        .map(|(_, &z)| z)
                        .collect();
                    known.contains(&sub)
                });
                if closed {
                    candidates.push(joined);
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        size += 1;
        if size > max_subset {
            return Err(Error::ShatterCapped { lower_bound: best.dim, cap: max_subset });
        }
        let mut next = Vec::new();
        for cand in candidates {
            if let Some(w) = test_subset(class, &mut losses, gamma, kind, &cand)? {
                if best.dim < size {
                    best = ShatterResult { dim: size, witness: w };
                }
                next.push(cand);
            }
        }
        level = next;
    }
    Ok(best)
}

fn test_subset(
    class: &HypothesisClass,
    losses: &mut PairLoss<'_, '_>,
    gamma: &Rational,
    kind: ShatterKind,
    subset: &[usize],
) -> Result<Option<ShatterWitness>> {
    match kind {
        ShatterKind::Natarajan => test_sn(class, losses, gamma, subset),
        ShatterKind::Graph => test_sg(class, losses, gamma, subset),
    }
}

fn test_sn(
    class: &HypothesisClass,
    losses: &mut PairLoss<'_, '_>,
    gamma: &Rational,
    subset: &[usize],
) -> Result<Option<ShatterWitness>> {
    let mut options: Vec<Vec<(usize, usize)>> = Vec::new();
    for &z in subset {
        let labels = class.project(z)?;
        let mut pairs = Vec::new();
        for (i, &a) in labels.iter().enumerate() {
            for &b in &labels[i + 1..] {
                if losses.get(z, a, b)? > *gamma {
                    pairs.push((a, b));
                }
            }
        }
        if pairs.is_empty() {
            return Ok(None);
        }
        options.push(pairs);
    }
    let mut chosen = Vec::new();
    Ok(assign_pairs(class, subset, &options, &mut chosen))
}

/// Patterns realized on the first `chosen.len()` contexts, each with a row.
fn sn_patterns(class: &HypothesisClass, subset: &[usize], chosen: &[(usize, usize)]) -> HashMap<usize, usize> {
    let mut seen = HashMap::new();
    'rows: for (h, row) in class.hypotheses().iter().enumerate() {
        let mut pattern = 0usize;
        for (i, (&z, &(a, b))) in subset.iter().zip(chosen).enumerate() {
            if row[z] == b {
                pattern |= 1 << i;
            } else if row[z] != a {
                continue 'rows;
            }
        }
        seen.entry(pattern).or_insert(h);
    }
    seen
}

fn assign_pairs(
    class: &HypothesisClass,
    subset: &[usize],
    options: &[Vec<(usize, usize)>],
    chosen: &mut Vec<(usize, usize)>,
) -> Option<ShatterWitness> {
    let patterns = sn_patterns(class, subset, chosen);
    if patterns.len() < 1 << chosen.len() {
        return None;
    }
    if chosen.len() == subset.len() {
        let pattern_hypotheses = (0..1usize << chosen.len()).map(|p| patterns[&p]).collect();
        return Some(ShatterWitness {
            contexts: subset.to_vec(),
            pairs: chosen.clone(),
            reference: Vec::new(),
            pattern_hypotheses,
        });
    }
    for &pair in &options[chosen.len()] {
        chosen.push(pair);
        if let Some(w) = assign_pairs(class, subset, options, chosen) {
            return Some(w);
        }
        chosen.pop();
    }
    None
}

fn test_sg(
    class: &HypothesisClass,
    losses: &mut PairLoss<'_, '_>,
    gamma: &Rational,
    subset: &[usize],
) -> Result<Option<ShatterWitness>> {
    // The all-zero pattern needs a row equal to g on the subset, so only
    // projections of the class are candidate references.
    let refs: BTreeSet<Vec<usize>> = class
        .hypotheses()
        .iter()
        .map(|row| subset.iter().map(|&z| row[z]).collect())
        .collect();
    let full = (1usize << subset.len()) - 1;
    for g in refs {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for (h, row) in class.hypotheses().iter().enumerate() {
            let mut pattern = 0usize;
            let mut covered = 0usize;
            for (i, (&z, &gi)) in subset.iter().zip(&g).enumerate() {
                if row[z] == gi {
                    covered |= 1 << i;
                } else if losses.get(z, gi, row[z])? >= *gamma {
                    covered |= 1 << i;
                    pattern |= 1 << i;
                }
            }
            if covered == full {
                seen.entry(pattern).or_insert(h);
            }
        }
        if seen.len() == full + 1 {
            return Ok(Some(ShatterWitness {
                contexts: subset.to_vec(),
                pairs: Vec::new(),
                reference: g,
                pattern_hypotheses: (0..=full).map(|p| seen[&p]).collect(),
            }));
        }
    }
    Ok(None)
}

/// Replays a witness against the definition it claims to satisfy.
pub fn verify_witness(
    solver: &Solver<'_>,
    class: &HypothesisClass,
    gamma: &Rational,
    kind: ShatterKind,
    w: &ShatterWitness,
) -> Result<bool> {
    let n = w.contexts.len();
    if w.pattern_hypotheses.len() != 1 << n {
        return Ok(false);
    }
    for (p, &h) in w.pattern_hypotheses.iter().enumerate() {
        let row = &class.hypotheses()[h];
        for (i, &z) in w.contexts.iter().enumerate() {
            let bit = p >> i & 1 == 1;
            let ok = match kind {
                ShatterKind::Natarajan => {
                    let (a, b) = w.pairs[i];
                    row[z] == if bit { b } else { a }
                }
                ShatterKind::Graph => {
                    let g = w.reference[i];
                    if bit {
                        solver.robust_minmax(z, &[(g, zero()), (row[z], zero())])?.value >= *gamma
                    } else {
                        row[z] == g
                    }
                }
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    if kind == ShatterKind::Natarajan {
        for (i, &z) in w.contexts.iter().enumerate() {
            let (a, b) = w.pairs[i];
            if solver.robust_minmax(z, &[(a, zero()), (b, zero())])?.value <= *gamma {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::{permutation_class, permutation_game};
    use crate::rational::{int, rat};

    #[test]
    fn singleton_class_has_zero() {
        let g = permutation_game(3).unwrap();
        let c = HypothesisClass::new(g.contexts().to_vec(), 3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(sn_dim(&g, &c, &rat(1, 4)).unwrap().dim, 0);
        assert_eq!(sg_dim(&g, &c, &rat(1, 4)).unwrap().dim, 0);
    }

    #[test]
    fn permutation_instance() {
        let g = permutation_game(3).unwrap();
        let c = permutation_class(3).unwrap();
        let solver = Solver::new(&g);
        let sn = shatter_dim(&solver, &c, &rat(1, 4), ShatterKind::Natarajan, 12).unwrap();
        let sg = shatter_dim(&solver, &c, &rat(1, 4), ShatterKind::Graph, 12).unwrap();
        assert!(sn.dim <= sg.dim);
        assert!(sn.dim <= 2);
        assert!(verify_witness(&solver, &c, &rat(1, 4), ShatterKind::Natarajan, &sn.witness).unwrap());
        assert!(verify_witness(&solver, &c, &rat(1, 4), ShatterKind::Graph, &sg.witness).unwrap());
        // losses never exceed 1
        assert_eq!(sn_dim(&g, &c, &int(1)).unwrap().dim, 0);
    }

    #[test]
    fn cap_reports_lower_bound() {
        let g = permutation_game(3).unwrap();
        let c = permutation_class(3).unwrap();
        let solver = Solver::new(&g);
        let r = shatter_dim(&solver, &c, &rat(1, 4), ShatterKind::Graph, 1);
        assert!(matches!(r, Err(Error::ShatterCapped { lower_bound: 1, cap: 1 })));
    }
}
