//! Edge-weighted view of an SL tree.
//!
//! Each node gets outgoing edge weights `nu_i` such that every leader
//! strategy suffers loss at least `nu_i` against some child type `i`; the
//! tree value is the lightest root-to-leaf path. This module computes the
//! best such weights node by node through the LP dual of the min-max
//! program, checks their validity with separate strict-feasibility LPs, and
//! compares the lightest path against the node-weight recursion.

use crate::error::{Error, Result};
use crate::game::StackelbergGame;
use crate::hypothesis::{HypothesisClass, VersionSpace};
use crate::lp::{solve_lp, Direction, LinearProgram, LpOutcome, Relation, VarBound};
use crate::polytope::{has_strict_point, Halfspace, Solver};
use crate::rational::{one, zero, Rational};
use std::collections::BTreeMap;

use super::sl::{replay_sl_tree, SlNode};

/// Tree annotated with outgoing edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeNode {
    pub context: Option<usize>,
    pub edges: BTreeMap<usize, (Rational, EdgeNode)>,
}

impl EdgeNode {
    /// Smallest cumulative edge weight over root-to-leaf paths.
    pub fn lightest_path(&self) -> Rational {
        self.edges
            .values()
            .map(|(w, c)| w + c.lightest_path())
            .min()
            .unwrap_or_else(zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeightReport {
    pub node_value: Rational,
    pub edge_value: Rational,
    /// Every node's edge weights passed the covering check.
    pub weights_valid: bool,
    pub edge_tree: EdgeNode,
}

impl EdgeWeightReport {
    pub fn equivalent(&self) -> bool {
        self.weights_valid && self.node_value == self.edge_value
    }
}

pub fn validate_edge_weight_equivalence(
    game: &StackelbergGame,
    class: &HypothesisClass,
    tree: &SlNode,
) -> Result<EdgeWeightReport> {
    class.check_compatible(game)?;
    let solver = Solver::new(game);
    let node_tree = replay_sl_tree(&solver, class, tree)?;
    let mut valid = true;
    let (edge_tree, _) = edge_weights(&solver, class, &class.full(), tree, &mut valid)?;
    Ok(EdgeWeightReport {
        node_value: node_tree.weight,
        edge_value: edge_tree.lightest_path(),
        weights_valid: valid,
        edge_tree,
    })
}

/// Returns the weighted subtree and its lightest-path value.
fn edge_weights(
    solver: &Solver<'_>,
    class: &HypothesisClass,
    vs: &VersionSpace,
    node: &SlNode,
    valid: &mut bool,
) -> Result<(EdgeNode, Rational)> {
    let Some(z) = node.context else {
        return Ok((EdgeNode { context: None, edges: BTreeMap::new() }, zero()));
    };
    let mut subtrees = BTreeMap::new();
    for (&j, child) in &node.children {
        let sub = vs.restrict(class, z, j);
        if sub.is_empty() {
            return Err(Error::InvalidTree(format!("label {j} not realizable")));
        }
        subtrees.insert(j, edge_weights(solver, class, &sub, child, valid)?);
    }
    let types: Vec<usize> = subtrees.keys().copied().collect();
    let below: Vec<Rational> = subtrees.values().map(|(_, v)| v.clone()).collect();
    let best = dual_value(solver, z, &types, &below)?;
    let mut nu = Vec::with_capacity(types.len());
    let mut edges = BTreeMap::new();
    for ((j, (child, _)), b) in subtrees.into_iter().zip(&below) {
        let w = &best - b;
        nu.push(w.clone());
        edges.insert(j, (w, child));
    }
    if !covers(solver, z, &types, &nu) {
        *valid = false;
    }
    let node = EdgeNode { context: Some(z), edges };
    let value = node
        .edges
        .values()
        .zip(&below)
        .map(|((w, _), b)| w + b)
        .min()
        .expect("internal node has children");
    Ok((node, value))
}

/// `max_nu min_j (nu_j + below_j)` over valid weights at one node, computed
/// as the minimum over response profiles of the dual min-max LP.
fn dual_value(solver: &Solver<'_>, z: usize, types: &[usize], below: &[Rational]) -> Result<Rational> {
    let game = solver.game();
    let m = game.leader_actions();
    let mut best: Option<Rational> = None;
    for (profile, rows) in solver.response_profiles(z, types) {
        let n = types.len();
        let r = rows.len();
        // variables: lambda (n), mu (r), nu (1, free)
        let mut lp = LinearProgram::new(Direction::Maximize, n + r + 1);
        lp.bounds[n + r] = VarBound::Free;
        for (j, (&ty, b)) in types.iter().zip(below).enumerate() {
            lp.objective[j] = solver.commitment_value(z, ty) + b;
        }
        lp.objective[n + r] = one();
        let mut sum = vec![zero(); n + r + 1];
        sum[..n].iter_mut().for_each(|v| *v = one());
        lp.add(sum, Relation::Eq, one());
        for l in 0..m {
            let mut row = vec![zero(); n + r + 1];
            for (j, &a) in profile.iter().enumerate() {
                row[j] = game.leader_utility(z, l, a).clone();
            }
            for (k, h) in rows.iter().enumerate() {
                row[n + k] = h.coeffs[l].clone();
            }
            row[n + r] = one();
            lp.add(row, Relation::Le, zero());
        }
        match solve_lp(&lp) {
            LpOutcome::Optimal { value, .. } => {
                if best.as_ref().is_none_or(|b| value < *b) {
                    best = Some(value);
                }
            }
            // A nonempty region keeps the primal feasible and bounded.
            other => return Err(Error::InvalidInput(format!("unexpected dual outcome {other:?}"))),
        }
    }
    best.ok_or_else(|| Error::InvalidInput("no response profile at node".into()))
}

/// `true` when no strategy keeps every listed type's loss strictly below
/// its weight, i.e. the weights are a valid edge assignment.
fn covers(solver: &Solver<'_>, z: usize, types: &[usize], nu: &[Rational]) -> bool {
    let game = solver.game();
    let m = game.leader_actions();
    for (profile, mut rows) in solver.response_profiles(z, types) {
        // loss_j(x) < nu_j  <=>  U[.][a_j] . x + (nu_j - u*_j) > 0 on the simplex
        for ((&ty, &a), w) in types.iter().zip(&profile).zip(nu) {
            let shift = w - solver.commitment_value(z, ty);
            let coeffs = (0..m).map(|l| game.leader_utility(z, l, a) + &shift).collect();
            rows.push(Halfspace { coeffs, rival: a, strict: true });
        }
        if has_strict_point(m, &rows) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::sl::sl_dim;
    use crate::hypothesis::{permutation_class, permutation_game};
    use crate::rational::rat;

    #[test]
    fn permutation_tree() {
        let g = permutation_game(3).unwrap();
        let c = permutation_class(3).unwrap();
        let tree = sl_dim(&g, &c).unwrap().witness;
        let r = validate_edge_weight_equivalence(&g, &c, &tree).unwrap();
        assert!(r.equivalent());
        assert_eq!(r.edge_value, rat(7, 6));
    }

    #[test]
    fn depth_one_tree_is_zero_offset_minmax() {
        let g = permutation_game(3).unwrap();
        let c = permutation_class(3).unwrap();
        let children = (0..3).map(|t| (t, SlNode::leaf())).collect();
        let tree = SlNode { context: Some(0), weight: zero(), children };
        let r = validate_edge_weight_equivalence(&g, &c, &tree).unwrap();
        assert!(r.equivalent());
        assert_eq!(r.node_value, rat(2, 3));
    }
}
