//! Structured Stackelberg games with a finite context set and finitely many
//! follower types, plus utility and best-response evaluation.

use crate::error::{Error, Result};
use crate::rational::{format_rational, one, zero, Rational, RationalCell};
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Leader mixed strategy: nonnegative exact weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedStrategy {
    weights: Vec<Rational>,
}

impl MixedStrategy {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidStrategy("empty weight vector".into()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidStrategy("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if total != one() {
            return Err(Error::InvalidStrategy(format!(
                "weights sum to {}",
                format_rational(&total)
            )));
        }
        Ok(Self { weights })
    }

    pub(crate) fn new_unchecked(weights: Vec<Rational>) -> Self {
        debug_assert!(weights.iter().all(|w| !w.is_negative()));
        Self { weights }
    }

    pub fn pure(len: usize, action: usize) -> Self {
        let mut weights = vec![zero(); len];
        weights[action] = one();
        Self { weights }
    }

    pub fn uniform(len: usize) -> Self {
        let w = Rational::new(1.into(), (len as i64).into());
        Self { weights: vec![w; len] }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Convex combination `(1 - lambda) * self + lambda * other`.
    pub fn mix(&self, other: &MixedStrategy, lambda: &Rational) -> MixedStrategy {
        let keep = one() - lambda;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a * &keep + b * lambda)
            .collect();
        MixedStrategy { weights }
    }

    pub fn l1_distance(&self, other: &MixedStrategy) -> Rational {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// `"p/q"` weights joined with semicolons.
    pub fn to_text(&self) -> String {
        self.weights
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// A game `(A, A_f, Z, u, u_f^(1..K))` given extensionally per context.
#[derive(Debug, Clone, PartialEq)]
pub struct StackelbergGame {
    leader_actions: usize,
    follower_actions: usize,
    contexts: Vec<String>,
    /// `[z][a_l][a_f]`
    leader_utility: Vec<Vec<Vec<Rational>>>,
    /// `[type][z][a_l][a_f]`
    follower_utility: Vec<Vec<Vec<Vec<Rational>>>>,
    tie_break_order: Vec<usize>,
    type_tie_break_orders: Option<Vec<Vec<usize>>>,
}

fn check_permutation(order: &[usize], k: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; k];
    if order.len() != k {
        return Err(Error::InvalidGame(format!("{what} has length {} (expected {k})", order.len())));
    }
    for &a in order {
        if a >= k || seen[a] {
            return Err(Error::InvalidGame(format!("{what} is not a permutation of 0..{k}")));
        }
        seen[a] = true;
    }
    Ok(())
}

fn check_unit_interval(v: &Rational, what: &str) -> Result<()> {
    if v.is_negative() || *v > one() {
        return Err(Error::InvalidGame(format!(
            "{what} entry {} outside [0,1]",
            format_rational(v)
        )));
    }
    Ok(())
}

impl StackelbergGame {
    pub fn new(
        contexts: Vec<String>,
        leader_utility: Vec<Vec<Vec<Rational>>>,
        follower_utility: Vec<Vec<Vec<Vec<Rational>>>>,
        tie_break_order: Vec<usize>,
    ) -> Result<Self> {
        Self::with_type_orders(contexts, leader_utility, follower_utility, tie_break_order, None)
    }

    /// Like [`StackelbergGame::new`], with an optional tie-break order per
    /// follower type overriding the global one.
    pub fn with_type_orders(
        contexts: Vec<String>,
        leader_utility: Vec<Vec<Vec<Rational>>>,
        follower_utility: Vec<Vec<Vec<Vec<Rational>>>>,
        tie_break_order: Vec<usize>,
        type_tie_break_orders: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let nz = contexts.len();
        if nz == 0 {
            return Err(Error::InvalidGame("no contexts".into()));
        }
        let mut ids = contexts.clone();
        ids.sort();
        ids.dedup();
        if ids.len() != nz {
            return Err(Error::InvalidGame("duplicate context ids".into()));
        }
        if leader_utility.len() != nz {
            return Err(Error::InvalidGame("leader_utility must have one slice per context".into()));
        }
        let m = leader_utility[0].len();
        if m == 0 {
            return Err(Error::InvalidGame("leader needs at least one action".into()));
        }
        let k = leader_utility[0][0].len();
        if k == 0 {
            return Err(Error::InvalidGame("follower needs at least one action".into()));
        }
        let check_matrix = |mat: &Vec<Vec<Rational>>, what: &str| -> Result<()> {
            if mat.len() != m || mat.iter().any(|row| row.len() != k) {
                return Err(Error::InvalidGame(format!("{what} has inconsistent shape")));
            }
            mat.iter().flatten().try_for_each(|v| check_unit_interval(v, what))
        };
        for mat in &leader_utility {
            check_matrix(mat, "leader_utility")?;
        }
        if follower_utility.is_empty() {
            return Err(Error::InvalidGame("at least one follower type required".into()));
        }
        for slices in &follower_utility {
            if slices.len() != nz {
                return Err(Error::InvalidGame(
                    "follower_utilities must have one slice per context".into(),
                ));
            }
            for mat in slices {
                check_matrix(mat, "follower_utilities")?;
            }
        }
        check_permutation(&tie_break_order, k, "tie_break_order")?;
        if let Some(orders) = &type_tie_break_orders {
            if orders.len() != follower_utility.len() {
                return Err(Error::InvalidGame("type_tie_break_orders needs one order per type".into()));
            }
            for order in orders {
                check_permutation(order, k, "type tie-break order")?;
            }
        }
        Ok(Self {
            leader_actions: m,
            follower_actions: k,
            contexts,
            leader_utility,
            follower_utility,
            tie_break_order,
            type_tie_break_orders,
        })
    }

    pub fn leader_actions(&self) -> usize {
        self.leader_actions
    }

    pub fn follower_actions(&self) -> usize {
        self.follower_actions
    }

    pub fn num_contexts(&self) -> usize {
        self.contexts.len()
    }

    pub fn num_types(&self) -> usize {
        self.follower_utility.len()
    }

    pub fn contexts(&self) -> &[String] {
        &self.contexts
    }

    pub fn context_id(&self, z: usize) -> &str {
        &self.contexts[z]
    }

    pub fn context_index(&self, id: &str) -> Result<usize> {
        self.contexts
            .iter()
            .position(|c| c == id)
            .ok_or_else(|| Error::UnknownContextId(id.to_string()))
    }

    pub fn tie_break_order(&self) -> &[usize] {
        &self.tie_break_order
    }

    pub fn type_tie_break_orders(&self) -> Option<&[Vec<usize>]> {
        self.type_tie_break_orders.as_deref()
    }

    /// Tie-break order used by follower type `ty`.
    pub fn tie_order(&self, ty: usize) -> &[usize] {
        match &self.type_tie_break_orders {
            Some(orders) => &orders[ty],
            None => &self.tie_break_order,
        }
    }

    /// `true` when `first` beats `second` in type `ty`'s tie-break order.
    pub fn tie_precedes(&self, ty: usize, first: usize, second: usize) -> bool {
        let order = self.tie_order(ty);
        let pos = |a: usize| order.iter().position(|&b| b == a).unwrap_or(usize::MAX);
        pos(first) < pos(second)
    }

    pub fn leader_utility(&self, z: usize, leader: usize, follower: usize) -> &Rational {
        &self.leader_utility[z][leader][follower]
    }

    pub fn follower_utility(&self, ty: usize, z: usize, leader: usize, follower: usize) -> &Rational {
        &self.follower_utility[ty][z][leader][follower]
    }

    pub fn leader_matrix(&self, z: usize) -> &[Vec<Rational>] {
        &self.leader_utility[z]
    }

    pub fn follower_matrix(&self, ty: usize, z: usize) -> &[Vec<Rational>] {
        &self.follower_utility[ty][z]
    }

    pub(crate) fn check_context(&self, z: usize) -> Result<()> {
        if z < self.num_contexts() {
            Ok(())
        } else {
            Err(Error::UnknownContext(z))
        }
    }

    pub(crate) fn check_type(&self, ty: usize) -> Result<()> {
        if ty < self.num_types() {
            Ok(())
        } else {
            Err(Error::UnknownType(ty))
        }
    }

    pub(crate) fn check_action(&self, a: usize) -> Result<()> {
        if a < self.follower_actions {
            Ok(())
        } else {
            Err(Error::UnknownAction(a))
        }
    }

    pub(crate) fn check_strategy(&self, x: &MixedStrategy) -> Result<()> {
        if x.len() == self.leader_actions {
            Ok(())
        } else {
            Err(Error::InvalidStrategy(format!(
                "strategy has {} weights, game has {} leader actions",
                x.len(),
                self.leader_actions
            )))
        }
    }

    /// Expected follower utility of every follower action for type `ty`.
    pub fn follower_expected(&self, ty: usize, z: usize, x: &MixedStrategy) -> Vec<Rational> {
        let mat = &self.follower_utility[ty][z];
        (0..self.follower_actions)
            .map(|f| expected(mat, x, f))
            .collect()
    }

    pub(crate) fn best_response_unchecked(&self, ty: usize, z: usize, x: &MixedStrategy) -> usize {
        let values = self.follower_expected(ty, z, x);
        let best = values.iter().max().expect("at least one follower action");
        *self
            .tie_order(ty)
            .iter()
            .find(|&&a| values[a] == *best)
            .expect("a maximizer exists")
    }

    pub(crate) fn leader_utility_unchecked(&self, z: usize, x: &MixedStrategy, f: usize) -> Rational {
        expected(&self.leader_utility[z], x, f)
    }

    /// Largest spread of any leader utility column; bounds `|u(x,a) - u(y,a)| / |x - y|_1`.
    pub fn lipschitz_constant(&self) -> Rational {
        let mut best = zero();
        for mat in &self.leader_utility {
            for f in 0..self.follower_actions {
                let col = mat.iter().map(|row| &row[f]);
                let hi = col.clone().max().cloned().unwrap_or_else(zero);
                let lo = col.min().cloned().unwrap_or_else(zero);
                if hi.clone() - lo.clone() > best {
                    best = hi - lo;
                }
            }
        }
        best
    }

    /// Copy of the game restricted to a single context.
    pub fn single_context(&self, z: usize) -> Result<StackelbergGame> {
        self.check_context(z)?;
        StackelbergGame::with_type_orders(
            vec![self.contexts[z].clone()],
            vec![self.leader_utility[z].clone()],
            self.follower_utility.iter().map(|s| vec![s[z].clone()]).collect(),
            self.tie_break_order.clone(),
            self.type_tie_break_orders.clone(),
        )
    }

    pub fn to_spec(&self) -> GameSpec {
        let wrap2 = |mat: &Vec<Vec<Rational>>| -> Vec<Vec<RationalCell>> {
            mat.iter()
                .map(|row| row.iter().cloned().map(RationalCell).collect())
                .collect()
        };
        GameSpec {
            leader_actions: self.leader_actions,
            follower_actions: self.follower_actions,
            contexts: self.contexts.clone(),
            tie_break_order: self.tie_break_order.clone(),
            type_tie_break_orders: self.type_tie_break_orders.clone(),
            leader_utility: self.leader_utility.iter().map(wrap2).collect(),
            follower_utilities: self
                .follower_utility
                .iter()
                .map(|slices| slices.iter().map(wrap2).collect())
                .collect(),
        }
    }

    pub fn from_spec(spec: GameSpec) -> Result<Self> {
        let unwrap2 = |mat: Vec<Vec<RationalCell>>| -> Vec<Vec<Rational>> {
            mat.into_iter()
                .map(|row| row.into_iter().map(|c| c.0).collect())
                .collect()
        };
        let game = Self::with_type_orders(
            spec.contexts,
            spec.leader_utility.into_iter().map(unwrap2).collect(),
            spec.follower_utilities
                .into_iter()
                .map(|slices| slices.into_iter().map(unwrap2).collect())
                .collect(),
            spec.tie_break_order,
            spec.type_tie_break_orders,
        )?;
        if game.leader_actions != spec.leader_actions || game.follower_actions != spec.follower_actions {
            return Err(Error::InvalidGame(
                "declared action counts disagree with utility shapes".into(),
            ));
        }
        Ok(game)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GameSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("game serializes")
    }
}

fn expected(mat: &[Vec<Rational>], x: &MixedStrategy, f: usize) -> Rational {
    let mut acc = Rational::zero();
    for (row, w) in mat.iter().zip(x.weights()) {
        if !w.is_zero() {
            acc += &row[f] * w;
        }
    }
    acc
}

/// On-disk game schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameSpec {
    pub leader_actions: usize,
    pub follower_actions: usize,
    pub contexts: Vec<String>,
    pub tie_break_order: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_tie_break_orders: Option<Vec<Vec<usize>>>,
    pub leader_utility: Vec<Vec<Vec<RationalCell>>>,
    pub follower_utilities: Vec<Vec<Vec<Vec<RationalCell>>>>,
}

/// Follower action maximizing type `ty`'s expected utility at context `z`,
/// ties resolved by the type's tie-break order.
pub fn best_response(game: &StackelbergGame, ty: usize, z: usize, x: &MixedStrategy) -> Result<usize> {
    game.check_type(ty)?;
    game.check_context(z)?;
    game.check_strategy(x)?;
    Ok(game.best_response_unchecked(ty, z, x))
}

/// `u(z, x, a_f) = sum_l x[l] * u(z, l, a_f)`.
pub fn leader_utility_mixed(
    game: &StackelbergGame,
    z: usize,
    x: &MixedStrategy,
    follower_action: usize,
) -> Result<Rational> {
    game.check_context(z)?;
    game.check_action(follower_action)?;
    game.check_strategy(x)?;
    Ok(game.leader_utility_unchecked(z, x, follower_action))
}

/// Outcome of the distinctness check for one unordered pair of types.
#[derive(Debug, Clone, PartialEq)]
pub struct TypePairReport {
    pub pair: (usize, usize),
    /// First context where no strategy is optimal against both types.
    pub witness: Option<usize>,
    /// Zero-offset min-max loss at the witness context.
    pub value: Rational,
}

impl TypePairReport {
    pub fn distinct(&self) -> bool {
        self.witness.is_some()
    }
}

/// For each pair of follower types, finds a context where their sets of
/// optimal leader strategies are disjoint. Pairs without one are reported
/// with `witness = None`.
pub fn check_distinct_types(game: &StackelbergGame) -> Vec<TypePairReport> {
    let solver = crate::polytope::Solver::new(game);
    let mut out = Vec::new();
    for i in 0..game.num_types() {
        for j in i + 1..game.num_types() {
            let mut report = TypePairReport { pair: (i, j), witness: None, value: zero() };
            for z in 0..game.num_contexts() {
                let sol = solver
                    .robust_minmax(z, &[(i, zero()), (j, zero())])
                    .expect("two offsets are within caps");
                if sol.value.is_positive() {
                    report.witness = Some(z);
                    report.value = sol.value;
                    break;
                }
            }
            out.push(report);
        }
    }
    out
}
