//! LPs over follower best-response regions: optimal commitment, leader loss,
//! robust min-max with additive offsets, approximate extreme points and
//! context-free empirical utility maximization.
//!
//! A region is the set of leader strategies for which a follower type plays a
//! given action. Against a rival that precedes it in the tie-break order the
//! action must win strictly, so regions are neither open nor closed in
//! general. Every optimization runs over the closure; the reported value is
//! then the true supremum or infimum, and the returned strategy is refined
//! back into the true region (exactly when possible, otherwise within
//! `delta` in L1 distance, flagged `attained = false`).

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, StackelbergGame};
use crate::lp::{solve_lp, Constraint, Direction, LinearProgram, LpOutcome, Relation, VarBound};
use crate::rational::{int, one, rat, zero, Rational};
use num::{Signed, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

pub const MAX_OFFSETS: usize = 8;
pub const MAX_PROFILES: u64 = 1_000_000;

/// Default distance used when a closure optimum has to be pulled inside a region.
pub fn default_delta() -> Rational {
    rat(1, 1_000_000)
}

/// One inequality `coeffs . x >= 0` (or `> 0` when `strict`).
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub coeffs: Vec<Rational>,
    pub rival: usize,
    pub strict: bool,
}

impl Halfspace {
    fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseRegion {
    pub context: usize,
    pub type_index: usize,
    pub follower_action: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl BestResponseRegion {
    /// Membership under exact tie-breaking.
    pub fn contains(&self, x: &MixedStrategy) -> bool {
        self.halfspaces.iter().all(|h| {
            let v = h.eval(x.weights());
            if h.strict {
                v.is_positive()
            } else {
                !v.is_negative()
            }
        })
    }

    /// Membership in the closure (all inequalities weak).
    pub fn closure_contains(&self, x: &MixedStrategy) -> bool {
        self.halfspaces.iter().all(|h| !h.eval(x.weights()).is_negative())
    }

    pub fn closure_is_empty(&self, leader_actions: usize) -> bool {
        let rows: Vec<Halfspace> = self
            .halfspaces
            .iter()
            .map(|h| Halfspace { strict: false, ..h.clone() })
            .collect();
        interior_point(leader_actions, &rows).is_none()
    }

    pub fn is_empty(&self, leader_actions: usize) -> bool {
        interior_point(leader_actions, &self.halfspaces).is_none()
    }
}

pub fn best_response_region(
    game: &StackelbergGame,
    context: usize,
    type_index: usize,
    follower_action: usize,
) -> Result<BestResponseRegion> {
    game.check_context(context)?;
    game.check_type(type_index)?;
    game.check_action(follower_action)?;
    Ok(region_unchecked(game, context, type_index, follower_action))
}

fn region_unchecked(game: &StackelbergGame, z: usize, ty: usize, a: usize) -> BestResponseRegion {
    let mat = game.follower_matrix(ty, z);
    let halfspaces = (0..game.follower_actions())
        .filter(|&b| b != a)
        .map(|b| Halfspace {
            coeffs: mat.iter().map(|row| &row[a] - &row[b]).collect(),
            rival: b,
            strict: game.tie_precedes(ty, b, a),
        })
        .collect();
    BestResponseRegion { context: z, type_index: ty, follower_action: a, halfspaces }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = zero();
    for (p, q) in a.iter().zip(b) {
        if !p.is_zero() && !q.is_zero() {
            acc += p * q;
        }
    }
    acc
}

/// Extra decision variables and constraints layered on top of the strategy
/// variables `x[0..m]`. Objective and constraint rows span `m + aux` columns.
struct Problem {
    direction: Direction,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    aux_bounds: Vec<VarBound>,
}

impl Problem {
    fn width(&self, m: usize) -> usize {
        m + self.aux_bounds.len()
    }
}

/// Builds the LP over `[x | aux | s?]`: region rows (strict rows get `- s` when
/// `with_s`), simplex constraints, the problem's own rows, and optionally the
/// objective pinned at `fix`.
fn build(
    m: usize,
    rows: &[Halfspace],
    problem: &Problem,
    with_s: bool,
    fix: Option<&Rational>,
) -> LinearProgram {
    let w = problem.width(m);
    let n = w + usize::from(with_s);
    let mut lp = LinearProgram::new(problem.direction, n);
    for (i, b) in problem.aux_bounds.iter().enumerate() {
        lp.bounds[m + i] = *b;
    }
    let pad = |coeffs: &[Rational]| {
        let mut v = coeffs.to_vec();
        v.resize(n, zero());
        v
    };
    for h in rows {
        let mut c = pad(&h.coeffs);
        if with_s && h.strict {
            c[w] = int(-1);
        }
        lp.add(c, Relation::Ge, zero());
    }
    let mut simplex = vec![zero(); n];
    simplex[..m].iter_mut().for_each(|v| *v = one());
    lp.add(simplex, Relation::Eq, one());
    for c in &problem.constraints {
        lp.add(pad(&c.coeffs), c.relation, c.rhs.clone());
    }
    if with_s {
        lp.bounds[w] = VarBound::Free;
        let mut cap = vec![zero(); n];
        cap[w] = one();
        lp.add(cap, Relation::Le, one());
        lp.direction = Direction::Maximize;
        let mut obj = vec![zero(); n];
        obj[w] = one();
        lp.objective = obj;
        if let Some(v) = fix {
            let rel = match problem.direction {
                Direction::Maximize => Relation::Ge,
                Direction::Minimize => Relation::Le,
            };
            lp.add(pad(&problem.objective), rel, v.clone());
        }
    } else {
        lp.objective = pad(&problem.objective);
    }
    lp
}

fn no_problem() -> Problem {
    Problem {
        direction: Direction::Maximize,
        objective: Vec::new(),
        constraints: Vec::new(),
        aux_bounds: Vec::new(),
    }
}

/// `true` when some strategy satisfies every strict row strictly and every
/// weak row weakly.
pub(crate) fn has_strict_point(m: usize, rows: &[Halfspace]) -> bool {
    interior_point(m, rows).is_some()
}

/// A point satisfying every strict row strictly, or `None` when the true
/// (tie-consistent) region is empty.
fn interior_point(m: usize, rows: &[Halfspace]) -> Option<Vec<Rational>> {
    let mut p = no_problem();
    p.objective = vec![zero(); m];
    let lp = build(m, rows, &p, true, None);
    let (s, point) = solve_lp(&lp).optimal()?;
    if s.is_positive() {
        Some(point[..m].to_vec())
    } else {
        None
    }
}

fn strictly_inside(rows: &[Halfspace], x: &[Rational]) -> bool {
    rows.iter().all(|h| !h.strict || h.eval(x).is_positive())
}

/// Moves `from` toward `interior` by at most `delta` in L1 distance.
fn pull_inside(from: &[Rational], interior: &[Rational], delta: &Rational) -> Vec<Rational> {
    let dist: Rational = from.iter().zip(interior).map(|(a, b)| (a - b).abs()).sum();
    let lambda = if dist <= *delta { one() } else { delta / dist };
    from.iter()
        .zip(interior)
        .map(|(a, b)| a + &lambda * (b - a))
        .collect()
}

struct RegionOptimum {
    value: Rational,
    /// Full solution `[x | aux]` at the closure optimum (aux valid for the
    /// closure point only).
    x: Vec<Rational>,
    attained: bool,
}

/// Optimizes `problem` over the region defined by `rows`, whose true region
/// must contain `interior`.
fn optimize(
    m: usize,
    rows: &[Halfspace],
    interior: &[Rational],
    problem: &Problem,
    delta: &Rational,
) -> Option<RegionOptimum> {
    let lp = build(m, rows, problem, false, None);
    let (value, point) = match solve_lp(&lp) {
        LpOutcome::Optimal { value, point } => (value, point),
        _ => return None,
    };
    let x0 = point[..m].to_vec();
    if strictly_inside(rows, &x0) {
        return Some(RegionOptimum { value, x: x0, attained: true });
    }
    let lp = build(m, rows, problem, true, Some(&value));
    if let Some((s, p)) = solve_lp(&lp).optimal() {
        if s.is_positive() {
            return Some(RegionOptimum { value, x: p[..m].to_vec(), attained: true });
        }
    }
    Some(RegionOptimum { value, x: pull_inside(&x0, interior, delta), attained: false })
}

/// Optimal commitment against one follower type at one context.
#[derive(Debug, Clone, PartialEq)]
pub struct Commitment {
    pub strategy: MixedStrategy,
    pub value: Rational,
    pub follower_action: usize,
    pub attained: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustSolution {
    pub value: Rational,
    pub strategy: MixedStrategy,
    pub attained: bool,
    /// Follower action each offset type plays in the chosen region profile,
    /// in the canonical (sorted-by-type) offset order.
    pub responses: Vec<(usize, usize)>,
}

/// Utility-maximizing strategy against a weighted set of types.
#[derive(Debug, Clone, PartialEq)]
pub struct ErmSolution {
    pub strategy: MixedStrategy,
    /// Weighted utility earned at `strategy` under exact tie-breaking.
    pub value: Rational,
    /// Supremum of the weighted utility over all strategies.
    pub supremum: Rational,
    pub attained: bool,
}

type MinmaxKey = (usize, Vec<(usize, Rational)>);

/// Caches per-(context, type) commitments and robust min-max solutions.
pub struct Solver<'g> {
    game: &'g StackelbergGame,
    delta: Rational,
    max_profiles: u64,
    commitments: Vec<OnceLock<Commitment>>,
    feasible: Vec<OnceLock<Vec<(usize, Vec<Rational>)>>>,
    minmax: Mutex<HashMap<MinmaxKey, RobustSolution>>,
}

impl<'g> Solver<'g> {
    pub fn new(game: &'g StackelbergGame) -> Self {
        Self::with_delta(game, default_delta())
    }

    pub fn with_delta(game: &'g StackelbergGame, delta: Rational) -> Self {
        let cells = game.num_contexts() * game.num_types();
        Self {
            game,
            delta,
            max_profiles: MAX_PROFILES,
            commitments: (0..cells).map(|_| OnceLock::new()).collect(),
            feasible: (0..cells).map(|_| OnceLock::new()).collect(),
            minmax: Mutex::new(HashMap::new()),
        }
    }

    pub fn game(&self) -> &'g StackelbergGame {
        self.game
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// Lowers (or raises) the response-profile enumeration cap.
    pub fn with_max_profiles(mut self, cap: u64) -> Self {
        self.max_profiles = cap;
        self
    }

    pub fn max_profiles(&self) -> u64 {
        self.max_profiles
    }

    fn cell(&self, z: usize, ty: usize) -> usize {
        z * self.game.num_types() + ty
    }

    /// Actions with a nonempty tie-consistent region, each with an interior point.
    fn feasible_actions(&self, z: usize, ty: usize) -> &[(usize, Vec<Rational>)] {
        self.feasible[self.cell(z, ty)].get_or_init(|| {
            let m = self.game.leader_actions();
            (0..self.game.follower_actions())
                .filter_map(|a| {
                    let r = region_unchecked(self.game, z, ty, a);
                    interior_point(m, &r.halfspaces).map(|p| (a, p))
                })
                .collect()
        })
    }

    pub fn optimal_commitment(&self, z: usize, ty: usize) -> Result<Commitment> {
        self.game.check_context(z)?;
        self.game.check_type(ty)?;
        Ok(self.commitment(z, ty).clone())
    }

    pub(crate) fn commitment(&self, z: usize, ty: usize) -> &Commitment {
        self.commitments[self.cell(z, ty)].get_or_init(|| {
            let m = self.game.leader_actions();
            let mut best: Option<Commitment> = None;
            for (a, interior) in self.feasible_actions(z, ty) {
                let region = region_unchecked(self.game, z, ty, *a);
                let problem = Problem {
                    direction: Direction::Maximize,
                    objective: self.game.leader_matrix(z).iter().map(|row| row[*a].clone()).collect(),
                    constraints: Vec::new(),
                    aux_bounds: Vec::new(),
                };
                let Some(opt) = optimize(m, &region.halfspaces, interior, &problem, &self.delta) else {
                    continue;
                };
                let better = match &best {
                    None => true,
                    Some(b) => opt.value > b.value || (opt.value == b.value && opt.attained && !b.attained),
                };
                if better {
                    best = Some(Commitment {
                        strategy: MixedStrategy::new_unchecked(opt.x),
                        value: opt.value,
                        follower_action: *a,
                        attained: opt.attained,
                    });
                }
            }
            best.expect("some follower action is a best response somewhere")
        })
    }

    pub fn commitment_value(&self, z: usize, ty: usize) -> &Rational {
        &self.commitment(z, ty).value
    }

    pub fn loss(&self, z: usize, x: &MixedStrategy, ty: usize) -> Result<Rational> {
        self.game.check_context(z)?;
        self.game.check_type(ty)?;
        self.game.check_strategy(x)?;
        Ok(self.loss_unchecked(z, x, ty))
    }

    pub(crate) fn loss_unchecked(&self, z: usize, x: &MixedStrategy, ty: usize) -> Rational {
        let f = self.game.best_response_unchecked(ty, z, x);
        self.commitment_value(z, ty) - self.game.leader_utility_unchecked(z, x, f)
    }

    /// `inf_x max_j (loss(z, x, j) + c_j)`.
    pub fn robust_minmax(&self, z: usize, offsets: &[(usize, Rational)]) -> Result<RobustSolution> {
        self.game.check_context(z)?;
        if offsets.is_empty() {
            return Err(Error::InvalidInput("robust min-max needs at least one offset".into()));
        }
        let mut canon: Vec<(usize, Rational)> = Vec::with_capacity(offsets.len());
        for (ty, c) in offsets {
            self.game.check_type(*ty)?;
            if c.is_negative() {
                return Err(Error::InvalidInput("offsets must be nonnegative".into()));
            }
            canon.push((*ty, c.clone()));
        }
        canon.sort();
        canon.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                if later.1 > earlier.1 {
                    earlier.1 = later.1.clone();
                }
                true
            } else {
                false
            }
        });
        if canon.len() > MAX_OFFSETS {
            return Err(Error::CapExceeded(format!(
                "{} offset types exceed the limit of {MAX_OFFSETS}",
                canon.len()
            )));
        }
        let k = self.game.follower_actions() as u64;
        let profiles = k.checked_pow(canon.len() as u32).unwrap_or(u64::MAX);
        if profiles > self.max_profiles {
            return Err(Error::CapExceeded(format!(
                "{profiles} response profiles exceed the limit of {}",
                self.max_profiles
            )));
        }
        let key = (z, canon);
        if let Some(hit) = self.minmax.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let sol = self.minmax_uncached(z, &key.1);
        self.minmax.lock().expect("cache lock").insert(key, sol.clone());
        Ok(sol)
    }

    fn minmax_uncached(&self, z: usize, offsets: &[(usize, Rational)]) -> RobustSolution {
        let m = self.game.leader_actions();
        let floor = offsets.iter().map(|(_, c)| c.clone()).max().expect("nonempty");
        if offsets.len() == 1 {
            let (ty, c) = &offsets[0];
            let com = self.commitment(z, *ty);
            return RobustSolution {
                value: c.clone(),
                strategy: com.strategy.clone(),
                attained: com.attained,
                responses: vec![(*ty, com.follower_action)],
            };
        }
        let lower = |a: usize| -> Vec<Rational> {
            self.game.leader_matrix(z).iter().map(|row| row[a].clone()).collect()
        };
        let mut best: Option<RobustSolution> = None;
        let mut rows: Vec<Halfspace> = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        self.profile_dfs(z, offsets, 0, &mut rows, &mut chosen, None, &mut |rows, chosen, interior| {
            // min t  s.t.  t + U[.][a_j] . x >= u*_j + c_j
            let mut constraints = Vec::with_capacity(offsets.len());
            for ((ty, c), &a) in offsets.iter().zip(chosen) {
                let mut coeffs = lower(a);
                coeffs.push(one());
                let rhs = self.commitment_value(z, *ty) + c;
                constraints.push(Constraint { coeffs, relation: Relation::Ge, rhs });
            }
            let mut objective = vec![zero(); m];
            objective.push(one());
            let problem = Problem {
                direction: Direction::Minimize,
                objective,
                constraints,
                aux_bounds: vec![VarBound::Free],
            };
            let Some(opt) = optimize(m, rows, interior, &problem, &self.delta) else {
                return false;
            };
            let better = match &best {
                None => true,
                Some(b) => opt.value < b.value || (opt.value == b.value && opt.attained && !b.attained),
            };
            if better {
                best = Some(RobustSolution {
                    value: opt.value,
                    strategy: MixedStrategy::new_unchecked(opt.x),
                    attained: opt.attained,
                    responses: offsets.iter().map(|(t, _)| *t).zip(chosen.iter().copied()).collect(),
                });
            }
            // Nothing can beat the largest offset with an attained point.
            best.as_ref().is_some_and(|b| b.attained && b.value == floor)
        });
        best.expect("the simplex is covered by response profiles")
    }

    /// Enumerates joint response profiles with nonempty tie-consistent
    /// regions. `visit` returns `true` to stop the search.
    #[allow(clippy::too_many_arguments)]
    fn profile_dfs(
        &self,
        z: usize,
        types: &[(usize, Rational)],
        depth: usize,
        rows: &mut Vec<Halfspace>,
        chosen: &mut Vec<usize>,
        interior: Option<&[Rational]>,
        visit: &mut dyn FnMut(&[Halfspace], &[usize], &[Rational]) -> bool,
    ) -> bool {
        if depth == types.len() {
            return visit(rows, chosen, interior.expect("nonempty profile"));
        }
        let m = self.game.leader_actions();
        let ty = types[depth].0;
        for (a, single_interior) in self.feasible_actions(z, ty) {
            let region = region_unchecked(self.game, z, ty, *a);
            let before = rows.len();
            rows.extend(region.halfspaces);
            let point = if depth == 0 {
                Some(single_interior.clone())
            } else {
                interior_point(m, rows)
            };
            if let Some(p) = point {
                chosen.push(*a);
                let stop = self.profile_dfs(z, types, depth + 1, rows, chosen, Some(&p), visit);
                chosen.pop();
                if stop {
                    rows.truncate(before);
                    return true;
                }
            }
            rows.truncate(before);
        }
        false
    }

    /// Every joint response profile of `types` at `z` whose tie-consistent
    /// region is nonempty, with the stacked region rows.
    pub(crate) fn response_profiles(&self, z: usize, types: &[usize]) -> Vec<(Vec<usize>, Vec<Halfspace>)> {
        let keyed: Vec<(usize, Rational)> = types.iter().map(|&t| (t, zero())).collect();
        let mut out = Vec::new();
        let mut rows = Vec::new();
        let mut chosen = Vec::new();
        self.profile_dfs(z, &keyed, 0, &mut rows, &mut chosen, None, &mut |rows, chosen, _| {
            out.push((chosen.to_vec(), rows.to_vec()));
            false
        });
        out
    }

    /// Vertices of every nonempty region at `z`, each pulled into its true
    /// region when tie-breaking excludes it.
    pub fn delta_extreme_points(&self, z: usize, delta: &Rational) -> Result<Vec<MixedStrategy>> {
        self.game.check_context(z)?;
        if !delta.is_positive() {
            return Err(Error::InvalidInput("delta must be positive".into()));
        }
        let m = self.game.leader_actions();
        let mut out: Vec<MixedStrategy> = Vec::new();
        for ty in 0..self.game.num_types() {
            for (a, interior) in self.feasible_actions(z, ty) {
                let region = region_unchecked(self.game, z, ty, *a);
                for v in region_vertices(m, &region.halfspaces) {
                    let p = if strictly_inside(&region.halfspaces, &v) {
                        v
                    } else {
                        pull_inside(&v, interior, delta)
                    };
                    let s = MixedStrategy::new_unchecked(p);
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Strategy maximizing the average leader utility over a sample of
    /// follower types at context `z`.
    pub fn empirical_utility_maximizer(&self, z: usize, sample: &[usize]) -> Result<ErmSolution> {
        if sample.is_empty() {
            return Err(Error::InvalidInput("empty type sample".into()));
        }
        let mut counts: Vec<(usize, Rational)> = Vec::new();
        for &ty in sample {
            self.game.check_type(ty)?;
            match counts.iter_mut().find(|(t, _)| *t == ty) {
                Some(entry) => entry.1 += one(),
                None => counts.push((ty, one())),
            }
        }
        let total = int(sample.len() as i64);
        for entry in counts.iter_mut() {
            entry.1 = &entry.1 / &total;
        }
        self.weighted_utility_maximizer(z, &counts)
    }

    /// Strategy maximizing `sum_t w_t u(z, x, b_t(x))` for nonnegative type
    /// weights. Among response profiles the one whose returned point earns
    /// the most is kept; `supremum` is the exact closure optimum.
    pub fn weighted_utility_maximizer(&self, z: usize, weights: &[(usize, Rational)]) -> Result<ErmSolution> {
        self.game.check_context(z)?;
        let mut counts: Vec<(usize, Rational)> = Vec::new();
        for (ty, w) in weights {
            self.game.check_type(*ty)?;
            if w.is_negative() {
                return Err(Error::InvalidInput("type weights must be nonnegative".into()));
            }
            if w.is_zero() {
                continue;
            }
            match counts.iter_mut().find(|(t, _)| t == ty) {
                Some(entry) => entry.1 += w,
                None => counts.push((*ty, w.clone())),
            }
        }
        if counts.is_empty() {
            return Err(Error::InvalidInput("no type carries positive weight".into()));
        }
        counts.sort();
        let k = self.game.follower_actions() as u64;
        let profiles = k.checked_pow(counts.len() as u32).unwrap_or(u64::MAX);
        if counts.len() > MAX_OFFSETS || profiles > self.max_profiles {
            return Err(Error::CapExceeded(format!(
                "{} distinct types exceed the profile limit",
                counts.len()
            )));
        }
        let m = self.game.leader_actions();
        let mut best: Option<ErmSolution> = None;
        let mut supremum: Option<Rational> = None;
        let mut rows = Vec::new();
        let mut chosen = Vec::new();
        self.profile_dfs(z, &counts, 0, &mut rows, &mut chosen, None, &mut |rows, chosen, interior| {
            let mut objective = vec![zero(); m];
            for ((_, w), &a) in counts.iter().zip(chosen) {
                for (l, row) in self.game.leader_matrix(z).iter().enumerate() {
                    objective[l] += w * &row[a];
                }
            }
            let problem = Problem {
                direction: Direction::Maximize,
                objective,
                constraints: Vec::new(),
                aux_bounds: Vec::new(),
            };
            if let Some(opt) = optimize(m, rows, interior, &problem, &self.delta) {
                if supremum.as_ref().is_none_or(|s| opt.value > *s) {
                    supremum = Some(opt.value.clone());
                }
                let x = MixedStrategy::new_unchecked(opt.x);
                let actual = self.average_utility(z, &x, &counts);
                let better = match &best {
                    None => true,
                    Some(b) => actual > b.value || (actual == b.value && opt.attained && !b.attained),
                };
                if better {
                    best = Some(ErmSolution { strategy: x, value: actual, supremum: zero(), attained: opt.attained });
                }
            }
            false
        });
        let mut sol = best.expect("profiles cover the simplex");
        sol.supremum = supremum.expect("some profile is feasible");
        Ok(sol)
    }

    /// `sum_t w_t u(z, x, b_t(x))`.
    pub fn expected_utility(&self, z: usize, x: &MixedStrategy, weights: &[(usize, Rational)]) -> Rational {
        self.average_utility(z, x, weights)
    }

    fn average_utility(&self, z: usize, x: &MixedStrategy, weights: &[(usize, Rational)]) -> Rational {
        weights
            .iter()
            .map(|(ty, w)| {
                let f = self.game.best_response_unchecked(*ty, z, x);
                w * self.game.leader_utility_unchecked(z, x, f)
            })
            .sum()
    }
}

/// Vertices of `{x in simplex : rows . x >= 0}` by solving every choice of
/// `m - 1` tight constraints together with `sum x = 1`.
fn region_vertices(m: usize, rows: &[Halfspace]) -> Vec<Vec<Rational>> {
    let mut cons: Vec<Vec<Rational>> = rows.iter().map(|h| h.coeffs.clone()).collect();
    for l in 0..m {
        let mut e = vec![zero(); m];
        e[l] = one();
        cons.push(e);
    }
    let mut out: Vec<Vec<Rational>> = Vec::new();
    let mut pick = Vec::with_capacity(m.saturating_sub(1));
    fn rec(
        start: usize,
        need: usize,
        m: usize,
        cons: &[Vec<Rational>],
        pick: &mut Vec<usize>,
        out: &mut Vec<Vec<Rational>>,
    ) {
        if pick.len() == need {
            let mut mat: Vec<Vec<Rational>> = pick
                .iter()
                .map(|&i| {
                    let mut r = cons[i].clone();
                    r.push(zero());
                    r
                })
                .collect();
            let mut total = vec![one(); m];
            total.push(one());
            mat.push(total);
            if let Some(x) = solve_square(mat) {
                let ok = x.iter().all(|v| !v.is_negative())
                    && cons.iter().all(|c| !dot(c, &x).is_negative());
                if ok && !out.contains(&x) {
                    out.push(x);
                }
            }
            return;
        }
        for i in start..cons.len() {
            pick.push(i);
            rec(i + 1, need, m, cons, pick, out);
            pick.pop();
        }
    }
    rec(0, m - 1, m, &cons, &mut pick, &mut out);
    out
}

/// Gauss-Jordan on an augmented `n x (n+1)` system; `None` when singular.
fn solve_square(mut mat: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let n = mat.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, p);
        let pv = mat[col][col].clone();
        for v in mat[col].iter_mut() {
            *v /= &pv;
        }
        let prow = mat[col].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
        }
    }
    Some(mat.into_iter().map(|r| r[n].clone()).collect())
}

pub fn optimal_commitment(game: &StackelbergGame, context: usize, type_index: usize) -> Result<Commitment> {
    Solver::new(game).optimal_commitment(context, type_index)
}

pub fn loss(game: &StackelbergGame, context: usize, x: &MixedStrategy, type_index: usize) -> Result<Rational> {
    Solver::new(game).loss(context, x, type_index)
}

pub fn robust_minmax(
    game: &StackelbergGame,
    context: usize,
    offsets: &[(usize, Rational)],
) -> Result<RobustSolution> {
    Solver::new(game).robust_minmax(context, offsets)
}

pub fn delta_extreme_points(game: &StackelbergGame, context: usize, delta: &Rational) -> Result<Vec<MixedStrategy>> {
    Solver::new(game).delta_extreme_points(context, delta)
}

pub fn empirical_utility_maximizer(
    game: &StackelbergGame,
    context: usize,
    type_sample: &[usize],
) -> Result<(MixedStrategy, Rational)> {
    Solver::new(game)
        .empirical_utility_maximizer(context, type_sample)
        .map(|s| (s.strategy, s.value))
}

/// `9 m log2(4 m k^2)`, exact when the argument is a power of two and
/// otherwise rounded to nine decimal places.
pub fn pdim_bound(game: &StackelbergGame) -> Rational {
    pdim_bound_for(game.leader_actions() as u64, game.follower_actions() as u64)
}

pub fn pdim_bound_for(m: u64, k: u64) -> Rational {
    let arg = 4 * m * k * k;
    let scale = int(9 * m as i64);
    if arg.is_power_of_two() {
        return scale * int(arg.trailing_zeros() as i64);
    }
    let approx = 9.0 * m as f64 * (arg as f64).log2();
    let nanos = (approx * 1e9).round() as i64;
    rat(nanos, 1_000_000_000)
}
