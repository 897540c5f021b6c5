//! Distributional learning: the consistent-class min-max learner, exact
//! cut-off loss, the hard lower-bound distribution, sample-size sweeps and
//! the single-context utility-maximization experiment.

use crate::dims::{shatter_dim, ShatterKind, ShatterWitness, DEFAULT_MAX_SUBSET};
use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::hypothesis::{HypothesisClass, VersionSpace};
use crate::polytope::{RobustSolution, Solver};
use crate::rational::{int, one, zero, Rational};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Mutex;

/// Finite-support distribution over context indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextDistribution {
    support: Vec<usize>,
    masses: Vec<Rational>,
}

impl ContextDistribution {
    pub fn new(support: Vec<usize>, masses: Vec<Rational>) -> Result<Self> {
        if support.is_empty() || support.len() != masses.len() {
            return Err(Error::InvalidInput("support and masses must be nonempty and aligned".into()));
        }
        if masses.iter().any(|m| m.is_negative()) {
            return Err(Error::InvalidInput("negative mass".into()));
        }
        if masses.iter().sum::<Rational>() != one() {
            return Err(Error::InvalidInput("masses must sum to 1".into()));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() {
            return Err(Error::InvalidInput("duplicate support point".into()));
        }
        Ok(Self { support, masses })
    }

    pub fn uniform(contexts: usize) -> Result<Self> {
        if contexts == 0 {
            return Err(Error::InvalidInput("empty support".into()));
        }
        let w = Rational::new(BigInt::one(), BigInt::from(contexts));
        Self::new((0..contexts).collect(), vec![w; contexts])
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn mass_of(&self, z: usize) -> Rational {
        self.support
            .iter()
            .position(|&s| s == z)
            .map(|i| self.masses[i].clone())
            .unwrap_or_else(zero)
    }

    /// Index into `support` drawn with the exact masses.
    pub fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        draw_weighted(&self.masses, rng)
    }
}

/// Exact inverse-CDF draw: a uniform 64-bit fraction compared against
/// rational cumulative weights.
fn draw_weighted<R: Rng>(weights: &[Rational], rng: &mut R) -> usize {
    let u = Rational::new(BigInt::from(rng.gen::<u64>()), BigInt::one() << 64);
    let mut acc = zero();
    let last = weights.iter().rposition(|w| !w.is_zero()).unwrap_or(0);
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    last
}

/// splitmix64, used to derive independent per-trial seeds.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Zero-offset min-max over the labels the consistent class allows at `z`.
pub fn distributional_learner(
    solver: &Solver<'_>,
    class: &HypothesisClass,
    sample: &[(usize, usize)],
    z: usize,
) -> Result<RobustSolution> {
    let mut vs = class.full();
    for &(c, t) in sample {
        if c >= class.num_contexts() {
            return Err(Error::UnknownContext(c));
        }
        vs = vs.restrict(class, c, t);
    }
    learner_at(solver, class, &vs, z)
}

fn learner_at(solver: &Solver<'_>, class: &HypothesisClass, vs: &VersionSpace, z: usize) -> Result<RobustSolution> {
    if vs.is_empty() {
        return Err(Error::NotRealizable { round: None, detail: "sample is not realizable by the class".into() });
    }
    let offsets: Vec<(usize, Rational)> = vs.project(class, z).into_iter().map(|j| (j, zero())).collect();
    solver.robust_minmax(z, &offsets)
}

/// `P_{z ~ D}[loss(z, policy(z), h*(z)) > gamma]`, computed exactly.
pub fn cutoff_loss(
    solver: &Solver<'_>,
    policy: &dyn Fn(usize) -> MixedStrategy,
    h_star: &[usize],
    dist: &ContextDistribution,
    gamma: &Rational,
) -> Result<Rational> {
    let mut total = zero();
    for (&z, mass) in dist.support().iter().zip(dist.masses()) {
        if solver.loss(z, &policy(z), h_star[z])? > *gamma {
            total += mass;
        }
    }
    Ok(total)
}

/// Evaluates the learner's cut-off loss as a function of which support
/// points were seen; labels come from `h*`, so that set determines the
/// consistent class.
pub struct SeenSetEvaluator<'s, 'g> {
    solver: &'s Solver<'g>,
    class: &'s HypothesisClass,
    dist: ContextDistribution,
    h_star: Vec<usize>,
    gamma: Rational,
    cache: Mutex<HashMap<u64, Rational>>,
}

impl<'s, 'g> SeenSetEvaluator<'s, 'g> {
    pub fn new(
        solver: &'s Solver<'g>,
        class: &'s HypothesisClass,
        dist: ContextDistribution,
        h_star: Vec<usize>,
        gamma: Rational,
    ) -> Result<Self> {
        if dist.support().len() > 20 {
            return Err(Error::Unsupported("support larger than 20 contexts".into()));
        }
        if h_star.len() != class.num_contexts() || !class.hypotheses().contains(&h_star) {
            return Err(Error::NotRealizable { round: None, detail: "target is not in the class".into() });
        }
        Ok(Self { solver, class, dist, h_star, gamma, cache: Mutex::new(HashMap::new()) })
    }

    pub fn distribution(&self) -> &ContextDistribution {
        &self.dist
    }

    /// Cut-off loss after observing the support points in `mask`.
    pub fn loss_for(&self, mask: u64) -> Result<Rational> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&mask) {
            return Ok(v.clone());
        }
        let mut vs = self.class.full();
        for (i, &z) in self.dist.support().iter().enumerate() {
            if mask >> i & 1 == 1 {
                vs = vs.restrict(self.class, z, self.h_star[z]);
            }
        }
        let mut total = zero();
        for (&z, mass) in self.dist.support().iter().zip(self.dist.masses()) {
            let x = learner_at(self.solver, self.class, &vs, z)?.strategy;
            if self.solver.loss(z, &x, self.h_star[z])? > self.gamma {
                total += mass;
            }
        }
        self.cache.lock().expect("cache lock").insert(mask, total.clone());
        Ok(total)
    }

    /// Exact probability that `m` draws leave cut-off loss above `epsilon`,
    /// by inclusion-exclusion over the set of seen support points.
    pub fn failure_probability(&self, m: usize, epsilon: &Rational) -> Result<Rational> {
        let n = self.dist.support().len();
        let masses = self.dist.masses();
        let subset_mass = |mask: u64| -> Rational {
            (0..n).filter(|i| mask >> i & 1 == 1).map(|i| masses[i].clone()).sum()
        };
        let mut total = zero();
        for seen in 0..1u64 << n {
            if self.loss_for(seen)? <= *epsilon {
                continue;
            }
            // P(seen set == S) = sum_{T subset S} (-1)^{|S|-|T|} mass(T)^m
            let mut p = zero();
            let mut t = seen;
            loop {
                let sign = ((seen.count_ones() - t.count_ones()) % 2 == 0) as i64 * 2 - 1;
                p += int(sign) * num::pow(subset_mass(t), m);
                if t == 0 {
                    break;
                }
                t = (t - 1) & seen;
            }
            total += p;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacConfig {
    pub epsilon: Rational,
    pub gamma: Rational,
    pub trials: usize,
    pub sample_sizes: Vec<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacTrial {
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub cutoff_loss: Rational,
    pub failure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacSummary {
    pub m: usize,
    pub failures: usize,
    pub trials: usize,
    pub failure_rate: Rational,
    pub mean_cutoff_loss: Rational,
}

pub fn pac_experiment(eval: &SeenSetEvaluator<'_, '_>, config: &PacConfig) -> Result<(Vec<PacTrial>, Vec<PacSummary>)> {
    check_unit_open(&config.epsilon, "epsilon")?;
    check_unit_open(&config.gamma, "gamma")?;
    if eval.gamma != config.gamma {
        return Err(Error::InvalidInput("evaluator and config disagree on gamma".into()));
    }
    let mut trials = Vec::new();
    let mut summary = Vec::new();
    for (mi, &m) in config.sample_sizes.iter().enumerate() {
        let rows: Vec<Result<PacTrial>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let seed = derive_seed(config.seed, (mi * config.trials + trial) as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut mask = 0u64;
                for _ in 0..m {
                    mask |= 1 << eval.dist.sample_index(&mut rng);
                }
                let loss = eval.loss_for(mask)?;
                let failure = loss > config.epsilon;
                Ok(PacTrial { m, trial, seed, cutoff_loss: loss, failure })
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        let failures = rows.iter().filter(|r| r.failure).count();
        let n = int(config.trials.max(1) as i64);
        let mean = rows.iter().map(|r| r.cutoff_loss.clone()).sum::<Rational>() / &n;
        summary.push(PacSummary {
            m,
            failures,
            trials: config.trials,
            failure_rate: int(failures as i64) / &n,
            mean_cutoff_loss: mean,
        });
        trials.extend(rows);
    }
    Ok((trials, summary))
}

fn check_unit_open(v: &Rational, what: &str) -> Result<()> {
    if v.is_positive() && *v < one() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} must lie in (0, 1)")))
    }
}

/// Smallest `m` whose exact failure probability is at most `target`.
pub fn sufficient_sample_size(
    eval: &SeenSetEvaluator<'_, '_>,
    epsilon: &Rational,
    target: &Rational,
    max_m: usize,
) -> Result<Option<usize>> {
    for m in 0..=max_m {
        if eval.failure_probability(m, epsilon)? <= *target {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Largest increase between consecutive failure rates that a 99% two-sided
/// binomial comparison still attributes to noise.
pub fn binomial_allowance(rate_a: f64, rate_b: f64, trials: usize) -> f64 {
    let pooled = (rate_a + rate_b) / 2.0;
    2.576 * (pooled * (1.0 - pooled) * 2.0 / trials as f64).sqrt()
}

/// Lower-bound distribution on a γ-SN-shattered set `z_1..z_d`: mass
/// `1 - 16 eps` on `z_1`, the rest split evenly.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstance {
    pub distribution: ContextDistribution,
    pub witness: ShatterWitness,
    /// Class rows realizing each of the `2^d` patterns.
    pub targets: Vec<usize>,
}

pub fn hard_instance(
    solver: &Solver<'_>,
    class: &HypothesisClass,
    gamma: &Rational,
    epsilon: &Rational,
) -> Result<HardInstance> {
    if !epsilon.is_positive() || int(16) * epsilon >= one() {
        return Err(Error::InvalidInput("need 0 < 16 epsilon < 1".into()));
    }
    let shattered = shatter_dim(solver, class, gamma, ShatterKind::Natarajan, DEFAULT_MAX_SUBSET)?;
    if shattered.dim < 2 {
        return Err(Error::Unsupported(format!(
            "no SN-shattered set of size 2 at gamma {}",
            crate::rational::format_rational(gamma)
        )));
    }
    Ok(hard_distribution(shattered.witness, epsilon))
}

pub fn hard_distribution(witness: ShatterWitness, epsilon: &Rational) -> HardInstance {
    let d = witness.contexts.len();
    let rest = int(16) * epsilon / int(d as i64 - 1);
    let mut masses = vec![one() - int(16) * epsilon];
    masses.extend(std::iter::repeat_n(rest, d - 1));
    let distribution = ContextDistribution::new(witness.contexts.clone(), masses).expect("masses sum to 1");
    let targets = witness.pattern_hypotheses.clone();
    HardInstance { distribution, witness, targets }
}

/// Probability that `m` draws all land on the heavy context.
pub fn all_first_probability(epsilon: &Rational, m: usize) -> Rational {
    num::pow(one() - int(16) * epsilon, m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErmRow {
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErmSummary {
    pub m: usize,
    pub mean_gap: Rational,
}

/// Per trial: draw `m` types, fit the empirical utility maximizer, and
/// measure its exact expected-utility gap to the distributional optimum.
pub fn context_free_generalization(
    solver: &Solver<'_>,
    z: usize,
    type_distribution: &[Rational],
    sample_sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<(Vec<ErmRow>, Vec<ErmSummary>)> {
    let game = solver.game();
    if type_distribution.len() != game.num_types()
        || type_distribution.iter().any(|p| p.is_negative())
        || type_distribution.iter().sum::<Rational>() != one()
    {
        return Err(Error::InvalidInput("type distribution must cover every type and sum to 1".into()));
    }
    if sample_sizes.contains(&0) || trials == 0 {
        return Err(Error::InvalidInput("sample sizes and trials must be positive".into()));
    }
    let weights: Vec<(usize, Rational)> = type_distribution.iter().cloned().enumerate().collect();
    let optimum = solver.weighted_utility_maximizer(z, &weights)?.supremum;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (mi, &m) in sample_sizes.iter().enumerate() {
        let batch: Vec<Result<ErmRow>> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let seed = derive_seed(seed, (mi * trials + trial) as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sample: Vec<usize> = (0..m).map(|_| draw_weighted(type_distribution, &mut rng)).collect();
                let fit = solver.empirical_utility_maximizer(z, &sample)?;
                let achieved = solver.expected_utility(z, &fit.strategy, &weights);
                Ok(ErmRow { m, trial, seed, gap: &optimum - achieved })
            })
            .collect();
        let batch = batch.into_iter().collect::<Result<Vec<_>>>()?;
        let mean = batch.iter().map(|r| r.gap.clone()).sum::<Rational>() / int(trials as i64);
        summary.push(ErmSummary { m, mean_gap: mean });
        rows.extend(batch);
    }
    Ok((rows, summary))
}

/// Least-squares slope of `ln(gap)` against `ln(m)`; `None` when a gap is
/// zero or fewer than two points are given.
pub fn log_log_slope(summary: &[ErmSummary]) -> Option<f64> {
    if summary.len() < 2 {
        return None;
    }
    let mut pts = Vec::new();
    for s in summary {
        let g = crate::rational::to_f64(&s.mean_gap);
        if g <= 0.0 {
            return None;
        }
        pts.push(((s.m as f64).ln(), g.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::{permutation_class, permutation_game, soa_example_class};
    use crate::rational::rat;

    #[test]
    fn pinned_sample_gives_commitment() {
        let g = permutation_game(3).unwrap();
        let c = permutation_class(3).unwrap();
        let s = Solver::new(&g);
        let sol = distributional_learner(&s, &c, &[(0, 2), (1, 0)], 2).unwrap();
        assert_eq!(sol.value, zero());
        assert_eq!(sol.strategy, MixedStrategy::pure(3, 1));
    }

    #[test]
    fn soa_context_two_minmax() {
        let (c, g) = soa_example_class();
        let s = Solver::new(&g);
        // restricting context 1 to type 1 leaves labels {0, 2} at context 2
        let sol = distributional_learner(&s, &c, &[(0, 1)], 1).unwrap();
        assert_eq!(sol.value, rat(1, 2));
        assert_eq!(sol.strategy.weights(), &[rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn cutoff_loss_sums_masses() {
        let g = permutation_game(2).unwrap();
        let s = Solver::new(&g);
        let d = ContextDistribution::new(vec![0, 1], vec![rat(1, 4), rat(3, 4)]).unwrap();
        let h = vec![0, 1];
        let optimal = |z: usize| MixedStrategy::pure(2, h[z]);
        assert_eq!(cutoff_loss(&s, &optimal, &h, &d, &rat(1, 2)).unwrap(), zero());
        let bad = |z: usize| if z == 0 { MixedStrategy::pure(2, 1) } else { MixedStrategy::pure(2, 1) };
        assert_eq!(cutoff_loss(&s, &bad, &h, &d, &rat(1, 2)).unwrap(), rat(1, 4));
    }

    #[test]
    fn hard_masses() {
        let w = ShatterWitness { contexts: vec![3, 5], ..Default::default() };
        let h = hard_distribution(w, &rat(1, 32));
        assert_eq!(h.distribution.masses(), &[rat(1, 2), rat(1, 2)]);
        assert_eq!(all_first_probability(&rat(1, 32), 3), rat(1, 8));
    }

    #[test]
    fn failure_probability_extremes() {
        let g = permutation_game(3).unwrap();
        let c = permutation_class(3).unwrap();
        let s = Solver::new(&g);
        let ev = SeenSetEvaluator::new(&s, &c, ContextDistribution::uniform(3).unwrap(), vec![0, 1, 2], rat(1, 4)).unwrap();
        assert_eq!(ev.failure_probability(0, &rat(1, 10)).unwrap(), one());
        let p5 = ev.failure_probability(5, &rat(1, 10)).unwrap();
        let p10 = ev.failure_probability(10, &rat(1, 10)).unwrap();
        assert!(p10 < p5 && p5 < one());
    }

    #[test]
    fn seeds_are_distinct() {
        let a: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(a.len(), b.len());
    }
}
