//! Online play against a realizable follower stream: the SL-optimal learner,
//! the most-mistakes-branch baseline, a zero-offset greedy learner, and the
//! regret-maximizing adaptive adversary.

use crate::dims::{LdimSolver, SlSolver};
use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::hypothesis::{HypothesisClass, VersionSpace};
use crate::polytope::Solver;
use crate::rational::{zero, Rational};
use serde::Deserialize;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    Ssoa,
    Soa,
    Greedy,
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ssoa" => Ok(Self::Ssoa),
            "soa" => Ok(Self::Soa),
            "greedy" | "greedy-minmax" => Ok(Self::Greedy),
            other => Err(Error::InvalidInput(format!("unknown learner `{other}`"))),
        }
    }
}

/// One scripted round; a missing type is chosen adversarially after the
/// learner commits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedRound {
    pub context: usize,
    pub true_type: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Environment {
    Scripted(Vec<ScriptedRound>),
    Adversary,
}

#[derive(Deserialize)]
struct ScriptFile {
    rounds: Vec<ScriptEntry>,
}

#[derive(Deserialize)]
struct ScriptEntry {
    context: String,
    #[serde(rename = "type", default)]
    true_type: Option<usize>,
}

impl Environment {
    /// Parses `{"rounds": [{"context": "1", "type": 0}, {"context": "2"}]}`.
    pub fn scripted_from_json(text: &str, class: &HypothesisClass) -> Result<Self> {
        let file: ScriptFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let rounds = file
            .rounds
            .into_iter()
            .map(|r| {
                let context = class
                    .contexts()
                    .iter()
                    .position(|c| *c == r.context)
                    .ok_or(Error::UnknownContextId(r.context))?;
                if let Some(t) = r.true_type {
                    if t >= class.num_types() {
                        return Err(Error::UnknownType(t));
                    }
                }
                Ok(ScriptedRound { context, true_type: r.true_type })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Environment::Scripted(rounds))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub context: usize,
    pub strategy: MixedStrategy,
    pub predicted_type: Option<usize>,
    pub true_type: usize,
    pub loss: Rational,
    pub cum_regret: Rational,
    /// Version-space size before the update.
    pub vs_size: usize,
    pub attained: bool,
    pub sl_before: Rational,
    pub sl_after: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineTranscript {
    pub rounds: Vec<RoundRecord>,
    pub cumulative_regret: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsoaDiagnostics {
    pub offsets: Vec<(usize, Rational)>,
    pub objective: Rational,
    pub attained: bool,
}

fn require_nonempty(vs: &VersionSpace) -> Result<()> {
    if vs.is_empty() {
        Err(Error::NotRealizable { round: None, detail: "version space is empty".into() })
    } else {
        Ok(())
    }
}

/// Robust min-max strategy with each label offset by the SL value of its
/// restriction.
pub fn ssoa_step(sl: &SlSolver<'_>, vs: &VersionSpace, z: usize) -> Result<(MixedStrategy, SsoaDiagnostics)> {
    require_nonempty(vs)?;
    let offsets = sl.offsets(vs, z)?;
    let sol = sl.solver().robust_minmax(z, &offsets)?;
    Ok((sol.strategy, SsoaDiagnostics { offsets, objective: sol.value, attained: sol.attained }))
}

pub fn ssoa_update(class: &HypothesisClass, vs: &VersionSpace, z: usize, true_type: usize) -> Result<VersionSpace> {
    let next = vs.restrict(class, z, true_type);
    if next.is_empty() {
        return Err(Error::NotRealizable {
            round: None,
            detail: format!("no hypothesis maps context {} to type {true_type}", class.contexts()[z]),
        });
    }
    Ok(next)
}

/// Predicts the label whose restriction has the largest Littlestone
/// dimension (smallest index on ties) and commits optimally against it.
pub fn soa_baseline_step(
    ldim: &LdimSolver<'_>,
    solver: &Solver<'_>,
    vs: &VersionSpace,
    z: usize,
) -> Result<(MixedStrategy, usize)> {
    require_nonempty(vs)?;
    let class = ldim.class();
    let mut best: Option<(usize, usize)> = None;
    for j in vs.project(class, z) {
        let d = ldim.value(&vs.restrict(class, z, j));
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, j));
        }
    }
    let (_, j) = best.expect("nonempty version space has a label");
    let c = solver.optimal_commitment(z, j)?;
    Ok((c.strategy, j))
}

/// Zero-offset robust min-max over the realizable labels.
pub fn greedy_step(solver: &Solver<'_>, class: &HypothesisClass, vs: &VersionSpace, z: usize) -> Result<(MixedStrategy, bool)> {
    require_nonempty(vs)?;
    let offsets: Vec<(usize, Rational)> = vs.project(class, z).into_iter().map(|j| (j, zero())).collect();
    let sol = solver.robust_minmax(z, &offsets)?;
    Ok((sol.strategy, sol.attained))
}

/// Context attaining the SL maximum (first splitting context when the value
/// is zero, context 0 when nothing splits).
pub fn adversary_context(sl: &SlSolver<'_>, vs: &VersionSpace) -> Result<usize> {
    if let Some(z) = sl.best_context(vs)? {
        return Ok(z);
    }
    let class = sl.class();
    Ok((0..class.num_contexts())
        .find(|&z| vs.project(class, z).len() >= 2)
        .unwrap_or(0))
}

/// Type maximizing `loss(z, x, j) + SL(V^{z -> j})`, smallest index on ties.
pub fn adversary_type(sl: &SlSolver<'_>, vs: &VersionSpace, z: usize, x: &MixedStrategy) -> Result<usize> {
    let class = sl.class();
    let mut best: Option<(Rational, usize)> = None;
    for j in vs.project(class, z) {
        let score = sl.solver().loss(z, x, j)? + sl.value(&vs.restrict(class, z, j))?;
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, j));
        }
    }
    best.map(|(_, j)| j).ok_or(Error::NotRealizable { round: None, detail: "version space is empty".into() })
}

/// Scripted rounds without a type: largest instantaneous loss, preferring a
/// type other than the prediction, then the smallest index.
fn scripted_adaptive_type(
    sl: &SlSolver<'_>,
    vs: &VersionSpace,
    z: usize,
    x: &MixedStrategy,
    predicted: Option<usize>,
) -> Result<usize> {
    let class = sl.class();
    let mut best: Option<(Rational, bool, usize)> = None;
    for j in vs.project(class, z) {
        let loss = sl.solver().loss(z, x, j)?;
        let differs = predicted != Some(j);
        let better = match &best {
            None => true,
            Some((l, d, _)) => loss > *l || (loss == *l && differs && !d),
        };
        if better {
            best = Some((loss, differs, j));
        }
    }
    best.map(|(_, _, j)| j).ok_or(Error::NotRealizable { round: None, detail: "version space is empty".into() })
}

/// Simulates `rounds` rounds (at most the script length for scripted
/// environments).
pub fn run_online(
    sl: &SlSolver<'_>,
    learner: LearnerKind,
    env: &Environment,
    rounds: usize,
) -> Result<OnlineTranscript> {
    let class = sl.class();
    let solver = sl.solver();
    let ldim = LdimSolver::new(class);
    let total = match env {
        Environment::Scripted(s) => rounds.min(s.len()),
        Environment::Adversary => rounds,
    };
    let mut vs = class.full();
    let mut cum = zero();
    let mut out = Vec::with_capacity(total);
    for t in 0..total {
        let round = t + 1;
        let tag = |e: Error| match e {
            Error::NotRealizable { detail, .. } => Error::NotRealizable { round: Some(round), detail },
            other => other,
        };
        let z = match env {
            Environment::Scripted(s) => s[t].context,
            Environment::Adversary => adversary_context(sl, &vs)?,
        };
        let (x, predicted, attained) = match learner {
            LearnerKind::Ssoa => {
                let (x, d) = ssoa_step(sl, &vs, z).map_err(tag)?;
                (x, None, d.attained)
            }
            LearnerKind::Soa => {
                let (x, j) = soa_baseline_step(&ldim, solver, &vs, z).map_err(tag)?;
                let attained = solver.optimal_commitment(z, j)?.attained;
                (x, Some(j), attained)
            }
            LearnerKind::Greedy => {
                let (x, attained) = greedy_step(solver, class, &vs, z).map_err(tag)?;
                (x, None, attained)
            }
        };
        let true_type = match env {
            Environment::Scripted(s) => match s[t].true_type {
                Some(j) => j,
                None => scripted_adaptive_type(sl, &vs, z, &x, predicted).map_err(tag)?,
            },
            Environment::Adversary => adversary_type(sl, &vs, z, &x).map_err(tag)?,
        };
        let loss = solver.loss(z, &x, true_type)?;
        let sl_before = sl.value(&vs)?;
        let next = ssoa_update(class, &vs, z, true_type).map_err(tag)?;
        let sl_after = sl.value(&next)?;
        cum += &loss;
        out.push(RoundRecord {
            round,
            context: z,
            strategy: x,
            predicted_type: predicted,
            true_type,
            loss,
            cum_regret: cum.clone(),
            vs_size: vs.len(),
            attained,
            sl_before,
            sl_after,
        });
        vs = next;
    }
    Ok(OnlineTranscript { rounds: out, cumulative_regret: cum })
}
