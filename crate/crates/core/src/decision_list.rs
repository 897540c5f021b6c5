//! Multiclass decision lists over boolean inputs and the tiered online
//! learner that demotes wrong rules level by level.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Literal `x_var == polarity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub polarity: bool,
}

impl Literal {
    pub fn holds(&self, z: &[bool]) -> bool {
        z[self.var] == self.polarity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub literal: Literal,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionList {
    n: usize,
    k: usize,
    rules: Vec<Rule>,
    default: usize,
}

#[derive(Serialize, Deserialize)]
struct DecisionListSpec {
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    rules: Vec<(usize, u8, usize)>,
    default: usize,
}

impl DecisionList {
    pub fn new(n: usize, k: usize, rules: Vec<Rule>, default: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidInput("need n >= 1 and K >= 1".into()));
        }
        if default >= k {
            return Err(Error::InvalidInput(format!("default label {default} not below K = {k}")));
        }
        for r in &rules {
            if r.literal.var >= n || r.label >= k {
                return Err(Error::InvalidInput(format!("rule {r:?} out of range for n = {n}, K = {k}")));
            }
        }
        Ok(Self { n, k, rules, default })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_labels(&self) -> usize {
        self.k
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn default_label(&self) -> usize {
        self.default
    }

    /// Number of if-then rules, not counting the default.
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn evaluate(&self, z: &[bool]) -> Result<usize> {
        if z.len() != self.n {
            return Err(Error::InvalidInput(format!("input has {} bits, expected {}", z.len(), self.n)));
        }
        Ok(self.rules.iter().find(|r| r.literal.holds(z)).map_or(self.default, |r| r.label))
    }

    /// `{"n":..,"K":..,"rules":[[var, polarity, label], ...],"default":..}`;
    /// polarity 1 means the rule fires when the variable is set.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DecisionListSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut rules = Vec::with_capacity(spec.rules.len());
        for (var, pol, label) in spec.rules {
            if pol > 1 {
                return Err(Error::Parse(format!("polarity must be 0 or 1, got {pol}")));
            }
            rules.push(Rule { literal: Literal { var, polarity: pol == 1 }, label });
        }
        Self::new(spec.n, spec.k, rules, spec.default)
    }

    pub fn to_json(&self) -> String {
        let spec = DecisionListSpec {
            n: self.n,
            k: self.k,
            rules: self.rules.iter().map(|r| (r.literal.var, r.literal.polarity as u8, r.label)).collect(),
            default: self.default,
        };
        serde_json::to_string(&spec).expect("serializable")
    }
}

/// All `2^n` inputs, bit `i` of the counter giving variable `i`.
pub fn all_inputs(n: usize) -> Vec<Vec<bool>> {
    (0..1usize << n).map(|b| (0..n).map(|i| b >> i & 1 == 1).collect()).collect()
}

/// Where the wrong rules of a fired level go after a mistake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Demotion {
    /// Into the following level, opening one only past the last.
    #[default]
    MergeNext,
    /// Into a fresh level inserted right after the fired one.
    NewLevel,
}

/// Ordered levels of rules; a prediction scans levels in order and rules
/// within a level in `(var, polarity, label)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieredHypothesis {
    n: usize,
    k: usize,
    levels: Vec<Vec<Rule>>,
    demotion: Demotion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DlPrediction {
    pub label: usize,
    pub level: usize,
}

impl TieredHypothesis {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::with_demotion(n, k, Demotion::default())
    }

    pub fn with_demotion(n: usize, k: usize, demotion: Demotion) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidInput("need n >= 1 and K >= 1".into()));
        }
        let mut all = Vec::with_capacity(2 * n * k);
        for var in 0..n {
            for polarity in [false, true] {
                for label in 0..k {
                    all.push(Rule { literal: Literal { var, polarity }, label });
                }
            }
        }
        Ok(Self { n, k, levels: vec![all], demotion })
    }

    pub fn levels(&self) -> &[Vec<Rule>] {
        &self.levels
    }

    pub fn rule_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn predict(&self, z: &[bool]) -> Result<DlPrediction> {
        if z.len() != self.n {
            return Err(Error::InvalidInput(format!("input has {} bits, expected {}", z.len(), self.n)));
        }
        for (level, rules) in self.levels.iter().enumerate() {
            if let Some(r) = rules.iter().find(|r| r.literal.holds(z)) {
                return Ok(DlPrediction { label: r.label, level });
            }
        }
        // Some level always holds both literals of variable 0 for some label,
        // unless every such rule was demoted past the end, which never happens.
        unreachable!("no rule fired although both polarities are present")
    }

    /// Applies the outcome of a prediction; returns whether it was a mistake.
    pub fn update(&mut self, z: &[bool], predicted: DlPrediction, truth: usize) -> Result<bool> {
        if truth >= self.k {
            return Err(Error::InvalidInput(format!("label {truth} not below K = {}", self.k)));
        }
        if predicted.label == truth {
            return Ok(false);
        }
        let level = predicted.level;
        let (stay, demoted): (Vec<Rule>, Vec<Rule>) =
            self.levels[level].iter().partition(|r| !(r.literal.holds(z) && r.label != truth));
        self.levels[level] = stay;
        match self.demotion {
            Demotion::MergeNext if level + 1 < self.levels.len() => {
                let next = &mut self.levels[level + 1];
                next.extend(demoted);
                next.sort_unstable();
            }
            _ => self.levels.insert(level + 1, demoted),
        }
        if self.levels[level].is_empty() {
            self.levels.remove(level);
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlRound {
    pub input: Vec<bool>,
    pub predicted: usize,
    pub truth: usize,
    pub mistake: bool,
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlTranscript {
    pub mistakes: usize,
    pub rounds: Vec<DlRound>,
}

/// `(L+1)(2nK+2)` for a target of length `L`.
pub fn mistake_bound(n: usize, k: usize, length: usize) -> usize {
    (length + 1) * (2 * n * k + 2)
}

pub fn run_dl_online<'a>(
    n: usize,
    k: usize,
    target: &DecisionList,
    stream: impl IntoIterator<Item = &'a Vec<bool>>,
) -> Result<DlTranscript> {
    check_target(n, k, target)?;
    let mut learner = TieredHypothesis::new(n, k)?;
    let mut rounds = Vec::new();
    let mut mistakes = 0;
    for z in stream {
        let truth = target.evaluate(z)?;
        let p = learner.predict(z)?;
        let mistake = learner.update(z, p, truth)?;
        mistakes += mistake as usize;
        rounds.push(DlRound { input: z.clone(), predicted: p.label, truth, mistake, levels: learner.levels().len() });
    }
    Ok(DlTranscript { mistakes, rounds })
}

/// Adversary that always presents an input the learner currently gets
/// wrong (the first in counter order), until none is left.
pub fn run_dl_adversarial(n: usize, k: usize, target: &DecisionList, demotion: Demotion) -> Result<DlTranscript> {
    check_target(n, k, target)?;
    let inputs = all_inputs(n);
    let truths: Vec<usize> = inputs.iter().map(|z| target.evaluate(z)).collect::<Result<_>>()?;
    let mut learner = TieredHypothesis::with_demotion(n, k, demotion)?;
    let mut rounds = Vec::new();
    // Each mistake moves a rule down, and with merging a rule sinks through
    // at most 2nK levels, so this loop terminates; the cap guards NewLevel.
    let cap = 4 * n * k * n * k + 16;
    while rounds.len() < cap {
        let mut found = None;
        for (z, &t) in inputs.iter().zip(&truths) {
            let p = learner.predict(z)?;
            if p.label != t {
                found = Some((z, t, p));
                break;
            }
        }
        let Some((z, truth, p)) = found else { break };
        learner.update(z, p, truth)?;
        rounds.push(DlRound { input: z.clone(), predicted: p.label, truth, mistake: true, levels: learner.levels().len() });
    }
    Ok(DlTranscript { mistakes: rounds.len(), rounds })
}

fn check_target(n: usize, k: usize, target: &DecisionList) -> Result<()> {
    if target.n() != n || target.num_labels() > k {
        return Err(Error::InvalidInput(format!(
            "target is over n = {}, K = {}; learner has n = {n}, K = {k}",
            target.n(),
            target.num_labels()
        )));
    }
    Ok(())
}
