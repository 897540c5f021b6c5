//! Finite hypothesis classes as explicit tables from contexts to follower
//! types, version spaces over them, and generators for the example classes.

use crate::error::{Error, Result};
use crate::game::StackelbergGame;
use crate::rational::{format_rational, int, one, rat, zero, Rational};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypothesisClass {
    contexts: Vec<String>,
    num_types: usize,
    /// Sorted, duplicate-free rows; `table[h][z]` is a type index.
    table: Vec<Vec<usize>>,
}

/// Labeled pairs `(context index, type index)`.
pub type LabeledSample = Vec<(usize, usize)>;

impl HypothesisClass {
    pub fn new(contexts: Vec<String>, num_types: usize, mut table: Vec<Vec<usize>>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidClass("class must contain a hypothesis".into()));
        }
        if num_types == 0 {
            return Err(Error::InvalidClass("num_types must be positive".into()));
        }
        for row in &table {
            if row.len() != contexts.len() {
                return Err(Error::InvalidClass(format!(
                    "hypothesis has {} labels for {} contexts",
                    row.len(),
                    contexts.len()
                )));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= num_types) {
                return Err(Error::InvalidClass(format!("type {t} out of range")));
            }
        }
        table.sort();
        table.dedup();
        Ok(Self { contexts, num_types, table })
    }

    pub fn contexts(&self) -> &[String] {
        &self.contexts
    }

    pub fn num_contexts(&self) -> usize {
        self.contexts.len()
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn hypotheses(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn label(&self, h: usize, z: usize) -> usize {
        self.table[h][z]
    }

    fn check_context(&self, z: usize) -> Result<()> {
        if z < self.contexts.len() {
            Ok(())
        } else {
            Err(Error::UnknownContext(z))
        }
    }

    /// Sorted labels `{h(z) : h in H}`.
    pub fn project(&self, z: usize) -> Result<Vec<usize>> {
        self.check_context(z)?;
        Ok(self.full().project(self, z))
    }

    /// `{h in H : h(z) = i}`, or `None` when no hypothesis survives.
    pub fn restrict(&self, z: usize, type_index: usize) -> Result<Option<HypothesisClass>> {
        self.check_context(z)?;
        Ok(self.subclass(&self.full().restrict(self, z, type_index)))
    }

    /// Iterated restriction over a sample; `None` signals a non-realizable sample.
    pub fn consistent(&self, sample: &[(usize, usize)]) -> Result<Option<HypothesisClass>> {
        let mut vs = self.full();
        for &(z, i) in sample {
            self.check_context(z)?;
            vs = vs.restrict(self, z, i);
        }
        Ok(self.subclass(&vs))
    }

    /// Version space holding every hypothesis.
    pub fn full(&self) -> VersionSpace {
        VersionSpace { members: (0..self.table.len()).collect() }
    }

    pub fn subclass(&self, vs: &VersionSpace) -> Option<HypothesisClass> {
        if vs.is_empty() {
            return None;
        }
        Some(Self {
            contexts: self.contexts.clone(),
            num_types: self.num_types,
            table: vs.members.iter().map(|&h| self.table[h].clone()).collect(),
        })
    }

    /// Checks that the class and the game agree on contexts and type count.
    pub fn check_compatible(&self, game: &StackelbergGame) -> Result<()> {
        if self.contexts != game.contexts() {
            return Err(Error::InvalidClass("class contexts differ from game contexts".into()));
        }
        if self.num_types != game.num_types() {
            return Err(Error::InvalidClass(format!(
                "class has {} types, game has {}",
                self.num_types,
                game.num_types()
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ClassSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(spec.contexts, spec.num_types, spec.hypotheses)
    }

    pub fn to_json(&self) -> String {
        let spec = ClassSpec {
            contexts: self.contexts.clone(),
            num_types: self.num_types,
            hypotheses: self.table.clone(),
        };
        serde_json::to_string_pretty(&spec).expect("class serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub contexts: Vec<String>,
    pub num_types: usize,
    pub hypotheses: Vec<Vec<usize>>,
}

/// A subset of a fixed class, stored as sorted row indices. The index list is
/// the canonical identity used for memoization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VersionSpace {
    members: Vec<usize>,
}

impl VersionSpace {
    pub fn from_members(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn project(&self, class: &HypothesisClass, z: usize) -> Vec<usize> {
        let mut seen = vec![false; class.num_types];
        for &h in &self.members {
            seen[class.table[h][z]] = true;
        }
        (0..class.num_types).filter(|&t| seen[t]).collect()
    }

    pub fn restrict(&self, class: &HypothesisClass, z: usize, label: usize) -> VersionSpace {
        VersionSpace {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&h| class.table[h][z] == label)
                .collect(),
        }
    }

    pub fn contains(&self, h: usize) -> bool {
        self.members.binary_search(&h).is_ok()
    }
}

fn numbered(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All bijections from contexts `1..=n` to the `n` types.
pub fn permutation_class(n: usize) -> Result<HypothesisClass> {
    if !(1..=8).contains(&n) {
        return Err(Error::InvalidInput(format!("permutation class size {n} not in 1..=8")));
    }
    HypothesisClass::new(numbered(n), n, permutations(n))
}

/// Leader utility is the identity matrix and type `i` always plays action `i`.
pub fn permutation_game(n: usize) -> Result<StackelbergGame> {
    if n == 0 {
        return Err(Error::InvalidInput("permutation game needs n >= 1".into()));
    }
    let identity: Vec<Vec<Rational>> = (0..n)
        .map(|l| (0..n).map(|f| if l == f { one() } else { zero() }).collect())
        .collect();
    let follower = |i: usize| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|_| (0..n).map(|f| if f == i { one() } else { zero() }).collect())
            .collect()
    };
    StackelbergGame::new(
        numbered(n),
        vec![identity; n],
        (0..n).map(|i| vec![follower(i); n]).collect(),
        (0..n).collect(),
    )
}

/// Class of six permutation extensions plus two extra hypotheses over four
/// contexts, with the matching three-type game in which the most-mistake
/// predictor pays regret 2 while the optimal learner pays 3/4.
pub fn soa_example_class() -> (HypothesisClass, StackelbergGame) {
    let mut table: Vec<Vec<usize>> = permutations(3)
        .into_iter()
        .map(|mut p| {
            p.push(2);
            p
        })
        .collect();
    table.push(vec![2, 1, 0, 1]);
    table.push(vec![2, 0, 1, 1]);
    let class = HypothesisClass::new(numbered(4), 3, table).expect("valid table");
    let half = rat(1, 2);
    let leader = vec![vec![one(), zero()], vec![zero(), one()]];
    // rows: [L1: (F1, F2), L2: (F1, F2)]
    let payoffs = |f1_l1: Rational, f2_l2: Rational| vec![vec![f1_l1, zero()], vec![zero(), f2_l2]];
    let mut f1 = Vec::new();
    let mut f2 = Vec::new();
    let mut f3 = Vec::new();
    for z in 1..=4 {
        f1.push(payoffs(half.clone(), zero()));
        let ind = |c: bool| if c { half.clone() } else { zero() };
        f2.push(payoffs(ind(z != 4), ind(z == 4)));
        f3.push(payoffs(ind(z == 3), ind(z != 3)));
    }
    let game = StackelbergGame::with_type_orders(
        numbered(4),
        vec![leader; 4],
        vec![f1, f2, f3],
        vec![0, 1],
        Some(vec![vec![0, 1], vec![0, 1], vec![1, 0]]),
    )
    .expect("valid game");
    (class, game)
}

/// Label of the continuous threshold hypothesis with cut-offs `(g1, g2)` at
/// context `(side, pos)`.
pub fn threshold_label(g1: &Rational, g2: &Rational, side: u8, pos: &Rational) -> usize {
    let half = rat(1, 2);
    if pos < g1 {
        0
    } else if pos > g2 {
        1
    } else if (*pos < half) == (side == 0) {
        2
    } else {
        3
    }
}

/// Grid contexts `{0,1} x {0, 1/r, ..., 1}` with ids `"side:pos"`.
pub fn grid_contexts(resolution: usize) -> Vec<(u8, Rational)> {
    let r = resolution as i64;
    let mut out = Vec::new();
    for side in 0..2u8 {
        for p in 0..=r {
            out.push((side, rat(p, r)));
        }
    }
    out
}

/// Projection of the two-cut-off threshold class onto a finite grid, with the
/// four-type game under which every hypothesis induces the same optimal play.
pub fn grid_threshold_class(resolution: usize) -> Result<(HypothesisClass, StackelbergGame)> {
    if resolution < 2 {
        return Err(Error::InvalidInput("grid resolution must be at least 2".into()));
    }
    let r = resolution as i64;
    let points = grid_contexts(resolution);
    let ids: Vec<String> = points
        .iter()
        .map(|(s, p)| format!("{s}:{}", format_rational(p)))
        .collect();
    // Labelings only change at grid points and at 1/2, so those breakpoints
    // and the midpoints between them cover every distinct hypothesis.
    let half = rat(1, 2);
    let mut breaks: Vec<Rational> = (0..=r).map(|j| rat(j, r)).collect();
    breaks.push(half.clone());
    breaks.sort();
    breaks.dedup();
    let mut cuts = breaks.clone();
    cuts.extend(breaks.windows(2).map(|w| (&w[0] + &w[1]) / int(2)));
    let mut table = Vec::new();
    for g1 in cuts.iter().filter(|g| **g > zero() && **g < half) {
        for g2 in cuts.iter().filter(|g| **g >= half && **g < one()) {
            table.push(
                points
                    .iter()
                    .map(|(s, p)| threshold_label(g1, g2, *s, p))
                    .collect(),
            );
        }
    }
    let class = HypothesisClass::new(ids.clone(), 4, table)?;
    let leader = vec![
        vec![one(), rat(1, 2)],
        vec![rat(1, 4), rat(3, 4)],
    ];
    let pair = |a: Rational, b: Rational, c: Rational, d: Rational| vec![vec![a, b], vec![c, d]];
    let mut types: Vec<Vec<Vec<Vec<Rational>>>> = vec![Vec::new(); 4];
    for (side, _) in &points {
        let z1 = int(i64::from(*side));
        types[0].push(pair(rat(1, 2), zero(), one(), zero()));
        types[1].push(pair(zero(), rat(1, 2), zero(), one()));
        types[2].push(pair(one() - &z1, rat(1, 2), rat(1, 2), z1.clone()));
        types[3].push(pair(z1.clone(), rat(1, 2), rat(1, 2), one() - &z1));
    }
    let game = StackelbergGame::new(ids, vec![leader; points.len()], types, vec![0, 1])?;
    Ok((class, game))
}
