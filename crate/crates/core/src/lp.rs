//! Exact two-phase simplex on a dense rational tableau, Bland's rule.

use crate::rational::{format_rational, zero, Rational};
use num::{Signed, Zero};
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};

static DEBUG_DUMP: AtomicBool = AtomicBool::new(false);

/// When enabled, every LP handed to [`solve_lp`] is printed to stderr.
pub fn set_debug_dump(on: bool) {
    DEBUG_DUMP.store(on, Ordering::Relaxed);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub direction: Direction,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Rational, Vec<Rational>)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// Empty program over `n` nonnegative variables with a zero objective.
    pub fn new(direction: Direction, n: usize) -> Self {
        Self {
            direction,
            objective: vec![zero(); n],
            constraints: Vec::new(),
            bounds: vec![VarBound::NonNegative; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    fn validate(&self) {
        let n = self.num_vars();
        assert_eq!(self.bounds.len(), n, "bounds width");
        for c in &self.constraints {
            assert_eq!(c.coeffs.len(), n, "constraint width");
        }
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |coeffs: &[Rational]| {
            coeffs.iter().map(format_rational).collect::<Vec<_>>().join("\t")
        };
        let dir = match self.direction {
            Direction::Minimize => "min",
            Direction::Maximize => "max",
        };
        writeln!(f, "{dir}\t{}", row(&self.objective))?;
        for c in &self.constraints {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            writeln!(f, "\t{}\t{rel}\t{}", row(&c.coeffs), format_rational(&c.rhs))?;
        }
        let bounds: Vec<&str> = self
            .bounds
            .iter()
            .map(|b| match b {
                VarBound::NonNegative => "+",
                VarBound::Free => "free",
            })
            .collect();
        writeln!(f, "bounds\t{}", bounds.join("\t"))
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs of a maximization objective.
    reduced: Vec<Rational>,
    value: Rational,
    /// Columns allowed to enter the basis.
    active: Vec<bool>,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn set_objective(&mut self, costs: &[Rational]) {
        let ncols = costs.len();
        let mut reduced = costs.to_vec();
        let mut value = zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, r) in reduced.iter_mut().enumerate().take(ncols) {
                let a = &self.rows[i][j];
                if !a.is_zero() {
                    *r -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.value = value;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if p != Rational::from_integer(1.into()) {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[i] -= &factor * &prhs;
        }
        let factor = self.reduced[c].clone();
        if !factor.is_zero() {
            for (v, pv) in self.reduced.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.value += &factor * &prhs;
        }
        self.basis[r] = c;
    }

    fn run(&mut self) -> Step {
        loop {
            let entering = (0..self.reduced.len())
                .find(|&j| self.active[j] && self.reduced[j].is_positive());
            let Some(c) = entering else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return Step::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Solves `lp` exactly. Infeasible and unbounded programs are outcomes, not errors.
pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    lp.validate();
    if DEBUG_DUMP.load(Ordering::Relaxed) {
        eprintln!("--- lp ---\n{lp}");
    }
    let n = lp.num_vars();
    // Column layout: one column per nonnegative variable, two for free ones.
    let mut col_of = Vec::with_capacity(n);
    let mut ncols = 0;
    for b in &lp.bounds {
        col_of.push(ncols);
        ncols += match b {
            VarBound::NonNegative => 1,
            VarBound::Free => 2,
        };
    }
    let structural = ncols;
    let m = lp.constraints.len();
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut relations = Vec::with_capacity(m);
    for c in &lp.constraints {
        let mut row = vec![zero(); structural];
        for (v, coef) in c.coeffs.iter().enumerate() {
            row[col_of[v]] = coef.clone();
            if lp.bounds[v] == VarBound::Free {
                row[col_of[v] + 1] = -coef.clone();
            }
        }
        let mut rel = c.relation;
        let mut b = c.rhs.clone();
        if b.is_negative() {
            row.iter_mut().for_each(|v| *v = -v.clone());
            b = -b;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push(row);
        rhs.push(b);
        relations.push(rel);
    }
    let slack_count = relations.iter().filter(|r| **r != Relation::Eq).count();
    let art_count = relations.iter().filter(|r| **r != Relation::Le).count();
    let total = structural + slack_count + art_count;
    let mut basis = vec![0; m];
    let mut next_slack = structural;
    let mut next_art = structural + slack_count;
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(total, zero());
        match relations[i] {
            Relation::Le => {
                row[next_slack] = Rational::from_integer(1.into());
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = Rational::from_integer((-1).into());
                next_slack += 1;
                row[next_art] = Rational::from_integer(1.into());
                basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::from_integer(1.into());
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }
    let first_art = structural + slack_count;
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        reduced: Vec::new(),
        value: zero(),
        active: vec![true; total],
    };
    if art_count > 0 {
        let mut costs = vec![zero(); total];
        for c in costs.iter_mut().skip(first_art) {
            *c = Rational::from_integer((-1).into());
        }
        t.set_objective(&costs);
        t.run();
        if t.value.is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= first_art {
                match (0..first_art).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for a in t.active.iter_mut().skip(first_art) {
            *a = false;
        }
    }
    let sign = match lp.direction {
        Direction::Maximize => Rational::from_integer(1.into()),
        Direction::Minimize => Rational::from_integer((-1).into()),
    };
    let mut costs = vec![zero(); total];
    for (v, c) in lp.objective.iter().enumerate() {
        costs[col_of[v]] = &sign * c;
        if lp.bounds[v] == VarBound::Free {
            costs[col_of[v] + 1] = -(&sign * c);
        }
    }
    t.set_objective(&costs);
    if let Step::Unbounded = t.run() {
        return LpOutcome::Unbounded;
    }
    let mut colval = vec![zero(); total];
    for (i, &b) in t.basis.iter().enumerate() {
        colval[b] = t.rhs[i].clone();
    }
    let point = (0..n)
        .map(|v| match lp.bounds[v] {
            VarBound::NonNegative => colval[col_of[v]].clone(),
            VarBound::Free => &colval[col_of[v]] - &colval[col_of[v] + 1],
        })
        .collect();
    LpOutcome::Optimal { value: sign * t.value, point }
}
