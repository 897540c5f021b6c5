//! Multiclass Littlestone dimension by memoized recursion over version spaces.

use crate::hypothesis::{HypothesisClass, VersionSpace};
use std::collections::HashMap;
use std::sync::Mutex;

/// Shattered binary mistake tree. Leaves have no context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdimTree {
    pub context: Option<usize>,
    /// Exactly two `(label, subtree)` edges at internal nodes.
    pub children: Vec<(usize, LdimTree)>,
}

impl LdimTree {
    pub fn depth(&self) -> usize {
        self.children.iter().map(|(_, c)| 1 + c.depth()).min().unwrap_or(0)
    }
}

#[derive(Clone, Copy)]
struct Entry {
    value: usize,
    /// Context and the two labels realizing `value`.
    choice: Option<(usize, usize, usize)>,
}

pub struct LdimSolver<'c> {
    class: &'c HypothesisClass,
    memo: Mutex<HashMap<VersionSpace, Entry>>,
}

impl<'c> LdimSolver<'c> {
    pub fn new(class: &'c HypothesisClass) -> Self {
        Self { class, memo: Mutex::new(HashMap::new()) }
    }

    pub fn class(&self) -> &'c HypothesisClass {
        self.class
    }

    pub fn value(&self, vs: &VersionSpace) -> usize {
        self.entry(vs).value
    }

    fn entry(&self, vs: &VersionSpace) -> Entry {
        if let Some(e) = self.memo.lock().expect("memo lock").get(vs) {
            return *e;
        }
        let mut best = Entry { value: 0, choice: None };
        if vs.len() >= 2 {
            for z in 0..self.class.num_contexts() {
                let labels = vs.project(self.class, z);
                if labels.len() < 2 {
                    continue;
                }
                let mut scored: Vec<(usize, usize)> = labels
                    .iter()
                    .map(|&i| (self.value(&vs.restrict(self.class, z, i)), i))
                    .collect();
                // Largest value first, smaller label first among equals.
                scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                let candidate = 1 + scored[1].0;
                if candidate > best.value {
                    best = Entry { value: candidate, choice: Some((z, scored[0].1, scored[1].1)) };
                }
            }
        }
        self.memo.lock().expect("memo lock").insert(vs.clone(), best);
        best
    }

    pub fn tree(&self, vs: &VersionSpace) -> LdimTree {
        match self.entry(vs).choice {
            None => LdimTree { context: None, children: Vec::new() },
            Some((z, i, j)) => {
                let mut labels = [i, j];
                labels.sort_unstable();
                let children = labels
                    .iter()
                    .map(|&l| (l, self.tree(&vs.restrict(self.class, z, l))))
                    .collect();
                LdimTree { context: Some(z), children }
            }
        }
    }
}

pub fn littlestone_dim(class: &HypothesisClass) -> usize {
    LdimSolver::new(class).value(&class.full())
}

pub fn littlestone_tree(class: &HypothesisClass) -> LdimTree {
    LdimSolver::new(class).tree(&class.full())
}

/// `true` when every root-to-leaf path of `tree` is realized by `class`
/// and internal nodes carry two distinct labels.
pub fn tree_is_shattered(class: &HypothesisClass, tree: &LdimTree) -> bool {
    fn walk(class: &HypothesisClass, vs: &VersionSpace, node: &LdimTree) -> bool {
        if vs.is_empty() {
            return false;
        }
        match node.context {
            None => node.children.is_empty(),
            Some(z) => {
                node.children.len() == 2
                    && node.children[0].0 != node.children[1].0
                    && node
                        .children
                        .iter()
                        .all(|(l, c)| walk(class, &vs.restrict(class, z, *l), c))
            }
        }
    }
    walk(class, &class.full(), tree)
}
