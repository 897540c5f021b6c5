//! Stackelberg-Littlestone dimension: the largest root weight of a shattered
//! tree whose node weights are `inf_x max_j (loss(z, x, j) + child weight)`.

use crate::error::{Error, Result};
use crate::game::StackelbergGame;
use crate::hypothesis::{HypothesisClass, VersionSpace};
use crate::polytope::Solver;
use crate::rational::{format_rational, parse_rational, zero, Rational};
use num::Zero;
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

/// Node of an SL tree. Leaves have no context and weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SlNode {
    pub context: Option<usize>,
    pub weight: Rational,
    pub children: BTreeMap<usize, SlNode>,
}

impl SlNode {
    pub fn leaf() -> Self {
        Self { context: None, weight: zero(), children: BTreeMap::new() }
    }

    pub fn depth(&self) -> usize {
        self.children.values().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    pub fn to_json(&self, game: &StackelbergGame) -> Value {
        let children: Map<String, Value> = self
            .children
            .iter()
            .map(|(t, c)| (t.to_string(), c.to_json(game)))
            .collect();
        json!({
            "context": self.context.map(|z| game.context_id(z).to_string()),
            "weight": format_rational(&self.weight),
            "children": children,
        })
    }

    /// Parses the tree encoding produced by [`SlNode::to_json`]. Weights are
    /// optional on input and default to zero.
    pub fn from_json(value: &Value, game: &StackelbergGame) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidTree(msg.to_string());
        let obj = value.as_object().ok_or_else(|| bad("node must be an object"))?;
        let context = match obj.get("context") {
            None | Some(Value::Null) => None,
            Some(Value::String(id)) => Some(game.context_index(id)?),
            Some(_) => return Err(bad("context must be a string id or null")),
        };
        let weight = match obj.get("weight") {
            Some(Value::String(s)) => parse_rational(s).map_err(|e| bad(&e.to_string()))?,
            _ => zero(),
        };
        let mut children = BTreeMap::new();
        if let Some(ch) = obj.get("children") {
            let ch = ch.as_object().ok_or_else(|| bad("children must be an object"))?;
            for (k, v) in ch {
                let t: usize = k.parse().map_err(|_| bad("child keys must be type indices"))?;
                children.insert(t, SlNode::from_json(v, game)?);
            }
        }
        Ok(Self { context, weight, children })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlValue {
    pub value: Rational,
    pub witness: SlNode,
}

#[derive(Clone)]
struct Entry {
    value: Rational,
    context: Option<usize>,
}

/// Memoized SL recursion over version spaces of one class.
pub struct SlSolver<'a> {
    solver: Solver<'a>,
    class: &'a HypothesisClass,
    memo: Mutex<HashMap<VersionSpace, Entry>>,
}

impl<'a> SlSolver<'a> {
    pub fn new(game: &'a StackelbergGame, class: &'a HypothesisClass) -> Result<Self> {
        class.check_compatible(game)?;
        Self::from_solver(Solver::new(game), class)
    }

    pub fn from_solver(solver: Solver<'a>, class: &'a HypothesisClass) -> Result<Self> {
        class.check_compatible(solver.game())?;
        Ok(Self { solver, class, memo: Mutex::new(HashMap::new()) })
    }

    pub fn solver(&self) -> &Solver<'a> {
        &self.solver
    }

    pub fn class(&self) -> &'a HypothesisClass {
        self.class
    }

    pub fn game(&self) -> &'a StackelbergGame {
        self.solver.game()
    }

    pub fn value(&self, vs: &VersionSpace) -> Result<Rational> {
        Ok(self.entry(vs)?.value)
    }

    /// Context attaining the maximum at `vs`, if any context splits it.
    pub fn best_context(&self, vs: &VersionSpace) -> Result<Option<usize>> {
        Ok(self.entry(vs)?.context)
    }

    /// Per-label offsets `(j, SL(V^{z -> j}))` over the labels realizable at `z`.
    pub fn offsets(&self, vs: &VersionSpace, z: usize) -> Result<Vec<(usize, Rational)>> {
        vs.project(self.class, z)
            .into_iter()
            .map(|j| Ok((j, self.value(&vs.restrict(self.class, z, j))?)))
            .collect()
    }

    /// Node weight obtained by splitting `vs` at `z`.
    pub fn split_value(&self, vs: &VersionSpace, z: usize) -> Result<Rational> {
        let offsets = self.offsets(vs, z)?;
        Ok(self.solver.robust_minmax(z, &offsets)?.value)
    }

    fn entry(&self, vs: &VersionSpace) -> Result<Entry> {
        if let Some(e) = self.memo.lock().expect("memo lock").get(vs) {
            return Ok(e.clone());
        }
        let mut best = Entry { value: zero(), context: None };
        if vs.len() >= 2 {
            for z in 0..self.class.num_contexts() {
                if vs.project(self.class, z).len() < 2 {
                    continue;
                }
                let v = self.split_value(vs, z)?;
                if best.context.is_none() || v > best.value {
                    best = Entry { value: v, context: Some(z) };
                }
            }
        }
        // A split adding no weight is still a valid node, but the witness
        // stays a leaf so that zero-valued classes get the trivial tree.
        if best.value.is_zero() {
            best.context = None;
        }
        self.memo.lock().expect("memo lock").insert(vs.clone(), best.clone());
        Ok(best)
    }

    pub fn tree(&self, vs: &VersionSpace) -> Result<SlNode> {
        let e = self.entry(vs)?;
        let Some(z) = e.context else {
            return Ok(SlNode::leaf());
        };
        let mut children = BTreeMap::new();
        for j in vs.project(self.class, z) {
            children.insert(j, self.tree(&vs.restrict(self.class, z, j))?);
        }
        Ok(SlNode { context: Some(z), weight: e.value, children })
    }
}

pub fn sl_dim(game: &StackelbergGame, class: &HypothesisClass) -> Result<SlValue> {
    let s = SlSolver::new(game, class)?;
    let full = class.full();
    Ok(SlValue { value: s.value(&full)?, witness: s.tree(&full)? })
}

/// Recomputes node weights bottom-up, checking that every edge label is
/// realizable along its path. Returns the tree with weights filled in.
pub fn replay_sl_tree(solver: &Solver<'_>, class: &HypothesisClass, tree: &SlNode) -> Result<SlNode> {
    fn walk(solver: &Solver<'_>, class: &HypothesisClass, vs: &VersionSpace, node: &SlNode) -> Result<SlNode> {
        let Some(z) = node.context else {
            if !node.children.is_empty() {
                return Err(Error::InvalidTree("leaf with children".into()));
            }
            return Ok(SlNode::leaf());
        };
        if z >= class.num_contexts() {
            return Err(Error::UnknownContext(z));
        }
        if node.children.is_empty() {
            return Err(Error::InvalidTree("internal node without children".into()));
        }
        let labels = vs.project(class, z);
        let mut children = BTreeMap::new();
        let mut offsets = Vec::new();
        for (&j, child) in &node.children {
            if !labels.contains(&j) {
                return Err(Error::InvalidTree(format!(
                    "label {j} at context {} is not realizable on this path",
                    class.contexts()[z]
                )));
            }
            let c = walk(solver, class, &vs.restrict(class, z, j), child)?;
            offsets.push((j, c.weight.clone()));
            children.insert(j, c);
        }
        let weight = solver.robust_minmax(z, &offsets)?.value;
        Ok(SlNode { context: Some(z), weight, children })
    }
    walk(solver, class, &class.full(), tree)
}
