//! Forcing frames.
//!
//! A frame fixes what a condition is, when one condition extends or is
//! compatible with another, how a tree branches, and the two counting laws
//! (uniform tree size and antichain bound) whose agreement yields `p <= h`.
//! The array search and validation, the bound checks and the game engine
//! are written once against [`Frame`].

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bruteforce::{self, EnumerationBudget};
use crate::error::{Error, Result};
use crate::poset::{Condition, Universe};
use crate::trees::tree_size;

pub trait Frame: Sync {
    type Cond: Clone + Eq + Ord + Hash + Debug + Serialize + DeserializeOwned + Send + Sync;

    fn name(&self) -> &'static str;

    /// The weakest condition.
    fn root(&self) -> Self::Cond;

    /// Number of elements, vertices or pairs the condition fixes.
    fn size(&self, c: &Self::Cond) -> usize;

    /// Largest admissible condition size.
    fn cap(&self) -> usize;

    fn check(&self, c: &Self::Cond) -> Result<()>;

    fn extends(&self, strong: &Self::Cond, weak: &Self::Cond) -> bool;

    /// A common extension, if one exists.
    fn merge(&self, a: &Self::Cond, b: &Self::Cond) -> Option<Self::Cond>;

    fn compatible(&self, a: &Self::Cond, b: &Self::Cond) -> bool {
        self.merge(a, b).is_some()
    }

    /// Smallest key the one-step branching rule may query next.
    fn next_key(&self, c: &Self::Cond) -> Option<usize>;

    /// One-step branching: every way `c` can be extended to decide `key`.
    fn branch(&self, c: &Self::Cond, key: usize) -> Result<Vec<Self::Cond>>;

    /// Leaf count of a uniform tree of depth `d` below `base`.
    fn uniform_tree_size(&self, base: &Self::Cond, d: usize) -> BigUint;

    /// Upper bound on pairwise incompatible extensions of `base` of size
    /// `size(base) + d`.
    fn antichain_bound(&self, base: &Self::Cond, d: usize) -> BigUint;

    /// Every extension of `base` with size in `size(base)..=max_size`,
    /// in a fixed order.
    fn extensions_up_to(&self, base: &Self::Cond, max_size: usize) -> Vec<Self::Cond>;

    fn extensions_of_size(&self, base: &Self::Cond, size: usize) -> Vec<Self::Cond> {
        self.extensions_up_to(base, size)
            .into_iter()
            .filter(|c| self.size(c) == size)
            .collect()
    }
}

/// Order conditions: sequences of distinct elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderFrame {
    pub universe: Universe,
}

impl OrderFrame {
    pub fn new(universe: Universe) -> Self {
        Self { universe }
    }
}

impl Frame for OrderFrame {
    type Cond = Condition;

    fn name(&self) -> &'static str {
        "order"
    }

    fn root(&self) -> Condition {
        Condition::empty()
    }

    fn size(&self, c: &Condition) -> usize {
        c.len()
    }

    fn cap(&self) -> usize {
        self.universe.length_cap
    }

    fn check(&self, c: &Condition) -> Result<()> {
        self.universe.check(c)
    }

    fn extends(&self, strong: &Condition, weak: &Condition) -> bool {
        strong.extends(weak)
    }

    fn merge(&self, a: &Condition, b: &Condition) -> Option<Condition> {
        a.compatible(b).merged()
    }

    fn compatible(&self, a: &Condition, b: &Condition) -> bool {
        a.is_compatible(b)
    }

    fn next_key(&self, c: &Condition) -> Option<usize> {
        (0..self.universe.n).find(|&x| !c.contains(x))
    }

    fn branch(&self, c: &Condition, key: usize) -> Result<Vec<Condition>> {
        self.universe.one_point_extensions(c, key)
    }

    fn uniform_tree_size(&self, base: &Condition, d: usize) -> BigUint {
        tree_size(base.len(), d)
    }

    fn antichain_bound(&self, base: &Condition, d: usize) -> BigUint {
        // m!/|o|! orders of [0, m) extend o; each member claims m!/(|o|+d)! of them
        tree_size(base.len(), d)
    }

    fn extensions_up_to(&self, base: &Condition, max_size: usize) -> Vec<Condition> {
        self.universe.extensions_up_to(base, max_size)
    }
}

/// Leaves of the uniform tree of depth `d` below `base` that always
/// branches on the smallest available key.
pub fn uniform_tree<F: Frame>(frame: &F, base: &F::Cond, d: usize) -> Result<Vec<F::Cond>> {
    frame.check(base)?;
    let size = frame.size(base) + d;
    if size > frame.cap() {
        return Err(Error::LengthCap {
            len: size,
            cap: frame.cap(),
        });
    }
    let mut leaves = vec![base.clone()];
    for _ in 0..d {
        let mut next = Vec::new();
        for leaf in &leaves {
            let key = frame
                .next_key(leaf)
                .ok_or(Error::Exhausted("branching keys"))?;
            next.extend(frame.branch(leaf, key)?);
        }
        leaves = next;
    }
    Ok(leaves)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameBoundReport {
    pub frame: String,
    pub base_size: usize,
    pub depth: usize,
    pub tree_formula: BigUint,
    pub antichain_formula: BigUint,
    pub tree_size: usize,
    pub tree_pairwise_incompatible: bool,
    pub candidates: usize,
    pub max_antichain: usize,
    pub passed: bool,
}

/// Build a uniform tree, then find the largest pairwise incompatible family
/// of same-size extensions by exhaustive search, and compare both against
/// the frame's formulas.
pub fn frame_bound_check<F: Frame>(
    frame: &F,
    base: &F::Cond,
    d: usize,
    budget: &EnumerationBudget,
) -> Result<FrameBoundReport> {
    let leaves = uniform_tree(frame, base, d)?;
    let mut pairwise = true;
    'outer: for (i, a) in leaves.iter().enumerate() {
        for b in &leaves[i + 1..] {
            if frame.compatible(a, b) {
                pairwise = false;
                break 'outer;
            }
        }
    }
    let candidates = frame.extensions_of_size(base, frame.size(base) + d);
    if candidates.len() as u64 > budget.max_nodes {
        return Err(Error::BudgetExceeded {
            what: "antichain candidates",
            limit: budget.max_nodes,
        });
    }
    let max_antichain =
        bruteforce::max_antichain_by(&candidates, |a, b| !frame.compatible(a, b), budget)?;
    let tree_formula = frame.uniform_tree_size(base, d);
    let antichain_formula = frame.antichain_bound(base, d);
    let passed = BigUint::from(leaves.len()) == tree_formula
        && tree_formula == antichain_formula
        && pairwise
        && BigUint::from(max_antichain) <= antichain_formula;
    Ok(FrameBoundReport {
        frame: frame.name().to_string(),
        base_size: frame.size(base),
        depth: d,
        tree_formula,
        antichain_formula,
        tree_size: leaves.len(),
        tree_pairwise_incompatible: pairwise,
        candidates: candidates.len(),
        max_antichain,
        passed,
    })
}
