//! MIN-trees over order conditions.
//!
//! A tree is kept as its root, its claimed depth and its leaves; the
//! internal branching is not stored. Builders only ever branch by inserting
//! one fresh element at every position, so their output is a tree by
//! construction, and [`validate_tree`] checks the observable properties.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{Compatibility, Condition, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinTree {
    pub root: Condition,
    pub depth: usize,
    pub leaves: Vec<Condition>,
}

impl MinTree {
    /// The trivial tree `{o}`.
    pub fn trivial(root: Condition) -> Self {
        Self {
            leaves: vec![root.clone()],
            root,
            depth: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_uniform(&self) -> bool {
        let target = self.root.len() + self.depth;
        self.leaves.iter().all(|l| l.len() == target)
    }
}

/// Envelope of `target` over `base`: all extensions of `base` to the domain
/// `el(base) ∪ el(target)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub base: Condition,
    pub target: Condition,
    pub tree: MinTree,
}

/// `(m + d)! / m!`, exactly.
pub fn tree_size(m: usize, d: usize) -> BigUint {
    (m + 1..=m + d).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k))
}

/// Insert `elems` one after another, each at every position of every
/// current leaf.
fn grow(leaves: Vec<Condition>, elems: &[usize]) -> Vec<Condition> {
    elems.iter().fold(leaves, |leaves, &e| {
        leaves.iter().flat_map(|l| l.insertions(e)).collect()
    })
}

/// Uniform `o`-tree of depth `elems.len()` that inserts `elems` in the given
/// order.
pub fn build_uniform_tree(universe: &Universe, o: &Condition, elems: &[usize]) -> Result<MinTree> {
    universe.check(o)?;
    let mut seen = o.elements();
    for &e in elems {
        if e >= universe.n {
            return Err(Error::OutOfRange {
                element: e,
                n: universe.n,
            });
        }
        if !seen.insert(e) {
            return Err(Error::AlreadyPresent(e));
        }
    }
    universe.check_len(o.len() + elems.len())?;
    Ok(MinTree {
        root: o.clone(),
        depth: elems.len(),
        leaves: grow(vec![o.clone()], elems),
    })
}

/// Uniform `o`-tree of depth `d` using the `d` smallest elements missing
/// from `o`.
pub fn pad_uniform(universe: &Universe, o: &Condition, d: usize) -> Result<MinTree> {
    universe.check_len(o.len() + d)?;
    let fresh = universe.fresh_elements(o, d)?;
    build_uniform_tree(universe, o, &fresh)
}

/// The envelope of `s` over `q`; missing elements are inserted in ascending
/// order.
pub fn envelope(universe: &Universe, q: &Condition, s: &Condition) -> Result<Envelope> {
    universe.check(q)?;
    universe.check(s)?;
    if let Compatibility::Conflict(x, y) = q.compatible(s) {
        return Err(Error::Incompatible(x, y));
    }
    let missing: Vec<usize> = s.elements().difference(&q.elements()).copied().collect();
    universe.check_len(q.len() + missing.len())?;
    Ok(Envelope {
        base: q.clone(),
        target: s.clone(),
        tree: MinTree {
            root: q.clone(),
            depth: missing.len(),
            leaves: grow(vec![q.clone()], &missing),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<Condition>>,
}

impl Check {
    fn pass(checked: u64) -> Self {
        Self {
            passed: true,
            checked,
            counterexample: None,
        }
    }

    fn fail(checked: u64, witness: Vec<Condition>) -> Self {
        Self {
            passed: false,
            checked,
            counterexample: Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCheck {
    pub size: BigUint,
    pub bound: BigUint,
    pub within_bound: bool,
    /// `size == bound`, which for a genuine tree happens exactly when it is
    /// uniform of the claimed depth.
    pub equality: bool,
    pub uniform: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    /// Leaves extend the root and none is deeper than the claimed depth.
    pub shape: Check,
    pub incompatibility: Check,
    pub covering: Check,
    pub size: SizeCheck,
}

impl TreeReport {
    pub fn passed(&self) -> bool {
        self.shape.passed
            && self.incompatibility.passed
            && self.covering.passed
            && self.size.within_bound
            && self.size.equality == self.size.uniform
    }
}

/// Check the necessary properties of an `o`-tree. Covering is tested
/// against every condition over `universe` of length at most `sample_cap`.
pub fn validate_tree(tree: &MinTree, universe: &Universe, sample_cap: usize) -> TreeReport {
    let root = &tree.root;
    let max_len = root.len() + tree.depth;

    let shape = tree
        .leaves
        .iter()
        .position(|l| !l.extends(root) || l.len() > max_len)
        .map_or(Check::pass(tree.leaves.len() as u64), |i| {
            Check::fail(i as u64 + 1, vec![tree.leaves[i].clone()])
        });

    let mut pairs = 0u64;
    let mut incompatibility = None;
    'outer: for (i, a) in tree.leaves.iter().enumerate() {
        for b in &tree.leaves[i + 1..] {
            pairs += 1;
            if a == b || a.is_compatible(b) {
                incompatibility = Some(Check::fail(pairs, vec![a.clone(), b.clone()]));
                break 'outer;
            }
        }
    }
    let incompatibility = incompatibility.unwrap_or(Check::pass(pairs));

    let mut sampled = 0u64;
    let mut covering = None;
    for q in universe.extensions_up_to(&Condition::empty(), sample_cap) {
        if !q.is_compatible(root) {
            continue;
        }
        sampled += 1;
        if !tree.leaves.iter().any(|l| l.is_compatible(&q)) {
            covering = Some(Check::fail(sampled, vec![q]));
            break;
        }
    }
    let covering = covering.unwrap_or(Check::pass(sampled));

    let size = BigUint::from(tree.leaves.len());
    let bound = tree_size(root.len(), tree.depth);
    let size = SizeCheck {
        within_bound: size <= bound,
        equality: size == bound,
        uniform: tree.is_uniform(),
        size,
        bound,
    };

    TreeReport {
        shape,
        incompatibility,
        covering,
        size,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond;

    fn u(n: usize) -> Universe {
        Universe::full(n).unwrap()
    }

    #[test]
    fn size_law_examples() {
        assert_eq!(tree_size(0, 3), BigUint::from(6u32));
        assert_eq!(tree_size(7, 0), BigUint::from(1u32));
        assert_eq!(tree_size(2, 3), BigUint::from(60u32));
    }

    #[test]
    fn uniform_tree_examples() {
        let t = build_uniform_tree(&u(6), &cond![5], &[0, 1]).unwrap();
        assert_eq!(t.size(), 6);
        assert!(t.is_uniform());

        let t = build_uniform_tree(&u(3), &Condition::empty(), &[]).unwrap();
        assert_eq!(t.leaves, vec![Condition::empty()]);

        let t = build_uniform_tree(&u(3), &Condition::empty(), &[0, 1, 2]).unwrap();
        let mut leaves = t.leaves.clone();
        leaves.sort();
        let perms: Vec<Condition> = itertools::Itertools::permutations(0..3usize, 3)
            .map(|p| Condition::new(p).unwrap())
            .collect();
        assert_eq!(leaves, perms);
    }

    #[test]
    fn uniform_tree_errors() {
        assert_eq!(
            build_uniform_tree(&u(4), &cond![1], &[1]),
            Err(Error::AlreadyPresent(1))
        );
        assert_eq!(
            build_uniform_tree(&u(4), &cond![1], &[0, 0]),
            Err(Error::AlreadyPresent(0))
        );
        let capped = Universe::new(4, 2).unwrap();
        assert!(matches!(
            build_uniform_tree(&capped, &cond![1], &[0, 2]),
            Err(Error::LengthCap { .. })
        ));
    }

    #[test]
    fn envelope_examples() {
        let e = envelope(&u(3), &cond![0, 1], &cond![0, 2]).unwrap();
        assert_eq!(e.tree.leaves, vec![cond![2, 0, 1], cond![0, 2, 1], cond![0, 1, 2]]);

        let e = envelope(&u(4), &cond![3, 0, 1], &cond![0, 1]).unwrap();
        assert_eq!(e.tree.leaves, vec![cond![3, 0, 1]]);
        assert_eq!(e.tree.depth, 0);

        let e = envelope(&u(3), &cond![0], &cond![1, 2]).unwrap();
        assert_eq!(e.tree.size(), 6);
        assert!(e.tree.leaves.iter().all(|l| l.len() == 3));

        assert_eq!(
            envelope(&u(3), &cond![0, 1], &cond![1, 0]),
            Err(Error::Incompatible(0, 1))
        );
    }

    #[test]
    fn validate_examples() {
        let t = build_uniform_tree(&u(6), &cond![5], &[0, 1]).unwrap();
        let r = validate_tree(&t, &u(6), 3);
        assert!(r.passed());
        assert!(r.size.equality);

        let t = MinTree {
            root: Condition::empty(),
            depth: 2,
            leaves: vec![cond![0, 1]],
        };
        let r = validate_tree(&t, &u(3), 3);
        assert!(r.size.within_bound);
        assert!(!r.size.equality);
        assert!(!r.covering.passed);

        let t = MinTree {
            root: cond![0],
            depth: 1,
            leaves: vec![cond![0, 1], cond![0, 2]],
        };
        let r = validate_tree(&t, &u(3), 3);
        assert!(!r.incompatibility.passed);
        assert_eq!(r.incompatibility.counterexample, Some(vec![cond![0, 1], cond![0, 2]]));
    }

    #[test]
    fn json_shape() {
        let t = build_uniform_tree(&u(2), &Condition::empty(), &[1]).unwrap();
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"root":[],"depth":1,"leaves":[[1]]}"#
        );
    }
}
