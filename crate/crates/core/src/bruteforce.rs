//! Slow, independent ground truth.
//!
//! Nothing here calls into the extension, compatibility or tree code of the
//! other modules: orders are enumerated as raw permutations and
//! compatibility is decided by looking for a common total order.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::Condition;

/// Hard limits for exhaustive runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub max_universe: usize,
    pub max_length: usize,
    pub max_nodes: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_universe: 8,
            max_length: 8,
            max_nodes: 50_000_000,
        }
    }
}

impl EnumerationBudget {
    pub fn new(max_universe: usize, max_length: usize, max_nodes: u64) -> Result<Self> {
        if max_universe == 0 || max_length == 0 || max_nodes == 0 {
            return Err(Error::InvalidInput("budget limits must be positive".into()));
        }
        Ok(Self {
            max_universe,
            max_length,
            max_nodes,
        })
    }

    pub fn with_nodes(self, max_nodes: u64) -> Self {
        Self { max_nodes, ..self }
    }

    fn universe(&self, m: usize) -> Result<()> {
        if m > self.max_universe {
            return Err(Error::BudgetExceeded {
                what: "universe size",
                limit: self.max_universe as u64,
            });
        }
        Ok(())
    }

    fn length(&self, len: usize) -> Result<()> {
        if len > self.max_length {
            return Err(Error::BudgetExceeded {
                what: "sequence length",
                limit: self.max_length as u64,
            });
        }
        Ok(())
    }

    fn nodes(&self, used: u64) -> Result<()> {
        if used > self.max_nodes {
            return Err(Error::BudgetExceeded {
                what: "search nodes",
                limit: self.max_nodes,
            });
        }
        Ok(())
    }
}

fn is_subsequence(needle: &[usize], hay: &[usize]) -> bool {
    let mut k = 0;
    for &x in hay {
        if k < needle.len() && needle[k] == x {
            k += 1;
        }
    }
    k == needle.len()
}

/// Every strict linear order of `[0, m)` whose listing contains
/// `extending` as a subsequence, in lexicographic order.
pub fn all_total_orders(
    m: usize,
    extending: &Condition,
    budget: &EnumerationBudget,
) -> Result<Vec<Condition>> {
    budget.universe(m)?;
    if extending.as_slice().iter().any(|&x| x >= m) {
        return Err(Error::InvalidInput(format!(
            "condition {extending} is not over [0, {m})"
        )));
    }
    let mut out = Vec::new();
    for perm in (0..m).permutations(m) {
        if is_subsequence(extending.as_slice(), &perm) {
            out.push(Condition::new(perm)?);
        }
    }
    Ok(out)
}

/// Whether some ordering of the union domain lists both inputs as
/// subsequences.
pub fn merge_exists(a: &Condition, b: &Condition, budget: &EnumerationBudget) -> Result<bool> {
    let domain: Vec<usize> = a
        .as_slice()
        .iter()
        .chain(b.as_slice())
        .copied()
        .sorted()
        .dedup()
        .collect();
    budget.length(domain.len())?;
    Ok(domain
        .iter()
        .copied()
        .permutations(domain.len())
        .any(|p| is_subsequence(a.as_slice(), &p) && is_subsequence(b.as_slice(), &p)))
}

/// `m! / k!` as a plain integer, for the small counts in this module.
pub fn falling_ratio(m: usize, k: usize) -> u64 {
    (k + 1..=m).map(|x| x as u64).product()
}

/// Maximum number of pairwise incompatible conditions of length
/// `|o| + d` that extend `o`, using elements of `[0, m)` only.
pub fn max_antichain(
    o: &Condition,
    d: usize,
    m: usize,
    budget: &EnumerationBudget,
) -> Result<usize> {
    budget.universe(m)?;
    let len = o.len() + d;
    if len > m {
        return Ok(0);
    }
    let totals: Vec<Vec<usize>> = (0..m).permutations(m).collect();
    let members: Vec<Vec<usize>> = (0..m)
        .permutations(len)
        .filter(|p| is_subsequence(o.as_slice(), p))
        .collect();
    budget.nodes((totals.len() * members.len()) as u64)?;

    // compatible iff some total order of [0, m) extends both
    let words = totals.len().div_ceil(64);
    let ext: Vec<Vec<u64>> = members
        .iter()
        .map(|c| {
            let mut bits = vec![0u64; words];
            for (i, t) in totals.iter().enumerate() {
                if is_subsequence(c, t) {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            bits
        })
        .collect();
    let sets: Vec<Bits> = ext.into_iter().map(Bits).collect();
    let incompatible =
        |i: usize, j: usize| sets[i].0.iter().zip(&sets[j].0).all(|(x, y)| x & y == 0);
    max_clique(members.len(), incompatible, Some(&sets), budget)
}

/// Largest pairwise incompatible subset of `items` under the supplied
/// relation.
pub fn max_antichain_by<T>(
    items: &[T],
    incompatible: impl Fn(&T, &T) -> bool,
    budget: &EnumerationBudget,
) -> Result<usize> {
    max_clique(items.len(), |i, j| incompatible(&items[i], &items[j]), None, budget)
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn and_not(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }
    fn or(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Exact maximum clique by branch and bound with greedy colouring bounds.
///
/// With `packing`, vertex `i` stands for a nonempty set `packing[i]` and is
/// adjacent to `j` only if the two sets are disjoint, so a clique inside
/// the candidate pool cannot outnumber the pool's union divided by its
/// smallest set. That bound is applied at every node as well.
fn max_clique(
    n: usize,
    adjacent: impl Fn(usize, usize) -> bool,
    packing: Option<&[Bits]>,
    budget: &EnumerationBudget,
) -> Result<usize> {
    if n == 0 {
        return Ok(0);
    }
    let mut adj = vec![Bits::empty(n); n];
    for i in 0..n {
        for j in i + 1..n {
            if adjacent(i, j) {
                adj[i].set(j);
                adj[j].set(i);
            }
        }
    }
    let mut all = Bits::empty(n);
    for i in 0..n {
        all.set(i);
    }
    let mut search = Clique {
        adj,
        packing,
        best: 0,
        nodes: 0,
        budget,
    };
    search.expand(0, all)?;
    Ok(search.best)
}

struct Clique<'a> {
    adj: Vec<Bits>,
    packing: Option<&'a [Bits]>,
    best: usize,
    nodes: u64,
    budget: &'a EnumerationBudget,
}

impl Clique<'_> {
    fn expand(&mut self, depth: usize, mut candidates: Bits) -> Result<()> {
        self.nodes += 1;
        self.budget.nodes(self.nodes)?;
        if let Some(sets) = self.packing {
            let mut union = Bits::empty(0);
            let mut smallest = usize::MAX;
            for v in candidates.ones() {
                if union.0.is_empty() {
                    union = sets[v].clone();
                } else {
                    union.or(&sets[v]);
                }
                smallest = smallest.min(sets[v].count());
            }
            if smallest > 0 && depth + union.count() / smallest <= self.best {
                return Ok(());
            }
        }

        // greedy colouring; vertices listed by non-decreasing colour
        let mut order = Vec::new();
        let mut uncoloured = candidates.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut class = uncoloured.clone();
            while let Some(v) = class.first() {
                class.clear(v);
                class.and_not(&self.adj[v]);
                uncoloured.clear(v);
                order.push((v, colour));
            }
        }

        for &(v, c) in order.iter().rev() {
            if depth + c <= self.best {
                return Ok(());
            }
            let next = candidates.and(&self.adj[v]);
            if next.is_empty() {
                self.best = self.best.max(depth + 1);
            } else {
                self.expand(depth + 1, next)?;
            }
            candidates.clear(v);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond;

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    #[test]
    fn total_order_counts() {
        assert_eq!(all_total_orders(3, &Condition::empty(), &budget()).unwrap().len(), 6);
        assert_eq!(all_total_orders(4, &cond![2, 0], &budget()).unwrap().len(), 12);
        assert_eq!(all_total_orders(3, &cond![2, 0, 1], &budget()).unwrap().len(), 1);
    }

    #[test]
    fn merge_examples() {
        assert!(!merge_exists(&cond![1, 2], &cond![2, 1], &budget()).unwrap());
        assert!(merge_exists(&cond![0, 1], &cond![1, 2], &budget()).unwrap());
        assert!(merge_exists(&Condition::empty(), &cond![3, 1, 2], &budget()).unwrap());
    }

    #[test]
    fn antichain_examples() {
        assert_eq!(max_antichain(&Condition::empty(), 1, 3, &budget()).unwrap(), 1);
        assert_eq!(max_antichain(&Condition::empty(), 2, 3, &budget()).unwrap(), 2);
        assert_eq!(max_antichain(&cond![1], 0, 3, &budget()).unwrap(), 1);
    }

    #[test]
    fn clique_on_known_graphs() {
        // 5-cycle: clique number 2
        let c5 = |i: usize, j: usize| (i + 1) % 5 == j || (j + 1) % 5 == i;
        assert_eq!(max_clique(5, c5, None, &budget()).unwrap(), 2);
        // K4 plus isolated vertex
        let k4 = |i: usize, j: usize| i < 4 && j < 4;
        assert_eq!(max_clique(5, k4, None, &budget()).unwrap(), 4);
    }

    #[test]
    fn packing_bound_keeps_the_optimum() {
        let sets: Vec<Bits> = [&[0, 1][..], &[2, 3], &[1, 2], &[0], &[3]]
            .iter()
            .map(|s| {
                let mut b = Bits::empty(4);
                s.iter().for_each(|&i| b.set(i));
                b
            })
            .collect();
        let disjoint = |i: usize, j: usize| sets[i].and(&sets[j]).is_empty();
        assert_eq!(max_clique(5, disjoint, None, &budget()).unwrap(), 3);
        assert_eq!(max_clique(5, disjoint, Some(&sets), &budget()).unwrap(), 3);
    }

    #[test]
    fn budgets_are_enforced() {
        let tight = EnumerationBudget::new(3, 3, 10).unwrap();
        assert!(all_total_orders(4, &Condition::empty(), &tight).unwrap_err().is_budget());
        assert!(merge_exists(&cond![0, 1], &cond![2, 3], &tight).unwrap_err().is_budget());
        assert!(EnumerationBudget::new(0, 1, 1).is_err());
    }
}
