//! PHP-arrays: `p × h` families of condition sets whose rows and columns
//! are antichains and whose rows are dense below the base.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bruteforce::{self, EnumerationBudget};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::poset::{Condition, Universe};
use crate::trees::{envelope, pad_uniform, tree_size};

/// `cells[a][b]` is the cell of pigeon `a` and hole `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhpArray<C = Condition> {
    pub base: C,
    pub p: usize,
    pub h: usize,
    pub cells: Vec<Vec<Vec<C>>>,
}

impl<C: Clone + Ord> PhpArray<C> {
    pub fn empty(base: C, p: usize, h: usize) -> Self {
        Self {
            base,
            p,
            h,
            cells: vec![vec![Vec::new(); h]; p],
        }
    }

    fn check_shape(&self) -> Result<()> {
        if self.cells.len() != self.p || self.cells.iter().any(|row| row.len() != self.h) {
            return Err(Error::InvalidInput(format!(
                "cells do not form a {} x {} grid",
                self.p, self.h
            )));
        }
        Ok(())
    }

    /// Members of row `a` with their hole, across all cells.
    pub fn row(&self, a: usize) -> impl Iterator<Item = (usize, &C)> {
        self.cells[a]
            .iter()
            .enumerate()
            .flat_map(|(b, cell)| cell.iter().map(move |c| (b, c)))
    }

    pub fn members(&self) -> impl Iterator<Item = ((usize, usize), &C)> {
        self.cells.iter().enumerate().flat_map(|(a, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(b, cell)| cell.iter().map(move |c| ((a, b), c)))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness<C> {
    /// `[a, b]` coordinates of the offending cells, or `[a]` for a row.
    pub cells: Vec<Vec<usize>>,
    pub conditions: Vec<C>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck<C> {
    pub passed: bool,
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Witness<C>>,
}

impl<C> AxiomCheck<C> {
    fn from_search(checked: u64, found: Option<Witness<C>>) -> Self {
        Self {
            passed: found.is_none(),
            checked,
            counterexample: found,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayReport<C> {
    pub extends_base: AxiomCheck<C>,
    pub cell_antichain: AxiomCheck<C>,
    pub column_incompatible: AxiomCheck<C>,
    pub row_incompatible: AxiomCheck<C>,
    /// Checked against every condition below the base up to the frame cap.
    pub dense_rows: AxiomCheck<C>,
    pub density_cap: usize,
}

impl<C> ArrayReport<C> {
    pub fn passed(&self) -> bool {
        self.extends_base.passed
            && self.cell_antichain.passed
            && self.column_incompatible.passed
            && self.row_incompatible.passed
            && self.dense_rows.passed
    }

    pub fn failed_axioms(&self) -> Vec<&'static str> {
        [
            ("extends_base", self.extends_base.passed),
            ("cell_antichain", self.cell_antichain.passed),
            ("column_incompatible", self.column_incompatible.passed),
            ("row_incompatible", self.row_incompatible.passed),
            ("dense_rows", self.dense_rows.passed),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect()
    }
}

/// Check the five array axioms.
pub fn validate_array<F: Frame>(frame: &F, array: &PhpArray<F::Cond>) -> Result<ArrayReport<F::Cond>> {
    array.check_shape()?;
    frame.check(&array.base)?;
    for (_, c) in array.members() {
        frame.check(c)?;
    }
    let base = &array.base;

    let mut checked = 0;
    let mut found = None;
    for ((a, b), c) in array.members() {
        checked += 1;
        if !frame.extends(c, base) {
            found = Some(Witness {
                cells: vec![vec![a, b]],
                conditions: vec![c.clone()],
            });
            break;
        }
    }
    let extends_base = AxiomCheck::from_search(checked, found);

    let mut checked = 0;
    let mut found = None;
    'cell: for (a, row) in array.cells.iter().enumerate() {
        for (b, cell) in row.iter().enumerate() {
            for (i, x) in cell.iter().enumerate() {
                for y in &cell[i + 1..] {
                    checked += 1;
                    if x == y || frame.compatible(x, y) {
                        found = Some(Witness {
                            cells: vec![vec![a, b]],
                            conditions: vec![x.clone(), y.clone()],
                        });
                        break 'cell;
                    }
                }
            }
        }
    }
    let cell_antichain = AxiomCheck::from_search(checked, found);

    // same hole, different pigeons
    let mut checked = 0;
    let mut found = None;
    'col: for b in 0..array.h {
        for a in 0..array.p {
            for a2 in a + 1..array.p {
                for x in &array.cells[a][b] {
                    for y in &array.cells[a2][b] {
                        checked += 1;
                        if frame.compatible(x, y) {
                            found = Some(Witness {
                                cells: vec![vec![a, b], vec![a2, b]],
                                conditions: vec![x.clone(), y.clone()],
                            });
                            break 'col;
                        }
                    }
                }
            }
        }
    }
    let column_incompatible = AxiomCheck::from_search(checked, found);

    // same pigeon, different holes
    let mut checked = 0;
    let mut found = None;
    'row: for a in 0..array.p {
        for b in 0..array.h {
            for b2 in b + 1..array.h {
                for x in &array.cells[a][b] {
                    for y in &array.cells[a][b2] {
                        checked += 1;
                        if frame.compatible(x, y) {
                            found = Some(Witness {
                                cells: vec![vec![a, b], vec![a, b2]],
                                conditions: vec![x.clone(), y.clone()],
                            });
                            break 'row;
                        }
                    }
                }
            }
        }
    }
    let row_incompatible = AxiomCheck::from_search(checked, found);

    let below = frame.extensions_up_to(base, frame.cap());
    let rows: Vec<Vec<&F::Cond>> = (0..array.p)
        .map(|a| array.row(a).map(|(_, c)| c).collect())
        .collect();
    let found = below.par_iter().find_map_first(|q| {
        rows.iter().enumerate().find_map(|(a, members)| {
            (!members.iter().any(|r| frame.compatible(q, r))).then(|| Witness {
                cells: vec![vec![a]],
                conditions: vec![q.clone()],
            })
        })
    });
    let dense_rows = AxiomCheck::from_search((below.len() * array.p) as u64, found);

    Ok(ArrayReport {
        extends_base,
        cell_antichain,
        column_incompatible,
        row_incompatible,
        dense_rows,
        density_cap: frame.cap(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArraySize {
    pub by_cells: BigUint,
    pub by_rows: BigUint,
    pub by_columns: BigUint,
}

/// Total size computed three ways; they agree on any array whose rows and
/// columns hold distinct members across cells.
pub fn array_size<C: Clone + Ord>(array: &PhpArray<C>) -> Result<ArraySize> {
    array.check_shape()?;
    let by_cells: usize = array.members().count();
    let by_rows: usize = (0..array.p)
        .map(|a| array.row(a).map(|(_, c)| c).collect::<BTreeSet<_>>().len())
        .sum();
    let by_columns: usize = (0..array.h)
        .map(|b| {
            (0..array.p)
                .flat_map(|a| array.cells[a][b].iter())
                .collect::<BTreeSet<_>>()
                .len()
        })
        .sum();
    if by_cells != by_rows || by_cells != by_columns {
        return Err(Error::InvalidInput(format!(
            "size disagreement: cells {by_cells}, rows {by_rows}, columns {by_columns}"
        )));
    }
    Ok(ArraySize {
        by_cells: by_cells.into(),
        by_rows: by_rows.into(),
        by_columns: by_columns.into(),
    })
}

/// `new` extends `old` cell by cell.
pub fn array_extends<F: Frame>(frame: &F, new: &PhpArray<F::Cond>, old: &PhpArray<F::Cond>) -> bool {
    new.p == old.p
        && new.h == old.h
        && new.members().all(|((a, b), q)| {
            old.cells[a][b].iter().any(|r| frame.extends(q, r))
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowTrace {
    pub row: usize,
    /// Leaf counts of the staged trees, starting with the trivial tree.
    pub stage_sizes: Vec<usize>,
    /// Number of `(leaf, member)` pairs at which the intersection invariant
    /// was asserted, per stage.
    pub invariant_checks: Vec<u64>,
    /// Maximal leaf depth after the last stage, before padding.
    pub staged_depth: usize,
    /// Leaves that needed fresh padding elements.
    pub padded_leaves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Uniformized {
    pub array: PhpArray<Condition>,
    pub depth: usize,
    pub rows: Vec<RowTrace>,
}

/// Staged leaves of one row, each tagged with the hole of the unique row
/// member it extends.
fn stage_row(
    universe: &Universe,
    array: &PhpArray<Condition>,
    a: usize,
) -> Result<(Vec<(Condition, usize)>, RowTrace)> {
    let o = &array.base;
    let mut members: Vec<(usize, &Condition)> = array.row(a).collect();
    members.sort_by(|x, y| x.1.shortlex().cmp(&y.1.shortlex()));
    let stages = members
        .iter()
        .map(|(_, s)| s.len().saturating_sub(o.len()))
        .max()
        .ok_or_else(|| Error::InvalidInput(format!("row {a} is empty")))?;

    let mut leaves = vec![o.clone()];
    let mut trace = RowTrace {
        row: a,
        stage_sizes: vec![1],
        invariant_checks: vec![intersection_invariant(&leaves, &members, o.len())?],
        staged_depth: 0,
        padded_leaves: 0,
    };

    for i in 0..stages {
        let mut next = Vec::with_capacity(leaves.len());
        for q in leaves {
            if members.iter().any(|(_, s)| q.extends(s)) {
                next.push(q);
                continue;
            }
            let (_, s_q) = members
                .iter()
                .find(|(_, s)| q.is_compatible(s))
                .ok_or_else(|| {
                    Error::InvalidInput(format!("row {a} has no member compatible with {q}"))
                })?;
            next.extend(envelope(universe, &q, s_q)?.tree.leaves);
        }
        leaves = next;
        trace.stage_sizes.push(leaves.len());
        trace
            .invariant_checks
            .push(intersection_invariant(&leaves, &members, o.len() + i + 1)?);
    }

    let mut tagged = Vec::with_capacity(leaves.len());
    for q in leaves {
        let mut owners = members.iter().filter(|(_, s)| q.extends(s));
        let Some(&(b, _)) = owners.next() else {
            return Err(Error::Invariant(format!(
                "row {a}: staged leaf {q} extends no row member"
            )));
        };
        if owners.next().is_some() {
            return Err(Error::Invariant(format!(
                "row {a}: staged leaf {q} extends two row members"
            )));
        }
        trace.staged_depth = trace.staged_depth.max(q.len() - o.len());
        tagged.push((q, b));
    }
    Ok((tagged, trace))
}

/// For every leaf `q` and member `s` with `q ∥ s`:
/// `|el(q) ∩ el(s)| >= min(level, |s|)`.
fn intersection_invariant(
    leaves: &[Condition],
    members: &[(usize, &Condition)],
    level: usize,
) -> Result<u64> {
    let mut checks = 0;
    for q in leaves {
        let el_q = q.elements();
        for (_, s) in members {
            if !q.is_compatible(s) {
                continue;
            }
            checks += 1;
            let shared = s.as_slice().iter().filter(|x| el_q.contains(x)).count();
            if shared < level.min(s.len()) {
                return Err(Error::Invariant(format!(
                    "intersection invariant fails at level {level}: leaf {q}, member {s}"
                )));
            }
        }
    }
    Ok(checks)
}

/// Smallest depth to which [`uniformize_rows`] can pad every row.
pub fn staged_depth(universe: &Universe, array: &PhpArray<Condition>) -> Result<usize> {
    array.check_shape()?;
    (0..array.p)
        .map(|a| stage_row(universe, array, a).map(|(_, t)| t.staged_depth))
        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
}

/// Extend `array` so that every row is a uniform tree of depth `d` below
/// the base; each leaf stays in the cell of the member it extends.
pub fn uniformize_rows(
    universe: &Universe,
    array: &PhpArray<Condition>,
    d: usize,
) -> Result<Uniformized> {
    array.check_shape()?;
    universe.check(&array.base)?;
    let target = array.base.len() + d;
    universe.check_len(target)?;

    let rows: Vec<_> = (0..array.p)
        .into_par_iter()
        .map(|a| stage_row(universe, array, a))
        .collect::<Result<_>>()?;

    let mut out = PhpArray::empty(array.base.clone(), array.p, array.h);
    let mut traces = Vec::with_capacity(array.p);
    for (a, (leaves, mut trace)) in rows.into_iter().enumerate() {
        if trace.staged_depth > d {
            return Err(Error::InvalidInput(format!(
                "row {a} reaches depth {} before padding; requested depth {d}",
                trace.staged_depth
            )));
        }
        for (q, b) in leaves {
            if q.len() < target {
                trace.padded_leaves += 1;
            }
            let padded = pad_uniform(universe, &q, target - q.len())?;
            out.cells[a][b].extend(padded.leaves);
        }
        traces.push(trace);
    }
    Ok(Uniformized {
        array: out,
        depth: d,
        rows: traces,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBoundReport {
    pub members: usize,
    pub bound: BigUint,
    pub pairwise_incompatible: bool,
    pub within_bound: bool,
    pub equality: bool,
    pub universe: usize,
    /// Total orders of `[0, m)` extending the base, and `m!/|o|!`.
    pub total_orders: u64,
    pub expected_total_orders: u64,
    /// Per-member count of total extensions, and `m!/(|o|+d)!`.
    pub extensions_per_member: Vec<u64>,
    pub expected_per_member: u64,
    pub disjoint: bool,
}

impl UpperBoundReport {
    pub fn passed(&self) -> bool {
        self.pairwise_incompatible
            && self.within_bound
            && self.total_orders == self.expected_total_orders
            && self
                .extensions_per_member
                .iter()
                .all(|&k| k == self.expected_per_member)
            && self.disjoint
    }
}

/// Check an antichain of length-`|o|+d` extensions of `o` against the
/// uniform tree size, and replay the double count over all total orders of
/// `[0, m)`.
pub fn antichain_upper_bound_check(
    family: &[Condition],
    o: &Condition,
    d: usize,
    m: usize,
    budget: &EnumerationBudget,
) -> Result<UpperBoundReport> {
    let len = o.len() + d;
    for s in family {
        if s.len() != len || !s.extends(o) {
            return Err(Error::InvalidInput(format!(
                "{s} is not a length-{len} extension of {o}"
            )));
        }
        if s.as_slice().iter().any(|&x| x >= m) {
            return Err(Error::InvalidInput(format!("{s} is not over [0, {m})")));
        }
    }
    let mut pairwise = true;
    'outer: for (i, x) in family.iter().enumerate() {
        for y in &family[i + 1..] {
            if x == y || x.is_compatible(y) {
                pairwise = false;
                break 'outer;
            }
        }
    }

    let totals = bruteforce::all_total_orders(m, o, budget)?;
    let mut owners = vec![0u32; totals.len()];
    let mut per_member = Vec::with_capacity(family.len());
    for s in family {
        let mut k = 0;
        for (i, t) in totals.iter().enumerate() {
            if t.extends(s) {
                owners[i] += 1;
                k += 1;
            }
        }
        per_member.push(k);
    }
    let bound = tree_size(o.len(), d);
    Ok(UpperBoundReport {
        members: family.len(),
        pairwise_incompatible: pairwise,
        within_bound: BigUint::from(family.len()) <= bound,
        equality: BigUint::from(family.len()) == bound,
        bound,
        universe: m,
        total_orders: totals.len() as u64,
        expected_total_orders: bruteforce::falling_ratio(m, o.len()),
        extensions_per_member: per_member,
        expected_per_member: bruteforce::falling_ratio(m, len),
        disjoint: owners.iter().all(|&k| k <= 1),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SearchVerdict<C> {
    Exists {
        array: PhpArray<C>,
        nodes: u64,
    },
    /// The search tree was exhausted without finding an array.
    Nonexistent {
        candidates: usize,
        coverage_targets: usize,
        nodes: u64,
        max_len: usize,
    },
}

impl<C> SearchVerdict<C> {
    pub fn exists(&self) -> bool {
        matches!(self, SearchVerdict::Exists { .. })
    }
}

/// Exhaustively look for an `(base, p, h)`-array whose members have size at
/// most `max_len`.
///
/// Density only has to be checked against maximal-size conditions below the
/// base: if a maximal `q` is compatible with `r`, so is everything `q`
/// extends. The search repeatedly takes the first such `q` and row `a` not
/// yet covered and branches over every candidate member and hole that keeps
/// the antichain axioms intact, so any existing array is reachable.
pub fn search_array<F: Frame>(
    frame: &F,
    base: &F::Cond,
    p: usize,
    h: usize,
    max_len: usize,
    budget: &EnumerationBudget,
) -> Result<SearchVerdict<F::Cond>> {
    frame.check(base)?;
    let candidates = frame.extensions_up_to(base, max_len.min(frame.cap()));
    let targets = frame.extensions_of_size(base, frame.cap());
    let pair_count = (candidates.len() * (candidates.len() + targets.len())) as u64;
    if pair_count > budget.max_nodes {
        return Err(Error::BudgetExceeded {
            what: "array search precomputation",
            limit: budget.max_nodes,
        });
    }

    let cand_compat: Vec<Vec<bool>> = candidates
        .par_iter()
        .map(|x| candidates.iter().map(|y| frame.compatible(x, y)).collect())
        .collect();
    let target_compat: Vec<Vec<usize>> = targets
        .par_iter()
        .map(|t| {
            (0..candidates.len())
                .filter(|&i| frame.compatible(t, &candidates[i]))
                .collect()
        })
        .collect();

    let mut search = ArraySearch {
        cand_compat: &cand_compat,
        target_compat: &target_compat,
        p,
        h,
        cells: vec![vec![Vec::new(); h]; p],
        nodes: 0,
        budget,
    };
    let found = search.dfs(0, 0)?;
    let nodes = search.nodes;
    if found {
        let cells = search
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| cell.iter().map(|&i| candidates[i].clone()).collect())
                    .collect()
            })
            .collect();
        Ok(SearchVerdict::Exists {
            array: PhpArray {
                base: base.clone(),
                p,
                h,
                cells,
            },
            nodes,
        })
    } else {
        Ok(SearchVerdict::Nonexistent {
            candidates: candidates.len(),
            coverage_targets: targets.len(),
            nodes,
            max_len,
        })
    }
}

struct ArraySearch<'a> {
    cand_compat: &'a [Vec<bool>],
    target_compat: &'a [Vec<usize>],
    p: usize,
    h: usize,
    cells: Vec<Vec<Vec<usize>>>,
    nodes: u64,
    budget: &'a EnumerationBudget,
}

impl ArraySearch<'_> {
    fn covered(&self, t: usize, a: usize) -> bool {
        let row = &self.cells[a];
        self.target_compat[t]
            .iter()
            .any(|&c| row.iter().any(|cell| cell.contains(&c)))
    }

    fn dfs(&mut self, mut t: usize, mut a: usize) -> Result<bool> {
        if self.p == 0 {
            return Ok(true);
        }
        loop {
            if t == self.target_compat.len() {
                return Ok(true);
            }
            if !self.covered(t, a) {
                break;
            }
            a += 1;
            if a == self.p {
                a = 0;
                t += 1;
            }
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(Error::BudgetExceeded {
                what: "array search nodes",
                limit: self.budget.max_nodes,
            });
        }

        for &c in &self.target_compat[t] {
            let clashes_in_row = self.cells[a]
                .iter()
                .flatten()
                .any(|&r| self.cand_compat[c][r]);
            if clashes_in_row {
                continue;
            }
            for b in 0..self.h {
                let clashes_in_column = (0..self.p)
                    .filter(|&a2| a2 != a)
                    .flat_map(|a2| self.cells[a2][b].iter())
                    .any(|&r| self.cand_compat[c][r]);
                if clashes_in_column {
                    continue;
                }
                self.cells[a][b].push(c);
                if self.dfs(t, a)? {
                    return Ok(true);
                }
                self.cells[a][b].pop();
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond;
    use crate::frame::OrderFrame;

    fn frame(n: usize) -> OrderFrame {
        OrderFrame::new(Universe::full(n).unwrap())
    }

    fn array(base: Condition, cells: Vec<Vec<Vec<Condition>>>) -> PhpArray {
        PhpArray {
            base,
            p: cells.len(),
            h: cells[0].len(),
            cells,
        }
    }

    #[test]
    fn singleton_array_is_valid() {
        let a = array(cond![1], vec![vec![vec![cond![1]]]]);
        let r = validate_array(&frame(3), &a).unwrap();
        assert!(r.passed(), "{:?}", r.failed_axioms());
        assert_eq!(array_size(&a).unwrap().by_cells, BigUint::from(1u32));
    }

    #[test]
    fn column_violation_is_reported() {
        let a = array(
            Condition::empty(),
            vec![vec![vec![cond![0, 1]]], vec![vec![cond![0, 1, 2]]]],
        );
        let r = validate_array(&frame(3), &a).unwrap();
        assert!(!r.column_incompatible.passed);
        let w = r.column_incompatible.counterexample.unwrap();
        assert_eq!(w.cells, vec![vec![0, 0], vec![1, 0]]);
    }

    #[test]
    fn empty_cells_fail_density() {
        let a: PhpArray = PhpArray::empty(Condition::empty(), 2, 2);
        assert_eq!(array_size(&a).unwrap().by_cells, BigUint::from(0u32));
        let r = validate_array(&frame(2), &a).unwrap();
        assert!(!r.dense_rows.passed);
        assert_eq!(r.failed_axioms(), vec!["dense_rows"]);
    }

    #[test]
    fn shape_is_checked() {
        let mut a: PhpArray = PhpArray::empty(Condition::empty(), 2, 2);
        a.cells.pop();
        assert!(validate_array(&frame(2), &a).is_err());
        assert!(array_size(&a).is_err());
    }

    #[test]
    fn uniformize_singleton() {
        let u = Universe::full(3).unwrap();
        let a = array(cond![1], vec![vec![vec![cond![1]]]]);
        let out = uniformize_rows(&u, &a, 1).unwrap();
        assert_eq!(out.array.cells[0][0], vec![cond![0, 1], cond![1, 0]]);
        assert_eq!(out.rows[0].padded_leaves, 1);
    }

    #[test]
    fn uniformize_two_cells() {
        let u = Universe::full(3).unwrap();
        let a = array(Condition::empty(), vec![vec![vec![cond![0, 1]], vec![cond![1, 0]]]]);
        let out = uniformize_rows(&u, &a, 2).unwrap();
        let cells = &out.array.cells[0];
        assert_eq!(cells[0].len() + cells[1].len(), 2);
        assert!(cells[0].iter().all(|q| q.extends(&cond![0, 1])));
        assert!(cells[1].iter().all(|q| q.extends(&cond![1, 0])));
        assert!(validate_array(&frame(3), &out.array).unwrap().passed());
        assert!(array_extends(&frame(3), &out.array, &a));
    }

    #[test]
    fn uniformize_rejects_shallow_depth() {
        let u = Universe::full(4).unwrap();
        let a = array(Condition::empty(), vec![vec![vec![cond![0, 1]], vec![cond![1, 0]]]]);
        assert!(uniformize_rows(&u, &a, 1).is_err());
        let capped = Universe::new(4, 2).unwrap();
        assert!(uniformize_rows(&capped, &a, 3).is_err());
    }

    #[test]
    fn upper_bound_examples() {
        let b = EnumerationBudget::default();
        let r = antichain_upper_bound_check(&[], &cond![2, 0], 0, 4, &b).unwrap();
        assert_eq!(r.total_orders, 12);

        let tree = crate::trees::build_uniform_tree(&Universe::full(4).unwrap(), &cond![3], &[0, 1]).unwrap();
        let r = antichain_upper_bound_check(&tree.leaves, &cond![3], 2, 4, &b).unwrap();
        assert!(r.passed());
        assert!(r.equality);

        let r = antichain_upper_bound_check(&[cond![0, 1], cond![0, 2]], &Condition::empty(), 2, 3, &b)
            .unwrap();
        assert!(!r.pairwise_incompatible);
        assert!(!r.disjoint);

        assert!(antichain_upper_bound_check(&[cond![0]], &Condition::empty(), 2, 3, &b).is_err());
    }

    #[test]
    fn search_examples() {
        let b = EnumerationBudget::default();
        let v = search_array(&frame(3), &Condition::empty(), 2, 1, 3, &b).unwrap();
        assert!(!v.exists());

        let v = search_array(&frame(3), &Condition::empty(), 1, 1, 3, &b).unwrap();
        match v {
            SearchVerdict::Exists { array, .. } => {
                assert_eq!(array.cells[0][0], vec![Condition::empty()]);
            }
            other => panic!("expected a witness, got {other:?}"),
        }

        let v = search_array(&frame(3), &Condition::empty(), 1, 2, 3, &b).unwrap();
        let SearchVerdict::Exists { array, .. } = v else {
            panic!("expected a witness")
        };
        assert!(validate_array(&frame(3), &array).unwrap().passed());
    }

    #[test]
    fn search_respects_budget() {
        let tight = EnumerationBudget::default().with_nodes(1);
        let err = search_array(&frame(3), &Condition::empty(), 3, 2, 3, &tight).unwrap_err();
        assert!(err.is_budget());
    }
}
