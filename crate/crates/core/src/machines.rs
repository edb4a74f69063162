//! Oracle decision trees over `u < v?` queries and their compilation into
//! families of order conditions.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrays::PhpArray;
use crate::error::{Error, Result};
use crate::poset::{Condition, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecisionNode {
    Query {
        query: [usize; 2],
        yes: Box<DecisionNode>,
        no: Box<DecisionNode>,
    },
    Leaf {
        leaf: bool,
    },
}

impl DecisionNode {
    pub fn leaf(accept: bool) -> Self {
        DecisionNode::Leaf { leaf: accept }
    }

    pub fn query(u: usize, v: usize, yes: DecisionNode, no: DecisionNode) -> Self {
        DecisionNode::Query {
            query: [u, v],
            yes: Box::new(yes),
            no: Box::new(no),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionNode::Leaf { .. } => 0,
            DecisionNode::Query { yes, no, .. } => 1 + yes.depth().max(no.depth()),
        }
    }

    fn max_element(&self) -> Option<usize> {
        match self {
            DecisionNode::Leaf { .. } => None,
            DecisionNode::Query { query, yes, no } => [
                Some(query[0].max(query[1])),
                yes.max_element(),
                no.max_element(),
            ]
            .into_iter()
            .flatten()
            .max(),
        }
    }
}

/// One decision tree per pigeon/hole pair. Pairs missing from the table
/// reject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProgram", into = "RawProgram")]
pub struct OracleProgram {
    pub depth_cap: usize,
    pub table: BTreeMap<(usize, usize), DecisionNode>,
}

#[derive(Serialize, Deserialize)]
struct RawProgram {
    depth_cap: usize,
    table: BTreeMap<String, DecisionNode>,
}

impl TryFrom<RawProgram> for OracleProgram {
    type Error = Error;

    fn try_from(raw: RawProgram) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (key, node) in raw.table {
            let parsed = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            let Some(pair) = parsed else {
                return Err(Error::InvalidInput(format!("table key {key:?} is not \"a,b\"")));
            };
            table.insert(pair, node);
        }
        OracleProgram::new(raw.depth_cap, table)
    }
}

impl From<OracleProgram> for RawProgram {
    fn from(p: OracleProgram) -> Self {
        RawProgram {
            depth_cap: p.depth_cap,
            table: p
                .table
                .into_iter()
                .map(|((a, b), node)| (format!("{a},{b}"), node))
                .collect(),
        }
    }
}

const REJECT: DecisionNode = DecisionNode::Leaf { leaf: false };

impl OracleProgram {
    pub fn new(depth_cap: usize, table: BTreeMap<(usize, usize), DecisionNode>) -> Result<Self> {
        if let Some(((a, b), node)) = table.iter().find(|(_, n)| n.depth() > depth_cap) {
            return Err(Error::InvalidInput(format!(
                "tree for ({a},{b}) has depth {} above the cap {depth_cap}",
                node.depth()
            )));
        }
        Ok(Self { depth_cap, table })
    }

    pub fn node(&self, a: usize, b: usize) -> &DecisionNode {
        self.table.get(&(a, b)).unwrap_or(&REJECT)
    }

    /// Queried elements must lie in the universe.
    pub fn check(&self, universe: &Universe) -> Result<()> {
        match self.table.values().filter_map(|n| n.max_element()).max() {
            Some(element) if element >= universe.n => Err(Error::OutOfRange {
                element,
                n: universe.n,
            }),
            _ => Ok(()),
        }
    }

    pub fn from_fn(p: usize, h: usize, depth_cap: usize, f: impl Fn(usize, usize) -> DecisionNode) -> Result<Self> {
        let mut table = BTreeMap::new();
        for a in 0..p {
            for b in 0..h {
                table.insert((a, b), f(a, b));
            }
        }
        Self::new(depth_cap, table)
    }

    pub fn constant(p: usize, h: usize, accept: bool) -> Self {
        Self::from_fn(p, h, 0, |_, _| DecisionNode::leaf(accept)).expect("depth 0")
    }

    /// Pigeon `a` sits in hole `a mod h`; no queries.
    pub fn modular(p: usize, h: usize) -> Self {
        Self::from_fn(p, h, 0, |a, b| DecisionNode::leaf(h > 0 && a % h == b)).expect("depth 0")
    }

    /// Pigeon `a` sits in hole `a`.
    pub fn identity(p: usize, h: usize) -> Self {
        Self::from_fn(p, h, 0, |a, b| DecisionNode::leaf(a == b)).expect("depth 0")
    }

    /// Two holes: pigeon `a` goes to hole 0 when `a < pivot` in the order and
    /// to hole 1 otherwise.
    pub fn threshold(p: usize, pivot: usize) -> Self {
        Self::from_fn(p, 2, 1, |a, b| {
            DecisionNode::query(a, pivot, DecisionNode::leaf(b == 0), DecisionNode::leaf(b == 1))
        })
        .expect("depth 1")
    }

    /// Independent uniformly random trees of exact depth `depth` over `[0, n)`.
    pub fn random(p: usize, h: usize, depth: usize, n: usize, rng: &mut impl Rng) -> Self {
        fn tree(depth: usize, n: usize, rng: &mut impl Rng) -> DecisionNode {
            if depth == 0 || n < 2 {
                return DecisionNode::leaf(rng.gen());
            }
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            DecisionNode::query(u, v, tree(depth - 1, n, rng), tree(depth - 1, n, rng))
        }
        let mut table = BTreeMap::new();
        for a in 0..p {
            for b in 0..h {
                table.insert((a, b), tree(depth, n, rng));
            }
        }
        Self::new(depth, table).expect("depth bounded by construction")
    }
}

/// Every decision tree of depth at most `depth` whose queries are pairs of
/// distinct elements of `[0, n)`.
pub fn enumerate_trees(n: usize, depth: usize) -> Vec<DecisionNode> {
    let mut trees = vec![DecisionNode::leaf(false), DecisionNode::leaf(true)];
    for _ in 0..depth {
        let mut next = vec![DecisionNode::leaf(false), DecisionNode::leaf(true)];
        for u in 0..n {
            for v in (0..n).filter(|&v| v != u) {
                for yes in &trees {
                    for no in &trees {
                        next.push(DecisionNode::query(u, v, yes.clone(), no.clone()));
                    }
                }
            }
        }
        trees = next;
    }
    trees
}

/// Run the tree for `(a, b)`, answering queries from `order`.
pub fn evaluate(prog: &OracleProgram, a: usize, b: usize, order: &Condition) -> Result<bool> {
    let mut node = prog.node(a, b);
    loop {
        match node {
            DecisionNode::Leaf { leaf } => return Ok(*leaf),
            DecisionNode::Query { query: [u, v], yes, no } => {
                node = match order.decides(*u, *v) {
                    Some(true) => yes,
                    Some(false) => no,
                    None => return Err(Error::UnansweredQuery { u: *u, v: *v }),
                };
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledFamily {
    pub base: Condition,
    pub p: usize,
    pub h: usize,
    #[serde(rename = "Tplus")]
    pub plus: Vec<Vec<Vec<Condition>>>,
    #[serde(rename = "Tminus")]
    pub minus: Vec<Vec<Vec<Condition>>>,
}

impl CompiledFamily {
    /// The accepting family as an indexed array.
    pub fn plus_array(&self) -> PhpArray {
        PhpArray {
            base: self.base.clone(),
            p: self.p,
            h: self.h,
            cells: self.plus.clone(),
        }
    }

    /// All leaves of the tree for `(a, b)`.
    pub fn leaves(&self, a: usize, b: usize) -> Vec<Condition> {
        let mut all = self.plus[a][b].clone();
        all.extend(self.minus[a][b].iter().cloned());
        all
    }
}

fn simulate(
    universe: &Universe,
    node: &DecisionNode,
    cond: Condition,
    plus: &mut Vec<Condition>,
    minus: &mut Vec<Condition>,
) -> Result<()> {
    match node {
        DecisionNode::Leaf { leaf: true } => plus.push(cond),
        DecisionNode::Leaf { leaf: false } => minus.push(cond),
        DecisionNode::Query { query: [u, v], yes, no } => match cond.decides(*u, *v) {
            Some(true) => simulate(universe, yes, cond, plus, minus)?,
            Some(false) => simulate(universe, no, cond, plus, minus)?,
            None => {
                // u is inserted before v; each branch is revisited until decided
                let missing = if cond.contains(*u) { *v } else { *u };
                for ext in universe.one_point_extensions(&cond, missing)? {
                    simulate(universe, node, ext, plus, minus)?;
                }
            }
        },
    }
    Ok(())
}

/// Unfold every tree along conditions extending `o`. Determined queries
/// follow their answer; undetermined ones branch over all insertions of the
/// missing elements.
pub fn compile(
    prog: &OracleProgram,
    universe: &Universe,
    o: &Condition,
    p: usize,
    h: usize,
) -> Result<CompiledFamily> {
    universe.check(o)?;
    prog.check(universe)?;
    // each query adds at most two elements, and nothing grows past n
    universe.check_len((o.len() + 2 * prog.depth_cap).min(universe.n))?;

    let cells: Vec<(Vec<Condition>, Vec<Condition>)> = (0..p * h)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (i / h, i % h);
            let (mut plus, mut minus) = (Vec::new(), Vec::new());
            simulate(universe, prog.node(a, b), o.clone(), &mut plus, &mut minus)?;
            Ok((plus, minus))
        })
        .collect::<Result<_>>()?;

    let mut plus = vec![vec![Vec::new(); h]; p];
    let mut minus = vec![vec![Vec::new(); h]; p];
    for (i, (pl, mi)) in cells.into_iter().enumerate() {
        plus[i / h][i % h] = pl;
        minus[i / h][i % h] = mi;
    }
    Ok(CompiledFamily {
        base: o.clone(),
        p,
        h,
        plus,
        minus,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhpVerdict {
    Unmapped { pigeon: usize },
    Collision { pigeons: [usize; 2], hole: usize },
    Split { pigeon: usize, holes: [usize; 2] },
    Injection,
}

impl PhpVerdict {
    pub fn is_violation(&self) -> bool {
        !matches!(self, PhpVerdict::Injection)
    }
}

/// Evaluate the program on all pairs under `order` and report the first
/// failure of injectivity, in the order: unmapped pigeon, two pigeons in one
/// hole, one pigeon in two holes.
pub fn php_instance_check(
    prog: &OracleProgram,
    p: usize,
    h: usize,
    order: &Condition,
) -> Result<PhpVerdict> {
    let graph: Vec<Vec<bool>> = (0..p)
        .map(|a| (0..h).map(|b| evaluate(prog, a, b, order)).collect())
        .collect::<Result<_>>()?;

    if let Some(pigeon) = (0..p).find(|&a| !graph[a].iter().any(|&x| x)) {
        return Ok(PhpVerdict::Unmapped { pigeon });
    }
    for a in 0..p {
        for a2 in a + 1..p {
            if let Some(hole) = (0..h).find(|&b| graph[a][b] && graph[a2][b]) {
                return Ok(PhpVerdict::Collision {
                    pigeons: [a, a2],
                    hole,
                });
            }
        }
    }
    for (a, row) in graph.iter().enumerate() {
        for b in 0..h {
            for b2 in b + 1..h {
                if row[b] && row[b2] {
                    return Ok(PhpVerdict::Split {
                        pigeon: a,
                        holes: [b, b2],
                    });
                }
            }
        }
    }
    Ok(PhpVerdict::Injection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond;

    fn single(node: DecisionNode) -> OracleProgram {
        let depth = node.depth();
        OracleProgram::new(depth, [((0, 0), node)].into()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let accept = OracleProgram::constant(1, 1, true);
        assert!(evaluate(&accept, 0, 0, &cond![2, 1, 0]).unwrap());

        let q = single(DecisionNode::query(0, 1, DecisionNode::leaf(true), DecisionNode::leaf(false)));
        assert!(evaluate(&q, 0, 0, &cond![0, 1]).unwrap());
        assert!(!evaluate(&q, 0, 0, &cond![1, 0]).unwrap());
        assert_eq!(
            evaluate(&q, 0, 0, &cond![1]),
            Err(Error::UnansweredQuery { u: 0, v: 1 })
        );
    }

    #[test]
    fn compile_examples() {
        let u = Universe::full(4).unwrap();
        let f = compile(&OracleProgram::constant(1, 1, true), &u, &Condition::empty(), 1, 1).unwrap();
        assert_eq!(f.plus[0][0], vec![Condition::empty()]);
        assert!(f.minus[0][0].is_empty());

        let q = single(DecisionNode::query(0, 1, DecisionNode::leaf(true), DecisionNode::leaf(false)));
        let f = compile(&q, &u, &Condition::empty(), 1, 1).unwrap();
        assert_eq!(f.plus[0][0], vec![cond![0, 1]]);
        assert_eq!(f.minus[0][0], vec![cond![1, 0]]);
    }

    #[test]
    fn determined_queries_do_not_grow() {
        let u = Universe::full(5).unwrap();
        let q = single(DecisionNode::query(0, 1, DecisionNode::leaf(true), DecisionNode::leaf(false)));
        let f = compile(&q, &u, &cond![1, 2, 0], 1, 1).unwrap();
        assert!(f.plus[0][0].is_empty());
        assert_eq!(f.minus[0][0], vec![cond![1, 2, 0]]);
    }

    #[test]
    fn compile_checks_cap_and_range() {
        let q = single(DecisionNode::query(0, 1, DecisionNode::leaf(true), DecisionNode::leaf(false)));
        let capped = Universe::new(4, 1).unwrap();
        assert!(matches!(
            compile(&q, &capped, &Condition::empty(), 1, 1),
            Err(Error::LengthCap { .. })
        ));
        let tiny = Universe::full(1).unwrap();
        assert!(matches!(
            compile(&OracleProgram::threshold(1, 3), &tiny, &Condition::empty(), 1, 2),
            Err(Error::OutOfRange { .. }) | Err(Error::LengthCap { .. })
        ));
    }

    #[test]
    fn php_check_examples() {
        let modular = OracleProgram::modular(3, 2);
        assert_eq!(
            php_instance_check(&modular, 3, 2, &cond![0, 1]).unwrap(),
            PhpVerdict::Collision {
                pigeons: [0, 2],
                hole: 0
            }
        );
        let reject = OracleProgram::constant(1, 1, false);
        assert_eq!(
            php_instance_check(&reject, 1, 1, &Condition::empty()).unwrap(),
            PhpVerdict::Unmapped { pigeon: 0 }
        );
        let id = OracleProgram::identity(2, 3);
        assert_eq!(
            php_instance_check(&id, 2, 3, &Condition::empty()).unwrap(),
            PhpVerdict::Injection
        );
        let split = OracleProgram::constant(1, 2, true);
        assert_eq!(
            php_instance_check(&split, 1, 2, &Condition::empty()).unwrap(),
            PhpVerdict::Split {
                pigeon: 0,
                holes: [0, 1]
            }
        );
    }

    #[test]
    fn program_json() {
        let json = r#"{"depth_cap":1,"table":{"0,0":{"query":[0,1],"yes":{"leaf":true},"no":{"leaf":false}},"1,0":{"leaf":true}}}"#;
        let prog: OracleProgram = serde_json::from_str(json).unwrap();
        assert_eq!(prog.table.len(), 2);
        assert_eq!(prog.node(1, 0), &DecisionNode::leaf(true));
        assert_eq!(prog.node(5, 5), &DecisionNode::leaf(false));
        assert_eq!(serde_json::to_string(&prog).unwrap(), json);

        let too_deep = r#"{"depth_cap":0,"table":{"0,0":{"query":[0,1],"yes":{"leaf":true},"no":{"leaf":false}}}}"#;
        assert!(serde_json::from_str::<OracleProgram>(too_deep).is_err());
        let bad_key = r#"{"depth_cap":0,"table":{"zero":{"leaf":true}}}"#;
        assert!(serde_json::from_str::<OracleProgram>(bad_key).is_err());
    }

    #[test]
    fn tree_enumeration_counts() {
        // 2 + q * T^2 with q ordered pairs of distinct elements
        assert_eq!(enumerate_trees(3, 0).len(), 2);
        assert_eq!(enumerate_trees(3, 1).len(), 2 + 6 * 4);
        assert_eq!(enumerate_trees(3, 2).len(), 2 + 6 * 26 * 26);
    }
}
