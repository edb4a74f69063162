//! Invariant suites: each runs a grid of instances, compares the main
//! modules against the brute-force oracles or the closed-form counts, and
//! returns an ordered, digested report.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arrays::{
    antichain_upper_bound_check, array_extends, array_size, search_array, staged_depth,
    uniformize_rows, validate_array, PhpArray,
};
use crate::bruteforce::{all_total_orders, max_antichain, EnumerationBudget};
use crate::error::{Error, Result};
use crate::frame::{frame_bound_check, Frame, OrderFrame};
use crate::game::{
    run_game, AlternativeKind, DloPlayer, MinPlayer, PassPlayer, PhpPlayer, Requirement, Strategy,
};
use crate::machines::{
    compile, enumerate_trees, evaluate, php_instance_check, CompiledFamily, DecisionNode,
    OracleProgram,
};
use crate::poset::{Condition, Universe};
use crate::trees::{build_uniform_tree, envelope, tree_size, validate_tree, MinTree};
use crate::variants::{
    dominating_set_check, DominationPlayer, PartialFnCondition, PartialFnFrame, SurjectionPlayer,
    TourPlayer, TournamentCondition, TournamentFrame,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    TreeProps,
    Envelope,
    Uniformize,
    UpperBound,
    ArrayInequality,
    FrameBounds,
    CompileSoundness,
    SingleStep,
    Game,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::TreeProps,
        Suite::Envelope,
        Suite::Uniformize,
        Suite::UpperBound,
        Suite::ArrayInequality,
        Suite::FrameBounds,
        Suite::CompileSoundness,
        Suite::SingleStep,
        Suite::Game,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TreeProps => "tree-props",
            Suite::Envelope => "envelope",
            Suite::Uniformize => "uniformize",
            Suite::UpperBound => "upper-bound",
            Suite::ArrayInequality => "array-inequality",
            Suite::FrameBounds => "frame-bounds",
            Suite::CompileSoundness => "compile-soundness",
            Suite::SingleStep => "single-step",
            Suite::Game => "game",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Order,
    Tournament,
    Partialfn,
}

impl FromStr for FrameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "order" => Ok(FrameKind::Order),
            "tournament" => Ok(FrameKind::Tournament),
            "partialfn" => Ok(FrameKind::Partialfn),
            _ => Err(Error::InvalidInput(format!("unknown frame {s:?}"))),
        }
    }
}

/// Everything needed to replay a run. Unset grid parameters mean the
/// suite's default grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub frame: Option<FrameKind>,
    pub n: Option<usize>,
    pub length_cap: Option<usize>,
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub h: Option<usize>,
    pub depth: Option<usize>,
    pub budget_nodes: u64,
    pub rounds: Option<usize>,
    pub schedule: Option<Vec<String>>,
    pub requirements: Option<String>,
    pub input: Option<String>,
    pub out: Option<String>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            frame: None,
            n: None,
            length_cap: None,
            m: None,
            p: None,
            h: None,
            depth: None,
            budget_nodes: EnumerationBudget::default().max_nodes,
            rounds: None,
            schedule: None,
            requirements: None,
            input: None,
            out: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget_nodes == 0 {
            return Err(Error::InvalidInput("node budget must be positive".into()));
        }
        for (name, v) in [("n", self.n), ("p", self.p), ("h", self.h), ("m", self.m)] {
            if v == Some(0) {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        if let (Some(n), Some(cap)) = (self.n, self.length_cap) {
            Universe::new(n, cap)?;
        }
        Ok(())
    }

    pub fn budget(&self) -> EnumerationBudget {
        EnumerationBudget::default().with_nodes(self.budget_nodes)
    }

    fn universe(&self, n: usize) -> Result<Universe> {
        Universe::new(n, self.length_cap.unwrap_or(n).min(n))
    }
}

/// One checked grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub params: Value,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: RunConfig,
    pub instances: Vec<Instance>,
    pub checked: usize,
    pub failed: usize,
    pub passed: bool,
    /// Hex SHA-256 of the canonical JSON of suite, config and instances.
    pub digest: String,
}

/// Hex SHA-256 of the compact JSON encoding of `value`.
pub fn content_digest<T: Serialize + ?Sized>(value: &T) -> String {
    let body = serde_json::to_vec(value).expect("reports serialize");
    hex::encode(Sha256::digest(body))
}

fn digest(suite: Suite, config: &RunConfig, instances: &[Instance]) -> String {
    content_digest(&(suite, config, instances))
}

impl SuiteReport {
    fn seal(suite: Suite, config: &RunConfig, instances: Vec<Instance>) -> Self {
        let failed = instances.iter().filter(|i| !i.passed).count();
        Self {
            suite,
            digest: digest(suite, config, &instances),
            config: config.clone(),
            checked: instances.len(),
            failed,
            passed: failed == 0,
            instances,
        }
    }

    pub fn digest_matches(&self) -> bool {
        self.digest == digest(self.suite, &self.config, &self.instances)
    }
}

/// Run one suite. `input` replaces the default grid for `tree-props`
/// (one tree or a list) and `uniformize` (one array).
pub fn run_suite(suite: Suite, config: &RunConfig, input: Option<&Value>) -> Result<SuiteReport> {
    config.validate()?;
    if input.is_some() && !matches!(suite, Suite::TreeProps | Suite::Uniformize) {
        return Err(Error::InvalidInput(format!("suite {suite} takes no input file")));
    }
    let instances = match suite {
        Suite::TreeProps => tree_props(config, input)?,
        Suite::Envelope => envelope_suite(config)?,
        Suite::Uniformize => uniformize_suite(config, input)?,
        Suite::UpperBound => upper_bound(config)?,
        Suite::ArrayInequality => array_inequality(config)?,
        Suite::FrameBounds => frame_bounds(config)?,
        Suite::CompileSoundness => compile_soundness(config)?,
        Suite::SingleStep => single_step(config)?,
        Suite::Game => game_suite(config)?,
    };
    Ok(SuiteReport::seal(suite, config, instances))
}

fn prefix(k: usize) -> Condition {
    Condition::new((0..k).collect()).expect("distinct")
}

fn from_value<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn tree_props(config: &RunConfig, input: Option<&Value>) -> Result<Vec<Instance>> {
    if let Some(v) = input {
        let trees: Vec<MinTree> = match v {
            Value::Array(_) => from_value(v)?,
            _ => vec![from_value(v)?],
        };
        return trees
            .iter()
            .enumerate()
            .map(|(i, tree)| {
                let top = tree
                    .leaves
                    .iter()
                    .chain([&tree.root])
                    .flat_map(|c| c.as_slice().iter().copied())
                    .max()
                    .map_or(1, |x| x + 1);
                let u = config.universe(config.n.unwrap_or(top))?;
                let report = validate_tree(tree, &u, u.length_cap);
                Ok(Instance {
                    params: json!({"tree": i, "n": u.n, "root": tree.root, "depth": tree.depth}),
                    passed: report.passed(),
                    detail: serde_json::to_value(&report).expect("serializable"),
                })
            })
            .collect();
    }

    let mut grid = Vec::new();
    for k in 0..=3 {
        for d in 0..=3 {
            if config.depth.is_some_and(|dd| dd != d) {
                continue;
            }
            let n = config.n.unwrap_or(k + d).max(1);
            if k + d <= n {
                grid.push((k, d, n));
            }
        }
    }
    grid.into_par_iter()
        .map(|(k, d, n)| {
            let u = config.universe(n)?;
            if k + d > u.length_cap {
                return Ok(None);
            }
            let o = prefix(k);
            let tree = build_uniform_tree(&u, &o, &u.fresh_elements(&o, d)?)?;
            let report = validate_tree(&tree, &u, u.length_cap);
            let formula = tree_size(k, d);
            let passed = report.passed()
                && tree.is_uniform()
                && BigUint::from(tree.size()) == formula;
            Ok(Some(Instance {
                params: json!({"o_len": k, "d": d, "n": n}),
                passed,
                detail: json!({
                    "leaves": tree.size(),
                    "formula": formula.to_string(),
                    "report": report,
                }),
            }))
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

fn mask(c: &Condition) -> u64 {
    c.as_slice().iter().fold(0, |m, &x| m | 1 << x)
}

fn envelope_suite(config: &RunConfig) -> Result<Vec<Instance>> {
    let top = config.n.unwrap_or(5);
    if top > 6 {
        return Err(Error::BudgetExceeded {
            what: "envelope universe",
            limit: 6,
        });
    }
    let max_len = config.length_cap.unwrap_or(4);
    (1..=top)
        .map(|n| {
            let u = Universe::full(n)?;
            let conds = u.extensions_up_to(&Condition::empty(), max_len.min(n));
            let masks: Vec<u64> = conds.iter().map(mask).collect();
            // (pairs, gain checks, first counterexample)
            let per_q: Vec<(u64, u64, Option<(String, Vec<Condition>)>)> = conds
                .par_iter()
                .enumerate()
                .map(|(qi, q)| {
                    let mut pairs = 0;
                    let mut gains = 0;
                    for s in conds.iter().filter(|s| q.is_compatible(s)) {
                        pairs += 1;
                        let env = envelope(&u, q, s)?;
                        let domain = mask(q) | mask(s);
                        if let Some(r) = env
                            .tree
                            .leaves
                            .iter()
                            .find(|r| mask(r) != domain || !r.extends(q))
                        {
                            return Ok((pairs, gains, Some(("domain".into(), vec![q.clone(), s.clone(), r.clone()]))));
                        }
                        for (si, s2) in conds.iter().enumerate() {
                            if s2.is_compatible(s) || !s2.is_compatible(q) {
                                continue;
                            }
                            let base = (masks[qi] & masks[si]).count_ones();
                            let mut covered = false;
                            for r in env.tree.leaves.iter().filter(|r| r.is_compatible(s2)) {
                                covered = true;
                                gains += 1;
                                if (mask(r) & masks[si]).count_ones() < base + 1 {
                                    return Ok((pairs, gains, Some(("gain".into(), vec![q.clone(), s.clone(), s2.clone(), r.clone()]))));
                                }
                            }
                            if !covered {
                                return Ok((pairs, gains, Some(("covering".into(), vec![q.clone(), s.clone(), s2.clone()]))));
                            }
                        }
                    }
                    Ok((pairs, gains, None))
                })
                .collect::<Result<_>>()?;
            let pairs: u64 = per_q.iter().map(|x| x.0).sum();
            let gains: u64 = per_q.iter().map(|x| x.1).sum();
            let failures: Vec<_> = per_q.into_iter().filter_map(|x| x.2).collect();
            Ok(Instance {
                params: json!({"n": n, "max_len": max_len.min(n)}),
                passed: failures.is_empty(),
                detail: json!({
                    "conditions": conds.len(),
                    "compatible_pairs": pairs,
                    "gain_checks": gains,
                    "counterexamples": failures.len(),
                    "first": failures.first(),
                }),
            })
        })
        .collect()
}

/// A named array over a universe, as fed to the uniformization suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusArray {
    pub name: String,
    pub universe: Universe,
    pub array: PhpArray<Condition>,
}

fn corpus_array(name: &str, n: usize, base: Vec<usize>, cells: Vec<Vec<Vec<Vec<usize>>>>) -> CorpusArray {
    let conv = |v: Vec<usize>| Condition::new(v).expect("distinct");
    CorpusArray {
        name: name.into(),
        universe: Universe::full(n).expect("valid"),
        array: PhpArray {
            base: conv(base),
            p: cells.len(),
            h: cells[0].len(),
            cells: cells
                .into_iter()
                .map(|row| row.into_iter().map(|cell| cell.into_iter().map(conv).collect()).collect())
                .collect(),
        },
    }
}

/// Leaves of a random MIN-tree below `base`: repeatedly pick a leaf and
/// replace it by all insertions of a random fresh element.
fn random_min_tree(rng: &mut ChaCha8Rng, u: &Universe, base: &Condition, max_len: usize, steps: usize) -> Result<Vec<Condition>> {
    let mut leaves = vec![base.clone()];
    for _ in 0..steps {
        let open: Vec<usize> = (0..leaves.len()).filter(|&i| leaves[i].len() < max_len).collect();
        let Some(&i) = open.choose(rng) else { break };
        let leaf = leaves.swap_remove(i);
        let fresh: Vec<usize> = (0..u.n).filter(|&x| !leaf.contains(x)).collect();
        let &x = fresh.choose(rng).expect("leaf shorter than n");
        leaves.extend(u.one_point_extensions(&leaf, x)?);
    }
    leaves.sort();
    Ok(leaves)
}

/// The fixed uniformization corpus: hand-built arrays, arrays found by the
/// exhaustive search, and seeded random arrays whose rows share one MIN-tree
/// with holes shifted per row.
pub fn uniformize_corpus(seed: u64) -> Result<Vec<CorpusArray>> {
    let mut corpus = vec![
        corpus_array("trivial", 3, vec![], vec![vec![vec![vec![]]]]),
        corpus_array("split-pair", 3, vec![], vec![vec![vec![vec![0, 1]], vec![vec![1, 0]]]]),
        corpus_array(
            "permutation-2x2",
            3,
            vec![],
            vec![
                vec![vec![vec![0, 1]], vec![vec![1, 0]]],
                vec![vec![vec![1, 0]], vec![vec![0, 1]]],
            ],
        ),
        corpus_array(
            "staircase-2x3",
            4,
            vec![],
            vec![
                vec![vec![vec![0, 1]], vec![vec![1, 0]], vec![]],
                vec![vec![], vec![vec![0, 1]], vec![vec![1, 0]]],
            ],
        ),
        corpus_array(
            "ragged-row",
            4,
            vec![],
            vec![vec![vec![vec![1, 0], vec![0, 2, 1]], vec![vec![2, 0, 1], vec![0, 1, 2]]]],
        ),
        corpus_array("one-point", 4, vec![2], vec![vec![vec![vec![0, 2], vec![2, 0]]]]),
        corpus_array(
            "based-2x2",
            5,
            vec![1, 0],
            vec![
                vec![vec![vec![2, 1, 0]], vec![vec![1, 2, 0], vec![1, 0, 2]]],
                vec![vec![vec![1, 2, 0], vec![1, 0, 2]], vec![vec![2, 1, 0]]],
            ],
        ),
        corpus_array(
            "ragged-3x3",
            5,
            vec![],
            vec![
                vec![vec![vec![1, 0]], vec![vec![0, 2, 1]], vec![vec![0, 1, 2], vec![2, 0, 1]]],
                vec![vec![vec![0, 2, 1]], vec![vec![0, 1, 2], vec![2, 0, 1]], vec![vec![1, 0]]],
                vec![vec![vec![0, 1, 2], vec![2, 0, 1]], vec![vec![1, 0]], vec![vec![0, 2, 1]]],
            ],
        ),
    ];

    let budget = EnumerationBudget::default().with_nodes(1_000_000);
    for (n, base, p, h) in [(3, vec![], 1, 2), (3, vec![], 2, 3), (4, vec![0], 2, 2), (3, vec![1], 3, 3)] {
        let u = Universe::full(n)?;
        let base = Condition::new(base)?;
        if let crate::arrays::SearchVerdict::Exists { array, .. } =
            search_array(&OrderFrame::new(u), &base, p, h, 3.min(n), &budget)?
        {
            corpus.push(CorpusArray {
                name: format!("search-{p}x{h}-n{n}-base{}", base.len()),
                universe: u,
                array,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut made = 0;
    while made < 14 {
        let n = rng.gen_range(3..=6);
        let u = Universe::full(n)?;
        let k = rng.gen_range(0..=1.min(n - 2));
        let mut pool: Vec<usize> = (0..n).collect();
        pool.shuffle(&mut rng);
        let base = Condition::new(pool[..k].to_vec())?;
        let max_len = (k + 3).min(n - 1).max(k + 1);
        let steps = rng.gen_range(1..=5);
        let leaves = random_min_tree(&mut rng, &u, &base, max_len, steps)?;
        let p = rng.gen_range(1..=3);
        let h = rng.gen_range(p..=3);
        let holes: Vec<usize> = leaves.iter().map(|_| rng.gen_range(0..h)).collect();
        let mut array = PhpArray::empty(base, p, h);
        for a in 0..p {
            for (leaf, &b) in leaves.iter().zip(&holes) {
                array.cells[a][(b + a) % h].push(leaf.clone());
            }
        }
        // keep only arrays that fit the universe after uniformization
        let d = staged_depth(&u, &array)?;
        if array.base.len() + d > n {
            continue;
        }
        corpus.push(CorpusArray {
            name: format!("random-{made}"),
            universe: u,
            array,
        });
        made += 1;
    }
    Ok(corpus)
}

fn uniformize_suite(config: &RunConfig, input: Option<&Value>) -> Result<Vec<Instance>> {
    let corpus = match input {
        Some(v) => {
            let array: PhpArray<Condition> = from_value(v)?;
            let top = array
                .members()
                .flat_map(|(_, c)| c.as_slice().iter().copied())
                .chain(array.base.as_slice().iter().copied())
                .max()
                .map_or(1, |x| x + 1);
            vec![CorpusArray {
                name: "input".into(),
                universe: config.universe(config.n.unwrap_or(top.max(6)))?,
                array,
            }]
        }
        None => uniformize_corpus(config.seed)?,
    };
    corpus
        .par_iter()
        .map(|entry| {
            let (u, array) = (&entry.universe, &entry.array);
            let frame = OrderFrame::new(*u);
            let before = validate_array(&frame, array)?;
            let params = json!({
                "name": entry.name, "n": u.n, "base": array.base, "p": array.p, "h": array.h,
            });
            if !before.passed() {
                return Ok(Instance {
                    params,
                    passed: false,
                    detail: json!({"input_failed": before.failed_axioms(), "input": before}),
                });
            }
            let d = staged_depth(u, array)?;
            let out = uniformize_rows(u, array, d)?;
            let after = validate_array(&frame, &out.array)?;
            let extends = array_extends(&frame, &out.array, array);
            let target = array.base.len() + d;
            let per_row = tree_size(array.base.len(), d);
            let uniform_rows = (0..array.p).all(|a| {
                let row: Vec<&Condition> = out.array.row(a).map(|(_, c)| c).collect();
                BigUint::from(row.len()) == per_row && row.iter().all(|c| c.len() == target)
            });
            let size = array_size(&out.array)?;
            let expected = per_row * array.p;
            let passed = after.passed() && extends && uniform_rows && size.by_cells == expected;
            Ok(Instance {
                params,
                passed,
                detail: json!({
                    "depth": d,
                    "output_size": size.by_cells.to_string(),
                    "expected_size": expected.to_string(),
                    "extends_input": extends,
                    "uniform_rows": uniform_rows,
                    "failed_axioms": after.failed_axioms(),
                    "rows": out.rows,
                }),
            })
        })
        .collect()
}

fn upper_bound(config: &RunConfig) -> Result<Vec<Instance>> {
    let budget = config.budget();
    let mut grid = Vec::new();
    for k in 0..=3 {
        for d in 0..=3 {
            if config.depth.is_some_and(|dd| dd != d) {
                continue;
            }
            let ms = match config.m {
                Some(m) => m..=m,
                None => (k + d).max(1)..=7,
            };
            grid.extend(ms.filter(|&m| m >= k + d).map(|m| (k, d, m)));
        }
    }
    grid.into_par_iter()
        .map(|(k, d, m)| {
            let u = Universe::full(m)?;
            let o = prefix(k);
            let family = build_uniform_tree(&u, &o, &u.fresh_elements(&o, d)?)?.leaves;
            let report = antichain_upper_bound_check(&family, &o, d, m, &budget)?;
            let exhaustive = max_antichain(&o, d, m, &budget)?;
            let bound = tree_size(k, d);
            let passed = report.passed() && report.equality && BigUint::from(exhaustive) == bound;
            Ok(Instance {
                params: json!({"o_len": k, "d": d, "m": m}),
                passed,
                detail: json!({
                    "bound": bound.to_string(),
                    "max_antichain": exhaustive,
                    "tree_members": report.members,
                    "total_orders": report.total_orders,
                    "expected_total_orders": report.expected_total_orders,
                    "expected_per_member": report.expected_per_member,
                    "per_member_ok": report.extensions_per_member.iter().all(|&x| x == report.expected_per_member),
                    "disjoint": report.disjoint,
                }),
            })
        })
        .collect()
}

fn array_inequality(config: &RunConfig) -> Result<Vec<Instance>> {
    let budget = config.budget();
    let shapes = match (config.p, config.h) {
        (Some(p), Some(h)) => vec![(p, h)],
        (None, None) => vec![(2, 1), (3, 1), (3, 2), (1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)],
        _ => return Err(Error::InvalidInput("give both --p and --h or neither".into())),
    };
    let ns = match config.n {
        Some(n) => n..=n,
        None => 1..=4,
    };
    let mut grid = Vec::new();
    for n in ns {
        for &(p, h) in &shapes {
            for k in 0..=1 {
                if k < n {
                    grid.push((n, p, h, k));
                }
            }
        }
    }
    grid.into_par_iter()
        .map(|(n, p, h, k)| {
            let u = config.universe(n)?;
            let frame = OrderFrame::new(u);
            let base = prefix(k);
            let max_len = 3.min(u.length_cap);
            let verdict = search_array(&frame, &base, p, h, max_len, &budget)?;
            let witness_ok = match &verdict {
                crate::arrays::SearchVerdict::Exists { array, .. } => validate_array(&frame, array)?.passed(),
                crate::arrays::SearchVerdict::Nonexistent { .. } => true,
            };
            Ok(Instance {
                params: json!({"n": n, "p": p, "h": h, "base": base, "max_len": max_len}),
                passed: verdict.exists() == (p <= h) && witness_ok,
                detail: serde_json::to_value(&verdict).expect("serializable"),
            })
        })
        .collect()
}

fn bound_instance<F: Frame>(frame: &F, base: &F::Cond, n: usize, d: usize, budget: &EnumerationBudget) -> Result<Instance> {
    let r = frame_bound_check(frame, base, d, budget)?;
    let passed = r.passed && (d > 0 || r.tree_size == 1);
    Ok(Instance {
        params: json!({"frame": frame.name(), "n": n, "base_size": frame.size(base), "d": d}),
        passed,
        detail: json!({
            "tree_formula": r.tree_formula.to_string(),
            "antichain_formula": r.antichain_formula.to_string(),
            "tree_size": r.tree_size,
            "pairwise_incompatible": r.tree_pairwise_incompatible,
            "candidates": r.candidates,
            "max_antichain": r.max_antichain,
        }),
    })
}

fn frame_bounds(config: &RunConfig) -> Result<Vec<Instance>> {
    let budget = config.budget();
    let wants = |k: FrameKind| config.frame.is_none_or(|f| f == k);
    let ns = |default: std::ops::RangeInclusive<usize>| match config.n {
        Some(n) => n..=n,
        None => default,
    };
    let ds: Vec<usize> = match config.depth {
        Some(d) => vec![d],
        None => vec![0, 1, 2],
    };
    let mut out = Vec::new();
    if wants(FrameKind::Order) {
        for n in ns(4..=4) {
            for k in 0..=2 {
                for &d in &ds {
                    if k + d <= n {
                        let frame = OrderFrame::new(Universe::full(n)?);
                        out.push(bound_instance(&frame, &prefix(k), n, d, &budget)?);
                    }
                }
            }
        }
    }
    if wants(FrameKind::Tournament) {
        for n in ns(1..=3) {
            for k in 0..=2 {
                for &d in &ds {
                    if k + d <= n {
                        let frame = TournamentFrame::new(n, n)?;
                        let base = TournamentCondition::new(0..k, (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))))?;
                        out.push(bound_instance(&frame, &base, n, d, &budget)?);
                    }
                }
            }
        }
    }
    if wants(FrameKind::Partialfn) {
        for n in ns(1..=3) {
            for k in 0..=1 {
                for &d in &ds {
                    if k + d <= n {
                        let frame = PartialFnFrame::new(n, n)?;
                        let base = PartialFnCondition::new((0..k).map(|x| (x, x)))?;
                        out.push(bound_instance(&frame, &base, n, d, &budget)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn single_cell(depth: usize, tree: DecisionNode) -> OracleProgram {
    OracleProgram::new(depth, [((0, 0), tree)].into()).expect("depth within cap")
}

/// Soundness of one compiled tree: accepting leaves force acceptance,
/// rejecting leaves force rejection, and together they form an `()`-tree.
fn compiled_tree_failure(u: &Universe, depth: usize, tree: &DecisionNode, budget: &EnumerationBudget) -> Result<Option<Value>> {
    let prog = single_cell(depth, tree.clone());
    let fam = compile(&prog, u, &Condition::empty(), 1, 1)?;
    for (leaves, expect) in [(&fam.plus[0][0], true), (&fam.minus[0][0], false)] {
        for leaf in leaves {
            for order in all_total_orders(u.n, leaf, budget)? {
                if evaluate(&prog, 0, 0, &order)? != expect {
                    return Ok(Some(json!({"tree": tree, "leaf": leaf, "order": order, "expected": expect})));
                }
            }
        }
    }
    let leaves = fam.leaves(0, 0);
    let tree_of_leaves = MinTree {
        root: Condition::empty(),
        depth: leaves.iter().map(Condition::len).max().unwrap_or(0),
        leaves,
    };
    let report = validate_tree(&tree_of_leaves, u, u.n);
    if !report.passed() {
        return Ok(Some(json!({"tree": tree, "report": report})));
    }
    Ok(None)
}

fn compile_soundness(config: &RunConfig) -> Result<Vec<Instance>> {
    let budget = config.budget();
    let top = config.n.unwrap_or(4);
    let depth = config.depth.unwrap_or(2);
    (1..=top)
        .map(|n| {
            let u = Universe::full(n)?;
            let trees = enumerate_trees(n, depth);
            if trees.len() as u64 > budget.max_nodes {
                return Err(Error::BudgetExceeded {
                    what: "decision trees",
                    limit: budget.max_nodes,
                });
            }
            let failures: Vec<Value> = trees
                .par_iter()
                .map(|t| compiled_tree_failure(&u, depth, t, &budget))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            Ok(Instance {
                params: json!({"n": n, "max_depth": depth}),
                passed: failures.is_empty(),
                detail: json!({
                    "trees": trees.len(),
                    "failures": failures.len(),
                    "first_failure": failures.first(),
                }),
            })
        })
        .collect()
}

/// Every program whose cells are depth-bounded trees over `[0, n)`, up to
/// the accepting family each cell compiles to: single-step search and the
/// pigeonhole check only see a tree through that family.
fn single_step(config: &RunConfig) -> Result<Vec<Instance>> {
    let budget = config.budget();
    let top = config.n.unwrap_or(4);
    let depth = config.depth.unwrap_or(2);
    let (p, h) = (config.p.unwrap_or(2), config.h.unwrap_or(1));
    if p <= h {
        return Err(Error::InvalidInput(format!("single-step needs p > h, got p = {p}, h = {h}")));
    }
    (1..=top)
        .map(|n| {
            let u = Universe::full(n)?;
            let trees = enumerate_trees(n, depth);
            let mut classes: BTreeMap<Vec<Condition>, (DecisionNode, Vec<Condition>)> = BTreeMap::new();
            for t in &trees {
                let fam = compile(&single_cell(depth, t.clone()), &u, &Condition::empty(), 1, 1)?;
                let mut plus = fam.plus[0][0].clone();
                plus.sort();
                classes
                    .entry(plus)
                    .or_insert_with(|| (t.clone(), fam.minus[0][0].clone()));
            }
            let reps: Vec<(&Vec<Condition>, &(DecisionNode, Vec<Condition>))> = classes.iter().collect();
            let cells = p * h;
            let combos = (reps.len() as u64).checked_pow(cells as u32).unwrap_or(u64::MAX);
            if combos > budget.max_nodes {
                return Err(Error::BudgetExceeded {
                    what: "program combinations",
                    limit: budget.max_nodes,
                });
            }
            let outcomes: Vec<std::result::Result<AlternativeKind, Value>> = (0..combos)
                .into_par_iter()
                .map(|code| {
                    let mut pick = Vec::with_capacity(cells);
                    let mut rest = code;
                    for _ in 0..cells {
                        pick.push(reps[(rest % reps.len() as u64) as usize]);
                        rest /= reps.len() as u64;
                    }
                    let prog = OracleProgram::new(
                        depth,
                        (0..cells).map(|i| ((i / h, i % h), pick[i].1 .0.clone())).collect(),
                    )?;
                    let family = CompiledFamily {
                        base: Condition::empty(),
                        p,
                        h,
                        plus: (0..p).map(|a| (0..h).map(|b| pick[a * h + b].0.clone()).collect()).collect(),
                        minus: (0..p).map(|a| (0..h).map(|b| pick[a * h + b].1 .1.clone()).collect()).collect(),
                    };
                    let alt = match crate::game::single_step_search(&u, &family, u.length_cap) {
                        Ok(alt) => alt,
                        Err(Error::Exhausted(_)) => return Ok(Err(json!({"program": prog, "reason": "no alternative"}))),
                        Err(e) => return Err(e),
                    };
                    for order in all_total_orders(n, &alt.extension, &budget)? {
                        let verdict = php_instance_check(&prog, p, h, &order)?;
                        if !verdict.is_violation() {
                            return Ok(Err(json!({"program": prog, "alternative": alt, "order": order})));
                        }
                    }
                    Ok(Ok(alt.kind))
                })
                .collect::<Result<_>>()?;
            let mut kinds: BTreeMap<String, u64> = BTreeMap::new();
            let mut failures = Vec::new();
            for o in outcomes {
                match o {
                    Ok(kind) => *kinds.entry(serde_json::to_value(kind).expect("kind").as_str().unwrap_or("?").to_string()).or_default() += 1,
                    Err(v) => failures.push(v),
                }
            }
            Ok(Instance {
                params: json!({"n": n, "max_depth": depth, "p": p, "h": h}),
                passed: failures.is_empty(),
                detail: json!({
                    "trees": trees.len(),
                    "accepting_families": reps.len(),
                    "combinations": combos,
                    "kinds": kinds,
                    "failures": failures.len(),
                    "first_failure": failures.first(),
                }),
            })
        })
        .collect()
}

/// Fresh minimum after every MIN round.
fn min_game(config: &RunConfig) -> Result<Instance> {
    let rounds = config.rounds.unwrap_or(30);
    let n = config.n.unwrap_or(rounds.div_ceil(2).max(1));
    let frame = OrderFrame::new(config.universe(n)?);
    let schedule = vec!["MIN".to_string(), "PASS".to_string()];
    let mut players: BTreeMap<String, Box<dyn Strategy<OrderFrame>>> = BTreeMap::new();
    players.insert("MIN".into(), Box::new(MinPlayer::new(n)));
    players.insert("PASS".into(), Box::new(PassPlayer));
    let params = json!({"game": "min", "rounds": rounds, "n": n});
    let transcript = match run_game(&frame, &schedule, &mut players, rounds) {
        Ok(t) => t,
        Err(abort) => {
            return Ok(Instance {
                params,
                passed: false,
                detail: json!({"error": abort.error.to_string(), "rounds": abort.transcript.rounds.len()}),
            })
        }
    };
    let min_rounds: Vec<_> = transcript.rounds_of("MIN").collect();
    let fresh = min_rounds.iter().all(|r| {
        r.output.len() == r.input.len() + 1
            && r.output.minimum().is_some_and(|x| !r.input.contains(x))
            && r.output.as_slice()[1..] == *r.input.as_slice()
    });
    Ok(Instance {
        params,
        passed: fresh && transcript.rounds.len() == rounds,
        detail: json!({"min_rounds": min_rounds.len(), "final": transcript.final_condition}),
    })
}

/// Between every adjacent pair of `X`-elements placed before a DLO round,
/// the round inserts a fresh `X`-element, as long as enough remain.
fn dlo_game() -> Result<Instance> {
    let x_size = 15;
    let n = x_size + 5;
    let x: BTreeSet<usize> = (0..x_size).collect();
    let frame = OrderFrame::new(Universe::full(n)?);
    let schedule = vec!["DLO".to_string(), "MIN".to_string()];
    let mut players: BTreeMap<String, Box<dyn Strategy<OrderFrame>>> = BTreeMap::new();
    players.insert("DLO".into(), Box::new(DloPlayer::new(x.clone())));
    players.insert(
        "MIN".into(),
        Box::new(MinPlayer {
            queue: (x_size..n).collect(),
        }),
    );
    let rounds = 10;
    let params = json!({"game": "dlo", "x_size": x_size, "n": n, "rounds": rounds});
    let transcript = match run_game(&frame, &schedule, &mut players, rounds) {
        Ok(t) => t,
        Err(abort) => {
            return Ok(Instance {
                params,
                passed: false,
                detail: json!({"error": abort.error.to_string()}),
            })
        }
    };
    let mut dense_rounds = 0;
    let mut ok = true;
    for r in transcript.rounds_of("DLO") {
        let before = r.input.restrict(&x);
        let after = r.output.restrict(&x);
        let remaining = x.len() - before.len();
        if remaining < before.len() + 1 {
            ok &= r.output == r.input;
            continue;
        }
        // every gap around the old X-elements, ends included, gains an element
        let pos: Vec<usize> = before.as_slice().iter().map(|&e| after.position(e).expect("kept")).collect();
        let dense = match (pos.first(), pos.last()) {
            (Some(&first), Some(&last)) => {
                first >= 1 && last + 1 < after.len() && pos.windows(2).all(|w| w[1] >= w[0] + 2)
            }
            _ => !after.is_empty(),
        };
        ok &= dense;
        dense_rounds += 1;
    }
    Ok(Instance {
        params,
        passed: ok && dense_rounds >= 3,
        detail: json!({"dense_rounds": dense_rounds, "final": transcript.final_condition}),
    })
}

/// MIN, PASS, PHP with the modular map from three pigeons to two holes.
fn php_game() -> Result<Instance> {
    let frame = OrderFrame::new(Universe::full(8)?);
    let schedule: Vec<String> = ["MIN", "PASS", "PHP"].map(String::from).to_vec();
    let requirement = Requirement::new("modular", OracleProgram::modular(3, 2), 3, 2)?;
    let mut players: BTreeMap<String, Box<dyn Strategy<OrderFrame>>> = BTreeMap::new();
    players.insert("MIN".into(), Box::new(MinPlayer::new(8)));
    players.insert("PASS".into(), Box::new(PassPlayer));
    players.insert("PHP".into(), Box::new(PhpPlayer::new([requirement], 4)));
    let params = json!({"game": "php", "rounds": 3});
    match run_game(&frame, &schedule, &mut players, 3) {
        Ok(t) => {
            let alt = t.rounds.last().and_then(|r| r.alternative.clone());
            Ok(Instance {
                params,
                passed: t.discharged() == 1 && alt.as_ref().is_some_and(|a| a.kind == AlternativeKind::RowCollision),
                detail: json!({"alternative": alt, "final": t.final_condition}),
            })
        }
        Err(abort) => Ok(Instance {
            params,
            passed: false,
            detail: json!({"error": abort.error.to_string()}),
        }),
    }
}

/// The domination player keeps a two-vertex set from dominating.
fn tournament_game() -> Result<Instance> {
    let frame = TournamentFrame::new(6, 6)?;
    let x: BTreeSet<usize> = [0, 1].into();
    let schedule: Vec<String> = ["TOUR", "TOUR", "DOM"].map(String::from).to_vec();
    let mut players: BTreeMap<String, Box<dyn Strategy<TournamentFrame>>> = BTreeMap::new();
    players.insert("TOUR".into(), Box::new(TourPlayer { queue: VecDeque::from([0, 1]) }));
    players.insert("DOM".into(), Box::new(DominationPlayer { x: x.clone() }));
    let params = json!({"game": "domination", "n": 6, "x": x});
    match run_game(&frame, &schedule, &mut players, 6) {
        Ok(t) => {
            let dominates = dominating_set_check(&t.final_condition, &x)?;
            Ok(Instance {
                params,
                passed: !dominates,
                detail: json!({"dominates": dominates, "final": t.final_condition}),
            })
        }
        Err(abort) => Ok(Instance {
            params,
            passed: false,
            detail: json!({"error": abort.error.to_string()}),
        }),
    }
}

/// The surjection player cannot cover `2n` holes with `n` pigeons.
fn surjection_game() -> Result<Instance> {
    let n = 3;
    let frame = PartialFnFrame::new(n, n)?;
    let mut players: BTreeMap<String, Box<dyn Strategy<PartialFnFrame>>> = BTreeMap::new();
    players.insert("SURJ".into(), Box::new(SurjectionPlayer::new(n)));
    let params = json!({"game": "surjection", "n": n, "rounds": 2 * n});
    match run_game(&frame, &["SURJ".to_string()], &mut players, 2 * n) {
        Ok(t) => {
            let covered = t.final_condition.range().len();
            Ok(Instance {
                params,
                passed: covered == n && covered < frame.holes(),
                detail: json!({"range": covered, "holes": frame.holes(), "final": t.final_condition}),
            })
        }
        Err(abort) => Ok(Instance {
            params,
            passed: false,
            detail: json!({"error": abort.error.to_string()}),
        }),
    }
}

fn game_suite(config: &RunConfig) -> Result<Vec<Instance>> {
    Ok(vec![
        min_game(config)?,
        dlo_game()?,
        php_game()?,
        tournament_game()?,
        surjection_game()?,
    ])
}
