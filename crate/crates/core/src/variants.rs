//! Two further frames built on the same recipe: finite tournaments, and
//! graphs of partial functions from `n` pigeons to `2n` holes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::game::{Move, Strategy};

pub use crate::frame::{frame_bound_check, FrameBoundReport};

/// A tournament on a finite vertex set; `(u, v)` in `edges` means `u → v`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTournament", into = "RawTournament")]
pub struct TournamentCondition {
    vertices: BTreeSet<usize>,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawTournament {
    vertices: Vec<usize>,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawTournament> for TournamentCondition {
    type Error = Error;

    fn try_from(raw: RawTournament) -> Result<Self> {
        TournamentCondition::new(raw.vertices, raw.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<TournamentCondition> for RawTournament {
    fn from(t: TournamentCondition) -> Self {
        RawTournament {
            vertices: t.vertices.into_iter().collect(),
            edges: t.edges.into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TournamentCondition {
    /// Validates that every pair of distinct vertices carries exactly one
    /// directed edge and nothing else is present.
    pub fn new(
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u == v || !vertices.contains(&u) || !vertices.contains(&v) {
                return Err(Error::InvalidInput(format!("edge {u}->{v} is not between two vertices")));
            }
            if edges.contains(&(v, u)) {
                return Err(Error::InvalidInput(format!("both {u}->{v} and {v}->{u} present")));
            }
        }
        let k = vertices.len();
        if edges.len() != k * k.saturating_sub(1) / 2 {
            return Err(Error::InvalidInput("some pair of vertices has no edge".into()));
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn beats(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    /// Add `v` with the given outgoing neighbours; every other existing
    /// vertex beats `v`.
    fn with_vertex(&self, v: usize, beaten: impl Fn(usize) -> bool) -> Self {
        let mut next = self.clone();
        for &w in &self.vertices {
            next.edges.insert(if beaten(w) { (v, w) } else { (w, v) });
        }
        next.vertices.insert(v);
        next
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentFrame {
    pub n: usize,
    pub cap: usize,
}

impl TournamentFrame {
    pub fn new(n: usize, cap: usize) -> Result<Self> {
        if n == 0 || cap == 0 || cap > n {
            return Err(Error::InvalidUniverse(format!("n = {n}, cap = {cap}")));
        }
        Ok(Self { n, cap })
    }
}

impl Frame for TournamentFrame {
    type Cond = TournamentCondition;

    fn name(&self) -> &'static str {
        "tournament"
    }

    fn root(&self) -> TournamentCondition {
        TournamentCondition::default()
    }

    fn size(&self, t: &TournamentCondition) -> usize {
        t.vertices.len()
    }

    fn cap(&self) -> usize {
        self.cap
    }

    fn check(&self, t: &TournamentCondition) -> Result<()> {
        if let Some(&element) = t.vertices.iter().find(|&&v| v >= self.n) {
            return Err(Error::OutOfRange { element, n: self.n });
        }
        if t.vertices.len() > self.cap {
            return Err(Error::LengthCap {
                len: t.vertices.len(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn extends(&self, strong: &TournamentCondition, weak: &TournamentCondition) -> bool {
        weak.vertices.is_subset(&strong.vertices) && weak.edges.is_subset(&strong.edges)
    }

    fn compatible(&self, a: &TournamentCondition, b: &TournamentCondition) -> bool {
        a.edges.iter().all(|&(u, v)| !b.edges.contains(&(v, u)))
    }

    /// Union of both, with pairs seen by neither oriented from the smaller
    /// vertex to the larger.
    fn merge(&self, a: &TournamentCondition, b: &TournamentCondition) -> Option<TournamentCondition> {
        if !self.compatible(a, b) {
            return None;
        }
        let mut edges: BTreeSet<(usize, usize)> = a.edges.union(&b.edges).copied().collect();
        for &u in a.vertices.difference(&b.vertices) {
            for &v in b.vertices.difference(&a.vertices) {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        Some(TournamentCondition {
            vertices: a.vertices.union(&b.vertices).copied().collect(),
            edges,
        })
    }

    fn next_key(&self, t: &TournamentCondition) -> Option<usize> {
        (0..self.n).find(|v| !t.vertices.contains(v))
    }

    fn branch(&self, t: &TournamentCondition, v: usize) -> Result<Vec<TournamentCondition>> {
        tournament_extensions(self, t, v)
    }

    fn uniform_tree_size(&self, base: &TournamentCondition, d: usize) -> BigUint {
        let k = base.vertices.len();
        (0..d).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(2u32).pow((k + i) as u32))
    }

    fn antichain_bound(&self, base: &TournamentCondition, d: usize) -> BigUint {
        // each new vertex orients its edges to all earlier ones
        let k = base.vertices.len() as u64;
        let d = d as u64;
        BigUint::from(2u32).pow(d * k + d * d.saturating_sub(1) / 2)
    }

    fn extensions_up_to(&self, base: &TournamentCondition, max_size: usize) -> Vec<TournamentCondition> {
        let free: Vec<usize> = (0..self.n).filter(|v| !base.vertices.contains(v)).collect();
        let max_new = max_size.min(self.cap).saturating_sub(base.vertices.len());
        let mut out = Vec::new();
        for k in 0..=max_new.min(free.len()) {
            for added in free.iter().copied().combinations(k) {
                let mut layer = vec![base.clone()];
                for v in added {
                    layer = layer
                        .iter()
                        .flat_map(|t| orientations(t, v))
                        .collect();
                }
                out.extend(layer);
            }
        }
        out
    }
}

fn orientations(t: &TournamentCondition, v: usize) -> Vec<TournamentCondition> {
    let others: Vec<usize> = t.vertices.iter().copied().collect();
    (0..1usize << others.len())
        .map(|mask| {
            t.with_vertex(v, |w| {
                let i = others.iter().position(|&x| x == w).expect("existing vertex");
                mask >> i & 1 == 1
            })
        })
        .collect()
}

/// All `2^|V|` ways of adding `v`.
pub fn tournament_extensions(
    frame: &TournamentFrame,
    t: &TournamentCondition,
    v: usize,
) -> Result<Vec<TournamentCondition>> {
    if v >= frame.n {
        return Err(Error::OutOfRange { element: v, n: frame.n });
    }
    if t.vertices.contains(&v) {
        return Err(Error::AlreadyPresent(v));
    }
    if t.vertices.len() + 1 > frame.cap {
        return Err(Error::LengthCap {
            len: t.vertices.len() + 1,
            cap: frame.cap,
        });
    }
    Ok(orientations(t, v))
}

/// Add the smallest fresh vertex outside `x`, beating every member of `x`
/// already present and beaten by every other vertex.
pub fn domination_player_move(
    frame: &TournamentFrame,
    t: &TournamentCondition,
    x: &BTreeSet<usize>,
) -> Result<TournamentCondition> {
    let v = (0..frame.n)
        .find(|v| !x.contains(v) && !t.vertices.contains(v))
        .ok_or(Error::Exhausted("vertices outside the dominated set"))?;
    if t.vertices.len() + 1 > frame.cap {
        return Err(Error::LengthCap {
            len: t.vertices.len() + 1,
            cap: frame.cap,
        });
    }
    Ok(t.with_vertex(v, |w| x.contains(&w)))
}

/// Every vertex outside `x` is beaten by some member of `x`.
pub fn dominating_set_check(t: &TournamentCondition, x: &BTreeSet<usize>) -> Result<bool> {
    if let Some(v) = x.iter().find(|v| !t.vertices.contains(v)) {
        return Err(Error::InvalidInput(format!("{v} is not a vertex")));
    }
    Ok(t.vertices
        .difference(x)
        .all(|&w| x.iter().any(|&v| t.beats(v, w))))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominationPlayer {
    pub x: BTreeSet<usize>,
}

impl Strategy<TournamentFrame> for DominationPlayer {
    fn play(&mut self, frame: &TournamentFrame, t: &TournamentCondition) -> Result<Move<TournamentCondition>> {
        let out = domination_player_move(frame, t, &self.x)?;
        let added = out.vertices.difference(&t.vertices).next().copied();
        Ok(Move::to(out).with_note(format!("vertex {} escapes X", added.unwrap_or_default())))
    }
}

/// Inserts queued vertices so the tournament eventually covers `[0, n)`;
/// new vertices lose to every existing one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TourPlayer {
    pub queue: VecDeque<usize>,
}

impl TourPlayer {
    pub fn new(n: usize) -> Self {
        Self {
            queue: (0..n).collect(),
        }
    }
}

impl Strategy<TournamentFrame> for TourPlayer {
    fn play(&mut self, frame: &TournamentFrame, t: &TournamentCondition) -> Result<Move<TournamentCondition>> {
        self.queue.retain(|v| !t.vertices.contains(v));
        let Some(v) = self.queue.pop_front() else {
            return Ok(Move::to(t.clone()).with_note("all vertices placed"));
        };
        let out = tournament_extensions(frame, t, v)?
            .into_iter()
            .next()
            .expect("at least one orientation");
        Ok(Move::to(out))
    }
}

/// A finite partial function from pigeons `[0, n)` to holes `[0, 2n)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPartialFn", into = "RawPartialFn")]
pub struct PartialFnCondition {
    pairs: BTreeMap<usize, usize>,
}

#[derive(Serialize, Deserialize)]
struct RawPartialFn {
    pairs: Vec<[usize; 2]>,
}

impl TryFrom<RawPartialFn> for PartialFnCondition {
    type Error = Error;

    fn try_from(raw: RawPartialFn) -> Result<Self> {
        PartialFnCondition::new(raw.pairs.into_iter().map(|[x, y]| (x, y)))
    }
}

impl From<PartialFnCondition> for RawPartialFn {
    fn from(f: PartialFnCondition) -> Self {
        RawPartialFn {
            pairs: f.pairs.into_iter().map(|(x, y)| [x, y]).collect(),
        }
    }
}

impl PartialFnCondition {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, y) in pairs {
            if map.insert(x, y).is_some() {
                return Err(Error::InvalidInput(format!("pigeon {x} is mapped twice")));
            }
        }
        Ok(Self { pairs: map })
    }

    pub fn pairs(&self) -> &BTreeMap<usize, usize> {
        &self.pairs
    }

    pub fn range(&self) -> BTreeSet<usize> {
        self.pairs.values().copied().collect()
    }

    fn with_pair(&self, x: usize, y: usize) -> Self {
        let mut next = self.clone();
        next.pairs.insert(x, y);
        next
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFnFrame {
    pub n: usize,
    pub cap: usize,
}

impl PartialFnFrame {
    pub fn new(n: usize, cap: usize) -> Result<Self> {
        if n == 0 || cap == 0 || cap > n {
            return Err(Error::InvalidUniverse(format!("n = {n}, cap = {cap}")));
        }
        Ok(Self { n, cap })
    }

    pub fn holes(&self) -> usize {
        2 * self.n
    }
}

impl Frame for PartialFnFrame {
    type Cond = PartialFnCondition;

    fn name(&self) -> &'static str {
        "partialfn"
    }

    fn root(&self) -> PartialFnCondition {
        PartialFnCondition::default()
    }

    fn size(&self, f: &PartialFnCondition) -> usize {
        f.pairs.len()
    }

    fn cap(&self) -> usize {
        self.cap
    }

    fn check(&self, f: &PartialFnCondition) -> Result<()> {
        for (&x, &y) in &f.pairs {
            if x >= self.n {
                return Err(Error::OutOfRange { element: x, n: self.n });
            }
            if y >= self.holes() {
                return Err(Error::OutOfRange {
                    element: y,
                    n: self.holes(),
                });
            }
        }
        if f.pairs.len() > self.cap {
            return Err(Error::LengthCap {
                len: f.pairs.len(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn extends(&self, strong: &PartialFnCondition, weak: &PartialFnCondition) -> bool {
        weak.pairs.iter().all(|(x, y)| strong.pairs.get(x) == Some(y))
    }

    fn compatible(&self, a: &PartialFnCondition, b: &PartialFnCondition) -> bool {
        a.pairs
            .iter()
            .all(|(x, y)| b.pairs.get(x).is_none_or(|z| z == y))
    }

    fn merge(&self, a: &PartialFnCondition, b: &PartialFnCondition) -> Option<PartialFnCondition> {
        if !self.compatible(a, b) {
            return None;
        }
        let mut pairs = a.pairs.clone();
        pairs.extend(b.pairs.iter().map(|(&x, &y)| (x, y)));
        Some(PartialFnCondition { pairs })
    }

    fn next_key(&self, f: &PartialFnCondition) -> Option<usize> {
        (0..self.n).find(|x| !f.pairs.contains_key(x))
    }

    /// Pigeon-to-hole queries only: one branch per hole.
    fn branch(&self, f: &PartialFnCondition, x: usize) -> Result<Vec<PartialFnCondition>> {
        if x >= self.n {
            return Err(Error::OutOfRange { element: x, n: self.n });
        }
        if f.pairs.contains_key(&x) {
            return Err(Error::AlreadyPresent(x));
        }
        if f.pairs.len() + 1 > self.cap {
            return Err(Error::LengthCap {
                len: f.pairs.len() + 1,
                cap: self.cap,
            });
        }
        Ok((0..self.holes()).map(|y| f.with_pair(x, y)).collect())
    }

    fn uniform_tree_size(&self, _base: &PartialFnCondition, d: usize) -> BigUint {
        BigUint::from(self.holes()).pow(d as u32)
    }

    fn antichain_bound(&self, _base: &PartialFnCondition, d: usize) -> BigUint {
        BigUint::from(self.holes()).pow(d as u32)
    }

    fn extensions_up_to(&self, base: &PartialFnCondition, max_size: usize) -> Vec<PartialFnCondition> {
        let free: Vec<usize> = (0..self.n).filter(|x| !base.pairs.contains_key(x)).collect();
        let max_new = max_size.min(self.cap).saturating_sub(base.pairs.len());
        let mut out = Vec::new();
        for k in 0..=max_new.min(free.len()) {
            for added in free.iter().copied().combinations(k) {
                let mut layer = vec![base.clone()];
                for &x in &added {
                    layer = layer
                        .iter()
                        .flat_map(|f| (0..self.holes()).map(move |y| f.with_pair(x, y)))
                        .collect();
                }
                out.extend(layer);
            }
        }
        out
    }
}

/// Map the smallest unmapped pigeon to the first queued hole not yet in the
/// range.
pub fn surjection_player_move(
    frame: &PartialFnFrame,
    f: &PartialFnCondition,
    queue: &mut VecDeque<usize>,
) -> Result<PartialFnCondition> {
    let range = f.range();
    queue.retain(|y| !range.contains(y));
    let x = frame
        .next_key(f)
        .ok_or(Error::Exhausted("unmapped pigeons"))?;
    if f.pairs.len() + 1 > frame.cap {
        return Err(Error::LengthCap {
            len: f.pairs.len() + 1,
            cap: frame.cap,
        });
    }
    let y = queue.pop_front().ok_or(Error::Exhausted("holes outside the range"))?;
    Ok(f.with_pair(x, y))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectionPlayer {
    pub queue: VecDeque<usize>,
}

impl SurjectionPlayer {
    pub fn new(n: usize) -> Self {
        Self {
            queue: (0..2 * n).collect(),
        }
    }
}

impl Strategy<PartialFnFrame> for SurjectionPlayer {
    fn play(&mut self, frame: &PartialFnFrame, f: &PartialFnCondition) -> Result<Move<PartialFnCondition>> {
        match surjection_player_move(frame, f, &mut self.queue) {
            Ok(out) => Ok(Move::to(out)),
            Err(Error::Exhausted(what)) => {
                Ok(Move::to(f.clone()).with_note(format!("{what} exhausted before the range was covered")))
            }
            Err(e) => Err(e),
        }
    }
}
