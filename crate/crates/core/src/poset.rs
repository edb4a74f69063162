//! Order conditions over a finite universe.
//!
//! A [`Condition`] is a sequence of distinct elements of `[0, n)`; listing
//! `a` before `b` means `a < b` in the order being built. Conditions are
//! ordered by extension: `strong` extends `weak` when `weak` is a
//! subsequence of `strong`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground interval `[0, n)` together with the maximal condition length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawUniverse")]
pub struct Universe {
    pub n: usize,
    pub length_cap: usize,
}

#[derive(Deserialize)]
struct RawUniverse {
    n: usize,
    length_cap: usize,
}

impl TryFrom<RawUniverse> for Universe {
    type Error = Error;

    fn try_from(raw: RawUniverse) -> Result<Self> {
        Universe::new(raw.n, raw.length_cap)
    }
}

impl Universe {
    pub fn new(n: usize, length_cap: usize) -> Result<Self> {
        if n == 0 || length_cap == 0 {
            return Err(Error::InvalidUniverse(format!(
                "n = {n} and length_cap = {length_cap} must both be positive"
            )));
        }
        if length_cap > n {
            return Err(Error::InvalidUniverse(format!(
                "length_cap {length_cap} exceeds n = {n}"
            )));
        }
        Ok(Self { n, length_cap })
    }

    /// Universe whose cap allows total orders of the whole interval.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn check(&self, c: &Condition) -> Result<()> {
        if let Some(&element) = c.0.iter().find(|&&x| x >= self.n) {
            return Err(Error::OutOfRange { element, n: self.n });
        }
        self.check_len(c.len())
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len > self.length_cap {
            return Err(Error::LengthCap {
                len,
                cap: self.length_cap,
            });
        }
        Ok(())
    }

    pub fn condition(&self, seq: Vec<usize>) -> Result<Condition> {
        let c = Condition::new(seq)?;
        self.check(&c)?;
        Ok(c)
    }

    /// Extension test with both arguments validated against this universe.
    pub fn extends(&self, strong: &Condition, weak: &Condition) -> Result<bool> {
        self.check(strong)?;
        self.check(weak)?;
        Ok(strong.extends(weak))
    }

    /// All ways of inserting the fresh element `a` into `o`, ordered by
    /// insertion position.
    pub fn one_point_extensions(&self, o: &Condition, a: usize) -> Result<Vec<Condition>> {
        if a >= self.n {
            return Err(Error::OutOfRange {
                element: a,
                n: self.n,
            });
        }
        if o.contains(a) {
            return Err(Error::AlreadyPresent(a));
        }
        self.check_len(o.len() + 1)?;
        Ok(o.insertions(a))
    }

    /// Every condition extending `base` whose length lies in
    /// `base.len()..=max_len`, shortest first and lexicographic within a
    /// length.
    pub fn extensions_up_to(&self, base: &Condition, max_len: usize) -> Vec<Condition> {
        let max_len = max_len.min(self.n);
        let mut layer = vec![base.clone()];
        let mut out = layer.clone();
        for _ in base.len()..max_len {
            let mut next = BTreeSet::new();
            for c in &layer {
                for a in (0..self.n).filter(|&a| !c.contains(a)) {
                    next.extend(c.insertions(a));
                }
            }
            layer = next.into_iter().collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    /// Conditions extending `base` of length exactly `len`, lexicographic.
    pub fn extensions_of_len(&self, base: &Condition, len: usize) -> Vec<Condition> {
        self.extensions_up_to(base, len)
            .into_iter()
            .filter(|c| c.len() == len)
            .collect()
    }

    /// Smallest elements of the universe missing from `c`.
    pub fn fresh_elements(&self, c: &Condition, count: usize) -> Result<Vec<usize>> {
        let fresh: Vec<usize> = (0..self.n).filter(|&x| !c.contains(x)).take(count).collect();
        if fresh.len() < count {
            return Err(Error::Exhausted("fresh universe elements"));
        }
        Ok(fresh)
    }
}

/// A finite strict linear order on a subset of the universe, listed from
/// least to greatest.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Condition(Vec<usize>);

impl TryFrom<Vec<usize>> for Condition {
    type Error = Error;

    fn try_from(seq: Vec<usize>) -> Result<Self> {
        Condition::new(seq)
    }
}

impl From<Condition> for Vec<usize> {
    fn from(c: Condition) -> Self {
        c.0
    }
}

impl fmt::Debug for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Outcome of a compatibility test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compatibility {
    /// A common extension of both inputs.
    Merged(Condition),
    /// `(x, y)` with `x` before `y` in the first input and after it in the
    /// second.
    Conflict(usize, usize),
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Merged(_))
    }

    pub fn merged(self) -> Option<Condition> {
        match self {
            Compatibility::Merged(c) => Some(c),
            Compatibility::Conflict(..) => None,
        }
    }
}

impl Condition {
    pub fn new(seq: Vec<usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &x in &seq {
            if !seen.insert(x) {
                return Err(Error::DuplicateElement(x));
            }
        }
        Ok(Self(seq))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.contains(&x)
    }

    pub fn position(&self, x: usize) -> Option<usize> {
        self.0.iter().position(|&y| y == x)
    }

    /// The domain `el(o)`.
    pub fn elements(&self) -> BTreeSet<usize> {
        self.0.iter().copied().collect()
    }

    /// Least element of the order, if any.
    pub fn minimum(&self) -> Option<usize> {
        self.0.first().copied()
    }

    /// Whether the condition itself decides `u < v`.
    pub fn decides(&self, u: usize, v: usize) -> Option<bool> {
        if u == v {
            return Some(false);
        }
        match (self.position(u), self.position(v)) {
            (Some(i), Some(j)) => Some(i < j),
            _ => None,
        }
    }

    /// `self` extends `weak` (written `self ⪯ weak`): the order induced by
    /// `weak` is contained in the one induced by `self`.
    pub fn extends(&self, weak: &Condition) -> bool {
        let mut it = self.0.iter();
        weak.0.iter().all(|x| it.any(|y| y == x))
    }

    /// Compatibility test. Two conditions have a common extension exactly
    /// when they list their shared elements in the same relative order; the
    /// merged witness places each run of the second condition's new elements
    /// directly after the preceding shared element.
    pub fn compatible(&self, other: &Condition) -> Compatibility {
        let shared_here: Vec<usize> = self.0.iter().copied().filter(|&x| other.contains(x)).collect();
        let shared_there: Vec<usize> = other.0.iter().copied().filter(|&x| self.contains(x)).collect();

        if shared_here != shared_there {
            for (i, &x) in shared_here.iter().enumerate() {
                for &y in &shared_here[i + 1..] {
                    if other.position(x) > other.position(y) {
                        return Compatibility::Conflict(x, y);
                    }
                }
            }
            unreachable!("distinct orderings of the same set contain an inverted pair");
        }

        let mut merged = Vec::with_capacity(self.len() + other.len() - shared_here.len());
        let mut here = self.0.iter().copied().peekable();
        let mut there = other.0.iter().copied().peekable();
        for pivot in shared_here.iter().copied().map(Some).chain(std::iter::once(None)) {
            while let Some(x) = there.next_if(|&x| Some(x) != pivot) {
                merged.push(x);
            }
            while let Some(x) = here.next_if(|&x| Some(x) != pivot) {
                merged.push(x);
            }
            if let Some(p) = pivot {
                merged.push(p);
                here.next();
                there.next();
            }
        }
        Compatibility::Merged(Condition(merged))
    }

    pub fn is_compatible(&self, other: &Condition) -> bool {
        self.compatible(other).is_compatible()
    }

    /// Subsequence of elements lying in `keep`, in their original order.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Condition {
        Condition(self.0.iter().copied().filter(|x| keep.contains(x)).collect())
    }

    /// Insert `a` at every position; the caller guarantees freshness.
    pub(crate) fn insertions(&self, a: usize) -> Vec<Condition> {
        (0..=self.len())
            .map(|i| {
                let mut seq = Vec::with_capacity(self.len() + 1);
                seq.extend_from_slice(&self.0[..i]);
                seq.push(a);
                seq.extend_from_slice(&self.0[i..]);
                Condition(seq)
            })
            .collect()
    }

    /// New condition with `a` prepended as the least element.
    pub(crate) fn with_minimum(&self, a: usize) -> Condition {
        let mut seq = Vec::with_capacity(self.len() + 1);
        seq.push(a);
        seq.extend_from_slice(&self.0);
        Condition(seq)
    }

    /// `(length, lexicographic)` sort key.
    pub fn shortlex(&self) -> (usize, &[usize]) {
        (self.len(), &self.0)
    }
}

/// Build a condition from a literal sequence. Panics on duplicates; meant
/// for tests and fixed tables.
#[macro_export]
macro_rules! cond {
    ($($x:expr),* $(,)?) => {
        $crate::poset::Condition::new(vec![$($x),*]).expect("distinct elements")
    };
}
