//! Finite sets of exact rationals and Minkowski-style bulk operations.
//!
//! A `FiniteSet` is an immutable, strictly ascending, deduplicated sequence
//! behind an `Arc`, so clones are cheap and iteration order is canonical.
//! Pairwise operations split the left operand into fixed-size chunks
//! (a function of input sizes only, never of worker count), compute each
//! chunk's sorted distinct results in parallel, and combine them with an
//! ordered merge, so results are identical no matter how many threads run.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::numeric::{NumericError, Rational};

/// Target number of raw products per parallel chunk.
const CHUNK_PAIRS: usize = 1 << 16;

/// Cap on the number of distinct elements an operation may produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_elements: usize,
}

impl Budget {
    pub const DEFAULT_MAX_ELEMENTS: usize = 10_000_000;

    pub fn new(max_elements: usize) -> Budget {
        Budget { max_elements }
    }
}

impl Default for Budget {
    fn default() -> Budget {
        Budget::new(Self::DEFAULT_MAX_ELEMENTS)
    }
}

/// Element-wise operation applied across two sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl SetOp {
    pub fn symbol(self) -> char {
        match self {
            SetOp::Add => '+',
            SetOp::Sub => '-',
            SetOp::Mul => '*',
            SetOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinsetError {
    /// Division where the right-hand set has no nonzero element.
    EmptyDenominator,
    /// The operation would produce more distinct elements than allowed.
    BudgetExceeded { limit: usize },
    /// Affine images require a nonzero scale to stay injective.
    ZeroScale,
    /// k-fold operations need at least one fold.
    ZeroFold,
}

impl fmt::Display for FinsetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinsetError::EmptyDenominator => {
                write!(f, "division by a set with no nonzero element")
            }
            FinsetError::BudgetExceeded { limit } => {
                write!(f, "result would exceed the element budget of {limit}")
            }
            FinsetError::ZeroScale => write!(f, "affine scale must be nonzero"),
            FinsetError::ZeroFold => write!(f, "fold count must be at least 1"),
        }
    }
}

impl std::error::Error for FinsetError {}

/// Malformed line in the one-scalar-per-line set file format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFileError {
    pub line: usize,
    pub source: NumericError,
}

impl fmt::Display for SetFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.source)
    }
}

impl std::error::Error for SetFileError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Immutable finite set of rationals in strictly ascending order.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteSet {
    elems: Arc<[Rational]>,
}

impl FiniteSet {
    pub fn empty() -> FiniteSet {
        FiniteSet { elems: Arc::from(Vec::new()) }
    }

    pub fn singleton(value: Rational) -> FiniteSet {
        FiniteSet { elems: Arc::from(vec![value]) }
    }

    /// Build from arbitrary values; duplicates collapse.
    pub fn from_values<I: IntoIterator<Item = Rational>>(values: I) -> FiniteSet {
        let mut v: Vec<Rational> = values.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSet { elems: Arc::from(v) }
    }

    /// Wrap a vector already in strictly ascending order.
    fn from_sorted(v: Vec<Rational>) -> FiniteSet {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        FiniteSet { elems: Arc::from(v) }
    }

    /// Parse the set file format: one scalar per line, surrounding
    /// whitespace ignored, blank lines and `#` comment lines skipped.
    pub fn parse_text(text: &str) -> Result<FiniteSet, SetFileError> {
        let mut values = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value = Rational::parse_scalar(line)
                .map_err(|source| SetFileError { line: idx + 1, source })?;
            values.push(value);
        }
        Ok(FiniteSet::from_values(values))
    }

    /// Render in the set file format (one scalar per line).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in self.iter() {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[Rational] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.elems.iter()
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.elems.binary_search(value).is_ok()
    }

    pub fn min(&self) -> Option<&Rational> {
        self.elems.first()
    }

    pub fn max(&self) -> Option<&Rational> {
        self.elems.last()
    }

    /// True when every element is strictly positive.
    pub fn all_positive(&self) -> bool {
        self.min().map_or(true, |m| m.is_positive())
    }

    /// Deterministic union of many sets under a budget.
    pub fn union_all(sets: &[FiniteSet], budget: &Budget) -> Result<FiniteSet, FinsetError> {
        let parts: Vec<Vec<Rational>> = sets.iter().map(|s| s.elems.to_vec()).collect();
        merge_parts(parts, budget)
    }

    /// Short deterministic description for report rows.
    pub fn digest(&self, name: &str) -> String {
        if self.len() <= 8 {
            format!("{name}={self}")
        } else {
            format!(
                "{name}: |{name}|={} range [{}, {}]",
                self.len(),
                self.min().expect("nonempty"),
                self.max().expect("nonempty")
            )
        }
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for FiniteSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Environment binding names to sets, in deterministic name order.
pub type SetEnv = BTreeMap<String, FiniteSet>;

fn apply(op: SetOp, a: &Rational, b: &Rational) -> Rational {
    match op {
        SetOp::Add => a + b,
        SetOp::Sub => a - b,
        SetOp::Mul => a * b,
        SetOp::Div => a.checked_div(b).expect("zero denominators are filtered"),
    }
}

/// All pairwise combinations `s (op) t` as a set.
///
/// Division skips pairs with a zero denominator and errors only when the
/// right-hand set contains no nonzero element at all.
pub fn pairwise(
    op: SetOp,
    s: &FiniteSet,
    t: &FiniteSet,
    budget: &Budget,
) -> Result<FiniteSet, FinsetError> {
    let rhs: Vec<Rational> = match op {
        SetOp::Div => {
            let nz: Vec<Rational> = t.iter().filter(|v| !v.is_zero()).cloned().collect();
            if nz.is_empty() {
                return Err(FinsetError::EmptyDenominator);
            }
            nz
        }
        _ => t.elems.to_vec(),
    };
    if s.is_empty() || rhs.is_empty() {
        return Ok(FiniteSet::empty());
    }
    let per = (CHUNK_PAIRS / rhs.len()).max(1);
    let parts: Vec<Vec<Rational>> = s
        .elems
        .par_chunks(per)
        .map(|chunk| {
            let mut out = Vec::with_capacity(chunk.len() * rhs.len());
            for a in chunk {
                for b in &rhs {
                    out.push(apply(op, a, b));
                }
            }
            out.sort_unstable();
            out.dedup();
            if out.len() > budget.max_elements {
                // A chunk's distinct values are a subset of the result's.
                return Err(FinsetError::BudgetExceeded { limit: budget.max_elements });
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    merge_parts(parts, budget)
}

/// Iterated pairwise operation: `kfold(op, S, k)` is S folded with itself k
/// times total, deduplicating between rounds.
pub fn kfold(
    op: SetOp,
    s: &FiniteSet,
    k: u32,
    budget: &Budget,
) -> Result<FiniteSet, FinsetError> {
    if k == 0 {
        return Err(FinsetError::ZeroFold);
    }
    if s.len() > budget.max_elements {
        return Err(FinsetError::BudgetExceeded { limit: budget.max_elements });
    }
    let mut acc = s.clone();
    for _ in 1..k {
        acc = pairwise(op, &acc, s, budget)?;
    }
    Ok(acc)
}

/// Image under x -> scale*x + shift. Injective, so cardinality is preserved.
pub fn affine(
    s: &FiniteSet,
    scale: &Rational,
    shift: &Rational,
) -> Result<FiniteSet, FinsetError> {
    if scale.is_zero() {
        return Err(FinsetError::ZeroScale);
    }
    let mut out: Vec<Rational> = s.iter().map(|x| &(scale * x) + shift).collect();
    if scale.is_negative() {
        out.reverse();
    }
    Ok(FiniteSet::from_sorted(out))
}

/// Merge sorted deduplicated runs pairwise until one remains, checking the
/// budget on the way. Merge order depends only on the run list, so the
/// result is deterministic for fixed inputs.
pub(crate) fn merge_parts(
    mut parts: Vec<Vec<Rational>>,
    budget: &Budget,
) -> Result<FiniteSet, FinsetError> {
    parts.retain(|p| !p.is_empty());
    if parts.is_empty() {
        return Ok(FiniteSet::empty());
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge_two(a, b, budget)?),
                None => next.push(a),
            }
        }
        parts = next;
    }
    let out = parts.pop().expect("one run remains");
    if out.len() > budget.max_elements {
        return Err(FinsetError::BudgetExceeded { limit: budget.max_elements });
    }
    Ok(FiniteSet::from_sorted(out))
}

fn merge_two(
    a: Vec<Rational>,
    b: Vec<Rational>,
    budget: &Budget,
) -> Result<Vec<Rational>, FinsetError> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let take_a = match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => {
                    ib.next();
                    true
                }
            },
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let v = if take_a { ia.next() } else { ib.next() }.expect("peeked");
        out.push(v);
        // Distinct values here are a subset of the final result's values,
        // so overshooting the budget now proves the result overshoots too.
        if out.len() > budget.max_elements {
            return Err(FinsetError::BudgetExceeded { limit: budget.max_elements });
        }
    }
    Ok(out)
}
