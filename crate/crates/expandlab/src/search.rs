//! Structured input families and extremal-set search over DSL objectives.
//!
//! A search binds every free name of the objective expression to the same
//! candidate set and minimizes the resulting cardinality.  The exhaustive
//! walk visits subsets of a small universe in lexicographic order; the local
//! walk does strict-descent single-element replacement with seeded restarts,
//! so both report deterministic witnesses.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{eval, EvalError, SetExpr};
use crate::finset::{Budget, FiniteSet, FinsetError, SetEnv};
use crate::numeric::Rational;

/// Largest universe the exhaustive walk accepts.
pub const MAX_UNIVERSE: usize = 24;

#[derive(Debug)]
pub enum SearchError {
    /// The family parameters cannot produce the requested distinct elements.
    DegenerateFamily { what: String },
    TooLarge { limit: usize, got: usize },
    BadParameters { what: String },
    Eval(EvalError),
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::DegenerateFamily { what } => write!(f, "degenerate family: {what}"),
            SearchError::TooLarge { limit, got } => {
                write!(f, "input too large: limit {limit}, got {got}")
            }
            SearchError::BadParameters { what } => write!(f, "bad parameters: {what}"),
            SearchError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SearchError {}

impl From<EvalError> for SearchError {
    fn from(e: EvalError) -> SearchError {
        SearchError::Eval(e)
    }
}

/// Recipe for a structured test set.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    /// start, start + step, ..., start + (n - 1) * step.
    Ap { start: Rational, step: Rational, n: usize },
    /// start, start * ratio, ..., start * ratio^(n - 1).
    Gp { start: Rational, ratio: Rational, n: usize },
    /// n distinct integers drawn uniformly from [lo, hi].
    RandomInt { n: usize, lo: i64, hi: i64, seed: u64 },
    /// n distinct rationals with numerators from [lo, hi] and denominators
    /// from 1 to 10.
    RandomRat { n: usize, lo: i64, hi: i64, seed: u64 },
}

pub fn generate(spec: &FamilySpec) -> Result<FiniteSet, SearchError> {
    let degenerate = |what: String| SearchError::DegenerateFamily { what };
    match spec {
        FamilySpec::Ap { start, step, n } => {
            if *n == 0 {
                return Err(degenerate("family size must be at least 1".to_owned()));
            }
            if step.is_zero() {
                return Err(degenerate("progression step is zero".to_owned()));
            }
            let mut values = Vec::with_capacity(*n);
            let mut value = start.clone();
            for _ in 0..*n {
                values.push(value.clone());
                value = &value + step;
            }
            Ok(FiniteSet::from_values(values))
        }
        FamilySpec::Gp { start, ratio, n } => {
            if *n == 0 {
                return Err(degenerate("family size must be at least 1".to_owned()));
            }
            if start.is_zero() {
                return Err(degenerate("geometric start is zero".to_owned()));
            }
            if ratio.is_zero() || ratio.abs().is_one() {
                return Err(degenerate(format!("geometric ratio {ratio} repeats elements")));
            }
            let mut values = Vec::with_capacity(*n);
            let mut value = start.clone();
            for _ in 0..*n {
                values.push(value.clone());
                value = &value * ratio;
            }
            Ok(FiniteSet::from_values(values))
        }
        FamilySpec::RandomInt { n, lo, hi, seed } => {
            if *n == 0 {
                return Err(degenerate("family size must be at least 1".to_owned()));
            }
            let span = (*hi as i128) - (*lo as i128) + 1;
            if span < *n as i128 {
                return Err(degenerate(format!("range [{lo}, {hi}] holds fewer than {n} integers")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut values = BTreeSet::new();
            while values.len() < *n {
                values.insert(rng.gen_range(*lo..=*hi));
            }
            Ok(FiniteSet::from_values(values.into_iter().map(Rational::from)))
        }
        FamilySpec::RandomRat { n, lo, hi, seed } => {
            if *n == 0 {
                return Err(degenerate("family size must be at least 1".to_owned()));
            }
            let span = (*hi as i128) - (*lo as i128) + 1;
            if span < 1 {
                return Err(degenerate(format!("range [{lo}, {hi}] is empty")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut values: BTreeSet<Rational> = BTreeSet::new();
            // The value pool may still be thinner than it looks (7/1 = 14/2),
            // so give up deterministically instead of spinning.
            let mut attempts = 0u64;
            let cap = 1000 * (*n as u64) + 1000;
            while values.len() < *n {
                attempts += 1;
                if attempts > cap {
                    return Err(degenerate(format!(
                        "could not draw {n} distinct rationals from [{lo}, {hi}] with denominators up to 10"
                    )));
                }
                let num = rng.gen_range(*lo..=*hi);
                let den = rng.gen_range(1i64..=10);
                values.insert(Rational::new(num, den).expect("denominator is nonzero"));
            }
            Ok(FiniteSet::from_values(values))
        }
    }
}

fn serialize_elems<S: serde::Serializer>(set: &FiniteSet, ser: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(set.elems(), ser)
}

/// Outcome of a search: the minimizing set, its objective cardinality, and
/// how much work finding it took.
#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    #[serde(serialize_with = "serialize_elems")]
    pub best_set: FiniteSet,
    pub objective: u64,
    pub evaluations: u64,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn eval_candidate(
    expr: &SetExpr,
    names: &[String],
    candidate: &FiniteSet,
    budget: &Budget,
) -> Result<u64, EvalError> {
    let mut env = SetEnv::new();
    for name in names {
        env.insert(name.clone(), candidate.clone());
    }
    Ok(eval(expr, &env, budget)?.len() as u64)
}

/// Minimize |expr| over all size-m subsets of the universe, visited in
/// lexicographic order so ties return the first witness.  Every free name
/// of the expression is bound to the candidate subset.
pub fn exhaustive_min(
    expr: &SetExpr,
    m: usize,
    universe: &FiniteSet,
    budget: &Budget,
) -> Result<SearchResult, SearchError> {
    if m == 0 {
        return Err(SearchError::BadParameters { what: "subset size must be at least 1".to_owned() });
    }
    let u = universe.len();
    if u > MAX_UNIVERSE {
        return Err(SearchError::TooLarge { limit: MAX_UNIVERSE, got: u });
    }
    if m > u {
        return Err(SearchError::BadParameters {
            what: format!("subset size {m} exceeds universe size {u}"),
        });
    }
    let names: Vec<String> = expr.free_names().into_iter().collect();
    let mut idx: Vec<usize> = (0..m).collect();
    let mut best: Option<(u64, FiniteSet)> = None;
    let mut evaluations = 0u64;
    loop {
        let candidate =
            FiniteSet::from_values(idx.iter().map(|&i| universe.elems()[i].clone()));
        let value = eval_candidate(expr, &names, &candidate, budget)?;
        evaluations += 1;
        if best.as_ref().is_none_or(|(obj, _)| value < *obj) {
            best = Some((value, candidate));
        }
        // Advance the index combination; stop after the last one.
        let mut advanced = false;
        let mut pos = m;
        while pos > 0 {
            pos -= 1;
            if idx[pos] < pos + u - m {
                idx[pos] += 1;
                for later in pos + 1..m {
                    idx[later] = idx[later - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    let (objective, best_set) = best.expect("at least one subset was evaluated");
    Ok(SearchResult {
        best_set,
        objective,
        evaluations,
        method: "exhaustive".to_owned(),
        seed: None,
    })
}

/// Minimize |expr| over size-m integer sets from [lo, hi] by strict-descent
/// single-element replacement, restarted from fresh seeded draws.  Candidates
/// whose evaluation fails on data (an empty denominator, say) are treated as
/// infinitely bad; budget overruns abort the whole search.
#[allow(clippy::too_many_arguments)]
pub fn local_search_min(
    expr: &SetExpr,
    m: usize,
    lo: i64,
    hi: i64,
    iters: u64,
    restarts: u64,
    seed: u64,
    budget: &Budget,
) -> Result<SearchResult, SearchError> {
    if m == 0 {
        return Err(SearchError::BadParameters { what: "subset size must be at least 1".to_owned() });
    }
    if restarts == 0 {
        return Err(SearchError::BadParameters { what: "need at least one restart".to_owned() });
    }
    let span = (hi as i128) - (lo as i128) + 1;
    if span < m as i128 {
        return Err(SearchError::BadParameters {
            what: format!("range [{lo}, {hi}] holds fewer than {m} integers"),
        });
    }
    let names: Vec<String> = expr.free_names().into_iter().collect();
    let mut evaluations = 0u64;
    let mut last_err = None;
    let mut best: Option<(u64, FiniteSet)> = None;
    let mut measure = |vals: &BTreeSet<i64>,
                       evaluations: &mut u64|
     -> Result<Option<(u64, FiniteSet)>, SearchError> {
        let candidate = FiniteSet::from_values(vals.iter().map(|&v| Rational::from(v)));
        *evaluations += 1;
        match eval_candidate(expr, &names, &candidate, budget) {
            Ok(v) => Ok(Some((v, candidate))),
            Err(EvalError::Set(FinsetError::BudgetExceeded { limit })) => {
                Err(SearchError::Eval(EvalError::Set(FinsetError::BudgetExceeded { limit })))
            }
            Err(e) => {
                last_err = Some(e);
                Ok(None)
            }
        }
    };
    for restart in 0..restarts {
        // Independent deterministic streams, one per restart.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart);
        let mut current: BTreeSet<i64> = BTreeSet::new();
        while current.len() < m {
            current.insert(rng.gen_range(lo..=hi));
        }
        let mut cur = measure(&current, &mut evaluations)?;
        for _ in 0..iters {
            let items: Vec<i64> = current.iter().copied().collect();
            let victim = items[rng.gen_range(0..m)];
            let replacement = loop {
                let v = rng.gen_range(lo..=hi);
                if !current.contains(&v) {
                    break v;
                }
            };
            let mut next = current.clone();
            next.remove(&victim);
            next.insert(replacement);
            let measured = measure(&next, &mut evaluations)?;
            let improves = match (&measured, &cur) {
                (Some((new, _)), Some((old, _))) => new < old,
                (Some(_), None) => true,
                _ => false,
            };
            if improves {
                current = next;
                cur = measured;
            }
        }
        if let Some((value, set)) = cur {
            if best.as_ref().is_none_or(|(obj, _)| value < *obj) {
                best = Some((value, set));
            }
        }
    }
    match best {
        Some((objective, best_set)) => Ok(SearchResult {
            best_set,
            objective,
            evaluations,
            method: "local".to_owned(),
            seed: Some(seed),
        }),
        None => Err(SearchError::Eval(last_err.expect("every failed restart recorded an error"))),
    }
}
