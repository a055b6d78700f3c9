//! Named expander constructions and growth traces.
//!
//! An "expander" here is a fixed multivariate rational expression applied to
//! all tuples from one input set; the interesting outputs are the distinct
//! values. Shared-variable constructions (the ratio-of-differences set R[A]
//! and the five-variable quotient) cannot be phrased as a composition of
//! two-set operations, so they get dedicated enumerations.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::finset::{self, merge_parts, pairwise, Budget, FiniteSet, FinsetError, SetOp};
use crate::numeric::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpanderError {
    InputTooSmall { required: usize, got: usize },
    Set(FinsetError),
}

impl fmt::Display for ExpanderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpanderError::InputTooSmall { required, got } => {
                write!(f, "input set needs at least {required} elements, got {got}")
            }
            ExpanderError::Set(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ExpanderError {}

impl From<FinsetError> for ExpanderError {
    fn from(e: FinsetError) -> Self {
        ExpanderError::Set(e)
    }
}

/// The built-in expander catalog. CLI identifiers in parentheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NamedExpander {
    /// (A-A)(A-A)(A-A) (`ddd`)
    Ddd,
    /// (A+A)/(A+A) + A/A (`ratio-sum`)
    RatioSumPlusRatio,
    /// (AA+AA)/(A+A) (`aa-sum-ratio`)
    AaSumRatio,
    /// (AA+A)/(AA+A) (`aaa-ratio`)
    AaaRatio,
    /// {(ab+c)/(ad+e) : a,b,c,d,e in A} (`five-var`)
    FiveVar,
    /// R[A] = {(a-b)/(a-c) : a,b,c in A, a != c} (`r-triple`)
    RTriple,
}

impl NamedExpander {
    pub const ALL: [NamedExpander; 6] = [
        NamedExpander::Ddd,
        NamedExpander::RatioSumPlusRatio,
        NamedExpander::AaSumRatio,
        NamedExpander::AaaRatio,
        NamedExpander::FiveVar,
        NamedExpander::RTriple,
    ];

    pub fn cli_id(self) -> &'static str {
        match self {
            NamedExpander::Ddd => "ddd",
            NamedExpander::RatioSumPlusRatio => "ratio-sum",
            NamedExpander::AaSumRatio => "aa-sum-ratio",
            NamedExpander::AaaRatio => "aaa-ratio",
            NamedExpander::FiveVar => "five-var",
            NamedExpander::RTriple => "r-triple",
        }
    }

    pub fn from_cli_id(id: &str) -> Option<NamedExpander> {
        Self::ALL.into_iter().find(|n| n.cli_id() == id)
    }
}

/// Evaluate a named expander. The budget bounds every intermediate set as
/// well as the result.
pub fn named_expander(
    name: NamedExpander,
    a: &FiniteSet,
    budget: &Budget,
) -> Result<FiniteSet, FinsetError> {
    match name {
        NamedExpander::Ddd => {
            let d = pairwise(SetOp::Sub, a, a, budget)?;
            finset::kfold(SetOp::Mul, &d, 3, budget)
        }
        NamedExpander::RatioSumPlusRatio => {
            let s = pairwise(SetOp::Add, a, a, budget)?;
            let q = pairwise(SetOp::Div, &s, &s, budget)?;
            let r = pairwise(SetOp::Div, a, a, budget)?;
            pairwise(SetOp::Add, &q, &r, budget)
        }
        NamedExpander::AaSumRatio => {
            let p = pairwise(SetOp::Mul, a, a, budget)?;
            let pp = pairwise(SetOp::Add, &p, &p, budget)?;
            let s = pairwise(SetOp::Add, a, a, budget)?;
            pairwise(SetOp::Div, &pp, &s, budget)
        }
        NamedExpander::AaaRatio => {
            let p = pairwise(SetOp::Mul, a, a, budget)?;
            let t = pairwise(SetOp::Add, &p, a, budget)?;
            pairwise(SetOp::Div, &t, &t, budget)
        }
        NamedExpander::FiveVar => five_var(a, budget),
        NamedExpander::RTriple => r_triple(a, budget),
    }
}

/// R[A]: ratios of differences over triples, denominators a != c.
pub fn r_triple(a: &FiniteSet, budget: &Budget) -> Result<FiniteSet, FinsetError> {
    let elems = a.elems();
    let parts: Vec<Vec<Rational>> = elems
        .par_iter()
        .map(|x| {
            let mut part = Vec::with_capacity(elems.len() * elems.len());
            for c in elems {
                if c == x {
                    continue;
                }
                let den = x - c;
                for b in elems {
                    part.push(&(x - b) / &den);
                }
            }
            part.sort_unstable();
            part.dedup();
            if part.len() > budget.max_elements {
                return Err(FinsetError::BudgetExceeded { limit: budget.max_elements });
            }
            Ok(part)
        })
        .collect::<Result<_, _>>()?;
    merge_parts(parts, budget)
}

/// {(ab+c)/(ad+e)}: for each shared a, the ratio set of aA+A with itself.
/// Zero denominators are skipped; the error fires only when the union of
/// all denominator sets has no nonzero element.
pub fn five_var(a: &FiniteSet, budget: &Budget) -> Result<FiniteSet, FinsetError> {
    let mut parts = Vec::with_capacity(a.len());
    let mut any_nonzero_den = false;
    for shared in a.iter() {
        let scaled = if shared.is_zero() {
            FiniteSet::singleton(Rational::ZERO)
        } else {
            finset::affine(a, shared, &Rational::ZERO)?
        };
        let base = pairwise(SetOp::Add, &scaled, a, budget)?;
        if base.iter().any(|v| !v.is_zero()) {
            any_nonzero_den = true;
            parts.push(pairwise(SetOp::Div, &base, &base, budget)?);
        }
    }
    if !any_nonzero_den {
        return Err(FinsetError::EmptyDenominator);
    }
    FiniteSet::union_all(&parts, budget)
}

/// Check the reflection identity R[A] - 1 = -R[A] exactly.
pub fn shkredov_check(a: &FiniteSet, budget: &Budget) -> Result<bool, FinsetError> {
    let r = r_triple(a, budget)?;
    let shifted = finset::affine(&r, &Rational::ONE, &Rational::from(-1i64))?;
    let negated = finset::affine(&r, &Rational::from(-1i64), &Rational::ZERO)?;
    Ok(shifted == negated)
}

/// Maximize |(A-a)(A-b)| over ordered pairs a != b from A.
/// Ties resolve to the lexicographically smallest (a, b).
pub fn best_shift_pair(
    a: &FiniteSet,
    budget: &Budget,
) -> Result<((Rational, Rational), usize), ExpanderError> {
    if a.len() < 2 {
        return Err(ExpanderError::InputTooSmall { required: 2, got: a.len() });
    }
    let mut best: Option<((Rational, Rational), usize)> = None;
    for x in a.iter() {
        let left = finset::affine(a, &Rational::ONE, &-x)?;
        for y in a.iter() {
            if x == y {
                continue;
            }
            let right = finset::affine(a, &Rational::ONE, &-y)?;
            let card = pairwise(SetOp::Mul, &left, &right, budget)?.len();
            // Strict improvement keeps the first (lexicographically
            // smallest) maximizing pair.
            if best.as_ref().is_none_or(|(_, c)| card > *c) {
                best = Some(((x.clone(), y.clone()), card));
            }
        }
    }
    Ok(best.expect("at least one ordered pair"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainKind {
    /// X_0 = (A-A)/(A-A); X_{i+1} = the larger of X_i*R[A], X_i*(R[A]-1).
    GreedyRatio,
    /// Iterated products of the difference set: (A-A)^(k).
    KfoldDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainBranch {
    #[serde(rename = "R")]
    TimesR,
    #[serde(rename = "R-1")]
    TimesRMinusOne,
}

/// One recorded chain step. Branch data is present only for greedy chains;
/// growth exponents only for k-fold chains over sets with |A| >= 2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    pub index: u32,
    pub cardinality: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times_r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times_r_minus_one: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picked: Option<ChainBranch>,
    pub tie: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

impl ChainStep {
    fn plain(index: u32, cardinality: usize) -> ChainStep {
        ChainStep {
            index,
            cardinality,
            times_r: None,
            times_r_minus_one: None,
            picked: None,
            tie: false,
            exponent: None,
        }
    }
}

/// A growth chain with per-step cardinalities. Budget exhaustion truncates
/// the chain and records why instead of failing the whole computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthChain {
    pub kind: ChainKind,
    pub sizes: Vec<ChainStep>,
    pub truncated: Option<String>,
}

/// Greedy ratio-set growth chain starting from X_0 = (A-A)/(A-A).
/// Equal candidate sizes resolve toward X_i * R, with the tie recorded.
pub fn greedy_ratio_chain(
    a: &FiniteSet,
    k_max: u32,
    budget: &Budget,
) -> Result<GrowthChain, ExpanderError> {
    if a.len() < 2 {
        return Err(ExpanderError::InputTooSmall { required: 2, got: a.len() });
    }
    let r = r_triple(a, budget)?;
    let r_minus_one = finset::affine(&r, &Rational::ONE, &Rational::from(-1i64))?;
    let d = pairwise(SetOp::Sub, a, a, budget)?;
    let mut x = pairwise(SetOp::Div, &d, &d, budget)?;
    let mut chain = GrowthChain {
        kind: ChainKind::GreedyRatio,
        sizes: vec![ChainStep::plain(0, x.len())],
        truncated: None,
    };
    for i in 1..=k_max {
        let grown = pairwise(SetOp::Mul, &x, &r, budget).and_then(|with_r| {
            let with_shift = pairwise(SetOp::Mul, &x, &r_minus_one, budget)?;
            Ok((with_r, with_shift))
        });
        let (with_r, with_shift) = match grown {
            Ok(pair) => pair,
            Err(FinsetError::BudgetExceeded { limit }) => {
                chain.truncated =
                    Some(format!("budget of {limit} elements exceeded at step {i}"));
                break;
            }
            Err(other) => return Err(other.into()),
        };
        let tie = with_r.len() == with_shift.len();
        let pick_r = with_r.len() >= with_shift.len();
        chain.sizes.push(ChainStep {
            index: i,
            cardinality: with_r.len().max(with_shift.len()),
            times_r: Some(with_r.len()),
            times_r_minus_one: Some(with_shift.len()),
            picked: Some(if pick_r {
                ChainBranch::TimesR
            } else {
                ChainBranch::TimesRMinusOne
            }),
            tie,
            exponent: None,
        });
        x = if pick_r { with_r } else { with_shift };
    }
    Ok(chain)
}

/// Cardinalities of (A-A)^(k) for k = 1..=k_max, with growth exponents
/// log2 |(A-A)^(k)| / log2 |A|.
pub fn kfold_difference_growth(
    a: &FiniteSet,
    k_max: u32,
    budget: &Budget,
) -> Result<GrowthChain, ExpanderError> {
    if k_max < 1 {
        return Err(ExpanderError::Set(FinsetError::ZeroFold));
    }
    if a.is_empty() {
        return Err(ExpanderError::InputTooSmall { required: 1, got: 0 });
    }
    let log_a = if a.len() >= 2 {
        Some((a.len() as f64).log2())
    } else {
        None
    };
    let d = pairwise(SetOp::Sub, a, a, budget)?;
    let mut chain = GrowthChain {
        kind: ChainKind::KfoldDifference,
        sizes: Vec::new(),
        truncated: None,
    };
    let mut acc = d.clone();
    for k in 1..=k_max {
        if k > 1 {
            acc = match pairwise(SetOp::Mul, &acc, &d, budget) {
                Ok(next) => next,
                Err(FinsetError::BudgetExceeded { limit }) => {
                    chain.truncated =
                        Some(format!("budget of {limit} elements exceeded at fold {k}"));
                    break;
                }
                Err(other) => return Err(other.into()),
            };
        }
        let mut step = ChainStep::plain(k, acc.len());
        step.exponent = log_a.map(|l| (acc.len() as f64).log2() / l);
        chain.sizes.push(step);
    }
    Ok(chain)
}

/// Cardinalities along the difference-product identity chain:
/// D = A-A, DD, DDD, DD/DD, R[A], R[A]*R[A], R[A]*(R[A]-1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffProductTrace {
    #[serde(rename = "A")]
    pub input: usize,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "DD")]
    pub dd: usize,
    #[serde(rename = "DDD")]
    pub ddd: usize,
    #[serde(rename = "DD_over_DD")]
    pub dd_over_dd: usize,
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "R_times_R")]
    pub r_times_r: usize,
    #[serde(rename = "R_times_R_minus_1")]
    pub r_times_r_minus_one: usize,
    /// Whether |R*R| and |R*(R-1)| agree, as the reflection identity forces.
    pub r_products_equal: bool,
}

pub fn diff_product_trace(
    a: &FiniteSet,
    budget: &Budget,
) -> Result<DiffProductTrace, ExpanderError> {
    if a.len() < 2 {
        return Err(ExpanderError::InputTooSmall { required: 2, got: a.len() });
    }
    let d = pairwise(SetOp::Sub, a, a, budget)?;
    let dd = pairwise(SetOp::Mul, &d, &d, budget)?;
    let ddd = pairwise(SetOp::Mul, &dd, &d, budget)?;
    let dd_over_dd = pairwise(SetOp::Div, &dd, &dd, budget)?;
    let r = r_triple(a, budget)?;
    let r_minus_one = finset::affine(&r, &Rational::ONE, &Rational::from(-1i64))?;
    let rr = pairwise(SetOp::Mul, &r, &r, budget)?;
    let r_shift = pairwise(SetOp::Mul, &r, &r_minus_one, budget)?;
    Ok(DiffProductTrace {
        input: a.len(),
        d: d.len(),
        dd: dd.len(),
        ddd: ddd.len(),
        dd_over_dd: dd_over_dd.len(),
        r: r.len(),
        r_times_r: rr.len(),
        r_times_r_minus_one: r_shift.len(),
        r_products_equal: rr.len() == r_shift.len(),
    })
}
