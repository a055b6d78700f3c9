//! Inequality checkers over finite sets.
//!
//! Two flavors: exact inequalities (constant 1, no asymptotics) get a
//! PASS/FAIL verdict computed in exact arithmetic; growth statements whose
//! constants are unspecified get RATIO_ONLY reports carrying the measured
//! lhs/rhs ratio with the constant taken as 1 and logs base 2.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::expanders::{self, ExpanderError, NamedExpander};
use crate::finset::{self, Budget, FiniteSet, FinsetError, SetEnv, SetOp};
use crate::numeric::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// The inequality has an unspecified constant; only the ratio is
    /// meaningful.
    #[serde(rename = "RATIO_ONLY")]
    RatioOnly,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::RatioOnly => "RATIO_ONLY",
        })
    }
}

/// Right-hand side of a checked inequality: exact when the bound has
/// constant 1 and integer structure, real when it involves fractional
/// powers or logarithms.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RhsValue {
    Exact(Rational),
    Real(f64),
}

impl RhsValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            RhsValue::Exact(v) => v.to_f64(),
            RhsValue::Real(v) => *v,
        }
    }
}

impl fmt::Display for RhsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsValue::Exact(v) => write!(f, "{v}"),
            RhsValue::Real(v) => write!(f, "{v}"),
        }
    }
}

/// One checked inequality. Field names match the report columns
/// (bound_id, lhs, rhs, ratio, verdict, input) in every output format.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub lhs: u64,
    pub rhs: RhsValue,
    pub ratio: f64,
    pub verdict: Verdict,
    pub input: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsError {
    MissingInput { name: &'static str },
    TooSmall { required: usize, got: usize },
    TooLarge { limit: usize, got: usize },
    PositivityViolation { what: &'static str },
    ZeroShift,
    ZeroInMultiplicativeMode,
    BadParameters { what: &'static str },
    Set(FinsetError),
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::MissingInput { name } => {
                write!(f, "required input set {name:?} is missing")
            }
            BoundsError::TooSmall { required, got } => {
                write!(f, "input set needs at least {required} elements, got {got}")
            }
            BoundsError::TooLarge { limit, got } => {
                write!(f, "input set exceeds the exhaustive limit of {limit} elements (got {got})")
            }
            BoundsError::PositivityViolation { what } => {
                write!(f, "{what} requires strictly positive elements")
            }
            BoundsError::ZeroShift => write!(f, "shift parameter must be nonzero"),
            BoundsError::ZeroInMultiplicativeMode => {
                write!(f, "multiplicative mode forbids 0 in the input sets")
            }
            BoundsError::BadParameters { what } => write!(f, "invalid parameters: {what}"),
            BoundsError::Set(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BoundsError {}

impl From<FinsetError> for BoundsError {
    fn from(e: FinsetError) -> Self {
        BoundsError::Set(e)
    }
}

impl From<ExpanderError> for BoundsError {
    fn from(e: ExpanderError) -> Self {
        match e {
            ExpanderError::InputTooSmall { required, got } => {
                BoundsError::TooSmall { required, got }
            }
            ExpanderError::Set(s) => BoundsError::Set(s),
        }
    }
}

/// Inequalities that hold with constant exactly 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactBound {
    /// |(A-A)/(A-A)| >= |A|^2 - 2.
    Ungar,
    /// |(A+A)/(A+A)| >= 2|A|^2 - 1 for strictly positive A.
    RatioSum,
    /// |A-B||C| <= |A-C||B-C|.
    RuzsaTriangle,
    /// |kA - lA| <= |A+A|^(k+l) / |A|^(k+l-1), with 0A = {0}.
    Plunnecke { k: u32, l: u32 },
}

impl ExactBound {
    /// Default suite in report order.
    pub fn default_suite() -> Vec<ExactBound> {
        vec![
            ExactBound::Ungar,
            ExactBound::RatioSum,
            ExactBound::RuzsaTriangle,
            ExactBound::Plunnecke { k: 2, l: 1 },
        ]
    }

    pub fn cli_id(self) -> &'static str {
        match self {
            ExactBound::Ungar => "UNGAR",
            ExactBound::RatioSum => "RATIO_SUM",
            ExactBound::RuzsaTriangle => "RUZSA_TRIANGLE",
            ExactBound::Plunnecke { .. } => "PLUNNECKE",
        }
    }
}

fn require<'e>(sets: &'e SetEnv, name: &'static str) -> Result<&'e FiniteSet, BoundsError> {
    let set = sets.get(name).ok_or(BoundsError::MissingInput { name })?;
    if set.is_empty() {
        return Err(BoundsError::TooSmall { required: 1, got: 0 });
    }
    Ok(set)
}

/// Look up `name`, falling back to the set bound as `fallback` so suites
/// can run off a single named set A.
fn pick<'e>(
    sets: &'e SetEnv,
    name: &'static str,
    fallback: &'e FiniteSet,
) -> Result<&'e FiniteSet, BoundsError> {
    match sets.get(name) {
        Some(set) if set.is_empty() => Err(BoundsError::TooSmall { required: 1, got: 0 }),
        Some(set) => Ok(set),
        None => Ok(fallback),
    }
}

fn finish_exact(
    bound_id: &str,
    lhs: u64,
    rhs: Rational,
    holds: bool,
    input: String,
) -> BoundReport {
    let ratio = lhs as f64 / rhs.to_f64();
    BoundReport {
        bound_id: bound_id.to_owned(),
        lhs,
        rhs: RhsValue::Exact(rhs),
        ratio,
        verdict: if holds { Verdict::Pass } else { Verdict::Fail },
        input,
    }
}

/// Check an exact inequality. A FAIL verdict on any input is a bug
/// detector: every bound here is a theorem.
pub fn check_exact(
    bound: ExactBound,
    sets: &SetEnv,
    budget: &Budget,
) -> Result<BoundReport, BoundsError> {
    match bound {
        ExactBound::Ungar => {
            let a = require(sets, "A")?;
            if a.len() < 2 {
                return Err(BoundsError::TooSmall { required: 2, got: a.len() });
            }
            let d = finset::pairwise(SetOp::Sub, a, a, budget)?;
            let lhs = finset::pairwise(SetOp::Div, &d, &d, budget)?.len() as u64;
            let rhs = Rational::from((a.len() * a.len()) as i64 - 2);
            let holds = Rational::from(lhs as i64) >= rhs;
            Ok(finish_exact("UNGAR", lhs, rhs, holds, a.digest("A")))
        }
        ExactBound::RatioSum => {
            let a = require(sets, "A")?;
            if !a.all_positive() {
                return Err(BoundsError::PositivityViolation { what: "RATIO_SUM" });
            }
            let sums = finset::pairwise(SetOp::Add, a, a, budget)?;
            let lhs = finset::pairwise(SetOp::Div, &sums, &sums, budget)?.len() as u64;
            let rhs = Rational::from(2 * (a.len() * a.len()) as i64 - 1);
            let holds = Rational::from(lhs as i64) >= rhs;
            Ok(finish_exact("RATIO_SUM", lhs, rhs, holds, a.digest("A")))
        }
        ExactBound::RuzsaTriangle => {
            let a = require(sets, "A")?;
            let b = pick(sets, "B", a)?;
            let c = pick(sets, "C", a)?;
            let ab = finset::pairwise(SetOp::Sub, a, b, budget)?.len();
            let ac = finset::pairwise(SetOp::Sub, a, c, budget)?.len();
            let bc = finset::pairwise(SetOp::Sub, b, c, budget)?.len();
            let lhs = (ab * c.len()) as u64;
            let rhs = Rational::from((ac * bc) as i64);
            let holds = Rational::from(lhs as i64) <= rhs;
            let input = format!("{}; {}; {}", a.digest("A"), b.digest("B"), c.digest("C"));
            Ok(finish_exact("RUZSA_TRIANGLE", lhs, rhs, holds, input))
        }
        ExactBound::Plunnecke { k, l } => {
            let a = require(sets, "A")?;
            if k + l == 0 {
                return Err(BoundsError::BadParameters { what: "k + l must be at least 1" });
            }
            let fold = |m: u32| -> Result<FiniteSet, BoundsError> {
                if m == 0 {
                    Ok(FiniteSet::singleton(Rational::ZERO))
                } else {
                    Ok(finset::kfold(SetOp::Add, a, m, budget)?)
                }
            };
            let ka = fold(k)?;
            let la = fold(l)?;
            let lhs = finset::pairwise(SetOp::Sub, &ka, &la, budget)?.len() as u64;
            let sum = finset::pairwise(SetOp::Add, a, a, budget)?.len();
            let rhs = Rational::from(sum as i64)
                .pow(k + l)
                .checked_div(&Rational::from(a.len() as i64).pow(k + l - 1))
                .expect("nonempty set has positive cardinality");
            let holds = Rational::from(lhs as i64) <= rhs;
            let input = format!("{}; k={k} l={l}", a.digest("A"));
            Ok(finish_exact("PLUNNECKE", lhs, rhs, holds, input))
        }
    }
}

/// Convex function presets for the sum-shift inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvexPreset {
    /// f(x) = 1/x on strictly positive inputs.
    Reciprocal,
    /// f(x) = x^2.
    Square,
}

impl ConvexPreset {
    pub fn cli_id(self) -> &'static str {
        match self {
            ConvexPreset::Reciprocal => "reciprocal",
            ConvexPreset::Square => "square",
        }
    }

    pub fn from_cli_id(id: &str) -> Option<ConvexPreset> {
        match id {
            "reciprocal" => Some(ConvexPreset::Reciprocal),
            "square" => Some(ConvexPreset::Square),
            _ => None,
        }
    }
}

/// Growth statements with unspecified constants: reported, never judged.
#[derive(Clone, Debug, PartialEq)]
pub enum AsymptoticBound {
    /// |(A-A)(A-A)(A-A)| vs |A|^(17/8) / log^(17/16) |A|.
    Ddd,
    /// |(A+A)/(A+A) + A/A| vs |A|^(36/17) / log^(16/17) |A|.
    RatioSum,
    /// |(AA+AA)/(A+A)| vs |A|^(11/8) |AA|^(3/4) / log |A|.
    AaSumRatio,
    /// |(AA+A)/(AA+A)| vs |A|^(17/8) / log |A|.
    AaaRatio,
    /// |{(ab+c)/(ad+e)}| vs |A|^(17/8) / log |A|.
    FiveVar,
    /// |(A-A)(A-A)| vs |A|^2 / log |A|.
    DiffProd,
    /// max over a != b of |(A-a)(A-b)| vs |A|^2 / log |A|.
    ShiftedProd,
    /// |R[A]| vs |A|^2 / log |A|.
    RTriple,
    /// |XY| |(X+alpha)Z| vs |X|^(3/2) |Y|^(1/2) |Z|^(1/2).
    Gs { alpha: Rational },
    /// |X(X+alpha)| vs |X|^(5/4).
    Gs1 { alpha: Rational },
    /// max(|XY|, |(X+alpha)Y|) vs |X|^(3/4) |Y|^(1/2).
    Gs2 { alpha: Rational },
    /// |f(X)+Y| |X+Z| vs |X|^(3/2) |Y|^(1/2) |Z|^(1/2).
    Enr { f: ConvexPreset },
    /// |(A+A)/(A+A)| vs (|A|^2 / log |A|) (|A|^2/|A/A|)^(1/8).
    Lund,
    /// |(A+A)/(B+B)| vs (|A||B|/(log|A|+log|B|)) (|A||B|/|A/B|)^(1/8).
    LundTwoSets,
    /// |A(A+alpha)| vs |A|^(24/19) / log^(2/19) |A|.
    Jorn { alpha: Rational },
}

impl AsymptoticBound {
    /// Default suite in report order, with shift 1 and the reciprocal
    /// preset.
    pub fn default_suite() -> Vec<AsymptoticBound> {
        vec![
            AsymptoticBound::Ddd,
            AsymptoticBound::RatioSum,
            AsymptoticBound::AaSumRatio,
            AsymptoticBound::AaaRatio,
            AsymptoticBound::FiveVar,
            AsymptoticBound::DiffProd,
            AsymptoticBound::ShiftedProd,
            AsymptoticBound::RTriple,
            AsymptoticBound::Gs { alpha: Rational::ONE },
            AsymptoticBound::Gs1 { alpha: Rational::ONE },
            AsymptoticBound::Gs2 { alpha: Rational::ONE },
            AsymptoticBound::Enr { f: ConvexPreset::Reciprocal },
            AsymptoticBound::Lund,
            AsymptoticBound::LundTwoSets,
            AsymptoticBound::Jorn { alpha: Rational::ONE },
        ]
    }

    pub fn cli_id(&self) -> &'static str {
        match self {
            AsymptoticBound::Ddd => "ddd",
            AsymptoticBound::RatioSum => "ratio-sum",
            AsymptoticBound::AaSumRatio => "aa-sum-ratio",
            AsymptoticBound::AaaRatio => "aaa-ratio",
            AsymptoticBound::FiveVar => "five-var",
            AsymptoticBound::DiffProd => "diff-prod",
            AsymptoticBound::ShiftedProd => "shifted-prod",
            AsymptoticBound::RTriple => "r-triple",
            AsymptoticBound::Gs { .. } => "gs",
            AsymptoticBound::Gs1 { .. } => "gs1",
            AsymptoticBound::Gs2 { .. } => "gs2",
            AsymptoticBound::Enr { .. } => "enr",
            AsymptoticBound::Lund => "lund",
            AsymptoticBound::LundTwoSets => "lund-two-sets",
            AsymptoticBound::Jorn { .. } => "jorn",
        }
    }

    /// Resolve a CLI identifier with default parameters.
    pub fn from_cli_id(id: &str) -> Option<AsymptoticBound> {
        Self::default_suite().into_iter().find(|b| b.cli_id() == id)
    }
}

fn check_shift(alpha: &Rational) -> Result<(), BoundsError> {
    if alpha.is_zero() {
        Err(BoundsError::ZeroShift)
    } else {
        Ok(())
    }
}

fn apply_convex(f: ConvexPreset, x: &FiniteSet) -> Result<FiniteSet, BoundsError> {
    match f {
        ConvexPreset::Reciprocal => {
            if !x.all_positive() {
                return Err(BoundsError::PositivityViolation { what: "reciprocal preset" });
            }
            Ok(FiniteSet::from_values(
                x.iter().map(|v| v.recip().expect("positive element")),
            ))
        }
        ConvexPreset::Square => Ok(FiniteSet::from_values(x.iter().map(|v| v * v))),
    }
}

fn finish_ratio(bound_id: &str, lhs: u64, rhs: f64, input: String) -> BoundReport {
    BoundReport {
        bound_id: bound_id.to_owned(),
        lhs,
        rhs: RhsValue::Real(rhs),
        ratio: lhs as f64 / rhs,
        verdict: Verdict::RatioOnly,
        input,
    }
}

/// Measure a growth statement: lhs cardinality (or cardinality product)
/// against the formula rhs with constant 1 and logs base 2. The primary
/// set must have at least 4 elements so log2 is at least 2.
pub fn report_asymptotic(
    bound: &AsymptoticBound,
    sets: &SetEnv,
    budget: &Budget,
) -> Result<BoundReport, BoundsError> {
    let id = bound.cli_id();
    // GS-style bounds are stated over X, Y, Z; everything else over A.
    // Either spelling works: X falls back to A, Y and Z to X, B to A.
    let primary_name = match bound {
        AsymptoticBound::Gs { .. }
        | AsymptoticBound::Gs1 { .. }
        | AsymptoticBound::Gs2 { .. }
        | AsymptoticBound::Enr { .. } => "X",
        _ => "A",
    };
    let a = match sets.get(primary_name) {
        Some(set) => set,
        None => require(sets, "A")?,
    };
    if a.len() < 4 {
        return Err(BoundsError::TooSmall { required: 4, got: a.len() });
    }
    let n = a.len() as f64;
    let log_n = n.log2();

    match bound {
        AsymptoticBound::Ddd => {
            let lhs = expanders::named_expander(NamedExpander::Ddd, a, budget)?.len() as u64;
            let rhs = n.powf(17.0 / 8.0) / log_n.powf(17.0 / 16.0);
            Ok(finish_ratio(id, lhs, rhs, a.digest("A")))
        }
        AsymptoticBound::RatioSum => {
            let lhs = expanders::named_expander(NamedExpander::RatioSumPlusRatio, a, budget)?
                .len() as u64;
            let rhs = n.powf(36.0 / 17.0) / log_n.powf(16.0 / 17.0);
            Ok(finish_ratio(id, lhs, rhs, a.digest("A")))
        }
        AsymptoticBound::AaSumRatio => {
            let lhs =
                expanders::named_expander(NamedExpander::AaSumRatio, a, budget)?.len() as u64;
            let aa = finset::pairwise(SetOp::Mul, a, a, budget)?.len() as f64;
            let rhs = n.powf(11.0 / 8.0) * aa.powf(3.0 / 4.0) / log_n;
            Ok(finish_ratio(id, lhs, rhs, a.digest("A")))
        }
        AsymptoticBound::AaaRatio => {
            let lhs =
                expanders::named_expander(NamedExpander::AaaRatio, a, budget)?.len() as u64;
            let rhs = n.powf(17.0 / 8.0) / log_n;
            Ok(finish_ratio(id, lhs, rhs, a.digest("A")))
        }
        AsymptoticBound::FiveVar => {
            let lhs =
                expanders::named_expander(NamedExpander::FiveVar, a, budget)?.len() as u64;
            let rhs = n.powf(17.0 / 8.0) / log_n;
            Ok(finish_ratio(id, lhs, rhs, a.digest("A")))
        }
        AsymptoticBound::DiffProd => {
            let d = finset::pairwise(SetOp::Sub, a, a, budget)?;
            let lhs = finset::kfold(SetOp::Mul, &d, 2, budget)?.len() as u64;
            let rhs = n * n / log_n;
            Ok(finish_ratio(id, lhs, rhs, a.digest("A")))
        }
        AsymptoticBound::ShiftedProd => {
            let ((p, q), card) = expanders::best_shift_pair(a, budget)?;
            let rhs = n * n / log_n;
            let input = format!("{}; a={p} b={q}", a.digest("A"));
            Ok(finish_ratio(id, card as u64, rhs, input))
        }
        AsymptoticBound::RTriple => {
            let lhs = expanders::r_triple(a, budget)?.len() as u64;
            let rhs = n * n / log_n;
            Ok(finish_ratio(id, lhs, rhs, a.digest("A")))
        }
        AsymptoticBound::Gs { alpha } => {
            check_shift(alpha)?;
            let y = pick(sets, "Y", a)?;
            let z = pick(sets, "Z", a)?;
            let xy = finset::pairwise(SetOp::Mul, a, y, budget)?.len() as u64;
            let shifted = finset::affine(a, &Rational::ONE, alpha)?;
            let xz = finset::pairwise(SetOp::Mul, &shifted, z, budget)?.len() as u64;
            let rhs = n.powf(1.5) * (y.len() as f64).sqrt() * (z.len() as f64).sqrt();
            let input = format!(
                "{}; {}; {}; alpha={alpha}",
                a.digest("X"),
                y.digest("Y"),
                z.digest("Z")
            );
            Ok(finish_ratio(id, xy * xz, rhs, input))
        }
        AsymptoticBound::Gs1 { alpha } => {
            check_shift(alpha)?;
            let shifted = finset::affine(a, &Rational::ONE, alpha)?;
            let lhs = finset::pairwise(SetOp::Mul, a, &shifted, budget)?.len() as u64;
            let rhs = n.powf(5.0 / 4.0);
            let input = format!("{}; alpha={alpha}", a.digest("X"));
            Ok(finish_ratio(id, lhs, rhs, input))
        }
        AsymptoticBound::Gs2 { alpha } => {
            check_shift(alpha)?;
            let y = pick(sets, "Y", a)?;
            let xy = finset::pairwise(SetOp::Mul, a, y, budget)?.len();
            let shifted = finset::affine(a, &Rational::ONE, alpha)?;
            let sy = finset::pairwise(SetOp::Mul, &shifted, y, budget)?.len();
            let rhs = n.powf(3.0 / 4.0) * (y.len() as f64).sqrt();
            let input =
                format!("{}; {}; alpha={alpha}", a.digest("X"), y.digest("Y"));
            Ok(finish_ratio(id, xy.max(sy) as u64, rhs, input))
        }
        AsymptoticBound::Enr { f } => {
            let y = pick(sets, "Y", a)?;
            let z = pick(sets, "Z", a)?;
            let fx = apply_convex(*f, a)?;
            let fy = finset::pairwise(SetOp::Add, &fx, y, budget)?.len() as u64;
            let xz = finset::pairwise(SetOp::Add, a, z, budget)?.len() as u64;
            let rhs = n.powf(1.5) * (y.len() as f64).sqrt() * (z.len() as f64).sqrt();
            let input = format!(
                "{}; {}; {}; f={}",
                a.digest("X"),
                y.digest("Y"),
                z.digest("Z"),
                f.cli_id()
            );
            Ok(finish_ratio(id, fy * xz, rhs, input))
        }
        AsymptoticBound::Lund => {
            let s = finset::pairwise(SetOp::Add, a, a, budget)?;
            let lhs = finset::pairwise(SetOp::Div, &s, &s, budget)?.len() as u64;
            let ratio_card = finset::pairwise(SetOp::Div, a, a, budget)?.len() as f64;
            let rhs = (n * n / log_n) * (n * n / ratio_card).powf(1.0 / 8.0);
            Ok(finish_ratio(id, lhs, rhs, a.digest("A")))
        }
        AsymptoticBound::LundTwoSets => {
            let b = pick(sets, "B", a)?;
            if b.len() < 4 {
                return Err(BoundsError::TooSmall { required: 4, got: b.len() });
            }
            let sa = finset::pairwise(SetOp::Add, a, a, budget)?;
            let sb = finset::pairwise(SetOp::Add, b, b, budget)?;
            let lhs = finset::pairwise(SetOp::Div, &sa, &sb, budget)?.len() as u64;
            let m = b.len() as f64;
            let ab = finset::pairwise(SetOp::Div, a, b, budget)?.len() as f64;
            let rhs = (n * m / (log_n + m.log2())) * (n * m / ab).powf(1.0 / 8.0);
            let input = format!("{}; {}", a.digest("A"), b.digest("B"));
            Ok(finish_ratio(id, lhs, rhs, input))
        }
        AsymptoticBound::Jorn { alpha } => {
            check_shift(alpha)?;
            let shifted = finset::affine(a, &Rational::ONE, alpha)?;
            let lhs = finset::pairwise(SetOp::Mul, a, &shifted, budget)?.len() as u64;
            let rhs = n.powf(24.0 / 19.0) / log_n.powf(2.0 / 19.0);
            let input = format!("{}; alpha={alpha}", a.digest("A"));
            Ok(finish_ratio(id, lhs, rhs, input))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KsMode {
    Additive,
    Multiplicative,
}

/// Witness for the half-size subset inequality: the minimizing subset, its
/// combined sum/product cardinality, and the formula value
/// prod_i |X op B_i| / |X|^(k-1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsWitness {
    pub subset: FiniteSet,
    pub lhs: u64,
    pub rhs: Rational,
}

/// Exhaustively find the subset X' of X with |X'| >= ceil(|X|/2) that
/// minimizes |X' + B_1 + ... + B_k| (or the product analog). Ties go to
/// the lexicographically smallest subset.
pub fn katz_shen_witness(
    x: &FiniteSet,
    b_list: &[FiniteSet],
    mode: KsMode,
    budget: &Budget,
) -> Result<KsWitness, BoundsError> {
    if x.is_empty() {
        return Err(BoundsError::TooSmall { required: 1, got: 0 });
    }
    if x.len() > 16 {
        return Err(BoundsError::TooLarge { limit: 16, got: x.len() });
    }
    if b_list.is_empty() {
        return Err(BoundsError::BadParameters { what: "need at least one B set" });
    }
    if b_list.iter().any(FiniteSet::is_empty) {
        return Err(BoundsError::BadParameters { what: "B sets must be nonempty" });
    }
    let op = match mode {
        KsMode::Additive => SetOp::Add,
        KsMode::Multiplicative => {
            let zero = Rational::ZERO;
            if x.contains(&zero) || b_list.iter().any(|b| b.contains(&zero)) {
                return Err(BoundsError::ZeroInMultiplicativeMode);
            }
            SetOp::Mul
        }
    };

    // X' op B_1 op ... op B_k = X' op (B_1 op ... op B_k), so the basis
    // combination is shared across all subsets.
    let mut basis = b_list[0].clone();
    for b in &b_list[1..] {
        basis = finset::pairwise(op, &basis, b, budget)?;
    }

    let n = x.len();
    let min_size = n.div_ceil(2);
    let elems = x.elems();
    let mut best: Option<(u64, Vec<Rational>)> = None;
    for mask in 1u32..(1 << n) {
        if (mask.count_ones() as usize) < min_size {
            continue;
        }
        let subset: Vec<Rational> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| elems[i].clone())
            .collect();
        let sub_set = FiniteSet::from_values(subset.iter().cloned());
        let card = finset::pairwise(op, &sub_set, &basis, budget)?.len() as u64;
        let candidate = (card, subset);
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    let (lhs, subset) = best.expect("the full set always qualifies");

    let mut prod = BigInt::one();
    for b in b_list {
        prod *= BigInt::from(finset::pairwise(op, x, b, budget)?.len());
    }
    let den = num_traits::pow(BigInt::from(n), b_list.len() - 1);
    let rhs = Rational::from_big(prod, den).expect("positive denominator");

    Ok(KsWitness { subset: FiniteSet::from_values(subset), lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn ints(values: &[i64]) -> FiniteSet {
        FiniteSet::from_values(values.iter().map(|&v| Rational::from(v)))
    }

    fn env_a(a: FiniteSet) -> SetEnv {
        let mut env = SetEnv::new();
        env.insert("A".into(), a);
        env
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    // Independent oracle: |(A+A)/(A+A) + A/A| by direct nested loops.
    fn naive_sum_ratio_set(a: &[Rational]) -> BTreeSet<Rational> {
        let mut sums = BTreeSet::new();
        for x in a {
            for y in a {
                sums.insert(x + y);
            }
        }
        let mut out = BTreeSet::new();
        for p in &sums {
            for q in &sums {
                if !q.is_zero() {
                    out.insert(p.checked_div(q).unwrap());
                }
            }
        }
        out
    }

    fn naive_ratio_sum_plus_ratio(a: &[Rational]) -> usize {
        let left = naive_sum_ratio_set(a);
        let mut ratios = BTreeSet::new();
        for x in a {
            for y in a {
                if !y.is_zero() {
                    ratios.insert(x.checked_div(y).unwrap());
                }
            }
        }
        let mut out = BTreeSet::new();
        for l in &left {
            for r in &ratios {
                out.insert(l + r);
            }
        }
        out.len()
    }

    #[test]
    fn ungar_equality_on_three_term_progression() {
        let b = Budget::default();
        let report = check_exact(ExactBound::Ungar, &env_a(ints(&[1, 2, 3])), &b).unwrap();
        assert_eq!(report.lhs, 7);
        assert_eq!(report.rhs, RhsValue::Exact(Rational::from(7i64)));
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.ratio, 1.0);
        assert_eq!(report.bound_id, "UNGAR");
    }

    #[test]
    fn ratio_sum_equality_and_oracle() {
        let b = Budget::default();
        let a = ints(&[1, 2, 3]);
        // The exact inequality is on the plain ratio-of-sums set; adding the
        // ratio set on top is a different, larger expander.
        assert_eq!(naive_sum_ratio_set(a.elems()).len(), 17);
        assert_eq!(naive_ratio_sum_plus_ratio(a.elems()), 66);
        let report = check_exact(ExactBound::RatioSum, &env_a(a), &b).unwrap();
        assert_eq!(report.lhs, 17);
        assert_eq!(report.rhs, RhsValue::Exact(Rational::from(17i64)));
        assert_eq!(report.verdict, Verdict::Pass);
        let a4 = ints(&[1, 2, 3, 4]);
        let wide = report_asymptotic(&AsymptoticBound::RatioSum, &env_a(a4.clone()), &b).unwrap();
        assert_eq!(wide.lhs, naive_ratio_sum_plus_ratio(a4.elems()) as u64);
    }

    #[test]
    fn ratio_sum_rejects_nonpositive_sets() {
        let b = Budget::default();
        for bad in [ints(&[-1, 2, 3]), ints(&[0, 1, 2])] {
            assert_eq!(
                check_exact(ExactBound::RatioSum, &env_a(bad), &b),
                Err(BoundsError::PositivityViolation { what: "RATIO_SUM" })
            );
        }
    }

    #[test]
    fn ruzsa_triangle_on_zero_one() {
        let b = Budget::default();
        // B and C default to A.
        let report =
            check_exact(ExactBound::RuzsaTriangle, &env_a(ints(&[0, 1])), &b).unwrap();
        assert_eq!(report.lhs, 6);
        assert_eq!(report.rhs, RhsValue::Exact(Rational::from(9i64)));
        assert_eq!(report.verdict, Verdict::Pass);

        let mut env = env_a(ints(&[0, 1, 5]));
        env.insert("B".into(), ints(&[2, 3]));
        env.insert("C".into(), ints(&[0, 7]));
        let report = check_exact(ExactBound::RuzsaTriangle, &env, &b).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn plunnecke_small_cases() {
        let b = Budget::default();
        let env = env_a(ints(&[1, 2, 3]));
        let report =
            check_exact(ExactBound::Plunnecke { k: 2, l: 1 }, &env, &b).unwrap();
        // 2A - A = {-1..5}; (|A+A|/|A|)^3 * |A| = 125/9.
        assert_eq!(report.lhs, 7);
        assert_eq!(report.rhs, RhsValue::Exact(rat(125, 9)));
        assert_eq!(report.verdict, Verdict::Pass);

        let report =
            check_exact(ExactBound::Plunnecke { k: 1, l: 0 }, &env, &b).unwrap();
        assert_eq!(report.lhs, 3);
        assert_eq!(report.rhs, RhsValue::Exact(Rational::from(5i64)));

        assert_eq!(
            check_exact(ExactBound::Plunnecke { k: 0, l: 0 }, &env, &b),
            Err(BoundsError::BadParameters { what: "k + l must be at least 1" })
        );
    }

    #[test]
    fn missing_and_tiny_inputs_error() {
        let b = Budget::default();
        assert_eq!(
            check_exact(ExactBound::Ungar, &SetEnv::new(), &b),
            Err(BoundsError::MissingInput { name: "A" })
        );
        assert_eq!(
            check_exact(ExactBound::Ungar, &env_a(ints(&[5])), &b),
            Err(BoundsError::TooSmall { required: 2, got: 1 })
        );
        assert_eq!(
            report_asymptotic(&AsymptoticBound::Ddd, &env_a(ints(&[1, 2, 3])), &b),
            Err(BoundsError::TooSmall { required: 4, got: 3 })
        );
    }

    #[test]
    fn r_triple_ratio_against_oracle() {
        let b = Budget::default();
        let a = ints(&[1, 2, 3, 4]);
        let mut oracle = BTreeSet::new();
        for p in a.elems() {
            for q in a.elems() {
                for r in a.elems() {
                    if p != r {
                        oracle.insert((p - q).checked_div(&(p - r)).unwrap());
                    }
                }
            }
        }
        let report = report_asymptotic(&AsymptoticBound::RTriple, &env_a(a), &b).unwrap();
        assert_eq!(report.lhs, oracle.len() as u64);
        assert_eq!(report.rhs, RhsValue::Real(8.0));
        assert_eq!(report.verdict, Verdict::RatioOnly);
        assert!((report.ratio - report.lhs as f64 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn diff_prod_ratio_against_oracle() {
        let b = Budget::default();
        let a = ints(&[1, 2, 3, 4]);
        let mut diffs = BTreeSet::new();
        for p in a.elems() {
            for q in a.elems() {
                diffs.insert(p - q);
            }
        }
        let mut prods = BTreeSet::new();
        for p in &diffs {
            for q in &diffs {
                prods.insert(p * q);
            }
        }
        let report = report_asymptotic(&AsymptoticBound::DiffProd, &env_a(a), &b).unwrap();
        assert_eq!(report.lhs, prods.len() as u64);
        assert_eq!(report.rhs, RhsValue::Real(8.0));
    }

    #[test]
    fn gs1_on_powers_of_two() {
        let b = Budget::default();
        let report = report_asymptotic(
            &AsymptoticBound::Gs1 { alpha: Rational::ONE },
            &env_a(ints(&[1, 2, 4, 8])),
            &b,
        )
        .unwrap();
        assert_eq!(report.lhs, 16);
        let rhs = 4f64.powf(5.0 / 4.0);
        assert_eq!(report.rhs, RhsValue::Real(rhs));
        assert!((report.ratio - 16.0 / rhs).abs() < 1e-12);
    }

    #[test]
    fn shifted_prod_matches_brute_force_maximum() {
        let b = Budget::default();
        let a = ints(&[1, 2, 3, 4]);
        let mut best = 0usize;
        for p in a.elems() {
            for q in a.elems() {
                if p == q {
                    continue;
                }
                let mut set = BTreeSet::new();
                for x in a.elems() {
                    for y in a.elems() {
                        set.insert(&(x - p) * &(y - q));
                    }
                }
                best = best.max(set.len());
            }
        }
        let report =
            report_asymptotic(&AsymptoticBound::ShiftedProd, &env_a(a), &b).unwrap();
        assert_eq!(report.lhs, best as u64);
    }

    #[test]
    fn enr_presets() {
        let b = Budget::default();
        let env = env_a(ints(&[1, 2, 3, 4]));
        let rep = report_asymptotic(
            &AsymptoticBound::Enr { f: ConvexPreset::Reciprocal },
            &env,
            &b,
        )
        .unwrap();
        // 1/X + X = {1, 1/2, 1/3, 1/4} + {1,2,3,4}: all 16 sums distinct;
        // X + X has 7 elements.
        assert_eq!(rep.lhs, 16 * 7);

        let env_neg = env_a(ints(&[-1, 1, 2, 3]));
        assert_eq!(
            report_asymptotic(
                &AsymptoticBound::Enr { f: ConvexPreset::Reciprocal },
                &env_neg,
                &b
            ),
            Err(BoundsError::PositivityViolation { what: "reciprocal preset" })
        );
        // The square preset accepts sign-mixed sets.
        let rep = report_asymptotic(
            &AsymptoticBound::Enr { f: ConvexPreset::Square },
            &env_neg,
            &b,
        )
        .unwrap();
        assert!(rep.lhs > 0);
    }

    #[test]
    fn zero_shift_rejected() {
        let b = Budget::default();
        let env = env_a(ints(&[1, 2, 3, 4]));
        for bound in [
            AsymptoticBound::Gs { alpha: Rational::ZERO },
            AsymptoticBound::Gs1 { alpha: Rational::ZERO },
            AsymptoticBound::Gs2 { alpha: Rational::ZERO },
            AsymptoticBound::Jorn { alpha: Rational::ZERO },
        ] {
            assert_eq!(report_asymptotic(&bound, &env, &b), Err(BoundsError::ZeroShift));
        }
    }

    #[test]
    fn default_suite_runs_on_small_progression() {
        let b = Budget::default();
        let env = env_a(ints(&[1, 2, 3, 4, 5]));
        for bound in AsymptoticBound::default_suite() {
            let report = report_asymptotic(&bound, &env, &b)
                .unwrap_or_else(|e| panic!("{} failed: {e}", bound.cli_id()));
            assert!(report.ratio.is_finite() && report.ratio > 0.0, "{}", report.bound_id);
            assert_eq!(report.verdict, Verdict::RatioOnly);
        }
    }

    #[test]
    fn dilation_leaves_scale_free_ratios_unchanged() {
        let b = Budget::default();
        let base = ints(&[1, 3, 4, 9, 11]);
        for c in [rat(3, 1), rat(-2, 1), rat(2, 7)] {
            let scaled = finset::affine(&base, &c, &Rational::ZERO).unwrap();
            for bound in [
                AsymptoticBound::Ddd,
                AsymptoticBound::DiffProd,
                AsymptoticBound::RTriple,
            ] {
                let r0 =
                    report_asymptotic(&bound, &env_a(base.clone()), &b).unwrap();
                let r1 = report_asymptotic(&bound, &env_a(scaled.clone()), &b).unwrap();
                assert_eq!(r0.lhs, r1.lhs, "{}", bound.cli_id());
                assert_eq!(r0.ratio, r1.ratio);
            }
            let u0 = check_exact(ExactBound::Ungar, &env_a(base.clone()), &b).unwrap();
            let u1 = check_exact(ExactBound::Ungar, &env_a(scaled.clone()), &b).unwrap();
            assert_eq!(u0.ratio, u1.ratio);
        }
    }

    // Independent subset-enumeration oracle for the witness search.
    fn naive_ks(
        x: &[Rational],
        b_list: &[Vec<Rational>],
        multiplicative: bool,
    ) -> (Vec<Rational>, usize) {
        let n = x.len();
        let mut best: Option<(usize, Vec<Rational>)> = None;
        for mask in 1u32..(1 << n) {
            if (mask.count_ones() as usize) < n.div_ceil(2) {
                continue;
            }
            let subset: Vec<Rational> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| x[i].clone())
                .collect();
            let mut acc: BTreeSet<Rational> = subset.iter().cloned().collect();
            for b in b_list {
                let mut next = BTreeSet::new();
                for s in &acc {
                    for t in b {
                        next.insert(if multiplicative { s * t } else { s + t });
                    }
                }
                acc = next;
            }
            let cand = (acc.len(), subset);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        let (lhs, subset) = best.unwrap();
        (subset, lhs)
    }

    #[test]
    fn witness_small_cases() {
        let b = Budget::default();
        // Singleton basis: adding {0} changes nothing, so the smallest
        // allowed subset wins.
        let w = katz_shen_witness(&ints(&[1, 2]), &[ints(&[0])], KsMode::Additive, &b)
            .unwrap();
        assert_eq!(w.subset, ints(&[1]));
        assert_eq!(w.lhs, 1);
        assert_eq!(w.rhs, Rational::from(2i64));

        let w = katz_shen_witness(
            &ints(&[0, 1, 2, 3]),
            &[ints(&[0, 1])],
            KsMode::Additive,
            &b,
        )
        .unwrap();
        assert_eq!(w.subset, ints(&[0, 1]));
        assert_eq!(w.lhs, 3);
        assert_eq!(w.rhs, Rational::from(5i64));

        let w = katz_shen_witness(
            &ints(&[1, 2, 4]),
            &[ints(&[1, 2])],
            KsMode::Multiplicative,
            &b,
        )
        .unwrap();
        assert_eq!(w.subset, ints(&[1, 2]));
        assert_eq!(w.lhs, 3);
        assert_eq!(w.rhs, Rational::from(4i64));

        // Two multiplicative basis sets exercise the shared-basis fold.
        let w = katz_shen_witness(
            &ints(&[1, 2]),
            &[ints(&[1, 2]), ints(&[1, 3])],
            KsMode::Multiplicative,
            &b,
        )
        .unwrap();
        assert_eq!(w.subset, ints(&[1]));
        assert_eq!(w.lhs, 4);
        assert_eq!(w.rhs, Rational::from(6i64));
    }

    #[test]
    fn witness_rejects_bad_inputs() {
        let b = Budget::default();
        let big = FiniteSet::from_values((0..17).map(Rational::from));
        assert_eq!(
            katz_shen_witness(&big, &[ints(&[1])], KsMode::Additive, &b),
            Err(BoundsError::TooLarge { limit: 16, got: 17 })
        );
        assert_eq!(
            katz_shen_witness(&ints(&[0, 1]), &[ints(&[1])], KsMode::Multiplicative, &b),
            Err(BoundsError::ZeroInMultiplicativeMode)
        );
        assert_eq!(
            katz_shen_witness(&ints(&[1, 2]), &[], KsMode::Additive, &b),
            Err(BoundsError::BadParameters { what: "need at least one B set" })
        );
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-30i64..30, 1i64..8).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_set(min: usize, max: usize) -> impl Strategy<Value = FiniteSet> {
        proptest::collection::btree_set(arb_rational(), min..=max)
            .prop_map(|s| FiniteSet::from_values(s))
    }

    fn arb_positive_set(min: usize, max: usize) -> impl Strategy<Value = FiniteSet> {
        proptest::collection::btree_set(
            (1i64..40, 1i64..8).prop_map(|(n, d)| rat(n, d)),
            min..=max,
        )
        .prop_map(|s| FiniteSet::from_values(s))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // Every exact bound is a theorem; FAIL anywhere is a bug.
        #[test]
        fn exact_bounds_never_fail(
            a in arb_set(2, 7),
            bpos in arb_positive_set(1, 6),
            c in arb_set(1, 5),
            k in 0u32..3,
            l in 0u32..3,
        ) {
            let budget = Budget::default();
            let mut env = env_a(a);
            env.insert("B".into(), bpos.clone());
            env.insert("C".into(), c);
            let ungar = check_exact(ExactBound::Ungar, &env, &budget).unwrap();
            prop_assert_eq!(ungar.verdict, Verdict::Pass);
            let ruzsa = check_exact(ExactBound::RuzsaTriangle, &env, &budget).unwrap();
            prop_assert_eq!(ruzsa.verdict, Verdict::Pass);
            if k + l >= 1 {
                let p = check_exact(ExactBound::Plunnecke { k, l }, &env, &budget).unwrap();
                prop_assert_eq!(p.verdict, Verdict::Pass);
            }
            let pos_env = env_a(bpos);
            let rs = check_exact(ExactBound::RatioSum, &pos_env, &budget).unwrap();
            prop_assert_eq!(rs.verdict, Verdict::Pass);
        }

        #[test]
        fn witness_matches_oracle_and_size_floor(
            x in arb_set(1, 5),
            b1 in arb_set(1, 3),
            b2 in arb_set(1, 3),
            two in proptest::bool::ANY,
        ) {
            let budget = Budget::default();
            let b_list: Vec<FiniteSet> =
                if two { vec![b1, b2] } else { vec![b1] };
            let w = katz_shen_witness(&x, &b_list, KsMode::Additive, &budget).unwrap();
            prop_assert!(w.subset.len() >= x.len().div_ceil(2));
            prop_assert!(w.subset.iter().all(|v| x.contains(v)));
            let naive_bs: Vec<Vec<Rational>> =
                b_list.iter().map(|b| b.elems().to_vec()).collect();
            let (subset, lhs) = naive_ks(x.elems(), &naive_bs, false);
            prop_assert_eq!(w.lhs, lhs as u64);
            prop_assert_eq!(w.subset.elems().to_vec(), subset);
        }
    }
}
