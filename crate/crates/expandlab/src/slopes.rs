//! Slope-line decomposition of A x A and the cluster construction on top.
//!
//! Every pair (x, y) in A x A sits on the line through the origin with slope
//! lambda = y/x, so the lines A_lambda = {x : x and lambda*x both lie in A}
//! partition all |A|^2 pairs and are indexed by the ratio set A/A.  A dyadic
//! sweep keeps the bucket of near-equal line sizes carrying the most mass;
//! the surviving slopes feed either a basic consecutive-slope bound or, when
//! the data is rich enough, a randomized cluster construction whose slope
//! collisions are controlled by a symmetric local-lemma check.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::finset::{Budget, FiniteSet, FinsetError};
use crate::numeric::Rational;

#[derive(Debug)]
pub enum SlopesError {
    /// Slope machinery needs strictly positive elements so every pair has a
    /// well-defined nonzero slope and every sum denominator stays nonzero.
    NonPositiveElement,
    /// A supplied point is not on the line it was claimed to lie on.
    PreconditionViolation { what: String },
    BadParameters { what: String },
    Set(FinsetError),
}

impl fmt::Display for SlopesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopesError::NonPositiveElement => {
                write!(f, "slope decomposition needs strictly positive elements")
            }
            SlopesError::PreconditionViolation { what } => {
                write!(f, "precondition violated: {what}")
            }
            SlopesError::BadParameters { what } => write!(f, "bad parameters: {what}"),
            SlopesError::Set(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SlopesError {}

impl From<FinsetError> for SlopesError {
    fn from(e: FinsetError) -> SlopesError {
        SlopesError::Set(e)
    }
}

/// The lines A_lambda keyed by slope, together with the total pair mass.
///
/// Invariant: the line sizes sum to exactly |A|^2.
#[derive(Clone, Debug)]
pub struct SlopeDecomposition {
    pub lines: BTreeMap<Rational, FiniteSet>,
    pub total_mass: usize,
}

impl SlopeDecomposition {
    /// Cardinality of the source set; the slope-1 line is all of A.
    pub fn source_len(&self) -> usize {
        self.lines.get(&Rational::ONE).map_or(0, FiniteSet::len)
    }
}

/// Split A x A into origin lines: x lies on A_lambda exactly when x and
/// lambda*x are both in A.  The budget caps the |A|^2 stored memberships.
pub fn decompose(a: &FiniteSet, budget: &Budget) -> Result<SlopeDecomposition, SlopesError> {
    if !a.all_positive() {
        return Err(SlopesError::NonPositiveElement);
    }
    let n = a.len();
    if n.saturating_mul(n) > budget.max_elements {
        return Err(SlopesError::Set(FinsetError::BudgetExceeded {
            limit: budget.max_elements,
        }));
    }
    let mut raw: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
    for x in a.iter() {
        for y in a.iter() {
            raw.entry(y / x).or_default().push(x.clone());
        }
    }
    let mut lines = BTreeMap::new();
    let mut total_mass = 0;
    for (slope, xs) in raw {
        total_mass += xs.len();
        lines.insert(slope, FiniteSet::from_values(xs));
    }
    Ok(SlopeDecomposition { lines, total_mass })
}

/// One dyadic bucket of near-equal line sizes: the slopes lambda with
/// tau <= |A_lambda| < 2*tau, chosen to maximize retained mass.
#[derive(Clone, Debug)]
pub struct DyadicSelection {
    pub tau: Rational,
    pub s_tau: Vec<Rational>,
    pub mass: usize,
}

/// Sweep the dyadic buckets [T*2^(j-1), T*2^j) with T = |A|^2 / (2*|A/A|),
/// extending upward while the bucket floor stays at most |A|, and keep the
/// bucket with the most mass (the smallest floor on ties).  The winner
/// always retains at least |A|^2 / (2*max(1, ceil(log2 |A|))) of the mass,
/// and its slope list is never empty.
pub fn dyadic_select(dec: &SlopeDecomposition) -> DyadicSelection {
    assert!(!dec.lines.is_empty(), "dyadic selection needs a nonempty decomposition");
    let n = dec.source_len();
    let q = dec.lines.len();
    let t = Rational::new((n * n) as i64, (2 * q) as i64).expect("line count is positive");
    let limit = Rational::from(n);
    let two = Rational::from(2u32);
    let mut floor = t;
    let mut best: Option<DyadicSelection> = None;
    // T <= |A| always holds, so the loop body runs at least once.
    while floor <= limit {
        let upper = &floor * &two;
        let mut s_tau = Vec::new();
        let mut mass = 0usize;
        for (slope, line) in &dec.lines {
            let size = Rational::from(line.len());
            if floor <= size && size < upper {
                s_tau.push(slope.clone());
                mass += line.len();
            }
        }
        if best.as_ref().is_none_or(|b| mass > b.mass) {
            best = Some(DyadicSelection { tau: floor.clone(), s_tau, mass });
        }
        floor = upper;
    }
    best.expect("at least one bucket was swept")
}

/// Directed rational bounds e_lo < e < e_hi, one unit apart in the 39th
/// decimal digit, so either side can serve as a rigorous one-sided stand-in.
pub fn euler_bounds() -> (Rational, Rational) {
    let lo = Rational::parse_scalar("2.718281828459045235360287471352662497757")
        .expect("literal parses");
    let hi = Rational::parse_scalar("2.718281828459045235360287471352662497758")
        .expect("literal parses");
    (lo, hi)
}

/// Largest M with M^8 <= tau^2 / (30 * e * c * n), using the upper Euler
/// bound so the choice errs small.  For integer M the test M^8 <= v is
/// unchanged by flooring v first, so the eighth root of the floored ratio
/// is exact.
pub fn choose_m(tau: &Rational, n: u64, c: &Rational) -> u64 {
    assert!(tau.is_positive(), "tau must be positive");
    assert!(n >= 1, "n must be at least 1");
    assert!(c.is_positive(), "c must be positive");
    let (_, e_hi) = euler_bounds();
    let thirty_e = &Rational::from(30u32) * &e_hi;
    let denom = &(&thirty_e * c) * &Rational::from(n);
    let ratio = tau.pow(2).checked_div(&denom).expect("denominator is positive");
    let floored = ratio.floor();
    if floored <= BigInt::from(0) {
        return 0;
    }
    floored.nth_root(8).to_u64().expect("eighth root fits in u64")
}

/// Inputs to the symmetric local-lemma check: `events` bad events, each
/// depending on at most `degree` others, each of probability at most `prob`.
#[derive(Clone, Debug)]
pub struct LLLParams {
    pub events: u64,
    pub degree: u64,
    pub prob: Rational,
}

/// Symmetric local-lemma verdict: sufficient when e * prob * (degree + 1)
/// is at most 1, checked against the upper Euler bound so `true` is
/// rigorous.  `false` only means this sufficient condition was not met.
pub fn lll_feasible(params: &LLLParams) -> bool {
    assert!(!params.prob.is_negative(), "probability bound must be nonnegative");
    let (_, e_hi) = euler_bounds();
    let lhs = &(&e_hi * &params.prob) * &Rational::from(params.degree + 1);
    lhs <= Rational::ONE
}

/// Probability bound (c / tau^2) * (n^4 / b^3 + n^2 / b) on one slope
/// collision event at incidence threshold b.
pub fn collision_prob_bound(tau: &Rational, n: u64, b: &Rational, c: &Rational) -> Rational {
    assert!(tau.is_positive(), "tau must be positive");
    assert!(b.is_positive(), "threshold b must be positive");
    assert!(c.is_positive(), "c must be positive");
    let n2 = Rational::from(n).pow(2);
    let n4 = Rational::from(n).pow(4);
    let lead = c.checked_div(&tau.pow(2)).expect("tau is nonzero");
    let cubic = n4.checked_div(&b.pow(3)).expect("b is nonzero");
    let linear = n2.checked_div(b).expect("b is nonzero");
    &lead * &(&cubic + &linear)
}

/// Slope of the point sum (a0, l0*a0) + (alpha*x, l1*alpha*x).
fn sum_slope(l0: &Rational, a0: &Rational, l1: &Rational, alpha: &Rational, x: &Rational) -> Rational {
    let ax = alpha * x;
    let num = &(l0 * a0) + &(l1 * &ax);
    let den = a0 + &ax;
    num.checked_div(&den).expect("positive data keeps denominators nonzero")
}

fn check_on_line(
    a: &FiniteSet,
    point: &Rational,
    slope: &Rational,
    name: &str,
) -> Result<(), SlopesError> {
    if a.contains(point) && a.contains(&(slope * point)) {
        Ok(())
    } else {
        Err(SlopesError::PreconditionViolation {
            what: format!("{name} = {point} is not on the slope-{slope} line"),
        })
    }
}

/// Count pairs (x, y) in A x A whose two line sums share a slope:
/// (a_i, l_i*a_i) + (alpha_j*x, l_j*alpha_j*x) is collinear with the origin
/// and (a_k, l_k*a_k) + (alpha_l*y, l_l*alpha_l*y).
///
/// `lambda` holds the four slopes (l_i, l_j, l_k, l_l); `a_i` and `a_k`
/// must lie on the l_i and l_k lines, `alpha_j` and `alpha_l` on the l_j
/// and l_l lines.
pub fn incidence_count(
    a: &FiniteSet,
    lambda: &[Rational; 4],
    a_i: &Rational,
    a_k: &Rational,
    alpha_j: &Rational,
    alpha_l: &Rational,
) -> Result<u64, SlopesError> {
    if !a.all_positive() {
        return Err(SlopesError::NonPositiveElement);
    }
    let [l_i, l_j, l_k, l_l] = lambda;
    check_on_line(a, a_i, l_i, "a_i")?;
    check_on_line(a, alpha_j, l_j, "alpha_j")?;
    check_on_line(a, a_k, l_k, "a_k")?;
    check_on_line(a, alpha_l, l_l, "alpha_l")?;
    let mut left: HashMap<Rational, u64> = HashMap::new();
    for x in a.iter() {
        *left.entry(sum_slope(l_i, a_i, l_j, alpha_j, x)).or_insert(0) += 1;
    }
    let mut count = 0;
    for y in a.iter() {
        if let Some(hits) = left.get(&sum_slope(l_k, a_k, l_l, alpha_l, y)) {
            count += hits;
        }
    }
    Ok(count)
}

/// Count pairs (a, b) on the l_i and l_k lines whose collision count
/// reaches k, together with the ceiling n^4/k^3 + n^2/k that caps it.
pub fn rich_pair_count(
    a: &FiniteSet,
    dec: &SlopeDecomposition,
    lambda: &[Rational; 4],
    alpha_j: &Rational,
    alpha_l: &Rational,
    k: u64,
) -> Result<(u64, Rational), SlopesError> {
    if k < 2 {
        return Err(SlopesError::BadParameters {
            what: format!("richness threshold must be at least 2, got {k}"),
        });
    }
    let line = |slope: &Rational| {
        dec.lines.get(slope).ok_or_else(|| SlopesError::PreconditionViolation {
            what: format!("no line with slope {slope} in the decomposition"),
        })
    };
    let line_i = line(&lambda[0])?;
    let line_k = line(&lambda[2])?;
    let mut rich = 0;
    for a_i in line_i.iter() {
        for a_k in line_k.iter() {
            if incidence_count(a, lambda, a_i, a_k, alpha_j, alpha_l)? >= k {
                rich += 1;
            }
        }
    }
    let n = BigInt::from(a.len());
    let kk = BigInt::from(k);
    let cubic = Rational::from_big(num_traits::pow(n.clone(), 4), num_traits::pow(kk.clone(), 3))
        .expect("k is positive");
    let linear = Rational::from_big(num_traits::pow(n, 2), kk).expect("k is positive");
    Ok((rich, &cubic + &linear))
}

/// Slopes of (alpha_lo, l_lo*alpha_lo) + (alpha_hi*x, l_hi*alpha_hi*x) as x
/// runs over A in ascending order.  For positive data with l_lo < l_hi the
/// slopes strictly increase and stay strictly between l_lo and l_hi, which
/// keeps consecutive-slope chains disjoint.
pub fn pair_sum_slopes(
    a: &FiniteSet,
    l_lo: &Rational,
    alpha_lo: &Rational,
    l_hi: &Rational,
    alpha_hi: &Rational,
) -> Result<Vec<Rational>, SlopesError> {
    if !a.all_positive() || !alpha_lo.is_positive() || !alpha_hi.is_positive() {
        return Err(SlopesError::NonPositiveElement);
    }
    if l_lo >= l_hi {
        return Err(SlopesError::BadParameters {
            what: format!("need l_lo < l_hi, got {l_lo} and {l_hi}"),
        });
    }
    Ok(a.iter().map(|x| sum_slope(l_lo, alpha_lo, l_hi, alpha_hi, x)).collect())
}

/// Slopes of one cluster: `lower` is a run of M consecutive surviving
/// slopes and `upper` the next M.
#[derive(Clone, Debug)]
pub struct ClusterPair {
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

/// Deterministic frame for the cluster construction: disjoint runs of 2M
/// consecutive surviving slopes split into halves, one fixed representative
/// per slope (the least element of its line), and the incidence threshold
/// B = |A| / (2*M^2).
#[derive(Clone, Debug)]
pub struct ClusterPlan {
    pub m: u64,
    pub b: Rational,
    pub clusters: Vec<ClusterPair>,
    pub reps: BTreeMap<Rational, Rational>,
}

pub fn cluster_plan(
    dec: &SlopeDecomposition,
    sel: &DyadicSelection,
    m: u64,
) -> Result<ClusterPlan, SlopesError> {
    let s = sel.s_tau.len() as u64;
    if m < 2 {
        return Err(SlopesError::BadParameters {
            what: format!("cluster construction needs M >= 2, got M = {m}"),
        });
    }
    if 2 * m > s {
        return Err(SlopesError::BadParameters {
            what: format!("cluster construction needs 2M <= |S_tau|, got 2M = {} with |S_tau| = {s}", 2 * m),
        });
    }
    let n = dec.source_len();
    let b = Rational::new(n as i64, (2 * m * m) as i64).expect("m is positive");
    let mut reps = BTreeMap::new();
    for slope in &sel.s_tau {
        let line = dec.lines.get(slope).ok_or_else(|| SlopesError::PreconditionViolation {
            what: format!("selected slope {slope} has no line in the decomposition"),
        })?;
        reps.insert(slope.clone(), line.min().expect("lines are nonempty").clone());
    }
    let mm = m as usize;
    let count = sel.s_tau.len() / (2 * mm);
    let mut clusters = Vec::with_capacity(count);
    for t in 0..count {
        let base = 2 * mm * t;
        clusters.push(ClusterPair {
            lower: sel.s_tau[base..base + mm].to_vec(),
            upper: sel.s_tau[base + mm..base + 2 * mm].to_vec(),
        });
    }
    Ok(ClusterPlan { m, b, clusters, reps })
}

/// What one cluster produced: the largest and total collision counts over
/// index pairs, the number of distinct slopes across its M^2 shifted line
/// copies, and whether the largest count stayed within the threshold B.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterRecord {
    pub t: usize,
    #[serde(rename = "E_max")]
    pub e_max: u64,
    #[serde(rename = "E_sum")]
    pub e_sum: u64,
    pub r_q: u64,
    pub within_threshold: bool,
}

/// Full pipeline trace.  The optional fields are present exactly when the
/// cluster construction ran; `degraded` explains why it did not.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterTrace {
    pub input: String,
    pub n: usize,
    pub total_mass: usize,
    pub tau: Rational,
    #[serde(rename = "S_tau")]
    pub s_tau: Vec<Rational>,
    pub mass: usize,
    pub basic_bound: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degraded: Option<String>,
    pub seed: u64,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_events: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lll_feasible: Option<bool>,
    #[serde(rename = "E_max", skip_serializing_if = "Option::is_none")]
    pub e_max: Option<u64>,
    #[serde(rename = "E_sum", skip_serializing_if = "Option::is_none")]
    pub e_sum: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster_bound: Option<Rational>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub clusters: Vec<ClusterRecord>,
}

fn run_cluster(
    a: &FiniteSet,
    dec: &SlopeDecomposition,
    plan: &ClusterPlan,
    pair: &ClusterPair,
    t: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ClusterRecord, SlopesError> {
    let m = plan.m as usize;
    // Draws are consumed in fixed (i, j) order, so a seed pins the run.
    let mut picks = vec![vec![Rational::ZERO; m]; m];
    for (i, lower) in pair.lower.iter().enumerate() {
        let line = dec.lines.get(lower).expect("plan slopes come from the decomposition");
        for j in 0..m {
            picks[i][j] = line.elems()[rng.gen_range(0..line.len())].clone();
        }
    }
    // Collision counts over ordered index pairs.  Each index mixes one lower
    // and one upper slot, so the unordered pair {i, j} already determines
    // (i, j) and the two distinctness readings coincide: M^4 - M^2 events.
    let mut e_max = 0u64;
    let mut e_sum = 0u64;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    if i == k && j == l {
                        continue;
                    }
                    let lambda = [
                        pair.lower[i].clone(),
                        pair.upper[j].clone(),
                        pair.lower[k].clone(),
                        pair.upper[l].clone(),
                    ];
                    let e = incidence_count(
                        a,
                        &lambda,
                        &picks[i][j],
                        &picks[k][l],
                        &plan.reps[&pair.upper[j]],
                        &plan.reps[&pair.upper[l]],
                    )?;
                    e_max = e_max.max(e);
                    e_sum += e;
                }
            }
        }
    }
    let mut slopes = BTreeSet::new();
    for i in 0..m {
        for j in 0..m {
            let alpha_j = &plan.reps[&pair.upper[j]];
            for x in a.iter() {
                slopes.insert(sum_slope(&pair.lower[i], &picks[i][j], &pair.upper[j], alpha_j, x));
            }
        }
    }
    Ok(ClusterRecord {
        t,
        e_max,
        e_sum,
        r_q: slopes.len() as u64,
        within_threshold: Rational::from(e_max) <= plan.b,
    })
}

/// Run the pipeline end to end: decompose, select the dyadic bucket, choose
/// M, then, when M >= 2 and 2M <= |S_tau|, draw seeded line representatives
/// and record collision counts, distinct sum slopes, and the local-lemma
/// verdict for the first cluster (every cluster with `all_clusters`).  Thin
/// data degrades to the basic bound |A| * (|S_tau| - 1) and says why.
pub fn cluster_trace(
    a: &FiniteSet,
    c: &Rational,
    seed: u64,
    all_clusters: bool,
    budget: &Budget,
) -> Result<ClusterTrace, SlopesError> {
    if a.is_empty() {
        return Err(SlopesError::BadParameters { what: "cluster trace needs a nonempty set".to_owned() });
    }
    if !c.is_positive() {
        return Err(SlopesError::BadParameters { what: "constant c must be positive".to_owned() });
    }
    let dec = decompose(a, budget)?;
    let sel = dyadic_select(&dec);
    let n = a.len();
    let m = choose_m(&sel.tau, n as u64, c);
    let mut trace = ClusterTrace {
        input: a.digest("A"),
        n,
        total_mass: dec.total_mass,
        tau: sel.tau.clone(),
        s_tau: sel.s_tau.clone(),
        mass: sel.mass,
        basic_bound: (n as u64) * (sel.s_tau.len() as u64 - 1),
        m,
        degraded: None,
        seed,
        b: None,
        n_events: None,
        degree: None,
        p: None,
        lll_feasible: None,
        e_max: None,
        e_sum: None,
        r_q: None,
        cluster_bound: None,
        clusters: Vec::new(),
    };
    let plan = match cluster_plan(&dec, &sel, m) {
        Ok(plan) => plan,
        Err(SlopesError::BadParameters { what }) => {
            trace.degraded = Some(what);
            return Ok(trace);
        }
        Err(other) => return Err(other),
    };
    let p = collision_prob_bound(&sel.tau, n as u64, &plan.b, c);
    let degree = 2 * m * m;
    let n_events = m * m * m * m - m * m;
    trace.b = Some(plan.b.clone());
    trace.n_events = Some(n_events);
    trace.degree = Some(degree);
    trace.lll_feasible =
        Some(lll_feasible(&LLLParams { events: n_events, degree, prob: p.clone() }));
    trace.p = Some(p);
    let per_cluster = Rational::new((m * m * n as u64) as i64, 2).expect("denominator 2");
    trace.cluster_bound = Some(&per_cluster * &Rational::from(plan.clusters.len()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upto = if all_clusters { plan.clusters.len() } else { 1 };
    for (t, pair) in plan.clusters[..upto].iter().enumerate() {
        let record = run_cluster(a, &dec, &plan, pair, t + 1, &mut rng)?;
        trace.clusters.push(record);
    }
    trace.e_max = trace.clusters.first().map(|r| r.e_max);
    trace.e_sum = trace.clusters.first().map(|r| r.e_sum);
    trace.r_q = trace.clusters.first().map(|r| r.r_q);
    Ok(trace)
}
