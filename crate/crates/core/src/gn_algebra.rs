//! Exact exponent algebra for mixed-norm Gagliardo-Nirenberg inequalities.
//!
//! With `A = Σ1/pᵢ`, `Q = Σ1/qᵢ`, `R = Σ1/rᵢ`, an instance
//! `‖Λ^σ u‖_{p⃗} <= C ‖u‖_{q⃗}^θ ‖Λ^s u‖_{r⃗}^{1−θ}` is admissible iff
//!
//! * balance: `A − σ = θQ + (1−θ)(R − s)`,
//! * componentwise: `1/pᵢ <= θ/qᵢ + (1−θ)/rᵢ` for every `i`,
//! * range: `0 <= θ <= 1 − σ/s`.
//!
//! Everything here is rational; no floating point enters a verdict.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{format_rational, Exponent, ExponentVec, Rational};

pub(crate) mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        crate::exponent::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod opt_rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        r: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(*r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| crate::exponent::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

fn r(v: Rational) -> String {
    format_rational(v)
}

/// One instance `(n, σ, s, θ, p⃗, q⃗, r⃗)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnParams {
    pub n: usize,
    #[serde(with = "rational_str")]
    pub sigma: Rational,
    #[serde(with = "rational_str")]
    pub s: Rational,
    #[serde(with = "rational_str")]
    pub theta: Rational,
    pub p: ExponentVec,
    pub q: ExponentVec,
    pub r: ExponentVec,
}

fn check_shape(n: usize, sigma: Rational, s: Rational, tuples: [&ExponentVec; 3]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    for t in tuples {
        if t.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: t.len(),
            });
        }
    }
    if sigma < Rational::zero() {
        return Err(Error::InvalidArgument(format!("sigma = {} must be >= 0", r(sigma))));
    }
    if s <= Rational::zero() {
        return Err(Error::InvalidArgument(format!("s = {} must be > 0", r(s))));
    }
    Ok(())
}

impl GnParams {
    pub fn new(
        sigma: Rational,
        s: Rational,
        theta: Rational,
        p: ExponentVec,
        q: ExponentVec,
        r: ExponentVec,
    ) -> Result<Self> {
        let n = p.len();
        check_shape(n, sigma, s, [&p, &q, &r])?;
        if theta < Rational::zero() || theta > Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "theta = {} must lie in [0, 1]",
                format_rational(theta)
            )));
        }
        Ok(Self {
            n,
            sigma,
            s,
            theta,
            p,
            q,
            r,
        })
    }

    pub fn with_theta(&self, theta: Rational) -> Result<Self> {
        Self::new(
            self.sigma,
            self.s,
            theta,
            self.p.clone(),
            self.q.clone(),
            self.r.clone(),
        )
    }

    /// `δ = A − σ − θQ − (1−θ)(R − s)`; zero iff the balance clause holds.
    pub fn balance_defect(&self) -> Rational {
        let one = Rational::one();
        self.p.reciprocal_sum()
            - self.sigma
            - self.theta * self.q.reciprocal_sum()
            - (one - self.theta) * (self.r.reciprocal_sum() - self.s)
    }

    /// Upper end `1 − σ/s` of the θ range.
    pub fn theta_max(&self) -> Rational {
        Rational::one() - self.sigma / self.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityStatus {
    Admissible,
    Violated,
    OutOfTheoremRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "kebab-case")]
pub enum Clause {
    Balance {
        #[serde(with = "rational_str")]
        defect: Rational,
    },
    Componentwise {
        axes: Vec<usize>,
    },
    ThetaRange {
        #[serde(with = "rational_str")]
        theta_max: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub status: AdmissibilityStatus,
    /// Clauses that fail, in the order balance, componentwise, range.
    pub violated: Vec<Clause>,
    /// `θ = 1 − σ/s` with `σ > 0`: the boundary of the θ range.
    pub boundary: bool,
    /// Every exponent lies strictly between 1 and ∞.
    pub in_theorem_range: bool,
    #[serde(with = "rational_str")]
    pub balance_defect: Rational,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        self.violated.is_empty()
    }

    /// Only the balance clause fails.
    pub fn only_balance_violated(&self) -> bool {
        self.violated.len() == 1 && matches!(self.violated[0], Clause::Balance { .. })
    }

    pub fn label(&self) -> &'static str {
        match self.status {
            AdmissibilityStatus::Admissible if self.boundary => "boundary",
            AdmissibilityStatus::Admissible => "admissible",
            AdmissibilityStatus::Violated => "violated",
            AdmissibilityStatus::OutOfTheoremRange => "out-of-theorem-range",
        }
    }
}

/// Evaluates the three admissibility clauses exactly.
///
/// Tuples with an exponent equal to 1 or ∞ get status
/// `OutOfTheoremRange`; their clauses are still evaluated and reported.
pub fn check_admissible(params: &GnParams) -> Admissibility {
    let one = Rational::one();
    let th = params.theta;
    let mut violated = Vec::new();
    let defect = params.balance_defect();
    if !defect.is_zero() {
        violated.push(Clause::Balance { defect });
    }
    let axes: Vec<usize> = params
        .p
        .reciprocals()
        .iter()
        .zip(params.q.reciprocals())
        .zip(params.r.reciprocals())
        .enumerate()
        .filter(|(_, ((a, b), c))| **a > th * b + (one - th) * c)
        .map(|(i, _)| i + 1)
        .collect();
    if !axes.is_empty() {
        violated.push(Clause::Componentwise { axes });
    }
    let theta_max = params.theta_max();
    if th < Rational::zero() || th > theta_max {
        violated.push(Clause::ThetaRange { theta_max });
    }
    let in_theorem_range =
        params.p.strictly_inside() && params.q.strictly_inside() && params.r.strictly_inside();
    let status = if !in_theorem_range {
        AdmissibilityStatus::OutOfTheoremRange
    } else if violated.is_empty() {
        AdmissibilityStatus::Admissible
    } else {
        AdmissibilityStatus::Violated
    };
    Admissibility {
        status,
        violated,
        boundary: params.sigma > Rational::zero() && th == theta_max,
        in_theorem_range,
        balance_defect: defect,
    }
}

/// Solves the balance equation for θ and checks the full instance.
///
/// Fails with [`Error::DegenerateBalance`] when `Q = R − s`, in which case
/// either every θ or no θ balances.
pub fn solve_theta(
    sigma: Rational,
    s: Rational,
    p: &ExponentVec,
    q: &ExponentVec,
    r: &ExponentVec,
) -> Result<(GnParams, Admissibility)> {
    let (a, qs, rs) = (p.reciprocal_sum(), q.reciprocal_sum(), r.reciprocal_sum());
    let denom = qs - rs + s;
    if denom.is_zero() {
        return Err(Error::DegenerateBalance {
            any_theta: a - sigma == rs - s,
        });
    }
    check_shape(p.len(), sigma, s, [p, q, r])?;
    let theta = (a - sigma - rs + s) / denom;
    let params = GnParams {
        n: p.len(),
        sigma,
        s,
        theta,
        p: p.clone(),
        q: q.clone(),
        r: r.clone(),
    };
    let verdict = check_admissible(&params);
    Ok((params, verdict))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingExponents {
    /// `τⱼ = 1/pⱼ − θ/qⱼ − (1−θ)/rⱼ`.
    #[serde(serialize_with = "ser_rationals", deserialize_with = "de_rationals")]
    pub tau: Vec<Rational>,
    /// Lower end `σ − s(1−θ)` of the window; the upper end is 0.
    #[serde(with = "rational_str")]
    pub window_lower: Rational,
    /// Axes (1-based) whose `τⱼ` falls outside the window.
    pub outside_window: Vec<usize>,
    /// `Σ(−τⱼ)`.
    #[serde(with = "rational_str")]
    pub sum_neg_tau: Rational,
    /// `s(1−θ) − σ`, which equals `Σ(−τⱼ)` exactly when balance holds.
    #[serde(with = "rational_str")]
    pub expected_sum: Rational,
    pub sum_matches: bool,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| format_rational(*x)))
}

fn de_rationals<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<Rational>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|s| crate::exponent::parse_rational(s).map_err(serde::de::Error::custom))
        .collect()
}

pub fn scaling_exponents(params: &GnParams) -> ScalingExponents {
    let one = Rational::one();
    let th = params.theta;
    let tau: Vec<Rational> = params
        .p
        .reciprocals()
        .iter()
        .zip(params.q.reciprocals())
        .zip(params.r.reciprocals())
        .map(|((a, b), c)| a - th * b - (one - th) * c)
        .collect();
    let window_lower = params.sigma - params.s * (one - th);
    let outside_window = tau
        .iter()
        .enumerate()
        .filter(|(_, t)| **t < window_lower || **t > Rational::zero())
        .map(|(i, _)| i + 1)
        .collect();
    let sum_neg_tau: Rational = tau.iter().map(|t| -t).sum();
    let expected_sum = params.s * (one - th) - params.sigma;
    ScalingExponents {
        tau,
        window_lower,
        outside_window,
        sum_neg_tau,
        expected_sum,
        sum_matches: sum_neg_tau == expected_sum,
    }
}

/// Powers `(3/2 − Σ1/qᵢ, Σ1/qᵢ − 1/2)` of `‖∇u‖₂` and `‖u‖₂` bounding
/// `‖u‖_{L^{q⃗}(ℝ³)}`.
pub fn h1_embedding_exponents(q: &ExponentVec) -> Result<(Rational, Rational)> {
    if q.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: q.len(),
        });
    }
    let two = Rational::from_integer(2);
    for e in q.entries() {
        match e {
            Exponent::Finite(v) if *v >= two => {}
            _ => {
                return Err(Error::OutOfRange(format!(
                    "entry {e} must lie in [2, ∞)"
                )))
            }
        }
    }
    let sum = q.reciprocal_sum();
    let half = Rational::new(1, 2);
    let three_halves = Rational::new(3, 2);
    if sum < half || sum > three_halves {
        return Err(Error::OutOfRange(format!(
            "Σ1/qᵢ = {} outside [1/2, 3/2]",
            format_rational(sum)
        )));
    }
    Ok((three_halves - sum, sum - half))
}

/// The same bound as a full instance: `σ = 0`, `s = 1`, `p⃗ = q⃗`,
/// `q⃗ = r⃗ = (2,2,2)`, `θ = Σ1/qᵢ − 1/2`.
pub fn h1_embedding_params(q: &ExponentVec) -> Result<GnParams> {
    let (_, u_power) = h1_embedding_exponents(q)?;
    let two = ExponentVec::ints(&[2, 2, 2]);
    GnParams::new(
        Rational::zero(),
        Rational::one(),
        u_power,
        q.clone(),
        two.clone(),
        two,
    )
}

/// Subcase labels of the Besov case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    I11,
    I12,
    I13,
    I14,
    I15,
    I21,
    I22,
    I23,
    I31,
    I32,
    I33,
    I34,
    I35,
    Case2,
    Case3,
}

impl CaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::I11 => "I11",
            CaseTag::I12 => "I12",
            CaseTag::I13 => "I13",
            CaseTag::I14 => "I14",
            CaseTag::I15 => "I15",
            CaseTag::I21 => "I21",
            CaseTag::I22 => "I22",
            CaseTag::I23 => "I23",
            CaseTag::I31 => "I31",
            CaseTag::I32 => "I32",
            CaseTag::I33 => "I33",
            CaseTag::I34 => "I34",
            CaseTag::I35 => "I35",
            CaseTag::Case2 => "Case2",
            CaseTag::Case3 => "Case3",
        }
    }
}

/// Besov instance: Theorem-style parameters plus the optional `α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BesovGnParams {
    pub base: GnParams,
    #[serde(with = "opt_rational_str", default)]
    pub alpha: Option<Rational>,
}

impl BesovGnParams {
    pub fn new(base: GnParams, alpha: Option<Rational>) -> Self {
        Self { base, alpha }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CaseStatus {
    /// Hypotheses hold and the subcase is one the proof covers.
    Valid,
    /// The ordering of the sums cannot coexist with the hypotheses.
    Contradiction { identity: String },
    /// `s = Σ(1/rᵢ − 1/qᵢ)`, excluded by hypothesis.
    Excluded,
    /// A hypothesis other than the ordering fails.
    Inconsistent { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlphaStatus {
    Required {
        #[serde(with = "rational_str")]
        alpha: Rational,
    },
    RequiredUnsolvable,
    NotRequired,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseVerdict {
    pub tag: CaseTag,
    #[serde(flatten)]
    pub status: CaseStatus,
    pub alpha: AlphaStatus,
    /// The subcase argument is only sketched in the source; classified by symmetry.
    pub underspecified: bool,
}

impl CaseVerdict {
    pub fn is_valid(&self) -> bool {
        self.status == CaseStatus::Valid
    }
}

/// Exact `α` with `1/p⃗ = α/q⃗ + (1−α)/r⃗`, if one exists in `[0, 1]`.
pub fn solve_alpha(p: &ExponentVec, q: &ExponentVec, r: &ExponentVec) -> Option<Rational> {
    let mut alpha: Option<Rational> = None;
    for ((a, b), c) in p.reciprocals().iter().zip(q.reciprocals()).zip(r.reciprocals()) {
        if b == c {
            if *a != b {
                return None;
            }
            continue;
        }
        let cand = (a - c) / (b - c);
        match alpha {
            Some(prev) if prev != cand => return None,
            _ => alpha = Some(cand),
        }
    }
    let alpha = alpha.unwrap_or_else(Rational::zero);
    (alpha >= Rational::zero() && alpha <= Rational::one()).then_some(alpha)
}

/// Places an instance in the case analysis and checks its hypotheses.
pub fn classify_besov_case(params: &BesovGnParams) -> CaseVerdict {
    let b = &params.base;
    let (a, q, r) = (b.p.reciprocal_sum(), b.q.reciprocal_sum(), b.r.reciprocal_sum());
    let (sigma, s, theta) = (b.sigma, b.s, b.theta);
    let d1 = q + sigma - a;
    let d2 = s - sigma + a - r;
    let region = (q.min(r) < a && a < q.max(r)) || (a == r && r < q);

    let alpha_status = if region {
        match solve_alpha(&b.p, &b.q, &b.r) {
            Some(alpha) => AlphaStatus::Required { alpha },
            None => AlphaStatus::RequiredUnsolvable,
        }
    } else {
        AlphaStatus::NotRequired
    };
    let verdict = |tag, status| CaseVerdict {
        tag,
        status,
        alpha: alpha_status.clone(),
        underspecified: tag == CaseTag::I23,
    };

    if d1.is_zero() && d2.is_zero() {
        return verdict(CaseTag::Case3, CaseStatus::Excluded);
    }
    if d1.is_zero() || d2.is_zero() || d1.signum() != d2.signum() {
        let tag = if d1 < Rational::zero() {
            CaseTag::Case2
        } else if d1.is_zero() {
            CaseTag::Case3
        } else {
            case1_tag(a, q, r)
        };
        return verdict(
            tag,
            CaseStatus::Inconsistent {
                reason: format!(
                    "Q + σ − A = {} and s − σ + A − R = {} differ in sign, so balance fails",
                    format_rational(d1),
                    format_rational(d2)
                ),
            },
        );
    }

    let tag = if d1 < Rational::zero() {
        CaseTag::Case2
    } else {
        case1_tag(a, q, r)
    };
    let contradiction = matches!(
        tag,
        CaseTag::I11 | CaseTag::I13 | CaseTag::I14 | CaseTag::I15 | CaseTag::I22 | CaseTag::I23
    );
    if contradiction {
        let identity = format!(
            "balance gives A = θQ + (1−θ)R − ((1−θ)s − σ) < max(Q, R) since θ < 1 − σ/s, \
             but A = {}, Q = {}, R = {}",
            format_rational(a),
            format_rational(q),
            format_rational(r)
        );
        return verdict(tag, CaseStatus::Contradiction { identity });
    }

    let mut reasons = Vec::new();
    if !b.balance_defect().is_zero() {
        reasons.push(format!("balance defect {}", format_rational(b.balance_defect())));
    }
    if sigma >= s {
        reasons.push("requires σ < s".to_string());
    }
    if !(theta > Rational::zero() && theta < b.theta_max()) {
        reasons.push(format!(
            "requires 0 < θ < 1 − σ/s = {}",
            format_rational(b.theta_max())
        ));
    }
    if s == r - q {
        reasons.push("requires s ≠ Σ(1/rᵢ − 1/qᵢ)".to_string());
    }
    match (&alpha_status, params.alpha) {
        (AlphaStatus::RequiredUnsolvable, _) => {
            reasons.push("no α in [0, 1] with 1/p⃗ = α/q⃗ + (1−α)/r⃗".to_string())
        }
        (AlphaStatus::Required { alpha }, Some(given)) if *alpha != given => reasons.push(format!(
            "given α = {} but 1/p⃗ = α/q⃗ + (1−α)/r⃗ needs α = {}",
            format_rational(given),
            format_rational(*alpha)
        )),
        _ => {}
    }
    if reasons.is_empty() {
        verdict(tag, CaseStatus::Valid)
    } else {
        verdict(
            tag,
            CaseStatus::Inconsistent {
                reason: reasons.join("; "),
            },
        )
    }
}

fn case1_tag(a: Rational, q: Rational, r: Rational) -> CaseTag {
    use std::cmp::Ordering::*;
    match (r.cmp(&a), q.cmp(&a), q.cmp(&r)) {
        (Less, Equal, _) => CaseTag::I11,
        (Less, Greater, _) => CaseTag::I12,
        (Less, Less, Greater) => CaseTag::I13,
        (Less, Less, Equal) => CaseTag::I14,
        (Less, Less, Less) => CaseTag::I15,
        (Equal, Greater, _) => CaseTag::I21,
        (Equal, Equal, _) => CaseTag::I22,
        (Equal, Less, _) => CaseTag::I23,
        (Greater, _, Equal) => CaseTag::I31,
        (Greater, Greater, Greater) => CaseTag::I32,
        (Greater, Greater, _) => CaseTag::I33,
        (Greater, Equal, _) => CaseTag::I34,
        (Greater, Less, _) => CaseTag::I35,
    }
}

/// Energy-equality criteria in mixed norms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NsCriterionVerdict {
    pub kind: u8,
    /// Time exponent, given or solved from the criterion's relation.
    pub p: Option<Exponent>,
    pub q: ExponentVec,
    pub admissible: bool,
    pub failures: Vec<String>,
    /// Kind 1 only: exponents `(2p/(p−1), 2qᵢ/(qᵢ−1))` required of `v`.
    pub dual_time: Option<Exponent>,
    pub dual_space: Option<ExponentVec>,
    /// Set when the tuple has two entries; `Σ1/qᵢ` then enters the
    /// relations as `(3/2)Σ1/qᵢ`, the sum of the isotropic 3D extension.
    pub planar_analogue: bool,
}

/// Checks criterion `kind ∈ 1..=4` for `(p, q⃗)`; for kinds 2–4 a missing `p`
/// is solved from the criterion's relation.
///
/// The relations are `1/p + Σ1/qᵢ = 1` (2), `= 2` (3) and
/// `1/p + (2/5)Σ1/qᵢ = 1` (4); kind 1 only needs `1 < p, qᵢ <= ∞`.
/// Two-entry tuples use `(3/2)Σ1/qᵢ` in place of the sum.
pub fn ns_criteria_check(
    kind: u8,
    p: Option<Exponent>,
    q: &ExponentVec,
) -> Result<NsCriterionVerdict> {
    if !(1..=4).contains(&kind) {
        return Err(Error::InvalidArgument(format!("criterion kind {kind} not in 1..=4")));
    }
    if !(q.len() == 2 || q.len() == 3) {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: q.len(),
        });
    }
    let one = Rational::one();
    let sum = if q.len() == 2 {
        Rational::new(3, 2) * q.reciprocal_sum()
    } else {
        q.reciprocal_sum()
    };
    let mut failures = Vec::new();
    let above_one = |e: &Exponent| match e {
        Exponent::Finite(v) => *v > one,
        Exponent::Infinite => true,
    };

    let (coef, target, sum_cap, q_cap) = match kind {
        2 => (one, one, Some(one), Some(Rational::from_integer(4))),
        3 => (
            one,
            Rational::from_integer(2),
            Some(Rational::from_integer(2)),
            Some(Rational::new(9, 5)),
        ),
        4 => (
            Rational::new(2, 5),
            one,
            Some(Rational::new(5, 3)),
            Some(Rational::from_integer(3)),
        ),
        _ => (one, one, None, None),
    };

    let p = if kind == 1 {
        match p {
            Some(p) => Some(p),
            None => {
                return Err(Error::InvalidArgument(
                    "criterion 1 needs an explicit time exponent".into(),
                ))
            }
        }
    } else {
        let recip = target - coef * sum;
        match p {
            Some(p) => {
                if p.reciprocal() != recip {
                    failures.push(format!(
                        "relation needs 1/p = {} but 1/p = {}",
                        format_rational(recip),
                        format_rational(p.reciprocal())
                    ));
                }
                Some(p)
            }
            None if recip < Rational::zero() || recip > one => {
                failures.push(format!(
                    "relation gives 1/p = {}, outside [0, 1]",
                    format_rational(recip)
                ));
                None
            }
            None => Some(Exponent::from_reciprocal(recip)?),
        }
    };

    for (i, e) in q.entries().iter().enumerate() {
        if !above_one(e) {
            failures.push(format!("q{} = {e} must exceed 1", i + 1));
        }
        if let Some(cap) = q_cap {
            let ok = matches!(e, Exponent::Finite(v) if *v <= cap);
            if !ok {
                failures.push(format!("q{} = {e} exceeds {}", i + 1, format_rational(cap)));
            }
        }
    }
    if let Some(cap) = sum_cap {
        if sum > cap {
            failures.push(format!(
                "Σ1/qᵢ = {} exceeds {}",
                format_rational(sum),
                format_rational(cap)
            ));
        }
    }
    if let Some(p) = &p {
        if !above_one(p) {
            failures.push(format!("p = {p} must exceed 1"));
        }
    }

    let (dual_time, dual_space) = if kind == 1 {
        let half = Rational::new(1, 2);
        let dual = |e: &Exponent| Exponent::from_reciprocal((one - e.reciprocal()) * half);
        let dt = p.as_ref().map(dual).transpose()?;
        let ds = ExponentVec::new(q.entries().iter().map(dual).collect::<Result<_>>()?)?;
        (dt, Some(ds))
    } else {
        (None, None)
    };

    Ok(NsCriterionVerdict {
        kind,
        p,
        q: q.clone(),
        admissible: failures.is_empty(),
        failures,
        dual_time,
        dual_space,
        planar_analogue: q.len() == 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(s: &str) -> ExponentVec {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn balanced_instance() -> (ExponentVec, ExponentVec, ExponentVec) {
        (ev("4,6"), ev("2,4"), ev("2,3"))
    }

    #[test]
    fn remark_instance_theta() {
        let (p, qq, r) = balanced_instance();
        let (params, verdict) = solve_theta(q(0, 1), q(1, 1), &p, &qq, &r).unwrap();
        assert_eq!(params.theta, q(7, 11));
        assert_eq!(verdict.status, AdmissibilityStatus::Admissible);
        assert_eq!(verdict.label(), "admissible");
    }

    #[test]
    fn remark_instance_half_breaks_balance_only() {
        let (p, qq, r) = balanced_instance();
        let params = GnParams::new(q(0, 1), q(1, 1), q(1, 2), p, qq, r).unwrap();
        let v = check_admissible(&params);
        assert_eq!(v.status, AdmissibilityStatus::Violated);
        assert!(v.only_balance_violated());
        assert_eq!(v.balance_defect, q(7, 12) - q(11, 24));
    }

    #[test]
    fn identity_instance() {
        let p = ev("3,5");
        let params = GnParams::new(q(0, 1), q(2, 1), q(1, 1), p.clone(), p, ev("7,3/2")).unwrap();
        assert!(check_admissible(&params).is_admissible());
        let sc = scaling_exponents(&params);
        assert!(sc.tau.iter().all(|t| t.is_zero()));
    }

    #[test]
    fn sobolev_theta_zero() {
        let (params, v) = solve_theta(q(0, 1), q(1, 1), &ev("6,6,6"), &ev("2,2,2"), &ev("2,2,2")).unwrap();
        assert_eq!(params.theta, q(0, 1));
        assert!(v.is_admissible());
    }

    #[test]
    fn degenerate_balance() {
        let p = ev("2,2");
        let e = solve_theta(q(0, 1), q(0, 1), &p, &p, &p).unwrap_err();
        assert!(matches!(e, Error::DegenerateBalance { any_theta: true }));
        let e = solve_theta(q(0, 1), q(0, 1), &ev("4,4"), &p, &p).unwrap_err();
        assert!(matches!(e, Error::DegenerateBalance { any_theta: false }));
    }

    #[test]
    fn out_of_range_and_boundary_flags() {
        let params = GnParams::new(q(0, 1), q(1, 1), q(1, 1), ev("inf,2"), ev("inf,2"), ev("2,2")).unwrap();
        let v = check_admissible(&params);
        assert_eq!(v.status, AdmissibilityStatus::OutOfTheoremRange);
        assert!(v.violated.is_empty());

        // σ = 1/2, s = 1, θ = 1/2 = 1 − σ/s
        let (params, v) = solve_theta(q(1, 2), q(1, 1), &ev("2,2"), &ev("2,2"), &ev("2,2")).unwrap();
        assert_eq!(params.theta, q(1, 2));
        assert!(v.boundary);
        assert_eq!(v.label(), "boundary");
    }

    #[test]
    fn scaling_window_for_remark_instance() {
        let (p, qq, r) = balanced_instance();
        let params = GnParams::new(q(0, 1), q(1, 1), q(7, 11), p, qq, r).unwrap();
        let sc = scaling_exponents(&params);
        assert_eq!(sc.tau, vec![q(-1, 4), q(-5, 44)]);
        assert!(sc.outside_window.is_empty());
        assert!(sc.sum_matches);
        assert_eq!(sc.sum_neg_tau, q(4, 11));

        let broken = params.with_theta(q(1, 2)).unwrap();
        assert!(!scaling_exponents(&broken).sum_matches);
    }

    #[test]
    fn componentwise_violation_has_positive_tau() {
        let params = GnParams::new(q(0, 1), q(1, 1), q(1, 2), ev("4,4"), ev("8,8/7"), ev("8,8/7")).unwrap();
        let v = check_admissible(&params);
        assert_eq!(v.violated, vec![Clause::Componentwise { axes: vec![1] }]);
        let sc = scaling_exponents(&params);
        assert_eq!(sc.tau, vec![q(1, 8), q(-5, 8)]);
        assert_eq!(sc.outside_window, vec![1, 2]);
        assert!(sc.sum_matches);
    }

    #[test]
    fn h1_embedding_powers() {
        assert_eq!(h1_embedding_exponents(&ev("2,2,2")).unwrap(), (q(0, 1), q(1, 1)));
        assert_eq!(h1_embedding_exponents(&ev("6,6,6")).unwrap(), (q(1, 1), q(0, 1)));
        assert_eq!(h1_embedding_exponents(&ev("2,4,4")).unwrap(), (q(1, 2), q(1, 2)));
        assert!(h1_embedding_exponents(&ev("1,4,4")).is_err());
        assert!(h1_embedding_exponents(&ev("inf,4,4")).is_err());
        assert!(h1_embedding_exponents(&ev("8,8,8")).is_err());
        assert!(h1_embedding_exponents(&ev("2,2")).is_err());
        for fam in ["2,2,2", "2,4,4", "6,6,6", "4,6,12"] {
            let params = h1_embedding_params(&ev(fam)).unwrap();
            assert!(check_admissible(&params).is_admissible(), "{fam}");
        }
    }

    fn besov(sigma: Rational, s: Rational, theta: Rational, p: &str, qq: &str, r: &str) -> BesovGnParams {
        BesovGnParams::new(GnParams::new(sigma, s, theta, ev(p), ev(qq), ev(r)).unwrap(), None)
    }

    #[test]
    fn besov_valid_instances() {
        let i12 = classify_besov_case(&besov(q(0, 1), q(1, 1), q(19, 22), "8/3,16/3", "2,4", "4,8"));
        assert_eq!(i12.tag, CaseTag::I12);
        assert!(i12.is_valid());
        assert_eq!(i12.alpha, AlphaStatus::Required { alpha: q(1, 2) });

        let i31 = classify_besov_case(&besov(q(1, 4), q(1, 1), q(1, 2), "8/3,8/3", "2,2", "4,4/3"));
        assert_eq!(i31.tag, CaseTag::I31);
        assert!(i31.is_valid());
        assert_eq!(i31.alpha, AlphaStatus::NotRequired);

        let c2 = classify_besov_case(&besov(q(0, 1), q(1, 2), q(1, 2), "16/7,16/5", "4,4", "1,2"));
        assert_eq!(c2.tag, CaseTag::Case2);
        assert!(c2.is_valid());
        assert_eq!(c2.alpha, AlphaStatus::Required { alpha: q(3, 4) });
    }

    #[test]
    fn besov_contradiction_and_exclusion() {
        let i22 = classify_besov_case(&besov(q(1, 2), q(1, 1), q(1, 4), "2,2", "2,2", "2,2"));
        assert_eq!(i22.tag, CaseTag::I22);
        assert!(matches!(i22.status, CaseStatus::Contradiction { .. }));

        let c3 = classify_besov_case(&besov(q(0, 1), q(1, 1), q(1, 2), "4,4", "4,4", "1,2"));
        assert_eq!(c3.tag, CaseTag::Case3);
        assert_eq!(c3.status, CaseStatus::Excluded);
    }

    #[test]
    fn besov_inconsistent_alpha_and_i23_flag() {
        let mut bad = besov(q(0, 1), q(1, 1), q(19, 22), "8/3,16/3", "2,4", "4,8");
        bad.alpha = Some(q(1, 3));
        assert!(matches!(classify_besov_case(&bad).status, CaseStatus::Inconsistent { .. }));

        // Q = 1/4 < R = A = 1/2 with d1 = Q + σ − A > 0 needs σ > 1/4
        let i23 = classify_besov_case(&besov(q(1, 2), q(2, 1), q(1, 2), "4,4", "8,8", "4,4"));
        assert_eq!(i23.tag, CaseTag::I23);
        assert!(i23.underspecified);
        assert!(matches!(i23.status, CaseStatus::Contradiction { .. }));
    }

    #[test]
    fn case1_ordering_table() {
        let t = |a, qq, r| case1_tag(q(a, 12), q(qq, 12), q(r, 12));
        assert_eq!(t(6, 6, 3), CaseTag::I11);
        assert_eq!(t(6, 9, 3), CaseTag::I12);
        assert_eq!(t(6, 4, 3), CaseTag::I13);
        assert_eq!(t(6, 3, 3), CaseTag::I14);
        assert_eq!(t(6, 2, 3), CaseTag::I15);
        assert_eq!(t(6, 9, 6), CaseTag::I21);
        assert_eq!(t(6, 6, 6), CaseTag::I22);
        assert_eq!(t(6, 3, 6), CaseTag::I23);
        assert_eq!(t(6, 9, 9), CaseTag::I31);
        assert_eq!(t(6, 10, 9), CaseTag::I32);
        assert_eq!(t(6, 8, 9), CaseTag::I33);
        assert_eq!(t(6, 6, 9), CaseTag::I34);
        assert_eq!(t(6, 4, 9), CaseTag::I35);
    }

    #[test]
    fn ns_criteria_examples() {
        let k3 = ns_criteria_check(3, None, &ev("9/5,9/5,9/5")).unwrap();
        assert_eq!(k3.p, Some(Exponent::int(3)));
        assert!(k3.admissible);

        let k2 = ns_criteria_check(2, None, &ev("4,4,4")).unwrap();
        assert_eq!(k2.p, Some(Exponent::int(4)));
        assert!(k2.admissible);

        let k2b = ns_criteria_check(2, None, &ev("2,8,8")).unwrap();
        assert_eq!(k2b.p, Some(Exponent::int(4)));
        assert!(!k2b.admissible, "q = 8 exceeds the cap of 4");

        let k1 = ns_criteria_check(1, Some(Exponent::int(2)), &ev("2,2")).unwrap();
        assert!(k1.admissible && k1.planar_analogue);
        assert_eq!(k1.dual_time, Some(Exponent::int(4)));
        assert_eq!(k1.dual_space, Some(ev("4,4")));
        let k1inf = ns_criteria_check(1, Some(Exponent::Infinite), &ev("inf,2,2")).unwrap();
        assert_eq!(k1inf.dual_time, Some(Exponent::int(2)));

        let wrong = ns_criteria_check(2, Some(Exponent::int(3)), &ev("4,4,4")).unwrap();
        assert!(!wrong.admissible);
        let k4 = ns_criteria_check(4, None, &ev("3,3,3")).unwrap();
        assert_eq!(k4.p, Some(Exponent::ratio(5, 3)));
        assert!(k4.admissible);
        assert!(ns_criteria_check(5, None, &ev("2,2,2")).is_err());

        let planar = ns_criteria_check(2, Some(Exponent::int(4)), &ev("4,4")).unwrap();
        assert!(planar.admissible && planar.planar_analogue);
        let planar3 = ns_criteria_check(3, None, &ev("9/5,9/5")).unwrap();
        assert_eq!(planar3.p, Some(Exponent::int(3)));
        assert!(ns_criteria_check(1, None, &ev("2,2,2")).is_err());
    }

    #[test]
    fn json_shape() {
        let (p, qq, r) = balanced_instance();
        let (params, v) = solve_theta(q(0, 1), q(1, 1), &p, &qq, &r).unwrap();
        let j = serde_json::to_value(&params).unwrap();
        assert_eq!(j["theta"], "7/11");
        assert_eq!(j["p"], serde_json::json!(["4", "6"]));
        let back: GnParams = serde_json::from_value(j).unwrap();
        assert_eq!(back, params);
        let jv = serde_json::to_value(&v).unwrap();
        assert_eq!(jv["status"], "admissible");
    }

    fn recip() -> impl Strategy<Value = Rational> {
        (0i64..=12).prop_map(|k| Rational::new(k, 12))
    }

    proptest! {
        #[test]
        fn solve_then_check_round_trip(
            a in prop::collection::vec(recip(), 2),
            b in prop::collection::vec(recip(), 2),
            c in prop::collection::vec(recip(), 2),
            sigma in 0i64..3,
            s in 1i64..4,
        ) {
            let p = ExponentVec::from_reciprocals(&a).unwrap();
            let qq = ExponentVec::from_reciprocals(&b).unwrap();
            let r = ExponentVec::from_reciprocals(&c).unwrap();
            let (sigma, s) = (Rational::new(sigma, 2), Rational::from_integer(s));
            if let Ok((params, v)) = solve_theta(sigma, s, &p, &qq, &r) {
                prop_assert!(params.balance_defect().is_zero());
                if v.is_admissible() {
                    prop_assert!(check_admissible(&params).is_admissible());
                    let sc = scaling_exponents(&params);
                    prop_assert!(sc.sum_matches);
                    prop_assert_eq!(sc.sum_neg_tau, s * (Rational::one() - params.theta) - sigma);
                }
            }
        }

        #[test]
        fn classifier_is_total(
            a in prop::collection::vec(recip(), 2),
            b in prop::collection::vec(recip(), 2),
            c in prop::collection::vec(recip(), 2),
            th in 1i64..12,
        ) {
            let p = ExponentVec::from_reciprocals(&a).unwrap();
            let qq = ExponentVec::from_reciprocals(&b).unwrap();
            let r = ExponentVec::from_reciprocals(&c).unwrap();
            let params = GnParams::new(Rational::zero(), Rational::one(), Rational::new(th, 12), p, qq, r).unwrap();
            let v = classify_besov_case(&BesovGnParams::new(params, None));
            if v.is_valid() {
                prop_assert!(!matches!(v.tag, CaseTag::I11 | CaseTag::I13 | CaseTag::I14 | CaseTag::I15 | CaseTag::I22 | CaseTag::I23 | CaseTag::Case3));
            }
        }
    }
}
