//! Empirical sweeps: GN ratios under dilation, family maxima, Bernstein
//! slopes and Besov-form GN ratios.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{rational_to_f64, ExponentVec};
use crate::families::FunctionFamily;
use crate::field::{GridSpec, RealField, SpectralField};
use crate::gn_algebra::{classify_besov_case, BesovGnParams, CaseStatus, GnParams};
use crate::littlewood_paley::{besov_norm, DyadicPartition};
use crate::mixed_norm::mixed_lebesgue_norm;
use crate::report::{AxisScale, SweepPoint, SweepReport, SweepVerdict, GROWTH_SLOPE, MIN_R_SQUARED};
use crate::spectral::{fractional_laplacian_spectral, multiindices, partial_derivative_spectral};

/// Allowed relative change of a family maximum under refinement.
pub const STABILITY_TOL: f64 = 0.10;
/// Smallest family accepted by the boundedness sweeps.
pub const MIN_FAMILY: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnEvaluation {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

fn spectral_norm(spec: &SpectralField, s: f64, p: &ExponentVec) -> Result<f64> {
    if s == 0.0 {
        mixed_lebesgue_norm(&spec.inverse(), p)
    } else {
        mixed_lebesgue_norm(&fractional_laplacian_spectral(spec, s)?.inverse(), p)
    }
}

/// `‖Λ^σ u‖_{p⃗}` and `‖u‖_{q⃗}^θ ‖Λ^s u‖_{r⃗}^{1−θ}`.
pub fn gn_terms(u: &RealField, params: &GnParams) -> Result<GnEvaluation> {
    if u.grid().dim() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            actual: u.grid().dim(),
        });
    }
    let spec = u.forward();
    let sigma = rational_to_f64(params.sigma);
    let s = rational_to_f64(params.s);
    let theta = rational_to_f64(params.theta);
    let lhs = spectral_norm(&spec, sigma, &params.p)?;
    let uq = if theta > 0.0 {
        mixed_lebesgue_norm(u, &params.q)?
    } else {
        1.0
    };
    let ur = if theta < 1.0 {
        spectral_norm(&spec, s, &params.r)?
    } else {
        1.0
    };
    if uq == 0.0 || ur == 0.0 {
        return Err(Error::UndefinedRatio(format!(
            "zero denominator: ‖u‖_q = {uq}, ‖Λ^s u‖_r = {ur}"
        )));
    }
    let rhs = uq.powf(theta) * ur.powf(1.0 - theta);
    Ok(GnEvaluation {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// `R(u) = ‖Λ^σ u‖_{p⃗} / (‖u‖_{q⃗}^θ ‖Λ^s u‖_{r⃗}^{1−θ})`.
pub fn gn_ratio(u: &RealField, params: &GnParams) -> Result<f64> {
    gn_terms(u, params).map(|e| e.ratio)
}

/// Isotropic slope `δ = Σ1/pᵢ − σ − θΣ1/qᵢ − (1−θ)(Σ1/rᵢ − s)` of
/// `log R(u_λ)` against `log λ`, where `u_λ(x) = u(x/λ)`.
pub fn predicted_isotropic_slope(params: &GnParams) -> f64 {
    rational_to_f64(params.balance_defect())
}

fn lambda_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("lambda_{i}")).collect()
}

/// Evaluates `R(u_λ)`, `u_λ(x) = u(x₁/λ₁, …, xₙ/λₙ)`, for each `λ⃗`.
///
/// The dilation only rescales the grid periods, so every point uses the
/// same samples. The fitted log-log slope decides the verdict; pass the
/// analytically expected slope to require agreement with it.
pub fn dilation_sweep(
    u: &RealField,
    params: &GnParams,
    lambdas: &[Vec<f64>],
    predicted_slope: Option<f64>,
) -> Result<SweepReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("empty lambda list".into()));
    }
    let n = u.grid().dim();
    for l in lambdas {
        if l.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: l.len(),
            });
        }
        if l.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("dilation {l:?} must be positive")));
        }
    }
    let points = lambdas
        .par_iter()
        .map(|l| {
            let e = gn_terms(&u.stretched(l)?, params)?;
            Ok(SweepPoint::new(l.clone(), e.lhs, e.rhs))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SweepReport::new(
        "GN dilation sweep",
        serde_json::to_value(params)?,
        lambda_names(n),
        AxisScale::Log,
        points,
    )?;
    report.predicted_slope = predicted_slope;
    report.fit_log_log()?;
    report.classify_slope();
    Ok(report)
}

/// Isotropic dilations `2^k`, `k ∈ k_min..=k_max`, in dimension `n`.
pub fn isotropic_lambdas(n: usize, k_min: i32, k_max: i32) -> Vec<Vec<f64>> {
    (k_min..=k_max).map(|k| vec![2f64.powi(k); n]).collect()
}

/// Dilations `2^k` of a single axis, the others fixed at 1.
pub fn axis_lambdas(n: usize, axis: usize, k_min: i32, k_max: i32) -> Vec<Vec<f64>> {
    (k_min..=k_max)
        .map(|k| {
            let mut l = vec![1.0; n];
            l[axis] = 2f64.powi(k);
            l
        })
        .collect()
}

fn max_ratio(points: &[SweepPoint]) -> f64 {
    points.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max)
}

/// Runs `eval` over `count` members on `grid`, then over `2·count` members
/// on the refined grid, and judges boundedness by the stability of the max.
fn refinement_study(
    label: &str,
    params: serde_json::Value,
    grid: &GridSpec,
    count: usize,
    eval: impl Fn(&GridSpec, usize) -> Result<(f64, f64)> + Sync,
) -> Result<SweepReport> {
    if count < MIN_FAMILY {
        return Err(Error::InvalidArgument(format!(
            "family of {count} members; at least {MIN_FAMILY} needed"
        )));
    }
    let fine = grid.refined(2)?;
    let run = |g: &GridSpec, count: usize| -> Result<Vec<SweepPoint>> {
        let size = g.sizes()[0] as f64;
        (0..count)
            .into_par_iter()
            .map(|i| {
                let (lhs, rhs) = eval(g, i)?;
                if !(rhs > 0.0) {
                    return Err(Error::UndefinedRatio(format!("member {i} has zero denominator")));
                }
                Ok(SweepPoint::new(vec![i as f64, size], lhs, rhs))
            })
            .collect()
    };
    let base = run(grid, count)?;
    let refined = run(&fine, 2 * count)?;
    let (m0, m1) = (max_ratio(&base), max_ratio(&refined));
    let change = (m1 / m0 - 1.0).abs();
    let mut points = base;
    points.extend(refined);
    let mut report = SweepReport::new(
        label,
        params,
        vec!["member".into(), "size".into()],
        AxisScale::Linear,
        points,
    )?;
    report.refinement_change = Some(change);
    report.verdict = if m0.is_finite() && m1.is_finite() && change <= STABILITY_TOL {
        SweepVerdict::Bounded
    } else {
        SweepVerdict::Inconclusive
    };
    report.notes.push(format!(
        "max ratio {m0:.6e} over {count} members at {:?}; {m1:.6e} over {} members at {:?}",
        grid.sizes(),
        2 * count,
        fine.sizes()
    ));
    Ok(report)
}

/// Maximum of `R(u)` over `count` family members, repeated with doubled
/// count and resolution; bounded when the maximum moves by at most
/// [`STABILITY_TOL`].
pub fn family_boundedness(
    params: &GnParams,
    family: &FunctionFamily,
    grid: &GridSpec,
    count: usize,
) -> Result<SweepReport> {
    let json = serde_json::json!({ "params": params, "family": family });
    let mut report = refinement_study("GN family boundedness", json, grid, count, |g, i| {
        let e = gn_terms(&family.member(g, i)?, params)?;
        Ok((e.lhs, e.rhs))
    })?;
    report.seed = family.seed();
    Ok(report)
}

/// Largest `‖∂^α u‖_{q⃗}` over `|α| = k`.
pub fn derivative_sup(u: &RealField, k: u32, q: &ExponentVec) -> Result<f64> {
    let spec = u.forward();
    let mut best: f64 = 0.0;
    for alpha in multiindices(u.grid().dim(), k) {
        let d = partial_derivative_spectral(&spec, &alpha)?.inverse();
        best = best.max(mixed_lebesgue_norm(&d, q)?);
    }
    Ok(best)
}

fn check_bernstein_inputs(lambdas: &[f64], family: &FunctionFamily, count: usize) -> Result<()> {
    if lambdas.len() < 2 {
        return Err(Error::InvalidArgument("at least two lambdas needed".into()));
    }
    if lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidArgument("lambdas must be positive".into()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    family.with_radius(1.0)?;
    Ok(())
}

fn radius_of(family: &FunctionFamily) -> f64 {
    match family {
        FunctionFamily::BallCluster { radius, .. } | FunctionFamily::AnnulusCluster { radius, .. } => {
            *radius
        }
        _ => unreachable!("checked by with_radius"),
    }
}

/// Per `λ`, the extreme values over the family of
/// `sup_{|α|=k} ‖∂^α u‖_{q⃗} / ‖u‖_{p⃗}` with spectrum in radius `λ·R`.
fn bernstein_points(
    k: u32,
    p: &ExponentVec,
    q: &ExponentVec,
    lambdas: &[f64],
    family: &FunctionFamily,
    grid: &GridSpec,
    count: usize,
) -> Result<Vec<(SweepPoint, SweepPoint)>> {
    let base = radius_of(family);
    lambdas
        .iter()
        .map(|&l| {
            let fam = family.with_radius(base * l)?;
            let vals = (0..count)
                .into_par_iter()
                .map(|i| {
                    let u = fam.member(grid, i)?;
                    Ok((derivative_sup(&u, k, q)?, mixed_lebesgue_norm(&u, p)?))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            let ratio = |v: &(f64, f64)| v.0 / v.1;
            let hi = vals
                .iter()
                .max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
                .expect("nonempty");
            let lo = vals
                .iter()
                .min_by(|a, b| ratio(a).total_cmp(&ratio(b)))
                .expect("nonempty");
            Ok((
                SweepPoint::new(vec![l], hi.0, hi.1),
                SweepPoint::new(vec![l], lo.0, lo.1),
            ))
        })
        .collect()
}

fn slope_verdict(report: &mut SweepReport, predicted: f64) -> Result<()> {
    report.predicted_slope = Some(predicted);
    let fit = report.fit_log_log()?;
    report.verdict = if fit.r_squared >= MIN_R_SQUARED && (fit.slope - predicted).abs() <= GROWTH_SLOPE
    {
        SweepVerdict::Bounded
    } else {
        SweepVerdict::Inconclusive
    };
    Ok(())
}

/// Fits the growth of `sup_{|α|=k} ‖∂^α u‖_{q⃗} / ‖u‖_{p⃗}` for spectra in
/// balls of radius `λR`, maximized over the family. The predicted slope is
/// `k + Σ(1/pᵢ − 1/qᵢ)`; the verdict is bounded when the fit matches it, so
/// that `ratio / λ^slope` stays bounded.
pub fn bernstein_sweep(
    k: u32,
    p: &ExponentVec,
    q: &ExponentVec,
    lambdas: &[f64],
    family: &FunctionFamily,
    grid: &GridSpec,
    count: usize,
) -> Result<SweepReport> {
    if p.len() != q.len() || p.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            actual: p.len().max(q.len()),
        });
    }
    if p.entries().iter().zip(q.entries()).any(|(a, b)| a.reciprocal() < b.reciprocal()) {
        return Err(Error::ExponentRelation(format!(
            "Bernstein needs p ≤ q componentwise, got p = ({p}), q = ({q})"
        )));
    }
    check_bernstein_inputs(lambdas, family, count)?;
    let pts = bernstein_points(k, p, q, lambdas, family, grid, count)?;
    let predicted = k as f64 + rational_to_f64(p.reciprocal_sum() - q.reciprocal_sum());
    let json = serde_json::json!({ "k": k, "p": p, "q": q, "family": family, "count": count });
    let mut report = SweepReport::new(
        "Bernstein sweep",
        json,
        vec!["lambda".into()],
        AxisScale::Log,
        pts.into_iter().map(|(hi, _)| hi).collect(),
    )?;
    report.seed = family.seed();
    slope_verdict(&mut report, predicted)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedReport {
    /// Family maximum of the ratio per `λ`.
    pub upper: SweepReport,
    /// Family minimum of the ratio per `λ`.
    pub lower: SweepReport,
    /// `max_λ max ratio / λ^k`.
    pub c_upper: f64,
    /// `min_λ min ratio / λ^k`.
    pub c_lower: f64,
}

/// Both sides of `λ^k‖u‖ ≲ sup_{|α|=k} ‖∂^α u‖_{p⃗} ≲ λ^k‖u‖` for spectra in
/// annuli of radius `λR`. Ball-supported families are rejected.
pub fn bernstein_twosided_sweep(
    k: u32,
    p: &ExponentVec,
    lambdas: &[f64],
    family: &FunctionFamily,
    grid: &GridSpec,
    count: usize,
) -> Result<TwoSidedReport> {
    if p.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            actual: p.len(),
        });
    }
    check_bernstein_inputs(lambdas, family, count)?;
    if !family.is_annular(grid) {
        return Err(Error::InvalidArgument(format!(
            "{} is not supported in an annulus",
            family.name()
        )));
    }
    let pts = bernstein_points(k, p, p, lambdas, family, grid, count)?;
    let json = serde_json::json!({ "k": k, "p": p, "family": family, "count": count });
    let constant = |pts: &[SweepPoint], pick: fn(f64, f64) -> f64, init: f64| {
        pts.iter()
            .map(|pt| pt.ratio / pt.coords[0].powi(k as i32))
            .fold(init, pick)
    };
    let (his, los): (Vec<_>, Vec<_>) = pts.into_iter().unzip();
    let c_upper = constant(&his, f64::max, f64::NEG_INFINITY);
    let c_lower = constant(&los, f64::min, f64::INFINITY);
    let mut upper = SweepReport::new(
        "Bernstein upper",
        json.clone(),
        vec!["lambda".into()],
        AxisScale::Log,
        his,
    )?;
    let mut lower = SweepReport::new(
        "Bernstein lower",
        json,
        vec!["lambda".into()],
        AxisScale::Log,
        los,
    )?;
    slope_verdict(&mut upper, k as f64)?;
    slope_verdict(&mut lower, k as f64)?;
    upper.seed = family.seed();
    lower.seed = family.seed();
    Ok(TwoSidedReport {
        upper,
        lower,
        c_upper,
        c_lower,
    })
}

/// `‖u‖_{Ḃ^σ_{p⃗,1}}` and `‖u‖_{Ḃ⁰_{q⃗,∞}}^θ ‖u‖_{Ḃˢ_{r⃗,∞}}^{1−θ}`.
pub fn besov_gn_terms(u: &RealField, params: &BesovGnParams) -> Result<(f64, f64)> {
    let b = &params.base;
    let part = DyadicPartition;
    let theta = rational_to_f64(b.theta);
    let lhs = besov_norm(u, rational_to_f64(b.sigma), &b.p, crate::Exponent::int(1), &part)?;
    let uq = besov_norm(u, 0.0, &b.q, crate::Exponent::Infinite, &part)?;
    let ur = besov_norm(u, rational_to_f64(b.s), &b.r, crate::Exponent::Infinite, &part)?;
    Ok((lhs, uq.powf(theta) * ur.powf(1.0 - theta)))
}

/// Besov-form GN ratio maximized over a family, with the refinement study
/// of [`family_boundedness`]. Instances the case analysis rules out, or
/// whose hypotheses fail, are rejected.
pub fn besov_gn_sweep(
    params: &BesovGnParams,
    family: &FunctionFamily,
    grid: &GridSpec,
    count: usize,
) -> Result<SweepReport> {
    let verdict = classify_besov_case(params);
    match &verdict.status {
        CaseStatus::Valid => {}
        CaseStatus::Contradiction { identity } => {
            return Err(Error::ExponentRelation(format!(
                "subcase {} cannot occur: {identity}",
                verdict.tag.name()
            )))
        }
        CaseStatus::Excluded => {
            return Err(Error::ExponentRelation(
                "s = Σ(1/rᵢ − 1/qᵢ) is excluded".into(),
            ))
        }
        CaseStatus::Inconsistent { reason } => {
            return Err(Error::ExponentRelation(reason.clone()))
        }
    }
    if grid.dim() != params.base.n {
        return Err(Error::DimensionMismatch {
            expected: params.base.n,
            actual: grid.dim(),
        });
    }
    let json = serde_json::json!({ "params": params, "case": verdict, "family": family });
    let mut report = refinement_study("Besov GN family boundedness", json, grid, count, |g, i| {
        besov_gn_terms(&family.member(g, i)?, params)
    })?;
    report.seed = family.seed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Rational;
    use crate::gn_algebra::solve_theta;

    fn ev(s: &str) -> ExponentVec {
        s.parse().unwrap()
    }

    fn rq(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn balanced_instance(theta: Rational) -> GnParams {
        GnParams::new(rq(0, 1), rq(1, 1), theta, ev("4,6"), ev("2,4"), ev("2,3")).unwrap()
    }

    fn gaussian() -> RealField {
        let g = GridSpec::isotropic(2, 64, 16.0).unwrap();
        FunctionFamily::AnisotropicGaussian { width: 1.0, seed: 0 }
            .member(&g, 0)
            .unwrap()
    }

    #[test]
    fn identity_instance_ratio_is_one() {
        let p = ev("3,5");
        let params = GnParams::new(rq(0, 1), rq(1, 1), rq(1, 1), p.clone(), p, ev("2,2")).unwrap();
        let r = gn_ratio(&gaussian(), &params).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_mode_closed_form() {
        // u = cos(3x₁) has ‖Λu‖₂ = 3‖u‖₂, so with σ = 0, s = 1, p = q = r = (2,2), R = ‖u‖₂ / (‖u‖₂^θ (3‖u‖₂)^{1−θ}) = 3^{θ−1}.
        let g = GridSpec::torus(2, 16).unwrap();
        let u = FunctionFamily::SingleMode { k: vec![3, 0] }.member(&g, 0).unwrap();
        let two = ev("2,2");
        let params = GnParams::new(rq(0, 1), rq(1, 1), rq(1, 3), two.clone(), two.clone(), two).unwrap();
        let r = gn_ratio(&u, &params).unwrap();
        assert!((r - 3f64.powf(-2.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn ratio_is_homogeneous() {
        let u = gaussian();
        let params = balanced_instance(rq(7, 11));
        let r = gn_ratio(&u, &params).unwrap();
        for c in [-3.0, 1e-4, 250.0] {
            let rc = gn_ratio(&u.scale(c), &params).unwrap();
            assert!((rc / r - 1.0).abs() < 1e-12);
        }
        assert!(gn_ratio(&RealField::zeros(u.grid()), &params).is_err());
    }

    #[test]
    fn exact_isotropic_scaling_law() {
        let u = gaussian();
        let params = balanced_instance(rq(5, 11));
        let delta = predicted_isotropic_slope(&params);
        assert!((delta - 1.0 / 6.0).abs() < 1e-15);
        let r0 = gn_ratio(&u, &params).unwrap();
        for l in [0.125, 0.5, 3.0, 32.0] {
            let r = gn_ratio(&u.stretched(&[l, l]).unwrap(), &params).unwrap();
            assert!((r / (r0 * l.powf(delta)) - 1.0).abs() < 1e-12, "λ = {l}");
        }
    }

    #[test]
    fn sweeps_separate_admissible_from_broken() {
        let u = gaussian();
        let (params, _) = solve_theta(rq(0, 1), rq(1, 1), &ev("4,6"), &ev("2,4"), &ev("2,3")).unwrap();
        let ok = dilation_sweep(&u, &params, &isotropic_lambdas(2, -3, 3), Some(0.0)).unwrap();
        assert_eq!(ok.verdict, SweepVerdict::Bounded);
        assert!(ok.fitted_slope.unwrap().abs() < 0.02);

        let broken = balanced_instance(rq(5, 11));
        let d = predicted_isotropic_slope(&broken);
        let bad = dilation_sweep(&u, &broken, &isotropic_lambdas(2, -5, 5), Some(d)).unwrap();
        assert_eq!(bad.verdict, SweepVerdict::Blowup);
        assert!((bad.fitted_slope.unwrap() - 1.0 / 6.0).abs() < 0.05);
        assert!(dilation_sweep(&u, &broken, &[], None).is_err());
    }

    #[test]
    fn family_boundedness_identity_instance() {
        let p = ev("4,4");
        let params = GnParams::new(rq(0, 1), rq(1, 1), rq(1, 1), p.clone(), p, ev("2,2")).unwrap();
        let fam = FunctionFamily::RandomBandlimited { shell: 1, seed: 4 };
        let g = GridSpec::torus(2, 16).unwrap();
        let rep = family_boundedness(&params, &fam, &g, 10).unwrap();
        assert_eq!(rep.points.len(), 30);
        assert!(rep.points.iter().all(|p| (p.ratio - 1.0).abs() < 1e-13));
        assert_eq!(rep.verdict, SweepVerdict::Bounded);
        assert_eq!(rep.seed, Some(4));
        assert!(family_boundedness(&params, &fam, &g, 5).is_err());
    }

    #[test]
    fn bernstein_preconditions() {
        let g = GridSpec::torus(2, 32).unwrap();
        let ball = FunctionFamily::BallCluster { radius: 2.0, seed: 0 };
        let e = bernstein_sweep(1, &ev("2,2"), &ev("1,1"), &[1.0, 2.0], &ball, &g, 2);
        assert!(matches!(e, Err(Error::ExponentRelation(_))));
        let e = bernstein_twosided_sweep(1, &ev("2,2"), &[1.0, 2.0], &ball, &g, 2);
        assert!(matches!(e, Err(Error::InvalidArgument(_))));
        let gauss = FunctionFamily::AnisotropicGaussian { width: 1.0, seed: 0 };
        assert!(bernstein_sweep(1, &ev("2,2"), &ev("2,2"), &[1.0, 2.0], &gauss, &g, 2).is_err());
    }

    #[test]
    fn bernstein_l2_slope() {
        let g = GridSpec::torus(2, 128).unwrap();
        let ann = FunctionFamily::AnnulusCluster { radius: 2.0, seed: 9 };
        let lambdas: Vec<f64> = (1..=4).map(|k| 2f64.powi(k)).collect();
        let rep = bernstein_twosided_sweep(1, &ev("2,2"), &lambdas, &ann, &g, 3).unwrap();
        assert!((rep.upper.fitted_slope.unwrap() - 1.0).abs() < 0.05);
        assert!((rep.lower.fitted_slope.unwrap() - 1.0).abs() < 0.05);
        // on an annulus of radius λR the L² derivative ratio lies in [λR/(2√2), λR]
        assert!(rep.c_upper <= 2.0 + 1e-9);
        assert!(rep.c_lower >= 1.0 / 2f64.sqrt() - 1e-9);
    }

    #[test]
    fn besov_rejects_excluded_and_contradictions() {
        let g = GridSpec::torus(2, 16).unwrap();
        let fam = FunctionFamily::RandomBandlimited { shell: 1, seed: 0 };
        let c3 = GnParams::new(rq(0, 1), rq(1, 1), rq(1, 2), ev("4,4"), ev("4,4"), ev("1,2")).unwrap();
        assert!(besov_gn_sweep(&BesovGnParams::new(c3, None), &fam, &g, 10).is_err());
        let i22 = GnParams::new(rq(1, 2), rq(1, 1), rq(1, 4), ev("2,2"), ev("2,2"), ev("2,2")).unwrap();
        assert!(besov_gn_sweep(&BesovGnParams::new(i22, None), &fam, &g, 10).is_err());
    }

    #[test]
    fn besov_single_shell_terms() {
        // one block carries the whole field when its spectrum sits on the plateau of φ
        let g = GridSpec::torus(2, 32).unwrap();
        let u = FunctionFamily::SingleMode { k: vec![3, 0] }.member(&g, 0).unwrap();
        let params = BesovGnParams::new(
            GnParams::new(rq(0, 1), rq(1, 1), rq(19, 22), ev("8/3,16/3"), ev("2,4"), ev("4,8")).unwrap(),
            None,
        );
        let (lhs, rhs) = besov_gn_terms(&u, &params).unwrap();
        let th = 19.0 / 22.0;
        let lhs_expect = mixed_lebesgue_norm(&u, &ev("8/3,16/3")).unwrap();
        let rhs_expect = mixed_lebesgue_norm(&u, &ev("2,4")).unwrap().powf(th)
            * (3.0 * mixed_lebesgue_norm(&u, &ev("4,8")).unwrap()).powf(1.0 - th);
        // |ξ| = 3 lies in the plateau of block j = 1 only: φ(3/2) = 1
        assert!((lhs / lhs_expect - 1.0).abs() < 1e-12);
        assert!((rhs / (rhs_expect * 2f64.powf(1.0 - th) / 3f64.powf(1.0 - th)) - 1.0).abs() < 1e-12);
    }
}
