//! Discrete Hardy-Littlewood maximal function over a finite set of radii.
//!
//! A ball average is the mean of `|f|` over the grid points within Euclidean
//! (periodic) distance `r`, normalized by the exact point count. Averages are
//! evaluated as circular convolutions through the FFT.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentVec;
use crate::field::{GridSpec, RealField, SpectralField, MAX_DIM};
use crate::mixed_norm::mixed_lebesgue_norm;
use crate::spectral::fractional_laplacian;

/// Denominators below this are masked out of pointwise ratios.
pub const MASK_THRESHOLD: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSet {
    radii: Vec<f64>,
}

impl RadiusSet {
    /// Radii must be positive, strictly increasing, and at most half the
    /// smallest period of `grid`.
    pub fn new(radii: Vec<f64>, grid: &GridSpec) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidArgument("radius set is empty".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidArgument("radii must be positive".into()));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
        }
        let half = grid.lengths().iter().fold(f64::INFINITY, |m, &l| m.min(l)) / 2.0;
        let largest = radii[radii.len() - 1];
        if largest > half * (1.0 + 1e-12) {
            return Err(Error::OutOfRange(format!(
                "radius {largest} exceeds half the smallest period ({half})"
            )));
        }
        Ok(Self { radii })
    }

    /// `h, 2h, 4h, …` up to a quarter of the smallest period, `h` the finest spacing.
    pub fn dyadic(grid: &GridSpec) -> Self {
        let h = grid.min_spacing();
        let quarter = grid.lengths().iter().fold(f64::INFINITY, |m, &l| m.min(l)) / 4.0;
        let mut radii = vec![h];
        while radii[radii.len() - 1] * 2.0 <= quarter * (1.0 + 1e-12) {
            radii.push(radii[radii.len() - 1] * 2.0);
        }
        Self { radii }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Same radii with `extra` merged in.
    pub fn with_radius(&self, extra: f64, grid: &GridSpec) -> Result<Self> {
        let mut radii = self.radii.clone();
        if !radii.contains(&extra) {
            radii.push(extra);
            radii.sort_by(f64::total_cmp);
        }
        Self::new(radii, grid)
    }
}

/// Normalized indicator of the closed ball of radius `r` about the origin.
fn ball_kernel(grid: &GridSpec, r: f64) -> RealField {
    let n = grid.dim();
    let r2 = r * r * (1.0 + 1e-12);
    let mut values: Vec<f64> = (0..grid.len())
        .map(|flat| {
            let idx = grid.unravel(flat);
            let d2: f64 = (0..n).map(|a| grid.centered_coord(a, idx[a]).powi(2)).sum();
            if d2 <= r2 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let count: f64 = values.iter().sum();
    for v in &mut values {
        *v /= count;
    }
    RealField::from_parts_unchecked(grid.clone(), values)
}

fn average_with(abs_spec: &SpectralField, kernel: &RealField) -> RealField {
    let scale = Complex64::new(abs_spec.grid().len() as f64, 0.0);
    let k = kernel.forward();
    let conv = abs_spec.mul(&k).expect("same grid").scale(scale).inverse();
    conv.map(|v| v.max(0.0)).expect("finite averages")
}

/// Average of `|f|` over balls of radius `r` centred at every grid point.
pub fn ball_average(f: &RealField, r: f64) -> Result<RealField> {
    let radii = RadiusSet::new(vec![r], f.grid())?;
    Ok(average_with(&f.abs().forward(), &ball_kernel(f.grid(), radii.radii[0])))
}

/// `ℳf(x) = max_r` of the ball averages of `|f|`.
pub fn hl_maximal(f: &RealField, radii: &RadiusSet) -> Result<RealField> {
    let grid = f.grid();
    RadiusSet::new(radii.radii.clone(), grid)?;
    let abs_spec = f.abs().forward();
    let averages: Vec<RealField> = radii
        .radii
        .par_iter()
        .map(|&r| average_with(&abs_spec, &ball_kernel(grid, r)))
        .collect();
    let mut out = vec![0.0f64; grid.len()];
    for a in &averages {
        for (o, v) in out.iter_mut().zip(a.values()) {
            *o = o.max(*v);
        }
    }
    Ok(RealField::from_parts_unchecked(grid.clone(), out))
}

/// Direct ball average of `|f|` about grid point `center`, for cross-checks.
pub fn ball_average_direct(f: &RealField, r: f64, center: &[usize]) -> f64 {
    let grid = f.grid();
    let n = grid.dim();
    let r2 = r * r * (1.0 + 1e-12);
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut shifted = [0usize; MAX_DIM];
    for flat in 0..grid.len() {
        let idx = grid.unravel(flat);
        let d2: f64 = (0..n).map(|a| grid.centered_coord(a, idx[a]).powi(2)).sum();
        if d2 <= r2 {
            for a in 0..n {
                shifted[a] = (center[a] + idx[a]) % grid.sizes()[a];
            }
            sum += f.values()[grid.ravel(&shifted[..n])].abs();
            count += 1;
        }
    }
    sum / count as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub s: f64,
    pub theta: f64,
    pub radii: Vec<f64>,
    pub max_ratio: f64,
    pub p99_ratio: f64,
    pub masked_fraction: f64,
}

/// Ratio field `|Λ^{s(1−θ)}u| / ((ℳu)^θ (ℳΛ^s u)^{1−θ})`; masked points hold 0.
/// Also returns the number of masked points.
pub fn pointwise_ratio_field(
    u: &RealField,
    s: f64,
    theta: f64,
    radii: &RadiusSet,
) -> Result<(RealField, usize)> {
    let mu = hl_maximal(u, radii)?;
    let mls = hl_maximal(&fractional_laplacian(u, s)?, radii)?;
    ratio_from_parts(u, s, theta, &mu, &mls)
}

fn ratio_from_parts(
    u: &RealField,
    s: f64,
    theta: f64,
    mu: &RealField,
    mls: &RealField,
) -> Result<(RealField, usize)> {
    let num = fractional_laplacian(u, s * (1.0 - theta))?;
    let mut masked = 0;
    let values = num
        .values()
        .iter()
        .zip(mu.values().iter().zip(mls.values()))
        .map(|(n, (a, b))| {
            let den = a.powf(theta) * b.powf(1.0 - theta);
            if den < MASK_THRESHOLD {
                masked += 1;
                0.0
            } else {
                n.abs() / den
            }
        })
        .collect();
    Ok((RealField::from_parts_unchecked(u.grid().clone(), values), masked))
}

fn summarize(field: &RealField, masked: usize, s: f64, theta: f64, radii: &RadiusSet) -> PointwiseReport {
    let total = field.grid().len();
    let unmasked = total - masked;
    // Masked points hold 0, so the top `unmasked` sorted values are exactly
    // the unmasked ratios.
    let mut sorted = field.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let (max_ratio, p99_ratio) = if unmasked == 0 {
        (0.0, 0.0)
    } else {
        let kept = &sorted[masked..];
        let rank = ((0.99 * unmasked as f64).ceil() as usize).clamp(1, unmasked) - 1;
        (kept[unmasked - 1], kept[rank])
    };
    PointwiseReport {
        s,
        theta,
        radii: radii.radii.clone(),
        max_ratio,
        p99_ratio,
        masked_fraction: masked as f64 / total as f64,
    }
}

/// Empirical constant of the pointwise interpolation estimate.
pub fn pointwise_interpolation_check(
    u: &RealField,
    s: f64,
    theta: f64,
    radii: &RadiusSet,
) -> Result<PointwiseReport> {
    Ok(pointwise_interpolation_multi(u, s, &[theta], radii)?.remove(0))
}

/// As [`pointwise_interpolation_check`] for several `θ`, sharing the maximal functions.
pub fn pointwise_interpolation_multi(
    u: &RealField,
    s: f64,
    thetas: &[f64],
    radii: &RadiusSet,
) -> Result<Vec<PointwiseReport>> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("s = {s} must be positive")));
    }
    if let Some(t) = thetas.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::InvalidArgument(format!("theta = {t} must lie in (0, 1)")));
    }
    let mu = hl_maximal(u, radii)?;
    let mls = hl_maximal(&fractional_laplacian(u, s)?, radii)?;
    thetas
        .iter()
        .map(|&theta| {
            let (field, masked) = ratio_from_parts(u, s, theta, &mu, &mls)?;
            Ok(summarize(&field, masked, s, theta, radii))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalBoundednessReport {
    pub p: ExponentVec,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// `max ‖ℳf‖_{p⃗} / ‖f‖_{p⃗}` over a family; needs `1 < pᵢ < ∞`.
pub fn maximal_boundedness_check(
    family: &[RealField],
    p: &ExponentVec,
    radii: &RadiusSet,
) -> Result<MaximalBoundednessReport> {
    if !p.strictly_inside() {
        return Err(Error::InvalidExponent(format!(
            "maximal bounds need 1 < p < ∞ in every entry, got ({p})"
        )));
    }
    if family.is_empty() {
        return Err(Error::InsufficientData("empty family".into()));
    }
    let ratios = family
        .par_iter()
        .map(|f| {
            let den = mixed_lebesgue_norm(f, p)?;
            if den == 0.0 {
                return Err(Error::UndefinedRatio("zero field in family".into()));
            }
            Ok(mixed_lebesgue_norm(&hl_maximal(f, radii)?, p)? / den)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(MaximalBoundednessReport {
        p: p.clone(),
        radii: radii.radii.clone(),
        ratios,
        max_ratio,
    })
}
