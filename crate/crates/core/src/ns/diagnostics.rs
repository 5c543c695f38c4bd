//! Energy budget, criterion norms and the truncated flux term.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{magnitude, VelocityTrajectory};
use crate::error::{Error, Result};
use crate::exponent::{Exponent, ExponentVec};
use crate::field::{RealField, SpectralField};
use crate::gn_algebra::{ns_criteria_check, NsCriterionVerdict};
use crate::littlewood_paley::{resolvable_range, DyadicPartition};
use crate::mixed_norm::{spacetime_norm, SpaceTimeExponents};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    pub t: f64,
    /// `½‖v(t)‖²`.
    pub kinetic: f64,
    /// `ν∫₀ᵗ‖∇v‖² ds`, trapezoid over snapshots.
    pub dissipation: f64,
    pub initial: f64,
    /// `kinetic + dissipation − initial`.
    pub residual: f64,
}

fn check_snapshots(traj: &VelocityTrajectory) -> Result<()> {
    if traj.snapshots.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} snapshots; at least 2 needed",
            traj.snapshots.len()
        )));
    }
    Ok(())
}

/// `(‖v‖², ‖∇v‖²)` from the spectrum.
fn energy_and_enstrophy(v: &[RealField]) -> (f64, f64) {
    let mut e = 0.0;
    let mut d = 0.0;
    for f in v {
        let spec = f.forward();
        let grid = spec.grid();
        let vol = grid.volume();
        for (flat, c) in spec.coeffs().iter().enumerate() {
            let xi = grid.frequency_vector(flat);
            let k2: f64 = xi[..grid.dim()].iter().map(|x| x * x).sum();
            e += vol * c.norm_sqr();
            d += vol * k2 * c.norm_sqr();
        }
    }
    (e, d)
}

pub fn energy_budget(traj: &VelocityTrajectory) -> Result<Vec<EnergyBudget>> {
    check_snapshots(traj)?;
    let terms: Vec<(f64, f64)> = traj
        .snapshots
        .par_iter()
        .map(|(_, v)| energy_and_enstrophy(v))
        .collect();
    let initial = 0.5 * terms[0].0;
    let mut dissipation = 0.0;
    let mut out = Vec::with_capacity(terms.len());
    for (k, ((t, _), (e, d))) in traj.snapshots.iter().zip(&terms).enumerate() {
        if k > 0 {
            let dt = t - traj.snapshots[k - 1].0;
            dissipation += 0.5 * dt * traj.nu * (d + terms[k - 1].1);
        }
        let kinetic = 0.5 * e;
        out.push(EnergyBudget {
            t: *t,
            kinetic,
            dissipation,
            initial,
            residual: kinetic + dissipation - initial,
        });
    }
    Ok(out)
}

pub fn max_abs_residual(budget: &[EnergyBudget]) -> f64 {
    budget.iter().map(|b| b.residual.abs()).fold(0.0, f64::max)
}

/// `|∇v|` pointwise (Frobenius norm of the velocity gradient).
pub fn gradient_magnitude(v: &[RealField]) -> Result<RealField> {
    let mut parts = Vec::new();
    for f in v {
        parts.extend(crate::spectral::gradient(f));
    }
    Ok(magnitude(&parts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionNorm {
    /// `"v"` or `"grad v"`.
    pub quantity: String,
    pub time_p: Exponent,
    pub space: ExponentVec,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub check: NsCriterionVerdict,
    pub horizon: f64,
    pub norms: Vec<CriterionNorm>,
    pub all_finite: bool,
}

/// Space-time norms named by criterion `kind` on `[0, T]`, `T` the last
/// snapshot time: kind 1 takes `v` in the dual exponents and `∇v` in
/// `L^p L^{q⃗}`, kind 2 takes `v`, kinds 3 and 4 take `∇v`.
pub fn criteria_norms(
    traj: &VelocityTrajectory,
    kind: u8,
    p: Option<Exponent>,
    q: &ExponentVec,
) -> Result<CriteriaReport> {
    check_snapshots(traj)?;
    let check = ns_criteria_check(kind, p, q)?;
    if !check.admissible {
        return Err(Error::ExponentRelation(format!(
            "criterion {kind} fails: {}",
            check.failures.join("; ")
        )));
    }
    if q.len() != traj.grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: traj.grid.dim(),
            actual: q.len(),
        });
    }
    let p = check.p.expect("admissible criteria carry p");
    let horizon = traj.final_time();
    let speed = || traj.speed();
    let grad = || -> Result<Vec<(f64, RealField)>> {
        traj.snapshots
            .par_iter()
            .map(|(t, v)| Ok((*t, gradient_magnitude(v)?)))
            .collect()
    };
    let norm = |quantity: &str, series: &[(f64, RealField)], tp: Exponent, space: ExponentVec| -> Result<CriterionNorm> {
        let pq = SpaceTimeExponents::new(tp, space.clone(), horizon)?;
        Ok(CriterionNorm {
            quantity: quantity.into(),
            time_p: tp,
            space,
            value: spacetime_norm(series, &pq)?,
        })
    };
    let norms = match kind {
        1 => vec![
            norm(
                "v",
                &speed(),
                check.dual_time.expect("kind 1 duals"),
                check.dual_space.clone().expect("kind 1 duals"),
            )?,
            norm("grad v", &grad()?, p, q.clone())?,
        ],
        2 => vec![norm("v", &speed(), p, q.clone())?],
        _ => vec![norm("grad v", &grad()?, p, q.clone())?],
    };
    let all_finite = norms.iter().all(|n| n.value.is_finite());
    Ok(CriteriaReport {
        check,
        horizon,
        norms,
        all_finite,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxTermSeries {
    pub n_values: Vec<i32>,
    pub flux: Vec<f64>,
    /// Magnitudes at or below this are roundoff: `10⁻¹²` times the Hölder
    /// bound `T·max_t ‖v‖_∞‖v‖₂‖∇v‖₂`.
    pub roundoff_floor: f64,
}

impl FluxTermSeries {
    /// `|flux|`, with values under the roundoff floor set to zero.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.flux
            .iter()
            .map(|f| if f.abs() <= self.roundoff_floor { 0.0 } else { f.abs() })
            .collect()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.magnitudes().windows(2).all(|w| w[1] <= w[0])
    }

    /// `|flux|` strictly decreases for consecutive cutoffs `>= after` until
    /// it vanishes, and stays zero from then on.
    pub fn strictly_decreasing_after(&self, after: i32) -> bool {
        self.n_values
            .windows(2)
            .zip(self.magnitudes().windows(2))
            .filter(|(n, _)| n[0] >= after)
            .all(|(_, f)| f[1] < f[0] || (f[0] == 0.0 && f[1] == 0.0))
    }
}

fn check_cutoffs(traj: &VelocityTrajectory, n_values: &[i32]) -> Result<()> {
    if n_values.is_empty() {
        return Err(Error::InvalidArgument("no cutoffs given".into()));
    }
    let range = resolvable_range(&traj.grid).lowpass_range();
    for n in n_values {
        if !range.contains(n) {
            return Err(Error::OutOfRange(format!(
                "cutoff {n} outside {}..={}",
                range.start(),
                range.end()
            )));
        }
    }
    Ok(())
}

/// `Σᵢⱼ ∫ vⱼ·(I−S²_N)vᵢ·S²_N∂ⱼvᵢ dx` at one instant; equal to
/// `∫ S_N[vⱼ(I−S²_N)vᵢ]·S_N∂ⱼvᵢ` because `S_N` is self-adjoint. For fields
/// truncated by the 2/3 rule the three-factor rectangle rule is exact.
fn flux_density(v: &[RealField], spectra: &[SpectralField], n: i32, part: &DyadicPartition) -> f64 {
    let dim = v.len();
    let scale = 2f64.powi(-n);
    let mut total = 0.0;
    for spec in spectra {
        let tail = spec
            .apply_radial(|r| {
                let s = part.chi(r * scale);
                1.0 - s * s
            })
            .inverse();
        if tail.is_zero() {
            continue;
        }
        let low = spec.apply_radial(|r| part.chi(r * scale).powi(2));
        for j in 0..dim {
            let mut alpha = vec![0u32; dim];
            alpha[j] = 1;
            let d = crate::spectral::partial_derivative_spectral(&low, &alpha)
                .expect("dimension matches")
                .inverse();
            let sum: f64 = v[j]
                .values()
                .iter()
                .zip(tail.values())
                .zip(d.values())
                .map(|((a, b), c)| a * b * c)
                .sum();
            total += sum * v[0].grid().cell_volume();
        }
    }
    total
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Time-integrated flux `∫₀ᵀ∫ S_N[vⱼ(I−S²_N)vᵢ]·S_N∂ⱼvᵢ` for each cutoff
/// `2^N`, trapezoid over snapshots.
pub fn flux_convergence(traj: &VelocityTrajectory, n_values: &[i32]) -> Result<FluxTermSeries> {
    check_snapshots(traj)?;
    check_cutoffs(traj, n_values)?;
    let part = DyadicPartition;
    let spectra: Vec<Vec<SpectralField>> = traj
        .snapshots
        .par_iter()
        .map(|(_, v)| v.iter().map(|f| f.forward()).collect())
        .collect();
    let times = traj.times();
    let bound = traj
        .snapshots
        .par_iter()
        .map(|(_, v)| {
            let (e, d) = energy_and_enstrophy(v);
            magnitude(v).max_abs() * (e * d).sqrt()
        })
        .reduce(|| 0.0, f64::max);
    let horizon = times.last().expect("checked") - times[0];
    let flux = n_values
        .par_iter()
        .map(|&n| {
            let density: Vec<f64> = traj
                .snapshots
                .iter()
                .zip(&spectra)
                .map(|((_, v), s)| flux_density(v, s, n, &part))
                .collect();
            trapezoid(&times, &density)
        })
        .collect();
    Ok(FluxTermSeries {
        n_values: n_values.to_vec(),
        flux,
        roundoff_floor: 1e-12 * horizon * bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderChainPoint {
    pub n: i32,
    pub flux: f64,
    /// `‖v‖` in the dual exponents `(2p/(p−1), 2qᵢ/(qᵢ−1))`.
    pub v_dual: f64,
    /// `‖(I−S_N)v‖` in the dual exponents.
    pub tail_dual: f64,
    /// `‖∇v‖_{L^p L^{q⃗}}`.
    pub grad: f64,
    /// `|flux| / (v_dual·tail_dual·grad)`; absent when the tail vanishes.
    pub constant: Option<f64>,
}

/// Empirical constant of `|flux(N)| <= C‖v‖‖(I−S_N)v‖‖∇v‖_{L^pL^{q⃗}}`, the
/// first two norms taken in the exponents dual to `(p, q⃗)`.
pub fn flux_holder_chain(
    traj: &VelocityTrajectory,
    n_values: &[i32],
    p: Exponent,
    q: &ExponentVec,
) -> Result<Vec<HolderChainPoint>> {
    let fluxes = flux_convergence(traj, n_values)?;
    let crit = criteria_norms(traj, 1, Some(p), q)?;
    let v_dual = crit.norms[0].value;
    let grad = crit.norms[1].value;
    let pq = SpaceTimeExponents::new(
        crit.check.dual_time.expect("kind 1 duals"),
        crit.check.dual_space.clone().expect("kind 1 duals"),
        traj.final_time(),
    )?;
    let part = DyadicPartition;
    n_values
        .iter()
        .zip(&fluxes.flux)
        .map(|(&n, &flux)| {
            let scale = 2f64.powi(-n);
            let tail: Vec<(f64, RealField)> = traj
                .snapshots
                .par_iter()
                .map(|(t, v)| {
                    let parts: Vec<RealField> = v
                        .iter()
                        .map(|f| f.forward().apply_radial(|r| 1.0 - part.chi(r * scale)).inverse())
                        .collect();
                    (*t, magnitude(&parts))
                })
                .collect();
            let tail_dual = spacetime_norm(&tail, &pq)?;
            let denom = v_dual * tail_dual * grad;
            Ok(HolderChainPoint {
                n,
                flux,
                v_dual,
                tail_dual,
                grad,
                constant: (denom > 0.0).then(|| flux.abs() / denom),
            })
        })
        .collect()
}
