//! Dyadic partition of unity, Littlewood-Paley blocks, Besov and Sobolev norms.
//!
//! The profile is `χ(t) = 1` on `[0, 3/4]`, `0` on `[4/3, ∞)`, joined by the
//! smooth step `S(u) = g(1−u) / (g(1−u) + g(u))`, `g(u) = e^{−1/u}`. Then
//! `ρ(ξ) = χ(|ξ|)` and `φ(ξ) = χ(|ξ|/2) − χ(|ξ|)`, supported in
//! `3/4 <= |ξ| <= 8/3`. Sums of `φ(2^{−j}·)` telescope, so the partition is
//! exact up to roundoff on the covered range.

use std::ops::RangeInclusive;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exponent::{Exponent, ExponentVec};
use crate::field::io::{load_field, save_field};
use crate::field::{GridSpec, RealField, SpectralField};
use crate::mixed_norm::{mixed_lebesgue_norm, time_norm, SpaceTimeExponents};
use crate::report::{AxisScale, SweepPoint, SweepReport, SweepVerdict};
use crate::spectral::fractional_laplacian;

pub const INNER: f64 = 3.0 / 4.0;
pub const OUTER: f64 = 4.0 / 3.0;

fn g(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smooth step from 1 at `u <= 0` to 0 at `u >= 1`.
fn step(u: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        let (a, b) = (g(1.0 - u), g(u));
        a / (a + b)
    }
}

/// Fixed dyadic partition `(ρ, φ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DyadicPartition;

impl DyadicPartition {
    /// Low-pass profile `χ(t)`, `t = |ξ|`.
    pub fn chi(&self, t: f64) -> f64 {
        step((t - INNER) / (OUTER - INNER))
    }

    pub fn rho(&self, t: f64) -> f64 {
        self.chi(t)
    }

    /// Annular profile `φ(t) = χ(t/2) − χ(t)`.
    pub fn phi(&self, t: f64) -> f64 {
        self.chi(t / 2.0) - self.chi(t)
    }

    /// Weight `φ(2^{−j} t)` of block `j`.
    pub fn block_weight(&self, j: i32, t: f64) -> f64 {
        self.phi(t * 2f64.powi(-j))
    }

    /// Weight `χ(2^{−j} t)` of the low-pass `Sⱼ`.
    pub fn lowpass_weight(&self, j: i32, t: f64) -> f64 {
        self.chi(t * 2f64.powi(-j))
    }

    /// Digest of the profile, sampled on a fixed mesh.
    pub fn profile_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"chi:smoothstep-exp(-1/u):3/4:4/3;");
        for k in 0..=1024 {
            let t = 3.0 * k as f64 / 1024.0;
            h.update(self.phi(t).to_le_bytes());
            h.update(self.rho(t).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Block indices covering the grid's nonzero frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicRange {
    pub j_min: i32,
    pub j_max: i32,
}

impl DyadicRange {
    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    pub fn iter(&self) -> RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// Valid low-pass indices: `Sⱼ` for `j_min..=j_max+1`.
    pub fn lowpass_range(&self) -> RangeInclusive<i32> {
        self.j_min..=self.j_max + 1
    }
}

/// Smallest `j_min` and `j_max` with `Σ_{j_min..=j_max} φ(2^{−j}ξ) = 1` for
/// every nonzero lattice frequency.
pub fn resolvable_range(grid: &GridSpec) -> DyadicRange {
    // blocks j..=J sum to χ(2^{−J−1}|ξ|) − χ(2^{−j}|ξ|)
    let j_min = (INNER * grid.min_frequency()).log2().floor() as i32;
    // 2^{J+1}·3/4 >= ξ_max  ⇔  J >= log2(2ξ_max/3)
    let j_max = (2.0 * grid.nyquist_radius() / 3.0).log2().ceil() as i32;
    DyadicRange { j_min, j_max }
}

fn check_block(grid: &GridSpec, j: i32) -> Result<DyadicRange> {
    let range = resolvable_range(grid);
    if !range.contains(j) {
        return Err(Error::OutOfRange(format!(
            "block {j} outside resolvable range {}..={}",
            range.j_min, range.j_max
        )));
    }
    Ok(range)
}

fn check_lowpass(grid: &GridSpec, j: i32) -> Result<DyadicRange> {
    let range = resolvable_range(grid);
    if !range.lowpass_range().contains(&j) {
        return Err(Error::OutOfRange(format!(
            "low-pass index {j} outside {}..={}",
            range.j_min,
            range.j_max + 1
        )));
    }
    Ok(range)
}

pub fn dyadic_block_spectral(
    spec: &SpectralField,
    j: i32,
    part: &DyadicPartition,
) -> Result<SpectralField> {
    check_block(spec.grid(), j)?;
    Ok(spec.apply_radial(|r| part.block_weight(j, r)))
}

/// `Δ̇ⱼ f = φ(2^{−j}D) f`.
pub fn dyadic_block(f: &RealField, j: i32, part: &DyadicPartition) -> Result<RealField> {
    Ok(dyadic_block_spectral(&f.forward(), j, part)?.inverse())
}

pub fn lowpass_spectral(
    spec: &SpectralField,
    j: i32,
    part: &DyadicPartition,
) -> Result<SpectralField> {
    check_lowpass(spec.grid(), j)?;
    Ok(spec.apply_radial(|r| part.lowpass_weight(j, r)))
}

/// `Sⱼ f = χ(2^{−j}D) f`, which keeps the mean.
pub fn lowpass(f: &RealField, j: i32, part: &DyadicPartition) -> Result<RealField> {
    Ok(lowpass_spectral(&f.forward(), j, part)?.inverse())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionManifest {
    pub j_min: i32,
    pub j_max: i32,
    pub profile_hash: String,
}

/// Blocks `Δ̇ⱼ f` for `j_min..=j_max` plus the remainder (the mean).
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicDecomposition {
    pub range: DyadicRange,
    pub blocks: Vec<RealField>,
    pub remainder: RealField,
}

impl DyadicDecomposition {
    pub fn new(f: &RealField, part: &DyadicPartition) -> Self {
        let range = resolvable_range(f.grid());
        let spec = f.forward();
        let blocks = range
            .iter()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|j| spec.apply_radial(|r| part.block_weight(j, r)).inverse())
            .collect();
        // The mean, plus anything the blocks miss (nothing on a covered range).
        let covered = spec.apply_radial(|r| {
            if r == 0.0 {
                0.0
            } else {
                part.lowpass_weight(range.j_max + 1, r) - part.lowpass_weight(range.j_min, r)
            }
        });
        let missed: Vec<Complex64> = spec
            .coeffs()
            .iter()
            .zip(covered.coeffs())
            .map(|(a, b)| a - b)
            .collect();
        let missed = SpectralField::new(f.grid().clone(), missed).expect("same grid");
        let remainder = missed.inverse();
        Self {
            range,
            blocks,
            remainder,
        }
    }

    pub fn block(&self, j: i32) -> Option<&RealField> {
        if self.range.contains(j) {
            Some(&self.blocks[(j - self.range.j_min) as usize])
        } else {
            None
        }
    }

    pub fn reconstruct(&self) -> RealField {
        self.blocks
            .iter()
            .fold(self.remainder.clone(), |acc, b| acc.add(b).expect("same grid"))
    }

    pub fn manifest(&self, part: &DyadicPartition) -> DecompositionManifest {
        DecompositionManifest {
            j_min: self.range.j_min,
            j_max: self.range.j_max,
            profile_hash: part.profile_hash(),
        }
    }

    /// Writes `block_<j>.agnf`, `remainder.agnf` and `manifest.json`.
    pub fn save(&self, dir: &Path, part: &DyadicPartition) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (j, b) in self.range.iter().zip(&self.blocks) {
            save_field(b, &dir.join(format!("block_{j}.agnf")))?;
        }
        save_field(&self.remainder, &dir.join("remainder.agnf"))?;
        let manifest = serde_json::to_string_pretty(&self.manifest(part))?;
        std::fs::write(dir.join("manifest.json"), manifest + "\n")?;
        Ok(())
    }

    pub fn load(dir: &Path, part: &DyadicPartition) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        let m: DecompositionManifest = serde_json::from_str(&text)?;
        if m.profile_hash != part.profile_hash() {
            return Err(Error::Parse("decomposition was built with a different profile".into()));
        }
        let range = DyadicRange {
            j_min: m.j_min,
            j_max: m.j_max,
        };
        let blocks = range
            .iter()
            .map(|j| load_field(&dir.join(format!("block_{j}.agnf"))))
            .collect::<Result<Vec<_>>>()?;
        let remainder = load_field(&dir.join("remainder.agnf"))?;
        Ok(Self {
            range,
            blocks,
            remainder,
        })
    }
}

/// `2^{js}‖Δ̇ⱼ f‖_{p⃗}` for every block of the resolvable range.
pub fn weighted_block_norms(
    f: &RealField,
    s: f64,
    p: &ExponentVec,
    part: &DyadicPartition,
) -> Result<Vec<(i32, f64)>> {
    let range = resolvable_range(f.grid());
    let spec = f.forward();
    range
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|j| {
            let b = spec.apply_radial(|r| part.block_weight(j, r)).inverse();
            Ok((j, 2f64.powf(j as f64 * s) * mixed_lebesgue_norm(&b, p)?))
        })
        .collect()
}

/// `ℓʳ` norm of a nonnegative sequence.
pub fn sequence_norm(values: &[f64], r: Exponent) -> f64 {
    let r = r.to_f64();
    if r.is_infinite() {
        values.iter().fold(0.0, |m: f64, v| m.max(*v))
    } else {
        values.iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `‖f‖_{Ḃ^s_{p⃗,r}}` over the resolvable range.
pub fn besov_norm(
    f: &RealField,
    s: f64,
    p: &ExponentVec,
    r: Exponent,
    part: &DyadicPartition,
) -> Result<f64> {
    let w: Vec<f64> = weighted_block_norms(f, s, p, part)?
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    Ok(sequence_norm(&w, r))
}

/// `‖f‖_{Ḣ^s_{p⃗}} = ‖Λ^s f‖_{p⃗}`.
pub fn sobolev_norm(f: &RealField, s: f64, p: &ExponentVec) -> Result<f64> {
    mixed_lebesgue_norm(&fractional_laplacian(f, s)?, p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub s: f64,
    pub besov: f64,
    pub sobolev: f64,
    pub ratio: f64,
}

/// `‖f‖_{Ḃ^s_{p⃗,∞}}` against `‖f‖_{Ḣ^s_{p⃗}}`; ratio 0 for the zero field.
pub fn besov_embedding_check(
    f: &RealField,
    s: f64,
    p: &ExponentVec,
    part: &DyadicPartition,
) -> Result<EmbeddingReport> {
    let besov = besov_norm(f, s, p, Exponent::Infinite, part)?;
    let sobolev = sobolev_norm(f, s, p)?;
    let ratio = if sobolev > 0.0 {
        besov / sobolev
    } else if besov == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(EmbeddingReport {
        s,
        besov,
        sobolev,
        ratio,
    })
}

/// Largest embedding ratio over a family of fields.
pub fn besov_embedding_family(
    fields: &[RealField],
    s: f64,
    p: &ExponentVec,
    part: &DyadicPartition,
) -> Result<f64> {
    let ratios = fields
        .par_iter()
        .map(|f| besov_embedding_check(f, s, p, part).map(|r| r.ratio))
        .collect::<Result<Vec<_>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Tolerance below which the approximate-identity sweep counts as converged.
pub const APPROX_IDENTITY_TOL: f64 = 1e-6;

/// `‖Sⱼf − f‖_{L^p(0,T;L^{q⃗})}` for each `j` in `j_range`.
pub fn approx_identity_sweep(
    traj: &[(f64, RealField)],
    pq: &SpaceTimeExponents,
    j_range: RangeInclusive<i32>,
    part: &DyadicPartition,
) -> Result<SweepReport> {
    if j_range.is_empty() {
        return Err(Error::InvalidArgument("empty j range".into()));
    }
    crate::mixed_norm::check_covers(traj.iter().map(|(t, _)| *t), pq.horizon)?;
    let grid = traj[0].1.grid().clone();
    for j in j_range.clone() {
        check_lowpass(&grid, j)?;
    }
    let times: Vec<f64> = traj.iter().map(|(t, _)| *t).collect();
    let tp = pq.time_p.to_f64();
    let spectra: Vec<SpectralField> = traj.par_iter().map(|(_, f)| f.forward()).collect();
    let full: Vec<f64> = traj
        .iter()
        .map(|(_, f)| mixed_lebesgue_norm(f, &pq.space))
        .collect::<Result<_>>()?;
    let rhs = time_norm(&times, &full, tp)?;
    let js: Vec<i32> = j_range.collect();
    let points = js
        .par_iter()
        .map(|&j| {
            let diffs = spectra
                .iter()
                .map(|spec| {
                    let d = spec.apply_radial(|r| part.lowpass_weight(j, r) - 1.0).inverse();
                    mixed_lebesgue_norm(&d, &pq.space)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepPoint::new(vec![j as f64], time_norm(&times, &diffs, tp)?, rhs))
        })
        .collect::<Result<Vec<_>>>()?;
    let params = serde_json::json!({
        "time_p": pq.time_p,
        "space": pq.space,
        "horizon": pq.horizon,
    });
    let mut report = SweepReport::new(
        "approximate identity",
        params,
        vec!["j".into()],
        AxisScale::Linear,
        points,
    )?;
    let decreasing = report.points.windows(2).all(|w| w[1].lhs < w[0].lhs);
    let last = report.points.last().map_or(f64::INFINITY, |p| p.lhs);
    report.verdict = if decreasing && last < APPROX_IDENTITY_TOL {
        SweepVerdict::Bounded
    } else {
        SweepVerdict::Inconclusive
    };
    report
        .notes
        .push(format!("strictly decreasing: {decreasing}; final {last:e}"));
    Ok(report)
}
