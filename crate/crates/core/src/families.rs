//! Test-function families.
//!
//! Members are indexed; member `i` of a seeded family is drawn from a ChaCha
//! stream keyed by `(seed, i)`, so it does not depend on how many members
//! are requested. Spectrally defined members depend on the grid only
//! through its periods, which makes them identical under refinement.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, RealField, SpectralField};
use crate::littlewood_paley::DyadicPartition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionFamily {
    /// `exp(−Σ xₖ²/(2aₖ²))` centered in the cell, `aₖ = width·e^{uₖ}`,
    /// `uₖ ∈ [−1/2, 1/2]` (member 0 is isotropic).
    AnisotropicGaussian { width: f64, seed: u64 },
    /// Random spectrum `φ(2^{−j}ξ)·ĝ(ξ)` with complex Gaussian `ĝ`.
    RandomBandlimited { shell: i32, seed: u64 },
    /// Sum of independent random band-limited members, one per shell.
    MultiShell { shells: Vec<i32>, seed: u64 },
    /// `∏ η(xₖ/aₖ)`, `η(t) = exp(−1/(1−t²))`, compactly supported.
    BumpProduct { width: f64, seed: u64 },
    /// `cos(ξ·x)` for the integer wavenumber `k`.
    SingleMode { k: Vec<i64> },
    /// `η(|ξ|/radius)·Σₗ aₗ e^{−iξ·xₗ}`: clustered bumps, spectrum in the ball.
    BallCluster { radius: f64, seed: u64 },
    /// As the ball cluster with the radial profile supported in
    /// `radius·(1/2, 1)`.
    AnnulusCluster { radius: f64, seed: u64 },
}

fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn annulus_profile(t: f64) -> f64 {
    bump(4.0 * (t - 0.75))
}

impl FunctionFamily {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionFamily::AnisotropicGaussian { .. } => "anisotropic_gaussian",
            FunctionFamily::RandomBandlimited { .. } => "random_bandlimited",
            FunctionFamily::MultiShell { .. } => "multi_shell",
            FunctionFamily::BumpProduct { .. } => "bump_product",
            FunctionFamily::SingleMode { .. } => "single_mode",
            FunctionFamily::BallCluster { .. } => "ball_cluster",
            FunctionFamily::AnnulusCluster { .. } => "annulus_cluster",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            FunctionFamily::AnisotropicGaussian { seed, .. }
            | FunctionFamily::RandomBandlimited { seed, .. }
            | FunctionFamily::MultiShell { seed, .. }
            | FunctionFamily::BumpProduct { seed, .. }
            | FunctionFamily::BallCluster { seed, .. }
            | FunctionFamily::AnnulusCluster { seed, .. } => Some(*seed),
            FunctionFamily::SingleMode { .. } => None,
        }
    }

    /// Same family with spectral radius `radius` (cluster kinds only).
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        match self {
            FunctionFamily::BallCluster { seed, .. } => Ok(FunctionFamily::BallCluster {
                radius,
                seed: *seed,
            }),
            FunctionFamily::AnnulusCluster { seed, .. } => Ok(FunctionFamily::AnnulusCluster {
                radius,
                seed: *seed,
            }),
            _ => Err(Error::InvalidArgument(format!(
                "{} has no spectral radius",
                self.name()
            ))),
        }
    }

    /// Closed frequency shell `[inner, outer]` containing the spectrum of
    /// every member, for band-limited kinds.
    pub fn spectral_support(&self, grid: &GridSpec) -> Option<(f64, f64)> {
        match self {
            FunctionFamily::RandomBandlimited { shell, .. } => {
                let scale = 2f64.powi(*shell);
                Some((0.75 * scale, 8.0 / 3.0 * scale))
            }
            FunctionFamily::MultiShell { shells, .. } => {
                let lo = shells.iter().min()?;
                let hi = shells.iter().max()?;
                Some((0.75 * 2f64.powi(*lo), 8.0 / 3.0 * 2f64.powi(*hi)))
            }
            FunctionFamily::SingleMode { k } => {
                let xi: f64 = k
                    .iter()
                    .zip(grid.lengths())
                    .map(|(m, l)| (2.0 * PI * *m as f64 / l).powi(2))
                    .sum::<f64>()
                    .sqrt();
                Some((xi, xi))
            }
            FunctionFamily::BallCluster { radius, .. } => Some((0.0, *radius)),
            FunctionFamily::AnnulusCluster { radius, .. } => Some((0.5 * radius, *radius)),
            _ => None,
        }
    }

    /// Support bounded away from the origin.
    pub fn is_annular(&self, grid: &GridSpec) -> bool {
        self.spectral_support(grid).is_some_and(|(inner, _)| inner > 0.0)
    }

    pub fn member(&self, grid: &GridSpec, index: usize) -> Result<RealField> {
        let n = grid.dim();
        match self {
            FunctionFamily::AnisotropicGaussian { width, seed } => {
                let a = self.widths(*width, *seed, index, n)?;
                RealField::from_fn_centered(grid, |x| {
                    (-x.iter().zip(&a).map(|(x, a)| x * x / (2.0 * a * a)).sum::<f64>()).exp()
                })
            }
            FunctionFamily::BumpProduct { width, seed } => {
                let a = self.widths(*width, *seed, index, n)?;
                for (axis, a) in a.iter().enumerate() {
                    if 2.0 * a >= grid.lengths()[axis] {
                        return Err(Error::OutOfRange(format!(
                            "bump width {a} does not fit period {}",
                            grid.lengths()[axis]
                        )));
                    }
                }
                RealField::from_fn_centered(grid, |x| {
                    x.iter().zip(&a).map(|(x, a)| bump(x / a)).product()
                })
            }
            FunctionFamily::SingleMode { k } => {
                if k.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: k.len(),
                    });
                }
                if k.iter().all(|m| *m == 0) {
                    return Err(Error::InvalidArgument("zero wavenumber gives a constant".into()));
                }
                for (axis, m) in k.iter().enumerate() {
                    if 2 * m.unsigned_abs() >= grid.sizes()[axis] as u64 {
                        return Err(Error::OutOfRange(format!(
                            "wavenumber {m} not resolved on axis {axis}"
                        )));
                    }
                }
                let half = Complex64::new(0.5, 0.0);
                let neg: Vec<i64> = k.iter().map(|m| -m).collect();
                Ok(SpectralField::from_modes(grid, [(k.clone(), half), (neg, half)])?.inverse())
            }
            FunctionFamily::RandomBandlimited { shell, seed } => {
                random_bandlimited(grid, *shell, *seed, index)
            }
            FunctionFamily::MultiShell { shells, seed } => {
                if shells.is_empty() {
                    return Err(Error::InvalidArgument("no shells given".into()));
                }
                let mut sum = RealField::zeros(grid);
                for (k, j) in shells.iter().enumerate() {
                    let part = random_bandlimited(grid, *j, seed.wrapping_add(k as u64), index)?;
                    sum = sum.add(&part)?;
                }
                Ok(sum)
            }
            FunctionFamily::BallCluster { radius, seed } => {
                cluster(grid, *radius, *seed, index, bump)
            }
            FunctionFamily::AnnulusCluster { radius, seed } => {
                cluster(grid, *radius, *seed, index, annulus_profile)
            }
        }
    }

    /// Members `0..count`, in index order.
    pub fn generate(&self, grid: &GridSpec, count: usize) -> Result<Vec<RealField>> {
        (0..count)
            .into_par_iter()
            .map(|i| self.member(grid, i))
            .collect()
    }

    fn widths(&self, width: f64, seed: u64, index: usize, n: usize) -> Result<Vec<f64>> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidArgument(format!("width {width} must be positive")));
        }
        let mut rng = rng_for(seed, index);
        Ok((0..n)
            .map(|_| {
                let u: f64 = rng.random_range(-0.5..=0.5);
                if index == 0 {
                    width
                } else {
                    width * u.exp()
                }
            })
            .collect())
    }
}

fn check_resolved(grid: &GridSpec, outer: f64) -> Result<()> {
    for axis in 0..grid.dim() {
        let nyq = PI * grid.sizes()[axis] as f64 / grid.lengths()[axis];
        if outer >= nyq {
            return Err(Error::OutOfRange(format!(
                "spectral radius {outer} reaches the Nyquist frequency {nyq} on axis {axis}"
            )));
        }
    }
    Ok(())
}

fn random_bandlimited(grid: &GridSpec, shell: i32, seed: u64, index: usize) -> Result<RealField> {
    let part = DyadicPartition;
    let scale = 2f64.powi(shell);
    let outer = 8.0 / 3.0 * scale;
    check_resolved(grid, outer)?;
    let n = grid.dim();
    let bounds: Vec<i64> = grid
        .lengths()
        .iter()
        .map(|l| (outer * l / (2.0 * PI)).floor() as i64)
        .collect();
    let mut rng = rng_for(seed, index);
    let mut modes = Vec::new();
    let mut m = vec![0i64; n];
    let total: usize = bounds.iter().map(|b| (2 * b + 1) as usize).product();
    for flat in 0..total {
        let mut rest = flat;
        for axis in (0..n).rev() {
            let width = (2 * bounds[axis] + 1) as usize;
            m[axis] = (rest % width) as i64 - bounds[axis];
            rest /= width;
        }
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let upper = m.iter().find(|v| **v != 0).is_some_and(|v| *v > 0);
        if !upper {
            continue;
        }
        let xi: f64 = m
            .iter()
            .zip(grid.lengths())
            .map(|(m, l)| (2.0 * PI * *m as f64 / l).powi(2))
            .sum::<f64>()
            .sqrt();
        let w = part.phi(xi / scale);
        if w == 0.0 {
            continue;
        }
        let c = Complex64::new(re, im) * w;
        modes.push((m.clone(), c));
        modes.push((m.iter().map(|v| -v).collect(), c.conj()));
    }
    if modes.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "shell {shell} contains no lattice frequency"
        )));
    }
    Ok(SpectralField::from_modes(grid, modes)?.inverse())
}

fn cluster(
    grid: &GridSpec,
    radius: f64,
    seed: u64,
    index: usize,
    profile: impl Fn(f64) -> f64 + Sync,
) -> Result<RealField> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    check_resolved(grid, radius)?;
    let n = grid.dim();
    let mut rng = rng_for(seed, index);
    let center: Vec<f64> = grid
        .lengths()
        .iter()
        .map(|l| rng.random_range(0.0..*l))
        .collect();
    let atoms: Vec<(f64, Vec<f64>)> = (0..1 + index % 3)
        .map(|_| {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let amp = sign * rng.random_range(0.5..1.5);
            let pos = center
                .iter()
                .map(|c| c + rng.random_range(-2.0..2.0) / radius)
                .collect();
            (amp, pos)
        })
        .collect();
    let coeffs: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let xi = grid.frequency_vector(flat);
            let mag = xi[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
            let w = profile(mag / radius);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            atoms
                .iter()
                .map(|(a, x)| {
                    let phase: f64 = xi[..n].iter().zip(x).map(|(k, x)| k * x).sum();
                    Complex64::from_polar(a * w, -phase)
                })
                .sum()
        })
        .collect();
    let f = SpectralField::new(grid.clone(), coeffs)?.inverse();
    if f.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} contains no lattice frequency"
        )));
    }
    Ok(f)
}
