//! Uniform periodic grids and sampled fields.
//!
//! Values are stored row-major with axis 1 (`x₁`) fastest: the flat index of
//! grid point `(k₁, …, kₙ)` is `k₁ + N₁·(k₂ + N₂·k₃)`. Frequencies live on the
//! lattice `(2π/Lᵢ)·ℤ` per axis; spectral coefficients are stored in FFT
//! order and index `m` maps to the centered wavenumber in `[-N/2, N/2)`.

mod fft;
pub mod io;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fft::{forward, inverse, inverse_complex};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Smallest allowed number of points per axis.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    sizes: Vec<usize>,
    lengths: Vec<f64>,
}

impl GridSpec {
    pub fn new(sizes: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        let n = sizes.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension must be in 1..={MAX_DIM}, got {n}"
            )));
        }
        if lengths.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: lengths.len(),
            });
        }
        for &size in &sizes {
            if size < MIN_POINTS || !size.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "axis size {size} must be a power of two >= {MIN_POINTS}"
                )));
            }
        }
        for &length in &lengths {
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "period {length} must be positive and finite"
                )));
            }
        }
        Ok(Self { sizes, lengths })
    }

    /// Isotropic grid with `size` points and period `length` on each of `n` axes.
    pub fn isotropic(n: usize, size: usize, length: f64) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension must be in 1..={MAX_DIM}, got {n}"
            )));
        }
        Self::new(vec![size; n], vec![length; n])
    }

    /// Isotropic `2π`-periodic grid.
    pub fn torus(n: usize, size: usize) -> Result<Self> {
        Self::isotropic(n, size, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.sizes[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim())
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Measure of the periodic domain.
    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Centered integer wavenumber of FFT index `index` along `axis`.
    pub fn wavenumber(&self, axis: usize, index: usize) -> i64 {
        let n = self.sizes[axis];
        if index < n / 2 {
            index as i64
        } else {
            index as i64 - n as i64
        }
    }

    /// Angular frequency `2π m / L` of FFT index `index` along `axis`.
    pub fn frequency(&self, axis: usize, index: usize) -> f64 {
        2.0 * PI * self.wavenumber(axis, index) as f64 / self.lengths[axis]
    }

    /// FFT index of a centered wavenumber, if it is representable.
    pub fn index_of_wavenumber(&self, axis: usize, m: i64) -> Option<usize> {
        let n = self.sizes[axis] as i64;
        if m < -n / 2 || m >= n / 2 {
            return None;
        }
        Some(m.rem_euclid(n) as usize)
    }

    /// Whether `index` is the Nyquist index `N/2` of `axis`.
    pub fn is_nyquist(&self, axis: usize, index: usize) -> bool {
        index == self.sizes[axis] / 2
    }

    /// Coordinate `k·h` of grid index `k`, in `[0, L)`.
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        k as f64 * self.spacing(axis)
    }

    /// Coordinate of grid index `k` wrapped into `[-L/2, L/2)`.
    pub fn centered_coord(&self, axis: usize, k: usize) -> f64 {
        self.wavenumber(axis, k) as f64 * self.spacing(axis)
    }

    /// Multi-index of a flat index.
    pub fn unravel(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for (axis, &n) in self.sizes.iter().enumerate() {
            out[axis] = flat % n;
            flat /= n;
        }
        out
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for axis in (0..self.dim()).rev() {
            flat = flat * self.sizes[axis] + idx[axis];
        }
        flat
    }

    /// Smallest nonzero frequency magnitude on the lattice.
    pub fn min_frequency(&self) -> f64 {
        self.lengths
            .iter()
            .map(|l| 2.0 * PI / l)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest frequency magnitude on the lattice (the Nyquist corner).
    pub fn nyquist_radius(&self) -> f64 {
        self.sizes
            .iter()
            .zip(&self.lengths)
            .map(|(&n, &l)| {
                let k = PI * n as f64 / l;
                k * k
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Same sample counts, periods multiplied axis-wise by `factors`.
    pub fn scaled(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: factors.len(),
            });
        }
        let lengths = self
            .lengths
            .iter()
            .zip(factors)
            .map(|(l, f)| l * f)
            .collect();
        Self::new(self.sizes.clone(), lengths)
    }

    /// Same periods, `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(
            self.sizes.iter().map(|n| n * factor).collect(),
            self.lengths.clone(),
        )
    }

    /// Frequency vector of a flat spectral index.
    pub fn frequency_vector(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(flat);
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.dim() {
            xi[axis] = self.frequency(axis, idx[axis]);
        }
        xi
    }

    /// `|ξ|` for every flat spectral index.
    pub fn frequency_magnitudes(&self) -> Vec<f64> {
        (0..self.len())
            .map(|flat| {
                let xi = self.frequency_vector(flat);
                xi.iter().map(|x| x * x).sum::<f64>().sqrt()
            })
            .collect()
    }
}

/// A real scalar sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &GridSpec, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f` at coordinates in `[0, L)`.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::sample(grid, f, false)
    }

    /// Samples `f` at coordinates wrapped into `[-L/2, L/2)`, so functions
    /// centered at the origin are periodized symmetrically.
    pub fn from_fn_centered(grid: &GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::sample(grid, f, true)
    }

    fn sample(grid: &GridSpec, f: impl Fn(&[f64]) -> f64, centered: bool) -> Result<Self> {
        let n = grid.dim();
        let mut x = [0.0; MAX_DIM];
        let values = (0..grid.len())
            .map(|flat| {
                let idx = grid.unravel(flat);
                for axis in 0..n {
                    x[axis] = if centered {
                        grid.centered_coord(axis, idx[axis])
                    } else {
                        grid.coord(axis, idx[axis])
                    };
                }
                f(&x[..n])
            })
            .collect();
        Self::new(grid.clone(), values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        Self::from_parts_unchecked(
            self.grid.clone(),
            self.values.iter().map(|v| v.abs()).collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_parts_unchecked(
            self.grid.clone(),
            self.values.iter().map(|v| c * v).collect(),
        )
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_parts_unchecked(
            self.grid.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `∫ f` by the periodic rectangle rule.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Same samples on a grid whose periods are multiplied by `factors`,
    /// i.e. `x ↦ f(x₁/λ₁, …, xₙ/λₙ)`.
    pub fn stretched(&self, factors: &[f64]) -> Result<Self> {
        Ok(Self::from_parts_unchecked(
            self.grid.scaled(factors)?,
            self.values.clone(),
        ))
    }

    /// `x ↦ f(λ₁x₁, …, λₙxₙ)`, realized by shrinking the periods.
    pub fn dilated(&self, lambdas: &[f64]) -> Result<Self> {
        let inv: Vec<f64> = lambdas.iter().map(|l| 1.0 / l).collect();
        self.stretched(&inv)
    }

    /// Shift by whole grid steps: `g(x) = f(x − shift·h)`.
    pub fn shifted(&self, shift: &[i64]) -> Result<Self> {
        if shift.len() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                actual: shift.len(),
            });
        }
        let n = self.grid.dim();
        let mut out = vec![0.0; self.values.len()];
        let mut src = [0usize; MAX_DIM];
        for (flat, slot) in out.iter_mut().enumerate() {
            let idx = self.grid.unravel(flat);
            for axis in 0..n {
                let size = self.grid.sizes[axis] as i64;
                src[axis] = (idx[axis] as i64 - shift[axis]).rem_euclid(size) as usize;
            }
            *slot = self.values[self.grid.ravel(&src[..n])];
        }
        Ok(Self::from_parts_unchecked(self.grid.clone(), out))
    }
}

/// Spectral coefficients `c_ξ = (1/N) Σₓ f(x) e^{-iξ·x}` on the frequency lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Builds a spectrum from `(wavenumbers, coefficient)` pairs; repeated
    /// wavenumbers accumulate.
    pub fn from_modes<I>(grid: &GridSpec, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut out = Self::zeros(grid);
        let n = grid.dim();
        let mut idx = [0usize; MAX_DIM];
        for (m, c) in modes {
            if m.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: m.len(),
                });
            }
            for axis in 0..n {
                idx[axis] = grid.index_of_wavenumber(axis, m[axis]).ok_or_else(|| {
                    Error::OutOfRange(format!(
                        "wavenumber {} not representable on axis {} with {} points",
                        m[axis], axis, grid.sizes[axis]
                    ))
                })?;
            }
            out.coeffs[grid.ravel(&idx[..n])] += c;
        }
        Ok(out)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at a centered wavenumber vector.
    pub fn coeff(&self, m: &[i64]) -> Option<Complex64> {
        let n = self.grid.dim();
        if m.len() != n {
            return None;
        }
        let mut idx = [0usize; MAX_DIM];
        for axis in 0..n {
            idx[axis] = self.grid.index_of_wavenumber(axis, m[axis])?;
        }
        Some(self.coeffs[self.grid.ravel(&idx[..n])])
    }

    /// Multiplies every coefficient by `symbol(ξ)`.
    pub fn apply(&self, symbol: impl Fn(&[f64]) -> Complex64) -> Self {
        let n = self.grid.dim();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, &c)| {
                let xi = self.grid.frequency_vector(flat);
                c * symbol(&xi[..n])
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Multiplies by a real radial symbol `m(|ξ|)`.
    pub fn apply_radial(&self, symbol: impl Fn(f64) -> f64) -> Self {
        self.apply(|xi| {
            let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            Complex64::new(symbol(r), 0.0)
        })
    }

    /// Multiplies by a symbol that also sees the FFT multi-index.
    pub(crate) fn apply_indexed(
        &self,
        symbol: impl Fn(&[usize], &[f64]) -> Complex64,
    ) -> Self {
        let n = self.grid.dim();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, &c)| {
                let idx = self.grid.unravel(flat);
                let xi = self.grid.frequency_vector(flat);
                c * symbol(&idx[..n], &xi[..n])
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise product of spectra.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// `Σ |c_ξ|²`, equal to the mean of `|f|²` over the grid.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Physical `L²` norm via Parseval: `(|T| Σ |c_ξ|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.volume() * self.energy()).sqrt()
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn inverse(&self) -> RealField {
        inverse(self)
    }

    /// Largest `|c_ξ|` over frequencies where `keep(|ξ|)` is false.
    pub fn max_outside(&self, keep: impl Fn(f64) -> bool) -> f64 {
        self.grid
            .frequency_magnitudes()
            .iter()
            .zip(&self.coeffs)
            .filter(|(r, _)| !keep(**r))
            .fold(0.0, |m, (_, c)| m.max(c.norm()))
    }
}

impl RealField {
    pub fn forward(&self) -> SpectralField {
        forward(self)
    }
}

/// A vector field stored component-wise.
pub type VectorField = Vec<RealField>;
