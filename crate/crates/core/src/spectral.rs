//! Fourier multipliers: `Λ^s`, directional `Λᵢ^s`, and spectral derivatives.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField, VectorField};

fn check_order(s: f64) -> Result<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "order s = {s} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// `|x|^s` with `0^0 = 1` and `0^s = 0` for `s > 0`.
fn power(x: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(s)
    }
}

/// Applies the symbol `|ξ|^s` in frequency space.
pub fn fractional_laplacian_spectral(f: &SpectralField, s: f64) -> Result<SpectralField> {
    check_order(s)?;
    Ok(f.apply_radial(|r| power(r, s)))
}

/// `Λ^s f = (−Δ)^{s/2} f`.
pub fn fractional_laplacian(f: &RealField, s: f64) -> Result<RealField> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    Ok(fractional_laplacian_spectral(&f.forward(), s)?.inverse())
}

/// `Λᵢ^s f` with symbol `|ξᵢ|^s`; `axis` is zero-based.
pub fn directional_fractional(f: &RealField, axis: usize, s: f64) -> Result<RealField> {
    check_order(s)?;
    let n = f.grid().dim();
    if axis >= n {
        return Err(Error::OutOfRange(format!("axis {axis} in dimension {n}")));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    Ok(f
        .forward()
        .apply(|xi| Complex64::new(power(xi[axis].abs(), s), 0.0))
        .inverse())
}

/// `∂^α` in frequency space. The Nyquist mode of an axis differentiated an
/// odd number of times is zeroed so real fields stay real.
pub fn partial_derivative_spectral(f: &SpectralField, alpha: &[u32]) -> Result<SpectralField> {
    let n = f.grid().dim();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: alpha.len(),
        });
    }
    let grid = f.grid().clone();
    Ok(f.apply_indexed(|idx, xi| {
        let mut m = Complex64::new(1.0, 0.0);
        for axis in 0..n {
            let k = alpha[axis];
            if k == 0 {
                continue;
            }
            if k % 2 == 1 && grid.is_nyquist(axis, idx[axis]) {
                return Complex64::new(0.0, 0.0);
            }
            m *= Complex64::new(0.0, xi[axis]).powu(k);
        }
        m
    }))
}

pub fn partial_derivative(f: &RealField, alpha: &[u32]) -> Result<RealField> {
    Ok(partial_derivative_spectral(&f.forward(), alpha)?.inverse())
}

/// Spectral gradient `(∂₁f, …, ∂ₙf)`.
pub fn gradient(f: &RealField) -> VectorField {
    let spec = f.forward();
    let n = f.grid().dim();
    (0..n)
        .map(|axis| {
            let mut alpha = vec![0; n];
            alpha[axis] = 1;
            partial_derivative_spectral(&spec, &alpha)
                .expect("alpha has grid dimension")
                .inverse()
        })
        .collect()
}

/// All multi-indices of order `k` in dimension `n`, lexicographic.
pub fn multiindices(n: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(n, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, k, &mut Vec::new(), &mut out);
    }
    out
}
