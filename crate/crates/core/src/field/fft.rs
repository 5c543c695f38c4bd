//! Axis-wise n-dimensional FFT on top of `rustfft`.

use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{GridSpec, RealField, SpectralField};

static PLANNER: LazyLock<Mutex<FftPlanner<f64>>> = LazyLock::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().unwrap_or_else(|e| e.into_inner());
    planner.plan_fft(len, direction)
}

/// In-place unnormalized transform along every axis.
fn transform(grid: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let sizes = grid.sizes();
    let total = data.len();
    let mut stride = 1;
    for &n in sizes {
        let fft = plan(n, direction);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
        } else {
            // Gather strided lines into a contiguous batch, transform, scatter back.
            let block = n * stride;
            let lines = total / n;
            let mut buf = vec![Complex64::default(); total];
            let mut line = 0;
            for base in (0..total).step_by(block) {
                for offset in 0..stride {
                    let dst = &mut buf[line * n..(line + 1) * n];
                    for (k, slot) in dst.iter_mut().enumerate() {
                        *slot = data[base + offset + k * stride];
                    }
                    line += 1;
                }
            }
            debug_assert_eq!(line, lines);
            fft.process_with_scratch(&mut buf, &mut scratch);
            let mut line = 0;
            for base in (0..total).step_by(block) {
                for offset in 0..stride {
                    let src = &buf[line * n..(line + 1) * n];
                    for (k, v) in src.iter().enumerate() {
                        data[base + offset + k * stride] = *v;
                    }
                    line += 1;
                }
            }
        }
        stride *= n;
    }
}

/// Forward transform normalized by `1/(N₁⋯Nₙ)`.
pub fn forward(f: &RealField) -> SpectralField {
    let grid = f.grid().clone();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&grid, &mut data, FftDirection::Forward);
    let scale = 1.0 / data.len() as f64;
    for c in &mut data {
        *c *= scale;
    }
    SpectralField { grid, coeffs: data }
}

/// Unnormalized inverse transform, returning complex samples.
pub fn inverse_complex(spec: &SpectralField) -> Vec<Complex64> {
    let mut data = spec.coeffs().to_vec();
    transform(spec.grid(), &mut data, FftDirection::Inverse);
    data
}

/// Inverse transform keeping the real part.
pub fn inverse(spec: &SpectralField) -> RealField {
    let values = inverse_complex(spec).into_iter().map(|c| c.re).collect();
    RealField::from_parts_unchecked(spec.grid().clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &GridSpec, seed: u64) -> RealField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        RealField::new(grid.clone(), v).unwrap()
    }

    #[test]
    fn cosine_has_two_half_coefficients() {
        let g = GridSpec::torus(1, 16).unwrap();
        let f = RealField::from_fn(&g, |x| x[0].cos()).unwrap();
        let c = forward(&f);
        for m in -8..8i64 {
            let want = if m.abs() == 1 { 0.5 } else { 0.0 };
            let got = c.coeff(&[m]).unwrap();
            assert!((got.re - want).abs() < 1e-15 && got.im.abs() < 1e-15, "m={m}");
        }
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let g = GridSpec::torus(2, 8).unwrap();
        let c = forward(&RealField::constant(&g, 3.0));
        assert!((c.zero_mode().re - 3.0).abs() < 1e-14);
        assert!(c.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn gaussian_matches_closed_form() {
        // tail mass e^{-32} is far below 1e-10
        let l = 16.0;
        let g = GridSpec::isotropic(1, 128, l).unwrap();
        let f = RealField::from_fn_centered(&g, |x| (-x[0] * x[0] / 2.0).exp()).unwrap();
        let c = forward(&f);
        for idx in 0..128 {
            let xi = g.frequency(0, idx);
            let want = (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp() / l;
            if want < 1e-7 {
                continue;
            }
            let got = c.coeffs()[idx];
            assert!(((got.re - want) / want).abs() < 1e-8, "xi={xi}");
            assert!(got.im.abs() < 1e-14);
        }
    }

    #[test]
    fn round_trip_and_parseval_3d() {
        let g = GridSpec::new(vec![8, 16, 32], vec![1.0, 2.0, 3.0]).unwrap();
        let f = random_field(&g, 7);
        let c = forward(&f);
        let back = inverse(&c);
        let err = f
            .values()
            .iter()
            .zip(back.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12);
        let imag = inverse_complex(&c).iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        assert!(imag < 1e-12);
        let phys: f64 = f.values().iter().map(|v| v * v).sum::<f64>() * g.cell_volume();
        assert!((c.l2_norm().powi(2) - phys).abs() / phys < 1e-10);
    }

    #[test]
    fn single_mode_inverse() {
        let g = GridSpec::torus(2, 16).unwrap();
        let a = Complex64::new(0.3, -0.4);
        let spec = SpectralField::from_modes(&g, [(vec![1, 0], a), (vec![-1, 0], a.conj())]).unwrap();
        let f = inverse(&spec);
        let want = RealField::from_fn(&g, |x| 2.0 * (a.re * x[0].cos() - a.im * x[0].sin())).unwrap();
        let err = f.sub(&want).unwrap().max_abs();
        assert!(err < 1e-13);
    }

    #[test]
    fn shift_multiplies_by_phase() {
        let g = GridSpec::torus(2, 16).unwrap();
        let f = random_field(&g, 3);
        let shifted = f.shifted(&[1, 0]).unwrap();
        let (cf, cs) = (forward(&f), forward(&shifted));
        let h = g.spacing(0);
        for flat in 0..g.len() {
            let xi = g.frequency_vector(flat);
            let phase = Complex64::from_polar(1.0, -xi[0] * h);
            assert!((cs.coeffs()[flat] - cf.coeffs()[flat] * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn linearity() {
        let g = GridSpec::torus(2, 32).unwrap();
        let (f, h) = (random_field(&g, 1), random_field(&g, 2));
        let lhs = forward(&f.axpby(2.5, &h, -0.75).unwrap());
        let rhs = forward(&f)
            .scale(Complex64::new(2.5, 0.0))
            .add(&forward(&h).scale(Complex64::new(-0.75, 0.0)))
            .unwrap();
        for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_round_trip() {
        let g = GridSpec::torus(3, 8).unwrap();
        assert!(inverse(&forward(&RealField::zeros(&g))).is_zero());
    }
}
