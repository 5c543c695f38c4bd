//! Iterated mixed Lebesgue norms and the Hölder / interpolation / Young checks.
//!
//! Norms use the periodic rectangle rule, i.e. they are exact mixed norms of
//! the grid's product of weighted counting measures. The classical
//! inequalities therefore hold for the discrete norms up to roundoff, and the
//! reported slack only absorbs floating point error.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{format_rational, Exponent, ExponentVec, Rational};
use crate::field::{GridSpec, RealField};

/// Multiplicative slack for smooth fields at `N >= 64`.
pub const SMOOTH_SLACK: f64 = 1e-6;
/// Multiplicative slack for rough fields.
pub const ROUGH_SLACK: f64 = 1e-3;

/// `(h Σ|vₖ|^p)^{1/p}` or `max |vₖ|`, scaled by the line maximum to avoid overflow.
fn line_norm(line: &[f64], p: f64, h: f64) -> f64 {
    let m = line.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    let s: f64 = if p == 1.0 {
        line.iter().map(|v| v.abs() / m).sum()
    } else if p == 2.0 {
        line.iter().map(|v| (v / m) * (v / m)).sum()
    } else {
        line.iter().map(|v| (v.abs() / m).powf(p)).sum()
    };
    m * (h * s).powf(1.0 / p)
}

/// Mixed norm with floating point exponents; `p[i]` may be `f64::INFINITY`.
pub fn mixed_norm_f64(grid: &GridSpec, values: &[f64], p: &[f64]) -> Result<f64> {
    if p.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            actual: p.len(),
        });
    }
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: values.len(),
        });
    }
    if let Some(bad) = p.iter().find(|&&x| !(x >= 1.0)) {
        return Err(Error::InvalidExponent(format!("exponent {bad} is below 1")));
    }
    let mut current: Vec<f64> = values.to_vec();
    for axis in 0..grid.dim() {
        let n = grid.sizes()[axis];
        let h = grid.spacing(axis);
        current = current
            .chunks_exact(n)
            .map(|line| line_norm(line, p[axis], h))
            .collect();
    }
    Ok(current[0])
}

/// `‖f‖_{L^{p⃗}}`: `L^{p₁}` in `x₁` innermost, `L^{pₙ}` in `xₙ` outermost.
pub fn mixed_lebesgue_norm(f: &RealField, p: &ExponentVec) -> Result<f64> {
    mixed_norm_f64(f.grid(), f.values(), &p.to_f64())
}

/// Single-pass `‖f‖_{L^p}` over the whole grid.
pub fn lebesgue_norm(f: &RealField, p: f64) -> f64 {
    let h = f.grid().cell_volume();
    line_norm(f.values(), p, h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeExponents {
    pub time_p: Exponent,
    pub space: ExponentVec,
    pub horizon: f64,
}

impl SpaceTimeExponents {
    pub fn new(time_p: Exponent, space: ExponentVec, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time horizon {horizon} must be positive"
            )));
        }
        if let Exponent::Finite(p) = time_p {
            if p < Rational::one() {
                return Err(Error::InvalidExponent(format!(
                    "time exponent {} is below 1",
                    format_rational(p)
                )));
            }
        }
        Ok(Self {
            time_p,
            space,
            horizon,
        })
    }
}

/// `L^p` norm in time of sampled nonnegative values, trapezoid for finite `p`.
pub fn time_norm(times: &[f64], values: &[f64], p: f64) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            actual: values.len(),
        });
    }
    if times.is_empty() {
        return Err(Error::InsufficientData("no snapshots".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("times must be strictly increasing".into()));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    if times.len() < 2 {
        return Err(Error::InsufficientData(
            "a finite time exponent needs at least 2 snapshots".into(),
        ));
    }
    let integrand: Vec<f64> = values.iter().map(|v| v.abs().powf(p)).collect();
    let integral: f64 = times
        .windows(2)
        .zip(integrand.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    Ok(integral.powf(1.0 / p))
}

/// `‖f‖_{L^p(0,T; L^{q⃗})}` over snapshots that cover `[0, T]`.
pub fn spacetime_norm(traj: &[(f64, RealField)], pq: &SpaceTimeExponents) -> Result<f64> {
    check_covers(traj.iter().map(|(t, _)| *t), pq.horizon)?;
    let times: Vec<f64> = traj.iter().map(|(t, _)| *t).collect();
    let spatial = traj
        .iter()
        .map(|(_, f)| mixed_lebesgue_norm(f, &pq.space))
        .collect::<Result<Vec<_>>>()?;
    time_norm(&times, &spatial, pq.time_p.to_f64())
}

pub(crate) fn check_covers(mut times: impl Iterator<Item = f64>, horizon: f64) -> Result<()> {
    let tol = 1e-9 * horizon.max(1.0);
    let first = times
        .next()
        .ok_or_else(|| Error::InsufficientData("empty trajectory".into()))?;
    let last = times.last().unwrap_or(first);
    if first.abs() > tol || (last - horizon).abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "snapshots span [{first}, {last}] but must cover [0, {horizon}]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
}

/// Outcome of checking `lhs <= rhs·(1 + slack)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub slack: f64,
    pub verdict: Verdict,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64, slack: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let verdict = if ratio <= 1.0 + slack {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        Self {
            lhs,
            rhs,
            ratio,
            slack,
            verdict,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

fn check_dims(n: usize, tuples: &[&ExponentVec]) -> Result<()> {
    for t in tuples {
        if t.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: t.len(),
            });
        }
    }
    Ok(())
}

/// `‖fg‖₁ <= ‖f‖_{r⃗}‖g‖_{s⃗}` for conjugate `r⃗`, `s⃗`.
pub fn holder_check(
    f: &RealField,
    g: &RealField,
    r: &ExponentVec,
    s: &ExponentVec,
) -> Result<InequalityReport> {
    let n = f.grid().dim();
    check_dims(n, &[r, s])?;
    for (i, (a, b)) in r.entries().iter().zip(s.entries()).enumerate() {
        if a.reciprocal() + b.reciprocal() != Rational::one() {
            return Err(Error::ExponentRelation(format!(
                "axis {}: 1/{a} + 1/{b} != 1",
                i + 1
            )));
        }
    }
    let ones = ExponentVec::uniform(n, Exponent::int(1))?;
    let lhs = mixed_lebesgue_norm(&f.mul(g)?, &ones)?;
    let rhs = mixed_lebesgue_norm(f, r)? * mixed_lebesgue_norm(g, s)?;
    Ok(InequalityReport::new(lhs, rhs, SMOOTH_SLACK))
}

/// `‖f‖_{r⃗} <= ‖f‖_{s⃗}^α ‖f‖_{t⃗}^{1−α}` where `1/r⃗ = α/s⃗ + (1−α)/t⃗`.
pub fn interpolation_check(
    f: &RealField,
    r: &ExponentVec,
    s: &ExponentVec,
    t: &ExponentVec,
    alpha: Rational,
) -> Result<InequalityReport> {
    check_dims(f.grid().dim(), &[r, s, t])?;
    if alpha < Rational::zero() || alpha > Rational::one() {
        return Err(Error::ExponentRelation(format!(
            "alpha {} outside [0, 1]",
            format_rational(alpha)
        )));
    }
    for (i, ((a, b), c)) in r
        .entries()
        .iter()
        .zip(s.entries())
        .zip(t.entries())
        .enumerate()
    {
        if a.reciprocal() != alpha * b.reciprocal() + (Rational::one() - alpha) * c.reciprocal() {
            return Err(Error::ExponentRelation(format!(
                "axis {}: 1/{a} != α/{b} + (1−α)/{c}",
                i + 1
            )));
        }
    }
    let a = crate::exponent::rational_to_f64(alpha);
    let lhs = mixed_lebesgue_norm(f, r)?;
    let rhs = mixed_lebesgue_norm(f, s)?.powf(a) * mixed_lebesgue_norm(f, t)?.powf(1.0 - a);
    Ok(InequalityReport::new(lhs, rhs, SMOOTH_SLACK))
}

/// Periodic convolution `(f∗g)(x) = ∫ f(y) g(x−y) dy`, computed spectrally.
pub fn convolve(f: &RealField, g: &RealField) -> Result<RealField> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let vol = Complex64::new(f.grid().volume(), 0.0);
    Ok(f.forward().mul(&g.forward())?.scale(vol).inverse())
}

/// `‖f∗g‖_{r⃗} <= ‖f‖_{p⃗}‖g‖_{q⃗}` where `1 + 1/r⃗ = 1/p⃗ + 1/q⃗`.
pub fn young_check(
    f: &RealField,
    g: &RealField,
    p: &ExponentVec,
    q: &ExponentVec,
    r: &ExponentVec,
) -> Result<InequalityReport> {
    check_dims(f.grid().dim(), &[p, q, r])?;
    for (i, ((a, b), c)) in p
        .entries()
        .iter()
        .zip(q.entries())
        .zip(r.entries())
        .enumerate()
    {
        if Rational::one() + c.reciprocal() != a.reciprocal() + b.reciprocal() {
            return Err(Error::ExponentRelation(format!(
                "axis {}: 1 + 1/{c} != 1/{a} + 1/{b}",
                i + 1
            )));
        }
    }
    let lhs = mixed_lebesgue_norm(&convolve(f, g)?, r)?;
    let rhs = mixed_lebesgue_norm(f, p)? * mixed_lebesgue_norm(g, q)?;
    Ok(InequalityReport::new(lhs, rhs, SMOOTH_SLACK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &GridSpec, seed: u64, nonneg: bool) -> RealField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = if nonneg { 0.0 } else { -1.0 };
        let v = (0..grid.len()).map(|_| rng.random_range(lo..1.0)).collect();
        RealField::new(grid.clone(), v).unwrap()
    }

    fn gaussian(grid: &GridSpec) -> RealField {
        RealField::from_fn_centered(grid, |x| x.iter().map(|t| (-t * t / 2.0).exp()).product())
            .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn constant_on_unit_torus() {
        let g = GridSpec::isotropic(2, 16, 1.0).unwrap();
        let f = RealField::constant(&g, 1.0);
        let n = mixed_lebesgue_norm(&f, &ExponentVec::ints(&[3, 5])).unwrap();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn separable_gaussian_closed_form() {
        // tails e^{-32} at the half period
        let g = GridSpec::isotropic(2, 256, 16.0).unwrap();
        let f = gaussian(&g);
        for p in [[2.0, 2.0], [3.0, 5.0], [2.0, 4.0]] {
            let want: f64 = p
                .iter()
                .map(|&pi: &f64| (2.0 * PI / pi).powf(1.0 / (2.0 * pi)))
                .product();
            let got = mixed_norm_f64(&g, f.values(), &p).unwrap();
            assert!(rel(got, want) < 1e-10, "{p:?}: {got} vs {want}");
        }
    }

    #[test]
    fn sup_then_integral() {
        // exp(-|x|) kink limits the rectangle rule; tail e^{-32}
        let g = GridSpec::isotropic(2, 1024, 64.0).unwrap();
        let f = RealField::from_fn_centered(&g, |x| (-x[0].abs() - x[1].abs()).exp()).unwrap();
        let got = mixed_norm_f64(&g, f.values(), &[f64::INFINITY, 1.0]).unwrap();
        // rectangle rule on e^{-|x|}: h·coth(h/2) → 2 as h → 0
        let h = g.spacing(1);
        let exact_discrete = h / (h / 2.0).tanh();
        assert!(rel(got, exact_discrete) < 1e-10);
        assert!(rel(got, 2.0) < 1e-3);
    }

    #[test]
    fn equal_entries_match_single_pass() {
        let g = GridSpec::new(vec![16, 32, 8], vec![1.0, 2.0, 3.0]).unwrap();
        let f = random_field(&g, 11, false);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let a = mixed_norm_f64(&g, f.values(), &[p, p, p]).unwrap();
            assert!(rel(a, lebesgue_norm(&f, p)) < 1e-12);
        }
    }

    #[test]
    fn dilation_law() {
        let g = GridSpec::torus(2, 32).unwrap();
        let f = random_field(&g, 5, false);
        let p = [3.0, 1.5];
        let lam = [2.0, 0.25];
        let base = mixed_norm_f64(&g, f.values(), &p).unwrap();
        let d = f.dilated(&lam).unwrap();
        let got = mixed_norm_f64(d.grid(), d.values(), &p).unwrap();
        let want = base * lam[0].powf(-1.0 / p[0]) * lam[1].powf(-1.0 / p[1]);
        assert!(rel(got, want) < 1e-10);
    }

    #[test]
    fn dimension_mismatch() {
        let g = GridSpec::torus(2, 8).unwrap();
        let f = RealField::zeros(&g);
        assert!(mixed_lebesgue_norm(&f, &ExponentVec::ints(&[2])).is_err());
    }

    #[test]
    fn spacetime_examples() {
        let g = GridSpec::torus(1, 16).unwrap();
        let base = RealField::from_fn(&g, |x| x[0].sin() + 2.0).unwrap();
        let p2 = ExponentVec::ints(&[2]);
        let norm = mixed_lebesgue_norm(&base, &p2).unwrap();
        let times: Vec<f64> = (0..=400).map(|k| k as f64 / 400.0 * 3.0).collect();
        let constant: Vec<_> = times.iter().map(|&t| (t, base.clone())).collect();
        let pq = SpaceTimeExponents::new(Exponent::int(2), p2.clone(), 3.0).unwrap();
        assert!(rel(spacetime_norm(&constant, &pq).unwrap(), 3f64.sqrt() * norm) < 1e-12);

        let times: Vec<f64> = (0..=1000).map(|k| k as f64 / 1000.0).collect();
        let decay: Vec<_> = times.iter().map(|&t| (t, base.scale((-t).exp()))).collect();
        let sup = SpaceTimeExponents::new(Exponent::Infinite, p2.clone(), 1.0).unwrap();
        assert!(rel(spacetime_norm(&decay, &sup).unwrap(), norm) < 1e-14);
        let l1 = SpaceTimeExponents::new(Exponent::int(1), p2.clone(), 1.0).unwrap();
        let want = (1.0 - (-1.0f64).exp()) * norm;
        // trapezoid error dt²/12 relative
        assert!(rel(spacetime_norm(&decay, &l1).unwrap(), want) < 1e-6);

        assert!(spacetime_norm(&decay[..1], &l1).is_err());
        assert!(spacetime_norm(&decay[..500], &l1).is_err());
    }

    #[test]
    fn holder_examples() {
        let g = GridSpec::isotropic(2, 128, 16.0).unwrap();
        let f = gaussian(&g);
        let two = ExponentVec::ints(&[2, 2]);
        let eq = holder_check(&f, &f, &two, &two).unwrap();
        assert!(rel(eq.lhs, eq.rhs) < 1e-12);

        let gr = GridSpec::torus(2, 64).unwrap();
        let (a, b) = (random_field(&gr, 1, false), random_field(&gr, 2, false));
        let r: ExponentVec = "4,3".parse().unwrap();
        let s: ExponentVec = "4/3,3/2".parse().unwrap();
        let rep = holder_check(&a, &b, &r, &s).unwrap();
        assert!(rep.holds() && rep.ratio <= 1.0 + 1e-6);

        let bad: ExponentVec = "3,2".parse().unwrap();
        assert!(matches!(
            holder_check(&a, &b, &two, &bad),
            Err(Error::ExponentRelation(_))
        ));
    }

    #[test]
    fn interpolation_examples() {
        let g = GridSpec::isotropic(2, 128, 16.0).unwrap();
        let f = gaussian(&g);
        let s = ExponentVec::ints(&[2, 2]);
        let t = ExponentVec::ints(&[4, 4]);
        for alpha in [Rational::one(), Rational::zero()] {
            let r = if alpha.is_one() { &s } else { &t };
            let rep = interpolation_check(&f, r, &s, &t, alpha).unwrap();
            assert!(rel(rep.lhs, rep.rhs) < 1e-14);
        }
        let r: ExponentVec = "8/3,8/3".parse().unwrap();
        let rep = interpolation_check(&f, &r, &s, &t, Rational::new(1, 2)).unwrap();
        let closed = |p: f64| (2.0 * PI / p).powf(1.0 / p);
        assert!(rel(rep.lhs, closed(8.0 / 3.0)) < 1e-10);
        assert!(rel(rep.rhs, (closed(2.0) * closed(4.0)).sqrt()) < 1e-10);
        assert!(rep.holds());
        assert!(interpolation_check(&f, &s, &s, &t, Rational::new(1, 2)).is_err());
    }

    #[test]
    fn young_examples() {
        let g = GridSpec::torus(2, 32).unwrap();
        let f = random_field(&g, 4, false);
        let mut delta = vec![0.0; g.len()];
        delta[0] = 1.0 / g.cell_volume();
        let delta = RealField::new(g.clone(), delta).unwrap();
        let c = convolve(&f, &delta).unwrap();
        assert!(c.sub(&f).unwrap().max_abs() < 1e-12);
        let two = ExponentVec::ints(&[2, 2]);
        let one = ExponentVec::ints(&[1, 1]);
        assert!(young_check(&f, &delta, &two, &one, &two).unwrap().holds());

        let gg = GridSpec::isotropic(2, 128, 16.0).unwrap();
        let ga = gaussian(&gg);
        let gb = ga.map(|v| v * v).unwrap();
        let rep = young_check(&ga, &gb, &one, &one, &one).unwrap();
        assert!(rel(rep.lhs, rep.rhs) < 1e-10);

        let (a, b) = (random_field(&g, 8, true), random_field(&g, 9, true));
        let p: ExponentVec = "2,1".parse().unwrap();
        let q: ExponentVec = "1,2".parse().unwrap();
        assert!(young_check(&a, &b, &p, &q, &two).unwrap().holds());
        assert!(young_check(&a, &b, &two, &two, &two).is_err());
    }

    fn exps() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(
            prop_oneof![Just(1.0), Just(2.0), 1.0f64..8.0, Just(f64::INFINITY)],
            2,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn triangle_inequality(seed in 0u64..1000, p in exps()) {
            let g = GridSpec::torus(2, 16).unwrap();
            let (a, b) = (random_field(&g, seed, false), random_field(&g, seed + 7, false));
            let sum = mixed_norm_f64(&g, a.add(&b).unwrap().values(), &p).unwrap();
            let na = mixed_norm_f64(&g, a.values(), &p).unwrap();
            let nb = mixed_norm_f64(&g, b.values(), &p).unwrap();
            prop_assert!(sum <= (na + nb) * (1.0 + 1e-12));
        }

        #[test]
        fn monotone_in_magnitude(seed in 0u64..1000, p in exps(), shrink in 0.0f64..1.0) {
            let g = GridSpec::torus(2, 16).unwrap();
            let a = random_field(&g, seed, false);
            let b = a.map(|v| v * shrink).unwrap();
            let na = mixed_norm_f64(&g, a.values(), &p).unwrap();
            let nb = mixed_norm_f64(&g, b.values(), &p).unwrap();
            prop_assert!(nb <= na * (1.0 + 1e-12));
        }

        #[test]
        fn absolutely_homogeneous(seed in 0u64..1000, p in exps(), c in -5.0f64..5.0) {
            let g = GridSpec::torus(2, 16).unwrap();
            let a = random_field(&g, seed, false);
            let na = mixed_norm_f64(&g, a.values(), &p).unwrap();
            let nc = mixed_norm_f64(&g, a.scale(c).values(), &p).unwrap();
            prop_assert!((nc - c.abs() * na).abs() <= 1e-12 * na.max(1e-300));
        }
    }
}
