//! Planar periodic incompressible Navier-Stokes, pseudo-spectral.
//!
//! The nonlinear term is evaluated in divergence form `∂ⱼ(vⱼvᵢ)` with the
//! 2/3 rule, projected by Leray, and advanced with a third-order SSP
//! Runge-Kutta scheme on top of the exact viscous integrating factor.

pub mod diagnostics;
pub mod store;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FunctionFamily;
use crate::field::{GridSpec, RealField, SpectralField, VectorField};

/// Largest accepted advective CFL number `dt·max(|v₁|/h₁ + |v₂|/h₂)`.
pub const CFL_LIMIT: f64 = 1.0;

/// Recorded solution `(t, v(t))` at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityTrajectory {
    pub grid: GridSpec,
    pub nu: f64,
    pub dt: f64,
    pub snapshots: Vec<(f64, VectorField)>,
}

impl VelocityTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|(t, _)| *t).collect()
    }

    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |(t, _)| *t)
    }

    /// Pointwise `|v|` at every snapshot.
    pub fn speed(&self) -> Vec<(f64, RealField)> {
        self.snapshots
            .iter()
            .map(|(t, v)| (*t, magnitude(v)))
            .collect()
    }
}

/// Pointwise Euclidean norm of a list of fields.
pub fn magnitude(fields: &[RealField]) -> RealField {
    let grid = fields[0].grid().clone();
    let values = (0..grid.len())
        .map(|i| fields.iter().map(|f| f.values()[i].powi(2)).sum::<f64>().sqrt())
        .collect();
    RealField::from_parts_unchecked(grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Scenario {
    TaylorGreen,
    DecayingRandom { seed: u64 },
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor-green" => Ok(Scenario::TaylorGreen),
            "decaying-random" => Ok(Scenario::DecayingRandom { seed: 0 }),
            other => Err(Error::Parse(format!(
                "unknown scenario '{other}' (expected taylor-green or decaying-random)"
            ))),
        }
    }
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::TaylorGreen => "taylor-green",
            Scenario::DecayingRandom { .. } => "decaying-random",
        }
    }

    pub fn initial(&self, grid: &GridSpec, nu: f64) -> Result<VectorField> {
        match self {
            Scenario::TaylorGreen => taylor_green(grid, nu, 0.0),
            Scenario::DecayingRandom { seed } => decaying_random(grid, *seed),
        }
    }
}

fn require_planar(grid: &GridSpec) -> Result<()> {
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: grid.dim(),
        });
    }
    Ok(())
}

/// `v = (−b cos(ax₁) sin(bx₂), a sin(ax₁) cos(bx₂))·e^{−ν(a²+b²)t}` with
/// `a = 2π/L₁`, `b = 2π/L₂`; on the `2π` torus this is the classical
/// `(−cos x₁ sin x₂, sin x₁ cos x₂)e^{−2νt}`.
pub fn taylor_green(grid: &GridSpec, nu: f64, t: f64) -> Result<VectorField> {
    require_planar(grid)?;
    let a = 2.0 * std::f64::consts::PI / grid.lengths()[0];
    let b = 2.0 * std::f64::consts::PI / grid.lengths()[1];
    let decay = (-nu * (a * a + b * b) * t).exp();
    Ok(vec![
        RealField::from_fn(grid, |x| -b * (a * x[0]).cos() * (b * x[1]).sin() * decay)?,
        RealField::from_fn(grid, |x| a * (a * x[0]).sin() * (b * x[1]).cos() * decay)?,
    ])
}

/// Divergence-free field `(∂₂ψ, −∂₁ψ)` from a stream function on shells
/// 0..=2, scaled to unit maximum speed.
pub fn decaying_random(grid: &GridSpec, seed: u64) -> Result<VectorField> {
    require_planar(grid)?;
    let psi = FunctionFamily::MultiShell {
        shells: vec![0, 1, 2],
        seed,
    }
    .member(grid, 0)?
    .forward();
    let v = vec![
        crate::spectral::partial_derivative_spectral(&psi, &[0, 1])?.inverse(),
        crate::spectral::partial_derivative_spectral(&psi, &[1, 0])?
            .inverse()
            .scale(-1.0),
    ];
    let top = magnitude(&v).max_abs();
    Ok(v.iter().map(|f| f.scale(1.0 / top)).collect())
}

/// Per-mode data shared by all steps.
#[derive(Debug, Clone)]
struct Modes {
    /// Derivative wavenumbers, Nyquist entries zeroed.
    k: [Vec<f64>; 2],
    /// `|ξ|²`, Nyquist included.
    k2: Vec<f64>,
    keep: Vec<bool>,
}

impl Modes {
    fn new(grid: &GridSpec) -> Self {
        let len = grid.len();
        let mut k = [vec![0.0; len], vec![0.0; len]];
        let mut k2 = vec![0.0; len];
        let mut keep = vec![true; len];
        for flat in 0..len {
            let idx = grid.unravel(flat);
            for axis in 0..2 {
                let xi = grid.frequency(axis, idx[axis]);
                k2[flat] += xi * xi;
                if !grid.is_nyquist(axis, idx[axis]) {
                    k[axis][flat] = xi;
                }
                let m = grid.wavenumber(axis, idx[axis]).unsigned_abs() as usize;
                if 3 * m >= grid.sizes()[axis] {
                    keep[flat] = false;
                }
            }
        }
        Self { k, k2, keep }
    }
}

type State = [Vec<Complex64>; 2];

/// Pseudo-spectral solver on a planar grid.
#[derive(Debug, Clone)]
pub struct NsSolver {
    grid: GridSpec,
    nu: f64,
    nonlinear: bool,
    modes: Modes,
}

impl NsSolver {
    pub fn new(grid: &GridSpec, nu: f64) -> Result<Self> {
        require_planar(grid)?;
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("viscosity {nu} must be positive")));
        }
        Ok(Self {
            grid: grid.clone(),
            nu,
            nonlinear: true,
            modes: Modes::new(grid),
        })
    }

    /// The linear Stokes flow: nonlinear term switched off.
    pub fn stokes(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    fn to_state(&self, v: &[RealField]) -> Result<State> {
        if v.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: v.len(),
            });
        }
        for f in v {
            if f.grid() != &self.grid {
                return Err(Error::GridMismatch);
            }
        }
        Ok([v[0].forward().coeffs().to_vec(), v[1].forward().coeffs().to_vec()])
    }

    fn to_fields(&self, u: &State) -> VectorField {
        u.iter()
            .map(|c| {
                SpectralField::new(self.grid.clone(), c.clone())
                    .expect("state length matches grid")
                    .inverse()
            })
            .collect()
    }

    fn physical(&self, c: Vec<Complex64>) -> RealField {
        SpectralField::new(self.grid.clone(), c)
            .expect("length matches grid")
            .inverse()
    }

    fn project(&self, u: &mut State) {
        let m = &self.modes;
        let [u0, u1] = u;
        u0.par_iter_mut()
            .zip(u1.par_iter_mut())
            .enumerate()
            .for_each(|(i, (a, b))| {
                let (k0, k1) = (m.k[0][i], m.k[1][i]);
                let kk = k0 * k0 + k1 * k1;
                if kk > 0.0 {
                    let dot = (*a * k0 + *b * k1) / kk;
                    *a -= dot * k0;
                    *b -= dot * k1;
                }
            });
    }

    fn dealias(&self, u: &mut State) {
        for c in u.iter_mut() {
            for (v, keep) in c.iter_mut().zip(&self.modes.keep) {
                if !keep {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// `−P ∂ⱼ(vⱼvᵢ)`, dealiased.
    fn nonlinear_term(&self, u: &State) -> State {
        if !self.nonlinear {
            return [
                vec![Complex64::new(0.0, 0.0); self.grid.len()],
                vec![Complex64::new(0.0, 0.0); self.grid.len()],
            ];
        }
        let v = self.to_fields(u);
        let prod = |a: &RealField, b: &RealField| -> Vec<Complex64> {
            let p = a.mul(b).expect("same grid");
            p.forward().coeffs().to_vec()
        };
        let (v0, v1) = (&v[0], &v[1]);
        let p00 = prod(v0, v0);
        let p01 = prod(v0, v1);
        let p11 = prod(v1, v1);
        let m = &self.modes;
        let i = Complex64::new(0.0, 1.0);
        let mut out: State = [
            (0..self.grid.len())
                .map(|n| -i * (m.k[0][n] * p00[n] + m.k[1][n] * p01[n]))
                .collect(),
            (0..self.grid.len())
                .map(|n| -i * (m.k[0][n] * p01[n] + m.k[1][n] * p11[n]))
                .collect(),
        ];
        self.dealias(&mut out);
        self.project(&mut out);
        out
    }

    fn decay(&self, tau: f64, c: &[Complex64]) -> Vec<Complex64> {
        c.iter()
            .zip(&self.modes.k2)
            .map(|(v, k2)| v * (-self.nu * k2 * tau).exp())
            .collect()
    }

    /// `dt·max(|v₁|/h₁ + |v₂|/h₂)`.
    pub fn cfl_number(&self, v: &[RealField], dt: f64) -> f64 {
        let (h0, h1) = (self.grid.spacing(0), self.grid.spacing(1));
        v[0].values()
            .iter()
            .zip(v[1].values())
            .map(|(a, b)| a.abs() / h0 + b.abs() / h1)
            .fold(0.0, f64::max)
            * dt
    }

    fn step_state(&self, u: &State, dt: f64) -> State {
        let combine = |a: &[Complex64], wa: f64, b: &[Complex64], wb: f64| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x * wa + y * wb).collect()
        };
        let euler = |u: &State| -> State {
            let n = self.nonlinear_term(u);
            [combine(&u[0], 1.0, &n[0], dt), combine(&u[1], 1.0, &n[1], dt)]
        };
        let e1 = euler(u);
        let u1: State = [self.decay(dt, &e1[0]), self.decay(dt, &e1[1])];
        let e2 = euler(&u1);
        let u2: State = std::array::from_fn(|c| {
            combine(
                &self.decay(0.5 * dt, &u[c]),
                0.75,
                &self.decay(-0.5 * dt, &e2[c]),
                0.25,
            )
        });
        let e3 = euler(&u2);
        std::array::from_fn(|c| {
            combine(
                &self.decay(dt, &u[c]),
                1.0 / 3.0,
                &self.decay(0.5 * dt, &e3[c]),
                2.0 / 3.0,
            )
        })
    }

    /// One step of size `dt`; fails if the CFL number exceeds [`CFL_LIMIT`].
    pub fn step(&self, v: &[RealField], dt: f64) -> Result<VectorField> {
        let cfl = self.cfl_number(v, dt);
        if cfl > CFL_LIMIT {
            return Err(Error::CflViolation {
                number: cfl,
                limit: CFL_LIMIT,
            });
        }
        let u = self.to_state(v)?;
        Ok(self.to_fields(&self.step_state(&u, dt)))
    }

    /// Leray projection followed by the 2/3 truncation.
    pub fn prepare(&self, v: &[RealField]) -> Result<VectorField> {
        let mut u = self.to_state(v)?;
        self.dealias(&mut u);
        self.project(&mut u);
        Ok(self.to_fields(&u))
    }

    /// `⟨N(v), v⟩ / (‖N(v)‖‖v‖)` for the dealiased projected nonlinear term;
    /// zero up to roundoff for band-limited divergence-free `v`.
    pub fn energy_transfer(&self, v: &[RealField]) -> Result<f64> {
        let u = self.to_state(v)?;
        let n = self.nonlinear_term(&u);
        let nf = [self.physical(n[0].clone()), self.physical(n[1].clone())];
        let dot: f64 = (0..2)
            .map(|c| nf[c].mul(&v[c]).map(|f| f.integral()))
            .sum::<Result<f64>>()?;
        let norm = |f: &[RealField]| -> f64 {
            f.iter().map(|g| g.mul(g).map_or(0.0, |h| h.integral())).sum::<f64>().sqrt()
        };
        let scale = norm(&nf) * norm(v);
        Ok(if scale > 0.0 { dot / scale } else { 0.0 })
    }

    /// Integrates from `v0` (projected and truncated first) to `t_end` with
    /// step `dt`, recording every `snapshot_every` steps and the final state.
    ///
    /// The step is shortened so that a whole number of steps reaches `t_end`.
    pub fn run(
        &self,
        v0: &[RealField],
        dt: f64,
        t_end: f64,
        snapshot_every: usize,
    ) -> Result<VelocityTrajectory> {
        if !(dt > 0.0 && t_end > 0.0) || snapshot_every == 0 {
            return Err(Error::InvalidArgument(
                "dt, t_end and the snapshot interval must be positive".into(),
            ));
        }
        let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
        let dt = t_end / steps as f64;
        let v = self.prepare(v0)?;
        let cfl = self.cfl_number(&v, dt);
        if cfl > CFL_LIMIT {
            return Err(Error::CflViolation {
                number: cfl,
                limit: CFL_LIMIT,
            });
        }
        let mut u = self.to_state(&v)?;
        let mut snapshots = vec![(0.0, v)];
        for n in 1..=steps {
            u = self.step_state(&u, dt);
            if n % snapshot_every == 0 || n == steps {
                let fields = self.to_fields(&u);
                let cfl = self.cfl_number(&fields, dt);
                if !cfl.is_finite() || cfl > CFL_LIMIT {
                    return Err(Error::CflViolation {
                        number: cfl,
                        limit: CFL_LIMIT,
                    });
                }
                snapshots.push((n as f64 * dt, fields));
            }
        }
        Ok(VelocityTrajectory {
            grid: self.grid.clone(),
            nu: self.nu,
            dt,
            snapshots,
        })
    }
}

/// Leray projection `v − ∇Δ⁻¹∇·v` of a planar or spatial vector field.
pub fn leray_project(v: &[RealField]) -> Result<VectorField> {
    let grid = v
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty vector field".into()))?
        .grid()
        .clone();
    let n = grid.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    let mut spec: Vec<Vec<Complex64>> = v.iter().map(|f| f.forward().coeffs().to_vec()).collect();
    for flat in 0..grid.len() {
        let idx = grid.unravel(flat);
        let k: Vec<f64> = (0..n)
            .map(|a| {
                if grid.is_nyquist(a, idx[a]) {
                    0.0
                } else {
                    grid.frequency(a, idx[a])
                }
            })
            .collect();
        let kk: f64 = k.iter().map(|x| x * x).sum();
        if kk == 0.0 {
            continue;
        }
        let dot = (0..n).map(|a| spec[a][flat] * k[a]).sum::<Complex64>() / kk;
        for a in 0..n {
            spec[a][flat] -= dot * k[a];
        }
    }
    spec.into_iter()
        .map(|c| Ok(SpectralField::new(grid.clone(), c)?.inverse()))
        .collect()
}

/// Spectral divergence `Σ ∂ᵢvᵢ`.
pub fn divergence(v: &[RealField]) -> Result<RealField> {
    let n = v.len();
    let mut out = RealField::zeros(v[0].grid());
    for (axis, f) in v.iter().enumerate() {
        let mut alpha = vec![0u32; n];
        alpha[axis] = 1;
        out = out.add(&crate::spectral::partial_derivative(f, &alpha)?)?;
    }
    Ok(out)
}
