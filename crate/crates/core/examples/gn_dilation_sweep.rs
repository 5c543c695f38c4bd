//! GN ratio under dilations: flat for a balanced tuple, growing at the
//! balance defect when θ is moved off, and a family maximum under
//! refinement.
//!
//!     cargo run --release --example gn_dilation_sweep

use aniso_gn::families::FunctionFamily;
use aniso_gn::gn_algebra::{scaling_exponents, solve_theta};
use aniso_gn::report::verdict_name;
use aniso_gn::verifier::{
    axis_lambdas, dilation_sweep, family_boundedness, isotropic_lambdas, predicted_isotropic_slope,
};
use aniso_gn::{ExponentVec, GridSpec, Rational};

fn ev(s: &str) -> ExponentVec {
    s.parse().unwrap()
}

fn main() -> aniso_gn::Result<()> {
    let g = GridSpec::isotropic(2, 128, 16.0)?;
    let u = FunctionFamily::AnisotropicGaussian { width: 1.0, seed: 0 }.member(&g, 0)?;
    let (params, _) = solve_theta(Rational::from_integer(0), Rational::from_integer(1), &ev("4,6"), &ev("2,4"), &ev("2,3"))?;
    let lambdas = isotropic_lambdas(2, -5, 5);

    for theta in [Rational::new(7, 11), Rational::new(5, 11), Rational::new(9, 11)] {
        let p = params.with_theta(theta)?;
        let d = predicted_isotropic_slope(&p);
        let r = dilation_sweep(&u, &p, &lambdas, Some(d))?;
        println!(
            "theta = {theta}: slope {:+.5} (predicted {d:+.5}), R² {:.5}, {}",
            r.fitted_slope.unwrap_or(f64::NAN),
            r.r_squared.unwrap_or(f64::NAN),
            verdict_name(r.verdict)
        );
    }

    // Along one axis the ratio is not scale invariant, but it decays at both
    // ends: like λ^τⱼ as λ → ∞ and like λ^(τⱼ − σ + s(1−θ)) as λ → 0.
    let sc = scaling_exponents(&params);
    for axis in 0..2 {
        let r = dilation_sweep(&u, &params, &axis_lambdas(2, axis, -12, 12), None)?;
        let pts = &r.points;
        let local = |a: usize, b: usize| (pts[b].ratio / pts[a].ratio).ln() / 2f64.ln();
        let hi = sc.tau[axis];
        let lo = hi - sc.window_lower;
        println!(
            "axis {} stretch: end slopes {:+.4} (λ → 0, expect {lo}) and {:+.4} (λ → ∞, expect {hi})",
            axis + 1,
            local(0, 1),
            local(pts.len() - 2, pts.len() - 1),
        );
    }

    let coarse = GridSpec::torus(2, 64)?;
    let family = FunctionFamily::RandomBandlimited { shell: 1, seed: 3 };
    let r = family_boundedness(&params, &family, &coarse, 50)?;
    println!(
        "50 band-limited fields: max ratio {:.5}, change under refinement {:.4}, {}",
        r.max_ratio,
        r.refinement_change.unwrap_or(f64::NAN),
        verdict_name(r.verdict)
    );
    std::fs::create_dir_all("out")?;
    r.write_all(std::path::Path::new("out"), "gn_family")?;
    Ok(())
}
