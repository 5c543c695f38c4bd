//! Bernstein growth for clustered spectra in balls and annuli of radius 2λ.
//!
//!     cargo run --release --example bernstein

use aniso_gn::families::FunctionFamily;
use aniso_gn::report::verdict_name;
use aniso_gn::verifier::{bernstein_sweep, bernstein_twosided_sweep};
use aniso_gn::GridSpec;

fn main() -> aniso_gn::Result<()> {
    let g = GridSpec::torus(2, 512)?;
    let lambdas: Vec<f64> = (1..=6).map(|k| 2f64.powi(k)).collect();
    let ball = FunctionFamily::BallCluster { radius: 2.0, seed: 11 };
    for (k, p, q) in [(1, "1,1", "2,2"), (0, "1,1", "2,2"), (1, "2,2", "2,2"), (2, "2,4", "4,inf")] {
        let r = bernstein_sweep(k, &p.parse()?, &q.parse()?, &lambdas, &ball, &g, 10)?;
        println!(
            "k={k} p=({p}) q=({q}): slope {:.4} predicted {:.4}, {}",
            r.fitted_slope.unwrap_or(f64::NAN),
            r.predicted_slope.unwrap_or(f64::NAN),
            verdict_name(r.verdict)
        );
    }

    let annulus = FunctionFamily::AnnulusCluster { radius: 2.0, seed: 12 };
    let two = bernstein_twosided_sweep(1, &"1,1".parse()?, &lambdas[..5], &annulus, &g, 10)?;
    println!(
        "annulus k=1 p=(1,1): slopes {:.4} / {:.4}, constants {:.4} / {:.4}",
        two.upper.fitted_slope.unwrap_or(f64::NAN),
        two.lower.fitted_slope.unwrap_or(f64::NAN),
        two.c_upper,
        two.c_lower
    );
    Ok(())
}
