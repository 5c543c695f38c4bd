//! Besov-form GN ratios for instances from three branches of the case
//! analysis, over multi-shell fields.
//!
//!     cargo run --release --example besov_gn

use aniso_gn::families::FunctionFamily;
use aniso_gn::gn_algebra::{classify_besov_case, BesovGnParams, GnParams};
use aniso_gn::report::verdict_name;
use aniso_gn::verifier::besov_gn_sweep;
use aniso_gn::{GridSpec, Rational};

fn main() -> aniso_gn::Result<()> {
    let g = GridSpec::torus(2, 64)?;
    let cases = [
        ((0, 1), (1, 1), (19, 22), "8/3,16/3", "2,4", "4,8", Some(Rational::new(1, 2))),
        ((1, 4), (1, 1), (1, 2), "8/3,8/3", "2,2", "4,4/3", None),
        ((0, 1), (1, 2), (1, 2), "16/7,16/5", "4,4", "1,2", Some(Rational::new(3, 4))),
    ];
    for (sigma, s, theta, p, q, r, alpha) in cases {
        let base = GnParams::new(
            Rational::new(sigma.0, sigma.1),
            Rational::new(s.0, s.1),
            Rational::new(theta.0, theta.1),
            p.parse()?,
            q.parse()?,
            r.parse()?,
        )?;
        let params = BesovGnParams::new(base, alpha);
        let tag = classify_besov_case(&params).tag;
        let family = FunctionFamily::MultiShell { shells: vec![0, 1, 2], seed: 9 };
        let rep = besov_gn_sweep(&params, &family, &g, 50)?;
        println!(
            "{:>5}: max ratio {:.5}, change under refinement {:.4}, {}",
            tag.name(),
            rep.max_ratio,
            rep.refinement_change.unwrap_or(f64::NAN),
            verdict_name(rep.verdict)
        );
    }
    Ok(())
}
