//! Hardy-Littlewood maximal function on the torus: the pointwise
//! interpolation ratio and the mixed-norm boundedness ratio, each on a grid
//! and its refinement.
//!
//!     cargo run --release --example maximal_estimate

use aniso_gn::families::FunctionFamily;
use aniso_gn::maximal::{maximal_boundedness_check, pointwise_interpolation_multi, RadiusSet};
use aniso_gn::GridSpec;

fn main() -> aniso_gn::Result<()> {
    let family = FunctionFamily::RandomBandlimited { shell: 2, seed: 6 };
    let thetas = [0.25, 0.5, 0.75];
    for size in [64, 128] {
        let g = GridSpec::torus(2, size)?;
        let radii = RadiusSet::dyadic(&g);
        let fields = family.generate(&g, 20)?;
        let mut c = [0.0f64; 3];
        for u in &fields {
            for (k, r) in pointwise_interpolation_multi(u, 1.0, &thetas, &radii)?
                .into_iter()
                .enumerate()
            {
                c[k] = c[k].max(r.p99_ratio);
            }
        }
        let m = maximal_boundedness_check(&fields, &"2,3".parse()?, &radii)?;
        println!(
            "N = {size:>3}, {} radii: pointwise C (theta 1/4, 1/2, 3/4) = {:.4} {:.4} {:.4}; ||Mf||/||f|| in (2,3) <= {:.4}",
            radii.radii().len(),
            c[0],
            c[1],
            c[2],
            m.max_ratio
        );
    }
    Ok(())
}
