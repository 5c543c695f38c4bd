//! Iterated mixed norms of a Gaussian against the closed form, and the
//! dilation law of the quadrature.
//!
//!     cargo run --example mixed_norms

use std::f64::consts::PI;

use aniso_gn::mixed_norm::{holder_check, mixed_lebesgue_norm};
use aniso_gn::{ExponentVec, GridSpec, RealField};

fn main() -> aniso_gn::Result<()> {
    let g = GridSpec::isotropic(2, 256, 16.0)?;
    let u = RealField::from_fn_centered(&g, |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp())?;

    for p in ["2,2", "3,5", "2,4", "1,inf"] {
        let pv: ExponentVec = p.parse()?;
        let exact: f64 = pv
            .to_f64()
            .iter()
            .map(|&q| if q.is_infinite() { 1.0 } else { (2.0 * PI / q).powf(0.5 / q) })
            .product();
        let got = mixed_lebesgue_norm(&u, &pv)?;
        println!("p=({p}): {got:.12} closed form {exact:.12} rel {:.1e}", (got / exact - 1.0).abs());
    }

    let p: ExponentVec = "3,5".parse()?;
    let base = mixed_lebesgue_norm(&u, &p)?;
    let lam = [2.0, 0.5];
    let scaled = mixed_lebesgue_norm(&u.stretched(&lam)?, &p)?;
    println!(
        "stretch (2, 1/2): ratio {:.12}, predicted {:.12}",
        scaled / base,
        2f64.powf(1.0 / 3.0) * 0.5f64.powf(1.0 / 5.0)
    );

    let v = RealField::from_fn(&g, |x| 1.0 + 0.5 * (PI * x[0] / 8.0).cos())?;
    let r = holder_check(&u, &v, &"3,4".parse()?, &"3/2,4/3".parse()?)?;
    println!("Hölder (3,4)x(3/2,4/3) -> (1,1): lhs {:.6} rhs {:.6}", r.lhs, r.rhs);
    Ok(())
}
