//! 2D Navier-Stokes: Taylor-Green against its exact decay, energy budget
//! residuals, and the truncated flux as the cutoff grows for a random flow.
//!
//!     cargo run --release --example navier_stokes_energy

use aniso_gn::ns::diagnostics::{
    criteria_norms, energy_budget, flux_convergence, flux_holder_chain, max_abs_residual,
};
use aniso_gn::ns::{decaying_random, taylor_green, NsSolver};
use aniso_gn::{Exponent, GridSpec};

fn main() -> aniso_gn::Result<()> {
    let g = GridSpec::torus(2, 64)?;
    let nu = 0.1;
    let solver = NsSolver::new(&g, nu)?;

    let tg = solver.run(&taylor_green(&g, nu, 0.0)?, 0.002, 1.0, 1)?;
    let (t, v) = tg.snapshots.last().expect("snapshots");
    let exact = taylor_green(&g, nu, *t)?;
    let err = v[0].sub(&exact[0])?.max_abs().max(v[1].sub(&exact[1])?.max_abs());
    println!("Taylor-Green t = {t}: max error {err:.2e}");
    println!("  max |energy residual| {:.2e}", max_abs_residual(&energy_budget(&tg)?));

    let rnd = solver.run(&decaying_random(&g, 1)?, 0.002, 0.5, 5)?;
    println!("random flow: max |energy residual| {:.2e}", max_abs_residual(&energy_budget(&rnd)?));
    let ns: Vec<i32> = (0..=6).collect();
    let flux = flux_convergence(&rnd, &ns)?;
    let q = "4,4".parse()?;
    let chain = flux_holder_chain(&rnd, &ns, Exponent::int(4), &q)?;
    for (pt, f) in chain.iter().zip(&flux.flux) {
        println!(
            "  N = {}: flux {f:+.4e}, tail norm {:.4e}, constant {}",
            pt.n,
            pt.tail_dual,
            pt.constant.map_or("-".into(), |c| format!("{c:.4}"))
        );
    }
    println!("  strictly decreasing beyond N = 3: {}", flux.strictly_decreasing_after(3));

    for (kind, p) in [(1u8, Some(Exponent::int(4))), (2, None), (3, None), (4, None)] {
        let q = match kind {
            3 => "9/5,9/5".parse()?,
            4 => "3,3".parse()?,
            _ => "4,4".parse()?,
        };
        let rep = criteria_norms(&rnd, kind, p, &q)?;
        let vals: Vec<String> = rep
            .norms
            .iter()
            .map(|n| format!("{} in L^{} L^({}) = {:.4}", n.quantity, n.time_p, n.space, n.value))
            .collect();
        println!("criterion {kind}: {}", vals.join(", "));
    }
    Ok(())
}
