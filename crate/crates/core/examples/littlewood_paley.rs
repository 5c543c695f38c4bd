//! Dyadic blocks of a multi-shell field, its reconstruction, and block-wise
//! Besov norms next to the Sobolev norm.
//!
//!     cargo run --example littlewood_paley

use aniso_gn::families::FunctionFamily;
use aniso_gn::littlewood_paley::{
    besov_norm, resolvable_range, sobolev_norm, weighted_block_norms, DyadicDecomposition,
    DyadicPartition,
};
use aniso_gn::{Exponent, ExponentVec, GridSpec};

fn main() -> aniso_gn::Result<()> {
    let g = GridSpec::torus(2, 128)?;
    let part = DyadicPartition;
    let range = resolvable_range(&g);
    println!("resolvable blocks {}..={} (profile {})", range.j_min, range.j_max, part.profile_hash());

    let f = FunctionFamily::MultiShell { shells: vec![1, 3], seed: 4 }.member(&g, 0)?;
    let dec = DyadicDecomposition::new(&f, &part);
    let back = dec.reconstruct();
    let err = back.sub(&f)?.max_abs() / f.max_abs();
    println!("reconstruction max error {err:.2e}");

    let p: ExponentVec = "2,4".parse()?;
    for (j, w) in weighted_block_norms(&f, 1.0, &p, &part)? {
        if w > 1e-12 {
            println!("  j = {j:>2}: 2^j ||Delta_j f||_(2,4) = {w:.6}");
        }
    }
    for r in [Exponent::int(1), Exponent::int(2), Exponent::Infinite] {
        println!("B^1_((2,4),{r}) = {:.6}", besov_norm(&f, 1.0, &p, r, &part)?);
    }
    println!("H^1_(2,4)      = {:.6}", sobolev_norm(&f, 1.0, &p)?);
    Ok(())
}
