//! Exact exponent algebra: θ from the balance relation, admissibility,
//! scaling exponents, the Besov case analysis and the energy criteria.
//!
//!     cargo run --example exponent_check

use aniso_gn::gn_algebra::{
    check_admissible, classify_besov_case, h1_embedding_exponents, ns_criteria_check,
    scaling_exponents, solve_theta, BesovGnParams, GnParams,
};
use aniso_gn::{ExponentVec, Rational};

fn ev(s: &str) -> ExponentVec {
    s.parse().unwrap()
}

fn main() -> aniso_gn::Result<()> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);

    let (params, adm) = solve_theta(zero, one, &ev("4,6"), &ev("2,4"), &ev("2,3"))?;
    let sc = scaling_exponents(&params);
    println!("p=(4,6) q=(2,4) r=(2,3): theta = {}, {}", params.theta, adm.label());
    println!(
        "  tau = [{}], window [{}, 0]",
        sc.tau.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "),
        sc.window_lower
    );

    let off = params.with_theta(Rational::new(5, 11))?;
    println!("  theta = 5/11: {} (defect {})", check_admissible(&off).label(), off.balance_defect());

    let comp = GnParams::new(zero, one, Rational::new(1, 2), ev("4,4"), ev("8,8/7"), ev("8,8/7"))?;
    let sc = scaling_exponents(&comp);
    println!(
        "p=(4,4) q=r=(8,8/7): {}; axes outside window {:?}, sums match {}",
        check_admissible(&comp).label(),
        sc.outside_window,
        sc.sum_matches
    );

    for q in ["2,2,2", "2,4,4", "6,6,6", "4,6,12"] {
        let (a, b) = h1_embedding_exponents(&ev(q))?;
        println!("q=({q}): ||u||_q <= C ||u||_2^{a} ||grad u||_2^{b}");
    }

    let besov = [
        ("0", "1", "19/22", "8/3,16/3", "2,4", "4,8", Some(Rational::new(1, 2))),
        ("1/4", "1", "1/2", "8/3,8/3", "2,2", "4,4/3", None),
        ("1/2", "1", "1/4", "2,2", "2,2", "2,2", None),
        ("0", "1", "1/2", "4,4", "4,4", "1,2", None),
    ];
    for (sigma, s, theta, p, q, r, alpha) in besov {
        let base = GnParams::new(
            sigma.parse::<Rational>().unwrap(),
            s.parse::<Rational>().unwrap(),
            theta.parse::<Rational>().unwrap(),
            ev(p),
            ev(q),
            ev(r),
        )?;
        let v = classify_besov_case(&BesovGnParams::new(base, alpha));
        println!("besov p=({p}) q=({q}) r=({r}): {} {:?}", v.tag.name(), v.status);
    }

    for (kind, q) in [(2u8, "4,4"), (3, "9/5,9/5"), (4, "3,3,3")] {
        let v = ns_criteria_check(kind, None, &ev(q))?;
        println!(
            "criterion {kind}, q=({q}): p = {}, admissible {}",
            v.p.map_or("-".into(), |p| p.to_string()),
            v.admissible
        );
    }
    Ok(())
}
