//! The Klein four module toolkit on its own: build indecomposables, read
//! the subquotient dimension table, decompose a scrambled direct sum, move
//! parameters around by relabeling the group generators, and use the plain
//! text matrix format.
//!
//! Run with: cargo run --example klein_modules

use klein4diff::field::FieldCtx;
use klein4diff::klein4rep::{
    build_indecomposable, cohort, decompose, filtration_subquotient_dims, format_module,
    parse_module, GroupPerm, IndecLabel, KleinModule,
};
use klein4diff::linalg::Mat;
use klein4diff::ratfun::ProjPoint;

fn main() {
    let k = FieldCtx::new(4).unwrap();
    let lam = ProjPoint::Finite(k.gpow(7));

    // subquotient dimensions (common kernel, probe kernel, kernel of the
    // product, everything) for each kind of indecomposable
    println!("subquotient dimensions [U4/U3, U3/U2, U2/U1, U1/U0]:");
    let probe_hit = lam;
    let probe_miss = ProjPoint::Finite(k.gpow(3));
    for label in [
        IndecLabel::Triv,
        IndecLabel::Free,
        IndecLabel::N { n: 3, lambda: lam },
        IndecLabel::M1 { n: 3 },
        IndecLabel::M2 { n: 3 },
    ] {
        let m = build_indecomposable(label, &k);
        println!(
            "  {:<10} probe at lambda: {:?}   generic probe: {:?}",
            label.to_string(&k),
            filtration_subquotient_dims(&m, probe_hit, &k),
            filtration_subquotient_dims(&m, probe_miss, &k),
        );
    }

    // decompose a scrambled direct sum
    let parts = [
        IndecLabel::N { n: 2, lambda: lam },
        IndecLabel::N { n: 1, lambda: ProjPoint::Infinity },
        IndecLabel::M1 { n: 2 },
        IndecLabel::Free,
        IndecLabel::Triv,
    ];
    let m = KleinModule::direct_sum(
        &parts.iter().map(|&l| build_indecomposable(l, &k)).collect::<Vec<_>>(),
    );
    // scramble by an invertible change of basis
    let n = m.dim;
    let p = {
        let mut p = Mat::identity(n);
        for r in 1..n {
            p.set(r, r - 1, k.gpow(r as u64));
            p.set(0, r, k.gpow(2 * r as u64));
        }
        p
    };
    let scrambled = m.conjugate(&p, &k);
    let dec = decompose(&scrambled, &k).unwrap();
    println!("\nscrambled sum decomposes back to: {}", dec.to_string(&k));

    // relabeling the generators moves the parameter through its cohort
    let nmod = build_indecomposable(IndecLabel::N { n: 2, lambda: lam }, &k);
    let via_xi1 = decompose(&nmod.relabel(&GroupPerm::xi1(), &k), &k).unwrap();
    let via_xi2 = decompose(&nmod.relabel(&GroupPerm::xi2(), &k), &k).unwrap();
    println!("\nN(4,{}) relabeled:", lam.to_string(&k));
    println!("  swap sigma, tau      -> {}", via_xi1.to_string(&k));
    println!("  swap tau, sigma*tau  -> {}", via_xi2.to_string(&k));
    let orbit: Vec<String> = cohort(lam, &k).iter().map(|l| l.to_string(&k)).collect();
    println!("  full cohort: {{{}}}", orbit.join(", "));

    // the plain text module format round-trips
    let text = format_module(&nmod, &k);
    println!("\nmodule file for N(4,{}):\n{}", lam.to_string(&k), text);
    let back = parse_module(&text, &k).unwrap();
    assert_eq!(back, nmod);
    println!("parsed back identically");
}
