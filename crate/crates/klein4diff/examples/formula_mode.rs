//! Abstract formula mode: the constraint and special-case results hold over
//! base curves of any genus, so they can be evaluated from bare ramification
//! tuples (m, M, delta, lambda) plus the base genus, without any function
//! field arithmetic.
//!
//! Run with: cargo run --example formula_mode

use klein4diff::field::FieldCtx;
use klein4diff::predict::{
    decompose_special, epsilon_constraints, filtration_dims, small_ell_predicate,
    canonical_probes, BranchData, SpecialOutcome,
};
use klein4diff::ratfun::ProjPoint;

fn main() {
    let k = FieldCtx::new(4).unwrap();

    // two branch points over a genus-2 base: one case-I point with m = 5 and
    // delta = 1 (the boundary value), one case-II point with m = 1, M = 7
    let data = vec![
        BranchData { m: 5, big_m: 5, delta: 1, lambda: ProjPoint::Finite(k.gpow(7)) },
        BranchData { m: 1, big_m: 7, delta: -1, lambda: ProjPoint::Infinity },
    ];
    for (i, bd) in data.iter().enumerate() {
        bd.validate(i, &k).unwrap();
        println!(
            "point {}: m = {}, M = {}, delta = {}, lambda = {}, small-N only: {}",
            i,
            bd.m,
            bd.big_m,
            bd.delta,
            bd.lambda.to_string(&k),
            small_ell_predicate(bd)
        );
    }
    let g_base = 2;

    let eps = epsilon_constraints(&data, g_base);
    println!("\nconstraints with base genus {}:", g_base);
    for (lambda, v) in &eps.eps1 {
        println!("  eps1[{}] = {}", lambda.to_string(&k), v);
    }
    println!("  eps2 = {}", eps.eps2);
    println!("  eps3 + eps4 = {}", eps.eps3_plus_eps4);
    println!("  eps5 = {} (free summands = base genus)", eps.eps5);

    match decompose_special(&data, g_base) {
        SpecialOutcome::Applies(dec) => {
            println!("\nall points satisfy the small-summand conditions; decomposition:");
            println!("  {}", dec.to_string(&k));
            println!("  total dimension {}", dec.total_dim());
        }
        SpecialOutcome::NotApplicable(bad) => {
            println!("\nsmall-summand conditions fail at points {:?}", bad);
        }
    }

    println!("\nfiltration dimensions r_i per probe:");
    for probe in canonical_probes(&data, &k) {
        let fd = filtration_dims(&data, probe, &k);
        println!(
            "  probe {:<5} r = [{}, {}, {}, {}]",
            probe.0.to_string(&k),
            fd.r0,
            fd.r1,
            fd.r2,
            fd.r3
        );
    }
}
