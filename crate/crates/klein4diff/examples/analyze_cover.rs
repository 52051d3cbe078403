//! Ramification analysis of a Klein four cover u^2 - u = p, v^2 - v = q.
//!
//! The analyzer normalizes the coordinate (infinity becomes a branch point,
//! 0 does not ramify), classifies every branch point, and computes the
//! different exponents and the genus by Riemann-Hurwitz.
//!
//! Run with: cargo run --example analyze_cover

use klein4diff::cli::parse_expr;
use klein4diff::cover::analyze;
use klein4diff::field::FieldCtx;
use klein4diff::local::compute_all;
use std::collections::BTreeMap;

fn main() {
    let k = FieldCtx::new(4).unwrap();

    // the four-branch-point cover: alpha of order 3, beta = 1/(1 + alpha g)
    let mut bindings = BTreeMap::new();
    bindings.insert("a".to_string(), parse_expr("g^5", &k, &BTreeMap::new()).unwrap());
    bindings.insert(
        "b".to_string(),
        parse_expr("1/(1 + g^5*g)", &k, &BTreeMap::new()).unwrap(),
    );
    let p = parse_expr("1/(t*(t-1)^3*(t-a)^3*(t-b)^3)", &k, &bindings).unwrap();
    let q = parse_expr("a/(t^3*(t-1)*(t-a)^3*(t-b)^3)", &k, &bindings).unwrap();

    let an = analyze(&p, &q, &k).unwrap();
    println!("normalization: {}", if an.normalization.is_identity() {
        "identity".to_string()
    } else {
        an.normalization.to_string(&k)
    });
    println!("genus {}", an.genus);
    println!("one branch point only (Harbater-Katz-Gabber): {}", an.katz_gabber());
    println!();
    println!("y          original   m   M   case  lambda  delta  class");
    let locals = compute_all(&an, &k).unwrap();
    for (bp, ld) in an.branch.iter().zip(&locals) {
        println!(
            "{:<10} {:<10} {:<3} {:<3} {:<5} {:<7} {:<6} {}",
            bp.y.to_string(&k),
            an.original_point(bp.y, &k).to_string(&k),
            bp.m,
            bp.big_m,
            bp.tag.as_str(),
            ld.lambda.to_string(&k),
            ld.delta,
            ld.class.as_str(),
        );
    }
    println!();
    println!("local mixing coefficients b_i (first branch point):");
    let ld = &locals[0];
    for (i, b) in ld.b.iter().enumerate() {
        println!("  b_{} = {}", i, k.elem_to_string(*b));
    }
}
