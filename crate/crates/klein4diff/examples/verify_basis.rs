//! End-to-end verification: materialize the basis of holomorphic
//! differentials, build the exact matrices of the two group generators on
//! it, decompose that module by Kronecker pencil reduction, and compare
//! with the closed-form prediction.
//!
//! Run with: cargo run --example verify_basis

use klein4diff::cover::analyze;
use klein4diff::field::{FieldCtx, FieldElement};
use klein4diff::holo::{action_matrices, build_basis, valuation, verify_holomorphic, Family};
use klein4diff::klein4rep::decompose;
use klein4diff::local::compute_all;
use klein4diff::predict::{branch_data, decompose_p1};
use klein4diff::ratfun::{Poly, RatFun};

fn main() {
    let k = FieldCtx::new(4).unwrap();
    let l0 = k.generator();
    let l2 = k.mul(l0, l0);

    // p = t^3, q = lambda0^2 t^7: one branch point, m = 3 < M = 7
    let p = RatFun::from_poly(Poly::monomial(FieldElement::ONE, 3));
    let q = RatFun::from_poly(Poly::monomial(l2, 7));
    let an = analyze(&p, &q, &k).unwrap();
    let locals = compute_all(&an, &k).unwrap();
    println!("genus {}", an.genus);

    let basis = build_basis(&an, &locals, &k);
    println!("basis of {} differentials f dt:", basis.elems.len());
    for e in &basis.elems {
        let fam = match e.family {
            Family::F1 => "pi^-i".to_string(),
            Family::F2 => "pi^-i u".to_string(),
            Family::F3V => "pi^-i v".to_string(),
            Family::F3W { j } => format!("pi^-i w({})", j),
        };
        let val = valuation(&e.f, &an, &locals[0], &k).unwrap();
        println!(
            "  i = {:<2} {:<12} valuation {:>4}  holomorphic: {}",
            e.index,
            fam,
            val,
            verify_holomorphic(&e.f, &an, &locals, &k)
        );
    }

    let module = action_matrices(&an, &basis, &k).unwrap();
    module.check_invariants(&k).unwrap();
    let verified = decompose(&module, &k).unwrap();
    let predicted = decompose_p1(&branch_data(&locals));
    println!();
    println!("predicted: {}", predicted.to_string(&k));
    println!("verified:  {}", verified.to_string(&k));
    println!("match: {}", predicted == verified);
}
