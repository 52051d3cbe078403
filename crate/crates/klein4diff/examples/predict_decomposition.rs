//! Closed-form prediction of the module structure of the holomorphic
//! differentials, for the one-branch-point families: the N-summand sizes
//! grow linearly with the ramification jump, demonstrating summands of
//! arbitrarily large dimension.
//!
//! Run with: cargo run --example predict_decomposition

use klein4diff::cover::analyze;
use klein4diff::field::{FieldCtx, FieldElement};
use klein4diff::local::compute_all;
use klein4diff::predict::{
    branch_data, check_sum_ell_criterion, decompose_p1, epsilon_constraints, point_summands,
};
use klein4diff::klein4rep::IndecLabel;
use klein4diff::ratfun::{Poly, RatFun};

fn main() {
    let k = FieldCtx::new(4).unwrap();
    let l0 = k.generator();
    let l2 = k.mul(l0, l0);

    for d in 1..=4u64 {
        // p = t^(8d+3), q = lambda0^2 t^(8d+3) (1 + t^-4): one branch point
        // at infinity with m = M = 8d+3, delta = 2
        let e = (8 * d + 3) as usize;
        let p = RatFun::from_poly(Poly::monomial(FieldElement::ONE, e));
        let q = RatFun::from_poly(Poly::monomial(l2, e).add(&Poly::monomial(l2, e - 4)));
        let an = analyze(&p, &q, &k).unwrap();
        let locals = compute_all(&an, &k).unwrap();
        let data = branch_data(&locals);

        let ps = point_summands(&data[0]);
        let dec = decompose_p1(&data);
        println!("d = {}: m = M = {}, delta = {}", d, 8 * d + 3, data[0].delta);
        println!("  N-sizes: ell = {}, a1 = {}, a2 = {}", ps.ell, ps.a1, ps.a2);
        println!("  decomposition: {}", dec.to_string(&k));
        println!("  total dim {} = genus {}", dec.total_dim(), an.genus);

        // the constraints any decomposition must satisfy
        let eps = epsilon_constraints(&data, 0);
        println!(
            "  constraints: eps2 = {}, eps3 + eps4 = {}, eps5 = {}",
            eps.eps2, eps.eps3_plus_eps4, eps.eps5
        );
        let ell_sum: u64 = dec
            .entries()
            .filter_map(|(l, m)| match l {
                IndecLabel::N { n, .. } => Some(n * m),
                _ => None,
            })
            .sum();
        let crit = check_sum_ell_criterion(&data, ell_sum);
        println!(
            "  sum of N-sizes {} vs bound {}: attained = {}",
            ell_sum,
            crit.bound,
            ell_sum == crit.bound
        );
        println!();
    }
}
