//! A miniature oracle sweep: random admissible covers, closed-form
//! prediction versus independent linear algebra on the differential basis.
//!
//! Run with: cargo run --example oracle_sweep

use klein4diff::cover::analyze;
use klein4diff::field::{FieldCtx, FieldElement};
use klein4diff::holo::{action_matrices, build_basis, pi_power};
use klein4diff::klein4rep::decompose;
use klein4diff::local::compute_all;
use klein4diff::predict::{branch_data, decompose_p1};
use klein4diff::ratfun::{ProjPoint, RatFun};

/// A deliberately simple deterministic generator.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn main() {
    let k = FieldCtx::new(8).unwrap();
    let mut rng = Lcg(42);
    let mut matches = 0;
    for trial in 0..10 {
        // one or two branch points with random small ramification data
        let n_points = 1 + rng.below(2);
        let mut p = RatFun::zero();
        let mut q = RatFun::zero();
        let mut used = Vec::new();
        for _ in 0..n_points {
            let y = loop {
                let cand = ProjPoint::Finite(k.elem(rng.below(256)));
                if !used.contains(&cand) {
                    break cand;
                }
            };
            used.push(y);
            let m = 2 * rng.below(4) + 1;
            let cp = k.elem(1 + rng.below(255));
            let ratio = loop {
                let r = k.elem(1 + rng.below(255));
                if r != FieldElement::ONE {
                    break r;
                }
            };
            if rng.below(2) == 0 {
                // case I: equal orders with leading ratio outside {0, 1}
                p = p.add(&pi_power(y, -(m as i64), &k).scale(cp, &k), &k);
                q = q.add(&pi_power(y, -(m as i64), &k).scale(k.mul(cp, ratio), &k), &k);
            } else {
                // unequal odd orders
                let big = m + 2 + 2 * rng.below(2);
                p = p.add(&pi_power(y, -(m as i64), &k).scale(cp, &k), &k);
                q = q.add(&pi_power(y, -(big as i64), &k).scale(ratio, &k), &k);
            }
        }
        let an = analyze(&p, &q, &k).unwrap();
        let locals = compute_all(&an, &k).unwrap();
        let predicted = decompose_p1(&branch_data(&locals));
        let basis = build_basis(&an, &locals, &k);
        let module = action_matrices(&an, &basis, &k).unwrap();
        let verified = decompose(&module, &k).unwrap();
        let ok = predicted == verified;
        matches += ok as u32;
        println!(
            "trial {:>2}: genus {:>3}  {}  {}",
            trial,
            an.genus,
            if ok { "MATCH   " } else { "MISMATCH" },
            verified.to_string(&k)
        );
    }
    println!("\n{}/10 matched", matches);
}
