//! Artin-Schreier standard form: replace f by f - (s^2 - s) so that every
//! pole has odd order. The odd pole orders are the ramification jumps of the
//! degree-2 extension defined by x^2 - x = f.
//!
//! Run with: cargo run --example standard_form

use klein4diff::field::FieldCtx;
use klein4diff::ratfun::RatFun;
use klein4diff::reduction::{is_artin_schreier_trivial, standard_form};

fn main() {
    let k = FieldCtx::new(4).unwrap();
    let t = RatFun::t();

    let show = |name: &str, f: &RatFun| {
        let sf = standard_form(f, &k).unwrap();
        println!("f       = {}", f.to_string(&k));
        println!("s       = {}", sf.s.to_string(&k));
        println!("reduced = {}", sf.reduced.to_string(&k));
        for (y, e) in &sf.pole_orders {
            println!("  pole of order {} at {}", e, y.to_string(&k));
        }
        println!("trivial = {}\n", is_artin_schreier_trivial(f, &k).unwrap());
        let _ = name;
    };

    // an even-order pole becomes odd
    show("t^-2", &t.pow_i64(-2, &k).unwrap());

    // a pole that disappears entirely: t^-4 + t^-1 = (t^-2 + t^-1)^2 - (t^-2 + t^-1)
    let f = t.pow_i64(-4, &k).unwrap().add(&t.pow_i64(-1, &k).unwrap(), &k);
    show("t^-4 + t^-1", &f);

    // already reduced: odd orders pass through untouched
    show("t^-3", &t.pow_i64(-3, &k).unwrap());

    // a mixed function with poles at 0, 1 and infinity
    let g = t
        .pow_i64(6, &k)
        .unwrap()
        .add(&t.pow_i64(-2, &k).unwrap(), &k)
        .add(
            &RatFun::one()
                .div(&t.add(&RatFun::one(), &k).pow_i64(4, &k).unwrap(), &k)
                .unwrap(),
            &k,
        );
    show("t^6 + t^-2 + (t+1)^-4", &g);
}
