//! Artin-Schreier standard-form reduction in characteristic two.
//!
//! For f in k(t), find s such that every pole of f - (s^2 - s) has odd order.
//! The pole orders of the reduced function are the ramification data of the
//! degree-2 extension generated by a root of x^2 - x = f.
//!
//! Per pole, the even-order leading term c * pi^(-2m) is cancelled by
//! subtracting (sqrt(c) pi^(-m))^2 - sqrt(c) pi^(-m); this strictly raises
//! the leading exponent, so it terminates. Since (s1 + s2)^2 - (s1 + s2) =
//! (s1^2 - s1) + (s2^2 - s2) in characteristic two, poles are processed
//! independently, in canonical order (infinity first, then finite poles by
//! coordinate bit pattern).

use crate::field::{FieldCtx, FieldElement};
use crate::ratfun::{laurent_at, roots_with_multiplicity, Poly, ProjPoint, RatFun, RatFunError};
use std::collections::BTreeMap;

/// Result of the reduction: f = reduced + (s^2 - s), with all pole orders of
/// `reduced` positive odd integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardForm {
    pub s: RatFun,
    pub reduced: RatFun,
    pub pole_orders: BTreeMap<ProjPoint, u64>,
}

/// Bring f into standard form. The denominator must split over the field.
pub fn standard_form(f: &RatFun, k: &FieldCtx) -> Result<StandardForm, RatFunError> {
    let mut s = RatFun::zero();
    if !f.is_zero() {
        let (den_roots, cofactor) = roots_with_multiplicity(f.den(), k);
        if cofactor.deg() != Some(0) {
            return Err(RatFunError::NonSplitDenominator { factor: cofactor });
        }
        let mut poles: Vec<ProjPoint> = Vec::new();
        if f.ord_at(ProjPoint::Infinity, k).unwrap() < 0 {
            poles.push(ProjPoint::Infinity);
        }
        poles.extend(den_roots.iter().map(|&(mu, _)| ProjPoint::Finite(mu)));
        for y in poles {
            let mut jet = laurent_at(f, y, 0, k);
            while let Some(lead) = jet.ord() {
                if lead >= 0 || lead % 2 != 0 {
                    break;
                }
                let half = lead / 2; // negative
                let c = jet.coeffs[0];
                let rc = k.sqrt(c);
                s = s.add(&pi_power_term(y, rc, half, k), k);
                // f - (rc pi^half)^2 + rc pi^half kills the even leading term
                jet = jet.add_term(lead, c).add_term(half, rc);
            }
        }
    }
    let s2s = s.square(k).add(&s, k);
    let reduced = f.add(&s2s, k);
    let pole_orders = reduced_pole_orders(&reduced, k)?;
    debug_assert!(pole_orders.values().all(|&e| e % 2 == 1));
    Ok(StandardForm { s, reduced, pole_orders })
}

fn reduced_pole_orders(
    reduced: &RatFun,
    k: &FieldCtx,
) -> Result<BTreeMap<ProjPoint, u64>, RatFunError> {
    let mut map = BTreeMap::new();
    if reduced.is_zero() {
        return Ok(map);
    }
    let o_inf = reduced.ord_at(ProjPoint::Infinity, k).unwrap();
    if o_inf < 0 {
        map.insert(ProjPoint::Infinity, (-o_inf) as u64);
    }
    let (den_roots, cofactor) = roots_with_multiplicity(reduced.den(), k);
    if cofactor.deg() != Some(0) {
        return Err(RatFunError::NonSplitDenominator { factor: cofactor });
    }
    for (mu, e) in den_roots {
        map.insert(ProjPoint::Finite(mu), e as u64);
    }
    Ok(map)
}

/// c * pi^e as a rational function (pi the uniformizer at y).
fn pi_power_term(y: ProjPoint, c: FieldElement, e: i64, k: &FieldCtx) -> RatFun {
    let base = match y {
        ProjPoint::Finite(mu) => {
            RatFun::from_poly(Poly::from_coeffs(vec![mu, FieldElement::ONE]))
        }
        ProjPoint::Infinity => RatFun::t().inv(k).expect("t nonzero"),
    };
    base.pow_i64(e, k).expect("uniformizer nonzero").scale(c, k)
}

/// True when f differs from a constant by s^2 - s. Over the algebraically
/// closed field the cover data models, every constant is itself of that form,
/// so constants count as trivial regardless of their trace in GF(2^n).
pub fn is_artin_schreier_trivial(f: &RatFun, k: &FieldCtx) -> Result<bool, RatFunError> {
    Ok(standard_form(f, k)?.reduced.as_constant().is_some())
}
