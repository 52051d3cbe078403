//! The explicit basis of holomorphic differentials over a rational base and
//! the exact action matrices of the group generators on it.
//!
//! Elements of the quartic function field k(t)(u, v) are stored by their
//! coordinates over {1, u~, v~, u~v~}, where u~ = u - s_p and v~ = v - s_q
//! are the reduced generators with u~^2 = u~ + p~ and v~^2 = v~ + q~. The
//! group acts by sigma(u~) = u~, tau(u~) = u~ + 1, sigma(v~) = v~ + 1,
//! tau(v~) = v~, which is a coordinate shuffle requiring no arithmetic.
//!
//! Valuations at a (totally ramified) branch point avoid Puiseux expansions:
//! rewriting an element in the local basis {1, u_y, w~_y, u_y w~_y}, whose
//! orders 0, -2m, -m-2(M-m), -3m-2(M-m) are pairwise distinct mod 4, the
//! valuation is the minimum of 4 ord_y(coefficient) + basis order, achieved
//! by exactly one term.

use crate::cover::{CaseTag, CoverAnalysis, Role};
use crate::field::{FieldCtx, FieldElement};
use crate::klein4rep::KleinModule;
use crate::linalg::Mat;
use crate::local::LocalData;
use crate::ratfun::{Poly, ProjPoint, RatFun};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoloError {
    /// Valuation of the zero element requested.
    ZeroElement,
    /// An action image failed to lie in the span of the basis (bug trap).
    ImageOutsideBasis,
}

impl fmt::Display for HoloError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HoloError::ZeroElement => write!(f, "valuation of the zero element"),
            HoloError::ImageOutsideBasis => {
                write!(f, "group action image does not lie in the basis span")
            }
        }
    }
}

impl std::error::Error for HoloError {}

// ---------------------------------------------------------------------------
// Function field elements
// ---------------------------------------------------------------------------

/// `c[0] + c[1] u~ + c[2] v~ + c[3] u~v~` with rational function coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ffe {
    pub c: [RatFun; 4],
}

impl Ffe {
    pub fn zero() -> Ffe {
        Ffe { c: [RatFun::zero(), RatFun::zero(), RatFun::zero(), RatFun::zero()] }
    }

    pub fn from_k(f: RatFun) -> Ffe {
        Ffe { c: [f, RatFun::zero(), RatFun::zero(), RatFun::zero()] }
    }

    pub fn one() -> Ffe {
        Ffe::from_k(RatFun::one())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|f| f.is_zero())
    }

    pub fn add(&self, other: &Ffe, k: &FieldCtx) -> Ffe {
        Ffe {
            c: [
                self.c[0].add(&other.c[0], k),
                self.c[1].add(&other.c[1], k),
                self.c[2].add(&other.c[2], k),
                self.c[3].add(&other.c[3], k),
            ],
        }
    }

    /// Multiply by a rational function.
    pub fn scale(&self, f: &RatFun, k: &FieldCtx) -> Ffe {
        Ffe {
            c: [
                self.c[0].mul(f, k),
                self.c[1].mul(f, k),
                self.c[2].mul(f, k),
                self.c[3].mul(f, k),
            ],
        }
    }

    /// Full product, using u~^2 = u~ + p~ and v~^2 = v~ + q~.
    pub fn mul(&self, other: &Ffe, an: &CoverAnalysis, k: &FieldCtx) -> Ffe {
        let p = &an.cover.sf_p.reduced;
        let q = &an.cover.sf_q.reduced;
        let mut out = [RatFun::zero(), RatFun::zero(), RatFun::zero(), RatFun::zero()];
        let mut acc = |idx: usize, f: RatFun| {
            out[idx] = out[idx].add(&f, k);
        };
        for i in 0..4 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if other.c[j].is_zero() {
                    continue;
                }
                let f = self.c[i].mul(&other.c[j], k);
                // products of basis elements {1, u, v, uv}
                match (i.min(j), i.max(j), i == j) {
                    (_, _, true) if i == 0 => acc(0, f),
                    (_, _, true) if i == 1 => {
                        // u^2 = u + p
                        acc(1, f.clone());
                        acc(0, f.mul(p, k));
                    }
                    (_, _, true) if i == 2 => {
                        acc(2, f.clone());
                        acc(0, f.mul(q, k));
                    }
                    (_, _, true) => {
                        // (uv)^2 = (u + p)(v + q) = uv + qu + pv + pq
                        acc(3, f.clone());
                        acc(1, f.mul(q, k));
                        acc(2, f.mul(p, k));
                        acc(0, f.mul(&p.mul(q, k), k));
                    }
                    (0, other_idx, _) => acc(other_idx, f),
                    (1, 2, _) => acc(3, f),
                    (1, 3, _) => {
                        // u * uv = (u + p)v = uv + pv
                        acc(3, f.clone());
                        acc(2, f.mul(p, k));
                    }
                    (2, 3, _) => {
                        // v * uv = u(v + q) = uv + qu
                        acc(3, f.clone());
                        acc(1, f.mul(q, k));
                    }
                    _ => unreachable!(),
                }
            }
        }
        Ffe { c: out }
    }

    /// Image under sigma: u~ fixed, v~ -> v~ + 1.
    pub fn apply_sigma(&self, k: &FieldCtx) -> Ffe {
        Ffe {
            c: [
                self.c[0].add(&self.c[2], k),
                self.c[1].add(&self.c[3], k),
                self.c[2].clone(),
                self.c[3].clone(),
            ],
        }
    }

    /// Image under tau: u~ -> u~ + 1, v~ fixed.
    pub fn apply_tau(&self, k: &FieldCtx) -> Ffe {
        Ffe {
            c: [
                self.c[0].add(&self.c[1], k),
                self.c[1].clone(),
                self.c[2].add(&self.c[3], k),
                self.c[3].clone(),
            ],
        }
    }

    /// (sigma - 1) f.
    pub fn sigma_minus_one(&self, k: &FieldCtx) -> Ffe {
        self.apply_sigma(k).add(self, k)
    }

    /// (tau - 1) f.
    pub fn tau_minus_one(&self, k: &FieldCtx) -> Ffe {
        self.apply_tau(k).add(self, k)
    }
}

/// The element playing a local role: u~, v~, or u~ + v~ + (s_p + s_q + s_r).
pub fn role_element(role: Role, an: &CoverAnalysis, k: &FieldCtx) -> Ffe {
    match role {
        Role::U => Ffe {
            c: [RatFun::zero(), RatFun::one(), RatFun::zero(), RatFun::zero()],
        },
        Role::V => Ffe {
            c: [RatFun::zero(), RatFun::zero(), RatFun::one(), RatFun::zero()],
        },
        Role::UV => Ffe {
            c: [an.cover.s_sum(k), RatFun::one(), RatFun::one(), RatFun::zero()],
        },
    }
}

/// c * pi^e at the point y as a rational function.
pub fn pi_power(y: ProjPoint, e: i64, k: &FieldCtx) -> RatFun {
    let base = match y {
        ProjPoint::Finite(mu) => {
            RatFun::from_poly(Poly::from_coeffs(vec![mu, FieldElement::ONE]))
        }
        ProjPoint::Infinity => RatFun::t().inv(k).expect("t nonzero"),
    };
    base.pow_i64(e, k).expect("uniformizer nonzero")
}

/// A jet that happens to be a Laurent polynomial, as an exact rational function.
fn jet_poly_to_ratfun(point: ProjPoint, lead: i64, coeffs: &[FieldElement], k: &FieldCtx) -> RatFun {
    let mut acc = RatFun::zero();
    for (i, &c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&pi_power(point, lead + i as i64, k).scale(c, k), k);
        }
    }
    acc
}

/// The truncated correction alpha~_y as a rational function.
pub fn alpha_tilde(ld: &LocalData, k: &FieldCtx) -> RatFun {
    jet_poly_to_ratfun(ld.y, (-(ld.big_m as i64) + 1) / 2, &ld.a, k)
}

/// The partial mixing series beta_y(j) = pi^-nu (b_0 + ... + b_j pi^j).
pub fn beta_partial(ld: &LocalData, j: usize, k: &FieldCtx) -> RatFun {
    jet_poly_to_ratfun(ld.y, -(ld.nu() as i64), &ld.b[..=j], k)
}

/// The full truncation beta~_y = beta_y(floor(m/4)).
pub fn beta_tilde(ld: &LocalData, k: &FieldCtx) -> RatFun {
    beta_partial(ld, ld.b.len() - 1, k)
}

/// The partial generator w_y(j) = v_y + alpha~_y + beta_y(j) u_y.
pub fn w_partial(an: &CoverAnalysis, ld: &LocalData, j: usize, k: &FieldCtx) -> Ffe {
    let bp = an.branch_at(ld.y).expect("local data matches analysis");
    let u = role_element(bp.u_role, an, k);
    let v = role_element(bp.v_role, an, k);
    v.add(&Ffe::from_k(alpha_tilde(ld, k)), k)
        .add(&u.scale(&beta_partial(ld, j, k), k), k)
}

/// The truncated generator w~_y.
pub fn w_tilde(an: &CoverAnalysis, ld: &LocalData, k: &FieldCtx) -> Ffe {
    w_partial(an, ld, ld.b.len() - 1, k)
}

// ---------------------------------------------------------------------------
// Valuation at a branch point
// ---------------------------------------------------------------------------

/// Coordinates of f over the local basis {1, u_y, w~_y, u_y w~_y}.
fn local_basis_coords(
    f: &Ffe,
    an: &CoverAnalysis,
    ld: &LocalData,
    k: &FieldCtx,
) -> [RatFun; 4] {
    let bp = an.branch_at(ld.y).expect("local data matches analysis");
    // step 1: coordinates over {1, u_y, v_y, u_y v_y}
    let [a0, au, av, auv] = f.c.clone();
    let [b0, b1, b2, b3] = match bp.tag {
        CaseTag::I | CaseTag::IIa => [a0, au, av, auv],
        CaseTag::IIb => [a0, av, au, auv],
        CaseTag::IIc => {
            // u~ = u_y + v_y + s, v~ = v_y, u~v~ = q~ + (1+s)v_y + u_y v_y
            let s = an.cover.s_sum(k);
            let qt = &an.cover.sf_q.reduced;
            let b0 = a0.add(&s.mul(&au, k), k).add(&qt.mul(&auv, k), k);
            let b2 = au
                .add(&av, k)
                .add(&RatFun::one().add(&s, k).mul(&auv, k), k);
            [b0, au, b2, auv]
        }
    };
    // step 2: v_y = w~ + alpha~ + beta~ u_y and
    // u_y v_y = u_y w~ + beta~ p_y + (alpha~ + beta~) u_y
    let alpha = alpha_tilde(ld, k);
    let beta = beta_tilde(ld, k);
    let p_y = an.cover.reduced(bp.u_role);
    let g3 = b3.clone();
    let g2 = b2.clone();
    let g1 = b1
        .add(&beta.mul(&b2, k), k)
        .add(&alpha.add(&beta, k).mul(&b3, k), k);
    let g0 = b0
        .add(&alpha.mul(&b2, k), k)
        .add(&beta.mul(p_y, k).mul(&b3, k), k);
    [g0, g1, g2, g3]
}

/// Order of vanishing of f at the unique point above the branch point.
pub fn valuation(
    f: &Ffe,
    an: &CoverAnalysis,
    ld: &LocalData,
    k: &FieldCtx,
) -> Result<i64, HoloError> {
    if f.is_zero() {
        return Err(HoloError::ZeroElement);
    }
    let (m, big_m) = (ld.m as i64, ld.big_m as i64);
    let basis_ord = [0, -2 * m, -m - 2 * (big_m - m), -3 * m - 2 * (big_m - m)];
    let coords = local_basis_coords(f, an, ld, k);
    let mut best: Option<i64> = None;
    for (g, w) in coords.iter().zip(basis_ord) {
        if let Some(o) = g.ord_at(ld.y, k) {
            let cand = 4 * o + w;
            best = Some(best.map_or(cand, |b: i64| b.min(cand)));
        }
    }
    best.ok_or(HoloError::ZeroElement)
}

// ---------------------------------------------------------------------------
// The basis of holomorphic differentials
// ---------------------------------------------------------------------------

/// Which of the three families a basis element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// pi^-i.
    F1,
    /// pi^-i u_y.
    F2,
    /// pi^-i v_y.
    F3V,
    /// pi^-i w_y(j).
    F3W { j: usize },
}

#[derive(Clone, Debug)]
pub struct BasisElem {
    pub y: ProjPoint,
    pub family: Family,
    pub index: i64,
    pub f: Ffe,
}

/// The full basis (f dt ranges over a k-basis of the holomorphic
/// differentials as f ranges over `elems`).
#[derive(Clone, Debug)]
pub struct Basis {
    pub elems: Vec<BasisElem>,
}

/// Chart offset: the differential dt has a double pole at infinity.
pub fn k_y(y: ProjPoint) -> i64 {
    if y.is_infinity() { -2 } else { 0 }
}

fn s_y(y: ProjPoint) -> i64 {
    if y.is_infinity() { 0 } else { 1 }
}

/// Construct the basis from the analysis and the solved local data.
pub fn build_basis(an: &CoverAnalysis, locals: &[LocalData], k: &FieldCtx) -> Basis {
    let mut elems = Vec::new();
    for (bp, ld) in an.branch.iter().zip(locals) {
        debug_assert_eq!(bp.y, ld.y);
        let y = bp.y;
        let (ky, sy) = (k_y(y), s_y(y));
        let (mu1, mu2, mu3, nu) = (
            bp.mu1() as i64,
            bp.mu2() as i64,
            bp.mu3() as i64,
            bp.nu() as i64,
        );
        let u = role_element(bp.u_role, an, k);
        let v = role_element(bp.v_role, an, k);
        for i in sy..=(mu3 + nu + ky) {
            elems.push(BasisElem {
                y,
                family: Family::F1,
                index: i,
                f: Ffe::from_k(pi_power(y, -i, k)),
            });
        }
        for i in sy..=(mu1 + nu + ky) {
            elems.push(BasisElem {
                y,
                family: Family::F2,
                index: i,
                f: u.scale(&pi_power(y, -i, k), k),
            });
        }
        for i in sy..=(mu1 + ky) {
            elems.push(BasisElem {
                y,
                family: Family::F3V,
                index: i,
                f: v.scale(&pi_power(y, -i, k), k),
            });
        }
        for i in (mu1 + ky + 1)..=(mu2 + ky) {
            let j = (i - mu1 - ky - 1) as usize;
            elems.push(BasisElem {
                y,
                family: Family::F3W { j },
                index: i,
                f: w_partial(an, ld, j, k).scale(&pi_power(y, -i, k), k),
            });
        }
    }
    Basis { elems }
}

/// Is f dt holomorphic on the whole cover?
///
/// At branch points the valuation must clear -4 k_y - d_{x/y}; away from
/// them f must be pole-free, which reduces to pole-freeness of the four
/// coordinates (the reduced generators are integral off the branch locus)
/// plus a degree bound at infinity when infinity is unramified.
pub fn verify_holomorphic(
    f: &Ffe,
    an: &CoverAnalysis,
    locals: &[LocalData],
    k: &FieldCtx,
) -> bool {
    if f.is_zero() {
        return true;
    }
    for (bp, ld) in an.branch.iter().zip(locals) {
        let bound = -4 * k_y(bp.y) - bp.different_exp as i64;
        match valuation(f, an, ld, k) {
            Ok(v) if v >= bound => {}
            _ => return false,
        }
    }
    let branch_points: Vec<ProjPoint> = an.branch.iter().map(|b| b.y).collect();
    for c in &f.c {
        if c.is_zero() {
            continue;
        }
        let (roots, cofactor) = crate::ratfun::roots_with_multiplicity(c.den(), k);
        if cofactor.deg() != Some(0) {
            return false; // pole at a place outside the field: not holomorphic
        }
        for (mu, _) in roots {
            if !branch_points.contains(&ProjPoint::Finite(mu)) {
                return false;
            }
        }
        if !branch_points.contains(&ProjPoint::Infinity)
            && c.ord_at(ProjPoint::Infinity, k).unwrap() < 2
        {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Action matrices
// ---------------------------------------------------------------------------

/// The matrices of sigma - 1 and tau - 1 on the basis, computed symbolically
/// (group action on coordinates, then exact linear solve against the basis).
pub fn action_matrices(
    an: &CoverAnalysis,
    basis: &Basis,
    k: &FieldCtx,
) -> Result<KleinModule, HoloError> {
    let _ = an;
    let g = basis.elems.len();
    let sig_imgs: Vec<Ffe> = basis.elems.iter().map(|e| e.f.sigma_minus_one(k)).collect();
    let tau_imgs: Vec<Ffe> = basis.elems.iter().map(|e| e.f.tau_minus_one(k)).collect();

    // common denominator over all coordinates involved
    let mut den = Poly::one();
    let mut consider = |f: &Ffe| {
        for c in &f.c {
            if !c.is_zero() {
                let g = den.gcd(c.den(), k);
                den = den.mul(&c.den().div_rem(&g, k).0, k);
            }
        }
    };
    for e in &basis.elems {
        consider(&e.f);
    }
    for f in sig_imgs.iter().chain(&tau_imgs) {
        consider(f);
    }

    // flatten: each element becomes the coefficient vector of its four
    // numerator polynomials after clearing the common denominator
    let scaled = |f: &Ffe| -> [Poly; 4] {
        f.c.clone().map(|c| {
            if c.is_zero() {
                Poly::zero()
            } else {
                let (q, r) = den.div_rem(c.den(), k);
                debug_assert!(r.is_zero());
                c.num().mul(&q, k)
            }
        })
    };
    let all_polys: Vec<[Poly; 4]> = basis
        .elems
        .iter()
        .map(|e| scaled(&e.f))
        .chain(sig_imgs.iter().map(&scaled))
        .chain(tau_imgs.iter().map(&scaled))
        .collect();
    let width = all_polys
        .iter()
        .flat_map(|ps| ps.iter().filter_map(|p| p.deg()))
        .max()
        .unwrap_or(0)
        + 1;
    let flat = |ps: &[Poly; 4]| -> Vec<FieldElement> {
        let mut v = vec![FieldElement::ZERO; 4 * width];
        for (slot, p) in ps.iter().enumerate() {
            for (i, &c) in p.coeffs().iter().enumerate() {
                v[slot * width + i] = c;
            }
        }
        v
    };
    let bmat = Mat::from_cols(
        4 * width,
        &all_polys[..g].iter().map(flat).collect::<Vec<_>>(),
    );
    let rhs = Mat::from_cols(
        4 * width,
        &all_polys[g..].iter().map(flat).collect::<Vec<_>>(),
    );
    let x = bmat.solve_matrix(&rhs, k).ok_or(HoloError::ImageOutsideBasis)?;
    let s = Mat::from_fn(g, g, |r, c| x.get(r, c));
    let t = Mat::from_fn(g, g, |r, c| x.get(r, c + g));
    Ok(KleinModule::new(s, t))
}

/// Exact rank of the basis as vectors over the function-field coordinates
/// (for the linear independence check).
pub fn basis_rank(basis: &Basis, k: &FieldCtx) -> usize {
    let mut den = Poly::one();
    for e in &basis.elems {
        for c in &e.f.c {
            if !c.is_zero() {
                let g = den.gcd(c.den(), k);
                den = den.mul(&c.den().div_rem(&g, k).0, k);
            }
        }
    }
    let polys: Vec<[Poly; 4]> = basis
        .elems
        .iter()
        .map(|e| {
            e.f.c.clone().map(|c| {
                if c.is_zero() {
                    Poly::zero()
                } else {
                    c.num().mul(&den.div_rem(c.den(), k).0, k)
                }
            })
        })
        .collect();
    let width = polys
        .iter()
        .flat_map(|ps| ps.iter().filter_map(|p| p.deg()))
        .max()
        .unwrap_or(0)
        + 1;
    let cols: Vec<Vec<FieldElement>> = polys
        .iter()
        .map(|ps| {
            let mut v = vec![FieldElement::ZERO; 4 * width];
            for (slot, p) in ps.iter().enumerate() {
                for (i, &c) in p.coeffs().iter().enumerate() {
                    v[slot * width + i] = c;
                }
            }
            v
        })
        .collect();
    Mat::from_cols(4 * width, &cols).rank(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::analyze;
    use crate::klein4rep::{decompose, Decomposition, IndecLabel};
    use crate::local::compute_all;

    fn k16() -> FieldCtx {
        FieldCtx::new(4).unwrap()
    }

    /// p = t^3, q = alpha^2 t^3 over GF(16) with alpha the order-3 element:
    /// a single case-I branch point at infinity, lambda = alpha, genus 3.
    fn cubic_cover(k: &FieldCtx) -> (CoverAnalysis, Vec<LocalData>, FieldElement) {
        let k4 = FieldCtx::new(2).unwrap();
        let alpha = k.embed_subfield(&k4, k4.generator()).unwrap();
        let a2 = k.mul(alpha, alpha);
        let p = RatFun::from_poly(Poly::monomial(FieldElement::ONE, 3));
        let q = RatFun::from_poly(Poly::monomial(a2, 3));
        let an = analyze(&p, &q, k).unwrap();
        let locals = compute_all(&an, k).unwrap();
        (an, locals, alpha)
    }

    #[test]
    fn valuations_of_local_generators() {
        let k = k16();
        let (an, locals, _) = cubic_cover(&k);
        let ld = &locals[0];
        let bp = &an.branch[0];
        assert_eq!((ld.m, ld.big_m, ld.delta), (3, 3, 0));
        let u = role_element(bp.u_role, &an, &k);
        assert_eq!(valuation(&u, &an, ld, &k), Ok(-6));
        let w = w_tilde(&an, ld, &k);
        assert_eq!(valuation(&w, &an, ld, &k), Ok(-3));
        // ultrametric: 1 + u_y keeps the order of u_y
        let one_plus_u = Ffe::one().add(&u, &k);
        assert_eq!(valuation(&one_plus_u, &an, ld, &k), Ok(-6));
        assert_eq!(valuation(&Ffe::one(), &an, ld, &k), Ok(0));
        assert_eq!(valuation(&Ffe::zero(), &an, ld, &k), Err(HoloError::ZeroElement));
    }

    #[test]
    fn w_tilde_satisfies_its_artin_schreier_equation() {
        // w~^2 - w~ = q_y + beta~^2 p_y + alpha~^2 - alpha~ + (beta~^2 - beta~) u_y
        let k = k16();
        let (an, locals, _) = cubic_cover(&k);
        let ld = &locals[0];
        let bp = &an.branch[0];
        let w = w_tilde(&an, ld, &k);
        let lhs = w.mul(&w, &an, &k).add(&w, &k);
        let alpha = alpha_tilde(ld, &k);
        let beta = beta_tilde(ld, &k);
        let p_y = an.cover.reduced(bp.u_role);
        let q_y = an.cover.reduced(bp.v_role);
        let scalar = q_y
            .add(&beta.square(&k).mul(p_y, &k), &k)
            .add(&alpha.square(&k), &k)
            .add(&alpha, &k);
        let u_coeff = beta.square(&k).add(&beta, &k);
        let rhs = Ffe::from_k(scalar)
            .add(&role_element(bp.u_role, &an, &k).scale(&u_coeff, &k), &k);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_generators_obey_order_bounds() {
        let k = k16();
        // family with m = M = 11, floor(m/4) = 2
        let l0 = k.generator();
        let l2 = k.mul(l0, l0);
        let p = RatFun::from_poly(Poly::monomial(FieldElement::ONE, 11));
        let q = RatFun::from_poly(Poly::monomial(l2, 11).add(&Poly::monomial(l2, 7)));
        let an = analyze(&p, &q, &k).unwrap();
        let locals = compute_all(&an, &k).unwrap();
        let ld = &locals[0];
        let (m, big_m) = (ld.m as i64, ld.big_m as i64);
        for j in 0..(ld.m / 4) as usize {
            let w = w_partial(&an, ld, j, &k);
            let v = valuation(&w, &an, ld, &k).unwrap();
            assert!(v >= -2 * big_m + 4 * j as i64 + 4, "j = {}: {}", j, v);
        }
        let w = w_partial(&an, ld, (ld.m / 4) as usize, &k);
        assert_eq!(valuation(&w, &an, ld, &k).unwrap(), -m - 2 * (big_m - m));
    }

    #[test]
    fn cubic_basis_and_action() {
        let k = k16();
        let (an, locals, alpha) = cubic_cover(&k);
        assert_eq!(an.genus, 3);
        let basis = build_basis(&an, &locals, &k);
        assert_eq!(basis.elems.len(), 3);
        assert_eq!(basis_rank(&basis, &k), 3);
        for e in &basis.elems {
            assert!(verify_holomorphic(&e.f, &an, &locals, &k));
        }
        let module = action_matrices(&an, &basis, &k).unwrap();
        module.check_invariants(&k).unwrap();
        let dec = decompose(&module, &k).unwrap();
        let want = Decomposition::from_labels(&[
            (IndecLabel::N { n: 1, lambda: ProjPoint::Finite(alpha) }, 1),
            (IndecLabel::Triv, 1),
        ]);
        assert_eq!(dec, want);
    }

    #[test]
    fn index_bound_is_sharp() {
        let k = k16();
        let (an, locals, _) = cubic_cover(&k);
        let bp = &an.branch[0];
        // one past the F1 range: pi^-(mu3 + nu + k_y + 1)
        let too_far = (bp.mu3() + bp.nu()) as i64 + k_y(bp.y) + 1;
        let f = Ffe::from_k(pi_power(bp.y, -too_far, &k));
        assert!(!verify_holomorphic(&f, &an, &locals, &k));
        // the last in-range one is holomorphic
        let ok = Ffe::from_k(pi_power(bp.y, -(too_far - 1), &k));
        assert!(verify_holomorphic(&ok, &an, &locals, &k));
    }

    #[test]
    fn action_table_shape_for_case_one() {
        let k = k16();
        let (an, locals, _) = cubic_cover(&k);
        let basis = build_basis(&an, &locals, &k);
        let module = action_matrices(&an, &basis, &k).unwrap();
        // F1 elements are killed by both generators
        for (col, e) in basis.elems.iter().enumerate() {
            if e.family == Family::F1 {
                for r in 0..module.dim {
                    assert!(module.s.get(r, col).is_zero());
                    assert!(module.t.get(r, col).is_zero());
                }
            }
        }
    }
}
