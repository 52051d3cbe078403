//! Assembly and classification of the Klein four cover given by
//! u^2 - u = p and v^2 - v = q over k(t).
//!
//! After bringing p, q, r = p + q into standard form, every branch point
//! must see poles of all three reduced functions (total ramification), with
//! odd orders {m_y, M_y} where the larger order appears at least twice.
//! Each branch point gets a case tag recording which reduced function has
//! the small order, which fixes the local generators:
//!
//! - case I   (all orders equal):       u_y from u, v_y from v
//! - case IIa (p small):                u_y from u, v_y from v
//! - case IIb (q small):                u_y from v, v_y from u
//! - case IIc (r small):                u_y from u+v, v_y from v
//!
//! The analysis also normalizes the coordinate so that infinity is a branch
//! point and 0 is not, recording the substitution it applied.

use crate::field::{FieldCtx, FieldElement};
use crate::ratfun::{Mobius, ProjPoint, RatFun, RatFunError};
use crate::reduction::{standard_form, StandardForm};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverError {
    /// One of p, q, p+q reduces to a constant (the extension degenerates).
    ArtinSchreierTrivial { which: &'static str },
    /// The cover is unramified (no branch points).
    NotRamified,
    /// A branch point where not all three of p, q, p+q have poles.
    NotTotallyRamified { y: ProjPoint, orders: [Option<u64>; 3] },
    /// Pole orders that cannot occur for p + q + r = (s^2 - s); indicates a bug.
    MalformedOrders { y: ProjPoint, orders: [u64; 3] },
    RatFun(RatFunError),
}

impl fmt::Display for CoverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverError::ArtinSchreierTrivial { which } => {
                write!(f, "{} is of the form s^2 - s (degenerate cover)", which)
            }
            CoverError::NotRamified => write!(f, "the cover is unramified"),
            CoverError::NotTotallyRamified { y, orders } => write!(
                f,
                "branch point with incomplete ramification (reduced pole orders of p, q, p+q: {:?}) at {:?}",
                orders, y
            ),
            CoverError::MalformedOrders { y, orders } => {
                write!(f, "impossible reduced pole orders {:?} at {:?}", orders, y)
            }
            CoverError::RatFun(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for CoverError {}

impl From<RatFunError> for CoverError {
    fn from(e: RatFunError) -> Self {
        CoverError::RatFun(e)
    }
}

/// Which global Artin-Schreier generator plays a local role at a branch point.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Role {
    /// u (reduced function p).
    U,
    /// v (reduced function q).
    V,
    /// u + v (reduced function r = p + q).
    UV,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CaseTag {
    I,
    IIa,
    IIb,
    IIc,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::I => "I",
            CaseTag::IIa => "IIa",
            CaseTag::IIb => "IIb",
            CaseTag::IIc => "IIc",
        }
    }
}

/// A branch point with its ramification data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPoint {
    pub y: ProjPoint,
    /// Lower ramification jump m_y (odd).
    pub m: u64,
    /// Upper jump datum M_y (odd, >= m).
    pub big_m: u64,
    pub tag: CaseTag,
    pub u_role: Role,
    pub v_role: Role,
    /// Different exponent 3(m+1) + 2(M-m).
    pub different_exp: u64,
}

impl BranchPoint {
    pub fn nu(&self) -> u64 {
        (self.big_m - self.m) / 2
    }

    pub fn mu1(&self) -> u64 {
        (self.m + 3) / 4
    }

    pub fn mu2(&self) -> u64 {
        (2 * self.m + 3) / 4
    }

    pub fn mu3(&self) -> u64 {
        (3 * self.m + 3) / 4
    }
}

/// The normalized cover: p, q, r together with their standard forms.
#[derive(Clone, Debug)]
pub struct CoverData {
    pub p: RatFun,
    pub q: RatFun,
    pub r: RatFun,
    pub sf_p: StandardForm,
    pub sf_q: StandardForm,
    pub sf_r: StandardForm,
}

impl CoverData {
    /// The reduced function generating the degree-2 subextension of a role.
    pub fn reduced(&self, role: Role) -> &RatFun {
        match role {
            Role::U => &self.sf_p.reduced,
            Role::V => &self.sf_q.reduced,
            Role::UV => &self.sf_r.reduced,
        }
    }

    /// s_p + s_q + s_r, the constant shift relating u+v tilde to u tilde + v tilde.
    pub fn s_sum(&self, k: &FieldCtx) -> RatFun {
        self.sf_p.s.add(&self.sf_q.s, k).add(&self.sf_r.s, k)
    }
}

/// Full ramification analysis of a cover.
#[derive(Clone, Debug)]
pub struct CoverAnalysis {
    pub cover: CoverData,
    /// Substitution applied: the analyzed functions are the originals
    /// composed with this map (new variable -> old variable).
    pub normalization: Mobius,
    /// Branch points in the normalized coordinate, infinity first.
    pub branch: Vec<BranchPoint>,
    pub genus: u64,
}

impl CoverAnalysis {
    /// Original coordinate of a normalized branch point.
    pub fn original_point(&self, y: ProjPoint, k: &FieldCtx) -> ProjPoint {
        self.normalization.apply_point(y, k)
    }

    /// Exactly one branch point (a Harbater-Katz-Gabber cover).
    pub fn katz_gabber(&self) -> bool {
        self.branch.len() == 1
    }

    pub fn branch_at(&self, y: ProjPoint) -> Option<&BranchPoint> {
        self.branch.iter().find(|b| b.y == y)
    }
}

/// Reduce p, q, r and collect, per pole of any of them, the triple of
/// reduced pole orders.
fn branch_orders(
    cover: &CoverData,
) -> BTreeMap<ProjPoint, [Option<u64>; 3]> {
    let mut map: BTreeMap<ProjPoint, [Option<u64>; 3]> = BTreeMap::new();
    for (slot, sf) in [(0, &cover.sf_p), (1, &cover.sf_q), (2, &cover.sf_r)] {
        for (&y, &e) in &sf.pole_orders {
            map.entry(y).or_insert([None; 3])[slot] = Some(e);
        }
    }
    map
}

fn build_cover(p: &RatFun, q: &RatFun, k: &FieldCtx) -> Result<CoverData, CoverError> {
    let r = p.add(q, k);
    let sf_p = standard_form(p, k)?;
    let sf_q = standard_form(q, k)?;
    let sf_r = standard_form(&r, k)?;
    for (sf, which) in [(&sf_p, "p"), (&sf_q, "q"), (&sf_r, "p+q")] {
        if sf.reduced.as_constant().is_some() {
            return Err(CoverError::ArtinSchreierTrivial { which });
        }
    }
    Ok(CoverData { p: p.clone(), q: q.clone(), r, sf_p, sf_q, sf_r })
}

/// Analyze the cover defined by (p, q), normalizing the coordinate so that
/// infinity is a branch point and 0 is not.
pub fn analyze(p: &RatFun, q: &RatFun, k: &FieldCtx) -> Result<CoverAnalysis, CoverError> {
    let mut cover = build_cover(p, q, k)?;
    let mut orders = branch_orders(&cover);
    if orders.is_empty() {
        return Err(CoverError::NotRamified);
    }
    for (&y, &o) in &orders {
        if o.iter().any(|e| e.is_none()) {
            return Err(CoverError::NotTotallyRamified { y, orders: o });
        }
    }

    // normalization: first make infinity a branch point, then clear 0
    let mut normalization = Mobius::identity();
    if !orders.contains_key(&ProjPoint::Infinity) {
        // send the branch point with the largest lower jump to infinity
        // (ties broken by coordinate order); t_old = mu* + 1/t_new
        let mut best: Option<(u64, FieldElement)> = None;
        for (&y, &o) in &orders {
            let ProjPoint::Finite(mu) = y else { unreachable!() };
            let three: Vec<u64> = o.iter().map(|e| e.unwrap()).collect();
            let m = *three.iter().min().unwrap();
            let better = match best {
                None => true,
                Some((bm, bmu)) => m > bm || (m == bm && mu < bmu),
            };
            if better {
                best = Some((m, mu));
            }
        }
        let (_, mu_star) = best.unwrap();
        normalization = Mobius::inversion_at(mu_star);
    } else if orders.contains_key(&ProjPoint::Finite(FieldElement::ZERO)) {
        // translate by the smallest non-branch coordinate
        let mut mu0 = None;
        for bits in 0..k.size() {
            let cand = FieldElement(bits as u64);
            if !orders.contains_key(&ProjPoint::Finite(cand)) {
                mu0 = Some(cand);
                break;
            }
        }
        // a cover has finitely many branch points but the field could in
        // principle be entirely ramified; that cannot happen with >= 4 elems
        // since a totally ramified cover of P^1 has at most genus-bound many
        let mu0 = mu0.expect("field exhausted by branch points");
        normalization = Mobius::translation(mu0);
    }
    if !normalization.is_identity() {
        let np = p.subst_mobius(&normalization, k);
        let nq = q.subst_mobius(&normalization, k);
        cover = build_cover(&np, &nq, k)?;
        orders = branch_orders(&cover);
        for (&y, &o) in &orders {
            if o.iter().any(|e| e.is_none()) {
                return Err(CoverError::NotTotallyRamified { y, orders: o });
            }
        }
        debug_assert!(orders.contains_key(&ProjPoint::Infinity));
        debug_assert!(!orders.contains_key(&ProjPoint::Finite(FieldElement::ZERO)));
    }

    // classify each branch point
    let mut branch = Vec::with_capacity(orders.len());
    for (&y, &o) in &orders {
        let [mp, mq, mr] = o.map(|e| e.unwrap());
        let (tag, m, big_m, u_role, v_role) = if mp == mq && mq == mr {
            (CaseTag::I, mp, mp, Role::U, Role::V)
        } else if mp < mq && mq == mr {
            (CaseTag::IIa, mp, mq, Role::U, Role::V)
        } else if mq < mp && mp == mr {
            (CaseTag::IIb, mq, mp, Role::V, Role::U)
        } else if mr < mp && mp == mq {
            (CaseTag::IIc, mr, mp, Role::UV, Role::V)
        } else {
            return Err(CoverError::MalformedOrders { y, orders: [mp, mq, mr] });
        };
        debug_assert!(m % 2 == 1 && big_m % 2 == 1);
        let different_exp = 3 * (m + 1) + 2 * (big_m - m);
        branch.push(BranchPoint { y, m, big_m, tag, u_role, v_role, different_exp });
    }
    branch.sort_by_key(|b| b.y);

    let total: u64 = branch.iter().map(|b| b.different_exp).sum();
    debug_assert_eq!(total % 2, 0);
    let genus = total / 2 - 3;
    Ok(CoverAnalysis { cover, normalization, branch, genus })
}
