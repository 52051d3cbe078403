//! Local invariants at a branch point.
//!
//! With u_y, v_y the local Artin-Schreier generators (orders -2m, -2M above
//! the point) and p_y, q_y their reductions, the mixing series beta_y =
//! pi^(-(M-m)/2) (b_0 + b_1 pi + ...) and the correction alpha_y are pinned
//! down by the coefficient equations
//!
//!   q_{2j} + sum_{i1+i2=j} p_{2i1} b_{i2}^2 = 0,        0 <= j <= floor(m/4),
//!   a_j^2   = q_{2j+1} + sum_{i1+i2=j} p_{2i1+1} b_{i2}^2,
//!
//! where p_i, q_i are the Laurent coefficients of p_y, q_y relative to their
//! leading exponents. In characteristic two the b-recursion has the unique
//! solution b_j = sqrt((q_{2j} + sum_{i<j} p_{2(j-i)} b_i^2)/p_0).
//!
//! The classifying pair: lambda_y = b_0 (a case-I point, where b_0 is
//! outside {0,1}) or the tag value (infinity, 0, 1 for IIa, IIb, IIc), and
//! delta_y = first index >= 1 with b_delta != 0 (0 if none, -1 in case II).
//! Branch points fall into three classes by delta: B1 (= 0), B2 (>= 1),
//! B3 (= -1).

use crate::cover::{BranchPoint, CaseTag, CoverAnalysis};
use crate::field::{FieldCtx, FieldElement};
use crate::ratfun::{laurent_at, LaurentJet, ProjPoint};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalError {
    /// The leading coefficient of p_y vanished (precondition violation).
    DegenerateLeadingCoefficient { y: ProjPoint },
    /// A case-I point produced b_0 in {0, 1}, contradicting the theory;
    /// signals an upstream bug or a violated assumption.
    InvalidLambda { y: ProjPoint, b0: FieldElement },
    /// A jet had the wrong leading exponent.
    BadJet { y: ProjPoint, expected: i64, got: Option<i64> },
}

impl fmt::Display for LocalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalError::DegenerateLeadingCoefficient { y } => {
                write!(f, "vanishing leading coefficient at {:?}", y)
            }
            LocalError::InvalidLambda { y, b0 } => {
                write!(f, "b_0 = {:?} lies in {{0,1}} at case-I point {:?}", b0, y)
            }
            LocalError::BadJet { y, expected, got } => {
                write!(f, "jet at {:?} has order {:?}, expected {}", y, got, expected)
            }
        }
    }
}

impl std::error::Error for LocalError {}

/// Partition of branch points by delta.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BranchClass {
    B1,
    B2,
    B3,
}

impl BranchClass {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchClass::B1 => "B1",
            BranchClass::B2 => "B2",
            BranchClass::B3 => "B3",
        }
    }
}

/// Solved local data at one branch point.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub y: ProjPoint,
    pub m: u64,
    pub big_m: u64,
    pub tag: CaseTag,
    /// b_0 .. b_{floor(m/4)}.
    pub b: Vec<FieldElement>,
    /// a_0 .. a_{mu2 - mu1 - 1} (empty when mu2 = mu1).
    pub a: Vec<FieldElement>,
    pub lambda: ProjPoint,
    pub delta: i64,
    pub class: BranchClass,
    /// Laurent data of p_y and q_y to the precision the solvers need.
    pub p_jet: LaurentJet,
    pub q_jet: LaurentJet,
}

impl LocalData {
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

/// Solve the even-index coefficient equations for b_0 .. b_{floor(m/4)}.
pub fn solve_b_coeffs(
    p_jet: &LaurentJet,
    q_jet: &LaurentJet,
    m: u64,
    big_m: u64,
    k: &FieldCtx,
) -> Result<Vec<FieldElement>, LocalError> {
    let y = p_jet.point;
    if p_jet.ord() != Some(-(m as i64)) {
        return Err(LocalError::BadJet { y, expected: -(m as i64), got: p_jet.ord() });
    }
    if q_jet.ord() != Some(-(big_m as i64)) {
        return Err(LocalError::BadJet { y, expected: -(big_m as i64), got: q_jet.ord() });
    }
    let p0 = p_jet.rel_coeff(0);
    if p0.is_zero() {
        return Err(LocalError::DegenerateLeadingCoefficient { y });
    }
    let p0_inv = k.inv(p0).expect("nonzero");
    let count = (m / 4) as usize + 1;
    let mut b: Vec<FieldElement> = Vec::with_capacity(count);
    for j in 0..count {
        let mut rhs = q_jet.rel_coeff(2 * j);
        for (i, &bi) in b.iter().enumerate() {
            let p_term = p_jet.rel_coeff(2 * (j - i));
            rhs = k.add(rhs, k.mul(p_term, k.mul(bi, bi)));
        }
        b.push(k.sqrt(k.mul(rhs, p0_inv)));
    }
    Ok(b)
}

/// Solve the odd-index equations for a_0 .. a_{mu2 - mu1 - 1}.
pub fn solve_a_coeffs(
    p_jet: &LaurentJet,
    q_jet: &LaurentJet,
    b: &[FieldElement],
    m: u64,
    k: &FieldCtx,
) -> Vec<FieldElement> {
    let count = ((2 * m + 3) / 4 - (m + 3) / 4) as usize;
    let mut a = Vec::with_capacity(count);
    for j in 0..count {
        let mut rhs = q_jet.rel_coeff(2 * j + 1);
        for (i, &bi) in b.iter().enumerate().take(j + 1) {
            let p_term = p_jet.rel_coeff(2 * (j - i) + 1);
            rhs = k.add(rhs, k.mul(p_term, k.mul(bi, bi)));
        }
        a.push(k.sqrt(rhs));
    }
    a
}

/// Derive (lambda, delta, class) from the case tag and the b-sequence.
pub fn classify(
    bp: &BranchPoint,
    b: &[FieldElement],
) -> Result<(ProjPoint, i64, BranchClass), LocalError> {
    match bp.tag {
        CaseTag::I => {
            let b0 = b[0];
            if b0.is_zero() || b0 == FieldElement::ONE {
                return Err(LocalError::InvalidLambda { y: bp.y, b0 });
            }
            let delta = b
                .iter()
                .enumerate()
                .skip(1)
                .find(|(_, c)| !c.is_zero())
                .map(|(i, _)| i as i64)
                .unwrap_or(0);
            let class = if delta == 0 { BranchClass::B1 } else { BranchClass::B2 };
            Ok((ProjPoint::Finite(b0), delta, class))
        }
        CaseTag::IIa => Ok((ProjPoint::Infinity, -1, BranchClass::B3)),
        CaseTag::IIb => Ok((ProjPoint::Finite(FieldElement::ZERO), -1, BranchClass::B3)),
        CaseTag::IIc => Ok((ProjPoint::Finite(FieldElement::ONE), -1, BranchClass::B3)),
    }
}

/// Solve and classify one branch point of an analyzed cover.
pub fn compute_local(
    analysis: &CoverAnalysis,
    bp: &BranchPoint,
    k: &FieldCtx,
) -> Result<LocalData, LocalError> {
    let (m, big_m) = (bp.m, bp.big_m);
    // both equation families need relative indices up to 2*floor(m/4) + 1
    let p_prec = -(m as i64) + 2 * (m / 4) as i64 + 2;
    let q_prec = -(big_m as i64) + 2 * (m / 4) as i64 + 2;
    let p_jet = laurent_at(analysis.cover.reduced(bp.u_role), bp.y, p_prec, k);
    let q_jet = laurent_at(analysis.cover.reduced(bp.v_role), bp.y, q_prec, k);
    let b = solve_b_coeffs(&p_jet, &q_jet, m, big_m, k)?;
    let a = solve_a_coeffs(&p_jet, &q_jet, &b, m, k);
    let (lambda, delta, class) = classify(bp, &b)?;
    Ok(LocalData { y: bp.y, m, big_m, tag: bp.tag, b, a, lambda, delta, class, p_jet, q_jet })
}

/// Local data for every branch point, in branch order.
pub fn compute_all(
    analysis: &CoverAnalysis,
    k: &FieldCtx,
) -> Result<Vec<LocalData>, LocalError> {
    analysis.branch.iter().map(|bp| compute_local(analysis, bp, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::analyze;
    use crate::ratfun::{Poly, RatFun};

    fn k16() -> FieldCtx {
        FieldCtx::new(4).unwrap()
    }

    /// Katz-Gabber family (1): p = t^(8d+3), q = lam0^2 t^(8d+3) (1 + t^-4).
    fn kg_case1(d: u64, k: &FieldCtx) -> (RatFun, RatFun) {
        let l0 = k.generator();
        let l2 = k.mul(l0, l0);
        let e = (8 * d + 3) as usize;
        let p = RatFun::from_poly(Poly::monomial(FieldElement::ONE, e));
        let q = RatFun::from_poly(Poly::monomial(l2, e).add(&Poly::monomial(l2, e - 4)));
        (p, q)
    }

    #[test]
    fn kg_case1_b_sequence_and_delta() {
        let k = k16();
        for d in 1..=3u64 {
            let (p, q) = kg_case1(d, &k);
            let an = analyze(&p, &q, &k).unwrap();
            let ld = compute_local(&an, &an.branch[0], &k).unwrap();
            let l0 = k.generator();
            assert_eq!(ld.m, 8 * d + 3);
            assert_eq!(ld.big_m, 8 * d + 3);
            // b = (lam0, 0, lam0, 0, 0, ...)
            assert_eq!(ld.b.len() as u64, (8 * d + 3) / 4 + 1);
            for (i, &bi) in ld.b.iter().enumerate() {
                let expect = if i == 0 || i == 2 { l0 } else { FieldElement::ZERO };
                assert_eq!(bi, expect, "b[{}]", i);
            }
            assert_eq!(ld.lambda, ProjPoint::Finite(l0));
            assert_eq!(ld.delta, 2);
            assert_eq!(ld.class, BranchClass::B2);
            // the odd-index expansions all vanish here
            assert!(ld.a.iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn quintic_family_b_sequence() {
        let k = k16();
        // p = 1/((t-l1)^5 (t-l2)^5), q = t^2 p: lambda_{y_i} = l_i, delta = 1
        let l1 = k.gpow(3);
        let l2 = k.gpow(7);
        let den = Poly::from_coeffs(vec![l1, FieldElement::ONE])
            .pow(5, &k)
            .mul(&Poly::from_coeffs(vec![l2, FieldElement::ONE]).pow(5, &k), &k);
        let p = RatFun::new(Poly::one(), den.clone(), &k).unwrap();
        let q = RatFun::new(Poly::from_coeffs(vec![FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE]), den, &k).unwrap();
        // with the original uniformizer t - l_i the mixing series is
        // beta = l_i + pi: solve on the raw jets (both already reduced)
        for li in [l1, l2] {
            let y = ProjPoint::Finite(li);
            let p_jet = laurent_at(&p, y, -5 + 2 * 1 + 2, &k);
            let q_jet = laurent_at(&q, y, -5 + 2 * 1 + 2, &k);
            let b = solve_b_coeffs(&p_jet, &q_jet, 5, 5, &k).unwrap();
            assert_eq!(b, vec![li, FieldElement::ONE]);
        }
        // the full pipeline normalizes the coordinate; lambda, delta, class
        // are invariants and must survive
        let an = analyze(&p, &q, &k).unwrap();
        assert_eq!(an.branch.len(), 2);
        let locals = compute_all(&an, &k).unwrap();
        for ld in &locals {
            assert_eq!((ld.m, ld.big_m, ld.delta), (5, 5, 1));
            let orig = an.original_point(ld.y, &k);
            let ProjPoint::Finite(li) = orig else { panic!("finite branch point") };
            assert_eq!(ld.lambda, ProjPoint::Finite(li));
            assert_eq!(ld.b[0], li);
            assert_eq!(ld.class, BranchClass::B2);
        }
    }

    #[test]
    fn m_equals_one_has_single_b_and_no_a() {
        let k = k16();
        // IIa point with m = 1: b = [sqrt(q_0/p_0)], a empty
        let (p, q, ..) = crate::cover::tests::four_point_cover(&k);
        let an = analyze(&p, &q, &k).unwrap();
        let locals = compute_all(&an, &k).unwrap();
        for ld in &locals {
            if ld.m == 1 {
                assert_eq!(ld.b.len(), 1);
                assert!(ld.a.is_empty());
                let ratio = k.div(ld.q_jet.rel_coeff(0), ld.p_jet.rel_coeff(0)).unwrap();
                assert_eq!(k.mul(ld.b[0], ld.b[0]), ratio);
            }
        }
    }

    #[test]
    fn four_point_fixture_classes() {
        let k = k16();
        let (p, q, _alpha, l0, beta) = crate::cover::tests::four_point_cover(&k);
        let an = analyze(&p, &q, &k).unwrap();
        let locals = compute_all(&an, &k).unwrap();
        for ld in &locals {
            let orig = an.original_point(ld.y, &k);
            if orig == ProjPoint::Finite(beta) {
                // the case-I point: lambda = lambda0, delta = 0, class B1
                assert_eq!(ld.lambda, ProjPoint::Finite(l0));
                assert_eq!(ld.delta, 0);
                assert_eq!(ld.class, BranchClass::B1);
            } else {
                assert_eq!(ld.delta, -1);
                assert_eq!(ld.class, BranchClass::B3);
            }
        }
        // tags IIa, IIb, IIc at original 0, 1, alpha give lambda inf, 0, 1
        let lambdas: Vec<ProjPoint> = locals
            .iter()
            .filter(|l| l.class == BranchClass::B3)
            .map(|l| l.lambda)
            .collect();
        assert!(lambdas.contains(&ProjPoint::Infinity));
        assert!(lambdas.contains(&ProjPoint::Finite(FieldElement::ZERO)));
        assert!(lambdas.contains(&ProjPoint::Finite(FieldElement::ONE)));
    }

    #[test]
    fn b_solution_satisfies_the_equations() {
        let k = k16();
        let mut s = 31u64;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            FieldElement(s >> 60)
        };
        // random jets with prescribed leads
        for (m, big_m) in [(5u64, 5u64), (9, 9), (7, 11), (11, 11)] {
            let y = ProjPoint::Infinity;
            let p_prec = -(m as i64) + 2 * (m / 4) as i64 + 2;
            let q_prec = -(big_m as i64) + 2 * (m / 4) as i64 + 2;
            let mut p_jet = LaurentJet::zero(y, p_prec);
            let mut q_jet = LaurentJet::zero(y, q_prec);
            p_jet = p_jet.add_term(-(m as i64), k.gpow(4));
            q_jet = q_jet.add_term(-(big_m as i64), k.gpow(9));
            for e in (-(m as i64) + 1)..p_prec {
                p_jet = p_jet.add_term(e, rnd());
            }
            for e in (-(big_m as i64) + 1)..q_prec {
                q_jet = q_jet.add_term(e, rnd());
            }
            let b = solve_b_coeffs(&p_jet, &q_jet, m, big_m, &k).unwrap();
            for j in 0..=(m / 4) as usize {
                let mut lhs = q_jet.rel_coeff(2 * j);
                for i2 in 0..=j {
                    let p_term = p_jet.rel_coeff(2 * (j - i2));
                    lhs = k.add(lhs, k.mul(p_term, k.mul(b[i2], b[i2])));
                }
                assert!(lhs.is_zero(), "equation {} not satisfied", j);
            }
            let a = solve_a_coeffs(&p_jet, &q_jet, &b, m, &k);
            for (j, &aj) in a.iter().enumerate() {
                let mut rhs = q_jet.rel_coeff(2 * j + 1);
                for i2 in 0..=j {
                    rhs = k.add(rhs, k.mul(p_jet.rel_coeff(2 * (j - i2) + 1), k.mul(b[i2], b[i2])));
                }
                assert_eq!(k.mul(aj, aj), rhs);
            }
        }
    }

    #[test]
    fn delta_range_is_legal() {
        let k = k16();
        let (p, q) = kg_case1(2, &k);
        let an = analyze(&p, &q, &k).unwrap();
        for ld in compute_all(&an, &k).unwrap() {
            assert!(ld.delta >= -1);
            assert!(ld.delta <= (ld.m / 4) as i64);
            // delta = floor(m/4) >= 1 forces m = 1 mod 4
            if ld.delta >= 1 && ld.delta == (ld.m / 4) as i64 {
                assert_eq!(ld.m % 4, 1);
            }
        }
    }
}
