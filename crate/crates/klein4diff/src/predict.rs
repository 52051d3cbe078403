//! Closed-form predictions from the ramification data.
//!
//! Everything here is formula evaluation on per-branch-point tuples
//! (m, M, delta, lambda) plus the base genus: the divisor coefficients
//! d_{y,i}, the filtration dimensions r_0..r_3 per probe direction, the
//! epsilon constraints on any decomposition, the special-case decomposition
//! (all summands of dimension <= 4), and the complete decomposition over a
//! rational base. The function-field pipeline supplies the tuples; abstract
//! formula mode accepts them directly (with any base genus), since the
//! constraint results hold for arbitrary base curves.
//!
//! Throughout, mu1 = floor((m+3)/4), mu2 = floor((2m+3)/4),
//! mu3 = floor((3m+3)/4), nu = (M-m)/2.

use crate::cover::CaseTag;
use crate::field::{FieldCtx, FieldElement};
use crate::klein4rep::{Decomposition, IndecLabel};
use crate::local::{BranchClass, LocalData};
use crate::ratfun::ProjPoint;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredictError {
    /// Abstract branch data violating the basic shape constraints.
    InvalidBranchData { index: usize, reason: String },
}

impl fmt::Display for PredictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictError::InvalidBranchData { index, reason } => {
                write!(f, "branch datum {}: {}", index, reason)
            }
        }
    }
}

impl std::error::Error for PredictError {}

/// The ramification tuple of one branch point, the only input the formulas
/// need. `lambda` is in k union {infinity}; delta is -1, or 0..floor(m/4).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchData {
    pub m: u64,
    pub big_m: u64,
    pub delta: i64,
    pub lambda: ProjPoint,
}

impl BranchData {
    pub fn from_local(ld: &LocalData) -> BranchData {
        BranchData { m: ld.m, big_m: ld.big_m, delta: ld.delta, lambda: ld.lambda }
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

    pub fn nu(&self) -> u64 {
        (self.big_m - self.m) / 2
    }

    pub fn class(&self) -> BranchClass {
        match self.delta {
            -1 => BranchClass::B3,
            0 => BranchClass::B1,
            _ => BranchClass::B2,
        }
    }

    /// The case tag, recoverable from (delta, lambda).
    pub fn tag(&self) -> CaseTag {
        if self.delta >= 0 {
            CaseTag::I
        } else {
            match self.lambda {
                ProjPoint::Infinity => CaseTag::IIa,
                ProjPoint::Finite(x) if x.is_zero() => CaseTag::IIb,
                _ => CaseTag::IIc,
            }
        }
    }

    /// Shape checks for abstract formula mode.
    pub fn validate(&self, index: usize, k: &FieldCtx) -> Result<(), PredictError> {
        let err = |reason: &str| PredictError::InvalidBranchData {
            index,
            reason: reason.to_string(),
        };
        if self.m % 2 == 0 || self.big_m % 2 == 0 {
            return Err(err("m and M must be odd"));
        }
        if self.m > self.big_m {
            return Err(err("m must not exceed M"));
        }
        if self.delta >= 0 {
            if self.m != self.big_m {
                return Err(err("delta >= 0 requires m = M"));
            }
            if self.delta > (self.m / 4) as i64 {
                return Err(err("delta exceeds floor(m/4)"));
            }
            match self.lambda {
                ProjPoint::Finite(x) if !x.is_zero() && x != FieldElement::ONE => {}
                _ => return Err(err("a case-I lambda must lie outside {0, 1, infinity}")),
            }
        } else {
            if self.delta != -1 {
                return Err(err("delta must be -1, or in 0..=floor(m/4)"));
            }
            if self.m == self.big_m {
                return Err(err("delta = -1 requires m < M"));
            }
            let ok = matches!(self.lambda, ProjPoint::Infinity)
                || self.lambda == ProjPoint::Finite(FieldElement::ZERO)
                || self.lambda == ProjPoint::Finite(FieldElement::ONE);
            if !ok {
                return Err(err("a case-II lambda must be one of 0, 1, infinity"));
            }
        }
        if let ProjPoint::Finite(x) = self.lambda {
            let _ = k; // lambda already lives in the field by construction
            let _ = x;
        }
        Ok(())
    }
}

/// Extract the formula inputs from solved local data.
pub fn branch_data(locals: &[LocalData]) -> Vec<BranchData> {
    locals.iter().map(BranchData::from_local).collect()
}

// ---------------------------------------------------------------------------
// Probe directions
// ---------------------------------------------------------------------------

/// A probe direction (a:b) of the projective line, stored as the parameter
/// a/b in k union {infinity}. The derived direction (c:d) at a branch point
/// depends on the case tag: (a:b) for I and IIa, (b:a) for IIb, (a:a+b)
/// for IIc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Probe(pub ProjPoint);

impl Probe {
    /// Homogeneous coordinates (a, b).
    pub fn coords(self) -> (FieldElement, FieldElement) {
        match self.0 {
            ProjPoint::Infinity => (FieldElement::ONE, FieldElement::ZERO),
            ProjPoint::Finite(x) => (x, FieldElement::ONE),
        }
    }

    /// The switched direction (c, d) at a branch point with the given tag.
    pub fn switched(self, tag: CaseTag, k: &FieldCtx) -> (FieldElement, FieldElement) {
        let (a, b) = self.coords();
        match tag {
            CaseTag::I | CaseTag::IIa => (a, b),
            CaseTag::IIb => (b, a),
            CaseTag::IIc => (a, k.add(a, b)),
        }
    }
}

/// The canonical probe set: {0, 1, infinity}, every branch parameter, and
/// two fresh elements not among them (fewer if the field is exhausted).
pub fn canonical_probes(data: &[BranchData], k: &FieldCtx) -> Vec<Probe> {
    let mut set: BTreeSet<ProjPoint> = [
        ProjPoint::Infinity,
        ProjPoint::Finite(FieldElement::ZERO),
        ProjPoint::Finite(FieldElement::ONE),
    ]
    .into_iter()
    .collect();
    for bd in data {
        set.insert(bd.lambda);
    }
    let mut fresh = 0;
    for bits in 0..k.size() {
        if fresh == 2 {
            break;
        }
        let cand = ProjPoint::Finite(FieldElement(bits as u64));
        if set.insert(cand) {
            fresh += 1;
        }
    }
    set.into_iter().map(Probe).collect()
}

// ---------------------------------------------------------------------------
// Divisor coefficients
// ---------------------------------------------------------------------------

/// The coefficients (d_{y,0}, d_{y,1}, d_{y,2}, d_{y,3}) of the branch point
/// in the four filtration divisors, for one probe direction.
pub fn divisor_coeffs(bd: &BranchData, probe: Probe, k: &FieldCtx) -> [u64; 4] {
    let (c, d) = probe.switched(bd.tag(), k);
    let (mu1, mu2, mu3, nu) = (bd.mu1(), bd.mu2(), bd.mu3(), bd.nu());
    let d0 = mu3 + nu;
    // "the derived direction points at lambda": c = d * lambda (case I only)
    let hit_case1 = match bd.lambda {
        ProjPoint::Finite(l) if bd.delta >= 0 => !d.is_zero() && c == k.mul(d, l),
        _ => false,
    };
    let (d1, d2) = if bd.delta == 0 && hit_case1 {
        (mu2, mu1)
    } else if bd.delta > 0 && hit_case1 {
        (mu1 + bd.delta as u64, mu2 - bd.delta as u64)
    } else if bd.delta == -1 && d.is_zero() {
        (mu1 + nu, mu2)
    } else {
        (mu1, mu2 + nu)
    };
    [d0, d1, d2, 0]
}

// ---------------------------------------------------------------------------
// Filtration dimensions
// ---------------------------------------------------------------------------

/// The numbers r_i = dim(M^(i+1)/M^(i)) - g(Y) + 1 for one probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiltrationDims {
    pub r0: u64,
    pub r1: u64,
    pub r2: u64,
    pub r3: u64,
}

pub fn filtration_dims(data: &[BranchData], probe: Probe, k: &FieldCtx) -> FiltrationDims {
    let lam = probe.0;
    let special = matches!(lam, ProjPoint::Infinity)
        || lam == ProjPoint::Finite(FieldElement::ZERO)
        || lam == ProjPoint::Finite(FieldElement::ONE);
    let _ = k;
    let r0 = data.iter().map(|bd| bd.mu3() + bd.nu()).sum();
    let mut r1 = 0;
    let mut r2 = 0;
    for bd in data {
        let at_lambda = bd.lambda == lam;
        if special {
            if bd.class() == BranchClass::B3 && at_lambda {
                r1 += bd.mu1() + bd.nu();
                r2 += bd.mu2();
            } else {
                r1 += bd.mu1();
                r2 += bd.mu2() + bd.nu();
            }
        } else if at_lambda && bd.class() == BranchClass::B1 {
            r1 += bd.mu2();
            r2 += bd.mu1();
        } else if at_lambda && bd.class() == BranchClass::B2 {
            r1 += bd.mu1() + bd.delta as u64;
            r2 += bd.mu2() - bd.delta as u64;
        } else {
            r1 += bd.mu1();
            r2 += bd.mu2() + bd.nu();
        }
    }
    FiltrationDims { r0, r1, r2, r3: 1 }
}

// ---------------------------------------------------------------------------
// Epsilon constraints
// ---------------------------------------------------------------------------

/// The constraints every decomposition must satisfy: writing the module as
/// a sum of epsilon_1 N-summands (epsilon_{1,lambda} with parameter lambda),
/// epsilon_2 M1-summands, epsilon_3 M2-summands, epsilon_4 trivials, and
/// epsilon_5 frees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonConstraints {
    /// epsilon_{1,lambda} for each lambda in Lambda_br, by formula.
    pub eps1: BTreeMap<ProjPoint, u64>,
    pub eps2: u64,
    pub eps3_plus_eps4: u64,
    pub eps5: u64,
    /// Branch parameters with epsilon_{1,lambda} = 0: these drop out of the
    /// module entirely (possible only when the lambda-points are case I with
    /// m = 1).
    pub excluded: Vec<ProjPoint>,
}

pub fn epsilon_constraints(data: &[BranchData], g_base: u64) -> EpsilonConstraints {
    let mut eps1: BTreeMap<ProjPoint, u64> = BTreeMap::new();
    let lambdas: BTreeSet<ProjPoint> = data.iter().map(|bd| bd.lambda).collect();
    for &lam in &lambdas {
        let special = matches!(lam, ProjPoint::Infinity)
            || lam == ProjPoint::Finite(FieldElement::ZERO)
            || lam == ProjPoint::Finite(FieldElement::ONE);
        let mut v = 0;
        for bd in data.iter().filter(|bd| bd.lambda == lam) {
            v += match bd.class() {
                BranchClass::B1 if !special => bd.mu2() - bd.mu1(),
                BranchClass::B2 if !special => bd.delta as u64,
                BranchClass::B3 if special => bd.nu(),
                _ => 0,
            };
        }
        eps1.insert(lam, v);
    }
    let eps2 = data.iter().map(|bd| bd.mu1()).sum::<u64>() - 1;
    let eps3_plus_eps4 = data.iter().map(|bd| bd.mu3() - bd.mu2()).sum();
    let excluded = eps1.iter().filter(|(_, &v)| v == 0).map(|(&l, _)| l).collect();
    EpsilonConstraints { eps1, eps2, eps3_plus_eps4, eps5: g_base, excluded }
}

// ---------------------------------------------------------------------------
// Special-case decomposition (all summands small)
// ---------------------------------------------------------------------------

/// Outcome of the small-summands criterion: it applies when every branch point
/// satisfies (a) delta = 0, (b) delta = mu2 - mu1 >= 1, or (c) delta = -1
/// with m = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecialOutcome {
    Applies(Decomposition),
    /// Indices of the branch points violating all three conditions.
    NotApplicable(Vec<usize>),
}

pub fn decompose_special(data: &[BranchData], g_base: u64) -> SpecialOutcome {
    let offending: Vec<usize> = data
        .iter()
        .enumerate()
        .filter(|(_, bd)| {
            let a = bd.delta == 0;
            let b = bd.delta >= 1 && bd.delta as u64 == bd.mu2() - bd.mu1();
            let c = bd.delta == -1 && bd.m == 1;
            !(a || b || c)
        })
        .map(|(i, _)| i)
        .collect();
    if !offending.is_empty() {
        return SpecialOutcome::NotApplicable(offending);
    }
    let mut dec = Decomposition::new();
    let lambdas: BTreeSet<ProjPoint> = data.iter().map(|bd| bd.lambda).collect();
    for lam in lambdas {
        let a_lam: u64 = data
            .iter()
            .filter(|bd| bd.lambda == lam)
            .map(|bd| bd.mu2() - bd.mu1() + bd.nu())
            .sum();
        dec.add(IndecLabel::N { n: 1, lambda: lam }, a_lam);
    }
    dec.add(IndecLabel::M1 { n: 1 }, data.iter().map(|bd| bd.mu1()).sum::<u64>() - 1);
    dec.add(IndecLabel::Triv, data.iter().map(|bd| bd.mu3() - bd.mu2()).sum());
    dec.add(IndecLabel::Free, g_base);
    SpecialOutcome::Applies(dec)
}

// ---------------------------------------------------------------------------
// Complete decomposition over a rational base
// ---------------------------------------------------------------------------

/// Per-branch-point N-summand data over a rational base: N(2l)^{a1} and
/// N(2(l-1))^{a2}, both with parameter lambda_y.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointSummands {
    pub ell: u64,
    pub a1: u64,
    pub a2: u64,
}

/// Euclidean division x = (l-1) q + a1 with remainder a1 forced into 1..=q.
fn division_with_positive_remainder(x: u64, q: u64) -> (u64, u64) {
    debug_assert!(q >= 1 && x >= 1);
    let r = x % q;
    if r == 0 {
        (x / q, q)
    } else {
        (x / q + 1, r)
    }
}

/// The N-part sizes at one branch point.
pub fn point_summands(bd: &BranchData) -> PointSummands {
    let x = bd.mu2() - bd.mu1();
    if bd.delta == 0 {
        PointSummands { ell: 1, a1: x, a2: 0 }
    } else if bd.delta >= 1 {
        let q = bd.delta as u64;
        let (ell, a1) = division_with_positive_remainder(x, q);
        PointSummands { ell, a1, a2: q - a1 }
    } else {
        let q = bd.nu();
        let (ell, a1) = division_with_positive_remainder(x + q, q);
        PointSummands { ell, a1, a2: q - a1 }
    }
}

/// The full decomposition over a rational base (base genus 0).
pub fn decompose_p1(data: &[BranchData]) -> Decomposition {
    let mut dec = Decomposition::new();
    for bd in data {
        let ps = point_summands(bd);
        dec.add(IndecLabel::N { n: ps.ell, lambda: bd.lambda }, ps.a1);
        if ps.ell >= 1 {
            dec.add(IndecLabel::N { n: ps.ell - 1, lambda: bd.lambda }, ps.a2);
        }
    }
    dec.add(IndecLabel::M1 { n: 1 }, data.iter().map(|bd| bd.mu1()).sum::<u64>() - 1);
    dec.add(IndecLabel::Triv, data.iter().map(|bd| bd.mu3() - bd.mu2()).sum());
    dec
}

// ---------------------------------------------------------------------------
// The sum-of-l criterion for general bases
// ---------------------------------------------------------------------------

/// Result of checking sum(l_h) >= sum(mu2 - mu1 + nu): when the bound holds,
/// every M1-summand has dimension 3, there are no M2-summands, and the
/// number of trivial summands is determined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumEllOutcome {
    pub holds: bool,
    pub bound: u64,
    /// Forced number of trivial summands (epsilon_4) when the bound holds.
    pub forced_eps4: Option<u64>,
}

pub fn check_sum_ell_criterion(data: &[BranchData], ell_sum: u64) -> SumEllOutcome {
    let bound: u64 = data.iter().map(|bd| bd.mu2() - bd.mu1() + bd.nu()).sum();
    let holds = ell_sum >= bound;
    let forced_eps4 =
        holds.then(|| data.iter().map(|bd| bd.mu3() - bd.mu2()).sum());
    SumEllOutcome { holds, bound, forced_eps4 }
}

/// Does the branch point contribute only 2-dimensional N-summands?
pub fn small_ell_predicate(bd: &BranchData) -> bool {
    bd.delta == 0
        || (bd.delta >= 1 && bd.m % 4 == 1 && bd.delta as u64 == bd.m / 4)
        || (bd.delta == -1 && bd.m == 1)
}
