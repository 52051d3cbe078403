//! Polynomials, rational functions, and truncated Laurent expansions over
//! GF(2^n) at points of the projective line.
//!
//! Rational functions are kept in canonical form (monic denominator, coprime
//! numerator), so equality is structural. Laurent expansions carry an
//! explicit exclusive precision; arithmetic truncates to the precision both
//! operands can support, never silently beyond it.

use crate::field::{FieldCtx, FieldElement};
use std::fmt;

/// Errors from rational function manipulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatFunError {
    /// Construction with a zero denominator.
    ZeroDenominator,
    /// A denominator factor that does not split into linear factors over the field.
    NonSplitDenominator { factor: Poly },
    /// Division of rational functions by zero.
    DivisionByZero,
}

impl fmt::Display for RatFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatFunError::ZeroDenominator => write!(f, "zero denominator"),
            RatFunError::NonSplitDenominator { factor } => {
                write!(f, "denominator factor of degree {} does not split over the field", factor.deg().unwrap_or(0))
            }
            RatFunError::DivisionByZero => write!(f, "division by zero rational function"),
        }
    }
}

impl std::error::Error for RatFunError {}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Univariate polynomial over GF(2^n), coefficients lowest degree first.
/// The zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    c: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { c: vec![FieldElement::ONE] }
    }

    pub fn constant(a: FieldElement) -> Poly {
        Poly::from_coeffs(vec![a])
    }

    /// The variable t.
    pub fn x() -> Poly {
        Poly { c: vec![FieldElement::ZERO, FieldElement::ONE] }
    }

    /// c * t^k.
    pub fn monomial(c: FieldElement, k: usize) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![FieldElement::ZERO; k + 1];
        v[k] = c;
        Poly { c: v }
    }

    pub fn from_coeffs(mut c: Vec<FieldElement>) -> Poly {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.c.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() { None } else { Some(self.c.len() - 1) }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == FieldElement::ONE
    }

    pub fn leading(&self) -> FieldElement {
        self.c.last().copied().unwrap_or(FieldElement::ZERO)
    }

    /// Characteristic-2 addition (coefficientwise xor); also subtraction.
    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(FieldElement(self.coeff(i).0 ^ other.coeff(i).0));
        }
        Poly::from_coeffs(v)
    }

    pub fn mul(&self, other: &Poly, k: &FieldCtx) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![FieldElement::ZERO; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] = k.add(v[i + j], k.mul(a, b));
                }
            }
        }
        Poly::from_coeffs(v)
    }

    pub fn scale(&self, s: FieldElement, k: &FieldCtx) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|&a| k.mul(a, s)).collect())
    }

    /// Quotient and remainder; panics on zero divisor.
    pub fn div_rem(&self, d: &Poly, k: &FieldCtx) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg().unwrap();
        if self.deg().map_or(true, |n| n < dd) {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = k.inv(d.leading()).expect("leading coefficient nonzero");
        let mut rem = self.c.clone();
        let n = self.deg().unwrap();
        let mut q = vec![FieldElement::ZERO; n - dd + 1];
        for i in (dd..=n).rev() {
            let f = k.mul(rem[i], lead_inv);
            if f.is_zero() {
                continue;
            }
            q[i - dd] = f;
            for (j, &dc) in d.c.iter().enumerate() {
                rem[i - dd + j] = k.add(rem[i - dd + j], k.mul(f, dc));
            }
        }
        (Poly::from_coeffs(q), Poly::from_coeffs(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly, k: &FieldCtx) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b, k).1;
            a = b;
            b = r;
        }
        a.monic(k)
    }

    pub fn monic(&self, k: &FieldCtx) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = k.inv(self.leading()).expect("nonzero");
        self.scale(inv, k)
    }

    pub fn eval(&self, x: FieldElement, k: &FieldCtx) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for &c in self.c.iter().rev() {
            acc = k.add(k.mul(acc, x), c);
        }
        acc
    }

    pub fn pow(&self, mut e: u64, k: &FieldCtx) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, k);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, k);
            }
        }
        acc
    }

    /// Coefficients of self(pi + mu), i.e. the Taylor expansion at t = mu.
    pub fn taylor_shift(&self, mu: FieldElement, k: &FieldCtx) -> Poly {
        let mut cur = self.c.clone();
        let mut out = Vec::with_capacity(cur.len());
        while !cur.is_empty() {
            // synthetic division by (t + mu); remainder is the next coefficient
            let m = cur.len() - 1;
            let mut q = vec![FieldElement::ZERO; m];
            let mut carry = cur[m];
            for j in (1..=m).rev() {
                q[j - 1] = carry;
                carry = k.add(cur[j - 1], k.mul(mu, carry));
            }
            out.push(carry);
            cur = q;
        }
        Poly { c: out }
    }

    /// Reverse of the coefficient vector: t^deg * self(1/t).
    pub fn reverse(&self) -> Poly {
        let mut v = self.c.clone();
        v.reverse();
        Poly::from_coeffs(v)
    }

    /// Multiplicity of mu as a root.
    pub fn root_multiplicity(&self, mu: FieldElement, k: &FieldCtx) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::from_coeffs(vec![mu, FieldElement::ONE]); // t + mu
        let mut m = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.div_rem(&lin, k);
            if !r.is_zero() {
                return m;
            }
            m += 1;
            cur = q;
        }
    }

    pub fn to_string(&self, k: &FieldCtx) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for i in (0..self.c.len()).rev() {
            let c = self.c[i];
            if c.is_zero() {
                continue;
            }
            let cs = k.elem_to_string(c);
            let term = match (i, cs.as_str()) {
                (0, _) => cs,
                (1, "1") => "t".into(),
                (1, _) => format!("{}*t", cs),
                (_, "1") => format!("t^{}", i),
                _ => format!("{}*t^{}", cs, i),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Points of the projective line
// ---------------------------------------------------------------------------

/// A closed point of the projective line over GF(2^n): infinity or a finite
/// coordinate. The uniformizer convention is pi = t - mu at finite mu and
/// pi = 1/t at infinity. Also used for parameters in k union {infinity}.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ProjPoint {
    Infinity,
    Finite(FieldElement),
}

impl ProjPoint {
    pub fn is_infinity(self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn to_string(self, k: &FieldCtx) -> String {
        match self {
            ProjPoint::Infinity => "inf".into(),
            ProjPoint::Finite(a) => k.elem_to_string(a),
        }
    }
}

// ---------------------------------------------------------------------------
// Rational functions
// ---------------------------------------------------------------------------

/// A rational function in canonical form: monic denominator, gcd(num, den) = 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly, k: &FieldCtx) -> Result<RatFun, RatFunError> {
        if den.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den, k))
    }

    fn reduce(num: Poly, den: Poly, k: &FieldCtx) -> RatFun {
        if num.is_zero() {
            return RatFun { num: Poly::zero(), den: Poly::one() };
        }
        let g = num.gcd(&den, k);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g, k).0, den.div_rem(&g, k).0)
        };
        let lead_inv = k.inv(den.leading()).expect("nonzero denominator");
        RatFun { num: num.scale(lead_inv, k), den: den.scale(lead_inv, k) }
    }

    pub fn zero() -> RatFun {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFun {
        RatFun { num: Poly::one(), den: Poly::one() }
    }

    pub fn constant(a: FieldElement) -> RatFun {
        RatFun { num: Poly::constant(a), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> RatFun {
        RatFun { num: p, den: Poly::one() }
    }

    /// t itself.
    pub fn t() -> RatFun {
        RatFun::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Some(c) when the function is the constant c.
    pub fn as_constant(&self) -> Option<FieldElement> {
        if self.num.is_zero() {
            return Some(FieldElement::ZERO);
        }
        if self.den.is_one() && self.num.deg() == Some(0) {
            return Some(self.num.coeff(0));
        }
        None
    }

    pub fn add(&self, other: &RatFun, k: &FieldCtx) -> RatFun {
        let num = self.num.mul(&other.den, k).add(&other.num.mul(&self.den, k));
        let den = self.den.mul(&other.den, k);
        Self::reduce(num, den, k)
    }

    pub fn mul(&self, other: &RatFun, k: &FieldCtx) -> RatFun {
        Self::reduce(self.num.mul(&other.num, k), self.den.mul(&other.den, k), k)
    }

    pub fn mul_poly(&self, p: &Poly, k: &FieldCtx) -> RatFun {
        Self::reduce(self.num.mul(p, k), self.den.clone(), k)
    }

    pub fn scale(&self, s: FieldElement, k: &FieldCtx) -> RatFun {
        Self::reduce(self.num.scale(s, k), self.den.clone(), k)
    }

    pub fn inv(&self, k: &FieldCtx) -> Result<RatFun, RatFunError> {
        if self.is_zero() {
            return Err(RatFunError::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone(), k))
    }

    pub fn div(&self, other: &RatFun, k: &FieldCtx) -> Result<RatFun, RatFunError> {
        Ok(self.mul(&other.inv(k)?, k))
    }

    /// Square: cheap char-2 special case used by the reduction module.
    pub fn square(&self, k: &FieldCtx) -> RatFun {
        self.mul(self, k)
    }

    pub fn pow_i64(&self, e: i64, k: &FieldCtx) -> Result<RatFun, RatFunError> {
        let base = if e < 0 { self.inv(k)? } else { self.clone() };
        let mut acc = RatFun::one();
        let mut b = base;
        let mut m = e.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul(&b, k);
            }
            m >>= 1;
            if m > 0 {
                b = b.mul(&b, k);
            }
        }
        Ok(acc)
    }

    /// Order of vanishing at a point; None means +infinity (f = 0).
    pub fn ord_at(&self, y: ProjPoint, k: &FieldCtx) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        match y {
            ProjPoint::Finite(mu) => {
                let vn = self.num.root_multiplicity(mu, k) as i64;
                let vd = self.den.root_multiplicity(mu, k) as i64;
                Some(vn - vd)
            }
            ProjPoint::Infinity => {
                Some(self.den.deg().unwrap() as i64 - self.num.deg().unwrap() as i64)
            }
        }
    }

    pub fn eval(&self, x: FieldElement, k: &FieldCtx) -> Option<FieldElement> {
        let d = self.den.eval(x, k);
        if d.is_zero() {
            return None;
        }
        Some(k.div(self.num.eval(x, k), d).expect("nonzero"))
    }

    /// Substitute t := (a t + b)/(c t + d); the map must be invertible.
    pub fn subst_mobius(&self, m: &Mobius, k: &FieldCtx) -> RatFun {
        let hom = |p: &Poly, up_to: usize| -> Poly {
            // sum p_i (a t + b)^i (c t + d)^(up_to - i)
            let at_b = Poly::from_coeffs(vec![m.b, m.a]);
            let ct_d = Poly::from_coeffs(vec![m.d, m.c]);
            let mut acc = Poly::zero();
            for i in 0..=up_to {
                let coeff = p.coeff(i);
                if coeff.is_zero() {
                    continue;
                }
                let term = at_b.pow(i as u64, k).mul(&ct_d.pow((up_to - i) as u64, k), k);
                acc = acc.add(&term.scale(coeff, k));
            }
            acc
        };
        if self.is_zero() {
            return RatFun::zero();
        }
        let dn = self.num.deg().unwrap();
        let dd = self.den.deg().unwrap();
        let top = dn.max(dd);
        // both homogenized to the same degree, the (c t + d)^top factors cancel
        Self::reduce(hom(&self.num, top), hom(&self.den, top), k)
    }

    pub fn to_string(&self, k: &FieldCtx) -> String {
        if self.den.is_one() {
            return self.num.to_string(k);
        }
        format!("({})/({})", self.num.to_string(k), self.den.to_string(k))
    }
}

/// An invertible map t -> (a t + b)/(c t + d) of the projective line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl Mobius {
    pub fn identity() -> Mobius {
        Mobius { a: FieldElement::ONE, b: FieldElement::ZERO, c: FieldElement::ZERO, d: FieldElement::ONE }
    }

    pub fn is_identity(&self) -> bool {
        *self == Mobius::identity()
    }

    /// t -> t + mu.
    pub fn translation(mu: FieldElement) -> Mobius {
        Mobius { a: FieldElement::ONE, b: mu, c: FieldElement::ZERO, d: FieldElement::ONE }
    }

    /// t -> mu + 1/t, which exchanges the points mu and infinity.
    pub fn inversion_at(mu: FieldElement) -> Mobius {
        Mobius { a: mu, b: FieldElement::ONE, c: FieldElement::ONE, d: FieldElement::ZERO }
    }

    pub fn determinant(&self, k: &FieldCtx) -> FieldElement {
        k.add(k.mul(self.a, self.d), k.mul(self.b, self.c))
    }

    /// Image of a point of the projective line.
    pub fn apply_point(&self, y: ProjPoint, k: &FieldCtx) -> ProjPoint {
        match y {
            ProjPoint::Infinity => {
                if self.c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(k.div(self.a, self.c).expect("c nonzero"))
                }
            }
            ProjPoint::Finite(x) => {
                let den = k.add(k.mul(self.c, x), self.d);
                if den.is_zero() {
                    ProjPoint::Infinity
                } else {
                    let num = k.add(k.mul(self.a, x), self.b);
                    ProjPoint::Finite(k.div(num, den).expect("nonzero"))
                }
            }
        }
    }

    pub fn to_string(&self, k: &FieldCtx) -> String {
        let lin = |p: FieldElement, q: FieldElement| -> String {
            let tp = match k.elem_to_string(p).as_str() {
                "0" => String::new(),
                "1" => "t".into(),
                s => format!("{}*t", s),
            };
            match (tp.is_empty(), q.is_zero()) {
                (true, _) => k.elem_to_string(q),
                (false, true) => tp,
                (false, false) => format!("{} + {}", tp, k.elem_to_string(q)),
            }
        };
        if self.c.is_zero() && self.d == FieldElement::ONE {
            format!("t -> {}", lin(self.a, self.b))
        } else {
            format!("t -> ({})/({})", lin(self.a, self.b), lin(self.c, self.d))
        }
    }
}

// ---------------------------------------------------------------------------
// Laurent jets
// ---------------------------------------------------------------------------

/// A truncated Laurent expansion at a point: sum of `coeffs[i] * pi^(lead + i)`,
/// known modulo pi^prec (exclusive upper exponent).
///
/// The zero jet has empty coeffs and lead == prec. Otherwise `coeffs[0] != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentJet {
    pub point: ProjPoint,
    pub lead: i64,
    pub coeffs: Vec<FieldElement>,
    pub prec: i64,
}

impl LaurentJet {
    pub fn zero(point: ProjPoint, prec: i64) -> LaurentJet {
        LaurentJet { point, lead: prec, coeffs: Vec::new(), prec }
    }

    fn normalize(mut self) -> LaurentJet {
        while !self.coeffs.is_empty() && self.coeffs[0].is_zero() {
            self.coeffs.remove(0);
            self.lead += 1;
        }
        while self.coeffs.len() as i64 > self.prec - self.lead {
            self.coeffs.pop();
        }
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.lead = self.prec;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order of the jet, None when zero to precision.
    pub fn ord(&self) -> Option<i64> {
        if self.is_zero() { None } else { Some(self.lead) }
    }

    pub fn coeff(&self, exp: i64) -> FieldElement {
        debug_assert!(exp < self.prec, "coefficient beyond jet precision");
        if exp < self.lead {
            return FieldElement::ZERO;
        }
        self.coeffs.get((exp - self.lead) as usize).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Coefficient at exponent lead + i (local subscript convention).
    pub fn rel_coeff(&self, i: usize) -> FieldElement {
        debug_assert!(self.lead + (i as i64) < self.prec, "coefficient beyond jet precision");
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn add(&self, other: &LaurentJet) -> LaurentJet {
        assert_eq!(self.point, other.point);
        let prec = self.prec.min(other.prec);
        let lead = self.lead.min(other.lead).min(prec);
        let len = (prec - lead).max(0) as usize;
        let mut coeffs = vec![FieldElement::ZERO; len];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let e = lead + i as i64;
            *c = FieldElement(self.coeff_unchecked(e).0 ^ other.coeff_unchecked(e).0);
        }
        LaurentJet { point: self.point, lead, coeffs, prec }.normalize()
    }

    fn coeff_unchecked(&self, exp: i64) -> FieldElement {
        if exp < self.lead {
            return FieldElement::ZERO;
        }
        self.coeffs.get((exp - self.lead) as usize).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Add a single exact term c * pi^exp (exp must be below our precision).
    pub fn add_term(&self, exp: i64, c: FieldElement) -> LaurentJet {
        assert!(exp < self.prec);
        let t = LaurentJet { point: self.point, lead: exp, coeffs: vec![c], prec: self.prec };
        self.add(&t.normalize())
    }

    pub fn mul(&self, other: &LaurentJet, k: &FieldCtx) -> LaurentJet {
        assert_eq!(self.point, other.point);
        if self.is_zero() || other.is_zero() {
            // product known modulo the best bound available
            let prec = (self.prec + other.lead).min(other.prec + self.lead);
            return LaurentJet::zero(self.point, prec);
        }
        let lead = self.lead + other.lead;
        let prec = (self.prec + other.lead).min(other.prec + self.lead);
        let len = (prec - lead).max(0) as usize;
        let mut coeffs = vec![FieldElement::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j < len && !b.is_zero() {
                    coeffs[i + j] = k.add(coeffs[i + j], k.mul(a, b));
                }
            }
        }
        LaurentJet { point: self.point, lead, coeffs, prec }.normalize()
    }

    pub fn scale(&self, s: FieldElement, k: &FieldCtx) -> LaurentJet {
        if s.is_zero() {
            return LaurentJet::zero(self.point, self.prec);
        }
        LaurentJet {
            point: self.point,
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|&c| k.mul(c, s)).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by pi^s.
    pub fn shift(&self, s: i64) -> LaurentJet {
        LaurentJet { point: self.point, lead: self.lead + s, coeffs: self.coeffs.clone(), prec: self.prec + s }
    }

    pub fn truncate(&self, prec: i64) -> LaurentJet {
        assert!(prec <= self.prec, "cannot extend a jet's precision");
        LaurentJet { point: self.point, lead: self.lead, coeffs: self.coeffs.clone(), prec }.normalize()
    }

    /// Exact conversion of a Laurent polynomial jet back to a rational
    /// function (every stored term is taken as exact).
    pub fn to_ratfun(&self, k: &FieldCtx) -> RatFun {
        let mut acc = RatFun::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.lead + i as i64;
            let term = match self.point {
                ProjPoint::Finite(mu) => {
                    let lin = Poly::from_coeffs(vec![mu, FieldElement::ONE]);
                    RatFun::from_poly(lin).pow_i64(e, k).expect("t - mu nonzero")
                }
                ProjPoint::Infinity => RatFun::t().pow_i64(-e, k).expect("t nonzero"),
            };
            acc = acc.add(&term.scale(c, k), k);
        }
        acc
    }
}

/// Laurent expansion of f at y to the exclusive precision `prec`.
pub fn laurent_at(f: &RatFun, y: ProjPoint, prec: i64, k: &FieldCtx) -> LaurentJet {
    if f.is_zero() {
        return LaurentJet::zero(y, prec);
    }
    // shift numerator and denominator into the local coordinate pi
    let (num_local, den_local, extra) = match y {
        ProjPoint::Finite(mu) => (f.num().taylor_shift(mu, k), f.den().taylor_shift(mu, k), 0i64),
        ProjPoint::Infinity => {
            // f(1/pi) = rev(num) * pi^(deg den - deg num) / rev(den)
            let dn = f.num().deg().unwrap() as i64;
            let dd = f.den().deg().unwrap() as i64;
            (f.num().reverse(), f.den().reverse(), dd - dn)
        }
    };
    let vn = num_local.c.iter().position(|c| !c.is_zero()).expect("nonzero");
    let vd = den_local.c.iter().position(|c| !c.is_zero()).expect("nonzero");
    let lead = vn as i64 - vd as i64 + extra;
    let terms = prec - lead;
    if terms <= 0 {
        return LaurentJet::zero(y, prec);
    }
    let terms = terms as usize;
    // power series division (num / den) on the unit parts
    let a: Vec<FieldElement> = num_local.c[vn..].to_vec();
    let b: Vec<FieldElement> = den_local.c[vd..].to_vec();
    let b0_inv = k.inv(b[0]).expect("unit");
    let mut q = vec![FieldElement::ZERO; terms];
    for i in 0..terms {
        let mut acc = if i < a.len() { a[i] } else { FieldElement::ZERO };
        for j in 1..=i.min(b.len() - 1) {
            acc = k.add(acc, k.mul(b[j], q[i - j]));
        }
        q[i] = k.mul(acc, b0_inv);
    }
    LaurentJet { point: y, lead, coeffs: q, prec }.normalize()
}

// ---------------------------------------------------------------------------
// Root finding over the field
// ---------------------------------------------------------------------------

/// All roots of f in the field, with multiplicities, plus the monic cofactor
/// with no roots in the field (degree 0 exactly when f splits).
pub fn roots_with_multiplicity(
    f: &Poly,
    k: &FieldCtx,
) -> (Vec<(FieldElement, usize)>, Poly) {
    assert!(!f.is_zero(), "roots of the zero polynomial");
    let mut f = f.monic(k);
    let mut roots = Vec::new();
    if f.deg() == Some(0) {
        return (roots, f);
    }
    // distinct roots: gcd(f, x^(2^n) - x)
    let distinct = {
        let fx = frobenius_minus_x(&f, k);
        f.gcd(&fx, k)
    };
    let mut targets = Vec::new();
    collect_distinct_roots(&distinct, k, &mut targets);
    targets.sort();
    for r in targets {
        let m = f.root_multiplicity(r, k);
        debug_assert!(m > 0);
        let lin = Poly::from_coeffs(vec![r, FieldElement::ONE]);
        for _ in 0..m {
            f = f.div_rem(&lin, k).0;
        }
        roots.push((r, m));
    }
    (roots, f.monic(k))
}

/// x^(2^n) - x reduced mod f (x^(2^n) - x == x^(2^n) + x in char 2).
fn frobenius_minus_x(f: &Poly, k: &FieldCtx) -> Poly {
    let x = Poly::x();
    if f.deg() == Some(1) {
        // x mod f is a constant; the gcd caller only needs correctness
        let r = x.div_rem(f, k).1;
        let mut e = r.clone();
        for _ in 0..k.degree() {
            e = e.mul(&e, k).div_rem(f, k).1;
        }
        return e.add(&x);
    }
    let mut e = x.clone();
    for _ in 0..k.degree() {
        e = e.mul(&e, k).div_rem(f, k).1;
    }
    e.add(&x)
}

fn collect_distinct_roots(g: &Poly, k: &FieldCtx, out: &mut Vec<FieldElement>) {
    match g.deg() {
        None | Some(0) => {}
        Some(1) => {
            // g = c1 x + c0, root c0/c1
            out.push(k.div(g.coeff(0), g.coeff(1)).expect("nonzero leading"));
        }
        Some(_) if k.size() <= 1 << 16 => {
            for x in k.all_elements() {
                if g.eval(x, k).is_zero() {
                    out.push(x);
                }
            }
        }
        Some(_) => {
            // split with gcd against trace polynomials of c*x, deterministically
            let mut c = FieldElement::ONE;
            loop {
                let mut term = Poly::monomial(c, 1).div_rem(g, k).1;
                let mut acc = term.clone();
                for _ in 1..k.degree() {
                    term = term.mul(&term, k).div_rem(g, k).1;
                    acc = acc.add(&term);
                }
                let w = g.gcd(&acc, k);
                let dw = w.deg().unwrap_or(0);
                if dw > 0 && dw < g.deg().unwrap() {
                    collect_distinct_roots(&w, k, out);
                    collect_distinct_roots(&g.div_rem(&w, k).0, k, out);
                    return;
                }
                c = k.mul(c, k.generator());
                assert!(c != FieldElement::ONE, "trace splitting exhausted the field");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Partial fractions
// ---------------------------------------------------------------------------

/// `f = poly_part + sum over poles of sum_j parts[mu][j-1] / (t - mu)^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub poly_part: Poly,
    /// Sorted by pole coordinate; parts[j-1] is the coefficient of (t-mu)^(-j).
    pub parts: Vec<(FieldElement, Vec<FieldElement>)>,
}

impl PartialFractions {
    /// Re-sum the decomposition (round-trip oracle).
    pub fn to_ratfun(&self, k: &FieldCtx) -> RatFun {
        let mut acc = RatFun::from_poly(self.poly_part.clone());
        for (mu, cs) in &self.parts {
            for (j, &c) in cs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let lin = RatFun::from_poly(Poly::from_coeffs(vec![*mu, FieldElement::ONE]));
                let term = lin.pow_i64(-(j as i64 + 1), k).expect("nonzero").scale(c, k);
                acc = acc.add(&term, k);
            }
        }
        acc
    }
}

/// Partial fraction decomposition; requires the denominator to split.
pub fn partial_fractions(f: &RatFun, k: &FieldCtx) -> Result<PartialFractions, RatFunError> {
    let (q, _r) = f.num().div_rem(f.den(), k);
    let (roots, cofactor) = roots_with_multiplicity(f.den(), k);
    if cofactor.deg() != Some(0) {
        return Err(RatFunError::NonSplitDenominator { factor: cofactor });
    }
    let mut parts = Vec::new();
    for (mu, e) in roots {
        let jet = laurent_at(f, ProjPoint::Finite(mu), 0, k);
        let mut cs = vec![FieldElement::ZERO; e];
        for j in 1..=e {
            cs[j - 1] = jet.coeff(-(j as i64));
        }
        parts.push((mu, cs));
    }
    Ok(PartialFractions { poly_part: q, parts })
}
