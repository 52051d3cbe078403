//! Exact arithmetic in GF(2^n).
//!
//! The field stands in for an algebraically closed field of characteristic
//! two at computable scale: every instance constant must already live in the
//! chosen GF(2^n). Squaring is the Frobenius, which is bijective, so every
//! element has a unique square root `a^(2^(n-1))`.
//!
//! Elements are bit vectors in the power basis of a fixed irreducible
//! modulus. The default modulus for each degree is the lexicographically
//! smallest irreducible polynomial (as an integer with bit i holding the
//! coefficient of x^i), and the distinguished generator `g` is the smallest
//! bit pattern with multiplicative order 2^n - 1, so all outputs are
//! bit-reproducible across runs.

use std::fmt;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 64;

/// Degrees up to this bound get full log/exp tables.
const TABLE_DEGREE: u32 = 16;

/// An element of GF(2^n), as coefficients of the power basis packed in a u64.
///
/// Elements are plain bit patterns; all arithmetic goes through [`FieldCtx`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf({:#b})", self.0)
    }
}

/// Errors from field construction and element-level operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// Inversion or division by zero.
    DivisionByZero,
    /// Requested degree is zero or exceeds [`MAX_DEGREE`].
    DegreeOutOfRange(u32),
    /// The supplied modulus is not an irreducible polynomial of the right degree.
    ReducibleModulus(u128),
    /// Subfield embedding with a degree that does not divide the target degree.
    NonDividingDegree { sub: u32, sup: u32 },
    /// A constant literal that does not parse or does not fit the field.
    BadLiteral(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::DivisionByZero => write!(f, "division by zero field element"),
            FieldError::DegreeOutOfRange(n) => {
                write!(f, "field degree {} out of range 1..={}", n, MAX_DEGREE)
            }
            FieldError::ReducibleModulus(m) => {
                write!(f, "modulus {:#x} is not irreducible of the requested degree", m)
            }
            FieldError::NonDividingDegree { sub, sup } => {
                write!(f, "subfield degree {} does not divide {}", sub, sup)
            }
            FieldError::BadLiteral(s) => write!(f, "bad field constant literal: {}", s),
        }
    }
}

impl std::error::Error for FieldError {}

// ---------------------------------------------------------------------------
// GF(2)[x] helpers on bit-packed polynomials
// ---------------------------------------------------------------------------

/// Degree of a bit-packed GF(2) polynomial, or -1 for the zero polynomial.
fn gf2_deg(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

/// Carry-less product of two GF(2) polynomials of degree < 64.
fn gf2_mul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut bb = b;
    while bb != 0 {
        let i = bb.trailing_zeros();
        acc ^= (a as u128) << i;
        bb &= bb - 1;
    }
    acc
}

/// Reduce a GF(2) polynomial modulo `m` (m nonzero).
fn gf2_mod(mut a: u128, m: u128) -> u128 {
    let dm = gf2_deg(m);
    loop {
        let da = gf2_deg(a);
        if da < dm {
            return a;
        }
        a ^= m << (da - dm);
    }
}

fn gf2_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = gf2_mod(a, b);
        a = b;
        b = r;
    }
    a
}

/// Rabin irreducibility test for a degree-n polynomial over GF(2).
fn gf2_is_irreducible(m: u128, n: u32) -> bool {
    if gf2_deg(m) != n as i32 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let sq = |e: u128| -> u128 {
        // e has degree < n <= 64, so the square fits in u128
        let mut acc = 0u128;
        let mut bb = e;
        while bb != 0 {
            let i = bb.trailing_zeros();
            acc ^= e << i;
            bb &= bb - 1;
        }
        gf2_mod(acc, m)
    };
    // x^(2^k) mod m by repeated squaring, checking the Rabin conditions
    let primes = distinct_prime_factors(n as u64);
    let mut e = 2u128; // x
    for k in 1..=n {
        e = sq(e);
        if primes.iter().any(|&p| k as u64 == n as u64 / p) && gf2_gcd(e ^ 2, m) != 1 {
            return false;
        }
    }
    e == 2
}

/// Lexicographically smallest irreducible polynomial of degree n over GF(2).
fn canonical_modulus(n: u32) -> u128 {
    if n == 1 {
        return 0b10; // x
    }
    let mut cand = (1u128 << n) | 1;
    loop {
        if gf2_is_irreducible(cand, n) {
            return cand;
        }
        cand += 2;
    }
}

// ---------------------------------------------------------------------------
// Integer factorization (for multiplicative-order checks)
// ---------------------------------------------------------------------------

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho; n must be odd composite and not a prime power of a tiny prime.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Distinct prime factors of n, ascending.
fn distinct_prime_factors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut stack = vec![n];
    while let Some(mut m) = stack.pop() {
        if m < 2 {
            continue;
        }
        for p in [2u64, 3, 5] {
            while m % p == 0 {
                out.push(p);
                m /= p;
            }
        }
        let mut p = 7u64;
        while p <= 100_000 && p * p <= m {
            while m % p == 0 {
                out.push(p);
                m /= p;
            }
            p += 2;
        }
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            out.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Field context
// ---------------------------------------------------------------------------

/// A fixed realization of GF(2^n): modulus, distinguished generator, and
/// (for small n) log/exp tables. Immutable after construction.
pub struct FieldCtx {
    degree: u32,
    modulus: u128,
    generator: FieldElement,
    order: u64, // 2^n - 1
    exp: Vec<u64>,
    log: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx(GF(2^{}), modulus {:#x})", self.degree, self.modulus)
    }
}

impl FieldCtx {
    /// GF(2^n) with the canonical (lexicographically smallest) modulus.
    pub fn new(degree: u32) -> Result<FieldCtx, FieldError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(degree));
        }
        Self::with_modulus(degree, canonical_modulus(degree))
    }

    /// GF(2^n) with a caller-supplied irreducible modulus.
    pub fn with_modulus(degree: u32, modulus: u128) -> Result<FieldCtx, FieldError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(degree));
        }
        if !gf2_is_irreducible(modulus, degree) {
            return Err(FieldError::ReducibleModulus(modulus));
        }
        let order = if degree == 64 { u64::MAX } else { (1u64 << degree) - 1 };
        let mut ctx = FieldCtx {
            degree,
            modulus,
            generator: FieldElement::ONE,
            order,
            exp: Vec::new(),
            log: Vec::new(),
        };
        ctx.generator = ctx.find_generator();
        if degree <= TABLE_DEGREE {
            ctx.build_tables();
        }
        Ok(ctx)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// The fixed primitive element (multiplicative order 2^n - 1).
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    /// Number of field elements, 2^n (as u128 so n = 64 works).
    pub fn size(&self) -> u128 {
        1u128 << self.degree
    }

    /// 2^n - 1, the multiplicative group order.
    pub fn mult_order(&self) -> u64 {
        self.order
    }

    /// Element from raw bits; bits above the degree must be clear.
    pub fn elem(&self, bits: u64) -> FieldElement {
        debug_assert!(self.degree == 64 || bits < (1u64 << self.degree));
        FieldElement(bits)
    }

    fn raw_mul(&self, a: u64, b: u64) -> u64 {
        gf2_mod(gf2_mul(a, b), self.modulus) as u64
    }

    fn find_generator(&self) -> FieldElement {
        if self.order == 1 {
            return FieldElement::ONE;
        }
        let primes = distinct_prime_factors(self.order);
        let mut cand = 2u64;
        loop {
            let g = FieldElement(cand);
            if primes.iter().all(|&p| self.pow_raw(g, self.order / p) != FieldElement::ONE) {
                debug_assert_eq!(self.pow_raw(g, self.order), FieldElement::ONE);
                return g;
            }
            cand += 1;
        }
    }

    fn build_tables(&mut self) {
        let q1 = self.order as usize;
        let mut exp = Vec::with_capacity(q1);
        let mut log = vec![u32::MAX; q1 + 1];
        let mut cur = 1u64;
        for k in 0..q1 {
            exp.push(cur);
            log[cur as usize] = k as u32;
            cur = self.raw_mul(cur, self.generator.0);
        }
        debug_assert_eq!(cur, 1);
        self.exp = exp;
        self.log = log;
    }

    // -- arithmetic --------------------------------------------------------

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        if !self.exp.is_empty() {
            let s = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
            let s = if s >= self.order { s - self.order } else { s };
            return FieldElement(self.exp[s as usize]);
        }
        FieldElement(self.raw_mul(a.0, b.0))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if !self.exp.is_empty() {
            let l = self.log[a.0 as usize] as u64;
            let k = if l == 0 { 0 } else { self.order - l };
            return Ok(FieldElement(self.exp[k as usize]));
        }
        // a^(2^n - 2)
        Ok(self.pow_raw(a, self.order - 1))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    fn pow_raw(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.0;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        FieldElement(acc)
    }

    /// a^e with e >= 0; 0^0 = 1.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        if !self.exp.is_empty() {
            let l = self.log[a.0 as usize] as u128 * e as u128 % self.order as u128;
            return FieldElement(self.exp[l as usize]);
        }
        self.pow_raw(a, e % self.order)
    }

    /// The unique square root, `a^(2^(n-1))` (Frobenius is bijective).
    pub fn sqrt(&self, a: FieldElement) -> FieldElement {
        let mut x = a;
        for _ in 0..self.degree.saturating_sub(1) {
            x = self.mul(x, x);
        }
        debug_assert_eq!(self.mul(x, x), a);
        x
    }

    /// Discrete log base the generator, if cheaply available (n <= 32).
    pub fn dlog(&self, a: FieldElement) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        if !self.exp.is_empty() {
            return Some(self.log[a.0 as usize] as u64);
        }
        if self.degree > 32 {
            return None;
        }
        // baby-step giant-step
        let m = ((self.order as f64).sqrt().ceil()) as u64 + 1;
        let mut baby = std::collections::HashMap::with_capacity(m as usize);
        let mut cur = FieldElement::ONE;
        for j in 0..m {
            baby.entry(cur.0).or_insert(j);
            cur = self.mul(cur, self.generator);
        }
        let gm_inv = self.inv(self.pow(self.generator, m)).expect("generator nonzero");
        let mut gamma = a;
        for i in 0..=m {
            if let Some(&j) = baby.get(&gamma.0) {
                return Some((i * m + j) % self.order);
            }
            gamma = self.mul(gamma, gm_inv);
        }
        None
    }

    /// g^k convenience constructor.
    pub fn gpow(&self, k: u64) -> FieldElement {
        self.pow(self.generator, k)
    }

    // -- literals ----------------------------------------------------------

    /// Canonical rendering: `0`, `1`, `g`, or `g^k`.
    pub fn elem_to_string(&self, a: FieldElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        if a == FieldElement::ONE {
            return "1".into();
        }
        match self.dlog(a) {
            Some(1) => "g".into(),
            Some(k) => format!("g^{}", k),
            None => self.elem_to_bits_string(a),
        }
    }

    /// Bit-vector rendering `[b_{n-1}..b_0]`.
    pub fn elem_to_bits_string(&self, a: FieldElement) -> String {
        let mut s = String::with_capacity(self.degree as usize + 2);
        s.push('[');
        for i in (0..self.degree).rev() {
            s.push(if a.0 >> i & 1 == 1 { '1' } else { '0' });
        }
        s.push(']');
        s
    }

    /// Parse a constant literal: `0`, `1`, `g`, `g^k`, or `[b_{n-1}..b_0]`.
    pub fn parse_literal(&self, s: &str) -> Result<FieldElement, FieldError> {
        let bad = || FieldError::BadLiteral(s.to_string());
        let s = s.trim();
        match s {
            "0" => return Ok(FieldElement::ZERO),
            "1" => return Ok(FieldElement::ONE),
            "g" => return Ok(self.generator),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("g^") {
            let k: u64 = rest.parse().map_err(|_| bad())?;
            return Ok(self.gpow(k));
        }
        if let Some(body) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            if body.len() != self.degree as usize || !body.bytes().all(|b| b == b'0' || b == b'1')
            {
                return Err(bad());
            }
            let mut bits = 0u64;
            for b in body.bytes() {
                bits = (bits << 1) | (b - b'0') as u64;
            }
            return Ok(FieldElement(bits));
        }
        Err(bad())
    }

    // -- subfield embedding --------------------------------------------------

    /// Embed an element of GF(2^m) into this field, m | n.
    ///
    /// The image of the subfield's modulus root is the smallest (by bit
    /// pattern) root of that modulus here, so the embedding is canonical and
    /// a ring homomorphism.
    pub fn embed_subfield(
        &self,
        sub: &FieldCtx,
        x: FieldElement,
    ) -> Result<FieldElement, FieldError> {
        if self.degree % sub.degree != 0 {
            return Err(FieldError::NonDividingDegree { sub: sub.degree, sup: self.degree });
        }
        let xi = self.subfield_modulus_root(sub);
        // evaluate the bit polynomial of x at xi
        let mut acc = FieldElement::ZERO;
        for i in (0..sub.degree).rev() {
            acc = self.mul(acc, xi);
            if x.0 >> i & 1 == 1 {
                acc = self.add(acc, FieldElement::ONE);
            }
        }
        Ok(acc)
    }

    fn subfield_modulus_root(&self, sub: &FieldCtx) -> FieldElement {
        // the subfield GF(2^m) inside here is {0} and the powers of
        // g^((2^n-1)/(2^m-1)); scan it for the smallest root of sub.modulus
        let m = sub.degree;
        let sub_order = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        let h = self.gpow(self.order / sub_order);
        let eval = |z: FieldElement| -> FieldElement {
            let mut acc = FieldElement::ZERO;
            for i in (0..=m as i32).rev() {
                acc = self.mul(acc, z);
                if sub.modulus >> i & 1 == 1 {
                    acc = self.add(acc, FieldElement::ONE);
                }
            }
            acc
        };
        let mut best: Option<FieldElement> = None;
        let mut cur = FieldElement::ONE;
        for _ in 0..sub_order {
            if eval(cur).is_zero() && best.map_or(true, |b| cur < b) {
                best = Some(cur);
            }
            cur = self.mul(cur, h);
        }
        if eval(FieldElement::ZERO).is_zero() {
            best = Some(FieldElement::ZERO);
        }
        best.expect("irreducible subfield modulus has a root in the extension")
    }

    /// Iterator over all field elements in bit order (only sensible for small n).
    pub fn all_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size()).map(|b| FieldElement(b as u64))
    }
}
