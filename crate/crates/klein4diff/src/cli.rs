//! Expression front end, pipeline orchestration, and machine-readable
//! reports.
//!
//! The expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' int)?            (int may be negative)
//! base   := 't' | const | ident | '(' expr ')'
//! const  := '0' | '1' | 'g' | '[b_(n-1)..b_0]'
//! ```
//!
//! `-` and `+` coincide in characteristic two. Identifiers other than `t`
//! and `g` must be bound (`--let name=EXPR`). Reports are emitted as a
//! single JSON document on stdout with a human summary on stderr; all
//! orderings are canonical so a fixed configuration yields byte-identical
//! output.

use crate::cover::{analyze, CoverError};
use crate::field::{FieldCtx, FieldError};
use crate::holo::{action_matrices, basis_rank, build_basis, verify_holomorphic, HoloError};
use crate::klein4rep::{decompose, filtration_subquotient_dims, Decomposition, IndecLabel, ModuleError};
use crate::local::{compute_all, LocalError};
use crate::predict::{
    branch_data, canonical_probes, check_sum_ell_criterion, decompose_p1, decompose_special,
    divisor_coeffs, epsilon_constraints, filtration_dims, point_summands,
    small_ell_predicate, Probe, SpecialOutcome,
};
use crate::ratfun::{ProjPoint, RatFun, RatFunError};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Syntax { pos: usize, expected: Vec<&'static str>, found: String },
    UnknownSymbol { pos: usize, name: String },
    DivisionByZeroPoly { pos: usize },
    BadConfig(String),
    Field(FieldError),
    RatFun(RatFunError),
    Cover(CoverError),
    Local(LocalError),
    Holo(HoloError),
    Module(ModuleError),
    BasisSizeMismatch { basis: usize, genus: u64 },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Syntax { pos, expected, found } => {
                write!(f, "syntax error at position {}: found {}, expected one of {}", pos, found, expected.join(", "))
            }
            CliError::UnknownSymbol { pos, name } => {
                write!(f, "unknown symbol '{}' at position {} (bind it with --let)", name, pos)
            }
            CliError::DivisionByZeroPoly { pos } => {
                write!(f, "division by the zero rational function at position {}", pos)
            }
            CliError::BadConfig(s) => write!(f, "bad configuration: {}", s),
            CliError::Field(e) => write!(f, "{}", e),
            CliError::RatFun(e) => write!(f, "{}", e),
            CliError::Cover(e) => write!(f, "{}", e),
            CliError::Local(e) => write!(f, "{}", e),
            CliError::Holo(e) => write!(f, "{}", e),
            CliError::Module(e) => write!(f, "{}", e),
            CliError::BasisSizeMismatch { basis, genus } => {
                write!(f, "differential basis has {} elements but the genus is {}", basis, genus)
            }
        }
    }
}

impl std::error::Error for CliError {}

macro_rules! impl_from {
    ($variant:ident, $ty:ty) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::$variant(e)
            }
        }
    };
}
impl_from!(Field, FieldError);
impl_from!(RatFun, RatFunError);
impl_from!(Cover, CoverError);
impl_from!(Local, LocalError);
impl_from!(Holo, HoloError);
impl_from!(Module, ModuleError);

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Bits(String),
    Plus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>, CliError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' | '-' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                let start = i;
                let Some(end) = s[i..].find(']').map(|e| i + e) else {
                    return Err(CliError::Syntax {
                        pos: i,
                        expected: vec!["']'"],
                        found: "end of input".into(),
                    });
                };
                out.push((Tok::Bits(s[i..=end].to_string()), start));
                i = end + 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v: u64 = s[start..i].parse().map_err(|_| CliError::Syntax {
                    pos: start,
                    expected: vec!["integer"],
                    found: s[start..i].to_string(),
                })?;
                out.push((Tok::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(s[start..i].to_string()), start));
            }
            other => {
                return Err(CliError::Syntax {
                    pos: i,
                    expected: vec!["expression"],
                    found: format!("'{}'", other),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    k: &'a FieldCtx,
    bindings: &'a BTreeMap<String, RatFun>,
    input_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, p)| p).unwrap_or(self.input_len)
    }

    fn found(&self) -> String {
        match self.toks.get(self.pos) {
            Some((t, _)) => format!("{:?}", t),
            None => "end of input".into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFun, CliError> {
        let mut acc = self.term()?;
        while matches!(self.peek(), Some(Tok::Plus)) {
            self.bump();
            acc = acc.add(&self.term()?, self.k);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFun, CliError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?, self.k);
                }
                Some(Tok::Slash) => {
                    let pos = self.here();
                    self.bump();
                    let d = self.factor()?;
                    acc = acc
                        .div(&d, self.k)
                        .map_err(|_| CliError::DivisionByZeroPoly { pos })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFun, CliError> {
        let base = self.base()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let pos = self.here();
            self.bump();
            let mut neg = false;
            if matches!(self.peek(), Some(Tok::Plus)) {
                // the lexer folds '-' into Plus; in an exponent it means negation
                neg = true;
                self.bump();
            }
            let Some(Tok::Num(e)) = self.bump() else {
                return Err(CliError::Syntax {
                    pos,
                    expected: vec!["integer exponent"],
                    found: self.found(),
                });
            };
            let e = e as i64;
            let e = if neg { -e } else { e };
            return base
                .pow_i64(e, self.k)
                .map_err(|_| CliError::DivisionByZeroPoly { pos });
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<RatFun, CliError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Ident(name)) if name == "t" => Ok(RatFun::t()),
            Some(Tok::Ident(name)) if name == "g" => {
                Ok(RatFun::constant(self.k.generator()))
            }
            Some(Tok::Ident(name)) => self
                .bindings
                .get(&name)
                .cloned()
                .ok_or(CliError::UnknownSymbol { pos, name }),
            Some(Tok::Num(0)) => Ok(RatFun::zero()),
            Some(Tok::Num(1)) => Ok(RatFun::one()),
            Some(Tok::Num(_)) => Err(CliError::Syntax {
                pos,
                expected: vec!["'0'", "'1'", "'t'", "'g'", "bit vector", "'('"],
                found: self.found_at(pos),
            }),
            Some(Tok::Bits(lit)) => {
                let v = self.k.parse_literal(&lit).map_err(|_| CliError::Syntax {
                    pos,
                    expected: vec!["bit vector of the field degree"],
                    found: lit.clone(),
                })?;
                Ok(RatFun::constant(v))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(CliError::Syntax {
                        pos: self.here(),
                        expected: vec!["')'"],
                        found: self.found(),
                    }),
                }
            }
            _ => Err(CliError::Syntax {
                pos,
                expected: vec!["'t'", "constant", "identifier", "'('"],
                found: self.found_at(pos),
            }),
        }
    }

    fn found_at(&self, pos: usize) -> String {
        self.toks
            .iter()
            .find(|&&(_, p)| p == pos)
            .map(|(t, _)| format!("{:?}", t))
            .unwrap_or_else(|| "end of input".into())
    }
}

/// Parse an expression into an exact rational function.
pub fn parse_expr(
    s: &str,
    k: &FieldCtx,
    bindings: &BTreeMap<String, RatFun>,
) -> Result<RatFun, CliError> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0, k, bindings, input_len: s.len() };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(CliError::Syntax {
            pos: p.here(),
            expected: vec!["operator", "end of input"],
            found: p.found(),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    Analyze,
    Predict,
    Verify,
    Full,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode, CliError> {
        match s {
            "analyze" => Ok(Mode::Analyze),
            "predict" => Ok(Mode::Predict),
            "verify" => Ok(Mode::Verify),
            "full" => Ok(Mode::Full),
            other => Err(CliError::BadConfig(format!(
                "unknown mode '{}' (expected analyze, predict, verify, or full)",
                other
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Analyze => "analyze",
            Mode::Predict => "predict",
            Mode::Verify => "verify",
            Mode::Full => "full",
        }
    }
}

/// A fully specified run.
#[derive(Clone, Debug)]
pub struct InstanceConfig {
    pub field_degree: u32,
    /// Modulus bits; None selects the canonical irreducible.
    pub modulus: Option<u128>,
    pub p_expr: String,
    pub q_expr: String,
    pub mode: Mode,
    /// Probe literals ("inf", "g^3", ...); empty means the canonical set.
    pub probes: Vec<String>,
    /// Name bindings, evaluated in order (later ones may use earlier ones).
    pub lets: Vec<(String, String)>,
}

impl InstanceConfig {
    /// Parse the simple key=value configuration format. Keys: field_degree,
    /// modulus (hex), p, q, mode, probe (repeatable), let.NAME.
    pub fn from_config_text(text: &str) -> Result<InstanceConfig, CliError> {
        let mut field_degree = None;
        let mut modulus = None;
        let mut p_expr = None;
        let mut q_expr = None;
        let mut mode = Mode::Full;
        let mut probes = Vec::new();
        let mut lets = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::BadConfig(format!("line {}: expected key = value", ln + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "field_degree" => {
                    field_degree = Some(value.parse().map_err(|_| {
                        CliError::BadConfig(format!("line {}: bad field_degree", ln + 1))
                    })?);
                }
                "modulus" => {
                    let v = value.trim_start_matches("0x");
                    modulus = Some(u128::from_str_radix(v, 16).map_err(|_| {
                        CliError::BadConfig(format!("line {}: bad modulus (hex)", ln + 1))
                    })?);
                }
                "p" => p_expr = Some(value.to_string()),
                "q" => q_expr = Some(value.to_string()),
                "mode" => mode = Mode::parse(value)?,
                "probe" => probes.push(value.to_string()),
                _ if key.starts_with("let.") => {
                    lets.push((key[4..].trim().to_string(), value.to_string()));
                }
                other => {
                    return Err(CliError::BadConfig(format!("line {}: unknown key '{}'", ln + 1, other)));
                }
            }
        }
        Ok(InstanceConfig {
            field_degree: field_degree
                .ok_or_else(|| CliError::BadConfig("missing field_degree".into()))?,
            modulus,
            p_expr: p_expr.ok_or_else(|| CliError::BadConfig("missing p".into()))?,
            q_expr: q_expr.ok_or_else(|| CliError::BadConfig("missing q".into()))?,
            mode,
            probes,
            lets,
        })
    }
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Serialize, Clone, Debug)]
pub struct FieldReport {
    pub degree: u32,
    pub modulus_hex: String,
    pub generator_bits: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct BranchRow {
    pub y: String,
    pub y_original: String,
    pub m: u64,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub case: String,
    pub lambda: String,
    pub delta: i64,
    pub class: String,
    pub different_exp: u64,
    pub ell: u64,
    pub a1: u64,
    pub a2: u64,
    pub small_ell: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct DivisorRow {
    pub y: String,
    pub d: [u64; 4],
}

#[derive(Serialize, Clone, Debug)]
pub struct ProbeReport {
    pub lambda: String,
    pub divisors: Vec<DivisorRow>,
    pub r: [u64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_r: Option<[u64; 4]>,
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct SummandRow {
    pub kind: String,
    pub dim: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_bits: Option<String>,
    pub multiplicity: u64,
}

#[derive(Serialize, Clone, Debug)]
pub struct EpsilonReport {
    pub eps1: Vec<(String, u64)>,
    pub eps2: u64,
    pub eps3_plus_eps4: u64,
    pub eps5: u64,
    pub excluded: Vec<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct SpecialReport {
    pub applies: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Vec<SummandRow>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub offending_branch_points: Vec<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct SumEllReport {
    pub bound: u64,
    pub ell_sum: u64,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forced_eps4: Option<u64>,
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub field: FieldReport,
    pub mode: String,
    pub p: String,
    pub q: String,
    pub normalization: String,
    pub branch_points: Vec<BranchRow>,
    pub genus: u64,
    pub katz_gabber: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub probes: Vec<ProbeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<EpsilonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_case: Option<SpecialReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_ell: Option<SumEllReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<Vec<SummandRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<Vec<SummandRow>>,
    pub verdict: String,
}

fn lambda_string(l: ProjPoint, k: &FieldCtx) -> String {
    l.to_string(k)
}

fn summand_rows(dec: &Decomposition, k: &FieldCtx) -> Vec<SummandRow> {
    dec.entries()
        .map(|(label, mult)| {
            let (kind, lambda) = match label {
                IndecLabel::N { lambda, .. } => ("N", Some(lambda)),
                IndecLabel::M1 { .. } => ("M1", None),
                IndecLabel::M2 { .. } => ("M2", None),
                IndecLabel::Triv => ("Triv", None),
                IndecLabel::Free => ("Free", None),
            };
            SummandRow {
                kind: kind.into(),
                dim: label.dim(),
                lambda: lambda.map(|l| lambda_string(l, k)),
                lambda_bits: lambda.and_then(|l| match l {
                    ProjPoint::Finite(x) => Some(k.elem_to_bits_string(x)),
                    ProjPoint::Infinity => None,
                }),
                multiplicity: mult,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

/// Run the pipeline for one configuration.
pub fn run(cfg: &InstanceConfig) -> Result<Report, CliError> {
    let k = match cfg.modulus {
        Some(m) => FieldCtx::with_modulus(cfg.field_degree, m)?,
        None => FieldCtx::new(cfg.field_degree)?,
    };
    let mut bindings = BTreeMap::new();
    for (name, expr) in &cfg.lets {
        if name == "t" || name == "g" || name.is_empty() {
            return Err(CliError::BadConfig(format!("cannot bind reserved name '{}'", name)));
        }
        let value = parse_expr(expr, &k, &bindings)?;
        bindings.insert(name.clone(), value);
    }
    let p = parse_expr(&cfg.p_expr, &k, &bindings)?;
    let q = parse_expr(&cfg.q_expr, &k, &bindings)?;
    if p == q {
        return Err(CliError::BadConfig("p and q must differ".into()));
    }

    let an = analyze(&p, &q, &k)?;
    let locals = compute_all(&an, &k)?;
    let data = branch_data(&locals);

    let branch_points: Vec<BranchRow> = an
        .branch
        .iter()
        .zip(&locals)
        .zip(&data)
        .map(|((bp, ld), bd)| {
            let ps = point_summands(bd);
            BranchRow {
                y: bp.y.to_string(&k),
                y_original: an.original_point(bp.y, &k).to_string(&k),
                m: bp.m,
                big_m: bp.big_m,
                case: bp.tag.as_str().into(),
                lambda: lambda_string(ld.lambda, &k),
                delta: ld.delta,
                class: ld.class.as_str().into(),
                different_exp: bp.different_exp,
                ell: ps.ell,
                a1: ps.a1,
                a2: ps.a2,
                small_ell: small_ell_predicate(bd),
            }
        })
        .collect();

    let mut report = Report {
        field: FieldReport {
            degree: k.degree(),
            modulus_hex: format!("{:#x}", k.modulus()),
            generator_bits: k.elem_to_bits_string(k.generator()),
        },
        mode: cfg.mode.as_str().into(),
        p: p.to_string(&k),
        q: q.to_string(&k),
        normalization: if an.normalization.is_identity() {
            "identity".into()
        } else {
            an.normalization.to_string(&k)
        },
        branch_points,
        genus: an.genus,
        katz_gabber: an.katz_gabber(),
        probes: Vec::new(),
        epsilon: None,
        special_case: None,
        sum_ell: None,
        predicted: None,
        basis_size: None,
        verified: None,
        verdict: "PREDICTION_ONLY".into(),
    };
    if cfg.mode == Mode::Analyze {
        return Ok(report);
    }

    // probe set: user override or the canonical probes
    let probes: Vec<Probe> = if cfg.probes.is_empty() {
        canonical_probes(&data, &k)
    } else {
        let mut out = Vec::new();
        for lit in &cfg.probes {
            let pp = if lit == "inf" {
                ProjPoint::Infinity
            } else {
                ProjPoint::Finite(k.parse_literal(lit)?)
            };
            out.push(Probe(pp));
        }
        out.sort();
        out.dedup();
        out
    };

    let predicted = decompose_p1(&data);
    let eps = epsilon_constraints(&data, 0);
    let special = decompose_special(&data, 0);
    let ell_sum: u64 = predicted
        .entries()
        .filter_map(|(l, m)| match l {
            IndecLabel::N { n, .. } => Some(n * m),
            _ => None,
        })
        .sum();
    let sum_ell = check_sum_ell_criterion(&data, ell_sum);

    report.probes = probes
        .iter()
        .map(|&probe| ProbeReport {
            lambda: lambda_string(probe.0, &k),
            divisors: an
                .branch
                .iter()
                .zip(&data)
                .map(|(bp, bd)| DivisorRow {
                    y: bp.y.to_string(&k),
                    d: divisor_coeffs(bd, probe, &k),
                })
                .collect(),
            r: {
                let fd = filtration_dims(&data, probe, &k);
                [fd.r0, fd.r1, fd.r2, fd.r3]
            },
            matrix_r: None,
        })
        .collect();
    report.epsilon = Some(EpsilonReport {
        eps1: eps
            .eps1
            .iter()
            .map(|(&l, &v)| (lambda_string(l, &k), v))
            .collect(),
        eps2: eps.eps2,
        eps3_plus_eps4: eps.eps3_plus_eps4,
        eps5: eps.eps5,
        excluded: eps.excluded.iter().map(|&l| lambda_string(l, &k)).collect(),
    });
    report.special_case = Some(match &special {
        SpecialOutcome::Applies(dec) => SpecialReport {
            applies: true,
            decomposition: Some(summand_rows(dec, &k)),
            offending_branch_points: Vec::new(),
        },
        SpecialOutcome::NotApplicable(idx) => SpecialReport {
            applies: false,
            decomposition: None,
            offending_branch_points: idx
                .iter()
                .map(|&i| an.branch[i].y.to_string(&k))
                .collect(),
        },
    });
    report.sum_ell = Some(SumEllReport {
        bound: sum_ell.bound,
        ell_sum,
        holds: sum_ell.holds,
        forced_eps4: sum_ell.forced_eps4,
    });
    report.predicted = Some(summand_rows(&predicted, &k));
    if cfg.mode == Mode::Predict {
        return Ok(report);
    }

    // verification by explicit linear algebra on the differential basis
    let basis = build_basis(&an, &locals, &k);
    if basis.elems.len() as u64 != an.genus {
        return Err(CliError::BasisSizeMismatch { basis: basis.elems.len(), genus: an.genus });
    }
    if cfg.mode == Mode::Full {
        if basis_rank(&basis, &k) != basis.elems.len() {
            return Err(CliError::Holo(HoloError::ImageOutsideBasis));
        }
        for e in &basis.elems {
            if !verify_holomorphic(&e.f, &an, &locals, &k) {
                return Err(CliError::Holo(HoloError::ImageOutsideBasis));
            }
        }
    }
    let module = action_matrices(&an, &basis, &k)?;
    module.check_invariants(&k)?;
    let verified = decompose(&module, &k)?;
    if cfg.mode == Mode::Full {
        for (pr, &probe) in report.probes.iter_mut().zip(&probes) {
            let dims = filtration_subquotient_dims(&module, probe.0, &k);
            // r_i = dim(M^(i+1)/M^(i)) + 1 over a rational base
            pr.matrix_r = Some([
                dims[3] as u64 + 1,
                dims[2] as u64 + 1,
                dims[1] as u64 + 1,
                dims[0] as u64 + 1,
            ]);
        }
    }
    report.basis_size = Some(basis.elems.len() as u64);
    report.verified = Some(summand_rows(&verified, &k));
    report.verdict = if verified == predicted { "MATCH".into() } else { "MISMATCH".into() };
    Ok(report)
}

/// Decomposition helper shared with tests: run and return the exact multisets.
pub fn run_decompositions(
    cfg: &InstanceConfig,
) -> Result<(Decomposition, Decomposition), CliError> {
    let k = match cfg.modulus {
        Some(m) => FieldCtx::with_modulus(cfg.field_degree, m)?,
        None => FieldCtx::new(cfg.field_degree)?,
    };
    let mut bindings = BTreeMap::new();
    for (name, expr) in &cfg.lets {
        let value = parse_expr(expr, &k, &bindings)?;
        bindings.insert(name.clone(), value);
    }
    let p = parse_expr(&cfg.p_expr, &k, &bindings)?;
    let q = parse_expr(&cfg.q_expr, &k, &bindings)?;
    let an = analyze(&p, &q, &k)?;
    let locals = compute_all(&an, &k)?;
    let data = branch_data(&locals);
    let predicted = decompose_p1(&data);
    let basis = build_basis(&an, &locals, &k);
    let module = action_matrices(&an, &basis, &k)?;
    let verified = decompose(&module, &k)?;
    Ok((predicted, verified))
}

/// Render the human-readable summary (for stderr).
pub fn human_summary(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "field GF(2^{}), modulus {}, generator {}\n",
        report.field.degree, report.field.modulus_hex, report.field.generator_bits
    ));
    out.push_str(&format!("normalization: {}\n", report.normalization));
    out.push_str("branch points (normalized coordinates):\n");
    out.push_str("  y          orig       m   M   case  lambda  delta  class  d_x/y\n");
    for b in &report.branch_points {
        out.push_str(&format!(
            "  {:<10} {:<10} {:<3} {:<3} {:<5} {:<7} {:<6} {:<6} {}\n",
            b.y, b.y_original, b.m, b.big_m, b.case, b.lambda, b.delta, b.class, b.different_exp
        ));
    }
    out.push_str(&format!("genus {}\n", report.genus));
    let fmt_dec = |rows: &Vec<SummandRow>| -> String {
        rows.iter()
            .map(|r| {
                let head = match (&r.kind[..], &r.lambda) {
                    ("N", Some(l)) => format!("N({},{})", r.dim, l),
                    (k, _) if k == "M1" || k == "M2" => format!("{}({})", k, r.dim),
                    (k, _) => k.to_string(),
                };
                if r.multiplicity == 1 { head } else { format!("{}^{}", head, r.multiplicity) }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    };
    if let Some(p) = &report.predicted {
        out.push_str(&format!("predicted: {}\n", fmt_dec(p)));
    }
    if let Some(v) = &report.verified {
        out.push_str(&format!("verified:  {}\n", fmt_dec(v)));
    }
    out.push_str(&format!("verdict {}\n", report.verdict));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: &str, q: &str) -> InstanceConfig {
        InstanceConfig {
            field_degree: 4,
            modulus: None,
            p_expr: p.into(),
            q_expr: q.into(),
            mode: Mode::Full,
            probes: Vec::new(),
            lets: Vec::new(),
        }
    }

    #[test]
    fn parser_accepts_the_grammar() {
        let k = FieldCtx::new(4).unwrap();
        let empty = BTreeMap::new();
        // t^11 + 0 is t^11
        let f = parse_expr("t^11 + 0", &k, &empty).unwrap();
        assert_eq!(f, RatFun::t().pow_i64(11, &k).unwrap());
        // '-' means '+'
        assert_eq!(
            parse_expr("t - 1", &k, &empty).unwrap(),
            parse_expr("t + 1", &k, &empty).unwrap()
        );
        // powers of the generator and bit vectors
        assert_eq!(
            parse_expr("g^5", &k, &empty).unwrap(),
            RatFun::constant(k.gpow(5))
        );
        assert_eq!(
            parse_expr("[0110]", &k, &empty).unwrap(),
            RatFun::constant(k.elem(0b0110))
        );
        // negative exponents
        assert_eq!(
            parse_expr("t^-2", &k, &empty).unwrap(),
            RatFun::t().pow_i64(-2, &k).unwrap()
        );
    }

    #[test]
    fn parser_reports_errors_with_positions() {
        let k = FieldCtx::new(4).unwrap();
        let empty = BTreeMap::new();
        match parse_expr("1/(t-t)", &k, &empty) {
            Err(CliError::DivisionByZeroPoly { pos }) => assert_eq!(pos, 1),
            other => panic!("expected DivisionByZeroPoly, got {:?}", other),
        }
        match parse_expr("t + b", &k, &empty) {
            Err(CliError::UnknownSymbol { pos, name }) => {
                assert_eq!(pos, 4);
                assert_eq!(name, "b");
            }
            other => panic!("expected UnknownSymbol, got {:?}", other),
        }
        assert!(matches!(
            parse_expr("t + ", &k, &empty),
            Err(CliError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("t^t", &k, &empty),
            Err(CliError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("7*t", &k, &empty),
            Err(CliError::Syntax { .. })
        ));
    }

    #[test]
    fn parser_never_panics_on_junk() {
        let k = FieldCtx::new(4).unwrap();
        let empty = BTreeMap::new();
        let mut s = 0xfeedu64;
        let alphabet: Vec<char> =
            "tg01579+-*/^()[] ab_".chars().collect();
        for _ in 0..2000 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let len = (s >> 59) as usize;
            let mut input = String::new();
            let mut state = s;
            for _ in 0..len {
                state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                input.push(alphabet[(state >> 58) as usize % alphabet.len()]);
            }
            let _ = parse_expr(&input, &k, &empty); // must not panic
        }
    }

    #[test]
    fn parse_print_round_trip() {
        let k = FieldCtx::new(4).unwrap();
        let empty = BTreeMap::new();
        for src in ["t^3 + g^2*t + 1", "(t^2 + g)/(t^3 + t + 1)", "1/(t*(t-1)^3)"] {
            let f = parse_expr(src, &k, &empty).unwrap();
            let printed = f.to_string(&k);
            let back = parse_expr(&printed, &k, &empty).unwrap();
            assert_eq!(back, f, "round trip through {}", printed);
        }
    }

    #[test]
    fn bindings_resolve_in_order() {
        let mut c = cfg("1/(t*(t-b)^3)", "b/(t^3*(t-b))");
        c.lets.push(("b".into(), "g^3".into()));
        c.mode = Mode::Analyze;
        let rep = run(&c).unwrap();
        assert_eq!(rep.branch_points.len(), 2);
    }

    #[test]
    fn full_run_matches_on_small_instance() {
        let mut c = cfg("t^3", "g^10*t^3");
        c.mode = Mode::Full;
        let rep = run(&c).unwrap();
        assert_eq!(rep.verdict, "MATCH");
        assert_eq!(rep.genus, 3);
        assert_eq!(rep.basis_size, Some(3));
        // matrix filtration dims agree with the formula at every probe
        for pr in &rep.probes {
            assert_eq!(Some(pr.r), pr.matrix_r);
        }
        // deterministic output
        let again = run(&c).unwrap();
        assert_eq!(
            serde_json::to_string(&rep).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn genus_zero_cover_matches_trivially() {
        // p = t, q = g t: one branch point with m = M = 1 and mixing
        // coefficient sqrt(g) = g^8; genus 0, so the branch parameter drops
        // out of the (empty) module entirely
        let mut c = cfg("t", "g*t");
        c.mode = Mode::Full;
        let rep = run(&c).unwrap();
        assert_eq!(rep.genus, 0);
        assert_eq!(rep.verdict, "MATCH");
        assert_eq!(rep.predicted.as_deref(), Some(&[][..]));
        assert_eq!(rep.branch_points[0].lambda, "g^8");
        let eps = rep.epsilon.unwrap();
        assert_eq!(eps.excluded, vec!["g^8".to_string()]);
    }

    #[test]
    fn degenerate_input_is_an_error() {
        let c = cfg("t^3", "t^3");
        assert!(matches!(run(&c), Err(CliError::BadConfig(_))));
        let c2 = cfg("t^2 + t", "t^3");
        assert!(matches!(run(&c2), Err(CliError::Cover(_))));
    }

    #[test]
    fn config_file_round_trip() {
        let text = "\
# instance
field_degree = 4
p = 1/(t*(t-1)^3*(t-a)^3*(t-b)^3)
q = a/(t^3*(t-1)*(t-a)^3*(t-b)^3)
mode = predict
let.a = g^5
let.b = [1101]
probe = inf
probe = g^5
";
        let c = InstanceConfig::from_config_text(text).unwrap();
        assert_eq!(c.field_degree, 4);
        assert_eq!(c.mode, Mode::Predict);
        assert_eq!(c.lets.len(), 2);
        assert_eq!(c.probes, vec!["inf", "g^5"]);
        let rep = run(&c).unwrap();
        assert_eq!(rep.genus, 18);
        assert_eq!(rep.verdict, "PREDICTION_ONLY");
    }
}
