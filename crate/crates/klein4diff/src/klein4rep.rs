//! Characteristic-two representation theory of the Klein four group.
//!
//! A module is a pair of commuting square-zero matrices S, T over GF(2^n),
//! the actions of sigma - 1 and tau - 1. Every indecomposable is one of:
//!
//! - `Triv` (dimension 1) and `Free` (the group ring, dimension 4),
//! - `N(2n, lambda)` for lambda in k union {infinity}: S, T act by paired
//!   blocks (identity, Jordan block J_n(lambda)), swapped when lambda is
//!   infinity,
//! - `M1(2n+1)` and `M2(2n+1)`, the odd-dimensional pair.
//!
//! `decompose` recovers the multiset of indecomposable summands of an
//! arbitrary module exactly: split off the free part (multiplicity =
//! rank(ST)), then classify the remaining pair of operators as a Kronecker
//! matrix pencil V/W -> im S + im T by deflating singular blocks with
//! minimal-degree polynomial solutions and reading the regular part's
//! eigenstructure from exact chain spaces. Gaussian elimination uses
//! leftmost-nonzero pivoting throughout; output ordering is canonical
//! (labels sorted by kind, dimension, parameter).

use crate::field::{FieldCtx, FieldElement};
use crate::linalg::Mat;
use crate::ratfun::{roots_with_multiplicity, Poly, ProjPoint};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Errors from module construction and decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleError {
    /// S^2 != 0, T^2 != 0, or ST != TS (or an internal exactness check failed).
    InvariantViolation(String),
    /// A pencil eigenvalue does not lie in the coefficient field; carries the
    /// minimal-polynomial obstruction.
    FieldTooSmall { obstruction: Poly },
    /// A relabeling that is not a permutation of the three involutions.
    NotAutomorphism,
    /// Malformed matrix file.
    Parse(String),
}

impl fmt::Display for ModuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleError::InvariantViolation(s) => write!(f, "module invariant violated: {}", s),
            ModuleError::FieldTooSmall { obstruction } => write!(
                f,
                "pencil eigenvalue lies outside the field (obstruction of degree {})",
                obstruction.deg().unwrap_or(0)
            ),
            ModuleError::NotAutomorphism => write!(f, "not an automorphism of the Klein four group"),
            ModuleError::Parse(s) => write!(f, "bad module file: {}", s),
        }
    }
}

impl std::error::Error for ModuleError {}

// ---------------------------------------------------------------------------
// Labels and decompositions
// ---------------------------------------------------------------------------

/// Isomorphism class of an indecomposable module. `n` follows the classical
/// indexing: N has dimension 2n, M1/M2 have dimension 2n+1 (n >= 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndecLabel {
    N { n: u64, lambda: ProjPoint },
    M1 { n: u64 },
    M2 { n: u64 },
    Triv,
    Free,
}

impl IndecLabel {
    pub fn dim(self) -> u64 {
        match self {
            IndecLabel::Triv => 1,
            IndecLabel::Free => 4,
            IndecLabel::N { n, .. } => 2 * n,
            IndecLabel::M1 { n } | IndecLabel::M2 { n } => 2 * n + 1,
        }
    }

    pub fn to_string(self, k: &FieldCtx) -> String {
        match self {
            IndecLabel::Triv => "Triv".into(),
            IndecLabel::Free => "Free".into(),
            IndecLabel::N { n, lambda } => format!("N({},{})", 2 * n, lambda.to_string(k)),
            IndecLabel::M1 { n } => format!("M1({})", 2 * n + 1),
            IndecLabel::M2 { n } => format!("M2({})", 2 * n + 1),
        }
    }
}

/// A multiset of indecomposable labels, canonically ordered.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Decomposition {
    counts: BTreeMap<IndecLabel, u64>,
}

impl Decomposition {
    pub fn new() -> Decomposition {
        Decomposition::default()
    }

    /// Add `mult` copies; zero-dimensional N(0, .) summands are dropped.
    pub fn add(&mut self, label: IndecLabel, mult: u64) {
        if mult == 0 {
            return;
        }
        if let IndecLabel::N { n: 0, .. } = label {
            return;
        }
        *self.counts.entry(label).or_insert(0) += mult;
    }

    pub fn from_labels(labels: &[(IndecLabel, u64)]) -> Decomposition {
        let mut d = Decomposition::new();
        for &(l, m) in labels {
            d.add(l, m);
        }
        d
    }

    pub fn entries(&self) -> impl Iterator<Item = (IndecLabel, u64)> + '_ {
        self.counts.iter().map(|(&l, &m)| (l, m))
    }

    pub fn multiplicity(&self, label: IndecLabel) -> u64 {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> u64 {
        self.counts.iter().map(|(l, m)| l.dim() * m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Parameters of the N-summands with multiplicity (the set Lambda_M).
    pub fn n_parameters(&self) -> BTreeMap<ProjPoint, u64> {
        let mut out = BTreeMap::new();
        for (l, m) in self.entries() {
            if let IndecLabel::N { lambda, .. } = l {
                *out.entry(lambda).or_insert(0) += m;
            }
        }
        out
    }

    pub fn to_string(&self, k: &FieldCtx) -> String {
        if self.counts.is_empty() {
            return "0".into();
        }
        self.entries()
            .map(|(l, m)| {
                if m == 1 {
                    l.to_string(k)
                } else {
                    format!("{}^{}", l.to_string(k), m)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Modules
// ---------------------------------------------------------------------------

/// A finite-dimensional module: the matrices of sigma - 1 and tau - 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleinModule {
    pub dim: usize,
    pub s: Mat,
    pub t: Mat,
}

impl KleinModule {
    pub fn new(s: Mat, t: Mat) -> KleinModule {
        assert_eq!(s.rows(), s.cols());
        assert_eq!(t.rows(), t.cols());
        assert_eq!(s.rows(), t.rows());
        KleinModule { dim: s.rows(), s, t }
    }

    pub fn zero_module() -> KleinModule {
        KleinModule::new(Mat::zeros(0, 0), Mat::zeros(0, 0))
    }

    /// S^2 = T^2 = 0 and ST = TS.
    pub fn check_invariants(&self, k: &FieldCtx) -> Result<(), ModuleError> {
        if !self.s.mul(&self.s, k).is_zero() {
            return Err(ModuleError::InvariantViolation("S^2 != 0".into()));
        }
        if !self.t.mul(&self.t, k).is_zero() {
            return Err(ModuleError::InvariantViolation("T^2 != 0".into()));
        }
        if self.s.mul(&self.t, k) != self.t.mul(&self.s, k) {
            return Err(ModuleError::InvariantViolation("ST != TS".into()));
        }
        Ok(())
    }

    pub fn direct_sum(parts: &[KleinModule]) -> KleinModule {
        let mut s = Mat::zeros(0, 0);
        let mut t = Mat::zeros(0, 0);
        for p in parts {
            s = s.block_diag(&p.s);
            t = t.block_diag(&p.t);
        }
        KleinModule::new(s, t)
    }

    /// Conjugate by an invertible basis change: S -> P^-1 S P.
    pub fn conjugate(&self, p: &Mat, k: &FieldCtx) -> KleinModule {
        let p_inv = p
            .solve_matrix(&Mat::identity(self.dim), k)
            .expect("basis change must be invertible");
        KleinModule::new(
            p_inv.mul(&self.s.mul(p, k), k),
            p_inv.mul(&self.t.mul(p, k), k),
        )
    }

    /// Matrix of the action of a group element (as 1 + X for X in {S, T, S+T+ST}).
    fn involution_action(&self, g: Involution, k: &FieldCtx) -> Mat {
        match g {
            Involution::Sigma => self.s.clone(),
            Involution::Tau => self.t.clone(),
            Involution::SigmaTau => self.s.add(&self.t).add(&self.s.mul(&self.t, k)),
        }
    }

    /// The module with every non-identity g acting as xi(g).
    pub fn relabel(&self, xi: &GroupPerm, k: &FieldCtx) -> KleinModule {
        KleinModule::new(
            self.involution_action(xi.image(Involution::Sigma), k),
            self.involution_action(xi.image(Involution::Tau), k),
        )
    }
}

/// The three involutions of the Klein four group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Involution {
    Sigma,
    Tau,
    SigmaTau,
}

/// A permutation of the involutions; every such permutation is induced by a
/// group automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPerm {
    image: [Involution; 3], // images of sigma, tau, sigma*tau
}

impl GroupPerm {
    pub fn new(image: [Involution; 3]) -> Result<GroupPerm, ModuleError> {
        let mut seen = [false; 3];
        for g in image {
            let i = match g {
                Involution::Sigma => 0,
                Involution::Tau => 1,
                Involution::SigmaTau => 2,
            };
            if seen[i] {
                return Err(ModuleError::NotAutomorphism);
            }
            seen[i] = true;
        }
        Ok(GroupPerm { image })
    }

    pub fn identity() -> GroupPerm {
        GroupPerm { image: [Involution::Sigma, Involution::Tau, Involution::SigmaTau] }
    }

    /// Swap sigma and tau.
    pub fn xi1() -> GroupPerm {
        GroupPerm { image: [Involution::Tau, Involution::Sigma, Involution::SigmaTau] }
    }

    /// Swap tau and sigma*tau.
    pub fn xi2() -> GroupPerm {
        GroupPerm { image: [Involution::Sigma, Involution::SigmaTau, Involution::Tau] }
    }

    pub fn image(&self, g: Involution) -> Involution {
        match g {
            Involution::Sigma => self.image[0],
            Involution::Tau => self.image[1],
            Involution::SigmaTau => self.image[2],
        }
    }
}

// ---------------------------------------------------------------------------
// Constructors for the indecomposables
// ---------------------------------------------------------------------------

fn jordan_block(n: usize, lambda: FieldElement) -> Mat {
    Mat::from_fn(n, n, |r, c| {
        if r == c {
            lambda
        } else if c == r + 1 {
            FieldElement::ONE
        } else {
            FieldElement::ZERO
        }
    })
}

/// Top-right block form [[0, X], [0, 0]].
fn paired_block(x: &Mat) -> Mat {
    let n = x.rows();
    let mut m = Mat::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            m.set(r, n + c, x.get(r, c));
        }
    }
    m
}

/// Exact matrices of each indecomposable module.
pub fn build_indecomposable(label: IndecLabel, _k: &FieldCtx) -> KleinModule {
    match label {
        IndecLabel::Triv => KleinModule::new(Mat::zeros(1, 1), Mat::zeros(1, 1)),
        IndecLabel::Free => {
            // basis {1, s, t, st} of the group ring
            let mut s = Mat::zeros(4, 4);
            s.set(1, 0, FieldElement::ONE);
            s.set(3, 2, FieldElement::ONE);
            let mut t = Mat::zeros(4, 4);
            t.set(2, 0, FieldElement::ONE);
            t.set(3, 1, FieldElement::ONE);
            KleinModule::new(s, t)
        }
        IndecLabel::N { n, lambda } => {
            let n = n as usize;
            assert!(n >= 1);
            match lambda {
                ProjPoint::Finite(l) => KleinModule::new(
                    paired_block(&Mat::identity(n)),
                    paired_block(&jordan_block(n, l)),
                ),
                ProjPoint::Infinity => KleinModule::new(
                    paired_block(&jordan_block(n, FieldElement::ZERO)),
                    paired_block(&Mat::identity(n)),
                ),
            }
        }
        IndecLabel::M1 { n } => {
            // image space e_0..e_{n-1}; tail e_n..e_{2n}
            let n = n as usize;
            assert!(n >= 1);
            let dim = 2 * n + 1;
            let mut s = Mat::zeros(dim, dim);
            let mut t = Mat::zeros(dim, dim);
            for j in 0..n {
                s.set(j, n + j, FieldElement::ONE);
                t.set(j, n + 1 + j, FieldElement::ONE);
            }
            KleinModule::new(s, t)
        }
        IndecLabel::M2 { n } => {
            // image space e_0..e_n; tail e_{n+1}..e_{2n}
            let n = n as usize;
            assert!(n >= 1);
            let dim = 2 * n + 1;
            let mut s = Mat::zeros(dim, dim);
            let mut t = Mat::zeros(dim, dim);
            for j in 0..n {
                s.set(j, n + 1 + j, FieldElement::ONE);
                t.set(j + 1, n + 1 + j, FieldElement::ONE);
            }
            KleinModule::new(s, t)
        }
    }
}

// ---------------------------------------------------------------------------
// Filtration subquotient dimensions (Table 1 oracle)
// ---------------------------------------------------------------------------

/// Dimensions of the successive subquotients U(4)/U(3), U(3)/U(2),
/// U(2)/U(1), U(1)/U(0) for the probe operator family: U(1) is the common
/// kernel of S and T, U(2) the kernel of lambda*S + T (or S for the probe at
/// infinity), U(3) the kernel of ST, U(4) everything.
pub fn filtration_subquotient_dims(
    m: &KleinModule,
    probe: ProjPoint,
    k: &FieldCtx,
) -> [usize; 4] {
    let dim = m.dim;
    let u1 = dim - m.s.vstack(&m.t).rank(k);
    let f2 = match probe {
        ProjPoint::Finite(l) => {
            let mut ls = Mat::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    ls.set(r, c, k.mul(l, m.s.get(r, c)));
                }
            }
            ls.add(&m.t)
        }
        ProjPoint::Infinity => m.s.clone(),
    };
    let u2 = dim - f2.rank(k);
    let u3 = dim - m.s.mul(&m.t, k).rank(k);
    [dim - u3, u3 - u2, u2 - u1, u1]
}

// ---------------------------------------------------------------------------
// Decomposition into indecomposables
// ---------------------------------------------------------------------------

/// Decompose a module into its indecomposable direct summands.
pub fn decompose(m: &KleinModule, k: &FieldCtx) -> Result<Decomposition, ModuleError> {
    m.check_invariants(k)?;
    let mut out = Decomposition::new();
    if m.dim == 0 {
        return Ok(out);
    }

    // 1. free part: multiplicity = rank(ST); the quotient by a free
    // submodule is a complement because free modules are injective here.
    let st = m.s.mul(&m.t, k);
    let (im_st, pivot_cols) = st.column_space_basis(k);
    let e5 = pivot_cols.len();
    let (q, qdim) = if e5 > 0 {
        let mut f_cols: Vec<Vec<FieldElement>> = Vec::with_capacity(4 * e5);
        for (i, &c) in pivot_cols.iter().enumerate() {
            let mut z = vec![FieldElement::ZERO; m.dim];
            z[c] = FieldElement::ONE;
            f_cols.push(m.s.mul_vec(&z, k));
            f_cols.push(m.t.mul_vec(&z, k));
            f_cols.push(im_st.col(i)); // ST z is the i-th chosen column of ST
            f_cols.push(z);
        }
        let f = Mat::from_cols(m.dim, &f_cols);
        if f.rank(k) != 4 * e5 {
            return Err(ModuleError::InvariantViolation(
                "free submodule basis is not independent".into(),
            ));
        }
        let comp = f.complete_basis(k);
        let full = f.hstack(&comp);
        let full_inv = full
            .solve_matrix(&Mat::identity(m.dim), k)
            .expect("basis matrix invertible");
        let qdim = m.dim - 4 * e5;
        let proj = Mat::from_fn(qdim, m.dim, |r, c| full_inv.get(4 * e5 + r, c));
        let sq = proj.mul(&m.s.mul(&comp, k), k);
        let tq = proj.mul(&m.t.mul(&comp, k), k);
        (KleinModule::new(sq, tq), qdim)
    } else {
        (m.clone(), m.dim)
    };
    out.add(IndecLabel::Free, e5 as u64);
    if qdim == 0 {
        return Ok(out);
    }
    if !q.s.mul(&q.t, k).is_zero() {
        return Err(ModuleError::InvariantViolation(
            "quotient by the free part still has ST != 0".into(),
        ));
    }

    // 2. pencil extraction: W = ker S cap ker T contains U = im S + im T;
    // the induced pair of maps Q/W -> U is a Kronecker pencil.
    let w = q.s.vstack(&q.t).kernel_basis(k);
    let (u, _) = q.s.hstack(&q.t).column_space_basis(k);
    for j in 0..u.cols() {
        if w.solve_vec(&u.col(j), k).is_none() {
            return Err(ModuleError::InvariantViolation("im S + im T not inside ker".into()));
        }
    }
    out.add(IndecLabel::Triv, (w.cols() - u.cols()) as u64);
    let v = qdim - w.cols();
    if v == 0 {
        return Ok(out);
    }
    let cv = w.complete_basis(k);
    debug_assert_eq!(cv.cols(), v);
    let a = u
        .solve_matrix(&q.s.mul(&cv, k), k)
        .ok_or_else(|| inv_err("S image outside im-space"))?;
    let b = u
        .solve_matrix(&q.t.mul(&cv, k), k)
        .ok_or_else(|| inv_err("T image outside im-space"))?;

    // 3. Kronecker structure of (A, B)
    let (a, b, wides) = deflate_singular(a, b, k)?;
    let (bt, at, talls) = deflate_singular(b.transpose(), a.transpose(), k)?;
    let (a, b) = (at.transpose(), bt.transpose());
    for e in wides {
        out.add(IndecLabel::M1 { n: e }, 1);
    }
    for e in talls {
        out.add(IndecLabel::M2 { n: e }, 1);
    }
    if a.rows() != a.cols() {
        return Err(inv_err("singular deflation did not leave a square pencil"));
    }
    for (lambda, sizes) in regular_eigenstructure(&a, &b, k)? {
        for n in sizes {
            out.add(IndecLabel::N { n, lambda }, 1);
        }
    }

    if out.total_dim() != m.dim as u64 {
        return Err(inv_err("decomposition dimensions do not add up"));
    }
    Ok(out)
}

fn inv_err(msg: &str) -> ModuleError {
    ModuleError::InvariantViolation(msg.into())
}

// -- polynomial chain spaces -------------------------------------------------

/// Basis of the space of chains (x_0, ..., x_d) with B x_0 = 0 and
/// A x_{i-1} + B x_i = 0, extended one level at a time. Used both to find
/// minimal-degree polynomial solutions of (B + lambda A) x(lambda) = 0 and to
/// read off Weyr-type chain dimensions of the regular part.
struct ChainSpace<'m, 'k> {
    a: &'m Mat,
    b: &'m Mat,
    k: &'k FieldCtx,
    ker_b: Mat,
    resid: Mat, // projector rows onto the cokernel of im B (0 rows if surjective)
    chains: Vec<Vec<Vec<FieldElement>>>,
}

impl<'m, 'k> ChainSpace<'m, 'k> {
    fn new(a: &'m Mat, b: &'m Mat, k: &'k FieldCtx) -> ChainSpace<'m, 'k> {
        let ker_b = b.kernel_basis(k);
        let (im_b, _) = b.column_space_basis(k);
        let resid = if im_b.cols() == b.rows() {
            Mat::zeros(0, b.rows())
        } else {
            let comp = im_b.complete_basis(k);
            let full = im_b.hstack(&comp);
            let full_inv = full.solve_matrix(&Mat::identity(b.rows()), k).expect("invertible");
            Mat::from_fn(b.rows() - im_b.cols(), b.rows(), |r, c| {
                full_inv.get(im_b.cols() + r, c)
            })
        };
        let chains = (0..ker_b.cols()).map(|j| vec![ker_b.col(j)]).collect();
        ChainSpace { a, b, k, ker_b, resid, chains }
    }

    fn len(&self) -> usize {
        self.chains.len()
    }

    fn endpoints(&self) -> Mat {
        let cols: Vec<Vec<FieldElement>> =
            self.chains.iter().map(|c| c.last().unwrap().clone()).collect();
        Mat::from_cols(self.b.cols(), &cols)
    }

    /// A combination of chains whose endpoint is killed by A, if any.
    fn terminal_solution(&self) -> Option<Vec<Vec<FieldElement>>> {
        if self.chains.is_empty() {
            return None;
        }
        let ae = self.a.mul(&self.endpoints(), self.k);
        let ker = ae.kernel_basis(self.k);
        if ker.cols() == 0 {
            return None;
        }
        Some(self.combine(&ker.col(0)))
    }

    fn combine(&self, coeffs: &[FieldElement]) -> Vec<Vec<FieldElement>> {
        let d = self.chains[0].len();
        let v = self.b.cols();
        let mut out = vec![vec![FieldElement::ZERO; v]; d];
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (lvl, x) in self.chains[j].iter().enumerate() {
                for i in 0..v {
                    out[lvl][i] = self.k.add(out[lvl][i], self.k.mul(*c, x[i]));
                }
            }
        }
        out
    }

    /// Advance to chains one level longer.
    fn extend(&mut self) {
        let knum = self.k;
        let nch = self.chains.len();
        let mut next: Vec<Vec<Vec<FieldElement>>> = Vec::new();
        if nch > 0 {
            let ae = self.a.mul(&self.endpoints(), knum);
            // combinations whose A-image lies in im B
            let mu = if self.resid.rows() == 0 {
                Mat::identity(nch)
            } else {
                self.resid.mul(&ae, knum).kernel_basis(knum)
            };
            for j in 0..mu.cols() {
                let coeffs = mu.col(j);
                let mut chain = self.combine(&coeffs);
                let target = ae.mul_vec(&coeffs, knum);
                let xnext = self.b.solve_vec(&target, knum).expect("combination chosen solvable");
                chain.push(xnext);
                next.push(chain);
            }
        }
        let d = self.chains.first().map_or(1, |c| c.len() + 1);
        for j in 0..self.ker_b.cols() {
            let mut chain = vec![vec![FieldElement::ZERO; self.b.cols()]; d - 1];
            chain.push(self.ker_b.col(j));
            next.push(chain);
        }
        self.chains = next;
    }
}

/// Remove all wide singular blocks from the pencil, returning the deflated
/// pencil and the minimal indices (one per removed block, each >= 1).
fn deflate_singular(
    mut a: Mat,
    mut b: Mat,
    k: &FieldCtx,
) -> Result<(Mat, Mat, Vec<u64>), ModuleError> {
    let mut indices = Vec::new();
    'outer: loop {
        let vcur = a.cols();
        if vcur == 0 {
            break;
        }
        let mut space = ChainSpace::new(&a, &b, k);
        if space.len() == 0 {
            break; // ker B = 0: no singular chains at any degree
        }
        for _level in 0..vcur {
            if let Some(chain) = space.terminal_solution() {
                let eps = chain.len() - 1;
                if eps == 0 {
                    return Err(inv_err("pencil has a zero column"));
                }
                let (na, nb) = deflate_one(&a, &b, &chain, k)?;
                a = na;
                b = nb;
                indices.push(eps as u64);
                continue 'outer;
            }
            space.extend();
            if space.len() == 0 {
                break;
            }
        }
        break;
    }
    Ok((a, b, indices))
}

/// Quotient the pencil by the singular block spanned by a minimal chain.
fn deflate_one(
    a: &Mat,
    b: &Mat,
    chain: &[Vec<FieldElement>],
    k: &FieldCtx,
) -> Result<(Mat, Mat), ModuleError> {
    let eps = chain.len() - 1;
    let (u, v) = (a.rows(), a.cols());
    let vp = Mat::from_cols(v, chain);
    if vp.rank(k) != eps + 1 {
        return Err(inv_err("minimal chain vectors are dependent"));
    }
    let up_cols: Vec<Vec<FieldElement>> = (0..eps).map(|i| a.mul_vec(&chain[i], k)).collect();
    let up = Mat::from_cols(u, &up_cols);
    if up.rank(k) != eps {
        return Err(inv_err("minimal chain images are dependent"));
    }
    let cv = vp.complete_basis(k);
    let resid_u = {
        let comp = up.complete_basis(k);
        let full = up.hstack(&comp);
        let inv = full.solve_matrix(&Mat::identity(u), k).expect("invertible");
        Mat::from_fn(u - eps, u, |r, c| inv.get(eps + r, c))
    };
    let na = resid_u.mul(&a.mul(&cv, k), k);
    let nb = resid_u.mul(&b.mul(&cv, k), k);
    Ok((na, nb))
}

/// Jordan structure of a regular square pencil: for each eigenvalue in
/// k union {infinity}, the multiset of block sizes.
fn regular_eigenstructure(
    a: &Mat,
    b: &Mat,
    k: &FieldCtx,
) -> Result<Vec<(ProjPoint, Vec<u64>)>, ModuleError> {
    let s = a.rows();
    let mut out = Vec::new();
    if s == 0 {
        return Ok(out);
    }
    let det = pencil_det_poly(a, b, k);
    if det.is_zero() {
        return Err(inv_err("pencil is not regular after singular deflation"));
    }
    let (roots, cofactor) = roots_with_multiplicity(&det, k);
    if cofactor.deg() != Some(0) {
        return Err(ModuleError::FieldTooSmall { obstruction: cofactor });
    }
    let mult_inf = s as u64 - det.deg().unwrap() as u64;
    for (mu, mult) in roots {
        let c = b.add(&scale_mat(a, mu, k));
        let sizes = chain_block_sizes(a, &c, mult as u64, k)?;
        out.push((ProjPoint::Finite(mu), sizes));
    }
    if mult_inf > 0 {
        let sizes = chain_block_sizes(b, a, mult_inf, k)?;
        out.push((ProjPoint::Infinity, sizes));
    }
    Ok(out)
}

fn scale_mat(m: &Mat, s: FieldElement, k: &FieldCtx) -> Mat {
    Mat::from_fn(m.rows(), m.cols(), |r, c| k.mul(s, m.get(r, c)))
}

/// Block sizes of the nilpotent structure: chains (x_1, .., x_j) with
/// C x_1 = 0 and C x_{i+1} = D x_i have dimension sum(min(j, size)) over
/// blocks, so consecutive differences count blocks of size >= j.
fn chain_block_sizes(
    d: &Mat,
    c: &Mat,
    expected_total: u64,
    k: &FieldCtx,
) -> Result<Vec<u64>, ModuleError> {
    let mut space = ChainSpace::new(d, c, k);
    let mut dims = vec![space.len() as u64];
    let mut total = dims[0];
    while total < expected_total {
        space.extend();
        let nj = space.len() as u64;
        let prev = *dims.last().unwrap();
        let delta = nj.checked_sub(prev).ok_or_else(|| inv_err("chain dimensions decreased"))?;
        if delta == 0 {
            break;
        }
        total += delta;
        dims.push(nj);
    }
    // deltas are the counts of blocks of size >= j
    let mut deltas: Vec<u64> = Vec::with_capacity(dims.len());
    let mut prev = 0;
    for &d in &dims {
        deltas.push(d - prev);
        prev = d;
    }
    let mut sizes = Vec::new();
    for j in 0..deltas.len() {
        let here = deltas[j];
        let next = deltas.get(j + 1).copied().unwrap_or(0);
        let exact = here
            .checked_sub(next)
            .ok_or_else(|| inv_err("chain deltas are not monotone"))?;
        for _ in 0..exact {
            sizes.push(j as u64 + 1);
        }
    }
    if sizes.iter().sum::<u64>() != expected_total {
        return Err(inv_err("eigenvalue chain dimensions disagree with multiplicity"));
    }
    Ok(sizes)
}

/// det(B + lambda A) as a polynomial, by interpolation when the field has
/// enough points and fraction-free elimination otherwise.
fn pencil_det_poly(a: &Mat, b: &Mat, k: &FieldCtx) -> Poly {
    let s = a.rows();
    if k.size() > s as u128 {
        let points: Vec<FieldElement> = (0..=s as u64).map(|i| k.elem(i)).collect();
        let values: Vec<FieldElement> = points
            .iter()
            .map(|&x| b.add(&scale_mat(a, x, k)).det(k))
            .collect();
        lagrange_interpolate(&points, &values, k)
    } else {
        bareiss_det_poly(a, b, k)
    }
}

fn lagrange_interpolate(xs: &[FieldElement], ys: &[FieldElement], k: &FieldCtx) -> Poly {
    let mut acc = Poly::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut num = Poly::one();
        let mut den = FieldElement::ONE;
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            num = num.mul(&Poly::from_coeffs(vec![xj, FieldElement::ONE]), k);
            den = k.mul(den, k.add(xi, xj));
        }
        let c = k.div(yi, den).expect("interpolation points distinct");
        acc = acc.add(&num.scale(c, k));
    }
    acc
}

/// Fraction-free determinant of the linear polynomial matrix B + lambda A.
fn bareiss_det_poly(a: &Mat, b: &Mat, k: &FieldCtx) -> Poly {
    let n = a.rows();
    let mut m: Vec<Vec<Poly>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| Poly::from_coeffs(vec![b.get(r, c), a.get(r, c)]))
                .collect()
        })
        .collect();
    let mut prev = Poly::one();
    for r in 0..n {
        if m[r][r].is_zero() {
            let Some(sw) = (r + 1..n).find(|&i| !m[i][r].is_zero()) else {
                return Poly::zero();
            };
            m.swap(r, sw); // char 2: no sign change
        }
        for i in r + 1..n {
            for j in r + 1..n {
                let num = m[r][r].mul(&m[i][j], k).add(&m[i][r].mul(&m[r][j], k));
                let (q, rem) = num.div_rem(&prev, k);
                debug_assert!(rem.is_zero(), "Bareiss exact division failed");
                m[i][j] = q;
            }
        }
        for i in r + 1..n {
            m[i][r] = Poly::zero();
        }
        prev = m[r][r].clone();
    }
    m[n - 1][n - 1].clone()
}

// ---------------------------------------------------------------------------
// Parameter cohorts (relabeling orbits)
// ---------------------------------------------------------------------------

/// 1/lambda with the conventions 1/0 = infinity, 1/infinity = 0.
pub fn lambda_inv(l: ProjPoint, k: &FieldCtx) -> ProjPoint {
    match l {
        ProjPoint::Infinity => ProjPoint::Finite(FieldElement::ZERO),
        ProjPoint::Finite(x) if x.is_zero() => ProjPoint::Infinity,
        ProjPoint::Finite(x) => ProjPoint::Finite(k.inv(x).expect("nonzero")),
    }
}

/// 1 + lambda with the convention 1 + infinity = infinity.
pub fn lambda_add_one(l: ProjPoint, k: &FieldCtx) -> ProjPoint {
    match l {
        ProjPoint::Infinity => ProjPoint::Infinity,
        ProjPoint::Finite(x) => ProjPoint::Finite(k.add(x, FieldElement::ONE)),
    }
}

/// The set of parameters reachable from lambda by relabeling the group
/// generators: the orbit of lambda under lambda -> 1/lambda and
/// lambda -> 1 + lambda.
pub fn cohort(l: ProjPoint, k: &FieldCtx) -> BTreeSet<ProjPoint> {
    let mut set = BTreeSet::new();
    let mut stack = vec![l];
    while let Some(x) = stack.pop() {
        if set.insert(x) {
            stack.push(lambda_inv(x, k));
            stack.push(lambda_add_one(x, k));
        }
    }
    set
}

// ---------------------------------------------------------------------------
// Matrix file format
// ---------------------------------------------------------------------------

/// Render a module as text: header `dim n`, then the rows of S, then the
/// rows of T, entries as field literals.
pub fn format_module(m: &KleinModule, k: &FieldCtx) -> String {
    let mut out = format!("dim {}\n", m.dim);
    for mat in [&m.s, &m.t] {
        for r in 0..m.dim {
            let row: Vec<String> = (0..m.dim).map(|c| k.elem_to_string(mat.get(r, c))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parse the format written by [`format_module`].
pub fn parse_module(text: &str, k: &FieldCtx) -> Result<KleinModule, ModuleError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| ModuleError::Parse("empty file".into()))?;
    let dim: usize = header
        .strip_prefix("dim ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| ModuleError::Parse(format!("bad header: {}", header)))?;
    let mut read_mat = |what: &str| -> Result<Mat, ModuleError> {
        let mut m = Mat::zeros(dim, dim);
        for r in 0..dim {
            let line = lines
                .next()
                .ok_or_else(|| ModuleError::Parse(format!("missing row {} of {}", r, what)))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != dim {
                return Err(ModuleError::Parse(format!(
                    "row {} of {} has {} entries, expected {}",
                    r,
                    what,
                    entries.len(),
                    dim
                )));
            }
            for (c, e) in entries.iter().enumerate() {
                let v = k
                    .parse_literal(e)
                    .map_err(|err| ModuleError::Parse(format!("{}: {}", what, err)))?;
                m.set(r, c, v);
            }
        }
        Ok(m)
    };
    let s = read_mat("S")?;
    let t = read_mat("T")?;
    Ok(KleinModule::new(s, t))
}
