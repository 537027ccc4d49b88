//! Fixed subalgebras of the real endomorphism algebra of `Jac(y^2 = x^7 - c*x)`
//! under subgroups of its component group.
//!
//! The centralizer of the torus in M_6(C), cut down by Rosati positivity, is
//! the slice of matrices
//!
//! ```text
//! a  0  b  0  g  0
//! 0  a' 0  b' 0  g'
//! d  0  e  0  f  0        (x' = conj(x))
//! 0  d' 0  e' 0  f'
//! l  0  m  0  n  0
//! 0  l' 0  m' 0  n'
//! ```
//!
//! a real 18-dimensional algebra isomorphic to M_3(C). A subgroup acts by
//! conjugation; its fixed points form the endomorphism algebra over the
//! corresponding subfield.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::cmat::CMat;
use crate::stgroup::{builtin_group, symplectic_form, GroupName, STGroup, MAX_COMPONENTS};

const COMMUTE_TOL: f64 = 1e-9;
const NULL_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum EndoError {
    #[error("cannot parse {input:?} at byte {pos}: {reason}")]
    BadWord { input: String, pos: usize, reason: &'static str },
    #[error("words do not close into a subgroup within {MAX_COMPONENTS} elements")]
    SubgroupOverflow,
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
}

/// Realizes the nine parameters `(alpha, beta, gamma, delta, epsilon, phi,
/// lambda, mu, nu)` as the 6x6 slice matrix, row-major in the 3x3 pattern.
pub fn vr_realize(params: &[Complex64; 9]) -> CMat {
    let mut m = CMat::zeros(6);
    for (k, &x) in params.iter().enumerate() {
        let (i, j) = (k / 3, k % 3);
        m[(2 * i, 2 * j)] = x;
        m[(2 * i + 1, 2 * j + 1)] = x.conj();
    }
    m
}

/// Inverse of [`vr_realize`] on the slice.
pub fn vr_params(m: &CMat) -> [Complex64; 9] {
    std::array::from_fn(|k| m[(2 * (k / 3), 2 * (k % 3))])
}

/// Whether `m` lies on the slice, entrywise to `tol`.
pub fn in_slice(m: &CMat, tol: f64) -> bool {
    (0..6).all(|i| {
        (0..6).all(|j| {
            let x = m[(i, j)];
            if (i + j) % 2 == 1 {
                x.norm() <= tol
            } else if i % 2 == 0 {
                (m[(i + 1, j + 1)] - x.conj()).norm() <= tol
            } else {
                true
            }
        })
    })
}

/// The real basis `{E_k, i E_k}` of the slice, in parameter order.
pub fn vr_basis() -> Vec<CMat> {
    (0..18)
        .map(|b| {
            let mut p = [Complex64::new(0.0, 0.0); 9];
            p[b / 2] = if b % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
            vr_realize(&p)
        })
        .collect()
}

/// The Rosati quadratic form `Tr(X H^T X^T H)`.
pub fn rosati(x: &CMat) -> Complex64 {
    let h = symplectic_form(3);
    (*x * h.transpose() * x.transpose() * h).trace()
}

/// Gram matrix of the polarized Rosati form on `basis`.
pub fn rosati_gram(basis: &[CMat]) -> DMatrix<f64> {
    let h = symplectic_form(3);
    let ht = h.transpose();
    DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        let (x, y) = (basis[i], basis[j]);
        0.5 * ((x * ht * y.transpose() * h).trace() + (y * ht * x.transpose() * h).trace()).re
    })
}

/// Whether the Rosati form is positive definite on `basis`.
pub fn rosati_positive_definite(basis: &[CMat]) -> bool {
    basis.is_empty() || SymmetricEigen::new(rosati_gram(basis)).eigenvalues.iter().all(|&e| e > 1e-9)
}

/// Real coordinates of all entries, one column per matrix.
fn stack_real(mats: &[CMat]) -> DMatrix<f64> {
    let n = mats.first().map_or(0, |m| m.dim());
    DMatrix::from_fn(2 * n * n, mats.len(), |r, c| {
        let z = mats[c][((r / 2) / n, (r / 2) % n)];
        if r % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}

/// Orthonormal basis of the null space of `a` (as columns), by SVD.
fn null_space(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let cols = a.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // Zero rows make the SVD square or tall, so every right singular vector appears.
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let cutoff = NULL_TOL * sigma_max;
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| sigma_max == 0.0 || s <= cutoff)
        .map(|(k, _)| v_t.row(k).iter().copied().collect())
        .collect()
}

fn combine(coeffs: &[f64], basis: &[CMat]) -> CMat {
    coeffs.iter().zip(basis).fold(CMat::zeros(basis[0].dim()), |acc, (&c, b)| acc.add(&b.scale(Complex64::new(c, 0.0))))
}

fn commutator(a: &CMat, b: &CMat) -> CMat {
    (*a * *b).sub(&(*b * *a))
}

/// A subalgebra of the slice given by a real basis.
#[derive(Debug, Clone)]
pub struct FixedAlgebra {
    pub basis: Vec<CMat>,
    pub commutative: bool,
    pub center_dim: usize,
}

impl FixedAlgebra {
    fn from_basis(basis: Vec<CMat>) -> Self {
        let mut worst: f64 = 0.0;
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                worst = worst.max(commutator(a, b).max_abs());
            }
        }
        let commutative = worst < COMMUTE_TOL;
        let center_dim = if commutative {
            basis.len()
        } else {
            // x = sum c_i F_i is central iff sum c_i [F_i, F_j] = 0 for all j.
            let blocks: Vec<DMatrix<f64>> = basis
                .iter()
                .map(|fj| stack_real(&basis.iter().map(|fi| commutator(fi, fj)).collect::<Vec<_>>()))
                .collect();
            let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
            let mut a = DMatrix::zeros(rows, basis.len());
            let mut r = 0;
            for b in &blocks {
                a.view_mut((r, 0), (b.nrows(), b.ncols())).copy_from(b);
                r += b.nrows();
            }
            null_space(&a).len()
        };
        Self { basis, commutative, center_dim }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn profile(&self) -> AlgebraProfile {
        AlgebraProfile { dim: self.dim(), commutative: self.commutative, center_dim: self.center_dim }
    }

    /// Largest distance of a basis product from the span, relative to its size.
    pub fn closure_defect(&self) -> f64 {
        let a = stack_real(&self.basis);
        let pinv = a.clone().pseudo_inverse(1e-12).expect("pseudo-inverse");
        let mut worst: f64 = 0.0;
        for x in &self.basis {
            for y in &self.basis {
                let p = stack_real(&[*x * *y]);
                let resid = &a * (&pinv * &p) - &p;
                worst = worst.max(resid.norm() / p.norm().max(1.0));
            }
        }
        worst
    }

    /// Whether every element of `other` lies in this algebra.
    pub fn contains(&self, other: &FixedAlgebra) -> bool {
        let a = stack_real(&self.basis);
        let pinv = a.clone().pseudo_inverse(1e-12).expect("pseudo-inverse");
        other.basis.iter().all(|x| {
            let p = stack_real(&[*x]);
            (&a * (&pinv * &p) - &p).norm() < 1e-8
        })
    }
}

/// The invariant triple used to name an algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraProfile {
    pub dim: usize,
    pub commutative: bool,
    pub center_dim: usize,
}

impl AlgebraProfile {
    pub const fn new(dim: usize, commutative: bool, center_dim: usize) -> Self {
        Self { dim, commutative, center_dim }
    }

    /// The algebra with this profile among those in the lattice of endomorphism
    /// types. `C x R` and `R x R x R` share a profile and are not separated.
    pub fn identify(&self) -> &'static str {
        match (self.dim, self.commutative, self.center_dim) {
            (18, false, 2) => "M3(C)",
            (10, false, 4) => "M2(C)xC",
            (9, false, 1) => "M3(R)",
            (5, false, 2) => "M2(R)xR",
            (6, true, 6) => "CxCxC",
            (4, true, 4) => "CxC",
            (3, true, 3) => "CxR or RxRxR",
            (2, true, 2) => "RxR",
            _ => "unidentified",
        }
    }
}

impl fmt::Display for AlgebraProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = if self.commutative { "yes" } else { "no" };
        write!(f, "({},{},{})", self.dim, yn, self.center_dim)
    }
}

/// A word in `r`, `s`, `t`: letters, parentheses, `^k` and the empty word `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    Letter(usize),
    Product(Vec<Word>),
    Power(Box<Word>, u32),
}

impl Word {
    pub fn eval(&self, gens: &[CMat]) -> CMat {
        match self {
            Word::Letter(i) => gens[*i],
            Word::Product(ws) => ws.iter().fold(CMat::identity(gens[0].dim()), |acc, w| acc * w.eval(gens)),
            Word::Power(w, k) => {
                let x = w.eval(gens);
                (0..*k).fold(CMat::identity(x.dim()), |acc, _| acc * x)
            }
        }
    }
}

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, reason: &'static str) -> EndoError {
        EndoError::BadWord { input: self.input.to_string(), pos: self.pos, reason }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<Word, EndoError> {
        let mut factors = Vec::new();
        while let Some(c) = self.peek() {
            if c == b',' || c == b')' {
                break;
            }
            factors.push(self.factor()?);
        }
        if factors.is_empty() {
            return Err(self.err("empty word"));
        }
        Ok(Word::Product(factors))
    }

    fn factor(&mut self) -> Result<Word, EndoError> {
        let mut atom = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.word()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                inner
            }
            Some(c) => {
                let w = match c.to_ascii_lowercase() {
                    b'r' => Word::Letter(0),
                    b's' => Word::Letter(1),
                    b't' => Word::Letter(2),
                    b'1' => Word::Product(Vec::new()),
                    _ => return Err(self.err("expected r, s, t, 1 or '('")),
                };
                self.pos += 1;
                w
            }
            None => return Err(self.err("unexpected end of input")),
        };
        while self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k = self.input[start..self.pos].parse().map_err(|_| self.err("expected exponent"))?;
            atom = Word::Power(Box::new(atom), k);
        }
        Ok(atom)
    }
}

/// Parses comma-separated generator words such as `"t, (rs)^2"`; surrounding
/// angle brackets are ignored.
pub fn parse_words(input: &str) -> Result<Vec<Word>, EndoError> {
    let trimmed = input.trim().trim_start_matches(['<', '⟨']).trim_end_matches(['>', '⟩']);
    let mut p = Parser { input: trimmed, bytes: trimmed.as_bytes(), pos: 0 };
    let mut words = vec![p.word()?];
    while p.peek() == Some(b',') {
        p.pos += 1;
        words.push(p.word()?);
    }
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(words)
}

/// The component group of `ST(C2)` acting on the slice.
pub struct EndoContext {
    group: STGroup,
    basis: Vec<CMat>,
}

impl Default for EndoContext {
    fn default() -> Self {
        Self::new()
    }
}

impl EndoContext {
    pub fn new() -> Self {
        Self { group: builtin_group(GroupName::StC2Generic), basis: vr_basis() }
    }

    pub fn group(&self) -> &STGroup {
        &self.group
    }

    /// Matrices for the words, in terms of the three generators `r, s, t`.
    pub fn evaluate(&self, words: &[Word]) -> Vec<CMat> {
        words.iter().map(|w| w.eval(self.group.generators())).collect()
    }

    /// Coset representatives of the subgroup generated by `elements`.
    pub fn subgroup_closure(&self, elements: &[CMat]) -> Result<Vec<CMat>, EndoError> {
        let mut reps = vec![CMat::identity(6)];
        let mut next = 0;
        while next < reps.len() {
            let current = reps[next];
            next += 1;
            for g in elements {
                let candidate = current * *g;
                if !reps.iter().any(|r| self.group.same_component(r, &candidate, 1e-9)) {
                    if reps.len() == MAX_COMPONENTS {
                        return Err(EndoError::SubgroupOverflow);
                    }
                    reps.push(candidate);
                }
            }
        }
        Ok(reps)
    }

    /// `{X in slice : g X g^-1 = X for all g}`; checking the generators suffices.
    pub fn fixed_by(&self, elements: &[CMat]) -> FixedAlgebra {
        if elements.is_empty() {
            return FixedAlgebra::from_basis(self.basis.clone());
        }
        let blocks: Vec<DMatrix<f64>> = elements
            .iter()
            .map(|g| {
                let g_inv = g.adjoint();
                stack_real(&self.basis.iter().map(|b| (*g * *b * g_inv).sub(b)).collect::<Vec<_>>())
            })
            .collect();
        let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut a = DMatrix::zeros(rows, self.basis.len());
        let mut r = 0;
        for b in &blocks {
            a.view_mut((r, 0), (b.nrows(), b.ncols())).copy_from(b);
            r += b.nrows();
        }
        let basis = null_space(&a).iter().map(|c| combine(c, &self.basis)).collect();
        FixedAlgebra::from_basis(basis)
    }

    /// Fixed algebra of the subgroup generated by `words` and the subgroup order.
    pub fn fixed_subalgebra(&self, words: &[Word]) -> Result<(FixedAlgebra, usize), EndoError> {
        let elements = self.evaluate(words);
        let order = self.subgroup_closure(&elements)?.len();
        Ok((self.fixed_by(&elements), order))
    }
}

/// The subgroups of the lattice, up to conjugacy, as `(label, words, order)`.
pub const LATTICE: [(&str, &str, usize); 16] = [
    ("<r,t,s>", "r,t,s", 24),
    ("<t,r,(rs)^2>", "t,r,(rs)^2", 12),
    ("<t,rs>", "t,rs", 12),
    ("<t,s,(rs)^2>", "t,s,(rs)^2", 12),
    ("<r,s>", "r,s", 8),
    ("<t,r>", "t,r", 6),
    ("<t,(rs)^2>", "t,(rs)^2", 6),
    ("<t,s>", "t,s", 6),
    ("<(rs)^2,r>", "(rs)^2,r", 4),
    ("<rs>", "rs", 4),
    ("<(rs)^2,s>", "(rs)^2,s", 4),
    ("<t>", "t", 3),
    ("<r>", "r", 2),
    ("<(rs)^2>", "(rs)^2", 2),
    ("<s>", "s", 2),
    ("<1>", "1", 1),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeRow {
    pub label: String,
    pub order: usize,
    pub profile: AlgebraProfile,
}

/// Profiles of the fixed algebras of every subgroup in the lattice.
pub fn lattice_report() -> Vec<LatticeRow> {
    let ctx = EndoContext::new();
    LATTICE
        .iter()
        .map(|&(label, words, _)| {
            let words = parse_words(words).expect("lattice words parse");
            let (alg, order) = ctx.fixed_subalgebra(&words).expect("lattice words close");
            LatticeRow { label: label.to_string(), order, profile: alg.profile() }
        })
        .collect()
}

pub fn write_lattice_csv(rows: &[LatticeRow], path: &Path) -> Result<(), EndoError> {
    let csv_err = |source| EndoError::Csv { path: path.display().to_string(), source };
    let file = std::fs::File::create(path).map_err(|e| csv_err(e.into()))?;
    write_lattice(rows, file).map_err(csv_err)
}

/// Writes `subgroup,dim,commutative,center_dim,identified_algebra` rows.
pub fn write_lattice<W: std::io::Write>(rows: &[LatticeRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subgroup", "dim", "commutative", "center_dim", "identified_algebra"])?;
    for r in rows {
        let p = r.profile;
        w.write_record([
            r.label.clone(),
            p.dim.to_string(),
            if p.commutative { "yes" } else { "no" }.to_string(),
            p.center_dim.to_string(),
            p.identify().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
