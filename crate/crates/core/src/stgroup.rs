//! Sato-Tate groups given as finite unions of torus cosets in USp(2g).
//!
//! A group is presented by generators together with the torus
//! `diag(U(u_k0), U(u_k1), ...)`, where block `k` carries the torus parameter
//! `pattern[k]` and `U(u) = diag(u, conj(u))`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::cmat::CMat;
use crate::stats::{write_moments_csv, CompensatedSum, StatsError};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_QUADRATURE: usize = 256;
/// Enumeration gives up beyond this many components.
pub const MAX_COMPONENTS: usize = 256;

const GRID_CHUNK: usize = 4096;

#[derive(Debug, Error)]
pub enum StError {
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("unknown coefficient {0:?} (expected a1, a2 or a3)")]
    UnknownCoefficient(String),
    #[error("generator {index} is {size}x{size}, expected {expected}x{expected}")]
    DimensionMismatch { index: usize, size: usize, expected: usize },
    #[error("generator {index} is not unitary symplectic")]
    NotUnitarySymplectic { index: usize },
    #[error("more than {MAX_COMPONENTS} components; the tolerance is probably too tight")]
    ClosureOverflow,
    #[error("quadrature Q = {q} must exceed 3 * n_max = {}", 3 * n_max)]
    QuadratureTooCoarse { q: usize, n_max: usize },
    #[error("binomial convolution needs two a1 sequences, got {0} and {1}")]
    MixedCoefficients(Coefficient, Coefficient),
    #[error(transparent)]
    Csv(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coefficient {
    A1,
    A2,
    A3,
}

impl Coefficient {
    pub const ALL: [Coefficient; 3] = [Self::A1, Self::A2, Self::A3];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.index() + 1)
    }
}

impl FromStr for Coefficient {
    type Err = StError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a1" => Ok(Self::A1),
            "a2" => Ok(Self::A2),
            "a3" => Ok(Self::A3),
            _ => Err(StError::UnknownCoefficient(s.to_string())),
        }
    }
}

/// `M_0..M_nmax` of one characteristic-polynomial coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    pub coefficient: Coefficient,
    pub values: Vec<f64>,
}

impl MomentSequence {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `M_n`, panicking past `n_max`.
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn rounded(&self) -> Vec<i64> {
        self.values.iter().map(|v| v.round() as i64).collect()
    }

    /// Largest distance from an entry to the nearest integer.
    pub fn max_rounding_error(&self) -> f64 {
        self.values.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max)
    }

    /// Writes `n,Mn` for `n = 1..=n_max`, the same layout as scan output.
    pub fn write_csv(&self, path: &Path) -> Result<(), StError> {
        let values: Vec<Option<f64>> = self.values[1..].iter().copied().map(Some).collect();
        Ok(write_moments_csv(path, &values, None)?)
    }
}

/// Which torus parameter each diagonal 2x2 block carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusEmbedding {
    pattern: Vec<usize>,
}

impl TorusEmbedding {
    /// Panics unless parameters are numbered `0, 1, ...` in order of first use.
    pub fn new(pattern: Vec<usize>) -> Self {
        assert!(!pattern.is_empty() && pattern.len() <= 3, "genus must be 1..=3");
        let mut next = 0;
        for &k in &pattern {
            assert!(k <= next, "torus parameters must be numbered in order of first use");
            next = next.max(k + 1);
        }
        Self { pattern }
    }

    pub fn genus(&self) -> usize {
        self.pattern.len()
    }

    pub fn pattern(&self) -> &[usize] {
        &self.pattern
    }

    /// Number of independent torus parameters.
    pub fn dim(&self) -> usize {
        self.pattern.iter().max().map_or(0, |m| m + 1)
    }

    /// Diagonal of the torus element with the given angles.
    pub fn diagonal(&self, angles: &[f64]) -> Vec<Complex64> {
        self.pattern
            .iter()
            .flat_map(|&k| {
                let u = Complex64::from_polar(1.0, angles[k]);
                [u, u.conj()]
            })
            .collect()
    }

    /// Whether `m` lies in the torus, entrywise to `tol`.
    pub fn contains(&self, m: &CMat, tol: f64) -> bool {
        let n = m.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j && m[(i, j)].norm() > tol {
                    return false;
                }
            }
        }
        let mut params: Vec<Option<Complex64>> = vec![None; self.dim()];
        for (block, &k) in self.pattern.iter().enumerate() {
            let (u, w) = (m[(2 * block, 2 * block)], m[(2 * block + 1, 2 * block + 1)]);
            if (u.norm() - 1.0).abs() > tol || (w - u.conj()).norm() > tol {
                return false;
            }
            match params[k] {
                Some(prev) if (prev - u).norm() > tol => return false,
                Some(_) => {}
                None => params[k] = Some(u),
            }
        }
        true
    }
}

pub fn j2() -> CMat {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    CMat::from_rows(&[vec![z, o], vec![-o, z]])
}

pub fn k2() -> CMat {
    let (i, z) = (Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0));
    CMat::from_rows(&[vec![z, i], vec![i, z]])
}

/// `diag(e^(2 pi i / n), e^(-2 pi i / n))`
pub fn zn(n: u32) -> CMat {
    let u = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
    CMat::diag(&[u, u.conj()])
}

/// `H = diag(J, ..., J)`.
pub fn symplectic_form(genus: usize) -> CMat {
    CMat::block_diag(&vec![j2(); genus])
}

/// A Haar-ish random element of USp(2g): the exponential of a random element
/// of its Lie algebra.
pub fn random_usp<R: rand::Rng>(genus: usize, rng: &mut R) -> CMat {
    let n = 2 * genus;
    let mut a = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let x = a.sub(&a.adjoint()).scale(Complex64::new(0.5, 0.0));
    let h = symplectic_form(genus);
    let h_inv = h.transpose();
    let y = x.sub(&(h_inv * x.transpose() * h)).scale(Complex64::new(0.5, 0.0));
    y.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupName {
    U1,
    NU1,
    U1_2,
    U1_3,
    U1_2xU1,
    JD4,
    D61,
    StC1Generic,
    StC1Sub4,
    StC1Sub2,
    StC2Generic,
    StC2Cube,
}

impl GroupName {
    pub const ALL: [GroupName; 12] = [
        Self::U1,
        Self::NU1,
        Self::U1_2,
        Self::U1_3,
        Self::U1_2xU1,
        Self::JD4,
        Self::D61,
        Self::StC1Generic,
        Self::StC1Sub4,
        Self::StC1Sub2,
        Self::StC2Generic,
        Self::StC2Cube,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::U1 => "u1",
            Self::NU1 => "n-u1",
            Self::U1_2 => "u1-2",
            Self::U1_3 => "u1-3",
            Self::U1_2xU1 => "u1-2xu1",
            Self::JD4 => "jd4",
            Self::D61 => "d61",
            Self::StC1Generic => "st-c1-generic",
            Self::StC1Sub4 => "st-c1-sub4",
            Self::StC1Sub2 => "st-c1-sub2",
            Self::StC2Generic => "st-c2-generic",
            Self::StC2Cube => "st-c2-cube",
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for GroupName {
    type Err = StError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Self::ALL.into_iter().find(|g| g.tag() == norm).ok_or_else(|| StError::UnknownGroup(s.to_string()))
    }
}

/// A closed subgroup of USp(2g) with identity component a torus.
#[derive(Debug, Clone)]
pub struct STGroup {
    name: String,
    embedding: TorusEmbedding,
    generators: Vec<CMat>,
    /// The torus is `frame * T * frame^-1`; `None` means the standard one.
    frame: Option<CMat>,
    tol: f64,
    components: Vec<CMat>,
}

impl STGroup {
    pub fn new(name: impl Into<String>, embedding: TorusEmbedding, generators: Vec<CMat>) -> Result<Self, StError> {
        Self::build(name.into(), embedding, generators, None, DEFAULT_TOL)
    }

    fn build(
        name: String,
        embedding: TorusEmbedding,
        generators: Vec<CMat>,
        frame: Option<CMat>,
        tol: f64,
    ) -> Result<Self, StError> {
        let n = 2 * embedding.genus();
        let h = symplectic_form(embedding.genus());
        for (index, g) in generators.iter().enumerate() {
            if g.dim() != n {
                return Err(StError::DimensionMismatch { index, size: g.dim(), expected: n });
            }
            if !g.is_unitary(1e-9) || !g.preserves_form(&h, 1e-9) {
                return Err(StError::NotUnitarySymplectic { index });
            }
        }
        let mut group = Self { name, embedding, generators, frame, tol, components: Vec::new() };
        group.components = enumerate_components(&group, tol)?;
        Ok(group)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn embedding(&self) -> &TorusEmbedding {
        &self.embedding
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn genus(&self) -> usize {
        self.embedding.genus()
    }

    pub fn components(&self) -> &[CMat] {
        &self.components
    }

    /// The same group with generators (and torus) conjugated by `p`.
    pub fn conjugate(&self, p: &CMat) -> Result<Self, StError> {
        let p_inv = p.adjoint();
        let generators = self.generators.iter().map(|g| *p * *g * p_inv).collect();
        let frame = Some(match &self.frame {
            Some(f) => *p * *f,
            None => *p,
        });
        Self::build(self.name.clone(), self.embedding.clone(), generators, frame, self.tol)
    }

    /// The same group with its generators listed in another order.
    pub fn with_generator_order(&self, order: &[usize]) -> Result<Self, StError> {
        let generators = order.iter().map(|&i| self.generators[i]).collect();
        Self::build(self.name.clone(), self.embedding.clone(), generators, self.frame, self.tol)
    }

    pub fn with_tolerance(&self, tol: f64) -> Result<Self, StError> {
        Self::build(self.name.clone(), self.embedding.clone(), self.generators.clone(), self.frame, tol)
    }

    fn in_torus(&self, m: &CMat, tol: f64) -> bool {
        match &self.frame {
            None => self.embedding.contains(m, tol),
            Some(f) => self.embedding.contains(&(f.adjoint() * *m * *f), tol),
        }
    }

    /// Whether `a` and `b` lie in the same torus coset.
    pub fn same_component(&self, a: &CMat, b: &CMat, tol: f64) -> bool {
        self.in_torus(&(a.adjoint() * *b), tol)
    }

    fn torus_element(&self, diagonal: &[Complex64]) -> CMat {
        match &self.frame {
            None => CMat::diag(diagonal),
            Some(f) => f.mul_diag(diagonal) * f.adjoint(),
        }
    }

    fn component_index(&self, m: &CMat) -> Option<usize> {
        self.components.iter().position(|c| self.same_component(c, m, self.tol))
    }
}

/// Coset representatives of `G / G^0` by breadth-first closure under
/// right multiplication by the generators, starting from the identity.
pub fn enumerate_components(group: &STGroup, tol: f64) -> Result<Vec<CMat>, StError> {
    let n = 2 * group.genus();
    let mut reps = vec![CMat::identity(n)];
    let mut next = 0;
    while next < reps.len() {
        let current = reps[next];
        next += 1;
        for g in &group.generators {
            let candidate = current * *g;
            if !reps.iter().any(|r| group.same_component(r, &candidate, tol)) {
                if reps.len() == MAX_COMPONENTS {
                    return Err(StError::ClosureOverflow);
                }
                reps.push(candidate);
            }
        }
    }
    Ok(reps)
}

/// Order, commutativity and element orders of the component group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentProfile {
    pub order: usize,
    pub abelian: bool,
    /// element order -> number of elements of that order
    pub element_orders: BTreeMap<usize, usize>,
}

pub fn multiplication_table(group: &STGroup) -> Vec<Vec<usize>> {
    let comps = group.components();
    comps
        .iter()
        .map(|a| {
            comps
                .iter()
                .map(|b| group.component_index(&(*a * *b)).expect("components are closed under products"))
                .collect()
        })
        .collect()
}

pub fn component_group_profile(group: &STGroup) -> ComponentProfile {
    let table = multiplication_table(group);
    let order = table.len();
    let abelian = (0..order).all(|i| (0..order).all(|j| table[i][j] == table[j][i]));
    let mut element_orders = BTreeMap::new();
    #[allow(clippy::needless_range_loop)]
    for i in 0..order {
        // component 0 is the identity coset
        let (mut k, mut x) = (1, i);
        while x != 0 {
            x = table[x][i];
            k += 1;
        }
        *element_orders.entry(k).or_insert(0) += 1;
    }
    ComponentProfile { order, abelian, element_orders }
}

fn usp_coefficients(m: &CMat) -> [f64; 3] {
    let [e1, e2, e3] = m.elementary_123();
    [-e1.re, e2.re, -e3.re]
}

/// Haar moments `M_0..M_nmax` of `a1`, `a2` and `a3`, by averaging over the
/// components and an equispaced `Q^dim` grid on the torus.
pub fn haar_moments_all(group: &STGroup, n_max: usize, q: usize) -> Result<[MomentSequence; 3], StError> {
    if q <= 3 * n_max {
        return Err(StError::QuadratureTooCoarse { q, n_max });
    }
    let dim = group.embedding.dim();
    let points = q.pow(dim as u32);
    let chunks = points.div_ceil(GRID_CHUNK);
    let work: Vec<(usize, usize)> =
        (0..group.components.len()).flat_map(|c| (0..chunks).map(move |k| (c, k))).collect();
    let step = 2.0 * PI / q as f64;

    let partials: Vec<Vec<[CompensatedSum; 3]>> = work
        .par_iter()
        .map(|&(c, k)| {
            let rep = group.components[c];
            let mut sums = vec![[CompensatedSum::default(); 3]; n_max + 1];
            let mut angles = vec![0.0; dim];
            for idx in k * GRID_CHUNK..((k + 1) * GRID_CHUNK).min(points) {
                let mut rest = idx;
                for a in angles.iter_mut() {
                    *a = (rest % q) as f64 * step;
                    rest /= q;
                }
                let d = group.embedding.diagonal(&angles);
                let m = match group.frame {
                    None => rep.mul_diag(&d),
                    Some(_) => rep * group.torus_element(&d),
                };
                let coeffs = usp_coefficients(&m);
                for (ci, &x) in coeffs.iter().enumerate() {
                    let mut pw = 1.0;
                    for s in sums.iter_mut() {
                        s[ci].add(pw);
                        pw *= x;
                    }
                }
            }
            sums
        })
        .collect();

    let mut total = vec![[CompensatedSum::default(); 3]; n_max + 1];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            for ci in 0..3 {
                t[ci].merge(&p[ci]);
            }
        }
    }
    let norm = (group.components.len() * points) as f64;
    Ok(Coefficient::ALL.map(|coefficient| MomentSequence {
        coefficient,
        values: total.iter().map(|t| t[coefficient.index()].value() / norm).collect(),
    }))
}

pub fn haar_moments(group: &STGroup, coeff: Coefficient, n_max: usize, q: usize) -> Result<MomentSequence, StError> {
    let [a1, a2, a3] = haar_moments_all(group, n_max, q)?;
    Ok(match coeff {
        Coefficient::A1 => a1,
        Coefficient::A2 => a2,
        Coefficient::A3 => a3,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// `M_n(H1 x H2) = sum_k binom(n, k) M_k(H1) M_(n-k)(H2)` for `a1` sequences.
pub fn binomial_convolution(a: &MomentSequence, b: &MomentSequence) -> Result<MomentSequence, StError> {
    if a.coefficient != Coefficient::A1 || b.coefficient != Coefficient::A1 {
        return Err(StError::MixedCoefficients(a.coefficient, b.coefficient));
    }
    let n_max = a.n_max().min(b.n_max());
    let values = (0..=n_max).map(|n| (0..=n).map(|k| binomial(n, k) * a.values[k] * b.values[n - k]).sum()).collect();
    Ok(MomentSequence { coefficient: Coefficient::A1, values })
}

/// `M_n -> s^n M_n`, the moments of `s * a`.
pub fn scaled_moments(base: &MomentSequence, s: i64) -> MomentSequence {
    let values = base.values.iter().enumerate().map(|(n, v)| v * (s as f64).powi(n as i32)).collect();
    MomentSequence { coefficient: base.coefficient, values }
}

fn c1_generators(z: Option<u32>) -> Vec<CMat> {
    let (j, i2) = (j2(), CMat::identity(2));
    let mut gens = vec![
        CMat::block_diag(&[j, j, j]),
        CMat::from_blocks(&[
            vec![None, Some(j), None],
            vec![Some(j.scale(Complex64::new(-1.0, 0.0))), None, None],
            vec![None, None, Some(i2)],
        ]),
    ];
    if let Some(n) = z {
        gens.push(CMat::block_diag(&[zn(n), zn(n).conj(), i2]));
    }
    gens
}

fn c2_generators(with_t: bool) -> Vec<CMat> {
    let (j, k) = (j2(), k2());
    let mut gens = vec![
        CMat::block_diag(&[j, j, j]),
        CMat::from_blocks(&[vec![None, Some(k), None], vec![Some(k), None, None], vec![None, None, Some(j)]]),
    ];
    if with_t {
        gens.push(CMat::block_diag(&[zn(3), zn(3).conj(), CMat::identity(2)]));
    }
    gens
}

/// The groups with explicit presentations used throughout.
pub fn builtin_group(name: GroupName) -> STGroup {
    let (j, k) = (j2(), k2());
    let neg = Complex64::new(-1.0, 0.0);
    let (pattern, generators) = match name {
        GroupName::U1 => (vec![0], vec![]),
        GroupName::NU1 => (vec![0], vec![j]),
        GroupName::U1_2 => (vec![0, 0], vec![]),
        GroupName::U1_3 => (vec![0, 0, 0], vec![]),
        GroupName::U1_2xU1 => (vec![0, 0, 1], vec![]),
        GroupName::JD4 => (
            vec![0, 0],
            vec![
                CMat::block_diag(&[j, j]),
                CMat::from_blocks(&[vec![None, Some(j)], vec![Some(j.scale(neg)), None]]),
                CMat::block_diag(&[zn(8), zn(8).conj()]),
            ],
        ),
        GroupName::D61 => (
            vec![0, 0],
            vec![
                CMat::block_diag(&[j, j]),
                CMat::from_blocks(&[vec![None, Some(k)], vec![Some(k), None]]),
                CMat::block_diag(&[zn(3), zn(3).conj()]),
            ],
        ),
        GroupName::StC1Generic => (vec![0, 0, 1], c1_generators(Some(8))),
        GroupName::StC1Sub4 => (vec![0, 0, 1], c1_generators(Some(4))),
        GroupName::StC1Sub2 => (vec![0, 0, 1], c1_generators(Some(2))),
        GroupName::StC2Generic => (vec![0, 0, 0], c2_generators(true)),
        GroupName::StC2Cube => (vec![0, 0, 0], c2_generators(false)),
    };
    STGroup::new(name.tag(), TorusEmbedding::new(pattern), generators).expect("builtin presentations are valid")
}
