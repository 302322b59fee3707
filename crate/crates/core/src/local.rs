//! Local automorphisms: the matrix patterns of the three families and a
//! pointwise solver that, given `Δ` and `x`, produces an automorphism `φ`
//! with `φ(x) = Δ(x)` or the coordinate where no automorphism can agree.
//!
//! The solver fixes the scalars the automorphism form depends on
//! nonlinearly (`a_1`, and `a_1+b_1` or `a_1+a_2`) by a case split on the
//! leading nonzero coordinates of `x`; every remaining unknown then enters
//! linearly and is found by exact elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphism::{
    aut_matrix_unchecked, aut_param_count, build_aut, is_automorphism, param_slots, AutCheck, AutParams, Slot,
};
use crate::catalog::{build, Family, FamilySpec};
use crate::error::{Error, Result};
use crate::linsys::{IncrementalSolver, Push};
use crate::matrix::Matrix;
use crate::scalar::{format_rational, frac, parse_rational, rat, Field, RadicalScalar, Rational, RootError, Scalar};

/// Digits of the decimal evaluation used for residuals.
pub const RESIDUAL_DIGITS: u32 = 60;

/// A linear space of matrices: entries outside `free` vanish and each tie
/// `Σ λ·entry(r, c) = 0` holds. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixPattern {
    pub size: usize,
    pub free: BTreeSet<(usize, usize)>,
    pub ties: Vec<Tie>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tie {
    pub terms: Vec<(Rational, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternViolation {
    Shape { rows: usize, cols: usize, size: usize },
    OffPattern { row: usize, col: usize },
    Tie { index: usize },
}

impl MatrixPattern {
    /// Dimension of the space: free positions minus independent ties.
    pub fn free_count(&self) -> usize {
        let index: BTreeMap<(usize, usize), usize> = self.free.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let rows: Vec<Vec<Rational>> = self
            .ties
            .iter()
            .map(|t| {
                let mut v = vec![rat(0); self.free.len()];
                for (l, r, c) in &t.terms {
                    if let Some(&i) = index.get(&(*r, *c)) {
                        v[i] += l;
                    }
                }
                v
            })
            .collect();
        let rank = if rows.is_empty() || self.free.is_empty() {
            0
        } else {
            Matrix::from_rows(rows).expect("rectangular").rank()
        };
        self.free.len() - rank
    }

    pub fn to_json(&self) -> PatternJson {
        PatternJson {
            size: self.size,
            free: self.free.iter().map(|&(r, c)| [r + 1, c + 1]).collect(),
            ties: self
                .ties
                .iter()
                .map(|t| TieJson {
                    terms: t.terms.iter().map(|(l, r, c)| (format_rational(l), r + 1, c + 1)).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PatternJson) -> Result<Self> {
        let check = |r: usize, c: usize| {
            if (1..=j.size).contains(&r) && (1..=j.size).contains(&c) {
                Ok((r - 1, c - 1))
            } else {
                Err(Error::Parse(format!("position ({r}, {c}) outside a {0}x{0} matrix", j.size)))
            }
        };
        let free = j.free.iter().map(|&[r, c]| check(r, c)).collect::<Result<BTreeSet<_>>>()?;
        let ties = j
            .ties
            .iter()
            .map(|t| {
                let terms = t
                    .terms
                    .iter()
                    .map(|(l, r, c)| {
                        let (r, c) = check(*r, *c)?;
                        Ok((parse_rational(l)?, r, c))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Tie { terms })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { size: j.size, free, ties })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternJson {
    pub size: usize,
    pub free: Vec<[usize; 2]>,
    pub ties: Vec<TieJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieJson {
    pub terms: Vec<(String, usize, usize)>,
}

pub fn in_pattern(m: &Matrix, pat: &MatrixPattern) -> std::result::Result<(), PatternViolation> {
    if m.rows() != pat.size || m.cols() != pat.size {
        return Err(PatternViolation::Shape { rows: m.rows(), cols: m.cols(), size: pat.size });
    }
    if let Some((row, col, _)) = m.nonzeros().find(|(r, c, _)| !pat.free.contains(&(*r, *c))) {
        return Err(PatternViolation::OffPattern { row, col });
    }
    for (index, tie) in pat.ties.iter().enumerate() {
        let sum: Rational = tie.terms.iter().map(|(l, r, c)| l * m.get(*r, *c)).sum();
        if !Scalar::is_zero(&sum) {
            return Err(PatternViolation::Tie { index });
        }
    }
    Ok(())
}

/// The linear space of local automorphisms as described for each family.
pub fn localaut_pattern(spec: &FamilySpec) -> MatrixPattern {
    let (m, k) = (spec.e_count(), spec.k);
    let (e, f) = (|i: usize| spec.e(i), |j: usize| spec.f(j));
    let mut free = BTreeSet::new();
    for c in 1..=m {
        for r in c..=m {
            free.insert((e(r), e(c)));
        }
    }
    for j in 1..=2 * k {
        free.insert((f(j), e(1)));
    }
    for j in 1..=k {
        free.insert((f(k + j), e(2)));
        free.insert((e(m), f(j)));
        if spec.family == Family::Mu3 {
            free.insert((f(k + j), e(3)));
        }
    }
    for j in 1..=k {
        for i in 1..=k {
            // Diagonal blocks of μ2 have a single free entry in their first row.
            let diagonal_free = spec.family != Family::Mu2 || j > 1 || i == 1;
            if diagonal_free {
                free.insert((f(j), f(i)));
                free.insert((f(k + j), f(k + i)));
            }
            free.insert((f(k + j), f(i)));
        }
    }
    let mut ties = Vec::new();
    if spec.family == Family::Mu3 {
        ties.push(Tie { terms: vec![(rat(1), e(2), e(2)), (rat(-1), e(1), e(1)), (rat(-1), e(2), e(1))] });
        for i in 3..m {
            ties.push(Tie { terms: vec![(rat(1), e(i), e(1)), (rat(-1), e(i), e(2))] });
        }
    }
    MatrixPattern { size: spec.n, free, ties }
}

/// Closed-form local-automorphism dimension stated for each family.
pub fn localaut_dim_remark(spec: &FamilySpec) -> usize {
    let (n, k) = (spec.n as i64, spec.k as i64);
    let twice = match spec.family {
        Family::Mu1 => n * n + 10 * k * k - 4 * k * n + n + 6 * k,
        Family::Mu2 => n * n + 10 * k * k - 4 * k * n + n + 2 * k + 4,
        Family::Mu3 => n * n + 10 * k * k - 4 * k * n - n + 12 * k + 4,
    };
    debug_assert!(twice >= 0 && twice % 2 == 0);
    (twice / 2) as usize
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDimAudit {
    pub spec: FamilySpec,
    pub free_count: usize,
    pub remark: usize,
    pub aut_param_count: usize,
}

impl LocalDimAudit {
    pub fn matches_remark(&self) -> bool {
        self.free_count == self.remark
    }

    pub fn exceeds_aut(&self) -> bool {
        self.free_count > self.aut_param_count
    }
}

pub fn localaut_dim_audit(spec: &FamilySpec) -> LocalDimAudit {
    LocalDimAudit {
        spec: *spec,
        free_count: localaut_pattern(spec).free_count(),
        remark: localaut_dim_remark(spec),
        aut_param_count: aut_param_count(spec),
    }
}

/// `constant + Σ coeff·x_var`. Products are only defined when one factor
/// is constant, which is all the automorphism builders need once the
/// nonlinear scalars are fixed.
#[derive(Clone, Debug, PartialEq)]
struct Affine<K> {
    constant: K,
    terms: BTreeMap<usize, K>,
}

impl<K: Field> Affine<K> {
    fn constant(c: K) -> Self {
        Self { constant: c, terms: BTreeMap::new() }
    }

    fn var(v: usize) -> Self {
        Self { constant: K::zero(), terms: BTreeMap::from([(v, K::one())]) }
    }

    fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    fn scaled(&self, s: &K) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            constant: self.constant.clone() * s.clone(),
            terms: self.terms.iter().map(|(v, c)| (*v, c.clone() * s.clone())).collect(),
        }
    }

    fn combine(mut self, other: Self, sign: bool) -> Self {
        self.constant = if sign { self.constant + other.constant } else { self.constant - other.constant };
        for (v, c) in other.terms {
            let entry = self.terms.remove(&v).unwrap_or_else(K::zero);
            let updated = if sign { entry + c } else { entry - c };
            if !updated.is_zero() {
                self.terms.insert(v, updated);
            }
        }
        self
    }
}

impl<K: Field> Add for Affine<K> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.combine(o, true)
    }
}

impl<K: Field> Sub for Affine<K> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.combine(o, false)
    }
}

impl<K: Field> Neg for Affine<K> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scaled(&-K::one())
    }
}

impl<K: Field> Mul for Affine<K> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_constant() {
            o.scaled(&self.constant)
        } else if o.is_constant() {
            self.scaled(&o.constant)
        } else {
            panic!("product of two non-constant affine forms")
        }
    }
}

impl<K: Field> Scalar for Affine<K> {
    fn zero() -> Self {
        Self::constant(K::zero())
    }
    fn one() -> Self {
        Self::constant(K::one())
    }
    fn is_zero(&self) -> bool {
        self.is_constant() && self.constant.is_zero()
    }
    fn from_rational(r: &Rational) -> Self {
        Self::constant(K::from_rational(r))
    }
}

/// Which branch of the case split on `x = Σ ξ_i e_i + Σ ζ_j f_j` applies.
/// Indices are 1-based, as in the basis names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    /// `x = 0`.
    Zero,
    /// `ξ_1 ≠ 0`.
    Case1,
    /// `ξ_1 = 0`, `ξ_2 ≠ 0`.
    Case2,
    /// Leading nonzero coordinate `ξ_r` with `r ≥ 3`.
    Case3 { r: usize },
    /// `ξ = 0`, leading nonzero coordinate `ζ_r` with `r ≤ k`.
    Case4 { r: usize },
    /// `ξ = 0`, `ζ_1 = … = ζ_k = 0`, leading nonzero coordinate `ζ_{k+r}`.
    Case5 { r: usize },
}

impl CaseTag {
    pub fn of(spec: &FamilySpec, x: &[Rational]) -> Self {
        let (m, k) = (spec.e_count(), spec.k);
        match x.iter().position(|c| !Scalar::is_zero(c)) {
            None => CaseTag::Zero,
            Some(0) => CaseTag::Case1,
            Some(1) => CaseTag::Case2,
            Some(i) if i < m => CaseTag::Case3 { r: i + 1 },
            Some(i) if i < m + k => CaseTag::Case4 { r: i - m + 1 },
            Some(i) => CaseTag::Case5 { r: i - m - k + 1 },
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::Zero => write!(f, "zero"),
            CaseTag::Case1 => write!(f, "case1"),
            CaseTag::Case2 => write!(f, "case2"),
            CaseTag::Case3 { r } => write!(f, "case3(r={r})"),
            CaseTag::Case4 { r } => write!(f, "case4(r={r})"),
            CaseTag::Case5 { r } => write!(f, "case5(r={r})"),
        }
    }
}

/// Why no automorphism maps `x` to `Δ(x)`. Coordinates are 0-based basis
/// indices.
#[derive(Clone, Debug, PartialEq)]
pub enum InfeasibleReason {
    Shape(String),
    /// `φ(x)` has a zero coordinate for every automorphism `φ` but `Δ(x)`
    /// does not.
    StructuralZero {
        coord: usize,
    },
    /// The equation for this coordinate contradicts the earlier ones.
    ForcedConflict {
        coord: usize,
    },
    /// The equations force a nondegeneracy quantity (`a_1`, …) to vanish.
    DegenerateForced {
        coord: usize,
        what: &'static str,
    },
    /// The leading scalar must be a real root that does not exist.
    NeedsExtension {
        coord: usize,
        radicand: Rational,
        degree: u32,
    },
    /// Every solution tried had a singular `d` block.
    SingularBlock,
}

impl InfeasibleReason {
    pub fn coord(&self) -> Option<usize> {
        match self {
            InfeasibleReason::StructuralZero { coord }
            | InfeasibleReason::ForcedConflict { coord }
            | InfeasibleReason::DegenerateForced { coord, .. }
            | InfeasibleReason::NeedsExtension { coord, .. } => Some(*coord),
            InfeasibleReason::Shape(_) | InfeasibleReason::SingularBlock => None,
        }
    }
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfeasibleReason::Shape(s) => write!(f, "shape: {s}"),
            InfeasibleReason::StructuralZero { coord } => {
                write!(f, "coordinate {} of φ(x) vanishes for every automorphism", coord + 1)
            }
            InfeasibleReason::ForcedConflict { coord } => {
                write!(f, "coordinate {} contradicts the values forced by earlier coordinates", coord + 1)
            }
            InfeasibleReason::DegenerateForced { coord, what } => {
                write!(f, "coordinate {} forces {what} = 0", coord + 1)
            }
            InfeasibleReason::NeedsExtension { coord, radicand, degree } => {
                write!(f, "coordinate {} needs a real {degree}-th root of {radicand}", coord + 1)
            }
            InfeasibleReason::SingularBlock => write!(f, "every solution found has det d = 0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infeasible {
    pub case: CaseTag,
    pub reason: InfeasibleReason,
}

/// An automorphism `φ` (given by its parameters) with `φ(x) = Δ(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub case: CaseTag,
    pub params: AutParams<RadicalScalar>,
    pub point: Vec<Rational>,
    pub target: Vec<Rational>,
    /// Largest `|φ(x)_i − Δ(x)_i|` in a 60-digit decimal evaluation.
    pub residual: Rational,
}

impl Certificate {
    pub fn is_rational(&self) -> bool {
        let all = |v: &[RadicalScalar]| v.iter().all(|s| s.as_rational().is_some());
        let p = &self.params;
        all(&p.a)
            && all(&p.b)
            && all(&p.b2)
            && all(&p.c)
            && p.d.iter().all(|r| all(r))
            && p.d2.iter().all(|r| all(r))
            && p.beta.as_rational().is_some()
    }

    /// Rebuilds `φ` from the parameters and checks `φ(x) = Δ(x)`: exactly,
    /// and through the decimal residual bound.
    pub fn verify(&self, spec: &FamilySpec) -> bool {
        let Ok(aut) = build_aut(spec, &self.params) else {
            return false;
        };
        let x: Vec<RadicalScalar> = self.point.iter().cloned().map(RadicalScalar::rational).collect();
        let Ok(image) = aut.m.mul_vec(&x) else {
            return false;
        };
        let exact = image.iter().zip(&self.target).all(|(a, b)| *a == RadicalScalar::rational(b.clone()));
        exact && residual(&image, &self.target) < frac(1, 1) / pow10(40)
    }
}

fn pow10(e: u32) -> Rational {
    Rational::from_integer(BigInt::from(10).pow(e))
}

fn residual(image: &[RadicalScalar], target: &[Rational]) -> Rational {
    image
        .iter()
        .zip(target)
        .map(|(a, b)| (a.clone() - RadicalScalar::rational(b.clone())).fixed_point(RESIDUAL_DIGITS).abs())
        .max()
        .map_or(rat(0), |m| Rational::new(m, BigInt::from(10).pow(RESIDUAL_DIGITS)))
}

/// The nonlinear scalars of a candidate automorphism: `a_1` and, for `μ2`
/// and `μ3`, `a_1+b_1` or `a_1+a_2`.
#[derive(Clone, Debug)]
struct Sigma {
    a1: RadicalScalar,
    second: RadicalScalar,
}

fn q(r: Rational) -> RadicalScalar {
    RadicalScalar::rational(r)
}

fn root(value: &Rational, degree: u32, coord: usize) -> std::result::Result<RadicalScalar, InfeasibleReason> {
    RadicalScalar::real_root(value, degree).map_err(|RootError::NegativeRadicand| InfeasibleReason::NeedsExtension {
        coord,
        radicand: value.clone(),
        degree,
    })
}

/// Coordinates of `x` and `y = Δx` in the `ξ, ζ', ζ''` / `η, θ', θ''` split
/// (1-based accessors).
struct Split<'a> {
    spec: &'a FamilySpec,
    x: &'a [Rational],
    y: &'a [Rational],
}

impl Split<'_> {
    fn xi(&self, i: usize) -> &Rational {
        &self.x[self.spec.e(i)]
    }
    fn eta(&self, i: usize) -> &Rational {
        &self.y[self.spec.e(i)]
    }
    fn zeta(&self, j: usize) -> &Rational {
        &self.x[self.spec.f(j)]
    }
    fn theta(&self, j: usize) -> &Rational {
        &self.y[self.spec.f(j)]
    }
    /// Index of the first nonzero `ξ_i` with `i ≥ from`.
    fn leading_xi(&self, from: usize) -> Option<usize> {
        (from..=self.spec.e_count()).find(|&i| !Scalar::is_zero(self.xi(i)))
    }
    fn zeta_prime_nonzero(&self) -> bool {
        (1..=self.spec.k).any(|j| !Scalar::is_zero(self.zeta(j)))
    }
}

fn nonzero(v: Rational, coord: usize, what: &'static str) -> std::result::Result<Rational, InfeasibleReason> {
    if Scalar::is_zero(&v) {
        Err(InfeasibleReason::DegenerateForced { coord, what })
    } else {
        Ok(v)
    }
}

fn sigma_candidates(s: &Split<'_>) -> std::result::Result<Vec<Sigma>, InfeasibleReason> {
    let spec = s.spec;
    let one = || q(rat(1));
    let m = spec.e_count();
    let c_e = |i: usize| spec.e(i);
    let c_f = |j: usize| spec.f(j);
    match spec.family {
        Family::Mu1 => {
            let a1 = if !Scalar::is_zero(s.xi(1)) {
                q(nonzero(s.eta(1) / s.xi(1), c_e(1), "a_1")?)
            } else if let Some(r) = s.leading_xi(2) {
                if r == m && s.zeta_prime_nonzero() {
                    one()
                } else {
                    let v = nonzero(s.eta(r) / s.xi(r), c_e(r), "a_1")?;
                    root(&v, r as u32, c_e(r))?
                }
            } else {
                one()
            };
            Ok(vec![Sigma { second: a1.clone(), a1 }])
        }
        Family::Mu2 => mu2_sigma(s),
        Family::Mu3 => {
            let (xi1, xi2) = (s.xi(1), s.xi(2));
            if !Scalar::is_zero(xi1) {
                let a1 = nonzero(s.eta(1) / xi1, c_e(1), "a_1")?;
                let w = xi1 + xi2;
                if !Scalar::is_zero(&w) {
                    let u = nonzero((s.eta(2) + s.eta(1)) / w, c_e(2), "a_1 + a_2")?;
                    return Ok(vec![Sigma { a1: q(a1), second: q(u) }]);
                }
                if let Some(rho) = (3..m).find(|&i| !Scalar::is_zero(s.xi(i))) {
                    let u = s.eta(rho) / (Scalar::pow(&a1, rho as u32 - 2) * s.xi(rho));
                    let u = nonzero(u, c_e(rho), "a_1 + a_2")?;
                    return Ok(vec![Sigma { a1: q(a1), second: q(u) }]);
                }
                return Ok([1, 2, -1].iter().map(|&u| Sigma { a1: q(a1.clone()), second: q(rat(u)) }).collect());
            }
            if !Scalar::is_zero(xi2) {
                let u = nonzero(s.eta(2) / xi2, c_e(2), "a_1 + a_2")?;
                return Ok(vec![Sigma { a1: one(), second: q(u) }]);
            }
            if let Some(r) = s.leading_xi(3) {
                if !(r == m && s.zeta_prime_nonzero()) {
                    let u = nonzero(s.eta(r) / s.xi(r), c_e(r), "a_1 + a_2")?;
                    return Ok(vec![Sigma { a1: one(), second: q(u) }]);
                }
            }
            let _ = c_f;
            Ok(vec![Sigma { a1: one(), second: one() }])
        }
    }
}

fn mu2_sigma(s: &Split<'_>) -> std::result::Result<Vec<Sigma>, InfeasibleReason> {
    let spec = s.spec;
    let (m, k) = (spec.e_count(), spec.k);
    let c_e = |i: usize| spec.e(i);
    let c_f = |j: usize| spec.f(j);
    let one = || q(rat(1));
    let xi1 = s.xi(1);
    let (zeta1, theta1) = (s.zeta(1), s.theta(1));
    if !Scalar::is_zero(xi1) {
        let a1 = nonzero(s.eta(1) / xi1, c_e(1), "a_1")?;
        let w = xi1 + zeta1;
        if !Scalar::is_zero(&w) {
            let sc = nonzero((theta1 + s.eta(1)) / w, c_f(1), "a_1 + b_1")?;
            return Ok(vec![Sigma { a1: q(a1), second: q(sc) }]);
        }
        let mut cands = vec![a1.clone(), rat(1), rat(2), rat(-1), rat(3)];
        cands.dedup();
        return Ok(cands.into_iter().map(|sc| Sigma { a1: q(a1.clone()), second: q(sc) }).collect());
    }
    let r = s.leading_xi(2);
    let zp = s.zeta_prime_nonzero();
    // Leading e-coordinate gives a_1 (a_1+b_1)^{r-1} ξ_r = η_r unless the
    // free c-parameters absorb it.
    let e_active = r.filter(|&r| !(r == m && zp));
    let lead = |r: usize| nonzero(s.eta(r) / s.xi(r), c_e(r), "a_1");
    if !Scalar::is_zero(zeta1) {
        let sc = nonzero(theta1 / zeta1, c_f(1), "a_1 + b_1")?;
        let a1 = match e_active {
            Some(r) => q(lead(r)?) * q(sc.clone()).pow(r as u32 - 1).inv().expect("nonzero"),
            None => one(),
        };
        return Ok(vec![Sigma { a1, second: q(sc) }]);
    }
    if zp {
        let a1 = match e_active {
            Some(r) => q(lead(r)?),
            None => one(),
        };
        return Ok(vec![Sigma { a1, second: one() }]);
    }
    // No f'-component: coordinate f_{k+1} reads
    // a_1 s ξ_2 − a_1² (ξ_2 − ζ_{k+1}) = θ_{k+1}.
    let (z1, t1) = (s.zeta(k + 1), s.theta(k + 1));
    let coord = c_f(k + 1);
    match e_active {
        Some(2) => {
            let xi2 = s.xi(2);
            let p = lead(2)?;
            let w = xi2 - z1;
            if Scalar::is_zero(&w) {
                Ok(vec![Sigma { a1: one(), second: q(p) }])
            } else {
                let sq = nonzero((s.eta(2) - t1) / w, coord, "a_1")?;
                let a1 = root(&sq, 2, coord)?;
                let sc = q(p) * a1.inv().expect("nonzero");
                Ok(vec![Sigma { a1, second: sc }])
            }
        }
        Some(r) => {
            let qv = lead(r)?;
            if Scalar::is_zero(z1) {
                return Ok(vec![Sigma { a1: q(qv), second: one() }]);
            }
            let t = nonzero(t1 / z1, coord, "a_1")?;
            let sc = root(&(&qv * &qv / t), 2 * (r as u32 - 1), coord)?;
            let a1 = q(qv) * sc.pow(r as u32 - 1).inv().expect("nonzero");
            Ok(vec![Sigma { a1, second: sc }])
        }
        None => {
            if Scalar::is_zero(z1) {
                return Ok(vec![Sigma { a1: one(), second: one() }]);
            }
            let t = nonzero(t1 / z1, coord, "a_1")?;
            Ok(vec![Sigma { a1: root(&t, 2, coord)?, second: one() }])
        }
    }
}

/// The slots whose values are fixed by the nonlinear scalars.
fn sigma_slot(spec: &FamilySpec, slot: Slot) -> bool {
    match spec.family {
        Family::Mu1 => slot == Slot::A(0),
        Family::Mu2 => matches!(slot, Slot::A(0) | Slot::B(0)),
        Family::Mu3 => matches!(slot, Slot::A(0) | Slot::A(1)),
    }
}

fn sigma_value(spec: &FamilySpec, slot: Slot, sigma: &Sigma) -> RadicalScalar {
    match (spec.family, slot) {
        (_, Slot::A(0)) => sigma.a1.clone(),
        (Family::Mu2, Slot::B(0)) | (Family::Mu3, Slot::A(1)) => sigma.second.clone() - sigma.a1.clone(),
        _ => unreachable!("not a nonlinear slot"),
    }
}

/// `φ(x)` as affine forms in the linear unknowns, for fixed nonlinear scalars.
fn affine_image(
    spec: &FamilySpec,
    x: &[Rational],
    sigma: &Sigma,
    vars: &BTreeMap<Slot, usize>,
) -> Vec<Affine<RadicalScalar>> {
    let params = AutParams::from_slots(spec, |slot| {
        if sigma_slot(spec, slot) {
            Affine::constant(sigma_value(spec, slot, sigma))
        } else {
            Affine::var(vars[&slot])
        }
    });
    let mat = aut_matrix_unchecked(spec, &params);
    (0..spec.n)
        .map(|r| {
            let mut acc = Affine::zero();
            for (c, xc) in x.iter().enumerate() {
                if !Scalar::is_zero(xc) {
                    acc = acc + mat.get(r, c).scaled(&q(xc.clone()));
                }
            }
            acc
        })
        .collect()
}

fn linear_slots(spec: &FamilySpec) -> BTreeMap<Slot, usize> {
    param_slots(spec).into_iter().filter(|s| !sigma_slot(spec, *s)).enumerate().map(|(i, s)| (s, i)).collect()
}

const SOLVE_RETRIES: u64 = 12;

fn solve_with_sigma(
    spec: &FamilySpec,
    x: &[Rational],
    y: &[Rational],
    sigma: &Sigma,
) -> std::result::Result<AutParams<RadicalScalar>, InfeasibleReason> {
    let vars = linear_slots(spec);
    let image = affine_image(spec, x, sigma, &vars);
    let mut solver = IncrementalSolver::<RadicalScalar>::new(vars.len());
    for (coord, form) in image.into_iter().enumerate() {
        let rhs = q(y[coord].clone()) - form.constant;
        if solver.push(form.terms, rhs) == Push::Inconsistent {
            return Err(InfeasibleReason::ForcedConflict { coord });
        }
    }
    let slot_of: Vec<Slot> = {
        let mut v = vec![Slot::Beta; vars.len()];
        for (s, i) in &vars {
            v[*i] = *s;
        }
        v
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for attempt in 0..SOLVE_RETRIES {
        let random: Vec<Rational> = (0..vars.len()).map(|_| rat(rng.gen_range(-5..=5))).collect();
        let values = solver.solve(|v| {
            if attempt == 0 {
                match slot_of[v] {
                    Slot::D(j, i) if i == j => q(rat(1)),
                    _ => q(rat(0)),
                }
            } else {
                q(random[v].clone())
            }
        });
        let params = AutParams::from_slots(spec, |slot| {
            if sigma_slot(spec, slot) {
                sigma_value(spec, slot, sigma)
            } else {
                values[vars[&slot]].clone()
            }
        });
        if params.check_nondegenerate(spec).is_ok() {
            return Ok(params);
        }
    }
    Err(InfeasibleReason::SingularBlock)
}

/// First coordinate where `φ(x)` vanishes identically over the family but
/// `y` does not.
fn structural_zero(spec: &FamilySpec, x: &[Rational], y: &[Rational]) -> Option<usize> {
    let vars = linear_slots(spec);
    let probes = [Sigma { a1: q(rat(2)), second: q(rat(7)) }, Sigma { a1: q(rat(3)), second: q(rat(11)) }];
    let images: Vec<Vec<Affine<RadicalScalar>>> = probes.iter().map(|s| affine_image(spec, x, s, &vars)).collect();
    (0..spec.n).find(|&r| !Scalar::is_zero(&y[r]) && images.iter().all(|img| Scalar::is_zero(&img[r])))
}

/// An automorphism agreeing with `delta` at `x`, or the reason none exists.
pub fn certify_point(
    spec: &FamilySpec,
    delta: &Matrix,
    x: &[Rational],
) -> std::result::Result<Certificate, Infeasible> {
    let case = CaseTag::of(spec, x);
    let fail = |reason| Infeasible { case, reason };
    if delta.rows() != spec.n || delta.cols() != spec.n || x.len() != spec.n {
        return Err(fail(InfeasibleReason::Shape(format!(
            "{}x{} operator and vector of length {} for dimension {}",
            delta.rows(),
            delta.cols(),
            x.len(),
            spec.n
        ))));
    }
    let y = delta.mul_vec(x).expect("shape checked");
    if let Some(coord) = structural_zero(spec, x, &y) {
        return Err(fail(InfeasibleReason::StructuralZero { coord }));
    }
    let params = if case == CaseTag::Zero {
        AutParams::identity(spec)
    } else {
        let split = Split { spec, x, y: &y };
        let candidates = sigma_candidates(&split).map_err(fail)?;
        let mut first_err = None;
        let mut found = None;
        for sigma in &candidates {
            match solve_with_sigma(spec, x, &y, sigma) {
                Ok(p) => {
                    found = Some(p);
                    break;
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        match found {
            Some(p) => p,
            None => return Err(fail(first_err.expect("at least one candidate"))),
        }
    };
    let aut = build_aut(spec, &params).expect("solver returns nondegenerate parameters");
    let xr: Vec<RadicalScalar> = x.iter().cloned().map(RadicalScalar::rational).collect();
    let image = aut.m.mul_vec(&xr).expect("shape checked");
    assert!(image.iter().zip(&y).all(|(a, b)| *a == q(b.clone())), "certificate does not reproduce Δ(x); solver bug");
    Ok(Certificate { case, residual: residual(&image, &y), params, point: x.to_vec(), target: y })
}

/// Basis vectors, pairwise sums, one representative per case and seeded
/// random vectors (with random zero prefixes) up to `min_total` probes.
pub fn default_probes(spec: &FamilySpec, seed: u64, min_total: usize) -> Vec<Vec<Rational>> {
    let n = spec.n;
    let (m, k) = (spec.e_count(), spec.k);
    let unit = |i: usize| {
        let mut v = vec![rat(0); n];
        v[i] = rat(1);
        v
    };
    let combo = |terms: &[(usize, i64)]| {
        let mut v = vec![rat(0); n];
        for &(i, c) in terms {
            v[i] += rat(c);
        }
        v
    };
    let mut probes: Vec<Vec<Rational>> = (0..n).map(unit).collect();
    for i in 0..n {
        for j in i + 1..n {
            probes.push(combo(&[(i, 1), (j, 1)]));
        }
    }
    let (e, f) = (|i: usize| spec.e(i), |j: usize| spec.f(j));
    probes.extend([
        combo(&[(e(1), 1), (e(2), -1), (f(1), 2)]),
        combo(&[(e(1), 1), (f(1), -1)]),
        combo(&[(e(1), 2), (e(2), -2), (e(3), 1)]),
        combo(&[(e(2), 3), (e(m), 1), (f(k + 1), 1)]),
        combo(&[(e(3), -2), (f(1), 1)]),
        combo(&[(e(m), 2), (f(k), 1)]),
        combo(&[(f(1), 1), (f(k + 1), -1)]),
        combo(&[(f(k), 2), (f(2 * k), 1)]),
        combo(&[(f(k + 1), 3)]),
        combo(&[(f(2 * k), -1)]),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while probes.len() < min_total {
        let lead = rng.gen_range(0..n);
        let mut v = vec![rat(0); n];
        for (i, c) in v.iter_mut().enumerate().skip(lead) {
            *c = rat(rng.gen_range(-4..=4));
            if i == lead && Scalar::is_zero(c) {
                *c = rat(1);
            }
        }
        probes.push(v);
    }
    probes
}

pub const DEFAULT_PROBE_COUNT: usize = 200;

#[derive(Clone, Debug)]
pub struct ProbeOutcome {
    pub point: Vec<Rational>,
    pub result: std::result::Result<Certificate, Infeasible>,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub spec: FamilySpec,
    pub seed: Option<u64>,
    pub outcomes: Vec<ProbeOutcome>,
}

impl ProbeReport {
    pub fn certified(&self) -> usize {
        self.outcomes.iter().filter(|o| o.result.is_ok()).count()
    }

    pub fn all_certified(&self) -> bool {
        self.certified() == self.outcomes.len()
    }

    pub fn first_failure(&self) -> Option<(&ProbeOutcome, &Infeasible)> {
        self.outcomes.iter().find_map(|o| o.result.as_ref().err().map(|e| (o, e)))
    }

    pub fn certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.outcomes.iter().filter_map(|o| o.result.as_ref().ok())
    }

    pub fn to_json(&self) -> ProbeReportJson {
        ProbeReportJson {
            family: self.spec.family,
            n: self.spec.n,
            k: self.spec.k,
            seed: self.seed,
            probes: self.outcomes.len(),
            certified: self.certified(),
            outcomes: self
                .outcomes
                .iter()
                .map(|o| {
                    let point = o.point.iter().map(format_rational).collect();
                    match &o.result {
                        Ok(c) => OutcomeJson {
                            point,
                            case: c.case.to_string(),
                            certified: true,
                            reason: None,
                            radical: !c.is_rational(),
                            residual: Some(format_rational(&c.residual)),
                            a1: Some(c.params.a[0].to_string()),
                        },
                        Err(e) => OutcomeJson {
                            point,
                            case: e.case.to_string(),
                            certified: false,
                            reason: Some(e.reason.to_string()),
                            radical: false,
                            residual: None,
                            a1: None,
                        },
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReportJson {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub seed: Option<u64>,
    pub probes: usize,
    pub certified: usize,
    pub outcomes: Vec<OutcomeJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub point: Vec<String>,
    pub case: String,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub radical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<String>,
}

/// Runs [`certify_point`] on every probe in parallel; outcomes keep the
/// probe order.
pub fn certify_probes(spec: &FamilySpec, delta: &Matrix, probes: &[Vec<Rational>]) -> ProbeReport {
    let outcomes =
        probes.par_iter().map(|x| ProbeOutcome { point: x.clone(), result: certify_point(spec, delta, x) }).collect();
    ProbeReport { spec: *spec, seed: None, outcomes }
}

/// [`certify_probes`] on [`default_probes`].
pub fn certify_default(spec: &FamilySpec, delta: &Matrix, seed: u64) -> ProbeReport {
    let probes = default_probes(spec, seed, DEFAULT_PROBE_COUNT);
    ProbeReport { seed: Some(seed), ..certify_probes(spec, delta, &probes) }
}

/// `Φ(x) = x + x_2 e_{n−2k}`: the identity plus one entry at
/// `(e_{n−2k}, e_2)`.
pub fn example_phi(spec: &FamilySpec) -> Result<Matrix> {
    if spec.family != Family::Mu1 {
        return Err(Error::Unsupported(format!(
            "the local-but-not-global example is stated for mu1, not {}",
            spec.family
        )));
    }
    let mut m = Matrix::identity(spec.n);
    m.set(spec.e(spec.e_count()), spec.e(2), rat(1));
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub spec: FamilySpec,
    pub phi: Matrix,
    pub check: AutCheck,
    pub in_pattern: bool,
    pub probes: ProbeReport,
}

impl WitnessReport {
    pub fn ok(&self) -> bool {
        matches!(self.check, AutCheck::NotMultiplicative { .. })
            && self.in_pattern
            && self.probes.outcomes.len() >= DEFAULT_PROBE_COUNT
            && self.probes.all_certified()
    }
}

pub fn witness_local_not_global(spec: &FamilySpec, seed: u64) -> Result<WitnessReport> {
    let phi = example_phi(spec)?;
    let check = is_automorphism(&build(spec), &phi);
    let in_pattern = in_pattern(&phi, &localaut_pattern(spec)).is_ok();
    let probes = certify_default(spec, &phi, seed);
    Ok(WitnessReport { spec: *spec, phi, check, in_pattern, probes })
}

/// A random element of the pattern away from the degenerate locus: the
/// `e`-diagonal is positive (so every root the solver takes is real) and
/// the diagonal `k×k` blocks are invertible.
pub fn sample_in_pattern<R: Rng>(spec: &FamilySpec, rng: &mut R) -> Matrix {
    let pat = localaut_pattern(spec);
    let (m, k) = (spec.e_count(), spec.k);
    loop {
        let mut mat = Matrix::zeros(spec.n, spec.n);
        for &(r, c) in &pat.free {
            let v = if r == c && r < m { rng.gen_range(1..=9) } else { rng.gen_range(-9..=9) };
            mat.set(r, c, rat(v));
        }
        for tie in &pat.ties {
            let ((l0, r0, c0), rest) = tie.terms.split_first().expect("nonempty tie");
            let s: Rational = rest.iter().map(|(l, r, c)| l * mat.get(*r, *c)).sum();
            mat.set(*r0, *c0, -s / l0);
        }
        let block = |r0: usize, c0: usize| {
            Matrix::from_rows((0..k).map(|j| (0..k).map(|i| mat.get(r0 + j, c0 + i).clone()).collect()).collect())
                .expect("square")
        };
        let diagonal_ok = (0..m).all(|i| !Scalar::is_zero(mat.get(i, i)));
        if diagonal_ok && block(m, m).is_invertible() && block(m + k, m + k).is_invertible() {
            return mat;
        }
    }
}

/// Rows of column `col` that the basis probe `b_col` forces to vanish in
/// any local automorphism of `μ1`, read off the image `φ(b_col)` of a
/// general automorphism.
pub fn forced_zero_rows(spec: &FamilySpec, col: usize) -> Vec<usize> {
    assert_eq!(spec.family, Family::Mu1, "forced-zero steps are stated for mu1");
    let (m, k, n) = (spec.e_count(), spec.k, spec.n);
    if col == 0 {
        Vec::new()
    } else if col == 1 {
        std::iter::once(0).chain(m..m + k).collect()
    } else if col < m {
        (0..col).chain(m..n).collect()
    } else if col < m + k {
        (0..m - 1).collect()
    } else {
        (0..m + k).collect()
    }
}

/// Outcome of perturbing an in-pattern operator at one off-pattern entry.
#[derive(Clone, Debug)]
pub struct PerturbationOutcome {
    pub position: (usize, usize),
    /// Result of certifying the basis probe `b_col`.
    pub basis_probe: std::result::Result<Certificate, Infeasible>,
    /// The infeasible coordinate of the basis probe is the perturbed row and
    /// lies among the rows that probe forces to zero.
    pub matches_forced_zero: bool,
}

pub fn perturbation_outcome(spec: &FamilySpec, delta: &Matrix, position: (usize, usize)) -> PerturbationOutcome {
    let (row, col) = position;
    let mut x = vec![rat(0); spec.n];
    x[col] = rat(1);
    let basis_probe = certify_point(spec, delta, &x);
    let matches_forced_zero = match &basis_probe {
        Err(Infeasible { reason: InfeasibleReason::StructuralZero { coord }, .. }) => {
            *coord == row && forced_zero_rows(spec, col).contains(&row)
        }
        _ => false,
    };
    PerturbationOutcome { position, basis_probe, matches_forced_zero }
}
