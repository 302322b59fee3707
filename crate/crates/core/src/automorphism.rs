//! Parametrized automorphism groups of the three families.
//!
//! Matrices act on column vectors: column `j` is the image of basis vector
//! `j`. The builders are generic over the scalar type so the same code path
//! produces rational matrices, matrices over a radical extension, tangent
//! vectors (dual numbers) and affine-in-unknowns matrices for the
//! certificate solver.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Algebra;
use crate::catalog::{build, Family, FamilySpec};
use crate::error::{Error, Result};
use crate::linsys::IncrementalSolver;
use crate::matrix::Matrix;
use crate::scalar::{format_rational, parse_rational, rat, Field, Rational, Scalar};

/// Free parameters of one automorphism. Indices are 0-based: `a[0]` is
/// `a_1`, `d[j][i]` is the coefficient of `f_{j+1}` in the image of
/// `f_{i+1}`.
///
/// `b2` and `beta` are used by `μ3` only and must be empty/zero otherwise.
/// For `μ2` the first row of `d` is not free: it must equal
/// `(a_1 + b_1, 0, …, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AutParams<S = Rational> {
    pub family: Family,
    pub a: Vec<S>,
    pub b: Vec<S>,
    pub b2: Vec<S>,
    pub c: Vec<S>,
    pub d: Vec<Vec<S>>,
    pub d2: Vec<Vec<S>>,
    pub beta: S,
}

/// One free parameter of a family's automorphism form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    A(usize),
    B(usize),
    B2(usize),
    C(usize),
    D(usize, usize),
    D2(usize, usize),
    Beta,
}

/// The free parameters of the family, in a fixed order.
pub fn param_slots(spec: &FamilySpec) -> Vec<Slot> {
    let (m, k) = (spec.e_count(), spec.k);
    let mut slots: Vec<Slot> = (0..m).map(Slot::A).collect();
    slots.extend((0..2 * k).map(Slot::B));
    if spec.family == Family::Mu3 {
        slots.extend((0..k).map(Slot::B2));
    }
    slots.extend((0..k).map(Slot::C));
    let first_free_row = if spec.family == Family::Mu2 { 1 } else { 0 };
    for j in first_free_row..k {
        for i in 0..k {
            slots.push(Slot::D(j, i));
        }
    }
    for j in 0..k {
        for i in 0..k {
            slots.push(Slot::D2(j, i));
        }
    }
    if spec.family == Family::Mu3 {
        slots.push(Slot::Beta);
    }
    slots
}

impl<S: Scalar> AutParams<S> {
    /// Parameters with every free slot read from `value`; constrained
    /// entries (the first row of `d` for `μ2`) are filled in.
    pub fn from_slots(spec: &FamilySpec, mut value: impl FnMut(Slot) -> S) -> Self {
        let (m, k) = (spec.e_count(), spec.k);
        let mut p = Self {
            family: spec.family,
            a: (0..m).map(|i| value(Slot::A(i))).collect(),
            b: (0..2 * k).map(|i| value(Slot::B(i))).collect(),
            b2: Vec::new(),
            c: Vec::new(),
            d: Vec::new(),
            d2: Vec::new(),
            beta: S::zero(),
        };
        if spec.family == Family::Mu3 {
            p.b2 = (0..k).map(|i| value(Slot::B2(i))).collect();
        }
        p.c = (0..k).map(|i| value(Slot::C(i))).collect();
        p.d = (0..k)
            .map(|j| {
                if spec.family == Family::Mu2 && j == 0 {
                    let mut row = vec![S::zero(); k];
                    row[0] = p.a[0].clone() + p.b[0].clone();
                    row
                } else {
                    (0..k).map(|i| value(Slot::D(j, i))).collect()
                }
            })
            .collect();
        p.d2 = (0..k).map(|j| (0..k).map(|i| value(Slot::D2(j, i))).collect()).collect();
        if spec.family == Family::Mu3 {
            p.beta = value(Slot::Beta);
        }
        p
    }

    pub fn get(&self, slot: Slot) -> &S {
        match slot {
            Slot::A(i) => &self.a[i],
            Slot::B(i) => &self.b[i],
            Slot::B2(i) => &self.b2[i],
            Slot::C(i) => &self.c[i],
            Slot::D(j, i) => &self.d[j][i],
            Slot::D2(j, i) => &self.d2[j][i],
            Slot::Beta => &self.beta,
        }
    }

    /// The parameters of the identity map.
    pub fn identity(spec: &FamilySpec) -> Self {
        Self::from_slots(spec, |slot| match slot {
            Slot::A(0) => S::one(),
            Slot::D(j, i) if i == j => S::one(),
            _ => S::zero(),
        })
    }

    /// `a_1`, `a_1 + b_1` (`μ2`) and `a_1 + a_2` (`μ3`): the scalars the
    /// form depends on nonlinearly.
    pub fn leading_scale(&self) -> S {
        match self.family {
            Family::Mu1 => self.a[0].clone(),
            Family::Mu2 => self.a[0].clone() + self.b[0].clone(),
            Family::Mu3 => self.a[0].clone() + self.a[1].clone(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AutParams<T> {
        let row = |v: &Vec<S>| v.iter().map(&f).collect::<Vec<T>>();
        AutParams {
            family: self.family,
            a: row(&self.a),
            b: row(&self.b),
            b2: row(&self.b2),
            c: row(&self.c),
            d: self.d.iter().map(row).collect(),
            d2: self.d2.iter().map(row).collect(),
            beta: f(&self.beta),
        }
    }

    fn check_shape(&self, spec: &FamilySpec) -> Result<()> {
        let (m, k) = (spec.e_count(), spec.k);
        let mut problems = Vec::new();
        if self.family != spec.family {
            problems.push(format!("parameters for {} used with {}", self.family, spec.family));
        }
        if self.a.len() != m {
            problems.push(format!("a has length {}, expected {m}", self.a.len()));
        }
        if self.b.len() != 2 * k {
            problems.push(format!("b has length {}, expected {}", self.b.len(), 2 * k));
        }
        let b2_len = if spec.family == Family::Mu3 { k } else { 0 };
        if self.b2.len() != b2_len {
            problems.push(format!("b2 has length {}, expected {b2_len}", self.b2.len()));
        }
        if self.c.len() != k {
            problems.push(format!("c has length {}, expected {k}", self.c.len()));
        }
        for (name, block) in [("d", &self.d), ("d2", &self.d2)] {
            if block.len() != k || block.iter().any(|r| r.len() != k) {
                problems.push(format!("{name} must be {k}×{k}"));
            }
        }
        if spec.family != Family::Mu3 && !self.beta.is_zero() {
            problems.push("beta is only a parameter of mu3".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Shape(problems.join("; ")))
        }
    }
}

impl<S: Field> AutParams<S> {
    /// `Ok` iff every nondegeneracy condition of the family holds; the error
    /// names the first failing one.
    pub fn check_nondegenerate(&self, spec: &FamilySpec) -> Result<()> {
        self.check_shape(spec)?;
        if spec.family == Family::Mu2 {
            let s = self.leading_scale();
            let expected_row: Vec<S> = (0..spec.k).map(|i| if i == 0 { s.clone() } else { S::zero() }).collect();
            if self.d[0] != expected_row {
                return Err(Error::Degenerate("first row of d must be (a_1 + b_1, 0, …, 0)".into()));
            }
        }
        if self.a[0].is_zero() {
            return Err(Error::Degenerate("a_1 ≠ 0 violated".into()));
        }
        match spec.family {
            Family::Mu2 if self.leading_scale().is_zero() => {
                return Err(Error::Degenerate("a_1 + b_1 ≠ 0 violated".into()));
            }
            Family::Mu3 if self.leading_scale().is_zero() => {
                return Err(Error::Degenerate("a_1 + a_2 ≠ 0 violated".into()));
            }
            _ => {}
        }
        let d = Matrix::from_rows(self.d.clone())?;
        if d.det()?.is_zero() {
            return Err(Error::Degenerate("det d ≠ 0 violated".into()));
        }
        Ok(())
    }
}

/// The matrix of the family's automorphism form at `p`, without any
/// shape or nondegeneracy checks.
pub fn aut_matrix_unchecked<S: Scalar>(spec: &FamilySpec, p: &AutParams<S>) -> Matrix<S> {
    let (n, m, k) = (spec.n, spec.e_count(), spec.k);
    let e = |i: usize| i - 1;
    let f = |j: usize| m + j - 1;
    let mut mat = Matrix::zeros(n, n);
    let a1 = p.a[0].clone();
    for t in 1..=m {
        mat.set(e(t), e(1), p.a[t - 1].clone());
    }
    for i in 1..=2 * k {
        mat.set(f(i), e(1), p.b[i - 1].clone());
    }
    for i in 1..=k {
        mat.set(e(m), f(i), p.c[i - 1].clone());
        for j in 1..=k {
            mat.set(f(j), f(i), p.d[j - 1][i - 1].clone());
            mat.set(f(k + j), f(i), p.d2[j - 1][i - 1].clone());
        }
    }
    match spec.family {
        Family::Mu1 | Family::Mu2 => {
            let s = p.leading_scale();
            for i in 2..=m {
                let scale = s.pow(i as u32 - 1);
                for t in i..=m {
                    mat.set(e(t), e(i), scale.clone() * p.a[t - i].clone());
                }
            }
            for j in 1..=k {
                mat.set(f(k + j), e(2), a1.clone() * p.b[j - 1].clone());
            }
            for i in 1..=k {
                for j in 1..=k {
                    let mut v = p.d[j - 1][i - 1].clone();
                    if spec.family == Family::Mu2 && i == 1 {
                        v = v - p.b[j - 1].clone();
                    }
                    mat.set(f(k + j), f(k + i), a1.clone() * v);
                }
            }
        }
        Family::Mu3 => {
            let u = p.leading_scale();
            mat.set(e(2), e(2), u.clone());
            for t in 3..m {
                mat.set(e(t), e(2), p.a[t - 1].clone());
            }
            mat.set(e(m), e(2), p.beta.clone());
            for j in 1..=k {
                mat.set(f(k + j), e(2), p.b2[j - 1].clone());
                mat.set(f(k + j), e(3), u.clone() * p.b[j - 1].clone());
            }
            for i in 3..=m {
                let scale = a1.pow(i as u32 - 2);
                mat.set(e(i), e(i), scale.clone() * u.clone());
                for t in i + 1..=m {
                    mat.set(e(t), e(i), scale.clone() * p.a[t - i + 1].clone());
                }
            }
            for i in 1..=k {
                for j in 1..=k {
                    mat.set(f(k + j), f(k + i), u.clone() * p.d[j - 1][i - 1].clone());
                }
            }
        }
    }
    mat
}

#[derive(Clone, Debug, PartialEq)]
pub struct AutMatrix<S = Rational> {
    pub m: Matrix<S>,
    pub params: AutParams<S>,
}

/// The automorphism with parameters `p`; rejects malformed or degenerate
/// parameters with the failing constraint named.
pub fn build_aut<S: Field>(spec: &FamilySpec, p: &AutParams<S>) -> Result<AutMatrix<S>> {
    p.check_nondegenerate(spec)?;
    Ok(AutMatrix { m: aut_matrix_unchecked(spec, p), params: p.clone() })
}

/// Uniform integer parameters in `-range..=range`, redrawn until
/// nondegenerate.
pub fn random_params<R: Rng>(spec: &FamilySpec, range: i64, rng: &mut R) -> AutParams {
    loop {
        let p = AutParams::from_slots(spec, |_| rat(rng.gen_range(-range..=range)));
        if p.check_nondegenerate(spec).is_ok() {
            return p;
        }
    }
}

/// Result of checking a matrix against an algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum AutCheck {
    Automorphism,
    Shape {
        rows: usize,
        cols: usize,
        dim: usize,
    },
    Singular,
    /// `φ([b_i, b_j]) − [φ(b_i), φ(b_j)] = defect ≠ 0` (0-based indices).
    NotMultiplicative {
        i: usize,
        j: usize,
        defect: Vec<Rational>,
    },
}

impl AutCheck {
    pub fn is_automorphism(&self) -> bool {
        matches!(self, AutCheck::Automorphism)
    }
}

pub fn is_automorphism(a: &Algebra, m: &Matrix) -> AutCheck {
    let n = a.dim();
    if m.rows() != n || m.cols() != n {
        return AutCheck::Shape { rows: m.rows(), cols: m.cols(), dim: n };
    }
    if !m.is_invertible() {
        return AutCheck::Singular;
    }
    let cols: Vec<Vec<Rational>> = (0..n).map(|j| m.column(j)).collect();
    for i in 0..n {
        for j in 0..n {
            let image = image_of_product(a, &cols, i, j);
            let product = a.bracket(&cols[i], &cols[j]).expect("shape checked");
            if image != product {
                let defect = image.iter().zip(&product).map(|(x, y)| x - y).collect();
                return AutCheck::NotMultiplicative { i, j, defect };
            }
        }
    }
    AutCheck::Automorphism
}

/// The same check over any exact field, e.g. a radical extension.
pub fn is_automorphism_over<S: Field>(a: &Algebra, m: &Matrix<S>) -> bool {
    let n = a.dim();
    if m.rows() != n || m.cols() != n || m.det().map_or(true, |d| d.is_zero()) {
        return false;
    }
    let cols: Vec<Vec<S>> = (0..n).map(|j| m.column(j)).collect();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let mut image = vec![S::zero(); n];
            for (t, c) in a.product(i, j) {
                let c = S::from_rational(c);
                for (r, v) in cols[*t].iter().enumerate() {
                    image[r] = image[r].clone() + c.clone() * v.clone();
                }
            }
            image == a.bracket_generic(&cols[i], &cols[j])
        })
    })
}

fn image_of_product(a: &Algebra, cols: &[Vec<Rational>], i: usize, j: usize) -> Vec<Rational> {
    let mut image = vec![Rational::from_integer(0.into()); a.dim()];
    for (t, c) in a.product(i, j) {
        for (r, v) in cols[*t].iter().enumerate() {
            image[r] += c * v;
        }
    }
    image
}

/// `true` iff `D[x, y] = [Dx, y] + [x, Dy]` on all basis pairs.
pub fn is_derivation(a: &Algebra, d: &Matrix) -> bool {
    let n = a.dim();
    let cols: Vec<Vec<Rational>> = (0..n).map(|j| d.column(j)).collect();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let lhs = image_of_product(a, &cols, i, j);
            let x = a.bracket(&cols[i], &a.unit_vector(j)).expect("shape");
            let y = a.bracket(&a.unit_vector(i), &cols[j]).expect("shape");
            lhs.iter().zip(x.iter().zip(&y)).all(|(l, (x, y))| *l == x + y)
        })
    })
}

/// Dimension of the derivation algebra, i.e. of the Lie algebra of the
/// automorphism group, by exact elimination on the `n²` entries.
pub fn derivation_dim(a: &Algebra) -> usize {
    let n = a.dim();
    let var = |r: usize, c: usize| r * n + c;
    let mut solver = IncrementalSolver::<Rational>::new(n * n);
    for i in 0..n {
        for j in 0..n {
            // Equation per output coordinate t:
            // Σ_p c_ij^p D[t][p] − Σ_r D[r][i] c_rj^t − Σ_r D[r][j] c_ir^t = 0.
            let mut rows: std::collections::BTreeMap<usize, Vec<(usize, Rational)>> = Default::default();
            for (p, c) in a.product(i, j) {
                for t in 0..n {
                    rows.entry(t).or_default().push((var(t, *p), c.clone()));
                }
            }
            for r in 0..n {
                for (t, c) in a.product(r, j) {
                    rows.entry(*t).or_default().push((var(r, i), -c.clone()));
                }
                for (t, c) in a.product(i, r) {
                    rows.entry(*t).or_default().push((var(r, j), -c.clone()));
                }
            }
            for (_, terms) in rows {
                solver.push(terms, rat(0));
            }
        }
    }
    n * n - solver.rank()
}

/// First-order scalar `re + eps·ε` with `ε² = 0`, for tangent vectors of
/// the parametrization.
#[derive(Clone, Debug, PartialEq)]
struct Dual {
    re: Rational,
    eps: Rational,
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { re: self.re + o.re, eps: self.eps + o.eps }
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { re: self.re - o.re, eps: self.eps - o.eps }
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { re: -self.re, eps: -self.eps }
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual { eps: &self.re * &o.eps + &self.eps * &o.re, re: self.re * o.re }
    }
}

impl Scalar for Dual {
    fn zero() -> Self {
        Dual { re: rat(0), eps: rat(0) }
    }
    fn one() -> Self {
        Dual { re: rat(1), eps: rat(0) }
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(&self.re) && Scalar::is_zero(&self.eps)
    }
    fn from_rational(r: &Rational) -> Self {
        Dual { re: r.clone(), eps: rat(0) }
    }
}

/// Derivatives of the form at the identity, one matrix per free slot.
pub fn tangent_matrices(spec: &FamilySpec) -> Vec<Matrix> {
    let base = AutParams::<Rational>::identity(spec);
    param_slots(spec)
        .into_iter()
        .map(|slot| {
            let p = AutParams::from_slots(spec, |s| Dual {
                re: base.get(s).clone(),
                eps: if s == slot { rat(1) } else { rat(0) },
            });
            aut_matrix_unchecked(spec, &p).map(|d| d.eps.clone())
        })
        .collect()
}

pub fn aut_param_count(spec: &FamilySpec) -> usize {
    param_slots(spec).len()
}

/// Closed-form dimension of the automorphism group stated for each family.
pub fn aut_dim_remark(spec: &FamilySpec) -> usize {
    let (n, k) = (spec.n, spec.k);
    match spec.family {
        Family::Mu1 => n + 2 * k * k + k,
        Family::Mu2 => n + 2 * k * k + 1,
        Family::Mu3 => n + 2 * k * k + 2 * k + 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutDimAudit {
    pub spec: FamilySpec,
    pub param_count: usize,
    pub remark: usize,
    /// `dim Der(L)`, the dimension of the group computed without the form.
    pub derivation_dim: usize,
    /// Rank of the form's differential at the identity.
    pub tangent_rank: usize,
    /// Every tangent matrix of the form is a derivation.
    pub tangents_are_derivations: bool,
}

impl AutDimAudit {
    pub fn matches_remark(&self) -> bool {
        self.param_count == self.remark
    }

    /// The form is an immersion onto a neighbourhood of the identity in the
    /// full group: its differential is injective with image `Der(L)`.
    pub fn form_is_complete(&self) -> bool {
        self.tangents_are_derivations
            && self.tangent_rank == self.param_count
            && self.param_count == self.derivation_dim
    }
}

pub fn aut_dim_audit(spec: &FamilySpec) -> AutDimAudit {
    let a = build(spec);
    let tangents = tangent_matrices(spec);
    let flat: Vec<Vec<Rational>> = tangents.iter().map(|t| t.to_rows().into_iter().flatten().collect()).collect();
    let tangent_rank = if flat.is_empty() { 0 } else { Matrix::from_rows(flat).expect("rectangular").rank() };
    AutDimAudit {
        spec: *spec,
        param_count: aut_param_count(spec),
        remark: aut_dim_remark(spec),
        derivation_dim: derivation_dim(&a),
        tangent_rank,
        tangents_are_derivations: tangents.iter().all(|t| is_derivation(&a, t)),
    }
}

/// Recomputes every non-generator column of `m` from the generator
/// columns through the multiplication table and returns the first column
/// that differs, if any.
pub fn generation_mismatch(spec: &FamilySpec, m: &Matrix) -> Option<usize> {
    let a = build(spec);
    let (mm, k) = (spec.e_count(), spec.k);
    let mut cols: Vec<Option<Vec<Rational>>> = vec![None; spec.n];
    for g in crate::catalog::generators(spec) {
        cols[g] = Some(m.column(g));
    }
    let bracket = |cols: &[Option<Vec<Rational>>], x: usize, y: usize| {
        a.bracket(cols[x].as_ref().expect("computed"), cols[y].as_ref().expect("computed")).expect("shape")
    };
    let start = if spec.family == Family::Mu3 { 2 } else { 1 };
    for i in start..mm {
        cols[spec.e(i + 1)] = Some(bracket(&cols, spec.e(i), spec.e(1)));
    }
    for j in 1..=k {
        let mut v = bracket(&cols, spec.e(1), spec.f(j));
        if spec.family == Family::Mu2 && j == 1 {
            let e2 = cols[spec.e(2)].as_ref().expect("computed");
            v = v.iter().zip(e2).map(|(x, y)| x - y).collect();
        }
        cols[spec.f(k + j)] = Some(v);
    }
    (0..spec.n).find(|&j| cols[j].as_ref().expect("all columns rebuilt") != &m.column(j))
}

/// JSON form of [`AutParams`] with exact scalars as strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutParamsJson {
    pub family: Family,
    pub a: Vec<String>,
    pub b: Vec<String>,
    #[serde(default)]
    pub b2: Vec<String>,
    pub c: Vec<String>,
    pub d: Vec<Vec<String>>,
    pub d2: Vec<Vec<String>>,
    #[serde(default = "zero_string")]
    pub beta: String,
}

fn zero_string() -> String {
    "0".into()
}

impl AutParams {
    pub fn to_json(&self) -> AutParamsJson {
        let row = |v: &Vec<Rational>| v.iter().map(format_rational).collect::<Vec<_>>();
        AutParamsJson {
            family: self.family,
            a: row(&self.a),
            b: row(&self.b),
            b2: row(&self.b2),
            c: row(&self.c),
            d: self.d.iter().map(row).collect(),
            d2: self.d2.iter().map(row).collect(),
            beta: format_rational(&self.beta),
        }
    }

    pub fn from_json(j: &AutParamsJson) -> Result<Self> {
        let row = |v: &Vec<String>| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>();
        let block = |b: &Vec<Vec<String>>| b.iter().map(row).collect::<Result<Vec<_>>>();
        Ok(Self {
            family: j.family,
            a: row(&j.a)?,
            b: row(&j.b)?,
            b2: row(&j.b2)?,
            c: row(&j.c)?,
            d: block(&j.d)?,
            d2: block(&j.d2)?,
            beta: parse_rational(&j.beta)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_params_give_identity() {
        for family in Family::ALL {
            let spec = FamilySpec::new(family, 9, 2).unwrap();
            let p = AutParams::<Rational>::identity(&spec);
            assert_eq!(build_aut(&spec, &p).unwrap().m, Matrix::identity(9));
        }
    }

    #[test]
    fn degenerate_params_are_named() {
        let spec = FamilySpec::new(Family::Mu3, 7, 1).unwrap();
        let mut p = AutParams::<Rational>::identity(&spec);
        p.a[1] = rat(-1);
        let err = build_aut(&spec, &p).unwrap_err().to_string();
        assert!(err.contains("a_1 + a_2"), "{err}");
    }

    #[test]
    fn mu2_first_row_constraint_enforced() {
        let spec = FamilySpec::new(Family::Mu2, 8, 2).unwrap();
        let mut p = AutParams::<Rational>::identity(&spec);
        p.d[0][1] = rat(1);
        assert!(build_aut(&spec, &p).is_err());
    }

    #[test]
    fn params_json_round_trip() {
        let spec = FamilySpec::new(Family::Mu3, 8, 1).unwrap();
        let mut p = AutParams::<Rational>::identity(&spec);
        p.beta = crate::scalar::frac(-3, 7);
        let back = AutParams::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }
}
