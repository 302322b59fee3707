//! Structure-constant algebras and their nilpotency invariants.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{in_span, span_basis, Matrix};
use crate::scalar::{format_rational, parse_rational, rat, Rational, Scalar};

/// A finite-dimensional algebra given by sparse structure constants:
/// `[b_i, b_j] = Σ_k c_ij^k b_k`. Basis indices are 0-based in the API and
/// 1-based in the JSON form.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    basis_names: Vec<String>,
    table: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
}

impl Algebra {
    /// The abelian algebra on the given basis.
    pub fn new(basis_names: Vec<String>) -> Self {
        Self { basis_names, table: BTreeMap::new() }
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new((1..=dim).map(|i| format!("b{i}")).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis_names.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis_names.iter().position(|b| b == name)
    }

    /// Sets `[b_i, b_j]`, replacing any previous value. Repeated `k` are
    /// merged and zero coefficients dropped.
    pub fn set_product(&mut self, i: usize, j: usize, terms: &[(usize, Rational)]) -> Result<()> {
        let n = self.dim();
        if i >= n || j >= n || terms.iter().any(|(k, _)| *k >= n) {
            return Err(Error::Shape(format!("product index out of range for dimension {n}")));
        }
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (k, c) in terms {
            *merged.entry(*k).or_insert_with(|| rat(0)) += c;
        }
        let terms: Vec<_> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            self.table.remove(&(i, j));
        } else {
            self.table.insert((i, j), terms);
        }
        Ok(())
    }

    /// Nonzero products in `(i, j)` order.
    pub fn products(&self) -> impl Iterator<Item = (usize, usize, &[(usize, Rational)])> {
        self.table.iter().map(|(&(i, j), t)| (i, j, t.as_slice()))
    }

    pub fn product(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        self.table.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    fn basis_bracket(&self, i: usize, j: usize) -> Vec<Rational> {
        let mut v = vec![rat(0); self.dim()];
        for (k, c) in self.product(i, j) {
            v[*k] = c.clone();
        }
        v
    }

    fn check_len(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Shape(format!(
                "vector of length {} in an algebra of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Bilinear extension of the table.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut out = vec![rat(0); self.dim()];
        for (&(i, j), terms) in &self.table {
            if x[i].is_zero() || y[j].is_zero() {
                continue;
            }
            let s = &x[i] * &y[j];
            for (k, c) in terms {
                out[*k] += &s * c;
            }
        }
        Ok(out)
    }

    /// Generic-scalar bracket, used to push automorphism matrices over
    /// extension fields through the table.
    pub fn bracket_generic<S: Scalar>(&self, x: &[S], y: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim()];
        for (&(i, j), terms) in &self.table {
            if x[i].is_zero() || y[j].is_zero() {
                continue;
            }
            let s = x[i].clone() * y[j].clone();
            for (k, c) in terms {
                out[*k] = out[*k].clone() + s.clone() * S::from_rational(c);
            }
        }
        out
    }

    pub fn unit_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![rat(0); self.dim()];
        v[i] = rat(1);
        v
    }

    /// Every basis triple violating `[x,[y,z]] = [[x,y],z] − [[x,z],y]`.
    pub fn leibniz_violations(&self) -> Vec<LeibnizViolation> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            let bi = self.unit_vector(i);
            for j in 0..n {
                let bij = self.basis_bracket(i, j);
                for k in 0..n {
                    let bjk = self.basis_bracket(j, k);
                    let bik = self.basis_bracket(i, k);
                    let lhs = self.bracket(&bi, &bjk).expect("shape");
                    let first = self.bracket(&bij, &self.unit_vector(k)).expect("shape");
                    let second = self.bracket(&bik, &self.unit_vector(j)).expect("shape");
                    let defect: Vec<Rational> =
                        lhs.iter().zip(&first).zip(&second).map(|((l, f), s)| l - f + s).collect();
                    if defect.iter().any(|c| !c.is_zero()) {
                        out.push(LeibnizViolation { i, j, k, defect });
                    }
                }
            }
        }
        out
    }

    /// Basis of the span of all products `[u, v]` with `u ∈ left`, `v ∈ right`.
    fn product_span(&self, left: &[Vec<Rational>], right: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        let mut vectors = Vec::new();
        for u in left {
            for v in right {
                let w = self.bracket(u, v).expect("shape");
                if w.iter().any(|c| !c.is_zero()) {
                    vectors.push(w);
                }
            }
        }
        span_basis(&vectors, self.dim())
    }

    fn full_basis(&self) -> Vec<Vec<Rational>> {
        (0..self.dim()).map(|i| self.unit_vector(i)).collect()
    }

    /// Lower central (`L^{k+1} = [L^k, L]`) or derived
    /// (`L^{[s+1]} = [L^{[s]}, L^{[s]}]`) series.
    pub fn series(&self, kind: SeriesKind) -> SeriesReport {
        let full = self.full_basis();
        let mut current = full.clone();
        let mut dims = vec![self.dim()];
        let mut index = if self.dim() == 0 { Some(1) } else { None };
        let mut step = 1;
        while index.is_none() && step <= self.dim() + 1 {
            let next = match kind {
                SeriesKind::LowerCentral => self.product_span(&current, &full),
                SeriesKind::Derived => self.product_span(&current, &current),
            };
            step += 1;
            dims.push(next.len());
            if next.is_empty() {
                index = Some(step);
            } else if next.len() == current.len() {
                break;
            }
            current = next;
        }
        SeriesReport { kind, subspace_dims: dims, index }
    }

    /// Basis of `L² = [L, L]`.
    pub fn derived_square(&self) -> Vec<Vec<Rational>> {
        let full = self.full_basis();
        self.product_span(&full, &full)
    }

    /// Matrix of `R_x : y ↦ [y, x]`; column `j` is `[b_j, x]`.
    pub fn right_mul_matrix(&self, x: &[Rational]) -> Result<Matrix> {
        self.check_len(x)?;
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket(&self.unit_vector(j), x)?;
            for (r, v) in col.into_iter().enumerate() {
                m.set(r, j, v);
            }
        }
        Ok(m)
    }

    /// Jordan block sizes of the nilpotent operator `R_x`, read off the
    /// ranks of its powers.
    pub fn char_seq_at(&self, x: &[Rational]) -> Result<CharSeq> {
        let r = self.right_mul_matrix(x)?;
        let n = self.dim();
        let mut ranks = vec![n];
        let mut power = Matrix::identity(n);
        while *ranks.last().expect("nonempty") > 0 {
            if ranks.len() > n + 1 {
                return Err(Error::NotNilpotent);
            }
            power = power.mul(&r)?;
            let rk = power.rank();
            if rk == *ranks.last().expect("nonempty") {
                return Err(Error::NotNilpotent);
            }
            ranks.push(rk);
        }
        Ok(CharSeq::from_power_ranks(&ranks))
    }

    /// Lexicographic maximum of `char_seq_at` over the basis vectors outside
    /// `L²` and `sample_count` seeded random vectors outside `L²`.
    ///
    /// The true characteristic sequence is a maximum over all of `L ∖ L²`, so
    /// the result is a certified lower bound for it.
    pub fn char_seq_estimate(&self, sample_count: usize, seed: u64) -> Result<(CharSeq, Vec<Rational>)> {
        let square = self.derived_square();
        let mut best: Option<(CharSeq, Vec<Rational>)> = None;
        let consider = |x: Vec<Rational>, best: &mut Option<(CharSeq, Vec<Rational>)>| -> Result<()> {
            let c = self.char_seq_at(&x)?;
            if best.as_ref().is_none_or(|(b, _)| c > *b) {
                *best = Some((c, x));
            }
            Ok(())
        };
        for i in 0..self.dim() {
            let x = self.unit_vector(i);
            if !in_span(&square, &x) {
                consider(x, &mut best)?;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < sample_count && attempts < 20 * sample_count + 20 {
            attempts += 1;
            let x: Vec<Rational> = (0..self.dim()).map(|_| rat(rng.gen_range(-5..=5))).collect();
            if in_span(&square, &x) {
                continue;
            }
            accepted += 1;
            consider(x, &mut best)?;
        }
        match best {
            Some(b) => Ok(b),
            // L = L² only for the zero algebra.
            None => Ok((CharSeq::new(vec![1; self.dim()]), vec![rat(0); self.dim()])),
        }
    }

    /// Dimensions of `L^i / L^{i+1}`.
    pub fn graded_dims(&self) -> Result<Vec<usize>> {
        let report = self.series(SeriesKind::LowerCentral);
        if report.index.is_none() {
            return Err(Error::NotNilpotent);
        }
        Ok(report.subspace_dims.windows(2).map(|w| w[0] - w[1]).collect())
    }

    /// A pair showing the bracket is not anticommutative, if there is one.
    pub fn non_lie_witness(&self) -> Option<NonLieWitness> {
        let n = self.dim();
        for i in 0..n {
            let sq = self.basis_bracket(i, i);
            if sq.iter().any(|c| !c.is_zero()) {
                return Some(NonLieWitness { x: i, y: i, value: sq });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let s: Vec<Rational> =
                    self.basis_bracket(i, j).iter().zip(self.basis_bracket(j, i)).map(|(a, b)| a + b).collect();
                if s.iter().any(|c| !c.is_zero()) {
                    return Some(NonLieWitness { x: i, y: j, value: s });
                }
            }
        }
        None
    }

    /// Human-readable form of a coordinate vector, e.g. `e2 + 3/2*f1`.
    pub fn format_vector(&self, v: &[Rational]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(
                |(i, c)| {
                    if *c == rat(1) {
                        self.basis_names[i].clone()
                    } else {
                        format!("{}*{}", c, self.basis_names[i])
                    }
                },
            )
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            dim: self.dim(),
            basis: self.basis_names.clone(),
            table: self
                .products()
                .flat_map(|(i, j, terms)| {
                    terms.iter().map(move |(k, c)| TableEntry { i: i + 1, j: j + 1, k: k + 1, c: format_rational(c) })
                })
                .collect(),
        }
    }

    pub fn from_json(json: &AlgebraJson) -> Result<Self> {
        if json.basis.len() != json.dim {
            return Err(Error::Parse(format!("basis has {} names for dimension {}", json.basis.len(), json.dim)));
        }
        let mut grouped: BTreeMap<(usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
        for e in &json.table {
            let in_range = |x: usize| (1..=json.dim).contains(&x);
            if !(in_range(e.i) && in_range(e.j) && in_range(e.k)) {
                return Err(Error::Parse(format!("table index out of 1..={}", json.dim)));
            }
            let c = parse_rational(&e.c)?;
            let slot = grouped.entry((e.i - 1, e.j - 1)).or_default();
            if slot.iter().any(|(k, _)| *k == e.k - 1) {
                return Err(Error::Parse(format!("duplicate output index {} in product ({}, {})", e.k, e.i, e.j)));
            }
            slot.push((e.k - 1, c));
        }
        let mut a = Self::new(json.basis.clone());
        for ((i, j), terms) in grouped {
            a.set_product(i, j, &terms)?;
        }
        Ok(a)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j, terms) in self.products() {
            let mut v = vec![rat(0); self.dim()];
            for (k, c) in terms {
                v[*k] = c.clone();
            }
            writeln!(f, "[{}, {}] = {}", self.basis_names[i], self.basis_names[j], self.format_vector(&v))?;
        }
        Ok(())
    }
}

/// One failing basis triple of the Leibniz identity (0-based indices).
#[derive(Clone, Debug, PartialEq)]
pub struct LeibnizViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub defect: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    LowerCentral,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    /// `dim L^1, dim L^2, …`, ending at 0 for nilpotent (solvable) input.
    pub subspace_dims: Vec<usize>,
    /// Minimal `p` with `L^p = 0`; `None` when the series stalls above 0.
    pub index: Option<usize>,
}

/// Descending Jordan block sizes of a nilpotent operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharSeq(Vec<usize>);

impl CharSeq {
    pub fn new(mut blocks: Vec<usize>) -> Self {
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        Self(blocks)
    }

    /// `(n − p, 1, …, 1)` with `p` ones.
    pub fn p_filiform(n: usize, p: usize) -> Self {
        let mut blocks = vec![n - p];
        blocks.extend(std::iter::repeat_n(1, p));
        Self(blocks)
    }

    /// Blocks from `ranks[j] = rank(R^j)`, `ranks[0] = dim`, ending at 0:
    /// the number of blocks of size `≥ j` is `ranks[j-1] − ranks[j]`.
    pub fn from_power_ranks(ranks: &[usize]) -> Self {
        let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
        let mut blocks = Vec::new();
        for (j, &count) in at_least.iter().enumerate() {
            let next = at_least.get(j + 1).copied().unwrap_or(0);
            blocks.extend(std::iter::repeat_n(j + 1, count - next));
        }
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl PartialOrd for CharSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CharSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for CharSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Basis pair `(x, y)` with `[x,x] ≠ 0` (when `x == y`) or `[x,y] + [y,x] ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonLieWitness {
    pub x: usize,
    pub y: usize,
    pub value: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub basis: Vec<String>,
    pub table: Vec<TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idempotent_bracket_fails_leibniz() {
        let mut a = Algebra::abelian(1);
        a.set_product(0, 0, &[(0, rat(1))]).unwrap();
        let v = a.leibniz_violations();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].i, v[0].j, v[0].k), (0, 0, 0));
    }

    #[test]
    fn abelian_series_and_grading() {
        let a = Algebra::abelian(3);
        let s = a.series(SeriesKind::LowerCentral);
        assert_eq!(s.subspace_dims, vec![3, 0]);
        assert_eq!(s.index, Some(2));
        assert_eq!(a.graded_dims().unwrap(), vec![3]);
    }

    #[test]
    fn zero_vector_gives_all_ones() {
        let a = Algebra::abelian(4);
        let c = a.char_seq_at(&[rat(0), rat(0), rat(0), rat(0)]).unwrap();
        assert_eq!(c.blocks(), &[1, 1, 1, 1]);
        let (est, _) = Algebra::abelian(2).char_seq_estimate(10, 1).unwrap();
        assert_eq!(est.blocks(), &[1, 1]);
    }

    #[test]
    fn non_nilpotent_operator_is_rejected() {
        let mut a = Algebra::abelian(1);
        a.set_product(0, 0, &[(0, rat(1))]).unwrap();
        assert!(matches!(a.char_seq_at(&[rat(1)]), Err(Error::NotNilpotent)));
        assert_eq!(a.series(SeriesKind::LowerCentral).index, None);
        assert!(a.graded_dims().is_err());
    }

    #[test]
    fn bracket_rejects_wrong_length() {
        let a = Algebra::abelian(3);
        assert!(matches!(a.bracket(&[rat(1)], &[rat(1)]), Err(Error::Shape(_))));
    }

    #[test]
    fn set_product_merges_and_drops_zeros() {
        let mut a = Algebra::abelian(3);
        a.set_product(0, 1, &[(2, rat(1)), (2, rat(-1))]).unwrap();
        assert!(a.product(0, 1).is_empty());
        assert!(a.set_product(0, 3, &[]).is_err());
    }

    #[test]
    fn json_rejects_duplicates_and_bad_indices() {
        let dup = r#"{"dim":2,"basis":["a","b"],"table":[{"i":1,"j":1,"k":2,"c":"1"},{"i":1,"j":1,"k":2,"c":"2"}]}"#;
        assert!(Algebra::from_json_str(dup).is_err());
        let oob = r#"{"dim":2,"basis":["a","b"],"table":[{"i":3,"j":1,"k":2,"c":"1"}]}"#;
        assert!(Algebra::from_json_str(oob).is_err());
    }

    #[test]
    fn char_seq_from_ranks() {
        // Nilpotent ranks 6,3,2,1,0: blocks (4,1,1).
        assert_eq!(CharSeq::from_power_ranks(&[6, 3, 2, 1, 0]).blocks(), &[4, 1, 1]);
        assert!(CharSeq::new(vec![4, 1, 1]) > CharSeq::new(vec![3, 2, 1]));
    }
}
