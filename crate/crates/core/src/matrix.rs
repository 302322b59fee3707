//! Dense exact matrices.
//!
//! Rank and kernel computations run fraction-free (Bareiss) elimination on
//! integer rows, so intermediate entries stay integral and bounded by the
//! minors of the input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{rat, Field, Rational, Scalar};

/// Row-major `rows × cols` matrix. Indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T = Rational> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// The matrix unit with a single 1 at `(row, col)`.
    pub fn unit(rows: usize, cols: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.set(row, col, T::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(T::is_zero)
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i / self.cols, i % self.cols, v))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} for {}x{} matrix", v.len(), self.rows, self.cols)));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("addition of differently shaped matrices".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }
}

impl<T: Field> Matrix<T> {
    /// Determinant by Gaussian elimination over the field.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.to_rows();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                return Ok(T::zero());
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            let pivot = m[c][c].clone();
            det = det * pivot.clone();
            let inv = pivot.inv().expect("nonzero pivot");
            for r in c + 1..n {
                if m[r][c].is_zero() {
                    continue;
                }
                let factor = m[r][c].clone() * inv.clone();
                for j in c..n {
                    let v = m[r][j].clone() - factor.clone() * m[c][j].clone();
                    m[r][j] = v;
                }
            }
        }
        Ok(det)
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Self::identity(n).to_rows();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(p, c);
            inv.swap(p, c);
            let pinv = a[c][c].inv()?;
            for j in 0..n {
                a[c][j] = a[c][j].clone() * pinv.clone();
                inv[c][j] = inv[c][j].clone() * pinv.clone();
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let factor = a[r][c].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].clone() - factor.clone() * a[c][j].clone();
                    inv[r][j] = inv[r][j].clone() - factor.clone() * inv[c][j].clone();
                }
            }
        }
        Some(Self { rows: n, cols: n, entries: inv.into_iter().flatten().collect() })
    }
}

/// Integer row-echelon form produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    swaps: usize,
}

fn integer_rows(m: &Matrix<Rational>) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|r| {
            let row = m.row(r);
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect()
}

fn bareiss(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let n = rows.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| rows[i][c].abs()) else {
            continue;
        };
        if p != r {
            rows.swap(p, r);
            swaps += 1;
        }
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        // Rows below the pivot were scaled by the pivot; later rows that
        // skipped elimination in earlier columns stay exact because every
        // entry is a minor of the original matrix.
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    Echelon { rows, pivots, swaps }
}

impl Matrix<Rational> {
    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        bareiss(integer_rows(self), self.cols).pivots.len()
    }

    /// Exact null-space basis, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        if self.rows == 0 {
            return (0..self.cols)
                .map(|i| {
                    let mut v = vec![rat(0); self.cols];
                    v[i] = rat(1);
                    v
                })
                .collect();
        }
        let ech = bareiss(integer_rows(self), self.cols);
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![rat(0); self.cols];
                x[f] = rat(1);
                for (r, &pc) in ech.pivots.iter().enumerate().rev() {
                    let row = &ech.rows[r];
                    let s = (pc + 1..self.cols)
                        .filter(|&j| !row[j].is_zero() && !Zero::is_zero(&x[j]))
                        .fold(rat(0), |acc, j| acc + Rational::from_integer(row[j].clone()) * &x[j]);
                    x[pc] = -s / Rational::from_integer(row[pc].clone());
                }
                x
            })
            .collect()
    }

    /// Determinant via the fraction-free elimination.
    pub fn det_exact(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(rat(1));
        }
        let scale =
            (0..n).fold(BigInt::one(), |acc, r| acc * self.row(r).iter().fold(BigInt::one(), |l, v| l.lcm(v.denom())));
        let ech = bareiss(integer_rows(self), n);
        if ech.pivots.len() < n {
            return Ok(rat(0));
        }
        let mut det = Rational::new(ech.rows[n - 1][n - 1].clone(), scale);
        if ech.swaps % 2 == 1 {
            det = -det;
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

/// JSON form of a rational matrix with exact entries as strings.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl Matrix<Rational> {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows().iter().map(|r| r.iter().map(crate::scalar::format_rational).collect()).collect(),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(Error::Parse(format!("entries do not form a {}x{} matrix", j.rows, j.cols)));
        }
        let rows = j
            .entries
            .iter()
            .map(|r| r.iter().map(|s| crate::scalar::parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut m = Self::zeros(j.rows, j.cols);
        for (r, row) in rows.into_iter().enumerate() {
            for (c, v) in row.into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        Ok(m)
    }
}

/// Reduced basis of the span of `vectors` (all of equal length `dim`).
pub fn span_basis(vectors: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix { rows: vectors.len(), cols: dim, entries: vectors.concat() };
    let ech = bareiss(integer_rows(&m), dim);
    ech.rows
        .into_iter()
        .take(ech.pivots.len())
        .map(|row| row.into_iter().map(Rational::from_integer).collect())
        .collect()
}

/// Whether `v` lies in the span of the rows of `basis`.
pub fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    let mut rows = basis.to_vec();
    rows.push(v.to_vec());
    span_basis(&rows, v.len()).len() == span_basis(basis, v.len()).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_squared() {
        let i3 = Matrix::<Rational>::identity(3);
        assert_eq!(i3.mul(&i3).unwrap(), i3);
    }

    #[test]
    fn matrix_units_chain() {
        let e12 = Matrix::<Rational>::unit(3, 3, 0, 1);
        let e23 = Matrix::<Rational>::unit(3, 3, 1, 2);
        assert_eq!(e12.mul(&e23).unwrap(), Matrix::unit(3, 3, 0, 2));
        assert!(e23.mul(&e12).unwrap().is_zero());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = Matrix::<Rational>::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::Shape(_))));
    }

    #[test]
    fn rank_of_basics() {
        assert_eq!(Matrix::<Rational>::zeros(3, 3).rank(), 0);
        assert_eq!(Matrix::<Rational>::identity(5).rank(), 5);
        assert_eq!(m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]).rank(), 2);
    }

    #[test]
    fn rank_with_skipped_columns() {
        // Second column is dependent, so the elimination skips it.
        let a = m(&[&[2, 4, 1, 3], &[1, 2, 5, 7], &[3, 6, 2, 1]]);
        assert_eq!(a.rank(), 3);
        for v in a.kernel_basis() {
            assert!(a.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn kernel_sizes() {
        assert!(Matrix::<Rational>::identity(3).kernel_basis().is_empty());
        let k = Matrix::<Rational>::zeros(2, 2).kernel_basis();
        assert_eq!(k, vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]);
    }

    #[test]
    fn det_routes_agree() {
        let a = Matrix::from_rows(vec![
            vec![frac(1, 2), rat(3), rat(0)],
            vec![rat(2), frac(-1, 3), rat(5)],
            vec![rat(0), rat(4), frac(7, 5)],
        ])
        .unwrap();
        assert_eq!(a.det_exact().unwrap(), a.det().unwrap());
        let swapped = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(swapped.det_exact().unwrap(), rat(-1));
    }

    #[test]
    fn span_membership() {
        let basis = span_basis(&[vec![rat(1), rat(1), rat(0)], vec![rat(2), rat(2), rat(0)]], 3);
        assert_eq!(basis.len(), 1);
        assert!(in_span(&basis, &[rat(3), rat(3), rat(0)]));
        assert!(!in_span(&basis, &[rat(1), rat(0), rat(0)]));
    }
}
