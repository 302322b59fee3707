//! Exact scalars.
//!
//! [`Rational`] is the working field for every structure constant and
//! matrix entry. [`RadicalScalar`] extends it by a single real radical
//! `q^(1/d)`, which is all the certificate solver ever needs: the only
//! nonlinear unknowns in the automorphism parametrizations are powers of
//! one or two diagonal scalars.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3"`, `"-3/4"`, `"0.125"` or `"-2.5e-3"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not an exact rational: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    let power = pow_rational(&ten, shift.unsigned_abs());
    if shift >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Ok(if negative { -value } else { value })
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

fn pow_rational(base: &Rational, exp: u64) -> Rational {
    let mut acc = rat(1);
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// Commutative ring operations shared by every scalar type the algebra
/// builders are instantiated with.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;

    fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

/// A [`Scalar`] with multiplicative inverses for nonzero elements.
pub trait Field: Scalar {
    fn inv(&self) -> Option<Self>;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn pow(&self, exp: u32) -> Self {
        pow_rational(self, exp as u64)
    }
}

impl Field for Rational {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// The field `Q(α)` with `α = radicand^(1/degree) > 0` and `x^degree − radicand`
/// irreducible over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalField {
    radicand: Rational,
    degree: u32,
}

impl RadicalField {
    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// Why a real radical could not be formed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootError {
    /// Even root of a negative rational; only real radicals are supported.
    NegativeRadicand,
}

/// Exact element of `Q` or of a single radical extension `Q(q^(1/d))`,
/// stored as `Σ coeffs[i] · α^i`.
///
/// Elements of two different nontrivial radical fields never meet inside
/// one computation; combining them panics.
#[derive(Clone, Debug)]
pub struct RadicalScalar {
    field: Option<Arc<RadicalField>>,
    coeffs: Vec<Rational>,
}

impl RadicalScalar {
    pub fn rational(r: Rational) -> Self {
        Self { field: None, coeffs: vec![r] }
    }

    /// The real `degree`-th root of `q` (the positive one for even degree).
    ///
    /// The radical is reduced so that the defining polynomial is
    /// irreducible: `8^(1/6)` becomes `2^(1/2)`, `16/81^(1/4)` becomes `2/3`.
    pub fn real_root(q: &Rational, degree: u32) -> Result<Self, RootError> {
        assert!(degree >= 1, "root degree must be positive");
        if Zero::is_zero(q) {
            return Ok(Self::rational(rat(0)));
        }
        if q.is_negative() && degree.is_multiple_of(2) {
            return Err(RootError::NegativeRadicand);
        }
        let sign = if q.is_negative() { -rat(1) } else { rat(1) };
        let magnitude = q.abs();
        // Largest e | degree with magnitude a perfect e-th power.
        let mut best = (1u32, magnitude.clone());
        for e in (2..=degree).rev() {
            if degree.is_multiple_of(e) {
                if let Some(root) = exact_root(&magnitude, e) {
                    best = (e, root);
                    break;
                }
            }
        }
        let (e, base) = best;
        let reduced = degree / e;
        if reduced == 1 {
            return Ok(Self::rational(sign * base));
        }
        let field = Arc::new(RadicalField { radicand: base, degree: reduced });
        let mut coeffs = vec![rat(0); reduced as usize];
        coeffs[1] = sign;
        Ok(Self { field: Some(field), coeffs })
    }

    /// `base · radicand^(power/degree)`.
    pub fn monomial(base: &Rational, radicand: &Rational, degree: u32, power: u32) -> Result<Self, RootError> {
        let root = Self::real_root(radicand, degree)?;
        Ok(Self::rational(base.clone()) * root.pow(power))
    }

    pub fn field(&self) -> Option<&RadicalField> {
        self.field.as_deref()
    }

    /// Coefficients on `1, α, α², …`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.field.is_none() {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn normalized(mut self) -> Self {
        if self.field.is_some() && self.coeffs[1..].iter().all(Zero::is_zero) {
            self.field = None;
            self.coeffs.truncate(1);
        }
        self
    }

    fn common_field(a: &Self, b: &Self) -> Option<Arc<RadicalField>> {
        match (&a.field, &b.field) {
            (None, None) => None,
            (Some(f), None) | (None, Some(f)) => Some(f.clone()),
            (Some(f), Some(g)) => {
                assert!(Arc::ptr_eq(f, g) || f == g, "mixed radical fields: {f:?} and {g:?}");
                Some(f.clone())
            }
        }
    }

    fn widened(&self, field: &Option<Arc<RadicalField>>) -> Vec<Rational> {
        let width = field.as_ref().map_or(1, |f| f.degree as usize);
        let mut out = self.coeffs.clone();
        out.resize(width, rat(0));
        out
    }

    /// Fixed-point value `round(self · 10^digits)`.
    pub fn fixed_point(&self, digits: u32) -> BigInt {
        let scale = BigInt::from(10).pow(digits);
        let Some(field) = &self.field else {
            return round_div(&(self.coeffs[0].numer() * &scale), self.coeffs[0].denom());
        };
        // Guard digits absorb the truncation error of α and its powers.
        let guard = 20 + 2 * field.degree;
        let work = digits + guard;
        let work_scale = BigInt::from(10).pow(work);
        let alpha = fixed_root(&field.radicand, field.degree, work);
        let mut power = work_scale.clone();
        let mut acc = BigInt::zero();
        for c in &self.coeffs {
            if !Zero::is_zero(c) {
                acc += round_div(&(c.numer() * &power), c.denom());
            }
            power = &power * &alpha / &work_scale;
        }
        round_div(&acc, &BigInt::from(10).pow(guard))
    }

    /// Decimal evaluation with at least `significant` significant digits.
    pub fn to_decimal(&self, significant: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut digits = significant + 10;
        loop {
            let v = self.fixed_point(digits);
            let len = v.abs().to_string().len() as u32;
            if len > significant {
                return format_fixed(&v, digits);
            }
            digits += significant;
        }
    }

    /// Exact value as an `f64`, for display only.
    pub fn to_f64(&self) -> f64 {
        let v = self.fixed_point(30);
        v.to_f64().unwrap_or(f64::NAN) / 1e30
    }
}

fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    if (r * 2u32).abs() >= den.abs() {
        q + 1
    } else {
        q
    }
}

/// `floor(q^(1/d) · 10^digits)` for `q > 0`.
fn fixed_root(q: &Rational, degree: u32, digits: u32) -> BigInt {
    let scaled = q.numer() * BigInt::from(10).pow(digits * degree) / q.denom();
    scaled.nth_root(degree)
}

fn exact_root(q: &Rational, e: u32) -> Option<Rational> {
    let n = q.numer().nth_root(e);
    let d = q.denom().nth_root(e);
    if n.pow(e) == *q.numer() && d.pow(e) == *q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

fn format_fixed(v: &BigInt, digits: u32) -> String {
    let negative = v.sign() == Sign::Minus;
    let mut s = v.abs().to_string();
    let d = digits as usize;
    if s.len() <= d {
        s = format!("{}{}", "0".repeat(d + 1 - s.len()), s);
    }
    let (int_part, frac_part) = s.split_at(s.len() - d);
    let frac_part = frac_part.trim_end_matches('0');
    let body = if frac_part.is_empty() { int_part.to_string() } else { format!("{int_part}.{frac_part}") };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

impl PartialEq for RadicalScalar {
    fn eq(&self, other: &Self) -> bool {
        let field = Self::common_field(self, other);
        self.widened(&field) == other.widened(&field)
    }
}

impl fmt::Display for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(field) = &self.field else {
            return write!(f, "{}", self.coeffs[0]);
        };
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*({})^(1/{})", field.radicand, field.degree)?,
                _ => write!(f, "({c})*({})^({i}/{})", field.radicand, field.degree)?,
            }
        }
        Ok(())
    }
}

impl Add for RadicalScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let field = Self::common_field(&self, &rhs);
        let coeffs = self.widened(&field).into_iter().zip(rhs.widened(&field)).map(|(a, b)| a + b).collect();
        Self { field, coeffs }.normalized()
    }
}

impl Sub for RadicalScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for RadicalScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self { field: self.field, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Mul for RadicalScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let field = Self::common_field(&self, &rhs);
        let Some(f) = &field else {
            return Self::rational(&self.coeffs[0] * &rhs.coeffs[0]);
        };
        let d = f.degree as usize;
        let mut out = vec![rat(0); d];
        for (i, a) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if Zero::is_zero(b) {
                    continue;
                }
                let term = a * b;
                if i + j >= d {
                    out[i + j - d] += term * &f.radicand;
                } else {
                    out[i + j] += term;
                }
            }
        }
        Self { field, coeffs: out }.normalized()
    }
}

impl Scalar for RadicalScalar {
    fn zero() -> Self {
        Self::rational(rat(0))
    }
    fn one() -> Self {
        Self::rational(rat(1))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
    fn from_rational(r: &Rational) -> Self {
        Self::rational(r.clone())
    }
    fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Field for RadicalScalar {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let Some(f) = &self.field else {
            return Some(Self::rational(self.coeffs[0].recip()));
        };
        let d = f.degree as usize;
        let support: Vec<usize> = (0..d).filter(|&i| !Zero::is_zero(&self.coeffs[i])).collect();
        if let [j] = support[..] {
            // (c α^j)^(-1) = c^(-1) q^(-1) α^(d-j)
            let mut coeffs = vec![rat(0); d];
            if j == 0 {
                coeffs[0] = self.coeffs[0].recip();
            } else {
                coeffs[d - j] = (&self.coeffs[j] * &f.radicand).recip();
            }
            return Some(Self { field: self.field.clone(), coeffs }.normalized());
        }
        // Solve (multiplication by self) · y = 1 in the power basis.
        let mut columns = Vec::with_capacity(d);
        let mut basis = vec![rat(0); d];
        basis[0] = rat(1);
        let alpha = {
            let mut c = vec![rat(0); d];
            c[1] = rat(1);
            Self { field: self.field.clone(), coeffs: c }
        };
        let mut power = Self { field: self.field.clone(), coeffs: basis };
        for _ in 0..d {
            let col = self.clone() * power.clone();
            columns.push(col.widened(&self.field));
            power = power * alpha.clone();
        }
        let mut system = crate::matrix::Matrix::<Rational>::zeros(d, d);
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                system.set(r, c, v.clone());
            }
        }
        let inverse = system.inverse()?;
        let coeffs = (0..d).map(|r| inverse.get(r, 0).clone()).collect();
        Some(Self { field: self.field.clone(), coeffs }.normalized())
    }
}
