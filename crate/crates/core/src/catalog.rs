//! The three families and their structural expectations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, CharSeq, NonLieWitness, SeriesKind};
use crate::error::{Error, Result};
use crate::scalar::{rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Mu1,
    Mu2,
    Mu3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Mu1, Family::Mu2, Family::Mu3];

    pub fn name(self) -> &'static str {
        match self {
            Family::Mu1 => "mu1",
            Family::Mu2 => "mu2",
            Family::Mu3 => "mu3",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mu1" | "μ1" => Ok(Family::Mu1),
            "mu2" | "μ2" => Ok(Family::Mu2),
            "mu3" | "μ3" => Ok(Family::Mu3),
            other => Err(Error::Parse(format!("unknown family `{other}` (expected mu1, mu2 or mu3)"))),
        }
    }
}

/// A family member `(family, n, k)`; only admissible values can be built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::Inadmissible(format!("k = {k} violates k ≥ 1")));
        }
        if n < 2 * k + 4 {
            return Err(Error::Inadmissible(format!(
                "n = {n}, k = {k} violates n ≥ 2k+4 (n−2k = {} < 4)",
                n as i64 - 2 * k as i64
            )));
        }
        Ok(Self { family, n, k })
    }

    /// `p` of the characteristic sequence `(n−p, 1, …, 1)`.
    pub fn p(&self) -> usize {
        match self.family {
            Family::Mu1 | Family::Mu2 => 2 * self.k,
            Family::Mu3 => 2 * self.k + 1,
        }
    }

    pub fn e_count(&self) -> usize {
        self.n - 2 * self.k
    }

    pub fn f_count(&self) -> usize {
        2 * self.k
    }

    /// 0-based index of `e_i` (1-based `i`).
    pub fn e(&self, i: usize) -> usize {
        debug_assert!((1..=self.e_count()).contains(&i));
        i - 1
    }

    /// 0-based index of `f_j` (1-based `j`).
    pub fn f(&self, j: usize) -> usize {
        debug_assert!((1..=self.f_count()).contains(&j));
        self.e_count() + j - 1
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.family == Family::Mu3 && self.n - self.p() < 4 {
            w.push(format!(
                "mu3 with n = {}, k = {}: n−p = {} < 4, below the range of the classification",
                self.n,
                self.k,
                self.n - self.p()
            ));
        }
        w
    }

    pub fn expected_char_seq(&self) -> CharSeq {
        CharSeq::p_filiform(self.n, self.p())
    }

    pub fn expected_nilindex(&self) -> usize {
        match self.family {
            Family::Mu1 | Family::Mu2 => self.e_count() + 1,
            Family::Mu3 => self.e_count(),
        }
    }

    pub fn expected_graded_dims(&self) -> Vec<usize> {
        let (first, len) = match self.family {
            Family::Mu1 | Family::Mu2 => (self.k + 1, self.e_count()),
            Family::Mu3 => (self.k + 2, self.e_count() - 1),
        };
        let mut dims = vec![first, self.k + 1];
        dims.resize(len, 1);
        dims
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}, k={})", self.family, self.n, self.k)
    }
}

/// All admissible `(n, k)` with `n ≤ nmax`, `k ≤ kmax`, ordered by `(family, n, k)`.
pub fn admissible_grid(families: &[Family], nmax: usize, kmax: usize) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    let mut families = families.to_vec();
    families.sort();
    families.dedup();
    for family in families {
        for n in 6..=nmax {
            for k in 1..=kmax {
                if let Ok(spec) = FamilySpec::new(family, n, k) {
                    out.push(spec);
                }
            }
        }
    }
    out
}

pub fn build(spec: &FamilySpec) -> Algebra {
    let m = spec.e_count();
    let k = spec.k;
    let mut names: Vec<String> = (1..=m).map(|i| format!("e{i}")).collect();
    names.extend((1..=2 * k).map(|j| format!("f{j}")));
    let mut a = Algebra::new(names);
    let one = rat(1);
    let mut set = |i: usize, j: usize, terms: Vec<(usize, Rational)>| {
        a.set_product(i, j, &terms).expect("indices in range");
    };
    let (e, f) = (|i| spec.e(i), |j| spec.f(j));
    match spec.family {
        Family::Mu1 => {
            for i in 1..m {
                set(e(i), e(1), vec![(e(i + 1), one.clone())]);
            }
            for j in 1..=k {
                set(e(1), f(j), vec![(f(k + j), one.clone())]);
            }
        }
        Family::Mu2 => {
            for i in 1..m {
                set(e(i), e(1), vec![(e(i + 1), one.clone())]);
            }
            set(e(1), f(1), vec![(e(2), one.clone()), (f(k + 1), one.clone())]);
            for i in 2..m {
                set(e(i), f(1), vec![(e(i + 1), one.clone())]);
            }
            for j in 2..=k {
                set(e(1), f(j), vec![(f(k + j), one.clone())]);
            }
        }
        Family::Mu3 => {
            set(e(1), e(1), vec![(e(3), one.clone())]);
            for i in 2..m {
                set(e(i), e(1), vec![(e(i + 1), one.clone())]);
            }
            for j in 1..=k {
                set(e(1), f(j), vec![(f(k + j), one.clone())]);
                set(e(2), f(j), vec![(f(k + j), one.clone())]);
            }
        }
    }
    a
}

/// Basis indices generating the algebra.
pub fn generators(spec: &FamilySpec) -> Vec<usize> {
    let mut g = vec![spec.e(1)];
    if spec.family == Family::Mu3 {
        g.push(spec.e(2));
    }
    g.extend((1..=spec.k).map(|j| spec.f(j)));
    g
}

/// The catalog member whose table coincides with `a`, if any.
pub fn identify(a: &Algebra) -> Option<FamilySpec> {
    let n = a.dim();
    for family in Family::ALL {
        for k in 1..=n / 2 {
            if let Ok(spec) = FamilySpec::new(family, n, k) {
                if build(&spec).products().eq(a.products()) {
                    return Some(spec);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub spec: FamilySpec,
    pub leibniz_violations: usize,
    pub nilindex: Option<usize>,
    pub expected_nilindex: usize,
    pub char_seq_e1: Option<CharSeq>,
    pub expected_char_seq: CharSeq,
    pub graded_dims: Option<Vec<usize>>,
    pub expected_graded_dims: Vec<usize>,
    pub non_lie: Option<NonLieWitness>,
    pub warnings: Vec<String>,
}

impl FamilyReport {
    pub fn ok(&self) -> bool {
        self.leibniz_violations == 0
            && self.nilindex == Some(self.expected_nilindex)
            && self.char_seq_e1.as_ref() == Some(&self.expected_char_seq)
            && self.graded_dims.as_ref() == Some(&self.expected_graded_dims)
            && self.non_lie.is_some()
    }
}

pub fn validate_family(a: &Algebra, spec: &FamilySpec) -> FamilyReport {
    let e1 = a.unit_vector(spec.e(1));
    FamilyReport {
        spec: *spec,
        leibniz_violations: a.leibniz_violations().len(),
        nilindex: a.series(SeriesKind::LowerCentral).index,
        expected_nilindex: spec.expected_nilindex(),
        char_seq_e1: a.char_seq_at(&e1).ok(),
        expected_char_seq: spec.expected_char_seq(),
        graded_dims: a.graded_dims().ok(),
        expected_graded_dims: spec.expected_graded_dims(),
        non_lie: a.non_lie_witness(),
        warnings: spec.warnings(),
    }
}
