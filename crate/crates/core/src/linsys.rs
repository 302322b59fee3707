//! Incremental sparse elimination over an exact field.
//!
//! Equations are fed one at a time; each is reduced against the pivots
//! collected so far, so the first equation that contradicts its
//! predecessors is identified exactly.

use std::collections::BTreeMap;

use crate::scalar::Field;

/// Outcome of adding one equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Push {
    Independent,
    Redundant,
    Inconsistent,
}

#[derive(Clone, Debug)]
struct PivotRow<K> {
    var: usize,
    others: Vec<(usize, K)>,
    rhs: K,
}

/// Row-echelon accumulator for `Σ coef · x_var = rhs` equations.
#[derive(Clone, Debug)]
pub struct IncrementalSolver<K> {
    nvars: usize,
    pivot_of: Vec<Option<usize>>,
    rows: Vec<PivotRow<K>>,
}

impl<K: Field> IncrementalSolver<K> {
    pub fn new(nvars: usize) -> Self {
        Self { nvars, pivot_of: vec![None; nvars], rows: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, var: usize) -> bool {
        self.pivot_of[var].is_some()
    }

    pub fn push(&mut self, terms: impl IntoIterator<Item = (usize, K)>, rhs: K) -> Push {
        let mut work: BTreeMap<usize, K> = BTreeMap::new();
        for (v, c) in terms {
            if c.is_zero() {
                continue;
            }
            let entry = work.entry(v).or_insert_with(K::zero);
            *entry = entry.clone() + c;
            if entry.is_zero() {
                work.remove(&v);
            }
        }
        let mut rhs = rhs;
        // Eliminate pivots oldest-first; a pivot row only mentions variables
        // that became pivots after it, so this terminates.
        while let Some((var, idx)) =
            work.keys().filter_map(|&v| self.pivot_of[v].map(|i| (v, i))).min_by_key(|&(_, i)| i)
        {
            let coef = work.remove(&var).expect("present");
            let row = &self.rows[idx];
            for (v, o) in &row.others {
                let entry = work.entry(*v).or_insert_with(K::zero);
                *entry = entry.clone() - coef.clone() * o.clone();
                if entry.is_zero() {
                    work.remove(v);
                }
            }
            rhs = rhs - coef * row.rhs.clone();
        }
        let Some((&var, lead)) = work.iter().next() else {
            return if rhs.is_zero() { Push::Redundant } else { Push::Inconsistent };
        };
        let inv = lead.inv().expect("nonzero leading coefficient");
        let others = work.iter().skip(1).map(|(v, c)| (*v, c.clone() * inv.clone())).collect();
        self.pivot_of[var] = Some(self.rows.len());
        self.rows.push(PivotRow { var, others, rhs: rhs * inv });
        Push::Independent
    }

    /// A solution with every free variable set by `free`.
    pub fn solve(&self, free: impl Fn(usize) -> K) -> Vec<K> {
        self.back_substitute(&free, true)
    }

    /// Basis of the solution space of the homogeneous system.
    pub fn kernel_basis(&self) -> Vec<Vec<K>> {
        (0..self.nvars)
            .filter(|&v| self.pivot_of[v].is_none())
            .map(|f| self.back_substitute(&|v| if v == f { K::one() } else { K::zero() }, false))
            .collect()
    }

    fn back_substitute(&self, free: &dyn Fn(usize) -> K, with_rhs: bool) -> Vec<K> {
        let mut x: Vec<K> =
            (0..self.nvars).map(|v| if self.pivot_of[v].is_none() { free(v) } else { K::zero() }).collect();
        for row in self.rows.iter().rev() {
            let mut value = if with_rhs { row.rhs.clone() } else { K::zero() };
            for (v, o) in &row.others {
                if !x[*v].is_zero() {
                    value = value - o.clone() * x[*v].clone();
                }
            }
            x[row.var] = value;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn detects_first_inconsistency() {
        let mut s = IncrementalSolver::<Rational>::new(2);
        assert_eq!(s.push([(0, rat(1)), (1, rat(1))], rat(3)), Push::Independent);
        assert_eq!(s.push([(0, rat(2)), (1, rat(2))], rat(6)), Push::Redundant);
        assert_eq!(s.push([(0, rat(1)), (1, rat(1))], rat(4)), Push::Inconsistent);
        assert_eq!(s.push([(0, rat(1)), (1, rat(-1))], rat(1)), Push::Independent);
        assert_eq!(s.solve(|_| rat(0)), vec![rat(2), rat(1)]);
    }

    #[test]
    fn kernel_of_underdetermined_system() {
        let mut s = IncrementalSolver::<Rational>::new(3);
        s.push([(0, rat(1)), (2, rat(-1))], rat(0));
        let k = s.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(v[0].clone() - v[2].clone(), rat(0));
        }
    }

    #[test]
    fn later_pivots_resolve_first() {
        let mut s = IncrementalSolver::<Rational>::new(3);
        s.push([(0, rat(1)), (1, rat(1)), (2, rat(1))], rat(6));
        s.push([(1, rat(1)), (2, rat(-1))], rat(-1));
        s.push([(2, rat(2))], rat(6));
        assert_eq!(s.solve(|_| rat(0)), vec![rat(1), rat(2), rat(3)]);
    }
}
