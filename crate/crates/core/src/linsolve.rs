//! Exact sparse linear systems over the rationals.
//!
//! Rows are reduced incrementally into an echelon basis whose pivot in each
//! row is its lowest column index. Free variables are set to zero, so a
//! solution supported on low-index columns is returned whenever one exists.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::laurent::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    ncols: usize,
    rows: Vec<(SparseRow, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<Rational>,
    pub rank: usize,
    pub components: usize,
}

impl LinearSystem {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, mut coeffs: SparseRow, rhs: Rational) {
        coeffs.retain(|_, c| !c.is_zero());
        debug_assert!(coeffs.keys().all(|&c| c < self.ncols));
        self.rows.push((coeffs, rhs));
    }

    /// Solves the system; `None` if inconsistent. Rows are split into
    /// independent blocks (connected through shared columns) first.
    pub fn solve(&self) -> Option<Solution> {
        let mut uf = UnionFind::new(self.ncols);
        for (row, rhs) in &self.rows {
            let mut cols = row.keys();
            match cols.next() {
                None if !rhs.is_zero() => return None,
                None => {}
                Some(&first) => {
                    for &c in cols {
                        uf.union(first, c);
                    }
                }
            }
        }

        let mut blocks: BTreeMap<usize, Vec<&(SparseRow, Rational)>> = BTreeMap::new();
        for entry in &self.rows {
            if let Some(&first) = entry.0.keys().next() {
                blocks.entry(uf.find(first)).or_default().push(entry);
            }
        }

        let mut values = vec![Rational::zero(); self.ncols];
        let mut rank = 0;
        for rows in blocks.values() {
            let pivots = eliminate(rows.iter().copied())?;
            rank += pivots.len();
            back_substitute(&pivots, &mut values);
        }
        Some(Solution {
            values,
            rank,
            components: blocks.len(),
        })
    }
}

type Pivots = BTreeMap<usize, (SparseRow, Rational)>;

fn eliminate<'a>(rows: impl Iterator<Item = &'a (SparseRow, Rational)>) -> Option<Pivots> {
    let mut pivots: Pivots = BTreeMap::new();
    for (row, rhs) in rows {
        let mut row = row.clone();
        let mut rhs = rhs.clone();
        let mut cursor = 0usize;
        loop {
            let next = row
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| pivots.contains_key(c));
            let Some(col) = next else { break };
            let factor = row.remove(&col).expect("column present");
            let (prow, prhs) = &pivots[&col];
            for (&c, a) in prow {
                if c == col {
                    continue;
                }
                let entry = row.entry(c).or_insert_with(Rational::zero);
                *entry -= &factor * a;
                if entry.is_zero() {
                    row.remove(&c);
                }
            }
            rhs -= &factor * prhs;
            cursor = col + 1;
        }
        let Some((&pivot, lead)) = row.iter().next() else {
            if rhs.is_zero() {
                continue;
            }
            return None;
        };
        let inv = Rational::one() / lead;
        for a in row.values_mut() {
            *a *= &inv;
        }
        rhs *= &inv;
        pivots.insert(pivot, (row, rhs));
    }
    Some(pivots)
}

fn back_substitute(pivots: &Pivots, values: &mut [Rational]) {
    for (&p, (row, rhs)) in pivots.iter().rev() {
        let mut x = rhs.clone();
        for (&c, a) in row {
            if c != p && !values[c].is_zero() {
                x -= a * &values[c];
            }
        }
        values[p] = x;
    }
}

/// Solves a square system with a unique solution; `None` if singular or
/// inconsistent.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first().map_or(0, Vec::len);
    let mut sys = LinearSystem::new(n);
    for (row, rhs) in a.iter().zip(b) {
        sys.push_row(row.iter().cloned().enumerate().collect(), rhs.clone());
    }
    let sol = sys.solve()?;
    (sol.rank == n).then_some(sol.values)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
