//! Square matrices over the Laurent ring.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Rational};
use crate::lattice::LatticeVector;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentMatrix {
    size: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zero(size: usize) -> Self {
        Self {
            size,
            entries: vec![LaurentPoly::zero(); size * size],
        }
    }

    /// Identity; `rank` is the lattice rank of the exponent of `1`.
    pub fn identity(size: usize, rank: usize) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.entries[i * size + i] = LaurentPoly::one(rank);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(Error::Dimension {
                    expected: size,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { size, entries })
    }

    pub fn diagonal(diag: Vec<LaurentPoly>) -> Self {
        let size = diag.len();
        let mut m = Self::zero(size);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * size + i] = d;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: LaurentPoly) {
        self.entries[i * self.size + j] = value;
    }

    pub fn entries(&self) -> impl Iterator<Item = &LaurentPoly> {
        self.entries.iter()
    }

    pub fn rows(&self) -> Vec<Vec<LaurentPoly>> {
        self.entries.chunks(self.size.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<LaurentPoly> {
        (0..self.size).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_constant)
    }

    pub fn has_rank(&self, rank: usize) -> bool {
        self.entries.iter().all(|e| e.has_rank(rank))
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.size != other.size {
            return Err(Error::Dimension {
                expected: self.size,
                found: other.size,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        Ok(Self {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        Ok(Self {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let n = self.size;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// Entrywise `delta_v`.
    pub fn delta(&self, v: &LatticeVector) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|a| a.delta(v)).collect(),
        }
    }

    /// Cofactor expansion along the first row. Fine for the small ranks this
    /// crate targets; cost grows factorially.
    pub fn determinant(&self) -> LaurentPoly {
        let all: Vec<usize> = (0..self.size).collect();
        self.minor_det(0, &all)
    }

    fn minor_det(&self, row: usize, cols: &[usize]) -> LaurentPoly {
        if cols.is_empty() {
            // Empty product; the exponent rank is taken from any entry.
            let rank = self.entries.iter().find_map(LaurentPoly::exponent_rank).unwrap_or(0);
            return LaurentPoly::one(rank);
        }
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut det = LaurentPoly::zero();
        for (pos, &c) in cols.iter().enumerate() {
            let a = self.get(row, c);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = a * &self.minor_det(row + 1, &rest);
            if pos % 2 == 0 {
                det += &term;
            } else {
                det += &-term;
            }
        }
        det
    }

    /// Transposed cofactor matrix.
    pub fn adjugate(&self) -> Self {
        let n = self.size;
        let mut adj = Self::zero(n);
        if n == 1 {
            let rank = self.entries[0].exponent_rank().unwrap_or(0);
            adj.entries[0] = LaurentPoly::one(rank);
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let sub = self.submatrix(&rows, &cols);
                let minor = sub.determinant();
                let cof = if (i + j) % 2 == 0 { minor } else { -minor };
                adj.entries[j * n + i] = cof;
            }
        }
        adj
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                entries.push(self.get(r, c).clone());
            }
        }
        Self {
            size: rows.len(),
            entries,
        }
    }

    /// Inverse over the Laurent ring; requires a monomial determinant.
    pub fn inverse_unit(&self) -> Result<Self> {
        let det = self.determinant();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let Some((m, c)) = det.as_monomial() else {
            return Err(Error::NotAUnit(det.to_string()));
        };
        let inv_det = LaurentPoly::monomial(-m, Rational::one() / c);
        Ok(self.adjugate().scale(&inv_det))
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        let mut t = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        let n = self.size;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.as_monomial()
                        .is_some_and(|(m, c)| m.is_zero() && c.is_one())
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// Rational constant entries, if every entry is constant.
    pub fn constant_entries(&self) -> Option<Vec<Vec<Rational>>> {
        if !self.is_constant() {
            return None;
        }
        Some(
            (0..self.size)
                .map(|i| {
                    (0..self.size)
                        .map(|j| {
                            self.get(i, j)
                                .terms()
                                .next()
                                .map_or_else(Rational::zero, |(_, c)| c.clone())
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

pub fn matrix_mul(a: &LaurentMatrix, b: &LaurentMatrix) -> Result<LaurentMatrix> {
    a.mul(b)
}

pub fn matrix_add(a: &LaurentMatrix, b: &LaurentMatrix) -> Result<LaurentMatrix> {
    a.add(b)
}

pub fn matrix_delta(v: &LatticeVector, c: &LaurentMatrix) -> LaurentMatrix {
    c.delta(v)
}

pub fn matrix_inverse_unit(c: &LaurentMatrix) -> Result<LaurentMatrix> {
    c.inverse_unit()
}

impl Serialize for LaurentMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<LaurentPoly>>::deserialize(deserializer)?;
        LaurentMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.size {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.size {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
