//! Integer lattices `N` (one-parameter subgroups) and `M` (characters),
//! the pairing between them, and Smith invariants of integer matrices.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! lattice_vector {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub Vec<i64>);

        impl $name {
            pub fn new(coords: Vec<i64>) -> Self {
                Self(coords)
            }

            pub fn zero(rank: usize) -> Self {
                Self(vec![0; rank])
            }

            /// The `k`-th standard basis vector of rank `rank`.
            pub fn basis(rank: usize, k: usize) -> Self {
                let mut coords = vec![0; rank];
                coords[k] = 1;
                Self(coords)
            }

            pub fn rank(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &[i64] {
                &self.0
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&c| c == 0)
            }

            pub fn scaled(&self, k: i64) -> Self {
                Self(self.0.iter().map(|c| c * k).collect())
            }
        }

        impl std::ops::Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                assert_eq!(self.rank(), rhs.rank(), "lattice rank mismatch");
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
            }
        }

        impl std::ops::Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                assert_eq!(self.rank(), rhs.rank(), "lattice rank mismatch");
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
            }
        }

        impl std::ops::Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(self.0.iter().map(|a| -a).collect())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "(")?;
                for (i, c) in self.0.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    };
}

lattice_vector!(
    /// Element of the cocharacter lattice `N`.
    LatticeVector
);
lattice_vector!(
    /// Element of the character lattice `M`, used as a Laurent exponent.
    CharacterVector
);

impl CharacterVector {
    /// `<m, v>`. Panics on rank mismatch; use [`pairing`] for a checked version.
    pub fn pair(&self, v: &LatticeVector) -> i64 {
        assert_eq!(self.rank(), v.rank(), "pairing of vectors of different rank");
        self.0.iter().zip(&v.0).map(|(a, b)| a * b).sum()
    }
}

pub fn pairing(m: &CharacterVector, v: &LatticeVector) -> Result<i64> {
    if m.rank() != v.rank() {
        return Err(Error::Dimension {
            expected: v.rank(),
            found: m.rank(),
        });
    }
    Ok(m.pair(v))
}

/// Divides `v` by the gcd of its coordinates. Signs are preserved.
pub fn primitivize(v: &LatticeVector) -> Result<LatticeVector> {
    let g = v.0.iter().fold(0i64, |g, c| g.gcd(c));
    if g == 0 {
        return Err(Error::Degenerate("zero vector has no primitive generator".into()));
    }
    Ok(LatticeVector(v.0.iter().map(|c| c / g).collect()))
}

pub fn is_primitive(v: &LatticeVector) -> bool {
    v.0.iter().fold(0i64, |g, c| g.gcd(c)) == 1
}

/// Nonzero invariant factors `d_1 | d_2 | ...` of the Smith normal form of an
/// integer matrix given by rows. The number of factors is the rank.
#[allow(clippy::needless_range_loop)]
pub fn smith_invariants(rows: &[Vec<i64>]) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut factors = Vec::new();

    for t in 0..nrows.min(ncols) {
        let Some((pi, pj)) = min_nonzero(&a, t..nrows, t..ncols) else {
            break;
        };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);

        loop {
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..nrows {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for c in t..ncols {
                        a[i][c] -= q * a[t][c];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..ncols {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if clean {
                // Pivot must divide the remaining block.
                let bad = (t + 1..nrows)
                    .find(|&i| (t + 1..ncols).any(|j| a[i][j] % p != 0));
                match bad {
                    Some(i) => {
                        for c in t..ncols {
                            a[t][c] += a[i][c];
                        }
                    }
                    None => break,
                }
                continue;
            }
            // A remainder smaller than the pivot survived; move it into place.
            let mut best = (t, t);
            for i in t..nrows {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..ncols {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            swap_cols(&mut a, t, best.1);
        }
        factors.push(a[t][t].unsigned_abs() as i64);
    }
    factors
}

fn min_nonzero(
    a: &[Vec<i128>],
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<i128>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}
