//! Sections of `O ⊗ t`: logarithmic vector fields written in the standard
//! basis `delta_{e_1}, ..., delta_{e_n}` with Laurent coefficients.

use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::lattice::LatticeVector;

/// `sum_j f_j ⊗ e_j`. Input pairs `(f, v)` are expanded along the
/// coordinates of `v`, so equal fields have equal representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VField {
    coords: Vec<LaurentPoly>,
}

impl VField {
    pub fn zero(rank: usize) -> Self {
        Self {
            coords: vec![LaurentPoly::zero(); rank],
        }
    }

    pub fn from_pairs(
        rank: usize,
        pairs: impl IntoIterator<Item = (LaurentPoly, LatticeVector)>,
    ) -> Result<Self> {
        let mut field = Self::zero(rank);
        for (f, v) in pairs {
            if v.rank() != rank {
                return Err(Error::Dimension {
                    expected: rank,
                    found: v.rank(),
                });
            }
            for (j, &c) in v.coords().iter().enumerate() {
                if c != 0 {
                    field.coords[j] += &f.scale(&crate::laurent::int(c));
                }
            }
        }
        Ok(field)
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[LaurentPoly] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(LaurentPoly::is_zero)
    }

    /// Nonzero summands `(f_j, e_j)`.
    pub fn summands(&self) -> Vec<(LaurentPoly, LatticeVector)> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_zero())
            .map(|(j, f)| (f.clone(), LatticeVector::basis(self.rank(), j)))
            .collect()
    }

    /// Action as a derivation: `f ⊗ v` sends `g` to `f * delta_v(g)`.
    pub fn apply(&self, g: &LaurentPoly) -> LaurentPoly {
        let n = self.rank();
        let mut out = LaurentPoly::zero();
        for (j, f) in self.coords.iter().enumerate() {
            if !f.is_zero() {
                out += &(f * &g.delta(&LatticeVector::basis(n, j)));
            }
        }
        out
    }

    pub fn add(&self, other: &VField) -> VField {
        VField {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> VField {
        VField {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }
}

/// `[f1 ⊗ v1, f2 ⊗ v2] = f1 delta_{v1}(f2) ⊗ v2 - f2 delta_{v2}(f1) ⊗ v1`,
/// extended bilinearly.
pub fn bracket(a: &VField, b: &VField) -> Result<VField> {
    if a.rank() != b.rank() {
        return Err(Error::Dimension {
            expected: a.rank(),
            found: b.rank(),
        });
    }
    let n = a.rank();
    let mut out = VField::zero(n);
    for (j, f) in a.coords.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let ej = LatticeVector::basis(n, j);
        for (k, g) in b.coords.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let ek = LatticeVector::basis(n, k);
            out.coords[k] += &(f * &g.delta(&ej));
            out.coords[j] += &-(g * &f.delta(&ek));
        }
    }
    Ok(out)
}

impl fmt::Display for VField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.summands();
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, v)) in parts.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) ⊗ {v}")?;
        }
        Ok(())
    }
}
