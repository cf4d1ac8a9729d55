//! Sparse Laurent polynomials over exact rationals, graded by the character
//! lattice `M`, with the logarithmic derivations `delta_v`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::fan::{ConeId, Fan};
use crate::lattice::{CharacterVector, LatticeVector};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `sum c_m chi^m`, stored sparsely; exponents are kept in lexicographic
/// order and zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<CharacterVector, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exponent: CharacterVector, coeff: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(exponent, coeff);
        p
    }

    /// `chi^m` with coefficient 1.
    pub fn character(exponent: CharacterVector) -> Self {
        Self::monomial(exponent, Rational::one())
    }

    pub fn constant(rank: usize, c: Rational) -> Self {
        Self::monomial(CharacterVector::zero(rank), c)
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (CharacterVector, Rational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, exponent: CharacterVector, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exponent) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CharacterVector, &Rational)> {
        self.terms.iter()
    }

    pub fn exponents(&self) -> impl Iterator<Item = &CharacterVector> {
        self.terms.keys()
    }

    pub fn coeff(&self, exponent: &CharacterVector) -> Rational {
        self.terms.get(exponent).cloned().unwrap_or_else(Rational::zero)
    }

    /// The single term `(m, c)` if this is a nonzero monomial.
    pub fn as_monomial(&self) -> Option<(&CharacterVector, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// True if the only exponent (if any) is zero.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(CharacterVector::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by `chi^m`.
    pub fn shift(&self, m: &CharacterVector) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, a)| (e + m, a.clone())).collect(),
        }
    }

    /// Exponent ranks present, for consistency checks.
    pub fn exponent_rank(&self) -> Option<usize> {
        self.terms.keys().next().map(CharacterVector::rank)
    }

    pub fn has_rank(&self, rank: usize) -> bool {
        self.terms.keys().all(|m| m.rank() == rank)
    }

    /// Membership in the chart ring `K[S_sigma]`: every exponent pairs
    /// nonnegatively with every ray generator of `sigma`.
    pub fn in_cone_ring(&self, fan: &Fan, sigma: ConeId) -> bool {
        let Ok(cone) = fan.cone(sigma) else {
            return false;
        };
        self.terms
            .keys()
            .all(|m| cone.rays().iter().all(|&r| m.pair(fan.ray(r)) >= 0))
    }

    /// The logarithmic derivation `chi^m -> <m, v> chi^m`.
    pub fn delta(&self, v: &LatticeVector) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let k = m.pair(v);
                    (k != 0).then(|| (m.clone(), c * BigInt::from(k)))
                })
                .collect(),
        }
    }
}

pub fn chart_member(f: &LaurentPoly, sigma: ConeId, fan: &Fan) -> bool {
    f.in_cone_ring(fan, sigma)
}

pub fn delta_apply(v: &LatticeVector, f: &LaurentPoly) -> LaurentPoly {
    f.delta(v)
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1 + m2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if m.is_zero() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "x^{m}")?;
            } else {
                write!(f, "{mag}*x^{m}")?;
            }
        }
        Ok(())
    }
}

/// Wire form of one term: `{"exponent": [..], "num": n, "den": d}` with
/// `den > 0` and `gcd(num, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRepr {
    pub exponent: Vec<i64>,
    pub num: i64,
    pub den: i64,
}

impl LaurentPoly {
    /// Canonical term list: lexicographic exponents, reduced fractions.
    pub fn to_terms(&self) -> Result<Vec<TermRepr>, String> {
        self.terms
            .iter()
            .map(|(m, c)| {
                // BigRational is always kept reduced with a positive denominator.
                let num = c.numer().to_i64();
                let den = c.denom().to_i64();
                match (num, den) {
                    (Some(num), Some(den)) => Ok(TermRepr {
                        exponent: m.0.clone(),
                        num,
                        den,
                    }),
                    _ => Err(format!("coefficient {c} does not fit in 64 bits")),
                }
            })
            .collect()
    }

    pub fn from_term_reprs(terms: &[TermRepr]) -> Result<Self, String> {
        let mut p = Self::zero();
        let rank = terms.first().map(|t| t.exponent.len());
        for t in terms {
            if t.den == 0 {
                return Err("zero denominator".into());
            }
            if Some(t.exponent.len()) != rank {
                return Err("exponents of different lengths in one polynomial".into());
            }
            p.add_term(CharacterVector(t.exponent.clone()), rat(t.num, t.den));
        }
        Ok(p)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_terms().map_err(S::Error::custom)?.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(deserializer)?;
        LaurentPoly::from_term_reprs(&terms).map_err(D::Error::custom)
    }
}
