//! Piecewise polynomial equivariant Chern classes of weight data and their
//! relation to residues of the canonical connection.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::equivariant::EquivariantData;
use crate::error::{Error, Result};
use crate::fan::ConeId;
use crate::lattice::LatticeVector;
use crate::report::{CheckReport, Verdict};

/// Polynomial with integer coefficients in `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    /// `sum_j coeffs[j] * x_j`.
    pub fn linear(coeffs: &[i64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (j, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    fn add_term(&mut self, exponent: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, point: &[i64]) -> BigInt {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong length");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&k, &x)| acc * BigInt::from(x).pow(k))
            })
            .sum()
    }

    /// Composes with the linear map `x_j = sum_t columns[t][j] * y_t`,
    /// giving a polynomial in `columns.len()` variables.
    pub fn restrict(&self, columns: &[Vec<i64>]) -> Self {
        let k = columns.len();
        let forms: Vec<Polynomial> = (0..self.nvars)
            .map(|j| Polynomial::linear(&columns.iter().map(|w| w[j]).collect::<Vec<_>>()))
            .collect();
        let mut out = Polynomial::zero(k);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(k, c.clone());
            for (j, &power) in e.iter().enumerate() {
                for _ in 0..power {
                    term = term.mul(&forms[j]);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest degree first reads more naturally.
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| {
                    if k == 1 {
                        format!("v{}", j + 1)
                    } else {
                        format!("v{}^{k}", j + 1)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(serializer)
    }
}

/// Elementary symmetric polynomials `e_0..e_r` of the given linear forms.
pub fn elementary_symmetric(forms: &[Polynomial], nvars: usize) -> Vec<Polynomial> {
    let mut e = vec![Polynomial::one(nvars)];
    for form in forms {
        e.push(Polynomial::zero(nvars));
        for k in (1..e.len()).rev() {
            e[k] = e[k].add(&form.mul(&e[k - 1]));
        }
    }
    e
}

/// `c_i` restricted to each maximal cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiecewisePoly {
    pub degree: usize,
    pub pieces: BTreeMap<ConeId, Polynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuityCheck {
    pub degree: usize,
    pub sigma: ConeId,
    pub tau: ConeId,
    pub face: ConeId,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChernClasses {
    /// `c_1, ..., c_r`.
    pub classes: Vec<PiecewisePoly>,
    pub continuity: Vec<ContinuityCheck>,
}

impl ChernClasses {
    pub fn is_continuous(&self) -> bool {
        self.continuity.iter().all(|c| c.passed)
    }

    pub fn class(&self, degree: usize) -> Option<&PiecewisePoly> {
        degree.checked_sub(1).and_then(|i| self.classes.get(i))
    }

    pub fn to_check_report(&self) -> CheckReport {
        let mut report = CheckReport::new();
        for c in &self.continuity {
            let check = format!("continuity[c{}; {},{}]", c.degree, c.sigma, c.tau);
            let detail = format!("pieces compared on span of face {}", c.face);
            report.push(if c.passed {
                Verdict::pass(check, detail)
            } else {
                Verdict::fail(check, detail)
            });
        }
        report
    }
}

/// Expands `c_i|_sigma = e_i(<m_1, .>, ..., <m_r, .>)` on every maximal cone
/// and checks continuity across every shared face.
pub fn chern_pp(data: &EquivariantData) -> Result<ChernClasses> {
    let fan = data.fan();
    let n = fan.rank();
    let r = data.rank();
    let mut classes: Vec<PiecewisePoly> = (1..=r)
        .map(|degree| PiecewisePoly {
            degree,
            pieces: BTreeMap::new(),
        })
        .collect();
    for (&sigma, ws) in data.multisets() {
        let forms: Vec<Polynomial> = ws.weights.iter().map(|m| Polynomial::linear(m.coords())).collect();
        let e = elementary_symmetric(&forms, n);
        for (i, class) in classes.iter_mut().enumerate() {
            class.pieces.insert(sigma, e[i + 1].clone());
        }
    }

    let maximal = fan.maximal_cones();
    let mut continuity = Vec::new();
    for (a, &sigma) in maximal.iter().enumerate() {
        for &tau in &maximal[a + 1..] {
            let face = fan.intersection(sigma, tau)?;
            // Ray generators span the face over Q (simplicial fans).
            let basis: Vec<Vec<i64>> = fan.generators(face)?.iter().map(|v| v.0.clone()).collect();
            for class in &classes {
                let ps = class.pieces[&sigma].restrict(&basis);
                let pt = class.pieces[&tau].restrict(&basis);
                continuity.push(ContinuityCheck {
                    degree: class.degree,
                    sigma,
                    tau,
                    face,
                    passed: ps == pt,
                });
            }
        }
    }
    Ok(ChernClasses {
        classes,
        continuity,
    })
}

/// Characteristic polynomial `det(lambda I - A)` of a diagonal matrix,
/// coefficients from `lambda^r` down to `lambda^0`.
pub fn diagonal_charpoly(diag: &[i64]) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::one()];
    for &a in diag {
        // multiply by (lambda - a)
        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * BigInt::from(a);
        }
        coeffs = next;
    }
    coeffs
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueChernCheck {
    pub sigma: ConeId,
    pub rho: usize,
    /// `det(lambda I + Res)`, highest power first.
    pub charpoly: Vec<String>,
    /// `e_i` of the eigenvalues of `-Res`, read off the characteristic polynomial.
    pub from_residue: Vec<String>,
    /// `c_i|_sigma (v_rho)`.
    pub from_chern: Vec<String>,
    pub passed: bool,
}

pub fn residue_chern_check(data: &EquivariantData, sigma: ConeId, rho: usize) -> Result<ResidueChernCheck> {
    let classes = chern_pp(data)?;
    residue_chern_check_with(data, &classes, sigma, rho)
}

/// As [`residue_chern_check`] with precomputed classes.
pub fn residue_chern_check_with(
    data: &EquivariantData,
    classes: &ChernClasses,
    sigma: ConeId,
    rho: usize,
) -> Result<ResidueChernCheck> {
    let residue = data.residue(sigma, rho)?;
    let minus_res: Vec<i64> = residue.entries.iter().map(|e| -e).collect();
    let charpoly = diagonal_charpoly(&minus_res);
    let from_residue: Vec<BigInt> = charpoly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| if k % 2 == 0 { c.clone() } else { -c })
        .collect();

    let v: &LatticeVector = data.fan().ray(rho);
    let from_chern = classes
        .classes
        .iter()
        .map(|class| {
            class
                .pieces
                .get(&sigma)
                .map(|p| p.eval(v.coords()))
                .ok_or_else(|| Error::UnknownCone(format!("no Chern piece on cone {sigma}")))
        })
        .collect::<Result<Vec<BigInt>>>()?;

    let passed = from_residue == from_chern;
    let show = |xs: &[BigInt]| xs.iter().map(ToString::to_string).collect();
    Ok(ResidueChernCheck {
        sigma,
        rho,
        charpoly: show(&charpoly),
        from_residue: show(&from_residue),
        from_chern: show(&from_chern),
        passed,
    })
}
