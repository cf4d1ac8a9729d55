//! The two Atiyah cocycle pipelines on a toric cover and the identities that
//! relate them. Cocycles and cochains are N-linear in the derivation and are
//! stored as one matrix per standard basis vector of N.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fan::ConeId;
use crate::lattice::LatticeVector;
use crate::laurent::LaurentPoly;
use crate::matrix::LaurentMatrix;
use crate::report::{CheckReport, Verdict};
use crate::transitions::{Overlap, TransitionData};

/// `v -> A_{sigma,tau}(v)` on every ordered overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixCocycle {
    lattice_rank: usize,
    size: usize,
    maps: BTreeMap<Overlap, Vec<LaurentMatrix>>,
}

/// `v -> g_sigma(v)` on every maximal cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixCochain {
    lattice_rank: usize,
    size: usize,
    maps: BTreeMap<ConeId, Vec<LaurentMatrix>>,
}

fn combine(basis: &[LaurentMatrix], size: usize, v: &LatticeVector) -> Result<LaurentMatrix> {
    if v.rank() != basis.len() {
        return Err(Error::Dimension {
            expected: basis.len(),
            found: v.rank(),
        });
    }
    let mut out = LaurentMatrix::zero(size);
    for (m, &c) in basis.iter().zip(v.coords()) {
        if c != 0 {
            out = out.add(&m.scale_rational(&crate::laurent::int(c)))?;
        }
    }
    Ok(out)
}

fn basis_json(basis: &[LaurentMatrix]) -> Value {
    Value::Array(
        basis
            .iter()
            .map(|m| serde_json::to_value(m).unwrap_or(Value::Null))
            .collect(),
    )
}

impl MatrixCocycle {
    pub fn new(lattice_rank: usize, size: usize, maps: BTreeMap<Overlap, Vec<LaurentMatrix>>) -> Result<Self> {
        for (&(s, t), basis) in &maps {
            if basis.len() != lattice_rank || basis.iter().any(|m| m.size() != size) {
                return Err(Error::Structural(format!("cocycle entry ({s},{t}) has the wrong shape")));
            }
        }
        Ok(Self { lattice_rank, size, maps })
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn overlaps(&self) -> impl Iterator<Item = Overlap> + '_ {
        self.maps.keys().copied()
    }

    /// `A_{sigma,tau}(e_k)`.
    pub fn basis(&self, sigma: ConeId, tau: ConeId, k: usize) -> Result<&LaurentMatrix> {
        self.maps
            .get(&(sigma, tau))
            .and_then(|b| b.get(k))
            .ok_or_else(|| Error::UnknownCone(format!("no cocycle entry ({sigma},{tau}) e{k}")))
    }

    pub fn eval(&self, sigma: ConeId, tau: ConeId, v: &LatticeVector) -> Result<LaurentMatrix> {
        let basis = self
            .maps
            .get(&(sigma, tau))
            .ok_or_else(|| Error::UnknownCone(format!("no cocycle entry ({sigma},{tau})")))?;
        combine(basis, self.size, v)
    }

    pub fn neg(&self) -> Self {
        Self {
            lattice_rank: self.lattice_rank,
            size: self.size,
            maps: self
                .maps
                .iter()
                .map(|(&k, b)| (k, b.iter().map(LaurentMatrix::neg).collect()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.values().flatten().all(LaurentMatrix::is_zero)
    }

    /// Replaces a single basis matrix; used to build deliberately corrupted data.
    pub fn with_entry(&self, sigma: ConeId, tau: ConeId, k: usize, m: LaurentMatrix) -> Self {
        let mut out = self.clone();
        if let Some(b) = out.maps.get_mut(&(sigma, tau)) {
            b[k] = m;
        }
        out
    }

    /// `{"s,t": [A(e_1), ..., A(e_n)]}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (&(s, t), basis) in &self.maps {
            map.insert(format!("{s},{t}"), basis_json(basis));
        }
        Value::Object(map)
    }
}

impl MatrixCochain {
    pub fn new(lattice_rank: usize, size: usize, maps: BTreeMap<ConeId, Vec<LaurentMatrix>>) -> Result<Self> {
        for (&s, basis) in &maps {
            if basis.len() != lattice_rank || basis.iter().any(|m| m.size() != size) {
                return Err(Error::Structural(format!("cochain entry {s} has the wrong shape")));
            }
        }
        Ok(Self { lattice_rank, size, maps })
    }

    pub fn zero(data: &TransitionData) -> Self {
        let n = data.fan().rank();
        let r = data.rank();
        Self {
            lattice_rank: n,
            size: r,
            maps: data
                .fan()
                .maximal_cones()
                .iter()
                .map(|&s| (s, vec![LaurentMatrix::zero(r); n]))
                .collect(),
        }
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cones(&self) -> impl Iterator<Item = ConeId> + '_ {
        self.maps.keys().copied()
    }

    pub fn basis(&self, sigma: ConeId, k: usize) -> Result<&LaurentMatrix> {
        self.maps
            .get(&sigma)
            .and_then(|b| b.get(k))
            .ok_or_else(|| Error::UnknownCone(format!("no cochain entry {sigma} e{k}")))
    }

    pub fn eval(&self, sigma: ConeId, v: &LatticeVector) -> Result<LaurentMatrix> {
        let basis = self
            .maps
            .get(&sigma)
            .ok_or_else(|| Error::UnknownCone(format!("no cochain entry {sigma}")))?;
        combine(basis, self.size, v)
    }

    pub fn is_zero(&self) -> bool {
        self.maps.values().flatten().all(LaurentMatrix::is_zero)
    }

    /// `{"s": [g(e_1), ..., g(e_n)]}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (&s, basis) in &self.maps {
            map.insert(s.to_string(), basis_json(basis));
        }
        Value::Object(map)
    }
}

fn check_overlap_entries(data: &TransitionData, s: ConeId, t: ConeId, m: &LaurentMatrix) -> Result<()> {
    let fan = data.fan();
    let face = fan.intersection(s, t)?;
    match m.entries().find(|e| !e.in_cone_ring(fan, face)) {
        Some(bad) => Err(Error::ChartMembership(format!(
            "entry {bad} on overlap ({s},{t}) is not regular on face {face}"
        ))),
        None => Ok(()),
    }
}

/// `A_{sigma,tau}(v) = d(C_{sigma,tau})(v) C_{tau,sigma}`, assembled entry by
/// entry as `a_pq = sum_k delta_v(c^{st}_pk) c^{ts}_kq`.
pub fn cocycle_a(data: &TransitionData) -> Result<MatrixCocycle> {
    let n = data.fan().rank();
    let r = data.rank();
    let mut maps = BTreeMap::new();
    for (s, t) in data.overlaps() {
        let c = data.get(s, t)?;
        let back = data.get(t, s)?;
        let mut basis = Vec::with_capacity(n);
        for k in 0..n {
            let v = LatticeVector::basis(n, k);
            let dc: Vec<Vec<LaurentPoly>> = (0..r)
                .map(|p| (0..r).map(|l| c.get(p, l).delta(&v)).collect())
                .collect();
            let mut a = LaurentMatrix::zero(r);
            for (p, row) in dc.iter().enumerate() {
                for q in 0..r {
                    let mut f = LaurentPoly::zero();
                    for (l, d) in row.iter().enumerate() {
                        if !d.is_zero() {
                            f += &(d * back.get(l, q));
                        }
                    }
                    a.set(p, q, f);
                }
            }
            check_overlap_entries(data, s, t, &a)?;
            basis.push(a);
        }
        maps.insert((s, t), basis);
    }
    MatrixCocycle::new(n, r, maps)
}

/// `B_{sigma,tau}(v) = C_{sigma,tau} d(C_{tau,sigma})(v)`, built column by
/// column: take `C_{tau,sigma} e_j`, differentiate, map back by `C_{sigma,tau}`.
pub fn cocycle_b(data: &TransitionData) -> Result<MatrixCocycle> {
    let n = data.fan().rank();
    let r = data.rank();
    let mut maps = BTreeMap::new();
    for (s, t) in data.overlaps() {
        let c = data.get(s, t)?;
        let back = data.get(t, s)?;
        let mut basis = Vec::with_capacity(n);
        for k in 0..n {
            let v = LatticeVector::basis(n, k);
            let mut b = LaurentMatrix::zero(r);
            for j in 0..r {
                let moved: Vec<LaurentPoly> = back.column(j).iter().map(|e| e.delta(&v)).collect();
                for p in 0..r {
                    let mut f = LaurentPoly::zero();
                    for (l, e) in moved.iter().enumerate() {
                        if !e.is_zero() {
                            f += &(c.get(p, l) * e);
                        }
                    }
                    b.set(p, j, f);
                }
            }
            check_overlap_entries(data, s, t, &b)?;
            basis.push(b);
        }
        maps.insert((s, t), basis);
    }
    MatrixCocycle::new(n, r, maps)
}

/// `A = -B` exactly, on every overlap and every basis derivation.
pub fn check_theorem_ab(a: &MatrixCocycle, b: &MatrixCocycle) -> CheckReport {
    let mut report = CheckReport::new();
    let mut compared = 0usize;
    let mut failed = false;
    for (key, basis) in &a.maps {
        let Some(other) = b.maps.get(key) else {
            failed = true;
            report.push(Verdict::fail(
                format!("theorem_ab[{},{}]", key.0, key.1),
                "overlap missing from the b pipeline",
            ));
            continue;
        };
        for (k, (ma, mb)) in basis.iter().zip(other).enumerate() {
            compared += 1;
            if *ma != mb.neg() {
                failed = true;
                report.push(Verdict::fail(
                    format!("theorem_ab[{},{}]", key.0, key.1),
                    format!("a(e{}) = {ma} but -b(e{}) = {}", k + 1, k + 1, mb.neg()),
                ));
            }
        }
    }
    if b.maps.len() != a.maps.len() {
        failed = true;
        report.push(Verdict::fail("theorem_ab", "pipelines cover different overlaps"));
    }
    if !failed {
        report.push(Verdict::pass(
            "theorem_ab",
            format!("a = -b on {} overlaps, {compared} basis derivations", a.maps.len()),
        ));
    }
    report
}

/// Runs both pipelines and compares them.
pub fn theorem_ab(data: &TransitionData) -> Result<(MatrixCocycle, MatrixCocycle, CheckReport)> {
    let a = cocycle_a(data)?;
    let b = cocycle_b(data)?;
    let report = check_theorem_ab(&a, &b);
    Ok((a, b, report))
}

fn conjugate(c: &LaurentMatrix, m: &LaurentMatrix, c_inv: &LaurentMatrix) -> Result<LaurentMatrix> {
    c.mul(m)?.mul(c_inv)
}

/// `A_{sigma,nu} = A_{sigma,tau} + C_{sigma,tau} A_{tau,nu} C_{tau,sigma}` on
/// every ordered triple of distinct maximal cones.
pub fn check_triple_identity(cocycle: &MatrixCocycle, data: &TransitionData) -> CheckReport {
    let mut report = CheckReport::new();
    let maximal = data.fan().maximal_cones();
    let mut triples = 0usize;
    let mut failed = false;
    for &s in maximal {
        for &t in maximal {
            for &u in maximal {
                if s == t || t == u || s == u {
                    continue;
                }
                triples += 1;
                if let Some(k) = triple_failure(cocycle, data, s, t, u) {
                    failed = true;
                    report.push(Verdict::fail(
                        format!("triple[{s},{t},{u}]"),
                        format!("A[{s},{u}] != A[{s},{t}] + C A[{t},{u}] C^-1 at e{}", k + 1),
                    ));
                }
            }
        }
    }
    if !failed {
        let detail = if triples == 0 {
            "vacuous: fewer than three maximal cones".to_string()
        } else {
            format!("holds on all {triples} ordered triples")
        };
        report.push(Verdict::pass("triple_identity", detail));
    }
    report
}

fn triple_failure(cocycle: &MatrixCocycle, data: &TransitionData, s: ConeId, t: ConeId, u: ConeId) -> Option<usize> {
    let (Ok(c), Ok(c_inv)) = (data.get(s, t), data.get(t, s)) else {
        return Some(0);
    };
    for k in 0..cocycle.lattice_rank {
        let ok = (|| -> Result<bool> {
            let lhs = cocycle.basis(s, u, k)?;
            let rhs = cocycle.basis(s, t, k)?.add(&conjugate(c, cocycle.basis(t, u, k)?, c_inv)?)?;
            Ok(*lhs == rhs)
        })();
        if !matches!(ok, Ok(true)) {
            return Some(k);
        }
    }
    None
}

/// `A_{tau,sigma} = -C_{tau,sigma} A_{sigma,tau} C_{sigma,tau}`.
pub fn check_frame_antisymmetry(cocycle: &MatrixCocycle, data: &TransitionData) -> CheckReport {
    let mut report = CheckReport::new();
    let mut failed = false;
    for (s, t) in cocycle.overlaps() {
        for k in 0..cocycle.lattice_rank {
            let ok = (|| -> Result<bool> {
                let lhs = cocycle.basis(t, s, k)?;
                let rhs = conjugate(data.get(t, s)?, cocycle.basis(s, t, k)?, data.get(s, t)?)?.neg();
                Ok(*lhs == rhs)
            })();
            if !matches!(ok, Ok(true)) {
                failed = true;
                report.push(Verdict::fail(
                    format!("antisymmetry[{s},{t}]"),
                    format!("A[{t},{s}] != -C A[{s},{t}] C^-1 at e{}", k + 1),
                ));
                break;
            }
        }
    }
    if !failed {
        report.push(Verdict::pass("frame_antisymmetry", "holds on every overlap"));
    }
    report
}

/// Compact summary used in reports: `{"overlaps": n, "zero": bool}`.
pub fn cocycle_summary(cocycle: &MatrixCocycle) -> Value {
    json!({
        "overlaps": cocycle.maps.len(),
        "zero": cocycle.is_zero(),
    })
}
