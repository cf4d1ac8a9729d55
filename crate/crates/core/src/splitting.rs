//! Deciding whether the Atiyah cocycle splits, and the connection forms a
//! splitting produces.
//!
//! The coboundary equation `C_{st} g_t(v) C_{ts} - g_s(v) = A_{st}(v)` is
//! homogeneous for the M-grading, so it is solved as a finite exact linear
//! system over a bounded set of weights. The set starts from the weights of
//! the cocycle and is closed a bounded number of times under the shifts that
//! conjugation by the transition matrices induces.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::Value;

use crate::cocycle::{cocycle_a, check_triple_identity, MatrixCochain, MatrixCocycle};
use crate::equivariant::EquivariantData;
use crate::error::{Error, Result};
use crate::fan::ConeId;
use crate::lattice::{CharacterVector, LatticeVector};
use num_traits::{One, Zero};

use crate::laurent::{LaurentPoly, Rational};
use crate::linsolve::{LinearSystem, SparseRow};
use crate::matrix::LaurentMatrix;
use crate::report::{CheckReport, Status, Verdict};
use crate::transitions::TransitionData;

pub const DEFAULT_WEIGHT_CAP: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub weight_cap: usize,
    pub closure_rounds: usize,
    /// The weight set stopped growing before the cap was reached.
    pub saturated: bool,
    pub weights: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitOutcome {
    Found { cochain: MatrixCochain, stats: SolverStats },
    NotFound { stats: SolverStats },
}

impl SplitOutcome {
    pub fn cochain(&self) -> Option<&MatrixCochain> {
        match self {
            SplitOutcome::Found { cochain, .. } => Some(cochain),
            SplitOutcome::NotFound { .. } => None,
        }
    }

    pub fn stats(&self) -> &SolverStats {
        match self {
            SplitOutcome::Found { stats, .. } | SplitOutcome::NotFound { stats } => stats,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SplitOutcome::Found { .. })
    }
}

/// Seed weights (zero and every exponent of the cocycle) and the shifts
/// `a + b` with `a` an exponent of `C_{st}` and `b` one of `C_{ts}`.
fn seeds_and_shifts(
    cocycle: &MatrixCocycle,
    data: &TransitionData,
) -> (BTreeSet<CharacterVector>, BTreeSet<CharacterVector>) {
    let n = data.fan().rank();
    let mut weights: BTreeSet<CharacterVector> = BTreeSet::new();
    weights.insert(CharacterVector::zero(n));
    for (s, t) in cocycle.overlaps() {
        for k in 0..cocycle.lattice_rank() {
            if let Ok(m) = cocycle.basis(s, t, k) {
                weights.extend(m.entries().flat_map(|e| e.exponents().cloned()));
            }
        }
    }

    let mut shifts: BTreeSet<CharacterVector> = BTreeSet::new();
    for (s, t) in data.overlaps() {
        let (Ok(c), Ok(back)) = (data.get(s, t), data.get(t, s)) else { continue };
        let left: BTreeSet<&CharacterVector> = c.entries().flat_map(|e| e.exponents()).collect();
        let right: BTreeSet<&CharacterVector> = back.entries().flat_map(|e| e.exponents()).collect();
        for a in &left {
            for b in &right {
                let shift = *a + *b;
                if !shift.is_zero() {
                    shifts.insert(shift);
                }
            }
        }
    }
    (weights, shifts)
}

fn close_once(weights: &BTreeSet<CharacterVector>, shifts: &BTreeSet<CharacterVector>) -> BTreeSet<CharacterVector> {
    let mut next = weights.clone();
    for w in weights {
        for s in shifts {
            next.insert(w + s);
            next.insert(w - s);
        }
    }
    next
}

/// One equation: an overlap and matrix entry, plus the monomial it collects.
type RowKey = (ConeId, ConeId, usize, usize, CharacterVector);

/// One unknown: the coefficient of `chi^weight` in entry `(i, j)` of `g_cone`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Unknown {
    cone: ConeId,
    i: usize,
    j: usize,
    weight: CharacterVector,
}

/// Searches for a cochain `g` with `C_{st} g_t C_{ts} - g_s = A_{st}` on every
/// ordered overlap. The weight set is widened one closure round at a time,
/// up to `weight_cap` rounds, and the first solvable system wins.
/// Weight-zero unknowns are ordered first so a constant solution is
/// preferred whenever one exists.
pub fn split_cocycle(cocycle: &MatrixCocycle, data: &TransitionData, weight_cap: usize) -> Result<SplitOutcome> {
    let fan = data.fan();
    let n = fan.rank();
    let r = data.rank();
    if cocycle.size() != r || cocycle.lattice_rank() != n {
        return Err(Error::Structural("cocycle does not match the transition data".into()));
    }
    let (mut weights, shifts) = seeds_and_shifts(cocycle, data);
    let mut round = 0;
    loop {
        let next = close_once(&weights, &shifts);
        let saturated = next.len() == weights.len();
        let mut stats = SolverStats {
            weight_cap,
            closure_rounds: round,
            saturated,
            weights: weights.len(),
            unknowns: 0,
            equations: 0,
            rank: 0,
        };
        if let Some(cochain) = solve_on(cocycle, data, &weights, &mut stats)? {
            let check = verify_splitting(&cochain, cocycle, data);
            if !check.passed() {
                return Err(Error::InconsistentSplitting(
                    check.failures().map(|v| v.detail.clone()).collect::<Vec<_>>().join("; "),
                ));
            }
            return Ok(SplitOutcome::Found { cochain, stats });
        }
        if saturated || round >= weight_cap {
            return Ok(SplitOutcome::NotFound { stats });
        }
        weights = next;
        round += 1;
    }
}

/// One exact solve with unknowns restricted to `weights`.
fn solve_on(
    cocycle: &MatrixCocycle,
    data: &TransitionData,
    weights: &BTreeSet<CharacterVector>,
    stats: &mut SolverStats,
) -> Result<Option<MatrixCochain>> {
    let fan = data.fan();
    let n = fan.rank();
    let r = data.rank();
    let mut unknowns: Vec<Unknown> = Vec::new();
    for &s in fan.maximal_cones() {
        for w in weights {
            if !LaurentPoly::character(w.clone()).in_cone_ring(fan, s) {
                continue;
            }
            for i in 0..r {
                for j in 0..r {
                    unknowns.push(Unknown { cone: s, i, j, weight: w.clone() });
                }
            }
        }
    }
    unknowns.sort_by(|a, b| {
        let key = |u: &Unknown| {
            let l1: i64 = u.weight.coords().iter().map(|c| c.abs()).sum();
            (!u.weight.is_zero(), l1)
        };
        key(a).cmp(&key(b)).then_with(|| a.weight.cmp(&b.weight)).then_with(|| a.cmp(b))
    });
    let mut by_cone: BTreeMap<ConeId, Vec<usize>> = BTreeMap::new();
    for (col, u) in unknowns.iter().enumerate() {
        by_cone.entry(u.cone).or_default().push(col);
    }
    stats.unknowns = unknowns.len();

    let mut values: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut rows: BTreeMap<RowKey, (SparseRow, Rational)> = BTreeMap::new();
        for (s, t) in data.overlaps() {
            let c = data.get(s, t)?;
            let back = data.get(t, s)?;
            let a = cocycle.basis(s, t, k)?;
            for p in 0..r {
                for q in 0..r {
                    for (m, coeff) in a.get(p, q).terms() {
                        rows.entry((s, t, p, q, m.clone())).or_default().1 += coeff;
                    }
                }
            }
            for &col in by_cone.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
                let u = &unknowns[col];
                for p in 0..r {
                    let left = c.get(p, u.i);
                    if left.is_zero() {
                        continue;
                    }
                    let left = left.shift(&u.weight);
                    for q in 0..r {
                        let right = back.get(u.j, q);
                        if right.is_zero() {
                            continue;
                        }
                        for (m, coeff) in (&left * right).terms() {
                            let row = &mut rows.entry((s, t, p, q, m.clone())).or_default().0;
                            *row.entry(col).or_default() += coeff;
                        }
                    }
                }
            }
            for &col in by_cone.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
                let u = &unknowns[col];
                let row = &mut rows.entry((s, t, u.i, u.j, u.weight.clone())).or_default().0;
                *row.entry(col).or_default() -= Rational::one();
            }
        }
        let mut system = LinearSystem::new(unknowns.len());
        for (_, (row, rhs)) in rows {
            system.push_row(row, rhs);
        }
        stats.equations += system.nrows();
        match system.solve() {
            Some(solution) => {
                stats.rank += solution.rank;
                values.push(solution.values);
            }
            None => return Ok(None),
        }
    }

    let mut maps: BTreeMap<ConeId, Vec<LaurentMatrix>> = fan
        .maximal_cones()
        .iter()
        .map(|&s| (s, vec![LaurentMatrix::zero(r); n]))
        .collect();
    for (k, vals) in values.iter().enumerate() {
        for (col, u) in unknowns.iter().enumerate() {
            if vals[col].is_zero() {
                continue;
            }
            let m = &mut maps.get_mut(&u.cone).expect("cone present")[k];
            let mut entry = m.get(u.i, u.j).clone();
            entry.add_term(u.weight.clone(), vals[col].clone());
            m.set(u.i, u.j, entry);
        }
    }
    Ok(Some(MatrixCochain::new(n, r, maps)?))
}

/// Checks the defining equation of a splitting directly, including chart
/// membership of every `g_sigma`.
pub fn verify_splitting(cochain: &MatrixCochain, cocycle: &MatrixCocycle, data: &TransitionData) -> CheckReport {
    let fan = data.fan();
    let mut report = CheckReport::new();
    let mut failed = false;
    for s in cochain.cones() {
        for k in 0..cochain.lattice_rank() {
            let regular = cochain.basis(s, k).is_ok_and(|g| g.entries().all(|e| e.in_cone_ring(fan, s)));
            if !regular {
                failed = true;
                report.push(Verdict::fail(format!("splitting_chart[{s}]"), format!("g(e{}) not regular on cone {s}", k + 1)));
            }
        }
    }
    for (s, t) in cocycle.overlaps() {
        for k in 0..cocycle.lattice_rank() {
            let ok = (|| -> Result<bool> {
                let lhs = data
                    .get(s, t)?
                    .mul(cochain.basis(t, k)?)?
                    .mul(data.get(t, s)?)?
                    .sub(cochain.basis(s, k)?)?;
                Ok(&lhs == cocycle.basis(s, t, k)?)
            })();
            if !matches!(ok, Ok(true)) {
                failed = true;
                report.push(Verdict::fail(
                    format!("splitting[{s},{t}]"),
                    format!("C g_t C^-1 - g_s != A at e{}", k + 1),
                ));
            }
        }
    }
    if !failed {
        report.push(Verdict::pass("splitting", "C g_t C^-1 - g_s = A on every overlap"));
    }
    report
}

/// `omega_t(v) = C_{ts} omega_s(v) C_{st} + C_{ts} d(C_{st})(v)` on every
/// ordered overlap.
pub fn gauge_law(forms: &MatrixCochain, data: &TransitionData) -> CheckReport {
    gauge_law_named(forms, data, "gauge_law")
}

fn gauge_law_named(forms: &MatrixCochain, data: &TransitionData, name: &str) -> CheckReport {
    let mut report = CheckReport::new();
    let mut failed = false;
    for (s, t) in data.overlaps() {
        for k in 0..forms.lattice_rank() {
            let v = LatticeVector::basis(forms.lattice_rank(), k);
            let ok = (|| -> Result<bool> {
                let c = data.get(s, t)?;
                let back = data.get(t, s)?;
                let rhs = back.mul(forms.basis(s, k)?)?.mul(c)?.add(&back.mul(&c.delta(&v))?)?;
                Ok(forms.basis(t, k)? == &rhs)
            })();
            if !matches!(ok, Ok(true)) {
                failed = true;
                report.push(Verdict::fail(
                    format!("{name}[{s},{t}]"),
                    format!("omega_{t} != C omega_{s} C^-1 + C d(C^-1) at e{}", k + 1),
                ));
                break;
            }
        }
    }
    if !failed {
        report.push(Verdict::pass(name, "connection forms glue on every overlap"));
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionForms {
    pub forms: MatrixCochain,
    pub gauge: CheckReport,
}

/// `omega_sigma = g_sigma`, accepted only if the forms glue.
pub fn connection_from_splitting(splitting: &MatrixCochain, data: &TransitionData) -> Result<ConnectionForms> {
    let gauge = gauge_law(splitting, data);
    if !gauge.passed() {
        let detail = gauge.failures().map(|v| v.check.clone()).collect::<Vec<_>>().join(", ");
        return Err(Error::InconsistentSplitting(format!("gauge law fails at {detail}")));
    }
    Ok(ConnectionForms {
        forms: splitting.clone(),
        gauge,
    })
}

/// The canonical equivariant connection `diag(-<m_i, v>)` in each eigenframe.
pub fn canonical_cochain(data: &EquivariantData) -> Result<MatrixCochain> {
    let n = data.fan().rank();
    let mut maps = BTreeMap::new();
    for &s in data.fan().maximal_cones() {
        let form = data.connection_form(s)?;
        maps.insert(s, (0..n).map(|k| form.matrix(&LatticeVector::basis(n, k))).collect());
    }
    MatrixCochain::new(n, data.rank(), maps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistComparison {
    /// `Lambda(e_k)` in the frame of the anchor cone.
    pub anchor: ConeId,
    pub twist: Vec<LaurentMatrix>,
    pub canonical_gauge: CheckReport,
    pub matches: CheckReport,
}

impl TwistComparison {
    pub fn passed(&self) -> bool {
        self.canonical_gauge.passed() && self.matches.passed()
    }

    pub fn twist_is_zero(&self) -> bool {
        self.twist.iter().all(LaurentMatrix::is_zero)
    }
}

/// Two connections on the same bundle differ by a global section of
/// `End E` tensor the log cotangent sheaf. Reads that difference off on the
/// first maximal cone and transports it to every chart. Passes when removing
/// it leaves exactly the canonical connection form on each chart.
pub fn compare_with_connection_form(
    forms: &MatrixCochain,
    equivariant: &EquivariantData,
    data: &TransitionData,
) -> Result<TwistComparison> {
    let canonical = canonical_cochain(equivariant)?;
    let canonical_gauge = gauge_law_named(&canonical, data, "canonical_gauge_law");
    let n = forms.lattice_rank();
    let anchor = *data
        .fan()
        .maximal_cones()
        .first()
        .ok_or_else(|| Error::Structural("fan has no maximal cones".into()))?;
    let twist: Vec<LaurentMatrix> = (0..n)
        .map(|k| forms.basis(anchor, k)?.sub(canonical.basis(anchor, k)?))
        .collect::<Result<_>>()?;

    let mut matches = CheckReport::new();
    for &s in data.fan().maximal_cones() {
        let mut ok = true;
        for (k, lambda) in twist.iter().enumerate() {
            let transported = if s == anchor {
                lambda.clone()
            } else {
                data.get(s, anchor)?.mul(lambda)?.mul(data.get(anchor, s)?)?
            };
            let untwisted = forms.basis(s, k)?.sub(&transported)?;
            if &untwisted != canonical.basis(s, k)? {
                ok = false;
            }
        }
        matches.push(Verdict::new(
            format!("connection_form[{s}]"),
            Status::from_bool(ok),
            if ok {
                "matches diag(-<m_i, v>) entrywise after removing the global twist"
            } else {
                "differs from diag(-<m_i, v>)"
            },
        ));
    }
    Ok(TwistComparison {
        anchor,
        twist,
        canonical_gauge,
        matches,
    })
}

#[derive(Clone, Debug)]
pub struct EquivarianceOutcome {
    pub cocycle: MatrixCocycle,
    pub outcome: SplitOutcome,
    pub checks: CheckReport,
}

/// Transition validation, the Atiyah cocycle, the graded splitting search and
/// the gauge check, ending in one `equivariance` verdict. A missing splitting
/// is reported as undetermined, never as a failure.
pub fn equivariance_verdict(data: &TransitionData, weight_cap: usize) -> Result<EquivarianceOutcome> {
    let mut checks = data.validate();
    let cocycle = cocycle_a(data)?;
    checks.extend(check_triple_identity(&cocycle, data));
    let outcome = split_cocycle(&cocycle, data, weight_cap)?;
    let stats = outcome.stats().clone();
    match outcome.cochain() {
        Some(g) => {
            checks.extend(verify_splitting(g, &cocycle, data));
            let gauge = gauge_law(g, data);
            let glued = gauge.passed();
            checks.extend(gauge);
            if glued {
                checks.push(Verdict::pass(
                    "equivariance",
                    "logarithmic connection exists, hence the bundle admits an equivariant structure",
                ));
            } else {
                checks.push(Verdict::fail("equivariance", "splitting found but its connection forms do not glue"));
            }
        }
        None => checks.push(Verdict::undetermined(
            "equivariance",
            format!(
                "no splitting found within graded search space ({} weights, closure rounds {}/{})",
                stats.weights, stats.closure_rounds, stats.weight_cap
            ),
        )),
    }
    Ok(EquivarianceOutcome { cocycle, outcome, checks })
}

pub fn stats_json(stats: &SolverStats) -> Value {
    serde_json::to_value(stats).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::divisor_weights;
    use crate::fan::Fan;
    use crate::laurent::int;
    use crate::transitions::split_bundle;
    use std::sync::Arc;

    fn x(m: &[i64]) -> LaurentPoly {
        LaurentPoly::character(CharacterVector::new(m.to_vec()))
    }

    fn p1(d: i64) -> TransitionData {
        let fan = Arc::new(Fan::projective_space(1));
        let max = fan.maximal_cones().to_vec();
        let maps = [((max[0], max[1]), LaurentMatrix::diagonal(vec![x(&[-d])]))].into();
        TransitionData::new(fan, 1, maps).unwrap()
    }

    #[test]
    fn p1_splitting_is_constant() {
        let d = 5;
        let data = p1(d);
        let max = data.fan().maximal_cones().to_vec();
        let a = cocycle_a(&data).unwrap();
        let outcome = split_cocycle(&a, &data, DEFAULT_WEIGHT_CAP).unwrap();
        let g = outcome.cochain().expect("splitting");
        assert_eq!(g.basis(max[0], 0).unwrap(), &LaurentMatrix::diagonal(vec![LaurentPoly::constant(1, int(d))]));
        assert!(g.basis(max[1], 0).unwrap().is_zero());
        let forms = connection_from_splitting(g, &data).unwrap();
        assert!(forms.gauge.passed());
    }

    #[test]
    fn zero_cocycle_zero_cochain() {
        let data = p1(0);
        let a = cocycle_a(&data).unwrap();
        assert!(a.is_zero());
        let outcome = split_cocycle(&a, &data, DEFAULT_WEIGHT_CAP).unwrap();
        assert!(outcome.cochain().unwrap().is_zero());
    }

    #[test]
    fn zero_forms_glue_only_for_constant_transitions() {
        let data = p1(2);
        let zero = MatrixCochain::zero(&data);
        assert!(!gauge_law(&zero, &data).passed());
        assert!(matches!(connection_from_splitting(&zero, &data), Err(Error::InconsistentSplitting(_))));
        assert!(gauge_law(&MatrixCochain::zero(&p1(0)), &p1(0)).passed());
    }

    #[test]
    fn p2_line_bundles_split() {
        let fan = Arc::new(Fan::projective_space(2));
        for k in -3..=3 {
            let w = divisor_weights(&fan, &[k, 0, 0]).unwrap();
            let (_, data) = split_bundle(fan.clone(), &[w]).unwrap();
            let outcome = equivariance_verdict(&data, DEFAULT_WEIGHT_CAP).unwrap();
            assert!(outcome.checks.passed(), "k = {k}: {:?}", outcome.checks);
        }
    }

    #[test]
    fn canonical_connection_matches_after_twist() {
        let fan = Arc::new(Fan::p1_times_p1());
        let w1 = divisor_weights(&fan, &[1, 0, 2, 0]).unwrap();
        let w2 = divisor_weights(&fan, &[0, -1, 0, 3]).unwrap();
        let (eq, data) = split_bundle(fan, &[w1, w2]).unwrap();
        assert!(gauge_law(&canonical_cochain(&eq).unwrap(), &data).passed());
        let a = cocycle_a(&data).unwrap();
        let g = split_cocycle(&a, &data, DEFAULT_WEIGHT_CAP).unwrap().cochain().unwrap().clone();
        let cmp = compare_with_connection_form(&g, &eq, &data).unwrap();
        assert!(cmp.passed(), "{cmp:?}");
        // the canonical connection is itself a splitting, with zero twist
        let canonical = canonical_cochain(&eq).unwrap();
        assert!(verify_splitting(&canonical, &a, &data).passed());
        assert!(compare_with_connection_form(&canonical, &eq, &data).unwrap().twist_is_zero());
    }

    #[test]
    fn non_antisymmetric_cocycle_has_no_splitting() {
        let data = p1(1);
        let max = data.fan().maximal_cones().to_vec();
        let a = cocycle_a(&data).unwrap();
        let bad = a.with_entry(max[1], max[0], 0, LaurentMatrix::diagonal(vec![LaurentPoly::constant(1, int(7))]));
        assert!(!split_cocycle(&bad, &data, DEFAULT_WEIGHT_CAP).unwrap().is_found());
    }
}
