//! Transition matrices of a rank `r` bundle on the cover by maximal-cone
//! charts. Convention: frame coordinates satisfy `f_sigma = C_{sigma,tau} f_tau`
//! on `U_sigma ∩ U_tau = U_{sigma ∩ tau}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::equivariant::{direct_sum, EquivariantData};
use crate::error::{Error, Result};
use crate::fan::{ConeId, Fan};
use crate::laurent::LaurentPoly;
use crate::lattice::CharacterVector;
use crate::matrix::LaurentMatrix;
use crate::report::{CheckReport, Verdict};

pub type Overlap = (ConeId, ConeId);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionData {
    fan: Arc<Fan>,
    rank: usize,
    maps: BTreeMap<Overlap, LaurentMatrix>,
}

impl TransitionData {
    /// Accepts one or both directions of every pair of distinct maximal
    /// cones; a missing direction is filled in by the Laurent inverse.
    pub fn new(fan: Arc<Fan>, rank: usize, mut maps: BTreeMap<Overlap, LaurentMatrix>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Structural("bundle rank must be at least 1".into()));
        }
        for (&(s, t), c) in &maps {
            for id in [s, t] {
                fan.cone(id)?;
                if !fan.is_maximal(id) {
                    return Err(Error::Structural(format!("transition references non-maximal cone {id}")));
                }
            }
            if s == t {
                return Err(Error::Structural(format!("transition from cone {s} to itself")));
            }
            if c.size() != rank {
                return Err(Error::Structural(format!(
                    "C[{s},{t}] is {}x{0}, bundle rank is {rank}",
                    c.size()
                )));
            }
            if !c.has_rank(fan.rank()) {
                return Err(Error::Structural(format!(
                    "C[{s},{t}] has exponents of the wrong length"
                )));
            }
        }
        let maximal = fan.maximal_cones().to_vec();
        for &s in &maximal {
            for &t in &maximal {
                if s == t || maps.contains_key(&(s, t)) {
                    continue;
                }
                let Some(c) = maps.get(&(t, s)) else {
                    return Err(Error::Structural(format!("no transition between cones {s} and {t}")));
                };
                let inv = c.inverse_unit()?;
                maps.insert((s, t), inv);
            }
        }
        Ok(Self { fan, rank, maps })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, sigma: ConeId, tau: ConeId) -> Result<&LaurentMatrix> {
        self.maps
            .get(&(sigma, tau))
            .ok_or_else(|| Error::UnknownCone(format!("no transition C[{sigma},{tau}]")))
    }

    pub fn maps(&self) -> &BTreeMap<Overlap, LaurentMatrix> {
        &self.maps
    }

    /// Ordered pairs of distinct maximal cones.
    pub fn overlaps(&self) -> impl Iterator<Item = Overlap> + '_ {
        self.maps.keys().copied()
    }

    /// Replaces one transition matrix as given, without touching its reverse.
    pub fn with_transition(&self, sigma: ConeId, tau: ConeId, c: LaurentMatrix) -> Self {
        let mut out = self.clone();
        out.maps.insert((sigma, tau), c);
        out
    }

    /// Change of frames `f'_sigma = F_sigma f_sigma` with
    /// `F_sigma ∈ GL(r, K[S_sigma])`: `C'_{sigma,tau} = F_sigma C_{sigma,tau} F_tau^{-1}`.
    pub fn gauge(&self, frames: &BTreeMap<ConeId, LaurentMatrix>) -> Result<Self> {
        let mut inverses = BTreeMap::new();
        for (&id, f) in frames {
            inverses.insert(id, f.inverse_unit()?);
        }
        let mut maps = BTreeMap::new();
        for (&(s, t), c) in &self.maps {
            let fs = frames.get(&s).ok_or_else(|| Error::UnknownCone(format!("no frame for cone {s}")))?;
            let ft_inv = &inverses.get(&t).ok_or_else(|| Error::UnknownCone(format!("no frame for cone {t}")))?;
            maps.insert((s, t), fs.mul(c)?.mul(ft_inv)?);
        }
        Ok(Self {
            fan: self.fan.clone(),
            rank: self.rank,
            maps,
        })
    }

    /// Cocycle law on triples, inverse pairing, unit determinants and chart
    /// membership over each overlap. Violations are reported, not thrown.
    pub fn validate(&self) -> CheckReport {
        let fan = &self.fan;
        let mut report = CheckReport::new();
        let mut chart = Vec::new();
        let mut units = Vec::new();
        let mut inverse = Vec::new();

        for (&(s, t), c) in &self.maps {
            let face = match fan.intersection(s, t) {
                Ok(face) => face,
                Err(e) => {
                    chart.push(format!("({s},{t}): {e}"));
                    continue;
                }
            };
            if let Some(bad) = c.entries().find(|e| !e.in_cone_ring(fan, face)) {
                chart.push(format!("({s},{t}): entry {bad} not regular on face {face}"));
            }
            let det = c.determinant();
            match det.as_monomial() {
                Some((m, _)) => {
                    let unit = LaurentPoly::character(m.clone());
                    let inv = LaurentPoly::character(-m);
                    if !(unit.in_cone_ring(fan, face) && inv.in_cone_ring(fan, face)) {
                        units.push(format!("({s},{t}): det {det} not a unit on face {face}"));
                    }
                }
                None => units.push(format!("({s},{t}): det {det} is not a monomial")),
            }
            if s < t {
                let ok = self
                    .maps
                    .get(&(t, s))
                    .and_then(|back| c.mul(back).ok())
                    .is_some_and(|p| p.is_identity());
                if !ok {
                    inverse.push(format!("({s},{t})"));
                }
            }
        }

        report.push(summary("chart_membership", &chart, "all entries regular on their overlaps"));
        report.push(summary("unit_determinant", &units, "all determinants are chart units"));
        report.push(summary("inverse_pairing", &inverse, "C[s,t] C[t,s] = I on every overlap"));

        let maximal = fan.maximal_cones();
        let mut triples = 0usize;
        let mut broken = 0usize;
        for &s in maximal {
            for &t in maximal {
                for &u in maximal {
                    if s == t || t == u || s == u {
                        continue;
                    }
                    triples += 1;
                    let lhs = self.maps[&(s, t)].mul(&self.maps[&(t, u)]);
                    let ok = lhs.is_ok_and(|l| l == self.maps[&(s, u)]);
                    if !ok {
                        broken += 1;
                        report.push(Verdict::fail(
                            format!("cocycle[{s},{t},{u}]"),
                            format!("C[{s},{t}] C[{t},{u}] != C[{s},{u}]"),
                        ));
                    }
                }
            }
        }
        if broken == 0 {
            report.push(Verdict::pass(
                "cocycle",
                format!("C[s,t] C[t,u] = C[s,u] on all {triples} ordered triples"),
            ));
        }
        report
    }
}

fn summary(check: &str, problems: &[String], ok: &str) -> Verdict {
    if problems.is_empty() {
        Verdict::pass(check, ok)
    } else {
        Verdict::fail(check, problems.join("; "))
    }
}

pub fn validate_transitions(data: &TransitionData) -> CheckReport {
    data.validate()
}

/// A direct sum of equivariant line bundles, each given by its weight on
/// every maximal cone. Returns the weight data (eigenframes in canonical
/// sorted order) and the monomial transition matrices between those frames:
/// the summand `k` entry is `chi^{m_k^sigma - m_k^tau}`.
pub fn split_bundle(
    fan: Arc<Fan>,
    summands: &[BTreeMap<ConeId, CharacterVector>],
) -> Result<(EquivariantData, TransitionData)> {
    let data = direct_sum(fan.clone(), summands)?;
    let r = summands.len();
    let maximal = fan.maximal_cones().to_vec();

    // Position of summand k in the sorted eigenframe of each cone; ties keep
    // summand order.
    let mut position: BTreeMap<ConeId, Vec<usize>> = BTreeMap::new();
    for &s in &maximal {
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| summands[a][&s].cmp(&summands[b][&s]).then(a.cmp(&b)));
        let mut pos = vec![0; r];
        for (p, &k) in order.iter().enumerate() {
            pos[k] = p;
        }
        position.insert(s, pos);
    }

    let mut maps = BTreeMap::new();
    for &s in &maximal {
        for &t in &maximal {
            if s == t {
                continue;
            }
            let mut c = LaurentMatrix::zero(r);
            for (k, summand) in summands.iter().enumerate() {
                let m = &summand[&s] - &summand[&t];
                c.set(position[&s][k], position[&t][k], LaurentPoly::character(m));
            }
            maps.insert((s, t), c);
        }
    }
    let transitions = TransitionData::new(fan, r, maps)?;
    Ok((data, transitions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::divisor_weights;
    use crate::report::Status;

    fn x(m: &[i64]) -> LaurentPoly {
        LaurentPoly::character(CharacterVector::new(m.to_vec()))
    }

    fn line_bundle(fan: &Arc<Fan>, divisor: &[i64]) -> TransitionData {
        let w = divisor_weights(fan, divisor).unwrap();
        split_bundle(fan.clone(), &[w]).unwrap().1
    }

    #[test]
    fn p1_line_bundle_validates() {
        let fan = Arc::new(Fan::projective_space(1));
        let max = fan.maximal_cones().to_vec();
        let d = 3;
        let maps = [((max[0], max[1]), LaurentMatrix::diagonal(vec![x(&[-d])]))].into();
        let data = TransitionData::new(fan, 1, maps).unwrap();
        assert_eq!(data.get(max[1], max[0]).unwrap(), &LaurentMatrix::diagonal(vec![x(&[d])]));
        let report = validate_transitions(&data);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn p2_line_bundle_validates() {
        let fan = Arc::new(Fan::projective_space(2));
        let data = line_bundle(&fan, &[2, 0, 0]);
        assert!(validate_transitions(&data).passed());
    }

    #[test]
    fn perturbed_exponent_breaks_cocycle() {
        let fan = Arc::new(Fan::projective_space(2));
        let data = line_bundle(&fan, &[1, 0, 0]);
        let max = fan.maximal_cones().to_vec();
        let (s, t) = (max[0], max[1]);
        let c = data.get(s, t).unwrap();
        let (m, _) = c.get(0, 0).as_monomial().unwrap();
        let bumped = &(m.clone()) + &CharacterVector::new(vec![1, 0]);
        let bad = data
            .with_transition(s, t, LaurentMatrix::diagonal(vec![LaurentPoly::character(bumped.clone())]))
            .with_transition(t, s, LaurentMatrix::diagonal(vec![LaurentPoly::character(-&bumped)]));
        let report = validate_transitions(&bad);
        let named: Vec<_> = report.failures().map(|v| v.check.clone()).collect();
        assert!(named.iter().any(|c| c.starts_with("cocycle[")), "{named:?}");
        assert!(named.contains(&format!("cocycle[{s},{t},{}]", max[2])));
    }

    #[test]
    fn missing_pair_is_structural() {
        let fan = Arc::new(Fan::projective_space(2));
        let max = fan.maximal_cones().to_vec();
        let maps = [((max[0], max[1]), LaurentMatrix::identity(1, 2))].into();
        assert!(matches!(TransitionData::new(fan, 1, maps), Err(Error::Structural(_))));
    }

    #[test]
    fn entries_outside_overlap_ring_are_reported() {
        // On P2 the overlap of two maximal cones is a ray; x^(1,0) is not a unit there.
        let fan = Arc::new(Fan::projective_space(2));
        let data = line_bundle(&fan, &[0, 0, 0]);
        let max = fan.maximal_cones().to_vec();
        let face = fan.intersection(max[0], max[1]).unwrap();
        let ray = fan.cone(face).unwrap().rays()[0];
        let v = fan.ray(ray);
        // pick a character pairing -1 with the shared ray
        let m = CharacterVector::new(v.coords().iter().map(|&c| -c).collect());
        assert!(m.pair(v) < 0);
        let c = LaurentMatrix::diagonal(vec![LaurentPoly::character(m.clone())]);
        let bad = data
            .with_transition(max[0], max[1], c)
            .with_transition(max[1], max[0], LaurentMatrix::diagonal(vec![LaurentPoly::character(-&m)]));
        let report = validate_transitions(&bad);
        let chart = report.verdicts.iter().find(|v| v.check == "chart_membership").unwrap();
        assert_eq!(chart.status, Status::Fail);
    }

    #[test]
    fn gauge_change_preserves_validity() {
        let fan = Arc::new(Fan::projective_space(1));
        let w = divisor_weights(&fan, &[2, 0]).unwrap();
        let (_, data) = split_bundle(fan.clone(), &[w.clone(), w]).unwrap();
        let max = fan.maximal_cones().to_vec();
        let one = LaurentPoly::one(1);
        let mut frames = BTreeMap::new();
        for &s in &max {
            // strictly upper entry regular on the chart of s
            let v = fan.ray(fan.cone(s).unwrap().rays()[0]);
            let e = LaurentPoly::character(CharacterVector::new(vec![v.coords()[0]]));
            frames.insert(
                s,
                LaurentMatrix::from_rows(vec![vec![one.clone(), e], vec![LaurentPoly::zero(), one.clone()]]).unwrap(),
            );
        }
        let gauged = data.gauge(&frames).unwrap();
        assert_ne!(gauged, data);
        assert!(validate_transitions(&gauged).passed());
    }
}
