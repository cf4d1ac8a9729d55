//! Equivariant bundle data: one multiset of characters per maximal cone,
//! with the canonical logarithmic connection these weights define, its
//! residues along boundary divisors, and recovery of weights from residues.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{ConeId, Fan};
use crate::laurent::{int, LaurentPoly, Rational};
use crate::lattice::{smith_invariants, CharacterVector, LatticeVector};
use crate::linsolve::solve_unique;
use crate::matrix::LaurentMatrix;
use crate::report::{CheckReport, Verdict};

/// Weights of the eigenframe over one maximal cone, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightMultiset {
    pub cone: ConeId,
    pub weights: Vec<CharacterVector>,
}

impl WeightMultiset {
    pub fn new(cone: ConeId, mut weights: Vec<CharacterVector>) -> Self {
        weights.sort();
        Self { cone, weights }
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantData {
    fan: Arc<Fan>,
    rank: usize,
    multisets: BTreeMap<ConeId, WeightMultiset>,
}

impl EquivariantData {
    /// Every maximal cone must carry exactly `rank` weights; nothing else may.
    pub fn new(
        fan: Arc<Fan>,
        rank: usize,
        weights: BTreeMap<ConeId, Vec<CharacterVector>>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Structural("bundle rank must be at least 1".into()));
        }
        for (&id, ws) in &weights {
            fan.cone(id)?;
            if !fan.is_maximal(id) {
                return Err(Error::Structural(format!("cone {id} is not maximal")));
            }
            if ws.len() != rank {
                return Err(Error::Structural(format!(
                    "cone {id} has {} weights, bundle rank is {rank}",
                    ws.len()
                )));
            }
            if let Some(m) = ws.iter().find(|m| m.rank() != fan.rank()) {
                return Err(Error::Dimension {
                    expected: fan.rank(),
                    found: m.rank(),
                });
            }
        }
        if let Some(missing) = fan.maximal_cones().iter().find(|id| !weights.contains_key(id)) {
            return Err(Error::Structural(format!("maximal cone {missing} has no weights")));
        }
        let multisets = weights
            .into_iter()
            .map(|(id, ws)| (id, WeightMultiset::new(id, ws)))
            .collect();
        Ok(Self {
            fan,
            rank,
            multisets,
        })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn multisets(&self) -> &BTreeMap<ConeId, WeightMultiset> {
        &self.multisets
    }

    pub fn weights(&self, sigma: ConeId) -> Result<&[CharacterVector]> {
        self.multisets
            .get(&sigma)
            .map(|w| w.weights.as_slice())
            .ok_or_else(|| Error::UnknownCone(format!("no weights for cone {sigma}")))
    }

    /// For each pair of maximal cones, the weights restricted to the rays of
    /// the shared face must agree as multisets.
    pub fn check_compatibility(&self) -> Result<CompatibilityReport> {
        let maximal = self.fan.maximal_cones();
        let mut pairs = Vec::new();
        for (a, &sigma) in maximal.iter().enumerate() {
            for &tau in &maximal[a + 1..] {
                let face = self.fan.intersection(sigma, tau)?;
                let rays = self.fan.cone(face)?.rays().to_vec();
                let restrict = |cone: ConeId| -> Result<Vec<Vec<i64>>> {
                    let mut rows: Vec<Vec<i64>> = self
                        .weights(cone)?
                        .iter()
                        .map(|m| rays.iter().map(|&r| m.pair(self.fan.ray(r))).collect())
                        .collect();
                    rows.sort();
                    Ok(rows)
                };
                let (rs, rt) = (restrict(sigma)?, restrict(tau)?);
                pairs.push(PairCompatibility {
                    sigma,
                    tau,
                    face,
                    passed: rs == rt,
                    restricted_sigma: rs,
                    restricted_tau: rt,
                });
            }
        }
        Ok(CompatibilityReport { pairs })
    }

    /// `Res_{D_rho}` in the eigenframe of `sigma`: `diag(-<m_i, v_rho>)`.
    pub fn residue(&self, sigma: ConeId, rho: usize) -> Result<ResidueMatrix> {
        let cone = self.fan.cone(sigma)?;
        if !cone.contains_ray(rho) {
            return Err(Error::DivisorNotInChart { ray: rho, cone: sigma });
        }
        let v = self.fan.ray(rho);
        Ok(ResidueMatrix {
            ray: rho,
            cone: sigma,
            entries: self.weights(sigma)?.iter().map(|m| -m.pair(v)).collect(),
        })
    }

    pub fn residues(&self, sigma: ConeId) -> Result<Vec<ResidueMatrix>> {
        self.fan
            .cone(sigma)?
            .rays()
            .iter()
            .map(|&rho| self.residue(sigma, rho))
            .collect()
    }

    pub fn connection_form(&self, sigma: ConeId) -> Result<ConnectionForm> {
        Ok(ConnectionForm {
            cone: sigma,
            weights: self.weights(sigma)?.to_vec(),
        })
    }

    /// `nabla_v` on a section written in the eigenframe of its chart:
    /// coefficient `i` becomes `delta_v(f_i) - <m_i, v> f_i`.
    pub fn apply_nabla(&self, section: &EigenSection, v: &LatticeVector) -> Result<EigenSection> {
        let weights = self.weights(section.chart)?;
        if section.coeffs.len() != weights.len() {
            return Err(Error::Dimension {
                expected: weights.len(),
                found: section.coeffs.len(),
            });
        }
        if v.rank() != self.fan.rank() {
            return Err(Error::Dimension {
                expected: self.fan.rank(),
                found: v.rank(),
            });
        }
        let coeffs = section
            .coeffs
            .iter()
            .zip(weights)
            .map(|(f, m)| &f.delta(v) - &f.scale(&int(m.pair(v))))
            .collect();
        Ok(EigenSection {
            chart: section.chart,
            coeffs,
        })
    }

    /// The sections `chi^{m_i} s_i`, invariant over the open orbit.
    pub fn invariant_sections(&self, sigma: ConeId) -> Result<Vec<EigenSection>> {
        let weights = self.weights(sigma)?;
        Ok((0..weights.len())
            .map(|i| {
                let coeffs = (0..weights.len())
                    .map(|j| {
                        if i == j {
                            LaurentPoly::character(weights[i].clone())
                        } else {
                            LaurentPoly::zero()
                        }
                    })
                    .collect();
                EigenSection { chart: sigma, coeffs }
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCompatibility {
    pub sigma: ConeId,
    pub tau: ConeId,
    pub face: ConeId,
    pub passed: bool,
    pub restricted_sigma: Vec<Vec<i64>>,
    pub restricted_tau: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub pairs: Vec<PairCompatibility>,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.passed)
    }

    pub fn to_check_report(&self) -> CheckReport {
        let mut report = CheckReport::new();
        for p in &self.pairs {
            let check = format!("compatibility[{},{}]", p.sigma, p.tau);
            if p.passed {
                report.push(Verdict::pass(
                    check,
                    format!("restrictions to face {} agree", p.face),
                ));
            } else {
                report.push(Verdict::fail(
                    check,
                    format!(
                        "face {}: {:?} vs {:?}",
                        p.face, p.restricted_sigma, p.restricted_tau
                    ),
                ));
            }
        }
        report
    }
}

/// Diagonal residue along `D_ray` in the eigenframe of `cone`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueMatrix {
    pub ray: usize,
    pub cone: ConeId,
    pub entries: Vec<i64>,
}

impl ResidueMatrix {
    pub fn to_matrix(&self, lattice_rank: usize) -> LaurentMatrix {
        LaurentMatrix::diagonal(
            self.entries
                .iter()
                .map(|&e| LaurentPoly::constant(lattice_rank, int(e)))
                .collect(),
        )
    }
}

/// Inverts [`EquivariantData::residue`] on a smooth full-dimensional cone.
pub fn recover_weights(
    fan: &Fan,
    sigma: ConeId,
    residues: &[ResidueMatrix],
) -> Result<WeightMultiset> {
    let cone = fan.cone(sigma)?;
    let rows: Vec<Vec<i64>> = cone.rays().iter().map(|&r| fan.ray(r).0.clone()).collect();
    let factors = smith_invariants(&rows);
    if cone.dim() != fan.rank() || factors.len() != fan.rank() {
        return Err(Error::Underdetermined(format!(
            "cone {sigma} is not full-dimensional"
        )));
    }
    if factors.iter().any(|&d| d != 1) {
        return Err(Error::Underdetermined(format!(
            "cone {sigma} is not smooth (invariant factors {factors:?})"
        )));
    }

    let mut by_ray = BTreeMap::new();
    for res in residues {
        if !cone.contains_ray(res.ray) {
            return Err(Error::DivisorNotInChart { ray: res.ray, cone: sigma });
        }
        if by_ray.insert(res.ray, res).is_some() {
            return Err(Error::Structural(format!("two residues along ray {}", res.ray)));
        }
    }
    if by_ray.len() != cone.dim() {
        return Err(Error::Structural(format!(
            "need one residue per ray of cone {sigma}, got {}",
            by_ray.len()
        )));
    }
    let r = residues[0].entries.len();
    if residues.iter().any(|res| res.entries.len() != r) {
        return Err(Error::Structural("residues of different sizes".into()));
    }

    let a: Vec<Vec<Rational>> = cone
        .rays()
        .iter()
        .map(|&ray| fan.ray(ray).coords().iter().map(|&c| int(c)).collect())
        .collect();
    let mut weights = Vec::with_capacity(r);
    for i in 0..r {
        let b: Vec<Rational> = cone.rays().iter().map(|ray| int(-by_ray[ray].entries[i])).collect();
        let m = solve_unique(&a, &b)
            .ok_or_else(|| Error::NoSolution(format!("singular ray system on cone {sigma}")))?;
        let coords = m
            .iter()
            .map(|q| {
                if q.is_integer() {
                    num_traits::ToPrimitive::to_i64(q.numer())
                        .ok_or_else(|| Error::NoSolution("weight out of range".into()))
                } else {
                    Err(Error::NoSolution(format!("non-integral weight coordinate {q}")))
                }
            })
            .collect::<Result<Vec<i64>>>()?;
        weights.push(CharacterVector::new(coords));
    }
    Ok(WeightMultiset::new(sigma, weights))
}

/// `v -> diag(-<m_i, v>)`, the canonical connection matrix in the eigenframe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionForm {
    pub cone: ConeId,
    pub weights: Vec<CharacterVector>,
}

impl ConnectionForm {
    pub fn eval(&self, v: &LatticeVector) -> Vec<i64> {
        self.weights.iter().map(|m| -m.pair(v)).collect()
    }

    pub fn matrix(&self, v: &LatticeVector) -> LaurentMatrix {
        let n = v.rank();
        LaurentMatrix::diagonal(
            self.eval(v)
                .into_iter()
                .map(|e| {
                    if e == 0 {
                        LaurentPoly::zero()
                    } else {
                        LaurentPoly::constant(n, int(e))
                    }
                })
                .collect(),
        )
    }
}

/// A local section `sum f_i s_i` in the eigenframe of `chart`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenSection {
    pub chart: ConeId,
    pub coeffs: Vec<LaurentPoly>,
}

impl EigenSection {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LaurentPoly::is_zero)
    }

    /// Whether every coefficient is regular on the chart `U_sigma`.
    pub fn is_regular(&self, fan: &Fan) -> bool {
        self.coeffs.iter().all(|f| f.in_cone_ring(fan, self.chart))
    }

    pub fn scale(&self, g: &LaurentPoly) -> Self {
        Self {
            chart: self.chart,
            coeffs: self.coeffs.iter().map(|f| f * g).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            chart: self.chart,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Weights `m_sigma` with `<m_sigma, v_rho> = -a_rho` on each maximal cone,
/// i.e. the Cartier data of the torus-invariant divisor `sum a_rho D_rho`.
/// Requires smooth full-dimensional maximal cones.
pub fn divisor_weights(fan: &Fan, divisor: &[i64]) -> Result<BTreeMap<ConeId, CharacterVector>> {
    if divisor.len() != fan.rays().len() {
        return Err(Error::Dimension {
            expected: fan.rays().len(),
            found: divisor.len(),
        });
    }
    let mut out = BTreeMap::new();
    for &sigma in fan.maximal_cones() {
        let residues: Vec<ResidueMatrix> = fan
            .cone(sigma)?
            .rays()
            .iter()
            .map(|&rho| ResidueMatrix {
                ray: rho,
                cone: sigma,
                entries: vec![divisor[rho]],
            })
            .collect();
        let ws = recover_weights(fan, sigma, &residues)?;
        out.insert(sigma, ws.weights[0].clone());
    }
    Ok(out)
}

/// Equivariant data of the direct sum of line bundles given by per-cone
/// weights of each summand.
pub fn direct_sum(
    fan: Arc<Fan>,
    summands: &[BTreeMap<ConeId, CharacterVector>],
) -> Result<EquivariantData> {
    let mut weights: BTreeMap<ConeId, Vec<CharacterVector>> = BTreeMap::new();
    for summand in summands {
        for (&id, m) in summand {
            weights.entry(id).or_default().push(m.clone());
        }
    }
    EquivariantData::new(fan, summands.len(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(c: &[i64]) -> CharacterVector {
        CharacterVector::new(c.to_vec())
    }

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector::new(c.to_vec())
    }

    fn p1() -> Arc<Fan> {
        Arc::new(Fan::projective_space(1))
    }

    fn data(fan: Arc<Fan>, rank: usize, w: Vec<Vec<Vec<i64>>>) -> EquivariantData {
        let max = fan.maximal_cones().to_vec();
        let weights = max
            .into_iter()
            .zip(w)
            .map(|(id, ws)| (id, ws.iter().map(|m| cv(m)).collect()))
            .collect();
        EquivariantData::new(fan, rank, weights).unwrap()
    }

    #[test]
    fn p1_rank_one_always_compatible() {
        let d = data(p1(), 1, vec![vec![vec![0]], vec![vec![5]]]);
        assert!(d.check_compatibility().unwrap().passed());
    }

    #[test]
    fn p2_compatibility_on_shared_ray() {
        // Cones {1,2} and {0,2} share ray 2 = (-1,-1); weights (0,0) and (a,-a) pair to 0.
        let fan = Arc::new(Fan::projective_space(2));
        let max = fan.maximal_cones().to_vec();
        let mut w = BTreeMap::new();
        w.insert(max[0], vec![cv(&[0, 0])]);
        w.insert(max[1], vec![cv(&[0, 0])]);
        w.insert(max[2], vec![cv(&[0, 0])]);
        let ok = EquivariantData::new(fan.clone(), 1, w.clone()).unwrap();
        assert!(ok.check_compatibility().unwrap().passed());

        // (0,1) pairs to 1 with e_2 where (0,0) pairs to 0.
        let cone_e1e2 = fan.cone_id(&crate::fan::Cone::new(vec![0, 1])).unwrap();
        let other = *max.iter().find(|&&id| id != cone_e1e2 && fan.cones()[id].contains_ray(1)).unwrap();
        w.insert(other, vec![cv(&[0, 1])]);
        let bad = EquivariantData::new(fan, 1, w).unwrap();
        let report = bad.check_compatibility().unwrap();
        assert!(!report.passed());
        let failing: Vec<_> = report.pairs.iter().filter(|p| !p.passed).collect();
        assert!(failing.iter().any(|p| p.restricted_sigma != p.restricted_tau));
    }

    #[test]
    fn residue_examples() {
        let fan = Arc::new(Fan::from_maximal(2, vec![lv(&[1, 0]), lv(&[0, 1])], &[vec![0, 1]], false).unwrap());
        let sigma = fan.maximal_cones()[0];
        let mut w = BTreeMap::new();
        w.insert(sigma, vec![cv(&[1, 0]), cv(&[0, 1])]);
        let d = EquivariantData::new(fan.clone(), 2, w).unwrap();
        // sorted eigenframe order: (0,1), (1,0)
        assert_eq!(d.residue(sigma, 0).unwrap().entries, vec![0, -1]);
        assert_eq!(d.residue(sigma, 1).unwrap().entries, vec![-1, 0]);

        let ray_fan = Arc::new(Fan::from_maximal(2, vec![lv(&[1, 0])], &[vec![0]], false).unwrap());
        let s = ray_fan.maximal_cones()[0];
        let d = EquivariantData::new(ray_fan, 1, [(s, vec![cv(&[3, 5])])].into()).unwrap();
        assert_eq!(d.residue(s, 0).unwrap().entries, vec![-3]);
    }

    #[test]
    fn residue_requires_ray_of_chart() {
        let fan = Arc::new(Fan::projective_space(2));
        let d = data(fan.clone(), 1, vec![vec![vec![0, 0]]; 3]);
        let sigma = fan.cone_id(&crate::fan::Cone::new(vec![0, 1])).unwrap();
        assert_eq!(
            d.residue(sigma, 2),
            Err(Error::DivisorNotInChart { ray: 2, cone: sigma })
        );
    }

    #[test]
    fn recover_identity_ray_matrix() {
        let fan = Fan::from_maximal(2, vec![lv(&[1, 0]), lv(&[0, 1])], &[vec![0, 1]], false).unwrap();
        let sigma = fan.maximal_cones()[0];
        let residues = vec![
            ResidueMatrix { ray: 0, cone: sigma, entries: vec![-1, 0] },
            ResidueMatrix { ray: 1, cone: sigma, entries: vec![0, -1] },
        ];
        let ws = recover_weights(&fan, sigma, &residues).unwrap();
        assert_eq!(ws.weights, vec![cv(&[0, 1]), cv(&[1, 0])]);

        let zero = vec![
            ResidueMatrix { ray: 0, cone: sigma, entries: vec![0, 0] },
            ResidueMatrix { ray: 1, cone: sigma, entries: vec![0, 0] },
        ];
        assert_eq!(recover_weights(&fan, sigma, &zero).unwrap().weights, vec![cv(&[0, 0]); 2]);
    }

    #[test]
    fn recover_rejects_non_smooth() {
        let fan = Fan::from_maximal(2, vec![lv(&[1, 0]), lv(&[1, 2])], &[vec![0, 1]], false).unwrap();
        let sigma = fan.maximal_cones()[0];
        let residues = vec![
            ResidueMatrix { ray: 0, cone: sigma, entries: vec![0] },
            ResidueMatrix { ray: 1, cone: sigma, entries: vec![-1] },
        ];
        assert!(matches!(
            recover_weights(&fan, sigma, &residues),
            Err(Error::Underdetermined(_))
        ));
    }

    #[test]
    fn recover_rejects_lower_dimensional() {
        let fan = Fan::projective_space(2);
        let ray = fan.cone_id(&crate::fan::Cone::new(vec![0])).unwrap();
        let res = vec![ResidueMatrix { ray: 0, cone: ray, entries: vec![1] }];
        assert!(matches!(recover_weights(&fan, ray, &res), Err(Error::Underdetermined(_))));
    }

    #[test]
    fn connection_form_examples() {
        let f = ConnectionForm { cone: 0, weights: vec![cv(&[1, 0]), cv(&[0, 1])] };
        assert_eq!(f.eval(&lv(&[1, 1])), vec![-1, -1]);
        assert_eq!(f.eval(&lv(&[0, 0])), vec![0, 0]);
        let g = ConnectionForm { cone: 0, weights: vec![cv(&[7])] };
        assert_eq!(g.eval(&lv(&[1])), vec![-7]);
    }

    #[test]
    fn nabla_examples() {
        let fan = Arc::new(Fan::from_maximal(2, vec![lv(&[1, 0]), lv(&[0, 1])], &[vec![0, 1]], false).unwrap());
        let sigma = fan.maximal_cones()[0];
        let d = EquivariantData::new(fan, 1, [(sigma, vec![cv(&[1, 0])])].into()).unwrap();
        let s = EigenSection { chart: sigma, coeffs: vec![LaurentPoly::character(cv(&[2, 0]))] };
        let out = d.apply_nabla(&s, &lv(&[1, 0])).unwrap();
        assert_eq!(out.coeffs, vec![LaurentPoly::character(cv(&[2, 0]))]);

        let c = EigenSection { chart: sigma, coeffs: vec![LaurentPoly::constant(2, int(3))] };
        let out = d.apply_nabla(&c, &lv(&[2, 5])).unwrap();
        assert_eq!(out.coeffs, vec![LaurentPoly::constant(2, int(-6))]);

        for s in d.invariant_sections(sigma).unwrap() {
            assert!(d.apply_nabla(&s, &lv(&[3, -4])).unwrap().is_zero());
        }
    }

    #[test]
    fn structural_errors() {
        let fan = p1();
        let max = fan.maximal_cones().to_vec();
        let mut w = BTreeMap::new();
        w.insert(max[0], vec![cv(&[0])]);
        assert!(matches!(EquivariantData::new(fan.clone(), 1, w.clone()), Err(Error::Structural(_))));
        w.insert(max[1], vec![cv(&[0]), cv(&[1])]);
        assert!(matches!(EquivariantData::new(fan, 1, w), Err(Error::Structural(_))));
    }

    #[test]
    fn divisor_weights_on_p1() {
        let fan = Fan::projective_space(1);
        let w = divisor_weights(&fan, &[3, 0]).unwrap();
        let max = fan.maximal_cones();
        // cone {0} with ray (1): <m,1> = -3
        assert_eq!(w[&max[0]], cv(&[-3]));
        assert_eq!(w[&max[1]], cv(&[0]));
    }
}
