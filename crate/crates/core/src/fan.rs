//! Simplicial fans: rays, cones by ray index sets, face relations, and
//! validation (simplicial, smooth, complete, face-closed).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{primitivize, smith_invariants, LatticeVector};
use crate::report::{CheckReport, Status, Verdict};

/// Index of a cone in [`Fan::cones`].
pub type ConeId = usize;

/// A cone given by the sorted set of its ray indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cone {
    ray_indices: Vec<usize>,
}

impl Cone {
    pub fn new(mut ray_indices: Vec<usize>) -> Self {
        ray_indices.sort_unstable();
        ray_indices.dedup();
        Self { ray_indices }
    }

    pub fn rays(&self) -> &[usize] {
        &self.ray_indices
    }

    pub fn dim(&self) -> usize {
        self.ray_indices.len()
    }

    pub fn contains_ray(&self, ray: usize) -> bool {
        self.ray_indices.binary_search(&ray).is_ok()
    }

    pub fn is_subset_of(&self, other: &Cone) -> bool {
        self.ray_indices.iter().all(|r| other.contains_ray(*r))
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        Cone {
            ray_indices: self
                .ray_indices
                .iter()
                .copied()
                .filter(|r| other.contains_ray(*r))
                .collect(),
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.ray_indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    cones: Vec<Cone>,
    declared_complete: bool,
    maximal: Vec<ConeId>,
    index: BTreeMap<Cone, ConeId>,
    warnings: Vec<String>,
}

impl Fan {
    /// Builds a fan, primitivizing ray generators (with a warning) and
    /// rejecting structurally broken input. Geometric properties are left to
    /// [`validate_fan`].
    pub fn new(
        rank: usize,
        rays: Vec<LatticeVector>,
        cones: Vec<Vec<usize>>,
        declared_complete: bool,
    ) -> Result<Self> {
        let mut warnings = Vec::new();
        let mut prim = Vec::with_capacity(rays.len());
        for (i, ray) in rays.into_iter().enumerate() {
            if ray.rank() != rank {
                return Err(Error::Dimension {
                    expected: rank,
                    found: ray.rank(),
                });
            }
            let p = primitivize(&ray)
                .map_err(|_| Error::InvalidFan(format!("ray {i} is the zero vector")))?;
            if p != ray {
                warnings.push(format!("ray {i} {ray} normalized to primitive generator {p}"));
            }
            prim.push(p);
        }
        let distinct: BTreeSet<_> = prim.iter().collect();
        if distinct.len() != prim.len() {
            return Err(Error::InvalidFan("two rays share a primitive generator".into()));
        }

        let mut index = BTreeMap::new();
        let mut parsed = Vec::with_capacity(cones.len());
        for (id, raw) in cones.into_iter().enumerate() {
            if let Some(&bad) = raw.iter().find(|&&r| r >= prim.len()) {
                return Err(Error::InvalidFan(format!(
                    "cone {id} references missing ray {bad}"
                )));
            }
            let cone = Cone::new(raw.clone());
            if cone.dim() != raw.len() {
                return Err(Error::InvalidFan(format!("cone {id} repeats a ray index")));
            }
            if let Some(prev) = index.insert(cone.clone(), id) {
                return Err(Error::InvalidFan(format!(
                    "cones {prev} and {id} have the same ray set {cone}"
                )));
            }
            parsed.push(cone);
        }

        let maximal = (0..parsed.len())
            .filter(|&i| {
                !parsed
                    .iter()
                    .any(|other| other != &parsed[i] && parsed[i].is_subset_of(other))
            })
            .collect();

        Ok(Self {
            rank,
            rays: prim,
            cones: parsed,
            declared_complete,
            maximal,
            index,
            warnings,
        })
    }

    /// Builds the fan generated by `maximal` cones, listing every face.
    /// Cones are ordered by dimension, then lexicographically.
    pub fn from_maximal(
        rank: usize,
        rays: Vec<LatticeVector>,
        maximal: &[Vec<usize>],
        declared_complete: bool,
    ) -> Result<Self> {
        let mut faces = BTreeSet::new();
        for cone in maximal {
            let cone = Cone::new(cone.clone());
            let k = cone.dim();
            for mask in 0u64..(1u64 << k) {
                let subset: Vec<usize> = (0..k)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| cone.rays()[b])
                    .collect();
                faces.insert((subset.len(), subset));
            }
        }
        let cones = faces.into_iter().map(|(_, c)| c).collect();
        Self::new(rank, rays, cones, declared_complete)
    }

    /// Fan of projective `n`-space: rays `e_1..e_n, -(e_1+...+e_n)`.
    pub fn projective_space(n: usize) -> Self {
        let mut rays: Vec<LatticeVector> = (0..n).map(|k| LatticeVector::basis(n, k)).collect();
        rays.push(LatticeVector::new(vec![-1; n]));
        let maximal: Vec<Vec<usize>> = (0..=n)
            .map(|skip| (0..=n).filter(|&i| i != skip).collect())
            .collect();
        Self::from_maximal(n, rays, &maximal, true).expect("standard fan is well formed")
    }

    /// Hirzebruch surface: rays `(1,0), (0,1), (-1,a), (0,-1)`. `a = 0` is P1 x P1.
    pub fn hirzebruch(a: i64) -> Self {
        let rays = vec![
            LatticeVector::new(vec![1, 0]),
            LatticeVector::new(vec![0, 1]),
            LatticeVector::new(vec![-1, a]),
            LatticeVector::new(vec![0, -1]),
        ];
        let maximal = [vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
        Self::from_maximal(2, rays, &maximal, true).expect("standard fan is well formed")
    }

    pub fn p1_times_p1() -> Self {
        Self::hirzebruch(0)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, id: ConeId) -> Result<&Cone> {
        self.cones
            .get(id)
            .ok_or_else(|| Error::UnknownCone(format!("no cone with id {id}")))
    }

    pub fn cone_id(&self, cone: &Cone) -> Option<ConeId> {
        self.index.get(cone).copied()
    }

    pub fn declared_complete(&self) -> bool {
        self.declared_complete
    }

    /// Normalization notes collected during construction.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Cones not strictly contained in another listed cone, in id order.
    pub fn maximal_cones(&self) -> &[ConeId] {
        &self.maximal
    }

    pub fn is_maximal(&self, id: ConeId) -> bool {
        self.maximal.binary_search(&id).is_ok()
    }

    /// The listed cone whose rays are the shared rays of `a` and `b`.
    pub fn intersection(&self, a: ConeId, b: ConeId) -> Result<ConeId> {
        let shared = self.cone(a)?.intersect(self.cone(b)?);
        self.cone_id(&shared).ok_or_else(|| {
            Error::InvalidFan(format!(
                "intersection {shared} of cones {a} and {b} is not listed"
            ))
        })
    }

    pub fn generators(&self, id: ConeId) -> Result<Vec<&LatticeVector>> {
        Ok(self.cone(id)?.rays().iter().map(|&r| &self.rays[r]).collect())
    }

    pub fn is_full_dimensional(&self, id: ConeId) -> Result<bool> {
        let rows: Vec<Vec<i64>> = self.generators(id)?.iter().map(|v| v.0.clone()).collect();
        Ok(smith_invariants(&rows).len() == self.rank)
    }

    /// Smooth: generators extend to a basis of `N`, i.e. all Smith
    /// invariant factors of the generator matrix equal 1.
    pub fn is_smooth(&self, id: ConeId) -> Result<bool> {
        let rows: Vec<Vec<i64>> = self.generators(id)?.iter().map(|v| v.0.clone()).collect();
        let factors = smith_invariants(&rows);
        Ok(factors.len() == rows.len() && factors.iter().all(|&d| d == 1))
    }
}

/// `tau <= sigma` for simplicial cones: ray set inclusion.
pub fn is_face(tau: &Cone, sigma: &Cone, fan: &Fan) -> Result<bool> {
    for c in [tau, sigma] {
        if fan.cone_id(c).is_none() {
            return Err(Error::UnknownCone(format!("cone {c} is not in the fan")));
        }
    }
    Ok(tau.is_subset_of(sigma))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub simplicial: Verdict,
    pub smooth: Verdict,
    pub complete: Verdict,
    pub face_closed: Verdict,
    /// Smoothness per cone, with Smith invariant factors of the generators.
    pub smooth_cones: BTreeMap<ConeId, (bool, Vec<i64>)>,
}

impl ValidationReport {
    /// Structural validity: simplicial and face-closed, not contradicting
    /// the declared completeness. Smoothness is reported but not required.
    pub fn is_valid(&self) -> bool {
        self.simplicial.status == Status::Pass
            && self.face_closed.status == Status::Pass
            && self.complete.status != Status::Fail
    }

    pub fn to_check_report(&self) -> CheckReport {
        CheckReport {
            verdicts: vec![
                self.simplicial.clone(),
                self.smooth.clone(),
                self.complete.clone(),
                self.face_closed.clone(),
            ],
        }
    }
}

pub fn validate_fan(fan: &Fan) -> ValidationReport {
    let mut non_simplicial = Vec::new();
    let mut non_smooth = Vec::new();
    let mut smooth_cones = BTreeMap::new();

    for (id, cone) in fan.cones().iter().enumerate() {
        let rows: Vec<Vec<i64>> = cone.rays().iter().map(|&r| fan.ray(r).0.clone()).collect();
        let factors = smith_invariants(&rows);
        if factors.len() != cone.dim() {
            non_simplicial.push(format!("cone {id} {cone}"));
            smooth_cones.insert(id, (false, factors));
            continue;
        }
        let smooth = factors.iter().all(|&d| d == 1);
        if !smooth {
            let mut note = format!("cone {id} {cone}: invariant factors {factors:?}");
            if cone.dim() == fan.rank() {
                let det: i64 = factors.iter().product();
                note.push_str(&format!(", |det| = {det}"));
            }
            non_smooth.push(note);
        }
        smooth_cones.insert(id, (smooth, factors));
    }

    let simplicial = if non_simplicial.is_empty() {
        Verdict::pass("simplicial", "all cone generators linearly independent")
    } else {
        Verdict::fail(
            "simplicial",
            format!("dependent generators in {}", non_simplicial.join("; ")),
        )
    };
    let smooth = if non_smooth.is_empty() {
        Verdict::pass("smooth", "every cone extends to a lattice basis")
    } else {
        Verdict::fail("smooth", non_smooth.join("; "))
    };

    ValidationReport {
        simplicial,
        smooth,
        complete: check_complete(fan),
        face_closed: check_face_closed(fan),
        smooth_cones,
    }
}

fn check_complete(fan: &Fan) -> Verdict {
    let n = fan.rank();
    let maximal = fan.maximal_cones();
    let pure = !maximal.is_empty() && maximal.iter().all(|&id| fan.cones[id].dim() == n);
    if !pure || n == 0 {
        return Verdict::undetermined(
            "complete",
            format!(
                "maximal cones not all full-dimensional; trusting declared_complete={}",
                fan.declared_complete()
            ),
        );
    }

    let mut facet_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for &id in maximal {
        let rays = fan.cones[id].rays();
        for skip in 0..rays.len() {
            let facet: Vec<usize> = rays
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &r)| r)
                .collect();
            *facet_count.entry(facet).or_default() += 1;
        }
    }
    let unpaired: Vec<String> = facet_count
        .iter()
        .filter(|(_, &c)| c != 2)
        .map(|(f, c)| format!("facet {f:?} in {c} maximal cone(s)"))
        .collect();

    match (unpaired.is_empty(), fan.declared_complete()) {
        (true, _) => Verdict::pass(
            "complete",
            format!("{} facets each shared by exactly two maximal cones", facet_count.len()),
        ),
        (false, true) => Verdict::fail(
            "complete",
            format!("declared complete but {}", unpaired.join("; ")),
        ),
        (false, false) => Verdict::pass(
            "complete",
            "not complete, consistent with declared_complete=false",
        ),
    }
}

fn check_face_closed(fan: &Fan) -> Verdict {
    let mut missing = BTreeSet::new();
    for cone in fan.cones() {
        let k = cone.dim();
        if k >= 64 {
            missing.insert(format!("{cone} (too many rays to enumerate faces)"));
            continue;
        }
        for mask in 0u64..(1u64 << k) {
            let face = Cone::new(
                (0..k)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| cone.rays()[b])
                    .collect(),
            );
            if fan.cone_id(&face).is_none() {
                missing.insert(face.to_string());
            }
        }
    }
    if missing.is_empty() {
        Verdict::pass("face_closed", "every face of every cone is listed")
    } else {
        let list: Vec<_> = missing.into_iter().collect();
        Verdict::fail("face_closed", format!("missing faces {}", list.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector::new(c.to_vec())
    }

    fn p1() -> Fan {
        Fan::new(1, vec![lv(&[1]), lv(&[-1])], vec![vec![], vec![0], vec![1]], true).unwrap()
    }

    #[test]
    fn p1_validates() {
        let report = validate_fan(&p1());
        assert!(report.to_check_report().passed(), "{report:?}");
        assert_eq!(p1().maximal_cones(), &[1, 2]);
    }

    #[test]
    fn p2_validates() {
        let fan = Fan::projective_space(2);
        assert_eq!(fan.cones().len(), 7);
        assert_eq!(fan.maximal_cones().len(), 3);
        let report = validate_fan(&fan);
        assert!(report.to_check_report().passed(), "{report:?}");
        assert!(report.complete.detail.contains("3 facets"));
    }

    #[test]
    fn non_smooth_cone_reports_det_two() {
        let fan = Fan::from_maximal(2, vec![lv(&[1, 0]), lv(&[1, 2])], &[vec![0, 1]], false).unwrap();
        let report = validate_fan(&fan);
        assert_eq!(report.smooth.status, Status::Fail);
        assert!(report.smooth.detail.contains("|det| = 2"), "{}", report.smooth.detail);
        assert_eq!(report.simplicial.status, Status::Pass);
        assert!(report.is_valid());
    }

    #[test]
    fn non_simplicial_rejected() {
        let rays = vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[1, 1])];
        let fan = Fan::new(2, rays, vec![vec![], vec![0], vec![1], vec![2], vec![0, 1, 2]], false)
            .unwrap();
        let report = validate_fan(&fan);
        assert_eq!(report.simplicial.status, Status::Fail);
        assert!(!report.is_valid());
    }

    #[test]
    fn missing_face_detected() {
        let fan = Fan::new(2, vec![lv(&[1, 0]), lv(&[0, 1])], vec![vec![0, 1], vec![0]], false)
            .unwrap();
        let report = validate_fan(&fan);
        assert_eq!(report.face_closed.status, Status::Fail);
        assert!(report.face_closed.detail.contains("{1}"));
    }

    #[test]
    fn incomplete_declared_complete_fails() {
        let fan = Fan::from_maximal(
            2,
            vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, 0])],
            &[vec![0, 1], vec![1, 2]],
            true,
        )
        .unwrap();
        assert_eq!(validate_fan(&fan).complete.status, Status::Fail);
    }

    #[test]
    fn non_pure_fan_is_undetermined() {
        let fan = Fan::from_maximal(
            2,
            vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])],
            &[vec![0, 1], vec![2]],
            true,
        )
        .unwrap();
        let v = validate_fan(&fan).complete;
        assert_eq!(v.status, Status::Undetermined);
        assert!(v.detail.contains("declared_complete=true"));
    }

    #[test]
    fn non_primitive_ray_normalized_with_warning() {
        let fan = Fan::new(2, vec![lv(&[2, 4]), lv(&[0, 1])], vec![vec![]], false).unwrap();
        assert_eq!(fan.ray(0), &lv(&[1, 2]));
        assert_eq!(fan.warnings().len(), 1);
    }

    #[test]
    fn duplicate_cone_rejected() {
        let err = Fan::new(1, vec![lv(&[1])], vec![vec![0], vec![0]], false).unwrap_err();
        assert!(matches!(err, Error::InvalidFan(_)));
    }

    #[test]
    fn face_relation() {
        let fan = Fan::projective_space(2);
        let s = Cone::new(vec![0, 1]);
        assert!(is_face(&Cone::new(vec![]), &s, &fan).unwrap());
        assert!(is_face(&Cone::new(vec![0]), &s, &fan).unwrap());
        assert!(!is_face(&Cone::new(vec![2]), &s, &fan).unwrap());
        assert!(matches!(
            is_face(&Cone::new(vec![0, 1, 2]), &s, &fan),
            Err(Error::UnknownCone(_))
        ));
    }

    #[test]
    fn hirzebruch_is_smooth_complete() {
        for a in 0..4 {
            assert!(validate_fan(&Fan::hirzebruch(a)).to_check_report().passed());
        }
    }
}
