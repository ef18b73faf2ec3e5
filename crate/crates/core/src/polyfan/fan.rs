use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;

use super::cone::{self, FaceError, HRep};
use crate::error::{Error, Result};
use crate::exactlin::{dot, is_primitive, lattice_index, rank_of_rows, saturate, LatticeBasis, LatticeChart, LatticeIndex, Vector};

/// A cone of a fan, named by the indices of its rays.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    dim: usize,
    rays: Vec<usize>,
}

impl Cone {
    pub fn rays(&self) -> &[usize] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    /// Face test by ray containment (valid inside a fan).
    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.rays.iter().all(|r| other.rays.binary_search(r).is_ok())
    }
}

/// Lattice data of a single cone, computed on first use.
#[derive(Clone, Debug)]
pub struct ConeGeometry {
    /// Saturated lattice `N_σ` spanned by the cone.
    pub lattice: LatticeBasis,
    pub chart: LatticeChart,
    pub hrep: HRep,
}

/// A rational polyhedral fan in `ℤ^ambient_rank`.
///
/// Cones are closed under taking faces and are sorted by dimension, then by their
/// ray lists; index 0 is always the origin. Ray indices follow the input order.
#[derive(Clone)]
pub struct Fan {
    ambient_rank: usize,
    rays: Vec<Vector>,
    cones: Vec<Cone>,
    lookup: HashMap<Vec<usize>, usize>,
    facets: Vec<Vec<usize>>,
    cofacets: Vec<Vec<usize>>,
    geometry: Vec<OnceLock<ConeGeometry>>,
}

impl Fan {
    /// Validated construction. `cones` may be any generating collection (for example
    /// just the maximal cones); faces are added. Rejects non-primitive or repeated
    /// rays, cones with lines or redundant generators, unused rays and pairs of cones
    /// that do not meet in a common face.
    pub fn new(ambient_rank: usize, rays: Vec<Vector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        validate_rays(ambient_rank, &rays)?;
        let fan = Self::close(ambient_rank, rays, cones)?;
        for (i, _) in fan.rays.iter().enumerate() {
            if !fan.lookup.contains_key(&vec![i]) {
                return Err(Error::MissingFace { cone: vec![], face: vec![i] });
            }
        }
        fan.check_intersections()?;
        Ok(fan)
    }

    /// Like [`Fan::new`] but the given cones must already be closed under faces.
    pub fn new_face_closed(ambient_rank: usize, rays: Vec<Vector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        let listed: BTreeSet<Vec<usize>> = cones
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        let fan = Self::new(ambient_rank, rays, cones)?;
        for c in &fan.cones {
            if !c.rays.is_empty() && !listed.contains(&c.rays) {
                let parent = listed.iter().find(|p| c.rays.iter().all(|r| p.contains(r))).cloned().unwrap_or_default();
                return Err(Error::MissingFace { cone: parent, face: c.rays.clone() });
            }
        }
        Ok(fan)
    }

    /// Construction for cones produced by the library's own operations. Faces are
    /// enumerated but pairwise intersections are not checked.
    pub(crate) fn trusted(ambient_rank: usize, rays: Vec<Vector>, cones: Vec<Vec<usize>>) -> Fan {
        debug_assert!(validate_rays(ambient_rank, &rays).is_ok(), "invalid rays {rays:?}");
        Self::close(ambient_rank, rays, cones).expect("trusted cone data")
    }

    /// The fan consisting of the origin only.
    pub fn zero(ambient_rank: usize) -> Fan {
        Self::trusted(ambient_rank, vec![], vec![])
    }

    /// The complete fan of coordinate orthants in `ℝ^rank`.
    pub fn orthants(rank: usize) -> Fan {
        let mut rays = Vec::new();
        for i in 0..rank {
            for s in [1i64, -1] {
                let mut v = vec![BigInt::from(0); rank];
                v[i] = BigInt::from(s);
                rays.push(v);
            }
        }
        let mut cones = Vec::new();
        for mask in 0u64..(1u64 << rank) {
            cones.push((0..rank).map(|i| 2 * i + (mask >> i & 1) as usize).collect());
        }
        Self::trusted(rank, rays, cones)
    }

    fn close(ambient_rank: usize, rays: Vec<Vector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        let mut all: BTreeSet<Cone> = BTreeSet::new();
        all.insert(Cone { dim: 0, rays: vec![] });
        for mut c in cones {
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&r| r >= rays.len()) {
                return Err(Error::RayIndexOutOfRange(bad));
            }
            if all.iter().any(|k| k.rays == c) {
                continue;
            }
            let gens: Vec<Vector> = c.iter().map(|&r| rays[r].clone()).collect();
            let faces = match cone::faces(&gens, ambient_rank) {
                Ok(f) => f,
                Err(FaceError::NotPointed) => return Err(Error::NotStronglyConvex { cone: c }),
                Err(FaceError::Redundant(i)) => return Err(Error::RedundantGenerator { cone: c.clone(), ray: c[i] }),
            };
            for f in faces {
                let face_rays: Vec<usize> = f.iter().map(|&i| c[i]).collect();
                let dim = if face_rays.len() <= 1 {
                    face_rays.len()
                } else {
                    rank_of_rows(face_rays.iter().map(|&r| rays[r].clone()).collect())
                };
                all.insert(Cone { dim, rays: face_rays });
            }
        }
        let cones: Vec<Cone> = all.into_iter().collect();
        let lookup: HashMap<Vec<usize>, usize> = cones.iter().enumerate().map(|(i, c)| (c.rays.clone(), i)).collect();
        let mut facets = vec![Vec::new(); cones.len()];
        let mut cofacets = vec![Vec::new(); cones.len()];
        for (i, c) in cones.iter().enumerate() {
            if c.dim == 0 {
                continue;
            }
            for (j, f) in cones.iter().enumerate() {
                if f.dim + 1 == c.dim && f.is_face_of(c) {
                    facets[i].push(j);
                    cofacets[j].push(i);
                }
            }
        }
        let geometry = (0..cones.len()).map(|_| OnceLock::new()).collect();
        Ok(Fan { ambient_rank, rays, cones, lookup, facets, cofacets, geometry })
    }

    fn check_intersections(&self) -> Result<()> {
        let maximal = self.maximal_cones();
        for (a_pos, &a) in maximal.iter().enumerate() {
            for &b in &maximal[a_pos + 1..] {
                self.check_pair(a, b)?;
            }
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        let ca = &self.cones[a];
        let cb = &self.cones[b];
        let overlap = || Error::OverlappingCones { a: ca.rays.clone(), b: cb.rays.clone() };
        let common: Vec<usize> = ca.rays.iter().copied().filter(|r| cb.rays.binary_search(r).is_ok()).collect();
        if !self.lookup.contains_key(&common) || !self.spans_face(a, &common) || !self.spans_face(b, &common) {
            return Err(overlap());
        }
        let mut union: Vec<usize> = ca.rays.iter().chain(cb.rays.iter()).copied().collect();
        union.sort_unstable();
        union.dedup();
        let union_gens: Vec<Vector> = union.iter().map(|&r| self.rays[r].clone()).collect();
        if rank_of_rows(union_gens) == union.len() {
            return Ok(());
        }
        let inter = self.geometry(a).hrep.intersect(&self.geometry(b).hrep);
        let common_idx = self.lookup[&common];
        let common_h = &self.geometry(common_idx).hrep;
        for r in cone::extreme_rays(&inter) {
            if !common_h.contains(&r) {
                return Err(overlap());
            }
        }
        Ok(())
    }

    /// Whether the given rays of cone `i` generate a face of it, decided by the
    /// facets tight at an interior point of the candidate.
    fn spans_face(&self, i: usize, subset: &[usize]) -> bool {
        let mut p = vec![BigInt::from(0); self.ambient_rank];
        for &r in subset {
            for (s, x) in p.iter_mut().zip(&self.rays[r]) {
                *s += x;
            }
        }
        let tight: Vec<&Vector> =
            self.geometry(i).hrep.inequalities.iter().filter(|u| dot(u, &p).is_zero()).collect();
        self.cones[i]
            .rays
            .iter()
            .filter(|&&r| tight.iter().all(|u| dot(u, &self.rays[r]).is_zero()))
            .eq(subset.iter())
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &Vector {
        &self.rays[i]
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> &Cone {
        &self.cones[i]
    }

    pub fn n_cones(&self) -> usize {
        self.cones.len()
    }

    pub fn index_of(&self, rays: &[usize]) -> Option<usize> {
        let mut key = rays.to_vec();
        key.sort_unstable();
        self.lookup.get(&key).copied()
    }

    /// Index of the cone spanned by a single ray.
    pub fn ray_cone(&self, ray: usize) -> usize {
        self.lookup[&vec![ray]]
    }

    pub fn find_ray(&self, v: &[BigInt]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == v)
    }

    pub fn generators(&self, i: usize) -> Vec<Vector> {
        self.cones[i].rays.iter().map(|&r| self.rays[r].clone()).collect()
    }

    pub fn dim(&self) -> usize {
        self.cones.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn facets_of(&self, i: usize) -> &[usize] {
        &self.facets[i]
    }

    pub fn cofacets_of(&self, i: usize) -> &[usize] {
        &self.cofacets[i]
    }

    /// Cones having cone `i` as a face (including itself).
    pub fn star_cones(&self, i: usize) -> Vec<usize> {
        let c = &self.cones[i];
        (0..self.cones.len()).filter(|&j| c.is_face_of(&self.cones[j])).collect()
    }

    /// Faces of cone `i` (including itself and the origin).
    pub fn faces_of(&self, i: usize) -> Vec<usize> {
        let c = &self.cones[i];
        (0..self.cones.len()).filter(|&j| self.cones[j].is_face_of(c)).collect()
    }

    pub fn is_face(&self, tau: usize, sigma: usize) -> bool {
        self.cones[tau].is_face_of(&self.cones[sigma])
    }

    pub fn cones_of_dim(&self, k: usize) -> Vec<usize> {
        (0..self.cones.len()).filter(|&i| self.cones[i].dim == k).collect()
    }

    pub fn maximal_cones(&self) -> Vec<usize> {
        (0..self.cones.len()).filter(|&i| self.cofacets[i].is_empty()).collect()
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.maximal_cones().iter().all(|&i| self.cones[i].dim == d)
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(Cone::is_simplicial)
    }

    pub fn geometry(&self, i: usize) -> &ConeGeometry {
        self.geometry[i].get_or_init(|| {
            let gens = self.generators(i);
            let lattice = saturate(&gens, self.ambient_rank);
            let chart = LatticeChart::new(&lattice).expect("saturated by construction");
            let hrep = cone::hrep(&gens, self.ambient_rank);
            ConeGeometry { lattice, chart, hrep }
        })
    }

    /// Simplicial with generators forming a basis of `N_σ`.
    pub fn is_unimodular_cone(&self, i: usize) -> bool {
        let c = &self.cones[i];
        if !c.is_simplicial() {
            return false;
        }
        let g = self.geometry(i);
        matches!(lattice_index(&self.generators(i), &g.lattice), Ok(LatticeIndex::Finite(ref d)) if d == &BigInt::from(1))
    }

    pub fn is_unimodular(&self) -> bool {
        (0..self.cones.len()).all(|i| self.is_unimodular_cone(i))
    }

    /// Saturated lattice `N_Σ` spanned by the support.
    pub fn minimal_lattice(&self) -> LatticeBasis {
        saturate(&self.rays, self.ambient_rank)
    }

    /// The cone containing `x` in its relative interior, if `x` is in the support.
    pub fn carrier(&self, x: &[BigInt]) -> Option<usize> {
        (0..self.cones.len()).find(|&i| self.geometry(i).hrep.contains_in_relative_interior(x))
    }

    /// The ray sets of the cones, in index order.
    pub fn cone_ray_sets(&self) -> Vec<Vec<usize>> {
        self.cones.iter().map(|c| c.rays.clone()).collect()
    }

    /// Ray sets of the maximal cones, in index order.
    pub fn maximal_ray_sets(&self) -> Vec<Vec<usize>> {
        self.maximal_cones().into_iter().map(|i| self.cones[i].rays.clone()).collect()
    }

    /// Number of cones in each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dim() + 1];
        for c in &self.cones {
            f[c.dim] += 1;
        }
        f
    }

    /// A primitive lattice point in the relative interior of cone `i`.
    pub fn interior_point(&self, i: usize) -> Vector {
        let gens = self.generators(i);
        let mut sum = vec![BigInt::from(0); self.ambient_rank];
        for g in &gens {
            for (s, x) in sum.iter_mut().zip(g) {
                *s += x;
            }
        }
        crate::exactlin::primitive(&sum)
    }
}

fn validate_rays(ambient_rank: usize, rays: &[Vector]) -> Result<()> {
    let mut seen: HashMap<&Vector, usize> = HashMap::new();
    for (i, r) in rays.iter().enumerate() {
        if r.len() != ambient_rank {
            return Err(Error::DimensionMismatch(format!("ray {i} has {} coordinates, expected {ambient_rank}", r.len())));
        }
        if !is_primitive(r) {
            return Err(Error::NonPrimitiveRay { index: i });
        }
        if let Some(&j) = seen.get(r) {
            return Err(Error::DuplicateRay { a: j, b: i });
        }
        seen.insert(r, i);
    }
    Ok(())
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank && self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rays: Vec<Vec<String>> = self.rays.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        f.debug_struct("Fan")
            .field("ambient_rank", &self.ambient_rank)
            .field("rays", &rays)
            .field("maximal", &self.maximal_ray_sets())
            .finish()
    }
}
