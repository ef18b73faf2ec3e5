use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use super::cone::{extreme_rays, hrep};
use super::fan::Fan;
use crate::error::{Error, Result};
use crate::exactlin::{
    dot, is_zero_vector, primitive, rank_of_rows, solve_rational, IntMatrix, LatticeBasis, LatticeChart, Vector,
};

/// A star fan together with the cone of the original fan behind each of its cones.
#[derive(Clone, Debug)]
pub struct StarFan {
    pub fan: Fan,
    /// `origin[i]` is the cone of the original fan whose image is star cone `i`.
    pub origin: Vec<usize>,
    /// Projection `N → N/N_σ` used for the coordinates of the star fan.
    pub projection: IntMatrix,
    /// `covers[k]` is the cone covering `σ` whose image is star ray `k`.
    pub covers: Vec<usize>,
}

/// Star fan of `f` at cone `sigma`, in the quotient lattice `N/N_σ`.
pub fn star_fan(f: &Fan, sigma: usize) -> Result<StarFan> {
    if sigma >= f.n_cones() {
        return Err(Error::ConeNotInFan(vec![]));
    }
    let projection = f.geometry(sigma).chart.quotient.clone();
    let base = f.cone(sigma).rays().to_vec();
    let mut covers: Vec<usize> = f.cofacets_of(sigma).to_vec();
    covers.sort_unstable();
    let rays: Vec<Vector> = covers
        .iter()
        .map(|&pi| {
            let extra = f.cone(pi).rays().iter().find(|r| !base.contains(r)).expect("cover adds a ray");
            primitive(&projection.apply(f.ray(*extra)))
        })
        .collect();
    let containing = f.star_cones(sigma);
    let cones: Vec<Vec<usize>> = containing
        .iter()
        .map(|&tau| {
            covers
                .iter()
                .enumerate()
                .filter(|(_, &pi)| f.is_face(pi, tau))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    let fan = Fan::trusted(projection.rows(), rays, cones.clone());
    let mut origin = vec![usize::MAX; fan.n_cones()];
    for (tau, c) in containing.iter().zip(&cones) {
        let idx = fan.index_of(c).expect("image cone present");
        origin[idx] = *tau;
    }
    debug_assert!(origin.iter().all(|&o| o != usize::MAX));
    Ok(StarFan { fan, origin, projection, covers })
}

/// Product fan with the pair of factor cones behind each product cone.
#[derive(Clone, Debug)]
pub struct ProductFan {
    pub fan: Fan,
    pub pairs: Vec<(usize, usize)>,
}

pub fn product(f: &Fan, g: &Fan) -> ProductFan {
    let n = f.ambient_rank() + g.ambient_rank();
    let offset = f.rays().len();
    let mut rays = Vec::with_capacity(offset + g.rays().len());
    for r in f.rays() {
        let mut v = r.clone();
        v.resize(n, BigInt::zero());
        rays.push(v);
    }
    for r in g.rays() {
        let mut v = vec![BigInt::zero(); f.ambient_rank()];
        v.extend(r.iter().cloned());
        rays.push(v);
    }
    let mut cones = Vec::new();
    for a in f.maximal_cones() {
        for b in g.maximal_cones() {
            let mut c: Vec<usize> = f.cone(a).rays().to_vec();
            c.extend(g.cone(b).rays().iter().map(|r| r + offset));
            cones.push(c);
        }
    }
    let fan = Fan::trusted(n, rays, cones);
    let pairs = fan
        .cones()
        .iter()
        .map(|c| {
            let left: Vec<usize> = c.rays().iter().copied().filter(|&r| r < offset).collect();
            let right: Vec<usize> = c.rays().iter().filter(|&&r| r >= offset).map(|r| r - offset).collect();
            (f.index_of(&left).expect("left factor cone"), g.index_of(&right).expect("right factor cone"))
        })
        .collect();
    ProductFan { fan, pairs }
}

/// Complete iff pure of full dimension and every codimension-one cone lies in exactly
/// two maximal cones.
pub fn is_complete(f: &Fan) -> bool {
    let n = f.ambient_rank();
    if !f.is_pure() || f.dim() != n {
        return false;
    }
    if n == 0 {
        return true;
    }
    f.cones_of_dim(n - 1).iter().all(|&t| f.cofacets_of(t).len() == 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanClass {
    pub simplicial: bool,
    pub unimodular: bool,
    pub pure: bool,
    pub minimal_lattice: LatticeBasis,
}

pub fn classify(f: &Fan) -> FanClass {
    FanClass {
        simplicial: f.is_simplicial(),
        unimodular: f.is_unimodular(),
        pure: f.is_pure(),
        minimal_lattice: f.minimal_lattice(),
    }
}

/// Rewrites the fan in coordinates of its minimal lattice `N_Σ`. Cone and ray
/// indices are unchanged.
pub fn restrict_to_minimal_lattice(f: &Fan) -> (Fan, LatticeChart) {
    let chart = LatticeChart::new(&f.minimal_lattice()).expect("saturated");
    let rays = f.rays().iter().map(|r| chart.chart(r)).collect();
    (Fan::trusted(chart.basis.rank(), rays, f.cone_ray_sets()), chart)
}

/// Image of the fan under a lattice map that is injective on its span and keeps
/// rays primitive (for instance a unimodular change of coordinates). Cone and ray
/// indices are unchanged.
pub fn map_fan(f: &Fan, m: &IntMatrix) -> Result<Fan> {
    if m.cols() != f.ambient_rank() {
        return Err(Error::DimensionMismatch("map does not match the ambient rank".into()));
    }
    let rays: Vec<Vector> = f.rays().iter().map(|r| m.apply(r)).collect();
    let image_rank = rank_of_rows(rays.clone());
    if image_rank != rank_of_rows(f.rays().to_vec()) {
        return Err(Error::DimensionMismatch("map is not injective on the span".into()));
    }
    for (i, r) in rays.iter().enumerate() {
        if !crate::exactlin::is_primitive(r) {
            return Err(Error::NonPrimitiveRay { index: i });
        }
    }
    Ok(Fan::trusted(m.rows(), rays, f.cone_ray_sets()))
}

/// A subfan spanned by some cones (faces are added). Returns the fan and, for each
/// of its cones, the corresponding cone of `f`.
pub fn subfan(f: &Fan, cones: &[usize]) -> (Fan, Vec<usize>) {
    let used: BTreeSet<usize> = cones.iter().flat_map(|&c| f.cone(c).rays().iter().copied()).collect();
    let renumber: HashMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let rays: Vec<Vector> = used.iter().map(|&r| f.ray(r).clone()).collect();
    let sets: Vec<Vec<usize>> =
        cones.iter().map(|&c| f.cone(c).rays().iter().map(|r| renumber[r]).collect()).collect();
    let sub = Fan::trusted(f.ambient_rank(), rays, sets);
    let back: Vec<usize> = used.iter().copied().collect();
    let origin = sub
        .cones()
        .iter()
        .map(|c| {
            let old: Vec<usize> = c.rays().iter().map(|&r| back[r]).collect();
            f.index_of(&old).expect("face of a cone of f")
        })
        .collect();
    (sub, origin)
}

/// Stellar subdivision at a lattice point of the support.
pub fn stellar_subdivision(f: &Fan, point: &[BigInt]) -> Result<Fan> {
    let p = primitive(point);
    if is_zero_vector(&p) {
        return Err(Error::PointOutsideSupport);
    }
    let tau = f.carrier(&p).ok_or(Error::PointOutsideSupport)?;
    if f.cone(tau).dim() == 1 {
        return Ok(f.clone());
    }
    let new = f.rays().len();
    let mut rays = f.rays().to_vec();
    rays.push(p);
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for c in f.maximal_cones() {
        if !f.is_face(tau, c) {
            cones.push(f.cone(c).rays().to_vec());
            continue;
        }
        for face in f.faces_of(c) {
            if !f.is_face(tau, face) {
                let mut r = f.cone(face).rays().to_vec();
                r.push(new);
                cones.push(r);
            }
        }
    }
    Ok(Fan::trusted(f.ambient_rank(), rays, cones))
}

/// Refines to a unimodular fan by repeated stellar subdivisions: first at interior
/// points of non-simplicial cones, then at lattice points of fundamental
/// parallelepipeds. The support is unchanged.
pub fn unimodular_refinement(f: &Fan) -> Fan {
    let mut fan = f.clone();
    loop {
        let bad = (0..fan.n_cones())
            .filter(|&i| !fan.cone(i).is_simplicial())
            .min_by_key(|&i| fan.cone(i).dim());
        match bad {
            Some(i) => {
                let p = fan.interior_point(i);
                fan = stellar_subdivision(&fan, &p).expect("interior point lies in the support");
            }
            None => break,
        }
    }
    loop {
        let bad = (0..fan.n_cones())
            .filter(|&i| !fan.is_unimodular_cone(i))
            .min_by_key(|&i| fan.cone(i).dim());
        match bad {
            Some(i) => {
                let p = parallelepiped_point(&fan, i);
                fan = stellar_subdivision(&fan, &p).expect("parallelepiped point lies in the cone");
            }
            None => break,
        }
    }
    fan
}

/// A nonzero primitive lattice point `Σ λ_i v_i` with `0 ≤ λ_i < 1` in a simplicial
/// non-unimodular cone.
fn parallelepiped_point(f: &Fan, i: usize) -> Vector {
    let g = f.geometry(i);
    let gens = f.generators(i);
    let k = gens.len();
    let coords: Vec<Vector> = gens.iter().map(|v| g.chart.chart(v)).collect();
    let vt = IntMatrix::from_columns(&coords, k);
    for j in 0..k {
        let mut e = vec![BigInt::zero(); k];
        e[j] = BigInt::from(1);
        let lambda = solve_rational(&vt, &e).expect("generators span N_σ rationally");
        if lambda.iter().all(|l| l.is_integer()) {
            continue;
        }
        // fractional parts of λ give a lattice point in the half-open parallelepiped
        let frac: Vec<_> = lambda.iter().map(|l| l - l.floor()).collect();
        let denom = frac.iter().fold(BigInt::from(1), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
        let mut point = vec![BigInt::zero(); f.ambient_rank()];
        for (q, v) in frac.iter().zip(&gens) {
            let c = q.numer() * (&denom / q.denom());
            for (p, x) in point.iter_mut().zip(v) {
                *p += &c * x;
            }
        }
        let point: Vector = point.into_iter().map(|x| x / &denom).collect();
        return primitive(&point);
    }
    unreachable!("cone {i} is unimodular")
}

/// `d`-dimensional pieces `σ ∩ τ` for maximal cones of `f` and `g`, grouped by `σ`.
fn pieces(f: &Fan, g: &Fan, d: usize) -> BTreeMap<usize, Vec<Vec<Vector>>> {
    let mut out: BTreeMap<usize, Vec<Vec<Vector>>> = BTreeMap::new();
    let gmax = g.maximal_cones();
    for s in f.maximal_cones() {
        let hs = &f.geometry(s).hrep;
        let entry = out.entry(s).or_default();
        for &t in &gmax {
            let rays = extreme_rays(&hs.intersect(&g.geometry(t).hrep));
            if rays.len() >= d && rank_of_rows(rays.clone()) == d {
                entry.push(rays);
            }
        }
    }
    out
}

/// Whether the `d`-dimensional pieces tile each maximal cone of `f`: every facet of
/// a piece either lies in the boundary of its cone or is shared by exactly two pieces.
fn pieces_cover(f: &Fan, pieces: &BTreeMap<usize, Vec<Vec<Vector>>>, d: usize) -> bool {
    for (&s, list) in pieces {
        if list.is_empty() {
            return false;
        }
        if d == 0 {
            continue;
        }
        let outer = &f.geometry(s).hrep.inequalities;
        let mut interior: HashMap<Vec<Vector>, usize> = HashMap::new();
        for piece in list {
            let h = hrep(piece, f.ambient_rank());
            for u in &h.inequalities {
                let mut facet: Vec<Vector> = piece.iter().filter(|v| dot(u, v).is_zero()).cloned().collect();
                facet.sort();
                let on_boundary = outer.iter().any(|w| facet.iter().all(|v| dot(w, v).is_zero()));
                if !on_boundary {
                    *interior.entry(facet).or_insert(0) += 1;
                }
            }
        }
        if interior.values().any(|&c| c != 2) {
            return false;
        }
    }
    true
}

/// Support equality of two pure fans of the same ambient rank.
pub fn same_support(f: &Fan, g: &Fan) -> Result<bool> {
    if f.ambient_rank() != g.ambient_rank() {
        return Err(Error::DimensionMismatch("fans live in different lattices".into()));
    }
    if !f.is_pure() || !g.is_pure() {
        return Err(Error::NotPure);
    }
    let d = f.dim();
    if g.dim() != d {
        return Ok(false);
    }
    Ok(pieces_cover(f, &pieces(f, g, d), d) && pieces_cover(g, &pieces(g, f, d), d))
}

/// Common refinement of two pure fans with the same support.
pub fn common_refinement(f: &Fan, g: &Fan) -> Result<Fan> {
    if !same_support(f, g)? {
        return Err(Error::SupportMismatch);
    }
    let d = f.dim();
    let pieces = pieces(f, g, d);
    let mut order: Vec<Vector> = Vec::new();
    let mut index: HashMap<Vector, usize> = HashMap::new();
    let all: BTreeSet<Vector> = pieces.values().flatten().flatten().cloned().collect();
    for v in f.rays().iter().chain(g.rays()).chain(all.iter()) {
        if all.contains(v) && !index.contains_key(v) {
            index.insert(v.clone(), order.len());
            order.push(v.clone());
        }
    }
    let cones: Vec<Vec<usize>> = pieces.values().flatten().map(|p| p.iter().map(|v| index[v]).collect()).collect();
    Ok(Fan::trusted(f.ambient_rank(), order, cones))
}

/// Whether every cone of `fine` lies in some cone of `coarse`.
pub fn refines(fine: &Fan, coarse: &Fan) -> bool {
    fine.maximal_cones().iter().all(|&c| {
        let p = fine.interior_point(c);
        match coarse.carrier(&p) {
            Some(t) => fine.generators(c).iter().all(|v| coarse.geometry(t).hrep.contains(v)),
            None => false,
        }
    })
}

/// Fan structure on the local support at a lattice point `v`: the star fan at the
/// carrier of `v` times a complete fan of the carrier's dimension.
pub fn local_support(f: &Fan, v: &[BigInt]) -> Result<Fan> {
    let sigma = f.carrier(v).ok_or(Error::PointOutsideSupport)?;
    let star = star_fan(f, sigma)?;
    Ok(product(&star.fan, &Fan::orthants(f.cone(sigma).dim())).fan)
}

/// Random lattice point in the relative interior of a cone: positive integer
/// combination of its generators.
pub fn random_interior_point<R: rand::Rng>(f: &Fan, cone: usize, rng: &mut R) -> Vector {
    let mut p = vec![BigInt::zero(); f.ambient_rank()];
    for g in f.generators(cone) {
        let c = BigInt::from(rng.gen_range(1..=3i64));
        for (s, x) in p.iter_mut().zip(&g) {
            *s += &c * x;
        }
    }
    primitive(&p)
}
