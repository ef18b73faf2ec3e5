//! Weighted fans, the balancing condition, Minkowski weights and pushforward.

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactlin::{
    add, integer_kernel, is_zero_vector, lattice_index, primitive, scale, solve_integer, IntMatrix, LatticeBasis,
    LatticeIndex, Vector,
};
use crate::polyfan::{
    common_refinement, find_isomorphism_with, product, same_support, star_fan, Fan, IsoSearch, StarFan,
};

/// A pure fan with an integer weight on every maximal cone.
///
/// Tropical fans have positive weights; `signed` fans (Weil divisors) may carry any
/// nonzero integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedFan {
    fan: Fan,
    weights: BTreeMap<usize, BigInt>,
    signed: bool,
}

impl WeightedFan {
    pub fn new(fan: Fan, weights: BTreeMap<usize, BigInt>) -> Result<Self> {
        Self::build(fan, weights, false)
    }

    pub fn new_signed(fan: Fan, weights: BTreeMap<usize, BigInt>) -> Result<Self> {
        Self::build(fan, weights, true)
    }

    /// All weights equal to one.
    pub fn unit(fan: Fan) -> Result<Self> {
        let weights = fan.maximal_cones().into_iter().map(|c| (c, BigInt::one())).collect();
        Self::new(fan, weights)
    }

    /// Weights listed in the order of [`Fan::maximal_cones`].
    pub fn from_list(fan: Fan, weights: Vec<BigInt>, signed: bool) -> Result<Self> {
        let max = fan.maximal_cones();
        if max.len() != weights.len() {
            return Err(Error::WeightsMismatch);
        }
        Self::build(fan, max.into_iter().zip(weights).collect(), signed)
    }

    fn build(fan: Fan, weights: BTreeMap<usize, BigInt>, signed: bool) -> Result<Self> {
        if !fan.is_pure() {
            return Err(Error::NotPure);
        }
        if !weights.keys().copied().eq(fan.maximal_cones()) {
            return Err(Error::WeightsMismatch);
        }
        for (&c, w) in &weights {
            if !w.is_positive() && !(signed && !w.is_zero()) {
                return Err(Error::NonPositiveWeight { cone: fan.cone(c).rays().to_vec() });
            }
        }
        Ok(WeightedFan { fan, weights, signed })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn weights(&self) -> &BTreeMap<usize, BigInt> {
        &self.weights
    }

    pub fn weight(&self, cone: usize) -> &BigInt {
        &self.weights[&cone]
    }

    /// Weights in the order of the maximal cones.
    pub fn weight_list(&self) -> Vec<BigInt> {
        self.weights.values().cloned().collect()
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn dim(&self) -> usize {
        self.fan.dim()
    }

    pub fn ambient_rank(&self) -> usize {
        self.fan.ambient_rank()
    }

    pub fn is_reduced(&self) -> bool {
        self.weights.values().all(One::is_one)
    }

    pub fn as_minkowski(&self) -> MinkowskiWeight {
        MinkowskiWeight::new(self.dim(), self.weights.clone())
    }

    /// Same cones and weights after a change of lattice (see [`crate::polyfan::map_fan`]).
    pub fn with_fan(&self, fan: Fan) -> Result<Self> {
        Self::build(fan, self.weights.clone(), self.signed)
    }
}

/// An integer function on the `k`-cones of a fan, stored without zero entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinkowskiWeight {
    pub k: usize,
    values: BTreeMap<usize, BigInt>,
}

impl MinkowskiWeight {
    pub fn new(k: usize, values: BTreeMap<usize, BigInt>) -> Self {
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        MinkowskiWeight { k, values }
    }

    pub fn zero(k: usize) -> Self {
        MinkowskiWeight { k, values: BTreeMap::new() }
    }

    /// Constructs and checks the balancing condition.
    pub fn checked(f: &Fan, k: usize, values: BTreeMap<usize, BigInt>) -> Result<Self> {
        let w = Self::new(k, values);
        if let Some((tau, _)) = balancing_defects(f, &w, &CanonicalSelector).into_iter().next() {
            return Err(Error::Unbalanced { cone: f.cone(tau).rays().to_vec() });
        }
        Ok(w)
    }

    pub fn get(&self, cone: usize) -> BigInt {
        self.values.get(&cone).cloned().unwrap_or_default()
    }

    pub fn values(&self) -> &BTreeMap<usize, BigInt> {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

/// Rule choosing the lattice normal `n_{σ,τ}`: a point of the relative interior of
/// `σ` whose class generates `N_σ/N_τ`.
pub trait NormalSelector {
    fn normal(&self, f: &Fan, sigma: usize, tau: usize) -> Vector;
}

/// Lifts the generator of `N_σ/N_τ` and adds the interior point of `τ` until the
/// result lies in the relative interior of `σ`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CanonicalSelector;

impl NormalSelector for CanonicalSelector {
    fn normal(&self, f: &Fan, sigma: usize, tau: usize) -> Vector {
        let n0 = lift_generator(f, sigma, tau);
        push_inside(f, sigma, tau, n0)
    }
}

/// Adds a random element of `N_τ` to the canonical choice; for invariance tests.
#[derive(Debug)]
pub struct RandomSelector {
    rng: RefCell<ChaCha8Rng>,
}

impl RandomSelector {
    pub fn new(seed: u64) -> Self {
        RandomSelector { rng: RefCell::new(ChaCha8Rng::seed_from_u64(seed)) }
    }
}

impl NormalSelector for RandomSelector {
    fn normal(&self, f: &Fan, sigma: usize, tau: usize) -> Vector {
        let mut n = lift_generator(f, sigma, tau);
        let mut rng = self.rng.borrow_mut();
        for b in f.geometry(tau).lattice.vectors() {
            let c = BigInt::from(rng.gen_range(-5i64..=5));
            n = add(&n, &scale(&c, b));
        }
        push_inside(f, sigma, tau, n)
    }
}

/// A point of `N_σ` mapping to the primitive generator of the image of `σ` in `N/N_τ`.
pub(crate) fn lift_generator(f: &Fan, sigma: usize, tau: usize) -> Vector {
    let q = &f.geometry(tau).chart.quotient;
    let u = quotient_normal(f, sigma, tau);
    let basis = f.geometry(sigma).lattice.vectors();
    let images: Vec<Vector> = basis.iter().map(|b| q.apply(b)).collect();
    let x = solve_integer(&IntMatrix::from_columns(&images, q.rows()), &u).expect("N_σ surjects onto N_σ/N_τ");
    let mut n = vec![BigInt::zero(); f.ambient_rank()];
    for (c, b) in x.iter().zip(basis) {
        n = add(&n, &scale(c, b));
    }
    n
}

fn push_inside(f: &Fan, sigma: usize, tau: usize, mut n: Vector) -> Vector {
    let p = f.interior_point(tau);
    let h = &f.geometry(sigma).hrep;
    while !h.contains_in_relative_interior(&n) {
        n = add(&n, &p);
    }
    n
}

/// Primitive generator of the image of `σ` in `N/N_τ`, in quotient coordinates. This
/// is the class of every valid `n_{σ,τ}`.
pub fn quotient_normal(f: &Fan, sigma: usize, tau: usize) -> Vector {
    let q = &f.geometry(tau).chart.quotient;
    let tau_rays = f.cone(tau).rays();
    let extra = f.cone(sigma).rays().iter().find(|r| !tau_rays.contains(r)).expect("σ covers τ");
    primitive(&q.apply(f.ray(*extra)))
}

/// `(τ, defect)` for every `(k−1)`-cone where `Σ w(σ) n_{σ,τ}` is nonzero modulo `N_τ`;
/// the defect is given in the quotient coordinates of `τ`.
pub fn balancing_defects(f: &Fan, w: &MinkowskiWeight, selector: &dyn NormalSelector) -> Vec<(usize, Vector)> {
    if w.k == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    for tau in f.cones_of_dim(w.k - 1) {
        let q = &f.geometry(tau).chart.quotient;
        let mut sum = vec![BigInt::zero(); q.rows()];
        for &sigma in f.cofacets_of(tau) {
            let c = w.get(sigma);
            if !c.is_zero() {
                sum = add(&sum, &scale(&c, &q.apply(&selector.normal(f, sigma, tau))));
            }
        }
        if !is_zero_vector(&sum) {
            out.push((tau, sum));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancingReport {
    pub balanced: bool,
    pub violations: Vec<(usize, Vector)>,
}

pub fn check_balancing(wf: &WeightedFan) -> BalancingReport {
    check_balancing_with(wf, &CanonicalSelector)
}

pub fn check_balancing_with(wf: &WeightedFan, selector: &dyn NormalSelector) -> BalancingReport {
    let violations = balancing_defects(wf.fan(), &wf.as_minkowski(), selector);
    BalancingReport { balanced: violations.is_empty(), violations }
}

/// The lattice `M_k(Σ)` with a basis, as vectors indexed by the `k`-cones.
#[derive(Clone, Debug)]
pub struct MinkowskiLattice {
    pub k: usize,
    pub cones: Vec<usize>,
    pub lattice: LatticeBasis,
}

impl MinkowskiLattice {
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn basis(&self) -> Vec<MinkowskiWeight> {
        self.lattice.vectors().iter().map(|v| self.weight_of(v)).collect()
    }

    pub fn weight_of(&self, v: &[BigInt]) -> MinkowskiWeight {
        MinkowskiWeight::new(self.k, self.cones.iter().copied().zip(v.iter().cloned()).collect())
    }

    pub fn vector_of(&self, w: &MinkowskiWeight) -> Vector {
        self.cones.iter().map(|&c| w.get(c)).collect()
    }

    /// Coordinates in the basis, if the weight is balanced.
    pub fn coordinates(&self, w: &MinkowskiWeight) -> Option<Vector> {
        self.lattice.coordinates(&self.vector_of(w))
    }
}

/// Saturated basis of the balanced integer functions on `k`-cones.
pub fn minkowski_basis(f: &Fan, k: usize) -> MinkowskiLattice {
    let cones = f.cones_of_dim(k);
    let position: BTreeMap<usize, usize> = cones.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut rows: Vec<Vector> = Vec::new();
    if k > 0 {
        for tau in f.cones_of_dim(k - 1) {
            let codim = f.geometry(tau).chart.quotient.rows();
            let mut block = vec![vec![BigInt::zero(); cones.len()]; codim];
            for &sigma in f.cofacets_of(tau) {
                let u = quotient_normal(f, sigma, tau);
                for (row, x) in block.iter_mut().zip(u) {
                    row[position[&sigma]] = x;
                }
            }
            rows.extend(block.into_iter().filter(|r| !is_zero_vector(r)));
        }
    }
    let lattice = integer_kernel(&IntMatrix::from_rows(&rows, cones.len()));
    MinkowskiLattice { k, cones, lattice }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irreducibility {
    pub irreducible: bool,
    pub rank: usize,
    pub fundamental: Option<MinkowskiWeight>,
    pub is_fundamental: bool,
}

pub fn irreducibility(wf: &WeightedFan) -> Result<Irreducibility> {
    if let Some((tau, _)) = check_balancing(wf).violations.first() {
        return Err(Error::Unbalanced { cone: wf.fan().cone(*tau).rays().to_vec() });
    }
    let m = minkowski_basis(wf.fan(), wf.dim());
    let rank = m.rank();
    if rank != 1 {
        return Ok(Irreducibility { irreducible: false, rank, fundamental: None, is_fundamental: false });
    }
    let mut g = m.lattice.vectors()[0].clone();
    if g.iter().any(Signed::is_negative) {
        g = g.iter().map(|x| -x).collect();
    }
    let fundamental = m.weight_of(&g);
    let is_fundamental = fundamental == wf.as_minkowski();
    Ok(Irreducibility { irreducible: true, rank, fundamental: Some(fundamental), is_fundamental })
}

/// Star fan at a cone with the weights inherited from the maximal cones containing it.
pub fn star_weighted(wf: &WeightedFan, sigma: usize) -> Result<(WeightedFan, StarFan)> {
    let star = star_fan(wf.fan(), sigma)?;
    let weights = star.fan.maximal_cones().into_iter().map(|c| (c, wf.weight(star.origin[c]).clone())).collect();
    let w = WeightedFan::build(star.fan.clone(), weights, wf.signed)?;
    Ok((w, star))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarVerdict {
    pub cone: usize,
    pub rank: usize,
    pub irreducible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalProfile {
    pub reduced: bool,
    pub locally_irreducible: bool,
    pub stars: Vec<StarVerdict>,
}

pub fn local_profile(wf: &WeightedFan) -> Result<LocalProfile> {
    let f = wf.fan();
    let d = wf.dim();
    let mut stars = Vec::with_capacity(f.n_cones());
    for sigma in 0..f.n_cones() {
        let star = star_fan(f, sigma)?;
        let rank = minkowski_basis(&star.fan, d - f.cone(sigma).dim()).rank();
        stars.push(StarVerdict { cone: sigma, rank, irreducible: rank == 1 });
    }
    Ok(LocalProfile {
        reduced: wf.is_reduced(),
        locally_irreducible: stars.iter().all(|s| s.irreducible),
        stars,
    })
}

/// Image cone of every cone of `source` under `map`, or the cone that fails.
pub fn image_cones(map: &IntMatrix, source: &Fan, target: &Fan) -> Result<Vec<usize>> {
    if map.cols() != source.ambient_rank() || map.rows() != target.ambient_rank() {
        return Err(Error::DimensionMismatch("map does not match the fans".into()));
    }
    let mut ray_image: Vec<Option<usize>> = Vec::with_capacity(source.rays().len());
    let mut bad_ray = vec![false; source.rays().len()];
    for (i, v) in source.rays().iter().enumerate() {
        let w = map.apply(v);
        if is_zero_vector(&w) {
            ray_image.push(None);
        } else {
            let r = target.find_ray(&primitive(&w));
            bad_ray[i] = r.is_none();
            ray_image.push(r);
        }
    }
    source
        .cones()
        .iter()
        .map(|c| {
            let err = || Error::ConeImageNotACone { cone: c.rays().to_vec() };
            if c.rays().iter().any(|&r| bad_ray[r]) {
                return Err(err());
            }
            let mut hit: Vec<usize> = c.rays().iter().filter_map(|&r| ray_image[r]).collect();
            hit.sort_unstable();
            hit.dedup();
            target.index_of(&hit).ok_or_else(err)
        })
        .collect()
}

/// `f_*w(σ') = Σ w(σ)·[N_σ' : f(N_σ)]` over the `k`-cones mapped onto `k`-cones.
pub fn pushforward(map: &IntMatrix, source: &Fan, w: &MinkowskiWeight, target: &Fan) -> Result<MinkowskiWeight> {
    let images = image_cones(map, source, target)?;
    let mut values: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (&sigma, c) in w.values() {
        let image = images[sigma];
        if target.cone(image).dim() != w.k {
            continue;
        }
        let gens: Vec<Vector> = source.geometry(sigma).lattice.vectors().iter().map(|b| map.apply(b)).collect();
        match lattice_index(&gens, &target.geometry(image).lattice)? {
            LatticeIndex::Finite(index) => *values.entry(image).or_default() += c * index,
            LatticeIndex::Infinite => {}
        }
    }
    MinkowskiWeight::checked(target, w.k, values)
}

pub fn pushforward_weighted(map: &IntMatrix, wf: &WeightedFan, target: &Fan) -> Result<MinkowskiWeight> {
    pushforward(map, wf.fan(), &wf.as_minkowski(), target)
}

/// Product with weights multiplied on product cones.
pub fn product_weighted(a: &WeightedFan, b: &WeightedFan) -> WeightedFan {
    let p = product(a.fan(), b.fan());
    let weights = p
        .fan
        .maximal_cones()
        .into_iter()
        .map(|c| {
            let (i, j) = p.pairs[c];
            (c, a.weight(i) * b.weight(j))
        })
        .collect();
    WeightedFan::build(p.fan, weights, a.signed || b.signed).expect("product of pure weighted fans")
}

/// Weights on a refinement with the same support: each maximal cone inherits the
/// weight of the cone of `wf` containing it.
pub fn refine_weights(wf: &WeightedFan, refinement: &Fan) -> Result<WeightedFan> {
    if !same_support(wf.fan(), refinement)? {
        return Err(Error::SupportMismatch);
    }
    let mut weights = BTreeMap::new();
    for c in refinement.maximal_cones() {
        let outer = wf.fan().carrier(&refinement.interior_point(c)).ok_or(Error::SupportMismatch)?;
        let w = wf.weights().get(&outer).ok_or(Error::SupportMismatch)?;
        weights.insert(c, w.clone());
    }
    WeightedFan::build(refinement.clone(), weights, wf.signed)
}

/// Whether two weighted fans describe the same cycle: equal support and equal
/// weights on a common refinement. Matching ray sets are compared directly.
pub fn same_cycle(a: &WeightedFan, b: &WeightedFan) -> bool {
    if a.ambient_rank() != b.ambient_rank() || a.dim() != b.dim() {
        return false;
    }
    if let Some(equal) = same_cycle_by_rays(a, b) {
        return equal;
    }
    let Ok(true) = same_support(a.fan(), b.fan()) else {
        return false;
    };
    let Ok(common) = common_refinement(a.fan(), b.fan()) else {
        return false;
    };
    match (refine_weights(a, &common), refine_weights(b, &common)) {
        (Ok(x), Ok(y)) => x.weights == y.weights,
        _ => false,
    }
}

/// Decides equality when both fans have the same rays up to order; `None` otherwise.
fn same_cycle_by_rays(a: &WeightedFan, b: &WeightedFan) -> Option<bool> {
    let (fa, fb) = (a.fan(), b.fan());
    if fa.rays().len() != fb.rays().len() {
        return None;
    }
    let map: Vec<usize> = fa.rays().iter().map(|v| fb.find_ray(v)).collect::<Option<_>>()?;
    if fa.n_cones() != fb.n_cones() {
        return None;
    }
    for c in fa.maximal_cones() {
        let image: Vec<usize> = fa.cone(c).rays().iter().map(|&r| map[r]).collect();
        let j = fb.index_of(&image)?;
        if b.weights.get(&j) != Some(a.weight(c)) {
            return Some(false);
        }
    }
    Some(true)
}

/// Isomorphism of the underlying fans that also matches weights.
pub fn find_weighted_isomorphism(a: &WeightedFan, b: &WeightedFan, budget: u64) -> IsoSearch {
    find_isomorphism_with(a.fan(), b.fan(), budget, |cone_map| {
        a.weights.iter().all(|(&c, w)| b.weights.get(&cone_map[c]) == Some(w))
    })
}
