//! Tropical modifications: the forward construction, recognition of a fan as a
//! modification along one of its rays, and the description of star fans.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{dot, hnf, is_primitive, rank_of_rows, saturate, IntMatrix, LatticeChart, Vector};
use crate::plfun::{divisor, Divisor, PLFunction};
use crate::polyfan::{map_fan, Fan, IsoSearch, DEFAULT_ISO_BUDGET};
use crate::tropcycle::{find_weighted_isomorphism, lift_generator, same_cycle, star_weighted, WeightedFan};

/// Output of [`modify`]: a weighted fan in `N × ℤ` with the graph and vertical cones
/// indexed by the base cones they come from.
#[derive(Clone, Debug)]
pub struct Modification {
    pub fan: WeightedFan,
    pub divisor: Divisor,
    /// `graph_cones[σ]` is the cone `σ̃` over base cone `σ`.
    pub graph_cones: Vec<usize>,
    /// Base cone `τ` of the divisor support ↦ the cone `τ̃ + ℝ≥0·(0,1)`.
    pub vertical_cones: BTreeMap<usize, usize>,
    /// Index of the ray `(0,…,0,1)`; absent for degenerate modifications.
    pub vertical_ray: Option<usize>,
}

/// The tropical modification of `wf` along `div(φ)`.
///
/// Rays are the graph points `(v, φ(v))` of the base rays, in order, followed by
/// `(0,…,0,1)` when the divisor is nontrivial.
pub fn modify(wf: &WeightedFan, phi: &PLFunction) -> Result<Modification> {
    let base = wf.fan();
    let div = divisor(wf, phi);
    if let Some((&tau, _)) = div.ord.values().iter().find(|(_, w)| w.is_negative()) {
        return Err(Error::NegativeDivisorWeight { cone: base.cone(tau).rays().to_vec() });
    }
    let n = base.ambient_rank();
    let mut rays: Vec<Vector> = (0..base.rays().len())
        .map(|r| {
            let mut v = base.ray(r).clone();
            v.push(phi.ray_value(base, r));
            v
        })
        .collect();
    let mut cones: Vec<Vec<usize>> = base.maximal_ray_sets();
    let vertical_ray = div.weil.as_ref().map(|weil| {
        let up = rays.len();
        let mut e = vec![BigInt::zero(); n + 1];
        e[n] = BigInt::from(1);
        rays.push(e);
        for c in weil.fan().maximal_cones() {
            let mut r = base.cone(div.origin[c]).rays().to_vec();
            r.push(up);
            cones.push(r);
        }
        up
    });
    let fan = Fan::trusted(n + 1, rays, cones);
    let graph_cones: Vec<usize> =
        base.cones().iter().map(|c| fan.index_of(c.rays()).expect("graph cone present")).collect();
    let mut vertical_cones = BTreeMap::new();
    let mut weights: BTreeMap<usize, BigInt> =
        wf.weights().iter().map(|(&c, w)| (graph_cones[c], w.clone())).collect();
    if let (Some(up), Some(weil)) = (vertical_ray, &div.weil) {
        for (c, &tau) in div.origin.iter().enumerate() {
            let mut r = base.cone(tau).rays().to_vec();
            r.push(up);
            let idx = fan.index_of(&r).expect("vertical cone present");
            vertical_cones.insert(tau, idx);
            if let Some(w) = weil.weights().get(&c) {
                weights.insert(idx, w.clone());
            }
        }
    }
    let fan = WeightedFan::new(fan, weights)?;
    Ok(Modification { fan, divisor: div, graph_cones, vertical_cones, vertical_ray })
}

/// Evidence that a weighted fan is, after a unimodular change of coordinates, the
/// modification of `base` along `div(phi)`.
#[derive(Clone, Debug)]
pub struct ModificationWitness {
    /// Ray of the recognized fan that becomes `(0,…,0,1)`.
    pub direction: usize,
    /// Unimodular `T` with `T·v_direction = (0,…,0,1)`.
    pub change: IntMatrix,
    pub base: WeightedFan,
    pub phi: PLFunction,
    /// `modify(base, phi)`, which equals the recognized fan after `change`.
    pub replay: Modification,
    /// True when the replay reproduces the fan cone by cone, not only as a cycle.
    pub exact: bool,
}

impl ModificationWitness {
    pub fn divisor(&self) -> &Divisor {
        &self.replay.divisor
    }

    /// The projection to the base lattice in the original coordinates.
    pub fn projection(&self) -> IntMatrix {
        let n = self.change.rows();
        self.change.select_rows(0..n - 1)
    }
}

/// A unimodular matrix sending the primitive vector `v` to the last basis vector.
///
/// The first rows are the HNF basis of the annihilator of `v` and the last row is
/// reduced against it, so `v = e_n` gives the identity.
pub fn vertical_change(v: &[BigInt]) -> IntMatrix {
    let n = v.len();
    let chart = LatticeChart::new(&saturate(&[v.to_vec()], n)).expect("saturated");
    let (annihilator, _) = hnf(&chart.quotient);
    let mut last = chart.coords.row(0).to_vec();
    for i in 0..annihilator.rows() {
        let row = annihilator.row(i);
        let p = row.iter().position(|x| !x.is_zero()).expect("annihilator rows are nonzero");
        let q = last[p].div_floor(&row[p]);
        for (x, y) in last.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    if dot(&last, v).is_negative() {
        last = last.iter().map(|x| -x).collect();
    }
    let t = annihilator.vstack(&IntMatrix::from_rows(&[last], n));
    debug_assert!(t.is_unimodular());
    t
}

/// Tries to present `wf` as a tropical modification whose vertical ray is `ray`.
///
/// After moving the ray to `(0,…,0,1)`, maximal cones must either project injectively
/// or lose one dimension under projection; the projections of the former form the base fan, their
/// heights give `φ`, and `modify(base, φ)` must reproduce `wf`.
pub fn recognize_along(wf: &WeightedFan, ray: usize) -> Option<ModificationWitness> {
    let f = wf.fan();
    let n = f.ambient_rank();
    if n == 0 || ray >= f.rays().len() {
        return None;
    }
    let change = vertical_change(f.ray(ray));
    let moved = wf.with_fan(map_fan(f, &change).ok()?).ok()?;
    let g = moved.fan();
    let drop = |v: &Vector| -> Vector { v[..n - 1].to_vec() };

    // graph cones project injectively; the others must lose exactly one dimension
    // (vertical cones, possibly subdivided so that they miss the ray itself)
    let mut graph = Vec::new();
    for c in g.maximal_cones() {
        let cone = g.cone(c);
        if cone.rays().contains(&ray) {
            continue;
        }
        let projected: Vec<Vector> = cone.rays().iter().map(|&r| drop(g.ray(r))).collect();
        let rank = rank_of_rows(projected);
        if rank == cone.dim() {
            graph.push(c);
        } else if rank + 1 != cone.dim() {
            return None;
        }
    }
    if graph.is_empty() {
        return None;
    }

    // base rays in the order of the rays of the recognized fan
    let mut base_index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut base_rays: Vec<Vector> = Vec::new();
    let mut heights: Vec<BigInt> = Vec::new();
    let mut used: Vec<usize> = graph.iter().flat_map(|&c| g.cone(c).rays().iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    for r in used {
        let p = drop(g.ray(r));
        if !is_primitive(&p) || base_rays.contains(&p) {
            return None;
        }
        base_index.insert(r, base_rays.len());
        base_rays.push(p);
        heights.push(g.ray(r)[n - 1].clone());
    }
    let base_cones: Vec<Vec<usize>> =
        graph.iter().map(|&c| g.cone(c).rays().iter().map(|r| base_index[r]).collect()).collect();
    let base_fan = Fan::new(n - 1, base_rays, base_cones.clone()).ok()?;
    let weights: BTreeMap<usize, BigInt> = graph
        .iter()
        .zip(&base_cones)
        .map(|(&c, rays)| (base_fan.index_of(rays).expect("base cone"), moved.weight(c).clone()))
        .collect();
    let base = WeightedFan::new(base_fan, weights).ok()?;
    let phi = PLFunction::from_heights(base.fan(), &heights).ok()?;
    let replay = modify(&base, &phi).ok()?;

    let exact = replay.fan.fan() == g && replay.fan.weights() == moved.weights();
    if !exact && !same_cycle(&replay.fan, &moved) {
        return None;
    }
    Some(ModificationWitness { direction: ray, change, base, phi, replay, exact })
}

/// Results of comparing star fans of a modification with the base and the divisor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StarReport {
    pub graph_checked: usize,
    /// Base cones `σ` where the star at `σ̃` is not the modification of the star at `σ`.
    pub graph_failures: Vec<usize>,
    pub vertical_checked: usize,
    /// Divisor cones `τ` where the star at `τ_≥` is not the star of the divisor at `τ`.
    pub vertical_failures: Vec<usize>,
}

impl StarReport {
    pub fn ok(&self) -> bool {
        self.graph_failures.is_empty() && self.vertical_failures.is_empty()
    }
}

/// The function induced by `φ` on the star fan at `σ`: `φ − φ_σ` descended to `N/N_σ`.
pub fn induced_function(base: &Fan, phi: &PLFunction, sigma: usize, star: &crate::polyfan::StarFan) -> Result<PLFunction> {
    let m = phi.covector(base, sigma);
    let heights: Vec<BigInt> = star
        .covers
        .iter()
        .map(|&pi| {
            let x = lift_generator(base, pi, sigma);
            phi.eval_in(base, pi, &x) - dot(&m, &x)
        })
        .collect();
    PLFunction::from_heights(&star.fan, &heights)
}

pub fn modification_star_report(base: &WeightedFan, phi: &PLFunction, m: &Modification) -> Result<StarReport> {
    let mut report = StarReport::default();
    let isomorphic = |a: &WeightedFan, b: &WeightedFan| {
        matches!(find_weighted_isomorphism(a, b, DEFAULT_ISO_BUDGET), IsoSearch::Found(_))
    };
    for sigma in 0..base.fan().n_cones() {
        let (star_b, star) = star_weighted(base, sigma)?;
        let induced = induced_function(base.fan(), phi, sigma, &star)?;
        let expected = modify(&star_b, &induced)?;
        let (star_m, _) = star_weighted(&m.fan, m.graph_cones[sigma])?;
        report.graph_checked += 1;
        if !isomorphic(&expected.fan, &star_m) {
            report.graph_failures.push(sigma);
        }
    }
    if let Some(weil) = &m.divisor.weil {
        let weil = WeightedFan::new(weil.fan().clone(), weil.weights().clone())?;
        for (c, &tau) in m.divisor.origin.iter().enumerate() {
            let (star_d, _) = star_weighted(&weil, c)?;
            let (star_m, _) = star_weighted(&m.fan, m.vertical_cones[&tau])?;
            report.vertical_checked += 1;
            if !isomorphic(&star_d, &star_m) {
                report.vertical_failures.push(tau);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::vector;
    use crate::tropcycle::check_balancing;

    fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(rank, rays.iter().map(|r| vector(r)).collect(), cones.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn r2() -> WeightedFan {
        WeightedFan::unit(fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]])).unwrap()
    }

    fn quadrants() -> WeightedFan {
        WeightedFan::unit(fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]))
            .unwrap()
    }

    fn ray_set(f: &Fan) -> Vec<Vector> {
        let mut r = f.rays().to_vec();
        r.sort();
        r
    }

    #[test]
    fn tropical_plane_from_min_xy0() {
        let base = r2();
        let phi = PLFunction::from_ray_values(base.fan(), &ints(&[0, 0, -1])).unwrap();
        let m = modify(&base, &phi).unwrap();
        let f = m.fan.fan();
        assert_eq!(f.rays(), &[vector(&[1, 0, 0]), vector(&[0, 1, 0]), vector(&[-1, -1, -1]), vector(&[0, 0, 1])]);
        assert_eq!(f.cones_of_dim(2).len(), 6);
        assert_eq!(f.maximal_cones().len(), 6);
        assert!(m.fan.is_reduced());
        assert!(check_balancing(&m.fan).balanced);
        assert!(f.is_unimodular());
        // the output is a valid fan
        assert!(Fan::new(3, f.rays().to_vec(), f.maximal_ray_sets()).is_ok());
    }

    #[test]
    fn min_x0_modification() {
        let base = quadrants();
        let phi = PLFunction::from_ray_values(base.fan(), &ints(&[0, 0, -1, 0])).unwrap();
        let m = modify(&base, &phi).unwrap();
        let expected = vec![
            vector(&[-1, 0, -1]),
            vector(&[0, -1, 0]),
            vector(&[0, 0, 1]),
            vector(&[0, 1, 0]),
            vector(&[1, 0, 0]),
        ];
        assert_eq!(ray_set(m.fan.fan()), expected);
        assert!(check_balancing(&m.fan).balanced);
        assert_eq!(m.fan.fan().maximal_cones().len(), 6);
    }

    #[test]
    fn degenerate_modification_of_r1() {
        let base = WeightedFan::unit(fan(1, &[&[1], &[-1]], &[&[0], &[1]])).unwrap();
        let m = modify(&base, &PLFunction::zero(base.fan())).unwrap();
        assert_eq!(m.vertical_ray, None);
        assert_eq!(m.fan.fan().rays(), &[vector(&[1, 0]), vector(&[-1, 0])]);
    }

    #[test]
    fn negative_divisors_are_rejected() {
        let base = WeightedFan::unit(fan(1, &[&[1], &[-1]], &[&[0], &[1]])).unwrap();
        let phi = PLFunction::from_ray_values(base.fan(), &ints(&[0, 2])).unwrap();
        assert!(matches!(modify(&base, &phi), Err(Error::NegativeDivisorWeight { .. })));
    }

    #[test]
    fn recognize_the_tropical_plane() {
        let base = r2();
        let phi = PLFunction::from_ray_values(base.fan(), &ints(&[0, 0, -1])).unwrap();
        let m = modify(&base, &phi).unwrap();
        let w = recognize_along(&m.fan, 3).unwrap();
        assert!(w.exact);
        assert_eq!(w.replay.fan, m.fan);
        assert_eq!(w.base.fan().dim(), 2);
        let weil = w.divisor().weil.as_ref().unwrap();
        assert_eq!(weil.fan().rays().len(), 3);
        assert!(weil.is_reduced());
        // every ray of the plane works by symmetry
        for r in 0..4 {
            assert!(recognize_along(&m.fan, r).is_some(), "ray {r}");
        }
    }

    #[test]
    fn tropical_line_is_a_modification_of_r1() {
        let line = WeightedFan::unit(fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0], &[1], &[2]])).unwrap();
        let w = recognize_along(&line, 1).unwrap();
        assert_eq!(w.base.fan().ambient_rank(), 1);
        assert_eq!(w.base.fan().rays().len(), 2);
        let weil = w.divisor().weil.as_ref().unwrap();
        assert_eq!(weil.dim(), 0);
        assert_eq!(weil.weight_list(), ints(&[1]));
        assert_eq!(w.change.apply(&vector(&[0, 1])), vector(&[0, 1]));
    }

    #[test]
    fn cross_and_skew_lines_are_not_modifications() {
        let cross =
            WeightedFan::unit(fan(2, &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[&[0], &[1], &[2], &[3]])).unwrap();
        for r in 0..4 {
            assert!(recognize_along(&cross, r).is_none());
        }
        let skew = WeightedFan::unit(fan(2, &[&[2, -1], &[-1, 2], &[-1, -1]], &[&[0], &[1], &[2]])).unwrap();
        for r in 0..3 {
            assert!(recognize_along(&skew, r).is_none());
        }
    }

    #[test]
    fn vertical_change_is_unimodular() {
        for v in [[0, 0, 1], [2, 3, 5], [-1, -1, -1], [0, -1, 0]] {
            let t = vertical_change(&vector(&v));
            assert!(t.is_unimodular());
            assert_eq!(t.apply(&vector(&v)), vector(&[0, 0, 1]));
        }
        assert_eq!(vertical_change(&vector(&[0, 0, 1])), IntMatrix::identity(3));
    }

    #[test]
    fn stars_of_the_tropical_plane() {
        let base = r2();
        let phi = PLFunction::from_ray_values(base.fan(), &ints(&[0, 0, -1])).unwrap();
        let m = modify(&base, &phi).unwrap();
        let report = modification_star_report(&base, &phi, &m).unwrap();
        assert!(report.ok(), "{report:?}");
        assert_eq!(report.graph_checked, base.fan().n_cones());
        assert_eq!(report.vertical_checked, 4);
        let (up, _) = star_weighted(&m.fan, m.fan.fan().ray_cone(3)).unwrap();
        assert_eq!(up.fan().rays().len(), 3);
        assert_eq!(up.dim(), 1);
    }
}
