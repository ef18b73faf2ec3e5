//! Piecewise integral linear functions on fans and their divisors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactlin::{add, dot, scale, solve_integer, solve_rational, IntMatrix, Vector};
use crate::polyfan::{subfan, Fan};
use crate::tropcycle::{CanonicalSelector, MinkowskiWeight, NormalSelector, WeightedFan};

/// A piecewise integral linear function. For every cone `σ` the linear piece `φ_σ`
/// is stored by its values on the HNF basis of `N_σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    values: Vec<Vector>,
}

impl PLFunction {
    pub fn zero(f: &Fan) -> Self {
        let values = (0..f.n_cones()).map(|i| vec![BigInt::zero(); f.geometry(i).lattice.rank()]).collect();
        PLFunction { values }
    }

    /// Linear interpolation of values at the rays; needs a simplicial fan.
    pub fn from_ray_values(f: &Fan, ray_values: &[BigInt]) -> Result<Self> {
        if let Some(c) = f.cones().iter().find(|c| !c.is_simplicial()) {
            return Err(Error::RayValuesOnNonSimplicial { cone: c.rays().to_vec() });
        }
        Self::from_heights(f, ray_values)
    }

    /// Values at the rays that are linear on every cone (automatic for simplicial
    /// cones); non-simplicial cones whose heights are not linear are rejected.
    pub fn from_heights(f: &Fan, ray_values: &[BigInt]) -> Result<Self> {
        if ray_values.len() != f.rays().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} ray values for {} rays",
                ray_values.len(),
                f.rays().len()
            )));
        }
        let mut values = Vec::with_capacity(f.n_cones());
        for (i, c) in f.cones().iter().enumerate() {
            let gens = f.generators(i);
            let heights: Vector = c.rays().iter().map(|&r| ray_values[r].clone()).collect();
            let mut local = Vec::new();
            if !gens.is_empty() {
                let m = solve_rational(&IntMatrix::from_rows(&gens, f.ambient_rank()), &heights)
                    .ok_or_else(|| Error::FaceMismatch { face: c.rays().to_vec() })?;
                for b in f.geometry(i).lattice.vectors() {
                    let v = m
                        .iter()
                        .zip(b)
                        .fold(BigRational::zero(), |acc, (x, y)| acc + x * BigRational::from_integer(y.clone()));
                    if !v.is_integer() {
                        return Err(Error::NonIntegralInterpolation { cone: c.rays().to_vec() });
                    }
                    local.push(v.to_integer());
                }
            }
            values.push(local);
        }
        Ok(PLFunction { values })
    }

    /// One ambient covector per maximal cone; pieces must agree on common faces.
    pub fn from_covectors(f: &Fan, covectors: &BTreeMap<usize, Vector>) -> Result<Self> {
        let max = f.maximal_cones();
        if !covectors.keys().copied().eq(max.iter().copied()) {
            return Err(Error::DimensionMismatch("covectors must be given for exactly the maximal cones".into()));
        }
        if covectors.values().any(|m| m.len() != f.ambient_rank()) {
            return Err(Error::DimensionMismatch("covector length differs from the ambient rank".into()));
        }
        let mut values = Vec::with_capacity(f.n_cones());
        for tau in 0..f.n_cones() {
            let basis = f.geometry(tau).lattice.vectors();
            let mut local: Option<Vector> = None;
            for &sigma in max.iter().filter(|&&s| f.is_face(tau, s)) {
                let v: Vector = basis.iter().map(|b| dot(&covectors[&sigma], b)).collect();
                match &local {
                    None => local = Some(v),
                    Some(w) if *w != v => return Err(Error::FaceMismatch { face: f.cone(tau).rays().to_vec() }),
                    _ => {}
                }
            }
            values.push(local.expect("every cone lies in a maximal cone"));
        }
        Ok(PLFunction { values })
    }

    /// The restriction of a global covector.
    pub fn linear(f: &Fan, m: &[BigInt]) -> Self {
        let values = (0..f.n_cones())
            .map(|i| f.geometry(i).lattice.vectors().iter().map(|b| dot(m, b)).collect())
            .collect();
        PLFunction { values }
    }

    /// `φ_σ(x)` for an integer point `x` in the span of cone `σ`.
    pub fn eval_in(&self, f: &Fan, cone: usize, x: &[BigInt]) -> BigInt {
        dot(&self.values[cone], &f.geometry(cone).chart.chart(x))
    }

    pub fn eval(&self, f: &Fan, x: &[BigInt]) -> Result<BigInt> {
        let c = f.carrier(x).ok_or(Error::PointOutsideSupport)?;
        Ok(self.eval_in(f, c, x))
    }

    pub fn ray_value(&self, f: &Fan, ray: usize) -> BigInt {
        self.eval_in(f, f.ray_cone(ray), f.ray(ray))
    }

    /// An integral covector on `ℤ^n` restricting to `φ_σ` on `N_σ`.
    pub fn covector(&self, f: &Fan, cone: usize) -> Vector {
        f.geometry(cone).chart.coords.apply_left(&self.values[cone])
    }

    pub fn add(&self, other: &PLFunction) -> PLFunction {
        PLFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| add(a, b)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> PLFunction {
        PLFunction { values: self.values.iter().map(|v| scale(k, v)).collect() }
    }

    /// Values on the HNF basis of `N_σ` for every cone.
    pub fn local_values(&self) -> &[Vector] {
        &self.values
    }
}

/// `div(φ)·w` for a weight `w` on `k`-cones: the weight on `(k−1)`-cones given by
/// `φ_τ(Σ w(σ) n_{σ,τ}) − Σ w(σ) φ_σ(n_{σ,τ})`.
pub fn divisor_of_weight(f: &Fan, phi: &PLFunction, w: &MinkowskiWeight) -> MinkowskiWeight {
    divisor_with(f, phi, w, &CanonicalSelector)
}

pub fn divisor_with(f: &Fan, phi: &PLFunction, w: &MinkowskiWeight, selector: &dyn NormalSelector) -> MinkowskiWeight {
    if w.k == 0 {
        return MinkowskiWeight::zero(0);
    }
    let mut values = BTreeMap::new();
    for tau in f.cones_of_dim(w.k - 1) {
        let mut sum = vec![BigInt::zero(); f.ambient_rank()];
        let mut pieces = BigInt::zero();
        for &sigma in f.cofacets_of(tau) {
            let c = w.get(sigma);
            if c.is_zero() {
                continue;
            }
            let n = selector.normal(f, sigma, tau);
            pieces += &c * phi.eval_in(f, sigma, &n);
            sum = add(&sum, &scale(&c, &n));
        }
        let ord = phi.eval_in(f, tau, &sum) - pieces;
        values.insert(tau, ord);
    }
    MinkowskiWeight::new(w.k - 1, values)
}

/// The principal Weil divisor of `φ` on a weighted fan.
#[derive(Clone, Debug)]
pub struct Divisor {
    /// Order of vanishing on each codimension-one cone (zeros omitted).
    pub ord: MinkowskiWeight,
    /// The cones with nonzero order and their faces, weighted by the order; `None`
    /// when the divisor is trivial.
    pub weil: Option<WeightedFan>,
    /// For each cone of `weil`, the corresponding cone of the original fan.
    pub origin: Vec<usize>,
}

impl Divisor {
    pub fn is_trivial(&self) -> bool {
        self.weil.is_none()
    }
}

pub fn divisor(wf: &WeightedFan, phi: &PLFunction) -> Divisor {
    let f = wf.fan();
    let ord = divisor_of_weight(f, phi, &wf.as_minkowski());
    if ord.is_zero() {
        return Divisor { ord, weil: None, origin: vec![] };
    }
    let support: Vec<usize> = ord.values().keys().copied().collect();
    let (sub, origin) = subfan(f, &support);
    let weights = sub.maximal_cones().into_iter().map(|c| (c, ord.get(origin[c]))).collect();
    let weil = WeightedFan::new_signed(sub, weights).expect("divisor support is pure");
    Divisor { ord, weil: Some(weil), origin }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearityClass {
    pub is_globally_linear: bool,
    /// An integral covector restricting to `φ` on the support.
    pub witness: Option<Vector>,
}

pub fn linearity_class(f: &Fan, phi: &PLFunction) -> LinearityClass {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for sigma in f.maximal_cones() {
        for (b, v) in f.geometry(sigma).lattice.vectors().iter().zip(&phi.values[sigma]) {
            rows.push(b.clone());
            rhs.push(v.clone());
        }
    }
    if rows.is_empty() {
        return LinearityClass { is_globally_linear: true, witness: Some(vec![BigInt::zero(); f.ambient_rank()]) };
    }
    let witness = solve_integer(&IntMatrix::from_rows(&rows, f.ambient_rank()), &rhs);
    LinearityClass { is_globally_linear: witness.is_some(), witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::vector;
    use crate::polyfan::common_refinement;
    use crate::tropcycle::{check_balancing, product_weighted, refine_weights, RandomSelector};

    fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(rank, rays.iter().map(|r| vector(r)).collect(), cones.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn r1() -> Fan {
        fan(1, &[&[1], &[-1]], &[&[0], &[1]])
    }

    fn r2() -> Fan {
        fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]])
    }

    #[test]
    fn zero_function() {
        let f = r2();
        let phi = PLFunction::from_ray_values(&f, &ints(&[0, 0, 0])).unwrap();
        assert_eq!(phi, PLFunction::zero(&f));
        assert!(divisor(&WeightedFan::unit(f).unwrap(), &phi).is_trivial());
    }

    #[test]
    fn min_two_x_zero_has_divisor_two() {
        let f = r1();
        let phi = PLFunction::from_ray_values(&f, &ints(&[0, -2])).unwrap();
        assert_eq!(phi.eval(&f, &vector(&[-3])).unwrap(), BigInt::from(-6));
        assert_eq!(phi.eval(&f, &vector(&[5])).unwrap(), BigInt::zero());
        let d = divisor(&WeightedFan::unit(f).unwrap(), &phi);
        let weil = d.weil.unwrap();
        assert_eq!(weil.dim(), 0);
        assert_eq!(weil.weight_list(), ints(&[2]));
    }

    #[test]
    fn min_xy0_cuts_out_the_tropical_line() {
        let f = r2();
        let phi = PLFunction::from_ray_values(&f, &ints(&[0, 0, -1])).unwrap();
        for (p, v) in [([3, 5], 0), ([-2, 4], -2), ([1, -7], -7), ([-1, -1], -1)] {
            assert_eq!(phi.eval(&f, &vector(&p)).unwrap(), BigInt::from(v));
        }
        let d = divisor(&WeightedFan::unit(f.clone()).unwrap(), &phi);
        let weil = d.weil.unwrap();
        assert_eq!(weil.fan().rays(), f.rays());
        assert_eq!(weil.weight_list(), ints(&[1, 1, 1]));
        assert!(check_balancing(&weil).balanced);
    }

    #[test]
    fn linear_functions_have_trivial_divisors() {
        let f = r2();
        let lin = PLFunction::linear(&f, &vector(&[1, 0]));
        assert!(divisor(&WeightedFan::unit(f.clone()).unwrap(), &lin).is_trivial());
        let cov: BTreeMap<usize, Vector> = f.maximal_cones().into_iter().map(|c| (c, vector(&[2, 3]))).collect();
        let phi = PLFunction::from_covectors(&f, &cov).unwrap();
        assert_eq!(linearity_class(&f, &phi).witness, Some(vector(&[2, 3])));
        let minxy = PLFunction::from_ray_values(&f, &ints(&[0, 0, -1])).unwrap();
        assert!(!linearity_class(&f, &minxy).is_globally_linear);
        assert!(linearity_class(&f, &PLFunction::zero(&f)).is_globally_linear);
    }

    #[test]
    fn covectors_must_agree_on_faces() {
        let f = r1();
        let mut cov = BTreeMap::new();
        cov.insert(f.ray_cone(0), vector(&[1]));
        cov.insert(f.ray_cone(1), vector(&[3]));
        assert!(PLFunction::from_covectors(&f, &cov).is_ok());
        let quad = fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]);
        let mut cov: BTreeMap<usize, Vector> = quad.maximal_cones().into_iter().map(|c| (c, vector(&[0, 0]))).collect();
        *cov.values_mut().next().unwrap() = vector(&[1, 1]);
        assert!(matches!(PLFunction::from_covectors(&quad, &cov), Err(Error::FaceMismatch { .. })));
    }

    #[test]
    fn interpolation_must_be_integral() {
        let f = fan(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]);
        assert!(matches!(
            PLFunction::from_ray_values(&f, &ints(&[0, 1])),
            Err(Error::NonIntegralInterpolation { .. })
        ));
        assert!(PLFunction::from_ray_values(&f, &ints(&[0, 2])).is_ok());
        let square = fan(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]], &[&[0, 1, 2, 3]]);
        assert!(matches!(
            PLFunction::from_ray_values(&square, &ints(&[0, 0, 0, 0])),
            Err(Error::RayValuesOnNonSimplicial { .. })
        ));
    }

    #[test]
    fn divisor_ignores_linear_shifts_and_normals() {
        let f = r2();
        let wf = WeightedFan::unit(f.clone()).unwrap();
        let phi = PLFunction::from_ray_values(&f, &ints(&[0, 0, -1])).unwrap();
        let base = divisor(&wf, &phi).ord;
        for m in [[1, 0], [-3, 7], [5, 5]] {
            let shifted = phi.add(&PLFunction::linear(&f, &vector(&m)));
            assert_eq!(divisor(&wf, &shifted).ord, base);
        }
        let random = RandomSelector::new(3);
        assert_eq!(divisor_with(&f, &phi, &wf.as_minkowski(), &random), base);
    }

    #[test]
    fn divisor_respects_refinement() {
        let f = r2();
        let wf = WeightedFan::unit(f.clone()).unwrap();
        let quad = fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]);
        let fine = common_refinement(&f, &quad).unwrap();
        let fine_wf = refine_weights(&wf, &fine).unwrap();
        let phi = PLFunction::from_ray_values(&f, &ints(&[0, 0, -1])).unwrap();
        let fine_values: Vec<BigInt> = fine.rays().iter().map(|r| phi.eval(&f, r).unwrap()).collect();
        let fine_phi = PLFunction::from_ray_values(&fine, &fine_values).unwrap();
        let coarse = divisor(&wf, &phi);
        let refined = divisor(&fine_wf, &fine_phi);
        // the new rays (−1,0) and (0,−1) lie in flat regions of φ
        for (&tau, w) in refined.ord.values() {
            let c = f.find_ray(fine.ray(fine.cone(tau).rays()[0])).expect("divisor on original rays");
            assert_eq!(coarse.ord.get(f.ray_cone(c)), *w);
        }
        assert_eq!(refined.ord.values().len(), 3);
    }

    #[test]
    fn divisor_of_a_product() {
        // Σ × div(φ) when φ is pulled back from the second factor
        let a = WeightedFan::unit(fan(1, &[&[1], &[-1]], &[&[0], &[1]])).unwrap();
        let b = WeightedFan::unit(r2()).unwrap();
        let phi_b = PLFunction::from_ray_values(b.fan(), &ints(&[0, 0, -1])).unwrap();
        let p = product_weighted(&a, &b);
        let values: Vec<BigInt> =
            p.fan().rays().iter().map(|r| phi_b.eval(b.fan(), &r[1..]).unwrap()).collect();
        let psi = PLFunction::from_ray_values(p.fan(), &values).unwrap();
        let d = divisor(&p, &psi).weil.unwrap();
        let expected = product_weighted(&a, &divisor(&b, &phi_b).weil.unwrap());
        assert_eq!(d.fan().maximal_cones().len(), expected.fan().maximal_cones().len());
        assert!(crate::polyfan::same_support(d.fan(), expected.fan()).unwrap());
        assert!(d.weight_list().iter().all(|w| w == &BigInt::from(1)));
    }
}
