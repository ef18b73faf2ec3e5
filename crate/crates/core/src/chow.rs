//! Chow rings of simplicial fans via the Stanley–Reisner presentation, cap products
//! with a weight, and the Poincaré, Künneth and modification checks built on them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{invariant_factors, lattice_index, rank_of_rows, solve_integer, IntMatrix, LatticeIndex, Vector};
use crate::modification::ModificationWitness;
use crate::plfun::{divisor_of_weight, PLFunction};
use crate::polyfan::Fan;
use crate::tropcycle::{minkowski_basis, pushforward, star_weighted, MinkowskiLattice, MinkowskiWeight, WeightedFan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficients {
    Integers,
    Rationals,
}

/// `ℤ[x_ρ] / (Stanley–Reisner ideal + linear relations)` for a simplicial fan.
#[derive(Clone, Debug)]
pub struct ChowPresentation {
    fan: Fan,
    pub coefficients: Coefficients,
    /// Minimal sets of rays spanning no cone.
    pub sr_generators: Vec<Vec<usize>>,
    /// `Σ⟨e_i*, v_ρ⟩ x_ρ` for every coordinate covector that is not identically zero.
    pub linear_forms: Vec<Vector>,
}

/// `A^k`: cone-supported monomials modulo linear relations.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub degree: usize,
    /// Sorted multisets of ray indices whose support is a cone.
    pub monomials: Vec<Vec<usize>>,
    /// One row per (linear form, degree `k−1` monomial), expressed in `monomials`.
    pub relations: IntMatrix,
    pub relation_rank: usize,
    pub rank: usize,
    /// Invariant factors greater than one (integer coefficients only).
    pub torsion: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChowRank {
    pub degree: usize,
    pub rank: usize,
    #[serde(serialize_with = "crate::format::serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

pub fn chow_presentation(f: &Fan) -> Result<ChowPresentation> {
    let coefficients = if f.is_unimodular() { Coefficients::Integers } else { Coefficients::Rationals };
    chow_presentation_with(f, coefficients)
}

/// As [`chow_presentation`] with the coefficient ring forced; integers need a
/// unimodular fan.
pub fn chow_presentation_with(f: &Fan, coefficients: Coefficients) -> Result<ChowPresentation> {
    if !f.is_simplicial() {
        return Err(Error::NonSimplicialFan);
    }
    if coefficients == Coefficients::Integers && !f.is_unimodular() {
        return Err(Error::NonUnimodular);
    }
    let mut sr = BTreeSet::new();
    for c in f.cones() {
        for r in 0..f.rays().len() {
            if c.rays().contains(&r) {
                continue;
            }
            let mut s = c.rays().to_vec();
            s.push(r);
            s.sort_unstable();
            if f.index_of(&s).is_some() {
                continue;
            }
            let minimal = s.iter().all(|&x| {
                let rest: Vec<usize> = s.iter().copied().filter(|&y| y != x).collect();
                f.index_of(&rest).is_some()
            });
            if minimal {
                sr.insert(s);
            }
        }
    }
    let linear_forms = (0..f.ambient_rank())
        .map(|i| f.rays().iter().map(|v| v[i].clone()).collect::<Vector>())
        .filter(|l| l.iter().any(|x| !x.is_zero()))
        .collect();
    Ok(ChowPresentation { fan: f.clone(), coefficients, sr_generators: sr.into_iter().collect(), linear_forms })
}

impl ChowPresentation {
    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn n_vars(&self) -> usize {
        self.fan.rays().len()
    }

    /// Degree-`k` monomials supported on cones, in lexicographic order.
    pub fn monomials(&self, k: usize) -> Vec<Vec<usize>> {
        cone_monomials(&self.fan, k)
    }

    pub fn relation_matrix(&self, k: usize) -> IntMatrix {
        let cols = self.monomials(k);
        relation_matrix(&self.fan, &self.linear_forms, k, &cols)
    }

    pub fn piece(&self, k: usize) -> GradedPiece {
        let monomials = self.monomials(k);
        let relations = relation_matrix(&self.fan, &self.linear_forms, k, &monomials);
        let relation_rank = relations.rank();
        let torsion = match self.coefficients {
            Coefficients::Integers if relations.rows() > 0 => {
                invariant_factors(&relations).into_iter().filter(|d| !d.is_one()).collect()
            }
            _ => vec![],
        };
        GradedPiece { degree: k, rank: monomials.len() - relation_rank, monomials, relations, relation_rank, torsion }
    }
}

fn cone_monomials(f: &Fan, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for c in f.cones() {
        let support = c.rays();
        if support.len() > k || (k > 0 && support.is_empty()) {
            continue;
        }
        for extra in nondecreasing(support.len(), k - support.len()) {
            let mut m: Vec<usize> = support.to_vec();
            m.extend(extra.iter().map(|&i| support[i]));
            m.sort_unstable();
            out.push(m);
        }
    }
    out.sort();
    out
}

/// All nondecreasing sequences of length `len` over `0..n`.
fn nondecreasing(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                let from = s.last().copied().unwrap_or(0);
                (from..n).map(move |i| {
                    let mut t = s.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

fn relation_matrix(f: &Fan, forms: &[Vector], k: usize, cols: &[Vec<usize>]) -> IntMatrix {
    if k == 0 {
        return IntMatrix::zeros(0, cols.len());
    }
    let index: HashMap<&[usize], usize> = cols.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let mut rows = Vec::new();
    for m in cone_monomials(f, k - 1) {
        for form in forms {
            let mut row = vec![BigInt::zero(); cols.len()];
            for (r, c) in form.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut t = m.clone();
                t.push(r);
                t.sort_unstable();
                if let Some(&j) = index.get(t.as_slice()) {
                    row[j] += c;
                }
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    IntMatrix::from_rows(&rows, cols.len())
}

/// Ranks and torsion of `A^0, …, A^d`.
pub fn chow_ranks(cp: &ChowPresentation) -> Vec<ChowRank> {
    (0..=cp.fan.dim())
        .map(|k| {
            let p = cp.piece(k);
            ChowRank { degree: k, rank: p.rank, torsion: p.torsion }
        })
        .collect()
}

/// Courant functions `φ_ρ` (value one at `v_ρ`, zero at the other rays), multiplied by
/// `scale` so that they are integral on simplicial fans that are not unimodular.
pub struct CourantFunctions {
    pub scale: BigInt,
    pub functions: Vec<PLFunction>,
}

pub fn courant_functions(f: &Fan) -> Result<CourantFunctions> {
    if !f.is_simplicial() {
        return Err(Error::NonSimplicialFan);
    }
    let mut scale = BigInt::one();
    for c in f.maximal_cones() {
        let g = f.geometry(c);
        if let Ok(LatticeIndex::Finite(i)) = lattice_index(&f.generators(c), &g.lattice) {
            scale = scale.lcm(&i);
        }
    }
    let n = f.rays().len();
    let functions = (0..n)
        .map(|r| {
            let values: Vec<BigInt> =
                (0..n).map(|s| if s == r { scale.clone() } else { BigInt::zero() }).collect();
            PLFunction::from_ray_values(f, &values)
        })
        .collect::<Result<_>>()?;
    Ok(CourantFunctions { scale, functions })
}

/// Evaluates monomials against a weight with memoized prefixes.
pub struct Capper<'a> {
    fan: &'a Fan,
    courant: CourantFunctions,
    memo: HashMap<Vec<usize>, MinkowskiWeight>,
}

impl<'a> Capper<'a> {
    pub fn new(fan: &'a Fan, omega: MinkowskiWeight) -> Result<Self> {
        let courant = courant_functions(fan)?;
        let mut memo = HashMap::new();
        memo.insert(vec![], omega);
        Ok(Capper { fan, courant, memo })
    }

    pub fn scale(&self) -> &BigInt {
        &self.courant.scale
    }

    /// `x_{ρ1}⋯x_{ρk} ∩ ω = (−1)^k div(φ_{ρk}) ⋯ div(φ_{ρ1}) ω`, times `scale^k`.
    pub fn cap(&mut self, monomial: &[usize]) -> MinkowskiWeight {
        if let Some(w) = self.memo.get(monomial) {
            return w.clone();
        }
        let (&last, prefix) = monomial.split_last().expect("empty monomial is memoized");
        let inner = self.cap(prefix);
        let div = divisor_of_weight(self.fan, &self.courant.functions[last], &inner);
        let w = MinkowskiWeight::new(div.k, div.values().iter().map(|(&c, v)| (c, -v)).collect());
        self.memo.insert(monomial.to_vec(), w.clone());
        w
    }
}

/// The cap map `A^k → M_{d−k}` on the monomial spanning set.
#[derive(Clone, Debug)]
pub struct CapMatrix {
    pub degree: usize,
    pub monomials: Vec<Vec<usize>>,
    /// Columns: coordinates of each cap in the basis of `target`.
    pub matrix: IntMatrix,
    pub target: MinkowskiLattice,
    /// Every entry is `scale^k` times the true value.
    pub scale: BigInt,
}

pub fn cap_matrix(wf: &WeightedFan, k: usize) -> Result<CapMatrix> {
    let mut capper = Capper::new(wf.fan(), wf.as_minkowski())?;
    cap_matrix_with(wf.fan(), &mut capper, k)
}

fn cap_matrix_with(f: &Fan, capper: &mut Capper<'_>, k: usize) -> Result<CapMatrix> {
    let d = f.dim();
    if k > d {
        return Err(Error::DimensionMismatch(format!("degree {k} exceeds the dimension {d}")));
    }
    let target = minkowski_basis(f, d - k);
    let monomials = cone_monomials(f, k);
    let mut columns = Vec::with_capacity(monomials.len());
    for m in &monomials {
        let w = capper.cap(m);
        let coords = target.coordinates(&w).ok_or(Error::Unbalanced { cone: m.clone() })?;
        columns.push(coords);
    }
    let matrix = IntMatrix::from_columns(&columns, target.rank());
    let scale = num_traits::pow(capper.scale().clone(), k);
    Ok(CapMatrix { degree: k, monomials, matrix, target, scale })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeVerdict {
    pub degree: usize,
    pub chow_rank: usize,
    pub minkowski_rank: usize,
    pub cap_rank: usize,
    #[serde(serialize_with = "crate::format::serialize_bigints")]
    pub torsion: Vec<BigInt>,
    /// Every relation caps to zero.
    pub well_defined: bool,
    pub bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarPoincare {
    pub cone: Vec<usize>,
    pub poincare: bool,
    pub first_failure: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoincareReport {
    pub simplicial: bool,
    pub coefficients: Option<Coefficients>,
    pub degrees: Vec<DegreeVerdict>,
    pub poincare: bool,
    /// Present when star fans were checked.
    pub stars: Option<Vec<StarPoincare>>,
}

impl PoincareReport {
    pub fn passed(&self) -> bool {
        self.poincare && self.stars.as_ref().is_none_or(|s| s.iter().all(|v| v.poincare))
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.degrees.iter().find(|d| !d.bijective).map(|d| d.degree)
    }
}

/// Whether capping with the weight gives `A^k ≅ M_{d−k}` for every `k`. With integer
/// coefficients the cap image must be all of `M_{d−k}` (Smith form all ones) and `A^k`
/// free of the same rank; with rational coefficients ranks must agree.
pub fn poincare_verdict(wf: &WeightedFan, star: bool) -> Result<PoincareReport> {
    poincare_verdict_with(wf, star, None)
}

/// As [`poincare_verdict`], with the coefficients forced instead of chosen by unimodularity.
pub fn poincare_verdict_with(wf: &WeightedFan, star: bool, forced: Option<Coefficients>) -> Result<PoincareReport> {
    let Some((coefficients, degrees)) = degree_verdicts(wf, forced)? else {
        return Ok(PoincareReport { simplicial: false, coefficients: None, degrees: vec![], poincare: false, stars: None });
    };
    let poincare = degrees.iter().all(|d| d.bijective);
    let stars = if star {
        let f = wf.fan();
        let mut out = Vec::new();
        for sigma in 0..f.n_cones() {
            if f.cone(sigma).dim() == 0 {
                continue;
            }
            let (s, _) = star_weighted(wf, sigma)?;
            let verdicts = degree_verdicts(&s, forced)?.map(|(_, d)| d).unwrap_or_default();
            let first_failure = verdicts.iter().find(|d| !d.bijective).map(|d| d.degree);
            out.push(StarPoincare { cone: f.cone(sigma).rays().to_vec(), poincare: first_failure.is_none(), first_failure });
        }
        Some(out)
    } else {
        None
    };
    Ok(PoincareReport { simplicial: true, coefficients: Some(coefficients), degrees, poincare, stars })
}

fn degree_verdicts(
    wf: &WeightedFan,
    coefficients: Option<Coefficients>,
) -> Result<Option<(Coefficients, Vec<DegreeVerdict>)>> {
    let f = wf.fan();
    let cp = match coefficients.map_or_else(|| chow_presentation(f), |c| chow_presentation_with(f, c)) {
        Ok(cp) => cp,
        Err(Error::NonSimplicialFan) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut capper = Capper::new(f, wf.as_minkowski())?;
    let mut out = Vec::new();
    for k in 0..=f.dim() {
        let piece = cp.piece(k);
        let cap = cap_matrix_with(f, &mut capper, k)?;
        let well_defined = cap.matrix.mul(&piece.relations.transpose()).is_zero();
        let minkowski_rank = cap.target.rank();
        let cap_rank = cap.matrix.rank();
        let ranks_agree = piece.rank == minkowski_rank && cap_rank == minkowski_rank;
        let bijective = well_defined
            && ranks_agree
            && match cp.coefficients {
                Coefficients::Rationals => true,
                Coefficients::Integers => {
                    piece.torsion.is_empty()
                        && (minkowski_rank == 0 || invariant_factors(&cap.matrix).iter().all(|d| d.is_one()))
                }
            };
        out.push(DegreeVerdict {
            degree: k,
            chow_rank: piece.rank,
            minkowski_rank,
            cap_rank,
            torsion: piece.torsion,
            well_defined,
            bijective,
        });
    }
    Ok(Some((cp.coefficients, out)))
}

fn convolve(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KunnethReport {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub product: Vec<usize>,
    pub convolution: Vec<usize>,
    pub minkowski_product: Vec<usize>,
    pub minkowski_convolution: Vec<usize>,
}

impl KunnethReport {
    pub fn holds(&self) -> bool {
        self.product == self.convolution && self.minkowski_product == self.minkowski_convolution
    }
}

fn minkowski_ranks(f: &Fan) -> Vec<usize> {
    (0..=f.dim()).map(|k| minkowski_basis(f, k).rank()).collect()
}

/// Compares the Chow and Minkowski ranks of `a × b` with the convolution of the factors'.
pub fn kunneth_check(a: &WeightedFan, b: &WeightedFan) -> Result<KunnethReport> {
    let ranks = |f: &Fan| -> Result<Vec<usize>> {
        Ok(chow_ranks(&chow_presentation(f)?).into_iter().map(|r| r.rank).collect())
    };
    let p = crate::polyfan::product(a.fan(), b.fan()).fan;
    let left = ranks(a.fan())?;
    let right = ranks(b.fan())?;
    let convolution = convolve(&left, &right);
    let minkowski_convolution = convolve(&minkowski_ranks(a.fan()), &minkowski_ranks(b.fan()));
    Ok(KunnethReport { product: ranks(&p)?, left, right, convolution, minkowski_product: minkowski_ranks(&p), minkowski_convolution })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackDegree {
    pub degree: usize,
    pub base_rank: usize,
    pub modified_rank: usize,
    pub surjective: bool,
    pub bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackReport {
    pub degrees: Vec<PullbackDegree>,
    pub base_poincare: bool,
    /// `x₀ + Σ φ(v_ρ) x_ρ̃` is a linear relation of the modified fan.
    pub x0_relation: bool,
    /// Injectivity of the pushforward `M_k(Σ̃) → M_k(Σ)` for each `k`.
    pub pushforward_injective: Vec<bool>,
    /// `p_*(p^*α ∩ ω̃) = α ∩ ω` for every base monomial `α`.
    pub projection_formula: bool,
}

impl PullbackReport {
    pub fn ok(&self) -> bool {
        self.degrees.iter().all(|d| d.surjective && (d.bijective || !self.base_poincare))
            && self.x0_relation
            && self.pushforward_injective.iter().all(|&b| b)
            && self.projection_formula
    }
}

/// The pullback `x_ρ ↦ x_ρ̃` along the projection of a modification, checked degree by
/// degree against the presentations of both fans.
pub fn modification_pullback(witness: &ModificationWitness) -> Result<PullbackReport> {
    let base = &witness.base;
    let modified = &witness.replay.fan;
    let (bf, mf) = (base.fan(), modified.fan());
    if !bf.is_unimodular() || !mf.is_unimodular() {
        return Err(Error::NonUnimodular);
    }
    let bcp = chow_presentation_with(bf, Coefficients::Integers)?;
    let mcp = chow_presentation_with(mf, Coefficients::Integers)?;
    let base_poincare = poincare_verdict(base, false)?.poincare;

    let mut degrees = Vec::new();
    for k in 0..=mf.dim() {
        let bp = bcp.piece(k);
        let mp = mcp.piece(k);
        // graph rays keep the base indices, so p^* sends a monomial to the same multiset
        let image: BTreeSet<usize> = bp
            .monomials
            .iter()
            .map(|m| mp.monomials.binary_search(m).expect("graph monomial present"))
            .collect();
        let rest: Vec<usize> = (0..mp.monomials.len()).filter(|j| !image.contains(j)).collect();
        let surjective = rest.is_empty() || {
            let rows: Vec<Vector> =
                mp.relations.row_vectors().into_iter().map(|r| rest.iter().map(|&j| r[j].clone()).collect()).collect();
            let m = IntMatrix::from_rows(&rows, rest.len());
            rank_of_rows(rows) == rest.len() && invariant_factors(&m).iter().all(|d| d.is_one())
        };
        let bijective = surjective && bp.rank == mp.rank && bp.torsion == mp.torsion;
        degrees.push(PullbackDegree { degree: k, base_rank: bp.rank, modified_rank: mp.rank, surjective, bijective });
    }

    let x0_relation = match witness.replay.vertical_ray {
        None => true,
        Some(up) => {
            let mons = mcp.monomials(1);
            let mut target = vec![BigInt::zero(); mons.len()];
            let at = |r: usize| mons.binary_search(&vec![r]).expect("ray monomial");
            target[at(up)] += 1;
            for r in 0..bf.rays().len() {
                target[at(r)] += witness.phi.ray_value(bf, r);
            }
            solve_integer(&mcp.relation_matrix(1).transpose(), &target).is_some()
        }
    };

    let n = mf.ambient_rank();
    let projection = IntMatrix::identity(n).select_rows(0..n - 1);
    let mut pushforward_injective = Vec::new();
    for k in 0..=mf.dim() {
        let source = minkowski_basis(mf, k);
        let target = minkowski_basis(bf, k);
        let mut columns = Vec::new();
        for w in source.basis() {
            let pushed = pushforward(&projection, mf, &w, bf)?;
            columns.push(target.coordinates(&pushed).ok_or(Error::Unbalanced { cone: vec![] })?);
        }
        pushforward_injective.push(rank_of_rows(columns.clone()) == columns.len());
    }

    let mut base_capper = Capper::new(bf, base.as_minkowski())?;
    let mut mod_capper = Capper::new(mf, modified.as_minkowski())?;
    let mut projection_formula = true;
    'outer: for k in 0..=bf.dim() {
        for m in cone_monomials(bf, k) {
            let lhs = pushforward(&projection, mf, &mod_capper.cap(&m), bf)?;
            if lhs != base_capper.cap(&m) {
                projection_formula = false;
                break 'outer;
            }
        }
    }
    Ok(PullbackReport { degrees, base_poincare, x0_relation, pushforward_injective, projection_formula })
}

/// Per-degree cap columns of the degree-one generators, keyed by ray.
pub fn degree_one_caps(wf: &WeightedFan) -> Result<BTreeMap<usize, MinkowskiWeight>> {
    let mut capper = Capper::new(wf.fan(), wf.as_minkowski())?;
    Ok((0..wf.fan().rays().len()).map(|r| (r, capper.cap(&[r]))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::vector;
    use crate::modification::{modify, recognize_along};
    use crate::polyfan::unimodular_refinement;

    fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(rank, rays.iter().map(|r| vector(r)).collect(), cones.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn line() -> Fan {
        fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0], &[1], &[2]])
    }

    fn plane() -> Fan {
        fan(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
            &[&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]],
        )
    }

    fn ranks(f: &Fan) -> Vec<usize> {
        chow_ranks(&chow_presentation(f).unwrap()).into_iter().map(|r| r.rank).collect()
    }

    #[test]
    fn tropical_line_presentation() {
        let cp = chow_presentation(&line()).unwrap();
        assert_eq!(cp.sr_generators, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(cp.linear_forms, vec![vector(&[1, 0, -1]), vector(&[0, 1, -1])]);
        assert_eq!(ranks(&line()), vec![1, 1]);
        assert_eq!(cp.piece(2).rank, 0);
    }

    #[test]
    fn projective_plane_and_zero_fan() {
        let p2 = fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[0, 2], &[1, 2]]);
        assert_eq!(ranks(&p2), vec![1, 1, 1]);
        assert_eq!(ranks(&Fan::zero(3)), vec![1]);
        // P1 × P1
        let q = fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        assert_eq!(ranks(&q), vec![1, 2, 1]);
    }

    #[test]
    fn monomials_are_cone_supported() {
        let cp = chow_presentation(&plane()).unwrap();
        // 4 squares and 6 edge products
        assert_eq!(cp.monomials(2).len(), 10);
        assert_eq!(cp.monomials(3).len(), 4 + 12);
        assert!(cp.monomials(2).contains(&vec![0, 0]));
        assert!(cp.monomials(2).contains(&vec![1, 3]));
    }

    #[test]
    fn torsion_free_projective_plane_is_poincare() {
        let p2 = WeightedFan::unit(fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[0, 2], &[1, 2]])).unwrap();
        let report = poincare_verdict(&p2, true).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn non_simplicial_fans_are_refused() {
        let square = fan(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]], &[&[0, 1, 2, 3]]);
        assert!(matches!(chow_presentation(&square), Err(Error::NonSimplicialFan)));
        let report = poincare_verdict(&WeightedFan::unit(square).unwrap(), true).unwrap();
        assert!(!report.simplicial && !report.passed());
    }

    #[test]
    fn sign_anchor_on_the_projective_line() {
        let p1 = WeightedFan::unit(fan(1, &[&[1], &[-1]], &[&[0], &[1]])).unwrap();
        let cap = cap_matrix(&p1, 1).unwrap();
        assert_eq!(cap.matrix, IntMatrix::from_i64(1, 2, &[1, 1]));
        assert_eq!(cap.target.basis()[0].values().values().next(), Some(&BigInt::from(1)));
        let zero = cap_matrix(&p1, 0).unwrap();
        assert_eq!(zero.matrix.rows(), 1);
    }

    #[test]
    fn tropical_line_and_cross() {
        let l = WeightedFan::unit(line()).unwrap();
        let report = poincare_verdict(&l, true).unwrap();
        assert!(report.passed());
        let cap = cap_matrix(&l, 1).unwrap();
        // x_3 ∩ ω is the origin with weight one
        assert_eq!(cap.matrix.column(2), vector(&[1]));
        let cross = WeightedFan::unit(fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0], &[1], &[2], &[3]])).unwrap();
        let report = poincare_verdict(&cross, false).unwrap();
        assert_eq!(report.first_failure(), Some(0));
        assert_eq!((report.degrees[0].chow_rank, report.degrees[0].minkowski_rank), (1, 2));
    }

    #[test]
    fn tropical_plane_is_star_poincare() {
        let p = WeightedFan::unit(plane()).unwrap();
        let report = poincare_verdict(&p, true).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.degrees.iter().map(|d| d.chow_rank).collect::<Vec<_>>(), vec![1, 1, 1]);
    }

    #[test]
    fn weights_one_two_one_fan() {
        let f = fan(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0], &[1], &[2]]);
        let wf = WeightedFan::from_list(f, vec![1.into(), 2.into(), 1.into()], false).unwrap();
        let report = poincare_verdict(&wf, true).unwrap();
        // the fan itself pairs perfectly, but the star at the weight-two ray is {0} with weight 2
        assert!(report.poincare);
        assert!(!report.passed());
        let failing: Vec<&StarPoincare> = report.stars.as_ref().unwrap().iter().filter(|s| !s.poincare).collect();
        assert_eq!(failing.len(), 1);
        assert_eq!(failing[0].cone, vec![1]);
    }

    #[test]
    fn cap_is_minus_divisor_and_relations_vanish() {
        let p = WeightedFan::unit(plane()).unwrap();
        let caps = degree_one_caps(&p).unwrap();
        let courant = courant_functions(p.fan()).unwrap();
        for (r, w) in caps {
            let div = divisor_of_weight(p.fan(), &courant.functions[r], &p.as_minkowski());
            let minus: BTreeMap<usize, BigInt> = div.values().iter().map(|(&c, v)| (c, -v)).collect();
            assert_eq!(w.values(), &minus);
        }
        let verdicts = poincare_verdict(&p, false).unwrap();
        assert!(verdicts.degrees.iter().all(|d| d.well_defined));
    }

    #[test]
    fn non_unimodular_fan_uses_rationals() {
        let f = fan(2, &[&[1, 0], &[1, 2], &[-1, 0], &[-1, -2]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]);
        assert!(!f.is_unimodular());
        let cp = chow_presentation(&f).unwrap();
        assert_eq!(cp.coefficients, Coefficients::Rationals);
        assert!(matches!(chow_presentation_with(&f, Coefficients::Integers), Err(Error::NonUnimodular)));
        let report = poincare_verdict(&WeightedFan::unit(f.clone()).unwrap(), false).unwrap();
        assert!(report.poincare);
        let refined = WeightedFan::unit(unimodular_refinement(&f)).unwrap();
        assert!(poincare_verdict(&refined, false).unwrap().poincare);
    }

    #[test]
    fn kunneth_on_lines() {
        let l = WeightedFan::unit(line()).unwrap();
        let report = kunneth_check(&l, &l).unwrap();
        assert_eq!(report.product, vec![1, 2, 1]);
        assert!(report.holds());
        let zero = WeightedFan::unit(Fan::zero(1)).unwrap();
        let report = kunneth_check(&l, &zero).unwrap();
        assert_eq!(report.product, report.left);
    }

    #[test]
    fn pullback_along_the_plane() {
        let r2 = WeightedFan::unit(fan(
            2,
            &[&[1, 0], &[0, 1], &[-1, -1]],
            &[&[0, 1], &[0, 2], &[1, 2]],
        ))
        .unwrap();
        let phi = PLFunction::from_ray_values(r2.fan(), &[0.into(), 0.into(), (-1).into()]).unwrap();
        let m = modify(&r2, &phi).unwrap();
        let witness = recognize_along(&m.fan, m.vertical_ray.unwrap()).unwrap();
        let report = modification_pullback(&witness).unwrap();
        assert!(report.ok(), "{report:?}");
        assert!(report.base_poincare);
        assert!(report.degrees.iter().all(|d| d.bijective));
    }

    #[test]
    fn degenerate_pullback_is_an_isomorphism() {
        let r1 = WeightedFan::unit(fan(1, &[&[1], &[-1]], &[&[0], &[1]])).unwrap();
        let phi = PLFunction::from_ray_values(r1.fan(), &[2.into(), (-2).into()]).unwrap();
        let m = modify(&r1, &phi).unwrap();
        assert!(m.vertical_ray.is_none());
        let witness = crate::modification::ModificationWitness {
            direction: 0,
            change: IntMatrix::identity(2),
            base: r1,
            phi,
            replay: m,
            exact: true,
        };
        let report = modification_pullback(&witness).unwrap();
        assert!(report.ok() && report.degrees.iter().all(|d| d.bijective));
    }
}
