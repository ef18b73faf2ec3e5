//! Exact cone geometry: double description, facet normals, face enumeration.
//!
//! Cones here are given by integer generators in `ℤ^n`. Everything is exact; the
//! algorithms are the textbook ones, sized for ambient rank up to about 8.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exactlin::{dot, is_zero_vector, neg, primitive, rank_of_rows, saturate, IntMatrix, LatticeChart, Vector};

/// Inequality description `{x : e·x = 0 for e in equations, u·x ≥ 0 for u in inequalities}`.
///
/// For a cone produced by [`hrep`] the inequalities are exactly the facet normals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    pub ambient_rank: usize,
    pub equations: Vec<Vector>,
    pub inequalities: Vec<Vector>,
}

impl HRep {
    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero())
            && self.inequalities.iter().all(|u| !dot(u, x).is_negative())
    }

    pub fn contains_in_relative_interior(&self, x: &[BigInt]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero())
            && self.inequalities.iter().all(|u| dot(u, x).is_positive())
    }

    /// True when the cone contains no line: facet normals and equations span the dual.
    pub fn is_pointed(&self) -> bool {
        let mut rows = self.equations.clone();
        rows.extend(self.inequalities.iter().cloned());
        rank_of_rows(rows) == self.ambient_rank
    }

    pub fn intersect(&self, other: &HRep) -> HRep {
        let mut equations = self.equations.clone();
        equations.extend(other.equations.iter().cloned());
        let mut inequalities = self.inequalities.clone();
        inequalities.extend(other.inequalities.iter().cloned());
        HRep { ambient_rank: self.ambient_rank, equations, inequalities }
    }
}

/// Output of the double description method: lineality space basis and extreme rays.
#[derive(Clone, Debug)]
pub struct Generators {
    pub lineality: Vec<Vector>,
    pub rays: Vec<Vector>,
}

/// Double description: converts an H-representation to generators.
///
/// Constraints are inserted one at a time; after each insertion, rays that are not
/// extreme (checked by the rank of their tight constraints) are discarded.
pub fn double_description(h: &HRep) -> Generators {
    let n = h.ambient_rank;
    let mut lineality: Vec<Vector> = IntMatrix::identity(n).row_vectors();
    let mut rays: Vec<Vector> = Vec::new();
    let mut processed: Vec<Vector> = Vec::new();

    let constraints = h
        .equations
        .iter()
        .map(|e| (e, true))
        .chain(h.inequalities.iter().map(|u| (u, false)));
    for (a, is_equation) in constraints {
        if let Some(pos) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lineality.remove(pos);
            let mut s = dot(a, &l0);
            if s.is_negative() {
                l0 = neg(&l0);
                s = -s;
            }
            let project = |v: &Vector| -> Vector {
                let t = dot(a, v);
                primitive(&v.iter().zip(&l0).map(|(x, y)| &s * x - &t * y).collect::<Vector>())
            };
            lineality = lineality.iter().map(project).filter(|v| !is_zero_vector(v)).collect();
            rays = rays.iter().map(project).filter(|v| !is_zero_vector(v)).collect();
            if !is_equation {
                rays.push(primitive(&l0));
            }
        } else {
            let mut zero = Vec::new();
            let mut pos = Vec::new();
            let mut neg_side = Vec::new();
            for r in rays.drain(..) {
                let t = dot(a, &r);
                if t.is_zero() {
                    zero.push(r);
                } else if t.is_positive() {
                    pos.push((r, t));
                } else {
                    neg_side.push((r, t));
                }
            }
            let mut next = zero;
            for (p, tp) in &pos {
                for (q, tq) in &neg_side {
                    let c: Vector = p.iter().zip(q).map(|(x, y)| tp * y - tq * x).collect();
                    if !is_zero_vector(&c) {
                        next.push(primitive(&c));
                    }
                }
            }
            if !is_equation {
                next.extend(pos.into_iter().map(|(r, _)| r));
            }
            rays = next;
        }
        processed.push(a.clone());

        let target = n - lineality.len();
        let mut seen = HashSet::new();
        rays.retain(|r| {
            if !seen.insert(r.clone()) {
                return false;
            }
            let tight: Vec<Vector> = processed.iter().filter(|c| dot(c, r).is_zero()).cloned().collect();
            target >= 1 && rank_of_rows(tight) == target - 1
        });
    }
    Generators { lineality, rays }
}

/// Facet description of the cone generated by `gens` in `ℤ^n`.
pub fn hrep(gens: &[Vector], n: usize) -> HRep {
    let lattice = saturate(gens, n);
    let chart = LatticeChart::new(&lattice).expect("saturated by construction");
    let k = lattice.rank();
    let equations = chart.quotient.row_vectors();
    if k == 0 {
        return HRep { ambient_rank: n, equations, inequalities: vec![] };
    }
    // facet normals are the extreme rays of the dual cone inside the span
    let local: Vec<Vector> = gens.iter().map(|g| chart.chart(g)).collect();
    let dual = HRep { ambient_rank: k, equations: vec![], inequalities: local };
    let normals = double_description(&dual);
    let mut inequalities: Vec<Vector> = normals
        .rays
        .iter()
        .map(|u| primitive(&chart.coords.apply_left(u)))
        .collect();
    inequalities.sort();
    HRep { ambient_rank: n, equations, inequalities }
}

/// Extreme rays of a pointed cone given by an H-representation, sorted.
pub fn extreme_rays(h: &HRep) -> Vec<Vector> {
    let g = double_description(h);
    let mut rays = g.rays;
    rays.sort();
    rays
}

/// Problems found while enumerating the faces of a generated cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaceError {
    NotPointed,
    Redundant(usize),
}

/// All faces of `cone(gens)` as sorted subsets of generator positions, including
/// the empty face and the whole cone. Generators must be irredundant and the cone
/// pointed.
pub fn faces(gens: &[Vector], n: usize) -> Result<Vec<Vec<usize>>, FaceError> {
    let all: Vec<usize> = (0..gens.len()).collect();
    if rank_of_rows(gens.to_vec()) == gens.len() {
        return Ok(subsets(&all));
    }
    let h = hrep(gens, n);
    if !h.is_pointed() {
        return Err(FaceError::NotPointed);
    }
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut memo: HashSet<Vec<usize>> = HashSet::new();
    collect_faces(gens, &all, n, &mut found, &mut memo);
    for i in 0..gens.len() {
        if !found.contains(&vec![i]) {
            return Err(FaceError::Redundant(i));
        }
    }
    Ok(found.into_iter().collect())
}

fn collect_faces(
    gens: &[Vector],
    subset: &[usize],
    n: usize,
    found: &mut BTreeSet<Vec<usize>>,
    memo: &mut HashSet<Vec<usize>>,
) {
    if !memo.insert(subset.to_vec()) {
        return;
    }
    found.insert(subset.to_vec());
    let local: Vec<Vector> = subset.iter().map(|&i| gens[i].clone()).collect();
    if rank_of_rows(local.clone()) == local.len() {
        for s in subsets(subset) {
            found.insert(s);
        }
        return;
    }
    for u in hrep(&local, n).inequalities {
        let facet: Vec<usize> = subset.iter().copied().filter(|&i| dot(&u, &gens[i]).is_zero()).collect();
        collect_faces(gens, &facet, n, found, memo);
    }
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << items.len());
    for mask in 0u64..(1u64 << items.len()) {
        out.push(items.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &x)| x).collect());
    }
    out
}
