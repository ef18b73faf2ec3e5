use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::matrix::{is_zero_vector, IntMatrix, Vector};
use super::normal_form::{hnf, invariant_factors, solve_integer};
use crate::error::{Error, Result};

/// A basis of a sublattice of `ℤ^ambient_rank`, stored in row Hermite normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatticeBasis {
    ambient_rank: usize,
    vectors: Vec<Vector>,
}

impl LatticeBasis {
    /// Canonicalizes the generating set. The vectors need not be independent.
    pub fn span_of(ambient_rank: usize, generators: &[Vector]) -> Self {
        if generators.is_empty() {
            return LatticeBasis { ambient_rank, vectors: vec![] };
        }
        let (h, _) = hnf(&IntMatrix::from_rows(generators, ambient_rank));
        let vectors = h.row_vectors().into_iter().filter(|v| !is_zero_vector(v)).collect();
        LatticeBasis { ambient_rank, vectors }
    }

    pub fn full(ambient_rank: usize) -> Self {
        LatticeBasis { ambient_rank, vectors: IntMatrix::identity(ambient_rank).row_vectors() }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.vectors, self.ambient_rank)
    }

    /// Integer coordinates of `v` in this basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vector> {
        if self.vectors.is_empty() {
            return is_zero_vector(v).then(Vec::new);
        }
        solve_integer(&self.matrix().transpose(), v)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// True when the lattice equals its real span intersected with `ℤ^n`.
    pub fn is_saturated(&self) -> bool {
        self.vectors.is_empty() || invariant_factors(&self.matrix()).iter().all(One::is_one)
    }
}

impl fmt::Debug for LatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeBasis(ℤ^{}; {:?})", self.ambient_rank, self.matrix())
    }
}

/// Saturated basis of `{x ∈ ℤ^cols : m · x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> LatticeBasis {
    let n = m.cols();
    if m.rows() == 0 {
        return LatticeBasis::full(n);
    }
    let (h, u) = hnf(&m.transpose());
    let kernel: Vec<Vector> = (0..h.rows())
        .filter(|&i| is_zero_vector(h.row(i)))
        .map(|i| u.row(i).to_vec())
        .collect();
    LatticeBasis::span_of(n, &kernel)
}

/// Saturated basis of `span(vectors) ∩ ℤ^ambient_rank`.
pub fn saturate(vectors: &[Vector], ambient_rank: usize) -> LatticeBasis {
    if vectors.iter().all(|v| is_zero_vector(v)) {
        return LatticeBasis { ambient_rank, vectors: vec![] };
    }
    let annihilator = integer_kernel(&IntMatrix::from_rows(vectors, ambient_rank));
    integer_kernel(&annihilator.matrix())
}

/// Index of a subgroup inside a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

/// `[ambient : ⟨sub⟩]`, computed from the Smith form of the coordinate matrix.
pub fn lattice_index(sub: &[Vector], ambient: &LatticeBasis) -> Result<LatticeIndex> {
    let coords = sub
        .iter()
        .map(|v| ambient.coordinates(v).ok_or(Error::VectorOutsideLattice))
        .collect::<Result<Vec<_>>>()?;
    let r = ambient.rank();
    if r == 0 {
        return Ok(LatticeIndex::Finite(BigInt::one()));
    }
    let factors = invariant_factors(&IntMatrix::from_rows(&coords, r));
    if factors.len() < r {
        return Ok(LatticeIndex::Infinite);
    }
    Ok(LatticeIndex::Finite(factors.iter().product()))
}

/// Coordinates adapted to a saturated sublattice `L ⊆ ℤ^n` of rank `k`.
///
/// `coords` (k × n) sends `x ∈ L` to its coordinates in the HNF basis of `L`;
/// `quotient` ((n−k) × n) is a surjection `ℤ^n → ℤ^{n−k}` with kernel exactly `L`.
/// Together they form a unimodular matrix.
#[derive(Clone, Debug)]
pub struct LatticeChart {
    pub basis: LatticeBasis,
    pub coords: IntMatrix,
    pub quotient: IntMatrix,
}

impl LatticeChart {
    pub fn new(basis: &LatticeBasis) -> Result<Self> {
        let n = basis.ambient_rank();
        let k = basis.rank();
        if k == 0 {
            return Ok(LatticeChart {
                basis: basis.clone(),
                coords: IntMatrix::zeros(0, n),
                quotient: IntMatrix::identity(n),
            });
        }
        let (h, u) = hnf(&basis.matrix().transpose());
        let top_is_identity = (0..k).all(|i| (0..k).all(|j| *h.get(i, j) == BigInt::from((i == j) as i32)));
        if !top_is_identity {
            return Err(Error::NotSaturated);
        }
        Ok(LatticeChart {
            basis: basis.clone(),
            coords: u.select_rows(0..k),
            quotient: u.select_rows(k..n),
        })
    }

    /// Full unimodular change of coordinates: first `k` rows chart `L`, the rest the quotient.
    pub fn unimodular(&self) -> IntMatrix {
        self.coords.vstack(&self.quotient)
    }

    pub fn project(&self, v: &[BigInt]) -> Vector {
        self.quotient.apply(v)
    }

    /// Coordinates of `v` in `basis`, assuming `v ∈ L`.
    pub fn chart(&self, v: &[BigInt]) -> Vector {
        self.coords.apply(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::matrix::vector;
    use crate::exactlin::normal_form::snf;
    use num_traits::Zero;

    #[test]
    fn kernel_of_all_ones_row() {
        let m = IntMatrix::from_i64(1, 3, &[1, 1, 1]);
        let k = integer_kernel(&m);
        assert_eq!(k.rank(), 2);
        assert!(k.contains(&vector(&[1, -1, 0])));
        assert!(k.contains(&vector(&[0, 1, -1])));
        for v in k.vectors() {
            assert!(m.apply(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        assert_eq!(integer_kernel(&IntMatrix::identity(3)).rank(), 0);
    }

    #[test]
    fn kernel_is_saturated() {
        let m = IntMatrix::from_i64(1, 2, &[2, -2]);
        let k = integer_kernel(&m);
        assert_eq!(k.vectors(), &[vector(&[1, 1])]);
        let (s, _, _) = snf(&k.matrix());
        assert!(s.get(0, 0).is_one());
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(saturate(&[vector(&[2, 3])], 2).vectors(), &[vector(&[2, 3])]);
        assert_eq!(saturate(&[vector(&[2, 4])], 2).vectors(), &[vector(&[1, 2])]);
        assert_eq!(saturate(&[], 3).rank(), 0);
        assert_eq!(saturate(&[vector(&[1, 0]), vector(&[1, 2])], 2).rank(), 2);
    }

    #[test]
    fn index_examples() {
        let z2 = LatticeBasis::full(2);
        assert_eq!(lattice_index(z2.vectors(), &z2).unwrap(), LatticeIndex::Finite(BigInt::one()));
        let z1 = LatticeBasis::full(1);
        assert_eq!(lattice_index(&[vector(&[2])], &z1).unwrap(), LatticeIndex::Finite(BigInt::from(2)));
        assert_eq!(lattice_index(&[vector(&[1, 0])], &z2).unwrap(), LatticeIndex::Infinite);
        let line = saturate(&[vector(&[1, 0])], 2);
        assert!(matches!(lattice_index(&[vector(&[0, 1])], &line), Err(Error::VectorOutsideLattice)));
    }

    #[test]
    fn chart_splits_the_lattice() {
        let l = saturate(&[vector(&[2, 3, 1])], 3);
        let chart = LatticeChart::new(&l).unwrap();
        assert!(chart.unimodular().is_unimodular());
        assert_eq!(chart.project(&vector(&[2, 3, 1])), vector(&[0, 0]));
        assert_eq!(chart.chart(&vector(&[4, 6, 2])), vector(&[2]));
        let bad = LatticeBasis::span_of(2, &[vector(&[2, 0])]);
        assert!(LatticeChart::new(&bad).is_err());
    }
}
