//! Matroids on small ground sets and their Bergman fans.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactlin::Vector;
use crate::polyfan::Fan;
use crate::tropcycle::WeightedFan;

pub const MAX_GROUND_SIZE: usize = 8;

/// A matroid on `{0, …, ground_size−1}` given by its bases (as bitmasks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matroid {
    ground_size: usize,
    rank: usize,
    bases: BTreeSet<u32>,
}

/// A flat with its rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flat {
    pub rank: usize,
    pub elements: u32,
}

impl Flat {
    pub fn members(&self) -> Vec<usize> {
        (0..32).filter(|i| self.elements >> i & 1 == 1).collect()
    }
}

fn mask(elements: &[usize]) -> u32 {
    elements.iter().fold(0, |m, &e| m | 1 << e)
}

impl Matroid {
    pub fn from_bases(ground_size: usize, bases: &[Vec<usize>]) -> Result<Self> {
        if ground_size > MAX_GROUND_SIZE {
            return Err(Error::InvalidMatroid(format!("ground set larger than {MAX_GROUND_SIZE}")));
        }
        if bases.is_empty() {
            return Err(Error::InvalidMatroid("no bases".into()));
        }
        let mut set = BTreeSet::new();
        for b in bases {
            if b.iter().any(|&e| e >= ground_size) {
                return Err(Error::InvalidMatroid(format!("basis {b:?} leaves the ground set")));
            }
            let m = mask(b);
            if m.count_ones() as usize != b.len() {
                return Err(Error::InvalidMatroid(format!("basis {b:?} repeats an element")));
            }
            set.insert(m);
        }
        let rank = set.first().expect("nonempty").count_ones() as usize;
        if set.iter().any(|b| b.count_ones() as usize != rank) {
            return Err(Error::InvalidMatroid("bases of different sizes".into()));
        }
        // for all bases A, B and a ∈ A∖B there is b ∈ B∖A with A − a + b a basis
        for &a in &set {
            for &b in &set {
                for x in bits(a & !b) {
                    let ok = bits(b & !a).any(|y| set.contains(&(a & !(1 << x) | 1 << y)));
                    if !ok {
                        return Err(Error::ExchangeAxiomViolation);
                    }
                }
            }
        }
        Ok(Matroid { ground_size, rank, bases: set })
    }

    pub fn uniform(rank: usize, ground_size: usize) -> Result<Self> {
        if rank > ground_size {
            return Err(Error::InvalidMatroid(format!("rank {rank} exceeds ground size {ground_size}")));
        }
        if ground_size > MAX_GROUND_SIZE {
            return Err(Error::InvalidMatroid(format!("ground set larger than {MAX_GROUND_SIZE}")));
        }
        let bases = (0u32..1 << ground_size).filter(|m| m.count_ones() as usize == rank).collect();
        Ok(Matroid { ground_size, rank, bases })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bases(&self) -> Vec<Vec<usize>> {
        self.bases.iter().map(|&b| bits(b).collect()).collect()
    }

    pub fn rank_of(&self, set: u32) -> usize {
        self.bases.iter().map(|b| (b & set).count_ones() as usize).max().unwrap_or(0)
    }

    pub fn closure(&self, set: u32) -> u32 {
        let r = self.rank_of(set);
        (0..self.ground_size).filter(|&e| self.rank_of(set | 1 << e) == r).fold(set, |m, e| m | 1 << e)
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.bases.iter().all(|b| b >> e & 1 == 0)
    }

    pub fn is_coloop(&self, e: usize) -> bool {
        self.bases.iter().all(|b| b >> e & 1 == 1)
    }

    pub fn loops(&self) -> Vec<usize> {
        (0..self.ground_size).filter(|&e| self.is_loop(e)).collect()
    }

    /// `M ∖ e`, with the elements after `e` shifted down.
    pub fn delete(&self, e: usize) -> Matroid {
        let bases: BTreeSet<u32> = if self.is_coloop(e) {
            self.bases.iter().map(|&b| squeeze(b, e)).collect()
        } else {
            self.bases.iter().filter(|&&b| b >> e & 1 == 0).map(|&b| squeeze(b, e)).collect()
        };
        let rank = bases.first().map_or(0, |b| b.count_ones() as usize);
        Matroid { ground_size: self.ground_size - 1, rank, bases }
    }

    /// `M / e`, with the elements after `e` shifted down.
    pub fn contract(&self, e: usize) -> Matroid {
        if self.is_loop(e) {
            return self.delete(e);
        }
        let bases: BTreeSet<u32> = self.bases.iter().filter(|&&b| b >> e & 1 == 1).map(|&b| squeeze(b, e)).collect();
        Matroid { ground_size: self.ground_size - 1, rank: self.rank - 1, bases }
    }

    /// All flats, sorted by rank and then by bitmask.
    pub fn flats(&self) -> Vec<Flat> {
        let mut found = BTreeSet::new();
        for s in 0u32..1 << self.ground_size {
            let c = self.closure(s);
            found.insert(Flat { rank: self.rank_of(c), elements: c });
        }
        found.into_iter().collect()
    }

    /// Pairs `(i, j)` of flat positions where flat `j` covers flat `i`.
    pub fn covers(&self, flats: &[Flat]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in flats.iter().enumerate() {
            for (j, b) in flats.iter().enumerate() {
                if b.rank == a.rank + 1 && a.elements & !b.elements == 0 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn bits(m: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| m >> i & 1 == 1)
}

/// Removes bit `e` and shifts the higher bits down.
fn squeeze(m: u32, e: usize) -> u32 {
    let low = m & ((1 << e) - 1);
    let high = (m >> (e + 1)) << e;
    low | high
}

/// The fine Bergman fan in `ℤ^E/ℤ(1,…,1)`, using coordinates `e_0, …, e_{n−2}` with
/// `e_{n−1} = −Σ e_i`. Rays are the indicator vectors of proper nonempty flats and
/// maximal cones are maximal chains; all weights are one.
pub fn bergman_fan(m: &Matroid) -> Result<WeightedFan> {
    if let Some(&l) = m.loops().first() {
        return Err(Error::LoopPresent(l));
    }
    let n = m.ground_size;
    if n == 0 {
        return WeightedFan::unit(Fan::zero(0));
    }
    let full = (1u32 << n) - 1;
    let proper: Vec<Flat> = m.flats().into_iter().filter(|f| f.elements != 0 && f.elements != full).collect();
    let rays: Vec<Vector> = proper.iter().map(|f| flat_vector(f.elements, n)).collect();
    let mut chains: Vec<Vec<usize>> = Vec::new();
    if !proper.is_empty() {
        let mut stack: Vec<Vec<usize>> =
            (0..proper.len()).filter(|&i| proper[i].rank == 1).map(|i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let top = proper[*chain.last().expect("nonempty chain")];
            if top.rank + 1 == m.rank {
                chains.push(chain);
                continue;
            }
            for (j, f) in proper.iter().enumerate() {
                if f.rank == top.rank + 1 && top.elements & !f.elements == 0 {
                    let mut next = chain.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
        }
    }
    chains.sort();
    let fan = Fan::new(n - 1, rays, chains)?;
    WeightedFan::unit(fan)
}

fn flat_vector(elements: u32, n: usize) -> Vector {
    let last = elements >> (n - 1) & 1 == 1;
    (0..n - 1)
        .map(|i| {
            let inside = elements >> i & 1 == 1;
            BigInt::from(match (last, inside) {
                (false, true) => 1,
                (false, false) => 0,
                (true, true) => 0,
                (true, false) => -1,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::vector;
    use crate::polyfan::{find_isomorphism, is_complete, DEFAULT_ISO_BUDGET};
    use crate::tropcycle::check_balancing;

    #[test]
    fn uniform_matroids() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert_eq!(u23.bases(), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        let u24 = Matroid::uniform(2, 4).unwrap();
        assert_eq!(u24.delete(3), u23);
        assert_eq!(u24.contract(3), Matroid::uniform(1, 3).unwrap());
    }

    #[test]
    fn exchange_axiom_is_checked() {
        assert_eq!(Matroid::from_bases(4, &[vec![0, 1], vec![2, 3]]), Err(Error::ExchangeAxiomViolation));
        let m = Matroid::from_bases(3, &[vec![0, 1], vec![0, 2]]).unwrap();
        assert!(m.is_coloop(0));
        assert_eq!(m.delete(0).bases(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn flats_of_small_matroids() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        let proper: Vec<Flat> = u23.flats().into_iter().filter(|f| f.rank < 2).collect();
        assert_eq!(proper.len(), 4);
        let u34 = Matroid::uniform(3, 4).unwrap();
        let mid = u34.flats().into_iter().filter(|f| f.rank == 1 || f.rank == 2).count();
        assert_eq!(mid, 10);
        let with_loop = Matroid::from_bases(3, &[vec![0], vec![1]]).unwrap();
        assert_eq!(with_loop.closure(0), 0b100);
        assert_eq!(with_loop.loops(), vec![2]);
        assert_eq!(u23.covers(&u23.flats()).len(), 6);
    }

    #[test]
    fn bergman_u23_is_the_tropical_line() {
        let b = bergman_fan(&Matroid::uniform(2, 3).unwrap()).unwrap();
        assert_eq!(b.fan().rays(), &[vector(&[1, 0]), vector(&[0, 1]), vector(&[-1, -1])]);
        assert!(check_balancing(&b).balanced);
    }

    #[test]
    fn bergman_u24_and_u34() {
        let line = bergman_fan(&Matroid::uniform(2, 4).unwrap()).unwrap();
        assert_eq!(line.fan().ambient_rank(), 3);
        assert_eq!(line.fan().rays().len(), 4);
        assert_eq!(line.dim(), 1);
        assert!(check_balancing(&line).balanced);
        let plane = bergman_fan(&Matroid::uniform(3, 4).unwrap()).unwrap();
        assert_eq!(plane.fan().rays().len(), 10);
        assert_eq!(plane.fan().maximal_cones().len(), 12);
        assert!(check_balancing(&plane).balanced && plane.is_reduced());
        // the coarse tropical plane has four rays; the fine structure refines it
        let coarse = Fan::new(
            3,
            vec![vector(&[1, 0, 0]), vector(&[0, 1, 0]), vector(&[0, 0, 1]), vector(&[-1, -1, -1])],
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]],
        )
        .unwrap();
        assert!(crate::polyfan::same_support(plane.fan(), &coarse).unwrap());
    }

    #[test]
    fn free_matroid_gives_a_complete_fan() {
        let b = bergman_fan(&Matroid::uniform(3, 3).unwrap()).unwrap();
        assert!(is_complete(b.fan()));
        let point = bergman_fan(&Matroid::uniform(1, 3).unwrap()).unwrap();
        assert_eq!(point.dim(), 0);
        assert!(find_isomorphism(point.fan(), &Fan::zero(0), DEFAULT_ISO_BUDGET).found().is_some());
    }

    #[test]
    fn loops_are_rejected() {
        let m = Matroid::from_bases(3, &[vec![0], vec![1]]).unwrap();
        assert_eq!(bergman_fan(&m), Err(Error::LoopPresent(2)));
    }
}
