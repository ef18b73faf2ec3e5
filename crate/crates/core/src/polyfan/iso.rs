use num_traits::{One, Signed};

use super::fan::Fan;
use super::ops::restrict_to_minimal_lattice;
use crate::exactlin::{rank_of_rows, solve_rational, IntMatrix, LatticeChart, Vector};

/// A lattice isomorphism `N_f → N_g` between the minimal lattices of two fans,
/// carrying cones onto cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanIsomorphism {
    /// Matrix in the coordinates of the minimal lattice charts.
    pub matrix: IntMatrix,
    pub source_chart_rank: usize,
    /// `ray_map[i]` is the ray of `g` that ray `i` of `f` is sent to.
    pub ray_map: Vec<usize>,
    /// `cone_map[i]` is the cone of `g` that cone `i` of `f` is sent to.
    pub cone_map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoSearch {
    Found(FanIsomorphism),
    None,
    BudgetExceeded,
}

impl IsoSearch {
    pub fn found(&self) -> Option<&FanIsomorphism> {
        match self {
            IsoSearch::Found(iso) => Some(iso),
            _ => None,
        }
    }
}

pub const DEFAULT_ISO_BUDGET: u64 = 200_000;

pub fn find_isomorphism(f: &Fan, g: &Fan, budget: u64) -> IsoSearch {
    find_isomorphism_with(f, g, budget, |_| true)
}

/// Searches for an isomorphism accepted by `accept` (called with the cone map, for
/// example to compare weights). Candidates are generated by sending a greedily chosen
/// spanning set of rays of `f` to rays of `g` in lexicographic order; the first
/// accepted candidate is returned.
pub fn find_isomorphism_with(f: &Fan, g: &Fan, budget: u64, accept: impl Fn(&[usize]) -> bool) -> IsoSearch {
    let (fr, _) = restrict_to_minimal_lattice(f);
    let (gr, _) = restrict_to_minimal_lattice(g);
    let r = fr.ambient_rank();
    if r != gr.ambient_rank() || fr.rays().len() != gr.rays().len() || fr.f_vector() != gr.f_vector() {
        return IsoSearch::None;
    }
    let fsig: Vec<Vec<usize>> = (0..fr.rays().len()).map(|i| signature(&fr, i)).collect();
    let gsig: Vec<Vec<usize>> = (0..gr.rays().len()).map(|i| signature(&gr, i)).collect();
    let mut spanning = Vec::new();
    for i in 0..fr.rays().len() {
        let mut trial: Vec<Vector> = spanning.iter().map(|&j| fr.ray(j).clone()).collect();
        trial.push(fr.ray(i).clone());
        if rank_of_rows(trial) > spanning.len() {
            spanning.push(i);
        }
        if spanning.len() == r {
            break;
        }
    }
    let mut search = Search { f: &fr, g: &gr, fsig, gsig, spanning, budget, used: 0, accept: &accept };
    let mut chosen = Vec::new();
    match search.extend(&mut chosen) {
        Ok(Some(iso)) => IsoSearch::Found(iso),
        Ok(None) => IsoSearch::None,
        Err(()) => IsoSearch::BudgetExceeded,
    }
}

/// Number of cones of each dimension containing a ray.
fn signature(f: &Fan, ray: usize) -> Vec<usize> {
    let mut sig = vec![0; f.dim() + 1];
    for c in f.star_cones(f.ray_cone(ray)) {
        sig[f.cone(c).dim()] += 1;
    }
    sig
}

struct Search<'a, A: Fn(&[usize]) -> bool> {
    f: &'a Fan,
    g: &'a Fan,
    fsig: Vec<Vec<usize>>,
    gsig: Vec<Vec<usize>>,
    spanning: Vec<usize>,
    budget: u64,
    used: u64,
    accept: &'a A,
}

impl<A: Fn(&[usize]) -> bool> Search<'_, A> {
    fn extend(&mut self, chosen: &mut Vec<usize>) -> Result<Option<FanIsomorphism>, ()> {
        self.used += 1;
        if self.used > self.budget {
            return Err(());
        }
        let k = chosen.len();
        if k == self.spanning.len() {
            return Ok(self.complete(chosen));
        }
        let s = self.spanning[k];
        for t in 0..self.g.rays().len() {
            if chosen.contains(&t) || self.fsig[s] != self.gsig[t] {
                continue;
            }
            // pairs spanning a cone must go to pairs spanning a cone
            let compatible = (0..k).all(|a| {
                self.f.index_of(&[self.spanning[a], s]).is_some() == self.g.index_of(&[chosen[a], t]).is_some()
            });
            if !compatible {
                continue;
            }
            chosen.push(t);
            if let Some(iso) = self.extend(chosen)? {
                return Ok(Some(iso));
            }
            chosen.pop();
        }
        Ok(None)
    }

    fn complete(&self, chosen: &[usize]) -> Option<FanIsomorphism> {
        let r = self.f.ambient_rank();
        let matrix = if r == 0 {
            IntMatrix::zeros(0, 0)
        } else {
            let v = IntMatrix::from_rows(&self.spanning.iter().map(|&i| self.f.ray(i).clone()).collect::<Vec<_>>(), r);
            let w: Vec<Vector> = chosen.iter().map(|&j| self.g.ray(j).clone()).collect();
            // rows of A solve V · a_c = (c-th coordinates of the targets)
            let mut rows = Vec::with_capacity(r);
            for c in 0..r {
                let rhs: Vector = w.iter().map(|x| x[c].clone()).collect();
                let sol = solve_rational(&v, &rhs)?;
                if !sol.iter().all(|q| q.is_integer()) {
                    return None;
                }
                rows.push(sol.iter().map(|q| q.to_integer()).collect::<Vector>());
            }
            IntMatrix::from_rows(&rows, r)
        };
        if !matrix.determinant().abs().is_one() {
            return None;
        }
        let mut ray_map = Vec::with_capacity(self.f.rays().len());
        for v in self.f.rays() {
            let image = matrix.apply(v);
            ray_map.push(self.g.find_ray(&image)?);
        }
        let mut cone_map = Vec::with_capacity(self.f.n_cones());
        for c in self.f.cones() {
            let image: Vec<usize> = c.rays().iter().map(|&i| ray_map[i]).collect();
            cone_map.push(self.g.index_of(&image)?);
        }
        if !(self.accept)(&cone_map) {
            return None;
        }
        Some(FanIsomorphism { matrix, source_chart_rank: r, ray_map, cone_map })
    }
}

/// Re-checks an isomorphism against both fans: the matrix and its inverse send
/// cones onto the paired cones.
pub fn verify_isomorphism(f: &Fan, g: &Fan, iso: &FanIsomorphism) -> bool {
    let (fr, _) = restrict_to_minimal_lattice(f);
    let (gr, _) = restrict_to_minimal_lattice(g);
    if iso.matrix.rows() != gr.ambient_rank() || iso.matrix.cols() != fr.ambient_rank() {
        return false;
    }
    if !iso.matrix.determinant().abs().is_one() || iso.cone_map.len() != fr.n_cones() {
        return false;
    }
    let rays_ok = fr.rays().iter().enumerate().all(|(i, v)| {
        iso.ray_map.get(i).is_some_and(|&j| j < gr.rays().len() && &iso.matrix.apply(v) == gr.ray(j))
    });
    let mut hit = vec![false; gr.n_cones()];
    for (i, c) in fr.cones().iter().enumerate() {
        let image: Vec<usize> = c.rays().iter().map(|&r| iso.ray_map[r]).collect();
        match gr.index_of(&image) {
            Some(j) if j == iso.cone_map[i] && !hit[j] => hit[j] = true,
            _ => return false,
        }
    }
    rays_ok && hit.into_iter().all(|h| h)
}

/// Chart of the minimal lattice used by [`FanIsomorphism::matrix`].
pub fn minimal_chart(f: &Fan) -> LatticeChart {
    restrict_to_minimal_lattice(f).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::vector;

    fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(rank, rays.iter().map(|r| vector(r)).collect(), cones.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identity_on_tropical_line() {
        let f = fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0], &[1], &[2]]);
        let iso = find_isomorphism(&f, &f, DEFAULT_ISO_BUDGET);
        let iso = iso.found().unwrap();
        assert_eq!(iso.matrix, IntMatrix::identity(2));
        assert!(verify_isomorphism(&f, &f, iso));
    }

    #[test]
    fn line_in_the_plane_is_isomorphic_to_r1() {
        let line = fan(2, &[&[2, 3], &[-2, -3]], &[&[0], &[1]]);
        let r1 = fan(1, &[&[1], &[-1]], &[&[0], &[1]]);
        let iso = find_isomorphism(&line, &r1, DEFAULT_ISO_BUDGET);
        assert!(verify_isomorphism(&line, &r1, iso.found().unwrap()));
    }

    #[test]
    fn tropical_and_classical_lines_differ() {
        let trop = fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0], &[1], &[2]]);
        let classical = fan(2, &[&[1, 1], &[-1, -1]], &[&[0], &[1]]);
        assert_eq!(find_isomorphism(&trop, &classical, DEFAULT_ISO_BUDGET), IsoSearch::None);
    }

    #[test]
    fn lattice_matters() {
        // same combinatorics, but one cone has index 2
        let a = fan(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        let b = fan(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]);
        assert_eq!(find_isomorphism(&a, &b, DEFAULT_ISO_BUDGET), IsoSearch::None);
    }

    #[test]
    fn budget_is_reported() {
        let f = fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0], &[1], &[2]]);
        let g = fan(2, &[&[-1, -1], &[0, 1], &[1, 0]], &[&[0], &[1], &[2]]);
        assert!(find_isomorphism(&f, &g, DEFAULT_ISO_BUDGET).found().is_some());
        assert_eq!(find_isomorphism(&f, &g, 1), IsoSearch::BudgetExceeded);
    }
}
