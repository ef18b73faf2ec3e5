//! Bundled example fans: the quasilinear fans in ranks up to three, the standard
//! non-examples, and a few matroids.

use num_bigint::BigInt;

use crate::exactlin::vector;
use crate::matroid::{bergman_fan, Matroid};
use crate::modification::modify;
use crate::plfun::PLFunction;
use crate::polyfan::Fan;
use crate::tropcycle::WeightedFan;

#[derive(Clone, Debug)]
pub struct CorpusFan {
    pub name: &'static str,
    pub description: &'static str,
    pub fan: WeightedFan,
    pub pl_functions: Vec<(String, PLFunction)>,
    pub quasilinear: bool,
}

fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
    Fan::new(rank, rays.iter().map(|r| vector(r)).collect(), cones.iter().map(|c| c.to_vec()).collect())
        .expect("corpus fans are valid")
}

fn unit(f: Fan) -> WeightedFan {
    WeightedFan::unit(f).expect("unit weights")
}

fn pl(f: &WeightedFan, name: &str, values: &[i64]) -> (String, PLFunction) {
    let values: Vec<BigInt> = values.iter().map(|&v| BigInt::from(v)).collect();
    (name.to_string(), PLFunction::from_heights(f.fan(), &values).expect("corpus functions are integral"))
}

fn entry(name: &'static str, description: &'static str, fan: WeightedFan, quasilinear: bool) -> CorpusFan {
    CorpusFan { name, description, fan, pl_functions: vec![], quasilinear }
}

pub fn r1() -> WeightedFan {
    unit(fan(1, &[&[1], &[-1]], &[&[0], &[1]]))
}

/// The complete fan of the projective plane.
pub fn r2() -> WeightedFan {
    unit(fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[0, 2], &[1, 2]]))
}

/// The complete fan of quadrants, on which `min{x,0}` is linear on cones.
pub fn r2_quadrants() -> WeightedFan {
    unit(fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]))
}

pub fn r3() -> WeightedFan {
    unit(fan(
        3,
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
        &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
    ))
}

pub fn tropical_line() -> WeightedFan {
    unit(fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0], &[1], &[2]]))
}

pub fn cross() -> WeightedFan {
    unit(fan(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0], &[1], &[2], &[3]]))
}

pub fn weights_121() -> WeightedFan {
    let f = fan(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0], &[1], &[2]]);
    WeightedFan::from_list(f, vec![1.into(), 2.into(), 1.into()], false).expect("positive weights")
}

pub fn tropical_plane() -> WeightedFan {
    unit(fan(
        3,
        &[&[1, 0, 0], &[0, 1, 0], &[-1, -1, -1], &[0, 0, 1]],
        &[&[0, 1], &[0, 2], &[1, 2], &[0, 3], &[1, 3], &[2, 3]],
    ))
}

/// The modification of the quadrant fan along `min{x,0}`.
pub fn minx0_modification() -> WeightedFan {
    let base = r2_quadrants();
    let phi = PLFunction::from_heights(base.fan(), &[0.into(), 0.into(), (-1).into(), 0.into()]).expect("integral");
    modify(&base, &phi).expect("effective divisor").fan
}

pub fn corpus() -> Vec<CorpusFan> {
    let mut out = Vec::new();

    out.push(entry("r0", "the trivial fan", unit(Fan::zero(0)), true));

    let f = r1();
    let mut e = entry("r1", "the complete fan of R^1", f.clone(), true);
    e.pl_functions = vec![pl(&f, "minx0", &[0, -1]), pl(&f, "x", &[1, -1])];
    out.push(e);

    let f = r2();
    let mut e = entry("r2", "the complete fan of the projective plane", f.clone(), true);
    e.pl_functions = vec![pl(&f, "minxy0", &[0, 0, -1]), pl(&f, "x", &[1, 0, -1])];
    out.push(e);

    let f = r2_quadrants();
    let mut e = entry("r2_quadrants", "the complete fan of quadrants in R^2", f.clone(), true);
    e.pl_functions = vec![pl(&f, "minx0", &[0, 0, -1, 0]), pl(&f, "minx0_plus_miny0", &[0, 0, -1, -1])];
    out.push(e);

    out.push(entry("r3", "the complete fan of projective 3-space", r3(), true));

    let f = tropical_line();
    let mut e = entry("tropical_line", "the standard tropical line in R^2", f.clone(), true);
    e.pl_functions = vec![pl(&f, "minxy0", &[0, 0, -1]), pl(&f, "x", &[1, 0, -1])];
    out.push(e);

    out.push(entry("classical_line", "the classical line in R^2", unit(fan(2, &[&[1, 1], &[-1, -1]], &[&[0], &[1]])), true));
    out.push(entry("cross", "the union of the two coordinate axes in R^2", cross(), false));

    let f = weights_121();
    let mut e = entry("weights_121", "rays (1,0), (0,1), (-1,-2) with weights 1, 2, 1", f.clone(), false);
    e.pl_functions = vec![pl(&f, "min2x0", &[0, 0, -2])];
    out.push(e);

    let double = WeightedFan::from_list(
        fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0], &[1], &[2]]),
        vec![2.into(), 2.into(), 2.into()],
        false,
    )
    .expect("positive weights");
    out.push(entry("double_tropical_line", "the tropical line with all weights 2", double, false));

    out.push(entry(
        "classical_line_r3",
        "a classical line in R^3",
        unit(fan(3, &[&[1, 2, 3], &[-1, -2, -3]], &[&[0], &[1]])),
        true,
    ));
    out.push(entry(
        "mixed_line_r3",
        "the degenerate modification of the tropical line in R^2 with rays (1,1,0), (-1,-1,-1), (0,0,1)",
        unit(fan(3, &[&[1, 1, 0], &[-1, -1, -1], &[0, 0, 1]], &[&[0], &[1], &[2]])),
        true,
    ));
    let f = unit(fan(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]], &[&[0], &[1], &[2], &[3]]));
    out.push(entry("tropical_line_r3", "the standard tropical line in R^3", f, true));
    out.push(entry(
        "classical_plane_r3",
        "a classical plane in R^3",
        unit(fan(3, &[&[1, 0, 0], &[0, 1, 0], &[-1, -1, 0]], &[&[0, 1], &[0, 2], &[1, 2]])),
        true,
    ));
    out.push(entry(
        "minx0_modification",
        "the modification of R^2 along min{x,0}",
        minx0_modification(),
        true,
    ));
    let f = tropical_plane();
    let mut e = entry("tropical_plane", "the standard tropical plane in R^3", f.clone(), true);
    e.pl_functions = vec![pl(&f, "neg_courant2", &[0, 0, -1, 0])];
    out.push(e);

    out.push(entry(
        "two_planes_r3",
        "the union of the planes x = 0 and y = 0 in R^3",
        unit(fan(
            3,
            &[&[0, 0, 1], &[0, 0, -1], &[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0]],
            &[&[0, 2], &[0, 3], &[1, 2], &[1, 3], &[0, 4], &[0, 5], &[1, 4], &[1, 5]],
        )),
        false,
    ));
    out.push(entry(
        "cube_r3",
        "the complete fan over the faces of a cube (not simplicial)",
        unit(fan(
            3,
            &[
                &[1, 1, 1],
                &[1, 1, -1],
                &[1, -1, 1],
                &[1, -1, -1],
                &[-1, 1, 1],
                &[-1, 1, -1],
                &[-1, -1, 1],
                &[-1, -1, -1],
            ],
            &[&[0, 1, 2, 3], &[4, 5, 6, 7], &[0, 1, 4, 5], &[2, 3, 6, 7], &[0, 2, 4, 6], &[1, 3, 5, 7]],
        )),
        true,
    ));
    out
}

pub fn by_name(name: &str) -> Option<CorpusFan> {
    corpus().into_iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    corpus().into_iter().map(|e| e.name).collect()
}

/// Loopless matroids on at most five elements.
pub fn corpus_matroids() -> Vec<(&'static str, Matroid)> {
    let uniform = |r, n| Matroid::uniform(r, n).expect("uniform matroid");
    let bases = |n, b: &[&[usize]]| {
        Matroid::from_bases(n, &b.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).expect("corpus matroid")
    };
    vec![
        ("U13", uniform(1, 3)),
        ("U22", uniform(2, 2)),
        ("U23", uniform(2, 3)),
        ("U33", uniform(3, 3)),
        ("U24", uniform(2, 4)),
        ("U34", uniform(3, 4)),
        ("U25", uniform(2, 5)),
        ("U35", uniform(3, 5)),
        // elements 0 and 1 parallel, 2 a coloop
        ("parallel_pair", bases(3, &[&[0, 2], &[1, 2]])),
        // graphic matroid of K4 minus an edge: triangles {0,1,2} and {2,3,4}
        (
            "k4_minus_edge",
            bases(
                5,
                &[
                    &[0, 1, 3],
                    &[0, 1, 4],
                    &[0, 2, 3],
                    &[0, 2, 4],
                    &[0, 3, 4],
                    &[1, 2, 3],
                    &[1, 2, 4],
                    &[1, 3, 4],
                ],
            ),
        ),
        // U23 ⊕ U12
        ("u23_plus_u12", bases(5, &[&[0, 1, 3], &[0, 1, 4], &[0, 2, 3], &[0, 2, 4], &[1, 2, 3], &[1, 2, 4]])),
    ]
}

pub fn bergman_corpus() -> Vec<(&'static str, Matroid, WeightedFan)> {
    corpus_matroids()
        .into_iter()
        .map(|(name, m)| {
            let b = bergman_fan(&m).expect("corpus matroids are loopless");
            (name, m, b)
        })
        .collect()
}
