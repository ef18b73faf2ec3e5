//! Executable acceptance checks over the bundled corpus. Each check returns a
//! verdict, itemized failures and timing against its pinned limit.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chow::{
    cap_matrix, chow_presentation, chow_ranks, courant_functions, degree_one_caps, kunneth_check,
    modification_pullback, poincare_verdict,
};
use crate::corpus::{self, bergman_corpus, by_name, corpus, CorpusFan};
use crate::exactlin::{vector, IntMatrix, Vector};
use crate::matroid::{bergman_fan, Matroid};
use crate::modification::{modify, recognize_along, ModificationWitness};
use crate::plfun::{divisor, divisor_with, PLFunction};
use crate::polyfan::{map_fan, random_interior_point, stellar_subdivision, unimodular_refinement, IsoSearch, DEFAULT_ISO_BUDGET};
use crate::quasilinear::{recognize, verify_certificate, Certificate, Verdict};
use crate::tropcycle::{
    check_balancing, find_weighted_isomorphism, irreducibility, product_weighted, refine_weights, same_cycle,
    star_weighted, RandomSelector, WeightedFan,
};

pub const SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

impl CriterionResult {
    pub fn within_limit(&self) -> bool {
        self.elapsed_ms < self.limit_ms
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} — {} ({} checks, {} ms, limit {} ms)",
            self.id,
            if self.passed && self.within_limit() { "PASS" } else { "FAIL" },
            self.title,
            self.checks,
            self.elapsed_ms,
            self.limit_ms
        )
    }
}

pub const CRITERIA: [(usize, &str, u64); 11] = [
    (1, "example zoo", 1),
    (2, "standard modifications", 1),
    (3, "recognizer round trips", 10),
    (4, "product law", 60),
    (5, "star law", 30),
    (6, "Poincaré suite", 30),
    (7, "cap product identity", 5),
    (8, "modification transfer", 30),
    (9, "Bergman fans", 60),
    (10, "intrinsic to the support", 60),
    (11, "Künneth", 30),
];

/// Collects individual checks.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub fn run(id: usize) -> Option<CriterionResult> {
    let &(_, title, limit) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let mut t = Tally::default();
    match id {
        1 => example_zoo(&mut t),
        2 => standard_modifications(&mut t),
        3 => round_trips(&mut t),
        4 => product_law(&mut t),
        5 => star_law(&mut t),
        6 => poincare_suite(&mut t),
        7 => cap_identity(&mut t),
        8 => modification_transfer(&mut t),
        9 => bergman(&mut t),
        10 => intrinsic(&mut t),
        11 => kunneth(&mut t),
        _ => unreachable!(),
    }
    let elapsed = start.elapsed();
    Some(CriterionResult {
        id,
        title,
        passed: t.failures.is_empty(),
        checks: t.checks,
        failures: t.failures,
        elapsed_ms: elapsed.as_millis(),
        limit_ms: Duration::from_secs(limit).as_millis(),
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

fn fan_of(name: &str) -> WeightedFan {
    by_name(name).unwrap_or_else(|| panic!("corpus fan {name}")).fan
}

fn pl_of(name: &str, function: &str) -> PLFunction {
    by_name(name)
        .and_then(|e| e.pl_functions.into_iter().find(|(n, _)| n == function).map(|(_, p)| p))
        .unwrap_or_else(|| panic!("corpus function {name}/{function}"))
}

fn ints(values: &[i64]) -> Vec<BigInt> {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

/// Maximal cones as sets of ray vectors, for comparisons independent of ray order.
fn cone_vector_sets(wf: &WeightedFan) -> BTreeSet<Vec<Vector>> {
    let f = wf.fan();
    f.maximal_cones()
        .into_iter()
        .map(|c| {
            let mut v: Vec<Vector> = f.generators(c);
            v.sort();
            v
        })
        .collect()
}

fn example_zoo(t: &mut Tally) {
    let line = fan_of("tropical_line");
    t.check(check_balancing(&line).balanced && line.weight_list() == ints(&[1, 1, 1]), || {
        "tropical line is not balanced with weights 1,1,1".into()
    });

    let cross = fan_of("cross");
    let rank = irreducibility(&cross).map(|i| i.rank).unwrap_or(0);
    t.check(rank == 2, || format!("cross fan has M1 rank {rank}, expected 2"));
    t.check(matches!(recognize(&cross), Verdict::NotQuasilinear { .. }), || "cross fan was not rejected".into());

    let w = fan_of("weights_121");
    t.check(check_balancing(&w).balanced, || "weights 1,2,1 fan is not balanced".into());
    let irr = irreducibility(&w).map(|i| i.irreducible).unwrap_or(false);
    t.check(irr, || "weights 1,2,1 fan is not irreducible".into());
    t.check(!w.is_reduced(), || "weights 1,2,1 fan is reduced".into());
    t.check(
        matches!(recognize(&w), Verdict::NotQuasilinear { ref reason, .. } if reason == "not reduced"),
        || "weights 1,2,1 fan was not rejected as not reduced".into(),
    );
    let d = divisor(&w, &pl_of("weights_121", "min2x0"));
    let origin_weight = d.weil.as_ref().and_then(|weil| {
        (weil.fan().dim() == 0 && weil.fan().n_cones() == 1).then(|| weil.weight(0).clone())
    });
    t.check(origin_weight == Some(BigInt::from(2)), || format!("div(min{{2x,0}}) is {:?}, expected the origin with weight 2", d.ord));
}

fn standard_modifications(t: &mut Tally) {
    let plane = modify(&corpus::r2(), &pl_of("r2", "minxy0")).map(|m| m.fan);
    match plane {
        Ok(p) => {
            let rays = p.fan().rays().to_vec();
            t.check(rays == vec![vector(&[1, 0, 0]), vector(&[0, 1, 0]), vector(&[-1, -1, -1]), vector(&[0, 0, 1])], || {
                format!("min{{x,y,0}} modification has rays {rays:?}")
            });
            let expected: BTreeSet<Vec<usize>> =
                [[0, 1], [0, 2], [1, 2], [0, 3], [1, 3], [2, 3]].iter().map(|c| c.to_vec()).collect();
            let got: BTreeSet<Vec<usize>> = p.fan().maximal_ray_sets().into_iter().collect();
            t.check(got == expected, || format!("min{{x,y,0}} modification has cones {got:?}"));
            t.check(p.is_reduced(), || "min{x,y,0} modification has weights other than 1".into());
        }
        Err(e) => t.check(false, || format!("min{{x,y,0}} modification failed: {e}")),
    }

    let m = modify(&corpus::r2_quadrants(), &pl_of("r2_quadrants", "minx0")).map(|m| m.fan);
    match m {
        Ok(m) => {
            let rays: BTreeSet<Vector> = m.fan().rays().iter().cloned().collect();
            let expected: BTreeSet<Vector> =
                [[1, 0, 0], [0, 1, 0], [-1, 0, -1], [0, -1, 0], [0, 0, 1]].iter().map(|v| vector(v)).collect();
            t.check(rays == expected, || format!("min{{x,0}} modification has rays {rays:?}"));
            let cones: BTreeSet<Vec<Vector>> = [
                [[1, 0, 0], [0, 1, 0]],
                [[0, 1, 0], [-1, 0, -1]],
                [[-1, 0, -1], [0, -1, 0]],
                [[1, 0, 0], [0, -1, 0]],
                [[0, 1, 0], [0, 0, 1]],
                [[0, -1, 0], [0, 0, 1]],
            ]
            .iter()
            .map(|c| {
                let mut v: Vec<Vector> = c.iter().map(|x| vector(x)).collect();
                v.sort();
                v
            })
            .collect();
            t.check(cone_vector_sets(&m) == cones, || "min{x,0} modification has unexpected cones".into());
            t.check(m.is_reduced(), || "min{x,0} modification has weights other than 1".into());
            let product = product_weighted(&corpus::tropical_line(), &corpus::r1());
            t.check(matches!(find_weighted_isomorphism(&m, &product, DEFAULT_ISO_BUDGET), IsoSearch::Found(_)), || {
                "min{x,0} modification is not isomorphic to tropical line × R^1".into()
            });
        }
        Err(e) => t.check(false, || format!("min{{x,0}} modification failed: {e}")),
    }
}

fn certified(wf: &WeightedFan) -> Option<Certificate> {
    recognize(wf).certificate().cloned()
}

fn round_trip(t: &mut Tally, name: &str, wf: &WeightedFan) {
    match recognize(wf) {
        Verdict::Quasilinear { certificate } => {
            let ok = verify_certificate(wf, &certificate).map(|r| r.accepted).unwrap_or(false);
            t.check(ok, || format!("{name}: certificate rejected by the verifier"));
        }
        other => t.check(false, || format!("{name}: not certified ({other:?})")),
    }
}

/// A random unimodular matrix: a product of elementary row operations and swaps.
pub fn random_unimodular<R: Rng>(n: usize, rng: &mut R) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let k = BigInt::from(rng.gen_range(-2..=2i64));
        m.add_row_multiple(i, j, &k);
        if rng.gen_bool(0.3) {
            m.swap_rows(i, j);
        }
    }
    m
}

fn round_trips(t: &mut Tally) {
    for e in corpus() {
        if e.fan.ambient_rank() > 3 {
            continue;
        }
        if e.quasilinear {
            round_trip(t, e.name, &e.fan);
        } else {
            t.check(!recognize(&e.fan).is_quasilinear(), || format!("{}: non-example was certified", e.name));
        }
    }

    let bases = ["r1", "r2", "r2_quadrants", "tropical_line", "classical_line", "mixed_line_r3", "tropical_plane"];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut found = 0;
    let mut attempts = 0;
    while found < 20 && attempts < 2000 {
        attempts += 1;
        let base = fan_of(bases[rng.gen_range(0..bases.len())]);
        let f = base.fan();
        let values: Vec<BigInt> = (0..f.rays().len()).map(|_| BigInt::from(rng.gen_range(-2..=1i64))).collect();
        let Ok(phi) = PLFunction::from_heights(f, &values) else { continue };
        let Ok(m) = modify(&base, &phi) else { continue };
        // only pairs whose divisor is itself certified give quasilinear modifications
        let divisor_ok = match &m.divisor.weil {
            None => true,
            Some(d) => WeightedFan::new(d.fan().clone(), d.weights().clone()).map(|d| certified(&d).is_some()).unwrap_or(false),
        };
        if !divisor_ok {
            continue;
        }
        found += 1;
        let u = random_unimodular(m.fan.ambient_rank(), &mut rng);
        let moved = match map_fan(m.fan.fan(), &u).and_then(|g| m.fan.with_fan(g)) {
            Ok(x) => x,
            Err(e) => {
                t.check(false, || format!("random pair {found}: change of coordinates failed: {e}"));
                continue;
            }
        };
        round_trip(t, &format!("random pair {found} (heights {values:?})"), &moved);
    }
    t.check(found == 20, || format!("only {found} random pairs in {attempts} attempts"));
}

/// Corpus fans used for products: everything of ambient rank at most three.
fn product_factors() -> Vec<CorpusFan> {
    corpus().into_iter().filter(|e| e.fan.ambient_rank() <= 3).collect()
}

fn product_law(t: &mut Tally) {
    let factors = product_factors();
    let verdicts: Vec<bool> = factors.iter().map(|e| recognize(&e.fan).is_quasilinear()).collect();
    for (i, a) in factors.iter().enumerate() {
        for (j, b) in factors.iter().enumerate() {
            if a.fan.ambient_rank() + b.fan.ambient_rank() > 5 {
                continue;
            }
            let p = product_weighted(&a.fan, &b.fan);
            let accepted = recognize(&p).is_quasilinear();
            let expected = verdicts[i] && verdicts[j];
            t.check(accepted == expected, || format!("{} × {}: product verdict {accepted}, factors {expected}", a.name, b.name));
        }
    }
}

/// Every certified fan of the corpus and of the Bergman corpus.
fn certified_corpus() -> Vec<(String, WeightedFan)> {
    let mut out: Vec<(String, WeightedFan)> =
        corpus().into_iter().filter(|e| e.quasilinear).map(|e| (e.name.to_string(), e.fan)).collect();
    out.extend(bergman_corpus().into_iter().map(|(n, _, b)| (format!("bergman {n}"), b)));
    out.retain(|(_, wf)| certified(wf).is_some());
    out
}

fn star_law(t: &mut Tally) {
    for (name, wf) in certified_corpus() {
        for sigma in 0..wf.fan().n_cones() {
            let rays = wf.fan().cone(sigma).rays().to_vec();
            match star_weighted(&wf, sigma) {
                Ok((star, _)) => {
                    t.check(certified(&star).is_some(), || format!("{name}: star at {rays:?} is not certified"))
                }
                Err(e) => t.check(false, || format!("{name}: star at {rays:?} failed: {e}")),
            }
        }
    }
}

fn unimodular_version(wf: &WeightedFan) -> Option<WeightedFan> {
    refine_weights(wf, &unimodular_refinement(wf.fan())).ok()
}

fn poincare_suite(t: &mut Tally) {
    for (name, wf) in certified_corpus() {
        let Some(refined) = unimodular_version(&wf) else {
            t.check(false, || format!("{name}: refinement failed"));
            continue;
        };
        match poincare_verdict(&refined, true) {
            Ok(r) => t.check(r.passed(), || format!("{name}: not star-Poincaré ({:?})", r.first_failure())),
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
    match poincare_verdict(&fan_of("cross"), true) {
        Ok(r) => {
            let d0 = r.degrees.first().map(|d| (d.chow_rank, d.minkowski_rank));
            t.check(!r.passed() && r.first_failure() == Some(0) && d0 == Some((1, 2)), || {
                format!("cross fan: expected failure at k=0 with ranks (1,2), got {:?} {d0:?}", r.first_failure())
            });
        }
        Err(e) => t.check(false, || format!("cross: {e}")),
    }
    for name in ["weights_121", "double_tropical_line"] {
        let ok = poincare_verdict(&fan_of(name), true).map(|r| !r.passed()).unwrap_or(false);
        t.check(ok, || format!("{name}: unexpectedly star-Poincaré"));
    }
}

fn cap_identity(t: &mut Tally) {
    let p1 = corpus::r1();
    let anchor = cap_matrix(&p1, 1).map(|c| c.matrix == IntMatrix::from_i64(1, 2, &[1, 1])).unwrap_or(false);
    t.check(anchor, || "sign anchor: x_+ ∩ ω on the complete rank-one fan is not +1".into());

    let mut fans: Vec<(String, WeightedFan)> = corpus().into_iter().map(|e| (e.name.to_string(), e.fan)).collect();
    fans.extend(bergman_corpus().into_iter().map(|(n, _, b)| (format!("bergman {n}"), b)));
    let selector = RandomSelector::new(SEED);
    for (name, wf) in fans {
        let f = wf.fan();
        // no degree-one classes on a point
        if !f.is_simplicial() || f.dim() == 0 {
            continue;
        }
        let (Ok(caps), Ok(courant), Ok(matrix)) = (degree_one_caps(&wf), courant_functions(f), cap_matrix(&wf, 1)) else {
            t.check(false, || format!("{name}: cap computation failed"));
            continue;
        };
        for (r, w) in &caps {
            // independent evaluation with randomly chosen lifts of the normal vectors
            let div = divisor_with(f, &courant.functions[*r], &wf.as_minkowski(), &selector);
            let minus: std::collections::BTreeMap<usize, BigInt> = div.values().iter().map(|(&c, v)| (c, -v)).collect();
            t.check(w.values() == &minus, || format!("{name}: x_{r} ∩ ω differs from −div of the Courant function"));
            let column = matrix.target.coordinates(w);
            let j = matrix.monomials.iter().position(|m| m == &vec![*r]);
            t.check(column.is_some() && j.map(|j| matrix.matrix.column(j)) == column, || {
                format!("{name}: cap matrix column of x_{r} disagrees")
            });
        }
        // linear relations cap to zero
        if let Ok(cp) = chow_presentation(f) {
            let rel = cp.relation_matrix(1);
            t.check(matrix.matrix.mul(&rel.transpose()).is_zero(), || format!("{name}: a linear relation caps to a nonzero weight"));
        }
    }
}

fn transfer_witnesses() -> Vec<(String, ModificationWitness)> {
    let mut out = Vec::new();
    let pairs = [
        ("r1", "minx0"),
        ("r2", "minxy0"),
        ("r2", "x"),
        ("r2_quadrants", "minx0"),
        ("tropical_line", "minxy0"),
        ("tropical_line", "x"),
        ("tropical_plane", "neg_courant2"),
    ];
    for (base, function) in pairs {
        let wf = fan_of(base);
        let phi = pl_of(base, function);
        let Ok(m) = modify(&wf, &phi) else { continue };
        let witness = match m.vertical_ray {
            Some(up) => recognize_along(&m.fan, up),
            None => Some(ModificationWitness {
                direction: 0,
                change: IntMatrix::identity(m.fan.ambient_rank()),
                base: wf.clone(),
                phi: phi.clone(),
                replay: m.clone(),
                exact: true,
            }),
        };
        if let Some(w) = witness {
            out.push((format!("{base} along {function}"), w));
        }
    }
    for (name, wf) in certified_corpus() {
        if let Some(Certificate::Modification { direction, .. }) = certified(&wf) {
            if let Some(w) = recognize_along(&wf, direction) {
                out.push((format!("{name} (recognized)"), w));
            }
        }
    }
    out
}

fn modification_transfer(t: &mut Tally) {
    let witnesses = transfer_witnesses();
    t.check(witnesses.len() >= 8, || format!("only {} witnesses", witnesses.len()));
    for (name, w) in witnesses {
        if !w.base.fan().is_unimodular() || !w.replay.fan.fan().is_unimodular() {
            continue;
        }
        match modification_pullback(&w) {
            Ok(r) => {
                t.check(r.degrees.iter().all(|d| d.surjective), || format!("{name}: pullback not surjective"));
                t.check(!r.base_poincare || r.degrees.iter().all(|d| d.bijective), || {
                    format!("{name}: base is Poincaré but the pullback is not bijective")
                });
                t.check(r.x0_relation, || format!("{name}: x0 relation fails"));
                t.check(r.pushforward_injective.iter().all(|&b| b), || format!("{name}: pushforward not injective"));
                t.check(r.projection_formula, || format!("{name}: projection formula fails"));
            }
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
}

/// `ℤ^E/ℤ(1,…,1) → ℤ^{E∖i}/ℤ(1,…,1)` in the coordinates of [`bergman_fan`].
pub fn deletion_projection(n: usize, i: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(n - 2, n - 1);
    for j in 0..n - 1 {
        // image of e_j, where the last element of E∖i is implicit
        let target = if j < i { Some(j) } else if j > i { Some(j - 1) } else { None };
        match target {
            Some(k) if k < n - 2 => m.set(k, j, BigInt::from(1)),
            Some(_) => {
                for k in 0..n - 2 {
                    m.set(k, j, BigInt::from(-1));
                }
            }
            None => {}
        }
    }
    m
}

/// Checks the modification of `bergman(M)` along the ray of `{i}` against
/// `bergman(M∖i)` and `bergman(M/i)`, mapped into the coordinates of the deletion.
pub fn deletion_contraction_check(m: &Matroid, i: usize) -> Result<bool, String> {
    let n = m.ground_size();
    let b = bergman_fan(m).map_err(|e| e.to_string())?;
    let mut e_i = vec![BigInt::from(0); n - 1];
    if i < n - 1 {
        e_i[i] = BigInt::from(1);
    } else {
        e_i.iter_mut().for_each(|x| *x = BigInt::from(-1));
    }
    let ray = b.fan().find_ray(&e_i).ok_or("{i} is not a flat")?;
    let w = recognize_along(&b, ray).ok_or("not a modification along e_i")?;
    // P = A · (first rows of T) with A = P · T⁻¹ restricted to the base coordinates
    let p = deletion_projection(n, i);
    let t_inv = inverse(&w.change);
    let a = p.mul(&t_inv).transpose().select_rows(0..n - 2).transpose();
    let to_deletion = |wf: &WeightedFan| -> Result<WeightedFan, String> {
        let g = map_fan(wf.fan(), &a).map_err(|e| e.to_string())?;
        wf.with_fan(g).map_err(|e| e.to_string())
    };
    let base = to_deletion(&w.base)?;
    let deletion = bergman_fan(&m.delete(i)).map_err(|e| e.to_string())?;
    let contraction = bergman_fan(&m.contract(i)).map_err(|e| e.to_string())?;
    let divisor = match &w.divisor().weil {
        Some(d) => to_deletion(&WeightedFan::new(d.fan().clone(), d.weights().clone()).map_err(|e| e.to_string())?)?,
        None => return Ok(false),
    };
    Ok(same_cycle(&base, &deletion) && same_cycle(&divisor, &contraction))
}

fn inverse(m: &IntMatrix) -> IntMatrix {
    let n = m.rows();
    let columns: Vec<Vector> = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::from(0); n];
            e[j] = BigInt::from(1);
            crate::exactlin::solve_integer(m, &e).expect("unimodular")
        })
        .collect();
    IntMatrix::from_columns(&columns, n)
}

fn bergman(t: &mut Tally) {
    for (name, m, b) in bergman_corpus() {
        t.check(check_balancing(&b).balanced && b.is_reduced(), || format!("{name}: Bergman fan not balanced with weights 1"));
        round_trip(t, &format!("bergman {name}"), &b);
        for i in 0..m.ground_size() {
            let singleton_flat = m.closure(1 << i) == 1 << i;
            if m.is_coloop(i) || !singleton_flat || m.ground_size() < 3 {
                continue;
            }
            let ok = deletion_contraction_check(&m, i);
            t.check(ok == Ok(true), || format!("{name}: element {i} is not a modification of deletion along contraction ({ok:?})"));
        }
    }
    // the first step of the certificate for U24 is the deletion along the contraction
    let u24 = Matroid::uniform(2, 4).expect("uniform");
    let b = bergman_fan(&u24).expect("loopless");
    match certified(&b) {
        Some(Certificate::Modification { base, divisor, .. }) => {
            let base = base.build().ok();
            let divisor = divisor.and_then(|d| d.build().ok());
            let u23 = bergman_fan(&Matroid::uniform(2, 3).expect("uniform")).expect("loopless");
            let u13 = bergman_fan(&Matroid::uniform(1, 3).expect("uniform")).expect("loopless");
            let iso = |a: &Option<WeightedFan>, b: &WeightedFan| {
                a.as_ref().is_some_and(|a| matches!(find_weighted_isomorphism(a, b, DEFAULT_ISO_BUDGET), IsoSearch::Found(_)))
            };
            t.check(iso(&base, &u23), || "U24: certified base is not bergman(U23)".into());
            t.check(iso(&divisor, &u13), || "U24: certified divisor is not bergman(U13)".into());
        }
        other => t.check(false, || format!("U24: unexpected certificate {other:?}")),
    }
    t.check(deletion_contraction_check(&u24, 3) == Ok(true), || "U24: deletion/contraction supports differ".into());
}

/// Stellar subdivision at random interior points of two random maximal cones.
pub fn random_refinement<R: Rng>(wf: &WeightedFan, rng: &mut R) -> Option<WeightedFan> {
    let mut f = wf.fan().clone();
    for _ in 0..2 {
        let maximal = f.maximal_cones();
        let c = maximal[rng.gen_range(0..maximal.len())];
        if f.cone(c).dim() < 2 {
            break;
        }
        let p = random_interior_point(&f, c, rng);
        f = stellar_subdivision(&f, &p).ok()?;
    }
    refine_weights(wf, &f).ok()
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Verdicts {
    balanced: bool,
    irreducible: bool,
    star_poincare: bool,
    quasilinear: bool,
}

fn verdicts(wf: &WeightedFan) -> Option<Verdicts> {
    let refined = unimodular_version(wf)?;
    Some(Verdicts {
        balanced: check_balancing(wf).balanced,
        irreducible: irreducibility(wf).ok()?.irreducible,
        star_poincare: poincare_verdict(&refined, true).ok()?.passed(),
        quasilinear: recognize(wf).is_quasilinear(),
    })
}

fn intrinsic(t: &mut Tally) {
    let mut fans: Vec<(String, WeightedFan)> = [
        "r2",
        "r2_quadrants",
        "r3",
        "classical_plane_r3",
        "minx0_modification",
        "tropical_plane",
        "two_planes_r3",
        "cube_r3",
    ]
    .iter()
    .map(|n| (n.to_string(), fan_of(n)))
    .collect();
    fans.push(("cross × R^1".into(), product_weighted(&corpus::cross(), &corpus::r1())));
    fans.push(("weights 1,2,1 × R^1".into(), product_weighted(&corpus::weights_121(), &corpus::r1())));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (name, wf) in fans {
        let Some(refined) = random_refinement(&wf, &mut rng) else {
            t.check(false, || format!("{name}: refinement failed"));
            continue;
        };
        t.check(refined.fan().rays().len() > wf.fan().rays().len(), || format!("{name}: refinement added no ray"));
        let (a, b) = (verdicts(&wf), verdicts(&refined));
        t.check(a.is_some() && a == b, || format!("{name}: verdicts {a:?} on the fan but {b:?} on the refinement"));
    }
}

fn kunneth(t: &mut Tally) {
    let pairs = [
        ("tropical_line", "tropical_line"),
        ("tropical_line", "r1"),
        ("r1", "r1"),
        ("r2", "tropical_line"),
        ("cross", "r1"),
        ("weights_121", "tropical_line"),
        ("classical_line", "tropical_line"),
        ("tropical_plane", "r1"),
        ("r0", "tropical_plane"),
        ("r2_quadrants", "mixed_line_r3"),
    ];
    for (a, b) in pairs {
        match kunneth_check(&fan_of(a), &fan_of(b)) {
            Ok(r) => t.check(r.holds(), || format!("{a} × {b}: {r:?}")),
            Err(e) => t.check(false, || format!("{a} × {b}: {e}")),
        }
    }
    let ranks = |wf: &WeightedFan| chow_presentation(wf.fan()).map(|cp| chow_ranks(&cp).into_iter().map(|r| r.rank).collect::<Vec<_>>()).ok();
    let lhs = ranks(&product_weighted(&corpus::tropical_line(), &corpus::r1()));
    let rhs = ranks(&fan_of("minx0_modification"));
    t.check(lhs.is_some() && lhs == rhs, || format!("tropical line × R^1 ranks {lhs:?} differ from the min{{x,0}} modification {rhs:?}"));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deletion_projection_kills_the_deleted_direction() {
        // U24 coordinates: e_0, e_1, e_2 with e_3 = −(1,1,1)
        let p = deletion_projection(4, 1);
        assert_eq!(p.apply(&vector(&[0, 1, 0])), vector(&[0, 0]));
        assert_eq!(p.apply(&vector(&[0, 0, 1])), vector(&[0, 1]));
        assert_eq!(p.apply(&vector(&[-1, -1, -1])), vector(&[-1, -1]));
        let p = deletion_projection(4, 3);
        assert_eq!(p.apply(&vector(&[-1, -1, -1])), vector(&[0, 0]));
        assert_eq!(p.apply(&vector(&[0, 0, 1])), vector(&[-1, -1]));
    }

    #[test]
    fn random_unimodular_matrices_are_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..5 {
            assert!(random_unimodular(n, &mut rng).is_unimodular());
        }
    }
}
