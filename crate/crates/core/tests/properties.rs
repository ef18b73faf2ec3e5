use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tropfan::chow::{chow_presentation, chow_ranks, kunneth_check};
use tropfan::corpus::{self, corpus};
use tropfan::criteria::random_unimodular;
use tropfan::exactlin::{invariant_factors, snf, solve_integer, IntMatrix};
use tropfan::format::{read_tfan, write_tfan};
use tropfan::matroid::{bergman_fan, Matroid};
use tropfan::modification::{modify, recognize_along};
use tropfan::plfun::{divisor, PLFunction};
use tropfan::polyfan::map_fan;
use tropfan::quasilinear::{recognize, verify_certificate};
use tropfan::tropcycle::{check_balancing, same_cycle, WeightedFan};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-6i64..=6, rows * cols).prop_map(move |d| IntMatrix::from_i64(rows, cols, &d))
}

fn moved(wf: &WeightedFan, seed: u64) -> WeightedFan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unimodular(wf.ambient_rank(), &mut rng);
    wf.with_fan(map_fan(wf.fan(), &u).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_diagonal_and_divisible(m in matrix(3, 4)) {
        let (s, left, right) = snf(&m);
        prop_assert_eq!(left.mul(&m).mul(&right), s.clone());
        prop_assert!(left.is_unimodular() && right.is_unimodular());
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                prop_assert!(i == j || s.get(i, j).is_zero());
            }
        }
        let d = invariant_factors(&m);
        prop_assert!(d.iter().all(|x| x.is_positive()));
        for w in d.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert_eq!(d.len(), m.rank());
    }

    #[test]
    fn integer_solutions_solve(m in matrix(3, 3), x in prop::collection::vec(-5i64..=5, 3)) {
        let x: Vec<BigInt> = x.into_iter().map(BigInt::from).collect();
        let b = m.apply(&x);
        let y = solve_integer(&m, &b).expect("b is in the image");
        prop_assert_eq!(m.apply(&y), b);
    }

    #[test]
    fn product_of_determinant_and_invariant_factors(m in matrix(3, 3)) {
        let det = m.determinant().abs();
        let d = invariant_factors(&m);
        let product: BigInt = if d.len() == 3 { d.iter().product() } else { BigInt::zero() };
        prop_assert_eq!(product, det);
    }

    #[test]
    fn verdicts_survive_changes_of_coordinates(index in 0usize..18, seed in any::<u64>()) {
        let entries: Vec<_> = corpus().into_iter().filter(|e| e.fan.ambient_rank() <= 3).collect();
        let e = &entries[index % entries.len()];
        let wf = moved(&e.fan, seed);
        prop_assert_eq!(check_balancing(&wf).balanced, check_balancing(&e.fan).balanced);
        let verdict = recognize(&wf);
        prop_assert_eq!(verdict.is_quasilinear(), e.quasilinear, "{}", e.name);
        if let Some(c) = verdict.certificate() {
            prop_assert!(verify_certificate(&wf, c).unwrap().accepted);
        }
    }

    #[test]
    fn documents_round_trip(index in 0usize..18, seed in any::<u64>()) {
        let entries = corpus();
        let e = &entries[index % entries.len()];
        let wf = moved(&e.fan, seed);
        let text = write_tfan(&wf);
        let back = read_tfan(&text).unwrap();
        prop_assert_eq!(write_tfan(&back.fan), text);
        prop_assert!(same_cycle(&back.fan, &wf));
    }

    #[test]
    fn divisors_ignore_linear_parts(values in prop::collection::vec(-3i64..=3, 4), m in prop::collection::vec(-3i64..=3, 3)) {
        let plane = corpus::tropical_plane();
        let f = plane.fan();
        let values: Vec<BigInt> = values.into_iter().map(BigInt::from).collect();
        let phi = PLFunction::from_heights(f, &values).unwrap();
        let m: Vec<BigInt> = m.into_iter().map(BigInt::from).collect();
        let shifted = phi.add(&PLFunction::linear(f, &m));
        prop_assert_eq!(divisor(&plane, &phi).ord, divisor(&plane, &shifted).ord);
    }

    #[test]
    fn modifications_are_recognized_along_their_vertical_ray(values in prop::collection::vec(-3i64..=1, 3)) {
        let base = corpus::r2();
        let values: Vec<BigInt> = values.into_iter().map(BigInt::from).collect();
        let phi = PLFunction::from_heights(base.fan(), &values).unwrap();
        let m = match modify(&base, &phi) {
            Ok(m) => m,
            Err(e) => {
                prop_assert!(matches!(e, tropfan::Error::NegativeDivisorWeight { .. }), "{e}");
                return Ok(());
            }
        };
        prop_assert!(check_balancing(&m.fan).balanced);
        if let Some(up) = m.vertical_ray {
            let w = recognize_along(&m.fan, up).expect("a modification is recognized");
            prop_assert!(same_cycle(&w.replay.fan, &moved_by(&m.fan, &w.change)));
        }
    }

    #[test]
    fn uniform_bergman_fans_are_balanced_and_quasilinear(n in 1usize..=5, r in 1usize..=5) {
        prop_assume!(r <= n);
        let b = bergman_fan(&Matroid::uniform(r, n).unwrap()).unwrap();
        prop_assert!(check_balancing(&b).balanced);
        prop_assert_eq!(b.dim(), r - 1);
        prop_assert!(recognize(&b).is_quasilinear());
    }
}

fn moved_by(wf: &WeightedFan, t: &IntMatrix) -> WeightedFan {
    wf.with_fan(map_fan(wf.fan(), t).unwrap()).unwrap()
}

#[test]
fn chow_ranks_multiply_under_products() {
    let names = ["r1", "tropical_line", "r2", "classical_line", "weights_121"];
    for a in names {
        for b in names {
            let r = kunneth_check(&corpus::by_name(a).unwrap().fan, &corpus::by_name(b).unwrap().fan).unwrap();
            assert!(r.holds(), "{a} × {b}");
        }
    }
    let cp = chow_presentation(corpus::r3().fan()).unwrap();
    let ranks: Vec<usize> = chow_ranks(&cp).into_iter().map(|r| r.rank).collect();
    assert_eq!(ranks, vec![1, 1, 1, 1]);
}
