//! One test per criterion; each prints its result line and must pass inside its
//! pinned limit. Run with `--nocapture` to see the lines of passing criteria.

use tropfan::criteria::{run, CRITERIA};

fn criterion(id: usize) {
    let r = run(id).expect("known criterion");
    println!("{}", r.line());
    for f in &r.failures {
        println!("    {f}");
    }
    assert!(r.passed, "criterion {id} failed: {:?}", r.failures);
    assert!(r.within_limit(), "criterion {id} took {} ms, limit {} ms", r.elapsed_ms, r.limit_ms);
}

#[test]
fn every_criterion_has_a_test() {
    assert_eq!(CRITERIA.len(), 11);
}

#[test]
fn criterion_01_example_zoo() {
    criterion(1);
}

#[test]
fn criterion_02_standard_modifications() {
    criterion(2);
}

#[test]
fn criterion_03_recognizer_round_trips() {
    criterion(3);
}

#[test]
fn criterion_04_product_law() {
    criterion(4);
}

#[test]
fn criterion_05_star_law() {
    criterion(5);
}

#[test]
fn criterion_06_poincare_suite() {
    criterion(6);
}

#[test]
fn criterion_07_cap_product_identity() {
    criterion(7);
}

#[test]
fn criterion_08_modification_transfer() {
    criterion(8);
}

#[test]
fn criterion_09_bergman_fans() {
    criterion(9);
}

#[test]
fn criterion_10_intrinsic_to_the_support() {
    criterion(10);
}

#[test]
fn criterion_11_kunneth() {
    criterion(11);
}
