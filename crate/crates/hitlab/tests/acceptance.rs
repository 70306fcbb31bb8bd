//! Acceptance criteria 1 to 11, one test per criterion. Each prints a single
//! pass/fail line with its residual and runtime.

use hitlab::report::run_criterion;
use std::io::Write;

fn check(id: usize) {
    let r = run_criterion(id);
    // written to the handle directly so the line shows even when output is captured
    writeln!(std::io::stdout().lock(), "{}", r.line()).unwrap();
    assert!(r.pass, "{}", r.line());
    assert!(r.runtime_s < r.budget_s, "over time budget: {}", r.line());
}

#[test]
fn criterion_01_length_constant() {
    check(1);
}

#[test]
fn criterion_02_length_linearity() {
    check(2);
}

#[test]
fn criterion_03_length_variance() {
    check(3);
}

#[test]
fn criterion_04_area_tables() {
    check(4);
}

#[test]
fn criterion_05_angle_and_curvature() {
    check(5);
}

#[test]
fn criterion_06_projector_suite() {
    check(6);
}

#[test]
fn criterion_07_hit_verification() {
    check(7);
}

#[test]
fn criterion_08_entropy_engine() {
    check(8);
}

#[test]
fn criterion_09_nogo_certificates() {
    check(9);
}

#[test]
fn criterion_10_gauge_invariance() {
    check(10);
}

#[test]
fn criterion_11_correlation_budget() {
    check(11);
}
