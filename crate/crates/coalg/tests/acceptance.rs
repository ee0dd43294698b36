//! Acceptance gate: every verification suite must pass exactly, with
//! one pass/fail line printed per criterion. All arithmetic is exact;
//! every comparison is equality, zero tolerance.

use coalg::suites::{run_suite, SUITE_NAMES};

fn check(name: &str) {
    let outcome = run_suite(name, 42).expect("suite runs");
    println!(
        "[{}] {} — {}",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.name,
        outcome.detail
    );
    assert!(outcome.pass, "{name}: {}", outcome.detail);
}

#[test]
fn criterion_01_infiltration_coproduct() {
    check("infiltration-coproduct");
}

#[test]
fn criterion_02_id_unipotence_formula() {
    check("id-unipotence-formula");
}

#[test]
fn criterion_03_degree_bounds() {
    check("degree-bounds");
}

#[test]
fn criterion_04_sym_independence() {
    check("sym-independence");
}

#[test]
fn criterion_05_field_rank() {
    check("field-rank");
}

#[test]
fn criterion_06_mobius() {
    check("mobius");
}

#[test]
fn criterion_07_characters() {
    check("characters");
}

#[test]
fn criterion_08_dual_products() {
    check("dual-products");
}

#[test]
fn criterion_09_filtration_products() {
    check("filtration-products");
}

#[test]
fn criterion_10_character_independence() {
    check("character-independence");
}

#[test]
fn criterion_11_appendix() {
    check("appendix");
}

#[test]
fn criterion_12_finite_dual() {
    check("finite-dual");
}

#[test]
fn criterion_13_gx_negative() {
    check("gx-negative");
}

#[test]
fn all_suites_are_covered() {
    // every named suite appears above; a rename must update both lists
    assert_eq!(SUITE_NAMES.len(), 13);
}
