//! Regression against outputs recorded by an independent brute-force
//! subforest enumeration (`tests/oracle/brute_delta_minus.py`).

use regstruct::coproducts::delta_minus;
use regstruct::text::parse_tree;
use regstruct::RuleTable;

fn check(rule: &str, src: &str, fixture: &str) {
    let r = RuleTable::builtin(rule).unwrap();
    let t = parse_tree(src, &r).unwrap();
    let got = delta_minus(&r, &t).structured();
    let path = format!("{}/tests/fixtures/{fixture}", env!("CARGO_MANIFEST_DIR"));
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(got, want, "{src}");
}

#[test]
fn extraction_on_fourth_power_of_noise() {
    check("hermite", "Xi*Xi*Xi*Xi", "delta_minus_hermite_xi4.txt");
}

#[test]
fn extraction_on_generalised_kpz_counterexample() {
    check("gkpz", "I(I(I(Xi)*Xi)*Xi)", "delta_minus_gkpz_counterexample.txt");
}

/// `M_ℓ` with one free constant per negative plain tree; both the direct
/// formula and the recursive construction from `R_ℓ` must reproduce it.
#[test]
fn generic_renormalisation_on_generalised_kpz_counterexample() {
    use regstruct::casebook::scenario;
    use regstruct::renorm::{m_from_character, m_from_r, r_from_character};

    let sc = scenario("gkpz").unwrap();
    let t = parse_tree("I(I(I(Xi)*Xi)*Xi)", &sc.rule).unwrap();
    let path = format!("{}/tests/fixtures/m_generic_gkpz_counterexample.txt", env!("CARGO_MANIFEST_DIR"));
    let want = std::fs::read_to_string(&path).unwrap();
    let direct = m_from_character(&sc.rule, &sc.character).apply(&t).unwrap();
    assert_eq!(direct.structured(), want);
    let ren = m_from_r(&sc.rule, r_from_character(&sc.rule, &sc.character));
    assert_eq!(ren.m(&t).unwrap().structured(), want);
}
