//! Worked renormalisation settings.
//!
//! * Gaussian noise with the Hermite rule, where `M_{ℓ_wick}` turns `Ξⁿ`
//!   into the Wick power `H_n(ξ, c)`.
//! * KPZ, generalised KPZ and Φ⁴₃, each wired to its character, caps and a
//!   list of assertions that [`Scenario::run`] turns into a report.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::characters::MinusCharacter;
use crate::coeff::{Coefficient, Rational};
use crate::coproducts::delta_minus_r;
use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::renorm::{
    check_admissible, check_factorisation, check_property_a, check_property_c_algebraic, m_from_character, m_from_r,
    r_from_character, sample_characters,
};
use crate::report::Report;
use crate::rules::{RootConstraint, RuleTable};
use crate::text::parse_tree;
use crate::tree::{Forest, MultiIndex, Tree};

fn coeff_of(q: Rational) -> Coefficient {
    Coefficient::from_rational(q)
}

/// `∂/∂name` of a polynomial coefficient.
pub fn derivative(p: &Coefficient, name: &str) -> Coefficient {
    let mut out = Coefficient::zero();
    for (m, q) in p.terms() {
        let Some(&(_, e)) = m.factors().iter().find(|(n, _)| &**n == name) else { continue };
        let rest: Vec<_> = m
            .factors()
            .iter()
            .map(|(n, k)| (n.clone(), if &**n == name { k - 1 } else { *k }))
            .collect();
        let mut c = coeff_of(q * Rational::from_integer(BigInt::from(e)));
        for (n, k) in rest {
            c = &c * &Coefficient::constant(&n).pow(k);
        }
        out += &c;
    }
    out
}

/// `H_n(x, c)` from `H₀ = 1`, `H_{n+1} = xH_n − c²H_n′`.
pub fn hermite(n: usize) -> Coefficient {
    let x = Coefficient::constant("x");
    let c2 = Coefficient::constant("c").pow(2);
    let mut h = Coefficient::one();
    for _ in 0..n {
        h = &(&x * &h) - &(&c2 * &derivative(&h, "x"));
    }
    h
}

/// `(2k−1)!/(2^{k−1}(k−1)!)`, i.e. `(2k−1)!!`.
fn double_factorial_odd(k: u32) -> BigInt {
    (1..=k).map(|i| BigInt::from(2 * i - 1)).product()
}

/// `Ξⁿ` in the Hermite rule: a root with `n` noise leaves.
pub fn xi_power(rule: &RuleTable, n: usize) -> Tree {
    let xi = Tree::noise("Xi", rule.dim());
    (0..n).fold(Tree::one(rule.dim()), |acc, _| acc.product(&xi))
}

/// `ℓ_wick(Ξ^{2k}) = (−1)^k (2k−1)!/(2^{k−1}(k−1)!) c^{2k}` for `1 ≤ k ≤ kmax`.
pub fn wick_character(rule: &RuleTable, kmax: u32) -> MinusCharacter {
    MinusCharacter::new((1..=kmax).map(|k| {
        let mut v = coeff_of(Rational::from_integer(double_factorial_odd(k)));
        if k % 2 == 1 {
            v = -&v;
        }
        (xi_power(rule, 2 * k as usize), &v * &Coefficient::constant("c").pow(2 * k))
    }))
}

/// `Ξ ↦ x`, multiplicatively.
pub fn wick_image(x: &LinComb<Tree>) -> Coefficient {
    let mut out = Coefficient::zero();
    for (t, c) in x {
        out += &(c * &Coefficient::constant("x").pow(t.noise_count() as u32));
    }
    out
}

/// The extraction part of `R_ℓ` with `ℓ(Ξ²) = c²`: `RΞⁿ = binom(n,2) c² Ξ^{n−2}`.
fn hermite_r(rule: &RuleTable, x: &LinComb<Tree>) -> LinComb<Tree> {
    let ell = MinusCharacter::new([(xi_power(rule, 2), Coefficient::constant("c").pow(2))]);
    let r = r_from_character(rule, &ell);
    let full = r.apply_lc(x).expect("extraction never fails");
    full.sub(x)
}

/// `f_k(Ξ^{2k}) = (2k−1)!/(2^{k−1}(k−1)!) c^{2k}`, zero on every other forest.
fn f_k(rule: &RuleTable, k: u32, f: &Forest) -> Coefficient {
    match f.trees() {
        [t] if *t == xi_power(rule, 2 * k as usize) => {
            &coeff_of(Rational::from_integer(double_factorial_odd(k))) * &Coefficient::constant("c").pow(2 * k)
        }
        _ => Coefficient::zero(),
    }
}

/// For `Ξⁿ`: `M_{ℓ_wick}Ξⁿ ↦ H_n` under `Ξ ↦ x`, and
/// `Σ_{k≤5}(−1)^k R^k/k! Ξⁿ = M_{ℓ_wick}Ξⁿ`.
pub fn wick_check(n: usize, kmax: u32) -> Result<(Report, Coefficient, Coefficient)> {
    if (2 * kmax as usize) < n {
        return Err(Error::Invalid(format!("kmax = {kmax} is too small for n = {n}")));
    }
    let rule = RuleTable::builtin("hermite").expect("built-in rule");
    let ell = wick_character(&rule, kmax);
    let t = xi_power(&rule, n);
    let m = m_from_character(&rule, &ell).apply(&t)?;
    let image = wick_image(&m);
    let h = hermite(n);
    let mut rep = Report::new();
    let subj = t.text();
    rep.check("wick=hermite", &subj, image == h, || format!("image {image} vs {h}"));

    let mut term = LinComb::basis(t.clone());
    let mut exp = term.clone();
    for k in 1..=5i64 {
        term = hermite_r(&rule, &term).scale(&coeff_of(Rational::new((-1).into(), k.into())));
        exp.add_assign(&term);
    }
    rep.check_eq("M=exp(-R)", &subj, &exp, &m);
    Ok((rep, image, h))
}

/// `R^k/k! Ξⁿ = (f_k⊗id)Δ⁻_r Ξⁿ` for `1 ≤ k ≤ kmax`, `n ≤ nmax`.
pub fn extraction_powers_check(nmax: usize, kmax: u32) -> Report {
    let rule = RuleTable::builtin("hermite").expect("built-in rule");
    let mut rep = Report::new();
    for n in 0..=nmax {
        let t = xi_power(&rule, n);
        let d = delta_minus_r(&rule, &t);
        let mut power = LinComb::basis(t.clone());
        for k in 1..=kmax {
            power = hermite_r(&rule, &power).scale(&coeff_of(Rational::new(BigInt::one(), BigInt::from(k))));
            let mut rhs = LinComb::zero();
            for ((f, u), c) in &d {
                let v = f_k(&rule, k, f);
                if !v.is_zero() {
                    rhs.add_term(u.clone(), c * &v);
                }
            }
            rep.check_eq("extraction-power", &format!("{} [k={k}]", t.text()), &power, &rhs);
        }
    }
    rep
}

/// A character with one named constant `l{tree}` per supported tree.
pub fn symbolic_character<'a>(trees: impl IntoIterator<Item = &'a Tree>) -> MinusCharacter {
    MinusCharacter::new(trees.into_iter().map(|t| (t.clone(), Coefficient::constant(&format!("l{{{}}}", t.text())))))
}

/// The checks a scenario runs.
#[derive(Clone, Debug)]
pub enum Assertion {
    /// `M_ℓ` on one tree equals the given terms; a coefficient that does
    /// not parse as a polynomial names a single constant.
    MValue { input: &'static str, expected: Vec<(&'static str, &'static str)> },
    /// `M_ℓ = M∘_ℓR_ℓ = M_from_R(R_ℓ)` and admissibility of `R_ℓ` on the basis.
    Inclusion,
    /// Property (a) on the basis, computed in the named rule.
    PropertyAHolds { rule: &'static str },
    /// `M∘τ = τ` and `Mτ − τ` polynomial on the basis, in the named rule.
    PolynomialShift { rule: &'static str },
    /// Property (a) fails on this tree with a nonzero difference.
    PropertyAFails { tree: &'static str },
    /// The negative planted trees of the basis are exactly these.
    NegativePlanted { trees: Vec<&'static str> },
}

impl Assertion {
    pub fn name(&self) -> &'static str {
        match self {
            Assertion::MValue { .. } => "m-value",
            Assertion::Inclusion => "inclusion",
            Assertion::PropertyAHolds { .. } => "property-a-holds",
            Assertion::PolynomialShift { .. } => "polynomial-shift",
            Assertion::PropertyAFails { .. } => "property-a-fails",
            Assertion::NegativePlanted { .. } => "negative-planted",
        }
    }
}

/// A rule, a character, basis caps and the assertions checked on them.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub rule: RuleTable,
    pub character: MinusCharacter,
    pub degree_cap: Rational64,
    pub edge_cap: usize,
    pub poly_cap: MultiIndex,
    pub assertions: Vec<Assertion>,
}

fn parse_all(rule: &RuleTable, srcs: &[&str]) -> Vec<Tree> {
    srcs.iter().map(|s| parse_tree(s, rule).expect("scenario trees parse")).collect()
}

/// Negative, `X`-free, non-planted trees of a capped basis.
pub fn negative_plain_trees(rule: &RuleTable, edge_cap: usize) -> Vec<Tree> {
    let zero = MultiIndex::zero(rule.dim());
    rule.generate_basis(Rational64::zero(), edge_cap, &zero, RootConstraint::Strong)
        .iter()
        .filter(|t| rule.degree(t).is_negative() && !t.has_x() && !t.is_planted())
        .cloned()
        .collect()
}

/// KPZ with `ℓ_kpz` supported on `I₁(Ξ)²`, `I₁(I₁(Ξ)²)²` and
/// `I₁(Ξ)I₁(I₁(Ξ)I₁(I₁(Ξ)²))`. Property (a) is checked in the rule where
/// `I` of a polynomial vanishes.
pub fn kpz_scenario() -> Scenario {
    let rule = RuleTable::builtin("kpz").expect("built-in rule");
    let support = parse_all(
        &rule,
        &["I1(Xi)*I1(Xi)", "I1(I1(Xi)*I1(Xi))*I1(I1(Xi)*I1(Xi))", "I1(Xi)*I1(I1(Xi)*I1(I1(Xi)*I1(Xi)))"],
    );
    Scenario {
        name: "kpz",
        character: symbolic_character(&support),
        degree_cap: Rational64::from_integer(2),
        edge_cap: 6,
        poly_cap: MultiIndex(vec![1, 2]),
        assertions: vec![
            Assertion::MValue {
                input: "I1(Xi)*I1(Xi)",
                expected: vec![("I1(Xi)*I1(Xi)", "1"), ("One", "l{I1(Xi)*I1(Xi)}")],
            },
            Assertion::Inclusion,
            Assertion::PropertyAHolds { rule: "kpz-bar" },
            Assertion::PolynomialShift { rule: "kpz-bar" },
        ],
        rule,
    }
}

/// Generalised KPZ, with `ℓ` symbolic on every negative `X`-free tree.
pub fn gkpz_scenario() -> Scenario {
    let rule = RuleTable::builtin("gkpz").expect("built-in rule");
    let support = negative_plain_trees(&rule, 6);
    Scenario {
        name: "gkpz",
        character: symbolic_character(&support),
        degree_cap: Rational64::one(),
        edge_cap: 6,
        poly_cap: MultiIndex(vec![0, 1]),
        assertions: vec![
            Assertion::MValue {
                input: "I(I(I(Xi)*Xi)*Xi)",
                expected: vec![
                    ("I(I(I(Xi)*Xi)*Xi)", "1"),
                    ("I(I(Xi))", "l{I(Xi)*Xi}"),
                    ("I(I(One)*Xi)", "l{I(Xi)*Xi}"),
                    ("I(One)", "l{I(I(Xi)*Xi)*Xi}"),
                ],
            },
            Assertion::Inclusion,
            Assertion::PropertyAFails { tree: "I(I(I(Xi)*Xi)*Xi)" },
            Assertion::NegativePlanted { trees: vec!["I1(Xi)", "I1(I1(Xi)*I1(Xi))", "I1(I(Xi)*Xi)"] },
        ],
        rule,
    }
}

/// Φ⁴₃ with `ℓ_qua` supported on `I(Ξ)²` and `I(Ξ)²I(I(Ξ)²)`.
pub fn qua_scenario() -> Scenario {
    let rule = RuleTable::builtin("qua").expect("built-in rule");
    let support = parse_all(&rule, &["I(Xi)*I(Xi)", "I(Xi)*I(Xi)*I(I(Xi)*I(Xi))"]);
    Scenario {
        name: "qua",
        character: symbolic_character(&support),
        degree_cap: Rational64::new(3, 2),
        edge_cap: 6,
        poly_cap: MultiIndex(vec![0, 1, 1, 1]),
        assertions: vec![
            Assertion::Inclusion,
            Assertion::PropertyAFails { tree: "I(I(Xi)*I(Xi)*I(Xi))" },
            Assertion::NegativePlanted { trees: vec!["I(Xi)"] },
        ],
        rule,
    }
}

/// Looks a scenario up by rule name.
pub fn scenario(name: &str) -> Option<Scenario> {
    match name {
        "kpz" => Some(kpz_scenario()),
        "gkpz" => Some(gkpz_scenario()),
        "qua" | "phi43" => Some(qua_scenario()),
        _ => None,
    }
}

impl Scenario {
    pub fn basis(&self) -> Vec<Tree> {
        self.basis_in(&self.rule)
    }

    fn basis_in(&self, rule: &RuleTable) -> Vec<Tree> {
        rule.generate_basis(self.degree_cap, self.edge_cap, &self.poly_cap, RootConstraint::Strong).iter().cloned().collect()
    }

    /// Runs every assertion with characters seeded from `seeds`.
    pub fn run(&self, seeds: &[u64]) -> Report {
        let mut rep = Report::with_header(&[&format!("scenario {}", self.name)]);
        for a in &self.assertions {
            rep.merge(self.run_one(a, seeds));
        }
        rep
    }

    /// Runs one assertion.
    pub fn run_one(&self, a: &Assertion, seeds: &[u64]) -> Report {
        let rule = &self.rule;
        let mut rep = Report::new();
        match a {
            Assertion::MValue { input, expected } => {
                let t = parse_tree(input, rule).expect("scenario trees parse");
                let want: LinComb<Tree> = expected
                    .iter()
                    .map(|(s, c)| (parse_tree(s, rule).expect("scenario trees parse"), Coefficient::parse(c).unwrap_or_else(|_| Coefficient::constant(c))))
                    .collect();
                match m_from_character(rule, &self.character).apply(&t) {
                    Ok(got) => {
                        rep.check_eq("m-value", input, &got, &want);
                    }
                    Err(e) => rep.fail("m-value", input, &format!("error: {e}")),
                }
            }
            Assertion::Inclusion => {
                let basis = self.basis();
                rep.merge(check_factorisation(rule, &self.character, &basis));
                let r = r_from_character(rule, &self.character);
                let mut trees: BTreeSet<Tree> = basis.iter().cloned().collect();
                for t in &basis {
                    if let Ok(rt) = r.apply(t) {
                        trees.extend(rt.keys().cloned());
                    }
                }
                let gs = sample_characters(rule, &trees, seeds);
                rep.merge(check_admissible(rule, &r, &basis, &gs));
            }
            Assertion::PropertyAHolds { rule: name } => {
                let other = RuleTable::builtin(name).expect("built-in rule");
                rep.merge(self.property_a(&other, &self.basis_in(&other), seeds));
            }
            Assertion::PolynomialShift { rule: name } => {
                let other = RuleTable::builtin(name).expect("built-in rule");
                let ren = m_from_r(&other, r_from_character(&other, &self.character));
                for t in self.basis_in(&other) {
                    let s = t.text();
                    let one = LinComb::basis(t.clone());
                    match (ren.m_circ(&t), ren.m(&t)) {
                        (Ok(mc), Ok(m)) => {
                            rep.check_eq("Mcirc=id", &s, &mc, &one);
                            let shift = m.sub(&one);
                            let bad: Vec<String> = shift.keys().filter(|u| !u.is_polynomial()).map(|u| u.text()).collect();
                            rep.check("M-id-polynomial", &s, bad.is_empty(), || format!("non-polynomial terms {}", bad.join(", ")));
                        }
                        (Err(e), _) | (_, Err(e)) => rep.fail("polynomial-shift", &s, &format!("error: {e}")),
                    }
                }
            }
            Assertion::PropertyAFails { tree } => {
                let t = parse_tree(tree, rule).expect("scenario trees parse");
                let sub = self.property_a(rule, std::slice::from_ref(&t), seeds);
                let failed = sub.count("property-a").1;
                let nonzero = sub.failed_subjects("property-a").len() == failed && failed > 0;
                rep.info(format!("property (a) on {tree}: {failed} of {} seeded characters disagree", seeds.len()));
                for l in sub.failures() {
                    rep.info(format!("expected difference: {}", l.trim_start_matches("FAIL property-a ")));
                }
                rep.check("property-a-fails", tree, nonzero, || "property (a) holds for every seeded character".to_string());
            }
            Assertion::NegativePlanted { trees } => {
                let basis = self.basis();
                let (set, sub) = check_property_c_algebraic(rule, &basis);
                rep.merge(sub);
                let want: BTreeSet<Tree> = parse_all(rule, trees).into_iter().collect();
                let show = |s: &BTreeSet<Tree>| s.iter().map(|t| t.text()).collect::<Vec<_>>().join(", ");
                rep.check("negative-planted", self.name, set == want, || {
                    format!("got {{{}}}, expected {{{}}}", show(&set), show(&want))
                });
            }
        }
        rep
    }

    fn property_a(&self, rule: &RuleTable, trees: &[Tree], seeds: &[u64]) -> Report {
        let ren = m_from_r(rule, r_from_character(rule, &self.character));
        let mut all: BTreeSet<Tree> = trees.iter().cloned().collect();
        for t in trees {
            if let Ok(m) = ren.m(t) {
                all.extend(m.keys().cloned());
            }
        }
        let gs = sample_characters(rule, &all, seeds);
        check_property_a(rule, |t| ren.m(t), trees, &gs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed form `Σ_j (−1)^j n!/(j!(n−2j)!2^j) c^{2j} x^{n−2j}`.
    fn hermite_closed(n: usize) -> Coefficient {
        let fact = |m: usize| -> BigInt { (1..=m).map(BigInt::from).product() };
        let mut out = Coefficient::zero();
        for j in 0..=n / 2 {
            let q = Rational::new(fact(n), fact(j) * fact(n - 2 * j) * BigInt::from(2).pow(j as u32));
            let mut c = coeff_of(if j % 2 == 1 { -q } else { q });
            c = &c * &Coefficient::constant("c").pow(2 * j as u32);
            c = &c * &Coefficient::constant("x").pow((n - 2 * j) as u32);
            out += &c;
        }
        out
    }

    #[test]
    fn hermite_polynomials() {
        assert_eq!(hermite(0), Coefficient::one());
        assert_eq!(hermite(1), Coefficient::parse("x").unwrap());
        assert_eq!(hermite(2), Coefficient::parse("x^2 - c^2").unwrap());
        assert_eq!(hermite(4), Coefficient::parse("x^4 - 6*c^2*x^2 + 3*c^4").unwrap());
        for n in 0..=10 {
            assert_eq!(hermite(n), hermite_closed(n), "n = {n}");
        }
    }

    #[test]
    fn wick_values() {
        let rule = RuleTable::builtin("hermite").unwrap();
        let ell = wick_character(&rule, 3);
        assert_eq!(ell.value(&xi_power(&rule, 2)), Coefficient::parse("-c^2").unwrap());
        assert_eq!(ell.value(&xi_power(&rule, 4)), Coefficient::parse("3*c^4").unwrap());
        assert_eq!(ell.value(&xi_power(&rule, 6)), Coefficient::parse("-15*c^6").unwrap());
        assert_eq!(f_k(&rule, 2, &Forest::single(xi_power(&rule, 4))), Coefficient::parse("3*c^4").unwrap());
        let (rep, image, _) = wick_check(2, 1).unwrap();
        assert!(rep.all_passed(), "{rep}");
        assert_eq!(image, Coefficient::parse("x^2 - c^2").unwrap());
        assert!(wick_check(5, 2).is_err());
        for n in 0..=6 {
            let (rep, _, _) = wick_check(n, 3).unwrap();
            assert!(rep.all_passed(), "{rep}");
        }
        assert!(extraction_powers_check(6, 3).all_passed());
    }

    #[test]
    fn derivative_of_monomials() {
        let p = Coefficient::parse("3*x^2*c + c").unwrap();
        assert_eq!(derivative(&p, "x"), Coefficient::parse("6*x*c").unwrap());
    }

    #[test]
    fn gkpz_support_filters() {
        let rule = RuleTable::builtin("gkpz").unwrap();
        let support = negative_plain_trees(&rule, 4);
        let texts: Vec<String> = support.iter().map(|t| t.text()).collect();
        assert!(texts.contains(&"I(Xi)*Xi".to_string()), "{texts:?}");
        assert!(support.iter().all(|t| !t.has_x()));
        assert_eq!(rule.degree(&parse_tree("I(Xi)*Xi", &rule).unwrap()), Rational64::new(-51, 50));
    }

    #[test]
    fn kpz_cherry_value() {
        let sc = kpz_scenario();
        let rep = sc.run_one(&sc.assertions[0], &[1]);
        assert!(rep.all_passed(), "{rep}");
    }
}
