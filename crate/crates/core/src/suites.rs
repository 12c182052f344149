//! Named identity suites over a capped basis.
//!
//! Each suite takes a rule, an edge cap and a seed and returns a
//! [`Report`]. The caps other than the edge count come from
//! [`SuiteCaps::for_rule`]; seeds feed the sampled characters of `𝒢₊` and
//! the random tensors of the `D` lemma.

use std::collections::BTreeSet;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::casebook::{scenario, wick_character};
use crate::characters::{plus_generators, seeded_rational, MinusCharacter, PlusCharacter};
use crate::coeff::Coefficient;
use crate::coproducts::{
    antipode_sides, coassociativity_hat_sides, coassociativity_plus_sides, cointeraction_sides, comodule_sides, delta,
    delta_minus, delta_minus_r, delta_minus_r_via_delta_2, delta_minus_via_hat, delta_via_delta_2, delta_via_hat,
    factorised_delta_minus, Antipode, TreePair,
};
use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::renorm::{
    check_admissible, check_alternative_form, check_antipode_corollaries, check_factorisation, d_inverse, d_map,
    m_from_r, r_from_character, sample_characters, Twisted,
};
use crate::report::Report;
use crate::rules::RuleTable;
use crate::tree::{MultiIndex, RootedForest, Tree};

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &["coassoc", "factorisation", "cointeraction", "group", "antipode", "deltaM", "admissible"];

/// Basis caps used by the suites.
#[derive(Clone, Debug)]
pub struct SuiteCaps {
    pub degree_cap: Rational64,
    pub edge_cap: usize,
    pub poly_cap: MultiIndex,
    /// Degree cap on both left legs in the `Δ̂₁` coassociativity check.
    pub hat_cap: Rational64,
}

impl SuiteCaps {
    /// Degree cap `3/2`, polynomial decorations up to one in each spatial
    /// direction (and in time for one-dimensional rules); rules without
    /// kernels take every tree. The `Δ̂₁` check keeps left legs of degree at
    /// most `1`, or `-2` in dimension above one.
    pub fn for_rule(rule: &RuleTable, edge_cap: usize) -> Self {
        let dim = rule.dim();
        if rule.kernel_types().next().is_none() {
            return SuiteCaps {
                degree_cap: Rational64::from_integer(100),
                edge_cap,
                poly_cap: MultiIndex::zero(dim),
                hat_cap: Rational64::from_integer(1),
            };
        }
        let mut poly = vec![1; dim + 1];
        if dim > 1 {
            poly[0] = 0;
        }
        // In higher dimension the polynomial sums of `Δ̂₁` grow quickly with
        // the left-leg degree, so the coassociativity check is graded lower.
        let hat_cap = Rational64::from_integer(if dim > 1 { -2 } else { 1 });
        SuiteCaps { degree_cap: Rational64::new(3, 2), edge_cap, poly_cap: MultiIndex(poly), hat_cap }
    }

    pub fn basis(&self, rule: &RuleTable) -> Vec<Tree> {
        rule.generate_basis(self.degree_cap, self.edge_cap, &self.poly_cap, rule.default_root).iter().cloned().collect()
    }
}

/// The built-in character for a rule, or `wick`.
pub fn builtin_character(name: &str, rule: &RuleTable) -> Option<MinusCharacter> {
    match name {
        "wick" | "hermite" => Some(wick_character(rule, 5)),
        other => scenario(other).map(|s| s.character),
    }
}

/// The character a suite uses for a rule given by its built-in name.
fn default_character(rule_name: &str, rule: &RuleTable) -> MinusCharacter {
    let key = match rule_name {
        "kpz-bar" => "kpz",
        "phi43" => "qua",
        other => other,
    };
    builtin_character(key, rule).unwrap_or_default()
}

/// Right legs of `Δ` over the basis: a sample of `𝒯₊`.
fn plus_sample(rule: &RuleTable, basis: &[Tree]) -> BTreeSet<Tree> {
    let mut out = BTreeSet::new();
    for t in basis {
        out.extend(delta(rule, t).keys().map(|(_, b)| b.clone()));
    }
    out
}

/// `(Δ⊗id)Δ = (id⊗Δ⁺)Δ`, coassociativity of `Δ⁺` and of the truncated `Δ̂₁`.
pub fn coassoc(rule: &RuleTable, caps: &SuiteCaps) -> Report {
    let basis = caps.basis(rule);
    let mut rep = Report::new();
    for t in &basis {
        let (l, r) = comodule_sides(rule, t);
        rep.check_eq("comodule", &t.text(), &l, &r);
    }
    for s in &plus_sample(rule, &basis) {
        let (l, r) = coassociativity_plus_sides(rule, s);
        rep.check_eq("coassoc-plus", &s.text(), &l, &r);
    }
    let cap = caps.hat_cap;
    for t in &basis {
        let (l, r) = coassociativity_hat_sides(rule, &RootedForest::from_tree(t.clone()), cap, cap);
        rep.check_eq("coassoc-hat", &t.text(), &l, &r);
    }
    rep
}

/// `Δ⁻ = (ℳ₋⊗id)(id⊗Δ⁻_∘)Δ⁻_r` and the projections of `Δ̂₁` and `Δ₂`.
pub fn factorisation(rule: &RuleTable, caps: &SuiteCaps) -> Report {
    let mut rep = Report::new();
    for t in &caps.basis(rule) {
        let s = t.text();
        let dm = delta_minus(rule, t);
        rep.check_eq("factorisation", &s, &factorised_delta_minus(rule, t), &dm);
        rep.check_eq("hat-to-minus", &s, &delta_minus_via_hat(rule, t), &dm);
        let d = delta(rule, t);
        rep.check_eq("hat-to-plus", &s, &delta_via_hat(rule, t), &d);
        rep.check_eq("delta2-to-plus", &s, &delta_via_delta_2(rule, t), &d);
        rep.check_eq("delta2-to-root", &s, &delta_minus_r_via_delta_2(rule, t), &delta_minus_r(rule, t));
    }
    rep
}

/// `(id⊗Δ)Δ⁻_r = (Δ⁻_r⊗id)Δ`.
pub fn cointeraction(rule: &RuleTable, caps: &SuiteCaps) -> Report {
    let mut rep = Report::new();
    for t in &caps.basis(rule) {
        let (l, r) = cointeraction_sides(rule, t);
        rep.check_eq("cointeraction", &t.text(), &l, &r);
    }
    rep
}

fn character_diff(a: &PlusCharacter, b: &PlusCharacter) -> String {
    let diff: Vec<String> = a
        .values()
        .iter()
        .filter(|(g, v)| b.values().get(*g) != Some(*v))
        .map(|(g, v)| format!("{}: {} vs {}", g.text(), v, b.values().get(g).map_or("missing".to_string(), |w| w.to_string())))
        .collect();
    diff.join("; ")
}

/// A random element of `𝒯 ⊗ 𝒯₊` with one to three terms.
fn random_tensor(rng: &mut ChaCha8Rng, left: &[Tree], right: &[Tree], seed: u64, i: usize) -> TreePair {
    let mut x = LinComb::zero();
    for j in 0..rng.gen_range(1..=3) {
        let a = left[rng.gen_range(0..left.len())].clone();
        let b = right[rng.gen_range(0..right.len())].clone();
        let c = Coefficient::from_rational(seeded_rational(seed, &format!("tensor{i}.{j}")));
        x.add_term((a, b), c);
    }
    x
}

/// Group laws for three seeded characters and the `D` lemma on twenty
/// seeded tensors.
pub fn group(rule: &RuleTable, caps: &SuiteCaps, seed: u64) -> Report {
    let mut rep = Report::new();
    let basis = caps.basis(rule);
    let gens = plus_generators(rule, &basis);
    let dim = rule.dim();
    let [g, h, k] = [0, 1, 2].map(|i| PlusCharacter::seeded(dim, &gens, seed.wrapping_add(i)));
    let unit = PlusCharacter::unit(dim, &gens);
    let laws = (|| -> Result<()> {
        let gh = g.compose(&h, rule)?;
        let gh2 = g.compose_via_delta_plus(&h, rule)?;
        rep.check("compose-paths", "g.h", gh == gh2, || character_diff(&gh, &gh2));
        let l = gh.compose(&k, rule)?;
        let r = g.compose(&h.compose(&k, rule)?, rule)?;
        rep.check("associativity", "(g.h).k", l == r, || character_diff(&l, &r));
        let gi = g.inverse(rule)?;
        let gi2 = g.inverse_via_antipode(rule)?;
        rep.check("inverse-paths", "g^-1", gi == gi2, || character_diff(&gi, &gi2));
        let e = g.compose(&gi, rule)?;
        rep.check("inverse", "g.g^-1", e == unit, || character_diff(&e, &unit));
        let e = gi.compose(&g, rule)?;
        rep.check("inverse", "g^-1.g", e == unit, || character_diff(&e, &unit));
        for t in &basis {
            let s = t.text();
            rep.check_eq("gamma-action", &s, &g.gamma_lc(rule, &h.gamma(rule, t)?)?, &gh.gamma(rule, t)?);
            rep.check_eq("gamma-paths", &s, &g.gamma(rule, t)?, &g.gamma_via_delta(rule, t)?);
        }
        Ok(())
    })();
    if let Err(e) = laws {
        rep.fail("group", "characters", &format!("error: {e}"));
    }

    let left: Vec<Tree> = basis.clone();
    let right: Vec<Tree> = plus_sample(rule, &basis).into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut anti = Antipode::new(rule);
    for i in 0..20 {
        let x = random_tensor(&mut rng, &left, &right, seed, i);
        let subj = format!("tensor{i}");
        rep.check_eq("D^-1.D", &subj, &d_inverse(rule, &mut anti, &d_map(rule, &x)), &x);
        rep.check_eq("D.D^-1", &subj, &d_map(rule, &d_inverse(rule, &mut anti, &x)), &x);
    }
    rep
}

/// Defining relations of `𝒜₊` and the two corollaries for `J̃`.
pub fn antipode(rule: &RuleTable, caps: &SuiteCaps) -> Report {
    let basis = caps.basis(rule);
    let mut rep = Report::new();
    let mut anti = Antipode::new(rule);
    for s in &plus_sample(rule, &basis) {
        let (l, r) = antipode_sides(rule, &mut anti, s);
        let eps = if s.is_one() { LinComb::basis(s.clone()) } else { LinComb::zero() };
        rep.check_eq("antipode-right", &s.text(), &l, &eps);
        rep.check_eq("antipode-left", &s.text(), &r, &eps);
    }
    rep.merge(check_antipode_corollaries(rule, &plus_generators(rule, &basis)));
    rep
}

/// Twisted coproduct checks and the `L` form for the rule's character.
pub fn delta_m(rule_name: &str, rule: &RuleTable, caps: &SuiteCaps) -> Report {
    let ell = default_character(rule_name, rule);
    let basis = caps.basis(rule);
    let ren = m_from_r(rule, r_from_character(rule, &ell));
    let mut rep = Twisted::new(&ren).check(&basis);
    rep.merge(check_alternative_form(&ren, &basis));
    rep
}

/// Admissibility of `R_ℓ` and `M_ℓ = M∘_ℓR_ℓ = M_from_R(R_ℓ)`.
pub fn admissible(rule_name: &str, rule: &RuleTable, caps: &SuiteCaps, seed: u64) -> Report {
    let ell = default_character(rule_name, rule);
    let basis = caps.basis(rule);
    let r = r_from_character(rule, &ell);
    let mut trees: BTreeSet<Tree> = basis.iter().cloned().collect();
    for t in &basis {
        if let Ok(v) = r.apply(t) {
            trees.extend(v.keys().cloned());
        }
    }
    let seeds = [seed, seed.wrapping_add(1), seed.wrapping_add(2)];
    let gs = sample_characters(rule, &trees, &seeds);
    let mut rep = check_admissible(rule, &r, &basis, &gs);
    rep.merge(check_factorisation(rule, &ell, &basis));
    rep
}

/// Runs a suite by name (`all` runs every suite).
pub fn run_suite(name: &str, rule_name: &str, rule: &RuleTable, caps: &SuiteCaps, seed: u64) -> Result<Report> {
    let mut rep = Report::with_header(&[&format!("rule {rule_name}, suite {name}, max edges {}, seed {seed}", caps.edge_cap)]);
    let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    for n in names {
        let sub = match n {
            "coassoc" => coassoc(rule, caps),
            "factorisation" => factorisation(rule, caps),
            "cointeraction" => cointeraction(rule, caps),
            "group" => group(rule, caps, seed),
            "antipode" => antipode(rule, caps),
            "deltaM" => delta_m(rule_name, rule, caps),
            "admissible" => admissible(rule_name, rule, caps, seed),
            other => return Err(Error::Invalid(format!("unknown suite `{other}`"))),
        };
        rep.merge(sub);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_kpz() {
        let rule = RuleTable::builtin("kpz").unwrap();
        let caps = SuiteCaps::for_rule(&rule, 3);
        let rep = run_suite("all", "kpz", &rule, &caps, 7).unwrap();
        assert!(rep.all_passed(), "{}", rep.failures().cloned().collect::<Vec<_>>().join("\n"));
        assert!(rep.count("D^-1.D").0 == 20);
        assert!(run_suite("nope", "kpz", &rule, &caps, 7).is_err());
    }

    #[test]
    fn suites_pass_on_hermite() {
        let rule = RuleTable::builtin("hermite").unwrap();
        let caps = SuiteCaps::for_rule(&rule, 5);
        let rep = run_suite("all", "hermite", &rule, &caps, 1).unwrap();
        assert!(rep.all_passed(), "{}", rep.failures().cloned().collect::<Vec<_>>().join("\n"));
    }
}
