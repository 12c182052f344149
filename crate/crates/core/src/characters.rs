//! The character groups `𝒢₊` and `𝒢₋`.
//!
//! A [`PlusCharacter`] is a multiplicative functional on `𝒯₊`, stored by its
//! values on a declared finite set of generators (`Xᵢ` and planted
//! `J^𝔱_k(τ)` of positive degree). Asking for a generator outside that set
//! is an error rather than a silent zero, so undersized caps surface
//! immediately. A [`MinusCharacter`] is a finitely supported functional on
//! negative-degree trees, extended multiplicatively over forests and by
//! zero elsewhere.
//!
//! Every operation of `𝒢₊` is implemented twice — once by the symbolic
//! recursion and once by pairing with a coproduct — so the two can be
//! cross-checked.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Rational64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::{rat, Coefficient, Rational};
use crate::coproducts::{delta, delta_minus_forest, delta_plus, ells_below, inv_factorial, Antipode};
use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::rules::RuleTable;
use crate::text::parse_tree;
use crate::tree::{Forest, MultiIndex, Tree};

/// Planted factors of an element of `𝒯₊`, skipping noise factors.
fn planted_factors(s: &Tree) -> impl Iterator<Item = Tree> + '_ {
    s.planted_decomposition().1.into_iter().filter(|p| !p.edges()[0].label.noise)
}

/// The generators `Xᵢ`, one per coordinate.
pub fn x_generators(dim: usize) -> Vec<Tree> {
    (0..=dim).map(|i| Tree::x(MultiIndex::unit(dim, i))).collect()
}

/// The generators of `𝒯₊` needed to evaluate `Γ_g`, `∘` and `g⁻¹` on the
/// given trees: all `Xᵢ`, the planted factors of the right legs of `Δτ`, and
/// everything reachable from those through both legs of `Δ⁺`.
pub fn plus_generators<'a>(rule: &RuleTable, trees: impl IntoIterator<Item = &'a Tree>) -> BTreeSet<Tree> {
    let mut out: BTreeSet<Tree> = x_generators(rule.dim()).into_iter().collect();
    let mut work = Vec::new();
    for t in trees {
        for (_, b) in delta(rule, t).keys() {
            for p in planted_factors(b) {
                if out.insert(p.clone()) {
                    work.push(p);
                }
            }
        }
    }
    while let Some(j) = work.pop() {
        for (a, b) in delta_plus(rule, &j).keys() {
            for p in planted_factors(a).chain(planted_factors(b)) {
                if rule.project_plus(&p).is_some() && out.insert(p.clone()) {
                    work.push(p);
                }
            }
        }
    }
    out
}

fn is_generator(t: &Tree) -> bool {
    (t.edges().is_empty() && t.node().unit_position().is_some()) || (t.is_planted() && !t.edges()[0].label.noise)
}

/// FNV-1a, used to derive a per-generator stream from the seed so that a
/// generator's value does not depend on which other generators are declared.
fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// A seeded rational with numerator in `[−9, 9]` and denominator in `[1, 4]`.
pub fn seeded_rational(seed: u64, key: &str) -> Rational {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(key));
    let n: i64 = rng.gen_range(-9..=9);
    let d: i64 = rng.gen_range(1..=4);
    rat(n, d)
}

/// An element `g ∈ 𝒢₊`, given by its values on a declared set of
/// generators and extended multiplicatively with `g(𝟏) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlusCharacter {
    dim: usize,
    values: BTreeMap<Tree, Coefficient>,
}

impl PlusCharacter {
    /// Builds a character from generator values; every key must be `Xᵢ` or
    /// a planted kernel tree.
    pub fn new(dim: usize, values: BTreeMap<Tree, Coefficient>) -> Result<Self> {
        if let Some(bad) = values.keys().find(|t| !is_generator(t)) {
            return Err(Error::Invalid(format!("`{bad}` is not a generator of the positive algebra")));
        }
        Ok(PlusCharacter { dim, values })
    }

    /// The neutral element `𝟏*` on the given generators.
    pub fn unit(dim: usize, generators: &BTreeSet<Tree>) -> Self {
        PlusCharacter { dim, values: generators.iter().map(|g| (g.clone(), Coefficient::zero())).collect() }
    }

    /// Seeded random values on the given generators.
    pub fn seeded(dim: usize, generators: &BTreeSet<Tree>, seed: u64) -> Self {
        let values = generators
            .iter()
            .map(|g| (g.clone(), Coefficient::from_rational(seeded_rational(seed, &g.text()))))
            .collect();
        PlusCharacter { dim, values }
    }

    pub fn generators(&self) -> impl Iterator<Item = &Tree> {
        self.values.keys()
    }

    pub fn values(&self) -> &BTreeMap<Tree, Coefficient> {
        &self.values
    }

    /// Value on a generator.
    pub fn value(&self, g: &Tree) -> Result<Coefficient> {
        self.values.get(g).cloned().ok_or_else(|| Error::MissingGenerator(g.text()))
    }

    fn x_power(&self, n: &MultiIndex) -> Result<Coefficient> {
        let mut c = Coefficient::one();
        for (i, &e) in n.0.iter().enumerate() {
            if e > 0 {
                c = &c * &self.value(&Tree::x(MultiIndex::unit(self.dim, i)))?.pow(e);
            }
        }
        Ok(c)
    }

    /// `g(σ)` for an element of `𝒯₊` (zero if `Π₊` annihilates it).
    pub fn eval(&self, rule: &RuleTable, s: &Tree) -> Result<Coefficient> {
        let Some(s) = rule.project_plus(s) else {
            return Ok(Coefficient::zero());
        };
        let (n, planted) = s.planted_decomposition();
        let mut c = self.x_power(&n)?;
        for p in &planted {
            c = &c * &self.value(p)?;
        }
        Ok(c)
    }

    pub fn eval_lc(&self, rule: &RuleTable, x: &LinComb<Tree>) -> Result<Coefficient> {
        let mut out = Coefficient::zero();
        for (s, c) in x {
            out += &(c * &self.eval(rule, s)?);
        }
        Ok(out)
    }

    /// `Γ_g τ` by the recursion in the symbols.
    pub fn gamma(&self, rule: &RuleTable, t: &Tree) -> Result<LinComb<Tree>> {
        let (n, planted) = t.planted_decomposition();
        // Γ X^n = (X + g(X))^n
        let mut acc = LinComb::zero();
        for m in n.below() {
            let c = &Coefficient::from_rational(Rational::from_integer(n.binomial(&m))) * &self.x_power(&m)?;
            acc.add_term(Tree::x(n.checked_sub(&m).unwrap()), c);
        }
        for p in &planted {
            let e = &p.edges()[0];
            let mut part = LinComb::zero();
            if e.label.noise {
                part.add_term(p.clone(), Coefficient::one());
            } else {
                for (s, c) in &self.gamma(rule, &e.child)? {
                    if let Some(j) = rule.graft(&e.label, &e.deco, s) {
                        part.add_term(j, c.clone());
                    }
                }
                for l in ells_below(rule, rule.planted_degree(e)) {
                    if let Some(j) = rule.graft(&e.label, &e.deco.add(&l), &e.child) {
                        part.add_term(Tree::x(l.clone()), &inv_factorial(&l) * &self.eval(rule, &j)?);
                    }
                }
            }
            acc = acc.apply(|a| part.map_keys(|b| Some(a.product(b))));
        }
        Ok(acc)
    }

    pub fn gamma_lc(&self, rule: &RuleTable, x: &LinComb<Tree>) -> Result<LinComb<Tree>> {
        x.try_apply(|t| self.gamma(rule, t))
    }

    /// `Γ_g τ = (id ⊗ g)Δτ`.
    pub fn gamma_via_delta(&self, rule: &RuleTable, t: &Tree) -> Result<LinComb<Tree>> {
        let mut out = LinComb::zero();
        for ((a, b), c) in &delta(rule, t) {
            out.add_term(a.clone(), c * &self.eval(rule, b)?);
        }
        Ok(out)
    }

    fn check_same_support(&self, other: &PlusCharacter) -> Result<()> {
        if self.values.keys().ne(other.values.keys()) {
            return Err(Error::Invalid("characters are declared on different generator sets".into()));
        }
        Ok(())
    }

    /// `g₁ ∘ g₂` by the recursion
    /// `(g₁∘g₂)(J_k(τ)) = g₁(J_k(Γ_{g₂}τ)) + Σ_ℓ g₁(X)^ℓ/ℓ! g₂(J_{k+ℓ}(τ))`.
    pub fn compose(&self, other: &PlusCharacter, rule: &RuleTable) -> Result<PlusCharacter> {
        self.check_same_support(other)?;
        let mut values = BTreeMap::new();
        for g in self.values.keys() {
            let v = if g.edges().is_empty() {
                &self.value(g)? + &other.value(g)?
            } else {
                let e = &g.edges()[0];
                let mut v = Coefficient::zero();
                for (s, c) in &other.gamma(rule, &e.child)? {
                    if let Some(j) = rule.graft(&e.label, &e.deco, s) {
                        v += &(c * &self.eval(rule, &j)?);
                    }
                }
                for l in ells_below(rule, rule.planted_degree(e)) {
                    if let Some(j) = rule.graft(&e.label, &e.deco.add(&l), &e.child) {
                        let w = &(&self.x_power(&l)? * &inv_factorial(&l)) * &other.eval(rule, &j)?;
                        v += &w;
                    }
                }
                v
            };
            values.insert(g.clone(), v);
        }
        Ok(PlusCharacter { dim: self.dim, values })
    }

    /// `g₁ ∘ g₂ = (g₁ ⊗ g₂)Δ⁺`.
    pub fn compose_via_delta_plus(&self, other: &PlusCharacter, rule: &RuleTable) -> Result<PlusCharacter> {
        self.check_same_support(other)?;
        let mut values = BTreeMap::new();
        for g in self.values.keys() {
            let mut v = Coefficient::zero();
            for ((a, b), c) in &delta_plus(rule, g) {
                v += &(&(c * &self.eval(rule, a)?) * &other.eval(rule, b)?);
            }
            values.insert(g.clone(), v);
        }
        Ok(PlusCharacter { dim: self.dim, values })
    }

    /// `g⁻¹` by the recursion
    /// `g⁻¹(J_k(τ)) = −Σ_ℓ (−g(X))^ℓ/ℓ! g(J_{k+ℓ}(Γ_{g⁻¹}τ))`, solved in order
    /// of increasing edge count.
    pub fn inverse(&self, rule: &RuleTable) -> Result<PlusCharacter> {
        let mut gens: Vec<&Tree> = self.values.keys().collect();
        gens.sort_by_key(|g| g.edge_count());
        let mut inv = PlusCharacter { dim: self.dim, values: BTreeMap::new() };
        let neg_x: BTreeMap<Tree, Coefficient> = x_generators(self.dim)
            .into_iter()
            .filter_map(|x| Some((x.clone(), -&self.values.get(&x)?.clone())))
            .collect();
        let neg = PlusCharacter { dim: self.dim, values: neg_x };
        for g in gens {
            let v = if g.edges().is_empty() {
                -&self.value(g)?
            } else {
                let e = &g.edges()[0];
                let inner = inv.gamma(rule, &e.child)?;
                let mut v = Coefficient::zero();
                for l in ells_below(rule, rule.planted_degree(e)) {
                    let w = &neg.x_power(&l)? * &inv_factorial(&l);
                    for (s, c) in &inner {
                        if let Some(j) = rule.graft(&e.label, &e.deco.add(&l), s) {
                            v += &(&(&w * c) * &self.eval(rule, &j)?);
                        }
                    }
                }
                -&v
            };
            inv.values.insert(g.clone(), v);
        }
        Ok(inv)
    }

    /// `g⁻¹ = g ∘ 𝒜₊`.
    pub fn inverse_via_antipode(&self, rule: &RuleTable) -> Result<PlusCharacter> {
        let mut anti = Antipode::new(rule);
        let mut values = BTreeMap::new();
        for g in self.values.keys() {
            values.insert(g.clone(), self.eval_lc(rule, &anti.apply(g))?);
        }
        Ok(PlusCharacter { dim: self.dim, values })
    }
}

/// An element `ℓ ∈ 𝒢₋`: values on finitely many negative-degree trees,
/// zero elsewhere, `ℓ(𝟏₁) = 1`, multiplicative over forests.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MinusCharacter {
    values: BTreeMap<Tree, Coefficient>,
}

impl MinusCharacter {
    pub fn new(values: impl IntoIterator<Item = (Tree, Coefficient)>) -> Self {
        MinusCharacter { values: values.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// The neutral element `𝟏₁*`: one on the empty forest, zero elsewhere.
    pub fn unit() -> Self {
        MinusCharacter::default()
    }

    pub fn support(&self) -> impl Iterator<Item = (&Tree, &Coefficient)> {
        self.values.iter()
    }

    pub fn value(&self, t: &Tree) -> Coefficient {
        self.values.get(t).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn eval_forest(&self, f: &Forest) -> Coefficient {
        let mut c = Coefficient::one();
        for t in f.trees() {
            if c.is_zero() {
                break;
            }
            c = &c * &self.value(t);
        }
        c
    }

    /// True iff the support avoids planted trees, trees with a decorated
    /// root and trees of non-negative degree.
    pub fn is_admissible(&self, rule: &RuleTable) -> bool {
        self.values
            .keys()
            .all(|t| !t.is_planted() && t.node().is_zero() && rule.degree(t).is_negative())
    }

    /// `(ℓ ⊗ ℓ̄)Δ⁻` evaluated on the negative trees of `domain` and all the
    /// trees their coproducts reach.
    pub fn convolve<'a>(
        &self,
        other: &MinusCharacter,
        rule: &RuleTable,
        domain: impl IntoIterator<Item = &'a Tree>,
    ) -> MinusCharacter {
        let dom = minus_domain(rule, domain);
        let values = dom.iter().map(|t| {
            let d = delta_minus_forest(rule, &Forest::single(t.clone()));
            let v = d.pair(|(a, b)| &self.eval_forest(a) * &other.eval_forest(b));
            (t.clone(), v)
        });
        MinusCharacter::new(values.collect::<Vec<_>>())
    }

    /// `ℓ⁻¹`, solving `(ℓ ⊗ ℓ⁻¹)Δ⁻τ = 0` for nonempty `τ` grade by grade in
    /// the number of edges; `Δ⁻τ = 𝟏₁ ⊗ τ + …` with the remaining right
    /// legs strictly smaller.
    pub fn inverse<'a>(&self, rule: &RuleTable, domain: impl IntoIterator<Item = &'a Tree>) -> MinusCharacter {
        let mut dom: Vec<Tree> = minus_domain(rule, domain).into_iter().collect();
        dom.sort_by_key(|t| t.edge_count());
        let mut inv: HashMap<Tree, Coefficient> = HashMap::new();
        let inv_forest = |inv: &HashMap<Tree, Coefficient>, f: &Forest| {
            let mut c = Coefficient::one();
            for t in f.trees() {
                c = &c * &inv.get(t).cloned().unwrap_or_else(Coefficient::zero);
            }
            c
        };
        for t in &dom {
            let mut v = Coefficient::zero();
            for ((a, b), c) in &delta_minus_forest(rule, &Forest::single(t.clone())) {
                if a.is_empty() {
                    debug_assert_eq!(b.trees(), std::slice::from_ref(t));
                    continue;
                }
                v += &(&(c * &self.eval_forest(a)) * &inv_forest(&inv, b));
            }
            inv.insert(t.clone(), -&v);
        }
        MinusCharacter::new(inv)
    }
}

/// The negative-degree trees among `trees`, closed under the right legs of
/// `Δ⁻` on `𝒯₋`.
pub fn minus_domain<'a>(rule: &RuleTable, trees: impl IntoIterator<Item = &'a Tree>) -> BTreeSet<Tree> {
    let mut out = BTreeSet::new();
    let mut work: Vec<Tree> = trees.into_iter().filter(|t| rule.degree(t).is_negative()).cloned().collect();
    while let Some(t) = work.pop() {
        if !out.insert(t.clone()) {
            continue;
        }
        for (_, b) in delta_minus_forest(rule, &Forest::single(t)).keys() {
            work.extend(b.trees().iter().filter(|u| !out.contains(*u)).cloned());
        }
    }
    out
}

/// Parses a character file: one `"<tree-expr>" = <coefficient>` per line,
/// blank lines and `#` comments ignored.
pub fn parse_character_file(src: &str, rule: &RuleTable) -> Result<Vec<(Tree, Coefficient)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in src.lines() {
        let start = offset;
        offset += line.len() + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse { pos: start, msg: msg.to_string() };
        let rest = body.strip_prefix('"').ok_or_else(|| err("expected a quoted tree expression"))?;
        let close = rest.find('"').ok_or_else(|| err("unterminated quote"))?;
        let expr = &rest[..close];
        let value = rest[close + 1..].trim().strip_prefix('=').ok_or_else(|| err("expected `=`"))?;
        let t = parse_tree(expr, rule).map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse { pos: start + pos + 1, msg },
            other => other,
        })?;
        out.push((t, Coefficient::parse(value.trim())?));
    }
    Ok(out)
}

/// Builds a [`MinusCharacter`] from a character file.
pub fn minus_character_from_file(src: &str, rule: &RuleTable) -> Result<MinusCharacter> {
    Ok(MinusCharacter::new(parse_character_file(src, rule)?))
}

/// Builds a [`PlusCharacter`] from a character file; every listed tree must
/// be a generator.
pub fn plus_character_from_file(src: &str, rule: &RuleTable) -> Result<PlusCharacter> {
    PlusCharacter::new(rule.dim(), parse_character_file(src, rule)?.into_iter().collect())
}

/// Degree of a generator, for reports.
pub fn generator_degree(rule: &RuleTable, g: &Tree) -> Rational64 {
    rule.degree(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(r: &RuleTable, s: &str) -> Tree {
        parse_tree(s, r).unwrap()
    }

    fn kpz_basis(r: &RuleTable) -> Vec<Tree> {
        let cap = MultiIndex(vec![1, 1]);
        r.generate_basis(Rational64::new(3, 2), 4, &cap, crate::RootConstraint::Strong).iter().cloned().collect()
    }

    #[test]
    fn gamma_examples() {
        let r = RuleTable::builtin("kpz").unwrap();
        let xi = tree(&r, "Xi");
        let ixi = tree(&r, "I(Xi)");
        let x1 = tree(&r, "X_1");
        let gens = plus_generators(&r, [&ixi, &x1]);
        let g = PlusCharacter::seeded(1, &gens, 3);
        assert_eq!(g.gamma(&r, &xi).unwrap(), LinComb::basis(xi.clone()));
        let h = g.value(&x1).unwrap();
        let mut want = LinComb::basis(x1.clone());
        want.add_term(Tree::one(1), h);
        assert_eq!(g.gamma(&r, &x1).unwrap(), want);
        let mut want = LinComb::basis(ixi.clone());
        want.add_term(Tree::one(1), g.value(&ixi).unwrap());
        assert_eq!(g.gamma(&r, &ixi).unwrap(), want);
        assert_eq!(g.gamma_via_delta(&r, &ixi).unwrap(), want);
        let gi = g.inverse(&r).unwrap();
        assert_eq!(gi.value(&ixi).unwrap(), -&g.value(&ixi).unwrap());
    }

    #[test]
    fn missing_generator_is_an_error() {
        let r = RuleTable::builtin("kpz").unwrap();
        let g = PlusCharacter::unit(1, &x_generators(1).into_iter().collect());
        assert!(matches!(g.gamma(&r, &tree(&r, "I(Xi)")), Err(Error::MissingGenerator(_))));
    }

    #[test]
    fn group_laws_on_kpz() {
        let r = RuleTable::builtin("kpz").unwrap();
        let basis = kpz_basis(&r);
        let gens = plus_generators(&r, &basis);
        let g = PlusCharacter::seeded(1, &gens, 1);
        let h = PlusCharacter::seeded(1, &gens, 2);
        let k = PlusCharacter::seeded(1, &gens, 3);
        let gh = g.compose(&h, &r).unwrap();
        assert_eq!(gh, g.compose_via_delta_plus(&h, &r).unwrap());
        assert_eq!(gh.compose(&k, &r).unwrap(), g.compose(&h.compose(&k, &r).unwrap(), &r).unwrap());
        let gi = g.inverse(&r).unwrap();
        assert_eq!(gi, g.inverse_via_antipode(&r).unwrap());
        let unit = PlusCharacter::unit(1, &gens);
        assert_eq!(g.compose(&gi, &r).unwrap(), unit);
        assert_eq!(gi.compose(&g, &r).unwrap(), unit);
        assert_eq!(g.compose(&unit, &r).unwrap(), g);
        for t in &basis {
            let lhs = g.gamma_lc(&r, &h.gamma(&r, t).unwrap()).unwrap();
            assert_eq!(lhs, gh.gamma(&r, t).unwrap(), "{t}");
            assert_eq!(g.gamma(&r, t).unwrap(), g.gamma_via_delta(&r, t).unwrap(), "{t}");
        }
        let x1 = tree(&r, "X_1");
        assert_eq!(gi.value(&x1).unwrap(), -&g.value(&x1).unwrap());
    }

    #[test]
    fn minus_characters() {
        let r = RuleTable::builtin("hermite").unwrap();
        let xi = |n: usize| tree(&r, &vec!["Xi"; n].join("*"));
        let l = MinusCharacter::new([(xi(2), Coefficient::constant("c").pow(2))]);
        let dom: Vec<Tree> = (1..=6).map(xi).collect();
        let ll = l.convolve(&l, &r, &dom);
        assert_eq!(ll.value(&xi(4)), &Coefficient::from_int(6) * &Coefficient::constant("c").pow(4));
        assert_eq!(l.convolve(&MinusCharacter::unit(), &r, &dom), l);
        let li = l.inverse(&r, &dom);
        assert!(l.convolve(&li, &r, &dom).support().next().is_none());
        assert!(l.is_admissible(&r));
    }

    #[test]
    fn admissibility() {
        let r = RuleTable::builtin("kpz").unwrap();
        let one = Coefficient::one();
        assert!(MinusCharacter::new([(tree(&r, "I1(Xi)*I1(Xi)"), one.clone())]).is_admissible(&r));
        assert!(!MinusCharacter::new([(tree(&r, "I(Xi)"), one.clone())]).is_admissible(&r));
        assert!(!MinusCharacter::new([(tree(&r, "X_1*I1(Xi)*I1(Xi)"), one)]).is_admissible(&r));
    }

    #[test]
    fn character_files() {
        let r = RuleTable::builtin("kpz").unwrap();
        let src = "# kpz\n\"I1(Xi)*I1(Xi)\" = c\n\n\"I1(I1(Xi)*I1(Xi))*I1(I1(Xi)*I1(Xi))\" = -3/2\n";
        let l = minus_character_from_file(src, &r).unwrap();
        assert_eq!(l.value(&tree(&r, "I1(Xi)^2".replace("^2", "*I1(Xi)").as_str())), Coefficient::constant("c"));
        assert!(parse_character_file("I(Xi) = 1", &r).is_err());
        assert!(plus_character_from_file("\"Xi*Xi\" = 1", &r).is_err());
    }
}
