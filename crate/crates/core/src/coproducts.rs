//! Coproducts on decorated trees.
//!
//! * [`delta`] — the coaction `Δ : 𝒯 → 𝒯 ⊗ 𝒯₊`, recursive in the symbols;
//! * [`delta_plus`] — the coproduct `Δ⁺` on `𝒯₊`, same recursion with the
//!   left leg projected by `Π₊`; [`Antipode`] solves for `𝒜₊`;
//! * [`delta_minus`], [`delta_minus_r`], [`delta_minus_circ`] — the
//!   extraction–contraction coproduct and its root / interior restrictions,
//!   by explicit subforest enumeration;
//! * [`delta_2`] — the root-subtree coaction with a coloured right leg;
//! * [`delta_hat_1`] and [`delta_hat_1_explicit`] — the coproduct on forests
//!   with a distinguished root, once by the symbolic recursion and once by
//!   enumeration over subforests containing every node.
//!
//! Elements of `𝒯₊` are stored as ordinary [`Tree`]s: the root carries `X^n`
//! and every edge at the root is a factor `J^𝔱_k(τ)`.

use std::collections::HashMap;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::coeff::{Coefficient, Rational};
use crate::labeled::{enumerate_subforests, extract, Budget, Labeled, Truncation, Variant};
use crate::lincomb::LinComb;
use crate::rules::RuleTable;
use crate::tree::{Edge, Forest, MultiIndex, RootedForest, Tree};

/// `𝒯 ⊗ 𝒯₊` (or `𝒯₊ ⊗ 𝒯₊`).
pub type TreePair = LinComb<(Tree, Tree)>;
/// `𝒯₋ ⊗ 𝒯`.
pub type MinusPair = LinComb<(Forest, Tree)>;
/// Pairs of forests with a distinguished root.
pub type RootedPair = LinComb<(RootedForest, RootedForest)>;

fn coeff(q: Rational) -> Coefficient {
    Coefficient::from_rational(q)
}

/// Product on both legs of `𝒯 ⊗ 𝒯`.
pub fn mul_pairs(x: &TreePair, y: &TreePair) -> TreePair {
    let mut out = LinComb::zero();
    for ((a, b), c) in x {
        for ((a2, b2), c2) in y {
            out.add_term((a.product(a2), b.product(b2)), c * c2);
        }
    }
    out
}

/// `Σ_{m ≤ n} binom(n, m) X^{n−m} ⊗ X^m`.
pub fn delta_x(n: &MultiIndex) -> TreePair {
    n.below()
        .into_iter()
        .map(|m| {
            let c = coeff(Rational::from_integer(n.binomial(&m)));
            ((Tree::x(n.checked_sub(&m).unwrap()), Tree::x(m)), c)
        })
        .collect()
}

/// Multi-indices `ℓ` with `|ℓ|_𝔰 < bound`.
pub(crate) fn ells_below(rule: &RuleTable, bound: Rational64) -> Vec<MultiIndex> {
    if bound <= Rational64::zero() {
        return Vec::new();
    }
    MultiIndex::with_scaled_size_at_most(rule.dim(), rule.s(), bound.floor().to_integer())
        .into_iter()
        .filter(|l| rule.scaled(l) < bound)
        .collect()
}

/// Multi-indices `ℓ` with `|ℓ|_𝔰 ≤ bound`.
pub(crate) fn ells_at_most(rule: &RuleTable, bound: Rational64) -> Vec<MultiIndex> {
    if bound < Rational64::zero() {
        return Vec::new();
    }
    MultiIndex::with_scaled_size_at_most(rule.dim(), rule.s(), bound.floor().to_integer())
}

pub(crate) fn inv_factorial(l: &MultiIndex) -> Coefficient {
    coeff(Rational::one() / Rational::from_integer(l.factorial()))
}

/// `Σ_ℓ X^ℓ/ℓ! ⊗ J_{k+ℓ}(τ)` over the `ℓ` with `|J_{k+ℓ}(τ)| > 0`.
fn taylor_terms(rule: &RuleTable, e: &Edge) -> TreePair {
    let mut out = LinComb::zero();
    if e.label.noise {
        return out;
    }
    for l in ells_below(rule, rule.planted_degree(e)) {
        if let Some(j) = rule.graft(&e.label, &e.deco.add(&l), &e.child) {
            out.add_term((Tree::x(l.clone()), j), inv_factorial(&l));
        }
    }
    out
}

fn delta_planted(rule: &RuleTable, e: &Edge, project_left: bool) -> TreePair {
    let dim = rule.dim();
    if e.label.noise {
        return LinComb::basis((Tree::planted(e.label.clone(), e.deco.clone(), e.child.clone()), Tree::one(dim)));
    }
    let mut out = LinComb::zero();
    for ((a, b), c) in &delta(rule, &e.child) {
        if let Some(left) = rule.graft(&e.label, &e.deco, a) {
            if project_left && !rule.planted_degree(&left.edges()[0]).is_positive() {
                continue;
            }
            out.add_term((left, b.clone()), c.clone());
        }
    }
    out.add_assign(&taylor_terms(rule, e));
    out
}

/// The coaction `Δ τ = Σ τ⁽¹⁾ ⊗ τ⁽²⁾` with right legs in `𝒯₊`.
///
/// `ΔXᵢ = Xᵢ⊗𝟏 + 𝟏⊗Xᵢ`, `ΔΞ = Ξ⊗𝟏`, multiplicative, and
/// `ΔI_k(τ) = (I_k⊗id)Δτ + Σ_ℓ X^ℓ/ℓ! ⊗ J_{k+ℓ}(τ)`.
pub fn delta(rule: &RuleTable, t: &Tree) -> TreePair {
    let (n, planted) = t.planted_decomposition();
    let mut acc = delta_x(&n);
    for p in &planted {
        acc = mul_pairs(&acc, &delta_planted(rule, &p.edges()[0], false));
    }
    acc.filter(|(a, b)| !rule.is_killed(a) && !rule.is_killed(b))
}

/// `Δ⁺` on an element of `𝒯₊`, both legs projected by `Π₊`.
pub fn delta_plus(rule: &RuleTable, s: &Tree) -> TreePair {
    let Some(s) = rule.project_plus(s) else {
        return LinComb::zero();
    };
    let (n, planted) = s.planted_decomposition();
    let mut acc = delta_x(&n);
    for p in &planted {
        acc = mul_pairs(&acc, &delta_planted(rule, &p.edges()[0], true));
    }
    acc
}

/// `Δ⁺` extended linearly.
pub fn delta_plus_lc(rule: &RuleTable, x: &LinComb<Tree>) -> TreePair {
    x.apply(|s| delta_plus(rule, s))
}

/// `ℳ₊`: multiply the two legs of a pair.
pub fn multiply_legs(x: &TreePair) -> LinComb<Tree> {
    x.map_keys(|(a, b)| Some(a.product(b)))
}

/// The antipode `𝒜₊` of `𝒯₊`, memoised per basis element.
///
/// Multiplicative, `𝒜₊Xᵢ = −Xᵢ`, and for a planted generator solved from
/// `ℳ₊(id ⊗ 𝒜₊)Δ⁺J = 0` using the `𝟏 ⊗ J` term of `Δ⁺J`.
pub struct Antipode<'r> {
    rule: &'r RuleTable,
    memo: HashMap<Tree, LinComb<Tree>>,
}

impl<'r> Antipode<'r> {
    pub fn new(rule: &'r RuleTable) -> Self {
        Antipode { rule, memo: HashMap::new() }
    }

    pub fn apply(&mut self, s: &Tree) -> LinComb<Tree> {
        let Some(s) = self.rule.project_plus(s) else {
            return LinComb::zero();
        };
        let (n, planted) = s.planted_decomposition();
        let sign = if n.0.iter().sum::<u32>() % 2 == 0 { 1 } else { -1 };
        let mut acc = LinComb::term(Tree::x(n), Coefficient::from_int(sign));
        for p in &planted {
            let a = self.generator(p);
            acc = acc.apply(|x| a.map_keys(|y| Some(x.product(y))));
        }
        acc
    }

    pub fn apply_lc(&mut self, x: &LinComb<Tree>) -> LinComb<Tree> {
        x.apply(|s| self.apply(s))
    }

    fn generator(&mut self, j: &Tree) -> LinComb<Tree> {
        if let Some(v) = self.memo.get(j) {
            return v.clone();
        }
        // 𝒜₊J = −Σ a·𝒜₊(b) over all terms a ⊗ b of Δ⁺J except 𝟏 ⊗ J
        let mut out = LinComb::zero();
        for ((a, b), c) in &delta_plus(self.rule, j) {
            if a.is_one() && b == j {
                continue;
            }
            let ab = self.apply(b).map_keys(|y| Some(a.product(y)));
            out.add_scaled(&ab, &-c);
        }
        self.memo.insert(j.clone(), out.clone());
        out
    }
}

/// Which subgraphs an extraction–contraction coproduct sums over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinusVariant {
    Full,
    Root,
    Interior,
}

fn minus_impl(rule: &RuleTable, t: &Tree, v: MinusVariant) -> MinusPair {
    let l = Labeled::from_tree(t, rule);
    let variant = match v {
        MinusVariant::Full => Variant::All,
        MinusVariant::Root => Variant::Root,
        MinusVariant::Interior => Variant::Interior,
    };
    let tr = Truncation { component: Some(Budget::below(Rational64::zero())), ..Default::default() };
    let mut out = LinComb::zero();
    for a in enumerate_subforests(&l, variant) {
        for x in extract(&l, &a, rule, &tr) {
            let left = Forest::from_trees(x.left.into_iter().map(|(_, t)| t).collect());
            let Some(left) = rule.project_minus(&left) else { continue };
            let right = x.right.into_iter().next().unwrap();
            if rule.is_killed(&right) {
                continue;
            }
            out.add_term((left, right), coeff(x.coeff));
        }
    }
    out
}

/// `Δ⁻τ`: sum over all subforests, every extracted component of negative
/// degree.
pub fn delta_minus(rule: &RuleTable, t: &Tree) -> MinusPair {
    minus_impl(rule, t, MinusVariant::Full)
}

/// `Δ⁻_r τ`: only the empty subforest or a single component at the root.
pub fn delta_minus_r(rule: &RuleTable, t: &Tree) -> MinusPair {
    minus_impl(rule, t, MinusVariant::Root)
}

/// `Δ⁻_∘ τ`: only subforests whose components avoid the root.
pub fn delta_minus_circ(rule: &RuleTable, t: &Tree) -> MinusPair {
    minus_impl(rule, t, MinusVariant::Interior)
}

pub fn delta_minus_variant(rule: &RuleTable, t: &Tree, v: MinusVariant) -> MinusPair {
    minus_impl(rule, t, v)
}

/// `Π₋ ∘ Π̃` on a single tree, as a forest of `𝒯₋` (or `None` if it
/// vanishes).
pub fn minus_project_tree(rule: &RuleTable, t: &Tree) -> Option<Forest> {
    rule.project_minus(&RuleTable::tilde_pi(&Forest::single(t.clone())))
}

/// `Δ⁻ : 𝒯₋ → 𝒯₋ ⊗ 𝒯₋`, multiplicative over the forest product.
pub fn delta_minus_forest(rule: &RuleTable, f: &Forest) -> LinComb<(Forest, Forest)> {
    let mut acc: LinComb<(Forest, Forest)> = LinComb::basis((Forest::empty(), Forest::empty()));
    for t in f.trees() {
        let d: LinComb<(Forest, Forest)> = delta_minus(rule, t).map_keys(|(a, b)| Some((a.clone(), minus_project_tree(rule, b)?)));
        let mut next = LinComb::zero();
        for ((a, b), c) in &acc {
            for ((a2, b2), c2) in &d {
                next.add_term((a.product(a2), b.product(b2)), c * c2);
            }
        }
        acc = next;
    }
    acc
}

/// `(ℳ₋ ⊗ id)(id ⊗ Δ⁻_∘)Δ⁻_r τ`.
pub fn factorised_delta_minus(rule: &RuleTable, t: &Tree) -> MinusPair {
    let mut out = LinComb::zero();
    for ((a, b), c) in &delta_minus_r(rule, t) {
        for ((a2, b2), c2) in &delta_minus_circ(rule, b) {
            out.add_term((a.product(a2), b2.clone()), c * c2);
        }
    }
    out
}

/// Which projection of `Δ₂` to keep finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delta2Part {
    /// Terms whose right leg survives `Π₊`.
    Plus,
    /// Terms whose left leg survives `Π₋ ∘ Π̃`.
    Minus,
}

/// `Δ₂τ` over root subtrees, the right leg being the contracted tree with
/// coloured root. The full sum over boundary decorations is infinite; the
/// returned sum contains exactly the terms not annihilated by the
/// projection named in `part`.
pub fn delta_2(rule: &RuleTable, t: &Tree, part: Delta2Part) -> TreePair {
    let l = Labeled::from_tree(t, rule);
    let tr = match part {
        Delta2Part::Plus => Truncation { planted_positive: true, ..Default::default() },
        Delta2Part::Minus => Truncation { component: Some(Budget::below(Rational64::zero())), ..Default::default() },
    };
    let mut out = LinComb::zero();
    if part == Delta2Part::Minus {
        // the bare root with nothing attached: Π̃ sends it to the unit
        out.add_term((Tree::one(rule.dim()), t.clone()), Coefficient::one());
    }
    for a in enumerate_subforests(&l, Variant::RootSubtree) {
        for x in extract(&l, &a, rule, &tr) {
            let left = x.left.into_iter().next().unwrap().1;
            let right = x.right.into_iter().next().unwrap();
            if part == Delta2Part::Plus && rule.project_plus(&right).is_none() {
                continue;
            }
            out.add_term((left, right), coeff(x.coeff));
        }
    }
    out
}

/// `|F|` for a forest with distinguished root: sum over all members.
pub fn rooted_degree(rule: &RuleTable, f: &RootedForest) -> Rational64 {
    rule.degree(&f.root) + rule.forest_degree(&f.others)
}

/// `Δ̂₁` by explicit enumeration over subforests containing every node,
/// truncated to left legs of degree at most `cap`.
pub fn delta_hat_1_explicit(rule: &RuleTable, x: &RootedForest, cap: Rational64) -> RootedPair {
    let mut trees = vec![x.root.clone()];
    trees.extend(x.others.trees().iter().cloned());
    let l = Labeled::from_trees(&trees, rule);
    let tr = Truncation { total: Some(Budget::at_most(cap)), ..Default::default() };
    let mut out = LinComb::zero();
    for a in enumerate_subforests(&l, Variant::RootedAllNodes) {
        for e in extract(&l, &a, rule, &tr) {
            let mut root = None;
            let mut others = Vec::new();
            for (r, t) in e.left {
                if r == l.roots[0] {
                    root = Some(t);
                } else {
                    others.push(t);
                }
            }
            let left = RootedForest { root: root.expect("ρ lies in some component"), others: Forest::from_trees(others) };
            let mut rs = e.right.into_iter();
            let right = RootedForest { root: rs.next().unwrap(), others: Forest::from_trees(rs.collect()) };
            out.add_term((left, right), coeff(e.coeff));
        }
    }
    out
}

fn star_pairs(x: &RootedPair, y: &RootedPair, keep: impl Fn(&RootedForest) -> bool) -> RootedPair {
    let mut out = LinComb::zero();
    for ((a, b), c) in x {
        for ((a2, b2), c2) in y {
            let left = a.star(a2);
            if keep(&left) {
                out.add_term((left, b.star(b2)), c * c2);
            }
        }
    }
    out
}

/// Lower bound on the left-leg degree of any term of `Δ̂₁` applied to a
/// tree: negative edges may be extracted, everything else adds `≥ 0`.
fn left_floor(rule: &RuleTable, t: &Tree) -> Rational64 {
    t.edges()
        .iter()
        .map(|e| rule.edge_degree(&e.label, &e.deco).min(Rational64::zero()) + left_floor(rule, &e.child))
        .sum()
}

/// `Δ̂₁` by the symbolic recursion
/// `Δ̂₁Xᵢ = Xᵢ⊗𝟏 + 𝟏⊗Xᵢ`, `Δ̂₁𝒞(τ) = (𝒞⊗𝒞)Δ̂₁τ`,
/// `Δ̂₁I_k(τ) = (I_k⊗id + Σ_ℓ X^ℓ/ℓ! 𝒞 ⊗ I_{k+ℓ})Δ̂₁τ`, multiplicative for ★,
/// truncated to left legs of degree at most `cap`.
pub fn delta_hat_1(rule: &RuleTable, x: &RootedForest, cap: Rational64) -> RootedPair {
    hat_1(rule, x, cap, &|_| true, None)
}

/// Lower bound on the degree of the left root contributed by a planted
/// factor: either a polynomial, or the edge over its child's left root.
fn root_floor(rule: &RuleTable, e: &Edge) -> Rational64 {
    let below: Rational64 = e.child.edges().iter().map(|c| root_floor(rule, c)).sum();
    (rule.edge_degree(&e.label, &e.deco) + below).min(Rational64::zero())
}

/// [`delta_hat_1`] restricted to terms whose extracted trees all satisfy
/// `keep`. Extracted trees are never modified once created, so terms are
/// dropped as soon as one fails; projections that kill such terms anyway
/// avoid building them.
///
/// With `root_cap`, terms whose left root ends above it are dropped too.
fn hat_1(
    rule: &RuleTable,
    x: &RootedForest,
    cap: Rational64,
    keep: &dyn Fn(&Tree) -> bool,
    root_cap: Option<Rational64>,
) -> RootedPair {
    let kept = |f: &RootedForest| f.others.trees().iter().all(keep);
    enum Factor<'a> {
        X(MultiIndex),
        Planted(&'a Edge),
        Other(&'a Tree),
    }
    let (n, _) = x.root.planted_decomposition();
    let mut factors = vec![Factor::X(n)];
    factors.extend(x.root.edges().iter().map(Factor::Planted));
    factors.extend(x.others.trees().iter().map(Factor::Other));
    let floors: Vec<Rational64> = factors
        .iter()
        .map(|f| match f {
            Factor::X(_) => Rational64::zero(),
            Factor::Planted(e) => {
                rule.edge_degree(&e.label, &e.deco).min(Rational64::zero()) + left_floor(rule, &e.child)
            }
            Factor::Other(t) => left_floor(rule, t),
        })
        .collect();
    let floor_total: Rational64 = floors.iter().copied().sum();
    let dim = rule.dim();
    let mut acc: RootedPair = LinComb::basis((RootedForest::one(dim), RootedForest::one(dim)));
    let mut floor_rest = floor_total;
    let mut root_rest: Rational64 = match root_cap {
        Some(_) => x.root.edges().iter().map(|e| root_floor(rule, e)).sum(),
        None => Rational64::zero(),
    };
    for (f, fl) in factors.iter().zip(&floors) {
        let cap_i = cap - (floor_total - fl);
        let part = match f {
            Factor::X(n) => delta_x(n)
                .map_keys(|(a, b)| Some((RootedForest::from_tree(a.clone()), RootedForest::from_tree(b.clone())))),
            Factor::Planted(e) => hat_planted(rule, e, cap_i, keep),
            Factor::Other(t) => hat_1(rule, &RootedForest::from_tree((*t).clone()), cap_i, keep, None)
                .map_keys(|(a, b)| Some((a.c_op(), b.c_op())).filter(|(a, _)| kept(a))),
        };
        floor_rest -= fl;
        if let (Factor::Planted(e), Some(_)) = (f, root_cap) {
            root_rest -= root_floor(rule, e);
        }
        acc = star_pairs(&acc, &part, |l| {
            rooted_degree(rule, l) + floor_rest <= cap
                && root_cap.map_or(true, |rc| rule.degree(&l.root) + root_rest <= rc)
        });
    }
    acc.filter(|(l, _)| rooted_degree(rule, l) <= cap)
}

fn hat_planted(rule: &RuleTable, e: &Edge, cap: Rational64, keep: &dyn Fn(&Tree) -> bool) -> RootedPair {
    let dim = rule.dim();
    let mut out = LinComb::zero();
    let edge_deg = rule.edge_degree(&e.label, &e.deco);
    let inner_cap = cap.max(cap - edge_deg);
    let inner = hat_1(rule, &RootedForest::from_tree(e.child.clone()), inner_cap, keep, None);
    for ((a, b), c) in &inner {
        let da = rooted_degree(rule, a);
        if da + edge_deg <= cap {
            let root = Tree::planted(e.label.clone(), e.deco.clone(), a.root.clone());
            out.add_term((RootedForest { root, others: a.others.clone() }, b.clone()), c.clone());
        }
        let ells = if e.label.noise { vec![MultiIndex::zero(dim)] } else { ells_at_most(rule, cap - da) };
        for l in ells {
            if da + rule.scaled(&l) > cap {
                continue;
            }
            let ca = a.c_op();
            if !ca.others.trees().iter().all(keep) {
                break;
            }
            let left = RootedForest { root: Tree::x(l.clone()), others: ca.others };
            let right = RootedForest {
                root: Tree::planted(e.label.clone(), e.deco.add(&l), b.root.clone()),
                others: b.others.clone(),
            };
            out.add_term((left, right), c * &inv_factorial(&l));
        }
    }
    out
}

/// `Π_𝔗`: keeps `(F, ρ)` only when every non-root member is a bare node.
pub fn pi_frak_t(f: &RootedForest) -> Option<Tree> {
    f.others.trees().iter().all(Tree::is_one).then(|| f.root.clone())
}

/// `(Π₋ ∘ Π̃ ∘ Π^ρ ⊗ Π^ρ) Δ̂₁ ι_ρ τ`, which must equal `Δ⁻τ`.
pub fn delta_minus_via_hat(rule: &RuleTable, t: &Tree) -> MinusPair {
    let keep = |s: &Tree| s.is_one() || (rule.degree(s).is_negative() && !rule.is_killed(s));
    // a left root that survives `Π₋∘Π̃` is `𝟏` or of negative degree
    hat_1(rule, &RootedForest::from_tree(t.clone()), Rational64::zero(), &keep, Some(Rational64::zero())).map_keys(|(a, b)| {
        let left = rule.project_minus(&RuleTable::tilde_pi(&a.forget_root()))?;
        let right = b.forget_root();
        let [right] = right.trees() else { panic!("contraction of a tree is a tree") };
        (!rule.is_killed(right)).then(|| (left, right.clone()))
    })
}

/// `(Π^ρ ∘ Π_𝔗 ⊗ Π₊ ∘ 𝒞₂ ∘ Π^ρ) Δ̂₁ ι_ρ τ`, which must equal `Δτ`.
pub fn delta_via_hat(rule: &RuleTable, t: &Tree) -> TreePair {
    let cap = rule.degree(t);
    hat_1(rule, &RootedForest::from_tree(t.clone()), cap, &Tree::is_one, None).map_keys(|(a, b)| {
        let left = pi_frak_t(a)?;
        let right = rule.project_plus(&b.root)?;
        debug_assert!(b.others.is_empty());
        (!rule.is_killed(&left)).then_some((left, right))
    })
}

/// `(id ⊗ Π₊)Δ₂ τ`, which must equal `Δτ`.
pub fn delta_via_delta_2(rule: &RuleTable, t: &Tree) -> TreePair {
    delta_2(rule, t, Delta2Part::Plus).filter(|(a, b)| !rule.is_killed(a) && !rule.is_killed(b))
}

/// `(Π₋ ∘ Π̃ ⊗ ℛ₂)Δ₂ τ`, which must equal `Δ⁻_r τ`.
pub fn delta_minus_r_via_delta_2(rule: &RuleTable, t: &Tree) -> MinusPair {
    delta_2(rule, t, Delta2Part::Minus).map_keys(|(a, b)| {
        let left = minus_project_tree(rule, a)?;
        (!rule.is_killed(b)).then(|| (left, b.clone()))
    })
}

/// `(Δ ⊗ id)Δτ` and `(id ⊗ Δ⁺)Δτ`.
pub fn comodule_sides(rule: &RuleTable, t: &Tree) -> (LinComb<(Tree, Tree, Tree)>, LinComb<(Tree, Tree, Tree)>) {
    let d = delta(rule, t);
    let mut lhs = LinComb::zero();
    let mut rhs = LinComb::zero();
    for ((a, b), c) in &d {
        for ((a1, a2), c1) in &delta(rule, a) {
            lhs.add_term((a1.clone(), a2.clone(), b.clone()), c * c1);
        }
        for ((b1, b2), c2) in &delta_plus(rule, b) {
            rhs.add_term((a.clone(), b1.clone(), b2.clone()), c * c2);
        }
    }
    (lhs, rhs)
}

/// `(Δ⁺ ⊗ id)Δ⁺σ` and `(id ⊗ Δ⁺)Δ⁺σ`.
pub fn coassociativity_plus_sides(rule: &RuleTable, s: &Tree) -> (LinComb<(Tree, Tree, Tree)>, LinComb<(Tree, Tree, Tree)>) {
    let d = delta_plus(rule, s);
    let mut lhs = LinComb::zero();
    let mut rhs = LinComb::zero();
    for ((a, b), c) in &d {
        for ((a1, a2), c1) in &delta_plus(rule, a) {
            lhs.add_term((a1.clone(), a2.clone(), b.clone()), c * c1);
        }
        for ((b1, b2), c2) in &delta_plus(rule, b) {
            rhs.add_term((a.clone(), b1.clone(), b2.clone()), c * c2);
        }
    }
    (lhs, rhs)
}

/// `(id ⊗ Δ⁺)Δ⁻_r τ` and `(Δ⁻_r ⊗ id)Δτ`.
pub fn cointeraction_sides(
    rule: &RuleTable,
    t: &Tree,
) -> (LinComb<(Forest, Tree, Tree)>, LinComb<(Forest, Tree, Tree)>) {
    let mut lhs = LinComb::zero();
    for ((f, b), c) in &delta_minus_r(rule, t) {
        for ((b1, b2), c2) in &delta(rule, b) {
            lhs.add_term((f.clone(), b1.clone(), b2.clone()), c * c2);
        }
    }
    let mut rhs = LinComb::zero();
    for ((a, b), c) in &delta(rule, t) {
        for ((f, a2), c2) in &delta_minus_r(rule, a) {
            rhs.add_term((f.clone(), a2.clone(), b.clone()), c * c2);
        }
    }
    (lhs, rhs)
}

/// `ℳ₊(id⊗𝒜₊)Δ⁺σ` and `ℳ₊(𝒜₊⊗id)Δ⁺σ`; both must equal `ε(σ)𝟏`.
pub fn antipode_sides(rule: &RuleTable, anti: &mut Antipode<'_>, s: &Tree) -> (LinComb<Tree>, LinComb<Tree>) {
    let d = delta_plus(rule, s);
    let mut lhs = LinComb::zero();
    let mut rhs = LinComb::zero();
    for ((a, b), c) in &d {
        lhs.add_scaled(&anti.apply(b).map_keys(|y| Some(a.product(y))), c);
        rhs.add_scaled(&anti.apply(a).map_keys(|y| Some(y.product(b))), c);
    }
    (lhs, rhs)
}

/// `(id⊗Δ̂₁)Δ̂₁x` and `(Δ̂₁⊗id)Δ̂₁x`, both truncated to `|a| ≤ ca`, `|b| ≤ cb`
/// on the first two legs `a ⊗ b ⊗ c`.
pub fn coassociativity_hat_sides(
    rule: &RuleTable,
    x: &RootedForest,
    ca: Rational64,
    cb: Rational64,
) -> (LinComb<(RootedForest, RootedForest, RootedForest)>, LinComb<(RootedForest, RootedForest, RootedForest)>) {
    let keep = |a: &RootedForest, b: &RootedForest| rooted_degree(rule, a) <= ca && rooted_degree(rule, b) <= cb;
    let mut lhs = LinComb::zero();
    for ((a, bc), c) in &delta_hat_1(rule, x, ca) {
        for ((b, c3), c2) in &delta_hat_1(rule, bc, cb) {
            if keep(a, b) {
                lhs.add_term((a.clone(), b.clone(), c3.clone()), c * c2);
            }
        }
    }
    let mut rhs = LinComb::zero();
    for ((ab, c3), c) in &delta_hat_1(rule, x, ca + cb) {
        for ((a, b), c2) in &delta_hat_1(rule, ab, ca) {
            if keep(a, b) {
                rhs.add_term((a.clone(), b.clone(), c3.clone()), c * c2);
            }
        }
    }
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_tree;

    fn kpz() -> RuleTable {
        RuleTable::builtin("kpz").unwrap()
    }

    fn pair(r: &RuleTable, a: &str, b: &str) -> (Tree, Tree) {
        (parse_tree(a, r).unwrap(), parse_tree(b, r).unwrap())
    }

    #[test]
    fn pruned_projections_match_full_hat_coproduct() {
        for name in ["kpz", "qua"] {
            let r = RuleTable::builtin(name).unwrap();
            let poly = MultiIndex(vec![1; r.dim() + 1]);
            for t in r.generate_basis(Rational64::new(3, 2), 4, &poly, r.default_root).iter() {
                let x = RootedForest::from_tree(t.clone());
                let minus = delta_hat_1(&r, &x, Rational64::zero()).map_keys(|(a, b)| {
                    let left = r.project_minus(&RuleTable::tilde_pi(&a.forget_root()))?;
                    let right = b.forget_root();
                    let right = right.trees()[0].clone();
                    (!r.is_killed(&right)).then_some((left, right))
                });
                assert_eq!(delta_minus_via_hat(&r, t), minus, "{}", t.text());
                let plus = delta_hat_1(&r, &x, r.degree(t)).map_keys(|(a, b)| {
                    let left = pi_frak_t(a)?;
                    let right = r.project_plus(&b.root)?;
                    (!r.is_killed(&left)).then_some((left, right))
                });
                assert_eq!(delta_via_hat(&r, t), plus, "{}", t.text());
            }
        }
    }

    #[test]
    fn delta_on_small_trees() {
        let r = kpz();
        let xi = parse_tree("Xi", &r).unwrap();
        assert_eq!(delta(&r, &xi), LinComb::basis(pair(&r, "Xi", "One")));
        let i1 = parse_tree("I1(Xi)", &r).unwrap();
        assert_eq!(delta(&r, &i1), LinComb::basis(pair(&r, "I1(Xi)", "One")));
        let i0 = parse_tree("I(Xi)", &r).unwrap();
        let expect = LinComb::basis(pair(&r, "I(Xi)", "One")).add(&LinComb::basis(pair(&r, "One", "I(Xi)")));
        assert_eq!(delta(&r, &i0), expect);
        let x1 = parse_tree("X_1", &r).unwrap();
        let expect = LinComb::basis(pair(&r, "X_1", "One")).add(&LinComb::basis(pair(&r, "One", "X_1")));
        assert_eq!(delta(&r, &x1), expect);
    }

    #[test]
    fn antipode_examples() {
        let r = kpz();
        let mut a = Antipode::new(&r);
        let x1 = parse_tree("X_1", &r).unwrap();
        assert_eq!(a.apply(&x1), LinComb::term(x1.clone(), Coefficient::from_int(-1)));
        let j = parse_tree("I(Xi)", &r).unwrap();
        assert_eq!(a.apply(&j), LinComb::term(j.clone(), Coefficient::from_int(-1)));
        assert_eq!(a.apply(&Tree::one(1)), LinComb::basis(Tree::one(1)));
    }

    #[test]
    fn delta_minus_on_noise_and_polynomials() {
        let r = kpz();
        let xi = parse_tree("Xi", &r).unwrap();
        let d = delta_minus(&r, &xi);
        assert_eq!(d.len(), 2);
        assert!(d.coefficient(&(Forest::empty(), xi.clone())).is_one());
        assert!(d.coefficient(&(Forest::single(xi.clone()), Tree::one(1))).is_one());
        let x = parse_tree("X_1", &r).unwrap();
        assert_eq!(delta_minus(&r, &x), LinComb::basis((Forest::empty(), x)));
        let t = parse_tree("I1(Xi)*I1(Xi)", &r).unwrap();
        assert!(delta_minus(&r, &t).coefficient(&(Forest::single(t.clone()), Tree::one(1))).is_one());
    }

    #[test]
    fn hermite_root_variant_is_binomial() {
        let r = RuleTable::builtin("hermite").unwrap();
        let xi = Tree::noise("Xi", 0);
        for n in 1..=5u32 {
            let mut t = Tree::one(0);
            for _ in 0..n {
                t = t.product(&xi);
            }
            let d = delta_minus_r(&r, &t);
            assert_eq!(d.len() as u32, n + 1);
            let mut k_tree = Tree::one(0);
            for k in 0..=n {
                let rest = {
                    let mut s = Tree::one(0);
                    for _ in 0..n - k {
                        s = s.product(&xi);
                    }
                    s
                };
                let left = if k == 0 { Forest::empty() } else { Forest::single(k_tree.clone()) };
                let c = d.coefficient(&(left, rest));
                let binom = (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64);
                assert_eq!(c, Coefficient::from_int(binom as i64), "n={n} k={k}");
                k_tree = k_tree.product(&xi);
            }
        }
    }

    #[test]
    fn hat_explicit_and_recursive_agree_on_small_trees() {
        let r = kpz();
        for src in ["Xi", "I(Xi)", "X_1*I1(Xi)", "I(Xi)*I1(Xi)", "I1(I(Xi)*Xi)"] {
            let t = RootedForest::from_tree(parse_tree(src, &r).unwrap());
            for cap in [Rational64::zero(), Rational64::new(3, 2)] {
                assert_eq!(delta_hat_1(&r, &t, cap), delta_hat_1_explicit(&r, &t, cap), "{src} cap {cap}");
            }
        }
    }

    #[test]
    fn hat_on_polynomials_is_binomial() {
        let r = kpz();
        let x = RootedForest::from_tree(parse_tree("X^[1,2]", &r).unwrap());
        let d = delta_hat_1(&r, &x, Rational64::from_integer(10));
        assert_eq!(d.len(), 6);
        let l = RootedForest::from_tree(parse_tree("X_1", &r).unwrap());
        let rr = RootedForest::from_tree(parse_tree("X^[1,1]", &r).unwrap());
        assert_eq!(d.coefficient(&(l, rr)), Coefficient::from_int(2));
    }
}
