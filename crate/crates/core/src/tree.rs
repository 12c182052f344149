//! Decorated rooted trees, forests and forests with a distinguished root.
//!
//! Every value is kept in canonical form: the outgoing edges of each node
//! are sorted by (edge type name, edge decoration, child), so two trees are
//! equal exactly when they are isomorphic as decorated trees.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;

/// A multi-index `k ∈ ℕ^{d+1}`, time component first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim + 1])
    }

    /// The unit vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim + 1];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Index `i` if this is the unit vector `e_i`.
    pub fn unit_position(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.0.len()).filter(|&i| self.0[i] != 0).collect();
        (nz.len() == 1 && self.0[nz[0]] == 1).then(|| nz[0])
    }

    /// Scaled size `|k|_𝔰 = Σ 𝔰ᵢ kᵢ`.
    pub fn scaled(&self, s: &[u32]) -> i64 {
        self.0.iter().zip(s).map(|(&k, &si)| k as i64 * si as i64).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other`, or `None` if some component would be negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `k! = Π kᵢ!`.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &k in &self.0 {
            for j in 2..=k {
                acc *= j;
            }
        }
        acc
    }

    /// `binom(self, m) = Π binom(selfᵢ, mᵢ)`.
    pub fn binomial(&self, m: &MultiIndex) -> BigInt {
        self.0
            .iter()
            .zip(&m.0)
            .map(|(&n, &k)| binomial(BigInt::from(n), BigInt::from(k)))
            .product()
    }

    /// All `m` with `0 ≤ m ≤ self` componentwise.
    pub fn below(&self) -> Vec<MultiIndex> {
        self.0
            .iter()
            .map(|&k| 0..=k)
            .multi_cartesian_product()
            .map(MultiIndex)
            .collect()
    }

    /// All multi-indices of length `dim + 1` with `|m|_𝔰 ≤ bound`.
    pub fn with_scaled_size_at_most(dim: usize, s: &[u32], bound: i64) -> Vec<MultiIndex> {
        fn go(s: &[u32], i: usize, budget: i64, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if i == s.len() {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            let mut k = 0u32;
            while k as i64 * s[i] as i64 <= budget {
                cur.push(k);
                go(s, i + 1, budget - k as i64 * s[i] as i64, cur, out);
                cur.pop();
                k += 1;
            }
        }
        let mut out = Vec::new();
        if bound >= 0 {
            go(&s[..dim + 1], 0, bound, &mut Vec::new(), &mut out);
        }
        out
    }

    fn text(&self) -> String {
        format!("[{}]", self.0.iter().join(","))
    }
}

/// The type of an edge as stored inside a tree: its name and whether it is a
/// noise (negative degree) or kernel (positive degree) type. Degrees live in
/// the [`crate::rules::RuleTable`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel {
    pub name: Arc<str>,
    pub noise: bool,
}

impl EdgeLabel {
    pub fn noise(name: &str) -> Self {
        EdgeLabel { name: Arc::from(name), noise: true }
    }

    pub fn kernel(name: &str) -> Self {
        EdgeLabel { name: Arc::from(name), noise: false }
    }
}

/// An outgoing edge together with the subtree it points to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub label: EdgeLabel,
    pub deco: MultiIndex,
    pub child: Tree,
}

/// A decorated rooted tree in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    node: MultiIndex,
    edges: Vec<Edge>,
}

impl Tree {
    /// Builds a tree from a root decoration and outgoing edges, sorting the
    /// edges into canonical order. Children are assumed canonical.
    pub fn new(node: MultiIndex, mut edges: Vec<Edge>) -> Self {
        edges.sort();
        Tree { node, edges }
    }

    /// The single undecorated node `𝟏`.
    pub fn one(dim: usize) -> Self {
        Tree { node: MultiIndex::zero(dim), edges: Vec::new() }
    }

    /// The single node `X^k`.
    pub fn x(k: MultiIndex) -> Self {
        Tree { node: k, edges: Vec::new() }
    }

    /// The noise symbol `Ξ_𝔩` (planted noise edge ending in a bare leaf).
    pub fn noise(name: &str, dim: usize) -> Self {
        Tree::planted(EdgeLabel::noise(name), MultiIndex::zero(dim), Tree::one(dim))
    }

    /// The planted tree `I^𝔱_k(child)` with an undecorated root.
    pub fn planted(label: EdgeLabel, deco: MultiIndex, child: Tree) -> Self {
        let dim = deco.dim();
        Tree { node: MultiIndex::zero(dim), edges: vec![Edge { label, deco, child }] }
    }

    /// Re-sorts children recursively; idempotent.
    pub fn canonicalize(&self) -> Tree {
        Tree::new(
            self.node.clone(),
            self.edges
                .iter()
                .map(|e| Edge { label: e.label.clone(), deco: e.deco.clone(), child: e.child.canonicalize() })
                .collect(),
        )
    }

    pub fn node(&self) -> &MultiIndex {
        &self.node
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn dim(&self) -> usize {
        self.node.dim()
    }

    /// Same tree with root decoration replaced.
    pub fn with_node(&self, node: MultiIndex) -> Tree {
        Tree { node, edges: self.edges.clone() }
    }

    pub fn is_one(&self) -> bool {
        self.edges.is_empty() && self.node.is_zero()
    }

    /// True for `X^k` (no edges).
    pub fn is_polynomial(&self) -> bool {
        self.edges.is_empty()
    }

    /// True if the root is undecorated and has exactly one outgoing edge.
    pub fn is_planted(&self) -> bool {
        self.node.is_zero() && self.edges.len() == 1
    }

    /// Elementary symbols: `𝟏`, `Xᵢ`, `Ξ_𝔩` and planted `I_k(τ)`.
    pub fn is_elementary(&self) -> bool {
        self.is_planted() || (self.edges.is_empty() && (self.node.is_zero() || self.node.unit_position().is_some()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| 1 + e.child.edge_count()).sum()
    }

    pub fn node_count(&self) -> usize {
        1 + self.edges.iter().map(|e| e.child.node_count()).sum::<usize>()
    }

    /// Number of noise edges, `‖τ‖`.
    pub fn noise_count(&self) -> usize {
        self.edges
            .iter()
            .map(|e| e.label.noise as usize + e.child.noise_count())
            .sum()
    }

    /// True if some node carries a nonzero decoration.
    pub fn has_x(&self) -> bool {
        !self.node.is_zero() || self.edges.iter().any(|e| e.child.has_x())
    }

    /// True if some kernel edge points to a subtree without edges,
    /// i.e. the tree contains a factor `I_k(X^m)`.
    pub fn has_kernel_of_polynomial(&self) -> bool {
        self.edges
            .iter()
            .any(|e| (!e.label.noise && e.child.is_polynomial()) || e.child.has_kernel_of_polynomial())
    }

    /// Tree product: identify roots, add root decorations.
    pub fn product(&self, other: &Tree) -> Tree {
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        edges.extend(self.edges.iter().cloned());
        edges.extend(other.edges.iter().cloned());
        Tree::new(self.node.add(&other.node), edges)
    }

    /// Multiplies the root by `X^k`.
    pub fn times_x(&self, k: &MultiIndex) -> Tree {
        Tree { node: self.node.add(k), edges: self.edges.clone() }
    }

    /// `τ = X^n · τ₁⋯τ_m` with each `τᵢ` planted.
    pub fn planted_decomposition(&self) -> (MultiIndex, Vec<Tree>) {
        let dim = self.dim();
        (
            self.node.clone(),
            self.edges
                .iter()
                .map(|e| Tree { node: MultiIndex::zero(dim), edges: vec![e.clone()] })
                .collect(),
        )
    }

    /// Canonical text form, following the expression grammar.
    pub fn text(&self) -> String {
        let mut factors = Vec::new();
        if !self.node.is_zero() {
            factors.push(x_text(&self.node));
        }
        for e in &self.edges {
            factors.push(edge_text(e));
        }
        if factors.is_empty() {
            "One".to_string()
        } else {
            factors.join("*")
        }
    }

    /// LaTeX rendering; repeated factors are written as powers.
    pub fn latex(&self) -> String {
        let mut factors = Vec::new();
        if !self.node.is_zero() {
            factors.push(match self.node.unit_position() {
                Some(i) => format!("X_{{{i}}}"),
                None => format!("X^{{({})}}", self.node.0.iter().join(",")),
            });
        }
        for (e, n) in self.edges.iter().dedup_with_count().map(|(n, e)| (e, n)) {
            let base = edge_latex(e);
            factors.push(if n == 1 { base } else { format!("{base}^{{{n}}}") });
        }
        if factors.is_empty() {
            "\\mathbf{1}".to_string()
        } else {
            factors.join(" ")
        }
    }
}

fn x_text(k: &MultiIndex) -> String {
    match k.unit_position() {
        Some(i) => format!("X_{i}"),
        None => format!("X^{}", k.text()),
    }
}

fn edge_text(e: &Edge) -> String {
    if e.label.noise && e.deco.is_zero() && e.child.is_one() {
        return e.label.name.to_string();
    }
    let deco = if e.deco.is_zero() {
        String::new()
    } else if e.deco.0 == [0, 1] {
        "1".to_string()
    } else {
        e.deco.text()
    };
    format!("{}{}({})", e.label.name, deco, e.child.text())
}

fn edge_latex(e: &Edge) -> String {
    let name = if e.label.noise {
        match e.label.name.strip_prefix("Xi") {
            Some("") => "\\Xi".to_string(),
            Some(rest) => format!("\\Xi_{{{}}}", rest.trim_start_matches('_')),
            None => format!("\\mathrm{{{}}}", e.label.name),
        }
    } else if &*e.label.name == "I" {
        "\\mathcal{I}".to_string()
    } else {
        format!("\\mathcal{{{}}}", e.label.name)
    };
    if e.label.noise && e.child.is_one() && e.deco.is_zero() {
        return name;
    }
    let sub = if e.deco.is_zero() { String::new() } else { format!("_{{({})}}", e.deco.0.iter().join(",")) };
    format!("{name}{sub}\\left({}\\right)", e.child.latex())
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// A commutative multiset of trees; the empty forest is the unit `𝟏₁`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest(Vec<Tree>);

impl Forest {
    pub fn empty() -> Self {
        Forest(Vec::new())
    }

    pub fn single(t: Tree) -> Self {
        Forest(vec![t])
    }

    pub fn from_trees(mut trees: Vec<Tree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn trees(&self) -> &[Tree] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Multiset union.
    pub fn product(&self, other: &Forest) -> Forest {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend(self.0.iter().cloned());
        v.extend(other.0.iter().cloned());
        Forest::from_trees(v)
    }

    pub fn with(&self, t: Tree) -> Forest {
        let mut v = self.0.clone();
        let pos = v.binary_search(&t).unwrap_or_else(|p| p);
        v.insert(pos, t);
        Forest(v)
    }

    pub fn edge_count(&self) -> usize {
        self.0.iter().map(Tree::edge_count).sum()
    }

    pub fn text(&self) -> String {
        format!("{{{}}}", self.0.iter().map(Tree::text).join(", "))
    }

    pub fn latex(&self) -> String {
        if self.0.is_empty() {
            "\\mathbf{1}_1".to_string()
        } else {
            self.0.iter().map(Tree::latex).join(" \\cdot ")
        }
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// A forest with a distinguished root tree: an element `T_ρ · Π 𝒞(Tᵢ)` of
/// the space 𝔉_ρ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedForest {
    pub root: Tree,
    pub others: Forest,
}

impl RootedForest {
    /// `ι_ρ τ`: the tree itself as distinguished root, nothing else.
    pub fn from_tree(t: Tree) -> Self {
        RootedForest { root: t, others: Forest::empty() }
    }

    pub fn one(dim: usize) -> Self {
        RootedForest::from_tree(Tree::one(dim))
    }

    /// The ★ product: root trees multiply, the rest is unioned.
    pub fn star(&self, other: &RootedForest) -> RootedForest {
        RootedForest { root: self.root.product(&other.root), others: self.others.product(&other.others) }
    }

    /// The symbol 𝒞: the whole root tree becomes an ordinary member and a
    /// fresh bare node becomes the distinguished root.
    pub fn c_op(&self) -> RootedForest {
        RootedForest { root: Tree::one(self.root.dim()), others: self.others.with(self.root.clone()) }
    }

    /// `Π^ρ`: forget the distinguished root.
    pub fn forget_root(&self) -> Forest {
        self.others.with(self.root.clone())
    }

    pub fn edge_count(&self) -> usize {
        self.root.edge_count() + self.others.edge_count()
    }

    pub fn text(&self) -> String {
        let mut parts = Vec::new();
        if !self.root.is_one() || self.others.is_empty() {
            parts.push(self.root.text());
        }
        parts.extend(self.others.trees().iter().map(|t| format!("C({})", t.text())));
        parts.join("*")
    }

    pub fn latex(&self) -> String {
        let mut parts = Vec::new();
        if !self.root.is_one() || self.others.is_empty() {
            parts.push(self.root.latex());
        }
        parts.extend(self.others.trees().iter().map(|t| format!("\\mathcal{{C}}\\left({}\\right)", t.latex())));
        parts.join(" ")
    }
}

impl fmt::Display for RootedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}
