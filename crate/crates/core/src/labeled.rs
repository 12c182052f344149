//! Labelled representatives of trees and forests, subforest enumeration,
//! and the generic extraction–contraction step shared by every
//! enumeration-based coproduct.
//!
//! A canonical [`Tree`] forgets node identities. To sum over subgraphs we
//! flatten it into a [`Labeled`] forest with numbered nodes and edges, pick
//! an edge set `A`, and rebuild canonical trees for the extracted
//! components and for the contracted remainder. Isomorphic configurations
//! are merged later, when the results land in a [`crate::LinComb`].

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::coeff::Rational;
use crate::rules::RuleTable;
use crate::tree::{Edge, EdgeLabel, MultiIndex, Tree};

/// An edge of a labelled forest.
#[derive(Clone, Debug)]
pub struct LEdge {
    pub parent: usize,
    pub child: usize,
    pub label: EdgeLabel,
    pub deco: MultiIndex,
}

/// A forest with numbered nodes (pre-order) and edges.
#[derive(Clone, Debug)]
pub struct Labeled {
    pub deco: Vec<MultiIndex>,
    /// Index of the edge entering each node (`None` for roots).
    pub parent_edge: Vec<Option<usize>>,
    /// Outgoing edge indices of each node.
    pub children: Vec<Vec<usize>>,
    pub edges: Vec<LEdge>,
    /// Root node of every member tree, in input order.
    pub roots: Vec<usize>,
    /// Degree of the subtree hanging below each node (node included).
    pub subtree_degree: Vec<Rational64>,
}

impl Labeled {
    pub fn from_tree(t: &Tree, rule: &RuleTable) -> Self {
        Self::from_trees(std::slice::from_ref(t), rule)
    }

    pub fn from_trees(trees: &[Tree], rule: &RuleTable) -> Self {
        let mut l = Labeled {
            deco: Vec::new(),
            parent_edge: Vec::new(),
            children: Vec::new(),
            edges: Vec::new(),
            roots: Vec::new(),
            subtree_degree: Vec::new(),
        };
        for t in trees {
            let r = l.push(t, None, rule);
            l.roots.push(r);
        }
        l
    }

    fn push(&mut self, t: &Tree, parent_edge: Option<usize>, rule: &RuleTable) -> usize {
        let v = self.deco.len();
        self.deco.push(t.node().clone());
        self.parent_edge.push(parent_edge);
        self.children.push(Vec::new());
        self.subtree_degree.push(rule.degree(t));
        for e in t.edges() {
            let ei = self.edges.len();
            self.edges.push(LEdge { parent: v, child: usize::MAX, label: e.label.clone(), deco: e.deco.clone() });
            self.children[v].push(ei);
            let c = self.push(&e.child, Some(ei), rule);
            self.edges[ei].child = c;
        }
        v
    }

    pub fn node_count(&self) -> usize {
        self.deco.len()
    }

    /// Degree of the planted tree `I^𝔱_𝔢(subtree)` hanging from edge `e`.
    pub fn planted_degree(&self, e: usize, rule: &RuleTable) -> Rational64 {
        let ed = &self.edges[e];
        rule.edge_degree(&ed.label, &ed.deco) + self.subtree_degree[ed.child]
    }
}

/// Which family of subgraphs to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `𝔄(T)`: every edge subset (components are the connected pieces).
    All,
    /// `𝔄ʳ(T)`: the empty set and single connected components containing
    /// the root of the first tree.
    Root,
    /// `𝔄∘(T)`: subsets none of whose components touches a root.
    Interior,
    /// `𝔄(F,ρ)`: every edge subset, with all nodes included; isolated
    /// nodes are singleton components.
    RootedAllNodes,
    /// `𝔄⁺(T)`: connected subtrees containing the root of the first tree
    /// (the root alone included).
    RootSubtree,
}

/// A subgraph `A` of a labelled forest: its edges and node set `N_A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subforest {
    pub edges: Vec<usize>,
    pub nodes: Vec<usize>,
}

/// Union–find over node indices, compressing paths.
fn find(comp: &mut [usize], mut x: usize) -> usize {
    while comp[x] != x {
        comp[x] = comp[comp[x]];
        x = comp[x];
    }
    x
}

/// Component representative for every node of `N_A`.
fn components(l: &Labeled, a: &Subforest) -> Vec<usize> {
    let mut comp: Vec<usize> = (0..l.node_count()).collect();
    for &e in &a.edges {
        let (p, c) = (l.edges[e].parent, l.edges[e].child);
        let (rp, rc) = (find(&mut comp, p), find(&mut comp, c));
        comp[rc] = rp;
    }
    (0..l.node_count()).map(|v| find(&mut comp, v)).collect()
}

/// Complete, duplicate-free list of subgraphs of the given variant.
pub fn enumerate_subforests(l: &Labeled, variant: Variant) -> Vec<Subforest> {
    let m = l.edges.len();
    assert!(m < 32, "subforest enumeration is limited to fewer than 32 edges");
    let mut out = Vec::new();
    let root0 = l.roots.first().copied();
    for mask in 0u32..(1u32 << m) {
        let edges: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let in_a = |e: usize| mask >> e & 1 == 1;
        let mut nodes: Vec<usize> = match variant {
            Variant::RootedAllNodes => (0..l.node_count()).collect(),
            Variant::RootSubtree => root0.into_iter().collect(),
            _ => Vec::new(),
        };
        for &e in &edges {
            nodes.push(l.edges[e].parent);
            nodes.push(l.edges[e].child);
        }
        nodes.sort_unstable();
        nodes.dedup();
        let a = Subforest { edges, nodes };
        let keep = match variant {
            Variant::All | Variant::RootedAllNodes => true,
            Variant::Root => {
                a.edges.is_empty() || {
                    let comp = components(l, &a);
                    let r = root0.expect("root variant needs a tree");
                    a.nodes.iter().all(|&v| comp[v] == comp[r]) && a.nodes.contains(&r)
                }
            }
            Variant::Interior => {
                let comp = components(l, &a);
                let touched: Vec<usize> = l.roots.iter().filter(|r| a.nodes.contains(r)).map(|&r| comp[r]).collect();
                a.nodes.iter().all(|v| !touched.contains(&comp[*v]))
            }
            Variant::RootSubtree => {
                let r = root0.expect("root-subtree variant needs a tree");
                a.edges.iter().all(|&e| {
                    let p = l.edges[e].parent;
                    p == r || l.parent_edge[p].is_some_and(&in_a)
                })
            }
        };
        if keep {
            out.push(a);
        }
    }
    out
}

/// A bound `x < limit` (strict) or `x ≤ limit`.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub limit: Rational64,
    pub strict: bool,
}

impl Budget {
    pub fn below(limit: Rational64) -> Self {
        Budget { limit, strict: true }
    }

    pub fn at_most(limit: Rational64) -> Self {
        Budget { limit, strict: false }
    }

    pub fn admits(&self, x: Rational64) -> bool {
        if self.strict {
            x < self.limit
        } else {
            x <= self.limit
        }
    }
}

/// How the infinite sum over boundary decorations `𝔢_A` is cut down.
#[derive(Clone, Copy, Debug, Default)]
pub struct Truncation {
    /// Bound on the degree of every extracted component.
    pub component: Option<Budget>,
    /// Bound on the total degree of the extracted forest.
    pub total: Option<Budget>,
    /// Require `|I_{𝔢+𝔢_A}(subtree)| > 0` on every boundary edge.
    pub planted_positive: bool,
}

/// One term of an extraction–contraction sum.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub coeff: Rational,
    /// Extracted components, each with the labelled node it is rooted at.
    pub left: Vec<(usize, Tree)>,
    /// Contracted trees, one per input tree and in input order.
    pub right: Vec<Tree>,
}

/// Runs the extraction–contraction formula for a fixed subgraph `a`,
/// summing over node splits `0 ≤ 𝔫_A ≤ 𝔫` and boundary decorations `𝔢_A`
/// on kernel edges outside `A` whose parent lies in `N_A`.
pub fn extract(l: &Labeled, a: &Subforest, rule: &RuleTable, tr: &Truncation) -> Vec<Extraction> {
    let dim = rule.dim();
    let comp = components(l, a);
    let mut in_a = vec![false; l.edges.len()];
    for &e in &a.edges {
        in_a[e] = true;
    }
    let mut in_nodes = vec![false; l.node_count()];
    for &v in &a.nodes {
        in_nodes[v] = true;
    }
    // distinct components in order of first node, with their roots
    let mut groups: Vec<usize> = Vec::new();
    for &v in &a.nodes {
        if !groups.contains(&comp[v]) {
            groups.push(comp[v]);
        }
    }
    let gindex = |v: usize| groups.iter().position(|&g| g == comp[v]).unwrap();
    let group_root: Vec<usize> = groups
        .iter()
        .map(|&g| {
            *a.nodes
                .iter()
                .find(|&&v| comp[v] == g && l.parent_edge[v].is_none_or(|e| !in_a[e]))
                .expect("every component has a root")
        })
        .collect();
    let boundary: Vec<usize> = (0..l.edges.len())
        .filter(|&e| !in_a[e] && !l.edges[e].label.noise && in_nodes[l.edges[e].parent])
        .collect();
    let mut edge_degree_by_group = vec![Rational64::zero(); groups.len()];
    for &e in &a.edges {
        edge_degree_by_group[gindex(l.edges[e].parent)] += rule.edge_degree(&l.edges[e].label, &l.edges[e].deco);
    }

    let splits: Vec<Vec<MultiIndex>> = a.nodes.iter().map(|&v| l.deco[v].below()).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; a.nodes.len()];
    loop {
        let n_a: Vec<&MultiIndex> = idx.iter().enumerate().map(|(i, &j)| &splits[i][j]).collect();
        let mut base = edge_degree_by_group.clone();
        for (i, &v) in a.nodes.iter().enumerate() {
            base[gindex(v)] += rule.scaled(n_a[i]);
        }
        let total: Rational64 = base.iter().copied().sum();
        let feasible = tr.component.is_none_or(|b| base.iter().all(|&d| b.admits(d)))
            && tr.total.is_none_or(|b| b.admits(total));
        if feasible {
            let mut assign = vec![MultiIndex::zero(dim); boundary.len()];
            let mut ctx = DecoSearch {
                l,
                rule,
                tr,
                boundary: &boundary,
                group_of_edge: boundary.iter().map(|&e| gindex(l.edges[e].parent)).collect(),
                base: &base,
                used: vec![Rational64::zero(); groups.len()],
                total,
                found: Vec::new(),
            };
            ctx.search(0, &mut assign);
            for e_a in ctx.found {
                out.push(build_term(l, a, rule, &comp, &in_a, &group_root, &boundary, &n_a, &e_a));
            }
        }
        // advance the odometer over node splits
        let mut i = 0;
        loop {
            if i == idx.len() {
                return out;
            }
            idx[i] += 1;
            if idx[i] < splits[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

struct DecoSearch<'a> {
    l: &'a Labeled,
    rule: &'a RuleTable,
    tr: &'a Truncation,
    boundary: &'a [usize],
    group_of_edge: Vec<usize>,
    base: &'a [Rational64],
    used: Vec<Rational64>,
    total: Rational64,
    found: Vec<Vec<MultiIndex>>,
}

impl DecoSearch<'_> {
    fn search(&mut self, i: usize, assign: &mut Vec<MultiIndex>) {
        if i == self.boundary.len() {
            self.found.push(assign.clone());
            return;
        }
        let g = self.group_of_edge[i];
        // loose integer bound on |𝔢_A(e)|_𝔰, refined exactly below
        let mut bound: Option<Rational64> = None;
        let mut tighten = |b: Rational64| bound = Some(bound.map_or(b, |x: Rational64| x.min(b)));
        if let Some(b) = self.tr.component {
            tighten(b.limit - self.base[g] - self.used[g]);
        }
        if let Some(b) = self.tr.total {
            tighten(b.limit - self.total);
        }
        if self.tr.planted_positive {
            tighten(self.l.planted_degree(self.boundary[i], self.rule));
        }
        let bound = bound.expect("boundary decorations need a truncation");
        if bound < Rational64::zero() {
            return;
        }
        let cands = MultiIndex::with_scaled_size_at_most(self.rule.dim(), self.rule.s(), bound.floor().to_integer());
        for m in cands {
            let sm = self.rule.scaled(&m);
            let ok = self.tr.component.is_none_or(|b| b.admits(self.base[g] + self.used[g] + sm))
                && self.tr.total.is_none_or(|b| b.admits(self.total + sm))
                && (!self.tr.planted_positive
                    || (self.l.planted_degree(self.boundary[i], self.rule) - sm) > Rational64::zero());
            if !ok {
                continue;
            }
            self.used[g] += sm;
            self.total += sm;
            assign[i] = m;
            self.search(i + 1, assign);
            self.used[g] -= sm;
            self.total -= sm;
        }
        assign[i] = MultiIndex::zero(self.rule.dim());
    }
}

#[allow(clippy::too_many_arguments)]
fn build_term(
    l: &Labeled,
    a: &Subforest,
    rule: &RuleTable,
    comp: &[usize],
    in_a: &[bool],
    group_root: &[usize],
    boundary: &[usize],
    n_a: &[&MultiIndex],
    e_a: &[MultiIndex],
) -> Extraction {
    let dim = rule.dim();
    let zero = MultiIndex::zero(dim);
    let mut coeff = Rational::one();
    for m in e_a {
        coeff /= Rational::from_integer(m.factorial());
    }
    let mut node_split = vec![None; l.node_count()];
    for (i, &v) in a.nodes.iter().enumerate() {
        coeff *= Rational::from_integer(l.deco[v].binomial(n_a[i]));
        node_split[v] = Some(n_a[i].clone());
    }
    let mut extra = vec![None; l.edges.len()];
    for (i, &e) in boundary.iter().enumerate() {
        extra[e] = Some(e_a[i].clone());
    }
    debug_assert!(coeff > Rational::from_integer(BigInt::zero()));

    // extracted components: node decorations 𝔫_A + π𝔢_A, edges of A
    let left = group_root
        .iter()
        .map(|&r| {
            fn go(
                v: usize,
                l: &Labeled,
                in_a: &[bool],
                node_split: &[Option<MultiIndex>],
                extra: &[Option<MultiIndex>],
            ) -> Tree {
                let mut d = node_split[v].clone().unwrap();
                let mut edges = Vec::new();
                for &e in &l.children[v] {
                    if in_a[e] {
                        let ed = &l.edges[e];
                        edges.push(Edge {
                            label: ed.label.clone(),
                            deco: ed.deco.clone(),
                            child: go(ed.child, l, in_a, node_split, extra),
                        });
                    } else if let Some(m) = &extra[e] {
                        d = d.add(m);
                    }
                }
                Tree::new(d, edges)
            }
            (r, go(r, l, in_a, &node_split, &extra))
        })
        .collect();

    // contracted forest: each component collapses onto its root
    let rep: Vec<usize> = (0..l.node_count())
        .map(|v| match node_split[v] {
            Some(_) => *group_root.iter().find(|&&r| comp[r] == comp[v]).unwrap(),
            None => v,
        })
        .collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); l.node_count()];
    for v in 0..l.node_count() {
        members[rep[v]].push(v);
    }
    fn contract(
        r: usize,
        l: &Labeled,
        in_a: &[bool],
        members: &[Vec<usize>],
        rep: &[usize],
        node_split: &[Option<MultiIndex>],
        extra: &[Option<MultiIndex>],
        zero: &MultiIndex,
    ) -> Tree {
        let mut d = zero.clone();
        let mut edges = Vec::new();
        for &v in &members[r] {
            let taken = node_split[v].as_ref().unwrap_or(zero);
            d = d.add(&l.deco[v].checked_sub(taken).expect("split below decoration"));
            for &e in &l.children[v] {
                if in_a[e] {
                    continue;
                }
                let ed = &l.edges[e];
                let deco = match &extra[e] {
                    Some(m) => ed.deco.add(m),
                    None => ed.deco.clone(),
                };
                edges.push(Edge {
                    label: ed.label.clone(),
                    deco,
                    child: contract(rep[ed.child], l, in_a, members, rep, node_split, extra, zero),
                });
            }
        }
        Tree::new(d, edges)
    }
    let right = l
        .roots
        .iter()
        .map(|&r| contract(rep[r], l, in_a, &members, &rep, &node_split, &extra, &zero))
        .collect();
    Extraction { coeff, left, right }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_tree;

    fn count(rule: &str, src: &str, v: Variant) -> usize {
        let r = RuleTable::builtin(rule).unwrap();
        let t = parse_tree(src, &r).unwrap();
        enumerate_subforests(&Labeled::from_tree(&t, &r), v).len()
    }

    #[test]
    fn root_variant_on_noise_stars() {
        for (n, src) in [(1, "Xi"), (2, "Xi*Xi"), (3, "Xi*Xi*Xi"), (4, "Xi*Xi*Xi*Xi")] {
            assert_eq!(count("hermite", src, Variant::Root), 1 << n);
        }
    }

    #[test]
    fn interior_and_root_subtree_on_planted_noise() {
        let r = RuleTable::builtin("kpz").unwrap();
        let t = parse_tree("I(Xi)", &r).unwrap();
        let l = Labeled::from_tree(&t, &r);
        let interior = enumerate_subforests(&l, Variant::Interior);
        assert_eq!(interior.len(), 2);
        assert!(interior[0].edges.is_empty());
        assert!(l.edges[interior[1].edges[0]].label.noise);
        // root alone, root plus kernel edge, whole tree
        assert_eq!(count("kpz", "I(Xi)", Variant::RootSubtree), 3);
        assert_eq!(count("kpz", "I(Xi)", Variant::All), 4);
        assert_eq!(count("kpz", "I(Xi)", Variant::RootedAllNodes), 4);
    }

    #[test]
    fn extraction_of_whole_tree_has_unit_coefficient() {
        let r = RuleTable::builtin("kpz").unwrap();
        let t = parse_tree("I1(Xi)*I1(Xi)", &r).unwrap();
        let l = Labeled::from_tree(&t, &r);
        let all = Subforest { edges: (0..l.edges.len()).collect(), nodes: (0..l.node_count()).collect() };
        let tr = Truncation { component: Some(Budget::below(Rational64::zero())), ..Default::default() };
        let terms = extract(&l, &all, &r, &tr);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].left[0].1, t);
        assert!(terms[0].right[0].is_one());
        assert_eq!(terms[0].coeff, Rational::one());
    }

    #[test]
    fn node_splits_carry_binomials() {
        let r = RuleTable::builtin("hermite").unwrap();
        let t = parse_tree("X^[2]*Xi", &r).unwrap();
        let l = Labeled::from_tree(&t, &r);
        let a = Subforest { edges: vec![0], nodes: vec![0, 1] };
        let tr = Truncation { total: Some(Budget::at_most(Rational64::from_integer(5))), ..Default::default() };
        let coeffs: Vec<_> = extract(&l, &a, &r, &tr).into_iter().map(|x| x.coeff).collect();
        assert_eq!(coeffs, vec![Rational::one(), Rational::from_integer(2.into()), Rational::one()]);
    }
}
