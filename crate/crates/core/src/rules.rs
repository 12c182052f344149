//! Rule tables: edge types and degrees, the node-type rule, basis
//! generation under explicit caps, and the quotient projections `Π₊`,
//! `Π₋` and `Π̃`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use itertools::Itertools;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::tree::{Edge, EdgeLabel, Forest, MultiIndex, Tree};

/// Space-time scaling `𝔰` on `ℝ^{d+1}`, time component first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaling {
    pub dim: usize,
    pub s: Vec<u32>,
}

/// An edge type with its degree; noise types have negative degree,
/// kernel types positive degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeType {
    pub name: Arc<str>,
    pub noise: bool,
    pub degree: Rational64,
}

/// A node type: sorted multiset of outgoing `(edge type, decoration)` pairs.
pub type NodeType = Vec<(Arc<str>, MultiIndex)>;

/// Which constraint the root of a tree must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootConstraint {
    /// The root's node type must be admitted by the rule of some type
    /// (strongly conforming trees, the basis of `𝒯`).
    Strong,
    /// No constraint on the product at the root (the convention for `𝒯₊`).
    Free,
}

/// A rule table together with the degree assignment it is used with.
#[derive(Clone, Debug)]
pub struct RuleTable {
    pub scaling: Scaling,
    pub types: Vec<EdgeType>,
    /// Admitted node types at the end of an edge of each kernel type.
    pub rules: BTreeMap<Arc<str>, BTreeSet<NodeType>>,
    /// Whether arbitrary `X^k` factors are admitted at every node.
    pub poly_absorbing: bool,
    /// Whether `I(τ)` vanishes whenever `τ` is a polynomial.
    pub kill_kernel_of_polynomial: bool,
    /// Root constraint used when none is given explicitly.
    pub default_root: RootConstraint,
    degrees: HashMap<Arc<str>, Rational64>,
}

impl RuleTable {
    pub fn dim(&self) -> usize {
        self.scaling.dim
    }

    pub fn s(&self) -> &[u32] {
        &self.scaling.s
    }

    pub fn edge_type(&self, name: &str) -> Option<&EdgeType> {
        self.types.iter().find(|t| &*t.name == name)
    }

    pub fn label(&self, name: &str) -> Result<EdgeLabel> {
        let t = self.edge_type(name).ok_or_else(|| Error::UnknownType(name.to_string()))?;
        Ok(EdgeLabel { name: t.name.clone(), noise: t.noise })
    }

    pub fn noise_types(&self) -> impl Iterator<Item = &EdgeType> {
        self.types.iter().filter(|t| t.noise)
    }

    pub fn kernel_types(&self) -> impl Iterator<Item = &EdgeType> {
        self.types.iter().filter(|t| !t.noise)
    }

    pub fn type_degree(&self, name: &str) -> Rational64 {
        match self.degrees.get(name) {
            Some(d) => *d,
            None => panic!("edge type `{name}` is not declared in the rule table"),
        }
    }

    /// Scaled size of a multi-index as a rational.
    pub fn scaled(&self, k: &MultiIndex) -> Rational64 {
        Rational64::from_integer(k.scaled(self.s()))
    }

    /// Degree of an edge `e`: `|𝔱(e)| − |𝔢(e)|`.
    pub fn edge_degree(&self, label: &EdgeLabel, deco: &MultiIndex) -> Rational64 {
        self.type_degree(&label.name) - self.scaled(deco)
    }

    /// Degree `|T|_𝔰`; panics on undeclared types (use [`Self::try_degree`]
    /// for unvalidated input).
    pub fn degree(&self, t: &Tree) -> Rational64 {
        let mut d = self.scaled(t.node());
        for e in t.edges() {
            d += self.edge_degree(&e.label, &e.deco) + self.degree(&e.child);
        }
        d
    }

    pub fn try_degree(&self, t: &Tree) -> Result<Rational64> {
        self.validate(t)?;
        Ok(self.degree(t))
    }

    pub fn forest_degree(&self, f: &Forest) -> Rational64 {
        f.trees().iter().map(|t| self.degree(t)).sum()
    }

    /// `|Σ cᵢτᵢ| = minᵢ |τᵢ|`, with `None` standing for `+∞` on zero.
    pub fn min_degree(&self, x: &LinComb<Tree>) -> Option<Rational64> {
        x.keys().map(|t| self.degree(t)).min()
    }

    /// Checks that all edge types are declared, decorations have the right
    /// length and noise edges end in bare leaves with zero decoration.
    pub fn validate(&self, t: &Tree) -> Result<()> {
        let n = self.dim() + 1;
        if t.node().len() != n {
            return Err(Error::Arity { got: t.node().0.clone(), expected: n });
        }
        for e in t.edges() {
            let ty = self.edge_type(&e.label.name).ok_or_else(|| Error::UnknownType(e.label.name.to_string()))?;
            if ty.noise != e.label.noise {
                return Err(Error::Invalid(format!("edge `{}` has the wrong kind", e.label.name)));
            }
            if e.deco.len() != n {
                return Err(Error::Arity { got: e.deco.0.clone(), expected: n });
            }
            if ty.noise && (!e.deco.is_zero() || !e.child.is_one()) {
                return Err(Error::Invalid(format!(
                    "noise edge `{}` must carry no decoration and end in a bare leaf",
                    e.label.name
                )));
            }
            self.validate(&e.child)?;
        }
        Ok(())
    }

    fn node_type(t: &Tree) -> NodeType {
        t.edges().iter().map(|e| (e.label.name.clone(), e.deco.clone())).collect()
    }

    fn node_ok(&self, allowed: &BTreeSet<NodeType>, t: &Tree) -> bool {
        (self.poly_absorbing || t.node().is_zero()) && allowed.contains(&Self::node_type(t))
    }

    fn conforms_below(&self, t: &Tree) -> bool {
        t.edges().iter().all(|e| {
            let ok = if e.label.noise {
                e.child.is_one()
            } else {
                self.rules.get(&e.label.name).is_some_and(|allowed| self.node_ok(allowed, &e.child))
            };
            ok && self.conforms_below(&e.child)
        })
    }

    /// Node types admissible at a strongly conforming root.
    pub fn root_types(&self) -> BTreeSet<NodeType> {
        let mut out: BTreeSet<NodeType> = self.rules.values().flatten().cloned().collect();
        if self.noise_types().next().is_some() {
            out.insert(Vec::new());
        }
        out
    }

    /// Whether every node's outgoing multiset (ignoring `X` factors when
    /// `poly_absorbing`) is admitted; the root follows `root`.
    pub fn conforms(&self, t: &Tree, root: RootConstraint) -> Result<bool> {
        self.validate(t)?;
        let root_ok = match root {
            RootConstraint::Free => self.poly_absorbing || t.node().is_zero(),
            RootConstraint::Strong => self.node_ok(&self.root_types(), t),
        };
        Ok(root_ok && self.conforms_below(t))
    }

    /// True if the tree is zero in the quotient where `I(polynomial) = 0`.
    pub fn is_killed(&self, t: &Tree) -> bool {
        self.kill_kernel_of_polynomial && t.has_kernel_of_polynomial()
    }

    /// `I^𝔱_k(τ)` as a planted tree, or `None` if it vanishes.
    pub fn graft(&self, label: &EdgeLabel, deco: &MultiIndex, child: &Tree) -> Option<Tree> {
        if self.kill_kernel_of_polynomial && !label.noise && child.is_polynomial() {
            return None;
        }
        Some(Tree::planted(label.clone(), deco.clone(), child.clone()))
    }

    /// Degree of the planted factor `J^𝔱_k(τ)`, i.e. `|I^𝔱_k(τ)|_𝔰`.
    pub fn planted_degree(&self, e: &Edge) -> Rational64 {
        self.edge_degree(&e.label, &e.deco) + self.degree(&e.child)
    }

    /// `Π₊` on one tree of `𝒯̂₊`: kills it if some planted factor at the
    /// root has non-positive degree (noise factors always do).
    pub fn project_plus(&self, t: &Tree) -> Option<Tree> {
        let ok = t.edges().iter().all(|e| !e.label.noise && self.planted_degree(e).is_positive());
        (ok && !self.is_killed(t)).then(|| t.clone())
    }

    pub fn project_plus_lc(&self, x: &LinComb<Tree>) -> LinComb<Tree> {
        x.map_keys(|t| self.project_plus(t))
    }

    /// `Π₋`: kills forests containing a tree of non-negative degree.
    pub fn project_minus(&self, f: &Forest) -> Option<Forest> {
        let ok = f.trees().iter().all(|t| self.degree(t).is_negative() && !self.is_killed(t));
        ok.then(|| f.clone())
    }

    /// `Π̃`: removes bare single-node trees.
    pub fn tilde_pi(f: &Forest) -> Forest {
        Forest::from_trees(f.trees().iter().filter(|t| !t.is_one()).cloned().collect())
    }

    /// All conforming canonical trees with at most `edge_cap` edges, degree
    /// at most `degree_cap` and node decorations bounded by `poly_cap`,
    /// sorted by edge count and then canonically.
    pub fn generate_basis(
        &self,
        degree_cap: Rational64,
        edge_cap: usize,
        poly_cap: &MultiIndex,
        root: RootConstraint,
    ) -> Basis {
        let mut gen = Generator { rule: self, memo: HashMap::new() };
        let root_types: BTreeSet<NodeType> = match root {
            RootConstraint::Strong => self.root_types(),
            RootConstraint::Free => self.free_root_types(edge_cap),
        };
        // skeletons carry no polynomial decorations; those are distributed
        // afterwards within the remaining degree budget
        let decos = if self.poly_absorbing { poly_cap.below() } else { vec![MultiIndex::zero(self.dim())] };
        let mut trees: Vec<Tree> = Vec::new();
        for sk in gen.with_types(&root_types, edge_cap) {
            let room = degree_cap - self.degree(&sk);
            if room < Rational64::from_integer(0) {
                continue;
            }
            for (t, _) in self.decorate(&sk, &decos, room) {
                if !self.is_killed(&t) {
                    trees.push(t);
                }
            }
        }
        trees.sort_by(|a, b| a.edge_count().cmp(&b.edge_count()).then_with(|| a.cmp(b)));
        trees.dedup();
        Basis { trees }
    }

    /// All ways of adding node decorations from `decos` to `t` with total
    /// scaled size at most `room`, paired with the size used.
    fn decorate(&self, t: &Tree, decos: &[MultiIndex], room: Rational64) -> Vec<(Tree, Rational64)> {
        let mut out = Vec::new();
        for d in decos {
            let used = self.scaled(d);
            if used > room {
                continue;
            }
            let mut partial: Vec<(Vec<Edge>, Rational64)> = vec![(Vec::new(), used)];
            for e in t.edges() {
                if e.label.noise {
                    for (edges, _) in &mut partial {
                        edges.push(e.clone());
                    }
                    continue;
                }
                let mut next = Vec::new();
                for (edges, u) in &partial {
                    for (c, cu) in self.decorate(&e.child, decos, room - u) {
                        let mut es = edges.clone();
                        es.push(Edge { label: e.label.clone(), deco: e.deco.clone(), child: c });
                        next.push((es, u + cu));
                    }
                }
                partial = next;
            }
            for (edges, u) in partial {
                out.push((Tree::new(t.node().add(d), edges), u));
            }
        }
        out
    }

    /// Every multiset of at most `n` items drawn from the edge alphabet.
    fn free_root_types(&self, n: usize) -> BTreeSet<NodeType> {
        let mut alphabet: BTreeSet<(Arc<str>, MultiIndex)> = self.rules.values().flatten().flatten().cloned().collect();
        for t in self.noise_types() {
            alphabet.insert((t.name.clone(), MultiIndex::zero(self.dim())));
        }
        let alphabet: Vec<_> = alphabet.into_iter().collect();
        let mut out = BTreeSet::new();
        for m in 0..=n {
            for combo in (0..alphabet.len()).combinations_with_replacement(m) {
                out.insert(combo.into_iter().map(|i| alphabet[i].clone()).collect());
            }
        }
        out
    }

    /// Checks the normality condition: admitted node types are closed under
    /// taking sub-multisets (the empty type may be absent when
    /// `I(polynomial)` is killed).
    pub fn check_normal(&self) -> Result<()> {
        for (k, set) in &self.rules {
            for nt in set {
                for m in 0..nt.len() {
                    for sub in nt.iter().cloned().combinations(m) {
                        if sub.is_empty() && self.kill_kernel_of_polynomial {
                            continue;
                        }
                        if !set.contains(&sub) {
                            return Err(Error::Rule(format!(
                                "rule for `{k}` is not normal: missing sub-multiset {}",
                                node_type_text(&sub)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Parses a rule file (see the crate documentation for the grammar).
    pub fn parse(src: &str) -> Result<RuleTable> {
        parse_rule_file(src)
    }

    /// One of the built-in rules: `kpz`, `kpz-bar`, `gkpz`, `qua` (alias
    /// `phi43`) or `hermite`.
    pub fn builtin(name: &str) -> Option<RuleTable> {
        builtin_source(name).map(|src| RuleTable::parse(&src).expect("built-in rule must load"))
    }

    /// The source text of the rule as a rule file.
    pub fn to_source(&self) -> String {
        let mut out = format!("dim = {}\nscaling = {}\n", self.dim(), self.s().iter().join(" "));
        for t in &self.types {
            let d = if t.degree.is_integer() { t.degree.numer().to_string() } else { t.degree.to_string() };
            out.push_str(&format!("{} {} degree {}\n", if t.noise { "noise" } else { "kernel" }, t.name, d));
        }
        for (k, set) in &self.rules {
            out.push_str(&format!("rule {k} : {}\n", set.iter().map(|nt| node_type_text(nt)).join(" ")));
        }
        if self.kill_kernel_of_polynomial {
            out.push_str("option kill_kernel_of_polynomial\n");
        }
        if self.default_root == RootConstraint::Free {
            out.push_str("option free_root\n");
        }
        out
    }
}

fn node_type_text(nt: &NodeType) -> String {
    let mut items = nt.iter().map(|(n, k)| {
        if k.is_zero() {
            n.to_string()
        } else {
            format!("{n}[{}]", k.0.iter().join(","))
        }
    });
    format!("({})", items.join(","))
}

struct Generator<'a> {
    rule: &'a RuleTable,
    memo: HashMap<(Arc<str>, usize), Vec<Tree>>,
}

impl Generator<'_> {
    /// Conforming subtrees sitting at the end of a kernel edge of type `k`.
    fn below_kernel(&mut self, k: &Arc<str>, budget: usize) -> Vec<Tree> {
        if let Some(v) = self.memo.get(&(k.clone(), budget)) {
            return v.clone();
        }
        let allowed = self.rule.rules.get(k).cloned().unwrap_or_default();
        let out = self.with_types(&allowed, budget);
        self.memo.insert((k.clone(), budget), out.clone());
        out
    }

    fn with_types(&mut self, allowed: &BTreeSet<NodeType>, budget: usize) -> Vec<Tree> {
        let mut out = BTreeSet::new();
        for nt in allowed {
            if nt.len() > budget {
                continue;
            }
            let mut partial = Vec::new();
            self.fill(nt, 0, budget, &mut Vec::new(), &mut partial);
            for edges in partial {
                out.insert(Tree::new(MultiIndex::zero(self.rule.dim()), edges));
            }
        }
        out.into_iter().collect()
    }

    fn fill(&mut self, nt: &NodeType, i: usize, budget: usize, cur: &mut Vec<Edge>, out: &mut Vec<Vec<Edge>>) {
        if i == nt.len() {
            out.push(cur.clone());
            return;
        }
        let remaining_items = nt.len() - i - 1;
        let (name, deco) = &nt[i];
        let ty = self.rule.edge_type(name).expect("rule items are validated at load time");
        let label = EdgeLabel { name: ty.name.clone(), noise: ty.noise };
        if ty.noise {
            cur.push(Edge { label, deco: deco.clone(), child: Tree::one(self.rule.dim()) });
            self.fill(nt, i + 1, budget - 1, cur, out);
            cur.pop();
            return;
        }
        let child_budget = budget - 1 - remaining_items;
        let children = self.below_kernel(&ty.name, child_budget);
        // identical consecutive items take children in non-decreasing order
        let floor = (i > 0 && nt[i - 1] == nt[i]).then(|| cur[i - 1].child.clone());
        for c in children {
            if floor.as_ref().is_some_and(|f| &c < f) {
                continue;
            }
            let used = 1 + c.edge_count();
            cur.push(Edge { label: label.clone(), deco: deco.clone(), child: c });
            self.fill(nt, i + 1, budget - used, cur, out);
            cur.pop();
        }
    }
}

/// A finite, duplicate-free list of conforming trees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Basis {
    pub trees: Vec<Tree>,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Tree> {
        self.trees.iter()
    }

    pub fn contains(&self, t: &Tree) -> bool {
        self.trees.contains(t)
    }

    /// Basis elements grouped by degree, ascending.
    pub fn by_degree(&self, rule: &RuleTable) -> BTreeMap<Rational64, Vec<Tree>> {
        let mut out: BTreeMap<Rational64, Vec<Tree>> = BTreeMap::new();
        for t in &self.trees {
            out.entry(rule.degree(t)).or_default().push(t.clone());
        }
        out
    }
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::Rule(format!("invalid rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(n, d))
}

fn parse_midx(s: &str, dim: usize) -> Result<MultiIndex> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Rule(format!("invalid multi-index `{s}`")))?;
    let v = inner
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Rule(format!("invalid multi-index `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != dim + 1 {
        return Err(Error::Arity { got: v, expected: dim + 1 });
    }
    Ok(MultiIndex(v))
}

fn parse_rule_file(src: &str) -> Result<RuleTable> {
    let mut dim: Option<usize> = None;
    let mut s: Option<Vec<u32>> = None;
    let mut types: Vec<EdgeType> = Vec::new();
    let mut raw_rules: Vec<(String, String)> = Vec::new();
    let mut kill = false;
    let mut free_root = false;
    for (lineno, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::Rule(format!("line {}: {m}", lineno + 1));
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "dim" => {
                let v = line.split_once('=').ok_or_else(|| err("expected `dim = <int>`"))?.1.trim();
                dim = Some(v.parse().map_err(|_| err("invalid dimension"))?);
            }
            "scaling" => {
                let v = line.split_once('=').ok_or_else(|| err("expected `scaling = …`"))?.1;
                let v = v
                    .split_whitespace()
                    .map(|x| x.parse::<u32>().map_err(|_| err("invalid scaling entry")))
                    .collect::<Result<Vec<_>>>()?;
                s = Some(v);
            }
            "noise" | "kernel" => {
                if words.len() != 4 || words[2] != "degree" {
                    return Err(err("expected `<noise|kernel> <name> degree <rational>`"));
                }
                let degree = parse_rational(words[3])?;
                let noise = words[0] == "noise";
                if degree.is_zero() || (noise != degree.is_negative()) {
                    return Err(err("noise types need negative degree, kernel types positive degree"));
                }
                if types.iter().any(|t| &*t.name == words[1]) {
                    return Err(err("duplicate type name"));
                }
                if !words[1].chars().all(|c| c.is_alphanumeric() || c == '_')
                    || !words[1].starts_with(|c: char| c.is_alphabetic())
                {
                    return Err(err("invalid type name"));
                }
                types.push(EdgeType { name: Arc::from(words[1]), noise, degree });
            }
            "rule" => {
                let rest = line["rule".len()..].trim();
                let (k, nts) = rest.split_once(':').ok_or_else(|| err("expected `rule <kernel> : …`"))?;
                raw_rules.push((k.trim().to_string(), nts.trim().to_string()));
            }
            "option" => match words.get(1).copied() {
                Some("kill_kernel_of_polynomial") => kill = true,
                Some("free_root") => free_root = true,
                _ => return Err(err("unknown option")),
            },
            _ => return Err(err("unrecognised line")),
        }
    }
    let dim = dim.ok_or_else(|| Error::Rule("missing `dim`".into()))?;
    let s = s.ok_or_else(|| Error::Rule("missing `scaling`".into()))?;
    if s.len() != dim + 1 || s.iter().any(|&x| x == 0) {
        return Err(Error::Rule("scaling must have dim+1 positive entries".into()));
    }
    let lookup = |name: &str| -> Result<(Arc<str>, MultiIndex)> {
        let (base, deco) = match name.find('[') {
            Some(p) => (&name[..p], parse_midx(&name[p..], dim)?),
            None => (name, MultiIndex::zero(dim)),
        };
        if let Some(t) = types.iter().find(|t| &*t.name == base) {
            if t.noise && !deco.is_zero() {
                return Err(Error::Rule(format!("noise item `{name}` cannot carry a decoration")));
            }
            return Ok((t.name.clone(), deco));
        }
        // `I1` stands for `I[0,1]` in one spatial dimension
        if dim == 1 && !name.contains('[') {
            if let Some(stem) = base.strip_suffix('1') {
                if let Some(t) = types.iter().find(|t| &*t.name == stem && !t.noise) {
                    return Ok((t.name.clone(), MultiIndex(vec![0, 1])));
                }
            }
        }
        Err(Error::UnknownType(base.to_string()))
    };
    let mut rules: BTreeMap<Arc<str>, BTreeSet<NodeType>> = BTreeMap::new();
    for (k, nts) in raw_rules {
        let kt = types
            .iter()
            .find(|t| *t.name == *k && !t.noise)
            .ok_or_else(|| Error::Rule(format!("`rule {k}` does not name a kernel type")))?;
        let set = rules.entry(kt.name.clone()).or_default();
        let mut rest = nts.as_str();
        while !rest.trim().is_empty() {
            let r = rest.trim_start();
            if !r.starts_with('(') {
                return Err(Error::Rule(format!("expected `(` in node types for `{k}`")));
            }
            let mut depth = 0;
            let mut end = None;
            for (i, c) in r.char_indices() {
                match c {
                    '[' => depth += 1,
                    ']' => depth -= 1,
                    ')' if depth == 0 => {
                        end = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            let end = end.ok_or_else(|| Error::Rule(format!("unterminated node type for `{k}`")))?;
            let inner = r[1..end].trim();
            let mut nt: NodeType = Vec::new();
            if !inner.is_empty() {
                let mut items = Vec::new();
                let mut depth = 0;
                let mut start = 0;
                for (i, c) in inner.char_indices() {
                    match c {
                        '[' => depth += 1,
                        ']' => depth -= 1,
                        ',' if depth == 0 => {
                            items.push(inner[start..i].trim());
                            start = i + 1;
                        }
                        _ => {}
                    }
                }
                items.push(inner[start..].trim());
                for it in items {
                    nt.push(lookup(it)?);
                }
            }
            nt.sort();
            set.insert(nt);
            rest = &r[end + 1..];
        }
    }
    let degrees = types.iter().map(|t| (t.name.clone(), t.degree)).collect();
    let table = RuleTable {
        scaling: Scaling { dim, s },
        types,
        rules,
        poly_absorbing: true,
        kill_kernel_of_polynomial: kill,
        default_root: if free_root { RootConstraint::Free } else { RootConstraint::Strong },
        degrees,
    };
    table.check_normal()?;
    Ok(table)
}

/// Largest number of plain `I` edges listed per node type in the built-in
/// generalised KPZ rule (`[J]_ℓ` for `ℓ ≤` this bound).
pub const GKPZ_MAX_PLAIN: usize = 8;

/// Source text of a built-in rule.
pub fn builtin_source(name: &str) -> Option<String> {
    let src = match name {
        "kpz" => "dim = 1\nscaling = 2 1\nnoise Xi degree -151/100\nkernel I degree 2\n\
                  rule I : () (Xi) (I[0,1]) (I[0,1],I[0,1])\n"
            .to_string(),
        "kpz-bar" => "dim = 1\nscaling = 2 1\nnoise Xi degree -151/100\nkernel I degree 2\n\
                      rule I : (Xi) (I[0,1]) (I[0,1],I[0,1])\noption kill_kernel_of_polynomial\n"
            .to_string(),
        "gkpz" => {
            let mut types = Vec::new();
            for l in 0..=GKPZ_MAX_PLAIN {
                let plain = std::iter::repeat("I").take(l).collect::<Vec<_>>();
                for extra in [&[][..], &["I[0,1]"][..], &["I[0,1]", "I[0,1]"][..], &["Xi"][..]] {
                    let mut items = plain.clone();
                    items.extend_from_slice(extra);
                    types.push(format!("({})", items.join(",")));
                }
            }
            format!(
                "dim = 1\nscaling = 2 1\nnoise Xi degree -151/100\nkernel I degree 2\nrule I : {}\n",
                types.join(" ")
            )
        }
        "qua" | "phi43" => "dim = 3\nscaling = 2 1 1 1\nnoise Xi degree -251/100\nkernel I degree 2\n\
                            rule I : () (Xi) (I) (I,I) (I,I,I)\n"
            .to_string(),
        "hermite" => "dim = 0\nscaling = 1\nnoise Xi degree -1/2\noption free_root\n".to_string(),
        _ => return None,
    };
    Some(src)
}

/// Names accepted by [`RuleTable::builtin`].
pub const BUILTIN_RULES: &[&str] = &["kpz", "kpz-bar", "gkpz", "qua", "hermite"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::EdgeLabel;

    fn kpz() -> RuleTable {
        RuleTable::builtin("kpz").unwrap()
    }

    fn xi(dim: usize) -> Tree {
        Tree::noise("Xi", dim)
    }

    fn i(k: &[u32], t: Tree) -> Tree {
        Tree::planted(EdgeLabel::kernel("I"), MultiIndex(k.to_vec()), t)
    }

    #[test]
    fn builtins_load_and_are_normal() {
        for name in BUILTIN_RULES {
            let r = RuleTable::builtin(name).unwrap();
            r.check_normal().unwrap();
            let again = RuleTable::parse(&r.to_source()).unwrap();
            assert_eq!(again.rules, r.rules);
        }
    }

    #[test]
    fn kpz_degrees() {
        let r = kpz();
        assert_eq!(r.degree(&Tree::x(MultiIndex(vec![1, 0]))), Rational64::from_integer(2));
        let t = i(&[0, 1], xi(1));
        assert_eq!(r.degree(&t), Rational64::new(-51, 100));
        assert_eq!(r.degree(&t.product(&t)), Rational64::new(-51, 50));
    }

    #[test]
    fn conformance_examples() {
        let r = kpz();
        let t = i(&[0, 1], xi(1));
        assert!(r.conforms(&t.product(&t), RootConstraint::Strong).unwrap());
        assert!(!r.conforms(&i(&[0, 0], xi(1).product(&xi(1))), RootConstraint::Free).unwrap());
        let q = RuleTable::builtin("qua").unwrap();
        let ix = i(&[0, 0, 0, 0], xi(3));
        let t = i(&[0, 0, 0, 0], ix.product(&ix).product(&ix));
        assert!(q.conforms(&t, RootConstraint::Strong).unwrap());
    }

    #[test]
    fn hermite_basis() {
        let r = RuleTable::builtin("hermite").unwrap();
        let b = r.generate_basis(Rational64::from_integer(100), 3, &MultiIndex(vec![0]), r.default_root);
        let texts: Vec<String> = b.iter().map(|t| t.text()).collect();
        assert_eq!(texts, ["One", "Xi", "Xi*Xi", "Xi*Xi*Xi"]);
    }

    #[test]
    fn kpz_small_basis() {
        let r = kpz();
        let b = r.generate_basis(Rational64::zero(), 2, &MultiIndex(vec![0, 0]), RootConstraint::Free);
        let xi1 = xi(1);
        let i1 = i(&[0, 1], xi1.clone());
        assert!(b.contains(&xi1) && b.contains(&i1));
        assert!(!b.contains(&i(&[0, 0], xi1.clone()).product(&i(&[0, 0], xi1))));
        let b4 = r.generate_basis(Rational64::zero(), 4, &MultiIndex(vec![0, 0]), RootConstraint::Strong);
        assert!(b4.contains(&i1.product(&i1)));
    }

    #[test]
    fn edge_cap_zero_gives_polynomials() {
        let r = kpz();
        let b = r.generate_basis(Rational64::from_integer(2), 0, &MultiIndex(vec![1, 2]), RootConstraint::Strong);
        let texts: Vec<String> = b.iter().map(|t| t.text()).collect();
        assert_eq!(texts, ["One", "X_1", "X^[0,2]", "X_0"]);
    }

    #[test]
    fn basis_is_monotone_in_caps() {
        let r = kpz();
        let z = MultiIndex(vec![0, 1]);
        let small = r.generate_basis(Rational64::zero(), 3, &z, RootConstraint::Strong);
        let big = r.generate_basis(Rational64::from_integer(1), 5, &z, RootConstraint::Strong);
        assert!(small.iter().all(|t| big.contains(t)));
    }

    #[test]
    fn normality_closure_on_basis() {
        let r = RuleTable::builtin("gkpz").unwrap();
        let b = r.generate_basis(Rational64::from_integer(3), 5, &MultiIndex(vec![0, 0]), RootConstraint::Strong);
        fn prune_all(t: &Tree) -> Vec<Tree> {
            // drop any single outgoing edge at any node
            let mut out = Vec::new();
            for j in 0..t.edges().len() {
                let mut es = t.edges().to_vec();
                es.remove(j);
                out.push(Tree::new(t.node().clone(), es));
                for c in prune_all(&t.edges()[j].child) {
                    let mut es = t.edges().to_vec();
                    es[j].child = c;
                    out.push(Tree::new(t.node().clone(), es));
                }
            }
            out
        }
        for t in b.iter() {
            for p in prune_all(t) {
                assert!(r.conforms(&p, RootConstraint::Strong).unwrap(), "{}", p);
            }
        }
    }

    #[test]
    fn projections() {
        let r = kpz();
        let j1 = i(&[0, 1], xi(1));
        assert!(r.project_plus(&j1).is_none());
        let j = i(&[0, 0], xi(1));
        assert_eq!(r.project_plus(&j), Some(j.clone()));
        let x = Tree::x(MultiIndex(vec![0, 3]));
        assert_eq!(r.project_plus(&x), Some(x.clone()));
        assert!(r.project_minus(&Forest::single(Tree::x(MultiIndex(vec![0, 1])))).is_none());
        let f = Forest::from_trees(vec![Tree::one(1), xi(1).product(&xi(1))]);
        assert_eq!(RuleTable::tilde_pi(&f), Forest::single(xi(1).product(&xi(1))));
        let q = RuleTable::builtin("qua").unwrap();
        let ix = i(&[0, 0, 0, 0], xi(3));
        let f = Forest::from_trees(vec![ix.product(&ix), xi(3)]);
        assert_eq!(q.project_minus(&f).is_some(), q.degree(&ix.product(&ix)) < Rational64::zero());
    }

    #[test]
    fn rejects_bad_rule_files() {
        assert!(RuleTable::parse("dim = 1\nscaling = 2\n").is_err());
        assert!(RuleTable::parse("dim = 0\nscaling = 1\nnoise Xi degree 1\n").is_err());
        assert!(RuleTable::parse("dim = 0\nscaling = 1\nkernel I degree 2\nrule I : (I)\n").is_err());
        assert!(RuleTable::parse("dim = 0\nscaling = 1\nkernel I degree 2\nrule I : (J)\n").is_err());
    }
}
