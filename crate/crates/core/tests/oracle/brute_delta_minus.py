#!/usr/bin/env python3
"""Brute-force extraction-contraction oracle.

Independent of the Rust engine: trees are nested tuples, every edge subset
of a labelled representative is enumerated, and node/edge decoration splits
are summed explicitly. The output uses the engine's structured LinComb
format so fixtures can be compared byte for byte.

Tree  = (node_deco, edges)        node_deco: tuple of ints
Edge  = (name, noise, deco, child)

Usage: brute_delta_minus.py <outdir>
"""

import itertools
import sys
from fractions import Fraction
from math import comb, factorial
from pathlib import Path


class Config:
    def __init__(self, dim, s, degrees, noises):
        self.dim = dim
        self.s = s
        self.degrees = degrees
        self.noises = noises

    def zero(self):
        return (0,) * (self.dim + 1)

    def scaled(self, k):
        return sum(a * b for a, b in zip(k, self.s))


def canon(node, edges):
    return (tuple(node), tuple(sorted(edges)))


def one(cfg):
    return canon(cfg.zero(), [])


def noise(cfg, name="Xi"):
    return canon(cfg.zero(), [(name, True, cfg.zero(), one(cfg))])


def kernel(cfg, child, deco=None, name="I"):
    return canon(cfg.zero(), [(name, False, tuple(deco or cfg.zero()), child)])


def product(*trees):
    node = tuple(map(sum, zip(*[t[0] for t in trees])))
    return canon(node, [e for t in trees for e in t[1]])


def degree(cfg, t):
    d = Fraction(cfg.scaled(t[0]))
    for name, _, deco, child in t[1]:
        d += cfg.degrees[name] - cfg.scaled(deco) + degree(cfg, child)
    return d


# ---------------------------------------------------------------- rendering

def midx_text(k):
    return "[" + ",".join(map(str, k)) + "]"


def tree_text(t):
    node, edges = t
    parts = []
    if any(node):
        nz = [i for i, v in enumerate(node) if v]
        if len(nz) == 1 and node[nz[0]] == 1:
            parts.append(f"X_{nz[0]}")
        else:
            parts.append("X^" + midx_text(node))
    for name, is_noise, deco, child in edges:
        if is_noise and not any(deco) and child == (tuple(0 for _ in child[0]), ()):
            parts.append(name)
            continue
        if not any(deco):
            d = ""
        elif tuple(deco) == (0, 1):
            d = "1"
        else:
            d = midx_text(deco)
        parts.append(f"{name}{d}({tree_text(child)})")
    return "*".join(parts) if parts else "One"


def forest_text(f):
    return "{" + ", ".join(tree_text(t) for t in f) + "}"


def frac_text(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def poly_text(p):
    """p: dict monomial -> Fraction; monomial = tuple of (name, exp)."""
    items = sorted((m, q) for m, q in p.items() if q != 0)
    if not items:
        return "0"
    out = ""
    for i, (m, q) in enumerate(items):
        neg = q < 0
        if i == 0:
            out += "-" if neg else ""
        else:
            out += " - " if neg else " + "
        a = abs(q)
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)
        if not m:
            out += frac_text(a)
        elif a == 1:
            out += mono
        else:
            out += f"{frac_text(a)}*{mono}"
    return out


def structured(terms, legs_of):
    """terms: dict key -> coefficient text provider (already sorted keys)."""
    keys = sorted(terms)
    legs = len(legs_of(keys[0])) if keys else 0
    out = f"lincomb legs={legs} terms={len(keys)}\n"
    for k in keys:
        out += f"term {terms[k]}\n"
        for leg in legs_of(k):
            out += f"  leg {leg}\n"
    return out


# ------------------------------------------------------------- enumeration

def flatten(t):
    """Returns nodes (deco list), parent list, and edge list
    (parent, child, name, noise, deco) for a labelled representative."""
    decos, parents, edges = [], [], []

    def go(tree, parent, via):
        idx = len(decos)
        decos.append(tree[0])
        parents.append(parent)
        if parent is not None:
            edges.append((parent, idx) + via)
        for name, is_noise, deco, child in tree[1]:
            go(child, idx, (name, is_noise, deco))

    go(t, None, None)
    return decos, parents, edges


def below(k):
    return itertools.product(*[range(v + 1) for v in k])


def midx_upto(cfg, budget):
    """All multi-indices m with |m|_s <= budget (budget may be fractional)."""
    ranges = [range(int(budget // si) + 1) if budget >= 0 else range(0) for si in cfg.s]
    return [m for m in itertools.product(*ranges) if cfg.scaled(m) <= budget]


def build(cfg, root, node_deco, children_of):
    kids = [(name, nz, tuple(deco), build(cfg, c, node_deco, children_of))
            for (c, name, nz, deco) in children_of.get(root, [])]
    return canon(node_deco[root], kids)


def delta_minus(cfg, t):
    decos, parents, edges = flatten(t)
    n_nodes = len(decos)
    result = {}
    for mask in range(1 << len(edges)):
        chosen = [e for i, e in enumerate(edges) if mask >> i & 1]
        if not chosen:
            result.setdefault((tuple(), t), Fraction(0))
            result[(tuple(), t)] += 1
            continue
        # connected components of the chosen edges
        comp = list(range(n_nodes))

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        for p, c, *_ in chosen:
            comp[find(c)] = find(p)
        in_a = set()
        for p, c, *_ in chosen:
            in_a.add(p)
            in_a.add(c)
        groups = {}
        for v in sorted(in_a):
            groups.setdefault(find(v), []).append(v)
        chosen_set = set((p, c) for p, c, *_ in chosen)
        boundary = [e for e in edges
                    if (e[0], e[1]) not in chosen_set and e[0] in in_a and not e[3]]
        nodes_a = sorted(in_a)
        for split in itertools.product(*[list(below(decos[v])) for v in nodes_a]):
            n_a = dict(zip(nodes_a, split))
            # base degree of each component
            base = {}
            for g, members in groups.items():
                d = Fraction(0)
                for p, c, name, _, deco in chosen:
                    if find(p) == g:
                        d += cfg.degrees[name] - cfg.scaled(deco)
                for v in members:
                    d += cfg.scaled(n_a[v])
                base[g] = d
            if any(b >= 0 for b in base.values()) and not boundary:
                continue
            # enumerate boundary decorations component by component
            per_comp = {}
            for g in groups:
                bes = [e for e in boundary if find(e[0]) == g]
                options = []
                budget = -base[g]
                if budget <= 0:
                    options = []
                else:
                    cands = [m for m in midx_upto(cfg, budget) if cfg.scaled(m) < budget]
                    for combo in itertools.product(cands, repeat=len(bes)):
                        if sum(cfg.scaled(m) for m in combo) < budget:
                            options.append(list(zip(bes, combo)))
                per_comp[g] = options
            if any(not opts for opts in per_comp.values()):
                continue
            for choice in itertools.product(*per_comp.values()):
                e_a = {}
                for part in choice:
                    for e, m in part:
                        e_a[(e[0], e[1])] = m
                coef = Fraction(1)
                for m in e_a.values():
                    for x in m:
                        coef /= factorial(x)
                for v in nodes_a:
                    for a, b in zip(decos[v], n_a[v]):
                        coef *= comb(a, b)
                # left leg
                left_deco = {}
                for v in nodes_a:
                    d = list(n_a[v])
                    for (p, c), m in e_a.items():
                        if p == v:
                            d = [x + y for x, y in zip(d, m)]
                    left_deco[v] = tuple(d)
                kids = {}
                for p, c, name, nz, deco in chosen:
                    kids.setdefault(p, []).append((c, name, nz, deco))
                left = []
                for g, members in groups.items():
                    root = [v for v in members
                            if parents[v] is None or (parents[v], v) not in chosen_set][0]
                    left.append(build(cfg, root, left_deco, kids))
                # right leg: contract every component onto its root
                rep = {}
                for g, members in groups.items():
                    root = [v for v in members
                            if parents[v] is None or (parents[v], v) not in chosen_set][0]
                    for v in members:
                        rep[v] = root
                right_deco = {}
                for v in range(n_nodes):
                    r = rep.get(v, v)
                    base_d = right_deco.get(r, tuple(0 for _ in decos[v]))
                    rem = tuple(a - b for a, b in zip(decos[v], n_a.get(v, tuple(0 for _ in decos[v]))))
                    right_deco[r] = tuple(x + y for x, y in zip(base_d, rem))
                rkids = {}
                for p, c, name, nz, deco in edges:
                    if (p, c) in chosen_set:
                        continue
                    m = e_a.get((p, c), tuple(0 for _ in deco))
                    rkids.setdefault(rep.get(p, p), []).append(
                        (rep.get(c, c), name, nz, tuple(x + y for x, y in zip(deco, m))))
                right = build(cfg, 0 if 0 not in rep else rep[0], right_deco, rkids)
                key = (tuple(sorted(left)), right)
                result[key] = result.get(key, Fraction(0)) + coef
    return {k: v for k, v in result.items() if v != 0}


def render_delta(res):
    terms = {k: frac_text(v) for k, v in res.items()}
    return structured(terms, lambda k: [forest_text(k[0]), tree_text(k[1])])


def symbolic_m(cfg, res):
    """(ℓ ⊗ id) applied to Δ⁻ with ℓ a generic character: every negative,
    non-planted tree without polynomial decorations gets its own constant
    `l{<tree>}`."""

    def supported(t):
        def has_x(u):
            return any(u[0]) or any(has_x(e[3]) for e in u[1])
        planted = not any(t[0]) and len(t[1]) == 1
        return degree(cfg, t) < 0 and not planted and not has_x(t)

    out = {}
    for (forest, right), coef in res.items():
        if not all(supported(t) for t in forest):
            continue
        mono = {}
        for t in forest:
            name = "l{" + tree_text(t) + "}"
            mono[name] = mono.get(name, 0) + 1
        m = tuple(sorted(mono.items()))
        poly = out.setdefault(right, {})
        poly[m] = poly.get(m, Fraction(0)) + coef
    terms = {k: poly_text(p) for k, p in out.items() if any(q != 0 for q in p.values())}
    return structured(terms, lambda k: [tree_text(k)])


def main():
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    hermite = Config(0, (1,), {"Xi": Fraction(-1, 2)}, {"Xi"})
    x = noise(hermite)
    xi4 = product(x, x, x, x)
    (outdir / "delta_minus_hermite_xi4.txt").write_text(render_delta(delta_minus(hermite, xi4)))

    gkpz = Config(1, (2, 1), {"Xi": Fraction(-151, 100), "I": Fraction(2)}, {"Xi"})
    g = noise(gkpz)
    tau = kernel(gkpz, product(kernel(gkpz, product(kernel(gkpz, g), g)), g))
    res = delta_minus(gkpz, tau)
    (outdir / "delta_minus_gkpz_counterexample.txt").write_text(render_delta(res))
    (outdir / "m_generic_gkpz_counterexample.txt").write_text(symbolic_m(gkpz, res))


if __name__ == "__main__":
    main()
