//! Finite formal linear combinations with [`Coefficient`] coefficients.
//!
//! Basis elements are any ordered key: trees, forests, rooted forests or
//! tuples of these for tensor products. Mixing different kinds inside one
//! tensor leg is ruled out by the type system.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use crate::coeff::Coefficient;
use crate::tree::{Forest, RootedForest, Tree};

/// Basis elements that can be rendered leg by leg.
pub trait BasisElement: Ord + Clone {
    fn legs(&self) -> Vec<String>;
    fn legs_latex(&self) -> Vec<String>;
}

impl BasisElement for Tree {
    fn legs(&self) -> Vec<String> {
        vec![self.text()]
    }
    fn legs_latex(&self) -> Vec<String> {
        vec![self.latex()]
    }
}

impl BasisElement for Forest {
    fn legs(&self) -> Vec<String> {
        vec![self.text()]
    }
    fn legs_latex(&self) -> Vec<String> {
        vec![self.latex()]
    }
}

impl BasisElement for RootedForest {
    fn legs(&self) -> Vec<String> {
        vec![self.text()]
    }
    fn legs_latex(&self) -> Vec<String> {
        vec![self.latex()]
    }
}

impl<A: BasisElement, B: BasisElement> BasisElement for (A, B) {
    fn legs(&self) -> Vec<String> {
        let mut v = self.0.legs();
        v.extend(self.1.legs());
        v
    }
    fn legs_latex(&self) -> Vec<String> {
        let mut v = self.0.legs_latex();
        v.extend(self.1.legs_latex());
        v
    }
}

impl<A: BasisElement, B: BasisElement, C: BasisElement> BasisElement for (A, B, C) {
    fn legs(&self) -> Vec<String> {
        let mut v = self.0.legs();
        v.extend(self.1.legs());
        v.extend(self.2.legs());
        v
    }
    fn legs_latex(&self) -> Vec<String> {
        let mut v = self.0.legs_latex();
        v.extend(self.1.legs_latex());
        v.extend(self.2.legs_latex());
        v
    }
}

/// A finite linear combination `Σ cᵢ bᵢ`; zero coefficients never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Coefficient>,
}

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(k: K, c: Coefficient) -> Self {
        let mut out = Self::zero();
        out.add_term(k, c);
        out
    }

    /// The basis element with coefficient 1.
    pub fn basis(k: K) -> Self {
        Self::term(k, Coefficient::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, Coefficient> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn coefficient(&self, k: &K) -> Coefficient {
        self.terms.get(k).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, k: K, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb<K>, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn add_assign(&mut self, other: &LinComb<K>) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn add(&self, other: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &LinComb<K>) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(other, &Coefficient::from_int(-1));
        out
    }

    pub fn scale(&self, c: &Coefficient) -> LinComb<K> {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> LinComb<K> {
        self.scale(&Coefficient::from_int(-1))
    }

    /// Extends a basis-level map linearly.
    pub fn apply<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> LinComb<K2>) -> LinComb<K2> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    /// Fallible version of [`LinComb::apply`].
    pub fn try_apply<K2: Ord + Clone, E>(
        &self,
        mut f: impl FnMut(&K) -> Result<LinComb<K2>, E>,
    ) -> Result<LinComb<K2>, E> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k)?, c);
        }
        Ok(out)
    }

    /// Maps basis elements one-to-one (or to nothing).
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Option<K2>) -> LinComb<K2> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            if let Some(k2) = f(k) {
                out.add_term(k2, c.clone());
            }
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> LinComb<K> {
        LinComb {
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    /// Pairs every basis element with a scalar and sums.
    pub fn pair(&self, mut f: impl FnMut(&K) -> Coefficient) -> Coefficient {
        let mut acc = Coefficient::zero();
        for (k, c) in &self.terms {
            let v = f(k);
            if !v.is_zero() {
                acc += &(c * &v);
            }
        }
        acc
    }

    /// `Σ aᵢ bⱼ (xᵢ ⊗ yⱼ)`.
    pub fn tensor<K2: Ord + Clone>(&self, other: &LinComb<K2>) -> LinComb<(K, K2)> {
        let mut out = LinComb::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term((a.clone(), b.clone()), ca * cb);
            }
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Coefficient)> for LinComb<K> {
    fn from_iter<I: IntoIterator<Item = (K, Coefficient)>>(iter: I) -> Self {
        let mut out = LinComb::zero();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

impl<'a, K: Ord> IntoIterator for &'a LinComb<K> {
    type Item = (&'a K, &'a Coefficient);
    type IntoIter = btree_map::Iter<'a, K, Coefficient>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<K: BasisElement> LinComb<K> {
    /// Human-readable text: `c1*a ⊗ b + …`, or `0`.
    pub fn text(&self) -> String {
        render_sum(self, |k| k.legs().join(" ⊗ "), false)
    }

    pub fn latex(&self) -> String {
        render_sum(self, |k| k.legs_latex().join(" \\otimes "), true)
    }

    /// Line-oriented serialization with one `term` block per basis element
    /// and one `leg` line per tensor factor, in canonical order.
    pub fn structured(&self) -> String {
        let legs = self.terms.keys().next().map_or(0, |k| k.legs().len());
        let mut out = format!("lincomb legs={} terms={}\n", legs, self.terms.len());
        for (k, c) in &self.terms {
            out.push_str(&format!("term {c}\n"));
            for leg in k.legs() {
                out.push_str(&format!("  leg {leg}\n"));
            }
        }
        out
    }
}

fn render_sum<K: Ord>(lc: &LinComb<K>, mut key: impl FnMut(&K) -> String, latex: bool) -> String {
    if lc.terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, c)) in lc.terms.iter().enumerate() {
        let body = key(k);
        let (neg, mag) = match c.as_rational() {
            Some(q) if q < num_traits::Zero::zero() => (true, Coefficient::from_rational(-q)),
            _ => {
                let single_neg = !c.is_compound()
                    && c.terms().next().is_some_and(|(_, q)| *q < num_traits::Zero::zero());
                if single_neg {
                    (true, -c)
                } else {
                    (false, c.clone())
                }
            }
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let cs = if latex { mag.to_latex() } else { mag.to_string() };
        if mag.is_one() {
            out.push_str(&body);
        } else if mag.is_compound() {
            out.push_str(&if latex { format!("\\left({cs}\\right) {body}") } else { format!("({cs})*{body}") });
        } else {
            out.push_str(&if latex { format!("{cs} {body}") } else { format!("{cs}*{body}") });
        }
    }
    out
}

impl<K: BasisElement> fmt::Display for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Tree;

    #[test]
    fn cancellation_gives_zero() {
        let t = Tree::noise("Xi", 0);
        let a = LinComb::term(t.clone(), Coefficient::from_int(2));
        let b = LinComb::term(t, Coefficient::from_int(-2));
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn tensor_with_unit() {
        let t = Tree::noise("Xi", 0);
        let one = Tree::one(0);
        let x = LinComb::basis(t.clone()).tensor(&LinComb::basis(one.clone()));
        assert_eq!(x.len(), 1);
        assert_eq!(x.coefficient(&(t, one)), Coefficient::one());
    }

    #[test]
    fn scaling_distributes() {
        let t = Tree::noise("Xi", 0);
        let s = Tree::one(0);
        let c1 = Coefficient::constant("C1");
        let sum = LinComb::basis(t.clone()).add(&LinComb::basis(s.clone()));
        let lhs = sum.scale(&c1);
        let rhs = LinComb::term(t, c1.clone()).add(&LinComb::term(s, c1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn text_rendering() {
        let xi = Tree::noise("Xi", 0);
        let x2 = xi.product(&xi);
        let c = Coefficient::constant("c");
        let lc = LinComb::basis(x2).add(&LinComb::term(Tree::one(0), -&c.pow(2)));
        assert_eq!(lc.text(), "-c^2*One + Xi*Xi");
        assert!(lc.structured().starts_with("lincomb legs=1 terms=2\n"));
    }
}
