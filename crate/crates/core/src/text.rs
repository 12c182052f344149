//! Textual syntax for trees and rooted forests.
//!
//! ```text
//! expr   := factor { ['*'] factor }
//! factor := 'One' | 'Xi' ['_' name] | 'X' ['^' midx | '_' digit]
//!         | name [midx] '(' expr ')' | 'C' '(' expr ')'
//! midx   := '[' int { ',' int } ']'
//! ```
//!
//! In one spatial dimension `I1(…)` abbreviates `I[0,1](…)`. Whitespace is
//! insignificant and `*` between factors is optional.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::rules::RuleTable;
use crate::tree::{MultiIndex, RootedForest, Tree};

/// Byte range in the source string.
pub type Span = Range<usize>;

/// One factor of a product expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    One,
    /// A bare name such as `Xi` or `Xi_b`.
    Name(String),
    /// `X^[…]`.
    XPower(Vec<u32>),
    /// `X_i`.
    XUnit(usize),
    /// `name[midx](expr)` with an optional decoration.
    Kernel { name: String, deco: Option<Vec<u32>>, arg: Box<ExprAst> },
    /// `C(expr)`.
    C(Box<ExprAst>),
}

/// Parse tree of an expression; every factor keeps its source span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprAst {
    pub factors: Vec<(Factor, Span)>,
    pub span: Span,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += self.peek().unwrap().len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<(String, Span)> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Some((self.src[start..self.pos].to_string(), start..self.pos))
    }

    fn midx(&mut self) -> Result<Vec<u32>> {
        let start = self.pos;
        if !self.eat('[') {
            return self.err(start, "expected '['");
        }
        let mut v = Vec::new();
        loop {
            self.skip_ws();
            let s = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if s == self.pos {
                return self.err(s, "expected non-negative integer");
            }
            v.push(self.src[s..self.pos].parse().map_err(|_| Error::Parse { pos: s, msg: "integer too large".into() })?);
            if self.eat(',') {
                continue;
            }
            if self.eat(']') {
                return Ok(v);
            }
            return self.err(self.pos, "expected ',' or ']'");
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        self.skip_ws();
        let start = self.pos;
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(')') => break,
                Some('*') if !factors.is_empty() => {
                    self.pos += 1;
                    self.skip_ws();
                    if matches!(self.peek(), None | Some(')')) {
                        return self.err(self.pos, "expected factor after '*'");
                    }
                }
                _ => {}
            }
            factors.push(self.factor()?);
        }
        if factors.is_empty() {
            return self.err(self.pos, "expected expression");
        }
        Ok(ExprAst { factors, span: start..self.pos })
    }

    fn factor(&mut self) -> Result<(Factor, Span)> {
        self.skip_ws();
        let start = self.pos;
        let Some((name, _)) = self.ident() else {
            return self.err(start, format!("unexpected character {:?}", self.peek().unwrap_or(' ')));
        };
        let f = match name.as_str() {
            "One" => Factor::One,
            "X" => {
                if self.eat('^') {
                    self.skip_ws();
                    Factor::XPower(self.midx()?)
                } else {
                    Factor::XPower(Vec::new())
                }
            }
            _ if name.starts_with("X_") && name[2..].chars().all(|c| c.is_ascii_digit()) && name.len() > 2 => {
                Factor::XUnit(name[2..].parse().unwrap())
            }
            _ => {
                self.skip_ws();
                let deco = if self.peek() == Some('[') { Some(self.midx()?) } else { None };
                if self.eat('(') {
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return self.err(self.pos, "expected ')'");
                    }
                    if name == "C" && deco.is_none() {
                        Factor::C(Box::new(arg))
                    } else {
                        Factor::Kernel { name, deco, arg: Box::new(arg) }
                    }
                } else if deco.is_some() {
                    return self.err(self.pos, "expected '(' after decorated kernel name");
                } else {
                    Factor::Name(name)
                }
            }
        };
        Ok((f, start..self.pos))
    }
}

/// Parses an expression into its syntax tree without consulting a rule.
pub fn parse_ast(src: &str) -> Result<ExprAst> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.err(p.pos, "unexpected ')'");
    }
    Ok(e)
}

fn lower(ast: &ExprAst, rule: &RuleTable, allow_c: bool) -> Result<RootedForest> {
    let dim = rule.dim();
    let mut acc = RootedForest::one(dim);
    for (f, span) in &ast.factors {
        let err = |msg: String| Error::Parse { pos: span.start, msg };
        let part = match f {
            Factor::One => RootedForest::one(dim),
            Factor::XPower(v) => {
                if v.is_empty() {
                    if dim != 0 {
                        return Err(err("bare `X` is only allowed when dim = 0; use X_i or X^[…]".into()));
                    }
                    RootedForest::from_tree(Tree::x(MultiIndex::unit(0, 0)))
                } else {
                    if v.len() != dim + 1 {
                        return Err(Error::Arity { got: v.clone(), expected: dim + 1 });
                    }
                    RootedForest::from_tree(Tree::x(MultiIndex(v.clone())))
                }
            }
            Factor::XUnit(i) => {
                if *i > dim {
                    return Err(err(format!("X_{i} exceeds the dimension {dim}")));
                }
                RootedForest::from_tree(Tree::x(MultiIndex::unit(dim, *i)))
            }
            Factor::Name(n) => match rule.edge_type(n) {
                Some(t) if t.noise => RootedForest::from_tree(Tree::noise(n, dim)),
                Some(_) => return Err(err(format!("kernel `{n}` needs an argument"))),
                None => return Err(Error::UnknownType(n.clone())),
            },
            Factor::Kernel { name, deco, arg } => {
                let (label, k) = match (rule.edge_type(name), deco) {
                    (Some(t), _) if t.noise => return Err(err(format!("noise `{name}` takes no argument"))),
                    (Some(t), Some(d)) => {
                        if d.len() != dim + 1 {
                            return Err(Error::Arity { got: d.clone(), expected: dim + 1 });
                        }
                        (rule.label(&t.name)?, MultiIndex(d.clone()))
                    }
                    (Some(t), None) => (rule.label(&t.name)?, MultiIndex::zero(dim)),
                    (None, None) => {
                        let stem = name.strip_suffix('1').filter(|_| dim == 1);
                        match stem.and_then(|s| rule.edge_type(s)).filter(|t| !t.noise) {
                            Some(t) => (rule.label(&t.name)?, MultiIndex(vec![0, 1])),
                            None => return Err(Error::UnknownType(name.clone())),
                        }
                    }
                    (None, Some(_)) => return Err(Error::UnknownType(name.clone())),
                };
                let child = lower(arg, rule, false)?;
                RootedForest::from_tree(Tree::planted(label, k, child.root))
            }
            Factor::C(arg) => {
                if !allow_c {
                    return Err(err("`C(…)` may only appear at the top level".into()));
                }
                lower(arg, rule, true)?.c_op()
            }
        };
        acc = acc.star(&part);
    }
    Ok(acc)
}

/// Parses an element of the forest space with distinguished root
/// (`C(…)` factors allowed).
pub fn parse_rooted(src: &str, rule: &RuleTable) -> Result<RootedForest> {
    let ast = parse_ast(src)?;
    let f = lower(&ast, rule, true)?;
    rule.validate(&f.root)?;
    for t in f.others.trees() {
        rule.validate(t)?;
    }
    Ok(f)
}

/// Parses a single decorated tree.
pub fn parse_tree(src: &str, rule: &RuleTable) -> Result<Tree> {
    let ast = parse_ast(src)?;
    let f = lower(&ast, rule, false)?;
    rule.validate(&f.root)?;
    Ok(f.root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use crate::rules::RootConstraint;

    #[test]
    fn parses_examples() {
        let kpz = RuleTable::builtin("kpz").unwrap();
        let t = parse_tree("I1(Xi)*I1(Xi)", &kpz).unwrap();
        assert_eq!(t.edges().len(), 2);
        assert_eq!(t, parse_tree("I[0,1](Xi) I[0,1]( Xi )", &kpz).unwrap());
        let g = RuleTable::builtin("gkpz").unwrap();
        let c = parse_tree("I(I(I(Xi)*Xi)*Xi)", &g).unwrap();
        assert_eq!(c.edge_count(), 6);
        let x = parse_tree("X^[2,1]", &kpz).unwrap();
        assert_eq!(x.node(), &MultiIndex(vec![2, 1]));
    }

    #[test]
    fn reports_errors() {
        let kpz = RuleTable::builtin("kpz").unwrap();
        assert!(matches!(parse_tree("J(Xi)", &kpz), Err(Error::UnknownType(_))));
        assert!(matches!(parse_tree("X^[1,2,3]", &kpz), Err(Error::Arity { .. })));
        assert!(matches!(parse_tree("I(Xi", &kpz), Err(Error::Parse { .. })));
        assert!(matches!(parse_tree("Xi*C(Xi)", &kpz), Err(Error::Parse { .. })));
        assert!(matches!(parse_tree("Xi(One)", &kpz), Err(Error::Parse { .. })));
    }

    #[test]
    fn rooted_forests() {
        let kpz = RuleTable::builtin("kpz").unwrap();
        let f = parse_rooted("I(Xi)*C(Xi)*X_1", &kpz).unwrap();
        assert_eq!(f.root, parse_tree("X_1*I(Xi)", &kpz).unwrap());
        assert_eq!(f.others.trees(), &[parse_tree("Xi", &kpz).unwrap()]);
        assert_eq!(parse_rooted(&f.text(), &kpz).unwrap(), f);
    }

    #[test]
    fn round_trip_on_bases() {
        for name in ["kpz", "gkpz", "qua", "hermite"] {
            let r = RuleTable::builtin(name).unwrap();
            let cap = MultiIndex(vec![1; r.dim() + 1]);
            let b = r.generate_basis(Rational64::from_integer(3), 4, &cap, RootConstraint::Strong);
            for t in b.iter() {
                assert_eq!(&parse_tree(&t.text(), &r).unwrap(), t, "{}", t.text());
            }
        }
    }
}
