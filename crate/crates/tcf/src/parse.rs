//! Recursive-descent parser for the canonical surface syntax produced by
//! [`crate::print`], plus the signature-file format and a line-oriented
//! derivation format. Parsing then printing is the identity on canonical
//! text; printing then parsing yields alpha-equal objects.
//!
//! Identifiers are classified against a signature: constructor names and
//! program constants come from it, `all`/`ex`-bound variables carry their
//! annotated types, and remaining free variables take the type expected at
//! their position (so `Ev n` gives `n : N`). Predicate variables must be
//! declared (`pvar X[N]`) or bound by an enclosing `mu`/`nu`.

use crate::logic::{
    eq_atom, falsity, imp, mk_fix, mk_fix_op, Clause, Flavor, Formula, PVar, Predicate,
};
use crate::proof::Derivation;
use crate::sig::{Algebra, ConstDef, Constructor, Rule, Signature};
use crate::syntax::{Term, Type, Var};
use indexmap::IndexMap;
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

type PRes<T> = Result<T, ParseError>;

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMS2: [&str; 4] = ["=>", "->", ":=", "=="];
const SYMS1: [&str; 14] =
    ["(", ")", "{", "}", "[", "]", ",", ";", ":", ".", "|", "\\", "=", "'"];

fn lex(text: &str) -> PRes<Vec<Spanned>> {
    let mut out = Vec::new();
    let b: Vec<char> = text.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    while i < b.len() {
        let c = b[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < b.len() && b[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        if i + 1 < b.len() {
            let two: String = b[i..i + 2].iter().collect();
            if let Some(s) = SYMS2.iter().find(|s| **s == two) {
                out.push(Spanned { tok: Tok::Sym(s), line: l0, col: c0 });
                i += 2;
                col += 2;
                continue;
            }
        }
        if c.is_ascii_digit() {
            let mut n = 0u64;
            while i < b.len() && b[i].is_ascii_digit() {
                n = n * 10 + (b[i] as u64 - '0' as u64);
                i += 1;
                col += 1;
            }
            out.push(Spanned { tok: Tok::Num(n), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < b.len() && (b[i].is_alphanumeric() || b[i] == '_') {
                s.push(b[i]);
                i += 1;
                col += 1;
            }
            // Trailing primes belong to predicate-variable identifiers.
            while i < b.len() && b[i] == '\'' {
                s.push('\'');
                i += 1;
                col += 1;
            }
            out.push(Spanned { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        let one: String = std::iter::once(c).collect();
        if let Some(s) = SYMS1.iter().find(|s| **s == one) {
            out.push(Spanned { tok: Tok::Sym(s), line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError { line, col, msg: format!("unexpected character {c:?}") });
    }
    Ok(out)
}

fn split_primes(s: &str) -> (String, u32) {
    let primes = s.chars().rev().take_while(|c| *c == '\'').count() as u32;
    (s[..s.len() - primes as usize].to_string(), primes)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a Signature,
    /// Declared or fixpoint-bound predicate variables: key -> arity.
    pvars: HashMap<(String, u32), Vec<Type>>,
    /// Term-variable scopes, innermost last.
    env: Vec<(String, Type)>,
}

impl<'a> Parser<'a> {
    fn new(sig: &'a Signature, pvars: &[PVar], toks: Vec<Spanned>) -> Self {
        let mut map = HashMap::new();
        for x in pvars {
            map.insert((x.name.clone(), x.primes), x.arity.clone());
        }
        Parser { toks, pos: 0, sig, pvars: map, env: Vec::new() }
    }

    fn err<T>(&self, msg: impl Into<String>) -> PRes<T> {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or_else(|| {
                self.toks.last().map(|s| (s.line, s.col + 1)).unwrap_or((1, 1))
            });
        Err(ParseError { line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.peek() == Some(&Tok::Sym(sym_ref(s))) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PRes<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn expect_ident(&mut self) -> PRes<String> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected an identifier")
            }
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.peek() == Some(&Tok::Ident(kw.to_string())) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // -- types -------------------------------------------------------------

    /// prec 0: arrows allowed; 1: argument position.
    fn ty(&mut self, prec: u8) -> PRes<Type> {
        let head = self.ty_atom(prec)?;
        if prec == 0 && self.eat_sym("=>") {
            let rhs = self.ty(0)?;
            return Ok(Type::arrow(head, rhs));
        }
        Ok(head)
    }

    fn ty_atom(&mut self, prec: u8) -> PRes<Type> {
        if self.eat_sym("(") {
            let t = self.ty(0)?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        let name = self.expect_ident()?;
        if let Some(alg) = self.sig.algebras.get(&name) {
            let mut args = Vec::new();
            if prec == 0 {
                for _ in 0..alg.params.len() {
                    args.push(self.ty(1)?);
                }
            } else if !alg.params.is_empty() {
                return self.err(format!("applied algebra {name} needs parentheses here"));
            }
            return Ok(Type::Alg { name, args });
        }
        // Lowercase identifiers not naming an algebra are type variables.
        Ok(Type::Var(name))
    }

    // -- terms ---------------------------------------------------------------

    fn lookup_env(&self, name: &str) -> Option<Type> {
        self.env.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t.clone())
    }

    fn find_constructor(&self, name: &str) -> Option<(Arc<Algebra>, Constructor)> {
        for alg in self.sig.algebras.values() {
            if let Some(c) = alg.constructors.iter().find(|c| c.name == name) {
                return Some((alg.clone(), c.clone()));
            }
        }
        None
    }

    /// prec 0: top; 1: operand of `==`; 2: application argument.
    fn term(&mut self, prec: u8, expected: Option<&Type>) -> PRes<Term> {
        if self.peek() == Some(&Tok::Sym("\\")) && prec == 0 {
            self.pos += 1;
            let name = self.expect_ident()?;
            self.expect_sym(":")?;
            let ty = self.ty(1)?;
            self.expect_sym(".")?;
            self.env.push((name.clone(), ty.clone()));
            let body = self.term(0, None)?;
            self.env.pop();
            return Ok(Term::abs(Var::new(&name, ty), body));
        }
        let head = self.term_atom(expected)?;
        if prec >= 2 {
            return Ok(head);
        }
        let mut cur = head;
        loop {
            let argpos = self.arg_expected(&cur);
            match self.peek() {
                Some(Tok::Ident(_)) | Some(Tok::Num(_)) | Some(Tok::Sym("(")) => {
                    // Stop if this identifier cannot start a term argument
                    // in the current context (e.g. `and`, `or`).
                    if let Some(Tok::Ident(w)) = self.peek() {
                        if matches!(w.as_str(), "and" | "or" | "all" | "ex" | "mu" | "nu") {
                            break;
                        }
                    }
                    let a = self.term(2, argpos.as_ref())?;
                    cur = Term::app(cur, a);
                }
                _ => break,
            }
        }
        if let (Some(want), Some(got)) = (expected, self.infer_ty(&cur)) {
            if *want != got {
                return self.err(format!(
                    "type mismatch: expected {}, found {}",
                    crate::print::type_to_string(want),
                    crate::print::type_to_string(&got)
                ));
            }
        }
        Ok(cur)
    }

    fn term_atom(&mut self, expected: Option<&Type>) -> PRes<Term> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let mut t = Term::con("N", "0", vec![]);
                for _ in 0..n {
                    t = Term::app(Term::con("N", "S", vec![]), t);
                }
                Ok(t)
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.term(0, expected)?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(ty) = self.lookup_env(&name) {
                    return Ok(Term::Var(Var::new(&name, ty)));
                }
                if let Some((alg, _c)) = self.find_constructor(&name) {
                    let mut ty_args = Vec::new();
                    if self.eat_sym("[") {
                        loop {
                            ty_args.push(self.ty(0)?);
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                        self.expect_sym("]")?;
                    }
                    if ty_args.len() != alg.params.len() {
                        return self.err(format!(
                            "constructor {name} of {} expects {} type arguments",
                            alg.name,
                            alg.params.len()
                        ));
                    }
                    return Ok(Term::Con { alg: alg.name.clone(), name, ty_args });
                }
                if self.sig.consts.contains_key(&name) {
                    return Ok(Term::pconst(&name));
                }
                match expected {
                    Some(ty) => Ok(Term::Var(Var::new(&name, ty.clone()))),
                    None => self.err(format!(
                        "cannot infer the type of the free variable {name}"
                    )),
                }
            }
            _ => self.err("expected a term"),
        }
    }

    /// The expected type of the next application argument of `head`.
    fn arg_expected(&self, head: &Term) -> Option<Type> {
        let ty = self.infer_ty(head)?;
        match ty {
            Type::Arrow(a, _) => Some(a.as_ref().clone()),
            _ => None,
        }
    }

    fn infer_ty(&self, t: &Term) -> Option<Type> {
        match t {
            Term::Var(v) => Some(v.ty.clone()),
            Term::Con { alg, name, ty_args } => {
                let a = self.sig.algebras.get(alg)?;
                let c = a.constructors.iter().find(|c| c.name == *name)?;
                let map: HashMap<String, Type> =
                    a.params.iter().cloned().zip(ty_args.iter().cloned()).collect();
                let args: Vec<Type> =
                    c.arg_tys.iter().map(|x| x.subst_vars(&map)).collect();
                let res = Type::Alg { name: alg.clone(), args: ty_args.clone() };
                Some(Type::arrows(&args, res))
            }
            Term::PConst { name } => Some(self.sig.consts.get(name)?.ty.clone()),
            Term::Abs(v, b) => Some(Type::arrow(v.ty.clone(), self.infer_ty(b)?)),
            Term::App(f, _) => match self.infer_ty(f)? {
                Type::Arrow(_, b) => Some(b.as_ref().clone()),
                _ => None,
            },
        }
    }

    // -- formulas ------------------------------------------------------------

    /// prec 0: `->` allowed; 1: `or` allowed; 2: `and` allowed; 3: atoms.
    fn formula(&mut self, prec: u8) -> PRes<Formula> {
        if prec <= 2 {
            let a = self.formula(3)?;
            let f = if self.eat_kw("and") {
                Formula::And(Arc::new(a), Arc::new(self.formula_and_chain()?))
            } else {
                a
            };
            let f = if prec <= 1 && self.eat_kw("or") {
                Formula::Or(Arc::new(f), Arc::new(self.formula_or_chain()?))
            } else {
                f
            };
            if prec == 0 && self.eat_sym("->") {
                let rhs = self.formula(0)?;
                return Ok(imp(f, rhs));
            }
            return Ok(f);
        }
        self.formula_atom()
    }

    fn formula_and_chain(&mut self) -> PRes<Formula> {
        let a = self.formula(3)?;
        if self.eat_kw("and") {
            Ok(Formula::And(Arc::new(a), Arc::new(self.formula_and_chain()?)))
        } else {
            Ok(a)
        }
    }

    fn formula_or_chain(&mut self) -> PRes<Formula> {
        let a = self.formula(2)?;
        if self.eat_kw("or") {
            Ok(Formula::Or(Arc::new(a), Arc::new(self.formula_or_chain()?)))
        } else {
            Ok(a)
        }
    }

    fn formula_atom(&mut self) -> PRes<Formula> {
        if self.eat_kw("all") {
            return self.quantifier(true);
        }
        if self.eat_kw("ex") {
            return self.quantifier(false);
        }
        if self.eat_sym("(") {
            let f = self.formula(0)?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        match self.peek().cloned() {
            Some(Tok::Ident(w)) if w == "F" && !self.sig.preds.contains_key("F") => {
                self.pos += 1;
                Ok(falsity())
            }
            Some(Tok::Ident(w)) if w == "mu" || w == "nu" => {
                let pred = self.fix_pred(None)?;
                self.atom_args(pred)
            }
            Some(Tok::Sym("{")) => {
                let pred = self.comprehension()?;
                self.atom_args(pred)
            }
            Some(Tok::Ident(w)) if self.sig.preds.contains_key(&w) => {
                self.pos += 1;
                let pred = self.sig.preds[&w].clone();
                self.atom_args(pred)
            }
            Some(Tok::Ident(w)) if self.pvars.contains_key(&split_primes(&w)) => {
                self.pos += 1;
                let (name, primes) = split_primes(&w);
                let arity = self.pvars[&(name.clone(), primes)].clone();
                let pred = Predicate::Var(PVar { name, primes, arity });
                self.atom_args(pred)
            }
            _ => {
                // An equality atom: `t == u`.
                let lhs = self.term(1, None)?;
                self.expect_sym("==")?;
                let ty = match self.infer_ty(&lhs) {
                    Some(t) => t,
                    None => return self.err("cannot infer the type of an equality"),
                };
                let rhs = self.term(1, Some(&ty))?;
                Ok(eq_atom(&ty, lhs, rhs))
            }
        }
    }

    fn atom_args(&mut self, pred: Predicate) -> PRes<Formula> {
        let arity = pred.arity();
        let mut args = Vec::new();
        for ty in &arity {
            args.push(self.term(2, Some(ty))?);
        }
        // Build the atom directly: `Predicate::apply` beta-reduces
        // comprehensions, which would lose the printed shape.
        Ok(Formula::Atom { pred, args })
    }

    fn quantifier(&mut self, universal: bool) -> PRes<Formula> {
        let name = self.expect_ident()?;
        self.expect_sym(":")?;
        let ty = self.ty(1)?;
        let v = Var::new(&name, ty.clone());
        self.env.push((name, ty));
        let body = self.quantifier_body()?;
        self.env.pop();
        Ok(if universal {
            Formula::All(v, Arc::new(body))
        } else {
            Formula::Ex(v, Arc::new(body))
        })
    }

    fn quantifier_body(&mut self) -> PRes<Formula> {
        if self.eat_kw("all") {
            return self.quantifier(true);
        }
        if self.eat_kw("ex") {
            return self.quantifier(false);
        }
        if self.eat_sym("(") {
            let f = self.formula(0)?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        self.formula_atom()
    }

    fn comprehension(&mut self) -> PRes<Predicate> {
        self.expect_sym("{")?;
        let mut vars = Vec::new();
        loop {
            let name = self.expect_ident()?;
            self.expect_sym(":")?;
            let ty = self.ty(1)?;
            vars.push(Var::new(&name, ty));
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym("|")?;
        let depth = self.env.len();
        for v in &vars {
            self.env.push((v.name.clone(), v.ty.clone()));
        }
        let body = self.formula(0)?;
        self.env.truncate(depth);
        self.expect_sym("}")?;
        Ok(Predicate::compr(vars, body))
    }

    /// `mu X[T,..] (clause; ..)` or `nu X[..] {x:T,.. | A}`; `name` is
    /// non-empty for `pred` definitions.
    fn fix_pred(&mut self, name: Option<&str>) -> PRes<Predicate> {
        let flavor = if self.eat_kw("mu") {
            Flavor::Mu
        } else if self.eat_kw("nu") {
            Flavor::Nu
        } else {
            return self.err("expected `mu` or `nu`");
        };
        let raw = self.expect_ident()?;
        let (pname, primes) = split_primes(&raw);
        self.expect_sym("[")?;
        let mut arity = Vec::new();
        loop {
            arity.push(self.ty(0)?);
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym("]")?;
        let pvar = PVar { name: pname.clone(), primes, arity: arity.clone() };
        let key = (pname, primes);
        let shadowed = self.pvars.insert(key.clone(), arity);
        let fx = if self.peek() == Some(&Tok::Sym("{")) {
            self.expect_sym("{")?;
            let mut vars = Vec::new();
            loop {
                let n = self.expect_ident()?;
                self.expect_sym(":")?;
                let ty = self.ty(1)?;
                vars.push(Var::new(&n, ty));
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym("|")?;
            let depth = self.env.len();
            for v in &vars {
                self.env.push((v.name.clone(), v.ty.clone()));
            }
            let body = self.formula(0)?;
            self.env.truncate(depth);
            self.expect_sym("}")?;
            mk_fix_op(flavor, name.unwrap_or(""), pvar, vars, body)
        } else {
            self.expect_sym("(")?;
            let mut clauses = Vec::new();
            loop {
                clauses.push(self.clause(&pvar)?);
                if !self.eat_sym(";") {
                    break;
                }
            }
            self.expect_sym(")")?;
            mk_fix(flavor, name.unwrap_or(""), pvar, clauses)
        };
        match shadowed {
            Some(a) => {
                self.pvars.insert(key, a);
            }
            None => {
                self.pvars.remove(&key);
            }
        }
        match fx {
            Ok(fx) => Ok(Predicate::Fix(fx)),
            Err(e) => self.err(format!("ill-formed fixpoint: {e}")),
        }
    }

    /// A clause, written as the formula `all binders (premises -> X heads)`.
    fn clause(&mut self, pvar: &PVar) -> PRes<Clause> {
        let start = self.pos;
        let f = self.formula(0)?;
        let mut binders = Vec::new();
        let mut cur = f;
        while let Formula::All(v, b) = cur {
            binders.push(v.clone());
            cur = b.as_ref().clone();
        }
        let mut premises = Vec::new();
        while let Formula::Imp(a, b) = cur {
            premises.push(a.as_ref().clone());
            cur = b.as_ref().clone();
        }
        match cur {
            Formula::Atom { pred: Predicate::Var(x), args } if x.key() == pvar.key() => {
                Ok(Clause { binders, premises, head: args })
            }
            _ => {
                self.pos = start;
                self.err(format!(
                    "clause head must be the bound predicate {}{}",
                    pvar.name,
                    "'".repeat(pvar.primes as usize)
                ))
            }
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }
}

fn sym_ref(s: &str) -> &'static str {
    SYMS2
        .iter()
        .chain(SYMS1.iter())
        .find(|x| **x == s)
        .copied()
        .unwrap_or("(")
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

pub fn parse_type(sig: &Signature, text: &str) -> PRes<Type> {
    let mut p = Parser::new(sig, &[], lex(text)?);
    let t = p.ty(0)?;
    if !p.at_end() {
        return p.err("trailing input after type");
    }
    Ok(t)
}

pub fn parse_term(sig: &Signature, text: &str, expected: Option<&Type>) -> PRes<Term> {
    let mut p = Parser::new(sig, &[], lex(text)?);
    let t = p.term(0, expected)?;
    if !p.at_end() {
        return p.err("trailing input after term");
    }
    Ok(t)
}

pub fn parse_formula(sig: &Signature, pvars: &[PVar], text: &str) -> PRes<Formula> {
    parse_formula_in(sig, pvars, &[], text)
}

/// Like [`parse_formula`], with typed free variables already in scope.
pub fn parse_formula_in(
    sig: &Signature,
    pvars: &[PVar],
    scope: &[Var],
    text: &str,
) -> PRes<Formula> {
    let mut p = Parser::new(sig, pvars, lex(text)?);
    p.env = scope.iter().map(|v| (v.name.clone(), v.ty.clone())).collect();
    let f = p.formula(0)?;
    if !p.at_end() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

/// Like [`parse_term`], with typed free variables already in scope.
pub fn parse_term_in(
    sig: &Signature,
    scope: &[Var],
    text: &str,
    expected: Option<&Type>,
) -> PRes<Term> {
    let mut p = Parser::new(sig, &[], lex(text)?);
    p.env = scope.iter().map(|v| (v.name.clone(), v.ty.clone())).collect();
    let t = p.term(0, expected)?;
    if !p.at_end() {
        return p.err("trailing input after term");
    }
    Ok(t)
}

/// Parses a predicate-variable declaration like `X[N]` or `Y'[N, N]`.
pub fn parse_pvar_decl(sig: &Signature, text: &str) -> PRes<PVar> {
    let mut p = Parser::new(sig, &[], lex(text)?);
    let raw = p.expect_ident()?;
    let (name, primes) = split_primes(&raw);
    p.expect_sym("[")?;
    let mut arity = Vec::new();
    loop {
        arity.push(p.ty(0)?);
        if !p.eat_sym(",") {
            break;
        }
    }
    p.expect_sym("]")?;
    if !p.at_end() {
        return p.err("trailing input after declaration");
    }
    Ok(PVar { name, primes, arity })
}

pub fn parse_predicate(sig: &Signature, pvars: &[PVar], text: &str) -> PRes<Predicate> {
    let mut p = Parser::new(sig, pvars, lex(text)?);
    let pred = match p.peek().cloned() {
        Some(Tok::Ident(w)) if w == "mu" || w == "nu" => p.fix_pred(None)?,
        Some(Tok::Sym("{")) => p.comprehension()?,
        Some(Tok::Ident(w)) if sig.preds.contains_key(&w) => {
            p.pos += 1;
            sig.preds[&w].clone()
        }
        Some(Tok::Ident(w)) if p.pvars.contains_key(&split_primes(&w)) => {
            p.pos += 1;
            let (name, primes) = split_primes(&w);
            let arity = p.pvars[&(name.clone(), primes)].clone();
            Predicate::Var(PVar { name, primes, arity })
        }
        _ => return p.err("expected a predicate"),
    };
    if !p.at_end() {
        return p.err("trailing input after predicate");
    }
    Ok(pred)
}

// ---------------------------------------------------------------------------
// Signature files
// ---------------------------------------------------------------------------

/// The contents of a signature file: declarations plus named formulas.
#[derive(Clone, Debug, Default)]
pub struct SignatureFile {
    pub sig: Signature,
    pub pvars: Vec<PVar>,
    pub formulas: IndexMap<String, Formula>,
}

pub fn parse_signature_file(text: &str) -> PRes<SignatureFile> {
    let toks = lex(text)?;
    let mut sf = SignatureFile::default();
    let mut pos = 0;
    while pos < toks.len() {
        let mut p = Parser::new(&sf.sig, &sf.pvars, toks.clone());
        p.pos = pos;
        if p.eat_kw("algebra") {
            let name = p.expect_ident()?;
            let mut params = Vec::new();
            while let Some(Tok::Ident(w)) = p.peek() {
                params.push(w.clone());
                p.pos += 1;
            }
            // Constructor types may mention the algebra itself, so parse
            // them against a signature holding a provisional entry for it.
            let mut tmp = sf.sig.clone();
            tmp.add_algebra(Algebra {
                name: name.clone(),
                params: params.clone(),
                constructors: Vec::new(),
            })
            .map_err(|e| ParseError { line: 0, col: 0, msg: format!("{e}") })?;
            let mut p = Parser::new(&tmp, &sf.pvars, toks.clone());
            p.pos = pos + 2 + params.len();
            p.expect_sym("(")?;
            let mut constructors = Vec::new();
            // Parameters act as type variables inside constructor types.
            while p.peek() != Some(&Tok::Sym(")")) {
                let cname = match p.next() {
                    Some(Tok::Ident(s)) => s,
                    Some(Tok::Num(n)) => n.to_string(),
                    _ => return p.err("expected a constructor name"),
                };
                let mut arg_tys = Vec::new();
                while !matches!(p.peek(), Some(Tok::Sym(";")) | Some(Tok::Sym(")")) | None) {
                    arg_tys.push(p.ty(1)?);
                }
                constructors.push(Constructor { name: cname, arg_tys });
                if !p.eat_sym(";") {
                    break;
                }
            }
            p.expect_sym(")")?;
            pos = p.pos;
            let alg = Algebra { name, params, constructors };
            if let Err(e) = sf.sig.add_algebra(alg) {
                return Err(ParseError { line: 0, col: 0, msg: format!("{e}") });
            }
            continue;
        }
        if p.eat_kw("const") {
            let name = p.expect_ident()?;
            p.expect_sym(":")?;
            let ty = p.ty(0)?;
            // Rules may be recursive, so a provisional entry for the
            // constant itself must be visible while parsing them.
            let mut tmp = sf.sig.clone();
            tmp.add_const(ConstDef { name: name.clone(), ty: ty.clone(), rules: Vec::new() })
                .map_err(|e| ParseError { line: 0, col: 0, msg: format!("{e}") })?;
            let saved = p.pos;
            let mut p = Parser::new(&tmp, &sf.pvars, toks.clone());
            p.pos = saved;
            let mut rules = Vec::new();
            if p.eat_sym("(") {
                let (arg_tys, res_ty) = ty.uncurry();
                let arg_tys: Vec<Type> = arg_tys.into_iter().cloned().collect();
                let res_ty = res_ty.clone();
                loop {
                    let rname = p.expect_ident()?;
                    if rname != name {
                        return p.err(format!("rule head must be {name}"));
                    }
                    let depth = p.env.len();
                    let mut patterns = Vec::new();
                    // A rule may match a prefix of the arguments.
                    while p.peek() != Some(&Tok::Sym("=")) {
                        let at = arg_tys
                            .get(patterns.len())
                            .ok_or_else(|| ParseError {
                                line: 0,
                                col: 0,
                                msg: format!("too many patterns in a rule for {name}"),
                            })?;
                        let pat = p.term(2, Some(at))?;
                        bind_pattern_vars(&pat, at, &mut p.env);
                        patterns.push(pat);
                    }
                    p.expect_sym("=")?;
                    let rhs_ty = Type::arrows(&arg_tys[patterns.len()..], res_ty.clone());
                    let rhs = p.term(0, Some(&rhs_ty))?;
                    p.env.truncate(depth);
                    rules.push(Rule { patterns, rhs });
                    if !p.eat_sym(";") {
                        break;
                    }
                }
                p.expect_sym(")")?;
            }
            pos = p.pos;
            let def = ConstDef { name, ty, rules };
            if let Err(e) = sf.sig.add_const(def) {
                return Err(ParseError { line: 0, col: 0, msg: format!("{e}") });
            }
            continue;
        }
        if p.eat_kw("pvar") {
            let raw = p.expect_ident()?;
            let (name, primes) = split_primes(&raw);
            p.expect_sym("[")?;
            let mut arity = Vec::new();
            loop {
                arity.push(p.ty(0)?);
                if !p.eat_sym(",") {
                    break;
                }
            }
            p.expect_sym("]")?;
            pos = p.pos;
            sf.pvars.push(PVar { name, primes, arity });
            continue;
        }
        if p.eat_kw("pred") {
            let name = p.expect_ident()?;
            p.expect_sym(":=")?;
            let pred = p.fix_pred(Some(&name))?;
            pos = p.pos;
            sf.sig.add_pred(&name, pred);
            continue;
        }
        if p.eat_kw("formula") {
            let name = p.expect_ident()?;
            p.expect_sym(":=")?;
            let f = p.formula(0)?;
            pos = p.pos;
            sf.formulas.insert(name, f);
            continue;
        }
        return p.err("expected `algebra`, `const`, `pvar`, `pred` or `formula`");
    }
    Ok(sf)
}

/// Collects the variables of a left-linear constructor pattern into the
/// parser environment (the expected type threads through constructors, so
/// every pattern variable already carries its type).
fn bind_pattern_vars(pat: &Term, _ty: &Type, env: &mut Vec<(String, Type)>) {
    match pat {
        Term::Var(v) => env.push((v.name.clone(), v.ty.clone())),
        Term::App(f, a) => {
            bind_pattern_vars(f, _ty, env);
            bind_pattern_vars(a, _ty, env);
        }
        _ => {}
    }
}

pub fn signature_file_to_string(sf: &SignatureFile) -> String {
    use crate::print::{fix_to_string, formula_to_string, term_to_string, type_to_string};
    let mut out = String::new();
    for alg in sf.sig.algebras.values() {
        out.push_str("algebra ");
        out.push_str(&alg.name);
        for pm in &alg.params {
            out.push(' ');
            out.push_str(pm);
        }
        out.push_str(" (");
        for (i, c) in alg.constructors.iter().enumerate() {
            if i > 0 {
                out.push_str("; ");
            }
            out.push_str(&c.name);
            for at in &c.arg_tys {
                out.push(' ');
                let s = type_to_string(at);
                if s.contains(' ') {
                    out.push('(');
                    out.push_str(&s);
                    out.push(')');
                } else {
                    out.push_str(&s);
                }
            }
        }
        out.push_str(")\n");
    }
    for c in sf.sig.consts.values() {
        out.push_str("const ");
        out.push_str(&c.name);
        out.push_str(" : ");
        out.push_str(&type_to_string(&c.ty));
        if !c.rules.is_empty() {
            out.push_str(" (");
            for (i, r) in c.rules.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                out.push_str(&c.name);
                for pat in &r.patterns {
                    out.push(' ');
                    let mut s = String::new();
                    print_arg(&mut s, pat);
                    out.push_str(&s);
                }
                out.push_str(" = ");
                out.push_str(&term_to_string(&r.rhs));
            }
            out.push(')');
        }
        out.push('\n');
    }
    for x in &sf.pvars {
        out.push_str("pvar ");
        out.push_str(&x.name);
        out.push_str(&"'".repeat(x.primes as usize));
        out.push('[');
        for (i, t) in x.arity.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&type_to_string(t));
        }
        out.push_str("]\n");
    }
    for (name, pred) in &sf.sig.preds {
        if let Predicate::Fix(fx) = pred {
            out.push_str("pred ");
            out.push_str(name);
            out.push_str(" := ");
            out.push_str(&fix_to_string(fx));
            out.push('\n');
        }
    }
    for (name, f) in &sf.formulas {
        out.push_str("formula ");
        out.push_str(name);
        out.push_str(" := ");
        out.push_str(&formula_to_string(f));
        out.push('\n');
    }
    out
}

fn print_arg(out: &mut String, t: &Term) {
    let s = crate::print::term_to_string(t);
    if s.contains(' ') && !s.starts_with('(') {
        out.push('(');
        out.push_str(&s);
        out.push(')');
    } else {
        out.push_str(&s);
    }
}

// ---------------------------------------------------------------------------
// Derivations: a line-oriented text format (JSON via serde also works)
// ---------------------------------------------------------------------------

/// Renders a derivation as an indented, line-oriented tree. Axiom nodes
/// embed their scheme parameters as JSON on the line.
pub fn derivation_to_text(d: &Derivation) -> String {
    fn go(d: &Derivation, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match d {
            Derivation::Assume(f) => {
                out.push_str(&format!("{pad}assume {}\n", crate::print::formula_to_string(f)));
            }
            Derivation::Axiom(k) => {
                out.push_str(&format!(
                    "{pad}axiom {}\n",
                    serde_json::to_string(k).expect("axiom parameters serialize")
                ));
            }
            Derivation::ImpIntro { hyp, body } => {
                out.push_str(&format!(
                    "{pad}lam {}\n",
                    crate::print::formula_to_string(hyp)
                ));
                go(body, depth + 1, out);
            }
            Derivation::ImpElim { fun, arg } => {
                out.push_str(&format!("{pad}mp\n"));
                go(fun, depth + 1, out);
                go(arg, depth + 1, out);
            }
            Derivation::AllIntro { v, body } => {
                out.push_str(&format!(
                    "{pad}gen {}:{}\n",
                    v.name,
                    crate::print::type_to_string(&v.ty)
                ));
                go(body, depth + 1, out);
            }
            Derivation::AllElim { body, term } => {
                out.push_str(&format!(
                    "{pad}spec {}\n",
                    crate::print::term_to_string(term)
                ));
                go(body, depth + 1, out);
            }
        }
    }
    let mut s = String::new();
    go(d, 0, &mut s);
    s
}

/// Parses the output of [`derivation_to_text`]. Formulas on `assume`/`lam`
/// lines are parsed against `sig` and `pvars`; `spec` terms must have
/// inferable types.
pub fn parse_derivation_text(
    sig: &Signature,
    pvars: &[PVar],
    text: &str,
) -> PRes<Derivation> {
    let lines: Vec<(usize, usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let indent = l.len() - l.trim_start().len();
            (i + 1, indent / 2, l.trim())
        })
        .collect();
    fn build(
        sig: &Signature,
        pvars: &[PVar],
        lines: &[(usize, usize, &str)],
        idx: &mut usize,
        depth: usize,
        scope: &mut Vec<Var>,
    ) -> PRes<Derivation> {
        let (lineno, d, content) = match lines.get(*idx) {
            Some(x) => *x,
            None => {
                return Err(ParseError {
                    line: 0,
                    col: 0,
                    msg: "unexpected end of derivation".into(),
                })
            }
        };
        if d != depth {
            return Err(ParseError {
                line: lineno,
                col: 1,
                msg: format!("expected indentation {depth}, found {d}"),
            });
        }
        *idx += 1;
        let (word, rest) = match content.split_once(' ') {
            Some((w, r)) => (w, r),
            None => (content, ""),
        };
        let at = |msg: String| ParseError { line: lineno, col: 1, msg };
        match word {
            "assume" => Ok(Derivation::Assume(parse_formula_in(sig, pvars, scope, rest)?)),
            "axiom" => {
                let k = serde_json::from_str(rest)
                    .map_err(|e| at(format!("bad axiom parameters: {e}")))?;
                Ok(Derivation::Axiom(k))
            }
            "lam" => {
                let hyp = parse_formula_in(sig, pvars, scope, rest)?;
                let body = build(sig, pvars, lines, idx, depth + 1, scope)?;
                Ok(Derivation::ImpIntro { hyp, body: Arc::new(body) })
            }
            "mp" => {
                let fun = build(sig, pvars, lines, idx, depth + 1, scope)?;
                let arg = build(sig, pvars, lines, idx, depth + 1, scope)?;
                Ok(Derivation::ImpElim { fun: Arc::new(fun), arg: Arc::new(arg) })
            }
            "gen" => {
                let (name, tys) = rest
                    .split_once(':')
                    .ok_or_else(|| at("expected `gen x:T`".into()))?;
                let ty = parse_type(sig, tys)?;
                let v = Var::new(name.trim(), ty);
                scope.push(v.clone());
                let body = build(sig, pvars, lines, idx, depth + 1, scope)?;
                scope.pop();
                Ok(Derivation::AllIntro { v, body: Arc::new(body) })
            }
            "spec" => {
                let term = parse_term_in(sig, scope, rest, None)?;
                let body = build(sig, pvars, lines, idx, depth + 1, scope)?;
                Ok(Derivation::AllElim { body: Arc::new(body), term })
            }
            _ => Err(at(format!("unknown derivation rule {word}"))),
        }
    }
    let mut idx = 0;
    let d = build(sig, pvars, &lines, &mut idx, 0, &mut Vec::new())?;
    if idx != lines.len() {
        return Err(ParseError {
            line: lines[idx].0,
            col: 1,
            msg: "trailing lines after derivation".into(),
        });
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::logic::{all, and, ex, or, weak_neg};
    use crate::print::{formula_to_string, term_to_string, type_to_string};
    use crate::syntax::Var;

    fn sig() -> Signature {
        corpus::std_sig()
    }

    fn roundtrip_formula_in(sg: &Signature, f: &Formula, pvars: &[PVar]) {
        let s = formula_to_string(f);
        let g = parse_formula(sg, pvars, &s).unwrap_or_else(|e| panic!("{s}\n{e}"));
        assert!(f.alpha_eq(&g), "round trip changed:\n  {s}\n  {}", formula_to_string(&g));
        assert_eq!(s, formula_to_string(&g), "reprint differs");
    }

    fn roundtrip_formula(f: &Formula, pvars: &[PVar]) {
        roundtrip_formula_in(&sig(), f, pvars);
    }

    #[test]
    fn types_round_trip() {
        for s in ["N", "N => N", "(N => N) => B", "L N", "L (L N)", "(L N) => S"] {
            let t = parse_type(&sig(), s).unwrap();
            assert_eq!(type_to_string(&t), s);
        }
    }

    #[test]
    fn terms_round_trip() {
        let sg = sig();
        for s in [
            "S (S 0)",
            "cons[N] 0 (nil[N])",
            "\\n:N. S n",
            "nbin (S 0) 0",
        ] {
            let t = parse_term(&sg, s, None).unwrap_or_else(|e| panic!("{s}: {e}"));
            let printed = term_to_string(&t);
            let u = parse_term(&sg, &printed, None).unwrap();
            assert_eq!(term_to_string(&u), printed);
        }
    }

    #[test]
    fn numerals_elaborate() {
        let t = parse_term(&sig(), "3", None).unwrap();
        assert_eq!(t, corpus::numeral(3));
    }

    #[test]
    fn formulas_round_trip() {
        let n = corpus::nat();
        let v = Var::new("n", n.clone());
        let ev = corpus::ev().apply(vec![v.term()]);
        let od = corpus::od().apply(vec![v.term()]);
        let cases = vec![
            all(v.clone(), imp(ev.clone(), od.clone())),
            all(v.clone(), and(ev.clone(), or(od.clone(), falsity()))),
            ex(v.clone(), weak_neg(ev.clone())),
            eq_atom(&n, corpus::numeral(2), corpus::numeral(2)),
            imp(falsity(), eq_atom(&n, v.term(), v.term())),
        ];
        for f in &cases {
            // Free `n` in the last case gets its type from the equality's
            // other side, which is itself free: bind everything instead.
            let closed = all(v.clone(), f.clone());
            roundtrip_formula(&closed, &[]);
        }
    }

    #[test]
    fn pvar_atoms_and_primes() {
        let x = PVar { name: "X".into(), primes: 1, arity: vec![corpus::nat()] };
        let f = parse_formula(&sig(), &[x.clone()], "all n:N (X' n -> F)").unwrap();
        roundtrip_formula(&f, &[x]);
    }

    #[test]
    fn comprehension_atom() {
        let f = parse_formula(&sig(), &[], "{n:N | Ev n -> F} 4").unwrap();
        match &f {
            Formula::Atom { pred: Predicate::Compr { .. }, args } => {
                assert_eq!(args[0], corpus::numeral(4));
            }
            _ => panic!("expected a comprehension atom"),
        }
        roundtrip_formula(&f, &[]);
    }

    #[test]
    fn anonymous_fixpoints() {
        let mu = "mu X[N] (X 0; all n:N (X n -> X (S (S n)))) 4";
        let f = parse_formula(&sig(), &[], mu).unwrap();
        roundtrip_formula(&f, &[]);
        let nu = "nu X[N] {n:N | Ev n and X (S n)} 0";
        let g = parse_formula(&sig(), &[], nu).unwrap();
        roundtrip_formula(&g, &[]);
    }

    #[test]
    fn named_and_negated_predicates_round_trip() {
        let n = corpus::nat();
        let v = Var::new("n", n.clone());
        // Negated fixpoints print by name, so register them first.
        let mut sg = sig();
        for p in [corpus::ev(), corpus::od(), corpus::acc(), corpus::tn()] {
            let np = crate::negation::neg_predicate(&p);
            if let Predicate::Fix(fx) = &np {
                sg.add_pred(&fx.name, np.clone());
            }
            let f = all(v.clone(), p.apply(vec![v.term()]));
            roundtrip_formula_in(&sg, &f, &[]);
            let nf = crate::negation::neg_formula(&all(v.clone(), p.apply(vec![v.term()])));
            roundtrip_formula_in(&sg, &nf, &[]);
        }
    }

    #[test]
    fn signature_file_round_trip() {
        let mut sf = SignatureFile { sig: sig(), pvars: Vec::new(), formulas: IndexMap::new() };
        sf.pvars.push(PVar { name: "X".into(), primes: 0, arity: vec![corpus::nat()] });
        let v = Var::new("n", corpus::nat());
        sf.formulas.insert(
            "even_step".into(),
            all(v.clone(), imp(corpus::ev().apply(vec![v.term()]),
                corpus::ev().apply(vec![corpus::suc(corpus::suc(v.term()))]))),
        );
        let text = signature_file_to_string(&sf);
        let sf2 = parse_signature_file(&text).unwrap_or_else(|e| panic!("{text}\n{e}"));
        assert_eq!(signature_file_to_string(&sf2), text);
        assert!(sf.formulas["even_step"].alpha_eq(&sf2.formulas["even_step"]));
    }

    #[test]
    fn derivation_text_round_trip() {
        let mut ctx = crate::dsl::GenCtx::new();
        let n = corpus::nat();
        let v = Var::new("n", n.clone());
        let a = all(v.clone(), corpus::ev().apply(vec![v.term()]));
        let d = crate::gen::gen_stab(&mut ctx, &a).unwrap();
        let text = derivation_to_text(&d);
        // The text refers to negated fixpoints by name; register them.
        let mut sg = sig();
        for p in [
            crate::negation::neg_predicate(&corpus::ev()),
            crate::negation::neg_predicate(&crate::negation::neg_predicate(&corpus::ev())),
        ] {
            if let Predicate::Fix(fx) = &p {
                sg.add_pred(&fx.name.clone(), p.clone());
            }
        }
        let d2 = parse_derivation_text(&sg, &[], &text).unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(derivation_to_text(&d2), text);
        let j1 = crate::proof::Checker::new(&sg).check(&d).unwrap();
        let j2 = crate::proof::Checker::new(&sg).check(&d2).unwrap();
        assert!(j1.conclusion.alpha_eq(&j2.conclusion));
    }

    #[test]
    fn derivation_json_round_trip() {
        let mut ctx = crate::dsl::GenCtx::new();
        let v = Var::new("n", corpus::nat());
        let a = corpus::ev().apply(vec![v.term()]);
        let d = crate::gen::gen_stab(&mut ctx, &all(v, a)).unwrap();
        let js = serde_json::to_string(&d).unwrap();
        let d2: Derivation = serde_json::from_str(&js).unwrap();
        assert_eq!(derivation_to_text(&d), derivation_to_text(&d2));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_formula(&sig(), &[], "all n:N (Ev n ->").unwrap_err();
        assert!(e.line >= 1);
        let e = parse_formula(&sig(), &[], "Ev q r").unwrap_err();
        assert!(format!("{e}").contains("trailing"), "{e}");
    }
}
