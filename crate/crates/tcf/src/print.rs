//! Canonical, deterministic pretty-printer. The parser accepts exactly this
//! output (round-tripping up to alpha-equivalence), and golden tests compare
//! against it byte-for-byte.
//!
//! Grammar summary (full EBNF in docs/grammar.md):
//!   types     a => b (right-assoc), `L N`, type variables lowercase
//!   terms     application by juxtaposition, `\x:T. t`, numerals for N
//!   formulas  `->` (right-assoc) < `or` < `and` < atoms; `all x:T A`,
//!             `ex x:T A`; `t == u` for Leibniz equality; `F` for falsity
//!   preds     named fixpoints print by name; anonymous ones in full:
//!             `mu X[T1,T2] (clause; ...)` or `nu X[T] {x:T | A}`

use crate::logic::{Clause, FixDef, FixPred, Formula, Predicate};
use crate::syntax::{Term, Type, Var};
use std::fmt::Write;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

pub fn type_to_string(t: &Type) -> String {
    let mut s = String::new();
    ty(&mut s, t, 0);
    s
}

/// prec 0: top (arrows allowed); 1: argument position (arrows and applied
/// algebras need parentheses).
fn ty(out: &mut String, t: &Type, prec: u8) {
    match t {
        Type::Var(n) => out.push_str(n),
        Type::Alg { name, args } => {
            if args.is_empty() {
                out.push_str(name);
            } else {
                let paren = prec >= 1;
                if paren {
                    out.push('(');
                }
                out.push_str(name);
                for a in args {
                    out.push(' ');
                    ty(out, a, 1);
                }
                if paren {
                    out.push(')');
                }
            }
        }
        Type::Arrow(a, b) => {
            let paren = prec >= 1;
            if paren {
                out.push('(');
            }
            ty(out, a, 1);
            out.push_str(" => ");
            ty(out, b, 0);
            if paren {
                out.push(')');
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

pub fn term_to_string(t: &Term) -> String {
    let mut s = String::new();
    term(&mut s, t, 0);
    s
}

/// Closed unary numeral (`S (S .. 0)`) as a count, if the term is one.
fn numeral_value(t: &Term) -> Option<u64> {
    let mut cur = t;
    let mut n = 0u64;
    loop {
        match cur {
            Term::Con { alg, name, .. } if alg == "N" && name == "0" => return Some(n),
            Term::App(f, a) => match f.as_ref() {
                Term::Con { alg, name, .. } if alg == "N" && name == "S" => {
                    n += 1;
                    cur = a;
                }
                _ => return None,
            },
            _ => return None,
        }
    }
}

/// prec 0: top; 1: operand of `==` or right of `\x:T.` (application ok,
/// abstraction needs parens); 2: application argument (only atoms bare).
fn term(out: &mut String, t: &Term, prec: u8) {
    if let Some(n) = numeral_value(t) {
        write!(out, "{n}").unwrap();
        return;
    }
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::PConst { name } => out.push_str(name),
        Term::Con { name, ty_args, .. } => {
            out.push_str(name);
            if !ty_args.is_empty() {
                out.push('[');
                for (i, a) in ty_args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    ty(out, a, 0);
                }
                out.push(']');
            }
        }
        Term::Abs(v, b) => {
            let paren = prec >= 1;
            if paren {
                out.push('(');
            }
            out.push('\\');
            out.push_str(&v.name);
            out.push(':');
            ty(out, &v.ty, 1);
            out.push_str(". ");
            term(out, b, 0);
            if paren {
                out.push(')');
            }
        }
        Term::App(f, a) => {
            let paren = prec >= 2;
            if paren {
                out.push('(');
            }
            term(out, f, 1);
            out.push(' ');
            term(out, a, 2);
            if paren {
                out.push(')');
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

pub fn formula_to_string(f: &Formula) -> String {
    let mut s = String::new();
    formula(&mut s, f, 0);
    s
}

fn is_eq_fix(fx: &FixPred) -> bool {
    fx.name == "Eq" && fx.origin.is_none() && crate::logic::leibniz(&fx.pvar.arity[0]).pvar.arity == fx.pvar.arity && {
        let probe = crate::logic::leibniz(&fx.pvar.arity[0]);
        Predicate::Fix(probe).alpha_eq(&Predicate::Fix(std::sync::Arc::new(fx.clone())))
    }
}

/// prec 0: top / right of `->` / quantifier body; 1: left of `->` or
/// operand of `or`; 2: operand of `and`. Atoms never parenthesize.
fn formula(out: &mut String, f: &Formula, prec: u8) {
    match f {
        Formula::Atom { pred, args } => atom(out, pred, args),
        Formula::Imp(a, b) => {
            let paren = prec >= 1;
            if paren {
                out.push('(');
            }
            formula(out, a, 1);
            out.push_str(" -> ");
            formula(out, b, 0);
            if paren {
                out.push(')');
            }
        }
        Formula::Or(a, b) => {
            let paren = prec >= 2;
            if paren {
                out.push('(');
            }
            formula(out, a, 2);
            out.push_str(" or ");
            formula(out, b, 1);
            if paren {
                out.push(')');
            }
        }
        Formula::And(a, b) => {
            let paren = prec >= 3;
            if paren {
                out.push('(');
            }
            formula(out, a, 3);
            out.push_str(" and ");
            formula(out, b, 2);
            if paren {
                out.push(')');
            }
        }
        Formula::All(v, b) => {
            out.push_str("all ");
            binder(out, v);
            out.push(' ');
            quantifier_body(out, b);
        }
        Formula::Ex(v, b) => {
            out.push_str("ex ");
            binder(out, v);
            out.push(' ');
            quantifier_body(out, b);
        }
    }
}

/// A quantifier body is an atom, another quantifier, or parenthesized:
/// the scope of an unparenthesized quantifier never crosses a connective.
fn quantifier_body(out: &mut String, b: &Formula) {
    match b {
        Formula::Atom { .. } | Formula::All(..) | Formula::Ex(..) => formula(out, b, 0),
        _ => {
            out.push('(');
            formula(out, b, 0);
            out.push(')');
        }
    }
}

fn binder(out: &mut String, v: &Var) {
    out.push_str(&v.name);
    out.push(':');
    ty(out, &v.ty, 1);
}

fn atom(out: &mut String, pred: &Predicate, args: &[Term]) {
    // Falsity and equality sugar.
    if let Predicate::Fix(fx) = pred {
        if args.len() == 2 && is_eq_fix(fx) {
            if let (Term::Con { alg: a1, name: n1, .. }, Term::Con { alg: a2, name: n2, .. }) =
                (&args[0], &args[1])
            {
                if a1 == "B" && a2 == "B" && n1 == "ff" && n2 == "tt" {
                    out.push('F');
                    return;
                }
            }
            term(out, &args[0], 1);
            out.push_str(" == ");
            term(out, &args[1], 1);
            return;
        }
    }
    pred_head(out, pred);
    for a in args {
        out.push(' ');
        term(out, a, 2);
    }
}

/// The predicate in head position of an atom.
fn pred_head(out: &mut String, pred: &Predicate) {
    match pred {
        Predicate::Var(p) => {
            out.push_str(&p.name);
            for _ in 0..p.primes {
                out.push('\'');
            }
        }
        Predicate::Compr { vars, body } => {
            out.push('{');
            for (i, v) in vars.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                binder(out, v);
            }
            out.push_str(" | ");
            formula(out, body, 0);
            out.push('}');
        }
        Predicate::Fix(fx) => {
            if !fx.name.is_empty() {
                out.push_str(&fx.name);
            } else {
                fix_structure(out, fx);
            }
        }
    }
}

pub fn pred_to_string(p: &Predicate) -> String {
    let mut s = String::new();
    pred_head(&mut s, p);
    s
}

/// Full structural display of a fixpoint: `mu X[T,..] (clause; ...)` or
/// `nu X[T] {x:T | A}`.
pub fn fix_to_string(fx: &FixPred) -> String {
    let mut s = String::new();
    fix_structure(&mut s, fx);
    s
}

fn fix_structure(out: &mut String, fx: &FixPred) {
    out.push_str(match fx.flavor {
        crate::logic::Flavor::Mu => "mu ",
        crate::logic::Flavor::Nu => "nu ",
    });
    out.push_str(&fx.pvar.name);
    for _ in 0..fx.pvar.primes {
        out.push('\'');
    }
    out.push('[');
    for (i, t) in fx.pvar.arity.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        ty(out, t, 0);
    }
    out.push(']');
    out.push(' ');
    match &fx.def {
        FixDef::Clauses(cs) => {
            out.push('(');
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                formula(out, &clause_formula(fx, c), 0);
            }
            out.push(')');
        }
        FixDef::Op { vars, body } => {
            out.push('{');
            for (i, v) in vars.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                binder(out, v);
            }
            out.push_str(" | ");
            formula(out, body, 0);
            out.push('}');
        }
    }
}

/// A clause as the formula `all binders (premises -> X heads)`.
pub fn clause_formula(fx: &FixPred, c: &Clause) -> Formula {
    let head = Predicate::Var(fx.pvar.clone()).apply(c.head.clone());
    crate::logic::alls(
        c.binders.iter().cloned(),
        crate::logic::imps(c.premises.clone(), head),
    )
}

/// Multi-line definition display: `Name := mu X[..] (\n  clause\n  ...)`,
/// used by the CLI and the golden shape tests.
pub fn fix_def_display(fx: &FixPred) -> String {
    let mut s = String::new();
    if !fx.name.is_empty() {
        s.push_str(&fx.name);
        s.push_str(" := ");
    }
    s.push_str(match fx.flavor {
        crate::logic::Flavor::Mu => "mu ",
        crate::logic::Flavor::Nu => "nu ",
    });
    s.push_str(&fx.pvar.name);
    for _ in 0..fx.pvar.primes {
        s.push('\'');
    }
    s.push('[');
    for (i, t) in fx.pvar.arity.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        ty(&mut s, t, 0);
    }
    s.push(']');
    match &fx.def {
        FixDef::Clauses(cs) => {
            s.push_str(" (\n");
            for c in cs {
                s.push_str("  ");
                formula(&mut s, &clause_formula(fx, c), 0);
                s.push('\n');
            }
            s.push(')');
        }
        FixDef::Op { vars, body } => {
            s.push_str(" {");
            for (i, v) in vars.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                binder(&mut s, v);
            }
            s.push_str(" | ");
            formula(&mut s, body, 0);
            s.push('}');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ev, numeral, std_sig};
    use crate::logic::{self, Predicate};
    use crate::syntax::{Term, Type, Var};

    fn nat() -> Type {
        Type::alg("N")
    }

    #[test]
    fn numerals_and_terms() {
        let _ = std_sig();
        assert_eq!(term_to_string(&numeral(3)), "3");
        let f = Term::abs(Var::new("x", nat()), Term::var("x", nat()));
        assert_eq!(term_to_string(&f), "\\x:N. x");
        let app = Term::app(f, numeral(2));
        assert_eq!(term_to_string(&app), "(\\x:N. x) 2");
    }

    #[test]
    fn formula_precedence() {
        let a = ev().apply(vec![numeral(0)]);
        let b = ev().apply(vec![numeral(2)]);
        let f = logic::imp(logic::and(a.clone(), b.clone()), logic::or(a.clone(), b.clone()));
        assert_eq!(formula_to_string(&f), "Ev 0 and Ev 2 -> Ev 0 or Ev 2");
        let g = logic::imp(logic::imp(a.clone(), b.clone()), a.clone());
        assert_eq!(formula_to_string(&g), "(Ev 0 -> Ev 2) -> Ev 0");
    }

    #[test]
    fn equality_and_falsity_sugar() {
        assert_eq!(formula_to_string(&logic::falsity()), "F");
        let e = logic::eq_atom(&nat(), numeral(1), numeral(1));
        assert_eq!(formula_to_string(&e), "1 == 1");
    }

    #[test]
    fn quantifier_display() {
        let n = Var::new("n", nat());
        let f = logic::all(n.clone(), logic::imp(ev().apply(vec![n.term()]), ev().apply(vec![Term::app(Term::con("N", "S", vec![]), Term::app(Term::con("N", "S", vec![]), n.term()))])));
        assert_eq!(formula_to_string(&f), "all n:N (Ev n -> Ev (S (S n)))");
    }

    #[test]
    fn fix_definition_display() {
        let fx = crate::corpus::ev_fix();
        let s = fix_def_display(&fx);
        assert_eq!(s, "Ev := mu X[N] (\n  X 0\n  all n:N (X n -> X (S (S n)))\n)");
    }

    #[test]
    fn anonymous_compr_display() {
        let n = Var::new("n", nat());
        let p = Predicate::compr(vec![n.clone()], logic::weak_neg(ev().apply(vec![n.term()])));
        // `apply` beta-reduces comprehensions, so build the atom directly.
        let f = Formula::Atom { pred: p, args: vec![numeral(4)] };
        assert_eq!(formula_to_string(&f), "{n:N | Ev n -> F} 4");
    }
}
