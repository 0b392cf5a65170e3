//! Simply typed partial terms over free algebras.
//!
//! Terms are built from typed variables, constructors of declared algebras,
//! program constants (defined by computation rules), abstraction and
//! application. Equality of terms is alpha-equality; the checker additionally
//! identifies terms up to beta reduction and computation rules (see
//! [`crate::rewrite`]).

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

/// Simple types: type variables, arrow types and (instantiated) algebras.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Type {
    Var(String),
    Arrow(Arc<Type>, Arc<Type>),
    /// An algebra applied to type arguments, e.g. `N` or `L(N)`.
    Alg { name: String, args: Vec<Type> },
}

impl Type {
    pub fn alg(name: &str) -> Type {
        Type::Alg { name: name.to_string(), args: vec![] }
    }

    pub fn alg1(name: &str, arg: Type) -> Type {
        Type::Alg { name: name.to_string(), args: vec![arg] }
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Arc::new(a), Arc::new(b))
    }

    /// Right-nested arrow `a1 -> ... -> an -> res`.
    pub fn arrows(args: &[Type], res: Type) -> Type {
        args.iter().rev().fold(res, |acc, a| Type::arrow(a.clone(), acc))
    }

    /// Splits `a1 -> ... -> an -> res` into (`[a1..an]`, `res`).
    pub fn uncurry(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Arrow(a, b) = cur {
            args.push(a.as_ref());
            cur = b.as_ref();
        }
        (args, cur)
    }

    pub fn subst_vars(&self, map: &HashMap<String, Type>) -> Type {
        match self {
            Type::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Type::Arrow(a, b) => Type::arrow(a.subst_vars(map), b.subst_vars(map)),
            Type::Alg { name, args } => Type::Alg {
                name: name.clone(),
                args: args.iter().map(|a| a.subst_vars(map)).collect(),
            },
        }
    }

    pub fn occurs_alg(&self, alg: &str) -> bool {
        match self {
            Type::Var(_) => false,
            Type::Arrow(a, b) => a.occurs_alg(alg) || b.occurs_alg(alg),
            Type::Alg { name, args } => name == alg || args.iter().any(|a| a.occurs_alg(alg)),
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::type_to_string(self))
    }
}

/// A term variable together with its type.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub ty: Type,
}

impl Var {
    pub fn new(name: &str, ty: Type) -> Var {
        Var { name: name.to_string(), ty }
    }

    pub fn term(&self) -> Term {
        Term::Var(self.clone())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.name, self.ty)
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    Var(Var),
    /// Constructor of `alg`, instantiated at the given type arguments.
    Con { alg: String, name: String, ty_args: Vec<Type> },
    /// Program constant; its type and rules live in the signature.
    PConst { name: String },
    Abs(Var, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::term_to_string(self))
    }
}

impl Term {
    pub fn var(name: &str, ty: Type) -> Term {
        Term::Var(Var::new(name, ty))
    }

    pub fn con(alg: &str, name: &str, ty_args: Vec<Type>) -> Term {
        Term::Con { alg: alg.to_string(), name: name.to_string(), ty_args }
    }

    pub fn pconst(name: &str) -> Term {
        Term::PConst { name: name.to_string() }
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn abs(v: Var, body: Term) -> Term {
        Term::Abs(v, Arc::new(body))
    }

    pub fn abss(vs: &[Var], body: Term) -> Term {
        vs.iter().rev().fold(body, |acc, v| Term::abs(v.clone(), acc))
    }

    /// Splits an application spine: `f a b c` becomes `(f, [a, b, c])`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f.as_ref();
        }
        args.reverse();
        (cur, args)
    }

    pub fn free_vars(&self) -> HashSet<String> {
        let mut acc = HashSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut acc);
        acc
    }

    pub(crate) fn collect_free_vars(&self, bound: &mut Vec<String>, acc: &mut HashSet<String>) {
        match self {
            Term::Var(v) => {
                if !bound.iter().any(|b| b == &v.name) {
                    acc.insert(v.name.clone());
                }
            }
            Term::Con { .. } | Term::PConst { .. } => {}
            Term::Abs(v, b) => {
                bound.push(v.name.clone());
                b.collect_free_vars(bound, acc);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free_vars(bound, acc);
                a.collect_free_vars(bound, acc);
            }
        }
    }

    /// Capture-avoiding simultaneous substitution of terms for free variables.
    pub fn subst(&self, map: &HashMap<String, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => map.get(&v.name).cloned().unwrap_or_else(|| self.clone()),
            Term::Con { .. } | Term::PConst { .. } => self.clone(),
            Term::App(f, a) => Term::app(f.subst(map), a.subst(map)),
            Term::Abs(v, b) => {
                let mut inner = map.clone();
                inner.remove(&v.name);
                if inner.is_empty() {
                    return self.clone();
                }
                // Rename the binder when a substituted term would capture it.
                let clash = inner
                    .values()
                    .any(|t| t.free_vars().contains(&v.name));
                if clash {
                    let mut avoid: HashSet<String> =
                        inner.values().flat_map(|t| t.free_vars()).collect();
                    avoid.extend(b.free_vars());
                    let fresh = fresh_name(&v.name, &avoid);
                    let nv = Var::new(&fresh, v.ty.clone());
                    let renamed = b.subst(&single(&v.name, nv.term()));
                    Term::abs(nv, renamed.subst(&inner))
                } else {
                    Term::abs(v.clone(), b.subst(&inner))
                }
            }
        }
    }

    pub fn subst1(&self, name: &str, t: &Term) -> Term {
        self.subst(&single(name, t.clone()))
    }

    /// Substitution of types for type variables (in binder annotations and
    /// constructor instantiations).
    pub fn subst_ty(&self, map: &HashMap<String, Type>) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var { name: v.name.clone(), ty: v.ty.subst_vars(map) }),
            Term::Con { alg, name, ty_args } => Term::Con {
                alg: alg.clone(),
                name: name.clone(),
                ty_args: ty_args.iter().map(|t| t.subst_vars(map)).collect(),
            },
            Term::PConst { .. } => self.clone(),
            Term::Abs(v, b) => Term::abs(
                Var { name: v.name.clone(), ty: v.ty.subst_vars(map) },
                b.subst_ty(map),
            ),
            Term::App(f, a) => Term::app(f.subst_ty(map), a.subst_ty(map)),
        }
    }

    /// Alpha-equality (total and decidable).
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_eq_terms(self, other, &mut Vec::new())
    }
}

pub(crate) fn alpha_eq_terms(a: &Term, b: &Term, env: &mut Vec<(String, String)>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                if l == &x.name || r == &y.name {
                    return l == &x.name && r == &y.name;
                }
            }
            x.name == y.name && x.ty == y.ty
        }
        (Term::Con { alg: a1, name: n1, ty_args: t1 }, Term::Con { alg: a2, name: n2, ty_args: t2 }) => {
            a1 == a2 && n1 == n2 && t1 == t2
        }
        (Term::PConst { name: n1 }, Term::PConst { name: n2 }) => n1 == n2,
        (Term::Abs(v1, b1), Term::Abs(v2, b2)) => {
            if v1.ty != v2.ty {
                return false;
            }
            env.push((v1.name.clone(), v2.name.clone()));
            let r = alpha_eq_terms(b1, b2, env);
            env.pop();
            r
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            alpha_eq_terms(f1, f2, env) && alpha_eq_terms(a1, a2, env)
        }
        _ => false,
    }
}

pub fn single(name: &str, t: Term) -> HashMap<String, Term> {
    let mut m = HashMap::new();
    m.insert(name.to_string(), t);
    m
}

/// Deterministic fresh-name supply: `hint`, `hint0`, `hint1`, ... skipping
/// everything in `avoid`.
pub fn fresh_name(hint: &str, avoid: &HashSet<String>) -> String {
    let base = hint.trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if base.is_empty() { "v" } else { base };
    if !avoid.contains(hint) {
        return hint.to_string();
    }
    for i in 0.. {
        let cand = format!("{base}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// A deterministic supply of fresh names with a persistent avoid set.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    avoid: HashSet<String>,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply::default()
    }

    pub fn avoiding(names: impl IntoIterator<Item = String>) -> NameSupply {
        NameSupply { avoid: names.into_iter().collect() }
    }

    pub fn reserve(&mut self, name: &str) {
        self.avoid.insert(name.to_string());
    }

    pub fn fresh(&mut self, hint: &str) -> String {
        let n = fresh_name(hint, &self.avoid);
        self.avoid.insert(n.clone());
        n
    }

    pub fn fresh_var(&mut self, hint: &str, ty: Type) -> Var {
        Var::new(&self.fresh(hint), ty)
    }
}

/// Collects every name occurring in a term (free, bound, constants); useful
/// to seed a [`NameSupply`].
pub fn all_names(t: &Term, acc: &mut BTreeSet<String>) {
    match t {
        Term::Var(v) => {
            acc.insert(v.name.clone());
        }
        Term::Con { name, .. } | Term::PConst { name } => {
            acc.insert(name.clone());
        }
        Term::Abs(v, b) => {
            acc.insert(v.name.clone());
            all_names(b, acc);
        }
        Term::App(f, a) => {
            all_names(f, acc);
            all_names(a, acc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Type {
        Type::alg("N")
    }

    #[test]
    fn alpha_equality_of_abstractions() {
        let t1 = Term::abs(Var::new("x", nat()), Term::var("x", nat()));
        let t2 = Term::abs(Var::new("y", nat()), Term::var("y", nat()));
        assert!(t1.alpha_eq(&t2));
        let t3 = Term::abs(Var::new("x", nat()), Term::var("z", nat()));
        assert!(!t1.alpha_eq(&t3));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (\x. y)[y := x]  ~->  \x'. x
        let t = Term::abs(Var::new("x", nat()), Term::var("y", nat()));
        let s = t.subst1("y", &Term::var("x", nat()));
        let expected = Term::abs(Var::new("z", nat()), Term::var("x", nat()));
        assert!(s.alpha_eq(&expected), "got {s:?}");
    }

    #[test]
    fn substitution_is_simultaneous() {
        // (x y)[x := y, y := x] swaps, it does not chain.
        let t = Term::app(Term::var("x", nat()), Term::var("y", nat()));
        let mut m = HashMap::new();
        m.insert("x".to_string(), Term::var("y", nat()));
        m.insert("y".to_string(), Term::var("x", nat()));
        let s = t.subst(&m);
        let expected = Term::app(Term::var("y", nat()), Term::var("x", nat()));
        assert!(s.alpha_eq(&expected));
    }

    #[test]
    fn fresh_names_are_deterministic() {
        let avoid: HashSet<String> = ["x".to_string(), "x0".to_string()].into();
        assert_eq!(fresh_name("x", &avoid), "x1");
        assert_eq!(fresh_name("x", &avoid), "x1");
        assert_eq!(fresh_name("y", &avoid), "y");
    }

    #[test]
    fn spine_roundtrip() {
        let f = Term::pconst("f");
        let t = Term::apps(f.clone(), [Term::var("a", nat()), Term::var("b", nat())]);
        let (head, args) = t.spine();
        assert!(head.alpha_eq(&f));
        assert_eq!(args.len(), 2);
    }
}
