//! Formulas and predicates of the kernel logic.
//!
//! Formulas are built from atoms (a predicate applied to terms), implication,
//! conjunction, disjunction (both primitive), and the two quantifiers.
//! Predicates are predicate variables (with a prime level), comprehension
//! terms `{x1..xn | A}` — identified with their beta expansion — and least or
//! greatest fixpoints. Fixpoints are given either by a list of clauses
//! (introduction rules) or directly by a strictly positive operator body.
//! Falsity is arithmetical: `F := (ff == tt)` at the booleans.

use crate::sig::Signature;
use crate::syntax::{alpha_eq_terms, fresh_name, Term, Type, Var};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// A predicate variable: name, prime level and arity.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PVar {
    pub name: String,
    pub primes: u32,
    pub arity: Vec<Type>,
}

impl PVar {
    pub fn new(name: &str, arity: Vec<Type>) -> PVar {
        PVar { name: name.to_string(), primes: 0, arity }
    }

    pub fn primed(&self, extra: u32) -> PVar {
        PVar { name: self.name.clone(), primes: self.primes + extra, arity: self.arity.clone() }
    }

    pub fn key(&self) -> PKey {
        (self.name.clone(), self.primes)
    }
}

impl fmt::Debug for PVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, "'".repeat(self.primes as usize))
    }
}

/// Identity of a predicate variable: name plus prime level.
pub type PKey = (String, u32);

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Flavor {
    Mu,
    Nu,
}

impl Flavor {
    pub fn flip(self) -> Flavor {
        match self {
            Flavor::Mu => Flavor::Nu,
            Flavor::Nu => Flavor::Mu,
        }
    }
}

/// One introduction rule of a clause-form fixpoint:
/// `all binders. premises -> X(head)`.
#[derive(Clone, Serialize, Deserialize)]
pub struct Clause {
    pub binders: Vec<Var>,
    pub premises: Vec<Formula>,
    pub head: Vec<Term>,
}

/// Bookkeeping for one clause of a negated fixpoint: which binders were
/// solved against head components and which guard equations remain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NegInfo {
    /// For each original binder: the head component it was solved against.
    pub solved: Vec<Option<usize>>,
    /// Indices of original binders that remain quantified.
    pub kept_binders: Vec<usize>,
    /// Head components that remain as guard equations.
    pub kept_eqs: Vec<usize>,
}

#[derive(Clone, Serialize, Deserialize)]
pub enum Origin {
    /// Produced by the strong-negation transform from a clause-form fixpoint.
    NegClauses { base: Arc<FixPred>, infos: Vec<NegInfo> },
    /// Produced by the strong-negation transform from an operator-form
    /// fixpoint.
    NegOp { base: Arc<FixPred> },
}

#[derive(Clone, Serialize, Deserialize)]
pub enum FixDef {
    Clauses(Vec<Clause>),
    /// Operator form: the fixpoint of `{vars | body}` where `body` mentions
    /// the bound predicate variable strictly positively.
    Op { vars: Vec<Var>, body: Formula },
}

#[derive(Clone, Serialize, Deserialize)]
pub struct FixPred {
    pub flavor: Flavor,
    /// Display name; empty for anonymous fixpoints.
    pub name: String,
    /// The bound predicate variable (also fixes the arity).
    pub pvar: PVar,
    pub def: FixDef,
    pub origin: Option<Origin>,
}

impl FixPred {
    pub fn arity(&self) -> &[Type] {
        &self.pvar.arity
    }
}

impl fmt::Debug for FixPred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::pred_to_string(&Predicate::Fix(Arc::new(self.clone()))))
    }
}

#[derive(Clone, Serialize, Deserialize)]
pub enum Predicate {
    Var(PVar),
    Compr { vars: Vec<Var>, body: Arc<Formula> },
    Fix(Arc<FixPred>),
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::pred_to_string(self))
    }
}

impl Predicate {
    pub fn arity(&self) -> Vec<Type> {
        match self {
            Predicate::Var(p) => p.arity.clone(),
            Predicate::Compr { vars, .. } => vars.iter().map(|v| v.ty.clone()).collect(),
            Predicate::Fix(f) => f.pvar.arity.clone(),
        }
    }

    pub fn compr(vars: Vec<Var>, body: Formula) -> Predicate {
        Predicate::Compr { vars, body: Arc::new(body) }
    }

    /// Apply to arguments. A comprehension is beta-reduced on the spot, so
    /// `{x | A(x)} t` is never materialized as an atom.
    pub fn apply(&self, args: Vec<Term>) -> Formula {
        if let Predicate::Compr { vars, body } = self {
            if vars.len() == args.len() {
                let map: TermSubst =
                    vars.iter().map(|v| v.name.clone()).zip(args).collect();
                return body.subst_terms(&map);
            }
        }
        Formula::Atom { pred: self.clone(), args }
    }
}

#[derive(Clone, Serialize, Deserialize)]
pub enum Formula {
    Atom { pred: Predicate, args: Vec<Term> },
    Imp(Arc<Formula>, Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    All(Var, Arc<Formula>),
    Ex(Var, Arc<Formula>),
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::formula_to_string(self))
    }
}

pub fn imp(a: Formula, b: Formula) -> Formula {
    Formula::Imp(Arc::new(a), Arc::new(b))
}

pub fn imps(premises: Vec<Formula>, concl: Formula) -> Formula {
    premises.into_iter().rev().fold(concl, |acc, p| imp(p, acc))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Arc::new(a), Arc::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Arc::new(a), Arc::new(b))
}

pub fn all(v: Var, b: Formula) -> Formula {
    Formula::All(v, Arc::new(b))
}

pub fn alls(vs: impl IntoIterator<Item = Var>, b: Formula) -> Formula {
    let vs: Vec<Var> = vs.into_iter().collect();
    vs.into_iter().rev().fold(b, |acc, v| all(v, acc))
}

pub fn ex(v: Var, b: Formula) -> Formula {
    Formula::Ex(v, Arc::new(b))
}

pub fn exs(vs: impl IntoIterator<Item = Var>, b: Formula) -> Formula {
    let vs: Vec<Var> = vs.into_iter().collect();
    vs.into_iter().rev().fold(b, |acc, v| ex(v, acc))
}

/// Right-nested conjunction of a non-empty list; `truth()` if empty.
pub fn and_all(mut fs: Vec<Formula>) -> Formula {
    if fs.is_empty() {
        return truth();
    }
    let last = fs.pop().unwrap();
    fs.into_iter().rev().fold(last, |acc, f| and(f, acc))
}

/// Right-nested disjunction of a non-empty list; panics on empty input
/// (an empty disjunction would be falsity, which callers build explicitly).
pub fn or_all(mut fs: Vec<Formula>) -> Formula {
    assert!(!fs.is_empty(), "empty disjunction");
    let last = fs.pop().unwrap();
    fs.into_iter().rev().fold(last, |acc, f| or(f, acc))
}

pub fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(a, b) => {
            let mut v = vec![a.as_ref()];
            v.extend(conjuncts(b));
            v
        }
        _ => vec![f],
    }
}

pub fn disjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Or(a, b) => {
            let mut v = vec![a.as_ref()];
            v.extend(disjuncts(b));
            v
        }
        _ => vec![f],
    }
}

// ---------------------------------------------------------------------------
// Leibniz equality, falsity, weak negation
// ---------------------------------------------------------------------------

pub fn bool_ty() -> Type {
    Type::alg("B")
}

pub fn tt() -> Term {
    Term::con("B", "tt", vec![])
}

pub fn ff() -> Term {
    Term::con("B", "ff", vec![])
}

/// Leibniz equality at a type: the least reflexive relation,
/// `Eq := mu X (all x. X(x, x))`.
pub fn leibniz(ty: &Type) -> Arc<FixPred> {
    let x = Var::new("x", ty.clone());
    Arc::new(FixPred {
        flavor: Flavor::Mu,
        name: "Eq".to_string(),
        pvar: PVar::new("X", vec![ty.clone(), ty.clone()]),
        def: FixDef::Clauses(vec![Clause {
            binders: vec![x.clone()],
            premises: vec![],
            head: vec![x.term(), x.term()],
        }]),
        origin: None,
    })
}

pub fn eq_atom(ty: &Type, a: Term, b: Term) -> Formula {
    Formula::Atom { pred: Predicate::Fix(leibniz(ty)), args: vec![a, b] }
}

/// Componentwise vector equality (a conjunction; single component bare).
pub fn vec_eq(tys: &[Type], lhs: &[Term], rhs: &[Term]) -> Formula {
    assert_eq!(tys.len(), lhs.len());
    assert_eq!(tys.len(), rhs.len());
    assert!(!tys.is_empty(), "empty vector equality");
    and_all(
        tys.iter()
            .zip(lhs.iter().zip(rhs.iter()))
            .map(|(ty, (a, b))| eq_atom(ty, a.clone(), b.clone()))
            .collect(),
    )
}

/// Arithmetical falsity `F := ff == tt`.
pub fn falsity() -> Formula {
    eq_atom(&bool_ty(), ff(), tt())
}

/// `tt == tt`; the unit for empty conjunctions.
pub fn truth() -> Formula {
    eq_atom(&bool_ty(), tt(), tt())
}

/// Weak (minimal-logic) negation `A -> F`.
pub fn weak_neg(a: Formula) -> Formula {
    imp(a, falsity())
}

pub fn is_falsity(f: &Formula) -> bool {
    f.alpha_eq(&falsity())
}

// ---------------------------------------------------------------------------
// Alpha equality
// ---------------------------------------------------------------------------

struct AlphaEnv {
    terms: Vec<(String, String)>,
    preds: Vec<(PKey, PKey)>,
}

impl Formula {
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        let mut env = AlphaEnv { terms: Vec::new(), preds: Vec::new() };
        alpha_formula(self, other, &mut env)
    }
}

impl Predicate {
    pub fn alpha_eq(&self, other: &Predicate) -> bool {
        let mut env = AlphaEnv { terms: Vec::new(), preds: Vec::new() };
        alpha_pred(self, other, &mut env)
    }
}

fn alpha_formula(a: &Formula, b: &Formula, env: &mut AlphaEnv) -> bool {
    match (a, b) {
        (Formula::Atom { pred: p1, args: a1 }, Formula::Atom { pred: p2, args: a2 }) => {
            a1.len() == a2.len()
                && alpha_pred(p1, p2, env)
                && a1.iter().zip(a2).all(|(x, y)| alpha_eq_terms(x, y, &mut env.terms))
        }
        (Formula::Imp(x1, y1), Formula::Imp(x2, y2))
        | (Formula::And(x1, y1), Formula::And(x2, y2))
        | (Formula::Or(x1, y1), Formula::Or(x2, y2)) => {
            alpha_formula(x1, x2, env) && alpha_formula(y1, y2, env)
        }
        (Formula::All(v1, b1), Formula::All(v2, b2))
        | (Formula::Ex(v1, b1), Formula::Ex(v2, b2)) => {
            if v1.ty != v2.ty {
                return false;
            }
            env.terms.push((v1.name.clone(), v2.name.clone()));
            let r = alpha_formula(b1, b2, env);
            env.terms.pop();
            r
        }
        _ => false,
    }
}

fn alpha_pred(a: &Predicate, b: &Predicate, env: &mut AlphaEnv) -> bool {
    match (a, b) {
        (Predicate::Var(p1), Predicate::Var(p2)) => {
            if p1.arity != p2.arity {
                return false;
            }
            let k1 = p1.key();
            let k2 = p2.key();
            for (l, r) in env.preds.iter().rev() {
                if *l == k1 || *r == k2 {
                    return *l == k1 && *r == k2;
                }
            }
            k1 == k2
        }
        (Predicate::Compr { vars: v1, body: b1 }, Predicate::Compr { vars: v2, body: b2 }) => {
            if v1.len() != v2.len() || v1.iter().zip(v2).any(|(x, y)| x.ty != y.ty) {
                return false;
            }
            for (x, y) in v1.iter().zip(v2) {
                env.terms.push((x.name.clone(), y.name.clone()));
            }
            let r = alpha_formula(b1, b2, env);
            for _ in v1 {
                env.terms.pop();
            }
            r
        }
        (Predicate::Fix(f1), Predicate::Fix(f2)) => {
            if f1.flavor != f2.flavor || f1.pvar.arity != f2.pvar.arity {
                return false;
            }
            env.preds.push((f1.pvar.key(), f2.pvar.key()));
            let r = match (&f1.def, &f2.def) {
                (FixDef::Clauses(c1), FixDef::Clauses(c2)) => {
                    c1.len() == c2.len()
                        && c1.iter().zip(c2).all(|(x, y)| alpha_clause(x, y, env))
                }
                (FixDef::Op { vars: v1, body: b1 }, FixDef::Op { vars: v2, body: b2 }) => {
                    if v1.len() != v2.len() || v1.iter().zip(v2.iter()).any(|(x, y)| x.ty != y.ty) {
                        false
                    } else {
                        for (x, y) in v1.iter().zip(v2.iter()) {
                            env.terms.push((x.name.clone(), y.name.clone()));
                        }
                        let r = alpha_formula(b1, b2, env);
                        for _ in v1 {
                            env.terms.pop();
                        }
                        r
                    }
                }
                _ => false,
            };
            env.preds.pop();
            r
        }
        _ => false,
    }
}

fn alpha_clause(a: &Clause, b: &Clause, env: &mut AlphaEnv) -> bool {
    if a.binders.len() != b.binders.len()
        || a.premises.len() != b.premises.len()
        || a.head.len() != b.head.len()
        || a.binders.iter().zip(&b.binders).any(|(x, y)| x.ty != y.ty)
    {
        return false;
    }
    for (x, y) in a.binders.iter().zip(&b.binders) {
        env.terms.push((x.name.clone(), y.name.clone()));
    }
    let r = a.premises.iter().zip(&b.premises).all(|(x, y)| alpha_formula(x, y, env))
        && a.head.iter().zip(&b.head).all(|(x, y)| alpha_eq_terms(x, y, &mut env.terms));
    for _ in &a.binders {
        env.terms.pop();
    }
    r
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

impl Formula {
    pub fn free_term_vars(&self) -> HashSet<String> {
        let mut acc = HashSet::new();
        self.collect_ftv(&mut Vec::new(), &mut acc);
        acc
    }

    fn collect_ftv(&self, bound: &mut Vec<String>, acc: &mut HashSet<String>) {
        match self {
            Formula::Atom { pred, args } => {
                pred.collect_ftv(bound, acc);
                for a in args {
                    a.collect_free_vars(bound, acc);
                }
            }
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_ftv(bound, acc);
                b.collect_ftv(bound, acc);
            }
            Formula::All(v, b) | Formula::Ex(v, b) => {
                bound.push(v.name.clone());
                b.collect_ftv(bound, acc);
                bound.pop();
            }
        }
    }

    /// Free predicate variables.
    pub fn free_pvars(&self) -> BTreeSet<PKey> {
        let mut acc = BTreeSet::new();
        self.collect_fpv(&mut Vec::new(), &mut acc);
        acc
    }

    fn collect_fpv(&self, bound: &mut Vec<PKey>, acc: &mut BTreeSet<PKey>) {
        match self {
            Formula::Atom { pred, args: _ } => pred.collect_fpv(bound, acc),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_fpv(bound, acc);
                b.collect_fpv(bound, acc);
            }
            Formula::All(_, b) | Formula::Ex(_, b) => b.collect_fpv(bound, acc),
        }
    }
}

impl Predicate {
    pub fn free_term_vars(&self) -> HashSet<String> {
        let mut acc = HashSet::new();
        self.collect_ftv(&mut Vec::new(), &mut acc);
        acc
    }

    fn collect_ftv(&self, bound: &mut Vec<String>, acc: &mut HashSet<String>) {
        match self {
            Predicate::Var(_) => {}
            Predicate::Compr { vars, body } => {
                for v in vars {
                    bound.push(v.name.clone());
                }
                body.collect_ftv(bound, acc);
                for _ in vars {
                    bound.pop();
                }
            }
            Predicate::Fix(f) => match &f.def {
                FixDef::Clauses(cs) => {
                    for c in cs {
                        for v in &c.binders {
                            bound.push(v.name.clone());
                        }
                        for p in &c.premises {
                            p.collect_ftv(bound, acc);
                        }
                        for t in &c.head {
                            t.collect_free_vars(bound, acc);
                        }
                        for _ in &c.binders {
                            bound.pop();
                        }
                    }
                }
                FixDef::Op { vars, body } => {
                    for v in vars {
                        bound.push(v.name.clone());
                    }
                    body.collect_ftv(bound, acc);
                    for _ in vars {
                        bound.pop();
                    }
                }
            },
        }
    }

    pub fn free_pvars(&self) -> BTreeSet<PKey> {
        let mut acc = BTreeSet::new();
        self.collect_fpv(&mut Vec::new(), &mut acc);
        acc
    }

    fn collect_fpv(&self, bound: &mut Vec<PKey>, acc: &mut BTreeSet<PKey>) {
        match self {
            Predicate::Var(p) => {
                let k = p.key();
                if !bound.contains(&k) {
                    acc.insert(k);
                }
            }
            Predicate::Compr { body, .. } => body.collect_fpv(bound, acc),
            Predicate::Fix(f) => {
                bound.push(f.pvar.key());
                match &f.def {
                    FixDef::Clauses(cs) => {
                        for c in cs {
                            for p in &c.premises {
                                p.collect_fpv(bound, acc);
                            }
                        }
                    }
                    FixDef::Op { body, .. } => body.collect_fpv(bound, acc),
                }
                bound.pop();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

pub type TermSubst = HashMap<String, Term>;
pub type PredSubst = HashMap<PKey, Predicate>;

impl Formula {
    /// Capture-avoiding substitution of terms for free term variables.
    pub fn subst_terms(&self, map: &TermSubst) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atom { pred, args } => Formula::Atom {
                pred: pred.subst_terms(map),
                args: args.iter().map(|t| t.subst(map)).collect(),
            },
            Formula::Imp(a, b) => imp(a.subst_terms(map), b.subst_terms(map)),
            Formula::And(a, b) => and(a.subst_terms(map), b.subst_terms(map)),
            Formula::Or(a, b) => or(a.subst_terms(map), b.subst_terms(map)),
            Formula::All(v, b) => {
                let (v2, b2) = subst_under_binder(v, b, map);
                all(v2, b2)
            }
            Formula::Ex(v, b) => {
                let (v2, b2) = subst_under_binder(v, b, map);
                ex(v2, b2)
            }
        }
    }

    pub fn subst_term1(&self, name: &str, t: &Term) -> Formula {
        self.subst_terms(&crate::syntax::single(name, t.clone()))
    }

    /// Substitution of predicates for free predicate variables. The result
    /// is validated for positivity of fixpoint-bound variables; violating
    /// substitutions are inadmissible.
    pub fn subst_pvars(&self, map: &PredSubst) -> Result<Formula, LogicError> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let f = self.subst_pvars_raw(map);
        validate_formula_positivity(&f)?;
        Ok(f)
    }

    pub(crate) fn subst_pvars_raw(&self, map: &PredSubst) -> Formula {
        match self {
            Formula::Atom { pred, args } => {
                let p2 = pred.subst_pvars_raw(map);
                p2.apply(args.clone())
            }
            Formula::Imp(a, b) => imp(a.subst_pvars_raw(map), b.subst_pvars_raw(map)),
            Formula::And(a, b) => and(a.subst_pvars_raw(map), b.subst_pvars_raw(map)),
            Formula::Or(a, b) => or(a.subst_pvars_raw(map), b.subst_pvars_raw(map)),
            Formula::All(v, b) => {
                let (v2, b2) = pvar_subst_under_binder(v, b, map);
                all(v2, b2)
            }
            Formula::Ex(v, b) => {
                let (v2, b2) = pvar_subst_under_binder(v, b, map);
                ex(v2, b2)
            }
        }
    }
}

/// Free term variables occurring in the predicates of a substitution range.
fn range_ftv(map: &PredSubst) -> HashSet<String> {
    let mut acc = HashSet::new();
    for p in map.values() {
        p.collect_ftv(&mut Vec::new(), &mut acc);
    }
    acc
}

fn subst_under_binder(v: &Var, b: &Formula, map: &TermSubst) -> (Var, Formula) {
    let mut inner = map.clone();
    inner.remove(&v.name);
    if inner.is_empty() {
        return (v.clone(), b.clone());
    }
    let clash = inner.values().any(|t| t.free_vars().contains(&v.name));
    if clash {
        let mut avoid: HashSet<String> = inner.values().flat_map(|t| t.free_vars()).collect();
        avoid.extend(b.free_term_vars());
        let nv = Var::new(&fresh_name(&v.name, &avoid), v.ty.clone());
        let renamed = b.subst_term1(&v.name, &nv.term());
        (nv, renamed.subst_terms(&inner))
    } else {
        (v.clone(), b.subst_terms(&inner))
    }
}

fn pvar_subst_under_binder(v: &Var, b: &Formula, map: &PredSubst) -> (Var, Formula) {
    let clash = range_ftv(map).contains(&v.name);
    if clash {
        let mut avoid = range_ftv(map);
        avoid.extend(b.free_term_vars());
        let nv = Var::new(&fresh_name(&v.name, &avoid), v.ty.clone());
        let renamed = b.subst_term1(&v.name, &nv.term());
        (nv, renamed.subst_pvars_raw(map))
    } else {
        (v.clone(), b.subst_pvars_raw(map))
    }
}

impl Predicate {
    pub fn subst_terms(&self, map: &TermSubst) -> Predicate {
        match self {
            Predicate::Var(_) => self.clone(),
            Predicate::Compr { vars, body } => {
                let (vars2, body2) = subst_under_binders(vars, body, map);
                Predicate::compr(vars2, body2)
            }
            Predicate::Fix(f) => {
                // Clause binders / operator vars shield their scopes; handle
                // like ordinary binders.
                let def = match &f.def {
                    FixDef::Clauses(cs) => FixDef::Clauses(
                        cs.iter()
                            .map(|c| {
                                let mut inner = map.clone();
                                for v in &c.binders {
                                    inner.remove(&v.name);
                                }
                                // Binder renaming on clash.
                                let clash = c
                                    .binders
                                    .iter()
                                    .any(|v| inner.values().any(|t| t.free_vars().contains(&v.name)));
                                if clash {
                                    let mut avoid: HashSet<String> =
                                        inner.values().flat_map(|t| t.free_vars()).collect();
                                    for p in &c.premises {
                                        avoid.extend(p.free_term_vars());
                                    }
                                    for h in &c.head {
                                        avoid.extend(h.free_vars());
                                    }
                                    let mut ren = TermSubst::new();
                                    let mut nb = Vec::new();
                                    for v in &c.binders {
                                        let nv = Var::new(&fresh_name(&v.name, &avoid), v.ty.clone());
                                        avoid.insert(nv.name.clone());
                                        ren.insert(v.name.clone(), nv.term());
                                        nb.push(nv);
                                    }
                                    Clause {
                                        binders: nb,
                                        premises: c
                                            .premises
                                            .iter()
                                            .map(|p| p.subst_terms(&ren).subst_terms(&inner))
                                            .collect(),
                                        head: c
                                            .head
                                            .iter()
                                            .map(|h| h.subst(&ren).subst(&inner))
                                            .collect(),
                                    }
                                } else {
                                    Clause {
                                        binders: c.binders.clone(),
                                        premises: c.premises.iter().map(|p| p.subst_terms(&inner)).collect(),
                                        head: c.head.iter().map(|h| h.subst(&inner)).collect(),
                                    }
                                }
                            })
                            .collect(),
                    ),
                    FixDef::Op { vars, body } => {
                        let (vars2, body2) = subst_under_binders(vars, body, map);
                        FixDef::Op { vars: vars2, body: body2 }
                    }
                };
                Predicate::Fix(Arc::new(FixPred {
                    flavor: f.flavor,
                    name: f.name.clone(),
                    pvar: f.pvar.clone(),
                    def,
                    origin: f.origin.clone(),
                }))
            }
        }
    }

    pub fn subst_pvars(&self, map: &PredSubst) -> Result<Predicate, LogicError> {
        let p = self.subst_pvars_raw(map);
        validate_pred_positivity(&p)?;
        Ok(p)
    }

    pub(crate) fn subst_pvars_raw(&self, map: &PredSubst) -> Predicate {
        match self {
            Predicate::Var(p) => map.get(&p.key()).cloned().unwrap_or_else(|| self.clone()),
            Predicate::Compr { vars, body } => {
                // Term-binder capture against the range.
                let ftv = range_ftv(map);
                if vars.iter().any(|v| ftv.contains(&v.name)) {
                    let mut avoid = ftv;
                    avoid.extend(body.free_term_vars());
                    let mut ren = TermSubst::new();
                    let mut nvars = Vec::new();
                    for v in vars {
                        let nv = Var::new(&fresh_name(&v.name, &avoid), v.ty.clone());
                        avoid.insert(nv.name.clone());
                        ren.insert(v.name.clone(), nv.term());
                        nvars.push(nv);
                    }
                    Predicate::compr(nvars, body.subst_terms(&ren).subst_pvars_raw(map))
                } else {
                    Predicate::compr(vars.clone(), body.subst_pvars_raw(map))
                }
            }
            Predicate::Fix(f) => {
                let mut inner = map.clone();
                inner.remove(&f.pvar.key());
                if inner.is_empty() {
                    return self.clone();
                }
                // Rename the bound predicate variable if the range captures it.
                let range_fpv: BTreeSet<PKey> =
                    inner.values().flat_map(|p| p.free_pvars()).collect();
                let (pvar, def) = if range_fpv.contains(&f.pvar.key()) {
                    let used: HashSet<String> =
                        range_fpv.iter().map(|(n, _)| n.clone()).collect();
                    let fresh = fresh_name(&f.pvar.name, &used);
                    let npvar = PVar { name: fresh, primes: f.pvar.primes, arity: f.pvar.arity.clone() };
                    let ren: PredSubst = std::iter::once((
                        f.pvar.key(),
                        Predicate::Var(npvar.clone()),
                    ))
                    .collect();
                    (npvar, rename_def(&f.def, &ren))
                } else {
                    (f.pvar.clone(), f.def.clone())
                };
                let def = match def {
                    FixDef::Clauses(cs) => FixDef::Clauses(
                        cs.iter()
                            .map(|c| Clause {
                                binders: c.binders.clone(),
                                premises: c.premises.iter().map(|p| p.subst_pvars_raw(&inner)).collect(),
                                head: c.head.clone(),
                            })
                            .collect(),
                    ),
                    FixDef::Op { vars, body } => FixDef::Op {
                        vars,
                        body: body.subst_pvars_raw(&inner),
                    },
                };
                let origin = match &f.origin {
                    Some(Origin::NegClauses { base, infos }) => {
                        if let Predicate::Fix(b2) = Predicate::Fix(base.clone()).subst_pvars_raw(&inner) {
                            Some(Origin::NegClauses { base: b2, infos: infos.clone() })
                        } else {
                            None
                        }
                    }
                    Some(Origin::NegOp { base }) => {
                        if let Predicate::Fix(b2) = Predicate::Fix(base.clone()).subst_pvars_raw(&inner) {
                            Some(Origin::NegOp { base: b2 })
                        } else {
                            None
                        }
                    }
                    None => None,
                };
                Predicate::Fix(Arc::new(FixPred {
                    flavor: f.flavor,
                    name: f.name.clone(),
                    pvar,
                    def,
                    origin,
                }))
            }
        }
    }
}

fn rename_def(def: &FixDef, ren: &PredSubst) -> FixDef {
    match def {
        FixDef::Clauses(cs) => FixDef::Clauses(
            cs.iter()
                .map(|c| Clause {
                    binders: c.binders.clone(),
                    premises: c.premises.iter().map(|p| p.subst_pvars_raw(ren)).collect(),
                    head: c.head.clone(),
                })
                .collect(),
        ),
        FixDef::Op { vars, body } => {
            FixDef::Op { vars: vars.clone(), body: body.subst_pvars_raw(ren) }
        }
    }
}

fn subst_under_binders(vars: &[Var], body: &Formula, map: &TermSubst) -> (Vec<Var>, Formula) {
    let mut inner = map.clone();
    for v in vars {
        inner.remove(&v.name);
    }
    if inner.is_empty() {
        return (vars.to_vec(), body.clone());
    }
    let clash = vars
        .iter()
        .any(|v| inner.values().any(|t| t.free_vars().contains(&v.name)));
    if clash {
        let mut avoid: HashSet<String> = inner.values().flat_map(|t| t.free_vars()).collect();
        avoid.extend(body.free_term_vars());
        let mut ren = TermSubst::new();
        let mut nvars = Vec::new();
        for v in vars {
            let nv = Var::new(&fresh_name(&v.name, &avoid), v.ty.clone());
            avoid.insert(nv.name.clone());
            ren.insert(v.name.clone(), nv.term());
            nvars.push(nv);
        }
        (nvars, body.subst_terms(&ren).subst_terms(&inner))
    } else {
        (vars.to_vec(), body.subst_terms(&inner))
    }
}

// ---------------------------------------------------------------------------
// Predicate-variable occurrence sets
// ---------------------------------------------------------------------------

/// The three occurrence sets of predicate variables in a formula:
/// `fp` — occurring free anywhere; `nsp` — having at least one occurrence
/// that is not strictly positive; `pp` — the strictly positive *parts*
/// (variables whose atoms survive descending only through right-hand sides
/// of implications, conjunction, disjunction, quantifiers and fixpoint
/// clauses).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PvarSets {
    pub fp: BTreeSet<PKey>,
    pub nsp: BTreeSet<PKey>,
    pub pp: BTreeSet<PKey>,
}

impl PvarSets {
    /// A variable is "at most strictly positive" iff it has no
    /// non-strictly-positive occurrence.
    pub fn sp_contains(&self, k: &PKey) -> bool {
        !self.nsp.contains(k)
    }
}

pub fn pvar_sets(f: &Formula) -> PvarSets {
    let mut s = PvarSets::default();
    sets_formula(f, &mut Vec::new(), &mut s);
    s
}

pub fn pvar_sets_pred(p: &Predicate) -> PvarSets {
    let mut s = PvarSets::default();
    sets_pred(p, &mut Vec::new(), &mut s);
    s
}

fn sets_formula(f: &Formula, bound: &mut Vec<PKey>, out: &mut PvarSets) {
    match f {
        Formula::Atom { pred, .. } => sets_pred(pred, bound, out),
        Formula::Imp(a, b) => {
            // Everything free on the left loses strict positivity; the
            // strictly positive parts come from the right only.
            let mut left = PvarSets::default();
            sets_formula(a, bound, &mut left);
            out.fp.extend(left.fp.iter().cloned());
            out.nsp.extend(left.fp.iter().cloned());
            sets_formula(b, bound, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            sets_formula(a, bound, out);
            sets_formula(b, bound, out);
        }
        Formula::All(_, b) | Formula::Ex(_, b) => sets_formula(b, bound, out),
    }
}

fn sets_pred(p: &Predicate, bound: &mut Vec<PKey>, out: &mut PvarSets) {
    match p {
        Predicate::Var(pv) => {
            let k = pv.key();
            if !bound.contains(&k) {
                out.fp.insert(k.clone());
                out.pp.insert(k);
            }
        }
        Predicate::Compr { body, .. } => sets_formula(body, bound, out),
        Predicate::Fix(fx) => {
            bound.push(fx.pvar.key());
            match &fx.def {
                FixDef::Clauses(cs) => {
                    for c in cs {
                        for pr in &c.premises {
                            sets_formula(pr, bound, out);
                        }
                    }
                }
                FixDef::Op { body, .. } => sets_formula(body, bound, out),
            }
            bound.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Fixpoint construction and the uniform clause form
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogicError {
    #[error("clause {clause}: bound predicate variable occurs non-strictly-positively in premise {premise}")]
    Positivity { clause: usize, premise: usize },
    #[error("operator body mentions the bound predicate variable non-strictly-positively")]
    OpPositivity,
    #[error("clause {clause}: head has {got} arguments, expected {want}")]
    HeadArity { clause: usize, got: usize, want: usize },
    #[error("inadmissible predicate substitution: {0}")]
    Inadmissible(String),
    #[error("{0}")]
    Other(String),
}

pub fn mk_fix(
    flavor: Flavor,
    name: &str,
    pvar: PVar,
    clauses: Vec<Clause>,
) -> Result<Arc<FixPred>, LogicError> {
    for (i, c) in clauses.iter().enumerate() {
        if c.head.len() != pvar.arity.len() {
            return Err(LogicError::HeadArity {
                clause: i,
                got: c.head.len(),
                want: pvar.arity.len(),
            });
        }
        for (j, p) in c.premises.iter().enumerate() {
            let s = pvar_sets(p);
            if s.nsp.contains(&pvar.key()) {
                return Err(LogicError::Positivity { clause: i, premise: j });
            }
        }
    }
    Ok(Arc::new(FixPred {
        flavor,
        name: name.to_string(),
        pvar,
        def: FixDef::Clauses(clauses),
        origin: None,
    }))
}

pub fn mk_inductive(name: &str, pvar: PVar, clauses: Vec<Clause>) -> Result<Arc<FixPred>, LogicError> {
    mk_fix(Flavor::Mu, name, pvar, clauses)
}

pub fn mk_coinductive(name: &str, pvar: PVar, clauses: Vec<Clause>) -> Result<Arc<FixPred>, LogicError> {
    mk_fix(Flavor::Nu, name, pvar, clauses)
}

pub fn mk_fix_op(
    flavor: Flavor,
    name: &str,
    pvar: PVar,
    vars: Vec<Var>,
    body: Formula,
) -> Result<Arc<FixPred>, LogicError> {
    let s = pvar_sets(&body);
    if s.nsp.contains(&pvar.key()) {
        return Err(LogicError::OpPositivity);
    }
    Ok(Arc::new(FixPred {
        flavor,
        name: name.to_string(),
        pvar,
        def: FixDef::Op { vars, body },
        origin: None,
    }))
}

fn validate_formula_positivity(f: &Formula) -> Result<(), LogicError> {
    match f {
        Formula::Atom { pred, .. } => validate_pred_positivity(pred),
        Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            validate_formula_positivity(a)?;
            validate_formula_positivity(b)
        }
        Formula::All(_, b) | Formula::Ex(_, b) => validate_formula_positivity(b),
    }
}

fn validate_pred_positivity(p: &Predicate) -> Result<(), LogicError> {
    match p {
        Predicate::Var(_) => Ok(()),
        Predicate::Compr { body, .. } => validate_formula_positivity(body),
        Predicate::Fix(fx) => {
            let key = fx.pvar.key();
            match &fx.def {
                FixDef::Clauses(cs) => {
                    for (i, c) in cs.iter().enumerate() {
                        for (j, pr) in c.premises.iter().enumerate() {
                            if pvar_sets(pr).nsp.contains(&key) {
                                return Err(LogicError::Inadmissible(format!(
                                    "bound variable of `{}` becomes non-strictly-positive in clause {i}, premise {j}",
                                    if fx.name.is_empty() { "<anon>" } else { &fx.name }
                                )));
                            }
                            validate_formula_positivity(pr)?;
                        }
                    }
                    Ok(())
                }
                FixDef::Op { body, .. } => {
                    if pvar_sets(body).nsp.contains(&key) {
                        return Err(LogicError::Inadmissible(format!(
                            "bound variable of `{}` becomes non-strictly-positive in operator body",
                            if fx.name.is_empty() { "<anon>" } else { &fx.name }
                        )));
                    }
                    validate_formula_positivity(body)
                }
            }
        }
    }
}

/// The uniform (one-clause) reading of a clause list:
/// `{ ys | \/_i ex binders_i (ys == heads_i /\ premises_i) }`,
/// over fresh variables `ys`. Used by the closure/coinduction axioms and by
/// the finite-model evaluator.
pub fn clauses_to_uniform(fix: &FixPred) -> (Vec<Var>, Formula) {
    let FixDef::Clauses(clauses) = &fix.def else {
        let FixDef::Op { vars, body } = &fix.def else { unreachable!() };
        return (vars.clone(), body.clone());
    };
    let mut avoid: HashSet<String> = HashSet::new();
    for c in clauses {
        for v in &c.binders {
            avoid.insert(v.name.clone());
        }
        for p in &c.premises {
            avoid.extend(p.free_term_vars());
        }
        for h in &c.head {
            avoid.extend(h.free_vars());
        }
    }
    let ys: Vec<Var> = fix
        .pvar
        .arity
        .iter()
        .enumerate()
        .map(|(i, ty)| {
            let n = fresh_name(&format!("y{i}"), &avoid);
            Var::new(&n, ty.clone())
        })
        .collect();
    let tys = fix.pvar.arity.clone();
    let mut djs = Vec::new();
    for c in clauses {
        let mut parts = Vec::new();
        if !ys.is_empty() {
            parts.push(vec_eq(
                &tys,
                &ys.iter().map(|v| v.term()).collect::<Vec<_>>(),
                &c.head,
            ));
        }
        parts.extend(c.premises.iter().cloned());
        let inner = and_all(parts);
        djs.push(exs(c.binders.iter().cloned(), inner));
    }
    let body = if djs.is_empty() { falsity() } else { or_all(djs) };
    (ys, body)
}

/// The operator body of a fixpoint, as `(vars, formula)`; clause lists go
/// through their uniform form.
pub fn operator_body(fix: &FixPred) -> (Vec<Var>, Formula) {
    clauses_to_uniform(fix)
}

// ---------------------------------------------------------------------------
// Inhabitedness certification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inhabited {
    Yes,
    Unknown,
}

/// Syntactic certification that falsity proves membership (used by
/// ex-falso derivations): a least fixpoint is certified when some clause's
/// premises avoid the bound variable and are themselves certified; a
/// greatest fixpoint may use its own bound variable (the coinduction motive
/// absorbs it).
pub fn is_inhabited(p: &Predicate) -> Inhabited {
    let mut in_progress = Vec::new();
    if cert_pred(p, &mut in_progress, &mut BTreeSet::new()) {
        Inhabited::Yes
    } else {
        Inhabited::Unknown
    }
}

fn cert_pred(p: &Predicate, stack: &mut Vec<*const FixPred>, assumable: &mut BTreeSet<PKey>) -> bool {
    match p {
        Predicate::Var(pv) => assumable.contains(&pv.key()),
        Predicate::Compr { body, .. } => cert_formula(body, stack, assumable),
        Predicate::Fix(fx) => {
            let ptr = Arc::as_ptr(fx);
            if stack.contains(&ptr) {
                return false;
            }
            stack.push(ptr);
            let FixDef::Clauses(cs) = &fx.def else {
                stack.pop();
                return false;
            };
            let key = fx.pvar.key();
            let result = cs.iter().any(|c| {
                let self_ok = fx.flavor == Flavor::Nu;
                let added = if self_ok && !assumable.contains(&key) {
                    assumable.insert(key.clone());
                    true
                } else {
                    false
                };
                let ok = c.premises.iter().all(|pr| {
                    if fx.flavor == Flavor::Mu && pr.free_pvars().contains(&key) {
                        false
                    } else {
                        cert_formula(pr, stack, assumable)
                    }
                });
                if added {
                    assumable.remove(&key);
                }
                ok
            });
            stack.pop();
            result
        }
    }
}

fn cert_formula(f: &Formula, stack: &mut Vec<*const FixPred>, assumable: &mut BTreeSet<PKey>) -> bool {
    match f {
        Formula::Atom { pred, .. } => cert_pred(pred, stack, assumable),
        Formula::Imp(_, b) => cert_formula(b, stack, assumable),
        Formula::And(a, b) => cert_formula(a, stack, assumable) && cert_formula(b, stack, assumable),
        Formula::Or(a, b) => cert_formula(a, stack, assumable) || cert_formula(b, stack, assumable),
        Formula::All(_, b) | Formula::Ex(_, b) => cert_formula(b, stack, assumable),
    }
}

// ---------------------------------------------------------------------------
// Normalization (comprehension expansion plus term normalization)
// ---------------------------------------------------------------------------

impl Formula {
    /// Normal form used for comparisons: comprehension applications are
    /// beta-expanded and all terms are normalized (bounded by `fuel`).
    pub fn norm(&self, sig: &Signature, fuel: u64) -> Formula {
        match self {
            Formula::Atom { pred, args } => {
                let args: Vec<Term> =
                    args.iter().map(|t| crate::rewrite::normalize(sig, t, fuel).0).collect();
                match pred {
                    Predicate::Compr { vars, body } => {
                        let map: TermSubst = vars
                            .iter()
                            .map(|v| v.name.clone())
                            .zip(args.iter().cloned())
                            .collect();
                        body.subst_terms(&map).norm(sig, fuel)
                    }
                    _ => Formula::Atom { pred: pred.norm(sig, fuel), args },
                }
            }
            Formula::Imp(a, b) => imp(a.norm(sig, fuel), b.norm(sig, fuel)),
            Formula::And(a, b) => and(a.norm(sig, fuel), b.norm(sig, fuel)),
            Formula::Or(a, b) => or(a.norm(sig, fuel), b.norm(sig, fuel)),
            Formula::All(v, b) => all(v.clone(), b.norm(sig, fuel)),
            Formula::Ex(v, b) => ex(v.clone(), b.norm(sig, fuel)),
        }
    }
}

impl Predicate {
    pub fn norm(&self, sig: &Signature, fuel: u64) -> Predicate {
        match self {
            Predicate::Var(_) => self.clone(),
            Predicate::Compr { vars, body } => {
                Predicate::compr(vars.clone(), body.norm(sig, fuel))
            }
            Predicate::Fix(fx) => {
                let def = match &fx.def {
                    FixDef::Clauses(cs) => FixDef::Clauses(
                        cs.iter()
                            .map(|c| Clause {
                                binders: c.binders.clone(),
                                premises: c.premises.iter().map(|p| p.norm(sig, fuel)).collect(),
                                head: c
                                    .head
                                    .iter()
                                    .map(|t| crate::rewrite::normalize(sig, t, fuel).0)
                                    .collect(),
                            })
                            .collect(),
                    ),
                    FixDef::Op { vars, body } => {
                        FixDef::Op { vars: vars.clone(), body: body.norm(sig, fuel) }
                    }
                };
                Predicate::Fix(Arc::new(FixPred {
                    flavor: fx.flavor,
                    name: fx.name.clone(),
                    pvar: fx.pvar.clone(),
                    def,
                    origin: fx.origin.clone(),
                }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ev, std_sig};

    fn nat() -> Type {
        Type::alg("N")
    }

    #[test]
    fn comprehension_identified_with_beta_expansion() {
        let sig = std_sig();
        let n = Var::new("n", nat());
        // {n | Ev n} applied to m  ==  Ev m
        let compr = Predicate::compr(vec![n.clone()], ev().apply(vec![n.term()]));
        let m = Term::var("m", nat());
        let a = compr.apply(vec![m.clone()]);
        let b = ev().apply(vec![m]);
        assert!(a.norm(&sig, 100).alpha_eq(&b.norm(&sig, 100)));
    }

    #[test]
    fn pvar_sets_follow_the_implication_rules() {
        let x = PVar::new("X", vec![nat()]);
        let n = Term::var("n", nat());
        let xatom = Predicate::Var(x.clone()).apply(vec![n.clone()]);
        // X n -> X n: X free on both sides, not strictly positive, but still
        // a strictly positive *part* via the right-hand side.
        let f = imp(xatom.clone(), xatom.clone());
        let s = pvar_sets(&f);
        assert!(s.fp.contains(&x.key()));
        assert!(s.nsp.contains(&x.key()));
        assert!(s.pp.contains(&x.key()));
        // (X n -> F) has X only negatively: pp must not contain it.
        let g = weak_neg(xatom);
        let s = pvar_sets(&g);
        assert!(s.fp.contains(&x.key()));
        assert!(!s.pp.contains(&x.key()));
    }

    #[test]
    fn pp_subset_fp() {
        // PP is always a subset of FP.
        let x = PVar::new("X", vec![nat()]);
        let n = Term::var("n", nat());
        let xatom = Predicate::Var(x).apply(vec![n]);
        for f in [
            xatom.clone(),
            imp(ev().apply(vec![Term::var("k", nat())]), xatom.clone()),
            and(xatom.clone(), weak_neg(xatom.clone())),
        ] {
            let s = pvar_sets(&f);
            assert!(s.pp.is_subset(&s.fp), "{f:?}");
        }
    }

    #[test]
    fn positivity_rejected_on_negative_premise() {
        let x = PVar::new("X", vec![nat()]);
        let n = Var::new("n", nat());
        let bad = Clause {
            binders: vec![n.clone()],
            premises: vec![weak_neg(Predicate::Var(x.clone()).apply(vec![n.term()]))],
            head: vec![n.term()],
        };
        let err = mk_inductive("Bad", x, vec![bad]).unwrap_err();
        assert!(matches!(err, LogicError::Positivity { .. }));
    }

    #[test]
    fn nullary_self_implication_is_positive_but_not_inhabited() {
        // mu X (X -> X): accepted by positivity, not certified inhabited.
        let x = PVar::new("X", vec![]);
        let c = Clause {
            binders: vec![],
            premises: vec![Predicate::Var(x.clone()).apply(vec![])],
            head: vec![],
        };
        let fx = mk_inductive("Loop", x, vec![c]).unwrap();
        assert_eq!(is_inhabited(&Predicate::Fix(fx)), Inhabited::Unknown);
    }

    #[test]
    fn ev_is_certified_inhabited() {
        assert_eq!(is_inhabited(&Predicate::Fix(crate::corpus::ev_fix())), Inhabited::Yes);
    }

    #[test]
    fn uniform_form_shape() {
        let fx = crate::corpus::ev_fix();
        let (ys, body) = clauses_to_uniform(&fx);
        assert_eq!(ys.len(), 1);
        assert_eq!(disjuncts(&body).len(), 2);
    }

    #[test]
    fn clause_order_is_significant() {
        let fx = crate::corpus::ev_fix();
        let FixDef::Clauses(cs) = &fx.def else { panic!() };
        let swapped = mk_inductive(
            "Ev",
            fx.pvar.clone(),
            vec![cs[1].clone(), cs[0].clone()],
        )
        .unwrap();
        assert!(!Predicate::Fix(fx).alpha_eq(&Predicate::Fix(swapped)));
    }
}
