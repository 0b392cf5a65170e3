//! Signatures: declared algebras, program constants with computation rules,
//! and named predicates.
//!
//! `check_algebra` enforces strict positivity of the recursive slot in
//! constructor argument types (including nested occurrences through
//! parameters of other algebras). `check_rules` enforces left-linearity,
//! constructor patterns, typing, and pairwise non-unifiability of rule
//! patterns, reporting a most general unifier on a clash.

use crate::logic::Predicate;
use crate::syntax::{Term, Type, Var};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constructor {
    pub name: String,
    /// Argument types; may mention the algebra's type parameters and the
    /// algebra itself (the recursive slot).
    pub arg_tys: Vec<Type>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Algebra {
    pub name: String,
    pub params: Vec<String>,
    pub constructors: Vec<Constructor>,
}

impl Algebra {
    /// The algebra applied to its own parameters, as a type.
    pub fn self_ty(&self) -> Type {
        Type::Alg {
            name: self.name.clone(),
            args: self.params.iter().map(|p| Type::Var(p.clone())).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Rule {
    /// Constructor patterns for the constant's arguments (left-linear).
    pub patterns: Vec<Term>,
    pub rhs: Term,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstDef {
    pub name: String,
    pub ty: Type,
    pub rules: Vec<Rule>,
}

/// Declared algebras, program constants and named predicates.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    pub algebras: IndexMap<String, Arc<Algebra>>,
    pub consts: IndexMap<String, Arc<ConstDef>>,
    pub preds: IndexMap<String, Predicate>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SigError {
    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("algebra `{alg}`: constructor `{con}` argument {arg} places the recursive slot non-strictly-positively at {path}")]
    NotStrictlyPositive { alg: String, con: String, arg: usize, path: String },
    #[error("algebra `{alg}`: constructor `{con}` must produce `{alg}`")]
    BadConstructorResult { alg: String, con: String },
    #[error("rule {rule} of `{konst}`: pattern is not built from variables and constructors")]
    BadPattern { konst: String, rule: usize },
    #[error("rule {rule} of `{konst}`: pattern is not left-linear (variable `{var}` repeats)")]
    NonLinear { konst: String, rule: usize, var: String },
    #[error("rules {a} and {b} of `{konst}` overlap; unifier: {mgu}")]
    Overlap { konst: String, a: usize, b: usize, mgu: String },
    #[error("rule {rule} of `{konst}`: right-hand side uses variables not bound by the pattern: {vars:?}")]
    UnboundRhs { konst: String, rule: usize, vars: Vec<String> },
    #[error("type error: {0}")]
    Type(String),
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn algebra(&self, name: &str) -> Result<&Arc<Algebra>, SigError> {
        self.algebras.get(name).ok_or_else(|| SigError::UnknownAlgebra(name.to_string()))
    }

    pub fn constant(&self, name: &str) -> Result<&Arc<ConstDef>, SigError> {
        self.consts.get(name).ok_or_else(|| SigError::UnknownConstant(name.to_string()))
    }

    pub fn add_algebra(&mut self, alg: Algebra) -> Result<(), SigError> {
        self.algebras.insert(alg.name.clone(), Arc::new(alg));
        let name = self.algebras.last().unwrap().0.clone();
        self.check_algebra(&name)
    }

    pub fn add_const(&mut self, def: ConstDef) -> Result<(), SigError> {
        self.consts.insert(def.name.clone(), Arc::new(def));
        let name = self.consts.last().unwrap().0.clone();
        self.check_rules(&name)
    }

    pub fn add_pred(&mut self, name: &str, p: Predicate) {
        self.preds.insert(name.to_string(), p);
    }

    /// Instantiated constructor argument/result types.
    pub fn con_ty(&self, alg: &str, con: &str, ty_args: &[Type]) -> Result<Type, SigError> {
        let a = self.algebra(alg)?;
        let c = a
            .constructors
            .iter()
            .find(|c| c.name == con)
            .ok_or_else(|| SigError::UnknownConstructor(format!("{alg}.{con}")))?;
        let map: HashMap<String, Type> =
            a.params.iter().cloned().zip(ty_args.iter().cloned()).collect();
        let res = Type::Alg { name: alg.to_string(), args: ty_args.to_vec() };
        Ok(Type::arrows(
            &c.arg_tys.iter().map(|t| t.subst_vars(&map)).collect::<Vec<_>>(),
            res,
        ))
    }

    /// Strict positivity of the recursive slot in every constructor argument.
    pub fn check_algebra(&self, name: &str) -> Result<(), SigError> {
        let alg = self.algebra(name)?.clone();
        for c in &alg.constructors {
            for (i, at) in c.arg_tys.iter().enumerate() {
                self.strictly_positive(at, name, &mut format!("arg{i}"), &alg, c, i)?;
            }
        }
        Ok(())
    }

    fn strictly_positive(
        &self,
        ty: &Type,
        slot: &str,
        path: &mut String,
        alg: &Algebra,
        con: &Constructor,
        arg: usize,
    ) -> Result<(), SigError> {
        if !ty.occurs_alg(slot) {
            return Ok(());
        }
        match ty {
            Type::Var(_) => Ok(()),
            Type::Arrow(a, b) => {
                if a.occurs_alg(slot) {
                    return Err(SigError::NotStrictlyPositive {
                        alg: alg.name.clone(),
                        con: con.name.clone(),
                        arg,
                        path: format!("{path} (left of ->)"),
                    });
                }
                path.push_str(".cod");
                self.strictly_positive(b, slot, path, alg, con, arg)
            }
            Type::Alg { name, args } => {
                if name == slot {
                    // Direct recursive occurrence: arguments must not mention
                    // the slot again (no `T(T)`-style nesting).
                    for (j, a) in args.iter().enumerate() {
                        if a.occurs_alg(slot) {
                            return Err(SigError::NotStrictlyPositive {
                                alg: alg.name.clone(),
                                con: con.name.clone(),
                                arg,
                                path: format!("{path}.{name}[{j}]"),
                            });
                        }
                    }
                    return Ok(());
                }
                let outer = self.algebra(name)?.clone();
                for (j, a) in args.iter().enumerate() {
                    if !a.occurs_alg(slot) {
                        continue;
                    }
                    // Nested occurrence through parameter j of `name`: that
                    // parameter must itself sit strictly positively in `name`.
                    let param = &outer.params[j];
                    if !self.param_strictly_positive(&outer, param)? {
                        return Err(SigError::NotStrictlyPositive {
                            alg: alg.name.clone(),
                            con: con.name.clone(),
                            arg,
                            path: format!("{path}.{name}[{j}] (parameter not strictly positive)"),
                        });
                    }
                    path.push_str(&format!(".{name}[{j}]"));
                    self.strictly_positive(a, slot, path, alg, con, arg)?;
                }
                Ok(())
            }
        }
    }

    fn param_strictly_positive(&self, alg: &Algebra, param: &str) -> Result<bool, SigError> {
        self.param_strictly_positive_rec(alg, param, &mut Vec::new())
    }

    /// Cycle guard: a `(algebra, param)` pair already under scrutiny is
    /// assumed positive; a violation must show up along some finite path.
    fn param_strictly_positive_rec(
        &self,
        alg: &Algebra,
        param: &str,
        seen: &mut Vec<(String, String)>,
    ) -> Result<bool, SigError> {
        let key = (alg.name.clone(), param.to_string());
        if seen.contains(&key) {
            return Ok(true);
        }
        seen.push(key);
        fn ty_ok(
            sig: &Signature,
            ty: &Type,
            param: &str,
            seen: &mut Vec<(String, String)>,
        ) -> Result<bool, SigError> {
            match ty {
                Type::Var(_) => Ok(true),
                Type::Arrow(a, b) => {
                    if occurs_var(a, param) {
                        return Ok(false);
                    }
                    ty_ok(sig, b, param, seen)
                }
                Type::Alg { name, args } => {
                    let outer = sig.algebra(name)?.clone();
                    for (j, a) in args.iter().enumerate() {
                        if occurs_var(a, param) {
                            if !sig.param_strictly_positive_rec(&outer, &outer.params[j], seen)? {
                                return Ok(false);
                            }
                            if !ty_ok(sig, a, param, seen)? {
                                return Ok(false);
                            }
                        }
                    }
                    Ok(true)
                }
            }
        }
        fn occurs_var(ty: &Type, v: &str) -> bool {
            match ty {
                Type::Var(w) => w == v,
                Type::Arrow(a, b) => occurs_var(a, v) || occurs_var(b, v),
                Type::Alg { args, .. } => args.iter().any(|a| occurs_var(a, v)),
            }
        }
        for c in &alg.constructors {
            for at in &c.arg_tys {
                if !ty_ok(self, at, param, seen)? {
                    seen.pop();
                    return Ok(false);
                }
            }
        }
        seen.pop();
        Ok(true)
    }

    /// Left-linearity, constructor-pattern discipline, typing, and pairwise
    /// non-unifiability of the rules of `name`.
    pub fn check_rules(&self, name: &str) -> Result<(), SigError> {
        let def = self.constant(name)?.clone();
        let (arg_tys, res_ty) = def.ty.uncurry();
        for (i, rule) in def.rules.iter().enumerate() {
            if rule.patterns.len() > arg_tys.len() {
                return Err(SigError::Type(format!(
                    "rule {i} of `{name}`: more patterns than argument types"
                )));
            }
            let mut seen: HashMap<String, Type> = HashMap::new();
            for (p, ty) in rule.patterns.iter().zip(arg_tys.iter()) {
                check_pattern(p, ty, name, i, &mut seen, self)?;
            }
            // Rules may match only a prefix of the arguments; the rhs then
            // has the remaining arrow type.
            let rhs_ty = Type::arrows(
                &arg_tys[rule.patterns.len()..]
                    .iter()
                    .map(|t| (*t).clone())
                    .collect::<Vec<_>>(),
                res_ty.clone(),
            );
            let env: HashMap<String, Type> = seen.clone();
            let got = self.infer_with(&rule.rhs, &env).map_err(|e| {
                SigError::Type(format!("rule {i} of `{name}` rhs: {e}"))
            })?;
            if got != rhs_ty {
                return Err(SigError::Type(format!(
                    "rule {i} of `{name}`: rhs has type {got:?}, expected {rhs_ty:?}"
                )));
            }
            let unbound: Vec<String> = rule
                .rhs
                .free_vars()
                .into_iter()
                .filter(|v| !seen.contains_key(v))
                .collect();
            if !unbound.is_empty() {
                let mut vars = unbound;
                vars.sort();
                return Err(SigError::UnboundRhs { konst: name.to_string(), rule: i, vars });
            }
        }
        for i in 0..def.rules.len() {
            for j in i + 1..def.rules.len() {
                let a = &def.rules[i];
                let b = &def.rules[j];
                let n = a.patterns.len().min(b.patterns.len());
                if let Some(mgu) =
                    unify_seq(&a.patterns[..n], &rename_apart(&b.patterns[..n]))
                {
                    return Err(SigError::Overlap {
                        konst: name.to_string(),
                        a: i,
                        b: j,
                        mgu: format_mgu(&mgu),
                    });
                }
            }
        }
        Ok(())
    }

    /// Infers the type of a term with all free variables typed by their
    /// annotations (consistency enforced).
    pub fn infer(&self, t: &Term) -> Result<Type, SigError> {
        self.infer_with(t, &HashMap::new())
    }

    pub fn infer_with(&self, t: &Term, env: &HashMap<String, Type>) -> Result<Type, SigError> {
        match t {
            Term::Var(v) => {
                if let Some(ty) = env.get(&v.name) {
                    if *ty != v.ty {
                        return Err(SigError::Type(format!(
                            "variable `{}` used at {:?} but bound at {ty:?}",
                            v.name, v.ty
                        )));
                    }
                }
                Ok(v.ty.clone())
            }
            Term::Con { alg, name, ty_args } => self.con_ty(alg, name, ty_args),
            Term::PConst { name } => Ok(self.constant(name)?.ty.clone()),
            Term::Abs(v, b) => {
                let mut env2 = env.clone();
                env2.insert(v.name.clone(), v.ty.clone());
                Ok(Type::arrow(v.ty.clone(), self.infer_with(b, &env2)?))
            }
            Term::App(f, a) => {
                let ft = self.infer_with(f, env)?;
                let at = self.infer_with(a, env)?;
                match ft {
                    Type::Arrow(d, c) => {
                        if *d != at {
                            Err(SigError::Type(format!(
                                "application mismatch: expected {d:?}, got {at:?} in {t:?}"
                            )))
                        } else {
                            Ok(c.as_ref().clone())
                        }
                    }
                    other => Err(SigError::Type(format!(
                        "applied non-function of type {other:?} in {t:?}"
                    ))),
                }
            }
        }
    }
}

fn check_pattern(
    p: &Term,
    ty: &Type,
    konst: &str,
    rule: usize,
    seen: &mut HashMap<String, Type>,
    sig: &Signature,
) -> Result<(), SigError> {
    match p {
        Term::Var(v) => {
            if seen.contains_key(&v.name) {
                return Err(SigError::NonLinear {
                    konst: konst.to_string(),
                    rule,
                    var: v.name.clone(),
                });
            }
            if v.ty != *ty {
                return Err(SigError::Type(format!(
                    "rule {rule} of `{konst}`: pattern variable `{}` has type {:?}, expected {ty:?}",
                    v.name, v.ty
                )));
            }
            seen.insert(v.name.clone(), v.ty.clone());
            Ok(())
        }
        _ => {
            let (head, args) = p.spine();
            let Term::Con { alg, name, ty_args } = head else {
                return Err(SigError::BadPattern { konst: konst.to_string(), rule });
            };
            let cty = sig.con_ty(alg, name, ty_args)?;
            let (arg_tys, res) = cty.uncurry();
            if res != ty || args.len() != arg_tys.len() {
                return Err(SigError::Type(format!(
                    "rule {rule} of `{konst}`: pattern `{p:?}` does not fit type {ty:?}"
                )));
            }
            for (a, at) in args.iter().zip(arg_tys) {
                check_pattern(a, at, konst, rule, seen, sig)?;
            }
            Ok(())
        }
    }
}

fn rename_apart(pats: &[Term]) -> Vec<Term> {
    fn go(t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(Var::new(&format!("{}#r", v.name), v.ty.clone())),
            Term::App(f, a) => Term::app(go(f), go(a)),
            _ => t.clone(),
        }
    }
    pats.iter().map(go).collect()
}

/// First-order syntactic unification over constructor patterns.
pub fn unify(a: &Term, b: &Term) -> Option<HashMap<String, Term>> {
    unify_seq(std::slice::from_ref(a), std::slice::from_ref(b))
}

pub fn unify_seq(a: &[Term], b: &[Term]) -> Option<HashMap<String, Term>> {
    let mut subst: HashMap<String, Term> = HashMap::new();
    let mut work: Vec<(Term, Term)> =
        a.iter().cloned().zip(b.iter().cloned()).collect();
    while let Some((s, t)) = work.pop() {
        let s = s.subst(&subst);
        let t = t.subst(&subst);
        if s.alpha_eq(&t) {
            continue;
        }
        match (&s, &t) {
            (Term::Var(v), _) => {
                if t.free_vars().contains(&v.name) {
                    return None;
                }
                bind(&mut subst, &v.name, t.clone());
            }
            (_, Term::Var(v)) => {
                if s.free_vars().contains(&v.name) {
                    return None;
                }
                bind(&mut subst, &v.name, s.clone());
            }
            _ => {
                let (hs, args_s) = s.spine();
                let (ht, args_t) = t.spine();
                match (hs, ht) {
                    (
                        Term::Con { alg: a1, name: n1, ty_args: t1 },
                        Term::Con { alg: a2, name: n2, ty_args: t2 },
                    ) if a1 == a2 && n1 == n2 && t1 == t2 && args_s.len() == args_t.len() => {
                        for (x, y) in args_s.iter().zip(args_t.iter()) {
                            work.push(((*x).clone(), (*y).clone()));
                        }
                    }
                    _ => return None,
                }
            }
        }
    }
    Some(subst)
}

fn bind(subst: &mut HashMap<String, Term>, name: &str, t: Term) {
    let m = single_map(name, t);
    for v in subst.values_mut() {
        *v = v.subst(&m);
    }
    subst.extend(m);
}

fn single_map(name: &str, t: Term) -> HashMap<String, Term> {
    crate::syntax::single(name, t)
}

fn format_mgu(mgu: &HashMap<String, Term>) -> String {
    let mut items: Vec<String> =
        mgu.iter().map(|(k, v)| format!("{k} := {v:?}")).collect();
    items.sort();
    format!("{{{}}}", items.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::std_sig;
    use crate::syntax::Type;

    #[test]
    fn nat_and_list_algebras_check() {
        let sig = std_sig();
        sig.check_algebra("N").unwrap();
        sig.check_algebra("L").unwrap();
        sig.check_algebra("T").unwrap();
    }

    #[test]
    fn nested_recursive_slot_through_list_is_accepted() {
        // T with Br : L(T) -> T relies on the parameter of L being strictly
        // positive.
        let sig = std_sig();
        assert!(sig.check_algebra("T").is_ok());
    }

    #[test]
    fn negative_recursive_slot_is_rejected() {
        let mut sig = std_sig();
        let bad = Algebra {
            name: "Bad".into(),
            params: vec![],
            constructors: vec![Constructor {
                name: "mk".into(),
                arg_tys: vec![Type::arrow(
                    Type::arrow(Type::alg("Bad"), Type::alg("N")),
                    Type::alg("Bad"),
                )],
            }],
        };
        let err = sig.add_algebra(bad).unwrap_err();
        assert!(matches!(err, SigError::NotStrictlyPositive { .. }), "{err}");
    }

    #[test]
    fn domain_occurrence_is_rejected() {
        let mut sig = std_sig();
        let bad = Algebra {
            name: "Bad2".into(),
            params: vec![],
            constructors: vec![Constructor {
                name: "mk".into(),
                arg_tys: vec![Type::arrow(Type::alg("Bad2"), Type::alg("Bad2"))],
            }],
        };
        let err = sig.add_algebra(bad).unwrap_err();
        assert!(matches!(err, SigError::NotStrictlyPositive { .. }), "{err}");
    }

    #[test]
    fn overlapping_rules_report_mgu() {
        let mut sig = std_sig();
        let nat = Type::alg("N");
        let zero = Term::con("N", "0", vec![]);
        let def = ConstDef {
            name: "bad".into(),
            ty: Type::arrow(nat.clone(), nat.clone()),
            rules: vec![
                Rule { patterns: vec![Term::var("n", nat.clone())], rhs: Term::var("n", nat.clone()) },
                Rule { patterns: vec![zero.clone()], rhs: zero.clone() },
            ],
        };
        let err = sig.add_const(def).unwrap_err();
        match err {
            SigError::Overlap { mgu, .. } => assert!(mgu.contains("n :="), "{mgu}"),
            other => panic!("expected overlap, got {other}"),
        }
    }

    #[test]
    fn nonlinear_pattern_rejected() {
        let mut sig = std_sig();
        let nat = Type::alg("N");
        let s = |t: Term| Term::app(Term::con("N", "S", vec![]), t);
        let def = ConstDef {
            name: "badlin".into(),
            ty: Type::arrows(&[nat.clone(), nat.clone()], nat.clone()),
            rules: vec![Rule {
                patterns: vec![
                    Term::var("n", nat.clone()),
                    s(Term::var("n", nat.clone())),
                ],
                rhs: Term::var("n", nat.clone()),
            }],
        };
        let err = sig.add_const(def).unwrap_err();
        assert!(matches!(err, SigError::NonLinear { .. }), "{err}");
    }

    #[test]
    fn nbin_rules_check() {
        let sig = std_sig();
        sig.check_rules("nbin").unwrap();
    }
}
