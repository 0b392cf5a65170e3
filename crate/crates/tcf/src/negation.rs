//! The strong-negation transform on formulas and predicates, its guarded
//! (relative) variant, strong implication/equivalence, the tight translation,
//! the clause-shaped normal form of a double negation, and an opt-in
//! simplifier for decidable boolean atoms.
//!
//! Strong negation is defined by structural recursion: atoms go through the
//! predicate transform, `N(A -> B) = A and N B`, `N(A and B) = N A or N B`,
//! `N(A or B) = N A and N B`, and the quantifiers swap. Predicate variables
//! pick up a prime. A least fixpoint becomes a greatest fixpoint of the
//! negated operator and vice versa; for clause-form fixpoints the negated
//! operator is the conjunction, over the original clauses, of
//! `all binders (ys == heads -> B)` where `B` is the disjunction of the
//! negated premises (falsity for premise-free clauses). Head components that
//! are bare binder variables are solved against the corresponding `ys`
//! instead of producing guard equations; the solution is recorded so that
//! derivation generators can replay it.

use crate::logic::{
    all, alls, and, and_all, eq_atom, falsity, imp, leibniz, mk_fix, or, or_all, weak_neg,
    Clause, FixDef, FixPred, Flavor, Formula, LogicError, NegInfo, Origin, Predicate,
};
use crate::sig::Signature;
use crate::syntax::{fresh_name, Term, Type, Var};
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

/// Strong negation of a formula.
pub fn neg_formula(f: &Formula) -> Formula {
    match f {
        Formula::Atom { pred, args } => {
            Formula::Atom { pred: neg_predicate(pred), args: args.clone() }
        }
        Formula::Imp(a, b) => and(a.as_ref().clone(), neg_formula(b)),
        Formula::And(a, b) => or(neg_formula(a), neg_formula(b)),
        Formula::Or(a, b) => and(neg_formula(a), neg_formula(b)),
        Formula::All(v, b) => crate::logic::ex(v.clone(), neg_formula(b)),
        Formula::Ex(v, b) => all(v.clone(), neg_formula(b)),
    }
}

/// Strong negation of a predicate.
pub fn neg_predicate(p: &Predicate) -> Predicate {
    match p {
        Predicate::Var(x) => Predicate::Var(x.primed(1)),
        Predicate::Compr { vars, body } => Predicate::compr(vars.clone(), neg_formula(body)),
        Predicate::Fix(fx) => Predicate::Fix(neg_fix(fx)),
    }
}

pub fn neg_fix(fx: &Arc<FixPred>) -> Arc<FixPred> {
    let name = if fx.name.is_empty() { String::new() } else { format!("N{}", fx.name) };
    let pvar = fx.pvar.primed(1);
    match &fx.def {
        FixDef::Op { vars, body } => Arc::new(FixPred {
            flavor: fx.flavor.flip(),
            name,
            pvar,
            def: FixDef::Op { vars: vars.clone(), body: neg_formula(body) },
            origin: Some(Origin::NegOp { base: fx.clone() }),
        }),
        FixDef::Clauses(clauses) => {
            let ys = fresh_subject_vars(fx);
            let mut conjuncts = Vec::new();
            let mut infos = Vec::new();
            for c in clauses {
                let (f, info) = neg_clause(fx, c, &ys);
                conjuncts.push(f);
                infos.push(info);
            }
            let body = and_all(conjuncts);
            let origin = Some(Origin::NegClauses { base: fx.clone(), infos });
            if body.free_pvars().contains(&pvar.key()) {
                Arc::new(FixPred {
                    flavor: fx.flavor.flip(),
                    name,
                    pvar,
                    def: FixDef::Op { vars: ys, body },
                    origin,
                })
            } else {
                // The negated operator does not mention the bound variable:
                // least and greatest fixpoint coincide, and we present the
                // result as a single-clause least fixpoint (the shape used
                // for the negated Leibniz equality).
                Arc::new(FixPred {
                    flavor: Flavor::Mu,
                    name,
                    pvar,
                    def: FixDef::Clauses(vec![Clause {
                        binders: ys.clone(),
                        premises: crate::logic::conjuncts(&body)
                            .into_iter()
                            .cloned()
                            .collect(),
                        head: ys.iter().map(|v| v.term()).collect(),
                    }]),
                    origin,
                })
            }
        }
    }
}

/// Fresh subject variables for the negated operator: `y` for unary
/// predicates, `y0, y1, ...` otherwise.
pub fn fresh_subject_vars(fx: &FixPred) -> Vec<Var> {
    let mut avoid: HashSet<String> = HashSet::new();
    if let FixDef::Clauses(cs) = &fx.def {
        for c in cs {
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
    }
    let arity = &fx.pvar.arity;
    let mut out = Vec::new();
    for (i, ty) in arity.iter().enumerate() {
        let hint = if arity.len() == 1 { "y".to_string() } else { format!("y{i}") };
        let n = fresh_name(&hint, &avoid);
        avoid.insert(n.clone());
        out.push(Var::new(&n, ty.clone()));
    }
    out
}

/// One conjunct of the negated operator (exposed for the proof generators), with the bookkeeping of which
/// binders were solved against which subject variables.
pub fn neg_clause(fx: &FixPred, c: &Clause, ys: &[Var]) -> (Formula, NegInfo) {
    let mut solved: Vec<Option<usize>> = vec![None; c.binders.len()];
    let mut kept_eqs: Vec<usize> = Vec::new();
    for (j, h) in c.head.iter().enumerate() {
        if let Term::Var(v) = h {
            if let Some(bi) = c.binders.iter().position(|b| b.name == v.name) {
                if solved[bi].is_none() {
                    solved[bi] = Some(j);
                    continue;
                }
            }
        }
        kept_eqs.push(j);
    }
    let kept_binders: Vec<usize> =
        (0..c.binders.len()).filter(|i| solved[*i].is_none()).collect();
    let mut sol_map: HashMap<String, Term> = HashMap::new();
    for (bi, s) in solved.iter().enumerate() {
        if let Some(j) = s {
            sol_map.insert(c.binders[bi].name.clone(), ys[*j].term());
        }
    }
    let guard_eqs: Vec<Formula> = kept_eqs
        .iter()
        .map(|&j| eq_atom(&fx.pvar.arity[j], ys[j].term(), c.head[j].subst(&sol_map)))
        .collect();
    let b = if c.premises.is_empty() {
        falsity()
    } else {
        or_all(c.premises.iter().map(|p| neg_formula(&p.subst_terms(&sol_map))).collect())
    };
    let inner = if guard_eqs.is_empty() { b } else { imp(and_all(guard_eqs), b) };
    let conj = alls(kept_binders.iter().map(|&i| c.binders[i].clone()), inner);
    (conj, NegInfo { solved, kept_binders, kept_eqs })
}

/// The guarded (relative) negation `N K_C`: like `neg_fix`, but every
/// conjunct of the negated operator sits behind the guard `C ys`, so the
/// result corresponds to the relative complement of `K` in `C`. Returns the
/// predicate together with the unverified proof obligation `all ys (K ys ->
/// C ys)`.
pub fn relative_neg(
    fx: &Arc<FixPred>,
    c: &Predicate,
) -> Result<(Predicate, Formula), LogicError> {
    if c.arity() != fx.pvar.arity {
        return Err(LogicError::Other(format!(
            "relative negation: guard arity {:?} does not match predicate arity {:?}",
            c.arity(),
            fx.pvar.arity
        )));
    }
    let FixDef::Clauses(clauses) = &fx.def else {
        return Err(LogicError::Other(
            "relative negation requires a clause-form fixpoint".into(),
        ));
    };
    let ys = fresh_subject_vars(fx);
    let y_terms: Vec<Term> = ys.iter().map(|v| v.term()).collect();
    let mut premises = vec![c.apply(y_terms.clone())];
    for cl in clauses {
        premises.push(neg_clause(fx, cl, &ys).0);
    }
    let pvar = fx.pvar.primed(1);
    let name = if fx.name.is_empty() { String::new() } else { format!("N{}", fx.name) };
    let out = mk_fix(
        fx.flavor.flip(),
        &name,
        pvar,
        vec![Clause { binders: ys.clone(), premises, head: y_terms }],
    )?;
    let obligation = alls(
        ys.iter().cloned(),
        imp(
            Predicate::Fix(fx.clone()).apply(ys.iter().map(|v| v.term()).collect()),
            c.apply(ys.iter().map(|v| v.term()).collect()),
        ),
    );
    Ok((Predicate::Fix(out), obligation))
}

/// `(A -> B) and (N B -> N A)`.
pub fn strong_impl(a: &Formula, b: &Formula) -> Formula {
    and(imp(a.clone(), b.clone()), imp(neg_formula(b), neg_formula(a)))
}

/// `(A <-> B) and (N A <-> N B)`, with `<->` spelled as a conjunction of
/// implications.
pub fn strong_equiv(a: &Formula, b: &Formula) -> Formula {
    let iff = |x: &Formula, y: &Formula| and(imp(x.clone(), y.clone()), imp(y.clone(), x.clone()));
    and(iff(a, b), iff(&neg_formula(a), &neg_formula(b)))
}

/// The tight translation on connectives; atoms are fixed points of the
/// translation.
pub fn tight_translate(f: &Formula) -> Formula {
    match f {
        Formula::Atom { .. } => f.clone(),
        Formula::All(v, a) => all(v.clone(), tight_translate(a)),
        Formula::And(a, b) => and(tight_translate(a), tight_translate(b)),
        Formula::Imp(a, b) => imp(a.as_ref().clone(), tight_translate(b)),
        Formula::Or(a, b) => and(
            imp(weak_neg(a.as_ref().clone()), tight_translate(b)),
            imp(weak_neg(b.as_ref().clone()), tight_translate(a)),
        ),
        Formula::Ex(v, a) => {
            let mut avoid = a.free_term_vars();
            avoid.insert(v.name.clone());
            let y = Var::new(&fresh_name("y", &avoid), v.ty.clone());
            let guard = all(
                y.clone(),
                or(
                    eq_atom(&v.ty, v.term(), y.term()),
                    weak_neg(a.subst_term1(&v.name, &y.term())),
                ),
            );
            all(v.clone(), imp(guard, tight_translate(a)))
        }
    }
}

/// The clause-shaped normal form of a double strong negation of a
/// clause-form fixpoint: same flavor and heads, premises doubly negated,
/// bound variable doubly primed.
pub fn double_neg_normal(fx: &Arc<FixPred>) -> Result<Arc<FixPred>, LogicError> {
    let FixDef::Clauses(clauses) = &fx.def else {
        return Err(LogicError::Other(
            "double-negation normal form requires a clause-form fixpoint".into(),
        ));
    };
    let name = if fx.name.is_empty() { String::new() } else { format!("NN{}", fx.name) };
    mk_fix(
        fx.flavor,
        &name,
        fx.pvar.primed(2),
        clauses
            .iter()
            .map(|c| Clause {
                binders: c.binders.clone(),
                premises: c.premises.iter().map(|p| neg_formula(&neg_formula(p))).collect(),
                head: c.head.clone(),
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Boolean simplification
// ---------------------------------------------------------------------------

/// Is this fixpoint the negated Leibniz equality at some type?
pub fn neq_type(fx: &FixPred) -> Option<Type> {
    if let Some(Origin::NegClauses { base, .. }) = &fx.origin {
        let ty = base.pvar.arity.first()?.clone();
        if Predicate::Fix(base.clone()).alpha_eq(&Predicate::Fix(leibniz(&ty))) {
            return Some(ty);
        }
    }
    None
}

fn bool_con(name: &str) -> Term {
    Term::con("B", name, vec![])
}

fn as_bool_con(t: &Term) -> Option<&'static str> {
    match t {
        Term::Con { alg, name, .. } if alg == "B" && name == "tt" => Some("tt"),
        Term::Con { alg, name, .. } if alg == "B" && name == "ff" => Some("ff"),
        _ => None,
    }
}

/// Is `t` an application of a program constant with boolean result type?
fn decidable_head(sig: &Signature, t: &Term) -> bool {
    let (head, _) = t.spine();
    if let Term::PConst { name } = head {
        if let Ok(def) = sig.constant(name) {
            let (_, res) = def.ty.uncurry();
            return *res == Type::alg("B");
        }
    }
    false
}

/// Opt-in simplifier for formulas over decidable boolean atoms. Justified
/// only under the convention that every program constant with boolean result
/// type is total on the terms it is applied to. Rewrites, bottom-up:
///  1. `NEq (f ts) tt` to `f ts == ff` (and symmetrically for `ff`),
///  2. `qlt a b == ff` to `qleq b a == tt` and `qleq a b == ff` to
///     `qlt b a == tt` (the dual comparison with swapped arguments),
///  3. `(t == ff) or C` to `(t == tt) -> C` for a decidable `t`.
pub fn bool_simplify(sig: &Signature, f: &Formula) -> Formula {
    let g = match f {
        Formula::Atom { .. } => f.clone(),
        Formula::Imp(a, b) => imp(bool_simplify(sig, a), bool_simplify(sig, b)),
        Formula::And(a, b) => and(bool_simplify(sig, a), bool_simplify(sig, b)),
        Formula::Or(a, b) => or(bool_simplify(sig, a), bool_simplify(sig, b)),
        Formula::All(v, b) => all(v.clone(), bool_simplify(sig, b)),
        Formula::Ex(v, b) => crate::logic::ex(v.clone(), bool_simplify(sig, b)),
    };
    // 1. Strongly negated boolean equations flip the boolean.
    let g = match &g {
        Formula::Atom { pred: Predicate::Fix(fx), args }
            if args.len() == 2 && neq_type(fx) == Some(Type::alg("B")) =>
        {
            if let Some(c) = as_bool_con(&args[1]) {
                if decidable_head(sig, &args[0]) {
                    let flipped = if c == "tt" { "ff" } else { "tt" };
                    eq_atom(&Type::alg("B"), args[0].clone(), bool_con(flipped))
                } else {
                    g.clone()
                }
            } else {
                g.clone()
            }
        }
        _ => g,
    };
    // 2. Comparison duals: x == ff becomes the swapped dual == tt.
    let g = match &g {
        Formula::Atom { pred: Predicate::Fix(fx), args }
            if args.len() == 2
                && fx.name == "Eq"
                && as_bool_con(&args[1]) == Some("ff") =>
        {
            let (head, cargs) = args[0].spine();
            let dual = match head {
                Term::PConst { name } if name == "qlt" => Some("qleq"),
                Term::PConst { name } if name == "qleq" => Some("qlt"),
                _ => None,
            };
            match (dual, cargs.as_slice()) {
                (Some(d), [a, b]) => eq_atom(
                    &Type::alg("B"),
                    Term::apps(Term::pconst(d), [(*b).clone(), (*a).clone()]),
                    bool_con("tt"),
                ),
                _ => g.clone(),
            }
        }
        _ => g,
    };
    // 3. A decidable `== ff` disjunct becomes a `== tt` guard.
    if let Formula::Or(l, r) = &g {
        if let Formula::Atom { pred: Predicate::Fix(fx), args } = l.as_ref() {
            if args.len() == 2 && fx.name == "Eq" && as_bool_con(&args[1]) == Some("ff")
                && decidable_head(sig, &args[0])
            {
                return imp(
                    eq_atom(&Type::alg("B"), args[0].clone(), bool_con("tt")),
                    r.as_ref().clone(),
                );
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, ev, ev_fix, nat, numeral, std_sig};
    use crate::logic::{disjuncts, ex, Formula};
    use crate::print::formula_to_string;

    #[test]
    fn connective_clauses() {
        let a = ev().apply(vec![numeral(0)]);
        let b = ev().apply(vec![numeral(2)]);
        assert!(neg_formula(&imp(a.clone(), b.clone()))
            .alpha_eq(&and(a.clone(), neg_formula(&b))));
        assert!(neg_formula(&and(a.clone(), b.clone()))
            .alpha_eq(&or(neg_formula(&a), neg_formula(&b))));
        assert!(neg_formula(&or(a.clone(), b.clone()))
            .alpha_eq(&and(neg_formula(&a), neg_formula(&b))));
        let n = Var::new("n", nat());
        let body = ev().apply(vec![n.term()]);
        assert!(neg_formula(&all(n.clone(), body.clone()))
            .alpha_eq(&ex(n.clone(), neg_formula(&body))));
    }

    #[test]
    fn weak_negation_cancels() {
        // N(A -> F) = A and (f NEq t): the left conjunct is A itself.
        let a = ev().apply(vec![numeral(0)]);
        let n = neg_formula(&weak_neg(a.clone()));
        let Formula::And(l, _) = &n else { panic!("{n:?}") };
        assert!(l.alpha_eq(&a));
    }

    #[test]
    fn negated_even_operator_shape() {
        let nev = neg_fix(&ev_fix());
        assert_eq!(nev.flavor, Flavor::Nu);
        assert_eq!(nev.name, "NEv");
        let FixDef::Op { vars, body } = &nev.def else { panic!("expected operator form") };
        assert_eq!(vars.len(), 1);
        assert_eq!(
            formula_to_string(body),
            "(y == 0 -> F) and all n (y == S (S n) -> X' n)"
                .replace("all n ", "all n:N ")
        );
    }

    #[test]
    fn negated_leibniz_is_mu_clause_form() {
        let neq = neg_fix(&leibniz(&nat()));
        assert_eq!(neq.flavor, Flavor::Mu);
        let FixDef::Clauses(cs) = &neq.def else { panic!("expected clause form") };
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].binders.len(), 2);
        assert_eq!(cs[0].premises.len(), 1);
        assert_eq!(formula_to_string(&cs[0].premises[0]), "y1 == y0 -> F");
    }

    #[test]
    fn negated_closure_has_four_conjuncts() {
        let rel = Predicate::Var(PVar::new("R", vec![nat(), nat()]));
        let cl = corpus::closure(rel, nat());
        let ncl = neg_fix(&cl);
        assert_eq!(ncl.flavor, Flavor::Nu);
        let FixDef::Op { body, .. } = &ncl.def else { panic!() };
        assert_eq!(crate::logic::conjuncts(body).len(), 4);
    }

    #[test]
    fn double_negation_restores_flavor() {
        let nn = neg_fix(&neg_fix(&ev_fix()));
        assert_eq!(nn.flavor, Flavor::Mu);
        assert_eq!(nn.pvar.primes, 2);
    }

    #[test]
    fn primes_only_on_touched_atoms() {
        let x = PVar::new("X", vec![nat()]);
        let a = Predicate::Var(x.clone()).apply(vec![numeral(1)]);
        let f = imp(a.clone(), a.clone());
        let n = neg_formula(&f);
        // Left of the implication stays unprimed.
        let Formula::And(l, r) = &n else { panic!() };
        assert!(l.alpha_eq(&a));
        let s = crate::logic::pvar_sets(r);
        assert!(s.fp.contains(&x.primed(1).key()));
    }

    #[test]
    fn tight_translation_shapes() {
        let a = ev().apply(vec![numeral(0)]);
        let b = ev().apply(vec![numeral(2)]);
        let t = tight_translate(&or(a.clone(), b.clone()));
        assert!(t.alpha_eq(&and(
            imp(weak_neg(a.clone()), b.clone()),
            imp(weak_neg(b.clone()), a.clone())
        )));
        // Idempotence on the image for -> / all / and shapes.
        let n = Var::new("n", nat());
        let f = all(n.clone(), imp(a.clone(), and(a.clone(), b.clone())));
        let once = tight_translate(&f);
        assert!(tight_translate(&once).alpha_eq(&once));
    }

    #[test]
    fn relative_negation_guards_and_obligation() {
        let c = Predicate::Fix(corpus::totn_fix());
        let (p, ob) = relative_neg(&corpus::eqb_fix(), &{
            // totality of booleans, pairwise: use a comprehension.
            let b0 = Var::new("b0", corpus::boolean());
            let b1 = Var::new("b1", corpus::boolean());
            let _ = c;
            let tot = |t: Term| {
                or(
                    eq_atom(&corpus::boolean(), t.clone(), bool_con("ff")),
                    eq_atom(&corpus::boolean(), t, bool_con("tt")),
                )
            };
            Predicate::compr(vec![b0.clone(), b1.clone()], and(tot(b0.term()), tot(b1.term())))
        })
        .unwrap();
        let Predicate::Fix(fx) = &p else { panic!() };
        assert_eq!(fx.flavor, Flavor::Nu);
        let FixDef::Clauses(cs) = &fx.def else { panic!() };
        assert_eq!(cs.len(), 1);
        // Guard first, then one conjunct per original clause.
        assert_eq!(cs[0].premises.len(), 3);
        assert!(formula_to_string(&ob).starts_with("all y0:B all y1:B (EqB y0 y1 ->"));
    }

    #[test]
    fn real_nonnegativity_negation_simplifies() {
        let sig = std_sig();
        let x = Term::var("x", corpus::real());
        let f = corpus::real_nonneg(&x);
        let n = bool_simplify(&sig, &neg_formula(&f));
        assert_eq!(
            formula_to_string(&n),
            "ex p:P all n:N (geb n (rm x p) == tt -> qleq (rs x n) (qneg (pw2inv p)) == tt)"
        );
    }

    #[test]
    fn negation_size_growth_is_bounded() {
        fn size(f: &Formula) -> usize {
            match f {
                Formula::Atom { .. } => 1,
                Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                    1 + size(a) + size(b)
                }
                Formula::All(_, b) | Formula::Ex(_, b) => 1 + size(b),
            }
        }
        for f in crate::corpus::enumerate_formulas(4) {
            let n = neg_formula(&f);
            assert!(size(&n) <= 64 * size(&f) + 64, "{f:?}");
        }
    }

    #[test]
    fn bisimilarity_negation_is_inductive() {
        let nb = neg_fix(&corpus::bisims_fix());
        assert_eq!(nb.flavor, Flavor::Mu);
        let FixDef::Op { vars, body } = &nb.def else { panic!() };
        assert_eq!(vars.len(), 2);
        // One clause, no solving (heads are constructor applications):
        // all b0 b1 v0 v1 (ys == scons.. -> NEqB b0 b1 or X' v0 v1).
        let Formula::All(_, _) = body else { panic!("{body:?}") };
    }

    #[test]
    fn similarity_negation_matches_display() {
        let ns = neg_fix(&corpus::simn_fix());
        assert_eq!(ns.flavor, Flavor::Nu);
        let FixDef::Op { body, .. } = &ns.def else { panic!() };
        let cs = crate::logic::conjuncts(body);
        assert_eq!(cs.len(), 2);
        assert_eq!(
            formula_to_string(cs[0]),
            "y0 == 0 and y1 == 0 -> F"
        );
    }

    use crate::logic::PVar;
    use crate::syntax::Var;

    #[test]
    fn neq_detection() {
        let neq = neg_fix(&leibniz(&corpus::boolean()));
        assert_eq!(neq_type(&neq), Some(corpus::boolean()));
        assert_eq!(neq_type(&ev_fix()), None);
        let _ = disjuncts(&falsity());
    }
}
