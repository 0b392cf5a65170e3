//! Axiom schemes of the minimal-logic kernel, represented by their scheme
//! name plus all instantiation parameters. A derivation stores only the
//! `AxiomKind`; the conclusion formula is recomputed by `instantiate`, so a
//! derivation can never smuggle in a forged axiom conclusion.
//!
//! Least fixpoints come with their introduction clauses and the induction
//! (least-fixed-point) scheme; greatest fixpoints come with their closure
//! (unfold) scheme and the coinduction (greatest-fixed-point) scheme. The
//! other direction of each — inversion for least, fold for greatest — is
//! derived, not axiomatic.

use crate::logic::{
    all, alls, and, imp, imps, operator_body, or, Clause, FixDef, FixPred, Flavor, Formula,
    LogicError, PVar, PredSubst, Predicate,
};
use crate::syntax::{Term, Var};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum AxiomKind {
    /// `A -> B -> A and B`
    ConjIntro { a: Formula, b: Formula },
    /// `A and B -> A`
    ConjElim0 { a: Formula, b: Formula },
    /// `A and B -> B`
    ConjElim1 { a: Formula, b: Formula },
    /// `A -> A or B`
    DisjIntro0 { a: Formula, b: Formula },
    /// `B -> A or B`
    DisjIntro1 { a: Formula, b: Formula },
    /// `A or B -> (A -> C) -> (B -> C) -> C`
    DisjElim { a: Formula, b: Formula, c: Formula },
    /// `body[v := witness] -> ex v body`
    ExIntro { v: Var, body: Formula, witness: Term },
    /// `ex v body -> all v (body -> C) -> C`, provided `v` is not free in `C`
    ExElim { v: Var, body: Formula, c: Formula },
    /// Clause `i` of a least fixpoint, with the bound variable replaced by
    /// the fixpoint itself: `all binders (premises -> I heads)`.
    FixIntroClause { fix: Arc<FixPred>, clause: usize },
    /// Operator-form introduction for a least fixpoint:
    /// `all ys (body[X := I] -> I ys)`.
    FixIntroOp { fix: Arc<FixPred> },
    /// Closure of a greatest fixpoint: `all ys (J ys -> body[X := J])`.
    FixClosure { fix: Arc<FixPred> },
    /// Least-fixed-point (induction) scheme for motive `P`:
    /// the clause steps with `X := I cap P`, concluding `I subseteq P`.
    FixMu { fix: Arc<FixPred>, motive: Predicate },
    /// Greatest-fixed-point (coinduction) scheme for motive `Q`:
    /// `all ys (Q ys -> body[X := J cup Q]) -> all ys (Q ys -> J ys)`.
    FixNu { fix: Arc<FixPred>, motive: Predicate },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiomError {
    #[error("eigenvariable `{0}` occurs free in the conclusion of an existence elimination")]
    ExElimCapture(String),
    #[error("clause index {got} out of range (fixpoint has {have} clauses)")]
    ClauseIndex { got: usize, have: usize },
    #[error("{scheme} requires a {want} fixpoint")]
    WrongFlavor { scheme: &'static str, want: &'static str },
    #[error("motive arity {got:?} does not match fixpoint arity {want:?}")]
    MotiveArity { got: Vec<crate::syntax::Type>, want: Vec<crate::syntax::Type> },
    #[error("witness type cannot be checked: {0}")]
    Witness(String),
    #[error("{0}")]
    Logic(#[from] LogicError),
}

/// `{ys | I ys and P ys}` over fresh variables.
pub fn inter(i: &Predicate, p: &Predicate) -> Predicate {
    let mut avoid = i.free_term_vars();
    avoid.extend(p.free_term_vars());
    let vars = param_vars(i, &avoid);
    let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
    Predicate::compr(vars, and(i.apply(ts.clone()), p.apply(ts)))
}

/// `{ys | J ys or Q ys}` over fresh variables.
pub fn union(j: &Predicate, q: &Predicate) -> Predicate {
    let mut avoid = j.free_term_vars();
    avoid.extend(q.free_term_vars());
    let vars = param_vars(j, &avoid);
    let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
    Predicate::compr(vars, or(j.apply(ts.clone()), q.apply(ts)))
}

fn param_vars(p: &Predicate, avoid: &std::collections::HashSet<String>) -> Vec<Var> {
    let mut used = avoid.clone();
    p.arity()
        .iter()
        .enumerate()
        .map(|(i, ty)| {
            let mut name = format!("z{i}");
            let mut k = 0usize;
            while used.contains(&name) {
                name = format!("z{i}_{k}");
                k += 1;
            }
            used.insert(name.clone());
            Var::new(&name, ty.clone())
        })
        .collect()
}

/// Renames the given binders away from `avoid` (and from each other), so
/// that wrapping a formula mentioning those free variables in
/// `all binders (...)` cannot capture them. Returns the fresh binders with
/// the renaming substitution.
fn freshen_binders(
    binders: &[Var],
    avoid: &std::collections::HashSet<String>,
) -> (Vec<Var>, crate::logic::TermSubst) {
    let mut used: std::collections::HashSet<String> = avoid.clone();
    used.extend(binders.iter().map(|v| v.name.clone()));
    let mut out = Vec::with_capacity(binders.len());
    let mut map = crate::logic::TermSubst::new();
    for v in binders {
        if !avoid.contains(&v.name) {
            out.push(v.clone());
            continue;
        }
        let mut k = 0usize;
        let fresh = loop {
            let cand = format!("{}_{k}", v.name);
            if !used.contains(&cand) {
                break cand;
            }
            k += 1;
        };
        used.insert(fresh.clone());
        let nv = Var::new(&fresh, v.ty.clone());
        map.insert(v.name.clone(), nv.term());
        out.push(nv);
    }
    (out, map)
}

pub fn instantiate(kind: &AxiomKind) -> Result<Formula, AxiomError> {
    match kind {
        AxiomKind::ConjIntro { a, b } => {
            Ok(imp(a.clone(), imp(b.clone(), and(a.clone(), b.clone()))))
        }
        AxiomKind::ConjElim0 { a, b } => Ok(imp(and(a.clone(), b.clone()), a.clone())),
        AxiomKind::ConjElim1 { a, b } => Ok(imp(and(a.clone(), b.clone()), b.clone())),
        AxiomKind::DisjIntro0 { a, b } => Ok(imp(a.clone(), or(a.clone(), b.clone()))),
        AxiomKind::DisjIntro1 { a, b } => Ok(imp(b.clone(), or(a.clone(), b.clone()))),
        AxiomKind::DisjElim { a, b, c } => Ok(imp(
            or(a.clone(), b.clone()),
            imp(
                imp(a.clone(), c.clone()),
                imp(imp(b.clone(), c.clone()), c.clone()),
            ),
        )),
        AxiomKind::ExIntro { v, body, witness } => Ok(imp(
            body.subst_term1(&v.name, witness),
            crate::logic::ex(v.clone(), body.clone()),
        )),
        AxiomKind::ExElim { v, body, c } => {
            if c.free_term_vars().contains(&v.name) {
                return Err(AxiomError::ExElimCapture(v.name.clone()));
            }
            Ok(imp(
                crate::logic::ex(v.clone(), body.clone()),
                imp(all(v.clone(), imp(body.clone(), c.clone())), c.clone()),
            ))
        }
        AxiomKind::FixIntroClause { fix, clause } => {
            require_flavor(fix, Flavor::Mu, "introduction", "least")?;
            let FixDef::Clauses(cs) = &fix.def else {
                return Err(AxiomError::WrongFlavor {
                    scheme: "clause introduction",
                    want: "clause-form",
                });
            };
            let c = cs
                .get(*clause)
                .ok_or(AxiomError::ClauseIndex { got: *clause, have: cs.len() })?;
            Ok(clause_instance(fix, c, &Predicate::Fix(fix.clone()))?)
        }
        AxiomKind::FixIntroOp { fix } => {
            require_flavor(fix, Flavor::Mu, "operator introduction", "least")?;
            let (vars, body) = operator_body(fix);
            let selfp = Predicate::Fix(fix.clone());
            let (vars, ren) = freshen_binders(&vars, &selfp.free_term_vars());
            let body = subst_bound(&body.subst_terms(&ren), &fix.pvar, &selfp)?;
            let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
            Ok(alls(vars, imp(body, selfp.apply(ts))))
        }
        AxiomKind::FixClosure { fix } => {
            require_flavor(fix, Flavor::Nu, "closure", "greatest")?;
            let (vars, body) = operator_body(fix);
            let selfp = Predicate::Fix(fix.clone());
            let (vars, ren) = freshen_binders(&vars, &selfp.free_term_vars());
            let body = subst_bound(&body.subst_terms(&ren), &fix.pvar, &selfp)?;
            let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
            Ok(alls(vars, imp(selfp.apply(ts), body)))
        }
        AxiomKind::FixMu { fix, motive } => {
            require_flavor(fix, Flavor::Mu, "induction", "least")?;
            check_motive(fix, motive)?;
            let selfp = Predicate::Fix(fix.clone());
            let strengthened = inter(&selfp, motive);
            let avoid = strengthened.free_term_vars();
            let steps: Vec<Formula> = match &fix.def {
                FixDef::Clauses(cs) => cs
                    .iter()
                    .map(|c| {
                        let (binders, ren) = freshen_binders(&c.binders, &avoid);
                        let prem_subst = |p: &Formula| {
                            subst_bound(&p.subst_terms(&ren), &fix.pvar, &strengthened)
                        };
                        let premises: Result<Vec<Formula>, AxiomError> =
                            c.premises.iter().map(prem_subst).collect();
                        let head: Vec<Term> =
                            c.head.iter().map(|t| t.subst(&ren)).collect();
                        Ok(alls(binders, imps(premises?, motive.apply(head))))
                    })
                    .collect::<Result<_, AxiomError>>()?,
                FixDef::Op { vars, body } => {
                    let (vars, ren) = freshen_binders(vars, &avoid);
                    let body =
                        subst_bound(&body.subst_terms(&ren), &fix.pvar, &strengthened)?;
                    let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
                    vec![alls(vars, imp(body, motive.apply(ts)))]
                }
            };
            let ys = param_vars(&selfp, &avoid);
            let ts: Vec<Term> = ys.iter().map(|v| v.term()).collect();
            let concl = alls(ys, imp(selfp.apply(ts.clone()), motive.apply(ts)));
            Ok(imps(steps, concl))
        }
        AxiomKind::FixNu { fix, motive } => {
            require_flavor(fix, Flavor::Nu, "coinduction", "greatest")?;
            check_motive(fix, motive)?;
            let selfp = Predicate::Fix(fix.clone());
            let weakened = union(&selfp, motive);
            let avoid = weakened.free_term_vars();
            let (vars, body) = operator_body(fix);
            let (vars, ren) = freshen_binders(&vars, &avoid);
            let body = subst_bound(&body.subst_terms(&ren), &fix.pvar, &weakened)?;
            let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
            let step = alls(vars, imp(motive.apply(ts.clone()), body));
            let ys = param_vars(&selfp, &avoid);
            let ts2: Vec<Term> = ys.iter().map(|v| v.term()).collect();
            let concl = alls(ys, imp(motive.apply(ts2.clone()), selfp.apply(ts2)));
            Ok(imp(step, concl))
        }
    }
}

/// A clause with the bound predicate variable replaced by `p`:
/// `all binders (premises[X := p] -> p' heads)` where the head predicate is
/// the fixpoint itself.
pub fn clause_instance(
    fix: &FixPred,
    c: &Clause,
    head_pred: &Predicate,
) -> Result<Formula, AxiomError> {
    let selfp = Predicate::Fix(Arc::new(fix.clone()));
    let mut avoid = selfp.free_term_vars();
    avoid.extend(head_pred.free_term_vars());
    let (binders, ren) = freshen_binders(&c.binders, &avoid);
    let premises: Result<Vec<Formula>, AxiomError> = c
        .premises
        .iter()
        .map(|p| subst_bound(&p.subst_terms(&ren), &fix.pvar, &selfp))
        .collect();
    let head: Vec<Term> = c.head.iter().map(|t| t.subst(&ren)).collect();
    Ok(alls(binders, imps(premises?, head_pred.apply(head))))
}

fn subst_bound(f: &Formula, pvar: &PVar, p: &Predicate) -> Result<Formula, AxiomError> {
    let map: PredSubst = std::iter::once((pvar.key(), p.clone())).collect();
    Ok(f.subst_pvars(&map)?)
}

fn require_flavor(
    fix: &FixPred,
    want: Flavor,
    scheme: &'static str,
    want_name: &'static str,
) -> Result<(), AxiomError> {
    if fix.flavor != want {
        return Err(AxiomError::WrongFlavor { scheme, want: want_name });
    }
    Ok(())
}

fn check_motive(fix: &FixPred, motive: &Predicate) -> Result<(), AxiomError> {
    if motive.arity() != fix.pvar.arity {
        return Err(AxiomError::MotiveArity {
            got: motive.arity(),
            want: fix.pvar.arity.clone(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scheme hypotheses for derivations parameterized over predicate variables
// ---------------------------------------------------------------------------

/// `all xs (X xs -> X' xs -> B)`: the ex-falso hypothesis for `X` at `B`.
pub fn ef_hyp(x: &PVar, b: &Formula) -> Formula {
    let vars = pvar_args(x);
    let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
    alls(
        vars,
        imp(
            Predicate::Var(x.clone()).apply(ts.clone()),
            imp(Predicate::Var(x.primed(1)).apply(ts), b.clone()),
        ),
    )
}

/// `all xs (X'' xs -> X xs)`: the double-negation-elimination hypothesis.
pub fn dne_hyp(x: &PVar) -> Formula {
    let vars = pvar_args(x);
    let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
    alls(
        vars,
        imp(Predicate::Var(x.primed(2)).apply(ts.clone()), Predicate::Var(x.clone()).apply(ts)),
    )
}

/// `all xs (X xs -> X'' xs)`: the stability hypothesis (the converse
/// direction, used for the double-negation introduction scheme).
pub fn stab_hyp(x: &PVar) -> Formula {
    let vars = pvar_args(x);
    let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
    alls(
        vars,
        imp(Predicate::Var(x.clone()).apply(ts.clone()), Predicate::Var(x.primed(2)).apply(ts)),
    )
}

/// `all xs ((X' xs -> F) -> X xs)`: the tightness hypothesis for a
/// predicate variable.
pub fn tight_hyp(x: &PVar) -> Formula {
    let vars = pvar_args(x);
    let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
    alls(
        vars,
        imp(
            imp(Predicate::Var(x.primed(1)).apply(ts.clone()), crate::logic::falsity()),
            Predicate::Var(x.clone()).apply(ts),
        ),
    )
}

/// `all xs (F -> X xs)`: ex falso quodlibet at `X`.
pub fn efq_hyp(x: &PVar) -> Formula {
    let vars = pvar_args(x);
    let ts: Vec<Term> = vars.iter().map(|v| v.term()).collect();
    alls(vars, imp(crate::logic::falsity(), Predicate::Var(x.clone()).apply(ts)))
}

fn pvar_args(x: &PVar) -> Vec<Var> {
    x.arity
        .iter()
        .enumerate()
        .map(|(i, ty)| Var::new(&format!("x{i}"), ty.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{acc_fix, ev_fix, nat, numeral, tn_fix};
    use crate::logic::leibniz;
    use crate::print::formula_to_string;

    #[test]
    fn equality_axioms_match_their_displays() {
        let eq = leibniz(&nat());
        let intro = instantiate(&AxiomKind::FixIntroClause { fix: eq.clone(), clause: 0 }).unwrap();
        assert_eq!(formula_to_string(&intro), "all x:N x == x");
        let p = Predicate::Var(PVar::new("P", vec![nat(), nat()]));
        let elim = instantiate(&AxiomKind::FixMu { fix: eq, motive: p }).unwrap();
        assert_eq!(
            formula_to_string(&elim),
            "all x:N P x x -> all z0:N all z1:N (z0 == z1 -> P z0 z1)"
        );
    }

    #[test]
    fn even_induction_strengthens_the_premise() {
        let p = Predicate::Var(PVar::new("P", vec![nat()]));
        let ax = instantiate(&AxiomKind::FixMu { fix: ev_fix(), motive: p }).unwrap();
        let s = formula_to_string(&ax);
        assert!(s.contains("Ev n and P n"), "{s}");
        assert!(s.ends_with("all z0:N (Ev z0 -> P z0)"), "{s}");
    }

    #[test]
    fn accessibility_negation_axioms() {
        let nacc = crate::negation::neg_fix(&acc_fix());
        let closure = instantiate(&AxiomKind::FixClosure { fix: nacc.clone() }).unwrap();
        assert_eq!(
            formula_to_string(&closure),
            "all y:N (NAcc y -> ex y0:N (Prec y0 y and NAcc y0))"
        );
        let q = Predicate::Var(PVar::new("Q", vec![nat()]));
        let coind = instantiate(&AxiomKind::FixNu { fix: nacc, motive: q }).unwrap();
        assert_eq!(
            formula_to_string(&coind),
            "all y:N (Q y -> ex y0:N (Prec y0 y and (NAcc y0 or Q y0))) -> \
             all z0:N (Q z0 -> NAcc z0)"
        );
    }

    #[test]
    fn greatest_fixpoints_reject_induction_and_vice_versa() {
        let q = Predicate::Var(PVar::new("Q", vec![crate::corpus::tree()]));
        assert!(matches!(
            instantiate(&AxiomKind::FixMu { fix: tn_fix(), motive: q.clone() }),
            Err(AxiomError::WrongFlavor { .. })
        ));
        assert!(matches!(
            instantiate(&AxiomKind::FixClosure { fix: ev_fix() }),
            Err(AxiomError::WrongFlavor { .. })
        ));
        let p = Predicate::Var(PVar::new("P", vec![nat()]));
        assert!(matches!(
            instantiate(&AxiomKind::FixNu { fix: ev_fix(), motive: p }),
            Err(AxiomError::WrongFlavor { .. })
        ));
    }

    #[test]
    fn ex_elim_eigenvariable_is_enforced() {
        let n = Var::new("n", nat());
        let body = crate::corpus::ev().apply(vec![n.term()]);
        let bad = AxiomKind::ExElim { v: n.clone(), body: body.clone(), c: body.clone() };
        assert!(matches!(instantiate(&bad), Err(AxiomError::ExElimCapture(_))));
        let ok = AxiomKind::ExElim {
            v: n,
            body,
            c: crate::corpus::ev().apply(vec![numeral(0)]),
        };
        assert!(instantiate(&ok).is_ok());
    }

    #[test]
    fn witness_substitutes_into_ex_intro() {
        let n = Var::new("n", nat());
        let body = crate::corpus::ev().apply(vec![n.term()]);
        let ax = instantiate(&AxiomKind::ExIntro {
            v: n,
            body,
            witness: numeral(2),
        })
        .unwrap();
        assert_eq!(formula_to_string(&ax), "Ev 2 -> ex n:N Ev n");
    }

    #[test]
    fn hypothesis_builders() {
        let x = PVar::new("X", vec![nat()]);
        assert_eq!(formula_to_string(&ef_hyp(&x, &crate::logic::falsity())), "all x0:N (X x0 -> X' x0 -> F)");
        assert_eq!(formula_to_string(&dne_hyp(&x)), "all x0:N (X'' x0 -> X x0)");
        assert_eq!(formula_to_string(&stab_hyp(&x)), "all x0:N (X x0 -> X'' x0)");
        assert_eq!(formula_to_string(&efq_hyp(&x)), "all x0:N (F -> X x0)");
    }
}
