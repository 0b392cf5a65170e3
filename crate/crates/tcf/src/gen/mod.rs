//! Derivation generators: mechanized constructions of the structural
//! lemmas about strong negation (ex-falso transfer, ex falso quodlibet,
//! stability, double-negation elimination, monotonicity, and the tight
//! lemmas). Every function here assembles an explicit [`Derivation`]; none
//! of them is trusted — the kernel checker revalidates each output.

pub mod dne;
pub mod ef;
pub mod efq;
pub mod stab;
pub mod tight;

pub use dne::{gen_dne, DneEntry, DneEnv};
pub use ef::{gen_ef, gen_strong_to_weak, EfEntry, EfEnv};
pub use efq::{gen_efq, EfqEntry, EfqEnv};
pub use stab::{gen_stab, StabEntry, StabEnv};
pub use tight::{
    gen_contrapositive_for_tight, gen_strong_equiv_congr, gen_strong_impl_contra,
    gen_strong_impl_props, gen_tight_equiv, gen_tight_translate, StrongImplComponents,
    StrongImplProps,
};

use crate::axioms::AxiomKind;
use crate::dsl::{
    assume, eq_symm, lam, mp, spec_all, transport, GenCtx, GenError, Incl,
    InclEnv,
};
use crate::logic::{
    alls, bool_ty, eq_atom, falsity, imp, leibniz, Clause, Formula, NegInfo, PKey, PVar,
    Predicate, TermSubst,
};
use crate::negation::{neg_clause, neg_fix, fresh_subject_vars};
use crate::proof::Derivation;
use crate::syntax::{Term, Type, Var};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Recursion budget shared by all generators; the structural recursions
/// terminate on their own, the budget only guards against pathological
/// self-referential fixpoint definitions.
pub(crate) const DEPTH: u32 = 128;

pub(crate) type Res = Result<Derivation, GenError>;

pub(crate) fn unsup(msg: impl Into<String>) -> GenError {
    GenError::Unsupported(msg.into())
}

pub(crate) fn fresh_vars(ctx: &GenCtx, tys: &[Type], hint: &str) -> Vec<Var> {
    tys.iter().map(|ty| ctx.fresh(hint, ty.clone())).collect()
}

pub(crate) fn term_vec(vs: &[Var]) -> Vec<Term> {
    vs.iter().map(|v| v.term()).collect()
}

/// Splits a right-nested conjunction into exactly `n` parts.
pub(crate) fn split_n(f: &Formula, n: usize) -> Vec<Formula> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let mut cur = f;
    for _ in 0..n - 1 {
        let Formula::And(a, b) = cur else {
            panic!("expected a conjunction of {n} parts");
        };
        out.push(a.as_ref().clone());
        cur = b;
    }
    out.push(cur.clone());
    out
}

/// Sequentially instantiates `vars := ts` the way the checker's
/// universal elimination does.
pub(crate) fn seq_inst(mut f: Formula, vars: &[Var], ts: &[Term]) -> Formula {
    for (v, t) in vars.iter().zip(ts) {
        f = f.subst_term1(&v.name, t);
    }
    f
}

/// A clause with its binders renamed to fresh variables.
pub(crate) struct RenamedClause {
    pub binders: Vec<Var>,
    /// Premises over the fresh binders, predicate variables untouched.
    pub premises: Vec<Formula>,
    pub head: Vec<Term>,
}

pub(crate) fn rename_clause(ctx: &GenCtx, c: &Clause) -> RenamedClause {
    let binders: Vec<Var> = c.binders.iter().map(|v| ctx.fresh("w", v.ty.clone())).collect();
    let map: TermSubst = c
        .binders
        .iter()
        .zip(&binders)
        .map(|(old, new)| (old.name.clone(), new.term()))
        .collect();
    RenamedClause {
        binders,
        premises: c.premises.iter().map(|p| p.subst_terms(&map)).collect(),
        head: c.head.iter().map(|t| t.subst(&map)).collect(),
    }
}

/// The free predicate variables of a formula, with their arities.
pub(crate) fn free_pvar_list(f: &Formula) -> Vec<PVar> {
    let mut found: BTreeMap<PKey, PVar> = BTreeMap::new();
    collect_pvars_formula(f, &mut found);
    f.free_pvars()
        .into_iter()
        .filter_map(|k| found.get(&k).cloned())
        .collect()
}

fn collect_pvars_formula(f: &Formula, out: &mut BTreeMap<PKey, PVar>) {
    match f {
        Formula::Atom { pred, .. } => collect_pvars_pred(pred, out),
        Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            collect_pvars_formula(a, out);
            collect_pvars_formula(b, out);
        }
        Formula::All(_, b) | Formula::Ex(_, b) => collect_pvars_formula(b, out),
    }
}

fn collect_pvars_pred(p: &Predicate, out: &mut BTreeMap<PKey, PVar>) {
    match p {
        Predicate::Var(x) => {
            out.entry(x.key()).or_insert_with(|| x.clone());
        }
        Predicate::Compr { body, .. } => collect_pvars_formula(body, out),
        Predicate::Fix(fx) => match &fx.def {
            crate::logic::FixDef::Op { body, .. } => collect_pvars_formula(body, out),
            crate::logic::FixDef::Clauses(cs) => {
                for c in cs {
                    for pr in &c.premises {
                        collect_pvars_formula(pr, out);
                    }
                }
            }
        },
    }
}

/// From a proof of `a == b`, a proof of `b == a`.
pub(crate) fn symm_at(ctx: &GenCtx, ty: &Type, a: &Term, b: &Term, d: Derivation) -> Derivation {
    mp(spec_all(eq_symm(ctx, ty), [a.clone(), b.clone()]), d)
}

/// Rewrites every occurrence of the variable `from` in `f` to the term
/// `to`: given `deq : from == to` and `d : f`, a proof of
/// `f[from := to]`.
pub(crate) fn rewrite_var(
    ctx: &GenCtx,
    from: &Var,
    to: &Term,
    f: &Formula,
    deq: Derivation,
    d: Derivation,
) -> Derivation {
    let v = ctx.fresh("r", from.ty.clone());
    let body = f.subst_term1(&from.name, &v.term());
    transport(ctx, &from.ty, &v, &body, &from.term(), to, deq, d)
}

/// Injects a proof of the `i`-th disjunct into the right-nested
/// disjunction of `djs`.
pub(crate) fn or_inject(djs: &[Formula], i: usize, d: Derivation) -> Derivation {
    assert!(i < djs.len());
    if djs.len() == 1 {
        return d;
    }
    let rest = crate::logic::or_all(djs[1..].to_vec());
    if i == 0 {
        crate::dsl::inl(djs[0].clone(), rest, d)
    } else {
        crate::dsl::inr(djs[0].clone(), rest, or_inject(&djs[1..], i - 1, d))
    }
}

/// Builds a proof of the (possibly nested) existential `exf` from witness
/// terms `ws` and a proof `d` of the instantiated body.
pub(crate) fn ex_intro_chain(exf: &Formula, ws: &[Term], d: Derivation) -> Derivation {
    // Peel the existential prefix, instantiating as we go.
    let mut layers: Vec<(Var, Formula)> = Vec::with_capacity(ws.len());
    let mut cur = exf.clone();
    for w in ws {
        let Formula::Ex(v, b) = cur else {
            panic!("expected an existential prefix of length {}", ws.len());
        };
        layers.push((v.clone(), b.as_ref().clone()));
        cur = b.subst_term1(&v.name, w);
    }
    let mut out = d;
    for ((v, body), w) in layers.into_iter().zip(ws).rev() {
        out = crate::dsl::ex_intro(v, body, w.clone(), out);
    }
    out
}

/// Eliminates a prefix of `n` existentials from `exf`: `mk` receives the
/// fresh eigenvariables and the instantiated body, and must prove `goal`
/// from the assumption of that body.
pub(crate) fn ex_elim_chain(
    ctx: &GenCtx,
    n: usize,
    exf: &Formula,
    goal: &Formula,
    dex: Derivation,
    mk: impl FnOnce(&[Var], &Formula) -> Res,
) -> Res {
    let mut us: Vec<Var> = Vec::with_capacity(n);
    let mut fs: Vec<Formula> = vec![exf.clone()];
    for _ in 0..n {
        let Formula::Ex(v, b) = fs.last().unwrap().clone() else {
            return Err(unsup("expected an existential prefix"));
        };
        let u = ctx.fresh("u", v.ty.clone());
        fs.push(b.subst_term1(&v.name, &u.term()));
        us.push(u);
    }
    let mut d = mk(&us, fs.last().unwrap())?;
    for i in (0..n).rev() {
        let dexi = if i == 0 { dex.clone() } else { assume(fs[i].clone()) };
        d = crate::dsl::ex_elim(
            us[i].clone(),
            fs[i + 1].clone(),
            goal.clone(),
            dexi,
            crate::dsl::gen(us[i].clone(), lam(fs[i + 1].clone(), d)),
        );
    }
    Ok(d)
}

/// The raw negated-operator conjuncts of a clause-form fixpoint, over the
/// canonical subject variables (exactly the presentation chosen by
/// [`neg_fix`]), with no substitutions applied.
pub(crate) fn neg_conjuncts(
    fx: &Arc<crate::logic::FixPred>,
) -> Result<(Vec<Var>, Vec<(Formula, NegInfo)>), GenError> {
    let crate::logic::FixDef::Clauses(cs) = &fx.def else {
        return Err(unsup("negated conjuncts need a clause-form fixpoint"));
    };
    let nys = fresh_subject_vars(fx);
    let out = cs.iter().map(|c| neg_clause(fx, c, &nys)).collect();
    Ok((nys, out))
}

// ---------------------------------------------------------------------------
// Small closed lemmas
// ---------------------------------------------------------------------------

/// The strong negation of falsity is derivable: `⊢ ff N== tt` (strongly
/// negated Leibniz equality at the booleans, applied to `ff`, `tt`).
pub fn falsity_strong_neg(ctx: &GenCtx) -> Derivation {
    let b = bool_ty();
    let neq = neg_fix(&leibniz(&b));
    let intro = Derivation::Axiom(AxiomKind::FixIntroClause { fix: neq, clause: 0 });
    // all y0,y1 ((y1 == y0 -> F) -> NEq y0 y1), specialized to ff, tt.
    let d = spec_all(intro, [crate::logic::ff(), crate::logic::tt()]);
    let prem = eq_atom(&b, crate::logic::tt(), crate::logic::ff());
    let sym = symm_at(
        ctx,
        &b,
        &crate::logic::tt(),
        &crate::logic::ff(),
        assume(prem.clone()),
    );
    // sym : ff == tt (which is falsity) from the assumption tt == ff.
    mp(d, lam(prem, sym))
}

/// Leibniz-equality facts: the derivation of `ff N== tt` together with the
/// two directions of "strong negation cancels weak negation",
/// `N(¬A) ↔ A` (as a conjunction of implications).
pub fn gen_leibniz(ctx: &GenCtx, a: &Formula) -> (Derivation, Derivation) {
    let dneq = falsity_strong_neg(ctx);
    // N(¬A) = N(A -> F) = A and N F.
    let nf_atom = crate::negation::neg_formula(&falsity());
    let nnot = crate::logic::and(a.clone(), nf_atom.clone());
    let ltr = lam(
        nnot.clone(),
        crate::dsl::fst(a.clone(), nf_atom.clone(), assume(nnot.clone())),
    );
    let rtl = lam(
        a.clone(),
        crate::dsl::pair(a.clone(), nf_atom, assume(a.clone()), dneq.clone()),
    );
    let both = crate::dsl::pair(
        imp(nnot.clone(), a.clone()),
        imp(a.clone(), nnot),
        ltr,
        rtl,
    );
    (dneq, both)
}

/// Monotonicity of a formula in a strictly positive predicate variable:
/// a derivation of `all zs (P zs -> Q zs) -> A[X := P] -> A[X := Q]`.
pub fn gen_mono(
    ctx: &GenCtx,
    f: &Formula,
    x: &PVar,
    p: &Predicate,
    q: &Predicate,
) -> Res {
    if p.arity() != x.arity || q.arity() != x.arity {
        return Err(unsup("monotonicity: predicate arity mismatch"));
    }
    let zs = fresh_vars(ctx, &x.arity, "z");
    let zts = term_vec(&zs);
    let hyp = alls(zs.clone(), imp(p.apply(zts.clone()), q.apply(zts)));
    let mut env = InclEnv::new();
    env.insert(
        x.key(),
        Incl { small: p.clone(), big: q.clone(), proof: assume(hyp.clone()) },
    );
    let d = crate::dsl::mono(ctx, f, &env)?;
    Ok(lam(hyp, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::logic::{and, ex, or, weak_neg};
    use crate::negation::neg_formula;
    use crate::proof::Checker;

    fn nv(name: &str) -> Var {
        Var::new(name, corpus::nat())
    }

    fn closed_check(sig: &crate::sig::Signature, d: &Derivation, goal: &Formula) {
        Checker::new(sig).check_closed(d, goal).unwrap();
    }

    #[test]
    fn falsity_strong_neg_checks() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let d = falsity_strong_neg(&ctx);
        let goal = crate::negation::neg_formula(&falsity());
        closed_check(&sig, &d, &goal);
    }

    #[test]
    fn efq_at_even() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = nv("n");
        let a = corpus::ev().apply(vec![n.term()]);
        let d = efq::gen_efq(&ctx, &mut sig, &a).unwrap();
        closed_check(&sig, &d, &imp(falsity(), a));
    }

    #[test]
    fn efq_at_equation() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = nv("n");
        let a = eq_atom(&corpus::nat(), n.term(), corpus::suc(n.term()));
        let d = efq::gen_efq(&ctx, &mut sig, &a).unwrap();
        closed_check(&sig, &d, &imp(falsity(), a));
    }

    #[test]
    fn efq_at_cototal_tree() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let t = Var::new("t", corpus::tree());
        let a = corpus::tn().apply(vec![t.term()]);
        let d = efq::gen_efq(&ctx, &mut sig, &a).unwrap();
        closed_check(&sig, &d, &imp(falsity(), a));
    }

    #[test]
    fn efq_at_compound() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = nv("n");
        let m = nv("m");
        let a = ex(
            m.clone(),
            and(
                corpus::ev().apply(vec![m.term()]),
                or(
                    corpus::od().apply(vec![n.term()]),
                    eq_atom(&corpus::nat(), n.term(), m.term()),
                ),
            ),
        );
        let d = efq::gen_efq(&ctx, &mut sig, &a).unwrap();
        closed_check(&sig, &d, &imp(falsity(), a));
    }

    #[test]
    fn ef_at_even() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = nv("n");
        let a = corpus::ev().apply(vec![n.term()]);
        let d = ef::gen_ef(&ctx, &mut sig, &a, &falsity()).unwrap();
        let goal = imp(neg_formula(&a), weak_neg(a));
        closed_check(&sig, &d, &goal);
    }

    #[test]
    fn ef_at_cototal_tree() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let t = Var::new("t", corpus::tree());
        let a = corpus::tn().apply(vec![t.term()]);
        let d = ef::gen_ef(&ctx, &mut sig, &a, &falsity()).unwrap();
        let goal = imp(neg_formula(&a), weak_neg(a));
        closed_check(&sig, &d, &goal);
    }

    #[test]
    fn ef_transfers_into_an_arbitrary_target() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = nv("n");
        let a = corpus::ev().apply(vec![n.term()]);
        let b = corpus::od().apply(vec![n.term()]);
        let d = ef::gen_ef(&ctx, &mut sig, &a, &b).unwrap();
        let goal = imp(neg_formula(&a), imp(a, b));
        closed_check(&sig, &d, &goal);
    }

    #[test]
    fn strong_to_weak_with_predicate_variable() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = nv("n");
        let x = PVar::new("X", vec![corpus::nat()]);
        let a = and(
            Predicate::Var(x.clone()).apply(vec![n.term()]),
            corpus::ev().apply(vec![n.term()]),
        );
        let d = ef::gen_strong_to_weak(&ctx, &a).unwrap();
        let mut both = crate::logic::PredSubst::new();
        both.insert(x.key(), Predicate::Var(x.clone()));
        both.insert(x.primed(1).key(), Predicate::Var(x.primed(1)));
        let goal = imp(neg_formula(&a), weak_neg(a));
        Checker::new(&sig)
            .check_under(&d, &[crate::axioms::ef_hyp(&x, &falsity())], &goal)
            .unwrap();
    }

    #[test]
    fn leibniz_facts_check() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = nv("n");
        let a = corpus::ev().apply(vec![n.term()]);
        let (dneq, both) = gen_leibniz(&ctx, &a);
        closed_check(&sig, &dneq, &neg_formula(&falsity()));
        let nnot = neg_formula(&weak_neg(a.clone()));
        let goal = and(imp(nnot.clone(), a.clone()), imp(a, nnot));
        closed_check(&sig, &both, &goal);
    }

    #[test]
    fn monotonicity_of_list_membership() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let x = PVar::new("X", vec![corpus::nat()]);
        let l = Var::new("l", corpus::list(corpus::nat()));
        let f = Formula::Atom {
            pred: Predicate::Fix(corpus::list_of_x()),
            args: vec![l.term()],
        };
        let p = corpus::ev();
        let q = corpus::totn();
        let d = gen_mono(&ctx, &f, &x, &p, &q).unwrap();
        let zs = vec![nv("z")];
        let hyp = alls(
            zs.clone(),
            imp(p.apply(vec![zs[0].term()]), q.apply(vec![zs[0].term()])),
        );
        let big = f.subst_pvars(&crate::dsl::single_subst(&x, &q)).unwrap();
        let small = f.subst_pvars(&crate::dsl::single_subst(&x, &p)).unwrap();
        closed_check(&sig, &d, &imp(hyp, imp(small, big)));
    }
}

#[cfg(test)]
mod stab_tests {
    use super::*;
    use crate::corpus;
    use crate::logic::{and, ex, or};
    use crate::negation::neg_formula;
    use crate::proof::Checker;

    fn nn(f: &Formula) -> Formula {
        neg_formula(&neg_formula(f))
    }

    #[test]
    fn stability_of_an_equation() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = eq_atom(&corpus::nat(), n.term(), corpus::suc(n.term()));
        let d = stab::gen_stab(&ctx, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(a.clone(), nn(&a))).unwrap();
    }

    #[test]
    fn stability_of_even() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = corpus::ev().apply(vec![n.term()]);
        let d = stab::gen_stab(&ctx, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(a.clone(), nn(&a))).unwrap();
    }

    #[test]
    fn stability_of_cototal_trees() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let t = Var::new("t", corpus::tree());
        let a = corpus::tn().apply(vec![t.term()]);
        let d = stab::gen_stab(&ctx, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(a.clone(), nn(&a))).unwrap();
    }

    #[test]
    fn stability_of_stream_bisimilarity() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let u = Var::new("u", corpus::stream());
        let v = Var::new("v", corpus::stream());
        let a = Predicate::Fix(corpus::bisims_fix()).apply(vec![u.term(), v.term()]);
        let d = stab::gen_stab(&ctx, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(a.clone(), nn(&a))).unwrap();
    }

    #[test]
    fn stability_of_a_compound_formula_with_a_predicate_variable() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let m = Var::new("m", corpus::nat());
        let x = PVar::new("X", vec![corpus::nat()]);
        let a = ex(
            m.clone(),
            and(
                Predicate::Var(x.clone()).apply(vec![m.term()]),
                or(
                    corpus::od().apply(vec![n.term()]),
                    eq_atom(&corpus::nat(), n.term(), m.term()),
                ),
            ),
        );
        let d = stab::gen_stab(&ctx, &a).unwrap();
        Checker::new(&sig)
            .check_under(&d, &[crate::axioms::stab_hyp(&x)], &imp(a.clone(), nn(&a)))
            .unwrap();
    }

    #[test]
    fn stability_rejects_implications() {
        let ctx = GenCtx::new();
        let n = Var::new("n", corpus::nat());
        let a = imp(
            corpus::ev().apply(vec![n.term()]),
            corpus::od().apply(vec![n.term()]),
        );
        assert!(stab::gen_stab(&ctx, &a).is_err());
    }
}

#[cfg(test)]
mod dne_tests {
    use super::*;
    use crate::corpus;
    use crate::logic::{and, ex, or};
    use crate::negation::neg_formula;
    use crate::proof::Checker;

    fn nn(f: &Formula) -> Formula {
        neg_formula(&neg_formula(f))
    }

    #[test]
    fn double_negation_elimination_for_an_equation() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = eq_atom(&corpus::nat(), n.term(), corpus::suc(n.term()));
        let d = dne::gen_dne(&ctx, &mut sig, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(nn(&a), a.clone())).unwrap();
    }

    #[test]
    fn double_negation_elimination_for_even() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = corpus::ev().apply(vec![n.term()]);
        let d = dne::gen_dne(&ctx, &mut sig, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(nn(&a), a.clone())).unwrap();
    }

    #[test]
    fn double_negation_elimination_for_cototal_trees() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let t = Var::new("t", corpus::tree());
        let a = corpus::tn().apply(vec![t.term()]);
        let d = dne::gen_dne(&ctx, &mut sig, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(nn(&a), a.clone())).unwrap();
    }

    #[test]
    fn double_negation_elimination_for_stream_bisimilarity() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let u = Var::new("u", corpus::stream());
        let v = Var::new("v", corpus::stream());
        let a = Predicate::Fix(corpus::bisims_fix()).apply(vec![u.term(), v.term()]);
        let d = dne::gen_dne(&ctx, &mut sig, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(nn(&a), a.clone())).unwrap();
    }

    #[test]
    fn double_negation_elimination_for_an_implication() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = imp(
            corpus::ev().apply(vec![n.term()]),
            corpus::od().apply(vec![n.term()]),
        );
        let d = dne::gen_dne(&ctx, &mut sig, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &imp(nn(&a), a.clone())).unwrap();
    }

    #[test]
    fn double_negation_elimination_for_a_compound_formula_with_a_predicate_variable() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let m = Var::new("m", corpus::nat());
        let x = PVar::new("X", vec![corpus::nat()]);
        let a = ex(
            m.clone(),
            and(
                Predicate::Var(x.clone()).apply(vec![m.term()]),
                or(
                    corpus::od().apply(vec![n.term()]),
                    eq_atom(&corpus::nat(), n.term(), m.term()),
                ),
            ),
        );
        let d = dne::gen_dne(&ctx, &mut sig, &a).unwrap();
        Checker::new(&sig)
            .check_under(&d, &[crate::axioms::dne_hyp(&x)], &imp(nn(&a), a.clone()))
            .unwrap();
    }
}

#[cfg(test)]
mod tight_tests {
    use super::*;
    use crate::corpus;
    use crate::logic::{all, and, ex, or, weak_neg};
    use crate::negation::{neg_formula, strong_equiv, strong_impl, tight_translate};
    use crate::proof::Checker;

    #[test]
    fn tightness_spellings_are_equivalent() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = corpus::ev().apply(vec![n.term()]);
        let na = neg_formula(&a);
        let wn = imp(na.clone(), falsity());
        let taut = imp(na.clone(), a.clone());
        let goal = and(imp(wn.clone(), taut.clone()), imp(taut, wn));
        let d = tight::gen_tight_equiv(&ctx, &mut sig, &a).unwrap();
        Checker::new(&sig).check_closed(&d, &goal).unwrap();
    }

    #[test]
    fn translated_disjunction_is_tight() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let x = PVar::new("X", vec![corpus::nat()]);
        let y = PVar::new("Y", vec![corpus::nat()]);
        let a = or(
            Predicate::Var(x.clone()).apply(vec![n.term()]),
            Predicate::Var(y.clone()).apply(vec![n.term()]),
        );
        let at = tight_translate(&a);
        let goal = imp(weak_neg(neg_formula(&at)), at);
        let d = tight::gen_tight_translate(&ctx, &a).unwrap();
        Checker::new(&sig)
            .check_under(
                &d,
                &[crate::axioms::tight_hyp(&x), crate::axioms::tight_hyp(&y)],
                &goal,
            )
            .unwrap();
    }

    #[test]
    fn translated_universal_is_tight() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let x = PVar::new("X", vec![corpus::nat()]);
        let a = all(n.clone(), Predicate::Var(x.clone()).apply(vec![n.term()]));
        let at = tight_translate(&a);
        let goal = imp(weak_neg(neg_formula(&at)), at);
        let d = tight::gen_tight_translate(&ctx, &a).unwrap();
        Checker::new(&sig)
            .check_under(&d, &[crate::axioms::tight_hyp(&x)], &goal)
            .unwrap();
    }

    #[test]
    fn translated_existential_is_tight() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let x = PVar::new("X", vec![corpus::nat()]);
        let a = ex(n.clone(), Predicate::Var(x.clone()).apply(vec![n.term()]));
        let at = tight_translate(&a);
        let goal = imp(weak_neg(neg_formula(&at)), at);
        let d = tight::gen_tight_translate(&ctx, &a).unwrap();
        Checker::new(&sig)
            .check_under(&d, &[crate::axioms::tight_hyp(&x)], &goal)
            .unwrap();
    }

    #[test]
    fn translated_compound_with_implication_is_tight() {
        let ctx = GenCtx::new();
        let sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let x = PVar::new("X", vec![corpus::nat()]);
        let y = PVar::new("Y", vec![corpus::nat()]);
        let a = imp(
            corpus::ev().apply(vec![n.term()]),
            and(
                Predicate::Var(x.clone()).apply(vec![n.term()]),
                ex(n.clone(), Predicate::Var(y.clone()).apply(vec![n.term()])),
            ),
        );
        let at = tight_translate(&a);
        let goal = imp(weak_neg(neg_formula(&at)), at);
        let d = tight::gen_tight_translate(&ctx, &a).unwrap();
        Checker::new(&sig)
            .check_under(
                &d,
                &[crate::axioms::tight_hyp(&x), crate::axioms::tight_hyp(&y)],
                &goal,
            )
            .unwrap();
    }

    #[test]
    fn tight_translation_rejects_positive_fixpoints() {
        let ctx = GenCtx::new();
        let n = Var::new("n", corpus::nat());
        let a = corpus::ev().apply(vec![n.term()]);
        assert!(tight::gen_tight_translate(&ctx, &a).is_err());
    }

    #[test]
    fn strong_contrapositive_through_a_tight_target() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = corpus::ev().apply(vec![n.term()]);
        let x = PVar::new("X", vec![corpus::nat()]);
        let b_raw = ex(n.clone(), Predicate::Var(x.clone()).apply(vec![n.term()]));
        let b = tight_translate(&b_raw);
        let tightness = tight::gen_tight_translate(&ctx, &b_raw).unwrap();
        let d =
            tight::gen_contrapositive_for_tight(&ctx, &mut sig, &a, &b, &tightness).unwrap();
        let goal = imp(
            imp(neg_formula(&b), neg_formula(&a)),
            imp(a.clone(), b.clone()),
        );
        Checker::new(&sig)
            .check_under(&d, &[crate::axioms::tight_hyp(&x)], &goal)
            .unwrap();
    }

    #[test]
    fn contrapositive_rejects_a_mismatched_tightness_derivation() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = corpus::ev().apply(vec![n.term()]);
        let b = corpus::od().apply(vec![n.term()]);
        let bogus = crate::dsl::identity(falsity());
        assert!(
            tight::gen_contrapositive_for_tight(&ctx, &mut sig, &a, &b, &bogus).is_err()
        );
    }

    #[test]
    fn strong_implication_contraposes() {
        let ctx = GenCtx::new();
        let mut sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let a = corpus::ev().apply(vec![n.term()]);
        let b = corpus::od().apply(vec![n.term()]);
        let comps = tight::StrongImplComponents {
            dne_a: dne::gen_dne(&ctx, &mut sig, &a).unwrap(),
            stab_a: stab::gen_stab(&ctx, &a).unwrap(),
            dne_b: dne::gen_dne(&ctx, &mut sig, &b).unwrap(),
            stab_b: stab::gen_stab(&ctx, &b).unwrap(),
        };
        let d = tight::gen_strong_impl_contra(&a, &b, &comps).unwrap();
        let sab = strong_impl(&a, &b);
        let snba = strong_impl(&neg_formula(&b), &neg_formula(&a));
        let goal = and(imp(sab.clone(), snba.clone()), imp(snba, sab));
        Checker::new(&sig).check_closed(&d, &goal).unwrap();
    }

    #[test]
    fn strong_equivalence_congruence_for_implication() {
        let sig = corpus::std_sig();
        let n = Var::new("n", corpus::nat());
        let t = Var::new("t", corpus::tree());
        let a0 = corpus::ev().apply(vec![n.term()]);
        let b0 = corpus::od().apply(vec![n.term()]);
        let a1 = corpus::tn().apply(vec![t.term()]);
        let b1 = eq_atom(&corpus::nat(), n.term(), corpus::suc(n.term()));
        let d = tight::gen_strong_equiv_congr(&a0, &b0, &a1, &b1).unwrap();
        let goal = imp(
            strong_equiv(&a0, &b0),
            imp(
                strong_equiv(&a1, &b1),
                strong_equiv(
                    &imp(a0.clone(), a1.clone()),
                    &imp(b0.clone(), b1.clone()),
                ),
            ),
        );
        Checker::new(&sig).check_closed(&d, &goal).unwrap();
    }
}
