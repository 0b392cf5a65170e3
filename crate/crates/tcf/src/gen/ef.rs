//! Ex-falso transfer: for every formula `A` and target `B`, a derivation of
//! `N A -> A -> B` whose open assumptions are the hypotheses
//! `all xs (X xs -> X' xs -> B)` for the predicate variables of `A`
//! (plus ex-falso-quodlibet hypotheses when `B` is not falsity itself).

use super::{
    ex_elim_chain, free_pvar_list, fresh_vars, neg_conjuncts, rename_clause, rewrite_var,
    seq_inst, split_n, symm_at, term_vec, unsup, Res, DEPTH,
};
use crate::axioms::{ef_hyp, inter, AxiomKind};
use crate::dsl::{
    and_proj, and_tuple, assume, gens, identity, lam, lams, mp, mps, or_cases, refl, spec,
    spec_all, subst_fix, unfold_flat_mu, GenCtx,
};
use crate::logic::{
    and, conjuncts, eq_atom, falsity, imp, is_falsity, operator_body, vec_eq, FixDef, Flavor,
    Formula, PKey, PredSubst, Predicate, TermSubst,
};
use crate::negation::{neg_fix, neg_formula};
use crate::proof::Derivation;
use crate::sig::Signature;
use crate::syntax::Term;
use std::collections::HashMap;
use std::sync::Arc;

/// An environment entry for the transfer recursion: a positive predicate,
/// its "negative" counterpart, and a proof of
/// `all xs (pos xs -> neg xs -> B)`.
#[derive(Clone)]
pub struct EfEntry {
    pub pos: Predicate,
    pub neg: Predicate,
    pub proof: Derivation,
}

pub type EfEnv = HashMap<PKey, EfEntry>;

fn pos_map(env: &EfEnv) -> PredSubst {
    env.iter().map(|(k, e)| (k.clone(), e.pos.clone())).collect()
}

fn both_map(env: &EfEnv) -> PredSubst {
    let mut m = PredSubst::new();
    for (k, e) in env {
        m.insert(k.clone(), e.pos.clone());
        m.insert((k.0.clone(), k.1 + 1), e.neg.clone());
    }
    m
}

/// `N A -> A -> B`, with open assumptions among the per-variable transfer
/// hypotheses (and, for `B` other than falsity, the hypotheses of
/// [`super::gen_efq`] at `B`).
pub fn gen_ef(ctx: &GenCtx, sig: &mut Signature, a: &Formula, b: &Formula) -> Res {
    let mut env = EfEnv::new();
    for x in free_pvar_list(a) {
        env.insert(
            x.key(),
            EfEntry {
                pos: Predicate::Var(x.clone()),
                neg: Predicate::Var(x.primed(1)),
                proof: assume(ef_hyp(&x, b)),
            },
        );
    }
    let dfq = if is_falsity(b) {
        identity(falsity())
    } else {
        super::efq::gen_efq(ctx, sig, b)?
    };
    ef_rec(ctx, a, b, &env, &dfq, DEPTH)
}

/// `N A -> ¬A`: the specialization of the transfer lemma at `B := F`
/// (weak negation is literally `A -> F`).
pub fn gen_strong_to_weak(ctx: &GenCtx, a: &Formula) -> Res {
    let mut env = EfEnv::new();
    let b = falsity();
    for x in free_pvar_list(a) {
        env.insert(
            x.key(),
            EfEntry {
                pos: Predicate::Var(x.clone()),
                neg: Predicate::Var(x.primed(1)),
                proof: assume(ef_hyp(&x, &b)),
            },
        );
    }
    ef_rec(ctx, a, &b, &env, &identity(falsity()), DEPTH)
}

/// Recursion on `f`: a derivation of
/// `N(f)[pos, primed := neg] -> f[pos] -> B`.
pub(crate) fn ef_rec(
    ctx: &GenCtx,
    f: &Formula,
    b: &Formula,
    env: &EfEnv,
    dfq: &Derivation,
    depth: u32,
) -> Res {
    if depth == 0 {
        return Err(unsup("transfer recursion depth exceeded"));
    }
    let posm = pos_map(env);
    let bothm = both_map(env);
    let pf = f.subst_pvars(&posm)?;
    let nf = neg_formula(f).subst_pvars(&bothm)?;
    match f {
        Formula::Atom { pred, args } => match pred {
            Predicate::Var(x) => {
                let e = env
                    .get(&x.key())
                    .ok_or_else(|| unsup(format!("unregistered predicate variable {}", x.name)))?;
                let d = spec_all(e.proof.clone(), args.iter().cloned());
                let pa = e.pos.apply(args.clone());
                let na = e.neg.apply(args.clone());
                Ok(lam(
                    na.clone(),
                    lam(pa.clone(), mp(mp(d, assume(pa)), assume(na))),
                ))
            }
            Predicate::Compr { .. } => {
                ef_rec(ctx, &pred.apply(args.clone()), b, env, dfq, depth - 1)
            }
            Predicate::Fix(fx) => ef_fix(ctx, fx, args, b, env, dfq, depth),
        },
        Formula::Imp(a0, a1) => {
            // N(A0 -> A1) = A0 and N A1.
            let ih = ef_rec(ctx, a1, b, env, dfq, depth - 1)?;
            let pa0 = a0.subst_pvars(&posm)?;
            let na1 = neg_formula(a1).subst_pvars(&bothm)?;
            Ok(lam(
                nf.clone(),
                lam(
                    pf.clone(),
                    mps(
                        ih,
                        vec![
                            crate::dsl::snd(pa0.clone(), na1.clone(), assume(nf.clone())),
                            mp(assume(pf.clone()), crate::dsl::fst(pa0, na1, assume(nf.clone()))),
                        ],
                    ),
                ),
            ))
        }
        Formula::And(a0, a1) => {
            // N(A0 and A1) = N A0 or N A1.
            let ih0 = ef_rec(ctx, a0, b, env, dfq, depth - 1)?;
            let ih1 = ef_rec(ctx, a1, b, env, dfq, depth - 1)?;
            let na0 = neg_formula(a0).subst_pvars(&bothm)?;
            let na1 = neg_formula(a1).subst_pvars(&bothm)?;
            let pa0 = a0.subst_pvars(&posm)?;
            let pa1 = a1.subst_pvars(&posm)?;
            Ok(lam(
                nf.clone(),
                lam(
                    pf.clone(),
                    or_cases(
                        &[na0.clone(), na1.clone()],
                        b.clone(),
                        assume(nf.clone()),
                        vec![
                            lam(
                                na0.clone(),
                                mps(
                                    ih0,
                                    vec![
                                        assume(na0.clone()),
                                        crate::dsl::fst(pa0.clone(), pa1.clone(), assume(pf.clone())),
                                    ],
                                ),
                            ),
                            lam(
                                na1.clone(),
                                mps(
                                    ih1,
                                    vec![
                                        assume(na1.clone()),
                                        crate::dsl::snd(pa0, pa1, assume(pf.clone())),
                                    ],
                                ),
                            ),
                        ],
                    ),
                ),
            ))
        }
        Formula::Or(a0, a1) => {
            // N(A0 or A1) = N A0 and N A1.
            let ih0 = ef_rec(ctx, a0, b, env, dfq, depth - 1)?;
            let ih1 = ef_rec(ctx, a1, b, env, dfq, depth - 1)?;
            let na0 = neg_formula(a0).subst_pvars(&bothm)?;
            let na1 = neg_formula(a1).subst_pvars(&bothm)?;
            let pa0 = a0.subst_pvars(&posm)?;
            let pa1 = a1.subst_pvars(&posm)?;
            Ok(lam(
                nf.clone(),
                lam(
                    pf.clone(),
                    or_cases(
                        &[pa0.clone(), pa1.clone()],
                        b.clone(),
                        assume(pf.clone()),
                        vec![
                            lam(
                                pa0.clone(),
                                mps(
                                    ih0,
                                    vec![
                                        crate::dsl::fst(na0.clone(), na1.clone(), assume(nf.clone())),
                                        assume(pa0.clone()),
                                    ],
                                ),
                            ),
                            lam(
                                pa1.clone(),
                                mps(
                                    ih1,
                                    vec![
                                        crate::dsl::snd(na0, na1, assume(nf.clone())),
                                        assume(pa1.clone()),
                                    ],
                                ),
                            ),
                        ],
                    ),
                ),
            ))
        }
        Formula::All(v, a) => {
            // N(all v A) = ex v N A.
            let u = ctx.fresh("u", v.ty.clone());
            let a_u = a.subst_term1(&v.name, &u.term());
            let ih = ef_rec(ctx, &a_u, b, env, dfq, depth - 1)?;
            let na_u = neg_formula(&a_u).subst_pvars(&bothm)?;
            Ok(lam(
                nf.clone(),
                lam(
                    pf.clone(),
                    crate::dsl::ex_elim(
                        u.clone(),
                        na_u.clone(),
                        b.clone(),
                        assume(nf.clone()),
                        crate::dsl::gen(
                            u.clone(),
                            lam(
                                na_u.clone(),
                                mps(
                                    ih,
                                    vec![assume(na_u), spec(assume(pf.clone()), u.term())],
                                ),
                            ),
                        ),
                    ),
                ),
            ))
        }
        Formula::Ex(v, a) => {
            // N(ex v A) = all v N A.
            let u = ctx.fresh("u", v.ty.clone());
            let a_u = a.subst_term1(&v.name, &u.term());
            let ih = ef_rec(ctx, &a_u, b, env, dfq, depth - 1)?;
            let pa_u = a_u.subst_pvars(&posm)?;
            Ok(lam(
                nf.clone(),
                lam(
                    pf.clone(),
                    crate::dsl::ex_elim(
                        u.clone(),
                        pa_u.clone(),
                        b.clone(),
                        assume(pf.clone()),
                        crate::dsl::gen(
                            u.clone(),
                            lam(
                                pa_u.clone(),
                                mps(
                                    ih,
                                    vec![spec(assume(nf.clone()), u.term()), assume(pa_u)],
                                ),
                            ),
                        ),
                    ),
                ),
            ))
        }
    }
}

/// Transfer at a fixpoint atom.
fn ef_fix(
    ctx: &GenCtx,
    fx: &Arc<crate::logic::FixPred>,
    args: &[Term],
    b: &Formula,
    env: &EfEnv,
    dfq: &Derivation,
    depth: u32,
) -> Res {
    let posm = pos_map(env);
    let bothm = both_map(env);
    let fx_s = subst_fix(fx, &posm)?;
    let nfx = neg_fix(fx);
    let nfx_s = subst_fix(&nfx, &bothm)?;
    let selfp = Predicate::Fix(fx_s.clone());
    let nselfp = Predicate::Fix(nfx_s.clone());
    match fx.flavor {
        Flavor::Mu => {
            // Induction on the fixpoint with motive {ws | N I ws -> B}.
            let ws = fresh_vars(ctx, &fx.pvar.arity, "w");
            let motive = Predicate::compr(
                ws.clone(),
                imp(nselfp.apply(term_vec(&ws)), b.clone()),
            );
            let strengthened = inter(&selfp, &motive);
            let taut = {
                let xs = fresh_vars(ctx, &fx.pvar.arity, "w");
                let xts = term_vec(&xs);
                let pa = selfp.apply(xts.clone());
                let qa = motive.apply(xts.clone());
                let hyp = and(pa.clone(), qa.clone());
                let na = nselfp.apply(xts);
                gens(
                    &xs,
                    lam(
                        hyp.clone(),
                        lam(
                            na.clone(),
                            mp(crate::dsl::snd(pa, qa, assume(hyp)), assume(na)),
                        ),
                    ),
                )
            };
            let mut env2 = env.clone();
            env2.insert(
                fx.pvar.key(),
                EfEntry { pos: strengthened.clone(), neg: nselfp.clone(), proof: taut },
            );
            let mut sub2 = posm.clone();
            sub2.insert(fx.pvar.key(), strengthened.clone());
            let mut steps = Vec::new();
            match &fx.def {
                FixDef::Op { vars, body } => {
                    let vs2 = ctx.fresh_like(vars);
                    let ren: TermSubst = vars
                        .iter()
                        .zip(&vs2)
                        .map(|(o, n)| (o.name.clone(), n.term()))
                        .collect();
                    let body2 = body.subst_terms(&ren);
                    let hyp = body2.subst_pvars(&sub2)?;
                    let hn = nselfp.apply(term_vec(&vs2));
                    let dun = mp(
                        spec_all(
                            Derivation::Axiom(AxiomKind::FixClosure { fix: nfx_s.clone() }),
                            term_vec(&vs2),
                        ),
                        assume(hn.clone()),
                    );
                    let ih = ef_rec(ctx, &body2, b, &env2, dfq, depth - 1)?;
                    steps.push(gens(
                        &vs2,
                        lam(hyp.clone(), lam(hn, mp(mp(ih, dun), assume(hyp)))),
                    ));
                }
                FixDef::Clauses(cs) => {
                    for (ci, c) in cs.iter().enumerate() {
                        steps.push(ef_mu_step(
                            ctx, fx, &nfx_s, c, ci, b, &env2, &sub2, &bothm, &selfp, &nselfp,
                            dfq, depth,
                        )?);
                    }
                }
            }
            let ind = Derivation::Axiom(AxiomKind::FixMu {
                fix: fx_s.clone(),
                motive: motive.clone(),
            });
            let applied = spec_all(mps(ind, steps), args.iter().cloned());
            let nf = nselfp.apply(args.to_vec());
            let pf = selfp.apply(args.to_vec());
            Ok(lam(
                nf.clone(),
                lam(pf.clone(), mp(mp(applied, assume(pf)), assume(nf))),
            ))
        }
        Flavor::Nu => {
            // Induction on the least fixpoint N J with motive
            // {ws | J ws -> B}.
            let ws = fresh_vars(ctx, &fx.pvar.arity, "w");
            let motive = Predicate::compr(
                ws.clone(),
                imp(selfp.apply(term_vec(&ws)), b.clone()),
            );
            let strengthened = inter(&nselfp, &motive);
            let taut = {
                let xs = fresh_vars(ctx, &fx.pvar.arity, "w");
                let xts = term_vec(&xs);
                let pa = selfp.apply(xts.clone());
                let nq = nselfp.apply(xts.clone());
                let mq = motive.apply(xts);
                let na = and(nq.clone(), mq.clone());
                gens(
                    &xs,
                    lam(
                        pa.clone(),
                        lam(
                            na.clone(),
                            mp(crate::dsl::snd(nq, mq, assume(na)), assume(pa)),
                        ),
                    ),
                )
            };
            let mut env2 = env.clone();
            env2.insert(
                fx.pvar.key(),
                EfEntry { pos: selfp.clone(), neg: strengthened.clone(), proof: taut },
            );
            let FixDef::Op { vars: nys, body: nbody } = &nfx_s.def else {
                return Err(unsup(
                    "transfer through a coinductive predicate whose negation is not operator-form",
                ));
            };
            let qs = fresh_vars(
                ctx,
                &nys.iter().map(|v| v.ty.clone()).collect::<Vec<_>>(),
                "q",
            );
            let qts = term_vec(&qs);
            let ren: TermSubst = nys
                .iter()
                .zip(&qs)
                .map(|(o, n)| (o.name.clone(), n.term()))
                .collect();
            let nbody2 = nbody.subst_terms(&ren);
            let hyp = nbody2
                .subst_pvars(&crate::dsl::single_subst(&nfx_s.pvar, &strengthened))?;
            let hj = selfp.apply(qts.clone());
            let inner = match &fx.def {
                FixDef::Op { vars, body } => {
                    let ren0: TermSubst = vars
                        .iter()
                        .zip(&qs)
                        .map(|(o, n)| (o.name.clone(), n.term()))
                        .collect();
                    let body2 = body.subst_terms(&ren0);
                    let dun = mp(
                        spec_all(
                            Derivation::Axiom(AxiomKind::FixClosure { fix: fx_s.clone() }),
                            qts.clone(),
                        ),
                        assume(hj.clone()),
                    );
                    let ih = ef_rec(ctx, &body2, b, &env2, dfq, depth - 1)?;
                    mp(mp(ih, assume(hyp.clone())), dun)
                }
                FixDef::Clauses(cs) => {
                    // Unfold J at the subject variables and case over its
                    // uniform operator body.
                    let dun = mp(
                        spec_all(
                            Derivation::Axiom(AxiomKind::FixClosure { fix: fx_s.clone() }),
                            qts.clone(),
                        ),
                        assume(hj.clone()),
                    );
                    let (uys, ubody) = operator_body(&fx_s);
                    let ubody = ubody
                        .subst_pvars(&crate::dsl::single_subst(&fx_s.pvar, &selfp))?;
                    let ubody = seq_inst(ubody, &uys, &qts);
                    let djs: Vec<Formula> =
                        crate::logic::disjuncts(&ubody).into_iter().cloned().collect();
                    if djs.len() != cs.len() {
                        return Err(unsup("unexpected uniform-body shape"));
                    }
                    let mut branches = Vec::new();
                    for (ci, c) in cs.iter().enumerate() {
                        branches.push(ef_nu_branch(
                            ctx, fx, c, ci, &djs[ci], b, &env2, &posm, &bothm, &selfp,
                            &strengthened, &hyp, &qs, dfq, depth,
                        )?);
                    }
                    or_cases(&djs, b.clone(), dun, branches)
                }
            };
            let step = gens(&qs, lam(hyp.clone(), lam(hj, inner)));
            let ind = Derivation::Axiom(AxiomKind::FixMu {
                fix: nfx_s.clone(),
                motive: motive.clone(),
            });
            let applied = spec_all(mp(ind, step), args.iter().cloned());
            let nf = nselfp.apply(args.to_vec());
            let pf = selfp.apply(args.to_vec());
            Ok(lam(
                nf.clone(),
                lam(pf.clone(), mp(mp(applied, assume(nf)), assume(pf))),
            ))
        }
    }
}

/// One induction step for a clause-form least fixpoint.
#[allow(clippy::too_many_arguments)]
fn ef_mu_step(
    ctx: &GenCtx,
    fx: &Arc<crate::logic::FixPred>,
    nfx_s: &Arc<crate::logic::FixPred>,
    c: &crate::logic::Clause,
    ci: usize,
    b: &Formula,
    env2: &EfEnv,
    sub2: &PredSubst,
    bothm: &PredSubst,
    _selfp: &Predicate,
    nselfp: &Predicate,
    dfq: &Derivation,
    depth: u32,
) -> Res {
    let rc = rename_clause(ctx, c);
    let hyps: Vec<Formula> = rc
        .premises
        .iter()
        .map(|p| p.subst_pvars(sub2))
        .collect::<Result<_, _>>()?;
    let hn_f = nselfp.apply(rc.head.clone());
    // Unfold N I at the clause head and project the conjunct for this clause.
    let dun = match nfx_s.flavor {
        Flavor::Nu => mp(
            spec_all(
                Derivation::Axiom(AxiomKind::FixClosure { fix: nfx_s.clone() }),
                rc.head.clone(),
            ),
            assume(hn_f.clone()),
        ),
        Flavor::Mu => mp(
            spec_all(unfold_flat_mu(ctx, nfx_s)?, rc.head.clone()),
            assume(hn_f.clone()),
        ),
    };
    let (nys, raw) = neg_conjuncts(fx)?;
    let mut subn = bothm.clone();
    subn.insert(fx.pvar.primed(1).key(), nselfp.clone());
    let mut conj_fs = Vec::new();
    for (cf, _) in &raw {
        let cf = seq_inst(cf.clone(), &nys, &rc.head);
        conj_fs.push(cf.subst_pvars(&subn)?);
    }
    let mut dcur = and_proj(&conj_fs, ci, dun);
    let mut fcur = conj_fs[ci].clone();
    let info = raw[ci].1.clone();
    // Instantiate the kept binders with this clause's (renamed) binders.
    for &kb in &info.kept_binders {
        let Formula::All(v, bodyf) = fcur else {
            return Err(unsup("unexpected negated-conjunct shape"));
        };
        let val = rc.binders[kb].term();
        fcur = bodyf.subst_term1(&v.name, &val);
        dcur = spec(dcur, val);
    }
    // Discharge the guard equations by reflexivity.
    if !info.kept_eqs.is_empty() {
        let Formula::Imp(eqc, rest) = fcur else {
            return Err(unsup("unexpected negated-conjunct guard shape"));
        };
        let eqs: Vec<Formula> = conjuncts(&eqc).into_iter().cloned().collect();
        let mut prfs = Vec::new();
        for e in &eqs {
            let Formula::Atom { pred, args } = e else {
                return Err(unsup("guard is not an equation"));
            };
            let ty = pred.arity()[0].clone();
            prfs.push(refl(&ty, args[0].clone()));
        }
        dcur = mp(dcur, and_tuple(&eqs, prfs));
        fcur = rest.as_ref().clone();
    }
    let inner = if c.premises.is_empty() {
        // fcur is falsity.
        mp(dfq.clone(), dcur)
    } else {
        let djs: Vec<Formula> = rc
            .premises
            .iter()
            .map(|p| neg_formula(p).subst_pvars(&subn))
            .collect::<Result<_, _>>()?;
        let mut branches = Vec::new();
        for (j, pj) in rc.premises.iter().enumerate() {
            let ih = ef_rec(ctx, pj, b, env2, dfq, depth - 1)?;
            branches.push(lam(
                djs[j].clone(),
                mp(mp(ih, assume(djs[j].clone())), assume(hyps[j].clone())),
            ));
        }
        or_cases(&djs, b.clone(), dcur, branches)
    };
    let _ = fcur;
    Ok(gens(&rc.binders, lams(hyps, lam(hn_f, inner))))
}

/// One disjunct branch of the induction step on `N J` for a clause-form
/// greatest fixpoint `J`: from the strengthened negated-operator
/// hypothesis and this clause's uniform disjunct, conclude `B`.
#[allow(clippy::too_many_arguments)]
fn ef_nu_branch(
    ctx: &GenCtx,
    fx: &Arc<crate::logic::FixPred>,
    c: &crate::logic::Clause,
    ci: usize,
    dj: &Formula,
    b: &Formula,
    env2: &EfEnv,
    posm: &PredSubst,
    bothm: &PredSubst,
    selfp: &Predicate,
    strengthened: &Predicate,
    hyp: &Formula,
    qs: &[crate::syntax::Var],
    dfq: &Derivation,
    depth: u32,
) -> Res {
    let qts = term_vec(qs);
    let tys = fx.pvar.arity.clone();
    let goal = b.clone();
    let n = c.binders.len();
    let inner = ex_elim_chain(ctx, n, dj, &goal, assume(dj.clone()), |us, bodyf| {
        // bodyf = vec_eq(qs, head[us]) and premises[us][Y := J].
        let ren: TermSubst = c
            .binders
            .iter()
            .zip(us)
            .map(|(o, u)| (o.name.clone(), u.term()))
            .collect();
        let head_u: Vec<Term> = c.head.iter().map(|t| t.subst(&ren)).collect();
        let prem_u: Vec<Formula> =
            c.premises.iter().map(|p| p.subst_terms(&ren)).collect();
        let mut subp = posm.clone();
        subp.insert(fx.pvar.key(), selfp.clone());
        let prem_inst: Vec<Formula> = prem_u
            .iter()
            .map(|p| p.subst_pvars(&subp))
            .collect::<Result<_, _>>()?;
        let eqf = vec_eq(&tys, &qts, &head_u);
        let mut top_parts = vec![eqf.clone()];
        top_parts.extend(prem_inst.iter().cloned());
        // bodyf is alpha-equal to and_all(top_parts); project with our copy.
        let _ = bodyf;
        let dtop = assume(crate::logic::and_all(top_parts.clone()));
        let deq = and_proj(&top_parts, 0, dtop.clone());
        let eq_list = split_n(&eqf, tys.len());
        let heq: Vec<Derivation> = (0..tys.len())
            .map(|k| and_proj(&eq_list, k, deq.clone()))
            .collect();
        // Project this clause's negated conjunct out of the step hypothesis.
        let (nys, raw) = neg_conjuncts(fx)?;
        let mut subn = bothm.clone();
        subn.insert(fx.pvar.primed(1).key(), strengthened.clone());
        let mut conj_fs = Vec::new();
        for (cf, _) in &raw {
            let cf = seq_inst(cf.clone(), &nys, &qts);
            conj_fs.push(cf.subst_pvars(&subn)?);
        }
        // hyp is alpha-equal to and_all(conj_fs).
        let _ = hyp;
        let mut dcur = and_proj(&conj_fs, ci, assume(crate::logic::and_all(conj_fs.clone())));
        let mut fcur = conj_fs[ci].clone();
        let info = raw[ci].1.clone();
        for &kb in &info.kept_binders {
            let Formula::All(v, bodyq) = fcur else {
                return Err(unsup("unexpected negated-conjunct shape"));
            };
            let val = us[kb].term();
            fcur = bodyq.subst_term1(&v.name, &val);
            dcur = spec(dcur, val);
        }
        // Solved-binder substitution: binder i with solved position j maps
        // to the subject variable q_j.
        let solved: Vec<(usize, usize)> = info
            .solved
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|j| (i, j)))
            .collect();
        let mut sol2: TermSubst = TermSubst::new();
        for &(i, j) in &solved {
            sol2.insert(us[i].name.clone(), qts[j].clone());
        }
        // Derivations q_j == us[i] (the solved coordinates of the equation
        // vector), used to rewrite between the two presentations.
        let sol_eq: HashMap<usize, Derivation> = solved
            .iter()
            .map(|&(i, j)| (i, heq[j].clone()))
            .collect();
        if !info.kept_eqs.is_empty() {
            let Formula::Imp(eqc, rest) = fcur else {
                return Err(unsup("unexpected negated-conjunct guard shape"));
            };
            let eqs: Vec<Formula> = conjuncts(&eqc).into_iter().cloned().collect();
            let mut prfs = Vec::new();
            for (pos, &k) in info.kept_eqs.iter().enumerate() {
                // Target: q_k == head_k[kept := us, solved := q].
                // Start from q_k == head_k[us] and rewrite each solved
                // binder occurrence to its subject variable.
                let mut d = heq[k].clone();
                let mut cur = eq_atom(&tys[k], qts[k].clone(), head_u[k].clone());
                for &(i, j) in &solved {
                    if !head_u[k].free_vars().contains(&us[i].name) {
                        continue;
                    }
                    let deq = symm_at(
                        ctx,
                        &us[i].ty,
                        &qts[j],
                        &us[i].term(),
                        sol_eq[&i].clone(),
                    );
                    d = rewrite_var(ctx, &us[i], &qts[j], &cur, deq, d);
                    cur = cur.subst_term1(&us[i].name, &qts[j]);
                }
                let _ = &eqs[pos];
                prfs.push(d);
            }
            dcur = mp(dcur, and_tuple(&eqs, prfs));
            fcur = rest.as_ref().clone();
        }
        let _ = fcur;
        if c.premises.is_empty() {
            // The conjunct body is falsity.
            return Ok(mp(dfq.clone(), dcur));
        }
        // Branch over the negated premises and close each with the
        // induction hypothesis of the transfer recursion.
        let mut subn2 = bothm.clone();
        subn2.insert(fx.pvar.primed(1).key(), strengthened.clone());
        let mut djs_n = Vec::new();
        let mut branches = Vec::new();
        for (j, pj_u) in prem_u.iter().enumerate() {
            let pj_sol = pj_u.subst_terms(&sol2);
            let njf = neg_formula(&pj_sol).subst_pvars(&subn2)?;
            // Transport the positive premise to the solved presentation.
            let mut dpos = and_proj(&top_parts, j + 1, dtop.clone());
            let mut curp = prem_inst[j].clone();
            for &(i, jj) in &solved {
                if !curp.free_term_vars().contains(&us[i].name) {
                    continue;
                }
                let deq = symm_at(
                    ctx,
                    &us[i].ty,
                    &qts[jj],
                    &us[i].term(),
                    sol_eq[&i].clone(),
                );
                dpos = rewrite_var(ctx, &us[i], &qts[jj], &curp, deq, dpos);
                curp = curp.subst_term1(&us[i].name, &qts[jj]);
            }
            let ih = ef_rec(ctx, &pj_sol, b, env2, dfq, depth - 1)?;
            branches.push(lam(njf.clone(), mp(mp(ih, assume(njf.clone())), dpos)));
            djs_n.push(njf);
        }
        Ok(or_cases(&djs_n, b.clone(), dcur, branches))
    })?;
    Ok(lam(dj.clone(), inner))
}
