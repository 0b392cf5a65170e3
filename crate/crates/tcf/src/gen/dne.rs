//! Double-negation elimination: for suitable formulas `A`, a derivation of
//! `N N A -> A` whose open assumptions are drawn from the per-variable
//! hypotheses `all xs (X'' xs -> X xs)`, `all xs (X xs -> X' xs -> F)` and
//! `all xs (F -> X xs)`.

use super::{
    ex_elim_chain, free_pvar_list, fresh_vars, neg_conjuncts, or_inject,
    seq_inst, split_n, symm_at, term_vec, unsup, Res, DEPTH,
};
use crate::axioms::{dne_hyp, ef_hyp, efq_hyp, inter, union, AxiomKind};
use crate::dsl::{
    and_proj, and_tuple, assume, gens, identity, lam, lams, mp, mps, or_cases, refl, spec_all,
    subst_fix, unfold_flat_mu, GenCtx, GenError,
};
use crate::logic::{
    and, eq_atom, falsity, imp, vec_eq, FixDef, Flavor, Formula, PKey, PredSubst, Predicate,
    TermSubst,
};
use crate::negation::{neg_fix, neg_formula};
use crate::proof::Derivation;
use crate::sig::Signature;
use crate::syntax::Term;
use std::collections::HashMap;
use std::sync::Arc;

/// An environment entry: a positive predicate, its double-negation
/// counterpart, and a proof of `all xs (dd xs -> pos xs)`.
#[derive(Clone)]
pub struct DneEntry {
    pub pos: Predicate,
    pub dd: Predicate,
    pub proof: Derivation,
}

pub type DneEnv = HashMap<PKey, DneEntry>;

fn pos_map(env: &DneEnv) -> PredSubst {
    env.iter().map(|(k, e)| (k.clone(), e.pos.clone())).collect()
}

fn nn_map(env: &DneEnv) -> PredSubst {
    let mut m = PredSubst::new();
    for (k, e) in env {
        m.insert(k.clone(), e.pos.clone());
        m.insert((k.0.clone(), k.1 + 2), e.dd.clone());
    }
    m
}

/// `N N A -> A`, with open assumptions among `all xs (X'' xs -> X xs)`,
/// `all xs (X xs -> X' xs -> F)` and `all xs (F -> X xs)` for the predicate
/// variables `X` of `A`. May extend `sig` with auxiliary constants (the
/// implication case routes through ex falso quodlibet).
pub fn gen_dne(ctx: &GenCtx, sig: &mut Signature, a: &Formula) -> Res {
    let mut env = DneEnv::new();
    for x in free_pvar_list(a) {
        env.insert(
            x.key(),
            DneEntry {
                pos: Predicate::Var(x.clone()),
                dd: Predicate::Var(x.primed(2)),
                proof: assume(dne_hyp(&x)),
            },
        );
    }
    dne_rec(ctx, sig, a, &env, DEPTH)
}

/// Recursion on `f`: a derivation of `NN(f)[pos, primed² := dd] -> f[pos]`.
pub(crate) fn dne_rec(
    ctx: &GenCtx,
    sig: &mut Signature,
    f: &Formula,
    env: &DneEnv,
    depth: u32,
) -> Res {
    if depth == 0 {
        return Err(unsup("double-negation recursion depth exceeded"));
    }
    let posm = pos_map(env);
    let nnm = nn_map(env);
    let pf = f.subst_pvars(&posm)?;
    let nnf = neg_formula(&neg_formula(f)).subst_pvars(&nnm)?;
    match f {
        Formula::Atom { pred, args } => match pred {
            Predicate::Var(x) => {
                let e = env
                    .get(&x.key())
                    .ok_or_else(|| unsup(format!("unregistered predicate variable {}", x.name)))?;
                Ok(spec_all(e.proof.clone(), args.iter().cloned()))
            }
            Predicate::Compr { .. } => {
                dne_rec(ctx, sig, &pred.apply(args.clone()), env, depth - 1)
            }
            Predicate::Fix(fx) => dne_fix(ctx, sig, fx, args, env, depth),
        },
        Formula::Imp(a0, a1) => {
            // NN(A0 -> A1) = N A0 or NN A1.
            let na0 = neg_formula(a0).subst_pvars(&nnm)?;
            let nna1 = neg_formula(&neg_formula(a1)).subst_pvars(&nnm)?;
            let pa0 = a0.subst_pvars(&posm)?;
            let pa1 = a1.subst_pvars(&posm)?;
            // Left branch: N A0 and A0 clash to falsity, then ex falso
            // gives A1. Both steps need the positive predicates to be plain
            // variables.
            let mut efenv = super::ef::EfEnv::new();
            for x in free_pvar_list(a0) {
                let e = env
                    .get(&x.key())
                    .ok_or_else(|| unsup(format!("unregistered predicate variable {}", x.name)))?;
                let Predicate::Var(xp) = &e.pos else {
                    return Err(unsup(
                        "double negation at an implication under a fixpoint-bound variable",
                    ));
                };
                efenv.insert(
                    x.key(),
                    super::ef::EfEntry {
                        pos: e.pos.clone(),
                        neg: Predicate::Var(xp.primed(1)),
                        proof: assume(ef_hyp(xp, &falsity())),
                    },
                );
            }
            let def = super::ef::ef_rec(
                ctx,
                a0,
                &falsity(),
                &efenv,
                &identity(falsity()),
                depth - 1,
            )?;
            let mut efqenv = super::efq::EfqEnv::new();
            for x in free_pvar_list(a1) {
                let e = env
                    .get(&x.key())
                    .ok_or_else(|| unsup(format!("unregistered predicate variable {}", x.name)))?;
                let Predicate::Var(xp) = &e.pos else {
                    return Err(unsup(
                        "double negation at an implication under a fixpoint-bound variable",
                    ));
                };
                efqenv.insert(
                    x.key(),
                    super::efq::EfqEntry {
                        pred: e.pos.clone(),
                        proof: assume(efq_hyp(xp)),
                    },
                );
            }
            let dfq = super::efq::efq_rec(
                ctx,
                sig,
                a1,
                &efqenv,
                &mut std::collections::HashSet::new(),
                depth - 1,
            )?;
            let ih = dne_rec(ctx, sig, a1, env, depth - 1)?;
            let left = lam(
                na0.clone(),
                lam(
                    pa0.clone(),
                    mp(
                        dfq,
                        mps(def, vec![assume(na0.clone()), assume(pa0.clone())]),
                    ),
                ),
            );
            let right = lam(nna1.clone(), lam(pa0.clone(), mp(ih, assume(nna1.clone()))));
            Ok(lam(
                nnf.clone(),
                or_cases(
                    &[na0, nna1],
                    imp(pa0, pa1),
                    assume(nnf.clone()),
                    vec![left, right],
                ),
            ))
        }
        Formula::And(a0, a1) => {
            let ih0 = dne_rec(ctx, sig, a0, env, depth - 1)?;
            let ih1 = dne_rec(ctx, sig, a1, env, depth - 1)?;
            let nn0 = neg_formula(&neg_formula(a0)).subst_pvars(&nnm)?;
            let nn1 = neg_formula(&neg_formula(a1)).subst_pvars(&nnm)?;
            let pa0 = a0.subst_pvars(&posm)?;
            let pa1 = a1.subst_pvars(&posm)?;
            Ok(lam(
                nnf.clone(),
                crate::dsl::pair(
                    pa0,
                    pa1,
                    mp(ih0, crate::dsl::fst(nn0.clone(), nn1.clone(), assume(nnf.clone()))),
                    mp(ih1, crate::dsl::snd(nn0, nn1, assume(nnf.clone()))),
                ),
            ))
        }
        Formula::Or(a0, a1) => {
            let ih0 = dne_rec(ctx, sig, a0, env, depth - 1)?;
            let ih1 = dne_rec(ctx, sig, a1, env, depth - 1)?;
            let nn0 = neg_formula(&neg_formula(a0)).subst_pvars(&nnm)?;
            let nn1 = neg_formula(&neg_formula(a1)).subst_pvars(&nnm)?;
            let pa0 = a0.subst_pvars(&posm)?;
            let pa1 = a1.subst_pvars(&posm)?;
            Ok(lam(
                nnf.clone(),
                or_cases(
                    &[nn0.clone(), nn1.clone()],
                    pf.clone(),
                    assume(nnf.clone()),
                    vec![
                        lam(
                            nn0.clone(),
                            crate::dsl::inl(pa0.clone(), pa1.clone(), mp(ih0, assume(nn0))),
                        ),
                        lam(
                            nn1.clone(),
                            crate::dsl::inr(pa0, pa1, mp(ih1, assume(nn1))),
                        ),
                    ],
                ),
            ))
        }
        Formula::All(v, a) => {
            let u = ctx.fresh("u", v.ty.clone());
            let a_u = a.subst_term1(&v.name, &u.term());
            let ih = dne_rec(ctx, sig, &a_u, env, depth - 1)?;
            Ok(lam(
                nnf.clone(),
                crate::dsl::gen(
                    u.clone(),
                    mp(ih, crate::dsl::spec(assume(nnf.clone()), u.term())),
                ),
            ))
        }
        Formula::Ex(v, a) => {
            let u = ctx.fresh("u", v.ty.clone());
            let a_u = a.subst_term1(&v.name, &u.term());
            let ih = dne_rec(ctx, sig, &a_u, env, depth - 1)?;
            let nn_u = neg_formula(&neg_formula(&a_u)).subst_pvars(&nnm)?;
            let pa = a.subst_pvars(&posm)?;
            Ok(lam(
                nnf.clone(),
                crate::dsl::ex_elim(
                    u.clone(),
                    nn_u.clone(),
                    pf.clone(),
                    assume(nnf.clone()),
                    crate::dsl::gen(
                        u.clone(),
                        lam(
                            nn_u.clone(),
                            crate::dsl::ex_intro(v.clone(), pa, u.term(), mp(ih, assume(nn_u))),
                        ),
                    ),
                ),
            ))
        }
    }
}

fn dne_fix(
    ctx: &GenCtx,
    sig: &mut Signature,
    fx: &Arc<crate::logic::FixPred>,
    args: &[Term],
    env: &DneEnv,
    depth: u32,
) -> Res {
    let posm = pos_map(env);
    let nnm = nn_map(env);
    let fx_s = subst_fix(fx, &posm)?;
    let nnfx = neg_fix(&neg_fix(fx));
    let nnfx_s = subst_fix(&nnfx, &nnm)?;
    let selfp = Predicate::Fix(fx_s.clone());
    let nnselfp = Predicate::Fix(nnfx_s.clone());
    if super::stab::is_leibniz_fix(fx) {
        // NN(t == s) unfolds to `s == t and N F`; project and flip.
        let [t, s] = args else { return Err(unsup("equality atom arity")) };
        let ty = fx.pvar.arity[0].clone();
        let h = nnselfp.apply(vec![t.clone(), s.clone()]);
        let unfolded = mp(
            spec_all(unfold_flat_mu(ctx, &nnfx_s)?, [t.clone(), s.clone()]),
            assume(h.clone()),
        );
        let st = eq_atom(&ty, s.clone(), t.clone());
        let nf = neg_formula(&falsity());
        let dst = crate::dsl::fst(st.clone(), nf, unfolded);
        return Ok(lam(h, symm_at(ctx, &ty, s, t, dst)));
    }
    match fx.flavor {
        Flavor::Mu => {
            let FixDef::Clauses(cs) = &fx.def else {
                return Err(unsup(
                    "double negation through operator-form inductive predicates is not supported",
                ));
            };
            // Induct on NN I with I itself as motive.
            let strengthened = inter(&nnselfp, &selfp);
            let mut env2 = env.clone();
            env2.insert(
                fx.pvar.key(),
                DneEntry {
                    pos: selfp.clone(),
                    dd: strengthened.clone(),
                    proof: {
                        let xs = fresh_vars(ctx, &fx.pvar.arity, "w");
                        let xts = term_vec(&xs);
                        let da = nnselfp.apply(xts.clone());
                        let pa = selfp.apply(xts.clone());
                        let hyp = and(da.clone(), pa.clone());
                        gens(&xs, lam(hyp.clone(), crate::dsl::snd(da, pa, assume(hyp))))
                    },
                },
            );
            let mut nnm2 = nnm.clone();
            nnm2.insert(fx.pvar.primed(2).key(), strengthened.clone());
            let qs = fresh_vars(ctx, &fx.pvar.arity, "q");
            let qts = term_vec(&qs);
            let payloads = super::stab::payload_formulas(ctx, fx, &qts, &nnm2)?;
            let goal = selfp.apply(qts.clone());
            let mut branches = Vec::new();
            for (ci, c) in cs.iter().enumerate() {
                branches.push(dne_mu_branch(
                    ctx, sig, fx, &fx_s, c, ci, &payloads[ci], &goal, &env2, &posm, &qs, depth,
                )?);
            }
            // The step hypotheses: operator-form double negations give a
            // single disjunction, flat ones a conjunct list that rebuilds it.
            let (hyps, dbody): (Vec<Formula>, Derivation) = match &nnfx_s.def {
                FixDef::Op { .. } => {
                    let h = crate::logic::or_all(payloads.clone());
                    (vec![h.clone()], assume(h))
                }
                FixDef::Clauses(ncs) => {
                    if ncs.len() != 1 {
                        return Err(unsup("unexpected flat double-negation shape"));
                    }
                    let hyps: Vec<Formula> = ncs[0]
                        .premises
                        .iter()
                        .map(|p| {
                            let p = seq_inst(p.clone(), &ncs[0].binders, &qts);
                            Ok(p.subst_pvars(&crate::dsl::single_subst(
                                &nnfx_s.pvar,
                                &strengthened,
                            ))?)
                        })
                        .collect::<Result<_, GenError>>()?;
                    let whole = crate::logic::or_all(payloads.clone());
                    let d = if hyps.len() == 1 {
                        assume(hyps[0].clone())
                    } else {
                        and_tuple(&hyps, hyps.iter().map(|h| assume(h.clone())).collect())
                    };
                    // For a flat double negation the premise list is the
                    // conjunct split of the payload disjunction (a single
                    // disjunction splits to itself).
                    let _ = whole;
                    (hyps, d)
                }
            };
            let inner = or_cases(&payloads, goal.clone(), dbody, branches);
            let step = gens(&qs, lams(hyps, inner));
            let ind = Derivation::Axiom(AxiomKind::FixMu {
                fix: nnfx_s.clone(),
                motive: selfp.clone(),
            });
            let applied = spec_all(mp(ind, step), args.iter().cloned());
            let h = nnselfp.apply(args.to_vec());
            Ok(lam(h.clone(), mp(applied, assume(h))))
        }
        Flavor::Nu => {
            let FixDef::Clauses(cs) = &fx.def else {
                return Err(unsup(
                    "double negation through operator-form coinductive predicates is not supported",
                ));
            };
            // Coinduct on J with NN J as motive.
            let weakened = union(&selfp, &nnselfp);
            let mut env2 = env.clone();
            env2.insert(
                fx.pvar.key(),
                DneEntry {
                    pos: weakened.clone(),
                    dd: nnselfp.clone(),
                    proof: {
                        let xs = fresh_vars(ctx, &fx.pvar.arity, "w");
                        let xts = term_vec(&xs);
                        let da = nnselfp.apply(xts.clone());
                        let left = selfp.apply(xts.clone());
                        let right = nnselfp.apply(xts);
                        gens(
                            &xs,
                            lam(da.clone(), crate::dsl::inr(left, right, assume(da))),
                        )
                    },
                },
            );
            let mut nnm2 = nnm.clone();
            nnm2.insert(fx.pvar.primed(2).key(), nnselfp.clone());
            let qs = fresh_vars(ctx, &fx.pvar.arity, "q");
            let qts = term_vec(&qs);
            let hj = nnselfp.apply(qts.clone());
            // Unfold NN J (operator-form greatest fixpoint) at the step
            // variables into the payload disjunction.
            let dun = mp(
                spec_all(
                    Derivation::Axiom(AxiomKind::FixClosure { fix: nnfx_s.clone() }),
                    qts.clone(),
                ),
                assume(hj.clone()),
            );
            let payloads = super::stab::payload_formulas(ctx, fx, &qts, &nnm2)?;
            // The required step conclusion: the uniform operator body of J
            // weakened at the bound variable.
            let (uys, ubody) = crate::logic::operator_body(&fx_s);
            let ubody = ubody.subst_pvars(&crate::dsl::single_subst(&fx_s.pvar, &weakened))?;
            let ubody = seq_inst(ubody, &uys, &qts);
            let djs: Vec<Formula> =
                crate::logic::disjuncts(&ubody).into_iter().cloned().collect();
            if djs.len() != cs.len() {
                return Err(unsup("unexpected uniform-body shape"));
            }
            let goal = crate::logic::or_all(djs.clone());
            let mut branches = Vec::new();
            for (ci, c) in cs.iter().enumerate() {
                branches.push(dne_nu_branch(
                    ctx, sig, fx, c, ci, &payloads[ci], &djs, &goal, &env2, &posm, &weakened,
                    &qts, depth,
                )?);
            }
            let inner = or_cases(&payloads, goal, dun, branches);
            let step = gens(&qs, lam(hj, inner));
            let coind = Derivation::Axiom(AxiomKind::FixNu {
                fix: fx_s.clone(),
                motive: nnselfp.clone(),
            });
            let applied = spec_all(mp(coind, step), args.iter().cloned());
            let h = nnselfp.apply(args.to_vec());
            Ok(lam(h.clone(), mp(applied, assume(h))))
        }
    }
}

/// One branch of the induction step for a least fixpoint: from this
/// clause's doubly negated payload at the step variables, rebuild the
/// fixpoint by introduction and coordinate transport.
#[allow(clippy::too_many_arguments)]
fn dne_mu_branch(
    ctx: &GenCtx,
    sig: &mut Signature,
    fx: &Arc<crate::logic::FixPred>,
    fx_s: &Arc<crate::logic::FixPred>,
    c: &crate::logic::Clause,
    ci: usize,
    pl: &Formula,
    goal: &Formula,
    env2: &DneEnv,
    posm: &PredSubst,
    qs: &[crate::syntax::Var],
    depth: u32,
) -> Res {
    let qts = term_vec(qs);
    let (_, raw) = neg_conjuncts(fx)?;
    let info = raw[ci].1.clone();
    let n_kept = info.kept_binders.len();
    let inner = ex_elim_chain(ctx, n_kept, pl, goal, assume(pl.clone()), |us, bodyf| {
        // bodyf = guard equations and doubly negated premises, with the
        // kept binders replaced by the eigenvariables `us` and the solved
        // binders by the step variables `qs`.
        let n_eqs = info.kept_eqs.len();
        let n_prem = c.premises.len();
        let (eq_part, rest) = if n_eqs > 0 {
            let Formula::And(g, r) = bodyf else {
                return Err(unsup("payload: expected a guard conjunction"));
            };
            (Some(g.as_ref().clone()), r.as_ref().clone())
        } else {
            (None, bodyf.clone())
        };
        let dbody = assume(bodyf.clone());
        let (eq_ds, drest): (Vec<Derivation>, Derivation) = match &eq_part {
            Some(g) => {
                let parts = [g.clone(), rest.clone()];
                let dg = and_proj(&parts, 0, dbody.clone());
                let dr = and_proj(&parts, 1, dbody.clone());
                let eqs = split_n(g, n_eqs);
                (
                    (0..n_eqs).map(|k| and_proj(&eqs, k, dg.clone())).collect(),
                    dr,
                )
            }
            None => (Vec::new(), dbody.clone()),
        };
        // Binder witnesses: solved binders take their step variable, kept
        // binders the eigenvariables.
        let mut kept_iter = us.iter();
        let wit: TermSubst = c
            .binders
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let t = match info.solved[i] {
                    Some(j) => qts[j].clone(),
                    None => kept_iter.next().expect("kept binder count").term(),
                };
                (v.name.clone(), t)
            })
            .collect();
        let wit_terms: Vec<Term> = c.binders.iter().map(|v| wit[&v.name].clone()).collect();
        // Premise proofs: the recursion applied to the doubly negated
        // premises projected from the payload body.
        let mut prem_ds = Vec::new();
        if n_prem > 0 {
            let parts = split_n(&rest, n_prem);
            for (j, pj) in c.premises.iter().enumerate() {
                let pj_w = pj.subst_terms(&wit);
                let ih = dne_rec(ctx, sig, &pj_w, env2, depth - 1)?;
                prem_ds.push(mp(ih, and_proj(&parts, j, drest.clone())));
            }
        }
        let intro =
            Derivation::Axiom(AxiomKind::FixIntroClause { fix: fx_s.clone(), clause: ci });
        let mut d = mps(spec_all(intro, wit_terms.clone()), prem_ds);
        // d proves the fixpoint at head[wit]; set each kept coordinate to
        // its step variable along the (flipped) guard equation.
        let selfp = Predicate::Fix(fx_s.clone());
        let mut cur: Vec<Term> = c.head.iter().map(|t| t.subst(&wit)).collect();
        for (pos, &k) in info.kept_eqs.iter().enumerate() {
            let ty = &fx.pvar.arity[k];
            // Guard: q_k == head_k[wit]; flip it to rewrite toward q_k.
            let deq = symm_at(ctx, ty, &qts[k], &cur[k], eq_ds[pos].clone());
            let v = ctx.fresh("r", ty.clone());
            let mut margs = cur.clone();
            margs[k] = v.term();
            let body = selfp.apply(margs);
            d = crate::dsl::transport(ctx, ty, &v, &body, &cur[k], &qts[k], deq, d);
            cur[k] = qts[k].clone();
        }
        let _ = posm;
        Ok(d)
    })?;
    Ok(lam(pl.clone(), inner))
}

/// One branch of the coinduction step for a greatest fixpoint: from this
/// clause's doubly negated payload, build the clause's uniform disjunct
/// over the weakened bound variable.
#[allow(clippy::too_many_arguments)]
fn dne_nu_branch(
    ctx: &GenCtx,
    sig: &mut Signature,
    fx: &Arc<crate::logic::FixPred>,
    c: &crate::logic::Clause,
    ci: usize,
    pl: &Formula,
    djs: &[Formula],
    goal: &Formula,
    env2: &DneEnv,
    posm: &PredSubst,
    weakened: &Predicate,
    qts: &[Term],
    depth: u32,
) -> Res {
    let tys = fx.pvar.arity.clone();
    let (_, raw) = neg_conjuncts(fx)?;
    let info = raw[ci].1.clone();
    let n_kept = info.kept_binders.len();
    let inner = ex_elim_chain(ctx, n_kept, pl, goal, assume(pl.clone()), |us, bodyf| {
        let n_eqs = info.kept_eqs.len();
        let n_prem = c.premises.len();
        let (eq_part, rest) = if n_eqs > 0 {
            let Formula::And(g, r) = bodyf else {
                return Err(unsup("payload: expected a guard conjunction"));
            };
            (Some(g.as_ref().clone()), r.as_ref().clone())
        } else {
            (None, bodyf.clone())
        };
        let dbody = assume(bodyf.clone());
        let (eq_ds, drest): (Vec<Derivation>, Derivation) = match &eq_part {
            Some(g) => {
                let parts = [g.clone(), rest.clone()];
                let dg = and_proj(&parts, 0, dbody.clone());
                let dr = and_proj(&parts, 1, dbody.clone());
                let eqs = split_n(g, n_eqs);
                (
                    (0..n_eqs).map(|k| and_proj(&eqs, k, dg.clone())).collect(),
                    dr,
                )
            }
            None => (Vec::new(), dbody.clone()),
        };
        // Witnesses for the uniform disjunct: solved binders take their
        // step variable, kept binders the eigenvariables. The equation
        // vector then holds by reflexivity at solved coordinates and by the
        // guard hypotheses verbatim at kept coordinates.
        let mut kept_iter = us.iter();
        let wit: TermSubst = c
            .binders
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let t = match info.solved[i] {
                    Some(j) => qts[j].clone(),
                    None => kept_iter.next().expect("kept binder count").term(),
                };
                (v.name.clone(), t)
            })
            .collect();
        let wit_terms: Vec<Term> = c.binders.iter().map(|v| wit[&v.name].clone()).collect();
        let head_w: Vec<Term> = c.head.iter().map(|t| t.subst(&wit)).collect();
        let eqf = vec_eq(&tys, qts, &head_w);
        let eq_fs = split_n(&eqf, tys.len());
        let mut kept_pos = 0usize;
        let mut eq_proofs = Vec::new();
        for k in 0..tys.len() {
            if info.kept_eqs.contains(&k) {
                eq_proofs.push(eq_ds[kept_pos].clone());
                kept_pos += 1;
            } else {
                eq_proofs.push(refl(&tys[k], qts[k].clone()));
            }
        }
        let deq = and_tuple(&eq_fs, eq_proofs);
        // Premises over the weakened bound variable, from the recursion.
        let mut subp = posm.clone();
        subp.insert(fx.pvar.key(), weakened.clone());
        let mut parts_f = vec![eqf.clone()];
        let mut prem_proofs = vec![deq];
        if n_prem > 0 {
            let nn_parts = split_n(&rest, n_prem);
            for (j, pj) in c.premises.iter().enumerate() {
                let pj_w = pj.subst_terms(&wit);
                let ih = dne_rec(ctx, sig, &pj_w, env2, depth - 1)?;
                parts_f.push(pj_w.subst_pvars(&subp)?);
                prem_proofs.push(mp(ih, and_proj(&nn_parts, j, drest.clone())));
            }
        }
        let dinner = if parts_f.len() == 1 {
            prem_proofs.pop().expect("equation proof")
        } else {
            and_tuple(&parts_f, prem_proofs)
        };
        let dj_proof = super::ex_intro_chain(&djs[ci], &wit_terms, dinner);
        Ok(or_inject(djs, ci, dj_proof))
    })?;
    Ok(lam(pl.clone(), inner))
}
