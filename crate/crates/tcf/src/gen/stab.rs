//! Stability: for every implication-free formula `A`, a derivation of
//! `A -> N N A` whose open assumptions are the hypotheses
//! `all xs (X xs -> X'' xs)` for the predicate variables of `A`.

use super::{
    ex_elim_chain, ex_intro_chain, falsity_strong_neg, free_pvar_list, fresh_vars, neg_conjuncts,
    or_inject, rename_clause, rewrite_var, seq_inst, split_n, symm_at, term_vec, unsup, Res,
    DEPTH,
};
use crate::axioms::{inter, stab_hyp, union, AxiomKind};
use crate::dsl::{
    and_proj, and_tuple, assume, gens, lam, lams, mp, or_cases, refl, spec_all, subst_fix,
    GenCtx, GenError,
};
use crate::logic::{
    and, vec_eq, FixDef, Flavor, Formula, PKey,
    PredSubst, Predicate, TermSubst,
};
use crate::negation::{neg_fix, neg_formula};
use crate::proof::Derivation;
use crate::syntax::Term;
use std::collections::HashMap;
use std::sync::Arc;

/// An environment entry: a positive predicate, its double-negation
/// counterpart, and a proof of `all xs (pos xs -> dneg xs)`.
#[derive(Clone)]
pub struct StabEntry {
    pub pos: Predicate,
    pub dneg: Predicate,
    pub proof: Derivation,
}

pub type StabEnv = HashMap<PKey, StabEntry>;

fn pos_map(env: &StabEnv) -> PredSubst {
    env.iter().map(|(k, e)| (k.clone(), e.pos.clone())).collect()
}

fn nn_map(env: &StabEnv) -> PredSubst {
    let mut m = PredSubst::new();
    for (k, e) in env {
        m.insert(k.clone(), e.pos.clone());
        m.insert((k.0.clone(), k.1 + 2), e.dneg.clone());
    }
    m
}

/// `A -> N N A` for implication-free `A`, with open assumptions among the
/// per-variable stability hypotheses `all xs (X xs -> X'' xs)`.
pub fn gen_stab(ctx: &GenCtx, a: &Formula) -> Res {
    let mut env = StabEnv::new();
    for x in free_pvar_list(a) {
        env.insert(
            x.key(),
            StabEntry {
                pos: Predicate::Var(x.clone()),
                dneg: Predicate::Var(x.primed(2)),
                proof: assume(stab_hyp(&x)),
            },
        );
    }
    stab_rec(ctx, a, &env, DEPTH)
}

/// Recursion on `f`: a derivation of `f[pos] -> NN(f)[pos, primed² := dneg]`.
pub(crate) fn stab_rec(ctx: &GenCtx, f: &Formula, env: &StabEnv, depth: u32) -> Res {
    if depth == 0 {
        return Err(unsup("stability recursion depth exceeded"));
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
            Predicate::Compr { .. } => stab_rec(ctx, &pred.apply(args.clone()), env, depth - 1),
            Predicate::Fix(fx) => stab_fix(ctx, fx, args, env, depth),
        },
        Formula::Imp(..) => Err(unsup(
            "stability is only generated for implication-free formulas",
        )),
        Formula::And(a0, a1) => {
            let ih0 = stab_rec(ctx, a0, env, depth - 1)?;
            let ih1 = stab_rec(ctx, a1, env, depth - 1)?;
            let pa0 = a0.subst_pvars(&posm)?;
            let pa1 = a1.subst_pvars(&posm)?;
            let nn0 = neg_formula(&neg_formula(a0)).subst_pvars(&nnm)?;
            let nn1 = neg_formula(&neg_formula(a1)).subst_pvars(&nnm)?;
            Ok(lam(
                pf.clone(),
                crate::dsl::pair(
                    nn0,
                    nn1,
                    mp(ih0, crate::dsl::fst(pa0.clone(), pa1.clone(), assume(pf.clone()))),
                    mp(ih1, crate::dsl::snd(pa0, pa1, assume(pf.clone()))),
                ),
            ))
        }
        Formula::Or(a0, a1) => {
            let ih0 = stab_rec(ctx, a0, env, depth - 1)?;
            let ih1 = stab_rec(ctx, a1, env, depth - 1)?;
            let pa0 = a0.subst_pvars(&posm)?;
            let pa1 = a1.subst_pvars(&posm)?;
            let nn0 = neg_formula(&neg_formula(a0)).subst_pvars(&nnm)?;
            let nn1 = neg_formula(&neg_formula(a1)).subst_pvars(&nnm)?;
            Ok(lam(
                pf.clone(),
                or_cases(
                    &[pa0.clone(), pa1.clone()],
                    nnf.clone(),
                    assume(pf.clone()),
                    vec![
                        lam(
                            pa0.clone(),
                            crate::dsl::inl(nn0.clone(), nn1.clone(), mp(ih0, assume(pa0))),
                        ),
                        lam(
                            pa1.clone(),
                            crate::dsl::inr(nn0, nn1, mp(ih1, assume(pa1))),
                        ),
                    ],
                ),
            ))
        }
        Formula::All(v, a) => {
            let u = ctx.fresh("u", v.ty.clone());
            let a_u = a.subst_term1(&v.name, &u.term());
            let ih = stab_rec(ctx, &a_u, env, depth - 1)?;
            Ok(lam(
                pf.clone(),
                crate::dsl::gen(u.clone(), mp(ih, crate::dsl::spec(assume(pf.clone()), u.term()))),
            ))
        }
        Formula::Ex(v, a) => {
            let u = ctx.fresh("u", v.ty.clone());
            let a_u = a.subst_term1(&v.name, &u.term());
            let ih = stab_rec(ctx, &a_u, env, depth - 1)?;
            let pa_u = a_u.subst_pvars(&posm)?;
            // NN(ex v A) = ex v NN A.
            let nn_body = match &nnf {
                Formula::Ex(w, b) => (w.clone(), b.as_ref().clone()),
                _ => return Err(unsup("unexpected double-negation shape at an existential")),
            };
            Ok(lam(
                pf.clone(),
                crate::dsl::ex_elim(
                    u.clone(),
                    pa_u.clone(),
                    nnf.clone(),
                    assume(pf.clone()),
                    crate::dsl::gen(
                        u.clone(),
                        lam(
                            pa_u.clone(),
                            crate::dsl::ex_intro(
                                nn_body.0.clone(),
                                nn_body.1.clone(),
                                u.term(),
                                mp(ih, assume(pa_u)),
                            ),
                        ),
                    ),
                ),
            ))
        }
    }
}

/// Is this fixpoint a Leibniz equality (single premise-free clause with a
/// diagonal bare-variable head)?
pub(crate) fn is_leibniz_fix(fx: &crate::logic::FixPred) -> bool {
    if fx.flavor != Flavor::Mu {
        return false;
    }
    let FixDef::Clauses(cs) = &fx.def else { return false };
    cs.len() == 1
        && cs[0].binders.len() == 1
        && cs[0].premises.is_empty()
        && cs[0].head.len() == 2
        && cs[0].head.iter().all(|t| *t == cs[0].binders[0].term())
}

fn stab_fix(
    ctx: &GenCtx,
    fx: &Arc<crate::logic::FixPred>,
    args: &[Term],
    env: &StabEnv,
    depth: u32,
) -> Res {
    let posm = pos_map(env);
    let nnm = nn_map(env);
    let fx_s = subst_fix(fx, &posm)?;
    let nnfx = neg_fix(&neg_fix(fx));
    let nnfx_s = subst_fix(&nnfx, &nnm)?;
    let selfp = Predicate::Fix(fx_s.clone());
    let nnselfp = Predicate::Fix(nnfx_s.clone());
    if is_leibniz_fix(fx) {
        // NN(t == s) is a single-clause least fixpoint with premises
        // `s == t` and `N F`; introduce it directly.
        let [t, s] = args else { return Err(unsup("equality atom arity")) };
        let ty = fx.pvar.arity[0].clone();
        let intro =
            Derivation::Axiom(AxiomKind::FixIntroClause { fix: nnfx_s.clone(), clause: 0 });
        let h = selfp.apply(vec![t.clone(), s.clone()]);
        // t == s gives s == t by a Leibniz rewrite.
        let dsym = symm_at(ctx, &ty, t, s, assume(h.clone()));
        let d = mp(
            mp(spec_all(intro, [t.clone(), s.clone()]), dsym),
            falsity_strong_neg(ctx),
        );
        return Ok(lam(h, d));
    }
    match fx.flavor {
        Flavor::Mu => {
            let FixDef::Clauses(cs) = &fx.def else {
                return Err(unsup(
                    "stability through operator-form inductive predicates is not supported",
                ));
            };
            // Induct on I with the double negation itself as motive.
            let strengthened = inter(&selfp, &nnselfp);
            let taut = {
                let xs = fresh_vars(ctx, &fx.pvar.arity, "w");
                let xts = term_vec(&xs);
                let pa = selfp.apply(xts.clone());
                let qa = nnselfp.apply(xts.clone());
                let hyp = and(pa.clone(), qa.clone());
                gens(&xs, lam(hyp.clone(), crate::dsl::snd(pa, qa, assume(hyp))))
            };
            let mut env2 = env.clone();
            env2.insert(
                fx.pvar.key(),
                StabEntry { pos: strengthened.clone(), dneg: nnselfp.clone(), proof: taut },
            );
            let mut sub2 = posm.clone();
            sub2.insert(fx.pvar.key(), strengthened.clone());
            let mut nnm2 = nnm.clone();
            nnm2.insert(fx.pvar.primed(2).key(), nnselfp.clone());
            let mut steps = Vec::new();
            for (ci, c) in cs.iter().enumerate() {
                steps.push(stab_mu_step(
                    ctx, fx, &nnfx_s, c, ci, &env2, &sub2, &nnm2, &nnselfp, depth,
                )?);
            }
            let ind = Derivation::Axiom(AxiomKind::FixMu {
                fix: fx_s.clone(),
                motive: nnselfp.clone(),
            });
            let applied = spec_all(crate::dsl::mps(ind, steps), args.iter().cloned());
            let h = selfp.apply(args.to_vec());
            Ok(lam(h.clone(), mp(applied, assume(h))))
        }
        Flavor::Nu => {
            let FixDef::Clauses(cs) = &fx.def else {
                return Err(unsup(
                    "stability through operator-form coinductive predicates is not supported",
                ));
            };
            // Coinduct on NN J with J itself as motive.
            let weakened = union(&nnselfp, &selfp);
            let taut = {
                let xs = fresh_vars(ctx, &fx.pvar.arity, "w");
                let xts = term_vec(&xs);
                let pa = selfp.apply(xts.clone());
                let left = nnselfp.apply(xts.clone());
                let right = selfp.apply(xts);
                gens(
                    &xs,
                    lam(pa.clone(), crate::dsl::inr(left, right, assume(pa))),
                )
            };
            let mut env2 = env.clone();
            env2.insert(
                fx.pvar.key(),
                StabEntry { pos: selfp.clone(), dneg: weakened.clone(), proof: taut },
            );
            let mut nnm2 = nnm.clone();
            nnm2.insert(fx.pvar.primed(2).key(), weakened.clone());
            let qs = fresh_vars(ctx, &fx.pvar.arity, "q");
            let qts = term_vec(&qs);
            let hj = selfp.apply(qts.clone());
            // Unfold J at the step variables into its uniform clause
            // disjunction.
            let dun = mp(
                spec_all(
                    Derivation::Axiom(AxiomKind::FixClosure { fix: fx_s.clone() }),
                    qts.clone(),
                ),
                assume(hj.clone()),
            );
            let (uys, ubody) = crate::logic::operator_body(&fx_s);
            let ubody = ubody.subst_pvars(&crate::dsl::single_subst(&fx_s.pvar, &selfp))?;
            let ubody = seq_inst(ubody, &uys, &qts);
            let djs: Vec<Formula> =
                crate::logic::disjuncts(&ubody).into_iter().cloned().collect();
            if djs.len() != cs.len() {
                return Err(unsup("unexpected uniform-body shape"));
            }
            // The required step conclusion: the negated-negated operator
            // body over the step variables, weakened at the bound variable.
            let payloads = payload_formulas(ctx, fx, &qts, &nnm2)?;
            let goal = crate::logic::or_all(payloads.clone());
            let mut branches = Vec::new();
            for (ci, c) in cs.iter().enumerate() {
                branches.push(stab_nu_branch(
                    ctx, fx, c, ci, &djs[ci], &payloads, &env2, &posm, &qts, depth,
                )?);
            }
            let inner = or_cases(&djs, goal, dun, branches);
            let step = gens(&qs, lam(hj, inner));
            let coind = Derivation::Axiom(AxiomKind::FixNu {
                fix: nnfx_s.clone(),
                motive: selfp.clone(),
            });
            let applied = spec_all(mp(coind, step), args.iter().cloned());
            let h = selfp.apply(args.to_vec());
            Ok(lam(h.clone(), mp(applied, assume(h))))
        }
    }
}

/// The disjuncts of the doubly negated operator body, instantiated at the
/// subject terms `ts` and closed under `map` (which must cover the outer
/// predicate variables and the doubly primed bound variable).
pub(crate) fn payload_formulas(
    _ctx: &GenCtx,
    fx: &Arc<crate::logic::FixPred>,
    ts: &[Term],
    map: &PredSubst,
) -> Result<Vec<Formula>, GenError> {
    let (nys, raw) = neg_conjuncts(fx)?;
    raw.iter()
        .map(|(cf, _)| {
            let pl = neg_formula(cf);
            let pl = seq_inst(pl, &nys, ts);
            Ok(pl.subst_pvars(map)?)
        })
        .collect()
}

/// Proves one payload `pl` (an instantiated disjunct of the doubly negated
/// operator body): an existential over the kept binders of guard equations
/// and the doubly negated premises — or of `N F` for a premise-free clause.
fn prove_payload(
    ctx: &GenCtx,
    pl: &Formula,
    wit: &[Term],
    n_eqs: usize,
    eq_ds: Vec<Derivation>,
    prem_ds: Vec<Derivation>,
) -> Res {
    // Instantiate the existential prefix to find the body.
    let mut body = pl.clone();
    for w in wit {
        let Formula::Ex(v, b) = body else {
            return Err(unsup("payload: expected an existential prefix"));
        };
        body = b.subst_term1(&v.name, w);
    }
    let (guard_part, rest) = if n_eqs > 0 {
        let Formula::And(g, r) = &body else {
            return Err(unsup("payload: expected a guard conjunction"));
        };
        (Some(g.as_ref().clone()), r.as_ref().clone())
    } else {
        (None, body.clone())
    };
    let drest = if prem_ds.is_empty() {
        // rest is N F.
        falsity_strong_neg(ctx)
    } else {
        let parts = split_n(&rest, prem_ds.len());
        and_tuple(&parts, prem_ds)
    };
    let dbody = match guard_part {
        Some(g) => {
            let eqs = split_n(&g, n_eqs);
            crate::dsl::pair(g.clone(), rest.clone(), and_tuple(&eqs, eq_ds), drest)
        }
        None => drest,
    };
    Ok(ex_intro_chain(pl, wit, dbody))
}

/// One induction step for the stability of a clause-form least fixpoint:
/// `all binders (premises[Y := I ∩ NNI] -> NNI head)`.
#[allow(clippy::too_many_arguments)]
fn stab_mu_step(
    ctx: &GenCtx,
    fx: &Arc<crate::logic::FixPred>,
    nnfx_s: &Arc<crate::logic::FixPred>,
    c: &crate::logic::Clause,
    ci: usize,
    env2: &StabEnv,
    sub2: &PredSubst,
    nnm2: &PredSubst,
    _nnselfp: &Predicate,
    depth: u32,
) -> Res {
    let rc = rename_clause(ctx, c);
    let hyps: Vec<Formula> = rc
        .premises
        .iter()
        .map(|p| p.subst_pvars(sub2))
        .collect::<Result<_, _>>()?;
    let payloads = payload_formulas(ctx, fx, &rc.head, nnm2)?;
    let (_, raw) = neg_conjuncts(fx)?;
    let info = &raw[ci].1;
    // Witnesses: the renamed clause binders at the kept positions; the
    // guard equations then hold by reflexivity.
    let wit: Vec<Term> = info.kept_binders.iter().map(|&k| rc.binders[k].term()).collect();
    let eq_ds: Vec<Derivation> = info
        .kept_eqs
        .iter()
        .map(|&k| refl(&fx.pvar.arity[k], rc.head[k].clone()))
        .collect();
    let mut prem_ds = Vec::new();
    for (j, pj) in rc.premises.iter().enumerate() {
        let ih = stab_rec(ctx, pj, env2, depth - 1)?;
        prem_ds.push(mp(ih, assume(hyps[j].clone())));
    }
    let dpl = prove_payload(ctx, &payloads[ci], &wit, info.kept_eqs.len(), eq_ds, prem_ds)?;
    let dbody = or_inject(&payloads, ci, dpl);
    // The double negation is operator-form when it mentions its own bound
    // variable, and a single flat clause otherwise; both introductions take
    // the payload disjunction at the clause head.
    let intro = match &nnfx_s.def {
        FixDef::Op { .. } => Derivation::Axiom(AxiomKind::FixIntroOp { fix: nnfx_s.clone() }),
        FixDef::Clauses(_) => {
            Derivation::Axiom(AxiomKind::FixIntroClause { fix: nnfx_s.clone(), clause: 0 })
        }
    };
    let d = mp(spec_all(intro, rc.head.iter().cloned()), dbody);
    Ok(gens(&rc.binders, lams(hyps, d)))
}

/// One branch of the coinduction step for the stability of a clause-form
/// greatest fixpoint: from this clause's uniform disjunct over the step
/// variables, build the corresponding doubly negated payload.
#[allow(clippy::too_many_arguments)]
fn stab_nu_branch(
    ctx: &GenCtx,
    fx: &Arc<crate::logic::FixPred>,
    c: &crate::logic::Clause,
    ci: usize,
    dj: &Formula,
    payloads: &[Formula],
    env2: &StabEnv,
    posm: &PredSubst,
    qts: &[Term],
    depth: u32,
) -> Res {
    let tys = fx.pvar.arity.clone();
    let goal = crate::logic::or_all(payloads.to_vec());
    let selfp_sub = {
        let fx_s = subst_fix(fx, posm)?;
        Predicate::Fix(fx_s)
    };
    let n = c.binders.len();
    let inner = ex_elim_chain(ctx, n, dj, &goal, assume(dj.clone()), |us, _bodyf| {
        let ren: TermSubst = c
            .binders
            .iter()
            .zip(us)
            .map(|(o, u)| (o.name.clone(), u.term()))
            .collect();
        let head_u: Vec<Term> = c.head.iter().map(|t| t.subst(&ren)).collect();
        let prem_u: Vec<Formula> = c.premises.iter().map(|p| p.subst_terms(&ren)).collect();
        let mut subp = posm.clone();
        subp.insert(fx.pvar.key(), selfp_sub.clone());
        let prem_inst: Vec<Formula> = prem_u
            .iter()
            .map(|p| p.subst_pvars(&subp))
            .collect::<Result<_, _>>()?;
        let eqf = vec_eq(&tys, qts, &head_u);
        let mut top_parts = vec![eqf.clone()];
        top_parts.extend(prem_inst.iter().cloned());
        let dtop = assume(crate::logic::and_all(top_parts.clone()));
        let deq = and_proj(&top_parts, 0, dtop.clone());
        let eq_list = split_n(&eqf, tys.len());
        let heq: Vec<Derivation> = (0..tys.len())
            .map(|k| and_proj(&eq_list, k, deq.clone()))
            .collect();
        let (_, raw) = neg_conjuncts(fx)?;
        let info = &raw[ci].1;
        let solved: Vec<(usize, usize)> = info
            .solved
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|j| (i, j)))
            .collect();
        let mut sol2 = TermSubst::new();
        for &(i, j) in &solved {
            sol2.insert(us[i].name.clone(), qts[j].clone());
        }
        let sol_eq: HashMap<usize, Derivation> =
            solved.iter().map(|&(i, j)| (i, heq[j].clone())).collect();
        // Witnesses: the eigenvariables at the kept positions.
        let wit: Vec<Term> = info.kept_binders.iter().map(|&k| us[k].term()).collect();
        // Guard equations `q_k == head_k[kept := us, solved := q]`: start
        // from the unfolding equation `q_k == head_k[us]` and rewrite the
        // solved binder occurrences to their subject variables.
        let mut eq_ds = Vec::new();
        for &k in &info.kept_eqs {
            let mut d = heq[k].clone();
            let mut cur = crate::logic::eq_atom(&tys[k], qts[k].clone(), head_u[k].clone());
            for &(i, j) in &solved {
                if !head_u[k].free_vars().contains(&us[i].name) {
                    continue;
                }
                let dsym = symm_at(ctx, &us[i].ty, &qts[j], &us[i].term(), sol_eq[&i].clone());
                d = rewrite_var(ctx, &us[i], &qts[j], &cur, dsym, d);
                cur = cur.subst_term1(&us[i].name, &qts[j]);
            }
            eq_ds.push(d);
        }
        // Doubly negated premises: transport each positive premise to the
        // solved presentation, then apply the recursion.
        let mut prem_ds = Vec::new();
        for (j, pj_u) in prem_u.iter().enumerate() {
            let pj_sol = pj_u.subst_terms(&sol2);
            let mut dpos = and_proj(&top_parts, j + 1, dtop.clone());
            let mut curp = prem_inst[j].clone();
            for &(i, jj) in &solved {
                if !curp.free_term_vars().contains(&us[i].name) {
                    continue;
                }
                let dsym =
                    symm_at(ctx, &us[i].ty, &qts[jj], &us[i].term(), sol_eq[&i].clone());
                dpos = rewrite_var(ctx, &us[i], &qts[jj], &curp, dsym, dpos);
                curp = curp.subst_term1(&us[i].name, &qts[jj]);
            }
            let ih = stab_rec(ctx, &pj_sol, env2, depth - 1)?;
            prem_ds.push(mp(ih, dpos));
        }
        let dpl = prove_payload(ctx, &payloads[ci], &wit, info.kept_eqs.len(), eq_ds, prem_ds)?;
        Ok(or_inject(payloads, ci, dpl))
    })?;
    Ok(lam(dj.clone(), inner))
}
