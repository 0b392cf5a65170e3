//! Ex falso quodlibet: for suitable formulas `A`, a derivation of `F -> A`
//! whose open assumptions are the hypotheses `all xs (F -> X xs)` for the
//! predicate variables of `A`.
//!
//! Equations are handled by extending the signature with a fresh
//! two-branch selector constant and transporting along `F = (ff == tt)`;
//! least fixpoints by picking a clause whose self-references can be
//! discharged and inventing inhabitants for its binders; greatest
//! fixpoints by coinduction at the constantly-false predicate.

use super::{fresh_vars, term_vec, unsup, Res, DEPTH};
use crate::axioms::{efq_hyp, AxiomKind};
use crate::dsl::{
    assume, gen, gens, lam, mp, mps, spec_all, subst_fix, transport, GenCtx, GenError,
};
use crate::logic::{
    bool_ty, eq_atom, falsity, ff, tt, FixDef, Flavor, Formula, PKey, PredSubst, Predicate,
    TermSubst,
};
use crate::proof::Derivation;
use crate::sig::{ConstDef, Rule, Signature};
use crate::syntax::{Term, Type};
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

/// An environment entry: a predicate together with a proof of
/// `all xs (F -> pred xs)`.
#[derive(Clone)]
pub struct EfqEntry {
    pub pred: Predicate,
    pub proof: Derivation,
}

pub type EfqEnv = HashMap<PKey, EfqEntry>;

fn env_map(env: &EfqEnv) -> PredSubst {
    env.iter().map(|(k, e)| (k.clone(), e.pred.clone())).collect()
}

/// `F -> A`, with open assumptions among `all xs (F -> X xs)` for the
/// predicate variables `X` of `A`. Extends `sig` with auxiliary constants
/// (selectors for equations, inhabitants for clause binders) as needed.
pub fn gen_efq(ctx: &GenCtx, sig: &mut Signature, a: &Formula) -> Res {
    let mut env = EfqEnv::new();
    for x in super::free_pvar_list(a) {
        env.insert(
            x.key(),
            EfqEntry {
                pred: Predicate::Var(x.clone()),
                proof: assume(efq_hyp(&x)),
            },
        );
    }
    efq_rec(ctx, sig, a, &env, &mut HashSet::new(), DEPTH)
}

fn fresh_const_name(ctx: &GenCtx, sig: &Signature, hint: &str) -> String {
    loop {
        let cand = ctx.fresh(hint, bool_ty()).name;
        if !sig.consts.contains_key(&cand) {
            return cand;
        }
    }
}

/// The free variables of a term together with their declared types.
fn typed_free_vars(t: &Term, out: &mut HashMap<String, Type>) {
    match t {
        Term::Var(v) => {
            out.entry(v.name.clone()).or_insert_with(|| v.ty.clone());
        }
        Term::Con { .. } | Term::PConst { .. } => {}
        Term::Abs(v, b) => {
            let had = out.remove(&v.name);
            typed_free_vars(b, out);
            out.remove(&v.name);
            if let Some(ty) = had {
                out.insert(v.name.clone(), ty);
            }
        }
        Term::App(f, a) => {
            typed_free_vars(f, out);
            typed_free_vars(a, out);
        }
    }
}

/// A derivation of `F -> t == s` for terms of type `ty`, via a fresh
/// selector constant `c` with `c ff xs = t` and `c tt xs = s` (the free
/// variables of both sides become extra pattern arguments `xs`).
pub(crate) fn falsity_to_eq(
    ctx: &GenCtx,
    sig: &mut Signature,
    ty: &Type,
    t: &Term,
    s: &Term,
) -> Res {
    let mut fvm = HashMap::new();
    typed_free_vars(t, &mut fvm);
    typed_free_vars(s, &mut fvm);
    let mut fv: Vec<(String, Type)> = fvm.into_iter().collect();
    fv.sort_by(|a, b| a.0.cmp(&b.0));
    let name = fresh_const_name(ctx, sig, "orc");
    let exp_args: Vec<Term> = fv
        .iter()
        .map(|(n, vt)| Term::var(n, vt.clone()))
        .collect();
    let mut arg_tys = vec![bool_ty()];
    arg_tys.extend(fv.iter().map(|(_, vt)| vt.clone()));
    let mk_pats = |b: Term| {
        let mut ps = vec![b];
        ps.extend(exp_args.iter().cloned());
        ps
    };
    sig.add_const(ConstDef {
        name: name.clone(),
        ty: Type::arrows(&arg_tys, ty.clone()),
        rules: vec![
            Rule { patterns: mk_pats(ff()), rhs: t.clone() },
            Rule { patterns: mk_pats(tt()), rhs: s.clone() },
        ],
    })
    .map_err(|e| unsup(format!("selector constant rejected: {e}")))?;
    let app = |b: Term| {
        let mut args = vec![b];
        args.extend(exp_args.iter().cloned());
        Term::apps(Term::pconst(&name), args)
    };
    // Rewrite along ff == tt inside {v | t == orc v xs}: at ff the
    // right-hand side normalizes to t, at tt to s.
    let v = ctx.fresh("v", bool_ty());
    let body = eq_atom(ty, t.clone(), app(v.term()));
    let hf = falsity();
    let base = crate::dsl::refl(ty, t.clone());
    Ok(lam(
        hf.clone(),
        transport(ctx, &bool_ty(), &v, &body, &ff(), &tt(), assume(hf), base),
    ))
}

/// A cached inhabitant of `ty`: an existing rule-free generated constant
/// if one is already in the signature, else a fresh one.
fn arb_const(ctx: &GenCtx, sig: &mut Signature, ty: &Type) -> Result<Term, GenError> {
    for (name, def) in sig.consts.iter() {
        if name.starts_with("arb") && def.rules.is_empty() && &def.ty == ty {
            return Ok(Term::pconst(name));
        }
    }
    let name = fresh_const_name(ctx, sig, "arb");
    sig.add_const(ConstDef { name: name.clone(), ty: ty.clone(), rules: vec![] })
        .map_err(|e| unsup(format!("inhabitant constant rejected: {e}")))?;
    Ok(Term::pconst(&name))
}

pub(crate) fn efq_rec(
    ctx: &GenCtx,
    sig: &mut Signature,
    f: &Formula,
    env: &EfqEnv,
    seen: &mut HashSet<usize>,
    depth: u32,
) -> Res {
    if depth == 0 {
        return Err(unsup("ex-falso recursion depth exceeded"));
    }
    let m = env_map(env);
    let hf = falsity();
    match f {
        Formula::Atom { pred, args } => match pred {
            Predicate::Var(x) => {
                let e = env
                    .get(&x.key())
                    .ok_or_else(|| unsup(format!("unregistered predicate variable {}", x.name)))?;
                let d = spec_all(e.proof.clone(), args.iter().cloned());
                Ok(lam(hf.clone(), mp(d, assume(hf))))
            }
            Predicate::Compr { .. } => {
                efq_rec(ctx, sig, &pred.apply(args.clone()), env, seen, depth - 1)
            }
            Predicate::Fix(fx) => efq_fix(ctx, sig, fx, args, env, seen, depth),
        },
        Formula::Imp(_, a1) => {
            let ih = efq_rec(ctx, sig, a1, env, seen, depth - 1)?;
            let pf = f.subst_pvars(&m)?;
            let Formula::Imp(pa0, _) = pf else { unreachable!() };
            Ok(lam(
                hf.clone(),
                lam(pa0.as_ref().clone(), mp(ih, assume(hf.clone()))),
            ))
        }
        Formula::And(a0, a1) => {
            let ih0 = efq_rec(ctx, sig, a0, env, seen, depth - 1)?;
            let ih1 = efq_rec(ctx, sig, a1, env, seen, depth - 1)?;
            let pa0 = a0.subst_pvars(&m)?;
            let pa1 = a1.subst_pvars(&m)?;
            Ok(lam(
                hf.clone(),
                crate::dsl::pair(
                    pa0,
                    pa1,
                    mp(ih0, assume(hf.clone())),
                    mp(ih1, assume(hf.clone())),
                ),
            ))
        }
        Formula::Or(a0, a1) => {
            // Either disjunct works; prefer the one we can actually derive.
            let pa0 = a0.subst_pvars(&m)?;
            let pa1 = a1.subst_pvars(&m)?;
            match efq_rec(ctx, sig, a0, env, seen, depth - 1) {
                Ok(ih0) => Ok(lam(
                    hf.clone(),
                    crate::dsl::inl(pa0, pa1, mp(ih0, assume(hf.clone()))),
                )),
                Err(_) => {
                    let ih1 = efq_rec(ctx, sig, a1, env, seen, depth - 1)?;
                    Ok(lam(
                        hf.clone(),
                        crate::dsl::inr(pa0, pa1, mp(ih1, assume(hf.clone()))),
                    ))
                }
            }
        }
        Formula::All(v, a) => {
            let u = ctx.fresh("u", v.ty.clone());
            let a_u = a.subst_term1(&v.name, &u.term());
            let ih = efq_rec(ctx, sig, &a_u, env, seen, depth - 1)?;
            Ok(lam(hf.clone(), gen(u, mp(ih, assume(hf.clone())))))
        }
        Formula::Ex(v, a) => {
            let w = arb_const(ctx, sig, &v.ty)?;
            let a_w = a.subst_term1(&v.name, &w);
            let ih = efq_rec(ctx, sig, &a_w, env, seen, depth - 1)?;
            let pa = a.subst_pvars(&m)?;
            Ok(lam(
                hf.clone(),
                crate::dsl::ex_intro(v.clone(), pa, w, mp(ih, assume(hf.clone()))),
            ))
        }
    }
}

fn efq_fix(
    ctx: &GenCtx,
    sig: &mut Signature,
    fx: &Arc<crate::logic::FixPred>,
    args: &[Term],
    env: &EfqEnv,
    seen: &mut HashSet<usize>,
    depth: u32,
) -> Res {
    let m = env_map(env);
    let fx_s = subst_fix(fx, &m)?;
    let selfp = Predicate::Fix(fx_s.clone());
    let hf = falsity();
    match fx.flavor {
        Flavor::Mu => {
            let key = Arc::as_ptr(fx) as usize;
            if !seen.insert(key) {
                return Err(unsup(
                    "no dischargeable clause reachable for inductive predicate",
                ));
            }
            let res = (|| {
                let FixDef::Clauses(cs) = &fx.def else {
                    return Err(unsup(
                        "ex falso through operator-form inductive predicates is not supported",
                    ));
                };
                let mut last_err = unsup("inductive predicate has no clauses");
                for (ci, c) in cs.iter().enumerate() {
                    match efq_mu_clause(ctx, sig, fx, &fx_s, c, ci, args, env, seen, depth) {
                        Ok(d) => return Ok(d),
                        Err(e) => last_err = e,
                    }
                }
                Err(last_err)
            })();
            seen.remove(&key);
            res
        }
        Flavor::Nu => {
            // Coinduction at the constantly-false predicate.
            let ws = fresh_vars(ctx, &fx.pvar.arity, "w");
            let motive = Predicate::compr(ws, falsity());
            let (uys, ubody) = crate::logic::operator_body(fx);
            let qs = fresh_vars(
                ctx,
                &uys.iter().map(|v| v.ty.clone()).collect::<Vec<_>>(),
                "w",
            );
            let body_q = {
                let ren: TermSubst = uys
                    .iter()
                    .zip(&qs)
                    .map(|(o, n)| (o.name.clone(), n.term()))
                    .collect();
                ubody.subst_terms(&ren)
            };
            // Inside the step, F -> (J union Q) zs holds by injecting F into
            // the right (motive) component of the union.
            let weak = crate::axioms::union(&selfp, &motive);
            let inj = {
                let zs = fresh_vars(ctx, &fx.pvar.arity, "w");
                let zts = term_vec(&zs);
                let left = selfp.apply(zts.clone());
                let right = motive.apply(zts);
                gens(
                    &zs,
                    lam(hf.clone(), crate::dsl::inr(left, right, assume(hf.clone()))),
                )
            };
            let mut env2 = env.clone();
            env2.insert(fx.pvar.key(), EfqEntry { pred: weak, proof: inj });
            let ih = efq_rec(ctx, sig, &body_q, &env2, seen, depth - 1)?;
            let hq = motive.apply(term_vec(&qs));
            let step = gens(&qs, lam(hq.clone(), mp(ih, assume(hq))));
            let coind =
                Derivation::Axiom(AxiomKind::FixNu { fix: fx_s.clone(), motive: motive.clone() });
            let applied = spec_all(mp(coind, step), args.iter().cloned());
            Ok(lam(hf.clone(), mp(applied, assume(hf.clone()))))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn efq_mu_clause(
    ctx: &GenCtx,
    sig: &mut Signature,
    fx: &Arc<crate::logic::FixPred>,
    fx_s: &Arc<crate::logic::FixPred>,
    c: &crate::logic::Clause,
    ci: usize,
    args: &[Term],
    env: &EfqEnv,
    seen: &mut HashSet<usize>,
    depth: u32,
) -> Res {
    let hf = falsity();
    // Invent inhabitants for the clause binders.
    let wit: TermSubst = c
        .binders
        .iter()
        .map(|v| Ok((v.name.clone(), arb_const(ctx, sig, &v.ty)?)))
        .collect::<Result<_, GenError>>()?;
    let mut prem_proofs = Vec::new();
    for p in &c.premises {
        let p_w = p.subst_terms(&wit);
        let d = if p_w.free_pvars().contains(&fx.pvar.key()) {
            // A self-referential premise: recurse with the fixpoint variable
            // expanded to the fixpoint itself (the seen-set guards cycles).
            let expanded = p_w.subst_pvars(&crate::dsl::single_subst(
                &fx.pvar,
                &Predicate::Fix(fx.clone()),
            ))?;
            efq_rec(ctx, sig, &expanded, env, seen, depth - 1)?
        } else {
            efq_rec(ctx, sig, &p_w, env, seen, depth - 1)?
        };
        prem_proofs.push(mp(d, assume(hf.clone())));
    }
    let intro = Derivation::Axiom(AxiomKind::FixIntroClause { fix: fx_s.clone(), clause: ci });
    let head_w: Vec<Term> = c.head.iter().map(|t| t.subst(&wit)).collect();
    let mut d = mps(
        spec_all(intro, c.binders.iter().map(|v| wit[&v.name].clone())),
        prem_proofs,
    );
    // d proves the fixpoint at head[wit]; rewrite each coordinate to the
    // requested arguments along an equation derived from falsity.
    let selfp = Predicate::Fix(fx_s.clone());
    let mut cur: Vec<Term> = head_w;
    for k in 0..args.len() {
        if cur[k] == args[k] {
            continue;
        }
        let ty = &fx.pvar.arity[k];
        let deq = mp(
            falsity_to_eq(ctx, sig, ty, &cur[k], &args[k])?,
            assume(hf.clone()),
        );
        let v = ctx.fresh("r", ty.clone());
        let mut margs: Vec<Term> = cur.clone();
        margs[k] = v.term();
        let body = selfp.apply(margs);
        d = transport(ctx, ty, &v, &body, &cur[k], &args[k], deq, d);
        cur[k] = args[k].clone();
    }
    Ok(lam(hf.clone(), d))
}
