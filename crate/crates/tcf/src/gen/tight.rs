//! Tightness machinery: the equivalence between the two spellings of
//! tightness, the tightness derivation for translated formulas, proof by
//! strong contrapositive, and the contraposition/congruence laws of strong
//! implication and strong equivalence.

use super::{unsup, Res, DEPTH};
use crate::axioms::tight_hyp;
use crate::dsl::{assume, ex_intro, gens, inl, inr, lam, mp, pair, spec_all, GenCtx};
use crate::logic::{and, falsity, imp, weak_neg, Formula, Predicate};
use crate::negation::{neg_formula, strong_equiv, strong_impl, tight_translate};
use crate::proof::{Checker, Derivation};
use crate::sig::Signature;

/// `(N A -> F) <-> (N A -> A)`: falsity on the right of a weak negation of
/// a strong negation can be traded for the formula itself.
pub fn gen_tight_equiv(ctx: &GenCtx, sig: &mut Signature, a: &Formula) -> Res {
    let na = neg_formula(a);
    let wn = imp(na.clone(), falsity());
    let taut = imp(na.clone(), a.clone());
    // N A -> F gives N A -> A through ex falso quodlibet.
    let defq = super::efq::gen_efq(ctx, sig, a)?;
    let ltr = lam(
        wn.clone(),
        lam(na.clone(), mp(defq, mp(assume(wn.clone()), assume(na.clone())))),
    );
    // N A -> A gives N A -> F because N A and A together are inconsistent.
    let def = super::ef::gen_ef(ctx, sig, a, &falsity())?;
    let rtl = lam(
        taut.clone(),
        lam(
            na.clone(),
            mp(
                mp(def, assume(na.clone())),
                mp(assume(taut.clone()), assume(na.clone())),
            ),
        ),
    );
    Ok(pair(
        imp(wn.clone(), taut.clone()),
        imp(taut, wn),
        ltr,
        rtl,
    ))
}

/// `not(N(A^t)) -> A^t` for the tight translation `A^t` of `A`, with the
/// open assumptions `all xs ((X' xs -> F) -> X xs)` for the predicate
/// variables of `A`. Fails if `A` has a fixpoint predicate or an equation
/// in a positive position; the error names the offending position.
pub fn gen_tight_translate(ctx: &GenCtx, a: &Formula) -> Res {
    let at = tight_translate(a);
    tight_rec(ctx, &at, "root", DEPTH as usize)
}

fn tight_rec(ctx: &GenCtx, b: &Formula, path: &str, depth: usize) -> Res {
    if depth == 0 {
        return Err(unsup("tightness recursion exceeded the depth bound"));
    }
    let nb = neg_formula(b);
    let hty = weak_neg(nb.clone());
    match b {
        Formula::Atom { pred, args } => match pred {
            Predicate::Var(x) => {
                let hyp = tight_hyp(x);
                Ok(lam(
                    hty.clone(),
                    mp(spec_all(assume(hyp), args.iter().cloned()), assume(hty)),
                ))
            }
            _ => Err(unsup(format!(
                "tightness requires a predicate-variable atom in every \
                 positive position (found another predicate at {path})"
            ))),
        },
        Formula::Imp(b0, b1) => {
            let nb1 = neg_formula(b1);
            let d1 = tight_rec(ctx, b1, &format!("{path}.imp-right"), depth - 1)?;
            let inner = lam(
                nb1.clone(),
                mp(
                    assume(hty.clone()),
                    pair(
                        b0.as_ref().clone(),
                        nb1.clone(),
                        assume(b0.as_ref().clone()),
                        assume(nb1.clone()),
                    ),
                ),
            );
            Ok(lam(
                hty.clone(),
                lam(b0.as_ref().clone(), mp(d1, inner)),
            ))
        }
        Formula::And(b0, b1) => {
            let nb0 = neg_formula(b0);
            let nb1 = neg_formula(b1);
            let d0 = tight_rec(ctx, b0, &format!("{path}.and-left"), depth - 1)?;
            let d1 = tight_rec(ctx, b1, &format!("{path}.and-right"), depth - 1)?;
            let left = mp(
                d0,
                lam(
                    nb0.clone(),
                    mp(
                        assume(hty.clone()),
                        inl(nb0.clone(), nb1.clone(), assume(nb0.clone())),
                    ),
                ),
            );
            let right = mp(
                d1,
                lam(
                    nb1.clone(),
                    mp(
                        assume(hty.clone()),
                        inr(nb0.clone(), nb1.clone(), assume(nb1.clone())),
                    ),
                ),
            );
            Ok(lam(
                hty,
                pair(b0.as_ref().clone(), b1.as_ref().clone(), left, right),
            ))
        }
        Formula::All(v, b0) => {
            let nb0 = neg_formula(b0);
            let u = ctx.fresh(&v.name, v.ty.clone());
            let b0u = b0.subst_term1(&v.name, &u.term());
            let nb0u = neg_formula(&b0u);
            let d0 = tight_rec(ctx, &b0u, &format!("{path}.all-body"), depth - 1)?;
            let inner = lam(
                nb0u.clone(),
                mp(
                    assume(hty.clone()),
                    ex_intro(v.clone(), nb0, u.term(), assume(nb0u)),
                ),
            );
            Ok(lam(hty.clone(), gens(&[u], mp(d0, inner))))
        }
        // The image of the tight translation has no disjunctions or
        // existentials; reaching one means the input was not translated.
        Formula::Or(..) | Formula::Ex(..) => Err(unsup(format!(
            "tightness is only derived for translated formulas \
             (found an untranslated connective at {path})"
        ))),
    }
}

/// Proof by strong contrapositive: from a tightness derivation of
/// `not(N B) -> B`, a derivation of `(N B -> N A) -> A -> B`.
pub fn gen_contrapositive_for_tight(
    ctx: &GenCtx,
    sig: &mut Signature,
    a: &Formula,
    b: &Formula,
    tightness: &Derivation,
) -> Res {
    let na = neg_formula(a);
    let nb = neg_formula(b);
    let expected = imp(weak_neg(nb.clone()), b.clone());
    {
        let checker = Checker::new(sig);
        let judgment = checker
            .check(tightness)
            .map_err(|e| unsup(format!("the supplied tightness derivation does not check: {e}")))?;
        if !checker.eq(&judgment.conclusion, &expected) {
            return Err(unsup(
                "the supplied tightness derivation does not conclude not(N B) -> B",
            ));
        }
    }
    // N A and A together are inconsistent.
    let def = super::ef::gen_ef(ctx, sig, a, &falsity())?;
    let contra = imp(nb.clone(), na.clone());
    let not_nb = lam(
        nb.clone(),
        mp(
            mp(def, mp(assume(contra.clone()), assume(nb.clone()))),
            assume(a.clone()),
        ),
    );
    Ok(lam(
        contra,
        lam(a.clone(), mp(tightness.clone(), not_nb)),
    ))
}

/// The component derivations needed to contrapose a strong implication:
/// double-negation elimination and stability for both sides.
pub struct StrongImplComponents {
    /// `N(N A) -> A`.
    pub dne_a: Derivation,
    /// `A -> N(N A)`.
    pub stab_a: Derivation,
    /// `N(N B) -> B`.
    pub dne_b: Derivation,
    /// `B -> N(N B)`.
    pub stab_b: Derivation,
}

/// `(A s-> B) <-> (N B s-> N A)`: contraposition for strong implication,
/// assembled from the supplied double-negation components.
pub fn gen_strong_impl_contra(
    a: &Formula,
    b: &Formula,
    comps: &StrongImplComponents,
) -> Res {
    let na = neg_formula(a);
    let nb = neg_formula(b);
    let nna = neg_formula(&na);
    let nnb = neg_formula(&nb);
    let sab = strong_impl(a, b);
    let snba = strong_impl(&nb, &na);
    let fwd = imp(a.clone(), b.clone());
    let back = imp(nb.clone(), na.clone());
    let dd = imp(nna.clone(), nnb.clone());
    // A s-> B is (A -> B) and (N B -> N A); N B s-> N A is
    // (N B -> N A) and (N(N A) -> N(N B)).
    let ltr = {
        let f = crate::dsl::fst(fwd.clone(), back.clone(), assume(sab.clone()));
        let c = crate::dsl::snd(fwd.clone(), back.clone(), assume(sab.clone()));
        let d_nn = lam(
            nna.clone(),
            mp(
                comps.stab_b.clone(),
                mp(f, mp(comps.dne_a.clone(), assume(nna.clone()))),
            ),
        );
        lam(sab.clone(), pair(back.clone(), dd.clone(), c, d_nn))
    };
    let rtl = {
        let c = crate::dsl::fst(back.clone(), dd.clone(), assume(snba.clone()));
        let g = crate::dsl::snd(back.clone(), dd.clone(), assume(snba.clone()));
        let d_ab = lam(
            a.clone(),
            mp(
                comps.dne_b.clone(),
                mp(g, mp(comps.stab_a.clone(), assume(a.clone()))),
            ),
        );
        lam(snba.clone(), pair(fwd, back, d_ab, c))
    };
    Ok(pair(
        imp(sab.clone(), snba.clone()),
        imp(snba, sab),
        ltr,
        rtl,
    ))
}

/// `(A0 s<-> B0) -> (A1 s<-> B1) -> ((A0 -> A1) s<-> (B0 -> B1))`:
/// implication congruence for strong equivalence, self-contained.
pub fn gen_strong_equiv_congr(
    a0: &Formula,
    b0: &Formula,
    a1: &Formula,
    b1: &Formula,
) -> Res {
    let se0 = strong_equiv(a0, b0);
    let se1 = strong_equiv(a1, b1);
    let na0 = neg_formula(a0);
    let nb0 = neg_formula(b0);
    let na1 = neg_formula(a1);
    let nb1 = neg_formula(b1);
    // strong_equiv(x, y) is and(and(x -> y, y -> x), and(N x -> N y, N y -> N x)).
    let proj = |x: &Formula, y: &Formula, nx: &Formula, ny: &Formula, d: Derivation, k: usize| {
        let iff = and(imp(x.clone(), y.clone()), imp(y.clone(), x.clone()));
        let iffn = and(imp(nx.clone(), ny.clone()), imp(ny.clone(), nx.clone()));
        let (half, inner) = if k < 2 {
            (
                crate::dsl::fst(iff.clone(), iffn.clone(), d),
                [imp(x.clone(), y.clone()), imp(y.clone(), x.clone())],
            )
        } else {
            (
                crate::dsl::snd(iff.clone(), iffn.clone(), d),
                [imp(nx.clone(), ny.clone()), imp(ny.clone(), nx.clone())],
            )
        };
        if k % 2 == 0 {
            crate::dsl::fst(inner[0].clone(), inner[1].clone(), half)
        } else {
            crate::dsl::snd(inner[0].clone(), inner[1].clone(), half)
        }
    };
    let p = imp(a0.clone(), a1.clone());
    let q = imp(b0.clone(), b1.clone());
    let np = neg_formula(&p);
    let nq = neg_formula(&q);
    let d0 = || assume(se0.clone());
    let d1 = || assume(se1.clone());
    // a0 <-> b0, N a0 <-> N b0 projections and their counterparts at 1.
    let f01 = proj(a0, b0, &na0, &nb0, d0(), 0);
    let f10 = proj(a0, b0, &na0, &nb0, d0(), 1);
    let g01 = proj(a1, b1, &na1, &nb1, d1(), 0);
    let g10 = proj(a1, b1, &na1, &nb1, d1(), 1);
    let k01 = proj(a1, b1, &na1, &nb1, d1(), 2);
    let k10 = proj(a1, b1, &na1, &nb1, d1(), 3);
    // (a0 -> a1) -> (b0 -> b1) and its converse.
    let pq = lam(
        p.clone(),
        lam(
            b0.clone(),
            mp(g01, mp(assume(p.clone()), mp(f10, assume(b0.clone())))),
        ),
    );
    let qp = lam(
        q.clone(),
        lam(
            a0.clone(),
            mp(g10, mp(assume(q.clone()), mp(f01.clone(), assume(a0.clone())))),
        ),
    );
    // N p is and(a0, N a1); N q is and(b0, N b1).
    let f01b = proj(a0, b0, &na0, &nb0, d0(), 0);
    let f10b = proj(a0, b0, &na0, &nb0, d0(), 1);
    let npnq = lam(np.clone(), {
        let x0 = crate::dsl::fst(a0.clone(), na1.clone(), assume(np.clone()));
        let x1 = crate::dsl::snd(a0.clone(), na1.clone(), assume(np.clone()));
        pair(b0.clone(), nb1.clone(), mp(f01b, x0), mp(k01, x1))
    });
    let nqnp = lam(nq.clone(), {
        let y0 = crate::dsl::fst(b0.clone(), nb1.clone(), assume(nq.clone()));
        let y1 = crate::dsl::snd(b0.clone(), nb1.clone(), assume(nq.clone()));
        pair(a0.clone(), na1.clone(), mp(f10b, y0), mp(k10, y1))
    });
    let iff_pq = pair(imp(p.clone(), q.clone()), imp(q.clone(), p.clone()), pq, qp);
    let iff_n = pair(imp(np.clone(), nq.clone()), imp(nq.clone(), np.clone()), npnq, nqnp);
    let body = pair(
        and(imp(p.clone(), q.clone()), imp(q.clone(), p.clone())),
        and(imp(np, nq.clone()), imp(nq, neg_formula(&p))),
        iff_pq,
        iff_n,
    );
    Ok(lam(se0, lam(se1, body)))
}

/// The two displayed laws of strong implication for a pair of formulas:
/// contraposition at `(A, B)` and implication congruence for strong
/// equivalence at the reflexive pair `((A, B), (A, B))`.
pub struct StrongImplProps {
    /// `(A s-> B) <-> (N B s-> N A)`.
    pub contraposition: Derivation,
    /// `(A s<-> B) -> (A s<-> B) -> ((A -> A) s<-> (B -> B))`.
    pub congruence: Derivation,
}

pub fn gen_strong_impl_props(
    a: &Formula,
    b: &Formula,
    comps: &StrongImplComponents,
) -> Result<StrongImplProps, crate::dsl::GenError> {
    Ok(StrongImplProps {
        contraposition: gen_strong_impl_contra(a, b, comps)?,
        congruence: gen_strong_equiv_congr(a, b, a, b)?,
    })
}
