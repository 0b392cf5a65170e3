//! The standard signature and formula corpus used by the examples, the
//! regression suite and the CLI defaults: booleans, naturals, lists, finitely
//! branching trees, boolean streams, an abstract rational/real layer, the
//! usual inductive and coinductive predicates over them, and a bounded
//! enumeration of well-formed formulas.

use crate::logic::{all, imp, mk_fix, Clause, Flavor, FixPred, Predicate, PVar};
use crate::sig::{Algebra, ConstDef, Constructor, Rule, Signature};
use crate::syntax::{Term, Type, Var};
use std::sync::Arc;

pub fn nat() -> Type {
    Type::alg("N")
}

pub fn boolean() -> Type {
    Type::alg("B")
}

pub fn list(a: Type) -> Type {
    Type::alg1("L", a)
}

pub fn tree() -> Type {
    Type::alg("T")
}

pub fn stream() -> Type {
    Type::alg("S")
}

pub fn rat() -> Type {
    Type::alg("Q")
}

pub fn pos() -> Type {
    Type::alg("P")
}

pub fn real() -> Type {
    Type::alg("R")
}

pub fn numeral(k: u64) -> Term {
    let mut t = Term::con("N", "0", vec![]);
    for _ in 0..k {
        t = Term::app(Term::con("N", "S", vec![]), t);
    }
    t
}

pub fn suc(t: Term) -> Term {
    Term::app(Term::con("N", "S", vec![]), t)
}

pub fn nil(elem: Type) -> Term {
    Term::con("L", "nil", vec![elem])
}

pub fn cons(elem: Type, hd: Term, tl: Term) -> Term {
    Term::apps(Term::con("L", "cons", vec![elem]), [hd, tl])
}

pub fn scons(hd: Term, tl: Term) -> Term {
    Term::apps(Term::con("S", "scons", vec![]), [hd, tl])
}

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

pub fn std_sig() -> Signature {
    let mut sig = Signature::new();
    sig.add_algebra(Algebra {
        name: "B".into(),
        params: vec![],
        constructors: vec![
            Constructor { name: "ff".into(), arg_tys: vec![] },
            Constructor { name: "tt".into(), arg_tys: vec![] },
        ],
    })
    .unwrap();
    sig.add_algebra(Algebra {
        name: "N".into(),
        params: vec![],
        constructors: vec![
            Constructor { name: "0".into(), arg_tys: vec![] },
            Constructor { name: "S".into(), arg_tys: vec![Type::alg("N")] },
        ],
    })
    .unwrap();
    sig.add_algebra(Algebra {
        name: "L".into(),
        params: vec!["a".into()],
        constructors: vec![
            Constructor { name: "nil".into(), arg_tys: vec![] },
            Constructor {
                name: "cons".into(),
                arg_tys: vec![Type::Var("a".into()), Type::alg1("L", Type::Var("a".into()))],
            },
        ],
    })
    .unwrap();
    sig.add_algebra(Algebra {
        name: "T".into(),
        params: vec![],
        constructors: vec![
            Constructor { name: "Lf".into(), arg_tys: vec![] },
            Constructor { name: "Br".into(), arg_tys: vec![Type::alg1("L", Type::alg("T"))] },
        ],
    })
    .unwrap();
    sig.add_algebra(Algebra {
        name: "S".into(),
        params: vec![],
        constructors: vec![Constructor {
            name: "scons".into(),
            arg_tys: vec![Type::alg("B"), Type::alg("S")],
        }],
    })
    .unwrap();
    // Abstract rationals and positive integers (no constructors needed for
    // the syntactic real-number corpus), and Cauchy reals as a sequence
    // paired with a modulus.
    sig.add_algebra(Algebra { name: "Q".into(), params: vec![], constructors: vec![] }).unwrap();
    sig.add_algebra(Algebra { name: "P".into(), params: vec![], constructors: vec![] }).unwrap();
    sig.add_algebra(Algebra {
        name: "R".into(),
        params: vec![],
        constructors: vec![Constructor {
            name: "RC".into(),
            arg_tys: vec![Type::arrow(nat(), rat()), Type::arrow(pos(), nat())],
        }],
    })
    .unwrap();

    let nv = |n: &str| Term::var(n, nat());
    let zero = numeral(0);

    // inf = S inf : the infinite natural number.
    sig.add_const(ConstDef {
        name: "inf".into(),
        ty: nat(),
        rules: vec![Rule { patterns: vec![], rhs: suc(Term::pconst("inf")) }],
    })
    .unwrap();

    sig.add_const(ConstDef {
        name: "double".into(),
        ty: Type::arrow(nat(), nat()),
        rules: vec![
            Rule { patterns: vec![zero.clone()], rhs: zero.clone() },
            Rule {
                patterns: vec![suc(nv("n"))],
                rhs: suc(suc(Term::app(Term::pconst("double"), nv("n")))),
            },
        ],
    })
    .unwrap();

    // nbin n m computes the little-endian binary representation of n + 2m.
    let con_tt = Term::con("B", "tt", vec![]);
    let con_ff = Term::con("B", "ff", vec![]);
    let nbin = |a: Term, b: Term| Term::apps(Term::pconst("nbin"), [a, b]);
    sig.add_const(ConstDef {
        name: "nbin".into(),
        ty: Type::arrows(&[nat(), nat()], list(boolean())),
        rules: vec![
            Rule { patterns: vec![zero.clone(), zero.clone()], rhs: nil(boolean()) },
            Rule {
                patterns: vec![suc(zero.clone()), nv("m")],
                rhs: cons(boolean(), con_tt, nbin(nv("m"), zero.clone())),
            },
            Rule {
                patterns: vec![zero.clone(), suc(nv("m"))],
                rhs: cons(boolean(), con_ff, nbin(suc(nv("m")), zero.clone())),
            },
            Rule {
                patterns: vec![suc(suc(nv("n"))), nv("m")],
                rhs: nbin(nv("n"), suc(nv("m"))),
            },
        ],
    })
    .unwrap();

    // geb a b = tt iff a >= b (on total naturals).
    let geb = |a: Term, b: Term| Term::apps(Term::pconst("geb"), [a, b]);
    sig.add_const(ConstDef {
        name: "geb".into(),
        ty: Type::arrows(&[nat(), nat()], boolean()),
        rules: vec![
            Rule { patterns: vec![nv("n"), zero.clone()], rhs: Term::con("B", "tt", vec![]) },
            Rule {
                patterns: vec![zero.clone(), suc(nv("m"))],
                rhs: Term::con("B", "ff", vec![]),
            },
            Rule { patterns: vec![suc(nv("n")), suc(nv("m"))], rhs: geb(nv("n"), nv("m")) },
        ],
    })
    .unwrap();

    // Abstract rational comparisons (decidable on total inputs), negation,
    // dyadic powers, and the two projections of a real.
    for (name, ty) in [
        ("qlt", Type::arrows(&[rat(), rat()], boolean())),
        ("qleq", Type::arrows(&[rat(), rat()], boolean())),
        ("qneg", Type::arrow(rat(), rat())),
        ("pw2inv", Type::arrow(pos(), rat())),
    ] {
        sig.add_const(ConstDef { name: name.into(), ty, rules: vec![] }).unwrap();
    }
    sig.add_const(ConstDef {
        name: "rs".into(),
        ty: Type::arrows(&[real(), nat()], rat()),
        rules: vec![Rule {
            patterns: vec![Term::apps(
                Term::con("R", "RC", vec![]),
                [
                    Term::var("s", Type::arrow(nat(), rat())),
                    Term::var("m", Type::arrow(pos(), nat())),
                ],
            )],
            rhs: Term::var("s", Type::arrow(nat(), rat())),
        }],
    })
    .unwrap();
    sig.add_const(ConstDef {
        name: "rm".into(),
        ty: Type::arrows(&[real(), pos()], nat()),
        rules: vec![Rule {
            patterns: vec![Term::apps(
                Term::con("R", "RC", vec![]),
                [
                    Term::var("s", Type::arrow(nat(), rat())),
                    Term::var("m", Type::arrow(pos(), nat())),
                ],
            )],
            rhs: Term::var("m", Type::arrow(pos(), nat())),
        }],
    })
    .unwrap();

    for (name, p) in [
        ("Ev", Predicate::Fix(ev_fix())),
        ("Od", Predicate::Fix(od_fix())),
        ("Prec", Predicate::Fix(prec_fix())),
        ("Acc", Predicate::Fix(acc_fix())),
        ("TotN", Predicate::Fix(totn_fix())),
        ("Tn", Predicate::Fix(tn_fix())),
        ("EqB", Predicate::Fix(eqb_fix())),
        ("SimN", Predicate::Fix(simn_fix())),
        ("BisimS", Predicate::Fix(bisims_fix())),
    ] {
        sig.add_pred(name, p);
    }
    sig
}

// ---------------------------------------------------------------------------
// Standard predicates
// ---------------------------------------------------------------------------

fn x1(ty: Type) -> PVar {
    PVar::new("X", vec![ty])
}

fn x2(ty: Type) -> PVar {
    PVar::new("X", vec![ty.clone(), ty])
}

/// Even naturals: `0 ∈ Ev` and `n ∈ Ev -> n+2 ∈ Ev`.
pub fn ev_fix() -> Arc<FixPred> {
    let x = x1(nat());
    let n = Var::new("n", nat());
    mk_fix(
        Flavor::Mu,
        "Ev",
        x.clone(),
        vec![
            Clause { binders: vec![], premises: vec![], head: vec![numeral(0)] },
            Clause {
                binders: vec![n.clone()],
                premises: vec![Predicate::Var(x).apply(vec![n.term()])],
                head: vec![suc(suc(n.term()))],
            },
        ],
    )
    .unwrap()
}

/// Odd naturals: `1 ∈ Od` and `n ∈ Od -> n+2 ∈ Od`.
pub fn od_fix() -> Arc<FixPred> {
    let x = x1(nat());
    let n = Var::new("n", nat());
    mk_fix(
        Flavor::Mu,
        "Od",
        x.clone(),
        vec![
            Clause { binders: vec![], premises: vec![], head: vec![numeral(1)] },
            Clause {
                binders: vec![n.clone()],
                premises: vec![Predicate::Var(x).apply(vec![n.term()])],
                head: vec![suc(suc(n.term()))],
            },
        ],
    )
    .unwrap()
}

/// The order `n ≺ S n` on naturals.
pub fn prec_fix() -> Arc<FixPred> {
    let x = x2(nat());
    let n = Var::new("n", nat());
    mk_fix(
        Flavor::Mu,
        "Prec",
        x.clone(),
        vec![Clause {
            binders: vec![n.clone()],
            premises: vec![],
            head: vec![n.term(), suc(n.term())],
        }],
    )
    .unwrap()
}

/// The accessible part of `Prec`:
/// `all x (all y (y ≺ x -> y ∈ Acc) -> x ∈ Acc)`.
pub fn acc_fix() -> Arc<FixPred> {
    let x = x1(nat());
    let vx = Var::new("x", nat());
    let vy = Var::new("y", nat());
    mk_fix(
        Flavor::Mu,
        "Acc",
        x.clone(),
        vec![Clause {
            binders: vec![vx.clone()],
            premises: vec![all(
                vy.clone(),
                imp(
                    Predicate::Fix(prec_fix()).apply(vec![vy.term(), vx.term()]),
                    Predicate::Var(x).apply(vec![vy.term()]),
                ),
            )],
            head: vec![vx.term()],
        }],
    )
    .unwrap()
}

/// Total naturals.
pub fn totn_fix() -> Arc<FixPred> {
    let x = x1(nat());
    let n = Var::new("n", nat());
    mk_fix(
        Flavor::Mu,
        "TotN",
        x.clone(),
        vec![
            Clause { binders: vec![], premises: vec![], head: vec![numeral(0)] },
            Clause {
                binders: vec![n.clone()],
                premises: vec![Predicate::Var(x).apply(vec![n.term()])],
                head: vec![suc(n.term())],
            },
        ],
    )
    .unwrap()
}

/// Lists whose elements all satisfy `elem` (an inductive predicate with a
/// free parameter predicate).
pub fn list_all(elem: Predicate, elem_ty: Type) -> Arc<FixPred> {
    let y = PVar::new("Y", vec![list(elem_ty.clone())]);
    let a = Var::new("a", elem_ty.clone());
    let l = Var::new("l", list(elem_ty.clone()));
    mk_fix(
        Flavor::Mu,
        "",
        y.clone(),
        vec![
            Clause { binders: vec![], premises: vec![], head: vec![nil(elem_ty.clone())] },
            Clause {
                binders: vec![a.clone(), l.clone()],
                premises: vec![
                    elem.apply(vec![a.term()]),
                    Predicate::Var(y).apply(vec![l.term()]),
                ],
                head: vec![cons(elem_ty, a.term(), l.term())],
            },
        ],
    )
    .unwrap()
}

/// `list_all` over the free predicate variable `X` of arity `[N]` — the
/// corpus predicate `L`.
pub fn list_of_x() -> Arc<FixPred> {
    let mut f = (*list_all(Predicate::Var(PVar::new("X", vec![nat()])), nat())).clone();
    f.name = "L".to_string();
    Arc::new(f)
}

/// Cototal finitely branching trees: `Lf ∈ Tn` and
/// `all ts (every subtree in Tn -> Br ts ∈ Tn)`, coinductively.
pub fn tn_fix() -> Arc<FixPred> {
    let x = x1(tree());
    let ts = Var::new("ts", list(tree()));
    mk_fix(
        Flavor::Nu,
        "Tn",
        x.clone(),
        vec![
            Clause { binders: vec![], premises: vec![], head: vec![Term::con("T", "Lf", vec![])] },
            Clause {
                binders: vec![ts.clone()],
                premises: vec![
                    Predicate::Fix(list_all(Predicate::Var(x), tree())).apply(vec![ts.term()]),
                ],
                head: vec![Term::app(Term::con("T", "Br", vec![]), ts.term())],
            },
        ],
    )
    .unwrap()
}

/// Boolean equality as an inductive predicate on `(ff,ff)` and `(tt,tt)`.
pub fn eqb_fix() -> Arc<FixPred> {
    let x = x2(boolean());
    mk_fix(
        Flavor::Mu,
        "EqB",
        x,
        vec![
            Clause {
                binders: vec![],
                premises: vec![],
                head: vec![Term::con("B", "ff", vec![]), Term::con("B", "ff", vec![])],
            },
            Clause {
                binders: vec![],
                premises: vec![],
                head: vec![Term::con("B", "tt", vec![]), Term::con("B", "tt", vec![])],
            },
        ],
    )
    .unwrap()
}

/// Similarity of naturals: `0 ≈ 0` and `n ≈ m -> S n ≈ S m`.
pub fn simn_fix() -> Arc<FixPred> {
    let x = x2(nat());
    let n = Var::new("n", nat());
    let m = Var::new("m", nat());
    mk_fix(
        Flavor::Mu,
        "SimN",
        x.clone(),
        vec![
            Clause { binders: vec![], premises: vec![], head: vec![numeral(0), numeral(0)] },
            Clause {
                binders: vec![n.clone(), m.clone()],
                premises: vec![Predicate::Var(x).apply(vec![n.term(), m.term()])],
                head: vec![suc(n.term()), suc(m.term())],
            },
        ],
    )
    .unwrap()
}

/// Bisimilarity of boolean streams (the similarity clause read coinductively).
pub fn bisims_fix() -> Arc<FixPred> {
    let x = x2(stream());
    let b0 = Var::new("b0", boolean());
    let b1 = Var::new("b1", boolean());
    let v0 = Var::new("v0", stream());
    let v1 = Var::new("v1", stream());
    mk_fix(
        Flavor::Nu,
        "BisimS",
        x.clone(),
        vec![Clause {
            binders: vec![b0.clone(), b1.clone(), v0.clone(), v1.clone()],
            premises: vec![
                Predicate::Fix(eqb_fix()).apply(vec![b0.term(), b1.term()]),
                Predicate::Var(x).apply(vec![v0.term(), v1.term()]),
            ],
            head: vec![scons(b0.term(), v0.term()), scons(b1.term(), v1.term())],
        }],
    )
    .unwrap()
}

/// Reflexive, symmetric, transitive closure of a binary relation `rel` on
/// `ty`.
pub fn closure(rel: Predicate, ty: Type) -> Arc<FixPred> {
    let xp = x2(ty.clone());
    let x = Var::new("x", ty.clone());
    let y = Var::new("y", ty.clone());
    let z = Var::new("z", ty.clone());
    let xv = |a: &Var, b: &Var| Predicate::Var(xp.clone()).apply(vec![a.term(), b.term()]);
    mk_fix(
        Flavor::Mu,
        "Cl",
        xp.clone(),
        vec![
            Clause {
                binders: vec![x.clone(), y.clone()],
                premises: vec![rel.apply(vec![x.term(), y.term()])],
                head: vec![x.term(), y.term()],
            },
            Clause { binders: vec![x.clone()], premises: vec![], head: vec![x.term(), x.term()] },
            Clause {
                binders: vec![x.clone(), y.clone()],
                premises: vec![xv(&x, &y)],
                head: vec![y.term(), x.term()],
            },
            Clause {
                binders: vec![x.clone(), y.clone(), z.clone()],
                premises: vec![xv(&x, &y), xv(&y, &z)],
                head: vec![x.term(), z.term()],
            },
        ],
    )
    .unwrap()
}

pub fn ev() -> Predicate {
    Predicate::Fix(ev_fix())
}

pub fn od() -> Predicate {
    Predicate::Fix(od_fix())
}

pub fn acc() -> Predicate {
    Predicate::Fix(acc_fix())
}

pub fn prec() -> Predicate {
    Predicate::Fix(prec_fix())
}

pub fn tn() -> Predicate {
    Predicate::Fix(tn_fix())
}

pub fn totn() -> Predicate {
    Predicate::Fix(totn_fix())
}

/// Nonnegativity of a Cauchy real:
/// `all p ex n (n >= x_m p  and  -2^-p <_Q x_s n)`.
pub fn real_nonneg(x: &Term) -> crate::logic::Formula {
    use crate::logic::{eq_atom, ex, Formula};
    let p = Var::new("p", pos());
    let n = Var::new("n", nat());
    let xs_n = Term::apps(Term::pconst("rs"), [x.clone(), n.term()]);
    let xm_p = Term::apps(Term::pconst("rm"), [x.clone(), p.term()]);
    let bound = eq_atom(
        &boolean(),
        Term::apps(Term::pconst("geb"), [n.term(), xm_p]),
        Term::con("B", "tt", vec![]),
    );
    let neg2p = Term::app(Term::pconst("qneg"), Term::app(Term::pconst("pw2inv"), p.term()));
    let lt = eq_atom(
        &boolean(),
        Term::apps(Term::pconst("qlt"), [neg2p, xs_n]),
        Term::con("B", "tt", vec![]),
    );
    let body: Formula = crate::logic::and(bound, lt);
    all(p, ex(n, body))
}

// ---------------------------------------------------------------------------
// Formula enumeration
// ---------------------------------------------------------------------------

/// All well-formed formulas of size at most `max_size` over the fixed corpus
/// signature: atoms `Ev n`, `Od n`, `Acc n`, `X n`, `Tn t`, `L l`, `n == m`,
/// `n == 0` (with free variables `n m : N`, `t : T`, `l : L N` and the free
/// predicate variable `X : [N]`), closed under the connectives and under
/// quantification over variables actually free in the body. Size counts
/// nodes; atoms have size 1.
pub fn enumerate_formulas(max_size: usize) -> Vec<crate::logic::Formula> {
    use crate::logic::{eq_atom, Formula};
    let n = Var::new("n", nat());
    let m = Var::new("m", nat());
    let t = Var::new("t", tree());
    let l = Var::new("l", list(nat()));
    let xp = Predicate::Var(PVar::new("X", vec![nat()]));
    let atoms: Vec<Formula> = vec![
        ev().apply(vec![n.term()]),
        od().apply(vec![n.term()]),
        acc().apply(vec![n.term()]),
        xp.apply(vec![n.term()]),
        tn().apply(vec![t.term()]),
        Predicate::Fix(list_of_x()).apply(vec![l.term()]),
        eq_atom(&nat(), n.term(), m.term()),
        eq_atom(&nat(), n.term(), numeral(0)),
    ];
    let qvars = [n, m, t, l];
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1] = atoms;
    }
    for size in 2..=max_size {
        let mut out = Vec::new();
        // Binary connectives.
        for ls in 1..size - 1 {
            let rs = size - 1 - ls;
            for a in by_size[ls].clone() {
                for b in &by_size[rs] {
                    out.push(imp(a.clone(), b.clone()));
                    out.push(crate::logic::and(a.clone(), b.clone()));
                    out.push(crate::logic::or(a.clone(), b.clone()));
                }
            }
        }
        // Quantifiers over variables free in the body.
        for b in by_size[size - 1].clone() {
            let fv = b.free_term_vars();
            for v in &qvars {
                if fv.contains(&v.name) {
                    out.push(all(v.clone(), b.clone()));
                    out.push(crate::logic::ex(v.clone(), b.clone()));
                }
            }
        }
        by_size[size] = out;
    }
    by_size.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nbin_handles_the_spec_example() {
        let sig = std_sig();
        let t = Term::apps(Term::pconst("nbin"), [numeral(5), numeral(0)]);
        let (n, st) = crate::rewrite::normalize_default(&sig, &t);
        assert_eq!(st, crate::rewrite::Status::Normal);
        let tb = Term::con("B", "tt", vec![]);
        let fb = Term::con("B", "ff", vec![]);
        let want = cons(
            boolean(),
            tb.clone(),
            cons(boolean(), fb, cons(boolean(), tb, nil(boolean()))),
        );
        assert!(n.alpha_eq(&want), "{n:?}");
    }

    #[test]
    fn predicates_typecheck_against_their_arities() {
        let sig = std_sig();
        for (_, p) in sig.preds.iter() {
            let arity = p.arity();
            assert!(!arity.is_empty());
        }
    }

    #[test]
    fn enumeration_counts_are_stable() {
        let f1 = enumerate_formulas(1);
        assert_eq!(f1.len(), 8);
        let f3 = enumerate_formulas(3);
        // size-2: quantifiers over free vars of each atom (2 per eligible
        // var). Stability check only; the exact number is frozen here.
        assert!(f3.len() > f1.len());
        let f7a = enumerate_formulas(7).len();
        let f7b = enumerate_formulas(7).len();
        assert_eq!(f7a, f7b);
    }

    #[test]
    fn real_nonneg_shape() {
        let x = Term::var("x", real());
        let f = real_nonneg(&x);
        assert_eq!(
            crate::print::formula_to_string(&f),
            "all p:P ex n:N (geb n (rm x p) == tt and qlt (qneg (pw2inv p)) (rs x n) == tt)"
        );
    }
}

// ---------------------------------------------------------------------------
// Named sample formulas
// ---------------------------------------------------------------------------

/// Twenty named closed formulas over the fixed corpus signature, spanning
/// atoms, all connectives, quantifiers and each flavor of fixpoint. Used as
/// the default target list for batch proving.
pub fn sample_formulas() -> Vec<(String, crate::logic::Formula)> {
    use crate::logic::{all, and, eq_atom, ex, falsity, imp, or, weak_neg, Formula};
    let n = Var::new("n", nat());
    let m = Var::new("m", nat());
    let s = Var::new("s", stream());
    let x = Var::new("x", real());
    let evn: Formula = ev().apply(vec![n.term()]);
    let odn: Formula = od().apply(vec![n.term()]);
    let list: Vec<(&str, Formula)> = vec![
        ("ev_four", ev().apply(vec![numeral(4)])),
        ("od_one", od().apply(vec![numeral(1)])),
        ("acc_three", acc().apply(vec![numeral(3)])),
        ("totn_two", totn().apply(vec![numeral(2)])),
        ("tn_leaf", tn().apply(vec![Term::con("T", "Lf", vec![])])),
        ("eqb_tt", Predicate::Fix(eqb_fix()).apply(vec![
            Term::con("B", "tt", vec![]),
            Term::con("B", "tt", vec![]),
        ])),
        ("simn_two", Predicate::Fix(simn_fix()).apply(vec![numeral(2), numeral(2)])),
        ("eq_two", eq_atom(&nat(), numeral(2), numeral(2))),
        ("ev_step", all(n.clone(), imp(evn.clone(), ev().apply(vec![suc(suc(n.term()))])))),
        ("ev_or_od", all(n.clone(), or(evn.clone(), odn.clone()))),
        ("ev_and_od", and(ev().apply(vec![numeral(0)]), od().apply(vec![numeral(1)]))),
        ("ex_od", ex(n.clone(), odn.clone())),
        ("ex_pair", ex(n.clone(), and(evn.clone(), od().apply(vec![suc(n.term())])))),
        ("efq_ev", imp(falsity(), ev().apply(vec![numeral(0)]))),
        ("not_od_zero", weak_neg(od().apply(vec![numeral(0)]))),
        ("refl_all", all(n.clone(), eq_atom(&nat(), n.term(), n.term()))),
        ("prec_total", all(n.clone(), ex(m.clone(), prec().apply(vec![n.term(), m.term()])))),
        ("bisim_refl", all(s.clone(), Predicate::Fix(bisims_fix()).apply(vec![s.term(), s.term()]))),
        ("real_nonneg_all", all(x.clone(), real_nonneg(&x.term()))),
        ("nested_step", all(n.clone(), imp(evn.clone(), or(
            od().apply(vec![suc(n.term())]),
            ev().apply(vec![suc(suc(n.term()))]),
        )))),
    ];
    list.into_iter().map(|(k, f)| (k.to_string(), f)).collect()
}
