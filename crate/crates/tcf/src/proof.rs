//! Natural-deduction derivations for minimal logic and their checker.
//!
//! A derivation is a tree whose leaves are open assumptions or axiom-scheme
//! instances; the checker recomputes the judgment of every node, so the only
//! trusted code is this module plus `axioms::instantiate`. Conjunction,
//! disjunction and existence are handled through their axiom schemes, so the
//! tree itself only needs implication and universal quantification.
//!
//! Formulas are compared up to computation: both sides are normalized
//! (term rewriting plus comprehension expansion) and then compared up to
//! renaming of bound variables.

use crate::axioms::{instantiate, AxiomError, AxiomKind};
use crate::logic::{all, imp, Formula, LogicError, PredSubst, Predicate};
use crate::sig::{SigError, Signature};
use crate::logic::TermSubst;
use crate::syntax::{Term, Type, Var};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Derivation {
    /// An open assumption.
    Assume(Formula),
    /// An axiom-scheme instance; its conclusion is recomputed when checked.
    Axiom(AxiomKind),
    /// Implication introduction: discharges every open assumption equal to
    /// `hyp` (vacuous discharge is allowed).
    ImpIntro { hyp: Formula, body: Arc<Derivation> },
    ImpElim { fun: Arc<Derivation>, arg: Arc<Derivation> },
    /// Universal introduction; `v` must not occur free in any open
    /// assumption of the body.
    AllIntro { v: Var, body: Arc<Derivation> },
    AllElim { body: Arc<Derivation>, term: Term },
}

#[derive(Clone, Debug)]
pub struct Judgment {
    /// Open assumptions, deduplicated up to renaming of bound variables.
    pub assumptions: Vec<Formula>,
    pub conclusion: Formula,
}

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("implication elimination applied to a non-implication: {0:?}")]
    NotImplication(Formula),
    #[error("argument of implication elimination does not match: expected {expected:?}, got {got:?}")]
    ArgMismatch { expected: Formula, got: Formula },
    #[error("universal elimination applied to a non-universal formula: {0:?}")]
    NotUniversal(Formula),
    #[error("eigenvariable `{var}` occurs free in open assumption {assumption:?}")]
    Eigenvariable { var: String, assumption: Formula },
    #[error("instantiating term has type {got:?}, expected {want:?}")]
    InstanceType { want: Type, got: Type },
    #[error("ill-typed term: {0}")]
    Term(#[from] SigError),
    #[error("{0}")]
    Axiom(#[from] AxiomError),
    #[error("{0}")]
    Logic(#[from] LogicError),
}

pub struct Checker<'a> {
    pub sig: &'a Signature,
    pub fuel: u64,
}

impl<'a> Checker<'a> {
    pub fn new(sig: &'a Signature) -> Checker<'a> {
        Checker { sig, fuel: crate::rewrite::DEFAULT_FUEL }
    }

    /// Judgmental equality: normalize both sides, then compare up to
    /// renaming of bound variables.
    pub fn eq(&self, a: &Formula, b: &Formula) -> bool {
        a.alpha_eq(b) || a.norm(self.sig, self.fuel).alpha_eq(&b.norm(self.sig, self.fuel))
    }

    pub fn check(&self, d: &Derivation) -> Result<Judgment, ProofError> {
        match d {
            Derivation::Assume(f) => Ok(Judgment {
                assumptions: vec![f.clone()],
                conclusion: f.clone(),
            }),
            Derivation::Axiom(kind) => Ok(Judgment {
                assumptions: Vec::new(),
                conclusion: instantiate(kind)?,
            }),
            Derivation::ImpIntro { hyp, body } => {
                let j = self.check(body)?;
                let assumptions: Vec<Formula> =
                    j.assumptions.into_iter().filter(|a| !self.eq(a, hyp)).collect();
                Ok(Judgment {
                    assumptions,
                    conclusion: imp(hyp.clone(), j.conclusion),
                })
            }
            Derivation::ImpElim { fun, arg } => {
                let jf = self.check(fun)?;
                let ja = self.check(arg)?;
                let (prem, concl) = match &jf.conclusion {
                    Formula::Imp(a, b) => ((**a).clone(), (**b).clone()),
                    other => return Err(ProofError::NotImplication(other.clone())),
                };
                if !self.eq(&prem, &ja.conclusion) {
                    return Err(ProofError::ArgMismatch {
                        expected: prem,
                        got: ja.conclusion,
                    });
                }
                Ok(Judgment {
                    assumptions: merge_assumptions(jf.assumptions, ja.assumptions),
                    conclusion: concl,
                })
            }
            Derivation::AllIntro { v, body } => {
                let j = self.check(body)?;
                for a in &j.assumptions {
                    if a.free_term_vars().contains(&v.name) {
                        return Err(ProofError::Eigenvariable {
                            var: v.name.clone(),
                            assumption: a.clone(),
                        });
                    }
                }
                Ok(Judgment {
                    assumptions: j.assumptions,
                    conclusion: all(v.clone(), j.conclusion),
                })
            }
            Derivation::AllElim { body, term } => {
                let j = self.check(body)?;
                let (v, b) = match &j.conclusion {
                    Formula::All(v, b) => (v.clone(), (**b).clone()),
                    other => return Err(ProofError::NotUniversal(other.clone())),
                };
                let got = self.sig.infer(term)?;
                if got != v.ty {
                    return Err(ProofError::InstanceType { want: v.ty.clone(), got });
                }
                Ok(Judgment {
                    assumptions: j.assumptions,
                    conclusion: b.subst_term1(&v.name, term),
                })
            }
        }
    }

    /// Checks that `d` is a closed derivation of `goal`.
    pub fn check_closed(&self, d: &Derivation, goal: &Formula) -> Result<(), String> {
        let j = self.check(d).map_err(|e| e.to_string())?;
        if !j.assumptions.is_empty() {
            return Err(format!(
                "derivation has {} open assumption(s), first: {:?}",
                j.assumptions.len(),
                j.assumptions[0]
            ));
        }
        if !self.eq(&j.conclusion, goal) {
            return Err(format!("derivation proves {:?}, not {:?}", j.conclusion, goal));
        }
        Ok(())
    }

    /// Checks that `d` derives `goal` with open assumptions drawn from
    /// `allowed` (up to judgmental equality).
    pub fn check_under(
        &self,
        d: &Derivation,
        allowed: &[Formula],
        goal: &Formula,
    ) -> Result<(), String> {
        let j = self.check(d).map_err(|e| e.to_string())?;
        for a in &j.assumptions {
            if !allowed.iter().any(|h| self.eq(h, a)) {
                return Err(format!("unexpected open assumption: {a:?}"));
            }
        }
        if !self.eq(&j.conclusion, goal) {
            return Err(format!("derivation proves {:?}, not {:?}", j.conclusion, goal));
        }
        Ok(())
    }
}

fn merge_assumptions(mut left: Vec<Formula>, right: Vec<Formula>) -> Vec<Formula> {
    for f in right {
        if !left.iter().any(|g| g.alpha_eq(&f)) {
            left.push(f);
        }
    }
    left
}

// ---------------------------------------------------------------------------
// Meta-operations: derivations are schematic in their free predicate
// variables and open assumptions, and can be specialized after the fact.
// ---------------------------------------------------------------------------

impl Derivation {
    /// Substitutes predicates for free predicate variables throughout the
    /// tree, including inside axiom parameters. The checker re-verifies
    /// everything afterwards, so an inadmissible substitution surfaces there
    /// or here.
    pub fn subst_pvars(&self, map: &PredSubst) -> Result<Derivation, LogicError> {
        Ok(match self {
            Derivation::Assume(f) => Derivation::Assume(f.subst_pvars(map)?),
            Derivation::Axiom(kind) => Derivation::Axiom(subst_axiom(kind, map)?),
            Derivation::ImpIntro { hyp, body } => Derivation::ImpIntro {
                hyp: hyp.subst_pvars(map)?,
                body: Arc::new(body.subst_pvars(map)?),
            },
            Derivation::ImpElim { fun, arg } => Derivation::ImpElim {
                fun: Arc::new(fun.subst_pvars(map)?),
                arg: Arc::new(arg.subst_pvars(map)?),
            },
            Derivation::AllIntro { v, body } => Derivation::AllIntro {
                v: v.clone(),
                body: Arc::new(body.subst_pvars(map)?),
            },
            Derivation::AllElim { body, term } => Derivation::AllElim {
                body: Arc::new(body.subst_pvars(map)?),
                term: term.clone(),
            },
        })
    }

    /// Replaces every `Assume` leaf equal (up to renaming of bound
    /// variables) to `hyp` by the derivation `proof`, turning an assumption
    /// into a lemma application.
    pub fn graft(&self, hyp: &Formula, proof: &Derivation) -> Derivation {
        match self {
            Derivation::Assume(f) if f.alpha_eq(hyp) => proof.clone(),
            Derivation::Assume(_) | Derivation::Axiom(_) => self.clone(),
            Derivation::ImpIntro { hyp: h, body } => Derivation::ImpIntro {
                hyp: h.clone(),
                body: Arc::new(body.graft(hyp, proof)),
            },
            Derivation::ImpElim { fun, arg } => Derivation::ImpElim {
                fun: Arc::new(fun.graft(hyp, proof)),
                arg: Arc::new(arg.graft(hyp, proof)),
            },
            Derivation::AllIntro { v, body } => Derivation::AllIntro {
                v: v.clone(),
                body: Arc::new(body.graft(hyp, proof)),
            },
            Derivation::AllElim { body, term } => Derivation::AllElim {
                body: Arc::new(body.graft(hyp, proof)),
                term: term.clone(),
            },
        }
    }

    /// Substitutes terms for free term variables. Binders in the tree must
    /// be disjoint from the substitution's domain and the free variables of
    /// its range (generators use globally fresh names, so this never
    /// triggers in practice).
    pub fn subst_terms(&self, map: &TermSubst) -> Result<Derivation, LogicError> {
        Ok(match self {
            Derivation::Assume(f) => Derivation::Assume(f.subst_terms(map)),
            Derivation::Axiom(kind) => Derivation::Axiom(subst_axiom_terms(kind, map)?),
            Derivation::ImpIntro { hyp, body } => Derivation::ImpIntro {
                hyp: hyp.subst_terms(map),
                body: Arc::new(body.subst_terms(map)?),
            },
            Derivation::ImpElim { fun, arg } => Derivation::ImpElim {
                fun: Arc::new(fun.subst_terms(map)?),
                arg: Arc::new(arg.subst_terms(map)?),
            },
            Derivation::AllIntro { v, body } => {
                if map.contains_key(&v.name)
                    || map.values().any(|t| t.free_vars().contains(&v.name))
                {
                    return Err(LogicError::Other(format!(
                        "term substitution clashes with bound variable `{}`",
                        v.name
                    )));
                }
                Derivation::AllIntro { v: v.clone(), body: Arc::new(body.subst_terms(map)?) }
            }
            Derivation::AllElim { body, term } => Derivation::AllElim {
                body: Arc::new(body.subst_terms(map)?),
                term: term.subst(map),
            },
        })
    }

    /// Number of nodes; a rough size measure for reports.
    pub fn size(&self) -> usize {
        match self {
            Derivation::Assume(_) | Derivation::Axiom(_) => 1,
            Derivation::ImpIntro { body, .. }
            | Derivation::AllIntro { body, .. }
            | Derivation::AllElim { body, .. } => 1 + body.size(),
            Derivation::ImpElim { fun, arg } => 1 + fun.size() + arg.size(),
        }
    }
}

fn subst_fix(
    fix: &Arc<crate::logic::FixPred>,
    map: &PredSubst,
) -> Result<Arc<crate::logic::FixPred>, LogicError> {
    match Predicate::Fix(fix.clone()).subst_pvars(map)? {
        Predicate::Fix(f) => Ok(f),
        _ => unreachable!("substitution preserves the predicate constructor"),
    }
}

fn subst_axiom(kind: &AxiomKind, map: &PredSubst) -> Result<AxiomKind, LogicError> {
    Ok(match kind {
        AxiomKind::ConjIntro { a, b } => AxiomKind::ConjIntro {
            a: a.subst_pvars(map)?,
            b: b.subst_pvars(map)?,
        },
        AxiomKind::ConjElim0 { a, b } => AxiomKind::ConjElim0 {
            a: a.subst_pvars(map)?,
            b: b.subst_pvars(map)?,
        },
        AxiomKind::ConjElim1 { a, b } => AxiomKind::ConjElim1 {
            a: a.subst_pvars(map)?,
            b: b.subst_pvars(map)?,
        },
        AxiomKind::DisjIntro0 { a, b } => AxiomKind::DisjIntro0 {
            a: a.subst_pvars(map)?,
            b: b.subst_pvars(map)?,
        },
        AxiomKind::DisjIntro1 { a, b } => AxiomKind::DisjIntro1 {
            a: a.subst_pvars(map)?,
            b: b.subst_pvars(map)?,
        },
        AxiomKind::DisjElim { a, b, c } => AxiomKind::DisjElim {
            a: a.subst_pvars(map)?,
            b: b.subst_pvars(map)?,
            c: c.subst_pvars(map)?,
        },
        AxiomKind::ExIntro { v, body, witness } => AxiomKind::ExIntro {
            v: v.clone(),
            body: body.subst_pvars(map)?,
            witness: witness.clone(),
        },
        AxiomKind::ExElim { v, body, c } => AxiomKind::ExElim {
            v: v.clone(),
            body: body.subst_pvars(map)?,
            c: c.subst_pvars(map)?,
        },
        AxiomKind::FixIntroClause { fix, clause } => AxiomKind::FixIntroClause {
            fix: subst_fix(fix, map)?,
            clause: *clause,
        },
        AxiomKind::FixIntroOp { fix } => AxiomKind::FixIntroOp { fix: subst_fix(fix, map)? },
        AxiomKind::FixClosure { fix } => AxiomKind::FixClosure { fix: subst_fix(fix, map)? },
        AxiomKind::FixMu { fix, motive } => AxiomKind::FixMu {
            fix: subst_fix(fix, map)?,
            motive: motive.subst_pvars(map)?,
        },
        AxiomKind::FixNu { fix, motive } => AxiomKind::FixNu {
            fix: subst_fix(fix, map)?,
            motive: motive.subst_pvars(map)?,
        },
    })
}

fn subst_axiom_terms(kind: &AxiomKind, map: &TermSubst) -> Result<AxiomKind, LogicError> {
    let guard = |v: &Var| -> Result<(), LogicError> {
        if map.contains_key(&v.name) || map.values().any(|t| t.free_vars().contains(&v.name)) {
            return Err(LogicError::Other(format!(
                "term substitution clashes with bound variable `{}`",
                v.name
            )));
        }
        Ok(())
    };
    Ok(match kind {
        AxiomKind::ConjIntro { a, b } => AxiomKind::ConjIntro {
            a: a.subst_terms(map),
            b: b.subst_terms(map),
        },
        AxiomKind::ConjElim0 { a, b } => AxiomKind::ConjElim0 {
            a: a.subst_terms(map),
            b: b.subst_terms(map),
        },
        AxiomKind::ConjElim1 { a, b } => AxiomKind::ConjElim1 {
            a: a.subst_terms(map),
            b: b.subst_terms(map),
        },
        AxiomKind::DisjIntro0 { a, b } => AxiomKind::DisjIntro0 {
            a: a.subst_terms(map),
            b: b.subst_terms(map),
        },
        AxiomKind::DisjIntro1 { a, b } => AxiomKind::DisjIntro1 {
            a: a.subst_terms(map),
            b: b.subst_terms(map),
        },
        AxiomKind::DisjElim { a, b, c } => AxiomKind::DisjElim {
            a: a.subst_terms(map),
            b: b.subst_terms(map),
            c: c.subst_terms(map),
        },
        AxiomKind::ExIntro { v, body, witness } => {
            guard(v)?;
            AxiomKind::ExIntro {
                v: v.clone(),
                body: body.subst_terms(map),
                witness: witness.subst(map),
            }
        }
        AxiomKind::ExElim { v, body, c } => {
            guard(v)?;
            AxiomKind::ExElim {
                v: v.clone(),
                body: body.subst_terms(map),
                c: c.subst_terms(map),
            }
        }
        AxiomKind::FixIntroClause { .. }
        | AxiomKind::FixIntroOp { .. }
        | AxiomKind::FixClosure { .. } => kind.clone(),
        AxiomKind::FixMu { fix, motive } => AxiomKind::FixMu {
            fix: fix.clone(),
            motive: motive.subst_terms(map),
        },
        AxiomKind::FixNu { fix, motive } => AxiomKind::FixNu {
            fix: fix.clone(),
            motive: motive.subst_terms(map),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ev, ev_fix, nat, numeral, std_sig, suc};
    use crate::logic::{falsity, PVar};

    fn assume(f: Formula) -> Arc<Derivation> {
        Arc::new(Derivation::Assume(f))
    }

    #[test]
    fn identity_derivation_checks() {
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let a = ev().apply(vec![numeral(2)]);
        let d = Derivation::ImpIntro { hyp: a.clone(), body: assume(a.clone()) };
        ck.check_closed(&d, &imp(a.clone(), a)).unwrap();
    }

    #[test]
    fn four_is_even() {
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let fx = ev_fix();
        let zero = Derivation::Axiom(AxiomKind::FixIntroClause { fix: fx.clone(), clause: 0 });
        let step = |n: u64, prev: Derivation| Derivation::ImpElim {
            fun: Arc::new(Derivation::AllElim {
                body: Arc::new(Derivation::Axiom(AxiomKind::FixIntroClause {
                    fix: fx.clone(),
                    clause: 1,
                })),
                term: numeral(n),
            }),
            arg: Arc::new(prev),
        };
        let d = step(2, step(0, zero));
        ck.check_closed(&d, &ev().apply(vec![numeral(4)])).unwrap();
    }

    #[test]
    fn eigenvariable_violation_is_rejected() {
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let n = Var::new("n", nat());
        let a = ev().apply(vec![n.term()]);
        let d = Derivation::AllIntro { v: n, body: assume(a) };
        assert!(matches!(ck.check(&d), Err(ProofError::Eigenvariable { .. })));
    }

    #[test]
    fn normalization_bridges_computation_steps() {
        // `Ev (double 2)` and `Ev 4` are judgmentally equal.
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let double2 = Term::app(Term::pconst("double"), numeral(2));
        let hyp = ev().apply(vec![double2]);
        let want = imp(ev().apply(vec![numeral(4)]), falsity());
        let d = Derivation::ImpElim {
            fun: assume(want.clone()),
            arg: assume(hyp.clone()),
        };
        let j = ck.check(&d).unwrap();
        assert!(j.conclusion.alpha_eq(&falsity()));
        assert_eq!(j.assumptions.len(), 2);
    }

    #[test]
    fn ill_typed_instantiation_is_rejected() {
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let n = Var::new("n", nat());
        let d = Derivation::AllElim {
            body: Arc::new(Derivation::ImpIntro {
                hyp: falsity(),
                body: assume(falsity()),
            }),
            term: n.term(),
        };
        assert!(matches!(ck.check(&d), Err(ProofError::NotUniversal(_))));
        let d2 = Derivation::AllElim {
            body: Arc::new(Derivation::AllIntro {
                v: n.clone(),
                body: Arc::new(Derivation::ImpIntro {
                    hyp: ev().apply(vec![n.term()]),
                    body: assume(ev().apply(vec![n.term()])),
                }),
            }),
            term: Term::con("B", "tt", vec![]),
        };
        assert!(matches!(ck.check(&d2), Err(ProofError::InstanceType { .. })));
    }

    #[test]
    fn pvar_substitution_specializes_a_schematic_derivation() {
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let x = PVar::new("X", vec![nat()]);
        let n = Var::new("n", nat());
        let atom = Predicate::Var(x.clone()).apply(vec![n.term()]);
        // all n (X n -> X n), schematic in X
        let d = Derivation::AllIntro {
            v: n.clone(),
            body: Arc::new(Derivation::ImpIntro { hyp: atom.clone(), body: assume(atom.clone()) }),
        };
        let map: PredSubst = std::iter::once((x.key(), ev())).collect();
        let d2 = d.subst_pvars(&map).unwrap();
        let goal = all(
            n.clone(),
            imp(ev().apply(vec![n.term()]), ev().apply(vec![n.term()])),
        );
        ck.check_closed(&d2, &goal).unwrap();
    }

    #[test]
    fn grafting_closes_an_assumption() {
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let fx = ev_fix();
        let a = ev().apply(vec![numeral(0)]);
        let b = ev().apply(vec![numeral(2)]);
        // From assumption Ev 0, derive Ev 2; then graft the axiom for Ev 0.
        let open = Derivation::ImpElim {
            fun: Arc::new(Derivation::AllElim {
                body: Arc::new(Derivation::Axiom(AxiomKind::FixIntroClause {
                    fix: fx.clone(),
                    clause: 1,
                })),
                term: numeral(0),
            }),
            arg: assume(a.clone()),
        };
        assert_eq!(ck.check(&open).unwrap().assumptions.len(), 1);
        let closed = open.graft(
            &a,
            &Derivation::Axiom(AxiomKind::FixIntroClause { fix: fx, clause: 0 }),
        );
        ck.check_closed(&closed, &b).unwrap();
    }

    #[test]
    fn term_substitution_specializes_free_variables() {
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let m = Var::new("m", nat());
        let a = ev().apply(vec![m.term()]);
        let d = Derivation::ImpIntro { hyp: a.clone(), body: assume(a.clone()) };
        let map: TermSubst = crate::syntax::single("m", suc(numeral(0)));
        let d2 = d.subst_terms(&map).unwrap();
        let spec = ev().apply(vec![suc(numeral(0))]);
        ck.check_closed(&d2, &imp(spec.clone(), spec)).unwrap();
    }

    #[test]
    fn a_full_induction_proof_checks() {
        // Ev subseteq Ev, proved by induction with motive Ev itself.
        let sig = std_sig();
        let ck = Checker::new(&sig);
        let fx = ev_fix();
        let selfp = Predicate::Fix(fx.clone());
        let ind = Derivation::Axiom(AxiomKind::FixMu { fix: fx.clone(), motive: selfp.clone() });
        // Step 0: Ev 0, by the first intro clause.
        let step0 = Derivation::Axiom(AxiomKind::FixIntroClause { fix: fx.clone(), clause: 0 });
        // Step 1: all n (Ev n and Ev n -> Ev (S (S n))), from the second
        // intro clause plus conjunction elimination.
        let n = Var::new("n", nat());
        let evn_and_evn = crate::logic::and(
            selfp.apply(vec![n.term()]),
            selfp.apply(vec![n.term()]),
        );
        let step1 = Derivation::AllIntro {
            v: n.clone(),
            body: Arc::new(Derivation::ImpIntro {
                hyp: evn_and_evn.clone(),
                body: Arc::new(Derivation::ImpElim {
                    fun: Arc::new(Derivation::AllElim {
                        body: Arc::new(Derivation::Axiom(AxiomKind::FixIntroClause {
                            fix: fx.clone(),
                            clause: 1,
                        })),
                        term: n.term(),
                    }),
                    arg: Arc::new(Derivation::ImpElim {
                        fun: Arc::new(Derivation::Axiom(AxiomKind::ConjElim0 {
                            a: selfp.apply(vec![n.term()]),
                            b: selfp.apply(vec![n.term()]),
                        })),
                        arg: assume(evn_and_evn.clone()),
                    }),
                }),
            }),
        };
        let d = Derivation::ImpElim {
            fun: Arc::new(Derivation::ImpElim { fun: Arc::new(ind), arg: Arc::new(step0) }),
            arg: Arc::new(step1),
        };
        let z = Var::new("z", nat());
        let goal = all(
            z.clone(),
            imp(selfp.apply(vec![z.term()]), selfp.apply(vec![z.term()])),
        );
        ck.check_closed(&d, &goal).unwrap();
    }
}
