//! Normalization of partial terms: beta reduction plus computation rules,
//! leftmost-outermost, bounded by fuel.
//!
//! Fuel exhaustion is a status, not an error: terms such as a constant
//! defined by `inf = S inf` simply have no normal form and callers decide
//! what to do with the partially reduced term.

use crate::sig::Signature;
use crate::syntax::{single, Term};
use std::collections::HashMap;
use std::sync::Arc;

pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Normal,
    FuelExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Match {
    /// The pattern matches; bindings collected by the caller.
    Yes,
    No,
    /// The scrutinee's head is a redex; matching cannot be decided yet.
    Undecided,
}

/// Three-valued matching of a constructor pattern against a term.
pub fn match_pattern(
    pattern: &Term,
    term: &Term,
    bindings: &mut HashMap<String, Term>,
) -> Match {
    match pattern {
        Term::Var(v) => {
            bindings.insert(v.name.clone(), term.clone());
            Match::Yes
        }
        _ => {
            let (ph, pargs) = pattern.spine();
            let Term::Con { alg: pa, name: pn, ty_args: pt } = ph else {
                return Match::No;
            };
            let (th, targs) = term.spine();
            match th {
                Term::Con { alg: ta, name: tn, ty_args: tt } => {
                    if pa != ta || pn != tn || pt != tt || pargs.len() != targs.len() {
                        return Match::No;
                    }
                    for (p, t) in pargs.iter().zip(targs.iter()) {
                        match match_pattern(p, t, bindings) {
                            Match::Yes => {}
                            other => return other,
                        }
                    }
                    Match::Yes
                }
                Term::Var(_) => Match::No,
                // Abstraction or program-constant head: could still reduce
                // to a constructor.
                _ => Match::Undecided,
            }
        }
    }
}

pub struct Normalizer<'a> {
    pub sig: &'a Signature,
    pub fuel: u64,
}

impl<'a> Normalizer<'a> {
    pub fn new(sig: &'a Signature, fuel: u64) -> Self {
        Normalizer { sig, fuel }
    }

    fn spend(&mut self) -> bool {
        if self.fuel == 0 {
            false
        } else {
            self.fuel -= 1;
            true
        }
    }

    /// One head-reduction step at the root, if any. Returns `None` when the
    /// root is head-normal (or fuel ran out, flagged via `self.fuel`).
    fn head_step(&mut self, t: &Term) -> Option<Term> {
        let (head, args) = t.spine();
        match head {
            Term::Abs(v, b) if !args.is_empty() => {
                if !self.spend() {
                    return None;
                }
                let reduced = b.subst(&single(&v.name, args[0].clone()));
                Some(Term::apps(reduced, args[1..].iter().map(|a| (*a).clone())))
            }
            Term::PConst { name } => {
                let def = self.sig.consts.get(name)?.clone();
                self.delta_step(&def, t, &args)
            }
            _ => None,
        }
    }

    fn delta_step(
        &mut self,
        def: &Arc<crate::sig::ConstDef>,
        whole: &Term,
        args: &[&Term],
    ) -> Option<Term> {
        'rules: for rule in &def.rules {
            if args.len() < rule.patterns.len() {
                continue;
            }
            let mut args_owned: Vec<Term> = args.iter().map(|a| (*a).clone()).collect();
            let mut bindings = HashMap::new();
            for (i, _) in rule.patterns.iter().enumerate() {
                loop {
                    bindings.clear();
                    // Re-match the whole prefix so bindings are consistent.
                    let mut ok = Match::Yes;
                    for (q, a) in rule.patterns[..=i].iter().zip(args_owned.iter()) {
                        match match_pattern(q, a, &mut bindings) {
                            Match::Yes => {}
                            Match::No => {
                                ok = Match::No;
                                break;
                            }
                            Match::Undecided => {
                                ok = Match::Undecided;
                                break;
                            }
                        }
                    }
                    match ok {
                        Match::Yes => break,
                        Match::No => continue 'rules,
                        Match::Undecided => {
                            // Reduce the undecided argument one step and retry.
                            match self.head_step(&args_owned[i]) {
                                Some(t2) => args_owned[i] = t2,
                                None => {
                                    if self.fuel == 0 {
                                        return None;
                                    }
                                    // Argument is head-normal but not a
                                    // constructor form: rule does not apply.
                                    continue 'rules;
                                }
                            }
                        }
                    }
                }
            }
            if !self.spend() {
                return None;
            }
            let rhs = rule.rhs.subst(&bindings);
            let rest = args_owned[rule.patterns.len()..].iter().cloned();
            return Some(Term::apps(rhs, rest));
        }
        // No rule applies; but argument reductions performed above are lost —
        // that is fine, they will be redone by the full normalizer.
        let _ = whole;
        None
    }

    /// Full normalization (also under binders), leftmost-outermost.
    pub fn normalize(&mut self, t: &Term) -> (Term, Status) {
        let mut cur = t.clone();
        loop {
            if self.fuel == 0 {
                return (cur, Status::FuelExhausted);
            }
            match self.head_step(&cur) {
                Some(next) => cur = next,
                None => {
                    if self.fuel == 0 {
                        return (cur, Status::FuelExhausted);
                    }
                    break;
                }
            }
        }
        // Head-normal: normalize subterms.
        match cur {
            Term::Var(_) | Term::Con { .. } | Term::PConst { .. } => (cur, Status::Normal),
            Term::Abs(v, b) => {
                let (nb, st) = self.normalize(&b);
                (Term::abs(v, nb), st)
            }
            Term::App(f, a) => {
                let (nf, s1) = self.normalize(&f);
                let (na, s2) = self.normalize(&a);
                let st = if s1 == Status::Normal && s2 == Status::Normal {
                    Status::Normal
                } else {
                    Status::FuelExhausted
                };
                (Term::app(nf, na), st)
            }
        }
    }
}

pub fn normalize(sig: &Signature, t: &Term, fuel: u64) -> (Term, Status) {
    Normalizer::new(sig, fuel).normalize(t)
}

pub fn normalize_default(sig: &Signature, t: &Term) -> (Term, Status) {
    normalize(sig, t, DEFAULT_FUEL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{numeral, std_sig};
    use crate::syntax::{Term, Type, Var};

    #[test]
    fn beta_reduces() {
        let sig = std_sig();
        let nat = Type::alg("N");
        let id = Term::abs(Var::new("x", nat.clone()), Term::var("x", nat.clone()));
        let t = Term::app(id, numeral(3));
        let (n, st) = normalize_default(&sig, &t);
        assert_eq!(st, Status::Normal);
        assert!(n.alpha_eq(&numeral(3)));
    }

    #[test]
    fn fuel_exhaustion_is_a_status() {
        let sig = std_sig();
        let (t, st) = normalize(&sig, &Term::pconst("inf"), 50);
        assert_eq!(st, Status::FuelExhausted);
        // The partial result is an S-tower around `inf`.
        let (head, _) = t.spine();
        assert!(matches!(head, Term::Con { .. } | Term::PConst { .. }));
    }

    #[test]
    fn undecided_argument_gets_reduced_first() {
        // double (id 2) must evaluate id 2 before matching S-patterns.
        let sig = std_sig();
        let nat = Type::alg("N");
        let id = Term::abs(Var::new("x", nat.clone()), Term::var("x", nat.clone()));
        let t = Term::app(
            Term::pconst("double"),
            Term::app(id, numeral(2)),
        );
        let (n, st) = normalize_default(&sig, &t);
        assert_eq!(st, Status::Normal);
        assert!(n.alpha_eq(&numeral(4)), "{n:?}");
    }

    #[test]
    fn match_is_three_valued() {
        let sig = std_sig();
        let _ = &sig;
        let nat = Type::alg("N");
        let zero = Term::con("N", "0", vec![]);
        let svar = Term::app(Term::con("N", "S", vec![]), Term::var("n", nat.clone()));
        let mut b = HashMap::new();
        assert_eq!(match_pattern(&zero, &zero, &mut b), Match::Yes);
        assert_eq!(match_pattern(&svar, &zero, &mut b), Match::No);
        let id = Term::abs(Var::new("x", nat.clone()), Term::var("x", nat.clone()));
        let redex = Term::app(id, zero.clone());
        assert_eq!(match_pattern(&zero, &redex, &mut b), Match::Undecided);
    }
}
