//! A kernel for a minimal-logic theory of computable functionals: partial
//! terms over free algebras with computation rules, inductive and coinductive
//! predicates, a strong-negation transform, generated axiom schemes, a
//! natural-deduction proof checker with mechanized scheme derivations, and a
//! finite-model evaluator for counterexample search.

pub mod axioms;
pub mod corpus;
pub mod dsl;
pub mod gen;
pub mod logic;
pub mod negation;
pub mod oracle;
pub mod parse;
pub mod cli;
pub mod print;
pub mod proof;
pub mod rewrite;
pub mod sig;
pub mod syntax;
