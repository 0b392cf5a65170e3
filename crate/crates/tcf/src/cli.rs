//! Command-line surface: parses inputs, delegates to the kernel, and emits
//! one JSON report per invocation on standard output.
//!
//! Exit codes: 0 success, 1 refutation or countermodel found, 2 error.

use crate::corpus;
use crate::dsl::GenCtx;
use crate::logic::{falsity, Flavor, Formula, PVar, Predicate};
use crate::negation;
use crate::oracle::{self, Interpretation, RegArg, Universe};
use crate::parse::{
    self, parse_derivation_text, parse_formula, parse_signature_file, SignatureFile,
};
use crate::print::{fix_to_string, formula_to_string};
use crate::proof::Checker;
use crate::sig::Signature;
use crate::syntax::Type;
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Environment variable naming a directory of `.sig` files whose named
/// formulas serve as the default batch-proving corpus.
pub const CORPUS_DIR_ENV: &str = "TCF_CORPUS_DIR";

#[derive(Parser)]
#[command(name = "tcf", version, about = "Strong negation, tightness and \
finite-model tooling for inductive/coinductive predicate logic")]
struct Cli {
    /// Signature file adding algebras, constants, predicates, predicate
    /// variables and named formulas on top of the built-in signature.
    #[arg(long, global = true)]
    sig: Option<PathBuf>,

    /// Predicate-variable declaration like `X[N]` (repeatable).
    #[arg(long = "pvar", global = true)]
    pvars: Vec<String>,

    /// Budget for program-constant rewriting during evaluation.
    #[arg(long, global = true, default_value_t = 100_000)]
    fuel: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Strong negation of a named predicate or of a formula.
    Negate {
        #[arg(long)]
        pred: Option<String>,
        #[arg(long)]
        formula: Option<String>,
    },
    /// Flavor-dual of a fixpoint predicate: the same clauses read as a
    /// greatest instead of least fixpoint, or vice versa.
    Dualize {
        #[arg(long)]
        pred: String,
    },
    /// Axiom schemes: introduction/closure axioms of a fixpoint predicate,
    /// or per-variable hypothesis schemes for a formula.
    Axioms {
        #[arg(long)]
        pred: Option<String>,
        #[arg(long)]
        formula: Option<String>,
        /// One of ef, efq, dne, stab, tight (with --formula).
        #[arg(long)]
        scheme: Option<String>,
        /// Target formula of the ef scheme (default F).
        #[arg(long)]
        aux: Option<String>,
    },
    /// Generate a derivation for a lemma and check it.
    /// Lemmas: leibniz, efq, ef, stab, dne, strong-to-weak, tight.
    Prove {
        lemma: String,
        #[arg(long)]
        formula: Option<String>,
        /// Secondary formula where the lemma takes two (ef).
        #[arg(long)]
        aux: Option<String>,
        /// Include the derivation text in the report.
        #[arg(long)]
        emit: bool,
    },
    /// Check a derivation file (line-oriented text, or JSON if the file
    /// starts with `{`) and report the judgment it proves.
    Check { derivation: PathBuf },
    /// Tight translation of a formula, with the derivation showing the
    /// translation is tight from per-variable tightness hypotheses.
    Tight {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        emit: bool,
    },
    /// Evaluate a closed formula or a predicate extension in a finite
    /// universe described by a JSON file.
    Eval {
        universe: PathBuf,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        pred: Option<String>,
    },
    /// Search for a finite countermodel of a schema over nullary predicate
    /// variables (`n` is strong negation: `"A -> n (n A)"`).
    Counterexample {
        schema: String,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    status: &'static str,
    #[serde(flatten)]
    data: T,
}

fn emit<T: Serialize>(command: &'static str, status: &'static str, data: T) {
    let r = Report { command, status, data };
    println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
}

fn fail(command: &'static str, msg: impl std::fmt::Display) -> i32 {
    #[derive(Serialize)]
    struct E {
        error: String,
    }
    emit(command, "error", E { error: msg.to_string() });
    EXIT_ERROR
}

/// Entry point for the `tcf` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(code) => code,
        Err((cmd, msg)) => fail(cmd, msg),
    }
}

type CmdErr = (&'static str, String);

fn e<T>(cmd: &'static str, r: Result<T, impl std::fmt::Display>) -> Result<T, CmdErr> {
    r.map_err(|x| (cmd, x.to_string()))
}

fn run_cli(cli: Cli) -> Result<i32, CmdErr> {
    // Start from the built-in signature; a --sig file extends it.
    let mut sf = SignatureFile {
        sig: corpus::std_sig(),
        pvars: Vec::new(),
        formulas: indexmap::IndexMap::new(),
    };
    let cmd = command_name(&cli.cmd);
    if let Some(path) = &cli.sig {
        let text = e(cmd, std::fs::read_to_string(path))?;
        let extra = e(cmd, parse_signature_file(&text))?;
        merge_signature_file(&mut sf, extra);
    }
    for raw in &cli.pvars {
        sf.pvars.push(e(cmd, parse::parse_pvar_decl(&sf.sig, raw))?);
    }
    // Negated fixpoints print by name; make those names resolvable.
    register_negations(&mut sf.sig);

    match &cli.cmd {
        Cmd::Negate { pred, formula } => cmd_negate(&sf, pred, formula),
        Cmd::Dualize { pred } => cmd_dualize(&sf, pred),
        Cmd::Axioms { pred, formula, scheme, aux } => {
            cmd_axioms(&sf, pred, formula, scheme, aux)
        }
        Cmd::Prove { lemma, formula, aux, emit } => {
            cmd_prove(&sf, lemma, formula, aux, *emit)
        }
        Cmd::Check { derivation } => cmd_check(&sf, derivation),
        Cmd::Tight { formula, emit } => cmd_tight(&sf, formula, *emit),
        Cmd::Eval { universe, formula, pred } => {
            cmd_eval(&sf, universe, formula, pred, cli.fuel)
        }
        Cmd::Counterexample { schema, max_size, budget } => {
            cmd_counterexample(&sf, schema, *max_size, *budget)
        }
    }
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Negate { .. } => "negate",
        Cmd::Dualize { .. } => "dualize",
        Cmd::Axioms { .. } => "axioms",
        Cmd::Prove { .. } => "prove",
        Cmd::Check { .. } => "check",
        Cmd::Tight { .. } => "tight",
        Cmd::Eval { .. } => "eval",
        Cmd::Counterexample { .. } => "counterexample",
    }
}

fn merge_signature_file(base: &mut SignatureFile, extra: SignatureFile) {
    for alg in extra.sig.algebras.values() {
        if !base.sig.algebras.contains_key(&alg.name) {
            let _ = base.sig.add_algebra(alg.as_ref().clone());
        }
    }
    for c in extra.sig.consts.values() {
        if !base.sig.consts.contains_key(&c.name) {
            let _ = base.sig.add_const(c.as_ref().clone());
        }
    }
    for (name, p) in &extra.sig.preds {
        base.sig.add_pred(name, p.clone());
    }
    base.pvars.extend(extra.pvars);
    base.formulas.extend(extra.formulas);
}

/// Registers the strong negations (and double negations) of every named
/// fixpoint predicate so printed derivations resolve by name.
fn register_negations(sig: &mut Signature) {
    let named: Vec<(String, Predicate)> =
        sig.preds.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    for (_, p) in named {
        for q in [negation::neg_predicate(&p)] {
            if let Predicate::Fix(fx) = &q {
                if !fx.name.is_empty() && !sig.preds.contains_key(&fx.name) {
                    sig.add_pred(&fx.name.clone(), q.clone());
                }
                let qq = negation::neg_predicate(&q);
                if let Predicate::Fix(fx2) = &qq {
                    if !fx2.name.is_empty() && !sig.preds.contains_key(&fx2.name) {
                        sig.add_pred(&fx2.name.clone(), qq.clone());
                    }
                }
            }
        }
    }
}

fn get_fix(
    sf: &SignatureFile,
    name: &str,
    cmd: &'static str,
) -> Result<std::sync::Arc<crate::logic::FixPred>, CmdErr> {
    match sf.sig.preds.get(name) {
        Some(Predicate::Fix(fx)) => Ok(fx.clone()),
        Some(_) => Err((cmd, format!("{name} is not a fixpoint predicate"))),
        None => Err((cmd, format!("unknown predicate {name}"))),
    }
}

fn parse_f(sf: &SignatureFile, text: &str, cmd: &'static str) -> Result<Formula, CmdErr> {
    e(cmd, parse_formula(&sf.sig, &sf.pvars, text))
}

// ---------------------------------------------------------------------------
// negate / dualize / axioms
// ---------------------------------------------------------------------------

fn cmd_negate(
    sf: &SignatureFile,
    pred: &Option<String>,
    formula: &Option<String>,
) -> Result<i32, CmdErr> {
    #[derive(Serialize)]
    struct Out {
        input: String,
        negated: String,
    }
    match (pred, formula) {
        (Some(name), None) => {
            let fx = get_fix(sf, name, "negate")?;
            let nfx = negation::neg_fix(&fx);
            emit(
                "negate",
                "ok",
                Out { input: fix_to_string(&fx), negated: fix_to_string(&nfx) },
            );
            Ok(EXIT_OK)
        }
        (None, Some(text)) => {
            let f = parse_f(sf, text, "negate")?;
            let nf = negation::neg_formula(&f);
            emit(
                "negate",
                "ok",
                Out { input: formula_to_string(&f), negated: formula_to_string(&nf) },
            );
            Ok(EXIT_OK)
        }
        _ => Err(("negate", "pass exactly one of --pred or --formula".into())),
    }
}

fn cmd_dualize(sf: &SignatureFile, pred: &str) -> Result<i32, CmdErr> {
    let fx = get_fix(sf, pred, "dualize")?;
    let flavor = match fx.flavor {
        Flavor::Mu => Flavor::Nu,
        Flavor::Nu => Flavor::Mu,
    };
    let dual = match &fx.def {
        crate::logic::FixDef::Clauses(cs) => e(
            "dualize",
            crate::logic::mk_fix(flavor, &fx.name, fx.pvar.clone(), cs.clone()),
        )?,
        crate::logic::FixDef::Op { vars, body } => e(
            "dualize",
            crate::logic::mk_fix_op(flavor, &fx.name, fx.pvar.clone(), vars.clone(), body.clone()),
        )?,
    };
    #[derive(Serialize)]
    struct Out {
        input: String,
        dual: String,
    }
    emit("dualize", "ok", Out { input: fix_to_string(&fx), dual: fix_to_string(&dual) });
    Ok(EXIT_OK)
}

fn cmd_axioms(
    sf: &SignatureFile,
    pred: &Option<String>,
    formula: &Option<String>,
    scheme: &Option<String>,
    aux: &Option<String>,
) -> Result<i32, CmdErr> {
    use crate::axioms::{dne_hyp, ef_hyp, efq_hyp, instantiate, stab_hyp, tight_hyp, AxiomKind};
    #[derive(Serialize)]
    struct Entry {
        kind: String,
        formula: String,
    }
    #[derive(Serialize)]
    struct Out {
        axioms: Vec<Entry>,
    }
    let mut axioms = Vec::new();
    match (pred, formula) {
        (Some(name), None) => {
            let fx = get_fix(sf, name, "axioms")?;
            match (&fx.flavor, &fx.def) {
                (Flavor::Mu, crate::logic::FixDef::Clauses(cs)) => {
                    for i in 0..cs.len() {
                        let k = AxiomKind::FixIntroClause { fix: fx.clone(), clause: i };
                        axioms.push(Entry {
                            kind: format!("intro-clause-{i}"),
                            formula: formula_to_string(&e("axioms", instantiate(&k))?),
                        });
                    }
                }
                (Flavor::Mu, crate::logic::FixDef::Op { .. }) => {
                    let k = AxiomKind::FixIntroOp { fix: fx.clone() };
                    axioms.push(Entry {
                        kind: "intro-op".into(),
                        formula: formula_to_string(&e("axioms", instantiate(&k))?),
                    });
                }
                (Flavor::Nu, _) => {
                    let k = AxiomKind::FixClosure { fix: fx.clone() };
                    axioms.push(Entry {
                        kind: "closure".into(),
                        formula: formula_to_string(&e("axioms", instantiate(&k))?),
                    });
                }
            }
        }
        (None, Some(text)) => {
            let f = parse_f(sf, text, "axioms")?;
            let scheme = scheme.as_deref().unwrap_or("dne");
            let b = match aux {
                Some(t) => parse_f(sf, t, "axioms")?,
                None => falsity(),
            };
            for x in crate::gen::free_pvar_list(&f) {
                let (kind, hyp) = match scheme {
                    "ef" => ("ef", ef_hyp(&x, &b)),
                    "efq" => ("efq", efq_hyp(&x)),
                    "dne" => ("dne", dne_hyp(&x)),
                    "stab" => ("stab", stab_hyp(&x)),
                    "tight" => ("tight", tight_hyp(&x)),
                    other => return Err(("axioms", format!("unknown scheme {other}"))),
                };
                axioms.push(Entry { kind: kind.into(), formula: formula_to_string(&hyp) });
            }
        }
        _ => return Err(("axioms", "pass exactly one of --pred or --formula".into())),
    }
    emit("axioms", "ok", Out { axioms });
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// prove / check / tight
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ProofEntry {
    target: String,
    formula: String,
    conclusion: String,
    hypotheses: Vec<String>,
    checked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivation: Option<String>,
}

/// The batch target list: named formulas from the signature file, else from
/// every `.sig` file in `TCF_CORPUS_DIR`, else the built-in samples.
fn batch_targets(sf: &SignatureFile) -> Result<Vec<(String, Formula)>, CmdErr> {
    if !sf.formulas.is_empty() {
        return Ok(sf.formulas.iter().map(|(k, v)| (k.clone(), v.clone())).collect());
    }
    if let Ok(dir) = std::env::var(CORPUS_DIR_ENV) {
        let mut files: Vec<PathBuf> = e(
            "prove",
            std::fs::read_dir(&dir).map(|rd| {
                rd.filter_map(|x| x.ok())
                    .map(|x| x.path())
                    .filter(|p| p.extension().is_some_and(|x| x == "sig"))
                    .collect::<Vec<_>>()
            }),
        )?;
        files.sort();
        let mut out = Vec::new();
        for path in files {
            let text = e("prove", std::fs::read_to_string(&path))?;
            let one = e("prove", parse_signature_file(&text))?;
            let stem = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
            for (name, f) in one.formulas {
                out.push((format!("{stem}:{name}"), f));
            }
        }
        if !out.is_empty() {
            return Ok(out);
        }
    }
    Ok(corpus::sample_formulas())
}

fn check_entry(
    sig: &Signature,
    target: &str,
    formula: &Formula,
    d: &crate::proof::Derivation,
    emit_text: bool,
) -> Result<ProofEntry, CmdErr> {
    let j = e("prove", Checker::new(sig).check(d))?;
    Ok(ProofEntry {
        target: target.to_string(),
        formula: formula_to_string(formula),
        conclusion: formula_to_string(&j.conclusion),
        hypotheses: j.assumptions.iter().map(formula_to_string).collect(),
        checked: true,
        derivation: emit_text.then(|| parse::derivation_to_text(d)),
    })
}

fn cmd_prove(
    sf: &SignatureFile,
    lemma: &str,
    formula: &Option<String>,
    aux: &Option<String>,
    emit_text: bool,
) -> Result<i32, CmdErr> {
    #[derive(Serialize)]
    struct Out {
        lemma: String,
        entries: Vec<ProofEntry>,
    }
    let ctx = GenCtx::new();
    let targets: Vec<(String, Formula)> = match formula {
        Some(text) => vec![("arg".into(), parse_f(sf, text, "prove")?)],
        None => batch_targets(sf)?,
    };
    let mut entries = Vec::new();
    let mut sig = sf.sig.clone();
    for (name, a) in &targets {
        match lemma {
            "leibniz" => {
                let (d_false, d_equiv) = crate::gen::gen_leibniz(&ctx, a);
                for (tag, d) in [("falsity", d_false), ("equivalence", d_equiv)] {
                    let entry = check_entry(&sig, &format!("{name}:{tag}"), a, &d, emit_text)?;
                    if !entry.hypotheses.is_empty() {
                        return Err(("prove", format!("{name}: {tag} proof is not closed")));
                    }
                    entries.push(entry);
                }
            }
            "efq" => {
                let d = e("prove", crate::gen::gen_efq(&ctx, &mut sig, a))?;
                entries.push(check_entry(&sig, name, a, &d, emit_text)?);
            }
            "ef" => {
                let b = match aux {
                    Some(t) => parse_f(sf, t, "prove")?,
                    None => falsity(),
                };
                let d = e("prove", crate::gen::gen_ef(&ctx, &mut sig, a, &b))?;
                entries.push(check_entry(&sig, name, a, &d, emit_text)?);
            }
            "stab" => {
                let d = e("prove", crate::gen::gen_stab(&ctx, a))?;
                entries.push(check_entry(&sig, name, a, &d, emit_text)?);
            }
            "dne" => {
                let d = e("prove", crate::gen::gen_dne(&ctx, &mut sig, a))?;
                entries.push(check_entry(&sig, name, a, &d, emit_text)?);
            }
            "strong-to-weak" => {
                let d = e("prove", crate::gen::gen_strong_to_weak(&ctx, a))?;
                entries.push(check_entry(&sig, name, a, &d, emit_text)?);
            }
            "tight" => {
                let d = e("prove", crate::gen::gen_tight_translate(&ctx, a))?;
                entries.push(check_entry(&sig, name, a, &d, emit_text)?);
            }
            other => return Err(("prove", format!("unknown lemma {other}"))),
        }
    }
    emit("prove", "ok", Out { lemma: lemma.to_string(), entries });
    Ok(EXIT_OK)
}

fn cmd_check(sf: &SignatureFile, path: &PathBuf) -> Result<i32, CmdErr> {
    let text = e("check", std::fs::read_to_string(path))?;
    let d: crate::proof::Derivation = if text.trim_start().starts_with('{') {
        e("check", serde_json::from_str(&text))?
    } else {
        e("check", parse_derivation_text(&sf.sig, &sf.pvars, &text))?
    };
    let j = e("check", Checker::new(&sf.sig).check(&d))?;
    #[derive(Serialize)]
    struct Out {
        conclusion: String,
        hypotheses: Vec<String>,
    }
    emit(
        "check",
        "ok",
        Out {
            conclusion: formula_to_string(&j.conclusion),
            hypotheses: j.assumptions.iter().map(formula_to_string).collect(),
        },
    );
    Ok(EXIT_OK)
}

fn cmd_tight(sf: &SignatureFile, formula: &str, emit_text: bool) -> Result<i32, CmdErr> {
    let a = parse_f(sf, formula, "tight")?;
    let at = negation::tight_translate(&a);
    let ctx = GenCtx::new();
    let d = e("tight", crate::gen::gen_tight_translate(&ctx, &a))?;
    let j = e("tight", Checker::new(&sf.sig).check(&d))?;
    #[derive(Serialize)]
    struct Out {
        input: String,
        translated: String,
        conclusion: String,
        hypotheses: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        derivation: Option<String>,
    }
    emit(
        "tight",
        "ok",
        Out {
            input: formula_to_string(&a),
            translated: formula_to_string(&at),
            conclusion: formula_to_string(&j.conclusion),
            hypotheses: j.assumptions.iter().map(formula_to_string).collect(),
            derivation: emit_text.then(|| parse::derivation_to_text(&d)),
        },
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// eval / counterexample
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct UniverseSpec {
    /// Base types whose carrier to populate, as type expressions.
    types: Vec<String>,
    #[serde(default = "default_depth")]
    core_depth: usize,
    #[serde(default = "default_depth")]
    margin: usize,
    /// Cyclic regular elements, e.g. `{"ty": "N", "con": "S", "args": ["self"]}`.
    #[serde(default)]
    regular: Vec<RegularSpec>,
    /// Types that get a designated partial element.
    #[serde(default)]
    partial: Vec<String>,
    /// Interpretations of predicate variables.
    #[serde(default)]
    pvars: Vec<PvarSpec>,
    /// Read primed variables as complements of their unprimed base.
    #[serde(default)]
    complement_primes: bool,
}

fn default_depth() -> usize {
    5
}

#[derive(serde::Deserialize)]
struct RegularSpec {
    ty: String,
    con: String,
    /// Each entry is `"self"` or a closed term.
    args: Vec<String>,
}

#[derive(serde::Deserialize)]
struct PvarSpec {
    name: String,
    #[serde(default)]
    primes: u32,
    arity: Vec<String>,
    /// Tuples of closed terms.
    tuples: Vec<Vec<String>>,
}

fn build_universe(
    sf: &SignatureFile,
    spec: &UniverseSpec,
    fuel: u64,
) -> Result<(Universe, Interpretation), CmdErr> {
    const C: &str = "eval";
    let mut uni = Universe::new();
    for t in &spec.types {
        let ty = e(C, parse::parse_type(&sf.sig, t))?;
        e(C, uni.add_carrier(&sf.sig, &ty, spec.core_depth, spec.margin))?;
    }
    let empty = Interpretation { pvars: BTreeMap::new(), complement_primes: false };
    for r in &spec.regular {
        let ty = e(C, parse::parse_type(&sf.sig, &r.ty))?;
        let mut args = Vec::new();
        for a in &r.args {
            if a == "self" {
                args.push(RegArg::SelfRef);
            } else {
                let term = e(C, parse::parse_term(&sf.sig, a, None))?;
                let mut ev = oracle::Evaluator::new(&sf.sig, &mut uni, &empty);
                ev.fuel = fuel;
                let id = e(C, ev.eval_term(&term, &mut Default::default()))?;
                args.push(RegArg::Elem(id));
            }
        }
        uni.add_regular(&ty, &r.con, args);
    }
    for t in &spec.partial {
        let ty = e(C, parse::parse_type(&sf.sig, t))?;
        uni.add_partial(&ty);
    }
    let mut interp =
        Interpretation { pvars: BTreeMap::new(), complement_primes: spec.complement_primes };
    for pv in &spec.pvars {
        let arity: Vec<Type> = pv
            .arity
            .iter()
            .map(|t| parse::parse_type(&sf.sig, t))
            .collect::<Result<_, _>>()
            .map_err(|x| (C, x.to_string()))?;
        let mut rel = oracle::Rel::new();
        for tuple in &pv.tuples {
            if tuple.len() != arity.len() {
                return Err((C, format!("tuple arity mismatch for {}", pv.name)));
            }
            let mut ids = Vec::new();
            for (txt, ty) in tuple.iter().zip(&arity) {
                let term = e(C, parse::parse_term(&sf.sig, txt, Some(ty)))?;
                let mut ev = oracle::Evaluator::new(&sf.sig, &mut uni, &empty);
                ev.fuel = fuel;
                ids.push(e(C, ev.eval_term(&term, &mut Default::default()))?);
            }
            rel.insert(ids);
        }
        interp.pvars.insert((pv.name.clone(), pv.primes), rel);
    }
    Ok((uni, interp))
}

fn cmd_eval(
    sf: &SignatureFile,
    universe: &PathBuf,
    formula: &Option<String>,
    pred: &Option<String>,
    fuel: u64,
) -> Result<i32, CmdErr> {
    const C: &str = "eval";
    let text = e(C, std::fs::read_to_string(universe))?;
    let spec: UniverseSpec = e(C, serde_json::from_str(&text))?;
    let (mut uni, interp) = build_universe(sf, &spec, fuel)?;
    match (formula, pred) {
        (Some(txt), None) => {
            let f = parse_f(sf, txt, C)?;
            let free = oracle::free_typed_vars(&f);
            if !free.is_empty() {
                return Err((C, "formula must be closed (quantify free variables)".into()));
            }
            let mut ev = oracle::Evaluator::new(&sf.sig, &mut uni, &interp);
            ev.fuel = fuel;
            let value = e(C, ev.eval_closed(&f))?;
            #[derive(Serialize)]
            struct Out {
                formula: String,
                value: bool,
            }
            emit(C, if value { "ok" } else { "refuted" }, Out {
                formula: formula_to_string(&f),
                value,
            });
            Ok(if value { EXIT_OK } else { EXIT_REFUTED })
        }
        (None, Some(name)) => {
            let p = e(C, parse::parse_predicate(&sf.sig, &sf.pvars, name))?;
            let arity = p.arity();
            let rel = e(C, oracle::extension(&sf.sig, &mut uni, &interp, &p, &arity))?;
            let tuples: Vec<Vec<String>> = rel
                .iter()
                .map(|t| t.iter().map(|&x| uni.elem_to_string(x)).collect())
                .collect();
            #[derive(Serialize)]
            struct Out {
                predicate: String,
                extension: Vec<Vec<String>>,
            }
            emit(C, "ok", Out { predicate: name.clone(), extension: tuples });
            Ok(EXIT_OK)
        }
        _ => Err((C, "pass exactly one of --formula or --pred".into())),
    }
}

/// Parses the schema mini-language: nullary predicate variables, `->`,
/// `and`, `or`, `F`, parentheses, and `n` for strong negation.
pub fn parse_schema(text: &str) -> Result<Formula, String> {
    let mut toks = Vec::new();
    let mut it = text.chars().peekable();
    while let Some(c) = it.next() {
        match c {
            ' ' | '\t' | '\n' => {}
            '(' => toks.push("(".to_string()),
            ')' => toks.push(")".to_string()),
            '-' => match it.next() {
                Some('>') => toks.push("->".to_string()),
                _ => return Err("expected `->`".into()),
            },
            c if c.is_alphanumeric() || c == '_' => {
                let mut s = String::new();
                s.push(c);
                while let Some(&d) = it.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                toks.push(s);
            }
            other => return Err(format!("unexpected character {other:?} in schema")),
        }
    }
    let (f, rest) = schema_imp(&toks)?;
    if !rest.is_empty() {
        return Err(format!("trailing schema input at `{}`", rest[0]));
    }
    Ok(f)
}

fn schema_imp<'a>(t: &'a [String]) -> Result<(Formula, &'a [String]), String> {
    let (a, rest) = schema_or(t)?;
    if rest.first().map(String::as_str) == Some("->") {
        let (b, rest) = schema_imp(&rest[1..])?;
        return Ok((crate::logic::imp(a, b), rest));
    }
    Ok((a, rest))
}

fn schema_or<'a>(t: &'a [String]) -> Result<(Formula, &'a [String]), String> {
    let (a, rest) = schema_and(t)?;
    if rest.first().map(String::as_str) == Some("or") {
        let (b, rest) = schema_or(&rest[1..])?;
        return Ok((crate::logic::or(a, b), rest));
    }
    Ok((a, rest))
}

fn schema_and<'a>(t: &'a [String]) -> Result<(Formula, &'a [String]), String> {
    let (a, rest) = schema_atom(t)?;
    if rest.first().map(String::as_str) == Some("and") {
        let (b, rest) = schema_and(&rest[1..])?;
        return Ok((crate::logic::and(a, b), rest));
    }
    Ok((a, rest))
}

fn schema_atom<'a>(t: &'a [String]) -> Result<(Formula, &'a [String]), String> {
    match t.first().map(String::as_str) {
        Some("(") => {
            let (a, rest) = schema_imp(&t[1..])?;
            if rest.first().map(String::as_str) != Some(")") {
                return Err("expected `)` in schema".into());
            }
            Ok((a, &rest[1..]))
        }
        Some("F") => Ok((falsity(), &t[1..])),
        Some(w) if w.chars().all(|c| c == 'n') => {
            // `n`, `nn`, `nnn`, ...: iterated strong negation.
            let (a, rest) = schema_atom(&t[1..])?;
            let mut f = a;
            for _ in 0..w.len() {
                f = negation::neg_formula(&f);
            }
            Ok((f, rest))
        }
        Some(name) => {
            let x = PVar { name: name.to_string(), primes: 0, arity: vec![] };
            Ok((Predicate::Var(x).apply(vec![]), &t[1..]))
        }
        None => Err("schema ended unexpectedly".into()),
    }
}

fn cmd_counterexample(
    sf: &SignatureFile,
    schema: &str,
    max_size: usize,
    budget: usize,
) -> Result<i32, CmdErr> {
    const C: &str = "counterexample";
    let f = parse_schema(schema).map_err(|m| (C, m))?;
    match e(C, oracle::countermodel_search(&sf.sig, &f, max_size, budget))? {
        Some(witness) => {
            #[derive(Serialize)]
            struct Out {
                schema: String,
                witness: oracle::Witness,
            }
            emit(C, "countermodel", Out { schema: formula_to_string(&f), witness });
            Ok(EXIT_REFUTED)
        }
        None => {
            #[derive(Serialize)]
            struct Out {
                schema: String,
            }
            emit(C, "no-countermodel", Out { schema: formula_to_string(&f) });
            Ok(EXIT_OK)
        }
    }
}
