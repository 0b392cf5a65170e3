use tcf::dsl::GenCtx;
use tcf::logic::{and, or, Predicate, PVar};
use tcf::proof::Checker;
use tcf::syntax::Var;

fn main() {
    let ctx = GenCtx::new();
    let sig = tcf::corpus::std_sig();
    let checker = Checker::new(&sig);
    let t = Var::new("t", tcf::corpus::tree());
    let n = Var::new("n", tcf::corpus::nat());
    let x = Predicate::Var(PVar::new("X", vec![tcf::corpus::nat()]));
    let tn = tcf::corpus::tn().apply(vec![t.term()]);
    let ev = tcf::corpus::ev().apply(vec![n.term()]);
    let cases = vec![
        ("Tn t and Ev n", and(tn.clone(), ev.clone())),
        ("Tn t and Tn t", and(tn.clone(), tn.clone())),
        ("Tn t or X n", or(tn.clone(), x.apply(vec![n.term()]))),
        ("Tn t and X n", and(tn.clone(), x.apply(vec![n.term()]))),
    ];
    for (name, f) in &cases {
        match tcf::gen::gen_stab(&ctx, f) {
            Ok(d) => match checker.check(&d) {
                Ok(_) => println!("OK   {name}"),
                Err(e) => println!("FAIL {name}: {e}"),
            },
            Err(e) => println!("UNSUP {name}: {e}"),
        }
    }
}
