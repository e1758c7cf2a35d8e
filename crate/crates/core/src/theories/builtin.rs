//! The built-in theories, written in the theory file format.

use super::{load_theory, Theory, TheoryError};

pub const BUILTIN_NAMES: [&str; 5] = ["global-state", "nondet", "par", "retry", "peano"];

/// A built-in theory with its default parameters: global state over
/// `{0, 1}`, parallelism over two unary effects `e1` and `e2`, requests
/// with two success continuations.
pub fn builtin(name: &str) -> Result<Theory, TheoryError> {
    match name {
        "global-state" => global_state(&["0", "1"]),
        "nondet" => load_theory(NONDET),
        "par" => par(&[("e1", 1), ("e2", 1)]),
        "retry" => retry(2),
        "peano" => load_theory(PEANO),
        other => Err(TheoryError::UnknownBuiltin(other.to_string())),
    }
}

const NONDET: &str = "
(theory nondet
  (effect or 2)
  (rule or-assoc (eff or () (eff or () s1 s2) s3) (eff or () s1 (eff or () s2 s3))))
";

const PEANO: &str = "
(theory peano
  (base Nat)
  (function Z ( -> Nat))
  (function S (Nat -> Nat))
  (function plus (Nat Nat -> Nat))
  (rule plus-zero (fn plus x (fn Z)) x)
  (rule plus-succ (fn plus x (fn S y)) (fn S (fn plus x y)))
  (precedence (plus > S)))
";

fn vars(stem: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{stem}{i}")).collect()
}

fn get(args: &[String]) -> String {
    format!("(eff get () {})", args.join(" "))
}

/// Global state over a finite value domain: `get` has one argument per
/// value, `assign[v]` one argument.
pub fn global_state(values: &[&str]) -> Result<Theory, TheoryError> {
    let n = values.len();
    let ts = vars("t", n);
    let mut text = format!(
        "(theory global-state\n  (domain Val ({}))\n  (effect get Val)\n  (effect assign Val 1)\n",
        values.join(" ")
    );
    for (k, v) in values.iter().enumerate() {
        text.push_str(&format!(
            "  (rule assign-get-{v} (eff assign ({v}) {}) (eff assign ({v}) {}))\n",
            get(&ts),
            ts[k]
        ));
    }
    for i in values {
        for j in values {
            text.push_str(&format!(
                "  (rule assign-assign-{i}-{j} (eff assign ({i}) (eff assign ({j}) s)) (eff assign ({j}) s))\n"
            ));
        }
    }
    let ss = vars("s", n);
    for k in 0..n {
        let mut outer = ts.clone();
        outer[k] = get(&ss);
        let mut flat = ts.clone();
        flat[k] = ss[k].clone();
        text.push_str(&format!("  (rule get-get-{} {} {})\n", values[k], get(&outer), get(&flat)));
    }
    text.push(')');
    let theory = load_theory(&text)?;
    Ok(with_note(theory, "a lone get in normal form reads an uninitialized or nondeterministic state"))
}

/// Parallel composition distributed over the given effects, with
/// fork-join pairing of two values.
pub fn par(effects: &[(&str, usize)]) -> Result<Theory, TheoryError> {
    let mut text = String::from("(theory par\n  (base V)\n  (effect par 2)\n  (effect join 1)\n");
    for (e, arity) in effects {
        text.push_str(&format!("  (effect {e} {arity})\n"));
    }
    text.push_str(
        "  (function pair (V V -> V))\n  (distribute par)\n  \
         (rule join-pair (eff join () (eff par () (pure v) (pure w))) (pure (fn pair v w)) extended))",
    );
    let theory = load_theory(&text)?;
    Ok(with_note(theory, "values are of the base type V; pair stands for the product of two values"))
}

/// Request/retry with `n` success continuations on `request`.
pub fn retry(n: usize) -> Result<Theory, TheoryError> {
    let ss = vars("s", n).join(" ");
    let req = format!("(eff request () t {ss})");
    let text = format!(
        "(theory retry
  (effect retry 2)
  (effect request {})
  (effect zero 0)
  (effect succ 1)
  (rule retry-zero (eff retry () (eff zero ()) {req}) t)
  (rule retry-succ (eff retry () (eff succ () u) {req}) (eff request () (eff retry () u {req}) {ss}))
  (precedence (retry > request)))",
        n + 1
    );
    load_theory(&text)
}

fn with_note(theory: Theory, note: &str) -> Theory {
    let mut decl = theory.decl().clone();
    decl.notes.push(note.to_string());
    decl.build().expect("already validated")
}
