//! The `effrw` command line.
//!
//! Exit codes: 0 success, 1 parse, type or input error, 2 certification
//! failure or no precedence found, 3 fuel exhausted, 4 usage error.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::kernel::{infer_open, parse_term, Term};
use crate::rewrite::{
    normalize, reduction_graph, Strategy, Trace, DEFAULT_GRAPH_FUEL, DEFAULT_NORMALIZE_FUEL,
};
use crate::rpo::{certify_ruleset, search_precedence, DEFAULT_SYMBOL_BOUND};
use crate::theories::{builtin, compose, load_theory, Theory, TheoryDecl, BUILTIN_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CERT: i32 = 2;
pub const EXIT_FUEL: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "effrw", version, about = "Rewrite effectful metalanguage terms and certify termination")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Typecheck a term and print its type
    Check(TermArgs),
    /// Rewrite a term to normal form
    Normalize(NormalizeArgs),
    /// Rewrite a term to normal form, printing every step
    Trace(NormalizeArgs),
    /// Check every rule against the declared precedence
    Certify(CertifyArgs),
    /// Look for a precedence under which every rule certifies
    Search(SearchArgs),
    /// Explore every reduction from a term and print the graph in DOT
    Graph(GraphArgs),
    /// List the built-in theories
    Theories(TheoriesArgs),
}

#[derive(Args, Debug, Clone)]
pub struct TheoryArgs {
    /// Built-in theory (repeatable; several are composed)
    #[arg(long = "builtin", value_name = "NAME")]
    pub builtins: Vec<String>,
    /// Theory file (repeatable; several are composed)
    #[arg(long = "theory", value_name = "PATH")]
    pub theories: Vec<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TermArgs {
    #[command(flatten)]
    pub theory: TheoryArgs,
    /// The term; `-` reads it from standard input
    #[arg(long, conflicts_with = "term_file", required_unless_present = "term_file")]
    pub term: Option<String>,
    /// File holding the term
    #[arg(long, value_name = "PATH")]
    pub term_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyName {
    /// Leftmost-outermost
    Lo,
    /// Rightmost-innermost
    Ri,
    /// Uniformly random, needs --seed
    Random,
}

#[derive(Args, Debug, Clone)]
pub struct NormalizeArgs {
    #[command(flatten)]
    pub term: TermArgs,
    #[arg(long, value_enum, default_value_t = StrategyName::Lo)]
    pub strategy: StrategyName,
    /// Seed for the random strategy
    #[arg(long)]
    pub seed: Option<u64>,
    /// Maximum number of steps
    #[arg(long, env = "EFFRW_FUEL", default_value_t = DEFAULT_NORMALIZE_FUEL)]
    pub fuel: usize,
    /// Also print every step
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug, Clone)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub theory: TheoryArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[command(flatten)]
    pub theory: TheoryArgs,
    /// Maximum number of symbols to order
    #[arg(long, default_value_t = DEFAULT_SYMBOL_BOUND)]
    pub bound: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    #[command(flatten)]
    pub term: TermArgs,
    /// Maximum number of nodes
    #[arg(long, default_value_t = DEFAULT_GRAPH_FUEL)]
    pub fuel: usize,
    /// Write the DOT output here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TheoriesArgs {
    /// Print this built-in theory in the theory file format
    #[arg(long, value_name = "NAME")]
    pub show: Option<String>,
}

enum Failure {
    Input(String),
    Usage(String),
    // already reported on standard output
    Exit(i32),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Input(format!("i/o error: {e}"))
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io { stdin, out, err };
    let result = dispatch(cli.command, &mut io);
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(m)) => {
            let _ = writeln!(io.err, "error: {m}");
            EXIT_INPUT
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(io.err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Exit(code)) => code,
    }
}

fn dispatch(command: Command, io: &mut Io) -> Result<(), Failure> {
    match command {
        Command::Check(a) => check(&a, io),
        Command::Normalize(a) => run_normalize(&a, a.trace, io),
        Command::Trace(a) => run_normalize(&a, true, io),
        Command::Certify(a) => certify(&a, io),
        Command::Search(a) => search(&a, io),
        Command::Graph(a) => graph(&a, io),
        Command::Theories(a) => theories(&a, io),
    }
}

/// The theory named by the flags: none gives the empty theory, several are
/// composed in the order builtins, then files.
pub fn load_theories(args: &TheoryArgs) -> Result<Theory, String> {
    let mut parts = Vec::new();
    for b in &args.builtins {
        parts.push(builtin(b).map_err(|e| e.to_string())?);
    }
    for path in &args.theories {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        parts.push(load_theory(&text).map_err(|e| format!("{}: {e}", path.display()))?);
    }
    match parts.len() {
        0 => TheoryDecl { name: "empty".into(), ..TheoryDecl::default() }.build().map_err(|e| e.to_string()),
        1 => Ok(parts.pop().expect("one theory")),
        _ => compose(&parts).map_err(|e| e.to_string()),
    }
}

fn read_term(args: &TermArgs, theory: &Theory, io: &mut Io) -> Result<Term, Failure> {
    let text = match (&args.term, &args.term_file) {
        (Some(t), _) if t == "-" => {
            let mut s = String::new();
            io.stdin.read_to_string(&mut s).map_err(io_err)?;
            s
        }
        (Some(t), _) => t.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
        (None, None) => return Err(Failure::Usage("a term is required (--term or --term-file)".into())),
    };
    let t = parse_term(&text, theory.signature()).map_err(Failure::input)?;
    infer_open(&t, theory.signature()).map_err(Failure::input)?;
    Ok(t)
}

fn check(a: &TermArgs, io: &mut Io) -> Result<(), Failure> {
    let theory = load_theories(&a.theory).map_err(Failure::Input)?;
    let t = read_term(a, &theory, io)?;
    let (ctx, ty) = infer_open(&t, theory.signature()).map_err(Failure::input)?;
    match a.format {
        Format::Text => {
            for (x, tx) in ctx.entries() {
                writeln!(io.out, "{x} : {tx}").map_err(io_err)?;
            }
            writeln!(io.out, "{ty}").map_err(io_err)?;
        }
        Format::Json => {
            let free: serde_json::Map<String, serde_json::Value> =
                ctx.entries().iter().map(|(x, tx)| (x.to_string(), tx.to_string().into())).collect();
            let v = serde_json::json!({ "type": ty.to_string(), "free": free });
            writeln!(io.out, "{v}").map_err(io_err)?;
        }
    }
    Ok(())
}

fn strategy_of(a: &NormalizeArgs) -> Result<Strategy, Failure> {
    match (a.strategy, a.seed) {
        (StrategyName::Random, Some(seed)) => Ok(Strategy::Random(seed)),
        (StrategyName::Random, None) => Err(Failure::Usage("--strategy random needs --seed".into())),
        (_, Some(_)) => Err(Failure::Usage("--seed is only meaningful with --strategy random".into())),
        (StrategyName::Lo, None) => Ok(Strategy::LeftmostOutermost),
        (StrategyName::Ri, None) => Ok(Strategy::RightmostInnermost),
    }
}

fn write_trace(trace: &Trace, io: &mut Io) -> Result<(), Failure> {
    write!(io.out, "{}", trace.to_text()).map_err(io_err)
}

fn run_normalize(a: &NormalizeArgs, show_trace: bool, io: &mut Io) -> Result<(), Failure> {
    let strategy = strategy_of(a)?;
    let theory = load_theories(&a.term.theory).map_err(Failure::Input)?;
    let t = read_term(&a.term, &theory, io)?;
    let (result, trace, exhausted) = match normalize(&t, theory.rules(), strategy, a.fuel) {
        Ok((nf, trace)) => (nf, trace, false),
        Err(e) => (e.term, e.trace, true),
    };
    match a.term.format {
        Format::Text => {
            if show_trace {
                write_trace(&trace, io)?;
            }
            writeln!(io.out, "{result}").map_err(io_err)?;
        }
        Format::Json => {
            let mut v = serde_json::json!({
                "strategy": strategy.to_string(),
                "steps": trace.len(),
                "normal": !exhausted,
                "term": result.to_string(),
            });
            if show_trace {
                v["trace"] = trace.to_json();
            }
            writeln!(io.out, "{v}").map_err(io_err)?;
        }
    }
    if exhausted {
        writeln!(io.err, "error: fuel exhausted after {} step(s)", trace.len()).map_err(io_err)?;
        return Err(Failure::Exit(EXIT_FUEL));
    }
    Ok(())
}

fn certify(a: &CertifyArgs, io: &mut Io) -> Result<(), Failure> {
    let theory = load_theories(&a.theory).map_err(Failure::Input)?;
    let report = certify_ruleset(theory.precedence(), theory.rules());
    match a.format {
        Format::Text => write!(io.out, "{}", report.to_text()).map_err(io_err)?,
        Format::Json => writeln!(io.out, "{}", report.to_json()).map_err(io_err)?,
    }
    if report.overall {
        Ok(())
    } else {
        Err(Failure::Exit(EXIT_CERT))
    }
}

fn search(a: &SearchArgs, io: &mut Io) -> Result<(), Failure> {
    let theory = load_theories(&a.theory).map_err(Failure::Input)?;
    let found = search_precedence(theory.rules(), a.bound).map_err(|e| Failure::Usage(e.to_string()))?;
    match (a.format, &found) {
        (Format::Text, Some(p)) => writeln!(io.out, "{p}"),
        (Format::Text, None) => writeln!(io.out, "none"),
        (Format::Json, _) => {
            let pairs = found.as_ref().map(|p| {
                p.covering_pairs().into_iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect::<Vec<_>>()
            });
            writeln!(io.out, "{}", serde_json::json!({ "precedence": pairs }))
        }
    }
    .map_err(io_err)?;
    match found {
        Some(_) => Ok(()),
        None => Err(Failure::Exit(EXIT_CERT)),
    }
}

fn graph(a: &GraphArgs, io: &mut Io) -> Result<(), Failure> {
    let theory = load_theories(&a.term.theory).map_err(Failure::Input)?;
    let t = read_term(&a.term, &theory, io)?;
    let g = reduction_graph(&t, theory.rules(), a.fuel);
    let dot = g.to_dot();
    match &a.output {
        Some(path) => std::fs::write(path, dot).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => write!(io.out, "{dot}").map_err(io_err)?,
    }
    writeln!(
        io.err,
        "{} node(s), {} edge(s), {} normal form(s)",
        g.node_count(),
        g.edges.len(),
        g.normal_forms.len()
    )
    .map_err(io_err)?;
    if g.truncated {
        writeln!(io.err, "error: node bound {} reached", a.fuel).map_err(io_err)?;
        return Err(Failure::Exit(EXIT_FUEL));
    }
    Ok(())
}

fn theories(a: &TheoriesArgs, io: &mut Io) -> Result<(), Failure> {
    if let Some(n) = &a.show {
        let th = builtin(n).map_err(|e| Failure::Usage(e.to_string()))?;
        return write!(io.out, "{}", th.to_text()).map_err(io_err);
    }
    for n in BUILTIN_NAMES {
        let th = builtin(n).map_err(Failure::input)?;
        let sig: Vec<String> = th.signature().decls().map(|d| d.name.to_string()).collect();
        writeln!(io.out, "{n}: {} rule(s); symbols {}", th.rules().len(), sig.join(", ")).map_err(io_err)?;
    }
    Ok(())
}
