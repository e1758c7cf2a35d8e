//! Concrete syntax for terms and types.
//!
//! ```text
//! term  := ident | (lam ident term) | (app term term) | (pure term)
//!        | (let ident term term) | (eff ident (param*) term*) | (fn ident term*)
//! type  := ident | (E type) | (-> type type)
//! ```
//!
//! `(fn name args..)` is accepted for any symbol without parameters, and
//! `(eff name () args..)` for any symbol; the signature decides the kind.
//! Printing always emits `eff` for effects and `fn` for functions.

use crate::sexp::{self, Sexp, SexpError, Span};

use super::term::{name, Term};
use super::types::{Signature, SignatureError, Type};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {span}: {message}")]
    Syntax { span: Span, message: String },
    #[error("at {span}: {source}")]
    Symbol { span: Span, source: SignatureError },
}

impl ParseError {
    pub fn syntax(span: Span, message: impl Into<String>) -> Self {
        ParseError::Syntax { span, message: message.into() }
    }

    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. } | ParseError::Symbol { span, .. } => *span,
        }
    }
}

impl From<SexpError> for ParseError {
    fn from(e: SexpError) -> Self {
        ParseError::Syntax { span: e.span, message: e.message }
    }
}

const KEYWORDS: [&str; 6] = ["lam", "app", "pure", "let", "eff", "fn"];

/// Identifiers start with a letter or `_`; the rest may also use digits,
/// `_`, `-` and `'`.
pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '\''))
}

fn is_param(s: &str) -> bool {
    is_ident(s) || (!s.is_empty() && s.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()))
}

fn ident(s: &Sexp, what: &str) -> Result<String, ParseError> {
    match s.as_atom() {
        Some(a) if is_ident(a) && !KEYWORDS.contains(&a) => Ok(a.to_string()),
        Some(a) => Err(ParseError::syntax(s.span(), format!("`{a}` is not a valid {what}"))),
        None => Err(ParseError::syntax(s.span(), format!("expected {what}, found a list"))),
    }
}

fn expect_len(items: &[Sexp], n: usize, span: Span, form: &str) -> Result<(), ParseError> {
    if items.len() == n {
        Ok(())
    } else {
        Err(ParseError::syntax(
            span,
            format!("`{form}` takes {} operand(s), found {}", n - 1, items.len() - 1),
        ))
    }
}

/// Parses one term.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    term_from_sexp(&sexp::parse_one(text)?, sig)
}

pub fn term_from_sexp(s: &Sexp, sig: &Signature) -> Result<Term, ParseError> {
    let (items, span) = match s {
        Sexp::Atom(..) => return Ok(Term::Var(name(&ident(s, "variable")?))),
        Sexp::List(items, span) => (items, *span),
    };
    let Some(head) = items.first() else {
        return Err(ParseError::syntax(span, "empty form"));
    };
    let Some(keyword) = head.as_atom() else {
        return Err(ParseError::syntax(head.span(), "expected a keyword"));
    };
    match keyword {
        "lam" => {
            expect_len(items, 3, span, "lam")?;
            let x = ident(&items[1], "binder")?;
            Ok(Term::lam(&x, term_from_sexp(&items[2], sig)?))
        }
        "app" => {
            expect_len(items, 3, span, "app")?;
            Ok(Term::app(term_from_sexp(&items[1], sig)?, term_from_sexp(&items[2], sig)?))
        }
        "pure" => {
            expect_len(items, 2, span, "pure")?;
            Ok(Term::pure(term_from_sexp(&items[1], sig)?))
        }
        "let" => {
            expect_len(items, 4, span, "let")?;
            let x = ident(&items[1], "binder")?;
            let subject = term_from_sexp(&items[2], sig)?;
            Ok(Term::let_(&x, subject, term_from_sexp(&items[3], sig)?))
        }
        "eff" => {
            if items.len() < 3 {
                return Err(ParseError::syntax(span, "`eff` needs a symbol and a parameter list"));
            }
            let sym = ident(&items[1], "symbol name")?;
            let Some(plist) = items[2].as_list() else {
                return Err(ParseError::syntax(items[2].span(), "expected a parameter list"));
            };
            let mut params = Vec::new();
            for p in plist {
                match p.as_atom() {
                    Some(a) if is_param(a) => params.push(a),
                    _ => return Err(ParseError::syntax(p.span(), "invalid parameter")),
                }
            }
            symbol_app(&sym, &params, &items[3..], span, items[1].span(), sig)
        }
        "fn" => {
            if items.len() < 2 {
                return Err(ParseError::syntax(span, "`fn` needs a symbol name"));
            }
            let sym = ident(&items[1], "symbol name")?;
            symbol_app(&sym, &[], &items[2..], span, items[1].span(), sig)
        }
        other => Err(ParseError::syntax(head.span(), format!("unknown form `{other}`"))),
    }
}

fn symbol_app(
    sym: &str,
    params: &[&str],
    args: &[Sexp],
    _span: Span,
    sym_span: Span,
    sig: &Signature,
) -> Result<Term, ParseError> {
    let id = sig
        .resolve(sym, params, args.len())
        .map_err(|source| ParseError::Symbol { span: sym_span, source })?;
    let args = args.iter().map(|a| term_from_sexp(a, sig)).collect::<Result<Vec<_>, _>>()?;
    Ok(Term::Sym(id, args))
}

/// Canonical rendering; identical to `Display`.
pub fn print_term(t: &Term) -> String {
    t.to_string()
}

pub fn type_from_sexp(s: &Sexp) -> Result<Type, ParseError> {
    match s {
        Sexp::Atom(a, span) => {
            if is_ident(a) {
                Ok(Type::base(a))
            } else {
                Err(ParseError::syntax(*span, format!("`{a}` is not a type name")))
            }
        }
        Sexp::List(items, span) => match s.head() {
            Some("E") => {
                expect_len(items, 2, *span, "E")?;
                Ok(Type::eff(type_from_sexp(&items[1])?))
            }
            Some("->") => {
                expect_len(items, 3, *span, "->")?;
                Ok(Type::arrow(type_from_sexp(&items[1])?, type_from_sexp(&items[2])?))
            }
            _ => Err(ParseError::syntax(*span, "expected a type: NAME, (E T) or (-> S T)")),
        },
    }
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    type_from_sexp(&sexp::parse_one(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::types::{Domain, SymbolDecl};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare(SymbolDecl::effect("get", 2)).unwrap();
        s.declare(SymbolDecl::effect("or", 2)).unwrap();
        let dom = Domain { name: name("V"), values: vec![name("1"), name("2")] };
        s.declare(SymbolDecl::param_effect("assign", dom, 1)).unwrap();
        s.declare(SymbolDecl::function("plus", vec![Type::base("N"); 2], Type::base("N")))
            .unwrap();
        s
    }

    #[test]
    fn parses_basic_forms() {
        let s = sig();
        assert_eq!(parse_term("(pure x)", &s).unwrap(), Term::pure(Term::var("x")));
        assert_eq!(
            parse_term("(let x (eff get () (pure a) (pure b)) (pure x))", &s).unwrap(),
            Term::let_(
                "x",
                Term::eff("get", vec![Term::pure(Term::var("a")), Term::pure(Term::var("b"))]),
                Term::pure(Term::var("x"))
            )
        );
        assert_eq!(
            parse_term("(app (lam x x) y)", &s).unwrap(),
            Term::app(Term::lam("x", Term::var("x")), Term::var("y"))
        );
    }

    #[test]
    fn fn_form_accepts_parameterless_effects() {
        let s = sig();
        let t = parse_term("(fn or (fn or (pure a) (pure b)) (pure c))", &s).unwrap();
        assert_eq!(t.to_string(), "(eff or () (eff or () (pure a) (pure b)) (pure c))");
        assert!(parse_term("(eff plus () x y)", &s).is_ok());
        assert!(parse_term("(fn assign (pure a))", &s).is_err());
    }

    #[test]
    fn params_and_errors() {
        let s = sig();
        let t = parse_term("(eff assign (2) (pure a))", &s).unwrap();
        assert_eq!(t, Term::eff_with("assign", "2", vec![Term::pure(Term::var("a"))]));
        assert!(matches!(
            parse_term("(eff assign (3) (pure a))", &s),
            Err(ParseError::Symbol { source: SignatureError::Param { .. }, .. })
        ));
        assert!(matches!(
            parse_term("(eff get () (pure a))", &s),
            Err(ParseError::Symbol { source: SignatureError::Arity { .. }, .. })
        ));
        assert!(matches!(
            parse_term("(fn put x)", &s),
            Err(ParseError::Symbol { source: SignatureError::Unknown(_), .. })
        ));
        let err = parse_term("(pure\n  (lam x))", &s).unwrap_err();
        assert_eq!(err.span(), Span { line: 2, col: 3 });
        assert!(parse_term("(pure x", &s).is_err());
        assert!(parse_term("(lam #0 x)", &s).is_err());
        assert!(parse_term("(wat x)", &s).is_err());
    }

    #[test]
    fn types() {
        assert_eq!(parse_type("(-> B (E B))").unwrap(), Type::arrow(Type::base("B"), Type::eff(Type::base("B"))));
        assert!(parse_type("(E)").is_err());
        assert_eq!(parse_type("(E (-> A B))").unwrap().to_string(), "(E (-> A B))");
    }

    #[test]
    fn printing_round_trips() {
        let s = sig();
        for text in [
            "(let x (eff get () (pure a) (pure b)) (pure x))",
            "(lam f (app f (fn plus x y)))",
            "(eff assign (1) (eff or () (pure a) (pure y')))",
        ] {
            let t = parse_term(text, &s).unwrap();
            assert_eq!(print_term(&t), text);
        }
    }
}
