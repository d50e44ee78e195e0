//! Text syntax for terms, atoms, Horn clauses and program families.
//!
//! ```text
//! term   := VAR | SYM | SYM "(" term ("," term)* ")" | "iter" "(" SYM "," count "," term ")"
//! count  := NAT | "@k" ["mod" NAT] ["+" NAT]
//! atom   := SYM | SYM "(" term ("," term)* ")"
//! clause := atom "." | atom ":-" atom ("," atom)* "."
//! ```
//!
//! Variables start with an uppercase letter or `_`, symbols with a lowercase
//! letter. `%` starts a comment running to the end of the line. The index
//! placeholder `@k` is accepted only when parsing a family.

use thiserror::Error;

use crate::horn::{Clause, Program};
use crate::limits::ProgramFamily;
use crate::template::{AtomTemplate, ClauseTemplate, CountExpr, TermTemplate};
use crate::term::{Atom, Signature, SignatureConflict, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at offset {offset} (line {line}): {message}")]
    Syntax {
        offset: usize,
        line: usize,
        message: String,
    },
    #[error("arity conflict at offset {offset} (line {line}): `{symbol}` used with {found} argument(s), previously {expected}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
        offset: usize,
        line: usize,
    },
    #[error("`{symbol}` at offset {offset} (line {line}) is used both as a predicate and as a function symbol")]
    SymbolKind {
        symbol: String,
        offset: usize,
        line: usize,
    },
    #[error("negative iteration count at offset {offset} (line {line})")]
    NegativeCount { offset: usize, line: usize },
    #[error("index placeholder `@k` at offset {offset} (line {line}) is only allowed in family files")]
    Placeholder { offset: usize, line: usize },
}

impl SyntaxError {
    pub fn offset(&self) -> usize {
        match self {
            SyntaxError::Syntax { offset, .. }
            | SyntaxError::Arity { offset, .. }
            | SyntaxError::SymbolKind { offset, .. }
            | SyntaxError::NegativeCount { offset, .. }
            | SyntaxError::Placeholder { offset, .. } => *offset,
        }
    }

    pub fn line(&self) -> usize {
        match self {
            SyntaxError::Syntax { line, .. }
            | SyntaxError::Arity { line, .. }
            | SyntaxError::SymbolKind { line, .. }
            | SyntaxError::NegativeCount { line, .. }
            | SyntaxError::Placeholder { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Sym(String),
    Var(String),
    Nat(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Plus,
    Minus,
    Index,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Sym(s) | Tok::Var(s) | Tok::Nat(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Index => "`@k`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
    line: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b'\n' => {
                line += 1;
                i += 1;
                continue;
            }
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            b'%' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b':' if bytes.get(i + 1) == Some(&b'-') => {
                i += 1;
                Tok::Neck
            }
            b'@' if bytes.get(i + 1) == Some(&b'k')
                && !bytes.get(i + 2).is_some_and(|b| is_ident_byte(*b)) =>
            {
                i += 1;
                Tok::Index
            }
            c if c.is_ascii_digit() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                Tok::Nat(text[start..=i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && is_ident_byte(bytes[i + 1]) {
                    i += 1;
                }
                let word = text[start..=i].to_string();
                if c.is_ascii_lowercase() {
                    Tok::Sym(word)
                } else {
                    Tok::Var(word)
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(SyntaxError::Syntax {
                    offset: start,
                    line,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push(Token {
            tok,
            offset: start,
            line,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: text.len(),
        line,
    });
    Ok(out)
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    sig: Signature,
    allow_index: bool,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn new(text: &str, allow_index: bool) -> PResult<Self> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
            sig: Signature::default(),
            allow_index,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, expected: &str) -> SyntaxError {
        SyntaxError::Syntax {
            offset: tok.offset,
            line: tok.line,
            message: format!("expected {expected}, found {}", tok.tok.describe()),
        }
    }

    fn expect(&mut self, want: Tok, expected: &str) -> PResult<Token> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.error_at(&t, expected))
        }
    }

    fn conflict(&self, at: &Token, symbol: &Symbol, c: SignatureConflict) -> SyntaxError {
        match c {
            SignatureConflict::Arity { expected, found } => SyntaxError::Arity {
                symbol: symbol.to_string(),
                expected,
                found,
                offset: at.offset,
                line: at.line,
            },
            SignatureConflict::Kind => SyntaxError::SymbolKind {
                symbol: symbol.to_string(),
                offset: at.offset,
                line: at.line,
            },
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn term(&mut self) -> PResult<TermTemplate> {
        let t = self.next();
        match &t.tok {
            Tok::Var(name) => Ok(TermTemplate::Var(Symbol::new(name))),
            Tok::Sym(name) if name == "iter" => self.iter_macro(),
            Tok::Sym(name) => {
                let head = Symbol::new(name);
                let args = self.arg_list(Self::term)?;
                self.sig
                    .add_function(&head, args.len())
                    .map_err(|c| self.conflict(&t, &head, c))?;
                Ok(TermTemplate::App(head, args))
            }
            _ => Err(self.error_at(&t, "a term")),
        }
    }

    fn arg_list<T>(&mut self, item: fn(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut args = Vec::new();
        if self.peek().tok != Tok::LParen {
            return Ok(args);
        }
        self.next();
        loop {
            args.push(item(self)?);
            let t = self.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => return Ok(args),
                _ => return Err(self.error_at(&t, "`,` or `)`")),
            }
        }
    }

    fn iter_macro(&mut self) -> PResult<TermTemplate> {
        self.expect(Tok::LParen, "`(` after `iter`")?;
        let ft = self.next();
        let f = match &ft.tok {
            Tok::Sym(name) if name != "iter" => Symbol::new(name),
            _ => return Err(self.error_at(&ft, "a function symbol")),
        };
        self.sig
            .add_function(&f, 1)
            .map_err(|c| self.conflict(&ft, &f, c))?;
        self.expect(Tok::Comma, "`,`")?;
        let count = self.count()?;
        self.expect(Tok::Comma, "`,`")?;
        let body = self.term()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(TermTemplate::Iter {
            f,
            count,
            body: Box::new(body),
        })
    }

    fn nat(&mut self) -> PResult<u64> {
        let t = self.next();
        match &t.tok {
            Tok::Nat(digits) => digits.parse().map_err(|_| SyntaxError::Syntax {
                offset: t.offset,
                line: t.line,
                message: format!("count `{digits}` is too large"),
            }),
            Tok::Minus => Err(SyntaxError::NegativeCount {
                offset: t.offset,
                line: t.line,
            }),
            _ => Err(self.error_at(&t, "a natural number")),
        }
    }

    fn count(&mut self) -> PResult<CountExpr> {
        if self.peek().tok != Tok::Index {
            return self.nat().map(CountExpr::Lit);
        }
        let at = self.next();
        if !self.allow_index {
            return Err(SyntaxError::Placeholder {
                offset: at.offset,
                line: at.line,
            });
        }
        let mut modulus = None;
        if matches!(&self.peek().tok, Tok::Sym(s) if s == "mod") {
            self.next();
            let nt = self.peek().clone();
            let n = self.nat()?;
            if n == 0 {
                return Err(SyntaxError::Syntax {
                    offset: nt.offset,
                    line: nt.line,
                    message: "modulus must be positive".into(),
                });
            }
            modulus = Some(n);
        }
        let mut offset = 0;
        if self.peek().tok == Tok::Plus {
            self.next();
            offset = self.nat()?;
        }
        Ok(CountExpr::Index { modulus, offset })
    }

    fn atom(&mut self) -> PResult<AtomTemplate> {
        let t = self.next();
        match &t.tok {
            Tok::Sym(name) if name != "iter" => {
                let pred = Symbol::new(name);
                let args = self.arg_list(Self::term)?;
                self.sig
                    .add_predicate(&pred, args.len())
                    .map_err(|c| self.conflict(&t, &pred, c))?;
                Ok(AtomTemplate { pred, args })
            }
            _ => Err(self.error_at(&t, "an atom")),
        }
    }

    fn clause(&mut self) -> PResult<ClauseTemplate> {
        let line = self.peek().line;
        let head = self.atom()?;
        let mut body = Vec::new();
        let t = self.next();
        match t.tok {
            Tok::Dot => {}
            Tok::Neck => loop {
                body.push(self.atom()?);
                let t = self.next();
                match t.tok {
                    Tok::Comma => continue,
                    Tok::Dot => break,
                    _ => return Err(self.error_at(&t, "`,` or `.`")),
                }
            },
            _ => return Err(self.error_at(&t, "`.` or `:-`")),
        }
        Ok(ClauseTemplate { head, body, line })
    }

    fn clauses(&mut self) -> PResult<Vec<ClauseTemplate>> {
        let mut out = Vec::new();
        while !self.at_eof() {
            out.push(self.clause()?);
        }
        Ok(out)
    }

    fn finish(&mut self) -> PResult<()> {
        let t = self.next();
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.error_at(&t, "end of input"))
        }
    }
}

/// Parses a single finite term, expanding `iter` macros.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text, false)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t.instantiate(0))
}

/// Parses a single atom (no trailing `.`).
pub fn parse_atom(text: &str) -> Result<Atom, SyntaxError> {
    let mut p = Parser::new(text, false)?;
    let a = p.atom()?;
    p.finish()?;
    Ok(a.instantiate(0))
}

/// Parses a Horn program. Clauses are kept in source order.
pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    let mut p = Parser::new(text, false)?;
    let templates = p.clauses()?;
    let clauses: Vec<Clause> = templates.iter().map(|c| c.instantiate(0)).collect();
    Ok(Program::with_signature(clauses, p.sig))
}

/// Parses a program family: a program whose `iter` counts may mention `@k`.
pub fn parse_family(text: &str) -> Result<ProgramFamily, SyntaxError> {
    let mut p = Parser::new(text, true)?;
    let templates = p.clauses()?;
    Ok(ProgramFamily::new(templates, p.sig))
}
