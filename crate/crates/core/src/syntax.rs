//! ASCII concrete syntax: lexer, parser, printer and theory-file declarations.
//!
//! ```text
//! type  ::= prod ('->' type)?
//! prod  ::= pre ('*' prod)?
//! pre   ::= '[]' pre | '[' type,* ']' pre | '!' pre | 'Unit' | NAME | '(' type ')'
//! term  ::= '\' NAME (':' type)? '.' term
//!         | 'let' 'dbox' NAME '=' term 'in' term
//!         | 'gbox' NAME,* 'be' term,* 'in' term
//!         | app
//! app   ::= pre+
//! pre   ::= 'quo' ('[' binder,* ']')? pre | 'unq' pre ('with' '[' term,* ']')?
//!         | 'dbox' pre | 'fst' pre | 'snd' pre | atom
//! atom  ::= NAME | '()' | '(' term ')' | '(' term ',' term ')'
//! ```
//! A prefix operator applied to a binder form takes the whole binder: `quo \x. x`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kernel::{Context, Judgment, Stack, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {line}:{col}: {msg}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] = &[
    "|-", "->", "[]", "\\", "λ", ".", ":", ",", ";", "(", ")", "[", "]", "*", "=", "@", "!",
];

const KEYWORDS: &[&str] = &[
    "quo", "unq", "with", "gbox", "be", "in", "let", "dbox", "fst", "snd", "Unit", "base", "def",
    "eq", "judge", "model", "monoid", "depth",
];

fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '-' && chars.get(i + 1) == Some(&'-')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            out.push(Spanned { tok: Tok::Ident(word), line, col });
            col += i - start;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let n = word.parse().map_err(|_| SyntaxError { line, col, msg: format!("number `{word}` too large") })?;
            out.push(Spanned { tok: Tok::Num(n), line, col });
            col += i - start;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym = SYMBOLS.iter().find(|s| rest.starts_with(**s));
        match sym {
            Some(s) => {
                out.push(Spanned { tok: Tok::Sym(s), line, col });
                let n = s.chars().count();
                i += n;
                col += n;
            }
            None => return Err(SyntaxError { line, col, msg: format!("unexpected character `{c}`") }),
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        let (line, col) = self.here();
        Err(SyntaxError { line, col, msg: msg.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), SyntaxError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(format!("expected `{k}`, found {}", describe(self.peek())))
        }
    }

    fn name(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(x) if !KEYWORDS.contains(&x.as_str()) => {
                self.bump();
                Ok(x)
            }
            other => self.err(format!("expected a name, found {}", describe(&other))),
        }
    }

    fn number(&mut self) -> Result<u32, SyntaxError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            other => self.err(format!("expected a number, found {}", describe(&other))),
        }
    }

    fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err(format!("unexpected {}", describe(self.peek())))
        }
    }

    // types

    fn ty(&mut self) -> Result<Type, SyntaxError> {
        let dom = self.prod_ty()?;
        if self.eat_sym("->") {
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn prod_ty(&mut self) -> Result<Type, SyntaxError> {
        let a = self.pre_ty()?;
        if self.eat_sym("*") {
            Ok(Type::prod(a, self.prod_ty()?))
        } else {
            Ok(a)
        }
    }

    fn pre_ty(&mut self) -> Result<Type, SyntaxError> {
        if self.eat_sym("[]") {
            return Ok(Type::boxed(self.pre_ty()?));
        }
        if self.eat_sym("[") {
            let mut hyps = Vec::new();
            if !self.is_sym("]") {
                loop {
                    hyps.push(self.ty()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym("]")?;
            return Ok(Type::cbox(hyps, self.pre_ty()?));
        }
        if self.eat_sym("!") {
            return Ok(Type::dual(self.pre_ty()?));
        }
        if self.eat_kw("Unit") {
            return Ok(Type::Unit(None));
        }
        if self.eat_sym("(") {
            let t = self.ty()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        let n = self.name()?;
        Ok(Type::ubase(&n))
    }

    // terms

    fn term(&mut self) -> Result<Term, SyntaxError> {
        if self.eat_sym("\\") || self.eat_sym("λ") {
            let x = self.name()?;
            let ann = if self.eat_sym(":") { Some(self.ty()?) } else { None };
            self.expect_sym(".")?;
            let body = self.term()?;
            return Ok(Term::Lam(x, ann, Box::new(body)));
        }
        if self.eat_kw("let") {
            self.expect_kw("dbox")?;
            let u = self.name()?;
            self.expect_sym("=")?;
            let m = self.term()?;
            self.expect_kw("in")?;
            let n = self.term()?;
            return Ok(Term::dlet(&u, m, n));
        }
        if self.eat_kw("gbox") {
            let mut xs = Vec::new();
            let mut args = Vec::new();
            if !self.is_kw("in") {
                loop {
                    xs.push(self.name()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_kw("be")?;
                loop {
                    args.push(self.term()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_kw("in")?;
            let body = self.term()?;
            if xs.len() != args.len() {
                return self.err("gbox binds as many names as arguments");
            }
            return Ok(Term::GBox(xs, args, Box::new(body)));
        }
        let mut head = self.pre_term()?;
        while self.starts_pre_term() {
            let arg = self.pre_term()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn starts_pre_term(&self) -> bool {
        match self.peek() {
            Tok::Ident(x) => {
                matches!(x.as_str(), "quo" | "unq" | "dbox" | "fst" | "snd") || !KEYWORDS.contains(&x.as_str())
            }
            Tok::Sym(s) => *s == "(",
            _ => false,
        }
    }

    fn starts_binder(&self) -> bool {
        self.is_sym("\\") || self.is_sym("λ") || self.is_kw("let") || self.is_kw("gbox")
    }

    /// Argument of a prefix operator: a binder form extends to the right.
    fn operand(&mut self) -> Result<Term, SyntaxError> {
        if self.starts_binder() {
            self.term()
        } else {
            self.pre_term()
        }
    }

    fn pre_term(&mut self) -> Result<Term, SyntaxError> {
        if self.eat_kw("quo") {
            let mut binders = Vec::new();
            if self.eat_sym("[") {
                if !self.is_sym("]") {
                    loop {
                        let x = self.name()?;
                        let ann = if self.eat_sym(":") { Some(self.ty()?) } else { None };
                        binders.push((x, ann));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("]")?;
            } else {
                self.eat_sym("[]");
            }
            let body = self.operand()?;
            return Ok(Term::Quo(binders, Box::new(body)));
        }
        if self.eat_kw("unq") {
            let body = self.operand()?;
            let mut args = Vec::new();
            if self.eat_kw("with") {
                if self.eat_sym("[]") {
                    return Ok(Term::Unq(Box::new(body), args));
                }
                self.expect_sym("[")?;
                if !self.is_sym("]") {
                    loop {
                        args.push(self.term()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("]")?;
            }
            return Ok(Term::Unq(Box::new(body), args));
        }
        if self.eat_kw("dbox") {
            return Ok(Term::dbox(self.operand()?));
        }
        if self.eat_kw("fst") {
            return Ok(Term::proj1(self.operand()?));
        }
        if self.eat_kw("snd") {
            return Ok(Term::proj2(self.operand()?));
        }
        if self.eat_sym("(") {
            if self.eat_sym(")") {
                return Ok(Term::Star);
            }
            let a = self.term()?;
            if self.eat_sym(",") {
                let b = self.term()?;
                self.expect_sym(")")?;
                return Ok(Term::pair(a, b));
            }
            self.expect_sym(")")?;
            return Ok(a);
        }
        let x = self.name()?;
        Ok(Term::Var(x))
    }

    // judgments

    fn hyp_frame(&mut self) -> Result<Context, SyntaxError> {
        let mut ctx = Context::empty();
        if self.eat_sym(".") {
            return Ok(ctx);
        }
        if self.is_sym(";") || self.is_sym("|-") {
            return Ok(ctx);
        }
        loop {
            let x = self.name()?;
            self.expect_sym(":")?;
            let t = self.ty()?;
            ctx.push(&x, t);
            if !self.eat_sym(",") {
                break;
            }
        }
        Ok(ctx)
    }

    fn stack_then_turnstile(&mut self) -> Result<Stack, SyntaxError> {
        let mut frames = Vec::new();
        if self.eat_sym("|-") {
            return Ok(Stack::empty());
        }
        loop {
            frames.push(self.hyp_frame()?);
            if self.eat_sym(";") {
                continue;
            }
            self.expect_sym("|-")?;
            break;
        }
        Ok(Stack::new(frames).expect("at least one frame parsed"))
    }

    fn level_suffix(&mut self) -> Result<Option<u32>, SyntaxError> {
        if self.eat_sym("@") {
            Ok(Some(self.number()?))
        } else {
            Ok(None)
        }
    }

    fn raw_judgment(&mut self) -> Result<RawJudgment, SyntaxError> {
        let stack = self.stack_then_turnstile()?;
        let term = self.term()?;
        self.expect_sym(":")?;
        let ty = self.ty()?;
        let level = self.level_suffix()?;
        Ok(RawJudgment { stack, term, ty, level })
    }

    /// Whether a `|-` occurs before the next `=` at bracket depth zero.
    fn has_turnstile_ahead(&self) -> bool {
        let mut k = 0;
        loop {
            match self.peek_at(k) {
                Tok::Sym("|-") => return true,
                Tok::Sym("=") | Tok::Eof => return false,
                Tok::Ident(x) if KEYWORDS.contains(&x.as_str()) && k > 0 && is_decl_kw(x) => return false,
                _ => k += 1,
            }
        }
    }
}

fn is_decl_kw(x: &str) -> bool {
    matches!(x, "base" | "def" | "eq" | "judge" | "model")
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(x) => format!("`{x}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// A judgment as written: types are unleveled and the level is optional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawJudgment {
    pub stack: Stack,
    pub term: Term,
    pub ty: Type,
    pub level: Option<u32>,
}

impl RawJudgment {
    pub fn unleveled(&self) -> Judgment {
        Judgment::unleveled(self.stack.clone(), self.term.clone(), self.ty.clone())
    }
}

/// Source of a monoid for model declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoidSpec {
    Trivial,
    Z2,
    /// Path to a table file.
    Table(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    pub monoid: MonoidSpec,
    pub depth: Option<u32>,
    pub valuation: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    /// `base A @ 0, 2`
    Base { name: String, levels: Vec<u32>, pos: Pos },
    /// `def k : T @ l = M`; type and level optional.
    Def { name: String, ty: Option<Type>, level: Option<u32>, term: Term, pos: Pos },
    /// `G1 ; G0 |- M : A @ l`, optionally prefixed by `judge`.
    Judge { judgment: RawJudgment, pos: Pos },
    /// `eq [G |-] M = N [: T] [@ l]`
    Eq { stack: Stack, lhs: Term, rhs: Term, ty: Option<Type>, level: Option<u32>, pos: Pos },
    /// `model monoid z2 depth 1 [A = 2, B = 1]`
    Model { config: ModelConfig, pos: Pos },
}

/// Declared levels of base type names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    levels: BTreeMap<String, BTreeSet<u32>>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare(&mut self, name: &str, level: u32) {
        self.levels.entry(name.to_string()).or_default().insert(level);
    }

    pub fn with(mut self, name: &str, levels: &[u32]) -> Signature {
        for l in levels {
            self.declare(name, *l);
        }
        self
    }

    pub fn levels_of(&self, name: &str) -> Option<&BTreeSet<u32>> {
        self.levels.get(name)
    }

    pub fn declares(&self, name: &str, level: u32) -> bool {
        self.levels.get(name).is_some_and(|s| s.contains(&level))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.levels.keys().map(String::as_str)
    }

    pub fn from_decls(decls: &[Decl]) -> Signature {
        let mut sig = Signature::new();
        for d in decls {
            if let Decl::Base { name, levels, .. } = d {
                for l in levels {
                    sig.declare(name, *l);
                }
            }
        }
        sig
    }
}

pub fn parse_type(src: &str) -> Result<Type, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_judgment(src: &str) -> Result<RawJudgment, SyntaxError> {
    let mut p = Parser::new(src)?;
    p.eat_kw("judge");
    let j = p.raw_judgment()?;
    p.finish()?;
    Ok(j)
}

/// Parses a theory file. Declarations are separated by newlines or semicolons
/// are not needed: each declaration starts with a keyword or a judgment.
pub fn parse_file(src: &str) -> Result<Vec<Decl>, SyntaxError> {
    // one declaration per logical line; continuation lines start with whitespace
    let mut decls = Vec::new();
    for (start_line, chunk) in logical_lines(src) {
        let mut p = Parser::new(&chunk).map_err(|e| shift(e, start_line))?;
        if p.at_end() {
            continue;
        }
        let d = parse_decl(&mut p).map_err(|e| shift(e, start_line))?;
        p.finish().map_err(|e| shift(e, start_line))?;
        decls.push(relocate(d, start_line));
    }
    Ok(decls)
}

fn shift(mut e: SyntaxError, start_line: usize) -> SyntaxError {
    e.line += start_line - 1;
    e
}

fn relocate(d: Decl, start_line: usize) -> Decl {
    let fix = |p: Pos| Pos { line: p.line + start_line - 1, col: p.col };
    match d {
        Decl::Base { name, levels, pos } => Decl::Base { name, levels, pos: fix(pos) },
        Decl::Def { name, ty, level, term, pos } => Decl::Def { name, ty, level, term, pos: fix(pos) },
        Decl::Judge { judgment, pos } => Decl::Judge { judgment, pos: fix(pos) },
        Decl::Eq { stack, lhs, rhs, ty, level, pos } => Decl::Eq { stack, lhs, rhs, ty, level, pos: fix(pos) },
        Decl::Model { config, pos } => Decl::Model { config, pos: fix(pos) },
    }
}

/// Splits into declarations: a line starting in column 1 begins a new one,
/// indented lines continue the previous one.
fn logical_lines(src: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("--") {
            if let Some(last) = out.last_mut() {
                last.1.push('\n');
            }
            continue;
        }
        let continues = line.starts_with(' ') || line.starts_with('\t');
        match out.last_mut() {
            Some(last) if continues => {
                last.1.push('\n');
                last.1.push_str(line);
            }
            _ => out.push((i + 1, line.to_string())),
        }
    }
    out
}

fn parse_decl(p: &mut Parser) -> Result<Decl, SyntaxError> {
    let (line, col) = p.here();
    let pos = Pos { line, col };
    if p.eat_kw("base") {
        let name = p.name()?;
        p.expect_sym("@")?;
        let mut levels = vec![p.number()?];
        while p.eat_sym(",") {
            levels.push(p.number()?);
        }
        return Ok(Decl::Base { name, levels, pos });
    }
    if p.eat_kw("def") {
        let name = p.name()?;
        let ty = if p.eat_sym(":") { Some(p.ty()?) } else { None };
        let level = p.level_suffix()?;
        p.expect_sym("=")?;
        let term = p.term()?;
        return Ok(Decl::Def { name, ty, level, term, pos });
    }
    if p.eat_kw("eq") {
        let stack = if p.has_turnstile_ahead() { p.stack_then_turnstile()? } else { Stack::empty() };
        let lhs = p.term()?;
        p.expect_sym("=")?;
        let rhs = p.term()?;
        let ty = if p.eat_sym(":") { Some(p.ty()?) } else { None };
        let level = p.level_suffix()?;
        return Ok(Decl::Eq { stack, lhs, rhs, ty, level, pos });
    }
    if p.eat_kw("model") {
        let mut config = ModelConfig { monoid: MonoidSpec::Trivial, depth: None, valuation: BTreeMap::new() };
        loop {
            if p.eat_kw("monoid") {
                config.monoid = match p.bump() {
                    Tok::Ident(x) if x == "trivial" => MonoidSpec::Trivial,
                    Tok::Ident(x) if x == "z2" => MonoidSpec::Z2,
                    Tok::Ident(x) => MonoidSpec::Table(x),
                    other => return p.err(format!("expected a monoid, found {}", describe(&other))),
                };
            } else if p.eat_kw("depth") {
                config.depth = Some(p.number()?);
            } else if p.eat_sym("[") {
                if !p.is_sym("]") {
                    loop {
                        let name = p.name()?;
                        p.expect_sym("=")?;
                        config.valuation.insert(name, u64::from(p.number()?));
                        if !p.eat_sym(",") {
                            break;
                        }
                    }
                }
                p.expect_sym("]")?;
            } else {
                break;
            }
        }
        return Ok(Decl::Model { config, pos });
    }
    p.eat_kw("judge");
    let judgment = p.raw_judgment()?;
    Ok(Decl::Judge { judgment, pos })
}

// printing

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_type(f, self, 0)
    }
}

/// Precedence: 0 arrow, 1 product, 2 prefix and atoms.
fn write_type(f: &mut fmt::Formatter<'_>, t: &Type, prec: u8) -> fmt::Result {
    match t {
        Type::Base { name, .. } => write!(f, "{name}"),
        Type::Unit(_) => write!(f, "Unit"),
        Type::Arrow(a, b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write_type(f, a, 1)?;
            write!(f, " -> ")?;
            write_type(f, b, 0)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Type::Prod(a, b) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            write_type(f, a, 2)?;
            write!(f, " * ")?;
            write_type(f, b, 1)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Type::CBox(hyps, body) => {
            if hyps.is_empty() {
                write!(f, "[]")?;
            } else {
                write!(f, "[")?;
                for (i, h) in hyps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_type(f, h, 0)?;
                }
                write!(f, "]")?;
            }
            write_type(f, body, 2)
        }
        Type::Dual(body) => {
            write!(f, "!")?;
            write_type(f, body, 2)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

/// Precedence: 0 binder forms, 1 application, 2 prefix operators, 3 atoms.
fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, prec: u8) -> fmt::Result {
    let own = match t {
        Term::Lam(..) | Term::DLet(..) | Term::GBox(..) => 0,
        Term::App(..) => 1,
        Term::Quo(..) | Term::Unq(..) | Term::DBox(_) | Term::Proj1(_) | Term::Proj2(_) => 2,
        Term::Var(_) | Term::Star | Term::Pair(..) => 3,
    };
    let paren = own < prec;
    if paren {
        write!(f, "(")?;
    }
    match t {
        Term::Var(x) => write!(f, "{x}")?,
        Term::Star => write!(f, "()")?,
        Term::Pair(a, b) => {
            write!(f, "(")?;
            write_term(f, a, 0)?;
            write!(f, ", ")?;
            write_term(f, b, 0)?;
            write!(f, ")")?;
        }
        Term::Lam(x, ann, b) => {
            write!(f, "\\{x}")?;
            if let Some(a) = ann {
                write!(f, " : {a}")?;
            }
            write!(f, ". ")?;
            write_term(f, b, 0)?;
        }
        Term::App(a, b) => {
            write_term(f, a, 1)?;
            write!(f, " ")?;
            write_term(f, b, 3)?;
        }
        Term::Proj1(a) => {
            write!(f, "fst ")?;
            write_term(f, a, 3)?;
        }
        Term::Proj2(a) => {
            write!(f, "snd ")?;
            write_term(f, a, 3)?;
        }
        Term::DBox(a) => {
            write!(f, "dbox ")?;
            write_term(f, a, 3)?;
        }
        Term::Quo(bs, b) => {
            write!(f, "quo ")?;
            if !bs.is_empty() {
                write!(f, "[")?;
                for (i, (x, ann)) in bs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                    if let Some(a) = ann {
                        write!(f, " : {a}")?;
                    }
                }
                write!(f, "] ")?;
            }
            write_term(f, b, 3)?;
        }
        Term::Unq(b, args) => {
            write!(f, "unq ")?;
            write_term(f, b, 3)?;
            if !args.is_empty() {
                write!(f, " with [")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_term(f, a, 0)?;
                }
                write!(f, "]")?;
            }
        }
        Term::GBox(xs, args, b) => {
            write!(f, "gbox ")?;
            if !xs.is_empty() {
                write!(f, "{} be ", xs.join(", "))?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_term(f, a, 1)?;
                }
                write!(f, " ")?;
            }
            write!(f, "in ")?;
            write_term(f, b, 0)?;
        }
        Term::DLet(u, m, n) => {
            write!(f, "let dbox {u} = ")?;
            write_term(f, m, 1)?;
            write!(f, " in ")?;
            write_term(f, n, 0)?;
        }
    }
    if paren {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, ".");
        }
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} : {t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Stack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.frames().iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {} : {}", self.stack, self.term, self.ty)?;
        if let Some(l) = self.level {
            write!(f, " @ {l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::alpha_eq;

    #[test]
    fn axiom_k_definition() {
        let decls = parse_file("base A @ 0\nbase B @ 0\ndef k : [](A -> B) -> []A -> []B = \\x.\\y. quo ((unq x)(unq y))\n")
            .unwrap();
        assert_eq!(decls.len(), 3);
        match &decls[2] {
            Decl::Def { name, ty, term, .. } => {
                assert_eq!(name, "k");
                assert_eq!(
                    ty.as_ref().unwrap(),
                    &Type::arrow(
                        Type::boxed(Type::arrow(Type::ubase("A"), Type::ubase("B"))),
                        Type::arrow(Type::boxed(Type::ubase("A")), Type::boxed(Type::ubase("B")))
                    )
                );
                let expect = Term::lam(
                    "x",
                    Term::lam("y", Term::quo(Term::app(Term::unq(Term::var("x")), Term::unq(Term::var("y"))))),
                );
                assert_eq!(term, &expect);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn base_declaration() {
        let decls = parse_file("base A @ 0").unwrap();
        assert_eq!(decls, vec![Decl::Base { name: "A".into(), levels: vec![0], pos: Pos { line: 1, col: 1 } }]);
        let sig = Signature::from_decls(&parse_file("base A @ 0, 2").unwrap());
        assert!(sig.declares("A", 2) && !sig.declares("A", 1));
    }

    #[test]
    fn error_positions() {
        let e = parse_file("base A @ 0\ndef f = \\x. )").unwrap_err();
        assert_eq!((e.line, e.col), (2, 13));
        let e = parse_term("quo $").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
    }

    #[test]
    fn judgments_and_goals() {
        let j = parse_judgment("y : [](A -> B) ; x : A |- x : A @ 0").unwrap();
        assert_eq!(j.stack.height(), 2);
        assert_eq!(j.level, Some(0));
        let j = parse_judgment(". ; . |- () : Unit").unwrap();
        assert_eq!(j.stack.height(), 2);
        let decls = parse_file("eq unq (quo (\\x.x)) = \\x.x @ 0").unwrap();
        assert!(matches!(&decls[0], Decl::Eq { level: Some(0), ty: None, .. }));
        let decls = parse_file("eq f : A -> A |- \\x. f x = f : A -> A").unwrap();
        match &decls[0] {
            Decl::Eq { stack, .. } => assert_eq!(stack.top().len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contextual_and_other_forms() {
        let t = parse_term("quo [x : A, y] unq m with [x, y]").unwrap();
        assert_eq!(
            t,
            Term::cquo(
                vec![("x".into(), Some(Type::ubase("A"))), ("y".into(), None)],
                Term::cunq(Term::var("m"), vec![Term::var("x"), Term::var("y")])
            )
        );
        let g = parse_term("gbox f, a be x, y in f a").unwrap();
        assert!(matches!(g, Term::GBox(ref xs, ref args, _) if xs.len() == 2 && args.len() == 2));
        let d = parse_term("let dbox u = m in dbox u").unwrap();
        assert_eq!(d, Term::dlet("u", Term::var("m"), Term::dbox(Term::var("u"))));
        assert_eq!(parse_type("!A -> [A, B]C * Unit").unwrap().to_string(), "!A -> [A, B]C * Unit");
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "\\x. \\y. quo (unq x (unq y))",
            "(\\x. quo (\\x. x (unq x))) y",
            "quo [x : A -> B, y] unq m with [x, (\\z. z) y]",
            "fst (a, b) (snd p)",
            "let dbox u = f x in dbox (g u)",
            "gbox f, a be x y, z in f a",
            "unq (quo (\\x. x))",
            "quo (unq m with [a]) b",
        ] {
            let t = parse_term(src).unwrap();
            let again = parse_term(&t.to_string()).unwrap();
            assert!(alpha_eq(&t, &again), "{src} -> {t}");
        }
    }
}
