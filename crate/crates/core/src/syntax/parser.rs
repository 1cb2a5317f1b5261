//! Recursive-descent parser for signatures, theories, structures and
//! formulas.
//!
//! ```text
//! signature S { func f/1; rel R/2; const c; }
//! theory T over S { axiom inj: forall x y. f(x) = f(y) -> x = y; axiom nofix: not exists x. f(x) = x; }
//! structure A over S { universe {a0, a1}; f: a0 -> a1, a1 -> a0; R: (a0, a1); c = a0; }
//! formula phi over S: exists y. f(y) = x;
//! ```
//!
//! `->` is accepted only at the top of an axiom and `not` only as its
//! outermost symbol; anywhere else they are positivity violations.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::ParseError;
use crate::structures::{tuple_index, FinStructure};

use super::{
    Atom, CompanionAxiom, HInductiveSentence, NamedAxiom, NamedCompanionAxiom, PositiveFormula, Signature, SymbolKind, Term, Theory,
};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Dot,
    Eq,
    Arrow,
    Slash,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const KEYWORDS: &[&str] = &[
    "signature",
    "theory",
    "structure",
    "formula",
    "over",
    "func",
    "rel",
    "const",
    "axiom",
    "companion",
    "universe",
    "forall",
    "exists",
    "and",
    "or",
    "not",
    "true",
    "false",
];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut bump = |i: &mut usize, n: usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => bump(&mut i, 1),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' | '}' | '(' | ')' | ';' | ':' | ',' | '.' | '=' | '/' => {
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '=' => Tok::Eq,
                    _ => Tok::Slash,
                };
                bump(&mut i, 1);
                out.push(Token { tok, line: l0, column: c0 });
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                bump(&mut i, 2);
                out.push(Token { tok: Tok::Arrow, line: l0, column: c0 });
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                col += i - start;
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, column: c0 });
            }
            other => return Err(ParseError::Syntax { line: l0, column: c0, message: format!("unexpected character `{other}`") }),
        }
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// Signatures visible to the parser, plus the one used for bare formulas.
#[derive(Clone, Debug, Default)]
pub struct ParseContext {
    pub signatures: HashMap<String, Arc<Signature>>,
    pub default_signature: Option<Arc<Signature>>,
}

impl ParseContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_signature(mut self, sig: Arc<Signature>) -> Self {
        self.add_signature(sig);
        self
    }

    pub fn add_signature(&mut self, sig: Arc<Signature>) {
        if self.default_signature.is_none() {
            self.default_signature = Some(sig.clone());
        }
        self.signatures.insert(sig.name.clone(), sig);
    }
}

/// Every item of one source file, in order of appearance.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub signatures: Vec<Arc<Signature>>,
    pub theories: Vec<Theory>,
    pub structures: Vec<FinStructure>,
    pub formulas: Vec<(String, Arc<Signature>, PositiveFormula)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParsedKind {
    Signature,
    Structure,
    Theory,
    Formula,
}

#[derive(Clone, Debug)]
pub enum Parsed {
    Signature(Arc<Signature>),
    Structure(FinStructure),
    Theory(Theory),
    Formula(PositiveFormula),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    sig: Option<Arc<Signature>>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0, sig: None })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, column) = self.here();
        Err(ParseError::Syntax { line, column, message: message.into() })
    }

    fn semantic<T>(&self, at: (usize, usize), message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Semantic { line: at.0, column: at.1, message: message.into() })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.syntax(format!("expected {}, found {}", Self::describe(&want), Self::describe(self.peek())))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.next();
            Ok(())
        } else {
            self.syntax(format!("expected `{kw}`, found {}", Self::describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            other => self.syntax(format!("expected identifier, found {}", Self::describe(&other))),
        }
    }

    fn sig(&self) -> Arc<Signature> {
        self.sig.clone().expect("signature set before formula parsing")
    }

    // ---- formulas -------------------------------------------------------

    fn positivity<T>(&self, message: &str) -> PResult<T> {
        let (line, column) = self.here();
        Err(ParseError::Positivity { line, column, message: message.into() })
    }

    fn formula(&mut self) -> PResult<PositiveFormula> {
        let mut parts = vec![self.conjunction()?];
        while self.is_kw("or") {
            self.next();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PositiveFormula::Or(parts) })
    }

    fn conjunction(&mut self) -> PResult<PositiveFormula> {
        let mut parts = vec![self.unary()?];
        while self.is_kw("and") {
            self.next();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PositiveFormula::And(parts) })
    }

    fn var_list(&mut self) -> PResult<Vec<String>> {
        let mut vars = Vec::new();
        while let Tok::Ident(s) = self.peek() {
            if KEYWORDS.contains(&s.as_str()) {
                break;
            }
            if let Some(kind) = self.sig.as_ref().and_then(|g| g.kind_of(s)) {
                let (line, column) = self.here();
                return Err(ParseError::Semantic { line, column, message: format!("`{s}` is a {kind} symbol, not a variable") });
            }
            vars.push(self.ident()?);
        }
        if vars.is_empty() {
            return self.syntax("expected at least one variable");
        }
        Ok(vars)
    }

    fn unary(&mut self) -> PResult<PositiveFormula> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "exists" => {
                self.next();
                let vars = self.var_list()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(PositiveFormula::Exists(vars, Box::new(body)))
            }
            Tok::Ident(s) if s == "true" => {
                self.next();
                Ok(PositiveFormula::truth())
            }
            Tok::Ident(s) if s == "false" => {
                self.next();
                Ok(PositiveFormula::falsity())
            }
            Tok::Ident(s) if s == "not" => self.positivity("negation inside a positive formula"),
            Tok::Ident(s) if s == "forall" => self.positivity("universal quantifier inside a positive formula"),
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                if *self.peek() == Tok::Arrow {
                    return self.positivity("implication inside a positive formula");
                }
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.atom().map(PositiveFormula::Atom),
        }
    }

    fn atom(&mut self) -> PResult<Atom> {
        if let Tok::Ident(s) = self.peek().clone() {
            if let Some(SymbolKind::Relation(arity)) = self.sig().kind_of(&s) {
                let at = self.here();
                self.next();
                let args = self.args()?;
                if args.len() != arity {
                    return Err(ParseError::Arity { line: at.0, column: at.1, symbol: s, expected: arity, found: args.len() });
                }
                return Ok(Atom::Rel(s, args));
            }
        }
        let lhs = self.term()?;
        if *self.peek() != Tok::Eq {
            return self.syntax(format!("expected `=` after term, found {}", Self::describe(self.peek())));
        }
        self.next();
        let rhs = self.term()?;
        Ok(Atom::Eq(lhs, rhs))
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.next();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn term(&mut self) -> PResult<Term> {
        let at = self.here();
        let (line, column) = at;
        let name = match self.peek().clone() {
            Tok::Ident(s) if s == "not" => return self.positivity("negation inside a positive formula"),
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => s,
            other => return self.syntax(format!("expected a term, found {}", Self::describe(&other))),
        };
        self.next();
        let applied = *self.peek() == Tok::LParen;
        match self.sig().kind_of(&name) {
            Some(SymbolKind::Function(arity)) => {
                if !applied {
                    return Err(ParseError::Arity { line, column, symbol: name, expected: arity, found: 0 });
                }
                let args = self.args()?;
                if args.len() != arity {
                    return Err(ParseError::Arity { line, column, symbol: name, expected: arity, found: args.len() });
                }
                Ok(Term::App(name, args))
            }
            Some(SymbolKind::Constant) if !applied => Ok(Term::Const(name)),
            Some(SymbolKind::Constant) => Err(ParseError::Arity { line, column, symbol: name, expected: 0, found: 1 }),
            Some(SymbolKind::Relation(_)) => self.semantic(at, format!("relation `{name}` used as a term")),
            None if applied => Err(ParseError::UnknownSymbol { line, column, symbol: name }),
            None => Ok(Term::Var(name)),
        }
    }

    /// `[forall x̄.] (not P | P -> Q | Q)`.
    fn sentence(&mut self) -> PResult<HInductiveSentence> {
        let at = self.here();
        let mut vars = None;
        if self.is_kw("forall") {
            self.next();
            vars = Some(self.var_list()?);
            self.expect(Tok::Dot)?;
        }
        let sentence = if self.is_kw("not") {
            self.next();
            let body = self.formula()?;
            match vars {
                Some(v) => HInductiveSentence { vars: v, antecedent: body, consequent: PositiveFormula::falsity() },
                None => HInductiveSentence::h_universal(body),
            }
        } else {
            let first = self.formula()?;
            let vars = vars.unwrap_or_default();
            if *self.peek() == Tok::Arrow {
                self.next();
                if self.is_kw("not") {
                    return self.positivity("negation is only allowed as the outermost symbol of an axiom");
                }
                let second = self.formula()?;
                if *self.peek() == Tok::Arrow {
                    return self.positivity("nested implication");
                }
                HInductiveSentence { vars, antecedent: first, consequent: second }
            } else {
                HInductiveSentence { vars, antecedent: PositiveFormula::truth(), consequent: first }
            }
        };
        if let Err(e) = sentence.check_closed() {
            return self.semantic(at, e.to_string());
        }
        Ok(sentence)
    }

    /// `[forall x̄.] (ψ) or [exists ȳ.] ((θ1) and not (θ2))`.
    fn companion(&mut self) -> PResult<CompanionAxiom> {
        let at = self.here();
        let mut vars = Vec::new();
        if self.is_kw("forall") {
            self.next();
            vars = self.var_list()?;
            self.expect(Tok::Dot)?;
        }
        self.expect(Tok::LParen)?;
        let psi = self.formula()?;
        self.expect(Tok::RParen)?;
        self.expect_kw("or")?;
        let mut witness_vars = Vec::new();
        if self.is_kw("exists") {
            self.next();
            witness_vars = self.var_list()?;
            self.expect(Tok::Dot)?;
        }
        self.expect(Tok::LParen)?;
        self.expect(Tok::LParen)?;
        let theta1 = self.formula()?;
        self.expect(Tok::RParen)?;
        self.expect_kw("and")?;
        self.expect_kw("not")?;
        self.expect(Tok::LParen)?;
        let theta2 = self.formula()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::RParen)?;
        let ax = CompanionAxiom { vars, psi, witness_vars, theta1, theta2 };
        if let Err(e) = ax.check_closed() {
            return self.semantic(at, e.to_string());
        }
        Ok(ax)
    }

    // ---- items ----------------------------------------------------------

    fn signature(&mut self) -> PResult<Signature> {
        self.expect_kw("signature")?;
        let mut sig = Signature::new(self.ident()?);
        self.expect(Tok::LBrace)?;
        while *self.peek() != Tok::RBrace {
            let at = self.here();
            let kind = match self.peek() {
                Tok::Ident(s) if s == "func" || s == "rel" || s == "const" => s.clone(),
                other => return self.syntax(format!("expected `func`, `rel` or `const`, found {}", Self::describe(other))),
            };
            self.next();
            let name = self.ident()?;
            let result = if kind == "const" {
                sig.clone().with_constant(&name)
            } else {
                self.expect(Tok::Slash)?;
                let arity_at = self.here();
                let arity: usize = match self.next().tok {
                    Tok::Ident(s) => match s.parse() {
                        Ok(a) => a,
                        Err(_) => return self.semantic(arity_at, format!("bad arity `{s}`")),
                    },
                    _ => return self.semantic(arity_at, "expected an arity"),
                };
                if kind == "func" {
                    sig.clone().with_function(&name, arity)
                } else {
                    sig.clone().with_relation(&name, arity)
                }
            };
            sig = match result {
                Ok(s) => s,
                Err(e) => return self.semantic(at, e.to_string()),
            };
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(sig)
    }

    fn over(&mut self, ctx: &ParseContext) -> PResult<Arc<Signature>> {
        self.expect_kw("over")?;
        let (line, column) = self.here();
        let name = self.ident()?;
        ctx.signatures.get(&name).cloned().ok_or(ParseError::UnknownSymbol { line, column, symbol: name })
    }

    fn theory(&mut self, ctx: &ParseContext) -> PResult<Theory> {
        self.expect_kw("theory")?;
        let name = self.ident()?;
        let sig = self.over(ctx)?;
        let mut theory = Theory::new(name, sig.clone());
        self.sig = Some(sig.clone());
        self.expect(Tok::LBrace)?;
        while *self.peek() != Tok::RBrace {
            if self.is_kw("axiom") {
                self.next();
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let sentence = self.sentence()?;
                theory.axioms.push(NamedAxiom { name, sentence });
            } else if self.is_kw("companion") {
                self.next();
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let axiom = self.companion()?;
                theory.companion_axioms.push(NamedCompanionAxiom { name, axiom });
            } else {
                return self.syntax(format!("expected `axiom` or `companion`, found {}", Self::describe(self.peek())));
            }
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        self.sig = None;
        Ok(theory)
    }

    fn element(&mut self, universe: &[String]) -> PResult<usize> {
        let at = self.here();
        let name = self.ident()?;
        match universe.iter().position(|e| *e == name) {
            Some(i) => Ok(i),
            None => self.semantic(at, format!("unknown element `{name}`")),
        }
    }

    fn element_tuple(&mut self, universe: &[String]) -> PResult<Vec<usize>> {
        if *self.peek() == Tok::LParen {
            self.next();
            let mut t = vec![self.element(universe)?];
            while *self.peek() == Tok::Comma {
                self.next();
                t.push(self.element(universe)?);
            }
            self.expect(Tok::RParen)?;
            Ok(t)
        } else {
            Ok(vec![self.element(universe)?])
        }
    }

    fn structure(&mut self, ctx: &ParseContext) -> PResult<FinStructure> {
        let start = self.here();
        self.expect_kw("structure")?;
        let name = self.ident()?;
        let sig = self.over(ctx)?;
        self.expect(Tok::LBrace)?;
        self.expect_kw("universe")?;
        self.expect(Tok::LBrace)?;
        let mut universe = Vec::new();
        loop {
            let at = self.here();
            let e = self.ident()?;
            if universe.contains(&e) {
                return self.semantic(at, format!("duplicate element `{e}`"));
            }
            universe.push(e);
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        self.expect(Tok::Semi)?;
        let n = universe.len();
        let mut functions: Vec<Vec<Option<usize>>> = sig.functions().iter().map(|(_, a)| vec![None; n.pow(*a as u32)]).collect();
        let mut relations: Vec<Vec<bool>> = sig.relations().iter().map(|(_, a)| vec![false; n.pow(*a as u32)]).collect();
        let mut constants: Vec<Option<usize>> = vec![None; sig.constants().len()];
        while *self.peek() != Tok::RBrace {
            let at = self.here();
            let (line, column) = at;
            let symbol = self.ident()?;
            match sig.kind_of(&symbol) {
                Some(SymbolKind::Function(arity)) => {
                    let fi = sig.function_index(&symbol).unwrap();
                    self.expect(Tok::Colon)?;
                    loop {
                        let entry_at = self.here();
                        let args = self.element_tuple(&universe)?;
                        if args.len() != arity {
                            return Err(ParseError::Arity {
                                line: entry_at.0,
                                column: entry_at.1,
                                symbol,
                                expected: arity,
                                found: args.len(),
                            });
                        }
                        self.expect(Tok::Arrow)?;
                        let value = self.element(&universe)?;
                        let slot = &mut functions[fi][tuple_index(n, &args)];
                        if slot.is_some_and(|v| v != value) {
                            return self.semantic(entry_at, format!("`{symbol}` given two values at one tuple"));
                        }
                        *slot = Some(value);
                        if *self.peek() == Tok::Comma {
                            self.next();
                        } else {
                            break;
                        }
                    }
                }
                Some(SymbolKind::Relation(arity)) => {
                    let ri = sig.relation_index(&symbol).unwrap();
                    self.expect(Tok::Colon)?;
                    if *self.peek() != Tok::Semi {
                        loop {
                            let entry_at = self.here();
                            let t = self.element_tuple(&universe)?;
                            if t.len() != arity {
                                return Err(ParseError::Arity {
                                    line: entry_at.0,
                                    column: entry_at.1,
                                    symbol,
                                    expected: arity,
                                    found: t.len(),
                                });
                            }
                            relations[ri][tuple_index(n, &t)] = true;
                            if *self.peek() == Tok::Comma {
                                self.next();
                            } else {
                                break;
                            }
                        }
                    }
                }
                Some(SymbolKind::Constant) => {
                    let ci = sig.constant_index(&symbol).unwrap();
                    self.expect(Tok::Eq)?;
                    constants[ci] = Some(self.element(&universe)?);
                }
                None => return Err(ParseError::UnknownSymbol { line, column, symbol }),
            }
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        let mut tables = Vec::with_capacity(functions.len());
        for (fi, table) in functions.into_iter().enumerate() {
            let (symbol, arity) = &sig.functions()[fi];
            let mut full = Vec::with_capacity(table.len());
            for (idx, v) in table.into_iter().enumerate() {
                match v {
                    Some(v) => full.push(v),
                    None => {
                        let args = crate::structures::tuple_at(n, *arity, idx);
                        let args: Vec<&str> = args.iter().map(|&a| universe[a].as_str()).collect();
                        return self.semantic(start, format!("function `{symbol}` is not total: no value at ({})", args.join(", ")));
                    }
                }
            }
            tables.push(full);
        }
        let mut consts = Vec::with_capacity(constants.len());
        for (ci, c) in constants.into_iter().enumerate() {
            match c {
                Some(v) => consts.push(v),
                None => return self.semantic(start, format!("constant `{}` has no value", sig.constants()[ci])),
            }
        }
        FinStructure::from_tables(name, sig, universe, tables, relations, consts).or_else(|e| self.semantic(start, e.to_string()))
    }

    fn formula_item(&mut self, ctx: &ParseContext) -> PResult<(String, Arc<Signature>, PositiveFormula)> {
        self.expect_kw("formula")?;
        let name = self.ident()?;
        let sig = self.over(ctx)?;
        self.expect(Tok::Colon)?;
        self.sig = Some(sig.clone());
        let f = self.formula()?;
        if *self.peek() == Tok::Arrow {
            return self.positivity("implication inside a positive formula");
        }
        self.sig = None;
        self.expect(Tok::Semi)?;
        Ok((name, sig, f))
    }

    fn document(&mut self, ctx: &ParseContext) -> PResult<Document> {
        let mut ctx = ctx.clone();
        let mut doc = Document::default();
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(s) if s == "signature" => {
                    let at = self.here();
                    let sig = Arc::new(self.signature()?);
                    if let Some(prev) = ctx.signatures.get(&sig.name) {
                        if **prev != *sig {
                            return self.semantic(at, format!("signature `{}` redefined differently", sig.name));
                        }
                    }
                    ctx.add_signature(sig.clone());
                    doc.signatures.push(sig);
                }
                Tok::Ident(s) if s == "theory" => doc.theories.push(self.theory(&ctx)?),
                Tok::Ident(s) if s == "structure" => doc.structures.push(self.structure(&ctx)?),
                Tok::Ident(s) if s == "formula" => doc.formulas.push(self.formula_item(&ctx)?),
                other => return self.syntax(format!("expected an item, found {}", Self::describe(&other))),
            }
        }
        Ok(doc)
    }

    fn finish(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::Arrow => self.positivity("implication inside a positive formula"),
            other => self.syntax(format!("unexpected trailing {}", Self::describe(other))),
        }
    }
}

pub fn parse_signature(src: &str) -> Result<Signature, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.signature()?;
    p.finish()?;
    Ok(s)
}

pub fn parse_theory(src: &str, ctx: &ParseContext) -> Result<Theory, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.theory(ctx)?;
    p.finish()?;
    Ok(t)
}

pub fn parse_structure(src: &str, ctx: &ParseContext) -> Result<FinStructure, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.structure(ctx)?;
    p.finish()?;
    Ok(s)
}

/// A positive formula over `sig`.
pub fn parse_formula(src: &str, sig: &Signature) -> Result<PositiveFormula, ParseError> {
    let mut p = Parser::new(src)?;
    p.sig = Some(Arc::new(sig.clone()));
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// An h-inductive sentence (or h-universal `not ...`) over `sig`.
pub fn parse_sentence(src: &str, sig: &Signature) -> Result<HInductiveSentence, ParseError> {
    let mut p = Parser::new(src)?;
    p.sig = Some(Arc::new(sig.clone()));
    let s = p.sentence()?;
    p.finish()?;
    Ok(s)
}

pub fn parse_document(src: &str, ctx: &ParseContext) -> Result<Document, ParseError> {
    Parser::new(src)?.document(ctx)
}

/// Parses one object of the requested kind. Bare formulas use
/// `ctx.default_signature`.
pub fn parse(src: &str, kind: ParsedKind, ctx: &ParseContext) -> Result<Parsed, ParseError> {
    match kind {
        ParsedKind::Signature => parse_signature(src).map(|s| Parsed::Signature(Arc::new(s))),
        ParsedKind::Structure => parse_structure(src, ctx).map(Parsed::Structure),
        ParsedKind::Theory => parse_theory(src, ctx).map(Parsed::Theory),
        ParsedKind::Formula => {
            let sig = ctx.default_signature.as_ref().ok_or(ParseError::Semantic {
                line: 1,
                column: 1,
                message: "no signature in scope for a bare formula".into(),
            })?;
            parse_formula(src, sig).map(Parsed::Formula)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unary() -> Arc<Signature> {
        Arc::new(parse_signature("signature S { func f/1; }").unwrap())
    }

    #[test]
    fn exists_formula_has_one_free_var() {
        let f = parse_formula("exists y. f(x) = y", &unary()).unwrap();
        assert!(matches!(f, PositiveFormula::Exists(ref v, _) if v == &["y".to_string()]));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn h_universal_axiom() {
        let s = parse_sentence("not exists x. f(f(x)) = x", &unary()).unwrap();
        assert!(s.is_h_universal());
        assert!(s.vars.is_empty());
    }

    #[test]
    fn negation_in_positive_context() {
        let err = parse_formula("not f(x) = x", &unary()).unwrap_err();
        assert_eq!(err.category(), "positivity");
        let err = parse_formula("f(x) = x and (f(x) = x -> x = x)", &unary()).unwrap_err();
        assert_eq!(err.category(), "positivity");
        let err = parse_sentence("forall x. f(x) = x -> not x = x", &unary()).unwrap_err();
        assert_eq!(err.category(), "positivity");
        let err = parse_formula("forall x. f(x) = x", &unary()).unwrap_err();
        assert_eq!(err.category(), "positivity");
    }

    #[test]
    fn error_categories_are_distinct() {
        let sig = unary();
        assert_eq!(parse_formula("g(x) = x", &sig).unwrap_err().category(), "unknown-symbol");
        assert_eq!(parse_formula("f(x, x) = x", &sig).unwrap_err().category(), "arity");
        assert_eq!(parse_formula("f(x) = ", &sig).unwrap_err().category(), "syntax");
        match parse_formula("f(x) =\n  )", &sig).unwrap_err() {
            ParseError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn document_with_all_items() {
        let src = "
            # comment
            signature S { func f/1; rel R/2; const c; }
            theory T over S { axiom inj: forall x y. f(x) = f(y) -> x = y; axiom nofix: not exists x. f(x) = x; }
            structure A over S { universe {a0, a1, a2}; f: a0 -> a1, a1 -> a2, a2 -> a0; R: (a0,a1), (a1,a2); c = a0; }
            formula phi over S: exists y. R(x, y) and c = x;
        ";
        let doc = parse_document(src, &ParseContext::new()).unwrap();
        assert_eq!(doc.signatures.len(), 1);
        assert_eq!(doc.theories[0].axioms.len(), 2);
        let a = &doc.structures[0];
        assert_eq!(a.apply(0, &[2]), 0);
        assert!(a.holds(0, &[1, 2]));
        assert!(!a.holds(0, &[2, 1]));
        assert_eq!(a.constant(0), 0);
        assert_eq!(doc.formulas[0].0, "phi");
    }

    #[test]
    fn structure_must_be_total() {
        let ctx = ParseContext::new().with_signature(unary());
        let err = parse_structure("structure A over S { universe {a, b}; f: a -> b; }", &ctx).unwrap_err();
        assert!(err.to_string().contains("not total"), "{err}");
        let err = parse_structure("structure A over S { universe {a}; f: a -> z; }", &ctx).unwrap_err();
        assert!(err.to_string().contains("unknown element"), "{err}");
    }
}
