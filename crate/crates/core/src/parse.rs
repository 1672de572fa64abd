//! Text syntax for mixed words.
//!
//! ```text
//! word := term {"*" term}
//! term := atom ["^" int]
//! atom := variable | name | "[" word "," word "]" | "(" word ")"
//! variable := "y" int
//! ```
//!
//! Names are resolved by a caller-supplied closure, so the same parser
//! serves every group.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::grigorchuk::GrigWord;
use crate::group::Group;
use crate::thompson::{generator_x, PlHomeo};
use crate::words::{Letter, MixedWord, VarLetter, WordError};

pub const SYMBOL_TABLE_VERSION: u32 = 1;

/// Named constants for the word parser, stored as versioned JSON:
/// `{"version": 1, "symbols": {"h1": {"version": 1, "breakpoints": [...]}}}`.
/// An optional `words` map binds names to Grigorchuk words in text form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolTable {
    pub version: u32,
    #[serde(deserialize_with = "unique_map")]
    pub symbols: BTreeMap<String, PlHomeo>,
    #[serde(
        default,
        deserialize_with = "unique_map",
        skip_serializing_if = "BTreeMap::is_empty"
    )]
    pub words: BTreeMap<String, GrigWord>,
}

/// Deserializes a JSON object into a map, rejecting repeated keys.
fn unique_map<'de, D, V>(d: D) -> Result<BTreeMap<String, V>, D::Error>
where
    D: serde::Deserializer<'de>,
    V: Deserialize<'de>,
{
    struct Visit<V>(std::marker::PhantomData<V>);
    impl<'de, V: Deserialize<'de>> serde::de::Visitor<'de> for Visit<V> {
        type Value = BTreeMap<String, V>;
        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a map from names to values")
        }
        fn visit_map<A: serde::de::MapAccess<'de>>(self, mut m: A) -> Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((k, v)) = m.next_entry::<String, V>()? {
                if out.contains_key(&k) {
                    return Err(serde::de::Error::custom(format!("name `{k}` bound twice")));
                }
                out.insert(k, v);
            }
            Ok(out)
        }
    }
    d.deserialize_map(Visit(std::marker::PhantomData))
}

/// A valid table name: an identifier of the word grammar that is not a variable.
pub fn is_symbol_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    let is_var = name
        .strip_prefix('y')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
    head_ok && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_var
}

impl SymbolTable {
    pub fn new() -> Self {
        SymbolTable {
            version: SYMBOL_TABLE_VERSION,
            symbols: BTreeMap::new(),
            words: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: impl Into<String>, g: PlHomeo) {
        self.symbols.insert(name.into(), g);
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let t: SymbolTable = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if t.version != SYMBOL_TABLE_VERSION {
            return Err(format!("unsupported symbol table version {}", t.version));
        }
        for name in t.symbols.keys().chain(t.words.keys()) {
            if !is_symbol_name(name) {
                return Err(format!("`{name}` is not a valid symbol name"));
            }
        }
        if let Some(name) = t.symbols.keys().find(|k| t.words.contains_key(*k)) {
            return Err(format!("name `{name}` bound twice"));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("symbol table serializes")
    }

    /// Reverse lookup used when printing words: table names first, then `x<n>`.
    pub fn name_of(&self, g: &PlHomeo) -> String {
        if let Some((k, _)) = self.symbols.iter().find(|(_, v)| *v == g) {
            return k.clone();
        }
        for n in 0..16 {
            let x = generator_x(n);
            if &x == g {
                return format!("x{n}");
            }
            if x.invert() == *g {
                return format!("x{n}^-1");
            }
        }
        format!("{{{g}}}")
    }
}

/// Resolves table names, then `x<n>` for the standard generators, then
/// `{[(0,0), ..., (1,1)]}` breakpoint literals.
pub fn thompson_resolver(table: &SymbolTable) -> impl Fn(&str) -> Option<PlHomeo> + '_ {
    move |name| {
        if let Some(inner) = name.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            return inner.parse().ok();
        }
        if let Some(g) = table.symbols.get(name) {
            return Some(g.clone());
        }
        let n: u32 = name.strip_prefix('x')?.parse().ok()?;
        (n <= 1024).then(|| generator_x(n))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Star,
    Caret,
    Minus,
    LBrack,
    RBrack,
    Comma,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, WordError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '-' => Tok::Minus,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().map_err(|_| WordError::Syntax {
                    pos: start,
                    msg: "integer too large".into(),
                })?;
                out.push((start, Tok::Int(n)));
                continue;
            }
            '{' => {
                // inline element literal, handed to the resolver verbatim
                let close = text[start..].find('}').ok_or(WordError::Syntax {
                    pos: start,
                    msg: "unclosed `{`".into(),
                })?;
                i = start + close + 1;
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(WordError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Parser options. `alias` names an extra identifier read as `y1`
/// (the stable letter of an HNN word, for instance).
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub arity: Option<usize>,
    pub alias: Option<String>,
}

struct Parser<'a, G, R> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    resolve: &'a R,
    opts: &'a ParseOptions,
    _g: std::marker::PhantomData<G>,
}

impl<'a, G: Group, R: Fn(&str) -> Option<G>> Parser<'a, G, R> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, WordError> {
        Err(WordError::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), WordError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn word(&mut self) -> Result<MixedWord<G>, WordError> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = acc.mul(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MixedWord<G>, WordError> {
        let a = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(a);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                if n > 1_000_000 {
                    return self.err("exponent too large");
                }
                Ok(a.pow(if neg { -n } else { n }))
            }
            _ => self.err("expected integer exponent"),
        }
    }

    fn variable_index(&self, name: &str) -> Option<usize> {
        if self.opts.alias.as_deref() == Some(name) {
            return Some(1);
        }
        let digits = name.strip_prefix('y')?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        digits.parse().ok()
    }

    fn atom(&mut self) -> Result<MixedWord<G>, WordError> {
        let start = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.variable_index(&name) {
                    if i == 0 {
                        return Err(WordError::Syntax {
                            pos: start,
                            msg: "variables are numbered from y1".into(),
                        });
                    }
                    if let Some(a) = self.opts.arity {
                        if i > a {
                            return Err(WordError::Arity {
                                expected: a,
                                got: i,
                            });
                        }
                    }
                    return Ok(MixedWord::new(
                        vec![Letter::Var(VarLetter::new(i, false))],
                        i,
                    ));
                }
                match (self.resolve)(&name) {
                    Some(g) => Ok(MixedWord::constant(g)),
                    None => Err(WordError::UnknownSymbol(name)),
                }
            }
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(MixedWord::empty(0))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.word()?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(MixedWord::commutator(&a, &b))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(a)
            }
            _ => self.err("expected a variable, a name, `[` or `(`"),
        }
    }
}

pub fn parse_word_with<G: Group>(
    text: &str,
    resolve: &impl Fn(&str) -> Option<G>,
    opts: &ParseOptions,
) -> Result<MixedWord<G>, WordError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        resolve,
        opts,
        _g: std::marker::PhantomData,
    };
    let w = p.word()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(match opts.arity {
        Some(a) => w.with_arity(a),
        None => w,
    })
}

/// Parses `text`, resolving constant names with `resolve`.
pub fn parse_word<G: Group>(
    text: &str,
    resolve: &impl Fn(&str) -> Option<G>,
) -> Result<MixedWord<G>, WordError> {
    parse_word_with(text, resolve, &ParseOptions::default())
}
