//! Argument decoding shared by all subcommands. Malformed values are usage
//! errors and name the offending token.

use std::fmt;
use std::path::Path;

use anyhow::Result;
use flimits_core::grigorchuk::{GrigWord, Vertex};
use flimits_core::parse::{parse_word_with, thompson_resolver, ParseOptions};
use flimits_core::{Dyadic, IntervalSet, MixedWord, PlHomeo, Rational, SymbolTable};

/// Exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(flag: &str, token: &str, why: impl fmt::Display) -> anyhow::Error {
    Usage(format!("invalid value `{token}` for {flag}: {why}")).into()
}

pub fn read_file(flag: &str, path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(flag, &path.display().to_string(), e))
}

pub struct Ctx {
    pub table: SymbolTable,
}

impl Ctx {
    pub fn load(symbols: Option<&Path>) -> Result<Ctx> {
        let table = match symbols {
            Some(p) => {
                let text = read_file("--symbols", p)?;
                SymbolTable::from_json(&text)
                    .map_err(|e| usage("--symbols", &p.display().to_string(), e))?
            }
            None => SymbolTable::new(),
        };
        Ok(Ctx { table })
    }

    /// An element of F: `@file.json`, a breakpoint list `[(0,0), ...]`, or a
    /// constant word such as `x0^-1 * h`.
    pub fn elem(&self, flag: &str, text: &str) -> Result<PlHomeo> {
        if let Some(path) = text.strip_prefix('@') {
            let body = read_file(flag, Path::new(path))?;
            return serde_json::from_str(&body).map_err(|e| usage(flag, text, e));
        }
        if text.trim_start().starts_with("[(") {
            return text.parse().map_err(|e| usage(flag, text, e));
        }
        let opts = ParseOptions {
            arity: Some(0),
            alias: None,
        };
        let w = parse_word_with(text, &thompson_resolver(&self.table), &opts)
            .map_err(|e| usage(flag, text, e))?;
        Ok(w.evaluate(&[]).expect("arity 0 word"))
    }

    pub fn elems(&self, flag: &str, texts: &[String]) -> Result<Vec<PlHomeo>> {
        texts.iter().map(|t| self.elem(flag, t)).collect()
    }

    pub fn word(&self, flag: &str, text: &str, alias: Option<&str>) -> Result<MixedWord<PlHomeo>> {
        let opts = ParseOptions {
            arity: None,
            alias: alias.map(str::to_string),
        };
        parse_word_with(text, &thompson_resolver(&self.table), &opts).map_err(|e| usage(flag, text, e))
    }

    pub fn words(&self, flag: &str, texts: &[String]) -> Result<Vec<MixedWord<PlHomeo>>> {
        texts.iter().map(|t| self.word(flag, t, None)).collect()
    }

    /// Table names print back as themselves; other constants as `x<n>` or
    /// a `{breakpoints}` literal, all of which parse again.
    pub fn render(&self, w: &MixedWord<PlHomeo>) -> String {
        w.render(|g| self.table.name_of(g))
    }

    /// A Grigorchuk word, or a name bound in the table's `words` map.
    pub fn grig(&self, flag: &str, text: &str) -> Result<GrigWord> {
        if let Some(w) = self.table.words.get(text.trim()) {
            return Ok(w.clone());
        }
        text.parse().map_err(|e| usage(flag, text, e))
    }
}

pub fn dyadic(flag: &str, text: &str) -> Result<Dyadic> {
    text.parse().map_err(|e| usage(flag, text, e))
}

pub fn rational(flag: &str, text: &str) -> Result<Rational> {
    flimits_core::dyadic::parse_rational(text).map_err(|e| usage(flag, text, e))
}

/// A comma-separated list of dyadics.
pub fn dyadic_list(flag: &str, text: &str) -> Result<Vec<Dyadic>> {
    text.split(',').map(|t| dyadic(flag, t.trim())).collect()
}

pub fn dyadic_pair(flag: &str, text: &str) -> Result<(Dyadic, Dyadic)> {
    match dyadic_list(flag, text)?.as_slice() {
        [a, b] => Ok((a.clone(), b.clone())),
        _ => Err(usage(flag, text, "expected two comma-separated dyadics")),
    }
}

pub fn interval_set(flag: &str, text: &str) -> Result<IntervalSet> {
    text.parse().map_err(|e: String| usage(flag, text, e))
}

pub fn vertex(flag: &str, text: &str) -> Result<Vertex> {
    text.parse().map_err(|e| usage(flag, text, e))
}

pub fn element_json(g: &PlHomeo) -> serde_json::Value {
    serde_json::to_value(g).expect("elements serialize")
}
