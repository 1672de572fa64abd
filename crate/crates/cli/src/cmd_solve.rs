use anyhow::{bail, Result};
use clap::Subcommand;
use flimits_core::solvers::{
    free_pair_witness, solve_explicit_oscillating, solve_h1, solve_nontrivial_product, H1Budget,
    InequalitySystem,
};
use flimits_core::{Certificate, PlHomeo};
use serde_json::json;

use crate::input::{self, element_json, Ctx, Usage};
use crate::Out;

#[derive(Subcommand)]
pub enum Cmd {
    /// Words with nontrivial product of constants, solved by rescaling h.
    Iva {
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        #[arg(long = "h", required = true, value_name = "ELEM")]
        h: Vec<String>,
    },
    /// One-variable inequalities with g commuting with given elements of H_{<1}.
    H1 {
        #[arg(long = "e", value_name = "ELEM")]
        e: Vec<String>,
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        #[arg(long, default_value_t = H1Budget::default().max_k)]
        max_k: u32,
        #[arg(long, default_value_t = H1Budget::default().candidates)]
        budget: usize,
    },
    /// Explicitly oscillating inequalities, one region per word.
    Oscillating {
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        #[arg(long = "region", required = true, value_name = "SET")]
        regions: Vec<String>,
        /// Solutions must commute with these.
        #[arg(long = "commute", value_name = "ELEM")]
        commute: Vec<String>,
        /// Solutions must be supported inside this set.
        #[arg(long, value_name = "SET")]
        support: Option<String>,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        seed: u64,
    },
    /// g such that h and g satisfy no relation of length <= L.
    FreePair {
        #[arg(long)]
        elem: String,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn cert_text(c: &Certificate) -> String {
    c.checks
        .iter()
        .map(|k| format!("{} {}", if k.holds { "ok  " } else { "FAIL" }, k.constraint))
        .collect::<Vec<_>>()
        .join("\n")
}

fn tuple_text(t: &[PlHomeo]) -> String {
    t.iter()
        .enumerate()
        .map(|(i, g)| format!("g{} = {g}", i + 1))
        .collect::<Vec<_>>()
        .join("\n")
}

fn tuple_json(t: &[PlHomeo]) -> Vec<serde_json::Value> {
    t.iter().map(element_json).collect()
}

pub fn run(ctx: &Ctx, cmd: &Cmd) -> Result<Out> {
    Ok(match cmd {
        Cmd::Iva { words, h } => {
            let forms = ctx
                .words("--word", words)?
                .iter()
                .zip(words)
                .map(|(w, t)| w.to_reduced_form().map_err(|e| input::usage("--word", t, e)))
                .collect::<Result<Vec<_>>>()?;
            let h = ctx.elems("--h", h)?;
            let s = solve_nontrivial_product(&forms, &h)?;
            let wit: Vec<String> = s
                .witnesses
                .iter()
                .map(|(p, q)| format!("w(g)({p}) = {q}"))
                .collect();
            Out::new(
                format!(
                    "{}\nU = ({}, {})\n{}\n{}",
                    tuple_text(&s.tuple),
                    s.interval.0,
                    s.interval.1,
                    wit.join("\n"),
                    cert_text(&s.certificate)
                ),
                json!({
                    "tuple": tuple_json(&s.tuple),
                    "interval": [s.interval.0, s.interval.1],
                    "witnesses": s.witnesses,
                    "certificate": s.certificate,
                }),
            )
        }
        Cmd::H1 {
            e,
            words,
            max_k,
            budget,
        } => {
            let e = ctx.elems("--e", e)?;
            let w = ctx.words("--word", words)?;
            let s = solve_h1(
                &e,
                &w,
                H1Budget {
                    max_k: *max_k,
                    candidates: *budget,
                },
            )?;
            Out::new(
                format!(
                    "g = {}\nk = {}\ntried = {}\n{}",
                    s.element,
                    s.k,
                    s.tried,
                    cert_text(&s.certificate)
                ),
                json!({
                    "element": element_json(&s.element),
                    "k": s.k,
                    "tried": s.tried,
                    "certificate": s.certificate,
                }),
            )
        }
        Cmd::Oscillating {
            words,
            regions,
            commute,
            support,
            budget,
            seed,
        } => {
            if words.len() != regions.len() {
                bail!(Usage(format!(
                    "{} --word but {} --region; give one region per word",
                    words.len(),
                    regions.len()
                )));
            }
            let system = InequalitySystem {
                words: ctx.words("--word", words)?,
                commute_with: ctx.elems("--commute", commute)?,
                support_region: support
                    .as_deref()
                    .map(|s| input::interval_set("--support", s))
                    .transpose()?,
            };
            let regions = regions
                .iter()
                .map(|r| input::interval_set("--region", r))
                .collect::<Result<Vec<_>>>()?;
            match solve_explicit_oscillating(&system, &regions, *budget, *seed)? {
                Some(s) => Out::new(
                    format!(
                        "{}\nallowed = {}\ntried = {}\n{}",
                        tuple_text(&s.tuple),
                        s.allowed_support,
                        s.tried,
                        cert_text(&s.certificate)
                    ),
                    json!({
                        "tuple": tuple_json(&s.tuple),
                        "allowed": s.allowed_support.to_string(),
                        "tried": s.tried,
                        "certificate": s.certificate,
                    }),
                ),
                None => bail!("no solution within {budget} candidates"),
            }
        }
        Cmd::FreePair {
            elem,
            length,
            budget,
            seed,
        } => {
            let h = ctx.elem("--elem", elem)?;
            let s = free_pair_witness(&h, *length, *budget, *seed)?;
            Out::new(
                format!(
                    "g = {}\nwords checked = {}\ntried = {}",
                    s.element, s.words_checked, s.tried
                ),
                json!({
                    "element": element_json(&s.element),
                    "length": s.length,
                    "words_checked": s.words_checked,
                    "tried": s.tried,
                }),
            )
        }
    })
}
