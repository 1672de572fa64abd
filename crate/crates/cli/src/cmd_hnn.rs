use anyhow::Result;
use clap::{Args, Subcommand, ValueEnum};
use flimits_core::hnn::{britton_reduce, is_trivial_in_hnn, oracle_cyclic, oracle_h_lt1, HnnWord};
use flimits_core::MembershipOracle;
use serde_json::json;

use crate::input::{self, Ctx};
use crate::Out;

#[derive(Clone, Copy, ValueEnum)]
pub enum OracleName {
    /// Elements fixing a neighbourhood of 1.
    HLt1,
    /// The cyclic subgroup of --generator.
    Cyclic,
}

#[derive(Args)]
pub struct Input {
    /// A word in elements of F and the stable letter `t`.
    #[arg(long)]
    word: String,
    #[arg(long, value_enum, default_value = "h-lt1")]
    oracle: OracleName,
    #[arg(long, value_name = "ELEM", required_if_eq("oracle", "cyclic"))]
    generator: Option<String>,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Remove pinches until none can be decided.
    Reduce(Input),
    /// Decide whether the word is trivial.
    #[command(alias = "t")]
    Trivial(Input),
}

fn setup(ctx: &Ctx, a: &Input) -> Result<(HnnWord, Box<dyn MembershipOracle>)> {
    let w = ctx.word("--word", &a.word, Some("t"))?;
    if w.arity() > 1 {
        return Err(input::usage("--word", &a.word, "only the stable letter t may appear"));
    }
    let w = HnnWord::from_mixed(&w).map_err(|e| input::usage("--word", &a.word, e))?;
    let oracle: Box<dyn MembershipOracle> = match a.oracle {
        OracleName::HLt1 => Box::new(oracle_h_lt1()),
        OracleName::Cyclic => {
            let text = a.generator.as_deref().unwrap_or_default();
            let h = ctx.elem("--generator", text)?;
            Box::new(oracle_cyclic(&h).map_err(|e| input::usage("--generator", text, e))?)
        }
    };
    Ok((w, oracle))
}

pub fn run(ctx: &Ctx, cmd: &Cmd) -> Result<Out> {
    Ok(match cmd {
        Cmd::Reduce(a) => {
            let (w, oracle) = setup(ctx, a)?;
            let r = britton_reduce(&w, oracle.as_ref())?;
            let text = r.render(|g| ctx.table.name_of(g));
            Out::new(
                &text,
                json!({
                    "word": text,
                    "stable_letters": r.stable_count(),
                    "pinch_free": !r.has_pinch(oracle.as_ref()),
                }),
            )
        }
        Cmd::Trivial(a) => {
            let (w, oracle) = setup(ctx, a)?;
            let v = is_trivial_in_hnn(&w, oracle.as_ref())?;
            Out::new(v.to_string(), json!({ "trivial": v }))
        }
    })
}
