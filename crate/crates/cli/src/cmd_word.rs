use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use flimits_core::words::{is_law_sampled, law_lwc2m, thompson_sampler, LawCheck};
use flimits_core::MixedWord;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::input::{self, element_json, Ctx, Usage};
use crate::Out;

#[derive(Subcommand)]
pub enum Cmd {
    /// Parse and freely reduce.
    Parse {
        #[arg(long)]
        word: String,
    },
    /// The cyclically reduced form u_n v_n ... u_1 v_1.
    Reduce {
        #[arg(long)]
        word: String,
    },
    /// The oscillation region O_w.
    Ow {
        #[arg(long)]
        word: String,
    },
    /// Whether O_w meets the region.
    Oscillating {
        #[arg(long)]
        word: String,
        #[arg(long, value_name = "SET")]
        region: String,
    },
    /// Substitute elements for y1, y2, ...
    Eval {
        #[arg(long)]
        word: String,
        #[arg(long = "arg", value_name = "ELEM")]
        args: Vec<String>,
    },
    /// Search for a counterexample on seeded random tuples.
    LawCheck {
        #[command(flatten)]
        law: LawSource,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Maximal generator length of sampled elements.
        #[arg(long, default_value_t = 20)]
        max_len: usize,
    },
    /// The law with constants for two disjoint intervals.
    IntervalLaw {
        #[command(flatten)]
        law: IntervalLawArgs,
    },
}

#[derive(Args)]
pub struct LawSource {
    #[arg(long, conflicts_with_all = ["i1", "i2", "h1", "h2"])]
    word: Option<String>,
    #[command(flatten)]
    interval_law: IntervalLawOpt,
}

#[derive(Args)]
pub struct IntervalLawOpt {
    #[arg(long, value_name = "P1,Q1", requires_all = ["i2", "h1", "h2"])]
    i1: Option<String>,
    #[arg(long, value_name = "P2,Q2")]
    i2: Option<String>,
    #[arg(long)]
    h1: Option<String>,
    #[arg(long)]
    h2: Option<String>,
}

#[derive(Args)]
pub struct IntervalLawArgs {
    #[arg(long, value_name = "P1,Q1")]
    i1: String,
    #[arg(long, value_name = "P2,Q2")]
    i2: String,
    #[arg(long)]
    h1: String,
    #[arg(long)]
    h2: String,
}

fn interval_law(ctx: &Ctx, i1: &str, i2: &str, h1: &str, h2: &str) -> Result<MixedWord<flimits_core::PlHomeo>> {
    let (p1, q1) = input::dyadic_pair("--i1", i1)?;
    let (p2, q2) = input::dyadic_pair("--i2", i2)?;
    let h1 = ctx.elem("--h1", h1)?;
    let h2 = ctx.elem("--h2", h2)?;
    Ok(law_lwc2m((&p1, &q1), (&p2, &q2), &h1, &h2)?)
}

pub fn run(ctx: &Ctx, cmd: &Cmd) -> Result<Out> {
    Ok(match cmd {
        Cmd::Parse { word } => {
            let w = ctx.word("--word", word, None)?;
            let text = ctx.render(&w);
            Out::new(
                &text,
                json!({ "word": text, "arity": w.arity(), "length": w.len() }),
            )
        }
        Cmd::Reduce { word } => {
            let w = ctx.word("--word", word, None)?;
            let f = w.to_reduced_form()?;
            let mut text = format!("n = {}\n", f.n());
            let mut blocks = Vec::new();
            for (i, b) in f.blocks.iter().enumerate() {
                let u = MixedWord::new(
                    b.vars.iter().map(|v| flimits_core::Letter::Var(*v)).collect(),
                    f.arity,
                );
                let v = MixedWord::constant(b.constant.clone());
                let (u, v) = (ctx.render(&u), ctx.render(&v));
                text.push_str(&format!("u{} = {u}\nv{} = {v}\n", i + 1, i + 1));
                blocks.push(json!({ "u": u, "v": v }));
            }
            let pure: Vec<String> = f.pure.iter().map(|v| v.to_string()).collect();
            if !pure.is_empty() {
                text.push_str(&format!("pure = {}\n", pure.join(" ")));
            }
            let form = ctx.render(&f.to_word());
            let conj = ctx.render(&f.conjugator);
            text.push_str(&format!("form = {form}\nconjugator = {conj}"));
            Out::new(
                text,
                json!({ "n": f.n(), "blocks": blocks, "pure": pure, "form": form, "conjugator": conj }),
            )
        }
        Cmd::Ow { word } => {
            let f = ctx.word("--word", word, None)?.to_reduced_form()?;
            let s = f.omega_set();
            Out::new(s.to_string(), json!({ "omega": s.to_string() }))
        }
        Cmd::Oscillating { word, region } => {
            let w = ctx.word("--word", word, None)?;
            let r = input::interval_set("--region", region)?;
            let yes = flimits_core::words::is_explicitly_oscillating(&w, &r);
            Out::new(if yes { "yes" } else { "no" }, json!({ "oscillating": yes }))
        }
        Cmd::Eval { word, args } => {
            let w = ctx.word("--word", word, None)?;
            let args = ctx.elems("--arg", args)?;
            if args.len() < w.arity() {
                bail!(Usage(format!(
                    "word uses y{} but only {} --arg given",
                    w.arity(),
                    args.len()
                )));
            }
            let n = args.len();
            let g = w.with_arity(n).evaluate(&args)?;
            Out::new(g.to_string(), json!({ "element": element_json(&g) }))
        }
        Cmd::LawCheck {
            law,
            samples,
            seed,
            max_len,
        } => {
            let w = match (&law.word, &law.interval_law) {
                (Some(text), _) => ctx.word("--word", text, None)?,
                (
                    None,
                    IntervalLawOpt {
                        i1: Some(i1),
                        i2: Some(i2),
                        h1: Some(h1),
                        h2: Some(h2),
                    },
                ) => interval_law(ctx, i1, i2, h1, h2)?,
                _ => bail!(Usage("law-check needs --word or --i1/--i2/--h1/--h2".into())),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let arity = w.arity();
            match is_law_sampled(&w, thompson_sampler(&mut rng, arity, *max_len), *samples)? {
                LawCheck::Holds { samples } => Out::new(
                    format!("holds on {samples} samples"),
                    json!({ "holds": true, "samples": samples }),
                ),
                LawCheck::Counterexample(tuple) => {
                    let lines: Vec<String> =
                        tuple.iter().enumerate().map(|(i, g)| format!("y{} = {g}", i + 1)).collect();
                    Out::new(
                        format!("counterexample\n{}", lines.join("\n")),
                        json!({ "holds": false, "counterexample": tuple.iter().map(element_json).collect::<Vec<_>>() }),
                    )
                }
            }
        }
        Cmd::IntervalLaw { law } => {
            let w = interval_law(ctx, &law.i1, &law.i2, &law.h1, &law.h2)?;
            let text = ctx.render(&w);
            Out::new(&text, json!({ "word": text, "length": w.len() }))
        }
    })
}
