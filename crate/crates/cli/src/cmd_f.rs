use anyhow::Result;
use clap::Subcommand;
use flimits_core::dyadic::format_rational;
use flimits_core::{iota, partition_map, Dyadic};
use serde_json::json;

use crate::input::{self, element_json, Ctx};
use crate::Out;

#[derive(Subcommand)]
pub enum Cmd {
    /// f(p) for a rational point p.
    Eval {
        #[arg(long)]
        elem: String,
        #[arg(long)]
        point: String,
    },
    /// The product f·g (g applied first).
    Compose {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    Inv {
        #[arg(long)]
        elem: String,
    },
    /// Support, or its closure.
    Supp {
        #[arg(long)]
        elem: String,
        #[arg(long)]
        closure: bool,
    },
    /// Commuting one-bump fragments whose product is the element.
    Defrag {
        #[arg(long)]
        elem: String,
    },
    Divpoints {
        #[arg(long)]
        elem: String,
    },
    /// An element of F taking one dyadic partition to another.
    PartitionMap {
        #[arg(long, value_name = "P0,P1,...")]
        from: String,
        #[arg(long, value_name = "Q0,Q1,...")]
        to: String,
    },
    /// The copy of an element rescaled into [a,b].
    Iota {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        elem: String,
    },
    /// The k with f = h^k, if any.
    Ispower {
        #[arg(long)]
        elem: String,
        #[arg(long)]
        base: String,
    },
}

fn element_out(key: &str, g: &flimits_core::PlHomeo) -> Out {
    Out::new(g.to_string(), json!({ key: element_json(g) }))
}

pub fn run(ctx: &Ctx, cmd: &Cmd) -> Result<Out> {
    Ok(match cmd {
        Cmd::Eval { elem, point } => {
            let f = ctx.elem("--elem", elem)?;
            let p = input::rational("--point", point)?;
            if p < Dyadic::zero().to_rational() || p > Dyadic::one().to_rational() {
                return Err(input::usage("--point", point, "not in [0,1]"));
            }
            let v = f.evaluate(&p)?;
            Out::new(v.to_string(), json!({ "value": v.to_string(), "dyadic": format_rational(&v) }))
        }
        Cmd::Compose { f, g } => {
            let f = ctx.elem("--f", f)?;
            let g = ctx.elem("--g", g)?;
            element_out("element", &f.compose(&g))
        }
        Cmd::Inv { elem } => element_out("element", &ctx.elem("--elem", elem)?.invert()),
        Cmd::Supp { elem, closure } => {
            let f = ctx.elem("--elem", elem)?;
            let s = if *closure { f.support_closure() } else { f.support() };
            Out::new(s.to_string(), json!({ "support": s.to_string(), "closure": closure }))
        }
        Cmd::Defrag { elem } => {
            let parts = ctx.elem("--elem", elem)?.defragmentation();
            let text: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
            Out::new(
                text.join("\n"),
                json!({ "fragments": parts.iter().map(element_json).collect::<Vec<_>>() }),
            )
        }
        Cmd::Divpoints { elem } => {
            let pts = ctx.elem("--elem", elem)?.dividing_points();
            let text: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
            Out::new(text.join(", "), json!({ "points": text }))
        }
        Cmd::PartitionMap { from, to } => {
            let s = input::dyadic_list("--from", from)?;
            let t = input::dyadic_list("--to", to)?;
            element_out("element", &partition_map(&s, &t)?)
        }
        Cmd::Iota { a, b, elem } => {
            let a = input::dyadic("--a", a)?;
            let b = input::dyadic("--b", b)?;
            let f = ctx.elem("--elem", elem)?;
            element_out("element", &iota(&a, &b, &f)?)
        }
        Cmd::Ispower { elem, base } => {
            let f = ctx.elem("--elem", elem)?;
            let h = ctx.elem("--base", base)?;
            match f.is_power_of(&h) {
                Some(k) => Out::new(k.to_string(), json!({ "power": k })),
                None => Out::new("no", json!({ "power": null })),
            }
        }
    })
}
