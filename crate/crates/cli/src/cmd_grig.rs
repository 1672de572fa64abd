use anyhow::{bail, Result};
use clap::Subcommand;
use flimits_core::grigorchuk::{
    branch_mixed_identity_check, rist_element, sigma_substitute, verify_rist_by_action, MixedCheck,
};
use flimits_core::{GrigWord, Group, Vertex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::input::{self, Ctx, Usage};
use crate::Out;

#[derive(Subcommand)]
pub enum Cmd {
    /// Word problem.
    Wp {
        #[arg(long)]
        word: String,
    },
    /// Image of a vertex, given as a 0/1 string.
    Act {
        #[arg(long)]
        word: String,
        #[arg(long)]
        vertex: String,
    },
    /// Order, searched over powers of 2 up to 2^max-exp.
    Order {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 20)]
        max_exp: u32,
    },
    /// Apply the substitution a->aca, b->d, c->b, d->c.
    Sigma {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        times: u32,
    },
    /// Shortest nontrivial element of the rigid stabilizer of a vertex.
    Rist {
        #[arg(long)]
        vertex: String,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    /// Sampled check of the mixed identity at three vertices of one level.
    MixedCheck {
        #[arg(long = "vertex", num_args = 1, required = true)]
        vertices: Vec<String>,
        /// Rigid-stabilizer elements, one per vertex; found by search if omitted.
        #[arg(long = "elem")]
        elems: Vec<String>,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        max_len: usize,
        /// Also require trivial portraits to this depth.
        #[arg(long)]
        depth: Option<usize>,
    },
}

pub fn run(ctx: &Ctx, cmd: &Cmd) -> Result<Out> {
    Ok(match cmd {
        Cmd::Wp { word } => {
            let w = ctx.grig("--word", word)?;
            let id = w.is_identity();
            Out::new(
                if id { "identity" } else { "not identity" },
                json!({ "identity": id, "reduced": w.to_string() }),
            )
        }
        Cmd::Act { word, vertex } => {
            let w = ctx.grig("--word", word)?;
            let v = input::vertex("--vertex", vertex)?;
            let img = w.act(&v);
            Out::new(img.to_string(), json!({ "vertex": img.to_string() }))
        }
        Cmd::Order { word, max_exp } => {
            let w = ctx.grig("--word", word)?;
            match w.order(*max_exp) {
                Some(n) => Out::new(n.to_string(), json!({ "order": n })),
                None => bail!("order exceeds 2^{max_exp}"),
            }
        }
        Cmd::Sigma { word, times } => {
            let mut w = ctx.grig("--word", word)?;
            for _ in 0..*times {
                w = sigma_substitute(&w);
            }
            Out::new(w.to_string(), json!({ "word": w.to_string() }))
        }
        Cmd::Rist { vertex, budget } => {
            let v = input::vertex("--vertex", vertex)?;
            let w = rist_element(&v, *budget)?;
            let ok = verify_rist_by_action(&w, &v, v.level() + 4);
            Out::new(
                w.to_string(),
                json!({ "word": w.to_string(), "verified_depth": v.level() + 4, "verified": ok }),
            )
        }
        Cmd::MixedCheck {
            vertices,
            elems,
            samples,
            seed,
            max_len,
            depth,
        } => {
            if vertices.len() != 3 {
                bail!(Usage(format!("expected 3 --vertex, got {}", vertices.len())));
            }
            if !elems.is_empty() && elems.len() != 3 {
                bail!(Usage(format!("expected 0 or 3 --elem, got {}", elems.len())));
            }
            let mut pairs: Vec<(Vertex, GrigWord)> = Vec::new();
            for (i, vt) in vertices.iter().enumerate() {
                let v = input::vertex("--vertex", vt)?;
                let h = match elems.get(i) {
                    Some(t) => ctx.grig("--elem", t)?,
                    None => rist_element(&v, 1_000_000)?,
                };
                pairs.push((v, h));
            }
            let pairs: [(Vertex, GrigWord); 3] = pairs.try_into().expect("three pairs");
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let elems: Vec<String> = pairs.iter().map(|(_, h)| h.to_string()).collect();
            match branch_mixed_identity_check(&pairs, *samples, *max_len, *depth, &mut rng)? {
                MixedCheck::Holds { samples } => Out::new(
                    format!("holds on {samples} samples\nh = {}", elems.join(", ")),
                    json!({ "holds": true, "samples": samples, "elems": elems }),
                ),
                MixedCheck::Counterexample(y) => Out::new(
                    format!("counterexample y = {y}"),
                    json!({ "holds": false, "counterexample": y.to_string(), "elems": elems }),
                ),
            }
        }
    })
}
