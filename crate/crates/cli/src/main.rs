mod cmd_f;
mod cmd_grig;
mod cmd_hnn;
mod cmd_limits;
mod cmd_solve;
mod cmd_word;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use input::{Ctx, Usage};

/// Exact computations in Thompson's group F and the Grigorchuk group.
#[derive(Parser)]
#[command(name = "flimits", version)]
struct Cli {
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Versioned JSON file of named constants.
    #[arg(long, global = true, value_name = "FILE")]
    symbols: Option<PathBuf>,
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Elements of F.
    #[command(subcommand)]
    F(cmd_f::Cmd),
    /// Mixed words over F.
    #[command(subcommand)]
    Word(cmd_word::Cmd),
    /// Inequality solvers.
    #[command(subcommand)]
    Solve(cmd_solve::Cmd),
    /// Marked groups and the relations metric.
    #[command(subcommand)]
    Limits(cmd_limits::Cmd),
    /// Britton reduction in HNN extensions of F.
    #[command(subcommand)]
    Hnn(cmd_hnn::Cmd),
    /// The first Grigorchuk group.
    #[command(subcommand)]
    Grig(cmd_grig::Cmd),
}

/// Result of one command: the human text and its structured twin.
pub struct Out {
    pub text: String,
    pub json: serde_json::Value,
}

impl Out {
    pub fn new(text: impl Into<String>, json: serde_json::Value) -> Out {
        Out {
            text: text.into(),
            json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> anyhow::Result<Out> {
        let ctx = Ctx::load(cli.symbols.as_deref())?;
        match &cli.group {
            Group::F(c) => cmd_f::run(&ctx, c),
            Group::Word(c) => cmd_word::run(&ctx, c),
            Group::Solve(c) => cmd_solve::run(&ctx, c),
            Group::Limits(c) => cmd_limits::run(&ctx, c),
            Group::Hnn(c) => cmd_hnn::run(&ctx, c),
            Group::Grig(c) => cmd_grig::run(&ctx, c),
        }
    };
    match run() {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                let text = out.text.trim_end();
                if !text.is_empty() {
                    println!("{text}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
