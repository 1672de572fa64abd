use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Subcommand, ValueEnum};
use flimits_core::limits::{
    check_atomic_type, converge_report, distance, format_abstract, h1_sequence_default,
    relations_up_to, MarkedRecord,
};
use flimits_core::{Backend, GrigWord, MarkedTuple, PlHomeo};
use serde_json::json;

use crate::input::{self, Ctx, Usage};
use crate::Out;

#[derive(Clone, Copy, ValueEnum)]
pub enum BackendName {
    Thompson,
    Grigorchuk,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// All relations of length <= radius among the markers.
    Relations {
        /// Marked tuple file; alternatively give --marker repeatedly.
        file: Option<PathBuf>,
        #[arg(long = "marker", value_name = "ELEM", conflicts_with = "file")]
        markers: Vec<String>,
        #[arg(long, value_enum, default_value = "thompson")]
        backend: BackendName,
        #[arg(long)]
        radius: usize,
    },
    /// Distance between two marked tuples, exact up to radius rmax.
    Distance {
        #[arg(long)]
        rmax: usize,
        a: PathBuf,
        b: PathBuf,
    },
    /// Term n of the sequence built from the default enumerations.
    H1Seq {
        #[arg(long)]
        n: usize,
        /// Also write the marked tuple here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Pairwise and consecutive distances of a sequence of marked tuples.
    Report {
        #[arg(long)]
        rmax: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

enum Marked {
    F(MarkedTuple<PlHomeo>),
    Grig(MarkedTuple<GrigWord>),
}

fn load(flag: &str, path: &std::path::Path) -> Result<Marked> {
    let text = input::read_file(flag, path)?;
    let shown = path.display().to_string();
    let rec: MarkedRecord = serde_json::from_str(&text).map_err(|e| input::usage(flag, &shown, e))?;
    let bad = |e: flimits_core::limits::LimitsError| input::usage(flag, &shown, e);
    Ok(match rec.backend.as_str() {
        <PlHomeo as Backend>::NAME => Marked::F(MarkedTuple::from_record(&rec).map_err(bad)?),
        <GrigWord as Backend>::NAME => Marked::Grig(MarkedTuple::from_record(&rec).map_err(bad)?),
        other => return Err(input::usage(flag, &shown, format!("unknown backend `{other}`"))),
    })
}

fn relations_out<G: flimits_core::Group>(m: &MarkedTuple<G>, r: usize) -> Out {
    let rels: Vec<String> = relations_up_to(m, r).iter().map(|w| format_abstract(w)).collect();
    let text = if rels.is_empty() {
        format!("no relations of length <= {r}")
    } else {
        rels.join("\n")
    };
    Out::new(text, json!({ "radius": r, "relations": rels }))
}

fn distance_out<G: flimits_core::Group>(a: &MarkedTuple<G>, b: &MarkedTuple<G>, r: usize) -> Result<Out> {
    let d = distance(a, b, r)?;
    Ok(Out::new(d.to_string(), json!({ "distance": d, "text": d.to_string() })))
}

pub fn run(ctx: &Ctx, cmd: &Cmd) -> Result<Out> {
    match cmd {
        Cmd::Relations {
            file,
            markers,
            backend,
            radius,
        } => {
            let m = match file {
                Some(p) => load("FILE", p)?,
                None if markers.is_empty() => {
                    bail!(Usage("give a marked tuple file or at least one --marker".into()))
                }
                None => match backend {
                    BackendName::Thompson => Marked::F(MarkedTuple::new(ctx.elems("--marker", markers)?)?),
                    BackendName::Grigorchuk => Marked::Grig(MarkedTuple::new(
                        markers
                            .iter()
                            .map(|t| ctx.grig("--marker", t))
                            .collect::<Result<Vec<_>>>()?,
                    )?),
                },
            };
            Ok(match m {
                Marked::F(m) => relations_out(&m, *radius),
                Marked::Grig(m) => relations_out(&m, *radius),
            })
        }
        Cmd::Distance { rmax, a, b } => match (load("A", a)?, load("B", b)?) {
            (Marked::F(a), Marked::F(b)) => distance_out(&a, &b, *rmax),
            (Marked::Grig(a), Marked::Grig(b)) => distance_out(&a, &b, *rmax),
            _ => bail!(Usage("the two files use different backends".into())),
        },
        Cmd::H1Seq { n, out } => {
            if *n == 0 {
                return Err(input::usage("--n", "0", "terms are numbered from 1"));
            }
            let term = h1_sequence_default(*n)?;
            let ok = check_atomic_type(&term.constraints, std::slice::from_ref(&term.solution.element))?;
            let rec = term.marked.to_record();
            if let Some(p) = out {
                let body = serde_json::to_string_pretty(&rec)?;
                std::fs::write(p, body + "\n")
                    .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display()))?;
            }
            Ok(Out::new(
                format!(
                    "g = {}\nk = {}\ntried = {}\nconstraints: {} ({} commutations, {} inequalities)",
                    term.solution.element,
                    term.solution.k,
                    term.solution.tried,
                    if ok { "satisfied" } else { "VIOLATED" },
                    n,
                    term.constraints.entries().len() - n
                ),
                json!({
                    "n": n,
                    "k": term.solution.k,
                    "tried": term.solution.tried,
                    "satisfied": ok,
                    "marked": rec,
                }),
            ))
        }
        Cmd::Report { rmax, files } => {
            let ms = files
                .iter()
                .map(|p| load("FILES", p))
                .collect::<Result<Vec<_>>>()?;
            let rep = if ms.iter().all(|m| matches!(m, Marked::F(_))) {
                let seq: Vec<_> = ms
                    .into_iter()
                    .map(|m| match m {
                        Marked::F(t) => t,
                        Marked::Grig(_) => unreachable!(),
                    })
                    .collect();
                converge_report(&seq, *rmax)?
            } else if ms.iter().all(|m| matches!(m, Marked::Grig(_))) {
                let seq: Vec<_> = ms
                    .into_iter()
                    .map(|m| match m {
                        Marked::Grig(t) => t,
                        Marked::F(_) => unreachable!(),
                    })
                    .collect();
                converge_report(&seq, *rmax)?
            } else {
                bail!(Usage("the files use different backends".into()))
            };
            Ok(Out::new(rep.to_table(), serde_json::to_value(&rep)?))
        }
    }
}
