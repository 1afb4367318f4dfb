//! Command-line front end. Exit codes: 0 success, 1 disagreement or violated
//! count, 2 input or capacity error, 3 reduction stopped at the special case.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use crate::gain_graph::{gallery, parse, serialize, GainGraph};
use crate::henneberg::{grow_random, reduce_to_base, Terminal};
use crate::lifting::{export, sample_framework, trial_rng};
use crate::rigidity::analyze;
use crate::sparsity::{check_with, CountSpec, Limits};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SPECIAL: i32 = 3;

const GALLERY_PREFIX: &str = "gallery:";

#[derive(Parser, Debug)]
#[command(
    name = "symrigid",
    version,
    about = "Rigidity of planar frameworks with k-fold rotational symmetry"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Group order; required for gallery inputs and must match a file's `group` line.
    #[arg(long)]
    pub k: Option<u32>,
    /// Largest edge count for exhaustive subset checks (default from SYMRIGID_CAP or 22).
    #[arg(long)]
    pub cap: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write output to a file instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate sparsity counts.
    Check {
        /// Gain-graph file or `gallery:<name>`.
        input: String,
        /// Count to check: zkj, zkj:<j>, gain:<m>,<l> or plain:<m>,<l>. Repeatable.
        #[arg(long)]
        spec: Vec<String>,
        #[arg(long)]
        j: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare combinatorial and numeric verdicts for every irreducible block.
    Analyze {
        input: String,
        /// Report only this block.
        #[arg(long)]
        j: Option<u32>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a tight graph to a base graph and print the certificate.
    Reduce {
        input: String,
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Sample a symmetric realisation and write its points and bars.
    Lift {
        input: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Print a named example graph, or list the names.
    Gallery {
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Grow a tight graph by random extensions from a base graph.
    Random {
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add an isolated fixed vertex before growing.
        #[arg(long)]
        centre: bool,
        #[command(flatten)]
        common: Common,
    },
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            code: EXIT_OK,
        }
    }
}

impl Common {
    fn limits(&self) -> Limits {
        match self.cap {
            Some(cap) => Limits { cap: cap.min(63) },
            None => Limits::from_env(),
        }
    }

    fn k(&self) -> Result<u32> {
        self.k
            .ok_or_else(|| Error::Input("--k is required here".into()))
    }
}

/// Reads a graph from a file or `gallery:<name>`; `--k` must agree with a file's group.
pub fn load(input: &str, k: Option<u32>) -> Result<GainGraph> {
    if let Some(name) = input.strip_prefix(GALLERY_PREFIX) {
        let k = k.ok_or_else(|| Error::Input("gallery inputs need --k".into()))?;
        return gallery::gallery(name, k);
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::Input(format!("cannot read {input}: {e}")))?;
    let g = parse(&text)?;
    match k {
        Some(k) if k != g.k() => Err(Error::Input(format!(
            "--k {k} does not match the file's group order {}",
            g.k()
        ))),
        _ => Ok(g),
    }
}

fn resolve_spec(raw: &str, j: Option<u32>) -> Result<CountSpec> {
    if raw == "zkj" {
        let j = j.ok_or_else(|| Error::Input("--spec zkj needs --j".into()))?;
        return Ok(CountSpec::Zkj { j });
    }
    raw.parse()
}

fn edge_label(g: &GainGraph, id: crate::gain_graph::EdgeId) -> String {
    let e = g.edge(id).expect("witness edges belong to the graph");
    format!("{}->{}:{}", g.name(e.tail), g.name(e.head), e.gain)
}

fn cmd_check(input: &str, specs: &[String], j: Option<u32>, common: &Common) -> Result<Outcome> {
    let g = load(input, common.k)?;
    let specs: Vec<CountSpec> = if specs.is_empty() {
        let j = j.ok_or_else(|| Error::Input("give --spec or --j".into()))?;
        vec![crate::rigidity::block_spec(g.k(), j)
            .ok_or_else(|| Error::Input("no count applies for k < 4".into()))?]
    } else {
        specs
            .iter()
            .map(|s| resolve_spec(s, j))
            .collect::<Result<_>>()?
    };
    let limits = common.limits();
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut all_sparse = true;
    for spec in specs {
        let v = check_with(&g, spec, &limits)?;
        all_sparse &= v.sparse;
        let witness: Vec<String> = v
            .witness
            .iter()
            .flatten()
            .map(|&id| edge_label(&g, id))
            .collect();
        let verdict = match (v.sparse, v.tight) {
            (true, true) => "tight".to_string(),
            (true, false) => "sparse, not tight".to_string(),
            (false, _) => format!("not sparse; witness {}", witness.join(" ")),
        };
        lines.push(format!("{spec} {verdict}"));
        rows.push(json!({"spec": spec.to_string(), "sparse": v.sparse, "tight": v.tight, "witness": witness}));
    }
    let text = if common.json {
        json!(rows).to_string()
    } else {
        lines.join("\n")
    };
    Ok(Outcome {
        text,
        code: if all_sparse { EXIT_OK } else { EXIT_DISAGREE },
    })
}

fn cmd_analyze(
    input: &str,
    j: Option<u32>,
    trials: u64,
    seed: u64,
    common: &Common,
) -> Result<Outcome> {
    let g = load(input, common.k)?;
    let rep = analyze(&g, trials, seed, j, &common.limits())?;
    let code = if rep.agree() { EXIT_OK } else { EXIT_DISAGREE };
    if common.json {
        return Ok(Outcome {
            text: serde_json::to_string(&rep).map_err(|e| Error::Internal(e.to_string()))?,
            code,
        });
    }
    let mut lines: Vec<String> = Vec::new();
    for b in &rep.blocks {
        lines.push(b.to_line());
        if let (Some(s), Some(c)) = (b.alt_spec, b.alt_comb) {
            lines.push(format!(
                "j={} alt={s} comb={} matches={}",
                b.j,
                c.as_str(),
                (c.as_str() == "tight") == b.rigid()
            ));
        }
    }
    lines.push(format!(
        "rigid={} comb={} rank={} points={} certified={}",
        rep.rigid, rep.comb_rigid, rep.full_rank, rep.cover_vertices, rep.certified
    ));
    if !rep.certified {
        lines.push(format!(
            "note: the counts are not proved sufficient for k={}",
            rep.k
        ));
    }
    Ok(Outcome {
        text: lines.join("\n"),
        code,
    })
}

fn cmd_reduce(input: &str, j: u32, common: &Common) -> Result<Outcome> {
    let g = load(input, common.k)?;
    let cert = reduce_to_base(&g, j, &common.limits())?;
    let code = if cert.terminal == Terminal::SpecialCase {
        EXIT_SPECIAL
    } else {
        EXIT_OK
    };
    let text = if common.json {
        serde_json::to_string(&cert).map_err(|e| Error::Internal(e.to_string()))?
    } else {
        cert.to_text().trim_end().to_string()
    };
    Ok(Outcome { text, code })
}

fn cmd_lift(input: &str, seed: u64, common: &Common) -> Result<Outcome> {
    let g = load(input, common.k)?;
    let fw = sample_framework(&g, &mut trial_rng(seed, 0))?;
    Ok(Outcome::ok(export(&fw).trim_end().to_string()))
}

fn cmd_gallery(name: Option<&str>, common: &Common) -> Result<Outcome> {
    match name {
        None => Ok(Outcome::ok(gallery::NAMES.join("\n"))),
        Some(n) => {
            let g = gallery::gallery(n.strip_prefix(GALLERY_PREFIX).unwrap_or(n), common.k()?)?;
            g.validate()?;
            Ok(Outcome::ok(serialize(&g).trim_end().to_string()))
        }
    }
}

fn cmd_random(j: u32, steps: usize, seed: u64, centre: bool, common: &Common) -> Result<Outcome> {
    let (g, _) = grow_random(
        common.k()?,
        j,
        steps,
        centre,
        &mut trial_rng(seed, 0),
        &common.limits(),
    )?;
    Ok(Outcome::ok(serialize(&g).trim_end().to_string()))
}

fn dispatch(cmd: &Command) -> (Result<Outcome>, &Common) {
    match cmd {
        Command::Check {
            input,
            spec,
            j,
            common,
        } => (cmd_check(input, spec, *j, common), common),
        Command::Analyze {
            input,
            j,
            trials,
            seed,
            common,
        } => (cmd_analyze(input, *j, *trials, *seed, common), common),
        Command::Reduce { input, j, common } => (cmd_reduce(input, *j, common), common),
        Command::Lift {
            input,
            seed,
            common,
        } => (cmd_lift(input, *seed, common), common),
        Command::Gallery { name, common } => (cmd_gallery(name.as_deref(), common), common),
        Command::Random {
            j,
            steps,
            seed,
            centre,
            common,
        } => (cmd_random(*j, *steps, *seed, *centre, common), common),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let (result, common) = dispatch(&cli.command);
    match result {
        Ok(o) => {
            let written = match &common.output {
                Some(path) => std::fs::write(path, format!("{}\n", o.text)),
                None => writeln!(out, "{}", o.text),
            };
            match written {
                Ok(()) => o.code,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot write output: {e}");
                    EXIT_INPUT
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("symrigid").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn zkj_spec_takes_j_from_flag() {
        let (code, out, _) = run_str(&[
            "check",
            "gallery:counterexample-loop",
            "--k",
            "8",
            "--spec",
            "zkj",
            "--j",
            "4",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "zkj:4 tight");
    }

    #[test]
    fn gallery_inputs_need_k() {
        let (code, _, err) = run_str(&["analyze", "gallery:figure1"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--k"));
    }

    #[test]
    fn gallery_lists_names() {
        let (code, out, _) = run_str(&["gallery"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), gallery::NAMES.len());
    }
}
