//! Command-line front end: parse a manifest, build and verify the glued
//! flat bundle, and report the outcome.
//!
//! Exit codes: 0 when every check passes, 1 when an identity check fails,
//! 2 on input errors (unreadable files, manifest syntax or semantics,
//! input-validation failures).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use flatglue::report::{CheckKind, CheckRecord, Report};
use flatglue::twist::{build_atlas, AtlasOptions, Corruption, FlatBundleAtlas};

use flatglue_cli::corpus;
use flatglue_cli::manifest::{Inputs, Manifest};

#[derive(Parser)]
#[command(name = "flatglue")]
#[command(about = "Exact verification of exponentially glued flat bundles in odd characteristic")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Build the atlas from a manifest and replay every check
    Verify {
        /// Path to the manifest (omit when using --example)
        manifest: Option<PathBuf>,

        /// Verify a built-in example instead of a file
        #[arg(long, conflicts_with = "manifest")]
        example: Option<String>,

        /// Write the structured report to this path (JSON)
        #[arg(long)]
        report: Option<PathBuf>,

        /// Stdout format
        #[arg(long, default_value = "text", value_parser = ["text", "json"])]
        format: String,

        /// Comma-separated subset of check kinds to run
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,

        /// Testing hook `<kind>:<index>`: corrupt one check's input
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
    /// Build the atlas and write its data (connections, divided
    /// differences, gluing matrices) to a file
    Twist {
        /// Path to the manifest (omit when using --example)
        manifest: Option<PathBuf>,

        /// Output path for the atlas text
        #[arg(long)]
        out: PathBuf,

        /// Use a built-in example instead of a file
        #[arg(long, conflicts_with = "manifest")]
        example: Option<String>,
    },
    /// Print a built-in example manifest
    Example {
        /// Example name; see list-examples
        name: String,
    },
    /// List the built-in examples
    ListExamples,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Commands::Verify {
            manifest,
            example,
            report,
            format,
            checks,
            corrupt,
        } => {
            let text = load_manifest_text(manifest.as_deref(), example.as_deref())?;
            let parsed = Manifest::parse(&text)?;
            let inputs = parsed.to_inputs()?;
            let opts = atlas_options(checks.as_deref(), corrupt.as_deref())?;
            let atlas = build_atlas(&inputs.patches, &inputs.higgs, &opts);

            let rendered = match format.as_str() {
                "json" => json_report(&inputs, &atlas.report)?,
                _ => text_report(&inputs, &atlas.report),
            };
            print!("{rendered}");
            if let Some(path) = report {
                fs::write(&path, json_report(&inputs, &atlas.report)?)
                    .map_err(|e| anyhow::anyhow!("writing report {}: {e}", path.display()))?;
            }

            Ok(exit_code_for(&atlas.report))
        }
        Commands::Twist {
            manifest,
            out,
            example,
        } => {
            let text = load_manifest_text(manifest.as_deref(), example.as_deref())?;
            let parsed = Manifest::parse(&text)?;
            let inputs = parsed.to_inputs()?;
            let atlas = build_atlas(&inputs.patches, &inputs.higgs, &AtlasOptions::default());
            if atlas.report.validation_failed() {
                eprintln!("{}", text_report(&inputs, &atlas.report));
                anyhow::bail!("input validation failed; no atlas written");
            }
            fs::write(&out, render_atlas(&inputs, &atlas))
                .map_err(|e| anyhow::anyhow!("writing atlas {}: {e}", out.display()))?;
            println!("atlas written to {}", out.display());
            Ok(exit_code_for(&atlas.report))
        }
        Commands::Example { name } => match corpus::find(&name) {
            Some(example) => {
                print!("{}", example.text);
                Ok(ExitCode::SUCCESS)
            }
            None => {
                anyhow::bail!(
                    "unknown example {name}; available: {}",
                    corpus::available_names().join(", ")
                );
            }
        },
        Commands::ListExamples => {
            for example in &corpus::EXAMPLES {
                println!("{:<24} {}", example.name, example.description);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_manifest_text(
    path: Option<&std::path::Path>,
    example: Option<&str>,
) -> anyhow::Result<String> {
    match (path, example) {
        (Some(path), None) => {
            fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))
        }
        (None, Some(name)) => corpus::find(name)
            .map(|e| e.text.to_string())
            .ok_or_else(|| {
                anyhow::anyhow!(
                    "unknown example {name}; available: {}",
                    corpus::available_names().join(", ")
                )
            }),
        _ => anyhow::bail!("provide a manifest path or --example NAME"),
    }
}

fn atlas_options(checks: Option<&[String]>, corrupt: Option<&str>) -> anyhow::Result<AtlasOptions> {
    let checks = match checks {
        None => None,
        Some(list) => {
            let mut set = BTreeSet::new();
            for item in list {
                let kind = CheckKind::parse(item)
                    .ok_or_else(|| anyhow::anyhow!("unknown check kind {item}"))?;
                set.insert(kind);
            }
            Some(set)
        }
    };
    let corrupt = match corrupt {
        None => None,
        Some(spec) => {
            let (kind_text, index_text) = spec
                .split_once(':')
                .ok_or_else(|| anyhow::anyhow!("corrupt hook must be <kind>:<index>"))?;
            let kind = CheckKind::parse(kind_text)
                .ok_or_else(|| anyhow::anyhow!("unknown check kind {kind_text}"))?;
            let index: usize = index_text
                .parse()
                .map_err(|_| anyhow::anyhow!("corrupt index must be a number"))?;
            Some(Corruption { kind, index })
        }
    };
    Ok(AtlasOptions { checks, corrupt })
}

fn exit_code_for(report: &Report) -> ExitCode {
    if report.validation_failed() {
        ExitCode::from(2)
    } else if report.is_verified() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn params_line(inputs: &Inputs) -> String {
    format!(
        "params: p={} e={} d={} rank={} exponent={} patches={}",
        inputs.params.p(),
        inputs.params.e(),
        inputs.higgs.dim(),
        inputs.higgs.rank,
        inputs.higgs.exponent,
        inputs.patches.len()
    )
}

fn text_report(inputs: &Inputs, report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "manifest: {}", inputs.title);
    let _ = writeln!(out, "{}", params_line(inputs));
    out.push_str(&report.render_text());
    out
}

#[derive(Serialize)]
struct JsonParams {
    p: u64,
    e: usize,
    dim: usize,
    rank: usize,
    exponent: usize,
    patches: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    manifest: &'a str,
    params: JsonParams,
    overall: &'a str,
    total: usize,
    passed: usize,
    failed: usize,
    records: &'a [CheckRecord],
}

fn json_report(inputs: &Inputs, report: &Report) -> anyhow::Result<String> {
    let doc = JsonReport {
        manifest: &inputs.title,
        params: JsonParams {
            p: inputs.params.p(),
            e: inputs.params.e(),
            dim: inputs.higgs.dim(),
            rank: inputs.higgs.rank,
            exponent: inputs.higgs.exponent,
            patches: inputs.patches.len(),
        },
        overall: report.overall_label(),
        total: report.total(),
        passed: report.passed(),
        failed: report.failed(),
        records: &report.records,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

/// Canonical text dump of the constructed atlas: every local connection
/// form, every divided difference vector, and both factors of every gluing
/// matrix, in sorted order.
fn render_atlas(inputs: &Inputs, atlas: &FlatBundleAtlas) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "atlas: {}", inputs.title);
    let _ = writeln!(out, "{}", params_line(inputs));
    let _ = writeln!(out, "status: {}", atlas.report.overall_label());
    for (name, local) in &atlas.locals {
        let _ = writeln!(out, "A[{name}] = {}", local.conn.render());
    }
    for ((a, b), hom) in &atlas.hom {
        let zs: Vec<String> = hom.z.iter().map(|z| z.render()).collect();
        let _ = writeln!(out, "z[{a}|{b}] = [{}]", zs.join(", "));
    }
    for ((a, b), g) in &atlas.exp_part {
        let _ = writeln!(out, "g[{a}|{b}] = {g}");
    }
    for ((a, b), g) in &atlas.gluing {
        let _ = writeln!(out, "G[{a}|{b}] = {g}");
    }
    out
}
