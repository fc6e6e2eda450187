//! Command-line front end: Fitts analysis, typing simulation, corpus tools
//! and the live session server.

mod corpus_cmd;
mod server;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use slicetype::fitts::{report, svg_chart, Condition};
use slicetype::sim::{simulate_typing, summarize, JitterModel, SimConfig, SimResult, SimSummary};
use slicetype::service::SessionService;
use slicetype::{Keyboard, NgramModel, RingRadii, Session, SessionConfig};

pub use server::{router, serve};

#[derive(Debug, Parser)]
#[command(name = "slicetype", version, about = "Circular merging gaze keyboard toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Corpus directory holding unigrams.tsv and bigrams.tsv; the bundled
    /// corpus when absent.
    #[arg(long, global = true, env = "SLICETYPE_CORPUS")]
    pub corpus: Option<PathBuf>,
    /// Ring radii as r1,r2,r3.
    #[arg(long, global = true, value_parser = parse_radii)]
    pub radii: Option<RingRadii>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index-of-difficulty totals per interaction condition.
    Analyze(AnalyzeArgs),
    /// Seeded typing trials with jittered gaze.
    Simulate(SimulateArgs),
    /// Build or inspect corpora.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Serve live typing sessions over a WebSocket at /ws.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value = "the quick brown fox jumps over the lazy dog")]
    pub text: String,
    /// Comma-separated condition names; all when absent.
    #[arg(long, value_delimiter = ',')]
    pub conditions: Vec<Condition>,
    /// Directory for report.json and report.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a bar chart of the totals to this file.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Intercept and slope for movement times (MT = a + b·ID), in seconds.
    #[arg(long, requires = "mt_b")]
    pub mt_a: Option<f64>,
    #[arg(long, requires = "mt_a")]
    pub mt_b: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "the quick brown fox jumps over the lazy dog")]
    pub text: String,
    #[arg(long, default_value_t = 0.45)]
    pub jitter_deg: f64,
    #[arg(long, default_value_t = slicetype::engine::DEFAULT_DWELL_MS)]
    pub dwell_ms: f64,
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
    /// Seed of the first trial; trial k uses seed + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "pred_merge")]
    pub policy: Condition,
    /// Write per-trial results and the summary as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Count words and word pairs in text files, or re-serialize a corpus
    /// directory.
    Build(corpus_cmd::BuildArgs),
    /// Sizes and the letter-frequency ranking.
    Stats,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = slicetype::engine::DEFAULT_DWELL_MS)]
    pub dwell_ms: f64,
}

fn parse_radii(s: &str) -> Result<RingRadii, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => RingRadii::new(a, b, c).map_err(|e| e.to_string()),
        _ => Err("expected three radii r1,r2,r3".into()),
    }
}

impl Common {
    pub fn model(&self) -> Result<(String, Arc<NgramModel>)> {
        match &self.corpus {
            Some(dir) => {
                let model = NgramModel::load_dir(dir)
                    .with_context(|| format!("loading corpus {}", dir.display()))?;
                Ok((corpus_id(dir), Arc::new(model)))
            }
            None => Ok(("bundled".into(), NgramModel::bundled())),
        }
    }

    pub fn keyboard(&self) -> Result<Keyboard> {
        let default = Keyboard::default();
        match self.radii {
            None => Ok(default),
            Some(r) => Ok(Keyboard::new(r, default.arrangement().clone(), default.corner_size())?),
        }
    }
}

fn corpus_id(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "local".into())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(args) => analyze(&cli.common, &args, &mut std::io::stdout()),
        Command::Simulate(args) => simulate(&cli.common, &args, &mut std::io::stdout()),
        Command::Corpus(CorpusCommand::Build(args)) => corpus_cmd::build(&args),
        Command::Corpus(CorpusCommand::Stats) => corpus_cmd::stats(&cli.common, &mut std::io::stdout()),
        Command::Serve(args) => {
            let (id, model) = cli.common.model()?;
            let defaults = SessionConfig {
                dwell_ms: args.dwell_ms,
                ..SessionConfig::default()
            };
            let keyboard = cli.common.keyboard()?;
            // Fail on a bad dwell time before accepting any connection.
            Session::new(Arc::clone(&model), keyboard.clone(), defaults)?;
            let mut service = SessionService::new(keyboard, defaults, &id, model);
            if id != "bundled" {
                service.add_corpus("bundled", NgramModel::bundled());
            }
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port)).await?;
                println!("listening on ws://{}/ws", listener.local_addr()?);
                serve(listener, service).await
            })
        }
    }
}

pub fn analyze(common: &Common, args: &AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let (id, model) = common.model()?;
    let keyboard = common.keyboard()?;
    let conditions = if args.conditions.is_empty() {
        Condition::ALL.to_vec()
    } else {
        args.conditions.clone()
    };
    let report = report(&args.text, &model, &keyboard, &id, &conditions)?;
    writeln!(out, "{:<18} {:>6} {:>10}", "condition", "steps", "total_ID")?;
    for c in &report.conditions {
        writeln!(out, "{:<18} {:>6} {:>10.2}", c.condition.name(), c.steps.len(), c.total_id)?;
    }
    if let Some(d) = report.in_key_prediction_decrease {
        writeln!(out, "in-key prediction decrease: {:.1}%", d * 100.0)?;
    }
    if let (Some(a), Some(b)) = (args.mt_a, args.mt_b) {
        for (c, mt) in report.movement_times(a, b) {
            writeln!(out, "MT {:<15} {mt:.2} s", c.name())?;
        }
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        report.write_csv(fs::File::create(dir.join("report.csv"))?)?;
    }
    if let Some(path) = &args.svg {
        fs::write(path, svg_chart(&report))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SimOutput {
    pub config: SimConfig,
    pub text: String,
    pub trials: Vec<Trial>,
    pub summary: SimSummary,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Trial {
    Done(SimResult),
    Failed { seed: u64, error: String },
}

pub fn simulate(common: &Common, args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let (_, model) = common.model()?;
    let keyboard = common.keyboard()?;
    let config = SimConfig {
        dwell_ms: args.dwell_ms,
        jitter: JitterModel::with_sigma(args.jitter_deg),
        policy: args.policy,
        ..SimConfig::default()
    };
    config.jitter.validate()?;
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let trials: Vec<Trial> = (0..args.trials)
        .into_par_iter()
        .map(|k| {
            let seed = args.seed.wrapping_add(k);
            match simulate_typing(&args.text, Arc::clone(&model), &keyboard, &config, seed) {
                Ok(r) => Ok(Trial::Done(r)),
                Err(e @ slicetype::sim::SimError::Timeout { .. }) => Ok(Trial::Failed {
                    seed,
                    error: e.to_string(),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_, _>>()?;
    let done: Vec<SimResult> = trials
        .iter()
        .filter_map(|t| match t {
            Trial::Done(r) => Some(r.clone()),
            Trial::Failed { .. } => None,
        })
        .collect();
    let summary = summarize(&done);

    writeln!(out, "{:>6} {:>8} {:>11} {:>7} {:>9}", "seed", "wpm", "elapsed_ms", "resets", "predicted")?;
    for t in &trials {
        match t {
            Trial::Done(r) => writeln!(
                out,
                "{:>6} {:>8.2} {:>11.1} {:>7} {:>9}",
                r.seed, r.wpm, r.elapsed_ms, r.dwell_resets, r.predicted_words
            )?,
            Trial::Failed { seed, .. } => writeln!(out, "{seed:>6} {:>8}", "timeout")?,
        }
    }
    writeln!(
        out,
        "mean wpm {:.2} ± {:.2} (95% CI, {} of {} trials finished); mean resets {:.2}",
        summary.mean_wpm,
        summary.wpm_ci95,
        done.len(),
        trials.len(),
        summary.mean_resets
    )?;
    if let Some(path) = &args.out {
        let output = SimOutput {
            config,
            text: args.text.clone(),
            trials,
            summary,
        };
        fs::write(path, serde_json::to_string_pretty(&output)?)?;
    }
    Ok(())
}
