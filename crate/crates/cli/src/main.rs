use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use persteam::corpus::{load_publications, IngestConfig};
use persteam::pipeline::{
    explain_team, read_overlaps, read_success_tags, read_teams, Pipeline, PipelineConfig, Stage, StageOutcome, KEYS,
    OVERLAPS, PUBLICATIONS, SUCCESS_TAGS, TEAMS, TEAM_PUBS,
};
use persteam::synth::{generate_corpus, verify_against_truth, GroundTruth, SynthConfig};

fn keys_help() -> String {
    let mut s = String::from("Configuration keys (config file lines `key = value`, or --set key=value):\n");
    for (k, d) in KEYS {
        s.push_str(&format!("  {k:<16} {d}\n"));
    }
    s
}

#[derive(Parser)]
#[command(name = "persteam", version, about = "Mine persistent teams from co-authorship records", after_help = keys_help())]
struct Cli {
    /// Config file with `key = value` lines.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Override one key; repeatable, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Rerun stages even when the manifest says they are current.
    #[arg(long, global = true)]
    force: bool,
    /// More logging (-v info, -vv debug).
    #[arg(long, short, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate publication and citation inputs.
    Ingest,
    /// Three-year citation counts and top-10% / top-1% tags.
    Tag,
    /// Per-pair co-authorship timelines.
    Network,
    /// Persistent collaboration periods.
    Persist,
    /// Temporal maximal cliques.
    Mine,
    /// Teams, their publications and composition.
    Teams,
    /// Overlap relations and impulse counts.
    Overlaps,
    /// Aggregate tables.
    Stats,
    /// Every stage in order, skipping those already current.
    All,
    /// One stage by name.
    Run { stage: String },
    /// Print the effective configuration.
    Config,
    /// Generate a synthetic corpus with ground truth.
    Synth {
        #[arg(long, value_enum, default_value_t = Preset::Planted)]
        preset: Preset,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Planted groups (planted, hazard, shift).
        #[arg(long, default_value_t = 100)]
        groups: usize,
        /// First-success hazard (hazard preset).
        #[arg(long, default_value_t = 0.2)]
        hazard: f64,
        /// Publications (scale preset).
        #[arg(long, default_value_t = 100_000)]
        pubs: usize,
        /// Authors (scale preset).
        #[arg(long, default_value_t = 30_000)]
        authors: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare mined teams, relations and tags in out_dir with a ground truth file.
    Verify {
        #[arg(long)]
        truth: PathBuf,
    },
    /// Show members, pair periods, publications and relations of one team.
    Explain { team_id: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    FigS1,
    Planted,
    Hazard,
    Shift,
    Scale,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let mut pairs = Vec::new();
    for o in &cli.overrides {
        let (k, v) = o.split_once('=').with_context(|| format!("--set {o:?}: expected KEY=VALUE"))?;
        pairs.push((k.trim(), v.trim()));
    }
    cfg.apply_overrides(pairs)?;
    cfg.validate()?;
    Ok(cfg)
}

fn report(outcomes: &[StageOutcome]) {
    for o in outcomes {
        let rows: Vec<String> = o.rows.iter().map(|(f, n)| format!("{f}={n}")).collect();
        let state = if o.cached { "cached" } else { "ran" };
        println!("{:<9} {state:<6} {}", o.stage.as_str(), rows.join(" "));
    }
}

fn synth(preset: Preset, seed: u64, groups: usize, hazard: f64, pubs: usize, authors: usize, out: &Path) -> Result<()> {
    let cfg = match preset {
        Preset::FigS1 => SynthConfig { seed, ..SynthConfig::fig_s1() },
        Preset::Planted => SynthConfig::planted(seed, groups),
        Preset::Hazard => SynthConfig::hazard(seed, groups, hazard),
        Preset::Shift => SynthConfig::shift(seed, groups),
        Preset::Scale => SynthConfig::scale(seed, pubs, authors),
    };
    let corpus = generate_corpus(&cfg)?;
    corpus.write_dir(out)?;
    let mut run = PipelineConfig {
        publications: out.join("publications.jsonl"),
        citations: Some(out.join("citations.csv")),
        out_dir: out.join("run"),
        window: Some(cfg.years),
        ..Default::default()
    };
    if matches!(preset, Preset::FigS1 | Preset::Hazard | Preset::Shift) {
        run.margin = 0;
    }
    let conf = out.join("pipeline.conf");
    std::fs::write(&conf, run.to_text()).with_context(|| format!("writing {}", conf.display()))?;
    println!(
        "wrote {} publication lines, {} citations, {} planted teams to {}",
        corpus.publication_lines.len(),
        corpus.citations.len(),
        corpus.truth.teams.len(),
        out.display()
    );
    println!("run with: persteam --config {} all", conf.display());
    Ok(())
}

fn verify(cfg: &PipelineConfig, truth: &Path) -> Result<bool> {
    let dir = &cfg.out_dir;
    let truth = GroundTruth::load(truth)?;
    let (pubs, _) = load_publications(&dir.join(PUBLICATIONS), &IngestConfig { window: None })?;
    let tags = read_success_tags(&dir.join(SUCCESS_TAGS), &pubs)?;
    let teams = read_teams(&dir.join(TEAMS), &dir.join(TEAM_PUBS), &pubs)?;
    let relations = read_overlaps(&dir.join(OVERLAPS))?;
    let r = verify_against_truth(&pubs, &teams, &relations, &tags, &truth);
    println!("{}", r.summary());
    Ok(r.missing.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let single = |stage: Stage| -> Result<bool> {
        let p = Pipeline::new(load_config(&cli)?)?.force(cli.force);
        report(&[p.run_stage(stage)?]);
        Ok(true)
    };
    match &cli.command {
        Command::Ingest => single(Stage::Ingest),
        Command::Tag => single(Stage::Tag),
        Command::Network => single(Stage::Network),
        Command::Persist => single(Stage::Persist),
        Command::Mine => single(Stage::Mine),
        Command::Teams => single(Stage::Teams),
        Command::Overlaps => single(Stage::Overlaps),
        Command::Stats => single(Stage::Stats),
        Command::Run { stage } => match Stage::parse(stage) {
            Some(s) => single(s),
            None => {
                let names: Vec<&str> = Stage::ALL.iter().map(Stage::as_str).collect();
                bail!("unknown stage {stage:?}; expected one of {}", names.join(", "))
            }
        },
        Command::All => {
            let p = Pipeline::new(load_config(&cli)?)?.force(cli.force);
            report(&p.run_all()?);
            Ok(true)
        }
        Command::Config => {
            print!("{}", load_config(&cli)?.to_text());
            Ok(true)
        }
        Command::Synth { preset, seed, groups, hazard, pubs, authors, out } => {
            synth(*preset, *seed, *groups, *hazard, *pubs, *authors, out)?;
            Ok(true)
        }
        Command::Verify { truth } => verify(&load_config(&cli)?, truth),
        Command::Explain { team_id } => {
            print!("{}", explain_team(&load_config(&cli)?.out_dir, team_id)?);
            Ok(true)
        }
    }
}
