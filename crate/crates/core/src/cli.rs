//! Command-line front end: `generate`, `rank` and `eval`.
//!
//! Option values resolve as flag, then `--config` TOML file, then built-in
//! default. Exit status is 0 on success, 2 for bad input or usage and 1 for
//! anything else (I/O failures, internal faults).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::evaluation::{evaluate, EvaluationReport, MethodRmsdTable};
use crate::geometry::Conformation;
use crate::io_formats::{
    format_manifest, format_pdb, format_summary, format_xyz, read_text, read_xyz, write_text,
};
use crate::priors::{parse_priors, PriorsSchema};
use crate::residue::{parse_sequence, sequence_string, AminoAcid};
use crate::scoring::{fuse, FusionWeights, RankingReport, ScoringConfig, SsMetric, SsMode};
use crate::surrogate::{
    anneal, enumerate_exhaustive, enumerate_exhaustive_distinct, AnnealSchedule, CandidateSet,
    SurrogateEnergyModel,
};

#[derive(Debug, Parser)]
#[command(
    name = "fusefold",
    version,
    about = "Re-rank fragment backbones by fusing energy with structural priors"
)]
pub struct Cli {
    /// Worker threads for parallel stages (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file supplying defaults for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate lattice candidates for a sequence.
    Generate(GenerateArgs),
    /// Score and rank a directory of .xyz candidates against priors.
    Rank(RankArgs),
    /// Summaries and paired tests from a per-fragment RMSD table.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exhaustive,
    Anneal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorsFormat {
    Canonical,
    Netsurfp3,
    Positional,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// One-letter amino-acid sequence.
    #[arg(long)]
    pub seq: String,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Number of candidates to write [default: 5].
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Annealing seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Annealing steps [default: 20000].
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Keep one walk per fold when enumerating.
    #[arg(long)]
    pub distinct: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Directory of candidate .xyz files.
    #[arg(long)]
    pub candidates: PathBuf,
    /// Per-residue priors table (.tsv or .csv).
    #[arg(long)]
    pub priors: PathBuf,
    #[arg(long, value_enum)]
    pub priors_format: Option<PriorsFormat>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// ce, kl or l2 [default: kl].
    #[arg(long)]
    pub ss_metric: Option<SsMetric>,
    /// ss3 or ss8 [default: ss3].
    #[arg(long)]
    pub ss_mode: Option<SsMode>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Weight dihedral terms by relative solvent accessibility.
    #[arg(long)]
    pub rsa_weight: bool,
    /// Fuse raw terms instead of min-max normalized ones.
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Long-format CSV: fragment_id, method, rmsd_angstrom[, score].
    #[arg(long)]
    pub rmsd: PathBuf,
    /// Baseline method; repeat for several. Defaults to every other method.
    #[arg(long = "baseline")]
    pub baselines: Vec<String>,
    #[arg(long)]
    pub hybrid: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub generate: GenerateSection,
    pub fusion: FusionSection,
    pub scoring: ScoringSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateSection {
    pub method: Option<Method>,
    pub top_n: Option<usize>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub distinct: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringSection {
    pub ss_metric: Option<String>,
    pub ss_mode: Option<String>,
    pub epsilon: Option<f64>,
    pub rsa_weighting: Option<bool>,
    pub normalize: Option<bool>,
    pub sigma: Option<f64>,
    pub priors_format: Option<PriorsFormat>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    pub sequence: Vec<AminoAcid>,
    pub method: Method,
    pub top_n: usize,
    pub seed: u64,
    pub schedule: AnnealSchedule,
    pub distinct: bool,
    pub out_dir: PathBuf,
}

impl GenerateOptions {
    pub fn resolve(args: &GenerateArgs, file: &FileConfig) -> Result<Self> {
        let g = &file.generate;
        let d = AnnealSchedule::default();
        Ok(Self {
            sequence: parse_sequence(&args.seq)?,
            method: args.method.or(g.method).unwrap_or(Method::Exhaustive),
            top_n: args.top_n.or(g.top_n).unwrap_or(5),
            seed: args.seed.or(g.seed).unwrap_or(0),
            schedule: AnnealSchedule {
                t_start: args.t_start.or(g.t_start).unwrap_or(d.t_start),
                t_end: args.t_end.or(g.t_end).unwrap_or(d.t_end),
                steps: args.steps.or(g.steps).unwrap_or(d.steps),
            },
            distinct: args.distinct || g.distinct.unwrap_or(false),
            out_dir: args.out.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOptions {
    pub candidates_dir: PathBuf,
    pub priors_path: PathBuf,
    pub priors_schema: PriorsSchema,
    pub weights: FusionWeights,
    pub scoring: ScoringConfig,
    pub out_dir: PathBuf,
}

impl RankOptions {
    pub fn resolve(args: &RankArgs, file: &FileConfig) -> Result<Self> {
        let (f, s) = (&file.fusion, &file.scoring);
        let d = ScoringConfig::default();
        let weights = FusionWeights::new(
            args.alpha.or(f.alpha).unwrap_or(1.0),
            args.beta.or(f.beta).unwrap_or(1.0),
            args.gamma.or(f.gamma).unwrap_or(1.0),
        )?;
        let mut scoring = ScoringConfig {
            ss_metric: match (args.ss_metric, &s.ss_metric) {
                (Some(m), _) => m,
                (None, Some(m)) => m.parse()?,
                (None, None) => d.ss_metric,
            },
            ss_mode: match (args.ss_mode, &s.ss_mode) {
                (Some(m), _) => m,
                (None, Some(m)) => m.parse()?,
                (None, None) => d.ss_mode,
            },
            epsilon: args.epsilon.or(s.epsilon).unwrap_or(d.epsilon),
            rsa_weighting: args.rsa_weight || s.rsa_weighting.unwrap_or(d.rsa_weighting),
            normalize: if args.no_normalize {
                false
            } else {
                s.normalize.unwrap_or(d.normalize)
            },
            rama: d.rama,
        };
        if let Some(sigma) = s.sigma {
            scoring.rama.sigma = sigma;
        }
        scoring.validate()?;
        let priors_schema = match args.priors_format.or(s.priors_format) {
            None | Some(PriorsFormat::Canonical) => PriorsSchema::canonical(),
            Some(PriorsFormat::Netsurfp3) => PriorsSchema::netsurfp3(),
            Some(PriorsFormat::Positional) => PriorsSchema::positional(),
        };
        Ok(Self {
            candidates_dir: args.candidates.clone(),
            priors_path: args.priors.clone(),
            priors_schema,
            weights,
            scoring,
            out_dir: args.out.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub rmsd_csv: PathBuf,
    pub baselines: Vec<String>,
    pub hybrid: String,
    pub out_dir: PathBuf,
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{what} {} is not a readable file",
            path.display()
        )))
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Write candidate `.xyz` files and `manifest.csv` into the output directory.
pub fn cmd_generate(opts: &GenerateOptions) -> Result<CandidateSet> {
    let model = SurrogateEnergyModel::miyazawa_jernigan(opts.sequence.len());
    let set = match opts.method {
        Method::Exhaustive if opts.distinct => {
            enumerate_exhaustive_distinct(&opts.sequence, &model, opts.top_n)?
        }
        Method::Exhaustive => enumerate_exhaustive(&opts.sequence, &model, opts.top_n)?,
        Method::Anneal => anneal(
            &opts.sequence,
            &model,
            &opts.schedule,
            opts.seed,
            opts.top_n,
        )?,
    };
    create_dir(&opts.out_dir)?;
    let seq = sequence_string(&opts.sequence);
    for c in &set.candidates {
        let text = format_xyz(
            &c.conformation,
            &[
                ("moves", c.moves.to_string()),
                ("sequence", seq.clone()),
                ("source", set.method.to_string()),
            ],
        )?;
        write_text(
            &opts.out_dir.join(format!("{}.xyz", c.conformation.id())),
            &text,
        )?;
    }
    write_text(
        &opts.out_dir.join("manifest.csv"),
        &format_manifest(&set, &opts.sequence),
    )?;
    Ok(set)
}

fn candidate_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::Config(format!(
            "candidate directory {} does not exist",
            dir.display()
        )));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("xyz")))
        .collect();
    files.sort();
    Ok(files)
}

/// Rank every candidate and write `summary.csv`, one PDB per candidate,
/// and the winner as `best.pdb` and `best.xyz`.
pub fn cmd_rank(opts: &RankOptions) -> Result<RankingReport> {
    require_file(&opts.priors_path, "priors file")?;
    let files = candidate_files(&opts.candidates_dir)?;
    if files.is_empty() {
        return Err(Error::EmptyInput("candidate directory has no .xyz files"));
    }
    let priors = parse_priors(&read_text(&opts.priors_path)?, &opts.priors_schema)?;
    let candidates: Vec<Conformation> = files
        .iter()
        .map(|f| read_xyz(f, Some(&priors.sequence)))
        .collect::<Result<_>>()?;
    let report = fuse(&candidates, &priors, &opts.weights, &opts.scoring)?;

    create_dir(&opts.out_dir)?;
    write_text(&opts.out_dir.join("summary.csv"), &format_summary(&report)?)?;
    for entry in &report.entries {
        let c = candidates
            .iter()
            .find(|c| c.id() == entry.score.candidate_id)
            .expect("report ids come from the candidates");
        let name = format!("rank_{:03}_{}.pdb", entry.rank, c.id());
        write_text(&opts.out_dir.join(name), &format_pdb(c)?)?;
        if entry.rank == 1 {
            write_text(&opts.out_dir.join("best.pdb"), &format_pdb(c)?)?;
            let extra = [
                ("rank", "1".to_string()),
                ("E_fuse", entry.score.e_fuse.to_string()),
            ];
            write_text(&opts.out_dir.join("best.xyz"), &format_xyz(c, &extra)?)?;
        }
    }
    Ok(report)
}

/// Write `stats.csv`, `tests.csv`, `correlation.csv` (when scores are
/// present) and `report.txt`.
pub fn cmd_eval(opts: &EvalOptions) -> Result<EvaluationReport> {
    require_file(&opts.rmsd_csv, "RMSD table")?;
    let table = MethodRmsdTable::from_csv(&read_text(&opts.rmsd_csv)?)?;
    let report = evaluate(&table, &opts.baselines, &opts.hybrid)?;
    create_dir(&opts.out_dir)?;
    write_text(&opts.out_dir.join("stats.csv"), &report.stats_csv())?;
    write_text(&opts.out_dir.join("tests.csv"), &report.tests_csv())?;
    if !report.correlations.is_empty() {
        write_text(
            &opts.out_dir.join("correlation.csv"),
            &report.correlation_csv(),
        )?;
    }
    write_text(&opts.out_dir.join("report.txt"), &report.to_text())?;
    Ok(report)
}

/// Execute a parsed command line, returning what to print on success.
pub fn run(cli: &Cli) -> Result<String> {
    let file = match &cli.config {
        Some(path) => {
            require_file(path, "config file")?;
            FileConfig::load(path)?
        }
        None => FileConfig::default(),
    };
    let threads = cli.threads.or(file.threads);
    let work = || -> Result<String> {
        match &cli.command {
            Command::Generate(args) => {
                let opts = GenerateOptions::resolve(args, &file)?;
                let set = cmd_generate(&opts)?;
                Ok(format!(
                    "wrote {} candidates to {} (best energy {})\n",
                    set.len(),
                    opts.out_dir.display(),
                    set.best_energy().map_or("NA".into(), |e| e.to_string())
                ))
            }
            Command::Rank(args) => {
                let opts = RankOptions::resolve(args, &file)?;
                let report = cmd_rank(&opts)?;
                let best = report.best();
                Ok(format!(
                    "ranked {} candidates; best {} (E_fuse {:.6}, E_q {})\n",
                    report.entries.len(),
                    best.score.candidate_id,
                    best.score.e_fuse,
                    best.score.e_q_raw
                ))
            }
            Command::Eval(args) => {
                let opts = EvalOptions {
                    rmsd_csv: args.rmsd.clone(),
                    baselines: args.baselines.clone(),
                    hybrid: args.hybrid.clone(),
                    out_dir: args.out.clone(),
                };
                Ok(cmd_eval(&opts)?.to_text())
            }
        }
    };
    match threads {
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Parse `args`, run, print, and map the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
