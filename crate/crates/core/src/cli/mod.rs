//! Batch command-line front end: parse inputs, aggregate, analyse, write files.
//!
//! Exit codes: 0 success, 1 computation error, 2 input error.

mod manifest;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::aggregation::Rule;
use crate::analysis::{average_welfare, cross_format_welfare, frequency_heatmap, run_stability, AnalysisError, WelfareMatrix};
use crate::io::adapter::{adapt, read_project_map, AdapterConfig};
use crate::io::fixtures::Election;
use crate::io::{self, IoError};
use crate::model::{derive_valuations_with, Format, FormatParams, Instance, Profile, ValuationScheme};

pub use manifest::{Manifest, MANIFEST_FILE};

pub const DEFAULT_REPETITIONS: usize = 200;
pub const DEFAULT_N_PRIMES: [usize; 4] = [10, 20, 30, 40];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("computation error: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::SampleTooLarge { .. } | AnalysisError::MissingReference(_) | AnalysisError::InstanceMismatch(_) => {
                CliError::Input(e.to_string())
            }
            other => CliError::Compute(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleChoice {
    Greedy,
    Mes,
    Optimal,
    /// Greedy and Equal Shares.
    All,
}

impl RuleChoice {
    pub fn rules(choices: &[RuleChoice]) -> Vec<Rule> {
        let mut set = BTreeSet::new();
        for c in choices {
            match c {
                RuleChoice::Greedy => {
                    set.insert(Rule::Greedy);
                }
                RuleChoice::Mes => {
                    set.insert(Rule::Mes);
                }
                RuleChoice::Optimal => {
                    set.insert(Rule::Optimal);
                }
                RuleChoice::All => {
                    set.extend([Rule::Greedy, Rule::Mes]);
                }
            }
        }
        set.into_iter().collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ValuationChoice {
    #[default]
    Proxy,
    CostScaled,
}

/// A `--profile` argument: `PATH` or `FORMAT=PATH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileArg {
    pub format: Option<Format>,
    pub path: PathBuf,
}

impl std::str::FromStr for ProfileArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('=') {
            Some((tag, path)) => Ok(ProfileArg { format: Some(tag.parse().map_err(|e| format!("{e}"))?), path: path.into() }),
            None => Ok(ProfileArg { format: None, path: s.into() }),
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct InputArgs {
    /// Instance document(s); repeat to cover several elections.
    #[arg(long = "instance", required = true)]
    pub instances: Vec<PathBuf>,
    /// Ballot table, optionally prefixed with its format tag (`kapp=votes.csv`).
    #[arg(long = "profile", required = true)]
    pub profiles: Vec<ProfileArg>,
    #[arg(long = "rule", value_enum, default_values_t = [RuleChoice::All])]
    pub rules: Vec<RuleChoice>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Parser, Debug)]
#[command(name = "pbvote", version, about = "Participatory budgeting aggregation and stability analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Aggregate full profiles and write outcome JSON (with Equal Shares payments).
    Aggregate {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long, value_enum, default_value_t = ValuationChoice::Proxy)]
        valuation: ValuationChoice,
    },
    /// Subsample voters repeatedly and report funding frequencies and entropy.
    Stability {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long = "nprime")]
        n_primes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        reps: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Score each format's outcome with a reference format's voters.
    Welfare {
        #[command(flatten)]
        inputs: InputArgs,
        /// Reference format(s); every provided format when omitted.
        #[arg(long = "reference-format")]
        reference_formats: Vec<Format>,
        /// Also divide by the welfare-optimal outcome's welfare.
        #[arg(long)]
        normalize: bool,
    },
    /// Convert an external vote table into a ballot table.
    Adapt {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        format: Format,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        election: Option<String>,
        #[arg(long, default_value = "voter")]
        voter_column: String,
        #[arg(long, default_value = "vote")]
        vote_column: String,
        #[arg(long)]
        consistent_column: Option<String>,
        /// `COLUMN=VALUE`; rows not matching every filter are skipped.
        #[arg(long = "filter")]
        filters: Vec<String>,
        #[arg(long, default_value_t = ';')]
        separator: char,
        /// CSV mapping external project ids to instance ids.
        #[arg(long)]
        project_map: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the bundled election instances.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcmd {
    Aggregate,
    Stability,
    Welfare,
}

impl Subcmd {
    fn tag(self) -> &'static str {
        match self {
            Subcmd::Aggregate => "aggregate",
            Subcmd::Stability => "stability",
            Subcmd::Welfare => "welfare",
        }
    }
}

/// Everything an analysis subcommand needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub subcommand: Subcmd,
    pub instances: Vec<PathBuf>,
    pub profiles: Vec<ProfileArg>,
    pub rules: Vec<Rule>,
    pub n_primes: Vec<usize>,
    pub repetitions: usize,
    pub seed: Option<u64>,
    pub reference_formats: Vec<Format>,
    pub normalize: bool,
    pub valuation: ValuationScheme,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(subcommand: Subcmd, instances: Vec<PathBuf>, profiles: Vec<ProfileArg>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            subcommand,
            instances,
            profiles,
            rules: vec![Rule::Greedy, Rule::Mes],
            n_primes: DEFAULT_N_PRIMES.to_vec(),
            repetitions: DEFAULT_REPETITIONS,
            seed: None,
            reference_formats: Vec::new(),
            normalize: false,
            valuation: ValuationScheme::Proxy,
            out: out.into(),
        }
    }

    fn from_inputs(subcommand: Subcmd, inputs: InputArgs) -> Self {
        let mut cfg = RunConfig::new(subcommand, inputs.instances, inputs.profiles, inputs.out);
        cfg.rules = RuleChoice::rules(&inputs.rules);
        cfg
    }
}

/// One election's instance and the profiles cast on it.
#[derive(Debug)]
pub struct ElectionInputs {
    pub name: String,
    pub instance: Arc<Instance>,
    pub profiles: Vec<Profile>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::from(IoError::file(path, e)))
}

/// Loads instances and routes each profile to its election (by the
/// `election=` header key, or to the only instance when there is one).
pub fn load_inputs(config: &RunConfig) -> Result<(Vec<ElectionInputs>, Vec<PathBuf>), CliError> {
    let mut elections = Vec::new();
    let mut read_paths = Vec::new();
    for path in &config.instances {
        let inst = io::parse_instance(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let name = inst
            .election()
            .map(str::to_string)
            .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        if elections.iter().any(|e: &ElectionInputs| e.name == name) {
            return Err(CliError::Input(format!("election `{name}` given twice")));
        }
        elections.push(ElectionInputs { name, instance: Arc::new(inst), profiles: Vec::new() });
        read_paths.push(path.clone());
    }
    for arg in &config.profiles {
        let text = read(&arg.path)?;
        let header = io::read_profile_header(&text).map_err(|e| CliError::Input(format!("{}: {e}", arg.path.display())))?;
        if let Some(f) = arg.format {
            if f != header.format {
                return Err(CliError::Input(format!("{}: tagged {f} but file holds {}", arg.path.display(), header.format)));
            }
        }
        let target = match (&header.election, elections.len()) {
            (_, 1) => 0,
            (Some(name), _) => elections
                .iter()
                .position(|e| &e.name == name)
                .ok_or_else(|| CliError::Input(format!("{}: no instance for election `{name}`", arg.path.display())))?,
            (None, _) => {
                return Err(CliError::Input(format!("{}: add election=<name> to the header to pick an instance", arg.path.display())))
            }
        };
        let election = &mut elections[target];
        let profile = io::parse_profile(&text, election.instance.clone())
            .map_err(|e| CliError::Input(format!("{}: {e}", arg.path.display())))?
            .with_election(election.name.clone());
        if election.profiles.iter().any(|p| p.format() == profile.format()) {
            return Err(CliError::Input(format!("two {} profiles for election `{}`", profile.format(), election.name)));
        }
        election.profiles.push(profile);
        read_paths.push(arg.path.clone());
    }
    for e in &mut elections {
        e.profiles.sort_by_key(|p| p.format());
    }
    Ok((elections, read_paths))
}

struct Writer {
    out: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    fn new(out: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::Input(format!("cannot create {}: {e}", out.display())))?;
        Ok(Writer { out: out.to_path_buf(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    fn finish(mut self, config: &RunConfig, inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
        let manifest = Manifest::build(config, inputs, &self.written).map_err(CliError::from)?;
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        self.write(MANIFEST_FILE, &json)?;
        Ok(self.written)
    }
}

/// Aggregates every full profile under each rule; writes one outcome JSON each.
pub fn cmd_aggregate(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (elections, inputs) = load_inputs(config)?;
    let mut w = Writer::new(&config.out)?;
    for e in &elections {
        for profile in &e.profiles {
            let vals = derive_valuations_with(profile, config.valuation).map_err(|err| CliError::Input(err.to_string()))?;
            for &rule in &config.rules {
                let outcome = rule.apply(&e.instance, &vals).map_err(|err| CliError::Compute(err.to_string()))?;
                log::info!("{} {} {}: funded {:?}", e.name, profile.format(), rule, outcome.funded);
                w.write(&format!("outcome_{}_{}_{}.json", e.name, profile.format(), rule), &io::outcome_json(&outcome, &e.instance))?;
            }
        }
    }
    w.finish(config, &inputs)
}

/// Runs the subsampling experiment for every (profile, n') and writes per
/// election: heatmaps per (rule, n'), the entropy curve, the greedy-vs-ES
/// entropy comparison and the full JSON reports.
pub fn cmd_stability(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let seed = config.seed.ok_or_else(|| CliError::Input("stability runs require --seed".into()))?;
    let (elections, inputs) = load_inputs(config)?;
    let n_primes = if config.n_primes.is_empty() { DEFAULT_N_PRIMES.to_vec() } else { config.n_primes.clone() };
    let mut w = Writer::new(&config.out)?;
    for e in &elections {
        let mut reports = Vec::new();
        for profile in &e.profiles {
            for &n in &n_primes {
                reports.extend(run_stability(profile, &config.rules, n, config.repetitions, seed)?);
            }
        }
        for &rule in &config.rules {
            for &n in &n_primes {
                let subset: Vec<_> = reports.iter().filter(|r| r.config.rule == rule && r.config.n_prime == n).cloned().collect();
                let map = frequency_heatmap(&subset)?;
                w.write(&format!("heatmap_{}_{}_n{}.csv", e.name, rule, n), &io::heatmap_csv(&map))?;
            }
        }
        w.write(&format!("entropy_{}.csv", e.name), &io::entropy_csv(&reports))?;
        if config.rules.contains(&Rule::Greedy) && config.rules.contains(&Rule::Mes) {
            w.write(&format!("entropy_comparison_{}.csv", e.name), &io::entropy_comparison_csv(&reports))?;
        }
        w.write(&format!("stability_{}.json", e.name), &io::stability_json(&reports))?;
    }
    w.finish(config, &inputs)
}

/// Computes welfare matrices per election and reference format, plus the
/// cross-election average when several elections are given.
pub fn cmd_welfare(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (elections, inputs) = load_inputs(config)?;
    let references: Vec<Format> = if config.reference_formats.is_empty() {
        elections.iter().flat_map(|e| e.profiles.iter().map(|p| p.format())).collect::<BTreeSet<_>>().into_iter().collect()
    } else {
        config.reference_formats.clone()
    };
    let mut w = Writer::new(&config.out)?;
    for &reference in &references {
        let mut matrices: Vec<WelfareMatrix> = Vec::new();
        for e in &elections {
            if !e.profiles.iter().any(|p| p.format() == reference) {
                log::warn!("election `{}` has no {} profile; skipped for this reference", e.name, reference);
                continue;
            }
            for f in Format::ALL {
                if !e.profiles.iter().any(|p| p.format() == f) {
                    log::warn!("election `{}` has no {} profile; row omitted", e.name, f);
                }
            }
            let m = cross_format_welfare(&e.profiles, &config.rules, reference, config.normalize)?;
            w.write(&format!("welfare_{}_ref-{}.csv", e.name, reference), &io::welfare_csv(&m))?;
            matrices.push(m);
        }
        if matrices.is_empty() {
            return Err(AnalysisError::MissingReference(reference).into());
        }
        if matrices.len() > 1 {
            let avg = average_welfare(&matrices).expect("non-empty");
            w.write(&format!("welfare_average_ref-{}.csv", reference), &io::welfare_csv(&avg))?;
        }
        w.write(&format!("welfare_ref-{}.json", reference), &serde_json::to_string_pretty(&matrices).expect("serializes"))?;
    }
    w.finish(config, &inputs)
}

fn cmd_adapt(command: Command) -> Result<Vec<PathBuf>, CliError> {
    let Command::Adapt { instance, input, format, k, t, election, voter_column, vote_column, consistent_column, filters, separator, project_map, out } =
        command
    else {
        unreachable!("called with the adapt command");
    };
    let inst = io::parse_instance(&read(&instance)?)?;
    let mut cfg = AdapterConfig::new(format, voter_column, vote_column);
    cfg.params = FormatParams { k, t };
    cfg.election = election.or_else(|| inst.election().map(str::to_string));
    cfg.consistent_column = consistent_column;
    cfg.item_separator = separator;
    cfg.filters = filters
        .iter()
        .map(|f| f.split_once('=').map(|(c, v)| (c.to_string(), v.to_string())).ok_or_else(|| CliError::Input(format!("bad filter `{f}`"))))
        .collect::<Result<_, _>>()?;
    if let Some(map) = project_map {
        cfg.project_map = read_project_map(&read(&map)?)?;
    }
    let profile = adapt(&read(&input)?, &cfg, inst)?;
    fs::write(&out, io::serialize_profile(&profile)).map_err(|e| CliError::Input(format!("cannot write {}: {e}", out.display())))?;
    Ok(vec![out])
}

fn cmd_fixtures(out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut w = Writer::new(out)?;
    for e in Election::ALL {
        w.write(&format!("{}.toml", e.tag()), e.source())?;
    }
    Ok(w.written)
}

pub fn execute(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Aggregate { inputs, valuation } => {
            let mut cfg = RunConfig::from_inputs(Subcmd::Aggregate, inputs);
            cfg.valuation = match valuation {
                ValuationChoice::Proxy => ValuationScheme::Proxy,
                ValuationChoice::CostScaled => ValuationScheme::CostScaled,
            };
            cmd_aggregate(&cfg)
        }
        Command::Stability { inputs, n_primes, reps, seed } => {
            let mut cfg = RunConfig::from_inputs(Subcmd::Stability, inputs);
            cfg.n_primes = n_primes;
            cfg.repetitions = reps;
            cfg.seed = Some(seed);
            cmd_stability(&cfg)
        }
        Command::Welfare { inputs, reference_formats, normalize } => {
            let mut cfg = RunConfig::from_inputs(Subcmd::Welfare, inputs);
            cfg.reference_formats = reference_formats;
            cfg.normalize = normalize;
            cmd_welfare(&cfg)
        }
        adapt @ Command::Adapt { .. } => cmd_adapt(adapt),
        Command::Fixtures { out } => cmd_fixtures(&out),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("pbvote: {e}");
            e.exit_code()
        }
    }
}
