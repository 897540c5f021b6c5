use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use sstack::decision_list::{all_inputs, mistake_bound, run_dl_adversarial, run_dl_online, DecisionList, Demotion, DlTranscript};
use sstack::dims::{littlestone_dim, shatter_dim, ShatterKind, SlSolver, DEFAULT_MAX_SUBSET};
use sstack::distributional::{
    context_free_generalization, log_log_slope, pac_experiment, sufficient_sample_size, ContextDistribution, PacConfig,
    SeenSetEvaluator,
};
use sstack::game::check_distinct_types;
use sstack::hypothesis::HypothesisClass;
use sstack::online::{run_online, Environment, LearnerKind};
use sstack::polytope::{default_delta, Solver, MAX_PROFILES};
use sstack::presets::load_preset;
use sstack::rational::{format_decimal, format_rational, parse_rational, Rational};
use sstack::{Error, StackelbergGame};
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sstack", version, about = "Learning in structured Stackelberg games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Littlestone, SL and optionally SN/SG dimensions
    Dim(DimArgs),
    /// Online play, one CSV row per round
    Simulate(SimulateArgs),
    /// Distributional learner: failure rate against sample size
    Pac(PacArgs),
    /// Single-context utility maximizer: optimality gap against sample size
    Erm(ErmArgs),
    /// Online decision-list learner
    Dl(DlArgs),
    /// Schema, compatibility and type-distinctness checks
    Validate(Input),
}

#[derive(Args)]
struct Input {
    /// Built-in instance (perm2..perm5, soa-example, table3a, greedy-gap, threshold-grid:<r>)
    #[arg(long, conflicts_with_all = ["game", "class"])]
    preset: Option<String>,
    /// Game JSON file
    #[arg(long, requires = "class")]
    game: Option<PathBuf>,
    /// Hypothesis class JSON file
    #[arg(long, requires = "game")]
    class: Option<PathBuf>,
    /// Response-profile enumeration cap for min-max programs
    #[arg(long, default_value_t = MAX_PROFILES)]
    max_profiles: u64,
}

#[derive(Args)]
struct Output {
    /// CSV destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a 12-digit decimal column next to each exact value
    #[arg(long)]
    decimal: bool,
}

#[derive(Args)]
struct DimArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    /// Also compute the SN and SG dimensions at this margin
    #[arg(long)]
    gamma: Option<String>,
    /// Largest subset size tried by the shattering search
    #[arg(long, default_value_t = DEFAULT_MAX_SUBSET)]
    max_subset: usize,
    /// Write the SL witness tree as JSON
    #[arg(long)]
    tree_out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    /// ssoa, soa or greedy
    #[arg(long, default_value = "ssoa")]
    learner: String,
    /// `adversary` or `scripted:<path>`
    #[arg(long, default_value = "adversary")]
    env: String,
    /// Number of rounds (default: contexts + 2 against the adversary, the script length otherwise)
    #[arg(long)]
    rounds: Option<usize>,
}

#[derive(Args)]
struct PacArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    #[arg(long, default_value = "1/4")]
    gamma: String,
    #[arg(long, default_value = "1/10")]
    epsilon: String,
    /// Comma-separated sample sizes
    #[arg(long, value_delimiter = ',', default_value = "0,2,4,8")]
    m: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Row of the class used as the target hypothesis
    #[arg(long, default_value_t = 0)]
    target: usize,
    /// Per-trial CSV destination
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

#[derive(Args)]
struct ErmArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    /// `uniform:<K>` or comma-separated type probabilities
    #[arg(long, default_value = "uniform")]
    dist: String,
    /// Context id (defaults to the first context)
    #[arg(long)]
    context: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "4,16,64,256")]
    m: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Per-trial CSV destination
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

#[derive(Args)]
struct DlArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "K")]
    k: usize,
    /// Target decision list JSON
    #[arg(long)]
    target: PathBuf,
    /// `exhaustive:<passes>` or `adversarial`
    #[arg(long, default_value = "exhaustive:100")]
    stream: String,
    /// Per-round transcript CSV destination
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Process exit codes by failure class.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::CapExceeded(_) | Error::ShatterCapped { .. }) => 3,
        Some(Error::NotRealizable { .. }) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dim(a) => cmd_dim(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Pac(a) => cmd_pac(a),
        Command::Erm(a) => cmd_erm(a),
        Command::Dl(a) => cmd_dl(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load(input: &Input) -> anyhow::Result<(StackelbergGame, HypothesisClass)> {
    if input.max_profiles == 0 {
        bail!(Error::InvalidInput("--max-profiles must be positive".into()));
    }
    match (&input.preset, &input.game, &input.class) {
        (Some(name), None, None) => {
            let p = load_preset(name)?;
            Ok((p.game, p.class))
        }
        (None, Some(g), Some(c)) => {
            let game = StackelbergGame::from_json(&read(g)?)?;
            let class = HypothesisClass::from_json(&read(c)?)?;
            class.check_compatible(&game)?;
            Ok((game, class))
        }
        _ => bail!(Error::InvalidInput("give either --preset or both --game and --class".into())),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn rational_arg(text: &str, what: &str) -> anyhow::Result<Rational> {
    parse_rational(text).map_err(|e| anyhow!(Error::Parse(format!("{what}: {e}"))))
}

fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

/// CSV writer that expands each exact value into `p/q` plus an optional
/// decimal column.
struct Table {
    w: csv::Writer<Box<dyn Write>>,
    decimal: bool,
}

enum Cell {
    Text(String),
    Exact(Rational),
}

impl Table {
    fn new(out: Option<&Path>, decimal: bool) -> anyhow::Result<Self> {
        Ok(Self { w: csv::Writer::from_writer(sink(out)?), decimal })
    }

    /// `exact` marks the columns holding rationals.
    fn header(&mut self, names: &[&str], exact: &[&str]) -> anyhow::Result<()> {
        let mut row = Vec::new();
        for n in names {
            row.push(n.to_string());
            if self.decimal && exact.contains(n) {
                row.push(format!("{n}_decimal"));
            }
        }
        self.w.write_record(&row)?;
        Ok(())
    }

    fn row(&mut self, cells: Vec<Cell>) -> anyhow::Result<()> {
        let mut row = Vec::new();
        for c in cells {
            match c {
                Cell::Text(t) => row.push(t),
                Cell::Exact(v) => {
                    row.push(format_rational(&v));
                    if self.decimal {
                        row.push(format_decimal(&v));
                    }
                }
            }
        }
        self.w.write_record(&row)?;
        Ok(())
    }

    fn finish(mut self) -> anyhow::Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

fn text(v: impl ToString) -> Cell {
    Cell::Text(v.to_string())
}

fn cmd_dim(a: DimArgs) -> anyhow::Result<()> {
    let (game, class) = load(&a.input)?;
    if a.max_subset == 0 {
        bail!(Error::InvalidInput("--max-subset must be positive".into()));
    }
    let sl = SlSolver::from_solver(Solver::new(&game).with_max_profiles(a.input.max_profiles), &class)?;
    let full = class.full();
    let mut table = Table::new(a.output.out.as_deref(), a.output.decimal)?;
    table.header(&["quantity", "value"], &["value"])?;
    table.row(vec![text("ldim"), Cell::Exact(Rational::from_integer(littlestone_dim(&class).into()))])?;
    let value = sl.value(&full)?;
    table.row(vec![text("sldim"), Cell::Exact(value)])?;
    if let Some(path) = &a.tree_out {
        let tree = sl.tree(&full)?;
        std::fs::write(path, serde_json::to_string_pretty(&tree.to_json(&game))? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(g) = &a.gamma {
        let gamma = rational_arg(g, "--gamma")?;
        for (name, kind) in [("sndim", ShatterKind::Natarajan), ("sgdim", ShatterKind::Graph)] {
            let r = shatter_dim(sl.solver(), &class, &gamma, kind, a.max_subset)?;
            table.row(vec![text(name), Cell::Exact(Rational::from_integer(r.dim.into()))])?;
        }
    }
    table.finish()
}

fn cmd_simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let (game, class) = load(&a.input)?;
    let learner: LearnerKind = a.learner.parse()?;
    let env = if a.env == "adversary" {
        Environment::Adversary
    } else if let Some(path) = a.env.strip_prefix("scripted:") {
        Environment::scripted_from_json(&read(Path::new(path))?, &class)?
    } else {
        bail!(Error::InvalidInput(format!("unknown environment `{}`", a.env)));
    };
    let rounds = match (&env, a.rounds) {
        (_, Some(t)) => t,
        (Environment::Adversary, None) => class.num_contexts() + 2,
        (Environment::Scripted(s), None) => s.len(),
    };
    let sl = SlSolver::from_solver(Solver::new(&game).with_max_profiles(a.input.max_profiles), &class)?;
    let bound = sl.value(&class.full())?;
    let transcript = run_online(&sl, learner, &env, rounds)?;
    let mut table = Table::new(a.output.out.as_deref(), a.output.decimal)?;
    let exact = ["loss", "cum_regret", "sl_before", "sl_after"];
    table.header(
        &[
            "round", "context", "strategy", "predicted_type", "true_type", "loss", "cum_regret", "vs_size", "attained",
            "sl_before", "sl_after",
        ],
        &exact,
    )?;
    for r in &transcript.rounds {
        table.row(vec![
            text(r.round),
            text(game.context_id(r.context)),
            text(r.strategy.to_text()),
            text(r.predicted_type.map(|t| t.to_string()).unwrap_or_default()),
            text(r.true_type),
            Cell::Exact(r.loss.clone()),
            Cell::Exact(r.cum_regret.clone()),
            text(r.vs_size),
            text(r.attained),
            Cell::Exact(r.sl_before.clone()),
            Cell::Exact(r.sl_after.clone()),
        ])?;
    }
    table.finish()?;
    let regret = &transcript.cumulative_regret;
    eprintln!(
        "cumulative_regret={} sldim={} within_bound={}",
        format_rational(regret),
        format_rational(&bound),
        if *regret <= bound { "yes" } else { "no" }
    );
    Ok(())
}

fn cmd_pac(a: PacArgs) -> anyhow::Result<()> {
    let (game, class) = load(&a.input)?;
    let gamma = rational_arg(&a.gamma, "--gamma")?;
    let epsilon = rational_arg(&a.epsilon, "--epsilon")?;
    if a.trials == 0 {
        bail!(Error::InvalidInput("--trials must be positive".into()));
    }
    let target = class
        .hypotheses()
        .get(a.target)
        .ok_or_else(|| Error::InvalidInput(format!("class has no row {}", a.target)))?
        .clone();
    let solver = Solver::new(&game).with_max_profiles(a.input.max_profiles);
    let dist = ContextDistribution::uniform(class.num_contexts())?;
    let eval = SeenSetEvaluator::new(&solver, &class, dist, target, gamma.clone())?;
    let config = PacConfig { epsilon: epsilon.clone(), gamma, trials: a.trials, sample_sizes: a.m.clone(), seed: a.seed };
    let (rows, summary) = pac_experiment(&eval, &config)?;
    let mut table = Table::new(a.output.out.as_deref(), a.output.decimal)?;
    let exact = ["failure_rate", "mean_cutoff_loss", "exact_failure_probability"];
    table.header(&["m", "trials", "failures", "failure_rate", "mean_cutoff_loss", "exact_failure_probability"], &exact)?;
    for s in &summary {
        table.row(vec![
            text(s.m),
            text(s.trials),
            text(s.failures),
            Cell::Exact(s.failure_rate.clone()),
            Cell::Exact(s.mean_cutoff_loss.clone()),
            Cell::Exact(eval.failure_probability(s.m, &epsilon)?),
        ])?;
    }
    table.finish()?;
    if let Some(path) = &a.trials_out {
        let mut t = Table::new(Some(path), a.output.decimal)?;
        t.header(&["m", "trial", "seed", "cutoff_loss", "failure"], &["cutoff_loss"])?;
        for r in rows {
            t.row(vec![text(r.m), text(r.trial), text(r.seed), Cell::Exact(r.cutoff_loss), text(r.failure)])?;
        }
        t.finish()?;
    }
    let target_p = Rational::new(1.into(), (100 * a.trials as i64).into());
    match sufficient_sample_size(&eval, &epsilon, &target_p, 10_000)? {
        Some(m) => eprintln!("sufficient_m={m} (exact failure probability <= {})", format_rational(&target_p)),
        None => eprintln!("sufficient_m>10000"),
    }
    Ok(())
}

fn parse_type_dist(spec: &str, types: usize) -> anyhow::Result<Vec<Rational>> {
    if spec == "uniform" || spec == format!("uniform:{types}") {
        return Ok(vec![Rational::new(1.into(), (types as i64).into()); types]);
    }
    if let Some(k) = spec.strip_prefix("uniform:") {
        bail!(Error::InvalidInput(format!("uniform:{k} does not match the game's {types} types")));
    }
    spec.split(',').map(|p| rational_arg(p.trim(), "--dist")).collect()
}

fn cmd_erm(a: ErmArgs) -> anyhow::Result<()> {
    let (game, _class) = load(&a.input)?;
    let z = match &a.context {
        Some(id) => game.context_index(id)?,
        None => 0,
    };
    let dist = parse_type_dist(&a.dist, game.num_types())?;
    let solver = Solver::new(&game).with_max_profiles(a.input.max_profiles);
    let (rows, summary) = context_free_generalization(&solver, z, &dist, &a.m, a.trials, a.seed)?;
    let mut table = Table::new(a.output.out.as_deref(), a.output.decimal)?;
    table.header(&["m", "trials", "mean_gap"], &["mean_gap"])?;
    for s in &summary {
        table.row(vec![text(s.m), text(a.trials), Cell::Exact(s.mean_gap.clone())])?;
    }
    table.finish()?;
    if let Some(path) = &a.trials_out {
        let mut t = Table::new(Some(path), a.output.decimal)?;
        t.header(&["m", "trial", "seed", "gap"], &["gap"])?;
        for r in rows {
            t.row(vec![text(r.m), text(r.trial), text(r.seed), Cell::Exact(r.gap)])?;
        }
        t.finish()?;
    }
    match log_log_slope(&summary) {
        Some(s) => eprintln!("log_log_slope={s:.6}"),
        None => eprintln!("log_log_slope=undefined (a mean gap is zero)"),
    }
    Ok(())
}

fn cmd_dl(a: DlArgs) -> anyhow::Result<()> {
    let target = DecisionList::from_json(&read(&a.target)?)?;
    let transcript: DlTranscript = if a.stream == "adversarial" {
        run_dl_adversarial(a.n, a.k, &target, Demotion::MergeNext)?
    } else if let Some(passes) = a.stream.strip_prefix("exhaustive:") {
        let passes: usize = passes.parse().map_err(|_| Error::Parse(format!("bad pass count `{passes}`")))?;
        let inputs = all_inputs(a.n);
        let stream: Vec<&Vec<bool>> = std::iter::repeat_n(&inputs, passes).flatten().collect();
        run_dl_online(a.n, a.k, &target, stream)?
    } else {
        bail!(Error::InvalidInput(format!("unknown stream `{}`", a.stream)));
    };
    if let Some(path) = &a.out {
        let mut t = Table::new(Some(path), false)?;
        t.header(&["round", "input", "predicted", "truth", "mistake", "levels"], &[])?;
        for (i, r) in transcript.rounds.iter().enumerate() {
            let bits: String = r.input.iter().map(|&b| if b { '1' } else { '0' }).collect();
            t.row(vec![text(i + 1), text(bits), text(r.predicted), text(r.truth), text(r.mistake), text(r.levels)])?;
        }
        t.finish()?;
    }
    let bound = mistake_bound(a.n, a.k, target.len());
    let mut t = Table::new(None, false)?;
    t.header(&["rounds", "mistakes", "bound", "within_bound"], &[])?;
    t.row(vec![
        text(transcript.rounds.len()),
        text(transcript.mistakes),
        text(bound),
        text(if transcript.mistakes <= bound { "yes" } else { "no" }),
    ])?;
    t.finish()
}

fn cmd_validate(a: Input) -> anyhow::Result<()> {
    let (game, class) = load(&a)?;
    // schema round trip
    if StackelbergGame::from_json(&game.to_json())? != game || HypothesisClass::from_json(&class.to_json())? != class {
        bail!(Error::InvalidInput("instance does not survive a JSON round trip".into()));
    }
    let reports = check_distinct_types(&game);
    let mut t = Table::new(None, false)?;
    t.header(&["type_a", "type_b", "witness_context", "minmax_value"], &["minmax_value"])?;
    for r in &reports {
        t.row(vec![
            text(r.pair.0),
            text(r.pair.1),
            text(r.witness.map(|z| game.context_id(z).to_string()).unwrap_or_default()),
            Cell::Exact(r.value.clone()),
        ])?;
    }
    t.finish()?;
    let delta = default_delta();
    eprintln!(
        "contexts={} types={} hypotheses={} delta={}",
        game.num_contexts(),
        game.num_types(),
        class.len(),
        format_rational(&delta)
    );
    // indistinct pairs are reported, not fatal
    let clashes: Vec<_> = reports.iter().filter(|r| !r.distinct()).map(|r| r.pair).collect();
    if !clashes.is_empty() {
        eprintln!("warning: types share an optimal strategy at every context: {clashes:?}");
    }
    Ok(())
}
