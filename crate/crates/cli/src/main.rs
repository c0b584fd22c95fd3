use clap::{Args, Parser, Subcommand, ValueEnum};
use hygreedy::analysis::{
    balance_check, count_contained, degcond_predictor, gowers_norm, turan_exponent, DEFAULT_BUDGET,
};
use hygreedy::generators::{d_cube, k_ap, k_ap_labeled, random_uniform, sum_free, template_copies, LabeledFamily, Template};
use hygreedy::harness::{
    audit_trace, cmd_count_experiment, cmd_gowers_experiment, cmd_run, cmd_trajectory, parse_template, resolve_params,
    thread_pool, CountExperiment, ExperimentConfig, GowersExperiment, InstanceSpec, ParamOverrides,
};
use hygreedy::{EdgeFamily, Error, Hypergraph, Params, Result, Vertex};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hygreedy", version, about = "Random greedy independent sets in uniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance or a counting family.
    Gen(GenArgs),
    /// Run a seeded ensemble of the process.
    Run(RunArgs),
    /// Tabulate predicted trajectories.
    Traj(TrajArgs),
    /// Gowers norm of a set, or the k-AP-free norm experiment.
    Gowers(GowersArgs),
    /// Count edges of a family inside a set, or the subgraph-count experiment.
    Count(CountArgs),
    /// Strict balance of a template and the degree-condition prediction.
    Balance(TemplateArgs),
    /// Turán lower-bound exponents of a template.
    Turan(TuranArgs),
    /// Re-check the stop conditions recorded in a saved trace.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Kap,
    Template,
    SumFree,
    Random,
    Cube,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Built-in template name (triangle, diamond, cherry, K4, C5, K4^3, K2,2,2).
    #[arg(long)]
    template: Option<String>,
    #[arg(long)]
    template_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit arithmetic progressions counted by (a, d) as a labeled family.
    #[arg(long)]
    multiplicity: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Accept constants that break zeta <= delta/10 <= epsilon/100.
    #[arg(long)]
    allow_loose: bool,
}

impl ParamArgs {
    fn apply(&self, base: &mut ParamOverrides) {
        let set = |slot: &mut Option<f64>, v: Option<f64>| {
            if v.is_some() {
                *slot = v;
            }
        };
        set(&mut base.epsilon, self.epsilon);
        set(&mut base.delta, self.delta);
        set(&mut base.zeta, self.zeta);
        set(&mut base.alpha, self.alpha);
        set(&mut base.beta, self.beta);
        base.allow_loose |= self.allow_loose;
    }

    fn overrides(&self) -> ParamOverrides {
        let mut o = ParamOverrides::default();
        self.apply(&mut o);
        o
    }
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hypergraph file, used when no config is given or to replace its instance.
    #[arg(long)]
    instance_file: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed_base: Option<u64>,
    #[arg(long)]
    checkpoint_every: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    stop: bool,
    #[arg(long)]
    z: bool,
    #[arg(long)]
    halt: bool,
    /// Output directory for traces and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct TrajArgs {
    /// Resolve parameters from a hypergraph file instead of --r/--n/--d.
    #[arg(long)]
    instance_file: Option<PathBuf>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Grid end; defaults to t_max.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    check_vareq: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct GowersArgs {
    /// One vertex id per line.
    #[arg(long)]
    set_file: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: usize,
    /// Moduli for the experiment mode, comma separated.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct CountArgs {
    /// Counting family: hypergraph (hg1/JSON) or labeled family (lf1).
    #[arg(long)]
    family_file: PathBuf,
    /// One vertex id per line.
    #[arg(long)]
    set_file: Option<PathBuf>,
    /// Density for the prediction; defaults to |I|/N.
    #[arg(long)]
    p: Option<f64>,
    /// Instance for the experiment mode.
    #[arg(long)]
    instance_file: Option<PathBuf>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long, default_value_t = 10.0)]
    min_expected: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct TemplateArgs {
    #[arg(long)]
    template_file: Option<PathBuf>,
    #[arg(long)]
    template: Option<String>,
    /// Expected uniformity of the template.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct TuranArgs {
    #[command(flatten)]
    template: TemplateArgs,
    /// Skip the strict balance requirement.
    #[arg(long)]
    no_check: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    trace: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = thread_pool().and_then(|pool| pool.install(|| dispatch(cli.command)));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Traj(a) => traj(a),
        Command::Gowers(a) => gowers(a),
        Command::Count(a) => count(a),
        Command::Balance(a) => balance(a),
        Command::Turan(a) => turan(a),
        Command::Check(a) => check(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Input(format!("missing --{flag}")))
}

fn read_set(path: &Path) -> Result<Vec<Vertex>> {
    std::fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<Vertex>().map_err(|_| Error::Input(format!("bad vertex id {l:?}"))))
        .collect()
}

fn read_template(args: &TemplateArgs) -> Result<Template> {
    let t = match (&args.template_file, &args.template) {
        (Some(path), _) => Template::parse(&std::fs::read_to_string(path)?)?,
        (None, Some(name)) => parse_template(name)?,
        (None, None) => return Err(Error::Input("give --template-file or --template".into())),
    };
    if let Some(k) = args.k {
        if k != t.k {
            return Err(Error::Input(format!("template is {}-uniform, not {k}-uniform", t.k)));
        }
    }
    Ok(t)
}

fn read_hypergraph(path: &Path) -> Result<Hypergraph> {
    Hypergraph::parse_any(&std::fs::read_to_string(path)?)
}

enum Family {
    Plain(Hypergraph),
    Labeled(LabeledFamily),
}

fn read_family(path: &Path) -> Result<Family> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with("lf1") {
        Ok(Family::Labeled(LabeledFamily::parse_text(&text)?))
    } else {
        Ok(Family::Plain(Hypergraph::parse_any(&text)?))
    }
}

fn gen(a: GenArgs) -> Result<u8> {
    let labeled = match a.kind {
        Kind::Cube => Some(d_cube(a.n, need(a.d, "d")?)?),
        Kind::Kap if a.multiplicity => Some(k_ap_labeled(a.n, need(a.k, "k")?)?),
        _ => None,
    };
    if let Some(f) = labeled {
        if matches!(a.format, Format::Json) {
            return Err(Error::Input("labeled families are written in text form only".into()));
        }
        emit(a.out.as_deref(), &f.to_text())?;
        return Ok(0);
    }
    let h = match a.kind {
        Kind::Kap => k_ap(a.n, need(a.k, "k")?)?,
        Kind::SumFree => sum_free(a.n)?,
        Kind::Random => random_uniform(a.n, need(a.r, "r")?, need(a.m, "m")?, a.seed)?,
        Kind::Template => {
            let t = read_template(&TemplateArgs { template_file: a.template_file, template: a.template, k: None })?;
            template_copies(&t, a.n)?
        }
        Kind::Cube => unreachable!("handled above"),
    };
    let text = match a.format {
        Format::Text => h.to_text(),
        Format::Json => h.to_json()? + "\n",
    };
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn run(a: RunArgs) -> Result<u8> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::new(InstanceSpec::File {
            path: need(a.instance_file.clone(), "instance-file or --config")?,
        }),
    };
    if let (Some(_), Some(path)) = (&a.config, &a.instance_file) {
        cfg.instance = InstanceSpec::File { path: path.clone() };
    }
    if let Some(v) = a.runs {
        cfg.runs = v;
    }
    if let Some(v) = a.seed_base {
        cfg.seed_base = v;
    }
    if let Some(v) = a.checkpoint_every {
        cfg.checkpoint_every = v;
    }
    if a.max_steps.is_some() {
        cfg.max_steps = a.max_steps;
    }
    cfg.monitors.stop |= a.stop;
    cfg.monitors.z |= a.z;
    cfg.monitors.halt |= a.halt;
    if a.out.is_some() {
        cfg.output.dir = a.out.clone();
    }
    a.params.apply(&mut cfg.params);
    let (summary, _) = cmd_run(&cfg)?;
    emit_json(None, &summary)?;
    Ok(0)
}

fn traj(a: TrajArgs) -> Result<u8> {
    let params: Params = match &a.instance_file {
        Some(path) => {
            let res = resolve_params(&read_hypergraph(path)?, &a.params.overrides())?;
            for w in &res.warnings {
                eprintln!("warning: {w}");
            }
            res.params
        }
        None => {
            let (r, n, d) = (need(a.r, "r")?, need(a.n, "n")?, need(a.d, "d")?);
            let epsilon = need(a.params.epsilon, "epsilon")?;
            let delta = a.params.delta.unwrap_or(epsilon / 10.0);
            let zeta = a.params.zeta.unwrap_or(delta / 10.0);
            let mut p = Params::new(r, n, d, epsilon, delta, zeta, 0.0, 0.0)?;
            if let Some(w) = p.validate(a.params.allow_loose)? {
                eprintln!("warning: {w}");
            }
            match (a.params.alpha, a.params.beta) {
                (Some(al), Some(be)) => {
                    p.alpha = al;
                    p.beta = be;
                }
                _ => p.fit_alpha_beta()?,
            }
            p
        }
    };
    let table = cmd_trajectory(&params, a.t_end.unwrap_or_else(|| params.t_max()), a.points, a.check_vareq)?;
    emit(a.out.as_deref(), &table.csv)?;
    Ok(match &table.vareq {
        Some(rep) if !rep.passed => 3,
        _ => 0,
    })
}

#[derive(Serialize)]
struct NormRecord {
    n: usize,
    d: usize,
    size: usize,
    norm: f64,
}

fn gowers(a: GowersArgs) -> Result<u8> {
    if let Some(path) = &a.set_file {
        let n = need(a.n, "n")?;
        let set = read_set(path)?;
        let norm = gowers_norm::<f64>(&set, n, a.d, a.budget)?;
        emit_json(a.out.as_deref(), &NormRecord { n, d: a.d, size: set.len(), norm })?;
        return Ok(0);
    }
    if a.ns.is_empty() {
        return Err(Error::Input("give --set-file or --ns".into()));
    }
    let exp = GowersExperiment {
        ns: a.ns,
        k: need(a.k, "k")?,
        d: a.d,
        runs: a.runs,
        seed_base: a.seed_base,
        params: a.params.overrides(),
        budget: a.budget,
    };
    emit_json(a.out.as_deref(), &cmd_gowers_experiment(&exp)?)?;
    Ok(0)
}

fn count(a: CountArgs) -> Result<u8> {
    let family = read_family(&a.family_file)?;
    if let Some(path) = &a.instance_file {
        let h = read_hypergraph(path)?;
        let overrides = a.params.overrides();
        let i_max = if overrides.zeta.is_some() {
            Some(resolve_params(&h, &overrides)?.params.i_max())
        } else {
            None
        };
        let exp = CountExperiment {
            i: need(a.i, "i")?,
            runs: a.runs,
            seed_base: a.seed_base,
            i_max,
            min_expected: a.min_expected,
        };
        let rep = match &family {
            Family::Plain(g) => cmd_count_experiment(&h, g, &exp)?,
            Family::Labeled(g) => cmd_count_experiment(&h, g, &exp)?,
        };
        emit_json(a.out.as_deref(), &rep)?;
        return Ok(0);
    }
    let set = read_set(&need(a.set_file, "set-file or --instance-file")?)?;
    fn contained<F: EdgeFamily>(g: &F, set: &[Vertex], p: Option<f64>, min: f64) -> Result<hygreedy::analysis::ContainedCount> {
        let mut distinct = set.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let p = p.unwrap_or(distinct.len() as f64 / g.vertex_count().max(1) as f64);
        count_contained(g, set, p, min)
    }
    let rep = match &family {
        Family::Plain(g) => contained(g, &set, a.p, a.min_expected)?,
        Family::Labeled(g) => contained(g, &set, a.p, a.min_expected)?,
    };
    emit_json(a.out.as_deref(), &rep)?;
    Ok(0)
}

#[derive(Serialize)]
struct BalanceRecord {
    verdict: hygreedy::analysis::BalanceVerdict,
    degcond: hygreedy::analysis::DegcondPrediction,
}

fn balance(a: TemplateArgs) -> Result<u8> {
    let t = read_template(&a)?;
    let record = BalanceRecord { verdict: balance_check(&t)?, degcond: degcond_predictor(&t)? };
    emit_json(None, &record)?;
    Ok(0)
}

#[derive(Serialize)]
struct TuranRecord {
    template: String,
    power: String,
    log_power: String,
}

fn turan(a: TuranArgs) -> Result<u8> {
    let t = read_template(&a.template)?;
    let (power, log_power) = turan_exponent(&t, !a.no_check)?;
    let text = |r: hygreedy::scalar::Exponent| format!("{}/{}", r.numer(), r.denom());
    emit_json(None, &TuranRecord { template: t.name.clone(), power: text(power), log_power: text(log_power) })?;
    Ok(0)
}

fn check(a: CheckArgs) -> Result<u8> {
    let audit = audit_trace(&std::fs::read_to_string(&a.trace)?)?;
    emit_json(None, &audit)?;
    Ok(if audit.consistent { 0 } else { 3 })
}
