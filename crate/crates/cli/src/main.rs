use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use femtoshare_core::analysis::{femto_op_lower_bound, macro_op_lower_bound};
use femtoshare_core::experiments::run;
use femtoshare_core::{
    BoundContext, ExperimentSpec, NetworkParams, PowerPolicy, Preset, Regulator, Sweep, SweepVar,
};

#[derive(Parser)]
#[command(
    name = "femtoshare",
    version,
    about = "Outage bounds, power regulation and simulation for shared-spectrum femtocells"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure preset or a custom sweep and write CSVs.
    Run(RunArgs),
    /// Print the scenario parameters as TOML.
    Params(ScenarioArgs),
    /// Print the analytic bounds and the regulation decision at one distance.
    Eval {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Distance, m.
        #[arg(long)]
        d: f64,
        #[arg(long, value_enum, default_value_t = Policy::Lower)]
        policy: Policy,
    },
}

#[derive(clap::Args)]
struct ScenarioArgs {
    /// TOML or JSON scenario file; unset fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Expected FAPs per macrocell.
    #[arg(long)]
    nf: Option<f64>,
    /// Wall-partition loss, dB.
    #[arg(long)]
    xi: Option<f64>,
}

impl ScenarioArgs {
    fn params(&self) -> Result<NetworkParams> {
        let mut p = match &self.config {
            Some(path) => NetworkParams::from_file(path)
                .with_context(|| format!("loading {}", path.display()))?,
            None => NetworkParams::default(),
        };
        if let Some(n) = self.nf {
            p = p.with_n_f(n);
        }
        if let Some(x) = self.xi {
            p = p.with_xi_db(x);
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(clap::Args)]
struct RunArgs {
    /// fig1 ... fig7 or custom.
    preset: String,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Independent FAP drops.
    #[arg(long, default_value_t = 100)]
    drops: usize,
    /// Fading and UE trials per drop.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Sweep for custom runs: a variable (d, n_f, lambda_f, xi_db) and a
    /// comma-separated increasing grid.
    #[arg(long, num_args = 2, value_names = ["VAR", "VALUES"])]
    sweep: Option<Vec<String>>,
    /// Evaluation distance for custom sweeps over anything but d, m.
    #[arg(long, default_value_t = 800.0)]
    distance: f64,
    /// Drop-region radius as a multiple of the macrocell radius.
    #[arg(long)]
    region_scale: Option<f64>,
    #[arg(long, value_enum, default_value_t = Policy::Lower)]
    policy: Policy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    /// Lowest admissible power.
    Lower,
    /// Midpoint of the admissible window in dB.
    Mid,
    /// Highest admissible power.
    Upper,
}

impl From<Policy> for PowerPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Lower => PowerPolicy::LowerEdge,
            Policy::Mid => PowerPolicy::MidpointDb,
            Policy::Upper => PowerPolicy::UpperEdge,
        }
    }
}

fn parse_sweep(raw: &[String]) -> Result<Sweep> {
    let var: SweepVar = raw[0].parse()?;
    let values = raw[1]
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("bad grid value '{v}'"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep::new(var, values)?)
}

fn run_preset(args: RunArgs) -> Result<bool> {
    let preset: Preset = args.preset.parse()?;
    let mut spec = ExperimentSpec::new(preset);
    spec.params = args.scenario.params()?;
    spec.n_f = args.scenario.nf;
    spec.xi_db = args.scenario.xi;
    spec.seed = args.seed;
    spec.n_drops = args.drops;
    spec.n_trials = args.trials;
    spec.out_dir = args.out;
    spec.region_scale = args.region_scale;
    spec.policy = args.policy.into();
    spec.distance = args.distance;
    spec.sweep = args.sweep.as_deref().map(parse_sweep).transpose()?;
    if spec.sweep.is_some() && preset != Preset::Custom {
        bail!("--sweep only applies to the custom preset");
    }
    let report = run(&spec)?;
    print!("{}", report.summary_text());
    Ok(report.passed())
}

fn eval(scenario: ScenarioArgs, d: f64, policy: Policy) -> Result<()> {
    let ctx = BoundContext::new(scenario.params()?)?;
    let femto = femto_op_lower_bound(&ctx, d)?;
    let macro_ = macro_op_lower_bound(&ctx, d, ctx.lambda_f())?;
    let reg = Regulator::new(ctx.clone(), ctx.lambda_f(), policy.into())?;
    let dec = reg.decide(d)?;
    println!("femto_op_lb_macro_only = {}", femto.p_macro_only);
    println!("femto_op_lb_composite = {}", femto.p_composite);
    println!("femto_op_lb = {}", femto.p_total_lb);
    println!("macro_op_lb = {macro_}");
    println!("d_fm_min_m = {}", reg.d_min());
    println!("rho = {}", reg.rho());
    println!("mode = {:?}", dec.mode);
    println!("p_lb_dbm = {}", dec.p_lb_dbm);
    println!("p_ub_dbm = {}", dec.p_ub_dbm);
    println!("power_dbm = {}", dec.power_dbm);
    println!("transmit_prob = {}", dec.transmit_prob);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run_preset(args),
        Command::Params(s) => s.params().map(|p| {
            print!("{}", p.to_toml());
            true
        }),
        Command::Eval {
            scenario,
            d,
            policy,
        } => eval(scenario, d, policy).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
