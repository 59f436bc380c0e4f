use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use awgn_exponent::{
    capacity, exponent_solution, g_dk_detailed, g_oh_numeric, generate_random_codebook, nu_zero,
    optimize_rho_nu_detailed, parametric_point, rho_star, run_crosscheck,
    simulate_correct_probability, Channel, CrosscheckConfig, CrosscheckReport, DkSolution, Error,
    ExponentSolution, GohGrid, GohResult, PowerBudget, QuadratureSpec, RhoNuOptimum, SimResult,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod config;

use config::{resolve_output, ConfigFile};

const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IDENTITY: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(String),
    Identity { identity: String, detail: String },
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Identity { .. } => EXIT_IDENTITY,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::CodebookTooLarge { .. } | Error::Parse(_) => {
                CliError::Usage(e.to_string())
            }
            Error::Density(_) | Error::DegenerateEstimate { .. } | Error::Solver(_) => {
                CliError::Solver(e.to_string())
            }
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "awgn-exp",
    version,
    about = "Correct-decoding exponents of the power-limited Gaussian channel"
)]
struct Cli {
    /// File of `key=value` settings used where a flag is not given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Channel capacity in nats and bits.
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Exponent at one rate by one or all solution methods.
    Exponent {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Rate in nats per channel use.
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Parametric sweep of the exponent curve as CSV.
    Curve {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Largest ν of the sweep; must be below ν₀.
        #[arg(long)]
        nu_max: Option<f64>,
        /// Number of intervals; the file has `steps + 1` rows.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs the cross-route and quadrature identity checks.
    Crosscheck(CrosscheckArgs),
    /// Monte Carlo correct-decoding probability of a random code.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Block length.
        #[arg(long)]
        n: Option<usize>,
        /// Target rate in nats; the codebook size is `ceil(exp(n R))`.
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Per-symbol variance of the codeword draws; defaults to the power budget.
        #[arg(long)]
        theta: Option<f64>,
        /// Seed of the codebook draw; defaults to `--seed`.
        #[arg(long)]
        codebook_seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ChannelArgs {
    /// Average power budget Γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Noise variance σ².
    #[arg(long)]
    sigma2: Option<f64>,
}

#[derive(Args, Debug)]
struct CrosscheckArgs {
    /// Comma-separated Γ/σ² ratios.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long)]
    sigma2: Option<f64>,
    /// Rates per ratio, spread over (C, C + span].
    #[arg(long)]
    rates: Option<usize>,
    #[arg(long)]
    span: Option<f64>,
    #[arg(long)]
    exact_tol: Option<f64>,
    #[arg(long)]
    variational_tol: Option<f64>,
    #[arg(long)]
    identity_tol: Option<f64>,
    /// Random parameter draws per quadrature identity.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature truncation half-width in standard deviations.
    #[arg(long)]
    half_width: Option<f64>,
    /// Quadrature nodes per axis.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Offset added to the closed-form side of the Gaussian-pair identity.
    #[arg(long, hide = true)]
    inject_zeta_bias: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Method {
    Parametric,
    Opt,
    Dk,
    Variational,
    All,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Method as ValueEnum>::from_str(s, true)
    }
}

/// Settings of one run after flags, config file and defaults are merged.
#[derive(Debug)]
enum RunConfig {
    Capacity {
        channel: ChannelSetting,
        format: Format,
    },
    Exponent {
        channel: ChannelSetting,
        rate: f64,
        method: Method,
        output: Option<PathBuf>,
    },
    Curve {
        channel: ChannelSetting,
        nu_max: f64,
        steps: usize,
        output: Option<PathBuf>,
    },
    Crosscheck {
        config: CrosscheckConfig,
        output: Option<PathBuf>,
    },
    Simulate {
        channel: ChannelSetting,
        n: usize,
        rate: f64,
        trials: u64,
        seed: u64,
        theta: Option<f64>,
        codebook_seed: u64,
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy)]
struct ChannelSetting {
    gamma: f64,
    sigma2: f64,
}

impl ChannelSetting {
    fn resolve(args: &ChannelArgs, file: &ConfigFile) -> Result<Self, CliError> {
        let gamma = file.get(args.gamma, "gamma", Some(1.0))?;
        let sigma2 = file.get(args.sigma2, "sigma2", Some(1.0))?;
        positive("gamma", gamma)?;
        positive("sigma2", sigma2)?;
        Ok(Self { gamma, sigma2 })
    }

    fn build(&self) -> Result<(PowerBudget, Channel), CliError> {
        Ok((PowerBudget::new(self.gamma)?, Channel::new(self.sigma2)?))
    }
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive and finite, got {value}"
        )))
    }
}

impl RunConfig {
    fn resolve(command: Command, file: &ConfigFile) -> Result<Self, CliError> {
        Ok(match command {
            Command::Capacity { channel, format } => RunConfig::Capacity {
                channel: ChannelSetting::resolve(&channel, file)?,
                format: file.get(format, "format", Some(Format::Text))?,
            },
            Command::Exponent {
                channel,
                rate,
                method,
                output,
            } => {
                let rate = file.get(rate, "rate", None)?;
                positive("rate", rate)?;
                RunConfig::Exponent {
                    channel: ChannelSetting::resolve(&channel, file)?,
                    rate,
                    method: file.get(method, "method", Some(Method::Parametric))?,
                    output: file.get_opt(output, "output")?,
                }
            }
            Command::Curve {
                channel,
                nu_max,
                steps,
                output,
            } => {
                let steps = file.get(steps, "steps", Some(100))?;
                if steps == 0 {
                    return Err(CliError::Usage("--steps must be at least 1".into()));
                }
                RunConfig::Curve {
                    channel: ChannelSetting::resolve(&channel, file)?,
                    nu_max: file.get(nu_max, "nu_max", None)?,
                    steps,
                    output: file.get_opt(output, "output")?,
                }
            }
            Command::Crosscheck(args) => {
                let d = CrosscheckConfig::default();
                let config = CrosscheckConfig {
                    snr_ratios: file.get_list(args.ratios, "ratios", &d.snr_ratios)?,
                    noise_variance: file.get(args.sigma2, "sigma2", Some(d.noise_variance))?,
                    rates_per_ratio: file.get(args.rates, "rates", Some(d.rates_per_ratio))?,
                    rate_span: file.get(args.span, "span", Some(d.rate_span))?,
                    exact_tolerance: file.get(
                        args.exact_tol,
                        "exact_tol",
                        Some(d.exact_tolerance),
                    )?,
                    variational_tolerance: file.get(
                        args.variational_tol,
                        "variational_tol",
                        Some(d.variational_tolerance),
                    )?,
                    identity_tolerance: file.get(
                        args.identity_tol,
                        "identity_tol",
                        Some(d.identity_tolerance),
                    )?,
                    samples: file.get(args.samples, "samples", Some(d.samples))?,
                    seed: file.get(args.seed, "seed", Some(d.seed))?,
                    quadrature: QuadratureSpec::new(
                        file.get(args.half_width, "half_width", Some(d.quadrature.half_width))?,
                        file.get(args.nodes, "nodes", Some(d.quadrature.nodes_per_axis))?,
                        d.quadrature.rule,
                    )?,
                    zeta_bias: file.get(args.inject_zeta_bias, "inject_zeta_bias", Some(0.0))?,
                };
                if config.snr_ratios.is_empty() {
                    return Err(CliError::Usage(
                        "--ratios must list at least one value".into(),
                    ));
                }
                for &r in &config.snr_ratios {
                    positive("ratios", r)?;
                }
                positive("sigma2", config.noise_variance)?;
                positive("span", config.rate_span)?;
                RunConfig::Crosscheck {
                    config,
                    output: file.get_opt(args.output, "output")?,
                }
            }
            Command::Simulate {
                channel,
                n,
                rate,
                trials,
                seed,
                theta,
                codebook_seed,
                output,
            } => {
                let rate = file.get(rate, "rate", None)?;
                positive("rate", rate)?;
                let seed = file.get(seed, "seed", Some(0))?;
                RunConfig::Simulate {
                    channel: ChannelSetting::resolve(&channel, file)?,
                    n: file.get(n, "n", None)?,
                    rate,
                    trials: file.get(trials, "trials", Some(10_000))?,
                    seed,
                    theta: file.get_opt(theta, "theta")?,
                    codebook_seed: file.get(codebook_seed, "codebook_seed", Some(seed))?,
                    output: file.get_opt(output, "output")?,
                }
            }
        })
    }
}

#[derive(Serialize)]
struct CapacityReport {
    capacity_nats: f64,
    capacity_bits: f64,
    gamma: f64,
    sigma2: f64,
    snr: f64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Diagnostics {
    Parametric(ExponentSolution),
    Opt(RhoNuOptimum),
    Dk(DkSolution),
    Variational(GohResult),
}

#[derive(Serialize)]
struct MethodResult {
    method: Method,
    exponent: f64,
    diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct ExponentReport {
    rate: f64,
    gamma: f64,
    sigma2: f64,
    capacity_nats: f64,
    below_capacity: bool,
    method: Method,
    exponent: f64,
    results: Vec<MethodResult>,
    max_discrepancy: Option<f64>,
}

#[derive(Serialize)]
struct SimulateReport {
    #[serde(flatten)]
    result: SimResult,
    rate_requested: f64,
    codebook_size: usize,
    rescaled_codewords: usize,
    theta: f64,
    gamma: f64,
    sigma2: f64,
    capacity_nats: f64,
    exponent_at_rate: f64,
}

fn run_method(
    method: Method,
    rate: f64,
    pb: &PowerBudget,
    ch: &Channel,
) -> Result<MethodResult, CliError> {
    let (exponent, diagnostics) = match method {
        Method::Parametric => {
            let s = exponent_solution(rate, pb, ch)?;
            (s.exponent, Diagnostics::Parametric(s))
        }
        Method::Opt => {
            let s = optimize_rho_nu_detailed(rate, pb, ch)?;
            (s.value, Diagnostics::Opt(s))
        }
        Method::Dk => {
            let s = g_dk_detailed(rate, pb, ch)?;
            (s.value, Diagnostics::Dk(s))
        }
        Method::Variational => {
            let s = g_oh_numeric(rate, pb, ch, &GohGrid::default())?;
            (s.value, Diagnostics::Variational(s))
        }
        Method::All => unreachable!("expanded by the caller"),
    };
    if !exponent.is_finite() {
        return Err(CliError::Solver(format!(
            "{method:?} route returned {exponent}"
        )));
    }
    Ok(MethodResult {
        method,
        exponent,
        diagnostics,
    })
}

fn cmd_exponent(
    channel: ChannelSetting,
    rate: f64,
    method: Method,
) -> Result<ExponentReport, CliError> {
    let (pb, ch) = channel.build()?;
    let methods = match method {
        Method::All => vec![
            Method::Parametric,
            Method::Opt,
            Method::Dk,
            Method::Variational,
        ],
        m => vec![m],
    };
    let results = methods
        .into_iter()
        .map(|m| run_method(m, rate, &pb, &ch))
        .collect::<Result<Vec<_>, _>>()?;
    let max_discrepancy = (results.len() > 1).then(|| {
        let values: Vec<f64> = results.iter().map(|r| r.exponent).collect();
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    });
    let c = capacity(&ch, &pb);
    Ok(ExponentReport {
        rate,
        gamma: channel.gamma,
        sigma2: channel.sigma2,
        capacity_nats: c,
        below_capacity: rate <= c,
        method,
        exponent: results[0].exponent,
        results,
        max_discrepancy,
    })
}

fn cmd_curve(channel: ChannelSetting, nu_max: f64, steps: usize) -> Result<String, CliError> {
    let (pb, ch) = channel.build()?;
    let nu0 = nu_zero(&pb, &ch);
    if !(nu_max.is_finite() && nu_max >= 0.0 && nu_max < nu0) {
        return Err(CliError::Usage(format!(
            "--nu-max must lie in [0, nu_0) with nu_0 = {nu0}, got {nu_max}"
        )));
    }
    let mut csv = String::from("nu,R_nats,G_nats,rho_star,G_over_R\n");
    for i in 0..=steps {
        let nu = nu_max * i as f64 / steps as f64;
        let p = parametric_point(nu, &pb, &ch)?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            nu,
            p.rate,
            p.exponent,
            rho_star(nu, &pb, &ch),
            p.exponent / p.rate
        ));
    }
    Ok(csv)
}

fn cmd_crosscheck(config: &CrosscheckConfig) -> Result<CrosscheckReport, CliError> {
    Ok(run_crosscheck(config)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    channel: ChannelSetting,
    n: usize,
    rate: f64,
    trials: u64,
    seed: u64,
    theta: Option<f64>,
    codebook_seed: u64,
) -> Result<SimulateReport, CliError> {
    let (pb, ch) = channel.build()?;
    let theta = theta.unwrap_or(channel.gamma);
    positive("theta", theta)?;
    let cb = generate_random_codebook(n, rate, theta, &pb, codebook_seed)?;
    let result = simulate_correct_probability(&cb, &ch, trials, seed)?;
    let exponent_at_rate = awgn_exponent::exponent_at_rate(result.rate_nats, &pb, &ch)?;
    Ok(SimulateReport {
        rate_requested: rate,
        codebook_size: cb.len(),
        rescaled_codewords: cb.rescaled_count(),
        theta,
        gamma: channel.gamma,
        sigma2: channel.sigma2,
        capacity_nats: capacity(&ch, &pb),
        exponent_at_rate,
        result,
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let path = resolve_output(path);
            std::fs::write(&path, text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match RunConfig::resolve(cli.command, &file)? {
        RunConfig::Capacity { channel, format } => {
            let (pb, ch) = channel.build()?;
            let nats = capacity(&ch, &pb);
            let report = CapacityReport {
                capacity_nats: nats,
                capacity_bits: nats / std::f64::consts::LN_2,
                gamma: channel.gamma,
                sigma2: channel.sigma2,
                snr: pb.snr(&ch),
            };
            let text = match format {
                Format::Json => to_json(&report)?,
                Format::Text => format!(
                    "{} nats\n{} bits\n",
                    report.capacity_nats, report.capacity_bits
                ),
            };
            emit(&text, None)
        }
        RunConfig::Exponent {
            channel,
            rate,
            method,
            output,
        } => emit(
            &to_json(&cmd_exponent(channel, rate, method)?)?,
            output.as_deref(),
        ),
        RunConfig::Curve {
            channel,
            nu_max,
            steps,
            output,
        } => emit(&cmd_curve(channel, nu_max, steps)?, output.as_deref()),
        RunConfig::Crosscheck { config, output } => {
            let report = cmd_crosscheck(&config)?;
            emit(&to_json(&report)?, output.as_deref())?;
            match report.first_failure() {
                Some(f) => Err(CliError::Identity {
                    identity: f.identity.clone(),
                    detail: format!(
                        "max error {:e} exceeds tolerance {:e} at snr {}",
                        f.max_error, f.tolerance, f.snr
                    ),
                }),
                None => Ok(()),
            }
        }
        RunConfig::Simulate {
            channel,
            n,
            rate,
            trials,
            seed,
            theta,
            codebook_seed,
            output,
        } => {
            let report = cmd_simulate(channel, n, rate, trials, seed, theta, codebook_seed)?;
            emit(&to_json(&report)?, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Solver(m) => eprintln!("solver failure: {m}"),
                CliError::Identity { identity, detail } => {
                    eprintln!("identity violated: {identity}: {detail}")
                }
                CliError::Io(m) => eprintln!("io error: {m}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
