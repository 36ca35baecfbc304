use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mobvpa::config::{parse_floats, ConfigMap};
use mobvpa::em::EmConfig;
use mobvpa::fit::{fit_em, fit_gibbs, fit_lindley, fit_lindley_fractional, fit_mle_fractional, render_fit, FitReport};
use mobvpa::fractional::FractionalPartition;
use mobvpa::gibbs::{GibbsConfig, PosteriorChain};
use mobvpa::ingest::{ingest_csv, write_pairs};
use mobvpa::lindley::MleSource;
use mobvpa::model::{partition, sample};
use mobvpa::slice::SliceConfig;
use mobvpa::study::{run_study, Method, StudyConfig};
use mobvpa::{Error, GammaHyper, LocationScale, PriorSpec, Result, ShapeParams};

/// Bayesian estimation for the singular Marshall-Olkin bivariate Pareto distribution.
///
/// Every flag can also be given in a `--config` file as `key = value`, using
/// the flag name without dashes. Flags on the command line win.
#[derive(Parser, Debug)]
#[command(name = "mobvpa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a sample and write it as CSV.
    Simulate(SimulateArgs),
    /// Slice-within-Gibbs posterior sampling on a CSV dataset.
    FitGibbs(FitArgs),
    /// Lindley-approximation Bayes estimates on a CSV dataset.
    FitLindley(FitArgs),
    /// Maximum likelihood (EM) on a CSV dataset.
    FitEm(FitArgs),
    /// Replication study at a known truth.
    Study(StudyArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Two-column CSV (comma or whitespace separated).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Skip the first non-comment line.
    #[arg(long)]
    header: bool,
    /// mu1,mu2,sigma1,sigma2 used to standardize the data.
    #[arg(long, value_parser = parse_floats::<4>)]
    loc_scale: Option<[f64; 4]>,
    /// Use expected cell counts n*alpha_i/sum(alpha) (for data without exact ties).
    #[arg(long)]
    fractional: bool,
}

#[derive(Args, Debug)]
struct PriorArgs {
    /// gamma or reference.
    #[arg(long)]
    prior: Option<String>,
    /// Gamma shapes k0,k1,k2.
    #[arg(long, value_parser = parse_floats::<3>)]
    k: Option<[f64; 3]>,
    /// Gamma scales theta0,theta1,theta2.
    #[arg(long, value_parser = parse_floats::<3>)]
    theta: Option<[f64; 3]>,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    draws: Option<usize>,
    /// gamma: credible intervals are 100(1 - gamma)%.
    #[arg(long)]
    level: Option<f64>,
    /// Chain starting value a0,a1,a2.
    #[arg(long, value_parser = parse_floats::<3>)]
    init: Option<[f64; 3]>,
    /// Initial slice bracket width.
    #[arg(long)]
    width: Option<f64>,
    /// Write the post-burn-in draws here (fit-gibbs only).
    #[arg(long)]
    chain: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmArgs {
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// MLE route for Lindley: em or newton.
    #[arg(long)]
    mle: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Shape parameters a0,a1,a2.
    #[arg(long, value_parser = parse_floats::<3>)]
    alpha: Option<[f64; 3]>,
    #[arg(long)]
    n: Option<usize>,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    prior: PriorArgs,
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    em: EmArgs,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    prior: PriorArgs,
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    em: EmArgs,
    /// True shape parameters a0,a1,a2.
    #[arg(long, value_parser = parse_floats::<3>)]
    truth: Option<[f64; 3]>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    /// Comma-separated subset of gibbs-gamma,gibbs-reference,lindley,em.
    #[arg(long)]
    methods: Option<String>,
    /// Write the text report here as well as to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

const CONFIG_KEYS: &[&str] = &[
    "seed", "json", "input", "header", "loc-scale", "fractional", "prior", "k", "theta", "burn-in", "draws",
    "level", "init", "width", "chain", "max-iters", "tol", "mle", "alpha", "n", "output", "truth",
    "replications", "methods",
];

/// Command-line value first, then the config file, then `None`.
struct Settings {
    file: ConfigMap,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            Some(p) => ConfigMap::load(p)?,
            None => ConfigMap::default(),
        };
        file.check_keys(CONFIG_KEYS)?;
        Ok(Self { file })
    }

    fn get<T: std::str::FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match cli {
            Some(v) => Ok(Some(v)),
            None => self.file.get(key),
        }
    }

    fn floats<const N: usize>(&self, cli: Option<[f64; N]>, key: &str) -> Result<Option<[f64; N]>> {
        match cli {
            Some(v) => Ok(Some(v)),
            None => self
                .file
                .raw(key)
                .map(|s| parse_floats::<N>(s).map_err(|e| Error::Config(format!("{key}: {e}"))))
                .transpose(),
        }
    }

    fn flag(&self, cli: bool, key: &str) -> Result<bool> {
        Ok(cli || self.file.get::<bool>(key)?.unwrap_or(false))
    }
}

fn shape(v: [f64; 3], what: &str) -> Result<ShapeParams> {
    ShapeParams::try_from(v).map_err(|e| Error::Config(format!("{what}: {e}")))
}

fn hyper(s: &Settings, a: &PriorArgs) -> Result<GammaHyper> {
    let d = GammaHyper::default();
    GammaHyper::new(s.floats(a.k, "k")?.unwrap_or(d.k), s.floats(a.theta, "theta")?.unwrap_or(d.theta))
        .map_err(|e| Error::Config(e.to_string()))
}

fn prior(s: &Settings, a: &PriorArgs) -> Result<PriorSpec> {
    match s.get(a.prior.clone(), "prior")?.as_deref().unwrap_or("gamma") {
        "gamma" => Ok(PriorSpec::Gamma(hyper(s, a)?)),
        "reference" => Ok(PriorSpec::Reference),
        other => Err(Error::Config(format!("unknown prior {other:?} (expected gamma or reference)"))),
    }
}

fn gibbs_config(s: &Settings, a: &ChainArgs, seed: u64) -> Result<GibbsConfig> {
    let d = GibbsConfig::default();
    let slice = SliceConfig { width: s.get(a.width, "width")?.unwrap_or(d.slice.width), ..d.slice };
    Ok(GibbsConfig {
        burn_in: s.get(a.burn_in, "burn-in")?.unwrap_or(d.burn_in),
        draws: s.get(a.draws, "draws")?.unwrap_or(d.draws),
        init: match s.floats(a.init, "init")? {
            Some(v) => shape(v, "init")?,
            None => d.init,
        },
        seed,
        slice,
    })
}

fn level(s: &Settings, a: &ChainArgs) -> Result<f64> {
    let g = s.get(a.level, "level")?.unwrap_or(0.05);
    if g > 0.0 && g < 1.0 {
        Ok(g)
    } else {
        Err(Error::Config(format!("level must lie in (0, 1), got {g}")))
    }
}

fn em_config(s: &Settings, a: &EmArgs, init: ShapeParams) -> Result<EmConfig> {
    let d = EmConfig::default();
    Ok(EmConfig {
        max_iters: s.get(a.max_iters, "max-iters")?.unwrap_or(d.max_iters),
        tol: s.get(a.tol, "tol")?.unwrap_or(d.tol),
        init,
    })
}

fn mle_source(s: &Settings, a: &EmArgs) -> Result<MleSource> {
    match s.get(a.mle.clone(), "mle")?.as_deref().unwrap_or("em") {
        "em" => Ok(MleSource::Em),
        "newton" => Ok(MleSource::Newton),
        other => Err(Error::Config(format!("unknown MLE route {other:?} (expected em or newton)"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_chain(path: &Path, chain: &PosteriorChain) -> Result<()> {
    let mut out = String::from("alpha0,alpha1,alpha2\n");
    for s in &chain.samples {
        let [a, b, c] = s.as_array();
        out += &format!("{a:?},{b:?},{c:?}\n");
    }
    write_file(path, &out)
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let s = Settings::load(args.common.config.as_deref())?;
    let alpha = s.floats(args.alpha, "alpha")?.ok_or_else(|| Error::Config("--alpha is required".into()))?;
    let n = s.get(args.n, "n")?.ok_or_else(|| Error::Config("--n is required".into()))?;
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let seed = s.get(args.common.seed, "seed")?.unwrap_or(0);
    let data = sample(&shape(alpha, "alpha")?, n, seed);
    match s.get(args.output, "output")? {
        Some(path) => {
            let file = std::fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            write_pairs(std::io::BufWriter::new(file), &data)?;
        }
        None => write_pairs(std::io::stdout().lock(), &data)?,
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum FitKind {
    Gibbs,
    Lindley,
    Em,
}

fn fit(kind: FitKind, args: FitArgs) -> Result<()> {
    let s = Settings::load(args.common.config.as_deref())?;
    let input: PathBuf = s.get(args.data.input, "input")?.ok_or_else(|| Error::Config("--input is required".into()))?;
    let header = s.flag(args.data.header, "header")?;
    let fractional = s.flag(args.data.fractional, "fractional")?;
    let loc_scale = match s.floats(args.data.loc_scale, "loc-scale")? {
        Some([m1, m2, s1, s2]) => LocationScale::new(m1, m2, s1, s2).map_err(|e| Error::Config(e.to_string()))?,
        None => LocationScale::identity(),
    };
    let seed = s.get(args.common.seed, "seed")?.unwrap_or(0);
    let data = ingest_csv(&input, &loc_scale, header)?;
    if data.is_empty() {
        return Err(Error::Degenerate(format!("{} contains no observations", input.display())));
    }
    let gibbs = gibbs_config(&s, &args.chain, seed)?;
    let em = em_config(&s, &args.em, gibbs.init)?;

    let report: FitReport = match kind {
        FitKind::Gibbs => {
            let prior = prior(&s, &args.prior)?;
            let gamma = level(&s, &args.chain)?;
            let (report, chain) = if fractional {
                fit_gibbs(&FractionalPartition::from_sample(&data), &prior, &gibbs, gamma)?
            } else {
                fit_gibbs(&partition(&data), &prior, &gibbs, gamma)?
            };
            if let Some(path) = s.get(args.chain.chain, "chain")? {
                write_chain(&path, &chain)?;
            }
            report
        }
        FitKind::Lindley => {
            let h = hyper(&s, &args.prior)?;
            if fractional {
                fit_lindley_fractional(&FractionalPartition::from_sample(&data), &h, em.init)?
            } else {
                fit_lindley(&partition(&data), &h, mle_source(&s, &args.em)?, &em)?
            }
        }
        FitKind::Em => {
            if fractional {
                fit_mle_fractional(&FractionalPartition::from_sample(&data), em.init)?
            } else {
                fit_em(&partition(&data), &em)?
            }
        }
    };
    print!("{}", render_fit(&report));
    if let Some(path) = s.get(args.common.json, "json")? {
        write_file(&path, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    Ok(())
}

fn study(args: StudyArgs) -> Result<()> {
    let s = Settings::load(args.common.config.as_deref())?;
    let d = StudyConfig::default();
    let seed = s.get(args.common.seed, "seed")?.unwrap_or(d.seed);
    let methods = match s.get(args.methods, "methods")? {
        Some(list) => list.split(',').map(str::parse).collect::<Result<Vec<Method>>>()?,
        None => d.methods,
    };
    let gibbs = gibbs_config(&s, &args.chain, seed)?;
    let cfg = StudyConfig {
        truth: match s.floats(args.truth, "truth")? {
            Some(v) => shape(v, "truth")?,
            None => d.truth,
        },
        n: s.get(args.n, "n")?.unwrap_or(d.n),
        replications: s.get(args.replications, "replications")?.unwrap_or(d.replications),
        methods,
        hyper: hyper(&s, &args.prior)?,
        gibbs,
        gamma_level: level(&s, &args.chain)?,
        seed,
        em: em_config(&s, &args.em, gibbs.init)?,
        mle_source: mle_source(&s, &args.em)?,
    };
    let report = run_study(&cfg)?;
    let text = report.render_text();
    print!("{text}");
    if let Some(path) = s.get(args.output, "output")? {
        write_file(&path, &text)?;
    }
    if let Some(path) = s.get(args.common.json, "json")? {
        write_file(&path, &report.to_json())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::FitGibbs(a) => fit(FitKind::Gibbs, a),
        Command::FitLindley(a) => fit(FitKind::Lindley, a),
        Command::FitEm(a) => fit(FitKind::Em, a),
        Command::Study(a) => study(a),
    };
    match result {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
