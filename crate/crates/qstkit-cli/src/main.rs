use clap::{Args, Parser, Subcommand};
use qstkit::causality::{self, GridSpec, Scheme};
use qstkit::config::{parse_config, RunConfig, SEED_ENV};
use qstkit::gauge;
use qstkit::hopf;
use qstkit::lie::Preset;
use qstkit::loops;
use qstkit::report::{render_rows, Format};
use qstkit::suite::{exit_code, run_suite, SuiteName};
use qstkit::sw::{sw_run, SwProblem};
use qstkit::{Error, Result};
use std::process::ExitCode;

/// Batch checks for quantum space-times with Lie-algebra type
/// noncommutativity.
#[derive(Parser, Debug)]
#[command(name = "qstkit", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<String>,
    /// RNG seed; overrides the config file
    #[arg(long, global = true, env = SEED_ENV)]
    seed: Option<u64>,
    /// worker threads for parallel sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// tolerance override, key=value; repeatable
    #[arg(long = "tol-override", global = true)]
    tol_override: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run an acceptance suite: group, hopf, twist, trace, mixing, gauge, causality or all
    Suite { name: String },
    /// Print the validated configuration with defaults filled in
    Config,
    #[command(subcommand)]
    Gauge(GaugeCmd),
    #[command(subcommand)]
    Causality(CausalityCmd),
    #[command(subcommand)]
    Mixing(MixingCmd),
    #[command(subcommand)]
    Hopf(HopfCmd),
}

#[derive(Subcommand, Debug)]
enum GaugeCmd {
    /// Deviation of the gauge prefactor from one per spatial dimension
    DimScan {
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// range lo:hi
        #[arg(long, default_value = "1:8")]
        d: String,
        /// comma-separated p0 samples
        #[arg(long, default_value = "-2,-0.3,0,0.7,3", allow_hyphen_values = true)]
        p0: String,
    },
    /// First-order Seiberg-Witten map of a polynomial field
    Sw {
        #[arg(long)]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum CausalityCmd {
    /// Cone condition for f = x0 + v x1 over a velocity range
    Cone {
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// range lo:hi:step
        #[arg(long, default_value = "-1:1:0.5", allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        states: Option<usize>,
        #[arg(long, default_value = "spectral")]
        scheme: String,
    },
    /// Dirac residual under grid doubling
    Refine {
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        doublings: usize,
        #[arg(long, default_value = "forward")]
        scheme: String,
    },
}

#[derive(Subcommand, Debug)]
enum MixingCmd {
    /// UV/IR mixing verdict for the configured spacetime
    Verdict,
    /// Quadrature oracle against the Bessel closed form
    Bessel {
        #[arg(long, default_value = "0.5,1,2")]
        m: String,
        #[arg(long, default_value = "0.5,1,2")]
        kappa: String,
        #[arg(long, default_value = "2,3")]
        d: String,
    },
}

#[derive(Subcommand, Debug)]
enum HopfCmd {
    /// Consistency of every sign convention for the kappa-Poincare tables
    Conventions,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParameter(msg.into())
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| bad(format!("cannot parse `{x}` in list `{s}`"))))
        .collect()
}

fn parse_int_range(s: &str) -> Result<Vec<usize>> {
    let (a, b) = s.split_once(':').ok_or_else(|| bad(format!("range `{s}` is not lo:hi")))?;
    let a: usize = a.parse().map_err(|_| bad(format!("bad range start in `{s}`")))?;
    let b: usize = b.parse().map_err(|_| bad(format!("bad range end in `{s}`")))?;
    if a > b {
        return Err(bad(format!("empty range `{s}`")));
    }
    Ok((a..=b).collect())
}

fn parse_float_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.parse().map_err(|_| bad(format!("cannot parse `{x}` in range `{s}`"))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [x] => Ok(vec![x]),
        [a, b, step] if step > 0.0 && b >= a => {
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(bad(format!("range `{s}` is not lo:hi:step with step > 0"))),
    }
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            parse_config(&text)?
        }
        None => RunConfig::default_for(Preset::KappaMinkowski),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(j) = g.jobs {
        if j == 0 {
            return Err(bad("--jobs must be at least 1"));
        }
        cfg.jobs = Some(j);
    }
    if let Some(o) = &g.out {
        cfg.output_path = Some(o.clone());
    }
    if let Some(f) = &g.format {
        cfg.format = f.parse()?;
    }
    for kv in &g.tol_override {
        cfg.tolerances.apply_override(kv)?;
    }
    Ok(cfg)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output_path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{p}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<i32> {
    let cfg = load_config(&cli.global)?;
    let jobs = cfg.jobs;
    let pool = |f: &(dyn Fn() -> Result<i32> + Sync)| -> Result<i32> {
        match jobs {
            Some(j) => qstkit::suite::with_jobs(j, f),
            None => f(),
        }
    };
    match cli.cmd {
        Cmd::Suite { name } => {
            let name: SuiteName = name.parse()?;
            let rep = run_suite(name, &cfg)?;
            emit(&cfg, &rep.render(cfg.format)?)?;
            Ok(exit_code(&rep))
        }
        Cmd::Config => {
            emit(&cfg, &json_text(&cfg.to_json()))?;
            Ok(0)
        }
        Cmd::Gauge(GaugeCmd::DimScan { kappa, d, p0 }) => {
            let ds = parse_int_range(&d)?;
            let p0s: Vec<f64> = parse_list(&p0)?;
            let rows = gauge::dimension_constraint_scan(&ds, kappa, &p0s)?;
            emit(&cfg, &render_rows(&rows, cfg.format)?)?;
            Ok(0)
        }
        Cmd::Gauge(GaugeCmd::Sw { input }) => {
            let text = std::fs::read_to_string(&input).map_err(|e| Error::Io(format!("{input}: {e}")))?;
            let p = SwProblem::from_json_str(&text)?;
            let out = sw_run(&p);
            emit(&cfg, &json_text(&out))?;
            Ok(if out.consistency_zero == Some(false) { 1 } else { 0 })
        }
        Cmd::Causality(CausalityCmd::Cone {
            kappa,
            v,
            grid,
            states,
            scheme,
        }) => {
            let vs = parse_float_range(&v)?;
            let scheme: Scheme = scheme.parse()?;
            let g = GridSpec::standard(grid.unwrap_or(cfg.grid), scheme, kappa)?;
            let states = states.unwrap_or(cfg.states);
            pool(&|| {
                let rows = causality::cone_sweep(&g, kappa, &vs, states, cfg.seed)?;
                emit(&cfg, &render_rows(&rows, cfg.format)?)?;
                Ok(0)
            })
        }
        Cmd::Causality(CausalityCmd::Refine {
            kappa,
            n,
            doublings,
            scheme,
        }) => {
            let scheme: Scheme = scheme.parse()?;
            let w = GridSpec::standard(n, scheme, kappa)?.w;
            #[derive(serde::Serialize)]
            struct Row {
                n: usize,
                residual: f64,
            }
            let rows: Vec<Row> = causality::dirac_refinement(n, doublings, w, scheme, kappa)?
                .into_iter()
                .map(|(n, residual)| Row { n, residual })
                .collect();
            emit(&cfg, &render_rows(&rows, cfg.format)?)?;
            Ok(0)
        }
        Cmd::Mixing(MixingCmd::Verdict) => {
            let g = cfg.group()?;
            let ks = match g.law {
                qstkit::group::Law::Moyal { .. } => loops::KineticSpec::euclidean(g, 1.0)?,
                _ => loops::KineticSpec::minkowski(g, 1.0)?,
            };
            let r = pool(&|| {
                let rep = loops::mixing_classify(&ks, &loops::MixingOptions::standard(&ks))?;
                emit(&cfg, &json_text(&rep))?;
                Ok(0)
            })?;
            Ok(r)
        }
        Cmd::Mixing(MixingCmd::Bessel { m, kappa, d }) => {
            let ms: Vec<f64> = parse_list(&m)?;
            let ks: Vec<f64> = parse_list(&kappa)?;
            let ds: Vec<usize> = parse_list(&d)?;
            pool(&|| {
                let rep = loops::bessel_oracle_compare(&ms, &ks, &ds, cfg.tolerances.bessel)?;
                match cfg.format {
                    Format::Csv => emit(&cfg, &render_rows(&rep.rows, Format::Csv)?)?,
                    Format::Json => emit(&cfg, &json_text(&rep))?,
                }
                Ok(if rep.pass { 0 } else { 1 })
            })
        }
        Cmd::Hopf(HopfCmd::Conventions) => {
            let rows = hopf::convention_scan();
            emit(&cfg, &json_text(&rows))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qstkit: {e}");
            ExitCode::from(2)
        }
    }
}
