use std::path::PathBuf;
use std::process::ExitCode;

use bt_quant::geometry::FsFunction;
use bt_quant::harness::{parse, run_suites, RunConfig, SUITES};
use bt_quant::metaplectic::{q_d, MetaDerivative};
use bt_quant::rates::{fit_rate, RateWindow};
use bt_quant::symbols::{extract_jet, sigma_s_variant, ExtractOptions, Variant};
use bt_quant::toeplitz::{norm_table, OperatorFamily, Provenance};
use bt_quant::Error;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "btq", version, about = "Berezin-Toeplitz quantization of the two-sphere")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated levels, e.g. "8,16,32,64".
    #[arg(long, global = true, value_delimiter = ',')]
    k_grid: Vec<u32>,
    /// Extraction band (numerator degree bound).
    #[arg(long, global = true)]
    band: Option<u32>,
    /// Output directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exact arithmetic and exact symbol reconstruction where supported.
    #[arg(long, global = true)]
    exact: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Twist m of the auxiliary bundle O(m).
    #[arg(long, global = true, allow_hyphen_values = true)]
    m: Option<i32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Contravariant,
    Kahler,
    Metaplectic,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an expression and print its normal form and lowering.
    ParseCheck { expr: String },
    /// Toeplitz family of an expression: norms, optional CSV dump.
    Toeplitz { expr: String },
    /// Metaplectic quantization family of an expression.
    Quantize { expr: String },
    /// Symbol jet of T(f), or of T(f)T(g) with --times.
    Extract {
        expr: String,
        #[arg(long)]
        times: Option<String>,
        #[arg(long, value_enum, default_value = "contravariant")]
        variant: VariantArg,
    },
    /// Exact identities.
    Verify,
    /// Fit a log-log slope to a `k,residual` CSV file.
    Rates {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
        max_slope: f64,
        #[arg(long, allow_hyphen_values = true)]
        min_slope: Option<f64>,
        #[arg(long, default_value_t = 0)]
        k_min: u32,
    },
    /// Run named suites (all by default).
    Suite {
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

enum Failure {
    Usage(String),
    Gate,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if !cli.k_grid.is_empty() {
        cfg.k_grid = cli.k_grid.clone();
    }
    if let Some(b) = cli.band {
        cfg.band = b;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(m) = cli.m {
        cfg.m = m;
    }
    if cli.exact {
        cfg.exact = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn lower(src: &str) -> Result<FsFunction, Failure> {
    Ok(parse(src)?.lower())
}

fn print_norms(fam: &OperatorFamily) {
    println!("k,norm");
    for (k, n) in norm_table(fam) {
        println!("{k},{n:.16e}");
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::ParseCheck { expr } => {
            let e = parse(expr)?;
            println!("{e}");
            println!("{}", e.lower());
        }
        Cmd::Toeplitz { expr } => {
            let cfg = config(cli)?;
            let fam = OperatorFamily::toeplitz(&lower(expr)?, expr, &cfg.k_grid, cfg.m, true)?;
            print_norms(&fam);
            if cli.out.is_some() {
                fam.dump(&cfg.out_dir)?;
            }
        }
        Cmd::Quantize { expr } => {
            let cfg = config(cli)?;
            let f = lower(expr)?;
            let d = MetaDerivative::chern(cfg.m);
            let fam = OperatorFamily::build(&cfg.k_grid, cfg.m, true, Provenance::Quantized(expr.clone()), |s| q_d(&f, s, &d))?;
            print_norms(&fam);
            if cli.out.is_some() {
                fam.dump(&cfg.out_dir)?;
            }
        }
        Cmd::Extract { expr, times, variant } => {
            let cfg = config(cli)?;
            let grid = if cli.exact { cfg.extraction_grid.clone() } else { cfg.k_grid.clone() };
            let mut fam = OperatorFamily::toeplitz(&lower(expr)?, expr, &grid, cfg.m, true)?;
            if let Some(g) = times {
                fam = fam.product(&OperatorFamily::toeplitz(&lower(g)?, g, &grid, cfg.m, true)?)?;
            }
            let opts = ExtractOptions { band: cfg.band, order: cfg.fit_order, prefer_exact: cli.exact };
            let v = match variant {
                VariantArg::Contravariant => Variant::Contravariant,
                VariantArg::Kahler => Variant::Kahler,
                VariantArg::Metaplectic => Variant::Metaplectic(MetaDerivative::chern(cfg.m)),
            };
            let rep = extract_jet(&fam, &opts)?;
            let jet = sigma_s_variant(&fam, &v, &opts)?;
            let json = rep.to_json(v.name(), &jet)?;
            println!("{json}");
            if cli.out.is_some() {
                std::fs::create_dir_all(&cfg.out_dir).map_err(Error::from)?;
                bt_quant::harness::write_atomic(&cfg.out_dir.join("extract.json"), json.as_bytes()).map_err(Error::from)?;
            }
            if !(rep.flags.toeplitz && rep.flags.well_conditioned) {
                return Err(Failure::Gate);
            }
        }
        Cmd::Verify => {
            let mut cfg = config(cli)?;
            cfg.suites = vec!["exact-identities".into()];
            return report(run_suites(&cfg)?);
        }
        Cmd::Rates { file, max_slope, min_slope, k_min } => {
            let text = std::fs::read_to_string(file).map_err(Error::from)?;
            let mut rows = Vec::new();
            for (i, line) in text.lines().enumerate().skip(1) {
                let bad = || Failure::Usage(format!("{}:{}: expected 'k,residual'", file.display(), i + 1));
                let (k, r) = line.split_once(',').ok_or_else(bad)?;
                rows.push((k.trim().parse().map_err(|_| bad())?, r.trim().parse().map_err(|_| bad())?));
            }
            let w = match min_slope {
                Some(lo) => RateWindow::between(*lo, *max_slope),
                None => RateWindow::at_most(*max_slope),
            }
            .from_k(*k_min);
            let rep = fit_rate(&rows, w)?;
            println!("{}", serde_json::to_string_pretty(&rep).map_err(Error::from)?);
            if !rep.passed() {
                return Err(Failure::Gate);
            }
        }
        Cmd::Suite { suites } => {
            let mut cfg = config(cli)?;
            if !suites.is_empty() {
                cfg.suites = suites.clone();
            }
            cfg.validate()?;
            return report(run_suites(&cfg)?);
        }
    }
    Ok(())
}

fn report(summary: bt_quant::harness::RunSummary) -> Result<(), Failure> {
    for s in &summary.suites {
        for c in &s.checks {
            println!("{} [{}] {}: {:e} ({})", if c.pass { "PASS" } else { "FAIL" }, s.suite, c.label, c.measured, c.threshold);
        }
        for n in &s.notes {
            println!("     [{}] note: {n}", s.suite);
        }
    }
    if summary.passed {
        Ok(())
    } else {
        Err(Failure::Gate)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Gate) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            if msg.starts_with("unknown suite") {
                eprintln!("known suites: {}", SUITES.join(", "));
            }
            ExitCode::from(2)
        }
    }
}
