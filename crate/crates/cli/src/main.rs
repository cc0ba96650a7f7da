//! `qdecomp`: shift and dispersion decompositions from the command line.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 unreadable or invalid
//! input, 3 numeric failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qdecomp::io::{self, batch_to_tsv, histogram_pair_to_distributions, load_manifest, parse_histogram_pair};
use qdecomp::orders::{order_component_bridge, BridgeReport, OrderConfig};
use qdecomp::selftest::{self, SelftestConfig};
use qdecomp::suites::{self, SuiteConfig};
use qdecomp::{decompose, spread_plot_data, Decomposition, Distribution, DivergenceKind, QuadratureConfig};

#[derive(Parser)]
#[command(
    name = "qdecomp",
    version,
    about = "Shift and dispersion decompositions of AVM, WD_p and Cramér distances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose one divergence between two distributions.
    Compute {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = Divergence::Avm)]
        divergence: Divergence,
        #[command(flatten)]
        p: PArg,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the order relations and their agreement with zero components.
    Orders {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        p: PArg,
        /// Midpoint nodes for the one-level order checks.
        #[arg(long)]
        grid: Option<usize>,
        /// Midpoint nodes per axis for the weak stochastic order.
        #[arg(long)]
        grid2: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Central intervals and AVM terms per coverage level, for plotting.
    Spreadplot {
        #[command(flatten)]
        pair: PairArgs,
        /// Number of coverage levels (rows).
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run every pair and divergence listed in a manifest.
    Batch {
        /// Manifest JSON file.
        manifest: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reference values, exactness and closed-form agreement.
    Selftest {
        /// Also run the invariant, order-bridge and histogram suites.
        #[arg(long)]
        extended: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Two distribution files, or one histogram pair file.
#[derive(Args)]
struct PairArgs {
    /// Distribution F (JSON spec, or CSV of samples).
    #[arg(required_unless_present = "histograms", requires = "g")]
    f: Option<PathBuf>,
    /// Distribution G (JSON spec, or CSV of samples).
    #[arg(required_unless_present = "histograms")]
    g: Option<PathBuf>,
    /// Histogram pair file with possibly open outer bins, instead of F and G.
    #[arg(long, conflicts_with_all = ["f", "g"])]
    histograms: Option<PathBuf>,
}

#[derive(Args)]
struct PArg {
    /// Power for WD_p; ignored by AVM and CD.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=64))]
    p: u32,
}

#[derive(Args)]
struct GridArgs {
    /// Nodes for one-dimensional quadrature.
    #[arg(long)]
    grid: Option<usize>,
    /// Nodes per axis for the two-dimensional Cramér grid.
    #[arg(long)]
    grid2: Option<usize>,
}

impl GridArgs {
    fn config(&self) -> Result<QuadratureConfig, Failure> {
        let mut cfg = QuadratureConfig::default();
        if let Some(n) = self.grid {
            cfg.n_single = n;
        }
        if let Some(n) = self.grid2 {
            cfg.n_double = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum)]
    output: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Divergence {
    Avm,
    Wd,
    Cd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

enum Failure {
    SelftestFailed,
    Input(String),
    Numeric(String),
}

impl From<qdecomp::Error> for Failure {
    fn from(e: qdecomp::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

fn load_pair(pair: &PairArgs) -> Result<(Distribution, Distribution), Failure> {
    if let Some(path) = &pair.histograms {
        let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let spec = parse_histogram_pair(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        return Ok(histogram_pair_to_distributions(&spec)?);
    }
    let load = |p: &Option<PathBuf>| -> Result<Distribution, Failure> {
        let p = p.as_deref().expect("clap enforces both paths");
        Ok(io::load_distribution(p)?)
    };
    Ok((load(&pair.f)?, load(&pair.g)?))
}

fn emit(out: &OutArgs, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Input(format!("stdout: {e}")))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Grid {
    n_single: usize,
    n_double: usize,
}

#[derive(Serialize)]
struct ComputeReport<'a> {
    #[serde(flatten)]
    decomposition: &'a Decomposition,
    grid: Grid,
}

fn compute_report<'a>(d: &'a Decomposition, cfg: &QuadratureConfig) -> ComputeReport<'a> {
    ComputeReport {
        decomposition: d,
        grid: Grid {
            n_single: cfg.n_single,
            n_double: cfg.n_double,
        },
    }
}

const COMPUTE_TSV_HEADER: &str =
    "kind\tp\ttotal\tshift_plus\tshift_minus\tdisp_plus\tdisp_minus\texact_path\tn_single\tn_double";

fn compute_tsv(d: &Decomposition, cfg: &QuadratureConfig) -> String {
    let p = d.kind.p().map(|p| p.to_string()).unwrap_or_default();
    format!(
        "{COMPUTE_TSV_HEADER}\n{}\t{p}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
        d.kind.name(),
        d.total,
        d.shift_plus,
        d.shift_minus,
        d.disp_plus,
        d.disp_minus,
        d.exact,
        cfg.n_single,
        cfg.n_double
    )
}

fn orders_tsv(r: &BridgeReport) -> String {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut out =
        String::from("relation\tholds\tstrict_holds\tmargin\ttol\twitness_tau\twitness_xi\tassumption_violated\n");
    for v in &r.verdicts {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            v.relation,
            v.holds,
            v.strict_holds,
            v.margin,
            v.tol,
            opt(v.witness.map(|w| w.tau)),
            opt(v.witness.and_then(|w| w.xi)),
            v.assumption_violated
        ));
    }
    out.push_str(
        "\nrelation\tdivergence\tp\tcomponent\torder_holds\tminus_zero\tstrict_order_holds\tunique_plus\tconsistent\n",
    );
    for c in &r.checks {
        let component = match c.component {
            qdecomp::orders::BridgeComponent::Dispersion => "dispersion",
            qdecomp::orders::BridgeComponent::Shift => "shift",
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{component}\t{}\t{}\t{}\t{}\t{}\n",
            c.relation,
            c.divergence,
            c.p.map(|p| p.to_string()).unwrap_or_default(),
            c.order_holds,
            c.minus_zero,
            c.strict_order_holds,
            c.unique_plus,
            c.consistent
        ));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute {
            pair,
            divergence,
            p,
            grid,
            out,
        } => {
            let cfg = grid.config()?;
            let (f, g) = load_pair(&pair)?;
            let kind = match divergence {
                Divergence::Avm => DivergenceKind::Avm,
                Divergence::Wd => DivergenceKind::Wd(p.p),
                Divergence::Cd => DivergenceKind::Cd,
            };
            let d = decompose(kind, &f, &g, &cfg)?;
            let text = match out.output.unwrap_or(Format::Json) {
                Format::Json => pretty(&compute_report(&d, &cfg)),
                Format::Tsv => compute_tsv(&d, &cfg),
            };
            emit(&out, &text)
        }
        Command::Orders {
            pair,
            p,
            grid,
            grid2,
            out,
        } => {
            let defaults = OrderConfig::default();
            let ocfg = OrderConfig {
                grid_n: grid.unwrap_or(defaults.grid_n),
                grid2_n: grid2.unwrap_or(defaults.grid2_n),
                tol: None,
            };
            ocfg.validate()?;
            let (f, g) = load_pair(&pair)?;
            let report = order_component_bridge(&f, &g, p.p, &QuadratureConfig::default(), &ocfg)?;
            if report.assumption_violated {
                eprintln!("qdecomp: warning: an input has a jumping quantile function; bridge equivalences are not guaranteed");
            }
            let text = match out.output.unwrap_or(Format::Json) {
                Format::Json => pretty(&report),
                Format::Tsv => orders_tsv(&report),
            };
            emit(&out, &text)
        }
        Command::Spreadplot { pair, grid, out } => {
            let (f, g) = load_pair(&pair)?;
            let data = spread_plot_data(&f, &g, grid)?;
            let text = match out.output.unwrap_or(Format::Tsv) {
                Format::Json => pretty(&data),
                Format::Tsv => data.to_tsv(),
            };
            emit(&out, &text)
        }
        Command::Batch { manifest, grid, out } => {
            let cfg = grid.config()?;
            let manifest = load_manifest(&manifest)?;
            let rows = io::run_batch(&manifest, &cfg);
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("qdecomp: warning: {failed} of {} rows failed", rows.len());
            }
            let text = match out.output.unwrap_or(Format::Json) {
                Format::Json => pretty(&json!({ "rows": rows })),
                Format::Tsv => batch_to_tsv(&rows),
            };
            emit(&out, &text)
        }
        Command::Selftest { extended, grid, out } => {
            let cfg = SelftestConfig {
                quadrature: grid.config()?,
                ..SelftestConfig::default()
            };
            let mut report = selftest::run(&cfg);
            if extended {
                let suite = SuiteConfig {
                    quadrature: cfg.quadrature,
                    ..SuiteConfig::default()
                };
                report.extend(suites::run(&suite));
            }
            let text = match out.output {
                Some(Format::Json) => pretty(&report),
                _ => report.to_table(),
            };
            emit(&out, &text)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::SelftestFailed)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::SelftestFailed) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("qdecomp: error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("qdecomp: error: {msg}");
            ExitCode::from(3)
        }
    }
}
