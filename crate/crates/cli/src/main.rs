use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use scott_tiler::geom::{classify_isometry, EPS_MAT, EPS_PT};
use scott_tiler::report::{
    analyze, render_svg, run_battery, run_grid, write_atomic, AnalysisError, AnalyzeOptions,
    RenderSpec, SeedChoice,
};
use scott_tiler::trigroup::{
    build_generators, classify_signature, default_order_cap, element_order, evaluate_word,
    lemma25_search, Geometry, GroupError, Signature, TriangleGroup, Word,
};

#[derive(Parser)]
#[command(
    name = "scott-tiler",
    version,
    about = "Axis arrangements of hyperbolic triangle groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SigArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    r: u32,
}

#[derive(Clone, Copy)]
struct Seed(SeedChoice);

impl FromStr for Seed {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Seed(SeedChoice::Auto));
        }
        s.parse()
            .map(|i| Seed(SeedChoice::Tile(i)))
            .map_err(|_| format!("expected `auto` or a face index, got `{s}`"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the axis arrangement, run every check, and report.
    Analyze {
        #[command(flatten)]
        sig: SigArgs,
        /// Region radius; the starting point when the radius is adaptive.
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        /// Use exactly --radius instead of raising it until the arrangement
        /// is large enough.
        #[arg(long)]
        fixed_radius: bool,
        #[arg(long, default_value_t = 9.5)]
        max_radius: f64,
        #[arg(long, default_value_t = 14)]
        max_wordlen: usize,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = EPS_PT)]
        tol_point: f64,
        #[arg(long, default_value_t = EPS_MAT)]
        tol_matrix: f64,
        #[arg(long, default_value = "auto")]
        seed_tile: Seed,
    },
    /// Order and trace of a word in the generators.
    Order {
        #[command(flatten)]
        sig: SigArgs,
        /// e.g. "x y^-2"
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Find an infinite-order element from two finite-order words.
    Witness {
        #[command(flatten)]
        sig: SigArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Scott-word battery over all signatures up to an index.
    Grid {
        #[arg(long, default_value_t = 9)]
        max_index: u32,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also run the full analysis on every hyperbolic signature.
        #[arg(long)]
        analyze: bool,
    },
}

enum Failure {
    Usage(String),
    Fatal(String),
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e.exit_code() {
            2 => Failure::Usage(e.to_string()),
            _ => Failure::Fatal(e.to_string()),
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        AnalysisError::from(e).into()
    }
}

fn hyperbolic(s: SigArgs) -> Result<Signature, Failure> {
    let sig = classify_signature(s.p, s.q, s.r)?;
    if sig.geometry != Geometry::Hyperbolic {
        return Err(Failure::Usage(format!(
            "{}: ({},{},{}) is not a hyperbolic signature",
            sig.geometry, s.p, s.q, s.r
        )));
    }
    Ok(sig)
}

fn group(s: SigArgs) -> Result<TriangleGroup, Failure> {
    Ok(build_generators(&hyperbolic(s)?)?)
}

fn word(s: &str) -> Result<Word, Failure> {
    s.parse()
        .map_err(|e| Failure::Usage(format!("bad word `{s}`: {e}")))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(path, bytes)
        .map_err(|e| Failure::Fatal(format!("writing {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze {
            sig,
            radius,
            fixed_radius,
            max_radius,
            max_wordlen,
            json,
            svg,
            tol_point,
            tol_matrix,
            seed_tile,
        } => {
            hyperbolic(sig)?;
            let options = AnalyzeOptions {
                radius,
                auto_radius: !fixed_radius,
                max_radius: max_radius.max(radius),
                max_word_len: max_wordlen,
                tol_point,
                tol_matrix,
                seed_tile: seed_tile.0,
                ..AnalyzeOptions::default()
            };
            let analysis = analyze(sig.p, sig.q, sig.r, &options)?;
            let report = &analysis.report;
            if let Some(path) = json {
                write(&path, report.to_json().as_bytes())?;
            }
            if let Some(path) = svg {
                let doc = render_svg(
                    &analysis.arrangement,
                    Some(&analysis.coloring),
                    Some(&analysis.growth),
                    &RenderSpec::default(),
                );
                write(&path, doc.as_bytes())?;
            }
            println!(
                "({},{},{}) {} word `{}` lines {} tiles {} radius {}",
                sig.p,
                sig.q,
                sig.r,
                report.signature.case_label.label(),
                report.scott.word,
                report.family.num_lines,
                report.census.complete_tiles,
                report.family.region_radius
            );
            for (name, ok) in report.checks() {
                println!("{} {name}", if ok { "PASS" } else { "FAIL" });
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "colors {} (bound {}), generations {}",
                report.coloring.colors_used, report.coloring.bound, report.growth.generations
            );
            Ok(u8::try_from(report.exit_code()).unwrap_or(1))
        }
        Command::Order { sig, word: w } => {
            let g = group(sig)?;
            let w = word(&w)?;
            let m = evaluate_word(&g, &w);
            let order = element_order(&g, &m, default_order_cap(&g.sig))?;
            println!("order {order}");
            println!("trace {:.12}", m.trace());
            println!("class {}", classify_isometry(&m).kind);
            Ok(0)
        }
        Command::Witness { sig, a, b } => {
            let g = group(sig)?;
            let (a, b) = (word(&a)?, word(&b)?);
            match lemma25_search(&g, &a, &b, default_order_cap(&g.sig)) {
                Ok(w) => {
                    let m = evaluate_word(&g, &w);
                    println!("witness {w}");
                    println!("trace {:.12}", m.trace());
                    Ok(0)
                }
                Err(GroupError::NoWitnessFound) => {
                    println!("no witness");
                    Ok(1)
                }
                Err(e @ GroupError::InfiniteOrderInput { .. }) => {
                    Err(Failure::Usage(e.to_string()))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Grid {
            max_index,
            json,
            analyze,
        } => {
            if max_index < 2 {
                return Err(Failure::Usage("--max-index must be at least 2".into()));
            }
            let report = if analyze {
                run_grid(max_index, &AnalyzeOptions::default())
            } else {
                run_battery(max_index, None)
            };
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report)
                    .map_err(|e| Failure::Fatal(e.to_string()))?;
                write(&path, text.as_bytes())?;
            }
            println!(
                "{} signatures, {} hyperbolic, coverage {}, failures {}",
                report.signatures,
                report.hyperbolic,
                report.coverage_ok,
                report.failures.len()
            );
            for f in &report.failures {
                let why = report
                    .analyses
                    .iter()
                    .flatten()
                    .find(|a| [a.p, a.q, a.r] == *f)
                    .map(|a| match &a.error {
                        Some(e) => e.clone(),
                        None => a.failed_checks.join(", "),
                    })
                    .unwrap_or_default();
                println!("FAIL {f:?} {why}");
            }
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("SCOTT_TILER_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Usage(format!(
            "SCOTT_TILER_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Fatal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Fatal(msg)) => {
            eprintln!("fatal: {msg}");
            ExitCode::from(3)
        }
    }
}
