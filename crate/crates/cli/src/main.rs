use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riesz_arcs::circle_set::build_s_alpha;
use riesz_arcs::multiplicity::nu_profile;
use riesz_arcs::riesz::{gram_capped, DEFAULT_GRAM_CAP};
use riesz_arcs::scenario::{block, block_length, run_paper_check, Params, ScenarioReport, SCENARIOS};
use riesz_arcs::{ArcSet, Error, GramMatrix, SAlphaSpec};
use serde_json::json;

/// Riesz bounds of exponential systems on arc sets: paper checks and exports.
#[derive(Parser, Debug)]
#[command(name = "riesz-arcs", version, about)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Options {
    /// Exponent alpha of S_alpha [default: per scenario, usually 0.5]
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Removal budget eps in (0, 1/4) [default: 0.2; 0.2 also for exports]
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Progression-step exponent beta for lemma1 [default: 0.25]
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Prime p of the block B_p [default: per scenario; 5 for exports]
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Truncation level L of S_alpha [default: per scenario; p*N_p for exports]
    #[arg(long = "trunc-L", global = true)]
    trunc_l: Option<u64>,
    /// Seed of every random draw
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest Gram dimension allowed
    #[arg(long, global = true, default_value_t = DEFAULT_GRAM_CAP)]
    gram_cap: usize,
    /// Largest translation tried when uniting blocks [default: 1000000]
    #[arg(long, global = true)]
    m_max: Option<i64>,
    /// Coarse stride for the translation search; omitted means stride 1
    #[arg(long, global = true)]
    stride: Option<u64>,
    /// Approximation exponent rho for lemma7 [default: 0.5]
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and print its report
    Check {
        /// One of the names printed by `list`
        scenario: String,
        /// Also write the report here
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the available scenarios
    List,
    /// Write an object to a file
    Export {
        #[arg(value_enum)]
        kind: Kind,
        path: PathBuf,
        /// Modulus of the multiplicity profile
        #[arg(long, default_value_t = 2)]
        ell: u64,
        /// Scenario whose report is exported
        #[arg(long, default_value = "lemma8")]
        scenario: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// The truncated S_alpha
    Set,
    /// Gram matrix of B_p on the truncated S_alpha
    Gram,
    /// Multiplicity profile of the truncated S_alpha
    Profile,
    /// A scenario report
    Report,
}

fn params(opts: &Options) -> Params {
    Params {
        alpha: opts.alpha,
        eps: opts.eps,
        beta: opts.beta,
        prime: opts.prime,
        trunc_level: opts.trunc_l,
        seed: opts.seed,
        gram_cap: opts.gram_cap,
        m_max: opts.m_max,
        rho: opts.rho,
        stride: opts.stride,
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ResourceLimit { .. } => 3,
        Error::SearchExhausted { .. } => 1,
        Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: &Cli) -> riesz_arcs::Result<u8> {
    match &cli.command {
        Command::List => {
            for name in SCENARIOS {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Check { scenario, output } => {
            let report = run_paper_check(scenario, &params(&cli.opts))?;
            for c in &report.checks {
                let tag = match (c.gating, c.passed) {
                    (false, _) => "INFO",
                    (true, true) => "PASS",
                    (true, false) => "FAIL",
                };
                eprintln!("{tag} {}: {:.6e} {} {:.6e} (tol {:e})", c.name, c.value, c.relation, c.bound, c.tolerance);
            }
            match cli.opts.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Csv => write_checks_csv(&report, std::io::stdout().lock())?,
            }
            if let Some(path) = output {
                write_report(&report, path, cli.opts.format)?;
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Export {
            kind,
            path,
            ell,
            scenario,
        } => {
            export(*kind, path, cli.opts.format, &cli.opts, *ell, scenario)?;
            Ok(0)
        }
    }
}

/// The spec used by exports: `L` defaults to `p·N_p` for the chosen prime.
fn export_spec(opts: &Options) -> riesz_arcs::Result<(SAlphaSpec, u64)> {
    let alpha = opts.alpha.unwrap_or(0.5);
    let p = opts.prime.unwrap_or(5);
    let level = opts.trunc_l.unwrap_or(p * block_length(p, alpha));
    Ok((SAlphaSpec::new(alpha, opts.eps.unwrap_or(0.2), level)?, p))
}

fn create(path: &Path) -> riesz_arcs::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn export(kind: Kind, path: &Path, format: Format, opts: &Options, ell: u64, scenario: &str) -> riesz_arcs::Result<()> {
    if kind == Kind::Report {
        let report = run_paper_check(scenario, &params(opts))?;
        return write_report(&report, path, format);
    }
    let (spec, p) = export_spec(opts)?;
    let set = build_s_alpha(&spec)?;
    let mut out = create(path)?;
    match kind {
        Kind::Set => match format {
            Format::Json => writeln!(out, "{}", set.to_json())?,
            Format::Csv => write_set_csv(&set, &mut out)?,
        },
        Kind::Gram => {
            let g = gram_capped(&block(p, spec.alpha)?, &set, opts.gram_cap)?;
            match format {
                Format::Csv => g.write_csv(&mut out)?,
                Format::Json => writeln!(out, "{}", gram_json(&g))?,
            }
        }
        Kind::Profile => {
            let profile = nu_profile(&set, ell)?;
            match format {
                Format::Json => writeln!(out, "{}", profile.to_json())?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(["start", "end", "value"])?;
                    for (a, b, v) in profile.pieces() {
                        w.write_record([a.to_string(), b.to_string(), v.to_string()])?;
                    }
                    w.flush()?;
                }
            }
        }
        Kind::Report => unreachable!("handled above"),
    }
    out.flush()?;
    Ok(())
}

fn write_set_csv(set: &ArcSet, out: impl Write) -> riesz_arcs::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["start", "end"])?;
    for arc in set.arcs() {
        w.write_record([arc.start().to_string(), arc.end().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn gram_json(g: &GramMatrix) -> String {
    let e = g.entries();
    let part = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
        (0..e.nrows()).map(|i| (0..e.ncols()).map(|j| f(i, j)).collect()).collect()
    };
    json!({
        "frequencies": g.frequencies().map(|f| f.as_slice().to_vec()),
        "re": part(&|i, j| e[(i, j)].re),
        "im": part(&|i, j| e[(i, j)].im),
    })
    .to_string()
}

fn write_report(report: &ScenarioReport, path: &Path, format: Format) -> riesz_arcs::Result<()> {
    let mut out = create(path)?;
    match format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Csv => write_checks_csv(report, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn write_checks_csv(report: &ScenarioReport, out: impl Write) -> riesz_arcs::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "passed", "value", "relation", "bound", "tolerance", "gating"])?;
    for c in &report.checks {
        w.write_record([
            c.name.clone(),
            c.passed.to_string(),
            c.value.to_string(),
            c.relation.clone(),
            c.bound.to_string(),
            c.tolerance.to_string(),
            c.gating.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
