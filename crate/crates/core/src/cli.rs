//! Command-line front end.
//!
//! ```text
//! normvar variance    --field quad:-1 --x 100000 --Q 1000 [--M 1] [--format json|csv] [--out FILE]
//! normvar checks      --field cyclo:5 --x 10000 --Q 100 [--B 10000]
//! normvar gq          --field quad:-1 --Q 20
//! normvar dump-events --field Q --x 10
//! ```

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::exec::Exec;
use crate::field::{parse_field, FieldSpec};
use crate::galois::{self, admissible_classes, gq_closed_form};
use crate::oracle::naive_variance;
use crate::report::{self, CheckOutcome, ReportConfig, VarianceChecks};
use crate::sieve::{NormEvents, PrimeSieve, DEFAULT_SEGMENT_SIZE};
use crate::stats::{self, relative_gap, VarianceOptions, IDENTITY_TOL};

/// Largest modulus visited by the `checks` character-sum suites.
pub const CHECKS_Q_CAP: u64 = 300;
/// Grid limits for running the naive double loop inside `checks`.
pub const NAIVE_MAX_X: u64 = 10_000;
pub const NAIVE_MAX_Q: u64 = 100;

/// Exit status when a computation finished but an internal check failed.
pub const EXIT_CHECK_FAILED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "normvar", version, about = "Prime-ideal norms in residue classes and their variance")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Variance over q <= Q with per-modulus and dyadic breakdowns
    Variance(RunArgs),
    /// Identity and inequality suites over the configured grid
    Checks(RunArgs),
    /// Table of G_q for q <= Q (or a single q)
    Gq(RunArgs),
    /// Prime-ideal-power norm events up to x
    #[command(name = "dump-events")]
    DumpEvents(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Field: Q, quad:<d> or cyclo:<m>
    #[arg(long)]
    pub field: String,
    /// Cutoff for norms
    #[arg(long)]
    pub x: Option<u64>,
    /// Largest modulus
    #[arg(long = "Q")]
    pub big_q: Option<u64>,
    /// Single modulus (gq, checks)
    #[arg(long = "q")]
    pub q: Option<u64>,
    /// Prime bound for the Frobenius-closure oracle
    #[arg(long = "B", default_value_t = galois::DEFAULT_ORACLE_BOUND)]
    pub oracle_bound: u64,
    /// Range-condition exponent; also sets Q1 = (log x)^(M+1)
    #[arg(long = "M", default_value_t = 1.0)]
    pub m: f64,
    /// Output format; json for variance and checks, csv for gq and dump-events by default
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core, 1 runs sequentially
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long = "segment-size", default_value_t = DEFAULT_SEGMENT_SIZE)]
    pub segment_size: usize,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub field_text: String,
    pub field: FieldSpec,
    pub x: Option<u64>,
    pub big_q: Option<u64>,
    pub q: Option<u64>,
    pub oracle_bound: u64,
    pub m: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub segment_size: usize,
}

impl RunConfig {
    pub fn from_args(command: &'static str, args: &RunArgs) -> anyhow::Result<Self> {
        let field = parse_field(&args.field)?;
        if let Some(x) = args.x {
            if x < 2 {
                bail!("--x must be at least 2 (got {x})");
            }
        }
        if let Some(q) = args.big_q {
            if q < 1 {
                bail!("--Q must be at least 1");
            }
            if let Some(x) = args.x {
                if q > x {
                    bail!("Q > x: --Q {q} exceeds --x {x}");
                }
            }
        }
        if args.q == Some(0) {
            bail!("--q must be at least 1");
        }
        if args.oracle_bound < 2 {
            bail!("--B must be at least 2");
        }
        if !(args.m > 0.0 && args.m.is_finite()) {
            bail!("--M must be a positive number");
        }
        Ok(Self {
            command,
            field_text: args.field.clone(),
            field,
            x: args.x,
            big_q: args.big_q,
            q: args.q,
            oracle_bound: args.oracle_bound,
            m: args.m,
            format: args.format.unwrap_or(match command {
                "gq" | "dump-events" => Format::Csv,
                _ => Format::Json,
            }),
            out: args.out.clone(),
            threads: args.threads,
            segment_size: args.segment_size,
        })
    }

    fn require_x(&self) -> anyhow::Result<u64> {
        self.x.with_context(|| format!("{} needs --x", self.command))
    }

    fn require_big_q(&self) -> anyhow::Result<u64> {
        self.big_q.with_context(|| format!("{} needs --Q", self.command))
    }

    fn moduli(&self) -> anyhow::Result<Vec<u64>> {
        match (self.q, self.big_q) {
            (Some(q), _) => Ok(vec![q]),
            (None, Some(big_q)) => Ok((1..=big_q).collect()),
            (None, None) => bail!("{} needs --Q or --q", self.command),
        }
    }

    /// What goes into report headers; thread count and output path are left
    /// out since they do not affect results.
    pub fn report_config(&self) -> ReportConfig {
        ReportConfig {
            command: self.command.to_string(),
            field: self.field_text.clone(),
            x: self.x,
            big_q: self.big_q,
            q: self.q,
            oracle_bound: self.oracle_bound,
            m: self.m,
            segment_size: self.segment_size,
        }
    }

    fn events(&self, exec: Exec) -> anyhow::Result<NormEvents> {
        let sieve = PrimeSieve::new(self.segment_size, exec)?;
        Ok(NormEvents::generate(&self.field, self.require_x()?, &sieve)?)
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

/// Output of one subcommand: rendered text plus whether every check passed.
pub struct Rendered {
    pub text: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let (name, args) = match &cli.command {
        Command::Variance(a) => ("variance", a),
        Command::Checks(a) => ("checks", a),
        Command::Gq(a) => ("gq", a),
        Command::DumpEvents(a) => ("dump-events", a),
    };
    let config = RunConfig::from_args(name, args)?;
    let rendered = Exec::with_threads(config.threads, |exec| render(&config, exec))?;
    config.emit(&rendered.text)?;
    if rendered.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &rendered.failures {
            eprintln!("check failed: {f}");
        }
        Ok(ExitCode::from(EXIT_CHECK_FAILED))
    }
}

/// Runs the configured subcommand and renders its output.
pub fn render(config: &RunConfig, exec: Exec) -> anyhow::Result<Rendered> {
    match config.command {
        "variance" => run_variance(config, exec),
        "checks" => run_checks(config, exec),
        "gq" => run_gq(config),
        "dump-events" => run_dump_events(config, exec),
        other => bail!("unknown command {other}"),
    }
}

pub fn run_variance(config: &RunConfig, exec: Exec) -> anyhow::Result<Rendered> {
    let big_q = config.require_big_q()?;
    let events = config.events(exec)?;
    let report = stats::variance(&events, VarianceOptions { big_q, m: config.m, exec })?;

    let check_q = big_q.min(stats::REPORT_CHECK_Q_MAX);
    let ortho_moduli: Vec<u64> = (1..=check_q).collect();
    let ortho = stats::orthogonality_grid(&events, &ortho_moduli, exec);
    let ls_q = big_q.min(stats::REPORT_LARGE_SIEVE_Q_MAX);
    let ls = stats::large_sieve_check(&events, ls_q, exec);
    let (exchange, _) = stats::exchange_grid(&events, check_q, exec);
    let checks = VarianceChecks {
        orthogonality_max_gap: ortho.iter().map(|c| c.gap).fold(0.0, f64::max),
        large_sieve_holds: ls.holds,
        exchange_max_gap: exchange.max_gap,
        exchange_bounds_ok: exchange.all_bounds_ok,
        check_q_max: check_q,
        large_sieve_q: ls_q,
    };

    let mut failures = Vec::new();
    if checks.orthogonality_max_gap > IDENTITY_TOL {
        failures.push(format!("orthogonality gap {:e}", checks.orthogonality_max_gap));
    }
    if !checks.large_sieve_holds {
        failures.push(format!("large sieve: {} > {}", ls.lhs, ls.rhs));
    }
    if checks.exchange_max_gap > IDENTITY_TOL || !checks.exchange_bounds_ok {
        failures.push("character exchange".to_string());
    }
    if report.outside_mass != 0.0 {
        failures.push(format!("outside mass {}", report.outside_mass));
    }
    debug_assert_eq!(failures.is_empty(), checks.passed(report.outside_mass));

    let text = match config.format {
        Format::Json => report::to_json_string(&report::variance_json(&report, &checks, &config.report_config()))?,
        Format::Csv => report::per_q_csv(&report),
    };
    Ok(Rendered { text, passed: failures.is_empty(), failures })
}

/// Every suite over the configured grid.
pub fn check_suite(config: &RunConfig, exec: Exec) -> anyhow::Result<Vec<CheckOutcome>> {
    let x = config.require_x()?;
    let field = &config.field;
    let events = config.events(exec)?;
    let moduli = config.moduli()?;
    let capped: Vec<u64> = moduli.iter().copied().filter(|&q| q <= CHECKS_Q_CAP).collect();
    let mut out = Vec::new();

    // D_K(n)^2 = g D_K(n)
    let bad = events
        .events()
        .iter()
        .filter(|e| e.dk * e.dk != field.split_type(e.p).g * e.dk)
        .count();
    out.push(CheckOutcome {
        name: "multiplicity_identity".into(),
        passed: bad == 0,
        value: Some(events.len() as f64),
        detail: format!("{} events, {bad} violations", events.len()),
    });

    // Frobenius closure vs closed form
    let primes = crate::sieve::primes_up_to(config.oracle_bound)?;
    let mismatches: Vec<(u64, usize, usize)> = exec
        .map_slice(&capped, |&q| {
            let closed = admissible_classes(field, q).members;
            let found = galois::gq_empirical_from_primes(field, q, &primes);
            (q, found.len(), closed.len(), found == closed)
        })
        .into_iter()
        .filter(|r| !r.3)
        .map(|(q, a, b, _)| (q, a, b))
        .collect();
    let detail = match mismatches.first() {
        None => format!("{} moduli, B = {}", capped.len(), config.oracle_bound),
        Some(&(q, found, expect)) if found < expect => format!(
            "closure incomplete, raise B: q = {q} reached {found} of {expect} classes with B = {} ({} moduli differ)",
            config.oracle_bound,
            mismatches.len()
        ),
        Some(&(q, found, expect)) => format!("closed form disagrees at q = {q}: closure {found}, closed form {expect}"),
    };
    out.push(CheckOutcome { name: "gq_oracle".into(), passed: mismatches.is_empty(), value: Some(mismatches.len() as f64), detail });

    // phi_K(q) |G_q^perp| = phi(q)
    let bad_index: Vec<u64> = exec
        .map_slice(&capped, |&q| {
            let r = gq_closed_form(field, q);
            (q, r.phi_k * r.perp.len() as u64 == crate::arith::euler_phi(q))
        })
        .into_iter()
        .filter(|r| !r.1)
        .map(|r| r.0)
        .collect();
    out.push(CheckOutcome {
        name: "index_identity".into(),
        passed: bad_index.is_empty(),
        value: Some(bad_index.len() as f64),
        detail: format!("{} moduli; failing: {:?}", capped.len(), bad_index),
    });

    // no mass in coprime classes outside G_q
    let outside = crate::sum::compensated(exec.map_slice(&moduli, |&q| {
        stats::residue_buckets(&events, q).outside_mass(&admissible_classes(field, q))
    }));
    out.push(CheckOutcome {
        name: "outside_mass".into(),
        passed: outside == 0.0,
        value: Some(outside),
        detail: format!("{} moduli", moduli.len()),
    });

    let ortho = stats::orthogonality_grid(&events, &capped, exec);
    let worst = ortho.iter().fold(None::<&stats::OrthogonalityCheck>, |w, c| match w {
        Some(w) if w.gap >= c.gap => Some(w),
        _ => Some(c),
    });
    let max_gap = worst.map_or(0.0, |c| c.gap);
    out.push(CheckOutcome {
        name: "orthogonality".into(),
        passed: max_gap <= IDENTITY_TOL,
        value: Some(max_gap),
        detail: match worst {
            Some(c) => format!("{} moduli; worst q = {} (lhs {:.6e}, rhs {:.6e})", ortho.len(), c.q, c.lhs, c.rhs),
            None => "no moduli".into(),
        },
    });

    let ls_q = config.q.unwrap_or_else(|| config.big_q.unwrap_or(1)).min(CHECKS_Q_CAP);
    let ls = stats::large_sieve_check(&events, ls_q, exec);
    out.push(CheckOutcome {
        name: "large_sieve".into(),
        passed: ls.holds,
        value: Some(ls.lhs / ls.rhs),
        detail: format!("Q = {ls_q}: lhs {:.6e} <= rhs {:.6e}", ls.lhs, ls.rhs),
    });

    let exchange_q = capped.iter().copied().max().unwrap_or(1);
    let (exchange, _) = stats::exchange_grid(&events, exchange_q, exec);
    out.push(CheckOutcome {
        name: "char_exchange_agreement".into(),
        passed: exchange.max_gap <= IDENTITY_TOL,
        value: Some(exchange.max_gap),
        detail: format!("{} imprimitive characters, q <= {exchange_q}", exchange.characters_checked),
    });
    out.push(CheckOutcome {
        name: "char_exchange_bound".into(),
        passed: exchange.all_bounds_ok,
        value: Some(exchange.max_bound_ratio),
        detail: "max |difference| / (2 [K:Q] (log qx)^2)".into(),
    });

    if let Some(big_q) = config.big_q.filter(|&q| q <= NAIVE_MAX_Q && x <= NAIVE_MAX_X) {
        let pipeline = stats::variance(&events, VarianceOptions { big_q, m: config.m, exec })?.v;
        let naive = naive_variance(field, x, big_q);
        let gap = relative_gap(pipeline, naive);
        out.push(CheckOutcome {
            name: "pipeline_vs_naive".into(),
            passed: gap <= IDENTITY_TOL,
            value: Some(gap),
            detail: format!("V = {pipeline:.12e} (pipeline), {naive:.12e} (naive)"),
        });
    }
    Ok(out)
}

pub fn run_checks(config: &RunConfig, exec: Exec) -> anyhow::Result<Rendered> {
    let outcomes = check_suite(config, exec)?;
    let failures: Vec<String> = outcomes
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    let text = match config.format {
        Format::Json => report::to_json_string(&report::checks_json(&config.field, &config.report_config(), &outcomes))?,
        Format::Csv => report::checks_csv(&outcomes),
    };
    Ok(Rendered { text, passed: failures.is_empty(), failures })
}

pub fn run_gq(config: &RunConfig) -> anyhow::Result<Rendered> {
    let moduli = config.moduli()?;
    let text = match config.format {
        Format::Csv => report::gq_csv(&config.field, moduli),
        Format::Json => {
            let rows: Vec<_> = moduli
                .iter()
                .map(|&q| {
                    let c = admissible_classes(&config.field, q);
                    json!({
                        "q": q,
                        "phi": crate::arith::euler_phi(q),
                        "phi_K": c.phi_k(),
                        "aq_conductor": c.aq_conductor,
                        "members": c.members,
                    })
                })
                .collect();
            report::to_json_string(&json!({
                "format_version": report::FORMAT_VERSION,
                "config": config.report_config(),
                "field": config.field,
                "rows": rows,
            }))?
        }
    };
    Ok(Rendered { text, passed: true, failures: Vec::new() })
}

pub fn run_dump_events(config: &RunConfig, exec: Exec) -> anyhow::Result<Rendered> {
    let events = config.events(exec)?;
    let text = match config.format {
        Format::Csv => report::events_csv(&events),
        Format::Json => {
            let rows: Vec<_> = events
                .sorted_by_norm()
                .iter()
                .map(|e| json!({"n": e.n, "p": e.p, "k": e.k, "dk": e.dk, "lam": e.lam}))
                .collect();
            report::to_json_string(&json!({
                "format_version": report::FORMAT_VERSION,
                "config": config.report_config(),
                "field": config.field,
                "events": rows,
            }))?
        }
    };
    Ok(Rendered { text, passed: true, failures: Vec::new() })
}
