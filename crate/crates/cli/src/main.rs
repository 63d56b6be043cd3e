//! `ghom`: command-line front end for exact beam-splitter amplitudes.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 resource guard or
//! budget hit, 3 verification mismatch.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ghom_core::dist::{self, SuperpositionInput};
use ghom_core::kmatrix::{self, enumerate_k_with};
use ghom_core::permanent::{amplitude_unnormalized_with, normalization};
use ghom_core::symmetry::{self, ScanOptions, Status};
use ghom_core::{build_sn, permanent_ryser, Transition};
use serde_json::json;

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "ghom", version, about = "Exact multiphoton interference at the symmetric SU(N) beam splitter")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "GHOM_JOBS")]
    jobs: Option<usize>,

    /// TOML file with resource budgets.
    #[arg(long, global = true, env = "GHOM_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct TransitionArgs {
    /// Number of modes.
    #[arg(long = "N")]
    order: usize,
    /// Input occupation, comma separated.
    #[arg(long = "in", value_delimiter = ',', required = true)]
    input: Vec<u32>,
    /// Output occupation, comma separated.
    #[arg(long = "out", value_delimiter = ',', required = true)]
    output: Vec<u32>,
}

impl TransitionArgs {
    fn transition(&self) -> Result<Transition, Failure> {
        Ok(Transition::new(
            self.order,
            self.input.clone(),
            self.output.clone(),
        )?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Perm,
    Ksum,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and numeric transition amplitude.
    Amplitude {
        #[command(flatten)]
        t: TransitionArgs,
        #[arg(long, value_enum, default_value = "perm")]
        method: Method,
        /// Only the exact ring element.
        #[arg(long, conflicts_with = "numeric")]
        exact: bool,
        /// Only the complex amplitude and probability.
        #[arg(long)]
        numeric: bool,
    },
    /// All sorted inputs of n photons onto the coincident output.
    Scan {
        #[arg(long = "N")]
        order: usize,
        #[arg(long)]
        n: u32,
        /// Compute exact amplitudes and check the verdicts against them.
        #[arg(long)]
        confirm_exact: bool,
        /// Scan at most this many inputs.
        #[arg(long)]
        budget: Option<usize>,
        /// Stop starting new inputs after this many seconds.
        #[arg(long)]
        time_budget: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Also write the JSON summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// K-matrix terms grouped by coefficient.
    Groups {
        #[command(flatten)]
        t: TransitionArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Valid K matrices, one JSON array per line, or just their number.
    Enumerate {
        #[command(flatten)]
        t: TransitionArgs,
        #[arg(long)]
        count_only: bool,
    },
    /// Gamma-function estimate of the K-matrix count.
    Jkn {
        #[command(flatten)]
        t: TransitionArgs,
    },
    /// Occupation-only verdict for a coincident output.
    Predict {
        #[arg(long = "N")]
        order: usize,
        #[arg(long = "in", value_delimiter = ',', required = true)]
        input: Vec<u32>,
        /// Also compute the exact amplitude.
        #[arg(long)]
        confirm_exact: bool,
    },
    /// The |Nk, 1, .., 1, 2> family and its verdicts.
    Cnl {
        #[arg(long = "N")]
        order: usize,
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        confirm_exact: bool,
    },
    /// Output distribution of a superposition read from a JSON state file.
    Dist {
        /// Checked against the state file when given.
        #[arg(long = "N")]
        order: Option<usize>,
        #[arg(long)]
        state: PathBuf,
        /// CSV rows m1..mN,p for external plotting.
        #[arg(long)]
        plot_data: bool,
        /// Only check P(m, .., m) for m up to this value.
        #[arg(long)]
        cnl: Option<u32>,
    },
    /// Unnormalised permanents of S_N.
    Table2 {
        #[arg(long = "min-N", default_value_t = 2)]
        min_n: usize,
        #[arg(long = "max-N", default_value_t = 14)]
        max_n: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(ghom_core::Error),
    Mismatch(String),
    Io(std::io::Error),
}

impl From<ghom_core::Error> for Failure {
    fn from(e: ghom_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(ghom_core::Error::ResourceGuard { .. })
            | Failure::Core(ghom_core::Error::BudgetExceeded(_)) => 2,
            Failure::Mismatch(_) => 3,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(s) | Failure::Mismatch(s) => s.clone(),
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // reader went away, e.g. `ghom scan .. | head`
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ghom: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path).map_err(Failure::Usage)?,
        None => Config::default(),
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Amplitude {
            t,
            method,
            exact,
            numeric,
        } => amplitude(&mut out, &cfg, &t.transition()?, method, exact, numeric),
        Command::Scan {
            order,
            n,
            confirm_exact,
            budget,
            time_budget,
            format,
            summary,
        } => {
            let opts = ScanOptions {
                permanent: cfg.permanent(),
                max_inputs: budget.or(cfg.scan.max_inputs),
                time_budget: time_budget
                    .or(cfg.scan.time_budget_secs)
                    .map(Duration::from_secs),
            };
            if confirm_exact {
                scan_exact(&mut out, order, n, &opts, format, summary)
            } else {
                scan_verdicts(&mut out, order, n, &opts, format)
            }
        }
        Command::Groups { t, format } => {
            let report = kmatrix::group_analysis_with(&t.transition()?, &cfg.budget())?;
            match format {
                Format::Json => print_json(&mut out, &report),
                Format::Csv => Ok(report.write_csv(&mut out)?),
            }
        }
        Command::Enumerate { t, count_only } => {
            let t = t.transition()?;
            let count = if count_only {
                enumerate_k_with(&t, &cfg.budget(), |_| {})?
            } else {
                let mut lines = Vec::new();
                let count = enumerate_k_with(&t, &cfg.budget(), |k| {
                    lines.push(json!(k.to_rows()).to_string());
                })?;
                for l in lines {
                    writeln!(out, "{l}")?;
                }
                count
            };
            print_json(&mut out, &json!({ "transition": t, "valid_count": count }))
        }
        Command::Jkn { t } => print_json(&mut out, &kmatrix::jkn_estimate(&t.transition()?)?),
        Command::Predict {
            order,
            input,
            confirm_exact,
        } => {
            let t = Transition::coincident(order, input)?;
            let v = symmetry::verdict(&t)?;
            let mut value = json!({ "transition": t, "verdict": v });
            if confirm_exact {
                let zero = dist::exact_permanent(&t, &cfg.permanent())?.is_zero();
                value["amplitude_zero"] = json!(zero);
                print_json(&mut out, &value)?;
                if v.status == Status::ProvenZero && !zero {
                    return Err(Failure::Mismatch(format!(
                        "verdict says zero but the amplitude of {t} is not"
                    )));
                }
                return Ok(());
            }
            print_json(&mut out, &value)
        }
        Command::Cnl {
            order,
            kmax,
            confirm_exact,
        } => {
            let family = symmetry::cnl_family(order, kmax)?;
            let mut rows = Vec::new();
            let mut bad = Vec::new();
            for c in &family {
                let mut row = json!({ "k": c.k, "transition": c.transition, "verdict": c.verdict });
                if confirm_exact {
                    let zero = dist::exact_permanent(&c.transition, &cfg.permanent())?.is_zero();
                    row["amplitude_zero"] = json!(zero);
                    if !zero {
                        bad.push(c.k);
                    }
                }
                rows.push(row);
            }
            print_json(
                &mut out,
                &json!({ "N": order, "phase": symmetry::cnl_phase(order), "members": rows }),
            )?;
            if bad.is_empty() {
                Ok(())
            } else {
                Err(Failure::Mismatch(format!("non-zero coincidence at k = {bad:?}")))
            }
        }
        Command::Dist {
            order,
            state,
            plot_data,
            cnl,
        } => {
            let text = std::fs::read_to_string(&state)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", state.display())))?;
            let input = SuperpositionInput::from_json(&text)?;
            if order.is_some_and(|n| n != input.order) {
                return Err(Failure::Usage(format!(
                    "--N {} does not match N = {} in {}",
                    order.unwrap(),
                    input.order,
                    state.display()
                )));
            }
            if let Some(max_m) = cnl {
                let report = dist::cnl_check_with(&input, max_m, &cfg.permanent())?;
                print_json(&mut out, &report)?;
                return if report.passed {
                    Ok(())
                } else {
                    Err(Failure::Mismatch("coincidence probabilities above threshold".into()))
                };
            }
            let d = dist::output_distribution_with(&input, cfg.dist.total_cap, &cfg.permanent())?;
            if plot_data {
                Ok(d.write_csv(&mut out, true)?)
            } else {
                print_json(&mut out, &d)
            }
        }
        Command::Table2 { min_n, max_n } => table2(&mut out, min_n, max_n),
    }
}

fn print_json<T: serde::Serialize>(out: &mut impl Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{text}")?;
    Ok(())
}

fn amplitude(
    out: &mut impl Write,
    cfg: &Config,
    t: &Transition,
    method: Method,
    exact_only: bool,
    numeric_only: bool,
) -> Result<(), Failure> {
    let perm = match method {
        Method::Perm => amplitude_unnormalized_with(t, &cfg.permanent())?,
        Method::Ksum => kmatrix::permanent_by_ksum_with(t, &cfg.budget())?,
        Method::Both => {
            let a = amplitude_unnormalized_with(t, &cfg.permanent())?;
            let b = kmatrix::permanent_by_ksum_with(t, &cfg.budget())?;
            if !a.value_eq(&b)? {
                return Err(Failure::Mismatch(format!(
                    "Ryser gives {a}, the K-matrix sum gives {b}"
                )));
            }
            a
        }
    };
    let reduced = perm.reduce();
    let mut value = json!({ "transition": t });
    if !numeric_only {
        value["permanent"] = json!(reduced.to_text());
        value["is_zero"] = json!(reduced.is_trivially_zero());
    }
    if !exact_only {
        let a = if reduced.is_trivially_zero() {
            num_complex::Complex64::new(0.0, 0.0)
        } else {
            reduced.eval_numeric() * normalization(t)
        };
        value["amplitude"] = json!({ "re": a.re, "im": a.im });
        value["probability"] = json!(a.norm_sqr());
    }
    print_json(out, &value)
}

fn scan_exact(
    out: &mut impl Write,
    order: usize,
    n: u32,
    opts: &ScanOptions,
    format: Format,
    summary_path: Option<PathBuf>,
) -> Result<(), Failure> {
    let scan = symmetry::scan_gehom(order, n, opts)?;
    if let Some(path) = summary_path {
        let text = serde_json::to_string_pretty(&scan.summary).expect("serializable");
        std::fs::write(&path, text + "\n")?;
    }
    match format {
        Format::Csv => scan.write_csv(&mut *out)?,
        Format::Json => print_json(out, &scan)?,
    }
    let s = &scan.summary;
    if !s.unsound.is_empty() || !s.identity_failures.is_empty() {
        return Err(Failure::Mismatch(format!(
            "unsound verdicts {:?}, identity failures {:?}",
            s.unsound, s.identity_failures
        )));
    }
    Ok(())
}

fn scan_verdicts(
    out: &mut impl Write,
    order: usize,
    n: u32,
    opts: &ScanOptions,
    format: Format,
) -> Result<(), Failure> {
    if order == 0 || n == 0 || n as usize % order != 0 {
        return Err(Failure::Usage(format!(
            "n = {n} must be a positive multiple of N = {order}"
        )));
    }
    let m = n / order as u32;
    let all = symmetry::sorted_occupations(order, n);
    let take = opts.max_inputs.unwrap_or(all.len()).min(all.len());
    let mut rows = Vec::with_capacity(take);
    for input in &all[..take] {
        let t = Transition::new(order, input.clone(), vec![m; order])?;
        rows.push((input.clone(), symmetry::verdict(&t)?));
    }
    match format {
        Format::Json => print_json(
            out,
            &json!({
                "N": order,
                "n": n,
                "inputs": all.len(),
                "partial": take < all.len(),
                "rows": rows.iter().map(|(i, v)| json!({ "input": i, "verdict": v })).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            writeln!(out, "input,amplitude_zero,p_sym,p_tilde,sign,status,delta_perm_nonzero")?;
            for (input, v) in rows {
                let joined: Vec<String> = input.iter().map(ToString::to_string).collect();
                writeln!(
                    out,
                    "{},,{},{},{},{},",
                    joined.join(" "),
                    v.p_sym,
                    v.p_tilde,
                    v.sign,
                    v.status.as_str()
                )?;
            }
            Ok(())
        }
    }
}

fn table2(out: &mut impl Write, min_n: usize, max_n: usize) -> Result<(), Failure> {
    if min_n == 0 || min_n > max_n {
        return Err(Failure::Usage(format!("bad range {min_n}..={max_n}")));
    }
    writeln!(out, "N,permanent,value")?;
    for n in min_n..=max_n {
        let perm = permanent_ryser(&build_sn(n)?)?.reduce();
        let value = match perm.as_rational_integer() {
            Some(r) => r.to_string(),
            None => {
                let z = perm.eval_numeric();
                format!("{}{:+}i", z.re, z.im)
            }
        };
        writeln!(out, "{n},{},{value}", perm.to_text())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let guard = Failure::Core(ghom_core::Error::ResourceGuard {
            what: "x",
            side: 30,
            limit: 20,
            advice: "",
        });
        assert_eq!(guard.code(), 2);
        assert_eq!(Failure::Core(ghom_core::Error::BudgetExceeded("b".into())).code(), 2);
        assert_eq!(Failure::Mismatch("m".into()).code(), 3);
        assert_eq!(Failure::Usage("u".into()).code(), 1);
        assert_eq!(Failure::Core(ghom_core::Error::EmptyTransition).code(), 1);
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
