//! Command-line front end. `run` is the whole program minus process exit.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::dense_coding::capacity;
use crate::error::Error;
use crate::model::ModelParams;
use crate::numerics::{c, C64};
use crate::selftest::run_selftest;
use crate::swap::{
    evolve, find_swap_times, purity_witness, random_product_states, verify_swap, ProductState, DEFAULT_K_MAX,
    DEFAULT_N_MAX, DEFAULT_SWAP_TOL,
};
use crate::sweep::{format_float, write_sweep, Parallelism, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "spinpair", version, about = "Dense-coding capacity and swap timing for two coupled spins")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dense-coding capacity of the thermal state.
    Capacity {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "T", allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Evolve a product state and report the amplitudes and purity witness.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// List times at which the evolution maps product states to product states.
    SwapFind {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Check one solution from `swap-find` on a batch of random product states.
    SwapVerify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Row index in the `swap-find` table.
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        count: usize,
        /// Tolerance for the phase spread and factor fit.
        #[arg(long = "verify-tol", default_value_t = 1e-8)]
        verify_tol: f64,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Evaluate a quantity on a parameter grid and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the `output` key; without either the CSV goes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, conflicts_with = "serial")]
        threads: Option<usize>,
        #[arg(long)]
        serial: bool,
    },
    /// Cross-check every closed form against the numeric oracle.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long = "J", allow_negative_numbers = true)]
    j: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    dbzeff: f64,
    #[arg(long = "Bz", default_value_t = 0.0, allow_negative_numbers = true)]
    bz: f64,
    #[arg(long = "gamma-e", default_value_t = 1.0, allow_negative_numbers = true)]
    gamma_e: f64,
}

impl ModelArgs {
    fn params(&self) -> ModelParams {
        ModelParams::new(self.j, self.beta0).with_gamma_e(self.gamma_e).with_bz(self.bz).with_dbzeff(self.dbzeff)
    }
}

#[derive(Args, Debug)]
struct StateArgs {
    /// Amplitude as `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    alpha1: C64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    beta1: C64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    alpha2: C64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    beta2: C64,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    kmax: i64,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    nmax: i64,
    #[arg(long, default_value_t = DEFAULT_SWAP_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct FormatArgs {
    /// Significant digits in printed numbers.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", x.trim()));
    match s.split_once(',') {
        Some((re, im)) => Ok(c(num(re)?, num(im)?)),
        None => Ok(c(num(s)?, 0.0)),
    }
}

/// Parse `argv` (including the program name) and run it.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(err, "error [{}]: {e}", e.code());
            EXIT_NUMERIC
        }
        // a closed stdout (e.g. piped into `head`) is not an error
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

enum Failure {
    Usage(String),
    Numeric(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Io(_) => Failure::Usage(e.to_string()),
            other => Failure::Numeric(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn complex(z: C64, digits: usize) -> String {
    format!("{},{}", format_float(z.re, digits), format_float(z.im, digits))
}

fn opt(x: Option<f64>, digits: usize) -> String {
    x.map(|v| format_float(v, digits)).unwrap_or_else(|| "-".into())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Capacity { model, t, fmt } => {
            let p = model.params().with_temperature(t);
            let r = capacity(&p)?;
            let f = |x: f64| format_float(x, fmt.precision as usize);
            writeln!(out, "chi={}", f(r.chi))?;
            writeln!(out, "S_rho={}", f(r.s_rho))?;
            writeln!(out, "S_avg={}", f(r.s_avg))?;
            writeln!(out, "holevo={}", f(r.holevo))?;
            writeln!(out, "chi_closed_form={}", f(r.chi_closed_form))?;
            writeln!(out, "A={}", f(r.a))?;
            writeln!(out, "B={}", f(r.b))?;
            writeln!(out, "zeta={}", f(r.zeta))?;
            writeln!(out, "delta={}", f(r.delta))?;
            writeln!(out, "log_Z={}", f(r.log_z))?;
            writeln!(out, "valid={}", r.valid)?;
            Ok(EXIT_OK)
        }
        Command::Evolve { model, state, t, fmt } => {
            let d = fmt.precision as usize;
            let p = model.params();
            let s0 = ProductState::new(state.alpha1, state.beta1, state.alpha2, state.beta2)?;
            let e = evolve(&p, &s0, t)?;
            let w = purity_witness(&p, &s0, t)?;
            for (name, z) in [("a", e.a), ("b", e.b), ("c", e.c), ("d", e.d)] {
                writeln!(out, "{name}={}", complex(z, d))?;
            }
            writeln!(out, "witness={}", complex(w.value, d))?;
            writeln!(out, "witness_abs={}", format_float(w.value.norm(), d))?;
            writeln!(out, "witness_closed_form={}", complex(w.closed_form, d))?;
            writeln!(out, "mu={}", complex(w.mu, d))?;
            writeln!(out, "nu={}", complex(w.nu, d))?;
            writeln!(out, "X={}", complex(w.x, d))?;
            writeln!(out, "Y={}", complex(w.y, d))?;
            Ok(EXIT_OK)
        }
        Command::SwapFind { model, search, fmt } => {
            let d = fmt.precision as usize;
            let sols = find_swap_times(&model.params(), search.kmax, search.nmax, search.tol)?;
            writeln!(
                out,
                "index\tt\tk\tn\tcase\tmapping\tphase1\tphase2\tpredicted\tpredicted_matches\tresidual\tprinted_t"
            )?;
            for (i, s) in sols.iter().enumerate() {
                let yes_no = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "{i}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    format_float(s.t, d),
                    s.k,
                    s.n,
                    s.case_label,
                    s.mapping.as_str(),
                    format_float(s.phase_spin1, d),
                    format_float(s.phase_spin2, d),
                    opt(s.predicted_phase, d),
                    yes_no(s.predicted_phase_matches),
                    format_float(s.residuals.max(), d),
                    opt(s.printed_time, d),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::SwapVerify { model, search, index, seed, count, verify_tol, fmt } => {
            let d = fmt.precision as usize;
            let p = model.params();
            let sols = find_swap_times(&p, search.kmax, search.nmax, search.tol)?;
            let sol = sols
                .get(index)
                .ok_or_else(|| Failure::Usage(format!("no solution with index {index} ({} found)", sols.len())))?;
            let v = verify_swap(&p, sol.t, &random_product_states(seed, count), verify_tol)?;
            writeln!(out, "t={}", format_float(sol.t, d))?;
            writeln!(out, "case={}", sol.case_label)?;
            writeln!(out, "mapping={}", v.mapping.map(|m| m.as_str()).unwrap_or("invalidated"))?;
            writeln!(out, "phase1={}", format_float(v.phase_spin1, d))?;
            writeln!(out, "phase2={}", format_float(v.phase_spin2, d))?;
            writeln!(out, "phase_spread={}", format_float(v.phase_spread, d))?;
            writeln!(out, "max_witness={}", format_float(v.max_witness, d))?;
            writeln!(out, "max_factor_error={}", format_float(v.max_factor_error, d))?;
            writeln!(out, "states={}", v.states_checked)?;
            Ok(if v.mapping.is_some() { EXIT_OK } else { EXIT_NUMERIC })
        }
        Command::Sweep { config, output, threads, serial } => {
            let cfg = SweepConfig::from_file(&config)?;
            let mode = match (serial, threads) {
                (true, _) => Parallelism::Serial,
                (false, Some(n)) => Parallelism::Threads(n),
                (false, None) => Parallelism::Parallel,
            };
            let to_stdout = output.is_none() && cfg.output_path.is_none();
            let result = write_sweep(&cfg, output.as_deref(), mode)?;
            if to_stdout {
                out.write_all(result.to_csv().as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        Command::Selftest { seed } => {
            let report = run_selftest(seed)?;
            writeln!(out, "{report}")?;
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_NUMERIC })
        }
    }
}
