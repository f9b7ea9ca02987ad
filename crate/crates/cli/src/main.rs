//! Command-line interface for the sicps phase-space toolkit.
//!
//! Exit codes: 0 on success, 1 on verification or convergence failure,
//! 2 on usage or parse errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sicps::bargmann::{find_zeros, husimi_grid, husimi_min_resolution};
use sicps::dim::Dim;
use sicps::error::Error;
use sicps::io;
use sicps::localization::{
    haar_estimate, haar_estimate_with_histogram, inverse_references, ipr, phase_space_m,
    verify_sic, HaarStatistic,
};
use sicps::op::PureState;
use sicps::reps::{chord_of_state, wigner_of_state};
use sicps::search::{search, SearchConfig};
use sicps::zauner::{
    classical_h_grid, enumerate_cycles, expand_in_eigenbasis, harper_hamiltonian,
    labeled_eigenbasis,
};

#[derive(Parser)]
#[command(
    name = "sicps",
    version,
    about = "Phase-space toolkit for odd-dimensional qudits and SIC-POVM fiducial states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export a phase-space representation of a state
    Repr {
        #[command(subcommand)]
        kind: ReprKind,
    },
    /// Check the SIC fiducial condition for a state
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Tolerance on max | |<phi|T_a|phi>|^2 - 1/(d+1) |
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Localization measures of a state
    Localize {
        #[command(subcommand)]
        stat: LocalizeStat,
    },
    /// Monte Carlo averages over Haar-random states
    Haar {
        #[command(subcommand)]
        stat: HaarStat,
    },
    /// Zauner symmetry analysis
    Zauner {
        #[command(subcommand)]
        what: ZaunerCmd,
    },
    /// Multi-start numerical search for a SIC fiducial state
    Search {
        #[arg(long)]
        d: usize,
        /// Restrict the search to one Zauner sector (0, 1 or 2)
        #[arg(long)]
        sector: Option<u8>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        /// Convergence tolerance on the gap M - 2/(d+1)
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, env = "SICPS_SEED")]
        seed: u64,
        /// Where to write the resulting state file
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct ReprArgs {
    /// Expected dimension (validated against the input state)
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum ReprKind {
    /// Chord (characteristic) function grid
    Chord(ReprArgs),
    /// Discrete Wigner function grid
    Wigner(ReprArgs),
    /// Husimi density grid
    Husimi {
        #[command(flatten)]
        common: ReprArgs,
        /// Grid resolution (default 32 ceil(sqrt d))
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Bargmann zero constellation (JSON)
    BargmannZeros {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum LocalizeStat {
    /// Inverse participation ratio in the position basis
    Ipr {
        #[arg(long)]
        input: PathBuf,
    },
    /// Phase-space localization M
    M {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct HaarArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "SICPS_SEED")]
    seed: u64,
    /// Optionally write a 500-bin histogram CSV of the inverse statistic
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Subcommand)]
enum HaarStat {
    /// Average inverse participation ratio
    P(HaarArgs),
    /// Average phase-space measure M
    M(HaarArgs),
}

#[derive(Subcommand)]
enum ZaunerCmd {
    /// Orbit partition of the lattice with census and closed forms
    Cycles {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// The Harper-variant Hamiltonian matrix
    Hamiltonian {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Labeled eigenbasis table (i, eps, r, k)
    Eigenbasis {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Expand a state in the labeled eigenbasis
    Expand {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classical Hamiltonian level-curve grid
    ClassicalH {
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Pgm,
}

impl From<FormatArg> for io::GridFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => io::GridFormat::Csv,
            FormatArg::Json => io::GridFormat::Json,
            FormatArg::Pgm => io::GridFormat::Pgm,
        }
    }
}

/// Exit discipline: anything wrong with the inputs is a usage error (2),
/// everything else that fails is a failed run (1).
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::InvalidDim(_)
        | Error::DimensionMismatch { .. }
        | Error::NotNormalizable(_)
        | Error::UnsupportedFormat { .. } => 2,
        _ => 1,
    }
}

fn load_input(path: &PathBuf, expected_d: Option<usize>) -> Result<PureState, Error> {
    let state = io::load_state(path)?;
    if let Some(d) = expected_d {
        if d != state.dim().get() {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: state.dim().get(),
            });
        }
    }
    Ok(state)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Repr { kind } => run_repr(kind),
        Command::Verify { input, tol } => {
            let state = load_input(&input, None)?;
            let report = verify_sic(&state, tol);
            println!("{}", io::sic_report_to_json(&report)?);
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Localize { stat } => {
            let (input, name) = match &stat {
                LocalizeStat::Ipr { input } => (input, "ipr"),
                LocalizeStat::M { input } => (input, "m"),
            };
            let state = load_input(input, None)?;
            let value = match stat {
                LocalizeStat::Ipr { .. } => ipr(&state),
                LocalizeStat::M { .. } => phase_space_m(&state),
            };
            println!(
                "{}",
                serde_json::json!({
                    "version": sicps::VERSION,
                    "d": state.dim().get(),
                    "statistic": name,
                    "value": value,
                })
            );
            Ok(0)
        }
        Command::Haar { stat } => {
            let (args, statistic) = match stat {
                HaarStat::P(args) => (args, HaarStatistic::P),
                HaarStat::M(args) => (args, HaarStatistic::M),
            };
            let d = Dim::new(args.d)?;
            match args.histogram {
                None => {
                    let est = haar_estimate(statistic, d, args.n, args.seed);
                    println!("{}", io::haar_estimate_to_json(&est)?);
                }
                Some(path) => {
                    let (est, hist) =
                        haar_estimate_with_histogram(statistic, d, args.n, args.seed);
                    std::fs::write(&path, io::histogram_to_csv(&hist))?;
                    let refs = inverse_references(statistic, d)?;
                    let mut combined = serde_json::to_value(&est)?;
                    combined["version"] = serde_json::json!(sicps::VERSION);
                    combined["inverse_references"] = serde_json::to_value(&refs)?;
                    println!("{}", serde_json::to_string_pretty(&combined)?);
                }
            }
            Ok(0)
        }
        Command::Zauner { what } => run_zauner(what),
        Command::Search {
            d,
            sector,
            restarts,
            max_iters,
            tol,
            seed,
            output,
        } => {
            let dim = Dim::new(d)?;
            let mut config = SearchConfig::new(dim, seed);
            config.sector = sector;
            config.restarts = restarts;
            config.max_iters = max_iters;
            config.tol = tol;
            let result = search(&config)?;
            io::save_state(&result.best_state, &output, Some("search result"))?;
            println!("{}", io::search_result_to_json(&config, &result)?);
            Ok(if result.converged { 0 } else { 1 })
        }
    }
}

fn run_repr(kind: ReprKind) -> Result<u8, Error> {
    match kind {
        ReprKind::Chord(args) => {
            let state = load_input(&args.input, args.d)?;
            let grid = chord_of_state(&state);
            io::export_grid(&io::GridData::Chord(&grid), args.format.into(), &args.output)?;
            Ok(0)
        }
        ReprKind::Wigner(args) => {
            let state = load_input(&args.input, args.d)?;
            let grid = wigner_of_state(&state);
            io::export_grid(&io::GridData::Wigner(&grid), args.format.into(), &args.output)?;
            Ok(0)
        }
        ReprKind::Husimi { common, grid } => {
            let state = load_input(&common.input, common.d)?;
            let n = grid.unwrap_or_else(|| 4 * husimi_min_resolution(state.dim()));
            let h = husimi_grid(&state, n)?;
            io::export_grid(&io::GridData::Husimi(&h), common.format.into(), &common.output)?;
            Ok(0)
        }
        ReprKind::BargmannZeros { d, input, output } => {
            let state = load_input(&input, d)?;
            let constellation = find_zeros(&state)?;
            std::fs::write(&output, io::constellation_to_json(&constellation)?)?;
            Ok(0)
        }
    }
}

fn run_zauner(what: ZaunerCmd) -> Result<u8, Error> {
    let emit = |text: String, output: Option<PathBuf>| -> Result<u8, Error> {
        match output {
            Some(path) => std::fs::write(path, text)?,
            None => println!("{text}"),
        }
        Ok(0)
    };
    match what {
        ZaunerCmd::Cycles { d, output } => {
            let cycles = enumerate_cycles(Dim::new(d)?);
            emit(io::cycles_to_json(&cycles)?, output)
        }
        ZaunerCmd::Hamiltonian { d, output } => {
            let h = harper_hamiltonian(Dim::new(d)?);
            let rows: Vec<Vec<[f64; 2]>> = (0..d)
                .map(|i| (0..d).map(|j| [h.get(i, j).re, h.get(i, j).im]).collect())
                .collect();
            let text = serde_json::to_string_pretty(&serde_json::json!({
                "version": sicps::VERSION,
                "d": d,
                "entries": rows,
            }))?;
            emit(text, output)
        }
        ZaunerCmd::Eigenbasis { d, output } => {
            let basis = labeled_eigenbasis(Dim::new(d)?)?;
            emit(io::eigenbasis_to_json(&basis)?, output)
        }
        ZaunerCmd::Expand { d, input, output } => {
            let state = load_input(&input, d)?;
            let basis = labeled_eigenbasis(state.dim())?;
            let coeffs = expand_in_eigenbasis(&state, &basis)?;
            emit(io::expansion_to_json(&basis, &coeffs)?, output)
        }
        ZaunerCmd::ClassicalH {
            grid,
            output,
            format,
        } => {
            let g = classical_h_grid(grid);
            io::export_grid(&io::GridData::ClassicalH(&g), format.into(), &output)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
