//! Command line front end for twistor-core.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a
//! computation errors out, 2 on bad arguments or unparsable input.

mod demo;
mod report;
mod verify;
mod warped;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistor_core::energy;

use report::{Report, TableRow};
use warped::{Checks, Params};

#[derive(Parser)]
#[command(name = "twistor", version, about = "Orthogonal complex structures via twistor geometry")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// RNG seed, recorded in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report.json and CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a short summary to stderr as well.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep random samples through the algebraic invariants.
    Verify {
        suite: Suite,
        /// Rank of the spinors (spinor, ocs and twistor suites).
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u16).range(1..=6))]
        n: u16,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Residual tolerance, 1e-10 if not given.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Checks on the warped structure of a meromorphic map.
    Warped {
        /// Rational map "p0;p12", coefficients comma separated, constant first ("t" means 0,1).
        #[arg(long, conflicts_with = "elliptic", required_unless_present = "elliptic")]
        f: Option<String>,
        /// Elliptic map "f0,f12" as polynomials in wp and wpp, e.g. "1,wp".
        #[arg(long)]
        elliptic: Option<String>,
        /// Lattice as JSON {"w1":[re,im],"w2":[re,im],"truncation":40}; square if omitted.
        #[arg(long, requires = "elliptic")]
        lattice: Option<String>,
        /// Use the conjugated (non-integrable) profile.
        #[arg(long)]
        conjugate: bool,
        #[arg(long)]
        degree: bool,
        #[arg(long)]
        energy: bool,
        #[arg(long)]
        area: bool,
        #[arg(long)]
        integrability: bool,
        #[arg(long)]
        forms: bool,
        #[arg(long)]
        biholo: bool,
        #[arg(long)]
        probe: bool,
        #[arg(long)]
        torus: bool,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Worked examples.
    Demo {
        example: Example,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Copy)]
struct RunArgs {
    /// Largest ball radius; energy and area tables double from 4 up to it.
    #[arg(long = "R", default_value_t = 64.0)]
    radius: f64,
    /// Quadrature grid parameter.
    #[arg(long, default_value_t = energy::DEFAULT_GRID)]
    grid: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Suite {
    Spinor,
    Ocs,
    Twistor,
    Clifford,
    Conformal,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Example {
    Constant,
    TwistorR4,
    Torus,
    EightDim,
}

enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

type Tables = Vec<(&'static str, Vec<TableRow>)>;

fn params(run: &RunArgs) -> Result<Params, Failure> {
    if !(run.radius > 0.0 && run.radius.is_finite()) || run.grid == 0 || run.trials == 0 {
        return Err(Failure::Usage(anyhow::anyhow!("--R, --grid and --trials must be positive")));
    }
    Ok(Params { radius: run.radius, grid: run.grid, trials: run.trials })
}

fn record_run(rep: &mut Report, run: &RunArgs) {
    rep.config("R", run.radius);
    rep.config("grid", run.grid);
    rep.config("trials", run.trials);
}

fn execute(cmd: &Cmd) -> Result<(Report, Tables), Failure> {
    match cmd {
        Cmd::Verify { suite, n, trials, tol, common } => {
            let tol = tol.unwrap_or(1e-10);
            if !(tol > 0.0) || *trials == 0 {
                return Err(Failure::Usage(anyhow::anyhow!("--tol and --trials must be positive")));
            }
            let n = *n as usize;
            let mut rep = Report::new(format!("verify {}", format!("{suite:?}").to_lowercase()), common.seed);
            rep.config("n", n);
            rep.config("trials", trials);
            rep.config("tol", tol);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            match suite {
                Suite::Spinor => verify::spinor_suite(&mut rep, &mut rng, n, *trials, tol),
                Suite::Ocs => verify::ocs_suite(&mut rep, &mut rng, n, *trials, tol),
                Suite::Twistor => verify::twistor_suite(&mut rep, &mut rng, n, *trials, tol),
                Suite::Clifford => verify::clifford_suite(&mut rep, &mut rng, *trials, tol),
                Suite::Conformal => verify::conformal_suite(&mut rep, &mut rng, *trials, tol),
            }
            Ok((rep, Vec::new()))
        }
        Cmd::Warped { f, elliptic, lattice, conjugate, degree, energy, area, integrability, forms, biholo, probe, torus, run, common } => {
            let p = params(run)?;
            let mut ws = match (f, elliptic) {
                (Some(f), _) => warped::parse_rational(f),
                (None, Some(e)) => warped::parse_elliptic(e, lattice.as_deref()),
                (None, None) => unreachable!("clap requires one of them"),
            }
            .map_err(Failure::Usage)?;
            if *conjugate {
                ws = twistor_core::warped::WarpedStructure::conjugated(ws.map);
            }
            let mut checks = Checks {
                degree: *degree,
                energy: *energy,
                area: *area,
                integrability: *integrability,
                forms: *forms,
                biholo: *biholo,
                probe: *probe,
                torus: *torus,
            };
            if !checks.any() {
                checks = Checks::defaults(&ws);
            }
            warped::validate(&ws, &checks).map_err(Failure::Usage)?;
            let mut rep = Report::new("warped", common.seed);
            rep.config("f", f);
            rep.config("elliptic", elliptic);
            rep.config("lattice", lattice);
            rep.config("conjugate", conjugate);
            record_run(&mut rep, run);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let tables = warped::run(&mut rep, &ws, checks, &p, &mut rng).map_err(Failure::Run)?;
            Ok((rep, tables))
        }
        Cmd::Demo { example, run, common } => {
            let p = params(run)?;
            let name = format!("{example:?}");
            let mut rep = Report::new(format!("demo {}", kebab(&name)), common.seed);
            record_run(&mut rep, run);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let tables = match example {
                Example::Constant => demo::constant(&mut rep, &p, &mut rng),
                Example::TwistorR4 => demo::twistor_r4(&mut rep, &p, &mut rng),
                Example::Torus => demo::torus(&mut rep, &p, &mut rng),
                Example::EightDim => demo::eight_dim(&mut rep),
            }
            .map_err(Failure::Run)?;
            Ok((rep, tables))
        }
    }
}

fn kebab(s: &str) -> String {
    let mut out = String::new();
    for (k, ch) in s.chars().enumerate() {
        if ch.is_uppercase() && k > 0 {
            out.push('-');
        }
        out.push(ch.to_ascii_lowercase());
    }
    out
}

fn common(cmd: &Cmd) -> &Common {
    match cmd {
        Cmd::Verify { common, .. } | Cmd::Warped { common, .. } | Cmd::Demo { common, .. } => common,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (rep, tables) = match execute(&cli.cmd) {
        Ok(r) => r,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let c = common(&cli.cmd);
    println!("{}", rep.to_json());
    if c.verbose {
        eprint!("{}", rep.summary());
    }
    if let Some(dir) = &c.out {
        let refs: Vec<(&str, &[TableRow])> = tables.iter().map(|(n, r)| (*n, r.as_slice())).collect();
        if let Err(e) = rep.write(dir, &refs) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(if rep.pass { 0 } else { 1 })
}
