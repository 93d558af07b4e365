use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dsmkit::io::{
    parse_imaginary, parse_imaginary_list, read_json, solve_document, sweep_csv, to_json, verify_document,
    write_json, BackwardErrorDocument, MatrixFile, PencilFile, ResultDocument,
};
use dsmkit::maps::StructureFamily;
use dsmkit::oracle::OracleBudget;
use dsmkit::pencil::{
    eta_s, eta_sd, experiment_table, gen_eigpair, gen_pencil_with, reconstruct_perturbation, BlockSelection,
    EigenPair, PencilOptions, Variant,
};
use dsmkit::{Error, ToleranceConfig};

#[derive(Parser)]
#[command(name = "dsmkit", version, about = "Doubly structured mappings and pencil backward errors")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_rank: f64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_psd: f64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_residual: f64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_colinearity: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structured mapping problems.
    Map {
        #[command(subcommand)]
        cmd: MapCmd,
    },
    /// Generate or validate pencils.
    Pencil {
        #[command(subcommand)]
        cmd: PencilCmd,
    },
    /// Eigenpair backward errors (single λ, or `sweep`).
    Backerr(BackerrCmd),
    /// Re-audit a `map solve` result document.
    Verify {
        #[arg(long)]
        result: PathBuf,
    },
}

#[derive(Subcommand)]
enum MapCmd {
    /// Minimal-norm mapping; adds `Δ*z = w` when `--z` and `--w` are given.
    Solve {
        #[arg(long)]
        family: StructureFamily,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, requires = "w")]
        z: Option<PathBuf>,
        #[arg(long, requires = "z")]
        w: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PencilCmd {
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, env = "DSMKIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Rank of R (defaults to n).
        #[arg(long)]
        r_rank: Option<usize>,
        #[arg(short = 'o', long)]
        out: PathBuf,
    },
    Validate { file: PathBuf },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct BackerrCmd {
    #[command(subcommand)]
    sweep: Option<SweepCmd>,
    #[command(flatten)]
    single: SingleArgs,
}

#[derive(Args)]
struct Common {
    #[arg(long, required = true)]
    pencil: Option<PathBuf>,
    #[arg(long, default_value = "JREB")]
    blocks: BlockSelection,
    #[arg(long, default_value = "sd")]
    variant: Variant,
    /// Seed for the admissible eigenvector when `--u` is absent.
    #[arg(long, env = "DSMKIT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SingleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, required = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Stacked eigenvector `[u1; u2; u3]` as a matrix file.
    #[arg(long)]
    u: Option<PathBuf>,
    /// Also build and verify the perturbation attaining the upper bound.
    #[arg(long)]
    reconstruct: bool,
}

#[derive(Subcommand)]
enum SweepCmd {
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lambdas: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Infeasible(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(msg) => Failure::Infeasible(msg),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = ToleranceConfig {
        rank_tol: cli.tol.tol_rank,
        psd_tol: cli.tol.tol_psd,
        residual_tol: cli.tol.tol_residual,
        colinearity_tol: cli.tol.tol_colinearity,
    };
    let result = cfg.validate().map_err(Failure::from).and_then(|_| run(cli.cmd, &cfg));
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd, cfg: &ToleranceConfig) -> Result<ExitCode, Failure> {
    match cmd {
        Cmd::Map {
            cmd: MapCmd::Solve { family, x, y, z, w },
        } => {
            let x: MatrixFile = read_json(&x)?;
            let y: MatrixFile = read_json(&y)?;
            let zw = match (z, w) {
                (Some(z), Some(w)) => Some((read_json::<MatrixFile>(&z)?, read_json::<MatrixFile>(&w)?)),
                _ => None,
            };
            let doc = solve_document(family, &x, &y, zw.as_ref().map(|(z, w)| (z, w)), None, cfg)?;
            emit(&to_json(&doc));
            if !doc.feasible {
                return Err(Failure::Infeasible(doc.reason.unwrap_or_default()));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Pencil {
            cmd: PencilCmd::Gen { n, m, seed, r_rank, out },
        } => {
            if n == 0 || m == 0 {
                return Err(Failure::Usage("n and m must be positive".into()));
            }
            let p = gen_pencil_with(n, m, seed, &PencilOptions { r_rank });
            write_json(&out, &PencilFile::from_pencil(&p))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Pencil {
            cmd: PencilCmd::Validate { file },
        } => {
            let p = read_json::<PencilFile>(&file)?.to_pencil_unchecked()?;
            let checks = p.check(cfg);
            let mut ok = true;
            for c in &checks {
                emit(&format!(
                    "{} {} {:<22} {:.3e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.block,
                    c.property,
                    c.value
                ));
                ok &= c.pass;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Backerr(BackerrCmd {
            sweep: Some(SweepCmd::Sweep { common, lambdas, csv }),
            ..
        }) => {
            let p = load_pencil(&common, cfg)?;
            let lambdas = parse_imaginary_list(&lambdas)?;
            let rows = experiment_table(&p, &lambdas, common.seed, common.blocks, common.variant, cfg)?;
            let text = sweep_csv(&rows);
            match csv {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
                None => emit(text.trim_end()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Backerr(BackerrCmd { single, .. }) => {
            let common = &single.common;
            let p = load_pencil(common, cfg)?;
            let lambda = parse_imaginary(single.lambda.as_deref().unwrap_or_default())?;
            let (ep, seed) = match &single.u {
                Some(path) => {
                    let u = read_json::<MatrixFile>(path)?.to_cvec("u")?;
                    (EigenPair::from_stacked(lambda, &u, p.n, cfg)?, None)
                }
                None => (
                    gen_eigpair(&p, common.seed, common.blocks)?.with_lambda(lambda),
                    Some(common.seed),
                ),
            };
            let bounds = match common.variant {
                Variant::S => eta_s(&p, &ep, common.blocks, cfg)?,
                Variant::Sd => eta_sd(&p, &ep, common.blocks, cfg)?,
            };
            let blocks = if single.reconstruct && bounds.finite {
                Some(reconstruct_perturbation(&p, &ep, common.blocks, &bounds, cfg)?)
            } else {
                None
            };
            emit(&to_json(&BackwardErrorDocument::new(&bounds, seed, blocks.as_ref())));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { result } => {
            let doc: ResultDocument = read_json(&result)?;
            let outcome = verify_document(&doc, cfg, &OracleBudget::default())?;
            emit(&to_json(&outcome));
            Ok(if outcome.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

/// Writes a line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn load_pencil(common: &Common, cfg: &ToleranceConfig) -> Result<dsmkit::pencil::PHPencil, Failure> {
    let path = common
        .pencil
        .as_ref()
        .ok_or_else(|| Failure::Usage("--pencil is required".into()))?;
    Ok(read_json::<PencilFile>(path)?.to_pencil(cfg)?)
}
