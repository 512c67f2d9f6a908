//! `mwkit`: run the verification suite, compute indices, factor symplectic
//! matrices and apply operators to states stored as JSON.
//!
//! Exit status: 0 on success, 1 for a mathematical failure or degenerate
//! input, 2 for I/O errors and malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use mwkit::decomposition::{factor_free_pair, FreePairJson};
use mwkit::engine::{hw_apply, quad_fourier_grid, GridFunction, GridFunctionJson, MWDescriptor};
use mwkit::gaussian::{gauss_hw, gauss_quad_fourier, mw_apply_gaussian, GaussianState, GaussianStateJson};
use mwkit::io::{read_json, write_json, FreeGeneratorJson, MatrixJson};
use mwkit::maslov::{mw_index, MaslovData};
use mwkit::symplectic::{cayley_ms, generator_from_free, FreeGenerator, PhaseSpacePoint, SymplecticMatrix};
use mwkit::verify::{run_suite, tol_scale_from_env, VerifyConfig};
use mwkit::{Error, Result};

#[derive(Parser)]
#[command(name = "mwkit", version, about = "Weyl representation of metaplectic operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every property suite and write a JSON report.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [1, 2, 3])]
        dims: Vec<usize>,
        #[arg(long)]
        report: PathBuf,
    },
    /// Print `m`, `Inert(P+Q−L−Lᵀ)` and `ν` for a free generator.
    Maslov {
        #[arg(long)]
        input: PathBuf,
    },
    /// Factor a symplectic matrix into two nondegenerate free factors.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Apply an operator to a Gaussian state or a grid function.
    Apply {
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print `M_S` for a symplectic matrix.
    Cayley {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    /// Weyl operator `R(S)` with index `ν`; params `{"S": {"n", "rows"}, "nu"}`.
    Mw,
    /// Quadratic Fourier transform; params are a free generator.
    Swm,
    /// Heisenberg–Weyl translation; params `{"z0": [x.., p..]}`.
    Hw,
}

#[derive(Deserialize)]
struct MwParams {
    #[serde(rename = "S")]
    s: MatrixJson,
    nu: u8,
}

#[derive(Deserialize)]
struct HwParams {
    z0: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateJson {
    Gaussian(GaussianStateJson),
    Grid(GridFunctionJson),
}

enum State {
    Gaussian(GaussianState),
    Grid(GridFunction),
}

#[derive(Serialize)]
struct DecomposeOutput {
    #[serde(flatten)]
    pair: FreePairJson,
    first_index: MaslovData,
    second_index: MaslovData,
    residual: f64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Malformed(_) | Error::Dimension(_) => 2,
        _ => 1,
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn read_state(path: &Path) -> Result<State> {
    Ok(match read_json::<StateJson>(path)? {
        StateJson::Gaussian(g) => State::Gaussian(GaussianState::try_from(g).map_err(malformed)?),
        StateJson::Grid(f) => State::Grid(GridFunction::try_from(f)?),
    })
}

/// Shape problems in an input file are input errors, not mathematical ones.
fn malformed(e: Error) -> Error {
    match e {
        Error::InvalidParameter(msg) => Error::Malformed(msg),
        other => other,
    }
}

fn check_dim(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Malformed(format!("{what} has n={got}, state has n={expected}")));
    }
    Ok(())
}

fn cmd_verify(seed: u64, dims: &[usize], report: &Path) -> Result<bool> {
    let cfg = VerifyConfig::new(seed, dims).map_err(malformed)?.with_tol_scale(tol_scale_from_env()?)?;
    let result = run_suite(&cfg);
    for c in &result.cases {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        println!("{tag} {:<42} {:>6} {:>11.3e} {:>9.1e}", c.property_id, c.instances, c.max_error, c.tolerance);
    }
    println!("overall: {}", if result.overall { "pass" } else { "fail" });
    write_json(report, &result)?;
    Ok(result.overall)
}

fn cmd_maslov(input: &Path) -> Result<()> {
    let g = FreeGenerator::try_from(read_json::<FreeGeneratorJson>(input)?)?;
    print_json(&mw_index(&g)?)
}

fn cmd_decompose(input: &Path, out: &Path, seed: u64) -> Result<()> {
    let s = read_json::<MatrixJson>(input)?.to_symplectic()?;
    let pair = factor_free_pair(&s, seed)?;
    let output = DecomposeOutput {
        first_index: mw_index(&pair.first)?,
        second_index: mw_index(&pair.second)?,
        residual: pair.reconstruction_residual(&s),
        pair: pair.to_json(),
    };
    write_json(out, &output)?;
    print_json(&output)
}

/// `R(S)` on a grid goes through the free generator whose index is `ν`.
fn mw_generator(s: &SymplecticMatrix, nu: u8) -> Result<FreeGenerator> {
    if !s.is_free() {
        return Err(Error::Unsupported("R(S) on a grid needs a free S (det B≠0)".into()));
    }
    let form = generator_from_free(s)?;
    let inert = mw_index(&FreeGenerator::from_form(form.clone(), if form.det_l() > 0.0 { 0 } else { 1 })?)?.inert;
    let m = (nu as usize + inert) % 4;
    FreeGenerator::from_form(form, m as i64)
        .map_err(|_| Error::InvalidParameter(format!("ν={nu} is not an index of this S")))
}

fn cmd_apply(op: Op, params: &Path, state: &Path, out: &Path) -> Result<()> {
    let state = read_state(state)?;
    let n = match &state {
        State::Gaussian(g) => g.n(),
        State::Grid(f) => f.spec().n(),
    };
    let result = match op {
        Op::Mw => {
            let p: MwParams = read_json(params)?;
            check_dim("S", n, p.s.n)?;
            let desc = MWDescriptor::new(&p.s.to_symplectic()?, p.nu % 4)?;
            match state {
                State::Gaussian(g) => State::Gaussian(mw_apply_gaussian(&desc, &g)?),
                State::Grid(f) => State::Grid(quad_fourier_grid(&mw_generator(desc.s(), desc.nu())?, &f)?),
            }
        }
        Op::Swm => {
            let g = FreeGenerator::try_from(read_json::<FreeGeneratorJson>(params)?)?;
            check_dim("generator", n, g.n())?;
            match state {
                State::Gaussian(s) => State::Gaussian(gauss_quad_fourier(&g, &s)?),
                State::Grid(f) => State::Grid(quad_fourier_grid(&g, &f)?),
            }
        }
        Op::Hw => {
            let p: HwParams = read_json(params)?;
            if p.z0.len() != 2 * n || p.z0.iter().any(|v| !v.is_finite()) {
                return Err(Error::Malformed(format!("z0 must hold {} finite numbers", 2 * n)));
            }
            let z0 = PhaseSpacePoint::from_z(&mwkit::linalg::RVec::from_vec(p.z0));
            match state {
                State::Gaussian(g) => State::Gaussian(gauss_hw(&z0, &g)),
                State::Grid(f) => State::Grid(hw_apply(&z0, &f)?),
            }
        }
    };
    match result {
        State::Gaussian(g) => write_json(out, &GaussianStateJson::from(&g)),
        State::Grid(f) => {
            if f.is_truncated() {
                eprintln!("warning: result does not decay at the grid boundary");
            }
            write_json(out, &f.to_json())
        }
    }
}

fn cmd_cayley(input: &Path) -> Result<()> {
    let s = read_json::<MatrixJson>(input)?.to_symplectic()?;
    print_json(&MatrixJson::from_matrix(&cayley_ms(&s)?))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { seed, dims, report } => return cmd_verify(seed, &dims, &report),
        Command::Maslov { input } => cmd_maslov(&input)?,
        Command::Decompose { input, out, seed } => cmd_decompose(&input, &out, seed)?,
        Command::Apply { op, params, state, out } => cmd_apply(op, &params, &state, &out)?,
        Command::Cayley { input } => cmd_cayley(&input)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
