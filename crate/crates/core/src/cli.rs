//! `polarpcp` command line: t-SVD of a tensor file, PCP decomposition, and
//! phase-transition simulations.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypermatrix::{read_pht_file, write_pht_file, HyperMatrix};
use crate::simlab::{self, Embedding, TrialSpec};
use crate::solvers::{self, SolverConfig, Variant};
use crate::transform::{Normalization, TransformKind, TubeTransform};
use crate::tsvd;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARAM: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "polarpcp", version, about = "Polar n-(bi)complex SVD and principal component pursuit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformArg {
    Dft,
    SkewDft,
    Wht,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Polar,
    TensorRpca,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Polar => Variant::Frequency,
            VariantArg::TensorRpca => Variant::TensorRpca,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EmbeddingArg {
    Polar4complex,
    Polar2bicomplex,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tensor SVD of a PHT file; writes U.pht, S.pht, V.pht and summary.json.
    Tsvd {
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "dft")]
        transform: TransformArg,
    },
    /// Low-rank plus sparse decomposition; writes L.pht, S.pht and report.json.
    Decompose {
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "polar")]
        variant: VariantArg,
        /// Field to solve over; defaults to the field of the input.
        #[arg(long, value_enum)]
        field: Option<FieldArg>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        #[arg(long, value_enum, default_value = "dft")]
        transform: TransformArg,
    },
    /// Phase-transition grid of synthetic recoveries; writes a CSV.
    Simulate {
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10,12,14,16,18,20")]
        ranks: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.04,0.06,0.08,0.1,0.12,0.14,0.16,0.18,0.2")]
        rhos: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.01")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "both")]
        embedding: EmbeddingArg,
        #[arg(long, value_enum, default_value = "polar")]
        variant: VariantArg,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
    },
}

fn transform_kind(arg: TransformArg, n: usize) -> Result<TransformKind> {
    Ok(match arg {
        TransformArg::Dft => TransformKind::Dft,
        TransformArg::SkewDft => TransformKind::SkewDft,
        TransformArg::Wht => TubeTransform::walsh_hadamard(n)?.kind().clone(),
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Format(_) => EXIT_IO,
        Error::SvdFailed { .. } => EXIT_FAILURE,
        _ => EXIT_PARAM,
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARAM } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("polarpcp: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Tsvd {
            input,
            out_dir,
            transform,
        } => run_tsvd(&input, &out_dir, transform),
        Command::Decompose {
            input,
            out_dir,
            variant,
            field,
            c,
            tol,
            max_iters,
            transform,
        } => {
            let x = read_pht_file(&input)?;
            let x = match field {
                None => x,
                Some(FieldArg::Complex) => x.to_complex_field(),
                Some(FieldArg::Real) => x.to_real_field()?,
            };
            let cfg = SolverConfig {
                c,
                tol,
                max_iters,
                variant: variant.into(),
                transform: transform_kind(transform, x.n())?,
                ..SolverConfig::default()
            };
            run_decompose(&x, &cfg, &out_dir)
        }
        Command::Simulate {
            m,
            ranks,
            rhos,
            epsilons,
            trials,
            seed,
            embedding,
            variant,
            out,
        } => {
            let embeddings = match embedding {
                EmbeddingArg::Polar4complex => vec![Embedding::Polar4Complex],
                EmbeddingArg::Polar2bicomplex => vec![Embedding::Polar2Bicomplex],
                EmbeddingArg::Both => Embedding::ALL.to_vec(),
            };
            let spec = TrialSpec {
                m,
                ranks,
                rhos,
                epsilons,
                embeddings,
                trials,
                seed,
                variant: variant.into(),
            };
            let result = simlab::run_grid(&spec)?;
            simlab::write_csv_file(&result, &out)?;
            eprintln!(
                "polarpcp: {} rows written to {} in {:.1} s",
                result.rows.len(),
                out.display(),
                result.runtime.as_secs_f64()
            );
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct TsvdSummary {
    rows: usize,
    cols: usize,
    n: usize,
    field: &'static str,
    transform: String,
    singular_moduli: Vec<f64>,
}

fn run_tsvd(input: &Path, out_dir: &Path, transform: TransformArg) -> Result<()> {
    let a = read_pht_file(input)?;
    let t = TubeTransform::new(transform_kind(transform, a.n())?, a.n(), Normalization::Unnormalized)?;
    let factors = tsvd::tsvd(&a, &t)?;
    std::fs::create_dir_all(out_dir)?;
    write_pht_file(out_dir.join("U.pht"), &factors.u)?;
    write_pht_file(out_dir.join("S.pht"), &factors.s)?;
    write_pht_file(out_dir.join("V.pht"), &factors.v)?;
    let summary = TsvdSummary {
        rows: a.rows(),
        cols: a.cols(),
        n: a.n(),
        field: a.field().as_str(),
        transform: t.kind().to_string(),
        singular_moduli: factors.singular_moduli(),
    };
    write_json(&out_dir.join("summary.json"), &summary)
}

#[derive(Serialize)]
struct DecomposeReport {
    variant: Variant,
    transform: String,
    field: &'static str,
    lambda: f64,
    iterations: usize,
    converged: bool,
    final_residual: f64,
    residuals: Vec<f64>,
    mu_trace: Vec<f64>,
    slice_svds: usize,
    tube_transforms: usize,
}

fn run_decompose(x: &HyperMatrix, cfg: &SolverConfig, out_dir: &Path) -> Result<()> {
    let out = solvers::pcp_ialm(x, cfg)?;
    std::fs::create_dir_all(out_dir)?;
    write_pht_file(out_dir.join("L.pht"), &out.l)?;
    write_pht_file(out_dir.join("S.pht"), &out.s)?;
    let report = DecomposeReport {
        variant: cfg.variant,
        transform: cfg.transform.to_string(),
        field: x.field().as_str(),
        lambda: out.lambda,
        iterations: out.iterations,
        converged: out.converged,
        final_residual: solvers::residual(x, &out.l, &out.s)?,
        residuals: out.residual_history,
        mu_trace: out.mu_trace,
        slice_svds: out.ops.slice_svds,
        tube_transforms: out.ops.tube_transforms,
    };
    write_json(&out_dir.join("report.json"), &report)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
