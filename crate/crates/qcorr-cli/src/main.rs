//! `qcorr` command line: compute / classify / reduce / verify / random.
//!
//! Exit codes: 0 success, 1 verification-suite failure (reports still
//! written), 2 parse or validation error, 3 optimizer infeasibility.

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcorr::classicality::{
    cc_in_extension_gap, is_classical_classical, is_quantum_classical, ClassicalityReport,
    DEFAULT_CLASSICALITY_TOL,
};
use qcorr::error::Error;
use qcorr::io::{
    self, digest_bytes, measurement_kind_from_str, read_json, write_bytes_atomic,
    write_json_atomic, ChannelFile, InstanceFile, MeasureResultFile, MeasurementFile,
    PureStateFile, RunConfigFile, StateFile,
};
use qcorr::measures::{
    classical_correlation, constrained_holevo, discord, distance_to_separable, eof,
    holevo_capacity, rel_ent_entanglement, squashed_upper, MeasureResult, MeasurementKind,
    NormKind,
};
use qcorr::optimize::OptimizerConfig;
use qcorr::qcore::random::{
    random_cc_state, random_pure_state_with, random_qc_state, random_separable,
    random_bipartite_with, stream_rng,
};
use qcorr::qcore::state::BipartiteState;
use qcorr::reductions::{eof_to_discord, eof_to_holevo, linopt_classical, sep_to_k};
use qcorr::suites::{run_suite, SuiteName};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Quantum correlation measures, classicality tests and promise-problem reductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Master seed for all randomized components
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Optimizer multi-start count (default: 32 for two-qubit problems, 128 above)
    #[arg(long, global = true)]
    starts: Option<usize>,
    /// Maximum simplex iterations per start
    #[arg(long, global = true, default_value_t = 2000)]
    max_iters: usize,
    /// Convergence tolerance on the objective
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Output format for tabular sidecars
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a correlation/entanglement measure on a state or channel file
    Compute {
        /// Measure name (see `qcorr compute --help`)
        #[arg(value_parser = [
            "classical-correlation-vn", "classical-correlation-povm",
            "discord-vn", "discord-povm", "eof", "rel-ent-entanglement",
            "squashed-upper", "constrained-holevo", "holevo-capacity",
            "distance-separable", "cc-extension-gap", "linopt-classical",
        ])]
        measure: String,
        /// State JSON (channel JSON for the Holevo measures)
        input: PathBuf,
        /// Input state for constrained-holevo
        #[arg(long)]
        input_state: Option<PathBuf>,
        /// Ensemble / ansatz size override
        #[arg(long)]
        k: Option<usize>,
        /// Extension register dimension (squashed-upper)
        #[arg(long, default_value_t = 2)]
        dim_c: usize,
        /// Restrict squashed-upper to classical-register extensions
        #[arg(long)]
        classical: bool,
        /// Norm for distance-separable
        #[arg(long, default_value = "frobenius", value_parser = ["trace", "frobenius"])]
        norm: String,
        /// Ancilla dims A' and B' for cc-extension-gap
        #[arg(long, num_args = 2, value_names = ["DIM_A2", "DIM_B2"])]
        ext_dims: Option<Vec<usize>>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Polynomial-time classicality detection
    Classify {
        /// State JSON
        input: PathBuf,
        /// Test both cuts (classical-classical) instead of the B cut only
        #[arg(long)]
        cc: bool,
        /// Defect tolerance
        #[arg(long, default_value_t = DEFAULT_CLASSICALITY_TOL)]
        tol_classical: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compile a promise-problem instance into another problem
    Reduce {
        #[arg(value_parser = ["sep-to-eof", "eof-to-discord", "eof-to-holevo", "sep-to-k"])]
        kind: String,
        /// Instance JSON
        input: PathBuf,
        /// Purifying register dimension for eof-to-discord
        #[arg(long)]
        dim_c: Option<usize>,
        /// Measurement flavor for eof-to-discord
        #[arg(long, default_value = "povm", value_parser = ["vn", "povm"])]
        measurement_kind: String,
        /// Ancilla dims for sep-to-k
        #[arg(long, num_args = 2, value_names = ["DIM_A2", "DIM_B2"])]
        ext_dims: Option<Vec<usize>>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a named verification suite
    Verify {
        suite: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Generate deterministic state batteries
    Random {
        #[arg(value_parser = ["haar-mixed", "pure", "qc", "cc", "separable"])]
        kind: String,
        /// Subsystem dimensions m and n
        #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [2, 2])]
        dims: Vec<usize>,
        /// Rank for haar-mixed states (default: full rank)
        #[arg(long)]
        rank: Option<usize>,
        /// Product terms for separable states
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Infeasible(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn optimizer_config(common: &CommonOpts, total_dim: usize) -> OptimizerConfig {
    let starts = common.starts.unwrap_or(if total_dim <= 4 { 32 } else { 128 });
    OptimizerConfig {
        starts,
        max_iters: common.max_iters,
        tol_f: common.tol,
        seed: common.seed,
        bounds: Vec::new(),
    }
}

fn run_config(common: &CommonOpts, cfg: &OptimizerConfig) -> RunConfigFile {
    RunConfigFile {
        seed: cfg.seed,
        starts: cfg.starts,
        max_iters: cfg.max_iters,
        tol_f: cfg.tol_f,
        format: common.format.as_str().to_string(),
    }
}

fn run(cli: Cli) -> qcorr::Result<ExitCode> {
    match cli.command {
        Command::Compute {
            measure,
            input,
            input_state,
            k,
            dim_c,
            classical,
            norm,
            ext_dims,
            common,
        } => cmd_compute(
            &measure, &input, input_state.as_deref(), k, dim_c, classical, &norm, ext_dims, &common,
        ),
        Command::Classify { input, cc, tol_classical, common } => {
            cmd_classify(&input, cc, tol_classical, &common)
        }
        Command::Reduce { kind, input, dim_c, measurement_kind, ext_dims, common } => {
            cmd_reduce(&kind, &input, dim_c, &measurement_kind, ext_dims, &common)
        }
        Command::Verify { suite, count, common } => cmd_verify(&suite, count, &common),
        Command::Random { kind, dims, rank, terms, count, common } => {
            cmd_random(&kind, &dims, rank, terms, count, &common)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_compute(
    measure: &str,
    input: &Path,
    input_state: Option<&Path>,
    k: Option<usize>,
    dim_c: usize,
    classical: bool,
    norm: &str,
    ext_dims: Option<Vec<usize>>,
    common: &CommonOpts,
) -> qcorr::Result<ExitCode> {
    let input_bytes = std::fs::read(input)?;
    let digest = digest_bytes(&input_bytes);

    let (result, total_dim): (MeasureResult, usize) = match measure {
        "constrained-holevo" | "holevo-capacity" => {
            let file: ChannelFile = serde_json::from_slice(&input_bytes)?;
            let channel = file.to_channel()?;
            let cfg = optimizer_config(common, channel.dim_in().pow(2));
            let res = if measure == "holevo-capacity" {
                holevo_capacity(&channel, &cfg)?
            } else {
                let state_path = input_state.ok_or_else(|| {
                    Error::InvalidArgument(
                        "constrained-holevo needs --input-state <file>".into(),
                    )
                })?;
                let sf: StateFile = read_json(state_path)?;
                constrained_holevo(&channel, &sf.to_density()?, k, &cfg)?
            };
            (res, channel.dim_in().pow(2))
        }
        "linopt-classical" => {
            let file: StateFile = serde_json::from_slice(&input_bytes)?;
            let (op, m, n) = file.to_operator()?;
            let cfg = optimizer_config(common, m * n);
            (linopt_classical(&op, m, n, &cfg)?, m * n)
        }
        _ => {
            let file: StateFile = serde_json::from_slice(&input_bytes)?;
            let state = file.to_bipartite()?;
            let total = state.dim_a() * state.dim_b();
            let cfg = optimizer_config(common, total);
            let res = match measure {
                "classical-correlation-vn" => {
                    classical_correlation(&state, MeasurementKind::VonNeumann, &cfg)?
                }
                "classical-correlation-povm" => {
                    classical_correlation(&state, MeasurementKind::Povm, &cfg)?
                }
                "discord-vn" => discord(&state, MeasurementKind::VonNeumann, &cfg)?,
                "discord-povm" => discord(&state, MeasurementKind::Povm, &cfg)?,
                "eof" => eof(&state, k, &cfg)?,
                "rel-ent-entanglement" => rel_ent_entanglement(&state, k, &cfg)?,
                "squashed-upper" => squashed_upper(&state, dim_c, classical, &cfg)?,
                "distance-separable" => {
                    let kind = if norm == "trace" { NormKind::Trace } else { NormKind::Frobenius };
                    distance_to_separable(&state, kind, k, &cfg)?
                }
                "cc-extension-gap" => {
                    let dims = ext_dims
                        .map(|d| (d[0], d[1]))
                        .unwrap_or_else(|| default_cc_ext_dims(&state));
                    cc_in_extension_gap(&state, dims, &cfg)?
                }
                other => {
                    return Err(Error::InvalidArgument(format!("unknown measure {other:?}")))
                }
            };
            (res, total)
        }
    };

    let cfg = optimizer_config(common, total_dim);
    let out_file = MeasureResultFile::new(measure, &result, run_config(common, &cfg), digest);
    let path = common.out.join("result.json");
    write_json_atomic(&path, &out_file)?;
    if common.format == Format::Csv {
        let csv = format!(
            "measure,value,bound_direction,converged,starts_within_tol,evaluations\n{},{:.12e},{},{},{},{}\n",
            measure,
            result.value,
            result.bound_direction.as_str(),
            result.optimizer.converged,
            result.optimizer.starts_within_tol,
            result.optimizer.evaluations
        );
        write_bytes_atomic(&common.out.join("result.csv"), csv.as_bytes())?;
    }
    println!(
        "{measure} = {} ({} bound) -> {}",
        result.value,
        result.bound_direction.as_str(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Ancilla defaults from the extension-dimension shape `m^3 n^2 x m^2 n^3`
/// (ancillas `m^2 n^2` on each side); the desk-scale cap usually forces an
/// explicit smaller `--ext-dims`.
fn default_cc_ext_dims(state: &BipartiteState) -> (usize, usize) {
    let anc = (state.dim_a() * state.dim_b()).pow(2);
    (anc, anc)
}

fn report_json(report: &ClassicalityReport) -> serde_json::Value {
    json!({
        "verdict": report.verdict.as_str(),
        "max_commutator_norm": report.max_commutator_norm,
        "max_normality_defect": report.max_normality_defect,
        "witness": report.witness.as_ref().map(|w| {
            MeasurementFile::from_measurement(&qcorr::measurements::Measurement::VonNeumann(w.clone()))
        }),
    })
}

fn cmd_classify(
    input: &Path,
    cc: bool,
    tol_classical: f64,
    common: &CommonOpts,
) -> qcorr::Result<ExitCode> {
    let input_bytes = std::fs::read(input)?;
    let digest = digest_bytes(&input_bytes);
    let file: StateFile = serde_json::from_slice(&input_bytes)?;
    let state = file.to_bipartite()?;
    let (verdict, body) = if cc {
        let report = is_classical_classical(&state, tol_classical)?;
        (
            report.verdict.as_str(),
            json!({
                "schema": io::SCHEMA_VERSION,
                "mode": "cc",
                "verdict": report.verdict.as_str(),
                "tolerance": tol_classical,
                "b_side": report_json(&report.b_side),
                "a_side": report_json(&report.a_side),
                "input_digest": digest,
            }),
        )
    } else {
        let report = is_quantum_classical(&state, tol_classical)?;
        let mut body = report_json(&report);
        let obj = body.as_object_mut().expect("object");
        obj.insert("schema".into(), json!(io::SCHEMA_VERSION));
        obj.insert("mode".into(), json!("qc"));
        obj.insert("tolerance".into(), json!(tol_classical));
        obj.insert("input_digest".into(), json!(digest));
        (
            if body["verdict"] == "classical" { "classical" } else { "not-classical" },
            body,
        )
    };
    let path = common.out.join("classify.json");
    write_json_atomic(&path, &body)?;
    println!("{verdict} -> {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(
    kind: &str,
    input: &Path,
    dim_c: Option<usize>,
    measurement_kind: &str,
    ext_dims: Option<Vec<usize>>,
    common: &CommonOpts,
) -> qcorr::Result<ExitCode> {
    let input_bytes = std::fs::read(input)?;
    let provenance = Some(digest_bytes(&input_bytes));
    let instance: InstanceFile = serde_json::from_slice(&input_bytes)?;
    let out_instance = match kind {
        "sep-to-eof" => {
            let inst = instance.to_separability()?;
            InstanceFile::from_eof(&qcorr::reductions::sep_to_eof(&inst), provenance)
        }
        "eof-to-discord" => {
            let inst = instance.to_eof()?;
            let mk = measurement_kind_from_str(measurement_kind)?;
            InstanceFile::from_discord(&eof_to_discord(&inst, dim_c, mk)?, provenance)
        }
        "eof-to-holevo" => {
            let inst = instance.to_eof()?;
            InstanceFile::from_holevo(&eof_to_holevo(&inst)?, provenance)
        }
        "sep-to-k" => {
            let inst = instance.to_separability()?;
            let dims = ext_dims
                .map(|d| (d[0], d[1]))
                .unwrap_or_else(|| {
                    let anc = (inst.state.dim_a() * inst.state.dim_b()).pow(2);
                    (anc, anc)
                });
            InstanceFile::from_k(&sep_to_k(&inst, dims)?, provenance)
        }
        other => return Err(Error::InvalidArgument(format!("unknown reduction {other:?}"))),
    };
    let path = common.out.join("instance.json");
    write_json_atomic(&path, &out_instance)?;
    println!("{} -> {}", out_instance.kind_name(), path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, count: usize, common: &CommonOpts) -> qcorr::Result<ExitCode> {
    let name = SuiteName::parse(suite)?;
    let cfg = optimizer_config(common, 4);
    let report = run_suite(name, common.seed, count, &cfg)?;
    write_json_atomic(&common.out.join("report.json"), &report)?;
    write_bytes_atomic(&common.out.join("cases.csv"), report.to_csv().as_bytes())?;
    println!(
        "{}: {} (worst residual {:.3e}, tolerance {:.3e}, {} cases) -> {}",
        name.as_str(),
        if report.pass { "PASS" } else { "FAIL" },
        report.worst_residual,
        report.tolerance,
        report.count,
        common.out.join("report.json").display()
    );
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_random(
    kind: &str,
    dims: &[usize],
    rank: Option<usize>,
    terms: Option<usize>,
    count: usize,
    common: &CommonOpts,
) -> qcorr::Result<ExitCode> {
    let (m, n) = (dims[0], dims[1]);
    if m < 1 || n < 1 || m * n > 64 {
        return Err(Error::InvalidArgument(format!(
            "dims {m}x{n} outside the supported range (total <= 64)"
        )));
    }
    for index in 0..count {
        let mut rng = stream_rng(common.seed, index as u64);
        let path = common.out.join(format!("{kind}-{index:03}.json"));
        match kind {
            "pure" => {
                let psi = random_pure_state_with(m * n, &mut rng);
                write_json_atomic(&path, &PureStateFile::new(vec![m, n], &psi))?;
            }
            "haar-mixed" => {
                let r = rank.unwrap_or(m * n);
                let st = random_bipartite_with(m, n, r, &mut rng)?;
                write_json_atomic(&path, &StateFile::from_bipartite(&st))?;
            }
            "qc" => {
                let st = random_qc_state(m, n, &mut rng)?;
                write_json_atomic(&path, &StateFile::from_bipartite(&st))?;
            }
            "cc" => {
                let st = random_cc_state(m, n, &mut rng)?;
                write_json_atomic(&path, &StateFile::from_bipartite(&st))?;
            }
            "separable" => {
                let t = terms.unwrap_or(m * n);
                let st = random_separable(m, n, t, &mut rng)?;
                write_json_atomic(&path, &StateFile::from_bipartite(&st))?;
            }
            other => return Err(Error::InvalidArgument(format!("unknown kind {other:?}"))),
        }
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
