//! Command-line surface: spectrum sampling, density-of-states estimation,
//! invariant verification, schedule compilation and instance generation.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 usage or parse error,
//! 3 numeric failure.

mod artifacts;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use artifacts::{
    content_hash, histogram_csv, spectrum_csv, to_pretty_json, ArtifactSet, GapEntry,
    GapReportFile, RunManifest,
};
use specfind_core::verify::{run_verification, VerifyOptions};
use specfind_core::*;

use std::result::Result;

#[derive(Parser)]
#[command(
    name = "specfind",
    version,
    about = "Spectrum and density-of-states estimation for spin-pair Hamiltonians via averaged pulse sequences and phase estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run phase estimation on a Hamiltonian document and sample readouts
    Spectrum(SpectrumArgs),
    /// Estimate the density of states and report spectral gaps
    Dos(DosArgs),
    /// Run the invariant suite against an instance
    Verify(VerifyArgs),
    /// Compile a pulse schedule and emit its symbolic average
    CompileSchedule(CompileArgs),
    /// Emit a seeded random Hamiltonian document
    Random(RandomArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Ideal,
    Pulse,
}

#[derive(Args)]
struct CommonRunArgs {
    /// Hamiltonian document (JSON)
    input: PathBuf,
    /// Directory receiving the output files
    #[arg(long)]
    out_dir: PathBuf,
    /// Ancilla register size
    #[arg(long, default_value_t = 6)]
    m: usize,
    /// Sample count
    #[arg(long, default_value_t = 4096)]
    shots: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Conditional-evolution realization
    #[arg(long, value_enum, default_value_t = Mode::Ideal)]
    mode: Mode,
    /// Conversion step size (pulse mode)
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Inversion cycle count (pulse mode)
    #[arg(long, default_value_t = 8)]
    p: usize,
    /// Schedule cycle repetitions (pulse mode)
    #[arg(long, default_value_t = 8)]
    slices: usize,
    /// Initial target state: eigenstate:i | basis:bits | mixed | thermal:beta
    #[arg(long, default_value = "mixed")]
    init: String,
    /// Spectral-spread bound overriding the coefficient bound
    #[arg(long)]
    delta_override: Option<f64>,
    /// Skip conversion sweep terms whose coupling and matching single-qubit
    /// coefficients are all exactly zero (pulse mode)
    #[arg(long)]
    skip_zero_terms: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonRunArgs,
}

#[derive(Args)]
struct DosArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    /// Emit the exact kernel-mixture distribution instead of sampling
    #[arg(long)]
    exact: bool,
    /// Probability threshold below which a readout bin counts as empty
    #[arg(long, default_value_t = 1e-4)]
    gap_threshold: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Hamiltonian document (JSON); omit when --random is given
    input: Option<PathBuf>,
    /// Seeded instance instead of a document: n,seed
    #[arg(long)]
    random: Option<String>,
    /// Base inversion cycle count (the suite sweeps p, 2p, 4p, 8p)
    #[arg(long, default_value_t = 4)]
    p: usize,
    /// Ancilla register size for the tail-bound check
    #[arg(long, default_value_t = 7)]
    m: usize,
    /// Inversion interval length
    #[arg(long, default_value_t = 0.2)]
    time: f64,
    /// Optional directory for the report file
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// Hamiltonian document (JSON); supplies the register size and the
    /// averaged coefficients
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Decouple a qubit set: comma-separated indices or `all`
    #[arg(long)]
    decouple: Option<String>,
    /// Isolate one coupling component: j,k,alpha,beta
    #[arg(long)]
    isolate: Option<String>,
    /// Sign-inversion cycle for one component: j,k,alpha,beta
    #[arg(long)]
    invert: Option<String>,
    /// Rescaling split for one component: j,k,alpha,beta
    #[arg(long)]
    rescale: Option<String>,
    /// Inversion cycle count
    #[arg(long, default_value_t = 8)]
    p: usize,
    /// Schedule length
    #[arg(long, default_value_t = 1.0)]
    total: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Coefficients are uniform in [-range, range]
    #[arg(long, default_value_t = 1.0)]
    range: f64,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EigConvergence { .. } | Error::NotHermitian { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Dos(args) => cmd_dos(args),
        Command::Verify(args) => cmd_verify(args),
        Command::CompileSchedule(args) => cmd_compile_schedule(args),
        Command::Random(args) => cmd_random(args),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn thread_cap() -> usize {
    std::env::var("SF_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get().min(8))
                .unwrap_or(1)
        })
        .max(1)
}

fn load_document(path: &PathBuf) -> Result<(HamiltonianDocument, PairHamiltonian), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let doc = HamiltonianDocument::parse(&text)?;
    let h = doc.to_hamiltonian()?;
    Ok((doc, h))
}

enum InitSpec {
    Eigenstate(usize),
    Basis(usize),
    Mixed,
    Thermal(f64),
}

fn parse_init(text: &str, n: usize) -> Result<InitSpec, Failure> {
    if text == "mixed" {
        return Ok(InitSpec::Mixed);
    }
    if let Some(rest) = text.strip_prefix("eigenstate:") {
        let i = rest
            .parse()
            .map_err(|_| Failure::usage(format!("bad eigenstate index `{rest}`")))?;
        if i >= (1usize << n) {
            return Err(Failure::usage(format!(
                "eigenstate index {i} out of range for n = {n}"
            )));
        }
        return Ok(InitSpec::Eigenstate(i));
    }
    if let Some(bits) = text.strip_prefix("basis:") {
        if bits.len() != n || bits.chars().any(|c| c != '0' && c != '1') {
            return Err(Failure::usage(format!(
                "basis string `{bits}` must be {n} binary digits (rightmost = qubit 0)"
            )));
        }
        let index = bits
            .chars()
            .rev()
            .enumerate()
            .filter(|(_, c)| *c == '1')
            .fold(0usize, |acc, (q, _)| acc | 1 << q);
        return Ok(InitSpec::Basis(index));
    }
    if let Some(rest) = text.strip_prefix("thermal:") {
        let beta: f64 = rest
            .parse()
            .map_err(|_| Failure::usage(format!("bad inverse temperature `{rest}`")))?;
        if beta < 0.0 {
            return Err(Failure::usage("inverse temperature must be nonnegative"));
        }
        return Ok(InitSpec::Thermal(beta));
    }
    Err(Failure::usage(format!(
        "unknown --init `{text}` (expected eigenstate:<i> | basis:<bits> | mixed | thermal:<beta>)"
    )))
}

fn build_initial(h: &PairHamiltonian, spec: &InitSpec) -> Result<InitialState, Failure> {
    match *spec {
        InitSpec::Mixed => Ok(Preparation::MaximallyMixed.to_state(h)?),
        InitSpec::Thermal(beta) => Ok(Preparation::Thermal(beta).to_state(h)?),
        InitSpec::Basis(index) => Ok(InitialState::Pure(QuantumState::basis(h.n(), index)?)),
        InitSpec::Eigenstate(i) => {
            let (_, state) = h.eigenstate(i)?;
            Ok(InitialState::Pure(state))
        }
    }
}

struct RunSetup {
    cfg: PeConfig,
    initial: InitialState,
    config_echo: serde_json::Value,
}

fn prepare_run(common: &CommonRunArgs, h: &PairHamiltonian) -> Result<RunSetup, Failure> {
    if common.shots < 1 {
        return Err(Failure::usage("--shots must be at least 1"));
    }
    let (delta, delta_source) = match common.delta_override {
        Some(d) => (d, "override"),
        None => (h.spread_bound(), "spread_bound"),
    };
    let mode = match common.mode {
        Mode::Ideal => QpeMode::Ideal,
        Mode::Pulse => {
            let mut params = ConversionParams::new(
                common.epsilon,
                common.p,
                common.slices,
                EvolutionMode::PulseLevel,
            )?;
            params.skip_zero_terms = common.skip_zero_terms;
            QpeMode::PulseLevel(params)
        }
    };
    let cfg = PeConfig::from_spread(common.m, delta, mode, common.shots, common.seed)?;
    let init_spec = parse_init(&common.init, h.n())?;
    let initial = build_initial(h, &init_spec)?;
    let config_echo = json!({
        "m": common.m,
        "tau": cfg.base_time,
        "delta": delta,
        "delta_source": delta_source,
        "shots": common.shots,
        "seed": common.seed,
        "mode": match common.mode { Mode::Ideal => "ideal", Mode::Pulse => "pulse" },
        "epsilon": common.epsilon,
        "inversion_slices": common.p,
        "schedule_slices": common.slices,
        "skip_zero_terms": common.skip_zero_terms,
        "init": common.init,
    });
    Ok(RunSetup {
        cfg,
        initial,
        config_echo,
    })
}

fn finish(
    args_out_dir: &std::path::Path,
    subcommand: &str,
    config: serde_json::Value,
    input_hash: String,
    seed: u64,
    mut set: ArtifactSet,
    started: Instant,
) -> Result<ExitCode, Failure> {
    let mut outputs = set.names();
    outputs.push("manifest.json".to_string());
    let manifest = RunManifest::new(
        subcommand,
        config,
        input_hash,
        seed,
        outputs,
        resolved_conventions().describe(),
        started.elapsed().as_secs_f64() * 1e3,
    );
    set.insert("manifest.json", to_pretty_json(&manifest) + "\n");
    set.write_all(args_out_dir)
        .map_err(|e| Failure::numeric(format!("cannot write outputs: {e}")))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let (doc, h) = load_document(&args.common.input)?;
    let setup = prepare_run(&args.common, &h)?;
    let hist = sample_qpe_with_threads(&h, &setup.initial, &setup.cfg, thread_cap())?;
    let (values, _) = hermitian_eig(&h.to_dense())?;

    let mut set = ArtifactSet::new();
    set.insert("histogram.csv", histogram_csv(&hist));
    set.insert("spectrum.csv", spectrum_csv(&values));
    finish(
        &args.common.out_dir,
        "spectrum",
        setup.config_echo,
        content_hash(doc.to_json().as_bytes()),
        args.common.seed,
        set,
        started,
    )
}

fn cmd_dos(args: DosArgs) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let (doc, h) = load_document(&args.common.input)?;
    let setup = prepare_run(&args.common, &h)?;
    let prep = match parse_init(&args.common.init, h.n())? {
        InitSpec::Mixed => Preparation::MaximallyMixed,
        InitSpec::Thermal(beta) => Preparation::Thermal(beta),
        _ => {
            return Err(Failure::usage(
                "density-of-states runs take --init mixed or thermal:<beta>",
            ))
        }
    };
    let hist = density_of_states(&h, prep, &setup.cfg, args.exact)?;
    let gaps = gap_report(&hist, args.gap_threshold);

    let mut config = setup.config_echo;
    config["exact"] = json!(args.exact);
    config["gap_threshold"] = json!(args.gap_threshold);

    let mut set = ArtifactSet::new();
    set.insert("histogram.csv", histogram_csv(&hist));
    set.insert(
        "gaps.json",
        to_pretty_json(&GapReportFile {
            threshold: args.gap_threshold,
            gaps: gaps
                .into_iter()
                .map(|(start_energy, end_energy)| GapEntry {
                    start_energy,
                    end_energy,
                })
                .collect(),
        }) + "\n",
    );
    finish(
        &args.common.out_dir,
        "dos",
        config,
        content_hash(doc.to_json().as_bytes()),
        args.common.seed,
        set,
        started,
    )
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    if args.p < 1 {
        return Err(Failure::usage("--p must be at least 1"));
    }
    if args.m < 1 {
        return Err(Failure::usage("--m must be at least 1"));
    }
    if args.time <= 0.0 {
        return Err(Failure::usage("--time must be positive"));
    }
    let (h, input_hash, seed, instance) = match (&args.input, &args.random) {
        (Some(path), None) => {
            let (doc, h) = load_document(path)?;
            (
                h,
                content_hash(doc.to_json().as_bytes()),
                0,
                json!({ "document": path.display().to_string() }),
            )
        }
        (None, Some(spec)) => {
            let (n, seed) = spec
                .split_once(',')
                .and_then(|(n, s)| Some((n.trim().parse().ok()?, s.trim().parse().ok()?)))
                .ok_or_else(|| Failure::usage("--random expects <n>,<seed>"))?;
            let h = PairHamiltonian::random(n, seed, 1.0)?;
            let doc = HamiltonianDocument::from_hamiltonian(&h);
            (
                h,
                content_hash(doc.to_json().as_bytes()),
                seed,
                json!({ "random_n": n, "random_seed": seed }),
            )
        }
        _ => {
            return Err(Failure::usage(
                "verify takes exactly one of an input document or --random <n>,<seed>",
            ))
        }
    };
    let opts = VerifyOptions {
        inversion_slices: vec![args.p, 2 * args.p, 4 * args.p, 8 * args.p],
        inversion_time: args.time,
        ancilla_count: args.m,
        ..VerifyOptions::default()
    };
    let report = run_verification(&h, &opts)?;
    let rendered = report.to_json();
    println!("{rendered}");
    if let Some(dir) = &args.out_dir {
        let mut set = ArtifactSet::new();
        set.insert("verify.json", rendered.clone() + "\n");
        let config = json!({
            "instance": instance,
            "p_sweep": opts.inversion_slices,
            "inversion_time": opts.inversion_time,
            "m": opts.ancilla_count,
        });
        finish(dir, "verify", config, input_hash, seed, set, started)?;
    }
    if report.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn parse_pair_axes(spec: &str) -> Result<(usize, usize, PauliAxis, PauliAxis), Failure> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Failure::usage(format!(
            "expected <j>,<k>,<alpha>,<beta>, got `{spec}`"
        )));
    }
    let j = parts[0]
        .parse()
        .map_err(|_| Failure::usage(format!("bad qubit index `{}`", parts[0])))?;
    let k = parts[1]
        .parse()
        .map_err(|_| Failure::usage(format!("bad qubit index `{}`", parts[1])))?;
    let alpha = parts[2]
        .chars()
        .next()
        .and_then(PauliAxis::parse)
        .ok_or_else(|| Failure::usage(format!("bad axis `{}`", parts[2])))?;
    let beta = parts[3]
        .chars()
        .next()
        .and_then(PauliAxis::parse)
        .ok_or_else(|| Failure::usage(format!("bad axis `{}`", parts[3])))?;
    Ok((j, k, alpha, beta))
}

fn cmd_compile_schedule(args: CompileArgs) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let (doc, h) = load_document(&args.input)?;
    let n = h.n();
    if args.total <= 0.0 {
        return Err(Failure::usage("--total must be positive"));
    }
    let selections = [
        args.decouple.is_some(),
        args.isolate.is_some(),
        args.invert.is_some(),
        args.rescale.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if selections != 1 {
        return Err(Failure::usage(
            "pick exactly one of --decouple, --isolate, --invert, --rescale",
        ));
    }
    let (schedule, construction) = if let Some(spec) = &args.decouple {
        let m: Vec<usize> = if spec == "all" {
            (0..n).collect()
        } else {
            spec.split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Failure::usage(format!("bad qubit index `{s}`")))
                })
                .collect::<Result<_, _>>()?
        };
        (
            decoupling_schedule(n, &m, args.total)?,
            json!({ "decouple": m }),
        )
    } else if let Some(spec) = &args.isolate {
        let (j, k, alpha, beta) = parse_pair_axes(spec)?;
        (
            isolate_pair_schedule(n, j, k, alpha, beta, args.total)?,
            json!({ "isolate": spec }),
        )
    } else if let Some(spec) = &args.invert {
        let (j, k, alpha, beta) = parse_pair_axes(spec)?;
        if args.p < 1 {
            return Err(Failure::usage("--p must be at least 1"));
        }
        (
            inversion_schedule(n, j, k, alpha, beta, args.total, args.p)?,
            json!({ "invert": spec, "p": args.p }),
        )
    } else {
        let spec = args.rescale.as_ref().unwrap();
        let (j, k, alpha, beta) = parse_pair_axes(spec)?;
        (
            rescale_schedule(n, j, k, alpha, beta, args.total)?,
            json!({ "rescale": spec }),
        )
    };

    let average = symbolic_average(&schedule, &h)?;
    let average_doc = HamiltonianDocument::from_hamiltonian(&average);

    let mut set = ArtifactSet::new();
    set.insert("schedule.txt", schedule.dump());
    set.insert("average.json", average_doc.to_json() + "\n");
    let config = json!({
        "construction": construction,
        "total": args.total,
        "segments": schedule.segments().len(),
    });
    finish(
        &args.out_dir,
        "compile-schedule",
        config,
        content_hash(doc.to_json().as_bytes()),
        args.seed,
        set,
        started,
    )
}

fn cmd_random(args: RandomArgs) -> Result<ExitCode, Failure> {
    let h = PairHamiltonian::random(args.n, args.seed, args.range)?;
    let doc = HamiltonianDocument::from_hamiltonian(&h);
    let rendered = doc.to_json() + "\n";
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Failure::numeric(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}
