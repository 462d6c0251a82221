//! `evuni` — decide and probe eventual universality of qudit gate sets.
//!
//! Subcommands: `analyze` (full decision scan), `bound` (register-count
//! bounds), `jeandel` (controlled-involution families), `dioph` (exact
//! Diophantine scans), `moments` (single moment computations). Reports go
//! to stdout as JSON; human-readable summaries go to stderr. Exit codes:
//! 0 decided/passed, 2 undecided/inconclusive, 1 error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use evuni::diophantine::{
    scan_cohn, scan_lie_type, scan_repunit, RepunitSign, DEFAULT_COHN_K_MAX, DEFAULT_COHN_Y_MAX,
    DEFAULT_COHN_Z_MAX, DEFAULT_LIE_D_MAX, DEFAULT_LIE_K_MAX, DEFAULT_LIE_N_MAX,
    DEFAULT_REPUNIT_MINUS_N_MAX, DEFAULT_REPUNIT_MINUS_Q_MAX, DEFAULT_REPUNIT_MINUS_X_MAX,
    DEFAULT_REPUNIT_PLUS_N_MAX, DEFAULT_REPUNIT_PLUS_Q_MAX, DEFAULT_REPUNIT_PLUS_X_MAX,
};
use evuni::gateset::{gamma_family, load_gateset, FamilyMode, GateSet};
use evuni::jeandel::{
    activation_multiplicity, build_family, compile_and_verify, default_omega_gateset,
    family_as_gateset, invariance_witness, CompileReport, WitnessReport,
};
use evuni::moments::{exact_moment, frame_potential_mc, McOptions};
use evuni::report::{sha256_hex, AnalysisReport, Timings};
use evuni::universality::{bound_ivanyos, bound_new, decide_eventual, DecisionOptions};
use evuni::Limits;

#[derive(Parser)]
#[command(
    name = "evuni",
    version,
    about = "Decide and probe eventual universality of finite qudit gate sets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scan register counts and decide eventual universality of a gate set.
    Analyze(AnalyzeArgs),
    /// Print the register-count bound d⁴(n−1)+1 (or the eighth-moment one).
    Bound(BoundArgs),
    /// Build or verify controlled-involution gate families.
    Jeandel {
        #[command(subcommand)]
        cmd: JeandelCmd,
    },
    /// Exact bounded scans of the classification Diophantine equations.
    Dioph {
        #[command(subcommand)]
        cmd: DiophCmd,
    },
    /// Compute one moment of a promoted gate set.
    Moments(MomentsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliFamilyMode {
    /// Gates on the leading registers plus adjacent swaps.
    SwapForm,
    /// One embedded gate copy per ordered target tuple.
    FullOrbit,
}

impl CliFamilyMode {
    fn to_mode(self) -> FamilyMode {
        match self {
            CliFamilyMode::SwapForm => FamilyMode::SwapForm,
            CliFamilyMode::FullOrbit => FamilyMode::FullOrbit,
        }
    }

    fn name(self) -> &'static str {
        match self {
            CliFamilyMode::SwapForm => "swap-form",
            CliFamilyMode::FullOrbit => "full-orbit",
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Gate-set JSON file.
    file: PathBuf,
    /// Highest register count to scan; default is the largest count whose
    /// exact moment fits the resource limits.
    #[arg(long = "n-max")]
    n_max: Option<u32>,
    /// Master seed for all randomized components.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Monte-Carlo fallback samples for register counts whose exact moment
    /// is out of reach; 0 disables the fallback.
    #[arg(long = "mc-samples", default_value_t = 0)]
    mc_samples: u64,
    /// Word length for the Monte-Carlo fallback.
    #[arg(long = "mc-wordlen", default_value_t = 200)]
    mc_wordlen: u32,
    /// Override the dense materialization threshold.
    #[arg(long = "dense-threshold")]
    dense_threshold: Option<usize>,
    /// Generator family shape.
    #[arg(long, value_enum, default_value_t = CliFamilyMode::SwapForm)]
    mode: CliFamilyMode,
}

#[derive(Args)]
struct BoundArgs {
    /// Local dimension d ≥ 2.
    d: u32,
    /// Gate arity n ≥ 1.
    n: u32,
    /// Print the eighth-moment bound d⁸(n−1)+1 instead.
    #[arg(long)]
    ivanyos: bool,
}

#[derive(Subcommand)]
enum JeandelCmd {
    /// Build the family B_k and emit it in the gate-set format.
    Build(JeandelBuildArgs),
    /// Run the parity, compilation, and fixed-subspace checks.
    Verify(JeandelVerifyArgs),
}

#[derive(Args)]
struct JeandelBuildArgs {
    /// Control count k ≥ 2.
    k: u32,
    /// Two-qubit involution set to control; defaults to the built-in Ω.
    #[arg(long)]
    omega: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "dense-threshold")]
    dense_threshold: Option<usize>,
}

#[derive(Args)]
struct JeandelVerifyArgs {
    /// Control count k ≥ 2.
    k: u32,
    /// Two-qubit involution set to control; defaults to the built-in Ω.
    #[arg(long)]
    omega: Option<PathBuf>,
    #[arg(long = "dense-threshold")]
    dense_threshold: Option<usize>,
}

#[derive(Subcommand)]
enum DiophCmd {
    /// d^N = (3^k ± 1)/2 and the alternating two-power branch.
    LieType(LieTypeArgs),
    /// Perfect powers among generalized repunits y^q = (x^n ∓ 1)/(x ∓ 1).
    Repunit(RepunitArgs),
    /// y² − 2z^k = −1 with k > 2.
    Cohn(CohnArgs),
}

#[derive(Args)]
struct LieTypeArgs {
    #[arg(long = "d-max", default_value_t = DEFAULT_LIE_D_MAX)]
    d_max: u64,
    #[arg(long = "n-max", default_value_t = DEFAULT_LIE_N_MAX)]
    n_max: u32,
    #[arg(long = "k-max", default_value_t = DEFAULT_LIE_K_MAX)]
    k_max: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliSign {
    Minus,
    Plus,
}

#[derive(Args)]
struct RepunitArgs {
    #[arg(long, value_enum, default_value_t = CliSign::Minus)]
    sign: CliSign,
    /// Base bound; defaults depend on the sign.
    #[arg(long = "x-max")]
    x_max: Option<u64>,
    #[arg(long = "n-max")]
    n_max: Option<u32>,
    #[arg(long = "q-max")]
    q_max: Option<u32>,
}

#[derive(Args)]
struct CohnArgs {
    #[arg(long = "y-max", default_value_t = DEFAULT_COHN_Y_MAX)]
    y_max: u64,
    #[arg(long = "z-max", default_value_t = DEFAULT_COHN_Z_MAX)]
    z_max: u64,
    #[arg(long = "k-max", default_value_t = DEFAULT_COHN_K_MAX)]
    k_max: u32,
}

#[derive(Args)]
struct MomentsArgs {
    /// Gate-set JSON file.
    file: PathBuf,
    /// Register count N.
    #[arg(value_name = "N")]
    registers: u32,
    /// Moment half-order k: the report concerns |tr|^{2k}.
    k: u32,
    /// Compute the exact moment (default).
    #[arg(long, conflicts_with = "mc")]
    exact: bool,
    /// Estimate by Monte Carlo instead.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 200)]
    wordlen: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CliFamilyMode::SwapForm)]
    mode: CliFamilyMode,
    #[arg(long = "dense-threshold")]
    dense_threshold: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .downcast_ref::<evuni::Error>()
                .map(|le| if le.is_inconclusive() { 2 } else { 1 })
                .unwrap_or(1);
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Analyze(args) => cmd_analyze(args),
        Cmd::Bound(args) => cmd_bound(args),
        Cmd::Jeandel { cmd } => match cmd {
            JeandelCmd::Build(args) => cmd_jeandel_build(args),
            JeandelCmd::Verify(args) => cmd_jeandel_verify(args),
        },
        Cmd::Dioph { cmd } => match cmd {
            DiophCmd::LieType(args) => cmd_dioph_lie(args),
            DiophCmd::Repunit(args) => cmd_dioph_repunit(args),
            DiophCmd::Cohn(args) => cmd_dioph_cohn(args),
        },
        Cmd::Moments(args) => cmd_moments(args),
    }
}

fn limits_with_override(dense_threshold: Option<usize>) -> Limits {
    let mut limits = Limits::from_env();
    if let Some(t) = dense_threshold {
        limits.dense_threshold = t;
    }
    limits
}

fn load_gateset_file(path: &Path, limits: &Limits) -> anyhow::Result<(GateSet, String)> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = sha256_hex(&raw);
    let text = String::from_utf8(raw).context("gate-set file is not UTF-8")?;
    let gs = load_gateset(&text, limits)
        .with_context(|| format!("loading gate set from {}", path.display()))?;
    Ok((gs, digest))
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<u8> {
    let limits = limits_with_override(args.dense_threshold);
    let (gs, digest) = load_gateset_file(&args.file, &limits)?;
    let opts = DecisionOptions {
        family_mode: args.mode.to_mode(),
        max_registers: args.n_max,
        seed: args.seed,
        mc_fallback: (args.mc_samples > 0).then_some(McOptions {
            samples: args.mc_samples,
            word_length: args.mc_wordlen,
            seed: args.seed,
        }),
        ..DecisionOptions::default()
    };
    let t0 = Instant::now();
    let decision = decide_eventual(&gs, &opts, &limits)?;
    let timings = Timings {
        total_ms: t0.elapsed().as_millis(),
    };
    let report = AnalysisReport::new(digest, args.seed, args.mode.name(), decision, timings);
    println!("{}", serde_json::to_string_pretty(&report)?);
    eprintln!("verdict: {}", report.verdict);
    for c in &report.caveats {
        eprintln!("caveat: {c}");
    }
    Ok(if report.decided() { 0 } else { 2 })
}

fn cmd_bound(args: BoundArgs) -> anyhow::Result<u8> {
    let b = if args.ivanyos {
        bound_ivanyos(args.d, args.n)?
    } else {
        bound_new(args.d, args.n)?
    };
    println!("{b}");
    Ok(0)
}

fn cmd_jeandel_build(args: JeandelBuildArgs) -> anyhow::Result<u8> {
    let limits = limits_with_override(args.dense_threshold);
    let omega = match &args.omega {
        Some(path) => load_gateset_file(path, &limits)?.0,
        None => default_omega_gateset(&limits)?,
    };
    let fam = build_family(&omega, args.k, &limits)?;
    let out = family_as_gateset(&fam, &limits)?.to_json();
    match &args.out {
        Some(path) => {
            fs::write(path, &out).with_context(|| format!("writing {}", path.display()))?;
            eprintln!(
                "wrote {} gates on {} qubits to {}",
                fam.gates.len(),
                fam.gate_arity(),
                path.display()
            );
        }
        None => println!("{out}"),
    }
    Ok(0)
}

#[derive(Serialize)]
struct ParityRow {
    weight: u32,
    multiplicity: String,
    odd: bool,
}

#[derive(Serialize)]
struct JeandelVerifyReport {
    k: u32,
    parity_holds: bool,
    parity: Vec<ParityRow>,
    compile: Option<CompileReport>,
    compile_skipped: Option<String>,
    witness: Option<WitnessReport>,
    witness_skipped: Option<String>,
    all_passed: bool,
}

fn cmd_jeandel_verify(args: JeandelVerifyArgs) -> anyhow::Result<u8> {
    let limits = limits_with_override(args.dense_threshold);
    let omega = match &args.omega {
        Some(path) => load_gateset_file(path, &limits)?.0,
        None => default_omega_gateset(&limits)?,
    };
    let k = args.k;
    let fam = build_family(&omega, k, &limits)?;

    let parity: Vec<ParityRow> = (0..=(2 * k - 1))
        .map(|z| {
            let m = activation_multiplicity(k, z);
            ParityRow {
                weight: z,
                odd: m.bit(0),
                multiplicity: m.to_string(),
            }
        })
        .collect();
    let parity_holds = parity.iter().all(|r| r.odd);

    let (compile, compile_skipped) = if !k.is_power_of_two() {
        (
            None,
            Some(format!(
                "skipped: k = {k} is not a power of two, so the compile identity is not \
                 expected to hold"
            )),
        )
    } else {
        match compile_and_verify(&fam, &limits) {
            Ok(rep) => (Some(rep), None),
            Err(evuni::Error::ResourceLimit { requested, limit, .. }) => (
                None,
                Some(format!(
                    "skipped: compile dimension {requested} exceeds the dense threshold {limit}"
                )),
            ),
            Err(e) => return Err(e.into()),
        }
    };

    let (witness, witness_skipped) = if k < 4 {
        (
            None,
            Some(format!(
                "skipped: the fixed-subspace witness needs k ≥ 4, got k = {k}"
            )),
        )
    } else {
        match invariance_witness(&fam, &limits) {
            Ok(rep) => (Some(rep), None),
            Err(evuni::Error::ResourceLimit { requested, limit, .. }) => (
                None,
                Some(format!(
                    "skipped: witness dimension {requested} exceeds the dense threshold {limit}"
                )),
            ),
            Err(e) => return Err(e.into()),
        }
    };

    let all_passed = parity_holds
        && compile.as_ref().is_none_or(|c| c.all_passed)
        && witness.as_ref().is_none_or(|w| w.passed);

    let report = JeandelVerifyReport {
        k,
        parity_holds,
        parity,
        compile,
        compile_skipped,
        witness,
        witness_skipped,
        all_passed,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(msg) = &report.compile_skipped {
        eprintln!("compile: {msg}");
    }
    if let Some(msg) = &report.witness_skipped {
        eprintln!("witness: {msg}");
    }
    eprintln!(
        "jeandel verify k={k}: {}",
        if report.all_passed { "all checks passed" } else { "FAILED" }
    );
    Ok(if report.all_passed { 0 } else { 1 })
}

fn print_json_lines<T: Serialize>(items: &[T]) -> anyhow::Result<()> {
    for item in items {
        println!("{}", serde_json::to_string(item)?);
    }
    Ok(())
}

fn cmd_dioph_lie(args: LieTypeArgs) -> anyhow::Result<u8> {
    let sols = scan_lie_type(args.d_max, args.n_max, args.k_max);
    print_json_lines(&sols)?;
    eprintln!(
        "lie-type scan d ≤ {}, N ≤ {}, k ≤ {}: {} solution(s) (verified within bounds)",
        args.d_max,
        args.n_max,
        args.k_max,
        sols.len()
    );
    Ok(0)
}

fn cmd_dioph_repunit(args: RepunitArgs) -> anyhow::Result<u8> {
    let (sign, x_def, n_def, q_def) = match args.sign {
        CliSign::Minus => (
            RepunitSign::Minus,
            DEFAULT_REPUNIT_MINUS_X_MAX,
            DEFAULT_REPUNIT_MINUS_N_MAX,
            DEFAULT_REPUNIT_MINUS_Q_MAX,
        ),
        CliSign::Plus => (
            RepunitSign::Plus,
            DEFAULT_REPUNIT_PLUS_X_MAX,
            DEFAULT_REPUNIT_PLUS_N_MAX,
            DEFAULT_REPUNIT_PLUS_Q_MAX,
        ),
    };
    let x_max = args.x_max.unwrap_or(x_def);
    let n_max = args.n_max.unwrap_or(n_def);
    let q_max = args.q_max.unwrap_or(q_def);
    let sols = scan_repunit(x_max, n_max, q_max, sign);
    print_json_lines(&sols)?;
    eprintln!(
        "repunit scan x ≤ {x_max}, n ≤ {n_max}, q ≤ {q_max}: {} solution(s) (verified within bounds)",
        sols.len()
    );
    Ok(0)
}

fn cmd_dioph_cohn(args: CohnArgs) -> anyhow::Result<u8> {
    let sols = scan_cohn(args.y_max, args.z_max, args.k_max);
    print_json_lines(&sols)?;
    eprintln!(
        "cohn scan y ≤ {}, z ≤ {}, k ≤ {}: {} solution(s) (verified within bounds)",
        args.y_max,
        args.z_max,
        args.k_max,
        sols.len()
    );
    Ok(0)
}

fn cmd_moments(args: MomentsArgs) -> anyhow::Result<u8> {
    let limits = limits_with_override(args.dense_threshold);
    let (gs, _digest) = load_gateset_file(&args.file, &limits)?;
    let fam = gamma_family(&gs, args.registers, args.mode.to_mode(), &limits)?;
    let report = if args.mc {
        let opts = McOptions {
            samples: args.samples,
            word_length: args.wordlen,
            seed: args.seed,
        };
        frame_potential_mc(&fam, args.k, &opts, &limits)?
    } else {
        exact_moment(&fam, args.k, &limits)?
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    match (&report.exact, &report.estimate) {
        (Some(v), _) => eprintln!("M_{} = {v} (exact)", 2 * args.k),
        (None, Some(est)) => eprintln!(
            "M_{} ≈ {:.6} ± {:.6} ({} samples)",
            2 * args.k,
            est.value,
            est.std_err,
            est.samples
        ),
        (None, None) => eprintln!("no value computed"),
    }
    Ok(0)
}
