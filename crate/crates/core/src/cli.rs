//! `hpcc` command-line front end.
//!
//! Exit codes: 0 success, 1 verification or simulation failure, 2 usage or
//! parameter error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{self, converse_bound, write_sweep, DEFAULT_ALPHA_STEP, DEFAULT_BOUND_SAMPLES};
use crate::combin::subsets;
use crate::designs::Design;
use crate::engine::{format_ratio, Delivery, EngineError, Simulator};
use crate::hppda::{
    find_zeta, man_hppda, tdesign_hppda, verify_hppda, HpPda, HpPdaError, VerifyMode,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

type CliResult = Result<i32, CliError>;

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "hpcc", version, about = "Hotplug coded caching with placement delivery arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an HpPDA bundle and print "K K' F F' Z Z' S".
    #[command(subcommand)]
    Construct(Construct),
    /// Check every HpPDA condition of a bundle.
    Verify(VerifyArgs),
    /// Run placement, delivery and decoding over seeded random files.
    Simulate(SimulateArgs),
    /// Rate-memory points of an HpPDA family plus the converse bound, as CSV.
    Sweep(SweepArgs),
    /// Evaluate or sample the converse bound.
    Bound(BoundArgs),
    /// Verify a t-design file and print its block counts.
    Design(DesignArgs),
    /// Replay the two worked examples and compare with the golden outputs.
    Demo(DemoArgs),
}

#[derive(Debug, Subcommand)]
enum Construct {
    /// MAN family.
    Man {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "Kp")]
        kp: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Family built from a t-design file.
    Tdesign {
        #[arg(long)]
        design: PathBuf,
        /// a_1,...,a_(t-1)
        #[arg(long, value_delimiter = ',')]
        a: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exhaustive,
    Sample,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    bundle: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    bundle: PathBuf,
    /// Number of files in the library.
    #[arg(long = "N")]
    n: usize,
    /// Active users, comma-separated, 1-based.
    #[arg(long, value_delimiter = ',')]
    tau: Vec<usize>,
    /// Demanded files aligned with --tau.
    #[arg(long, value_delimiter = ',')]
    demands: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Every active set with random, all-equal and all-distinct demands.
    #[arg(long)]
    exhaustive: bool,
    /// Random demand vectors per active set in exhaustive mode.
    #[arg(long, default_value_t = 20)]
    random_demands: usize,
    /// Write the transmissions as hex to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Bundle files sharing (K, K').
    #[arg(long, value_delimiter = ',')]
    bundles: Vec<PathBuf>,
    /// Use the MAN family with this K instead of bundles.
    #[arg(long = "man-K")]
    man_k: Option<usize>,
    #[arg(long = "man-Kp")]
    man_kp: Option<usize>,
    /// Levels of the MAN family; defaults to 1..=K'.
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    #[arg(long = "N")]
    n: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ALPHA_STEP)]
    alpha_step: f64,
    #[arg(long, default_value_t = DEFAULT_BOUND_SAMPLES)]
    samples: usize,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "Kp")]
    kp: usize,
    /// Single memory value to evaluate.
    #[arg(long = "M")]
    m: Option<f64>,
    /// CSV of sampled bound values.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BOUND_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA_STEP)]
    alpha_step: f64,
}

#[derive(Debug, Args)]
struct DesignArgs {
    design: PathBuf,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// Write the replay to this directory instead of comparing.
    #[arg(long)]
    write_golden: Option<PathBuf>,
}

/// Parse `args` (including the program name) and run.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Construct(c) => cmd_construct(c, out),
        Command::Verify(a) => with_jobs(a.jobs, || cmd_verify(&a, out)),
        Command::Simulate(a) => with_jobs(a.jobs, || cmd_simulate(&a, out)),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Bound(a) => cmd_bound(&a, out),
        Command::Design(a) => cmd_design(&a, out),
        Command::Demo(a) => cmd_demo(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn with_jobs(jobs: Option<usize>, f: impl FnOnce() -> CliResult + Send) -> CliResult {
    match jobs {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(usage)?
            .install(f),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_bundle(path: &Path) -> Result<HpPda, CliError> {
    HpPda::from_bundle(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: &mut (dyn Write + Send), text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn cmd_construct(c: Construct, out: &mut (dyn Write + Send)) -> CliResult {
    let (h, path) = match c {
        Construct::Man { k, kp, t, out } => (man_hppda(k, kp, t).map_err(usage)?, out),
        Construct::Tdesign { design, a, out } => {
            let d = Design::parse(&read(&design)?).map_err(usage)?;
            (tdesign_hppda(&d, &a).map_err(usage)?, out)
        }
    };
    if let Some(path) = path {
        fs::write(&path, h.to_bundle()).map_err(|e| CliError::Failure(e.to_string()))?;
    }
    emit(out, &format!("{}\n", h.params()))?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut (dyn Write + Send)) -> CliResult {
    let h = load_bundle(&a.bundle)?;
    let mode = match a.mode {
        ModeArg::Auto => VerifyMode::Auto,
        ModeArg::Exhaustive => VerifyMode::Exhaustive,
        ModeArg::Sample => VerifyMode::Sample {
            count: a.samples,
            seed: a.seed,
        },
    };
    let r = verify_hppda(&h, mode);
    let mut text = format!(
        "params={} sets_checked={} exhaustive={}\n",
        h.params(),
        r.sets_checked,
        r.exhaustive
    );
    for p in &r.problems {
        let _ = writeln!(text, "problem: {p}");
    }
    if let Some(tau) = &r.failing_tau {
        let _ = writeln!(text, "witness tau={}", join(tau));
    }
    let _ = writeln!(text, "valid={}", r.valid);
    emit(out, &text)?;
    Ok(if r.valid { EXIT_OK } else { EXIT_FAILURE })
}

fn join(v: &[usize]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn engine_error(e: EngineError) -> CliError {
    match e {
        EngineError::DemandOutOfRange { .. }
        | EngineError::DemandCount { .. }
        | EngineError::EmptyLibrary
        | EngineError::HpPda(HpPdaError::BadActiveSet { .. }) => usage(e),
        other => CliError::Failure(other.to_string()),
    }
}

fn demand_vectors(kp: usize, n: usize, random: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..random)
        .map(|_| (0..kp).map(|_| rng.random_range(1..=n)).collect())
        .collect();
    out.push(vec![1; kp]);
    if n >= kp {
        out.push((1..=kp).collect());
    }
    out
}

fn cmd_simulate(a: &SimulateArgs, out: &mut (dyn Write + Send)) -> CliResult {
    let h = load_bundle(&a.bundle)?;
    let kp = h.params().k_active;
    if a.n == 0 {
        return Err(usage("N must be positive"));
    }
    if !a.exhaustive {
        if a.demands.len() != kp {
            return Err(usage(format!("expected {kp} demands, got {}", a.demands.len())));
        }
        if let Some(d) = a.demands.iter().find(|&&d| d == 0 || d > a.n) {
            return Err(usage(format!("demand out of range: {d} not in [1, {}]", a.n)));
        }
        find_zeta(&h, &a.tau).map_err(|e| match e {
            HpPdaError::NoMatch { .. } => CliError::Failure(e.to_string()),
            e => usage(e),
        })?;
    }

    let sim = Simulator::with_random_files(h, a.n, a.seed).map_err(engine_error)?;

    if !a.exhaustive {
        let delivery = sim.deliver(&a.tau, &a.demands).map_err(engine_error)?;
        if let Some(path) = &a.dump {
            fs::write(path, delivery.dump_hex(sim.library().codec()))
                .map_err(|e| CliError::Failure(e.to_string()))?;
        }
        let report = sim.report(&delivery).map_err(engine_error)?;
        emit(out, &report.to_string())?;
        return Ok(if report.all_success() { EXIT_OK } else { EXIT_FAILURE });
    }

    let params = *sim.hppda().params();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let jobs: Vec<(Vec<usize>, Vec<Vec<usize>>)> = subsets(params.k, kp)
        .map(|tau| {
            let vectors = demand_vectors(kp, a.n, a.random_demands, &mut rng);
            (tau, vectors)
        })
        .collect();
    let results: Vec<Result<(usize, bool, String), EngineError>> = jobs
        .par_iter()
        .map(|(tau, vectors)| {
            let mut ok = true;
            let mut rate = String::new();
            for d in vectors {
                let r = sim.run(tau, d)?;
                ok &= r.all_success();
                rate = format_ratio(&r.rate);
            }
            Ok((vectors.len(), ok, rate))
        })
        .collect();

    let mut text = String::new();
    let mut all_ok = true;
    let mut runs = 0;
    let mut rate = String::new();
    for ((tau, _), res) in jobs.iter().zip(results) {
        let (count, ok, r) = res.map_err(engine_error)?;
        all_ok &= ok;
        runs += count;
        rate = r;
        let _ = writeln!(text, "tau={} vectors={count} success={ok}", join(tau));
    }
    let _ = writeln!(text, "sets={} runs={runs} all_success={all_ok}", jobs.len());
    let _ = writeln!(text, "rate={rate}");
    emit(out, &text)?;
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_sweep(a: &SweepArgs, out: &mut (dyn Write + Send)) -> CliResult {
    let family: Vec<HpPda> = match (a.man_k, a.man_kp, a.bundles.is_empty()) {
        (Some(k), Some(kp), true) => {
            let levels: Vec<usize> = if a.t.is_empty() { (1..=kp).collect() } else { a.t.clone() };
            levels
                .into_iter()
                .map(|t| man_hppda(k, kp, t).map_err(usage))
                .collect::<Result<_, _>>()?
        }
        (None, None, false) => a
            .bundles
            .iter()
            .map(|p| load_bundle(p))
            .collect::<Result<_, _>>()?,
        _ => return Err(usage("give either --bundles or both --man-K and --man-Kp")),
    };
    let kp = family
        .first()
        .map(|h| h.params().k_active)
        .ok_or_else(|| usage("empty family"))?;
    let s = analysis::sweep(&family, a.n, kp, a.samples, a.alpha_step).map_err(usage)?;
    let side = write_sweep(&s, &a.out).map_err(|e| CliError::Failure(e.to_string()))?;
    let mut text = String::new();
    for p in &s.points {
        let _ = writeln!(text, "{p}");
    }
    let _ = writeln!(
        text,
        "wrote {} ({} points, {} bound samples) and {}",
        a.out.display(),
        s.points.len(),
        s.bound.samples.len(),
        side.display()
    );
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_bound(a: &BoundArgs, out: &mut (dyn Write + Send)) -> CliResult {
    match (a.m, &a.out) {
        (Some(m), None) => {
            let r = converse_bound(a.n, a.kp, m, a.alpha_step).map_err(usage)?;
            emit(out, &format!("{r:.6}\n"))?;
        }
        (None, Some(path)) => {
            let c = analysis::bound_curve(a.n, a.kp, a.samples, a.alpha_step).map_err(usage)?;
            let mut csv = String::from("scheme,M,R\n");
            for (m, r) in &c.samples {
                let _ = writeln!(csv, "bound,{m:.6},{r:.6}");
            }
            fs::write(path, csv).map_err(|e| CliError::Failure(e.to_string()))?;
            emit(out, &format!("wrote {} samples to {}\n", c.samples.len(), path.display()))?;
        }
        _ => return Err(usage("give exactly one of --M or --out")),
    }
    Ok(EXIT_OK)
}

fn cmd_design(a: &DesignArgs, out: &mut (dyn Write + Send)) -> CliResult {
    let d = Design::parse(&read(&a.design)?).map_err(usage)?;
    let r = d.verify();
    let mut text = format!(
        "{}-({},{},{}) design, b={}\n",
        d.t(),
        d.v(),
        d.block_size(),
        d.lambda(),
        d.num_blocks()
    );
    for (ts, count) in &r.violations {
        let _ = writeln!(text, "violation: {} in {count} blocks", join(ts));
    }
    if r.valid {
        for s in 0..=d.t() {
            let ls = d.lambda_s(s).map_err(usage)?;
            let le = d.lambda_exact(s).map_err(usage)?;
            let _ = writeln!(text, "lambda_{s}={ls} lambda_{s}^t={le}");
        }
    }
    let _ = writeln!(text, "valid={}", r.valid);
    emit(out, &text)?;
    Ok(if r.valid { EXIT_OK } else { EXIT_FAILURE })
}

const GOLDEN_EXAMPLE1: &str = include_str!("../golden/example1.txt");
const GOLDEN_EXAMPLE2: &str = include_str!("../golden/example2.txt");

fn transmission_lines(d: &Delivery) -> String {
    let mut s = String::new();
    for x in &d.transmissions {
        let terms: Vec<String> = x
            .terms
            .iter()
            .map(|t| format!("C_{},{}", t.file, t.row))
            .collect();
        let _ = writeln!(s, "X_{} = {}", x.label, terms.join(" + "));
    }
    s
}

/// Text replay of one worked example: arrays, matching, transmissions and
/// per-user outcome. Contains no payload bytes, so it is seed independent.
pub fn replay(h: &HpPda, n_files: usize, tau: &[usize], demands: &[usize]) -> Result<String, String> {
    let sim = Simulator::with_random_files(h.clone(), n_files, 2024).map_err(|e| e.to_string())?;
    let delivery = sim.deliver(tau, demands).map_err(|e| e.to_string())?;
    let report = sim.report(&delivery).map_err(|e| e.to_string())?;
    let verify = verify_hppda(h, VerifyMode::Exhaustive);
    let pp = analysis::proposed_point(h).map_err(|e| e.to_string())?;

    let mut s = String::new();
    let _ = writeln!(s, "params {}", h.params());
    let _ = write!(s, "P\n{}B\n{}", h.p(), h.b());
    let _ = writeln!(s, "verify valid={} sets={}", verify.valid, verify.sets_checked);
    for k in 1..=h.params().k {
        let _ = writeln!(s, "Z_{k} rows {}", join(sim.cache(k).rows()));
    }
    let _ = writeln!(s, "tau {}", join(&delivery.matching.tau));
    let _ = writeln!(s, "demands {}", join(&delivery.demands));
    let _ = writeln!(s, "zeta {}", join(&delivery.matching.zeta));
    s += &transmission_lines(&delivery);
    s += &report.to_string();
    let _ = writeln!(
        s,
        "M/N={} R={}",
        format_ratio(&pp.m_over_n),
        format_ratio(&pp.rate)
    );
    Ok(s)
}

/// The two worked examples as (name, replay text).
pub fn demo_replays() -> Result<Vec<(&'static str, String)>, String> {
    let ex1 = man_hppda(6, 4, 2).map_err(|e| e.to_string())?;
    let ex2 = tdesign_hppda(&crate::designs::design_3_8_4_1(), &[1, 2]).map_err(|e| e.to_string())?;
    Ok(vec![
        ("example1", replay(&ex1, 6, &[1, 4, 5, 6], &[2, 3, 1, 5])?),
        ("example2", replay(&ex2, 6, &[2, 6, 8], &[1, 3, 4])?),
    ])
}

fn cmd_demo(a: &DemoArgs, out: &mut (dyn Write + Send)) -> CliResult {
    let replays = demo_replays().map_err(CliError::Failure)?;
    if let Some(dir) = &a.write_golden {
        for (name, text) in &replays {
            fs::write(dir.join(format!("{name}.txt")), text)
                .map_err(|e| CliError::Failure(e.to_string()))?;
        }
        emit(out, &format!("wrote {} replays to {}\n", replays.len(), dir.display()))?;
        return Ok(EXIT_OK);
    }
    let mut ok = true;
    for ((name, text), golden) in replays.iter().zip([GOLDEN_EXAMPLE1, GOLDEN_EXAMPLE2]) {
        emit(out, text)?;
        let same = text == golden;
        ok &= same;
        emit(out, &format!("{name}: {}\n", if same { "matches golden" } else { "DIFFERS from golden" }))?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}
