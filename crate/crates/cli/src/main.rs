//! Benchmark front end: single runs, inexactness-parameter sweeps and
//! offline re-certification of persisted run summaries.

mod config;
mod output;

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use bsubgrad_core::{
    bounds, load_anchors, make_example1, make_example2, solver, Example1Params, Example2Params,
    InexactnessModel, Problem, ProxSetup, RunParams, RunRecord, StepRule,
};

use config::{
    parse_lipschitz_mode, parse_noise_magnitude, parse_noise_mode, parse_problem, parse_prox,
    parse_step_rule, read_config_file, resolve, ExperimentConfig, ProblemKind, ProxKind,
};
use output::{certify, csv_row, make_summary, write_csv, write_summary, RunSummary, CSV_HEADER};

#[derive(Parser)]
#[command(name = "bsubgrad", version, about = "Mirror-descent benchmark and bound certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Plain key-value config file; CLI flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem to solve: ex1 or ex2.
    #[arg(long)]
    problem: Option<String>,
    /// Ambient dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Feasible-ball radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Curvature coefficient of ex1.
    #[arg(long)]
    gamma: Option<f64>,
    /// Anchor count for ex2 (ignored when --anchors is given).
    #[arg(long)]
    m: Option<usize>,
    /// Anchor file for ex2: one anchor per line, whitespace-separated.
    #[arg(long)]
    anchors: Option<PathBuf>,
    /// Prox geometry: euclidean or entropy.
    #[arg(long)]
    prox: Option<String>,
    /// Step schedule override: exact or inexact (default: matched to the oracle).
    #[arg(long = "step-rule")]
    step_rule: Option<String>,
    /// Iteration count.
    #[arg(long)]
    iters: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// RNG stream id.
    #[arg(long)]
    stream: Option<u64>,
    /// Checkpoint interval.
    #[arg(long = "log-every")]
    log_every: Option<usize>,
    /// Lipschitz estimate for the classical bounds: paper or analytic.
    #[arg(long = "lipschitz-mode")]
    lipschitz_mode: Option<String>,
    /// Noise direction policy: random or adversarial.
    #[arg(long = "noise-mode")]
    noise_mode: Option<String>,
    /// Noise magnitude policy: worst or uniform.
    #[arg(long = "noise-magnitude")]
    noise_magnitude: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one mirror-descent run; write CSV checkpoints and a JSON summary.
    Run {
        #[command(flatten)]
        common: CommonFlags,
        /// Oracle spec: exact, relative:<alpha>, absolute:<delta>.
        #[arg(long)]
        oracle: Option<String>,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary path.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// One run per (inexactness value, seed) cell, plus an exact baseline.
    Sweep {
        #[command(flatten)]
        common: CommonFlags,
        /// Comma-separated relative-inexactness values.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        /// Comma-separated absolute-inexactness values.
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
        /// Comma-separated seeds, one run per (value, seed).
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// Combined long-format CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-cell JSON summaries.
        #[arg(long = "summary-dir")]
        summary_dir: Option<PathBuf>,
    },
    /// Re-verify a persisted JSON summary: bounds, validity, tamper checksum.
    Certify {
        /// Path to a JSON summary produced by `run` or `sweep`.
        record: PathBuf,
    },
    /// Show the available benchmark problems.
    ListProblems,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { common, oracle, out, summary } => cmd_run(common, oracle, out, summary),
        Command::Sweep { common, alphas, deltas, seeds, out, summary_dir } => {
            cmd_sweep(common, alphas, deltas, seeds, out, summary_dir)
        }
        Command::Certify { record } => cmd_certify(record),
        Command::ListProblems => {
            println!("ex1  f(x) = ||x||_2 + 2*gamma*||x||_2^2 on a ball; mu = 2*gamma; optimum at the origin");
            println!("ex2  f(x) = max_i ||x - A_i||_2^2 on a ball; mu = 2; optimum at the minimum-enclosing-ball center");
            ExitCode::SUCCESS
        }
    }
}

fn fail(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

/// Merges flags, config file and defaults into the effective configuration.
fn build_config(common: &CommonFlags, oracle: &Option<String>, default_iters: usize) -> Result<ExperimentConfig, String> {
    let file: HashMap<String, String> = match &common.config {
        Some(path) => read_config_file(path)?,
        None => HashMap::new(),
    };
    let lookup = |key: &str| file.get(key).cloned();
    let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| lookup(key));

    let problem = match pick(&common.problem, "problem") {
        Some(s) => parse_problem(&s)?,
        None => ProblemKind::Ex1,
    };
    let prox = match pick(&common.prox, "prox") {
        Some(s) => parse_prox(&s)?,
        None => ProxKind::Euclidean,
    };
    let step_rule = match pick(&common.step_rule, "step-rule") {
        Some(s) => Some(parse_step_rule(&s)?),
        None => None,
    };
    let lipschitz_mode = match pick(&common.lipschitz_mode, "lipschitz-mode") {
        Some(s) => parse_lipschitz_mode(&s)?,
        None => bsubgrad_core::LipschitzMode::Analytic,
    };
    let noise_mode = match pick(&common.noise_mode, "noise-mode") {
        Some(s) => parse_noise_mode(&s)?,
        None => bsubgrad_core::NoiseMode::Random,
    };
    let noise_magnitude = match pick(&common.noise_magnitude, "noise-magnitude") {
        Some(s) => parse_noise_magnitude(&s)?,
        None => bsubgrad_core::NoiseMagnitude::Worst,
    };
    let anchors_path = common.anchors.clone().or_else(|| lookup("anchors").map(PathBuf::from));
    let iters = resolve(&common.iters, &file, "iters", default_iters)?;

    let config = ExperimentConfig {
        problem,
        n: resolve(&common.n, &file, "n", 1000)?,
        radius: resolve(&common.radius, &file, "radius", 10.0)?,
        gamma_coef: resolve(&common.gamma, &file, "gamma", 0.5)?,
        m: resolve(&common.m, &file, "m", 50)?,
        anchors_path,
        prox,
        oracle: resolve(oracle, &file, "oracle", "exact".to_string())?,
        step_rule,
        iters,
        seed: resolve(&common.seed, &file, "seed", 1)?,
        stream: resolve(&common.stream, &file, "stream", 0)?,
        log_every: resolve(&common.log_every, &file, "log-every", (iters / 100).max(1))?,
        lipschitz_mode,
        noise_mode,
        noise_magnitude,
    };
    config.validate()?;
    Ok(config)
}

fn build_problem(config: &ExperimentConfig) -> Result<(Problem, ProxSetup), String> {
    let problem = match config.problem {
        ProblemKind::Ex1 => make_example1(&Example1Params {
            n: config.n,
            radius: config.radius,
            gamma_coef: config.gamma_coef,
        }),
        ProblemKind::Ex2 => {
            let anchors = match &config.anchors_path {
                Some(path) => Some(load_anchors(path).map_err(|e| format!("anchors: {e}"))?),
                None => None,
            };
            make_example2(&Example2Params {
                n: config.n,
                radius: config.radius,
                m: config.m,
                anchors,
                seed: config.seed,
            })
        }
    }
    .map_err(|e| e.to_string())?;
    let prox = ProxSetup::EuclideanBall { radius: config.radius };
    Ok((problem, prox))
}

fn execute(config: &ExperimentConfig) -> Result<(Problem, RunRecord), String> {
    let (problem, prox) = build_problem(config)?;
    let model = config.model()?;
    let rule = match config.step_rule {
        Some(kind) => StepRule { kind, mu: problem.mu },
        None => StepRule::matched_to(model, problem.mu),
    };
    let params = RunParams {
        model,
        rule,
        iters: config.iters,
        seed: config.seed,
        stream: config.stream,
        log_every: config.log_every,
        magnitude: config.noise_magnitude,
        mode: config.noise_mode,
    };
    let record = solver::run(&problem, &prox, &params).map_err(|e| e.to_string())?;
    Ok((problem, record))
}

/// Checks the theorem-matched bound against the observed gap and distance at
/// every checkpoint. Returns the first violation, if any.
fn validity_violation(rec: &RunRecord) -> Option<String> {
    for cp in &rec.checkpoints {
        let rep = bounds::report_at(
            &cp.aggregates,
            cp.k,
            rec.mu,
            rec.model,
            None,
            bsubgrad_core::LipschitzMode::Analytic,
        )
        .ok()?;
        let (func_bound, dist_bound) = match rec.model {
            InexactnessModel::Exact => (rep.bound_func_new, rep.bound_dist_new),
            InexactnessModel::Relative { .. } => {
                (rep.bound_func_relative?, rep.bound_dist_relative?)
            }
            InexactnessModel::Absolute { .. } => {
                (rep.bound_func_absolute?, rep.bound_dist_absolute?)
            }
        };
        if let Some(gap) = cp.gap_avg {
            if gap > func_bound * (1.0 + 1e-9) + 1e-15 {
                return Some(format!("k={}: gap {gap} exceeds bound {func_bound}", cp.k));
            }
        }
        if let Some(dist) = cp.dist_avg {
            if dist > dist_bound * (1.0 + 1e-9) + 1e-15 {
                return Some(format!("k={}: distance {dist} exceeds bound {dist_bound}", cp.k));
            }
        }
    }
    None
}

fn cmd_run(
    common: CommonFlags,
    oracle: Option<String>,
    out: Option<PathBuf>,
    summary_path: Option<PathBuf>,
) -> ExitCode {
    let config = match build_config(&common, &oracle, 100_000) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let started = Instant::now();
    let (problem, record) = match execute(&config) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let elapsed = started.elapsed().as_secs_f64();
    let m_f = problem.lipschitz(config.lipschitz_mode);
    let f_star = problem.optimum.as_ref().map(|(_, f)| *f);

    if let Some(path) = &out {
        if let Err(e) = write_csv(path, &record, m_f, config.lipschitz_mode) {
            return fail(&e);
        }
    }
    let summary = match make_summary(&config, &record, m_f, f_star, elapsed) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if let Some(path) = &summary_path {
        if let Err(e) = write_summary(path, &summary) {
            return fail(&e);
        }
    }

    println!(
        "run complete: N={} f(x_hat)={} gap={} dist={} [{:.2}s]",
        record.iters,
        record.f_x_hat,
        record.gap.map(|g| g.to_string()).unwrap_or_default(),
        record.dist.map(|d| d.to_string()).unwrap_or_default(),
        elapsed
    );
    if let Some(violation) = validity_violation(&record) {
        eprintln!("bound validity violated: {violation}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

struct SweepCell {
    label: String,
    value: String,
    oracle: String,
    seed: u64,
}

fn cmd_sweep(
    common: CommonFlags,
    alphas: Vec<f64>,
    deltas: Vec<f64>,
    seeds: Vec<u64>,
    out: Option<PathBuf>,
    summary_dir: Option<PathBuf>,
) -> ExitCode {
    if alphas.is_empty() && deltas.is_empty() {
        return fail("sweep: at least one of --alphas / --deltas must be nonempty");
    }
    if seeds.is_empty() {
        return fail("sweep: --seeds must be nonempty");
    }
    let base = match build_config(&common, &None, 10_000) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };

    // grid in deterministic order: exact baseline, then relative, then absolute
    let mut cells = vec![SweepCell {
        label: "exact".into(),
        value: String::new(),
        oracle: "exact".into(),
        seed: seeds[0],
    }];
    for &alpha in &alphas {
        for &seed in &seeds {
            cells.push(SweepCell {
                label: "relative".into(),
                value: format!("{alpha}"),
                oracle: format!("relative:{alpha}"),
                seed,
            });
        }
    }
    for &delta in &deltas {
        for &seed in &seeds {
            cells.push(SweepCell {
                label: "absolute".into(),
                value: format!("{delta}"),
                oracle: format!("absolute:{delta}"),
                seed,
            });
        }
    }

    // validate every cell's oracle spec before spending any compute
    for cell in &cells {
        if let Err(e) = cell.oracle.parse::<InexactnessModel>() {
            return fail(&e.to_string());
        }
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("BSUBGRAD_WORKERS") {
        match raw.parse::<usize>() {
            Ok(workers) if workers >= 1 => pool = pool.num_threads(workers),
            _ => return fail("BSUBGRAD_WORKERS must be a positive integer"),
        }
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return fail(&format!("cannot build worker pool: {e}")),
    };

    let results: Vec<Result<(usize, String, RunSummary), String>> = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(idx, cell)| {
                let mut config = base.clone();
                config.oracle = cell.oracle.clone();
                config.seed = cell.seed;
                config.validate()?;
                let started = Instant::now();
                let (problem, record) = execute(&config)?;
                let elapsed = started.elapsed().as_secs_f64();
                let m_f = problem.lipschitz(config.lipschitz_mode);
                let f_star = problem.optimum.as_ref().map(|(_, f)| *f);

                let mut block = String::new();
                for cp in &record.checkpoints {
                    let row = csv_row(cp, record.mu, record.model, m_f, config.lipschitz_mode)?;
                    block.push_str(&format!(
                        "{},{},{},{}\n",
                        cell.label, cell.value, cell.seed, row
                    ));
                }
                let summary = make_summary(&config, &record, m_f, f_star, elapsed)?;
                Ok((idx, block, summary))
            })
            .collect()
    });

    let mut blocks = vec![String::new(); cells.len()];
    let mut summaries: Vec<Option<RunSummary>> = (0..cells.len()).map(|_| None).collect();
    for res in results {
        match res {
            Ok((idx, block, summary)) => {
                blocks[idx] = block;
                summaries[idx] = Some(summary);
            }
            Err(e) => return fail(&e),
        }
    }

    if let Some(path) = &out {
        let mut text = format!("model,value,seed,{CSV_HEADER}\n");
        for block in &blocks {
            text.push_str(block);
        }
        if let Err(e) = std::fs::write(path, text) {
            return fail(&format!("cannot write {}: {e}", path.display()));
        }
    }
    if let Some(dir) = &summary_dir {
        if let Err(e) = std::fs::create_dir_all(dir) {
            return fail(&format!("cannot create {}: {e}", dir.display()));
        }
        for (cell, summary) in cells.iter().zip(&summaries) {
            let summary = summary.as_ref().expect("all cells completed");
            let name = if cell.value.is_empty() {
                format!("summary_{}_{}.json", cell.label, cell.seed)
            } else {
                format!("summary_{}_{}_{}.json", cell.label, cell.value, cell.seed)
            };
            if let Err(e) = write_summary(&dir.join(name), summary) {
                return fail(&e);
            }
        }
    }
    println!("sweep complete: {} cells", cells.len());
    ExitCode::SUCCESS
}

fn cmd_certify(record: PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(&record) {
        Ok(t) => t,
        Err(e) => return fail(&format!("cannot read {}: {e}", record.display())),
    };
    let summary: RunSummary = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return fail(&format!("malformed record: {e}")),
    };
    let lines = certify(&summary);
    let mut all_ok = true;
    for line in &lines {
        let status = if line.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {:<24} {}", line.name, line.detail);
        all_ok &= line.passed;
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
