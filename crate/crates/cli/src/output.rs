//! CSV/JSON emission and the offline certification checks.
//!
//! Floating-point values are written with Rust's shortest-roundtrip
//! formatting so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use bsubgrad_core::{
    bounds, Aggregates, Checkpoint, InexactnessModel, LipschitzMode, RunRecord,
};

use crate::config::ExperimentConfig;

pub const CSV_HEADER: &str = "k,f_x,f_avg,gap_avg,dist_avg,grad_dual_norm,noisy_grad_dual_norm,bound_func_new,bound_func_classical,bound_dist_new,bound_dist_classical,bound_func_inexact,bound_dist_inexact";

fn opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

/// One CSV row for a checkpoint; bound columns are re-derived from the
/// checkpoint's own aggregates.
pub fn csv_row(
    cp: &Checkpoint,
    mu: f64,
    model: InexactnessModel,
    m_f: Option<f64>,
    mode: LipschitzMode,
) -> Result<String, String> {
    let rep = bounds::report_at(&cp.aggregates, cp.k, mu, model, m_f, mode)
        .map_err(|e| e.to_string())?;
    let (func_inexact, dist_inexact) = match model {
        InexactnessModel::Exact => (None, None),
        InexactnessModel::Relative { .. } => (rep.bound_func_relative, rep.bound_dist_relative),
        InexactnessModel::Absolute { .. } => (rep.bound_func_absolute, rep.bound_dist_absolute),
    };
    let mut row = String::new();
    write!(
        row,
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        cp.k,
        cp.f_x,
        cp.f_avg,
        opt(cp.gap_avg),
        opt(cp.dist_avg),
        cp.grad_dual_norm,
        cp.noisy_grad_dual_norm,
        rep.bound_func_new,
        opt(rep.bound_func_classical),
        rep.bound_dist_new,
        opt(rep.bound_dist_classical),
        opt(func_inexact),
        opt(dist_inexact),
    )
    .expect("writing to String cannot fail");
    Ok(row)
}

pub fn write_csv(
    path: &Path,
    rec: &RunRecord,
    m_f: Option<f64>,
    mode: LipschitzMode,
) -> Result<(), String> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for cp in &rec.checkpoints {
        text.push_str(&csv_row(cp, rec.mu, rec.model, m_f, mode)?);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// The persisted record: config echo, final aggregates, bounds and a
/// tamper-detection checksum over the numeric payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub version: String,
    pub config: ExperimentConfig,
    pub iters: usize,
    pub mu: f64,
    pub lipschitz: Option<f64>,
    pub f_x_hat: f64,
    pub f_star: Option<f64>,
    pub final_gap: Option<f64>,
    pub final_dist: Option<f64>,
    pub aggregates: Aggregates,
    pub bounds: bounds::BoundReport,
    pub wall_clock_seconds: f64,
    pub checksum: String,
}

/// Checksum over every field the certification checks depend on, using exact
/// bit patterns of the floats.
pub fn summary_checksum(
    iters: usize,
    mu: f64,
    model: InexactnessModel,
    agg: &Aggregates,
    f_x_hat: f64,
    final_gap: Option<f64>,
    final_dist: Option<f64>,
) -> String {
    let mut hasher = Sha256::new();
    let mut feed = |v: f64| hasher.update(v.to_bits().to_le_bytes());
    feed(mu);
    feed(agg.s1);
    feed(agg.s2);
    feed(agg.s3);
    feed(agg.s4);
    feed(agg.s5);
    feed(f_x_hat);
    feed(final_gap.unwrap_or(f64::NAN));
    feed(final_dist.unwrap_or(f64::NAN));
    match model {
        InexactnessModel::Exact => feed(-1.0),
        InexactnessModel::Relative { alpha } => feed(alpha),
        InexactnessModel::Absolute { delta } => feed(delta),
    }
    hasher.update(iters.to_le_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn make_summary(
    config: &ExperimentConfig,
    rec: &RunRecord,
    m_f: Option<f64>,
    f_star: Option<f64>,
    wall_clock_seconds: f64,
) -> Result<RunSummary, String> {
    let rep = bounds::report(rec, m_f, config.lipschitz_mode).map_err(|e| e.to_string())?;
    Ok(RunSummary {
        version: bsubgrad_core::VERSION.to_string(),
        config: config.clone(),
        iters: rec.iters,
        mu: rec.mu,
        lipschitz: m_f,
        f_x_hat: rec.f_x_hat,
        f_star,
        final_gap: rec.gap,
        final_dist: rec.dist,
        aggregates: rec.aggregates,
        bounds: rep,
        wall_clock_seconds,
        checksum: summary_checksum(
            rec.iters,
            rec.mu,
            rec.model,
            &rec.aggregates,
            rec.f_x_hat,
            rec.gap,
            rec.dist,
        ),
    })
}

pub fn write_summary(path: &Path, summary: &RunSummary) -> Result<(), String> {
    let json = serde_json::to_string_pretty(summary)
        .map_err(|e| format!("summary serialization failed: {e}"))?;
    std::fs::write(path, json + "\n")
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Result of one certification check.
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Recomputes every applicable bound from the stored aggregates and
/// re-checks the summary's internal consistency.
pub fn certify(summary: &RunSummary) -> Vec<CheckLine> {
    let mut lines = Vec::new();
    let model = match summary.config.model() {
        Ok(m) => m,
        Err(e) => {
            lines.push(CheckLine {
                name: "config",
                passed: false,
                detail: format!("unparseable oracle spec: {e}"),
            });
            return lines;
        }
    };

    let expected = summary_checksum(
        summary.iters,
        summary.mu,
        model,
        &summary.aggregates,
        summary.f_x_hat,
        summary.final_gap,
        summary.final_dist,
    );
    lines.push(CheckLine {
        name: "aggregate-checksum",
        passed: expected == summary.checksum,
        detail: if expected == summary.checksum {
            "stored checksum matches recomputation".into()
        } else {
            format!("stored {} != recomputed {}", summary.checksum, expected)
        },
    });

    let recomputed = match bounds::report_at(
        &summary.aggregates,
        summary.iters,
        summary.mu,
        model,
        summary.lipschitz,
        summary.config.lipschitz_mode,
    ) {
        Ok(r) => r,
        Err(e) => {
            lines.push(CheckLine {
                name: "bound-recompute",
                passed: false,
                detail: format!("bound evaluation failed: {e}"),
            });
            return lines;
        }
    };
    let same = recomputed == summary.bounds;
    lines.push(CheckLine {
        name: "bound-recompute",
        passed: same,
        detail: if same {
            "stored bounds equal pure-function recomputation".into()
        } else {
            "stored bounds differ from recomputation on stored aggregates".into()
        },
    });

    // validity of the active bounds against the observed gap and distance
    let (func_bound, dist_bound) = match model {
        InexactnessModel::Exact => (recomputed.bound_func_new, recomputed.bound_dist_new),
        InexactnessModel::Relative { .. } => (
            recomputed.bound_func_relative.unwrap_or(f64::NAN),
            recomputed.bound_dist_relative.unwrap_or(f64::NAN),
        ),
        InexactnessModel::Absolute { .. } => (
            recomputed.bound_func_absolute.unwrap_or(f64::NAN),
            recomputed.bound_dist_absolute.unwrap_or(f64::NAN),
        ),
    };
    if let Some(gap) = summary.final_gap {
        let ok = gap <= func_bound * (1.0 + 1e-9) + 1e-15;
        lines.push(CheckLine {
            name: "gap-validity",
            passed: ok,
            detail: format!("gap {gap} vs bound {func_bound}"),
        });
    }
    if let Some(dist) = summary.final_dist {
        let ok = dist <= dist_bound * (1.0 + 1e-9) + 1e-15;
        lines.push(CheckLine {
            name: "dist-validity",
            passed: ok,
            detail: format!("dist {dist} vs bound {dist_bound}"),
        });
    }

    // dominance over the classical bounds, guaranteed when the Lipschitz
    // estimate is a true cap on the observed dual norms
    if model == InexactnessModel::Exact {
        if let (Some(fc), Some(dc)) =
            (recomputed.bound_func_classical, recomputed.bound_dist_classical)
        {
            let ok = recomputed.bound_func_new <= fc * (1.0 + 1e-12)
                && recomputed.bound_dist_new <= dc * (1.0 + 1e-12);
            lines.push(CheckLine {
                name: "dominance",
                passed: ok,
                detail: format!(
                    "func {} <= {}, dist {} <= {}",
                    recomputed.bound_func_new, fc, recomputed.bound_dist_new, dc
                ),
            });
        }
    }

    // zero-noise models must agree with each other
    let zero_noise = matches!(model, InexactnessModel::Relative { alpha } if alpha == 0.0)
        || matches!(model, InexactnessModel::Absolute { delta } if delta == 0.0);
    if zero_noise {
        let rel = bounds::bound_func_relative(&summary.aggregates, summary.iters, summary.mu, 0.0);
        let abs = bounds::bound_func_absolute(&summary.aggregates, summary.iters, summary.mu, 0.0);
        let (ok, detail) = match (rel, abs) {
            (Ok(r), Ok(a)) => {
                ((r - a).abs() <= 1e-12 * r.abs().max(1e-300), format!("relative {r} vs absolute {a}"))
            }
            _ => (false, "bound evaluation failed".into()),
        };
        lines.push(CheckLine { name: "reduction-consistency", passed: ok, detail });
    }

    lines
}
