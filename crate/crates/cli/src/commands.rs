//! The four subcommands, independent of argument parsing.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use cograte::optimizer::{
    grid_oracle, minimize_over_alpha, oracle_free_params, waterfill, OracleMode, ORACLE_PARAM_LIMIT,
};
use cograte::{
    bound_report, composite_matrices, load_channel, mu_sum_partial_outer, normalized,
    trace_boundary, trace_outer_boundary, BoundReport, CognitiveChannel, ConditionCheck, Error,
    RegionBoundary, SolverSettings, Witness,
};

/// Best R_p over the achievable region stated for the bundled channel.
pub const PUBLISHED_MAX_RP: f64 = 2.3542;
/// Scaling α* stated for the bundled channel.
pub const PUBLISHED_ALPHA_STAR: f64 = 0.9689;
/// The bundled channel, also shipped as `examples/paper_sec7.json`.
pub const BUNDLED_CHANNEL: &str = include_str!("../examples/paper_sec7.json");

pub const REPRODUCE_TOL: f64 = 1e-3;
pub const CONTAINMENT_TOL: f64 = 1e-6;
pub const CONDITION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Config,
    Solver,
    Acceptance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: FailureKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: FailureKind::Config,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Config => 2,
            FailureKind::Solver => 3,
            FailureKind::Acceptance => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::Parse(_)
            | Error::DimensionMismatch(_)
            | Error::NotSquare { .. }
            | Error::NonPositivePower { .. }
            | Error::InvalidAlpha(_)
            | Error::InvalidMu(_)
            | Error::UnsupportedMu(_)
            | Error::InvalidArgument(_)
            | Error::OracleTooLarge { .. } => FailureKind::Config,
            _ => FailureKind::Solver,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn read_channel(path: &Path) -> CliResult<CognitiveChannel> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::config(format!("cannot read channel file {}: {e}", path.display()))
    })?;
    Ok(load_channel(&text)?)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::config(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn render<W: Witness>(b: &RegionBoundary<W>, format: Format) -> String {
    match format {
        Format::Csv => b.to_csv(),
        Format::Json => pretty(&b.to_json()),
    }
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

pub fn region(
    ch: &CognitiveChannel,
    mus: &[f64],
    opts: &SolverSettings,
    out: Option<&Path>,
    format: Format,
) -> CliResult<()> {
    let b = trace_boundary(ch, mus, opts)?;
    emit(out, &render(&b, format))
}

fn alpha_file(dir: &Path, alpha: f64, format: Format) -> PathBuf {
    dir.join(format!("bound_alpha_{alpha}.{}", format.extension()))
}

/// One partial-outer boundary per α; with `out_dir` each goes to its own
/// file next to a combined `bound.json`, otherwise the combined JSON goes to
/// stdout.
pub fn bound(
    ch: &CognitiveChannel,
    alphas: &[f64],
    mus: &[f64],
    opts: &SolverSettings,
    out_dir: Option<&Path>,
    format: Format,
) -> CliResult<()> {
    let mut curves = Vec::new();
    for &alpha in alphas {
        let b = trace_outer_boundary(ch, alpha, mus, opts)?;
        if let Some(dir) = out_dir {
            write_atomic(&alpha_file(dir, alpha, format), &render(&b, format))?;
        }
        curves.push(b.to_json());
    }
    let combined = pretty(&json!({
        "schema": cograte::SCHEMA_VERSION,
        "channel": ch.fingerprint(),
        "alphas": alphas,
        "curves": curves,
    }));
    match out_dir {
        Some(dir) => write_atomic(&dir.join("bound.json"), &combined),
        None => emit(None, &combined),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    #[serde(flatten)]
    pub report: BoundReport,
    /// Grid-search value of `N(α*)` when the channel is small enough.
    pub oracle_n_value: Option<f64>,
    pub n_value_at_published_alpha: f64,
    pub paper_alpha_note: String,
}

pub fn sweep_entry(
    ch: &CognitiveChannel,
    mu: f64,
    bracket: (f64, f64),
    resolution: usize,
    opts: &SolverSettings,
) -> CliResult<SweepEntry> {
    let report = bound_report(ch, mu, bracket, CONDITION_TOL, opts)?;
    let oracle_n_value = if oracle_free_params(ch) <= ORACLE_PARAM_LIMIT {
        Some(grid_oracle(
            ch,
            mu,
            resolution,
            OracleMode::PartialOuter {
                alpha: report.alpha_star,
            },
        )?)
    } else {
        None
    };
    let at_published = mu_sum_partial_outer(ch, PUBLISHED_ALPHA_STAR, mu, opts)?.value;
    let note = format!(
        "reference alpha* for the bundled example channel = {PUBLISHED_ALPHA_STAR}; computed alpha* = {:.6}; \
         N/max(mu,1) is {:.6} at the reference value and {:.6} at the computed one",
        report.alpha_star,
        normalized(at_published, mu),
        report.n_value_normalized,
    );
    Ok(SweepEntry {
        report,
        oracle_n_value,
        n_value_at_published_alpha: at_published,
        paper_alpha_note: note,
    })
}

pub fn sweep_alpha(
    ch: &CognitiveChannel,
    mus: &[f64],
    bracket: (f64, f64),
    resolution: usize,
    opts: &SolverSettings,
    out: Option<&Path>,
) -> CliResult<()> {
    let entries = mus
        .iter()
        .map(|&mu| sweep_entry(ch, mu, bracket, resolution, opts))
        .collect::<CliResult<Vec<_>>>()?;
    let v = json!({
        "schema": cograte::SCHEMA_VERSION,
        "channel": ch.fingerprint(),
        "reports": entries,
    });
    emit(out, &pretty(&v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceSummary {
    pub schema: u32,
    pub seed: u64,
    pub mu_infinity: f64,
    pub max_rp_achievable: f64,
    pub max_rp_oracle: f64,
    pub published_max_rp: f64,
    pub bound_inf_alpha: f64,
    pub bound_closed_form: f64,
    pub alpha_star: f64,
    pub alpha_star_closed_form: f64,
    pub published_alpha_star: f64,
    pub bound_at_published_alpha: f64,
    pub tightness_gap: f64,
    pub containment_margin: f64,
    pub condition_check: Option<ConditionCheck>,
    pub checks: Vec<Check>,
}

impl ReproduceSummary {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let mut row = |k: &str, v: String| s.push_str(&format!("{k:<34} {v}\n"));
        row("quantity", "computed / reference".into());
        row(
            "max R_p (achievable)",
            format!("{:.6} / {}", self.max_rp_achievable, self.published_max_rp),
        );
        row(
            "max R_p (grid oracle)",
            format!("{:.6}", self.max_rp_oracle),
        );
        row(
            "inf_alpha bound on R_p",
            format!("{:.6}", self.bound_inf_alpha),
        );
        row("  closed form", format!("{:.6}", self.bound_closed_form));
        row(
            "alpha*",
            format!("{:.6} / {}", self.alpha_star, self.published_alpha_star),
        );
        row(
            "  closed form",
            format!("{:.6}", self.alpha_star_closed_form),
        );
        row(
            "bound at reference alpha",
            format!("{:.6}", self.bound_at_published_alpha),
        );
        row("tightness gap", format!("{:.3e}", self.tightness_gap));
        row(
            "containment margin",
            format!("{:.3e}", self.containment_margin),
        );
        for c in &self.checks {
            row(
                &format!("check {}", c.name),
                format!(
                    "{} ({:.3e} vs {:.0e})",
                    if c.passed { "pass" } else { "FAIL" },
                    c.value,
                    c.limit
                ),
            );
        }
        s
    }
}

pub const REPRODUCE_ALPHAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Region, bounds for the standard α set, the α sweep and the summary for
/// the bundled channel. Writes every artifact under `out_dir`.
pub fn reproduce(
    out_dir: &Path,
    opts: &SolverSettings,
    mu_infinity: f64,
    resolution: usize,
) -> CliResult<ReproduceSummary> {
    let ch = load_channel(BUNDLED_CHANNEL)?;
    let mut mus = cograte::optimizer::log_space(0.01, 100.0, 25);
    mus.push(mu_infinity);

    write_atomic(&out_dir.join("paper_sec7.json"), BUNDLED_CHANNEL)?;
    let region = trace_boundary(&ch, &mus, opts)?;
    write_atomic(&out_dir.join("region.csv"), &region.to_csv())?;
    write_atomic(&out_dir.join("region.json"), &pretty(&region.to_json()))?;

    let mut margin = f64::INFINITY;
    let mut curves = Vec::new();
    for alpha in REPRODUCE_ALPHAS {
        let b = trace_outer_boundary(&ch, alpha, &mus, opts)?;
        for p in &b.points {
            let own = region
                .points
                .iter()
                .find(|q| q.mu == p.mu)
                .expect("same grid");
            let diff = p.rate.mu_sum(p.mu) - own.rate.mu_sum(own.mu);
            if p.mu != mu_infinity {
                margin = margin.min(diff);
            }
        }
        write_atomic(&alpha_file(out_dir, alpha, Format::Csv), &b.to_csv())?;
        curves.push(b.to_json());
    }
    write_atomic(
        &out_dir.join("bound.json"),
        &pretty(&json!({
            "schema": cograte::SCHEMA_VERSION,
            "channel": ch.fingerprint(),
            "alphas": REPRODUCE_ALPHAS,
            "curves": curves,
        })),
    )?;

    let sweep = sweep_entry(&ch, mu_infinity, (1e-3, 1e3), resolution, opts)?;
    write_atomic(
        &out_dir.join("sweep.json"),
        &pretty(&json!({
            "schema": cograte::SCHEMA_VERSION,
            "channel": ch.fingerprint(),
            "reports": [&sweep],
        })),
    )?;

    let closed = minimize_over_alpha(
        |alpha| {
            let g = composite_matrices(&ch, alpha)?.g_alpha;
            Ok(waterfill(&g, ch.p_p() + alpha * ch.p_c(), ch.mode())?.capacity)
        },
        1e-3,
        1e3,
    )?;

    let max_rp = region.max_r_p();
    let oracle = grid_oracle(&ch, mu_infinity, resolution, OracleMode::Achievable)? / mu_infinity;
    let bound_rp = sweep.report.n_value_normalized;
    let tightness = bound_rp - max_rp;
    let checks = vec![
        Check {
            name: "max_rp_matches_reference",
            passed: (max_rp - PUBLISHED_MAX_RP).abs() <= REPRODUCE_TOL,
            value: (max_rp - PUBLISHED_MAX_RP).abs(),
            limit: REPRODUCE_TOL,
        },
        Check {
            name: "max_rp_matches_oracle",
            passed: (max_rp - oracle).abs() <= REPRODUCE_TOL,
            value: (max_rp - oracle).abs(),
            limit: REPRODUCE_TOL,
        },
        Check {
            name: "bound_meets_achievable",
            passed: (-CONTAINMENT_TOL..=REPRODUCE_TOL).contains(&tightness),
            value: tightness,
            limit: REPRODUCE_TOL,
        },
        Check {
            name: "bound_matches_closed_form",
            passed: (bound_rp - closed.value).abs() <= REPRODUCE_TOL,
            value: (bound_rp - closed.value).abs(),
            limit: REPRODUCE_TOL,
        },
        Check {
            name: "bounds_contain_region",
            passed: margin >= -CONTAINMENT_TOL,
            value: margin,
            limit: -CONTAINMENT_TOL,
        },
    ];
    let summary = ReproduceSummary {
        schema: cograte::SCHEMA_VERSION,
        seed: opts.seed,
        mu_infinity,
        max_rp_achievable: max_rp,
        max_rp_oracle: oracle,
        published_max_rp: PUBLISHED_MAX_RP,
        bound_inf_alpha: bound_rp,
        bound_closed_form: closed.value,
        alpha_star: sweep.report.alpha_star,
        alpha_star_closed_form: closed.alpha_star,
        published_alpha_star: PUBLISHED_ALPHA_STAR,
        bound_at_published_alpha: normalized(sweep.n_value_at_published_alpha, mu_infinity),
        tightness_gap: tightness,
        containment_margin: margin,
        condition_check: sweep.report.condition_check,
        checks,
    };
    write_atomic(
        &out_dir.join("summary.json"),
        &pretty(&serde_json::to_value(&summary).expect("summary serializes")),
    )?;
    write_atomic(&out_dir.join("summary.txt"), &summary.table())?;
    Ok(summary)
}
