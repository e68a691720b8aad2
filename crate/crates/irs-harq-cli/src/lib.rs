//! Declarative sweep driver behind the `irs-harq` binary.
//!
//! A sweep is described by a TOML document with a strict schema (unknown
//! keys are rejected):
//!
//! ```toml
//! [base]                  # full physical/protocol parameter set
//! n_reflectors = 64
//! tx_power = 1.0
//! noise_power = 1.0
//! dist_sr = 1.0
//! dist_rd = 1.0
//! pathloss_exp = 2.0
//! rate = 1.0
//! max_rounds = 4
//!
//! [sweep]
//! axis = "snr_db"         # snr_db | n_reflectors | rounds | pathloss_exp
//! grid = [-10.0, -8.0, -6.0]
//! engines = ["analytic", "asymptotic", "mc_clt"]
//! output = "sweep.csv"    # optional; stdout when absent
//!
//! [mc]                    # optional; defaults: trials = 1e6, seed = 0,
//! trials = 1000000        # shards = available CPU threads
//! seed = 0
//! shards = 8
//! ```
//!
//! The `snr_db` axis drives γ̄ directly (tx_power := 10^(dB/10) against
//! unit noise and distances); dB→linear conversion happens only here.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use irs_harq::analysis::{
    db_to_linear, outage_asymptotic, outage_probability, snr_gain_db, OutageQuery,
};
use irs_harq::mc::{run_outage_mc, McRunSpec};
use irs_harq::{SamplingMode, SystemConfig};

/// Bit-exact CSV header of `sweep` output.
pub const SWEEP_CSV_HEADER: &str =
    "axis_name,axis_value,engine,p_out,std_err,trials,seed,ratio_to_analytic,error";
/// Bit-exact CSV header of `validate` output.
pub const VALIDATE_CSV_HEADER: &str =
    "axis_name,axis_value,engine,p_out_mc,p_out_analytic,bias,std_err,z_score,verdict";
/// Bit-exact CSV header of `gain` output.
pub const GAIN_CSV_HEADER: &str =
    "axis_name,axis_value,target_pout,snr_db_required,delta_db_vs_prev,error";

/// Errors from configuration handling and sweep execution.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config validation error: {0}")]
    Validation(String),
    #[error("numeric error: {0}")]
    Numeric(#[from] irs_harq::Error),
}

/// Parameter swept along the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    SnrDb,
    NReflectors,
    Rounds,
    PathlossExp,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::NReflectors => "n_reflectors",
            Axis::Rounds => "rounds",
            Axis::PathlossExp => "pathloss_exp",
        }
    }
}

/// Evaluation engine for one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytic,
    Asymptotic,
    McExact,
    McClt,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Asymptotic => "asymptotic",
            Engine::McExact => "mc_exact",
            Engine::McClt => "mc_clt",
        }
    }

    fn is_mc(&self) -> bool {
        matches!(self, Engine::McExact | Engine::McClt)
    }
}

/// `[base]` section: the full system parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseConfig {
    pub n_reflectors: u32,
    pub tx_power: f64,
    pub noise_power: f64,
    pub dist_sr: f64,
    pub dist_rd: f64,
    pub pathloss_exp: f64,
    pub rate: f64,
    pub max_rounds: u32,
}

impl From<BaseConfig> for SystemConfig {
    fn from(b: BaseConfig) -> Self {
        SystemConfig {
            n_reflectors: b.n_reflectors,
            tx_power: b.tx_power,
            noise_power: b.noise_power,
            dist_sr: b.dist_sr,
            dist_rd: b.dist_rd,
            pathloss_exp: b.pathloss_exp,
            rate: b.rate,
            max_rounds: b.max_rounds,
        }
    }
}

/// `[sweep]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub engines: Vec<Engine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// `[mc]` section with documented defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Number of work shards; defaults to the number of available CPU
    /// threads. Shard count never changes the estimate, only how the
    /// trial range is split over workers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shards: Option<u32>,
}

fn default_trials() -> u64 {
    1_000_000
}

impl Default for McSection {
    fn default() -> Self {
        Self { trials: default_trials(), seed: 0, shards: None }
    }
}

/// A fully validated sweep specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: BaseConfig,
    pub sweep: SweepSection,
    #[serde(default)]
    pub mc: McSection,
}

impl SweepSpec {
    /// Strict-schema parse plus full validation.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: SweepSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sweep spec serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        SystemConfig::from(self.base)
            .validate()
            .map_err(|e| CliError::Validation(format!("base: {e}")))?;

        if self.sweep.grid.is_empty() {
            return Err(CliError::Validation("sweep.grid must not be empty".into()));
        }
        for &v in &self.sweep.grid {
            if !v.is_finite() {
                return Err(CliError::Validation("sweep.grid values must be finite".into()));
            }
        }
        for w in self.sweep.grid.windows(2) {
            if w[1] <= w[0] {
                return Err(CliError::Validation(format!(
                    "sweep.grid must be strictly increasing: {} does not exceed {}",
                    w[1], w[0]
                )));
            }
        }
        for &v in &self.sweep.grid {
            match self.sweep.axis {
                Axis::NReflectors | Axis::Rounds => {
                    if v < 1.0 || v.fract() != 0.0 || v > f64::from(u32::MAX) {
                        return Err(CliError::Validation(format!(
                            "axis {} requires positive integer grid values, got {v}",
                            self.sweep.axis.name()
                        )));
                    }
                }
                Axis::PathlossExp => {
                    if v < 1.0 {
                        return Err(CliError::Validation(format!(
                            "axis pathloss_exp requires values >= 1, got {v}"
                        )));
                    }
                }
                Axis::SnrDb => {}
            }
        }

        if self.sweep.engines.is_empty() {
            return Err(CliError::Validation("sweep.engines must not be empty".into()));
        }
        for (i, a) in self.sweep.engines.iter().enumerate() {
            if self.sweep.engines[i + 1..].contains(a) {
                return Err(CliError::Validation(format!(
                    "duplicate engine {} in sweep.engines",
                    a.name()
                )));
            }
        }

        if self.mc.trials < 1_000 {
            return Err(CliError::Validation("mc.trials must be >= 1000".into()));
        }
        if self.mc.shards == Some(0) {
            return Err(CliError::Validation("mc.shards must be >= 1".into()));
        }
        Ok(())
    }

    /// System configuration for one axis value.
    pub fn config_at(&self, value: f64) -> SystemConfig {
        let mut cfg = SystemConfig::from(self.base);
        match self.sweep.axis {
            Axis::SnrDb => {
                cfg.tx_power = db_to_linear(value);
                cfg.noise_power = 1.0;
                cfg.dist_sr = 1.0;
                cfg.dist_rd = 1.0;
            }
            Axis::NReflectors => cfg.n_reflectors = value as u32,
            Axis::Rounds => cfg.max_rounds = value as u32,
            Axis::PathlossExp => cfg.pathloss_exp = value,
        }
        cfg
    }

    fn shards(&self) -> u32 {
        self.mc.shards.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get() as u32)
        })
    }
}

/// One row of sweep output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_name: &'static str,
    pub axis_value: f64,
    pub engine: Engine,
    pub p_out: Option<f64>,
    pub std_err: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub ratio_to_analytic: Option<f64>,
    pub error: Option<String>,
}

/// Messages the sweep wants a human to see (MC resolution warnings);
/// kept out of the CSV and printed to stderr unless `--quiet`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

/// Runs every (axis value × engine) cell, ordered by axis value then by
/// the engine order given in the configuration. Engine failures land in
/// the row's error column instead of aborting the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport, CliError> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.sweep.grid.len() * spec.sweep.engines.len());
    let mut warnings = Vec::new();

    for &value in &spec.sweep.grid {
        let cfg = spec.config_at(value);
        // Analytic reference for the ratio column, when requested.
        let analytic_ref = if spec.sweep.engines.contains(&Engine::Analytic) {
            OutageQuery::from_config(&cfg).ok().and_then(|q| outage_probability(&q).ok())
        } else {
            None
        };

        for &engine in &spec.sweep.engines {
            let mut row = SweepRow {
                axis_name: spec.sweep.axis.name(),
                axis_value: value,
                engine,
                p_out: None,
                std_err: None,
                trials: None,
                seed: None,
                ratio_to_analytic: None,
                error: None,
            };
            match engine {
                Engine::Analytic => {
                    match OutageQuery::from_config(&cfg).and_then(|q| outage_probability(&q)) {
                        Ok(p) => row.p_out = Some(p),
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
                Engine::Asymptotic => {
                    match OutageQuery::from_config(&cfg).and_then(|q| outage_asymptotic(&q)) {
                        Ok(p) => {
                            row.p_out = Some(p);
                            if let Some(a) = analytic_ref {
                                if a > 0.0 {
                                    row.ratio_to_analytic = Some(p / a);
                                }
                            }
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
                Engine::McExact | Engine::McClt => {
                    let mode = if engine == Engine::McExact {
                        SamplingMode::Exact
                    } else {
                        SamplingMode::Clt
                    };
                    let mc_spec = McRunSpec {
                        cfg,
                        mode,
                        trials: self_trials(spec),
                        seed: spec.mc.seed,
                        shards: spec.shards(),
                    };
                    match run_outage_mc(&mc_spec) {
                        Ok(est) => {
                            row.p_out = Some(est.p_hat);
                            row.std_err = Some(est.std_err);
                            row.trials = Some(est.trials);
                            row.seed = Some(est.seed);
                            if est.p_hat > 0.0 && est.std_err / est.p_hat > 0.1 {
                                warnings.push(format!(
                                    "{}={}: {} relative error {:.0}% exceeds 10%; consider more trials",
                                    spec.sweep.axis.name(),
                                    value,
                                    engine.name(),
                                    100.0 * est.std_err / est.p_hat
                                ));
                            }
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
            }
            rows.push(row);
        }
    }
    Ok(SweepReport { rows, warnings })
}

fn self_trials(spec: &SweepSpec) -> u64 {
    spec.mc.trials
}

/// Probability-scale values print in scientific notation (still the
/// shortest round-trip representation); axis values stay plain.
fn fmt_opt_sci(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:e}"))
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

fn fmt_opt_u64(v: Option<u64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

/// The error column shares the line with comma-separated fields; commas
/// and newlines in messages are flattened so rows stay single-line and
/// unquoted.
fn sanitize(msg: &str) -> String {
    msg.replace([',', '\n'], ";")
}

/// Renders sweep rows as CSV, `\n` line endings, full round-trip float
/// precision. Identical specs produce identical bytes.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.axis_name,
            r.axis_value,
            r.engine.name(),
            fmt_opt_sci(r.p_out),
            fmt_opt_sci(r.std_err),
            fmt_opt_u64(r.trials),
            fmt_opt_u64(r.seed),
            fmt_opt_f64(r.ratio_to_analytic),
            r.error.as_deref().map_or_else(String::new, sanitize),
        );
    }
    out
}

/// One row of the analytic-vs-MC validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub axis_name: &'static str,
    pub axis_value: f64,
    pub engine: Engine,
    pub p_out_mc: f64,
    pub p_out_analytic: f64,
    /// p̂ − p; systematic model error shows up here (exact mode at
    /// small N), statistical noise stays within ±3σ.
    pub bias: f64,
    pub std_err: f64,
    pub z_score: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub all_pass: bool,
}

/// Runs the MC engines against the analytic closed form at a 3σ policy
/// per row. Requires the analytic engine plus at least one MC engine.
pub fn run_validation(spec: &SweepSpec) -> Result<ValidationReport, CliError> {
    spec.validate()?;
    if !spec.sweep.engines.contains(&Engine::Analytic) {
        return Err(CliError::Validation(
            "validate requires the analytic engine in sweep.engines".into(),
        ));
    }
    let mc_engines: Vec<Engine> =
        spec.sweep.engines.iter().copied().filter(Engine::is_mc).collect();
    if mc_engines.is_empty() {
        return Err(CliError::Validation(
            "validate requires at least one of mc_exact/mc_clt in sweep.engines".into(),
        ));
    }

    let mut rows = Vec::new();
    for &value in &spec.sweep.grid {
        let cfg = spec.config_at(value);
        let analytic = outage_probability(&OutageQuery::from_config(&cfg)?)?;
        for &engine in &mc_engines {
            let mode = if engine == Engine::McExact {
                SamplingMode::Exact
            } else {
                SamplingMode::Clt
            };
            let est = run_outage_mc(&McRunSpec {
                cfg,
                mode,
                trials: spec.mc.trials,
                seed: spec.mc.seed,
                shards: spec.shards(),
            })?;
            let bias = est.p_hat - analytic;
            // z under the null hypothesis that the MC samples the
            // analytic law: the null variance stays meaningful at zero
            // observed counts, where the estimate's own variance
            // degenerates.
            let se_null = (analytic * (1.0 - analytic) / est.trials as f64).sqrt();
            let z_score = if se_null > 0.0 {
                bias / se_null
            } else if bias == 0.0 {
                0.0
            } else {
                f64::INFINITY * bias.signum()
            };
            rows.push(ValidationRow {
                axis_name: spec.sweep.axis.name(),
                axis_value: value,
                engine,
                p_out_mc: est.p_hat,
                p_out_analytic: analytic,
                bias,
                std_err: est.std_err,
                z_score,
                pass: z_score.abs() <= 3.0,
            });
        }
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(ValidationReport { rows, all_pass })
}

pub fn validation_csv(report: &ValidationReport) -> String {
    let mut out = String::new();
    out.push_str(VALIDATE_CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.axis_name,
            r.axis_value,
            r.engine.name(),
            format_args!("{:e}", r.p_out_mc),
            format_args!("{:e}", r.p_out_analytic),
            format_args!("{:e}", r.bias),
            format_args!("{:e}", r.std_err),
            r.z_score,
            if r.pass { "PASS" } else { "FAIL" },
        );
    }
    out
}

/// One row of required-SNR output.
#[derive(Debug, Clone, PartialEq)]
pub struct GainRow {
    pub axis_name: &'static str,
    pub axis_value: f64,
    pub target_pout: f64,
    pub snr_db_required: Option<f64>,
    pub delta_db_vs_prev: Option<f64>,
    pub error: Option<String>,
}

/// For each axis value, the transmit SNR (dB) required to reach
/// `target_pout`, and the saving relative to the previous axis value.
/// The `snr_db` axis is rejected: the solver output *is* the SNR.
pub fn run_gain(spec: &SweepSpec, target_pout: f64) -> Result<Vec<GainRow>, CliError> {
    spec.validate()?;
    if spec.sweep.axis == Axis::SnrDb {
        return Err(CliError::Validation(
            "gain solves for SNR; pick a non-SNR axis (rounds, n_reflectors, pathloss_exp)".into(),
        ));
    }
    if !(target_pout > 0.0 && target_pout < 1.0) {
        return Err(CliError::Validation("target_pout must lie strictly inside (0, 1)".into()));
    }

    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for &value in &spec.sweep.grid {
        let cfg = spec.config_at(value);
        let mut row = GainRow {
            axis_name: spec.sweep.axis.name(),
            axis_value: value,
            target_pout,
            snr_db_required: None,
            delta_db_vs_prev: None,
            error: None,
        };
        match OutageQuery::from_config(&cfg).and_then(|q| snr_gain_db(&q, target_pout)) {
            Ok(db) => {
                row.snr_db_required = Some(db);
                row.delta_db_vs_prev = prev.map(|p| db - p);
                prev = Some(db);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn gain_csv(rows: &[GainRow]) -> String {
    let mut out = String::new();
    out.push_str(GAIN_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.axis_name,
            r.axis_value,
            r.target_pout,
            fmt_opt_f64(r.snr_db_required),
            fmt_opt_f64(r.delta_db_vs_prev),
            r.error.as_deref().map_or_else(String::new, sanitize),
        );
    }
    out
}
