//! Declarative experiment documents and the runner behind the command-line
//! tool.
//!
//! A config is a single JSON document. Every block has defaults, so the
//! smallest valid config is `{"experiment": "scaling"}`. Unknown fields are
//! rejected and errors name the offending path.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::control::{
    generate_sequence, toggling_frame, ControlSequence, ProtectedSet, PulseEvent, SequenceKind,
};
use crate::dyson::order_check;
use crate::error::{Error, Result};
use crate::lab::{
    expansion_sweep, log_space, sweep_and_fit, PropagationSettings, ScalingRun, DEFAULT_FLOOR,
};
use crate::linalg::pauli::pauli_word;
use crate::linalg::{ComplexOperator, C64};
use crate::models::{
    absorb_drift, random_static_model, random_time_dependent_model, ModelRef, StaticModel,
    TimeDependentModel, DEFAULT_BATH_DEGREE, DEFAULT_BATH_DIM, DEFAULT_NORM_BOUND,
};
use crate::witness::{
    certify_lemma, formula_checks, independence_certificate, lemma_family, witness_bath,
    WitnessBath,
};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Scaling,
    OrderCheck,
    ExpansionCheck,
    Witness,
    Lemma,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Scaling,
        ExperimentKind::OrderCheck,
        ExperimentKind::ExpansionCheck,
        ExperimentKind::Witness,
        ExperimentKind::Lemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::OrderCheck => "order-check",
            ExperimentKind::ExpansionCheck => "expansion-check",
            ExperimentKind::Witness => "witness",
            ExperimentKind::Lemma => "lemma",
        }
    }

    fn writes_csv(self) -> bool {
        !matches!(self, ExperimentKind::Lemma)
    }
}

/// A system operator: a built-in name or explicit rows of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpSpec {
    Name(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

impl From<&str> for OpSpec {
    fn from(s: &str) -> Self {
        OpSpec::Name(s.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Static,
    TimeDependent,
}

/// `H_S(t) = Σ_p coefficients[p] t^p / p! · op`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftTerm {
    pub op: OpSpec,
    pub coefficients: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub d_s: usize,
    pub d_b: usize,
    /// `S_0` must be the identity.
    pub system_ops: Vec<OpSpec>,
    /// Polynomial degree of each bath series (time-dependent models).
    pub degree: usize,
    pub norm_bound: f64,
    pub drift: Vec<DriftTerm>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Static,
            d_s: 2,
            d_b: DEFAULT_BATH_DIM,
            system_ops: vec!["I".into(), "Z".into()],
            degree: DEFAULT_BATH_DEGREE,
            norm_bound: DEFAULT_NORM_BOUND,
            drift: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKindConfig {
    Free,
    Periodic,
    Udd,
    /// Explicit `pulses` list.
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub theta: f64,
    pub op: OpSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SequenceConfig {
    pub kind: SequenceKindConfig,
    pub n: usize,
    pub axis: OpSpec,
    pub pulses: Vec<PulseConfig>,
    /// Protected set; the full operator algebra when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<OpSpec>>,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        Self {
            kind: SequenceKindConfig::Udd,
            n: 1,
            axis: "X".into(),
            pulses: Vec::new(),
            omega: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    Values(Vec<f64>),
    LogRange { start: f64, stop: f64, points: usize },
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig::LogRange {
            start: 0.05,
            stop: 0.5,
            points: 10,
        }
    }
}

impl GridConfig {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridConfig::Values(v) => Ok(v.clone()),
            GridConfig::LogRange { start, stop, points } => {
                if !(*start > 0.0 && stop > start && *points >= 2) {
                    return Err(Error::config(
                        "grid.log_range",
                        "needs 0 < start < stop and at least 2 points",
                    ));
                }
                Ok(log_space(*start, *stop, *points))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SettingsConfig {
    pub tolerance: f64,
    pub initial_steps: usize,
    pub max_steps: usize,
    pub floor: f64,
    /// Truncation or target order `N`.
    pub order: usize,
}

impl Default for SettingsConfig {
    fn default() -> Self {
        let p = PropagationSettings::default();
        Self {
            tolerance: p.tolerance,
            initial_steps: p.initial_steps,
            max_steps: p.max_steps,
            floor: DEFAULT_FLOOR,
            order: 3,
        }
    }
}

impl SettingsConfig {
    fn propagation(&self) -> Result<PropagationSettings> {
        let p = PropagationSettings {
            initial_steps: self.initial_steps,
            tolerance: self.tolerance,
            max_steps: self.max_steps,
        };
        p.validate().map_err(|e| Error::config("settings", e.to_string()))?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessConfig {
    pub n: usize,
    pub d: usize,
    pub use_b_plus: bool,
    /// Replace the lemma operators by random Hermitian ones of this
    /// dimension. The result is then not a certificate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_h_dim: Option<usize>,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            n: 3,
            d: 3,
            use_b_plus: true,
            random_h_dim: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaConfig {
    pub k_prime: usize,
    pub r: usize,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self { k_prime: 2, r: 2 }
    }
}

/// Output file names, relative to the output directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub sequence: SequenceConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub settings: SettingsConfig,
    #[serde(default)]
    pub witness: WitnessConfig,
    #[serde(default)]
    pub lemma: LemmaConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            seed: default_seed(),
            model: ModelConfig::default(),
            sequence: SequenceConfig::default(),
            grid: GridConfig::default(),
            settings: SettingsConfig::default(),
            witness: WitnessConfig::default(),
            lemma: LemmaConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<document>".to_string() } else { path };
            Error::Config {
                field,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::config(path.display().to_string(), format!("cannot read config: {e}"))
        })?;
        Self::from_json(&text)
    }

    /// The config with overrides applied and output names filled in. Running
    /// the effective config reproduces the run exactly.
    pub fn effective(&self, seed_override: Option<u64>) -> Self {
        let mut c = self.clone();
        if let Some(s) = seed_override {
            c.seed = s;
        }
        let stem = c.experiment.name();
        if c.experiment.writes_csv() && c.output.csv.is_none() {
            c.output.csv = Some(format!("{stem}.csv"));
        }
        if c.output.summary.is_none() {
            c.output.summary = Some(format!("{stem}.json"));
        }
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn resolve_op(spec: &OpSpec, d_s: usize, field: &str) -> Result<ComplexOperator> {
    let op = match spec {
        OpSpec::Name(name) => {
            let word = match name.as_str() {
                "I" | "identity" => return Ok(ComplexOperator::identity(d_s)),
                "sigma_x" | "σx" | "σ_x" => "X",
                "sigma_y" | "σy" | "σ_y" => "Y",
                "sigma_z" | "σz" | "σ_z" => "Z",
                other => other,
            };
            pauli_word(word).map_err(|_| {
                Error::config(field, format!("unknown operator name `{name}`"))
            })?
        }
        OpSpec::Matrix(rows) => {
            let rows: Vec<Vec<C64>> = rows
                .iter()
                .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
                .collect();
            ComplexOperator::from_rows(&rows).map_err(|e| Error::config(field, e.to_string()))?
        }
    };
    if op.dim() != d_s {
        return Err(Error::config(
            field,
            format!("operator has dimension {}, system has {d_s}", op.dim()),
        ));
    }
    Ok(op)
}

/// A model built from a config block.
#[derive(Clone, Debug)]
pub enum BuiltModel {
    Static(StaticModel),
    TimeDependent(TimeDependentModel),
}

impl BuiltModel {
    pub fn as_ref(&self) -> ModelRef<'_> {
        match self {
            BuiltModel::Static(m) => ModelRef::Static(m),
            BuiltModel::TimeDependent(m) => ModelRef::TimeDependent(m),
        }
    }
}

pub fn build_model(cfg: &ModelConfig, seed: u64) -> Result<BuiltModel> {
    let system_ops = cfg
        .system_ops
        .iter()
        .enumerate()
        .map(|(i, s)| resolve_op(s, cfg.d_s, &format!("model.system_ops[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let as_config = |e: Error| match e {
        Error::BudgetExceeded { .. } => e,
        other => Error::config("model", other.to_string()),
    };
    let model = match cfg.kind {
        ModelKind::Static => BuiltModel::Static(
            random_static_model(cfg.d_s, cfg.d_b, &system_ops, cfg.norm_bound, seed)
                .map_err(as_config)?,
        ),
        ModelKind::TimeDependent => BuiltModel::TimeDependent(
            random_time_dependent_model(
                cfg.d_s,
                cfg.d_b,
                &system_ops,
                cfg.degree,
                cfg.norm_bound,
                seed,
            )
            .map_err(as_config)?,
        ),
    };
    if cfg.drift.is_empty() {
        return Ok(model);
    }
    let td = match model {
        BuiltModel::Static(m) => m.to_time_dependent(),
        BuiltModel::TimeDependent(m) => m,
    };
    let degree = cfg.drift.iter().map(|d| d.coefficients.len()).max().unwrap_or(0);
    let mut drift = vec![ComplexOperator::zeros(cfg.d_s); degree];
    for (i, term) in cfg.drift.iter().enumerate() {
        let op = resolve_op(&term.op, cfg.d_s, &format!("model.drift[{i}].op"))?;
        for (p, &c) in term.coefficients.iter().enumerate() {
            drift[p] += &op.scale_real(c);
        }
    }
    let absorbed = absorb_drift(&td, &drift).map_err(|e| Error::config("model.drift", e.to_string()))?;
    Ok(BuiltModel::TimeDependent(absorbed))
}

pub fn build_sequence(cfg: &SequenceConfig, d_s: usize) -> Result<ControlSequence> {
    let field = |e: Error, f: &str| Error::config(f, e.to_string());
    let seq = match cfg.kind {
        SequenceKindConfig::Custom => {
            if cfg.pulses.is_empty() {
                return Err(Error::config("sequence.pulses", "custom sequences need pulses"));
            }
            let pulses = cfg
                .pulses
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let op = resolve_op(&p.op, d_s, &format!("sequence.pulses[{i}].op"))?;
                    PulseEvent::new(p.theta, op).map_err(|e| field(e, &format!("sequence.pulses[{i}]")))
                })
                .collect::<Result<Vec<_>>>()?;
            ControlSequence::from_pulses(d_s, pulses, ProtectedSet::full_algebra(d_s))
                .map_err(|e| field(e, "sequence.pulses"))?
        }
        kind => {
            if !cfg.pulses.is_empty() {
                return Err(Error::config(
                    "sequence.pulses",
                    "explicit pulses need kind \"custom\"",
                ));
            }
            let kind = match kind {
                SequenceKindConfig::Free => SequenceKind::Free,
                SequenceKindConfig::Periodic => SequenceKind::Periodic,
                _ => SequenceKind::Udd,
            };
            let axis = resolve_op(&cfg.axis, d_s, "sequence.axis")?;
            generate_sequence(kind, cfg.n, &axis).map_err(|e| field(e, "sequence"))?
        }
    };
    match &cfg.omega {
        None => Ok(seq),
        Some(names) => {
            let members = names
                .iter()
                .enumerate()
                .map(|(i, s)| resolve_op(s, d_s, &format!("sequence.omega[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let omega = ProtectedSet::new(members).map_err(|e| field(e, "sequence.omega"))?;
            seq.with_omega(omega).map_err(|e| field(e, "sequence.omega"))
        }
    }
}

/// Where to write, and how to run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

/// Files written by a run and the summary document.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub csv: Option<PathBuf>,
    pub summary_path: PathBuf,
    pub summary: Value,
}

/// Writes `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let name = path
        .file_name()
        .ok_or_else(|| Error::config("output", format!("`{}` is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads and runs a config file.
pub fn run_config(path: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    let cfg = ExperimentConfig::load(path)?;
    run_experiment(&cfg, opts)
}

/// Runs an experiment, on a dedicated thread pool when a thread count is
/// given. Results do not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let cfg = cfg.effective(opts.seed);
    match opts.threads {
        None => execute(&cfg, &opts.out_dir),
        Some(0) => Err(Error::config("--threads", "thread count must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::config("--threads", e.to_string()))?
            .install(|| execute(&cfg, &opts.out_dir)),
    }
}

fn scaling_summary(run: &ScalingRun, cfg: &ExperimentConfig, model: &str, seq: &str) -> Value {
    let max_defect = run
        .points
        .iter()
        .map(|p| p.unitarity_defect)
        .fold(0.0, f64::max);
    json!({
        "experiment": cfg.experiment.name(),
        "slope": run.fit.slope,
        "intercept": run.fit.intercept,
        "r_squared": run.fit.r_squared,
        "points_used": run.fit.points_used,
        "points_discarded_below_floor": run.fit.points_discarded_below_floor,
        "floor": run.floor,
        "seed": cfg.seed,
        "model_digest": model,
        "sequence_digest": seq,
        "max_unitarity_defect": max_defect,
    })
}

fn execute(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let (csv, summary) = match cfg.experiment {
        ExperimentKind::Scaling | ExperimentKind::ExpansionCheck | ExperimentKind::OrderCheck => {
            let model = build_model(&cfg.model, cfg.seed)?;
            let model = model.as_ref();
            let seq = build_sequence(&cfg.sequence, cfg.model.d_s)?;
            let (model_digest, seq_digest) = (model.digest(), seq.digest());
            match cfg.experiment {
                ExperimentKind::Scaling => {
                    let grid = cfg.grid.values()?;
                    let settings = cfg.settings.propagation()?;
                    let run = sweep_and_fit(model, &seq, &grid, seq.omega(), &settings, cfg.settings.floor)
                        .map_err(grid_error)?;
                    let summary = scaling_summary(&run, cfg, &model_digest, &seq_digest);
                    (Some(run.to_csv()), summary)
                }
                ExperimentKind::ExpansionCheck => {
                    let grid = cfg.grid.values()?;
                    let settings = cfg.settings.propagation()?;
                    let run = expansion_sweep(model, &seq, &grid, cfg.settings.order, &settings, cfg.settings.floor)
                        .map_err(grid_error)?;
                    let mut summary = scaling_summary(&run, cfg, &model_digest, &seq_digest);
                    summary["order"] = json!(cfg.settings.order);
                    (Some(run.to_csv()), summary)
                }
                _ => {
                    let frame = toggling_frame(&seq, &model.system_ops())
                        .map_err(|e| Error::config("sequence", e.to_string()))?;
                    let report = order_check(&frame, seq.omega(), cfg.settings.order)?;
                    let mut csv = String::from("order,count,max_violation,verdict\n");
                    for r in &report.rows {
                        csv.push_str(&format!(
                            "{},{},{:e},{}\n",
                            r.order,
                            r.count,
                            r.max_violation,
                            serde_json::to_value(r.verdict).unwrap().as_str().unwrap()
                        ));
                    }
                    let summary = json!({
                        "experiment": cfg.experiment.name(),
                        "achieved_order": report.achieved_order,
                        "rows": report.rows,
                        "seed": cfg.seed,
                        "model_digest": model_digest,
                        "sequence_digest": seq_digest,
                    });
                    (Some(csv), summary)
                }
            }
        }
        ExperimentKind::Witness => {
            let w = &cfg.witness;
            let wb = match w.random_h_dim {
                Some(h) => WitnessBath::random(w.n, w.d, h, cfg.seed),
                None => witness_bath(w.n, w.d),
            }
            .map_err(|e| match e {
                Error::BudgetExceeded { .. } => e,
                other => Error::config("witness", other.to_string()),
            })?;
            let cert = independence_certificate(&wb, w.use_b_plus)?;
            let checks = formula_checks(&wb)?;
            let mut csv = String::from("index,formula_deviation,b0_discrepancy\n");
            for c in &checks {
                csv.push_str(&format!(
                    "\"{}\",{:e},{:e}\n",
                    c.index, c.formula_deviation, c.b0_discrepancy
                ));
            }
            let max_dev = checks.iter().map(|c| c.formula_deviation).fold(0.0, f64::max);
            let max_b0 = checks.iter().map(|c| c.b0_discrepancy).fold(0.0, f64::max);
            let summary = json!({
                "experiment": cfg.experiment.name(),
                "certificate": cert,
                "certificate_holds": cert.holds(),
                "formula_indices_checked": checks.len(),
                "max_formula_deviation": max_dev,
                "max_b0_b_plus_discrepancy": max_b0,
                "b0_matches_b_plus": max_b0 <= 1e-12,
                "seed": cfg.seed,
            });
            (Some(csv), summary)
        }
        ExperimentKind::Lemma => {
            let family = lemma_family(cfg.lemma.k_prime, cfg.lemma.r).map_err(|e| match e {
                Error::BudgetExceeded { .. } => e,
                other => Error::config("lemma", other.to_string()),
            })?;
            let report = certify_lemma(&family)?;
            let summary = json!({
                "experiment": cfg.experiment.name(),
                "report": report,
                "holds": report.holds(),
            });
            (None, summary)
        }
    };

    let csv_path = match (&csv, &cfg.output.csv) {
        (Some(text), Some(name)) => {
            let p = out_dir.join(name);
            write_atomic(&p, text.as_bytes())?;
            Some(p)
        }
        _ => None,
    };
    let summary_name = cfg.output.summary.clone().unwrap_or_else(|| "summary.json".into());
    let summary_path = out_dir.join(summary_name);
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    write_atomic(&summary_path, text.as_bytes())?;
    Ok(RunOutcome {
        csv: csv_path,
        summary_path,
        summary,
    })
}

/// Grid and fit problems come from the config, everything else passes
/// through.
fn grid_error(e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) => Error::config("grid", msg),
        other => other,
    }
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::NotUnitary(_) => EXIT_NON_CONVERGENCE,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Io(_) => EXIT_FAILURE,
        _ => EXIT_CONFIG,
    }
}

/// Machine-readable error record.
pub fn error_record(e: &Error) -> Value {
    let kind = match e {
        Error::Config { .. } => "config",
        Error::NonConvergence { .. } => "non-convergence",
        Error::NotUnitary(_) => "non-unitary",
        Error::BudgetExceeded { .. } => "budget-exceeded",
        Error::Io(_) => "io",
        _ => "invalid-input",
    };
    let mut rec = json!({
        "error": kind,
        "exit_code": exit_code(e),
        "message": e.to_string(),
    });
    match e {
        Error::Config { field, .. } => rec["field"] = json!(field),
        Error::NonConvergence { t, steps } => {
            rec["T"] = json!(t);
            rec["steps"] = json!(steps);
        }
        _ => {}
    }
    rec
}

/// Names understood in config documents.
#[derive(Clone, Debug, Serialize)]
pub struct Catalog {
    pub experiments: Vec<&'static str>,
    pub sequence_kinds: Vec<&'static str>,
    pub model_kinds: Vec<&'static str>,
    pub operator_names: Vec<&'static str>,
    pub operator_words: &'static str,
}

pub fn list_builtins() -> Catalog {
    let mut sequence_kinds: Vec<&'static str> = SequenceKind::ALL.iter().map(|k| k.name()).collect();
    sequence_kinds.push("custom");
    Catalog {
        experiments: ExperimentKind::ALL.iter().map(|k| k.name()).collect(),
        sequence_kinds,
        model_kinds: vec!["static", "time-dependent"],
        operator_names: vec!["I", "X", "Y", "Z", "sigma_x", "sigma_y", "sigma_z"],
        operator_words: "Pauli words over I, X, Y, Z (e.g. \"XZ\" for a two-qubit X ⊗ Z), or explicit [[re, im], ...] rows",
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiments:    {}", self.experiments.join(", "))?;
        writeln!(f, "sequence kinds: {}", self.sequence_kinds.join(", "))?;
        writeln!(f, "model kinds:    {}", self.model_kinds.join(", "))?;
        writeln!(f, "operators:      {}", self.operator_names.join(", "))?;
        writeln!(f, "                {}", self.operator_words)
    }
}
