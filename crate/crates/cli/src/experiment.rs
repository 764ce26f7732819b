//! The experiment runner: config handling, the partition → FedKT →
//! baselines → evaluation pipeline, and sweep modes over query fraction,
//! public-set fraction, partitions, and subsets.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use fedkt_core::domain::{Dataset, PrivacyLevel};
use fedkt_core::models::ModelSpec;
use fedkt_core::partition::{dirichlet_partition, homogeneous_partition};
use fedkt_core::privacy::PrivacyReport;
use fedkt_core::rng::RngHandle;
use fedkt_core::transfer::{run_fedkt, FedKtConfig, FedKtRun};

use crate::baselines::{baseline_centralized_pate, baseline_solo};
use crate::formats::{load_dataset, DataFormat, LoadedDataset};
use crate::report::{
    CommunicationSummary, DatasetSummary, GapStats, MethodResults, MethodSummary, PartySummary,
    RunReport, SweepPoint, SweepReport, Timings, REPORT_SCHEMA_VERSION,
};
use crate::split::{split_train_public_test, SplitFractions};
use crate::{accuracy, stage, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub split: SplitFractions,
    pub partition: PartitionScheme,
    pub fedkt: FedKtParams,
    #[serde(default)]
    pub baselines: BaselinesConfig,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub path: PathBuf,
    pub format: DataFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum PartitionScheme {
    Dirichlet { beta: f64 },
    Homogeneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FedKtParams {
    pub parties: usize,
    pub partitions: usize,
    pub subsets: usize,
    #[serde(default)]
    pub gamma: f64,
    pub level: PrivacyLevel,
    #[serde(default = "default_query_fraction")]
    pub query_fraction: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub teacher: ModelSpec,
    pub student: ModelSpec,
    #[serde(rename = "final")]
    pub final_model: ModelSpec,
    #[serde(default)]
    pub disable_consistent_voting: bool,
}

fn default_query_fraction() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    1e-5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselinesConfig {
    #[serde(default = "default_true")]
    pub solo: bool,
    #[serde(default = "default_true")]
    pub pate: bool,
    /// Teachers for the centralized baseline; defaults to the party count.
    #[serde(default)]
    pub pate_teachers: Option<usize>,
    #[serde(default = "default_fedavg_rounds")]
    pub fedavg_rounds: usize,
}

fn default_true() -> bool {
    true
}

fn default_fedavg_rounds() -> usize {
    10
}

impl Default for BaselinesConfig {
    fn default() -> Self {
        Self {
            solo: true,
            pate: true,
            pate_teachers: None,
            fedavg_rounds: default_fedavg_rounds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    QueryFraction,
    PublicFraction,
    Partitions,
    Subsets,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::QueryFraction => "query_fraction",
            SweepParameter::PublicFraction => "public_fraction",
            SweepParameter::Partitions => "partitions",
            SweepParameter::Subsets => "subsets",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "query_fraction" => Some(Self::QueryFraction),
            "public_fraction" => Some(Self::PublicFraction),
            "partitions" | "s" => Some(Self::Partitions),
            "subsets" | "t" => Some(Self::Subsets),
            _ => None,
        }
    }
}

/// One FedKT trial's distilled results.
struct TrialOutcome {
    fedkt_accuracy: f64,
    privacy: PrivacyReport,
    run: FedKtRun,
    party_summaries: Vec<PartySummary>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let t_start = Instant::now();
    let mut timings = Timings::default();
    validate_config(cfg)?;

    let t_load = Instant::now();
    let loaded = load_dataset(&cfg.dataset.path, cfg.dataset.format)?;
    timings
        .stages
        .insert("load".into(), t_load.elapsed().as_secs_f64());

    // base runs, one per trial
    let t_runs = Instant::now();
    let mut fedkt_acc = Vec::with_capacity(cfg.trials);
    let mut solo_acc = Vec::new();
    let mut pate_acc = Vec::new();
    let mut privacy = Vec::with_capacity(cfg.trials);
    let mut first_trial: Option<TrialOutcome> = None;
    for trial in 0..cfg.trials {
        let seed = cfg.seed.wrapping_add(trial as u64);
        let outcome = run_trial(&loaded, cfg, &cfg.fedkt, 1.0, seed)?;
        fedkt_acc.push(outcome.fedkt_accuracy);
        privacy.push(outcome.privacy.clone());

        if cfg.baselines.solo || cfg.baselines.pate {
            let parts = split_and_partition(&loaded.dataset, cfg, &cfg.fedkt, 1.0, seed)?;
            let master = RngHandle::new(seed);
            if cfg.baselines.solo {
                let solo = baseline_solo(
                    &parts.parties,
                    &parts.test,
                    &cfg.fedkt.final_model,
                    &master.derive([31, 0, 0]),
                )?;
                solo_acc.push(solo.mean_accuracy);
            }
            if cfg.baselines.pate {
                let teachers = cfg.baselines.pate_teachers.unwrap_or(cfg.fedkt.parties);
                let acc = baseline_centralized_pate(
                    &parts.train,
                    &parts.public.without_labels(),
                    &parts.test,
                    teachers,
                    &cfg.fedkt.final_model,
                    &master.derive([32, 0, 0]),
                )?;
                pate_acc.push(acc);
            }
        }
        if first_trial.is_none() {
            first_trial = Some(outcome);
        }
    }
    timings
        .stages
        .insert("base_runs".into(), t_runs.elapsed().as_secs_f64());

    // sweep runs
    let sweep = match &cfg.sweep {
        Some(sweep_cfg) => {
            let t_sweep = Instant::now();
            let mut points = Vec::with_capacity(sweep_cfg.values.len());
            for &value in &sweep_cfg.values {
                let (params, public_fraction) = apply_sweep(&cfg.fedkt, sweep_cfg.parameter, value)?;
                let mut accs = Vec::with_capacity(cfg.trials);
                let mut epsilons = Vec::new();
                for trial in 0..cfg.trials {
                    let seed = cfg.seed.wrapping_add(trial as u64);
                    let outcome = run_trial(&loaded, cfg, &params, public_fraction, seed)?;
                    accs.push(outcome.fedkt_accuracy);
                    if let Some(eps) = outcome.privacy.epsilon {
                        epsilons.push(eps);
                    }
                }
                points.push(SweepPoint {
                    value,
                    accuracy_mean: crate::mean(&accs),
                    accuracy_per_trial: accs,
                    epsilon_mean: (!epsilons.is_empty()).then(|| crate::mean(&epsilons)),
                });
            }
            timings
                .stages
                .insert("sweep".into(), t_sweep.elapsed().as_secs_f64());
            Some(SweepReport {
                parameter: sweep_cfg.parameter.name().into(),
                points,
            })
        }
        None => None,
    };

    let first = first_trial.expect("at least one trial");
    let n_students = cfg.fedkt.parties * cfg.fedkt.partitions;
    let mean_student_bytes =
        first.run.communication_bytes as f64 / first.run.student_bytes.len() as f64;
    let fedavg_total_bytes = (2.0
        * cfg.fedkt.parties as f64
        * mean_student_bytes
        * cfg.baselines.fedavg_rounds as f64)
        .round() as u64;

    let gaps: Vec<f64> = first.run.server_records.iter().map(|r| r.gap).collect();
    let zero_votes = first
        .run
        .server_records
        .iter()
        .filter(|r| r.zero_votes)
        .count();

    let split_sizes = split_sizes(&loaded.dataset, cfg.split);
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.clone(),
        dataset: DatasetSummary {
            examples: loaded.dataset.len(),
            input_columns: loaded.columns.len(),
            encoded_dim: loaded.dataset.dim(),
            num_classes: loaded.dataset.num_classes(),
            label_mapping: loaded.label_mapping.clone(),
            train_size: split_sizes.0,
            public_size: split_sizes.1,
            test_size: split_sizes.2,
        },
        partition: first.party_summaries,
        methods: MethodResults {
            fedkt: MethodSummary::from_trials(fedkt_acc),
            solo: (!solo_acc.is_empty()).then(|| MethodSummary::from_trials(solo_acc)),
            pate: (!pate_acc.is_empty()).then(|| MethodSummary::from_trials(pate_acc)),
        },
        privacy,
        communication: CommunicationSummary {
            fedkt_total_bytes: first.run.communication_bytes,
            students: n_students,
            mean_student_bytes,
            fedavg_rounds: cfg.baselines.fedavg_rounds,
            fedavg_total_bytes,
        },
        gap_stats: GapStats::from_gaps(&gaps, zero_votes, cfg.fedkt.level == PrivacyLevel::L0),
        sweep,
        timings: Timings::default(),
        deviations: deviations_for(cfg),
    };

    let mut report = report;
    report.timings = timings;
    report.timings.total_secs = t_start.elapsed().as_secs_f64();

    if let Some(path) = &cfg.output {
        crate::report::write_report_atomic(&report, path)?;
    }
    Ok(report)
}

fn validate_config(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    cfg.split.validate()?;
    if let PartitionScheme::Dirichlet { beta } = cfg.partition {
        if !(beta > 0.0) {
            return Err(Error::Config("dirichlet beta must be > 0".into()));
        }
    }
    if let Some(sweep) = &cfg.sweep {
        if sweep.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
    }
    Ok(())
}

fn split_sizes(data: &Dataset, fractions: SplitFractions) -> (usize, usize, usize) {
    let n = data.len();
    let train = (fractions.train * n as f64).round() as usize;
    let public = (fractions.public * n as f64).round() as usize;
    (train, public, n - train - public)
}

struct SplitParts {
    train: Dataset,
    public: Dataset,
    test: Dataset,
    parties: Vec<Dataset>,
}

fn split_and_partition(
    data: &Dataset,
    cfg: &ExperimentConfig,
    params: &FedKtParams,
    public_fraction: f64,
    seed: u64,
) -> Result<SplitParts> {
    let master = RngHandle::new(seed);
    let mut split_rng = master.derive([21, 0, 0]);
    let (train, public, test) = split_train_public_test(data, cfg.split, &mut split_rng)?;
    // the split already shuffled, so a prefix is a random subsample
    let public = if public_fraction < 1.0 {
        let keep = ((public.len() as f64) * public_fraction).round().max(1.0) as usize;
        let indices: Vec<usize> = (0..keep.min(public.len())).collect();
        public.subset(&indices)
    } else {
        public
    };
    let mut part_rng = master.derive([22, 0, 0]);
    let layout = match cfg.partition {
        PartitionScheme::Dirichlet { beta } => {
            dirichlet_partition(&train, params.parties, beta, &mut part_rng)
                .map_err(stage("partition"))?
        }
        PartitionScheme::Homogeneous => homogeneous_partition(&train, params.parties, &mut part_rng)
            .map_err(stage("partition"))?,
    };
    let parties = layout
        .party_indices
        .iter()
        .map(|idx| train.subset(idx))
        .collect();
    Ok(SplitParts {
        train,
        public,
        test,
        parties,
    })
}

fn run_trial(
    loaded: &LoadedDataset,
    cfg: &ExperimentConfig,
    params: &FedKtParams,
    public_fraction: f64,
    seed: u64,
) -> Result<TrialOutcome> {
    let parts = split_and_partition(&loaded.dataset, cfg, params, public_fraction, seed)?;
    let party_summaries = parts
        .parties
        .iter()
        .map(|p| PartySummary {
            size: p.len(),
            class_histogram: p.class_histogram(),
        })
        .collect();

    let core_cfg = FedKtConfig {
        parties: params.parties,
        partitions: params.partitions,
        subsets: params.subsets,
        num_classes: loaded.dataset.num_classes(),
        gamma: params.gamma,
        level: params.level,
        query_fraction: params.query_fraction,
        delta: params.delta,
        teacher_spec: params.teacher.clone(),
        student_spec: params.student.clone(),
        final_spec: params.final_model.clone(),
        seed,
        disable_consistent_voting: params.disable_consistent_voting,
    };
    let master = RngHandle::new(seed);
    let aux = parts.public.without_labels();
    let run = run_fedkt(&parts.parties, &aux, &core_cfg, &master.derive([23, 0, 0]))
        .map_err(stage("fedkt"))?;
    let fedkt_accuracy = accuracy(&run.final_model, &parts.test)?;

    Ok(TrialOutcome {
        fedkt_accuracy,
        privacy: run.privacy.clone(),
        run,
        party_summaries,
    })
}

fn apply_sweep(
    base: &FedKtParams,
    parameter: SweepParameter,
    value: f64,
) -> Result<(FedKtParams, f64)> {
    let mut params = base.clone();
    let mut public_fraction = 1.0;
    match parameter {
        SweepParameter::QueryFraction => {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::Config(format!("query_fraction {value} out of (0, 1]")));
            }
            params.query_fraction = value;
        }
        SweepParameter::PublicFraction => {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::Config(format!("public_fraction {value} out of (0, 1]")));
            }
            public_fraction = value;
        }
        SweepParameter::Partitions => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!("partitions {value} must be a positive integer")));
            }
            params.partitions = value as usize;
        }
        SweepParameter::Subsets => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!("subsets {value} must be a positive integer")));
            }
            params.subsets = value as usize;
        }
    }
    Ok((params, public_fraction))
}

fn deviations_for(cfg: &ExperimentConfig) -> Vec<String> {
    let mut notes = vec![
        "dirichlet proportions are drawn per class, independently, from one seeded stream".into(),
    ];
    for (role, spec) in [
        ("teacher", &cfg.fedkt.teacher),
        ("student", &cfg.fedkt.student),
        ("final", &cfg.fedkt.final_model),
    ] {
        if let ModelSpec::RandomForest { n_trees, .. } = spec {
            if *n_trees < 100 {
                notes.push(format!(
                    "{role} random_forest uses {n_trees} trees at desk scale (reference tabular setup uses 100)"
                ));
            }
        }
    }
    notes
}
