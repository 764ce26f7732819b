//! The two-tier knowledge-transfer protocol.
//!
//! Party tier: each party builds `s` partitions of its local data, trains
//! `t` teachers per partition on disjoint subsets, labels the answered
//! public queries by (possibly noisy) plurality vote, and trains one
//! student per partition. Server tier: per-party student votes are folded
//! by consistent voting (a party contributes `s` votes to a class only when
//! all of its students agree), noised at L1, and the final model is trained
//! on the resulting labels.
//!
//! Laplace noise is injected at exactly one tier: the party tier at L2, the
//! server tier at L1, nowhere at L0. Pre-noise histograms are retained for
//! the privacy ledger.

use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::domain::{ClassId, Dataset, PrivacyLevel, VoteHistogram};
use crate::error::Error;
use crate::models::{fit, Classifier, ModelSpec};
use crate::partition::make_local_split;
use crate::privacy::{
    account_stream, compute_z, parallel_compose, sample_laplace, PrivacyReport,
    DATA_DEPENDENT_BANNER, DEFAULT_MAX_MOMENT_ORDER,
};
use crate::rng::RngHandle;

// Child-stream role tags.
const ROLE_QUERY_SELECT: u64 = 1;
const ROLE_LOCAL_SPLIT: u64 = 2;
const ROLE_TEACHER: u64 = 3;
const ROLE_PARTY_NOISE: u64 = 4;
const ROLE_STUDENT: u64 = 5;
const ROLE_SERVER_NOISE: u64 = 6;
const ROLE_FINAL: u64 = 7;

/// Full configuration of one FedKT run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FedKtConfig {
    /// Number of parties n.
    pub parties: usize,
    /// Partitions per party s.
    pub partitions: usize,
    /// Teacher subsets per partition t.
    pub subsets: usize,
    /// Number of classes u.
    pub num_classes: usize,
    /// Laplace privacy parameter γ (noise scale 1/γ). Ignored at L0.
    pub gamma: f64,
    pub level: PrivacyLevel,
    /// Fraction of the public set answered, in (0, 1].
    pub query_fraction: f64,
    /// Failure probability for the (ε, δ) conversion.
    pub delta: f64,
    pub teacher_spec: ModelSpec,
    pub student_spec: ModelSpec,
    pub final_spec: ModelSpec,
    pub seed: u64,
    /// Debug switch: aggregate raw student votes instead of consistent
    /// voting. Enables the example-level L1 ledger.
    #[serde(default)]
    pub disable_consistent_voting: bool,
}

impl FedKtConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.parties == 0 || self.partitions == 0 || self.subsets == 0 {
            return bad("n, s, t must all be >= 1");
        }
        if self.num_classes == 0 {
            return bad("num_classes must be >= 1");
        }
        if !(self.query_fraction > 0.0 && self.query_fraction <= 1.0) {
            return bad("query_fraction must be in (0, 1]");
        }
        if self.level != PrivacyLevel::L0 && !(self.gamma > 0.0) {
            return bad("gamma must be > 0 when a privacy level is active");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must be in (0, 1)");
        }
        self.teacher_spec.validate()?;
        self.student_spec.validate()?;
        self.final_spec.validate()
    }
}

/// One answered query's audit trail: the pre-noise vote histogram, the
/// label that was emitted (after noise, if any), and the pre-noise top-2
/// gap. `zero_votes` flags server-tier queries where consistent voting
/// produced an all-zero histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub histogram: VoteHistogram,
    pub emitted: ClassId,
    pub gap: f64,
    pub zero_votes: bool,
}

/// Count each model's predicted class for one query.
pub fn ensemble_votes(
    models: &[Classifier],
    x: &[f64],
    num_classes: usize,
) -> Result<VoteHistogram, Error> {
    if models.is_empty() {
        return Err(Error::EmptyInput { context: "models" });
    }
    let mut hist = VoteHistogram::zeros(num_classes);
    for model in models {
        hist.add_vote(model.predict(x)?);
    }
    Ok(hist)
}

/// Plain argmax when `gamma` is absent; otherwise argmax after adding
/// i.i.d. Laplace(0, 1/γ) noise to every count. Ties break toward the
/// smallest class id.
pub fn noisy_argmax(
    hist: &VoteHistogram,
    gamma: Option<f64>,
    rng: &mut RngHandle,
) -> Result<ClassId, Error> {
    match gamma {
        None => Ok(hist.argmax()),
        Some(gamma) => {
            if !(gamma > 0.0) {
                return Err(Error::InvalidParameter(
                    "gamma must be > 0 for noisy argmax".to_string(),
                ));
            }
            let scale = 1.0 / gamma;
            let mut noisy = VoteHistogram::zeros(hist.num_classes());
            for (class, &count) in hist.counts().iter().enumerate() {
                noisy.add_votes(ClassId(class), count + sample_laplace(scale, rng)?);
            }
            Ok(noisy.argmax())
        }
    }
}

/// Consistent voting: a party contributes `s` votes to class m iff all `s`
/// of its students predict m; otherwise it abstains.
pub fn consistent_vote(
    party_student_predictions: &[Vec<ClassId>],
    s: usize,
    num_classes: usize,
) -> Result<VoteHistogram, Error> {
    let mut hist = VoteHistogram::zeros(num_classes);
    for row in party_student_predictions {
        if row.len() != s {
            return Err(Error::InvalidParameter(
                "each party row must hold s student predictions".to_string(),
            ));
        }
        let first = row[0];
        if row.iter().all(|&p| p == first) {
            hist.add_votes(first, s as f64);
        }
    }
    Ok(hist)
}

/// One party's tier-one output: `s` students plus, per partition, the
/// per-query transfer records.
#[derive(Debug, Clone)]
pub struct PartyTierOutput {
    pub students: Vec<Classifier>,
    pub records: Vec<Vec<TransferRecord>>,
}

/// Run the party tier for one party: split, train teachers, label the
/// answered queries (noisy at L2), train one student per partition.
///
/// `party_rng` must be the party's own derived stream so parties can run in
/// any order or in parallel.
pub fn train_party_students(
    local: &Dataset,
    answered_aux: &Dataset,
    cfg: &FedKtConfig,
    party_rng: &RngHandle,
) -> Result<PartyTierOutput, Error> {
    if answered_aux.is_empty() {
        return Err(Error::EmptyInput {
            context: "answered public queries",
        });
    }
    let mut split_rng = party_rng.derive([ROLE_LOCAL_SPLIT, 0, 0]);
    let split = make_local_split(local.len(), cfg.partitions, cfg.subsets, &mut split_rng)?;

    let party_gamma = match cfg.level {
        PrivacyLevel::L2 => Some(cfg.gamma),
        _ => None,
    };

    let mut students = Vec::with_capacity(cfg.partitions);
    let mut records = Vec::with_capacity(cfg.partitions);
    for (j, partition) in split.subsets.iter().enumerate() {
        let teachers = partition
            .iter()
            .enumerate()
            .map(|(k, subset)| {
                let mut rng = party_rng.derive([ROLE_TEACHER, j as u64, k as u64]);
                fit(&cfg.teacher_spec, &local.subset(subset), &mut rng)
            })
            .collect::<Result<Vec<_>, Error>>()?;

        let mut noise_rng = party_rng.derive([ROLE_PARTY_NOISE, j as u64, 0]);
        let mut labels = Vec::with_capacity(answered_aux.len());
        let mut partition_records = Vec::with_capacity(answered_aux.len());
        for q in 0..answered_aux.len() {
            let hist = ensemble_votes(&teachers, answered_aux.features(q), cfg.num_classes)?;
            let emitted = noisy_argmax(&hist, party_gamma, &mut noise_rng)?;
            let gap = if cfg.num_classes >= 2 { hist.top_two_gap() } else { 0.0 };
            partition_records.push(TransferRecord {
                gap,
                zero_votes: false,
                emitted,
                histogram: hist,
            });
            labels.push(emitted);
        }

        let student_data = labeled_copy(answered_aux, &labels)?;
        let mut student_rng = party_rng.derive([ROLE_STUDENT, j as u64, 0]);
        students.push(fit(&cfg.student_spec, &student_data, &mut student_rng)?);
        records.push(partition_records);
    }

    Ok(PartyTierOutput { students, records })
}

fn labeled_copy(features_from: &Dataset, labels: &[ClassId]) -> Result<Dataset, Error> {
    let examples = features_from
        .examples()
        .iter()
        .zip(labels.iter())
        .map(|(example, &label)| crate::domain::Example {
            features: example.features.clone(),
            label: Some(label),
        })
        .collect();
    Dataset::new(features_from.num_classes(), features_from.dim(), examples)
}

/// Everything a completed run exposes for evaluation and reporting.
#[derive(Debug, Clone)]
pub struct FedKtRun {
    pub final_model: Classifier,
    pub students: Vec<Vec<Classifier>>,
    /// Indices into the public set, in answer order.
    pub answered_queries: Vec<usize>,
    pub server_records: Vec<TransferRecord>,
    /// `[party][partition][query]`
    pub party_records: Vec<Vec<Vec<TransferRecord>>>,
    pub privacy: PrivacyReport,
    /// Sum of the students' canonical serializations: the one-shot upload.
    pub communication_bytes: u64,
    pub student_bytes: Vec<u64>,
}

/// The whole protocol: party tier for all n parties, consistent voting and
/// (at L1) Laplace noise at the server, final-model distillation, privacy
/// accounting, and communication totals.
pub fn run_fedkt(
    parties: &[Dataset],
    aux: &Dataset,
    cfg: &FedKtConfig,
    rng: &RngHandle,
) -> Result<FedKtRun, Error> {
    cfg.validate()?;
    if parties.len() != cfg.parties {
        return Err(Error::InvalidParameter(
            "party dataset count differs from cfg.parties".to_string(),
        ));
    }

    let answered_queries = select_queries(aux.len(), cfg.query_fraction, rng)?;
    let answered_aux = aux.subset(&answered_queries).without_labels();

    let mut students: Vec<Vec<Classifier>> = Vec::with_capacity(parties.len());
    let mut party_records = Vec::with_capacity(parties.len());
    for (i, local) in parties.iter().enumerate() {
        let party_rng = rng.derive([0, i as u64, 0]);
        let output = train_party_students(local, &answered_aux, cfg, &party_rng)?;
        students.push(output.students);
        party_records.push(output.records);
    }

    let server_gamma = match cfg.level {
        PrivacyLevel::L1 => Some(cfg.gamma),
        _ => None,
    };
    let mut server_noise_rng = rng.derive([ROLE_SERVER_NOISE, 0, 0]);
    let mut server_records = Vec::with_capacity(answered_aux.len());
    let mut final_labels = Vec::with_capacity(answered_aux.len());
    for q in 0..answered_aux.len() {
        let x = answered_aux.features(q);
        let hist = if cfg.disable_consistent_voting {
            let mut hist = VoteHistogram::zeros(cfg.num_classes);
            for party_students in &students {
                for student in party_students {
                    hist.add_vote(student.predict(x)?);
                }
            }
            hist
        } else {
            let rows = students
                .iter()
                .map(|party_students| {
                    party_students
                        .iter()
                        .map(|student| student.predict(x))
                        .collect::<Result<Vec<_>, Error>>()
                })
                .collect::<Result<Vec<_>, Error>>()?;
            consistent_vote(&rows, cfg.partitions, cfg.num_classes)?
        };
        let zero_votes = hist.total() == 0.0;
        let emitted = noisy_argmax(&hist, server_gamma, &mut server_noise_rng)?;
        let gap = if cfg.num_classes >= 2 { hist.top_two_gap() } else { 0.0 };
        final_labels.push(emitted);
        server_records.push(TransferRecord {
            gap,
            zero_votes,
            emitted,
            histogram: hist,
        });
    }

    let final_data = labeled_copy(&answered_aux, &final_labels)?;
    let mut final_rng = rng.derive([ROLE_FINAL, 0, 0]);
    let final_model = fit(&cfg.final_spec, &final_data, &mut final_rng)?;

    let student_bytes: Vec<u64> = students
        .iter()
        .flat_map(|per_party| per_party.iter())
        .map(|s| s.serialized_size() as u64)
        .collect();
    let communication_bytes = student_bytes.iter().sum();

    let privacy = build_privacy_report(cfg, &server_records, &party_records)?;

    Ok(FedKtRun {
        final_model,
        students,
        answered_queries,
        server_records,
        party_records,
        privacy,
        communication_bytes,
        student_bytes,
    })
}

/// First ⌈query_fraction · |aux|⌉ positions of a seeded shuffle of the
/// public set.
fn select_queries(
    aux_len: usize,
    query_fraction: f64,
    rng: &RngHandle,
) -> Result<Vec<usize>, Error> {
    let take = libm::ceil(query_fraction * aux_len as f64) as usize;
    if take == 0 {
        return Err(Error::NoQueriesAnswered);
    }
    let mut order: Vec<usize> = (0..aux_len).collect();
    let mut query_rng = rng.derive([ROLE_QUERY_SELECT, 0, 0]);
    query_rng.shuffle(&mut order);
    order.truncate(take);
    Ok(order)
}

fn build_privacy_report(
    cfg: &FedKtConfig,
    server_records: &[TransferRecord],
    party_records: &[Vec<Vec<TransferRecord>>],
) -> Result<PrivacyReport, Error> {
    let queries = server_records.len();
    match cfg.level {
        PrivacyLevel::L0 => Ok(PrivacyReport::no_privacy(queries, cfg.delta)),
        PrivacyLevel::L1 => {
            let outcome = account_stream(
                server_records.iter().map(|r| &r.histogram),
                cfg.partitions,
                cfg.gamma,
                cfg.delta,
                DEFAULT_MAX_MOMENT_ORDER,
            )?;
            // Example-level view only makes sense without consistent voting
            // (with it, one example can still swing all s of a party's
            // votes, so the example-level ledger coincides with the
            // party-level one).
            let (example_level_epsilon, example_level_z) = if cfg.disable_consistent_voting {
                let gaps: Vec<Vec<Vec<f64>>> = party_records
                    .iter()
                    .map(|partitions| {
                        partitions
                            .iter()
                            .map(|records| records.iter().map(|r| r.gap).collect())
                            .collect()
                    })
                    .collect();
                let z = compute_z(&gaps);
                let eps = if z == 0 {
                    0.0
                } else {
                    account_stream(
                        server_records.iter().map(|r| &r.histogram),
                        z,
                        cfg.gamma,
                        cfg.delta,
                        DEFAULT_MAX_MOMENT_ORDER,
                    )?
                    .epsilon
                };
                (Some(eps), Some(z))
            } else {
                (None, None)
            };
            Ok(PrivacyReport {
                level: cfg.level,
                gamma: Some(cfg.gamma),
                delta: cfg.delta,
                queries_answered: queries,
                epsilon: Some(outcome.epsilon),
                per_party_epsilon: None,
                lambda_star: Some(outcome.lambda_star),
                data_dependent_fraction: fraction(
                    outcome.data_dependent_queries,
                    outcome.total_queries,
                ),
                example_level_epsilon,
                example_level_z,
                note: Some(DATA_DEPENDENT_BANNER.to_string()),
            })
        }
        PrivacyLevel::L2 => {
            // Partitions of one party share its local data, so their query
            // streams compose sequentially; parties hold disjoint data and
            // compose in parallel.
            let mut per_party_epsilon = Vec::with_capacity(party_records.len());
            let mut dd = 0usize;
            let mut total = 0usize;
            let mut lambda_of_max = None;
            let mut max_eps = f64::NEG_INFINITY;
            for partitions in party_records {
                let outcome = account_stream(
                    partitions
                        .iter()
                        .flat_map(|records| records.iter().map(|r| &r.histogram)),
                    1,
                    cfg.gamma,
                    cfg.delta,
                    DEFAULT_MAX_MOMENT_ORDER,
                )?;
                if outcome.epsilon > max_eps {
                    max_eps = outcome.epsilon;
                    lambda_of_max = Some(outcome.lambda_star);
                }
                dd += outcome.data_dependent_queries;
                total += outcome.total_queries;
                per_party_epsilon.push(outcome.epsilon);
            }
            let (epsilon, _) = parallel_compose(&per_party_epsilon, cfg.delta)?;
            Ok(PrivacyReport {
                level: cfg.level,
                gamma: Some(cfg.gamma),
                delta: cfg.delta,
                queries_answered: queries,
                epsilon: Some(epsilon),
                per_party_epsilon: Some(per_party_epsilon),
                lambda_star: lambda_of_max,
                data_dependent_fraction: fraction(dd, total),
                example_level_epsilon: None,
                example_level_z: None,
                note: Some(DATA_DEPENDENT_BANNER.to_string()),
            })
        }
    }
}

fn fraction(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Example;
    use crate::models::ModelSpec;

    fn tree_spec() -> ModelSpec {
        ModelSpec::DecisionTree { max_depth: 4 }
    }

    fn blob_dataset(seed: u64, n: usize, labeled: bool) -> Dataset {
        let mut rng = RngHandle::new(seed);
        let examples: Vec<Example> = (0..n)
            .map(|i| {
                let class = i % 2;
                let c = if class == 0 { -2.0 } else { 2.0 };
                let features = vec![c + rng.uniform() - 0.5, c + rng.uniform() - 0.5];
                if labeled {
                    Example::labeled(features, class)
                } else {
                    Example::unlabeled(features)
                }
            })
            .collect();
        Dataset::new(2, 2, examples).unwrap()
    }

    fn config(level: PrivacyLevel) -> FedKtConfig {
        FedKtConfig {
            parties: 3,
            partitions: 2,
            subsets: 2,
            num_classes: 2,
            gamma: 0.1,
            level,
            query_fraction: 1.0,
            delta: 1e-5,
            teacher_spec: tree_spec(),
            student_spec: tree_spec(),
            final_spec: tree_spec(),
            seed: 7,
            disable_consistent_voting: false,
        }
    }

    #[test]
    fn ensemble_votes_counts_predictions() {
        let data = blob_dataset(1, 40, true);
        let mut rng = RngHandle::new(0);
        let model = fit(&tree_spec(), &data, &mut rng).unwrap();
        let hist = ensemble_votes(
            &[model.clone(), model.clone(), model],
            data.features(0),
            2,
        )
        .unwrap();
        assert_eq!(hist.total(), 3.0);
        assert_eq!(hist.counts()[0], 3.0);
        assert!(ensemble_votes(&[], &[0.0, 0.0], 2).is_err());
    }

    #[test]
    fn noisy_argmax_plain_path() {
        let mut rng = RngHandle::new(0);
        let hist = VoteHistogram::from_counts(3, vec![0.0, 5.0, 0.0]).unwrap();
        assert_eq!(noisy_argmax(&hist, None, &mut rng).unwrap(), ClassId(1));
        let tie = VoteHistogram::from_counts(2, vec![3.0, 3.0]).unwrap();
        assert_eq!(noisy_argmax(&tie, None, &mut rng).unwrap(), ClassId(0));
    }

    #[test]
    fn noisy_argmax_huge_gamma_matches_plain() {
        let mut rng = RngHandle::new(3);
        let hist = VoteHistogram::from_counts(3, vec![1.0, 4.0, 2.0]).unwrap();
        for _ in 0..200 {
            assert_eq!(
                noisy_argmax(&hist, Some(1e9), &mut rng).unwrap(),
                ClassId(1)
            );
        }
    }

    #[test]
    fn consistent_vote_definition() {
        let rows = vec![
            vec![ClassId(0), ClassId(0)],
            vec![ClassId(0), ClassId(1)],
            vec![ClassId(1), ClassId(1)],
        ];
        let hist = consistent_vote(&rows, 2, 2).unwrap();
        assert_eq!(hist.counts(), &[2.0, 2.0]);

        let unanimous = vec![vec![ClassId(0); 3]; 4];
        let hist = consistent_vote(&unanimous, 3, 2).unwrap();
        assert_eq!(hist.counts(), &[12.0, 0.0]);

        let split = vec![vec![ClassId(0), ClassId(1)]; 5];
        let hist = consistent_vote(&split, 2, 2).unwrap();
        assert_eq!(hist.total(), 0.0);

        assert!(consistent_vote(&[vec![ClassId(0)]], 2, 2).is_err());
    }

    #[test]
    fn single_teacher_labels_pass_through_at_l0() {
        // s=1, t=1: the "ensemble" is one teacher, so pre-student labels
        // equal the teacher's own predictions.
        let mut cfg = config(PrivacyLevel::L0);
        cfg.parties = 1;
        cfg.partitions = 1;
        cfg.subsets = 1;
        let local = blob_dataset(2, 30, true);
        let aux = blob_dataset(3, 20, false);
        let rng = RngHandle::new(9);
        let party_rng = rng.derive([0, 0, 0]);
        let out = train_party_students(&local, &aux, &cfg, &party_rng).unwrap();
        assert_eq!(out.students.len(), 1);
        let mut teacher_rng = party_rng.derive([ROLE_TEACHER, 0, 0]);
        let all: Vec<usize> = (0..local.len()).collect();
        let split_rng = &mut party_rng.derive([ROLE_LOCAL_SPLIT, 0, 0]);
        let split = make_local_split(local.len(), 1, 1, split_rng).unwrap();
        assert_eq!(split.subsets[0][0].len(), all.len());
        let teacher = fit(&cfg.teacher_spec, &local.subset(&split.subsets[0][0]), &mut teacher_rng).unwrap();
        for (q, record) in out.records[0].iter().enumerate() {
            assert_eq!(record.emitted, teacher.predict(aux.features(q)).unwrap());
            assert_eq!(record.histogram.total(), 1.0);
        }
    }

    #[test]
    fn l2_histograms_are_integer_valued_pre_noise() {
        let cfg = config(PrivacyLevel::L2);
        let parties: Vec<Dataset> = (0..3).map(|i| blob_dataset(10 + i, 24, true)).collect();
        let aux = blob_dataset(20, 30, false);
        let run = run_fedkt(&parties, &aux, &cfg, &RngHandle::new(5)).unwrap();
        for partitions in &run.party_records {
            assert_eq!(partitions.len(), cfg.partitions);
            for records in partitions {
                for record in records {
                    assert!(record.histogram.is_integer_valued());
                    assert_eq!(record.histogram.total(), cfg.subsets as f64);
                }
            }
        }
        assert!(run.privacy.epsilon.unwrap() > 0.0);
        assert_eq!(
            run.privacy.per_party_epsilon.as_ref().unwrap().len(),
            cfg.parties
        );
    }

    #[test]
    fn server_counts_are_multiples_of_s() {
        let cfg = config(PrivacyLevel::L0);
        let parties: Vec<Dataset> = (0..3).map(|i| blob_dataset(30 + i, 24, true)).collect();
        let aux = blob_dataset(40, 25, false);
        let run = run_fedkt(&parties, &aux, &cfg, &RngHandle::new(5)).unwrap();
        let s = cfg.partitions as f64;
        for record in &run.server_records {
            for &count in record.histogram.counts() {
                assert_eq!(count % s, 0.0);
            }
            assert!(record.histogram.total() <= s * cfg.parties as f64);
            let consistent = record.histogram.total() / s;
            assert_eq!(consistent, libm::floor(consistent));
        }
    }

    #[test]
    fn l0_runs_are_deterministic() {
        let cfg = config(PrivacyLevel::L0);
        let parties: Vec<Dataset> = (0..3).map(|i| blob_dataset(50 + i, 24, true)).collect();
        let aux = blob_dataset(60, 30, false);
        let a = run_fedkt(&parties, &aux, &cfg, &RngHandle::new(8)).unwrap();
        let b = run_fedkt(&parties, &aux, &cfg, &RngHandle::new(8)).unwrap();
        assert_eq!(a.answered_queries, b.answered_queries);
        for q in 0..aux.len() {
            assert_eq!(
                a.final_model.predict(aux.features(q)).unwrap(),
                b.final_model.predict(aux.features(q)).unwrap()
            );
        }
        assert_eq!(a.communication_bytes, b.communication_bytes);
    }

    #[test]
    fn record_gaps_match_sorted_counts() {
        let cfg = config(PrivacyLevel::L0);
        let parties: Vec<Dataset> = (0..3).map(|i| blob_dataset(70 + i, 24, true)).collect();
        let aux = blob_dataset(80, 20, false);
        let run = run_fedkt(&parties, &aux, &cfg, &RngHandle::new(4)).unwrap();
        for record in run
            .server_records
            .iter()
            .chain(run.party_records.iter().flatten().flatten())
        {
            let mut sorted = record.histogram.counts().to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let expected = sorted[sorted.len() - 1] - sorted[sorted.len() - 2];
            assert_eq!(record.gap, expected);
        }
    }

    #[test]
    fn query_fraction_selects_ceil() {
        let rng = RngHandle::new(1);
        assert_eq!(select_queries(10, 0.25, &rng).unwrap().len(), 3);
        assert_eq!(select_queries(10, 1.0, &rng).unwrap().len(), 10);
        assert!(matches!(
            select_queries(0, 0.5, &rng),
            Err(Error::NoQueriesAnswered)
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(PrivacyLevel::L1);
        cfg.gamma = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = config(PrivacyLevel::L0);
        cfg.query_fraction = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = config(PrivacyLevel::L0);
        cfg.parties = 0;
        assert!(cfg.validate().is_err());
    }
}
