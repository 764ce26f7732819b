//! Reference points for a run: SOLO (each party trains alone; mean test
//! accuracy) and the centralized teacher-ensemble upper bound (all data in
//! one place, disjoint teachers, noiseless plurality labels, one student).

use fedkt_core::domain::Dataset;
use fedkt_core::models::{fit, ModelSpec};
use fedkt_core::partition::make_local_split;
use fedkt_core::rng::RngHandle;
use fedkt_core::transfer::{ensemble_votes, noisy_argmax};

use crate::{accuracy, stage, Result};

#[derive(Debug, Clone)]
pub struct SoloResult {
    pub mean_accuracy: f64,
    pub per_party: Vec<f64>,
}

/// Train one model per party on its local data only; report the mean test
/// accuracy over parties.
pub fn baseline_solo(
    parties: &[Dataset],
    test: &Dataset,
    spec: &ModelSpec,
    rng: &RngHandle,
) -> Result<SoloResult> {
    let mut per_party = Vec::with_capacity(parties.len());
    for (i, local) in parties.iter().enumerate() {
        let mut party_rng = rng.derive([101, i as u64, 0]);
        let model = fit(spec, local, &mut party_rng).map_err(stage("solo"))?;
        per_party.push(accuracy(&model, test)?);
    }
    Ok(SoloResult {
        mean_accuracy: crate::mean(&per_party),
        per_party,
    })
}

/// Centralized knowledge transfer: `t_total` teachers on disjoint subsets
/// of the whole train set, plain-plurality labels on the public set, one
/// student, evaluated on test. No noise anywhere; this upper-bounds what
/// the federated run can reach with the same specs.
pub fn baseline_centralized_pate(
    train: &Dataset,
    public: &Dataset,
    test: &Dataset,
    t_total: usize,
    spec: &ModelSpec,
    rng: &RngHandle,
) -> Result<f64> {
    let mut split_rng = rng.derive([201, 0, 0]);
    let split =
        make_local_split(train.len(), 1, t_total, &mut split_rng).map_err(stage("pate"))?;
    let teachers = split.subsets[0]
        .iter()
        .enumerate()
        .map(|(k, subset)| {
            let mut teacher_rng = rng.derive([202, k as u64, 0]);
            fit(spec, &train.subset(subset), &mut teacher_rng)
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(stage("pate"))?;

    let mut vote_rng = rng.derive([203, 0, 0]);
    let labeled: Vec<fedkt_core::domain::Example> = (0..public.len())
        .map(|q| {
            let hist = ensemble_votes(&teachers, public.features(q), train.num_classes())?;
            let label = noisy_argmax(&hist, None, &mut vote_rng)?;
            Ok(fedkt_core::domain::Example {
                features: public.features(q).to_vec(),
                label: Some(label),
            })
        })
        .collect::<std::result::Result<_, fedkt_core::Error>>()
        .map_err(stage("pate"))?;
    let student_data = Dataset::new(train.num_classes(), train.dim(), labeled).map_err(stage("pate"))?;

    let mut student_rng = rng.derive([204, 0, 0]);
    let student = fit(spec, &student_data, &mut student_rng).map_err(stage("pate"))?;
    accuracy(&student, test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gen_blobs;

    fn spec() -> ModelSpec {
        ModelSpec::DecisionTree { max_depth: 5 }
    }

    #[test]
    fn solo_single_party_equals_centralized_training() {
        let train = gen_blobs(200, 4, 2, 1.5, 2, &mut RngHandle::new(1)).unwrap();
        let test = gen_blobs(200, 4, 2, 1.5, 2, &mut RngHandle::new(2)).unwrap();
        let solo = baseline_solo(std::slice::from_ref(&train), &test, &spec(), &RngHandle::new(3)).unwrap();
        let mut rng = RngHandle::new(3).derive([101, 0, 0]);
        let direct = fit(&spec(), &train, &mut rng).unwrap();
        let direct_acc = accuracy(&direct, &test).unwrap();
        assert_eq!(solo.mean_accuracy, direct_acc);
        assert_eq!(solo.per_party.len(), 1);
    }

    #[test]
    fn degenerate_single_class_party_scores_the_class_prior() {
        let train = gen_blobs(100, 3, 2, 1.0, 2, &mut RngHandle::new(4)).unwrap();
        let one_class: Vec<usize> = (0..train.len())
            .filter(|&i| train.label(i).unwrap().index() == 0)
            .collect();
        let party = train.subset(&one_class);
        let test = gen_blobs(200, 3, 2, 1.0, 2, &mut RngHandle::new(5)).unwrap();
        let solo = baseline_solo(&[party], &test, &spec(), &RngHandle::new(6)).unwrap();
        let prior = test.class_histogram()[0] as f64 / test.len() as f64;
        assert_eq!(solo.mean_accuracy, prior);
    }

    #[test]
    fn pate_with_one_teacher_is_plain_distillation() {
        let train = gen_blobs(150, 4, 2, 1.5, 2, &mut RngHandle::new(7)).unwrap();
        let public = gen_blobs(100, 4, 2, 1.5, 2, &mut RngHandle::new(8)).unwrap().without_labels();
        let test = gen_blobs(150, 4, 2, 1.5, 2, &mut RngHandle::new(9)).unwrap();
        let acc = baseline_centralized_pate(&train, &public, &test, 1, &spec(), &RngHandle::new(10))
            .unwrap();
        assert!(acc > 0.8);
    }
}
