//! Splitting data across parties and, within a party, into partitions of
//! disjoint subsets.
//!
//! Two party-level schemes: Dirichlet label skew (each class's mass is
//! spread over parties by a Dirichlet(β) draw) and homogeneous (one uniform
//! shuffle, near-equal chunks). Within a party, `make_local_split` builds
//! `s` independent partitions, each a disjoint cover of the local indices by
//! `t` near-equal subsets.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, Gamma};

use crate::domain::Dataset;
use crate::error::Error;
use crate::rng::RngHandle;

/// For each party, the list of example indices (into the global train set)
/// it holds. Lists are pairwise disjoint, cover every index, and are never
/// empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionLayout {
    pub party_indices: Vec<Vec<usize>>,
}

impl PartitionLayout {
    pub fn num_parties(&self) -> usize {
        self.party_indices.len()
    }

    pub fn party_sizes(&self) -> Vec<usize> {
        self.party_indices.iter().map(Vec::len).collect()
    }
}

/// One party's `s` partitions, each splitting the full local index set into
/// `t` disjoint subsets whose sizes differ by at most 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSplit {
    pub subsets: Vec<Vec<Vec<usize>>>,
}

impl LocalSplit {
    pub fn num_partitions(&self) -> usize {
        self.subsets.len()
    }
}

/// One draw of party proportions from Dirichlet(β, ..., β), via normalized
/// Gamma(β, 1) variates. Retries in the unlikely event every variate
/// underflows to zero.
pub fn sample_dirichlet_proportions(
    n: usize,
    beta: f64,
    rng: &mut RngHandle,
) -> Result<Vec<f64>, Error> {
    if n == 0 {
        return Err(Error::InvalidParameter("party count must be >= 1".into()));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dirichlet concentration must be > 0, got {beta}"
        )));
    }
    let gamma = Gamma::new(beta, 1.0)
        .map_err(|e| Error::InvalidParameter(format!("gamma distribution: {e}")))?;
    loop {
        let draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = draws.iter().sum();
        if sum > 0.0 && sum.is_finite() {
            return Ok(draws.iter().map(|d| d / sum).collect());
        }
    }
}

/// Allocate `total` items to parties in proportion `p` by largest remainder,
/// preserving the total exactly.
fn largest_remainder_counts(p: &[f64], total: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = Vec::with_capacity(p.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(p.len());
    let mut assigned = 0usize;
    for (j, &prop) in p.iter().enumerate() {
        let exact = prop * total as f64;
        let floor = libm::floor(exact) as usize;
        counts.push(floor);
        assigned += floor;
        remainders.push((exact - floor as f64, j));
    }
    // Largest remainders first; ties go to the smaller party index.
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for &(_, j) in remainders.iter().take(total - assigned) {
        counts[j] += 1;
    }
    counts
}

/// Dirichlet label-skew partition: for each class independently, draw a
/// proportion vector over the `n` parties from Dirichlet(β, ..., β) and
/// allocate that class's examples accordingly. Empty parties are repaired by
/// moving one example from the largest party.
pub fn dirichlet_partition(
    data: &Dataset,
    n: usize,
    beta: f64,
    rng: &mut RngHandle,
) -> Result<PartitionLayout, Error> {
    if n == 0 {
        return Err(Error::InvalidParameter("party count must be >= 1".into()));
    }
    if data.len() < n {
        return Err(Error::InsufficientData {
            examples: data.len(),
            parties: n,
        });
    }
    let class_counts = data.class_histogram();
    if let Some(class) = class_counts.iter().position(|&c| c == 0) {
        return Err(Error::ClassAbsent { class });
    }

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.num_classes()];
    for (i, example) in data.examples().iter().enumerate() {
        match example.label {
            Some(label) => by_class[label.index()].push(i),
            None => {
                return Err(Error::UnlabeledExample { index: i });
            }
        }
    }

    let mut party_indices: Vec<Vec<usize>> = vec![Vec::new(); n];
    for class_indices in &mut by_class {
        rng.shuffle(class_indices);
        let proportions = sample_dirichlet_proportions(n, beta, rng)?;
        let counts = largest_remainder_counts(&proportions, class_indices.len());
        let mut offset = 0;
        for (party, &count) in counts.iter().enumerate() {
            party_indices[party].extend_from_slice(&class_indices[offset..offset + count]);
            offset += count;
        }
    }

    repair_empty_parties(&mut party_indices);
    Ok(PartitionLayout { party_indices })
}

/// Move one example from the (currently) largest party into each empty
/// party, smallest empty index first. Total count >= n guarantees progress.
fn repair_empty_parties(party_indices: &mut [Vec<usize>]) {
    loop {
        let empty = match party_indices.iter().position(Vec::is_empty) {
            Some(i) => i,
            None => return,
        };
        let donor = party_indices
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        let moved = party_indices[donor].pop().unwrap();
        party_indices[empty].push(moved);
    }
}

/// A uniform random permutation of all indices split into `n` contiguous
/// chunks with sizes differing by at most 1.
pub fn homogeneous_partition(
    data: &Dataset,
    n: usize,
    rng: &mut RngHandle,
) -> Result<PartitionLayout, Error> {
    if n == 0 {
        return Err(Error::InvalidParameter("party count must be >= 1".into()));
    }
    if data.len() < n {
        return Err(Error::InsufficientData {
            examples: data.len(),
            parties: n,
        });
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    rng.shuffle(&mut order);
    Ok(PartitionLayout {
        party_indices: near_equal_chunks(&order, n),
    })
}

fn near_equal_chunks(order: &[usize], parts: usize) -> Vec<Vec<usize>> {
    let base = order.len() / parts;
    let extra = order.len() % parts;
    let mut chunks = Vec::with_capacity(parts);
    let mut offset = 0;
    for part in 0..parts {
        let size = base + usize::from(part < extra);
        chunks.push(order[offset..offset + size].to_vec());
        offset += size;
    }
    chunks
}

/// Build `s` independent partitions of a party's local index set, each a
/// fresh random permutation split into `t` disjoint near-equal subsets
/// covering all local indices.
pub fn make_local_split(
    local_size: usize,
    s: usize,
    t: usize,
    rng: &mut RngHandle,
) -> Result<LocalSplit, Error> {
    if s == 0 || t == 0 {
        return Err(Error::InvalidParameter(
            "partition and subset counts must be >= 1".into(),
        ));
    }
    if local_size < t {
        return Err(Error::PartyTooSmall {
            local_size,
            subsets: t,
        });
    }
    let mut subsets = Vec::with_capacity(s);
    for _ in 0..s {
        let mut order: Vec<usize> = (0..local_size).collect();
        rng.shuffle(&mut order);
        subsets.push(near_equal_chunks(&order, t));
    }
    Ok(LocalSplit { subsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Example;

    fn single_class_data(count: usize) -> Dataset {
        let examples = (0..count)
            .map(|i| Example::labeled(vec![i as f64], 0))
            .collect();
        Dataset::new(1, 1, examples).unwrap()
    }

    fn check_cover(layout: &PartitionLayout, total: usize) {
        let mut seen = vec![false; total];
        for party in &layout.party_indices {
            assert!(!party.is_empty());
            for &i in party {
                assert!(!seen[i], "index {i} assigned twice");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn single_party_holds_everything() {
        let data = single_class_data(100);
        let mut rng = RngHandle::new(0);
        let layout = dirichlet_partition(&data, 1, 0.5, &mut rng).unwrap();
        assert_eq!(layout.party_indices.len(), 1);
        assert_eq!(layout.party_indices[0].len(), 100);
        check_cover(&layout, 100);
    }

    #[test]
    fn dirichlet_rejects_more_parties_than_examples() {
        let data = single_class_data(3);
        let mut rng = RngHandle::new(0);
        let err = dirichlet_partition(&data, 4, 0.5, &mut rng).unwrap_err();
        assert_eq!(
            err,
            Error::InsufficientData {
                examples: 3,
                parties: 4
            }
        );
    }

    #[test]
    fn dirichlet_rejects_absent_class() {
        let examples = (0..10).map(|i| Example::labeled(vec![i as f64], 0)).collect();
        let data = Dataset::new(2, 1, examples).unwrap();
        let mut rng = RngHandle::new(0);
        assert_eq!(
            dirichlet_partition(&data, 2, 0.5, &mut rng).unwrap_err(),
            Error::ClassAbsent { class: 1 }
        );
    }

    #[test]
    fn dirichlet_covers_and_is_seed_deterministic() {
        let examples = (0..97)
            .map(|i| Example::labeled(vec![i as f64], i % 3))
            .collect();
        let data = Dataset::new(3, 1, examples).unwrap();
        let a = dirichlet_partition(&data, 7, 0.5, &mut RngHandle::new(9)).unwrap();
        let b = dirichlet_partition(&data, 7, 0.5, &mut RngHandle::new(9)).unwrap();
        assert_eq!(a, b);
        check_cover(&a, 97);
    }

    #[test]
    fn homogeneous_sizes_differ_by_at_most_one() {
        let data = single_class_data(11);
        let layout = homogeneous_partition(&data, 2, &mut RngHandle::new(1)).unwrap();
        let mut sizes = layout.party_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![5, 6]);
        check_cover(&layout, 11);
    }

    #[test]
    fn homogeneous_one_each() {
        let data = single_class_data(10);
        let layout = homogeneous_partition(&data, 10, &mut RngHandle::new(2)).unwrap();
        assert!(layout.party_sizes().iter().all(|&s| s == 1));
        check_cover(&layout, 10);
    }

    #[test]
    fn homogeneous_rejects_too_many_parties() {
        let data = single_class_data(3);
        assert!(matches!(
            homogeneous_partition(&data, 4, &mut RngHandle::new(0)),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn local_split_paper_defaults() {
        let split = make_local_split(10, 2, 5, &mut RngHandle::new(3)).unwrap();
        assert_eq!(split.subsets.len(), 2);
        for partition in &split.subsets {
            assert_eq!(partition.len(), 5);
            let mut seen = vec![false; 10];
            for subset in partition {
                assert_eq!(subset.len(), 2);
                for &i in subset {
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn local_split_identity() {
        let split = make_local_split(10, 1, 1, &mut RngHandle::new(4)).unwrap();
        let mut subset = split.subsets[0][0].clone();
        subset.sort_unstable();
        assert_eq!(subset, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn local_split_rejects_small_party() {
        assert_eq!(
            make_local_split(4, 2, 5, &mut RngHandle::new(0)).unwrap_err(),
            Error::PartyTooSmall {
                local_size: 4,
                subsets: 5
            }
        );
    }

    #[test]
    fn largest_remainder_preserves_total() {
        let counts = largest_remainder_counts(&[0.21, 0.33, 0.46], 10);
        assert_eq!(counts.iter().sum::<usize>(), 10);
        assert_eq!(counts, vec![2, 3, 5]);
    }

    #[test]
    fn empty_party_repair_moves_from_largest() {
        let mut parties = vec![vec![0, 1, 2, 3], vec![], vec![4]];
        repair_empty_parties(&mut parties);
        assert!(parties.iter().all(|p| !p.is_empty()));
        assert_eq!(parties[0], vec![0, 1, 2]);
        assert_eq!(parties[1], vec![3]);
    }
}
