//! Laplace mechanism and the data-dependent moments accountant.
//!
//! Per noisy-argmax query, the accountant bounds the log moment generating
//! function of the privacy loss at integer orders λ = 1..L_max by the
//! smaller of two branches: a data-independent quadratic bound that holds
//! for any (2kγ, 0)-DP mechanism, and a data-dependent bound that kicks in
//! when the probability q of the noisy answer differing from the plurality
//! answer is small. Moments add under sequential composition; mechanisms on
//! disjoint data compose at the maximum ε. The tail bound
//! ε = min_λ (α(λ) + ln(1/δ))/λ converts the ledger to an (ε, δ) statement.
//!
//! Everything is evaluated in log space so large λ·γ·k exponents cannot
//! overflow.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::domain::{PrivacyLevel, VoteHistogram};
use crate::error::Error;
use crate::rng::RngHandle;

/// Default number of integer moment orders tracked.
pub const DEFAULT_MAX_MOMENT_ORDER: usize = 64;

/// One draw from Laplace(0, scale) by inverse CDF on a uniform draw.
pub fn sample_laplace(scale: f64, rng: &mut RngHandle) -> Result<f64, Error> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "laplace scale must be > 0, got {scale}"
        )));
    }
    // u = 0 would map to -infinity; redraw (probability 2^-53 per draw).
    let mut u = rng.uniform();
    while u == 0.0 {
        u = rng.uniform();
    }
    let centered = u - 0.5;
    let sign = if centered < 0.0 { -1.0 } else { 1.0 };
    Ok(-scale * sign * libm::log(1.0 - 2.0 * libm::fabs(centered)))
}

/// Pure-DP party-level guarantee of the server-tier mechanism: ε = 2sγ.
pub fn pure_dp_epsilon_l1(s: usize, gamma: f64) -> Result<f64, Error> {
    check_gamma(gamma)?;
    check_count("s", s)?;
    Ok(2.0 * s as f64 * gamma)
}

/// Pure-DP party-level guarantee of one party-tier mechanism: ε = 2tγ.
pub fn pure_dp_epsilon_l2_party(t: usize, gamma: f64) -> Result<f64, Error> {
    check_gamma(gamma)?;
    check_count("t", t)?;
    Ok(2.0 * t as f64 * gamma)
}

fn check_gamma(gamma: f64) -> Result<(), Error> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be > 0, got {gamma}"
        )));
    }
    Ok(())
}

fn check_count(name: &str, value: usize) -> Result<(), Error> {
    if value == 0 {
        return Err(Error::InvalidParameter(format!("{name} must be >= 1")));
    }
    Ok(())
}

/// Upper bound on Pr[noisy argmax ≠ plurality argmax] for a vote histogram
/// under per-class Laplace(1/γ) noise:
///
///   q ≤ Σ_{o ≠ o*} (2 + γ(v_{o*} − v_o)) / (4 exp(γ(v_{o*} − v_o)))
///
/// clamped to 1 (the raw sum can exceed 1 for small gaps).
pub fn gap_failure_bound(hist: &VoteHistogram, gamma: f64) -> Result<f64, Error> {
    check_gamma(gamma)?;
    let u = hist.num_classes();
    if u < 2 {
        return Err(Error::InvalidParameter(
            "gap bound needs at least 2 classes".into(),
        ));
    }
    let winner = hist.argmax();
    let top = hist.counts()[winner.index()];
    let mut sum = 0.0;
    for (class, &count) in hist.counts().iter().enumerate() {
        if class == winner.index() {
            continue;
        }
        let gap = gamma * (top - count);
        sum += (2.0 + gap) / (4.0 * libm::exp(gap));
    }
    Ok(sum.min(1.0))
}

/// log(exp(a) + exp(b)) without overflow; tolerates -inf inputs.
fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Shared moment bound for a noisy-argmax call whose pure-DP epsilon is
/// x = 2·scale·γ:
///
///   α(λ) ≤ min( log((1−q)((1−q)/(1−e^x q))^λ + q e^{xλ}),  x²λ(λ+1)/2 )
///
/// The data-dependent branch is used only when q < (e^x − 1)/(e^{2x} − 1);
/// otherwise the data-independent branch stands alone. Returns the bound and
/// whether the data-dependent branch was admissible.
fn laplace_vote_moment(q: f64, scale: usize, gamma: f64, lambda: usize) -> (f64, bool) {
    let x = 2.0 * scale as f64 * gamma;
    if x == 0.0 {
        // scale = 0 (e.g. z = 0): the mechanism cannot change; no loss.
        return (0.0, false);
    }
    let lam = lambda as f64;
    let data_independent = x * x * lam * (lam + 1.0) / 2.0;
    let threshold = libm::expm1(x) / libm::expm1(2.0 * x);
    if !(0.0..1.0).contains(&q) || q >= threshold {
        return (data_independent, false);
    }
    // (λ+1)·ln(1−q) − λ·ln(1 − e^x q), plus q e^{xλ}, in log space.
    let log_first = (lam + 1.0) * libm::log1p(-q) - lam * libm::log1p(-libm::exp(x) * q);
    let log_second = if q == 0.0 {
        f64::NEG_INFINITY
    } else {
        libm::log(q) + x * lam
    };
    let data_dependent = log_sum_exp(log_first, log_second);
    (data_dependent.min(data_independent).max(0.0), true)
}

/// Server-tier moment bound at party-level adjacency (sensitivity 2s).
pub fn moments_bound_l1_party_level(q: f64, s: usize, gamma: f64, lambda: usize) -> f64 {
    laplace_vote_moment(q, s, gamma, lambda).0
}

/// Party-tier moment bound at example-level adjacency (sensitivity 2).
pub fn moments_bound_l2_example_level(q: f64, gamma: f64, lambda: usize) -> f64 {
    laplace_vote_moment(q, 1, gamma, lambda).0
}

/// Server-tier moment bound at example-level adjacency without consistent
/// voting, where z is the worst-case number of student models a single
/// example can change (sensitivity 2z). z = 0 yields α = 0.
pub fn moments_bound_l1_example_level(q: f64, z: usize, gamma: f64, lambda: usize) -> f64 {
    laplace_vote_moment(q, z, gamma, lambda).0
}

/// Party-tier moment bound at party-level adjacency (sensitivity 2t).
pub fn moments_bound_l2_party_level(q: f64, t: usize, gamma: f64, lambda: usize) -> f64 {
    laplace_vote_moment(q, t, gamma, lambda).0
}

/// Worst case over parties of the number of partitions containing any
/// answered query whose pre-noise top-2 vote gap is ≤ 1.
///
/// `party_partition_gaps[i][j]` holds the gaps recorded by party i's
/// partition j across the answered queries.
pub fn compute_z(party_partition_gaps: &[Vec<Vec<f64>>]) -> usize {
    party_partition_gaps
        .iter()
        .map(|partitions| {
            partitions
                .iter()
                .filter(|gaps| gaps.iter().any(|&g| g <= 1.0))
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// Accumulated log moments α(λ) at integer orders λ = 1..=len.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    alpha: Vec<f64>,
}

impl MomentVector {
    pub fn zeros(max_order: usize) -> Self {
        Self {
            alpha: vec![0.0; max_order],
        }
    }

    pub fn from_values(alpha: Vec<f64>) -> Self {
        Self { alpha }
    }

    pub fn max_order(&self) -> usize {
        self.alpha.len()
    }

    /// α at moment order λ (1-based).
    pub fn value_at(&self, lambda: usize) -> f64 {
        self.alpha[lambda - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0.0)
    }
}

/// Sequential composition: moments add elementwise.
pub fn accumulate(ledger: &MomentVector, per_query: &MomentVector) -> Result<MomentVector, Error> {
    if ledger.alpha.len() != per_query.alpha.len() {
        return Err(Error::MomentLength {
            left: ledger.alpha.len(),
            right: per_query.alpha.len(),
        });
    }
    Ok(MomentVector {
        alpha: ledger
            .alpha
            .iter()
            .zip(per_query.alpha.iter())
            .map(|(a, b)| a + b)
            .collect(),
    })
}

/// Tail-bound conversion: ε = min_λ (α(λ) + ln(1/δ))/λ, returning the
/// minimizing order λ*.
pub fn to_epsilon(ledger: &MomentVector, delta: f64) -> Result<(f64, usize), Error> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    let log_inv_delta = -libm::log(delta);
    let mut best = (f64::INFINITY, 0usize);
    for (i, &alpha) in ledger.alpha.iter().enumerate() {
        let lambda = (i + 1) as f64;
        let eps = (alpha + log_inv_delta) / lambda;
        if eps < best.0 {
            best = (eps, i + 1);
        }
    }
    if best.1 == 0 {
        return Err(Error::EmptyInput {
            context: "moment vector",
        });
    }
    Ok(best)
}

/// Parallel composition over disjoint data: (max_i ε_i, δ).
pub fn parallel_compose(party_epsilons: &[f64], delta: f64) -> Result<(f64, f64), Error> {
    let max = party_epsilons
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if party_epsilons.is_empty() {
        return Err(Error::EmptyInput {
            context: "party epsilons",
        });
    }
    Ok((max, delta))
}

/// Strong-composition comparator: ε = sqrt(2k ln(1/δ'))·ε₀ + k·ε₀(e^{ε₀}−1).
pub fn advanced_composition_reference(
    eps_per_query: f64,
    k: usize,
    delta_prime: f64,
) -> Result<f64, Error> {
    if !(eps_per_query > 0.0) {
        return Err(Error::InvalidParameter(
            "per-query epsilon must be > 0".into(),
        ));
    }
    check_count("k", k)?;
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(Error::InvalidParameter(
            "delta' must be in (0, 1)".into(),
        ));
    }
    let k = k as f64;
    Ok(libm::sqrt(2.0 * k * -libm::log(delta_prime)) * eps_per_query
        + k * eps_per_query * libm::expm1(eps_per_query))
}

/// Which tier a recorded histogram came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Party,
    Server,
}

/// A pre-noise vote histogram together with the sensitivity scale its
/// moment bound uses (s at the server under party adjacency, t at the party
/// under party adjacency, 1 at the party under example adjacency).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEvidence {
    pub histogram: VoteHistogram,
    pub tier: Tier,
    pub sensitivity_scale: usize,
}

/// Ledger produced by folding a stream of pre-noise histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerOutcome {
    pub epsilon: f64,
    pub lambda_star: usize,
    pub ledger: MomentVector,
    pub data_dependent_queries: usize,
    pub total_queries: usize,
}

/// Sequentially compose the per-query moment bounds of every histogram in
/// the stream at the given sensitivity scale, then convert to (ε, δ).
pub fn account_stream<'a, I>(
    histograms: I,
    scale: usize,
    gamma: f64,
    delta: f64,
    max_order: usize,
) -> Result<LedgerOutcome, Error>
where
    I: IntoIterator<Item = &'a VoteHistogram>,
{
    check_gamma(gamma)?;
    let mut ledger = MomentVector::zeros(max_order);
    let mut data_dependent_queries = 0;
    let mut total_queries = 0;
    for hist in histograms {
        let q = gap_failure_bound(hist, gamma)?;
        let mut used_dd = false;
        for lambda in 1..=max_order {
            let (alpha, dd) = laplace_vote_moment(q, scale, gamma, lambda);
            ledger.alpha[lambda - 1] += alpha;
            used_dd = dd;
        }
        if used_dd {
            data_dependent_queries += 1;
        }
        total_queries += 1;
    }
    let (epsilon, lambda_star) = to_epsilon(&ledger, delta)?;
    Ok(LedgerOutcome {
        epsilon,
        lambda_star,
        ledger,
        data_dependent_queries,
        total_queries,
    })
}

/// Summary of a run's privacy accounting, embedded in the run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub level: PrivacyLevel,
    pub gamma: Option<f64>,
    pub delta: f64,
    pub queries_answered: usize,
    /// Party-level ε: the server ledger at L1, max over parties at L2,
    /// absent at L0.
    pub epsilon: Option<f64>,
    /// Example-level ε per party (L2 only).
    pub per_party_epsilon: Option<Vec<f64>>,
    pub lambda_star: Option<usize>,
    pub data_dependent_fraction: f64,
    /// Example-level server ε, reported only when consistent voting is
    /// disabled at L1 (debug path), with the z it used.
    pub example_level_epsilon: Option<f64>,
    pub example_level_z: Option<usize>,
    pub note: Option<String>,
}

impl PrivacyReport {
    pub fn no_privacy(queries_answered: usize, delta: f64) -> Self {
        Self {
            level: PrivacyLevel::L0,
            gamma: None,
            delta,
            queries_answered,
            epsilon: None,
            per_party_epsilon: None,
            lambda_star: None,
            data_dependent_fraction: 0.0,
            example_level_epsilon: None,
            example_level_z: None,
            note: None,
        }
    }
}

/// Banner attached to every data-dependent ε report.
pub const DATA_DEPENDENT_BANNER: &str =
    "data-dependent epsilon - not safe to publish as-is";

#[cfg(test)]
mod tests {
    use super::*;


    fn hist(counts: &[f64]) -> VoteHistogram {
        VoteHistogram::from_counts(counts.len(), counts.to_vec()).unwrap()
    }

    #[test]
    fn laplace_rejects_bad_scale() {
        let mut rng = RngHandle::new(0);
        assert!(sample_laplace(0.0, &mut rng).is_err());
        assert!(sample_laplace(-1.0, &mut rng).is_err());
    }

    #[test]
    fn pure_dp_values() {
        assert!((pure_dp_epsilon_l1(2, 0.04).unwrap() - 0.16).abs() < 1e-15);
        assert!((pure_dp_epsilon_l1(1, 0.3).unwrap() - 0.6).abs() < 1e-15);
        assert!((pure_dp_epsilon_l2_party(25, 0.04).unwrap() - 2.0).abs() < 1e-12);
        assert!((pure_dp_epsilon_l2_party(1, 0.3).unwrap() - 0.6).abs() < 1e-15);
        assert!(pure_dp_epsilon_l1(2, 0.0).is_err());
        assert!(pure_dp_epsilon_l2_party(0, 0.1).is_err());
        // monotone in t
        assert!(
            pure_dp_epsilon_l2_party(6, 0.1).unwrap() > pure_dp_epsilon_l2_party(5, 0.1).unwrap()
        );
    }

    #[test]
    fn gap_bound_single_term() {
        // (2 + 0.1*10) / (4 e^{1.0}) = 3 / (4e)
        let expected = 3.0 / (4.0 * core::f64::consts::E);
        let q = gap_failure_bound(&hist(&[10.0, 0.0]), 0.1).unwrap();
        assert!((q - expected).abs() < 1e-12, "{q} vs {expected}");
        assert!((q - 0.27591).abs() < 5e-6);
    }

    #[test]
    fn gap_bound_zero_gap_is_half() {
        let q = gap_failure_bound(&hist(&[5.0, 5.0]), 3.0).unwrap();
        assert!((q - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gap_bound_two_terms_then_clamp() {
        let one = 3.0 / (4.0 * core::f64::consts::E);
        let q = gap_failure_bound(&hist(&[10.0, 0.0, 0.0]), 0.1).unwrap();
        assert!((q - 2.0 * one).abs() < 1e-12);
        // three zero-gap competitors: raw sum 1.5 clamps to 1
        let q = gap_failure_bound(&hist(&[5.0, 5.0, 5.0, 5.0]), 0.1).unwrap();
        assert!((q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gap_bound_needs_two_classes() {
        assert!(gap_failure_bound(&hist(&[5.0]), 0.1).is_err());
    }

    #[test]
    fn moment_bound_zero_q_is_zero() {
        for lambda in [1, 7, 64] {
            assert_eq!(moments_bound_l1_party_level(0.0, 2, 0.04, lambda), 0.0);
            assert_eq!(moments_bound_l2_example_level(0.0, 0.1, lambda), 0.0);
            assert_eq!(moments_bound_l2_party_level(0.0, 5, 0.1, lambda), 0.0);
        }
    }

    #[test]
    fn moment_bound_data_independent_values() {
        // q above threshold: only the quadratic branch applies.
        assert!((moments_bound_l1_party_level(0.9, 1, 0.05, 1) - 0.01).abs() < 1e-15);
        assert!((moments_bound_l2_example_level(0.9, 0.05, 1) - 0.01).abs() < 1e-15);
        assert!((moments_bound_l2_party_level(0.9, 5, 0.05, 1) - 0.25).abs() < 1e-12);
        assert!((moments_bound_l1_example_level(0.9, 1, 0.05, 1) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn moment_bound_matches_direct_formula() {
        // s=2, gamma=0.04, lambda=8, q=0.01
        let q = 0.01f64;
        let x = 0.16f64;
        let direct = ((1.0 - q) * ((1.0 - q) / (1.0 - x.exp() * q)).powi(8)
            + q * (x * 8.0).exp())
        .ln();
        let di = 2.0 * 4.0 * 0.04f64 * 0.04 * 8.0 * 9.0;
        let expected = direct.min(di);
        let got = moments_bound_l1_party_level(q, 2, 0.04, 8);
        assert!((got - expected).abs() / expected < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn moment_bound_never_exceeds_data_independent() {
        let mut rng = RngHandle::new(5);
        for _ in 0..500 {
            let q = rng.uniform();
            let s = 1 + (rng.next_u64() % 4) as usize;
            let gamma = 0.02 + 0.18 * rng.uniform();
            let lambda = 1 + (rng.next_u64() % 64) as usize;
            let alpha = moments_bound_l1_party_level(q, s, gamma, lambda);
            let lam = lambda as f64;
            let di = 2.0 * (s * s) as f64 * gamma * gamma * lam * (lam + 1.0);
            assert!(alpha >= 0.0);
            assert!(alpha <= di + 1e-12);
        }
    }

    #[test]
    fn theorem_identities_exact() {
        let mut rng = RngHandle::new(6);
        for _ in 0..200 {
            let q = rng.uniform();
            let gamma = 0.02 + 0.2 * rng.uniform();
            let lambda = 1 + (rng.next_u64() % 64) as usize;
            let s = 1 + (rng.next_u64() % 5) as usize;
            let t3 = moments_bound_l2_example_level(q, gamma, lambda);
            assert_eq!(t3, moments_bound_l1_party_level(q, 1, gamma, lambda));
            assert_eq!(t3, moments_bound_l2_party_level(q, 1, gamma, lambda));
            assert_eq!(
                moments_bound_l1_example_level(q, s, gamma, lambda),
                moments_bound_l1_party_level(q, s, gamma, lambda)
            );
        }
    }

    #[test]
    fn example_level_z_zero_is_free() {
        assert_eq!(moments_bound_l1_example_level(0.7, 0, 0.1, 32), 0.0);
    }

    #[test]
    fn accumulate_adds_elementwise() {
        let single = MomentVector::from_values(vec![0.1, 0.2, 0.3]);
        let mut ledger = MomentVector::zeros(3);
        for _ in 0..4 {
            ledger = accumulate(&ledger, &single).unwrap();
        }
        assert!(ledger
            .values()
            .iter()
            .zip([0.4, 0.8, 1.2])
            .all(|(a, b)| (a - b).abs() < 1e-12));
        // identity and commutativity
        let id = accumulate(&single, &MomentVector::zeros(3)).unwrap();
        assert_eq!(id, single);
        let ab = accumulate(&single, &ledger).unwrap();
        let ba = accumulate(&ledger, &single).unwrap();
        assert_eq!(ab, ba);
        // length mismatch
        assert!(accumulate(&single, &MomentVector::zeros(4)).is_err());
    }

    #[test]
    fn to_epsilon_minimizes_over_orders() {
        // alpha(lambda) = 0.005 lambda (lambda + 1), delta = 1e-5
        let alpha: Vec<f64> = (1..=64)
            .map(|l| 0.005 * l as f64 * (l + 1) as f64)
            .collect();
        let ledger = MomentVector::from_values(alpha);
        let (eps, lambda_star) = to_epsilon(&ledger, 1e-5).unwrap();
        assert_eq!(lambda_star, 48);
        let expected = 0.005 * 49.0 + -(1e-5f64.ln()) / 48.0;
        assert!((eps - expected).abs() < 1e-12);
        assert!((eps - 0.485).abs() < 5e-4);
    }

    #[test]
    fn to_epsilon_zero_ledger() {
        let ledger = MomentVector::zeros(64);
        let (eps, lambda_star) = to_epsilon(&ledger, 1e-5).unwrap();
        assert_eq!(lambda_star, 64);
        assert!((eps - -(1e-5f64.ln()) / 64.0).abs() < 1e-15);
    }

    #[test]
    fn to_epsilon_monotone_in_delta() {
        let ledger = MomentVector::from_values(vec![0.3; 64]);
        let (loose, _) = to_epsilon(&ledger, 1e-3).unwrap();
        let (tight, _) = to_epsilon(&ledger, 1e-7).unwrap();
        assert!(loose <= tight);
        assert!(to_epsilon(&ledger, 0.0).is_err());
        assert!(to_epsilon(&ledger, 1.0).is_err());
    }

    #[test]
    fn parallel_compose_takes_max() {
        assert_eq!(
            parallel_compose(&[1.0, 2.5, 0.3], 1e-5).unwrap(),
            (2.5, 1e-5)
        );
        assert_eq!(parallel_compose(&[0.7], 1e-5).unwrap(), (0.7, 1e-5));
        assert_eq!(
            parallel_compose(&[0.3, 2.5, 1.0], 1e-5).unwrap().0,
            parallel_compose(&[1.0, 2.5, 0.3], 1e-5).unwrap().0
        );
        assert!(parallel_compose(&[], 1e-5).is_err());
    }

    #[test]
    fn advanced_composition_single_query() {
        let eps = advanced_composition_reference(0.1, 1, 1e-5).unwrap();
        assert!((eps - 0.4904).abs() < 1e-4, "{eps}");
        // sqrt(k) growth for small eps0: quadrupling k roughly doubles eps
        let e4 = advanced_composition_reference(0.01, 400, 1e-5).unwrap();
        let e1 = advanced_composition_reference(0.01, 100, 1e-5).unwrap();
        assert!((e4 / e1 - 2.0).abs() < 0.05);
    }

    #[test]
    fn compute_z_counts_low_gap_partitions() {
        // all gaps >= 2
        assert_eq!(compute_z(&[vec![vec![2.0, 3.0], vec![5.0]]]), 0);
        // one party with both of its two partitions containing a gap-1 query
        assert_eq!(
            compute_z(&[
                vec![vec![1.0, 4.0], vec![3.0, 0.0]],
                vec![vec![2.0], vec![2.0]]
            ]),
            2
        );
        // gaps {2,1} in partition 1, {3,3} in partition 2
        assert_eq!(compute_z(&[vec![vec![2.0, 1.0], vec![3.0, 3.0]]]), 1);
        assert_eq!(compute_z(&[]), 0);
    }

    #[test]
    fn account_stream_composes_identical_queries() {
        let h = hist(&[8.0, 1.0]);
        let hists = vec![h.clone(), h.clone(), h];
        let out = account_stream(hists.iter(), 2, 0.05, 1e-5, 16).unwrap();
        assert_eq!(out.total_queries, 3);
        let q = gap_failure_bound(&hists[0], 0.05).unwrap();
        for lambda in 1..=16 {
            let single = moments_bound_l1_party_level(q, 2, 0.05, lambda);
            assert!((out.ledger.value_at(lambda) - 3.0 * single).abs() < 1e-12);
        }
    }
}
