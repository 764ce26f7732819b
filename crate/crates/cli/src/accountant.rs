//! Standalone privacy ledger over a CSV of pre-noise vote histograms (one
//! row per query, one numeric column per class).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use fedkt_core::domain::VoteHistogram;
use fedkt_core::privacy::{
    account_stream, advanced_composition_reference, pure_dp_epsilon_l1, pure_dp_epsilon_l2_party,
    DATA_DEPENDENT_BANNER, DEFAULT_MAX_MOMENT_ORDER,
};

use crate::{stage, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccountantLevel {
    L1,
    L2,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccountantReport {
    pub level: AccountantLevel,
    pub gamma: f64,
    pub delta: f64,
    pub queries: usize,
    pub num_classes: usize,
    /// Moments-accountant ε at the level's adjacency (party-level with
    /// scale s for L1, example-level for L2).
    pub epsilon: f64,
    pub lambda_star: usize,
    pub data_dependent_fraction: f64,
    /// L2 only: party-level ε with sensitivity scale t.
    pub party_level_epsilon: Option<f64>,
    /// Per-query pure-DP ε of the mechanism (2sγ or 2tγ).
    pub pure_dp_epsilon_per_query: f64,
    /// Strong-composition comparator over the same number of queries.
    pub advanced_composition_epsilon: f64,
    pub note: String,
}

pub fn read_votes_csv(path: &Path) -> Result<Vec<VoteHistogram>> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut hists = Vec::new();
    let mut width = None;
    for (line_no, line) in raw.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let counts = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse {
                path: path.display().to_string(),
                line: line_no,
                message: e.to_string(),
            })?;
        match width {
            None => width = Some(counts.len()),
            Some(w) if w != counts.len() => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: line_no,
                    message: format!("expected {w} columns, got {}", counts.len()),
                })
            }
            _ => {}
        }
        hists.push(VoteHistogram::from_counts(counts.len(), counts)?);
    }
    if hists.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: "no vote rows".into(),
        });
    }
    Ok(hists)
}

pub fn run_accountant(
    votes: &[VoteHistogram],
    level: AccountantLevel,
    gamma: f64,
    s: usize,
    t: usize,
    delta: f64,
) -> Result<AccountantReport> {
    let num_classes = votes[0].num_classes();
    let (scale, pure_per_query) = match level {
        AccountantLevel::L1 => (s, pure_dp_epsilon_l1(s, gamma).map_err(stage("accountant"))?),
        AccountantLevel::L2 => (
            1,
            pure_dp_epsilon_l2_party(t, gamma).map_err(stage("accountant"))?,
        ),
    };
    let outcome = account_stream(
        votes.iter(),
        scale,
        gamma,
        delta,
        DEFAULT_MAX_MOMENT_ORDER,
    )
    .map_err(stage("accountant"))?;
    let party_level_epsilon = match level {
        AccountantLevel::L1 => None,
        AccountantLevel::L2 => Some(
            account_stream(votes.iter(), t, gamma, delta, DEFAULT_MAX_MOMENT_ORDER)
                .map_err(stage("accountant"))?
                .epsilon,
        ),
    };
    let advanced = advanced_composition_reference(pure_per_query, votes.len(), delta)
        .map_err(stage("accountant"))?;
    Ok(AccountantReport {
        level,
        gamma,
        delta,
        queries: votes.len(),
        num_classes,
        epsilon: outcome.epsilon,
        lambda_star: outcome.lambda_star,
        data_dependent_fraction: outcome.data_dependent_queries as f64
            / outcome.total_queries as f64,
        party_level_epsilon,
        pure_dp_epsilon_per_query: pure_per_query,
        advanced_composition_epsilon: advanced,
        note: DATA_DEPENDENT_BANNER.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn reads_votes_and_accounts() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "90, 10").unwrap();
        writeln!(file, "55, 45").unwrap();
        writeln!(file, "99, 1").unwrap();
        let votes = read_votes_csv(file.path()).unwrap();
        assert_eq!(votes.len(), 3);
        let report = run_accountant(&votes, AccountantLevel::L1, 0.04, 2, 5, 1e-5).unwrap();
        assert!(report.epsilon > 0.0);
        assert_eq!(report.queries, 3);
        assert!((report.pure_dp_epsilon_per_query - 0.16).abs() < 1e-12);
        assert!(report.epsilon < report.advanced_composition_epsilon);
    }

    #[test]
    fn l2_reports_both_adjacencies() {
        let votes = vec![VoteHistogram::from_counts(2, vec![5.0, 0.0]).unwrap(); 10];
        let report = run_accountant(&votes, AccountantLevel::L2, 0.1, 1, 5, 1e-5).unwrap();
        let party = report.party_level_epsilon.unwrap();
        assert!(party > report.epsilon, "party {party} vs example {}", report.epsilon);
    }

    #[test]
    fn ragged_votes_rejected() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "1,2").unwrap();
        writeln!(file, "1,2,3").unwrap();
        assert!(matches!(
            read_votes_csv(file.path()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
