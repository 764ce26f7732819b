//! Train / public / test splitting: one seeded shuffle, then contiguous
//! slices sized by rounding the first two fractions (the test set takes the
//! remainder).

use fedkt_core::domain::Dataset;
use fedkt_core::rng::RngHandle;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub public: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.75,
            public: 0.125,
            test: 0.125,
        }
    }
}

impl SplitFractions {
    pub fn validate(&self) -> Result<()> {
        let sum = self.train + self.public + self.test;
        if !(self.train > 0.0 && self.public > 0.0 && self.test > 0.0) {
            return Err(Error::Config(
                "split fractions must all be positive".into(),
            ));
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split fractions must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

pub fn split_train_public_test(
    data: &Dataset,
    fractions: SplitFractions,
    rng: &mut RngHandle,
) -> Result<(Dataset, Dataset, Dataset)> {
    fractions.validate()?;
    let n = data.len();
    let n_train = (fractions.train * n as f64).round() as usize;
    let n_public = (fractions.public * n as f64).round() as usize;
    if n_train + n_public >= n || n_train == 0 || n_public == 0 {
        return Err(Error::Config(format!(
            "split of {n} examples leaves an empty part (train {n_train}, public {n_public})"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let train = data.subset(&order[..n_train]);
    let public = data.subset(&order[n_train..n_train + n_public]);
    let test = data.subset(&order[n_train + n_public..]);
    Ok((train, public, test))
}
