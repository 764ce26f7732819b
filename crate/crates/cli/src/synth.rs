//! Synthetic task generators: Gaussian blobs with a controllable number of
//! informative dimensions, and the 2-D XOR pattern padded with noise
//! dimensions.

use fedkt_core::domain::{Dataset, Example};
use fedkt_core::rng::RngHandle;

use crate::{Error, Result};

/// Gaussian blobs. Class c's center is `+separation` on informative
/// dimensions assigned to c (round-robin) and `-separation / (classes - 1)`
/// on the other classes' informative dimensions; the remaining dimensions
/// are pure noise. All coordinates get unit Gaussian noise. Classes are
/// balanced.
pub fn gen_blobs(
    examples: usize,
    features: usize,
    classes: usize,
    separation: f64,
    informative: usize,
    rng: &mut RngHandle,
) -> Result<Dataset> {
    if classes < 2 || features == 0 || examples < classes {
        return Err(Error::Config(
            "blobs need >= 2 classes, >= 1 feature, and at least one example per class".into(),
        ));
    }
    let informative = informative.clamp(1, features);
    let rows = (0..examples)
        .map(|i| {
            let class = i % classes;
            let features = (0..features)
                .map(|f| {
                    let center = if f < informative {
                        if f % classes == class {
                            separation
                        } else {
                            -separation / (classes as f64 - 1.0)
                        }
                    } else {
                        0.0
                    };
                    center + normal(rng)
                })
                .collect();
            Example::labeled(features, class)
        })
        .collect();
    Ok(Dataset::new(classes, features, rows)?)
}

/// XOR of the first two coordinates' signs, with `noise` probability of a
/// flipped label and optional extra noise dimensions.
pub fn gen_xor(examples: usize, features: usize, noise: f64, rng: &mut RngHandle) -> Result<Dataset> {
    if features < 2 || examples == 0 {
        return Err(Error::Config("xor needs >= 2 features and >= 1 example".into()));
    }
    let rows = (0..examples)
        .map(|_| {
            let x = rng.uniform() * 2.0 - 1.0;
            let y = rng.uniform() * 2.0 - 1.0;
            let mut label = usize::from((x > 0.0) != (y > 0.0));
            if rng.uniform() < noise {
                label = 1 - label;
            }
            let mut coords = vec![x, y];
            coords.extend((2..features).map(|_| normal(rng)));
            Example::labeled(coords, label)
        })
        .collect();
    Ok(Dataset::new(2, features, rows)?)
}

fn normal(rng: &mut RngHandle) -> f64 {
    let mut u1 = rng.uniform();
    while u1 == 0.0 {
        u1 = rng.uniform();
    }
    let u2 = rng.uniform();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
