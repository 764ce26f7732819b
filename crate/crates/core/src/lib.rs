//! One-shot federated learning via two-tier knowledge transfer.
//!
//! A single-process simulation library: parties hold disjoint labeled
//! datasets, train teacher ensembles on disjoint subsets, distill them into
//! student models over an unlabeled public query set, and a server distills
//! the student ensemble into one final model with a single round of
//! communication. Laplace noise can be injected at the server tier or the
//! party tier, and a data-dependent moments accountant converts the noisy
//! vote stream into an (ε, δ) statement.
//!
//! The crate is `no_std` (with `alloc`); all file formats, configuration,
//! and reporting live in the companion `fedkt` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod domain;
pub mod error;
pub mod models;
pub mod partition;
pub mod privacy;
pub mod rng;
pub mod transfer;

pub use domain::{ClassId, Dataset, Example, PrivacyLevel, VoteHistogram};
pub use error::Error;
pub use rng::RngHandle;
