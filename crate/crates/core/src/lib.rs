//! Fuzzy-rough weighted least-squares twin support vector machines for
//! imbalanced binary classification.
//!
//! The majority class is under-sampled by fuzzy-rough positive-region
//! scores, every remaining instance is weighted by its fuzzy similarity to
//! its own class, and two non-parallel hyperplanes (or kernel surfaces) are
//! fit in closed form. A point takes the label of the nearer plane.
//!
//! ```no_run
//! use frlstsvm::classifier::{fit_frlstsvm, TrainConfig};
//! use frlstsvm::dataset::load_keel;
//!
//! let ds = load_keel("haberman.dat", "positive")?;
//! let model = fit_frlstsvm(&ds, &TrainConfig { tau: 0.3, ..TrainConfig::default() })?;
//! let labels = model.predict_all(ds.features())?;
//! # Ok::<(), frlstsvm::Error>(())
//! ```

// `!(x > 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod fsutil;
pub mod fuzzy_rough;
pub mod linalg;
pub mod metrics;

pub use error::{Error, Result};
