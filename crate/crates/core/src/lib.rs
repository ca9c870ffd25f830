//! Linear multimodal alignment lab.
//!
//! Two data modalities `X1`, `X2` predict two target blocks `Y1`, `Y2`
//! through rank-K linear encoders, while an alignment head maps the first
//! modality's representations onto the second's. The joint objective
//!
//! ```text
//! ||X1 V1 W1 - Y1||_F^2 + ||X2 V2 W2 - Y2||_F^2 + lambda ||X1 V1 Q1 - X2 V2||_F^2
//! ```
//!
//! admits a closed-form optimum through whitened eigenproblems. This crate
//! implements that solver, an independent alternating-least-squares oracle
//! to cross-check it, sigma-informativeness measurements (mean R^2 of OLS
//! predictions under unit-variance targets), synthetic multimodal data
//! generators, an executable suite for the information-loss argument, and
//! a small nonlinear (two-layer tanh) probe that shows the same
//! prediction-vs-alignment trade-off away from the linear regime.
//!
//! Everything is deterministic: eigenvector signs follow a fixed
//! convention, random draws come from counter-based ChaCha streams keyed
//! by `(seed, purpose)`, and parallel execution (the `parallel` feature,
//! on by default) never changes a reported number.

pub mod data;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod informativeness;
pub mod io;
pub mod linalg;
pub mod probe;
pub mod rng;
pub mod solver;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use tol::Tolerances;

/// Dense row-addressable double-precision matrix used throughout.
pub type Mat = nalgebra::DMatrix<f64>;
