//! Signal/noise separation for time series of curves.
//!
//! A curve series `Y_t = X_t + eps_t` is split into a finite-dimensional dynamical
//! space carrying the serially dependent signal and a white noise part. The noise
//! covariance is recovered from the loadings' VAR structure, and the signal is
//! reconstructed either by orthogonal projection or by the MISE-optimal regression
//! that also removes the predictable share of the noise inside the signal space.
//!
//! ```no_run
//! use fdenoise::{fit, generate_dataset, DgpConfig, Method, PipelineConfig};
//!
//! let data = generate_dataset(&DgpConfig { n: 400, seed: 1, ..Default::default() })?;
//! let fitted = fit(&data.y, &PipelineConfig::default(), 7)?;
//! let out = fitted.denoise(&data.y, Method::MiseOptimal)?;
//! println!("d = {}, lambda_hat = {:.3}", fitted.d(), out.lambda_hat);
//! # Ok::<(), fdenoise::Error>(())
//! ```

pub mod cli;
pub mod covariance;
pub mod denoise;
pub mod dynspace;
pub mod error;
pub mod experiment;
pub mod forecast;
pub mod grid;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod panel;
pub mod sim;
pub mod var;

pub use covariance::{dfpca_kernel, lagged_autocov, Kernel};
pub use denoise::{denoise_mise_optimal, denoise_orthogonal, mise, Method, OmegaSet};
pub use dynspace::{bootstrap_test, estimate_dynspace, DfpcaParams, DynSpaceEstimate};
pub use error::{Error, Result};
pub use experiment::{run_denoising_experiment, run_forecast_experiment, shuffle_check, ExperimentResult, SweepPoint};
pub use grid::{Curve, CurveSeries, Grid, Subspace};
pub use model::{fit, fit_known, DenoiseResult, Fitted, KnownStructure, PipelineConfig};
pub use noise::{estimate_noise_model, reconstruct_sigma0, NoiseModel, NoiseParams};
pub use panel::{load_csv, preprocess, save_results, Layout, RawPanel};
pub use sim::{generate_dataset, theoretical_bounds, DgpConfig};
pub use var::{builtin, simulate_var, VarModel};
