//! Classification of finite metric spaces by p-negative type and exact
//! computation of the p-negative type gap `Γ`.
//!
//! The pipeline is: distances → `A = (d(xᵢ, xⱼ)ᵖ)` → classification on
//! `F = {x : Σxᵢ = 0}` → for strict spaces `B = (1/M) z zᵀ − A⁻¹` →
//! `β = max (Bs|s)` over sign vectors → `Γ = 2/β`.
//!
//! ```
//! use negtype::{gap, metric};
//!
//! let c5 = metric::path_metric(&metric::gen_cycle(5).unwrap()).unwrap();
//! let a = metric::power_matrix(&c5, 1.0).unwrap();
//! let analysis = gap::analyze(&a, &gap::GapOptions::default()).unwrap();
//! assert!((analysis.gamma().unwrap() - 5.0 / 28.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod closed_forms;
pub mod error;
pub mod gap;
pub mod linalg;
pub mod metric;
pub mod negtype;

pub use error::{Error, Result};
pub use gap::{analyze, GapAnalysis, GapOptions, GapResult, Method};
pub use linalg::SymMatrix;
pub use metric::{MetricSpace, NegTypeMatrix, WeightedGraph};
pub use negtype::{NegTypeReport, Tolerances, Verdict};
