//! Scenario configuration, time series, limit detection and fits.

pub mod config;
pub mod fit;
pub mod limit;
pub mod oracle;
pub mod report;
pub mod run;
pub mod series;

pub use config::{Scenario, ScenarioKind};
pub use fit::{fit_decoherence_time, fit_relaxation_time, DecayFit, FitOptions, RelaxationFit};
pub use limit::{detect_weak_limit, WeakLimitReport};
pub use report::{ordering_report, FitReport, OrderingReport, TimeValue};
pub use run::{run_scenario, RunOutput};
pub use series::TimeSeries;
