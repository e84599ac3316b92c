//! Campaigns and their analysis.

pub mod campaign;
pub mod crossover;
pub mod fit;
pub mod records;
pub mod shots;
pub mod stats;

pub use campaign::{reference_levels, run_campaign, CampaignSpec, MemeticCampaign, SolverSpec};
pub use crossover::{crossover, Crossover, Overhead};
pub use fit::{fit_exponential, FitMode, FitOptions, FitResult, Parity, ScalingLaw};
pub use records::{read_jsonl, write_csv, write_jsonl, RunRecord, SolverTag, Target};
pub use shots::{shot_bound, ShotBound, ShotBudgetQuery};
pub use stats::{ks_two_sample, tune_sweep, KsResult, SweepChoice, SweepSetting};
