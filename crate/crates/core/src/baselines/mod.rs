pub mod exact;
pub mod tabu;
pub mod warm_start;

pub use exact::{exact_solve, skew_symmetric_search, ExactResult, SkewResult, MAX_EXACT_N, MAX_SKEW_N};
pub use tabu::{memetic_tabu, random_population, tabu_search, MemeticConfig, TabuConfig, DEFAULT_POPULATION};
pub use warm_start::{pce_warm_start, WarmStartConfig};
