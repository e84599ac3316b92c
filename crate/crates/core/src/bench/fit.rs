//! Exponential TTS fits `TTS = c · b^N` by least squares on `ln TTS`.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bench::records::{RunRecord, SolverTag, Target};
use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    /// One point per `N`: the median TTS.
    #[default]
    Median,
    /// Every successful run is a point.
    Ensemble,
}

impl FromStr for FitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(FitMode::Median),
            "ensemble" => Ok(FitMode::Ensemble),
            other => Err(Error::invalid(format!("unknown fit mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    #[default]
    All,
}

impl Parity {
    pub fn admits(&self, n: usize) -> bool {
        match self {
            Parity::Even => n % 2 == 0,
            Parity::Odd => n % 2 == 1,
            Parity::All => true,
        }
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            "all" => Ok(Parity::All),
            other => Err(Error::invalid(format!("unknown parity {other:?}"))),
        }
    }
}

/// Growth law `c · b^N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw {
    pub c: f64,
    pub b: f64,
}

/// Result of [`fit_exponential`].
///
/// Intervals are 95% Student-t intervals on the log-scale intercept and
/// slope, exponentiated. Logarithms are natural.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub schema_version: u32,
    pub b: f64,
    pub c: f64,
    pub ci_b: [f64; 2],
    pub ci_c: [f64; 2],
    pub r2: f64,
    pub mode: FitMode,
    pub target: Target,
    pub parity: Parity,
    pub solver: Option<SolverTag>,
    /// Distinct sizes with at least one successful run.
    pub sizes: Vec<usize>,
    pub points: usize,
    /// Runs excluded because they never reached the target.
    pub censored: usize,
    pub ci_method: String,
}

impl FitResult {
    pub fn law(&self) -> ScalingLaw {
        ScalingLaw { c: self.c, b: self.b }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub mode: FitMode,
    pub target: Target,
    pub parity: Parity,
    /// Restricts to one solver; required when records mix solvers.
    pub solver: Option<SolverTag>,
}

/// Least-squares line through `(x, y)` with 95% confidence intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub ci_slope: [f64; 2],
    pub ci_intercept: [f64; 2],
    pub r2: f64,
}

pub fn ols(points: &[(f64, f64)]) -> Result<LineFit> {
    let m = points.len();
    if m < 3 {
        return Err(Error::invalid(format!("regression needs at least 3 points, got {m}")));
    }
    let mf = m as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / mf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("regression needs at least two distinct x values"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    let dof = mf - 2.0;
    let s2 = sse / dof;
    let se_slope = (s2 / sxx).sqrt();
    let se_intercept = (s2 * (1.0 / mf + mean_x * mean_x / sxx)).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::Runtime(e.to_string()))?.inverse_cdf(0.975);
    Ok(LineFit {
        slope,
        intercept,
        ci_slope: [slope - t * se_slope, slope + t * se_slope],
        ci_intercept: [intercept - t * se_intercept, intercept + t * se_intercept],
        r2,
    })
}

/// Median with the mean of the two middle values for even counts.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Fits `TTS = c · b^N` to the selected records.
///
/// Needs at least 3 distinct sizes with a successful run; runs without the
/// target counter are dropped and counted in `censored`. Nothing forces
/// `b > 1`: a decreasing dataset yields `b < 1`.
pub fn fit_exponential(records: &[RunRecord], options: &FitOptions) -> Result<FitResult> {
    let solver = match options.solver {
        Some(s) => Some(s),
        None => {
            let mut tags: Vec<SolverTag> = records.iter().map(|r| r.solver).collect();
            tags.sort_unstable();
            tags.dedup();
            if tags.len() > 1 {
                return Err(Error::invalid(format!("records mix solvers {tags:?}; choose one")));
            }
            tags.first().copied()
        }
    };
    let mut by_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut censored = 0;
    for r in records.iter().filter(|r| Some(r.solver) == solver && options.parity.admits(r.n)) {
        match r.counter(options.target) {
            Some(t) if t > 0 => by_size.entry(r.n).or_default().push(t as f64),
            _ => censored += 1,
        }
    }
    if by_size.len() < 3 {
        return Err(Error::invalid(format!(
            "fit needs at least 3 distinct sizes with successful runs, got {}",
            by_size.len()
        )));
    }
    let points: Vec<(f64, f64)> = match options.mode {
        FitMode::Median => by_size.iter_mut().map(|(&n, v)| (n as f64, median(v).ln())).collect(),
        FitMode::Ensemble => {
            by_size.iter().flat_map(|(&n, v)| v.iter().map(move |t| (n as f64, t.ln()))).collect()
        }
    };
    let line = ols(&points)?;
    Ok(FitResult {
        schema_version: SCHEMA_VERSION,
        b: line.slope.exp(),
        c: line.intercept.exp(),
        ci_b: line.ci_slope.map(f64::exp),
        ci_c: line.ci_intercept.map(f64::exp),
        r2: line.r2,
        mode: options.mode,
        target: options.target,
        parity: options.parity,
        solver,
        sizes: by_size.keys().copied().collect(),
        points: points.len(),
        censored,
        ci_method: "student_t_95_log_scale".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::records::RunRecord;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn rec(n: usize, tts: Option<u64>) -> RunRecord {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            solver: SolverTag::Tabu,
            n,
            seed: 0,
            run_index: 0,
            tts,
            tts_1st: None,
            tts_2nd: None,
            best_energy: 0,
            total_evals: 0,
            restarts_used: 0,
            wall_time: None,
            config: serde_json::Value::Null,
        }
    }

    #[test]
    fn exact_on_noiseless_log_linear_points() {
        let points: Vec<(f64, f64)> = [10.0, 20.0, 30.0].iter().map(|&n| (n, (2.0 * 1.5f64.powf(n)).ln())).collect();
        let line = ols(&points).unwrap();
        assert!((line.slope.exp() - 1.5).abs() < 1e-12);
        assert!((line.intercept.exp() - 2.0).abs() < 1e-12);
        assert_eq!(line.r2, 1.0);
    }

    #[test]
    fn single_size_is_rejected() {
        let records = vec![rec(13, Some(10)), rec(13, Some(20)), rec(13, Some(30))];
        assert!(fit_exponential(&records, &FitOptions::default()).is_err());
    }

    #[test]
    fn censored_runs_are_counted_and_parity_filters() {
        let mut records: Vec<RunRecord> = [10usize, 11, 12, 13, 14, 16].iter().map(|&n| rec(n, Some(1 << (n / 2)))).collect();
        records.push(rec(12, None));
        let fit = fit_exponential(&records, &FitOptions { parity: Parity::Even, ..Default::default() }).unwrap();
        assert_eq!(fit.sizes, vec![10, 12, 14, 16]);
        assert_eq!(fit.censored, 1);
        assert!((fit.b - 2f64.sqrt()).abs() < 1e-12);
        assert!(fit.ci_b[0] <= fit.b && fit.b <= fit.ci_b[1]);
    }

    #[test]
    fn median_mode_ignores_order_within_a_size() {
        let mut records = Vec::new();
        for n in [10usize, 14, 18, 22] {
            for k in 1..=6u64 {
                records.push(rec(n, Some(k * (n as u64).pow(2))));
            }
        }
        let a = fit_exponential(&records, &FitOptions::default()).unwrap();
        records.reverse();
        let b = fit_exponential(&records, &FitOptions::default()).unwrap();
        assert_eq!(a, b);
        let ensemble = fit_exponential(&records, &FitOptions { mode: FitMode::Ensemble, ..Default::default() }).unwrap();
        assert_eq!(ensemble.points, 24);
        assert!(ensemble.r2 < a.r2);
    }

    #[test]
    fn mixed_solvers_need_a_choice() {
        let mut records: Vec<RunRecord> = [10usize, 12, 14].iter().map(|&n| rec(n, Some(n as u64))).collect();
        let mut other = rec(16, Some(16));
        other.solver = SolverTag::Pce;
        records.push(other);
        assert!(fit_exponential(&records, &FitOptions::default()).is_err());
        let fit = fit_exponential(&records, &FitOptions { solver: Some(SolverTag::Tabu), ..Default::default() }).unwrap();
        assert_eq!(fit.sizes.len(), 3);
    }

    #[test]
    fn noisy_median_fit_recovers_base() {
        let noise = Normal::new(0.0f64, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut records = Vec::new();
        for n in (12..=40).step_by(4) {
            for _ in 0..50 {
                let t = 5.0 * 1.34f64.powi(n as i32) * noise.sample(&mut rng).exp();
                records.push(rec(n, Some(t.round().max(1.0) as u64)));
            }
        }
        let fit = fit_exponential(&records, &FitOptions::default()).unwrap();
        assert!((1.30..=1.38).contains(&fit.b), "b = {}", fit.b);
    }
}
