//! Two-sample Kolmogorov–Smirnov test and the significance-driven sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// `sup |F_a − F_b|`.
    pub d: f64,
    /// Asymptotic p-value.
    pub p: f64,
}

/// Survival function `Q(λ) = P(K > λ)` of the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // P(K ≤ λ) = √(2π)/λ Σ_k exp(−(2k−1)² π² / (8λ²)), fast for small λ
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            sum += (c * j * j).exp();
        }
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-17 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Two-sample KS statistic with the asymptotic p-value at effective size
/// `n_a n_b / (n_a + n_b)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("KS test needs two non-empty samples"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::invalid("KS samples contain NaN"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        // advance past every copy of the smaller value so ties move both CDFs together
        let v = a[i].min(b[j]);
        while i < na && a[i] == v {
            i += 1;
        }
        while j < nb && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    Ok(KsResult { d, p: kolmogorov_survival(ne.sqrt() * d) })
}

/// One point of a hyperparameter sweep with its metric sample (higher is better).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSetting {
    pub value: f64,
    pub samples: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepChoice {
    pub index: usize,
    pub value: f64,
    /// `p[i][j]` for `j > i`: KS p-value between settings `i` and `j`.
    pub p_values: Vec<Vec<f64>>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Smallest setting beyond which no later setting is a significant
/// improvement.
///
/// A later setting improves on `s` when the KS p-value is below
/// `threshold` and its sample mean is higher; significant changes for the
/// worse do not count. Settings must be strictly ascending.
pub fn tune_sweep(settings: &[SweepSetting], threshold: f64) -> Result<SweepChoice> {
    if settings.len() < 2 {
        return Err(Error::invalid("a sweep needs at least two settings"));
    }
    if settings.windows(2).any(|w| !(w[0].value < w[1].value)) {
        return Err(Error::invalid("sweep settings must be strictly ascending"));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let m = settings.len();
    let mut p_values = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            p_values[i].push(ks_two_sample(&settings[i].samples, &settings[j].samples)?.p);
        }
    }
    let index = (0..m)
        .find(|&i| {
            (i + 1..m).all(|j| {
                let p = p_values[i][j - i - 1];
                !(p < threshold && mean(&settings[j].samples) > mean(&settings[i].samples))
            })
        })
        .expect("the last setting always qualifies");
    Ok(SweepChoice { index, value: settings[index].value, p_values })
}
