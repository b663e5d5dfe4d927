//! Trace-distance non-Markovianity over the pair family `(|i⟩ ± |j⟩)/√2`,
//! whose trace distance under pure dephasing is `D_ij(t) = e^{-γ_ij(t)}`.

use serde::Serialize;

use crate::dephasing::Dephasing;
use crate::error::{Error, Result};
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlpResult {
    pub times: Vec<f64>,
    /// Basis index pairs `(i, j)` with `i < j`.
    pub pairs: Vec<(usize, usize)>,
    /// Cumulative positive increments of `D_ij`, one curve per pair.
    pub per_pair: Vec<Vec<f64>>,
    /// Pointwise maximum over pairs.
    pub total: Vec<f64>,
}

/// Running sum of the positive increments of `series`.
pub fn cumulative_backflow(series: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(series.len());
    for (k, v) in series.iter().enumerate() {
        if k > 0 {
            acc += (v - series[k - 1]).max(0.0);
        }
        out.push(acc);
    }
    out
}

/// BLP curves from trace-distance series, one per pair.
pub fn blp_from_series(times: &[f64], pairs: Vec<(usize, usize)>, series: &[Vec<f64>]) -> Result<BlpResult> {
    if series.len() != pairs.len() || series.iter().any(|s| s.len() != times.len()) {
        return Err(Error::Dimension("one series per pair, one value per time".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::OutOfRange("time grid must be nondecreasing".into()));
    }
    let per_pair: Vec<Vec<f64>> = series.iter().map(|s| cumulative_backflow(s)).collect();
    let total = (0..times.len())
        .map(|k| per_pair.iter().map(|c| c[k]).fold(0.0, f64::max))
        .collect();
    Ok(BlpResult {
        times: times.to_vec(),
        pairs,
        per_pair,
        total,
    })
}

/// `𝒩(t)` on `times` for a closed-form dephasing solver.
pub fn blp_measure(solver: &dyn Dephasing, times: &[f64]) -> Result<BlpResult> {
    let n = 1usize << solver.qubits();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let profiles = parallel::map(times, |&t| solver.profile(t))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let series: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| profiles.iter().map(|p| (-p.gamma(i, j)).exp()).collect())
        .collect();
    blp_from_series(times, pairs, &series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_decay_has_no_backflow() {
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let series = vec![times.iter().map(|t| (-t).exp()).collect()];
        let r = blp_from_series(&times, vec![(0, 1)], &series).unwrap();
        assert!(r.total.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn oscillating_gamma_accumulates_on_decreasing_intervals() {
        let times: Vec<f64> = (0..=400).map(|k| k as f64 * 0.01).collect();
        let d: Vec<f64> = times.iter().map(|t| (-t.sin().powi(2)).exp()).collect();
        let r = blp_from_series(&times, vec![(0, 1)], &[d]).unwrap();
        // γ = sin² t falls on (π/2, π): D climbs from e^{-1} to 1
        let at = |t: f64| r.total[(t / 0.01).round() as usize];
        assert_eq!(at(1.5), 0.0);
        assert!((at(3.2) - (1.0 - (-1f64).exp())).abs() < 1e-3);
        assert!(r.total.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn total_is_max_over_pairs() {
        let times = [0.0, 1.0, 2.0];
        let r = blp_from_series(&times, vec![(0, 1), (0, 2)], &[vec![0.5, 0.7, 0.6], vec![0.9, 0.4, 0.8]]).unwrap();
        assert_eq!(r.per_pair[0], vec![0.0, 0.19999999999999996, 0.19999999999999996]);
        assert!((r.total[2] - 0.4).abs() < 1e-15);
        assert!((r.total[1] - 0.2).abs() < 1e-15);
    }
}
