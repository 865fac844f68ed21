//! Numeric solver for the single-band minimum-processing problem
//!
//! ```text
//! minimize   sum_k a_k (1 - v_k)^2
//! subject to sum_k a_k v_k^2 >= c,   v_k >= 1
//! ```
//!
//! with `a_k = omega_k * sigma_k^2` and `c = N * T`. The solver searches the
//! Lagrange multiplier of the power constraint by bisection and minimizes the
//! Lagrangian bin by bin, so it never assumes that the bins of a band share a
//! gain. It exists to cross-check the closed form in [`crate::gain`].

use rand::Rng;

use crate::error::{Error, Result};

const LAMBDA_MAX: f64 = 1.0 - 1e-12;
const MAX_BISECTIONS: usize = 200;

/// One band of the per-band problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BandInstance {
    pub weights: Vec<f64>,
    pub speech_powers: Vec<f64>,
    pub noise_power: f64,
    pub snr_target: f64,
}

impl BandInstance {
    /// `a_k = omega_k * sigma_k^2`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.speech_powers)
            .map(|(w, s)| w * s)
            .collect()
    }

    /// Unprocessed band speech power.
    pub fn speech_band_power(&self) -> f64 {
        self.coefficients().iter().sum()
    }

    /// Power the processed band must reach, `N * T`.
    pub fn required_power(&self) -> f64 {
        self.noise_power * self.snr_target
    }

    pub fn penalty(&self, gains: &[f64]) -> f64 {
        self.coefficients()
            .iter()
            .zip(gains)
            .map(|(a, v)| a * (1.0 - v).powi(2))
            .sum()
    }

    pub fn processed_power(&self, gains: &[f64]) -> f64 {
        self.coefficients()
            .iter()
            .zip(gains)
            .map(|(a, v)| a * v * v)
            .sum()
    }

    fn validate(&self) -> Result<()> {
        if self.weights.len() != self.speech_powers.len() || self.weights.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "BandInstance",
                expected: self.weights.len(),
                got: self.speech_powers.len(),
            });
        }
        let all_nonneg = self
            .weights
            .iter()
            .chain(&self.speech_powers)
            .chain([&self.noise_power, &self.snr_target])
            .all(|x| *x >= 0.0 && x.is_finite());
        if !all_nonneg {
            return Err(Error::InfeasibleInstance("negative or non-finite input".into()));
        }
        Ok(())
    }
}

/// Minimizer over `v >= 1` of `a (1 - v)^2 - lambda a v^2` for one bin.
///
/// With `lambda < 1` this is a convex quadratic `q v^2 - 2 a v + a` where
/// `q = a (1 - lambda)`, minimized at `a / q` and clipped to the feasible
/// half-line. A bin with `a = 0` does not affect the objective and keeps a
/// unit gain.
fn bin_minimizer(a: f64, lambda: f64) -> f64 {
    if a == 0.0 {
        return 1.0;
    }
    let quadratic = a * (1.0 - lambda);
    (a / quadratic).max(1.0)
}

fn gains_at(coeffs: &[f64], lambda: f64) -> Vec<f64> {
    coeffs.iter().map(|a| bin_minimizer(*a, lambda)).collect()
}

fn residual(coeffs: &[f64], gains: &[f64], required: f64) -> f64 {
    coeffs.iter().zip(gains).map(|(a, v)| a * v * v).sum::<f64>() - required
}

/// Per-bin optimal gains found by bisection on the constraint multiplier.
///
/// Bisection stops once the gain bracket is narrower than `tol` relative, and
/// returns the feasible end of the bracket.
pub fn solve_numeric(instance: &BandInstance, tol: f64) -> Result<Vec<f64>> {
    instance.validate()?;
    let coeffs = instance.coefficients();
    let required = instance.required_power();

    let unprocessed = vec![1.0; coeffs.len()];
    if residual(&coeffs, &unprocessed, required) >= 0.0 {
        return Ok(unprocessed);
    }

    let mut lo = 0.0;
    let mut hi = LAMBDA_MAX;
    let mut hi_gains = gains_at(&coeffs, hi);
    if residual(&coeffs, &hi_gains, required) < 0.0 {
        return Err(Error::InfeasibleInstance(format!(
            "band power {} cannot reach {} with bounded gains",
            instance.speech_band_power(),
            required
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gains = gains_at(&coeffs, mid);
        if residual(&coeffs, &gains, required) >= 0.0 {
            hi = mid;
            hi_gains = gains;
        } else {
            lo = mid;
        }
        let v_lo = 1.0 / (1.0 - lo);
        let v_hi = 1.0 / (1.0 - hi);
        if (v_hi - v_lo) <= tol * v_lo {
            break;
        }
    }
    Ok(hi_gains)
}

/// Result of an exhaustive grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    /// Best feasible grid point, if any grid point is feasible.
    pub best: Option<Vec<f64>>,
    pub best_penalty: f64,
    pub step: f64,
    /// True when no grid point is feasible or the best point touches the
    /// upper edge of the grid, i.e. the grid is too small to bracket the
    /// optimum.
    pub boundary_hit: bool,
}

/// Exhaustive search over `[1, upper]^n` with `resolution` points per axis.
pub fn grid_check(instance: &BandInstance, resolution: usize, upper: f64) -> Result<GridReport> {
    instance.validate()?;
    let n = instance.weights.len();
    if n > 3 {
        return Err(Error::BandTooLarge(n));
    }
    if resolution < 2 || !(upper > 1.0) {
        return Err(Error::InvalidConfig(format!(
            "grid needs resolution >= 2 and upper > 1, got {resolution} and {upper}"
        )));
    }
    let step = (upper - 1.0) / (resolution - 1) as f64;
    let axis: Vec<f64> = (0..resolution).map(|i| 1.0 + step * i as f64).collect();
    let coeffs = instance.coefficients();
    let required = instance.required_power();

    let mut best: Option<Vec<f64>> = None;
    let mut best_penalty = f64::INFINITY;
    let mut point = vec![0usize; n];
    let total = resolution.pow(n as u32);
    let mut gains = vec![1.0; n];
    for mut index in 0..total {
        for p in point.iter_mut() {
            *p = index % resolution;
            index /= resolution;
        }
        for (g, p) in gains.iter_mut().zip(&point) {
            *g = axis[*p];
        }
        if residual(&coeffs, &gains, required) < 0.0 {
            continue;
        }
        let penalty = instance.penalty(&gains);
        if penalty < best_penalty {
            best_penalty = penalty;
            best = Some(gains.clone());
        }
    }
    let boundary_hit = match &best {
        None => true,
        Some(g) => g.iter().any(|v| *v >= upper),
    };
    Ok(GridReport {
        best,
        best_penalty,
        step,
        boundary_hit,
    })
}

/// Random instance: powers log-uniform over six decades, 1 to `max_bins`
/// bins, SNR target log-uniform in `[1e-3, 1e3]`.
pub fn random_instance<R: Rng>(rng: &mut R, max_bins: usize) -> BandInstance {
    let bins = rng.random_range(1..=max_bins.max(1));
    let log_uniform = |rng: &mut R, lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
    let weights = (0..bins).map(|_| log_uniform(rng, -6.0, 0.0)).collect();
    let speech_powers = (0..bins).map(|_| log_uniform(rng, -6.0, 0.0)).collect();
    BandInstance {
        weights,
        speech_powers,
        noise_power: log_uniform(rng, -6.0, 0.0),
        snr_target: log_uniform(rng, -3.0, 3.0),
    }
}
