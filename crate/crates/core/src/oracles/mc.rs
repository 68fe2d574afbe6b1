//! Monte Carlo valuation of a threshold prepayment policy: pay `c` per year
//! until the short rate first drops to the boundary (checked on the time
//! grid), then pay the unit balance.
//!
//! Rates move by exact CIR transitions (scaled noncentral χ²), so they stay
//! non-negative and `dt` only affects the trapezoidal discount integral and
//! how often the boundary is monitored. A path ends once its discount factor
//! falls below `discount_floor`; everything after that is worth less than the
//! floor because the remaining value never exceeds the balance.
//!
//! Path `i` draws from a ChaCha8 stream `i` under the run seed, and results
//! are reduced in path order, so estimates do not depend on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CirParams, ContractParams};
use crate::par::{map_range, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McOptions {
    pub paths: usize,
    /// Time step in years.
    pub dt: f64,
    /// Hard cap on simulated years.
    pub horizon: f64,
    pub discount_floor: f64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            paths: 100_000,
            dt: 1.0 / 252.0,
            horizon: 2_000.0,
            discount_floor: 1e-8,
            seed: 20_240_601,
            exec: Execution::default(),
        }
    }
}

impl McOptions {
    fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::validation("paths", "need at least one path"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::validation("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= self.dt) || !self.horizon.is_finite() {
            return Err(Error::validation("horizon", "must be finite and at least dt"));
        }
        if !(self.discount_floor > 0.0 && self.discount_floor < 1.0) {
            return Err(Error::validation("discount_floor", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub x0: f64,
    pub boundary_used: f64,
    pub value_estimate: f64,
    pub std_error: f64,
    pub paths: usize,
    pub dt: f64,
    pub seed: u64,
    /// Mean number of simulated steps per path.
    pub mean_steps: f64,
}

/// Values at `boundary − δ`, `boundary` and `boundary + δ` from the same paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub x0: f64,
    pub boundaries: [f64; 3],
    pub values: [f64; 3],
    pub std_errors: [f64; 3],
    /// Standard errors of `v_minus − v_0` and `v_plus − v_0` from the paired samples.
    pub diff_std_errors: [f64; 2],
    pub paths: usize,
    pub dt: f64,
    pub seed: u64,
}

impl ProbeReport {
    pub fn v_minus(&self) -> f64 {
        self.values[0]
    }
    pub fn v_0(&self) -> f64 {
        self.values[1]
    }
    pub fn v_plus(&self) -> f64 {
        self.values[2]
    }
}

/// Exact CIR transition over a fixed step: `x' = c_t · χ'²_d(λ)` with
/// `c_t = σ²(1 − e^{−k dt})/(4k)`, `d = 4kθ/σ²`, `λ = x e^{−k dt}/c_t`.
#[derive(Debug, Clone)]
struct CirStep {
    scale: f64,
    decay: f64,
    dof: f64,
    /// χ²_{d−1} for the `d > 1` decomposition `(Z + √λ)² + χ²_{d−1}`.
    chi: Option<ChiSquared<f64>>,
}

impl CirStep {
    fn new(cir: &CirParams, dt: f64) -> Result<Self> {
        let CirParams { k, theta, sigma } = *cir;
        let s2 = sigma * sigma;
        let scale = -s2 * (-k * dt).exp_m1() / (4.0 * k);
        let dof = 4.0 * k * theta / s2;
        let chi = if dof > 1.0 {
            Some(ChiSquared::new(dof - 1.0).map_err(|e| Error::validation("sigma", e.to_string()))?)
        } else {
            None
        };
        Ok(CirStep {
            scale,
            decay: (-k * dt).exp(),
            dof,
            chi,
        })
    }

    fn sample<R: Rng>(&self, x: f64, rng: &mut R) -> f64 {
        let lambda = x * self.decay / self.scale;
        let chi2 = match &self.chi {
            Some(chi) => {
                let z: f64 = StandardNormal.sample(rng);
                let shifted = z + lambda.sqrt();
                shifted * shifted + chi.sample(rng)
            }
            None => {
                let n = if lambda > 0.0 {
                    Poisson::new(0.5 * lambda).map_or(0.0, |p| p.sample(rng))
                } else {
                    0.0
                };
                let shape = 0.5 * self.dof + n;
                Gamma::new(shape, 2.0).map_or(0.0, |g| g.sample(rng))
            }
        };
        self.scale * chi2
    }
}

struct PathResult<const B: usize> {
    payoff: [f64; B],
    steps: usize,
}

/// One path valued under up to `B` boundaries at once.
fn simulate_path<const B: usize, R: Rng>(
    step: &CirStep,
    x0: f64,
    boundaries: &[f64; B],
    c: f64,
    opts: &McOptions,
    rng: &mut R,
) -> PathResult<B> {
    let mut payoff = [0.0; B];
    let mut open = [true; B];
    let mut remaining = B;
    for j in 0..B {
        if x0 <= boundaries[j] {
            payoff[j] = 1.0;
            open[j] = false;
            remaining -= 1;
        }
    }
    let dt = opts.dt;
    let max_steps = (opts.horizon / dt).ceil() as usize;
    let (mut x, mut integral, mut discount, mut paid) = (x0, 0.0, 1.0, 0.0);
    let mut steps = 0;
    while remaining > 0 && steps < max_steps && discount >= opts.discount_floor {
        let next = step.sample(x, rng);
        integral += 0.5 * (x + next) * dt;
        let d_next = (-integral).exp();
        paid += 0.5 * c * (discount + d_next) * dt;
        x = next;
        discount = d_next;
        steps += 1;
        for j in 0..B {
            if open[j] && x <= boundaries[j] {
                payoff[j] = paid + discount;
                open[j] = false;
                remaining -= 1;
            }
        }
    }
    for j in 0..B {
        if open[j] {
            payoff[j] = paid;
        }
    }
    PathResult { payoff, steps }
}

fn run<const B: usize>(
    cir: &CirParams,
    contract: &ContractParams,
    x0: f64,
    boundaries: [f64; B],
    opts: &McOptions,
) -> Result<Vec<PathResult<B>>> {
    cir.validate()?;
    contract.validate()?;
    opts.validate()?;
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::validation("x0", format!("must be positive, got {x0}")));
    }
    if boundaries.iter().any(|b| !(*b >= 0.0 && b.is_finite())) {
        return Err(Error::validation("boundary", "must be finite and ≥ 0"));
    }
    let step = CirStep::new(cir, opts.dt)?;
    let c = contract.c;
    Ok(map_range(opts.exec, opts.paths, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(i as u64);
        simulate_path(&step, x0, &boundaries, c, opts, &mut rng)
    }))
}

fn mean_and_se(samples: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = samples.clone().sum::<f64>() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = samples.map(|s| (s - mean) * (s - mean)).sum::<f64>() / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

/// Value of the threshold policy at `boundary`, started from `x0`.
pub fn mc_value(
    cir: &CirParams,
    contract: &ContractParams,
    x0: f64,
    boundary: f64,
    opts: &McOptions,
) -> Result<McReport> {
    let contract = contract.normalized();
    let results = run(cir, &contract, x0, [boundary], opts)?;
    let (value_estimate, std_error) = mean_and_se(results.iter().map(|r| r.payoff[0]), results.len());
    Ok(McReport {
        x0,
        boundary_used: boundary,
        value_estimate,
        std_error,
        paths: opts.paths,
        dt: opts.dt,
        seed: opts.seed,
        mean_steps: results.iter().map(|r| r.steps as f64).sum::<f64>() / results.len() as f64,
    })
}

/// Common-random-number valuation at `boundary − δ`, `boundary`, `boundary + δ`.
pub fn mc_optimality_probe(
    cir: &CirParams,
    contract: &ContractParams,
    x0: f64,
    boundary: f64,
    delta: f64,
    opts: &McOptions,
) -> Result<ProbeReport> {
    if !(delta >= 0.0) || !(boundary - delta > 0.0) {
        return Err(Error::validation("delta", "need 0 ≤ δ < boundary"));
    }
    let contract = contract.normalized();
    let boundaries = [boundary - delta, boundary, boundary + delta];
    let results = run(cir, &contract, x0, boundaries, opts)?;
    let n = results.len();
    let stats: Vec<(f64, f64)> = (0..3)
        .map(|j| mean_and_se(results.iter().map(move |r| r.payoff[j]), n))
        .collect();
    let diff_se = |j: usize| mean_and_se(results.iter().map(move |r| r.payoff[j] - r.payoff[1]), n).1;
    Ok(ProbeReport {
        x0,
        boundaries,
        values: [stats[0].0, stats[1].0, stats[2].0],
        std_errors: [stats[0].1, stats[1].1, stats[2].1],
        diff_std_errors: [diff_se(0), diff_se(2)],
        paths: opts.paths,
        dt: opts.dt,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (CirParams, ContractParams) {
        (
            CirParams::new(0.25, 0.06, 0.1).unwrap(),
            ContractParams::perpetual(0.05).unwrap(),
        )
    }

    fn small(paths: usize) -> McOptions {
        McOptions {
            paths,
            dt: 1.0 / 52.0,
            ..Default::default()
        }
    }

    #[test]
    fn immediate_stop() {
        let (cir, contract) = fixture();
        let r = mc_value(&cir, &contract, 0.01, 0.02, &small(10)).unwrap();
        assert_eq!(r.value_estimate, 1.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn transition_moments() {
        // E[x_t | x_0] = θ + (x_0 − θ)e^{−kt}; Var = x_0 σ²e^{−kt}(1−e^{−kt})/k + θσ²(1−e^{−kt})²/(2k).
        for (k, theta, sigma) in [(0.25, 0.06, 0.1), (0.1, 0.03, 0.2)] {
            let cir = CirParams::new(k, theta, sigma).unwrap();
            let dt = 0.5;
            let step = CirStep::new(&cir, dt).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let x0 = 0.04;
            let n = 200_000;
            let xs: Vec<f64> = (0..n).map(|_| step.sample(x0, &mut rng)).collect();
            assert!(xs.iter().all(|&x| x >= 0.0));
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let e = (-k * dt).exp();
            let want_mean = theta + (x0 - theta) * e;
            let want_var =
                x0 * sigma * sigma * e * (1.0 - e) / k + theta * sigma * sigma * (1.0 - e).powi(2) / (2.0 * k);
            assert!((mean - want_mean).abs() < 4.0 * (want_var / n as f64).sqrt());
            assert!((var / want_var - 1.0).abs() < 0.02, "{var} vs {want_var}");
        }
    }

    #[test]
    fn deterministic_across_execution_modes() {
        let (cir, contract) = fixture();
        let seq = McOptions {
            exec: Execution::Sequential,
            ..small(64)
        };
        let par = McOptions {
            exec: Execution::Parallel,
            ..small(64)
        };
        let a = mc_value(&cir, &contract, 0.06, 0.0092, &seq).unwrap();
        let b = mc_value(&cir, &contract, 0.06, 0.0092, &par).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_probe_and_crn() {
        let (cir, contract) = fixture();
        let p0 = mc_optimality_probe(&cir, &contract, 0.03, 0.0092, 0.0, &small(200)).unwrap();
        assert_eq!(p0.values[0], p0.values[1]);
        assert_eq!(p0.values[2], p0.values[1]);
        let p = mc_optimality_probe(&cir, &contract, 0.03, 0.0092, 0.002, &small(400)).unwrap();
        for j in 0..2 {
            let side = if j == 0 { 0 } else { 2 };
            let independent = p.std_errors[side].powi(2) + p.std_errors[1].powi(2);
            assert!(p.diff_std_errors[j].powi(2) < independent);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let (cir, contract) = fixture();
        let bad = McOptions { dt: 0.0, ..small(1) };
        assert!(matches!(
            mc_value(&cir, &contract, 0.06, 0.01, &bad),
            Err(Error::Validation { field: "dt", .. })
        ));
        let short = McOptions {
            horizon: 0.001,
            ..small(1)
        };
        assert!(mc_value(&cir, &contract, 0.06, 0.01, &short).is_err());
    }
}
