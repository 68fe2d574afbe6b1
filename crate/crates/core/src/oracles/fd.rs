//! Finite-difference oracle: the time-dependent obstacle problem
//!
//! ```text
//! V_τ = (σ²/2) x V_xx + k(θ − x) V_x − x V + m,   V ≤ (m/c)(1 − e^{−cτ}),   V(x, 0) = 0
//! ```
//!
//! marched in time-to-expiry with backward Euler until it stops changing. Each
//! step is a linear complementarity problem solved by projected SOR. Diffusion
//! uses central differences and advection is central where the cell Péclet
//! number allows, upwind otherwise, so the system matrix is an M-matrix. At
//! `x = 0` the equation degenerates to `V_τ = kθ V_x + m`, discretized one-sided;
//! at `x_max` the frozen-rate value `(m/x)(1 − e^{−xτ})` is imposed, which tends
//! to `m/x_max`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{balance, CirParams, ContractParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdOptions {
    /// Grid nodes on `[0, x_max]`, endpoints included.
    pub nodes: usize,
    pub x_max: f64,
    /// First time step; later steps grow geometrically.
    pub dtau: f64,
    pub dtau_max: f64,
    pub growth: f64,
    pub tau_max: f64,
    /// Max-norm change per step that counts as steady.
    pub steady_tol: f64,
    /// Max-norm PSOR update that ends an inner solve.
    pub psor_tol: f64,
    pub psor_max_iter: usize,
}

impl FdOptions {
    /// Defaults: `x_max = 50θ`, `τ_max = 200/k`, first step `10⁻⁴/k` growing by
    /// 10% per step to at most one year.
    pub fn new(cir: &CirParams, nodes: usize) -> Self {
        FdOptions {
            nodes,
            x_max: 50.0 * cir.theta,
            dtau: 1e-4 / cir.k,
            dtau_max: 1.0,
            growth: 1.1,
            tau_max: 200.0 / cir.k,
            steady_tol: 1e-10,
            psor_tol: 1e-12,
            psor_max_iter: 200_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 3 {
            return Err(Error::validation("nodes", "need at least 3 grid nodes"));
        }
        for (field, v) in [
            ("x_max", self.x_max),
            ("dtau", self.dtau),
            ("dtau_max", self.dtau_max),
            ("tau_max", self.tau_max),
            ("steady_tol", self.steady_tol),
            ("psor_tol", self.psor_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(field, format!("must be positive, got {v}")));
            }
        }
        if !(self.growth >= 1.0) {
            return Err(Error::validation("growth", "must be ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdReport {
    pub grid: Vec<f64>,
    pub v_steady: Vec<f64>,
    /// `(τ, h(τ))`: the largest node in contact with the obstacle after each step.
    pub h_trace: Vec<(f64, f64)>,
    pub steps_to_steady: usize,
    pub tau_final: f64,
    pub psor_iterations: usize,
    pub warnings: Vec<String>,
}

impl FdReport {
    pub fn dx(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Steady-state boundary: the last entry of the h-trace.
    pub fn boundary(&self) -> f64 {
        self.h_trace.last().map_or(0.0, |&(_, h)| h)
    }

    /// Piecewise-linear interpolation of the steady profile.
    pub fn value_at(&self, x: f64) -> f64 {
        let dx = self.dx();
        let n = self.grid.len();
        let s = (x / dx).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let w = s - i as f64;
        (1.0 - w) * self.v_steady[i] + w * self.v_steady[i + 1]
    }
}

/// Tridiagonal coefficients of `−L_h` (without the time term), row by row.
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    upwind_nodes: usize,
}

fn operator(cir: &CirParams, grid: &[f64], dx: f64) -> Operator {
    let n = grid.len();
    let CirParams { k, theta, sigma } = *cir;
    let mut op = Operator {
        lower: vec![0.0; n],
        diag: vec![0.0; n],
        upper: vec![0.0; n],
        upwind_nodes: 0,
    };
    op.diag[0] = k * theta / dx;
    op.upper[0] = k * theta / dx;
    for (i, &x) in grid.iter().enumerate().take(n - 1).skip(1) {
        let a = 0.5 * sigma * sigma * x / (dx * dx);
        let mu = k * (theta - x);
        let (lo, up) = if a >= mu.abs() / (2.0 * dx) {
            (a - mu / (2.0 * dx), a + mu / (2.0 * dx))
        } else {
            op.upwind_nodes += 1;
            if mu > 0.0 {
                (a, a + mu / dx)
            } else {
                (a - mu / dx, a)
            }
        };
        op.lower[i] = lo;
        op.upper[i] = up;
        op.diag[i] = lo + up + x;
    }
    op
}

/// Marches the obstacle problem to steady state.
pub fn fd_steady_state(cir: &CirParams, contract: &ContractParams, opts: &FdOptions) -> Result<FdReport> {
    cir.validate()?;
    contract.validate()?;
    opts.validate()?;
    let contract = contract.normalized();
    let m = contract.m;
    let n = opts.nodes;
    let dx = opts.x_max / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
    let op = operator(cir, &grid, dx);

    let mut warnings = Vec::new();
    if op.upwind_nodes > 0 {
        warnings.push(format!(
            "first-order upwind advection at {} nodes where the cell Péclet number exceeds 2",
            op.upwind_nodes
        ));
    }
    let courant = cir.k * (opts.x_max - cir.theta).abs().max(cir.theta) * opts.dtau / dx;
    if courant > 1.0 {
        warnings.push(format!(
            "advective Courant number {courant:.3} > 1 on the first step; early h-trace is coarse"
        ));
    }

    let mut v = vec![0.0; n];
    let mut h_trace = Vec::new();
    let mut tau = 0.0;
    let mut dtau = opts.dtau;
    let mut psor_iterations = 0;
    let mut steps = 0;
    let mut rhs = vec![0.0; n];
    let mut last_changes = Vec::new();
    while tau < opts.tau_max {
        tau += dtau;
        steps += 1;
        let obstacle = balance(&contract, tau)?;
        let x_end = opts.x_max;
        let v_far = m / x_end * -(-x_end * tau).exp_m1();
        for i in 0..n - 1 {
            rhs[i] = v[i] / dtau + m;
        }
        let prev = v.clone();
        v[n - 1] = v_far.min(obstacle);

        let diag: Vec<f64> = op.diag.iter().map(|d| d + 1.0 / dtau).collect();
        let rho = (1..n - 1)
            .map(|i| 2.0 * (op.lower[i] * op.upper[i]).sqrt() / diag[i])
            .fold(0.0f64, f64::max)
            .min(1.0 - 1e-12);
        let omega = 2.0 / (1.0 + (1.0 - rho * rho).sqrt());

        let mut converged = false;
        for _ in 0..opts.psor_max_iter {
            psor_iterations += 1;
            let mut max_update = 0.0f64;
            for i in 0..n - 1 {
                let mut s = rhs[i] + op.upper[i] * v[i + 1];
                if i > 0 {
                    s += op.lower[i] * v[i - 1];
                }
                let gs = s / diag[i];
                let new = (v[i] + omega * (gs - v[i])).min(obstacle);
                max_update = max_update.max((new - v[i]).abs());
                v[i] = new;
            }
            if max_update <= opts.psor_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                context: "projected SOR",
                trace: vec![(tau, dtau)],
            });
        }

        let contact = v
            .iter()
            .rposition(|&vi| vi >= obstacle * (1.0 - 1e-12))
            .map_or(0.0, |i| grid[i]);
        h_trace.push((tau, contact));

        let change = v.iter().zip(&prev).fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()));
        last_changes.push((tau, change));
        if last_changes.len() > 16 {
            last_changes.remove(0);
        }
        if change <= opts.steady_tol {
            return Ok(FdReport {
                grid,
                v_steady: v,
                h_trace,
                steps_to_steady: steps,
                tau_final: tau,
                psor_iterations,
                warnings,
            });
        }
        dtau = (dtau * opts.growth).min(opts.dtau_max);
    }
    Err(Error::Convergence {
        context: "finite-difference steady state",
        trace: last_changes,
    })
}

/// Profiles on `n` and `2n − 1` nodes (so every coarse node is a fine node) and
/// the order-2 Richardson estimate `(4/3)(V_n − V_{2n−1})` of the coarse error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichardsonEstimate {
    pub coarse: FdReport,
    pub fine: FdReport,
    pub coarse_error: Vec<f64>,
}

pub fn fd_richardson(cir: &CirParams, contract: &ContractParams, opts: &FdOptions) -> Result<RichardsonEstimate> {
    let coarse = fd_steady_state(cir, contract, opts)?;
    let fine_opts = FdOptions {
        nodes: 2 * opts.nodes - 1,
        ..*opts
    };
    let fine = fd_steady_state(cir, contract, &fine_opts)?;
    let coarse_error = coarse
        .v_steady
        .iter()
        .enumerate()
        .map(|(i, vc)| 4.0 / 3.0 * (vc - fine.v_steady[2 * i]))
        .collect();
    Ok(RichardsonEstimate {
        coarse,
        fine,
        coarse_error,
    })
}
