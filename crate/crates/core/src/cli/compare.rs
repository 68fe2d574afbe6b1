//! The `compare` table: one row per estimate, each against the closed form.

use serde::Serialize;

use super::checks::{fd_comparison, mc_probe, CheckStatus};
use super::{CliError, Oracle, RunConfig};
use crate::oracles::shoot_solve;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: &'static str,
    pub quantity: &'static str,
    pub x: Option<f64>,
    pub estimate: f64,
    pub reference: Option<f64>,
    pub difference: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: CheckStatus,
    pub detail: Option<String>,
}

impl CompareRow {
    fn reference(quantity: &'static str, x: Option<f64>, estimate: f64) -> Self {
        CompareRow {
            method: "closed_form",
            quantity,
            x,
            estimate,
            reference: None,
            difference: None,
            tolerance: None,
            status: CheckStatus::Reference,
            detail: None,
        }
    }

    fn against(
        method: &'static str,
        quantity: &'static str,
        x: Option<f64>,
        estimate: f64,
        reference: f64,
        tolerance: f64,
    ) -> Self {
        let difference = estimate - reference;
        CompareRow {
            method,
            quantity,
            x,
            estimate,
            reference: Some(reference),
            difference: Some(difference),
            tolerance: Some(tolerance),
            status: if difference.abs() <= tolerance {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail: None,
        }
    }

    fn skipped(method: &'static str) -> Self {
        CompareRow {
            method,
            quantity: "boundary",
            x: None,
            estimate: f64::NAN,
            reference: None,
            difference: None,
            tolerance: None,
            status: CheckStatus::Skipped,
            detail: Some("skipped by request".into()),
        }
    }
}

/// Boundary estimates from every method, FD values at the profile probes and
/// the Monte Carlo value at `x₀ = θ`. Values are in dollars (scaled by `m/c`).
pub fn compare_rows(cfg: &RunConfig) -> Result<Vec<CompareRow>, CliError> {
    let sol = cfg.solve()?;
    let scale = cfg.contract.scale();
    let x_star = sol.x_star;
    let theta = cfg.cir.theta;
    let mut rows = vec![
        CompareRow::reference("boundary", None, x_star),
        CompareRow::reference("value", Some(theta), scale * sol.value(theta)?),
    ];

    if cfg.skips(Oracle::Shooting) {
        rows.push(CompareRow::skipped("shooting"));
    } else {
        let shot = shoot_solve(&cfg.cir, &cfg.contract, 1e-9)?;
        rows.push(CompareRow::against(
            "shooting",
            "boundary",
            None,
            shot.r_star,
            x_star,
            1e-6 * x_star,
        ));
    }

    if cfg.skips(Oracle::Fd) {
        rows.push(CompareRow::skipped("fd"));
    } else {
        let fd = fd_comparison(cfg, &sol)?;
        let mut row = CompareRow::against("fd", "boundary", None, fd.boundary, x_star, 2.0 * fd.dx);
        row.detail = Some(format!("grid step {:.6e}", fd.dx));
        rows.push(row);
        let tol = 5.0 * fd.max_estimate * scale;
        for &(x, v_fd, v_cf, _) in &fd.probes {
            let mut row = CompareRow::against("fd", "value", Some(x), scale * v_fd, scale * v_cf, tol);
            row.detail = Some("tolerance 5× the largest Richardson error estimate".into());
            rows.push(row);
        }
    }

    if cfg.skips(Oracle::Mc) {
        rows.push(CompareRow::skipped("mc"));
    } else {
        let probe = mc_probe(cfg, &sol)?;
        let se = probe.std_errors[1];
        let mut row = CompareRow::against(
            "mc",
            "value",
            Some(theta),
            scale * probe.v_0(),
            scale * sol.value(theta)?,
            3.0 * se * scale,
        );
        row.detail = Some(format!(
            "{} paths, dt {:.6e}, standard error {:.6e}",
            probe.paths,
            probe.dt,
            se * scale
        ));
        rows.push(row);
    }
    Ok(rows)
}
