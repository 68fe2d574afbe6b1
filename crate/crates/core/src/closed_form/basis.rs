//! The four positive basis functions the closed form needs, `U`, `U(α+1, γ+1)`,
//! `e^{−z}M` and `e^{−z}M(α+1, γ+1)`, optionally tabulated per parameter set.
//!
//! Each table stores `ln f` as a piecewise Chebyshev interpolant in `t = ln z`.
//! The functions are entire in `t` (even at integer `γ`, where `U` picks up
//! `z^n ln z` terms), so a few dozen nodes per unit of `t` reach the accuracy of
//! the direct evaluation. Outside the tabulated range every call falls back to
//! [`crate::specfun`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{kummer_m_scaled, tricomi_u, HypergeometricParams};

const NODES: usize = 24;
const INITIAL_WIDTH: f64 = 1.0;
const MIN_WIDTH: f64 = 1.0 / 64.0;
/// Accept a panel once its three trailing coefficients sum below this, relative
/// to `max(1, |ln f|)`. Direct evaluations are good to about `1e−14`.
const TAIL_TOL: f64 = 2e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    U,
    UShifted,
    MScaled,
    MScaledShifted,
}

const KINDS: [Kind; 4] = [Kind::U, Kind::UShifted, Kind::MScaled, Kind::MScaledShifted];

fn direct(p: HypergeometricParams, kind: Kind, z: f64) -> Result<f64> {
    match kind {
        Kind::U => tricomi_u(p, z),
        Kind::UShifted => tricomi_u(p.shifted(), z),
        Kind::MScaled => kummer_m_scaled(p, z),
        Kind::MScaledShifted => kummer_m_scaled(p.shifted(), z),
    }
}

fn ln_direct(p: HypergeometricParams, kind: Kind, z: f64) -> Result<f64> {
    let v = direct(p, kind, z)?;
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(Error::NonFinite {
            context: "basis function",
            at: z,
        })
    }
}

#[derive(Debug, Clone)]
struct Panel {
    t0: f64,
    t1: f64,
    coeffs: [f64; NODES],
}

impl Panel {
    fn fit(f: &impl Fn(f64) -> Result<f64>, t0: f64, t1: f64) -> Result<(Panel, f64)> {
        let mid = 0.5 * (t0 + t1);
        let half = 0.5 * (t1 - t0);
        let n = NODES as f64;
        let mut vals = [0.0; NODES];
        for (j, v) in vals.iter_mut().enumerate() {
            *v = f(mid + half * (PI * (j as f64 + 0.5) / n).cos())?;
        }
        let mut coeffs = [0.0; NODES];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let s: f64 = vals
                .iter()
                .enumerate()
                .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n).cos())
                .sum();
            *c = 2.0 * s / n;
        }
        coeffs[0] *= 0.5;
        let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tail = coeffs[NODES - 3..].iter().map(|c| c.abs()).sum::<f64>() / scale;
        Ok((Panel { t0, t1, coeffs }, tail))
    }

    fn eval(&self, t: f64) -> f64 {
        let x = (2.0 * t - self.t0 - self.t1) / (self.t1 - self.t0);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }
}

#[derive(Debug, Clone)]
struct Table {
    panels: Vec<Panel>,
}

impl Table {
    fn build(f: impl Fn(f64) -> Result<f64>, t_lo: f64, t_hi: f64) -> Result<Table> {
        let count = ((t_hi - t_lo) / INITIAL_WIDTH).ceil().max(1.0) as usize;
        let width = (t_hi - t_lo) / count as f64;
        let mut pending: Vec<(f64, f64)> = (0..count)
            .rev()
            .map(|i| {
                let a = t_lo + i as f64 * width;
                let b = if i + 1 == count { t_hi } else { a + width };
                (a, b)
            })
            .collect();
        let mut panels = Vec::new();
        while let Some((a, b)) = pending.pop() {
            let (panel, tail) = Panel::fit(&f, a, b)?;
            if tail <= TAIL_TOL || b - a <= MIN_WIDTH {
                panels.push(panel);
            } else {
                let m = 0.5 * (a + b);
                pending.push((m, b));
                pending.push((a, m));
            }
        }
        Ok(Table { panels })
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.panels.partition_point(|p| p.t1 < t);
        self.panels[i.min(self.panels.len() - 1)].eval(t)
    }
}

/// Evaluator for the basis functions of one `(α, γ)` pair.
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    params: HypergeometricParams,
    range: Option<(f64, f64)>,
    tables: Vec<Table>,
}

impl Basis {
    /// Untabulated: every call goes to the special-function routines.
    pub fn direct(params: HypergeometricParams) -> Self {
        Basis {
            params,
            range: None,
            tables: Vec::new(),
        }
    }

    /// Tabulates all four functions on `[z_lo, z_hi]`.
    pub fn tabulated(params: HypergeometricParams, z_lo: f64, z_hi: f64) -> Result<Self> {
        if !(z_lo > 0.0 && z_hi > z_lo && z_hi.is_finite()) {
            return Err(Error::domain("basis table", format!("invalid range [{z_lo}, {z_hi}]")));
        }
        let (t_lo, t_hi) = (z_lo.ln(), z_hi.ln());
        let tables = KINDS
            .iter()
            .map(|&kind| Table::build(|t| ln_direct(params, kind, t.exp()), t_lo, t_hi))
            .collect::<Result<Vec<_>>>()?;
        Ok(Basis {
            params,
            range: Some((z_lo, z_hi)),
            tables,
        })
    }

    pub fn params(&self) -> HypergeometricParams {
        self.params
    }

    fn ln_eval(&self, kind: Kind, z: f64) -> Result<f64> {
        match self.range {
            Some((lo, hi)) if z >= lo && z <= hi => {
                let idx = KINDS.iter().position(|&k| k == kind).expect("known kind");
                Ok(self.tables[idx].eval(z.ln()))
            }
            _ => ln_direct(self.params, kind, z),
        }
    }

    /// `ln U(α, γ, z)`
    pub fn ln_u(&self, z: f64) -> Result<f64> {
        self.ln_eval(Kind::U, z)
    }

    /// `ln U(α+1, γ+1, z)`; `U' = −α U(α+1, γ+1, z)`.
    pub fn ln_u_shifted(&self, z: f64) -> Result<f64> {
        self.ln_eval(Kind::UShifted, z)
    }

    /// `ln(e^{−z} M(α, γ, z))`
    pub fn ln_m_scaled(&self, z: f64) -> Result<f64> {
        self.ln_eval(Kind::MScaled, z)
    }

    /// `ln(e^{−z} M(α+1, γ+1, z))`; `e^{−z} M' = (α/γ) e^{−z} M(α+1, γ+1, z)`.
    pub fn ln_m_scaled_shifted(&self, z: f64) -> Result<f64> {
        self.ln_eval(Kind::MScaledShifted, z)
    }
}
