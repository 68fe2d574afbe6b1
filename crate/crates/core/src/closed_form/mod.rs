//! Closed-form steady-state solution.
//!
//! With `V(x) = e^{λx} u(z)`, `z = px`, the steady pricing equation becomes
//! Kummer's equation with a source, `z u'' + (γ − z) u' − α u = g(z)`,
//! `g(z) = −(c/s) e^{a z}` where `a = a_exp`. Variation of parameters over the
//! basis `{M, U}` gives
//!
//! ```text
//! u_p(z) = M(z) I_U(z) + U(z) I_M(z)
//! I_U(z) = ∫_z^∞ U(ξ) K(ξ) dξ,    I_M(z) = ∫_{z_ref}^z M(ξ) K(ξ) dξ
//! K(ξ)   = κ ξ^{γ−1} e^{−(1−a)ξ},  κ = Γ(α)/Γ(γ) · c/s
//! ```
//!
//! `M` grows like `e^z`, so a bounded value function carries no free `M` term and
//! `V = e^{−az} (c₂ U + u_p)` for `x > x*`. Everything is evaluated in the
//! overflow-free variables
//!
//! ```text
//! M̃ = e^{−z} M,   J_U = e^{(1−a)z} I_U,   J_M = e^{−az} I_M,   ĉ₂ = c₂ e^{−a z*}
//! V  = ĉ₂ e^{−a(z−z*)} U + M̃ J_U + U J_M
//! ```
//!
//! Smooth pasting `V(x*) = 1`, `V'(x*) = 0` with `z_ref = z*` gives
//! `ĉ₂ = (1 − M̃ J_U)/U` and the scalar equation
//! `F̂(z) = ĉ₂(z) U'(z) + M̃'(z) J_U(z) − a = 0`, with `F̂ = e^{−az} F` and
//! `F = c₂ U' + u_p' − a e^{az}` the unscaled residual.

mod asymptotic;
mod basis;

pub use asymptotic::{tail_expansion, TailExpansion};

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derive_constants, CirParams, ContractParams, DerivedConstants};
use crate::numerics::{try_brent, Quadrature, RootOptions};
use crate::par::{try_map_range, Execution};
use crate::specfun::log_gamma;
use basis::Basis;

/// Largest number of doubling panels used for the `I_U` tail.
const MAX_TAIL_PANELS: usize = 200;
/// The `I_U` tail is dropped once its bound falls below this fraction of the total.
const TAIL_REL: f64 = 1e-17;

/// `g(z) = −(c/s) e^{a_exp z}`.
pub fn source_term(consts: &DerivedConstants, contract: &ContractParams, z: f64) -> f64 {
    -(contract.c / consts.s) * (consts.a_exp * z).exp()
}

fn ln_kappa(consts: &DerivedConstants, c: f64) -> Result<f64> {
    Ok(log_gamma(consts.alpha)? - log_gamma(consts.gamma)? + (c / consts.s).ln())
}

/// `R(ξ)/W(ξ) = κ ξ^{γ−1} e^{−(1−a)ξ}`: the normalized source divided by the
/// Wronskian of `{M, U}`. Positive for `ξ > 0`.
pub fn kernel_weight(consts: &DerivedConstants, contract: &ContractParams, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::domain("kernel_weight", format!("ξ = {xi} must be positive")));
    }
    let ln_k = ln_kappa(consts, contract.c)?;
    Ok((ln_k + (consts.gamma - 1.0) * xi.ln() - (1.0 - consts.a_exp) * xi).exp())
}

/// `(u_p(z), u_p'(z))` with `I_M` anchored at `z_ref`.
pub fn particular_solution(
    consts: &DerivedConstants,
    contract: &ContractParams,
    z: f64,
    z_ref: f64,
) -> Result<(f64, f64)> {
    ClosedForm::new(consts, contract, Quadrature::default())?.particular_solution(z, z_ref)
}

/// Unscaled smooth-pasting residual `F(z)`, whose root is `z*`.
pub fn boundary_residual(consts: &DerivedConstants, contract: &ContractParams, z: f64) -> Result<f64> {
    ClosedForm::new(consts, contract, Quadrature::default())?.boundary_residual(z)
}

/// Basis values at one point.
#[derive(Debug, Clone, Copy)]
struct Point {
    u: f64,
    u_prime: f64,
    m: f64,
    m_prime: f64,
}

/// Evaluator for the kernel integrals and residuals of one parameter set.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    consts: DerivedConstants,
    ln_kappa: f64,
    basis: Basis,
    quad: Quadrature,
}

impl ClosedForm {
    /// Evaluates the basis functions directly on every call.
    pub fn new(consts: &DerivedConstants, contract: &ContractParams, quad: Quadrature) -> Result<Self> {
        Ok(ClosedForm {
            consts: *consts,
            ln_kappa: ln_kappa(consts, contract.c)?,
            basis: Basis::direct(consts.hypergeometric()),
            quad,
        })
    }

    /// Tabulates the basis functions on `[z_lo, z_hi]` first, which makes
    /// repeated evaluation one to two orders of magnitude cheaper.
    pub fn tabulated(
        consts: &DerivedConstants,
        contract: &ContractParams,
        quad: Quadrature,
        z_lo: f64,
        z_hi: f64,
    ) -> Result<Self> {
        Ok(ClosedForm {
            basis: Basis::tabulated(consts.hypergeometric(), z_lo, z_hi)?,
            ..Self::new(consts, contract, quad)?
        })
    }

    pub fn constants(&self) -> &DerivedConstants {
        &self.consts
    }

    fn point(&self, z: f64) -> Result<Point> {
        let p = self.basis.params();
        Ok(Point {
            u: self.basis.ln_u(z)?.exp(),
            u_prime: -p.alpha * self.basis.ln_u_shifted(z)?.exp(),
            m: self.basis.ln_m_scaled(z)?.exp(),
            m_prime: p.alpha / p.gamma * self.basis.ln_m_scaled_shifted(z)?.exp(),
        })
    }

    fn check_z(z: f64, context: &'static str) -> Result<()> {
        if z > 0.0 && z.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(context, format!("z = {z} must be positive and finite")))
        }
    }

    /// `J_U(z) = e^{(1−a)z} ∫_z^∞ U(ξ) K(ξ) dξ`.
    ///
    /// Integrates over panels that double in width away from `z` and stops once
    /// the bound `κ U(Ξ) Ξ^{γ−1} e^{−(1−a)(Ξ−z)} / ((1−a) − (γ−1)⁺/Ξ)` on the
    /// remaining tail is negligible. `U` is decreasing, which makes this a bound.
    pub fn scaled_tricomi_integral(&self, z: f64) -> Result<f64> {
        Self::check_z(z, "scaled_tricomi_integral")?;
        if self.ln_kappa == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let w = 1.0 - self.consts.a_exp;
        let g1 = self.consts.gamma - 1.0;
        let ln_f = |xi: f64| -> Result<f64> { Ok(self.basis.ln_u(xi)? + self.ln_kappa + g1 * xi.ln() - w * (xi - z)) };
        let near = z + 1.0;
        let mut lo = z;
        let mut hi = if z < 1.0 { 2.0 * z } else { near };
        let mut total = 0.0;
        let mut evaluations = 0;
        let mut bound = f64::INFINITY;
        for _ in 0..MAX_TAIL_PANELS {
            let quad = Quadrature {
                abs_tol: self.quad.abs_tol.max(1e-3 * self.quad.rel_tol * total),
                ..self.quad
            };
            let r = quad.try_integrate(|xi| ln_f(xi).map(f64::exp), lo, hi)?;
            total += r.value;
            evaluations += r.evaluations;
            let denom = w - g1.max(0.0) / hi;
            if hi >= near && denom > 0.5 * w {
                bound = ln_f(hi)?.exp() / denom;
                if bound <= TAIL_REL * total {
                    return Ok(total);
                }
            }
            lo = hi;
            hi = if hi < near {
                (2.0 * hi).min(near)
            } else {
                z + 2.0 * (hi - z)
            };
        }
        Err(Error::Quadrature {
            value: total,
            error_estimate: bound,
            evaluations,
        })
    }

    /// `J_M(z) = e^{−az} ∫_{z_ref}^z M(ξ) K(ξ) dξ`; negative for `z < z_ref`.
    pub fn scaled_kummer_integral(&self, z_ref: f64, z: f64) -> Result<f64> {
        Self::check_z(z, "scaled_kummer_integral")?;
        Self::check_z(z_ref, "scaled_kummer_integral")?;
        if z == z_ref || self.ln_kappa == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let (lo, hi, sign) = if z > z_ref { (z_ref, z, 1.0) } else { (z, z_ref, -1.0) };
        let a = self.consts.a_exp;
        let g1 = self.consts.gamma - 1.0;
        let mut breaks = vec![lo];
        let mut b = lo;
        while 2.0 * b < hi {
            b *= 2.0;
            breaks.push(b);
        }
        breaks.push(hi);
        let r = self.quad.try_integrate_over(
            |xi| Ok((self.basis.ln_m_scaled(xi)? + self.ln_kappa + g1 * xi.ln() + a * (xi - z)).exp()),
            &breaks,
        )?;
        Ok(sign * r.value)
    }

    /// `(u_p(z), u_p'(z))` for `z ≥ z_ref > 0`. Overflows for very large `a·z`.
    pub fn particular_solution(&self, z: f64, z_ref: f64) -> Result<(f64, f64)> {
        if !(z >= z_ref) {
            return Err(Error::domain(
                "particular_solution",
                format!("need z ≥ z_ref, got z = {z}, z_ref = {z_ref}"),
            ));
        }
        self.particular_unchecked(z, z_ref)
    }

    fn particular_unchecked(&self, z: f64, z_ref: f64) -> Result<(f64, f64)> {
        let pt = self.point(z)?;
        let ju = self.scaled_tricomi_integral(z)?;
        let jm = self.scaled_kummer_integral(z_ref, z)?;
        let scale = (self.consts.a_exp * z).exp();
        Ok((
            scale * (pt.m * ju + pt.u * jm),
            scale * (pt.m_prime * ju + pt.u_prime * jm),
        ))
    }

    /// `(ĉ₂(z), F̂(z))` for a boundary candidate `z`.
    fn pasting(&self, z: f64) -> Result<(f64, f64)> {
        let ju = self.scaled_tricomi_integral(z)?;
        let p = self.basis.params();
        let ln_u = self.basis.ln_u(z)?;
        if ln_u == f64::NEG_INFINITY {
            return Err(Error::Singular { z, u: 0.0 });
        }
        let m = self.basis.ln_m_scaled(z)?.exp();
        let m_prime = p.alpha / p.gamma * self.basis.ln_m_scaled_shifted(z)?.exp();
        let u_ratio = -p.alpha * (self.basis.ln_u_shifted(z)? - ln_u).exp();
        let free = 1.0 - m * ju;
        Ok((free * (-ln_u).exp(), free * u_ratio + m_prime * ju - self.consts.a_exp))
    }

    /// `F̂(z) = e^{−az} F(z)`: same sign and root as `F`, without the overflow.
    pub fn scaled_boundary_residual(&self, z: f64) -> Result<f64> {
        Self::check_z(z, "boundary_residual")?;
        Ok(self.pasting(z)?.1)
    }

    /// `F(z) = c₂(z) U'(z) + u_p'(z) − a e^{az}` with `z_ref = z`.
    pub fn boundary_residual(&self, z: f64) -> Result<f64> {
        Ok(self.scaled_boundary_residual(z)? * (self.consts.a_exp * z).exp())
    }

    /// The pasting equation in ratio form,
    /// `U/U(α+1, γ+1) + α (1 − M̃ J_U)/(a − M̃' J_U)`, with a single power of the
    /// `Γ(α)/Γ(γ)` ratio inside `J_U`. Shares its roots with [`Self::boundary_residual`]
    /// away from poles.
    pub fn ratio_residual(&self, z: f64) -> Result<f64> {
        Self::check_z(z, "ratio_residual")?;
        let ju = self.scaled_tricomi_integral(z)?;
        let pt = self.point(z)?;
        let alpha = self.consts.alpha;
        let u_over_u1 = (self.basis.ln_u(z)? - self.basis.ln_u_shifted(z)?).exp();
        Ok(u_over_u1 + alpha * (1.0 - pt.m * ju) / (self.consts.a_exp - pt.m_prime * ju))
    }

    /// `(V, dV/dz)` of the continuation-region formula anchored at `z_star`.
    /// The formula is an exact ODE solution for every `z > 0`, including
    /// `z < z_star` where it is not the value function.
    fn continuation(&self, z_star: f64, c2_scaled: f64, z: f64) -> Result<(f64, f64)> {
        Self::check_z(z, "value")?;
        let pt = self.point(z)?;
        let ju = self.scaled_tricomi_integral(z)?;
        let jm = self.scaled_kummer_integral(z_star, z)?;
        let a = self.consts.a_exp;
        let e = (-a * (z - z_star)).exp();
        let v = c2_scaled * e * pt.u + pt.m * ju + pt.u * jm;
        let dv = -a * v + c2_scaled * e * pt.u_prime + pt.m_prime * ju + pt.u_prime * jm;
        Ok((v, dv))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Relative bracket width for `z*`.
    pub tol_root: f64,
    /// Relative tolerance of every kernel quadrature.
    pub tol_quad: f64,
    /// Points in the geometric bracketing scan.
    pub scan_points: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_root: 1e-10,
            tol_quad: 1e-10,
            scan_points: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    /// `V(x*) − 1`.
    pub value_residual: f64,
    /// `V'(x*⁺)` in year.
    pub slope_residual: f64,
    /// Unscaled `F(z*)`.
    pub boundary_residual: f64,
    /// Final root bracket in `z`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Sign changes of `F` seen by the scan; the first one is refined.
    pub scan_sign_changes: usize,
    pub scan_range: (f64, f64),
}

/// Solved free boundary and everything needed to evaluate `V`.
#[derive(Debug, Clone, Serialize)]
pub struct SteadyStateSolution {
    pub cir: CirParams,
    /// Normalized contract (`m = c`).
    pub contract: ContractParams,
    pub consts: DerivedConstants,
    pub z_star: f64,
    pub x_star: f64,
    /// Coefficient of `U` in `u = c₂ U + u_p`; may be infinite when `a z*` is huge.
    pub c2: f64,
    /// `c₂ e^{−a z*}`, the coefficient actually used for evaluation.
    pub c2_scaled: f64,
    /// Coefficient of `M`, identically zero.
    pub c1: f64,
    pub diagnostics: SolveDiagnostics,
    #[serde(skip)]
    model: Arc<ClosedForm>,
}

/// Solves for the boundary with default quadrature settings and root tolerance `tol`.
pub fn solve_boundary(cir: &CirParams, contract: &ContractParams, tol: f64) -> Result<SteadyStateSolution> {
    solve_boundary_with(
        cir,
        contract,
        &SolveOptions {
            tol_root: tol,
            ..Default::default()
        },
    )
}

/// Scans `F` over a geometric grid on `(1e−4·pθ, 10·p·max(θ, c))`, refines the
/// first sign change with Brent's method and assembles the solution.
pub fn solve_boundary_with(
    cir: &CirParams,
    contract: &ContractParams,
    opts: &SolveOptions,
) -> Result<SteadyStateSolution> {
    cir.validate()?;
    contract.validate()?;
    if !(opts.tol_root >= 1e-12 && opts.tol_root < 1.0) {
        return Err(Error::validation(
            "tol_root",
            format!("must lie in [1e-12, 1), got {}", opts.tol_root),
        ));
    }
    if !(opts.tol_quad >= 1e-15 && opts.tol_quad < 1.0) {
        return Err(Error::validation(
            "tol_quad",
            format!("must lie in [1e-15, 1), got {}", opts.tol_quad),
        ));
    }
    if opts.scan_points < 2 {
        return Err(Error::validation("scan_points", "need at least 2"));
    }
    let contract = contract.normalized();
    let consts = derive_constants(cir)?;
    let reference = cir.theta.max(contract.c);
    let z_lo = 1e-4 * consts.p * cir.theta;
    let z_hi = 10.0 * consts.p * reference;
    // The table also covers value curves out to 50·max(θ, c, x*) and their I_U tails.
    let model = ClosedForm::tabulated(
        &consts,
        &contract,
        Quadrature::new(opts.tol_quad, 0.0),
        0.5 * z_lo,
        60.0 * z_hi + 400.0,
    )?;

    let n = opts.scan_points;
    let ratio = z_hi / z_lo;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let z = z_lo * ratio.powf(i as f64 / (n - 1) as f64);
        samples.push((z, model.scaled_boundary_residual(z)?));
    }
    let crossings: Vec<usize> = (1..n)
        .filter(|&i| samples[i - 1].1 == 0.0 || samples[i - 1].1.signum() != samples[i].1.signum())
        .collect();
    let Some(&first) = crossings.first() else {
        let a = consts.a_exp;
        return Err(Error::NoBracket {
            context: "boundary residual scan",
            samples: samples.iter().map(|&(z, f)| (z, f * (a * z).exp())).collect(),
        });
    };
    let (lo, hi) = (samples[first - 1].0, samples[first].0);
    let root = try_brent(
        |z| model.scaled_boundary_residual(z),
        lo,
        hi,
        RootOptions {
            abs_tol: 0.0,
            rel_tol: opts.tol_root,
            max_iter: 200,
        },
    )
    .map_err(|e| match e {
        Error::Convergence { trace, .. } => Error::Convergence {
            context: "boundary root",
            trace,
        },
        other => other,
    })?;

    let z_star = root.root;
    let (c2_scaled, f_hat) = model.pasting(z_star)?;
    let (v, dv) = model.continuation(z_star, c2_scaled, z_star)?;
    let a = consts.a_exp;
    Ok(SteadyStateSolution {
        cir: *cir,
        contract,
        consts,
        z_star,
        x_star: z_star / consts.p,
        c2: c2_scaled * (a * z_star).exp(),
        c2_scaled,
        c1: 0.0,
        diagnostics: SolveDiagnostics {
            value_residual: v - 1.0,
            slope_residual: consts.p * dv,
            boundary_residual: f_hat * (a * z_star).exp(),
            bracket: root.bracket,
            iterations: root.iterations,
            scan_sign_changes: crossings.len(),
            scan_range: (z_lo, z_hi),
        },
        model: Arc::new(model),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub v: f64,
    /// Steady ODE residual `(σ²/2)xV'' + k(θ−x)V' − xV + c`, with `V''` from a
    /// central difference of `V'`. `None` in the stopped region `x ≤ x*`.
    pub ode_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueCurve {
    pub points: Vec<CurvePoint>,
}

impl ValueCurve {
    /// Largest `|ode_residual|` over the continuation region.
    pub fn max_abs_residual(&self) -> f64 {
        self.points
            .iter()
            .filter_map(|p| p.ode_residual)
            .fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `0 < v ≤ 1` everywhere, `v = 1` in the stopped region and `v` strictly
    /// decreasing from the last stopped point on.
    pub fn has_valid_shape(&self, x_star: f64) -> bool {
        let bounded = self.points.iter().all(|p| p.v > 0.0 && p.v <= 1.0);
        let stopped = self.points.iter().filter(|p| p.x <= x_star).all(|p| p.v == 1.0);
        let decreasing = self
            .points
            .windows(2)
            .filter(|w| w[1].x > x_star)
            .all(|w| w[1].v < w[0].v);
        bounded && stopped && decreasing
    }
}

impl SteadyStateSolution {
    pub fn closed_form(&self) -> &ClosedForm {
        &self.model
    }

    fn check_x(x: f64) -> Result<()> {
        if x >= 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::validation("x", format!("must be finite and ≥ 0, got {x}")))
        }
    }

    /// `(V(x), V'(x))`; exactly `(1, 0)` for `x ≤ x*`.
    pub fn value_and_derivative(&self, x: f64) -> Result<(f64, f64)> {
        Self::check_x(x)?;
        if x <= self.x_star {
            return Ok((1.0, 0.0));
        }
        let (v, dv) = self
            .model
            .continuation(self.z_star, self.c2_scaled, self.consts.p * x)?;
        Ok((v, self.consts.p * dv))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.value_and_derivative(x)?.0)
    }

    /// `V'(x)`; at `x = x*` this is the right derivative.
    pub fn value_derivative(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if x < self.x_star {
            return Ok(0.0);
        }
        let (_, dv) = self
            .model
            .continuation(self.z_star, self.c2_scaled, self.consts.p * x)?;
        Ok(self.consts.p * dv)
    }

    /// Steady ODE residual of the continuation formula at `x > 0`, with `V''`
    /// from a central difference of `V'` at step `1e−5·x`.
    pub fn ode_residual(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::validation("x", format!("must be positive, got {x}")));
        }
        let p = self.consts.p;
        let eval = |x: f64| self.model.continuation(self.z_star, self.c2_scaled, p * x);
        let h = 1e-5 * x;
        let (v, dv) = eval(x)?;
        let (_, dv_hi) = eval(x + h)?;
        let (_, dv_lo) = eval(x - h)?;
        let d1 = p * dv;
        let d2 = p * (dv_hi - dv_lo) / (2.0 * h);
        let CirParams { k, theta, sigma } = self.cir;
        Ok(0.5 * sigma * sigma * x * d2 + k * (theta - x) * d1 - x * v + self.contract.c)
    }

    /// Samples `V` and the ODE residual at `xs`.
    pub fn curve(&self, xs: &[f64], exec: Execution) -> Result<ValueCurve> {
        let points = try_map_range(exec, xs.len(), |i| {
            let x = xs[i];
            let v = self.value(x)?;
            let ode_residual = if x >= self.x_star && x > 0.0 {
                Some(self.ode_residual(x)?)
            } else {
                None
            };
            Ok(CurvePoint { x, v, ode_residual })
        })?;
        Ok(ValueCurve { points })
    }
}

pub fn value(solution: &SteadyStateSolution, x: f64) -> Result<f64> {
    solution.value(x)
}

pub fn value_derivative(solution: &SteadyStateSolution, x: f64) -> Result<f64> {
    solution.value_derivative(x)
}

/// `n ≥ 2` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = hi / lo;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo * r.powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fixture() -> (CirParams, ContractParams) {
        (
            CirParams::new(0.25, 0.06, 0.1).unwrap(),
            ContractParams::perpetual(0.05).unwrap(),
        )
    }

    #[test]
    fn source_term_values() {
        let cir = CirParams::new(1.0, 1.0, 1.0).unwrap();
        let d = derive_constants(&cir).unwrap();
        let contract = ContractParams::perpetual(0.05).unwrap();
        assert_relative_eq!(
            source_term(&d, &contract, 0.0),
            -0.05 / 3f64.sqrt(),
            max_relative = 1e-15
        );
        let (cir, contract) = fixture();
        let d = derive_constants(&cir).unwrap();
        let g = source_term(&d, &contract, 10.0);
        assert_relative_eq!(
            g / source_term(&d, &contract, 0.0),
            (10.0 * d.a_exp).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(g, -0.332_806_120_384_525_5, max_relative = 1e-13);
    }

    #[test]
    fn kernel_weight_identities() {
        let (cir, contract) = fixture();
        let d = derive_constants(&cir).unwrap();
        for xi in [0.3, 2.0, 17.0] {
            let ratio = kernel_weight(&d, &contract, 2.0 * xi).unwrap() / kernel_weight(&d, &contract, xi).unwrap();
            let want = 2f64.powf(d.gamma - 1.0) * (-(1.0 - d.a_exp) * xi).exp();
            assert_relative_eq!(ratio, want, max_relative = 1e-10);
        }
        assert!(kernel_weight(&d, &contract, 0.0).is_err());
        // Unit α, γ and c/s reduce the kernel to e^{−(1−a)ξ}.
        let unit = DerivedConstants {
            alpha: 1.0,
            gamma: 1.0,
            s: 1.0,
            ..d
        };
        let one = ContractParams {
            c: 1.0,
            m: 1.0,
            duration: None,
        };
        assert_relative_eq!(
            kernel_weight(&unit, &one, 1.0).unwrap(),
            (-(1.0 - d.a_exp)).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn particular_solution_at_reference_and_without_source() {
        let (cir, contract) = fixture();
        let d = derive_constants(&cir).unwrap();
        let cf = ClosedForm::new(&d, &contract, Quadrature::default()).unwrap();
        let (up, _) = cf.particular_solution(1.0, 1.0).unwrap();
        let ju = cf.scaled_tricomi_integral(1.0).unwrap();
        let m = crate::specfun::kummer_m(d.hypergeometric(), 1.0).unwrap();
        // u_p(z_ref) = M I_U with I_U = e^{−(1−a)z} J_U.
        assert_relative_eq!(up, m * (-(1.0 - d.a_exp)).exp() * ju, max_relative = 1e-12);

        let free = ContractParams {
            c: 0.0,
            m: 0.0,
            duration: None,
        };
        let cf0 = ClosedForm::new(&d, &free, Quadrature::default()).unwrap();
        assert_eq!(cf0.particular_solution(3.0, 1.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn particular_solution_satisfies_ode() {
        let (cir, contract) = fixture();
        let d = derive_constants(&cir).unwrap();
        let cf = ClosedForm::new(&d, &contract, Quadrature::new(1e-12, 0.0)).unwrap();
        for (z, z_ref) in [(1.0, 1.0), (4.0, 1.0), (30.0, 2.0)] {
            let (u, du) = cf.particular_solution(z, z_ref).unwrap();
            let h = 1e-4 * z;
            let d2 = (cf.particular_unchecked(z + h, z_ref).unwrap().1
                - cf.particular_unchecked(z - h, z_ref).unwrap().1)
                / (2.0 * h);
            let g = source_term(&d, &contract, z);
            let res = z * d2 + (d.gamma - z) * du - d.alpha * u - g;
            assert!(res.abs() <= 1e-6 * g.abs(), "z = {z}: residual {res:e}");
        }
    }

    #[test]
    fn tabulated_and_direct_agree() {
        let (cir, contract) = fixture();
        let d = derive_constants(&cir).unwrap();
        let direct = ClosedForm::new(&d, &contract, Quadrature::default()).unwrap();
        let table = ClosedForm::tabulated(&d, &contract, Quadrature::default(), 0.01, 500.0).unwrap();
        for z in [0.02, 0.53, 3.0, 40.0] {
            assert_relative_eq!(
                direct.scaled_tricomi_integral(z).unwrap(),
                table.scaled_tricomi_integral(z).unwrap(),
                max_relative = 1e-11
            );
            assert!(
                (direct.scaled_boundary_residual(z).unwrap() - table.scaled_boundary_residual(z).unwrap()).abs()
                    <= 1e-11
            );
        }
    }

    #[test]
    fn fixture_boundary() {
        let (cir, contract) = fixture();
        let sol = solve_boundary(&cir, &contract, 1e-12).unwrap();
        // High-precision evaluation of the same pasting equation.
        assert_relative_eq!(sol.z_star, 0.529_492_441_685_063, max_relative = 1e-9);
        assert_relative_eq!(sol.x_star, sol.z_star / sol.consts.p, max_relative = 1e-15);
        assert!(sol.diagnostics.value_residual.abs() <= 1e-8);
        assert!(sol.diagnostics.slope_residual.abs() <= 1e-6);
        assert_eq!(sol.c1, 0.0);
        assert_eq!(sol.value(0.5 * sol.x_star).unwrap(), 1.0);
        assert_eq!(sol.value(sol.x_star).unwrap(), 1.0);
    }

    #[test]
    fn ratio_form_shares_the_root() {
        let (cir, contract) = fixture();
        let sol = solve_boundary(&cir, &contract, 1e-12).unwrap();
        let cf = sol.closed_form();
        let z = sol.z_star;
        let r = crate::numerics::try_brent(
            |t| cf.ratio_residual(t),
            z * (1.0 - 1e-3),
            z * (1.0 + 1e-3),
            RootOptions {
                abs_tol: 0.0,
                rel_tol: 1e-13,
                max_iter: 200,
            },
        )
        .unwrap();
        assert_relative_eq!(r.root, z, max_relative = 1e-8);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let (cir, contract) = fixture();
        assert!(matches!(
            solve_boundary(&cir, &contract, 1e-14),
            Err(Error::Validation { field: "tol_root", .. })
        ));
    }

    #[test]
    fn no_interior_boundary_reports_scan() {
        let cir = CirParams::new(0.5, 0.1, 0.05).unwrap();
        let contract = ContractParams::perpetual(0.03).unwrap();
        match solve_boundary(&cir, &contract, 1e-10) {
            Err(Error::NoBracket { samples, .. }) => {
                assert_eq!(samples.len(), 64);
                assert!(samples.iter().all(|&(_, f)| f < 0.0));
            }
            other => panic!("expected NoBracket, got {other:?}"),
        }
    }
}
