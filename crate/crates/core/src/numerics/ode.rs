//! Adaptive Dormand–Prince 5(4) integrator with a per-step observer for event handling.

use crate::error::{Error, Result};

/// Returned by an observer after every accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    /// Accepted `(x, state)` pairs including the initial point.
    pub points: Vec<(f64, [f64; N])>,
    /// True if an observer stopped integration before `x_end`.
    pub stopped: bool,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        *self.points.last().expect("trajectory always holds the initial point")
    }

    /// First `x` at which `state[component]` crosses `level`, by linear interpolation
    /// between accepted steps.
    pub fn first_crossing(&self, component: usize, level: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            let d0 = y0[component] - level;
            let d1 = y1[component] - level;
            if d0 == 0.0 {
                Some(x0)
            } else if d0.signum() != d1.signum() {
                Some(x0 + (x1 - x0) * d0 / (d0 - d1))
            } else {
                None
            }
        })
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// 5th-order minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combine<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], coeffs: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &a) in ks.iter().zip(coeffs) {
        if a != 0.0 {
            for i in 0..N {
                out[i] += h * a * k[i];
            }
        }
    }
    out
}

/// Integrates `y' = rhs(x, y)` from `x0` to `x_end`, keeping each step's error
/// below `tol` relative to the max-norm of the state.
pub fn ode_integrate<const N: usize, F>(rhs: F, x0: f64, y0: [f64; N], x_end: f64, tol: f64) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    ode_integrate_with(rhs, x0, y0, x_end, tol, |_, _| StepControl::Continue)
}

/// As [`ode_integrate`], calling `observer` after every accepted step.
pub fn ode_integrate_with<const N: usize, F, O>(
    mut rhs: F,
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    tol: f64,
    mut observer: O,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> StepControl,
{
    if !(tol > 0.0) {
        return Err(Error::validation("tol", "must be positive"));
    }
    let span = x_end - x0;
    let dir = span.signum();
    let mut points = vec![(x0, y0)];
    if span == 0.0 {
        return Ok(Trajectory { points, stopped: false });
    }

    let mut x = x0;
    let mut y = y0;
    let mut k1 = rhs(x, &y);
    let scale0 = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slope0 = k1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut h = if slope0 > 0.0 {
        (0.01 * tol * scale0.max(f64::MIN_POSITIVE) / slope0)
            .powf(0.2)
            .min(span.abs())
    } else {
        1e-3 * span.abs()
    }
    .max(1e-12 * span.abs())
        * dir;

    loop {
        let remaining = x_end - x;
        if remaining * dir <= 0.0 {
            break;
        }
        if (h.abs()) > remaining.abs() {
            h = remaining;
        }
        let min_h = 16.0 * f64::EPSILON * x.abs().max(span.abs() * 1e-3);
        if h.abs() < min_h {
            return Err(Error::StepUnderflow { x, h: h.abs() });
        }

        let mut ks = [[0.0; N]; 7];
        ks[0] = k1;
        ks[1] = rhs(x + C[1] * h, &combine(&y, h, &ks[..1], &A2));
        ks[2] = rhs(x + C[2] * h, &combine(&y, h, &ks[..2], &A3));
        ks[3] = rhs(x + C[3] * h, &combine(&y, h, &ks[..3], &A4));
        ks[4] = rhs(x + C[4] * h, &combine(&y, h, &ks[..4], &A5));
        ks[5] = rhs(x + C[5] * h, &combine(&y, h, &ks[..5], &A6));
        let y_new = combine(&y, h, &ks[..6], &B);
        ks[6] = rhs(x + h, &y_new);

        let norm = y
            .iter()
            .chain(y_new.iter())
            .fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
        let sc = tol * norm;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut e = 0.0;
            for (k, &w) in ks.iter().zip(E.iter()) {
                e += w * k[i];
            }
            err = err.max((h * e).abs() / sc);
        }
        if !err.is_finite() {
            h *= 0.2;
            continue;
        }

        if err <= 1.0 {
            x += h;
            y = y_new;
            k1 = ks[6];
            points.push((x, y));
            if observer(x, &y) == StepControl::Stop {
                return Ok(Trajectory { points, stopped: true });
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok(Trajectory { points, stopped: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn exponential_growth() {
        let t = ode_integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, 1e-10).unwrap();
        let (x, y) = t.last();
        assert_eq!(x, 1.0);
        assert_relative_eq!(y[0], std::f64::consts::E, max_relative = 1e-9);
    }

    #[test]
    fn exponential_decay() {
        let t = ode_integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 20.0, 1e-12).unwrap();
        let (_, y) = t.last();
        assert_relative_eq!(y[0], (-20.0f64).exp(), max_relative = 1e-6);
    }

    #[test]
    fn harmonic_oscillator_energy_drift() {
        let periods = 100.0;
        let t = ode_integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            2.0 * PI * periods,
            1e-10,
        )
        .unwrap();
        let max_drift = t
            .points
            .iter()
            .map(|(_, y)| (0.5 * (y[0] * y[0] + y[1] * y[1]) - 0.5).abs())
            .fold(0.0, f64::max);
        assert!(max_drift <= 1e-6, "energy drift {max_drift:e}");
        let (_, y) = t.last();
        assert!((y[0] - 1.0).abs() < 1e-5 && y[1].abs() < 1e-5);
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let exact = (-5.0f64).exp() * 5f64.cos();
        let errs: Vec<f64> = [1e-5, 1e-7, 1e-9]
            .iter()
            .map(|&tol| {
                let t = ode_integrate(
                    |_, y: &[f64; 2]| [y[1], -2.0 * y[1] - 2.0 * y[0]],
                    0.0,
                    [1.0, -1.0],
                    5.0,
                    tol,
                )
                .unwrap();
                (t.last().1[0] - exact).abs()
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        // Each hundredfold tolerance reduction should buy at least an order of magnitude.
        assert!(errs[0] / errs[1] > 10.0 && errs[1] / errs[2] > 10.0, "{errs:?}");
    }

    #[test]
    fn observer_stops_and_crossing_is_located() {
        let t = ode_integrate_with(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            1e-10,
            |_, y| {
                if y[0] < -0.5 {
                    StepControl::Stop
                } else {
                    StepControl::Continue
                }
            },
        )
        .unwrap();
        assert!(t.stopped);
        let x = t.first_crossing(0, 0.0).unwrap();
        assert!((x - PI / 2.0).abs() < 1e-2);
    }
}
