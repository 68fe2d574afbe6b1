//! Bracketed root refinement (Brent: inverse quadratic / secant with bisection fallback).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootResult {
    pub root: f64,
    pub f_root: f64,
    /// Final bracket, `lo ≤ root ≤ hi`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Every `(x, f(x))` evaluated, in order.
    pub trace: Vec<(f64, f64)>,
}

/// Brent's method on a fallible function. Terminates when the bracket width is
/// at most `abs_tol + rel_tol·|root|`; never evaluates outside `[lo, hi]`.
pub fn try_brent<F>(mut f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<RootResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut trace = Vec::new();
    let mut eval = |x: f64, trace: &mut Vec<(f64, f64)>| -> Result<f64> {
        let x = x.clamp(lo, hi);
        let v = f(x)?;
        if v.is_nan() {
            return Err(Error::NonFinite {
                context: "root function",
                at: x,
            });
        }
        trace.push((x, v));
        Ok(v)
    };

    let mut a = lo;
    let mut b = hi;
    let mut fa = eval(a, &mut trace)?;
    let mut fb = eval(b, &mut trace)?;
    if fa == 0.0 {
        return Ok(RootResult {
            root: a,
            f_root: fa,
            bracket: (a, a),
            iterations: 0,
            trace,
        });
    }
    if fb == 0.0 {
        return Ok(RootResult {
            root: b,
            f_root: fb,
            bracket: (b, b),
            iterations: 0,
            trace,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=opts.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 0.5 * (opts.abs_tol + opts.rel_tol * b.abs()).max(4.0 * f64::EPSILON * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let bracket = if b < c { (b, c) } else { (c, b) };
            return Ok(RootResult {
                root: b,
                f_root: fb,
                bracket: if fb == 0.0 { (b, b) } else { bracket },
                iterations: iter,
                trace,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = eval(b, &mut trace)?;
    }
    Err(Error::Convergence {
        context: "brent",
        trace,
    })
}

/// Brent's method on an infallible function.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<RootResult>
where
    F: FnMut(f64) -> f64,
{
    try_brent(|x| Ok(f(x)), lo, hi, opts)
}

/// Root of `f` in `[lo, hi]` with final bracket width ≤ `tol·max(1, |r|)`.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let opts = RootOptions {
        abs_tol: tol,
        rel_tol: tol,
        max_iter: 500,
    };
    brent(f, lo, hi, opts).map(|r| r.root)
}
