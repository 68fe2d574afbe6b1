//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! Semi-infinite integrals are handled by certified truncation: the caller
//! supplies an upper bound on the tail `∫_X^∞ |f|` and the integral is cut
//! where that bound drops below a threshold.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

// 21-point Kronrod abscissae; odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_735_299_800,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = (fc * WGK[10]).abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, &x) in XGK.iter().take(10).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        if !f1.is_finite() || !f2.is_finite() {
            let at = if f1.is_finite() { center + dx } else { center - dx };
            return Err(Error::NonFinite {
                context: "quadrature integrand",
                at,
            });
        }
        fv[j] = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !fc.is_finite() {
        return Err(Error::NonFinite {
            context: "quadrature integrand",
            at: center,
        });
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        resabs: res_abs,
    })
}

/// Tolerances and limits for [`Quadrature::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_panels: 2000,
        }
    }
}

impl Quadrature {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Quadrature {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    /// Integrates an infallible integrand over `[a, b]`.
    pub fn integrate<F>(&self, mut f: F, a: f64, b: f64) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> f64,
    {
        self.try_integrate_over(|x| Ok(f(x)), &[a, b])
    }

    /// Integrates a fallible integrand over `[a, b]`; the first integrand error aborts.
    pub fn try_integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.try_integrate_over(f, &[a, b])
    }

    /// Integrates over the union of consecutive panels `breaks[i]..breaks[i+1]`.
    ///
    /// Breakpoints seed the adaptive refinement; pass them where the integrand
    /// changes character.
    pub fn try_integrate_over<F>(&self, mut f: F, breaks: &[f64]) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if breaks.len() < 2 {
            return Err(Error::domain("integrate", "need at least two breakpoints"));
        }
        for w in breaks.windows(2) {
            if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
                return Err(Error::domain(
                    "integrate",
                    format!("breakpoints must be finite and increasing, got {:?}", w),
                ));
            }
        }

        let mut heap = BinaryHeap::new();
        let mut frozen: Vec<Panel> = Vec::new();
        let mut evaluations = 0usize;
        for w in breaks.windows(2) {
            heap.push(kronrod21(&mut f, w[0], w[1])?);
            evaluations += 21;
        }

        loop {
            let (value, error, resabs) = heap
                .iter()
                .chain(frozen.iter())
                .fold((0.0, 0.0, 0.0), |(v, e, r), p| (v + p.value, e + p.error, r + p.resabs));
            let roundoff = 100.0 * f64::EPSILON * resabs;
            let target = self.abs_tol.max(self.rel_tol * value.abs()).max(roundoff);
            if error <= target {
                return Ok(QuadratureResult {
                    value,
                    error_estimate: error,
                    evaluations,
                });
            }
            let panel = match heap.pop() {
                Some(p) => p,
                None => {
                    return Err(Error::Quadrature {
                        value,
                        error_estimate: error,
                        evaluations,
                    })
                }
            };
            if heap.len() + frozen.len() >= self.max_panels {
                return Err(Error::Quadrature {
                    value,
                    error_estimate: error,
                    evaluations,
                });
            }
            let mid = 0.5 * (panel.a + panel.b);
            let scale = panel.a.abs().max(panel.b.abs()).max(f64::MIN_POSITIVE);
            if panel.b - panel.a <= 8.0 * f64::EPSILON * scale || mid <= panel.a || mid >= panel.b {
                frozen.push(panel);
                continue;
            }
            let left = kronrod21(&mut f, panel.a, mid)?;
            let right = kronrod21(&mut f, mid, panel.b)?;
            evaluations += 42;
            heap.push(left);
            heap.push(right);
        }
    }
}

/// Adaptive integration of `f` over the finite interval `[a, b]` to relative tolerance `tol`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    if !(a < b) {
        return Err(Error::domain("integrate_adaptive", "require a < b"));
    }
    Quadrature::new(tol, 0.0).integrate(f, a, b)
}

/// Finds a truncation point `X ≥ start` with `tail_bound(X) ≤ threshold`.
///
/// Candidates are `start + step·2^j`. Fails if no candidate within 200 doublings qualifies.
pub fn truncation_point<B>(start: f64, step: f64, mut tail_bound: B, threshold: f64) -> Result<f64>
where
    B: FnMut(f64) -> f64,
{
    if !(step > 0.0) {
        return Err(Error::domain("truncation_point", "step must be positive"));
    }
    let mut width = step;
    for _ in 0..200 {
        let x = start + width;
        let bound = tail_bound(x);
        if bound.is_finite() && bound <= threshold {
            return Ok(x);
        }
        width *= 2.0;
    }
    Err(Error::Convergence {
        context: "tail truncation",
        trace: Vec::new(),
    })
}

/// Integrates `f` over `[a, ∞)` by truncating where `tail_bound` falls below `threshold`.
///
/// The returned error estimate includes the tail bound at the cut.
pub fn integrate_semi_infinite<F, B>(
    f: F,
    a: f64,
    mut tail_bound: B,
    threshold: f64,
    tol: f64,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
    B: FnMut(f64) -> f64,
{
    let step = a.abs().max(1.0);
    let cut = truncation_point(a, step, &mut tail_bound, threshold)?;
    let mut breaks = vec![a];
    let mut edge = a + step;
    while edge < cut {
        breaks.push(edge);
        edge = a + 2.0 * (edge - a);
    }
    breaks.push(cut);
    let mut f = f;
    let mut res = Quadrature::new(tol, 0.0).try_integrate_over(|x| Ok(f(x)), &breaks)?;
    res.error_estimate += tail_bound(cut);
    Ok(res)
}
