//! Model and contract parameters, the constants of the exponential/scale
//! substitution `V(x) = e^{λx} u(px)`, and the loan balance.
//!
//! Time is always time-to-expiry `τ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::HypergeometricParams;

/// CIR short-rate dynamics `dx = k(θ − x) dt + σ √x dW`. Rates in year⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirParams {
    pub k: f64,
    pub theta: f64,
    pub sigma: f64,
}

impl CirParams {
    pub fn new(k: f64, theta: f64, sigma: f64) -> Result<Self> {
        let p = CirParams { k, theta, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        positive("theta", self.theta)?;
        positive("sigma", self.sigma)
    }

    /// `2kθ ≥ σ²`. Advisory only; the steady problem is solvable either way.
    pub fn feller(&self) -> bool {
        2.0 * self.k * self.theta >= self.sigma * self.sigma
    }
}

/// Contract terms: mortgage rate `c` (year⁻¹), payment rate `m` ($/year) and
/// duration (`None` for the infinite horizon).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractParams {
    pub c: f64,
    pub m: f64,
    pub duration: Option<f64>,
}

impl ContractParams {
    /// Infinite-horizon contract normalized to `m = c`.
    pub fn perpetual(c: f64) -> Result<Self> {
        Self::new(c, c, None)
    }

    pub fn new(c: f64, m: f64, duration: Option<f64>) -> Result<Self> {
        let p = ContractParams { c, m, duration };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("c", self.c)?;
        positive("m", self.m)?;
        if let Some(t) = self.duration {
            positive("duration", t)?;
        }
        Ok(())
    }

    /// The infinite-horizon solver works with `m = c`; returns the normalized contract.
    pub fn normalized(&self) -> Self {
        ContractParams {
            c: self.c,
            m: self.c,
            duration: None,
        }
    }

    /// Factor `m/c` that converts a normalized value into dollars.
    pub fn scale(&self) -> f64 {
        self.m / self.c
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

/// Constants of the transformation `V(x) = e^{λx} u(z)`, `z = px`, which turns
/// the steady pricing equation into Kummer's equation with parameters `(α, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `√(k² + 2σ²)`
    pub s: f64,
    /// `(k − s)/σ²`, negative.
    pub lambda: f64,
    /// `2s/σ²`
    pub p: f64,
    /// `(kθ/σ²)(1 − k/s)`
    pub alpha: f64,
    /// `2kθ/σ²`
    pub gamma: f64,
    /// `1/2 − k/(2s) = −λ/p`, the growth rate of `u` relative to `V`.
    pub a_exp: f64,
}

impl DerivedConstants {
    pub fn hypergeometric(&self) -> HypergeometricParams {
        HypergeometricParams::new(self.alpha, self.gamma)
    }

    /// Checks `λ < 0`, `p > 0`, `0 < a_exp < 1/2`, `α, γ > 0` and `a_exp = −λ/p`.
    pub fn check_invariants(&self) -> Result<()> {
        let ok = self.lambda < 0.0
            && self.p > 0.0
            && self.a_exp > 0.0
            && self.a_exp < 0.5
            && self.alpha > 0.0
            && self.gamma > 0.0
            && (self.a_exp + self.lambda / self.p).abs() <= 1e-12 * self.a_exp.max(1e-300);
        if ok {
            Ok(())
        } else {
            Err(Error::validation(
                "sigma",
                format!("derived constants out of range: {self:?}"),
            ))
        }
    }
}

pub fn derive_constants(cir: &CirParams) -> Result<DerivedConstants> {
    cir.validate()?;
    let CirParams { k, theta, sigma } = *cir;
    let s2 = sigma * sigma;
    let s = (k * k + 2.0 * s2).sqrt();
    // 1 − k/s and 1/2 − k/(2s) in cancellation-free form: (s − k) = 2σ²/(s + k).
    let s_minus_k = 2.0 * s2 / (s + k);
    let consts = DerivedConstants {
        s,
        lambda: -s_minus_k / s2,
        p: 2.0 * s / s2,
        alpha: k * theta / s2 * (s_minus_k / s),
        gamma: 2.0 * k * theta / s2,
        a_exp: s_minus_k / (2.0 * s),
    };
    if !consts.alpha.is_finite() || !consts.gamma.is_finite() || !consts.p.is_finite() {
        return Err(Error::validation(
            "sigma",
            "too small: derived constants are not finite",
        ));
    }
    consts.check_invariants()?;
    Ok(consts)
}

/// Outstanding balance `(m/c)(1 − e^{−cτ})` at time-to-expiry `τ`.
pub fn balance(contract: &ContractParams, tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::validation("tau", format!("must be ≥ 0, got {tau}")));
    }
    Ok(contract.m / contract.c * -(-contract.c * tau).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_parameters() {
        let d = derive_constants(&CirParams::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(d.s, 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(d.lambda, 1.0 - 3f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(d.p, 2.0 * 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(d.alpha, 1.0 - 1.0 / 3f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(d.gamma, 2.0, max_relative = 1e-15);
        assert_relative_eq!(d.a_exp, 0.5 - 0.5 / 3f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn primary_fixture_constants() {
        // s = √0.0825; kθ/σ² = 1.5; α = 1.5(1 − 0.25/s).
        let d = derive_constants(&CirParams::new(0.25, 0.06, 0.1).unwrap()).unwrap();
        assert_relative_eq!(d.s, 0.287_228_132_326_901_4, max_relative = 1e-13);
        assert_relative_eq!(d.lambda, -3.722_813_232_690_143, max_relative = 1e-12);
        assert_relative_eq!(d.p, 57.445_626_465_380_28, max_relative = 1e-13);
        assert_relative_eq!(d.alpha, 0.194_417_580_332_266_2, max_relative = 1e-12);
        assert_relative_eq!(d.gamma, 3.0, max_relative = 1e-14);
        assert_relative_eq!(d.a_exp, 0.064_805_860_110_755_41, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_fields() {
        for (k, th, sg, field) in [
            (-1.0, 0.06, 0.1, "k"),
            (0.25, 0.0, 0.1, "theta"),
            (0.25, 0.06, 0.0, "sigma"),
            (0.25, f64::NAN, 0.1, "theta"),
        ] {
            match CirParams::new(k, th, sg) {
                Err(Error::Validation { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected validation error, got {other:?}"),
            }
        }
        assert!(ContractParams::new(0.05, -1.0, None).is_err());
        assert!(ContractParams::new(0.0, 1.0, None).is_err());
    }

    #[test]
    fn small_sigma_is_rejected_not_infinite() {
        let cir = CirParams {
            k: 1.0,
            theta: 1.0,
            sigma: 1e-200,
        };
        assert!(matches!(
            derive_constants(&cir),
            Err(Error::Validation { field: "sigma", .. })
        ));
    }

    #[test]
    fn feller_flag() {
        assert!(CirParams::new(0.25, 0.06, 0.1).unwrap().feller());
        assert!(!CirParams::new(0.1, 0.03, 0.2).unwrap().feller());
    }

    #[test]
    fn balance_examples() {
        let perp = ContractParams::perpetual(0.05).unwrap();
        assert_eq!(balance(&perp, 0.0).unwrap(), 0.0);
        assert_relative_eq!(balance(&perp, 2000.0).unwrap(), 1.0, max_relative = 1e-15);
        let loan = ContractParams::new(0.06, 1200.0, Some(30.0)).unwrap();
        assert_relative_eq!(
            balance(&loan, 10.0).unwrap(),
            20_000.0 * (1.0 - (-0.6f64).exp()),
            max_relative = 1e-14
        );
        assert!((balance(&loan, 10.0).unwrap() - 9023.77).abs() < 0.01);
        assert!(balance(&loan, -1.0).is_err());
    }

    #[test]
    fn balance_satisfies_its_ode() {
        let loan = ContractParams::new(0.06, 1200.0, Some(30.0)).unwrap();
        for tau in [0.5, 3.0, 12.0, 29.0] {
            let h = 1e-5;
            let d = (balance(&loan, tau + h).unwrap() - balance(&loan, tau - h).unwrap()) / (2.0 * h);
            let m = balance(&loan, tau).unwrap();
            // In τ the balance grows at m − cM (calendar-time slope has the opposite sign).
            assert!((d - (loan.m - loan.c * m)).abs() <= 1e-6 * loan.m);
        }
    }

    #[test]
    fn derive_is_deterministic() {
        let cir = CirParams::new(0.37, 0.071, 0.13).unwrap();
        let a = derive_constants(&cir).unwrap();
        let b = derive_constants(&cir).unwrap();
        assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
        assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
    }

    proptest::proptest! {
        #[test]
        fn invariants_hold(k in 0.01f64..2.0, th in 0.005f64..0.3, sg in 0.01f64..0.5) {
            let d = derive_constants(&CirParams::new(k, th, sg).unwrap()).unwrap();
            proptest::prop_assert!(d.check_invariants().is_ok());
            proptest::prop_assert!((d.a_exp + d.lambda / d.p).abs() < 1e-13);
        }

        #[test]
        fn balance_is_bounded_and_increasing(c in 0.01f64..0.2, m in 1.0f64..5000.0, t1 in 0.0f64..100.0, dt in 0.001f64..10.0) {
            let loan = ContractParams::new(c, m, None).unwrap();
            let b1 = balance(&loan, t1).unwrap();
            let b2 = balance(&loan, t1 + dt).unwrap();
            proptest::prop_assert!(b1 >= 0.0 && b2 > b1 && b2 <= m / c * (1.0 + 1e-15));
        }
    }
}
