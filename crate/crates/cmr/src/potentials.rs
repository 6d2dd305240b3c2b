//! The three degenerate inter-particle potentials and the functional
//! identities satisfied by `v`, `w` and `F = -w'/w`.
//!
//! Closed forms are hard-coded: `F` is `1/x`, `a coth(ax)` or `a cot(ax)`
//! depending on the case, so no differencing enters the downstream formulas;
//! the derivative identity `F' = -w^2` is kept as a finite-difference test.

use num_complex::Complex64;

use crate::error::{CmrError, Result};
use crate::scalar::{Scalar, ScalarMode};

/// Which degenerate potential family is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Rational,
    Hyperbolic,
    Trigonometric,
}

impl CaseKind {
    pub fn tag(self) -> &'static str {
        match self {
            CaseKind::Rational => "rational",
            CaseKind::Hyperbolic => "hyperbolic",
            CaseKind::Trigonometric => "trigonometric",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(CaseKind::Rational),
            "hyperbolic" => Ok(CaseKind::Hyperbolic),
            "trigonometric" => Ok(CaseKind::Trigonometric),
            _ => Err(CmrError::Argument(format!("unknown case {s:?}"))),
        }
    }
}

/// Minimum admissible distance from a singular argument in float mode.
pub const ADMISSIBLE_EPS: f64 = 1e-9;

/// A degenerate model case together with its coupling `a` and the derived
/// constants: the curvature-like scalar `B` (0, `a^2`, `-a^2`) and, for the
/// non-rational cases, `a'` with `a'^2 = B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelCase {
    kind: CaseKind,
    a: f64,
}

impl ModelCase {
    pub fn rational() -> Self {
        ModelCase {
            kind: CaseKind::Rational,
            a: 1.0,
        }
    }

    pub fn hyperbolic(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(CmrError::Argument(format!("coupling must be positive, got {a}")));
        }
        Ok(ModelCase {
            kind: CaseKind::Hyperbolic,
            a,
        })
    }

    pub fn trigonometric(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(CmrError::Argument(format!("coupling must be positive, got {a}")));
        }
        Ok(ModelCase {
            kind: CaseKind::Trigonometric,
            a,
        })
    }

    pub fn new(kind: CaseKind, a: f64) -> Result<Self> {
        match kind {
            CaseKind::Rational => Ok(Self::rational()),
            CaseKind::Hyperbolic => Self::hyperbolic(a),
            CaseKind::Trigonometric => Self::trigonometric(a),
        }
    }

    pub fn kind(&self) -> CaseKind {
        self.kind
    }

    pub fn coupling(&self) -> f64 {
        self.a
    }

    /// The scalar `B`: 0 (rational), `a^2` (hyperbolic), `-a^2` (trigonometric).
    pub fn b_value(&self) -> f64 {
        match self.kind {
            CaseKind::Rational => 0.0,
            CaseKind::Hyperbolic => self.a * self.a,
            CaseKind::Trigonometric => -self.a * self.a,
        }
    }

    /// `B` in the scalar field `S`. Exact mode supports only the rational case.
    pub fn b_scalar<S: Scalar>(&self) -> Result<S> {
        match (self.kind, S::MODE) {
            (CaseKind::Rational, _) => Ok(S::zero()),
            (_, ScalarMode::Complex64) => Ok(S::from_f64(self.b_value())),
            (_, ScalarMode::ExactGaussian) => Err(CmrError::Unsupported(
                "exact arithmetic is available for the rational case only".into(),
            )),
        }
    }

    /// `a'` with `a'^2 = B`: `a` (hyperbolic), `i a` (trigonometric, principal
    /// branch). Undefined for the rational case.
    pub fn a_prime(&self) -> Result<Complex64> {
        match self.kind {
            CaseKind::Rational => Err(CmrError::Unsupported(
                "a' is undefined in the rational case (B = 0)".into(),
            )),
            CaseKind::Hyperbolic => Ok(Complex64::new(self.a, 0.0)),
            CaseKind::Trigonometric => Ok(Complex64::new(0.0, self.a)),
        }
    }

    /// Whether `x` is an admissible argument for `w`, `v`, `F`.
    pub fn admissible(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self.kind {
            CaseKind::Rational | CaseKind::Hyperbolic => x.abs() >= ADMISSIBLE_EPS,
            CaseKind::Trigonometric => {
                let t = self.a * x;
                let dist = (t / std::f64::consts::PI).round() * std::f64::consts::PI - t;
                dist.abs() >= ADMISSIBLE_EPS
            }
        }
    }

    fn check_admissible(&self, x: f64) -> Result<()> {
        if self.admissible(x) {
            Ok(())
        } else {
            Err(CmrError::Domain(format!(
                "argument {x} is outside the admissible domain of the {} case",
                self.kind.tag()
            )))
        }
    }

    /// Potential `v`: `1/x^2`, `a^2/sinh^2(ax)`, `a^2/sin^2(ax)`.
    pub fn v(&self, x: f64) -> Result<f64> {
        self.check_admissible(x)?;
        Ok(match self.kind {
            CaseKind::Rational => 1.0 / (x * x),
            CaseKind::Hyperbolic => {
                let s = (self.a * x).sinh();
                self.a * self.a / (s * s)
            }
            CaseKind::Trigonometric => {
                let s = (self.a * x).sin();
                self.a * self.a / (s * s)
            }
        })
    }

    /// Lax off-diagonal profile `w`: `1/x`, `a/sinh(ax)`, `a/sin(ax)`.
    /// Odd, and `v = w^2`.
    pub fn w(&self, x: f64) -> Result<f64> {
        self.check_admissible(x)?;
        Ok(match self.kind {
            CaseKind::Rational => 1.0 / x,
            CaseKind::Hyperbolic => self.a / (self.a * x).sinh(),
            CaseKind::Trigonometric => self.a / (self.a * x).sin(),
        })
    }

    /// `F = -w'/w`: `1/x`, `a coth(ax)`, `a cot(ax)`.
    pub fn f(&self, x: f64) -> Result<f64> {
        self.check_admissible(x)?;
        Ok(match self.kind {
            CaseKind::Rational => 1.0 / x,
            CaseKind::Hyperbolic => self.a / (self.a * x).tanh(),
            CaseKind::Trigonometric => self.a / (self.a * x).tan(),
        })
    }

    /// `w' = -F w`.
    pub fn w_prime(&self, x: f64) -> Result<f64> {
        Ok(-self.f(x)? * self.w(x)?)
    }

    /// `v' = -2 F w^2` (from `v = w^2`).
    pub fn v_prime(&self, x: f64) -> Result<f64> {
        let w = self.w(x)?;
        Ok(-2.0 * self.f(x)? * w * w)
    }

    /// `w` evaluated in the scalar field `S` at a real-valued scalar argument.
    /// Exact mode evaluates the rational closed form `1/x` without rounding.
    pub fn w_s<S: Scalar>(&self, x: &S) -> Result<S> {
        match (self.kind, S::MODE) {
            (CaseKind::Rational, ScalarMode::ExactGaussian) => exact_recip(x),
            (_, ScalarMode::Complex64) => Ok(S::from_f64(self.w(x.re_f64())?)),
            _ => Err(exact_unsupported()),
        }
    }

    pub fn f_s<S: Scalar>(&self, x: &S) -> Result<S> {
        match (self.kind, S::MODE) {
            (CaseKind::Rational, ScalarMode::ExactGaussian) => exact_recip(x),
            (_, ScalarMode::Complex64) => Ok(S::from_f64(self.f(x.re_f64())?)),
            _ => Err(exact_unsupported()),
        }
    }

    pub fn v_s<S: Scalar>(&self, x: &S) -> Result<S> {
        match (self.kind, S::MODE) {
            (CaseKind::Rational, ScalarMode::ExactGaussian) => {
                let inv = exact_recip(x)?;
                Ok(inv.clone() * inv)
            }
            (_, ScalarMode::Complex64) => Ok(S::from_f64(self.v(x.re_f64())?)),
            _ => Err(exact_unsupported()),
        }
    }

    /// `w' = -Fw` in the scalar field `S`.
    pub fn w_prime_s<S: Scalar>(&self, x: &S) -> Result<S> {
        Ok(-(self.f_s(x)? * self.w_s(x)?))
    }

    /// Analytic `F'`: `-1/x^2` rationally, `-w^2` otherwise.
    pub fn f_prime_s<S: Scalar>(&self, x: &S) -> Result<S> {
        match (self.kind, S::MODE) {
            (CaseKind::Rational, ScalarMode::ExactGaussian) => {
                let inv = exact_recip(x)?;
                Ok(-(inv.clone() * inv))
            }
            _ => {
                let w = self.w_s(x)?;
                Ok(-(w.clone() * w))
            }
        }
    }
}

fn exact_unsupported() -> CmrError {
    CmrError::Unsupported("exact arithmetic is available for the rational case only".into())
}

fn exact_recip<S: Scalar>(x: &S) -> Result<S> {
    if x.is_zero() {
        return Err(CmrError::Domain("argument 0 is outside the admissible domain".into()));
    }
    x.recip()
}

/// Residual of the derivative identity `F' = -w^2` by central differences
/// (step 1e-5); the `richardson` variant removes the leading truncation
/// term, which grows with the fourth power of the coupling.
pub fn derivative_identity_residual(case: &ModelCase, x: f64, richardson: bool) -> Result<f64> {
    const H: f64 = 1e-5;
    let diff = |h: f64| -> Result<f64> { Ok((case.f(x + h)? - case.f(x - h)?) / (2.0 * h)) };
    let fd = if richardson {
        (4.0 * diff(H / 2.0)? - diff(H)?) / 3.0
    } else {
        diff(H)?
    };
    Ok((fd + case.v(x)?).abs())
}

/// Residuals of the three functional identities at `(x, y)`:
/// `|F'(x) + w^2(x)|` with `F'` by central difference (step 1e-5),
/// `|F(x) + F(y) - w(x)w(y)/w(x+y)|`, and
/// `|F(x-y)(F(x) - F(y)) + F(x)F(y) - B|`.
pub fn check_identities(case: &ModelCase, x: f64, y: f64) -> Result<[f64; 3]> {
    for arg in [x, y, x + y, x - y] {
        if !case.admissible(arg) {
            return Err(CmrError::Domain(format!(
                "identity check needs admissible x, y, x+y, x-y; offending value {arg}"
            )));
        }
    }
    let r1 = derivative_identity_residual(case, x, false)?;
    let r2 = (case.f(x)? + case.f(y)? - case.w(x)? * case.w(y)? / case.w(x + y)?).abs();
    let r3 = (case.f(x - y)? * (case.f(x)? - case.f(y)?) + case.f(x)? * case.f(y)?
        - case.b_value())
    .abs();
    Ok([r1, r2, r3])
}

/// The same three identity defects computed in the scalar field `S` with the
/// analytic `F'`; in exact mode all three are exactly zero.
pub fn identity_defects<S: Scalar>(case: &ModelCase, x: &S, y: &S) -> Result<[S; 3]> {
    let sum = x.clone() + y.clone();
    let diff = x.clone() - y.clone();
    let d1 = case.f_prime_s(x)? + case.v_s(x)?;
    let d2 = case.f_s(x)? + case.f_s(y)?
        - (case.w_s(x)? * case.w_s(y)?).checked_div(&case.w_s(&sum)?)?;
    let d3 = case.f_s(&diff)? * (case.f_s(x)? - case.f_s(y)?) + case.f_s(x)? * case.f_s(y)?
        - case.b_scalar::<S>()?;
    Ok([d1, d2, d3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{big_ratio, C64, GaussRat};
    use rand::{Rng, SeedableRng};

    #[test]
    fn closed_form_spot_values() {
        let rat = ModelCase::rational();
        assert_eq!(rat.v(2.0).unwrap(), 0.25);
        assert_eq!(rat.w(2.0).unwrap(), 0.5);
        assert_eq!(rat.f(2.0).unwrap(), 0.5);

        let trig = ModelCase::trigonometric(1.0).unwrap();
        assert!((trig.v(std::f64::consts::FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((trig.w(std::f64::consts::FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((trig.f(std::f64::consts::FRAC_PI_4).unwrap() - 1.0).abs() < 1e-15);

        // High-precision reference values for the hyperbolic closed forms.
        let hyp = ModelCase::hyperbolic(1.0).unwrap();
        assert!((hyp.v(1.0).unwrap() - 0.724061660966310466).abs() < 1e-15);
        assert!((hyp.f(1.0).unwrap() - 1.313035285499331304).abs() < 1e-15);
    }

    #[test]
    fn domain_violations_are_rejected() {
        let rat = ModelCase::rational();
        assert!(matches!(rat.v(0.0), Err(CmrError::Domain(_))));
        assert!(matches!(rat.w(1e-12), Err(CmrError::Domain(_))));
        let trig = ModelCase::trigonometric(2.0).unwrap();
        assert!(matches!(trig.w(std::f64::consts::PI / 2.0), Err(CmrError::Domain(_))));
        assert!(ModelCase::hyperbolic(0.0).is_err());
        assert!(ModelCase::trigonometric(-1.0).is_err());
    }

    #[test]
    fn w_is_odd_and_v_is_w_squared() {
        let cases = [
            ModelCase::rational(),
            ModelCase::hyperbolic(1.0).unwrap(),
            ModelCase::hyperbolic(2.0).unwrap(),
            ModelCase::trigonometric(1.0).unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for case in &cases {
            for _ in 0..1000 {
                let x: f64 = rng.gen_range(0.05..1.2);
                let w = case.w(x).unwrap();
                assert_eq!(case.w(-x).unwrap(), -w);
                let rel = (case.v(x).unwrap() - w * w).abs() / (w * w);
                assert!(rel < 1e-12);
            }
        }
    }

    #[test]
    fn functional_identities_float() {
        let hyp = ModelCase::hyperbolic(2.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(0.4..1.2);
            let y: f64 = rng.gen_range(0.4..1.2);
            if (x - y).abs() < 0.05 {
                continue;
            }
            let [r1, r2, r3] = check_identities(&hyp, x, y).unwrap();
            assert!(r1 < 1e-8, "derivative identity residual {r1}");
            assert!(r2 < 1e-12, "addition identity residual {r2}");
            assert!(r3 < 1e-12, "constant identity residual {r3}");
        }

        let trig = ModelCase::trigonometric(1.0).unwrap();
        let [_, r2, _] = check_identities(
            &trig,
            std::f64::consts::FRAC_PI_3,
            std::f64::consts::FRAC_PI_6,
        )
        .unwrap();
        assert!(r2 < 1e-12);
    }

    #[test]
    fn identities_exact_mode() {
        let rat = ModelCase::rational();
        let x = GaussRat::from_rational(big_ratio(7, 5));
        let y = GaussRat::from_rational(big_ratio(-3, 11));
        let defects = identity_defects(&rat, &x, &y).unwrap();
        for d in defects {
            assert!(d.is_zero());
        }
        // Float path through the same generic entry point agrees.
        let fx = <C64 as Scalar>::from_f64(1.4);
        let fy = <C64 as Scalar>::from_f64(-3.0 / 11.0);
        let defects = identity_defects(&rat, &fx, &fy).unwrap();
        for d in defects {
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn exact_mode_rejects_transcendental_cases() {
        let hyp = ModelCase::hyperbolic(1.0).unwrap();
        let x = GaussRat::from_rational(big_ratio(1, 2));
        assert!(matches!(hyp.w_s(&x), Err(CmrError::Unsupported(_))));
        assert!(matches!(hyp.b_scalar::<GaussRat>(), Err(CmrError::Unsupported(_))));
        assert!(matches!(ModelCase::rational().a_prime(), Err(CmrError::Unsupported(_))));
    }
}
