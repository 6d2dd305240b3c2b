//! Matrix exponentials: scaling-and-squaring with a diagonal order-6 Pade
//! approximant for float matrices, and the finite series for nilpotent
//! matrices in any scalar field (the exact-mode path).

use num_complex::Complex64;

use crate::error::{CmrError, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::{Scalar, ScalarMode, C64};

// Coefficients of the [6/6] diagonal Pade approximant of exp.
const PADE6: [f64; 7] = [
    1.0,
    1.0 / 2.0,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

fn inf_norm(m: &SquareMatrix<C64>) -> f64 {
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| m.at(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(M)` for a complex float matrix.
pub fn expm(m: &SquareMatrix<C64>) -> Result<SquareMatrix<C64>> {
    let n = m.dim();
    let norm = inf_norm(m);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(1.0 / f64::powi(2.0, s as i32), 0.0);
    let a = m.scale(&scale);

    let mut num = SquareMatrix::<C64>::zeros(n);
    let mut den = SquareMatrix::<C64>::zeros(n);
    let mut power = SquareMatrix::<C64>::identity(n);
    for (k, c) in PADE6.iter().enumerate() {
        let ck = Complex64::new(*c, 0.0);
        num = num + power.scale(&ck);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        den = den + power.scale(&(ck * sign));
        if k + 1 < PADE6.len() {
            power = power.matmul(&a);
        }
    }
    let mut x = den.inverse()?.matmul(&num);
    for _ in 0..s {
        x = x.matmul(&x);
    }
    Ok(x)
}

/// `exp(M)` via the finite series, valid when `M` is nilpotent
/// (`M^n = 0`); errors otherwise. Exact in exact mode.
pub fn expm_nilpotent<S: Scalar>(m: &SquareMatrix<S>) -> Result<SquareMatrix<S>> {
    let n = m.dim();
    let mut sum = SquareMatrix::<S>::identity(n);
    let mut power = m.clone();
    let mut factorial: i64 = 1;
    for k in 1..=n {
        if power.is_zero() {
            return Ok(sum);
        }
        if k == n {
            return Err(CmrError::Unsupported(
                "matrix is not nilpotent; the finite exponential series does not apply".into(),
            ));
        }
        factorial *= k as i64;
        sum = sum + power.scale(&S::from_ratio(1, factorial));
        power = power.matmul(m);
    }
    Ok(sum)
}

/// Exponential dispatched on the scalar mode: Pade in float mode, the
/// nilpotent series in exact mode.
pub fn expm_auto<S: Scalar>(m: &SquareMatrix<S>) -> Result<SquareMatrix<S>> {
    match S::MODE {
        ScalarMode::Complex64 => {
            let out = expm(&m.to_c64())?;
            Ok(out.map(|z| S::from_c64(*z)))
        }
        ScalarMode::ExactGaussian => expm_nilpotent(m),
    }
}
