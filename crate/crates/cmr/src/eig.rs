//! Eigenvalues of small complex matrices via the characteristic polynomial
//! (Faddeev-LeVerrier) and simultaneous root iteration (Durand-Kerner).
//! Adequate for the n <= 5 spectra compared by the gauge-invariance checks.

use num_complex::Complex64;

use crate::error::{CmrError, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::C64;

/// Monic characteristic polynomial coefficients `[c1, ..., cn]` of
/// `lambda^n + c1 lambda^(n-1) + ... + cn`.
pub fn char_poly(m: &SquareMatrix<C64>) -> Vec<Complex64> {
    let n = m.dim();
    let mut coeffs = Vec::with_capacity(n);
    let mut aux = m.clone();
    for k in 1..=n {
        let c = -aux.trace() / Complex64::new(k as f64, 0.0);
        coeffs.push(c);
        if k < n {
            let shifted = aux + SquareMatrix::identity(n).scale(&c);
            aux = m.matmul(&shifted);
        }
    }
    coeffs
}

fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for c in coeffs {
        acc = acc * z + c;
    }
    acc
}

/// All eigenvalues, sorted lexicographically by (re, im).
pub fn eigenvalues(m: &SquareMatrix<C64>) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let coeffs = char_poly(m);
    // Seed on a circle whose radius bounds the root moduli.
    let radius = 1.0
        + coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32 + 1) / seed.norm().powi(k as i32) * radius)
        .collect();

    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                return Err(CmrError::Diagnostic(
                    "root iteration degenerated (coincident iterates)".into(),
                ));
            }
            let step = poly_eval(&coeffs, roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * radius.max(1.0) {
            break;
        }
    }
    sort_spectrum(&mut roots);
    Ok(roots)
}

/// Sort eigenvalues lexicographically by (re, im).
pub fn sort_spectrum(vals: &mut [Complex64]) {
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// Largest entrywise distance between two sorted spectra.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn diagonal_spectrum() {
        let d = SquareMatrix::<C64>::diagonal(&[
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 0.5),
            Complex64::new(0.25, 0.0),
        ]);
        let mut want = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 0.5),
            Complex64::new(0.25, 0.0),
        ];
        sort_spectrum(&mut want);
        let got = eigenvalues(&d).unwrap();
        assert!(spectrum_distance(&got, &want) < 1e-10);
    }

    #[test]
    fn hermitian_two_by_two() {
        // Eigenvalues of [[a, c],[conj(c), b]] from the quadratic formula.
        let a = 1.5;
        let b = -0.5;
        let c = Complex64::new(0.3, 0.7);
        let m = SquareMatrix::from_rows(vec![
            vec![Complex64::new(a, 0.0), c],
            vec![c.conj(), Complex64::new(b, 0.0)],
        ])
        .unwrap();
        let mean = (a + b) / 2.0;
        let disc = ((a - b) / 2.0).hypot(c.norm());
        let mut want = vec![
            Complex64::new(mean - disc, 0.0),
            Complex64::new(mean + disc, 0.0),
        ];
        sort_spectrum(&mut want);
        let got = eigenvalues(&m).unwrap();
        assert!(spectrum_distance(&got, &want) < 1e-12);
    }

    #[test]
    fn similarity_preserves_spectrum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in [2usize, 3, 4, 5] {
            let m = SquareMatrix::<C64>::from_fn(n, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let g = SquareMatrix::<C64>::from_fn(n, |i, j| {
                Complex64::new(
                    if i == j { 2.0 } else { 0.0 } + rng.gen_range(-0.4..0.4),
                    0.0,
                )
            });
            let conj = g.matmul(&m).matmul(&g.inverse().unwrap());
            let s1 = eigenvalues(&m).unwrap();
            let s2 = eigenvalues(&conj).unwrap();
            assert!(spectrum_distance(&s1, &s2) < 1e-9, "n = {n}");
        }
    }
}
