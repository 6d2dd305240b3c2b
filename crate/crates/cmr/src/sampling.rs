//! Deterministic random sampling of well-conditioned phase points, couplings
//! and gauge constants. Coordinates are drawn sorted-decreasing in
//! `[0.1, 2.0]` with a minimum gap of 0.05 (rescaled by `pi/(4a)` in the
//! trigonometric case to stay inside one period); momenta are uniform in
//! `[-1, 1]`.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;

use crate::matrix::{cond_frobenius, SquareMatrix};
use crate::potentials::{CaseKind, ModelCase};
use crate::scalar::{big_ratio, C64, GaussRat};

fn scale_for(case: &ModelCase) -> f64 {
    match case.kind() {
        CaseKind::Trigonometric => std::f64::consts::PI / (4.0 * case.coupling()),
        _ => 1.0,
    }
}

/// Sorted-decreasing admissible coordinates.
pub fn sample_q<R: Rng>(case: &ModelCase, n: usize, rng: &mut R) -> Vec<f64> {
    let scale = scale_for(case);
    loop {
        let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0) * scale).collect();
        q.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let ok = q.windows(2).all(|w| w[0] - w[1] >= 0.05 * scale);
        if ok {
            return q;
        }
    }
}

/// A full phase point: sorted coordinates plus momenta uniform in `[-1, 1]`.
pub fn sample_phase_point<R: Rng>(case: &ModelCase, n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let q = sample_q(case, n, rng);
    let p = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (q, p)
}

/// Coordinates kept away from all singular and degenerate limits, for
/// finite-difference checks and diagonalizer-based pipelines whose errors
/// grow with inverse separations. Windows, gaps and the pairwise separation
/// of the node values `F(q_k)` are stated in the coupling-scaled argument,
/// so feasibility does not depend on the coupling. The hyperbolic window is
/// capped where its node function starts to flatten.
pub fn sample_q_separated<R: Rng>(case: &ModelCase, n: usize, rng: &mut R) -> Vec<f64> {
    let a = case.coupling();
    let (coord_scale, hi, node_gap) = match case.kind() {
        CaseKind::Rational => (1.0, 2.0, 0.25),
        CaseKind::Hyperbolic => (1.0 / a, 1.1, 0.25 * a),
        CaseKind::Trigonometric => (std::f64::consts::PI / (4.0 * a), 2.0, 0.25 * a),
    };
    loop {
        let mut q: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.3..hi) * coord_scale)
            .collect();
        q.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if !q.windows(2).all(|w| w[0] - w[1] >= 0.15 * coord_scale) {
            continue;
        }
        let f: Vec<f64> = q.iter().map(|x| case.f(*x).unwrap()).collect();
        let mut nodes_ok = true;
        for i in 0..n {
            for j in (i + 1)..n {
                if (f[i] - f[j]).abs() < node_gap {
                    nodes_ok = false;
                }
            }
        }
        if nodes_ok {
            return q;
        }
    }
}

/// Phase point over [`sample_q_separated`] coordinates.
pub fn sample_phase_point_separated<R: Rng>(
    case: &ModelCase,
    n: usize,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let q = sample_q_separated(case, n, rng);
    let p = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (q, p)
}

/// Exact rational coordinates on the 1/64 grid, sorted decreasing with gaps
/// wide enough to survive snapping. Rational case only.
pub fn sample_q_exact<R: Rng>(n: usize, rng: &mut R) -> Vec<BigRational> {
    loop {
        let mut q: Vec<i64> = (0..n)
            .map(|_| (rng.gen_range(0.1..2.0f64) * 64.0).round() as i64)
            .collect();
        q.sort_by(|a, b| b.cmp(a));
        let distinct = q.windows(2).all(|w| w[0] - w[1] >= 7);
        if distinct && q.iter().all(|&v| v >= 6) {
            return q.into_iter().map(|v| big_ratio(v, 64)).collect();
        }
    }
}

/// Exact rational momenta on the 1/64 grid in `[-1, 1]`.
pub fn sample_p_exact<R: Rng>(n: usize, rng: &mut R) -> Vec<GaussRat> {
    (0..n)
        .map(|_| {
            let v = (rng.gen_range(-1.0..1.0f64) * 64.0).round() as i64;
            GaussRat::from_rational(big_ratio(v, 64))
        })
        .collect()
}

/// Exact phase point for the rational case.
pub fn sample_phase_point_exact<R: Rng>(n: usize, rng: &mut R) -> (Vec<GaussRat>, Vec<GaussRat>) {
    let q = sample_q_exact(n, rng)
        .into_iter()
        .map(GaussRat::from_rational)
        .collect();
    (q, sample_p_exact(n, rng))
}

/// Random real invertible constant with Frobenius condition proxy below 50.
pub fn random_g0<R: Rng>(n: usize, rng: &mut R) -> SquareMatrix<C64> {
    loop {
        let g = SquareMatrix::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        if let Ok(c) = cond_frobenius(&g) {
            if c < 50.0 {
                return g;
            }
        }
    }
}

/// Uniform coupling-like parameter in `[-2, 2]`.
pub fn sample_omega<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-2.0..2.0)
}
