//! The standard Lax matrix, the Hamiltonian, the analytic Poisson bracket of
//! Lax entries, the linear-bracket residual against a candidate r-matrix, and
//! Hamiltonian time evolution with conservation diagnostics.

use num_complex::Complex64;

use crate::error::{CmrError, Result};
use crate::matrix::{roots, SquareMatrix};
use crate::potentials::ModelCase;
use crate::scalar::{Scalar, C64};
use crate::tensor::{kron, Tensor2};

/// A point of the 2n-dimensional phase space. Coordinates and momenta are
/// real-valued scalars of the active field.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<S> {
    pub q: Vec<S>,
    pub p: Vec<S>,
}

impl<S: Scalar> PhasePoint<S> {
    pub fn new(q: Vec<S>, p: Vec<S>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(CmrError::Argument(
                "coordinate and momentum vectors differ in length".into(),
            ));
        }
        if q.len() < 2 {
            return Err(CmrError::Argument("at least two particles required".into()));
        }
        Ok(PhasePoint { q, p })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }
}

impl PhasePoint<C64> {
    pub fn from_reals(q: &[f64], p: &[f64]) -> Result<Self> {
        PhasePoint::new(
            q.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
            p.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
        )
    }
}

/// Check that every pairwise difference `q_k - q_l` is admissible.
pub fn check_admissible<S: Scalar>(case: &ModelCase, q: &[S]) -> Result<()> {
    let n = q.len();
    for alpha in roots(n) {
        // Evaluating w surfaces both exact zeros and float near-singularity.
        case.w_s(&alpha.eval(q))?;
    }
    Ok(())
}

/// The Lax matrix `L = diag(p) + sqrt(-1) sum_{k != l} w(q_k - q_l) e_{kl}`.
/// Hermitian whenever `q`, `p` are real.
pub fn build_l<S: Scalar>(case: &ModelCase, point: &PhasePoint<S>) -> Result<SquareMatrix<S>> {
    let n = point.n();
    let mut l = SquareMatrix::diagonal(&point.p);
    let i = S::i();
    for alpha in roots(n) {
        let w = case.w_s(&alpha.eval(&point.q))?;
        l.add_at(alpha.k - 1, alpha.l - 1, i.clone() * w);
    }
    Ok(l)
}

/// `h = (1/2) sum p_k^2 + sum_{k<l} v(q_k - q_l)`, with `tr L^2 = 2h`.
pub fn hamiltonian<S: Scalar>(case: &ModelCase, point: &PhasePoint<S>) -> Result<S> {
    let mut h = S::zero();
    for pk in &point.p {
        h = h + S::from_ratio(1, 2) * pk.clone() * pk.clone();
    }
    let n = point.n();
    for k in 0..n {
        for l in (k + 1)..n {
            h = h + case.v_s(&(point.q[k].clone() - point.q[l].clone()))?;
        }
    }
    Ok(h)
}

/// Partial derivatives of `L` in the canonical directions at fixed `q`:
/// `dL/dp_k = H_k` and `dL/dq_k = sqrt(-1) sum_alpha w'(alpha(q)) alpha_k E_alpha`.
pub fn lax_derivatives<S: Scalar>(
    case: &ModelCase,
    q: &[S],
) -> Result<(Vec<SquareMatrix<S>>, Vec<SquareMatrix<S>>)> {
    let n = q.len();
    let mut dp = Vec::with_capacity(n);
    let mut dq = Vec::with_capacity(n);
    for k in 1..=n {
        dp.push(SquareMatrix::h_k(k, n)?);
        let mut m = SquareMatrix::zeros(n);
        for alpha in roots(n) {
            let ak = alpha.component(k);
            if ak == 0 {
                continue;
            }
            let wp = case.w_prime_s(&alpha.eval(q))?;
            m.add_at(
                alpha.k - 1,
                alpha.l - 1,
                S::i() * wp * S::from_int(ak),
            );
        }
        dq.push(m);
    }
    Ok((dp, dq))
}

/// Assemble `{L_1, L_2} = sum_k (dL/dp_k (x) dL/dq_k - dL/dq_k (x) dL/dp_k)`
/// from precomputed derivative matrices.
pub fn bracket_from_derivatives<S: Scalar>(
    dp: &[SquareMatrix<S>],
    dq: &[SquareMatrix<S>],
) -> Result<Tensor2<S>> {
    let n = dp[0].dim();
    let mut out = Tensor2::zeros(n);
    for (a, b) in dp.iter().zip(dq) {
        out = out + kron(a, b)? - kron(b, a)?;
    }
    Ok(out)
}

/// The analytic Poisson bracket `{L_1, L_2}` of the standard Lax matrix.
/// Depends on `q` only.
pub fn poisson_bracket_ll<S: Scalar>(case: &ModelCase, q: &[S]) -> Result<Tensor2<S>> {
    let (dp, dq) = lax_derivatives(case, q)?;
    bracket_from_derivatives(&dp, &dq)
}

/// Defect tensor `{L_1, L_2} - [r_12, L (x) 1] + [r_21, 1 (x) L]` for a
/// supplied bracket, Lax matrix and candidate r-matrix.
pub fn eq2_defect<S: Scalar>(
    bracket: &Tensor2<S>,
    l: &SquareMatrix<S>,
    r12: &Tensor2<S>,
) -> Result<Tensor2<S>> {
    let n = l.dim();
    if r12.base_dim() != n || bracket.base_dim() != n {
        return Err(CmrError::Argument(
            "r-matrix / Lax dimension mismatch".into(),
        ));
    }
    let id = SquareMatrix::<S>::identity(n);
    let l1 = kron(l, &id)?;
    let l2 = kron(&id, l)?;
    let r21 = r12.swap_factors();
    Ok(bracket.clone() - r12.commutator(&l1) + r21.commutator(&l2))
}

/// Frobenius norm of [`eq2_defect`].
pub fn eq2_residual<S: Scalar>(
    bracket: &Tensor2<S>,
    l: &SquareMatrix<S>,
    r12: &Tensor2<S>,
) -> Result<f64> {
    Ok(eq2_defect(bracket, l, r12)?.frobenius_norm())
}

/// Residual of the linear bracket relation for the standard Lax pair at a
/// phase point, with the bracket computed analytically.
pub fn eq2_residual_standard<S: Scalar>(
    case: &ModelCase,
    point: &PhasePoint<S>,
    r12: &Tensor2<S>,
) -> Result<f64> {
    let l = build_l(case, point)?;
    let bracket = poisson_bracket_ll(case, &point.q)?;
    eq2_residual(&bracket, &l, r12)
}

/// `(tr L, tr L^2, ..., tr L^kmax)`.
pub fn trace_invariants<S: Scalar>(l: &SquareMatrix<S>, kmax: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(kmax);
    let mut power = l.clone();
    for k in 1..=kmax {
        out.push(power.trace());
        if k < kmax {
            power = power.matmul(l);
        }
    }
    out
}

/// A fixed-step trajectory of phase points.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub q: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.q.len() - 1
    }

    pub fn point(&self, i: usize) -> Result<PhasePoint<C64>> {
        PhasePoint::from_reals(&self.q[i], &self.p[i])
    }
}

fn forces(case: &ModelCase, q: &[f64]) -> Result<Vec<f64>> {
    let n = q.len();
    let mut f = vec![0.0; n];
    for k in 0..n {
        for l in 0..n {
            if l != k {
                f[k] -= case.v_prime(q[k] - q[l])?;
            }
        }
    }
    Ok(f)
}

/// Classic fixed-step RK4 on `dq_k/dt = p_k`, `dp_k/dt = -sum_l v'(q_k - q_l)`.
/// Fails with the last valid step index if the trajectory leaves the
/// admissible domain.
pub fn evolve(
    case: &ModelCase,
    q0: &[f64],
    p0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(CmrError::Argument(format!("step size must be positive, got {dt}")));
    }
    if q0.len() != p0.len() || q0.len() < 2 {
        return Err(CmrError::Argument("bad initial state".into()));
    }
    let n = q0.len();
    check_admissible(case, &q0.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>())?;

    let mut traj = Trajectory {
        dt,
        q: Vec::with_capacity(steps + 1),
        p: Vec::with_capacity(steps + 1),
    };
    traj.q.push(q0.to_vec());
    traj.p.push(p0.to_vec());

    let mut q = q0.to_vec();
    let mut p = p0.to_vec();
    // The admissible domain is one connected component between the singular
    // planes q_k = q_l; a sign flip of any pairwise difference means the
    // trajectory left it.
    let sign_pattern = |q: &[f64]| -> Vec<bool> {
        let mut s = Vec::new();
        for k in 0..n {
            for l in (k + 1)..n {
                s.push(q[k] - q[l] > 0.0);
            }
        }
        s
    };
    let initial_pattern = sign_pattern(q0);
    for step in 0..steps {
        let stage = |q: &[f64], p: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
            Ok((p.to_vec(), forces(case, q)?))
        };
        let advance = |q: &[f64], dq: &[f64], h: f64| -> Vec<f64> {
            q.iter().zip(dq).map(|(x, d)| x + h * d).collect()
        };
        let res: Result<(Vec<f64>, Vec<f64>)> = (|| {
            let (k1q, k1p) = stage(&q, &p)?;
            let (k2q, k2p) = stage(&advance(&q, &k1q, dt / 2.0), &advance(&p, &k1p, dt / 2.0))?;
            let (k3q, k3p) = stage(&advance(&q, &k2q, dt / 2.0), &advance(&p, &k2p, dt / 2.0))?;
            let (k4q, k4p) = stage(&advance(&q, &k3q, dt), &advance(&p, &k3p, dt))?;
            let qn = (0..n)
                .map(|i| q[i] + dt / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]))
                .collect::<Vec<_>>();
            let pn = (0..n)
                .map(|i| p[i] + dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]))
                .collect::<Vec<_>>();
            for k in 0..n {
                for l in (k + 1)..n {
                    if !case.admissible(qn[k] - qn[l]) {
                        return Err(CmrError::Domain("inadmissible step".into()));
                    }
                }
            }
            if sign_pattern(&qn) != initial_pattern {
                return Err(CmrError::Domain("crossed a singular plane".into()));
            }
            Ok((qn, pn))
        })();
        match res {
            Ok((qn, pn)) => {
                q = qn;
                p = pn;
                traj.q.push(q.clone());
                traj.p.push(p.clone());
            }
            Err(_) => {
                return Err(CmrError::Evolution {
                    step,
                    t: step as f64 * dt,
                });
            }
        }
    }
    Ok(traj)
}

/// Render a trajectory as CSV with columns
/// `t, q1..qn, p1..pn, h, trL2, trL3` and a trailing summary comment with the
/// largest invariant drifts.
pub fn trajectory_csv(case: &ModelCase, traj: &Trajectory) -> Result<String> {
    let n = traj.q[0].len();
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        out.push_str(&format!(",q{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",p{i}"));
    }
    out.push_str(",h,trL2,trL3\n");

    let mut first = (0.0, 0.0, 0.0);
    let mut drift: (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut p_drift = 0.0f64;
    let p0_sum: f64 = traj.p[0].iter().sum();
    for (i, (q, p)) in traj.q.iter().zip(&traj.p).enumerate() {
        let point = PhasePoint::from_reals(q, p)?;
        let h = hamiltonian(case, &point)?.re;
        let l = build_l(case, &point)?;
        let tr = trace_invariants(&l, 3);
        let (t2, t3) = (tr[1].re, tr[2].re);
        if i == 0 {
            first = (h, t2, t3);
        }
        drift.0 = drift.0.max((h - first.0).abs());
        drift.1 = drift.1.max((t2 - first.1).abs());
        drift.2 = drift.2.max((t3 - first.2).abs());
        p_drift = p_drift.max((p.iter().sum::<f64>() - p0_sum).abs());

        out.push_str(&format!("{:?}", i as f64 * traj.dt));
        for x in q {
            out.push_str(&format!(",{x:?}"));
        }
        for x in p {
            out.push_str(&format!(",{x:?}"));
        }
        out.push_str(&format!(",{h:?},{t2:?},{t3:?}\n"));
    }
    out.push_str(&format!(
        "# max_drift h={:?} trL2={:?} trL3={:?} total_p={:?}\n",
        drift.0, drift.1, drift.2, p_drift
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{big_ratio, GaussRat};
    use rand::SeedableRng;

    fn rational() -> ModelCase {
        ModelCase::rational()
    }

    #[test]
    fn lax_matrix_small_example() {
        // n = 2, q = (1, 0), p = (2, 3): L = [[2, i], [-i, 3]].
        let point = PhasePoint::from_reals(&[1.0, 0.0], &[2.0, 3.0]).unwrap();
        let l = build_l(&rational(), &point).unwrap();
        assert_eq!(*l.at(0, 0), Complex64::new(2.0, 0.0));
        assert_eq!(*l.at(0, 1), Complex64::new(0.0, 1.0));
        assert_eq!(*l.at(1, 0), Complex64::new(0.0, -1.0));
        assert_eq!(*l.at(1, 1), Complex64::new(3.0, 0.0));

        // h = 7.5 and tr L^2 = 15.
        let h = hamiltonian(&rational(), &point).unwrap().re;
        assert!((h - 7.5).abs() < 1e-15);
        let tr = trace_invariants(&l, 2);
        assert!((tr[1].re - 15.0).abs() < 1e-14);
        assert!((tr[0].re - 5.0).abs() < 1e-15);
    }

    #[test]
    fn trigonometric_entry_value() {
        let case = ModelCase::trigonometric(1.0).unwrap();
        let q = [std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4, 0.0];
        let point = PhasePoint::from_reals(&q, &[0.0; 3]).unwrap();
        let l = build_l(&case, &point).unwrap();
        // (1,2) entry is i / sin(pi/4) = i sqrt(2).
        let want = Complex64::new(0.0, std::f64::consts::SQRT_2);
        assert!((l.at(0, 1) - want).norm() < 1e-14);
    }

    #[test]
    fn lax_is_hermitian_and_trace_identities_hold() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for case in [
            rational(),
            ModelCase::hyperbolic(1.0).unwrap(),
            ModelCase::trigonometric(1.0).unwrap(),
        ] {
            for _ in 0..20 {
                let (q, p) = crate::sampling::sample_phase_point(&case, 4, &mut rng);
                let point = PhasePoint::from_reals(&q, &p).unwrap();
                let l = build_l(&case, &point).unwrap();
                assert!((l.clone() - l.dagger()).frobenius_norm() < 1e-12);
                let h = hamiltonian(&case, &point).unwrap().re;
                let tr2 = trace_invariants(&l, 2)[1].re;
                assert!((tr2 - 2.0 * h).abs() < 1e-10, "tr L^2 != 2h");
                let tr1 = trace_invariants(&l, 1)[0].re;
                assert!((tr1 - p.iter().sum::<f64>()).abs() < 1e-12);
            }
        }
    }

    /// Finite-difference Poisson bracket over the canonical coordinates,
    /// independent of the analytic derivative formulas.
    fn fd_bracket(case: &ModelCase, q: &[f64], p: &[f64], h: f64) -> Tensor2<C64> {
        let n = q.len();
        let l_at = |q: &[f64], p: &[f64]| {
            build_l(case, &PhasePoint::from_reals(q, p).unwrap()).unwrap()
        };
        let mut dq_mats = Vec::new();
        let mut dp_mats = Vec::new();
        for k in 0..n {
            let mut qp = q.to_vec();
            let mut qm = q.to_vec();
            qp[k] += h;
            qm[k] -= h;
            let diff = (l_at(&qp, p) - l_at(&qm, p)).scale(&Complex64::new(1.0 / (2.0 * h), 0.0));
            dq_mats.push(diff);
            let mut pp = p.to_vec();
            let mut pm = p.to_vec();
            pp[k] += h;
            pm[k] -= h;
            let diff = (l_at(q, &pp) - l_at(q, &pm)).scale(&Complex64::new(1.0 / (2.0 * h), 0.0));
            dp_mats.push(diff);
        }
        bracket_from_derivatives(&dp_mats, &dq_mats).unwrap()
    }

    #[test]
    fn analytic_bracket_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for case in [
            rational(),
            ModelCase::hyperbolic(1.0).unwrap(),
            ModelCase::trigonometric(1.0).unwrap(),
        ] {
            let (q, p) = crate::sampling::sample_phase_point_separated(&case, 3, &mut rng);
            let analytic = poisson_bracket_ll(&case, &to_c64(&q)).unwrap();
            let fd = fd_bracket(&case, &q, &p, 1e-5);
            let diff = (analytic.clone() - fd).frobenius_norm();
            assert!(diff < 1e-6, "bracket mismatch {diff} for {:?}", case.kind());

            // The bracket is p-independent and swap-antisymmetric.
            let swapped = analytic.swap_factors();
            assert!((swapped + analytic).frobenius_norm() < 1e-12);
        }
    }

    fn to_c64(q: &[f64]) -> Vec<C64> {
        q.iter().map(|x| Complex64::new(*x, 0.0)).collect()
    }

    #[test]
    fn exact_bracket_is_reproduced() {
        // Exact-mode bracket at rational coordinates equals the float one.
        let case = rational();
        let q = vec![
            GaussRat::from_rational(big_ratio(3, 2)),
            GaussRat::from_rational(big_ratio(1, 3)),
        ];
        let exact = poisson_bracket_ll(&case, &q).unwrap().to_c64();
        let qf = vec![Complex64::new(1.5, 0.0), Complex64::new(1.0 / 3.0, 0.0)];
        let float = poisson_bracket_ll(&case, &qf).unwrap();
        assert!((exact - float).frobenius_norm() < 1e-12);
    }

    #[test]
    fn repulsive_motion_and_conservation() {
        let case = rational();
        let traj = evolve(&case, &[0.6, -0.6], &[0.0, 0.0], 1e-3, 2000).unwrap();
        // Strictly increasing first coordinate (repulsion).
        for w in traj.q.windows(2) {
            assert!(w[1][0] > w[0][0]);
        }
        // Total momentum conserved to near machine precision.
        for p in &traj.p {
            assert!((p[0] + p[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_drift_with_richardson_step_check() {
        let case = rational();
        let q0 = [1.1, 0.0, -1.1];
        let p0 = [0.3, 0.0, -0.3];
        let drift_for = |dt: f64, steps: usize| -> (f64, f64) {
            let traj = evolve(&case, &q0, &p0, dt, steps).unwrap();
            let l0 = build_l(&case, &traj.point(0).unwrap()).unwrap();
            let le = build_l(&case, &traj.point(traj.steps()).unwrap()).unwrap();
            let t0 = trace_invariants(&l0, 3);
            let te = trace_invariants(&le, 3);
            ((te[1] - t0[1]).norm(), (te[2] - t0[2]).norm())
        };
        let (d2, d3) = drift_for(1e-3, 10_000);
        assert!(d2 < 1e-6 && d3 < 1e-6, "drift {d2} {d3}");
        // Halving the step shrinks the drift (integrator self-check).
        let (h2, h3) = drift_for(5e-4, 20_000);
        assert!(h2 <= d2 * 0.5 + 1e-12 && h3 <= d3 * 0.5 + 1e-12);
    }

    #[test]
    fn collision_reports_evolution_error() {
        let case = rational();
        // Head-on momenta with an oversized step overshoot the barrier.
        let res = evolve(&case, &[0.05, -0.05], &[-2.0, 2.0], 5e-2, 100);
        match res {
            Err(CmrError::Evolution { step, t }) => {
                assert!(t >= 0.0);
                assert!(step < 100);
            }
            other => panic!("expected evolution error, got {other:?}"),
        }
    }

    #[test]
    fn gauge_conjugation_preserves_spectrum() {
        let case = ModelCase::hyperbolic(1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let (q, p) = crate::sampling::sample_phase_point(&case, 3, &mut rng);
            let point = PhasePoint::from_reals(&q, &p).unwrap();
            let l = build_l(&case, &point).unwrap();
            let g = crate::sampling::random_g0(3, &mut rng);
            let lp = g.matmul(&l).matmul(&g.inverse().unwrap());
            let s1 = crate::eig::eigenvalues(&l).unwrap();
            let s2 = crate::eig::eigenvalues(&lp).unwrap();
            assert!(crate::eig::spectrum_distance(&s1, &s2) < 1e-8);
        }
    }
}
