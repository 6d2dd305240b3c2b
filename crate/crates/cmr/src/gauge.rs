//! Gauge potentials, the explicit diagonalizing matrices and their
//! composition, the r-matrix transform that removes the coordinate
//! dependence, and the direct matrix identity behind the closed-form
//! constant r-matrix.

use crate::constr::{build_tilde_r_prime, build_x};
use crate::dynr::{b_coefficient, cartan_a_component, RFamily, RSpec};
use crate::error::{CmrError, Result};
use crate::expm::expm_auto;
use crate::lax::{bracket_from_derivatives, build_l, lax_derivatives, PhasePoint};
use crate::matrix::{roots, SquareMatrix};
use crate::potentials::ModelCase;
use crate::scalar::{Scalar, ScalarMode, C64};
use crate::tensor::{kron, Tensor2};

/// The per-direction gauge potential matrices `A_1 ... A_n` at a point.
#[derive(Debug, Clone)]
pub struct GaugePotential<S> {
    pub n: usize,
    pub mats: Vec<SquareMatrix<S>>,
}

/// `A_k = sum_l A_k^l H_l + sum_alpha w_alpha b_k^alpha E_alpha` with the
/// family's Cartan and root coefficients.
pub fn build_a<S: Scalar>(
    case: &ModelCase,
    q: &[S],
    spec: &RSpec<S>,
) -> Result<GaugePotential<S>> {
    let n = q.len();
    if spec.family == RFamily::AvanTalon {
        return Err(CmrError::Unsupported(
            "the Avan-Talon family has no gauge potential".into(),
        ));
    }
    let mut mats = Vec::with_capacity(n);
    for k in 1..=n {
        let mut m = SquareMatrix::zeros(n);
        for l in 1..=n {
            let v = cartan_a_component(case, q, spec, k, l)?;
            m.add_at(l - 1, l - 1, v);
        }
        for alpha in roots(n) {
            let w = case.w_s(&alpha.eval(q))?;
            let b = b_coefficient(spec.family, &alpha, k, &spec.omega)?;
            m.add_at(alpha.k - 1, alpha.l - 1, w * b);
        }
        mats.push(m);
    }
    Ok(GaugePotential { n, mats })
}

/// The common matrix `sum_{l != m} (F(q_l - q_m) H_l + w(q_l - q_m) e_{lm})`
/// carrying the whole Omega dependence of the potential and the r-matrix.
pub fn script_a<S: Scalar>(case: &ModelCase, q: &[S]) -> Result<SquareMatrix<S>> {
    let n = q.len();
    let mut m = SquareMatrix::zeros(n);
    for alpha in roots(n) {
        let x = alpha.eval(q);
        m.add_at(alpha.k - 1, alpha.k - 1, case.f_s(&x)?);
        m.add_at(alpha.k - 1, alpha.l - 1, case.w_s(&x)?);
    }
    Ok(m)
}

fn node_values<S: Scalar>(case: &ModelCase, q: &[S]) -> Result<(Vec<S>, Vec<S>)> {
    let f: Vec<S> = q.iter().map(|x| case.f_s(x)).collect::<Result<_>>()?;
    let w: Vec<S> = q.iter().map(|x| case.w_s(x)).collect::<Result<_>>()?;
    for (i, wi) in w.iter().enumerate() {
        if wi.is_zero() || (S::MODE == ScalarMode::Complex64 && wi.abs() < 1e-9) {
            return Err(CmrError::Domain(format!(
                "w vanishes at coordinate {} of the diagonalizer",
                i + 1
            )));
        }
    }
    for i in 0..f.len() {
        for j in (i + 1)..f.len() {
            let d = f[i].clone() - f[j].clone();
            let degenerate = match S::MODE {
                ScalarMode::ExactGaussian => d.is_zero(),
                ScalarMode::Complex64 => d.abs() < 1e-9,
            };
            if degenerate {
                return Err(CmrError::Degenerate(format!(
                    "coincident node values F(q_{}) = F(q_{})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok((f, w))
}

/// Elementary symmetric polynomials `e_0 ... e_m` of the given values.
fn elementary_symmetric<S: Scalar>(vals: &[S]) -> Vec<S> {
    let mut e = vec![S::zero(); vals.len() + 1];
    e[0] = S::one();
    for (count, v) in vals.iter().enumerate() {
        for j in (1..=(count + 1)).rev() {
            e[j] = e[j].clone() + v.clone() * e[j - 1].clone();
        }
    }
    e
}

/// The polynomially-structured gauge factor and its explicit inverse:
/// `phi_{jk}` is the elementary symmetric polynomial of degree `n - j` in the
/// node values `F(q_l)`, `l != k`, and
/// `(phi^-1)_{jk} = (-F_j)^{k-1} prod_{l != j} 1/(F_l - F_j)`.
pub fn build_phi<S: Scalar>(
    case: &ModelCase,
    q: &[S],
) -> Result<(SquareMatrix<S>, SquareMatrix<S>)> {
    let n = q.len();
    let (f, _) = node_values(case, q)?;
    let mut phi = SquareMatrix::zeros(n);
    for k in 1..=n {
        let others: Vec<S> = (0..n).filter(|l| *l != k - 1).map(|l| f[l].clone()).collect();
        let e = elementary_symmetric(&others);
        for j in 1..=n {
            phi.set(j - 1, k - 1, e[n - j].clone());
        }
    }
    let mut inv = SquareMatrix::zeros(n);
    for j in 1..=n {
        let mut denom = S::one();
        for l in 0..n {
            if l != j - 1 {
                denom = denom * (f[l].clone() - f[j - 1].clone());
            }
        }
        let denom_inv = denom.recip()?;
        let mut power = S::one();
        for k in 1..=n {
            inv.set(j - 1, k - 1, power.clone() * denom_inv.clone());
            power = power * (-f[j - 1].clone());
        }
    }
    Ok((phi, inv))
}

/// Diagonal normalizer with `chi_kk = prod_{l != k} 1 / w(q_l)`.
pub fn build_chi<S: Scalar>(case: &ModelCase, q: &[S]) -> Result<SquareMatrix<S>> {
    let n = q.len();
    let (_, w) = node_values(case, q)?;
    let mut chi = SquareMatrix::zeros(n);
    for k in 0..n {
        let mut prod = S::one();
        for (l, wl) in w.iter().enumerate() {
            if l != k {
                prod = prod * wl.clone().recip()?;
            }
        }
        chi.set(k, k, prod);
    }
    Ok(chi)
}

/// The full gauge transformation
/// `g = g0 exp(-X n Omega sum_i q_i) phi(q) chi(q)` for family I; family II is
/// obtained from the family-I factor by the inverse-adjoint duality.
pub fn build_g<S: Scalar>(
    case: &ModelCase,
    q: &[S],
    spec: &RSpec<S>,
    g0: &SquareMatrix<S>,
) -> Result<SquareMatrix<S>> {
    let n = q.len();
    if g0.dim() != n {
        return Err(CmrError::Argument("g0 dimension mismatch".into()));
    }
    let (phi, _) = build_phi(case, q)?;
    let chi = build_chi(case, q)?;
    let g_tilde = phi.matmul(&chi);
    let inner = if spec.omega.is_zero() {
        g_tilde
    } else {
        let x = build_x::<S>(case, n)?;
        let mut qsum = S::zero();
        for qi in q {
            qsum = qsum + qi.clone();
        }
        let arg = x.scale(&(-(S::from_int(n as i64) * spec.omega.clone() * qsum)));
        expm_auto(&arg)?.matmul(&g_tilde)
    };
    match spec.family {
        RFamily::CaseI => Ok(g0.matmul(&inner)),
        RFamily::CaseII => Ok(g0.matmul(&inner.dagger().inverse()?)),
        RFamily::AvanTalon => Err(CmrError::Unsupported(
            "the Avan-Talon family has no gauge transformation to a constant".into(),
        )),
    }
}

/// The transformed r-matrix
/// `r'(q) = (g (x) g) (r(q) + sum_k A_k (x) H_k) (g (x) g)^-1`.
pub fn transform_r<S: Scalar>(
    r: &Tensor2<S>,
    case: &ModelCase,
    q: &[S],
    spec: &RSpec<S>,
    g0: &SquareMatrix<S>,
) -> Result<Tensor2<S>> {
    let n = q.len();
    if r.base_dim() != n {
        return Err(CmrError::Argument("tensor dimension mismatch".into()));
    }
    let a = build_a(case, q, spec)?;
    let mut inner = r.clone();
    for k in 1..=n {
        inner = inner + kron(&a.mats[k - 1], &SquareMatrix::h_k(k, n)?)?;
    }
    let g = build_g(case, q, spec, g0)?;
    let g_inv = g.inverse()?;
    inner.conjugate_pair(&g, &g_inv)
}

/// `g~ A g~^-1` with the Omega-independent gauge factor; a constant multiple
/// of the shift element `X` (checked by the structural tests).
pub fn a_tilde<S: Scalar>(case: &ModelCase, q: &[S]) -> Result<SquareMatrix<S>> {
    let (phi, _) = build_phi(case, q)?;
    let chi = build_chi(case, q)?;
    let g_tilde = phi.matmul(&chi);
    let a = script_a(case, q)?;
    Ok(g_tilde.matmul(&a).matmul(&g_tilde.inverse()?))
}

/// The transformed Lax matrix and the analytic Poisson bracket of its
/// entries: derivatives conjugate as
/// `dL'/dp_k = g H_k g^-1` and `dL'/dq_k = g (dL/dq_k + [L, A_k]) g^-1`.
pub fn gauged_lax_pair<S: Scalar>(
    case: &ModelCase,
    point: &PhasePoint<S>,
    spec: &RSpec<S>,
    g0: &SquareMatrix<S>,
) -> Result<(SquareMatrix<S>, Tensor2<S>)> {
    let l = build_l(case, point)?;
    let (dp, dq) = lax_derivatives(case, &point.q)?;
    let a = build_a(case, &point.q, spec)?;
    let g = build_g(case, &point.q, spec, g0)?;
    let g_inv = g.inverse()?;
    let conj = |m: &SquareMatrix<S>| g.matmul(m).matmul(&g_inv);
    let l_prime = conj(&l);
    let dp_prime: Vec<_> = dp.iter().map(|m| conj(m)).collect();
    let dq_prime: Vec<_> = dq
        .iter()
        .zip(&a.mats)
        .map(|(m, ak)| conj(&(m.clone() + l.commutator(ak))))
        .collect();
    let bracket = bracket_from_derivatives(&dp_prime, &dq_prime)?;
    Ok((l_prime, bracket))
}

fn central_diff<M>(
    eval: impl Fn(&[f64]) -> Result<M>,
    q: &[f64],
    k: usize,
    h: f64,
    combine: impl Fn(M, M, f64) -> M,
) -> Result<M> {
    let mut qp = q.to_vec();
    let mut qm = q.to_vec();
    qp[k] += h;
    qm[k] -= h;
    Ok(combine(eval(&qp)?, eval(&qm)?, 1.0 / (2.0 * h)))
}

/// Finite-difference residual of `d_k g + g A_k = 0` (central differences,
/// step 1e-5), maximized over k. With `richardson` the step-halved
/// extrapolation removes the leading truncation term.
pub fn ode_residual(
    case: &ModelCase,
    q: &[f64],
    spec: &RSpec<C64>,
    g0: &SquareMatrix<C64>,
    richardson: bool,
) -> Result<f64> {
    const H: f64 = 1e-5;
    let n = q.len();
    let to_s = |q: &[f64]| -> Vec<C64> { q.iter().map(|x| C64::from_f64(*x)).collect() };
    let qs = to_s(q);
    let g = build_g(case, &qs, spec, g0)?;
    let a = build_a(case, &qs, spec)?;
    let g_at = |q: &[f64]| build_g(case, &to_s(q), spec, g0);
    let diff = |a: SquareMatrix<C64>, b: SquareMatrix<C64>, s: f64| {
        (a - b).scale(&C64::from_f64(s))
    };
    let mut worst = 0.0f64;
    for k in 0..n {
        let d1 = central_diff(g_at, q, k, H, diff)?;
        let deriv = if richardson {
            let d2 = central_diff(g_at, q, k, H / 2.0, diff)?;
            (d2.scale(&C64::from_f64(4.0)) - d1).scale(&C64::from_f64(1.0 / 3.0))
        } else {
            d1
        };
        let defect = deriv + g.matmul(&a.mats[k]);
        worst = worst.max(defect.frobenius_norm());
    }
    Ok(worst)
}

/// Finite-difference residual of the zero-curvature condition
/// `d_k A_l - d_l A_k + [A_l, A_k] = 0`, maximized over all pairs. With
/// `richardson` the step-halved extrapolation removes the leading
/// truncation term.
pub fn curvature_residual(
    case: &ModelCase,
    q: &[f64],
    spec: &RSpec<C64>,
    richardson: bool,
) -> Result<f64> {
    const H: f64 = 1e-5;
    let n = q.len();
    let to_s = |q: &[f64]| -> Vec<C64> { q.iter().map(|x| C64::from_f64(*x)).collect() };
    let a_at = |q: &[f64]| build_a(case, &to_s(q), spec);
    let a0 = a_at(q)?;
    let diff = |a: SquareMatrix<C64>, b: SquareMatrix<C64>, s: f64| {
        (a - b).scale(&C64::from_f64(s))
    };
    let deriv = |l: usize, k: usize| -> Result<SquareMatrix<C64>> {
        let d1 = central_diff(|q| Ok(a_at(q)?.mats[l].clone()), q, k, H, diff)?;
        if richardson {
            let d2 = central_diff(|q| Ok(a_at(q)?.mats[l].clone()), q, k, H / 2.0, diff)?;
            Ok((d2.scale(&C64::from_f64(4.0)) - d1).scale(&C64::from_f64(1.0 / 3.0)))
        } else {
            Ok(d1)
        }
    };
    let mut worst = 0.0f64;
    for k in 0..n {
        for l in 0..n {
            let dk_al = deriv(l, k)?;
            let dl_ak = deriv(k, l)?;
            let defect = dk_al - dl_ak + a0.mats[l].commutator(&a0.mats[k]);
            worst = worst.max(defect.frobenius_norm());
        }
    }
    Ok(worst)
}

/// Defect of the direct closed-form identity behind the constant r-matrix:
/// `(phi (x) phi) rho(q) - tilde r' (phi (x) phi)`, with `rho` the
/// chi-conjugated combination written out in node values.
pub fn appendix_c_defect<S: Scalar>(case: &ModelCase, q: &[S]) -> Result<Tensor2<S>> {
    let n = q.len();
    let (f, _) = node_values(case, q)?;
    let b = case.b_scalar::<S>()?;
    let mut rho = Tensor2::zeros(n);
    for k in 1..=n {
        for l in 1..=n {
            if k == l {
                continue;
            }
            let fk = f[k - 1].clone();
            let fl = f[l - 1].clone();
            let denom_inv = (fk.clone() - fl.clone()).recip()?;
            // (-B + F_k F_l) / (F_k - F_l) * (e_kl - e_ll) (x) (e_lk - e_kk)
            let coef = (-b.clone() + fk.clone() * fl.clone()) * denom_inv;
            let m1 = SquareMatrix::elementary(k, l, n)? - SquareMatrix::elementary(l, l, n)?;
            let m2 = SquareMatrix::elementary(l, k, n)? - SquareMatrix::elementary(k, k, n)?;
            rho = rho + kron(&m1, &m2)?.scale(&coef);
            // + F_k e_kk (x) e_kl - F_l e_lk (x) e_ll
            rho.add_coeff(k, k, k, l, fk);
            rho.add_coeff(l, k, l, l, -fl);
        }
    }
    let (phi, _) = build_phi(case, q)?;
    let phi2 = kron(&phi, &phi)?;
    let tilde = build_tilde_r_prime::<S>(case, n)?;
    Ok(phi2.matmul(&rho) - tilde.matmul(&phi2))
}

pub fn appendix_c_residual<S: Scalar>(case: &ModelCase, q: &[S]) -> Result<f64> {
    Ok(appendix_c_defect(case, q)?.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constr::build_r_prime;
    use crate::lax::{eq2_defect, eq2_residual};
    use crate::sampling;
    use crate::scalar::{big_ratio, GaussRat};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cases() -> Vec<ModelCase> {
        vec![
            ModelCase::rational(),
            ModelCase::hyperbolic(1.0).unwrap(),
            ModelCase::trigonometric(1.0).unwrap(),
        ]
    }

    fn to_s(q: &[f64]) -> Vec<C64> {
        q.iter().map(|x| C64::from_f64(*x)).collect()
    }

    fn exact_q(vals: &[(i64, i64)]) -> Vec<GaussRat> {
        vals.iter()
            .map(|(p, d)| GaussRat::from_rational(big_ratio(*p, *d)))
            .collect()
    }

    #[test]
    fn potential_small_example_and_omega_decomposition() {
        // Omega = 0, n = 2 rational, q = (1, 0): A_1 = e12 - e22.
        let case = ModelCase::rational();
        let q = to_s(&[1.0, 1e-6]);
        // Use q2 = 0 exactly: the Cartan part needs F(q2 - q1) only.
        let q = {
            let mut q = q;
            q[1] = C64::from_f64(0.0);
            q
        };
        let spec = RSpec::case_i(C64::from_f64(0.0));
        let a = build_a(&case, &q, &spec).unwrap();
        let mut want = SquareMatrix::<C64>::zeros(2);
        want.set(0, 1, Complex64::new(1.0, 0.0));
        want.set(1, 1, Complex64::new(-1.0, 0.0));
        assert!((a.mats[0].clone() - want).frobenius_norm() < 1e-14);

        // A_k(Omega) - A_k(0) = Omega * script_a, for every k.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for case in cases() {
            let q = to_s(&sampling::sample_q(&case, 3, &mut rng));
            let omega = C64::from_f64(0.7);
            let a0 = build_a(&case, &q, &RSpec::case_i(C64::from_f64(0.0))).unwrap();
            let aw = build_a(&case, &q, &RSpec::case_i(omega)).unwrap();
            let sa = script_a(&case, &q).unwrap().scale(&omega);
            for k in 0..3 {
                let defect = aw.mats[k].clone() - a0.mats[k].clone() - sa.clone();
                assert!(defect.frobenius_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn family_two_potential_is_minus_adjoint() {
        let case = ModelCase::hyperbolic(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = to_s(&sampling::sample_q(&case, 3, &mut rng));
        let omega = C64::from_f64(-0.4);
        let a1 = build_a(&case, &q, &RSpec::case_i(omega)).unwrap();
        let a2 = build_a(&case, &q, &RSpec::case_ii(omega)).unwrap();
        for k in 0..3 {
            let defect = a2.mats[k].clone() + a1.mats[k].dagger();
            assert!(defect.frobenius_norm() < 1e-13);
        }
    }

    #[test]
    fn zero_curvature_by_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for case in cases() {
            let q = sampling::sample_q_separated(&case, 3, &mut rng);
            for omega in [0.0, -1.0 / 3.0, 0.7] {
                let spec = RSpec::case_i(C64::from_f64(omega));
                let res = curvature_residual(&case, &q, &spec, false).unwrap();
                assert!(res < 1e-6, "case {:?} omega {omega}: {res}", case.kind());
            }
        }
    }

    #[test]
    fn phi_small_case_and_inverse() {
        let case = ModelCase::rational();
        // n = 2: phi = [[F2, F1], [1, 1]].
        let q = to_s(&[2.0, 0.5]);
        let (phi, phi_inv) = build_phi(&case, &q).unwrap();
        assert_eq!(*phi.at(0, 0), Complex64::new(2.0, 0.0)); // F(0.5)
        assert_eq!(*phi.at(0, 1), Complex64::new(0.5, 0.0)); // F(2)
        assert_eq!(*phi.at(1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(*phi.at(1, 1), Complex64::new(1.0, 0.0));
        let prod = phi.matmul(&phi_inv);
        assert!((prod - SquareMatrix::identity(2)).frobenius_norm() < 1e-14);

        // Exact inverse at n = 3.
        let q = exact_q(&[(5, 2), (4, 3), (1, 2)]);
        let (phi, phi_inv) = build_phi(&case, &q).unwrap();
        assert!(phi.matmul(&phi_inv) == SquareMatrix::identity(3));

        // Coincident node values are rejected.
        let q = to_s(&[1.0, 1.0 + 1e-12, 0.3]);
        assert!(matches!(
            build_phi(&case, &q),
            Err(CmrError::Degenerate(_))
        ));
    }

    #[test]
    fn phi_alternant_identity() {
        // sum_l (-F_i)^(l-1) phi_{lj} = prod_{tau != j} (F_tau - F_i).
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in cases() {
            let q = to_s(&sampling::sample_q(&case, 4, &mut rng));
            let f: Vec<C64> = q.iter().map(|x| case.f_s(x).unwrap()).collect();
            let (phi, _) = build_phi(&case, &q).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let mut lhs = Complex64::new(0.0, 0.0);
                    let mut pw = Complex64::new(1.0, 0.0);
                    for l in 0..4 {
                        lhs += pw * phi.at(l, j);
                        pw *= -f[i];
                    }
                    let mut rhs = Complex64::new(1.0, 0.0);
                    for (tau, ft) in f.iter().enumerate() {
                        if tau != j {
                            rhs *= ft - f[i];
                        }
                    }
                    assert!((lhs - rhs).norm() < 1e-10, "entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn chi_values() {
        let case = ModelCase::rational();
        let q = to_s(&[2.0, 1.0]);
        let chi = build_chi(&case, &q).unwrap();
        assert_eq!(*chi.at(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(*chi.at(1, 1), Complex64::new(2.0, 0.0));

        let trig = ModelCase::trigonometric(1.0).unwrap();
        let q = to_s(&[std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4]);
        let chi = build_chi(&trig, &q).unwrap();
        assert!((chi.at(0, 0).re - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-14);
        assert!((chi.at(1, 1).re - 1.0).abs() < 1e-14);
        assert!(chi.inverse().is_ok());
    }

    #[test]
    fn gauge_ode_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for case in cases() {
            let q = sampling::sample_q_separated(&case, 3, &mut rng);
            let g0 = SquareMatrix::<C64>::identity(3);
            for omega in [0.0, -1.0 / 3.0, 0.7] {
                let spec = RSpec::case_i(C64::from_f64(omega));
                let res = ode_residual(&case, &q, &spec, &g0, false).unwrap();
                assert!(res < 1e-6, "case {:?} omega {omega}: {res}", case.kind());
            }
            // Family II is inverse-built, so the finite-difference residual is
            // conditioning-limited; check the normalized defect instead. The
            // sharp consistency evidence is the algebraic potential duality
            // plus exact-mode constancy.
            let spec = RSpec::case_ii(C64::from_f64(0.5));
            let res = ode_residual(&case, &q, &spec, &g0, true).unwrap();
            let scale = build_g(&case, &q.iter().map(|x| C64::from_f64(*x)).collect::<Vec<_>>(), &spec, &g0)
                .unwrap()
                .frobenius_norm();
            assert!(res / scale < 1e-4, "family II case {:?}: {res} (scale {scale})", case.kind());
        }
    }

    #[test]
    fn omega_zero_gauge_is_phi_chi() {
        let case = ModelCase::hyperbolic(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let q = to_s(&sampling::sample_q(&case, 3, &mut rng));
        let g = build_g(
            &case,
            &q,
            &RSpec::case_i(C64::from_f64(0.0)),
            &SquareMatrix::identity(3),
        )
        .unwrap();
        let (phi, _) = build_phi(&case, &q).unwrap();
        let chi = build_chi(&case, &q).unwrap();
        assert!((g - phi.matmul(&chi)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn transformed_r_is_constant_and_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for case in cases() {
            for n in [2usize, 3] {
                let omega = C64::from_f64(0.3);
                let spec = RSpec::case_i(omega);
                let id = SquareMatrix::<C64>::identity(n);
                let mut transformed = Vec::new();
                for _ in 0..5 {
                    let q = to_s(&sampling::sample_q_separated(&case, n, &mut rng));
                    let r = crate::dynr::build_r_dynamical(&case, &q, &spec).unwrap();
                    transformed.push(transform_r(&r, &case, &q, &spec, &id).unwrap());
                }
                let first = transformed[0].clone();
                for t in &transformed[1..] {
                    let d = (t.clone() - first.clone()).frobenius_norm();
                    assert!(d < 1e-8, "case {:?} n {n}: drift {d}", case.kind());
                }
                // Matches the closed form, also through a random constant g0.
                let g0 = sampling::random_g0(n, &mut rng);
                let q = to_s(&sampling::sample_q_separated(&case, n, &mut rng));
                let r = crate::dynr::build_r_dynamical(&case, &q, &spec).unwrap();
                let through_g0 = transform_r(&r, &case, &q, &spec, &g0).unwrap();
                let want = build_r_prime(&case, n, &omega, &g0).unwrap();
                let d = (through_g0 - want.clone()).frobenius_norm();
                assert!(d < 1e-8, "case {:?} n {n}: {d}", case.kind());
                let want = build_r_prime(&case, n, &omega, &id).unwrap();
                let d = (first.clone() - want.clone()).frobenius_norm();
                assert!(d < 1e-8, "case {:?} n {n}: {d}", case.kind());
                // The closed form is exactly antisymmetric; the pipeline
                // output inherits it up to the conjugation conditioning.
                assert!((want.swap_factors() + want).frobenius_norm() < 1e-10);
                assert!((first.swap_factors() + first).frobenius_norm() < 1e-8);
                // Sharper statement: the conjugated combination is already
                // antisymmetric before conjugation.
                let q = to_s(&sampling::sample_q_separated(&case, n, &mut rng));
                let r = crate::dynr::build_r_dynamical(&case, &q, &spec).unwrap();
                let a = build_a(&case, &q, &spec).unwrap();
                let mut inner = r;
                for k in 1..=n {
                    inner = inner
                        + kron(&a.mats[k - 1], &SquareMatrix::h_k(k, n).unwrap()).unwrap();
                }
                let sym = inner.swap_factors() + inner;
                assert!(sym.frobenius_norm() < 1e-12, "case {:?} n {n}", case.kind());
            }
        }
    }

    #[test]
    fn transformed_r_is_constant_exactly_in_exact_mode() {
        let case = ModelCase::rational();
        let spec = RSpec::case_i(GaussRat::ratio(7, 10));
        let g0 = SquareMatrix::<GaussRat>::identity(3);
        let qs = [
            exact_q(&[(7, 4), (1, 1), (1, 4)]),
            exact_q(&[(2, 1), (5, 4), (3, 8)]),
            exact_q(&[(13, 8), (7, 8), (1, 2)]),
        ];
        let mut out = Vec::new();
        for q in &qs {
            let r = crate::dynr::build_r_dynamical(&case, q, &spec).unwrap();
            out.push(transform_r(&r, &case, q, &spec, &g0).unwrap());
        }
        assert!((out[1].clone() - out[0].clone()).is_zero());
        assert!((out[2].clone() - out[0].clone()).is_zero());
        // And equals the closed form exactly.
        let want = build_r_prime(&case, 3, &GaussRat::ratio(7, 10), &g0).unwrap();
        assert!((out[0].clone() - want).is_zero());
    }

    #[test]
    fn a_tilde_is_n_times_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for case in cases() {
            for n in [2usize, 3, 4] {
                let q = to_s(&sampling::sample_q_separated(&case, n, &mut rng));
                let at = a_tilde(&case, &q).unwrap();
                let want = build_x::<C64>(&case, n)
                    .unwrap()
                    .scale(&Complex64::new(n as f64, 0.0));
                let d = (at - want).frobenius_norm();
                assert!(d < 1e-9, "case {:?} n {n}: {d}", case.kind());
            }
        }
    }

    #[test]
    fn gauged_pair_satisfies_the_bracket_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for case in cases() {
            let n = 2;
            let (q, p) = sampling::sample_phase_point_separated(&case, n, &mut rng);
            let point = PhasePoint::from_reals(&q, &p).unwrap();
            let omega = C64::from_f64(0.3);
            let spec = RSpec::case_i(omega);
            let g0 = sampling::random_g0(n, &mut rng);
            let (l_prime, bracket) = gauged_lax_pair(&case, &point, &spec, &g0).unwrap();
            let r_prime = build_r_prime(&case, n, &omega, &g0).unwrap();
            let res = eq2_residual(&bracket, &l_prime, &r_prime).unwrap();
            assert!(res < 1e-8, "case {:?}: {res}", case.kind());
        }
        // Exactly, in exact mode.
        let case = ModelCase::rational();
        let q = exact_q(&[(3, 2), (1, 2)]);
        let p = vec![GaussRat::ratio(1, 4), GaussRat::ratio(-1, 2)];
        let point = PhasePoint::new(q, p).unwrap();
        let spec = RSpec::case_i(GaussRat::ratio(3, 10));
        let g0 = SquareMatrix::<GaussRat>::identity(2);
        let (l_prime, bracket) = gauged_lax_pair(&case, &point, &spec, &g0).unwrap();
        let r_prime = build_r_prime(&case, 2, &GaussRat::ratio(3, 10), &g0).unwrap();
        let defect = eq2_defect(&bracket, &l_prime, &r_prime).unwrap();
        assert!(defect.is_zero());
    }

    #[test]
    fn family_two_transform_is_constant() {
        let case = ModelCase::trigonometric(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let omega = C64::from_f64(0.25);
        let spec = RSpec::case_ii(omega);
        let g0 = SquareMatrix::<C64>::identity(2);
        let mut out = Vec::new();
        for _ in 0..4 {
            let q = to_s(&sampling::sample_q_separated(&case, 2, &mut rng));
            let r = crate::dynr::build_r_dynamical(&case, &q, &spec).unwrap();
            out.push(transform_r(&r, &case, &q, &spec, &g0).unwrap());
        }
        for t in &out[1..] {
            assert!((t.clone() - out[0].clone()).frobenius_norm() < 1e-8);
        }
    }

    #[test]
    fn closed_form_identity_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for case in cases() {
            for n in [2usize, 3, 4] {
                let q = to_s(&sampling::sample_q_separated(&case, n, &mut rng));
                let res = appendix_c_residual(&case, &q).unwrap();
                assert!(res < 1e-8, "case {:?} n {n}: {res}", case.kind());
            }
        }
        let q = exact_q(&[(9, 4), (3, 2), (3, 4)]);
        let defect = appendix_c_defect(&ModelCase::rational(), &q).unwrap();
        assert!(defect.is_zero());
    }
}
