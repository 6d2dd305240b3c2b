//! Verification suites behind `cmr verify`. Each suite yields a list of
//! checks; in float mode residuals are compared against tolerances, in exact
//! mode the defects must vanish identically and finite-difference checks are
//! reported as skipped.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use cmr::constr::{
    build_b_gln, build_b_gln_explicit, build_cg_suite, build_r_prime, build_tilde_r_prime,
    build_x, cybe_defect, enumerate_s, pair_adjoint, sigma_tensor, tilde_r_prime_sln,
    verify_cg_relations,
};
use cmr::dynr::{
    appendix_b_solve, build_r_dynamical, cartan_c_component, AppendixBReport, ComponentSystem,
    RFamily, RSpec,
};
use cmr::error::{CmrError, Result};
use cmr::gauge::{
    appendix_c_defect, a_tilde, build_chi, build_phi, curvature_residual, ode_residual,
    transform_r,
};
use cmr::jsonio::{Check, CheckStatus, VerifyReport};
use cmr::lax::{build_l, eq2_defect, poisson_bracket_ll, PhasePoint};
use cmr::matrix::{cond_frobenius, roots, SquareMatrix};
use cmr::potentials::{check_identities, identity_defects, CaseKind, ModelCase};
use cmr::sampling;
use cmr::scalar::{rational_from_str, C64, GaussRat, Scalar, ScalarMode};
use cmr::tensor::{wedge, Tensor2, Tensor3};

use crate::{parse_case, parse_f64, VerifyArgs};

const SUITES: &[&str] = &[
    "identities",
    "theorem1",
    "prop2",
    "appendixB",
    "theorem3",
    "prop4",
    "prop5",
    "appendixC",
    "theorem6",
    "cg",
    "cybe",
];

pub fn run(args: &VerifyArgs) -> Result<VerifyReport> {
    let case = parse_case(&args.common)?;
    if args.common.n < 2 {
        return Err(CmrError::Argument("need --n at least 2".into()));
    }
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            return Err(CmrError::Argument("tolerance must be positive".into()));
        }
    }
    let selected: Vec<&str> = if args.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&args.suite.as_str()) {
        vec![args.suite.as_str()]
    } else {
        return Err(CmrError::Argument(format!(
            "unknown suite {:?}; expected one of {:?} or \"all\"",
            args.suite, SUITES
        )));
    };

    let (checks, classification) = match args.common.mode.as_str() {
        "float" => Runner::<C64>::new(args, case)?.run(&selected),
        "exact" => {
            if case.kind() != CaseKind::Rational {
                return Err(CmrError::Argument(
                    "exact mode requires --case rational".into(),
                ));
            }
            Runner::<GaussRat>::new(args, case)?.run(&selected)
        }
        other => {
            return Err(CmrError::Argument(format!(
                "unknown mode {other:?}; expected float or exact"
            )))
        }
    };

    let mut report = VerifyReport::new(
        "verify",
        case.kind().tag(),
        args.common.n,
        &args.common.mode,
        args.common.seed,
        checks,
    );
    if !classification.is_empty() {
        report.classification = Some(classification);
    }
    Ok(report)
}

struct Runner<S: Scalar> {
    case: ModelCase,
    n: usize,
    seed: u64,
    samples: usize,
    alg_tol: f64,
    fd_tol: f64,
    omega: S,
    omega_f64: f64,
    family: RFamily,
    checks: Vec<Check>,
    classification: Vec<AppendixBReport>,
}

impl<S: Scalar> Runner<S> {
    fn new(args: &VerifyArgs, case: ModelCase) -> Result<Self> {
        let omega_f64 = parse_f64(&args.omega)?;
        let omega = match S::MODE {
            ScalarMode::Complex64 => S::from_f64(omega_f64),
            ScalarMode::ExactGaussian => S::from_big_rational(&rational_from_str(&args.omega)?),
        };
        Ok(Runner {
            case,
            n: args.common.n,
            seed: args.common.seed,
            samples: args.samples.max(1),
            alg_tol: args.tol.unwrap_or(1e-8),
            fd_tol: args.tol.unwrap_or(1e-6).max(1e-6),
            omega,
            omega_f64,
            family: RFamily::parse(&args.family)?,
            checks: Vec::new(),
            classification: Vec::new(),
        })
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn run(mut self, selected: &[&str]) -> (Vec<Check>, Vec<AppendixBReport>) {
        for suite in selected {
            let res = match *suite {
                "identities" => self.suite_identities(),
                "theorem1" => self.suite_theorem1(),
                "prop2" => self.suite_prop2(),
                "appendixB" => self.suite_appendix_b(),
                "theorem3" => self.suite_theorem3(),
                "prop4" => self.suite_prop4(),
                "prop5" => self.suite_prop5(),
                "appendixC" => self.suite_appendix_c(),
                "theorem6" => self.suite_theorem6(),
                "cg" => self.suite_cg(),
                "cybe" => self.suite_cybe(),
                _ => unreachable!("suite names validated earlier"),
            };
            if let Err(e) = res {
                self.checks.push(Check {
                    suite: suite.to_string(),
                    name: "suite execution".into(),
                    residual: None,
                    tolerance: None,
                    status: CheckStatus::Fail,
                    note: Some(e.to_string()),
                });
            }
        }
        (self.checks, self.classification)
    }

    fn is_exact() -> bool {
        S::MODE == ScalarMode::ExactGaussian
    }

    /// Sample admissible coordinates in the active scalar field.
    fn sample_q(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<S> {
        match S::MODE {
            ScalarMode::Complex64 => sampling::sample_q(&self.case, n, rng)
                .into_iter()
                .map(S::from_f64)
                .collect(),
            ScalarMode::ExactGaussian => sampling::sample_q_exact(n, rng)
                .into_iter()
                .map(|r| S::from_big_rational(&r))
                .collect(),
        }
    }

    fn sample_q_separated(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<S> {
        match S::MODE {
            ScalarMode::Complex64 => sampling::sample_q_separated(&self.case, n, rng)
                .into_iter()
                .map(S::from_f64)
                .collect(),
            ScalarMode::ExactGaussian => self.sample_q(rng, n),
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng, n: usize) -> PhasePoint<S> {
        let q = self.sample_q(rng, n);
        let p = match S::MODE {
            ScalarMode::Complex64 => (0..n)
                .map(|_| S::from_f64(rng.gen_range(-1.0..1.0)))
                .collect(),
            ScalarMode::ExactGaussian => (0..n)
                .map(|_| {
                    let v = (rng.gen_range(-1.0..1.0f64) * 64.0).round() as i64;
                    S::from_ratio(v, 64)
                })
                .collect(),
        };
        PhasePoint::new(q, p).expect("sampled point is well-formed")
    }

    fn push_norm(&mut self, suite: &str, name: &str, norm: f64, is_zero: bool, tol: f64) {
        self.checks.push(match S::MODE {
            ScalarMode::ExactGaussian => Check::from_exact(suite, name, is_zero),
            ScalarMode::Complex64 => Check::from_residual(suite, name, norm, tol),
        });
    }

    fn push_t2(&mut self, suite: &str, name: &str, defect: &Tensor2<S>, tol: f64) {
        self.push_norm(suite, name, defect.frobenius_norm(), defect.is_zero(), tol);
    }

    fn push_t3(&mut self, suite: &str, name: &str, defect: &Tensor3<S>, tol: f64) {
        self.push_norm(suite, name, defect.frobenius_norm(), defect.is_zero(), tol);
    }

    fn push_mat(&mut self, suite: &str, name: &str, defect: &SquareMatrix<S>, tol: f64) {
        self.push_norm(suite, name, defect.frobenius_norm(), defect.is_zero(), tol);
    }

    fn skip_fd(&mut self, suite: &str, name: &str) {
        self.checks.push(Check::skipped(
            suite,
            name,
            "finite-difference check runs in float mode only",
        ));
    }

    /// Check whose float accuracy is limited by a conjugation: pass within
    /// tolerance, skip when the defect is inside the conditioning bound,
    /// fail only beyond it.
    fn push_conjugation(&mut self, suite: &str, name: &str, norm: f64, is_zero: bool, bound: f64) {
        if Self::is_exact() {
            self.checks.push(Check::from_exact(suite, name, is_zero));
            return;
        }
        if norm <= self.alg_tol || norm > bound {
            self.checks
                .push(Check::from_residual(suite, name, norm, self.alg_tol));
        } else {
            self.checks.push(Check::skipped(
                suite,
                name,
                &format!(
                    "defect {:.2e} is inside the float conditioning bound {:.2e}; \
                     unresolvable at tolerance {:.0e} (exact mode proves it sharply)",
                    norm, bound, self.alg_tol
                ),
            ));
        }
    }

    // --- suites ---------------------------------------------------------

    fn suite_identities(&mut self) -> Result<()> {
        let suite = "identities";
        let mut rng = self.rng(1);
        if Self::is_exact() {
            self.skip_fd(suite, "derivative identity (finite differences)");
            let mut worst = [0.0f64; 4];
            let mut zero = [true; 4];
            for _ in 0..self.samples.min(10) {
                let q = self.sample_q(&mut rng, 2);
                let (x, y) = (q[0].clone(), q[1].clone());
                let d = identity_defects(&self.case, &x, &y)?;
                for (i, v) in d.iter().enumerate() {
                    worst[i] = worst[i].max(v.abs());
                    zero[i] &= v.is_zero();
                }
                let w = self.case.w_s(&x)?;
                let dvw = self.case.v_s(&x)? - w.clone() * w;
                worst[3] = worst[3].max(dvw.abs());
                zero[3] &= dvw.is_zero();
            }
            let names = [
                "derivative identity (analytic)",
                "addition identity",
                "constant identity",
                "v equals w squared",
            ];
            for (i, name) in names.iter().enumerate() {
                self.push_norm(suite, name, worst[i], zero[i], self.alg_tol);
            }
            return Ok(());
        }

        let scale = match self.case.kind() {
            CaseKind::Trigonometric => std::f64::consts::PI / (4.0 * self.case.coupling()),
            _ => 1.0,
        };
        let mut worst = [0.0f64; 3];
        let mut worst_vw = 0.0f64;
        let mut done = 0;
        while done < self.samples {
            let x: f64 = rng.gen_range(0.25..1.1) * scale;
            let y: f64 = rng.gen_range(0.25..1.1) * scale;
            if (x - y).abs() < 0.05 * scale {
                continue;
            }
            let [_, r2, r3] = check_identities(&self.case, x, y)?;
            let r1 = cmr::potentials::derivative_identity_residual(&self.case, x, true)?;
            worst[0] = worst[0].max(r1);
            worst[1] = worst[1].max(r2);
            worst[2] = worst[2].max(r3);
            let w = self.case.w(x)?;
            worst_vw = worst_vw.max((self.case.v(x)? - w * w).abs() / (w * w));
            done += 1;
        }
        self.checks.push(Check::from_residual(
            suite,
            "derivative identity (finite differences)",
            worst[0],
            self.fd_tol,
        ));
        self.checks.push(Check::from_residual(
            suite,
            "addition identity",
            worst[1],
            self.alg_tol,
        ));
        self.checks.push(Check::from_residual(
            suite,
            "constant identity",
            worst[2],
            self.alg_tol,
        ));
        self.checks.push(Check::from_residual(
            suite,
            "v equals w squared",
            worst_vw,
            self.alg_tol,
        ));
        Ok(())
    }

    fn suite_theorem1(&mut self) -> Result<()> {
        let suite = "theorem1";
        let mut rng = self.rng(2);
        let count = if Self::is_exact() {
            self.samples.min(3)
        } else {
            self.samples
        };
        for family in [RFamily::AvanTalon, RFamily::CaseI, RFamily::CaseII] {
            let mut worst = 0.0f64;
            let mut all_zero = true;
            for _ in 0..count {
                let point = self.sample_point(&mut rng, self.n);
                let spec = RSpec {
                    family,
                    omega: self.omega.clone(),
                };
                let r = build_r_dynamical(&self.case, &point.q, &spec)?;
                let l = build_l(&self.case, &point)?;
                let bracket = poisson_bracket_ll(&self.case, &point.q)?;
                let defect = eq2_defect(&bracket, &l, &r)?;
                worst = worst.max(defect.frobenius_norm());
                all_zero &= defect.is_zero();
            }
            self.push_norm(
                suite,
                &format!("linear bracket relation, family {}", family.tag()),
                worst,
                all_zero,
                self.alg_tol,
            );
        }
        Ok(())
    }

    fn suite_prop2(&mut self) -> Result<()> {
        let suite = "prop2";
        let mut rng = self.rng(3);
        let q = self.sample_q(&mut rng, self.n);
        for family in [RFamily::CaseI, RFamily::CaseII] {
            let sys = ComponentSystem::new(&self.case, &q)?;
            let mut worst = 0.0f64;
            let mut all_zero = true;
            let omegas: Vec<S> = if Self::is_exact() {
                vec![
                    self.omega.clone(),
                    S::from_ratio(-1, 3),
                    S::from_ratio(37, 100),
                ]
            } else {
                (0..self.samples)
                    .map(|_| S::from_f64(sampling::sample_omega(&mut rng)))
                    .collect()
            };
            for omega in &omegas {
                let (b, c) = sys.family_arrays(family, omega)?;
                let comps = sys.components(&b, &c);
                worst = worst.max(comps.iter().map(|v| v.abs_sq()).sum::<f64>().sqrt());
                all_zero &= comps.iter().all(|v| v.is_zero());
            }
            self.push_norm(
                suite,
                &format!("component equations, family {}", family.tag()),
                worst,
                all_zero,
                self.alg_tol,
            );
        }
        // Root-pair consistency of the Cartan coefficients, in integers.
        let mut ok = true;
        for family in [RFamily::CaseI, RFamily::CaseII] {
            for alpha in roots(self.n) {
                for i in 1..=self.n {
                    ok &= cartan_c_component(family, &alpha, i)
                        == -cartan_c_component(family, &alpha.negated(), i);
                }
                for beta in roots(self.n) {
                    let lhs: i64 = (1..=self.n)
                        .map(|i| beta.component(i) * cartan_c_component(family, &alpha, i))
                        .sum();
                    let rhs: i64 = (1..=self.n)
                        .map(|i| alpha.component(i) * cartan_c_component(family, &beta, i))
                        .sum();
                    ok &= lhs == rhs;
                }
            }
        }
        self.checks
            .push(Check::from_exact(suite, "root-pair consistency conditions", ok));
        Ok(())
    }

    fn suite_appendix_b(&mut self) -> Result<()> {
        let suite = "appendixB";
        if Self::is_exact() {
            self.checks.push(Check::skipped(
                suite,
                "random-start classification probe",
                "the probe is a float-mode diagnostic",
            ));
            return Ok(());
        }
        if !(2..=4).contains(&self.n) {
            self.checks.push(Check::skipped(
                suite,
                "random-start classification probe",
                "probe supports n in 2..=4",
            ));
            return Ok(());
        }
        let trials = (self.samples * 10).max(100);
        match appendix_b_solve(self.n, &self.case, trials, self.seed) {
            Ok(report) => {
                let ok = report.other == 0 && report.converged > 0;
                self.checks.push(Check {
                    suite: suite.into(),
                    name: "random-start classification probe".into(),
                    residual: Some(format!("{} unclassified", report.other)),
                    tolerance: None,
                    status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                    note: Some(format!(
                        "{}/{} starts converged into families I/II",
                        report.converged, report.trials
                    )),
                });
                self.classification.push(report);
            }
            Err(e) => {
                self.checks.push(Check {
                    suite: suite.into(),
                    name: "random-start classification probe".into(),
                    residual: None,
                    tolerance: None,
                    status: CheckStatus::Fail,
                    note: Some(e.to_string()),
                });
            }
        }
        Ok(())
    }

    fn suite_theorem3(&mut self) -> Result<()> {
        let suite = "theorem3";
        if Self::is_exact() {
            self.skip_fd(suite, "zero curvature (finite differences)");
            return Ok(());
        }
        let mut rng = self.rng(4);
        let q = sampling::sample_q_separated(&self.case, self.n, &mut rng);
        let mut worst = 0.0f64;
        for omega in [0.0, -1.0 / 3.0, 0.7] {
            let spec = RSpec::case_i(Complex64::new(omega, 0.0));
            worst = worst.max(curvature_residual(&self.case, &q, &spec, true)?);
        }
        self.checks.push(Check::from_residual(
            suite,
            "zero curvature (finite differences)",
            worst,
            self.fd_tol,
        ));
        Ok(())
    }

    fn suite_prop4(&mut self) -> Result<()> {
        let suite = "prop4";
        let mut rng = self.rng(5);
        if Self::is_exact() {
            self.skip_fd(suite, "gauge factor solves its defining system (finite differences)");
        } else {
            let q = sampling::sample_q_separated(&self.case, self.n, &mut rng);
            let spec = RSpec::case_i(Complex64::new(0.0, 0.0));
            let res = ode_residual(
                &self.case,
                &q,
                &spec,
                &SquareMatrix::identity(self.n),
                false,
            )?;
            self.checks.push(Check::from_residual(
                suite,
                "gauge factor solves its defining system (finite differences)",
                res,
                self.fd_tol,
            ));
        }

        let q = self.sample_q_separated(&mut rng, self.n);
        let (phi, phi_inv) = build_phi(&self.case, &q)?;
        let defect = phi.matmul(&phi_inv) - SquareMatrix::identity(self.n);
        self.push_mat(suite, "diagonalizer inverse identity", &defect, self.alg_tol);

        // Alternant identity behind the explicit inverse.
        let f: Vec<S> = q.iter().map(|x| self.case.f_s(x)).collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        let mut all_zero = true;
        for i in 0..self.n {
            for j in 0..self.n {
                let mut lhs = S::zero();
                let mut pw = S::one();
                for l in 0..self.n {
                    lhs = lhs + pw.clone() * phi.at(l, j).clone();
                    pw = pw * (-f[i].clone());
                }
                let mut rhs = S::one();
                for (tau, ft) in f.iter().enumerate() {
                    if tau != j {
                        rhs = rhs * (ft.clone() - f[i].clone());
                    }
                }
                let d = lhs - rhs;
                worst = worst.max(d.abs());
                all_zero &= d.is_zero();
            }
        }
        self.push_norm(suite, "alternant identity", worst, all_zero, self.alg_tol);

        let chi = build_chi(&self.case, &q)?;
        let ok = chi.inverse().is_ok();
        self.checks
            .push(Check::from_exact(suite, "normalizer invertible", ok));
        Ok(())
    }

    fn suite_prop5(&mut self) -> Result<()> {
        let suite = "prop5";
        let n = self.n;
        let b_coef = self.case.b_scalar::<S>()?;
        let t = build_tilde_r_prime::<S>(&self.case, n)?;
        let b = build_b_gln::<S>(n)?;
        let split = t.clone() - (b.scale(&b_coef) + sigma_tensor(&b));
        self.push_t2(suite, "quadruple split into Frobenius part and reflection", &split, self.alg_tol);

        let explicit = build_b_gln_explicit::<S>(n)?;
        self.push_t2(
            suite,
            "explicit double-sum form of the Frobenius solution",
            &(b.clone() - explicit),
            self.alg_tol,
        );

        let mut shifted = Tensor2::<S>::zeros(n);
        for (a, bb, c, d) in enumerate_s(n) {
            let e1 = SquareMatrix::elementary(a + 1, bb, n)?;
            let e2 = SquareMatrix::elementary(c + 1, d, n)?;
            shifted = shifted + wedge(&e1, &e2)?;
        }
        self.push_t2(
            suite,
            "reflection image of the shifted sum",
            &(shifted + sigma_tensor(&b)),
            self.alg_tol,
        );

        self.push_t3(
            suite,
            "Frobenius solution solves the unmodified equation",
            &cybe_defect(&b, &S::zero()),
            self.alg_tol,
        );

        // Pipeline cross-check at Omega = 0.
        let mut rng = self.rng(6);
        let q = self.sample_q_separated(&mut rng, n);
        let spec = RSpec {
            family: RFamily::CaseI,
            omega: S::zero(),
        };
        let id = SquareMatrix::identity(n);
        let r = build_r_dynamical(&self.case, &q, &spec)?;
        let transformed = transform_r(&r, &self.case, &q, &spec, &id)?;
        let bound = if Self::is_exact() {
            0.0
        } else {
            let g = cmr::gauge::build_g(&self.case, &q, &spec, &id)?;
            let kappa = cond_frobenius(&g.to_c64()).unwrap_or(f64::INFINITY);
            50.0 * f64::EPSILON * kappa * kappa * t.frobenius_norm().max(1.0)
        };
        let d = transformed - t;
        self.push_conjugation(
            suite,
            "gauge pipeline at Omega 0 reproduces the constant",
            d.frobenius_norm(),
            d.is_zero(),
            bound,
        );
        Ok(())
    }

    fn suite_appendix_c(&mut self) -> Result<()> {
        let suite = "appendixC";
        let mut rng = self.rng(7);
        let mut worst = 0.0f64;
        let mut all_zero = true;
        for _ in 0..self.samples.min(5) {
            let q = self.sample_q_separated(&mut rng, self.n);
            let defect = appendix_c_defect(&self.case, &q)?;
            worst = worst.max(defect.frobenius_norm());
            all_zero &= defect.is_zero();
        }
        self.push_norm(
            suite,
            "diagonalizer intertwines the node combination with the constant",
            worst,
            all_zero,
            self.alg_tol,
        );
        Ok(())
    }

    fn suite_theorem6(&mut self) -> Result<()> {
        let suite = "theorem6";
        let n = self.n;
        let mut rng = self.rng(8);
        if Self::is_exact() {
            self.skip_fd(suite, "full gauge factor solves its defining system (finite differences)");
        } else {
            let q = sampling::sample_q_separated(&self.case, n, &mut rng);
            let spec = RSpec::case_i(Complex64::new(self.omega_f64, 0.0));
            let id = SquareMatrix::identity(n);
            let res = ode_residual(&self.case, &q, &spec, &id, false)?;
            // The defect is linear in the scale of g, which grows with the
            // strength of the exponential factor; report it relative.
            let qs: Vec<Complex64> = q.iter().map(|x| Complex64::new(*x, 0.0)).collect();
            let g_norm = cmr::gauge::build_g(&self.case, &qs, &spec, &id)?.frobenius_norm();
            self.checks.push(Check::from_residual(
                suite,
                "full gauge factor solves its defining system (relative, finite differences)",
                res / g_norm.max(1.0),
                self.fd_tol,
            ));
        }

        let spec = RSpec {
            family: self.family,
            omega: self.omega.clone(),
        };
        let spec = if spec.family == RFamily::AvanTalon {
            RSpec {
                family: RFamily::CaseI,
                omega: self.omega.clone(),
            }
        } else {
            spec
        };
        let id = SquareMatrix::<S>::identity(n);
        let count = if Self::is_exact() { 3 } else { self.samples.min(20).max(2) };
        let mut transformed = Vec::new();
        // The conjugation loses about kappa(g)^2 digits in float, so keep an
        // a-posteriori bound on what the computation can resolve; a defect
        // beyond the bound is a genuine failure, one inside it is reported
        // as unresolvable (exact mode proves the identity sharply).
        let mut cond_bound = 0.0f64;
        let mut scale = 0.0f64;
        for _ in 0..count {
            let q = self.sample_q_separated(&mut rng, n);
            let r = build_r_dynamical(&self.case, &q, &spec)?;
            if !Self::is_exact() {
                let g = cmr::gauge::build_g(&self.case, &q, &spec, &id)?;
                let kappa = cond_frobenius(&g.to_c64()).unwrap_or(f64::INFINITY);
                cond_bound = cond_bound.max(kappa * kappa);
            }
            let t = transform_r(&r, &self.case, &q, &spec, &id)?;
            scale = scale.max(t.frobenius_norm());
            transformed.push(t);
        }
        cond_bound *= 50.0 * f64::EPSILON * scale.max(1.0);
        let first = transformed[0].clone();
        let mut drift = 0.0f64;
        let mut all_zero = true;
        for t in &transformed[1..] {
            let d = t.clone() - first.clone();
            drift = drift.max(d.frobenius_norm());
            all_zero &= d.is_zero();
        }
        self.push_conjugation(
            suite,
            "transformed r-matrix is constant",
            drift,
            all_zero,
            cond_bound,
        );

        if spec.family == RFamily::CaseI {
            let closed = build_r_prime(&self.case, n, &self.omega, &id)?;
            let d = first.clone() - closed;
            self.push_conjugation(
                suite,
                "matches the closed-form constant",
                d.frobenius_norm(),
                d.is_zero(),
                cond_bound,
            );
        } else {
            self.checks.push(Check::skipped(
                suite,
                "matches the closed-form constant",
                "closed form is stated for family I; family II follows by duality",
            ));
        }
        let d = first.swap_factors() + first;
        self.push_conjugation(
            suite,
            "factor-swap antisymmetry",
            d.frobenius_norm(),
            d.is_zero(),
            cond_bound,
        );

        let q = self.sample_q_separated(&mut rng, n);
        let at = a_tilde(&self.case, &q)?;
        let want = build_x::<S>(&self.case, n)?.scale(&S::from_int(n as i64));
        self.push_mat(suite, "conjugated coupling matrix is n times the shift element", &(at - want), self.alg_tol);

        let sln = tilde_r_prime_sln::<S>(&self.case, n)?;
        let x = build_x::<S>(&self.case, n)?;
        self.push_t2(
            suite,
            "shift element commutes with the traceless part",
            &pair_adjoint(&x, &sln)?,
            self.alg_tol,
        );

        let special = build_r_prime(&self.case, n, &S::from_ratio(-1, n as i64), &id)?;
        let p1 = special.partial_trace_1();
        let p2 = special.partial_trace_2();
        self.push_norm(
            suite,
            "partial traces vanish at the traceless parameter point",
            p1.frobenius_norm().max(p2.frobenius_norm()),
            p1.is_zero() && p2.is_zero(),
            self.alg_tol,
        );
        let generic = build_r_prime(
            &self.case,
            n,
            &(S::from_ratio(-1, n as i64) + S::from_ratio(1, 5)),
            &id,
        )?;
        let nonvanish = generic.partial_trace_1().frobenius_norm() > 1e-3
            || generic.partial_trace_2().frobenius_norm() > 1e-3;
        self.checks.push(Check::from_exact(
            suite,
            "partial traces do not vanish away from it",
            nonvanish,
        ));
        Ok(())
    }

    fn suite_cg(&mut self) -> Result<()> {
        let checks = verify_cg_relations::<S>(&self.case, self.n, &self.omega)?;
        self.checks.extend(checks);
        Ok(())
    }

    fn suite_cybe(&mut self) -> Result<()> {
        let suite = "cybe";
        let n = self.n;
        let b_coef = self.case.b_scalar::<S>()?;
        let t = build_tilde_r_prime::<S>(&self.case, n)?;
        self.push_t3(
            suite,
            "constant r-matrix solves the modified equation",
            &cybe_defect(&t, &b_coef),
            self.alg_tol,
        );

        let mut rng = self.rng(9);
        let g0: SquareMatrix<S> = match S::MODE {
            ScalarMode::Complex64 => {
                sampling::random_g0(n, &mut rng).map(|z| S::from_c64(*z))
            }
            ScalarMode::ExactGaussian => {
                // Deterministic exactly invertible lower-triangular constant.
                SquareMatrix::from_fn(n, |i, j| {
                    if i == j {
                        S::one()
                    } else if i > j {
                        S::from_int((i - j) as i64)
                    } else {
                        S::zero()
                    }
                })
            }
        };
        let rp = build_r_prime(&self.case, n, &self.omega, &g0)?;
        self.push_t3(
            suite,
            "conjugated family solves the modified equation",
            &cybe_defect(&rp, &b_coef),
            self.alg_tol,
        );

        let b = build_b_gln::<S>(n)?;
        self.push_t3(
            suite,
            "Frobenius solution, unmodified equation",
            &cybe_defect(&b, &S::zero()),
            self.alg_tol,
        );
        let cg = build_cg_suite::<S>(n)?;
        self.push_t3(
            suite,
            "flanking element b+, unmodified equation",
            &cybe_defect(&cg.b_plus, &S::zero()),
            self.alg_tol,
        );
        self.push_t3(
            suite,
            "flanking element b-, unmodified equation",
            &cybe_defect(&cg.b_minus, &S::zero()),
            self.alg_tol,
        );
        self.push_t3(
            suite,
            "Cremmer-Gervais element at unit normalization",
            &cybe_defect(&cg.r_cg, &S::one()),
            self.alg_tol,
        );
        Ok(())
    }
}
