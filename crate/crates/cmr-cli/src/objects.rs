//! `cmr build`: construct a named matrix object and render it in the JSON
//! matrix schema, deterministically for a given seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use cmr::constr::{build_b_gln, build_cg_suite, build_fhat, build_r_prime, build_tilde_r_prime, build_x};
use cmr::dynr::{build_r_dynamical, RFamily, RSpec};
use cmr::error::{CmrError, Result};
use cmr::gauge::{build_a, build_chi, build_g, build_phi};
use cmr::jsonio::{square_to_json, tensor2_to_json, tensor3_to_json, MatrixJson};
use cmr::lax::{build_l, PhasePoint};
use cmr::matrix::SquareMatrix;
use cmr::potentials::ModelCase;
use cmr::sampling;
use cmr::scalar::{rational_from_str, C64, GaussRat, Scalar, ScalarMode};

use crate::{parse_case, parse_f64, BuildArgs};

const OBJECTS: &[&str] = &[
    "L",
    "r_dyn",
    "A",
    "phi",
    "chi",
    "g",
    "r_tilde_prime",
    "r_prime",
    "b_gln",
    "X",
    "r_cg",
    "b_cg_plus",
    "b_cg_minus",
    "Fhat",
];

pub fn build_object(args: &BuildArgs) -> Result<String> {
    if !OBJECTS.contains(&args.object.as_str()) {
        return Err(CmrError::Argument(format!(
            "unknown object {:?}; expected one of {OBJECTS:?}",
            args.object
        )));
    }
    let case = parse_case(&args.common)?;
    let value = match args.common.mode.as_str() {
        "float" => build_generic::<C64>(args, &case)?,
        "exact" => {
            if case.kind() != cmr::potentials::CaseKind::Rational {
                return Err(CmrError::Argument(
                    "exact mode requires --case rational".into(),
                ));
            }
            build_generic::<GaussRat>(args, &case)?
        }
        other => {
            return Err(CmrError::Argument(format!(
                "unknown mode {other:?}; expected float or exact"
            )))
        }
    };
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|e| CmrError::Diagnostic(format!("serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn parse_scalar_list<S: Scalar>(s: &str) -> Result<Vec<S>> {
    s.split(',')
        .map(|t| match S::MODE {
            ScalarMode::Complex64 => Ok(S::from_f64(parse_f64(t.trim())?)),
            ScalarMode::ExactGaussian => Ok(S::from_big_rational(&rational_from_str(t.trim())?)),
        })
        .collect()
}

struct Inputs<S> {
    q: Option<Vec<S>>,
    p: Option<Vec<S>>,
}

fn gather_inputs<S: Scalar>(args: &BuildArgs, case: &ModelCase, n: usize) -> Result<Inputs<S>> {
    if args.random {
        let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
        let (q, p) = match S::MODE {
            ScalarMode::Complex64 => {
                let (q, p) = sampling::sample_phase_point(case, n, &mut rng);
                (
                    q.into_iter().map(S::from_f64).collect::<Vec<S>>(),
                    p.into_iter().map(S::from_f64).collect::<Vec<S>>(),
                )
            }
            ScalarMode::ExactGaussian => {
                let q = sampling::sample_q_exact(n, &mut rng)
                    .into_iter()
                    .map(|r| S::from_big_rational(&r))
                    .collect::<Vec<S>>();
                let p = (0..n)
                    .map(|_| {
                        let v = (rng.gen_range(-1.0..1.0f64) * 64.0).round() as i64;
                        S::from_ratio(v, 64)
                    })
                    .collect();
                (q, p)
            }
        };
        return Ok(Inputs {
            q: Some(q),
            p: Some(p),
        });
    }
    let q = args.q.as_deref().map(parse_scalar_list::<S>).transpose()?;
    let p = args.p.as_deref().map(parse_scalar_list::<S>).transpose()?;
    for v in [&q, &p].into_iter().flatten() {
        if v.len() != n {
            return Err(CmrError::Argument(format!(
                "expected {n} comma-separated values"
            )));
        }
    }
    Ok(Inputs { q, p })
}

fn need_q<S: Scalar>(inputs: &Inputs<S>) -> Result<&Vec<S>> {
    inputs
        .q
        .as_ref()
        .ok_or_else(|| CmrError::Argument("this object needs --q (or --random)".into()))
}

fn build_generic<S: Scalar>(args: &BuildArgs, case: &ModelCase) -> Result<serde_json::Value> {
    let n = args.common.n;
    if n < 2 {
        return Err(CmrError::Argument("need --n at least 2".into()));
    }
    let family = RFamily::parse(&args.family)?;
    let omega: S = match S::MODE {
        ScalarMode::Complex64 => S::from_f64(parse_f64(&args.omega)?),
        ScalarMode::ExactGaussian => S::from_big_rational(&rational_from_str(&args.omega)?),
    };
    let spec = RSpec {
        family,
        omega: omega.clone(),
    };
    let inputs = gather_inputs::<S>(args, case, n)?;
    let single = |m: MatrixJson| -> Result<serde_json::Value> {
        serde_json::to_value(m).map_err(|e| CmrError::Diagnostic(e.to_string()))
    };

    match args.object.as_str() {
        "L" => {
            let q = need_q(&inputs)?.clone();
            let p = inputs
                .p
                .clone()
                .ok_or_else(|| CmrError::Argument("L needs --p (or --random)".into()))?;
            let point = PhasePoint::new(q, p)?;
            single(square_to_json(&build_l(case, &point)?))
        }
        "r_dyn" => {
            let q = need_q(&inputs)?;
            single(tensor2_to_json(&build_r_dynamical(case, q, &spec)?))
        }
        "A" => {
            let q = need_q(&inputs)?;
            let a = build_a(case, q, &spec)?;
            let list: Vec<MatrixJson> = a.mats.iter().map(square_to_json).collect();
            serde_json::to_value(list).map_err(|e| CmrError::Diagnostic(e.to_string()))
        }
        "phi" => {
            let q = need_q(&inputs)?;
            single(square_to_json(&build_phi(case, q)?.0))
        }
        "chi" => {
            let q = need_q(&inputs)?;
            single(square_to_json(&build_chi(case, q)?))
        }
        "g" => {
            let q = need_q(&inputs)?;
            single(square_to_json(&build_g(
                case,
                q,
                &spec,
                &SquareMatrix::identity(n),
            )?))
        }
        "r_tilde_prime" => single(tensor2_to_json(&build_tilde_r_prime::<S>(case, n)?)),
        "r_prime" => single(tensor2_to_json(&build_r_prime(
            case,
            n,
            &omega,
            &SquareMatrix::identity(n),
        )?)),
        "b_gln" => single(tensor2_to_json(&build_b_gln::<S>(n)?)),
        "X" => single(square_to_json(&build_x::<S>(case, n)?)),
        "r_cg" => single(tensor2_to_json(&build_cg_suite::<S>(n)?.r_cg)),
        "b_cg_plus" => single(tensor2_to_json(&build_cg_suite::<S>(n)?.b_plus)),
        "b_cg_minus" => single(tensor2_to_json(&build_cg_suite::<S>(n)?.b_minus)),
        "Fhat" => single(tensor3_to_json(&build_fhat::<S>(n))),
        _ => unreachable!("object names validated earlier"),
    }
}
