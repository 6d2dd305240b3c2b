//! Dense square matrices over a [`Scalar`] field and the `gl_n` basis
//! conventions used throughout: elementary matrices `e_{kl}`, the Cartan
//! elements `H_k`, and per-root combinations `E_alpha`, `H_alpha`, `K_alpha`.

use num_complex::Complex64;

use crate::error::{CmrError, Result};
use crate::scalar::{Scalar, C64};

/// A root `alpha = lambda_k - lambda_l` of `gl_n`, stored as the ordered pair
/// of 1-based indices `(k, l)` with `k != l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Root {
    pub k: usize,
    pub l: usize,
}

impl Root {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k == l || k == 0 || l == 0 {
            return Err(CmrError::Argument(format!(
                "root indices must be distinct and 1-based, got ({k},{l})"
            )));
        }
        Ok(Root { k, l })
    }

    pub fn negated(&self) -> Root {
        Root {
            k: self.l,
            l: self.k,
        }
    }

    /// Component `alpha_i = delta_{ik} - delta_{il}` (1-based `i`).
    pub fn component(&self, i: usize) -> i64 {
        (i == self.k) as i64 - (i == self.l) as i64
    }

    /// Value `alpha(q) = q_k - q_l`.
    pub fn eval<S: Scalar>(&self, q: &[S]) -> S {
        q[self.k - 1].clone() - q[self.l - 1].clone()
    }

    /// Root sum, when it is again a root.
    pub fn try_add(&self, other: &Root) -> Option<Root> {
        if self.l == other.k && self.k != other.l {
            Some(Root {
                k: self.k,
                l: other.l,
            })
        } else if self.k == other.l && self.l != other.k {
            Some(Root {
                k: other.k,
                l: self.l,
            })
        } else {
            None
        }
    }
}

/// All `n(n-1)` roots of `gl_n` in a fixed row-major order.
pub fn roots(n: usize) -> Vec<Root> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1));
    for k in 1..=n {
        for l in 1..=n {
            if k != l {
                out.push(Root { k, l });
            }
        }
    }
    out
}

/// Positive roots `lambda_k - lambda_l` with `k < l`.
pub fn positive_roots(n: usize) -> Vec<Root> {
    let mut out = Vec::new();
    for k in 1..=n {
        for l in (k + 1)..=n {
            out.push(Root { k, l });
        }
    }
    out
}

/// Structure constant `c` in `[E_alpha, E_beta] = c E_{alpha+beta}` when
/// `alpha + beta` is a root; `None` otherwise.
pub fn structure_constant(alpha: &Root, beta: &Root) -> Option<(Root, i64)> {
    // [e_{kl}, e_{mj}] = delta_{lm} e_{kj} - delta_{jk} e_{ml}
    if alpha.l == beta.k && alpha.k != beta.l {
        Some((
            Root {
                k: alpha.k,
                l: beta.l,
            },
            1,
        ))
    } else if beta.l == alpha.k && beta.k != alpha.l {
        Some((
            Root {
                k: beta.k,
                l: alpha.l,
            },
            -1,
        ))
    } else {
        None
    }
}

/// Dense row-major square matrix with entries in one scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> SquareMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(CmrError::Argument("ragged matrix rows".into()));
        }
        Ok(SquareMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Elementary matrix `e_{kl}` (1-based indices).
    pub fn elementary(k: usize, l: usize, n: usize) -> Result<Self> {
        if k == 0 || l == 0 || k > n || l > n {
            return Err(CmrError::Argument(format!(
                "elementary index ({k},{l}) out of range for n = {n}"
            )));
        }
        let mut m = Self::zeros(n);
        m.data[(k - 1) * n + (l - 1)] = S::one();
        Ok(m)
    }

    /// Diagonal unit `H_k = e_{kk}`.
    pub fn h_k(k: usize, n: usize) -> Result<Self> {
        Self::elementary(k, k, n)
    }

    /// Root vector `E_alpha = e_{kl}`.
    pub fn e_root(alpha: &Root, n: usize) -> Result<Self> {
        Self::elementary(alpha.k, alpha.l, n)
    }

    /// Cartan element `H_alpha = e_{kk} - e_{ll}`.
    pub fn h_root(alpha: &Root, n: usize) -> Result<Self> {
        Ok(Self::elementary(alpha.k, alpha.k, n)? - Self::elementary(alpha.l, alpha.l, n)?)
    }

    /// `K_alpha = e_{kk} + e_{ll}`.
    pub fn k_root(alpha: &Root, n: usize) -> Result<Self> {
        Ok(Self::elementary(alpha.k, alpha.k, n)? + Self::elementary(alpha.l, alpha.l, n)?)
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n);
        for (i, v) in entries.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// 0-based entry access.
    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: S) {
        let idx = i * self.n + j;
        self.data[idx] = self.data[idx].clone() + v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn scale(&self, c: &S) -> Self {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.at(j, i).clone())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.at(j, i).conj())
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.n {
            t = t + self.at(i, i).clone();
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matmul");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.add_at(i, j, a.clone() * b.clone());
                }
            }
        }
        out
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs) - rhs.matmul(self)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = acc.matmul(self);
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Gauss-Jordan inverse. Errors if the matrix is singular
    /// (exactly in exact mode, pivot below 1e-14 of scale in float mode).
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a.at(col, col).abs();
            for r in (col + 1)..n {
                let cand = a.at(r, col).abs();
                if cand > best {
                    best = cand;
                    pivot = r;
                }
            }
            if a.at(pivot, col).is_zero() {
                return Err(CmrError::Degenerate("singular matrix".into()));
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a.at(col, j).clone();
                    a.set(col, j, a.at(pivot, j).clone());
                    a.set(pivot, j, tmp);
                    let tmp = inv.at(col, j).clone();
                    inv.set(col, j, inv.at(pivot, j).clone());
                    inv.set(pivot, j, tmp);
                }
            }
            let p = a.at(col, col).clone();
            let pinv = p.recip()?;
            for j in 0..n {
                a.set(col, j, a.at(col, j).clone() * pinv.clone());
                inv.set(col, j, inv.at(col, j).clone() * pinv.clone());
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let factor = a.at(r, col).clone();
                for j in 0..n {
                    let av = a.at(r, j).clone() - factor.clone() * a.at(col, j).clone();
                    a.set(r, j, av);
                    let iv = inv.at(r, j).clone() - factor.clone() * inv.at(col, j).clone();
                    inv.set(r, j, iv);
                }
            }
        }
        Ok(inv)
    }

    pub fn to_c64(&self) -> SquareMatrix<C64> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|x| x.to_c64()).collect(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SquareMatrix<T> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<S: Scalar> std::ops::Add for SquareMatrix<S> {
    type Output = SquareMatrix<S>;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        SquareMatrix {
            n: self.n,
            data: self
                .data
                .into_iter()
                .zip(rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<S: Scalar> std::ops::Sub for SquareMatrix<S> {
    type Output = SquareMatrix<S>;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        SquareMatrix {
            n: self.n,
            data: self
                .data
                .into_iter()
                .zip(rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<S: Scalar> std::ops::Neg for SquareMatrix<S> {
    type Output = SquareMatrix<S>;
    fn neg(self) -> Self {
        SquareMatrix {
            n: self.n,
            data: self.data.into_iter().map(|a| -a).collect(),
        }
    }
}

/// Frobenius condition-number proxy `|A|_F |A^-1|_F`.
pub fn cond_frobenius(m: &SquareMatrix<C64>) -> Result<f64> {
    Ok(m.frobenius_norm() * m.inverse()?.frobenius_norm())
}

/// Relative Frobenius distance, with an absolute floor of 1.
pub fn rel_diff<S: Scalar>(a: &SquareMatrix<S>, b: &SquareMatrix<S>) -> f64 {
    let d = (a.clone() - b.clone()).frobenius_norm();
    d / a.frobenius_norm().max(1.0)
}

pub fn c64_mat(rows: &[&[(f64, f64)]]) -> SquareMatrix<C64> {
    let n = rows.len();
    SquareMatrix::from_fn(n, |i, j| Complex64::new(rows[i][j].0, rows[i][j].1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat;

    #[test]
    fn elementary_and_named_basis_elements() {
        let e12 = SquareMatrix::<C64>::elementary(1, 2, 2).unwrap();
        assert_eq!(e12.at(0, 1).re, 1.0);
        assert_eq!(e12.at(0, 0).re, 0.0);
        assert!(SquareMatrix::<C64>::elementary(0, 1, 2).is_err());
        assert!(SquareMatrix::<C64>::elementary(3, 1, 2).is_err());

        // K_alpha for alpha = lambda_1 - lambda_3, n = 3 is diag(1,0,1).
        let alpha = Root::new(1, 3).unwrap();
        let k = SquareMatrix::<C64>::k_root(&alpha, 3).unwrap();
        assert_eq!(k.at(0, 0).re, 1.0);
        assert_eq!(k.at(1, 1).re, 0.0);
        assert_eq!(k.at(2, 2).re, 1.0);

        // H_alpha for alpha = lambda_2 - lambda_1, n = 2 is diag(-1,1).
        let alpha = Root::new(2, 1).unwrap();
        let h = SquareMatrix::<C64>::h_root(&alpha, 2).unwrap();
        assert_eq!(h.at(0, 0).re, -1.0);
        assert_eq!(h.at(1, 1).re, 1.0);
    }

    #[test]
    fn root_set_size_and_negation() {
        let n = 4;
        let all = roots(n);
        assert_eq!(all.len(), n * (n - 1));
        for alpha in &all {
            assert!(all.contains(&alpha.negated()));
            assert_eq!(alpha.negated().negated(), *alpha);
        }
    }

    #[test]
    fn structure_constants_match_commutators() {
        let n = 3;
        for a in roots(n) {
            for b in roots(n) {
                let lhs = SquareMatrix::<C64>::e_root(&a, n)
                    .unwrap()
                    .commutator(&SquareMatrix::e_root(&b, n).unwrap());
                match structure_constant(&a, &b) {
                    Some((g, c)) => {
                        let rhs = SquareMatrix::<C64>::e_root(&g, n)
                            .unwrap()
                            .scale(&Complex64::new(c as f64, 0.0));
                        assert!((lhs - rhs).is_zero());
                    }
                    None => {
                        // Commutator is Cartan (alpha = -beta) or zero.
                        let mut off_diag_zero = true;
                        for i in 0..n {
                            for j in 0..n {
                                if i != j && !lhs.at(i, j).is_zero() {
                                    off_diag_zero = false;
                                }
                            }
                        }
                        assert!(off_diag_zero);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_inverse_round_trip() {
        let m = SquareMatrix::from_rows(vec![
            vec![GaussRat::ratio(1, 2), GaussRat::ratio(3, 1), GaussRat::ratio(0, 1)],
            vec![GaussRat::ratio(-1, 3), GaussRat::ratio(1, 1), GaussRat::ratio(2, 5)],
            vec![GaussRat::ratio(0, 1), GaussRat::ratio(7, 2), GaussRat::ratio(1, 7)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        assert!(prod == SquareMatrix::identity(3));
    }

    #[test]
    fn singular_matrix_is_degenerate() {
        let m = SquareMatrix::from_rows(vec![
            vec![GaussRat::ratio(1, 1), GaussRat::ratio(2, 1)],
            vec![GaussRat::ratio(2, 1), GaussRat::ratio(4, 1)],
        ])
        .unwrap();
        assert!(matches!(m.inverse(), Err(CmrError::Degenerate(_))));
    }

    #[test]
    fn trace_and_dagger() {
        let m = c64_mat(&[&[(1.0, 2.0), (0.5, -0.25)], &[(0.0, 3.0), (-2.0, 0.0)]]);
        let t = m.trace();
        assert_eq!(t, Complex64::new(-1.0, 2.0));
        let d = m.dagger();
        assert_eq!(*d.at(0, 1), Complex64::new(0.0, -3.0));
        assert_eq!(*d.at(1, 0), Complex64::new(0.5, 0.25));
    }
}
