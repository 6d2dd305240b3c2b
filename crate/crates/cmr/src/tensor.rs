//! Elements of `gl_n (x) gl_n` and `gl_n (x) gl_n (x) gl_n` stored as dense
//! `n^2 x n^2` and `n^3 x n^3` matrices under the row-major Kronecker index
//! convention: `e_{ab} (x) e_{cd}` sits at row `(a-1)n + (c-1)`, column
//! `(b-1)n + (d-1)`.

use crate::error::{CmrError, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::Scalar;

/// Slot of a two-factor tensor inside the triple tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot3 {
    S12,
    S13,
    S23,
}

impl Slot3 {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "12" => Ok(Slot3::S12),
            "13" => Ok(Slot3::S13),
            "23" => Ok(Slot3::S23),
            _ => Err(CmrError::Argument(format!("invalid tensor slot {s:?}"))),
        }
    }
}

/// Element of `gl_n (x) gl_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2<S> {
    n: usize,
    m: SquareMatrix<S>,
}

/// Element of the triple tensor product.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<S> {
    n: usize,
    m: SquareMatrix<S>,
}

impl<S: Scalar> Tensor2<S> {
    pub fn zeros(n: usize) -> Self {
        Tensor2 {
            n,
            m: SquareMatrix::zeros(n * n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Tensor2 {
            n,
            m: SquareMatrix::identity(n * n),
        }
    }

    pub fn from_matrix(n: usize, m: SquareMatrix<S>) -> Result<Self> {
        if m.dim() != n * n {
            return Err(CmrError::Argument(format!(
                "matrix of dim {} is not an order-2 tensor over gl_{n}",
                m.dim()
            )));
        }
        Ok(Tensor2 { n, m })
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &SquareMatrix<S> {
        &self.m
    }

    /// Entry at `(e_{ab} (x) e_{cd})` position, all indices 1-based.
    pub fn coeff(&self, a: usize, b: usize, c: usize, d: usize) -> &S {
        let n = self.n;
        self.m.at((a - 1) * n + (c - 1), (b - 1) * n + (d - 1))
    }

    pub fn add_coeff(&mut self, a: usize, b: usize, c: usize, d: usize, v: S) {
        let n = self.n;
        self.m.add_at((a - 1) * n + (c - 1), (b - 1) * n + (d - 1), v);
    }

    pub fn scale(&self, c: &S) -> Self {
        Tensor2 {
            n: self.n,
            m: self.m.scale(c),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Tensor2 {
            n: self.n,
            m: self.m.matmul(&rhs.m),
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        Tensor2 {
            n: self.n,
            m: self.m.commutator(&rhs.m),
        }
    }

    /// Swap of the two tensor factors, `r_12 -> r_21`.
    pub fn swap_factors(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for a in 1..=n {
            for b in 1..=n {
                for c in 1..=n {
                    for d in 1..=n {
                        out.add_coeff(c, d, a, b, self.coeff(a, b, c, d).clone());
                    }
                }
            }
        }
        out
    }

    /// Apply the factor-wise conjugate transpose (adjoint of each factor).
    pub fn dagger_factors(&self) -> Self {
        Tensor2 {
            n: self.n,
            m: self.m.dagger(),
        }
    }

    /// Apply the factor-wise transpose.
    pub fn transpose_factors(&self) -> Self {
        Tensor2 {
            n: self.n,
            m: self.m.transpose(),
        }
    }

    /// Conjugation `(g (x) g) T (g (x) g)^-1` built from `g` and the supplied
    /// inverse of `g` (so big tensors are never inverted directly).
    pub fn conjugate_pair(&self, g: &SquareMatrix<S>, g_inv: &SquareMatrix<S>) -> Result<Self> {
        if g.dim() != self.n || g_inv.dim() != self.n {
            return Err(CmrError::Argument(
                "conjugating matrix dimension mismatch".into(),
            ));
        }
        let big = kron(g, g)?;
        let big_inv = kron(g_inv, g_inv)?;
        Ok(big.matmul(self).matmul(&big_inv))
    }

    /// Partial trace over the first factor: `A (x) B -> tr(A) B`.
    pub fn partial_trace_1(&self) -> SquareMatrix<S> {
        let n = self.n;
        SquareMatrix::from_fn(n, |c, d| {
            let mut acc = S::zero();
            for a in 1..=n {
                acc = acc + self.coeff(a, a, c + 1, d + 1).clone();
            }
            acc
        })
    }

    /// Partial trace over the second factor: `A (x) B -> tr(B) A`.
    pub fn partial_trace_2(&self) -> SquareMatrix<S> {
        let n = self.n;
        SquareMatrix::from_fn(n, |a, b| {
            let mut acc = S::zero();
            for c in 1..=n {
                acc = acc + self.coeff(a + 1, b + 1, c, c).clone();
            }
            acc
        })
    }

    /// Embed into the triple product, acting in the named pair of factors.
    pub fn embed3(&self, slot: Slot3) -> Tensor3<S> {
        let n = self.n;
        let mut out = Tensor3::zeros(n);
        let n2 = n * n;
        for row in 0..n2 {
            for col in 0..n2 {
                let v = self.m.at(row, col);
                if v.is_zero() {
                    continue;
                }
                let (a, c) = (row / n, row % n);
                let (b, d) = (col / n, col % n);
                for x in 0..n {
                    let (r3, c3) = match slot {
                        Slot3::S12 => (a * n * n + c * n + x, b * n * n + d * n + x),
                        Slot3::S13 => (a * n * n + x * n + c, b * n * n + x * n + d),
                        Slot3::S23 => (x * n * n + a * n + c, x * n * n + b * n + d),
                    };
                    out.m.add_at(r3, c3, v.clone());
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn to_c64(&self) -> Tensor2<crate::scalar::C64> {
        Tensor2 {
            n: self.n,
            m: self.m.to_c64(),
        }
    }
}

impl<S: Scalar> std::ops::Add for Tensor2<S> {
    type Output = Tensor2<S>;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "tensor dimension mismatch");
        Tensor2 {
            n: self.n,
            m: self.m + rhs.m,
        }
    }
}

impl<S: Scalar> std::ops::Sub for Tensor2<S> {
    type Output = Tensor2<S>;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "tensor dimension mismatch");
        Tensor2 {
            n: self.n,
            m: self.m - rhs.m,
        }
    }
}

impl<S: Scalar> std::ops::Neg for Tensor2<S> {
    type Output = Tensor2<S>;
    fn neg(self) -> Self {
        Tensor2 {
            n: self.n,
            m: -self.m,
        }
    }
}

impl<S: Scalar> Tensor3<S> {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            m: SquareMatrix::zeros(n * n * n),
        }
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &SquareMatrix<S> {
        &self.m
    }

    /// Add `v * e_{ab} (x) e_{cd} (x) e_{ef}`, indices 1-based.
    pub fn add_simple(&mut self, a: usize, b: usize, c: usize, d: usize, e: usize, f: usize, v: S) {
        let n = self.n;
        let row = (a - 1) * n * n + (c - 1) * n + (e - 1);
        let col = (b - 1) * n * n + (d - 1) * n + (f - 1);
        self.m.add_at(row, col, v);
    }

    pub fn scale(&self, c: &S) -> Self {
        Tensor3 {
            n: self.n,
            m: self.m.scale(c),
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        Tensor3 {
            n: self.n,
            m: self.m.commutator(&rhs.m),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }
}

impl<S: Scalar> std::ops::Add for Tensor3<S> {
    type Output = Tensor3<S>;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "tensor dimension mismatch");
        Tensor3 {
            n: self.n,
            m: self.m + rhs.m,
        }
    }
}

impl<S: Scalar> std::ops::Sub for Tensor3<S> {
    type Output = Tensor3<S>;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "tensor dimension mismatch");
        Tensor3 {
            n: self.n,
            m: self.m - rhs.m,
        }
    }
}

/// Kronecker product `A (x) B` of two equal-dimension square matrices.
pub fn kron<S: Scalar>(a: &SquareMatrix<S>, b: &SquareMatrix<S>) -> Result<Tensor2<S>> {
    if a.dim() != b.dim() {
        return Err(CmrError::Argument(format!(
            "kron dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let n = a.dim();
    let mut out = SquareMatrix::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            let aij = a.at(i, j);
            if aij.is_zero() {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    let b_kl = b.at(k, l);
                    if b_kl.is_zero() {
                        continue;
                    }
                    out.set(i * n + k, j * n + l, aij.clone() * b_kl.clone());
                }
            }
        }
    }
    Tensor2::from_matrix(n, out)
}

/// Antisymmetrized product `A /\ B = A (x) B - B (x) A`.
pub fn wedge<S: Scalar>(a: &SquareMatrix<S>, b: &SquareMatrix<S>) -> Result<Tensor2<S>> {
    Ok(kron(a, b)? - kron(b, a)?)
}
