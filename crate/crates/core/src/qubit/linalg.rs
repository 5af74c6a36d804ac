//! Fixed-size complex matrices for one and two qubits.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix of fixed dimension `N`, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat<const N: usize>(pub [[Complex64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        Self([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in &mut out.0 {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..N {
            for k in 0..N {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Works on the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose
    /// spectrum is that of the input with every eigenvalue doubled, and
    /// diagonalizes it by cyclic Jacobi sweeps.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n2 = 2 * N;
        let mut a = vec![vec![0.0; n2]; n2];
        for i in 0..N {
            for j in 0..N {
                // symmetrize so a slightly non-Hermitian input still yields a symmetric embedding
                let h = (self.0[i][j] + self.0[j][i].conj()) * 0.5;
                a[i][j] = h.re;
                a[i + N][j + N] = h.re;
                a[i][j + N] = -h.im;
                a[i + N][j] = h.im;
            }
        }
        let mut evals = jacobi_eigenvalues(a);
        evals.sort_by(f64::total_cmp);
        evals.into_iter().step_by(2).collect()
    }
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let aik = self.0[i][k];
                for j in 0..N {
                    out.0[i][j] += aik * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Kronecker product of two single-qubit operators.
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut out = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

pub fn pauli_x() -> CMat2 {
    CMat([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> CMat2 {
    CMat([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> CMat2 {
    CMat([[ONE, ZERO], [ZERO, -ONE]])
}

/// `n . sigma` for a real 3-vector `n`.
pub fn bloch_operator(n: [f64; 3]) -> CMat2 {
    pauli_x().scale(n[0]) + pauli_y().scale(n[1]) + pauli_z().scale(n[2])
}

/// Projector onto a normalized pure state.
pub fn projector(psi: &[Complex64; 4]) -> CMat4 {
    let mut out = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out.0[i][j] = psi[i] * psi[j].conj();
        }
    }
    out
}
