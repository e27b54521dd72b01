//! Small dense complex linear algebra used by the state and distance code.
//!
//! Eigendecomposition is delegated to nalgebra's Hermitian solver; everything
//! here works on `DMatrix<Complex64>` since the matrices are at most d² × d²
//! for single-digit d.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance on |m - m†| accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is an error.
pub const PSD_TOL: f64 = 1e-10;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Spectral decomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: DVector<f64>,
    /// Column `k` is the eigenvector belonging to `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl HermitianEigen {
    /// Rebuilds V f(Λ) V† for a real function of the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for k in 0..n {
            let fk = f(self.eigenvalues[k]);
            for r in 0..n {
                scaled[(r, k)] *= fk;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrised before decomposition; for a fixed input the
/// result (including the basis chosen inside degenerate eigenspaces) is
/// deterministic.
pub fn eig_hermitian(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();

    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues this small are rounding noise on an exact zero; the square
/// root would amplify them to ~1e-7.
const SQRT_FLOOR: f64 = 1e-13;

/// Principal square root of a positive-semidefinite Hermitian matrix.
pub fn matrix_sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = eig_hermitian(m)?;
    let min = eig.eigenvalues.min();
    if min < -PSD_TOL {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.map_spectrum(|x| if x <= SQRT_FLOOR { 0.0 } else { x.sqrt() }))
}

/// Kronecker product of two complex matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// σ₀ = 𝟙, σ₁ = X, σ₂ = Y, σ₃ = Z.
pub fn pauli(i: usize) -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let entries = match i {
        0 => [l, o, o, l],
        1 => [o, l, l, o],
        2 => [o, -I, I, o],
        3 => [l, o, o, -l],
        _ => panic!("Pauli index {i} out of range"),
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

/// σᵢ ⊗ σⱼ.
pub fn pauli_product(i: usize, j: usize) -> CMatrix {
    kron(&pauli(i), &pauli(j))
}

/// Re Tr[a b] without forming the product.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc.re
}

pub fn conjugate_by(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u * m * u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real_diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        ))
    }

    #[test]
    fn identity_spectrum() {
        let eig = eig_hermitian(&CMatrix::identity(4, 4)).unwrap();
        for v in eig.eigenvalues.iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eigenvalues_descending_and_reconstruct() {
        let mut m = real_diag(&[0.1, 0.7, -0.3, 0.2]);
        m[(0, 1)] = Complex64::new(0.05, 0.2);
        m[(1, 0)] = Complex64::new(0.05, -0.2);
        let eig = eig_hermitian(&m).unwrap();
        for k in 1..4 {
            assert!(eig.eigenvalues[k - 1] >= eig.eigenvalues[k]);
        }
        let back = eig.map_spectrum(|x| x);
        assert!(max_abs(&(back - &m)) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sqrt_of_rotated_diagonal() {
        let d = real_diag(&[0.64, 0.36, 0.0, 0.0]);
        let h = CMatrix::from_fn(4, 4, |r, c| {
            Complex64::new(((r * 3 + c) % 5) as f64 * 0.1, (r as f64 - c as f64) * 0.07)
        });
        let h = (&h + h.adjoint()).scale(0.5);
        let u = eig_hermitian(&h).unwrap().eigenvectors;
        let m = conjugate_by(&u, &d);
        let root = matrix_sqrt_psd(&m).unwrap();
        let expected = conjugate_by(&u, &real_diag(&[0.8, 0.6, 0.0, 0.0]));
        assert!(max_abs(&(&root - expected)) < 1e-10);
        assert!(max_abs(&(&root * &root - m)) < 1e-8);
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_large() {
        let tiny = real_diag(&[0.5, 0.5, -5e-11]);
        let root = matrix_sqrt_psd(&tiny).unwrap();
        assert_abs_diff_eq!(root[(2, 2)].re, 0.0);
        let bad = real_diag(&[0.5, 0.5, -1e-6]);
        assert!(matches!(matrix_sqrt_psd(&bad), Err(Error::NotPsd(_))));
    }

    #[test]
    fn pauli_algebra() {
        for i in 1..4 {
            let sq = &pauli(i) * &pauli(i);
            assert!(max_abs(&(sq - CMatrix::identity(2, 2))) < 1e-15);
            assert_abs_diff_eq!(pauli(i).trace().norm(), 0.0);
        }
        // XY = iZ
        let xy = &pauli(1) * &pauli(2);
        assert!(max_abs(&(xy - pauli(3) * I)) < 1e-15);
    }
}
