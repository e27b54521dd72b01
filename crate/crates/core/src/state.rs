//! Bipartite state representations and the symmetrisation maps that carry a
//! state into the Werner, isotropic or Bell-diagonal family.
//!
//! Two-qubit states are handled in the Pauli picture
//! ρ = ¼ Σᵢⱼ αᵢⱼ σᵢ ⊗ σⱼ, where α is a real 4×4 matrix with α₀₀ = 1, first row
//! the local Bloch vector of the second qubit, first column that of the
//! first qubit, and a 3×3 correlation block.
//!
//! Bell-diagonal states carry both the correlators `a` (the diagonal of the
//! correlation block) and the Bell-basis weights `e`. The two are related by
//! the orthogonal ±1 map in [`BELL_SIGNATURES`]: weight `e[k]` sits on the
//! Bell vector whose own correlators are `BELL_SIGNATURES[k]`.

use nalgebra::{Matrix3, Matrix4, RowVector3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, conjugate_by, eig_hermitian, hermitian_defect, pauli_product, trace_product_re, CMatrix,
};

/// Tolerance used when validating [`DensityMatrix`] invariants.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Negative Bell weights above this are treated as rounding noise.
pub const PROBABILITY_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-9;

/// Correlator signature of each Bell vector, indexed like the weights `e`.
///
/// Row `k` is `(⟨σ₁σ₁⟩, ⟨σ₂σ₂⟩, ⟨σ₃σ₃⟩)` of the Bell vector carrying `e[k]`:
/// `(|01⟩+|10⟩)/√2`, `(|00⟩+|11⟩)/√2`, `(|00⟩−|11⟩)/√2`, `(|01⟩−|10⟩)/√2`.
pub const BELL_SIGNATURES: [[f64; 3]; 4] = [
    [1.0, 1.0, -1.0],
    [1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [-1.0, -1.0, -1.0],
];

/// Density matrix of a d×d bipartite system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Builds a density matrix and checks Hermiticity, unit trace and PSD.
    pub fn new(dim: usize, entries: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(dim, entries)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Builds a matrix with only its shape checked. Use [`Self::validate`]
    /// before handing it to code that relies on positivity.
    pub fn from_matrix_unchecked(dim: usize, entries: CMatrix) -> Result<Self> {
        let n = dim * dim;
        if dim < 2 || entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.nrows(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn validate(&self) -> Result<()> {
        let defect = hermitian_defect(&self.entries);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = self.entries.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = self
            .eigenvalues()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }

    /// Maximally mixed state 𝟙/d².
    pub fn maximally_mixed(dim: usize) -> Self {
        let n = dim * dim;
        Self {
            dim,
            entries: CMatrix::identity(n, n).scale(1.0 / n as f64),
        }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalised) vector of length d².
    pub fn pure(dim: usize, psi: &[Complex64]) -> Result<Self> {
        let n = dim * dim;
        if psi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.len(),
            });
        }
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let m = CMatrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj() / norm2);
        Self::new(dim, m)
    }

    /// Local dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_hermitian(&self.entries)?
            .eigenvalues
            .iter()
            .copied()
            .collect())
    }

    /// Convex combination `lambda·self + (1-lambda)·other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        ensure_same_dim(self, other)?;
        Ok(Self {
            dim: self.dim,
            entries: self.entries.scale(lambda) + other.entries.scale(1.0 - lambda),
        })
    }

    /// U ρ U† for a unitary of matching size.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.entries.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.nrows(),
                found: u.nrows(),
            });
        }
        Ok(Self {
            dim: self.dim,
            entries: conjugate_by(u, &self.entries),
        })
    }
}

pub(crate) fn ensure_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

fn ensure_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim,
        });
    }
    Ok(())
}

/// Real 4×4 Pauli coefficient matrix of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliRep {
    alpha: Matrix4<f64>,
}

impl PauliRep {
    pub fn new(alpha: Matrix4<f64>) -> Result<Self> {
        if alpha[(0, 0)] != 1.0 {
            return Err(Error::OutOfRange(format!(
                "alpha[0][0] must be 1, got {}",
                alpha[(0, 0)]
            )));
        }
        Ok(Self { alpha })
    }

    /// Assembles α from the local vector of qubit B (first row), of qubit A
    /// (first column) and the correlation block.
    pub fn from_blocks(row: Vector3<f64>, col: Vector3<f64>, corr: Matrix3<f64>) -> Self {
        let mut alpha = Matrix4::zeros();
        alpha[(0, 0)] = 1.0;
        for i in 0..3 {
            alpha[(0, i + 1)] = row[i];
            alpha[(i + 1, 0)] = col[i];
            for j in 0..3 {
                alpha[(i + 1, j + 1)] = corr[(i, j)];
            }
        }
        Self { alpha }
    }

    pub fn from_correlators(a: [f64; 3]) -> Self {
        Self::from_blocks(
            Vector3::zeros(),
            Vector3::zeros(),
            Matrix3::from_diagonal(&Vector3::from(a)),
        )
    }

    pub fn alpha(&self) -> &Matrix4<f64> {
        &self.alpha
    }

    /// α₀ᵢ = Tr[ρ (𝟙 ⊗ σᵢ)].
    pub fn row_vec(&self) -> RowVector3<f64> {
        RowVector3::new(self.alpha[(0, 1)], self.alpha[(0, 2)], self.alpha[(0, 3)])
    }

    /// αᵢ₀ = Tr[ρ (σᵢ ⊗ 𝟙)].
    pub fn col_vec(&self) -> Vector3<f64> {
        Vector3::new(self.alpha[(1, 0)], self.alpha[(2, 0)], self.alpha[(3, 0)])
    }

    pub fn corr_matrix(&self) -> Matrix3<f64> {
        self.alpha.fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// Frobenius distance between the coefficient matrices.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (self.alpha - other.alpha).norm()
    }
}

/// ρ = ¼ Σ αᵢⱼ σᵢ ⊗ σⱼ.
///
/// No positivity check is made here; call [`DensityMatrix::validate`] when
/// the coefficients come from an untrusted source.
pub fn pauli_to_density(rep: &PauliRep) -> DensityMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let c = rep.alpha[(i, j)];
            if c != 0.0 {
                m += pauli_product(i, j).scale(c / 4.0);
            }
        }
    }
    DensityMatrix { dim: 2, entries: m }
}

/// αᵢⱼ = Tr[ρ σᵢ ⊗ σⱼ].
pub fn density_to_pauli(rho: &DensityMatrix) -> Result<PauliRep> {
    ensure_qubits(rho)?;
    let mut alpha = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            alpha[(i, j)] = trace_product_re(&rho.entries, &pauli_product(i, j));
        }
    }
    alpha[(0, 0)] = 1.0;
    Ok(PauliRep { alpha })
}

/// Maps Bell weights to correlators, aᵢ = Σₖ `BELL_SIGNATURES[k][i]` eₖ.
pub fn bd_probs_to_corr(e: [f64; 4]) -> Result<[f64; 3]> {
    check_probabilities(&e)?;
    Ok(probs_to_corr_unchecked(&e))
}

pub(crate) fn probs_to_corr_unchecked(e: &[f64; 4]) -> [f64; 3] {
    let mut a = [0.0; 3];
    for (k, ek) in e.iter().enumerate() {
        for (i, ai) in a.iter_mut().enumerate() {
            *ai += BELL_SIGNATURES[k][i] * ek;
        }
    }
    a
}

/// Maps correlators to Bell weights, eₖ = (1 + `BELL_SIGNATURES[k]`·a)/4.
///
/// Returns negative weights unchanged for points outside the tetrahedron.
pub fn bd_corr_to_probs(a: [f64; 3]) -> [f64; 4] {
    let mut e = [0.0; 4];
    for (k, ek) in e.iter_mut().enumerate() {
        let s = BELL_SIGNATURES[k];
        *ek = 0.25 * (1.0 + s[0] * a[0] + s[1] * a[1] + s[2] * a[2]);
    }
    e
}

fn check_probabilities(e: &[f64; 4]) -> Result<()> {
    if let Some(bad) = e.iter().find(|&&x| x < -PROBABILITY_TOL || !x.is_finite()) {
        return Err(Error::InvalidProbability(format!("negative weight {bad}")));
    }
    let sum: f64 = e.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidProbability(format!("weights sum to {sum}")));
    }
    Ok(())
}

/// True when `a` lies in the tetrahedron of physical Bell-diagonal states.
pub fn in_tetrahedron(a: [f64; 3]) -> bool {
    a.iter().all(|x| x.is_finite()) && bd_corr_to_probs(a).iter().all(|&x| x >= -PROBABILITY_TOL)
}

/// Two-qubit state diagonal in the Bell basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonal {
    a: [f64; 3],
    e: [f64; 4],
}

impl BellDiagonal {
    pub fn from_correlators(a: [f64; 3]) -> Result<Self> {
        if !in_tetrahedron(a) {
            return Err(Error::NonPhysical(a));
        }
        Ok(Self {
            a,
            e: bd_corr_to_probs(a),
        })
    }

    pub fn from_probabilities(e: [f64; 4]) -> Result<Self> {
        let a = bd_probs_to_corr(e)?;
        Ok(Self { a, e })
    }

    /// Correlators (a₁, a₂, a₃).
    pub fn correlators(&self) -> [f64; 3] {
        self.a
    }

    /// Bell weights (e₁..e₄).
    pub fn probabilities(&self) -> [f64; 4] {
        self.e
    }

    pub fn pauli(&self) -> PauliRep {
        PauliRep::from_correlators(self.a)
    }

    pub fn density(&self) -> DensityMatrix {
        pauli_to_density(&self.pauli())
    }

    /// Bell vector carrying weight `e[k]`, in the computational basis |00⟩,|01⟩,|10⟩,|11⟩.
    pub fn bell_vector(k: usize) -> [Complex64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let p = Complex64::new(h, 0.0);
        match k {
            0 => [z, p, p, z],
            1 => [p, z, z, p],
            2 => [p, z, z, -p],
            3 => [z, p, -p, z],
            _ => panic!("Bell index {k} out of range"),
        }
    }
}

/// Which Bell vector a two-qubit Werner state is mixed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum BellCorner {
    /// (|01⟩+|10⟩)/√2
    PsiPlus,
    /// (|00⟩+|11⟩)/√2
    PhiPlus,
    /// (|00⟩−|11⟩)/√2
    PhiMinus,
    /// Singlet (|01⟩−|10⟩)/√2.
    #[default]
    Singlet,
}

impl BellCorner {
    pub const ALL: [BellCorner; 4] = [
        BellCorner::PsiPlus,
        BellCorner::PhiPlus,
        BellCorner::PhiMinus,
        BellCorner::Singlet,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn signature(self) -> [f64; 3] {
        BELL_SIGNATURES[self.index()]
    }
}

/// Two-qubit Werner parameter: w·|B⟩⟨B| + (1−w)𝟙/4 for a Bell vector B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerParam {
    pub w: f64,
    pub corner: BellCorner,
}

impl WernerParam {
    pub fn new(w: f64) -> Result<Self> {
        Self::with_corner(w, BellCorner::default())
    }

    pub fn with_corner(w: f64, corner: BellCorner) -> Result<Self> {
        if !(w > -1.0 / 3.0 && w <= 1.0) {
            return Err(Error::OutOfRange(format!(
                "Werner parameter {w} outside (-1/3, 1]"
            )));
        }
        Ok(Self { w, corner })
    }

    pub fn correlators(&self) -> [f64; 3] {
        self.corner.signature().map(|s| s * self.w)
    }

    pub fn bell_diagonal(&self) -> BellDiagonal {
        let a = self.correlators();
        BellDiagonal {
            a,
            e: bd_corr_to_probs(a),
        }
    }
}

/// Isotropic two-qudit parameter ω·|φ⁺⟩⟨φ⁺| + (1−ω)𝟙/d².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicParam {
    pub d: usize,
    pub omega: f64,
}

impl IsotropicParam {
    pub fn new(d: usize, omega: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange(format!("dimension {d} < 2")));
        }
        let lower = -1.0 / ((d * d - 1) as f64);
        if !(omega >= lower - 1e-15 && omega <= 1.0) {
            return Err(Error::OutOfRange(format!(
                "isotropic parameter {omega} outside [{lower}, 1] for d={d}"
            )));
        }
        Ok(Self { d, omega })
    }

    /// Eigenvalues: one ((d²−1)ω+1)/d², and (1−ω)/d² with multiplicity d²−1.
    pub fn spectrum(&self) -> (f64, f64) {
        let n = (self.d * self.d) as f64;
        (((n - 1.0) * self.omega + 1.0) / n, (1.0 - self.omega) / n)
    }
}

/// Returns (−α₀ᵢ, −αᵢ₀, A): both Bloch vectors flipped, correlations kept.
pub fn sign_flip(rep: &PauliRep) -> PauliRep {
    PauliRep::from_blocks(
        -rep.row_vec().transpose(),
        -rep.col_vec(),
        rep.corr_matrix(),
    )
}

/// Even mixture of a state and its sign flip: same correlations, maximally
/// mixed marginals.
pub fn reduce_to_maximally_mixed_marginals(rep: &PauliRep) -> PauliRep {
    let flipped = sign_flip(rep);
    let mut alpha = (rep.alpha + flipped.alpha) * 0.5;
    alpha[(0, 0)] = 1.0;
    PauliRep { alpha }
}

/// Projects a two-qubit state onto the Bell-diagonal family by averaging over
/// simultaneous π-rotations of both qubits about σ₁ and then σ₂.
pub fn bd_project(rho: &DensityMatrix) -> Result<BellDiagonal> {
    ensure_qubits(rho)?;
    let r1 = pauli_product(1, 1);
    let r2 = pauli_product(2, 2);
    let half = |m: &CMatrix, r: &CMatrix| (m + conjugate_by(r, m)).scale(0.5);
    let step1 = half(&rho.entries, &r1);
    let step2 = half(&step1, &r2);
    let projected = DensityMatrix {
        dim: 2,
        entries: step2,
    };
    let corr = density_to_pauli(&projected)?.corr_matrix();
    BellDiagonal::from_correlators([corr[(0, 0)], corr[(1, 1)], corr[(2, 2)]])
}

/// ⟨φ⁺|ρ|φ⁺⟩ with |φ⁺⟩ = Σᵢ|ii⟩/√d.
pub fn maximally_entangled_fidelity(rho: &DensityMatrix) -> f64 {
    let d = rho.dim;
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += rho.entries[(i * d + i, j * d + j)].re;
        }
    }
    acc / d as f64
}

/// Isotropic parameter of the U⊗U* twirl of ρ.
///
/// The twirl keeps ⟨φ⁺|ρ|φ⁺⟩ fixed and lands in the isotropic family, so
/// ω = (d²F − 1)/(d² − 1) with F that overlap.
pub fn twirl_isotropic(rho: &DensityMatrix) -> IsotropicParam {
    let n = (rho.dim * rho.dim) as f64;
    let f = maximally_entangled_fidelity(rho);
    IsotropicParam {
        d: rho.dim,
        omega: (n * f - 1.0) / (n - 1.0),
    }
}

pub fn make_werner(w: f64) -> Result<DensityMatrix> {
    Ok(WernerParam::new(w)?.bell_diagonal().density())
}

pub fn make_werner_at(param: WernerParam) -> DensityMatrix {
    param.bell_diagonal().density()
}

pub fn make_isotropic(d: usize, omega: f64) -> Result<DensityMatrix> {
    let param = IsotropicParam::new(d, omega)?;
    Ok(make_isotropic_at(param))
}

pub fn make_isotropic_at(param: IsotropicParam) -> DensityMatrix {
    let d = param.d;
    let n = d * d;
    let noise = (1.0 - param.omega) / n as f64;
    let mut m = CMatrix::identity(n, n).scale(noise);
    let weight = param.omega / d as f64;
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] += Complex64::new(weight, 0.0);
        }
    }
    DensityMatrix { dim: d, entries: m }
}

pub fn make_bell_diagonal_from_probabilities(e: [f64; 4]) -> Result<DensityMatrix> {
    Ok(BellDiagonal::from_probabilities(e)?.density())
}

pub fn make_bell_diagonal_from_correlators(a: [f64; 3]) -> Result<DensityMatrix> {
    Ok(BellDiagonal::from_correlators(a)?.density())
}

/// Random density matrix from a Ginibre draw G: ρ = GG†/Tr(GG†).
pub fn random_density<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let n = dim * dim;
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix {
        dim,
        entries: m.unscale(tr),
    }
}

/// Haar-distributed unitary of size n (QR of a Ginibre matrix, phases fixed).
pub fn random_unitary<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..n {
            q[(row, c)] *= phase;
        }
    }
    q
}

pub(crate) fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller; avoids pulling in rand_distr for a single distribution.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Uniform sample from the Bell-diagonal tetrahedron (flat Dirichlet weights).
pub fn random_bell_diagonal<R: rand::Rng + ?Sized>(rng: &mut R) -> BellDiagonal {
    let mut e = [0.0; 4];
    for x in e.iter_mut() {
        *x = -(1.0 - rng.gen::<f64>()).ln();
    }
    let s: f64 = e.iter().sum();
    for x in e.iter_mut() {
        *x /= s;
    }
    BellDiagonal {
        a: probs_to_corr_unchecked(&e),
        e,
    }
}

/// Unitary of the form U ⊗ U*.
pub fn twirl_unitary(u: &CMatrix) -> CMatrix {
    linalg::kron(u, &u.map(|z| z.conj()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket_projector(psi: [Complex64; 4]) -> CMatrix {
        CMatrix::from_fn(4, 4, |r, c| psi[r] * psi[c].conj())
    }

    #[test]
    fn pauli_diag_gives_phi_plus() {
        let mut alpha = Matrix4::identity();
        alpha[(2, 2)] = -1.0;
        let rho = pauli_to_density(&PauliRep::new(alpha).unwrap());
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let phi_plus = ket_projector([h, z, z, h]);
        assert!(max_abs(&(rho.matrix() - phi_plus)) < 1e-15);
        rho.validate().unwrap();
    }

    #[test]
    fn identity_alpha_is_maximally_mixed() {
        let mut alpha = Matrix4::zeros();
        alpha[(0, 0)] = 1.0;
        let rho = pauli_to_density(&PauliRep::new(alpha).unwrap());
        assert!(max_abs(&(rho.matrix() - DensityMatrix::maximally_mixed(2).into_matrix())) < 1e-15);
    }

    #[test]
    fn negative_isotropic_block_spectrum() {
        let rep = PauliRep::from_correlators([-0.5, -0.5, -0.5]);
        let ev = pauli_to_density(&rep).eigenvalues().unwrap();
        let expected = [0.625, 0.125, 0.125, 0.125];
        for (x, y) in ev.iter().zip(expected) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_alpha00() {
        let alpha = Matrix4::identity() * 0.5;
        assert!(matches!(PauliRep::new(alpha), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn density_to_pauli_examples() {
        let rep = density_to_pauli(&DensityMatrix::maximally_mixed(2)).unwrap();
        let mut expected = Matrix4::zeros();
        expected[(0, 0)] = 1.0;
        assert!((rep.alpha() - expected).norm() < 1e-15);

        let singlet = DensityMatrix::pure(2, &BellDiagonal::bell_vector(3)).unwrap();
        let rep = density_to_pauli(&singlet).unwrap();
        assert!((rep.corr_matrix() + Matrix3::identity()).norm() < 1e-14);
        assert!(rep.row_vec().norm() < 1e-15 && rep.col_vec().norm() < 1e-15);

        let werner = make_werner(FRAC_1_SQRT_2).unwrap();
        let rep = density_to_pauli(&werner).unwrap();
        assert!((rep.corr_matrix() + Matrix3::identity() * FRAC_1_SQRT_2).norm() < 1e-14);
    }

    #[test]
    fn density_to_pauli_requires_qubits() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            density_to_pauli(&rho),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn bell_vectors_have_their_signatures() {
        for k in 0..4 {
            let rho = DensityMatrix::pure(2, &BellDiagonal::bell_vector(k)).unwrap();
            let corr = density_to_pauli(&rho).unwrap().corr_matrix();
            for i in 0..3 {
                assert_abs_diff_eq!(corr[(i, i)], BELL_SIGNATURES[k][i], epsilon = 1e-14);
            }
            let mut e = [0.0; 4];
            e[k] = 1.0;
            let bd = BellDiagonal::from_probabilities(e).unwrap();
            assert!(max_abs(&(bd.density().into_matrix() - rho.into_matrix())) < 1e-14);
        }
    }

    #[test]
    fn probs_to_corr_examples() {
        assert_eq!(
            bd_probs_to_corr([1.0, 0.0, 0.0, 0.0]).unwrap(),
            [1.0, 1.0, -1.0]
        );
        assert_eq!(bd_probs_to_corr([0.25; 4]).unwrap(), [0.0, 0.0, 0.0]);
        let w = 0.8;
        let a = bd_probs_to_corr([
            (1.0 + 3.0 * w) / 4.0,
            (1.0 - w) / 4.0,
            (1.0 - w) / 4.0,
            (1.0 - w) / 4.0,
        ])
        .unwrap();
        for (x, y) in a.iter().zip([0.8, 0.8, -0.8]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn probs_to_corr_rejects_invalid() {
        assert!(matches!(
            bd_probs_to_corr([1.1, -0.1, 0.0, 0.0]),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            bd_probs_to_corr([0.3, 0.3, 0.3, 0.3]),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn corr_to_probs_examples() {
        assert_eq!(bd_corr_to_probs([0.0; 3]), [0.25; 4]);
        assert_eq!(bd_corr_to_probs([1.0, -1.0, 1.0]), [0.0, 1.0, 0.0, 0.0]);
        assert!(bd_corr_to_probs([2.0, 0.0, 0.0]).iter().any(|&x| x < 0.0));
        assert!(matches!(
            BellDiagonal::from_correlators([2.0, 0.0, 0.0]),
            Err(Error::NonPhysical(_))
        ));
    }

    #[test]
    fn sign_flip_examples() {
        let rep = PauliRep::from_correlators([0.3, -0.2, 0.1]);
        assert_eq!(sign_flip(&rep), rep);
        let rep = PauliRep::from_blocks(
            Vector3::new(0.2, 0.0, 0.0),
            Vector3::new(0.0, 0.3, 0.0),
            Matrix3::identity() * 0.1,
        );
        let flipped = sign_flip(&rep);
        assert_eq!(flipped.row_vec(), -rep.row_vec());
        assert_eq!(flipped.col_vec(), -rep.col_vec());
        assert_eq!(flipped.corr_matrix(), rep.corr_matrix());
        assert_eq!(sign_flip(&flipped), rep);
    }

    #[test]
    fn product_state_reduction() {
        let up = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let rho = DensityMatrix::pure(2, &up).unwrap();
        let rep = density_to_pauli(&rho).unwrap();
        let reduced = reduce_to_maximally_mixed_marginals(&rep);
        assert!(reduced.row_vec().norm() == 0.0 && reduced.col_vec().norm() == 0.0);
        let expected = Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0));
        assert!((reduced.corr_matrix() - expected).norm() < 1e-15);
        assert_eq!(reduce_to_maximally_mixed_marginals(&reduced), reduced);
    }

    #[test]
    fn bd_project_examples() {
        let bd = BellDiagonal::from_correlators([0.3, -0.4, 0.2]).unwrap();
        let back = bd_project(&bd.density()).unwrap();
        for (x, y) in back.correlators().iter().zip(bd.correlators()) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }

        let up = [1.0, 0.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0));
        let rho = DensityMatrix::pure(2, &up).unwrap();
        let bd = bd_project(&rho).unwrap();
        assert_eq!(bd.correlators(), [0.0, 0.0, 1.0]);
        assert_eq!(bd.probabilities(), [0.0, 0.5, 0.5, 0.0]);

        let mut corr = Matrix3::new(0.3, 0.2, -0.1, 0.05, -0.25, 0.15, 0.1, 0.0, 0.2);
        corr[(0, 0)] = 0.3;
        let rep = PauliRep::from_blocks(Vector3::new(0.1, 0.0, 0.05), Vector3::zeros(), corr);
        let rho = pauli_to_density(&rep);
        rho.validate().unwrap();
        let bd = bd_project(&rho).unwrap();
        for (i, x) in bd.correlators().iter().enumerate() {
            assert_abs_diff_eq!(*x, corr[(i, i)], epsilon = 1e-15);
        }
    }

    #[test]
    fn twirl_examples() {
        let rho = make_isotropic(3, 0.4).unwrap();
        assert_abs_diff_eq!(twirl_isotropic(&rho).omega, 0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(
            twirl_isotropic(&DensityMatrix::maximally_mixed(4)).omega,
            0.0,
            epsilon = 1e-15
        );
    }

    /// Monte-Carlo Haar average of (U⊗U*)ρ(U⊗U*)† against the closed form.
    #[test]
    fn twirl_matches_haar_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_density(2, &mut rng);
        let samples = 10_000;
        let mut sum = CMatrix::zeros(4, 4);
        let mut sum_sq = nalgebra::DMatrix::<f64>::zeros(4, 4);
        for _ in 0..samples {
            let v = twirl_unitary(&random_unitary(2, &mut rng));
            let t = conjugate_by(&v, rho.matrix());
            for r in 0..4 {
                for c in 0..4 {
                    sum_sq[(r, c)] += t[(r, c)].norm_sqr();
                }
            }
            sum += t;
        }
        let mean = sum.unscale(samples as f64);
        let expected = make_isotropic_at(twirl_isotropic(&rho));
        for r in 0..4 {
            for c in 0..4 {
                let var = sum_sq[(r, c)] / samples as f64 - mean[(r, c)].norm_sqr();
                let sigma = (var.max(0.0) / samples as f64).sqrt();
                let err = (mean[(r, c)] - expected.matrix()[(r, c)]).norm();
                assert!(
                    err <= 3.0 * sigma + 1e-12,
                    "entry ({r},{c}): err {err} vs 3σ {}",
                    3.0 * sigma
                );
            }
        }
    }

    #[test]
    fn family_constructors() {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let phi = ket_projector([h, z, z, h]);
        assert!(max_abs(&(make_isotropic(2, 1.0).unwrap().into_matrix() - phi)) < 1e-15);
        let mixed = make_isotropic(3, 0.0).unwrap();
        assert!(max_abs(&(mixed.into_matrix() - CMatrix::identity(9, 9).scale(1.0 / 9.0))) < 1e-15);
        let ev = make_werner(FRAC_1_SQRT_2).unwrap().eigenvalues().unwrap();
        assert_abs_diff_eq!(ev[0], 0.780_330_085_889_910_6, epsilon = 1e-12);
        for x in &ev[1..] {
            assert_abs_diff_eq!(*x, 0.073_223_304_703_363_12, epsilon = 1e-12);
        }
        assert!(make_isotropic(1, 0.5).is_err());
        assert!(make_isotropic(2, -0.5).is_err());
        assert!(make_werner(1.2).is_err());
        assert!(make_werner(-1.0 / 3.0).is_err());
    }

    #[test]
    fn werner_corners_share_spectrum() {
        let spectra: Vec<Vec<f64>> = BellCorner::ALL
            .iter()
            .map(|&c| {
                make_werner_at(WernerParam::with_corner(0.6, c).unwrap())
                    .eigenvalues()
                    .unwrap()
            })
            .collect();
        for s in &spectra[1..] {
            for (x, y) in s.iter().zip(&spectra[0]) {
                assert_abs_diff_eq!(*x, *y, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn isotropic_two_qubits_is_phi_plus_werner() {
        let iso = make_isotropic(2, 0.6).unwrap();
        let wer = make_werner_at(WernerParam::with_corner(0.6, BellCorner::PhiPlus).unwrap());
        assert!(max_abs(&(iso.into_matrix() - wer.into_matrix())) < 1e-15);
    }
}
