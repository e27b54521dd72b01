//! Distances and the relative entropy between density matrices.
//!
//! Conventions: the Hellinger primitive is the *squared* distance
//! ‖√ρ₁ − √ρ₂‖₂², the trace distance carries the factor ½, and logarithms are
//! base 2.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, matrix_sqrt_psd, PSD_TOL};
use crate::state::{ensure_same_dim, DensityMatrix};

/// Eigenvalues below this count as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceKind {
    HilbertSchmidt,
    Hellinger,
    Bures,
    Trace,
    RelativeEntropy,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 5] = [
        DistanceKind::HilbertSchmidt,
        DistanceKind::Hellinger,
        DistanceKind::Bures,
        DistanceKind::Trace,
        DistanceKind::RelativeEntropy,
    ];

    /// Short tag used on the command line and in table headers.
    pub fn tag(self) -> &'static str {
        match self {
            DistanceKind::HilbertSchmidt => "hs",
            DistanceKind::Hellinger => "he",
            DistanceKind::Bures => "bu",
            DistanceKind::Trace => "tr",
            DistanceKind::RelativeEntropy => "re",
        }
    }

    pub fn is_symmetric(self) -> bool {
        !matches!(self, DistanceKind::RelativeEntropy)
    }

    /// Whether the measure built on this kind is reported as a squared distance.
    pub fn reported_squared(self) -> bool {
        matches!(self, DistanceKind::Hellinger | DistanceKind::Bures)
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hs" | "hilbert-schmidt" => Ok(DistanceKind::HilbertSchmidt),
            "he" | "hellinger" => Ok(DistanceKind::Hellinger),
            "bu" | "bures" => Ok(DistanceKind::Bures),
            "tr" | "trace" => Ok(DistanceKind::Trace),
            "re" | "relative-entropy" => Ok(DistanceKind::RelativeEntropy),
            other => Err(Error::OutOfRange(format!(
                "unknown distance kind '{other}'"
            ))),
        }
    }
}

/// ‖ρ₁ − ρ₂‖₂.
pub fn dist_hs(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(r1, r2)?;
    Ok((r1.matrix() - r2.matrix()).norm())
}

/// ‖√ρ₁ − √ρ₂‖₂².
pub fn dist_hellinger_sq(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(r1, r2)?;
    let s1 = matrix_sqrt_psd(r1.matrix())?;
    let s2 = matrix_sqrt_psd(r2.matrix())?;
    Ok((s1 - s2).norm_squared())
}

/// ‖√ρ₁ − √ρ₂‖₂, the metric form.
pub fn dist_hellinger(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    dist_hellinger_sq(r1, r2).map(f64::sqrt)
}

/// Uhlmann fidelity (Tr √(√ρ₁ ρ₂ √ρ₁))².
pub fn fidelity(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(r1, r2)?;
    let s1 = matrix_sqrt_psd(r1.matrix())?;
    let s2 = matrix_sqrt_psd(r2.matrix())?;
    // Tr √(√ρ₁ ρ₂ √ρ₁) = ‖√ρ₁ √ρ₂‖₁
    let root_trace: f64 = (s1 * s2).singular_values().iter().sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// √(2[1 − √F]).
pub fn dist_bures(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    let f = fidelity(r1, r2)?;
    Ok((2.0 * (1.0 - f.sqrt())).max(0.0).sqrt())
}

/// ½ Σ |λᵢ(ρ₁ − ρ₂)|.
pub fn dist_trace(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(r1, r2)?;
    let eig = eig_hermitian(&(r1.matrix() - r2.matrix()))?;
    Ok(0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}

/// S(ρ₁‖ρ₂) = Tr ρ₁ log₂ ρ₁ − Tr ρ₁ log₂ ρ₂, `+∞` when supp ρ₁ ⊄ supp ρ₂.
pub fn rel_entropy(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(r1, r2)?;
    let e1 = eig_hermitian(r1.matrix())?;
    let e2 = eig_hermitian(r2.matrix())?;
    for eig in [&e1, &e2] {
        let min = eig.eigenvalues.min();
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
    }

    let entropy_term: f64 = e1
        .eigenvalues
        .iter()
        .filter(|&&p| p > SUPPORT_TOL)
        .map(|&p| p * p.log2())
        .sum();

    let mut cross = 0.0;
    for (j, &q) in e2.eigenvalues.iter().enumerate() {
        let v = e2.eigenvectors.column(j);
        let weight = (v.adjoint() * r1.matrix() * v)[(0, 0)].re;
        if q < SUPPORT_TOL {
            if weight > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * q.log2();
    }
    Ok((entropy_term - cross).max(0.0))
}

/// The functional a nonlocality measure minimises for `kind`.
///
/// Hellinger and Bures are returned squared so that the two coincide on
/// commuting pairs.
pub fn measure_functional(
    kind: DistanceKind,
    r1: &DensityMatrix,
    r2: &DensityMatrix,
) -> Result<f64> {
    match kind {
        DistanceKind::HilbertSchmidt => dist_hs(r1, r2),
        DistanceKind::Hellinger => dist_hellinger_sq(r1, r2),
        DistanceKind::Bures => dist_bures(r1, r2).map(|d| d * d),
        DistanceKind::Trace => dist_trace(r1, r2),
        DistanceKind::RelativeEntropy => rel_entropy(r1, r2),
    }
}

/// Metric form of each distance (unsquared Hellinger); `None` for the relative entropy.
pub fn metric_distance(
    kind: DistanceKind,
    r1: &DensityMatrix,
    r2: &DensityMatrix,
) -> Result<Option<f64>> {
    Ok(match kind {
        DistanceKind::HilbertSchmidt => Some(dist_hs(r1, r2)?),
        DistanceKind::Hellinger => Some(dist_hellinger(r1, r2)?),
        DistanceKind::Bures => Some(dist_bures(r1, r2)?),
        DistanceKind::Trace => Some(dist_trace(r1, r2)?),
        DistanceKind::RelativeEntropy => None,
    })
}

/// Commuting-case forms in terms of the two spectra in a shared eigenbasis.
pub mod commuting {
    pub fn hs(p: &[f64], q: &[f64]) -> f64 {
        p.iter()
            .zip(q)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Σ √(pᵢqᵢ).
    pub fn affinity(p: &[f64], q: &[f64]) -> f64 {
        p.iter()
            .zip(q)
            .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
            .sum()
    }

    pub fn hellinger_sq(p: &[f64], q: &[f64]) -> f64 {
        p.iter()
            .zip(q)
            .map(|(a, b)| {
                let d = a.max(0.0).sqrt() - b.max(0.0).sqrt();
                d * d
            })
            .sum()
    }

    pub fn fidelity(p: &[f64], q: &[f64]) -> f64 {
        let s = affinity(p, q);
        s * s
    }

    pub fn bures_sq(p: &[f64], q: &[f64]) -> f64 {
        (2.0 * (1.0 - affinity(p, q))).max(0.0)
    }

    pub fn trace(p: &[f64], q: &[f64]) -> f64 {
        0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    pub fn rel_entropy(p: &[f64], q: &[f64]) -> f64 {
        let mut s = 0.0;
        for (&a, &b) in p.iter().zip(q) {
            if a <= 0.0 {
                continue;
            }
            if b <= 0.0 {
                return f64::INFINITY;
            }
            s += a * (a.log2() - b.log2());
        }
        s.max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::state::{make_werner, pauli_to_density, BellDiagonal, PauliRep};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn werner_pair() -> (DensityMatrix, DensityMatrix) {
        (
            make_werner(1.0).unwrap(),
            make_werner(FRAC_1_SQRT_2).unwrap(),
        )
    }

    fn basis_state(dim: usize, k: usize) -> DensityMatrix {
        let mut psi = vec![Complex64::new(0.0, 0.0); dim * dim];
        psi[k] = Complex64::new(1.0, 0.0);
        DensityMatrix::pure(dim, &psi).unwrap()
    }

    #[test]
    fn identical_states_are_at_zero() {
        let (r, _) = werner_pair();
        let m = make_werner(0.4).unwrap();
        for rho in [&r, &m] {
            for kind in DistanceKind::ALL {
                let v = measure_functional(kind, rho, rho).unwrap();
                assert!(v.abs() < 1e-7, "{kind}: {v}");
            }
            assert_abs_diff_eq!(fidelity(rho, rho).unwrap(), 1.0, epsilon = 1e-7);
        }
        // mixed states are full rank so the root is well conditioned
        assert!(dist_bures(&m, &m).unwrap() < 1e-7);
        assert!(dist_hellinger_sq(&m, &m).unwrap() < 1e-14);
    }

    #[test]
    fn werner_extremes() {
        let (bell, edge) = werner_pair();
        let t = FRAC_1_SQRT_2;
        let hs = 3f64.sqrt() / 2.0 * (1.0 - t);
        assert_abs_diff_eq!(dist_hs(&bell, &edge).unwrap(), hs, epsilon = 1e-12);
        assert_abs_diff_eq!(
            dist_hellinger_sq(&bell, &edge).unwrap(),
            2.0 - (1.0 + 3.0 * t).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            fidelity(&bell, &edge).unwrap(),
            (1.0 + 3.0 * t) / 4.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            fidelity(&bell, &edge).unwrap(),
            0.780_330_085_889_910_6,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            dist_trace(&bell, &edge).unwrap(),
            0.75 * (1.0 - t),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            rel_entropy(&bell, &edge).unwrap(),
            2.0 - (1.0 + 3.0 * t).log2(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hs_equals_half_pauli_distance() {
        let a = PauliRep::from_correlators([0.3, -0.2, 0.5]);
        let b = PauliRep::from_correlators([-0.1, 0.4, 0.2]);
        let d = dist_hs(&pauli_to_density(&a), &pauli_to_density(&b)).unwrap();
        assert_abs_diff_eq!(d, 0.5 * a.frobenius_distance(&b), epsilon = 1e-14);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = basis_state(2, 0);
        let b = basis_state(2, 3);
        assert_abs_diff_eq!(dist_hellinger_sq(&a, &b).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&a, &b).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_bures(&a, &b).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(dist_trace(&a, &b).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(rel_entropy(&a, &b).unwrap(), f64::INFINITY);
    }

    #[test]
    fn bures_matches_hellinger_on_bell_diagonal_pairs() {
        let p = BellDiagonal::from_correlators([0.3, -0.5, 0.4]).unwrap();
        let q = BellDiagonal::from_correlators([-0.2, 0.1, 0.6]).unwrap();
        let bu = dist_bures(&p.density(), &q.density()).unwrap();
        let he = dist_hellinger_sq(&p.density(), &q.density()).unwrap();
        assert_abs_diff_eq!(bu * bu, he, epsilon = 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = DensityMatrix::maximally_mixed(2);
        let b = DensityMatrix::maximally_mixed(3);
        for kind in DistanceKind::ALL {
            assert!(matches!(
                measure_functional(kind, &a, &b),
                Err(Error::DimensionMismatch { .. })
            ));
        }
    }

    #[test]
    fn non_psd_is_reported() {
        let bad = pauli_to_density(&PauliRep::from_correlators([0.5, 0.5, 0.5]));
        let ok = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            dist_hellinger_sq(&bad, &ok),
            Err(Error::NotPsd(_))
        ));
        assert!(matches!(fidelity(&ok, &bad), Err(Error::NotPsd(_))));
        assert!(matches!(rel_entropy(&bad, &ok), Err(Error::NotPsd(_))));
    }

    #[test]
    fn relative_entropy_is_asymmetric() {
        let a = make_werner(0.9).unwrap();
        let b = DensityMatrix::maximally_mixed(2);
        let ab = rel_entropy(&a, &b).unwrap();
        let ba = rel_entropy(&b, &a).unwrap();
        assert!((ab - ba).abs() > 1e-3);
        assert!(!DistanceKind::RelativeEntropy.is_symmetric());
    }

    #[test]
    fn kind_tags_round_trip() {
        for kind in DistanceKind::ALL {
            assert_eq!(kind.tag().parse::<DistanceKind>().unwrap(), kind);
        }
        assert!("xx".parse::<DistanceKind>().is_err());
    }

    #[test]
    fn rank_deficient_second_argument_with_matching_support() {
        let pure = basis_state(2, 1);
        let mut m = CMatrix::zeros(4, 4);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        m[(2, 2)] = Complex64::new(0.5, 0.0);
        let mixed = DensityMatrix::new(2, m).unwrap();
        assert_abs_diff_eq!(rel_entropy(&pure, &mixed).unwrap(), 1.0, epsilon = 1e-12);
    }
}
