//! Membership tests for the local set and the shape of its boundary.
//!
//! Two qubits: a state is CHSH-local iff the two largest singular values of
//! its correlation block satisfy d₁² + d₂² ≤ 1. Isotropic two-qudit states:
//! CGLMP-local iff ω ≤ 2 / I_d, with I_d the maximal quantum CGLMP value.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::state::{bd_corr_to_probs, in_tetrahedron, PauliRep, BELL_SIGNATURES};

/// Slack on the closed CHSH-local set.
pub const LOCALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshVerdict {
    /// Singular values of the correlation block, descending.
    pub singulars: [f64; 3],
    /// d₁² + d₂².
    pub criterion_value: f64,
    pub is_local: bool,
}

pub fn chsh_verdict(rep: &PauliRep) -> ChshVerdict {
    let svd = rep.corr_matrix().svd(false, false);
    let mut s = [
        svd.singular_values[0],
        svd.singular_values[1],
        svd.singular_values[2],
    ];
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let criterion_value = s[0] * s[0] + s[1] * s[1];
    ChshVerdict {
        singulars: s,
        criterion_value,
        is_local: criterion_value <= 1.0 + LOCALITY_TOL,
    }
}

/// q_k = 1 / (2d³ sin²[π(k + ¼)/d]).
pub fn cglmp_qk(d: usize, k: i64) -> Result<f64> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("CGLMP dimension {d} < 2")));
    }
    let df = d as f64;
    let s = (PI * (k as f64 + 0.25) / df).sin();
    Ok(1.0 / (2.0 * df.powi(3) * s * s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CglmpThreshold {
    pub d: usize,
    /// Maximal quantum value I_d(QM) of the CGLMP expression.
    pub i_d_qm: f64,
    /// Isotropic states with ω above this violate the inequality.
    pub omega_threshold: f64,
}

/// I_d = 4d Σ_{k=0}^{⌊d/2⌋−1} (1 − 2k/(d−1)) (q_k − q_{−(k+1)}).
pub fn cglmp_threshold(d: usize) -> Result<CglmpThreshold> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("CGLMP dimension {d} < 2")));
    }
    let df = d as f64;
    let mut sum = 0.0;
    for k in 0..(d / 2) as i64 {
        // at d = 2 only k = 0 contributes and the weight is 1
        let weight = 1.0 - 2.0 * k as f64 / (df - 1.0);
        sum += weight * (cglmp_qk(d, k)? - cglmp_qk(d, -(k + 1))?);
    }
    let i_d_qm = 4.0 * df * sum;
    Ok(CglmpThreshold {
        d,
        i_d_qm,
        omega_threshold: 2.0 / i_d_qm,
    })
}

/// max over pairs i≠j of aᵢ² + aⱼ².
pub fn max_pair_sum(a: [f64; 3]) -> f64 {
    let [x, y, z] = a.map(|v| v * v);
    (x + y).max(x + z).max(y + z)
}

/// CHSH locality of a Bell-diagonal state given by its correlators.
pub fn bd_is_chsh_local(a: [f64; 3]) -> Result<bool> {
    if !in_tetrahedron(a) {
        return Err(Error::NonPhysical(a));
    }
    Ok(max_pair_sum(a) <= 1.0 + LOCALITY_TOL)
}

/// Pieces of the boundary of the local Bell-diagonal region.
///
/// Ordering of the variants is the tie-break order used when several pieces
/// are active at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceId {
    /// a₁² + a₂² = 1
    Pair12,
    /// a₁² + a₃² = 1
    Pair13,
    /// a₂² + a₃² = 1
    Pair23,
    /// Tetrahedron facet eₖ = 0 (k is zero-based).
    Facet(u8),
}

impl SurfaceId {
    pub const PAIRS: [SurfaceId; 3] = [SurfaceId::Pair12, SurfaceId::Pair13, SurfaceId::Pair23];

    /// Coordinate indices (i, j, k) with (i, j) the constrained pair.
    pub fn pair_indices(self) -> Option<(usize, usize, usize)> {
        match self {
            SurfaceId::Pair12 => Some((0, 1, 2)),
            SurfaceId::Pair13 => Some((0, 2, 1)),
            SurfaceId::Pair23 => Some((1, 2, 0)),
            SurfaceId::Facet(_) => None,
        }
    }

    pub fn label(self) -> String {
        match self {
            SurfaceId::Pair12 => "pair12".into(),
            SurfaceId::Pair13 => "pair13".into(),
            SurfaceId::Pair23 => "pair23".into(),
            SurfaceId::Facet(k) => format!("facet{}", k + 1),
        }
    }

    /// Signed constraint value; zero on the surface, negative on the local side.
    pub fn constraint(self, a: [f64; 3]) -> f64 {
        match self.pair_indices() {
            Some((i, j, _)) => a[i] * a[i] + a[j] * a[j] - 1.0,
            None => {
                let SurfaceId::Facet(k) = self else {
                    unreachable!()
                };
                -bd_corr_to_probs(a)[k as usize]
            }
        }
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// One smooth piece of the boundary of the local Bell-diagonal set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceDescriptor {
    pub id: SurfaceId,
}

impl SurfaceDescriptor {
    pub fn constraint(&self, a: [f64; 3]) -> f64 {
        self.id.constraint(a)
    }

    /// Whether `a` belongs to the part of this surface that bounds the local set.
    ///
    /// For a pair surface the pair must dominate (|aᵢ|,|aⱼ| ≥ |aₖ|) and the
    /// point must be physical; for a facet the point must be in the facet
    /// triangle and CHSH-local.
    pub fn is_valid(&self, a: [f64; 3]) -> bool {
        if !in_tetrahedron(a) {
            return false;
        }
        match self.id.pair_indices() {
            Some((i, j, k)) => a[i].abs() >= a[k].abs() && a[j].abs() >= a[k].abs(),
            None => max_pair_sum(a) <= 1.0 + LOCALITY_TOL,
        }
    }

    /// Point on the surface for parameters (u, v).
    ///
    /// Pair surfaces: aᵢ = cos u, aⱼ = sin u, aₖ = v. Facets: barycentric
    /// coordinates (1−u−v, u, v) over the three vertices spanning the facet.
    pub fn parametrize(&self, u: f64, v: f64) -> [f64; 3] {
        match self.id {
            SurfaceId::Facet(k) => {
                let verts: Vec<[f64; 3]> = (0..4)
                    .filter(|&m| m != k as usize)
                    .map(|m| BELL_SIGNATURES[m])
                    .collect();
                let w = [1.0 - u - v, u, v];
                let mut a = [0.0; 3];
                for (vert, wt) in verts.iter().zip(w) {
                    for i in 0..3 {
                        a[i] += wt * vert[i];
                    }
                }
                a
            }
            id => {
                let (i, j, k) = id.pair_indices().unwrap();
                let mut a = [0.0; 3];
                a[i] = u.cos();
                a[j] = u.sin();
                a[k] = v;
                a
            }
        }
    }
}

/// The three quadratic pieces followed by the four tetrahedron facets.
pub fn bd_local_boundary_surfaces() -> Vec<SurfaceDescriptor> {
    SurfaceId::PAIRS
        .into_iter()
        .chain((0..4).map(SurfaceId::Facet))
        .map(|id| SurfaceDescriptor { id })
        .collect()
}
