//! Geometric and entropic nonlocality measures M(ρ) = min over local ρ′ of D(ρ, ρ′).

mod numeric;
mod objective;
mod solver;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::locality::{cglmp_threshold, max_pair_sum, SurfaceId, LOCALITY_TOL};
use crate::metrics::{measure_functional, DistanceKind};
use crate::state::{
    bd_probs_to_corr, in_tetrahedron, make_isotropic_at, BellDiagonal, DensityMatrix,
    IsotropicParam, WernerParam,
};

pub use numeric::{bd_measure_numeric, bd_measure_numeric_all};
pub use objective::BdObjective;

/// CHSH threshold of the two-qubit Werner family.
pub const WERNER_THRESHOLD: f64 = FRAC_1_SQRT_2;

/// The local state at which a minimum is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosestLocal {
    BellDiagonal(BellDiagonal),
    Werner(WernerParam),
    Isotropic(IsotropicParam),
}

impl ClosestLocal {
    pub fn density(&self) -> DensityMatrix {
        match self {
            ClosestLocal::BellDiagonal(bd) => bd.density(),
            ClosestLocal::Werner(p) => p.bell_diagonal().density(),
            ClosestLocal::Isotropic(p) => make_isotropic_at(*p),
        }
    }

    /// Correlators for the two-qubit variants.
    pub fn correlators(&self) -> Option<[f64; 3]> {
        match self {
            ClosestLocal::BellDiagonal(bd) => Some(bd.correlators()),
            ClosestLocal::Werner(p) => Some(p.correlators()),
            ClosestLocal::Isotropic(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    LagrangeCase,
    Numeric,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::LagrangeCase => "lagrange_case",
            Method::Numeric => "numeric",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub kind: DistanceKind,
    /// Hellinger and Bures values are squared distances; relative entropy is in bits.
    pub value: f64,
    pub closest_local: ClosestLocal,
    pub method: Method,
    pub surface: Option<SurfaceId>,
    pub iterations: usize,
    pub converged: bool,
    /// Stationarity residual of the Lagrangian at the returned point.
    pub residual: f64,
}

impl MeasureResult {
    fn exact(kind: DistanceKind, value: f64, closest_local: ClosestLocal) -> Self {
        Self {
            kind,
            value,
            closest_local,
            method: Method::ClosedForm,
            surface: None,
            iterations: 0,
            converged: true,
            residual: 0.0,
        }
    }
}

/// Settings of the constrained minimiser.
///
/// `penalty_growth` is the factor by which the barrier weight increases
/// between centering phases, and `seeds` the number of starting points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub param_tol: f64,
    pub value_tol: f64,
    pub max_iters: usize,
    pub seeds: usize,
    pub penalty_growth: f64,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            param_tol: 1e-9,
            value_tol: 1e-10,
            max_iters: 500,
            seeds: 8,
            penalty_growth: 10.0,
            rng_seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.param_tol) || !positive(self.value_tol) {
            return Err(Error::OutOfRange(
                "optimizer tolerances must be positive".into(),
            ));
        }
        if self.max_iters == 0 || self.seeds == 0 {
            return Err(Error::OutOfRange(
                "max_iters and seeds must be positive".into(),
            ));
        }
        if !(self.penalty_growth > 1.0 && self.penalty_growth.is_finite()) {
            return Err(Error::OutOfRange("penalty_growth must exceed 1".into()));
        }
        Ok(())
    }
}

/// The printed Werner expressions, valid for w ≥ 1/√2.
pub fn werner_closed_form(kind: DistanceKind, w: f64) -> f64 {
    let t = WERNER_THRESHOLD;
    match kind {
        DistanceKind::HilbertSchmidt => 3f64.sqrt() / 2.0 * (w - t),
        DistanceKind::Trace => 0.75 * (w - t),
        DistanceKind::Hellinger | DistanceKind::Bures => {
            2.0 - 0.5
                * (3.0 * ((1.0 - w) * (1.0 - t)).sqrt()
                    + ((1.0 + 3.0 * w) * (1.0 + 3.0 * t)).sqrt())
        }
        DistanceKind::RelativeEntropy => {
            let top = (1.0 + 3.0 * w) / 4.0 * ((1.0 + 3.0 * w) / (1.0 + 3.0 * t)).log2();
            let rest = if w < 1.0 {
                3.0 * (1.0 - w) / 4.0 * ((1.0 - w) / (1.0 - t)).log2()
            } else {
                0.0
            };
            top + rest
        }
    }
}

/// Measure of the Werner state at w = 1.
pub fn werner_maximum(kind: DistanceKind) -> f64 {
    werner_closed_form(kind, 1.0)
}

pub fn werner_measure(kind: DistanceKind, w: f64) -> Result<MeasureResult> {
    Ok(werner_measure_at(kind, WernerParam::new(w)?))
}

/// Distance from a Werner state to the Werner state at the CHSH threshold,
/// evaluated on the two Bell spectra.
pub fn werner_measure_at(kind: DistanceKind, param: WernerParam) -> MeasureResult {
    if param.w <= WERNER_THRESHOLD {
        return MeasureResult::exact(kind, 0.0, ClosestLocal::Werner(param));
    }
    let boundary = WernerParam {
        w: WERNER_THRESHOLD,
        corner: param.corner,
    };
    let value = BdObjective::new(kind, &param.bell_diagonal()).value(boundary.correlators());
    MeasureResult::exact(kind, value, ClosestLocal::Werner(boundary))
}

/// Definition-based isotropic measure alongside the published closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicMeasure {
    pub result: MeasureResult,
    /// Published expression; `None` at or below threshold and for Bures.
    pub printed: Option<f64>,
    /// Whether `printed` agrees with the computed value to 1e-9 (relative).
    pub consistent: Option<bool>,
}

/// Published isotropic expressions, logarithms in base 2.
pub fn isotropic_printed(kind: DistanceKind, d: usize, omega: f64) -> Result<Option<f64>> {
    let w0 = cglmp_threshold(d)?.omega_threshold;
    let n = (d * d) as f64;
    let df = d as f64;
    let v = match kind {
        DistanceKind::HilbertSchmidt => Some((1.0 - 1.0 / n).sqrt() * (omega - w0)),
        DistanceKind::Trace => Some(2.0 * (n - 1.0) / n * (omega - w0)),
        DistanceKind::Hellinger => Some(
            2.0 - 2.0 / df
                * ((n - 1.0) * ((1.0 - omega) * (1.0 - w0)).sqrt()
                    + (((n - 1.0) * omega + 1.0) * ((n - 1.0) * w0 + 1.0)).sqrt()),
        ),
        DistanceKind::RelativeEntropy => {
            let xlogx = |x: f64| x * x.log2();
            let top = ((n - 1.0) * omega + 1.0) / n;
            let top0 = ((n - 1.0) * w0 + 1.0) / n;
            Some(
                xlogx(top)
                    + (n - 1.0) / n * ((1.0 - omega) / n).log2()
                    + xlogx(top0)
                    + (n - 1.0) / n * ((1.0 - w0) / n).log2(),
            )
        }
        DistanceKind::Bures => None,
    };
    Ok(v)
}

pub fn isotropic_measure(kind: DistanceKind, d: usize, omega: f64) -> Result<IsotropicMeasure> {
    let param = IsotropicParam::new(d, omega)?;
    let w0 = cglmp_threshold(d)?.omega_threshold;
    if omega <= w0 + LOCALITY_TOL {
        return Ok(IsotropicMeasure {
            result: MeasureResult::exact(kind, 0.0, ClosestLocal::Isotropic(param)),
            printed: None,
            consistent: None,
        });
    }
    let boundary = IsotropicParam { d, omega: w0 };
    let value = measure_functional(
        kind,
        &make_isotropic_at(param),
        &make_isotropic_at(boundary),
    )?;
    let printed = isotropic_printed(kind, d, omega)?;
    let consistent = printed.map(|p| (p - value).abs() <= 1e-9 * value.abs().max(1.0));
    Ok(IsotropicMeasure {
        result: MeasureResult::exact(kind, value, ClosestLocal::Isotropic(boundary)),
        printed,
        consistent,
    })
}

pub fn bd_measure_hs(a: [f64; 3]) -> Result<MeasureResult> {
    bd_measure_hs_with(a, &OptimizerConfig::default())
}

/// Hilbert–Schmidt measure of a Bell-diagonal state.
///
/// Each pair (i, j) gives the candidate that rescales (aᵢ, aⱼ) onto the unit
/// circle. A candidate that keeps the pair dominant and stays physical is the
/// projection onto the local set; otherwise the numeric minimiser is used.
pub fn bd_measure_hs_with(a: [f64; 3], cfg: &OptimizerConfig) -> Result<MeasureResult> {
    let kind = DistanceKind::HilbertSchmidt;
    let target = BellDiagonal::from_correlators(a)?;
    if max_pair_sum(a) <= 1.0 + LOCALITY_TOL {
        return Ok(MeasureResult::exact(
            kind,
            0.0,
            ClosestLocal::BellDiagonal(target),
        ));
    }
    let mut best: Option<MeasureResult> = None;
    for id in SurfaceId::PAIRS {
        let (i, j, k) = id.pair_indices().unwrap();
        let r = (a[i] * a[i] + a[j] * a[j]).sqrt();
        let mut c = a;
        c[i] /= r;
        c[j] /= r;
        if c[i].abs() < c[k].abs() || c[j].abs() < c[k].abs() || !in_tetrahedron(c) {
            continue;
        }
        let value = 0.5 * (r - 1.0);
        if best.as_ref().is_some_and(|b| b.value <= value) {
            continue;
        }
        // ∇(¼|a − a′|²) + λ∇(aᵢ′² + aⱼ′²) vanishes with λ = (r − 1)/4
        let lambda = (r - 1.0) / 4.0;
        let residual = (0..3)
            .map(|m| {
                let dg = if m == i || m == j { 2.0 * c[m] } else { 0.0 };
                (-0.5 * (a[m] - c[m]) + lambda * dg).abs()
            })
            .fold(0.0, f64::max);
        best = Some(MeasureResult {
            kind,
            value,
            closest_local: ClosestLocal::BellDiagonal(BellDiagonal::from_correlators(c)?),
            method: Method::LagrangeCase,
            surface: Some(id),
            iterations: 0,
            converged: true,
            residual,
        });
    }
    match best {
        Some(r) => Ok(r),
        None => bd_measure_numeric(kind, a, cfg),
    }
}

/// Measure of a Bell-diagonal state: the case analysis for Hilbert–Schmidt,
/// the numeric minimiser for every other kind.
pub fn bd_measure(kind: DistanceKind, a: [f64; 3], cfg: &OptimizerConfig) -> Result<MeasureResult> {
    match kind {
        DistanceKind::HilbertSchmidt => bd_measure_hs_with(a, cfg),
        _ => bd_measure_numeric(kind, a, cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepFamily {
    /// p|Φ⁺⟩⟨Φ⁺| + (1−p)|Φ⁻⟩⟨Φ⁻| for p ∈ [½, 1], a = (2p−1, −(2p−1), 1).
    TwoBellMix,
    /// Werner states at the singlet corner for w ∈ [1/√2, 1].
    WernerLine,
}

impl SweepFamily {
    pub fn tag(self) -> &'static str {
        match self {
            SweepFamily::TwoBellMix => "two_bell_mix",
            SweepFamily::WernerLine => "werner_line",
        }
    }

    pub fn range(self) -> (f64, f64) {
        match self {
            SweepFamily::TwoBellMix => (0.5, 1.0),
            SweepFamily::WernerLine => (WERNER_THRESHOLD, 1.0),
        }
    }

    pub fn correlators(self, param: f64) -> [f64; 3] {
        match self {
            SweepFamily::TwoBellMix => {
                let x = 2.0 * param - 1.0;
                [x, -x, 1.0]
            }
            SweepFamily::WernerLine => [-param, -param, -param],
        }
    }
}

impl std::str::FromStr for SweepFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_bell_mix" | "two-bell-mix" => Ok(SweepFamily::TwoBellMix),
            "werner_line" | "werner-line" => Ok(SweepFamily::WernerLine),
            other => Err(Error::OutOfRange(format!("unknown sweep family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    pub correlators: [f64; 3],
    pub result: MeasureResult,
    /// Value divided by the Werner maximum of the same kind.
    pub normalized: f64,
}

/// Evenly spaced sweep over a one-parameter family, endpoints included.
pub fn bd_sweep(
    kind: DistanceKind,
    family: SweepFamily,
    n_points: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<SweepPoint>> {
    if n_points < 2 {
        return Err(Error::OutOfRange(format!(
            "sweep needs at least 2 points, got {n_points}"
        )));
    }
    let (lo, hi) = family.range();
    let max = werner_maximum(kind);
    (0..n_points)
        .into_par_iter()
        .map(|i| {
            let param = if i + 1 == n_points {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n_points - 1) as f64
            };
            let correlators = family.correlators(param);
            let result = bd_measure(kind, correlators, cfg)?;
            Ok(SweepPoint {
                param,
                correlators,
                normalized: result.value / max,
                result,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub result: MeasureResult,
    pub normalized: f64,
}

/// Normalised measure on the slice e₄ = 0 at nodes (i/n, j/n), i + j ≤ n,
/// in row-major order over (i, j).
pub fn bd_grid(kind: DistanceKind, grid_n: usize, cfg: &OptimizerConfig) -> Result<Vec<GridPoint>> {
    if grid_n < 2 {
        return Err(Error::OutOfRange(format!(
            "grid needs n >= 2, got {grid_n}"
        )));
    }
    let n = grid_n as f64;
    let nodes: Vec<(usize, usize)> = (0..=grid_n)
        .flat_map(|i| (0..=grid_n - i).map(move |j| (i, j)))
        .collect();
    let max = werner_maximum(kind);
    nodes
        .into_par_iter()
        .map(|(i, j)| {
            let e = [i as f64 / n, j as f64 / n, (grid_n - i - j) as f64 / n, 0.0];
            let a = bd_probs_to_corr(e)?;
            let result = bd_measure(kind, a, cfg)?;
            Ok(GridPoint {
                e1: e[0],
                e2: e[1],
                e3: e[2],
                normalized: result.value / max,
                result,
            })
        })
        .collect()
}
