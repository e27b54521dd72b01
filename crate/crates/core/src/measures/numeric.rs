//! Multi-start constrained minimisation over the CHSH-local Bell-diagonal set.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::objective::BdObjective;
use super::solver::{self, ConvexProblem, Settings};
use super::{ClosestLocal, MeasureResult, Method, OptimizerConfig};
use crate::error::{Error, Result};
use crate::locality::{max_pair_sum, SurfaceId, LOCALITY_TOL};
use crate::metrics::DistanceKind;
use crate::state::{bd_corr_to_probs, random_bell_diagonal, BellDiagonal, BELL_SIGNATURES};

/// Constraint values within this distance of zero count as active.
const ACTIVE_SURFACE_TOL: f64 = 1e-8;
/// Seeds are pulled this far inside the feasible set.
const SEED_SHRINK: f64 = 0.95;
const TIE_TOL: f64 = 1e-12;

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Smooth reformulation handed to the barrier solver.
///
/// Variables are a′ (and, for the trace distance, epigraph slacks s₁..s₄).
/// Constraints 0..3 are the pair sums, 3..7 the tetrahedron facets, and for
/// the trace distance 7..15 bound |eₖ − eₖ′| by sₖ.
struct BdProblem {
    kind: DistanceKind,
    a: [f64; 3],
    e: [f64; 4],
}

impl BdProblem {
    fn new(obj: &BdObjective) -> Self {
        Self {
            kind: obj.kind(),
            a: obj.target(),
            e: obj.target_probabilities(),
        }
    }

    fn epigraph(&self) -> bool {
        self.kind == DistanceKind::Trace
    }

    fn probs(x: &DVector<f64>) -> [f64; 4] {
        bd_corr_to_probs([x[0], x[1], x[2]])
    }

    fn signature(&self, k: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        for i in 0..3 {
            v[i] = BELL_SIGNATURES[k][i] / 4.0;
        }
        v
    }

    fn start(&self, ap: [f64; 3]) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim());
        for i in 0..3 {
            x[i] = ap[i];
        }
        if self.epigraph() {
            let ep = bd_corr_to_probs(ap);
            for k in 0..4 {
                x[3 + k] = (self.e[k] - ep[k]).abs() + 0.05;
            }
        }
        x
    }
}

impl ConvexProblem for BdProblem {
    fn dim(&self) -> usize {
        if self.epigraph() {
            7
        } else {
            3
        }
    }

    fn num_constraints(&self) -> usize {
        if self.epigraph() {
            15
        } else {
            7
        }
    }

    fn objective(&self, x: &DVector<f64>) -> f64 {
        let ep = Self::probs(x);
        match self.kind {
            DistanceKind::HilbertSchmidt => {
                0.25 * (0..3).map(|i| (self.a[i] - x[i]).powi(2)).sum::<f64>()
            }
            DistanceKind::Hellinger | DistanceKind::Bures => {
                2.0 - 2.0 * (0..4).map(|k| (self.e[k] * ep[k]).sqrt()).sum::<f64>()
            }
            DistanceKind::Trace => 0.5 * (3..7).map(|i| x[i]).sum::<f64>(),
            DistanceKind::RelativeEntropy => (0..4)
                .filter(|&k| self.e[k] > 0.0)
                .map(|k| self.e[k] * (self.e[k].log2() - ep[k].log2()))
                .sum(),
        }
    }

    fn objective_grad(&self, x: &DVector<f64>) -> DVector<f64> {
        let ep = Self::probs(x);
        let mut g = DVector::zeros(self.dim());
        match self.kind {
            DistanceKind::HilbertSchmidt => {
                for i in 0..3 {
                    g[i] = -0.5 * (self.a[i] - x[i]);
                }
            }
            DistanceKind::Hellinger | DistanceKind::Bures => {
                for k in (0..4).filter(|&k| self.e[k] > 0.0) {
                    g -= self.signature(k) * (self.e[k] / ep[k]).sqrt();
                }
            }
            DistanceKind::Trace => {
                for i in 3..7 {
                    g[i] = 0.5;
                }
            }
            DistanceKind::RelativeEntropy => {
                for k in (0..4).filter(|&k| self.e[k] > 0.0) {
                    g -= self.signature(k) * (self.e[k] / (ep[k] * std::f64::consts::LN_2));
                }
            }
        }
        g
    }

    fn objective_hess(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let ep = Self::probs(x);
        let n = self.dim();
        let mut h = DMatrix::zeros(n, n);
        match self.kind {
            DistanceKind::HilbertSchmidt => {
                for i in 0..3 {
                    h[(i, i)] = 0.5;
                }
            }
            DistanceKind::Hellinger | DistanceKind::Bures => {
                for k in (0..4).filter(|&k| self.e[k] > 0.0) {
                    let s = self.signature(k);
                    h += (&s * s.transpose()) * (0.5 * self.e[k].sqrt() * ep[k].powf(-1.5));
                }
            }
            DistanceKind::Trace => {}
            DistanceKind::RelativeEntropy => {
                for k in (0..4).filter(|&k| self.e[k] > 0.0) {
                    let s = self.signature(k);
                    h += (&s * s.transpose())
                        * (self.e[k] / (ep[k] * ep[k] * std::f64::consts::LN_2));
                }
            }
        }
        h
    }

    fn constraint(&self, j: usize, x: &DVector<f64>) -> f64 {
        match j {
            0..=2 => {
                let (p, q) = PAIRS[j];
                x[p] * x[p] + x[q] * x[q] - 1.0
            }
            3..=6 => -Self::probs(x)[j - 3],
            _ => {
                let k = (j - 7) / 2;
                let diff = self.e[k] - Self::probs(x)[k];
                let sign = if (j - 7).is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * diff - x[3 + k]
            }
        }
    }

    fn constraint_grad(&self, j: usize, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim());
        match j {
            0..=2 => {
                let (p, q) = PAIRS[j];
                g[p] = 2.0 * x[p];
                g[q] = 2.0 * x[q];
            }
            3..=6 => g -= self.signature(j - 3),
            _ => {
                let k = (j - 7) / 2;
                let sign = if (j - 7).is_multiple_of(2) { 1.0 } else { -1.0 };
                g -= self.signature(k) * sign;
                g[3 + k] = -1.0;
            }
        }
        g
    }

    fn constraint_hess(&self, j: usize, _: &DVector<f64>) -> Option<DMatrix<f64>> {
        if j > 2 {
            return None;
        }
        let (p, q) = PAIRS[j];
        let n = self.dim();
        let mut h = DMatrix::zeros(n, n);
        h[(p, p)] = 2.0;
        h[(q, q)] = 2.0;
        Some(h)
    }
}

/// Smallest surface id among the constraints active at `a`.
pub(crate) fn active_surface(a: [f64; 3]) -> Option<SurfaceId> {
    SurfaceId::PAIRS
        .into_iter()
        .chain((0..4).map(SurfaceId::Facet))
        .find(|id| id.constraint(a).abs() <= ACTIVE_SURFACE_TOL)
}

fn strictly_inside(a: [f64; 3]) -> bool {
    max_pair_sum(a) < 1.0 - 1e-9 && bd_corr_to_probs(a).iter().all(|&e| e > 1e-9)
}

fn shrink(a: [f64; 3]) -> [f64; 3] {
    let c = SEED_SHRINK / max_pair_sum(a).max(1.0).sqrt();
    a.map(|x| x * c)
}

/// Deterministic starting points followed by seeded random ones.
fn starting_points(a: [f64; 3], cfg: &OptimizerConfig) -> Vec<[f64; 3]> {
    let mut pts = vec![[0.0; 3], shrink(a)];

    // projection onto the Werner line of the nearest corner
    let (corner, proj) = BELL_SIGNATURES
        .iter()
        .map(|s| (s, (s[0] * a[0] + s[1] * a[1] + s[2] * a[2]) / 3.0))
        .fold((&BELL_SIGNATURES[0], f64::NEG_INFINITY), |best, c| {
            if c.1 > best.1 {
                c
            } else {
                best
            }
        });
    let w = proj.clamp(-0.3, SEED_SHRINK * std::f64::consts::FRAC_1_SQRT_2);
    pts.push(corner.map(|s| s * w));

    for id in SurfaceId::PAIRS {
        let (i, j, _) = id.pair_indices().unwrap();
        let r = (a[i] * a[i] + a[j] * a[j]).sqrt();
        if r > 0.0 {
            let mut c = a;
            c[i] /= r;
            c[j] /= r;
            pts.push(c.map(|x| x * SEED_SHRINK));
        }
    }
    pts.retain(|&p| strictly_inside(p));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    while pts.len() < cfg.seeds {
        let p = random_bell_diagonal(&mut rng).correlators();
        let p = shrink(p);
        if strictly_inside(p) {
            pts.push(p);
        }
    }
    pts.truncate(cfg.seeds);
    pts
}

fn local_result(kind: DistanceKind, target: BellDiagonal) -> MeasureResult {
    MeasureResult {
        kind,
        value: 0.0,
        closest_local: ClosestLocal::BellDiagonal(target),
        method: Method::Numeric,
        surface: None,
        iterations: 0,
        converged: true,
        residual: 0.0,
    }
}

/// Runs the solver from every starting point and returns all the results in
/// starting-point order.
pub fn bd_measure_numeric_all(
    kind: DistanceKind,
    a: [f64; 3],
    cfg: &OptimizerConfig,
) -> Result<Vec<MeasureResult>> {
    cfg.validate()?;
    let target = BellDiagonal::from_correlators(a)?;
    if max_pair_sum(a) <= 1.0 + LOCALITY_TOL {
        return Ok(vec![local_result(kind, target)]);
    }
    let obj = BdObjective::new(kind, &target);
    let problem = BdProblem::new(&obj);
    let settings = Settings {
        value_tol: cfg.value_tol,
        param_tol: cfg.param_tol,
        max_iters: cfg.max_iters,
        growth: cfg.penalty_growth,
    };
    starting_points(a, cfg)
        .into_iter()
        .map(|p| {
            let sol = solver::solve(&problem, problem.start(p), settings);
            let ap = [sol.x[0], sol.x[1], sol.x[2]];
            let closest = BellDiagonal::from_correlators(ap)?;
            Ok(MeasureResult {
                kind,
                value: obj.value(ap),
                closest_local: ClosestLocal::BellDiagonal(closest),
                method: Method::Numeric,
                surface: active_surface(ap),
                iterations: sol.iterations,
                converged: sol.converged,
                residual: sol.residual,
            })
        })
        .collect()
}

fn better(candidate: &MeasureResult, best: &MeasureResult) -> bool {
    if candidate.value < best.value - TIE_TOL {
        return true;
    }
    if candidate.value > best.value + TIE_TOL {
        return false;
    }
    match (candidate.surface, best.surface) {
        (Some(c), Some(b)) => c < b,
        (Some(_), None) => true,
        _ => false,
    }
}

/// Numeric minimum of D(ρ(a), ρ(a′)) over local Bell-diagonal a′.
///
/// The smallest value over the starting points is returned; values within
/// 1e-12 of each other are ordered by surface id.
pub fn bd_measure_numeric(
    kind: DistanceKind,
    a: [f64; 3],
    cfg: &OptimizerConfig,
) -> Result<MeasureResult> {
    let runs = bd_measure_numeric_all(kind, a, cfg)?;
    let pick = |converged: bool| {
        runs.iter()
            .filter(|r| r.converged == converged)
            .fold(None::<&MeasureResult>, |best, r| match best {
                Some(b) if !better(r, b) => Some(b),
                _ => Some(r),
            })
            .cloned()
    };
    match pick(true) {
        Some(best) => Ok(best),
        None => Err(Error::NotConverged(Box::new(
            pick(false).expect("at least one starting point"),
        ))),
    }
}
