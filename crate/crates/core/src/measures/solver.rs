//! Small dense solver for smooth convex programs min f(x) s.t. gⱼ(x) ≤ 0.
//!
//! A log-barrier path is followed with damped Newton centering until the
//! duality-gap bound m/t drops below the value tolerance. The constraints
//! that are tight at that point are then treated as equalities and the KKT
//! system is solved by Newton's method, which recovers the optimum to
//! machine precision whenever the active set is nondegenerate.

use nalgebra::{DMatrix, DVector};

pub(crate) trait ConvexProblem {
    fn dim(&self) -> usize;
    fn num_constraints(&self) -> usize;
    fn objective(&self, x: &DVector<f64>) -> f64;
    fn objective_grad(&self, x: &DVector<f64>) -> DVector<f64>;
    fn objective_hess(&self, x: &DVector<f64>) -> DMatrix<f64>;
    fn constraint(&self, j: usize, x: &DVector<f64>) -> f64;
    fn constraint_grad(&self, j: usize, x: &DVector<f64>) -> DVector<f64>;
    fn constraint_hess(&self, j: usize, x: &DVector<f64>) -> Option<DMatrix<f64>>;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub value_tol: f64,
    pub param_tol: f64,
    pub max_iters: usize,
    pub growth: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub x: DVector<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub multipliers: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

const CENTERING_TOL: f64 = 1e-10;
const ARMIJO_SLOPE: f64 = 0.25;
const BACKTRACK: f64 = 0.5;
const ACTIVE_TOL: f64 = 1e-6;

fn barrier_value<P: ConvexProblem>(p: &P, t: f64, x: &DVector<f64>) -> Option<f64> {
    let mut phi = t * p.objective(x);
    for j in 0..p.num_constraints() {
        let g = p.constraint(j, x);
        if g >= 0.0 || g.is_nan() {
            return None;
        }
        phi -= (-g).ln();
    }
    Some(phi)
}

fn strictly_feasible<P: ConvexProblem>(p: &P, x: &DVector<f64>) -> bool {
    (0..p.num_constraints()).all(|j| p.constraint(j, x) < 0.0)
}

/// Solves H d = -g, regularising if H is numerically indefinite.
fn newton_direction(h: DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = h.diagonal().amax().max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..8 {
        let mut hr = h.clone();
        if ridge > 0.0 {
            for i in 0..hr.nrows() {
                hr[(i, i)] += ridge;
            }
        }
        if let Some(ch) = hr.cholesky() {
            return Some(-ch.solve(g));
        }
        ridge = if ridge == 0.0 {
            scale * 1e-14
        } else {
            ridge * 100.0
        };
    }
    None
}

pub(crate) fn stationarity_residual<P: ConvexProblem>(
    p: &P,
    x: &DVector<f64>,
    multipliers: &DVector<f64>,
) -> f64 {
    let mut r = p.objective_grad(x);
    for j in 0..p.num_constraints() {
        if multipliers[j] != 0.0 {
            r += p.constraint_grad(j, x) * multipliers[j];
        }
    }
    r.amax()
}

pub(crate) fn solve<P: ConvexProblem>(p: &P, x0: DVector<f64>, s: Settings) -> Solution {
    let m = p.num_constraints();
    debug_assert!(
        strictly_feasible(p, &x0),
        "starting point must be strictly feasible"
    );

    let mut x = x0;
    let mut t = 1.0;
    let mut iterations = 0;
    let mut converged = false;

    'outer: loop {
        // centering
        let mut previous = f64::INFINITY;
        loop {
            if iterations >= s.max_iters {
                break 'outer;
            }
            let mut grad = p.objective_grad(&x) * t;
            let mut hess = p.objective_hess(&x) * t;
            for j in 0..m {
                let g = p.constraint(j, &x);
                let dg = p.constraint_grad(j, &x);
                grad += &dg / (-g);
                hess += (&dg * dg.transpose()) / (g * g);
                if let Some(h2) = p.constraint_hess(j, &x) {
                    hess += h2 / (-g);
                }
            }
            let Some(dir) = newton_direction(hess, &grad) else {
                break;
            };
            let slope = grad.dot(&dir);
            let decrement_sq = -slope;
            // the second test catches the rounding floor at large t, where
            // the decrement stops shrinking before reaching the tolerance
            if decrement_sq / 2.0 <= CENTERING_TOL
                || (decrement_sq < 1e-6 && decrement_sq > 0.5 * previous)
            {
                break;
            }
            previous = decrement_sq;

            let mut step = 1.0;
            while !strictly_feasible(p, &(&x + &dir * step)) {
                step *= BACKTRACK;
                if step < 1e-16 {
                    break;
                }
            }
            // Armijo only while the predicted decrease is far above the
            // rounding level of the barrier value; near the centre the full
            // Newton step is taken.
            if decrement_sq > 1e-3 {
                let phi0 = barrier_value(p, t, &x).unwrap_or(f64::INFINITY);
                loop {
                    match barrier_value(p, t, &(&x + &dir * step)) {
                        Some(phi) if phi <= phi0 + ARMIJO_SLOPE * step * slope => break,
                        _ => step *= BACKTRACK,
                    }
                    if step < 1e-16 {
                        break;
                    }
                }
            }
            iterations += 1;
            if step < 1e-16 {
                break;
            }
            x += &dir * step;
        }

        if m as f64 / t <= s.value_tol {
            converged = true;
            break;
        }
        t *= s.growth;
    }

    let mut multipliers =
        DVector::from_fn(m, |j, _| 1.0 / (t * (-p.constraint(j, &x)).max(1e-300)));
    if converged {
        if let Some((xp, mp, steps)) = polish(p, &x, &multipliers, s) {
            iterations += steps;
            x = xp;
            multipliers = mp;
        }
    }
    let residual = stationarity_residual(p, &x, &multipliers);
    Solution {
        x,
        multipliers,
        iterations,
        converged,
        residual,
    }
}

/// Newton on the KKT system with the nearly tight constraints as equalities.
fn polish<P: ConvexProblem>(
    p: &P,
    x_bar: &DVector<f64>,
    mult_bar: &DVector<f64>,
    s: Settings,
) -> Option<(DVector<f64>, DVector<f64>, usize)> {
    let n = p.dim();
    let m = p.num_constraints();
    let active: Vec<usize> = (0..m)
        .filter(|&j| -p.constraint(j, x_bar) <= ACTIVE_TOL)
        .collect();
    let k = active.len();
    if k == 0 || k > n {
        return None;
    }

    let mut x = x_bar.clone();
    let mut mu = DVector::from_iterator(k, active.iter().map(|&j| mult_bar[j]));
    let mut steps = 0;
    let mut settled = false;
    for _ in 0..40 {
        steps += 1;
        let mut lag_grad = p.objective_grad(&x);
        let mut lag_hess = p.objective_hess(&x);
        let mut jac = DMatrix::zeros(k, n);
        let mut gvals = DVector::zeros(k);
        for (r, &j) in active.iter().enumerate() {
            let dg = p.constraint_grad(j, &x);
            lag_grad += &dg * mu[r];
            if let Some(h2) = p.constraint_hess(j, &x) {
                lag_hess += h2 * mu[r];
            }
            jac.row_mut(r).copy_from(&dg.transpose());
            gvals[r] = p.constraint(j, &x);
        }
        let mut kkt = DMatrix::zeros(n + k, n + k);
        kkt.view_mut((0, 0), (n, n)).copy_from(&lag_hess);
        kkt.view_mut((0, n), (n, k)).copy_from(&jac.transpose());
        kkt.view_mut((n, 0), (k, n)).copy_from(&jac);
        let mut rhs = DVector::zeros(n + k);
        rhs.rows_mut(0, n).copy_from(&(-&lag_grad));
        rhs.rows_mut(n, k).copy_from(&(-&gvals));

        let delta = kkt.lu().solve(&rhs)?;
        if !delta.iter().all(|v| v.is_finite()) {
            return None;
        }
        let dx = delta.rows(0, n).into_owned();
        x += &dx;
        mu += delta.rows(n, k);
        let size = dx.amax();
        if settled || size <= 1e-15 {
            break;
        }
        if size <= s.param_tol {
            // one more step lands at rounding level
            settled = true;
        }
    }

    let mut full = DVector::zeros(m);
    for (r, &j) in active.iter().enumerate() {
        full[j] = mu[r];
    }
    let feasible = (0..m).all(|j| p.constraint(j, &x) <= 1e-12);
    let dual_ok = mu.iter().all(|&v| v >= -1e-9);
    let near = (&x - x_bar).amax() <= 1e-3;
    let no_worse = p.objective(&x) <= p.objective(x_bar) + 1e-10;
    let stationary = stationarity_residual(p, &x, &full) <= 1e-9;
    if feasible && dual_ok && near && no_worse && stationary {
        Some((x, full, steps))
    } else {
        None
    }
}
