//! Measure functionals between Bell-diagonal states as functions of the
//! candidate correlators a′, with analytic gradients.

use crate::metrics::{commuting, DistanceKind};
use crate::state::{bd_corr_to_probs, BellDiagonal, BELL_SIGNATURES};

/// D(ρ(a), ρ(a′)) for a fixed target a, in the reporting convention of each
/// kind (Hellinger and Bures squared, relative entropy in bits).
#[derive(Debug, Clone, Copy)]
pub struct BdObjective {
    kind: DistanceKind,
    a: [f64; 3],
    e: [f64; 4],
}

impl BdObjective {
    pub fn new(kind: DistanceKind, target: &BellDiagonal) -> Self {
        Self {
            kind,
            a: target.correlators(),
            e: target.probabilities(),
        }
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn target(&self) -> [f64; 3] {
        self.a
    }

    pub(crate) fn target_probabilities(&self) -> [f64; 4] {
        self.e
    }

    pub fn value(&self, ap: [f64; 3]) -> f64 {
        let ep = bd_corr_to_probs(ap);
        match self.kind {
            DistanceKind::HilbertSchmidt => commuting::hs(&self.e, &ep),
            DistanceKind::Hellinger => commuting::hellinger_sq(&self.e, &ep),
            DistanceKind::Bures => commuting::bures_sq(&self.e, &ep),
            DistanceKind::Trace => commuting::trace(&self.e, &ep),
            DistanceKind::RelativeEntropy => commuting::rel_entropy(&self.e, &ep),
        }
    }

    /// ∇ₐ′ of [`value`](Self::value). The trace functional is differentiated
    /// where no eₖ′ equals eₖ.
    pub fn gradient(&self, ap: [f64; 3]) -> [f64; 3] {
        let ep = bd_corr_to_probs(ap);
        let mut g = [0.0; 3];
        match self.kind {
            DistanceKind::HilbertSchmidt => {
                let r: f64 = (0..3)
                    .map(|i| (self.a[i] - ap[i]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if r > 0.0 {
                    for i in 0..3 {
                        g[i] = -(self.a[i] - ap[i]) / (2.0 * r);
                    }
                }
            }
            DistanceKind::Hellinger | DistanceKind::Bures => {
                for (k, (&e, &q)) in self.e.iter().zip(&ep).enumerate() {
                    if e > 0.0 {
                        add_scaled(&mut g, k, -(e / q).sqrt() / 4.0);
                    }
                }
            }
            DistanceKind::Trace => {
                for (k, (&e, &q)) in self.e.iter().zip(&ep).enumerate() {
                    add_scaled(&mut g, k, -(e - q).signum() / 8.0);
                }
            }
            DistanceKind::RelativeEntropy => {
                for (k, (&e, &q)) in self.e.iter().zip(&ep).enumerate() {
                    if e > 0.0 {
                        add_scaled(&mut g, k, -e / (q * std::f64::consts::LN_2) / 4.0);
                    }
                }
            }
        }
        g
    }
}

fn add_scaled(g: &mut [f64; 3], k: usize, c: f64) {
    for i in 0..3 {
        g[i] += c * BELL_SIGNATURES[k][i];
    }
}
