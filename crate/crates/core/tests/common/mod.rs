#![allow(dead_code)]

use nlgeo_core::state::random_bell_diagonal;
use nlgeo_core::{max_pair_sum, BellDiagonal};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bell weights drawn from positive reals, normalised.
pub fn probabilities() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(1e-3f64..1.0).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.map(|x| x / s)
    })
}

pub fn tetrahedron_point() -> impl Strategy<Value = [f64; 3]> {
    probabilities().prop_map(|e| BellDiagonal::from_probabilities(e).unwrap().correlators())
}

pub fn nonlocal_point() -> impl Strategy<Value = [f64; 3]> {
    tetrahedron_point().prop_filter("nonlocal", |&a| max_pair_sum(a) > 1.0 + 1e-6)
}

pub fn random_local(rng: &mut ChaCha8Rng) -> BellDiagonal {
    loop {
        let bd = random_bell_diagonal(rng);
        if max_pair_sum(bd.correlators()) <= 1.0 {
            return bd;
        }
    }
}

pub fn random_nonlocal(rng: &mut ChaCha8Rng) -> BellDiagonal {
    loop {
        let bd = random_bell_diagonal(rng);
        if max_pair_sum(bd.correlators()) > 1.0 + 1e-6 {
            return bd;
        }
    }
}

/// The 24 signed permutations with an even number of sign flips.
pub fn tetrahedral_symmetries() -> Vec<([usize; 3], [f64; 3])> {
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let signs = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let mut out = Vec::new();
    for p in perms {
        for s in signs {
            out.push((p, s));
        }
    }
    out
}

pub fn apply_symmetry(a: [f64; 3], (p, s): ([usize; 3], [f64; 3])) -> [f64; 3] {
    [s[0] * a[p[0]], s[1] * a[p[1]], s[2] * a[p[2]]]
}
