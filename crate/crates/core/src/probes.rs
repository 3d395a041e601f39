//! Deterministic random probe vectors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::seq::{Seq, SeqKind};
use crate::susy::SuperVec;

/// `count` complex vectors with entries uniform in the unit square, reproducible from `rng_seed`.
pub fn random_probes(n_sites: usize, count: usize, rng_seed: u64) -> Vec<Seq> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| {
            let values = (0..n_sites)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            Seq::new(values, 0.0, SeqKind::Generic)
        })
        .collect()
}

/// Unit vectors followed by `count` random vectors.
pub fn standard_probes(n_sites: usize, count: usize, rng_seed: u64) -> Vec<Seq> {
    let mut out: Vec<Seq> = (0..n_sites).map(|k| Seq::unit(n_sites, k)).collect();
    out.extend(random_probes(n_sites, count, rng_seed));
    out
}

/// Block unit vectors followed by `count` random two-component vectors.
pub fn standard_super_probes(n_sites: usize, count: usize, rng_seed: u64) -> Vec<SuperVec> {
    let mut out = SuperVec::block_units(n_sites);
    let mut flat = random_probes(n_sites, 2 * count, rng_seed).into_iter();
    while let (Some(upper), Some(lower)) = (flat.next(), flat.next()) {
        out.push(SuperVec { upper, lower });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        assert_eq!(random_probes(5, 3, 7), random_probes(5, 3, 7));
        assert_ne!(random_probes(5, 3, 7), random_probes(5, 3, 8));
        assert_eq!(standard_probes(4, 2, 0).len(), 6);
        assert_eq!(standard_super_probes(4, 2, 0).len(), 10);
    }
}
