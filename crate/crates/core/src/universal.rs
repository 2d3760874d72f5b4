//! (n, k)-universal set families: every subset of at most k ground elements
//! sees all of its own subsets as traces of family members.

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniversalBackend {
    /// All 2^n subsets.
    Exhaustive,
    /// Independent uniform subsets; a failure bound is recorded.
    Random,
    /// Random families re-drawn until [`verify_universal`] accepts one.
    RandomVerified,
}

pub const EXHAUSTIVE_CAP: usize = 20;
pub const VERIFY_N_CAP: usize = 16;
pub const VERIFY_K_CAP: usize = 4;

#[derive(Clone, Copy, Debug)]
pub struct RandomParams {
    /// Size constant in `m = ⌈c · 2^k · k · ln max(n, 2)⌉`.
    pub c: f64,
    pub retries: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            c: 8.0,
            retries: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct UniversalFamily<T> {
    pub ground: Vec<T>,
    /// Member sets as bitsets over positions in `ground`.
    pub sets: Vec<FixedBitSet>,
    pub n: usize,
    pub k: usize,
    pub backend: UniversalBackend,
    pub failure_probability: f64,
}

impl<T: Clone> UniversalFamily<T> {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn members(&self, i: usize) -> impl Iterator<Item = &T> + '_ {
        self.sets[i].ones().map(|p| &self.ground[p])
    }

    /// Same ground set, member sets of both families.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sets.extend(other.sets.iter().cloned());
        out.failure_probability = self.failure_probability.min(other.failure_probability);
        out
    }
}

/// Number of sets the random backend draws.
pub fn random_family_size(n: usize, k: usize, c: f64) -> usize {
    let m = c * 2f64.powi(k as i32) * k as f64 * (n.max(2) as f64).ln();
    (m.ceil() as usize).max(1)
}

/// Upper bound `n^k · 2^k · (1 − 2^{−k})^m` on the chance a random family misses a trace.
pub fn random_failure_bound(n: usize, k: usize, m: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let log = k as f64 * (n.max(1) as f64).ln()
        + k as f64 * 2f64.ln()
        + m as f64 * (1.0 - 2f64.powi(-(k as i32))).ln();
    log.exp().min(1.0)
}

pub fn build_universal<T: Clone>(
    ground: &[T],
    k: usize,
    backend: UniversalBackend,
    seed: u64,
) -> Result<UniversalFamily<T>> {
    build_universal_with(ground, k, backend, seed, RandomParams::default())
}

pub fn build_universal_with<T: Clone>(
    ground: &[T],
    k: usize,
    backend: UniversalBackend,
    seed: u64,
    params: RandomParams,
) -> Result<UniversalFamily<T>> {
    let n = ground.len();
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds ground size {n}")));
    }
    let shell = |sets, failure_probability| UniversalFamily {
        ground: ground.to_vec(),
        sets,
        n,
        k,
        backend,
        failure_probability,
    };
    match backend {
        UniversalBackend::Exhaustive => {
            Error::refuse("exhaustive ground size", n, EXHAUSTIVE_CAP)?;
            let sets = (0..1u64 << n)
                .map(|mask| {
                    let mut s = FixedBitSet::with_capacity(n);
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .for_each(|i| s.insert(i));
                    s
                })
                .collect();
            Ok(shell(sets, 0.0))
        }
        UniversalBackend::Random => {
            let m = random_family_size(n, k, params.c);
            Ok(shell(
                random_sets(n, m, seed),
                random_failure_bound(n, k, m),
            ))
        }
        UniversalBackend::RandomVerified => {
            let m = random_family_size(n, k, params.c);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..params.retries.max(1) {
                let fam = shell(random_sets(n, m, rng.gen()), 0.0);
                if verify_universal(&fam)? {
                    return Ok(fam);
                }
            }
            Err(Error::NotFound(format!(
                "no verified ({n}, {k})-universal family after {} draws",
                params.retries
            )))
        }
    }
}

fn random_sets(n: usize, m: usize, seed: u64) -> Vec<FixedBitSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            let mut s = FixedBitSet::with_capacity(n);
            (0..n)
                .filter(|_| rng.gen::<bool>())
                .for_each(|i| s.insert(i));
            s
        })
        .collect()
}

/// Exhaustive check of the trace property; refuses `n > 16` or `k > 4`.
pub fn verify_universal<T>(fam: &UniversalFamily<T>) -> Result<bool> {
    Error::refuse("verified ground size", fam.n, VERIFY_N_CAP)?;
    Error::refuse("verified k", fam.k, VERIFY_K_CAP)?;
    let masks: Vec<u32> = fam
        .sets
        .iter()
        .map(|s| {
            s.ones()
                .filter(|&i| i < fam.n)
                .fold(0u32, |m, i| m | 1 << i)
        })
        .collect();
    for size in 0..=fam.k.min(fam.n) {
        for subset in (0..fam.n).combinations(size) {
            let mut seen = vec![false; 1 << size];
            for &mask in &masks {
                let trace = subset
                    .iter()
                    .enumerate()
                    .fold(0usize, |t, (j, &i)| t | ((mask >> i & 1) as usize) << j);
                seen[trace] = true;
            }
            if !seen.iter().all(|&s| s) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(n: usize, k: usize, sets: &[&[usize]]) -> UniversalFamily<usize> {
        UniversalFamily {
            ground: (0..n).collect(),
            sets: sets
                .iter()
                .map(|s| {
                    let mut b = FixedBitSet::with_capacity(n);
                    s.iter().for_each(|&i| b.insert(i));
                    b
                })
                .collect(),
            n,
            k,
            backend: UniversalBackend::Random,
            failure_probability: 0.0,
        }
    }

    #[test]
    fn empty_and_full_cover_singletons() {
        assert!(verify_universal(&family(3, 1, &[&[], &[0, 1, 2]])).unwrap());
        assert!(!verify_universal(&family(3, 1, &[&[]])).unwrap());
        assert!(!verify_universal(&family(3, 2, &[&[], &[0, 1, 2]])).unwrap());
    }

    #[test]
    fn exhaustive_small() {
        let fam = build_universal(&['a', 'b'], 2, UniversalBackend::Exhaustive, 0).unwrap();
        assert_eq!(fam.len(), 4);
        assert!(verify_universal(&fam).unwrap());
        assert!(build_universal(&[0u8; 21], 1, UniversalBackend::Exhaustive, 0).is_err());
    }

    #[test]
    fn verified_random_size_six() {
        let ground: Vec<u32> = (0..6).collect();
        let fam = build_universal(&ground, 2, UniversalBackend::RandomVerified, 1).unwrap();
        assert!(verify_universal(&fam).unwrap());
        assert_eq!(fam.failure_probability, 0.0);
    }

    #[test]
    fn random_is_deterministic_and_bounded() {
        let ground: Vec<u32> = (0..12).collect();
        let a = build_universal(&ground, 3, UniversalBackend::Random, 9).unwrap();
        let b = build_universal(&ground, 3, UniversalBackend::Random, 9).unwrap();
        assert_eq!(a.sets, b.sets);
        assert!(a.failure_probability < 1e-3);
    }

    #[test]
    fn verify_caps() {
        let fam = family(17, 1, &[]);
        assert!(matches!(verify_universal(&fam), Err(Error::Refusal { .. })));
        let fam = family(6, 5, &[]);
        assert!(matches!(verify_universal(&fam), Err(Error::Refusal { .. })));
    }

    #[test]
    fn size_formula() {
        // 8 · 2 · 1 · ln 10 = 36.84
        assert_eq!(random_family_size(10, 1, 8.0), 37);
        assert_eq!(random_family_size(1, 0, 8.0), 1);
    }
}
