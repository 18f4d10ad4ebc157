//! Seeded, stream-separated randomness.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::num;

/// Generator for `(seed, stream)`. Distinct streams never overlap, so
/// per-path or per-batch generators are independent of evaluation order.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform index below `n`.
pub fn index<R: Rng>(r: &mut R, n: usize) -> usize {
    r.gen_range(0..n)
}

/// Two distinct indices below `n` (requires `n ≥ 2`).
pub fn distinct_pair<R: Rng>(r: &mut R, n: usize) -> (usize, usize) {
    let a = r.gen_range(0..n);
    let mut b = r.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// Uniform point in the open unit ball of `R^dim`, by rejection.
pub fn point_in_unit_ball<R: Rng>(r: &mut R, dim: usize, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for x in out.iter_mut().take(dim) {
            *x = r.gen_range(-1.0..1.0);
            s += *x * *x;
        }
        if s < 1.0 {
            return;
        }
    }
}

/// Standard exponential variate.
pub fn exponential<R: Rng>(r: &mut R) -> f64 {
    let u: f64 = r.gen();
    -num::ln(1.0 - u)
}
