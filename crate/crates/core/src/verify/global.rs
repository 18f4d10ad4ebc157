//! Global 3G over an arbitrary Green space, including the analytic ball.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generators::analytic_ball_green;
use crate::num;
use crate::sampling;

/// A space with a Green function, a metric and a scale `Ψ(r)/V(x, r)`.
pub trait GreenSpace {
    type Point: Clone;

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Point;
    fn green(&self, x: &Self::Point, y: &Self::Point) -> Result<f64>;
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;
    /// `Ψ(r) / V(x, r)`.
    fn scale(&self, x: &Self::Point, r: f64) -> f64;

    /// `G(x,z)G(y,z)/G(x,y) / (Ψ/V(x, d(x,z)) + Ψ/V(y, d(y,z)))`.
    fn global_3g_ratio(&self, x: &Self::Point, y: &Self::Point, z: &Self::Point) -> Result<f64> {
        let lhs = self.green(x, z)? * self.green(y, z)? / self.green(x, y)?;
        Ok(lhs / (self.scale(x, self.distance(x, z)) + self.scale(y, self.distance(y, z))))
    }
}

/// Unit ball in `R^n` with `Ψ(r) = r²` and `V(x, r) = α(n) rⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticBall {
    pub dim: usize,
}

impl GreenSpace for AnalyticBall {
    type Point = Vec<f64>;

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut p = vec![0.0; self.dim];
        sampling::point_in_unit_ball(rng, self.dim, &mut p);
        p
    }

    fn green(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<f64> {
        analytic_ball_green(self.dim, x, y)
    }

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        num::sqrt(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
    }

    fn scale(&self, _x: &Vec<f64>, r: f64) -> f64 {
        r * r / (num::unit_ball_volume(self.dim) * num::powi(r, self.dim as i32))
    }
}

/// Sampled global 3G constant on a continuous space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceReport<P> {
    pub best: f64,
    pub witness: Option<(P, P, P)>,
    pub samples: u64,
    /// Coincident or degenerate draws.
    pub skipped: u64,
    pub seed: u64,
}

/// Best global 3G constant over `samples` uniform triples.
pub fn check_global_3g_space<S: GreenSpace>(
    space: &S,
    samples: u64,
    seed: u64,
) -> Result<SpaceReport<S::Point>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut rng = sampling::rng(seed, 0);
    let mut out = SpaceReport {
        best: f64::NEG_INFINITY,
        witness: None,
        samples: 0,
        skipped: 0,
        seed,
    };
    while out.samples < samples {
        let (x, y, z) = (
            space.sample(&mut rng),
            space.sample(&mut rng),
            space.sample(&mut rng),
        );
        let v = match space.global_3g_ratio(&x, &y, &z) {
            Ok(v) if v.is_finite() => v,
            _ => {
                out.skipped += 1;
                if out.skipped > 10 * samples {
                    return Err(Error::Degenerate("too many degenerate triples".into()));
                }
                continue;
            }
        };
        out.samples += 1;
        if v > out.best {
            out.best = v;
            out.witness = Some((x, y, z));
        }
    }
    Ok(out)
}
