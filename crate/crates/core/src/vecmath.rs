//! Parameter-vector arithmetic, seeded randomness, weight initialization and
//! the Canberra distance.

use std::ops::{Deref, Index};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flat vector of real-valued weights. The length is fixed at construction;
/// values may be edited in place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Self {
        ParameterVector(values)
    }

    pub fn zeros(len: usize) -> Self {
        ParameterVector(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for ParameterVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for ParameterVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(v: Vec<f64>) -> Self {
        ParameterVector(v)
    }
}

/// Handle to a deterministic random substream.
///
/// Two handles with the same `(seed, stream)` produce identical draws.
/// Child handles are derived by hashing a tag into the stream id, so that a
/// tree of independent substreams (run → generation → pool slot) can be
/// addressed without any shared mutable generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngHandle {
    pub seed: u64,
    pub stream: u64,
}

impl RngHandle {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngHandle { seed, stream }
    }

    pub fn from_seed(seed: u64) -> Self {
        RngHandle { seed, stream: 0 }
    }

    pub fn child(&self, tag: u64) -> Self {
        RngHandle {
            seed: self.seed,
            stream: splitmix64(splitmix64(self.stream) ^ tag),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Canberra distance `Σ |xᵢ − yᵢ| / (|xᵢ| + |yᵢ|)`. Terms where both
/// coordinates are zero contribute nothing.
pub fn canberra_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let den = a.abs() + b.abs();
            if den == 0.0 {
                0.0
            } else {
                (a - b).abs() / den
            }
        })
        .sum())
}

/// Standard deviation of the Xavier (Glorot) normal initializer.
pub fn xavier_std(fan_in: usize, fan_out: usize) -> f64 {
    (2.0 / (fan_in + fan_out) as f64).sqrt()
}

/// `count` draws from `N(0, 2 / (fan_in + fan_out))`.
pub fn xavier_normal_init(
    fan_in: usize,
    fan_out: usize,
    count: usize,
    rng: RngHandle,
) -> Result<ParameterVector> {
    let mut out = vec![0.0; count];
    xavier_normal_fill(fan_in, fan_out, &mut out, &mut rng.rng())?;
    Ok(ParameterVector(out))
}

pub(crate) fn xavier_normal_fill<R: rand::Rng>(
    fan_in: usize,
    fan_out: usize,
    out: &mut [f64],
    rng: &mut R,
) -> Result<()> {
    if fan_in == 0 || fan_out == 0 {
        return Err(Error::arg("fan_in and fan_out must be at least 1"));
    }
    let normal = Normal::new(0.0, xavier_std(fan_in, fan_out))
        .map_err(|e| Error::arg(e.to_string()))?;
    for v in out.iter_mut() {
        *v = normal.sample(rng);
    }
    Ok(())
}

/// Uniformly random `k`-subset of `0..n`, returned in draw order.
pub fn choose_indices(n: usize, k: usize, rng: RngHandle) -> Result<Vec<usize>> {
    choose_indices_with(n, k, &mut rng.rng())
}

pub(crate) fn choose_indices_with<R: rand::Rng>(n: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k > n {
        return Err(Error::arg(format!("cannot choose {k} indices out of {n}")));
    }
    Ok(rand::seq::index::sample(rng, n, k).into_vec())
}
