//! Seeded Monte Carlo for both models.
//!
//! Samples are produced in chunks of [`CHUNK`]; chunk `c` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, so a batch depends only on
//! `(model, parameter, spec, count, seed)` and not on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::additive::{g_eval, AdditiveFunctionSpec};
use crate::error::{Error, Result};
use crate::primes::{PrimeTable, Primes};

pub const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `g(V)`, `V` uniform on `{1, ..., n}`.
    Z,
    /// `sum_{p <= Q} g(p) Y_p`, `Y_p` independent Bernoulli(`1/p`).
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub model: Model,
    /// `n` for [`Model::Z`], `Q` for [`Model::Y`].
    pub parameter: u64,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m) * (v - m)).sum();
        ss / (self.values.len() as f64 - 1.0)
    }
}

fn chunked(count: usize, seed: u64, draw: impl Fn(&mut ChaCha8Rng) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

pub fn sample_z(table: &PrimeTable, n: u64, spec: &AdditiveFunctionSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::domain("n must be at least 2"));
    }
    // position-dependent g needs every prime factor inside the table
    let limit = if spec.needs_index() {
        table.limit()
    } else {
        table.limit().saturating_mul(table.limit())
    };
    if n > limit {
        return Err(Error::capacity("n", n, limit));
    }
    let values = chunked(count, seed, |rng| g_eval(spec, rng.gen_range(1..=n), table))?;
    Ok(SampleBatch {
        model: Model::Z,
        parameter: n,
        seed,
        values,
    })
}

/// Primes in `[2^j, 2^{j+1})` are visited by geometric skips at the block's
/// largest rate `1/p_start`, each candidate kept with probability
/// `p_start / p`.
struct Block {
    start: usize,
    end: usize,
    log_miss: f64,
}

pub fn sample_y(primes: &Primes, q: u64, spec: &AdditiveFunctionSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    spec.validate()?;
    if q < 2 {
        return Err(Error::domain("Q must be at least 2"));
    }
    let ps = primes.up_to(q)?;
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < ps.len() {
        let top = 1u64 << (64 - ps[start].leading_zeros());
        let end = ps.partition_point(|&p| p < top);
        blocks.push(Block {
            start,
            end,
            log_miss: (-1.0 / ps[start] as f64).ln_1p(),
        });
        start = end;
    }
    let values = chunked(count, seed, |rng| {
        let mut s = 0.0;
        for b in &blocks {
            let mut i = b.start;
            loop {
                let u: f64 = 1.0 - rng.gen::<f64>();
                let skip = (u.ln() / b.log_miss).floor();
                if skip >= (b.end - i) as f64 {
                    break;
                }
                i += skip as usize;
                if rng.gen::<f64>() < ps[b.start] as f64 / ps[i] as f64 {
                    s += spec.value_at(i, ps[i]);
                }
                i += 1;
            }
        }
        Ok(s)
    })?;
    Ok(SampleBatch {
        model: Model::Y,
        parameter: q,
        seed,
        values,
    })
}
