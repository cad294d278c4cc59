//! Exact samplers for stable increments.
//!
//! Each path owns one ChaCha8 stream (`set_stream(path)`) and every increment
//! consumes a fixed number of 64-bit words, so the draw for `(seed, path, step)`
//! can be reached directly with [`IncrementSampler::seek`].

use std::f64::consts::PI;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::law::StableLaw;
use super::profile::ln_kanter;

#[derive(Debug, Clone)]
pub struct IncrementSampler {
    alpha: f64,
    dim: usize,
    rng: ChaCha8Rng,
    /// `(dt, dt^(1/alpha))` of the last call.
    scale: (f64, f64),
}

#[inline]
fn open_unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl IncrementSampler {
    pub fn new(law: &StableLaw, master_seed: u64, path: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(path);
        IncrementSampler {
            alpha: law.alpha(),
            dim: law.dim(),
            rng,
            scale: (1.0, 1.0),
        }
    }

    /// 64-bit words consumed per increment.
    pub fn words_per_increment(&self) -> u64 {
        if self.dim == 1 {
            2
        } else {
            2 + 2 * self.dim.div_ceil(2) as u64
        }
    }

    /// Position the stream at the start of increment `step`.
    pub fn seek(&mut self, step: u64) {
        self.rng.set_word_pos(2 * step as u128 * self.words_per_increment() as u128);
    }

    fn uniform(&mut self) -> f64 {
        open_unit(self.rng.next_u64())
    }

    /// Draw `Z_dt` into `out` (length d).
    pub fn next_into(&mut self, dt: f64, out: &mut [f64]) {
        if dt != self.scale.0 {
            self.scale = (dt, dt.powf(1.0 / self.alpha));
        }
        let scale = self.scale.1;
        let a = self.alpha;
        if self.dim == 1 {
            let v = PI * (self.uniform() - 0.5);
            let w = -self.uniform().ln();
            let z = if a == 1.0 {
                v.tan()
            } else {
                // sin(a v) / cos(v)^(1/a) * (cos((1-a) v) / w)^((1-a)/a), with one exp
                let e = (1.0 - a) / a;
                (a * v).sin() * (e * (((1.0 - a) * v).cos() / w).ln() - v.cos().ln() / a).exp()
            };
            out[0] = scale * z;
            return;
        }
        let theta = PI * self.uniform();
        let e = -self.uniform().ln();
        let sub = if a == 2.0 {
            1.0
        } else {
            let kappa = (2.0 - a) / a;
            (kappa * (ln_kanter(a / 2.0, theta) - e.ln())).exp()
        };
        let amp = scale * (2.0 * sub).sqrt();
        let mut j = 0;
        while j < self.dim {
            let u1 = self.uniform();
            let u2 = self.uniform();
            let rad = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (2.0 * PI * u2).sin_cos();
            out[j] = amp * rad * c;
            if j + 1 < self.dim {
                out[j + 1] = amp * rad * s;
            }
            j += 2;
        }
    }

    pub fn next_increment(&mut self, dt: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.next_into(dt, &mut out);
        out
    }
}

/// `n` independent draws of `Z_t`, flattened row-major (`n * d` values).
pub fn sample_increments(law: &StableLaw, t: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut s = IncrementSampler::new(law, seed, 0);
    let d = law.dim();
    let mut out = vec![0.0; n * d];
    for row in out.chunks_mut(d) {
        s.next_into(t, row);
    }
    out
}
