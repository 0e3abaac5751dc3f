//! Binary linear inner code with exhaustive maximum-likelihood decoding over
//! the BSC and per-block reliability computation.
//!
//! The reliability of a decoded block is the normalized log-ratio of the
//! winning codeword's likelihood to the summed likelihood of all competitors.
//! The competitor sum is grouped by Hamming distance so the log-sum-exp runs
//! over at most n+1 terms instead of 2^k - 1.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{mask, parse_bits, Gf2Matrix};

/// Hard cap on the inner code dimension: exhaustive ML enumerates the whole
/// codebook, so 2^k must stay desk-scale.
pub const MAX_INNER_DIMENSION: usize = 20;

/// Binary (n, k) linear code with its full codebook.
#[derive(Debug, Clone)]
pub struct InnerCode {
    n: usize,
    k: usize,
    d_min: usize,
    generator: Gf2Matrix,
    /// codebook[i] = encoding of the information vector with integer value i.
    codebook: Vec<u64>,
}

/// Result of one inner ML decoding: the information estimate and the
/// reliability value in nats per inner-code bit.
///
/// Exhaustive ML always produces an estimate; a bounded-distance inner
/// decoder slotted in later would signal failure with reliability 0, which
/// downstream thresholding treats like any other low value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerDecodeResult {
    pub estimate_info: u64,
    pub reliability: f64,
}

impl InnerCode {
    pub fn from_generator(generator: Gf2Matrix) -> Result<Self> {
        let k = generator.nrows();
        let n = generator.ncols();
        if k == 0 || k > MAX_INNER_DIMENSION {
            return Err(Error::InvalidCode(format!(
                "inner dimension k = {k} outside 1..={MAX_INNER_DIMENSION}"
            )));
        }
        if k > n {
            return Err(Error::InvalidCode(format!("k = {k} exceeds n = {n}")));
        }
        if generator.rank() != k {
            return Err(Error::InvalidCode(
                "generator matrix does not have full row rank".into(),
            ));
        }
        let codebook: Vec<u64> = (0..1u64 << k)
            .map(|info| generator.vec_mul(info).expect("info fits k bits"))
            .collect();
        let d_min = codebook
            .iter()
            .skip(1)
            .map(|c| c.count_ones() as usize)
            .min()
            .expect("k >= 1 so there is a nonzero codeword");
        Ok(InnerCode {
            n,
            k,
            d_min,
            generator,
            codebook,
        })
    }

    /// (n, 1) repetition code.
    pub fn repetition(n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidCode(format!("repetition length {n} outside 1..=64")));
        }
        Self::from_generator(Gf2Matrix::new(vec![mask(n)], n)?)
    }

    /// Hamming(7,4) in standard form [I | P].
    pub fn hamming74() -> Self {
        let p = [0b011u64, 0b101, 0b110, 0b111];
        let rows = (0..4).map(|i| (1u64 << i) | (p[i] << 4)).collect();
        Self::from_generator(Gf2Matrix::new(rows, 7).expect("static")).expect("static")
    }

    /// Extended binary Golay(24,12), built from the cyclic (23,12) code with
    /// generator polynomial x^11+x^10+x^6+x^5+x^4+x^2+1 plus an overall
    /// parity bit.
    pub fn golay24() -> Self {
        const G23: u64 = 0xC75;
        let rows = (0..12)
            .map(|i| {
                let cw23 = (1u64 << (11 + i)) | poly_mod2(1u64 << (11 + i), G23, 11);
                cw23 | ((cw23.count_ones() as u64 & 1) << 23)
            })
            .collect();
        Self::from_generator(Gf2Matrix::new(rows, 24).expect("static")).expect("static")
    }

    /// Random systematic code [I | A] with A drawn from the seeded stream.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k == 0 || k > n || n > 64 {
            return Err(Error::InvalidCode(format!("bad random code shape ({n}, {k})")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..k)
            .map(|i| {
                let a: u64 = rng.gen::<u64>() & mask(n - k);
                (1u64 << i) | (a << k)
            })
            .collect();
        Self::from_generator(Gf2Matrix::new(rows, n)?)
    }

    /// Load from a text file: first line "n k", then k generator rows as
    /// 0/1 strings of length n.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty inner-code file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("header must be \"n k\"".into()))?;
        let k: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("header must be \"n k\"".into()))?;
        let mut rows = Vec::with_capacity(k);
        for _ in 0..k {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {k} generator rows")))?;
            let (row, len) = parse_bits(line)?;
            if len != n {
                return Err(Error::Parse(format!(
                    "generator row has length {len}, expected {n}"
                )));
            }
            rows.push(row);
        }
        Self::from_generator(Gf2Matrix::new(rows, n)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn generator(&self) -> &Gf2Matrix {
        &self.generator
    }

    pub fn codebook(&self) -> &[u64] {
        &self.codebook
    }

    /// info * G over GF(2).
    pub fn encode(&self, info: u64) -> Result<u64> {
        if self.k < 64 && info >> self.k != 0 {
            return Err(Error::Dimension(format!(
                "information word exceeds {} bits",
                self.k
            )));
        }
        Ok(self.codebook[info as usize])
    }

    /// Exhaustive ML decoding with reliability.
    ///
    /// Ties on likelihood (equal Hamming distance for e < 1/2) go to the
    /// smallest information integer, which the codebook scan order gives us
    /// for free.
    pub fn ml_decode(&self, received: u64, e: f64) -> Result<InnerDecodeResult> {
        if received & !mask(self.n) != 0 {
            return Err(Error::Dimension(format!(
                "received word exceeds {} bits",
                self.n
            )));
        }
        if !(0.0..=0.5).contains(&e) {
            return Err(Error::Domain(format!(
                "crossover probability {e} outside [0, 0.5]"
            )));
        }
        if e == 0.0 {
            // Noiseless channel: likelihoods degenerate, nearest codeword is
            // the certain one and nothing competes.
            let (info, _) = self.nearest(received);
            return Ok(InnerDecodeResult {
                estimate_info: info,
                reliability: f64::INFINITY,
            });
        }
        let mut counts = vec![0u32; self.n + 1];
        let mut best_info = 0u64;
        let mut best_d = usize::MAX;
        for (info, &cw) in self.codebook.iter().enumerate() {
            let d = (cw ^ received).count_ones() as usize;
            counts[d] += 1;
            if d < best_d {
                best_d = d;
                best_info = info as u64;
            }
        }
        counts[best_d] -= 1;
        let ln_e = e.ln();
        let ln_1e = (1.0 - e).ln();
        let log_lik = |d: usize| d as f64 * ln_e + (self.n - d) as f64 * ln_1e;
        // log-sum-exp over the competitor distance profile
        let mut max_term = f64::NEG_INFINITY;
        for (d, &c) in counts.iter().enumerate() {
            if c > 0 {
                max_term = max_term.max((c as f64).ln() + log_lik(d));
            }
        }
        let mut sum = 0.0;
        for (d, &c) in counts.iter().enumerate() {
            if c > 0 {
                sum += ((c as f64).ln() + log_lik(d) - max_term).exp();
            }
        }
        let lse = max_term + sum.ln();
        Ok(InnerDecodeResult {
            estimate_info: best_info,
            reliability: (log_lik(best_d) - lse) / self.n as f64,
        })
    }

    fn nearest(&self, received: u64) -> (u64, usize) {
        let mut best = (0u64, usize::MAX);
        for (info, &cw) in self.codebook.iter().enumerate() {
            let d = (cw ^ received).count_ones() as usize;
            if d < best.1 {
                best = (info as u64, d);
            }
        }
        best
    }
}

/// Log-likelihood ln Pr(r | c) of a BSC observation, in nats.
pub fn bsc_log_likelihood(r: u64, c: u64, n: usize, e: f64) -> Result<f64> {
    if n == 0 || n > 64 {
        return Err(Error::Dimension(format!("block length {n} outside 1..=64")));
    }
    if (r | c) & !mask(n) != 0 {
        return Err(Error::Dimension("word exceeds block length".into()));
    }
    if !(0.0 < e && e < 1.0) {
        return Err(Error::Domain(format!(
            "crossover probability {e} outside (0, 1)"
        )));
    }
    let d = (r ^ c).count_ones() as f64;
    Ok(d * e.ln() + (n as f64 - d) * (1.0 - e).ln())
}

/// Remainder of `v` (bitmask polynomial) modulo `g` of degree `deg`.
fn poly_mod2(mut v: u64, g: u64, deg: usize) -> u64 {
    while v >> deg != 0 {
        let bit = 63 - v.leading_zeros() as usize;
        v ^= g << (bit - deg);
    }
    v
}
