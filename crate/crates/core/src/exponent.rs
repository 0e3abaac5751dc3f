//! Gallager/Forney error exponents for the BSC and the derived symbol-class
//! probability approximations.
//!
//! All exponents and rates are in nats per inner-code bit. The error and
//! error-or-erasure probabilities of the thresholded inner ML decoder are
//!
//! ```text
//!   pE  = exp(-(E0 + s T) n)
//!   pEX = exp(-(E0 - s T) n)
//! ```
//!
//! with E0 the random-coding exponent at the inner rate and s the erasing
//! trade-off parameter in (0, 1/2]. The downstream threshold math depends
//! only on the pair (E0, s), so the model also accepts explicit overrides.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default Forney trade-off parameter.
pub const DEFAULT_S: f64 = 0.5;

/// The exponent pair (E0, s) together with the channel/rate it came from
/// (absent when the pair was supplied directly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentModel {
    /// BSC crossover probability, if the exponent was derived from one.
    pub e: Option<f64>,
    /// Inner code rate in nats per bit, if derived.
    pub rate: Option<f64>,
    /// Random-coding exponent, nats per inner bit.
    pub e0: f64,
    /// Forney parameter in (0, 1/2].
    pub s: f64,
}

impl ExponentModel {
    /// Exponent for a BSC with crossover `e` and a binary (n_i, k_i) inner
    /// code, rate R = k_i ln 2 / n_i nats per bit.
    pub fn for_bsc(e: f64, n_i: usize, k_i: usize, s: f64) -> Result<Self> {
        if n_i == 0 || k_i == 0 || k_i > n_i {
            return Err(Error::Domain(format!("bad inner shape ({n_i}, {k_i})")));
        }
        let rate = k_i as f64 * std::f64::consts::LN_2 / n_i as f64;
        Self::for_bsc_rate(e, rate, s)
    }

    /// Exponent for a BSC at an explicit rate in nats per bit.
    pub fn for_bsc_rate(e: f64, rate: f64, s: f64) -> Result<Self> {
        check_s(s)?;
        let e0 = gallager_e0(e, rate)?;
        Ok(ExponentModel {
            e: Some(e),
            rate: Some(rate),
            e0,
            s,
        })
    }

    /// Explicit (E0, s) pair, bypassing the channel model.
    pub fn explicit(e0: f64, s: f64) -> Result<Self> {
        check_s(s)?;
        if !e0.is_finite() || e0 <= 0.0 {
            return Err(Error::Domain(format!("E0 = {e0} must be positive")));
        }
        Ok(ExponentModel {
            e: None,
            rate: None,
            e0,
            s,
        })
    }

    /// E0/s, the natural unit of the threshold formulas.
    pub fn ratio(&self) -> f64 {
        self.e0 / self.s
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0 < s && s <= 0.5) {
        return Err(Error::Domain(format!("s = {s} outside (0, 1/2]")));
    }
    Ok(())
}

/// Binary entropy in nats.
pub fn binary_entropy_nats<F: Float>(e: F) -> F {
    if e.is_zero() || e == F::one() {
        return F::zero();
    }
    -(e * e.ln()) - (F::one() - e) * (F::one() - e).ln()
}

/// Gallager function E_0(rho) for the BSC, nats:
/// rho ln 2 - (1+rho) ln(e^(1/(1+rho)) + (1-e)^(1/(1+rho))).
pub fn gallager_e0_rho<F: Float>(e: F, rho: F) -> F {
    let one = F::one();
    let inv = one / (one + rho);
    let ln2 = F::from(std::f64::consts::LN_2).unwrap();
    rho * ln2 - (one + rho) * (e.powf(inv) + (one - e).powf(inv)).ln()
}

/// Random-coding exponent of the BSC at rate `rate` (nats per bit):
/// max over rho in [0, 1] of E_0(rho) - rho * rate.
pub fn gallager_e0<F: Float>(e: F, rate: F) -> Result<F> {
    Ok(gallager_e0_with_rho(e, rate)?.0)
}

/// As [`gallager_e0`], also returning the maximizing rho.
pub fn gallager_e0_with_rho<F: Float>(e: F, rate: F) -> Result<(F, F)> {
    let half = F::from(0.5).unwrap();
    let zero = F::zero();
    let one = F::one();
    if !(e > zero && e <= half) {
        return Err(Error::Domain(format!(
            "crossover probability {} outside (0, 0.5]",
            e.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if rate < zero {
        return Err(Error::Domain("rate must be non-negative".into()));
    }
    if e == half {
        // zero-capacity channel: E_0(rho) vanishes identically, so only
        // rate 0 is admissible and the exponent is 0
        if rate > zero {
            return Err(Error::Domain("rate above capacity (zero) at e = 0.5".into()));
        }
        return Ok((zero, zero));
    }
    let capacity = F::from(std::f64::consts::LN_2).unwrap() - binary_entropy_nats(e);
    if rate >= capacity {
        return Err(Error::Domain(format!(
            "rate {} at or above capacity {}",
            rate.to_f64().unwrap_or(f64::NAN),
            capacity.to_f64().unwrap_or(f64::NAN)
        )));
    }
    // f(rho) = E_0(rho) - rho R is concave on [0, 1]; golden-section search
    let f = |rho: F| gallager_e0_rho(e, rho) - rho * rate;
    let phi = F::from(0.618_033_988_749_894_9).unwrap();
    let tol = F::from(1e-12).unwrap();
    let (mut lo, mut hi) = (zero, one);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    // the maximum may sit on an endpoint (rho = 1 at low rates)
    let rho = (lo + hi) * half;
    let (mut best_rho, mut best) = (rho, f(rho));
    for (x, fx) in [(zero, f(zero)), (one, f(one))] {
        if fx > best {
            best_rho = x;
            best = fx;
        }
    }
    Ok((best.max(zero), best_rho))
}

/// The Forney probability pair for one threshold, clamped to [0, 1]; a set
/// flag means the corresponding exponent argument was positive, i.e. the
/// approximation was evaluated outside its validity range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForneyProbs {
    /// pE = exp(-(E0 + s T) n): undetected error despite erasing.
    pub p_error: f64,
    /// pEX = exp(-(E0 - s T) n): error or erasure.
    pub p_error_or_erasure: f64,
    pub error_out_of_range: bool,
    pub erasure_out_of_range: bool,
}

pub fn forney_probs(model: &ExponentModel, threshold: f64, n_i: usize) -> Result<ForneyProbs> {
    if n_i == 0 {
        return Err(Error::Domain("n_i must be >= 1".into()));
    }
    let n = n_i as f64;
    let arg_e = -(model.e0 + model.s * threshold) * n;
    let arg_ex = -(model.e0 - model.s * threshold) * n;
    Ok(ForneyProbs {
        p_error: arg_e.exp().min(1.0),
        p_error_or_erasure: arg_ex.exp().min(1.0),
        error_out_of_range: arg_e > 0.0,
        erasure_out_of_range: arg_ex > 0.0,
    })
}

/// Symbol-class probabilities of the super channel seen by the outer
/// decoder: never-erased-correct (r), always-erased (c), never-erased-
/// erroneous (l), and the per-band correct/erroneous pairs.
///
/// `p_over[i]`/`p_under[i]` hold the band between thresholds i+1 and i+2
/// (1-based band index k = i+1). Empirical instances carry `p_r` and sum to
/// one; the analytic approximations leave `p_r` unset and are unnormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassProbabilities {
    pub p_r: Option<f64>,
    pub p_c: f64,
    pub p_l: f64,
    pub p_over: Vec<f64>,
    pub p_under: Vec<f64>,
}

impl ClassProbabilities {
    /// Number of thresholds this class layout corresponds to.
    pub fn z(&self) -> usize {
        self.p_over.len() + 1
    }

    pub fn total(&self) -> f64 {
        self.p_r.unwrap_or(0.0)
            + self.p_c
            + self.p_l
            + self.p_over.iter().sum::<f64>()
            + self.p_under.iter().sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_over.len() != self.p_under.len() {
            return Err(Error::Dimension(
                "p_over and p_under must have equal length".into(),
            ));
        }
        let all = self
            .p_r
            .iter()
            .chain([&self.p_c, &self.p_l])
            .chain(self.p_over.iter())
            .chain(self.p_under.iter());
        for &p in all {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Symbol-class probability approximations for a threshold set
/// T_1 < ... < T_z:
///
/// ```text
///   p_c       = exp(-(E0 - s T_1) n)
///   p_l       = exp(-(E0 + s T_z) n)
///   p_over_k  = exp(-(E0 - s T_{k+1}) n)    k = 1..z-1
///   p_under_k = exp(-(E0 + s T_k) n)
/// ```
///
/// The never-erased-correct probability has no exponential form here and is
/// left unset.
pub fn lemma1_probs(
    model: &ExponentModel,
    thresholds: &[f64],
    n_i: usize,
) -> Result<ClassProbabilities> {
    if thresholds.is_empty() {
        return Err(Error::Domain("need at least one threshold".into()));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "thresholds must be strictly increasing".into(),
        ));
    }
    if n_i == 0 {
        return Err(Error::Domain("n_i must be >= 1".into()));
    }
    let n = n_i as f64;
    let z = thresholds.len();
    let clamp = |x: f64| x.exp().min(1.0);
    Ok(ClassProbabilities {
        p_r: None,
        p_c: clamp(-(model.e0 - model.s * thresholds[0]) * n),
        p_l: clamp(-(model.e0 + model.s * thresholds[z - 1]) * n),
        p_over: (1..z)
            .map(|k| clamp(-(model.e0 - model.s * thresholds[k]) * n))
            .collect(),
        p_under: (0..z - 1)
            .map(|k| clamp(-(model.e0 + model.s * thresholds[k]) * n))
            .collect(),
    })
}

/// Binomial tail Pr(X >= delta) for X ~ Bin(n, e), via log-sum-exp.
pub fn binomial_tail(n: usize, e: f64, delta: usize) -> f64 {
    if delta == 0 {
        return 1.0;
    }
    if delta > n {
        return 0.0;
    }
    let ln_e = e.ln();
    let ln_1e = (1.0 - e).ln();
    let mut terms = Vec::with_capacity(n + 1 - delta);
    let mut ln_choose = 0.0f64;
    for nu in 0..=n {
        if nu > 0 {
            ln_choose += ((n - nu + 1) as f64).ln() - (nu as f64).ln();
        }
        if nu >= delta {
            terms.push(ln_choose + nu as f64 * ln_e + (n - nu) as f64 * ln_1e);
        }
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    (max + sum.ln()).exp().min(1.0)
}

/// Smallest radius Delta with binomial tail Pr(X >= Delta) <= p; the
/// Voronoi-style equivalent radius of a probability. Can be n+1 when even
/// the single top term exceeds p.
pub fn equivalent_radius(p: f64, n_i: usize, e: f64) -> Result<usize> {
    if !(0.0 < p && p <= 1.0) {
        return Err(Error::Domain(format!("probability {p} outside (0, 1]")));
    }
    if !(0.0 < e && e < 1.0) {
        return Err(Error::Domain(format!("crossover {e} outside (0, 1)")));
    }
    for delta in 0..=n_i {
        if binomial_tail(n_i, e, delta) <= p {
            return Ok(delta);
        }
    }
    Ok(n_i + 1)
}
