//! End-to-end Monte Carlo of the concatenated system: BSC transmission,
//! inner ML decoding with reliabilities, threshold erasing, multi-trial
//! outer decoding, and empirical symbol-class statistics.
//!
//! Determinism contract: every trial draws from its own counter-derived
//! ChaCha stream keyed by (seed, trial index), and aggregation is plain
//! integer counting, so a report is identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ClassProbabilities;
use crate::field::FieldElement;
use crate::gf2::mask;
use crate::inner::InnerCode;
use crate::outer::{ErasureWord, OuterCode};
use crate::threshold::ThresholdSet;

/// Two-sided 95% normal quantile for Wilson intervals.
pub const Z_95: f64 = 1.959963984540054;

/// Reliability class of one super-channel symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolClass {
    /// Correct and never erased (r).
    NeverErasedCorrect,
    /// Erased at every threshold (c), correct or not.
    AlwaysErased,
    /// Erroneous and never erased (l).
    NeverErasedErroneous,
    /// Erased for threshold band+1 but not band (1-based band <= z-1).
    Band { band: usize, correct: bool },
}

/// Erased at threshold T exactly when v < T; a reliability equal to the
/// threshold survives.
pub fn classify_symbol(v: f64, is_correct: bool, thresholds: &[f64]) -> SymbolClass {
    let z = thresholds.len();
    if v < thresholds[0] {
        return SymbolClass::AlwaysErased;
    }
    if v >= thresholds[z - 1] {
        return if is_correct {
            SymbolClass::NeverErasedCorrect
        } else {
            SymbolClass::NeverErasedErroneous
        };
    }
    // T_band <= v < T_band+1
    let band = thresholds[1..].partition_point(|&t| v >= t) + 1;
    SymbolClass::Band {
        band,
        correct: is_correct,
    }
}

/// Full simulation configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub inner: InnerCode,
    pub outer: OuterCode,
    pub l: u32,
    pub e: f64,
    pub thresholds: ThresholdSet,
    /// Use the real error/erasure decoder (l = 1 only); otherwise the
    /// radius-model decoder stands in.
    pub real_decoder: bool,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inner.k() != self.outer.field().m() as usize {
            return Err(Error::InvalidCode(format!(
                "inner dimension {} must equal the outer field degree {}",
                self.inner.k(),
                self.outer.field().m()
            )));
        }
        if self.l == 0 {
            return Err(Error::Domain("l must be >= 1".into()));
        }
        if self.real_decoder && self.l != 1 {
            return Err(Error::Domain(
                "the real error/erasure decoder implements l = 1 only".into(),
            ));
        }
        if !(0.0..=0.5).contains(&self.e) {
            return Err(Error::Domain(format!(
                "crossover probability {} outside [0, 0.5]",
                self.e
            )));
        }
        Ok(())
    }

    pub fn z(&self) -> usize {
        self.thresholds.z()
    }
}

/// Outcome of a single end-to-end trial.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    /// Transmitted outer codeword appeared in at least one trial's result.
    pub success: bool,
    /// Per-threshold success flags, index k-1 for trial k.
    pub per_threshold: Vec<bool>,
    pub classes: Vec<SymbolClass>,
}

/// Flip each of the n bits independently with probability e.
pub fn bsc_transmit(bits: u64, n: usize, e: f64, rng: &mut impl Rng) -> u64 {
    let mut flips = 0u64;
    for j in 0..n {
        if rng.gen_bool(e) {
            flips |= 1 << j;
        }
    }
    (bits ^ flips) & mask(n)
}

/// The counter-derived random stream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// One full transmit/decode round: random outer information word, inner
/// encoding per symbol, BSC, inner ML with reliabilities, threshold erasing
/// and one outer decode per threshold.
pub fn run_trial(cfg: &SimConfig, rng: &mut impl Rng) -> Result<TrialOutcome> {
    let n_o = cfg.outer.n();
    let q = cfg.outer.field().order() as u16;
    let info: Vec<FieldElement> = (0..cfg.outer.k())
        .map(|_| FieldElement(rng.gen_range(0..q)))
        .collect();
    let codeword = cfg.outer.encode(&info)?;

    let mut estimates = Vec::with_capacity(n_o);
    let mut reliabilities = Vec::with_capacity(n_o);
    let mut classes = Vec::with_capacity(n_o);
    for &symbol in &codeword {
        let inner_cw = cfg.inner.encode(symbol.0 as u64)?;
        let received = bsc_transmit(inner_cw, cfg.inner.n(), cfg.e, rng);
        let decoded = cfg.inner.ml_decode(received, cfg.e)?;
        let correct = decoded.estimate_info == symbol.0 as u64;
        classes.push(classify_symbol(
            decoded.reliability,
            correct,
            cfg.thresholds.values(),
        ));
        estimates.push(FieldElement(decoded.estimate_info as u16));
        reliabilities.push(decoded.reliability);
    }

    let mut per_threshold = Vec::with_capacity(cfg.z());
    for &t in cfg.thresholds.values() {
        let word = ErasureWord::from_symbols(
            estimates
                .iter()
                .zip(&reliabilities)
                .map(|(&est, &v)| (v >= t).then_some(est))
                .collect(),
        );
        let outcome = if cfg.real_decoder {
            cfg.outer.bmd_decode_errors_erasures(&word)?
        } else {
            cfg.outer.model_lbd_decode(&word, &codeword, cfg.l)?
        };
        per_threshold.push(outcome.is_codeword(&codeword));
    }
    Ok(TrialOutcome {
        success: per_threshold.iter().any(|&s| s),
        per_threshold,
        classes,
    })
}

/// Integer class tallies across all simulated super-channel symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTally {
    pub r: u64,
    pub c: u64,
    pub l: u64,
    pub over: Vec<u64>,
    pub under: Vec<u64>,
    pub total: u64,
}

impl ClassTally {
    fn new(z: usize) -> Self {
        ClassTally {
            r: 0,
            c: 0,
            l: 0,
            over: vec![0; z - 1],
            under: vec![0; z - 1],
            total: 0,
        }
    }

    fn record(&mut self, class: SymbolClass) {
        match class {
            SymbolClass::NeverErasedCorrect => self.r += 1,
            SymbolClass::AlwaysErased => self.c += 1,
            SymbolClass::NeverErasedErroneous => self.l += 1,
            SymbolClass::Band { band, correct } => {
                if correct {
                    self.over[band - 1] += 1;
                } else {
                    self.under[band - 1] += 1;
                }
            }
        }
        self.total += 1;
    }

    fn merge(mut self, other: &ClassTally) -> ClassTally {
        self.r += other.r;
        self.c += other.c;
        self.l += other.l;
        for (a, b) in self.over.iter_mut().zip(&other.over) {
            *a += b;
        }
        for (a, b) in self.under.iter_mut().zip(&other.under) {
            *a += b;
        }
        self.total += other.total;
        self
    }

    /// Relative frequencies; the underlying counts sum to the total exactly.
    pub fn probabilities(&self) -> ClassProbabilities {
        let t = self.total as f64;
        ClassProbabilities {
            p_r: Some(self.r as f64 / t),
            p_c: self.c as f64 / t,
            p_l: self.l as f64 / t,
            p_over: self.over.iter().map(|&c| c as f64 / t).collect(),
            p_under: self.under.iter().map(|&c| c as f64 / t).collect(),
        }
    }
}

/// Monte Carlo estimate of the residual codeword error probability with its
/// Wilson 95% interval and per-trial-index success breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    /// Residual codeword error estimate failures/trials.
    pub pe_hat: f64,
    pub ci95: (f64, f64),
    pub per_threshold_success: Vec<u64>,
    pub empirical: ClassProbabilities,
    pub class_counts: ClassTally,
}

/// Wilson score interval for a binomial proportion failures/trials.
pub fn wilson_interval(failures: u64, trials: u64, z_score: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z_score * z_score;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z_score * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if failures == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

struct Aggregate {
    successes: u64,
    per_threshold: Vec<u64>,
    tally: ClassTally,
}

/// Run `trials` independent trials; deterministic for a given (cfg, seed)
/// regardless of the rayon worker count.
pub fn monte_carlo(cfg: &SimConfig, trials: u64, seed: u64) -> Result<SimReport> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let z = cfg.z();
    let agg = (0..trials)
        .into_par_iter()
        .map(|idx| {
            let mut rng = trial_rng(seed, idx);
            run_trial(cfg, &mut rng).expect("config validated before the run")
        })
        .fold(
            || Aggregate {
                successes: 0,
                per_threshold: vec![0; z],
                tally: ClassTally::new(z),
            },
            |mut acc, outcome| {
                acc.successes += outcome.success as u64;
                for (slot, &hit) in acc.per_threshold.iter_mut().zip(&outcome.per_threshold) {
                    *slot += hit as u64;
                }
                for &class in &outcome.classes {
                    acc.tally.record(class);
                }
                acc
            },
        )
        .reduce(
            || Aggregate {
                successes: 0,
                per_threshold: vec![0; z],
                tally: ClassTally::new(z),
            },
            |a, b| Aggregate {
                successes: a.successes + b.successes,
                per_threshold: a
                    .per_threshold
                    .iter()
                    .zip(&b.per_threshold)
                    .map(|(x, y)| x + y)
                    .collect(),
                tally: a.tally.merge(&b.tally),
            },
        );
    let failures = trials - agg.successes;
    Ok(SimReport {
        trials,
        successes: agg.successes,
        failures,
        pe_hat: failures as f64 / trials as f64,
        ci95: wilson_interval(failures, trials, Z_95),
        per_threshold_success: agg.per_threshold,
        empirical: agg.tally.probabilities(),
        class_counts: agg.tally,
    })
}

/// Empirical symbol-class frequencies over n_o * trials super-channel uses.
pub fn estimate_class_probs(cfg: &SimConfig, trials: u64, seed: u64) -> Result<ClassProbabilities> {
    Ok(monte_carlo(cfg, trials, seed)?.empirical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::threshold::solve_condition_system;

    fn hamming_rs_config(e: f64, thresholds: ThresholdSet, real: bool) -> SimConfig {
        SimConfig {
            inner: InnerCode::hamming74(),
            outer: OuterCode::new(FieldSpec::new(4).unwrap(), 15, 7).unwrap(),
            l: 1,
            e,
            thresholds,
            real_decoder: real,
            trials: 1000,
            seed: 7,
        }
    }

    #[test]
    fn bsc_transmit_extremes() {
        let mut rng = trial_rng(1, 0);
        assert_eq!(bsc_transmit(0b1011, 4, 0.0, &mut rng), 0b1011);
        assert_eq!(bsc_transmit(0b1011, 4, 1.0, &mut rng), 0b0100);
    }

    #[test]
    fn bsc_transmit_flip_rate() {
        let mut rng = trial_rng(2, 0);
        let (n_words, bits_per) = (20_000u64, 50usize);
        let mut flips = 0u64;
        for _ in 0..n_words {
            flips += bsc_transmit(0, bits_per, 0.1, &mut rng).count_ones() as u64;
        }
        let total = (n_words * bits_per as u64) as f64;
        let rate = flips as f64 / total;
        let sigma = (0.1 * 0.9 / total).sqrt();
        assert!((rate - 0.1).abs() < 3.0 * sigma, "rate {rate}");
    }

    #[test]
    fn classify_boundary_semantics() {
        let t = [0.1, 0.3];
        // v exactly at T_1 is kept, landing in band 1
        assert_eq!(
            classify_symbol(0.1, true, &t),
            SymbolClass::Band {
                band: 1,
                correct: true
            }
        );
        assert_eq!(classify_symbol(0.05, true, &t), SymbolClass::AlwaysErased);
        assert_eq!(classify_symbol(0.05, false, &t), SymbolClass::AlwaysErased);
        assert_eq!(
            classify_symbol(0.3, false, &t),
            SymbolClass::NeverErasedErroneous
        );
        assert_eq!(
            classify_symbol(0.5, true, &t),
            SymbolClass::NeverErasedCorrect
        );
        // single threshold: only the three border classes exist
        assert_eq!(
            classify_symbol(0.2, true, &[0.2]),
            SymbolClass::NeverErasedCorrect
        );
    }

    #[test]
    fn classify_band_search_matches_scan() {
        let t = [0.1, 0.2, 0.5, 0.9];
        for v in [0.1, 0.15, 0.2, 0.4, 0.5, 0.89] {
            let SymbolClass::Band { band, .. } = classify_symbol(v, true, &t) else {
                panic!("{v} should be banded");
            };
            assert!(t[band - 1] <= v && v < t[band], "v = {v}, band = {band}");
        }
    }

    #[test]
    fn noiseless_channel_always_succeeds() {
        let thresholds = solve_condition_system(1, 2, 0.2, 0.5).unwrap();
        let cfg = hamming_rs_config(0.0, thresholds, true);
        let report = monte_carlo(&cfg, 300, 3).unwrap();
        assert_eq!(report.successes, 300);
        assert_eq!(report.pe_hat, 0.0);
        assert_eq!(report.empirical.p_r, Some(1.0));
        // rule-of-three regime: Wilson upper bound is z^2/(n + z^2)
        assert!(report.ci95.0 == 0.0 && report.ci95.1 < 4.0 / 300.0);
    }

    #[test]
    fn huge_threshold_erases_everything() {
        let thresholds = ThresholdSet::manual(vec![1e18]).unwrap();
        let cfg = hamming_rs_config(0.02, thresholds, true);
        let report = monte_carlo(&cfg, 50, 4).unwrap();
        // 15 erasures > d - 1 = 8: never decodable
        assert_eq!(report.successes, 0);
        assert_eq!(report.empirical.p_c, 1.0);
    }

    #[test]
    fn minus_infinity_threshold_is_error_only_decoding() {
        let thresholds = ThresholdSet::manual(vec![f64::NEG_INFINITY]).unwrap();
        let cfg = hamming_rs_config(0.05, thresholds, false);
        for idx in 0..200 {
            let mut rng = trial_rng(9, idx);
            let outcome = run_trial(&cfg, &mut rng).unwrap();
            // every symbol is unerased, so the trial succeeds exactly when
            // the error count fits the error-only radius
            let errors = outcome
                .classes
                .iter()
                .filter(|c| matches!(c, SymbolClass::NeverErasedErroneous))
                .count();
            assert_eq!(outcome.success, 2 * errors <= 8, "trial {idx}");
        }
    }

    #[test]
    fn monte_carlo_is_counter_deterministic() {
        let thresholds = solve_condition_system(1, 2, 0.2, 0.5).unwrap();
        let cfg = hamming_rs_config(0.05, thresholds, true);
        let report = monte_carlo(&cfg, 400, 11).unwrap();
        // manual replay over the same counter streams
        let mut successes = 0u64;
        for idx in 0..400 {
            let mut rng = trial_rng(11, idx);
            successes += run_trial(&cfg, &mut rng).unwrap().success as u64;
        }
        assert_eq!(report.successes, successes);
        // doubling the trial count keeps the first half identical
        let longer = monte_carlo(&cfg, 800, 11).unwrap();
        let mut first_half = 0u64;
        for idx in 0..400 {
            let mut rng = trial_rng(11, idx);
            first_half += run_trial(&cfg, &mut rng).unwrap().success as u64;
        }
        assert_eq!(first_half, report.successes);
        assert!(longer.trials == 800);
    }

    #[test]
    fn monte_carlo_identical_across_worker_counts() {
        let thresholds = solve_condition_system(1, 2, 0.2, 0.5).unwrap();
        let cfg = hamming_rs_config(0.05, thresholds, true);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| monte_carlo(&cfg, 500, 21).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| monte_carlo(&cfg, 500, 21).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn empirical_counts_are_exhaustive() {
        let thresholds = solve_condition_system(1, 3, 0.2, 0.5).unwrap();
        let cfg = hamming_rs_config(0.08, thresholds, false);
        let report = monte_carlo(&cfg, 600, 5).unwrap();
        let t = &report.class_counts;
        assert_eq!(
            t.r + t.c + t.l + t.over.iter().sum::<u64>() + t.under.iter().sum::<u64>(),
            t.total
        );
        assert_eq!(t.total, 600 * 15);
        assert!((report.empirical.total() - 1.0).abs() < 1e-12);
        assert!(report.pe_hat >= report.ci95.0 && report.pe_hat <= report.ci95.1);
    }

    #[test]
    fn config_validation() {
        let thresholds = solve_condition_system(1, 1, 0.2, 0.5).unwrap();
        let mut cfg = hamming_rs_config(0.05, thresholds, true);
        cfg.l = 2;
        assert!(cfg.validate().is_err()); // real decoder with l != 1
        cfg.real_decoder = false;
        assert!(cfg.validate().is_ok());
        cfg.e = 0.7;
        assert!(cfg.validate().is_err());
        // inner k must match the field degree
        let bad = SimConfig {
            inner: InnerCode::repetition(5).unwrap(),
            ..hamming_rs_config(0.05, solve_condition_system(1, 1, 0.2, 0.5).unwrap(), true)
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn threshold_quality_moves_success_counts() {
        // sanity grid: a threshold inside the reliability gap (erase the
        // distance-1 decodes) beats a threshold that erases everything, and
        // raising the top threshold drains the never-erased-erroneous class
        let sensible = hamming_rs_config(0.05, ThresholdSet::manual(vec![0.3]).unwrap(), true);
        let absurd = hamming_rs_config(0.05, ThresholdSet::manual(vec![1.5]).unwrap(), true);
        let a = monte_carlo(&sensible, 2000, 31).unwrap();
        let b = monte_carlo(&absurd, 2000, 31).unwrap();
        assert!(a.per_threshold_success[0] >= b.per_threshold_success[0]);
        // higher top threshold: fewer unerased errors survive
        let low = hamming_rs_config(0.08, ThresholdSet::manual(vec![0.1]).unwrap(), true);
        let high = hamming_rs_config(0.08, ThresholdSet::manual(vec![0.4]).unwrap(), true);
        let lo = monte_carlo(&low, 2000, 32).unwrap();
        let hi = monte_carlo(&high, 2000, 32).unwrap();
        assert!(hi.empirical.p_l <= lo.empirical.p_l);
    }

    #[test]
    fn wilson_interval_basics() {
        let (lo, hi) = wilson_interval(0, 1_000_000, Z_95);
        assert_eq!(lo, 0.0);
        assert!(hi > 3.0e-6 && hi < 4.0e-6);
        let (lo, hi) = wilson_interval(500, 1000, Z_95);
        assert!(lo < 0.5 && 0.5 < hi);
    }
}
