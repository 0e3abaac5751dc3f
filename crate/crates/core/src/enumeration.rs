//! Exact and dominant-term residual-error computation from symbol-class
//! probabilities.
//!
//! A multi-trial decoding attempt fails outright exactly when every trial k
//! sees too much weight:
//!
//! ```text
//!   C1:  for all k = 1..z:
//!        (l+1)/l (t_l + sum_{v>=k} t_under_v)
//!        + t_c + sum_{v<k} (t_over_v + t_under_v)  >  d - 1
//! ```
//!
//! Summing the multinomial probability of every class-count vector in C1
//! gives the exact residual codeword error probability; the dominant-term
//! approximation keeps only the largest product over the corner set C3.

use num::BigUint;

use crate::error::{Error, Result};
use crate::exponent::ClassProbabilities;

/// Enumeration caps: beyond these the term count explodes and Monte Carlo
/// is the right tool.
pub const MAX_ENUM_N: usize = 64;
pub const MAX_ENUM_Z: usize = 3;

/// Number of super-channel symbols in each reliability class.
///
/// `over[i]`/`under[i]` are the band counts between thresholds i+1 and i+2;
/// all counts sum to the outer length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    pub t_r: u64,
    pub t_c: u64,
    pub t_l: u64,
    pub over: Vec<u64>,
    pub under: Vec<u64>,
}

impl ClassCounts {
    pub fn total(&self) -> u64 {
        self.t_r
            + self.t_c
            + self.t_l
            + self.over.iter().sum::<u64>()
            + self.under.iter().sum::<u64>()
    }
}

/// Does this count vector defeat every decoding trial? Exact integer
/// arithmetic: trial k compares (l+1) errors_k + l erasures_k > l (d-1).
pub fn condition_c1(counts: &ClassCounts, l: u32, z: usize, d_o: usize) -> Result<bool> {
    if l == 0 || z == 0 || d_o == 0 {
        return Err(Error::Domain("need l >= 1, z >= 1, d_o >= 1".into()));
    }
    if counts.over.len() != z - 1 || counts.under.len() != z - 1 {
        return Err(Error::Dimension(format!(
            "band counts must have length z - 1 = {}",
            z - 1
        )));
    }
    let l = l as u64;
    let bound = l * (d_o as u64 - 1);
    for k in 1..=z {
        let errors: u64 = counts.t_l + counts.under[(k - 1)..].iter().sum::<u64>();
        let erasures: u64 = counts.t_c
            + counts.over[..(k - 1)].iter().sum::<u64>()
            + counts.under[..(k - 1)].iter().sum::<u64>();
        if (l + 1) * errors + l * erasures <= bound {
            return Ok(false); // trial k succeeds
        }
    }
    Ok(true)
}

/// Exact multinomial coefficient n! / prod(counts!).
pub fn multinomial(n: u64, counts: &[u64]) -> Result<BigUint> {
    if counts.iter().sum::<u64>() != n {
        return Err(Error::Dimension(format!(
            "counts sum {} != n = {n}",
            counts.iter().sum::<u64>()
        )));
    }
    let mut result = BigUint::from(1u32);
    let mut next = 1u64;
    for &c in counts {
        for j in 1..=c {
            result = result * BigUint::from(next) / BigUint::from(j);
            next += 1;
        }
    }
    Ok(result)
}

struct EnumState<'a> {
    n: u64,
    d_o: usize,
    l: u64,
    z: usize,
    ln_probs: Vec<f64>,
    probs: &'a [f64],
    // Kahan-compensated linear accumulator plus a log-domain fallback for
    // regimes where every term underflows
    sum: f64,
    compensation: f64,
    log_sum: f64,
    counts: Vec<u64>,
}

/// Exact residual codeword error probability: the multinomial sum over all
/// class-count vectors satisfying C1.
///
/// `probs` must be normalized (p_r present, total 1); class layout and z
/// must agree. Capped at n <= 64, z <= 3.
pub fn exact_pe(
    probs: &ClassProbabilities,
    n_o: usize,
    d_o: usize,
    l: u32,
    z: usize,
) -> Result<f64> {
    probs.validate()?;
    if probs.z() != z {
        return Err(Error::Dimension(format!(
            "probability layout is for z = {}, requested z = {z}",
            probs.z()
        )));
    }
    let Some(p_r) = probs.p_r else {
        return Err(Error::Domain(
            "exact enumeration needs p_r (normalized probabilities)".into(),
        ));
    };
    if (probs.total() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "probabilities must sum to 1, got {}",
            probs.total()
        )));
    }
    if n_o > MAX_ENUM_N || z > MAX_ENUM_Z {
        return Err(Error::CapExceeded(format!(
            "n_o = {n_o} (cap {MAX_ENUM_N}), z = {z} (cap {MAX_ENUM_Z})"
        )));
    }
    if l == 0 || d_o == 0 || d_o > n_o + 1 {
        return Err(Error::Domain("need l >= 1 and 1 <= d_o <= n_o + 1".into()));
    }

    // class order: t_l, t_c, under_1.., over_1.., then t_r as the remainder
    let mut class_probs = vec![probs.p_l, probs.p_c];
    class_probs.extend_from_slice(&probs.p_under);
    class_probs.extend_from_slice(&probs.p_over);
    class_probs.push(p_r);
    let mut state = EnumState {
        n: n_o as u64,
        d_o,
        l: l as u64,
        z,
        ln_probs: class_probs.iter().map(|&p| p.ln()).collect(),
        probs: &class_probs,
        sum: 0.0,
        compensation: 0.0,
        log_sum: f64::NEG_INFINITY,
        counts: vec![0; class_probs.len()],
    };
    recurse(&mut state, 0, n_o as u64);
    if state.sum > 1e-280 {
        Ok(state.sum.min(1.0))
    } else {
        Ok(state.log_sum.exp().min(1.0))
    }
}

/// Weight of one symbol of class `class` in the trial-k inequality, scaled
/// by l. Class indices: 0 = t_l, 1 = t_c, 2..z+1 = under bands,
/// z+1..2z = over bands, 2z = t_r.
fn coeff(class: usize, k: usize, z: usize, l: u64) -> u64 {
    match class {
        0 => l + 1,
        1 => l,
        c if c < z + 1 => {
            let band = c - 1; // 1-based band index of an under class
            if band >= k {
                l + 1 // still an unerased error at trial k
            } else {
                l // erased by trial k
            }
        }
        c if c < 2 * z => {
            let band = c - z; // 1-based band index of an over class
            if band < k {
                l // correct symbol already erased
            } else {
                0 // correct symbol still present: harmless
            }
        }
        _ => 0, // t_r
    }
}

/// True when no completion of the partial assignment can satisfy C1: some
/// trial k stays within its radius even if the whole remaining budget goes
/// to the heaviest unassigned class.
fn prune_bound(state: &EnumState<'_>, depth: usize, budget: u64) -> bool {
    let l = state.l;
    let bound = l * (state.d_o as u64 - 1);
    let z = state.z;
    for k in 1..=z {
        let mut weighted = 0u64;
        for (class, &count) in state.counts.iter().enumerate().take(depth) {
            weighted += coeff(class, k, z, l) * count;
        }
        let mut max_coeff = 0u64;
        for class in depth..2 * z {
            max_coeff = max_coeff.max(coeff(class, k, z, l));
        }
        if weighted + budget * max_coeff <= bound {
            return true;
        }
    }
    false
}

fn recurse(state: &mut EnumState<'_>, depth: usize, budget: u64) {
    let bad_classes = 2 * state.z;
    if depth == bad_classes {
        state.counts[bad_classes] = budget; // t_r soaks up the remainder
        let counts = ClassCounts {
            t_l: state.counts[0],
            t_c: state.counts[1],
            under: state.counts[2..state.z + 1].to_vec(),
            over: state.counts[state.z + 1..2 * state.z].to_vec(),
            t_r: budget,
        };
        if condition_c1(&counts, state.l as u32, state.z, state.d_o).expect("validated") {
            add_term(state);
        }
        return;
    }
    if prune_bound(state, depth, budget) {
        return;
    }
    for c in 0..=budget {
        state.counts[depth] = c;
        recurse(state, depth + 1, budget - c);
    }
    state.counts[depth] = 0;
}

fn add_term(state: &mut EnumState<'_>) {
    // the multinomial fits f64 comfortably at n <= 64 and the probability
    // product is a handful of correctly rounded powers; the log route only
    // backs up the underflow regime
    let mut ln_term = 0.0f64;
    let mut linear = 1.0f64;
    for (&count, (&p, &ln_p)) in state
        .counts
        .iter()
        .zip(state.probs.iter().zip(&state.ln_probs))
    {
        if count == 0 {
            continue;
        }
        if p == 0.0 {
            return; // zero-probability class used: term vanishes
        }
        linear *= p.powi(count as i32);
        ln_term += count as f64 * ln_p;
    }
    let m = multinomial(state.n, &state.counts).expect("counts sum to n");
    let m_f64 = biguint_to_f64(&m);
    let term = m_f64 * linear;
    ln_term += m_f64.ln();

    let y = term - state.compensation;
    let t = state.sum + y;
    state.compensation = (t - state.sum) - y;
    state.sum = t;

    // online log-sum-exp for the fallback accumulator
    if state.log_sum == f64::NEG_INFINITY {
        state.log_sum = ln_term;
    } else {
        let (hi, lo) = if ln_term > state.log_sum {
            (ln_term, state.log_sum)
        } else {
            (state.log_sum, ln_term)
        };
        state.log_sum = hi + (lo - hi).exp().ln_1p();
    }
}

fn biguint_to_f64(v: &BigUint) -> f64 {
    // limbs are little-endian u32 digits
    let mut out = 0.0f64;
    for &limb in v.to_u32_digits().iter().rev() {
        out = out * 4294967296.0 + limb as f64;
    }
    out
}

/// The dominant multinomial term: maximize
/// p_l^t_l p_c^t_c prod (p_under_k^l p_over_k)^t_over_k over the corner set
///
/// ```text
///   C3: (l+1)/l t_l + t_c + (l+1) sum t_over_k = d - 1,
///       t_under_k = l t_over_k
/// ```
///
/// enumerated over exact non-negative integer solutions (so l must divide
/// t_l).
#[derive(Debug, Clone, PartialEq)]
pub struct DominantTerm {
    pub value: f64,
    /// None when C3 has no integer solution for these parameters.
    pub argmax: Option<ClassCounts>,
}

pub fn dominant_term_pe(
    probs: &ClassProbabilities,
    n_o: usize,
    d_o: usize,
    l: u32,
    z: usize,
) -> Result<DominantTerm> {
    probs.validate()?;
    if probs.z() != z {
        return Err(Error::Dimension(format!(
            "probability layout is for z = {}, requested z = {z}",
            probs.z()
        )));
    }
    if l == 0 || z == 0 || d_o == 0 || d_o > n_o + 1 {
        return Err(Error::Domain(
            "need l >= 1, z >= 1, 1 <= d_o <= n_o + 1".into(),
        ));
    }
    let lu = l as u64;
    let target = lu * (d_o as u64 - 1); // C3 scaled by l
    let mut best: Option<(f64, ClassCounts)> = None;
    let mut over = vec![0u64; z - 1];
    search_c3(probs, n_o, lu, target, 0, &mut over, 0, &mut best);
    Ok(match best {
        Some((log_value, counts)) => DominantTerm {
            value: log_value.exp(),
            argmax: Some(counts),
        },
        None => DominantTerm {
            value: 0.0,
            argmax: None,
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn search_c3(
    probs: &ClassProbabilities,
    n_o: usize,
    l: u64,
    remaining: u64,
    band: usize,
    over: &mut Vec<u64>,
    used: u64,
    best: &mut Option<(f64, ClassCounts)>,
) {
    let bands = probs.p_over.len();
    if band < bands {
        // each over-band unit costs l(l+1) in the scaled equation and
        // carries l+1 actual symbols
        let mut t = 0u64;
        while t * l * (l + 1) <= remaining && used + t * (l + 1) <= n_o as u64 {
            over[band] = t;
            search_c3(
                probs,
                n_o,
                l,
                remaining - t * l * (l + 1),
                band + 1,
                over,
                used + t * (l + 1),
                best,
            );
            t += 1;
        }
        over[band] = 0;
        return;
    }
    // choose t_l in multiples of l so that (l+1) t_l / l stays integral;
    // t_c is then forced
    let mut t_l = 0u64;
    while t_l * (l + 1) <= remaining {
        let rest = remaining - t_l * (l + 1);
        if rest.is_multiple_of(l) {
            let t_c = rest / l;
            if used + t_l + t_c <= n_o as u64 {
                let mut log_value = 0.0f64;
                let mut feasible = true;
                {
                    let mut add = |p: f64, t: u64| {
                        if t > 0 {
                            if p == 0.0 {
                                feasible = false;
                            } else {
                                log_value += t as f64 * p.ln();
                            }
                        }
                    };
                    add(probs.p_l, t_l);
                    add(probs.p_c, t_c);
                    for (i, &t_over) in over.iter().enumerate() {
                        add(probs.p_under[i], l * t_over);
                        add(probs.p_over[i], t_over);
                    }
                }
                if feasible && best.as_ref().is_none_or(|(bv, _)| log_value > *bv) {
                    let counts = ClassCounts {
                        t_r: n_o as u64 - used - t_l - t_c,
                        t_c,
                        t_l,
                        over: over.clone(),
                        under: over.iter().map(|&t| l * t).collect(),
                    };
                    *best = Some((log_value, counts));
                }
            }
        }
        t_l += l;
    }
}

/// The z+1 logarithmic corner values of the dominant-term approximation,
/// evaluated on concrete class probabilities: the quantities the optimal
/// threshold set equalizes.
pub fn corner_log_terms(probs: &ClassProbabilities, d_o: usize, l: u32) -> Vec<f64> {
    let lf = l as f64;
    let d1 = (d_o - 1) as f64;
    let mut terms = vec![lf * d1 / (lf + 1.0) * probs.p_l.ln(), d1 * probs.p_c.ln()];
    for (pu, po) in probs.p_under.iter().zip(&probs.p_over) {
        terms.push(d1 / (lf + 1.0) * (lf * pu.ln() + po.ln()));
    }
    terms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{lemma1_probs, ExponentModel};
    use crate::threshold::solve_condition_system;

    fn simple_probs(p_l: f64, p_c: f64, p_r: f64) -> ClassProbabilities {
        ClassProbabilities {
            p_r: Some(p_r),
            p_c,
            p_l,
            p_over: vec![],
            p_under: vec![],
        }
    }

    #[test]
    fn c1_examples() {
        let counts = ClassCounts {
            t_r: 1,
            t_c: 1,
            t_l: 1,
            over: vec![],
            under: vec![],
        };
        assert!(condition_c1(&counts, 1, 1, 3).unwrap()); // 2 + 1 > 2
        let counts = ClassCounts {
            t_r: 2,
            t_c: 0,
            t_l: 1,
            over: vec![],
            under: vec![],
        };
        assert!(!condition_c1(&counts, 1, 1, 3).unwrap()); // 2 <= 2
    }

    #[test]
    fn c1_requires_failure_at_every_trial() {
        // z = 2, d = 5: three band errors defeat trial 1 (2*3 > 4) but are
        // erased by trial 2 (3 <= 4), so this is not an error event
        let counts = ClassCounts {
            t_r: 5,
            t_c: 0,
            t_l: 0,
            over: vec![0],
            under: vec![3],
        };
        assert!(!condition_c1(&counts, 1, 2, 5).unwrap());
        // five always-erased symbols defeat both trials
        let counts = ClassCounts {
            t_r: 0,
            t_c: 5,
            t_l: 0,
            over: vec![0],
            under: vec![0],
        };
        assert!(condition_c1(&counts, 1, 2, 5).unwrap());
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(3, &[3, 0, 0]).unwrap(), 1u32.into());
        assert_eq!(multinomial(3, &[1, 1, 1]).unwrap(), 6u32.into());
        assert_eq!(multinomial(10, &[5, 5]).unwrap(), 252u32.into());
        assert!(multinomial(10, &[5, 4]).is_err());
    }

    #[test]
    fn exact_pe_spot_value() {
        // 10-term hand enumeration: error patterns (t_l, t_c) are
        // (0,3),(1,1),(1,2),(2,0),(2,1),(3,0) -> 0.132
        let p = exact_pe(&simple_probs(0.1, 0.2, 0.7), 3, 3, 1, 1).unwrap();
        assert!((p - 0.132).abs() < 1e-12, "{p}");
    }

    #[test]
    fn exact_pe_no_adverse_mass() {
        let p = exact_pe(&simple_probs(0.0, 0.0, 1.0), 8, 5, 1, 1).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn exact_pe_rejects_unnormalized_and_oversize() {
        assert!(exact_pe(&simple_probs(0.5, 0.2, 0.7), 3, 3, 1, 1).is_err());
        assert!(exact_pe(&simple_probs(0.1, 0.2, 0.7), 100, 3, 1, 1).is_err());
    }

    #[test]
    fn exact_pe_z1_matches_double_binomial() {
        // independent closed-loop oracle: P(fail) as a double binomial sum
        // over (t_l, t_c) with 2 t_l + t_c > d - 1
        let (p_l, p_c, p_r) = (0.07f64, 0.15f64, 0.78f64);
        let (n, d) = (12usize, 5usize);
        let mut oracle = 0.0f64;
        for t_l in 0..=n {
            for t_c in 0..=(n - t_l) {
                if 2 * t_l + t_c > d - 1 {
                    let ways = biguint_to_f64(
                        &multinomial(n as u64, &[t_l as u64, t_c as u64, (n - t_l - t_c) as u64])
                            .unwrap(),
                    );
                    oracle += ways
                        * p_l.powi(t_l as i32)
                        * p_c.powi(t_c as i32)
                        * p_r.powi((n - t_l - t_c) as i32);
                }
            }
        }
        let p = exact_pe(&simple_probs(p_l, p_c, p_r), n, d, 1, 1).unwrap();
        assert!((p - oracle).abs() < 1e-14, "{p} vs {oracle}");
    }

    #[test]
    fn exact_pe_monotone_in_adverse_probabilities() {
        let base = exact_pe(&simple_probs(0.05, 0.1, 0.85), 10, 5, 1, 1).unwrap();
        let more_l = exact_pe(&simple_probs(0.08, 0.1, 0.82), 10, 5, 1, 1).unwrap();
        let more_c = exact_pe(&simple_probs(0.05, 0.13, 0.82), 10, 5, 1, 1).unwrap();
        assert!(more_l >= base && more_c >= base);
    }

    #[test]
    fn exact_pe_z2_matches_brute_force() {
        let probs = ClassProbabilities {
            p_r: Some(0.6),
            p_c: 0.1,
            p_l: 0.05,
            p_over: vec![0.15],
            p_under: vec![0.1],
        };
        let (n, d, l) = (6usize, 4usize, 1u32);
        let mut oracle = 0.0f64;
        let ps = [0.05f64, 0.1, 0.1, 0.15, 0.6]; // t_l, t_c, under, over, t_r
        for t_l in 0..=n as u64 {
            for t_c in 0..=(n as u64 - t_l) {
                for t_u in 0..=(n as u64 - t_l - t_c) {
                    for t_o in 0..=(n as u64 - t_l - t_c - t_u) {
                        let t_r = n as u64 - t_l - t_c - t_u - t_o;
                        let counts = ClassCounts {
                            t_r,
                            t_c,
                            t_l,
                            over: vec![t_o],
                            under: vec![t_u],
                        };
                        if condition_c1(&counts, l, 2, d).unwrap() {
                            let ways = biguint_to_f64(
                                &multinomial(n as u64, &[t_l, t_c, t_u, t_o, t_r]).unwrap(),
                            );
                            oracle += ways
                                * ps[0].powi(t_l as i32)
                                * ps[1].powi(t_c as i32)
                                * ps[2].powi(t_u as i32)
                                * ps[3].powi(t_o as i32)
                                * ps[4].powi(t_r as i32);
                        }
                    }
                }
            }
        }
        let p = exact_pe(&probs, n, d, l, 2).unwrap();
        assert!((p - oracle).abs() < 1e-13, "{p} vs {oracle}");
    }

    #[test]
    fn dominant_z1_l1_specialization() {
        // maximize p_l^t_l p_c^t_c with 2 t_l + t_c = d - 1
        let probs = simple_probs(0.01, 0.05, 0.94);
        let dom = dominant_term_pe(&probs, 15, 9, 1, 1).unwrap();
        let mut oracle = f64::NEG_INFINITY;
        for t_l in 0..=4u64 {
            let t_c = 8 - 2 * t_l;
            oracle = oracle.max(0.01f64.ln() * t_l as f64 + 0.05f64.ln() * t_c as f64);
        }
        assert!((dom.value.ln() - oracle).abs() < 1e-12);
    }

    #[test]
    fn dominant_pure_erasure_corner() {
        let probs = simple_probs(0.0, 1.0, 0.0);
        let dom = dominant_term_pe(&probs, 15, 9, 1, 1).unwrap();
        assert_eq!(dom.value, 1.0);
        assert_eq!(dom.argmax.unwrap().t_c, 8);
    }

    #[test]
    fn dominant_corners_equalized_at_optimal_thresholds() {
        // at solver thresholds the corner terms of the approximation are
        // equal, so the dominant search ties across corners
        let (l, z, d_o, n_i) = (2u32, 2usize, 10usize, 6usize);
        let model = ExponentModel::explicit(0.9, 0.5).unwrap();
        let t = solve_condition_system(l, z, model.e0, model.s).unwrap();
        let probs = lemma1_probs(&model, t.values(), n_i).unwrap();
        let corners = corner_log_terms(&probs, d_o, l);
        let lo = corners.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo < 1e-9, "corner spread {corners:?}");
        // d - 1 = 9 makes all three corner count vectors integral at l = 2,
        // so the dominant term lands exactly on the shared corner value
        let dom = dominant_term_pe(&probs, 30, d_o, l, z).unwrap();
        assert!((dom.value.ln() - hi).abs() < 1e-9);
    }

    #[test]
    fn dominant_below_exact() {
        let probs = simple_probs(0.04, 0.12, 0.84);
        let exact = exact_pe(&probs, 12, 5, 1, 1).unwrap();
        let dom = dominant_term_pe(&probs, 12, 5, 1, 1).unwrap();
        assert!(dom.value <= exact);
        assert!(dom.value > 0.0);
    }
}
