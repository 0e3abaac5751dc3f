//! Optimal erasing-threshold computation and residual-error prediction.
//!
//! A threshold set T_1 < ... < T_z is optimal when the corner terms of the
//! dominant-term error approximation are all equal. Under the exponential
//! class-probability approximations those equalization conditions become
//! linear in the thresholds:
//!
//! ```text
//!   (6)  T_1 + l/(l+1) T_z = (E0/s) / (l+1)
//!   (7)  T_2 = (2l + 1) T_1
//!   (8)  l T_k - (l+1) T_{k+1} + T_{k+2} = 0      k = 1..z-2
//! ```
//!
//! Equation (7) here is the direct logarithmic expansion of the condition
//! p_c = (p_under^l p_over)^(1/(l+1)); see [`closed_form_paper`] and
//! [`discrepancy_report`] for the printed closed form it disagrees with at
//! l >= 2.
//!
//! Three independent routes are provided: the linear condition solver (the
//! authoritative one), the literal printed closed form, and a derivative-free
//! minimax optimizer that equalizes the corner terms numerically and serves
//! as the method-independent oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{solve_linear_system, Scalar};
use crate::Rational;

/// Provenance of a threshold set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMethod {
    ConditionSolver,
    PaperClosedForm,
    Minimax,
    Manual,
}

/// Ordered reliability thresholds in nats, with provenance and the E0/s
/// ratio they were computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    values: Vec<f64>,
    method: ThresholdMethod,
    ratio: f64,
}

impl ThresholdSet {
    pub fn new(values: Vec<f64>, method: ThresholdMethod, ratio: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("threshold count z must be >= 1".into()));
        }
        // partial_cmp keeps the rejection of NaN entries explicit
        if values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::Domain(format!(
                "thresholds must be strictly increasing, got {values:?}"
            )));
        }
        Ok(ThresholdSet {
            values,
            method,
            ratio,
        })
    }

    pub fn manual(values: Vec<f64>) -> Result<Self> {
        Self::new(values, ThresholdMethod::Manual, f64::NAN)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn z(&self) -> usize {
        self.values.len()
    }

    pub fn method(&self) -> ThresholdMethod {
        self.method
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn largest(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }
}

fn check_l_z(l: u32, z: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::Domain("l must be >= 1".into()));
    }
    if z == 0 {
        return Err(Error::Domain("threshold count z must be >= 1".into()));
    }
    Ok(())
}

fn check_e0_s(e0: f64, s: f64) -> Result<()> {
    if !(e0 > 0.0 && e0.is_finite()) {
        return Err(Error::Domain(format!("E0 = {e0} must be positive")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("s = {s} must be positive")));
    }
    Ok(())
}

/// Solve the equalization conditions for the thresholds, in units of the
/// ratio E0/s, over any scalar (f64 or exact rationals).
pub fn condition_thresholds<S: Scalar>(l: u32, z: usize, ratio: &S) -> Result<Vec<S>> {
    check_l_z(l, z)?;
    let lu = l as u64;
    let mut a = vec![vec![S::zero(); z]; z];
    let mut b = vec![S::zero(); z];
    // condition (6): T_1 + l/(l+1) T_z = ratio/(l+1)
    a[0][0] = a[0][0].clone() + S::one();
    a[0][z - 1] = a[0][z - 1].clone() + S::ratio_u64(lu, lu + 1);
    b[0] = ratio.clone() / S::from_u64(lu + 1);
    if z >= 2 {
        // condition (7): (2l+1) T_1 - T_2 = 0
        a[1][0] = S::from_u64(2 * lu + 1);
        a[1][1] = -S::one();
        // condition (8): l T_k - (l+1) T_{k+1} + T_{k+2} = 0
        for i in 0..z - 2 {
            a[2 + i][i] = S::from_u64(lu);
            a[2 + i][i + 1] = -S::from_u64(lu + 1);
            a[2 + i][i + 2] = S::one();
        }
    }
    solve_linear_system(a, b).ok_or(Error::Singular { l, z })
}

/// Optimal thresholds from the equalization conditions (the authoritative
/// route).
pub fn solve_condition_system(l: u32, z: usize, e0: f64, s: f64) -> Result<ThresholdSet> {
    check_e0_s(e0, s)?;
    let ratio = e0 / s;
    let values = condition_thresholds(l, z, &ratio)?;
    ThresholdSet::new(values, ThresholdMethod::ConditionSolver, ratio)
}

/// Closed-form threshold set for outer bounded-minimum-distance decoding
/// (l = 1): T_k = (E0/s) (2k-1) / (2z+1).
pub fn corollary_bmd(z: usize, e0: f64, s: f64) -> Result<ThresholdSet> {
    check_l_z(1, z)?;
    check_e0_s(e0, s)?;
    let ratio = e0 / s;
    let values = (1..=z)
        .map(|k| ratio * (2 * k - 1) as f64 / (2 * z + 1) as f64)
        .collect();
    ThresholdSet::new(values, ThresholdMethod::ConditionSolver, ratio)
}

/// Literal evaluation of the printed closed-form threshold formula for
/// l >= 2:
///
/// ```text
///   T_k = E0 (l^z (l^2+1) - 2 l^k (l^2+l-1) + l^3 + l^2)
///         / (-s (l^z (l^2+1) + l^3 - l^2 - 2l))
/// ```
///
/// The result is reported as printed and is *not* asserted to satisfy the
/// equalization conditions; run [`check_equalization`] on it (or see
/// [`discrepancy_report`]) to inspect the residuals.
pub fn closed_form_paper(l: u32, z: usize, e0: f64, s: f64) -> Result<ThresholdSet> {
    check_l_z(l, z)?;
    check_e0_s(e0, s)?;
    if l < 2 {
        return Err(Error::Domain(
            "printed closed form is singular at l = 1 (zero denominator)".into(),
        ));
    }
    let ratio = e0 / s;
    let lf = l as f64;
    let lz = lf.powi(z as i32);
    let denom = -(lz * (lf * lf + 1.0) + lf.powi(3) - lf * lf - 2.0 * lf);
    let values = (1..=z)
        .map(|k| {
            let num = lz * (lf * lf + 1.0) - 2.0 * lf.powi(k as i32) * (lf * lf + lf - 1.0)
                + lf.powi(3)
                + lf * lf;
            ratio * num / denom
        })
        .collect();
    ThresholdSet::new(values, ThresholdMethod::PaperClosedForm, ratio)
}

/// Normalized corner terms of the dominant error approximation under the
/// exponential probability model, in units of E0 (the (d-1) n factor common
/// to all of them is dropped):
///
/// ```text
///   g_l = l/(l+1) (E0 + s T_z)
///   g_c = E0 - s T_1
///   g_k = (l (E0 + s T_k) + E0 - s T_{k+1}) / (l+1)     k = 1..z-1
/// ```
///
/// The residual error is governed by exp(-(d-1) n min g), so an optimal set
/// maximizes the minimum and equalizes all z+1 terms.
pub fn corner_exponents(thresholds: &[f64], l: u32, e0: f64, s: f64) -> Vec<f64> {
    let z = thresholds.len();
    let lf = l as f64;
    let mut g = Vec::with_capacity(z + 1);
    g.push(lf / (lf + 1.0) * (e0 + s * thresholds[z - 1]));
    g.push(e0 - s * thresholds[0]);
    for k in 0..z - 1 {
        g.push((lf * (e0 + s * thresholds[k]) + e0 - s * thresholds[k + 1]) / (lf + 1.0));
    }
    g
}

/// Signed per-condition residuals, all zero exactly when the thresholds
/// satisfy the equalization conditions. Layout: condition (6), then (7)
/// for z >= 2, then one entry per condition (8).
pub fn check_equalization(thresholds: &[f64], l: u32, e0: f64, s: f64) -> Result<Vec<f64>> {
    check_l_z(l, thresholds.len())?;
    let g = corner_exponents(thresholds, l, e0, s);
    // g[0] = g_l, g[1] = g_c, g[2..] = band terms
    let mut residuals = vec![g[0] - g[1]];
    for k in 1..g.len() - 1 {
        residuals.push(g[k] - g[k + 1]);
    }
    Ok(residuals)
}

/// Result of [`limit_threshold`]: the stated large-z limit, the actual limit
/// of the printed closed form (l >= 2 only), and the numerical limit of the
/// condition solver's largest threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitThreshold {
    /// E0 (l^2 + 2l - 1) / (s (l^2 + 1)) as stated.
    pub stated: f64,
    /// z -> infinity, k = z limit of the printed closed form:
    /// E0 (l^2 + 2l - 3) / (s (l^2 + 1)); absent for l = 1 where the form
    /// does not apply.
    pub closed_form_limit: Option<f64>,
    /// Largest solver threshold at the z = 30 proxy.
    pub solver_proxy: f64,
    /// |T_30 at z=30 - T_29 at z=29|: how settled the proxy is.
    pub solver_convergence_gap: f64,
}

pub fn limit_threshold(l: u32, e0: f64, s: f64) -> Result<LimitThreshold> {
    check_l_z(l, 1)?;
    check_e0_s(e0, s)?;
    let ratio = e0 / s;
    let lf = l as f64;
    let stated = ratio * (lf * lf + 2.0 * lf - 1.0) / (lf * lf + 1.0);
    let closed_form_limit = (l >= 2).then(|| ratio * (lf * lf + 2.0 * lf - 3.0) / (lf * lf + 1.0));
    let t30 = condition_thresholds(l, 30, &ratio)?[29];
    let t29 = condition_thresholds(l, 29, &ratio)?[28];
    Ok(LimitThreshold {
        stated,
        closed_form_limit,
        solver_proxy: t30,
        solver_convergence_gap: (t30 - t29).abs(),
    })
}

// ---------------------------------------------------------------------------
// minimax oracle
// ---------------------------------------------------------------------------

const MINIMAX_SPREAD_TOL: f64 = 1e-9;
const MINIMAX_IMPROVE_TOL: f64 = 1e-12;

/// Minimize the maximum corner term of the dominant error approximation over
/// ordered threshold sets, by Nelder–Mead restarted from 8 spread starting
/// points and polished with shrinking restarts around the incumbent.
///
/// The (d-1) n_i factor scales every corner term identically and therefore
/// does not move the optimum; the iteration works on the normalized terms of
/// [`corner_exponents`]. Converged means the objective stopped improving by
/// more than 1e-12 and the corner terms are equal within 1e-9.
pub fn minimax_optimize(
    l: u32,
    z: usize,
    e0: f64,
    s: f64,
    _n_i: usize,
    _d_o: usize,
) -> Result<ThresholdSet> {
    check_l_z(l, z)?;
    check_e0_s(e0, s)?;
    let ratio = e0 / s;
    // maximize min g  <=>  minimize -(min g); ordering violations get a
    // continuous penalty so the objective stays convex piecewise-linear
    let objective = |t: &[f64]| -> f64 {
        let mut penalty = 0.0;
        for w in t.windows(2) {
            penalty += (w[0] - w[1]).max(0.0);
        }
        let g = corner_exponents(t, l, e0, s);
        let min_g = g.iter().cloned().fold(f64::INFINITY, f64::min);
        -min_g + penalty * 1e3 * (e0 + s).max(1.0)
    };
    let spread = |t: &[f64]| -> f64 {
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return f64::INFINITY;
        }
        let g = corner_exponents(t, l, e0, s);
        let lo = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / e0.max(1.0)
    };

    // 8 spread starting ramps: four linear, four geometric (the latter match
    // the l^k growth the band conditions induce for l >= 2)
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(8);
    for &scale in &[0.2, 0.5, 0.9, 1.6] {
        starts.push(
            (1..=z)
                .map(|k| ratio * scale * (2 * k - 1) as f64 / (2 * z + 1) as f64)
                .collect(),
        );
    }
    let growth = (l as f64).max(1.5);
    for &scale in &[0.4, 0.8, 1.2, 2.0] {
        starts.push(
            (1..=z)
                .map(|k| ratio * scale * growth.powi(k as i32 - z as i32 - 1))
                .collect(),
        );
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &starts {
        let step = 0.2 * ratio.abs().max(1e-3) / (z * z) as f64;
        let (point, value) = nelder_mead(&objective, start, step, 4000);
        if best.as_ref().is_none_or(|(_, bv)| value < *bv) {
            best = Some((point, value));
        }
    }
    let (mut point, mut value) = best.expect("at least one restart ran");

    // polish: alternate small fresh simplexes around the incumbent with
    // cyclic golden-section sweeps. The coordinate restrictions are convex
    // piecewise-linear, so the sweeps sharpen single coordinates while the
    // simplex restarts fix joint directions the sweeps cannot move along.
    let mut radius = 0.05 * ratio.abs().max(1e-3);
    let mut stalled = 0;
    for _ in 0..120 {
        let before = spread(&point);
        if before < MINIMAX_SPREAD_TOL * 1e-2 {
            break;
        }
        let (p, v) = nelder_mead(&objective, &point, radius, 4000);
        if v < value {
            point = p;
            value = v;
        }
        for j in 0..z {
            // bracket from the neighbor gaps with a floor, so collapsed
            // coordinates can still separate; the penalty keeps conditional
            // minima inside the ordered region
            let gap_left = (j > 0).then(|| point[j] - point[j - 1]);
            let gap_right = (j + 1 < z).then(|| point[j + 1] - point[j]);
            let w = gap_left
                .into_iter()
                .chain(gap_right)
                .fold(0.0f64, f64::max)
                .max(radius)
                * 1.5;
            point[j] = golden_min_1d(
                &|x: f64| {
                    let mut t = point.clone();
                    t[j] = x;
                    objective(&t)
                },
                point[j] - w,
                point[j] + w,
            );
        }
        value = value.min(objective(&point));
        let after = spread(&point);
        if after < MINIMAX_SPREAD_TOL && before - after < MINIMAX_IMPROVE_TOL {
            break;
        }
        stalled = if before - after < MINIMAX_IMPROVE_TOL {
            stalled + 1
        } else {
            0
        };
        if stalled > 12 {
            break;
        }
        radius = (radius * 0.6).max(1e-12 * ratio.abs().max(1.0));
    }
    let final_spread = spread(&point);
    if final_spread >= MINIMAX_SPREAD_TOL {
        return Err(Error::NoConvergence(format!(
            "minimax corner spread {final_spread:.3e} >= {MINIMAX_SPREAD_TOL:.0e} \
             after restarts (l = {l}, z = {z}, point = {point:?})"
        )));
    }
    ThresholdSet::new(point, ThresholdMethod::Minimax, ratio)
}

/// Golden-section minimization of a 1-D unimodal function on [lo, hi].
fn golden_min_1d(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..220 {
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 > f2 {
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
    0.5 * (lo + hi)
}

/// Plain Nelder–Mead with an axis-aligned initial simplex; returns the best
/// vertex. Deterministic.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        let v = f(&p);
        simplex.push((p, v));
    }
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let f_spread = simplex[n].1 - simplex[0].1;
        if diameter < 1e-15 || f_spread < 1e-16 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(p, _)| p[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|i| centroid[i] + alpha * (centroid[i] - worst.0[i]))
            .collect();
        let f_reflect = f(&reflect);
        if f_reflect < simplex[0].1 {
            let expand: Vec<f64> = (0..n)
                .map(|i| centroid[i] + gamma * (reflect[i] - centroid[i]))
                .collect();
            let f_expand = f(&expand);
            simplex[n] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[n - 1].1 {
            simplex[n] = (reflect, f_reflect);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|i| centroid[i] + rho * (worst.0[i] - centroid[i]))
                .collect();
            let f_contract = f(&contract);
            if f_contract < worst.1 {
                simplex[n] = (contract, f_contract);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = (0..n)
                        .map(|i| best[i] + sigma * (entry.0[i] - best[i]))
                        .collect();
                    let v = f(&p);
                    *entry = (p, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    simplex[0].clone()
}

// ---------------------------------------------------------------------------
// residual error predictions
// ---------------------------------------------------------------------------

/// Where a residual-error prediction came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeSource {
    FromThresholds,
    Eq21,
    Eq22,
    Eq23,
    BmdReference,
}

/// Natural-log residual codeword error prediction, reported as
/// log_pe = -coefficient * E0 * n_i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PePrediction {
    pub log_pe: f64,
    /// Multiplier of E0 n_i in the exponent.
    pub coefficient: f64,
    pub source: PeSource,
}

/// Residual error prediction from a concrete threshold set: the dominant
/// term is governed by the largest threshold,
/// log P_e = -(E0 + s T_z) n_i l (d-1) / (l+1).
pub fn predict_pe(
    thresholds: &ThresholdSet,
    l: u32,
    d_o: usize,
    n_i: usize,
    e0: f64,
    s: f64,
) -> Result<PePrediction> {
    check_l_z(l, thresholds.z())?;
    check_e0_s(e0, s)?;
    if d_o < 2 || n_i == 0 {
        return Err(Error::Domain("need d_o >= 2 and n_i >= 1".into()));
    }
    let lf = l as f64;
    let coefficient = (e0 + s * thresholds.largest()) * lf * (d_o - 1) as f64 / ((lf + 1.0) * e0);
    Ok(PePrediction {
        log_pe: -coefficient * e0 * n_i as f64,
        coefficient,
        source: PeSource::FromThresholds,
    })
}

/// Exact residual-error coefficient for solver thresholds, as a rational:
/// (1 + T_z/(E0/s)) l (d-1) / (l+1). Independent of the actual E0, s values.
pub fn pe_coefficient_exact(l: u32, z: usize, d_o: usize) -> Result<Rational> {
    if d_o < 2 {
        return Err(Error::Domain("need d_o >= 2".into()));
    }
    let one = Rational::from_u64(1);
    let t = condition_thresholds(l, z, &one)?;
    let t_z = t.last().expect("z >= 1").clone();
    let lu = l as u64;
    Ok((one + t_z) * Rational::ratio_u64(lu * (d_o as u64 - 1), lu + 1))
}

/// Which printed prediction formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaperBranch {
    /// Finite number of trials z.
    FiniteZ(usize),
    /// One single threshold.
    SingleThreshold,
    /// Unlimited number of thresholds.
    Unlimited,
}

/// Literal evaluation of the printed residual-error coefficients. The
/// finite-z and unlimited branches require l >= 2 (0/0 at l = 1).
pub fn predict_pe_paper_forms(
    l: u32,
    branch: PaperBranch,
    d_o: usize,
    n_i: usize,
    e0: f64,
) -> Result<PePrediction> {
    check_l_z(l, 1)?;
    if d_o < 2 || n_i == 0 {
        return Err(Error::Domain("need d_o >= 2 and n_i >= 1".into()));
    }
    let lf = l as f64;
    let d1 = (d_o - 1) as f64;
    let (coefficient, source) = match branch {
        PaperBranch::FiniteZ(z) => {
            check_l_z(l, z)?;
            if l < 2 {
                return Err(Error::Domain(
                    "finite-z printed coefficient is 0/0 at l = 1".into(),
                ));
            }
            let num = 2.0 * lf * d1 * (lf.powi(z as i32) - 1.0);
            let den = lf.powi(z as i32 + 1) + lf.powi(z as i32 - 1) + lf * lf - lf - 2.0;
            (num / den, PeSource::Eq21)
        }
        PaperBranch::SingleThreshold => (2.0 * lf * d1 / (2.0 * lf + 1.0), PeSource::Eq22),
        PaperBranch::Unlimited => {
            if l < 2 {
                return Err(Error::Domain(
                    "unlimited-z printed coefficient requires l >= 2".into(),
                ));
            }
            (2.0 * lf * d1 / (lf + 1.0 / lf), PeSource::Eq23)
        }
    };
    Ok(PePrediction {
        log_pe: -coefficient * e0 * n_i as f64,
        coefficient,
        source,
    })
}

/// All three printed branches plus the claimed ordering
/// P_infinity <= P_z <= P_1 (equivalently c_infinity >= c_z >= c_1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeOrdering {
    pub single: PePrediction,
    pub finite_z: PePrediction,
    pub unlimited: PePrediction,
    pub ordering_holds: bool,
}

pub fn paper_pe_ordering(l: u32, z: usize, d_o: usize, n_i: usize, e0: f64) -> Result<PeOrdering> {
    let single = predict_pe_paper_forms(l, PaperBranch::SingleThreshold, d_o, n_i, e0)?;
    let finite_z = predict_pe_paper_forms(l, PaperBranch::FiniteZ(z), d_o, n_i, e0)?;
    let unlimited = predict_pe_paper_forms(l, PaperBranch::Unlimited, d_o, n_i, e0)?;
    Ok(PeOrdering {
        single,
        finite_z,
        unlimited,
        ordering_holds: unlimited.coefficient >= finite_z.coefficient - 1e-12
            && finite_z.coefficient >= single.coefficient - 1e-12,
    })
}

/// Reference prediction for plain outer BMD decoding with z trials:
/// coefficient 2z(d-1)/(2z+1).
pub fn bmd_reference_pe(z: usize, d_o: usize, n_i: usize, e0: f64) -> Result<PePrediction> {
    check_l_z(1, z)?;
    if d_o < 2 || n_i == 0 {
        return Err(Error::Domain("need d_o >= 2 and n_i >= 1".into()));
    }
    let coefficient = 2.0 * z as f64 * (d_o - 1) as f64 / (2.0 * z as f64 + 1.0);
    Ok(PePrediction {
        log_pe: -coefficient * e0 * n_i as f64,
        coefficient,
        source: PeSource::BmdReference,
    })
}

// ---------------------------------------------------------------------------
// closed-form vs solver discrepancy report
// ---------------------------------------------------------------------------

/// One (l, z) comparison of the printed formulas against the condition
/// solver and the minimax oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscrepancyEntry {
    pub l: u32,
    pub z: usize,
    pub solver_thresholds: Vec<f64>,
    pub minimax_thresholds: Vec<f64>,
    pub closed_form_thresholds: Vec<f64>,
    pub solver_max_abs_residual: f64,
    pub minimax_max_abs_residual: f64,
    pub closed_form_max_abs_residual: f64,
    /// printed thresholds fail equalization (residual above 1e-3)
    pub closed_form_fails_equalization: bool,
    pub solver_pe_coefficient: f64,
    pub printed_pe_coefficient: f64,
    pub pe_coefficient_mismatch: bool,
    pub stated_limit_threshold: f64,
    pub closed_form_limit_threshold: f64,
    pub solver_limit_proxy: f64,
    pub limit_threshold_mismatch: bool,
}

/// Compare printed closed forms against the solver and minimax for
/// l = 2, 3 and z = 2, 3, flagging each mismatch.
pub fn discrepancy_report(d_o: usize, n_i: usize, e0: f64, s: f64) -> Result<Vec<DiscrepancyEntry>> {
    let mut entries = Vec::new();
    for l in [2u32, 3] {
        let limits = limit_threshold(l, e0, s)?;
        for z in [2usize, 3] {
            let solver = solve_condition_system(l, z, e0, s)?;
            let minimax = minimax_optimize(l, z, e0, s, n_i, d_o)?;
            let closed = closed_form_paper(l, z, e0, s)?;
            let max_abs = |t: &ThresholdSet| -> Result<f64> {
                Ok(check_equalization(t.values(), l, e0, s)?
                    .iter()
                    .fold(0.0f64, |acc, r| acc.max(r.abs())))
            };
            let solver_res = max_abs(&solver)?;
            let minimax_res = max_abs(&minimax)?;
            let closed_res = max_abs(&closed)?;
            let solver_pe = predict_pe(&solver, l, d_o, n_i, e0, s)?.coefficient;
            let printed_pe =
                predict_pe_paper_forms(l, PaperBranch::FiniteZ(z), d_o, n_i, e0)?.coefficient;
            entries.push(DiscrepancyEntry {
                l,
                z,
                solver_thresholds: solver.values().to_vec(),
                minimax_thresholds: minimax.values().to_vec(),
                closed_form_thresholds: closed.values().to_vec(),
                solver_max_abs_residual: solver_res,
                minimax_max_abs_residual: minimax_res,
                closed_form_max_abs_residual: closed_res,
                closed_form_fails_equalization: closed_res > 1e-3,
                solver_pe_coefficient: solver_pe,
                printed_pe_coefficient: printed_pe,
                pe_coefficient_mismatch: (solver_pe - printed_pe).abs()
                    > 1e-6 * printed_pe.abs().max(1.0),
                stated_limit_threshold: limits.stated,
                closed_form_limit_threshold: limits.closed_form_limit.unwrap_or(f64::NAN),
                solver_limit_proxy: limits.solver_proxy,
                limit_threshold_mismatch: (limits.stated - limits.solver_proxy).abs()
                    > 1e-3 * limits.stated.abs().max(1.0),
            });
        }
    }
    Ok(entries)
}
