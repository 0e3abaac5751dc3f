//! Fast self-contained verification subset: closed-form reproduction,
//! oracle agreement, exact coefficients, printed-formula discrepancies,
//! decoder equivalence, and the enumeration spot value.

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use gmd_core::enumeration::exact_pe;
use gmd_core::exponent::ClassProbabilities;
use gmd_core::field::{FieldElement, FieldSpec};
use gmd_core::outer::{ErasureWord, OuterCode};
use gmd_core::scalar::Scalar;
use gmd_core::threshold::{
    check_equalization, discrepancy_report, minimax_optimize, pe_coefficient_exact,
    solve_condition_system, DiscrepancyEntry,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelftestReport {
    pub tool_version: String,
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
    pub discrepancies: Vec<DiscrepancyEntry>,
}

pub fn run() -> SelftestReport {
    let mut checks = Vec::new();
    checks.push(corollary_reproduction());
    checks.push(oracle_agreement());
    checks.push(exact_single_threshold_coefficient());
    let (disc_check, discrepancies) = discrepancy_check();
    checks.push(disc_check);
    checks.push(decoder_equivalence());
    checks.push(enumeration_spot_value());
    let all_passed = checks.iter().all(|c| c.pass);
    SelftestReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        all_passed,
        checks,
        discrepancies,
    }
}

fn corollary_reproduction() -> CheckResult {
    let started = std::time::Instant::now();
    let mut worst = 0.0f64;
    for z in 1..=10usize {
        for ratio in [0.1f64, 1.0, 10.0] {
            let t = match solve_condition_system(1, z, ratio, 1.0) {
                Ok(t) => t,
                Err(e) => return fail("corollary-reproduction", e.to_string()),
            };
            for (k, &value) in t.values().iter().enumerate() {
                let expect = ratio * (2 * (k + 1) - 1) as f64 / (2 * z + 1) as f64;
                worst = worst.max(((value - expect) / expect).abs());
            }
        }
    }
    CheckResult {
        name: "corollary-reproduction".into(),
        pass: worst < 1e-9,
        detail: format!(
            "worst relative deviation {worst:.2e} over z in 1..=10, ratio in {{0.1, 1, 10}} \
             ({:?})",
            started.elapsed()
        ),
    }
}

fn oracle_agreement() -> CheckResult {
    let started = std::time::Instant::now();
    let (e0, s) = (1.0, 0.5);
    let mut worst_dev = 0.0f64;
    let mut worst_res = 0.0f64;
    for l in 1..=5u32 {
        for z in 1..=6usize {
            let solver = match solve_condition_system(l, z, e0, s) {
                Ok(t) => t,
                Err(e) => return fail("oracle-agreement", e.to_string()),
            };
            let minimax = match minimax_optimize(l, z, e0, s, 7, 9) {
                Ok(t) => t,
                Err(e) => return fail("oracle-agreement", e.to_string()),
            };
            for (a, b) in minimax.values().iter().zip(solver.values()) {
                worst_dev = worst_dev.max((a - b).abs());
            }
            let residuals = check_equalization(solver.values(), l, e0, s).unwrap_or_default();
            for r in residuals {
                worst_res = worst_res.max(r.abs());
            }
        }
    }
    CheckResult {
        name: "oracle-agreement".into(),
        pass: worst_dev < 1e-6 && worst_res < 1e-9,
        detail: format!(
            "worst |minimax - solver| = {worst_dev:.2e}, worst solver residual = {worst_res:.2e} \
             over l in 1..=5, z in 1..=6 ({:?})",
            started.elapsed()
        ),
    }
}

fn exact_single_threshold_coefficient() -> CheckResult {
    for l in 1..=5u32 {
        for d_o in [5usize, 9, 33] {
            let got = match pe_coefficient_exact(l, 1, d_o) {
                Ok(c) => c,
                Err(e) => return fail("single-threshold-coefficient", e.to_string()),
            };
            let expect = BigRational::ratio_u64(2 * l as u64 * (d_o as u64 - 1), 2 * l as u64 + 1);
            if got != expect {
                return fail(
                    "single-threshold-coefficient",
                    format!("l = {l}, d = {d_o}: {got} != {expect}"),
                );
            }
        }
    }
    CheckResult {
        name: "single-threshold-coefficient".into(),
        pass: true,
        detail: "exact rational match 2l(d-1)/(2l+1) for l in 1..=5, d in {5, 9, 33}".into(),
    }
}

fn discrepancy_check() -> (CheckResult, Vec<DiscrepancyEntry>) {
    let entries = match discrepancy_report(9, 7, 1.0, 0.5) {
        Ok(e) => e,
        Err(e) => return (fail("closed-form-discrepancy", e.to_string()), Vec::new()),
    };
    let l2z2 = entries.iter().find(|d| d.l == 2 && d.z == 2);
    let pass = match l2z2 {
        Some(d) => {
            d.closed_form_fails_equalization
                && d.closed_form_max_abs_residual > 1e-3
                && d.solver_max_abs_residual < 1e-9
        }
        None => false,
    };
    let detail = match l2z2 {
        Some(d) => format!(
            "l=2 z=2: closed-form residual {:.3e} (fails), solver residual {:.3e} (passes); \
             {} of {} entries flag a coefficient mismatch",
            d.closed_form_max_abs_residual,
            d.solver_max_abs_residual,
            entries.iter().filter(|d| d.pe_coefficient_mismatch).count(),
            entries.len(),
        ),
        None => "missing l=2, z=2 entry".into(),
    };
    (
        CheckResult {
            name: "closed-form-discrepancy".into(),
            pass,
            detail,
        },
        entries,
    )
}

fn decoder_equivalence() -> CheckResult {
    let started = std::time::Instant::now();
    let field = match FieldSpec::new(4) {
        Ok(f) => f,
        Err(e) => return fail("decoder-equivalence", e.to_string()),
    };
    let code = match OuterCode::new(field, 15, 7) {
        Ok(c) => c,
        Err(e) => return fail("decoder-equivalence", e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    let patterns = 10_000usize;
    for trial in 0..patterns {
        let info: Vec<FieldElement> = (0..7).map(|_| FieldElement(rng.gen_range(0..16))).collect();
        let cw = match code.encode(&info) {
            Ok(c) => c,
            Err(e) => return fail("decoder-equivalence", e.to_string()),
        };
        let errors = rng.gen_range(0..=7usize);
        let erasures = rng.gen_range(0..=(15 - errors));
        let mut positions: Vec<usize> = (0..15).collect();
        for i in (1..15).rev() {
            let j = rng.gen_range(0..=i);
            positions.swap(i, j);
        }
        let mut symbols: Vec<Option<FieldElement>> = cw.iter().copied().map(Some).collect();
        for &p in positions.iter().take(errors) {
            let offset = rng.gen_range(1..16u16);
            symbols[p] = Some(code.field().add(cw[p], FieldElement(offset)));
        }
        for &p in positions.iter().skip(errors).take(erasures) {
            symbols[p] = None;
        }
        let word = ErasureWord::from_symbols(symbols);
        let real = code
            .bmd_decode_errors_erasures(&word)
            .map(|o| o.is_codeword(&cw));
        let model = code.model_lbd_decode(&word, &cw, 1).map(|o| o.is_codeword(&cw));
        match (real, model) {
            (Ok(r), Ok(m)) if r == m => {}
            (Ok(r), Ok(m)) => {
                return fail(
                    "decoder-equivalence",
                    format!("disagreement at pattern {trial}: real {r}, model {m}"),
                )
            }
            (Err(e), _) | (_, Err(e)) => return fail("decoder-equivalence", e.to_string()),
        }
    }
    CheckResult {
        name: "decoder-equivalence".into(),
        pass: true,
        detail: format!(
            "{patterns} random error/erasure patterns on RS(15,7)/GF(16), zero disagreements \
             ({:?})",
            started.elapsed()
        ),
    }
}

fn enumeration_spot_value() -> CheckResult {
    let probs = ClassProbabilities {
        p_r: Some(0.7),
        p_c: 0.2,
        p_l: 0.1,
        p_over: vec![],
        p_under: vec![],
    };
    match exact_pe(&probs, 3, 3, 1, 1) {
        Ok(p) if (p - 0.132).abs() < 1e-12 => CheckResult {
            name: "enumeration-spot-value".into(),
            pass: true,
            detail: format!("exact_pe = {p} (expected 0.132)"),
        },
        Ok(p) => fail("enumeration-spot-value", format!("exact_pe = {p} != 0.132")),
        Err(e) => fail("enumeration-spot-value", e.to_string()),
    }
}

fn fail(name: &str, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        pass: false,
        detail,
    }
}
