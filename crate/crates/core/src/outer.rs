//! Outer Reed–Solomon code: systematic encoding, a real error/erasure
//! bounded-minimum-distance decoder (Berlekamp–Massey with erasure
//! initialization plus Forney evaluation), and the radius-model decoder for
//! the extended bounded-distance guarantee
//! (l+1)/l * errors + erasures <= d - 1.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// MDS Reed–Solomon code over GF(2^m): length n <= 2^m - 1, distance
/// d = n - k + 1, generator polynomial with roots alpha^1 .. alpha^(d-1).
#[derive(Debug, Clone)]
pub struct OuterCode {
    field: FieldSpec,
    n: usize,
    k: usize,
    /// generator polynomial coefficients, low-to-high, monic of degree d-1
    generator: Vec<FieldElement>,
}

/// Received outer word with erasures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureWord {
    pub symbols: Vec<Option<FieldElement>>,
}

impl ErasureWord {
    pub fn from_symbols(symbols: Vec<Option<FieldElement>>) -> Self {
        ErasureWord { symbols }
    }

    pub fn erasure_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_none()).count()
    }
}

/// Outcome of one outer decoding trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Codeword(Vec<FieldElement>),
    Failure,
}

impl DecodeOutcome {
    pub fn is_codeword(&self, c: &[FieldElement]) -> bool {
        matches!(self, DecodeOutcome::Codeword(w) if w == c)
    }
}

impl OuterCode {
    pub fn new(field: FieldSpec, n: usize, k: usize) -> Result<Self> {
        let q = field.order();
        if !(1 <= k && k < n && n <= q - 1) {
            return Err(Error::InvalidCode(format!(
                "need 1 <= k < n <= 2^m - 1, got (n, k) = ({n}, {k}) over GF({q})"
            )));
        }
        let d = n - k + 1;
        // g(x) = prod_{i=1}^{d-1} (x - alpha^i); subtraction is addition here
        let mut g = vec![FieldElement::ONE];
        for i in 1..=(d - 1) as u64 {
            let root = field.alpha_pow(i);
            let mut next = vec![FieldElement::ZERO; g.len() + 1];
            for (j, &c) in g.iter().enumerate() {
                next[j + 1] = field.add(next[j + 1], c);
                next[j] = field.add(next[j], field.mul(c, root));
            }
            g = next;
        }
        Ok(OuterCode {
            field,
            n,
            k,
            generator: g,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Minimum distance n - k + 1.
    pub fn d(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn generator_poly(&self) -> &[FieldElement] {
        &self.generator
    }

    /// Systematic encoding: information symbols occupy the high positions
    /// n-k..n-1, parity the low positions.
    pub fn encode(&self, info: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if info.len() != self.k {
            return Err(Error::Dimension(format!(
                "information length {} != k = {}",
                info.len(),
                self.k
            )));
        }
        if let Some(sym) = info.iter().find(|s| !self.field.contains(**s)) {
            return Err(Error::Domain(format!(
                "symbol {} outside GF({})",
                sym.0,
                self.field.order()
            )));
        }
        let parity_len = self.n - self.k;
        // remainder of info(x) * x^(n-k) modulo g(x)
        let mut rem = vec![FieldElement::ZERO; parity_len];
        for &sym in info.iter().rev() {
            let feedback = self.field.add(sym, *rem.last().expect("parity_len >= 1"));
            for j in (1..parity_len).rev() {
                rem[j] = self
                    .field
                    .add(rem[j - 1], self.field.mul(feedback, self.generator[j]));
            }
            rem[0] = self.field.mul(feedback, self.generator[0]);
        }
        let mut cw = rem;
        cw.extend_from_slice(info);
        Ok(cw)
    }

    pub fn is_codeword(&self, word: &[FieldElement]) -> bool {
        word.len() == self.n && self.syndromes_of(word).iter().all(|s| s.is_zero())
    }

    fn syndromes_of(&self, word: &[FieldElement]) -> Vec<FieldElement> {
        (1..=(self.d() - 1) as u64)
            .map(|i| {
                let x = self.field.alpha_pow(i);
                self.field.poly_eval(word, x)
            })
            .collect()
    }

    /// Real bounded-minimum-distance error/erasure decoding.
    ///
    /// Returns the unique codeword c with 2*errors + erasures <= d - 1 when
    /// it exists. Outside that radius the decoder either reports `Failure`
    /// or, like any bounded-distance decoder, may land on a different
    /// codeword; callers decide what a miscorrection means.
    pub fn bmd_decode_errors_erasures(&self, received: &ErasureWord) -> Result<DecodeOutcome> {
        if received.symbols.len() != self.n {
            return Err(Error::Dimension(format!(
                "received length {} != n = {}",
                received.symbols.len(),
                self.n
            )));
        }
        for sym in received.symbols.iter().flatten() {
            if !self.field.contains(*sym) {
                return Err(Error::Domain(format!(
                    "symbol {} outside GF({})",
                    sym.0,
                    self.field.order()
                )));
            }
        }
        let d = self.d();
        let erasures: Vec<usize> = received
            .symbols
            .iter()
            .enumerate()
            .filter_map(|(j, s)| s.is_none().then_some(j))
            .collect();
        let tau = erasures.len();
        if tau >= d {
            return Ok(DecodeOutcome::Failure);
        }

        let f = &self.field;
        let filled: Vec<FieldElement> = received
            .symbols
            .iter()
            .map(|s| s.unwrap_or(FieldElement::ZERO))
            .collect();
        let syndromes = self.syndromes_of(&filled);
        if syndromes.iter().all(|s| s.is_zero()) {
            // the zero-fill already is a codeword
            return Ok(DecodeOutcome::Codeword(filled));
        }

        // erasure locator Gamma(x) = prod (1 - alpha^j x)
        let mut locator = vec![FieldElement::ONE];
        for &j in &erasures {
            let x_j = f.alpha_pow(j as u64);
            let mut next = vec![FieldElement::ZERO; locator.len() + 1];
            for (i, &c) in locator.iter().enumerate() {
                next[i] = f.add(next[i], c);
                next[i + 1] = f.add(next[i + 1], f.mul(c, x_j));
            }
            locator = next;
        }

        // Berlekamp–Massey initialized with the erasure locator; syndrome
        // S_r is syndromes[r - 1].
        let mut lambda = locator.clone();
        let mut b = locator;
        let mut l = tau;
        for r in (tau + 1)..=(d - 1) {
            let mut delta = FieldElement::ZERO;
            for (j, &c) in lambda.iter().enumerate() {
                if j < r {
                    delta = f.add(delta, f.mul(c, syndromes[r - 1 - j]));
                }
            }
            if delta.is_zero() {
                b = shift_up(&b);
            } else if 2 * l <= r + tau - 1 {
                let scaled = scale(f, &shift_up(&b), delta);
                let new_b = scale(f, &lambda, f.inv(delta)?);
                lambda = poly_sub(f, &lambda, &scaled);
                b = new_b;
                l = r + tau - l;
            } else {
                let scaled = scale(f, &shift_up(&b), delta);
                lambda = poly_sub(f, &lambda, &scaled);
                b = shift_up(&b);
            }
        }
        trim(&mut lambda);
        let deg_lambda = lambda.len() - 1;
        let errors = deg_lambda.saturating_sub(tau);
        if deg_lambda != l || 2 * errors + tau > d - 1 {
            return Ok(DecodeOutcome::Failure);
        }

        // Chien search over the code positions
        let mut roots = Vec::with_capacity(deg_lambda);
        for j in 0..self.n {
            let x_inv = f.inv(f.alpha_pow(j as u64))?;
            if f.poly_eval(&lambda, x_inv).is_zero() {
                roots.push(j);
            }
        }
        if roots.len() != deg_lambda {
            return Ok(DecodeOutcome::Failure);
        }

        // Omega(x) = Lambda(x) S(x) mod x^(d-1), then Forney:
        // e_j = Omega(X_j^-1) / Lambda'(X_j^-1)
        let mut omega = vec![FieldElement::ZERO; d - 1];
        for (i, &li) in lambda.iter().enumerate() {
            for (j, &sj) in syndromes.iter().enumerate() {
                if i + j < d - 1 {
                    omega[i + j] = f.add(omega[i + j], f.mul(li, sj));
                }
            }
        }
        let mut deriv = vec![FieldElement::ZERO; lambda.len().saturating_sub(1)];
        for (i, &c) in lambda.iter().enumerate().skip(1) {
            if i % 2 == 1 {
                deriv[i - 1] = c;
            }
        }
        let mut corrected = filled;
        for &j in &roots {
            let x_inv = f.inv(f.alpha_pow(j as u64))?;
            let num = f.poly_eval(&omega, x_inv);
            let den = f.poly_eval(&deriv, x_inv);
            if den.is_zero() {
                return Ok(DecodeOutcome::Failure);
            }
            let magnitude = f.div(num, den)?;
            corrected[j] = f.add(corrected[j], magnitude);
        }
        if self.is_codeword(&corrected) {
            Ok(DecodeOutcome::Codeword(corrected))
        } else {
            Ok(DecodeOutcome::Failure)
        }
    }

    /// Radius-model decoder for the (l+1)/l-extended bounded-distance
    /// guarantee, keyed on the transmitted codeword: succeeds exactly when
    /// (l+1)/l * errors + erasures <= d - 1, evaluated in exact integer
    /// arithmetic, and never miscorrects.
    pub fn model_lbd_decode(
        &self,
        received: &ErasureWord,
        transmitted: &[FieldElement],
        l: u32,
    ) -> Result<DecodeOutcome> {
        if received.symbols.len() != self.n || transmitted.len() != self.n {
            return Err(Error::Dimension("length mismatch".into()));
        }
        if l == 0 {
            return Err(Error::Domain("l must be >= 1".into()));
        }
        let mut errors = 0u64;
        let mut erasures = 0u64;
        for (r, &t) in received.symbols.iter().zip(transmitted) {
            match r {
                None => erasures += 1,
                Some(sym) if *sym != t => errors += 1,
                _ => {}
            }
        }
        let l = l as u64;
        // (l+1)/l * errors + erasures <= d-1, cleared of denominators
        if (l + 1) * errors + l * erasures <= l * (self.d() as u64 - 1) {
            Ok(DecodeOutcome::Codeword(transmitted.to_vec()))
        } else {
            Ok(DecodeOutcome::Failure)
        }
    }
}

fn shift_up(p: &[FieldElement]) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(FieldElement::ZERO);
    out.extend_from_slice(p);
    out
}

fn scale(f: &FieldSpec, p: &[FieldElement], c: FieldElement) -> Vec<FieldElement> {
    p.iter().map(|&x| f.mul(x, c)).collect()
}

fn poly_sub(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(FieldElement::ZERO);
            let y = b.get(i).copied().unwrap_or(FieldElement::ZERO);
            f.add(x, y)
        })
        .collect()
}

fn trim(p: &mut Vec<FieldElement>) {
    while p.len() > 1 && p.last() == Some(&FieldElement::ZERO) {
        p.pop();
    }
}
