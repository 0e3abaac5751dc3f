//! GF(2^m) arithmetic with per-field log/antilog tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lexicographically smallest primitive polynomial per extension degree,
/// as a bitmask including the x^m term. Index 0 holds degree 1.
pub const DEFAULT_PRIMITIVE_POLYS: [u32; 16] = [
    0x3,     // x + 1
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x83,    // x^7 + x + 1
    0x11D,   // x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // x^9 + x^4 + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1053,  // x^12 + x^6 + x^4 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x402B,  // x^14 + x^5 + x^3 + x + 1
    0x8003,  // x^15 + x + 1
    0x1002D, // x^16 + x^5 + x^3 + x^2 + 1
];

/// Element of GF(2^m) in polynomial-basis representation; the value is the
/// coefficient bitmask and must stay below 2^m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A concrete GF(2^m) with its multiplication tables.
///
/// Immutable after construction; all element operations borrow it.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    m: u32,
    primitive_poly: u32,
    /// exp[i] = alpha^i for i in 0..q-1 (alpha = the class of x).
    exp: Vec<u16>,
    /// log[v] = i with alpha^i = v, defined for v in 1..q.
    log: Vec<u32>,
}

impl FieldSpec {
    /// Field with the default primitive polynomial for degree `m` (1..=16).
    pub fn new(m: u32) -> Result<Self> {
        if !(1..=16).contains(&m) {
            return Err(Error::Domain(format!(
                "extension degree m = {m} outside supported range 1..=16"
            )));
        }
        Self::with_polynomial(m, DEFAULT_PRIMITIVE_POLYS[(m - 1) as usize])
    }

    /// Field with an explicit degree-m primitive polynomial.
    pub fn with_polynomial(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(1..=16).contains(&m) {
            return Err(Error::Domain(format!(
                "extension degree m = {m} outside supported range 1..=16"
            )));
        }
        if primitive_poly >> m != 1 {
            return Err(Error::Domain(format!(
                "polynomial {primitive_poly:#x} does not have degree exactly {m}"
            )));
        }
        let q = 1usize << m;
        let mut exp = vec![0u16; q - 1];
        let mut log = vec![u32::MAX; q];
        let mut v: u32 = 1;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = v as u16;
            if log[v as usize] != u32::MAX {
                return Err(Error::Domain(format!(
                    "polynomial {primitive_poly:#x} is not primitive for degree {m}"
                )));
            }
            log[v as usize] = i as u32;
            v <<= 1;
            if v >> m != 0 {
                v ^= primitive_poly;
            }
        }
        if v != 1 {
            return Err(Error::Domain(format!(
                "polynomial {primitive_poly:#x} is not primitive for degree {m}"
            )));
        }
        Ok(FieldSpec {
            m,
            primitive_poly,
            exp,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Field order 2^m.
    pub fn order(&self) -> usize {
        1 << self.m
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        (a.0 as usize) < self.order()
    }

    /// alpha^i, exponent taken modulo 2^m - 1.
    pub fn alpha_pow(&self, i: u64) -> FieldElement {
        let q1 = (self.order() - 1) as u64;
        FieldElement(self.exp[(i % q1) as usize])
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, a: FieldElement) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::Domain("log of zero".into()));
        }
        Ok(self.log[a.0 as usize])
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let q1 = (self.order() - 1) as u32;
        let i = (self.log[a.0 as usize] + self.log[b.0 as usize]) % q1;
        FieldElement(self.exp[i as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::Domain("zero has no multiplicative inverse".into()));
        }
        let q1 = (self.order() - 1) as u32;
        let i = (q1 - self.log[a.0 as usize]) % q1;
        Ok(FieldElement(self.exp[i as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Evaluate a polynomial (coefficients low-to-high) at `x` by Horner.
    pub fn poly_eval(&self, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn addition_examples() {
        let f = FieldSpec::new(4).unwrap();
        assert_eq!(f.add(FieldElement(0x5), FieldElement(0x5)), FieldElement(0));
        assert_eq!(f.add(FieldElement(0x0), FieldElement(0x9)), FieldElement(0x9));
        assert_eq!(f.add(FieldElement(0x3), FieldElement(0x5)), FieldElement(0x6));
    }

    #[test]
    fn gf16_alpha_times_alpha_cubed() {
        // GF(16), x^4 + x + 1: alpha * alpha^3 = alpha^4 = x + 1 = 0x3.
        let f = FieldSpec::new(4).unwrap();
        assert_eq!(f.mul(FieldElement(0x2), FieldElement(0x8)), FieldElement(0x3));
    }

    #[test]
    fn mul_identity_and_zero() {
        let f = FieldSpec::new(4).unwrap();
        for v in 0..16u16 {
            let a = FieldElement(v);
            assert_eq!(f.mul(a, FieldElement::ONE), a);
            assert_eq!(f.mul(a, FieldElement::ZERO), FieldElement::ZERO);
        }
    }

    #[test]
    fn inverse_examples() {
        let f = FieldSpec::new(4).unwrap();
        assert_eq!(f.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
        // exhaustive-search oracle for alpha^-1 in GF(16)
        let alpha = FieldElement(0x2);
        let mut expect = None;
        for v in 1..16u16 {
            if f.mul(alpha, FieldElement(v)) == FieldElement::ONE {
                expect = Some(FieldElement(v));
            }
        }
        assert_eq!(expect, Some(FieldElement(0x9)));
        assert_eq!(f.inv(alpha).unwrap(), FieldElement(0x9));
        assert!(f.inv(FieldElement::ZERO).is_err());
    }

    #[test]
    fn every_nonzero_element_has_inverse_up_to_m8() {
        for m in 1..=8 {
            let f = FieldSpec::new(m).unwrap();
            for v in 1..f.order() as u16 {
                let a = FieldElement(v);
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn primitive_element_enumerates_field_up_to_m8() {
        for m in 1..=8 {
            let f = FieldSpec::new(m).unwrap();
            let mut seen = vec![false; f.order()];
            for i in 0..(f.order() - 1) as u64 {
                let v = f.alpha_pow(i);
                assert!(!seen[v.0 as usize], "repeat at alpha^{i} in GF(2^{m})");
                seen[v.0 as usize] = true;
            }
            assert!(seen[1..].iter().all(|&s| s));
        }
    }

    #[test]
    fn default_polynomials_are_smallest_primitive_up_to_m10() {
        // Re-derive the table head by scanning: a degree-m polynomial is
        // primitive iff x generates all 2^m - 1 nonzero elements, which is
        // exactly what FieldSpec::with_polynomial verifies.
        for m in 1..=10u32 {
            let expect = DEFAULT_PRIMITIVE_POLYS[(m - 1) as usize];
            let mut found = None;
            for cand in ((1u32 << m) + 1..(1 << (m + 1))).step_by(2) {
                if FieldSpec::with_polynomial(m, cand).is_ok() {
                    found = Some(cand);
                    break;
                }
            }
            assert_eq!(found, Some(expect), "degree {m}");
        }
    }

    #[test]
    fn non_primitive_polynomial_rejected() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible but has order 5, not 15.
        assert!(FieldSpec::with_polynomial(4, 0x1F).is_err());
        // x^4 + 1 = (x+1)^4 is reducible.
        assert!(FieldSpec::with_polynomial(4, 0x11).is_err());
    }

    proptest! {
        #[test]
        fn field_axioms(m in 1u32..=8, a in 0u16..256, b in 0u16..256, c in 0u16..256) {
            let f = FieldSpec::new(m).unwrap();
            let mask = (f.order() - 1) as u16;
            let (a, b, c) = (FieldElement(a & mask), FieldElement(b & mask), FieldElement(c & mask));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        }
    }
}
