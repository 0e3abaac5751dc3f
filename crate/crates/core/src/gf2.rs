//! Dense GF(2) matrices and vectors, packed one row per `u64`.

use crate::error::{Error, Result};

/// Binary matrix with up to 64 columns; row `i` is the bitmask `rows[i]`,
/// bit `j` holding entry (i, j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: Vec<u64>,
    ncols: usize,
}

impl Gf2Matrix {
    pub fn new(rows: Vec<u64>, ncols: usize) -> Result<Self> {
        if ncols == 0 || ncols > 64 {
            return Err(Error::Dimension(format!(
                "column count {ncols} outside 1..=64"
            )));
        }
        let mask = mask(ncols);
        if rows.iter().any(|&r| r & !mask != 0) {
            return Err(Error::Dimension(
                "row has bits beyond the declared column count".into(),
            ));
        }
        Ok(Gf2Matrix { rows, ncols })
    }

    pub fn identity(n: usize) -> Self {
        Gf2Matrix {
            rows: (0..n).map(|i| 1u64 << i).collect(),
            ncols: n,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn bit(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    /// Matrix-vector product over GF(2): result bit i = <row i, v>.
    pub fn mul_vec(&self, v: u64) -> Result<u64> {
        if v & !mask(self.ncols) != 0 {
            return Err(Error::Dimension(format!(
                "vector has bits beyond length {}",
                self.ncols
            )));
        }
        let mut out = 0u64;
        for (i, &row) in self.rows.iter().enumerate() {
            out |= ((row & v).count_ones() as u64 & 1) << i;
        }
        Ok(out)
    }

    /// Row-vector times matrix (v of length nrows): XOR of the selected rows.
    /// This is the encoding map info -> info * G.
    pub fn vec_mul(&self, v: u64) -> Result<u64> {
        if self.nrows() < 64 && v >> self.nrows() != 0 {
            return Err(Error::Dimension(format!(
                "vector has bits beyond length {}",
                self.nrows()
            )));
        }
        let mut out = 0u64;
        for (i, &row) in self.rows.iter().enumerate() {
            if v >> i & 1 == 1 {
                out ^= row;
            }
        }
        Ok(out)
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.ncols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && *row >> col & 1 == 1 {
                    *row ^= pivot_row;
                }
            }
            rank += 1;
        }
        rank
    }
}

pub fn mask(nbits: usize) -> u64 {
    if nbits >= 64 {
        u64::MAX
    } else {
        (1u64 << nbits) - 1
    }
}

/// Parse a 0/1 string into a packed vector, bit i = character i.
pub fn parse_bits(s: &str) -> Result<(u64, usize)> {
    let s = s.trim();
    if s.is_empty() || s.len() > 64 {
        return Err(Error::Parse(format!(
            "bit string length {} outside 1..=64",
            s.len()
        )));
    }
    let mut v = 0u64;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '1' => v |= 1 << i,
            '0' => {}
            other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
        }
    }
    Ok((v, s.len()))
}
