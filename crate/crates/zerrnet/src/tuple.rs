//! Mixed-radix tuple indexing.
//!
//! Function tables and failure tables are flat arrays over a product space
//! `[m_0] x [m_1] x ... x [m_{d-1}]`, laid out row-major: the LAST coordinate
//! varies fastest.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSpace {
    dims: Vec<u64>,
    strides: Vec<u64>,
    total: u64,
}

impl TupleSpace {
    pub fn new(dims: &[u64]) -> Result<Self> {
        let mut total: u64 = 1;
        for &d in dims {
            if d == 0 {
                return Err(Error::Parameter("tuple space with a zero dimension".into()));
            }
            total = total
                .checked_mul(d)
                .ok_or_else(|| Error::Parameter("tuple space overflows u64".into()))?;
        }
        let mut strides = vec![1u64; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(TupleSpace {
            dims: dims.to_vec(),
            strides,
            total,
        })
    }

    /// Product space of `count` coordinates each of size `2^bits`.
    pub fn uniform_pow2(count: usize, bits: u32) -> Result<Self> {
        if bits > 32 {
            return Err(Error::Parameter(format!(
                "symbol width {bits} bits exceeds the 32-bit limit"
            )));
        }
        TupleSpace::new(&vec![1u64 << bits; count])
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn index_of(&self, tuple: &[u64]) -> u64 {
        debug_assert_eq!(tuple.len(), self.dims.len());
        let mut idx = 0;
        for (i, &v) in tuple.iter().enumerate() {
            debug_assert!(v < self.dims[i]);
            idx += v * self.strides[i];
        }
        idx
    }

    pub fn tuple_of(&self, mut index: u64) -> Vec<u64> {
        debug_assert!(index < self.total);
        let mut out = vec![0u64; self.dims.len()];
        for (slot, &stride) in out.iter_mut().zip(self.strides.iter()) {
            *slot = index / stride;
            index %= stride;
        }
        out
    }

    /// Advance `tuple` to its row-major successor. Returns false after the
    /// last tuple wraps back to all zeros.
    pub fn advance(&self, tuple: &mut [u64]) -> bool {
        for i in (0..self.dims.len()).rev() {
            tuple[i] += 1;
            if tuple[i] < self.dims[i] {
                return true;
            }
            tuple[i] = 0;
        }
        false
    }

    /// Visit every tuple in row-major order, reusing one buffer.
    pub fn for_each(&self, mut f: impl FnMut(&[u64])) {
        let mut tuple = vec![0u64; self.dims.len()];
        loop {
            f(&tuple);
            if !self.advance(&mut tuple) {
                break;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.total).map(move |i| self.tuple_of(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let space = TupleSpace::new(&[2, 3, 4]).unwrap();
        assert_eq!(space.total(), 24);
        for i in 0..24 {
            assert_eq!(space.index_of(&space.tuple_of(i)), i);
        }
        // row-major: last coordinate fastest
        assert_eq!(space.tuple_of(0), vec![0, 0, 0]);
        assert_eq!(space.tuple_of(1), vec![0, 0, 1]);
        assert_eq!(space.tuple_of(4), vec![0, 1, 0]);
        assert_eq!(space.tuple_of(12), vec![1, 0, 0]);
    }

    #[test]
    fn for_each_matches_iter() {
        let space = TupleSpace::new(&[3, 2]).unwrap();
        let mut seen = Vec::new();
        space.for_each(|t| seen.push(t.to_vec()));
        let expect: Vec<Vec<u64>> = space.iter().collect();
        assert_eq!(seen, expect);
    }

    #[test]
    fn empty_arity_has_one_tuple() {
        let space = TupleSpace::new(&[]).unwrap();
        assert_eq!(space.total(), 1);
        let mut count = 0;
        space.for_each(|t| {
            assert!(t.is_empty());
            count += 1;
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn rejects_zero_dimension_and_overflow() {
        assert!(TupleSpace::new(&[2, 0]).is_err());
        assert!(TupleSpace::new(&[u64::MAX, 3]).is_err());
    }
}
