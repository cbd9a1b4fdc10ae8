//! Splitting the positive integers into countably many infinite blocks.
//!
//! A scheme is a bijection `n <-> (block, position)`; block `i` enumerates
//! its members `i_1 < i_2 < ...` in increasing order of `position`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `n` seen as the `position`-th element of block `block` (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockIndex {
    pub block: u64,
    pub position: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PartitionScheme {
    /// `n = 2^(i-1) (2j - 1)`: block `i` holds the integers of 2-adic valuation `i-1`.
    #[default]
    Dyadic,
    /// Cantor diagonals: `n = d(d-1)/2 + j` with `d = i + j - 1`.
    Cantor,
}

impl PartitionScheme {
    pub const ALL: [PartitionScheme; 2] = [PartitionScheme::Dyadic, PartitionScheme::Cantor];

    /// The `position`-th element of block `block`.
    pub fn encode(self, block: u64, position: u64) -> Result<u64> {
        if block == 0 {
            return Err(Error::ZeroIndex(block));
        }
        if position == 0 {
            return Err(Error::ZeroIndex(position));
        }
        let overflow = || Error::IndexOverflow { block, position };
        match self {
            PartitionScheme::Dyadic => {
                let odd = (position - 1)
                    .checked_mul(2)
                    .and_then(|v| v.checked_add(1))
                    .ok_or_else(overflow)?;
                let shift = block - 1;
                if shift >= 64 || u64::from(odd.leading_zeros()) < shift {
                    return Err(overflow());
                }
                Ok(odd << shift)
            }
            PartitionScheme::Cantor => {
                let d = block.checked_add(position - 1).ok_or_else(overflow)?;
                let d = u128::from(d);
                let n = d * (d - 1) / 2 + u128::from(position);
                u64::try_from(n).map_err(|_| overflow())
            }
        }
    }

    pub fn decode(self, n: u64) -> Result<BlockIndex> {
        if n == 0 {
            return Err(Error::ZeroIndex(n));
        }
        Ok(match self {
            PartitionScheme::Dyadic => {
                let nu = n.trailing_zeros();
                let odd = n >> nu;
                BlockIndex {
                    block: u64::from(nu) + 1,
                    position: odd / 2 + 1,
                }
            }
            PartitionScheme::Cantor => {
                // Least d with d(d+1)/2 >= n.
                let n128 = u128::from(n);
                let mut d = (((8 * n128 + 1).isqrt() - 1) / 2) as u64;
                while u128::from(d) * u128::from(d + 1) / 2 < n128 {
                    d += 1;
                }
                let before = u128::from(d) * u128::from(d - 1) / 2;
                let position = (n128 - before) as u64;
                BlockIndex {
                    block: d - position + 1,
                    position,
                }
            }
        })
    }

    /// `[encode(block, 1), ..., encode(block, count)]`.
    pub fn block_prefix(self, block: u64, count: u64) -> Result<Vec<u64>> {
        (1..=count).map(|j| self.encode(block, j)).collect()
    }

    /// Members of `block` in increasing order, stopping before `u64` overflow.
    pub fn block_members(self, block: u64) -> impl Iterator<Item = u64> {
        (1u64..).map_while(move |j| self.encode(block, j).ok())
    }
}

impl fmt::Display for PartitionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionScheme::Dyadic => "dyadic",
            PartitionScheme::Cantor => "cantor",
        })
    }
}

impl FromStr for PartitionScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dyadic" => Ok(PartitionScheme::Dyadic),
            "cantor" => Ok(PartitionScheme::Cantor),
            other => Err(format!(
                "unknown partition scheme `{other}` (expected dyadic or cantor)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(block: u64, position: u64) -> BlockIndex {
        BlockIndex { block, position }
    }

    #[test]
    fn dyadic_examples() {
        let s = PartitionScheme::Dyadic;
        assert_eq!(s.encode(1, 1).unwrap(), 1);
        assert_eq!(s.encode(1, 2).unwrap(), 3);
        assert_eq!(s.encode(2, 3).unwrap(), 10);
        assert_eq!(s.decode(10).unwrap(), bi(2, 3));
        assert_eq!(s.decode(12).unwrap(), bi(3, 2));
    }

    #[test]
    fn block_prefixes() {
        let s = PartitionScheme::Dyadic;
        assert_eq!(s.block_prefix(1, 4).unwrap(), vec![1, 3, 5, 7]);
        assert_eq!(s.block_prefix(3, 3).unwrap(), vec![4, 12, 20]);
        for scheme in PartitionScheme::ALL {
            assert!(scheme.block_prefix(5, 0).unwrap().is_empty());
        }
    }

    #[test]
    fn cantor_diagonals() {
        let s = PartitionScheme::Cantor;
        // d=1: 1; d=2: 2,3; d=3: 4,5,6
        assert_eq!(s.encode(1, 1).unwrap(), 1);
        assert_eq!(s.encode(2, 1).unwrap(), 2);
        assert_eq!(s.encode(1, 2).unwrap(), 3);
        assert_eq!(s.encode(3, 1).unwrap(), 4);
        assert_eq!(s.encode(1, 3).unwrap(), 6);
        assert_eq!(s.decode(5).unwrap(), bi(2, 2));
        assert_eq!(s.block_prefix(1, 4).unwrap(), vec![1, 3, 6, 10]);
    }

    #[test]
    fn zero_and_overflow_are_errors() {
        for s in PartitionScheme::ALL {
            assert_eq!(s.decode(0), Err(Error::ZeroIndex(0)));
            assert!(s.encode(0, 1).is_err());
            assert!(s.encode(1, 0).is_err());
        }
        assert!(PartitionScheme::Dyadic.encode(65, 1).is_err());
        assert_eq!(PartitionScheme::Dyadic.encode(64, 1).unwrap(), 1 << 63);
        assert!(PartitionScheme::Dyadic.encode(64, 2).is_err());
        assert!(PartitionScheme::Cantor.encode(1 << 33, 1 << 33).is_err());
    }

    #[test]
    fn extreme_decodes_round_trip() {
        for s in PartitionScheme::ALL {
            for n in [u64::MAX, u64::MAX - 1, 1 << 63, (1 << 53) + 1] {
                let b = s.decode(n).unwrap();
                assert_eq!(s.encode(b.block, b.position).unwrap(), n, "{s} n={n}");
            }
        }
    }

    #[test]
    fn parse_and_display() {
        for s in PartitionScheme::ALL {
            assert_eq!(s.to_string().parse::<PartitionScheme>().unwrap(), s);
        }
        assert!("hilbert".parse::<PartitionScheme>().is_err());
    }
}
