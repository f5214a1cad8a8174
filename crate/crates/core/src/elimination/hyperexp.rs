//! Iterated exponentials `2_y^x` (`2_0^x = x`, `2_{y+1}^x = 2^(2_y^x)`),
//! exact up to a size ceiling and symbolic beyond it.

use std::fmt;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

/// Default ceiling: values with more than this many bits stay symbolic.
pub const DEFAULT_MAX_BITS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HyperExp {
    Exact(BigUint),
    /// `2_height^top` with `height ≥ 1`, too large to expand.
    Tower { height: u64, top: BigUint },
}

pub fn hyperexp(y: u64, x: u64) -> HyperExp {
    hyperexp_with(y, BigUint::from(x), DEFAULT_MAX_BITS)
}

/// `2_y^x`, expanded while the result stays within `max_bits` bits.
pub fn hyperexp_with(y: u64, x: BigUint, max_bits: u64) -> HyperExp {
    let mut v = x;
    for i in 0..y {
        // 2^v has v+1 bits
        match u64::try_from(&v) {
            Ok(e) if e < max_bits => v = BigUint::from(1u8) << e,
            _ => {
                return HyperExp::Tower {
                    height: y - i,
                    top: v,
                }
            }
        }
    }
    HyperExp::Exact(v)
}

impl HyperExp {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            HyperExp::Exact(v) => Some(v),
            HyperExp::Tower { .. } => None,
        }
    }

    /// True iff the value is `≥ n`.
    pub fn at_least(&self, n: &BigUint) -> bool {
        match self {
            HyperExp::Exact(v) => v >= n,
            // the value is at least 2^top, which exceeds n once top ≥ bits(n)
            HyperExp::Tower { top, .. } => *top >= BigUint::from(n.bits()),
        }
    }
}

impl fmt::Display for HyperExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperExp::Exact(v) => f.write_str(&show(v)),
            HyperExp::Tower { height, top } if top.bits() > 64 => {
                write!(f, "2_{height}^({})", show(top))
            }
            HyperExp::Tower { height, top } => write!(f, "2_{height}^{top}"),
        }
    }
}

/// Decimal, or `2^k` for large powers of two.
fn show(v: &BigUint) -> String {
    if v.bits() > 64 && v.count_ones() == 1 {
        format!("2^{}", v.bits() - 1)
    } else {
        v.to_string()
    }
}

impl Serialize for HyperExp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
