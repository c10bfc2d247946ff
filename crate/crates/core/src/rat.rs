//! Exact rational scalars.
//!
//! Distances are integers and Gromov products are half-integers, so every
//! quantity in the graph-side suites fits in `Ratio<i64>`. Boundary metric
//! values with the dyadic gauge are also exact rationals.

use num_rational::Ratio;

pub type Rat = Ratio<i64>;

/// Builds `n/2` without intermediate reduction surprises.
pub fn half(n: i64) -> Rat {
    Ratio::new(n, 2)
}

pub fn rat(n: i64) -> Rat {
    Ratio::from_integer(n)
}

/// `2^-k` as an exact rational, `k >= 0`.
pub fn dyadic(k: u32) -> Rat {
    Ratio::new(1, 1i64 << k)
}

/// Clamp at zero, used for defect measurements.
pub fn clamp0(x: Rat) -> Rat {
    if x < Rat::from_integer(0) {
        Rat::from_integer(0)
    } else {
        x
    }
}

/// Canonical textual form used in reports: `p` or `p/q`.
pub fn fmt_rat(x: Rat) -> String {
    if x.is_integer() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
