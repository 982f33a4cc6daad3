//! Rational Betti numbers of the S¹-quotient of the free loop space of Sⁿ
//! relative to the constant loops.
//!
//! Two independent routes are provided: the closed-form case split
//! ([`betti`]) and the coefficients of the Poincaré series expanded by exact
//! power-series division ([`poincare_series_coeffs`]). For even `n` only the
//! simplified series
//! `t^(2k-1) (1/(1-t²) + t^(4k-2)/(1-t^(4k-2)))` is implemented; the
//! general-parameter form it specialises is not.

use num_rational::BigRational;
use serde::Serialize;

use crate::interval::rat;

/// `b_q` for the sphere of dimension `n >= 2`.
pub fn betti(n: u32, q: i64) -> u8 {
    assert!(n >= 2, "sphere dimension must be at least 2");
    let k = (n / 2) as i64;
    if n % 2 == 1 {
        // n = 2k + 1
        if q == 2 * k {
            return 1;
        }
        if q >= 4 * k && (q - 4 * k) % 2 == 0 && ((q - 4 * k) / 2) % k == 0 {
            return 2;
        }
        if q > 2 * k && (q - 2 * k) % 2 == 0 && ((q - 2 * k) / 2) % k != 0 {
            return 1;
        }
        0
    } else {
        // n = 2k
        let period = 2 * k - 1;
        if q == 2 * k - 1 {
            return 1;
        }
        if q >= 6 * k - 3 && (q - (6 * k - 3)) % 2 == 0 && ((q - (6 * k - 3)) / 2) % period == 0 {
            return 2;
        }
        if q > 2 * k - 1 && (q - (2 * k - 1)) % 2 == 0 && ((q - (2 * k - 1)) / 2) % period != 0 {
            return 1;
        }
        0
    }
}

/// The ladder `b_0 .. b_{q_max}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiLadder {
    pub n: u32,
    pub q_max: u32,
    pub values: Vec<u8>,
}

impl BettiLadder {
    pub fn closed_form(n: u32, q_max: u32) -> Self {
        BettiLadder {
            n,
            q_max,
            values: (0..=q_max as i64).map(|q| betti(n, q)).collect(),
        }
    }

    pub fn get(&self, q: i64) -> u8 {
        if q < 0 {
            return 0;
        }
        self.values.get(q as usize).copied().unwrap_or(0)
    }
}

/// Truncated power series with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Series(Vec<i64>);

impl Series {
    fn from_terms(len: usize, terms: &[(usize, i64)]) -> Self {
        let mut c = vec![0; len];
        for &(deg, coeff) in terms {
            if deg < len {
                c[deg] += coeff;
            }
        }
        Series(c)
    }

    fn mul(&self, other: &Series) -> Series {
        let len = self.0.len();
        let mut out = vec![0; len];
        for (i, a) in self.0.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, b) in other.0.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        Series(out)
    }

    /// Long division by a series with constant term 1.
    fn div(&self, divisor: &Series) -> Series {
        assert_eq!(divisor.0[0], 1, "divisor must have unit constant term");
        let len = self.0.len();
        let mut rem = self.0.clone();
        let mut out = vec![0; len];
        for i in 0..len {
            let c = rem[i];
            out[i] = c;
            if c != 0 {
                for (j, d) in divisor.0.iter().enumerate().take(len - i) {
                    rem[i + j] -= c * d;
                }
            }
        }
        Series(out)
    }

    fn add(&self, other: &Series) -> Series {
        Series(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Expands `t^a (1/(1-t²) + t^b/(1-t^b))` to degree `q_max`.
fn expand(a: usize, b: usize, q_max: u32) -> Vec<i64> {
    let len = q_max as usize + 1;
    let one = Series::from_terms(len, &[(0, 1)]);
    let first = one.div(&Series::from_terms(len, &[(0, 1), (2, -1)]));
    let second = Series::from_terms(len, &[(b, 1)]).div(&Series::from_terms(len, &[(0, 1), (b, -1)]));
    Series::from_terms(len, &[(a, 1)]).mul(&first.add(&second)).0
}

/// Betti ladder read off the Poincaré series.
pub fn poincare_series_coeffs(n: u32, q_max: u32) -> BettiLadder {
    assert!(n >= 2, "sphere dimension must be at least 2");
    let k = (n / 2) as usize;
    let coeffs = if n % 2 == 1 {
        expand(2 * k, 2 * k, q_max)
    } else {
        expand(2 * k - 1, 4 * k - 2, q_max)
    };
    BettiLadder {
        n,
        q_max,
        values: coeffs
            .into_iter()
            .map(|c| u8::try_from(c).expect("Betti numbers are small and non-negative"))
            .collect(),
    }
}

/// `B(n, 1)`: `(n+1)/(2(n-1))` for odd `n`, `-n/(2(n-1))` for even `n`.
#[allow(non_snake_case)]
pub fn B_constant(n: u32) -> BigRational {
    assert!(n >= 2, "sphere dimension must be at least 2");
    let n = n as i64;
    if n % 2 == 1 {
        rat(n + 1, 2 * (n - 1))
    } else {
        rat(-n, 2 * (n - 1))
    }
}

/// `Σ_{q=0}^{q_max} (-1)^q b_q`.
pub fn alternating_betti_sum(n: u32, q_max: i64) -> i64 {
    (0..=q_max)
        .map(|q| {
            let b = betti(n, q) as i64;
            if q % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .sum()
}

/// Modulus the jump level `N` must be a multiple of: `2k` for `n = 2k+1`,
/// `2k-1` for `n = 2k`.
pub fn jump_modulus(n: u32) -> i64 {
    let k = (n / 2) as i64;
    if n % 2 == 1 {
        2 * k
    } else {
        2 * k - 1
    }
}

/// Closed form of the alternating Betti sum up to `2N + n - 2` when
/// `N = s · jump_modulus(n)`: `2s(k+1) - 1` for odd `n`, `-2sk + 1` for
/// even `n`.
pub fn alternating_window_closed_form(n: u32, s: i64) -> i64 {
    let k = (n / 2) as i64;
    if n % 2 == 1 {
        2 * s * (k + 1) - 1
    } else {
        -2 * s * k + 1
    }
}
