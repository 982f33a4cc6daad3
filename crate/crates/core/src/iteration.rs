//! Index and nullity of iterated closed geodesics from normal-form data.
//!
//! For a record with initial index `i` and descriptor blocks as in
//! [`NormalFormDescriptor`], the `m`-th iterate has
//!
//! ```text
//! i(c^m) = m(i + p- + p0 - r) + 2 Σ E(m θj/2π) - r - p- - p0
//!          - (1 + (-1)^m)/2 · (q0 + q+) + 2 (Σ φ(m αj/2π) - r*)
//! ν(c^m) = ν(c) + (1 + (-1)^m)/2 · (q- + 2q0 + q+) + 2(r + r* + r0)
//!          - 2 (Σ φ(m θj/2π) + Σ φ(m αj/2π) + Σ φ(m βj/2π))
//! î(c)   = i + p- + p0 - r + Σ θj/π
//! ```
//!
//! where `E` is the ceiling and `φ(a) = E(a) - [a]`. Every `m θ/2π` is the
//! integer `m` times a stored turn fraction, so exact inputs stay exact.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{to_i64, Interval};
use crate::symplectic::NormalFormDescriptor;

/// `[a]`
pub fn floor_int(a: &Interval) -> Result<BigInt> {
    a.floor_int()
}

/// `E(a)`
pub fn ceil_int(a: &Interval) -> Result<BigInt> {
    a.ceil_int()
}

/// `φ(a)`: 0 if `a` is an integer, 1 otherwise.
pub fn phi(a: &Interval) -> Result<u8> {
    a.phi()
}

/// `{a} = a - [a]`
pub fn frac(a: &Interval) -> Result<Interval> {
    a.frac()
}

/// A prime closed geodesic described by its initial index and the normal
/// form of its linearized Poincaré map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicRecord {
    pub label: String,
    pub initial_index: i64,
    pub initial_nullity: u32,
    pub descriptor: NormalFormDescriptor,
}

impl GeodesicRecord {
    /// Builds a record whose nullity is the eigenvalue-1 kernel dimension of
    /// the descriptor, and validates it.
    pub fn new(
        label: impl Into<String>,
        initial_index: i64,
        descriptor: NormalFormDescriptor,
    ) -> Result<Self> {
        let record = GeodesicRecord {
            label: label.into(),
            initial_index,
            initial_nullity: descriptor.eigenvalue_one_nullity(),
            descriptor,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.descriptor;
        d.validate()?;
        if self.initial_index < 0 {
            return Err(Error::Validation(format!(
                "geodesic {}: initial index must be non-negative, got {}",
                self.label, self.initial_index
            )));
        }
        if self.initial_nullity != d.eigenvalue_one_nullity() {
            return Err(Error::Validation(format!(
                "geodesic {}: initial nullity {} differs from p- + 2p0 + p+ = {}",
                self.label,
                self.initial_nullity,
                d.eigenvalue_one_nullity()
            )));
        }
        if d.hyperbolic_dim == 0 {
            let parity = d.odd_block_count() as i64 % 2;
            if self.initial_index.rem_euclid(2) != parity {
                return Err(Error::Validation(format!(
                    "geodesic {}: initial index {} has the wrong parity; without a hyperbolic \
                     part it must be congruent mod 2 to the number of odd-index blocks \
                     (N1(1,1), I2, N1(-1,±1), -I2, R(θ)), which is {}",
                    self.label,
                    self.initial_index,
                    d.odd_block_count()
                )));
            }
        }
        Ok(())
    }

    /// No eigenvalue `±1` blocks, so no iterate has eigenvalue 1 from a
    /// real block. Rational rotation numbers are still admitted.
    pub fn is_structurally_bumpy(&self) -> bool {
        self.descriptor.is_free_of_real_unit_blocks()
    }

    /// Structurally bumpy with every rotation number irrational: no iterate
    /// is ever degenerate.
    pub fn is_strictly_bumpy(&self) -> bool {
        self.is_structurally_bumpy()
            && self.descriptor.all_rotation_numbers().all(|r| r.is_irrational())
    }

    pub fn elliptic_height(&self) -> u32 {
        self.descriptor.elliptic_height()
    }
}

fn even_indicator(m: i64) -> i64 {
    if m % 2 == 0 {
        1
    } else {
        0
    }
}

/// `i(c^m)`.
pub fn index_at(g: &GeodesicRecord, m: i64) -> Result<i64> {
    if m < 1 {
        return Err(Error::Precondition(format!("iterate must be positive, got {m}")));
    }
    let d = &g.descriptor;
    let (pm, p0, r, rs) = (
        d.p_minus as i64,
        d.p_zero as i64,
        d.r() as i64,
        d.r_star() as i64,
    );
    let mut total = m * (g.initial_index + pm + p0 - r) - r - pm - p0
        - even_indicator(m) * (d.q_zero + d.q_plus) as i64;
    for theta in &d.thetas {
        total += 2 * to_i64(&ceil_int(&theta.times(m))?)?;
    }
    let mut phis = 0i64;
    for alpha in &d.alphas {
        phis += phi(&alpha.times(m))? as i64;
    }
    Ok(total + 2 * (phis - rs))
}

/// `ν(c^m)`.
pub fn nullity_at(g: &GeodesicRecord, m: i64) -> Result<i64> {
    if m < 1 {
        return Err(Error::Precondition(format!("iterate must be positive, got {m}")));
    }
    let d = &g.descriptor;
    let mut phis = 0i64;
    for rho in d.all_rotation_numbers() {
        phis += phi(&rho.times(m))? as i64;
    }
    Ok(g.initial_nullity as i64
        + even_indicator(m) * (d.q_minus + 2 * d.q_zero + d.q_plus) as i64
        + 2 * (d.r() + d.r_star() + d.r_zero()) as i64
        - 2 * phis)
}

/// `î(c) = i + p- + p0 - r + Σ 2 θj/2π`; exact when every θ is exact.
pub fn mean_index(g: &GeodesicRecord) -> Interval {
    let d = &g.descriptor;
    let base = Interval::from_int(g.initial_index + d.p_minus as i64 + d.p_zero as i64 - d.r() as i64);
    d.thetas
        .iter()
        .fold(base, |acc, t| &acc + &t.interval().scale_int(2))
}

/// `S⁺(1)`, available only without eigenvalue-1 blocks, where it vanishes.
pub fn splitting_number_at_one(g: &GeodesicRecord) -> Result<i64> {
    let d = &g.descriptor;
    if d.p_minus + d.p_zero + d.p_plus > 0 {
        return Err(Error::Unsupported(format!(
            "geodesic {}: splitting numbers for eigenvalue-1 blocks are not implemented",
            g.label
        )));
    }
    Ok(0)
}

/// Parity of `i(c^m)` for a strictly bumpy record. It depends only on the
/// parity of `m`.
pub fn index_parity_class(g: &GeodesicRecord, m: i64) -> Result<u8> {
    if !g.is_strictly_bumpy() {
        return Err(Error::Precondition(format!(
            "geodesic {} is not bumpy: eigenvalue ±1 blocks or rational rotation numbers \
             make some iterate degenerate",
            g.label
        )));
    }
    Ok(index_at(g, m)?.rem_euclid(2) as u8)
}

/// Documented constant `C` with `|i(c^m)/m - î(c)| <= C/m` for all `m`:
/// `2(r + r* + 1) + |i| + p- + p0 + q0 + q+`.
pub fn bott_constant(g: &GeodesicRecord) -> i64 {
    let d = &g.descriptor;
    2 * (d.r() + d.r_star() + 1) as i64
        + g.initial_index.abs()
        + (d.p_minus + d.p_zero + d.q_zero + d.q_plus) as i64
}

/// Bounds `(below, above)` with `m î - below <= i(c^m) < m î + above` for
/// every `m >= 1` (the upper bound is strict when `r > 0`).
pub fn index_deviation_bounds(g: &GeodesicRecord) -> (i64, i64) {
    let d = &g.descriptor;
    let below = (d.r() + d.p_minus + d.p_zero + d.q_zero + d.q_plus + 2 * d.r_star()) as i64;
    (below, d.r() as i64)
}

/// One row of an index table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterateRow {
    pub m: i64,
    pub index: i64,
    pub nullity: i64,
}

/// `(m, i(c^m), ν(c^m))` for `m` in `1..=m_max`, evaluated in parallel.
pub fn index_table(g: &GeodesicRecord, m_max: i64) -> Result<Vec<IterateRow>> {
    (1..=m_max)
        .into_par_iter()
        .map(|m| {
            Ok(IterateRow {
                m,
                index: index_at(g, m)?,
                nullity: nullity_at(g, m)?,
            })
        })
        .collect()
}
