//! Critical modules, Euler characteristics, Morse counts and the mean index
//! identity for a finite set of prime closed geodesics on `Sⁿ`.
//!
//! Everything here assumes a bumpy metric: the critical module of `c^m` in
//! degree `q` is one-dimensional exactly when `i(c^m) - i(c)` is even and
//! `q = i(c^m)`, and zero otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::B_constant;
use crate::interval::{format_rational, int, serialize_rational, Interval};
use crate::iteration::{index_at, index_deviation_bounds, mean_index, GeodesicRecord};
use crate::symplectic::DEFAULT_RESOLUTION_LIMIT;

/// Curvature data carried as metadata. Its presence switches on the index
/// filter `i(c) >= n-1`, `î(c) > n-1` that such metrics are known to satisfy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureAssumption {
    /// Pinching constant, in `(0, 1]`.
    pub pinch: BigRational,
    /// Reversibility `λ >= 1`.
    pub reversibility: BigRational,
}

/// Dimension `n` of the sphere and its finitely many prime closed geodesics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereConfiguration {
    pub n: u32,
    pub geodesics: Vec<GeodesicRecord>,
    pub bumpy: bool,
    pub curvature_assumption: Option<CurvatureAssumption>,
    /// Denominator bound for the "not secretly rational" test on decimals.
    pub resolution_limit: u64,
}

impl SphereConfiguration {
    pub fn new(
        n: u32,
        geodesics: Vec<GeodesicRecord>,
        bumpy: bool,
        curvature_assumption: Option<CurvatureAssumption>,
    ) -> Result<Self> {
        let cfg = SphereConfiguration {
            n,
            geodesics,
            bumpy,
            curvature_assumption,
            resolution_limit: DEFAULT_RESOLUTION_LIMIT,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Bumpy configuration without curvature metadata.
    pub fn bumpy(n: u32, geodesics: Vec<GeodesicRecord>) -> Result<Self> {
        Self::new(n, geodesics, true, None)
    }

    /// `2(n-1)`
    pub fn ambient_dim(&self) -> u32 {
        2 * (self.n - 1)
    }

    pub fn get(&self, label: &str) -> Option<&GeodesicRecord> {
        self.geodesics.iter().find(|g| g.label == label)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Validation(format!(
                "sphere dimension must be at least 2, got {}",
                self.n
            )));
        }
        let mut labels: Vec<&str> = self.geodesics.iter().map(|g| g.label.as_str()).collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!("duplicate geodesic label {}", w[0])));
        }
        for g in &self.geodesics {
            g.validate()?;
            g.descriptor
                .validate_for_ambient(self.ambient_dim())
                .map_err(|e| match e {
                    Error::Dimension(msg) => Error::Dimension(format!("geodesic {}: {msg}", g.label)),
                    other => other,
                })?;
            for rho in g.descriptor.all_rotation_numbers() {
                rho.check_resolution(self.resolution_limit)?;
            }
            if self.bumpy && !g.is_structurally_bumpy() {
                return Err(Error::Validation(format!(
                    "geodesic {}: the bumpy constraint forbids eigenvalue ±1 blocks \
                     (p_minus, p_zero, p_plus, q_minus, q_zero, q_plus must all be 0)",
                    g.label
                )));
            }
        }
        if let Some(ca) = &self.curvature_assumption {
            self.check_curvature_filter(ca)?;
        }
        Ok(())
    }

    fn check_curvature_filter(&self, ca: &CurvatureAssumption) -> Result<()> {
        if !ca.pinch.is_positive() || ca.pinch > int(1) {
            return Err(Error::Validation(format!(
                "pinch constant {} must lie in (0, 1]",
                format_rational(&ca.pinch)
            )));
        }
        if ca.reversibility < int(1) {
            return Err(Error::Validation(format!(
                "reversibility {} must be at least 1",
                format_rational(&ca.reversibility)
            )));
        }
        let floor = self.n as i64 - 1;
        for g in &self.geodesics {
            if g.initial_index < floor {
                return Err(Error::Validation(format!(
                    "geodesic {}: curvature filter requires i(c) >= n-1 = {floor}, got {}",
                    g.label, g.initial_index
                )));
            }
            let mean = mean_index(g);
            if *mean.hi() <= int(floor) {
                return Err(Error::Validation(format!(
                    "geodesic {}: curvature filter requires mean index > n-1 = {floor}, got {mean}",
                    g.label
                )));
            }
            if *mean.lo() <= int(floor) {
                return Err(Error::Precision(format!(
                    "geodesic {}: mean index {mean} cannot be separated from n-1 = {floor}",
                    g.label
                )));
            }
        }
        Ok(())
    }

    fn require_bumpy(&self, what: &str) -> Result<()> {
        if self.bumpy {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} needs a bumpy configuration; critical modules of degenerate orbits \
                 are not implemented"
            )))
        }
    }
}

fn require_nondegenerate(g: &GeodesicRecord) -> Result<()> {
    if g.is_structurally_bumpy() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "geodesic {}: critical modules are only known for bumpy geodesics",
            g.label
        )))
    }
}

/// Whether `c^m` contributes a critical module at all: `i(c^m) - i(c)` even.
fn contributes(g: &GeodesicRecord, index: i64) -> bool {
    (index - g.initial_index) % 2 == 0
}

/// Rank of the critical module of `c^m` in degree `q`.
pub fn critical_module_dim(g: &GeodesicRecord, m: i64, q: i64) -> Result<u8> {
    require_nondegenerate(g)?;
    let index = index_at(g, m)?;
    Ok(u8::from(contributes(g, index) && q == index))
}

/// `χ(c^m)`: `(-1)^{i(c^m)}` if `c^m` contributes, else 0.
pub fn euler_chi(g: &GeodesicRecord, m: i64) -> Result<i64> {
    require_nondegenerate(g)?;
    let index = index_at(g, m)?;
    Ok(if !contributes(g, index) {
        0
    } else if index % 2 == 0 {
        1
    } else {
        -1
    })
}

/// `χ̂(c) = (χ(c) + χ(c²)) / 2`.
pub fn avg_chi(g: &GeodesicRecord) -> Result<BigRational> {
    Ok(BigRational::new(
        BigInt::from(euler_chi(g, 1)? + euler_chi(g, 2)?),
        BigInt::from(2),
    ))
}

/// `Σ_{m<=big_n} χ(c^m) / big_n`, which converges to [`avg_chi`].
pub fn chi_average(g: &GeodesicRecord, big_n: i64) -> Result<BigRational> {
    if big_n < 1 {
        return Err(Error::Precondition("averaging length must be positive".into()));
    }
    let total: i64 = (1..=big_n).map(|m| euler_chi(g, m)).sum::<Result<i64>>()?;
    Ok(BigRational::new(BigInt::from(total), BigInt::from(big_n)))
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityTerm {
    pub label: String,
    #[serde(serialize_with = "serialize_rational")]
    pub avg_chi: BigRational,
    pub mean_index: Interval,
    pub term: Interval,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanIndexReport {
    pub lhs: Interval,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: BigRational,
    pub pass: bool,
    pub contributions: Vec<IdentityTerm>,
}

/// `Σ χ̂(c_j)/î(c_j)` against `B(n, 1)`. With decimal rotation numbers the
/// left side is an interval and passes when it contains `B(n, 1)`.
pub fn check_mean_index_identity(cfg: &SphereConfiguration) -> Result<MeanIndexReport> {
    cfg.require_bumpy("the mean index identity")?;
    let mut lhs = Interval::exact(BigRational::zero());
    let mut contributions = Vec::with_capacity(cfg.geodesics.len());
    for g in &cfg.geodesics {
        let mean = mean_index(g);
        if !mean.is_positive() {
            return Err(Error::Precondition(format!(
                "geodesic {}: the identity needs a positive mean index, got {mean}",
                g.label
            )));
        }
        let chi = avg_chi(g)?;
        let term = Interval::exact(chi.clone()).div(&mean)?;
        lhs = &lhs + &term;
        contributions.push(IdentityTerm {
            label: g.label.clone(),
            avg_chi: chi,
            mean_index: mean,
            term,
        });
    }
    let rhs = B_constant(cfg.n);
    Ok(MeanIndexReport {
        pass: lhs.contains(&rhs),
        lhs,
        rhs,
        contributions,
    })
}

/// Largest `m` with `i(c^m) <= q_hi`, or 0 if there is none. The search is
/// bounded through the linear lower bound `i(c^m) >= m î - C`.
pub fn last_iterate_at_or_below(g: &GeodesicRecord, q_hi: i64) -> Result<i64> {
    let mean = mean_index(g);
    if !mean.is_positive() {
        return Err(Error::Range(format!(
            "geodesic {}: mean index {mean} is not positive, so its iterates never leave \
             the window below {q_hi}",
            g.label
        )));
    }
    let (below, _) = index_deviation_bounds(g);
    // m î_lo - below > q_hi for every m beyond `bound`.
    let bound = (int(q_hi + below) / mean.lo()).floor().to_integer();
    let bound = crate::interval::to_i64(&bound)?;
    for m in (1..=bound).rev() {
        if index_at(g, m)? <= q_hi {
            return Ok(m);
        }
    }
    Ok(0)
}

/// Smallest `m_max` that makes [`morse_counts`] complete up to `q_hi`.
pub fn sufficient_m_max(cfg: &SphereConfiguration, q_hi: i64) -> Result<i64> {
    cfg.geodesics
        .iter()
        .map(|g| last_iterate_at_or_below(g, q_hi))
        .try_fold(1, |acc, m| Ok(acc.max(m?)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contributor {
    pub label: String,
    pub m: i64,
    pub q: i64,
}

/// Morse counts `M_q` over `[q_lo, q_hi]` and the iterates behind them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorseWindow {
    pub q_lo: i64,
    pub q_hi: i64,
    pub counts: Vec<u64>,
    pub contributors: Vec<Contributor>,
}

impl MorseWindow {
    pub fn get(&self, q: i64) -> u64 {
        if q < self.q_lo || q > self.q_hi {
            return 0;
        }
        self.counts[(q - self.q_lo) as usize]
    }

    /// `Σ (-1)^q M_q` over the window.
    pub fn alternating_sum(&self) -> i64 {
        (self.q_lo..=self.q_hi)
            .map(|q| if q % 2 == 0 { self.get(q) as i64 } else { -(self.get(q) as i64) })
            .sum()
    }
}

/// `M_q = Σ_{j, m <= m_max} dim C_q(c_j^m)` for `q` in `[q_lo, q_hi]`.
///
/// Fails with [`Error::Range`] if some geodesic has an iterate beyond
/// `m_max` with index still `<= q_hi`.
pub fn morse_counts(
    cfg: &SphereConfiguration,
    q_lo: i64,
    q_hi: i64,
    m_max: i64,
) -> Result<MorseWindow> {
    cfg.require_bumpy("Morse counting")?;
    if q_lo > q_hi {
        return Err(Error::Range(format!("empty window [{q_lo}, {q_hi}]")));
    }
    if m_max < 1 {
        return Err(Error::Range(format!("m_max must be positive, got {m_max}")));
    }
    let per_geodesic: Vec<Vec<Contributor>> = cfg
        .geodesics
        .par_iter()
        .map(|g| {
            let needed = last_iterate_at_or_below(g, q_hi)?;
            if needed > m_max {
                return Err(Error::Range(format!(
                    "geodesic {}: iterate {needed} still has index <= {q_hi}; m_max = {m_max} \
                     is insufficient",
                    g.label
                )));
            }
            let mut found = Vec::new();
            for m in 1..=m_max {
                let index = index_at(g, m)?;
                if (q_lo..=q_hi).contains(&index) && contributes(g, index) {
                    found.push(Contributor {
                        label: g.label.clone(),
                        m,
                        q: index,
                    });
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    let mut contributors: Vec<Contributor> = per_geodesic.into_iter().flatten().collect();
    contributors.sort_by(|a, b| a.label.cmp(&b.label).then(a.m.cmp(&b.m)));
    let mut counts = vec![0u64; (q_hi - q_lo + 1) as usize];
    for c in &contributors {
        counts[(c.q - q_lo) as usize] += 1;
    }
    Ok(MorseWindow {
        q_lo,
        q_hi,
        counts,
        contributors,
    })
}

/// Which Morse inequality failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MorseInequality {
    /// `M_q >= b_q`
    Weak,
    /// `Σ_{i<=q} (-1)^{q-i} (M_i - b_i) >= 0`
    Strong,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorseViolation {
    /// Position in the sequences.
    pub q: usize,
    pub inequality: MorseInequality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorseInequalityReport {
    pub pass: bool,
    /// `Σ_{i<=q} (-1)^{q-i} (M_i - b_i)` for each position.
    pub alternating_excess: Vec<i64>,
    pub first_violation: Option<MorseViolation>,
}

/// Checks the weak and strong Morse inequalities position by position and
/// reports the first failure, the weak one first at equal position.
pub fn check_morse_inequalities(mseq: &[i64], bseq: &[i64]) -> Result<MorseInequalityReport> {
    if mseq.len() != bseq.len() {
        return Err(Error::Dimension(format!(
            "Morse counts have length {} but Betti numbers have length {}",
            mseq.len(),
            bseq.len()
        )));
    }
    let mut excess = 0i64;
    let mut alternating_excess = Vec::with_capacity(mseq.len());
    let mut first_violation = None;
    for (q, (m, b)) in mseq.iter().zip(bseq).enumerate() {
        excess = (m - b) - excess;
        alternating_excess.push(excess);
        if first_violation.is_some() {
            continue;
        }
        if m < b {
            first_violation = Some(MorseViolation {
                q,
                inequality: MorseInequality::Weak,
            });
        } else if excess < 0 {
            first_violation = Some(MorseViolation {
                q,
                inequality: MorseInequality::Strong,
            });
        }
    }
    Ok(MorseInequalityReport {
        pass: first_violation.is_none(),
        alternating_excess,
        first_violation,
    })
}
