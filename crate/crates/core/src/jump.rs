//! Common index jump certificates and a mechanical replay of the counting
//! argument built on them.
//!
//! The jump theorem itself is imported: [`find_common_jump`] scans `(M, N)`
//! for data satisfying its conclusions, and [`verify_jump`] checks the
//! resulting index inequalities by direct evaluation. The replay functions
//! then redo the arithmetic of the existence proof (two expressions for the
//! alternating Morse sum, the top-degree Morse inequality, the count of
//! distinct geodesics) so that an inconsistent configuration is caught with
//! the exact inequality that breaks.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{alternating_window_closed_form, betti, jump_modulus, B_constant};
use crate::interval::{
    format_rational, int, lcm_all, rat, serialize_rational, to_i64, Interval,
};
use crate::iteration::{index_at, index_deviation_bounds, mean_index, GeodesicRecord};
use crate::morse::{
    avg_chi, check_morse_inequalities, euler_chi, morse_counts, sufficient_m_max,
    MorseInequalityReport, SphereConfiguration,
};

/// Iterates scanned explicitly before a "for all m" claim is given up as
/// uncertified.
pub const TAIL_LIMIT: i64 = 1_000_000;

/// `(N, M, m_j, ξ_j, ε, δ)`; the lists follow the configuration order and
/// `labels` names the geodesic of each entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpCertificate {
    #[serde(rename = "N")]
    pub big_n: i64,
    #[serde(rename = "M")]
    pub big_m: i64,
    pub labels: Vec<String>,
    pub m: Vec<i64>,
    pub xi: Vec<u8>,
    #[serde(serialize_with = "serialize_rational")]
    pub eps: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub delta: BigRational,
}

fn invalid(msg: String) -> Error {
    Error::InvalidCertificate(msg)
}

/// `1 / (1 + Σ_j 4M |χ̂(c_j)|)`, the largest admissible `ε` for a given `M`.
pub fn eps_bound(cfg: &SphereConfiguration, big_m: i64) -> Result<BigRational> {
    let mut sum = BigRational::zero();
    for g in &cfg.geodesics {
        sum += avg_chi(g)?.abs() * int(4 * big_m);
    }
    Ok(int(1) / (int(1) + sum))
}

/// Least common multiple of the denominators of `2ρ` over every exact
/// rotation number; `M` is always a multiple of it, so `2 m_j ρ` is an
/// integer for exact `ρ`.
pub fn rotation_base(cfg: &SphereConfiguration) -> BigInt {
    let dens: Vec<BigInt> = cfg
        .geodesics
        .iter()
        .flat_map(|g| g.descriptor.double_turn_denominators())
        .collect();
    lcm_all(&dens)
}

fn two_n_b(cfg: &SphereConfiguration, big_n: i64) -> BigRational {
    int(2 * big_n) * B_constant(cfg.n)
}

fn positive_mean(g: &GeodesicRecord) -> Result<Interval> {
    let mean = mean_index(g);
    if !mean.is_positive() {
        return Err(Error::Precondition(format!(
            "geodesic {}: mean index {mean} is not positive",
            g.label
        )));
    }
    Ok(mean)
}

/// `sup |x - k|` over the interval.
fn sup_distance_to(x: &Interval, k: &BigInt) -> BigRational {
    let k = BigRational::from_integer(k.clone());
    (x.lo() - &k).abs().max((x.hi() - &k).abs())
}

/// Largest distance of `2 m ρ` to the integers over the rotation numbers of `g`.
fn rotation_distance(g: &GeodesicRecord, m: i64) -> BigRational {
    g.descriptor
        .all_rotation_numbers()
        .map(|rho| rho.times(2 * m).sup_distance_to_integers())
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// Checks every certificate invariant: the shape of `m_j`, the fractional
/// closeness to `ε`, integrality of `2N B(n,1)`, divisibility of `N` and the
/// rotation closeness to `δ`. All comparisons hold over the whole interval
/// of each decimal quantity.
pub fn validate_certificate(cfg: &SphereConfiguration, cert: &JumpCertificate) -> Result<()> {
    let p = cfg.geodesics.len();
    if cert.labels.len() != p || cert.m.len() != p || cert.xi.len() != p {
        return Err(invalid(format!(
            "certificate lists have lengths labels={}, m={}, xi={} but the configuration has \
             {p} geodesics",
            cert.labels.len(),
            cert.m.len(),
            cert.xi.len()
        )));
    }
    for (g, label) in cfg.geodesics.iter().zip(&cert.labels) {
        if &g.label != label {
            return Err(invalid(format!(
                "certificate label {label} does not match configuration geodesic {}",
                g.label
            )));
        }
    }
    if cert.big_n < 1 || cert.big_m < 1 {
        return Err(invalid(format!(
            "N and M must be positive, got N={} M={}",
            cert.big_n, cert.big_m
        )));
    }
    if !cert.eps.is_positive() || !cert.delta.is_positive() {
        return Err(invalid("eps and delta must be positive".into()));
    }
    let modulus = jump_modulus(cfg.n);
    if cert.big_n % modulus != 0 {
        return Err(invalid(format!(
            "N = {} is not a multiple of {modulus}, as n = {} requires",
            cert.big_n, cfg.n
        )));
    }
    let tnb = two_n_b(cfg, cert.big_n);
    if !tnb.is_integer() {
        return Err(invalid(format!(
            "2N B(n,1) = {} is not an integer",
            format_rational(&tnb)
        )));
    }
    for (j, g) in cfg.geodesics.iter().enumerate() {
        let (m, xi) = (cert.m[j], cert.xi[j]);
        if xi > 1 {
            return Err(invalid(format!("geodesic {}: xi must be 0 or 1, got {xi}", g.label)));
        }
        if m < 1 {
            return Err(invalid(format!("geodesic {}: m must be positive, got {m}", g.label)));
        }
        let x = Interval::from_int(cert.big_n).div(&positive_mean(g)?.scale_int(cert.big_m))?;
        let k = x.floor_int()? + BigInt::from(xi);
        let expected = &k * BigInt::from(cert.big_m);
        if expected != BigInt::from(m) {
            return Err(invalid(format!(
                "geodesic {}: m = {m} but ([N/(M î)] + xi) M = {expected}",
                g.label
            )));
        }
        let dist = sup_distance_to(&x, &k);
        if dist >= cert.eps {
            return Err(invalid(format!(
                "geodesic {}: |N/(M î) - [N/(M î)] - xi| = {} is not below eps = {}",
                g.label,
                format_rational(&dist),
                format_rational(&cert.eps)
            )));
        }
        for rho in g.descriptor.all_rotation_numbers() {
            let d = rho.times(2 * m).sup_distance_to_integers();
            if d >= cert.delta {
                return Err(invalid(format!(
                    "geodesic {}: rotation number {rho} has 2mρ at distance {} from the \
                     integers, not below delta = {}",
                    g.label,
                    format_rational(&d),
                    format_rational(&cert.delta)
                )));
            }
        }
    }
    Ok(())
}

struct Candidate {
    m: Vec<i64>,
    xi: Vec<u8>,
    max_dist: BigRational,
    max_rot: BigRational,
}

/// The forced choice of `m_j, ξ_j` for `(M, N)`, or `None` when some
/// quantity cannot be decided over its interval or some `m_j` would be 0.
fn evaluate(cfg: &SphereConfiguration, means: &[Interval], big_m: i64, big_n: i64) -> Option<Candidate> {
    let half = rat(1, 2);
    let mut c = Candidate {
        m: Vec::with_capacity(means.len()),
        xi: Vec::with_capacity(means.len()),
        max_dist: BigRational::zero(),
        max_rot: BigRational::zero(),
    };
    for (g, mean) in cfg.geodesics.iter().zip(means) {
        let x = Interval::from_int(big_n).div(&mean.scale_int(big_m)).ok()?;
        let floor = x.floor_int().ok()?;
        let f = x.frac().ok()?;
        let xi = if *f.hi() < half {
            0u8
        } else if *f.lo() > half {
            1
        } else {
            return None;
        };
        let k = floor + BigInt::from(xi);
        let m = to_i64(&(&k * BigInt::from(big_m))).ok()?;
        if m < 1 {
            return None;
        }
        c.max_dist = c.max_dist.max(sup_distance_to(&x, &k));
        c.max_rot = c.max_rot.max(rotation_distance(g, m));
        c.m.push(m);
        c.xi.push(xi);
    }
    Some(c)
}

/// Lexicographically smallest `(M, N)` with `M` a multiple of
/// [`rotation_base`], `M <= m_max`, `N <= n_max`, satisfying every
/// certificate invariant.
///
/// With `eps = None` the bound [`eps_bound`] is the target and the reported
/// `ε` sits halfway between the achieved distance and that bound.
pub fn find_common_jump(
    cfg: &SphereConfiguration,
    eps: Option<&BigRational>,
    delta: &BigRational,
    m_max: i64,
    n_max: i64,
) -> Result<JumpCertificate> {
    if !cfg.bumpy {
        return Err(Error::Unsupported("the jump search needs a bumpy configuration".into()));
    }
    if !delta.is_positive() || eps.is_some_and(|e| !e.is_positive()) {
        return Err(Error::Validation("eps and delta must be positive".into()));
    }
    let floor = int(cfg.n as i64 - 1);
    let mut means = Vec::with_capacity(cfg.geodesics.len());
    for g in &cfg.geodesics {
        let mean = mean_index(g);
        if *mean.hi() <= floor {
            return Err(Error::Precondition(format!(
                "geodesic {}: the jump search needs mean index > n-1 = {}, got {mean}",
                g.label,
                cfg.n - 1
            )));
        }
        if *mean.lo() <= floor {
            return Err(Error::Precision(format!(
                "geodesic {}: mean index {mean} cannot be separated from n-1",
                g.label
            )));
        }
        means.push(mean);
    }
    let base = to_i64(&rotation_base(cfg))?;
    let modulus = jump_modulus(cfg.n);
    let admissible_n = |big_n: &i64| big_n % modulus == 0 && two_n_b(cfg, *big_n).is_integer();

    let mut big_m = base;
    while big_m <= m_max {
        let bound = eps_bound(cfg, big_m)?;
        let target = eps.cloned().unwrap_or_else(|| bound.clone());
        let found = (1..=n_max)
            .into_par_iter()
            .filter(admissible_n)
            .find_map_first(|big_n| {
                evaluate(cfg, &means, big_m, big_n)
                    .filter(|c| c.max_dist < target && c.max_rot < *delta)
                    .map(|c| (big_n, c))
            });
        if let Some((big_n, c)) = found {
            let eps = match eps {
                Some(e) => e.clone(),
                None => (c.max_dist + &bound) / int(2),
            };
            return Ok(JumpCertificate {
                big_n,
                big_m,
                labels: cfg.geodesics.iter().map(|g| g.label.clone()).collect(),
                m: c.m,
                xi: c.xi,
                eps,
                delta: delta.clone(),
            });
        }
        big_m += base;
    }
    Err(Error::NotFound(near_miss(cfg, &means, eps, delta, base, m_max, n_max, &admissible_n)?))
}

#[allow(clippy::too_many_arguments)]
fn near_miss(
    cfg: &SphereConfiguration,
    means: &[Interval],
    eps: Option<&BigRational>,
    delta: &BigRational,
    base: i64,
    m_max: i64,
    n_max: i64,
    admissible_n: &(dyn Fn(&i64) -> bool + Sync),
) -> Result<String> {
    let mut best: Option<(BigRational, i64, i64, Candidate)> = None;
    let mut big_m = base;
    while big_m <= m_max {
        let target = match eps {
            Some(e) => e.clone(),
            None => eps_bound(cfg, big_m)?,
        };
        let local = (1..=n_max)
            .into_par_iter()
            .filter(admissible_n)
            .filter_map(|big_n| {
                let c = evaluate(cfg, means, big_m, big_n)?;
                let score = (&c.max_dist / &target).max(&c.max_rot / delta);
                Some((score, big_n, c))
            })
            .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some((score, big_n, c)) = local {
            if best.as_ref().is_none_or(|b| score < b.0) {
                best = Some((score, big_m, big_n, c));
            }
        }
        big_m += base;
    }
    Ok(match best {
        None if base > m_max => format!(
            "M must be a multiple of {base} to make every exact 2mρ integral, above max-M = {m_max}"
        ),
        None => format!("no decidable candidate with M <= {m_max}, N <= {n_max}"),
        Some((_, big_m, big_n, c)) => format!(
            "searched M <= {m_max}, N <= {n_max}; best near miss M = {big_m}, N = {big_n}, m = {:?}: \
             fractional distance {} (eps target {}), rotation distance {} (delta {})",
            c.m,
            format_rational(&c.max_dist),
            match eps {
                Some(e) => format_rational(e),
                None => format_rational(&eps_bound(cfg, big_m)?),
            },
            format_rational(&c.max_rot),
            format_rational(delta)
        ),
    })
}

/// An iterate whose index violates a bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterateFailure {
    pub iterate: i64,
    pub index: i64,
    pub bound: i64,
}

/// Outcome of an inequality checked over a range of iterates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RangeCheck {
    pub pass: bool,
    /// First and last iterate checked explicitly; empty for an empty range.
    pub checked_range: Vec<i64>,
    pub first_failure: Option<IterateFailure>,
}

fn check_range(
    g: &GeodesicRecord,
    iterates: impl Iterator<Item = i64>,
    ok: impl Fn(i64) -> bool,
    bound: i64,
) -> Result<RangeCheck> {
    let mut checked = Vec::new();
    let mut first_failure = None;
    for m in iterates {
        checked.push(m);
        let index = index_at(g, m)?;
        if first_failure.is_none() && !ok(index) {
            first_failure = Some(IterateFailure {
                iterate: m,
                index,
                bound,
            });
        }
    }
    let (lo, hi) = (checked.iter().min().copied(), checked.iter().max().copied());
    Ok(RangeCheck {
        pass: first_failure.is_none(),
        checked_range: lo.into_iter().chain(hi).collect::<BTreeSet<_>>().into_iter().collect(),
        first_failure,
    })
}

/// `i(c^m) >= threshold` for every `m >= start`, proved by explicit
/// evaluation up to the point where `m î - C >= threshold` takes over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailCheck {
    pub certified: bool,
    /// First iterate covered by the linear lower bound.
    pub bound_from: Option<i64>,
    pub first_failure: Option<IterateFailure>,
}

fn check_tail(g: &GeodesicRecord, start: i64, threshold: i64) -> Result<TailCheck> {
    let mean = mean_index(g);
    if !mean.is_positive() {
        return Ok(TailCheck {
            certified: false,
            bound_from: None,
            first_failure: None,
        });
    }
    let (below, _) = index_deviation_bounds(g);
    let from = to_i64(&(int(threshold + below) / mean.lo()).ceil().to_integer())?.max(start);
    if from - start > TAIL_LIMIT {
        return Ok(TailCheck {
            certified: false,
            bound_from: Some(from),
            first_failure: None,
        });
    }
    for m in start..from {
        let index = index_at(g, m)?;
        if index < threshold {
            return Ok(TailCheck {
                certified: false,
                bound_from: Some(from),
                first_failure: Some(IterateFailure {
                    iterate: m,
                    index,
                    bound: threshold,
                }),
            });
        }
    }
    Ok(TailCheck {
        certified: true,
        bound_from: Some(from),
        first_failure: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicJump {
    pub label: String,
    pub m: i64,
    /// `i(c^{2m})`
    pub jump_index: i64,
    pub elliptic_height: u32,
    /// `i(c^{2m}) >= 2N - e/2`
    pub lower_window: bool,
    /// `i(c^{2m}) <= 2N + e/2`
    pub upper_window: bool,
    /// `i(c^{2m-k}) <= 2N - i(c)` for `1 <= k < 2m`
    pub before_jump: RangeCheck,
    /// `i(c^{2m+k}) >= 2N + i(c)` for `1 <= k <= probe`
    pub after_jump: RangeCheck,
    /// The same beyond the probes.
    pub after_jump_tail: TailCheck,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpReport {
    pub pass: bool,
    pub verdict: String,
    pub geodesics: Vec<GeodesicJump>,
}

/// Checks the index inequalities of the jump theorem for each geodesic by
/// direct evaluation; `m_probe` defaults to `2 m_j`.
pub fn verify_jump(
    cfg: &SphereConfiguration,
    cert: &JumpCertificate,
    m_probe: Option<i64>,
) -> Result<JumpReport> {
    if !cfg.bumpy {
        return Err(Error::Unsupported("jump verification needs a bumpy configuration".into()));
    }
    validate_certificate(cfg, cert)?;
    let two_n = 2 * cert.big_n;
    let mut geodesics = Vec::with_capacity(cfg.geodesics.len());
    for (g, &m) in cfg.geodesics.iter().zip(&cert.m) {
        let e = g.elliptic_height() as i64;
        let jump_index = index_at(g, 2 * m)?;
        let i = g.initial_index;
        let before_bound = two_n - i;
        let before_jump = check_range(g, (1..2 * m).rev(), |v| v <= before_bound, before_bound)?;
        let probe = m_probe.unwrap_or(2 * m);
        let after_bound = two_n + i;
        let after_jump = check_range(g, 2 * m + 1..=2 * m + probe, |v| v >= after_bound, after_bound)?;
        let after_jump_tail = check_tail(g, 2 * m + probe + 1, after_bound)?;
        let lower_window = 2 * jump_index >= 2 * two_n - e;
        let upper_window = 2 * jump_index <= 2 * two_n + e;
        let pass = lower_window
            && upper_window
            && before_jump.pass
            && after_jump.pass
            && after_jump_tail.certified;
        geodesics.push(GeodesicJump {
            label: g.label.clone(),
            m,
            jump_index,
            elliptic_height: e as u32,
            lower_window,
            upper_window,
            before_jump,
            after_jump,
            after_jump_tail,
            pass,
        });
    }
    let failing: Vec<String> = geodesics
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.label.clone())
        .collect();
    let verdict = if failing.is_empty() {
        "all jump inequalities hold".to_string()
    } else {
        format!(
            "configuration inconsistent with the imported jump theorem (geodesics {})",
            failing.join(", ")
        )
    };
    Ok(JumpReport {
        pass: failing.is_empty(),
        verdict,
        geodesics,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiSumTerm {
    pub label: String,
    pub m: i64,
    #[serde(serialize_with = "serialize_rational")]
    pub avg_chi: BigRational,
    /// `2 m χ̂(c)`
    #[serde(serialize_with = "serialize_rational")]
    pub value: BigRational,
    pub integral: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiSumReport {
    /// `Σ_j 2 m_j χ̂(c_j)`
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: BigRational,
    /// `2N B(n,1)`
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: BigRational,
    pub pass: bool,
    #[serde(serialize_with = "serialize_rational")]
    pub eps_bound: BigRational,
    pub eps_within_bound: bool,
    pub terms: Vec<ChiSumTerm>,
}

/// `Σ_j 2 m_j χ̂(c_j) = 2N B(n,1)`, compared exactly.
pub fn replay_claim1(cfg: &SphereConfiguration, cert: &JumpCertificate) -> Result<ChiSumReport> {
    validate_certificate(cfg, cert)?;
    let mut lhs = BigRational::zero();
    let mut terms = Vec::with_capacity(cfg.geodesics.len());
    for (g, &m) in cfg.geodesics.iter().zip(&cert.m) {
        let chi = avg_chi(g)?;
        let value = int(2 * m) * &chi;
        lhs += &value;
        terms.push(ChiSumTerm {
            label: g.label.clone(),
            m,
            avg_chi: chi,
            integral: value.is_integer(),
            value,
        });
    }
    let rhs = two_n_b(cfg, cert.big_n);
    let bound = eps_bound(cfg, cert.big_m)?;
    Ok(ChiSumReport {
        pass: lhs == rhs,
        lhs,
        rhs,
        eps_within_bound: cert.eps < bound,
        eps_bound: bound,
        terms,
    })
}

/// Conditions under which the alternating Morse sum up to `2N+n-2` only
/// sees the iterates `c_j^m` with `m <= 2m_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationEntry {
    pub label: String,
    pub jump_index: i64,
    /// `i(c^{2m}) < 2N + n - 1`; fails exactly for a witness.
    pub below_witness_level: bool,
    /// `i(c^k) <= i(c^{2m})` for `k < 2m`
    pub earlier_not_higher: RangeCheck,
    /// `i(c^{2m}) <= 2N + n - 2`
    pub within_cutoff: bool,
    /// `i(c^k) >= 2N + n - 1` for `k > 2m`
    pub later_above_cutoff: TailCheck,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationReport {
    pub pass: bool,
    pub witness_found: bool,
    pub failures: Vec<String>,
    pub geodesics: Vec<TruncationEntry>,
}

fn truncation(cfg: &SphereConfiguration, cert: &JumpCertificate) -> Result<TruncationReport> {
    let n = cfg.n as i64;
    let top = 2 * cert.big_n + n - 1;
    let mut geodesics = Vec::with_capacity(cfg.geodesics.len());
    let mut failures = Vec::new();
    for (g, &m) in cfg.geodesics.iter().zip(&cert.m) {
        let jump_index = index_at(g, 2 * m)?;
        let below_witness_level = jump_index < top;
        let earlier_not_higher = check_range(g, 1..2 * m, |v| v <= jump_index, jump_index)?;
        let within_cutoff = jump_index < top;
        let later_above_cutoff = check_tail(g, 2 * m + 1, top)?;
        if !below_witness_level {
            failures.push(format!(
                "geodesic {}: i(c^{}) = {jump_index} reaches 2N+n-1, a witness for the top degree",
                g.label,
                2 * m
            ));
        }
        if let Some(f) = &earlier_not_higher.first_failure {
            failures.push(format!(
                "geodesic {}: earlier iterate {} has index {} above i(c^{}) = {jump_index}",
                g.label,
                f.iterate,
                f.index,
                2 * m
            ));
        }
        if !later_above_cutoff.certified {
            failures.push(match &later_above_cutoff.first_failure {
                Some(f) => format!(
                    "geodesic {}: later iterate {} has index {} below 2N+n-1 = {top}",
                    g.label, f.iterate, f.index
                ),
                None => format!(
                    "geodesic {}: iterates beyond {} could not be bounded below by 2N+n-1",
                    g.label,
                    2 * m
                ),
            });
        }
        let pass = below_witness_level
            && earlier_not_higher.pass
            && within_cutoff
            && later_above_cutoff.certified;
        geodesics.push(TruncationEntry {
            label: g.label.clone(),
            jump_index,
            below_witness_level,
            earlier_not_higher,
            within_cutoff,
            later_above_cutoff,
            pass,
        });
    }
    Ok(TruncationReport {
        pass: failures.is_empty(),
        witness_found: geodesics.iter().any(|e| !e.below_witness_level),
        failures,
        geodesics,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorseSumReport {
    /// `Σ_j 2 m_j χ̂(c_j)`
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: BigRational,
    /// `Σ_j Σ_{m <= 2m_j} χ(c_j^m)`
    pub iterate_chi_sum: i64,
    /// `Σ_{q <= 2N+n-2} (-1)^q M_q`, enumerated.
    pub morse_alternating_sum: i64,
    pub top_degree: i64,
    pub pass: bool,
    pub truncation: TruncationReport,
}

/// Compares `Σ_j 2 m_j χ̂(c_j)` with the enumerated alternating Morse sum up
/// to degree `2N+n-2`, after checking the truncation conditions that make
/// the two equal.
pub fn replay_claim2(cfg: &SphereConfiguration, cert: &JumpCertificate) -> Result<MorseSumReport> {
    validate_certificate(cfg, cert)?;
    let truncation = truncation(cfg, cert)?;
    let top_degree = 2 * cert.big_n + cfg.n as i64 - 2;
    let morse_alternating_sum = alternating_morse_sum(cfg, top_degree)?;
    let mut lhs = BigRational::zero();
    let mut iterate_chi_sum = 0i64;
    for (g, &m) in cfg.geodesics.iter().zip(&cert.m) {
        lhs += int(2 * m) * avg_chi(g)?;
        for k in 1..=2 * m {
            iterate_chi_sum += euler_chi(g, k)?;
        }
    }
    Ok(MorseSumReport {
        pass: truncation.pass
            && lhs == int(iterate_chi_sum)
            && lhs == int(morse_alternating_sum),
        lhs,
        iterate_chi_sum,
        morse_alternating_sum,
        top_degree,
        truncation,
    })
}

fn alternating_morse_sum(cfg: &SphereConfiguration, top: i64) -> Result<i64> {
    if top < 0 {
        return Ok(0);
    }
    let m_max = sufficient_m_max(cfg, top)?;
    Ok(morse_counts(cfg, 0, top, m_max)?.alternating_sum())
}

/// The top-degree arithmetic that makes a configuration without a witness
/// contradictory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContradictionReport {
    /// `2N + n - 2`
    pub top_degree: i64,
    /// `N / 2k` for odd `n`, `N / (2k-1)` for even `n`.
    pub s: i64,
    /// `Σ_{q <= top} (-1)^q M_q`
    pub morse_alternating_sum: i64,
    #[serde(serialize_with = "serialize_rational")]
    pub two_n_b: BigRational,
    /// `Σ_{q <= top} (-1)^q b_q`
    pub betti_alternating_sum: i64,
    /// `2s(k+1) - 1` for odd `n`, `-2sk + 1` for even `n`.
    pub betti_closed_form: i64,
    /// `morse_alternating_sum - betti_alternating_sum`
    pub difference: i64,
    /// `Σ_{q <= top} (-1)^{top-q} (M_q - b_q) >= 0`
    pub top_inequality_holds: bool,
    pub off_by_one: bool,
    pub morse_inequalities: MorseInequalityReport,
    pub breaks: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub witness: Option<String>,
    /// Present when there is no witness.
    pub contradiction: Option<ContradictionReport>,
}

/// A geodesic with `i(c^{2m_j}) = 2N + n - 1`, or the arithmetic showing
/// that its absence contradicts the Morse inequalities.
pub fn lemma51_witness(cfg: &SphereConfiguration, cert: &JumpCertificate) -> Result<WitnessReport> {
    validate_certificate(cfg, cert)?;
    let n = cfg.n as i64;
    let level = 2 * cert.big_n + n - 1;
    for (g, &m) in cfg.geodesics.iter().zip(&cert.m) {
        if index_at(g, 2 * m)? == level {
            return Ok(WitnessReport {
                witness: Some(g.label.clone()),
                contradiction: None,
            });
        }
    }
    Ok(WitnessReport {
        witness: None,
        contradiction: Some(contradiction(cfg, cert)?),
    })
}

fn contradiction(cfg: &SphereConfiguration, cert: &JumpCertificate) -> Result<ContradictionReport> {
    let top = 2 * cert.big_n + cfg.n as i64 - 2;
    let m_max = sufficient_m_max(cfg, top)?;
    let window = morse_counts(cfg, 0, top, m_max)?;
    let mseq: Vec<i64> = window.counts.iter().map(|&c| c as i64).collect();
    let bseq: Vec<i64> = (0..=top).map(|q| betti(cfg.n, q) as i64).collect();
    let morse_alternating_sum = window.alternating_sum();
    let betti_alternating_sum: i64 = bseq
        .iter()
        .enumerate()
        .map(|(q, b)| if q % 2 == 0 { *b } else { -b })
        .sum();
    let s = cert.big_n / jump_modulus(cfg.n);
    let difference = morse_alternating_sum - betti_alternating_sum;
    let sign = if top % 2 == 0 { 1 } else { -1 };
    let top_inequality_holds = sign * difference >= 0;
    let morse_inequalities = check_morse_inequalities(&mseq, &bseq)?;
    let breaks = if !top_inequality_holds {
        format!(
            "Morse inequality at the top degree q = {top}: the alternating Morse sum counted \
             from the top is {}, below the Betti value {}",
            sign * morse_alternating_sum,
            sign * betti_alternating_sum
        )
    } else if let Some(v) = &morse_inequalities.first_violation {
        format!("Morse inequality ({:?}) at q = {}", v.inequality, v.q).to_lowercase()
    } else {
        "none: the Morse inequalities hold up to the top degree".to_string()
    };
    Ok(ContradictionReport {
        top_degree: top,
        s,
        morse_alternating_sum,
        two_n_b: two_n_b(cfg, cert.big_n),
        betti_alternating_sum,
        betti_closed_form: alternating_window_closed_form(cfg.n, s),
        difference,
        top_inequality_holds,
        off_by_one: difference.abs() == 1,
        morse_inequalities,
        breaks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreJumpEntry {
    pub label: String,
    /// `2m - 2 = 0`: there is no iterate to check.
    pub degenerate: bool,
    /// `i(c^{2m-2})`
    pub index_before: Option<i64>,
    /// `2N - (n-1)`
    pub bound: i64,
    pub minimal_index: bool,
    /// For `i(c) = n-1`: some `ρ ∈ (1/2, 1)` has
    /// `E((2m-2)ρ) < E((2m-1)ρ)`.
    pub ceiling_increase: Option<bool>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreJumpReport {
    pub pass: bool,
    pub geodesics: Vec<PreJumpEntry>,
}

/// `i(c_j^{2m_j-2}) < 2N - (n-1)` for every `j`, plus the ceiling increase
/// behind it for geodesics of minimal index `n-1`.
pub fn lemma52_check(
    cfg: &SphereConfiguration,
    cert: &JumpCertificate,
    delta: &BigRational,
) -> Result<PreJumpReport> {
    if !cfg.bumpy {
        return Err(Error::Unsupported("the pre-jump check needs a bumpy configuration".into()));
    }
    validate_certificate(cfg, cert)?;
    let n = cfg.n as i64;
    let half = rat(1, 2);
    for g in cfg.geodesics.iter().filter(|g| g.initial_index == n - 1) {
        for rho in g.descriptor.thetas.iter().filter(|r| r.center() > &half) {
            let iv = rho.interval();
            let limit = (int(2) * iv.lo() - int(1)).min(int(1) - iv.hi());
            if *delta >= limit {
                return Err(Error::Precondition(format!(
                    "geodesic {}: delta = {} must be below min(θ/π - 1, 1 - θ/2π) = {} for the \
                     angle with θ/2π = {rho}",
                    g.label,
                    format_rational(delta),
                    format_rational(&limit)
                )));
            }
        }
    }
    let bound = 2 * cert.big_n - (n - 1);
    let mut geodesics = Vec::with_capacity(cfg.geodesics.len());
    for (g, &m) in cfg.geodesics.iter().zip(&cert.m) {
        let minimal_index = g.initial_index == n - 1;
        let ceiling_increase = if minimal_index {
            let mut any = false;
            for rho in g.descriptor.thetas.iter().filter(|r| r.center() > &half) {
                let before = rho.times(2 * m - 2).ceil_int()?;
                let after = rho.times(2 * m - 1).ceil_int()?;
                any |= before < after;
            }
            Some(any)
        } else {
            None
        };
        let (degenerate, index_before, holds) = if m == 1 {
            (true, None, true)
        } else {
            let v = index_at(g, 2 * m - 2)?;
            (false, Some(v), v < bound)
        };
        geodesics.push(PreJumpEntry {
            label: g.label.clone(),
            degenerate,
            index_before,
            bound,
            minimal_index,
            ceiling_increase,
            holds,
        });
    }
    Ok(PreJumpReport {
        pass: geodesics.iter().all(|e| e.holds),
        geodesics,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EllipticityEntry {
    pub label: String,
    pub jump_index: i64,
    /// `i(c^{2m}) = 2N ± (n-1)`, which the window bounds only allow for
    /// `e(P_c) = 2(n-1)`.
    pub forced_elliptic: bool,
    pub descriptor_elliptic: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EllipticityReport {
    pub contradiction: bool,
    pub geodesics: Vec<EllipticityEntry>,
}

/// Geodesics whose jump index sits at an end of the window `2N ± (n-1)` must
/// be elliptic; cross-checked against the descriptor.
pub fn ellipticity_from_jump(
    cfg: &SphereConfiguration,
    cert: &JumpCertificate,
) -> Result<EllipticityReport> {
    validate_certificate(cfg, cert)?;
    let n = cfg.n as i64;
    let mut geodesics = Vec::with_capacity(cfg.geodesics.len());
    for (g, &m) in cfg.geodesics.iter().zip(&cert.m) {
        let jump_index = index_at(g, 2 * m)?;
        let forced_elliptic = (jump_index - 2 * cert.big_n).abs() == n - 1;
        let descriptor_elliptic = g.elliptic_height() == cfg.ambient_dim();
        geodesics.push(EllipticityEntry {
            label: g.label.clone(),
            jump_index,
            forced_elliptic,
            descriptor_elliptic,
            consistent: !forced_elliptic || descriptor_elliptic,
        });
    }
    Ok(EllipticityReport {
        contradiction: geodesics.iter().any(|e| !e.consistent),
        geodesics,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepOneEntry {
    pub label: String,
    /// `i(c^{2m}) = 2N - (n-1) + 2τ`
    pub tau: i64,
}

/// The three counting steps of the multiplicity argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepsReport {
    /// `2[(n+1)/2]`
    pub target: usize,
    /// Geodesics whose jump iterate has a critical module in a degree
    /// `2N - (n-1) + 2τ`, `1 <= τ <= n-2`.
    pub step1: Vec<StepOneEntry>,
    /// The top-degree witness.
    pub step2: Option<String>,
    /// `#{j : i(c_j) = n-1}`
    pub minimal_index_count: usize,
    /// One more geodesic: with `i(c^{2m}) = 2N - (n-1)` when exactly one
    /// geodesic has index `n-1`, with `i(c) = n` when several do.
    pub step3: Option<String>,
    pub distinct_labels: Vec<String>,
    pub distinct: usize,
    pub reaches_target: bool,
}

pub fn count_steps(cfg: &SphereConfiguration, cert: &JumpCertificate) -> Result<StepsReport> {
    validate_certificate(cfg, cert)?;
    let n = cfg.n as i64;
    let base = 2 * cert.big_n - (n - 1);
    let mut step1 = Vec::new();
    let mut step2 = None;
    let mut bottom = Vec::new();
    for (g, &m) in cfg.geodesics.iter().zip(&cert.m) {
        let v = index_at(g, 2 * m)?;
        let critical = (v - g.initial_index) % 2 == 0;
        if critical && v > base && v < base + 2 * (n - 1) && (v - base) % 2 == 0 {
            step1.push(StepOneEntry {
                label: g.label.clone(),
                tau: (v - base) / 2,
            });
        }
        if step2.is_none() && v == 2 * cert.big_n + n - 1 {
            step2 = Some(g.label.clone());
        }
        if critical && v == base {
            bottom.push(g.label.clone());
        }
    }
    let minimal_index_count = cfg.geodesics.iter().filter(|g| g.initial_index == n - 1).count();
    let mut seen: BTreeSet<String> = step1.iter().map(|e| e.label.clone()).collect();
    seen.extend(step2.iter().cloned());
    let step3 = if minimal_index_count == 1 {
        bottom.into_iter().find(|l| !seen.contains(l))
    } else if minimal_index_count > 1 {
        cfg.geodesics
            .iter()
            .find(|g| g.initial_index == n && !seen.contains(&g.label))
            .map(|g| g.label.clone())
    } else {
        None
    };
    seen.extend(step3.iter().cloned());
    let target = 2 * (cfg.n as usize).div_ceil(2);
    Ok(StepsReport {
        target,
        step1,
        step2,
        minimal_index_count,
        step3,
        distinct: seen.len(),
        reaches_target: seen.len() >= target,
        distinct_labels: seen.into_iter().collect(),
    })
}

/// Everything `replay-proof` reports.
#[derive(Clone, Debug, Serialize)]
pub struct ProofReport {
    pub pass: bool,
    pub failures: Vec<String>,
    pub jump: JumpReport,
    pub chi_sum: ChiSumReport,
    pub morse_sum: MorseSumReport,
    pub witness: WitnessReport,
    pub pre_jump: Option<PreJumpReport>,
    pub pre_jump_error: Option<String>,
    pub steps: StepsReport,
    pub ellipticity: EllipticityReport,
}

/// Replays the whole argument for one certificate. `delta` for the
/// pre-jump check defaults to the certificate's.
pub fn replay_proof(
    cfg: &SphereConfiguration,
    cert: &JumpCertificate,
    m_probe: Option<i64>,
    delta: Option<&BigRational>,
) -> Result<ProofReport> {
    let jump = verify_jump(cfg, cert, m_probe)?;
    let chi_sum = replay_claim1(cfg, cert)?;
    let morse_sum = replay_claim2(cfg, cert)?;
    let witness = lemma51_witness(cfg, cert)?;
    let (pre_jump, pre_jump_error) = match lemma52_check(cfg, cert, delta.unwrap_or(&cert.delta)) {
        Ok(r) => (Some(r), None),
        Err(Error::Precondition(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let steps = count_steps(cfg, cert)?;
    let ellipticity = ellipticity_from_jump(cfg, cert)?;

    let mut failures = Vec::new();
    if !jump.pass {
        failures.push(format!("jump inequalities: {}", jump.verdict));
    }
    if !chi_sum.pass {
        failures.push(format!(
            "Σ 2m_j χ̂(c_j) = {} differs from 2N B(n,1) = {}",
            format_rational(&chi_sum.lhs),
            format_rational(&chi_sum.rhs)
        ));
    }
    if !morse_sum.pass {
        failures.push(format!(
            "Σ 2m_j χ̂(c_j) = {} but the alternating Morse sum up to degree {} is {}{}",
            format_rational(&morse_sum.lhs),
            morse_sum.top_degree,
            morse_sum.morse_alternating_sum,
            if morse_sum.truncation.failures.is_empty() {
                String::new()
            } else {
                format!(" ({})", morse_sum.truncation.failures.join("; "))
            }
        ));
    }
    if let Some(c) = &witness.contradiction {
        failures.push(format!(
            "no geodesic reaches index 2N+n-1 = {}: {} (alternating sums differ by {})",
            c.top_degree + 1,
            c.breaks,
            c.difference
        ));
    }
    if let Some(r) = &pre_jump {
        for e in r.geodesics.iter().filter(|e| !e.holds) {
            failures.push(format!(
                "geodesic {}: i(c^{{2m-2}}) = {} is not below 2N-(n-1) = {}",
                e.label,
                e.index_before.unwrap_or_default(),
                e.bound
            ));
        }
    }
    if let Some(msg) = &pre_jump_error {
        failures.push(format!("pre-jump check: {msg}"));
    }
    if ellipticity.contradiction {
        failures.push(
            "a geodesic forced elliptic by its jump index has a non-elliptic descriptor".into(),
        );
    }
    Ok(ProofReport {
        pass: failures.is_empty(),
        failures,
        jump,
        chi_sum,
        morse_sum,
        witness,
        pre_jump,
        pre_jump_error,
        steps,
        ellipticity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{NormalFormDescriptor, RotationNumber};

    fn elliptic(label: &str, i: i64, p: i64, q: i64) -> GeodesicRecord {
        let d = NormalFormDescriptor::rotations(vec![RotationNumber::ratio(p, q).unwrap()], 0);
        GeodesicRecord::new(label, i, d).unwrap()
    }

    fn hyperbolic(label: &str, i: i64, dim: u32) -> GeodesicRecord {
        GeodesicRecord::new(label, i, NormalFormDescriptor::hyperbolic(dim)).unwrap()
    }

    fn single() -> SphereConfiguration {
        SphereConfiguration::bumpy(2, vec![elliptic("A", 1, 3, 5)]).unwrap()
    }

    fn pair() -> SphereConfiguration {
        SphereConfiguration::bumpy(2, vec![elliptic("A", 1, 3, 5), hyperbolic("B", 3, 2)]).unwrap()
    }

    fn cert(cfg: &SphereConfiguration, big_m: i64, big_n: i64, m: Vec<i64>, xi: Vec<u8>) -> JumpCertificate {
        JumpCertificate {
            big_n,
            big_m,
            labels: cfg.geodesics.iter().map(|g| g.label.clone()).collect(),
            m,
            xi,
            eps: rat(1, 100),
            delta: rat(1, 10),
        }
    }

    #[test]
    fn search_finds_the_single_geodesic_certificate() {
        let c = find_common_jump(&single(), None, &rat(1, 10), 50, 100).unwrap();
        assert_eq!((c.big_m, c.big_n, c.m.clone(), c.xi.clone()), (5, 6, vec![5], vec![0]));
        assert!(c.eps < eps_bound(&single(), 5).unwrap());
        validate_certificate(&single(), &c).unwrap();
    }

    #[test]
    fn search_on_hyperbolic_and_pair() {
        let h = SphereConfiguration::bumpy(2, vec![hyperbolic("H", 3, 2)]).unwrap();
        let c = find_common_jump(&h, None, &rat(1, 10), 10, 100).unwrap();
        assert_eq!((c.big_m, c.big_n, c.m), (1, 3, vec![1]));
        let c = find_common_jump(&pair(), None, &rat(1, 10), 50, 100).unwrap();
        assert_eq!((c.big_m, c.big_n, c.m), (5, 30, vec![25, 10]));
    }

    #[test]
    fn search_can_fail() {
        let d = NormalFormDescriptor::rotations(
            vec![RotationNumber::parse_decimal("0.6180339887498949", "1e-13").unwrap()],
            0,
        );
        let g = GeodesicRecord::new("G", 1, d).unwrap();
        let cfg = SphereConfiguration::bumpy(2, vec![g]).unwrap();
        let err = find_common_jump(&cfg, Some(&rat(1, 1000)), &rat(1, 1000), 3, 5).unwrap_err();
        assert!(matches!(err, Error::NotFound(_)));
    }

    #[test]
    fn verify_single_geodesic() {
        let cfg = single();
        let c = cert(&cfg, 5, 6, vec![5], vec![0]);
        let report = verify_jump(&cfg, &c, None).unwrap();
        assert!(report.pass, "{report:?}");
        let r = &report.geodesics[0];
        assert_eq!(r.jump_index, 11);
        assert_eq!(index_at(&cfg.geodesics[0], 9).unwrap(), 11);
    }

    #[test]
    fn verify_hyperbolic() {
        let cfg = SphereConfiguration::bumpy(2, vec![hyperbolic("H", 3, 2)]).unwrap();
        let c = cert(&cfg, 1, 3, vec![1], vec![0]);
        let report = verify_jump(&cfg, &c, None).unwrap();
        assert!(report.pass);
        assert_eq!(report.geodesics[0].jump_index, 6);
    }

    #[test]
    fn invalid_certificates_are_rejected_first() {
        let cfg = single();
        let bad = cert(&cfg, 5, 6, vec![10], vec![0]);
        assert!(matches!(verify_jump(&cfg, &bad, None), Err(Error::InvalidCertificate(_))));
        let bad = cert(&cfg, 5, 6, vec![5], vec![2]);
        assert!(matches!(validate_certificate(&cfg, &bad), Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn sums_on_the_single_geodesic() {
        let cfg = single();
        let c = cert(&cfg, 5, 6, vec![5], vec![0]);
        let c1 = replay_claim1(&cfg, &c).unwrap();
        assert_eq!((c1.lhs.clone(), c1.rhs.clone()), (int(-10), int(-12)));
        assert!(!c1.pass);
        let c2 = replay_claim2(&cfg, &c).unwrap();
        assert!(c2.truncation.pass, "{:?}", c2.truncation.failures);
        assert_eq!(c2.morse_alternating_sum, -10);
        assert_eq!(c2.iterate_chi_sum, -10);
        assert!(c2.pass);
    }

    #[test]
    fn sums_on_the_pair() {
        let cfg = pair();
        let c = cert(&cfg, 5, 30, vec![25, 10], vec![0, 0]);
        assert!(replay_claim1(&cfg, &c).unwrap().pass);
        let c2 = replay_claim2(&cfg, &c).unwrap();
        assert!(c2.pass);
        assert_eq!(c2.morse_alternating_sum, -60);
        let l = lemma51_witness(&cfg, &c).unwrap();
        assert_eq!(l.witness, None);
        let k = l.contradiction.unwrap();
        assert_eq!((k.betti_alternating_sum, k.betti_closed_form), (-59, -59));
        assert_eq!(k.difference, -1);
        assert!(!k.top_inequality_holds);
    }

    #[test]
    fn pre_jump_cases() {
        let cfg = single();
        let c = cert(&cfg, 5, 6, vec![5], vec![0]);
        let r = lemma52_check(&cfg, &c, &rat(1, 10)).unwrap();
        assert_eq!(r.geodesics[0].index_before, Some(9));
        assert!(r.pass);
        assert_eq!(r.geodesics[0].ceiling_increase, Some(true));
        assert!(matches!(lemma52_check(&cfg, &c, &rat(1, 4)), Err(Error::Precondition(_))));

        let h = SphereConfiguration::bumpy(2, vec![hyperbolic("H", 3, 2)]).unwrap();
        let c = cert(&h, 1, 3, vec![1], vec![0]);
        let r = lemma52_check(&h, &c, &rat(1, 10)).unwrap();
        assert!(r.geodesics[0].degenerate && r.pass);
    }

    #[test]
    fn ellipticity_cases() {
        let cfg = single();
        let c = cert(&cfg, 5, 6, vec![5], vec![0]);
        let r = ellipticity_from_jump(&cfg, &c).unwrap();
        assert!(r.geodesics[0].forced_elliptic && r.geodesics[0].consistent);

        let h = SphereConfiguration::bumpy(2, vec![hyperbolic("H", 3, 2)]).unwrap();
        let c = cert(&h, 1, 3, vec![1], vec![0]);
        let r = ellipticity_from_jump(&h, &c).unwrap();
        assert!(!r.geodesics[0].forced_elliptic && !r.contradiction);
    }
}
