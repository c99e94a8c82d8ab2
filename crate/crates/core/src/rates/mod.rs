//! Scalar rate formulas: binary entropy, the single-pair trade-off curve `g`,
//! the privacy-amplification cost `tau(delta, eps)` and the key fraction.
//!
//! `tau` is the largest value of `(1 - xi) H(eps_1) + xi (1 - delta_m)` over
//! all hidden decompositions
//!
//! ```text
//!   delta = xi delta_m
//!   eps   = (1 - xi) eps_1 + xi eps_m
//! ```
//!
//! with `(delta_m, eps_m)` in the allowed multiphoton region. It has a
//! closed form on three regions of the `(delta, eps)` plane; [`tau_numeric`]
//! recomputes it by direct search as an independent check.

mod numeric;

use std::fmt;
use std::sync::OnceLock;

pub use numeric::{tau_numeric, tau_numeric_with, NumericConfig};

use crate::error::{Error, Result};

/// Slack allowed when comparing against region boundaries.
const EDGE_TOL: f64 = 1e-12;
/// Two region formulas evaluated on their shared edge must agree this well.
const CONTINUITY_TOL: f64 = 1e-9;

/// `H(x) = -x log2 x - (1-x) log2(1-x)`, clamped into `[0, 1]`.
pub(crate) fn entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(entropy(x))
}

/// Unchecked `g`; callers guarantee `0 <= delta <= 1/3`.
pub(crate) fn g_unchecked(delta: f64) -> f64 {
    (1.0 - delta) / 2.0 - (delta * (1.0 - 2.0 * delta)).max(0.0).sqrt()
}

/// `g(delta) = (1 - delta)/2 - sqrt(delta (1 - 2 delta))`, the least error
/// fraction compatible with double-click fraction `delta` for one
/// mixed-parity photon pair.
pub fn g(delta: f64) -> Result<f64> {
    if !(-EDGE_TOL..=1.0 / 3.0 + EDGE_TOL).contains(&delta) {
        return Err(Error::Domain {
            what: "delta",
            value: delta,
            domain: "[0, 1/3]",
        });
    }
    Ok(g_unchecked(delta.clamp(0.0, 1.0 / 3.0)))
}

/// Root in `(0, 1/2)` of `16 x (1-x)^3 = 1`, about 0.0804.
///
/// The polynomial also reaches 1 at `x = 1/2`, so the bisection bracket stops
/// at 0.4.
pub fn eps1_star() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        let f = |x: f64| 16.0 * x * (1.0 - x).powi(3) - 1.0;
        let (mut lo, mut hi) = (1e-6, 0.4);
        debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Constants of the planar region-(b) formula.
#[derive(Debug, Clone, Copy)]
pub struct RegionBConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub denom: f64,
}

pub fn region_b_constants() -> RegionBConstants {
    let e = eps1_star();
    let h = entropy(e);
    RegionBConstants {
        c1: 3.0 - 4.0 * h + 4.0 * e,
        c2: 4.0 * (1.0 - h),
        c3: h - 4.0 * e,
        denom: 1.0 - 4.0 * e,
    }
}

/// Observed double-click and error fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedStats {
    pub delta: f64,
    pub eps: f64,
    /// Number of same-basis, both-detected events behind the estimate.
    pub events: Option<u64>,
}

impl ObservedStats {
    pub fn new(delta: f64, eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::Domain {
                what: "delta",
                value: delta,
                domain: "[0, 1)",
            });
        }
        if !(0.0..=1.0 - delta + EDGE_TOL).contains(&eps) {
            return Err(Error::Domain {
                what: "eps",
                value: eps,
                domain: "[0, 1 - delta]",
            });
        }
        Ok(Self {
            delta,
            eps,
            events: None,
        })
    }

    pub fn with_events(mut self, n: u64) -> Self {
        self.events = Some(n);
        self
    }

    /// Error rate of the sifted key, `eps / (1 - delta)`.
    pub fn qber(&self) -> f64 {
        self.eps / (1.0 - self.delta)
    }

    pub fn region(&self) -> Region {
        Region::classify(self.delta, self.eps)
    }

    pub fn tau_feasible(&self) -> bool {
        self.region() != Region::Infeasible
    }
}

/// Parameters Eve controls but the parties cannot observe directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenParams {
    pub xi: f64,
    pub delta_m: f64,
    pub eps_m: f64,
    pub eps_1: f64,
}

impl HiddenParams {
    /// `(delta, eps)` these parameters produce.
    pub fn observed(&self) -> (f64, f64) {
        (
            self.xi * self.delta_m,
            (1.0 - self.xi) * self.eps_1 + self.xi * self.eps_m,
        )
    }

    pub fn consistent_with(&self, stats: &ObservedStats, tol: f64) -> bool {
        let (d, e) = self.observed();
        (d - stats.delta).abs() <= tol && (e - stats.eps).abs() <= tol
    }

    /// Right-hand side of the privacy-amplification condition,
    /// `(1 - xi) H(eps_1) + xi (1 - delta_m)`.
    pub fn amplification_cost(&self) -> f64 {
        (1.0 - self.xi) * entropy(self.eps_1) + self.xi * (1.0 - self.delta_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    A,
    B,
    C,
    Infeasible,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::A => "a",
            Region::B => "b",
            Region::C => "c",
            Region::Infeasible => "infeasible",
        })
    }
}

/// `eps_1* (1 - 4 delta)`: upper edge of region (a).
pub fn edge_ab(delta: f64) -> f64 {
    eps1_star() * (1.0 - 4.0 * delta)
}

/// `(1 - 6 delta) eps_1* + delta/2`: lower edge of region (c).
pub fn edge_bc(delta: f64) -> f64 {
    (1.0 - 6.0 * delta) * eps1_star() + delta / 2.0
}

/// Upper edge of region (b), `min{edge_bc, 1/4 - delta}`.
pub fn edge_b_upper(delta: f64) -> f64 {
    edge_bc(delta).min(0.25 - delta)
}

/// Largest `eps` at which `tau` is defined for a given `delta`, or `None`
/// when no `eps >= 0` is covered.
pub fn tau_domain_upper(delta: f64) -> Option<f64> {
    if !(0.0..=0.25).contains(&delta) {
        None
    } else if delta <= 1.0 / 6.0 {
        Some(g_unchecked(delta))
    } else {
        Some(0.25 - delta)
    }
}

impl Region {
    /// Region of the closed form covering `(delta, eps)`, trying (a), then
    /// (b), then (c).
    pub fn classify(delta: f64, eps: f64) -> Region {
        if delta < 0.0 || eps < 0.0 || delta > 0.25 {
            return Region::Infeasible;
        }
        if eps <= edge_ab(delta) + EDGE_TOL {
            Region::A
        } else if eps <= edge_b_upper(delta) + EDGE_TOL {
            Region::B
        } else if eps <= g_unchecked(delta.min(1.0 / 3.0)) + EDGE_TOL
            && delta <= 1.0 / 6.0 + EDGE_TOL
        {
            Region::C
        } else {
            Region::Infeasible
        }
    }
}

/// Region (a): `3 delta + (1 - 4 delta) H(eps / (1 - 4 delta))`.
pub fn tau_region_a(delta: f64, eps: f64) -> f64 {
    let w = 1.0 - 4.0 * delta;
    if w <= 0.0 {
        return 3.0 * delta;
    }
    3.0 * delta + w * entropy((eps / w).min(1.0))
}

/// Region (b): `[c1 delta + c2 eps + c3] / (1 - 4 eps_1*)`.
pub fn tau_region_b(delta: f64, eps: f64) -> f64 {
    let k = region_b_constants();
    (k.c1 * delta + k.c2 * eps + k.c3) / k.denom
}

/// `tau` with the region it was evaluated in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauValue {
    pub tau: f64,
    pub region: Region,
}

fn assert_continuous(delta: f64, eps: f64, left: f64, right: f64, edge: &str) -> Result<()> {
    if (left - right).abs() > CONTINUITY_TOL {
        return Err(Error::Numerical(format!(
            "tau discontinuous across the {edge} edge at ({delta}, {eps}): {left} vs {right}"
        )));
    }
    Ok(())
}

/// Closed-form `tau` on regions (a)-(c).
pub fn tau_closed_form(stats: &ObservedStats) -> Result<TauValue> {
    let (delta, eps) = (stats.delta, stats.eps);
    let region = Region::classify(delta, eps);
    let tau = match region {
        Region::A => {
            let tau = tau_region_a(delta, eps);
            if (eps - edge_ab(delta)).abs() <= EDGE_TOL {
                assert_continuous(delta, eps, tau, tau_region_b(delta, eps), "a/b")?;
            }
            tau
        }
        Region::B => {
            let tau = tau_region_b(delta, eps);
            if (eps - edge_bc(delta)).abs() <= EDGE_TOL && delta <= 1.0 / 6.0 {
                assert_continuous(delta, eps, tau, tau_low(stats)?, "b/c")?;
            }
            tau
        }
        Region::C => tau_low(stats)?,
        Region::Infeasible => return Err(Error::Infeasible { delta, eps }),
    };
    Ok(TauValue { tau, region })
}

/// `xi g(delta/xi)` written without the division. For `xi >= 3 delta` it
/// is evaluated as `(xi - 3 delta)^2 / (2 (xi - delta) + 4 sqrt(delta (xi - 2 delta)))`,
/// which avoids the cancellation near the double root at `xi = 3 delta`.
fn scaled_g(delta: f64, xi: f64) -> f64 {
    let root = (delta * (xi - 2.0 * delta)).max(0.0).sqrt();
    if xi < 3.0 * delta {
        return (xi - delta) / 2.0 - root;
    }
    let den = 2.0 * (xi - delta) + 4.0 * root;
    if den == 0.0 {
        return 0.0;
    }
    (xi - 3.0 * delta).powi(2) / den
}

/// The bracketed expression of `tau_low` at a given multiphoton fraction,
/// `xi - delta + (1 - xi) H((eps - xi g(delta/xi)) / (1 - xi))`, or `None`
/// when `xi` is outside the range where it is defined.
pub fn tau_low_objective(delta: f64, eps: f64, xi: f64) -> Option<f64> {
    if !(0.0..=1.0).contains(&xi) || xi < 3.0 * delta - EDGE_TOL {
        return None;
    }
    if xi >= 1.0 {
        // (1 - xi) H(u) -> 0; only defined when eps sits on g(delta).
        return ((eps - g_unchecked(delta)).abs() <= EDGE_TOL).then_some(1.0 - delta);
    }
    let excess = eps - scaled_g(delta, xi);
    let u = excess / (1.0 - xi);
    if !(-EDGE_TOL..=1.0 + EDGE_TOL).contains(&u) {
        return None;
    }
    Some(xi - delta + (1.0 - xi) * entropy(u.clamp(0.0, 1.0)))
}

/// `[lo, hi]` range of `xi` on which [`tau_low_objective`] is defined.
fn tau_low_interval(delta: f64, eps: f64) -> Option<(f64, f64)> {
    let lo = 3.0 * delta;
    if lo > 1.0 {
        return None;
    }
    // xi g(delta/xi) is convex with minimum 0 at xi = 3 delta, and
    // xi - xi g(delta/xi) is increasing, so both constraints cut an interval.
    let below = |xi: f64, slack: f64| scaled_g(delta, xi) <= eps + slack;
    let room = |xi: f64, slack: f64| xi - scaled_g(delta, xi) <= 1.0 - eps + slack;
    if !below(lo, EDGE_TOL) || !room(lo, EDGE_TOL) {
        return None;
    }
    let ok = |xi: f64| below(xi, 0.0) && room(xi, 0.0);
    if ok(1.0) {
        return Some((lo, 1.0));
    }
    let (mut a, mut b) = (lo, 1.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if ok(m) {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-16 {
            break;
        }
    }
    Some((lo, a))
}

/// Maximizer and value of `tau_low`.
pub fn tau_low_argmax(stats: &ObservedStats) -> Result<(f64, f64)> {
    let (delta, eps) = (stats.delta, stats.eps);
    let infeasible = Error::Infeasible { delta, eps };
    let (lo, hi) = tau_low_interval(delta, eps).ok_or(infeasible.clone())?;

    let eval = |xi: f64| tau_low_objective(delta, eps, xi).unwrap_or(f64::NEG_INFINITY);
    // The ξ = 1 end is a removable singularity; approach it from inside.
    let end = |xi: f64| {
        if xi >= 1.0 {
            eval(1.0).max(eval(1.0 - 1e-13))
        } else {
            eval(xi)
        }
    };

    const GRID: usize = 1000;
    let xs: Vec<f64> = (0..=GRID)
        .map(|i| lo + (hi - lo) * i as f64 / GRID as f64)
        .collect();
    let (best_i, best_v) =
        xs.iter()
            .map(|&x| end(x))
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    if !best_v.is_finite() {
        return Err(infeasible);
    }

    // Golden-section refinement on the neighbouring cells.
    let mut a = xs[best_i.saturating_sub(1)];
    let mut b = xs[(best_i + 1).min(GRID)];
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (end(c), end(d));
    while b - a > 1e-12 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = end(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = end(d);
        }
    }
    let candidates = [(xs[best_i], best_v), (c, fc), (d, fd)];
    let (xi, v) =
        candidates.into_iter().fold(
            (0.0, f64::NEG_INFINITY),
            |acc, p| if p.1 > acc.1 { p } else { acc },
        );
    Ok((xi, v))
}

/// Cost forced by the explicit controlled-NOT attack; a lower bound on `tau`.
pub fn tau_low(stats: &ObservedStats) -> Result<f64> {
    Ok(tau_low_argmax(stats)?.1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    pub tau: f64,
    pub region: Region,
    pub r_key: f64,
    /// Error-correction inefficiency `f >= 1`.
    pub f_ec: f64,
    pub qber: f64,
}

impl KeyRateResult {
    pub fn has_key(&self) -> bool {
        self.r_key > 0.0
    }
}

fn check_f(f: f64) -> Result<()> {
    if !f.is_finite() || f < 1.0 {
        return Err(Error::Domain {
            what: "f",
            value: f,
            domain: "[1, inf)",
        });
    }
    Ok(())
}

/// Key fraction for an externally supplied `tau`:
/// `(1 - delta) [1 - f H(eps / (1 - delta))] - tau`.
pub fn key_rate_with_tau(stats: &ObservedStats, f: f64, tau: f64) -> Result<f64> {
    check_f(f)?;
    let qber = stats.qber();
    if qber > 0.5 + EDGE_TOL {
        return Err(Error::Domain {
            what: "qber",
            value: qber,
            domain: "[0, 1/2]",
        });
    }
    Ok((1.0 - stats.delta) * (1.0 - f * entropy(qber.min(0.5))) - tau)
}

/// Secure key fraction using the closed-form `tau`.
pub fn key_rate(stats: &ObservedStats, f: f64) -> Result<KeyRateResult> {
    check_f(f)?;
    let TauValue { tau, region } = tau_closed_form(stats)?;
    Ok(KeyRateResult {
        tau,
        region,
        r_key: key_rate_with_tau(stats, f, tau)?,
        f_ec: f,
        qber: stats.qber(),
    })
}

/// Key fraction obtained with `tau_low` in place of `tau`; an upper bound on
/// what discarding double clicks can achieve.
pub fn key_rate_upper(stats: &ObservedStats, f: f64) -> Result<f64> {
    key_rate_with_tau(stats, f, tau_low(stats)?)
}

/// CONJECTURED: `1 - 2 H(eps + delta/2)`, the rate expected if double clicks
/// were replaced by random bits. No security proof backs this value.
pub fn conjectured_random_assignment_rate(stats: &ObservedStats) -> Result<f64> {
    let x = stats.eps + stats.delta / 2.0;
    if x > 0.5 + EDGE_TOL {
        return Err(Error::Domain {
            what: "eps + delta/2",
            value: x,
            domain: "[0, 1/2]",
        });
    }
    Ok(1.0 - 2.0 * entropy(x.min(0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(d: f64, e: f64) -> ObservedStats {
        ObservedStats::new(d, e).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        // direct evaluation of -x log2 x - (1-x) log2 (1-x) at 0.11
        let x: f64 = 0.11;
        let direct = -(x * x.ln() + (1.0 - x) * (1.0 - x).ln()) / std::f64::consts::LN_2;
        assert!((binary_entropy(0.11).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 0.4999).abs() < 1e-3);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn g_values() {
        assert_eq!(g(0.0).unwrap(), 0.5);
        assert!(g(1.0 / 3.0).unwrap().abs() < 1e-15);
        let expected = 0.375 - 0.125f64.sqrt();
        assert!((g(0.25).unwrap() - expected).abs() < 1e-15);
        assert!((g(0.25).unwrap() - 0.02145).abs() < 1e-5);
        assert!(g(0.34).is_err());
        assert!(g(-0.01).is_err());
    }

    #[test]
    fn g_is_decreasing() {
        let mut prev = g(0.0).unwrap();
        for i in 1..=1000 {
            let v = g(i as f64 / 3000.0).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn eps1_star_root() {
        let x = eps1_star();
        assert!((16.0 * x * (1.0 - x).powi(3) - 1.0).abs() < 1e-10);
        assert!((x - 0.080).abs() < 5e-4);
        assert!(x < 0.1);
    }

    #[test]
    fn tau_closed_form_anchors() {
        let t = tau_closed_form(&stats(0.0, 0.0)).unwrap();
        assert_eq!(
            t,
            TauValue {
                tau: 0.0,
                region: Region::A
            }
        );
        for d in [0.01, 0.1, 0.2, 0.25] {
            let t = tau_closed_form(&stats(d, 0.0)).unwrap();
            assert!((t.tau - 3.0 * d).abs() < 1e-15);
            let r = key_rate(&stats(d, 0.0), 1.0).unwrap();
            assert!((r.r_key - (1.0 - 4.0 * d)).abs() < 1e-12);
        }
        for e in [0.01, 0.05, eps1_star()] {
            let t = tau_closed_form(&stats(0.0, e)).unwrap();
            assert!((t.tau - entropy(e)).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_is_reported() {
        assert!(matches!(
            tau_closed_form(&stats(0.3, 0.0)),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            tau_closed_form(&stats(0.2, 0.2)),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            tau_closed_form(&stats(0.0, 0.6)),
            Err(Error::Infeasible { .. })
        ));
        assert_eq!(Region::classify(0.1, 0.45), Region::Infeasible);
    }

    #[test]
    fn region_edges_meet_at_one_sixth() {
        let d = 1.0 / 6.0;
        assert!((edge_bc(d) - 1.0 / 12.0).abs() < 1e-15);
        assert!((0.25 - d - 1.0 / 12.0).abs() < 1e-15);
        assert!((g(d).unwrap() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn tau_low_at_zero_delta() {
        for e in [0.01, 0.05, 0.1, 0.3] {
            let (xi, v) = tau_low_argmax(&stats(0.0, e)).unwrap();
            assert!(v >= entropy(e) - 1e-12);
            assert!((v - entropy(e)).abs() < 1e-9);
            assert!(xi < 1e-6, "maximizer {xi}");
        }
    }

    #[test]
    fn tau_low_objective_limits() {
        let d = 0.05;
        let e = g(d).unwrap();
        assert_eq!(tau_low_objective(d, e, 1.0), Some(1.0 - d));
        assert_eq!(tau_low_objective(d, e + 0.01, 1.0), None);
        assert_eq!(tau_low_objective(d, 0.1, 0.1), None);
        let near = tau_low_objective(d, e, 1.0 - 1e-9).unwrap();
        assert!((near - (1.0 - d)).abs() < 1e-6);
    }

    #[test]
    fn key_rate_anchors() {
        let r = key_rate(&stats(0.0, 0.0), 1.0).unwrap();
        assert_eq!(r.r_key, 1.0);
        let r = key_rate(&stats(0.25, 0.0), 1.0).unwrap();
        assert!(r.r_key.abs() < 1e-12);
        let e = eps1_star();
        let r = key_rate(&stats(0.0, e), 1.0).unwrap();
        assert!((r.r_key - (1.0 - 2.0 * entropy(e))).abs() < 1e-12);
        assert!(key_rate(&stats(0.0, 0.0), 0.9).is_err());
        let worse = key_rate(&stats(0.0, 0.03), 1.2).unwrap();
        let better = key_rate(&stats(0.0, 0.03), 1.0).unwrap();
        assert!(worse.r_key < better.r_key);
    }

    #[test]
    fn conjectured_rate() {
        assert_eq!(
            conjectured_random_assignment_rate(&stats(0.0, 0.0)).unwrap(),
            1.0
        );
        let r = conjectured_random_assignment_rate(&stats(0.2, 0.4)).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
        let r = conjectured_random_assignment_rate(&stats(0.1, 0.05)).unwrap();
        assert!((r - (1.0 - 2.0 * entropy(0.1))).abs() < 1e-15);
        assert!(conjectured_random_assignment_rate(&stats(0.2, 0.45)).is_err());
    }

    #[test]
    fn hidden_params_compose() {
        let h = HiddenParams {
            xi: 0.5,
            delta_m: 0.2,
            eps_m: 0.1,
            eps_1: 0.02,
        };
        let (d, e) = h.observed();
        assert!((d - 0.1).abs() < 1e-15);
        assert!((e - 0.06).abs() < 1e-15);
        assert!(h.consistent_with(&stats(0.1, 0.06), 1e-12));
    }

    #[test]
    fn stats_validation() {
        assert!(ObservedStats::new(1.0, 0.0).is_err());
        assert!(ObservedStats::new(0.5, 0.6).is_err());
        assert!(ObservedStats::new(-0.1, 0.0).is_err());
        assert!((stats(0.2, 0.08).qber() - 0.1).abs() < 1e-15);
    }
}
