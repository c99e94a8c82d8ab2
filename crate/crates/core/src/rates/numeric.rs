//! Direct maximization of the privacy-amplification cost over hidden
//! decompositions, used to cross-check the closed form.
//!
//! The multiphoton part is a mixture of a point `(d, g(d))` on the single-pair
//! boundary (weight `1 - mu`) and the odd-odd corner `(1/4, 0)` (weight `mu`).
//! With `d = s^2 / 3` the search runs over the unit square `(s, mu)`; `xi`
//! then follows from `delta = xi delta_m` and `eps_1` from the error balance.
//! A coarse grid locates candidates that are then refined by repeated local
//! zooming. The `xi = 1` edge, where the admissible set pinches to a point,
//! is checked separately.

use super::{entropy, g_unchecked, ObservedStats, Region};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    /// Coarse grid points per axis.
    pub resolution: usize,
    /// Number of best coarse cells refined locally.
    pub candidates: usize,
    /// Stop zooming once the search window is narrower than this.
    pub zoom_floor: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            resolution: 64,
            candidates: 4,
            zoom_floor: 1e-13,
        }
    }
}

/// Objective at `(s, mu)`; `None` when the decomposition is not admissible.
fn objective(delta: f64, eps: f64, s: f64, mu: f64) -> Option<f64> {
    let d_g = s * s / 3.0;
    let delta_m = (1.0 - mu) * d_g + mu * 0.25;
    let eps_m = (1.0 - mu) * g_unchecked(d_g);
    if delta_m <= 0.0 {
        return None;
    }
    let xi = delta / delta_m;
    if xi > 1.0 + 1e-15 {
        return None;
    }
    if xi >= 1.0 - 1e-15 {
        return ((eps - eps_m).abs() <= 1e-12).then_some(1.0 - delta);
    }
    let eps_1 = (eps - xi * eps_m) / (1.0 - xi);
    if !(-1e-15..=0.5).contains(&eps_1) {
        return None;
    }
    Some((1.0 - xi) * entropy(eps_1.max(0.0)) + xi - delta)
}

/// Objective at `(s, 2 eps_1)`. For fixed `eps_1` the corner weight `mu` is
/// linear in the data, so this chart stays wide where `xi` approaches 1.
fn objective_by_eps1(delta: f64, eps: f64, s: f64, v: f64) -> Option<f64> {
    let eps_1 = 0.5 * v;
    let d_g = s * s / 3.0;
    let g_s = g_unchecked(d_g);
    let den = (eps - eps_1) * (0.25 - d_g) + delta * g_s;
    if den.abs() < 1e-300 {
        return None;
    }
    let mu = (delta * (g_s - eps_1) - (eps - eps_1) * d_g) / den;
    if !(0.0..=1.0).contains(&mu) {
        return None;
    }
    let delta_m = (1.0 - mu) * d_g + mu * 0.25;
    if delta_m <= 0.0 {
        return None;
    }
    let xi = delta / delta_m;
    if !(0.0..1.0).contains(&xi) {
        return None;
    }
    Some((1.0 - xi) * entropy(eps_1) + xi - delta)
}

/// One-dimensional case `delta = 0`: only the `(0, 1/2)` end of the
/// boundary can mix with single photons.
fn zero_delta(eps: f64, resolution: usize) -> f64 {
    let f = |xi: f64| -> f64 {
        if xi >= 1.0 {
            return if (eps - 0.5).abs() <= 1e-12 {
                1.0
            } else {
                f64::NEG_INFINITY
            };
        }
        let eps_1 = (eps - xi * 0.5) / (1.0 - xi);
        if (-1e-15..=0.5).contains(&eps_1) {
            (1.0 - xi) * entropy(eps_1.max(0.0)) + xi
        } else {
            f64::NEG_INFINITY
        }
    };
    let n = resolution.max(8);
    let mut best = (0.0, f(0.0));
    for i in 1..=n {
        let x = i as f64 / n as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let mut w = 1.0 / n as f64;
    let mut center = best.0;
    while w > 1e-13 {
        for k in -4..=4 {
            let x = (center + w * k as f64 / 4.0).clamp(0.0, 1.0);
            let v = f(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        center = best.0;
        w *= 0.5;
    }
    best.1
}

fn zoom(
    f: &impl Fn(f64, f64) -> Option<f64>,
    start: (f64, f64, f64),
    width: f64,
    floor: f64,
) -> f64 {
    let (mut cu, mut cv, mut best) = start;
    let mut w = width;
    while w > floor {
        let (mut bu, mut bv) = (cu, cv);
        for i in -4..=4 {
            let u = (cu + w * i as f64 / 4.0).clamp(0.0, 1.0);
            for j in -4..=4 {
                let v = (cv + w * j as f64 / 4.0).clamp(0.0, 1.0);
                if let Some(val) = f(u, v) {
                    if val > best {
                        best = val;
                        bu = u;
                        bv = v;
                    }
                }
            }
        }
        cu = bu;
        cv = bv;
        w *= 0.5;
    }
    best
}

/// Coarse grid over the unit square followed by zooming on the best cells.
/// `None` when no grid point is admissible.
fn search(f: impl Fn(f64, f64) -> Option<f64>, cfg: &NumericConfig) -> Option<f64> {
    let n = cfg.resolution.max(4);
    let step = 1.0 / (n - 1) as f64;
    let mut coarse: Vec<(f64, f64, f64)> = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = i as f64 * step;
        for j in 0..n {
            let v = j as f64 * step;
            if let Some(val) = f(u, v) {
                coarse.push((u, v, val));
            }
        }
    }
    coarse.sort_by(|a, b| b.2.total_cmp(&a.2));
    coarse
        .iter()
        .take(cfg.candidates.max(1))
        .map(|&c| zoom(&f, c, 1.5 * step, cfg.zoom_floor))
        .reduce(f64::max)
}

/// Whether some mixture of a boundary point and the corner reproduces
/// `(delta, eps)` exactly, so that every event may be multiphoton.
fn all_multiphoton(delta: f64, eps: f64, resolution: usize) -> bool {
    // For fixed s the weight mu is pinned by delta; scan s for eps.
    let miss = |s: f64| -> f64 {
        let d_g = s * s / 3.0;
        let mu = if (0.25 - d_g).abs() < 1e-15 {
            0.0
        } else {
            (delta - d_g) / (0.25 - d_g)
        };
        if !(0.0..=1.0).contains(&mu) {
            return f64::INFINITY;
        }
        ((1.0 - mu) * g_unchecked(d_g) - eps).abs()
    };
    let n = resolution.max(8) * 4;
    let mut best = (0.0, miss(0.0));
    for i in 1..=n {
        let s = i as f64 / n as f64;
        let m = miss(s);
        if m < best.1 {
            best = (s, m);
        }
    }
    let mut w = 1.0 / n as f64;
    while w > 1e-15 {
        let c = best.0;
        for k in -4..=4 {
            let s = (c + w * k as f64 / 4.0).clamp(0.0, 1.0);
            let m = miss(s);
            if m < best.1 {
                best = (s, m);
            }
        }
        w *= 0.5;
    }
    best.1 <= 1e-12
}

/// `tau(delta, eps)` by direct search with the given coarse resolution.
pub fn tau_numeric(stats: &ObservedStats, resolution: usize) -> Result<f64> {
    tau_numeric_with(
        stats,
        &NumericConfig {
            resolution,
            ..NumericConfig::default()
        },
    )
}

pub fn tau_numeric_with(stats: &ObservedStats, cfg: &NumericConfig) -> Result<f64> {
    let (delta, eps) = (stats.delta, stats.eps);
    if Region::classify(delta, eps) == Region::Infeasible {
        return Err(Error::Infeasible { delta, eps });
    }
    if delta == 0.0 {
        return Ok(zero_delta(eps, cfg.resolution));
    }

    let by_mu = search(|s, mu| objective(delta, eps, s, mu), cfg);
    let by_eps1 = search(|s, v| objective_by_eps1(delta, eps, s, v), cfg);
    let full = all_multiphoton(delta, eps, cfg.resolution);
    let best = match (by_mu, by_eps1) {
        (None, None) if !full => {
            return Err(Error::Numerical(format!(
                "no admissible decomposition found for ({delta}, {eps})"
            )))
        }
        (a, b) => a.into_iter().chain(b).fold(f64::NEG_INFINITY, f64::max),
    };
    if full {
        return Ok(best.max(1.0 - delta));
    }
    Ok(best)
}
