//! Lower-left boundary of the set `{(<F_dbl>, <F_err>)}` over all states.
//!
//! The set is convex, so every boundary point minimizes `F_err + lambda F_dbl`
//! for some slope `lambda >= 0`. Each slope contributes the expectation pair
//! of a minimum eigenvector; when the minimum eigenvalue is degenerate the
//! slope touches a flat facet and both facet endpoints are emitted.
//!
//! After the initial sweep, each gap between neighbouring samples is bounded
//! by the triangle formed by the chord and the two supporting lines, and a new
//! slope equal to the chord slope is inserted until that bound drops below
//! the configured tolerance.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{HermitianOperator, PairOperators, ParityCase, PhotonPair, TradeoffPoint};
use crate::error::{Error, Result};

/// Queries this close outside the traced range snap to its ends.
const END_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Number of log-spaced slopes between `lambda_min` and `lambda_max`.
    pub num_lambdas: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Stop refining once every chord lies within this distance of the
    /// supporting lines. `None` disables refinement.
    pub refine_tol: Option<f64>,
    /// Refinement never inserts slopes steeper than this.
    pub refine_lambda_cap: f64,
    pub max_samples: usize,
    /// Eigenvalues closer than this (relative to `max(1, lambda)`) are
    /// treated as degenerate.
    pub degeneracy_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            num_lambdas: 200,
            lambda_min: 1e-3,
            lambda_max: 1e3,
            refine_tol: Some(1e-8),
            refine_lambda_cap: 1e8,
            max_samples: 20_000,
            degeneracy_tol: 1e-10,
        }
    }
}

impl SweepConfig {
    /// The fixed part of the sweep: `0`, the log-spaced grid, and `inf`
    /// (pure double-click minimization).
    pub fn schedule(&self) -> Vec<f64> {
        let mut lambdas = vec![0.0];
        let n = self.num_lambdas;
        if n == 1 {
            lambdas.push(self.lambda_min);
        } else if n > 1 {
            let (lo, hi) = (self.lambda_min.ln(), self.lambda_max.ln());
            lambdas.extend((0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()));
        }
        lambdas.push(f64::INFINITY);
        lambdas
    }
}

/// One supporting-hyperplane sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    /// Slope weight on `F_dbl`; infinite for the pure `F_dbl` minimization.
    pub lambda: f64,
    pub point: TradeoffPoint,
    /// `min <F_err + lambda F_dbl>`, or `min <F_dbl>` when `lambda` is infinite.
    pub support: f64,
}

#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub pair: PhotonPair,
    /// Sorted by increasing `delta_m`.
    pub samples: Vec<BoundarySample>,
}

impl BoundaryTrace {
    pub fn points(&self) -> Vec<TradeoffPoint> {
        self.samples.iter().map(|s| s.point).collect()
    }

    /// Piecewise-linear interpolation of the traced boundary at `delta`.
    pub fn interpolate(&self, delta: f64) -> Option<f64> {
        let s = &self.samples;
        let first = s.first()?;
        let last = s.last()?;
        if delta < first.point.delta_m - END_TOL || delta > last.point.delta_m + END_TOL {
            return None;
        }
        let delta = delta.clamp(first.point.delta_m, last.point.delta_m);
        let idx = s.partition_point(|x| x.point.delta_m < delta);
        if idx == 0 {
            return Some(first.point.eps_m);
        }
        let (p, q) = (s[idx - 1].point, s[idx].point);
        let width = q.delta_m - p.delta_m;
        if width <= 0.0 {
            return Some(p.eps_m.min(q.eps_m));
        }
        let t = (delta - p.delta_m) / width;
        Some(p.eps_m + t * (q.eps_m - p.eps_m))
    }

    /// Largest chord-to-support gap over neighbouring samples.
    pub fn max_gap(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| gap(&w[0], &w[1]))
            .fold(0.0, f64::max)
    }
}

/// Upper bound on how far the true boundary can sit below the chord `s`–`t`.
/// `s` has the smaller `delta_m` and therefore the larger slope.
fn gap(s: &BoundarySample, t: &BoundarySample) -> f64 {
    let (p, q) = (s.point, t.point);
    if s.lambda == t.lambda || q.delta_m - p.delta_m <= 1e-15 {
        return 0.0;
    }
    if s.lambda.is_infinite() {
        let eps_q = t.support - t.lambda * p.delta_m;
        return (p.eps_m - eps_q).max(0.0);
    }
    let dq = (s.support - t.support) / (s.lambda - t.lambda);
    let eq = s.support - s.lambda * dq;
    let chord = p.eps_m + (dq - p.delta_m) * (q.eps_m - p.eps_m) / (q.delta_m - p.delta_m);
    (chord - eq).max(0.0)
}

fn state_point(ops: &PairOperators, v: &[f64]) -> TradeoffPoint {
    ops.point_for_state(v)
}

/// Minimizes `primary`, breaking ties inside a degenerate minimum eigenspace
/// by minimizing (and optionally maximizing) `secondary`.
fn lexicographic_extremes(
    primary: &HermitianOperator,
    secondary: &HermitianOperator,
    tol: f64,
    both_ends: bool,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let eig = primary.spectrum()?;
    let m = eig.min_multiplicity(tol);
    if m == 1 {
        return Ok((eig.min(), vec![eig.vector(0).as_slice().to_vec()]));
    }
    let basis: DMatrix<f64> = eig.vectors.columns(0, m).into_owned();
    let restricted = secondary.conjugated(&basis);
    let inner = restricted.spectrum()?;
    let mut out = vec![(&basis * inner.vector(0)).as_slice().to_vec()];
    if both_ends && m > 1 {
        out.push((&basis * inner.vector(m - 1)).as_slice().to_vec());
    }
    Ok((eig.min(), out))
}

fn samples_at(ops: &PairOperators, lambda: f64, cfg: &SweepConfig) -> Result<Vec<BoundarySample>> {
    let (support, vecs) = if lambda.is_infinite() {
        lexicographic_extremes(&ops.dbl, &ops.err, cfg.degeneracy_tol, false)?
    } else {
        let a = ops.err.add(&ops.dbl.scaled(lambda));
        let tol = cfg.degeneracy_tol * lambda.max(1.0);
        lexicographic_extremes(&a, &ops.dbl, tol, lambda > 0.0)?
    };
    Ok(vecs
        .iter()
        .map(|v| BoundarySample {
            lambda,
            point: state_point(ops, v),
            support,
        })
        .collect())
}

fn sort_samples(samples: &mut Vec<BoundarySample>) {
    samples.sort_by(|a, b| {
        a.point
            .delta_m
            .total_cmp(&b.point.delta_m)
            .then(b.point.eps_m.total_cmp(&a.point.eps_m))
            .then(b.lambda.total_cmp(&a.lambda))
    });
    samples.dedup_by(|a, b| {
        (a.point.delta_m - b.point.delta_m).abs() < 1e-15
            && (a.point.eps_m - b.point.eps_m).abs() < 1e-15
    });
}

/// Traces the lower boundary of the achievable `(delta_m, eps_m)` region of
/// a mixed-parity or even-even pair.
pub fn trace_boundary(pair: &PhotonPair, cfg: &SweepConfig) -> Result<BoundaryTrace> {
    match pair.parity_case() {
        ParityCase::Mixed | ParityCase::EvenEven => {}
        ParityCase::OddOdd => {
            return Err(Error::WrongParity {
                n_a: pair.n_a(),
                n_b: pair.n_b(),
                reason: "odd-odd pairs are bounded by the minimum double-click fraction",
            })
        }
        ParityCase::SinglePhoton => {
            return Err(Error::WrongParity {
                n_a: pair.n_a(),
                n_b: pair.n_b(),
                reason: "single-photon pairs have no double clicks",
            })
        }
    }
    let ops = PairOperators::new(pair)?;

    let initial: Vec<Vec<BoundarySample>> = cfg
        .schedule()
        .par_iter()
        .map(|&l| samples_at(&ops, l, cfg))
        .collect::<Result<_>>()?;
    let mut samples: Vec<BoundarySample> = initial.into_iter().flatten().collect();
    sort_samples(&mut samples);

    if let Some(tol) = cfg.refine_tol {
        loop {
            let new_lambdas: Vec<f64> = samples
                .windows(2)
                .filter(|w| gap(&w[0], &w[1]) > tol)
                .filter_map(|w| {
                    let (p, q) = (w[0].point, w[1].point);
                    let slope = (p.eps_m - q.eps_m) / (q.delta_m - p.delta_m);
                    let inside = slope > w[1].lambda * (1.0 + 1e-12) + 1e-15
                        && slope < w[0].lambda * (1.0 - 1e-12);
                    (inside && slope <= cfg.refine_lambda_cap).then_some(slope)
                })
                .collect();
            if new_lambdas.is_empty() || samples.len() >= cfg.max_samples {
                break;
            }
            let fresh: Vec<Vec<BoundarySample>> = new_lambdas
                .par_iter()
                .map(|&l| samples_at(&ops, l, cfg))
                .collect::<Result<_>>()?;
            let before = samples.len();
            samples.extend(fresh.into_iter().flatten());
            sort_samples(&mut samples);
            if samples.len() == before {
                break;
            }
        }
    }

    Ok(BoundaryTrace {
        pair: *pair,
        samples,
    })
}
