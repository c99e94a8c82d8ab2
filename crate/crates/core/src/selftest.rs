//! Fast runtime checks of the library's core invariants, reduced in size so
//! the whole suite finishes in a few seconds.

use std::time::Instant;

use crate::attack::{build_v, defining_states, sweep};
use crate::error::Result;
use crate::fock::{
    basis_state, fundamental_overlap, inner_product, multimode_inner_product, Basis, Bit,
    ModePartition,
};
use crate::povm::{
    min_double_click, min_double_click_closed_form, random_state_points,
    region_membership_with_slack, trace_boundary, ParityCase, PhotonPair, SweepConfig,
};
use crate::rates::{
    eps1_star, g, key_rate, key_rate_upper, tau_closed_form, tau_low, tau_numeric, ObservedStats,
    Region,
};
use crate::sim::{run_protocol, SourceModel};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn overlap_law() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        for b in Bit::ALL {
            for bp in Bit::ALL {
                let x = basis_state(n, Basis::X, b)?;
                let z = basis_state(n, Basis::Z, bp)?;
                let sign = if b.value() * bp.value() * (n as u8 % 2) == 1 {
                    -1.0
                } else {
                    1.0
                };
                let want = sign * 2f64.powf(-(n as f64) / 2.0);
                worst = worst.max((inner_product(&x, &z)? - want).abs());
                worst = worst.max((fundamental_overlap(n, b, bp) - want).abs());
            }
        }
    }
    for parts in [
        vec![1, 1, 1],
        vec![2, 3],
        vec![1, 2, 3],
        vec![2, 2, 2],
        vec![1, 5],
    ] {
        let p = ModePartition::new(parts)?;
        for b in Bit::ALL {
            for bp in Bit::ALL {
                let m = multimode_inner_product(&p, Basis::X, b, Basis::Z, bp)?;
                worst = worst.max((m - fundamental_overlap(p.total(), b, bp)).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

fn odd_odd() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut lowest = f64::INFINITY;
    for a in (1..=8).step_by(2) {
        for b in (1..=8).step_by(2) {
            if a + b > 9 || a + b < 3 {
                continue;
            }
            let pair = PhotonPair::new(a, b)?;
            let m = min_double_click(&pair)?;
            worst = worst.max((m - min_double_click_closed_form(&pair)?).abs());
            lowest = lowest.min(m);
        }
    }
    Ok((
        worst <= 1e-9 && lowest >= 0.25 - 1e-9,
        format!("max deviation {worst:.2e}, smallest {lowest:.6}"),
    ))
}

fn boundary() -> Result<(bool, String)> {
    let cfg = SweepConfig::default();
    let trace = trace_boundary(&PhotonPair::new(1, 2)?, &cfg)?;
    let mut worst: f64 = 0.0;
    for s in &trace.samples {
        if s.point.delta_m <= 1.0 / 3.0 {
            worst = worst.max((s.point.eps_m - g(s.point.delta_m)?).abs());
        }
    }
    let mut below: f64 = 0.0;
    for (a, b) in [(2, 2), (1, 4)] {
        for s in trace_boundary(&PhotonPair::new(a, b)?, &cfg)?.samples {
            let p = s.point;
            if p.delta_m <= 1.0 / 3.0 {
                below = below.max(g(p.delta_m)? - p.eps_m);
            }
        }
    }
    Ok((
        worst <= 1e-5 && below <= 1e-8,
        format!("(1,2) max |eps - g| {worst:.2e}; (2,2),(1,4) max dip below g {below:.2e}"),
    ))
}

fn eps1() -> Result<(bool, String)> {
    let x = eps1_star();
    let r = 16.0 * x * (1.0 - x).powi(3) - 1.0;
    Ok((
        r.abs() <= 1e-10 && (x - 0.080).abs() <= 5e-4,
        format!("{x:.12}, residual {r:.1e}"),
    ))
}

fn tau() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut dominance = true;
    let k = 10;
    for i in 0..k {
        for j in 0..k {
            let d = 0.25 * i as f64 / k as f64;
            let e = 0.5 * j as f64 / k as f64;
            let Ok(s) = ObservedStats::new(d, e) else {
                continue;
            };
            if s.region() == Region::Infeasible {
                continue;
            }
            let closed = tau_closed_form(&s)?.tau;
            worst = worst.max((closed - tau_numeric(&s, 64)?).abs());
            dominance &= closed >= tau_low(&s)? - 1e-9;
        }
    }
    Ok((
        worst <= 1e-5 && dominance,
        format!("max |closed - numeric| {worst:.2e}"),
    ))
}

fn key_rates() -> Result<(bool, String)> {
    let origin = key_rate(&ObservedStats::new(0.0, 0.0)?, 1.0)?.r_key;
    let mut worst: f64 = 0.0;
    let mut upper_ok = true;
    for i in 0..=24 {
        let d = 0.01 * i as f64;
        let s = ObservedStats::new(d, 0.0)?;
        let r = key_rate(&s, 1.0)?.r_key;
        worst = worst.max((r - (1.0 - 4.0 * d)).abs());
        upper_ok &= key_rate_upper(&s, 1.0)? >= r - 1e-9;
    }
    Ok((
        origin == 1.0 && worst <= 1e-12 && upper_ok,
        format!("R(0,0) = {origin}, max |R(d,0) - (1-4d)| {worst:.2e}"),
    ))
}

fn attack() -> Result<(bool, String)> {
    let v = build_v(1, 2)?;
    let mut v_err: f64 = 0.0;
    for s in defining_states(1, 2)? {
        let out = v.apply(&s.input);
        v_err = v_err.max(
            out.iter()
                .zip(&s.output)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        );
    }
    let points = sweep(360)?;
    let mut below: f64 = 0.0;
    let mut acc: f64 = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &points {
        let o = p.outcome;
        acc = acc.max((o.eve_bit_accuracy - 1.0).abs());
        if o.delta_m <= 1.0 / 3.0 + 1e-12 {
            let gap = o.eps_m - g(o.delta_m.clamp(0.0, 1.0 / 3.0))?;
            below = below.max(-gap);
            if gap.abs() <= 1e-5 {
                lo = lo.min(o.delta_m);
                hi = hi.max(o.delta_m);
            }
        }
    }
    Ok((
        v_err <= 1e-10 && acc <= 1e-12 && below <= 1e-9 && lo <= 1e-3 && hi >= 1.0 / 3.0 - 1e-2,
        format!(
            "V error {v_err:.1e}, accuracy error {acc:.1e}, on-curve delta_m in [{lo:.4}, {hi:.4}]"
        ),
    ))
}

fn monte_carlo() -> Result<(bool, String)> {
    let n = 200_000;
    let ideal = run_protocol(&SourceModel::ideal_pair(), n, 1)?;
    let v = 0.9;
    let w = run_protocol(&SourceModel::werner(v)?, n, 2)?;
    let z = (w.eps_hat() - (1.0 - v) / 2.0) / w.eps_se();
    let again = run_protocol(&SourceModel::werner(v)?, n, 2)?;
    Ok((
        ideal.n_dbl == 0 && ideal.n_err == 0 && z.abs() <= 5.0 && again == w,
        format!("werner {v}: eps_hat {:.5} ({z:+.2} se)", w.eps_hat()),
    ))
}

fn soundness() -> Result<(bool, String)> {
    let mut outside = 0;
    let mut total = 0;
    for a in 1..=5 {
        for b in 1..=5 {
            let pair = PhotonPair::new(a, b)?;
            if pair.dim() > 36 || pair.parity_case() == ParityCase::SinglePhoton {
                continue;
            }
            for p in random_state_points(&pair, 500, (a * 10 + b) as u64)? {
                total += 1;
                if !region_membership_with_slack(p, 1e-8) {
                    outside += 1;
                }
            }
        }
    }
    Ok((
        outside == 0,
        format!("{outside} of {total} random states outside the region"),
    ))
}

/// Runs every check; the list is in a fixed order.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("overlap_law", overlap_law),
        check("odd_odd_min_double_click", odd_odd),
        check("tradeoff_boundary", boundary),
        check("eps1_star", eps1),
        check("tau_consistency", tau),
        check("key_rate_anchors", key_rates),
        check("attack_saturation", attack),
        check("monte_carlo", monte_carlo),
        check("soundness_sampling", soundness),
    ]
}
