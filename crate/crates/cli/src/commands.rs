//! One function per subcommand, each producing a [`Table`].

use std::f64::consts::PI;

use bbm92_core::attack::{boundary_state, run_attack, sweep, AttackOutcome};
use bbm92_core::povm::{
    min_double_click, min_double_click_closed_form, random_state_points,
    region_membership_with_slack, trace_boundary, PairOperators, ParityCase, PhotonPair,
    SweepConfig,
};
use bbm92_core::rates::{
    conjectured_random_assignment_rate, g, key_rate, key_rate_upper, tau_closed_form, tau_low,
    tau_numeric, ObservedStats,
};
use bbm92_core::sim::{end_to_end, SourceModel};
use bbm92_core::{selftest, Error};

use crate::args::{AttackArgs, KeyrateArgs, SelftestArgs, SimulateArgs, TauArgs, TradeoffArgs};
use crate::output::{Cell, Table};
use crate::CliError;

/// Membership slack for random states and boundary points.
const REGION_SLACK: f64 = 1e-8;
/// Distance from `g` below which an attack point counts as on the curve.
const ON_CURVE_TOL: f64 = 1e-5;

/// Stats for a scalar query; infeasible or out-of-range input is an error.
fn scalar_stats(delta: f64, eps: f64) -> Result<ObservedStats, CliError> {
    let s = ObservedStats::new(delta, eps)?;
    if !s.tau_feasible() {
        return Err(Error::Infeasible { delta, eps }.into());
    }
    Ok(s)
}

pub fn tau(args: &TauArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&[
        "delta",
        "eps",
        "tau_closed",
        "tau_numeric",
        "tau_low",
        "region",
    ]);
    let scalar = args.point.is_scalar();
    for (d, e) in args.point.points() {
        let stats = if scalar {
            Some(scalar_stats(d, e)?)
        } else {
            ObservedStats::new(d, e).ok().filter(|s| s.tau_feasible())
        };
        let Some(s) = stats else {
            t.push(vec![
                d.into(),
                e.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                "infeasible".into(),
            ]);
            continue;
        };
        let closed = tau_closed_form(&s)?;
        let numeric = tau_numeric(&s, args.resolution)?;
        t.push(vec![
            d.into(),
            e.into(),
            closed.tau.into(),
            numeric.into(),
            tau_low(&s).ok().into(),
            closed.region.to_string().into(),
        ]);
    }
    Ok(t)
}

pub fn keyrate(args: &KeyrateArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&[
        "delta",
        "eps",
        "region",
        "tau",
        "r_key",
        "r_upper",
        "r_conjectured",
    ]);
    let scalar = args.point.is_scalar();
    if !args.f.is_finite() || args.f < 1.0 {
        return Err(CliError::Usage(format!(
            "--f must be a finite number >= 1, got {}",
            args.f
        )));
    }
    for (d, e) in args.point.points() {
        let stats = if scalar {
            Some(scalar_stats(d, e)?)
        } else {
            ObservedStats::new(d, e).ok().filter(|s| s.tau_feasible())
        };
        let Some(s) = stats else {
            t.push(vec![
                d.into(),
                e.into(),
                "infeasible".into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
            continue;
        };
        let r = key_rate(&s, args.f)?;
        t.push(vec![
            d.into(),
            e.into(),
            r.region.to_string().into(),
            r.tau.into(),
            r.r_key.into(),
            key_rate_upper(&s, args.f).ok().into(),
            conjectured_random_assignment_rate(&s).ok().into(),
        ]);
    }
    Ok(t)
}

fn g_opt(delta: f64) -> Option<f64> {
    (0.0..=1.0 / 3.0)
        .contains(&delta)
        .then(|| g(delta).ok())
        .flatten()
}

pub fn tradeoff(args: &TradeoffArgs) -> Result<Table, CliError> {
    let pair = PhotonPair::new(args.na, args.nb)?;
    let points = random_state_points(&pair, args.samples, args.seed)?;
    let inside = points
        .iter()
        .filter(|p| region_membership_with_slack(**p, REGION_SLACK))
        .count();

    match pair.parity_case() {
        ParityCase::OddOdd | ParityCase::SinglePhoton => {
            let (min, closed) = if pair.parity_case() == ParityCase::OddOdd {
                (
                    min_double_click(&pair)?,
                    Some(min_double_click_closed_form(&pair)?),
                )
            } else {
                let ops = PairOperators::new(&pair)?;
                (1.0 - ops.cor.add(&ops.err).max_eigenvalue()?, None)
            };
            eprintln!("min delta_m = {}", Cell::Float(min));
            if pair.parity_case() == ParityCase::OddOdd {
                eprintln!("random states inside region: {inside} of {}", points.len());
            }
            let mut t = Table::new(&["n_a", "n_b", "min_double_click", "closed_form"]);
            t.push(vec![
                args.na.into(),
                args.nb.into(),
                min.into(),
                closed.into(),
            ]);
            Ok(t)
        }
        ParityCase::Mixed | ParityCase::EvenEven => {
            let cfg = SweepConfig {
                num_lambdas: args.resolution,
                ..SweepConfig::default()
            };
            let trace = trace_boundary(&pair, &cfg)?;
            let mut t = Table::new(&["lambda", "delta_m", "eps_m", "g", "deviation"]);
            let (mut max_dev, mut min_dev) = (0.0f64, f64::INFINITY);
            for s in &trace.samples {
                let p = s.point;
                let gv = g_opt(p.delta_m);
                let dev = gv.map(|gv| p.eps_m - gv);
                if let Some(d) = dev {
                    max_dev = max_dev.max(d.abs());
                    min_dev = min_dev.min(d);
                }
                t.push(vec![
                    s.lambda.into(),
                    p.delta_m.into(),
                    p.eps_m.into(),
                    gv.into(),
                    dev.into(),
                ]);
            }
            eprintln!("boundary samples: {}", trace.samples.len());
            eprintln!(
                "max |eps_m - g(delta_m)| over delta_m in [0, 1/3]: {:.3e}",
                max_dev
            );
            eprintln!(
                "min eps_m - g(delta_m): {:.3e} (all points >= g within {REGION_SLACK:e}: {})",
                min_dev,
                if min_dev >= -REGION_SLACK {
                    "yes"
                } else {
                    "no"
                }
            );
            eprintln!("random states inside region: {inside} of {}", points.len());
            Ok(t)
        }
    }
}

/// Which edge of the achievable region a point sits on: `lower` is
/// `eps_m = g(delta_m)`, `upper` its mirror `eps_m = 1 - delta_m - g(delta_m)`
/// obtained by flipping Alice's bit.
fn edge_label(delta_m: f64, eps_m: f64) -> &'static str {
    match g_opt(delta_m) {
        Some(gv) if (eps_m - gv).abs() <= ON_CURVE_TOL => "lower",
        Some(gv) if (eps_m - (1.0 - delta_m - gv)).abs() <= ON_CURVE_TOL => "upper",
        _ => "interior",
    }
}

fn attack_row(theta: f64, alpha: f64, beta: f64, o: &AttackOutcome) -> Vec<Cell> {
    let gv = g_opt(o.delta_m);
    vec![
        theta.into(),
        alpha.into(),
        beta.into(),
        o.delta_m.into(),
        o.eps_m.into(),
        gv.into(),
        gv.map(|gv| o.eps_m - gv).into(),
        edge_label(o.delta_m, o.eps_m).into(),
        o.eve_bit_accuracy.into(),
    ]
}

const ATTACK_COLUMNS: [&str; 9] = [
    "theta",
    "alpha",
    "beta",
    "delta_m",
    "eps_m",
    "g",
    "deviation",
    "edge",
    "eve_accuracy",
];

pub fn attack(args: &AttackArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&ATTACK_COLUMNS);
    if !args.sweep {
        let (a, b) = (args.alpha.unwrap_or(0.0), args.beta.unwrap_or(0.0));
        let out = run_attack(&boundary_state(a, b, 2)?)?;
        t.push(attack_row(b.atan2(a).rem_euclid(PI), a, b, &out));
        return Ok(t);
    }
    if args.resolution == 0 {
        return Err(CliError::Usage("--resolution must be at least 1".into()));
    }
    let points = sweep(args.resolution)?;
    let mut on_curve: Vec<f64> = Vec::new();
    let mut worst_acc = 0.0f64;
    for p in &points {
        t.push(attack_row(p.theta, p.alpha, p.beta, &p.outcome));
        worst_acc = worst_acc.max((p.outcome.eve_bit_accuracy - 1.0).abs());
        if let Some(gv) = g_opt(p.outcome.delta_m) {
            if (p.outcome.eps_m - gv).abs() <= ON_CURVE_TOL {
                on_curve.push(p.outcome.delta_m);
            }
        }
    }
    on_curve.sort_by(f64::total_cmp);
    let max_gap = on_curve.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if let (Some(lo), Some(hi)) = (on_curve.first(), on_curve.last()) {
        eprintln!(
            "boundary coverage: {} of {} points on g, delta_m in [{lo:.6}, {hi:.6}], largest gap {max_gap:.3e}",
            on_curve.len(),
            points.len()
        );
    } else {
        eprintln!("boundary coverage: no points on g");
    }
    eprintln!("max |eve_accuracy - 1|: {worst_acc:.3e}");
    Ok(t)
}

pub fn parse_source(text: &str) -> Result<SourceModel, CliError> {
    let bad = |why: &str| CliError::Core(Error::InvalidSource(format!("{text:?}: {why}")));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    match kind {
        "ideal" if rest.is_empty() => Ok(SourceModel::ideal_pair()),
        "werner" => Ok(SourceModel::werner(num(rest)?)?),
        "attack" => {
            let v: Vec<&str> = rest.split(',').collect();
            let [a, b, xi] = v.as_slice() else {
                return Err(bad("expected attack:<alpha>,<beta>,<xi>"));
            };
            let chi = boundary_state(num(a)?, num(b)?, 2)?;
            Ok(SourceModel::eve_attack(chi, num(xi)?)?)
        }
        _ => Err(bad(
            "expected ideal, werner:<v> or attack:<alpha>,<beta>,<xi>",
        )),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<Table, CliError> {
    let source = parse_source(&args.source)?;
    if args.events == 0 {
        return Err(CliError::Usage("--events must be at least 1".into()));
    }
    let r = end_to_end(&source, args.events, args.f, args.seed)?;
    let tl = &r.tally;
    let mut t = Table::new(&[
        "source",
        "seed",
        "events",
        "n",
        "n_dbl",
        "n_err",
        "n_cor",
        "mismatched_bases",
        "undetected",
        "delta_hat",
        "delta_se",
        "eps_hat",
        "eps_se",
        "delta_exact",
        "eps_exact",
        "region",
        "r_key_sampled",
        "r_key_exact",
        "r_key_difference",
        "r_upper_exact",
        "r_conjectured_sampled",
        "issue",
    ]);
    let (de, ee) = r.analytic.map_or((None, None), |(d, e)| (Some(d), Some(e)));
    let has_n = tl.n > 0;
    t.push(vec![
        args.source.as_str().into(),
        args.seed.into(),
        tl.total_events.into(),
        tl.n.into(),
        tl.n_dbl.into(),
        tl.n_err.into(),
        tl.n_cor.into(),
        tl.mismatched_bases.into(),
        tl.undetected.into(),
        has_n.then(|| tl.delta_hat()).into(),
        has_n.then(|| tl.delta_se()).into(),
        has_n.then(|| tl.eps_hat()).into(),
        has_n.then(|| tl.eps_se()).into(),
        de.into(),
        ee.into(),
        r.sampled_region().to_string().into(),
        r.sampled_rate.map(|k| k.r_key).into(),
        r.analytic_rate.map(|k| k.r_key).into(),
        r.difference.into(),
        r.analytic_upper_rate.into(),
        r.conjectured_rate.into(),
        r.sampled_issue.clone().map_or(Cell::Empty, Cell::Text),
    ]);
    Ok(t)
}

pub fn selftest(_args: &SelftestArgs) -> Result<(Table, bool), CliError> {
    let mut t = Table::new(&["check", "passed", "detail"]);
    let mut all = true;
    for c in selftest::run_all() {
        eprintln!(
            "{} {}: {} ({:.2}s)",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail,
            c.seconds
        );
        all &= c.passed;
        t.push(vec![c.name.into(), c.passed.into(), c.detail.into()]);
    }
    Ok((t, all))
}
