use bbm92_core::attack::{boundary_state, build_v, chi_for_double_click, run_attack, sweep};
use bbm92_core::fock::{Basis, Bit, PolarizedFockState};
use bbm92_core::povm::{PairOperators, PhotonPair};
use bbm92_core::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn g(d: f64) -> f64 {
    (1.0 - d) / 2.0 - (d * (1.0 - 2.0 * d)).sqrt()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `(a_H + s a_V)^n |vac> / sqrt(2^n n!)` in the occupation basis indexed by
/// the number of H photons, with `s = -1` for bit 1.
fn fock(n: usize, w: Basis, b: Bit) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    match w {
        Basis::Z => v[if b == Bit::Zero { n } else { 0 }] = 1.0,
        Basis::X => {
            let s: f64 = if b == Bit::Zero { 1.0 } else { -1.0 };
            let norm = (2f64.powi(n as i32) * factorial(n)).sqrt();
            for (k, x) in v.iter_mut().enumerate() {
                let binom = factorial(n) / (factorial(k) * factorial(n - k));
                // a_H^k a_V^(n-k) |vac> = sqrt(k! (n-k)!) |k, n-k>
                *x = binom * s.powi((n - k) as i32) * (factorial(k) * factorial(n - k)).sqrt()
                    / norm;
            }
        }
    }
    v
}

fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn projector(v: &[f64]) -> DMatrix<f64> {
    let c = DMatrix::from_column_slice(v.len(), 1, v);
    &c * c.transpose()
}

#[test]
fn v_maps_every_defining_state() {
    for (na, nb) in [(1, 2), (1, 4), (3, 2)] {
        let v = build_v(na, nb).unwrap();
        let m = v.matrix();
        let d = m.nrows();
        assert!((m.transpose() * m - DMatrix::identity(d, d)).amax() <= 1e-10);
        // one matrix, both bases
        for w in [Basis::Z, Basis::X] {
            for a in Bit::ALL {
                for b in Bit::ALL {
                    let input = kron(&fock(na, w, a), &fock(nb, w, b));
                    let want = kron(&fock(na, w, a), &fock(nb, w, b.xor(a)));
                    let err = max_diff(&v.apply(&input), &want);
                    assert!(err <= 1e-10, "({na},{nb}) {w:?} a={a:?} b={b:?}: {err:e}");
                }
            }
        }
    }
}

#[test]
fn v_examples_on_one_two() {
    let v = build_v(1, 2).unwrap();
    let z0 = kron(&fock(1, Basis::Z, Bit::Zero), &fock(2, Basis::Z, Bit::Zero));
    assert!(max_diff(&v.apply(&z0), &z0) <= 1e-10);
    let z10 = kron(&fock(1, Basis::Z, Bit::One), &fock(2, Basis::Z, Bit::Zero));
    let z11 = kron(&fock(1, Basis::Z, Bit::One), &fock(2, Basis::Z, Bit::One));
    assert!(max_diff(&v.apply(&z10), &z11) <= 1e-10);
    let x10 = kron(&fock(1, Basis::X, Bit::One), &fock(2, Basis::X, Bit::Zero));
    let x11 = kron(&fock(1, Basis::X, Bit::One), &fock(2, Basis::X, Bit::One));
    assert!(max_diff(&v.apply(&x10), &x11) <= 1e-10);
}

#[test]
fn wrong_parity_is_rejected() {
    for (na, nb) in [(2, 2), (1, 3), (2, 1), (1, 0)] {
        assert!(build_v(na, nb).is_err(), "({na},{nb})");
    }
    assert!(matches!(boundary_state(0.0, 0.0, 2), Err(Error::ZeroState)));
    assert!(boundary_state(1.0, 0.0, 3).is_err());
}

/// Conjugating by the controlled-NOT leaves Alice's qubit alone:
/// `V^T F_err V = 1 (x) (P(1_Z) + P(1_X)) / 2`, and likewise for `F_cor`
/// with bit 0.
#[test]
fn conjugated_operators_act_only_on_bob() {
    for nb in [2, 4] {
        let v = build_v(1, nb).unwrap();
        let m = v.matrix();
        let ops = PairOperators::new(&PhotonPair::new(1, nb).unwrap()).unwrap();
        let sigma_x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let flip = sigma_x.kronecker(&DMatrix::identity(nb + 1, nb + 1));
        for (op, bit) in [(&ops.err, Bit::One), (&ops.cor, Bit::Zero)] {
            let conj = m.transpose() * op.matrix() * m;
            let bob =
                (projector(&fock(nb, Basis::Z, bit)) + projector(&fock(nb, Basis::X, bit))) * 0.5;
            let want = DMatrix::<f64>::identity(2, 2).kronecker(&bob);
            assert!((&conj - &want).amax() <= 1e-10, "n_B={nb} {bit:?}");
            let comm = &conj * &flip - &flip * &conj;
            assert!(comm.amax() <= 1e-9, "n_B={nb} {bit:?}");
        }
    }
}

#[test]
fn boundary_state_examples() {
    for (a, b, bit) in [(1.0, 0.0, Bit::Zero), (0.0, 1.0, Bit::One)] {
        let raw: Vec<f64> = fock(2, Basis::Z, bit)
            .iter()
            .zip(fock(2, Basis::X, bit))
            .map(|(x, y)| x + y)
            .collect();
        let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let want: Vec<f64> = raw.iter().map(|x| x / n).collect();
        let got = boundary_state(a, b, 2).unwrap();
        assert!(max_diff(got.amplitudes(), &want) <= 1e-12);
    }
}

#[test]
fn endpoints_of_the_boundary() {
    let (a, b) = chi_for_double_click(0.0).unwrap();
    let o = run_attack(&boundary_state(a, b, 2).unwrap()).unwrap();
    assert!(
        o.delta_m.abs() <= 1e-12 && (o.eps_m - 0.5).abs() <= 1e-12,
        "{o:?}"
    );
    assert!((o.eve_bit_accuracy - 1.0).abs() <= 1e-12);

    let (a, b) = chi_for_double_click(1.0 / 3.0).unwrap();
    let o = run_attack(&boundary_state(a, b, 2).unwrap()).unwrap();
    assert!(
        (o.delta_m - 1.0 / 3.0).abs() <= 1e-9 && o.eps_m.abs() <= 1e-6,
        "{o:?}"
    );
    assert!((o.eve_bit_accuracy - 1.0).abs() <= 1e-12);
}

#[test]
fn pure_bit_states_land_on_mirrored_edges() {
    // alpha only: lower edge
    let o = run_attack(&boundary_state(1.0, 0.0, 2).unwrap()).unwrap();
    assert!((o.eps_m - g(o.delta_m)).abs() <= 1e-9, "{o:?}");
    assert!((o.eve_bit_accuracy - 1.0).abs() <= 1e-12);
    // beta only: flipping Alice's bit swaps F_err and F_cor, so this lands on
    // eps = 1 - delta - g(delta)
    let o = run_attack(&boundary_state(0.0, 1.0, 2).unwrap()).unwrap();
    assert!(
        (o.delta_m - 1.0 / 6.0).abs() <= 1e-9 && (o.eps_m - 0.75).abs() <= 1e-9,
        "{o:?}"
    );
    assert!((o.eps_m - (1.0 - o.delta_m - g(o.delta_m))).abs() <= 1e-9);
    assert!((o.eve_bit_accuracy - 1.0).abs() <= 1e-12);
}

#[test]
fn targets_along_the_boundary() {
    for i in 0..=40 {
        let target = i as f64 / 120.0;
        let (a, b) = chi_for_double_click(target).unwrap();
        let o = run_attack(&boundary_state(a, b, 2).unwrap()).unwrap();
        assert!((o.delta_m - target).abs() <= 1e-9, "{target}: {o:?}");
        assert!((o.eps_m - g(target)).abs() <= 1e-5, "{target}: {o:?}");
    }
}

#[test]
fn dense_sweep_saturates_and_never_undercuts() {
    let points = sweep(3600).unwrap();
    assert_eq!(points.len(), 3600);
    let mut on_curve = Vec::new();
    for p in &points {
        let o = p.outcome;
        assert!(
            (o.eve_bit_accuracy - 1.0).abs() <= 1e-12,
            "theta {}",
            p.theta
        );
        if o.delta_m <= 1.0 / 3.0 {
            let gap = o.eps_m - g(o.delta_m.max(0.0));
            assert!(gap >= -1e-9, "theta {}: {gap:e}", p.theta);
            if gap <= 1e-5 {
                on_curve.push(o.delta_m);
            }
        } else {
            assert!(o.eps_m >= -1e-12);
        }
    }
    on_curve.sort_by(f64::total_cmp);
    let widest = on_curve.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    assert!(on_curve[0] <= 1e-3, "{}", on_curve[0]);
    assert!(on_curve[on_curve.len() - 1] >= 1.0 / 3.0 - 1e-3);
    assert!(widest <= 1e-2, "{widest}");
}

proptest! {
    #[test]
    fn any_bob_state_respects_the_bound(
        amps in prop::array::uniform3(-1.0f64..1.0)
    ) {
        prop_assume!(amps.iter().map(|x| x * x).sum::<f64>() > 1e-6);
        let chi = PolarizedFockState::from_amplitudes(amps.to_vec()).unwrap();
        let o = run_attack(&chi).unwrap();
        prop_assert!((o.eve_bit_accuracy - 1.0).abs() <= 1e-12);
        if o.delta_m <= 1.0 / 3.0 {
            prop_assert!(o.eps_m >= g(o.delta_m.max(0.0)) - 1e-9, "{:?}", o);
        }
        prop_assert!((o.delta_m + o.eps_m) <= 1.0 + 1e-12);
    }
}
