//! Eve's explicit attack on odd-even photon pairs.
//!
//! Because `<a_X|b_Z>` depends only on photon-number parity, the eight states
//! `|a_W>_A |b_W>_B` (odd `n_A`, even `n_B`) have the same Gram matrix as
//! `|a_W>_A |(b+a mod 2)_W>_B`. A single orthogonal map `V` therefore acts as
//! a controlled-NOT in both bases at once. Eve entangles a photon with Alice's
//! system, prepares Bob's two photons in `|chi>`, applies `V`, and afterwards
//! knows Alice's bit exactly while `(delta_m, eps_m)` depend on `|chi>` only.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{basis_state, Basis, Bit, PolarizedFockState};
use crate::povm::{
    outcome_projectors, HermitianOperator, PairOperators, PhotonPair, DEFAULT_DIM_CAP,
};

const GRAM_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

/// Pure state of several subsystems, stored row-major (first subsystem is
/// the slowest index).
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    dims: Vec<usize>,
    amplitudes: Vec<f64>,
}

impl JointState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<f64>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if len != amplitudes.len() || dims.is_empty() {
            return Err(Error::Numerical(format!(
                "dims {dims:?} do not match {} amplitudes",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Numerical(format!(
                "joint state norm {norm} is not 1"
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Tensor product of the given factors.
    pub fn product(factors: &[&[f64]]) -> Result<Self> {
        let mut amps = vec![1.0];
        let mut dims = Vec::with_capacity(factors.len());
        for f in factors {
            dims.push(f.len());
            amps = amps
                .iter()
                .flat_map(|a| f.iter().map(move |b| a * b))
                .collect();
        }
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    fn split(&self, prefix: usize) -> (usize, usize) {
        let head: usize = self.dims[..prefix].iter().product();
        (head, self.amplitudes.len() / head)
    }

    /// Applies `u` to the first `prefix` subsystems.
    pub fn apply_to_prefix(&self, prefix: usize, u: &UnitaryMap) -> Result<Self> {
        let (head, tail) = self.split(prefix);
        if u.dim() != head {
            return Err(Error::Numerical(format!(
                "unitary of dim {} applied to subsystems of dim {head}",
                u.dim()
            )));
        }
        let m = DMatrix::from_row_slice(head, tail, &self.amplitudes);
        let out = &u.matrix * m;
        let amplitudes = (0..head)
            .flat_map(|r| (0..tail).map(move |c| (r, c)))
            .map(|(r, c)| out[(r, c)])
            .collect();
        Ok(Self {
            dims: self.dims.clone(),
            amplitudes,
        })
    }

    /// Density matrix of the first `prefix` subsystems.
    pub fn reduced_density(&self, prefix: usize) -> DMatrix<f64> {
        let (head, tail) = self.split(prefix);
        let m = DMatrix::from_row_slice(head, tail, &self.amplitudes);
        &m * m.transpose()
    }
}

/// Real orthogonal map.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMap {
    matrix: DMatrix<f64>,
}

impl UnitaryMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Numerical("unitary must be square".into()));
        }
        let n = matrix.nrows();
        let err = (matrix.transpose() * &matrix - DMatrix::<f64>::identity(n, n)).amax();
        if err > ORTHO_TOL {
            return Err(Error::Numerical(format!("map is not orthogonal: {err:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(v))
            .as_slice()
            .to_vec()
    }
}

/// One of the eight states `V` is pinned on.
#[derive(Debug, Clone)]
pub struct DefiningState {
    pub basis: Basis,
    pub a: Bit,
    pub b: Bit,
    /// `|a_W>_A |b_W>_B`
    pub input: Vec<f64>,
    /// `|a_W>_A |(b+a)_W>_B`
    pub output: Vec<f64>,
}

fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

fn check_odd_even(n_a: usize, n_b: usize) -> Result<PhotonPair> {
    if n_a.is_multiple_of(2) || !n_b.is_multiple_of(2) || n_b < 2 {
        return Err(Error::WrongParity {
            n_a,
            n_b,
            reason: "the controlled-NOT map needs odd n_A and even n_B >= 2",
        });
    }
    PhotonPair::with_cap(n_a, n_b, DEFAULT_DIM_CAP)
}

pub fn defining_states(n_a: usize, n_b: usize) -> Result<Vec<DefiningState>> {
    check_odd_even(n_a, n_b)?;
    let mut out = Vec::with_capacity(8);
    for basis in Basis::ALL {
        for a in Bit::ALL {
            let sa = basis_state(n_a, basis, a)?;
            for b in Bit::ALL {
                let sb = basis_state(n_b, basis, b)?;
                let tb = basis_state(n_b, basis, b.xor(a))?;
                out.push(DefiningState {
                    basis,
                    a,
                    b,
                    input: kron(sa.amplitudes(), sb.amplitudes()),
                    output: kron(sa.amplitudes(), tb.amplitudes()),
                });
            }
        }
    }
    Ok(out)
}

/// Builds `V` with `V |a_W>|b_W> = |a_W>|(b+a)_W>` for both bases.
///
/// Both families span the same subspace and share a Gram matrix
/// `G = U L U^T`, so `Q_in = S U L^{-1/2}` and `Q_out = T U L^{-1/2}` are
/// orthonormal bases of it and `V = Q_out Q_in^T + (1 - Q_in Q_in^T)`.
pub fn build_v(n_a: usize, n_b: usize) -> Result<UnitaryMap> {
    let pair = check_odd_even(n_a, n_b)?;
    let states = defining_states(n_a, n_b)?;
    let d = pair.dim();
    let k = states.len();
    let s = DMatrix::from_fn(d, k, |r, c| states[c].input[r]);
    let t = DMatrix::from_fn(d, k, |r, c| states[c].output[r]);

    let gram_s = s.transpose() * &s;
    let gram_t = t.transpose() * &t;
    let mismatch = (&gram_s - &gram_t).amax();
    if mismatch > GRAM_TOL {
        return Err(Error::Numerical(format!(
            "Gram matrices of source and target differ by {mismatch:e}"
        )));
    }

    let eig = SymmetricEigen::new(gram_s);
    let top = eig.eigenvalues.amax();
    let kept: Vec<usize> = (0..k)
        .filter(|&i| eig.eigenvalues[i] > GRAM_TOL * top)
        .collect();
    let r = kept.len();
    let coeffs = DMatrix::from_fn(k, r, |row, c| {
        eig.eigenvectors[(row, kept[c])] / eig.eigenvalues[kept[c]].sqrt()
    });
    let q_in = &s * &coeffs;
    let q_out = &t * &coeffs;
    let v = &q_out * q_in.transpose() + DMatrix::identity(d, d) - &q_in * q_in.transpose();

    let residual = (&v * &s - &t).amax();
    if residual > GRAM_TOL {
        return Err(Error::Numerical(format!(
            "constructed map misses its defining states by {residual:e}"
        )));
    }
    UnitaryMap::new(v)
}

/// `sum_W alpha |0_W^(n_B)> + beta |1_W^(n_B)>`, normalized.
pub fn boundary_state(alpha: f64, beta: f64, n_b: usize) -> Result<PolarizedFockState> {
    if !n_b.is_multiple_of(2) {
        return Err(Error::WrongParity {
            n_a: 1,
            n_b,
            reason: "Bob's attack state needs an even photon number",
        });
    }
    let mut amps = vec![0.0; n_b + 1];
    for w in Basis::ALL {
        let zero = basis_state(n_b, w, Bit::Zero)?;
        let one = basis_state(n_b, w, Bit::One)?;
        for (i, a) in amps.iter_mut().enumerate() {
            *a += alpha * zero.amplitudes()[i] + beta * one.amplitudes()[i];
        }
    }
    PolarizedFockState::from_amplitudes(amps)
}

/// `|phi+> = (|0_Z>|0_Z> + |1_Z>|1_Z>)/sqrt(2)` on two single photons.
fn phi_plus() -> Vec<f64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let zero = basis_state(1, Basis::Z, Bit::Zero).expect("n = 1");
    let one = basis_state(1, Basis::Z, Bit::One).expect("n = 1");
    kron(zero.amplitudes(), zero.amplitudes())
        .iter()
        .zip(kron(one.amplitudes(), one.amplitudes()))
        .map(|(x, y)| r * (x + y))
        .collect()
}

/// State of Alice's photon, Bob's photons and Eve's photon (in that order)
/// after `V` has been applied.
pub fn attacked_state(chi: &PolarizedFockState) -> Result<JointState> {
    let n_b = chi.photons();
    let v = build_v(1, n_b)?;
    // phi+ lives on (A, E); reorder to (A, B, E).
    let phi = phi_plus();
    let db = chi.dim();
    let mut amps = vec![0.0; 2 * db * 2];
    for a in 0..2 {
        for b in 0..db {
            for e in 0..2 {
                amps[(a * db + b) * 2 + e] = phi[a * 2 + e] * chi.amplitudes()[b];
            }
        }
    }
    JointState::new(vec![2, db, 2], amps)?.apply_to_prefix(2, &v)
}

/// Alice-Bob density matrix produced by the attack, with Eve traced out.
pub fn attack_density(chi: &PolarizedFockState) -> Result<(PhotonPair, DMatrix<f64>)> {
    let pair = PhotonPair::new(1, chi.photons())?;
    Ok((pair, attacked_state(chi)?.reduced_density(2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackOutcome {
    /// `<F_dbl>` over all multiphoton events.
    pub delta_m: f64,
    /// `<F_err>` over all multiphoton events (not conditioned on no double click).
    pub eps_m: f64,
    /// Probability that Eve's same-basis measurement matches Alice's bit,
    /// given that the event is kept.
    pub eve_bit_accuracy: f64,
}

/// Exact outcome statistics of the attack with Bob's state `chi`.
pub fn run_attack(chi: &PolarizedFockState) -> Result<AttackOutcome> {
    let n_b = chi.photons();
    let state = attacked_state(chi)?;
    let pair = PhotonPair::new(1, n_b)?;
    let ops = PairOperators::new(&pair)?;
    let rho = state.reduced_density(2);

    let psi = state.amplitudes();
    let mut agree = 0.0;
    let mut kept = 0.0;
    for w in Basis::ALL {
        let alice = outcome_projectors(1, w)?;
        let bob = outcome_projectors(n_b, w)?;
        let bob_kept = bob.zero.add(&bob.one);
        let eve = outcome_projectors(1, w)?;
        let all_kept = HermitianOperator::identity(2)
            .kron(&bob_kept)
            .kron(&HermitianOperator::identity(2));
        kept += 0.5 * all_kept.expectation(psi);
        for (pa, pe) in [(&alice.zero, &eve.zero), (&alice.one, &eve.one)] {
            let op = pa.kron(&bob_kept).kron(pe);
            agree += 0.5 * op.expectation(psi);
        }
    }
    let eve_bit_accuracy = if kept > 1e-15 { agree / kept } else { 1.0 };

    Ok(AttackOutcome {
        delta_m: ops.dbl.expectation_density(&rho),
        eps_m: ops.err.expectation_density(&rho),
        eve_bit_accuracy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub outcome: AttackOutcome,
}

/// Runs the attack for `(alpha, beta) = (cos theta, sin theta)` at
/// `count` angles evenly spaced in `[0, pi)`; `theta` and `theta + pi` give
/// the same state. Angles where the state vanishes are skipped.
pub fn sweep(count: usize) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let theta = PI * i as f64 / count as f64;
        let (alpha, beta) = (theta.cos(), theta.sin());
        match boundary_state(alpha, beta, 2) {
            Ok(chi) => out.push(SweepPoint {
                theta,
                alpha,
                beta,
                outcome: run_attack(&chi)?,
            }),
            Err(Error::ZeroState) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Angle along the part of the circle that traces `eps_m = g(delta_m)`:
/// `t = 0` is `alpha = beta` (`delta_m = 0`) and increasing `t` rotates
/// towards `delta_m = 1/3`.
fn branch_state(t: f64) -> Result<PolarizedFockState> {
    let theta = PI / 4.0 - t;
    boundary_state(theta.cos(), theta.sin(), 2)
}

/// End of the boundary branch, where `delta_m` first reaches 1/3.
fn branch_end() -> Result<f64> {
    let dm = |t: f64| -> Result<f64> { Ok(run_attack(&branch_state(t)?)?.delta_m) };
    // delta_m rises monotonically from 1/6 at t = pi/4 to 1/2 at t = pi/2.
    let (mut lo, mut hi) = (PI / 4.0, PI / 2.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if dm(mid)? < 1.0 / 3.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(alpha, beta)` whose attack gives double-click fraction `target` on the
/// boundary, for `0 <= target <= 1/3`.
pub fn chi_for_double_click(target: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0 / 3.0).contains(&target) {
        return Err(Error::Domain {
            what: "delta_m",
            value: target,
            domain: "[0, 1/3]",
        });
    }
    if target == 0.0 {
        // delta_m grows like t^2 here, so bisection would stall in round-off.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        return Ok((r, r));
    }
    let end = branch_end()?;
    let (mut lo, mut hi) = (0.0, end);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if run_attack(&branch_state(mid)?)?.delta_m < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = PI / 4.0 - 0.5 * (lo + hi);
    Ok((theta.cos(), theta.sin()))
}
