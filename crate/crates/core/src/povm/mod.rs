//! Joint measurement operators for a fixed photon-number pair `(n_A, n_B)`
//! and the trade-off region they imply between double clicks and bit errors.
//!
//! For each pair the two parties' threshold-detector measurements reduce to
//! three joint POVM elements on the `(n_A+1)(n_B+1)` dimensional space:
//!
//! ```text
//!   F_err = 1/2 sum_W sum_b P(|b_W>_A |1-b_W>_B)
//!   F_cor = 1/2 sum_W sum_b P(|b_W>_A |b_W>_B)
//!   F_dbl = 1 - F_cor - F_err
//! ```
//!
//! A state `rho` produces the multiphoton double-click and error fractions
//! `(delta_m, eps_m) = (<F_dbl>, <F_err>)`.

mod boundary;
mod operator;

pub use boundary::{trace_boundary, BoundarySample, BoundaryTrace, SweepConfig};
pub use operator::{HermitianOperator, Spectrum};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fock::{basis_state, Basis, Bit, MAX_PHOTONS};
use crate::rates;

/// Default cap on the joint dimension `(n_A+1)(n_B+1)`.
pub const DEFAULT_DIM_CAP: usize = 64;

/// Photon numbers reaching Alice's and Bob's apparatus in one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhotonPair {
    n_a: usize,
    n_b: usize,
}

/// Parity class of a photon pair, which decides the form of the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityCase {
    /// `n_A = n_B = 1`; no double clicks are possible.
    SinglePhoton,
    /// Both odd with `n_A + n_B >= 3`.
    OddOdd,
    /// One odd, one even.
    Mixed,
    /// Both even.
    EvenEven,
}

impl PhotonPair {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        Self::with_cap(n_a, n_b, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(n_a: usize, n_b: usize, cap: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::ZeroPhotons);
        }
        if n_a.max(n_b) > MAX_PHOTONS {
            return Err(Error::TooManyPhotons(n_a.max(n_b)));
        }
        let dim = (n_a + 1) * (n_b + 1);
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        Ok(Self { n_a, n_b })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn dim(&self) -> usize {
        (self.n_a + 1) * (self.n_b + 1)
    }

    pub fn swapped(&self) -> Self {
        Self {
            n_a: self.n_b,
            n_b: self.n_a,
        }
    }

    pub fn parity_case(&self) -> ParityCase {
        match (self.n_a % 2, self.n_b % 2) {
            _ if self.n_a == 1 && self.n_b == 1 => ParityCase::SinglePhoton,
            (1, 1) => ParityCase::OddOdd,
            (0, 0) => ParityCase::EvenEven,
            _ => ParityCase::Mixed,
        }
    }
}

/// Multiphoton double-click and bit-error fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub delta_m: f64,
    pub eps_m: f64,
}

impl TradeoffPoint {
    pub fn new(delta_m: f64, eps_m: f64) -> Self {
        Self { delta_m, eps_m }
    }
}

/// Single-party outcome operators for `n` photons measured in basis `w`.
#[derive(Debug, Clone)]
pub struct OutcomeProjectors {
    pub zero: HermitianOperator,
    pub one: HermitianOperator,
    pub double: HermitianOperator,
}

impl OutcomeProjectors {
    pub fn get(&self, outcome: Outcome) -> &HermitianOperator {
        match outcome {
            Outcome::Bit(Bit::Zero) => &self.zero,
            Outcome::Bit(Bit::One) => &self.one,
            Outcome::DoubleClick => &self.double,
        }
    }
}

/// What one party's detector pair reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Bit(Bit),
    DoubleClick,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [
        Outcome::Bit(Bit::Zero),
        Outcome::Bit(Bit::One),
        Outcome::DoubleClick,
    ];
}

pub fn outcome_projectors(n: usize, w: Basis) -> Result<OutcomeProjectors> {
    let zero = HermitianOperator::projector(basis_state(n, w, Bit::Zero)?.amplitudes());
    let one = HermitianOperator::projector(basis_state(n, w, Bit::One)?.amplitudes());
    let double = HermitianOperator::identity(n + 1).sub(&zero).sub(&one);
    Ok(OutcomeProjectors { zero, one, double })
}

fn pair_sum(pair: &PhotonPair, bob_bit: impl Fn(Bit) -> Bit) -> Result<HermitianOperator> {
    let mut acc = HermitianOperator::zeros(pair.dim());
    for w in Basis::ALL {
        for b in Bit::ALL {
            let a = basis_state(pair.n_a, w, b)?;
            let bb = basis_state(pair.n_b, w, bob_bit(b))?;
            let joint = HermitianOperator::projector(a.amplitudes())
                .kron(&HermitianOperator::projector(bb.amplitudes()));
            acc = acc.add(&joint);
        }
    }
    Ok(acc.scaled(0.5))
}

/// Bit-error operator `F_err`.
pub fn f_err(pair: &PhotonPair) -> Result<HermitianOperator> {
    pair_sum(pair, Bit::flip)
}

/// Correct-bit operator `F_cor`.
pub fn f_cor(pair: &PhotonPair) -> Result<HermitianOperator> {
    pair_sum(pair, |b| b)
}

/// Double-click operator `F_dbl = 1 - F_cor - F_err`.
pub fn f_dbl(pair: &PhotonPair) -> Result<HermitianOperator> {
    Ok(PairOperators::new(pair)?.dbl)
}

/// The three joint POVM elements of a photon pair.
#[derive(Debug, Clone)]
pub struct PairOperators {
    pub pair: PhotonPair,
    pub err: HermitianOperator,
    pub cor: HermitianOperator,
    pub dbl: HermitianOperator,
}

impl PairOperators {
    pub fn new(pair: &PhotonPair) -> Result<Self> {
        let err = f_err(pair)?;
        let cor = f_cor(pair)?;
        let dbl = HermitianOperator::identity(pair.dim()).sub(&cor).sub(&err);
        Ok(Self {
            pair: *pair,
            err,
            cor,
            dbl,
        })
    }

    /// `(<F_dbl>, <F_err>)` for a real pure state (normalized internally).
    pub fn point_for_state(&self, psi: &[f64]) -> TradeoffPoint {
        let norm2: f64 = psi.iter().map(|x| x * x).sum();
        TradeoffPoint {
            delta_m: self.dbl.expectation(psi) / norm2,
            eps_m: self.err.expectation(psi) / norm2,
        }
    }
}

/// Smallest achievable double-click fraction for an odd-odd pair,
/// `1 - lambda_max(F_cor + F_err)`.
pub fn min_double_click(pair: &PhotonPair) -> Result<f64> {
    if pair.parity_case() != ParityCase::OddOdd {
        return Err(Error::WrongParity {
            n_a: pair.n_a,
            n_b: pair.n_b,
            reason: "minimum double-click bound applies to odd-odd pairs with n_A + n_B >= 3",
        });
    }
    let ops = PairOperators::new(pair)?;
    Ok(1.0 - ops.cor.add(&ops.err).max_eigenvalue()?)
}

/// `(1 - 2^{-(l_A + l_B)}) / 2` for `n_A = 2 l_A + 1`, `n_B = 2 l_B + 1`.
pub fn min_double_click_closed_form(pair: &PhotonPair) -> Result<f64> {
    if pair.parity_case() != ParityCase::OddOdd {
        return Err(Error::WrongParity {
            n_a: pair.n_a,
            n_b: pair.n_b,
            reason: "closed form applies to odd-odd pairs",
        });
    }
    let l = (pair.n_a - 1) / 2 + (pair.n_b - 1) / 2;
    Ok((1.0 - 2f64.powi(-(l as i32))) / 2.0)
}

/// Double-click fraction where the chord from `(1/4, 0)` touches `g`.
pub const ENVELOPE_TANGENT_DELTA: f64 = 1.0 / 6.0;

/// Lower edge of the allowed multiphoton region: the convex hull of the
/// curve `eps = g(delta)` on `[0, 1/3]` and the point `(1/4, 0)`.
///
/// The tangent from `(1/4, 0)` touches `g` at `delta = 1/6`, where
/// `g(1/6) = 1/12` and `g'(1/6) = -1`.
pub fn lower_envelope(delta: f64) -> f64 {
    if delta <= ENVELOPE_TANGENT_DELTA {
        rates::g(delta.max(0.0)).unwrap_or(0.5)
    } else if delta < 0.25 {
        0.25 - delta
    } else {
        0.0
    }
}

/// Bound `eps_m >= g(delta_m)` valid for a single mixed-parity or even-even
/// pair, extended by zero past `delta_m = 1/3`.
pub fn single_pair_bound(delta: f64) -> f64 {
    if delta <= 1.0 / 3.0 {
        rates::g(delta.max(0.0)).unwrap_or(0.5)
    } else {
        0.0
    }
}

/// Whether a point lies in the region reachable by mixtures of multiphoton
/// attacks.
pub fn region_membership(p: TradeoffPoint) -> bool {
    region_membership_with_slack(p, 1e-12)
}

pub fn region_membership_with_slack(p: TradeoffPoint, slack: f64) -> bool {
    let TradeoffPoint { delta_m, eps_m } = p;
    let in_square = (-slack..=1.0 + slack).contains(&delta_m)
        && (-slack..=1.0 + slack).contains(&eps_m)
        && delta_m + eps_m <= 1.0 + slack;
    in_square && eps_m >= lower_envelope(delta_m) - slack
}

/// `(<F_dbl>, <F_err>)` of `count` random real pure states (Gaussian
/// amplitudes, normalized), reproducible per seed.
pub fn random_state_points(
    pair: &PhotonPair,
    count: usize,
    seed: u64,
) -> Result<Vec<TradeoffPoint>> {
    let ops = PairOperators::new(pair)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let psi: Vec<f64> = (0..pair.dim())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            ops.point_for_state(&psi)
        })
        .collect())
}
