//! Polarization states of `n` photons in one (or several) spatial modes.
//!
//! A state of `n` photons split between the horizontal and vertical
//! polarizations is written in the occupation basis `|k, n-k>`, where `k` is
//! the number of H photons. Every state the analysis needs has real
//! amplitudes in this basis, so amplitudes are stored as `f64`.
//!
//! The four measurement states are
//!
//! ```text
//!   |0_Z> = |H,n>        |1_Z> = |V,n>
//!   |0_X> = |D+,n>       |1_X> = |D-,n>      a_{D±} = (a_H ± a_V)/√2
//! ```
//!
//! and their overlaps obey `<b_X|b'_Z> = (-1)^{b b' n} 2^{-n/2}` independent of
//! how the photons are spread over modes.

use std::fmt;

use crate::error::{Error, Result};

/// Largest photon number handled by [`basis_state`].
pub const MAX_PHOTONS: usize = 32;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Z, Basis::X];
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Z => f.write_str("Z"),
            Basis::X => f.write_str("X"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const ALL: [Bit; 2] = [Bit::Zero, Bit::One];

    pub fn value(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }

    /// Addition modulo 2.
    pub fn xor(self, other: Bit) -> Bit {
        if self == other {
            Bit::Zero
        } else {
            Bit::One
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

/// Normalized real state of `n` photons over the two polarizations.
///
/// `amplitudes[k]` is the coefficient of the state with `k` H photons and
/// `n - k` V photons.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedFockState {
    photons: usize,
    amplitudes: Vec<f64>,
}

impl PolarizedFockState {
    /// Wraps an amplitude vector, normalizing it. The photon number is
    /// `amplitudes.len() - 1`.
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::ZeroPhotons);
        }
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-14 {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            photons: amplitudes.len() - 1,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    /// Dimension of the occupation space, `n + 1`.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }
}

/// Binomial coefficient as an `f64`, exact for the photon numbers in use.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_photons(n: usize) -> Result<()> {
    match n {
        0 => Err(Error::ZeroPhotons),
        n if n > MAX_PHOTONS => Err(Error::TooManyPhotons(n)),
        _ => Ok(()),
    }
}

/// Measurement state `|b_W^(n)>` for outcome `b` in basis `w`.
///
/// Z states are occupation basis vectors. X states come from expanding
/// `(a_H ± a_V)^n |vac> / sqrt(2^n n!)`, which gives amplitude
/// `(±1)^(n-k) sqrt(C(n,k) / 2^n)` at index `k`.
pub fn basis_state(n: usize, w: Basis, b: Bit) -> Result<PolarizedFockState> {
    check_photons(n)?;
    let mut amplitudes = vec![0.0; n + 1];
    match w {
        Basis::Z => {
            let k = if b == Bit::Zero { n } else { 0 };
            amplitudes[k] = 1.0;
        }
        Basis::X => {
            let scale = 2f64.powi(-(n as i32));
            for (k, amp) in amplitudes.iter_mut().enumerate() {
                let sign = if b == Bit::One && (n - k) % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                *amp = sign * (binomial(n, k) * scale).sqrt();
            }
        }
    }
    Ok(PolarizedFockState {
        photons: n,
        amplitudes,
    })
}

pub fn inner_product(s1: &PolarizedFockState, s2: &PolarizedFockState) -> Result<f64> {
    if s1.photons != s2.photons {
        return Err(Error::PhotonMismatch(s1.photons, s2.photons));
    }
    Ok(s1
        .amplitudes
        .iter()
        .zip(&s2.amplitudes)
        .map(|(a, b)| a * b)
        .sum())
}

/// Closed-form overlap `<b_X^(n)|b'_Z^(n)> = (-1)^{b b' n} 2^{-n/2}`.
pub fn fundamental_overlap(n: usize, b: Bit, b_prime: Bit) -> f64 {
    let sign = if (b.value() * b_prime.value()) as usize * n % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    sign * 2f64.powf(-(n as f64) / 2.0)
}

/// Photon numbers `n_1, n_2, ...` carried by each spatial mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePartition {
    parts: Vec<usize>,
}

impl ModePartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyPartition);
        }
        if parts.contains(&0) {
            return Err(Error::ZeroPart);
        }
        for &p in &parts {
            check_photons(p)?;
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Dimension `prod (n_j + 1)` of the product space.
    pub fn dim(&self) -> usize {
        self.parts.iter().map(|p| p + 1).product()
    }
}

/// Overlap of two multimode measurement states, each a product of per-mode
/// states `|b_W^(n_j)>`.
pub fn multimode_inner_product(
    partition: &ModePartition,
    w1: Basis,
    b1: Bit,
    w2: Basis,
    b2: Bit,
) -> Result<f64> {
    partition.parts.iter().try_fold(1.0, |acc, &n| {
        let s1 = basis_state(n, w1, b1)?;
        let s2 = basis_state(n, w2, b2)?;
        Ok(acc * inner_product(&s1, &s2)?)
    })
}
