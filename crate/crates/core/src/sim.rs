//! Event-level Monte Carlo of the sift-and-discard protocol.
//!
//! A source is a mixture of photon-number sectors, each a density matrix on
//! the joint `(n_A+1)(n_B+1)` space. On construction every sector is reduced
//! to a table of outcome probabilities per basis pair, so sampling an event
//! is four uniform draws: sector, Alice's basis, Bob's basis, outcome cell.
//!
//! Each event consumes exactly eight 32-bit words of the ChaCha stream. A
//! batch starting at event `k` can therefore seek to word `8k` and reproduce
//! the serial run exactly, whatever the batch layout.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attack::attack_density;
use crate::error::{Error, Result};
use crate::fock::{Basis, Bit, PolarizedFockState};
use crate::povm::{outcome_projectors, HermitianOperator, Outcome, DEFAULT_DIM_CAP};
use crate::rates::{
    conjectured_random_assignment_rate, key_rate, key_rate_upper, KeyRateResult, ObservedStats,
    Region,
};

const DENSITY_TOL: f64 = 1e-10;
const WORDS_PER_EVENT: u128 = 8;
const BATCH: u64 = 1 << 16;

/// Slot of an outcome in the per-cell count tables: bit 0, bit 1, double
/// click, no click.
pub const OUTCOME_SLOTS: usize = 4;

fn slot(o: Option<Outcome>) -> usize {
    match o {
        Some(Outcome::Bit(Bit::Zero)) => 0,
        Some(Outcome::Bit(Bit::One)) => 1,
        Some(Outcome::DoubleClick) => 2,
        None => 3,
    }
}

fn basis_index(w: Basis) -> usize {
    match w {
        Basis::Z => 0,
        Basis::X => 1,
    }
}

/// `[alice basis][bob basis][alice slot][bob slot]`
pub type CellTable<T> = [[[[T; OUTCOME_SLOTS]; OUTCOME_SLOTS]; 2]; 2];

/// One photon-number sector of a user-supplied source.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomSector {
    pub weight: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// Real symmetric density matrix on the `(n_A+1)(n_B+1)` space.
    pub density: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    IdealPair,
    Werner {
        visibility: f64,
    },
    /// Single-photon ideal pairs with probability `1 - xi`, Eve's attack
    /// state with probability `xi`.
    EveAttack {
        chi: PolarizedFockState,
        xi: f64,
    },
    Custom,
}

/// `(alice, bob, cumulative probability)` rows of one basis pair.
type OutcomeCdf = Vec<(Option<Outcome>, Option<Outcome>, f64)>;

#[derive(Debug, Clone)]
struct CompiledSector {
    weight: f64,
    /// Cumulative probability over `(alice, bob)` outcomes, per basis pair.
    cells: [[OutcomeCdf; 2]; 2],
}

#[derive(Debug, Clone)]
pub struct SourceModel {
    kind: SourceKind,
    sectors: Vec<CompiledSector>,
}

/// `(|VV> + |HH>)/sqrt 2` on one photon each.
pub fn phi_plus_density() -> DMatrix<f64> {
    let mut rho = DMatrix::zeros(4, 4);
    for i in [0, 3] {
        for j in [0, 3] {
            rho[(i, j)] = 0.5;
        }
    }
    rho
}

fn werner_density(v: f64) -> DMatrix<f64> {
    phi_plus_density() * v + DMatrix::identity(4, 4) * ((1.0 - v) / 4.0)
}

fn party_outcomes(n: usize, w: Basis) -> Result<Vec<(Option<Outcome>, HermitianOperator)>> {
    if n == 0 {
        return Ok(vec![(None, HermitianOperator::identity(1))]);
    }
    let p = outcome_projectors(n, w)?;
    Ok(Outcome::ALL
        .iter()
        .map(|&o| (Some(o), p.get(o).clone()))
        .collect())
}

fn validate_density(rho: &DMatrix<f64>, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::InvalidSource(format!(
            "density is {}x{}, expected {dim}x{dim}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let h = HermitianOperator::new(rho.clone())
        .map_err(|_| Error::InvalidSource("density is not symmetric".into()))?;
    if (h.trace() - 1.0).abs() > DENSITY_TOL {
        return Err(Error::InvalidSource(format!(
            "density trace {} is not 1",
            h.trace()
        )));
    }
    let low = h.spectrum()?.min();
    if low < -DENSITY_TOL {
        return Err(Error::InvalidSource(format!(
            "density has negative eigenvalue {low}"
        )));
    }
    Ok(())
}

fn compile_sector(
    weight: f64,
    n_a: usize,
    n_b: usize,
    rho: &DMatrix<f64>,
) -> Result<CompiledSector> {
    let dim = (n_a + 1) * (n_b + 1);
    if dim > DEFAULT_DIM_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: DEFAULT_DIM_CAP,
        });
    }
    validate_density(rho, dim)?;
    let mut cells: [[Vec<_>; 2]; 2] = Default::default();
    for wa in Basis::ALL {
        let alice = party_outcomes(n_a, wa)?;
        for wb in Basis::ALL {
            let bob = party_outcomes(n_b, wb)?;
            let mut probs = Vec::with_capacity(alice.len() * bob.len());
            for (oa, pa) in &alice {
                for (ob, pb) in &bob {
                    let p = pa.kron(pb).expectation_density(rho).max(0.0);
                    probs.push((*oa, *ob, p));
                }
            }
            let total: f64 = probs.iter().map(|c| c.2).sum();
            let mut acc = 0.0;
            let table = &mut cells[basis_index(wa)][basis_index(wb)];
            for (oa, ob, p) in probs {
                acc += p / total;
                table.push((oa, ob, acc));
            }
            if let Some(last) = table.last_mut() {
                last.2 = 1.0;
            }
        }
    }
    Ok(CompiledSector { weight, cells })
}

impl SourceModel {
    pub fn ideal_pair() -> Self {
        Self {
            kind: SourceKind::IdealPair,
            sectors: vec![
                compile_sector(1.0, 1, 1, &phi_plus_density()).expect("ideal pair compiles")
            ],
        }
    }

    /// `v |phi+><phi+| + (1 - v) 1/4`.
    pub fn werner(visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::Domain {
                what: "visibility",
                value: visibility,
                domain: "[0, 1]",
            });
        }
        Ok(Self {
            kind: SourceKind::Werner { visibility },
            sectors: vec![compile_sector(1.0, 1, 1, &werner_density(visibility))?],
        })
    }

    pub fn eve_attack(chi: PolarizedFockState, xi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Domain {
                what: "xi",
                value: xi,
                domain: "[0, 1]",
            });
        }
        let (pair, rho) = attack_density(&chi)?;
        let mut sectors = Vec::with_capacity(2);
        if xi < 1.0 {
            sectors.push(compile_sector(1.0 - xi, 1, 1, &phi_plus_density())?);
        }
        if xi > 0.0 {
            sectors.push(compile_sector(xi, pair.n_a(), pair.n_b(), &rho)?);
        }
        Ok(Self {
            kind: SourceKind::EveAttack { chi, xi },
            sectors,
        })
    }

    /// Mixture of arbitrary sectors; a zero photon number means that party
    /// sees nothing in that sector.
    pub fn custom(sectors: Vec<CustomSector>) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidSource("no sectors".into()));
        }
        if let Some(s) = sectors
            .iter()
            .find(|s| !s.weight.is_finite() || s.weight < 0.0)
        {
            return Err(Error::InvalidSource(format!(
                "sector weight {} is negative",
                s.weight
            )));
        }
        let total: f64 = sectors.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidSource(format!(
                "sector weights sum to {total}"
            )));
        }
        let compiled = sectors
            .iter()
            .filter(|s| s.weight > 0.0)
            .map(|s| compile_sector(s.weight, s.n_a, s.n_b, &s.density))
            .collect::<Result<_>>()?;
        Ok(Self {
            kind: SourceKind::Custom,
            sectors: compiled,
        })
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    /// Exact probability of every outcome cell given the basis pair.
    pub fn cell_probabilities(&self) -> CellTable<f64> {
        let mut out = [[[[0.0; OUTCOME_SLOTS]; OUTCOME_SLOTS]; 2]; 2];
        for s in &self.sectors {
            for (i, row) in s.cells.iter().enumerate() {
                for (j, table) in row.iter().enumerate() {
                    let mut prev = 0.0;
                    for &(oa, ob, c) in table {
                        out[i][j][slot(oa)][slot(ob)] += s.weight * (c - prev);
                        prev = c;
                    }
                }
            }
        }
        out
    }

    /// Exact `(delta, eps)` among same-basis events where both parties
    /// detect; `None` if that never happens.
    pub fn analytic_stats(&self) -> Option<(f64, f64)> {
        let p = self.cell_probabilities();
        let (mut detected, mut dbl, mut err) = (0.0, 0.0, 0.0);
        for (w, by_bob) in p.iter().enumerate() {
            for (a, row) in by_bob[w].iter().enumerate().take(3) {
                for (b, &q) in row.iter().enumerate().take(3) {
                    detected += q;
                    if a == 2 || b == 2 {
                        dbl += q;
                    } else if a != b {
                        err += q;
                    }
                }
            }
        }
        (detected > 0.0).then(|| (dbl / detected, err / detected))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventRecord {
    pub alice_basis: Basis,
    pub bob_basis: Basis,
    /// `None` when no photon reached the party.
    pub alice_outcome: Option<Outcome>,
    pub bob_outcome: Option<Outcome>,
    pub sifted: bool,
}

impl EventRecord {
    pub fn same_basis(&self) -> bool {
        self.alice_basis == self.bob_basis
    }

    pub fn both_detected(&self) -> bool {
        self.alice_outcome.is_some() && self.bob_outcome.is_some()
    }

    pub fn has_double_click(&self) -> bool {
        self.alice_outcome == Some(Outcome::DoubleClick)
            || self.bob_outcome == Some(Outcome::DoubleClick)
    }
}

fn pick_basis(u: f64) -> Basis {
    if u < 0.5 {
        Basis::Z
    } else {
        Basis::X
    }
}

/// Draws one event. Always consumes four `f64` draws.
pub fn sample_event<R: Rng + ?Sized>(source: &SourceModel, rng: &mut R) -> EventRecord {
    let u_sector: f64 = rng.random();
    let u_a: f64 = rng.random();
    let u_b: f64 = rng.random();
    let u_cell: f64 = rng.random();

    let mut acc = 0.0;
    let last = source.sectors.len() - 1;
    let sector = source
        .sectors
        .iter()
        .enumerate()
        .find(|(i, s)| {
            acc += s.weight;
            u_sector < acc || *i == last
        })
        .map(|(_, s)| s)
        .expect("source has at least one sector");

    let (wa, wb) = (pick_basis(u_a), pick_basis(u_b));
    let table = &sector.cells[basis_index(wa)][basis_index(wb)];
    let &(oa, ob, _) = table
        .iter()
        .find(|c| u_cell < c.2)
        .unwrap_or_else(|| table.last().expect("non-empty outcome table"));

    let sifted = wa == wb
        && oa.is_some()
        && ob.is_some()
        && oa != Some(Outcome::DoubleClick)
        && ob != Some(Outcome::DoubleClick);
    EventRecord {
        alice_basis: wa,
        bob_basis: wb,
        alice_outcome: oa,
        bob_outcome: ob,
        sifted,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiftedTally {
    /// Same-basis events where both parties detected photons.
    pub n: u64,
    pub n_dbl: u64,
    pub n_err: u64,
    pub n_cor: u64,
    pub total_events: u64,
    pub mismatched_bases: u64,
    /// Same-basis events where at least one party saw nothing.
    pub undetected: u64,
    pub cells: CellTable<u64>,
}

impl Default for SiftedTally {
    fn default() -> Self {
        Self {
            n: 0,
            n_dbl: 0,
            n_err: 0,
            n_cor: 0,
            total_events: 0,
            mismatched_bases: 0,
            undetected: 0,
            cells: [[[[0; OUTCOME_SLOTS]; OUTCOME_SLOTS]; 2]; 2],
        }
    }
}

fn binomial_se(k: u64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    let p = k as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

impl SiftedTally {
    pub fn record(&mut self, ev: &EventRecord) {
        self.total_events += 1;
        self.cells[basis_index(ev.alice_basis)][basis_index(ev.bob_basis)]
            [slot(ev.alice_outcome)][slot(ev.bob_outcome)] += 1;
        if !ev.same_basis() {
            self.mismatched_bases += 1;
            return;
        }
        if !ev.both_detected() {
            self.undetected += 1;
            return;
        }
        self.n += 1;
        if ev.has_double_click() {
            self.n_dbl += 1;
        } else if ev.alice_outcome == ev.bob_outcome {
            self.n_cor += 1;
        } else {
            self.n_err += 1;
        }
    }

    pub fn merge(mut self, other: &Self) -> Self {
        self.n += other.n;
        self.n_dbl += other.n_dbl;
        self.n_err += other.n_err;
        self.n_cor += other.n_cor;
        self.total_events += other.total_events;
        self.mismatched_bases += other.mismatched_bases;
        self.undetected += other.undetected;
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..OUTCOME_SLOTS {
                    for b in 0..OUTCOME_SLOTS {
                        self.cells[i][j][a][b] += other.cells[i][j][a][b];
                    }
                }
            }
        }
        self
    }

    pub fn delta_hat(&self) -> f64 {
        self.n_dbl as f64 / self.n as f64
    }

    pub fn eps_hat(&self) -> f64 {
        self.n_err as f64 / self.n as f64
    }

    pub fn delta_se(&self) -> f64 {
        binomial_se(self.n_dbl, self.n)
    }

    pub fn eps_se(&self) -> f64 {
        binomial_se(self.n_err, self.n)
    }

    /// Sampled `(delta, eps)` as rate-function input.
    pub fn stats(&self) -> Result<ObservedStats> {
        if self.n == 0 {
            return Err(Error::Numerical("no same-basis detected events".into()));
        }
        Ok(ObservedStats::new(self.delta_hat(), self.eps_hat())?.with_events(self.n))
    }
}

fn run_range(source: &SourceModel, seed: u64, start: u64, count: u64) -> SiftedTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(WORDS_PER_EVENT * start as u128);
    let mut tally = SiftedTally::default();
    for _ in 0..count {
        tally.record(&sample_event(source, &mut rng));
    }
    tally
}

/// Single-threaded reference run.
pub fn run_protocol_serial(source: &SourceModel, num_events: u64, seed: u64) -> SiftedTally {
    run_range(source, seed, 0, num_events)
}

/// Simulates `num_events` events in parallel batches; the result equals
/// [`run_protocol_serial`] for the same seed.
pub fn run_protocol(source: &SourceModel, num_events: u64, seed: u64) -> Result<SiftedTally> {
    if num_events == 0 {
        return Err(Error::Domain {
            what: "num_events",
            value: 0.0,
            domain: "[1, inf)",
        });
    }
    let batches = num_events.div_ceil(BATCH);
    Ok((0..batches)
        .into_par_iter()
        .map(|b| {
            let start = b * BATCH;
            run_range(source, seed, start, BATCH.min(num_events - start))
        })
        .reduce(SiftedTally::default, |a, b| a.merge(&b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndToEndReport {
    pub seed: u64,
    pub f: f64,
    pub tally: SiftedTally,
    /// Exact `(delta, eps)` of the source.
    pub analytic: Option<(f64, f64)>,
    pub sampled_rate: Option<KeyRateResult>,
    pub analytic_rate: Option<KeyRateResult>,
    /// Rate with the attack-based cost at the analytic statistics.
    pub analytic_upper_rate: Option<f64>,
    /// `sampled - analytic` key fraction.
    pub difference: Option<f64>,
    /// CONJECTURED random-assignment rate at the sampled statistics.
    pub conjectured_rate: Option<f64>,
    /// Why the sampled statistics admit no key-rate value, if they don't.
    pub sampled_issue: Option<String>,
}

impl EndToEndReport {
    pub fn sampled_region(&self) -> Region {
        self.sampled_rate.map_or(Region::Infeasible, |r| r.region)
    }
}

/// Runs the protocol and evaluates the key fraction on both the sampled and
/// the exact statistics. Infeasible sampled statistics are reported in
/// `sampled_issue` instead of failing.
pub fn end_to_end(
    source: &SourceModel,
    num_events: u64,
    f: f64,
    seed: u64,
) -> Result<EndToEndReport> {
    if !f.is_finite() || f < 1.0 {
        return Err(Error::Domain {
            what: "f",
            value: f,
            domain: "[1, inf)",
        });
    }
    let tally = run_protocol(source, num_events, seed)?;
    let analytic = source.analytic_stats();

    let (sampled_rate, conjectured_rate, sampled_issue) = match tally.stats() {
        Ok(s) => match key_rate(&s, f) {
            Ok(r) => (Some(r), conjectured_random_assignment_rate(&s).ok(), None),
            Err(e) => (
                None,
                conjectured_random_assignment_rate(&s).ok(),
                Some(e.to_string()),
            ),
        },
        Err(e) => (None, None, Some(e.to_string())),
    };
    let exact = analytic.and_then(|(d, e)| ObservedStats::new(d, e).ok());
    let analytic_rate = exact.as_ref().and_then(|s| key_rate(s, f).ok());
    let analytic_upper_rate = exact.as_ref().and_then(|s| key_rate_upper(s, f).ok());
    let difference = match (sampled_rate, analytic_rate) {
        (Some(a), Some(b)) => Some(a.r_key - b.r_key),
        _ => None,
    };
    Ok(EndToEndReport {
        seed,
        f,
        tally,
        analytic,
        sampled_rate,
        analytic_rate,
        analytic_upper_rate,
        difference,
        conjectured_rate,
        sampled_issue,
    })
}
