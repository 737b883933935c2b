//! Definability of Boolean predicates relative to a lens: exact counts,
//! closed-form probabilities, block-splitting bounds, seeded Monte Carlo
//! confirmation, and predicate-driven lens extension.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::lens::Lens;

/// Name of the generator behind [`monte_carlo_definability`]; part of the
/// external contract so third parties can replay the bit stream.
pub const GENERATOR_NAME: &str = "chacha20";

/// Enumeration budget: `exact_enumeration` iterates at most `2^24` predicates.
pub const ENUMERATION_BUDGET_BITS: usize = 24;

/// A 0/1 labeling of microstates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Predicate(pub Vec<bool>);

impl Predicate {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, state: usize) -> bool {
        self.0[state]
    }
}

/// True iff the predicate is constant on every block of the lens.
pub fn is_definable(h: &Predicate, lens: &Lens) -> Result<bool> {
    if h.len() != lens.state_count() {
        return Err(CoreError::DimensionMismatch {
            expected: lens.state_count(),
            got: h.len(),
        });
    }
    Ok(lens
        .blocks()
        .iter()
        .all(|block| block.iter().all(|&z| h.bit(z) == h.bit(block[0]))))
}

/// Exact dyadic probability `2^(-exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicProb {
    pub exponent: u32,
}

impl DyadicProb {
    pub fn as_f64(&self) -> f64 {
        // Underflows to 0 for exponents past ~1074; the exact form is the
        // authoritative value.
        (-(self.exponent as f64)).exp2()
    }
}

impl std::fmt::Display for DyadicProb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exponent == 0 {
            write!(f, "2^0")
        } else {
            write!(f, "2^-{}", self.exponent)
        }
    }
}

/// Closed-form definability counts for a lens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingReport {
    pub n: usize,
    pub k: usize,
    /// `2^-(N-K)`, exact.
    pub p_definable: DyadicProb,
    pub p_definable_float: f64,
    /// Per block, the probability `2^(1-|B_x|)` that a uniform predicate is
    /// constant on that block.
    pub per_block_constancy: Vec<f64>,
    /// Union bound on "constant on some block", clamped to 1.
    pub union_bound: f64,
    /// Lower bound `1 - K * 2^(1-m)` on "splits every block", with `m` the
    /// minimum block size; only meaningful when every block has `m >= 2`.
    pub split_lower_bound: Option<f64>,
}

pub fn forcing_report(lens: &Lens) -> ForcingReport {
    let n = lens.state_count();
    let k = lens.block_count();
    let p_definable = DyadicProb { exponent: (n - k) as u32 };
    let per_block_constancy: Vec<f64> = lens
        .blocks()
        .iter()
        .map(|b| (1.0 - b.len() as f64).exp2())
        .collect();
    let union_bound = per_block_constancy.iter().sum::<f64>().min(1.0);
    let min_block = lens.blocks().iter().map(Vec::len).min().unwrap_or(0);
    let split_lower_bound = (min_block >= 2)
        .then(|| (1.0 - k as f64 * (1.0 - min_block as f64).exp2()).max(0.0));
    ForcingReport {
        n,
        k,
        p_definable,
        p_definable_float: p_definable.as_f64(),
        per_block_constancy,
        union_bound,
        split_lower_bound,
    }
}

/// Monte Carlo estimate of the definability probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub hits: u64,
    pub freq: f64,
    pub expected: f64,
    pub three_sigma: f64,
    /// Acceptance threshold `max(3 sigma, 3/trials)`.
    pub threshold: f64,
    pub consistent: bool,
    pub generator: String,
    pub seed: u64,
}

/// Samples predicates as i.i.d. fair bits from ChaCha20 seeded with `seed`.
///
/// Bit `z` of a trial comes from bit `z mod 64` of word `z / 64` of that
/// trial's words; each trial consumes `ceil(N/64)` words of the stream.
pub fn monte_carlo_definability(lens: &Lens, trials: u64, seed: u64) -> MonteCarloReport {
    let n = lens.state_count();
    let words_per_trial = n.div_ceil(64);
    let block_masks: Vec<Vec<(usize, u64)>> = lens
        .blocks()
        .iter()
        .map(|block| {
            let mut masks = vec![0u64; words_per_trial];
            for &z in block {
                masks[z / 64] |= 1u64 << (z % 64);
            }
            masks
                .into_iter()
                .enumerate()
                .filter(|(_, m)| *m != 0)
                .collect()
        })
        .collect();

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut words = vec![0u64; words_per_trial];
    let mut hits = 0u64;
    for _ in 0..trials {
        for w in words.iter_mut() {
            *w = rng.next_u64();
        }
        let definable = block_masks.iter().all(|masks| {
            masks.iter().all(|&(w, m)| {
                let bits = words[w] & m;
                bits == 0 || bits == m
            })
        });
        if definable {
            hits += 1;
        }
    }

    let expected = forcing_report(lens).p_definable_float;
    let freq = hits as f64 / trials as f64;
    let three_sigma = 3.0 * (expected * (1.0 - expected) / trials as f64).sqrt();
    let threshold = three_sigma.max(3.0 / trials as f64);
    MonteCarloReport {
        trials,
        hits,
        freq,
        expected,
        three_sigma,
        threshold,
        consistent: (freq - expected).abs() <= threshold,
        generator: GENERATOR_NAME.to_string(),
        seed,
    }
}

/// How [`exact_enumeration`] counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Iterate all `2^N` predicates (requires `N <= 24`).
    Enumerate,
    /// Return `(2^K, 2^N)` from the counting formula.
    ClosedForm,
    /// Enumerate when affordable, otherwise fall back to the formula.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub definable_count: BigUint,
    pub total: BigUint,
    pub enumerated: bool,
}

/// Counts definable predicates. In enumeration mode the count is checked
/// against the `2^K` formula; a mismatch would be a bug, so it is asserted.
pub fn exact_enumeration(lens: &Lens, mode: CountMode) -> Result<EnumerationReport> {
    let n = lens.state_count();
    let k = lens.block_count();
    let enumerate = match mode {
        CountMode::Enumerate => {
            if n > ENUMERATION_BUDGET_BITS {
                return Err(CoreError::BudgetExceeded { n, budget: ENUMERATION_BUDGET_BITS });
            }
            true
        }
        CountMode::ClosedForm => false,
        CountMode::Auto => n <= ENUMERATION_BUDGET_BITS,
    };

    if !enumerate {
        return Ok(EnumerationReport {
            definable_count: BigUint::from(1u8) << k,
            total: BigUint::from(1u8) << n,
            enumerated: false,
        });
    }

    let block_masks: Vec<u32> = lens
        .blocks()
        .iter()
        .map(|block| block.iter().fold(0u32, |m, &z| m | (1 << z)))
        .collect();
    let mut count: u64 = 0;
    for h in 0..(1u64 << n) {
        let h = h as u32;
        let definable = block_masks.iter().all(|&m| {
            let bits = h & m;
            bits == 0 || bits == m
        });
        if definable {
            count += 1;
        }
    }
    assert_eq!(count, 1u64 << k, "enumeration disagrees with the 2^K count");
    Ok(EnumerationReport {
        definable_count: BigUint::from(count),
        total: BigUint::from(1u8) << n,
        enumerated: true,
    })
}

/// Refines the lens by intersecting each block with the predicate's level
/// sets. New labels are ordered by (old label, predicate value) with empty
/// cells dropped. Strictness is equivalent to non-definability; both
/// directions are asserted.
pub fn extend_lens(lens: &Lens, h: &Predicate) -> Result<Lens> {
    if h.len() != lens.state_count() {
        return Err(CoreError::DimensionMismatch {
            expected: lens.state_count(),
            got: h.len(),
        });
    }
    let definable = is_definable(h, lens)?;
    let mut next_label = 0usize;
    let mut cell_label: std::collections::BTreeMap<(usize, bool), usize> =
        std::collections::BTreeMap::new();
    for (label, block) in lens.blocks().iter().enumerate() {
        for value in [false, true] {
            if block.iter().any(|&z| h.bit(z) == value) {
                cell_label.insert((label, value), next_label);
                next_label += 1;
            }
        }
    }
    let assignment: Vec<usize> = (0..lens.state_count())
        .map(|z| cell_label[&(lens.label_of(z), h.bit(z))])
        .collect();
    let extended = Lens::new(assignment)?;

    let strict = extended.block_count() > lens.block_count();
    assert_eq!(
        strict, !definable,
        "extension strictness must coincide with non-definability"
    );
    Ok(extended)
}
