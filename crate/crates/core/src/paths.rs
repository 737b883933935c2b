//! Finite-horizon path laws, time reversal, KL divergence with explicit
//! support conventions, path reversal asymmetry, and the coarse-graining
//! audit.
//!
//! Path laws are exhaustive tables over positive-probability trajectories;
//! all inequalities checked here are exact statements, so nothing is sampled.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::kernel::{Dist, Kernel};
use crate::lens::Lens;

pub type Path = Vec<u16>;

/// Probability table on length-`T+1` trajectories. Zero-probability paths
/// are omitted so KL sums range over the support only.
///
/// The JSON form is `{"T": n, "entries": [{"path": [...], "p": x}, ...]}`
/// with entries sorted lexicographically by path, for diff stability.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLaw {
    horizon: usize,
    dim: usize,
    table: BTreeMap<Path, f64>,
}

#[derive(Serialize, Deserialize)]
struct PathLawEntry {
    path: Path,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct PathLawWire {
    #[serde(rename = "T")]
    horizon: usize,
    entries: Vec<PathLawEntry>,
}

impl Serialize for PathLaw {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .table
            .iter()
            .map(|(path, &p)| PathLawEntry { path: path.clone(), p })
            .collect();
        PathLawWire { horizon: self.horizon, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PathLaw {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = PathLawWire::deserialize(deserializer)?;
        let mut table = BTreeMap::new();
        let mut max_state = 0u16;
        for entry in wire.entries {
            if entry.path.len() != wire.horizon + 1 {
                return Err(serde::de::Error::custom(format!(
                    "path {:?} has length {}, expected T+1 = {}",
                    entry.path,
                    entry.path.len(),
                    wire.horizon + 1
                )));
            }
            if entry.p < 0.0 {
                return Err(serde::de::Error::custom(format!(
                    "negative probability {} on path {:?}",
                    entry.p, entry.path
                )));
            }
            max_state = max_state.max(entry.path.iter().copied().max().unwrap_or(0));
            if entry.p > 0.0 {
                table.insert(entry.path, entry.p);
            }
        }
        // The wire format carries no explicit state count; the smallest
        // consistent one is used.
        Ok(PathLaw { horizon: wire.horizon, dim: max_state as usize + 1, table })
    }
}

impl PathLaw {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn table(&self) -> &BTreeMap<Path, f64> {
        &self.table
    }

    pub fn total_mass(&self) -> f64 {
        self.table.values().sum()
    }

    pub fn prob(&self, path: &[u16]) -> f64 {
        self.table.get(path).copied().unwrap_or(0.0)
    }
}

/// KL divergence value; `+infinity` carries a witness where `p > 0, q = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlResult {
    pub value: f64,
    pub infinite_support_witness: Option<Path>,
}

impl KlResult {
    pub fn finite(value: f64) -> Self {
        Self { value, infinite_support_witness: None }
    }

    pub fn infinite(witness: Path) -> Self {
        Self { value: f64::INFINITY, infinite_support_witness: Some(witness) }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Forward path law `rho(z0) * prod P(z_t, z_{t+1})` over all
/// positive-probability trajectories.
///
/// `cap` bounds `|Z|^(T+1)`; the default used by callers is `10^7`.
pub fn path_law(p: &Kernel, rho: &Dist, horizon: usize, cap: u128) -> Result<PathLaw> {
    let n = p.dim();
    if rho.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: rho.len() });
    }
    let total = (n as u128)
        .checked_pow(horizon as u32 + 1)
        .ok_or(CoreError::ExplosionCap { paths: u128::MAX, cap })?;
    if total > cap {
        return Err(CoreError::ExplosionCap { paths: total, cap });
    }

    let mut table = BTreeMap::new();
    let mut prefix: Path = Vec::with_capacity(horizon + 1);
    for z0 in 0..n {
        let w0 = rho.weight(z0);
        if w0 <= 0.0 {
            continue;
        }
        prefix.push(z0 as u16);
        extend_paths(p, horizon, &mut prefix, w0, &mut table);
        prefix.pop();
    }
    Ok(PathLaw { horizon, dim: n, table })
}

fn extend_paths(
    p: &Kernel,
    horizon: usize,
    prefix: &mut Path,
    mass: f64,
    table: &mut BTreeMap<Path, f64>,
) {
    if prefix.len() == horizon + 1 {
        table.insert(prefix.clone(), mass);
        return;
    }
    let cur = *prefix.last().expect("prefix is nonempty") as usize;
    for next in 0..p.dim() {
        let step = p.entry(cur, next);
        if step <= 0.0 {
            continue;
        }
        prefix.push(next as u16);
        extend_paths(p, horizon, prefix, mass * step, table);
        prefix.pop();
    }
}

/// Pushforward under the reversal map: re-keys every trajectory by its
/// reverse. Reversal is a bijection, so mass is moved, never merged.
pub fn reverse_pushforward(pl: &PathLaw) -> PathLaw {
    let table = pl
        .table
        .iter()
        .map(|(path, &mass)| {
            let mut rev = path.clone();
            rev.reverse();
            (rev, mass)
        })
        .collect();
    PathLaw { horizon: pl.horizon, dim: pl.dim, table }
}

/// KL divergence between two path laws with the conventions
/// `0 log(0/q) = 0` and `p > 0, q = 0 => +infinity` (with witness).
pub fn kl_path(p: &PathLaw, q: &PathLaw) -> Result<KlResult> {
    if p.horizon != q.horizon {
        return Err(CoreError::ShapeMismatch {
            context: format!("path horizons {} vs {}", p.horizon, q.horizon),
        });
    }
    let mut acc = 0.0;
    for (path, &pw) in &p.table {
        if pw <= 0.0 {
            continue;
        }
        let qw = q.prob(path);
        if qw <= 0.0 {
            return Ok(KlResult::infinite(path.clone()));
        }
        acc += pw * (pw / qw).ln();
    }
    Ok(KlResult::finite(acc))
}

/// KL divergence between two finite distributions; an infinite result
/// carries the offending index as a length-1 witness.
pub fn kl_dist(p: &Dist, q: &Dist) -> Result<KlResult> {
    if p.len() != q.len() {
        return Err(CoreError::ShapeMismatch {
            context: format!("distribution lengths {} vs {}", p.len(), q.len()),
        });
    }
    let mut acc = 0.0;
    for i in 0..p.len() {
        let pw = p.weight(i);
        if pw <= 0.0 {
            continue;
        }
        let qw = q.weight(i);
        if qw <= 0.0 {
            return Ok(KlResult::infinite(vec![i as u16]));
        }
        acc += pw * (pw / qw).ln();
    }
    Ok(KlResult::finite(acc))
}

/// Path reversal asymmetry at horizon `T`:
/// `Sigma_T(rho) = KL(law || reversed law)`.
pub fn sigma_t(p: &Kernel, rho: &Dist, horizon: usize, cap: u128) -> Result<KlResult> {
    let law = path_law(p, rho, horizon, cap)?;
    let reversed = reverse_pushforward(&law);
    kl_path(&law, &reversed)
}

/// Pushes a path law through a lens applied coordinatewise; fibers merge by
/// summation, so mass is preserved.
pub fn coarse_path_pushforward(lens: &Lens, pl: &PathLaw) -> Result<PathLaw> {
    if lens.state_count() != pl.dim {
        return Err(CoreError::DimensionMismatch {
            expected: pl.dim,
            got: lens.state_count(),
        });
    }
    let mut table: BTreeMap<Path, f64> = BTreeMap::new();
    for (path, &mass) in &pl.table {
        let macro_path: Path = path.iter().map(|&z| lens.label_of(z as usize) as u16).collect();
        *table.entry(macro_path).or_insert(0.0) += mass;
    }
    Ok(PathLaw { horizon: pl.horizon, dim: lens.block_count(), table })
}

/// Micro-vs-macro comparison of the path reversal asymmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpiAudit {
    pub micro: KlResult,
    pub macro_: KlResult,
    /// `micro - macro` when both are finite.
    pub slack: Option<f64>,
    /// Coarse asymmetry never exceeds micro asymmetry (within 1e-10).
    pub pass: bool,
}

const DPI_SLACK_TOL: f64 = 1e-10;
const COMMUTATION_TOL: f64 = 1e-12;

/// Computes micro and macro path reversal asymmetry and checks that
/// coarse-graining did not increase it.
///
/// The reversal of the pushed-forward law is computed both ways
/// (reverse-then-push and push-then-reverse) and must agree entrywise
/// within `1e-12`.
pub fn dpi_audit(
    p: &Kernel,
    rho: &Dist,
    lens: &Lens,
    horizon: usize,
    cap: u128,
) -> Result<DpiAudit> {
    let law = path_law(p, rho, horizon, cap)?;
    let reversed = reverse_pushforward(&law);
    let micro = kl_path(&law, &reversed)?;

    let macro_law = coarse_path_pushforward(lens, &law)?;
    let rev_then_push = coarse_path_pushforward(lens, &reversed)?;
    let push_then_rev = reverse_pushforward(&macro_law);
    assert_tables_close(&push_then_rev, &rev_then_push, COMMUTATION_TOL)?;

    let macro_ = kl_path(&macro_law, &push_then_rev)?;

    let pass = match (micro.is_finite(), macro_.is_finite()) {
        (true, true) => macro_.value <= micro.value + DPI_SLACK_TOL,
        (false, _) => true,
        (true, false) => false,
    };
    let slack =
        (micro.is_finite() && macro_.is_finite()).then_some(micro.value - macro_.value);
    Ok(DpiAudit { micro, macro_, slack, pass })
}

fn assert_tables_close(a: &PathLaw, b: &PathLaw, tol: f64) -> Result<()> {
    for (path, &mass) in &a.table {
        if (mass - b.prob(path)).abs() > tol {
            return Err(CoreError::ShapeMismatch {
                context: format!(
                    "reversal and pushforward do not commute at path {path:?}: {} vs {}",
                    mass,
                    b.prob(path)
                ),
            });
        }
    }
    for (path, &mass) in &b.table {
        if (mass - a.prob(path)).abs() > tol {
            return Err(CoreError::ShapeMismatch {
                context: format!(
                    "reversal and pushforward do not commute at path {path:?}: {} vs {}",
                    a.prob(path),
                    mass
                ),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ToleranceConfig;
    use crate::kernel::{check_detailed_balance, stationary, validate_kernel};

    const CAP: u128 = 10_000_000;

    fn biased_three_cycle(p: f64, q: f64, s: f64) -> Kernel {
        let rows = vec![vec![s, p, q], vec![q, s, p], vec![p, q, s]];
        validate_kernel(&rows, &ToleranceConfig::default()).unwrap().kernel
    }

    fn flip_kernel() -> Kernel {
        Kernel::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn path_law_identity_kernel_single_path() {
        let law = path_law(&Kernel::identity(2), &Dist::point_mass(0, 2), 3, CAP).unwrap();
        assert_eq!(law.table().len(), 1);
        assert_eq!(law.prob(&[0, 0, 0, 0]), 1.0);
    }

    #[test]
    fn path_law_flip_kernel_deterministic_path() {
        let law = path_law(&flip_kernel(), &Dist::point_mass(0, 2), 2, CAP).unwrap();
        assert_eq!(law.table().len(), 1);
        assert_eq!(law.prob(&[0, 1, 0]), 1.0);
    }

    #[test]
    fn path_law_product_formula() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let law = path_law(&p, &Dist::uniform(3), 2, CAP).unwrap();
        assert_eq!(law.table().len(), 27);
        let expect = (1.0 / 3.0) * 0.7 * 0.7;
        assert!((law.prob(&[0, 1, 2]) - expect).abs() < 1e-15);
        assert!((law.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn path_law_horizon_zero_returns_rho() {
        let law = path_law(&flip_kernel(), &Dist::uniform(2), 0, CAP).unwrap();
        assert_eq!(law.prob(&[0]), 0.5);
        assert_eq!(law.prob(&[1]), 0.5);
    }

    #[test]
    fn path_law_respects_cap() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        assert!(matches!(
            path_law(&p, &Dist::uniform(3), 10, 100),
            Err(CoreError::ExplosionCap { .. })
        ));
    }

    #[test]
    fn reversal_moves_single_path() {
        let law = path_law(&flip_kernel(), &Dist::point_mass(0, 2), 2, CAP).unwrap();
        let rev = reverse_pushforward(&law);
        assert_eq!(rev.prob(&[0, 1, 0]), 1.0);
        let law3 = path_law(&biased_three_cycle(0.7, 0.2, 0.1), &Dist::point_mass(0, 3), 2, CAP)
            .unwrap();
        let rev3 = reverse_pushforward(&law3);
        assert_eq!(rev3.prob(&[2, 1, 0]), law3.prob(&[0, 1, 2]));
    }

    #[test]
    fn reversal_is_involution() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let law = path_law(&p, &Dist::uniform(3), 3, CAP).unwrap();
        assert_eq!(reverse_pushforward(&reverse_pushforward(&law)), law);
    }

    #[test]
    fn kl_of_equal_laws_is_zero() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let law = path_law(&p, &Dist::uniform(3), 2, CAP).unwrap();
        assert_eq!(kl_path(&law, &law).unwrap().value, 0.0);
    }

    #[test]
    fn kl_dist_one_term() {
        let p = Dist::new(vec![1.0, 0.0]).unwrap();
        let q = Dist::new(vec![0.5, 0.5]).unwrap();
        let res = kl_dist(&p, &q).unwrap();
        assert!((res.value - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn kl_dist_missing_support_is_infinite_with_witness() {
        let p = Dist::new(vec![0.5, 0.5]).unwrap();
        let q = Dist::new(vec![1.0, 0.0]).unwrap();
        let res = kl_dist(&p, &q).unwrap();
        assert!(!res.is_finite());
        assert_eq!(res.infinite_support_witness, Some(vec![1]));
    }

    #[test]
    fn sigma_reversible_flip_at_uniform_is_zero() {
        let res = sigma_t(&flip_kernel(), &Dist::uniform(2), 3, CAP).unwrap();
        assert!(res.is_finite());
        assert!(res.value.abs() < 1e-12);
    }

    #[test]
    fn sigma_biased_cycle_matches_per_step_rate() {
        // At the uniform stationary law the asymmetry per step is
        // (p - q) ln(p/q).
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let res = sigma_t(&p, &Dist::uniform(3), 1, CAP).unwrap();
        let expect = 0.5 * 3.5f64.ln();
        assert!((res.value - expect).abs() < 1e-12);
        assert!((res.value - 0.626381).abs() < 1e-6);
    }

    #[test]
    fn sigma_positive_off_stationarity_even_under_detailed_balance() {
        let p = Kernel::from_rows(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let pi = stationary(&p, &ToleranceConfig::default()).unwrap().pi;
        assert!(check_detailed_balance(&p, &pi, 1e-10).unwrap().reversible);
        let rho = Dist::new(vec![0.5, 0.5]).unwrap();
        let res = sigma_t(&p, &rho, 1, CAP).unwrap();
        assert!(res.value > 1e-4);
    }

    #[test]
    fn sigma_infinite_on_one_way_support() {
        let p = Kernel::from_rows(vec![vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        let res = sigma_t(&p, &Dist::point_mass(0, 2), 1, CAP).unwrap();
        assert!(!res.is_finite());
        assert_eq!(res.infinite_support_witness, Some(vec![0, 1]));
    }

    #[test]
    fn coarse_pushforward_identity_lens_is_identity() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let law = path_law(&p, &Dist::uniform(3), 2, CAP).unwrap();
        let pushed = coarse_path_pushforward(&Lens::identity(3), &law).unwrap();
        assert_eq!(pushed, law);
    }

    #[test]
    fn coarse_pushforward_single_block_collapses() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let law = path_law(&p, &Dist::uniform(3), 2, CAP).unwrap();
        let pushed = coarse_path_pushforward(&Lens::single_block(3), &law).unwrap();
        assert_eq!(pushed.table().len(), 1);
        assert!((pushed.prob(&[0, 0, 0]) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coarse_pushforward_sums_fibers() {
        let p = crate::lens::tests::two_pair_leak_chain(0.3);
        let lens = Lens::new(vec![0, 0, 1, 1]).unwrap();
        let law = path_law(&p, &Dist::uniform(4), 2, CAP).unwrap();
        let pushed = coarse_path_pushforward(&lens, &law).unwrap();
        // Fiber of macro path (0,0,1): micro paths with z0, z1 in {0,1} and z2 in {2,3}.
        let mut manual = 0.0;
        for z0 in [0u16, 1] {
            for z1 in [0u16, 1] {
                for z2 in [2u16, 3] {
                    manual += law.prob(&[z0, z1, z2]);
                }
            }
        }
        assert!((pushed.prob(&[0, 0, 1]) - manual).abs() < 1e-14);
        assert!((pushed.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dpi_reversible_chain_zero_both_sides() {
        let lens = Lens::new(vec![0, 0]).unwrap();
        let audit = dpi_audit(&flip_kernel(), &Dist::uniform(2), &lens, 3, CAP).unwrap();
        assert!(audit.pass);
        assert!(audit.micro.value.abs() < 1e-12);
        assert!(audit.macro_.value.abs() < 1e-12);
    }

    #[test]
    fn dpi_identity_lens_macro_equals_micro() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let audit = dpi_audit(&p, &Dist::uniform(3), &Lens::identity(3), 2, CAP).unwrap();
        assert!(audit.pass);
        assert!((audit.micro.value - audit.macro_.value).abs() < 1e-14);
    }

    #[test]
    fn dpi_merging_lens_strictly_hides() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let lens = Lens::new(vec![0, 1, 1]).unwrap();
        let audit = dpi_audit(&p, &Dist::uniform(3), &lens, 2, CAP).unwrap();
        assert!(audit.pass);
        assert!(audit.macro_.value < audit.micro.value - 1e-6);
    }

    #[test]
    fn path_law_json_round_trips_in_wire_shape() {
        let p = biased_three_cycle(0.7, 0.2, 0.1);
        let law = path_law(&p, &Dist::uniform(3), 2, CAP).unwrap();
        let json = serde_json::to_value(&law).unwrap();
        assert_eq!(json["T"], 2);
        let entries = json["entries"].as_array().unwrap();
        assert_eq!(entries.len(), 27);
        // Lexicographic by path.
        assert_eq!(entries[0]["path"], serde_json::json!([0, 0, 0]));
        assert_eq!(entries[1]["path"], serde_json::json!([0, 0, 1]));
        let back: PathLaw = serde_json::from_value(json).unwrap();
        assert_eq!(back, law);
    }
}
