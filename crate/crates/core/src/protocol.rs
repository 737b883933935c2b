//! Autonomous lifted protocol chains on the product of a state space and a
//! finite phase space, the clock audit that separates genuine drive from
//! hidden-schedule artifacts, and stroboscopic kernel products.

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{CoreError, Result};
use crate::kernel::{
    check_detailed_balance, stationary, strongly_connected_components, Dist, Kernel,
};
use crate::lens::Lens;
use crate::matrix::Matrix;
use crate::paths::{coarse_path_pushforward, kl_path, path_law, reverse_pushforward, KlResult};

/// An autonomous protocol: a phase walk `S` on `m` phases, one state kernel
/// per phase, and a mixing weight `alpha` for phase-vs-state updates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFamily {
    pub alpha: f64,
    pub phase_kernel: Kernel,
    pub state_kernels: Vec<Kernel>,
}

impl ProtocolFamily {
    pub fn new(alpha: f64, phase_kernel: Kernel, state_kernels: Vec<Kernel>) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CoreError::InvalidConfig {
                context: format!("alpha must lie in [0, 1], got {alpha}"),
            });
        }
        let m = phase_kernel.dim();
        if m < 2 {
            return Err(CoreError::InvalidConfig {
                context: format!("phase count must be at least 2, got {m}"),
            });
        }
        if state_kernels.len() != m {
            return Err(CoreError::DimensionMismatch { expected: m, got: state_kernels.len() });
        }
        let x_dim = state_kernels[0].dim();
        for k in &state_kernels {
            if k.dim() != x_dim {
                return Err(CoreError::DimensionMismatch { expected: x_dim, got: k.dim() });
            }
        }
        Ok(Self { alpha, phase_kernel, state_kernels })
    }

    pub fn phase_count(&self) -> usize {
        self.phase_kernel.dim()
    }

    pub fn state_count(&self) -> usize {
        self.state_kernels[0].dim()
    }
}

/// The phase-included chain on the product space, with the flattening
/// convention `(x, phi) -> x * m + phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedChain {
    pub kernel: Kernel,
    pub state_dim: usize,
    pub phase_dim: usize,
}

impl LiftedChain {
    pub fn flat_index(&self, x: usize, phi: usize) -> usize {
        x * self.phase_dim + phi
    }

    pub fn unflatten(&self, idx: usize) -> (usize, usize) {
        (idx / self.phase_dim, idx % self.phase_dim)
    }

    /// Lens projecting the product space onto the state coordinate.
    pub fn state_projection(&self) -> Lens {
        let assignment = (0..self.state_dim * self.phase_dim)
            .map(|idx| idx / self.phase_dim)
            .collect();
        Lens::new(assignment).expect("projection is surjective")
    }
}

/// Builds the lifted kernel: with probability `alpha` the phase moves by `S`
/// while the state stays put; otherwise the state moves by `K_phi` while the
/// phase stays put.
pub fn lift_protocol(fam: &ProtocolFamily) -> Result<LiftedChain> {
    let m = fam.phase_count();
    let x_dim = fam.state_count();
    let n = x_dim * m;
    let mut mat = Matrix::zeros(n, n);
    for x in 0..x_dim {
        for phi in 0..m {
            let row = x * m + phi;
            for phi2 in 0..m {
                let col = x * m + phi2;
                let v = fam.alpha * fam.phase_kernel.entry(phi, phi2);
                if v != 0.0 {
                    mat.set(row, col, mat.get(row, col) + v);
                }
            }
            for x2 in 0..x_dim {
                let col = x2 * m + phi;
                let v = (1.0 - fam.alpha) * fam.state_kernels[phi].entry(x, x2);
                if v != 0.0 {
                    mat.set(row, col, mat.get(row, col) + v);
                }
            }
        }
    }
    Ok(LiftedChain {
        kernel: Kernel::from_matrix_unchecked(mat),
        state_dim: x_dim,
        phase_dim: m,
    })
}

/// Which of the trap-audit hypotheses actually held.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapHypotheses {
    /// Phase kernel is reversible w.r.t. its own stationary distribution.
    pub phase_reversible: bool,
    /// All state kernels share one stationary distribution.
    pub common_stationary: bool,
    /// Every state kernel is reversible w.r.t. that common distribution.
    pub state_kernels_reversible: bool,
}

impl TrapHypotheses {
    pub fn all_hold(&self) -> bool {
        self.phase_reversible && self.common_stationary && self.state_kernels_reversible
    }
}

/// Audit of one closed recurrent class of a reducible lifted chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentAudit {
    pub states: Vec<usize>,
    pub sigma: KlResult,
}

/// Result of the clock audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapAudit {
    pub hypotheses: TrapHypotheses,
    /// Path reversal asymmetry of the lifted chain at the audited
    /// stationary distribution.
    pub lifted_sigma: KlResult,
    /// Asymmetry of the observed (state-projected) path law.
    pub projected_sigma: KlResult,
    /// Detailed balance of the lifted chain at the audited distribution.
    pub reversible_cert: bool,
    pub stationary_used: Dist,
    pub irreducible: bool,
    /// Per-closed-class audits when the lifted chain is reducible.
    pub components: Vec<ComponentAudit>,
}

const HYPOTHESIS_TOL: f64 = 1e-9;

/// Runs the clock audit at horizon `T`.
///
/// The audit hypotheses (reversible phase walk, common reversible state
/// kernels) are checked rather than assumed; the audit runs either way. When
/// they hold the product distribution is stationary for the lifted chain and
/// is used directly; otherwise the audit falls back to the lifted chain's
/// own stationary distribution (or, if reducible, to the uniform mixture of
/// per-class stationaries, which is stationary for the full chain).
pub fn trap_audit(
    fam: &ProtocolFamily,
    horizon: usize,
    cap: u128,
    cfg: &ToleranceConfig,
) -> Result<TrapAudit> {
    let lifted = lift_protocol(fam)?;
    let m = fam.phase_count();
    let x_dim = fam.state_count();

    let phase_stat = stationary(&fam.phase_kernel, cfg).ok().map(|r| r.pi);
    let phase_reversible = phase_stat
        .as_ref()
        .map(|s| {
            check_detailed_balance(&fam.phase_kernel, s, HYPOTHESIS_TOL)
                .map(|db| db.reversible)
                .unwrap_or(false)
        })
        .unwrap_or(false);

    let state_stats: Vec<Option<Dist>> = fam
        .state_kernels
        .iter()
        .map(|k| stationary(k, cfg).ok().map(|r| r.pi))
        .collect();
    let common_stationary = state_stats.iter().all(Option::is_some)
        && state_stats.windows(2).all(|w| {
            w[0].as_ref().unwrap().l1_distance(w[1].as_ref().unwrap()) <= HYPOTHESIS_TOL
        });
    let state_kernels_reversible = common_stationary && {
        let pi = state_stats[0].as_ref().unwrap();
        fam.state_kernels.iter().all(|k| {
            check_detailed_balance(k, pi, HYPOTHESIS_TOL)
                .map(|db| db.reversible)
                .unwrap_or(false)
        })
    };

    let hypotheses =
        TrapHypotheses { phase_reversible, common_stationary, state_kernels_reversible };

    let components = strongly_connected_components(&lifted.kernel, cfg.zero_tol);
    let irreducible = components.len() == 1;

    let (mu, component_audits) = if hypotheses.all_hold() {
        let s = phase_stat.as_ref().expect("phase hypothesis held");
        let pi = state_stats[0].as_ref().expect("state hypothesis held");
        let mut w = vec![0.0; x_dim * m];
        for x in 0..x_dim {
            for phi in 0..m {
                w[lifted.flat_index(x, phi)] = pi.weight(x) * s.weight(phi);
            }
        }
        (Dist::normalized(w)?, Vec::new())
    } else if irreducible {
        (stationary(&lifted.kernel, cfg)?.pi, Vec::new())
    } else {
        reducible_stationary_mixture(&lifted.kernel, &components, horizon, cap, cfg)?
    };

    let law = path_law(&lifted.kernel, &mu, horizon, cap)?;
    let lifted_sigma = kl_path(&law, &reverse_pushforward(&law))?;
    let projected = coarse_path_pushforward(&lifted.state_projection(), &law)?;
    let projected_sigma = kl_path(&projected, &reverse_pushforward(&projected))?;
    let reversible_cert =
        check_detailed_balance(&lifted.kernel, &mu, HYPOTHESIS_TOL)?.reversible;

    Ok(TrapAudit {
        hypotheses,
        lifted_sigma,
        projected_sigma,
        reversible_cert,
        stationary_used: mu,
        irreducible,
        components: component_audits,
    })
}

/// Closed recurrent classes get their stationary distributions solved in
/// isolation; the mixture (equal weight per closed class) is stationary for
/// the full chain. Per-class path asymmetries are reported alongside.
fn reducible_stationary_mixture(
    kernel: &Kernel,
    components: &[Vec<usize>],
    horizon: usize,
    cap: u128,
    cfg: &ToleranceConfig,
) -> Result<(Dist, Vec<ComponentAudit>)> {
    let n = kernel.dim();
    let mut closed_classes = Vec::new();
    for comp in components {
        let is_closed = comp.iter().all(|&i| {
            (0..n).all(|j| comp.contains(&j) || kernel.entry(i, j) <= cfg.zero_tol)
        });
        if is_closed {
            closed_classes.push(comp.clone());
        }
    }
    if closed_classes.is_empty() {
        return Err(CoreError::NotIrreducible { components: components.len() });
    }

    let mut mixture = vec![0.0; n];
    let mut audits = Vec::new();
    let weight = 1.0 / closed_classes.len() as f64;
    for class in &closed_classes {
        let rows: Vec<Vec<f64>> = class
            .iter()
            .map(|&i| class.iter().map(|&j| kernel.entry(i, j)).collect())
            .collect();
        let sub = Kernel::from_rows(rows)?;
        let pi = if class.len() == 1 {
            Dist::point_mass(0, 1)
        } else {
            stationary(&sub, cfg)?.pi
        };
        for (local, &global) in class.iter().enumerate() {
            mixture[global] += weight * pi.weight(local);
        }
        let law = path_law(&sub, &pi, horizon, cap)?;
        let sigma = kl_path(&law, &reverse_pushforward(&law))?;
        audits.push(ComponentAudit { states: class.clone(), sigma });
    }
    Ok((Dist::normalized(mixture)?, audits))
}

/// Ordered product of kernels, applied left to right in time: the returned
/// matrix is `K[0] * K[1] * ...` in the row convention, i.e. the operator
/// composition "last after ... after first".
pub fn stroboscopic_kernel(kernels: &[Kernel]) -> Result<Kernel> {
    let first = kernels.first().ok_or(CoreError::ShapeMismatch {
        context: "stroboscopic product of an empty kernel list".into(),
    })?;
    let mut acc = first.clone();
    for k in &kernels[1..] {
        acc = acc.compose(k)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::validate_kernel;

    const CAP: u128 = 10_000_000;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    /// The two noncommuting state kernels used across the protocol tests,
    /// each symmetric (hence reversible w.r.t. uniform).
    pub(crate) fn noncommuting_state_kernels() -> (Kernel, Kernel) {
        let loose = cfg().with_row_sum_tol(1e-5);
        let k0 = validate_kernel(
            &[
                vec![0.573333, 0.393333, 0.033333],
                vec![0.393333, 0.573333, 0.033333],
                vec![0.033333, 0.033333, 0.933333],
            ],
            &loose,
        )
        .unwrap()
        .kernel;
        let k1 = validate_kernel(
            &[
                vec![0.933333, 0.033333, 0.033333],
                vec![0.033333, 0.573333, 0.393333],
                vec![0.033333, 0.393333, 0.573333],
            ],
            &loose,
        )
        .unwrap()
        .kernel;
        (k0, k1)
    }

    pub(crate) fn unbiased_two_phase() -> Kernel {
        Kernel::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
    }

    fn biased_three_phase() -> Kernel {
        Kernel::from_rows(vec![
            vec![0.1, 0.7, 0.2],
            vec![0.2, 0.1, 0.7],
            vec![0.7, 0.2, 0.1],
        ])
        .unwrap()
    }

    #[test]
    fn lift_alpha_one_freezes_state() {
        let (k0, k1) = noncommuting_state_kernels();
        let fam = ProtocolFamily::new(1.0, unbiased_two_phase(), vec![k0, k1]).unwrap();
        let lifted = lift_protocol(&fam).unwrap();
        for x in 0..3 {
            for phi in 0..2 {
                let row = lifted.flat_index(x, phi);
                for x2 in 0..3 {
                    for phi2 in 0..2 {
                        let col = lifted.flat_index(x2, phi2);
                        let expect = if x2 == x { 0.5 } else { 0.0 };
                        assert!((lifted.kernel.entry(row, col) - expect).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn lift_alpha_zero_is_block_diagonal_in_phase() {
        let (k0, k1) = noncommuting_state_kernels();
        let fam =
            ProtocolFamily::new(0.0, unbiased_two_phase(), vec![k0.clone(), k1.clone()]).unwrap();
        let lifted = lift_protocol(&fam).unwrap();
        for x in 0..3 {
            for phi in 0..2 {
                let row = lifted.flat_index(x, phi);
                for x2 in 0..3 {
                    for phi2 in 0..2 {
                        let col = lifted.flat_index(x2, phi2);
                        let expect = if phi2 == phi {
                            [&k0, &k1][phi].entry(x, x2)
                        } else {
                            0.0
                        };
                        assert!((lifted.kernel.entry(row, col) - expect).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn lift_spot_entries_match_formula() {
        let (k0, k1) = noncommuting_state_kernels();
        let s = unbiased_two_phase();
        let fam = ProtocolFamily::new(0.5, s.clone(), vec![k0.clone(), k1.clone()]).unwrap();
        let lifted = lift_protocol(&fam).unwrap();
        assert_eq!(lifted.kernel.dim(), 6);
        // Phase move: (x=1, phi=0) -> (x=1, phi=1).
        let r = lifted.flat_index(1, 0);
        let c = lifted.flat_index(1, 1);
        assert!((lifted.kernel.entry(r, c) - 0.5 * s.entry(0, 1)).abs() < 1e-15);
        // State move: (x=1, phi=0) -> (x=2, phi=0).
        let c2 = lifted.flat_index(2, 0);
        assert!((lifted.kernel.entry(r, c2) - 0.5 * k0.entry(1, 2)).abs() < 1e-15);
        // Diagonal accumulates both the phase-hold and state-hold terms.
        let d = lifted.flat_index(1, 0);
        let expect = 0.5 * s.entry(0, 0) + 0.5 * k0.entry(1, 1);
        assert!((lifted.kernel.entry(d, d) - expect).abs() < 1e-15);
        // Rows remain stochastic.
        for i in 0..6 {
            let sum: f64 = lifted.kernel.row(i).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        let _ = k1;
    }

    #[test]
    fn trap_audit_unbiased_protocol_is_silent() {
        let (k0, k1) = noncommuting_state_kernels();
        let fam = ProtocolFamily::new(0.5, unbiased_two_phase(), vec![k0, k1]).unwrap();
        let audit = trap_audit(&fam, 3, CAP, &cfg()).unwrap();
        assert!(audit.hypotheses.all_hold());
        assert!(audit.reversible_cert);
        assert!(audit.lifted_sigma.value.abs() < 1e-10);
        assert!(audit.projected_sigma.value.abs() < 1e-10);
    }

    #[test]
    fn trap_audit_biased_phase_cycle_is_driven() {
        let (k0, k1) = noncommuting_state_kernels();
        let fam = ProtocolFamily::new(
            0.5,
            biased_three_phase(),
            vec![k0.clone(), k1, k0],
        )
        .unwrap();
        let audit = trap_audit(&fam, 2, CAP, &cfg()).unwrap();
        assert!(!audit.hypotheses.phase_reversible);
        assert!(!audit.reversible_cert);
        assert!(audit.lifted_sigma.value > 1e-4);
    }

    #[test]
    fn trap_audit_alpha_one_pure_phase_walk() {
        let (k0, k1) = noncommuting_state_kernels();
        let fam = ProtocolFamily::new(1.0, unbiased_two_phase(), vec![k0, k1]).unwrap();
        let audit = trap_audit(&fam, 3, CAP, &cfg()).unwrap();
        assert!(audit.hypotheses.all_hold());
        assert!(!audit.irreducible);
        assert!(audit.lifted_sigma.value.abs() < 1e-10);
        assert!(audit.projected_sigma.value.abs() < 1e-10);
    }

    #[test]
    fn trap_audit_reports_components_when_hypotheses_fail_and_reducible() {
        // Two decoupled state kernels with different stationaries, alpha = 0:
        // the lifted chain splits into two phase sectors.
        let ka = Kernel::from_rows(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let kb = Kernel::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let fam = ProtocolFamily::new(0.0, unbiased_two_phase(), vec![ka, kb]).unwrap();
        let audit = trap_audit(&fam, 2, CAP, &cfg()).unwrap();
        assert!(!audit.hypotheses.common_stationary);
        assert!(!audit.irreducible);
        assert_eq!(audit.components.len(), 2);
        for comp in &audit.components {
            assert!(comp.sigma.value.abs() < 1e-10);
        }
    }

    #[test]
    fn strobe_identity_then_kernel_is_kernel() {
        let (k0, _) = noncommuting_state_kernels();
        let out = stroboscopic_kernel(&[Kernel::identity(3), k0.clone()]).unwrap();
        let diff = out.matrix().sub(k0.matrix()).unwrap();
        assert!(diff.max_abs_entry() < 1e-15);
    }

    #[test]
    fn strobe_singleton_returns_same() {
        let (k0, _) = noncommuting_state_kernels();
        let out = stroboscopic_kernel(std::slice::from_ref(&k0)).unwrap();
        assert_eq!(out.to_rows(), k0.to_rows());
    }

    #[test]
    fn strobe_product_is_driven_at_its_stationary() {
        let (k0, k1) = noncommuting_state_kernels();
        let product = stroboscopic_kernel(&[k0, k1]).unwrap();
        let pi = stationary(&product, &cfg()).unwrap().pi;
        let law = path_law(&product, &pi, 2, CAP).unwrap();
        let sigma = kl_path(&law, &reverse_pushforward(&law)).unwrap();
        assert!(sigma.value > 1e-3, "sigma {}", sigma.value);
    }

    #[test]
    fn commutator_of_noncommuting_kernels_is_pinned() {
        let (k0, k1) = noncommuting_state_kernels();
        let c = crate::kernel::commutator_max_abs(&k0, &k1).unwrap();
        assert!((c - 0.1296).abs() < 5e-4, "commutator {c}");
    }
}
