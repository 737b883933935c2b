//! Coarse-graining lenses, prototype lifts, the induced packaging endomap on
//! distributions, and its idempotence/retention diagnostics.
//!
//! A lens assigns every microstate to a block. Pushing a distribution forward
//! sums mass per block; lifting re-instantiates block mass through per-block
//! prototype distributions. Evolving `tau` steps, pushing forward, and
//! lifting yields the packaging endomap whose near-fixed prototypes are the
//! stable objects at that scale.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::kernel::{Dist, Kernel};
use crate::matrix::Matrix;

/// Surjective block assignment of microstates to labels `0..block_count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Lens {
    assignment: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Lens {
    /// Labels must cover `0..=max_label` with no empty block.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(CoreError::InvalidLens { context: "empty assignment".into() });
        }
        let block_count = assignment.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); block_count];
        for (state, &label) in assignment.iter().enumerate() {
            blocks[label].push(state);
        }
        if let Some(empty) = blocks.iter().position(Vec::is_empty) {
            return Err(CoreError::InvalidLens {
                context: format!("label {empty} has no states (assignment must be surjective)"),
            });
        }
        Ok(Self { assignment, blocks })
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).collect()).expect("identity assignment is surjective")
    }

    pub fn single_block(n: usize) -> Self {
        Self::new(vec![0; n]).expect("single block is surjective")
    }

    pub fn state_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn label_of(&self, state: usize) -> usize {
        self.assignment[state]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn block(&self, label: usize) -> &[usize] {
        &self.blocks[label]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Structural refinement test: every block of `self` sits inside one
    /// block of `coarse`.
    pub fn refines(&self, coarse: &Lens) -> bool {
        if self.state_count() != coarse.state_count() {
            return false;
        }
        self.blocks.iter().all(|block| {
            let first = coarse.label_of(block[0]);
            block.iter().all(|&z| coarse.label_of(z) == first)
        })
    }
}

impl TryFrom<Vec<usize>> for Lens {
    type Error = CoreError;

    fn try_from(assignment: Vec<usize>) -> Result<Self> {
        Lens::new(assignment)
    }
}

impl From<Lens> for Vec<usize> {
    fn from(lens: Lens) -> Self {
        lens.assignment
    }
}

/// One distribution per block, each supported inside its block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrototypeSet {
    prototypes: Vec<Dist>,
}

impl PrototypeSet {
    /// Validates support containment and per-prototype unit mass.
    pub fn new(lens: &Lens, prototypes: Vec<Dist>) -> Result<Self> {
        if prototypes.len() != lens.block_count() {
            return Err(CoreError::DimensionMismatch {
                expected: lens.block_count(),
                got: prototypes.len(),
            });
        }
        for (label, proto) in prototypes.iter().enumerate() {
            if proto.len() != lens.state_count() {
                return Err(CoreError::DimensionMismatch {
                    expected: lens.state_count(),
                    got: proto.len(),
                });
            }
            for (state, w) in proto.as_slice().iter().enumerate() {
                if *w > 0.0 && lens.label_of(state) != label {
                    return Err(CoreError::InvalidDistribution {
                        context: format!(
                            "prototype for block {label} has mass {w} at state {state} outside the block"
                        ),
                    });
                }
            }
        }
        Ok(Self { prototypes })
    }

    /// Uniform distribution on each block.
    pub fn uniform(lens: &Lens) -> Self {
        let n = lens.state_count();
        let prototypes = lens
            .blocks()
            .iter()
            .map(|block| {
                let mut w = vec![0.0; n];
                for &z in block {
                    w[z] = 1.0 / block.len() as f64;
                }
                Dist::new(w).expect("uniform block weights are a distribution")
            })
            .collect();
        Self { prototypes }
    }

    /// Point mass at a chosen representative per block.
    pub fn point_mass(lens: &Lens, representatives: &[usize]) -> Result<Self> {
        if representatives.len() != lens.block_count() {
            return Err(CoreError::DimensionMismatch {
                expected: lens.block_count(),
                got: representatives.len(),
            });
        }
        let n = lens.state_count();
        let prototypes = representatives
            .iter()
            .enumerate()
            .map(|(label, &rep)| {
                if rep >= n || lens.label_of(rep) != label {
                    return Err(CoreError::InvalidLens {
                        context: format!("representative {rep} is not in block {label}"),
                    });
                }
                Ok(Dist::point_mass(rep, n))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { prototypes })
    }

    /// Stationary distribution conditioned on each block.
    pub fn stationary_conditional(lens: &Lens, pi: &Dist) -> Result<Self> {
        if pi.len() != lens.state_count() {
            return Err(CoreError::DimensionMismatch {
                expected: lens.state_count(),
                got: pi.len(),
            });
        }
        let n = lens.state_count();
        let prototypes = lens
            .blocks()
            .iter()
            .map(|block| {
                let mut w = vec![0.0; n];
                for &z in block {
                    w[z] = pi.weight(z);
                }
                Dist::normalized(w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { prototypes })
    }

    pub fn block_count(&self) -> usize {
        self.prototypes.len()
    }

    pub fn prototype(&self, label: usize) -> &Dist {
        &self.prototypes[label]
    }

    pub fn prototypes(&self) -> &[Dist] {
        &self.prototypes
    }
}

/// Block-mass image of `mu` under the lens.
pub fn pushforward(lens: &Lens, mu: &Dist) -> Result<Dist> {
    if mu.len() != lens.state_count() {
        return Err(CoreError::DimensionMismatch {
            expected: lens.state_count(),
            got: mu.len(),
        });
    }
    let mut out = vec![0.0; lens.block_count()];
    for (state, w) in mu.as_slice().iter().enumerate() {
        out[lens.label_of(state)] += w;
    }
    Dist::new(out)
}

/// Re-instantiates block mass through the prototypes.
pub fn lift(prototypes: &PrototypeSet, nu: &Dist) -> Result<Dist> {
    if nu.len() != prototypes.block_count() {
        return Err(CoreError::DimensionMismatch {
            expected: prototypes.block_count(),
            got: nu.len(),
        });
    }
    let n = prototypes.prototype(0).len();
    let mut out = vec![0.0; n];
    for (label, mass) in nu.as_slice().iter().enumerate() {
        if *mass == 0.0 {
            continue;
        }
        for (state, w) in prototypes.prototype(label).as_slice().iter().enumerate() {
            out[state] += mass * w;
        }
    }
    Dist::new(out)
}

/// The packaging endomap at scale `tau`, realized as a kernel on the micro
/// space: evolve `tau` steps, push forward, lift.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalEndomap {
    matrix: Kernel,
    tau: usize,
    lens: Lens,
    prototypes: PrototypeSet,
}

impl EmpiricalEndomap {
    pub fn matrix(&self) -> &Kernel {
        &self.matrix
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn lens(&self) -> &Lens {
        &self.lens
    }

    pub fn prototypes(&self) -> &PrototypeSet {
        &self.prototypes
    }

    /// One application of the endomap to a distribution.
    pub fn apply(&self, mu: &Dist) -> Result<Dist> {
        crate::kernel::propagate(mu, &self.matrix, 1)
    }
}

/// Builds the endomap matrix `P^tau * Q * U` (row convention) and checks it
/// against the composed maps on every basis vector within `1e-14`.
pub fn build_endomap(
    p: &Kernel,
    lens: &Lens,
    prototypes: &PrototypeSet,
    tau: usize,
) -> Result<EmpiricalEndomap> {
    if tau == 0 {
        return Err(CoreError::TauZero);
    }
    let n = p.dim();
    if lens.state_count() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: lens.state_count() });
    }
    if prototypes.block_count() != lens.block_count() {
        return Err(CoreError::DimensionMismatch {
            expected: lens.block_count(),
            got: prototypes.block_count(),
        });
    }
    let k = lens.block_count();

    let mut q = Matrix::zeros(n, k);
    for state in 0..n {
        q.set(state, lens.label_of(state), 1.0);
    }
    let mut u = Matrix::zeros(k, n);
    for label in 0..k {
        for (state, w) in prototypes.prototype(label).as_slice().iter().enumerate() {
            u.set(label, state, *w);
        }
    }

    let p_tau = p.power(tau);
    let mat = p_tau.matrix().mul(&q)?.mul(&u)?;
    let endomap = Kernel::from_matrix_unchecked(mat);

    // The matrix acting on any basis vector must agree with composing the
    // three maps directly.
    for z in 0..n {
        let delta = Dist::point_mass(z, n);
        let via_matrix = crate::kernel::propagate(&delta, &endomap, 1)?;
        let evolved = crate::kernel::propagate(&delta, &p_tau, 1)?;
        let composed = lift(prototypes, &pushforward(lens, &evolved)?)?;
        let err = via_matrix.l1_distance(&composed);
        if err > 1e-14 {
            return Err(CoreError::ShapeMismatch {
                context: format!("endomap matrix disagrees with composed maps by {err} at state {z}"),
            });
        }
    }

    Ok(EmpiricalEndomap {
        matrix: endomap,
        tau,
        lens: lens.clone(),
        prototypes: prototypes.clone(),
    })
}

/// Worst-case one-vs-two-application TV gap, via the extreme-point formula
/// `½ · max_i Σ_j |(E² - E)_(i,j)|`.
pub fn idempotence_defect_tv(e: &EmpiricalEndomap) -> f64 {
    let m = e.matrix.matrix();
    let m2 = m.mul(m).expect("endomap matrix is square");
    let diff = m2.sub(m).expect("same dimensions");
    let n = diff.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        let row_l1: f64 = diff.row(i).iter().map(|v| v.abs()).sum();
        worst = worst.max(row_l1);
    }
    0.5 * worst
}

/// Worst-case TV leakage of a prototype's block mass after `tau` steps:
/// `max_x ||Q(u_x P^tau) - delta_x||_TV`.
pub fn retention_error(
    p: &Kernel,
    lens: &Lens,
    prototypes: &PrototypeSet,
    tau: usize,
) -> Result<f64> {
    if tau == 0 {
        return Err(CoreError::TauZero);
    }
    if lens.state_count() != p.dim() {
        return Err(CoreError::DimensionMismatch { expected: p.dim(), got: lens.state_count() });
    }
    if prototypes.block_count() != lens.block_count() {
        return Err(CoreError::DimensionMismatch {
            expected: lens.block_count(),
            got: prototypes.block_count(),
        });
    }
    let k = lens.block_count();
    let mut worst = 0.0f64;
    for label in 0..k {
        let evolved = crate::kernel::propagate(prototypes.prototype(label), p, tau)?;
        let pushed = pushforward(lens, &evolved)?;
        let target = Dist::point_mass(label, k);
        worst = worst.max(pushed.tv_distance(&target));
    }
    Ok(worst)
}

/// Per-block stability `s(x) = ||E(u_x) - u_x||_TV`.
pub fn prototype_stability(e: &EmpiricalEndomap) -> Vec<f64> {
    (0..e.lens.block_count())
        .map(|label| {
            let u = e.prototypes.prototype(label);
            let moved = e.apply(u).expect("dimensions agree by construction");
            moved.tv_distance(u)
        })
        .collect()
}

/// Direction of the stable-count change under refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefinementDirection {
    Reveals,
    Destroys,
    Preserved,
}

/// Stable-prototype counts under a coarse lens and a refining fine lens.
///
/// `distinct_stable_*` counts distinct stable prototype distributions, so a
/// collapse onto one prototype cannot masquerade as multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub stable_count_coarse: usize,
    pub stable_count_fine: usize,
    pub direction: RefinementDirection,
    pub distinct_stable_coarse: usize,
    pub distinct_stable_fine: usize,
    pub stability_coarse: Vec<f64>,
    pub stability_fine: Vec<f64>,
}

fn distinct_count(protos: &PrototypeSet, stable: &[bool]) -> usize {
    let mut seen: Vec<&Dist> = Vec::new();
    for (label, &is_stable) in stable.iter().enumerate() {
        if !is_stable {
            continue;
        }
        let d = protos.prototype(label);
        if !seen.iter().any(|s| {
            s.as_slice()
                .iter()
                .zip(d.as_slice())
                .all(|(a, b)| a.to_bits() == b.to_bits())
        }) {
            seen.push(d);
        }
    }
    seen.len()
}

/// Counts `epsilon`-stable prototypes under each lens and classifies the
/// effect of refining.
pub fn refinement_report(
    p: &Kernel,
    coarse: &Lens,
    coarse_prototypes: &PrototypeSet,
    fine: &Lens,
    fine_prototypes: &PrototypeSet,
    tau: usize,
    epsilon: f64,
) -> Result<RefinementReport> {
    if !fine.refines(coarse) {
        let (a, b) = first_refinement_violation(coarse, fine);
        return Err(CoreError::NotARefinement { a, b });
    }
    let e_coarse = build_endomap(p, coarse, coarse_prototypes, tau)?;
    let e_fine = build_endomap(p, fine, fine_prototypes, tau)?;
    let stability_coarse = prototype_stability(&e_coarse);
    let stability_fine = prototype_stability(&e_fine);
    let stable_c: Vec<bool> = stability_coarse.iter().map(|s| *s <= epsilon).collect();
    let stable_f: Vec<bool> = stability_fine.iter().map(|s| *s <= epsilon).collect();
    let stable_count_coarse = stable_c.iter().filter(|b| **b).count();
    let stable_count_fine = stable_f.iter().filter(|b| **b).count();
    let direction = match stable_count_fine.cmp(&stable_count_coarse) {
        std::cmp::Ordering::Greater => RefinementDirection::Reveals,
        std::cmp::Ordering::Less => RefinementDirection::Destroys,
        std::cmp::Ordering::Equal => RefinementDirection::Preserved,
    };
    Ok(RefinementReport {
        stable_count_coarse,
        stable_count_fine,
        direction,
        distinct_stable_coarse: distinct_count(coarse_prototypes, &stable_c),
        distinct_stable_fine: distinct_count(fine_prototypes, &stable_f),
        stability_coarse,
        stability_fine,
    })
}

fn first_refinement_violation(coarse: &Lens, fine: &Lens) -> (usize, usize) {
    if coarse.state_count() != fine.state_count() {
        return (0, 0);
    }
    for block in fine.blocks() {
        let first = block[0];
        for &z in &block[1..] {
            if coarse.label_of(z) != coarse.label_of(first) {
                return (first, z);
            }
        }
    }
    (0, 0)
}
