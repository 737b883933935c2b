//! Discrete-time capacity calculus: causal convolution bridges, positive
//! supplied work, kernel-mass throughput bounds, parallel additivity,
//! capacity curves, latency lower bounds, divergence verdicts, and the
//! route-mismatch gain control.
//!
//! Time is a unit-step grid throughout; every integral becomes a sum, so
//! all inequalities are exactly computable.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;

/// Causal convolution response: `y(t) = sum_s K(t - s) u(s)` with a finite
/// kernel sequence `K(0..=L)` of square matrices on the port space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionBridge {
    kernels: Vec<Matrix>,
    port_dim: usize,
}

impl ConvolutionBridge {
    pub fn new(kernels: Vec<Matrix>, port_dim: usize) -> Result<Self> {
        for (lag, k) in kernels.iter().enumerate() {
            if k.rows() != port_dim || k.cols() != port_dim {
                return Err(CoreError::ShapeMismatch {
                    context: format!(
                        "kernel at lag {lag} is {}x{}, expected {port_dim}x{port_dim}",
                        k.rows(),
                        k.cols()
                    ),
                });
            }
        }
        Ok(Self { kernels, port_dim })
    }

    /// Memoryless identity: `K(0) = I`.
    pub fn identity(port_dim: usize) -> Self {
        Self { kernels: vec![Matrix::identity(port_dim)], port_dim }
    }

    /// Pure delay: `K(lag) = I`, zero response before it.
    pub fn delay(port_dim: usize, lag: usize) -> Self {
        let mut kernels = vec![Matrix::zeros(port_dim, port_dim); lag];
        kernels.push(Matrix::identity(port_dim));
        Self { kernels, port_dim }
    }

    /// Scalar geometric kernel `K(t) = c * r^t` for `t = 0..=len`.
    pub fn scalar_geometric(c: f64, r: f64, len: usize) -> Self {
        let kernels = (0..=len)
            .map(|t| {
                Matrix::from_rows(vec![vec![c * r.powi(t as i32)]])
                    .expect("1x1 matrix is well formed")
            })
            .collect();
        Self { kernels, port_dim: 1 }
    }

    pub fn port_dim(&self) -> usize {
        self.port_dim
    }

    pub fn kernels(&self) -> &[Matrix] {
        &self.kernels
    }

    pub fn lag_count(&self) -> usize {
        self.kernels.len()
    }
}

/// Finite port signal: one `port_dim` vector per time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortSignal {
    samples: Vec<Vec<f64>>,
}

impl PortSignal {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self> {
        let dim = samples.first().map_or(0, Vec::len);
        for (t, s) in samples.iter().enumerate() {
            if s.len() != dim {
                return Err(CoreError::ShapeMismatch {
                    context: format!("sample {t} has dimension {}, expected {dim}", s.len()),
                });
            }
        }
        Ok(Self { samples })
    }

    pub fn constant(value: Vec<f64>, steps: usize) -> Self {
        Self { samples: vec![value; steps] }
    }

    pub fn horizon(&self) -> usize {
        self.samples.len()
    }

    pub fn port_dim(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn sample(&self, t: usize) -> &[f64] {
        &self.samples[t]
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// `sum_t ||u(t)||^2` over a window.
    pub fn energy(&self, window: (usize, usize)) -> f64 {
        (window.0..=window.1)
            .map(|t| self.samples[t].iter().map(|v| v * v).sum::<f64>())
            .sum()
    }
}

fn check_window(window: (usize, usize), horizon: usize) -> Result<()> {
    let (s, t) = window;
    if s > t || t >= horizon {
        return Err(CoreError::BadWindow { start: s, end: t, horizon });
    }
    Ok(())
}

/// Response to the input truncated to `[s, t]` (fresh-start semantics):
/// `y(tau) = sum_{sigma=s..tau} K(tau - sigma) u(sigma)` inside the window,
/// zero outside. The returned signal has the same horizon as `u`.
pub fn apply_bridge(
    z: &ConvolutionBridge,
    u: &PortSignal,
    window: (usize, usize),
) -> Result<PortSignal> {
    if u.port_dim() != z.port_dim {
        return Err(CoreError::DimensionMismatch { expected: z.port_dim, got: u.port_dim() });
    }
    check_window(window, u.horizon())?;
    let (s, t) = window;
    let mut samples = vec![vec![0.0; z.port_dim]; u.horizon()];
    for (tau, slot) in samples.iter_mut().enumerate().take(t + 1).skip(s) {
        let mut acc = vec![0.0; z.port_dim];
        for sigma in s..=tau {
            let lag = tau - sigma;
            if lag >= z.kernels.len() {
                continue;
            }
            let contrib = z.kernels[lag].mat_vec_mul(u.sample(sigma))?;
            for (a, c) in acc.iter_mut().zip(contrib.iter()) {
                *a += c;
            }
        }
        *slot = acc;
    }
    PortSignal::new(samples)
}

/// Positive supplied work over the window:
/// `W+ = sum_tau max(<u(tau), y(tau)>, 0)` with unit time step.
pub fn positive_work(u: &PortSignal, y: &PortSignal, window: (usize, usize)) -> Result<f64> {
    if u.port_dim() != y.port_dim() || u.horizon() != y.horizon() {
        return Err(CoreError::ShapeMismatch {
            context: format!(
                "signals of shape {}x{} vs {}x{}",
                u.horizon(),
                u.port_dim(),
                y.horizon(),
                y.port_dim()
            ),
        });
    }
    check_window(window, u.horizon())?;
    let mut acc = 0.0;
    for tau in window.0..=window.1 {
        let supply: f64 =
            u.sample(tau).iter().zip(y.sample(tau)).map(|(a, b)| a * b).sum();
        acc += supply.max(0.0);
    }
    Ok(acc)
}

/// `M = sum_t opnorm(K(t))`; an explicit throughput constant for the bridge.
pub fn kernel_mass(z: &ConvolutionBridge) -> f64 {
    z.kernels.iter().map(Matrix::opnorm).sum()
}

/// Worst observed work-to-energy ratio versus the kernel-mass certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcapAudit {
    pub max_ratio: f64,
    pub certified_bound: f64,
    pub pass: bool,
}

const ICAP_TOL: f64 = 1e-10;

/// Checks `W+ <= kernel_mass * energy` over every signal and window in the
/// batch. Zero-energy windows contribute ratio 0.
pub fn icap_audit(
    z: &ConvolutionBridge,
    signals: &[PortSignal],
    windows: &[(usize, usize)],
) -> Result<IcapAudit> {
    let mass = kernel_mass(z);
    let mut max_ratio = 0.0f64;
    for u in signals {
        for &window in windows {
            if window.1 >= u.horizon() {
                continue;
            }
            let y = apply_bridge(z, u, window)?;
            let work = positive_work(u, &y, window)?;
            let energy = u.energy(window);
            let ratio = if energy > 0.0 { work / energy } else { 0.0 };
            max_ratio = max_ratio.max(ratio);
        }
    }
    Ok(IcapAudit { max_ratio, certified_bound: mass, pass: max_ratio <= mass + ICAP_TOL })
}

/// Entrywise parallel sum of bridges on a shared port space; shorter kernel
/// sequences are zero-padded.
pub fn parallel_sum(bridges: &[ConvolutionBridge]) -> Result<ConvolutionBridge> {
    let first = bridges.first().ok_or(CoreError::ShapeMismatch {
        context: "parallel sum of an empty bridge list".into(),
    })?;
    let port_dim = first.port_dim;
    let max_lags = bridges.iter().map(ConvolutionBridge::lag_count).max().unwrap_or(0);
    let mut kernels = vec![Matrix::zeros(port_dim, port_dim); max_lags];
    for bridge in bridges {
        if bridge.port_dim != port_dim {
            return Err(CoreError::DimensionMismatch {
                expected: port_dim,
                got: bridge.port_dim,
            });
        }
        for (lag, k) in bridge.kernels.iter().enumerate() {
            kernels[lag] = kernels[lag].add(k)?;
        }
    }
    ConvolutionBridge::new(kernels, port_dim)
}

/// Summed kernel-mass certificate for a parallel bank of bridges; the summed
/// bridge itself passes the throughput audit against this constant.
pub fn parallel_capacity(bridges: &[ConvolutionBridge]) -> Result<f64> {
    if bridges.is_empty() {
        return Err(CoreError::ShapeMismatch {
            context: "parallel capacity of an empty bridge list".into(),
        });
    }
    let port_dim = bridges[0].port_dim;
    for bridge in bridges {
        if bridge.port_dim != port_dim {
            return Err(CoreError::DimensionMismatch {
                expected: port_dim,
                got: bridge.port_dim,
            });
        }
    }
    Ok(bridges.iter().map(kernel_mass).sum())
}

/// Divergence verdict for a reciprocal-capacity series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Diverges,
    Converges,
    Undetermined,
}

/// What the verdict was based on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictBasis {
    ClosedForm,
    PartialSum,
}

/// Linear capacity growth `Cap(j) = Lambda0 * C0 * (j + 1)` with its
/// reciprocal partial sums; the harmonic comparison settles divergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityCurve {
    pub caps: Vec<f64>,
    pub reciprocal_partial_sums: Vec<f64>,
    pub verdict: Verdict,
}

pub fn ect_capacity_curve(lambda0: f64, c0: f64, j_max: usize) -> CapacityCurve {
    let caps: Vec<f64> = (0..=j_max).map(|j| lambda0 * c0 * (j + 1) as f64).collect();
    let mut acc = 0.0;
    let reciprocal_partial_sums = caps
        .iter()
        .map(|c| {
            acc += 1.0 / c;
            acc
        })
        .collect();
    CapacityCurve { caps, reciprocal_partial_sums, verdict: Verdict::Diverges }
}

/// Per-depth capacity factor: polynomial `c * (j+1)^exponent`, geometric
/// `c * ratio^j`, or an explicit table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ScheduleForm {
    Poly { c: f64, exponent: f64 },
    Geometric { c: f64, ratio: f64 },
    Table { values: Vec<f64> },
}

impl ScheduleForm {
    fn eval(&self, j: usize) -> Result<f64> {
        let v = match self {
            ScheduleForm::Poly { c, exponent } => c * ((j + 1) as f64).powf(*exponent),
            ScheduleForm::Geometric { c, ratio } => c * ratio.powi(j as i32),
            ScheduleForm::Table { values } => *values.get(j).ok_or_else(|| {
                CoreError::ShapeMismatch {
                    context: format!("schedule table has {} entries, needs index {j}", values.len()),
                }
            })?,
        };
        if !v.is_finite() || v <= 0.0 {
            return Err(CoreError::InvalidConfig {
                context: format!("capacity factor at depth {j} is {v}, must be positive"),
            });
        }
        Ok(v)
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ScheduleForm::Poly { c, .. } => *c > 0.0,
            ScheduleForm::Geometric { c, ratio } => *c > 0.0 && *ratio > 0.0,
            ScheduleForm::Table { values } => {
                !values.is_empty() && values.iter().all(|v| *v > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(CoreError::InvalidConfig {
                context: "schedule factors must be positive".into(),
            })
        }
    }
}

/// Work quantum per depth: constant, or geometrically decaying (the latter
/// breaks the uniform-work hypothesis and is flagged).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSchedule {
    Constant(f64),
    Geometric { base: f64, ratio: f64 },
}

impl ThetaSchedule {
    fn eval(&self, j: usize) -> f64 {
        match self {
            ThetaSchedule::Constant(v) => *v,
            ThetaSchedule::Geometric { base, ratio } => base * ratio.powi(j as i32),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ThetaSchedule::Constant(v) => *v > 0.0,
            ThetaSchedule::Geometric { base, ratio } => *base > 0.0 && *ratio > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(CoreError::InvalidConfig { context: "theta must be positive".into() })
        }
    }

    /// True when the quantum is not bounded below by a positive constant.
    pub fn vanishes(&self) -> bool {
        matches!(self, ThetaSchedule::Geometric { ratio, .. } if *ratio < 1.0)
    }
}

/// Per-depth capacity data: work quantum, throughput factor, energy-density
/// factor, and the evaluation depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitySchedule {
    pub theta: ThetaSchedule,
    pub lambda: ScheduleForm,
    pub bbar: ScheduleForm,
    pub j_max: usize,
}

impl CapacitySchedule {
    pub fn validate(&self) -> Result<()> {
        self.theta.validate()?;
        self.lambda.validate()?;
        self.bbar.validate()
    }

    pub fn cap_at(&self, j: usize) -> Result<f64> {
        Ok(self.lambda.eval(j)? * self.bbar.eval(j)?)
    }
}

/// Latency lower bounds `dt_j = theta_j / Cap(j)` with cumulative times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub delta_t: Vec<f64>,
    /// `t_J = sum_{j < J} dt_j`, reported for `J = 1..=j_max+1`.
    pub cumulative: Vec<f64>,
    /// Set when the work quantum decays to zero: the latency floors then
    /// vanish and boundedness of the cumulative time is uninformative.
    pub work_quantum_fails: bool,
}

pub fn latency_bounds(sched: &CapacitySchedule) -> Result<LatencyReport> {
    sched.validate()?;
    let mut delta_t = Vec::with_capacity(sched.j_max + 1);
    let mut cumulative = Vec::with_capacity(sched.j_max + 1);
    let mut acc = 0.0;
    for j in 0..=sched.j_max {
        let dt = sched.theta.eval(j) / sched.cap_at(j)?;
        acc += dt;
        delta_t.push(dt);
        cumulative.push(acc);
    }
    Ok(LatencyReport { delta_t, cumulative, work_quantum_fails: sched.theta.vanishes() })
}

/// Divergence decision for `sum_j 1/Cap(j)`.
///
/// Closed forms are decided exactly (p-series, ratio test); tabulated
/// schedules only ever report partial sums — finitely many terms never
/// promote to "diverges".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoZenoDecision {
    pub verdict: Verdict,
    pub basis: VerdictBasis,
    /// Total polynomial exponent when both factors are polynomial.
    pub alpha_plus_beta: Option<f64>,
    pub reciprocal_partial_sum: f64,
}

pub fn no_zeno_decision(sched: &CapacitySchedule) -> Result<NoZenoDecision> {
    sched.validate()?;
    let mut partial = 0.0;
    for j in 0..=sched.j_max {
        partial += 1.0 / sched.cap_at(j)?;
    }

    // Closed-form combination: Cap(j) = c (j+1)^alpha ratio^j.
    let closed = |form: &ScheduleForm| -> Option<(f64, f64)> {
        match form {
            ScheduleForm::Poly { exponent, .. } => Some((*exponent, 1.0)),
            ScheduleForm::Geometric { ratio, .. } => Some((0.0, *ratio)),
            ScheduleForm::Table { .. } => None,
        }
    };
    let combined = closed(&sched.lambda).zip(closed(&sched.bbar));
    let decision = match combined {
        None => NoZenoDecision {
            verdict: Verdict::Undetermined,
            basis: VerdictBasis::PartialSum,
            alpha_plus_beta: None,
            reciprocal_partial_sum: partial,
        },
        Some(((a1, r1), (a2, r2))) => {
            let alpha = a1 + a2;
            let ratio = r1 * r2;
            let verdict = if ratio > 1.0 || (ratio == 1.0 && alpha > 1.0) {
                Verdict::Converges
            } else {
                Verdict::Diverges
            };
            let both_poly = matches!(sched.lambda, ScheduleForm::Poly { .. })
                && matches!(sched.bbar, ScheduleForm::Poly { .. });
            NoZenoDecision {
                verdict,
                basis: VerdictBasis::ClosedForm,
                alpha_plus_beta: both_poly.then_some(alpha),
                reciprocal_partial_sum: partial,
            }
        }
    };
    Ok(decision)
}

/// Gain-control audit for one-shot vs two-step packaging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteMismatchAudit {
    /// `opnorm(direct - step1 * step2)`.
    pub rm: f64,
    pub gain_direct: f64,
    /// `opnorm(step1) * opnorm(step2) + rm`.
    pub gain_bound: f64,
    pub pass: bool,
}

const ROUTE_TOL: f64 = 1e-10;

/// `direct` maps the deepest level straight to the shallowest; `step1` and
/// `step2` are the two single-level packagings. The gain bound follows
/// from the triangle inequality, so `pass = false` indicates a numerical bug.
pub fn route_mismatch_audit(
    direct: &Matrix,
    step1: &Matrix,
    step2: &Matrix,
) -> Result<RouteMismatchAudit> {
    if step1.cols() != step2.rows() {
        return Err(CoreError::ShapeMismatch {
            context: format!(
                "step1 is {}x{}, step2 is {}x{}: inner dimensions differ",
                step1.rows(),
                step1.cols(),
                step2.rows(),
                step2.cols()
            ),
        });
    }
    let composed = step1.mul(step2)?;
    if direct.rows() != composed.rows() || direct.cols() != composed.cols() {
        return Err(CoreError::ShapeMismatch {
            context: format!(
                "direct is {}x{}, step1*step2 is {}x{}",
                direct.rows(),
                direct.cols(),
                composed.rows(),
                composed.cols()
            ),
        });
    }
    let rm = direct.sub(&composed)?.opnorm();
    let gain_direct = direct.opnorm();
    let gain_bound = step1.opnorm() * step2.opnorm() + rm;
    Ok(RouteMismatchAudit {
        rm,
        gain_direct,
        gain_bound,
        pass: gain_direct <= gain_bound + ROUTE_TOL,
    })
}

/// Exponentially decaying atom: response norms bounded by
/// `norm_c * norm_b * exp(-decay_rate * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub norm_c: f64,
    pub norm_b: f64,
    pub decay_rate: f64,
}

impl AtomSpec {
    pub fn new(norm_c: f64, norm_b: f64, decay_rate: f64) -> Result<Self> {
        if !(norm_c > 0.0 && norm_b > 0.0 && decay_rate > 0.0) {
            return Err(CoreError::InvalidConfig {
                context: format!(
                    "atom parameters must be positive: C={norm_c}, B={norm_b}, rate={decay_rate}"
                ),
            });
        }
        Ok(Self { norm_c, norm_b, decay_rate })
    }

    /// Balanced coupling: `norm_c * norm_b <= lambda0 * decay_rate`.
    pub fn is_balanced(&self, lambda0: f64) -> bool {
        self.norm_c * self.norm_b <= lambda0 * self.decay_rate
    }

    /// Scalar bridge with kernel `c * exp(-rate * t)` for `t = 0..=len`,
    /// `c = norm_c * norm_b`.
    pub fn discretize(&self, len: usize) -> ConvolutionBridge {
        ConvolutionBridge::scalar_geometric(
            self.norm_c * self.norm_b,
            (-self.decay_rate).exp(),
            len,
        )
    }
}

/// Unit-step mass bound for a balanced atom: the geometric sum majorizes
/// the continuous-time bound by the factor `rate / (1 - exp(-rate))`,
/// which tends to 1 as the step size (relative to the decay time)
/// refines.
pub fn balanced_mass_bound(lambda0: f64, decay_rate: f64) -> f64 {
    lambda0 * decay_rate / (1.0 - (-decay_rate).exp())
}

/// Outcome of [`coercivity_audit`]. Whether a gate with the right kernel
/// exists is the caller's problem; this only checks the inequalities on the
/// supplied data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityAudit {
    /// Input stays in the range of the gate at every step of the window.
    pub feasible: bool,
    /// Signed supply `sum <u, y>` over the window (fresh-start output).
    pub supply: f64,
    /// Gated energy `sum <u, G u>` over the window.
    pub gated_energy: f64,
    /// `supply >= gated_energy`: the coercivity inequality on this input.
    pub coercive: bool,
    /// When a shrinkage constant was supplied: does
    /// `gated_energy >= a^2 * energy` hold on this input?
    pub shrinkage_holds: Option<bool>,
    /// When both inequalities hold, the depth-scaled bound
    /// `supply >= a^2 * energy` follows; checked directly.
    pub depth_scaled_holds: Option<bool>,
}

const COERCIVITY_TOL: f64 = 1e-10;

/// Inequality checker for gate-based coercivity over caller-supplied data:
/// a positive-semidefinite gate `G`, a bridge, an input, a window, and
/// optionally a shrinkage constant `a` with claimed
/// `sum <u, G u> >= a^2 sum ||u||^2` on feasible inputs.
pub fn coercivity_audit(
    gate: &Matrix,
    z: &ConvolutionBridge,
    u: &PortSignal,
    window: (usize, usize),
    shrinkage: Option<f64>,
) -> Result<CoercivityAudit> {
    let d = z.port_dim();
    if gate.rows() != d || gate.cols() != d {
        return Err(CoreError::ShapeMismatch {
            context: format!("gate is {}x{}, port dimension is {d}", gate.rows(), gate.cols()),
        });
    }
    let eigen = gate.symmetric_eigen()?;
    if eigen.last().map(|(v, _)| *v < -COERCIVITY_TOL).unwrap_or(false) {
        return Err(CoreError::InvalidConfig {
            context: format!(
                "gate is not positive semidefinite (eigenvalue {})",
                eigen.last().unwrap().0
            ),
        });
    }
    let null_directions: Vec<&Vec<f64>> = eigen
        .iter()
        .filter(|(v, _)| v.abs() <= COERCIVITY_TOL)
        .map(|(_, vec)| vec)
        .collect();

    let y = apply_bridge(z, u, window)?;
    let mut feasible = true;
    let mut supply = 0.0;
    let mut gated_energy = 0.0;
    let mut energy = 0.0;
    for tau in window.0..=window.1 {
        let ut = u.sample(tau);
        for null in &null_directions {
            let along: f64 = ut.iter().zip(null.iter()).map(|(a, b)| a * b).sum();
            if along.abs() > 1e-9 {
                feasible = false;
            }
        }
        supply += ut.iter().zip(y.sample(tau)).map(|(a, b)| a * b).sum::<f64>();
        let gu = gate.mat_vec_mul(ut)?;
        gated_energy += ut.iter().zip(gu.iter()).map(|(a, b)| a * b).sum::<f64>();
        energy += ut.iter().map(|v| v * v).sum::<f64>();
    }

    let scale = 1.0 + supply.abs().max(gated_energy.abs());
    let coercive = supply >= gated_energy - COERCIVITY_TOL * scale;
    let shrinkage_holds =
        shrinkage.map(|a| gated_energy >= a * a * energy - COERCIVITY_TOL * (1.0 + energy));
    let depth_scaled_holds =
        shrinkage.map(|a| supply >= a * a * energy - COERCIVITY_TOL * (1.0 + energy));
    Ok(CoercivityAudit {
        feasible,
        supply,
        gated_energy,
        coercive,
        shrinkage_holds,
        depth_scaled_holds,
    })
}
