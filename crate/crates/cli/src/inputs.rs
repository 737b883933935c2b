//! Input file formats. Every input is JSON; parsed values are also
//! canonicalized (sorted keys, compact) for the manifest digest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use macroscope_core::capacity::{
    CapacitySchedule, ConvolutionBridge, PortSignal, ScheduleForm, ThetaSchedule,
};
use macroscope_core::kernel::validate_kernel;
use macroscope_core::matrix::Matrix;
use macroscope_core::protocol::ProtocolFamily;
use macroscope_core::{Dist, Kernel, Lens, PrototypeSet, ToleranceConfig};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("invalid JSON in {}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value, path: &Path) -> Result<T, CliError> {
    serde_json::from_value(value)
        .map_err(|e| CliError::Input(format!("schema error in {}: {e}", path.display())))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    #[serde(default)]
    pub states: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

/// Kernel plus the raw value for digesting.
pub struct LoadedKernel {
    pub kernel: Kernel,
    pub raw: Value,
}

pub fn load_kernel(path: &Path, cfg: &ToleranceConfig) -> Result<LoadedKernel, CliError> {
    let raw = read_json(path)?;
    let file: KernelFile = from_value(raw.clone(), path)?;
    if let Some(names) = &file.states {
        if names.len() != file.rows.len() {
            return Err(CliError::Input(format!(
                "{}: {} state names for {} rows",
                path.display(),
                names.len(),
                file.rows.len()
            )));
        }
    }
    let kernel = validate_kernel(&file.rows, cfg)
        .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?
        .kernel;
    Ok(LoadedKernel { kernel, raw })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistFile {
    pub weights: Vec<f64>,
}

pub fn load_dist(path: &Path) -> Result<(Dist, Value), CliError> {
    let raw = read_json(path)?;
    let file: DistFile = from_value(raw.clone(), path)?;
    let dist = Dist::new(file.weights)
        .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?;
    Ok((dist, raw))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LensFile {
    pub labels: Vec<String>,
    pub assignment: Vec<usize>,
}

pub struct LoadedLens {
    pub lens: Lens,
    pub labels: Vec<String>,
    pub raw: Value,
}

pub fn load_lens(path: &Path) -> Result<LoadedLens, CliError> {
    let raw = read_json(path)?;
    let file: LensFile = from_value(raw.clone(), path)?;
    for &label in &file.assignment {
        if label >= file.labels.len() {
            return Err(CliError::Input(format!(
                "{}: assignment label {label} out of range for {} labels",
                path.display(),
                file.labels.len()
            )));
        }
    }
    let lens = Lens::new(file.assignment)
        .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?;
    Ok(LoadedLens { lens, labels: file.labels, raw })
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum PrototypeSpec {
    Shorthand(String),
    Explicit { prototypes: PrototypeBody },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum PrototypeBody {
    Shorthand(String),
    PerBlock(BTreeMap<String, Vec<f64>>),
}

/// Resolves a prototype specification against a lens. `"uniform"` is the
/// shorthand for in-block uniform prototypes; explicit maps are keyed by
/// block label and carry full-length state vectors.
pub fn resolve_prototypes(
    spec: Option<&Path>,
    lens: &LoadedLens,
) -> Result<(PrototypeSet, Option<Value>), CliError> {
    let Some(path) = spec else {
        return Ok((PrototypeSet::uniform(&lens.lens), None));
    };
    let raw = read_json(path)?;
    let parsed: PrototypeSpec = from_value(raw.clone(), path)?;
    let body = match parsed {
        PrototypeSpec::Shorthand(s) => PrototypeBody::Shorthand(s),
        PrototypeSpec::Explicit { prototypes } => prototypes,
    };
    let set = match body {
        PrototypeBody::Shorthand(s) if s == "uniform" => PrototypeSet::uniform(&lens.lens),
        PrototypeBody::Shorthand(s) => {
            return Err(CliError::Input(format!(
                "{}: unknown prototype shorthand {s:?} (expected \"uniform\")",
                path.display()
            )));
        }
        PrototypeBody::PerBlock(map) => {
            let mut protos = Vec::with_capacity(lens.lens.block_count());
            for (label_idx, name) in lens.labels.iter().enumerate() {
                let weights = map.get(name).ok_or_else(|| {
                    CliError::Input(format!(
                        "{}: missing prototype for block {name:?}",
                        path.display()
                    ))
                })?;
                let dist = Dist::new(weights.clone())
                    .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?;
                let _ = label_idx;
                protos.push(dist);
            }
            PrototypeSet::new(&lens.lens, protos)
                .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?
        }
    };
    Ok((set, Some(raw)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub alpha: f64,
    pub phase_kernel: KernelFile,
    pub state_kernels: Vec<KernelFile>,
}

pub fn load_protocol(
    path: &Path,
    cfg: &ToleranceConfig,
) -> Result<(ProtocolFamily, Value), CliError> {
    let raw = read_json(path)?;
    let file: ProtocolFile = from_value(raw.clone(), path)?;
    let phase = validate_kernel(&file.phase_kernel.rows, cfg)
        .map_err(|e| CliError::Module(format!("{}: phase kernel: {e}", path.display())))?
        .kernel;
    let mut state_kernels = Vec::with_capacity(file.state_kernels.len());
    for (i, k) in file.state_kernels.iter().enumerate() {
        state_kernels.push(
            validate_kernel(&k.rows, cfg)
                .map_err(|e| {
                    CliError::Module(format!("{}: state kernel {i}: {e}", path.display()))
                })?
                .kernel,
        );
    }
    let fam = ProtocolFamily::new(file.alpha, phase, state_kernels)
        .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?;
    Ok((fam, raw))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeFile {
    pub port_dim: usize,
    pub kernels: Vec<Vec<Vec<f64>>>,
}

pub fn load_bridge(path: &Path) -> Result<(ConvolutionBridge, Value), CliError> {
    let raw = read_json(path)?;
    let file: BridgeFile = from_value(raw.clone(), path)?;
    let kernels = file
        .kernels
        .into_iter()
        .map(Matrix::from_rows)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?;
    let bridge = ConvolutionBridge::new(kernels, file.port_dim)
        .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?;
    Ok((bridge, raw))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalsFile {
    pub signals: Vec<Vec<Vec<f64>>>,
    pub windows: Vec<(usize, usize)>,
}

pub struct LoadedSignals {
    pub signals: Vec<PortSignal>,
    pub windows: Vec<(usize, usize)>,
    pub raw: Value,
}

pub fn load_signals(path: &Path) -> Result<LoadedSignals, CliError> {
    let raw = read_json(path)?;
    let file: SignalsFile = from_value(raw.clone(), path)?;
    let signals = file
        .signals
        .into_iter()
        .map(PortSignal::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?;
    Ok(LoadedSignals { signals, windows: file.windows, raw })
}

/// Schedule factor as written on disk: the exponent key is `alpha` for the
/// throughput factor and `beta` for the energy-density factor.
#[derive(Debug, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleFactorFile {
    Poly {
        c: f64,
        #[serde(alias = "beta")]
        alpha: f64,
    },
    Geom {
        c: f64,
        ratio: f64,
    },
    Table {
        values: Vec<f64>,
    },
}

impl From<ScheduleFactorFile> for ScheduleForm {
    fn from(f: ScheduleFactorFile) -> Self {
        match f {
            ScheduleFactorFile::Poly { c, alpha } => ScheduleForm::Poly { c, exponent: alpha },
            ScheduleFactorFile::Geom { c, ratio } => ScheduleForm::Geometric { c, ratio },
            ScheduleFactorFile::Table { values } => ScheduleForm::Table { values },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ThetaFile {
    Constant(f64),
    Geometric { base: f64, ratio: f64 },
}

impl From<ThetaFile> for ThetaSchedule {
    fn from(f: ThetaFile) -> Self {
        match f {
            ThetaFile::Constant(v) => ThetaSchedule::Constant(v),
            ThetaFile::Geometric { base, ratio } => ThetaSchedule::Geometric { base, ratio },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub theta: ThetaFile,
    pub lambda: ScheduleFactorFile,
    pub bbar: ScheduleFactorFile,
    pub j_max: usize,
}

pub fn load_schedule(path: &Path) -> Result<(CapacitySchedule, Value), CliError> {
    let raw = read_json(path)?;
    let file: ScheduleFile = from_value(raw.clone(), path)?;
    let sched = CapacitySchedule {
        theta: file.theta.into(),
        lambda: file.lambda.into(),
        bbar: file.bbar.into(),
        j_max: file.j_max,
    };
    sched
        .validate()
        .map_err(|e| CliError::Module(format!("{}: {e}", path.display())))?;
    Ok((sched, raw))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteFile {
    pub direct: Vec<Vec<f64>>,
    pub step1: Vec<Vec<f64>>,
    pub step2: Vec<Vec<f64>>,
}

pub fn load_route(path: &Path) -> Result<(Matrix, Matrix, Matrix, Value), CliError> {
    let raw = read_json(path)?;
    let file: RouteFile = from_value(raw.clone(), path)?;
    let make = |rows: Vec<Vec<f64>>| {
        Matrix::from_rows(rows).map_err(|e| CliError::Module(format!("{}: {e}", path.display())))
    };
    Ok((make(file.direct)?, make(file.step1)?, make(file.step2)?, raw))
}
