//! One runner per subcommand. Each builds a manifest from its canonicalized
//! inputs, computes the report body, and flags audit outcomes for the exit
//! code.

use std::collections::BTreeSet;
use std::path::Path;

use macroscope_core::capacity::{
    icap_audit, kernel_mass, latency_bounds, no_zeno_decision, route_mismatch_audit, PortSignal,
};
use macroscope_core::cycles::{
    cycle_basis, cycle_rank, exactness, gate_edges, one_form, spectral_gap, support_graph,
};
use macroscope_core::forcing::{exact_enumeration, forcing_report, monte_carlo_definability, CountMode};
use macroscope_core::kernel::stationary;
use macroscope_core::lens::{build_endomap, idempotence_defect_tv, prototype_stability, retention_error};
use macroscope_core::paths::{dpi_audit, kl_path, path_law, reverse_pushforward};
use macroscope_core::protocol::{stroboscopic_kernel, trap_audit};
use macroscope_core::{Dist, Kernel, Lens, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::inputs::{
    load_bridge, load_dist, load_kernel, load_lens, load_protocol, load_route, load_schedule,
    load_signals, resolve_prototypes,
};
use crate::manifest::RunManifest;
use crate::report::{envelope, kl_to_json};
use crate::{Cli, CliError, Command, RhoSpec};

pub struct Outcome {
    pub document: Value,
    pub audit_ok: bool,
}

fn resolve_rho(
    spec: &RhoSpec,
    kernel: &Kernel,
    cfg: &ToleranceConfig,
) -> Result<(Dist, Value), CliError> {
    match spec {
        RhoSpec::Uniform => Ok((Dist::uniform(kernel.dim()), json!("uniform"))),
        RhoSpec::Stationary => {
            let pi = stationary(kernel, cfg)?.pi;
            Ok((pi, json!("stationary")))
        }
        RhoSpec::File(path) => {
            let (dist, raw) = load_dist(path)?;
            Ok((dist, raw))
        }
    }
}

fn parse_edge_list(spec: &str) -> Result<BTreeSet<(usize, usize)>, CliError> {
    let mut edges = BTreeSet::new();
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let (a, b) = part.split_once('-').ok_or_else(|| {
            CliError::Input(format!("bad edge {part:?}; expected i-j"))
        })?;
        let i: usize = a.trim().parse().map_err(|_| {
            CliError::Input(format!("bad vertex {a:?} in edge {part:?}"))
        })?;
        let j: usize = b.trim().parse().map_err(|_| {
            CliError::Input(format!("bad vertex {b:?} in edge {part:?}"))
        })?;
        if i == j {
            return Err(CliError::Input(format!("self-loop {part:?} is not an edge")));
        }
        edges.insert((i.min(j), i.max(j)));
    }
    Ok(edges)
}

pub fn run(cli: &Cli, cfg: &ToleranceConfig) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Defect { kernel, lens, prototypes, tau } => {
            defect(kernel, lens, prototypes.as_deref(), *tau, cfg)
        }
        Command::Sigma { kernel, rho, horizon, dump_law } => {
            sigma(kernel, rho, *horizon, dump_law.as_deref(), cli.cap, cfg)
        }
        Command::Dpi { kernel, lens, rho, horizon } => {
            dpi(kernel, lens, rho, *horizon, cli.cap, cfg)
        }
        Command::ProtocolAudit { protocol, horizon } => {
            protocol_audit(protocol, *horizon, cli.cap, cfg)
        }
        Command::Strobe { kernels, horizon } => strobe(kernels, *horizon, cli.cap, cfg),
        Command::Affinity { kernel } => affinity(kernel, cfg),
        Command::Gate { kernel, delete } => gate(kernel, delete, cfg),
        Command::Gap { kernel, pi } => gap(kernel, pi, cfg),
        Command::Forcing { n, k, lens, mc, seed } => {
            forcing(*n, *k, lens.as_deref(), *mc, *seed, cfg)
        }
        Command::Icap { bridge, signals, fuzz, seed } => {
            icap(bridge, signals.as_deref(), *fuzz, *seed, cfg)
        }
        Command::Zeno { schedule } => zeno(schedule, cfg),
        Command::Route { file } => route(file, cfg),
        Command::Reference => unreachable!("handled before dispatch"),
    }
}

fn defect(
    kernel_path: &Path,
    lens_path: &Path,
    prototypes_path: Option<&Path>,
    tau: usize,
    cfg: &ToleranceConfig,
) -> Result<Outcome, CliError> {
    let kernel = load_kernel(kernel_path, cfg)?;
    let lens = load_lens(lens_path)?;
    let (protos, protos_raw) = resolve_prototypes(prototypes_path, &lens)?;

    let endomap = build_endomap(&kernel.kernel, &lens.lens, &protos, tau)?;
    let defect = idempotence_defect_tv(&endomap);
    let retention = retention_error(&kernel.kernel, &lens.lens, &protos, tau)?;
    let stability = prototype_stability(&endomap);

    let mut files = vec![kernel.raw.clone(), lens.raw.clone()];
    if let Some(p) = &protos_raw {
        files.push(p.clone());
    }
    let manifest = RunManifest::new("defect", &files, json!({ "tau": tau }), None, cfg);
    let body = json!({
        "tau": tau,
        "defect": defect,
        "retention": retention,
        "stability": stability,
        "block_labels": lens.labels,
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn sigma(
    kernel_path: &Path,
    rho_spec: &RhoSpec,
    horizon: usize,
    dump_law: Option<&Path>,
    cap: u128,
    cfg: &ToleranceConfig,
) -> Result<Outcome, CliError> {
    let kernel = load_kernel(kernel_path, cfg)?;
    let (rho, rho_raw) = resolve_rho(rho_spec, &kernel.kernel, cfg)?;
    let law = path_law(&kernel.kernel, &rho, horizon, cap)?;
    if let Some(out_path) = dump_law {
        let text = serde_json::to_string_pretty(&law)
            .expect("path laws serialize");
        std::fs::write(out_path, text + "\n").map_err(|e| {
            CliError::Input(format!("cannot write {}: {e}", out_path.display()))
        })?;
    }
    let result = kl_path(&law, &reverse_pushforward(&law))?;

    let manifest = RunManifest::new(
        "sigma",
        std::slice::from_ref(&kernel.raw),
        json!({ "T": horizon, "rho": rho_raw, "cap": cap.to_string() }),
        None,
        cfg,
    );
    let body = json!({
        "T": horizon,
        "finite": result.is_finite(),
        "value": result.is_finite().then_some(result.value),
        "witness": result.infinite_support_witness,
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn dpi(
    kernel_path: &Path,
    lens_path: &Path,
    rho_spec: &RhoSpec,
    horizon: usize,
    cap: u128,
    cfg: &ToleranceConfig,
) -> Result<Outcome, CliError> {
    let kernel = load_kernel(kernel_path, cfg)?;
    let lens = load_lens(lens_path)?;
    let (rho, rho_raw) = resolve_rho(rho_spec, &kernel.kernel, cfg)?;
    let audit = dpi_audit(&kernel.kernel, &rho, &lens.lens, horizon, cap)?;

    let manifest = RunManifest::new(
        "dpi",
        &[kernel.raw.clone(), lens.raw.clone()],
        json!({ "T": horizon, "rho": rho_raw, "cap": cap.to_string() }),
        None,
        cfg,
    );
    let body = json!({
        "T": horizon,
        "micro": kl_to_json(&audit.micro),
        "macro": kl_to_json(&audit.macro_),
        "slack": audit.slack,
        "pass": audit.pass,
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: audit.pass })
}

fn protocol_audit(
    protocol_path: &Path,
    horizon: usize,
    cap: u128,
    cfg: &ToleranceConfig,
) -> Result<Outcome, CliError> {
    let (fam, raw) = load_protocol(protocol_path, cfg)?;
    let audit = trap_audit(&fam, horizon, cap, cfg)?;

    let manifest = RunManifest::new(
        "protocol-audit",
        &[raw],
        json!({ "T": horizon, "cap": cap.to_string() }),
        None,
        cfg,
    );
    let components: Vec<Value> = audit
        .components
        .iter()
        .map(|c| json!({ "states": c.states, "sigma": kl_to_json(&c.sigma) }))
        .collect();
    let body = json!({
        "hypotheses": {
            "phase_reversible": audit.hypotheses.phase_reversible,
            "common_stationary": audit.hypotheses.common_stationary,
            "state_kernels_reversible": audit.hypotheses.state_kernels_reversible,
        },
        "lifted_sigma": kl_to_json(&audit.lifted_sigma),
        "projected_sigma": kl_to_json(&audit.projected_sigma),
        "reversible_cert": audit.reversible_cert,
        "irreducible": audit.irreducible,
        "stationary_used": audit.stationary_used.as_slice(),
        "components": components,
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn strobe(
    kernel_paths: &[std::path::PathBuf],
    horizon: usize,
    cap: u128,
    cfg: &ToleranceConfig,
) -> Result<Outcome, CliError> {
    let mut kernels = Vec::with_capacity(kernel_paths.len());
    let mut raws = Vec::with_capacity(kernel_paths.len());
    for path in kernel_paths {
        let loaded = load_kernel(path, cfg)?;
        kernels.push(loaded.kernel);
        raws.push(loaded.raw);
    }
    let product = stroboscopic_kernel(&kernels)?;
    let pi = stationary(&product, cfg)?.pi;
    let law = path_law(&product, &pi, horizon, cap)?;
    let sigma = kl_path(&law, &reverse_pushforward(&law))?;

    let manifest = RunManifest::new(
        "strobe",
        &raws,
        json!({ "T": horizon, "cap": cap.to_string() }),
        None,
        cfg,
    );
    let body = json!({
        "T": horizon,
        "kernel": product.to_rows(),
        "stationary": pi.as_slice(),
        "sigma_at_stationary": kl_to_json(&sigma),
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn affinity(kernel_path: &Path, cfg: &ToleranceConfig) -> Result<Outcome, CliError> {
    let kernel = load_kernel(kernel_path, cfg)?;
    let graph = support_graph(&kernel.kernel, cfg.zero_tol);
    let form = one_form(&kernel.kernel, &graph)?;
    let basis = cycle_basis(&graph);
    let report = exactness(&form, &basis, &graph, 1e-10)?;

    let manifest = RunManifest::new("affinity", std::slice::from_ref(&kernel.raw), json!({}), None, cfg);
    let body = json!({
        "beta1": cycle_rank(&graph),
        "affinities": report.affinities.0,
        "exact": report.exact,
        "potential": report.potential,
        "max_residual": report.max_residual,
        "rev_ok": graph.rev_ok,
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn gate(kernel_path: &Path, delete_spec: &str, cfg: &ToleranceConfig) -> Result<Outcome, CliError> {
    let kernel = load_kernel(kernel_path, cfg)?;
    let delete = parse_edge_list(delete_spec)?;
    let before = cycle_rank(&support_graph(&kernel.kernel, cfg.zero_tol));
    let gated = gate_edges(&kernel.kernel, &delete, cfg.zero_tol)?;
    let after = cycle_rank(&support_graph(&gated, cfg.zero_tol));

    let deleted: Vec<Vec<usize>> = delete.iter().map(|&(i, j)| vec![i, j]).collect();
    let manifest = RunManifest::new(
        "gate",
        std::slice::from_ref(&kernel.raw),
        json!({ "delete": deleted }),
        None,
        cfg,
    );
    let body = json!({
        "deleted": deleted,
        "beta1_before": before,
        "beta1_after": after,
        "kernel": gated.to_rows(),
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn gap(kernel_path: &Path, pi_spec: &RhoSpec, cfg: &ToleranceConfig) -> Result<Outcome, CliError> {
    let kernel = load_kernel(kernel_path, cfg)?;
    let (pi, pi_raw) = resolve_rho(pi_spec, &kernel.kernel, cfg)?;
    let gap = spectral_gap(&kernel.kernel, &pi)?;

    let manifest =
        RunManifest::new("gap", std::slice::from_ref(&kernel.raw), json!({ "pi": pi_raw }), None, cfg);
    let body = json!({ "gap": gap, "pi": pi.as_slice() });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn forcing(
    n: Option<usize>,
    k: Option<usize>,
    lens_path: Option<&Path>,
    mc: Option<u64>,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<Outcome, CliError> {
    let (lens, lens_raw) = match (lens_path, n, k) {
        (Some(path), None, _) => {
            let loaded = load_lens(path)?;
            (loaded.lens, loaded.raw)
        }
        (None, Some(n), Some(k)) => {
            if k == 0 || k > n {
                return Err(CliError::Input(format!(
                    "need 1 <= k <= n, got n={n}, k={k}"
                )));
            }
            let assignment: Vec<usize> = (0..n).map(|z| z * k / n).collect();
            let lens = Lens::new(assignment.clone())
                .map_err(|e| CliError::Module(e.to_string()))?;
            (lens, json!({ "balanced": { "n": n, "k": k }, "assignment": assignment }))
        }
        _ => {
            return Err(CliError::Input(
                "forcing needs either --lens FILE or both --n and --k".to_string(),
            ));
        }
    };

    let report = forcing_report(&lens);
    let enumeration = exact_enumeration(&lens, CountMode::Auto)
        .map_err(|e| CliError::Module(e.to_string()))?;
    let mc_report = mc.map(|trials| monte_carlo_definability(&lens, trials, seed));

    let manifest = RunManifest::new(
        "forcing",
        &[lens_raw],
        json!({ "mc": mc, "seed": mc.map(|_| seed) }),
        mc.map(|_| seed),
        cfg,
    );
    let body = json!({
        "n": report.n,
        "k": report.k,
        "p_definable": report.p_definable_float,
        "exact_dyadic": report.p_definable.to_string(),
        "per_block_constancy": report.per_block_constancy,
        "union_bound": report.union_bound,
        "split_lower_bound": report.split_lower_bound,
        "definable_count": enumeration.definable_count.to_string(),
        "total_predicates": enumeration.total.to_string(),
        "enumerated": enumeration.enumerated,
        "monte_carlo": mc_report.map(|m| json!({
            "trials": m.trials,
            "hits": m.hits,
            "freq": m.freq,
            "expected": m.expected,
            "three_sigma": m.three_sigma,
            "threshold": m.threshold,
            "consistent": m.consistent,
            "generator": m.generator,
            "seed": m.seed,
        })),
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn icap(
    bridge_path: &Path,
    signals_path: Option<&Path>,
    fuzz: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<Outcome, CliError> {
    let (bridge, bridge_raw) = load_bridge(bridge_path)?;
    let (signals, windows, signals_raw, used_seed) = match signals_path {
        Some(path) => {
            let loaded = load_signals(path)?;
            (loaded.signals, loaded.windows, Some(loaded.raw), None)
        }
        None => {
            let horizon = 8;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let signals: Vec<PortSignal> = (0..fuzz)
                .map(|_| {
                    PortSignal::new(
                        (0..horizon)
                            .map(|_| {
                                (0..bridge.port_dim())
                                    .map(|_| rng.random::<f64>() * 4.0 - 2.0)
                                    .collect()
                            })
                            .collect(),
                    )
                    .expect("fuzz samples share one dimension")
                })
                .collect();
            let windows = vec![(0, 7), (0, 3), (2, 6), (5, 5), (1, 7)];
            (signals, windows, None, Some(seed))
        }
    };

    let audit = icap_audit(&bridge, &signals, &windows)?;
    let mass = kernel_mass(&bridge);

    let mut files = vec![bridge_raw];
    if let Some(raw) = signals_raw {
        files.push(raw);
    }
    let manifest = RunManifest::new(
        "icap",
        &files,
        json!({ "fuzz": signals_path.is_none().then_some(fuzz), "seed": used_seed }),
        used_seed,
        cfg,
    );
    let body = json!({
        "max_ratio": audit.max_ratio,
        "certified_bound": audit.certified_bound,
        "kernel_mass": mass,
        "pass": audit.pass,
        "signal_count": signals.len(),
        "window_count": windows.len(),
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: audit.pass })
}

fn zeno(schedule_path: &Path, cfg: &ToleranceConfig) -> Result<Outcome, CliError> {
    let (sched, raw) = load_schedule(schedule_path)?;
    let decision = no_zeno_decision(&sched)?;
    let latency = latency_bounds(&sched)?;

    let manifest = RunManifest::new("zeno", &[raw], json!({}), None, cfg);
    let verdict = serde_json::to_value(decision.verdict).expect("verdict serializes");
    let basis = serde_json::to_value(decision.basis).expect("basis serializes");
    let body = json!({
        "verdict": verdict,
        "basis": basis,
        "alpha_plus_beta": decision.alpha_plus_beta,
        "reciprocal_partial_sum": decision.reciprocal_partial_sum,
        "latency": {
            "delta_t": latency.delta_t,
            "cumulative": latency.cumulative,
            "work_quantum_fails": latency.work_quantum_fails,
        },
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: true })
}

fn route(file: &Path, cfg: &ToleranceConfig) -> Result<Outcome, CliError> {
    let (direct, step1, step2, raw) = load_route(file)?;
    let audit = route_mismatch_audit(&direct, &step1, &step2)?;

    let manifest = RunManifest::new("route", &[raw], json!({}), None, cfg);
    let body = json!({
        "rm": audit.rm,
        "gain_direct": audit.gain_direct,
        "gain_bound": audit.gain_bound,
        "pass": audit.pass,
    });
    Ok(Outcome { document: envelope(&manifest, body), audit_ok: audit.pass })
}

/// Generated command reference; `docs/cli.md` is this text committed.
pub fn reference_page() -> String {
    let mut page = String::new();
    page.push_str("# macroscope command reference\n\n");
    page.push_str("All subcommands read JSON inputs, print one JSON report to stdout, and\n");
    page.push_str("embed a run manifest (command, input digest, seed, tool version,\n");
    page.push_str("tolerance snapshot). Reports are deterministic: the same manifest\n");
    page.push_str("yields byte-identical output. Report schemas ship in `schemas/v1/` and\n");
    page.push_str("print with `--json-schema`.\n\n");
    page.push_str("## Exit codes\n\n");
    page.push_str("| code | meaning |\n|---|---|\n");
    page.push_str("| 0 | computed; all audited inequalities held |\n");
    page.push_str("| 1 | an audited inequality failed numerically (bug, not bad input) |\n");
    page.push_str("| 2 | input, parse, or schema error |\n\n");
    page.push_str("## Global flags\n\n");
    page.push_str("| flag | effect |\n|---|---|\n");
    page.push_str("| `--tol-row-sum X` | kernel row-sum acceptance tolerance (default 1e-9) |\n");
    page.push_str("| `--tol-stationarity X` | stationary-solve L1 residual target (default 1e-12) |\n");
    page.push_str("| `--tol-zero X` | structural-zero threshold (default 1e-15) |\n");
    page.push_str("| `--max-power-iters N` | power-iteration budget (default 1000000) |\n");
    page.push_str("| `--cap N` | path-enumeration cap in table entries (default 10000000) |\n");
    page.push_str("| `--json-schema` | print the subcommand's report schema and exit |\n");
    page.push_str("| `--quiet` | suppress stderr notes |\n\n");
    page.push_str(&format!(
        "The `{}` environment variable selects a tolerance profile\n\
         (`default`, `strict`, `relaxed`); explicit flags override it.\n\n",
        crate::TOL_PROFILE_ENV
    ));
    page.push_str("## Subcommands\n\n");
    let rows: &[(&str, &str, &str)] = &[
        (
            "defect KERNEL --lens LENS [--prototypes P] [--tau N]",
            "idempotence defect, retention error, per-block stability of the packaging endomap",
            "defect, retention, stability[]",
        ),
        (
            "sigma KERNEL [--rho uniform|stationary|FILE] --T N [--dump-law FILE]",
            "path reversal asymmetry at horizon T; optionally exports the path law",
            "value (null when infinite), witness",
        ),
        (
            "dpi KERNEL --lens LENS [--rho ...] --T N",
            "micro vs macro asymmetry; exit 1 if coarse-graining increased it",
            "micro, macro, slack, pass",
        ),
        (
            "protocol-audit PROTOCOL [--T N]",
            "clock audit of an autonomous protocol (hypotheses checked, not assumed)",
            "hypotheses, lifted_sigma, projected_sigma, reversible_cert",
        ),
        (
            "strobe KERNEL... [--T N]",
            "ordered stroboscopic product and its asymmetry at its own stationary law",
            "kernel, stationary, sigma_at_stationary",
        ),
        (
            "affinity KERNEL",
            "cycle affinities and exactness of the log-ratio edge form",
            "beta1, affinities[], exact, potential, max_residual",
        ),
        (
            "gate KERNEL --delete \"i-j,k-l\"",
            "delete undirected edges, renormalize, recount the cycle rank",
            "beta1_before, beta1_after, kernel",
        ),
        (
            "gap KERNEL [--pi stationary|uniform|FILE]",
            "spectral gap of the lazy walk (reversible kernels only)",
            "gap",
        ),
        (
            "forcing --n N --k K | --lens FILE [--mc TRIALS --seed S]",
            "definability counting with exact dyadic probability and optional Monte Carlo",
            "p_definable, exact_dyadic, union_bound, monte_carlo",
        ),
        (
            "icap BRIDGE [--signals FILE | --fuzz N --seed S]",
            "throughput audit against the kernel-mass certificate; exit 1 on violation",
            "max_ratio, certified_bound, pass",
        ),
        (
            "zeno SCHEDULE",
            "divergence verdict for reciprocal capacity plus latency floors",
            "verdict, basis, alpha_plus_beta, latency",
        ),
        (
            "route FILE",
            "route-mismatch defect and the additive gain bound; exit 1 on violation",
            "rm, gain_direct, gain_bound, pass",
        ),
    ];
    page.push_str("| invocation | computes | key report fields |\n|---|---|---|\n");
    for (inv, what, fields) in rows {
        page.push_str(&format!("| `{inv}` | {what} | {fields} |\n"));
    }
    page.push_str("\n## Input formats\n\n");
    page.push_str("```text\n");
    page.push_str("kernel    {\"states\": [\"s0\", ...], \"rows\": [[...], ...]}   (states optional)\n");
    page.push_str("dist      {\"weights\": [...]}\n");
    page.push_str("lens      {\"labels\": [\"a\", \"b\"], \"assignment\": [0, 0, 1, 1]}\n");
    page.push_str("protos    {\"prototypes\": \"uniform\"} or {\"prototypes\": {\"a\": [...], ...}}\n");
    page.push_str("protocol  {\"alpha\": 0.5, \"phase_kernel\": {...}, \"state_kernels\": [{...}, ...]}\n");
    page.push_str("bridge    {\"port_dim\": 2, \"kernels\": [[[...]], ...]}\n");
    page.push_str("signals   {\"signals\": [[[...], ...], ...], \"windows\": [[s, t], ...]}\n");
    page.push_str("schedule  {\"theta\": 1.0, \"lambda\": {\"form\": \"poly\", \"c\": 1, \"alpha\": 1},\n");
    page.push_str("           \"bbar\": {\"form\": \"poly\", \"c\": 1, \"beta\": 0}, \"j_max\": 1000}\n");
    page.push_str("route     {\"direct\": [[...]], \"step1\": [[...]], \"step2\": [[...]]}\n");
    page.push_str("```\n\n");
    page.push_str("Schedule factors also accept `{\"form\": \"geom\", \"c\": C, \"ratio\": R}` and\n");
    page.push_str("`{\"form\": \"table\", \"values\": [...]}`; `theta` accepts a bare number or\n");
    page.push_str("`{\"base\": B, \"ratio\": R}` for a decaying work quantum.\n");
    page
}
