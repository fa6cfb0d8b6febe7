//! Command implementations behind the `fusionlat` binary.

pub mod args;
mod manifest;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use fusionlat::lattice::{load_lattice_spec, LatticeDocument};
use fusionlat::optimizer::{optimize, Direction, OptimizerConfig};
use fusionlat::percolation::largest_component_fraction;
use fusionlat::reference::{reference_tables, Measured};
use fusionlat::rng::TrialStreams;
use fusionlat::stabilizer::verify_fusion;
use fusionlat::threshold::{default_sizes, size_seed, sweep, write_sweep_csv, SweepMethod};
use fusionlat::{
    estimate_threshold, Boundary, Family, FusionModelParams, LatticeRecipe, PercolationModel,
    ThresholdConfig,
};

pub use args::Cli;
use args::{
    BoundaryArg, BuildArgs, Command, ComponentArgs, LatticeArgs, MethodArg, ModelArgs,
    OptimizeArgs, SweepArgs, ThresholdArgs, ValidateArgs, VerifyArgs,
};
pub use manifest::{manifest_path, RunManifest};

pub const DEFAULT_SWEEP_TRIALS: usize = 1000;
pub const DEFAULT_COMPONENT_TRIALS: usize = 100;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Results were produced but disagree with the reference.
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Core(#[from] fusionlat::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad invocations, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        use fusionlat::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                E::InvalidParameter(_)
                | E::InvalidSpec(_)
                | E::UnsupportedFamily { .. }
                | E::Json(_)
                | E::TooFewSizes(_),
            ) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Global settings shared by every command.
struct Context {
    seed: u64,
    out: PathBuf,
    trials: Option<usize>,
    sizes: Option<Vec<usize>>,
    outputs: Vec<PathBuf>,
}

impl Context {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out.join(name);
        let file = File::create(&path)?;
        self.outputs.push(path);
        Ok(BufWriter::new(file))
    }

    fn sizes_or(&self, default: Vec<usize>) -> Result<Vec<usize>> {
        let sizes = self.sizes.clone().unwrap_or(default);
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(CliError::Usage(
                "--sizes must list positive side lengths".into(),
            ));
        }
        Ok(sizes)
    }
}

/// Parses and runs a full command line (program name first).
pub fn run_from_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli, argv.get(1..).unwrap_or_default())
}

/// Runs a parsed command. `argv` (without the program name) is stored in the
/// manifest so the run can be repeated.
pub fn run(cli: Cli, argv: &[String]) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("thread pool already configured: {e}");
        }
    }
    if let Command::Rerun(r) = &cli.command {
        return rerun(&r.manifest, &cli.out);
    }
    fs::create_dir_all(&cli.out)?;
    let mut ctx = Context {
        seed: cli.seed,
        out: cli.out.clone(),
        trials: cli.trials,
        sizes: cli.sizes.clone(),
        outputs: Vec::new(),
    };
    if ctx.trials == Some(0) {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    let started = manifest::unix_now();
    let (name, outcome) = match &cli.command {
        Command::Sweep(a) => ("sweep", cmd_sweep(&mut ctx, a)),
        Command::Threshold(a) => ("threshold", cmd_threshold(&mut ctx, a)),
        Command::ComponentSize(a) => ("component-size", cmd_component_size(&mut ctx, a)),
        Command::Optimize(a) => ("optimize", cmd_optimize(&mut ctx, a)),
        Command::ValidateClassical(a) => ("validate-classical", cmd_validate(&mut ctx, a)),
        Command::VerifyFusion(a) => ("verify-fusion", cmd_verify(&mut ctx, a)),
        Command::BuildLattice(a) => ("build-lattice", cmd_build(&mut ctx, a)),
        Command::Rerun(_) => unreachable!("handled above"),
    };
    // Mismatches still leave a complete set of artifacts behind.
    let (parameters, verdict) = match outcome {
        Ok(p) => (p, Ok(())),
        Err(Failure::Mismatch(p, msg)) => (p, Err(CliError::Mismatch(msg))),
        Err(Failure::Error(e)) => return Err(e),
    };
    let record = RunManifest {
        command: name.to_string(),
        argv: argv.to_vec(),
        parameters,
        seed: cli.seed,
        threads: rayon::current_num_threads(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: manifest::unix_now(),
        outputs: ctx.outputs.clone(),
    };
    let path = record.write(&ctx.out)?;
    log::info!("manifest written to {}", path.display());
    verdict
}

fn rerun(path: &Path, out: &Path) -> Result<()> {
    let record = RunManifest::read(path)?;
    if record.argv.first().is_some_and(|a| a == "rerun") {
        return Err(CliError::Usage("manifest records a rerun".into()));
    }
    let mut cli = Cli::try_parse_from(
        std::iter::once("fusionlat".to_string()).chain(record.argv.iter().cloned()),
    )
    .map_err(|e| CliError::Usage(format!("manifest argv no longer parses: {e}")))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(CliError::Usage("manifest records a rerun".into()));
    }
    cli.out = out.to_path_buf();
    run(cli, &record.argv)
}

enum Failure {
    Mismatch(serde_json::Value, String),
    Error(CliError),
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.into())
    }
}

type CmdResult = std::result::Result<serde_json::Value, Failure>;

/// Parses `start:stop:step`, a comma list, or a single value.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Usage(format!("bad range `{text}`; expected start:stop:step"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        [single] => single.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.iter().any(|v: &f64| !(0.0..=1.0).contains(v)) {
        return Err(CliError::Usage(format!("range `{text}` leaves [0, 1]")));
    }
    Ok(values)
}

fn resolve_recipe(args: &LatticeArgs) -> Result<LatticeRecipe> {
    match (&args.family, &args.spec) {
        (Some(family), None) => {
            let family: Family = family.parse()?;
            let dim = args
                .dim
                .ok_or_else(|| CliError::Usage("--family needs --dim".into()))?;
            Ok(LatticeRecipe::family(family, dim)?)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            let loaded = load_lattice_spec(&text)?;
            if loaded.negation_completed {
                log::warn!("{}: added missing negated vectors", path.display());
            }
            if let Some(dim) = args.dim {
                if dim != loaded.vectors.dimension() {
                    return Err(CliError::Usage(format!(
                        "--dim {dim} contradicts the spec dimension {}",
                        loaded.vectors.dimension()
                    )));
                }
            }
            let label = path
                .file_stem()
                .map_or("custom".into(), |s| s.to_string_lossy().into_owned());
            Ok(LatticeRecipe::from_loaded(label, loaded))
        }
        _ => Err(CliError::Usage(
            "select a lattice with --family/--dim or --spec".into(),
        )),
    }
}

fn boundary(args: &LatticeArgs, default: Boundary) -> Boundary {
    match args.boundary {
        Some(BoundaryArg::Open) => Boundary::Open,
        Some(BoundaryArg::Periodic) => Boundary::Periodic,
        None => default,
    }
}

fn resolve_model(args: &ModelArgs) -> Result<PercolationModel> {
    let mut model: PercolationModel = args.model.parse()?;
    match &mut model {
        PercolationModel::Fusion { p_s, .. } => *p_s = args.p_s,
        _ if args.p_s != fusionlat::sampling::DEFAULT_FUSION_SUCCESS => {
            return Err(CliError::Usage(format!(
                "--p-s does not apply to the {} model",
                args.model
            )))
        }
        _ => {}
    }
    model.validate()?;
    Ok(model)
}

fn lattice_json(recipe: &LatticeRecipe, boundary: Boundary) -> serde_json::Value {
    json!({
        "label": recipe.label,
        "dimension": recipe.dimension(),
        "vectors": recipe.vectors.positive_half(),
        "diamond_filter": recipe.diamond_filter,
        "boundary": boundary,
    })
}

fn cmd_sweep(ctx: &mut Context, a: &SweepArgs) -> CmdResult {
    let recipe = resolve_recipe(&a.lattice)?;
    let model = resolve_model(&a.model)?;
    let bound = boundary(&a.lattice, Boundary::Open);
    let grid = parse_range(&a.eta)?;
    let sizes = ctx.sizes_or(default_sizes(recipe.dimension()))?;
    let trials = ctx.trials.unwrap_or(DEFAULT_SWEEP_TRIALS);
    let method = match a.method {
        MethodArg::Independent => SweepMethod::Independent,
        MethodArg::Coupled => SweepMethod::Coupled,
    };
    let axis = fusionlat::percolation::DEFAULT_SPANNING_AXIS;
    let mut curves = Vec::with_capacity(sizes.len());
    for &side in &sizes {
        let lattice = recipe.build(side, bound)?;
        let seed = size_seed(ctx.seed, side);
        log::info!("sweep L={side} ({} nodes)", lattice.node_count());
        curves.push(sweep(
            &lattice,
            &recipe.label,
            &model,
            &grid,
            trials,
            seed,
            method,
            axis,
        )?);
    }
    let mut out = ctx.create("sweep.csv")?;
    write_sweep_csv(&curves, &mut out)?;
    out.flush()?;
    Ok(json!({
        "lattice": lattice_json(&recipe, bound),
        "model": model.to_string(),
        "parameter": model.parameter_name(),
        "grid": grid,
        "sizes": sizes,
        "trials": trials,
        "method": method,
        "axis": axis,
    }))
}

fn threshold_config(ctx: &Context, dimension: usize, bound: Boundary) -> Result<ThresholdConfig> {
    let base = ThresholdConfig::for_dimension(dimension, ctx.seed);
    Ok(ThresholdConfig {
        sizes: ctx.sizes_or(base.sizes.clone())?,
        trials: ctx.trials.unwrap_or(base.trials),
        boundary: bound,
        ..base
    })
}

fn config_json(config: &ThresholdConfig) -> serde_json::Value {
    json!({
        "sizes": config.sizes,
        "trials": config.trials,
        "seed": config.seed,
        "boundary": config.boundary,
        "axis": config.axis,
    })
}

fn cmd_threshold(ctx: &mut Context, a: &ThresholdArgs) -> CmdResult {
    let recipe = resolve_recipe(&a.lattice)?;
    let model = resolve_model(&a.model)?;
    let bound = boundary(&a.lattice, Boundary::Open);
    let config = threshold_config(ctx, recipe.dimension(), bound)?;
    let run = estimate_threshold(&recipe, &model, &config)?;
    let est = &run.estimate;
    println!(
        "{} {} d={}: {}_c = {:.5} ± {:.5} ({:?})",
        model,
        recipe.label,
        recipe.dimension(),
        model.parameter_name(),
        est.lambda_c,
        est.error,
        est.fit_form
    );
    let mut curves = ctx.create("threshold_curves.csv")?;
    write_sweep_csv(&run.curves, &mut curves)?;
    curves.flush()?;
    let doc = json!({
        "manifest": "threshold.manifest.json",
        "model": model.to_string(),
        "lattice": lattice_json(&recipe, bound),
        "estimate": est,
    });
    let mut out = ctx.create("threshold.json")?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(json!({
        "lattice": lattice_json(&recipe, bound),
        "model": model.to_string(),
        "config": config_json(&config),
    }))
}

#[derive(Serialize)]
struct ComponentRow<'a> {
    model: String,
    family: &'a str,
    dim: usize,
    #[serde(rename = "L")]
    side: usize,
    eta: f64,
    p_loss: f64,
    fraction: f64,
    stderr: f64,
    trials: usize,
    seed: u64,
    slope_prediction: f64,
}

fn cmd_component_size(ctx: &mut Context, a: &ComponentArgs) -> CmdResult {
    let recipe = resolve_recipe(&a.lattice)?;
    let model = resolve_model(&a.model)?;
    let (p_s, central) = match model {
        PercolationModel::Fusion { p_s, central_qubit } => (p_s, central_qubit),
        _ => {
            return Err(CliError::Usage(
                "component-size needs a fusion model (spin, photon, photon-node)".into(),
            )
            .into())
        }
    };
    let bound = boundary(&a.lattice, Boundary::Periodic);
    // (eta, p_loss) pairs, keeping whichever side was given exact.
    let points: Vec<(f64, f64)> = match (&a.p_loss, &a.eta) {
        (Some(losses), None) => {
            if losses.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(CliError::Usage("--p-loss values must lie in [0, 1]".into()).into());
            }
            losses.iter().map(|&p| (1.0 - p, p)).collect()
        }
        (None, Some(range)) => parse_range(range)?
            .into_iter()
            .map(|eta| (eta, ((1.0 - eta) * 1e12).round() / 1e12))
            .collect(),
        _ => return Err(CliError::Usage("give --p-loss or --eta".into()).into()),
    };
    let dim = recipe.dimension();
    let sizes = ctx.sizes_or(vec![default_sizes(dim).get(2).copied().unwrap_or(8)])?;
    let trials = ctx.trials.unwrap_or(DEFAULT_COMPONENT_TRIALS);
    let degree = recipe.vectors.degree() as f64;
    let mut writer = csv::Writer::from_writer(ctx.create("component_size.csv")?);
    for &side in &sizes {
        let lattice = recipe.build(side, bound)?;
        let streams = TrialStreams::new(ctx.seed).derive(side as u64);
        for (i, &(eta, p_loss)) in points.iter().enumerate() {
            let seed = streams.derive(i as u64).seed();
            let params = FusionModelParams::new(eta, p_s, central, seed)?;
            let est = largest_component_fraction(&lattice, &params, trials)?;
            let row = ComponentRow {
                model: model.to_string(),
                family: &recipe.label,
                dim,
                side,
                eta,
                p_loss,
                fraction: est.mean,
                stderr: est.stderr,
                trials,
                seed,
                slope_prediction: 1.0 - 2.0 * degree * p_loss,
            };
            println!(
                "L={side} p_loss={p_loss:.6}: {:.6} ± {:.6} (slope law {:.6})",
                row.fraction, row.stderr, row.slope_prediction
            );
            writer.serialize(row)?;
        }
    }
    writer.flush()?;
    Ok(json!({
        "lattice": lattice_json(&recipe, bound),
        "model": model.to_string(),
        "points": points.iter().map(|&(eta, p_loss)| json!({"eta": eta, "p_loss": p_loss})).collect::<Vec<_>>(),
        "sizes": sizes,
        "trials": trials,
    }))
}

#[derive(Serialize)]
struct HistoryRow {
    step: usize,
    action: String,
    pair: String,
    size: usize,
    lambda_c: f64,
    error: f64,
    fit_form: String,
    comparison: String,
    decision: String,
}

fn label<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(serde_json::Value::Null) => String::new(),
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

fn vector_label(z: &[i32]) -> String {
    let parts: Vec<String> = z.iter().map(i32::to_string).collect();
    format!("({})", parts.join(" "))
}

fn cmd_optimize(ctx: &mut Context, a: &OptimizeArgs) -> CmdResult {
    let model = resolve_model(&a.model)?;
    let direction: Direction = a.direction.parse()?;
    if a.budget == 0 {
        return Err(CliError::Usage("--budget must be >= 1".into()).into());
    }
    let mut config = OptimizerConfig::new(a.dim, a.k_bound, model, a.budget, ctx.seed);
    config.direction = direction;
    config.kappa = a.kappa;
    if let Some(t) = ctx.trials {
        config.search.trials = t;
    }
    config.search.sizes = ctx.sizes_or(config.search.sizes.clone())?;
    if a.no_final {
        config.last = None;
    }
    let (result, best) = optimize(&config)?;
    let shown = result
        .final_estimate
        .as_ref()
        .unwrap_or(&result.search_estimate);
    println!(
        "best set ({} pairs) after {} evaluations: {:.5} ± {:.5}",
        result.vectors.len(),
        result.evaluations,
        shown.lambda_c,
        shown.error
    );
    for z in &result.vectors {
        println!("  ±{}", vector_label(z));
    }

    let mut out = ctx.create("optimize.json")?;
    let doc = json!({ "manifest": "optimize.manifest.json", "result": result });
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;

    let mut history = csv::Writer::from_writer(ctx.create("optimize_history.csv")?);
    for m in &result.history {
        history.serialize(HistoryRow {
            step: m.step,
            action: label(&m.action),
            pair: m.pair.as_deref().map(vector_label).unwrap_or_default(),
            size: m.candidate.len(),
            lambda_c: m.lambda_c,
            error: m.error,
            fit_form: label(&m.fit_form),
            comparison: label(&m.comparison),
            decision: label(&m.decision),
        })?;
    }
    history.flush()?;

    let mut lattice = ctx.create("optimize_best_lattice.json")?;
    serde_json::to_writer_pretty(&mut lattice, &LatticeDocument::from_spec(&best, false))?;
    writeln!(lattice)?;
    lattice.flush()?;

    Ok(json!({
        "dimension": a.dim,
        "k_bound": a.k_bound,
        "model": model.to_string(),
        "budget": a.budget,
        "direction": direction,
        "kappa": a.kappa,
        "search": config_json(&config.search),
        "final": config.last.as_ref().map(config_json),
    }))
}

#[derive(Serialize)]
struct ValidationRow {
    model: String,
    family: String,
    dim: usize,
    lambda_c: f64,
    error: f64,
    fit_form: String,
    reference: f64,
    reference_error: f64,
    deviation_sigma: f64,
    passed: bool,
    literature: Option<f64>,
    literature_agrees: Option<bool>,
}

fn cmd_validate(ctx: &mut Context, a: &ValidateArgs) -> CmdResult {
    let family: Option<Family> = a.family.as_deref().map(str::parse).transpose()?;
    let mode: Option<PercolationModel> = match a.mode.as_deref() {
        None => None,
        Some(m @ ("site" | "bond")) => Some(m.parse()?),
        Some(other) => {
            return Err(
                CliError::Usage(format!("--mode must be site or bond, got `{other}`")).into(),
            )
        }
    };
    let entries: Vec<_> = reference_tables()
        .classical
        .iter()
        .filter(|e| family.map_or(true, |f| e.family == f))
        .filter(|e| a.dim.map_or(true, |d| e.dimension == d))
        .filter(|e| mode.map_or(true, |m| e.model == m))
        .collect();
    if entries.is_empty() {
        return Err(CliError::Usage("no reference entry matches the selection".into()).into());
    }
    let mut rows = Vec::with_capacity(entries.len());
    for entry in &entries {
        let recipe = LatticeRecipe::family(entry.family, entry.dimension)?;
        let config = threshold_config(ctx, entry.dimension, Boundary::Open)?;
        let est = estimate_threshold(&recipe, &entry.model, &config)?.estimate;
        let combined = entry.value.error.hypot(est.error);
        let deviation = (est.lambda_c - entry.value.value).abs() / combined;
        let passed = entry.value.agrees_with(est.lambda_c, est.error, a.sigmas);
        let literature = entry.literature.map(|l: Measured| l.value);
        let literature_agrees = entry
            .literature
            .map(|l| l.agrees_with(est.lambda_c, est.error, a.sigmas));
        println!(
            "[{}] {} {} d={}: {:.5} ± {:.5} vs {:.5} ± {:.5} ({:.2}σ){}",
            if passed { "PASS" } else { "FAIL" },
            entry.model,
            entry.family.name(),
            entry.dimension,
            est.lambda_c,
            est.error,
            entry.value.value,
            entry.value.error,
            deviation,
            literature.map_or(String::new(), |l| format!("; literature {l:.5}")),
        );
        rows.push(ValidationRow {
            model: entry.model.to_string(),
            family: entry.family.name().to_string(),
            dim: entry.dimension,
            lambda_c: est.lambda_c,
            error: est.error,
            fit_form: label(&est.fit_form),
            reference: entry.value.value,
            reference_error: entry.value.error,
            deviation_sigma: deviation,
            passed,
            literature,
            literature_agrees,
        });
    }
    let mut writer = csv::Writer::from_writer(ctx.create("validate_classical.csv")?);
    for row in &rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    let failed = rows.iter().filter(|r| !r.passed).count();
    let parameters = json!({
        "family": family.map(Family::name),
        "dim": a.dim,
        "mode": mode.map(|m| m.to_string()),
        "sigmas": a.sigmas,
        "sizes": ctx.sizes,
        "trials": ctx.trials,
        "entries": rows.len(),
    });
    if failed > 0 {
        return Err(Failure::Mismatch(
            parameters,
            format!(
                "{failed} of {} thresholds disagree with the reference",
                rows.len()
            ),
        ));
    }
    Ok(parameters)
}

fn cmd_verify(ctx: &mut Context, a: &VerifyArgs) -> CmdResult {
    let report = verify_fusion(a.leaves)?;
    print!("{report}");
    let mut out = ctx.create("verify_fusion.txt")?;
    write!(out, "{report}")?;
    out.flush()?;
    let parameters = json!({ "leaves": a.leaves });
    if !report.all_passed() {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        return Err(Failure::Mismatch(
            parameters,
            format!("fusion derivation mismatch: {}", failed.join(", ")),
        ));
    }
    Ok(parameters)
}

fn cmd_build(ctx: &mut Context, a: &BuildArgs) -> CmdResult {
    let recipe = resolve_recipe(&a.lattice)?;
    let bound = boundary(&a.lattice, Boundary::Open);
    let lattice = recipe.build(a.side, bound)?;
    let dim = lattice.dimension();
    let mut writer = csv::Writer::from_writer(ctx.create("build_lattice.csv")?);
    let mut header = vec!["a".to_string(), "b".to_string()];
    header.extend((0..dim).map(|i| format!("z{i}")));
    writer.write_record(&header)?;
    for edge in lattice.edges() {
        let z = &lattice.edge_vectors()[edge.vector as usize];
        let mut record = vec![edge.a.to_string(), edge.b.to_string()];
        record.extend(z.iter().map(i32::to_string));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    println!(
        "{} d={} L={}: {} nodes, {} edges",
        recipe.label,
        dim,
        a.side,
        lattice.node_count(),
        lattice.edge_count()
    );
    Ok(json!({
        "lattice": lattice_json(&recipe, bound),
        "side": a.side,
        "nodes": lattice.node_count(),
        "edges": lattice.edge_count(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(
            parse_range("0.9:0.95:0.01").unwrap(),
            vec![0.9, 0.91, 0.92, 0.93, 0.94, 0.95]
        );
        assert_eq!(parse_range("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_range("0.2,0.4").unwrap(), vec![0.2, 0.4]);
        for bad in ["0.5:0.4:0.1", "0:1:0", "a:b:c", "0:2:1", "1:2"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn usage_errors_map_to_two() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Core(fusionlat::Error::InvalidParameter("x".into())).exit_code(),
            2
        );
        assert_eq!(CliError::Mismatch("x".into()).exit_code(), 1);
    }

    #[test]
    fn model_flags() {
        let args = |m: &str, p_s| ModelArgs {
            model: m.into(),
            p_s,
        };
        assert_eq!(
            resolve_model(&args("spin", 0.5)).unwrap(),
            PercolationModel::spin()
        );
        assert!(resolve_model(&args("bond", 0.7)).is_err());
        assert!(resolve_model(&args("spin", 1.5)).is_err());
        match resolve_model(&args("photon", 0.75)).unwrap() {
            PercolationModel::Fusion { p_s, .. } => assert_eq!(p_s, 0.75),
            m => panic!("{m}"),
        }
    }
}
