use std::path::{Path, PathBuf};

use mrhinf::design::GammaStep;
use mrhinf::io::{fmt_f64, read_signal_csv, to_json_pretty, ModelRepr, SpecFile};
use mrhinf::ltisys::{bilinear, frequency_response, hinf_norm};
use mrhinf::search::{self, PatternReport};
use mrhinf::sim::{self, SimulationReport};
use mrhinf::synthesis::FilterBranch;
use mrhinf::{
    build_plant, close_loop, design_filter, extract_filterbank, DecimationPattern, DesignSpec, PolyphaseFilterBank,
    StateSpace, SynthesisResult,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{complete, read_json, read_text, resolve_workers, OptionsEcho, RunConfig, SolverArgs, SpecArgs};
use crate::CliError;

/// `design.json`: the synthesis result with the run configuration.
#[derive(Serialize)]
struct DesignArtifact<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    result: &'a SynthesisResult,
}

#[derive(Serialize)]
struct FilterbankArtifact<'a> {
    config: &'a RunConfig,
    pattern: &'a DecimationPattern,
    branches: &'a [FilterBranch],
}

#[derive(Serialize)]
struct SearchArtifact<'a> {
    config: &'a RunConfig,
    reports: &'a [PatternReport],
}

#[derive(Serialize)]
struct TraceArtifact<'a> {
    config: &'a RunConfig,
    error: String,
    iterations: &'a [GammaStep],
}

/// Anything `design` wrote that carries a filter, read back.
#[derive(Deserialize)]
struct StoredDesign {
    #[serde(default)]
    config: Option<StoredConfig>,
    #[serde(with = "mrhinf::io::model_serde")]
    filter: StateSpace,
}

#[derive(Deserialize)]
struct StoredConfig {
    spec: Option<SpecFile>,
}

#[derive(Deserialize)]
struct StoredFilterbank {
    pattern: DecimationPattern,
    branches: Vec<FilterBranch>,
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn to_json(v: &impl Serialize) -> String {
    to_json_pretty(v).expect("serializable artifact")
}

pub fn design(spec_args: &SpecArgs, solver: &SolverArgs, grid: usize, out: &Path, verbose: bool) -> Result<(), CliError> {
    let file = complete(spec_args.merged()?)?;
    let spec = file.to_spec()?;
    let opts = solver.options()?;
    let config = RunConfig {
        spec: Some(file),
        options: Some(OptionsEcho::from(&opts)),
        ..RunConfig::new("design")
    }
    .param("grid", grid);

    let design = match design_filter(&spec, &opts) {
        Ok(d) => d,
        Err(e) => {
            let trace = TraceArtifact { config: &config, error: e.error.to_string(), iterations: &e.trace };
            let path = write(out, "trace.json", &to_json(&trace))?;
            eprintln!("gamma trace written to {}", path.display());
            return Err(CliError::Synthesis { error: e.error, trace: e.trace });
        }
    };
    if verbose {
        for step in &design.result.iterations {
            eprintln!("gamma {:>12.6e} {}", step.gamma, if step.feasible { "feasible" } else { "infeasible" });
        }
    }
    write(out, "design.json", &to_json(&DesignArtifact { config: &config, result: &design.result }))?;
    let bank = FilterbankArtifact { config: &config, pattern: &spec.pattern, branches: &design.filterbank.branches };
    write(out, "filterbank.json", &to_json(&bank))?;
    let first = &design.filterbank.branches[0];
    write(out, "response.csv", &frequency_response(&first.filter, grid)?.to_csv())?;

    println!("pattern   {}", spec.pattern);
    println!("gamma     {}", fmt_f64(design.result.gamma));
    println!("J         {}", fmt_f64(design.result.j));
    println!("order     {}", design.result.filter.nstates());
    println!("wrote     design.json filterbank.json response.csv to {}", out.display());
    Ok(())
}

pub fn search(
    m: usize,
    n: Option<usize>,
    spec_args: &SpecArgs,
    solver: &SolverArgs,
    workers: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (base, file) = spec_args.base_spec()?;
    let opts = solver.options()?;
    let workers = resolve_workers(workers)?;
    let counts: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (1..m.max(2)).collect(),
    };
    let reports = search::search_counts(m, &counts, &base, &opts, workers)?;
    print!("{}", search::format_table(&reports));
    if let Some(dir) = out {
        let config = RunConfig { spec: Some(file), options: Some(OptionsEcho::from(&opts)), ..RunConfig::new("search") }
            .param("M", m)
            .param("N", &counts);
        write(dir, "search.csv", &search::to_csv(&reports))?;
        write(dir, "search.json", &to_json(&SearchArtifact { config: &config, reports: &reports }))?;
    }
    Ok(())
}

/// A model file or a `design.json`; for the latter, also its embedded spec.
fn load_filter(path: &Path) -> Result<(StateSpace, Option<SpecFile>), CliError> {
    let value: Value = read_json(path)?;
    if value.get("filter").is_some() {
        let stored: StoredDesign =
            serde_json::from_value(value).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        return Ok((stored.filter, stored.config.and_then(|c| c.spec)));
    }
    let model: ModelRepr =
        serde_json::from_value(value).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    Ok((model.to_model()?, None))
}

/// Spec for a stored filter: explicit flags and `--spec` first, then the copy
/// embedded in the design file.
fn spec_for_stored(spec_args: &SpecArgs, embedded: Option<SpecFile>) -> Result<Option<DesignSpec>, CliError> {
    let explicit = spec_args.spec.is_some() || spec_args.pattern.is_some();
    let mut file = if explicit { spec_args.merged()? } else { embedded.unwrap_or_default() };
    if !explicit {
        file.h = spec_args.h.or(file.h);
        file.m = spec_args.m.or(file.m);
        file.n = spec_args.n.or(file.n);
    }
    if file.pattern.is_none() {
        return Ok(None);
    }
    Ok(Some(complete(file)?.to_spec()?))
}

pub fn norm(path: &Path, spec_args: &SpecArgs, tol: f64) -> Result<(), CliError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Invalid("tolerance must be positive".into()));
    }
    let (model, embedded) = load_filter(path)?;
    let value = match spec_for_stored(spec_args, embedded)? {
        Some(spec) => hinf_norm(&close_loop(&build_plant(&spec)?, &model)?, tol)?,
        None if model.is_discrete() => hinf_norm(&model, tol)?,
        None => hinf_norm(&bilinear(&model)?, tol)?,
    };
    println!("{}", fmt_f64(value));
    Ok(())
}

pub struct SignalArgs {
    pub signal: Option<PathBuf>,
    pub rect: Option<usize>,
    pub amplitude: f64,
    pub length: usize,
}

pub fn simulate(
    spec_args: &SpecArgs,
    solver: &SolverArgs,
    filter: Option<&Path>,
    signal: &SignalArgs,
    baseline_taps: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (spec, bank) = match filter {
        Some(path) => {
            let (k, embedded) = load_filter(path)?;
            let spec = spec_for_stored(spec_args, embedded)?
                .ok_or_else(|| CliError::Invalid("the stored filter needs a pattern (--pattern or --spec)".into()))?;
            let bank = extract_filterbank(&k, &spec.pattern)?;
            (spec, bank)
        }
        None => {
            let spec = spec_args.design_spec()?;
            let design = design_filter(&spec, &solver.options()?)
                .map_err(|e| CliError::Synthesis { error: e.error, trace: e.trace })?;
            (spec, design.filterbank)
        }
    };
    let x = match (&signal.signal, signal.rect) {
        (Some(path), _) => read_signal_csv(&read_text(path)?)?,
        (None, period) => sim::generate_rect_wave(period.unwrap_or(20), signal.amplitude, signal.length)?,
    };
    let report = sim::run_reconstruction(&x, &spec.pattern, &bank, spec.m)?;
    emit_simulation(&report, "simulation.csv", out)?;
    eprintln!(
        "optimal:  max_abs_error {} l2_error {} warmup {}",
        fmt_f64(report.max_abs_error),
        fmt_f64(report.l2_error),
        report.warmup
    );
    if let Some(taps) = baseline_taps {
        if taps == 0 || taps % 2 == 0 {
            return Err(CliError::Invalid("baseline tap count must be odd".into()));
        }
        let base = sim::baseline_report(&x, &spec.pattern, taps);
        if out.is_some() {
            emit_simulation(&base, "baseline.csv", out)?;
        }
        eprintln!(
            "baseline: max_abs_error {} l2_error {} warmup {}",
            fmt_f64(base.max_abs_error),
            fmt_f64(base.l2_error),
            base.warmup
        );
    }
    Ok(())
}

fn emit_simulation(report: &SimulationReport, name: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            write(dir, name, &report.to_csv())?;
        }
        None => print!("{}", report.to_csv()),
    }
    Ok(())
}

/// Filter to plot from a model, design or filterbank file.
fn response_target(path: &Path, branch: usize) -> Result<StateSpace, CliError> {
    let value: Value = read_json(path)?;
    let invalid = |e: serde_json::Error| CliError::Invalid(format!("{}: {e}", path.display()));
    let bank = if value.get("branches").is_some() {
        let stored: StoredFilterbank = serde_json::from_value(value).map_err(invalid)?;
        PolyphaseFilterBank { pattern: stored.pattern, branches: stored.branches }
    } else if value.get("filter").is_some() {
        let stored: StoredDesign = serde_json::from_value(value).map_err(invalid)?;
        let pattern = stored
            .config
            .and_then(|c| c.spec)
            .and_then(|s| s.pattern)
            .ok_or_else(|| CliError::Invalid(format!("{}: no pattern recorded", path.display())))?;
        extract_filterbank(&stored.filter, &pattern)?
    } else {
        let model: ModelRepr = serde_json::from_value(value).map_err(invalid)?;
        return Ok(model.to_model()?);
    };
    let count = bank.branches.len();
    bank.branches
        .into_iter()
        .nth(branch)
        .map(|b| b.filter)
        .ok_or_else(|| CliError::Invalid(format!("branch {branch} out of range (filterbank has {count})")))
}

pub fn response(path: &Path, branch: usize, grid: usize, out: Option<&Path>) -> Result<(), CliError> {
    let g = response_target(path, branch)?;
    let curve = frequency_response(&g, grid)?;
    match out {
        Some(dir) => {
            write(dir, "response.csv", &curve.to_csv())?;
        }
        None => print!("{}", curve.to_csv()),
    }
    if !curve.skipped.is_empty() {
        eprintln!("skipped {} grid frequencies at poles", curve.skipped.len());
    }
    Ok(())
}
