use std::fs;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use nasq_core::as_geometry::{classify_state, state_verdict};
use nasq_core::io::{state_from_json, state_to_json};
use nasq_core::nas_distance::{
    nas_numeric, nas_pure_bures, nas_pure_relent, werner_bures, werner_relent, Certificate,
    DistanceKind, Method, NasResult, NumericConfig, NumericMode, MAX_NUMERIC_D,
};
use nasq_core::nas_witness::{
    nas_witness_measure, nas_witness_pure, nas_witness_werner, WitnessConfig,
};
use nasq_core::qcore::{DensityMatrix, Dims, PureState};
use nasq_core::states::{classify_werner, werner, WernerParams};
use nasq_core::verify::{run_suite, Suite};
use nasq_core::Error;

use crate::{CliError, CliResult, MeasureArg, ModeArg};

pub const CSV_HEADER: &str = "p,n_relent,n_bures,n_witness,classification";

/// Generic mapping of library errors; callers catch dimension and
/// combination errors first where the context decides the code.
fn core_err(e: Error) -> CliError {
    let code = match &e {
        Error::Parse(_)
        | Error::InvalidState(_)
        | Error::NotHermitian(_)
        | Error::DimensionMismatch(_) => 2,
        Error::ParamOutOfRange(_) => 2,
        Error::BadDimension(_) => 3,
        Error::UnsupportedKind(_) | Error::Unsupported(_) => 4,
        _ => 1,
    };
    CliError::new(code, e.to_string())
}

fn load_state(path: &str) -> CliResult<DensityMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(2, format!("cannot read '{path}': {e}")))?;
    state_from_json(&text).map_err(|e| CliError::new(2, format!("{path}: {e}")))
}

/// `d` of a `2 x d` state handled by the spectral machinery.
fn supported_d(dims: Dims) -> CliResult<usize> {
    match dims.qubit_qudit() {
        Some(d) if d <= MAX_NUMERIC_D => Ok(d),
        _ => Err(CliError::new(
            3,
            format!("field 'dims': {dims} is not 2 x d with 2 <= d <= {MAX_NUMERIC_D}"),
        )),
    }
}

fn open_output(path: &str) -> CliResult<fs::File> {
    fs::File::create(path).map_err(|e| CliError::new(5, format!("cannot write '{path}': {e}")))
}

fn to_json(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialise")
}

pub fn classify(input: &str, tol: f64) -> CliResult<String> {
    let rho = load_state(input)?;
    supported_d(rho.dims())?;
    let c = classify_state(&rho, tol).map_err(core_err)?;
    Ok(to_json(&json!({
        "command": "classify",
        "flags": { "input": input, "tol": tol },
        "dims": [rho.dims().m, rho.dims().n],
        "verdict": c.verdict.as_str(),
        "criterion_value": c.criterion_value,
        "pt_min_eigenvalue": c.pt_min_eigenvalue,
    })))
}

fn distance_kind(m: MeasureArg) -> Option<DistanceKind> {
    match m {
        MeasureArg::Relent => Some(DistanceKind::RelativeEntropy),
        MeasureArg::Bures => Some(DistanceKind::Bures),
        MeasureArg::Trace => Some(DistanceKind::TraceDistance),
        MeasureArg::Hs => Some(DistanceKind::HilbertSchmidt),
        MeasureArg::Witness => None,
    }
}

/// Summary printed for a measure value.
struct Outcome {
    value: f64,
    method: Method,
    gap_estimate: Option<f64>,
    certificate: Value,
}

fn spectrum_of(rho: &DensityMatrix) -> CliResult<Vec<f64>> {
    Ok(rho.spectrum().map_err(core_err)?.values().to_vec())
}

fn summarize(r: &NasResult) -> CliResult<Outcome> {
    let certificate = match &r.certificate {
        Certificate::NearestAs(sigma) => {
            json!({ "kind": "nearest_as", "spectrum": spectrum_of(sigma)? })
        }
        Certificate::Witness(w) => json!({
            "kind": "witness",
            "params": w.params.map(|p| [p.a1, p.a2, p.a3]),
            "expectation": w.expectation,
        }),
    };
    Ok(Outcome {
        value: r.value,
        method: r.method,
        gap_estimate: r.gap_estimate,
        certificate,
    })
}

fn flat_tail(d: usize) -> Vec<f64> {
    let mut s = vec![1.0 / (2 * d + 2) as f64; 2 * d];
    s[0] = 3.0 / (2 * d + 2) as f64;
    s
}

/// `p` of a two-qubit spectrum of the form `((1+3p)/4, (1-p)/4 x 3)`.
fn werner_weight(spec: &[f64]) -> Option<f64> {
    if spec.len() != 4 || spec[1] - spec[3] > 1e-9 {
        return None;
    }
    Some(((4.0 * spec[0] - 1.0) / 3.0).clamp(0.0, 1.0))
}

fn closed_form(rho: &DensityMatrix, measure: MeasureArg) -> CliResult<Outcome> {
    let dims = rho.dims();
    let eig = rho.eig().map_err(core_err)?;
    let spec = spectrum_of(rho)?;
    let no_closed_form = || {
        CliError::new(
            4,
            format!("no closed form for the {} measure of this {dims} state; use --mode aligned or full", measure.name()),
        )
    };
    let closed = |value: f64, certificate: Value| Outcome {
        value,
        method: Method::ClosedForm,
        gap_estimate: None,
        certificate,
    };

    if spec[0] >= 1.0 - 1e-10 {
        let alpha =
            PureState::normalized(eig.vectors.column(0).into_owned(), dims).map_err(core_err)?;
        return match measure {
            MeasureArg::Relent | MeasureArg::Bures => {
                let d = supported_d(dims)?;
                let value = if measure == MeasureArg::Relent {
                    nas_pure_relent(d)
                } else {
                    nas_pure_bures(d)
                };
                Ok(closed(
                    value,
                    json!({ "kind": "nearest_as", "spectrum": flat_tail(d) }),
                ))
            }
            MeasureArg::Witness if dims.m == dims.n => {
                summarize(&nas_witness_pure(&alpha).map_err(core_err)?)
            }
            _ => Err(no_closed_form()),
        };
    }
    if dims == Dims::new(2, 2) {
        if let Some(p) = werner_weight(&spec) {
            let sixth = 1.0 / 6.0;
            let nearest = json!({ "kind": "nearest_as", "spectrum": [0.5, sixth, sixth, sixth] });
            return match measure {
                MeasureArg::Relent => Ok(closed(werner_relent(p), nearest)),
                MeasureArg::Bures => Ok(closed(werner_bures(p), nearest)),
                MeasureArg::Witness => {
                    let params =
                        WernerParams::new(p, std::f64::consts::FRAC_PI_4, 0.0).map_err(core_err)?;
                    let value = nas_witness_werner(&params).map_err(core_err)?;
                    Ok(closed(value, json!({ "kind": "witness", "params": null })))
                }
                _ => Err(no_closed_form()),
            };
        }
    }
    Err(no_closed_form())
}

pub fn measure(
    input: &str,
    measure: MeasureArg,
    mode: ModeArg,
    tol: f64,
    seed: u64,
) -> CliResult<String> {
    let started = Instant::now();
    let rho = load_state(input)?;
    let dims = rho.dims();
    let kind = distance_kind(measure);
    match kind {
        Some(_) => {
            supported_d(dims)?;
        }
        None if dims == Dims::new(2, 2) || dims.m == dims.n => {}
        None => {
            return Err(CliError::new(
                3,
                format!("field 'dims': the witness measure needs a d x d state, got {dims}"),
            ))
        }
    }
    if kind.is_none() && mode == ModeArg::Aligned {
        return Err(CliError::new(
            4,
            "the witness measure has no aligned mode; use closed or full",
        ));
    }

    let is_as = match dims.qubit_qudit() {
        Some(_) => state_verdict(&rho, tol).map_err(core_err)?.is_as,
        None => false,
    };
    let outcome = if is_as {
        let method = match (mode, kind) {
            (ModeArg::Closed, _) => Method::ClosedForm,
            (ModeArg::Aligned, _) => Method::ConjectureAligned,
            (ModeArg::Full, Some(_)) => Method::FullNumeric,
            (ModeArg::Full, None) => Method::GridRefine,
        };
        Outcome {
            value: 0.0,
            method,
            gap_estimate: None,
            certificate: json!({ "kind": "nearest_as", "spectrum": spectrum_of(&rho)? }),
        }
    } else {
        match (mode, kind) {
            (ModeArg::Closed, _) => closed_form(&rho, measure)?,
            (ModeArg::Aligned | ModeArg::Full, Some(k)) => {
                let cfg = NumericConfig {
                    mode: if mode == ModeArg::Aligned {
                        NumericMode::Aligned
                    } else {
                        NumericMode::Full
                    },
                    seed,
                    as_tol: tol,
                    ..NumericConfig::default()
                };
                summarize(&nas_numeric(&rho, k, &cfg).map_err(core_err)?)?
            }
            (_, None) => {
                summarize(&nas_witness_measure(&rho, &WitnessConfig::default()).map_err(core_err)?)?
            }
        }
    };
    Ok(to_json(&json!({
        "command": "measure",
        "flags": { "input": input, "measure": measure, "mode": mode, "tol": tol, "seed": seed },
        "value": outcome.value,
        "method": outcome.method.to_string(),
        "gap_estimate": outcome.gap_estimate,
        "certificate": outcome.certificate,
        "wall_time_s": started.elapsed().as_secs_f64(),
    })))
}

/// `start:stop:steps` with endpoints included.
pub fn parse_grid(grid: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::new(2, format!("field 'grid': '{grid}' {why}"));
    let parts: Vec<&str> = grid.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(bad("is not start:stop:steps"));
    };
    let start: f64 = start
        .trim()
        .parse()
        .map_err(|_| bad("has a non-numeric start"))?;
    let stop: f64 = stop
        .trim()
        .parse()
        .map_err(|_| bad("has a non-numeric stop"))?;
    let steps: usize = steps
        .trim()
        .parse()
        .map_err(|_| bad("has a non-integer step count"))?;
    if steps == 0 || !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
        return Err(bad("needs 0 <= start <= stop <= 1 and steps >= 1"));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                stop
            } else {
                start + (stop - start) * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

struct SweepRow {
    p: f64,
    n_relent: f64,
    n_bures: f64,
    n_witness: f64,
    classification: &'static str,
}

fn sweep_row(p: f64, gamma: f64, phi: f64, mode: ModeArg) -> CliResult<SweepRow> {
    let params = WernerParams::new(p, gamma, phi).map_err(core_err)?;
    let classification = classify_werner(&params).map_err(core_err)?.as_str();
    let (n_relent, n_bures, n_witness) = match mode {
        ModeArg::Closed => (
            werner_relent(p),
            werner_bures(p),
            nas_witness_werner(&params).map_err(core_err)?,
        ),
        ModeArg::Aligned | ModeArg::Full => {
            let rho = werner(&params).map_err(core_err)?;
            let cfg = if mode == ModeArg::Aligned {
                NumericConfig::aligned()
            } else {
                NumericConfig::default()
            };
            let relent = nas_numeric(&rho, DistanceKind::RelativeEntropy, &cfg)
                .map_err(core_err)?
                .value;
            let bures = nas_numeric(&rho, DistanceKind::Bures, &cfg)
                .map_err(core_err)?
                .value;
            let witness = nas_witness_measure(&rho, &WitnessConfig::default())
                .map_err(core_err)?
                .value;
            (relent, bures, witness)
        }
    };
    Ok(SweepRow {
        p,
        n_relent,
        n_bures,
        n_witness,
        classification,
    })
}

pub fn sweep_werner(
    gamma: f64,
    phi: f64,
    grid: &str,
    mode: ModeArg,
    out: &str,
) -> CliResult<String> {
    let started = Instant::now();
    let ps = parse_grid(grid)?;
    WernerParams::new(0.0, gamma, phi).map_err(core_err)?;
    let mut file = open_output(out)?;
    let rows: Vec<SweepRow> = ps
        .par_iter()
        .map(|&p| sweep_row(p, gamma, phi, mode))
        .collect::<CliResult<_>>()?;

    let mut csv = String::with_capacity(64 * (rows.len() + 1));
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.p, r.n_relent, r.n_bures, r.n_witness, r.classification
        ));
    }
    file.write_all(csv.as_bytes())
        .map_err(|e| CliError::new(5, format!("cannot write '{out}': {e}")))?;

    let monotone = rows.windows(2).all(|w| {
        w[1].n_relent >= w[0].n_relent
            && w[1].n_bures >= w[0].n_bures
            && w[1].n_witness >= w[0].n_witness
    });
    Ok(to_json(&json!({
        "command": "sweep-werner",
        "flags": { "gamma": gamma, "phi": phi, "grid": grid, "mode": mode, "out": out },
        "rows": rows.len(),
        "monotone": monotone,
        "wall_time_s": started.elapsed().as_secs_f64(),
    })))
}

pub fn oracle(suite: &str, seed: u64, trials: usize, out: Option<&str>) -> CliResult<String> {
    let parsed: Suite = suite.parse().map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(Suite::name).collect();
        CliError::new(
            6,
            format!(
                "unknown suite '{suite}'; expected one of {}",
                names.join(", ")
            ),
        )
    })?;
    let started = Instant::now();
    let report = run_suite(parsed, seed, trials).map_err(core_err)?;
    let mut summary = json!({
        "command": "oracle",
        "flags": { "suite": suite, "seed": seed, "trials": trials, "out": out },
        "suite": report.suite,
        "trials": report.trials,
        "passed": report.passed,
        "failed": report.failed,
        "worst_slack": report.worst_slack,
        "info_max": report.info_max,
        "reproduction_seed": seed,
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    if report.all_passed() {
        return Ok(to_json(&summary));
    }

    let default_path = format!("nasq-oracle-{}-{seed}.json", report.suite);
    let path = out.unwrap_or(&default_path);
    let failures =
        serde_json::to_string_pretty(&report.failures).expect("reports always serialise");
    let mut file = open_output(path)?;
    file.write_all(failures.as_bytes())
        .map_err(|e| CliError::new(5, format!("cannot write '{path}': {e}")))?;
    let first = &report.failures[0];
    summary["failure_file"] = json!(path);
    summary["first_failure"] = json!({ "trial": first.trial, "seed": first.seed });
    println!("{}", to_json(&summary));
    Err(CliError::new(
        6,
        format!(
            "{} of {} {} trials failed; cases written to {path}",
            report.failed, report.trials, report.suite
        ),
    ))
}

pub fn werner_state(p: f64, gamma: f64, phi: f64, out: Option<&str>) -> CliResult<String> {
    let params = WernerParams::new(p, gamma, phi).map_err(core_err)?;
    let text = state_to_json(&werner(&params).map_err(core_err)?);
    match out {
        None => Ok(text),
        Some(path) => {
            let mut file = open_output(path)?;
            file.write_all(text.as_bytes())
                .map_err(|e| CliError::new(5, format!("cannot write '{path}': {e}")))?;
            Ok(to_json(&json!({
                "command": "werner-state",
                "flags": { "p": p, "gamma": gamma, "phi": phi, "out": path },
            })))
        }
    }
}
