//! Seeded randomised oracle suites.
//!
//! Every suite draws its trial inputs from `seed + trial`, so a failing
//! trial can be replayed on its own. A check passes when its slack is at
//! least `-tolerance`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::as_geometry::{apply_channel, state_verdict, MixedUnitaryChannel};
use crate::error::{Error, Result};
use crate::io::state_to_json;
use crate::metric_bounds::verify_segment_property;
use crate::nas_distance::{nas_numeric, DistanceKind, NumericConfig, NumericMode};
use crate::nas_witness::{
    conjectured_spectral_value, nas_witness_measure, two_qubit_spectral_value, WitnessConfig,
};
use crate::qcore::haar::rng_from_seed;
use crate::qcore::{DensityMatrix, Dims};
use crate::states::{random_density, werner, WernerParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    Monotonicity,
    Convexity,
    Conjecture,
    WitnessIdentity,
    Segment,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Monotonicity,
        Suite::Convexity,
        Suite::Conjecture,
        Suite::WitnessIdentity,
        Suite::Segment,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Monotonicity => "monotonicity",
            Self::Convexity => "convexity",
            Self::Conjecture => "conjecture",
            Self::WitnessIdentity => "witness-identity",
            Self::Segment => "segment",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown suite '{s}'")))
    }
}

/// One measured quantity of a trial.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub slack: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(label: impl Into<String>, slack: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            slack,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.slack >= -self.tolerance
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Input state(s) in the JSON state format.
    pub inputs: Vec<String>,
    /// Quantities reported but not gated.
    pub info: BTreeMap<String, f64>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn worst_slack(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_slack: f64,
    /// Largest value of each informational quantity over all trials.
    pub info_max: BTreeMap<String, f64>,
    pub failures: Vec<TrialOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> Result<SuiteReport> {
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(seed, t);
            match suite {
                Suite::Monotonicity => monotonicity_trial(t, s),
                Suite::Convexity => convexity_trial(t, s),
                Suite::Conjecture => conjecture_trial(t, s),
                Suite::WitnessIdentity => witness_identity_trial(t, s),
                Suite::Segment => segment_trial(t, s),
            }
        })
        .collect::<Result<_>>()?;
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    let worst_slack = outcomes
        .iter()
        .map(TrialOutcome::worst_slack)
        .fold(f64::INFINITY, f64::min);
    let mut info_max: BTreeMap<String, f64> = BTreeMap::new();
    for o in &outcomes {
        for (k, &v) in &o.info {
            let e = info_max.entry(k.clone()).or_insert(f64::NEG_INFINITY);
            *e = e.max(v);
        }
    }
    Ok(SuiteReport {
        suite: suite.name().into(),
        seed,
        trials,
        passed,
        failed: trials - passed,
        worst_slack,
        info_max,
        failures: outcomes.into_iter().filter(|o| !o.passed()).collect(),
    })
}

pub const MONOTONICITY_TOL: f64 = 1e-5;
pub const CONVEXITY_TOL: f64 = 2e-5;
pub const CONJECTURE_TOL: f64 = 1e-6;
pub const WITNESS_IDENTITY_TOL: f64 = 1e-5;
pub const SEGMENT_TOL: f64 = 1e-5;

/// Witness value or a distance measure value.
fn measure(rho: &DensityMatrix, kind: Option<DistanceKind>) -> Result<f64> {
    match kind {
        Some(k) => Ok(nas_numeric(rho, k, &NumericConfig::default())?.value),
        None => Ok(nas_witness_measure(rho, &WitnessConfig::default())?.value),
    }
}

const MEASURES: [(&str, Option<DistanceKind>); 3] = [
    ("relent", Some(DistanceKind::RelativeEntropy)),
    ("bures", Some(DistanceKind::Bures)),
    ("witness", None),
];

/// Random Werner state through a random three-unitary channel.
fn monotonicity_trial(trial: usize, seed: u64) -> Result<TrialOutcome> {
    let mut rng = rng_from_seed(seed);
    let params = WernerParams::new(
        rng.random::<f64>(),
        PI * rng.random::<f64>(),
        TAU * rng.random::<f64>(),
    )?;
    let rho = werner(&params)?;
    let ch = MixedUnitaryChannel::random(4, 3, seed);
    let out = apply_channel(&ch, &rho)?;
    let mut checks = Vec::new();
    for (name, kind) in MEASURES {
        let before = measure(&rho, kind)?;
        let after = measure(&out, kind)?;
        checks.push(Check::new(name, before - after, MONOTONICITY_TOL));
    }
    Ok(TrialOutcome {
        trial,
        seed,
        checks,
        inputs: vec![state_to_json(&rho)],
        info: BTreeMap::new(),
    })
}

fn convexity_trial(trial: usize, seed: u64) -> Result<TrialOutcome> {
    let dims = Dims::new(2, 2);
    let a = [0.25, 0.5, 0.75][trial % 3];
    let r1 = random_density(dims, 1 + trial % 3, seed)?;
    let r2 = random_density(dims, 1 + (trial / 3) % 3, seed ^ 0x9e37_79b9)?;
    let mix = r1.mix(&r2, a)?;
    let mut checks = Vec::new();
    for (name, kind) in MEASURES {
        let n1 = measure(&r1, kind)?;
        let n2 = measure(&r2, kind)?;
        let nm = measure(&mix, kind)?;
        checks.push(Check::new(
            name,
            a * n1 + (1.0 - a) * n2 - nm,
            CONVEXITY_TOL,
        ));
    }
    Ok(TrialOutcome {
        trial,
        seed,
        checks,
        inputs: vec![state_to_json(&r1), state_to_json(&r2)],
        info: BTreeMap::from([("a".to_string(), a)]),
    })
}

/// Full minimisation may not beat the aligned one by more than the tolerance.
fn conjecture_trial(trial: usize, seed: u64) -> Result<TrialOutcome> {
    let d = 2 + trial % 2;
    let n = 2 * d;
    let rank = 1 + (seed as usize) % n;
    let rho = random_density(Dims::new(2, d), rank, seed)?;
    let mut checks = Vec::new();
    let mut info = BTreeMap::new();
    for kind in [
        DistanceKind::RelativeEntropy,
        DistanceKind::Bures,
        DistanceKind::TraceDistance,
        DistanceKind::HilbertSchmidt,
    ] {
        let full = nas_numeric(
            &rho,
            kind,
            &NumericConfig {
                mode: NumericMode::Full,
                seed,
                ..NumericConfig::default()
            },
        )?;
        let gap = full.gap_estimate.unwrap_or(0.0);
        info.insert(format!("gap_{kind}"), gap);
        checks.push(Check::new(format!("{kind}"), -gap, CONJECTURE_TOL));
    }
    Ok(TrialOutcome {
        trial,
        seed,
        checks,
        inputs: vec![state_to_json(&rho)],
        info,
    })
}

/// Grid witness value against the closed spectral formula.
fn witness_identity_trial(trial: usize, seed: u64) -> Result<TrialOutcome> {
    let rho = random_density(Dims::new(2, 2), 1 + trial % 4, seed)?;
    let spec = rho.spectrum()?;
    let grid = nas_witness_measure(&rho, &WitnessConfig::default())?.value;
    let formula = two_qubit_spectral_value(&spec)?;
    let candidate = conjectured_spectral_value(&spec)?;
    Ok(TrialOutcome {
        trial,
        seed,
        checks: vec![Check::new(
            "spectral formula",
            -(grid - formula).abs(),
            WITNESS_IDENTITY_TOL,
        )],
        inputs: vec![state_to_json(&rho)],
        info: BTreeMap::from([
            ("candidate_deviation".to_string(), (grid - candidate).abs()),
            ("value".to_string(), grid),
        ]),
    })
}

/// Additivity of `d_1` and `d_2` along the segment to the nearest AS state.
fn segment_trial(trial: usize, seed: u64) -> Result<TrialOutcome> {
    let dims = Dims::new(2, 2);
    let mut s = seed;
    let rho = loop {
        let r = random_density(dims, 2, s)?;
        if !state_verdict(&r, 1e-6)?.is_as {
            break r;
        }
        s = s.wrapping_add(1 << 32);
    };
    let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let cfg = NumericConfig::default();
    let mut checks = Vec::new();
    let mut info = BTreeMap::new();
    for p in [1, 2] {
        let report = verify_segment_property(&rho, p, &xs, &cfg)?;
        checks.push(Check::new(
            format!("d{p} additivity"),
            -report.max_residual(),
            SEGMENT_TOL,
        ));
        checks.push(Check::new(
            format!("d{p} re-minimisation"),
            -report.max_value_gap(),
            SEGMENT_TOL,
        ));
        let shift = report
            .checks
            .iter()
            .map(|c| c.minimizer_shift)
            .fold(0.0, f64::max);
        info.insert(format!("d{p}_minimizer_shift"), shift);
    }
    Ok(TrialOutcome {
        trial,
        seed,
        checks,
        inputs: vec![state_to_json(&rho)],
        info,
    })
}
