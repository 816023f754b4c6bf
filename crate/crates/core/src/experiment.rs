//! Scenario sweeps: configuration, per-trial seeding, parallel execution and
//! aggregation into summary and ratio tables.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{run_to_equilibrium, SchedulerPolicy};
use crate::error::{Error, Result};
use crate::identity::IdentitySpace;
use crate::io;
use crate::metrics::{fb_offline_ratio, summarize, ScenarioSummary, TrialRecord};
use crate::network::NetworkState;
use crate::sampling::{sample_population, PopulationSpec, RngSeed};

/// Mean percentage of same-ethnicity alters among offline friends reported by
/// Hofstra, Corten, van Tubergen & Ellison (2017, American Sociological Review).
pub const REFERENCE_OFFLINE_SIMILARITY: f64 = 76.218;
/// Same study, Facebook friends excluding kin.
pub const REFERENCE_FACEBOOK_SIMILARITY: f64 = 75.974;
/// Facebook-to-offline similarity ratio of the same study, as published.
pub const REFERENCE_RATIO: f64 = 0.997;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Offline,
    Facebook,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::Offline, Scenario::Facebook];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Offline => "offline",
            Scenario::Facebook => "facebook",
        }
    }

    fn code(self) -> u64 {
        match self {
            Scenario::Offline => 0,
            Scenario::Facebook => 1,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offline" => Ok(Scenario::Offline),
            "facebook" => Ok(Scenario::Facebook),
            other => Err(Error::InvalidConfig(vec![format!(
                "scenario '{other}' must be 'offline' or 'facebook'"
            )])),
        }
    }
}

/// Population size and mean tie capacity for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub n: usize,
    pub tc_mu: f64,
}

impl CellSpec {
    pub const OFFLINE: CellSpec = CellSpec { n: 30, tc_mu: 3.0 };
    pub const FACEBOOK: CellSpec = CellSpec {
        n: 300,
        tc_mu: 30.0,
    };
}

fn offline_default() -> CellSpec {
    CellSpec::OFFLINE
}

fn facebook_default() -> CellSpec {
    CellSpec::FACEBOOK
}

/// One outreach regime, run under both scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub case_id: u32,
    pub q: f64,
    #[serde(default = "offline_default")]
    pub offline: CellSpec,
    #[serde(default = "facebook_default")]
    pub facebook: CellSpec,
}

impl CaseSpec {
    pub fn new(case_id: u32, q: f64) -> Self {
        Self {
            case_id,
            q,
            offline: CellSpec::OFFLINE,
            facebook: CellSpec::FACEBOOK,
        }
    }

    pub fn cell(&self, scenario: Scenario) -> CellSpec {
        match scenario {
            Scenario::Offline => self.offline,
            Scenario::Facebook => self.facebook,
        }
    }
}

/// A full sweep. Every field defaults to the built-in `paper` preset: three
/// outreach cases (q = .2, .5, .8), two scenarios, 100 trials each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: f64,
    pub tc_sigma2: f64,
    pub weights: Vec<f64>,
    pub trials: u32,
    pub base_seed: u64,
    pub cases: Vec<CaseSpec>,
    pub policy: SchedulerPolicy,
    /// Worker threads; `None` uses every available core.
    pub workers: Option<usize>,
    pub export_edges: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::paper()
    }
}

impl ExperimentConfig {
    pub fn paper() -> Self {
        Self {
            p: 0.22,
            tc_sigma2: 0.25,
            weights: vec![1.0],
            trials: 100,
            base_seed: 20_211_108,
            cases: vec![
                CaseSpec::new(1, 0.2),
                CaseSpec::new(2, 0.5),
                CaseSpec::new(3, 0.8),
            ],
            policy: SchedulerPolicy::ShuffledRounds,
            workers: None,
            export_edges: false,
            out_dir: None,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            other => Err(Error::InvalidConfig(vec![format!(
                "unknown preset '{other}'"
            )])),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn space(&self) -> Result<IdentitySpace> {
        IdentitySpace::new(self.weights.clone())
    }

    pub fn case(&self, case_id: u32) -> Result<&CaseSpec> {
        self.cases
            .iter()
            .find(|c| c.case_id == case_id)
            .ok_or_else(|| Error::InvalidConfig(vec![format!("no case with case_id {case_id}")]))
    }

    pub fn population_spec(&self, case: &CaseSpec, scenario: Scenario) -> Result<PopulationSpec> {
        let cell = case.cell(scenario);
        Ok(PopulationSpec {
            n: cell.n,
            p: self.p,
            q: case.q,
            tc_mu: cell.tc_mu,
            tc_sigma2: self.tc_sigma2,
            space: self.space()?,
        })
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if let Err(Error::InvalidSpace(msg)) = self.space() {
            problems.push(format!("weights: {msg}"));
        }
        if self.trials == 0 {
            problems.push("trials must be at least 1".into());
        }
        if self.cases.is_empty() {
            problems.push("cases must not be empty".into());
        }
        if self.workers == Some(0) {
            problems.push("workers must be at least 1".into());
        }
        let space = self.space().unwrap_or_default();
        for (i, case) in self.cases.iter().enumerate() {
            if self.cases[..i].iter().any(|c| c.case_id == case.case_id) {
                problems.push(format!("cases[{i}].case_id {} is duplicated", case.case_id));
            }
            for scenario in Scenario::ALL {
                let cell = case.cell(scenario);
                let spec = PopulationSpec {
                    n: cell.n,
                    p: self.p,
                    q: case.q,
                    tc_mu: cell.tc_mu,
                    tc_sigma2: self.tc_sigma2,
                    space: space.clone(),
                };
                problems.extend(spec.problems(&format!("cases[{i}].{scenario}.")));
            }
        }
        problems.dedup();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in cell (case, scenario): the base seed plus a
/// fixed SplitMix64 hash of the cell coordinates.
pub fn trial_seed(base_seed: u64, case_id: u32, scenario: Scenario, trial: u32) -> u64 {
    let h = splitmix64(u64::from(case_id));
    let h = splitmix64(h ^ scenario.code());
    let h = splitmix64(h ^ u64::from(trial));
    base_seed.wrapping_add(h)
}

/// A finished simulation.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    pub state: NetworkState,
}

/// Samples a population from `seed` and grows it to equilibrium with the
/// same generator.
pub fn run_trial(
    config: &ExperimentConfig,
    case: &CaseSpec,
    scenario: Scenario,
    trial: u32,
    seed: u64,
) -> Result<TrialOutcome> {
    let spec = config.population_spec(case, scenario)?;
    let mut rng = RngSeed(seed).rng();
    let agents = sample_population(&spec, &mut rng)?;
    let state = NetworkState::new(spec.space, agents)?;
    let state = run_to_equilibrium(state, &mut rng, config.policy);
    let record = TrialRecord::measure(case.case_id, scenario, trial, seed, &state);
    Ok(TrialOutcome { record, state })
}

/// Runs one simulation with an explicit seed, as trial 0 of its cell.
pub fn run_single(
    config: &ExperimentConfig,
    case_id: u32,
    scenario: Scenario,
    seed: u64,
) -> Result<TrialOutcome> {
    config.validate()?;
    run_trial(config, config.case(case_id)?, scenario, 0, seed)
}

/// One row of `ratios.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub case_id: u32,
    pub q: f64,
    pub offline_similarity: f64,
    pub facebook_similarity: f64,
    pub ratio: f64,
    pub reference_ratio: f64,
    /// Simulated ratio minus the reference ratio.
    pub delta: f64,
}

/// Everything a sweep produces, in deterministic (case, scenario, trial)
/// order.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub trials: Vec<TrialRecord>,
    pub summaries: Vec<ScenarioSummary>,
    pub ratios: Vec<RatioRow>,
}

impl SweepOutput {
    pub fn summary(&self, case_id: u32, scenario: Scenario) -> Option<&ScenarioSummary> {
        self.summaries
            .iter()
            .find(|s| s.case_id == case_id && s.scenario == scenario)
    }

    pub fn ratio(&self, case_id: u32) -> Option<&RatioRow> {
        self.ratios.iter().find(|r| r.case_id == case_id)
    }
}

struct Job<'a> {
    case: &'a CaseSpec,
    scenario: Scenario,
    trial: u32,
    seed: u64,
}

fn jobs(config: &ExperimentConfig) -> Vec<Job<'_>> {
    let mut out = Vec::new();
    for case in &config.cases {
        for scenario in Scenario::ALL {
            for trial in 0..config.trials {
                let seed = trial_seed(config.base_seed, case.case_id, scenario, trial);
                out.push(Job {
                    case,
                    scenario,
                    trial,
                    seed,
                });
            }
        }
    }
    out
}

/// Runs every trial and aggregates, calling `inspect` on each finished
/// simulation in output order. Trials run in parallel but results are
/// ordered independently of completion order.
pub fn simulate_sweep_with<F>(config: &ExperimentConfig, mut inspect: F) -> Result<SweepOutput>
where
    F: FnMut(&TrialOutcome) -> Result<()>,
{
    config.validate()?;
    let jobs = jobs(config);
    let run = || -> Vec<Result<TrialOutcome>> {
        jobs.par_iter()
            .map(|j| run_trial(config, j.case, j.scenario, j.trial, j.seed))
            .collect()
    };
    let outcomes = match config.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidConfig(vec![format!("workers: {e}")]))?
            .install(run),
        None => run(),
    };

    let mut trials = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let outcome = outcome?;
        inspect(&outcome)?;
        trials.push(outcome.record);
    }

    let mut summaries = Vec::new();
    let mut ratios = Vec::new();
    for case in &config.cases {
        let mut cell_means = Vec::new();
        for scenario in Scenario::ALL {
            let cell: Vec<TrialRecord> = trials
                .iter()
                .filter(|t| t.case_id == case.case_id && t.scenario == scenario)
                .cloned()
                .collect();
            let summary = summarize(&cell)?;
            cell_means.push(summary.similarity_mean);
            summaries.push(summary);
        }
        if let [Some(offline), Some(facebook)] = cell_means[..] {
            let ratio = fb_offline_ratio(facebook, offline)?;
            ratios.push(RatioRow {
                case_id: case.case_id,
                q: case.q,
                offline_similarity: offline,
                facebook_similarity: facebook,
                ratio,
                reference_ratio: REFERENCE_RATIO,
                delta: ratio - REFERENCE_RATIO,
            });
        }
    }

    Ok(SweepOutput {
        trials,
        summaries,
        ratios,
    })
}

pub fn simulate_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    simulate_sweep_with(config, |_| Ok(()))
}

/// Filename stem for per-trial exports, e.g. `c3_facebook_t007`.
pub fn trial_stem(record: &TrialRecord) -> String {
    format!(
        "c{}_{}_t{:03}",
        record.case_id, record.scenario, record.trial
    )
}

/// Runs the sweep and writes `trials.csv`, `summary.csv`, `ratios.csv` and,
/// when enabled, per-trial agent and edge lists into `out_dir`.
pub fn run_sweep(config: &ExperimentConfig, out_dir: &Path) -> Result<SweepOutput> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let output = simulate_sweep_with(config, |outcome| {
        if config.export_edges {
            let stem = trial_stem(&outcome.record);
            io::write_agents(&out_dir.join(format!("agents_{stem}.csv")), &outcome.state)?;
            io::write_edges(&out_dir.join(format!("edges_{stem}.csv")), &outcome.state)?;
        }
        Ok(())
    })?;
    io::write_rows(&out_dir.join(io::TRIALS_FILE), &output.trials)?;
    io::write_rows(&out_dir.join(io::SUMMARY_FILE), &output.summaries)?;
    io::write_rows(&out_dir.join(io::RATIOS_FILE), &output.ratios)?;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: u32) -> ExperimentConfig {
        ExperimentConfig {
            trials,
            cases: vec![CaseSpec::new(2, 0.5)],
            ..ExperimentConfig::paper()
        }
    }

    #[test]
    fn preset_matches_grid() {
        let c = ExperimentConfig::preset("paper").unwrap();
        assert_eq!(c.trials, 100);
        assert_eq!(c.p, 0.22);
        assert_eq!(c.tc_sigma2, 0.25);
        assert_eq!(c.weights, vec![1.0]);
        let qs: Vec<f64> = c.cases.iter().map(|c| c.q).collect();
        assert_eq!(qs, vec![0.2, 0.5, 0.8]);
        for case in &c.cases {
            assert_eq!(case.offline, CellSpec { n: 30, tc_mu: 3.0 });
            assert_eq!(
                case.facebook,
                CellSpec {
                    n: 300,
                    tc_mu: 30.0
                }
            );
        }
        assert_eq!(jobs(&c).len(), 600);
        assert!(ExperimentConfig::preset("other").is_err());
    }

    #[test]
    fn json_defaults_to_preset() {
        assert_eq!(
            ExperimentConfig::from_json("{}").unwrap(),
            ExperimentConfig::paper()
        );
        let c =
            ExperimentConfig::from_json(r#"{"trials": 3, "cases": [{"case_id": 9, "q": 0.1}]}"#)
                .unwrap();
        assert_eq!(c.trials, 3);
        assert_eq!(c.cases, vec![CaseSpec::new(9, 0.1)]);
    }

    #[test]
    fn json_rejects_unknown_fields() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"trails": 3}"#),
            Err(Error::Json(_))
        ));
    }

    #[test]
    fn validation_lists_offending_fields() {
        let json = r#"{"p": 1.5, "trials": 0, "cases": [{"case_id": 1, "q": 2.0, "offline": {"n": 1, "tc_mu": 3.0}}]}"#;
        let Err(Error::InvalidConfig(problems)) = ExperimentConfig::from_json(json) else {
            panic!("expected validation failure");
        };
        let text = problems.join("\n");
        assert!(text.contains("trials"));
        assert!(text.contains("cases[0].offline.n"));
        assert!(text.contains("cases[0].facebook.q"));
        assert!(text.contains("cases[0].offline.p"));
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a = trial_seed(1, 1, Scenario::Offline, 0);
        assert_eq!(a, trial_seed(1, 1, Scenario::Offline, 0));
        assert_eq!(trial_seed(2, 1, Scenario::Offline, 0), a.wrapping_add(1));
        let mut all: Vec<u64> = (1..=3)
            .flat_map(|c| {
                Scenario::ALL
                    .into_iter()
                    .flat_map(move |s| (0..100).map(move |t| trial_seed(0, c, s, t)))
            })
            .collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 600);
    }

    #[test]
    fn single_case_one_trial() {
        let out = simulate_sweep(&small(1)).unwrap();
        assert_eq!(out.trials.len(), 2);
        assert_eq!(out.summaries.len(), 2);
        assert_eq!(out.ratios.len(), 1);
        assert_eq!(out.trials[0].scenario, Scenario::Offline);
        assert_eq!(out.trials[1].scenario, Scenario::Facebook);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let one = simulate_sweep(&ExperimentConfig {
            workers: Some(1),
            ..small(4)
        })
        .unwrap();
        let many = simulate_sweep(&ExperimentConfig {
            workers: Some(4),
            ..small(4)
        })
        .unwrap();
        assert_eq!(one.trials, many.trials);
    }

    #[test]
    fn single_run_uses_given_seed() {
        let config = ExperimentConfig::paper();
        let a = run_single(&config, 1, Scenario::Offline, 42).unwrap();
        let b = run_single(&config, 1, Scenario::Offline, 42).unwrap();
        assert_eq!(a.record.seed, 42);
        assert_eq!(a.state.edges(), b.state.edges());
        assert!(run_single(&config, 7, Scenario::Offline, 42).is_err());
    }

    #[test]
    fn scenario_parsing() {
        assert_eq!("facebook".parse::<Scenario>().unwrap(), Scenario::Facebook);
        assert!("online".parse::<Scenario>().is_err());
    }
}
