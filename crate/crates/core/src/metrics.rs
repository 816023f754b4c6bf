//! Segregation and satisfaction measures for finished networks, and their
//! aggregation across trials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::Scenario;
use crate::network::NetworkState;

/// Friendships split into same-group (distance 0) and cross-group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DyadCounts {
    pub homo: usize,
    pub hetero: usize,
}

impl DyadCounts {
    pub fn total(&self) -> usize {
        self.homo + self.hetero
    }

    pub fn hetero_pct(&self) -> Option<f64> {
        (self.total() > 0).then(|| 100.0 * self.hetero as f64 / self.total() as f64)
    }
}

pub fn dyad_counts(state: &NetworkState) -> DyadCounts {
    let homo = state
        .edges()
        .iter()
        .filter(|&&(x, y)| state.dist(x, y) == 0.0)
        .count();
    DyadCounts {
        homo,
        hetero: state.edge_count() - homo,
    }
}

/// Share of same-group alters per ego. Egos without friends have no share
/// and are left out of every mean.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoSimilarity {
    pub per_ego: Vec<Option<f64>>,
    pub overall: Option<f64>,
    pub majority: Option<f64>,
    pub minority: Option<f64>,
    pub isolates: usize,
}

pub fn ego_alter_similarity(state: &NetworkState) -> EgoSimilarity {
    let per_ego: Vec<Option<f64>> = (0..state.len())
        .map(|ego| {
            let alters = state.neighbors(ego);
            if alters.is_empty() {
                return None;
            }
            let same = alters
                .iter()
                .filter(|&&a| state.dist(ego, a) == 0.0)
                .count();
            Some(100.0 * same as f64 / alters.len() as f64)
        })
        .collect();

    let agents = state.agents();
    let mean_where = |keep: &dyn Fn(usize) -> bool| {
        mean(
            per_ego
                .iter()
                .enumerate()
                .filter(|&(id, _)| keep(id))
                .filter_map(|(_, v)| *v),
        )
    };
    EgoSimilarity {
        overall: mean_where(&|_| true),
        majority: mean_where(&|id| !agents[id].is_minority()),
        minority: mean_where(&|id| agents[id].is_minority()),
        isolates: per_ego.iter().filter(|v| v.is_none()).count(),
        per_ego,
    }
}

/// An agent is satisfied when it holds at least half its capacity in friends.
pub fn is_satisfied(degree: u32, capacity: u32) -> bool {
    2 * u64::from(degree) >= u64::from(capacity)
}

pub fn satisfied_count(state: &NetworkState) -> usize {
    state
        .agents()
        .iter()
        .filter(|a| is_satisfied(state.degree(a.id), a.tc))
        .count()
}

/// Percentage of satisfied agents.
pub fn satisfaction(state: &NetworkState) -> f64 {
    if state.is_empty() {
        return 100.0;
    }
    100.0 * satisfied_count(state) as f64 / state.len() as f64
}

pub fn fb_offline_ratio(fb_mean: f64, off_mean: f64) -> Result<f64> {
    if off_mean == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(fb_mean / off_mean)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Mean and sample standard deviation (n − 1). A single value has SD 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        let m = mean(values.iter().copied())?;
        let sd = if values.len() < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
            (ss / (values.len() - 1) as f64).sqrt()
        };
        Some(Stat { mean: m, sd })
    }
}

/// Metrics for one simulated network. Field order is the `trials.csv`
/// column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub case_id: u32,
    pub scenario: Scenario,
    pub trial: u32,
    pub seed: u64,
    pub n_agents: usize,
    pub n_minority: usize,
    pub n_tolerant: usize,
    pub homo_dyads: usize,
    pub hetero_dyads: usize,
    pub total_dyads: usize,
    pub hetero_pct: Option<f64>,
    pub mean_similarity: Option<f64>,
    pub mean_similarity_majority: Option<f64>,
    pub mean_similarity_minority: Option<f64>,
    pub pct_satisfied: f64,
    pub n_unsatisfied: usize,
    pub n_isolates: usize,
}

impl TrialRecord {
    pub fn measure(
        case_id: u32,
        scenario: Scenario,
        trial: u32,
        seed: u64,
        state: &NetworkState,
    ) -> Self {
        let dyads = dyad_counts(state);
        let similarity = ego_alter_similarity(state);
        let agents = state.agents();
        TrialRecord {
            case_id,
            scenario,
            trial,
            seed,
            n_agents: agents.len(),
            n_minority: agents.iter().filter(|a| a.is_minority()).count(),
            n_tolerant: agents.iter().filter(|a| a.to > 0).count(),
            homo_dyads: dyads.homo,
            hetero_dyads: dyads.hetero,
            total_dyads: dyads.total(),
            hetero_pct: dyads.hetero_pct(),
            mean_similarity: similarity.overall,
            mean_similarity_majority: similarity.majority,
            mean_similarity_minority: similarity.minority,
            pct_satisfied: satisfaction(state),
            n_unsatisfied: agents.len() - satisfied_count(state),
            n_isolates: similarity.isolates,
        }
    }

    pub fn minority_pct(&self) -> f64 {
        100.0 * self.n_minority as f64 / self.n_agents as f64
    }
}

/// Cross-trial aggregate for one (case, scenario) cell. Field order is the
/// `summary.csv` column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub case_id: u32,
    pub scenario: Scenario,
    pub n_trials: usize,
    pub similarity_mean: Option<f64>,
    pub similarity_sd: Option<f64>,
    pub similarity_majority_mean: Option<f64>,
    pub similarity_majority_sd: Option<f64>,
    pub similarity_minority_mean: Option<f64>,
    pub similarity_minority_sd: Option<f64>,
    /// How friendless egos enter the similarity columns.
    pub similarity_isolates: String,
    pub homo_dyads_mean: f64,
    pub homo_dyads_sd: f64,
    pub hetero_dyads_mean: f64,
    pub hetero_dyads_sd: f64,
    pub total_dyads_mean: f64,
    pub total_dyads_sd: f64,
    /// Cross-group share of all dyads pooled over trials.
    pub hetero_pct_pooled: Option<f64>,
    /// Mean over trials of each trial's cross-group share.
    pub hetero_pct_trial_mean: Option<f64>,
    pub hetero_pct_trial_sd: Option<f64>,
    pub pct_satisfied_mean: f64,
    pub pct_satisfied_sd: f64,
    pub pct_satisfied_min: f64,
    pub isolates_mean: f64,
    pub isolates_sd: f64,
    pub minority_pct_mean: f64,
    pub minority_pct_sd: f64,
}

pub const ISOLATES_EXCLUDED: &str = "excluded";

fn split(stat: Option<Stat>) -> (Option<f64>, Option<f64>) {
    (stat.map(|s| s.mean), stat.map(|s| s.sd))
}

pub fn summarize(trials: &[TrialRecord]) -> Result<ScenarioSummary> {
    let first = trials.first().ok_or(Error::NoTrials)?;
    if let Some(other) = trials
        .iter()
        .find(|t| t.case_id != first.case_id || t.scenario != first.scenario)
    {
        return Err(Error::MixedTrials(format!(
            "case {} {} and case {} {}",
            first.case_id, first.scenario, other.case_id, other.scenario
        )));
    }

    let defined =
        |f: fn(&TrialRecord) -> Option<f64>| -> Vec<f64> { trials.iter().filter_map(f).collect() };
    let all = |f: fn(&TrialRecord) -> f64| -> Stat {
        Stat::of(&trials.iter().map(f).collect::<Vec<_>>()).expect("non-empty")
    };

    let (similarity_mean, similarity_sd) = split(Stat::of(&defined(|t| t.mean_similarity)));
    let (similarity_majority_mean, similarity_majority_sd) =
        split(Stat::of(&defined(|t| t.mean_similarity_majority)));
    let (similarity_minority_mean, similarity_minority_sd) =
        split(Stat::of(&defined(|t| t.mean_similarity_minority)));
    let (hetero_pct_trial_mean, hetero_pct_trial_sd) = split(Stat::of(&defined(|t| t.hetero_pct)));

    let pooled = DyadCounts {
        homo: trials.iter().map(|t| t.homo_dyads).sum(),
        hetero: trials.iter().map(|t| t.hetero_dyads).sum(),
    };
    let homo = all(|t| t.homo_dyads as f64);
    let hetero = all(|t| t.hetero_dyads as f64);
    let total = all(|t| t.total_dyads as f64);
    let satisfied = all(|t| t.pct_satisfied);
    let isolates = all(|t| t.n_isolates as f64);
    let minority = all(TrialRecord::minority_pct);

    Ok(ScenarioSummary {
        case_id: first.case_id,
        scenario: first.scenario,
        n_trials: trials.len(),
        similarity_mean,
        similarity_sd,
        similarity_majority_mean,
        similarity_majority_sd,
        similarity_minority_mean,
        similarity_minority_sd,
        similarity_isolates: ISOLATES_EXCLUDED.to_string(),
        homo_dyads_mean: homo.mean,
        homo_dyads_sd: homo.sd,
        hetero_dyads_mean: hetero.mean,
        hetero_dyads_sd: hetero.sd,
        total_dyads_mean: total.mean,
        total_dyads_sd: total.sd,
        hetero_pct_pooled: pooled.hetero_pct(),
        hetero_pct_trial_mean,
        hetero_pct_trial_sd,
        pct_satisfied_mean: satisfied.mean,
        pct_satisfied_sd: satisfied.sd,
        pct_satisfied_min: trials
            .iter()
            .map(|t| t.pct_satisfied)
            .fold(f64::INFINITY, f64::min),
        isolates_mean: isolates.mean,
        isolates_sd: isolates.sd,
        minority_pct_mean: minority.mean,
        minority_pct_sd: minority.sd,
    })
}
