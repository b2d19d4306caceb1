use serde::Serialize;
use ucbid_core::RegretTrajectory;

use crate::config::ConfigFile;

pub const SCHEMA_VERSION: u32 = 1;

/// JSON companion of a CSV result file.
#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a ConfigFile,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub results: Vec<FinalRegret>,
}

#[derive(Debug, Serialize)]
pub struct FinalRegret {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    pub strategy: String,
    pub t: u64,
    pub mean_regret: f64,
    pub stderr: f64,
    pub mean_win_rate: f64,
}

pub fn final_regrets(v: Option<f64>, traj: &RegretTrajectory) -> impl Iterator<Item = FinalRegret> + '_ {
    traj.curves.iter().map(move |c| {
        let last = c.last();
        FinalRegret {
            v,
            strategy: c.strategy.clone(),
            t: last.t,
            mean_regret: last.mean_regret,
            stderr: last.stderr,
            mean_win_rate: last.mean_win_rate,
        }
    })
}
