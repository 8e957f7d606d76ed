//! Seeded random verification campaigns.
//!
//! A campaign runs `trials` independent trials; trial `t` draws all of its
//! randomness from a ChaCha8 stream with stream id `t`, so results are
//! reproducible, replayable one trial at a time, and independent of how
//! trials are scheduled across threads.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::metric::{covariance, pairing_residual, skew_information, ObservableSet};
use crate::metric::MAX_OBSERVABLES;
use crate::monotone::{default_order_grid, tilde_dominates, MonotoneFunction, TildeOrder};
use crate::oracle::{f_bruteforce_with_budget, OracleBudget};
use crate::spectral::SpectralState;
use crate::volume::{
    build_gram_report, check_main_inequality, commuting_counterexample, hadamard_check,
    pauli_chain_counterexample, pauli_chain_reference, robertson_bound,
};
use crate::{CMat, C64, Error, Result};

/// Independence threshold for the equality mode: F must exceed this times
/// max(1, |det Cov|) on a full-rank draw.
const EQUALITY_STRICT_FLOOR: f64 = 1e-12;
/// Robertson entries above this fail the commuting mode.
const COMMUTING_ENTRY_TOL: f64 = 1e-14;
/// QFI determinants below this fail the commuting mode (the bound must
/// stay informative while the Robertson side collapses).
const COMMUTING_QFI_FLOOR: f64 = 1e-12;
/// Interpolation weights used by the pure-limit mode.
const PURE_LIMIT_EPSILONS: [f64; 3] = [1e-2, 1e-4, 1e-6];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CampaignMode {
    Inequality,
    Identity,
    Oracle,
    Monotonicity,
    Equality,
    PauliChain,
    Commuting,
    PureLimit,
}

impl CampaignMode {
    pub const ALL: [CampaignMode; 8] = [
        CampaignMode::Inequality,
        CampaignMode::Identity,
        CampaignMode::Oracle,
        CampaignMode::Monotonicity,
        CampaignMode::Equality,
        CampaignMode::PauliChain,
        CampaignMode::Commuting,
        CampaignMode::PureLimit,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CampaignMode::Inequality => "INEQUALITY",
            CampaignMode::Identity => "IDENTITY",
            CampaignMode::Oracle => "ORACLE",
            CampaignMode::Monotonicity => "MONOTONICITY",
            CampaignMode::Equality => "EQUALITY",
            CampaignMode::PauliChain => "PAULI_CHAIN",
            CampaignMode::Commuting => "COMMUTING",
            CampaignMode::PureLimit => "PURE_LIMIT",
        }
    }
}

impl std::fmt::Display for CampaignMode {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(self.label())
    }
}

impl std::str::FromStr for CampaignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let canon = s.trim().to_ascii_uppercase().replace('-', "_");
        CampaignMode::ALL
            .into_iter()
            .find(|m| m.label() == canon)
            .ok_or_else(|| Error::UnknownMode(s.to_string()))
    }
}

impl Serialize for CampaignMode {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for CampaignMode {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything a campaign needs; echoed verbatim into the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialConfig {
    pub mode: CampaignMode,
    #[serde(rename = "n")]
    pub dim: usize,
    #[serde(rename = "N")]
    pub n_obs: usize,
    pub trials: u64,
    pub seed: u64,
    #[serde(rename = "f_list")]
    pub functions: Vec<MonotoneFunction>,
    pub tol: f64,
    #[serde(rename = "min_eig_floor")]
    pub floor: f64,
    /// Rerun a single trial by stream id instead of the whole campaign.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay: Option<u64>,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 || self.dim > 8 {
            return Err(Error::Parameter(format!(
                "state dimension must lie in 2..=8, got {}",
                self.dim
            )));
        }
        if self.n_obs < 1 || self.n_obs > MAX_OBSERVABLES {
            return Err(Error::Parameter(format!(
                "observable count must lie in 1..={MAX_OBSERVABLES}, got {}",
                self.n_obs
            )));
        }
        if self.trials == 0 {
            return Err(Error::Parameter("need at least one trial".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Parameter(format!(
                "tolerance must be positive and finite, got {}",
                self.tol
            )));
        }
        if !self.floor.is_finite() || self.floor < 0.0 || self.floor * self.dim as f64 >= 1.0 {
            return Err(Error::Parameter(format!(
                "eigenvalue floor must satisfy 0 ≤ floor·n < 1, got {}",
                self.floor
            )));
        }
        if self.functions.is_empty() {
            return Err(Error::Parameter("function list is empty".into()));
        }
        for f in &self.functions {
            if !f.is_regular() {
                return Err(Error::RequiresRegular(f.label()));
            }
        }
        match self.mode {
            CampaignMode::Identity | CampaignMode::Equality => {
                if self.n_obs < 2 {
                    return Err(Error::Parameter(format!(
                        "{} mode needs at least two observables",
                        self.mode
                    )));
                }
            }
            CampaignMode::Oracle => {
                let default_ok = self.dim <= 3 && self.n_obs <= 3;
                let wide_ok = self.dim == 4 && self.n_obs <= 2;
                if !(default_ok || wide_ok) {
                    return Err(Error::Parameter(format!(
                        "oracle mode is capped at n ≤ 3, N ≤ 3 (or n = 4, N ≤ 2); \
                         got n = {}, N = {}",
                        self.dim, self.n_obs
                    )));
                }
            }
            CampaignMode::Monotonicity => {
                if self.functions.len() < 2 {
                    return Err(Error::Parameter(
                        "monotonicity mode needs at least two functions".into(),
                    ));
                }
            }
            CampaignMode::PauliChain => {
                if self.dim != self.n_obs || self.dim % 2 != 0 {
                    return Err(Error::Parameter(format!(
                        "chain mode needs an even dimension with N = n, got n = {}, N = {}",
                        self.dim, self.n_obs
                    )));
                }
            }
            CampaignMode::Commuting => {
                let cap = self.dim * (self.dim - 1) / 2;
                if self.n_obs > cap {
                    return Err(Error::Parameter(format!(
                        "commuting mode needs N ≤ n(n−1)/2 = {cap}, got N = {}",
                        self.n_obs
                    )));
                }
            }
            CampaignMode::Inequality | CampaignMode::PureLimit => {}
        }
        Ok(())
    }
}

/// One row of campaign output; unavailable quantities stay `None`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed_offset: u64,
    pub f: String,
    #[serde(rename = "F_det")]
    pub f_det: Option<f64>,
    #[serde(rename = "F_oracle")]
    pub f_oracle: Option<f64>,
    pub cov_vol: Option<f64>,
    pub qfi_vol: Option<f64>,
    pub robertson_det: Option<f64>,
    pub residual: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub rows: usize,
    pub pass_count: usize,
    pub max_residual: f64,
    pub min_f_det: Option<f64>,
    pub wall_time_s: f64,
    pub all_pass: bool,
}

impl Aggregate {
    pub fn from_records(records: &[TrialRecord], wall_time_s: f64) -> Self {
        let rows = records.len();
        let pass_count = records.iter().filter(|r| r.pass).count();
        let max_residual = records
            .iter()
            .filter_map(|r| r.residual)
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max);
        let min_f_det = records
            .iter()
            .filter_map(|r| r.f_det)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            });
        Aggregate {
            rows,
            pass_count,
            max_residual,
            min_f_det,
            wall_time_s,
            all_pass: rows > 0 && pass_count == rows,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub config: TrialConfig,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

/// The RNG for one trial: one ChaCha8 stream per seed offset.
pub fn trial_rng(seed: u64, offset: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(offset);
    rng
}

fn complex_gaussian(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
    CMat::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Normalized Ginibre draw GG†/Tr(GG†), rejected until the smallest
/// eigenvalue clears `floor`; 1000 consecutive rejections abort.
pub fn random_faithful_state(
    rng: &mut ChaCha8Rng,
    dim: usize,
    floor: f64,
) -> Result<SpectralState> {
    if dim < 2 {
        return Err(Error::Parameter(format!(
            "state dimension must be at least 2, got {dim}"
        )));
    }
    if !floor.is_finite() || floor < 0.0 || floor * dim as f64 >= 1.0 {
        return Err(Error::Parameter(format!(
            "eigenvalue floor must satisfy 0 ≤ floor·n < 1, got {floor}"
        )));
    }
    let mut rejections = 0usize;
    loop {
        let g = complex_gaussian(rng, dim);
        let wishart = &g * g.adjoint();
        let trace = wishart.trace().re;
        let rho = wishart.map(|z| z / trace);
        let state = SpectralState::decompose(&rho, true)?;
        if state.min_eigenvalue() >= floor {
            return Ok(state);
        }
        rejections += 1;
        if rejections >= 1000 {
            return Err(Error::RejectionLimit {
                n: dim,
                floor,
                rejections,
            });
        }
    }
}

/// GUE-style draws (M + M†)/2; exactly Hermitian by construction.
pub fn random_observables(
    rng: &mut ChaCha8Rng,
    dim: usize,
    n_obs: usize,
) -> Result<ObservableSet> {
    let mats: Vec<CMat> = (0..n_obs)
        .map(|_| {
            let m = complex_gaussian(rng, dim);
            CMat::from_fn(dim, dim, |k, l| (m[(k, l)] + m[(l, k)].conj()) * 0.5)
        })
        .collect();
    ObservableSet::new(mats)
}

/// A rank-one state with exact spectrum (1, 0, …, 0): the basis comes from
/// the QR factor of a Ginibre draw, so no eigensolver noise leaks into the
/// zero eigenvalues.
pub fn random_pure_state(rng: &mut ChaCha8Rng, dim: usize) -> Result<SpectralState> {
    if dim < 2 {
        return Err(Error::Parameter(format!(
            "state dimension must be at least 2, got {dim}"
        )));
    }
    let g = complex_gaussian(rng, dim);
    let q = g.qr().q();
    let mut evals = vec![0.0; dim];
    evals[0] = 1.0;
    SpectralState::from_parts(evals, q)
}

/// Pin the rayon worker count (no-op without the `parallel` feature).
/// `None` keeps the library/runtime default.
pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    let Some(t) = threads else {
        return Ok(());
    };
    if t == 0 {
        return Err(Error::Parameter("thread count must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = t;
    Ok(())
}

/// Run all trials of a campaign. Per-trial failures are recorded in the
/// corresponding rows, not raised; only configuration problems error out.
pub fn run_campaign(config: &TrialConfig) -> Result<TrialReport> {
    config.validate()?;
    let mono_pairs = if config.mode == CampaignMode::Monotonicity {
        ordered_pairs(&config.functions)?
    } else {
        Vec::new()
    };
    let offsets: Vec<u64> = match config.replay {
        Some(offset) => vec![offset],
        None => (0..config.trials).collect(),
    };
    let start = Instant::now();
    let per_trial = map_offsets(config, &mono_pairs, &offsets);
    let trials: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let aggregate = Aggregate::from_records(&trials, start.elapsed().as_secs_f64());
    Ok(TrialReport {
        config: config.clone(),
        trials,
        aggregate,
    })
}

#[cfg(feature = "parallel")]
fn map_offsets(
    config: &TrialConfig,
    pairs: &[(MonotoneFunction, MonotoneFunction)],
    offsets: &[u64],
) -> Vec<Vec<TrialRecord>> {
    use rayon::prelude::*;
    offsets
        .par_iter()
        .map(|&offset| run_trial(config, pairs, offset))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn map_offsets(
    config: &TrialConfig,
    pairs: &[(MonotoneFunction, MonotoneFunction)],
    offsets: &[u64],
) -> Vec<Vec<TrialRecord>> {
    offsets
        .iter()
        .map(|&offset| run_trial(config, pairs, offset))
        .collect()
}

/// Classify every unordered function pair on the standard grid and keep
/// the ordered ones as (larger-volume f, smaller-volume g): f̃ ≤ g̃
/// pointwise forces gap_f ≥ gap_g, hence V_f ≥ V_g.
fn ordered_pairs(
    functions: &[MonotoneFunction],
) -> Result<Vec<(MonotoneFunction, MonotoneFunction)>> {
    let grid = default_order_grid();
    let mut out = Vec::new();
    for i in 0..functions.len() {
        for j in (i + 1)..functions.len() {
            match tilde_dominates(&functions[i], &functions[j], &grid)? {
                TildeOrder::FLeG => out.push((functions[i], functions[j])),
                TildeOrder::GLeF => out.push((functions[j], functions[i])),
                TildeOrder::Equal | TildeOrder::Incomparable => {}
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Parameter(
            "no grid-ordered function pairs to compare".into(),
        ));
    }
    Ok(out)
}

fn error_record(offset: u64, f: &str, err: &Error) -> TrialRecord {
    TrialRecord {
        seed_offset: offset,
        f: f.to_string(),
        f_det: None,
        f_oracle: None,
        cov_vol: None,
        qfi_vol: None,
        robertson_det: None,
        residual: None,
        pass: false,
        error: Some(err.to_string()),
    }
}

fn run_trial(
    config: &TrialConfig,
    pairs: &[(MonotoneFunction, MonotoneFunction)],
    offset: u64,
) -> Vec<TrialRecord> {
    match trial_body(config, pairs, offset) {
        Ok(records) => records,
        Err(err) => vec![error_record(offset, "*", &err)],
    }
}

fn trial_body(
    config: &TrialConfig,
    pairs: &[(MonotoneFunction, MonotoneFunction)],
    offset: u64,
) -> Result<Vec<TrialRecord>> {
    let mut rng = trial_rng(config.seed, offset);
    let mut records = Vec::new();
    match config.mode {
        CampaignMode::Inequality => {
            let state = random_faithful_state(&mut rng, config.dim, config.floor)?;
            let obs = random_observables(&mut rng, config.dim, config.n_obs)?;
            for &f in &config.functions {
                let made = (|| -> Result<TrialRecord> {
                    let report = build_gram_report(f, &state, &obs)?;
                    let residual =
                        (-report.f_det).max(0.0) / report.cov_det.abs().max(1.0);
                    Ok(TrialRecord {
                        seed_offset: offset,
                        f: f.to_string(),
                        f_det: Some(report.f_det),
                        f_oracle: None,
                        cov_vol: Some(report.cov_vol),
                        qfi_vol: Some(report.qfi_vol),
                        robertson_det: Some(report.robertson_det),
                        residual: Some(residual),
                        pass: check_main_inequality(&report, config.tol),
                        error: None,
                    })
                })();
                records.push(made.unwrap_or_else(|e| error_record(offset, &f.label(), &e)));
            }
        }
        CampaignMode::Identity => {
            let state = random_faithful_state(&mut rng, config.dim, config.floor)?;
            let obs = random_observables(&mut rng, config.dim, config.n_obs)?;
            let (a, b) = (obs.get(0), obs.get(1));
            for &f in &config.functions {
                let made = (|| -> Result<TrialRecord> {
                    let raw = pairing_residual(f, &state, a, b)?;
                    let cov = covariance(&state, a, b)?;
                    let residual = raw / cov.abs().max(1.0);
                    Ok(TrialRecord {
                        seed_offset: offset,
                        f: f.to_string(),
                        f_det: None,
                        f_oracle: None,
                        cov_vol: None,
                        qfi_vol: None,
                        robertson_det: None,
                        residual: Some(residual),
                        pass: residual <= config.tol,
                        error: None,
                    })
                })();
                records.push(made.unwrap_or_else(|e| error_record(offset, &f.label(), &e)));
            }
        }
        CampaignMode::Oracle => {
            let state = random_faithful_state(&mut rng, config.dim, config.floor)?;
            let obs = random_observables(&mut rng, config.dim, config.n_obs)?;
            let budget = if config.dim <= 3 && config.n_obs <= 3 {
                OracleBudget::default()
            } else {
                OracleBudget::wide()
            };
            for &f in &config.functions {
                let made = (|| -> Result<TrialRecord> {
                    let report = build_gram_report(f, &state, &obs)?;
                    let oracle = f_bruteforce_with_budget(f, &state, &obs, &budget)?;
                    let residual =
                        (report.f_det - oracle).abs() / report.f_det.abs().max(1.0);
                    Ok(TrialRecord {
                        seed_offset: offset,
                        f: f.to_string(),
                        f_det: Some(report.f_det),
                        f_oracle: Some(oracle),
                        cov_vol: Some(report.cov_vol),
                        qfi_vol: Some(report.qfi_vol),
                        robertson_det: Some(report.robertson_det),
                        residual: Some(residual),
                        pass: residual <= config.tol,
                        error: None,
                    })
                })();
                records.push(made.unwrap_or_else(|e| error_record(offset, &f.label(), &e)));
            }
        }
        CampaignMode::Monotonicity => {
            let state = random_faithful_state(&mut rng, config.dim, config.floor)?;
            let obs = random_observables(&mut rng, config.dim, config.n_obs)?;
            for &(big, small) in pairs {
                let label = format!("{big}>={small}");
                let made = (|| -> Result<TrialRecord> {
                    let rb = build_gram_report(big, &state, &obs)?;
                    let rs = build_gram_report(small, &state, &obs)?;
                    let residual = (rs.qfi_vol - rb.qfi_vol).max(0.0);
                    Ok(TrialRecord {
                        seed_offset: offset,
                        f: label.clone(),
                        f_det: Some(rb.f_det),
                        f_oracle: None,
                        cov_vol: Some(rb.cov_vol),
                        qfi_vol: Some(rb.qfi_vol),
                        robertson_det: Some(rb.robertson_det),
                        residual: Some(residual),
                        pass: rb.qfi_vol >= rs.qfi_vol - config.tol,
                        error: None,
                    })
                })();
                records.push(made.unwrap_or_else(|e| error_record(offset, &label, &e)));
            }
        }
        CampaignMode::Equality => {
            let state = random_faithful_state(&mut rng, config.dim, config.floor)?;
            let free = random_observables(&mut rng, config.dim, config.n_obs - 1)?;
            // scale by a power of two so the dependent Gram rows stay
            // exactly proportional in floating point
            const SCALES: [f64; 6] = [1.0, -1.0, 2.0, -2.0, 0.5, -0.5];
            let scale = SCALES[rng.random_range(0..SCALES.len())];
            let mut dependent = free.matrices().to_vec();
            dependent.push(free.get(0).map(|z| z * scale));
            let dependent = ObservableSet::new(dependent)?;
            let independent = random_observables(&mut rng, config.dim, config.n_obs)?;
            for &f in &config.functions {
                let made = (|| -> Result<TrialRecord> {
                    let rd = build_gram_report(f, &state, &dependent)?;
                    let ri = build_gram_report(f, &state, &independent)?;
                    let dep_ok = rd.equality_flag
                        && rd.f_det.abs() <= config.tol
                        && rd.cov_vol <= config.tol;
                    let ind_ok = !ri.equality_flag
                        && ri.f_det > EQUALITY_STRICT_FLOOR * ri.cov_det.abs().max(1.0);
                    Ok(TrialRecord {
                        seed_offset: offset,
                        f: f.to_string(),
                        f_det: Some(rd.f_det),
                        f_oracle: None,
                        cov_vol: Some(rd.cov_vol),
                        qfi_vol: Some(rd.qfi_vol),
                        robertson_det: Some(rd.robertson_det),
                        residual: Some(rd.f_det.abs().max(rd.cov_vol)),
                        pass: dep_ok && ind_ok,
                        error: None,
                    })
                })();
                records.push(made.unwrap_or_else(|e| error_record(offset, &f.label(), &e)));
            }
        }
        CampaignMode::PauliChain => {
            let raw: Vec<f64> = (0..config.dim)
                .map(|i| (i + 1) as f64 + rng.random_range(0.0..0.4))
                .collect();
            let total: f64 = raw.iter().sum();
            let lambdas: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let (state, obs) = pauli_chain_counterexample(&lambdas)?;
            for &f in &config.functions {
                let made = (|| -> Result<TrialRecord> {
                    let (ref_skews, ref_rob) = pauli_chain_reference(f, &lambdas)?;
                    let (_, rob_det) = robertson_bound(&state, &obs)?;
                    let mut dev = (rob_det - ref_rob).abs() / ref_rob.abs().max(1.0);
                    let mut product = 1.0;
                    for (h, reference) in ref_skews.iter().enumerate() {
                        let skew = skew_information(f, &state, obs.get(h))?;
                        product *= skew;
                        dev = dev.max((skew - reference).abs() / reference.abs().max(1.0));
                    }
                    let report = build_gram_report(f, &state, &obs)?;
                    let pass = dev <= config.tol
                        && product < rob_det
                        && hadamard_check(&report.cov_gram)?;
                    Ok(TrialRecord {
                        seed_offset: offset,
                        f: f.to_string(),
                        f_det: Some(report.f_det),
                        f_oracle: None,
                        cov_vol: Some(report.cov_vol),
                        qfi_vol: Some(report.qfi_vol),
                        robertson_det: Some(rob_det),
                        residual: Some(dev),
                        pass,
                        error: None,
                    })
                })();
                records.push(made.unwrap_or_else(|e| error_record(offset, &f.label(), &e)));
            }
        }
        CampaignMode::Commuting => {
            let sub_seed: u64 = rng.random();
            let (state, obs) = commuting_counterexample(config.dim, config.n_obs, sub_seed)?;
            let (rob, rob_det) = robertson_bound(&state, &obs)?;
            let max_entry = rob.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            for &f in &config.functions {
                let made = (|| -> Result<TrialRecord> {
                    let report = build_gram_report(f, &state, &obs)?;
                    let pass = max_entry <= COMMUTING_ENTRY_TOL
                        && rob_det == 0.0
                        && report.qfi_det > COMMUTING_QFI_FLOOR;
                    Ok(TrialRecord {
                        seed_offset: offset,
                        f: f.to_string(),
                        f_det: Some(report.f_det),
                        f_oracle: None,
                        cov_vol: Some(report.cov_vol),
                        qfi_vol: Some(report.qfi_vol),
                        robertson_det: Some(rob_det),
                        residual: Some(max_entry),
                        pass,
                        error: None,
                    })
                })();
                records.push(made.unwrap_or_else(|e| error_record(offset, &f.label(), &e)));
            }
        }
        CampaignMode::PureLimit => {
            let state = random_pure_state(&mut rng, config.dim)?;
            let obs = random_observables(&mut rng, config.dim, config.n_obs)?;
            let pure_density = state.density();
            for &f in &config.functions {
                let made = (|| -> Result<TrialRecord> {
                    let rank_one = build_gram_report(f, &state, &obs)?;
                    let mut gaps = Vec::with_capacity(PURE_LIMIT_EPSILONS.len());
                    for &eps in &PURE_LIMIT_EPSILONS {
                        let mut mixed = pure_density.map(|z| z * (1.0 - eps));
                        let uniform = eps / config.dim as f64;
                        for k in 0..config.dim {
                            mixed[(k, k)] += C64::new(uniform, 0.0);
                        }
                        let st = SpectralState::decompose(&mixed, true)?;
                        gaps.push(build_gram_report(f, &st, &obs)?.f_det);
                    }
                    let slack = 1e-12 * gaps[0].abs().max(1.0);
                    let decreasing =
                        gaps[0] >= gaps[1] - slack && gaps[1] >= gaps[2] - slack;
                    Ok(TrialRecord {
                        seed_offset: offset,
                        f: f.to_string(),
                        f_det: Some(rank_one.f_det),
                        f_oracle: None,
                        cov_vol: Some(rank_one.cov_vol),
                        qfi_vol: Some(rank_one.qfi_vol),
                        robertson_det: Some(rank_one.robertson_det),
                        residual: Some(rank_one.f_det.abs()),
                        pass: rank_one.f_det.abs() <= config.tol && decreasing,
                        error: None,
                    })
                })();
                records.push(made.unwrap_or_else(|e| error_record(offset, &f.label(), &e)));
            }
        }
    }
    Ok(records)
}
