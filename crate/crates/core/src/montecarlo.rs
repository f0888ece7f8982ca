//! Reproducible Monte Carlo estimators.
//!
//! Trials are cut into fixed-size chunks; chunk `i` draws from
//! `stream.child(i)` and returns an integer tally. Tallies are combined in
//! chunk order, so a result depends only on `(seed, trials, chunk_size)` and
//! never on the number of worker threads.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::ensembles::{sample, EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::exact::SphereRegion;
use crate::gepp::{factorize, PivotRule};
use crate::rng::RandomStream;

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// Largest `n` for which [`permutation_census`] keeps a full histogram over
/// the symmetric group.
pub const MAX_HISTOGRAM_N: usize = 7;

const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub chunk_size: u64,
    /// Upper bound on worker threads; `None` uses rayon's global pool.
    pub workers: Option<usize>,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            chunk_size: DEFAULT_CHUNK_SIZE,
            workers: None,
        }
    }
}

impl McOptions {
    pub fn with_workers(workers: usize) -> Self {
        McOptions {
            workers: Some(workers),
            ..Self::default()
        }
    }
}

/// Runs `trials` trials in chunks and returns one tally per chunk, in chunk
/// order.
pub fn run_chunks<T, F>(trials: u64, stream: &RandomStream, opts: &McOptions, per_chunk: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RandomStream, u64) -> Result<T> + Sync,
{
    if opts.chunk_size == 0 {
        return Err(Error::domain("chunk size must be positive"));
    }
    let chunks = trials.div_ceil(opts.chunk_size);
    let job = || {
        (0..chunks)
            .into_par_iter()
            .map(|i| {
                let len = opts.chunk_size.min(trials - i * opts.chunk_size);
                per_chunk(&mut stream.child(i), len)
            })
            .collect::<Result<Vec<T>>>()
    };
    match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?
            .install(job),
        None => job(),
    }
}

fn count_successes<F>(trials: u64, stream: &RandomStream, opts: &McOptions, trial: F) -> Result<u64>
where
    F: Fn(&mut RandomStream) -> Result<bool> + Sync,
{
    let tallies = run_chunks(trials, stream, opts, |rng, len| {
        let mut hits = 0u64;
        for _ in 0..len {
            hits += u64::from(trial(rng)?);
        }
        Ok(hits)
    })?;
    Ok(tallies.into_iter().sum())
}

/// A Bernoulli proportion estimate with a normal-approximation 95% interval.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub label: String,
    pub beta: Option<f64>,
    pub rule: Option<PivotRule>,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    /// `sqrt(p̂(1 - p̂)/trials)`.
    pub std_err: f64,
    /// `p̂ ± 1.96·std_err`, clipped to `[0, 1]`.
    pub ci95: (f64, f64),
    pub seed: u64,
}

impl EstimateResult {
    pub fn from_counts(label: impl Into<String>, successes: u64, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::domain("trials must be positive"));
        }
        if successes > trials {
            return Err(Error::domain("successes exceed trials"));
        }
        let p_hat = successes as f64 / trials as f64;
        let std_err = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        let ci95 = ((p_hat - Z_95 * std_err).max(0.0), (p_hat + Z_95 * std_err).min(1.0));
        Ok(EstimateResult {
            label: label.into(),
            beta: None,
            rule: None,
            trials,
            successes,
            p_hat,
            std_err,
            ci95,
            seed,
        })
    }

    pub fn with_beta(mut self, beta: Option<f64>) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_rule(mut self, rule: PivotRule) -> Self {
        self.rule = Some(rule);
        self
    }

    /// Whether `value` lies within `k` standard errors of `p̂`.
    pub fn within_sigmas(&self, value: f64, k: f64) -> bool {
        (self.p_hat - value).abs() <= k * self.std_err
    }
}

impl Serialize for EstimateResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EstimateResult", 11)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("beta", &self.beta)?;
        st.serialize_field("rule", &self.rule)?;
        st.serialize_field("trials", &self.trials)?;
        st.serialize_field("successes", &self.successes)?;
        st.serialize_field("p_hat", &self.p_hat)?;
        st.serialize_field("std_err", &self.std_err)?;
        st.serialize_field("ci_lo", &self.ci95.0)?;
        st.serialize_field("ci_hi", &self.ci95.1)?;
        st.serialize_field("ci_method", "normal")?;
        st.serialize_field("seed", &self.seed)?;
        st.end()
    }
}

/// The β index a family carries in the β-Hermite naming (1, 2, 4), or the
/// explicit β of the tridiagonal model.
pub fn nominal_beta(spec: &EnsembleSpec) -> Option<f64> {
    match spec.family() {
        Family::Goe => Some(1.0),
        Family::Gue => Some(2.0),
        Family::Gse => Some(4.0),
        Family::HBeta => spec.beta(),
        Family::IidGaussian => None,
    }
}

/// Fraction of sampled matrices whose GEPP factorization under `rule` swaps
/// rows at the first elimination step. For `n = 2` this is the probability
/// of any row swap at all.
pub fn estimate_pivot_prob(
    spec: &EnsembleSpec,
    rule: PivotRule,
    trials: u64,
    stream: &RandomStream,
    opts: &McOptions,
) -> Result<EstimateResult> {
    if trials == 0 {
        return Err(Error::domain("trials must be positive"));
    }
    let hits = count_successes(trials, stream, opts, |rng| {
        Ok(factorize(&sample(spec, rng)?, rule).first_step_swapped())
    })?;
    Ok(
        EstimateResult::from_counts(format!("pivot_{}", spec.family()), hits, trials, stream.seed())?
            .with_beta(nominal_beta(spec))
            .with_rule(rule),
    )
}

/// Estimates `P(|Z₁| + … + |Z_β| > √2 |Z_{β+1}|)` for iid standard normals.
pub fn estimate_p1(beta: u32, trials: u64, stream: &RandomStream, opts: &McOptions) -> Result<EstimateResult> {
    if beta == 0 {
        return Err(Error::domain("beta must be a positive integer"));
    }
    if trials == 0 {
        return Err(Error::domain("trials must be positive"));
    }
    let hits = count_successes(trials, stream, opts, |rng| {
        let mut sum = 0.0;
        for _ in 0..beta {
            sum += rng.standard_normal().abs();
        }
        Ok(sum > SQRT_2 * rng.standard_normal().abs())
    })?;
    Ok(EstimateResult::from_counts("p1", hits, trials, stream.seed())?
        .with_beta(Some(f64::from(beta)))
        .with_rule(PivotRule::L1))
}

/// [`estimate_p1`] for β = 1..=10, row β drawing from `stream.child(β)`.
pub fn table1_sweep(trials: u64, stream: &RandomStream, opts: &McOptions) -> Result<Vec<EstimateResult>> {
    (1..=10u32)
        .map(|beta| {
            let mut r = estimate_p1(beta, trials, &stream.child(u64::from(beta)), opts)?;
            r.seed = stream.seed();
            Ok(r)
        })
        .collect()
}

/// Empirical distribution of GEPP-induced permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub spec: EnsembleSpec,
    pub rule: PivotRule,
    pub trials: u64,
    /// Counts keyed by the one-based permutation; `None` when
    /// `n > MAX_HISTOGRAM_N`.
    pub permutations: Option<BTreeMap<Vec<usize>, u64>>,
    /// `swaps[s]` counts factorizations with `s` row interchanges.
    pub swaps: Vec<u64>,
    /// `cycles[c]` counts permutations with `c` disjoint cycles.
    pub cycles: Vec<u64>,
    pub first_step_swaps: u64,
    pub seed: u64,
}

impl Census {
    fn empty(spec: EnsembleSpec, rule: PivotRule, seed: u64) -> Self {
        let n = spec.n();
        Census {
            spec,
            rule,
            trials: 0,
            permutations: (n <= MAX_HISTOGRAM_N).then(BTreeMap::new),
            swaps: vec![0; n],
            cycles: vec![0; n + 1],
            first_step_swaps: 0,
            seed,
        }
    }

    fn merge(&mut self, other: Census) {
        self.trials += other.trials;
        self.first_step_swaps += other.first_step_swaps;
        for (a, b) in self.swaps.iter_mut().zip(other.swaps) {
            *a += b;
        }
        for (a, b) in self.cycles.iter_mut().zip(other.cycles) {
            *a += b;
        }
        if let (Some(mine), Some(theirs)) = (self.permutations.as_mut(), other.permutations) {
            for (k, v) in theirs {
                *mine.entry(k).or_insert(0) += v;
            }
        }
    }

    /// Count for a one-based permutation (zero if unseen or no histogram).
    pub fn count(&self, perm: &[usize]) -> u64 {
        self.permutations
            .as_ref()
            .and_then(|h| h.get(perm).copied())
            .unwrap_or(0)
    }

    pub fn most_frequent(&self) -> Option<(&[usize], u64)> {
        self.permutations
            .as_ref()?
            .iter()
            .max_by_key(|(_, &c)| c)
            .map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn mean_swaps(&self) -> f64 {
        weighted_mean(&self.swaps)
    }

    pub fn mean_cycles(&self) -> f64 {
        weighted_mean(&self.cycles)
    }

    pub fn first_step_estimate(&self) -> Result<EstimateResult> {
        Ok(EstimateResult::from_counts(
            format!("pivot_{}", self.spec.family()),
            self.first_step_swaps,
            self.trials,
            self.seed,
        )?
        .with_beta(nominal_beta(&self.spec))
        .with_rule(self.rule))
    }
}

fn weighted_mean(hist: &[u64]) -> f64 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return f64::NAN;
    }
    hist.iter().enumerate().map(|(k, &c)| k as f64 * c as f64).sum::<f64>() / total as f64
}

#[derive(Serialize)]
struct PermCount<'a> {
    perm: &'a [usize],
    count: u64,
    frequency: f64,
}

impl Serialize for Census {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let perms: Option<Vec<PermCount>> = self.permutations.as_ref().map(|h| {
            h.iter()
                .map(|(k, &c)| PermCount {
                    perm: k,
                    count: c,
                    frequency: c as f64 / self.trials as f64,
                })
                .collect()
        });
        let mut st = s.serialize_struct("Census", 10)?;
        st.serialize_field("ensemble", &self.spec)?;
        st.serialize_field("rule", &self.rule)?;
        st.serialize_field("trials", &self.trials)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("first_step_swaps", &self.first_step_swaps)?;
        st.serialize_field("swap_counts", &self.swaps)?;
        st.serialize_field("cycle_counts", &self.cycles)?;
        st.serialize_field("mean_swaps", &self.mean_swaps())?;
        st.serialize_field("mean_cycles", &self.mean_cycles())?;
        st.serialize_field("permutations", &perms)?;
        st.end()
    }
}

/// Tallies the permutations, swap counts and cycle counts GEPP produces on
/// `trials` samples of `spec`.
pub fn permutation_census(
    spec: &EnsembleSpec,
    rule: PivotRule,
    trials: u64,
    stream: &RandomStream,
    opts: &McOptions,
) -> Result<Census> {
    if trials == 0 {
        return Err(Error::domain("trials must be positive"));
    }
    let parts = run_chunks(trials, stream, opts, |rng, len| {
        let mut c = Census::empty(*spec, rule, stream.seed());
        for _ in 0..len {
            let f = factorize(&sample(spec, rng)?, rule);
            c.trials += 1;
            c.swaps[f.swaps] += 1;
            c.cycles[f.cycle_count()] += 1;
            c.first_step_swaps += u64::from(f.first_step_swapped());
            if let Some(h) = c.permutations.as_mut() {
                *h.entry(f.perm.one_based()).or_insert(0) += 1;
            }
        }
        Ok(c)
    })?;
    let mut total = Census::empty(*spec, rule, stream.seed());
    for p in parts {
        total.merge(p);
    }
    Ok(total)
}

/// A uniform point on S² with its membership in both pivot regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub in_l1_region: bool,
    pub in_modulus_region: bool,
}

/// `count` uniform points on the unit sphere (normalized Gaussian triples).
pub fn sphere_region_samples(count: u64, stream: &RandomStream, opts: &McOptions) -> Result<Vec<RegionSample>> {
    if count == 0 {
        return Err(Error::domain("sample count must be positive"));
    }
    let chunks = run_chunks(count, stream, opts, |rng, len| {
        let mut out = Vec::with_capacity(len as usize);
        while (out.len() as u64) < len {
            let (gx, gy, gz) = (rng.standard_normal(), rng.standard_normal(), rng.standard_normal());
            let r = (gx * gx + gy * gy + gz * gz).sqrt();
            if r == 0.0 {
                continue;
            }
            let (x, y, z) = (gx / r, gy / r, gz / r);
            out.push(RegionSample {
                x,
                y,
                z,
                in_l1_region: SphereRegion::L1Cone.contains(x, y, z),
                in_modulus_region: SphereRegion::ModulusCone.contains(x, y, z),
            });
        }
        Ok(out)
    })?;
    Ok(chunks.into_iter().flatten().collect())
}
