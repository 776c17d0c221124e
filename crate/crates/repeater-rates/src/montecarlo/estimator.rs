//! Report plumbing: named estimates, trial records, and the deterministic
//! chunked reduction shared by all simulators.

use rayon::prelude::*;

/// One estimated quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// `sample_std / sqrt(n_samples)`; infinite when n < 2, zero for exact
    /// model values reported alongside empirical ones.
    pub standard_error: f64,
    pub n_samples: u64,
}

/// One swap attempt of a trial: both links' attempt counts and the heralding
/// outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapAttempt {
    pub n1: u64,
    pub n2: u64,
    pub n_max: u64,
    pub n_dif: u64,
    pub swap_success: bool,
}

/// Full record of one simulated trial; kept only for the leading
/// `record_trials` trials of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub attempts: Vec<SwapAttempt>,
    pub total_time_s: f64,
    /// Delivered-state fidelity; absent for two-photon swaps (identically 1)
    /// and for truncated trials.
    pub final_alpha: Option<f64>,
    /// Postselection rounds until delivery; double-chain runs only.
    pub postselection_rounds: Option<u64>,
    pub truncated: bool,
}

/// Named estimates plus optional distribution data from one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub quantities: Vec<(String, Estimate)>,
    /// Empirical pmf over an integer-valued quantity, where the estimator
    /// builds one (value, probability), sorted by value.
    pub histogram: Option<Vec<(u64, f64)>>,
    pub records: Vec<TrialRecord>,
    /// Trials abandoned at the attempt cap; excluded from the means above,
    /// never silently dropped.
    pub truncated_trials: u64,
    pub notes: Vec<String>,
}

impl EstimatorReport {
    pub fn new() -> Self {
        EstimatorReport {
            quantities: Vec::new(),
            histogram: None,
            records: Vec::new(),
            truncated_trials: 0,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, estimate: Estimate) {
        self.quantities.push((name.to_string(), estimate));
    }

    pub fn get(&self, name: &str) -> Option<&Estimate> {
        self.quantities.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// Lookup that panics with the quantity name; for tests and internal
    /// consumers that know the estimator's vocabulary.
    pub fn expect_get(&self, name: &str) -> &Estimate {
        self.get(name)
            .unwrap_or_else(|| panic!("report has no quantity {name:?}"))
    }
}

impl Default for EstimatorReport {
    fn default() -> Self {
        Self::new()
    }
}

/// Compensated accumulator: error-free enough that re-associating *chunks*
/// (never done) would still not show in f64; used so long reductions don't
/// drift with length.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Mean and standard error from aggregated first and second moments.
pub(crate) fn estimate_from_sums(sum: f64, sum_sq: f64, n: u64) -> Estimate {
    if n == 0 {
        return Estimate {
            mean: f64::NAN,
            standard_error: f64::INFINITY,
            n_samples: 0,
        };
    }
    let mean = sum / n as f64;
    let standard_error = if n < 2 {
        f64::INFINITY
    } else {
        let var = ((sum_sq - sum * mean).max(0.0)) / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    Estimate {
        mean,
        standard_error,
        n_samples: n,
    }
}

/// Runs `work` over `n_items` split into fixed chunks of `chunk` items, in
/// parallel, and returns the per-chunk outputs in chunk order. The chunk
/// function receives `(chunk_index, first_item, item_count)`.
pub(crate) fn run_chunked<A: Send>(
    n_items: u64,
    chunk: u64,
    work: impl Fn(u64, u64, u64) -> A + Sync,
) -> Vec<A> {
    let n_chunks = n_items.div_ceil(chunk);
    (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let first = ci * chunk;
            let count = chunk.min(n_items - first);
            work(ci, first, count)
        })
        .collect()
}
