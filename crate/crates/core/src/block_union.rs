//! Translating finite blocks apart so that their union keeps a lower Riesz
//! bound, and assembling truncations of a progression-rich `Λ`.

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle_set::ArcSet;
use crate::error::{invalid, Error, Result};
use crate::riesz::{bounds_of, check_dim, gram_from_spectrum, FrequencySet, DEFAULT_GRAM_CAP};
use crate::trig_poly::{check_freq, IndicatorSpectrum};

/// Candidate order for translations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// `M = 1, 2, 3, …`.
    Stride1,
    /// `M = s, 2s, …` until one qualifies, then a linear scan of the last window.
    CoarseRefine { stride: u64 },
}

impl SearchMode {
    pub fn label(&self) -> String {
        match self {
            SearchMode::Stride1 => "stride-1".to_string(),
            SearchMode::CoarseRefine { stride } => format!("coarse-refine(stride={stride})"),
        }
    }
}

/// Blocks with a common lower Riesz bound `gamma` on a fixed set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSchedule {
    pub blocks: Vec<FrequencySet>,
    /// Measured lower bound of each block.
    pub block_bounds: Vec<f64>,
    pub gamma: f64,
    /// `targets[K-1] = γ/2·(1 + 1/K)` for the union of the first `K` blocks.
    pub targets: Vec<f64>,
}

pub fn schedule_target(gamma: f64, k: usize) -> f64 {
    gamma / 2.0 * (1.0 + 1.0 / k as f64)
}

impl BlockSchedule {
    /// Measure every block on `set` and take `gamma` as their minimum.
    pub fn measure(blocks: Vec<FrequencySet>, set: &ArcSet, cap: usize) -> Result<Self> {
        if blocks.is_empty() {
            return invalid("a schedule needs at least one block");
        }
        let mut search = TranslationSearch::new(set, cap);
        let block_bounds = blocks
            .iter()
            .map(|b| search.lower_bound(b))
            .collect::<Result<Vec<f64>>>()?;
        let gamma = block_bounds.iter().copied().fold(f64::INFINITY, f64::min);
        Self::with_gamma(blocks, block_bounds, gamma)
    }

    /// Schedule with an explicit `gamma`, which must not exceed any measured block bound.
    pub fn with_gamma(blocks: Vec<FrequencySet>, block_bounds: Vec<f64>, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return invalid(format!("gamma = {gamma} must be positive"));
        }
        if block_bounds.len() != blocks.len() || block_bounds.iter().any(|&b| b < gamma) {
            return invalid("every block must have lower bound at least gamma");
        }
        let targets = (1..=blocks.len()).map(|k| schedule_target(gamma, k)).collect();
        Ok(BlockSchedule {
            blocks,
            block_bounds,
            gamma,
            targets,
        })
    }
}

/// Outcome of one translation search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Translation {
    pub m: i64,
    /// Re-measured lower bound of `A1 ∪ (M + A2)`.
    pub bound: f64,
    /// Candidates whose Gram matrix was formed.
    pub evaluations: u64,
}

/// Translation search against one set, caching `f̂_S(n)` for `n ≥ 0`.
pub struct TranslationSearch<'a> {
    set: &'a ArcSet,
    spectrum: IndicatorSpectrum,
    cap: usize,
}

/// Coefficients are appended in chunks so each re-seed serves many candidates.
const SPECTRUM_CHUNK: usize = 4096;
/// Wider unions are evaluated directly instead of through the cache.
const DENSE_SPAN_CAP: i64 = 1 << 22;

impl<'a> TranslationSearch<'a> {
    pub fn new(set: &'a ArcSet, cap: usize) -> Self {
        TranslationSearch {
            set,
            spectrum: IndicatorSpectrum::progression(set, 1, 1),
            cap,
        }
    }

    fn ensure(&mut self, max_diff: i64) {
        let need = max_diff as usize + 1;
        if need > self.spectrum.dense_len() {
            let len = need.max(self.spectrum.dense_len() + SPECTRUM_CHUNK);
            self.spectrum.extend_dense(self.set, len);
        }
    }

    fn gram(&mut self, freqs: &FrequencySet) -> Result<crate::riesz::GramMatrix> {
        check_dim(freqs.len(), self.cap)?;
        let span = freqs.max() - freqs.min();
        if span > DENSE_SPAN_CAP {
            return crate::riesz::gram_capped(freqs, self.set, self.cap);
        }
        self.ensure(span);
        Ok(gram_from_spectrum(freqs, &self.spectrum))
    }

    pub fn lower_bound(&mut self, freqs: &FrequencySet) -> Result<f64> {
        Ok(bounds_of(&self.gram(freqs)?)?.lower)
    }

    /// `λ_min(G) > γ'` via a Cholesky factorization of `G − γ'I`.
    fn exceeds(entries: &DMatrix<Complex64>, gamma_prime: f64) -> bool {
        let mut shifted = entries.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] -= Complex64::new(gamma_prime, 0.0);
        }
        Cholesky::new(shifted).is_some()
    }

    /// Evaluate one candidate; `Some(bound)` when it qualifies.
    fn try_candidate(
        &mut self,
        a1: &FrequencySet,
        a2: &FrequencySet,
        m: i64,
        gamma_prime: f64,
    ) -> Result<Option<f64>> {
        check_freq(a2.max().checked_add(m).unwrap_or(i64::MAX))?;
        let shifted = a2.translate(m)?;
        let Some(union) = a1.disjoint_union(&shifted) else {
            return Ok(None);
        };
        let g = self.gram(&union)?;
        if !Self::exceeds(g.entries(), gamma_prime) {
            return Ok(None);
        }
        let bound = bounds_of(&g)?.lower;
        Ok((bound >= gamma_prime).then_some(bound))
    }

    /// Smallest qualifying `M` in the order given by `mode`.
    pub fn find_translation(
        &mut self,
        a1: &FrequencySet,
        a2: &FrequencySet,
        gamma_prime: f64,
        m_max: i64,
        mode: SearchMode,
    ) -> Result<Translation> {
        self.find_translation_at_step(a1, a2, gamma_prime, m_max, mode, 1)
    }

    fn find_translation_at_step(
        &mut self,
        a1: &FrequencySet,
        a2: &FrequencySet,
        gamma_prime: f64,
        m_max: i64,
        mode: SearchMode,
        step: usize,
    ) -> Result<Translation> {
        if m_max < 1 {
            return invalid("M_max must be at least 1");
        }
        if !(gamma_prime > 0.0) {
            return invalid(format!("target {gamma_prime} must be positive"));
        }
        let floor = self.lower_bound(a1)?.min(self.lower_bound(a2)?);
        if !(gamma_prime < floor) {
            return invalid(format!(
                "target {gamma_prime} must lie below both block bounds (min {floor})"
            ));
        }
        let mut evaluations = 0;
        let exhausted = || Error::SearchExhausted {
            step,
            m_max,
            target: gamma_prime,
        };
        match mode {
            SearchMode::Stride1 => {
                for m in 1..=m_max {
                    evaluations += 1;
                    if let Some(bound) = self.try_candidate(a1, a2, m, gamma_prime)? {
                        return Ok(Translation { m, bound, evaluations });
                    }
                }
                Err(exhausted())
            }
            SearchMode::CoarseRefine { stride } => {
                if stride == 0 {
                    return invalid("coarse stride must be positive");
                }
                let stride = stride as i64;
                let mut coarse = stride.min(m_max);
                loop {
                    evaluations += 1;
                    if self.try_candidate(a1, a2, coarse, gamma_prime)?.is_some() {
                        break;
                    }
                    if coarse >= m_max {
                        return Err(exhausted());
                    }
                    coarse = (coarse + stride).min(m_max);
                }
                let lo = (coarse - stride + 1).max(1);
                for m in lo..=coarse {
                    evaluations += 1;
                    if let Some(bound) = self.try_candidate(a1, a2, m, gamma_prime)? {
                        return Ok(Translation { m, bound, evaluations });
                    }
                }
                unreachable!("the coarse candidate qualified and lies in the refine window")
            }
        }
    }
}

/// [`TranslationSearch::find_translation`] with a fresh cache and stride 1.
pub fn find_translation(
    a1: &FrequencySet,
    a2: &FrequencySet,
    set: &ArcSet,
    gamma_prime: f64,
    m_max: i64,
) -> Result<i64> {
    TranslationSearch::new(set, DEFAULT_GRAM_CAP)
        .find_translation(a1, a2, gamma_prime, m_max, SearchMode::Stride1)
        .map(|t| t.m)
}

/// Result of uniting a whole schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assembly {
    pub lambda: FrequencySet,
    pub blocks: Vec<FrequencySet>,
    /// `M_1 = 0, M_2, …`.
    pub translations: Vec<i64>,
    /// Re-measured lower bound after each step.
    pub step_bounds: Vec<f64>,
    pub evaluations: u64,
    /// Lower bound of the final union, measured from scratch.
    pub bound: f64,
    /// `γ/2·(1 + 1/K)` for the final `K`.
    pub target: f64,
    pub gamma: f64,
    pub mode: SearchMode,
}

impl Assembly {
    pub fn meets_target(&self) -> bool {
        self.bound >= self.target
    }

    /// `{ "blocks", "translations", "bound", "target", "mode" }`.
    pub fn to_report_json(&self) -> serde_json::Value {
        serde_json::json!({
            "blocks": self.blocks,
            "translations": self.translations,
            "bound": self.bound,
            "target": self.target,
            "mode": self.mode.label(),
            "gamma": self.gamma,
            "step_bounds": self.step_bounds,
            "evaluations": self.evaluations,
        })
    }
}

pub fn assemble_lambda(schedule: &BlockSchedule, set: &ArcSet, m_max: i64) -> Result<Assembly> {
    assemble_lambda_with(schedule, set, m_max, SearchMode::Stride1, DEFAULT_GRAM_CAP)
}

pub fn assemble_lambda_with(
    schedule: &BlockSchedule,
    set: &ArcSet,
    m_max: i64,
    mode: SearchMode,
    cap: usize,
) -> Result<Assembly> {
    let Some(first) = schedule.blocks.first() else {
        return invalid("a schedule needs at least one block");
    };
    let mut search = TranslationSearch::new(set, cap);
    let mut lambda = first.clone();
    let mut translations = vec![0];
    let mut step_bounds = vec![search.lower_bound(&lambda)?];
    let mut evaluations = 0;
    for (i, block) in schedule.blocks.iter().enumerate().skip(1) {
        // the union of K = i blocks is extended to K + 1
        let target = schedule_target(schedule.gamma, i + 1);
        let found = search.find_translation_at_step(&lambda, block, target, m_max, mode, i)?;
        lambda = lambda
            .disjoint_union(&block.translate(found.m)?)
            .expect("search only accepts disjoint candidates");
        translations.push(found.m);
        step_bounds.push(found.bound);
        evaluations += found.evaluations;
    }
    let bound = bounds_of(&crate::riesz::gram_capped(&lambda, set, cap)?)?.lower;
    Ok(Assembly {
        lambda,
        blocks: schedule.blocks.clone(),
        translations,
        step_bounds,
        evaluations,
        bound,
        target: schedule_target(schedule.gamma, schedule.blocks.len()),
        gamma: schedule.gamma,
        mode,
    })
}
