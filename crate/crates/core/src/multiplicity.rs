//! The multiplicity function `ν_{ℓ,S}(t) = #{j : t + 2πj/ℓ ∈ S}` and the
//! sufficient and lattice criteria built on it.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::circle_set::{ArcSet, MERGE_TOL};
use crate::error::{invalid, Result};
use crate::numeric::floor_pow;
use crate::riesz::{riesz_bounds_capped, FrequencySet, DEFAULT_GRAM_CAP};

/// Piecewise-constant `ν_{ℓ,S}` on one period `[0, 2π/ℓ)`.
///
/// `values[i]` holds on `[breakpoints[i], breakpoints[i+1])`, the last piece
/// running to the end of the period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    pub ell: u64,
    pub breakpoints: Vec<f64>,
    pub values: Vec<u64>,
}

impl StepProfile {
    pub fn period(&self) -> f64 {
        TAU / self.ell as f64
    }

    /// `(start, end, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        let period = self.period();
        self.breakpoints.iter().enumerate().map(move |(i, &b)| {
            let end = self.breakpoints.get(i + 1).copied().unwrap_or(period);
            (b, end, self.values[i])
        })
    }

    pub fn value_at(&self, t: f64) -> u64 {
        let s = fold(t, self.period());
        let i = self.breakpoints.partition_point(|&b| b <= s);
        self.values[i.saturating_sub(1)]
    }

    /// `∫_0^{2π/ℓ} ν dt`, which equals the radian measure of `S`.
    pub fn integral(&self) -> f64 {
        self.pieces().map(|(a, b, v)| (b - a) * v as f64).sum()
    }

    /// Length of `{s ∈ [0, 2π/ℓ) : keep(ν(s))}`.
    pub fn measure_where(&self, keep: impl Fn(u64) -> bool) -> f64 {
        self.pieces().filter(|&(_, _, v)| keep(v)).map(|(a, b, _)| b - a).sum()
    }

    pub fn max_value(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: StepProfile = serde_json::from_str(text)?;
        if p.ell == 0 || p.breakpoints.len() != p.values.len() || p.breakpoints.first() != Some(&0.0) {
            return invalid("profile needs ell > 0 and one value per breakpoint, starting at 0");
        }
        if p.breakpoints.windows(2).any(|w| w[0] >= w[1]) || p.breakpoints.last() >= Some(&p.period()) {
            return invalid("profile breakpoints must increase inside [0, 2pi/ell)");
        }
        Ok(p)
    }
}

/// `x mod period` in `[0, period)`, snapping values within tolerance of the end to 0.
fn fold(x: f64, period: f64) -> f64 {
    let r = x - (x / period).floor() * period;
    if r < 0.0 || r >= period - MERGE_TOL {
        0.0
    } else {
        r
    }
}

pub fn nu_profile(set: &ArcSet, ell: u64) -> Result<StepProfile> {
    if ell == 0 {
        return invalid("ell must be positive");
    }
    let period = TAU / ell as f64;
    let mut base: i64 = 0;
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(4 * set.len());
    for arc in set.arcs() {
        let len = arc.length();
        let mut wraps = (len / period).floor();
        let mut rem = len - wraps * period;
        if period - rem <= MERGE_TOL {
            wraps += 1.0;
            rem = 0.0;
        }
        base += wraps as i64;
        if rem <= MERGE_TOL {
            continue;
        }
        let s = fold(arc.start(), period);
        let e = s + rem;
        events.push((s, 1));
        if e <= period + MERGE_TOL {
            events.push((e.min(period), -1));
        } else {
            events.push((period, -1));
            events.push((0.0, 1));
            events.push((e - period, -1));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    // fuse event positions closer than the merge tolerance
    let mut cuts: Vec<(f64, i64)> = Vec::new();
    for (x, d) in events {
        let x = if x <= MERGE_TOL { 0.0 } else { x };
        match cuts.last_mut() {
            Some(last) if x - last.0 <= MERGE_TOL => last.1 += d,
            _ => cuts.push((x, d)),
        }
    }
    if cuts.first().map_or(true, |c| c.0 > 0.0) {
        cuts.insert(0, (0.0, 0));
    }

    let mut breakpoints = Vec::with_capacity(cuts.len());
    let mut values: Vec<u64> = Vec::with_capacity(cuts.len());
    let mut level = base;
    for (x, d) in cuts {
        level += d;
        if period - x <= MERGE_TOL {
            break;
        }
        let v = level.max(0) as u64;
        if values.last() == Some(&v) {
            continue;
        }
        breakpoints.push(x);
        values.push(v);
    }
    Ok(StepProfile {
        ell,
        breakpoints,
        values,
    })
}

/// `ℓ · |{s ∈ [0, 2π/ℓ) : ν(s) < δℓ}|`, the radian measure of `{t : ν(t/ℓ) < δℓ}`.
pub fn sublevel_measure(set: &ArcSet, ell: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let profile = nu_profile(set, ell)?;
    Ok(sublevel_of(&profile, delta))
}

pub fn sublevel_of(profile: &StepProfile, delta: f64) -> f64 {
    let level = delta * profile.ell as f64;
    profile.ell as f64 * profile.measure_where(|v| (v as f64) < level)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("delta = {delta} must lie in (0, 1]"));
    }
    Ok(())
}

/// Slack allowed when comparing a computed bound with the proof's chain.
pub const CHAIN_SLACK: f64 = 1e-9;

/// One `ℓ` of the sufficient-condition check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Row {
    pub ell: u64,
    /// Radian measure of `{t : ν(t/ℓ) < δℓ}`.
    pub sublevel: f64,
    /// `c / ℓ^{1/α}`.
    pub threshold: f64,
    pub condition: bool,
    /// `N = ⌊ℓ^{1/α}⌋` when the condition holds.
    pub n: Option<u64>,
    /// Lower Riesz bound of `{ℓ, 2ℓ, …, Nℓ}` on `S`.
    pub lower: Option<f64>,
    /// `δ(1 − N·sublevel/2π)`.
    pub chain_bound: Option<f64>,
    pub verified: Option<bool>,
}

impl Theorem4Row {
    pub fn status(&self) -> &'static str {
        match self.verified {
            None => "not-applicable",
            Some(true) => "verified",
            Some(false) => "violated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Report {
    pub alpha: f64,
    pub c: f64,
    pub delta: f64,
    pub slack: f64,
    pub rows: Vec<Theorem4Row>,
}

impl Theorem4Report {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.verified == Some(false)).count()
    }

    pub fn fired(&self) -> usize {
        self.rows.iter().filter(|r| r.condition).count()
    }
}

pub fn theorem4_check(set: &ArcSet, alpha: f64, c: f64, delta: f64, ells: &[u64]) -> Result<Theorem4Report> {
    theorem4_check_capped(set, alpha, c, delta, ells, DEFAULT_GRAM_CAP)
}

pub fn theorem4_check_capped(
    set: &ArcSet,
    alpha: f64,
    c: f64,
    delta: f64,
    ells: &[u64],
    cap: usize,
) -> Result<Theorem4Report> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha = {alpha} must lie in (0, 1]"));
    }
    if !(c > 0.0 && c < 1.0) {
        return invalid(format!("c = {c} must lie in (0, 1)"));
    }
    check_delta(delta)?;
    let mut rows = Vec::with_capacity(ells.len());
    for &ell in ells {
        let profile = nu_profile(set, ell)?;
        let sublevel = sublevel_of(&profile, delta);
        let threshold = c / (ell as f64).powf(1.0 / alpha);
        let condition = sublevel < threshold;
        let mut row = Theorem4Row {
            ell,
            sublevel,
            threshold,
            condition,
            n: None,
            lower: None,
            chain_bound: None,
            verified: None,
        };
        if condition {
            let n = floor_pow(ell, 1.0 / alpha).max(1);
            let freqs = FrequencySet::progression(0, ell, n)?;
            let lower = riesz_bounds_capped(&freqs, set, cap)?.lower;
            let chain = delta * (1.0 - n as f64 * sublevel / TAU);
            row.n = Some(n);
            row.lower = Some(lower);
            row.chain_bound = Some(chain);
            row.verified = Some(lower >= chain - CHAIN_SLACK);
        }
        rows.push(row);
    }
    Ok(Theorem4Report {
        alpha,
        c,
        delta,
        slack: CHAIN_SLACK,
        rows,
    })
}

/// The lattice criterion `|{ν = 0}| = 0` against the truncated system `{−Kℓ, …, Kℓ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCheck {
    pub ell: u64,
    #[serde(rename = "K")]
    pub k: u64,
    /// Radian measure of `{t : ν(t/ℓ) = 0}`.
    pub zero_measure: f64,
    pub criterion: bool,
    pub a_numeric: f64,
}

pub fn lattice_frequencies(ell: u64, k: u64) -> Result<FrequencySet> {
    let start = -((k as i64 + 1) * ell as i64);
    FrequencySet::progression(start, ell, 2 * k + 1)
}

pub fn lattice_riesz_check(set: &ArcSet, ell: u64, k: u64) -> Result<LatticeCheck> {
    lattice_riesz_check_capped(set, ell, k, DEFAULT_GRAM_CAP)
}

pub fn lattice_riesz_check_capped(set: &ArcSet, ell: u64, k: u64, cap: usize) -> Result<LatticeCheck> {
    if k == 0 {
        return invalid("truncation K must be positive");
    }
    let profile = nu_profile(set, ell)?;
    let zero_measure = ell as f64 * profile.measure_where(|v| v == 0);
    let freqs = lattice_frequencies(ell, k)?;
    let a_numeric = riesz_bounds_capped(&freqs, set, cap)?.lower;
    Ok(LatticeCheck {
        ell,
        k,
        zero_measure,
        criterion: zero_measure == 0.0,
        a_numeric,
    })
}

/// A notch `[2πj/ℓ + offset, 2πj/ℓ + offset + width)` cut out of a comb.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Notch {
    pub cell: u64,
    pub offset: f64,
    pub width: f64,
}

/// The `2π/ℓ`-periodic comb with a gap of width `gap` centered on each `2πj/ℓ`,
/// minus the given notches.
pub fn comb_with_notches(ell: u64, gap: f64, notches: &[Notch]) -> Result<ArcSet> {
    if ell == 0 {
        return invalid("ell must be positive");
    }
    let period = TAU / ell as f64;
    if !(0.0..period).contains(&gap) {
        return invalid(format!("gap = {gap} must lie in [0, 2pi/ell)"));
    }
    let teeth: Vec<(f64, f64)> = (0..ell)
        .map(|j| {
            let start = j as f64 * period + gap / 2.0;
            (start, start + period - gap)
        })
        .collect();
    let comb = ArcSet::normalize(&teeth)?;
    if notches.is_empty() {
        return Ok(comb);
    }
    let cuts: Vec<(f64, f64)> = notches
        .iter()
        .map(|n| {
            let start = n.cell as f64 * period + n.offset;
            (start, start + n.width)
        })
        .collect();
    Ok(comb.difference(&ArcSet::normalize(&cuts)?))
}
