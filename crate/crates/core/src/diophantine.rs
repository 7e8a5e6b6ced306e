//! Coprime fractions, the approximation counting function `M_ρ`, the dilated
//! coprime-residue sets `𝒥_{p,[ℓ]}` and their disjointness ladder.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::circle_set::{residues, ArcSet, Provenance, SAlphaSpec, Variant};
use crate::error::{invalid, Result};
use crate::numeric::{ceil_pow, floor_pow, gcd, is_prime, primes};

/// A reduced fraction `m/n` with `1 ≤ m < n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoprimePair {
    pub m: u64,
    pub n: u64,
}

impl CoprimePair {
    pub fn value(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

/// All reduced `m/n` with `n ≤ N`, ordered by `(n, m)`.
pub fn coprime_pairs(n_max: u64) -> Vec<CoprimePair> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        for m in 1..n {
            if gcd(m, n) == 1 {
                out.push(CoprimePair { m, n });
            }
        }
    }
    out
}

/// The strict approximation condition `|x − m/n| < n^{−(1+ρ)}`.
pub fn approximates(x: f64, m: u64, n: u64, rho: f64) -> bool {
    (x - m as f64 / n as f64).abs() < (n as f64).powf(-(1.0 + rho))
}

fn check_counting_args(x: f64, rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("x = {x} must lie in [0, 1]"));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return invalid(format!("rho = {rho} must lie in (0, 1)"));
    }
    Ok(())
}

/// `M_ρ(x, N)`: reduced fractions `m/n`, `n ≤ N`, with `|x − m/n| < n^{−(1+ρ)}`.
///
/// The radius `n^{−ρ}` in units of `1/n` is below one, so only the two
/// integers next to `nx` can qualify for each `n`.
pub fn count_m_rho(x: f64, n_max: u64, rho: f64) -> Result<u64> {
    check_counting_args(x, rho)?;
    Ok((2..=n_max).map(|n| count_at(x, n, rho)).sum())
}

fn count_at(x: f64, n: u64, rho: f64) -> u64 {
    let base = (x * n as f64).floor() as i64;
    (base..=base + 1)
        .filter(|&m| m >= 1 && (m as u64) < n)
        .map(|m| m as u64)
        .filter(|&m| gcd(m, n) == 1 && approximates(x, m, n, rho))
        .count() as u64
}

/// Count restricted to the shell `lo ≤ n ≤ hi`.
fn count_in_shell(x: f64, lo: f64, hi: f64, rho: f64) -> u64 {
    let first = (lo.ceil() as u64).max(2);
    let last = hi.floor() as u64;
    (first..=last).map(|n| count_at(x, n, rho)).sum()
}

/// Uniform points `i/(k−1)` together with every Farey fraction of order `q`.
pub fn adversarial_grid(uniform: usize, farey_order: u64) -> Vec<f64> {
    let mut xs: Vec<f64> = match uniform {
        0 => Vec::new(),
        1 => vec![0.5],
        k => (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
    };
    xs.push(0.0);
    xs.push(1.0);
    for n in 1..=farey_order {
        for m in 1..n {
            if gcd(m, n) == 1 {
                xs.push(m as f64 / n as f64);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// One line of a counting scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub x: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub rho: f64,
    pub count: u64,
    pub ratio: f64,
}

/// A shell `2^{−k}N ≤ n ≤ 2^{−k+1}N` whose count exceeds `2·2^{k(ρ−1)}N^{1−ρ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellViolation {
    pub x: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u32,
    pub count: u64,
    pub bound: f64,
}

/// Empirical fit of `M_ρ(x, N) ≤ C N^{1−ρ}` over a grid of `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingFit {
    pub rho: f64,
    pub n_list: Vec<u64>,
    /// `max_x M_ρ(x, N) / N^{1−ρ}` for each `N`.
    pub per_n_max: Vec<f64>,
    /// A maximizing `x` for each `N`.
    pub argmax: Vec<f64>,
    /// Consecutive quotients of `per_n_max`.
    pub growth: Vec<f64>,
    /// Tolerance on `|growth − 1|`.
    pub stability_tol: f64,
    pub stable: bool,
    /// Empirical supremum of the ratio; not a proven constant.
    pub constant: f64,
    pub shells_checked: u64,
    /// Largest observed shell count over its bound.
    pub worst_shell_ratio: f64,
    pub shell_violations: Vec<ShellViolation>,
    #[serde(skip)]
    pub rows: Vec<CountRow>,
}

pub const STABILITY_TOL: f64 = 0.2;

/// Literal shell bound `2·2^{k(ρ−1)}N^{1−ρ}`.
pub fn shell_bound(n_max: u64, k: u32, rho: f64) -> f64 {
    2.0 * 2f64.powf(k as f64 * (rho - 1.0)) * (n_max as f64).powf(1.0 - rho)
}

/// Shell bound from the spacing `1/(n n′) ≥ 2^{2k−2}/N²` of distinct fractions
/// in the shell: `8·2^{k(ρ−1)}N^{1−ρ} + 1`.
pub fn shell_bound_separated(n_max: u64, k: u32, rho: f64) -> f64 {
    4.0 * shell_bound(n_max, k, rho) + 1.0
}

pub fn fit_counting_constant(n_list: &[u64], rho: f64, x_grid: &[f64]) -> Result<CountingFit> {
    if x_grid.is_empty() {
        return invalid("the x grid is empty");
    }
    if n_list.len() < 2 || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return invalid("N list must be strictly increasing with at least two positive entries");
    }
    for &x in x_grid {
        check_counting_args(x, rho)?;
    }
    let mut rows = Vec::with_capacity(n_list.len() * x_grid.len());
    let mut per_n_max = Vec::with_capacity(n_list.len());
    let mut argmax = Vec::with_capacity(n_list.len());
    let mut shell_violations = Vec::new();
    let mut shells_checked = 0;
    let mut worst_shell_ratio: f64 = 0.0;
    for &n_max in n_list {
        let scale = (n_max as f64).powf(1.0 - rho);
        let (mut best, mut best_x) = (f64::NEG_INFINITY, x_grid[0]);
        for &x in x_grid {
            let count = count_m_rho(x, n_max, rho)?;
            let ratio = count as f64 / scale;
            if ratio > best {
                best = ratio;
                best_x = x;
            }
            rows.push(CountRow { x, n: n_max, rho, count, ratio });
            let mut k = 1u32;
            // shells that still contain some n ≥ 2
            while n_max as f64 / 2f64.powi(k as i32 - 1) >= 2.0 {
                let hi = n_max as f64 / 2f64.powi(k as i32 - 1);
                let lo = hi / 2.0;
                let count = count_in_shell(x, lo, hi, rho);
                let bound = shell_bound(n_max, k, rho);
                shells_checked += 1;
                worst_shell_ratio = worst_shell_ratio.max(count as f64 / bound);
                if count as f64 > bound {
                    shell_violations.push(ShellViolation { x, n: n_max, k, count, bound });
                }
                k += 1;
            }
        }
        per_n_max.push(best);
        argmax.push(best_x);
    }
    let growth: Vec<f64> = per_n_max
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else if w[1] > 0.0 { f64::INFINITY } else { 1.0 })
        .collect();
    let stable = growth.iter().all(|g| (g - 1.0).abs() < STABILITY_TOL);
    let constant = per_n_max.iter().copied().fold(0.0, f64::max);
    Ok(CountingFit {
        rho,
        n_list: n_list.to_vec(),
        per_n_max,
        argmax,
        growth,
        stability_tol: STABILITY_TOL,
        stable,
        constant,
        shells_checked,
        worst_shell_ratio,
        shell_violations,
        rows,
    })
}

/// Counting scan as CSV with columns `x, N, rho, count, ratio`.
pub fn write_counting_csv(rows: &[CountRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return invalid(format!("p = {p} is not prime"));
    }
    Ok(())
}

/// `𝒥_{p,[ℓ]}`: arcs of half-width `pδ(ℓ)/ℓ` around `2πj/ℓ`, `gcd(j, ℓ) = 1`.
///
/// At `ℓ = 1` the single residue `j = 0` is used, matching `J_[1] = I_[1]`.
pub fn jpl_arcs(p: u64, ell: u64, spec: &SAlphaSpec) -> Result<ArcSet> {
    check_prime(p)?;
    if ell == 0 {
        return invalid("ell must be positive");
    }
    if ell % p == 0 {
        return invalid(format!("p = {p} divides ell = {ell}"));
    }
    let step = TAU / ell as f64;
    let half = p as f64 * spec.half_width(ell);
    let set = ArcSet::from_centered(residues(ell, Variant::Coprime).map(|j| step * j as f64), half);
    Ok(set.with_provenance(Provenance {
        construction: format!("J[p={p}, ell={ell}]"),
        spec: Some(*spec),
        tail_bound: None,
    }))
}

/// Exponents `η_1 < … < η_d` splitting the range into disjoint windows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaLadder {
    pub alpha: f64,
    pub etas: Vec<f64>,
}

impl EtaLadder {
    pub fn d(&self) -> usize {
        self.etas.len()
    }

    /// Fixed point `α/(1−α)` of the recurrence.
    pub fn fixed_point(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }

    pub fn ratio(&self) -> f64 {
        2.0 / (1.0 + self.alpha)
    }

    /// `η_{i}` from the closed form, 1-based.
    pub fn closed_form(&self, i: usize) -> f64 {
        let fp = self.fixed_point();
        self.ratio().powi(i as i32 - 1) * (self.etas[0] - fp) + fp
    }

    /// Largest gap between the iterated and closed-form ladders.
    pub fn closed_form_defect(&self) -> f64 {
        (1..=self.d())
            .map(|i| (self.etas[i - 1] - self.closed_form(i)).abs())
            .fold(0.0, f64::max)
    }
}

/// Successor `η' = (2/(1+α))(η − α/2)`.
pub fn eta_next(alpha: f64, eta: f64) -> f64 {
    2.0 / (1.0 + alpha) * (eta - alpha / 2.0)
}

/// Iterate from the midpoint of `(α/(1−α), 1)` until `η_d > 1/α`.
pub fn eta_ladder(alpha: f64) -> Result<EtaLadder> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return invalid(format!("alpha = {alpha} must lie in (0, 1/2)"));
    }
    let mut etas = vec![(alpha / (1.0 - alpha) + 1.0) / 2.0];
    while *etas.last().expect("nonempty") <= 1.0 / alpha {
        let next = eta_next(alpha, *etas.last().expect("nonempty"));
        etas.push(next);
    }
    Ok(EtaLadder { alpha, etas })
}

/// Smallest prime with `p^{η_1} < c0·p`, the default for the threshold `𝒩`.
pub fn corollary_threshold(spec: &SAlphaSpec) -> Result<u64> {
    let ladder = eta_ladder(spec.alpha)?;
    let eta1 = ladder.etas[0];
    // p^{1−η_1} > 1/c0
    let start = (1.0 / spec.c0).powf(1.0 / (1.0 - eta1)).floor().max(2.0) as u64;
    let start = start.saturating_sub(2).max(2);
    Ok(primes_from(start)
        .find(|&p| (p as f64).powf(eta1) < spec.c0 * p as f64)
        .expect("infinitely many primes"))
}

fn primes_from(start: u64) -> impl Iterator<Item = u64> {
    (start..).filter(|&n| is_prime(n))
}

/// Whether `𝒥_{p,[ℓ1]}` and `𝒥_{p,[ℓ2]}` have empty (positive-length) intersection.
pub fn check_pairwise_disjoint(p: u64, ell1: u64, ell2: u64, spec: &SAlphaSpec) -> Result<bool> {
    if ell1 == ell2 {
        return invalid(format!("ell1 = ell2 = {ell1}; the pair must be distinct"));
    }
    let a = jpl_arcs(p, ell1, spec)?;
    let b = jpl_arcs(p, ell2, spec)?;
    Ok(!a.overlaps(&b))
}

/// Exhaustive pairwise check inside one window `[p^{η_i}, p^{η_{i+1}}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowScan {
    pub index: usize,
    pub eta_lo: f64,
    pub eta_hi: f64,
    pub ell_lo: u64,
    pub ell_hi: u64,
    pub pairs_checked: u64,
    pub violations: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessScan {
    pub p: u64,
    pub windows: Vec<WindowScan>,
}

impl DisjointnessScan {
    pub fn pairs_checked(&self) -> u64 {
        self.windows.iter().map(|w| w.pairs_checked).sum()
    }

    pub fn violation_count(&self) -> usize {
        self.windows.iter().map(|w| w.violations.len()).sum()
    }
}

/// Intersect `𝒥_{p,[ℓ1]}, 𝒥_{p,[ℓ2]}` for every admissible pair in every ladder window.
pub fn disjointness_scan(p: u64, spec: &SAlphaSpec, ladder: &EtaLadder) -> Result<DisjointnessScan> {
    check_prime(p)?;
    let mut windows = Vec::with_capacity(ladder.d().saturating_sub(1));
    for (i, pair) in ladder.etas.windows(2).enumerate() {
        let (eta_lo, eta_hi) = (pair[0], pair[1]);
        let ell_lo = ceil_pow(p, eta_lo).max(1);
        let ell_hi = floor_pow(p, eta_hi);
        let sets = (ell_lo..=ell_hi)
            .filter(|ell| ell % p != 0)
            .map(|ell| jpl_arcs(p, ell, spec).map(|s| (ell, s)))
            .collect::<Result<Vec<_>>>()?;
        let mut pairs_checked = 0;
        let mut violations = Vec::new();
        for (a, (ell1, s1)) in sets.iter().enumerate() {
            for (ell2, s2) in &sets[a + 1..] {
                pairs_checked += 1;
                if s1.overlaps(s2) {
                    violations.push((*ell1, *ell2));
                }
            }
        }
        windows.push(WindowScan {
            index: i + 1,
            eta_lo,
            eta_hi,
            ell_lo,
            ell_hi,
            pairs_checked,
            violations,
        });
    }
    Ok(DisjointnessScan { p, windows })
}

/// The first `count` primes with `p^{η_1} ≥ 2`, so every window starts at `ℓ ≥ 2`.
pub fn admissible_primes(ladder: &EtaLadder, count: usize) -> Vec<u64> {
    primes()
        .filter(|&p| (p as f64).powf(ladder.etas[0]) >= 2.0)
        .take(count)
        .collect()
}

/// `σ(j) = p·j mod ℓ`, the permutation of residues induced by `t ↦ pt`.
pub fn residue_permutation(p: u64, ell: u64) -> Result<Vec<u64>> {
    check_prime(p)?;
    if ell == 0 {
        return invalid("ell must be positive");
    }
    if gcd(p, ell) != 1 {
        return invalid(format!("gcd(p = {p}, ell = {ell}) > 1"));
    }
    Ok((0..ell).map(|j| (p % ell) * j % ell).collect())
}

/// Maximum over `t` of how many intervals `2πj/ℓ + p𝓘_ℓ`, `j = 0..ℓ`, contain `t`.
pub fn covering_multiplicity(p: u64, ell: u64, spec: &SAlphaSpec) -> Result<u64> {
    check_prime(p)?;
    if ell == 0 {
        return invalid("ell must be positive");
    }
    let half = p as f64 * spec.half_width(ell);
    if 2.0 * half >= TAU {
        return Ok(ell);
    }
    #[derive(Clone, Copy)]
    struct Event {
        at: f64,
        // -1 closes, +1 opens; closing sorts first so touching open intervals never stack
        delta: i64,
    }
    let step = TAU / ell as f64;
    let mut events = Vec::with_capacity(4 * ell as usize);
    for j in 0..ell {
        let start = (step * j as f64 - half).rem_euclid(TAU);
        let end = start + 2.0 * half;
        if end <= TAU {
            events.push(Event { at: start, delta: 1 });
            events.push(Event { at: end, delta: -1 });
        } else {
            events.push(Event { at: start, delta: 1 });
            events.push(Event { at: TAU, delta: -1 });
            events.push(Event { at: 0.0, delta: 1 });
            events.push(Event { at: end - TAU, delta: -1 });
        }
    }
    events.sort_by(|a, b| a.at.total_cmp(&b.at).then(a.delta.cmp(&b.delta)));
    let (mut depth, mut best) = (0i64, 0i64);
    for e in events {
        depth += e.delta;
        best = best.max(depth);
    }
    Ok(best as u64)
}

/// The covering bound `⌊2pδ(ℓ)⌋ + 2`.
pub fn covering_bound(p: u64, ell: u64, spec: &SAlphaSpec) -> u64 {
    (2.0 * p as f64 * spec.delta(ell)).floor() as u64 + 2
}

/// Sharper count `⌈pδ(ℓ)/π⌉` of lattice points in one open interval.
pub fn covering_exact(p: u64, ell: u64, spec: &SAlphaSpec) -> u64 {
    ((p as f64 * spec.delta(ell) / PI).ceil() as u64).clamp(1, ell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_set::build_component;
    use crate::numeric::totient;
    use proptest::prelude::*;

    fn spec_05() -> SAlphaSpec {
        SAlphaSpec::with_c0(0.5, 0.2, 0.05, 3).unwrap()
    }

    fn brute_count(x: f64, n_max: u64, rho: f64) -> u64 {
        coprime_pairs(n_max)
            .into_iter()
            .filter(|q| approximates(x, q.m, q.n, rho))
            .count() as u64
    }

    #[test]
    fn coprime_pair_examples() {
        assert!(coprime_pairs(1).is_empty());
        let three: Vec<_> = coprime_pairs(3).iter().map(|q| (q.m, q.n)).collect();
        assert_eq!(three, vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(coprime_pairs(5).len(), 9);
        for n in [10u64, 37, 60] {
            let expected: u64 = (2..=n).map(totient).sum();
            assert_eq!(coprime_pairs(n).len() as u64, expected);
        }
    }

    #[test]
    fn counting_examples() {
        for n in [1u64, 5, 100] {
            assert_eq!(count_m_rho(0.0, n, 0.5).unwrap(), 0);
        }
        assert_eq!(count_m_rho(0.5, 3, 0.5).unwrap(), 3);
        assert_eq!(count_m_rho(0.5, 2, 0.9).unwrap(), 1);
        assert!(count_m_rho(1.5, 3, 0.5).is_err());
        assert!(count_m_rho(0.5, 3, 1.0).is_err());
    }

    #[test]
    fn fast_count_matches_enumeration() {
        let grid = adversarial_grid(97, 12);
        for &x in &grid {
            for (n, rho) in [(40u64, 0.5), (64, 0.25), (50, 0.8)] {
                assert_eq!(count_m_rho(x, n, rho).unwrap(), brute_count(x, n, rho), "x = {x}");
            }
        }
    }

    #[test]
    fn grid_contains_farey_points() {
        let g = adversarial_grid(512, 32);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.contains(&(1.0 / 32.0)) && g.contains(&(31.0 / 32.0)) && g.contains(&(5.0 / 17.0)));
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_counting_constant(&[100, 200], 0.5, &[]).is_err());
        assert!(fit_counting_constant(&[100], 0.5, &[0.3]).is_err());
        assert!(fit_counting_constant(&[200, 100], 0.5, &[0.3]).is_err());
    }

    #[test]
    fn fit_on_zero_grid_is_zero() {
        let fit = fit_counting_constant(&[10, 20, 40], 0.5, &[0.0]).unwrap();
        assert_eq!(fit.constant, 0.0);
        assert!(fit.stable);
        assert!(fit.shell_violations.is_empty());
    }

    #[test]
    fn fit_records_rows_and_csv() {
        let fit = fit_counting_constant(&[8, 16], 0.5, &[0.25, 0.5]).unwrap();
        assert_eq!(fit.rows.len(), 4);
        let mut buf = Vec::new();
        write_counting_csv(&fit.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "x,N,rho,count,ratio");
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn shell_counts_partition_total() {
        // the shells [N/2^k, N/2^{k-1}] cover 2..=N; shared endpoints may double count
        for x in [0.1, 0.3141, 0.5, 0.77] {
            let n_max = 256u64;
            let mut total = 0;
            let mut k = 1;
            while n_max as f64 / 2f64.powi(k - 1) >= 2.0 {
                let hi = n_max as f64 / 2f64.powi(k - 1);
                total += count_in_shell(x, hi / 2.0, hi, 0.5);
                k += 1;
            }
            assert!(total >= count_m_rho(x, n_max, 0.5).unwrap());
        }
    }

    #[test]
    fn separated_shell_bound_holds() {
        let grid = adversarial_grid(128, 16);
        for n_max in [100u64, 200, 400] {
            for &x in &grid {
                let mut k = 1u32;
                while n_max as f64 / 2f64.powi(k as i32 - 1) >= 2.0 {
                    let hi = n_max as f64 / 2f64.powi(k as i32 - 1);
                    let count = count_in_shell(x, hi / 2.0, hi, 0.5);
                    assert!(count as f64 <= shell_bound_separated(n_max, k, 0.5), "x={x} N={n_max} k={k}");
                    k += 1;
                }
            }
        }
        // x = 0.01174, N = 100, k = 1 exceeds the literal bound
        let hi = 100.0;
        assert_eq!(count_in_shell(0.01174, hi / 2.0, hi, 0.5), 18);
        assert!(18.0 > shell_bound(100, 1, 0.5));
    }

    #[test]
    fn jpl_examples() {
        let spec = spec_05();
        let two = jpl_arcs(5, 2, &spec).unwrap();
        assert_eq!(two.len(), 1);
        let arc = two.arcs()[0];
        assert!((arc.midpoint() - PI).abs() < 1e-15);
        assert!((arc.half_width() - 5.0 * 0.0125 / 2.0).abs() < 1e-15);

        let four = jpl_arcs(5, 4, &spec).unwrap();
        let mids: Vec<f64> = four.arcs().iter().map(|a| a.midpoint()).collect();
        assert_eq!(mids.len(), 2);
        assert!((mids[0] - PI / 2.0).abs() < 1e-14 && (mids[1] - 1.5 * PI).abs() < 1e-14);

        assert!(jpl_arcs(5, 10, &spec).is_err());
        assert!(jpl_arcs(6, 7, &spec).is_err());
    }

    #[test]
    fn jpl_arcs_are_disjoint_beyond_c0p() {
        let spec = spec_05();
        for p in [5u64, 7, 11, 13, 101] {
            let start = (spec.c0 * p as f64).ceil() as u64;
            for ell in start.max(2)..start + 60 {
                if ell % p == 0 {
                    continue;
                }
                let set = jpl_arcs(p, ell, &spec).unwrap();
                let expected = (1..ell).filter(|&j| gcd(j, ell) == 1).count();
                assert_eq!(set.len(), expected, "p = {p}, ell = {ell}");
            }
        }
    }

    #[test]
    fn jpl_is_dilated_coprime_component() {
        let spec = spec_05();
        for (p, ell) in [(3u64, 4u64), (5, 7), (7, 12), (11, 9)] {
            let dilated = build_component(&spec, ell, Variant::Coprime)
                .unwrap()
                .dilate_mod(p)
                .unwrap();
            assert!(dilated.approx_eq(&jpl_arcs(p, ell, &spec).unwrap(), 1e-12));
        }
    }

    #[test]
    fn dilated_component_matches_permuted_intervals() {
        let spec = spec_05();
        for p in [3u64, 5, 7, 11, 13] {
            for ell in 1..=30 {
                if gcd(p, ell) != 1 {
                    continue;
                }
                let sigma = residue_permutation(p, ell).unwrap();
                let step = TAU / ell as f64;
                let half = p as f64 * spec.half_width(ell);
                let permuted = ArcSet::from_centered(sigma.iter().map(|&s| step * s as f64), half);
                let dilated = build_component(&spec, ell, Variant::Full)
                    .unwrap()
                    .dilate_mod(p)
                    .unwrap();
                assert!(dilated.approx_eq(&permuted, 1e-12), "p = {p}, ell = {ell}");
            }
        }
    }

    #[test]
    fn ladder_examples() {
        let ladder = eta_ladder(0.4).unwrap();
        assert!((ladder.etas[0] - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(ladder.d(), 8);
        assert!((ladder.etas[7] - 2.69).abs() < 0.01);
        assert!(ladder.etas[7] > 2.5 && ladder.etas[6] <= 2.5);
        assert!(ladder.etas.windows(2).all(|w| w[1] > w[0]));
        assert!(eta_ladder(0.5).is_err());
        assert!(eta_ladder(0.0).is_err());
        let short = eta_ladder(1e-3).unwrap();
        assert!((short.ratio() - 2.0).abs() < 1e-2);
    }

    #[test]
    fn ladder_closed_form_agrees() {
        for alpha in [0.1, 0.2, 0.3, 0.4, 0.45] {
            let ladder = eta_ladder(alpha).unwrap();
            assert!(ladder.closed_form_defect() < 1e-12, "alpha = {alpha}");
            let d = ladder.d();
            assert!(ladder.etas[d - 1] > 1.0 / alpha);
            assert!(d == 1 || ladder.etas[d - 2] <= 1.0 / alpha);
        }
    }

    #[test]
    fn pairwise_disjoint_in_window() {
        let spec = SAlphaSpec::new(0.4, 0.2, 1).unwrap();
        let ladder = eta_ladder(0.4).unwrap();
        let p = 7u64;
        let lo = ceil_pow(p, ladder.etas[2]);
        let hi = floor_pow(p, ladder.etas[3]);
        let ells: Vec<u64> = (lo..=hi).filter(|l| l % p != 0).take(6).collect();
        for (i, &a) in ells.iter().enumerate() {
            for &b in &ells[i + 1..] {
                assert!(check_pairwise_disjoint(p, a, b, &spec).unwrap());
            }
        }
        assert!(check_pairwise_disjoint(p, 9, 9, &spec).is_err());
        assert!(check_pairwise_disjoint(p, 14, 9, &spec).is_err());
    }

    #[test]
    fn pairs_far_outside_window_can_collide() {
        // the arc of J[p,1] around 0 then covers the whole circle
        let spec = SAlphaSpec::new(0.4, 0.2, 1).unwrap();
        assert!(101.0 * spec.c0 > PI);
        assert!(!check_pairwise_disjoint(101, 1, 50, &spec).unwrap());
    }

    #[test]
    fn small_scan_has_no_violations() {
        let spec = SAlphaSpec::new(0.4, 0.2, 1).unwrap();
        let ladder = eta_ladder(0.4).unwrap();
        let scan = disjointness_scan(5, &spec, &ladder).unwrap();
        assert_eq!(scan.windows.len(), ladder.d() - 1);
        assert!(scan.pairs_checked() > 0);
        assert_eq!(scan.violation_count(), 0);
    }

    #[test]
    fn admissible_primes_for_alpha_04() {
        let ladder = eta_ladder(0.4).unwrap();
        assert_eq!(admissible_primes(&ladder, 5), vec![3, 5, 7, 11, 13]);
    }

    #[test]
    fn threshold_satisfies_property_one() {
        let spec = SAlphaSpec::new(0.3, 0.2, 1).unwrap();
        let eta1 = eta_ladder(0.3).unwrap().etas[0];
        let t = corollary_threshold(&spec).unwrap();
        assert!(is_prime(t));
        assert!((t as f64).powf(eta1) < spec.c0 * t as f64);
        let before = (2..t).rev().find(|&q| is_prime(q)).unwrap();
        assert!((before as f64).powf(eta1) >= spec.c0 * before as f64);
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(residue_permutation(3, 4).unwrap(), vec![0, 3, 2, 1]);
        assert_eq!(residue_permutation(7, 1).unwrap(), vec![0]);
        assert_eq!(residue_permutation(7, 6).unwrap(), (0..6).collect::<Vec<_>>());
        assert!(residue_permutation(3, 6).is_err());
    }

    #[test]
    fn covering_examples() {
        let spec = spec_05();
        assert_eq!(covering_multiplicity(5, 7, &spec).unwrap(), 1);
        assert!(covering_bound(5, 7, &spec) >= 2);
        assert_eq!(covering_multiplicity(5, 1, &spec).unwrap(), 1);
    }

    #[test]
    fn covering_matches_lattice_count() {
        // large p so the intervals overlap at small ell
        for alpha in [0.3, 0.9] {
            let spec = SAlphaSpec::new(alpha, 0.24, 1).unwrap();
            for p in [5u64, 53, 211, 977, 4999] {
                for ell in 1..=40 {
                    let m = covering_multiplicity(p, ell, &spec).unwrap();
                    assert_eq!(m, covering_exact(p, ell, &spec), "p = {p}, ell = {ell}");
                    assert!(m <= covering_bound(p, ell, &spec));
                }
            }
            if alpha > 0.5 {
                assert!(covering_multiplicity(4999, 10, &spec).unwrap() > 1);
            }
        }
    }

    proptest! {
        #[test]
        fn count_monotone(x in 0.0f64..=1.0, n in 2u64..200, rho in 0.05f64..0.95, dr in 0.0f64..0.5) {
            let base = count_m_rho(x, n, rho).unwrap();
            prop_assert!(count_m_rho(x, n + 17, rho).unwrap() >= base);
            let rho2 = (rho + dr).min(0.99);
            prop_assert!(count_m_rho(x, n, rho2).unwrap() <= base);
        }

        #[test]
        fn permutation_is_bijection(pi in 0usize..10, ell in 1u64..300) {
            let p = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29][pi];
            prop_assume!(gcd(p, ell) == 1);
            let mut sigma = residue_permutation(p, ell).unwrap();
            prop_assert_eq!(sigma[0], 0);
            sigma.sort_unstable();
            prop_assert_eq!(sigma, (0..ell).collect::<Vec<_>>());
        }
    }
}
