//! Optimal Riesz bounds of finite exponential systems over arc sets.
//!
//! For a finite `Λ ⊂ Z` and a set `S`, the best constants in
//! `A Σ|a|² ≤ ∫_S |Σ a_λ e^{iλt}|² dμ ≤ B Σ|a|²` are the extremal
//! eigenvalues of the Gram matrix `G_jk = f̂_S(λ_j − λ_k)`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circle_set::{build_component, build_s_alpha, sig17, ArcSet, SAlphaSpec, Variant};
use crate::error::{invalid, Error, Result};
use crate::numeric::ceil_pow;
use crate::trig_poly::{check_freq, energy_with, IndicatorSpectrum, TrigPoly};

pub const DEFAULT_GRAM_CAP: usize = 4096;

/// Largest tolerated `|G_jk − conj(G_kj)|` before a matrix is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Strictly increasing, nonempty list of integer frequencies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct FrequencySet(Vec<i64>);

impl TryFrom<Vec<i64>> for FrequencySet {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        FrequencySet::new(v)
    }
}

impl From<FrequencySet> for Vec<i64> {
    fn from(f: FrequencySet) -> Self {
        f.0
    }
}

impl FrequencySet {
    /// Sorts the input; duplicates and an empty list are rejected.
    pub fn new(mut freqs: Vec<i64>) -> Result<Self> {
        if freqs.is_empty() {
            return invalid("frequency set must be nonempty");
        }
        freqs.sort_unstable();
        if freqs.windows(2).any(|w| w[0] == w[1]) {
            return invalid("frequencies must be distinct");
        }
        for &k in &freqs {
            check_freq(k)?;
        }
        Ok(FrequencySet(freqs))
    }

    /// `{M + ℓ, M + 2ℓ, …, M + Nℓ}`.
    pub fn progression(offset: i64, step: u64, count: u64) -> Result<Self> {
        if step == 0 || count == 0 {
            return invalid("progression needs step >= 1 and length >= 1");
        }
        let step = step as i64;
        Self::new((1..=count as i64).map(|k| offset + k * step).collect())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> i64 {
        self.0[0]
    }

    pub fn max(&self) -> i64 {
        self.0[self.0.len() - 1]
    }

    pub fn translate(&self, m: i64) -> Result<Self> {
        let shifted: Vec<i64> = self.0.iter().map(|&k| k + m).collect();
        for &k in &shifted {
            check_freq(k)?;
        }
        Ok(FrequencySet(shifted))
    }

    pub fn is_disjoint(&self, other: &FrequencySet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    /// Union of two disjoint sets; `None` on a collision.
    pub fn disjoint_union(&self, other: &FrequencySet) -> Option<Self> {
        if !self.is_disjoint(other) {
            return None;
        }
        let mut all = Vec::with_capacity(self.len() + other.len());
        all.extend_from_slice(&self.0);
        all.extend_from_slice(&other.0);
        all.sort_unstable();
        Some(FrequencySet(all))
    }
}

/// Hermitian Gram matrix of `E(Λ)` in `L²(S, μ)`.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    freqs: Option<FrequencySet>,
    entries: DMatrix<Complex64>,
}

impl GramMatrix {
    /// Wrap raw entries (e.g. re-imported from CSV); no source frequencies.
    pub fn from_entries(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return invalid("gram matrix must be square and nonempty");
        }
        Ok(GramMatrix {
            freqs: None,
            entries,
        })
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn frequencies(&self) -> Option<&FrequencySet> {
        self.freqs.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Diagonal value, which is `mu(S)` for an assembled matrix.
    pub fn mu(&self) -> f64 {
        self.entries[(0, 0)].re
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in j..n {
                worst = worst.max((self.entries[(j, k)] - self.entries[(k, j)].conj()).norm());
            }
        }
        worst
    }

    /// `a* G a`.
    pub fn quadratic_form(&self, a: &DVector<Complex64>) -> f64 {
        (a.adjoint() * &self.entries * a)[(0, 0)].re
    }

    /// Row-major CSV; each row holds `re,im` pairs for its cells.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for row in self.entries.row_iter() {
            let mut record = Vec::with_capacity(2 * row.len());
            for z in row.iter() {
                record.push(sig17(z.re));
                record.push(sig17(z.im));
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        for record in r.records() {
            let record = record?;
            if record.len() % 2 != 0 {
                return invalid("gram CSV rows need an even number of fields");
            }
            let mut row = Vec::with_capacity(record.len() / 2);
            for pair in record.iter().collect::<Vec<_>>().chunks(2) {
                let parse = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidInput(format!("bad gram CSV cell {s:?}: {e}")))
                };
                row.push(Complex64::new(parse(pair[0])?, parse(pair[1])?));
            }
            rows.push(row);
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("gram CSV is not square");
        }
        Self::from_entries(DMatrix::from_fn(n, n, |j, k| rows[j][k]))
    }
}

/// Gram matrix with the default dimension cap.
pub fn gram(freqs: &FrequencySet, set: &ArcSet) -> Result<GramMatrix> {
    gram_capped(freqs, set, DEFAULT_GRAM_CAP)
}

pub fn gram_capped(freqs: &FrequencySet, set: &ArcSet, cap: usize) -> Result<GramMatrix> {
    check_dim(freqs.len(), cap)?;
    let spectrum = IndicatorSpectrum::for_frequencies(set, freqs.as_slice());
    Ok(gram_from_spectrum(freqs, &spectrum))
}

pub(crate) fn check_dim(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        return Err(Error::ResourceLimit {
            what: "gram dimension",
            requested: dim as u64,
            cap: cap as u64,
        });
    }
    Ok(())
}

/// Assemble `G_jk = f̂_S(λ_j − λ_k)` from cached coefficients.
pub fn gram_from_spectrum(freqs: &FrequencySet, spectrum: &IndicatorSpectrum) -> GramMatrix {
    let f = freqs.as_slice();
    let n = f.len();
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        entries[(j, j)] = spectrum.get(0);
        for k in 0..j {
            let v = spectrum.get(f[j] - f[k]);
            entries[(j, k)] = v;
            entries[(k, j)] = v.conj();
        }
    }
    GramMatrix {
        freqs: Some(freqs.clone()),
        entries,
    }
}

fn check_hermitian(g: &GramMatrix) -> Result<()> {
    let defect = g.hermitian_defect();
    if !(defect <= HERMITIAN_TOL) {
        return invalid(format!("matrix is not Hermitian (defect {defect:e})"));
    }
    Ok(())
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn extremal_eigs(g: &GramMatrix) -> Result<(f64, f64)> {
    check_hermitian(g)?;
    let eig = g.entries.clone().symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Eigenvalues in ascending order with matching unit eigenvectors (columns).
pub fn eigen_decomposition(g: &GramMatrix) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    check_hermitian(g)?;
    let eig = SymmetricEigen::new(g.entries.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(g.dim(), g.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Rayleigh quotient `a* G a / a* a`.
pub fn rayleigh(g: &GramMatrix, a: &DVector<Complex64>) -> f64 {
    g.quadratic_form(a) / a.norm_squared()
}

/// Complex Gaussian vector scaled to unit norm.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Minimum Rayleigh quotient over `samples` seeded random unit vectors.
pub fn rayleigh_oracle_min(g: &GramMatrix, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| rayleigh(g, &random_unit_vector(&mut rng, g.dim())))
        .fold(f64::INFINITY, f64::min)
}

/// Optimal lower and upper Riesz bounds of a finite system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszBounds {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub dim: usize,
    #[serde(rename = "mu_S")]
    pub mu_s: f64,
}

impl RieszBounds {
    /// Bounds report JSON: `{ "A", "B", "dim", "mu_S", "seed" }`.
    pub fn to_report_json(&self, seed: u64) -> String {
        serde_json::json!({
            "A": self.lower,
            "B": self.upper,
            "dim": self.dim,
            "mu_S": self.mu_s,
            "seed": seed,
        })
        .to_string()
    }
}

pub fn bounds_of(g: &GramMatrix) -> Result<RieszBounds> {
    let (lower, upper) = extremal_eigs(g)?;
    Ok(RieszBounds {
        lower,
        upper,
        dim: g.dim(),
        mu_s: g.mu(),
    })
}

pub fn riesz_bounds(freqs: &FrequencySet, set: &ArcSet) -> Result<RieszBounds> {
    riesz_bounds_capped(freqs, set, DEFAULT_GRAM_CAP)
}

pub fn riesz_bounds_capped(freqs: &FrequencySet, set: &ArcSet, cap: usize) -> Result<RieszBounds> {
    if !(set.mu() > 0.0) {
        return invalid("Riesz bounds need a set of positive measure");
    }
    bounds_of(&gram_capped(freqs, set, cap)?)
}

/// Energy of the uniform progression witness on a truncated `S_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Witness {
    pub ell: u64,
    pub n: u64,
    /// `∫_{S_α} |P_N(ℓt)|² dμ`.
    pub energy: f64,
    /// `∫_{T \ I_[ℓ]} |P_N(ℓt)|² dμ`, which dominates `energy`.
    pub outer_energy: f64,
    /// `π / (δ(ℓ) N)`.
    pub bound: f64,
}

/// Progression step used by the witness: `max(1, ⌈N^β⌉)`.
pub fn witness_step(beta: f64, n: u64) -> u64 {
    ceil_pow(n, beta).max(1)
}

pub fn lemma1_witness_energy(spec: &SAlphaSpec, beta: f64, n: u64) -> Result<Lemma1Witness> {
    let s = build_s_alpha(spec)?;
    lemma1_witness_energy_on(spec, &s, beta, n, DEFAULT_GRAM_CAP)
}

/// As [`lemma1_witness_energy`] against a prebuilt truncated `S_α`.
pub fn lemma1_witness_energy_on(
    spec: &SAlphaSpec,
    s_alpha: &ArcSet,
    beta: f64,
    n: u64,
    cap: usize,
) -> Result<Lemma1Witness> {
    if !(beta >= 0.0 && beta < spec.alpha) {
        return invalid(format!("beta = {beta} must lie in [0, alpha = {})", spec.alpha));
    }
    if n == 0 {
        return invalid("witness length N must be positive");
    }
    check_dim(n as usize, cap)?;
    let ell = witness_step(beta, n);
    if ell > spec.trunc_level {
        return invalid(format!(
            "step ell = {ell} exceeds the truncation level L = {}; I[ell] is not removed",
            spec.trunc_level
        ));
    }
    let poly = TrigPoly::dirichlet(n)?.dilate(ell)?;
    let spectrum = IndicatorSpectrum::progression(s_alpha, ell as i64, n as usize);
    let energy = energy_with(&poly, &spectrum);
    let outer = build_component(spec, ell, Variant::Full)?.complement();
    let outer_spectrum = IndicatorSpectrum::progression(&outer, ell as i64, n as usize);
    Ok(Lemma1Witness {
        ell,
        n,
        energy,
        outer_energy: energy_with(&poly, &outer_spectrum),
        bound: PI / (spec.delta(ell) * n as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig_poly::energy;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::TAU;

    fn half_circle() -> ArcSet {
        ArcSet::normalize(&[(0.0, PI)]).unwrap()
    }

    /// Eigenvalues through the real symmetric embedding [[X, -Y], [Y, X]].
    fn embedded_eigs(g: &GramMatrix) -> (f64, f64) {
        let n = g.dim();
        let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let z = g.entries()[(r % n, c % n)];
            match (r < n, c < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let eig = m.symmetric_eigenvalues();
        (eig.min(), eig.max())
    }

    #[test]
    fn progression_examples() {
        assert_eq!(FrequencySet::progression(0, 5, 3).unwrap().as_slice(), &[5, 10, 15]);
        let b5 = FrequencySet::progression(0, 5, 25).unwrap();
        assert_eq!(b5.len(), 25);
        assert_eq!(b5.max(), 125);
        assert_eq!(FrequencySet::progression(7, 1, 2).unwrap().as_slice(), &[8, 9]);
        assert!(FrequencySet::new(vec![1, 1]).is_err());
        assert!(FrequencySet::new(vec![]).is_err());
    }

    #[test]
    fn gram_examples() {
        let full = ArcSet::full();
        let g = gram(&FrequencySet::new(vec![-4, 0, 3, 11]).unwrap(), &full).unwrap();
        assert!((g.entries() - DMatrix::<Complex64>::identity(4, 4)).norm() < 1e-15);

        let g = gram(&FrequencySet::new(vec![0, 2]).unwrap(), &half_circle()).unwrap();
        assert_abs_diff_eq!(g.entries()[(0, 0)].re, 0.5, epsilon = 1e-16);
        assert!(g.entries()[(0, 1)].norm() < 1e-16);

        let g = gram(&FrequencySet::new(vec![0, 1]).unwrap(), &half_circle()).unwrap();
        assert_abs_diff_eq!(g.entries()[(1, 1)].re, 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(g.entries()[(0, 1)].norm(), 1.0 / PI, epsilon = 1e-16);
    }

    #[test]
    fn gram_rejects_oversized() {
        let f = FrequencySet::progression(0, 1, 10).unwrap();
        assert!(matches!(
            gram_capped(&f, &ArcSet::full(), 9),
            Err(Error::ResourceLimit { cap: 9, .. })
        ));
    }

    #[test]
    fn eig_examples() {
        let id = GramMatrix::from_entries(DMatrix::identity(5, 5)).unwrap();
        assert_eq!(extremal_eigs(&id).unwrap(), (1.0, 1.0));
        let half = GramMatrix::from_entries(DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(extremal_eigs(&half).unwrap(), (0.5, 0.5));

        let g = gram(&FrequencySet::new(vec![0, 1]).unwrap(), &half_circle()).unwrap();
        let (lo, hi) = extremal_eigs(&g).unwrap();
        assert_abs_diff_eq!(lo, 0.5 - 1.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 0.5 + 1.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(0.0, 1e-6);
        let g = GramMatrix::from_entries(m).unwrap();
        assert!(matches!(extremal_eigs(&g), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bounds_examples() {
        let f = FrequencySet::new(vec![-3, 1, 2, 9, 40]).unwrap();
        let b = riesz_bounds(&f, &ArcSet::full()).unwrap();
        assert_abs_diff_eq!(b.lower, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.upper, 1.0, epsilon = 1e-14);

        for k in [1i64, 3, 10] {
            let even = FrequencySet::new((-k..=k).map(|i| 2 * i).collect()).unwrap();
            let b = riesz_bounds(&even, &half_circle()).unwrap();
            assert_abs_diff_eq!(b.lower, 0.5, epsilon = 1e-13);
            assert_abs_diff_eq!(b.upper, 0.5, epsilon = 1e-13);
        }
        assert!(riesz_bounds(&f, &ArcSet::empty()).is_err());
    }

    #[test]
    fn solver_agrees_with_real_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let raw: Vec<(f64, f64)> = (0..4)
                .map(|_| {
                    let s = rng.random_range(0.0..TAU);
                    (s, s + rng.random_range(0.05..1.0))
                })
                .collect();
            let set = ArcSet::normalize(&raw).unwrap();
            let f = FrequencySet::new((0..20).map(|_| rng.random_range(-100..100)).collect::<std::collections::BTreeSet<_>>().into_iter().collect()).unwrap();
            let g = gram(&f, &set).unwrap();
            let (lo, hi) = extremal_eigs(&g).unwrap();
            let (elo, ehi) = embedded_eigs(&g);
            assert!((lo - elo).abs() < 1e-12 && (hi - ehi).abs() < 1e-12);
            assert!(lo <= set.mu() + 1e-12 && set.mu() <= hi + 1e-12);
        }
    }

    #[test]
    fn rayleigh_examples() {
        let half = GramMatrix::from_entries(DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)).unwrap();
        let e0 = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(rayleigh(&half, &e0), 0.5);

        let spec = SAlphaSpec::new(0.5, 0.2, 60).unwrap();
        let s = build_s_alpha(&spec).unwrap();
        let g = gram(&FrequencySet::progression(0, 3, 9).unwrap(), &s).unwrap();
        let (vals, vecs) = eigen_decomposition(&g).unwrap();
        let v0 = vecs.column(0).into_owned();
        assert!((rayleigh(&g, &v0) - vals[0]).abs() < 1e-8);
        let (lo, _) = extremal_eigs(&g).unwrap();
        assert!(rayleigh_oracle_min(&g, 1000, 0) >= lo - 1e-9);
    }

    #[test]
    fn quadratic_form_equals_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let raw: Vec<(f64, f64)> = (0..3)
                .map(|_| {
                    let s = rng.random_range(0.0..TAU);
                    (s, s + rng.random_range(0.05..2.0))
                })
                .collect();
            let set = ArcSet::normalize(&raw).unwrap();
            let freqs: std::collections::BTreeSet<i64> = (0..12).map(|_| rng.random_range(-60..60)).collect();
            let f = FrequencySet::new(freqs.into_iter().collect()).unwrap();
            let a = random_unit_vector(&mut rng, f.len());
            let q = TrigPoly::new(f.as_slice().iter().zip(a.iter()).map(|(&k, &c)| (k, c))).unwrap();
            let g = gram(&f, &set).unwrap();
            assert!((g.quadratic_form(&a) - energy(&q, &set)).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_round_trip_preserves_eigenvalues() {
        let g = gram(&FrequencySet::new(vec![0, 1, 5, 6]).unwrap(), &half_circle()).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = GramMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.entries(), g.entries());
        let (a, b) = (extremal_eigs(&g).unwrap(), extremal_eigs(&back).unwrap());
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }

    #[test]
    fn bounds_report_fields() {
        let b = riesz_bounds(&FrequencySet::new(vec![0, 1]).unwrap(), &half_circle()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&b.to_report_json(7)).unwrap();
        for key in ["A", "B", "dim", "mu_S", "seed"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["seed"], 7);
    }

    #[test]
    fn witness_with_beta_zero_uses_first_component() {
        let spec = SAlphaSpec::new(0.5, 0.2, 30).unwrap();
        let w = lemma1_witness_energy(&spec, 0.0, 50).unwrap();
        assert_eq!(w.ell, 1);
        assert!(w.energy <= w.outer_energy + 1e-12);
    }

    #[test]
    fn witness_decreases_with_n() {
        let spec = SAlphaSpec::new(0.5, 0.2, 64).unwrap();
        let s = build_s_alpha(&spec).unwrap();
        let at = |n| lemma1_witness_energy_on(&spec, &s, 0.25, n, DEFAULT_GRAM_CAP).unwrap();
        let (w16, w256) = (at(16), at(256));
        assert_eq!((w16.ell, w256.ell), (2, 4));
        assert!(w256.energy < w16.energy);
        assert!(w256.energy <= w256.outer_energy);
    }

    #[test]
    fn witness_errors() {
        let spec = SAlphaSpec::new(0.5, 0.2, 3).unwrap();
        assert!(lemma1_witness_energy(&spec, 0.5, 16).is_err());
        // ℓ = ⌈4096^{1/4}⌉ = 8 > L = 3
        assert!(lemma1_witness_energy(&spec, 0.25, 4096).is_err());
        let s = build_s_alpha(&spec).unwrap();
        assert!(matches!(
            lemma1_witness_energy_on(&spec, &s, 0.0, 5000, DEFAULT_GRAM_CAP),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
