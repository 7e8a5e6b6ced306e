//! Trigonometric polynomials with integer frequencies, and closed-form
//! integration of `|Q|²` against indicators of arc sets.
//!
//! All integrals are taken against the Haar probability measure
//! `dμ = dt / 2π`, so `{e^{ikt}}` is orthonormal on the full circle.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle_set::{Arc, ArcSet};
use crate::error::{invalid, Result};
use crate::numeric::gcd;

/// Largest admissible frequency magnitude.
pub const FREQ_CAP: i64 = 1 << 46;

/// Steps between exact re-seeding of the phase recurrences.
const RESEED: usize = 64;

pub(crate) fn check_freq(k: i64) -> Result<()> {
    if k.unsigned_abs() > FREQ_CAP as u64 {
        return invalid(format!("frequency {k} exceeds the cap 2^46"));
    }
    Ok(())
}

/// A finitely supported map `frequency -> coefficient`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigPoly {
    terms: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    /// Collect terms, summing repeated frequencies and dropping zeros.
    pub fn new(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (k, a) in terms {
            check_freq(k)?;
            if !(a.re.is_finite() && a.im.is_finite()) {
                return invalid(format!("non-finite coefficient at frequency {k}"));
            }
            *map.entry(k).or_default() += a;
        }
        map.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        Ok(TrigPoly { terms: map })
    }

    /// `P_N(t) = N^{-1/2} Σ_{k=1}^{N} e^{ikt}`.
    pub fn dirichlet(n: u64) -> Result<Self> {
        if n == 0 {
            return invalid("dirichlet polynomial needs N >= 1");
        }
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Self::new((1..=n as i64).map(|k| (k, a)))
    }

    /// `Q(p·)`: frequency `k` moves to `p·k`.
    pub fn dilate(&self, p: u64) -> Result<Self> {
        if p == 0 {
            return invalid("dilation factor must be positive");
        }
        let p = p as i64;
        let mut terms = BTreeMap::new();
        for (&k, &a) in &self.terms {
            let pk = k
                .checked_mul(p)
                .filter(|v| v.unsigned_abs() <= FREQ_CAP as u64)
                .ok_or_else(|| {
                    crate::Error::InvalidInput(format!("dilated frequency {k}*{p} exceeds 2^46"))
                })?;
            terms.insert(pk, a);
        }
        Ok(TrigPoly { terms })
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.terms.iter().map(|(&k, &a)| (k, a))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.terms.get(&k).copied().unwrap_or_default()
    }

    /// `Σ |a_k|²`.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// `Σ |a_k|`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|a| a.norm()).sum()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&k, &a)| a * Complex64::from_polar(1.0, k as f64 * t))
            .sum()
    }

    /// Scale to unit coefficient norm. Fails on the zero polynomial.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if n == 0.0 {
            return invalid("cannot normalize the zero polynomial");
        }
        Ok(TrigPoly {
            terms: self.terms.iter().map(|(&k, &a)| (k, a / n)).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TrigPolyFile {
    terms: Vec<(i64, f64, f64)>,
}

impl TrigPoly {
    pub fn to_json(&self) -> String {
        let file = TrigPolyFile {
            terms: self.terms().map(|(k, a)| (k, a.re, a.im)).collect(),
        };
        serde_json::to_string(&file).expect("trig poly serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TrigPolyFile = serde_json::from_str(text)?;
        Self::new(file.terms.into_iter().map(|(k, re, im)| (k, Complex64::new(re, im))))
    }
}

/// Contribution of one arc to `∫ 1_A e^{-int} dμ`.
#[inline]
fn arc_coeff(arc: &Arc, n: i64) -> Complex64 {
    if n == 0 {
        return Complex64::new(arc.length() / TAU, 0.0);
    }
    let nf = n as f64;
    let (s, c) = (nf * arc.midpoint()).sin_cos();
    let amp = (nf * arc.half_width()).sin() / (PI * nf);
    Complex64::new(c * amp, -s * amp)
}

/// `f̂_A(n) = ∫ 1_A(t) e^{-int} dμ(t)`, summed arc by arc in closed form.
pub fn fourier_coeff_indicator(set: &ArcSet, n: i64) -> Complex64 {
    set.arcs().iter().map(|a| arc_coeff(a, n)).sum()
}

/// `f̂_A(step·k)` for `k = k0..k1`, by per-arc phase recurrences
/// re-seeded every few steps from exact `sin_cos`.
pub fn fourier_coeffs_progression(set: &ArcSet, step: i64, k0: usize, k1: usize) -> Vec<Complex64> {
    let count = k1.saturating_sub(k0);
    let mut acc = vec![Complex64::new(0.0, 0.0); count];
    if count == 0 {
        return acc;
    }
    let sf = step as f64;
    for arc in set.arcs() {
        let (mid, half) = (arc.midpoint(), arc.half_width());
        let w = Complex64::from_polar(1.0, -sf * mid);
        let v = Complex64::from_polar(1.0, sf * half);
        let mut idx = 0;
        while idx < count {
            let k = (k0 + idx) as f64;
            let mut z = Complex64::from_polar(1.0, -k * sf * mid);
            let mut u = Complex64::from_polar(1.0, k * sf * half);
            let stop = (idx + RESEED).min(count);
            for slot in &mut acc[idx..stop] {
                *slot += z * u.im;
                z *= w;
                u *= v;
            }
            idx = stop;
        }
    }
    for (idx, slot) in acc.iter_mut().enumerate() {
        let n = (k0 + idx) as i64 * step;
        if n == 0 {
            *slot = Complex64::new(set.mu(), 0.0);
        } else {
            *slot /= PI * n as f64;
        }
    }
    acc
}

/// Cached indicator coefficients over the differences a computation needs.
///
/// Dense over a progression `step·k, k = 0..len` when that is cheap, with a
/// sparse map for anything else. Negative frequencies use `f̂(-n) = conj f̂(n)`.
#[derive(Clone, Debug)]
pub struct IndicatorSpectrum {
    step: i64,
    dense: Vec<Complex64>,
    sparse: HashMap<i64, Complex64>,
}

impl IndicatorSpectrum {
    /// Dense table over `step·k` for `k < len`.
    pub fn progression(set: &ArcSet, step: i64, len: usize) -> Self {
        assert!(step > 0, "progression step must be positive");
        IndicatorSpectrum {
            step,
            dense: fourier_coeffs_progression(set, step, 0, len),
            sparse: HashMap::new(),
        }
    }

    /// Table covering every pairwise difference of `freqs`.
    pub fn for_frequencies(set: &ArcSet, freqs: &[i64]) -> Self {
        let Some(&base) = freqs.iter().min() else {
            return Self::progression(set, 1, 1);
        };
        let top = *freqs.iter().max().expect("nonempty");
        let step = freqs
            .iter()
            .fold(0u64, |g, &f| gcd(g, (f - base).unsigned_abs()))
            .max(1) as i64;
        let len = ((top - base) / step) as usize + 1;
        let pairs = freqs.len() * (freqs.len() - 1) / 2 + 1;
        if len <= 4 * pairs + 4096 {
            return Self::progression(set, step, len);
        }
        let mut sparse = HashMap::new();
        sparse.insert(0, Complex64::new(set.mu(), 0.0));
        for (i, &a) in freqs.iter().enumerate() {
            for &b in &freqs[i + 1..] {
                let d = (a - b).abs();
                sparse.entry(d).or_insert_with(|| fourier_coeff_indicator(set, d));
            }
        }
        IndicatorSpectrum {
            step: 1,
            dense: Vec::new(),
            sparse,
        }
    }

    /// Extend the dense table to `len` entries.
    pub fn extend_dense(&mut self, set: &ArcSet, len: usize) {
        if len > self.dense.len() {
            let extra = fourier_coeffs_progression(set, self.step, self.dense.len(), len);
            self.dense.extend(extra);
        }
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn dense_len(&self) -> usize {
        self.dense.len()
    }

    pub fn try_get(&self, n: i64) -> Option<Complex64> {
        let m = n.abs();
        let value = if m % self.step == 0 && ((m / self.step) as usize) < self.dense.len() {
            Some(self.dense[(m / self.step) as usize])
        } else {
            self.sparse.get(&m).copied()
        };
        value.map(|v| if n < 0 { v.conj() } else { v })
    }

    pub fn get(&self, n: i64) -> Complex64 {
        self.try_get(n)
            .unwrap_or_else(|| panic!("frequency {n} is outside the cached spectrum"))
    }
}

/// `∫_A |Q|² dμ = Σ_{k,k'} a_k conj(a_{k'}) f̂_A(k' - k)`, exactly in closed form.
pub fn energy(q: &TrigPoly, set: &ArcSet) -> f64 {
    let freqs: Vec<i64> = q.terms().map(|(k, _)| k).collect();
    let spectrum = IndicatorSpectrum::for_frequencies(set, &freqs);
    energy_with(q, &spectrum)
}

/// [`energy`] against a precomputed spectrum of the set.
pub fn energy_with(q: &TrigPoly, spectrum: &IndicatorSpectrum) -> f64 {
    let terms: Vec<(i64, Complex64)> = q.terms().collect();
    let mut total = 0.0;
    for (i, &(k, a)) in terms.iter().enumerate() {
        total += a.norm_sqr() * spectrum.get(0).re;
        let mut row = Complex64::new(0.0, 0.0);
        for &(kp, b) in &terms[i + 1..] {
            row += b.conj() * spectrum.get(kp - k);
        }
        // pair (k, k') and (k', k) are complex conjugates
        total += 2.0 * (a * row).re;
    }
    total.max(0.0)
}
