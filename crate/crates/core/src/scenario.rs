//! Reproducible numeric checks, one per statement of the construction, with
//! JSON reports.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::block_union::{assemble_lambda_with, BlockSchedule, SearchMode};
use crate::circle_set::{build_component, build_s_alpha, ArcSet, SAlphaSpec, Variant};
use crate::diophantine::{
    adversarial_grid, admissible_primes, corollary_threshold, covering_exact, disjointness_scan,
    eta_ladder, fit_counting_constant, shell_bound_separated, CountingFit,
};
use crate::error::{invalid, Result};
use crate::multiplicity::{
    comb_with_notches, lattice_riesz_check_capped, theorem4_check_capped, Notch, Theorem4Report,
};
use crate::numeric::{floor_pow, is_prime};
use crate::riesz::{
    bounds_of, gram_capped, lemma1_witness_energy_on, random_unit_vector, rayleigh_oracle_min,
    FrequencySet, Lemma1Witness,
};
use crate::trig_poly::{energy_with, IndicatorSpectrum, TrigPoly};

pub const SCHEMA_VERSION: u32 = 1;

pub const SCENARIOS: [&str; 10] = [
    "lemma1",
    "lemma4",
    "lemma5",
    "lemma6",
    "lemma7",
    "lemma8",
    "corollary-pdivides",
    "theorem4",
    "lemma9",
    "uniting-blocks",
];

/// Samples drawn by the random-vector Rayleigh oracle.
pub const ORACLE_SAMPLES: usize = 1000;
/// Slack of the Rayleigh oracle against the eigensolver.
pub const ORACLE_SLACK: f64 = 1e-9;
/// Residual allowed in the closed-form equalities.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Random coefficient vectors used where a scenario samples `Q`.
pub const RANDOM_VECTORS: usize = 20;

/// User-facing parameters; `None` selects the scenario's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub beta: Option<f64>,
    pub prime: Option<u64>,
    pub trunc_level: Option<u64>,
    pub seed: u64,
    pub gram_cap: usize,
    pub m_max: Option<i64>,
    pub rho: Option<f64>,
    pub stride: Option<u64>,
}

impl Params {
    pub fn new(seed: u64, gram_cap: usize) -> Self {
        Params {
            seed,
            gram_cap,
            ..Params::default()
        }
    }
}

/// One numeric claim and the tolerance it was checked against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// Right-hand side of `relation`.
    pub bound: f64,
    pub relation: String,
    pub tolerance: f64,
    /// Informational checks are reported but do not decide the outcome.
    pub gating: bool,
}

impl Check {
    fn make(name: &str, value: f64, bound: f64, relation: &str, tolerance: f64, passed: bool) -> Self {
        Check {
            name: name.to_string(),
            passed,
            value,
            bound,
            relation: relation.to_string(),
            tolerance,
            gating: true,
        }
    }

    /// `value ≤ bound + tol`.
    pub fn le(name: &str, value: f64, bound: f64, tol: f64) -> Self {
        Self::make(name, value, bound, "<=", tol, value <= bound + tol)
    }

    /// `value < bound`.
    pub fn lt(name: &str, value: f64, bound: f64) -> Self {
        Self::make(name, value, bound, "<", 0.0, value < bound)
    }

    /// `value ≥ bound − tol`.
    pub fn ge(name: &str, value: f64, bound: f64, tol: f64) -> Self {
        Self::make(name, value, bound, ">=", tol, value >= bound - tol)
    }

    /// `value > bound`.
    pub fn gt(name: &str, value: f64, bound: f64) -> Self {
        Self::make(name, value, bound, ">", 0.0, value > bound)
    }

    /// `|value − expected| ≤ tol`.
    pub fn eq(name: &str, value: f64, expected: f64, tol: f64) -> Self {
        Self::make(name, value, expected, "==", tol, (value - expected).abs() <= tol)
    }

    /// A yes/no property, reported as `1` or `0` against `1`.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self::make(name, if ok { 1.0 } else { 0.0 }, 1.0, "==", 0.0, ok)
    }

    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema: u32,
    pub scenario: String,
    /// Every parameter actually used, defaults included.
    pub params: Map<String, Value>,
    pub checks: Vec<Check>,
    pub payload: Value,
    /// Radian length removed beyond the truncation level, when `S_α` is truncated.
    pub tail_bound: Option<f64>,
    pub seed: u64,
    pub wall_time_s: f64,
    /// Set when the run used less than the scenario's nominal scale.
    pub reduced_scale: bool,
    pub notes: Vec<String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.gating && !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: ScenarioReport = serde_json::from_str(text)?;
        if report.schema != SCHEMA_VERSION {
            return invalid(format!("unsupported report schema {}", report.schema));
        }
        Ok(report)
    }
}

/// Collects a report while a scenario runs.
struct Builder {
    params: Map<String, Value>,
    checks: Vec<Check>,
    notes: Vec<String>,
    tail_bound: Option<f64>,
    reduced_scale: bool,
}

impl Builder {
    fn new(base: &Params) -> Self {
        let mut params = Map::new();
        params.insert("seed".into(), json!(base.seed));
        params.insert("gram_cap".into(), json!(base.gram_cap));
        Builder {
            params,
            checks: Vec::new(),
            notes: Vec::new(),
            tail_bound: None,
            reduced_scale: false,
        }
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.into(), json!(value));
    }

    fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Resolve the truncation level, flagging runs below the nominal one.
    fn trunc_level(&mut self, given: Option<u64>, nominal: u64) -> u64 {
        let level = given.unwrap_or(nominal);
        if level < nominal {
            self.reduced_scale = true;
            self.note(format!("truncation level {level} is below the nominal {nominal}"));
        }
        self.param("L", level);
        level
    }

    fn spec(&mut self, params: &Params, alpha: f64, eps: f64, nominal_l: u64) -> Result<SAlphaSpec> {
        let level = self.trunc_level(params.trunc_level, nominal_l);
        let spec = SAlphaSpec::new(alpha, eps, level)?;
        self.param("alpha", alpha);
        self.param("eps", eps);
        self.param("c0", spec.c0);
        Ok(spec)
    }

    fn finish(self, scenario: &str, seed: u64, payload: Value, start: Instant) -> ScenarioReport {
        ScenarioReport {
            schema: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            params: self.params,
            checks: self.checks,
            payload,
            tail_bound: self.tail_bound,
            seed,
            wall_time_s: start.elapsed().as_secs_f64(),
            reduced_scale: self.reduced_scale,
            notes: self.notes,
        }
    }
}

pub fn run_paper_check(scenario: &str, params: &Params) -> Result<ScenarioReport> {
    let start = Instant::now();
    let mut b = Builder::new(params);
    let payload = match scenario {
        "lemma1" => lemma1(params, &mut b)?,
        "lemma4" => lemma4(params, &mut b)?,
        "lemma5" => lemma5(params, &mut b)?,
        "lemma6" => lemma6(params, &mut b)?,
        "lemma7" => lemma7(params, &mut b)?,
        "lemma8" => lemma8(params, &mut b)?,
        "corollary-pdivides" => corollary_pdivides(params, &mut b)?,
        "theorem4" => theorem4(params, &mut b)?,
        "lemma9" => lemma9(params, &mut b)?,
        "uniting-blocks" => uniting_blocks(params, &mut b)?,
        other => {
            return invalid(format!(
                "unknown scenario '{other}'; expected one of {}",
                SCENARIOS.join(", ")
            ))
        }
    };
    Ok(b.finish(scenario, params.seed, payload, start))
}

/// `N_p = ⌊p^{1/α}⌋`.
pub fn block_length(p: u64, alpha: f64) -> u64 {
    floor_pow(p, 1.0 / alpha)
}

/// `B_p^α = {p, 2p, …, N_p p}`.
pub fn block(p: u64, alpha: f64) -> Result<FrequencySet> {
    FrequencySet::progression(0, p, block_length(p, alpha))
}

/// `Q(t) = Σ_{k=1}^{n} a_k e^{ikt}` with a seeded random unit coefficient vector.
pub fn random_unit_poly(rng: &mut ChaCha8Rng, n: u64) -> Result<TrigPoly> {
    let a = random_unit_vector(rng, n as usize);
    TrigPoly::new((1..=n as i64).zip(a.iter().copied()))
}

/// The Dirichlet polynomial followed by `count` seeded random polynomials, all of length `n`.
pub fn probe_polys(n: u64, count: usize, seed: u64) -> Result<Vec<TrigPoly>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut polys = vec![TrigPoly::dirichlet(n)?];
    for _ in 0..count {
        polys.push(random_unit_poly(&mut rng, n)?);
    }
    Ok(polys)
}

/// `∫_A |Q(pt)|² dμ` for each polynomial, sharing one coefficient table.
fn dilated_energies(set: &ArcSet, p: u64, n: u64, polys: &[TrigPoly]) -> Result<Vec<f64>> {
    let spectrum = IndicatorSpectrum::progression(set, p as i64, n as usize);
    polys
        .iter()
        .map(|q| Ok(energy_with(&q.dilate(p)?, &spectrum)))
        .collect()
}

fn check_block_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return invalid(format!("p = {p} is not prime"));
    }
    Ok(())
}

fn lemma1(params: &Params, b: &mut Builder) -> Result<Value> {
    let alpha = params.alpha.unwrap_or(0.5);
    let beta = params.beta.unwrap_or(0.25);
    let spec = b.spec(params, alpha, params.eps.unwrap_or(0.2), 64)?;
    b.param("beta", beta);
    let n_list = [16u64, 64, 256, 1024];
    b.param("N", n_list);
    b.tail_bound = Some(spec.tail_bound());
    let s = build_s_alpha(&spec)?;
    let rows = lemma1_table(&spec, &s, beta, &n_list, params.gram_cap)?;
    for w in &rows {
        b.check(Check::le(&format!("energy <= outer energy (N={})", w.n), w.energy, w.outer_energy, 1e-12));
    }
    for pair in rows.windows(2) {
        b.check(Check::lt(
            &format!("energy decreases N={} -> N={}", pair[0].n, pair[1].n),
            pair[1].energy,
            pair[0].energy,
        ));
    }
    let slope = log_log_slope(&rows);
    b.check(Check::le("log-log slope of energy in N", slope, 0.0, 0.0).informational());
    Ok(json!({ "rows": rows, "slope": slope }))
}

/// Witness energies for each `N`, against one prebuilt set.
pub fn lemma1_table(
    spec: &SAlphaSpec,
    s_alpha: &ArcSet,
    beta: f64,
    n_list: &[u64],
    cap: usize,
) -> Result<Vec<Lemma1Witness>> {
    n_list
        .iter()
        .map(|&n| lemma1_witness_energy_on(spec, s_alpha, beta, n, cap))
        .collect()
}

fn log_log_slope(rows: &[Lemma1Witness]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|w| w.energy > 0.0)
        .map(|w| ((w.n as f64).ln(), w.energy.ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Lower Riesz bound of one block on the truncated set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockBound {
    pub p: u64,
    pub n_p: u64,
    #[serde(rename = "L")]
    pub trunc_level: u64,
    pub arcs: usize,
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub mu_s: f64,
    pub oracle_min: f64,
    /// `A − N_p · tail/2π`: a lower bound for the untruncated set.
    pub untruncated_lower: f64,
}

pub fn block_bound(spec: &SAlphaSpec, p: u64, cap: usize, seed: u64) -> Result<(BlockBound, crate::riesz::GramMatrix)> {
    check_block_prime(p)?;
    let s = build_s_alpha(spec)?;
    let freqs = block(p, spec.alpha)?;
    let g = gram_capped(&freqs, &s, cap)?;
    let bounds = bounds_of(&g)?;
    let n_p = freqs.len() as u64;
    let row = BlockBound {
        p,
        n_p,
        trunc_level: spec.trunc_level,
        arcs: s.len(),
        lower: bounds.lower,
        upper: bounds.upper,
        mu_s: s.mu(),
        oracle_min: rayleigh_oracle_min(&g, ORACLE_SAMPLES, seed),
        untruncated_lower: bounds.lower - n_p as f64 * spec.tail_bound() / TAU,
    };
    Ok((row, g))
}

fn lemma4(params: &Params, b: &mut Builder) -> Result<Value> {
    let alpha = params.alpha.unwrap_or(0.5);
    let p = params.prime.unwrap_or(5);
    check_block_prime(p)?;
    let n_p = block_length(p, alpha);
    let spec = b.spec(params, alpha, params.eps.unwrap_or(0.2), p * n_p)?;
    b.param("prime", p);
    b.tail_bound = Some(spec.tail_bound());
    let (row, _) = block_bound(&spec, p, params.gram_cap, params.seed)?;
    b.check(Check::gt("A > 0", row.lower, 0.0));
    b.check(Check::ge("Rayleigh oracle min >= A", row.oracle_min, row.lower, ORACLE_SLACK));
    b.check(Check::le("B <= mu(T) = 1", row.upper, 1.0, 1e-10));
    b.check(Check::ge("A - N_p tail/2pi for the untruncated set", row.untruncated_lower, 0.0, 0.0).informational());
    let threshold = if alpha < 0.5 {
        let t = corollary_threshold(&spec)?;
        b.check(Check::gt("p above the prime threshold", p as f64, t as f64).informational());
        Some(t)
    } else {
        b.note("no explicit prime threshold for alpha >= 1/2; the tail estimate is only asymptotic");
        None
    };
    Ok(json!({ "block": row, "prime_threshold": threshold }))
}

/// Energies of `Q(p·)` summed over `J_[ℓ]`, `ℓ ≤ ⌊c0 p⌋`, with their bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallModuliSums {
    pub p: u64,
    pub ell_max: u64,
    /// One sum per probe polynomial, Dirichlet first.
    pub sums: Vec<f64>,
    /// `Σ 2δ(ℓ) + 2c0`.
    pub bound: f64,
    /// `Σ m_ℓ / p` with the exact covering multiplicity `m_ℓ`.
    pub covering_bound: f64,
    /// `Σ |I_[ℓ]|/2π + 2c0/2π`.
    pub literal_bound: f64,
}

pub fn small_moduli_sums(spec: &SAlphaSpec, p: u64, polys: &[TrigPoly]) -> Result<SmallModuliSums> {
    check_block_prime(p)?;
    let n_p = block_length(p, spec.alpha);
    let ell_max = (spec.c0 * p as f64).floor() as u64;
    if ell_max == 0 {
        return invalid(format!(
            "the range l <= floor(c0 p) is empty for p = {p} (c0 = {}); use p >= {}",
            spec.c0,
            (1.0 / spec.c0).ceil()
        ));
    }
    let mut sums = vec![0.0; polys.len()];
    let (mut bound, mut covering, mut literal) = (2.0 * spec.c0, 0.0, spec.c0 / PI);
    for ell in 1..=ell_max {
        let j = build_component(spec, ell, Variant::Coprime)?;
        for (s, e) in sums.iter_mut().zip(dilated_energies(&j, p, n_p, polys)?) {
            *s += e;
        }
        bound += 2.0 * spec.delta(ell);
        literal += spec.delta(ell) / PI;
        covering += covering_exact(p, ell, spec) as f64 / p as f64;
    }
    Ok(SmallModuliSums {
        p,
        ell_max,
        sums,
        bound,
        covering_bound: covering,
        literal_bound: literal,
    })
}

fn lemma5(params: &Params, b: &mut Builder) -> Result<Value> {
    let alpha = params.alpha.unwrap_or(0.5);
    let p = params.prime.unwrap_or(17);
    let spec = b.spec(params, alpha, params.eps.unwrap_or(0.2), 1)?;
    b.param("prime", p);
    b.param("random_vectors", RANDOM_VECTORS);
    let polys = probe_polys(block_length(p, alpha), RANDOM_VECTORS, params.seed)?;
    let r = small_moduli_sums(&spec, p, &polys)?;
    let worst = r.sums.iter().copied().fold(0.0, f64::max);
    b.check(Check::le("Dirichlet sum <= sum 2delta + 2c0", r.sums[0], r.bound, 1e-12));
    b.check(Check::le("max random sum <= sum 2delta + 2c0", worst, r.bound, 1e-12));
    b.check(Check::le("max sum <= exact covering bound", worst.max(r.sums[0]), r.covering_bound, 1e-12));
    b.check(Check::le("max sum <= sum |I|/2pi + 2c0/2pi", worst.max(r.sums[0]), r.literal_bound, 1e-12).informational());
    Ok(serde_json::to_value(r)?)
}

fn lemma6(params: &Params, b: &mut Builder) -> Result<Value> {
    let alpha = params.alpha.unwrap_or(0.4);
    let spec = b.spec(params, alpha, params.eps.unwrap_or(0.2), 1)?;
    let ladder = eta_ladder(alpha)?;
    let primes = match params.prime {
        Some(p) => {
            check_block_prime(p)?;
            vec![p]
        }
        None => admissible_primes(&ladder, 5),
    };
    b.param("primes", &primes);
    b.check(Check::le("ladder closed form defect", ladder.closed_form_defect(), 0.0, 1e-12));
    b.check(Check::gt("eta_d > 1/alpha", *ladder.etas.last().expect("nonempty ladder"), 1.0 / alpha));
    let mut scans = Vec::new();
    for &p in &primes {
        let scan = disjointness_scan(p, &spec, &ladder)?;
        b.check(Check::le(
            &format!("window violations (p={p}, {} pairs)", scan.pairs_checked()),
            scan.violation_count() as f64,
            0.0,
            0.0,
        ));
        scans.push(scan);
    }
    let threshold = corollary_threshold(&spec)?;
    if primes.iter().any(|&p| p < threshold) {
        b.note(format!("primes below the threshold {threshold} where p^eta_1 < c0 p first holds"));
    }
    Ok(json!({ "ladder": ladder, "scans": scans, "prime_threshold": threshold }))
}

/// Counting scan over the adversarial grid plus the separation-corrected shell check.
pub fn counting_scan(n_list: &[u64], rho: f64) -> Result<(CountingFit, usize)> {
    let fit = fit_counting_constant(n_list, rho, &adversarial_grid(512, 32))?;
    let beyond = fit
        .shell_violations
        .iter()
        .filter(|v| v.count as f64 > shell_bound_separated(v.n, v.k, rho))
        .count();
    Ok((fit, beyond))
}

fn lemma7(params: &Params, b: &mut Builder) -> Result<Value> {
    let rho = params.rho.unwrap_or(0.5);
    let n_list = [100u64, 200, 400, 800];
    b.param("rho", rho);
    b.param("N", n_list);
    b.param("grid", json!({ "uniform": 512, "farey_order": 32 }));
    let (fit, beyond) = counting_scan(&n_list, rho)?;
    for (i, g) in fit.growth.iter().enumerate() {
        b.check(Check::le(
            &format!("|growth - 1| for N={} -> N={}", n_list[i], n_list[i + 1]),
            (g - 1.0).abs(),
            fit.stability_tol,
            0.0,
        ));
    }
    b.check(Check::le(
        &format!("shell counts above 2*2^(k(rho-1))N^(1-rho) ({} shells)", fit.shells_checked),
        fit.shell_violations.len() as f64,
        0.0,
        0.0,
    ));
    b.check(Check::le("shell counts above 8*2^(k(rho-1))N^(1-rho) + 1", beyond as f64, 0.0, 0.0).informational());
    Ok(serde_json::to_value(&fit)?)
}

/// Largest residuals of the two closed-form equalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma8Residuals {
    pub p: u64,
    pub n_p: u64,
    /// `ℓ ∈ (N_p, pN_p)`, `p ∤ ℓ`.
    pub first_range: (u64, u64),
    /// `ℓ ∈ [pN_p, 4pN_p]`, checked term by term.
    pub second_range: (u64, u64),
    /// `max_Q |Σ_ℓ energy − Σ_ℓ μ(I_[ℓ])|` over the first range.
    pub first_sum: f64,
    pub second_sum: f64,
    /// Largest single-term residual over both ranges.
    pub termwise: f64,
    pub vectors: usize,
}

pub fn lemma8_residuals(spec: &SAlphaSpec, p: u64, polys: &[TrigPoly]) -> Result<Lemma8Residuals> {
    check_block_prime(p)?;
    let n_p = block_length(p, spec.alpha);
    let mut termwise: f64 = 0.0;
    let mut range_residual = |lo: u64, hi: u64| -> Result<f64> {
        let mut lhs = vec![0.0; polys.len()];
        let mut rhs = 0.0;
        for ell in (lo..=hi).filter(|l| l % p != 0 || lo >= p * n_p) {
            let set = build_component(spec, ell, Variant::Full)?;
            let mu = spec.delta(ell) / PI;
            rhs += mu;
            for (s, e) in lhs.iter_mut().zip(dilated_energies(&set, p, n_p, polys)?) {
                termwise = termwise.max((e - mu).abs());
                *s += e;
            }
        }
        Ok(lhs.iter().map(|s| (s - rhs).abs()).fold(0.0, f64::max))
    };
    let first_range = (n_p + 1, p * n_p - 1);
    let second_range = (p * n_p, 4 * p * n_p);
    let first_sum = range_residual(first_range.0, first_range.1)?;
    let second_sum = range_residual(second_range.0, second_range.1)?;
    Ok(Lemma8Residuals {
        p,
        n_p,
        first_range,
        second_range,
        first_sum,
        second_sum,
        termwise,
        vectors: polys.len(),
    })
}

fn lemma8(params: &Params, b: &mut Builder) -> Result<Value> {
    let alpha = params.alpha.unwrap_or(0.5);
    let p = params.prime.unwrap_or(3);
    let spec = b.spec(params, alpha, params.eps.unwrap_or(0.2), 1)?;
    b.param("prime", p);
    b.param("random_vectors", RANDOM_VECTORS);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_p = block_length(p, alpha);
    let polys = (0..RANDOM_VECTORS)
        .map(|_| random_unit_poly(&mut rng, n_p))
        .collect::<Result<Vec<_>>>()?;
    let r = lemma8_residuals(&spec, p, &polys)?;
    b.check(Check::le("first sum residual (N_p < l < pN_p, p does not divide l)", r.first_sum, 0.0, EQUALITY_TOL));
    b.check(Check::le("second sum residual (l >= pN_p)", r.second_sum, 0.0, EQUALITY_TOL));
    b.check(Check::le("largest termwise residual", r.termwise, 0.0, EQUALITY_TOL));
    b.note(format!(
        "the second sum is checked term by term for l <= {}; beyond that every term is an identity of the same form",
        r.second_range.1
    ));
    Ok(serde_json::to_value(r)?)
}

/// Energies of `Q(p·)` summed over `J_[jp]`, `j = 1..N_p`, with their bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipleModuliSums {
    pub p: u64,
    pub n_p: u64,
    pub sums: Vec<f64>,
    /// `N_p Σ_j μ(I_[jp])`.
    pub cs_bound: f64,
    pub c0: f64,
    /// `c0 / 2π`.
    pub literal_bound: f64,
}

pub fn multiple_moduli_sums(spec: &SAlphaSpec, p: u64, polys: &[TrigPoly]) -> Result<MultipleModuliSums> {
    check_block_prime(p)?;
    let n_p = block_length(p, spec.alpha);
    let mut sums = vec![0.0; polys.len()];
    let mut mu_sum = 0.0;
    for j in 1..=n_p {
        let ell = j * p;
        let set = build_component(spec, ell, Variant::Coprime)?;
        for (s, e) in sums.iter_mut().zip(dilated_energies(&set, p, n_p, polys)?) {
            *s += e;
        }
        mu_sum += spec.delta(ell) / PI;
    }
    Ok(MultipleModuliSums {
        p,
        n_p,
        sums,
        cs_bound: n_p as f64 * mu_sum,
        c0: spec.c0,
        literal_bound: spec.c0 / TAU,
    })
}

fn corollary_pdivides(params: &Params, b: &mut Builder) -> Result<Value> {
    let alpha = params.alpha.unwrap_or(0.5);
    let p = params.prime.unwrap_or(5);
    let spec = b.spec(params, alpha, params.eps.unwrap_or(0.2), 1)?;
    b.param("prime", p);
    b.param("random_vectors", RANDOM_VECTORS);
    let polys = probe_polys(block_length(p, alpha), RANDOM_VECTORS, params.seed)?;
    let r = multiple_moduli_sums(&spec, p, &polys)?;
    let worst = r.sums.iter().copied().fold(0.0, f64::max);
    b.check(Check::le("max sum <= N_p sum mu(I_[jp])", worst, r.cs_bound, 1e-12));
    b.check(Check::lt("max sum < c0", worst, r.c0));
    b.check(Check::lt("N_p sum mu(I_[jp]) < c0", r.cs_bound, r.c0));
    b.check(Check::lt("max sum < c0/2pi", worst, r.literal_bound).informational());
    Ok(serde_json::to_value(r)?)
}

/// A comb-with-notches instance for the sufficient-condition check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombInstance {
    pub ell: u64,
    pub gap: f64,
    pub notches: Vec<Notch>,
    pub alpha: f64,
    pub c: f64,
    pub delta: f64,
}

impl CombInstance {
    pub fn set(&self) -> Result<ArcSet> {
        comb_with_notches(self.ell, self.gap, &self.notches)
    }
}

fn notch(cell: u64, offset: f64, width: f64) -> Notch {
    Notch { cell, offset, width }
}

/// Ten instances on which the multiplicity condition holds; on some the
/// notches stack up far enough to enter the sublevel set.
pub fn comb_instances() -> Vec<CombInstance> {
    let raw: [(u64, f64, f64, Vec<Notch>); 10] = [
        (2, 0.5, 1e-3, vec![notch(1, 0.5, 1e-2)]),
        (3, 0.5, 1e-3, vec![notch(0, 0.3, 5e-3)]),
        (4, 0.5, 5e-4, vec![notch(1, 0.4, 2e-3), notch(2, 0.4, 2e-3)]),
        (5, 0.7, 2e-4, vec![notch(0, 0.2, 1e-3), notch(3, 0.2, 1e-3)]),
        (6, 0.6, 1e-4, vec![notch(5, 0.5, 1e-3)]),
        (8, 0.8, 1e-4, vec![notch(3, 0.2, 1e-3)]),
        (10, 0.95, 5e-5, vec![notch(1, 0.1, 2e-4), notch(4, 0.1, 2e-4)]),
        (12, 0.5, 2e-5, vec![notch(2, 0.05, 1e-3), notch(7, 0.15, 1e-3), notch(11, 0.25, 1e-3)]),
        (16, 0.9, 1e-5, vec![notch(0, 0.1, 5e-5), notch(1, 0.1, 5e-5), notch(2, 0.1, 5e-5)]),
        (20, 0.5, 1e-5, vec![notch(4, 0.2, 1e-3), notch(9, 0.2005, 1e-3)]),
    ];
    raw.into_iter()
        .map(|(ell, delta, gap, notches)| CombInstance {
            ell,
            gap,
            notches,
            alpha: 0.5,
            c: 0.5,
            delta,
        })
        .collect()
}

pub fn comb_instance_report(inst: &CombInstance, cap: usize) -> Result<Theorem4Report> {
    theorem4_check_capped(&inst.set()?, inst.alpha, inst.c, inst.delta, &[inst.ell], cap)
}

fn theorem4(params: &Params, b: &mut Builder) -> Result<Value> {
    let instances = comb_instances();
    b.param("instances", instances.len());
    let mut reports = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let r = comb_instance_report(inst, params.gram_cap)?;
        let row = &r.rows[0];
        b.check(Check::holds(&format!("instance {i} (l={}): condition holds", inst.ell), row.condition));
        if let (Some(lower), Some(chain)) = (row.lower, row.chain_bound) {
            b.check(Check::ge(
                &format!("instance {i} (l={}): A >= delta(1 - N sublevel/2pi)", inst.ell),
                lower,
                chain,
                r.slack,
            ));
        }
        reports.push(json!({ "instance": inst, "report": r }));
    }
    Ok(json!({ "instances": reports }))
}

fn lemma9(params: &Params, b: &mut Builder) -> Result<Value> {
    let ks = [4u64, 8, 16, 32];
    b.param("K", ks);
    let cap = params.gram_cap;
    let half = ArcSet::normalize(&[(0.0, PI)])?;
    let quarter = ArcSet::normalize(&[(0.0, PI / 2.0)])?;
    let mut rows = Vec::new();
    let mut quarter_values = Vec::new();
    for &k in &ks {
        let h = lattice_riesz_check_capped(&half, 2, k, cap)?;
        b.check(Check::holds(&format!("[0,pi), l=2: criterion (K={k})"), h.criterion));
        b.check(Check::eq(&format!("[0,pi), l=2: A = 1/2 (K={k})"), h.a_numeric, 0.5, 1e-12));
        let f = lattice_riesz_check_capped(&ArcSet::full(), 3, k, cap)?;
        b.check(Check::eq(&format!("full circle, l=3: A = 1 (K={k})"), f.a_numeric, 1.0, 1e-12));
        let q = lattice_riesz_check_capped(&quarter, 2, k, cap)?;
        b.check(Check::holds(&format!("[0,pi/2), l=2: criterion fails (K={k})"), !q.criterion));
        quarter_values.push(q.a_numeric);
        rows.push(json!({ "K": k, "half": h, "full": f, "quarter": q }));
    }
    for (i, w) in quarter_values.windows(2).enumerate() {
        b.check(Check::lt(&format!("[0,pi/2): A decreases K={} -> K={}", ks[i], ks[i + 1]), w[1], w[0]));
    }
    Ok(json!({ "rows": rows }))
}

fn uniting_blocks(params: &Params, b: &mut Builder) -> Result<Value> {
    let alpha = params.alpha.unwrap_or(0.5);
    let primes = [5u64, 7, 11];
    let largest = primes[primes.len() - 1];
    let spec = b.spec(params, alpha, params.eps.unwrap_or(0.2), largest * block_length(largest, alpha))?;
    let m_max = params.m_max.unwrap_or(1_000_000);
    let mode = match params.stride {
        Some(stride) => SearchMode::CoarseRefine { stride },
        None => SearchMode::Stride1,
    };
    b.param("primes", primes);
    b.param("m_max", m_max);
    b.param("mode", mode.label());
    b.tail_bound = Some(spec.tail_bound());
    let s = build_s_alpha(&spec)?;
    let blocks = primes.iter().map(|&p| block(p, alpha)).collect::<Result<Vec<_>>>()?;
    let schedule = BlockSchedule::measure(blocks, &s, params.gram_cap)?;
    let assembly = assemble_lambda_with(&schedule, &s, m_max, mode, params.gram_cap)?;
    let g = gram_capped(&assembly.lambda, &s, params.gram_cap)?;
    let oracle = rayleigh_oracle_min(&g, ORACLE_SAMPLES, params.seed);
    b.check(Check::ge("union A >= gamma/2 (1 + 1/K)", assembly.bound, assembly.target, 0.0));
    b.check(Check::ge("union A >= gamma/2", assembly.bound, schedule.gamma / 2.0, 0.0));
    for (k, (bound, target)) in assembly.step_bounds.iter().zip(&schedule.targets).enumerate() {
        b.check(Check::ge(&format!("after block {}: A >= target", k + 1), *bound, *target, 0.0));
    }
    b.check(Check::holds("union size is the sum of block sizes", assembly.lambda.len() == schedule.blocks.iter().map(|x| x.len()).sum::<usize>()));
    b.check(Check::ge("Rayleigh oracle min >= A", oracle, assembly.bound, ORACLE_SLACK));
    let mut report = assembly.to_report_json();
    report["block_bounds"] = json!(schedule.block_bounds);
    report["arcs"] = json!(s.len());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params {
        Params::new(0, crate::riesz::DEFAULT_GRAM_CAP)
    }

    #[test]
    fn unknown_scenario_is_rejected() {
        assert!(run_paper_check("lemma3", &params()).is_err());
    }

    #[test]
    fn block_matches_definition() {
        let b5 = block(5, 0.5).unwrap();
        assert_eq!(b5.len(), 25);
        assert_eq!((b5.min(), b5.max()), (5, 125));
    }

    #[test]
    fn lemma8_passes_for_p3() {
        let r = run_paper_check("lemma8", &params()).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert!(r.checks.iter().all(|c| c.tolerance == EQUALITY_TOL));
    }

    #[test]
    fn lemma9_passes() {
        let r = run_paper_check("lemma9", &params()).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn theorem4_instances_all_fire() {
        let r = run_paper_check("theorem4", &params()).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.checks.len(), 20);
    }

    #[test]
    fn some_instance_has_notches_in_sublevel() {
        let stacked = comb_instances()
            .iter()
            .filter(|inst| {
                let row = comb_instance_report(inst, 4096).unwrap().rows[0].clone();
                row.sublevel > inst.ell as f64 * inst.gap * (1.0 + 1e-9)
            })
            .count();
        assert!(stacked >= 2);
    }

    #[test]
    fn lemma5_needs_nonempty_range() {
        let mut p = params();
        p.prime = Some(13);
        assert!(run_paper_check("lemma5", &p).is_err());
        p.prime = Some(17);
        let r = run_paper_check("lemma5", &p).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn report_round_trips() {
        let r = run_paper_check("lemma9", &params()).unwrap();
        let back = ScenarioReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn reduced_scale_is_flagged() {
        let mut p = params();
        p.trunc_level = Some(20);
        let r = run_paper_check("lemma4", &p).unwrap();
        assert!(r.reduced_scale);
        assert_eq!(r.params["L"], json!(20));
        let full = run_paper_check("lemma4", &params()).unwrap();
        assert!(!full.reduced_scale);
        assert_eq!(full.params["L"], json!(125));
    }

    #[test]
    fn reports_are_deterministic() {
        let mut a = run_paper_check("corollary-pdivides", &params()).unwrap();
        let mut b = run_paper_check("corollary-pdivides", &params()).unwrap();
        a.wall_time_s = 0.0;
        b.wall_time_s = 0.0;
        assert_eq!(a, b);
    }

    #[test]
    fn probe_polys_are_unit() {
        for q in probe_polys(9, 4, 3).unwrap() {
            assert!((q.norm_sq() - 1.0).abs() < 1e-12);
            assert_eq!(q.len(), 9);
        }
    }

    #[test]
    fn checks_compare_as_labelled() {
        assert!(Check::le("x", 1.0, 1.0, 0.0).passed);
        assert!(!Check::lt("x", 1.0, 1.0).passed);
        assert!(Check::eq("x", 1.0 + 1e-13, 1.0, 1e-12).passed);
        assert!(!Check::ge("x", 0.5, 1.0, 0.1).passed);
        assert!(!Check::holds("x", false).informational().gating);
    }
}
