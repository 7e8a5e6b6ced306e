//! Finite unions of half-open arcs on the circle `[0, 2π)`.
//!
//! An [`ArcSet`] is always kept normalized: arcs are sorted by start,
//! pairwise disjoint, separated by gaps wider than [`MERGE_TOL`], and every
//! arc is longer than [`MERGE_TOL`]. Wrap-around arcs are split at `2π`.
//!
//! The module also builds the removed neighbourhoods of the rationals
//! `j/ℓ` (the sets `I_[ℓ]` and their coprime sub-unions `J_[ℓ]`) and the
//! set `S_α` obtained by deleting them for `ℓ = 1..=L`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{gcd, hurwitz_zeta, zeta};

/// Gaps and arcs at or below this length (radians) are fused or dropped.
pub const MERGE_TOL: f64 = 1e-12;

/// Default cap on the number of raw component arcs generated for `S_α`.
pub const DEFAULT_ARC_CAP: u64 = 5_000_000;

/// A half-open arc `[start, end)` with `0 <= start < end <= 2π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    start: f64,
    end: f64,
}

impl Arc {
    fn new_unchecked(start: f64, end: f64) -> Self {
        debug_assert!(0.0 <= start && start < end && end <= TAU);
        Arc { start, end }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.end)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.end - self.start)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }
}

/// Where an arc set came from; echoed into exported files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub spec: Option<SAlphaSpec>,
    pub tail_bound: Option<f64>,
}

impl Provenance {
    pub fn named(construction: impl Into<String>) -> Self {
        Provenance {
            construction: construction.into(),
            spec: None,
            tail_bound: None,
        }
    }
}

/// Normalized finite union of arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcSet {
    arcs: Vec<Arc>,
    provenance: Option<Provenance>,
}

/// Set operation selector for [`ArcSet::boolean`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Complement,
    Difference,
}

/// Reduce `t` into `[0, 2π)`.
pub fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Push the arc starting at `start` (already reduced) of length `len < 2π`,
/// splitting it at `2π` if it wraps.
fn push_wrapped(out: &mut Vec<Arc>, start: f64, len: f64) {
    let end = start + len;
    if end <= TAU {
        if len > 0.0 {
            out.push(Arc::new_unchecked(start, end));
        }
    } else {
        if start < TAU {
            out.push(Arc::new_unchecked(start, TAU));
        }
        let rest = end - TAU;
        if rest > 0.0 {
            out.push(Arc::new_unchecked(0.0, rest.min(TAU)));
        }
    }
}

/// Push the arc `(center - half, center + half)` reduced mod `2π`.
fn push_centered(out: &mut Vec<Arc>, center: f64, half: f64) {
    let len = 2.0 * half;
    if len >= TAU {
        out.push(Arc::new_unchecked(0.0, TAU));
    } else {
        push_wrapped(out, reduce_angle(center - half), len);
    }
}

/// Sort, fuse and clean a list of in-range arcs.
fn normalize_arcs(mut arcs: Vec<Arc>) -> Vec<Arc> {
    arcs.sort_unstable_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));
    let mut out: Vec<Arc> = Vec::with_capacity(arcs.len());
    for arc in arcs {
        match out.last_mut() {
            Some(last) if arc.start <= last.end + MERGE_TOL => {
                if arc.end > last.end {
                    last.end = arc.end;
                }
            }
            _ => out.push(arc),
        }
    }
    out.retain(|a| a.length() > 0.0);
    if let Some(first) = out.first_mut() {
        if first.start <= MERGE_TOL {
            first.start = 0.0;
        }
    }
    if let Some(last) = out.last_mut() {
        if last.end >= TAU - MERGE_TOL {
            last.end = TAU;
        }
    }
    out
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet {
            arcs: Vec::new(),
            provenance: None,
        }
    }

    pub fn full() -> Self {
        ArcSet {
            arcs: vec![Arc::new_unchecked(0.0, TAU)],
            provenance: None,
        }
    }

    /// Build a normalized set from raw `(start, end)` pairs.
    ///
    /// A pair is read as the arc swept counter-clockwise from `start` to
    /// `end`; pairs whose span is at least `2π` cover the whole circle.
    pub fn normalize(raw: &[(f64, f64)]) -> Result<Self> {
        let mut arcs = Vec::with_capacity(raw.len() + 1);
        for &(start, end) in raw {
            if !start.is_finite() || !end.is_finite() {
                return invalid(format!("non-finite arc endpoint in ({start}, {end})"));
            }
            let span = end - start;
            if span == 0.0 {
                return invalid(format!("degenerate arc ({start}, {end})"));
            }
            if span.abs() >= TAU {
                arcs.push(Arc::new_unchecked(0.0, TAU));
                continue;
            }
            let len = span.rem_euclid(TAU);
            push_wrapped(&mut arcs, reduce_angle(start), len);
        }
        Ok(Self::from_raw_arcs(arcs))
    }

    /// Build from arcs given by centers and a common half-width.
    pub fn from_centered(centers: impl IntoIterator<Item = f64>, half: f64) -> Self {
        let mut arcs = Vec::new();
        if half > 0.0 {
            for c in centers {
                push_centered(&mut arcs, c, half);
            }
        }
        Self::from_raw_arcs(arcs)
    }

    fn from_raw_arcs(arcs: Vec<Arc>) -> Self {
        ArcSet {
            arcs: normalize_arcs(arcs),
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].start == 0.0 && self.arcs[0].end == TAU
    }

    /// Total length in radians.
    pub fn measure(&self) -> f64 {
        // Neumaier summation: sets with millions of arcs are routine here.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for a in &self.arcs {
            let x = a.length();
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    /// Normalized (Haar probability) measure, `measure / 2π`.
    pub fn mu(&self) -> f64 {
        self.measure() / TAU
    }

    /// Membership of `t` (reduced mod `2π`) under the half-open convention.
    pub fn contains(&self, t: f64) -> bool {
        let t = reduce_angle(t);
        let idx = self.arcs.partition_point(|a| a.start <= t);
        idx > 0 && t < self.arcs[idx - 1].end
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        let mut cursor = 0.0;
        for a in &self.arcs {
            if a.start > cursor {
                out.push(Arc::new_unchecked(cursor, a.start));
            }
            cursor = a.end;
        }
        if cursor < TAU {
            out.push(Arc::new_unchecked(cursor, TAU));
        }
        // Gaps of a normalized set already exceed the tolerance.
        ArcSet {
            arcs: out,
            provenance: None,
        }
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut arcs = Vec::with_capacity(self.arcs.len() + other.arcs.len());
        arcs.extend_from_slice(&self.arcs);
        arcs.extend_from_slice(&other.arcs);
        Self::from_raw_arcs(arcs)
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let (a, b) = (&self.arcs, &other.arcs);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].start.max(b[j].start);
            let hi = a[i].end.min(b[j].end);
            if hi > lo {
                out.push(Arc::new_unchecked(lo, hi));
            }
            if a[i].end < b[j].end {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_raw_arcs(out)
    }

    /// True when the intersection has positive length.
    pub fn overlaps(&self, other: &ArcSet) -> bool {
        let (a, b) = (&self.arcs, &other.arcs);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i].start.max(b[j].start) < a[i].end.min(b[j].end) {
                return true;
            }
            if a[i].end < b[j].end {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.intersect(&other.complement())
    }

    /// Dispatch on a [`SetOp`]; `complement` takes no second operand.
    pub fn boolean(op: SetOp, a: &ArcSet, b: Option<&ArcSet>) -> Result<ArcSet> {
        match (op, b) {
            (SetOp::Complement, None) => Ok(a.complement()),
            (SetOp::Complement, Some(_)) => invalid("complement takes a single operand"),
            (_, None) => invalid(format!("{op:?} needs two operands")),
            (SetOp::Union, Some(b)) => Ok(a.union(b)),
            (SetOp::Intersect, Some(b)) => Ok(a.intersect(b)),
            (SetOp::Difference, Some(b)) => Ok(a.difference(b)),
        }
    }

    /// `self ⊆ other`, up to the merge tolerance.
    pub fn is_subset_of(&self, other: &ArcSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Image under `t ↦ p·t mod 2π`.
    pub fn dilate_mod(&self, p: u64) -> Result<ArcSet> {
        if p == 0 {
            return invalid("dilation factor must be positive");
        }
        let pf = p as f64;
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            let len = pf * a.length();
            if len >= TAU - MERGE_TOL {
                return Ok(ArcSet::full());
            }
            push_wrapped(&mut arcs, reduce_angle(pf * a.start), len);
        }
        Ok(Self::from_raw_arcs(arcs))
    }

    /// True when the two normalized sets agree arc by arc within `tol`.
    pub fn approx_eq(&self, other: &ArcSet, tol: f64) -> bool {
        self.arcs.len() == other.arcs.len()
            && self
                .arcs
                .iter()
                .zip(&other.arcs)
                .all(|(a, b)| (a.start - b.start).abs() <= tol && (a.end - b.end).abs() <= tol)
    }
}

/// Parameters of the `S_α` construction.
///
/// `δ(ℓ) = c0 / ℓ^{1/α}`; the arcs around `2πj/ℓ` have half-width `δ(ℓ)/ℓ`,
/// so the `ℓ`-th removed set has total length `2δ(ℓ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SAlphaSpec {
    pub alpha: f64,
    pub eps: f64,
    pub c0: f64,
    #[serde(rename = "L")]
    pub trunc_level: u64,
}

impl SAlphaSpec {
    /// Spec with the default constant `c0 = 0.99 ε / (2 ζ(1/α))`.
    pub fn new(alpha: f64, eps: f64, trunc_level: u64) -> Result<Self> {
        check_alpha_eps(alpha, eps)?;
        let c0 = (0.99 * eps / (2.0 * zeta(1.0 / alpha))).min(eps * (1.0 - 1e-12));
        Self::with_c0(alpha, eps, c0, trunc_level)
    }

    /// Spec with an explicit `c0`; the removal budget `2 c0 ζ(1/α) < ε` is enforced.
    pub fn with_c0(alpha: f64, eps: f64, c0: f64, trunc_level: u64) -> Result<Self> {
        check_alpha_eps(alpha, eps)?;
        if !(c0 > 0.0 && c0 < eps) {
            return invalid(format!("c0 = {c0} must lie in (0, eps = {eps})"));
        }
        let budget = 2.0 * c0 * zeta(1.0 / alpha);
        if budget >= eps {
            return invalid(format!(
                "removed length 2 c0 zeta(1/alpha) = {budget} is not below eps = {eps}"
            ));
        }
        Ok(SAlphaSpec {
            alpha,
            eps,
            c0,
            trunc_level,
        })
    }

    pub fn with_trunc_level(mut self, trunc_level: u64) -> Self {
        self.trunc_level = trunc_level;
        self
    }

    pub fn delta(&self, ell: u64) -> f64 {
        self.c0 / (ell as f64).powf(1.0 / self.alpha)
    }

    /// Half-width `δ(ℓ)/ℓ` of each arc of `I_[ℓ]`.
    pub fn half_width(&self, ell: u64) -> f64 {
        self.delta(ell) / ell as f64
    }

    /// `Σ_{ℓ ≥ 1} 2δ(ℓ) = 2 c0 ζ(1/α)`.
    pub fn removal_budget(&self) -> f64 {
        2.0 * self.c0 * zeta(1.0 / self.alpha)
    }

    /// Length discarded by truncating at `L`: `Σ_{ℓ > L} 2δ(ℓ)`.
    pub fn tail_bound(&self) -> f64 {
        2.0 * self.c0 * hurwitz_zeta(1.0 / self.alpha, self.trunc_level as f64 + 1.0)
    }

    /// Number of raw component arcs `Σ_{ℓ ≤ L} ℓ`.
    pub fn component_arc_count(&self) -> u64 {
        let l = self.trunc_level;
        l * (l + 1) / 2
    }
}

fn check_alpha_eps(alpha: f64, eps: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha = {alpha} must lie in (0, 1)"));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return invalid(format!("eps = {eps} must lie in (0, 1/4)"));
    }
    Ok(())
}

/// Which residues `j` of `ℓ` carry an arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// All `j = 0..ℓ`: the set `I_[ℓ]`.
    Full,
    /// Only `gcd(j, ℓ) = 1`: the set `J_[ℓ]` (with `J_[1] = I_[1]`).
    Coprime,
}

/// Residues used by a component; `gcd(0, 1) = 1` makes `J_[1] = I_[1]`.
pub(crate) fn residues(ell: u64, variant: Variant) -> impl Iterator<Item = u64> {
    (0..ell).filter(move |&j| variant == Variant::Full || gcd(j, ell) == 1)
}

/// The arcs `2πj/ℓ + (-δ(ℓ)/ℓ, δ(ℓ)/ℓ)`.
pub fn build_component(spec: &SAlphaSpec, ell: u64, variant: Variant) -> Result<ArcSet> {
    if ell == 0 {
        return invalid("component index ell must be positive");
    }
    let step = TAU / ell as f64;
    let set = ArcSet::from_centered(
        residues(ell, variant).map(|j| step * j as f64),
        spec.half_width(ell),
    );
    let name = match variant {
        Variant::Full => format!("I[{ell}]"),
        Variant::Coprime => format!("J[{ell}]"),
    };
    Ok(set.with_provenance(Provenance {
        construction: name,
        spec: Some(*spec),
        tail_bound: None,
    }))
}

/// `∪_{ℓ=1}^{L} I_[ℓ]` with the default arc cap.
pub fn build_removed_union(spec: &SAlphaSpec) -> Result<ArcSet> {
    build_removed_union_capped(spec, DEFAULT_ARC_CAP)
}

pub fn build_removed_union_capped(spec: &SAlphaSpec, arc_cap: u64) -> Result<ArcSet> {
    let count = spec.component_arc_count();
    if count > arc_cap {
        return Err(Error::ResourceLimit {
            what: "component arcs of S_alpha",
            requested: count,
            cap: arc_cap,
        });
    }
    let mut arcs = Vec::with_capacity(count as usize + spec.trunc_level as usize);
    for ell in 1..=spec.trunc_level {
        let half = spec.half_width(ell);
        let step = TAU / ell as f64;
        for j in 0..ell {
            push_centered(&mut arcs, step * j as f64, half);
        }
    }
    Ok(ArcSet::from_raw_arcs(arcs).with_provenance(Provenance {
        construction: format!("union I[1..={}]", spec.trunc_level),
        spec: Some(*spec),
        tail_bound: Some(spec.tail_bound()),
    }))
}

/// The truncated set `T \ ∪_{ℓ=1}^{L} I_[ℓ]`.
pub fn build_s_alpha(spec: &SAlphaSpec) -> Result<ArcSet> {
    build_s_alpha_capped(spec, DEFAULT_ARC_CAP)
}

pub fn build_s_alpha_capped(spec: &SAlphaSpec, arc_cap: u64) -> Result<ArcSet> {
    let removed = build_removed_union_capped(spec, arc_cap)?;
    Ok(removed.complement().with_provenance(Provenance {
        construction: "S_alpha".into(),
        spec: Some(*spec),
        tail_bound: Some(spec.tail_bound()),
    }))
}

#[derive(Serialize, Deserialize)]
struct ArcSetFile {
    arcs: Vec<[f64; 2]>,
    #[serde(default)]
    construction: Option<String>,
    alpha: Option<f64>,
    eps: Option<f64>,
    c0: Option<f64>,
    #[serde(rename = "L")]
    trunc_level: Option<u64>,
    tail_bound: Option<f64>,
}

/// Seventeen significant digits, which round-trips every `f64`.
pub(crate) fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_else(|| "null".into())
}

impl ArcSet {
    /// Serialize to the arc-set JSON file format.
    pub fn to_json(&self) -> String {
        let arcs: Vec<String> = self
            .arcs
            .iter()
            .map(|a| format!("[{},{}]", sig17(a.start), sig17(a.end)))
            .collect();
        let prov = self.provenance.as_ref();
        let spec = prov.and_then(|p| p.spec);
        format!(
            "{{\"arcs\":[{}],\"construction\":{},\"alpha\":{},\"eps\":{},\"c0\":{},\"L\":{},\"tail_bound\":{}}}\n",
            arcs.join(","),
            prov.map(|p| serde_json::to_string(&p.construction).expect("string serializes"))
                .unwrap_or_else(|| "null".into()),
            opt_num(spec.map(|s| s.alpha)),
            opt_num(spec.map(|s| s.eps)),
            opt_num(spec.map(|s| s.c0)),
            spec.map(|s| s.trunc_level.to_string()).unwrap_or_else(|| "null".into()),
            opt_num(prov.and_then(|p| p.tail_bound)),
        )
    }

    /// Parse the arc-set JSON file format. Arcs are re-normalized.
    pub fn from_json(text: &str) -> Result<ArcSet> {
        let file: ArcSetFile = serde_json::from_str(text)?;
        let mut arcs = Vec::with_capacity(file.arcs.len());
        for [s, e] in file.arcs {
            if !(0.0 <= s && s < e && e <= TAU) {
                return invalid(format!("arc [{s}, {e}) is not inside [0, 2pi)"));
            }
            arcs.push(Arc::new_unchecked(s, e));
        }
        let spec = match (file.alpha, file.eps, file.c0, file.trunc_level) {
            (Some(alpha), Some(eps), Some(c0), Some(trunc_level)) => Some(SAlphaSpec {
                alpha,
                eps,
                c0,
                trunc_level,
            }),
            _ => None,
        };
        let set = ArcSet::from_raw_arcs(arcs);
        if file.construction.is_none() && spec.is_none() && file.tail_bound.is_none() {
            return Ok(set);
        }
        Ok(set.with_provenance(Provenance {
            construction: file.construction.unwrap_or_default(),
            spec,
            tail_bound: file.tail_bound,
        }))
    }
}
