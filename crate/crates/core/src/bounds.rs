//! Recursive separation into decoupled blocks, the `S_d` recurrence, and the
//! distance, dimension and transversal-gate bounds built on them.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::analysis::{Separation, SeparatorConfig};
use crate::code::StabilizerCode;
use crate::correctability::{dimension_bound_from_tripartition, RankCriterion, TripartitionWitness};
use crate::error::{Error, Result};
use crate::graph::{are_decoupled, Graph};
use crate::region::Region;

/// Separator-size model `s(r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SSpec {
    /// `s(r) = ⌈σ r^c⌉`.
    PowerLaw { sigma: f64, exponent: f64 },
    /// Step function: `s(r)` is the value at the largest key `<= r` (0 below the first key).
    Table(BTreeMap<usize, usize>),
}

impl SSpec {
    pub fn eval(&self, r: usize) -> usize {
        match self {
            SSpec::PowerLaw { sigma, exponent } => {
                if r == 0 {
                    0
                } else {
                    (sigma * (r as f64).powf(*exponent) - 1e-9).ceil().max(0.0) as usize
                }
            }
            SSpec::Table(t) => t.range(..=r).next_back().map_or(0, |(_, &s)| s),
        }
    }

    /// Nondecreasing table dominating every `(size, separator)` observation.
    pub fn envelope<I: IntoIterator<Item = (usize, usize)>>(observations: I) -> SSpec {
        let mut raw: BTreeMap<usize, usize> = BTreeMap::new();
        for (r, s) in observations {
            let e = raw.entry(r).or_default();
            *e = (*e).max(s);
        }
        let mut running = 0;
        let table = raw
            .into_iter()
            .map(|(r, s)| {
                running = running.max(s);
                (r, running)
            })
            .collect();
        SSpec::Table(table)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceParams {
    pub s_spec: SSpec,
    pub c_alpha: f64,
    pub alpha: f64,
}

impl RecurrenceParams {
    pub fn power_law(sigma: f64, exponent: f64) -> Self {
        Self { s_spec: SSpec::PowerLaw { sigma, exponent }, c_alpha: 1.0, alpha: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_alpha >= 1.0) {
            return Err(Error::Domain(format!("c_alpha must be at least 1, got {}", self.c_alpha)));
        }
        if !(0.5..1.0).contains(&self.alpha) {
            return Err(Error::Domain(format!("split balance must lie in [1/2, 1), got {}", self.alpha)));
        }
        if let SSpec::PowerLaw { sigma, exponent } = self.s_spec {
            if !(exponent > 0.0 && exponent <= 1.0) || !(sigma > 0.0) {
                return Err(Error::Domain(format!("power law needs sigma > 0 and c in (0, 1], got ({sigma}, {exponent})")));
            }
        }
        Ok(())
    }

    /// Rounded-up child size, forced strictly below `r` so the recursion ends.
    pub fn child_size(&self, r: usize) -> usize {
        ((self.alpha * r as f64 - 1e-9).ceil() as usize).min(r.saturating_sub(1))
    }

    fn term(&self, r: usize) -> u64 {
        (self.c_alpha * self.s_spec.eval(r) as f64 - 1e-9).ceil().max(0.0) as u64
    }
}

/// `S_d(r) = c_α s(r) + 2 S_d(child(r))`, with `S_d(t) = 0` for `t < d`.
pub fn eval_s_d(params: &RecurrenceParams, d: usize, n: usize) -> u64 {
    let d = d.max(1);
    let mut total = 0u64;
    let mut weight = 1u64;
    let mut r = n;
    while r >= d {
        total = total.saturating_add(weight.saturating_mul(params.term(r)));
        weight = weight.saturating_mul(2);
        r = params.child_size(r);
    }
    total
}

/// Number of applications of `S_d` needed to bring `n` below `d`, or `None`
/// if the iteration stalls within `max_steps`.
pub fn iterate_s_d(params: &RecurrenceParams, d: usize, n: usize, max_steps: usize) -> Option<usize> {
    let mut x = n as u64;
    for steps in 0..=max_steps {
        if x < d as u64 {
            return Some(steps);
        }
        let next = eval_s_d(params, d, usize::try_from(x).unwrap_or(usize::MAX));
        if next >= x {
            return None;
        }
        x = next;
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub points: Vec<(usize, f64)>,
    pub max_ratio: f64,
    /// Relative change of the ratio over the last doubling.
    pub tail_change: f64,
    pub plateau: bool,
}

/// Ratio `S_d(n) / (d^{c-1} n)` over a sweep, for power-law `s` with `c < 1`.
pub fn closed_form_check(params: &RecurrenceParams, d: usize, n_sweep: &[usize]) -> Result<RatioReport> {
    params.validate()?;
    let c = match params.s_spec {
        SSpec::PowerLaw { exponent, .. } => exponent,
        SSpec::Table(_) => return Err(Error::Domain("closed form needs a power-law separator model".into())),
    };
    if c >= 1.0 {
        return Err(Error::Domain("closed form requires exponent c < 1".into()));
    }
    if d == 0 || n_sweep.iter().any(|&n| n == 0) {
        return Err(Error::Input("d and sweep sizes must be positive".into()));
    }
    let scale = (d as f64).powf(c - 1.0);
    let points: Vec<(usize, f64)> =
        n_sweep.iter().map(|&n| (n, eval_s_d(params, d, n) as f64 / (scale * n as f64))).collect();
    let max_ratio = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let tail_change = match points.as_slice() {
        [.., (_, a), (_, b)] if *a > 0.0 => (b - a).abs() / a,
        _ => 0.0,
    };
    Ok(RatioReport { points, max_ratio, tail_change, plateau: tail_change <= 0.01 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitRecord {
    pub depth: usize,
    pub size: usize,
    pub separator: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecursivePartition {
    pub blocks: Vec<Region>,
    pub complement: Region,
    pub d_target: usize,
    pub split_tree: Vec<SplitRecord>,
}

impl RecursivePartition {
    pub fn blocks_union(&self) -> Region {
        self.blocks.iter().flat_map(Region::iter).collect()
    }

    /// With `s_spec` dominating every recorded separator, `|Ā|` must not exceed
    /// `S_d(n)`. Returns `None` when some separator exceeds `c_α s(r)`, in
    /// which case the recurrence says nothing about this run.
    pub fn replay_check(&self, params: &RecurrenceParams, n: usize) -> Option<bool> {
        if self.split_tree.iter().any(|rec| rec.separator as u64 > params.term(rec.size)) {
            return None;
        }
        Some(self.complement.len() as u64 <= eval_s_d(params, self.d_target, n))
    }
}

/// Failure inside the recursion, carrying the splits completed so far.
#[derive(Debug)]
pub struct PartitionFailure {
    pub split_tree: Vec<SplitRecord>,
    pub error: Error,
}

impl fmt::Display for PartitionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} splits)", self.error, self.split_tree.len())
    }
}

impl From<PartitionFailure> for Error {
    fn from(p: PartitionFailure) -> Error {
        let msg = p.to_string();
        match p.error {
            Error::Budget(_) => Error::Budget(msg),
            Error::Input(_) => Error::Input(msg),
            Error::Inconsistency(_) => Error::Inconsistency(msg),
            other => other,
        }
    }
}

/// Splits `V` by repeated balanced separation until every remaining piece
/// has fewer than `d_target` vertices. Separators accumulate in the
/// complement; the pieces are pairwise decoupled.
pub fn recursive_separation_with<F>(
    g: &Graph,
    d_target: usize,
    mut separate: F,
) -> std::result::Result<RecursivePartition, PartitionFailure>
where
    F: FnMut(&Graph) -> Result<Separation>,
{
    let mut split_tree = Vec::new();
    if d_target == 0 {
        return Err(PartitionFailure { split_tree, error: Error::Input("d_target must be at least 1".into()) });
    }
    let mut blocks = Vec::new();
    let mut complement = Vec::new();
    let mut stack: Vec<(Vec<usize>, usize)> = vec![((0..g.n()).collect(), 0)];
    while let Some((set, depth)) = stack.pop() {
        if set.is_empty() {
            continue;
        }
        if set.len() < d_target {
            blocks.push(Region::new(set));
            continue;
        }
        let sub = g.induced(&set);
        let sep = match separate(&sub) {
            Ok(s) => s,
            Err(error) => return Err(PartitionFailure { split_tree, error }),
        };
        if let Err(v) = crate::analysis::validate_separation(&sub, &sep) {
            return Err(PartitionFailure { split_tree, error: Error::Inconsistency(format!("invalid separation: {v}")) });
        }
        split_tree.push(SplitRecord { depth, size: set.len(), separator: sep.s.len(), a: sep.a.len(), b: sep.b.len() });
        complement.extend(sep.s.iter().map(|i| set[i]));
        // Push B first so A is processed first; keeps block order stable.
        stack.push((sep.b.iter().map(|i| set[i]).collect(), depth + 1));
        stack.push((sep.a.iter().map(|i| set[i]).collect(), depth + 1));
    }
    Ok(RecursivePartition { blocks, complement: Region::new(complement), d_target, split_tree })
}

pub fn recursive_separation(
    g: &Graph,
    d_target: usize,
    config: &SeparatorConfig,
) -> std::result::Result<RecursivePartition, PartitionFailure> {
    recursive_separation_with(g, d_target, |sub| config.separate(sub))
}

/// `d <= δ (tw + 1)` for any `tw` at least the treewidth.
pub fn distance_bound(tw_upper: usize, delta: usize) -> usize {
    delta * (tw_upper + 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionBound {
    pub k_upper: usize,
    pub witness: TripartitionWitness,
    pub first: Option<RecursivePartition>,
    pub second: Option<RecursivePartition>,
}

fn certify_blocks(criterion: &RankCriterion, g: &Graph, part: &RecursivePartition, d_lb: usize) -> Result<Region> {
    for block in &part.blocks {
        if !criterion.is_correctable(block)? {
            return Err(Error::Inconsistency(format!(
                "block of size {} is not correctable, so {d_lb} is not a distance lower bound",
                block.len()
            )));
        }
    }
    if !are_decoupled(g, &part.blocks)? {
        return Err(Error::Inconsistency("recursive separation produced coupled blocks".into()));
    }
    Ok(part.blocks_union())
}

/// `k <= |C|` from a tripartition whose first two parts are unions of
/// decoupled blocks smaller than the distance lower bound `d_lb`.
pub fn dimension_bound(
    g: &Graph,
    code: &StabilizerCode,
    d_lb: usize,
    config: &SeparatorConfig,
) -> Result<DimensionBound> {
    if g.n() != code.n() {
        return Err(Error::Input(format!("graph has {} vertices but code has {} qubits", g.n(), code.n())));
    }
    if d_lb == 0 {
        return Err(Error::Input("distance lower bound must be at least 1".into()));
    }
    if d_lb == 1 {
        let witness = dimension_bound_from_tripartition(code, &Region::empty(), &Region::empty())?;
        return Ok(DimensionBound { k_upper: witness.k_bound, witness, first: None, second: None });
    }
    let criterion = RankCriterion::new(code);
    let first = recursive_separation(g, d_lb, config)?;
    let a = certify_blocks(&criterion, g, &first, d_lb)?;
    let rest: Vec<usize> = first.complement.iter().collect();
    let sub = g.induced(&rest);
    let mut second = recursive_separation(&sub, d_lb, config)?;
    second.blocks = second.blocks.iter().map(|b| b.iter().map(|i| rest[i]).collect()).collect();
    second.complement = second.complement.iter().map(|i| rest[i]).collect();
    let b = certify_blocks(&criterion, g, &second, d_lb)?;
    let witness = dimension_bound_from_tripartition(code, &a, &b)?;
    Ok(DimensionBound { k_upper: witness.k_bound, witness, first: Some(first), second: Some(second) })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TransversalLevel {
    /// No nonempty region is certified correctable when `d_lb <= 1`.
    NotApplicable,
    Level {
        r: usize,
        /// `R + 1` regions partitioning the qubits, each correctable.
        regions: Vec<Region>,
        /// Separator sizes observed, as `(subgraph size, |S|)`.
        observed: Vec<(usize, usize)>,
    },
}

impl TransversalLevel {
    pub fn level(&self) -> Option<usize> {
        match self {
            TransversalLevel::NotApplicable => None,
            TransversalLevel::Level { r, .. } => Some(*r),
        }
    }
}

/// Peels correctable unions of decoupled blocks off the remaining qubits
/// until fewer than `d_lb` remain. Valid for any code with distance `>= d_lb`.
pub fn transversal_level_empirical(
    g: &Graph,
    code: &StabilizerCode,
    d_lb: usize,
    config: &SeparatorConfig,
) -> Result<TransversalLevel> {
    if g.n() != code.n() {
        return Err(Error::Input(format!("graph has {} vertices but code has {} qubits", g.n(), code.n())));
    }
    if d_lb <= 1 {
        return Ok(TransversalLevel::NotApplicable);
    }
    let criterion = RankCriterion::new(code);
    let mut current: Vec<usize> = (0..g.n()).collect();
    let mut regions = Vec::new();
    let mut observed = Vec::new();
    while current.len() >= d_lb {
        let sub = g.induced(&current);
        let part = recursive_separation(&sub, d_lb, config)?;
        observed.extend(part.split_tree.iter().map(|rec| (rec.size, rec.separator)));
        let blocks: Vec<Region> = part.blocks.iter().map(|b| b.iter().map(|i| current[i]).collect()).collect();
        let mapped = RecursivePartition {
            blocks,
            complement: part.complement.iter().map(|i| current[i]).collect(),
            d_target: d_lb,
            split_tree: part.split_tree,
        };
        let region = certify_blocks(&criterion, g, &mapped, d_lb)?;
        if region.is_empty() {
            return Err(Error::Inconsistency("separation made no progress".into()));
        }
        if !criterion.is_correctable(&region)? {
            return Err(Error::Inconsistency("union of decoupled correctable blocks is not correctable".into()));
        }
        regions.push(region);
        current = mapped.complement.into_vec();
    }
    let last = Region::new(current);
    if !criterion.is_correctable(&last)? {
        return Err(Error::Inconsistency(format!(
            "final region of size {} is not correctable, so {d_lb} is not a distance lower bound",
            last.len()
        )));
    }
    let r = regions.len();
    regions.push(last);
    Ok(TransversalLevel::Level { r, regions, observed })
}

/// `R = ⌈(1 - α) / (α (1 - c))⌉` for `c, α` in `(0, 1)`.
pub fn transversal_level_formula(c: f64, alpha_dist: f64) -> Result<usize> {
    let open = |x: f64| x > 0.0 && x < 1.0;
    if !open(c) || !open(alpha_dist) {
        return Err(Error::Domain(format!(
            "separator exponent and distance exponent must lie in (0, 1), got c={c}, alpha={alpha_dist}"
        )));
    }
    Ok(((1.0 - alpha_dist) / (alpha_dist * (1.0 - c)) - 1e-9).ceil() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaKind {
    Hyperbolic,
    Genus,
    Classical,
    Projector,
}

impl std::str::FromStr for FormulaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" | "hyperbolic_D" => Ok(FormulaKind::Hyperbolic),
            "genus" | "genus_g" => Ok(FormulaKind::Genus),
            "classical" => Ok(FormulaKind::Classical),
            "projector" => Ok(FormulaKind::Projector),
            other => Err(Error::Input(format!("unknown formula kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct FormulaParams {
    pub dimension: Option<usize>,
    pub genus: Option<usize>,
    pub n: Option<usize>,
    pub delta: Option<usize>,
    pub tw: Option<usize>,
    pub d_lb: Option<usize>,
    pub recurrence: Option<RecurrenceParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundLine {
    pub kind: FormulaKind,
    pub statement: String,
    /// The bound's expression evaluated at the supplied numbers.
    pub value: Option<f64>,
    /// True for an inequality with explicit constants; false for big-O.
    pub explicit: bool,
}

fn need<T: Copy>(v: Option<T>, name: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| Error::Input(format!("{kind} bound needs parameter {name}")))
}

fn fraction(num: usize, den: usize) -> String {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = gcd(num, den).max(1);
    if den / g == 1 {
        format!("{}", num / g)
    } else {
        format!("{}/{}", num / g, den / g)
    }
}

pub fn formula_bounds(kind: FormulaKind, p: &FormulaParams) -> Result<Vec<BoundLine>> {
    let line = |statement: String, value: Option<f64>, explicit: bool| BoundLine { kind, statement, value, explicit };
    match kind {
        FormulaKind::Hyperbolic => {
            let dim = need(p.dimension, "D", "hyperbolic")?;
            let n = p.n.map(|n| n as f64);
            match dim {
                0 | 1 => Err(Error::Domain(format!("hyperbolic space needs D >= 2, got {dim}"))),
                2 => Ok(vec![
                    line("d = O(log n)".into(), n.map(f64::ln), false),
                    line("k d^2 / log(d)^2 = O(n)".into(), n, false),
                ]),
                _ => {
                    let e = fraction(dim - 2, dim - 1);
                    let ex = (dim - 2) as f64 / (dim - 1) as f64;
                    Ok(vec![
                        line(format!("d = O(n^{{{e}}})"), n.map(|n| n.powf(ex)), false),
                        line(format!("k d^{{{}}} = O(n)", fraction(2, dim - 1)), n, false),
                    ])
                }
            }
        }
        FormulaKind::Genus => {
            let g = need(p.genus, "g", "genus")? as f64;
            let n = need(p.n, "n", "genus")? as f64;
            Ok(vec![
                line("d = O(sqrt(g n))".into(), Some((g * n).sqrt()), false),
                line("k d = O(g n)".into(), Some(g * n), false),
            ])
        }
        FormulaKind::Classical => {
            let n = need(p.n, "n", "classical")?;
            let d = need(p.d_lb, "d_lb", "classical")?;
            let params = p.recurrence.clone().ok_or_else(|| Error::Input("classical bound needs a separator model".into()))?;
            params.validate()?;
            let v = eval_s_d(&params, d, n);
            Ok(vec![line(format!("k = O(S_d(n)), S_d(n) = {v} at n = {n}, d = {d}"), Some(v as f64), false)])
        }
        FormulaKind::Projector => {
            let delta = need(p.delta, "delta", "projector")?;
            let tw = need(p.tw, "tw", "projector")?;
            let v = 8 * delta * delta * tw;
            Ok(vec![line(format!("d <= 8 delta^2 tw = {v}"), Some(v as f64), true)])
        }
    }
}
