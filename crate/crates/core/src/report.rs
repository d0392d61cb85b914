//! End-to-end analysis of a stabilizer code into a [`BoundsReport`].

use serde::Serialize;

use crate::analysis::{
    best_treewidth_upper, exact_treewidth, treewidth_lower_bound, SeparatorConfig, SeparatorStrategy,
};
use crate::bounds::{
    dimension_bound, distance_bound, formula_bounds, iterate_s_d, transversal_level_empirical,
    transversal_level_formula, BoundLine, FormulaKind, FormulaParams, RecurrenceParams, SSpec, TransversalLevel,
};
use crate::code::{brute_distance, StabilizerCode};
use crate::error::{Error, Result};
use crate::graph::build_connectivity;

pub const SCHEMA: &str = "bounds-report/1";

/// Search-node budget for exact treewidth inside the analysis pipeline.
pub const EXACT_TREEWIDTH_BUDGET: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Heuristic,
    Formula,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tagged<T> {
    pub value: T,
    pub provenance: Provenance,
}

fn tag<T>(value: T, provenance: Provenance) -> Tagged<T> {
    Tagged { value, provenance }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub alpha: f64,
    pub exact_tw_max: usize,
    pub exact_sep_max: usize,
    pub brute_distance_cap: usize,
    pub strategy: SeparatorStrategy,
    pub seed: u64,
    pub output_format: OutputFormat,
    /// Separator exponent `c` for the closed-form transversal level.
    pub sep_exponent: Option<f64>,
    /// Distance exponent for the closed-form transversal level.
    pub dist_exponent: Option<f64>,
    pub hyperbolic_dim: Option<usize>,
    pub genus: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            exact_tw_max: 20,
            exact_sep_max: 16,
            brute_distance_cap: 4,
            strategy: SeparatorStrategy::BfsLayering,
            seed: 0,
            output_format: OutputFormat::Json,
            sep_exponent: None,
            dist_exponent: None,
            hyperbolic_dim: None,
            genus: None,
        }
    }
}

impl AnalysisConfig {
    pub fn separator_config(&self) -> SeparatorConfig {
        SeparatorConfig { alpha: self.alpha, strategy: self.strategy, seed: self.seed, exact_max: self.exact_sep_max }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TripartitionSizes {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub schema: &'static str,
    pub code: String,
    pub alpha: f64,
    pub seed: u64,
    pub n: Tagged<usize>,
    pub k_actual: Tagged<usize>,
    pub m: Tagged<usize>,
    pub delta: Tagged<usize>,
    pub tw_lower: Tagged<usize>,
    pub tw_upper: Tagged<usize>,
    pub d_brute: Option<Tagged<usize>>,
    /// Distance lower bound fed to the partition bounds.
    pub d_lower: Tagged<usize>,
    pub d_upper_treewidth: Tagged<usize>,
    pub k_upper_partition: Tagged<usize>,
    pub tripartition: TripartitionSizes,
    #[serde(rename = "R_empirical")]
    pub r_empirical: Option<Tagged<usize>>,
    #[serde(rename = "R_iterated")]
    pub r_iterated: Option<Tagged<usize>>,
    #[serde(rename = "R_formula")]
    pub r_formula: Option<Tagged<usize>>,
    pub alpha_dist: Option<f64>,
    pub formula_evaluations: Vec<BoundLine>,
    pub notes: Vec<String>,
}

/// Runs every analysis and cross-checks the results. Any violated
/// guarantee is an [`Error::Inconsistency`].
pub fn analyze(code: &StabilizerCode, cfg: &AnalysisConfig) -> Result<BoundsReport> {
    crate::analysis::separator::check_alpha(cfg.alpha)?;
    let n = code.n();
    let k = code.k();
    let g = build_connectivity(code);
    let delta = g.max_degree();
    let sep_cfg = cfg.separator_config();
    let mut notes = Vec::new();

    let tw_lower = treewidth_lower_bound(&g);
    let (tw_upper, tw_prov) = if n <= cfg.exact_tw_max {
        let (tw, _) = exact_treewidth(&g, cfg.exact_tw_max, EXACT_TREEWIDTH_BUDGET)?;
        (tw, Provenance::Exact)
    } else {
        (best_treewidth_upper(&g).0, Provenance::Heuristic)
    };
    let tw_lower = if tw_prov == Provenance::Exact { tag(tw_upper, Provenance::Exact) } else { tag(tw_lower, Provenance::Heuristic) };

    let d_upper = distance_bound(tw_upper, delta);
    let (d_brute, d_lb) = if k == 0 {
        notes.push("k = 0: the code has no logical operators, distance is undefined".into());
        (None, 1)
    } else {
        let bd = brute_distance(code, cfg.brute_distance_cap);
        if bd.exact().is_none() {
            notes.push(format!("no logical operator of weight <= {}; distance lower bound only", cfg.brute_distance_cap));
        }
        (bd.exact(), bd.lower_bound())
    };
    if let Some(d) = d_brute {
        if d > d_upper {
            return Err(Error::Inconsistency(format!("distance {d} exceeds the treewidth bound {d_upper}")));
        }
    }

    let dim = dimension_bound(&g, code, d_lb, &sep_cfg)?;
    let used_heuristic = [&dim.first, &dim.second]
        .into_iter()
        .flatten()
        .any(|p| p.split_tree.iter().any(|r| r.size > cfg.exact_sep_max));
    let part_prov = if used_heuristic { Provenance::Heuristic } else { Provenance::Exact };
    if dim.k_upper < k {
        return Err(Error::Inconsistency(format!("k = {k} exceeds partition bound {}", dim.k_upper)));
    }

    let (r_empirical, r_iterated) = match transversal_level_empirical(&g, code, d_lb, &sep_cfg)? {
        TransversalLevel::NotApplicable => {
            notes.push("transversal level not applicable for distance lower bound 1".into());
            (None, None)
        }
        TransversalLevel::Level { r, observed, .. } => {
            notes.push(format!("transversal level holds for any code with d >= {d_lb}"));
            let params = RecurrenceParams { s_spec: SSpec::envelope(observed), c_alpha: 1.0, alpha: cfg.alpha };
            let iterated = iterate_s_d(&params, d_lb, n, 64);
            if let Some(ri) = iterated {
                if r > ri {
                    return Err(Error::Inconsistency(format!("empirical level {r} exceeds iterated recurrence {ri}")));
                }
            }
            (Some(tag(r, part_prov)), iterated.map(|v| tag(v, Provenance::Formula)))
        }
    };
    let r_formula = match (cfg.sep_exponent, cfg.dist_exponent) {
        (Some(c), Some(a)) => Some(tag(transversal_level_formula(c, a)?, Provenance::Formula)),
        (None, None) => None,
        _ => return Err(Error::Input("closed-form level needs both separator and distance exponents".into())),
    };

    let mut formula_evaluations =
        formula_bounds(FormulaKind::Projector, &FormulaParams { delta: Some(delta), tw: Some(tw_upper), ..Default::default() })?;
    if let Some(dimension) = cfg.hyperbolic_dim {
        formula_evaluations.extend(formula_bounds(
            FormulaKind::Hyperbolic,
            &FormulaParams { dimension: Some(dimension), n: Some(n), ..Default::default() },
        )?);
    }
    if let Some(genus) = cfg.genus {
        formula_evaluations
            .extend(formula_bounds(FormulaKind::Genus, &FormulaParams { genus: Some(genus), n: Some(n), ..Default::default() })?);
    }

    Ok(BoundsReport {
        schema: SCHEMA,
        code: code.name().to_string(),
        alpha: cfg.alpha,
        seed: cfg.seed,
        n: tag(n, Provenance::Exact),
        k_actual: tag(k, Provenance::Exact),
        m: tag(code.m(), Provenance::Exact),
        delta: tag(delta, Provenance::Exact),
        tw_lower,
        tw_upper: tag(tw_upper, tw_prov),
        d_brute: d_brute.map(|d| tag(d, Provenance::BruteForce)),
        d_lower: tag(d_lb, Provenance::BruteForce),
        d_upper_treewidth: tag(d_upper, tw_prov),
        k_upper_partition: tag(dim.k_upper, part_prov),
        tripartition: TripartitionSizes { a: dim.witness.a.len(), b: dim.witness.b.len(), c: dim.witness.c.len() },
        r_empirical,
        r_iterated,
        r_formula,
        alpha_dist: cfg.dist_exponent,
        formula_evaluations,
        notes,
    })
}

impl BoundsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        fn show<T: std::fmt::Display>(t: &Tagged<T>) -> String {
            let p = serde_json::to_value(t.provenance).expect("provenance serializes");
            format!("{} ({})", t.value, p.as_str().unwrap_or_default())
        }
        let opt = |t: &Option<Tagged<usize>>| t.as_ref().map_or("-".to_string(), show);
        let mut out = format!("{} [{}]\n", self.code, self.schema);
        out += &format!("n = {}, k = {}, m = {}, delta = {}\n", self.n.value, self.k_actual.value, self.m.value, self.delta.value);
        out += &format!("treewidth: {} <= tw <= {}\n", show(&self.tw_lower), show(&self.tw_upper));
        out += &format!("distance: brute {}, lower {}, upper {}\n", opt(&self.d_brute), show(&self.d_lower), show(&self.d_upper_treewidth));
        out += &format!(
            "dimension: k <= {} from |A|={}, |B|={}, |C|={}\n",
            show(&self.k_upper_partition),
            self.tripartition.a,
            self.tripartition.b,
            self.tripartition.c
        );
        out += &format!(
            "transversal level: empirical {}, iterated {}, formula {}\n",
            opt(&self.r_empirical),
            opt(&self.r_iterated),
            opt(&self.r_formula)
        );
        for line in &self.formula_evaluations {
            let value = line.value.map_or(String::new(), |v| format!(" [{v}]"));
            let kind = if line.explicit { "explicit" } else { "asymptotic" };
            out += &format!("{kind}: {}{value}\n", line.statement);
        }
        for note in &self.notes {
            out += &format!("note: {note}\n");
        }
        out
    }
}

/// Process exit status for an error: 2 for bad input, 3 for exhausted
/// budgets, 4 for violated invariants, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Input(_) | Error::Domain(_) | Error::Json(_) => 2,
        Error::Budget(_) => 3,
        Error::Inconsistency(_) => 4,
        Error::Precondition(_) | Error::Io(_) => 1,
    }
}
