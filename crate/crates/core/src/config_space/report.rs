use serde::Serialize;

use super::{
    build_config_complex, cn_graphs, components, has_n_cycle, perfectness_check, sn_action_on_components, PointCloud,
    DEFAULT_NODE_BUDGET,
};
use crate::divided_diff::{regularity_verdict, Regularity, RegularityVerdict, VerdictThresholds};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::operators::SpectralDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreserverFamily {
    Conjugation,
    TransposeConjugation,
    /// The eversion map on semisimple operators.
    Exotic,
    /// Its continuous extension to all operators with spectrum in the set.
    ExtendedExotic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleFamilies {
    pub normal: Vec<PreserverFamily>,
    pub semisimple: Vec<PreserverFamily>,
    pub general: Vec<PreserverFamily>,
}

impl AdmissibleFamilies {
    pub fn for_regularity(verdict: Regularity) -> Self {
        use PreserverFamily::*;
        let base = vec![Conjugation, TransposeConjugation];
        let mut semisimple = base.clone();
        if verdict >= Regularity::BNotC {
            semisimple.push(Exotic);
        }
        let mut general = base.clone();
        if verdict == Regularity::C {
            general.push(ExtendedExotic);
        }
        AdmissibleFamilies { normal: base, semisimple, general }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub node_budget: u64,
    pub thresholds: VerdictThresholds,
    pub exec: Exec,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { node_budget: DEFAULT_NODE_BUDGET, thresholds: VerdictThresholds::default(), exec: Exec::default() }
    }
}

impl ReportOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.thresholds.probe.seed = seed;
        self
    }
}

/// Joint verdict on the classification hypotheses and the regularity of
/// conjugation. Field names are part of the JSON output format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub domain: String,
    pub n: usize,
    pub points: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub perfect: bool,
    /// 0-based indices of points without an `epsilon`-neighbor.
    pub isolated_points: Vec<usize>,
    pub nodes: u64,
    pub components: usize,
    pub component_sizes: Vec<u64>,
    pub transitive: bool,
    pub free: bool,
    pub isotropy_orders: Vec<usize>,
    pub configuration_space_connected: bool,
    /// Edges of each component's coincidence graph, 1-based.
    pub gamma_edges: Vec<Vec<[usize; 2]>>,
    pub all_gamma_have_n_cycle: bool,
    pub regularity: &'static str,
    pub regularity_is_heuristic: bool,
    pub max_growth_decades: f64,
    pub hypotheses_hold: bool,
    pub theorems_applicable: bool,
    /// Perfect set with connected configuration space, the alternative
    /// hypothesis; reported alongside, not identified with the one above.
    pub connected_variant_holds: bool,
    pub violated: Vec<String>,
    pub warnings: Vec<String>,
    /// `None` when the theorems do not apply.
    pub families: Option<AdmissibleFamilies>,
}

impl RegimeReport {
    pub fn phi_admissible_semisimple(&self) -> bool {
        self.families.as_ref().is_some_and(|f| f.semisimple.contains(&PreserverFamily::Exotic))
    }

    pub fn phi_admissible_general(&self) -> bool {
        self.families.as_ref().is_some_and(|f| f.general.contains(&PreserverFamily::ExtendedExotic))
    }
}

/// Builds the configuration model of `cloud`, checks the hypotheses of the
/// classification theorems, runs the regularity verdict for conjugation on
/// `domain`, and names the admissible preserver families.
pub fn hypothesis_report(
    cloud: &PointCloud,
    domain: &SpectralDomain,
    n: usize,
    options: &ReportOptions,
) -> Result<RegimeReport> {
    hypothesis_report_with_evidence(cloud, domain, n, options).map(|(r, _)| r)
}

/// [`hypothesis_report`] together with the probe evidence behind its
/// regularity verdict. A domain the probes cannot sample gives regularity
/// `undetermined` and no evidence.
pub fn hypothesis_report_with_evidence(
    cloud: &PointCloud,
    domain: &SpectralDomain,
    n: usize,
    options: &ReportOptions,
) -> Result<(RegimeReport, Option<RegularityVerdict>)> {
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let mut warnings = Vec::new();
    let mut violated = Vec::new();
    if n < 3 {
        warnings.push(format!("n = {n} is below the range n >= 3 covered by the classification theorems"));
    }

    let perfectness = perfectness_check(cloud);
    if !perfectness.perfect {
        violated.push("set is not perfect at cloud resolution".to_string());
    }

    let complex = build_config_complex(cloud, n, options.node_budget)?;
    let decomp = components(&complex, options.exec);
    let action = sn_action_on_components(&complex, &decomp)?;
    if !action.transitive {
        violated.push("symmetric group does not act transitively on components".to_string());
    }
    if action.free {
        violated.push("action is free (trivial isotropy)".to_string());
    }

    let graphs = cn_graphs(&complex, &decomp, options.exec)?;
    let mut all_cycles = true;
    for g in &graphs {
        all_cycles &= has_n_cycle(g)?;
    }
    if !all_cycles {
        violated.push("some coincidence graph has no n-cycle".to_string());
    }

    let verdict = match regularity_verdict(domain, n, &options.thresholds) {
        Ok(v) => Some(v),
        Err(Error::Sampler(msg)) => {
            warnings.push(format!("regularity undetermined: {msg}"));
            None
        }
        Err(e) => return Err(e),
    };
    let hypotheses_hold = violated.is_empty();
    let theorems_applicable = hypotheses_hold && n >= 3;
    if !theorems_applicable {
        warnings.push("classification theorems not applicable".to_string());
    }
    let regularity = verdict.as_ref().map(|v| v.verdict);

    let report = RegimeReport {
        domain: domain.kind().to_string(),
        n,
        points: cloud.len(),
        epsilon: cloud.epsilon(),
        delta: cloud.delta(),
        perfect: perfectness.perfect,
        isolated_points: perfectness.offenders,
        nodes: complex.node_count(),
        components: decomp.count(),
        component_sizes: decomp.sizes(),
        transitive: action.transitive,
        free: action.free,
        isotropy_orders: action.isotropy.iter().map(Vec::len).collect(),
        configuration_space_connected: decomp.count() == 1,
        gamma_edges: graphs.iter().map(|g| g.edges.iter().map(|&(i, j)| [i + 1, j + 1]).collect()).collect(),
        all_gamma_have_n_cycle: all_cycles,
        regularity: regularity.map_or("undetermined", |r| r.as_str()),
        regularity_is_heuristic: true,
        max_growth_decades: verdict
            .as_ref()
            .map_or(0.0, |v| v.evidence.iter().map(|e| e.growth_decades).fold(0.0, f64::max)),
        hypotheses_hold,
        theorems_applicable,
        connected_variant_holds: perfectness.perfect && decomp.count() == 1,
        violated,
        warnings,
        families: regularity.filter(|_| theorems_applicable).map(AdmissibleFamilies::for_regularity),
    };
    Ok((report, verdict))
}
