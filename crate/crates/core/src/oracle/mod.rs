//! Brute-force lifting checks.
//!
//! For every valid configuration the lifted result is projected and
//! compared with the single-product algorithm run on the projected inputs.
//! Intermediate sets are compared the same way, so a faulty stage is
//! reported even when the final annotations happen to agree.

mod random;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::Serialize;

use crate::cia::{gsn_ia, run_lifted, CiaError, Lifted, LiftedStages};
use crate::exec::Execution;
use crate::model::{validate, Annotation, Diagnostic, ElemId, SplInputs};
use crate::pcalc::{Config, FeatureSpace, PcError};
use crate::slicer::SlicerConfig;
use crate::vset::{PlainSet, Project};

pub use random::{gen_random_inputs, Limits};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("inputs failed validation with {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    ValidationFailed(Vec<Diagnostic>),
    #[error(transparent)]
    Pc(#[from] PcError),
    #[error("analysis failed at {config}: {source}")]
    Analysis { config: String, source: CiaError },
}

/// Plain annotation map as a set of `(element, annotation)` pairs. A
/// correct result has exactly one pair per element.
pub type PlainAnnotations = PlainSet<(ElemId, Annotation)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotationDiff {
    pub id: ElemId,
    pub expected: Vec<Annotation>,
    pub actual: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigRecord {
    pub rho: Config,
    /// `rho` rendered in declared feature order.
    pub label: String,
    pub lifted_projected: PlainAnnotations,
    pub single_product: PlainAnnotations,
    pub diff: Vec<AnnotationDiff>,
    /// Intermediate sets whose projection differs from the product run.
    pub stage_mismatches: Vec<&'static str>,
}

impl ConfigRecord {
    pub fn matches(&self) -> bool {
        self.diff.is_empty() && self.stage_mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationReport {
    pub configs: Vec<ConfigRecord>,
}

impl CommutationReport {
    pub fn overall(&self) -> bool {
        self.configs.iter().all(ConfigRecord::matches)
    }

    pub fn matching(&self) -> usize {
        self.configs.iter().filter(|r| r.matches()).count()
    }

    pub fn first_failure(&self) -> Option<&ConfigRecord> {
        self.configs.iter().find(|r| !r.matches())
    }

    pub fn to_json(&self) -> String {
        let report = ReportJson {
            overall: self.overall(),
            configs: self
                .configs
                .iter()
                .map(|r| RecordJson {
                    config: &r.label,
                    matches: r.matches(),
                    lifted_projected: by_element(&r.lifted_projected),
                    single_product: by_element(&r.single_product),
                    diff: &r.diff,
                    stage_mismatches: &r.stage_mismatches,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    overall: bool,
    configs: Vec<RecordJson<'a>>,
}

#[derive(Serialize)]
struct RecordJson<'a> {
    config: &'a str,
    #[serde(rename = "match")]
    matches: bool,
    lifted_projected: BTreeMap<&'a str, Vec<Annotation>>,
    single_product: BTreeMap<&'a str, Vec<Annotation>>,
    diff: &'a [AnnotationDiff],
    stage_mismatches: &'a [&'static str],
}

fn by_element(set: &PlainAnnotations) -> BTreeMap<&str, Vec<Annotation>> {
    let mut out: BTreeMap<&str, Vec<Annotation>> = BTreeMap::new();
    for (id, a) in set {
        out.entry(id.as_str()).or_default().push(*a);
    }
    out
}

fn diff(expected: &PlainAnnotations, actual: &PlainAnnotations) -> Vec<AnnotationDiff> {
    let ids: BTreeSet<&ElemId> = expected.iter().chain(actual).map(|(id, _)| id).collect();
    let of = |set: &PlainAnnotations, id: &ElemId| -> Vec<Annotation> {
        set.iter()
            .filter(|(g, _)| g == id)
            .map(|(_, a)| *a)
            .collect()
    };
    ids.into_iter()
        .filter_map(|id| {
            let e = of(expected, id);
            let a = of(actual, id);
            (e != a).then(|| AnnotationDiff {
                id: id.clone(),
                expected: e,
                actual: a,
            })
        })
        .collect()
}

pub fn check_commutation(
    inputs: &SplInputs,
    config: &SlicerConfig,
) -> Result<CommutationReport, OracleError> {
    check_commutation_with(inputs, config, &Lifted, Execution::default())
}

/// Runs the lifted pipeline built from `stages` once, then checks every
/// valid configuration against the single-product pipeline.
pub fn check_commutation_with(
    inputs: &SplInputs,
    config: &SlicerConfig,
    stages: &dyn LiftedStages,
    exec: Execution,
) -> Result<CommutationReport, OracleError> {
    let diagnostics = validate(inputs);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(OracleError::ValidationFailed(diagnostics));
    }
    let space = &inputs.space;
    let configs = space.configs()?;
    let (result, trace) =
        run_lifted(inputs, config, stages).map_err(|source| OracleError::Analysis {
            config: "lifted".into(),
            source,
        })?;
    let records = exec.map(&configs, |rho| {
        let label = space.render_config(rho);
        let (plain, plain_trace) =
            gsn_ia(&inputs.project(rho), config).map_err(|source| OracleError::Analysis {
                config: label.clone(),
                source,
            })?;
        let single_product: PlainAnnotations = plain.into_iter().collect();
        let lifted_projected = result.project(rho);
        Ok(ConfigRecord {
            rho: rho.clone(),
            diff: diff(&single_product, &lifted_projected),
            stage_mismatches: plain_trace.differences(&trace.project(rho)),
            label,
            lifted_projected,
            single_product,
        })
    });
    Ok(CommutationReport {
        configs: records.into_iter().collect::<Result<_, OracleError>>()?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignCase {
    pub seed: u64,
    pub report: CommutationReport,
}

/// Generates one input per seed and checks each. Seeds run under `exec`;
/// the configurations of a single seed are checked sequentially.
pub fn run_campaign(
    seeds: Range<u64>,
    limits: &Limits,
    config: &SlicerConfig,
    exec: Execution,
) -> Result<Vec<CampaignCase>, OracleError> {
    let seeds: Vec<u64> = seeds.collect();
    exec.map(&seeds, |&seed| {
        let inputs = gen_random_inputs(seed, limits);
        let report = check_commutation_with(&inputs, config, &Lifted, Execution::Sequential)?;
        Ok(CampaignCase { seed, report })
    })
    .into_iter()
    .collect()
}

/// True when projecting `lifted(input)` agrees with `plain` applied to the
/// projected input, for every valid configuration of `space`. False also
/// when the configurations cannot be enumerated.
pub fn commutes<A, B>(
    space: &FeatureSpace,
    input: &A,
    lifted: impl Fn(&A) -> B,
    plain: impl Fn(&A::Product) -> B::Product,
) -> bool
where
    A: Project,
    B: Project,
    B::Product: PartialEq,
{
    let Ok(configs) = space.configs() else {
        return false;
    };
    let out = lifted(input);
    configs
        .iter()
        .all(|rho| out.project(rho) == plain(&input.project(rho)))
}

/// Checks that `g_lifted ∘ f_lifted` lifts `g_plain ∘ f_plain` on `input`.
pub fn check_composition<A, B, C>(
    space: &FeatureSpace,
    input: &A,
    f_lifted: impl Fn(&A) -> B,
    f_plain: impl Fn(&A::Product) -> B::Product,
    g_lifted: impl Fn(&B) -> C,
    g_plain: impl Fn(&B::Product) -> C::Product,
) -> bool
where
    A: Project,
    B: Project,
    C: Project,
    C::Product: PartialEq,
{
    commutes(
        space,
        input,
        |a| g_lifted(&f_lifted(a)),
        |p| g_plain(&f_plain(p)),
    )
}
