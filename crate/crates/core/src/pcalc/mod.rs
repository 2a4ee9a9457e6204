//! Presence-condition calculus.
//!
//! Presence conditions are propositional formulas over the features of a
//! product line. A [`FeatureSpace`] pairs the declared features with the
//! feature model, and decides satisfiability, entailment and equivalence by
//! enumerating the valid configurations. Every valid configuration gets one
//! bit in a [`TruthTable`], so a formula's meaning under the feature model is
//! a single bit vector.

mod normalize;
mod parse;
mod table;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

pub use parse::parse_formula;
pub use table::TruthTable;

use table::Universe;

/// Largest feature count [`FeatureSpace`] enumerates by default.
pub const DEFAULT_MAX_FEATURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PcError {
    #[error("syntax error at offset {position}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        position: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown feature `{name}`{}", .position.map(|p| format!(" at offset {p}")).unwrap_or_default())]
    UnknownFeature {
        name: String,
        position: Option<usize>,
    },
    #[error("invalid feature name `{0}`")]
    InvalidFeatureName(String),
    #[error("duplicate feature `{0}`")]
    DuplicateFeature(String),
    #[error("{count} features exceed the enumeration cap of {cap}")]
    TooManyFeatures { count: usize, cap: usize },
    #[error("configuration {{{0}}} violates the feature model")]
    InvalidConfig(String),
}

/// A declared feature name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Feature(Arc<str>);

impl Feature {
    pub fn new(name: &str) -> Result<Self, PcError> {
        if parse::is_identifier(name) {
            Ok(Feature(Arc::from(name)))
        } else {
            Err(PcError::InvalidFeatureName(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Propositional formula over feature names.
///
/// Children are reference counted so that combining formulas during an
/// analysis shares structure instead of copying it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Var(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(Arc::from(name))
    }

    /// Conjunction, folding `true`/`false` operands.
    pub fn and(&self, other: &Formula) -> Formula {
        match (self, other) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, g) => g.clone(),
            (f, Formula::True) => f.clone(),
            (f, g) => Formula::And(Arc::new(f.clone()), Arc::new(g.clone())),
        }
    }

    /// Disjunction, folding `true`/`false` operands.
    pub fn or(&self, other: &Formula) -> Formula {
        match (self, other) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, g) => g.clone(),
            (f, Formula::False) => f.clone(),
            (f, g) => Formula::Or(Arc::new(f.clone()), Arc::new(g.clone())),
        }
    }

    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            f => Formula::Not(Arc::new(f.clone())),
        }
    }

    pub fn all<'a>(items: impl IntoIterator<Item = &'a Formula>) -> Formula {
        items.into_iter().fold(Formula::True, |acc, f| acc.and(f))
    }

    pub fn any<'a>(items: impl IntoIterator<Item = &'a Formula>) -> Formula {
        items.into_iter().fold(Formula::False, |acc, f| acc.or(f))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    /// Evaluates under `rho`; a variable holds iff it is selected.
    pub fn eval(&self, rho: &Config) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(name) => rho.contains(name),
            Formula::Not(f) => !f.eval(rho),
            Formula::And(f, g) => f.eval(rho) && g.eval(rho),
            Formula::Or(f, g) => f.eval(rho) || g.eval(rho),
        }
    }

    /// Feature names occurring in the formula.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(name) => {
                out.insert(name);
            }
            Formula::Not(f) => f.collect_variables(out),
            Formula::And(f, g) | Formula::Or(f, g) => {
                f.collect_variables(out);
                g.collect_variables(out);
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Var(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(f, g) | Formula::Or(f, g) => 1 + f.size() + g.size(),
        }
    }
}

impl From<bool> for Formula {
    fn from(value: bool) -> Self {
        if value {
            Formula::True
        } else {
            Formula::False
        }
    }
}

/// A feature configuration: the set of selected features.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config(BTreeSet<Arc<str>>);

impl Config {
    pub fn empty() -> Self {
        Config::default()
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.0.contains(feature)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|s| &**s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for Config {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Config(iter.into_iter().map(|s| Arc::from(s.as_ref())).collect())
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Declared features plus the feature model.
#[derive(Debug, Clone)]
pub struct FeatureSpace {
    features: Vec<Feature>,
    positions: HashMap<Arc<str>, usize>,
    feature_model: Formula,
    max_features: usize,
    universe: OnceLock<Result<Arc<Universe>, PcError>>,
}

impl PartialEq for FeatureSpace {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features && self.feature_model == other.feature_model
    }
}

impl FeatureSpace {
    pub fn new(features: Vec<Feature>, feature_model: Formula) -> Result<Self, PcError> {
        let mut positions = HashMap::with_capacity(features.len());
        for (i, feature) in features.iter().enumerate() {
            if positions.insert(feature.0.clone(), i).is_some() {
                return Err(PcError::DuplicateFeature(feature.name().to_string()));
            }
        }
        let space = FeatureSpace {
            features,
            positions,
            feature_model: Formula::True,
            max_features: DEFAULT_MAX_FEATURES,
            universe: OnceLock::new(),
        };
        space.check(&feature_model)?;
        Ok(FeatureSpace {
            feature_model,
            ..space
        })
    }

    /// Builds a space from feature names and a feature model in the concrete syntax.
    pub fn from_names<S: AsRef<str>>(names: &[S], feature_model: &str) -> Result<Self, PcError> {
        let features = names
            .iter()
            .map(|n| Feature::new(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let known: BTreeSet<&str> = names.iter().map(|n| n.as_ref()).collect();
        let fm = parse_formula(feature_model, &|name| known.contains(name))?;
        FeatureSpace::new(features, fm)
    }

    /// Replaces the enumeration cap.
    pub fn with_max_features(mut self, cap: usize) -> Self {
        self.max_features = cap;
        self.universe = OnceLock::new();
        self
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature_model(&self) -> &Formula {
        &self.feature_model
    }

    pub fn max_features(&self) -> usize {
        self.max_features
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.positions.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.positions.contains_key(name)
    }

    /// Checks that every variable of `f` is a declared feature.
    pub fn check(&self, f: &Formula) -> Result<(), PcError> {
        match f.variables().into_iter().find(|v| !self.contains(v)) {
            Some(name) => Err(PcError::UnknownFeature {
                name: name.to_string(),
                position: None,
            }),
            None => Ok(()),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Formula, PcError> {
        parse_formula(text, &|name| self.contains(name))
    }

    /// Parses a comma-separated feature list such as `LDWS,Visual`.
    pub fn parse_config(&self, text: &str) -> Result<Config, PcError> {
        let mut names = Vec::new();
        for raw in text.split(',') {
            let name = raw.trim();
            if name.is_empty() {
                continue;
            }
            if !self.contains(name) {
                return Err(PcError::UnknownFeature {
                    name: name.to_string(),
                    position: None,
                });
            }
            names.push(name);
        }
        Ok(names.into_iter().collect())
    }

    /// Feature names of `rho` joined by commas, in declared order.
    pub fn render_config(&self, rho: &Config) -> String {
        self.features
            .iter()
            .filter(|f| rho.contains(f.name()))
            .map(Feature::name)
            .collect::<Vec<_>>()
            .join(",")
    }

    fn check_config(&self, rho: &Config) -> Result<(), PcError> {
        match rho.iter().find(|name| !self.contains(name)) {
            Some(name) => Err(PcError::UnknownFeature {
                name: name.to_string(),
                position: None,
            }),
            None => Ok(()),
        }
    }

    pub fn eval(&self, f: &Formula, rho: &Config) -> Result<bool, PcError> {
        self.check(f)?;
        self.check_config(rho)?;
        Ok(f.eval(rho))
    }

    /// True iff `rho` uses declared features only and satisfies the feature model.
    pub fn is_valid(&self, rho: &Config) -> Result<bool, PcError> {
        self.eval(&self.feature_model, rho)
    }

    /// Fails with [`PcError::InvalidConfig`] unless `rho` is valid.
    pub fn require_valid(&self, rho: &Config) -> Result<(), PcError> {
        if self.is_valid(rho)? {
            Ok(())
        } else {
            Err(PcError::InvalidConfig(self.render_config(rho)))
        }
    }

    pub(crate) fn universe(&self) -> Result<&Arc<Universe>, PcError> {
        self.universe
            .get_or_init(|| {
                if self.features.len() > self.max_features {
                    return Err(PcError::TooManyFeatures {
                        count: self.features.len(),
                        cap: self.max_features,
                    });
                }
                Ok(Arc::new(Universe::build(self)))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Valid configurations, ordered lexicographically by their feature
    /// lists in declared order.
    pub fn configs(&self) -> Result<Vec<Config>, PcError> {
        let universe = self.universe()?;
        Ok(universe
            .masks()
            .iter()
            .map(|&mask| self.config_from_mask(mask))
            .collect())
    }

    pub fn config_count(&self) -> Result<usize, PcError> {
        Ok(self.universe()?.masks().len())
    }

    pub(crate) fn config_from_mask(&self, mask: u32) -> Config {
        self.features
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, f)| f.name())
            .collect()
    }

    /// Truth table of `f` over the valid configurations, in [`Self::configs`] order.
    pub fn table(&self, f: &Formula) -> Result<TruthTable, PcError> {
        self.universe()?.table(f, self)
    }

    pub fn sat(&self, f: &Formula) -> Result<bool, PcError> {
        Ok(self.table(f)?.any())
    }

    pub fn entails(&self, f: &Formula, g: &Formula) -> Result<bool, PcError> {
        Ok(self.table(f)?.is_subset_of(&self.table(g)?))
    }

    pub fn equiv(&self, f: &Formula, g: &Formula) -> Result<bool, PcError> {
        Ok(self.table(f)? == self.table(g)?)
    }

    /// Canonical sum-of-products form; see [`normalize`].
    pub fn normalize(&self, f: &Formula) -> Result<Formula, PcError> {
        normalize::normalize(self, f)
    }
}

pub fn parse_pc(text: &str, space: &FeatureSpace) -> Result<Formula, PcError> {
    space.parse(text)
}

pub fn eval(f: &Formula, rho: &Config) -> bool {
    f.eval(rho)
}

pub fn configs_of(space: &FeatureSpace) -> Result<Vec<Config>, PcError> {
    space.configs()
}

pub fn sat_under(f: &Formula, space: &FeatureSpace) -> Result<bool, PcError> {
    space.sat(f)
}

pub fn entails_under(f: &Formula, g: &Formula, space: &FeatureSpace) -> Result<bool, PcError> {
    space.entails(f, g)
}

pub fn equiv_under(f: &Formula, g: &Formula, space: &FeatureSpace) -> Result<bool, PcError> {
    space.equiv(f, g)
}

/// Canonical sum-of-products of `f` under the feature model.
///
/// Formulas with the same valid configurations normalize to identical
/// ASTs. Literals within a term follow declared feature order and terms are
/// sorted by their literal sequences.
pub fn normalize(f: &Formula, space: &FeatureSpace) -> Result<Formula, PcError> {
    space.normalize(f)
}
