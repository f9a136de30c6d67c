//! Conjectures as violation margins: each maps a graph to `lhs - rhs` of an
//! inequality `lhs <= rhs`, so a positive score refutes it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, invalid, Error, Result};
use crate::graph::{Graph, GraphClass};
use crate::spectral::{
    adjacency_matrix, count_eigenvalues, distance_matrix, eigenvalues_with, gravity_matrix,
    harmonic, inverse_even, mean_of_neighbor_degree_means, positive_eigenvalue_scope,
    randic_index, spectrum_range, temperature_sum, EigenMethod, RangeDefinition, Sign, Spectrum,
    SymMatrix,
};

/// Scores at or below this margin are treated as float noise.
pub const VIOLATION_EPSILON: f64 = 1e-6;

/// Settings a score function may consult.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    pub range: RangeDefinition,
    pub eigen: EigenMethod,
}

impl ScoreOptions {
    pub fn spectrum(&self, m: &SymMatrix) -> Result<Spectrum> {
        eigenvalues_with(m, self.eigen)
    }
}

/// Returns `(lhs, rhs)`, or `None` when an invariant is undefined on the graph.
pub type ScoreFn = Arc<dyn Fn(&Graph, &ScoreOptions) -> Result<Option<(f64, f64)>> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreReport {
    pub lhs: f64,
    pub rhs: f64,
    pub score: f64,
    pub defined: bool,
}

impl ScoreReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let score = lhs - rhs;
        if score.is_nan() {
            return Self::undefined();
        }
        ScoreReport {
            lhs,
            rhs,
            score,
            defined: true,
        }
    }

    pub fn undefined() -> Self {
        ScoreReport {
            lhs: f64::NAN,
            rhs: f64::NAN,
            score: f64::NEG_INFINITY,
            defined: false,
        }
    }
}

#[derive(Clone)]
pub struct Conjecture {
    id: u32,
    statement: String,
    build_class: GraphClass,
    accept_class: GraphClass,
    min_size: usize,
    default_target: usize,
    uses_range: bool,
    options: ScoreOptions,
    score_fn: ScoreFn,
}

impl fmt::Debug for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Conjecture")
            .field("id", &self.id)
            .field("statement", &self.statement)
            .field("build_class", &self.build_class)
            .field("accept_class", &self.accept_class)
            .field("min_size", &self.min_size)
            .field("options", &self.options)
            .finish()
    }
}

impl Conjecture {
    pub fn new(
        id: u32,
        statement: impl Into<String>,
        class: GraphClass,
        min_size: usize,
        score_fn: ScoreFn,
    ) -> Result<Self> {
        if min_size < 2 {
            return Err(invalid(format!("graffiti-{id}: min_size must be at least 2")));
        }
        Ok(Conjecture {
            id,
            statement: statement.into(),
            build_class: class,
            accept_class: class,
            min_size,
            default_target: min_size,
            uses_range: false,
            options: ScoreOptions::default(),
            score_fn,
        })
    }

    /// Size the construction game grows to when none is requested.
    pub fn default_target(&self) -> usize {
        self.default_target
    }

    pub fn with_default_target(mut self, target: usize) -> Self {
        self.default_target = target.max(self.min_size);
        self
    }

    fn with_range_support(mut self) -> Self {
        self.uses_range = true;
        self
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    /// Stable CLI identifier, `graffiti-<id>`.
    pub fn key(&self) -> String {
        format!("graffiti-{}", self.id)
    }

    pub fn statement(&self) -> &str {
        &self.statement
    }

    /// Class the search builds in.
    pub fn graph_class(&self) -> GraphClass {
        self.build_class
    }

    /// Class a counter-example must belong to.
    pub fn accept_class(&self) -> GraphClass {
        self.accept_class
    }

    pub fn min_size(&self) -> usize {
        self.min_size
    }

    /// `Some` only for conjectures that compare against a spectrum range.
    pub fn range_definition(&self) -> Option<RangeDefinition> {
        self.uses_range.then_some(self.options.range)
    }

    pub fn options(&self) -> ScoreOptions {
        self.options
    }

    pub fn with_range_definition(mut self, range: RangeDefinition) -> Self {
        self.options.range = range;
        self
    }

    pub fn with_eigen_method(mut self, eigen: EigenMethod) -> Self {
        self.options.eigen = eigen;
        self
    }

    pub fn with_min_size(mut self, min_size: usize) -> Result<Self> {
        if min_size < 2 {
            return Err(invalid("min_size must be at least 2"));
        }
        self.min_size = min_size;
        self.default_target = self.default_target.max(min_size);
        Ok(self)
    }

    /// Restricts both the build class and the acceptance class.
    pub fn with_class(mut self, class: GraphClass) -> Self {
        self.build_class = class;
        self.accept_class = class;
        self
    }

    /// Variant that builds unrestricted graphs but only accepts
    /// counter-examples from the original class.
    pub fn relaxed(mut self) -> Self {
        self.build_class = GraphClass::Any;
        self
    }

    /// Requires a connected graph on at least two vertices.
    pub fn score(&self, g: &Graph) -> Result<ScoreReport> {
        if g.n() < 2 {
            return Err(domain("conjectures are scored on graphs with n >= 2"));
        }
        if !g.is_connected() {
            return Err(domain("conjectures are scored on connected graphs"));
        }
        Ok(match (self.score_fn)(g, &self.options)? {
            Some((lhs, rhs)) => ScoreReport::new(lhs, rhs),
            None => ScoreReport::undefined(),
        })
    }

    pub fn is_counterexample(&self, g: &Graph) -> bool {
        self.is_counterexample_with(g, VIOLATION_EPSILON)
    }

    pub fn is_counterexample_with(&self, g: &Graph, epsilon: f64) -> bool {
        match self.score(g) {
            Ok(report) => self.accepts(g, &report, epsilon),
            Err(_) => false,
        }
    }

    /// Decision on an already computed report of `g`.
    pub fn accepts(&self, g: &Graph, report: &ScoreReport, epsilon: f64) -> bool {
        report.defined
            && report.score > epsilon
            && g.n() >= self.min_size
            && g.is_connected()
            && self.accept_class.contains(g)
    }
}

fn adjacency_spectrum(g: &Graph, o: &ScoreOptions) -> Result<Spectrum> {
    o.spectrum(&adjacency_matrix(g))
}

fn score_fn<F>(f: F) -> ScoreFn
where
    F: Fn(&Graph, &ScoreOptions) -> Result<Option<(f64, f64)>> + Send + Sync + 'static,
{
    Arc::new(f)
}

/// The conjectures whose inequalities are fully stated, keyed by id.
pub fn list_conjectures() -> Vec<Conjecture> {
    let c = |id, statement: &str, class, min, f| Conjecture::new(id, statement, class, min, f).expect("builtin");
    vec![
        c(29, "randic index <= # negative eigenvalues", GraphClass::Any, 7, score_fn(|g, o| {
            let s = adjacency_spectrum(g, o)?;
            let neg = count_eigenvalues(&s, Sign::Negative, s.zero_tolerance());
            Ok(Some((randic_index(g), neg as f64)))
        }))
        .with_default_target(10),
        c(30, "# positive distance eigenvalues <= sum of temperatures", GraphClass::Any, 12, score_fn(|g, o| {
            let s = o.spectrum(&distance_matrix(g)?)?;
            let pos = count_eigenvalues(&s, Sign::Positive, s.zero_tolerance());
            Ok(Some((pos as f64, temperature_sum(g))))
        }))
        .with_default_target(15),
        c(137, "second largest eigenvalue <= harmonic", GraphClass::Any, 67, score_fn(|g, o| {
            let s = adjacency_spectrum(g, o)?;
            Ok(s.second_largest().map(|l2| (l2, harmonic(g))))
        })),
        c(139, "- second smallest eigenvalue <= harmonic", GraphClass::Any, 50, score_fn(|g, o| {
            let s = adjacency_spectrum(g, o)?;
            Ok(s.second_smallest().map(|l| (-l, harmonic(g))))
        })),
        c(197, "- second smallest eigenvalue <= range of eigenvalues of gravity matrix", GraphClass::TriangleFree, 17, score_fn(|g, o| {
            let s = adjacency_spectrum(g, o)?;
            let gravity = o.spectrum(&gravity_matrix(g)?)?;
            let range = spectrum_range(&gravity, o.range)?;
            Ok(s.second_smallest().map(|l| (-l, range)))
        }))
        .with_range_support()
        .with_default_target(25),
        c(289, "second largest eigenvalue <= mean of the mean of adjacent vertex degrees", GraphClass::GirthAtLeast5, 20, score_fn(|g, o| {
            let s = adjacency_spectrum(g, o)?;
            let rhs = mean_of_neighbor_degree_means(g)?;
            Ok(s.second_largest().map(|l2| (l2, rhs)))
        })),
        c(301, "scope of positive eigenvalues <= harmonic", GraphClass::Tree, 14, score_fn(|g, o| {
            let s = adjacency_spectrum(g, o)?;
            Ok(positive_eigenvalue_scope(&s).map(|scope| (scope, harmonic(g))))
        })),
        c(322, "inverse even <= range of eigenvalues of distance matrix", GraphClass::TriangleFree, 4, score_fn(|g, o| {
            let Some(inv) = inverse_even(g)? else {
                return Ok(None);
            };
            let s = o.spectrum(&distance_matrix(g)?)?;
            Ok(Some((inv, spectrum_range(&s, o.range)?)))
        }))
        .with_range_support()
        .with_default_target(10),
    ]
}

/// Immutable-after-setup lookup table of conjectures.
#[derive(Debug, Clone)]
pub struct Registry {
    conjectures: BTreeMap<u32, Conjecture>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            conjectures: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        for c in list_conjectures() {
            r.register(c).expect("builtin ids are unique");
        }
        r
    }

    pub fn register(&mut self, conjecture: Conjecture) -> Result<()> {
        if self.conjectures.contains_key(&conjecture.id) {
            return Err(invalid(format!("{} is already registered", conjecture.key())));
        }
        self.conjectures.insert(conjecture.id, conjecture);
        Ok(())
    }

    /// Accepts `graffiti-197` or `197`.
    pub fn get(&self, key: &str) -> Result<&Conjecture> {
        let id = key
            .trim()
            .strip_prefix("graffiti-")
            .unwrap_or(key.trim())
            .parse::<u32>()
            .map_err(|_| Error::NotFound(format!("no conjecture named {key:?}")))?;
        self.conjectures
            .get(&id)
            .ok_or_else(|| Error::NotFound(format!("graffiti-{id} is not registered")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Conjecture> {
        self.conjectures.values()
    }

    pub fn len(&self) -> usize {
        self.conjectures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjectures.is_empty()
    }
}
