//! TOML experiment configs and their validation.

use std::fmt;
use std::str::FromStr;

use dilationlab::freeword::{Mode, Word};
use dilationlab::partition::Partition;
use dilationlab::semigroup::ContractionSemigroup;
use dilationlab::{Matrix, C64};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    DilateDiscrete,
    DilateContinuous,
    PolyTransport,
    Chernoff,
    Feynman,
    Monitor,
    Reduce,
    Wordcheck,
    Spectrum,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::DilateDiscrete,
        Experiment::DilateContinuous,
        Experiment::PolyTransport,
        Experiment::Chernoff,
        Experiment::Feynman,
        Experiment::Monitor,
        Experiment::Reduce,
        Experiment::Wordcheck,
        Experiment::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::DilateDiscrete => "dilate-discrete",
            Experiment::DilateContinuous => "dilate-continuous",
            Experiment::PolyTransport => "poly-transport",
            Experiment::Chernoff => "chernoff",
            Experiment::Feynman => "feynman",
            Experiment::Monitor => "monitor",
            Experiment::Reduce => "reduce",
            Experiment::Wordcheck => "wordcheck",
            Experiment::Spectrum => "spectrum",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Experiment::DilateDiscrete | Experiment::Spectrum | Experiment::Monitor => 1e-10,
            Experiment::DilateContinuous => 1e-8,
            Experiment::PolyTransport => 1e-9,
            Experiment::Chernoff | Experiment::Feynman => 1e-2,
            Experiment::Reduce | Experiment::Wordcheck => 1e-12,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<String>,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub depths: Option<Vec<usize>>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub family: FamilySection,
    #[serde(default)]
    pub words: WordsSection,
    #[serde(default)]
    pub partitions: PartitionSection,
    #[serde(default)]
    pub interval: IntervalSection,
    #[serde(default)]
    pub yosida: YosidaSection,
    #[serde(default)]
    pub monitor: MonitorSection,
    #[serde(default)]
    pub reduce: ReduceSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    pub count: Option<usize>,
    /// Singular-value margin of random contractions.
    pub margin: Option<f64>,
    /// Spectral norm of random generators.
    pub norm: Option<f64>,
    /// Explicit matrices, each a list of rows like `"0.5+0i, 0.1-0.2i"`.
    pub matrices: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordsSection {
    pub count: Option<usize>,
    pub max_len: Option<usize>,
    pub max_power: Option<u32>,
    pub max_time: Option<f64>,
    pub mode: Option<String>,
    pub expansions: Option<usize>,
    pub explicit: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    pub uniform: Option<Vec<usize>>,
    pub explicit: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSection {
    pub t: Option<f64>,
    pub s: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YosidaSection {
    pub lambda: Option<f64>,
    pub degree: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSection {
    pub matrix: Option<Vec<String>>,
    /// Rank of a coordinate projection used when no matrix is given.
    pub rank: Option<usize>,
    pub order: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSection {
    pub grid: Option<Vec<f64>>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub depths: Option<Vec<usize>>,
}

/// A problem with a config, located by its field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Clone, Debug)]
pub enum FamilySource {
    Explicit(Vec<Matrix>),
    Random { count: usize, margin: f64, norm: f64 },
}

/// Words given in the config or drawn per cell.
#[derive(Clone, Debug)]
pub enum WordSource<W> {
    Explicit(Vec<W>),
    Random { count: usize, max_len: usize },
}

impl<W> WordSource<W> {
    pub fn count(&self) -> usize {
        match self {
            WordSource::Explicit(w) => w.len(),
            WordSource::Random { count, .. } => *count,
        }
    }
}

/// A validated, runnable configuration.
#[derive(Clone, Debug)]
pub struct Plan {
    pub experiment: Experiment,
    pub dim: usize,
    pub seed: u64,
    pub tol: f64,
    pub depths: Option<Vec<usize>>,
    pub family: FamilySource,
    pub max_power: u32,
    pub max_time: f64,
    /// Letters `(index, power)`.
    pub discrete_words: WordSource<Vec<(usize, u32)>>,
    /// Letters `(index, time)`.
    pub continuous_words: WordSource<Vec<(usize, f64)>>,
    pub free_words: WordSource<Word>,
    pub mode: Mode,
    pub expansions: usize,
    pub partitions: Vec<Partition>,
    pub t: f64,
    pub s: f64,
    pub lambda: f64,
    pub degree: usize,
    pub monitor: Option<Matrix>,
    pub order: usize,
    pub grid: Vec<f64>,
}

pub fn parse_toml(text: &str) -> Result<RawConfig, Diagnostic> {
    toml::from_str(text).map_err(|e| Diagnostic {
        path: "config".into(),
        message: e.message().to_string(),
    })
}

/// Parses one matrix given as rows of comma-separated complex entries.
pub fn parse_matrix(rows: &[String]) -> Result<Matrix, String> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    C64::from_str(tok).map_err(|_| format!("row {i}: `{tok}` is not a complex number"))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(&parsed).map_err(|e| e.to_string())
}

struct Validator {
    diags: Vec<Diagnostic>,
}

impl Validator {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            path: path.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.push(path, format!("must be positive and finite, got {v}"));
        }
    }
}

fn uses_words(e: Experiment) -> bool {
    matches!(
        e,
        Experiment::DilateDiscrete | Experiment::DilateContinuous | Experiment::PolyTransport | Experiment::Wordcheck
    )
}

fn uses_partitions(e: Experiment) -> bool {
    matches!(e, Experiment::Chernoff | Experiment::Feynman | Experiment::Monitor | Experiment::Reduce)
}

/// Members a family must have for experiments that fix it.
fn required_count(e: Experiment) -> Option<usize> {
    match e {
        Experiment::Feynman | Experiment::Reduce => Some(2),
        Experiment::Monitor => Some(1),
        _ => None,
    }
}

/// Returns every problem found; an empty list means the config is runnable.
pub fn validate(experiment: Experiment, raw: &RawConfig, ov: &Overrides) -> Vec<Diagnostic> {
    match build_plan(experiment, raw, ov) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    }
}

pub fn build_plan(experiment: Experiment, raw: &RawConfig, ov: &Overrides) -> Result<Plan, Vec<Diagnostic>> {
    let mut v = Validator { diags: Vec::new() };

    if let Some(name) = &raw.experiment {
        if name != experiment.name() {
            v.push("experiment", format!("config is for `{name}` but `{experiment}` was requested"));
        }
    }

    let tol = ov.tol.or(raw.tol).unwrap_or(experiment.default_tol());
    v.positive("tol", tol);

    let depths = ov.depths.clone().or_else(|| raw.depths.clone());
    if let Some(d) = &depths {
        if d.is_empty() {
            v.push("depths", "must not be empty");
        }
        if d.iter().any(|&m| m < 2) {
            v.push("depths", "every depth M must be at least 2");
        }
    }

    // Family.
    let fam = &raw.family;
    let mut randomized = false;
    let mut dim = raw.dim;
    let family = if let Some(mats) = &fam.matrices {
        let mut parsed = Vec::new();
        for (k, rows) in mats.iter().enumerate() {
            match parse_matrix(rows) {
                Ok(m) => parsed.push(m),
                Err(e) => v.push(format!("family.matrices[{k}]"), e),
            }
        }
        if let Some(first) = parsed.first() {
            let n = first.dim();
            if let Some(d) = raw.dim {
                if d != n {
                    v.push("dim", format!("dim = {d} but family matrices are {n}×{n}"));
                }
            }
            dim = Some(n);
            for (k, m) in parsed.iter().enumerate() {
                if m.dim() != n {
                    v.push(format!("family.matrices[{k}]"), format!("expected {n}×{n}, got {0}×{0}", m.dim()));
                }
            }
        }
        if let Some(c) = fam.count {
            if c != mats.len() {
                v.push("family.count", format!("count = {c} but {} matrices are given", mats.len()));
            }
        }
        if mats.is_empty() {
            v.push("family.matrices", "must not be empty");
        }
        FamilySource::Explicit(parsed)
    } else {
        randomized = true;
        let default_count = if experiment == Experiment::Wordcheck { 3 } else { 2 };
        let count = fam.count.or(required_count(experiment)).unwrap_or(default_count);
        let margin = fam.margin.unwrap_or(0.1);
        let norm = fam.norm.unwrap_or(1.0);
        if count == 0 {
            v.push("family.count", "must be at least 1");
        }
        if !(0.0..1.0).contains(&margin) {
            v.push("family.margin", format!("must lie in [0, 1), got {margin}"));
        }
        v.positive("family.norm", norm);
        FamilySource::Random { count, margin, norm }
    };
    let dim = match dim {
        Some(0) => {
            v.push("dim", "must be at least 1");
            1
        }
        Some(d) => d,
        None => {
            v.push("dim", "required when the family is not given explicitly");
            1
        }
    };
    let family_len = match &family {
        FamilySource::Explicit(m) => m.len(),
        FamilySource::Random { count, .. } => *count,
    };
    if let Some(req) = required_count(experiment) {
        if family_len != req {
            v.push("family", format!("{experiment} needs exactly {req} family members, got {family_len}"));
        }
    }
    if let FamilySource::Explicit(mats) = &family {
        check_explicit_family(experiment, mats, &mut v);
    }

    // Words.
    let w = &raw.words;
    let mode = match w.mode.as_deref() {
        None | Some("monoid") => Mode::Monoid,
        Some("group") => Mode::Group,
        Some(other) => {
            v.push("words.mode", format!("expected `monoid` or `group`, got `{other}`"));
            Mode::Monoid
        }
    };
    if experiment != Experiment::Wordcheck && mode == Mode::Group {
        v.push("words.mode", "only wordcheck evaluates group words");
    }
    let max_power = w.max_power.unwrap_or(3);
    let max_time = w.max_time.unwrap_or(1.0);
    v.positive("words.max_time", max_time);
    let max_len = w.max_len.unwrap_or(4);
    let index_bound = family_len;
    let mut discrete_words = WordSource::Random { count: 0, max_len };
    let mut continuous_words = WordSource::Random { count: 0, max_len };
    let mut free_words = WordSource::Random { count: 0, max_len };
    if uses_words(experiment) {
        if let Some(list) = &w.explicit {
            let mut d = Vec::new();
            let mut c = Vec::new();
            let mut f = Vec::new();
            for (k, text) in list.iter().enumerate() {
                let path = format!("words.explicit[{k}]");
                match Word::parse(text, Mode::Group) {
                    Err(e) => v.push(path, e.to_string()),
                    Ok(word) => {
                        if mode == Mode::Monoid && word.letters().iter().any(|l| l.value < 0.0) {
                            v.push(path, format!("negative time in monoid word `{text}`"));
                            continue;
                        }
                        if let Some(l) = word.letters().iter().find(|l| l.index >= index_bound) {
                            v.push(path, format!("index {} out of range for a family of {index_bound}", l.index));
                            continue;
                        }
                        let mut powers = Vec::new();
                        for l in word.letters() {
                            if experiment == Experiment::DilateDiscrete && l.value.fract() != 0.0 {
                                v.push(path.clone(), format!("power {} in `{text}` is not an integer", l.value));
                            }
                            powers.push((l.index, l.value as u32));
                        }
                        d.push(powers);
                        c.push(word.letters().iter().map(|l| (l.index, l.value)).collect());
                        f.push(Word::parse(text, mode).expect("checked above"));
                    }
                }
            }
            if list.is_empty() {
                v.push("words.explicit", "must not be empty");
            }
            discrete_words = WordSource::Explicit(d);
            continuous_words = WordSource::Explicit(c);
            free_words = WordSource::Explicit(f);
        } else {
            randomized = true;
            let count = w.count.unwrap_or(20);
            if count == 0 {
                v.push("words.count", "must be at least 1");
            }
            if max_len == 0 {
                v.push("words.max_len", "must be at least 1");
            }
            discrete_words = WordSource::Random { count, max_len };
            continuous_words = WordSource::Random { count, max_len };
            free_words = WordSource::Random { count, max_len };
        }
    }
    let expansions = w.expansions.unwrap_or(100);

    // Depth rule for discrete words: exactness needs M ≥ Σn_k + 2.
    if experiment == Experiment::DilateDiscrete {
        if let Some(ds) = &depths {
            let min_depth = ds.iter().copied().min().unwrap_or(2);
            match &discrete_words {
                WordSource::Explicit(words) => {
                    for (k, word) in words.iter().enumerate() {
                        let degree: u32 = word.iter().map(|&(_, p)| p).sum();
                        if (min_depth as u32) < degree + 2 {
                            v.push(
                                "depths",
                                format!(
                                    "M = {min_depth} violates M > Σn_k + 1 (Σn_k = {degree}) for words.explicit[{k}]"
                                ),
                            );
                        }
                    }
                }
                WordSource::Random { max_len, .. } => {
                    let degree = *max_len as u32 * max_power;
                    if (min_depth as u32) < degree + 2 {
                        v.push(
                            "depths",
                            format!(
                                "M = {min_depth} violates M > Σn_k + 1 for random words (Σn_k up to {degree})"
                            ),
                        );
                    }
                }
            }
        }
    }

    // Yosida polynomials.
    let lambda = raw.yosida.lambda.unwrap_or(4.0);
    let degree = raw.yosida.degree.unwrap_or(6);
    if !(lambda > 1.0 && lambda.is_finite()) {
        v.push("yosida.lambda", format!("must exceed 1, got {lambda}"));
    }
    if experiment == Experiment::PolyTransport {
        if let Some(ds) = &depths {
            let letters = match &continuous_words {
                WordSource::Explicit(ws) => ws.iter().map(Vec::len).max().unwrap_or(0),
                WordSource::Random { max_len, .. } => *max_len,
            };
            let min_depth = ds.iter().copied().min().unwrap_or(2);
            if min_depth <= degree * letters + 1 {
                v.push("depths", format!("M = {min_depth} must exceed degree·letters + 1 = {}", degree * letters + 1));
            }
        }
    }

    // Partitions.
    let mut partitions = Vec::new();
    let order = raw.monitor.order.unwrap_or(1);
    if uses_partitions(experiment) {
        let p = &raw.partitions;
        let default_uniform = match experiment {
            Experiment::Chernoff | Experiment::Feynman => vec![64, 128, 256, 512],
            Experiment::Reduce => vec![1, 2, 4],
            _ => vec![2, 4, 8, 16],
        };
        let uniform = if p.uniform.is_none() && p.explicit.is_none() {
            default_uniform
        } else {
            p.uniform.clone().unwrap_or_default()
        };
        for (k, &n) in uniform.iter().enumerate() {
            match Partition::uniform(n) {
                Ok(x) => partitions.push(x),
                Err(e) => v.push(format!("partitions.uniform[{k}]"), e.to_string()),
            }
        }
        for (k, text) in p.explicit.iter().flatten().enumerate() {
            match Partition::parse(text) {
                Ok(x) => partitions.push(x),
                Err(e) => v.push(format!("partitions.explicit[{k}]"), e.to_string()),
            }
        }
        let m = match experiment {
            Experiment::Chernoff => family_len.max(1),
            Experiment::Feynman => 2,
            Experiment::Monitor => order.max(1),
            _ => 1,
        };
        for x in &partitions {
            if x.n() % m != 0 {
                v.push("partitions", format!("N = {} of `{x}` is not a multiple of m = {m}", x.n()));
            }
        }
    }

    // Interval.
    let (t, s) = (raw.interval.t.unwrap_or(1.0), raw.interval.s.unwrap_or(0.0));
    if !(t.is_finite() && s.is_finite() && t >= s) {
        v.push("interval", format!("need finite t ≥ s, got t = {t}, s = {s}"));
    }
    if experiment == Experiment::Reduce && !(0.0 <= s && t <= 1.0) {
        v.push("interval", "reduce runs on the family domain [0, 1]");
    }

    // Monitor.
    let mut monitor = None;
    if experiment == Experiment::Monitor {
        if order == 0 {
            v.push("monitor.order", "must be at least 1");
        }
        match (&raw.monitor.matrix, raw.monitor.rank) {
            (Some(rows), _) => match parse_matrix(rows) {
                Ok(m) if m.dim() != dim => v.push("monitor.matrix", format!("expected {dim}×{dim}, got {0}×{0}", m.dim())),
                Ok(m) if m.pow(order as u32 + 1).dist(&m) > 1e-10 => {
                    v.push("monitor.matrix", format!("X^{{m+1}} ≠ X for m = {order}"))
                }
                Ok(m) => monitor = Some(m),
                Err(e) => v.push("monitor.matrix", e),
            },
            (None, Some(rank)) if rank <= dim => {
                let diag: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
                monitor = Some(Matrix::diag_real(&diag));
            }
            (None, Some(rank)) => v.push("monitor.rank", format!("rank {rank} exceeds dim {dim}")),
            (None, None) => v.push("monitor", "give `matrix` or `rank`"),
        }
    }

    let grid = raw.reduce.grid.clone().unwrap_or_else(|| vec![0.0, 0.5, 1.0]);
    if experiment == Experiment::Reduce {
        if grid.is_empty() || grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
            v.push("reduce.grid", "needs at least one point, all in [0, 1]");
        }
    }

    let seed = ov.seed.or(raw.seed);
    if randomized && seed.is_none() {
        v.push("seed", "required because the config contains randomized fields");
    }

    if !v.diags.is_empty() {
        return Err(v.diags);
    }
    Ok(Plan {
        experiment,
        dim,
        seed: seed.unwrap_or(0),
        tol,
        depths,
        family,
        max_power,
        max_time,
        discrete_words,
        continuous_words,
        free_words,
        mode,
        expansions,
        partitions,
        t,
        s,
        lambda,
        degree,
        monitor,
        order,
        grid,
    })
}

fn check_explicit_family(experiment: Experiment, mats: &[Matrix], v: &mut Validator) {
    for (k, m) in mats.iter().enumerate() {
        let path = format!("family.matrices[{k}]");
        match experiment {
            Experiment::DilateDiscrete | Experiment::Spectrum => {
                let norm = m.op_norm();
                if norm > 1.0 + 1e-12 {
                    v.push(path, format!("not a contraction (norm {norm:.6})"));
                }
            }
            Experiment::Feynman => {
                if (m - &m.adjoint()).op_norm() > 1e-10 {
                    v.push(path, "must be Hermitian");
                }
            }
            Experiment::Reduce if k == 1 => {
                if (m + &m.adjoint()).op_norm() > 1e-10 {
                    v.push(path, "A₁ must be skew-Hermitian");
                }
            }
            _ => {
                if let Err(e) = ContractionSemigroup::new(m.clone()) {
                    v.push(path, e.to_string());
                }
            }
        }
    }
}
