//! Words over free products of copies of `ℝ` (group mode) or `ℝ≥0` (monoid mode).
//!
//! A word `(i_1, x_1)⋯(i_N, x_N)` presents `ι_{i_1}(x_1)⋯ι_{i_N}(x_N)`. Reduction
//! drops zero letters and merges neighbours with equal index until the word is
//! bubble-swap free with nonzero values, which is the unique minimal representation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::dilation::{ContinuousFreeDilation, WordDilation};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::random::rng;
use crate::semigroup::ContractionSemigroup;

/// Letter values with `|x|` at or below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `ℝ^{⊛I}`: values of any sign.
    Group,
    /// `ℝ≥0^{⊛I}`: non-negative values.
    Monoid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Letter {
    pub index: usize,
    pub value: f64,
}

impl Letter {
    pub fn new(index: usize, value: f64) -> Self {
        Self { index, value }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Word {
    letters: Vec<Letter>,
    mode: Mode,
}

/// No two adjacent indices are equal.
pub fn is_bubble_swap_free(indices: &[usize]) -> bool {
    indices.windows(2).all(|w| w[0] != w[1])
}

/// Snapshot `(N, indices, values)` of one reduction stage.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub len: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Word {
    pub fn new(letters: Vec<Letter>, mode: Mode) -> Result<Self> {
        for l in &letters {
            if !l.value.is_finite() {
                return Err(Error::InvalidArgument(format!("letter value {} is not finite", l.value)));
            }
            if mode == Mode::Monoid && l.value < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "negative value {} in a monoid word",
                    l.value
                )));
            }
        }
        Ok(Self { letters, mode })
    }

    /// Builds a word from `(index, value)` pairs.
    pub fn from_pairs(pairs: &[(usize, f64)], mode: Mode) -> Result<Self> {
        Self::new(pairs.iter().map(|&(i, x)| Letter::new(i, x)).collect(), mode)
    }

    pub fn empty(mode: Mode) -> Self {
        Self {
            letters: Vec::new(),
            mode,
        }
    }

    /// Parses whitespace-separated `i:x` tokens, e.g. `1:0.5 2:0.3 1:0.2`.
    pub fn parse(s: &str, mode: Mode) -> Result<Self> {
        let letters = s
            .split_whitespace()
            .map(|tok| {
                let (i, x) = tok
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidArgument(format!("letter `{tok}` is not of the form i:x")))?;
                let index = i
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidArgument(format!("letter `{tok}`: bad index: {e}")))?;
                let value = x
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("letter `{tok}`: bad value: {e}")))?;
                Ok(Letter::new(index, value))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters, mode)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.letters.iter().map(|l| l.index).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.letters.iter().map(|l| l.value).collect()
    }

    /// Bubble-swap free with no zero-valued letters.
    pub fn is_minimal(&self) -> bool {
        is_bubble_swap_free(&self.indices()) && self.letters.iter().all(|l| l.value.abs() > ZERO_TOL)
    }

    fn snapshot(&self) -> TraceEntry {
        TraceEntry {
            len: self.len(),
            indices: self.indices(),
            values: self.values(),
        }
    }

    /// Minimal representation.
    pub fn reduce(&self) -> Word {
        self.reduce_with_trace().0
    }

    /// Minimal representation plus every intermediate representation.
    ///
    /// Each step removes the first zero letter if there is one, and otherwise merges
    /// the first pair of neighbours with equal index.
    pub fn reduce_with_trace(&self) -> (Word, Vec<TraceEntry>) {
        let mut cur = self.letters.clone();
        let mut trace = vec![self.snapshot()];
        loop {
            if let Some(k) = cur.iter().position(|l| l.value.abs() <= ZERO_TOL) {
                cur.remove(k);
            } else if let Some(k) = (0..cur.len().saturating_sub(1)).find(|&k| cur[k].index == cur[k + 1].index) {
                let merged = cur[k].value + cur[k + 1].value;
                cur[k].value = merged;
                cur.remove(k + 1);
            } else {
                break;
            }
            let w = Word {
                letters: cur.clone(),
                mode: self.mode,
            };
            trace.push(w.snapshot());
        }
        (
            Word {
                letters: cur,
                mode: self.mode,
            },
            trace,
        )
    }

    /// Product in the free product: concatenation followed by reduction.
    pub fn multiply(&self, other: &Word) -> Result<Word> {
        if self.mode != other.mode {
            return Err(Error::InvalidArgument("cannot multiply words of different modes".into()));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Word {
            letters,
            mode: self.mode,
        }
        .reduce())
    }

    /// Group inverse `ι_{i_N}(−x_N)⋯ι_{i_1}(−x_1)`; only defined in group mode.
    pub fn inverse(&self) -> Result<Word> {
        if self.mode != Mode::Group {
            return Err(Error::InvalidArgument("inverse needs group mode".into()));
        }
        Ok(Word {
            letters: self.letters.iter().rev().map(|l| Letter::new(l.index, -l.value)).collect(),
            mode: Mode::Group,
        })
    }

    /// Random non-minimal representation of the same element.
    ///
    /// Each letter `(i, x)` becomes a run `(i, s_1)(i, s_2 − s_1)⋯(i, x − s_{m−1})`
    /// whose partial sums satisfy `s_{j−1} ≥ s_j/2`. The differences are then exact
    /// and the left-to-right merges of [`Word::reduce`] rebuild every `s_j` exactly, so
    /// a minimal word is recovered bit for bit. Each step either refines one run or
    /// inserts a zero letter with a random index from the word.
    pub fn expand(&self, seed: u64, steps: usize) -> Word {
        if steps == 0 || self.letters.is_empty() {
            return self.clone();
        }
        let mut r = rng(seed);
        // runs[k] holds the increasing partial sums of letter k (in absolute value)
        let mut runs: Vec<Vec<f64>> = self.letters.iter().map(|l| vec![l.value.abs()]).collect();
        // zeros[k] = indices of zero letters inserted before letter k (k = len: at the end)
        let mut zeros: Vec<Vec<usize>> = vec![Vec::new(); self.letters.len() + 1];
        for _ in 0..steps {
            if r.random_bool(0.7) {
                let k = r.random_range(0..runs.len());
                let run = &mut runs[k];
                if run[run.len() - 1] == 0.0 {
                    continue;
                }
                let j = r.random_range(0..run.len());
                let hi = run[j];
                let lo = if j == 0 { hi * 0.5 } else { run[j - 1] };
                let u: f64 = r.random_range(0.0..1.0);
                let s = lo + (hi - lo) * u;
                if s > lo && s < hi && s >= hi * 0.5 && (j == 0 || s <= 2.0 * lo) {
                    run.insert(j, s);
                }
            } else {
                let k = r.random_range(0..zeros.len());
                let idx = self.letters[r.random_range(0..self.letters.len())].index;
                zeros[k].push(idx);
            }
        }
        let mut letters = Vec::new();
        for (k, l) in self.letters.iter().enumerate() {
            letters.extend(zeros[k].iter().map(|&i| Letter::new(i, 0.0)));
            let sign = if l.value < 0.0 { -1.0 } else { 1.0 };
            let mut prev = 0.0;
            for &s in &runs[k] {
                letters.push(Letter::new(l.index, sign * (s - prev)));
                prev = s;
            }
        }
        letters.extend(zeros[self.letters.len()].iter().map(|&i| Letter::new(i, 0.0)));
        Word {
            letters,
            mode: self.mode,
        }
    }

    /// `𝒯(w) = Π T_{i_k}(x_k)` in word order.
    ///
    /// Negative values are only accepted against members that are unitary groups.
    pub fn evaluate(&self, family: &[ContractionSemigroup]) -> Result<Matrix> {
        let dim = family
            .first()
            .map(ContractionSemigroup::dim)
            .ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
        let mut acc = Matrix::identity(dim);
        for l in &self.letters {
            let t = family
                .get(l.index)
                .ok_or(Error::IndexOutOfRange {
                    index: l.index,
                    len: family.len(),
                })?;
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.dim(),
                });
            }
            acc = &acc * &t.evaluate_signed(l.value)?;
        }
        Ok(acc)
    }

    /// Letters as `(index, time)` pairs for the dilation layer.
    pub fn as_pairs(&self) -> Vec<(usize, f64)> {
        self.letters.iter().map(|l| (l.index, l.value)).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.letters.iter().map(|l| format!("{}:{}", l.index, l.value)).collect();
        write!(f, "{}", toks.join(" "))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Monoid mode if every value is non-negative, group mode otherwise.
    fn from_str(s: &str) -> Result<Self> {
        let w = Word::parse(s, Mode::Group)?;
        if w.letters.iter().all(|l| l.value >= 0.0) {
            Ok(Word {
                letters: w.letters,
                mode: Mode::Monoid,
            })
        } else {
            Ok(w)
        }
    }
}

/// `max_w ‖𝒯(w) − r*𝒰(w)r‖` with `𝒰` assembled letter by letter from the continuous
/// dilations of the family.
pub fn verify_algebraic_dilation(family: &[ContractionSemigroup], words: &[Word], depth: usize) -> Result<f64> {
    let dil = ContinuousFreeDilation::new(family, depth)?;
    let mut worst: f64 = 0.0;
    for w in words {
        if w.mode() != Mode::Monoid {
            return Err(Error::InvalidArgument("algebraic dilation check needs monoid words".into()));
        }
        worst = worst.max(dil.word_residual(&w.as_pairs())?);
    }
    Ok(worst)
}
