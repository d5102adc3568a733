//! Finite partitions of `[0, 1]` with exact rational points.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Strictly increasing points `0 = τ_0 < τ_1 < … < τ_N = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    points: Vec<Rational>,
}

/// `𝓕_[0,1]` (every partition) or `𝓕^{(m)}` (partitions with `m | N`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionSystem {
    All,
    Homogeneous(usize),
}

impl PartitionSystem {
    pub fn contains(&self, p: &Partition) -> bool {
        match *self {
            PartitionSystem::All => true,
            PartitionSystem::Homogeneous(m) => m >= 1 && p.n() % m == 0,
        }
    }

    fn order(&self) -> usize {
        match *self {
            PartitionSystem::All => 1,
            PartitionSystem::Homogeneous(m) => m,
        }
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational converts to f64")
}

impl Partition {
    pub fn new(mut points: Vec<Rational>) -> Result<Self> {
        points.sort();
        points.dedup();
        if points.len() < 2 || !points[0].is_zero() || !points[points.len() - 1].is_one() {
            return Err(Error::InvalidArgument(
                "partition must contain 0 and 1 and lie in [0, 1]".into(),
            ));
        }
        if points.iter().any(|p| *p < Rational::zero() || *p > Rational::one()) {
            return Err(Error::InvalidArgument("partition points must lie in [0, 1]".into()));
        }
        Ok(Self { points })
    }

    /// `{0, 1}`.
    pub fn trivial() -> Self {
        Self {
            points: vec![Rational::zero(), Rational::one()],
        }
    }

    /// `{0, 1/n, …, 1}`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("uniform partition needs n ≥ 1".into()));
        }
        Ok(Self {
            points: (0..=n).map(|k| Rational::new(k as i128, n as i128)).collect(),
        })
    }

    /// Parses a comma-separated list such as `0,1/3,1`.
    pub fn parse(s: &str) -> Result<Self> {
        let points = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                Rational::from_str(tok)
                    .map_err(|_| Error::InvalidArgument(format!("`{tok}` is not a rational number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    /// Number of subintervals `N(Ξ)`.
    pub fn n(&self) -> usize {
        self.points.len() - 1
    }

    /// `δτ_k = τ_k − τ_{k−1}` for `k = 1..N`.
    pub fn deltas(&self) -> Vec<Rational> {
        self.points.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `δΞ = max_k δτ_k`.
    pub fn mesh(&self) -> Rational {
        self.deltas().into_iter().max().expect("N ≥ 1")
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        self.points.binary_search(x).is_ok()
    }

    /// `self ⊇ other`.
    pub fn refines(&self, other: &Partition) -> bool {
        other.points.iter().all(|p| self.contains_point(p))
    }

    pub fn union(&self, other: &Partition) -> Partition {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Partition::new(points).expect("union of partitions")
    }

    /// `a + bΞ` as a point set (not itself a partition of `[0, 1]` in general).
    pub fn affine_image(&self, a: Rational, b: Rational) -> Vec<Rational> {
        self.points.iter().map(|p| a + b * p).collect()
    }

    /// `Ξ^{(m)}`: every subinterval split into `m` equal parts.
    pub fn homogenize(&self, m: usize) -> Result<Partition> {
        if m == 0 {
            return Err(Error::InvalidArgument("homogenize needs m ≥ 1".into()));
        }
        let mm = m as i128;
        let mut points = Vec::with_capacity(self.n() * m + 1);
        for w in self.points.windows(2) {
            let d = w[1] - w[0];
            for j in 0..m {
                points.push(w[0] + d * Rational::new(j as i128, mm));
            }
        }
        points.push(Rational::one());
        Ok(Partition { points })
    }

    /// Points as doubles.
    pub fn points_f64(&self) -> Vec<f64> {
        self.points.iter().map(to_f64).collect()
    }

    /// `Ξ^{(t,s)} = s + (t − s)Ξ`.
    pub fn scaled(&self, t: f64, s: f64) -> Result<ScaledPartition> {
        ScaledPartition::new(self.clone(), t, s)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", toks.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Partition::parse(s)
    }
}

/// `Ξ^{(t,s)}` with `τ_j = s + (t − s)τ^Ξ_j` and `δτ_k = (t − s)δτ^Ξ_k` as doubles.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledPartition {
    pub base: Partition,
    pub t: f64,
    pub s: f64,
    pub taus: Vec<f64>,
    pub deltas: Vec<f64>,
}

impl ScaledPartition {
    pub fn new(base: Partition, t: f64, s: f64) -> Result<Self> {
        if !(t.is_finite() && s.is_finite() && t >= s) {
            return Err(Error::InvalidArgument(format!("need finite t ≥ s, got t={t}, s={s}")));
        }
        let h = t - s;
        let taus = base.points.iter().map(|p| s + h * to_f64(p)).collect();
        let deltas = base.deltas().iter().map(|d| h * to_f64(d)).collect();
        Ok(Self {
            base,
            t,
            s,
            taus,
            deltas,
        })
    }
}

/// Splits of a self-similar system: `Γ₃ = αΓ₁ ∪ (α + (1 − α)Γ₂) ⊇ Ξ`.
///
/// For `0 < α < 1`, `Γ₃` is `Ξ ∪ {α}` (homogenised on both sides for `𝓕^{(m)}`).
/// At `α = 0` or `α = 1` the collapsed side gets the uniform `m`-partition and is
/// exempt from containing anything.
pub fn self_similar_split(
    xi: &Partition,
    alpha: Rational,
    system: PartitionSystem,
) -> Result<(Partition, Partition, Partition)> {
    let zero = Rational::zero();
    let one = Rational::one();
    if alpha < zero || alpha > one {
        return Err(Error::InvalidArgument(format!("α = {alpha} outside [0, 1]")));
    }
    let m = system.order();
    if m == 0 {
        return Err(Error::InvalidArgument("homogeneous system needs m ≥ 1".into()));
    }
    let collapsed = Partition::uniform(m)?;
    let (g1, g2) = if alpha.is_zero() {
        (collapsed, xi.homogenize(m)?)
    } else if alpha.is_one() {
        (xi.homogenize(m)?, collapsed)
    } else {
        let mut refined = xi.points.clone();
        refined.push(alpha);
        let refined = Partition::new(refined)?;
        let left: Vec<Rational> = refined.points.iter().filter(|p| **p <= alpha).map(|p| p / alpha).collect();
        let right: Vec<Rational> = refined
            .points
            .iter()
            .filter(|p| **p >= alpha)
            .map(|p| (p - alpha) / (one - alpha))
            .collect();
        (Partition::new(left)?.homogenize(m)?, Partition::new(right)?.homogenize(m)?)
    };
    let g3 = compose(&g1, &g2, alpha)?;
    Ok((g1, g2, g3))
}

/// `αΓ₁ ∪ (α + (1 − α)Γ₂)`.
pub fn compose(g1: &Partition, g2: &Partition, alpha: Rational) -> Result<Partition> {
    let one = Rational::one();
    let mut points = g1.affine_image(Rational::zero(), alpha);
    points.extend(g2.affine_image(alpha, one - alpha));
    Partition::new(points)
}
