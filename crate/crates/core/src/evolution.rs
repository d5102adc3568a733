//! Pre-evolutions, continuously monitored processes and their reduction to monitored
//! unitary processes.
//!
//! Products are time ordered with later times on the left:
//! `revΠ_{k=1}^N X_k = X_N ⋯ X_1`. Steps are right adapted, so step `k` uses the
//! index `τ_k` (right endpoint) and the duration `δτ_k`.

use crate::dilation::{continuous_dilation, ContinuousDilation};
use crate::error::{Error, Result};
use crate::matrix::{LinearMap, Matrix};
use crate::partition::Partition;
use crate::semigroup::{ContractionSemigroup, DISSIPATIVE_TOL};

/// Tolerance for m-idempotency and the measurement law.
pub const IDEMPOTENT_TOL: f64 = 1e-10;
const CONSTRUCTION_GRID: usize = 33;

fn snap_index(grid: &[f64], tau: f64) -> usize {
    // nearest point, ties resolved towards the lower one
    let mut best = 0;
    for (k, &g) in grid.iter().enumerate() {
        if (g - tau).abs() < (grid[best] - tau).abs() {
            best = k;
        }
    }
    best
}

fn sorted_table(mut table: Vec<(f64, Matrix)>) -> Result<Vec<(f64, Matrix)>> {
    if table.is_empty() {
        return Err(Error::InvalidArgument("empty table".into()));
    }
    if table.iter().any(|(t, _)| !t.is_finite()) {
        return Err(Error::InvalidArgument("table keys must be finite".into()));
    }
    table.sort_by(|a, b| a.0.total_cmp(&b.0));
    if table.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidArgument("duplicate table key".into()));
    }
    let dim = table[0].1.dim();
    for (_, m) in &table {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.dim(),
            });
        }
    }
    Ok(table)
}

#[derive(Clone, Debug)]
pub enum FamilyKind {
    /// `A(τ) = A₀`.
    Constant(Matrix),
    /// `A(τ) = A₀ + τA₁`.
    Affine(Matrix, Matrix),
    /// Piecewise constant: the entry with the nearest key (ties to the lower key).
    Table(Vec<(f64, Matrix)>),
}

/// Generators `{A(τ)}_{τ ∈ [a, b]}` of a family of contraction semigroups.
#[derive(Clone, Debug)]
pub struct GeneratorFamily {
    kind: FamilyKind,
    domain: (f64, f64),
}

impl GeneratorFamily {
    pub fn new(kind: FamilyKind, domain: (f64, f64)) -> Result<Self> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(Error::InvalidArgument(format!("bad domain [{a}, {b}]")));
        }
        let kind = match kind {
            FamilyKind::Table(t) => FamilyKind::Table(sorted_table(t)?),
            FamilyKind::Affine(a0, a1) => {
                if a0.dim() != a1.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: a0.dim(),
                        got: a1.dim(),
                    });
                }
                FamilyKind::Affine(a0, a1)
            }
            k => k,
        };
        let fam = Self { kind, domain };
        let mut grid: Vec<f64> = (0..CONSTRUCTION_GRID)
            .map(|k| a + (b - a) * k as f64 / (CONSTRUCTION_GRID - 1) as f64)
            .collect();
        if let FamilyKind::Table(t) = &fam.kind {
            grid.extend(t.iter().map(|(k, _)| *k));
        }
        for tau in grid {
            let gen = fam.raw_at(tau);
            let max_eig = gen.max_hermitian_eigenvalue();
            if max_eig > DISSIPATIVE_TOL * (1.0 + gen.op_norm()) {
                return Err(Error::NotDissipative { max_eig });
            }
        }
        Ok(fam)
    }

    pub fn constant(a: Matrix) -> Result<Self> {
        Self::new(FamilyKind::Constant(a), (0.0, 1.0))
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FamilyKind::Constant(a) | FamilyKind::Affine(a, _) => a.dim(),
            FamilyKind::Table(t) => t[0].1.dim(),
        }
    }

    fn raw_at(&self, tau: f64) -> Matrix {
        match &self.kind {
            FamilyKind::Constant(a) => a.clone(),
            FamilyKind::Affine(a0, a1) => a0 + &a1.scale_re(tau),
            FamilyKind::Table(t) => {
                let keys: Vec<f64> = t.iter().map(|(k, _)| *k).collect();
                t[snap_index(&keys, tau)].1.clone()
            }
        }
    }

    fn check_in_domain(&self, tau: f64) -> Result<()> {
        let (a, b) = self.domain;
        if tau < a || tau > b || !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("τ = {tau} outside [{a}, {b}]")));
        }
        Ok(())
    }

    /// `A(τ)`.
    pub fn generator_at(&self, tau: f64) -> Result<Matrix> {
        self.check_in_domain(tau)?;
        Ok(self.raw_at(tau))
    }

    /// `T_τ(t) = exp(tA(τ))`.
    pub fn semigroup_at(&self, tau: f64, t: f64) -> Result<Matrix> {
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!("negative time {t}")));
        }
        self.generator_at(tau)?.expm(t)
    }
}

/// `𝒯^Ξ(t,s) = revΠ_k T_{τ_k}(δτ_k)` along `Ξ^{(t,s)}`.
pub fn pre_evolution_product(fam: &GeneratorFamily, xi: &Partition, t: f64, s: f64) -> Result<Matrix> {
    let sp = xi.scaled(t, s)?;
    fam.check_in_domain(s)?;
    fam.check_in_domain(t)?;
    let mut acc = Matrix::identity(fam.dim());
    for k in 1..=xi.n() {
        acc = &fam.semigroup_at(sp.taus[k], sp.deltas[k - 1])? * &acc;
    }
    Ok(acc)
}

/// The monitoring operators `τ ↦ X_τ`.
#[derive(Clone, Debug)]
pub enum Monitor {
    Constant(Matrix),
    /// Nearest key, ties to the lower key.
    Table(Vec<(f64, Matrix)>),
}

impl Monitor {
    pub fn at(&self, tau: f64) -> &Matrix {
        match self {
            Monitor::Constant(x) => x,
            Monitor::Table(t) => {
                let keys: Vec<f64> = t.iter().map(|(k, _)| *k).collect();
                &t[snap_index(&keys, tau)].1
            }
        }
    }

    fn samples(&self) -> Vec<&Matrix> {
        match self {
            Monitor::Constant(x) => vec![x],
            Monitor::Table(t) => t.iter().map(|(_, m)| m).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.samples()[0].dim()
    }
}

/// A semigroup `T` observed through monitoring operators `X_τ`.
#[derive(Clone, Debug)]
pub struct MonitoredProcess {
    semigroup: ContractionSemigroup,
    monitor: Monitor,
    order: usize,
}

impl MonitoredProcess {
    /// `order = m ≥ 1` requires `X^m X = X` on every sample; `0` skips the check.
    pub fn new(semigroup: ContractionSemigroup, monitor: Monitor, order: usize) -> Result<Self> {
        let monitor = match monitor {
            Monitor::Table(t) => Monitor::Table(sorted_table(t)?),
            m => m,
        };
        if monitor.dim() != semigroup.dim() {
            return Err(Error::DimensionMismatch {
                expected: semigroup.dim(),
                got: monitor.dim(),
            });
        }
        if order >= 1 {
            for x in monitor.samples() {
                let r = (&x.pow(order as u32) * x).dist(x);
                if r > IDEMPOTENT_TOL * (1.0 + x.op_norm()) {
                    return Err(Error::Inconsistent {
                        what: "monitor is not m-idempotent",
                        residual: r,
                    });
                }
            }
        }
        Ok(Self {
            semigroup,
            monitor,
            order,
        })
    }

    pub fn semigroup(&self) -> &ContractionSemigroup {
        &self.semigroup
    }

    pub fn monitor(&self) -> &Monitor {
        &self.monitor
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.semigroup.dim()
    }

    /// `max ‖X_{τ'}X_τ − X_τ‖` over all sample pairs (zero for a family of measurements).
    pub fn measurement_residual(&self) -> f64 {
        let samples = self.monitor.samples();
        let mut worst: f64 = 0.0;
        for a in &samples {
            for b in &samples {
                worst = worst.max((*a * *b).dist(b));
            }
        }
        worst
    }
}

/// `(𝒳⋉T)^Ξ(t,s) = revΠ_k X_{τ_k} T(δτ_k)` along `Ξ^{(t,s)}`.
pub fn monitoring_product(proc: &MonitoredProcess, xi: &Partition, t: f64, s: f64) -> Result<Matrix> {
    let sp = xi.scaled(t, s)?;
    let mut acc = Matrix::identity(proc.dim());
    for k in 1..=xi.n() {
        let step = proc.monitor.at(sp.taus[k]) * &proc.semigroup.evaluate(sp.deltas[k - 1])?;
        acc = &step * &acc;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitStatus {
    /// The last successive difference is within tolerance. This supports, but does
    /// not prove, convergence over the full refinement net.
    ConvergedAlongSchedule,
    NotConverged,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementReport {
    /// `‖E(Ξ_{k+1}) − E(Ξ_k)‖` for consecutive schedule entries.
    pub differences: Vec<f64>,
    /// `N(Ξ_k)` along the schedule.
    pub sizes: Vec<usize>,
    pub tol: f64,
    pub status: LimitStatus,
}

/// Evaluates `producer` along a refining schedule and reports successive differences.
pub fn refinement_limit<F>(producer: F, schedule: &[Partition], tol: f64) -> Result<(Matrix, RefinementReport)>
where
    F: Fn(&Partition) -> Result<Matrix>,
{
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty schedule".into()));
    }
    if schedule.windows(2).any(|w| !w[1].refines(&w[0])) {
        return Err(Error::InvalidArgument("schedule is not increasing under refinement".into()));
    }
    let mut last = producer(&schedule[0])?;
    let mut differences = Vec::with_capacity(schedule.len() - 1);
    for xi in &schedule[1..] {
        let next = producer(xi)?;
        differences.push(next.dist(&last));
        last = next;
    }
    let status = match differences.last() {
        Some(&d) if d <= tol => LimitStatus::ConvergedAlongSchedule,
        None => LimitStatus::ConvergedAlongSchedule,
        _ => LimitStatus::NotConverged,
    };
    Ok((
        last,
        RefinementReport {
            differences,
            sizes: schedule.iter().map(Partition::n).collect(),
            tol,
            status,
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawReport {
    /// `max_t ‖E(t,t) − 1‖`; `None` for the pseudo variant.
    pub diagonal_residual: Option<f64>,
    /// `max ‖E(t,s)E(s,r) − E(t,r)‖` over the triples.
    pub cocycle_residual: f64,
}

/// Checks `E(t,t) = 1` (unless `pseudo`) and `E(t,s)E(s,r) = E(t,r)`.
pub fn evolution_law_check<F>(e: F, triples: &[(f64, f64, f64)], diag: &[f64], pseudo: bool) -> Result<LawReport>
where
    F: Fn(f64, f64) -> Result<Matrix>,
{
    let mut cocycle_residual: f64 = 0.0;
    for &(t, s, r) in triples {
        if !(t >= s && s >= r) {
            return Err(Error::InvalidArgument(format!("triple ({t}, {s}, {r}) is not ordered")));
        }
        let lhs = &e(t, s)? * &e(s, r)?;
        cocycle_residual = cocycle_residual.max(lhs.dist(&e(t, r)?));
    }
    let diagonal_residual = if pseudo {
        None
    } else {
        let mut worst: f64 = 0.0;
        for &t in diag {
            let m = e(t, t)?;
            worst = worst.max(m.dist(&Matrix::identity(m.dim())));
        }
        Some(worst)
    };
    Ok(LawReport {
        diagonal_residual,
        cocycle_residual,
    })
}

fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if perm.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: perm.len(),
        });
    }
    for &p in perm {
        if p >= m || seen[p] {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of 0..{m}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// `Q_σ(τ) = T_{σ(m−1)}(τ) ⋯ T_{σ(0)}(τ)`.
pub fn chernoff_q(perm: &[usize], sgs: &[ContractionSemigroup], tau: f64) -> Result<Matrix> {
    if sgs.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    check_permutation(perm, sgs.len())?;
    let mut acc = Matrix::identity(sgs[0].dim());
    for &j in perm {
        acc = &sgs[j].evaluate(tau)? * &acc;
    }
    Ok(acc)
}

fn unit(m: usize, i: usize, j: usize) -> Matrix {
    let mut e = Matrix::zeros(m);
    e.set(i, j, crate::matrix::c64(1.0, 0.0));
    e
}

/// Cyclic shift `W = Σ E_{(i+1) mod m, i} ⊗ 1` on `ℂ^m ⊗ ℂ^n`.
pub fn cycle_shift(m: usize, n: usize) -> Matrix {
    let id = Matrix::identity(n);
    (0..m).fold(Matrix::zeros(m * n), |acc, i| &acc + &unit(m, (i + 1) % m, i).kron(&id))
}

/// `T̃(t) = Σ E_ii ⊗ T_i(m·t)` monitored by the cyclic shift, with order `m`.
pub fn cycle_monitored_system(sgs: &[ContractionSemigroup]) -> Result<MonitoredProcess> {
    let m = sgs.len();
    if m == 0 {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    let n = sgs[0].dim();
    let mut gen = Matrix::zeros(m * n);
    for (i, t) in sgs.iter().enumerate() {
        if t.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.dim() });
        }
        gen.set_block(i, i, &t.generator().scale_re(m as f64));
    }
    MonitoredProcess::new(ContractionSemigroup::new(gen)?, Monitor::Constant(cycle_shift(m, n)), m)
}

/// `Σ E_ii ⊗ revΠ_l Q_{σ_i}(δτ_l)` along `Ξ₀^{(t,s)}` with `σ_i(j) = (i + j) mod m`.
///
/// This is the closed form of the cycle system's monitoring product over `Ξ₀^{(m)}`.
pub fn cycle_reference(sgs: &[ContractionSemigroup], xi0: &Partition, t: f64, s: f64) -> Result<Matrix> {
    let m = sgs.len();
    if m == 0 {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    let n = sgs[0].dim();
    let sp = xi0.scaled(t, s)?;
    let mut out = Matrix::zeros(m * n);
    for i in 0..m {
        let perm: Vec<usize> = (0..m).map(|j| (i + j) % m).collect();
        let mut acc = Matrix::identity(n);
        for &d in &sp.deltas {
            acc = &chernoff_q(&perm, sgs, d)? * &acc;
        }
        out.set_block(i, i, &acc);
    }
    Ok(out)
}

/// `1 ⊗ exp((t − s)ΣA_i)`, the limit of the cycle system.
pub fn cycle_target(sgs: &[ContractionSemigroup], t: f64, s: f64) -> Result<Matrix> {
    let m = sgs.len();
    if m == 0 {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    let n = sgs[0].dim();
    let sum = sgs.iter().fold(Matrix::zeros(n), |acc, x| &acc + x.generator());
    Ok(Matrix::identity(m).kron(&sum.expm(t - s)?))
}

fn check_hermitian(h: &Matrix) -> Result<()> {
    let skew = (h - &h.adjoint()).op_norm();
    if skew > 1e-10 * (1.0 + h.op_norm()) {
        return Err(Error::InvalidArgument(format!("matrix is not Hermitian (‖H − H*‖ = {skew:.3e})")));
    }
    Ok(())
}

/// The `m = 2` cycle system for the unitary groups `exp(itH₀)`, `exp(itH₁)`.
pub fn feynman_analog(h0: &Matrix, h1: &Matrix) -> Result<MonitoredProcess> {
    check_hermitian(h0)?;
    check_hermitian(h1)?;
    let i = crate::matrix::c64(0.0, 1.0);
    let sgs = [
        ContractionSemigroup::new(h0.scale(i))?,
        ContractionSemigroup::new(h1.scale(i))?,
    ];
    cycle_monitored_system(&sgs)
}

/// `1 ⊗ exp(i(t − s)(H₀ + H₁))`.
pub fn feynman_target(h0: &Matrix, h1: &Matrix, t: f64, s: f64) -> Result<Matrix> {
    let gen = (h0 + h1).scale(crate::matrix::c64(0.0, 1.0));
    Ok(Matrix::identity(2).kron(&gen.expm(t - s)?))
}

/// Finite realization of the first diagonalisation over a grid `Ω`.
#[derive(Clone, Debug)]
pub struct DiagonalBlock {
    pub grid: Vec<f64>,
    /// `T_Ω` with block-diagonal generator `⊕_ω A(ω)`.
    pub semigroup: ContractionSemigroup,
    /// `π_ω`: selects block `ω`.
    pub pis: Vec<LinearMap>,
    /// `ι ξ = (ξ, …, ξ)`; not isometric for `|Ω| > 1` (`‖ι‖ = √|Ω|`).
    pub iota: LinearMap,
}

impl DiagonalBlock {
    /// Grid position nearest to `τ` (ties to the lower one).
    pub fn snap(&self, tau: f64) -> usize {
        snap_index(&self.grid, tau)
    }
}

pub fn diagonal_block(fam: &GeneratorFamily, grid: &[f64]) -> Result<DiagonalBlock> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let n = fam.dim();
    let k = grid.len();
    let blocks = grid.iter().map(|&w| fam.generator_at(w)).collect::<Result<Vec<_>>>()?;
    let semigroup = ContractionSemigroup::new(Matrix::block_diag(&blocks))?;
    let pis = (0..k)
        .map(|w| LinearMap::coordinate_embedding(n * k, n, w * n).adjoint())
        .collect();
    let iota = LinearMap::from_inner(Matrix::identity(n).inner().clone()).stack(k);
    Ok(DiagonalBlock {
        grid: grid.to_vec(),
        semigroup,
        pis,
        iota,
    })
}

/// Residuals recorded by [`reduce_pre_evolution`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionDiagnostics {
    /// `max_τ ‖j_τ r − 1‖`.
    pub left_inverse: f64,
    /// `max_{τ,τ'} ‖P_{τ'}P_τ − P_τ‖`.
    pub measurement_law: f64,
    /// `max_τ max_{a,b} ‖P_τU(a)P_τU(b)P_τ − P_τU(a+b)P_τ‖` on the probe times.
    pub passivity: f64,
    /// `‖r*r − 1‖`, the isometry deficit of `r = r₁ι`.
    pub r_isometry_deficit: f64,
    /// `‖j_τ*j_τ − 1‖`, the isometry deficit of the coisometry `j_τ = π_τ r₁*`.
    pub j_isometry_deficit: f64,
}

/// A pre-evolution realised as a process monitored by passive measurements.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub diagonal: DiagonalBlock,
    pub dilation: ContinuousDilation,
    /// `r = r₁ ∘ ι`.
    pub r: LinearMap,
    /// `j_τ = π_τ ∘ r₁*`, one per grid point.
    pub js: Vec<LinearMap>,
    /// `P_τ = r j_τ` monitoring `U(t) = exp(tB)`.
    pub process: MonitoredProcess,
    pub diagnostics: ReductionDiagnostics,
}

const PASSIVITY_PROBES: [f64; 3] = [0.0, 0.25, 0.6];

/// Builds `T_Ω`, dilates it at depth `M`, and assembles `r`, `j_τ`, `P_τ`.
pub fn reduce_pre_evolution(fam: &GeneratorFamily, grid: &[f64], depth: usize) -> Result<Reduction> {
    let diagonal = diagonal_block(fam, grid)?;
    let dilation = continuous_dilation(&diagonal.semigroup, depth)?;
    let n = fam.dim();
    let r1 = dilation.r1().clone();
    let r = r1.compose(&diagonal.iota);
    let js: Vec<LinearMap> = diagonal.pis.iter().map(|pi| pi.compose(&r1.adjoint())).collect();
    let ps: Vec<Matrix> = js.iter().map(|j| r.compose(j).to_square()).collect();

    let id_n = Matrix::identity(n);
    let left_inverse = js
        .iter()
        .map(|j| j.compose(&r).to_square().dist(&id_n))
        .fold(0.0, f64::max);
    let mut measurement_law: f64 = 0.0;
    for a in &ps {
        for b in &ps {
            measurement_law = measurement_law.max((a * b).dist(b));
        }
    }
    let us = PASSIVITY_PROBES
        .iter()
        .map(|&a| dilation.evaluate(a))
        .collect::<Result<Vec<_>>>()?;
    let mut passivity: f64 = 0.0;
    for (ia, &a) in PASSIVITY_PROBES.iter().enumerate() {
        for (ib, &b) in PASSIVITY_PROBES.iter().enumerate() {
            let sum = dilation.evaluate(a + b)?;
            for p in &ps {
                let lhs = product(&[p, &us[ia], p, &us[ib], p]);
                let rhs = product(&[p, &sum, p]);
                passivity = passivity.max(lhs.dist(&rhs));
            }
        }
    }
    let r_isometry_deficit = r.adjoint().compose(&r).to_square().dist(&id_n);
    let j_isometry_deficit = js
        .iter()
        .map(|j| j.adjoint().compose(j).to_square().dist(&Matrix::identity(j.cols())))
        .fold(0.0, f64::max);

    let table: Vec<(f64, Matrix)> = grid.iter().copied().zip(ps).collect();
    let process = MonitoredProcess::new(
        ContractionSemigroup::new(dilation.generator().clone())?,
        Monitor::Table(table),
        1,
    )?;
    Ok(Reduction {
        diagonal,
        dilation,
        r,
        js,
        process,
        diagnostics: ReductionDiagnostics {
            left_inverse,
            measurement_law,
            passivity,
            r_isometry_deficit,
            j_isometry_deficit,
        },
    })
}

fn product(factors: &[&Matrix]) -> Matrix {
    crate::matrix::product(factors[0].dim(), factors.iter().copied())
}

/// Outcome of [`reduction_word_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct WordIdentityReport {
    /// `max_τ̂ ‖𝒯^Ξ(t,s) − j_τ̂(𝒫⋉U)^Ξ(t,s)r‖`.
    pub residual: f64,
    /// `Σ_k ‖T_Ω(δτ_k) − r₁*U(δτ_k)r₁‖`, the truncation error of the steps used.
    pub truncation_residual: f64,
    /// Largest distance from a scaled partition point to the grid.
    pub snap_distance: f64,
}

/// Compares both sides of `𝒯^Ξ(t,s) = j_τ̂(𝒫⋉U)^Ξ(t,s)r` for every grid point `τ̂`.
///
/// The pre-evolution is evaluated on the grid-snapped family, so off-grid points
/// are reported through `snap_distance` rather than rejected.
pub fn reduction_word_check(red: &Reduction, fam: &GeneratorFamily, xi: &Partition, t: f64, s: f64) -> Result<WordIdentityReport> {
    let sp = xi.scaled(t, s)?;
    let n = fam.dim();
    let mut lhs = Matrix::identity(n);
    let mut truncation_residual = 0.0;
    let mut snap_distance: f64 = 0.0;
    let r1 = red.dilation.r1();
    for k in 1..=xi.n() {
        let w = red.diagonal.snap(sp.taus[k]);
        snap_distance = snap_distance.max((red.diagonal.grid[w] - sp.taus[k]).abs());
        let d = sp.deltas[k - 1];
        lhs = &fam.semigroup_at(red.diagonal.grid[w], d)? * &lhs;
        let big = red.diagonal.semigroup.evaluate(d)?;
        truncation_residual += big.dist(&r1.compress(&red.dilation.evaluate(d)?));
    }
    let mid = monitoring_product(&red.process, xi, t, s)?;
    let mut residual: f64 = 0.0;
    for j in &red.js {
        let rhs = j.compose(&red.r.after_square(&mid)).to_square();
        residual = residual.max(lhs.dist(&rhs));
    }
    Ok(WordIdentityReport {
        residual,
        truncation_residual,
        snap_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_dissipative, random_hermitian, random_skew, rng};

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn affine_family(seed: u64) -> GeneratorFamily {
        let mut r = rng(seed);
        let a0 = random_dissipative(2, 1.0, &mut r);
        let a1 = random_skew(2, 1.0, &mut r);
        GeneratorFamily::new(FamilyKind::Affine(a0, a1), (0.0, 1.0)).unwrap()
    }

    #[test]
    fn constant_family_is_partition_independent() {
        let mut r = rng(1);
        let a = random_dissipative(3, 1.5, &mut r);
        let fam = GeneratorFamily::constant(a.clone()).unwrap();
        for xi in [p("0,1"), p("0,1/3,1"), p("0,1/7,1/2,5/6,1")] {
            let got = pre_evolution_product(&fam, &xi, 0.9, 0.2).unwrap();
            assert!(got.dist(&a.expm(0.7).unwrap()) <= 1e-12);
        }
        assert_eq!(pre_evolution_product(&fam, &p("0,1/2,1"), 0.4, 0.4).unwrap(), Matrix::identity(3));
        assert!(pre_evolution_product(&fam, &p("0,1"), 1.5, 0.2).is_err());
    }

    #[test]
    fn affine_family_first_order() {
        let fam = affine_family(2);
        let reference = pre_evolution_product(&fam, &Partition::uniform(1024).unwrap(), 1.0, 0.0).unwrap();
        let e64 = pre_evolution_product(&fam, &Partition::uniform(64).unwrap(), 1.0, 0.0).unwrap().dist(&reference);
        let e128 = pre_evolution_product(&fam, &Partition::uniform(128).unwrap(), 1.0, 0.0).unwrap().dist(&reference);
        let ratio = e64 / e128;
        assert!((1.6..2.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn affine_family_rejects_non_dissipative() {
        let a0 = Matrix::diag_real(&[-0.1]);
        let a1 = Matrix::diag_real(&[0.5]);
        assert!(GeneratorFamily::new(FamilyKind::Affine(a0, a1), (0.0, 1.0)).is_err());
    }

    #[test]
    fn table_family_snaps() {
        let a = Matrix::diag_real(&[-1.0]);
        let b = Matrix::diag_real(&[-2.0]);
        let fam = GeneratorFamily::new(FamilyKind::Table(vec![(0.5, b.clone()), (0.0, a.clone())]), (0.0, 1.0)).unwrap();
        assert_eq!(fam.generator_at(0.25).unwrap(), a);
        assert_eq!(fam.generator_at(0.26).unwrap(), b);
        assert_eq!(fam.generator_at(1.0).unwrap(), b);
    }

    #[test]
    fn monitoring_examples() {
        let mut r = rng(3);
        let a = random_dissipative(2, 1.0, &mut r);
        let t = ContractionSemigroup::new(a.clone()).unwrap();
        let proc = MonitoredProcess::new(t.clone(), Monitor::Constant(Matrix::identity(2)), 1).unwrap();
        let got = monitoring_product(&proc, &p("0,1/4,2/3,1"), 1.0, 0.3).unwrap();
        assert!(got.dist(&a.expm(0.7).unwrap()) <= 1e-12);

        // a projection commuting with T
        let d = Matrix::diag_real(&[-0.3, -1.2]);
        let pr = Matrix::diag_real(&[1.0, 0.0]);
        let t = ContractionSemigroup::new(d.clone()).unwrap();
        let proc = MonitoredProcess::new(t, Monitor::Constant(pr.clone()), 1).unwrap();
        for xi in [p("0,1"), p("0,1/3,1/2,1")] {
            let got = monitoring_product(&proc, &xi, 0.8, 0.1).unwrap();
            let closed = product(&[&pr, &d.expm(0.7).unwrap(), &pr]);
            assert!(got.dist(&closed) <= 1e-12);
        }
    }

    #[test]
    fn idempotent_diagonal_law() {
        let t = ContractionSemigroup::new(Matrix::diag_real(&[-1.0, -0.5, 0.0])).unwrap();
        let w = cycle_shift(3, 1);
        let proc = MonitoredProcess::new(t, Monitor::Constant(w.clone()), 3).unwrap();
        let xi = p("0,1/2,1").homogenize(3).unwrap();
        assert_eq!(monitoring_product(&proc, &xi, 0.4, 0.4).unwrap(), w.pow(3));
        let bad = Matrix::diag_real(&[0.5, 1.0, 1.0]);
        let t = ContractionSemigroup::new(Matrix::zeros(3)).unwrap();
        assert!(MonitoredProcess::new(t, Monitor::Constant(bad), 1).is_err());
    }

    #[test]
    fn refinement_examples() {
        let sched: Vec<Partition> = [1, 2, 4, 8].iter().map(|&n| Partition::uniform(n).unwrap()).collect();
        let (m, rep) = refinement_limit(|_| Ok(Matrix::identity(2)), &sched, 1e-12).unwrap();
        assert_eq!(m, Matrix::identity(2));
        assert!(rep.differences.iter().all(|&d| d == 0.0));
        assert_eq!(rep.status, LimitStatus::ConvergedAlongSchedule);
        let bad = vec![Partition::uniform(2).unwrap(), Partition::uniform(3).unwrap()];
        assert!(refinement_limit(|_| Ok(Matrix::identity(1)), &bad, 1.0).is_err());
    }

    #[test]
    fn law_examples() {
        let mut r = rng(4);
        let a = random_dissipative(2, 1.0, &mut r);
        let b = random_dissipative(2, 1.0, &mut r);
        let triples = [(1.0, 0.6, 0.1), (0.9, 0.9, 0.2), (0.5, 0.3, 0.0)];
        let rep = evolution_law_check(|t, s| a.expm(t - s), &triples, &[0.0, 0.5], false).unwrap();
        assert!(rep.cocycle_residual <= 1e-10 && rep.diagonal_residual.unwrap() <= 1e-10);
        let broken = evolution_law_check(
            |t, s| Ok(&a.expm(t)? * &b.expm(-s)?),
            &triples,
            &[],
            true,
        )
        .unwrap();
        assert!(broken.cocycle_residual > 1e-3);
    }

    #[test]
    fn chernoff_examples() {
        let mut r = rng(5);
        let sgs: Vec<_> = (0..3)
            .map(|_| ContractionSemigroup::new(random_dissipative(2, 1.0, &mut r)).unwrap())
            .collect();
        assert_eq!(chernoff_q(&[2, 0, 1], &sgs, 0.0).unwrap(), Matrix::identity(2));
        assert_eq!(chernoff_q(&[0], &sgs[..1], 0.3).unwrap(), sgs[0].evaluate(0.3).unwrap());
        assert!(chernoff_q(&[0, 0, 1], &sgs, 0.3).is_err());
        let diag: Vec<_> = [[-1.0, -0.2], [-0.5, -0.7]]
            .iter()
            .map(|d| ContractionSemigroup::new(Matrix::diag_real(d)).unwrap())
            .collect();
        let sum = Matrix::diag_real(&[-1.5, -0.9]).expm(0.4).unwrap();
        for perm in [[0, 1], [1, 0]] {
            assert!(chernoff_q(&perm, &diag, 0.4).unwrap().dist(&sum) <= 1e-15);
        }
    }

    #[test]
    fn cycle_system_structure() {
        let mut r = rng(6);
        let sgs: Vec<_> = (0..2)
            .map(|_| ContractionSemigroup::new(random_dissipative(2, 1.0, &mut r)).unwrap())
            .collect();
        let proc = cycle_monitored_system(&sgs).unwrap();
        let w = proc.monitor().at(0.0).clone();
        assert_eq!(w.pow(2), Matrix::identity(4));
        assert_eq!(w.block(1, 0, 2), Matrix::identity(2));
        assert_eq!(w.block(0, 1, 2), Matrix::identity(2));
        assert_eq!(w.block(0, 0, 2), Matrix::zeros(2));
        let tt = proc.semigroup().evaluate(0.3).unwrap();
        assert!(tt.block(0, 0, 2).dist(&sgs[0].evaluate(0.6).unwrap()) <= 1e-14);
        assert!(tt.block(1, 1, 2).dist(&sgs[1].evaluate(0.6).unwrap()) <= 1e-14);
        assert_eq!(tt.block(0, 1, 2), Matrix::zeros(2));

        let single = cycle_monitored_system(&sgs[..1]).unwrap();
        assert_eq!(single.monitor().at(0.0), &Matrix::identity(2));

        let xi0 = p("0,1/3,1/2,1");
        let got = monitoring_product(&proc, &xi0.homogenize(2).unwrap(), 0.9, 0.1).unwrap();
        let reference = cycle_reference(&sgs, &xi0, 0.9, 0.1).unwrap();
        assert!(got.dist(&reference) <= 1e-11, "{:.3e}", got.dist(&reference));
    }

    #[test]
    fn feynman_examples() {
        let mut r = rng(7);
        let h0 = random_hermitian(2, 1.0, &mut r);
        let proc = feynman_analog(&h0, &Matrix::zeros(2)).unwrap();
        let xi = Partition::uniform(4).unwrap();
        let got = monitoring_product(&proc, &xi, 1.0, 0.0).unwrap();
        assert!(got.dist(&feynman_target(&h0, &Matrix::zeros(2), 1.0, 0.0).unwrap()) <= 1e-12);

        let h1 = Matrix::diag_real(&[0.3, -0.8]);
        let h2 = Matrix::diag_real(&[-1.1, 0.4]);
        let proc = feynman_analog(&h1, &h2).unwrap();
        let got = monitoring_product(&proc, &Partition::uniform(6).unwrap(), 0.7, 0.2).unwrap();
        assert!(got.dist(&feynman_target(&h1, &h2, 0.7, 0.2).unwrap()) <= 1e-12);

        let not_h = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(feynman_analog(&not_h, &h1).is_err());
    }

    #[test]
    fn diagonal_block_examples() {
        let fam = affine_family(8);
        let one = diagonal_block(&fam, &[0.3]).unwrap();
        assert!(one.semigroup.generator().dist(&fam.generator_at(0.3).unwrap()) == 0.0);
        let db = diagonal_block(&fam, &[0.0, 0.5, 1.0]).unwrap();
        let tt = db.semigroup.evaluate(0.7).unwrap();
        for (w, pi) in db.pis.iter().enumerate() {
            let tw = fam.semigroup_at(db.grid[w], 0.7).unwrap();
            assert_eq!(pi.compose(&db.iota).to_square(), Matrix::identity(2));
            assert!(pi.then_square(&tt).dist(&pi.after_square(&tw)) <= 1e-14);
            assert!(pi.then_square(&tt).compose(&db.iota).to_square().dist(&tw) <= 1e-12);
        }
    }

    #[test]
    fn reduction_examples() {
        let fam = affine_family(9);
        let grid = [0.0, 0.5, 1.0];
        let red = reduce_pre_evolution(&fam, &grid, 8).unwrap();
        let d = &red.diagnostics;
        assert_eq!(d.left_inverse, 0.0);
        assert!(d.measurement_law <= 1e-10);
        assert!(d.passivity <= 1e-10, "{d:?}");
        assert!((d.r_isometry_deficit - 2.0).abs() <= 1e-12);
        let xi = p("0,1/2,1");
        let rep = reduction_word_check(&red, &fam, &xi, 1.0, 0.0).unwrap();
        assert_eq!(rep.snap_distance, 0.0);
        assert!(rep.residual <= 3f64.sqrt() * rep.truncation_residual + 1e-12, "{rep:?}");
    }
}
