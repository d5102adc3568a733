//! Cells of each experiment and how to run one.

use std::time::Instant;

use dilationlab::dilation::{point_spectrum_transfer, verify_continuous_word, verify_discrete_word, verify_poly_transport};
use dilationlab::evolution::{
    cycle_monitored_system, cycle_target, feynman_analog, feynman_target, monitoring_product, reduce_pre_evolution,
    reduction_word_check, FamilyKind, GeneratorFamily, Monitor, MonitoredProcess, Reduction,
};
use dilationlab::freeword::{Letter, Mode, Word};
use dilationlab::partition::{self_similar_split, PartitionSystem, Rational};
use dilationlab::random::{
    random_contraction, random_dissipative, random_hermitian, random_skew, rng, unitary_with_angles,
};
use dilationlab::semigroup::ContractionSemigroup;
use dilationlab::{Matrix, Result};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{Experiment, FamilySource, Plan, WordSource};

const SPECTRUM_DEPTH: usize = 6;
const REDUCE_DEPTH: usize = 8;
const CONTINUOUS_DEPTHS: [usize; 3] = [8, 16, 24];
const EXPANSION_STEPS: usize = 12;

/// CSV header, without the leading `cell` and trailing `passed` columns.
pub fn columns(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::DilateDiscrete | Experiment::DilateContinuous => &["word", "M", "residual"],
        Experiment::PolyTransport => &["word", "M", "lambda", "degree", "residual", "tail_bound_sum", "yosida_word_residual"],
        Experiment::Chernoff | Experiment::Feynman => &["N", "error"],
        Experiment::Monitor => &["partition", "N", "cocycle_residual", "diagonal_residual"],
        Experiment::Reduce => &["partition", "M", "residual", "truncation_residual", "snap_distance"],
        Experiment::Wordcheck => &["word", "reduced", "expansions", "mismatches", "homomorphism_residual"],
        Experiment::Spectrum => &["member", "M", "eigenvalues", "max_transfer_residual"],
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub cell: usize,
    pub values: Vec<String>,
    /// The quantity compared with the tolerance.
    pub residual: f64,
    pub passed: bool,
    pub runtime_ms: f64,
    pub error: Option<String>,
}

/// Per-cell seed.
fn cell_seed(plan: &Plan, cell: usize) -> u64 {
    plan.seed ^ cell as u64
}

fn member_seed(seed: u64, k: usize) -> u64 {
    seed.rotate_left(32) ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Objects shared by every cell.
pub struct Context {
    matrices: Vec<Matrix>,
    semigroups: Vec<ContractionSemigroup>,
    process: Option<MonitoredProcess>,
    reduce: Vec<(usize, Reduction, GeneratorFamily)>,
}

fn random_members(plan: &Plan, count: usize, margin: f64, norm: f64) -> Vec<Matrix> {
    let mut r = rng(member_seed(plan.seed, 0));
    (0..count)
        .map(|k| match plan.experiment {
            Experiment::DilateDiscrete => random_contraction(plan.dim, member_seed(plan.seed, k), margin),
            Experiment::Spectrum => {
                let mut ar = rng(member_seed(plan.seed, k));
                let angles: Vec<f64> = (0..plan.dim)
                    .map(|_| ar.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect();
                unitary_with_angles(&angles, member_seed(plan.seed, k))
            }
            Experiment::Feynman => random_hermitian(plan.dim, norm, &mut r),
            Experiment::Reduce if k == 1 => random_skew(plan.dim, norm, &mut r),
            Experiment::Wordcheck if plan.mode == Mode::Group => random_skew(plan.dim, norm, &mut r),
            _ => random_dissipative(plan.dim, norm, &mut r),
        })
        .collect()
}

pub fn context(plan: &Plan) -> Result<Context> {
    let matrices = match &plan.family {
        FamilySource::Explicit(m) => m.clone(),
        FamilySource::Random { count, margin, norm } => random_members(plan, *count, *margin, *norm),
    };
    let generators = !matches!(
        plan.experiment,
        Experiment::DilateDiscrete | Experiment::Spectrum | Experiment::Feynman | Experiment::Reduce
    );
    let semigroups = if generators {
        matrices
            .iter()
            .map(|a| ContractionSemigroup::new(a.clone()))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let process = match plan.experiment {
        Experiment::Chernoff => Some(cycle_monitored_system(&semigroups)?),
        Experiment::Feynman => Some(feynman_analog(&matrices[0], &matrices[1])?),
        Experiment::Monitor => Some(MonitoredProcess::new(
            semigroups[0].clone(),
            Monitor::Constant(plan.monitor.clone().expect("validated")),
            plan.order,
        )?),
        _ => None,
    };
    let reduce = if plan.experiment == Experiment::Reduce {
        let depths = plan.depths.clone().unwrap_or_else(|| vec![REDUCE_DEPTH]);
        depths
            .par_iter()
            .map(|&m| {
                let fam = GeneratorFamily::new(FamilyKind::Affine(matrices[0].clone(), matrices[1].clone()), (0.0, 1.0))?;
                Ok((m, reduce_pre_evolution(&fam, &plan.grid, m)?, fam))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(Context {
        matrices,
        semigroups,
        process,
        reduce,
    })
}

fn family_len(ctx: &Context) -> usize {
    ctx.matrices.len()
}

fn depth_list(plan: &Plan, default: &[usize]) -> Vec<usize> {
    plan.depths.clone().unwrap_or_else(|| default.to_vec())
}

pub fn cell_count(plan: &Plan, ctx: &Context) -> usize {
    match plan.experiment {
        Experiment::DilateDiscrete => plan.discrete_words.count() * plan.depths.as_ref().map_or(1, Vec::len),
        Experiment::DilateContinuous => plan.continuous_words.count() * depth_list(plan, &CONTINUOUS_DEPTHS).len(),
        Experiment::PolyTransport => plan.continuous_words.count() * plan.depths.as_ref().map_or(1, Vec::len),
        Experiment::Chernoff | Experiment::Feynman | Experiment::Monitor => plan.partitions.len(),
        Experiment::Reduce => plan.partitions.len() * ctx.reduce.len(),
        Experiment::Wordcheck => plan.free_words.count(),
        Experiment::Spectrum => family_len(ctx),
    }
}

fn discrete_word(plan: &Plan, ctx: &Context, w: usize) -> Vec<(usize, u32)> {
    match &plan.discrete_words {
        WordSource::Explicit(ws) => ws[w].clone(),
        WordSource::Random { max_len, .. } => {
            let mut r = rng(cell_seed(plan, w));
            let len = r.random_range(1..=*max_len);
            (0..len)
                .map(|_| (r.random_range(0..family_len(ctx)), r.random_range(0..=plan.max_power)))
                .collect()
        }
    }
}

fn continuous_word(plan: &Plan, ctx: &Context, w: usize) -> Vec<(usize, f64)> {
    match &plan.continuous_words {
        WordSource::Explicit(ws) => ws[w].clone(),
        WordSource::Random { max_len, .. } => {
            let mut r = rng(cell_seed(plan, w));
            let len = r.random_range(1..=*max_len);
            (0..len)
                .map(|_| (r.random_range(0..family_len(ctx)), r.random_range(0.0..=plan.max_time)))
                .collect()
        }
    }
}

fn free_word(plan: &Plan, ctx: &Context, w: usize) -> Word {
    match &plan.free_words {
        WordSource::Explicit(ws) => ws[w].clone(),
        WordSource::Random { max_len, .. } => {
            let mut r = rng(cell_seed(plan, w));
            let len = r.random_range(0..=*max_len);
            let letters = (0..len)
                .map(|_| {
                    let value = if r.random_bool(0.15) {
                        0.0
                    } else if plan.mode == Mode::Group {
                        r.random_range(-plan.max_time..plan.max_time)
                    } else {
                        r.random_range(0.0..plan.max_time)
                    };
                    Letter::new(r.random_range(0..family_len(ctx)), value)
                })
                .collect();
            Word::new(letters, plan.mode).expect("values match the mode")
        }
    }
}

fn fmt_word<T: std::fmt::Display>(word: &[(usize, T)]) -> String {
    word.iter().map(|(i, x)| format!("{i}:{x}")).collect::<Vec<_>>().join(" ")
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

struct Outcome {
    values: Vec<String>,
    residual: f64,
    passed: bool,
}

fn run_inner(plan: &Plan, ctx: &Context, cell: usize) -> Result<Outcome> {
    let tol = plan.tol;
    match plan.experiment {
        Experiment::DilateDiscrete => {
            let nd = plan.depths.as_ref().map_or(1, Vec::len);
            let word = discrete_word(plan, ctx, cell / nd);
            let depth = match &plan.depths {
                Some(ds) => ds[cell % nd],
                None => word.iter().map(|&(_, p)| p as usize).sum::<usize>() + 2,
            };
            let (idx, pow): (Vec<usize>, Vec<u32>) = word.iter().copied().unzip();
            let res = verify_discrete_word(&ctx.matrices, &idx, &pow, depth)?;
            Ok(Outcome {
                values: vec![fmt_word(&word), depth.to_string(), sci(res)],
                residual: res,
                passed: res <= tol,
            })
        }
        Experiment::DilateContinuous => {
            let depths = depth_list(plan, &CONTINUOUS_DEPTHS);
            let word = continuous_word(plan, ctx, cell / depths.len());
            let depth = depths[cell % depths.len()];
            let (idx, times): (Vec<usize>, Vec<f64>) = word.iter().copied().unzip();
            let res = verify_continuous_word(&ctx.semigroups, &idx, &times, depth)?;
            Ok(Outcome {
                values: vec![fmt_word(&word), depth.to_string(), sci(res)],
                residual: res,
                passed: res <= tol,
            })
        }
        Experiment::PolyTransport => {
            let nd = plan.depths.as_ref().map_or(1, Vec::len);
            let word = continuous_word(plan, ctx, cell / nd);
            let depth = match &plan.depths {
                Some(ds) => ds[cell % nd],
                None => plan.degree * word.len() + 2,
            };
            let (idx, times): (Vec<usize>, Vec<f64>) = word.iter().copied().unzip();
            let rep = verify_poly_transport(&ctx.semigroups, &idx, &times, plan.lambda, plan.degree, depth)?;
            Ok(Outcome {
                values: vec![
                    fmt_word(&word),
                    depth.to_string(),
                    plan.lambda.to_string(),
                    plan.degree.to_string(),
                    sci(rep.residual),
                    sci(rep.tail_bound_sum),
                    sci(rep.yosida_word_residual),
                ],
                residual: rep.residual,
                passed: rep.residual <= tol && rep.yosida_word_residual <= 2.0 * rep.tail_bound_sum + tol,
            })
        }
        Experiment::Chernoff | Experiment::Feynman => {
            let proc = ctx.process.as_ref().expect("built in context");
            let xi = &plan.partitions[cell];
            let target = if plan.experiment == Experiment::Chernoff {
                cycle_target(&ctx.semigroups, plan.t, plan.s)?
            } else {
                feynman_target(&ctx.matrices[0], &ctx.matrices[1], plan.t, plan.s)?
            };
            let err = monitoring_product(proc, xi, plan.t, plan.s)?.dist(&target);
            Ok(Outcome {
                values: vec![xi.n().to_string(), sci(err)],
                residual: err,
                passed: err <= tol,
            })
        }
        Experiment::Monitor => {
            let proc = ctx.process.as_ref().expect("built in context");
            let xi = &plan.partitions[cell];
            let half = Rational::new(1, 2);
            let (g1, g2, g3) = self_similar_split(xi, half, PartitionSystem::Homogeneous(plan.order))?;
            let mid = 0.5 * (plan.t + plan.s);
            let whole = monitoring_product(proc, &g3, plan.t, plan.s)?;
            let split = &monitoring_product(proc, &g2, plan.t, mid)? * &monitoring_product(proc, &g1, mid, plan.s)?;
            let cocycle = whole.dist(&split);
            let x = plan.monitor.as_ref().expect("validated");
            let diagonal = monitoring_product(proc, xi, plan.t, plan.t)?.dist(&x.pow(plan.order as u32));
            let res = cocycle.max(diagonal);
            Ok(Outcome {
                values: vec![xi.to_string(), xi.n().to_string(), sci(cocycle), sci(diagonal)],
                residual: res,
                passed: res <= tol,
            })
        }
        Experiment::Reduce => {
            let np = plan.partitions.len();
            let (depth, red, fam) = &ctx.reduce[cell / np];
            let xi = &plan.partitions[cell % np];
            let rep = reduction_word_check(red, fam, xi, plan.t, plan.s)?;
            let bound = (plan.grid.len() as f64).sqrt() * rep.truncation_residual + tol;
            Ok(Outcome {
                values: vec![
                    xi.to_string(),
                    depth.to_string(),
                    sci(rep.residual),
                    sci(rep.truncation_residual),
                    sci(rep.snap_distance),
                ],
                residual: rep.residual,
                passed: rep.residual <= bound,
            })
        }
        Experiment::Wordcheck => {
            let word = free_word(plan, ctx, cell);
            let reduced = word.reduce();
            let seed = cell_seed(plan, cell);
            let mut mismatches = 0;
            let mut hom: f64 = 0.0;
            let base = word.evaluate(&ctx.semigroups)?;
            for e in 0..plan.expansions {
                let expanded = word.expand(seed.wrapping_add(e as u64), EXPANSION_STEPS);
                if !same_word(&expanded.reduce(), &reduced, word.is_minimal()) {
                    mismatches += 1;
                }
                if e < 4 {
                    let product = word.multiply(&expanded)?.evaluate(&ctx.semigroups)?;
                    hom = hom.max(product.dist(&(&base * &expanded.evaluate(&ctx.semigroups)?)));
                }
            }
            Ok(Outcome {
                values: vec![
                    word.to_string(),
                    reduced.to_string(),
                    plan.expansions.to_string(),
                    mismatches.to_string(),
                    sci(hom),
                ],
                residual: hom,
                passed: mismatches == 0 && hom <= tol,
            })
        }
        Experiment::Spectrum => {
            let depth = plan.depths.as_ref().map_or(SPECTRUM_DEPTH, |d| d[0]);
            let rep = point_spectrum_transfer(&ctx.matrices[cell], depth, tol)?;
            let worst = rep.rows.iter().map(|e| e.transfer_residual).fold(0.0, f64::max);
            Ok(Outcome {
                values: vec![cell.to_string(), depth.to_string(), rep.rows.len().to_string(), sci(worst)],
                residual: worst,
                passed: rep.all_passed(),
            })
        }
    }
}

/// Minimal words compare exactly; other words may round differently when merged.
fn same_word(a: &Word, b: &Word, exact: bool) -> bool {
    if exact {
        return a == b;
    }
    a.indices() == b.indices() && a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() <= 1e-14)
}

pub fn run_cell(plan: &Plan, ctx: &Context, cell: usize) -> Row {
    let start = Instant::now();
    let outcome = run_inner(plan, ctx, cell);
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(o) => Row {
            cell,
            values: o.values,
            residual: o.residual,
            passed: o.passed,
            runtime_ms,
            error: None,
        },
        Err(e) => Row {
            cell,
            values: vec![String::new(); columns(plan.experiment).len()],
            residual: f64::NAN,
            passed: false,
            runtime_ms,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every cell in parallel; rows come back sorted by cell id.
pub fn run_all(plan: &Plan, ctx: &Context) -> Vec<Row> {
    let mut rows: Vec<Row> = (0..cell_count(plan, ctx))
        .into_par_iter()
        .map(|cell| run_cell(plan, ctx, cell))
        .collect();
    rows.sort_by_key(|r| r.cell);
    rows
}
