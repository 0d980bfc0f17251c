//! Randomized cross-checks of the engine against the oracles.
//!
//! Each `check_*` function returns an [`Outcome`]; the acceptance test and
//! the `oracle-check` command print them as a table.

use std::sync::Arc;
use std::time::Instant;

use log::info;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fglm::{find_roots, is_root, lex_gb};
use crate::field::{Field, PrimeField};
use crate::m2::{m2_sgb, m2_sgb_inspect, M2Options, Sgb};
use crate::macaulay::RowLabel;
use crate::multihom::{
    identity, macaulay_bound, mat_mul, monomials_of_degree, eval_at_matrices, M3h, MultiOrder, MultihomSystem, Solver,
};
use crate::oracle;
use crate::orders::{BaseOrder, MonomialOrder, SparseOrder};
use crate::poly::{divide, AffinePoly, SparsePoly};
use crate::semigroup::{Monomial, Point, SemigroupContext};

/// Wall-clock budget for the randomized criteria.
pub const TIME_BUDGET_SECS: f64 = 60.0;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!("criterion {}: {} [{}] {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.title, self.detail)
    }
}

/// A random mixed sparse system: one polynomial per polytope, supported on
/// all of its points.
#[derive(Debug, Clone)]
pub struct SparseInstance {
    pub seed: u64,
    pub ctx: Arc<SemigroupContext>,
    pub polys: Vec<AffinePoly<u64>>,
    pub witness: Vec<u32>,
}

impl SparseInstance {
    /// Union of the polytopes, origin included.
    pub fn points(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = self.ctx.polytopes().iter().flatten().cloned().collect();
        pts.sort();
        pts.dedup();
        pts
    }
}

pub fn random_sparse_instance(field: &PrimeField, seed: u64) -> SparseInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = if rng.gen_bool(0.3) { 3 } else { 2 };
    let k = if n == 3 { rng.gen_range(2..=3) } else { 2 };
    let side = if n == 3 { 1 } else { 2 };
    let mut box_points: Vec<Vec<i64>> = (0..n).map(|_| 0..=side).multi_product();
    box_points.retain(|p| p.iter().any(|&x| x != 0));
    let mut polytopes = Vec::new();
    for _ in 0..k {
        let m = rng.gen_range(2..=5.min(box_points.len()));
        let mut pts: Vec<Point> = box_points.choose_multiple(&mut rng, m).map(|p| Point(p.clone())).collect();
        pts.insert(0, Point::zero(n));
        polytopes.push(pts);
    }
    let ctx = Arc::new(SemigroupContext::new(polytopes.clone()).expect("nonnegative polytopes are pointed"));
    let polys = polytopes
        .iter()
        .map(|pts| SparsePoly::from_terms(field, pts.iter().map(|p| (Monomial { point: p.clone() }, field.random_nonzero(&mut rng)))))
        .collect();
    let witness = vec![if n == 3 { 3 } else { 4 }; k];
    SparseInstance { seed, ctx, polys, witness }
}

trait MultiProduct {
    fn multi_product(self) -> Vec<Vec<i64>>;
}

impl<I: Iterator<Item = std::ops::RangeInclusive<i64>>> MultiProduct for I {
    fn multi_product(self) -> Vec<Vec<i64>> {
        use itertools::Itertools;
        self.multi_cartesian_product().collect()
    }
}

#[derive(Debug, Default, Clone)]
pub struct SparseReport {
    pub instances: usize,
    pub degrees_checked: usize,
    pub premise_skipped: usize,
    pub span_failures: Vec<String>,
    pub regular_instances: usize,
    pub excluded: Vec<String>,
    pub zero_row_failures: Vec<String>,
    pub seconds: f64,
}

/// Run Algorithm 1 on random instances and compare every pruned matrix
/// with the full oracle matrix.
pub fn sparse_f5_report(field: &PrimeField, seeds: impl IntoIterator<Item = u64>) -> Result<SparseReport> {
    let start = Instant::now();
    let mut report = SparseReport::default();
    for seed in seeds {
        let inst = random_sparse_instance(field, seed);
        let pts = inst.points();
        let order = SparseOrder::new(inst.ctx.clone(), BaseOrder::Grevlex);
        let options = M2Options { witness: Some(inst.witness.clone()), auto_cap: None };
        let mut regular = true;
        let mut zero_rows_seen = Vec::new();
        m2_sgb_inspect(field, &order, &inst.polys, &options, |step| {
            let d = step.degree;
            let criterion = step
                .matrix
                .labels
                .iter()
                .filter(|l| matches!(l, RowLabel::Multiple { generator, .. } if *generator < step.previous.len()))
                .count();
            let f5 = step.matrix.nrows() - criterion;
            let df = step.f.degree().expect("homogeneous");
            let premise = oracle::rank_full(field, &pts, step.previous, d) == criterion;
            let premise_low = d < df || {
                let low = d - df;
                oracle::rank_full(field, &pts, step.previous, low) + f5 == oracle::monomials_bruteforce(&pts, low).len()
            };
            if premise {
                report.degrees_checked += 1;
                let mut full_gens = step.previous.to_vec();
                full_gens.push(step.f.clone());
                let full = oracle::full_macaulay(field, &pts, &full_gens, d);
                let pruned: Vec<_> = (0..step.matrix.nrows()).map(|i| step.matrix.row_poly(field, i)).collect();
                if !oracle::same_span(field, &pruned, &full) {
                    report.span_failures.push(format!("seed {seed} generator {} degree {d}", step.generator));
                }
            } else {
                report.premise_skipped += 1;
            }
            let nzd = oracle::nonzero_divisor_in_degree(field, &pts, step.previous, step.f, d);
            if !(premise && premise_low && nzd) {
                regular = false;
            }
            if step.echelon.zero_rows > 0 {
                zero_rows_seen.push(format!("seed {seed} generator {} degree {d}: {} zero rows", step.generator, step.echelon.zero_rows));
            }
        })?;
        report.instances += 1;
        if regular {
            report.regular_instances += 1;
            report.zero_row_failures.extend(zero_rows_seen);
        } else {
            info!("seed {seed}: excluded from the zero-row check (pre-check failed)");
            report.excluded.push(format!("seed {seed}"));
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

pub fn check_sparse_f5(report: &SparseReport) -> Outcome {
    Outcome {
        id: 1,
        title: "sparse F5 exactness",
        passed: report.instances >= 20
            && report.degrees_checked > 0
            && report.span_failures.is_empty()
            && report.seconds < TIME_BUDGET_SECS,
        detail: format!(
            "{} instances, {} degree checks equal, {} failures, {} skipped (basis premise), {:.1}s {}",
            report.instances,
            report.degrees_checked - report.span_failures.len(),
            report.span_failures.len(),
            report.premise_skipped,
            report.seconds,
            report.span_failures.join("; "),
        ),
    }
}

pub fn check_no_zero_rows(report: &SparseReport) -> Outcome {
    Outcome {
        id: 2,
        title: "no reduction to zero",
        passed: report.regular_instances > 0 && report.zero_row_failures.is_empty(),
        detail: format!(
            "{} regular instances with zero_rows = 0 everywhere, {} failures, {} excluded ({}) {}",
            report.regular_instances,
            report.zero_row_failures.len(),
            report.excluded.len(),
            report.excluded.join(", "),
            report.zero_row_failures.join("; "),
        ),
    }
}

/// Random dense system with the given multidegrees.
pub fn random_multihom_system<F: Field>(field: &F, blocks: &[usize], degrees: &[Vec<u32>], seed: u64) -> MultihomSystem<F::Elem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys = degrees
        .iter()
        .map(|d| SparsePoly::from_terms(field, monomials_of_degree(blocks, d).into_iter().map(|m| (m, field.random(&mut rng)))))
        .collect();
    MultihomSystem::new(blocks.to_vec(), polys, degrees.to_vec()).expect("terms have the declared multidegree")
}

/// Square systems on P1×P1, P2×P1 and P1×P1×P1 with multidegrees at most 2
/// per block, a positive Bézout number and a nonnegative `D_N`.
pub fn multihom_suite(field: &PrimeField, per_space: usize, seed: u64) -> Vec<MultihomSystem<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![random_multihom_system(field, &[1, 1], &[vec![1, 1], vec![1, 1]], seed)];
    for blocks in [vec![1usize, 1], vec![2, 1], vec![1, 1, 1]] {
        let n: usize = blocks.iter().sum();
        let mut made = 0;
        while made < per_space {
            let degrees: Vec<Vec<u32>> = (0..n)
                .map(|_| loop {
                    let d: Vec<u32> = blocks.iter().map(|_| rng.gen_range(0..=2)).collect();
                    if d.iter().any(|&x| x > 0) {
                        break d;
                    }
                })
                .collect();
            let bound = macaulay_bound(&degrees, &blocks);
            if oracle::bezout_count(&degrees, &blocks) == 0 || bound.iter().any(|&x| x < 0) {
                continue;
            }
            out.push(random_multihom_system(field, &blocks, &degrees, rng.gen()));
            made += 1;
        }
    }
    out
}

fn describe(s: &MultihomSystem<u64>) -> String {
    format!("blocks {:?} degrees {:?}", s.blocks, s.degrees)
}

/// Every M3H matrix at `d ≥ D_k` has full row rank.
pub fn check_m3h_full_rank(field: &PrimeField, systems: &[MultihomSystem<u64>]) -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for s in systems {
        let order = MultiOrder::default();
        let mut m3 = M3h::new(field, s, order);
        for k in 1..=s.polys.len() {
            let dk: Vec<i64> = macaulay_bound(&s.degrees[..k], &s.blocks).into_iter().map(|x| x.max(0)).collect();
            let mut degrees = vec![dk.clone(), dk.iter().map(|x| x + 1).collect()];
            for j in 0..dk.len() {
                let mut e = dk.clone();
                e[j] += 1;
                degrees.push(e);
            }
            for d in degrees {
                let mat = m3.matrix(k, &d);
                let rank = mat.rref(field).rank();
                checked += 1;
                if rank != mat.nrows() {
                    failures.push(format!("{} k={k} d={d:?}: rank {rank} < {} rows", describe(s), mat.nrows()));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: 3,
        title: "M3H full rank",
        passed: failures.is_empty() && checked > 0 && secs < TIME_BUDGET_SECS,
        detail: format!("{} systems, {checked} matrices full rank, {} failures, {secs:.1}s {}", systems.len(), failures.len(), failures.join("; ")),
    }
}

/// `#monomials(D_N) − rank = Bézout number`.
pub fn check_dimension_bezout(field: &PrimeField, systems: &[MultihomSystem<u64>]) -> Outcome {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for s in systems {
        let dn: Vec<i64> = macaulay_bound(&s.degrees, &s.blocks);
        let mut m3 = M3h::new(field, s, MultiOrder::default());
        let mat = m3.matrix(s.polys.len(), &dn);
        let dim = mat.ncols() - mat.rref(field).rank();
        let bezout = oracle::bezout_count(&s.degrees, &s.blocks);
        lines.push(format!("{dim}={bezout}"));
        if dim as u128 != bezout {
            failures.push(format!("{}: {dim} vs {bezout}", describe(s)));
        }
    }
    Outcome {
        id: 4,
        title: "dimension equals Bezout number",
        passed: failures.is_empty() && !systems.is_empty(),
        detail: format!("{} systems [{}] {}", systems.len(), lines.join(" "), failures.join("; ")),
    }
}

/// Degree tuples for the one-block Macaulay bound comparison.
pub const CLASSICAL_TUPLES: [&[u32]; 10] =
    [&[1], &[3], &[2, 2], &[2, 3], &[1, 4], &[3, 3, 3], &[1, 2, 3], &[2, 2, 2, 2], &[4, 1, 1, 2], &[5, 4, 3, 2, 1]];

pub fn check_classical_bound() -> Outcome {
    let mut failures = Vec::new();
    for degs in CLASSICAL_TUPLES {
        let n = degs.len();
        let mut all: Vec<Vec<u32>> = degs.iter().map(|&d| vec![d]).collect();
        all.push(vec![1]);
        let ours = macaulay_bound(&all, &[n])[0];
        // classical: Σ (d_i − 1) + 1 over the n + 1 forms
        let classical: i64 = all.iter().map(|d| d[0] as i64 - 1).sum::<i64>() + 1;
        if ours != classical {
            failures.push(format!("{degs:?}: {ours} vs {classical}"));
        }
    }
    Outcome {
        id: 5,
        title: "Macaulay bound degenerates to the classical one",
        passed: failures.is_empty(),
        detail: format!("{} tuples, {} mismatches {}", CLASSICAL_TUPLES.len(), failures.len(), failures.join("; ")),
    }
}

/// Commutation, annihilation, `M(x_h) = I`, and roots that vanish.
pub fn check_multiplication_maps(field: &PrimeField, systems: &[MultihomSystem<u64>]) -> Outcome {
    let mut failures = Vec::new();
    let mut roots_total = 0;
    let mut mats_total = 0;
    for s in systems {
        let tag = describe(s);
        let solver = match Solver::new(*field, s.clone(), MultiOrder::default()) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("{tag}: {e}"));
                continue;
            }
        };
        let mats = match solver.variable_matrices() {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("{tag}: {e}"));
                continue;
            }
        };
        mats_total += mats.len();
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                if mat_mul(field, &mats[i].rows, &mats[j].rows) != mat_mul(field, &mats[j].rows, &mats[i].rows) {
                    failures.push(format!("{tag}: matrices {i} and {j} do not commute"));
                }
            }
        }
        let bars: Vec<_> = s.polys.iter().map(|p| s.dehomogenize(field, p)).collect();
        for (j, b) in bars.iter().enumerate() {
            if !eval_at_matrices(field, b, &mats).iter().flatten().all(|x| *x == 0) {
                failures.push(format!("{tag}: generator {j} not annihilated"));
            }
        }
        match solver.mul_matrix(&s.x_h(field), "x_h") {
            Ok(m) if m.rows == identity(field, solver.dimension()) => {}
            _ => failures.push(format!("{tag}: M(x_h) is not the identity")),
        }
        match lex_gb(field, &mats, &solver.unit_vector()).and_then(|gb| find_roots(field, &gb)) {
            Ok(roots) => {
                roots_total += roots.len();
                if roots.len() > solver.dimension() {
                    failures.push(format!("{tag}: more roots than the basis size"));
                }
                for r in &roots {
                    if !is_root(field, &bars, r) {
                        failures.push(format!("{tag}: returned point {r:?} is not a root"));
                    }
                }
            }
            Err(e) => failures.push(format!("{tag}: {e}")),
        }
    }
    Outcome {
        id: 6,
        title: "multiplication maps",
        passed: failures.is_empty() && !systems.is_empty(),
        detail: format!(
            "{} systems, {mats_total} matrices commute and annihilate, M(x_h)=I, {roots_total} roots verified, {} failures {}",
            systems.len(),
            failures.len(),
            failures.join("; ")
        ),
    }
}

/// Instances with a certified-looking finite staircase for the division
/// checks: the unit square with two generic bilinear polynomials and two
/// mixed variants.
pub fn division_instances(field: &PrimeField, seed: u64) -> Vec<(SparseOrder, Sgb<u64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes: Vec<Vec<Vec<[i64; 2]>>> = vec![
        vec![vec![[0, 0], [1, 0], [0, 1], [1, 1]]; 2],
        vec![vec![[0, 0], [1, 0], [0, 1]], vec![[0, 0], [1, 0], [0, 1], [1, 1]]],
        vec![vec![[0, 0], [2, 0], [1, 1], [0, 1]], vec![[0, 0], [1, 0], [0, 1]]],
    ];
    let mut out = Vec::new();
    for shape in shapes {
        let polytopes: Vec<Vec<Point>> = shape.iter().map(|p| p.iter().map(|q| Point(q.to_vec())).collect()).collect();
        let ctx = Arc::new(SemigroupContext::new(polytopes.clone()).expect("pointed"));
        let order = SparseOrder::new(ctx, BaseOrder::Grevlex);
        let polys: Vec<AffinePoly<u64>> = polytopes
            .iter()
            .map(|pts| SparsePoly::from_terms(field, pts.iter().map(|p| (Monomial { point: p.clone() }, field.random_nonzero(&mut rng)))))
            .collect();
        let sgb = m2_sgb(field, &order, &polys, &M2Options { witness: Some(vec![6; polys.len()]), auto_cap: None })
            .expect("valid instance");
        out.push((order, sgb));
    }
    out
}

fn random_poly(field: &PrimeField, pts: &[Point], terms: usize, rng: &mut ChaCha8Rng) -> AffinePoly<u64> {
    SparsePoly::from_terms(field, (0..terms).map(|_| (Monomial { point: pts[rng.gen_range(0..pts.len())].clone() }, field.random_nonzero(rng))))
}

/// Randomized divisions: decreasing traces, the division identity, and
/// remainders unchanged by adding ideal elements.
pub fn check_division(field: &PrimeField, divisions: usize, seed: u64) -> Outcome {
    let instances = division_instances(field, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut done = 0;
    let mut failures = Vec::new();
    let per = divisions / (2 * instances.len()) + 1;
    for (idx, (order, sgb)) in instances.iter().enumerate() {
        let pts_f = order.ctx.points_up_to(3);
        let pts_h = order.ctx.points_up_to(2);
        let decreasing = |trace: &[Monomial]| trace.windows(2).all(|w| order.cmp(&w[1], &w[0]).is_lt());
        for trial in 0..per {
            let f = random_poly(field, &pts_f, rng.gen_range(1..=6), &mut rng);
            let h = random_poly(field, &pts_h, rng.gen_range(1..=3), &mut rng);
            let g = &sgb.elements[rng.gen_range(0..sgb.elements.len())];
            let shifted = f.add(field, &h.mul(field, g));
            let a = divide(field, &f, &sgb.elements, order);
            let b = divide(field, &shifted, &sgb.elements, order);
            done += 2;
            if !decreasing(&a.trace) || !decreasing(&b.trace) {
                failures.push(format!("instance {idx} trial {trial}: trace not decreasing"));
            }
            let mut back = a.remainder.clone();
            for (q, g) in a.quotients.iter().zip(&sgb.elements) {
                back = back.add(field, &q.mul(field, g));
            }
            if back != f {
                failures.push(format!("instance {idx} trial {trial}: division identity fails"));
            }
            if a.remainder != b.remainder {
                failures.push(format!("instance {idx} trial {trial}: remainder changed"));
            }
        }
    }
    failures.truncate(5);
    Outcome {
        id: 7,
        title: "division contract",
        passed: failures.is_empty() && done >= divisions,
        detail: format!("{done} divisions over {} bases, {} failures {}", instances.len(), failures.len(), failures.join("; ")),
    }
}

/// Degrees on the unit square and a triple breaking multiplicativity.
pub fn check_order_sanity() -> Outcome {
    let m: Vec<Point> = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|p| Point(p.to_vec())).collect();
    let ctx = Arc::new(SemigroupContext::new(vec![m.clone()]).expect("pointed"));
    let d20 = ctx.affine_degree(&Point(vec![2, 0])).ok();
    let d11 = ctx.affine_degree(&Point(vec![1, 1])).ok();
    let gens = ctx.generators().to_vec();
    let oracle_ok = oracle::delta_bruteforce(&gens, &Point(vec![2, 0]), 4) == Some(2)
        && oracle::delta_bruteforce(&gens, &Point(vec![1, 1]), 4) == Some(1);
    let mut witnesses = Vec::new();
    for base in [BaseOrder::Grevlex, BaseOrder::Lex] {
        let order = SparseOrder::new(ctx.clone(), base.clone());
        let pts = ctx.points_up_to(1);
        let found = pts.iter().find_map(|s| {
            pts.iter().find_map(|t| {
                pts.iter().find_map(|r| {
                    let (s, t, r) = (Monomial { point: s.clone() }, Monomial { point: t.clone() }, Monomial { point: r.clone() });
                    let sr = Monomial { point: &s.point + &r.point };
                    let tr = Monomial { point: &t.point + &r.point };
                    (order.cmp(&s, &t).is_lt() && order.cmp(&sr, &tr).is_gt()).then(|| format!("{}: {s:?}<{t:?} but {sr:?}>{tr:?}", base.name()))
                })
            })
        });
        witnesses.push(found);
    }
    let passed = d20 == Some(2) && d11 == Some(1) && oracle_ok && witnesses.iter().all(Option::is_some);
    Outcome {
        id: 8,
        title: "order sanity",
        passed,
        detail: format!(
            "delta(2,0)={d20:?} delta(1,1)={d11:?}, witnesses {}",
            witnesses.into_iter().map(|w| w.unwrap_or_else(|| "none".into())).collect::<Vec<_>>().join(", ")
        ),
    }
}

/// Sizes of the dense Macaulay matrix in ordinary variables that contains
/// the sparse degree-`d` matrix: total degree `d · max |p|_1`, all shifts.
/// `None` when some point has a negative coordinate.
pub fn dense_macaulay_size<E: Clone + PartialEq>(ctx: &SemigroupContext, polys: &[AffinePoly<E>], d: u32) -> Option<(usize, usize)> {
    if ctx.generators().iter().any(|g| !g.is_nonnegative()) {
        return None;
    }
    let n = ctx.dim();
    let norm = |p: &Point| p.coords().iter().sum::<i64>() as u64;
    let top = ctx.generators().iter().map(norm).max().unwrap_or(0) * d as u64;
    let count = |deg: u64| binomial(deg + n as u64, n as u64);
    let cols = count(top);
    let rows = polys
        .iter()
        .map(|f| f.monomials().map(|m| norm(&m.point)).max().unwrap_or(0))
        .filter(|&df| df <= top)
        .map(|df| count(top - df))
        .sum::<u64>();
    Some((rows as usize, cols as usize))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All criteria with the default instance counts.
pub fn run_all(seed: u64) -> Result<Vec<Outcome>> {
    let field = PrimeField::default();
    let report = sparse_f5_report(&field, seed..seed + 20)?;
    let systems = multihom_suite(&field, 4, seed);
    Ok(vec![
        check_sparse_f5(&report),
        check_no_zero_rows(&report),
        check_m3h_full_rank(&field, &systems),
        check_dimension_bezout(&field, &systems),
        check_classical_bound(),
        check_multiplication_maps(&field, &systems),
        check_division(&field, 10_000, seed),
        check_order_sanity(),
    ])
}
