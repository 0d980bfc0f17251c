//! Mixed sparse Matrix-F5: sparse Gröbner bases degree by degree.
//!
//! For each generator `f_i` the homogenized basis of the previous ideal is
//! used twice: its shifts fill the criterion rows (one per divisible
//! monomial), and its leading monomials prune the multipliers of `f_i`.

use std::sync::Arc;

use log::{debug, info, warn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::macaulay::{Echelon, MacaulayMatrix, RowLabel};
use crate::orders::{GradedSparseOrder, MonomialOrder, SparseOrder};
use crate::poly::{divide, AffinePoly, HomPoly};
use crate::semigroup::{HomMonomial, Monomial, SemigroupContext};

/// Upper limit on degrees explored in auto mode.
pub const DEFAULT_AUTO_CAP: u32 = 24;

#[derive(Debug, Clone, Default)]
pub struct M2Options {
    /// Witness degree per generator; `None` selects auto mode.
    pub witness: Option<Vec<u32>>,
    /// Hard stop for auto mode.
    pub auto_cap: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub generator: usize,
    pub degree: u32,
    pub criterion_rows: usize,
    pub f5_rows: usize,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub rank: usize,
    pub zero_rows: usize,
    pub new_elements: usize,
}

/// View of one eliminated matrix, handed to inspection callbacks.
pub struct Step<'a, E> {
    pub generator: usize,
    pub degree: u32,
    pub previous: &'a [HomPoly<E>],
    pub f: &'a HomPoly<E>,
    pub matrix: &'a MacaulayMatrix<HomMonomial, E>,
    pub echelon: &'a Echelon<HomMonomial, E>,
}

#[derive(Debug, Clone)]
pub struct Sgb<E> {
    /// Minimal basis: no leading monomial divides another.
    pub elements: Vec<AffinePoly<E>>,
    /// `G_1, ..., G_k` as produced by the algorithm.
    pub stages: Vec<Vec<AffinePoly<E>>>,
    pub stats: Vec<DegreeStats>,
    /// Witness degree actually used per generator.
    pub witness: Vec<u32>,
    /// True when degrees were chosen by the auto-mode heuristic.
    pub heuristic: bool,
    pub order: SparseOrder,
}

impl<E: Clone + PartialEq + std::fmt::Debug> Sgb<E> {
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.elements.iter().map(|g| g.leading_monomial(&self.order).expect("nonzero").clone()).collect()
    }

    /// Remainder of `f` modulo the basis.
    pub fn reduce<F: Field<Elem = E>>(&self, field: &F, f: &AffinePoly<E>) -> AffinePoly<E> {
        divide(field, f, &self.elements, &self.order).remainder
    }

    /// Every input generator reduces to zero.
    pub fn generates<F: Field<Elem = E>>(&self, field: &F, inputs: &[AffinePoly<E>]) -> bool {
        inputs.iter().all(|f| self.reduce(field, f).is_zero())
    }
}

/// One row per degree-`d` monomial divisible by a leading monomial of
/// `previous`, using the divisor with the smallest quotient.
pub fn criterion_rows<E: Clone + PartialEq, F: Field<Elem = E>>(
    field: &F,
    order: &GradedSparseOrder,
    previous: &[HomPoly<E>],
    leads: &[HomMonomial],
    d: u32,
) -> Vec<(RowLabel<HomMonomial>, HomPoly<E>)> {
    if previous.is_empty() {
        return Vec::new();
    }
    let ctx = order.ctx();
    let mut rows = Vec::new();
    for m in ctx.hom_monomials(d) {
        let mut best: Option<(Vec<i64>, usize, HomMonomial)> = None;
        for (i, lm) in leads.iter().enumerate() {
            if let Some(t) = ctx.divides(lm, &m) {
                let key = order.key(&t);
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, i, t));
                }
            }
        }
        if let Some((_, i, t)) = best {
            let row = previous[i].mul_term(field, &t, &field.one());
            rows.push((RowLabel::Multiple { generator: i, multiplier: t }, row));
        }
    }
    rows
}

/// Shifts `X^(s, d - df) · f` whose multiplier is not divisible by any
/// leading monomial of the previous basis.
pub fn f5_new_rows<E: Clone + PartialEq, F: Field<Elem = E>>(
    field: &F,
    ctx: &SemigroupContext,
    leads: &[HomMonomial],
    f: &HomPoly<E>,
    index: usize,
    d: u32,
) -> Vec<(RowLabel<HomMonomial>, HomPoly<E>)> {
    let Some(df) = f.degree() else { return Vec::new() };
    if d < df {
        return Vec::new();
    }
    ctx.hom_monomials(d - df)
        .into_iter()
        .filter(|s| leads.iter().all(|lm| ctx.divides(lm, s).is_none()))
        .map(|s| {
            let row = f.mul_term(field, &s, &field.one());
            (RowLabel::Multiple { generator: index, multiplier: s }, row)
        })
        .collect()
}

/// Compute a sparse Gröbner basis of `polys`.
pub fn m2_sgb<F: Field>(
    field: &F,
    order: &SparseOrder,
    polys: &[AffinePoly<F::Elem>],
    options: &M2Options,
) -> Result<Sgb<F::Elem>> {
    m2_sgb_inspect(field, order, polys, options, |_| {})
}

/// Like [`m2_sgb`], calling `inspect` after every elimination.
pub fn m2_sgb_inspect<F: Field>(
    field: &F,
    order: &SparseOrder,
    polys: &[AffinePoly<F::Elem>],
    options: &M2Options,
    mut inspect: impl FnMut(&Step<'_, F::Elem>),
) -> Result<Sgb<F::Elem>> {
    if polys.is_empty() {
        return Err(Error::EmptyInput("no polynomials"));
    }
    if let Some(w) = &options.witness {
        if w.len() != polys.len() {
            return Err(Error::WitnessLength { got: w.len(), expected: polys.len() });
        }
    }
    let ctx: Arc<SemigroupContext> = order.ctx.clone();
    let graded = order.graded();
    let homogenized: Vec<HomPoly<F::Elem>> =
        polys.iter().map(|f| f.homogenize(field, &ctx)).collect::<Result<_>>()?;
    let cap = options.auto_cap.unwrap_or(DEFAULT_AUTO_CAP);

    let mut previous: Vec<AffinePoly<F::Elem>> = Vec::new();
    let mut stages = Vec::new();
    let mut stats = Vec::new();
    let mut witness = Vec::new();

    for (i, f_h) in homogenized.iter().enumerate() {
        let df = f_h.degree().expect("homogenized polynomial");
        let prev_h: Vec<HomPoly<F::Elem>> =
            previous.iter().map(|g| g.homogenize(field, &ctx)).collect::<Result<_>>()?;
        let prev_leads: Vec<HomMonomial> =
            prev_h.iter().map(|g| g.leading_monomial(&graded).expect("nonzero").clone()).collect();
        let start = prev_h.iter().filter_map(|g| g.degree()).max().unwrap_or(0).max(df);

        let mut current: Vec<AffinePoly<F::Elem>> = Vec::new();
        let mut current_leads: Vec<Monomial> = Vec::new();
        let mut streak = 0;
        let mut d = 0;
        loop {
            d += 1;
            match &options.witness {
                Some(w) if d > w[i] => break,
                None if d > cap => {
                    warn!("generator {i}: auto mode reached degree cap {cap}");
                    break;
                }
                _ => {}
            }

            let mut rows = criterion_rows(field, &graded, &prev_h, &prev_leads, d);
            let criterion = rows.len();
            rows.extend(f5_new_rows(field, &ctx, &prev_leads, f_h, prev_h.len(), d));
            let f5 = rows.len() - criterion;

            let matrix = MacaulayMatrix::build(field, rows, &graded, |m: &HomMonomial| m.degree)?;
            let echelon = matrix.rref(field);
            inspect(&Step { generator: i, degree: d, previous: &prev_h, f: f_h, matrix: &matrix, echelon: &echelon });

            // smallest leading monomials first so that minimal ones win
            let mut added = 0;
            for r in (0..echelon.rank()).rev() {
                let g = echelon.row_poly(field, r).dehomogenize(field);
                let lm = echelon.columns[echelon.pivots[r]].dehomogenize();
                if current_leads.iter().any(|l| ctx.divides_affine(l, &lm).is_some()) {
                    continue;
                }
                current_leads.push(lm);
                current.push(g);
                added += 1;
            }
            debug!("generator {i} degree {d}: {}x{} rank {} new {added}", matrix.nrows(), matrix.ncols(), echelon.rank());
            stats.push(DegreeStats {
                generator: i,
                degree: d,
                criterion_rows: criterion,
                f5_rows: f5,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                nnz: matrix.nnz(),
                rank: echelon.rank(),
                zero_rows: echelon.zero_rows,
                new_elements: added,
            });

            if options.witness.is_none() {
                if added > 0 {
                    streak = 0;
                } else if d > start {
                    streak += 1;
                }
                if d >= start && streak >= df {
                    break;
                }
            }
        }
        witness.push(d - 1);
        info!("generator {i}: {} elements up to degree {}", current.len(), d - 1);
        stages.push(current.clone());
        previous = current;
    }

    let elements = minimalize(&ctx, order, previous);
    Ok(Sgb { elements, stages, stats, witness, heuristic: options.witness.is_none(), order: order.clone() })
}

/// Drop elements whose leading monomial is divisible by another's; among
/// equal leading monomials the earliest survives.
fn minimalize<E: Clone + PartialEq>(ctx: &SemigroupContext, order: &SparseOrder, basis: Vec<AffinePoly<E>>) -> Vec<AffinePoly<E>> {
    let leads: Vec<Monomial> = basis.iter().map(|g| g.leading_monomial(order).expect("nonzero").clone()).collect();
    basis
        .into_iter()
        .enumerate()
        .filter(|(i, _)| {
            !leads.iter().enumerate().any(|(j, l)| {
                j != *i && ctx.divides_affine(l, &leads[*i]).is_some() && (l != &leads[*i] || j < *i)
            })
        })
        .map(|(_, g)| g)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::oracle;
    use crate::orders::BaseOrder;
    use crate::poly::SparsePoly;
    use crate::semigroup::Point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn square() -> Arc<SemigroupContext> {
        let m = [[0, 0], [1, 0], [0, 1], [1, 1]];
        Arc::new(SemigroupContext::new(vec![m.iter().map(|p| Point(p.to_vec())).collect()]).unwrap())
    }

    fn random_in(f: &PrimeField, pts: &[Point], rng: &mut ChaCha8Rng) -> AffinePoly<u64> {
        SparsePoly::from_terms(f, pts.iter().map(|p| (Monomial { point: p.clone() }, f.random_nonzero(rng))))
    }

    #[test]
    fn empty_and_bad_witness() {
        let f = PrimeField::default();
        let o = SparseOrder::new(square(), BaseOrder::Grevlex);
        assert!(matches!(m2_sgb(&f, &o, &[], &M2Options::default()), Err(Error::EmptyInput(_))));
        let p = SparsePoly::monomial(&f, Monomial::new(vec![1, 0]), 1);
        let opts = M2Options { witness: Some(vec![1, 2]), auto_cap: None };
        assert!(matches!(m2_sgb(&f, &o, &[p], &opts), Err(Error::WitnessLength { got: 2, expected: 1 })));
    }

    #[test]
    fn empty_previous_gives_no_criterion_rows() {
        let f = PrimeField::default();
        let o = SparseOrder::new(square(), BaseOrder::Grevlex).graded();
        assert!(criterion_rows::<u64, _>(&f, &o, &[], &[], 3).is_empty());
    }

    #[test]
    fn single_monomial_criterion_rows() {
        let f = PrimeField::default();
        let ctx = square();
        let o = SparseOrder::new(ctx.clone(), BaseOrder::Grevlex).graded();
        let lm = HomMonomial::new(vec![1, 0], 1);
        let g = SparsePoly::monomial(&f, lm.clone(), 1);
        let rows = criterion_rows(&f, &o, &[g], &[lm.clone()], 2);
        let expected: Vec<HomMonomial> =
            ctx.hom_monomials(2).into_iter().filter(|m| ctx.divides(&lm, m).is_some()).collect();
        assert_eq!(rows.len(), expected.len());
        let gens = ctx.generators().to_vec();
        for ((_, row), m) in rows.iter().zip(&expected) {
            assert_eq!(row.monomials().next(), Some(m));
            // δ-additivity via the oracle
            let t = &m.point - &lm.point;
            let dt = oracle::delta_bruteforce(&gens, &t, 4).unwrap();
            assert_eq!(1 + dt, oracle::delta_bruteforce(&gens, &m.point, 4).unwrap());
        }
    }

    #[test]
    fn f5_rows_low_degree_and_empty_basis() {
        let f = PrimeField::default();
        let ctx = square();
        let g = SparsePoly::from_terms(&f, [(HomMonomial::new(vec![2, 0], 2), 1), (HomMonomial::new(vec![0, 0], 2), 1)]);
        assert!(f5_new_rows(&f, &ctx, &[], &g, 0, 1).is_empty());
        assert_eq!(f5_new_rows(&f, &ctx, &[], &g, 0, 3).len(), ctx.hom_monomials(1).len());
    }

    #[test]
    fn principal_ideal() {
        let f = PrimeField::default();
        let o = SparseOrder::new(square(), BaseOrder::Grevlex);
        let p = SparsePoly::from_terms(&f, [(Monomial::new(vec![1, 1]), 3), (Monomial::new(vec![0, 0]), 1)]);
        let sgb = m2_sgb(&f, &o, &[p.clone()], &M2Options { witness: Some(vec![3]), auto_cap: None }).unwrap();
        assert_eq!(sgb.elements, vec![p.monic(&f, &o).unwrap()]);
        assert!(sgb.stats.iter().all(|s| s.zero_rows == 0));
        assert_eq!(sgb.witness, vec![3]);
    }

    #[test]
    fn generic_pair_on_square_has_finite_staircase() {
        let f = PrimeField::default();
        let ctx = square();
        let o = SparseOrder::new(ctx.clone(), BaseOrder::Grevlex);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = ctx.points_up_to(1);
        let polys: Vec<_> = (0..2).map(|_| random_in(&f, &pts, &mut rng)).collect();
        let sgb = m2_sgb(&f, &o, &polys, &M2Options::default()).unwrap();
        assert!(sgb.generates(&f, &polys));
        assert!(sgb.stats.iter().all(|s| s.zero_rows == 0));
        // two generic bilinear equations have two solutions: staircase of size 2
        let leads = sgb.leading_monomials();
        let standard: Vec<_> = ctx
            .points_up_to(6)
            .into_iter()
            .filter(|p| leads.iter().all(|l| ctx.divides_affine(l, &Monomial { point: p.clone() }).is_none()))
            .collect();
        assert_eq!(standard.len(), 2);
        // membership agrees with the brute-force oracle
        let m: Vec<Point> = ctx.polytopes()[0].clone();
        for p in &standard {
            let x = SparsePoly::monomial(&f, Monomial { point: p.clone() }, 1);
            assert_eq!(
                oracle::ideal_membership_bruteforce(&f, &m, &polys, &x, 3),
                oracle::Membership::NotFoundUpTo(3)
            );
        }
        for g in &sgb.elements {
            assert!(matches!(oracle::ideal_membership_bruteforce(&f, &m, &polys, g, 4), oracle::Membership::Member(_)));
        }
    }

    #[test]
    fn witness_degrees_are_honored() {
        let f = PrimeField::default();
        let ctx = square();
        let o = SparseOrder::new(ctx.clone(), BaseOrder::Grevlex);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pts = ctx.points_up_to(1);
        let polys: Vec<_> = (0..2).map(|_| random_in(&f, &pts, &mut rng)).collect();
        let sgb = m2_sgb(&f, &o, &polys, &M2Options { witness: Some(vec![3, 4]), auto_cap: None }).unwrap();
        assert_eq!(sgb.witness, vec![3, 4]);
        assert_eq!(sgb.stats.iter().filter(|s| s.generator == 0).count(), 3);
        assert_eq!(sgb.stats.iter().filter(|s| s.generator == 1).count(), 4);
    }
}
