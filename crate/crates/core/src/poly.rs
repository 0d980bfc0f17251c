//! Sparse polynomials over the semigroup algebras and the multivariate
//! division algorithm under the restricted division relation.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::orders::{DivisionRelation, MonomialOrder};
use crate::semigroup::{HomMonomial, Monomial, SemigroupContext};

/// A monomial type: a commutative monoid element with a canonical order
/// used for storage (not for leading terms).
pub trait Term: Clone + Eq + Hash + Ord + Debug {
    fn mul(&self, other: &Self) -> Self;
}

impl Term for Monomial {
    fn mul(&self, other: &Self) -> Self {
        Monomial { point: &self.point + &other.point }
    }
}

impl Term for HomMonomial {
    fn mul(&self, other: &Self) -> Self {
        HomMonomial { point: &self.point + &other.point, degree: self.degree + other.degree }
    }
}

/// Finite map monomial → nonzero coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly<M, E> {
    terms: BTreeMap<M, E>,
}

pub type AffinePoly<E> = SparsePoly<Monomial, E>;
pub type HomPoly<E> = SparsePoly<HomMonomial, E>;

impl<M: Debug, E: Debug> Debug for SparsePoly<M, E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c:?}*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<M: Term, E: Clone + PartialEq> SparsePoly<M, E> {
    pub fn zero() -> Self {
        SparsePoly { terms: BTreeMap::new() }
    }

    pub fn from_terms<F: Field<Elem = E>>(field: &F, terms: impl IntoIterator<Item = (M, E)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(field, m, c);
        }
        p
    }

    pub fn monomial<F: Field<Elem = E>>(field: &F, m: M, c: E) -> Self {
        Self::from_terms(field, [(m, c)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&M, &E)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &M> {
        self.terms.keys()
    }

    pub fn coeff(&self, m: &M) -> Option<&E> {
        self.terms.get(m)
    }

    pub fn add_term<F: Field<Elem = E>>(&mut self, field: &F, m: M, c: E) {
        if field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = field.add(old, &c);
                if field.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(field, m.clone(), c.clone());
        }
        out
    }

    pub fn sub<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        self.add(field, &other.neg(field))
    }

    pub fn neg<F: Field<Elem = E>>(&self, field: &F) -> Self {
        SparsePoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), field.neg(c))).collect() }
    }

    pub fn scale<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        if field.is_zero(c) {
            return Self::zero();
        }
        SparsePoly { terms: self.terms.iter().map(|(m, a)| (m.clone(), field.mul(a, c))).collect() }
    }

    /// `c · t · self`.
    pub fn mul_term<F: Field<Elem = E>>(&self, field: &F, t: &M, c: &E) -> Self {
        if field.is_zero(c) {
            return Self::zero();
        }
        SparsePoly { terms: self.terms.iter().map(|(m, a)| (m.mul(t), field.mul(a, c))).collect() }
    }

    pub fn mul<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                out.add_term(field, m.mul(n), field.mul(a, b));
            }
        }
        out
    }

    /// Apply a monomial map, summing coefficients that collide.
    pub fn map_monomials<N: Term, F: Field<Elem = E>>(&self, field: &F, f: impl Fn(&M) -> N) -> SparsePoly<N, E> {
        SparsePoly::from_terms(field, self.terms.iter().map(|(m, c)| (f(m), c.clone())))
    }

    /// Leading monomial and coefficient under `order`.
    pub fn leading_term<O: MonomialOrder<M>>(&self, order: &O) -> Result<(&M, &E)> {
        self.terms
            .iter()
            .map(|(m, c)| (order.key(m), m, c))
            .max_by(|a, b| a.0.cmp(&b.0))
            .map(|(_, m, c)| (m, c))
            .ok_or(Error::ZeroPolynomial("leading monomial"))
    }

    pub fn leading_monomial<O: MonomialOrder<M>>(&self, order: &O) -> Result<&M> {
        self.leading_term(order).map(|(m, _)| m)
    }

    /// Scale so that the leading coefficient is one.
    pub fn monic<F: Field<Elem = E>, O: MonomialOrder<M>>(&self, field: &F, order: &O) -> Result<Self> {
        let (_, c) = self.leading_term(order)?;
        let inv = field.inv(c)?;
        Ok(self.scale(field, &inv))
    }

    /// Terms sorted by decreasing order.
    pub fn sorted_terms<O: MonomialOrder<M>>(&self, order: &O) -> Vec<(&M, &E)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (order.key(m), m, c)).collect();
        v.sort_by(|a, b| b.0.cmp(&a.0));
        v.into_iter().map(|(_, m, c)| (m, c)).collect()
    }
}

impl<E: Clone + PartialEq> HomPoly<E> {
    /// Common degree of all terms, or `None` for the zero polynomial or a
    /// non-homogeneous polynomial.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// `χ`: drop the degree coordinate.
    pub fn dehomogenize<F: Field<Elem = E>>(&self, field: &F) -> AffinePoly<E> {
        self.map_monomials(field, HomMonomial::dehomogenize)
    }
}

impl<E: Clone + PartialEq> AffinePoly<E> {
    /// `δ^A(f)`: maximal affine degree over the support.
    pub fn affine_degree(&self, ctx: &SemigroupContext) -> Result<u32> {
        let mut best = None;
        for m in self.terms.keys() {
            let d = ctx.affine_degree(&m.point)?;
            best = Some(best.map_or(d, |b: u32| b.max(d)));
        }
        best.ok_or(Error::ZeroPolynomial("affine degree"))
    }

    /// `χ⁻¹`: lift every term to degree `δ^A(f)`.
    pub fn homogenize<F: Field<Elem = E>>(&self, field: &F, ctx: &SemigroupContext) -> Result<HomPoly<E>> {
        let d = self.affine_degree(ctx)?;
        Ok(self.map_monomials(field, |m| HomMonomial { point: m.point.clone(), degree: d }))
    }
}

/// Outcome of a division `f = Σ q_i g_i + r`.
#[derive(Debug, Clone)]
pub struct Division<M, E> {
    pub quotients: Vec<SparsePoly<M, E>>,
    pub remainder: SparsePoly<M, E>,
    /// Leading monomial of the running dividend at every step.
    pub trace: Vec<M>,
}

/// Multivariate division of `f` by `divisors`, reducing only when the
/// order's division relation allows it. The reducer with the lowest index
/// wins ties.
pub fn divide<M, F, O>(
    field: &F,
    f: &SparsePoly<M, F::Elem>,
    divisors: &[SparsePoly<M, F::Elem>],
    order: &O,
) -> Division<M, F::Elem>
where
    M: Term,
    F: Field,
    O: MonomialOrder<M> + DivisionRelation<M>,
{
    let leads: Vec<(M, F::Elem)> = divisors
        .iter()
        .map(|g| {
            let (m, c) = g.leading_term(order).expect("divisors must be nonzero");
            (m.clone(), field.inv(c).expect("leading coefficient is nonzero"))
        })
        .collect();

    // running dividend keyed by order so that the leading term is the last entry
    let mut work: BTreeMap<Vec<i64>, (M, F::Elem)> =
        f.terms().map(|(m, c)| (order.key(m), (m.clone(), c.clone()))).collect();
    let mut quotients = vec![SparsePoly::zero(); divisors.len()];
    let mut remainder = SparsePoly::zero();
    let mut trace = Vec::new();

    while let Some((_, (m, c))) = work.pop_last() {
        let reducer = leads.iter().enumerate().find_map(|(i, (lm, _))| order.quotient(lm, &m).map(|t| (i, t)));
        match reducer {
            Some((i, t)) => {
                let factor = field.mul(&c, &leads[i].1);
                quotients[i].add_term(field, t.clone(), factor.clone());
                for (gm, gc) in divisors[i].terms() {
                    let tm = gm.mul(&t);
                    if tm == m {
                        continue;
                    }
                    let delta = field.neg(&field.mul(gc, &factor));
                    let key = order.key(&tm);
                    match work.get_mut(&key) {
                        Some((_, old)) => {
                            *old = field.add(old, &delta);
                            if field.is_zero(old) {
                                work.remove(&key);
                            }
                        }
                        None => {
                            work.insert(key, (tm, delta));
                        }
                    }
                }
            }
            None => remainder.add_term(field, m.clone(), c),
        }
        debug_assert!(trace.last().is_none_or(|prev| order.cmp(&m, prev).is_lt()));
        trace.push(m);
    }
    Division { quotients, remainder, trace }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::orders::{BaseOrder, SparseOrder};
    use crate::semigroup::Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn square() -> Arc<SemigroupContext> {
        let m = [[0, 0], [1, 0], [0, 1], [1, 1]];
        Arc::new(SemigroupContext::new(vec![m.iter().map(|p| Point(p.to_vec())).collect()]).unwrap())
    }

    fn poly(f: &PrimeField, terms: &[([i64; 2], i64)]) -> AffinePoly<u64> {
        SparsePoly::from_terms(f, terms.iter().map(|(p, c)| (Monomial::new(p.to_vec()), f.from_i64(*c))))
    }

    fn random_poly(f: &PrimeField, ctx: &SemigroupContext, deg: u32, n: usize, rng: &mut ChaCha8Rng) -> AffinePoly<u64> {
        let pts = ctx.points_up_to(deg);
        SparsePoly::from_terms(
            f,
            (0..n).map(|_| (Monomial { point: pts[rng.gen_range(0..pts.len())].clone() }, f.random_nonzero(rng))),
        )
    }

    #[test]
    fn arithmetic_examples() {
        let f = PrimeField::default();
        let a = poly(&f, &[([1, 0], 1)]);
        let b = poly(&f, &[([0, 1], 1)]);
        assert_eq!(a.mul(&f, &b), poly(&f, &[([1, 1], 1)]));
        let g = poly(&f, &[([2, 0], 3), ([1, 1], -2)]);
        assert!(g.add(&f, &g.neg(&f)).is_zero());
        assert_eq!(g.scale(&f, &0), SparsePoly::zero());
    }

    #[test]
    fn ring_laws() {
        let f = PrimeField::default();
        let ctx = square();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_poly(&f, &ctx, 2, 4, &mut rng);
            let b = random_poly(&f, &ctx, 2, 4, &mut rng);
            let c = random_poly(&f, &ctx, 2, 4, &mut rng);
            assert_eq!(a.mul(&f, &b.add(&f, &c)), a.mul(&f, &b).add(&f, &a.mul(&f, &c)));
            assert_eq!(a.mul(&f, &b), b.mul(&f, &a));
        }
    }

    #[test]
    fn leading_monomial_examples() {
        let f = PrimeField::default();
        let o = SparseOrder::new(square(), BaseOrder::Grevlex);
        let g = poly(&f, &[([2, 0], 1), ([1, 1], 1)]);
        assert_eq!(g.leading_monomial(&o).unwrap(), &Monomial::new(vec![2, 0]));
        let single = poly(&f, &[([0, 1], 4)]);
        assert_eq!(single.leading_term(&o).unwrap(), (&Monomial::new(vec![0, 1]), &4));
        assert_eq!(g.scale(&f, &9).leading_monomial(&o).unwrap(), g.leading_monomial(&o).unwrap());
        assert!(SparsePoly::<Monomial, u64>::zero().leading_term(&o).is_err());
    }

    #[test]
    fn homogenize_examples() {
        let f = PrimeField::default();
        let ctx = square();
        let g = poly(&f, &[([2, 0], 1), ([1, 1], 1)]);
        let h = g.homogenize(&f, &ctx).unwrap();
        let expected = SparsePoly::from_terms(
            &f,
            [(HomMonomial::new(vec![2, 0], 2), 1), (HomMonomial::new(vec![1, 1], 2), 1)],
        );
        assert_eq!(h, expected);
        assert_eq!(h.degree(), Some(2));
        assert_eq!(h.dehomogenize(&f), g);
        let m = poly(&f, &[([1, 1], 5)]);
        assert_eq!(m.homogenize(&f, &ctx).unwrap().degree(), Some(1));
        assert!(SparsePoly::<Monomial, u64>::zero().homogenize(&f, &ctx).is_err());
    }

    #[test]
    fn dehomogenize_is_a_ring_map_and_injective_per_degree() {
        let f = PrimeField::default();
        let ctx = square();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let a = random_poly(&f, &ctx, 2, 3, &mut rng).homogenize(&f, &ctx).unwrap();
            let b = random_poly(&f, &ctx, 2, 3, &mut rng).homogenize(&f, &ctx).unwrap();
            assert_eq!(a.mul(&f, &b).dehomogenize(&f), a.dehomogenize(&f).mul(&f, &b.dehomogenize(&f)));
        }
        let mons = ctx.hom_monomials(3);
        let images: std::collections::HashSet<_> = mons.iter().map(HomMonomial::dehomogenize).collect();
        assert_eq!(images.len(), mons.len());
        // homogenizing a dehomogenized polynomial strips powers of X^(0,1)
        let g = poly(&f, &[([1, 0], 1), ([0, 0], 2)]).homogenize(&f, &ctx).unwrap();
        let lifted = g.mul_term(&f, &HomMonomial::new(vec![0, 0], 2), &1);
        assert_eq!(lifted.dehomogenize(&f).homogenize(&f, &ctx).unwrap(), g);
    }

    #[test]
    fn division_examples() {
        let f = PrimeField::default();
        let o = SparseOrder::new(square(), BaseOrder::Grevlex);
        let g = poly(&f, &[([1, 1], 1), ([1, 0], 3)]);
        let div = divide(&f, &g, &[g.clone()], &o);
        assert!(div.remainder.is_zero());
        assert_eq!(div.quotients[0], poly(&f, &[([0, 0], 1)]));

        let h = poly(&f, &[([0, 1], 1), ([0, 0], 1)]);
        let div = divide(&f, &h, &[g.clone()], &o);
        assert_eq!(div.remainder, h);
        assert!(div.quotients[0].is_zero());
    }

    #[test]
    fn division_identity_and_trace() {
        let f = PrimeField::default();
        let ctx = square();
        let o = SparseOrder::new(ctx.clone(), BaseOrder::Grevlex);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let p = random_poly(&f, &ctx, 4, 8, &mut rng);
            let gs: Vec<_> = (0..3).map(|_| random_poly(&f, &ctx, 2, 3, &mut rng)).collect();
            let div = divide(&f, &p, &gs, &o);
            let mut sum = div.remainder.clone();
            for (q, g) in div.quotients.iter().zip(&gs) {
                sum = sum.add(&f, &q.mul(&f, g));
            }
            assert_eq!(sum, p);
            for w in div.trace.windows(2) {
                assert!(o.cmp(&w[1], &w[0]).is_lt());
            }
            let leads: Vec<_> = gs.iter().map(|g| g.leading_monomial(&o).unwrap().clone()).collect();
            for m in div.remainder.monomials() {
                assert!(leads.iter().all(|l| o.quotient(l, m).is_none()));
            }
        }
    }

    /// Reducing with plain semigroup divisibility can raise the leading
    /// monomial, which is why the division relation is restricted.
    #[test]
    fn unrestricted_reduction_can_increase_leading_monomial() {
        let f = PrimeField::default();
        let ctx = square();
        let o = SparseOrder::new(ctx.clone(), BaseOrder::Grevlex);
        let pts = ctx.points_up_to(2);
        let mut found = None;
        'search: for lm in &pts {
            for other in &pts {
                let g = SparsePoly::from_terms(&f, [(Monomial { point: lm.clone() }, 1), (Monomial { point: other.clone() }, 1)]);
                if g.leading_monomial(&o).unwrap().point != *lm {
                    continue;
                }
                for target in &pts {
                    let t = target - lm;
                    if !ctx.contains(&t) || ctx.divides_affine(&Monomial { point: lm.clone() }, &Monomial { point: target.clone() }).is_some() {
                        continue;
                    }
                    let tm = Monomial { point: t };
                    let dividend = SparsePoly::monomial(&f, Monomial { point: target.clone() }, 1);
                    let step = dividend.sub(&f, &g.mul_term(&f, &tm, &1));
                    if !step.is_zero() && o.cmp(step.leading_monomial(&o).unwrap(), &Monomial { point: target.clone() }).is_gt() {
                        found = Some((g, target.clone()));
                        break 'search;
                    }
                }
            }
        }
        let (g, target) = found.expect("an increasing naive step exists on the unit square");
        // the restricted relation refuses that step
        let div = divide(&f, &SparsePoly::monomial(&f, Monomial { point: target }, 1), &[g], &o);
        assert!(div.quotients[0].is_zero());
    }
}
