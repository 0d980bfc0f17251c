//! Monomial orders: base orders on exponent vectors, the sparse order `≺`
//! (affine degree first, base order on ties) and its grading `≺_h`.
//!
//! Orders are expressed through sort keys: `cmp(a, b)` is the lexicographic
//! comparison of `key(a)` and `key(b)`. This keeps column sorting and
//! leading-term lookups cheap.

use std::cmp::Ordering;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::semigroup::{HomMonomial, Monomial, SemigroupContext};

/// A total order on exponent vectors, compatible with addition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseOrder {
    #[default]
    Grevlex,
    Lex,
    /// Weight vector first, grevlex on ties.
    Weight(Vec<i64>),
}

impl FromStr for BaseOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "grevlex" => Ok(BaseOrder::Grevlex),
            "lex" => Ok(BaseOrder::Lex),
            other => Err(Error::Document(format!("unknown order {other:?} (expected grevlex or lex)"))),
        }
    }
}

impl BaseOrder {
    /// Sort key of an exponent vector. `grading` replaces total degree for
    /// semigroups that are not contained in `N^n`.
    pub fn key(&self, exps: &[i64], grading: Option<&[i64]>) -> Vec<i64> {
        let weight = |w: &[i64]| exps.iter().zip(w).map(|(a, b)| a * b).sum::<i64>();
        let total = match grading {
            Some(w) => weight(w),
            None => exps.iter().sum(),
        };
        let revlex = exps.iter().rev().map(|&e| -e);
        match self {
            BaseOrder::Grevlex => std::iter::once(total).chain(revlex).collect(),
            BaseOrder::Lex => match grading {
                Some(_) => std::iter::once(total).chain(exps.iter().copied()).collect(),
                None => exps.to_vec(),
            },
            BaseOrder::Weight(w) => [weight(w), total].into_iter().chain(revlex).collect(),
        }
    }

    pub fn cmp_exps(&self, a: &[i64], b: &[i64]) -> Ordering {
        self.key(a, None).cmp(&self.key(b, None))
    }

    pub fn name(&self) -> String {
        match self {
            BaseOrder::Grevlex => "grevlex".into(),
            BaseOrder::Lex => "lex".into(),
            BaseOrder::Weight(w) => format!("weight{w:?}"),
        }
    }
}

/// Order on monomials of type `M`.
pub trait MonomialOrder<M> {
    fn key(&self, m: &M) -> Vec<i64>;

    fn cmp(&self, a: &M, b: &M) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}

/// Quotient under a divisibility relation: `Some(t)` with `a·t = b`.
pub trait DivisionRelation<M> {
    fn quotient(&self, a: &M, b: &M) -> Option<M>;
}

/// Comparison of multidegrees in `N^k`: total degree, then lexicographic.
pub fn cmp_degree_vectors(a: &[u32], b: &[u32]) -> Ordering {
    let (ta, tb): (u64, u64) = (a.iter().map(|&x| x as u64).sum(), b.iter().map(|&x| x as u64).sum());
    ta.cmp(&tb).then_with(|| a.cmp(b))
}

/// The sparse order: `δ^A` first, base order on ties.
#[derive(Debug, Clone)]
pub struct SparseOrder {
    pub base: BaseOrder,
    pub ctx: Arc<SemigroupContext>,
    grading: Option<Vec<i64>>,
}

impl SparseOrder {
    pub fn new(ctx: Arc<SemigroupContext>, base: BaseOrder) -> Self {
        let standard = ctx.generators().iter().all(|g| g.is_nonnegative());
        let grading = (!standard).then(|| ctx.grading().to_vec());
        SparseOrder { base, ctx, grading }
    }

    pub fn graded(&self) -> GradedSparseOrder {
        GradedSparseOrder { sparse: self.clone() }
    }

    fn base_key(&self, exps: &[i64]) -> Vec<i64> {
        self.base.key(exps, self.grading.as_deref())
    }

    fn delta(&self, m: &Monomial) -> i64 {
        self.ctx.affine_degree(&m.point).expect("monomial outside the semigroup") as i64
    }
}

impl MonomialOrder<Monomial> for SparseOrder {
    fn key(&self, m: &Monomial) -> Vec<i64> {
        let mut k = vec![self.delta(m)];
        k.extend(self.base_key(m.point.coords()));
        k
    }
}

impl DivisionRelation<Monomial> for SparseOrder {
    fn quotient(&self, a: &Monomial, b: &Monomial) -> Option<Monomial> {
        self.ctx.divides_affine(a, b)
    }
}

/// The grading of the sparse order on `K[S^h]`: degree first, then `≺`.
#[derive(Debug, Clone)]
pub struct GradedSparseOrder {
    pub sparse: SparseOrder,
}

impl GradedSparseOrder {
    pub fn ctx(&self) -> &SemigroupContext {
        &self.sparse.ctx
    }
}

impl MonomialOrder<HomMonomial> for GradedSparseOrder {
    fn key(&self, m: &HomMonomial) -> Vec<i64> {
        let mut k = vec![m.degree as i64];
        k.extend(self.sparse.key(&m.dehomogenize()));
        k
    }
}

impl DivisionRelation<HomMonomial> for GradedSparseOrder {
    fn quotient(&self, a: &HomMonomial, b: &HomMonomial) -> Option<HomMonomial> {
        self.sparse.ctx.divides(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square() -> Arc<SemigroupContext> {
        let m = [[0, 0], [1, 0], [0, 1], [1, 1]];
        Arc::new(SemigroupContext::new(vec![m.iter().map(|p| Point(p.to_vec())).collect()]).unwrap())
    }

    fn mono(v: &[i64]) -> Monomial {
        Monomial::new(v.to_vec())
    }

    #[test]
    fn base_orders() {
        let g = BaseOrder::Grevlex;
        assert_eq!(g.cmp_exps(&[1, 0], &[0, 1]), Ordering::Greater);
        assert_eq!(g.cmp_exps(&[0, 2], &[1, 0]), Ordering::Greater);
        assert_eq!(g.cmp_exps(&[2, 0, 1], &[1, 2, 0]), Ordering::Less);
        let l = BaseOrder::Lex;
        assert_eq!(l.cmp_exps(&[1, 0], &[0, 5]), Ordering::Greater);
        assert_eq!(BaseOrder::Weight(vec![0, 1]).cmp_exps(&[5, 0], &[0, 1]), Ordering::Less);
        assert_eq!("lex".parse::<BaseOrder>().unwrap(), BaseOrder::Lex);
        assert!("deglex".parse::<BaseOrder>().is_err());
    }

    #[test]
    fn sparse_order_examples() {
        let o = SparseOrder::new(square(), BaseOrder::Grevlex);
        assert_eq!(o.cmp(&mono(&[1, 1]), &mono(&[2, 0])), Ordering::Less);
        assert_eq!(o.cmp(&mono(&[2, 1]), &mono(&[2, 1])), Ordering::Equal);
        // equal affine degree: decided by grevlex
        assert_eq!(o.cmp(&mono(&[0, 1]), &mono(&[1, 0])), Ordering::Less);
        assert_eq!(o.cmp(&mono(&[0, 0]), &mono(&[1, 1])), Ordering::Less);
    }

    #[test]
    fn graded_order_examples() {
        let o = SparseOrder::new(square(), BaseOrder::Grevlex);
        let h = o.graded();
        let a = HomMonomial::new(vec![2, 2], 2);
        let b = HomMonomial::new(vec![0, 0], 3);
        assert_eq!(h.cmp(&a, &b), Ordering::Less);
        for (s, t) in [([1, 1], [2, 0]), ([0, 1], [1, 0]), ([2, 1], [1, 2])] {
            let hs = HomMonomial::new(s.to_vec(), 3);
            let ht = HomMonomial::new(t.to_vec(), 3);
            assert_eq!(h.cmp(&hs, &ht), o.cmp(&mono(&s), &mono(&t)));
        }
    }

    #[test]
    fn degree_vectors() {
        assert_eq!(cmp_degree_vectors(&[2, 0], &[0, 1]), Ordering::Greater);
        assert_eq!(cmp_degree_vectors(&[1, 1], &[2, 0]), Ordering::Less);
        assert_eq!(cmp_degree_vectors(&[1, 1], &[1, 1]), Ordering::Equal);
    }

    #[test]
    fn sparse_order_is_not_a_monomial_order() {
        for base in [BaseOrder::Grevlex, BaseOrder::Lex] {
            let o = SparseOrder::new(square(), base.clone());
            let pts = o.ctx.points_up_to(2);
            let witness = pts.iter().find_map(|s| {
                pts.iter().find_map(|t| {
                    pts.iter().find_map(|r| {
                        let (s, t, r) = (Monomial { point: s.clone() }, Monomial { point: t.clone() }, &r.clone());
                        let sr = Monomial { point: &s.point + r };
                        let tr = Monomial { point: &t.point + r };
                        (o.cmp(&s, &t) == Ordering::Less && o.cmp(&sr, &tr) == Ordering::Greater).then_some(())
                    })
                })
            });
            assert!(witness.is_some(), "no incompatibility witness for {base:?}");
        }
        let o = SparseOrder::new(square(), BaseOrder::Grevlex);
        let (s, t, r) = (mono(&[0, 1]), mono(&[1, 0]), Point(vec![0, 1]));
        assert_eq!(o.cmp(&s, &t), Ordering::Less);
        assert_eq!(o.cmp(&Monomial { point: &s.point + &r }, &Monomial { point: &t.point + &r }), Ordering::Greater);
    }

    #[test]
    fn order_laws_and_conditional_compatibility() {
        let o = SparseOrder::new(square(), BaseOrder::Grevlex);
        let pts = o.ctx.points_up_to(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pick = |rng: &mut ChaCha8Rng| Monomial { point: pts[rng.gen_range(0..pts.len())].clone() };
        let mut checked = 0;
        for _ in 0..3000 {
            let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            assert_eq!(o.cmp(&a, &b), o.cmp(&b, &a).reverse());
            assert_eq!(o.cmp(&a, &b) == Ordering::Equal, a == b);
            if o.cmp(&a, &b).is_le() && o.cmp(&b, &c).is_le() {
                assert!(o.cmp(&a, &c).is_le());
            }
            // δ(t+r) = δ(t) + δ(r) and s ≺ t imply s+r ≺ t+r
            let (s, t, r) = (a, b, c.point);
            let d = |p: &Point| o.ctx.affine_degree(p).unwrap();
            let tr = &t.point + &r;
            if o.cmp(&s, &t) == Ordering::Less && d(&t.point) + d(&r) == d(&tr) {
                let sr = &s.point + &r;
                assert_eq!(o.cmp(&Monomial { point: sr }, &Monomial { point: tr }), Ordering::Less);
                checked += 1;
            }
            // triangle inequality for δ
            assert!(d(&(&s.point + &r)) <= d(&s.point) + d(&r));
        }
        assert!(checked > 100);
    }

    #[test]
    fn graded_conditional_compatibility() {
        let o = SparseOrder::new(square(), BaseOrder::Lex).graded();
        let ctx = o.ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        for _ in 0..3000 {
            let mut pick = || {
                let d = rng.gen_range(0..3u32);
                let pts = ctx.points_up_to(d);
                HomMonomial::new(pts[rng.gen_range(0..pts.len())].clone(), d)
            };
            let (s, t, r) = (pick(), pick(), pick());
            let mul = |a: &HomMonomial, b: &HomMonomial| HomMonomial::new(&a.point + &b.point, a.degree + b.degree);
            let delta = |m: &HomMonomial| ctx.sparse_degree(m).unwrap();
            if o.cmp(&s, &t) == Ordering::Less && delta(&r) + delta(&t) == delta(&mul(&r, &t)) {
                assert_eq!(o.cmp(&mul(&s, &r), &mul(&t, &r)), Ordering::Less);
                checked += 1;
            }
        }
        assert!(checked > 100);
    }
}
