//! Slow reference implementations used to cross-check the engine.
//!
//! Nothing here shares code with the fast paths: degrees come from
//! exhaustive sums of polytope points, linear algebra is dense Gaussian
//! elimination, and Macaulay matrices are built from every multiple.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;

use crate::field::Field;
use crate::poly::{SparsePoly, Term};
use crate::multihom::Exps;
use crate::semigroup::{HomMonomial, Point};

/// `δ^A(s)` by trying every multiset of `k ≤ cap` generators.
pub fn delta_bruteforce(generators: &[Point], s: &Point, cap: u32) -> Option<u32> {
    if s.is_zero() {
        return Some(0);
    }
    for k in 1..=cap as usize {
        for combo in generators.iter().combinations_with_replacement(k) {
            let mut sum = vec![0i64; s.dim()];
            for g in combo {
                for (a, b) in sum.iter_mut().zip(g.coords()) {
                    *a += b;
                }
            }
            if sum == s.coords() {
                return Some(k as u32);
            }
        }
    }
    None
}

/// Every sum of exactly `k` points of `M` (the origin included), i.e. the
/// exponents of `K[S^h]_k`.
pub fn monomials_bruteforce(polytope_points: &[Point], k: u32) -> BTreeSet<Point> {
    let dim = polytope_points.first().map_or(0, Point::dim);
    let mut pts: Vec<&Point> = polytope_points.iter().collect();
    let zero = Point::zero(dim);
    if !polytope_points.contains(&zero) {
        pts.push(&zero);
    }
    pts.into_iter()
        .combinations_with_replacement(k as usize)
        .map(|combo| combo.into_iter().fold(Point::zero(dim), |acc, p| &acc + p))
        .collect()
}

/// Reduced row echelon form of a dense matrix, returning its rank.
pub fn dense_rref<F: Field>(field: &F, m: &mut [Vec<F::Elem>]) -> usize {
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(r) = (rank..m.len()).find(|&r| !field.is_zero(&m[r][c])) else {
            continue;
        };
        m.swap(rank, r);
        let inv = field.inv(&m[rank][c]).expect("nonzero pivot");
        for x in m[rank].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !field.is_zero(&row[c]) {
                let k = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x = field.sub(x, &field.mul(&k, p));
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn dense_rank<F: Field>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut m = rows.to_vec();
    dense_rref(field, &mut m)
}

/// Dense coefficient matrix of `polys` over the union of their supports
/// (plus `extra` columns).
pub fn dense_matrix<M: Term, F: Field>(
    field: &F,
    polys: &[&SparsePoly<M, F::Elem>],
    extra: &[M],
) -> (Vec<M>, Vec<Vec<F::Elem>>) {
    let cols: BTreeSet<M> = polys.iter().flat_map(|p| p.monomials().cloned()).chain(extra.iter().cloned()).collect();
    let cols: Vec<M> = cols.into_iter().collect();
    let index: HashMap<&M, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let rows = polys
        .iter()
        .map(|p| {
            let mut row = vec![field.zero(); cols.len()];
            for (m, c) in p.terms() {
                row[index[m]] = c.clone();
            }
            row
        })
        .collect();
    (cols, rows)
}

pub fn rank_of<M: Term, F: Field>(field: &F, polys: &[SparsePoly<M, F::Elem>]) -> usize {
    let refs: Vec<_> = polys.iter().collect();
    let (_, rows) = dense_matrix(field, &refs, &[]);
    dense_rank(field, &rows)
}

/// Whether `a` and `b` span the same vector space.
pub fn same_span<M: Term, F: Field>(field: &F, a: &[SparsePoly<M, F::Elem>], b: &[SparsePoly<M, F::Elem>]) -> bool {
    let ra = rank_of(field, a);
    let rb = rank_of(field, b);
    let both: Vec<_> = a.iter().chain(b).cloned().collect();
    ra == rb && rank_of(field, &both) == ra
}

/// Whether `p` lies in the span of `basis`.
pub fn in_span<M: Term, F: Field>(field: &F, basis: &[SparsePoly<M, F::Elem>], p: &SparsePoly<M, F::Elem>) -> bool {
    let mut with = basis.to_vec();
    with.push(p.clone());
    rank_of(field, basis) == rank_of(field, &with)
}

/// Every product `X^(s, d - deg g) · g` of degree `d`, for homogeneous
/// generators over the semigroup generated by `polytope_points`.
pub fn full_macaulay<F: Field>(
    field: &F,
    polytope_points: &[Point],
    gens: &[SparsePoly<HomMonomial, F::Elem>],
    d: u32,
) -> Vec<SparsePoly<HomMonomial, F::Elem>> {
    let mut rows = Vec::new();
    for g in gens {
        let Some(first) = g.monomials().next() else { continue };
        let dg = first.degree;
        if dg > d {
            continue;
        }
        for s in monomials_bruteforce(polytope_points, d - dg) {
            rows.push(g.mul_term(field, &HomMonomial { point: s, degree: d - dg }, &field.one()));
        }
    }
    rows
}

/// Rank of the full Macaulay matrix in degree `d`.
pub fn rank_full<F: Field>(field: &F, polytope_points: &[Point], gens: &[SparsePoly<HomMonomial, F::Elem>], d: u32) -> usize {
    rank_of(field, &full_macaulay(field, polytope_points, gens, d))
}

/// Whether `f` is a non-zero-divisor on the degree-`d` part of the quotient
/// by `gens`, checked through Hilbert function arithmetic.
pub fn nonzero_divisor_in_degree<F: Field>(
    field: &F,
    polytope_points: &[Point],
    gens: &[SparsePoly<HomMonomial, F::Elem>],
    f: &SparsePoly<HomMonomial, F::Elem>,
    d: u32,
) -> bool {
    let Some(df) = f.degree() else { return false };
    if df > d {
        return true;
    }
    let mut with = gens.to_vec();
    with.push(f.clone());
    let lhs = rank_full(field, polytope_points, &with, d);
    let mons = monomials_bruteforce(polytope_points, d - df).len();
    let rhs = rank_full(field, polytope_points, gens, d) + mons - rank_full(field, polytope_points, gens, d - df);
    lhs == rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// Found as a combination with multipliers of degree at most this bound.
    Member(u32),
    NotFoundUpTo(u32),
}

/// Affine ideal membership by linear algebra over all multiples
/// `X^s · g` with `s` a sum of at most `k` polytope points, `k ≤ cap`.
pub fn ideal_membership_bruteforce<F: Field>(
    field: &F,
    polytope_points: &[Point],
    gens: &[SparsePoly<crate::semigroup::Monomial, F::Elem>],
    f: &SparsePoly<crate::semigroup::Monomial, F::Elem>,
    cap: u32,
) -> Membership {
    if f.is_zero() {
        return Membership::Member(0);
    }
    for k in 0..=cap {
        let mut rows = Vec::new();
        for s in monomials_bruteforce(polytope_points, k) {
            let t = crate::semigroup::Monomial { point: s };
            for g in gens {
                rows.push(g.mul_term(field, &t, &field.one()));
            }
        }
        if in_span(field, &rows, f) {
            return Membership::Member(k);
        }
    }
    Membership::NotFoundUpTo(cap)
}

/// Multihomogeneous Bézout number: the coefficient of `Π z_i^{n_i}` in
/// `Π_j (Σ_i d_ji z_i)`.
pub fn bezout_count(degrees: &[Vec<u32>], block_sizes: &[usize]) -> u128 {
    let k = block_sizes.len();
    let mut poly: BTreeMap<Vec<usize>, u128> = BTreeMap::from([(vec![0; k], 1)]);
    for row in degrees {
        let mut next = BTreeMap::new();
        for (e, c) in &poly {
            for i in 0..k {
                if row[i] == 0 || e[i] + 1 > block_sizes[i] {
                    continue;
                }
                let mut e2 = e.clone();
                e2[i] += 1;
                *next.entry(e2).or_insert(0) += c * row[i] as u128;
            }
        }
        poly = next;
    }
    poly.get(block_sizes).copied().unwrap_or(0)
}

fn lex_lead<E: Clone + PartialEq>(p: &SparsePoly<Exps, E>) -> Option<(&Exps, &E)> {
    p.terms().max_by(|a, b| a.0.cmp(b.0))
}

/// Full reduction by textbook division in the lexicographic order with
/// componentwise divisibility.
pub fn lex_reduce<F: Field>(field: &F, f: &SparsePoly<Exps, F::Elem>, gs: &[SparsePoly<Exps, F::Elem>]) -> SparsePoly<Exps, F::Elem> {
    let mut p = f.clone();
    let mut rem = SparsePoly::zero();
    while let Some((m, c)) = lex_lead(&p).map(|(m, c)| (m.clone(), c.clone())) {
        let hit = gs.iter().find_map(|g| {
            let (lm, lc) = lex_lead(g)?;
            let ok = lm.0.iter().zip(&m.0).all(|(a, b)| a <= b);
            ok.then(|| (g, Exps(m.0.iter().zip(&lm.0).map(|(b, a)| b - a).collect()), lc.clone()))
        });
        match hit {
            Some((g, t, lc)) => {
                let k = field.mul(&c, &field.inv(&lc).expect("nonzero"));
                p = p.sub(field, &g.mul_term(field, &t, &k));
            }
            None => {
                rem.add_term(field, m.clone(), c.clone());
                p = p.sub(field, &SparsePoly::monomial(field, m, c));
            }
        }
    }
    rem
}

/// Buchberger's criterion: every S-polynomial reduces to zero.
pub fn lex_buchberger_check<F: Field>(field: &F, gs: &[SparsePoly<Exps, F::Elem>]) -> bool {
    for i in 0..gs.len() {
        for j in i + 1..gs.len() {
            let (Some((a, ca)), Some((b, cb))) = (lex_lead(&gs[i]), lex_lead(&gs[j])) else { return false };
            let lcm = Exps(a.0.iter().zip(&b.0).map(|(x, y)| *x.max(y)).collect());
            let ta = Exps(lcm.0.iter().zip(&a.0).map(|(l, x)| l - x).collect());
            let tb = Exps(lcm.0.iter().zip(&b.0).map(|(l, x)| l - x).collect());
            let s = gs[i]
                .mul_term(field, &ta, &field.inv(ca).expect("nonzero"))
                .sub(field, &gs[j].mul_term(field, &tb, &field.inv(cb).expect("nonzero")));
            if !lex_reduce(field, &s, gs).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Every point of `F_p^n` on which `eval` vanishes.
pub fn roots_bruteforce(p: u64, n: usize, eval: impl Fn(&[u64]) -> bool) -> Vec<Vec<u64>> {
    (0..n).map(|_| 0..p).multi_cartesian_product().filter(|x| eval(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn pts(v: &[[i64; 2]]) -> Vec<Point> {
        v.iter().map(|p| Point(p.to_vec())).collect()
    }

    #[test]
    fn delta_examples() {
        let g = pts(&[[1, 0], [0, 1], [1, 1]]);
        assert_eq!(delta_bruteforce(&g, &Point(vec![2, 0]), 5), Some(2));
        assert_eq!(delta_bruteforce(&g, &Point(vec![1, 1]), 5), Some(1));
        assert_eq!(delta_bruteforce(&g, &Point(vec![3, 1]), 5), Some(3));
        assert_eq!(delta_bruteforce(&g, &Point(vec![-1, 0]), 5), None);
    }

    #[test]
    fn monomial_counts() {
        let m = pts(&[[0, 0], [1, 0], [0, 1], [1, 1]]);
        assert_eq!(monomials_bruteforce(&m, 2).len(), 9);
        assert_eq!(monomials_bruteforce(&m, 3).len(), 16);
    }

    #[test]
    fn bezout_examples() {
        // two bilinear forms on P1 x P1
        assert_eq!(bezout_count(&[vec![1, 1], vec![1, 1]], &[1, 1]), 2);
        // three forms of degree (1,1) on P2 x P1
        assert_eq!(bezout_count(&[vec![1, 1], vec![1, 1], vec![1, 1]], &[2, 1]), 3);
        // total degrees 2 and 3 on P2
        assert_eq!(bezout_count(&[vec![2], vec![3]], &[2]), 6);
        assert_eq!(bezout_count(&vec![vec![1, 1, 1]; 3], &[1, 1, 1]), 6);
    }

    #[test]
    fn dense_rank_example() {
        let f = PrimeField::new(7).unwrap();
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(dense_rank(&f, &rows), 2);
    }
}
