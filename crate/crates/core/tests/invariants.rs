//! Property tests against the brute-force oracles.

use std::sync::Arc;

use proptest::prelude::*;
use sparsegb::field::{Field, PrimeField};
use sparsegb::multihom::{monomials_of_degree, M3h, MultiOrder, MultihomSystem, Solver};
use sparsegb::oracle;
use sparsegb::orders::{BaseOrder, MonomialOrder, SparseOrder};
use sparsegb::poly::{divide, AffinePoly, SparsePoly};
use sparsegb::semigroup::{Monomial, Point, SemigroupContext};

fn polytope() -> impl Strategy<Value = Vec<Point>> {
    proptest::collection::btree_set((-1i64..=2, -1i64..=2), 1..5).prop_map(|s| {
        let mut pts = vec![Point(vec![0, 0])];
        pts.extend(s.into_iter().filter(|&(a, b)| (a, b) != (0, 0)).map(|(a, b)| Point(vec![a, b])));
        pts
    })
}

fn context(pts: Vec<Point>) -> Option<Arc<SemigroupContext>> {
    if pts.len() < 2 {
        return None;
    }
    SemigroupContext::new(vec![pts]).ok().map(Arc::new)
}

fn mono(p: &Point) -> Monomial {
    Monomial { point: p.clone() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn delta_matches_bruteforce(pts in polytope(), a in 0usize..16, b in 0usize..16) {
        let Some(ctx) = context(pts) else { return Ok(()) };
        let gens = ctx.generators().to_vec();
        let cands = ctx.points_up_to(3);
        let s = &cands[a % cands.len()] + &cands[b % cands.len()];
        prop_assert_eq!(ctx.affine_degree(&s).ok(), oracle::delta_bruteforce(&gens, &s, 6));
    }

    #[test]
    fn sparse_order_is_total_and_conditionally_compatible(pts in polytope(), idx in proptest::collection::vec(0usize..64, 3), lex in any::<bool>()) {
        let Some(ctx) = context(pts) else { return Ok(()) };
        let order = SparseOrder::new(ctx.clone(), if lex { BaseOrder::Lex } else { BaseOrder::Grevlex });
        let cands = ctx.points_up_to(2);
        let [s, t, r] = [0, 1, 2].map(|i| mono(&cands[idx[i] % cands.len()]));
        let st = order.cmp(&s, &t);
        prop_assert_eq!(st, order.cmp(&t, &s).reverse());
        prop_assert_eq!(st.is_eq(), s == t);
        let tr_ = order.cmp(&t, &r);
        if st.is_lt() && tr_.is_lt() {
            prop_assert!(order.cmp(&s, &r).is_lt());
        }
        let gens = ctx.generators().to_vec();
        let delta = |p: &Point| oracle::delta_bruteforce(&gens, p, 8).unwrap();
        let (sr, tr) = (&s.point + &r.point, &t.point + &r.point);
        if st.is_lt() && delta(&r.point) + delta(&t.point) == delta(&tr) {
            prop_assert!(order.cmp(&mono(&sr), &mono(&tr)).is_lt());
        }
    }

    #[test]
    fn division_identity_and_trace(pts in polytope(), seed in any::<u64>()) {
        let Some(ctx) = context(pts) else { return Ok(()) };
        let field = PrimeField::new(101).unwrap();
        let order = SparseOrder::new(ctx.clone(), BaseOrder::Grevlex);
        let cands = ctx.points_up_to(2);
        let poly = |k: u64, terms: u64| -> AffinePoly<u64> {
            SparsePoly::from_terms(&field, (0..terms).map(|j| {
                let e = field.random_elem(seed ^ (k * 97 + j));
                (mono(&cands[(e as usize) % cands.len()]), field.random_elem(seed.wrapping_add(k * 13 + j)) % 100 + 1)
            }))
        };
        let f = poly(1, 5);
        let divisors = vec![poly(2, 3), poly(3, 2)];
        let div = divide(&field, &f, &divisors, &order);
        prop_assert!(div.trace.windows(2).all(|w| order.cmp(&w[1], &w[0]).is_lt()));
        let mut back = div.remainder.clone();
        for (q, g) in div.quotients.iter().zip(&divisors) {
            back = back.add(&field, &q.mul(&field, g));
        }
        prop_assert_eq!(back, f);
    }

    #[test]
    fn hilbert_function_stabilizes(seed in any::<u64>(), blocks in prop_oneof![Just(vec![1usize, 1]), Just(vec![2usize, 1])]) {
        let field = PrimeField::default();
        let n: usize = blocks.iter().sum();
        let degrees: Vec<Vec<u32>> = (0..n).map(|i| blocks.iter().enumerate().map(|(b, _)| 1 + ((i + b) % 2) as u32).collect()).collect();
        let polys = degrees.iter().enumerate().map(|(i, d)| {
            SparsePoly::from_terms(&field, monomials_of_degree(&blocks, d).into_iter().enumerate()
                .map(|(j, m)| (m, field.random_elem(seed.wrapping_add((i * 1000 + j) as u64)))))
        }).collect();
        let system = MultihomSystem::new(blocks.clone(), polys, degrees.clone()).unwrap();
        let bezout = oracle::bezout_count(&degrees, &blocks);
        let dn = sparsegb::multihom::macaulay_bound(&degrees, &blocks);
        let mut m3 = M3h::new(&field, &system, MultiOrder::default());
        for extra in 0..2i64 {
            let d: Vec<i64> = dn.iter().map(|x| x + extra).collect();
            let mat = m3.matrix(n, &d);
            prop_assert_eq!((mat.ncols() - mat.rref(&field).rank()) as u128, bezout);
        }
        // lex and grevlex agree on the basis size
        let a = Solver::new(field.clone(), system.clone(), MultiOrder(BaseOrder::Grevlex));
        let b = Solver::new(field.clone(), system, MultiOrder(BaseOrder::Lex));
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a.dimension(), b.dimension());
            let x = a.system.variable_form(&field, 0, 1);
            let y = a.system.x_h(&field);
            let sum = x.add(&field, &y);
            let (mx, my, ms) = (a.mul_matrix(&x, "x").unwrap(), a.mul_matrix(&y, "h").unwrap(), a.mul_matrix(&sum, "s").unwrap());
            let added: Vec<Vec<u64>> = mx.rows.iter().zip(&my.rows)
                .map(|(r, s)| r.iter().zip(s).map(|(u, v)| field.add(u, v)).collect()).collect();
            prop_assert_eq!(added, ms.rows);
        }
    }
}
