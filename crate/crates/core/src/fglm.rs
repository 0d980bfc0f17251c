//! Matrix FGLM into the lexicographic order and exhaustive root search.
//!
//! Variables are the affine ones `x̄_1, ..., x̄_N` in flattened order, the
//! first one largest.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::multihom::{evaluate, mat_mul, Exps, MulMatrix, MultiPoly};
use crate::poly::SparsePoly;

/// Largest prime accepted by [`find_roots`].
pub const ROOT_SEARCH_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone)]
pub struct LexGb<E> {
    pub nvars: usize,
    /// Reduced basis sorted by increasing leading monomial.
    pub polys: Vec<MultiPoly<E>>,
    /// Normal monomials in increasing lex order.
    pub staircase: Vec<Exps>,
    /// The staircase consists of powers of the last variable only.
    pub shape: bool,
}

fn divides(a: &Exps, b: &Exps) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
}

/// Lexicographic Gröbner basis of the ideal represented by commuting
/// multiplication matrices (row convention) and the coordinates of `1`.
pub fn lex_gb<F: Field>(field: &F, mats: &[MulMatrix<F::Elem>], unit: &[F::Elem]) -> Result<LexGb<F::Elem>> {
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if mat_mul(field, &mats[i].rows, &mats[j].rows) != mat_mul(field, &mats[j].rows, &mats[i].rows) {
                return Err(Error::NonCommuting(i, j));
            }
        }
    }
    let nvars = mats.len();
    let dim = unit.len();
    let vec_mul = |v: &[F::Elem], m: &MulMatrix<F::Elem>| -> Vec<F::Elem> {
        let mut out = vec![field.zero(); dim];
        for (k, x) in v.iter().enumerate() {
            if field.is_zero(x) {
                continue;
            }
            for (o, y) in out.iter_mut().zip(&m.rows[k]) {
                *o = field.add(o, &field.mul(x, y));
            }
        }
        out
    };

    let mut staircase: Vec<Exps> = Vec::new();
    // echelon rows: (pivot, vector, combination of staircase elements)
    let mut echelon: Vec<(usize, Vec<F::Elem>, Vec<F::Elem>)> = Vec::new();
    let mut leads: Vec<Exps> = Vec::new();
    let mut polys = Vec::new();
    let mut candidates: BTreeMap<Exps, Vec<F::Elem>> = BTreeMap::new();
    candidates.insert(Exps(vec![0; nvars]), unit.to_vec());

    while let Some((m, v)) = candidates.pop_first() {
        if leads.iter().any(|l| divides(l, &m)) {
            continue;
        }
        let mut red = v.clone();
        let mut combo = vec![field.zero(); staircase.len()];
        for (p, row, rc) in &echelon {
            if field.is_zero(&red[*p]) {
                continue;
            }
            let f = red[*p].clone();
            for (r, x) in red.iter_mut().zip(row) {
                *r = field.sub(r, &field.mul(&f, x));
            }
            for (c, x) in combo.iter_mut().zip(rc) {
                *c = field.add(c, &field.mul(&f, x));
            }
        }
        match red.iter().position(|x| !field.is_zero(x)) {
            None => {
                // m − Σ combo_i · staircase_i lies in the ideal
                let mut terms = vec![(m.clone(), field.one())];
                terms.extend(staircase.iter().cloned().zip(combo.iter().map(|c| field.neg(c))));
                polys.push(SparsePoly::from_terms(field, terms));
                leads.push(m);
            }
            Some(p) => {
                let inv = field.inv(&red[p])?;
                let row: Vec<F::Elem> = red.iter().map(|x| field.mul(x, &inv)).collect();
                let mut rc: Vec<F::Elem> = combo.iter().map(|c| field.neg(&field.mul(c, &inv))).collect();
                rc.push(inv);
                for (_, _, other) in echelon.iter_mut() {
                    other.push(field.zero());
                }
                echelon.push((p, row, rc));
                staircase.push(m.clone());
                for (var, mat) in mats.iter().enumerate() {
                    let mut next = m.clone();
                    next.0[var] += 1;
                    candidates.entry(next).or_insert_with(|| vec_mul(&v, mat));
                }
            }
        }
    }
    polys.sort_by(|a: &MultiPoly<F::Elem>, b| lead(a).cmp(lead(b)));
    let shape = nvars > 0 && staircase.iter().all(|m| m.0[..nvars - 1].iter().all(|&e| e == 0));
    Ok(LexGb { nvars, polys, staircase, shape })
}

fn lead<E: Clone + PartialEq>(p: &MultiPoly<E>) -> &Exps {
    p.monomials().max().expect("nonzero")
}

impl<E: Clone + PartialEq> LexGb<E> {
    pub fn leading_monomials(&self) -> Vec<&Exps> {
        self.polys.iter().map(lead).collect()
    }
}

/// All `F_p`-rational points of a triangular lexicographic basis, found by
/// back-substitution from the last variable.
pub fn find_roots<F: Field>(field: &F, gb: &LexGb<F::Elem>) -> Result<Vec<Vec<F::Elem>>> {
    let p = field.modulus().ok_or(Error::RootsNeedPrimeField)?;
    if p > ROOT_SEARCH_LIMIT {
        return Err(Error::FieldTooLarge(p));
    }
    let n = gb.nvars;
    // per variable: basis elements whose first variable is k
    let mut by_var: Vec<Vec<&MultiPoly<F::Elem>>> = vec![Vec::new(); n];
    for poly in &gb.polys {
        let first = poly.monomials().filter_map(|m| m.0.iter().position(|&e| e > 0)).min();
        match first {
            Some(k) => by_var[k].push(poly),
            None => return Ok(Vec::new()), // a nonzero constant: empty variety
        }
    }
    for (k, group) in by_var.iter().enumerate() {
        let pure = group.iter().any(|q| {
            let l = lead(q);
            l.0.iter().enumerate().all(|(i, &e)| (i == k) == (e > 0))
        });
        if !pure {
            return Err(Error::NotTriangular(k));
        }
    }

    let mut partial: Vec<Vec<F::Elem>> = vec![vec![field.zero(); n]];
    for k in (0..n).rev() {
        let mut next = Vec::new();
        for point in &partial {
            // univariate coefficient lists in x_k
            let unis: Vec<Vec<F::Elem>> = by_var[k]
                .iter()
                .map(|q| {
                    let mut coeffs: BTreeMap<u32, F::Elem> = BTreeMap::new();
                    for (m, c) in q.terms() {
                        let mut t = c.clone();
                        for i in k + 1..n {
                            if m.0[i] > 0 {
                                t = field.mul(&t, &field.pow(&point[i], m.0[i] as u64));
                            }
                        }
                        let slot = coeffs.entry(m.0[k]).or_insert_with(|| field.zero());
                        *slot = field.add(slot, &t);
                    }
                    let deg = coeffs.keys().max().copied().unwrap_or(0) as usize;
                    let mut v = vec![field.zero(); deg + 1];
                    for (e, c) in coeffs {
                        v[e as usize] = c;
                    }
                    while v.len() > 1 && field.is_zero(v.last().expect("nonempty")) {
                        v.pop();
                    }
                    v
                })
                .filter(|v| !(v.len() == 1 && field.is_zero(&v[0])))
                .collect();
            if unis.iter().any(|v| v.len() == 1) {
                continue;
            }
            let horner = |v: &[F::Elem], x: &F::Elem| v.iter().rev().fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c));
            let Some(pivot) = unis.iter().min_by_key(|v| v.len()) else {
                return Err(Error::NotTriangular(k));
            };
            for value in 0..p {
                let x = field.from_i64(value as i64);
                if field.is_zero(&horner(pivot, &x)) && unis.iter().all(|v| field.is_zero(&horner(v, &x))) {
                    let mut q = point.clone();
                    q[k] = x;
                    next.push(q);
                }
            }
        }
        partial = next;
    }
    Ok(partial)
}

/// Whether `point` is a common zero of `polys`.
pub fn is_root<F: Field>(field: &F, polys: &[MultiPoly<F::Elem>], point: &[F::Elem]) -> bool {
    polys.iter().all(|p| field.is_zero(&evaluate(field, p, point)))
}

/// Set of normal monomials below a lex basis up to `max_total`, for tests.
pub fn normal_monomials<E: Clone + PartialEq>(gb: &LexGb<E>, max_total: u32) -> BTreeSet<Exps> {
    let leads = gb.leading_monomials();
    let mut out = BTreeSet::new();
    let mut stack = vec![Exps(vec![0; gb.nvars])];
    while let Some(m) = stack.pop() {
        if out.contains(&m) || leads.iter().any(|l| divides(l, &m)) || m.0.iter().sum::<u32>() > max_total {
            continue;
        }
        for v in 0..gb.nvars {
            let mut n = m.clone();
            n.0[v] += 1;
            stack.push(n);
        }
        out.insert(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::multihom::{monomials_of_degree, MultiOrder, MultihomSystem, Solver};
    use crate::oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_system(f: &PrimeField, blocks: &[usize], degrees: &[Vec<u32>], seed: u64) -> MultihomSystem<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let polys = degrees
            .iter()
            .map(|d| SparsePoly::from_terms(f, monomials_of_degree(blocks, d).into_iter().map(|m| (m, f.random(&mut rng)))))
            .collect();
        MultihomSystem::new(blocks.to_vec(), polys, degrees.to_vec()).unwrap()
    }

    fn pipeline(f: &PrimeField, s: &MultihomSystem<u64>) -> (LexGb<u64>, Vec<MultiPoly<u64>>) {
        let solver = Solver::new(f.clone(), s.clone(), MultiOrder::default()).unwrap();
        let mats = solver.variable_matrices().unwrap();
        let gb = lex_gb(f, &mats, &solver.unit_vector()).unwrap();
        let bars = s.polys.iter().map(|p| s.dehomogenize(f, p)).collect();
        (gb, bars)
    }

    #[test]
    fn linear_system_has_one_point() {
        let f = PrimeField::new(101).unwrap();
        // x̄ − 3 = 0 and ȳ − 5 = 0 on P^1 × P^1 written as degree (1,0) and (0,1) forms
        let p1 = SparsePoly::from_terms(&f, [(Exps(vec![0, 1, 0, 0]), 1), (Exps(vec![1, 0, 0, 0]), f.from_i64(-3))]);
        let p2 = SparsePoly::from_terms(&f, [(Exps(vec![0, 0, 0, 1]), 1), (Exps(vec![0, 0, 1, 0]), f.from_i64(-5))]);
        let s = MultihomSystem::new(vec![1, 1], vec![p1, p2], vec![vec![1, 0], vec![0, 1]]).unwrap();
        let (gb, bars) = pipeline(&f, &s);
        assert_eq!(gb.staircase.len(), 1);
        assert_eq!(gb.polys.len(), 2);
        let roots = find_roots(&f, &gb).unwrap();
        assert_eq!(roots, vec![vec![3, 5]]);
        assert!(is_root(&f, &bars, &roots[0]));
    }

    #[test]
    fn bilinear_eliminant_has_degree_two() {
        let f = PrimeField::default();
        let s = random_system(&f, &[1, 1], &[vec![1, 1], vec![1, 1]], 21);
        let (gb, bars) = pipeline(&f, &s);
        assert!(gb.shape);
        assert_eq!(gb.staircase.len(), 2);
        assert_eq!(gb.polys[0].monomials().max().unwrap(), &Exps(vec![0, 2]));
        assert!(oracle::lex_buchberger_check(&f, &gb.polys));
        for root in find_roots(&f, &gb).unwrap() {
            assert!(is_root(&f, &bars, &root));
        }
        // every generator reduces to zero: it vanishes on the multiplication representation
        for b in &bars {
            assert!(oracle::lex_reduce(&f, b, &gb.polys).is_zero());
        }
    }

    #[test]
    fn roots_match_bruteforce_over_small_field() {
        let f = PrimeField::new(13).unwrap();
        for seed in 0..8 {
            let s = random_system(&f, &[1, 1], &[vec![1, 1], vec![1, 1]], seed);
            let Ok(solver) = Solver::new(f.clone(), s.clone(), MultiOrder::default()) else { continue };
            let mats = solver.variable_matrices().unwrap();
            let gb = lex_gb(&f, &mats, &solver.unit_vector()).unwrap();
            let bars: Vec<_> = s.polys.iter().map(|p| s.dehomogenize(&f, p)).collect();
            let mut roots = find_roots(&f, &gb).unwrap();
            roots.sort();
            let brute = oracle::roots_bruteforce(13, 2, |x| is_root(&f, &bars, x));
            assert_eq!(roots, brute, "seed {seed}");
            assert!(roots.len() <= gb.staircase.len());
        }
    }

    #[test]
    fn staircase_invariant_under_coordinate_change() {
        let f = PrimeField::default();
        let s = random_system(&f, &[2, 1], &[vec![1, 1], vec![1, 1], vec![1, 1]], 2);
        let (gb, _) = pipeline(&f, &s);
        let (t, _) = crate::multihom::change_coords(&f, &s, 3).unwrap();
        let (gb2, _) = pipeline(&f, &t);
        assert_eq!(gb.staircase.len(), gb2.staircase.len());
        assert_eq!(normal_monomials(&gb, 10).len(), gb.staircase.len());
    }

    #[test]
    fn non_commuting_rejected() {
        let f = PrimeField::new(7).unwrap();
        let a = MulMatrix { form: "a".into(), rows: vec![vec![0, 1], vec![0, 0]] };
        let b = MulMatrix { form: "b".into(), rows: vec![vec![0, 0], vec![1, 0]] };
        assert!(matches!(lex_gb(&f, &[a, b], &[1, 0]), Err(Error::NonCommuting(0, 1))));
    }

    #[test]
    fn large_or_rational_fields_rejected() {
        let gb = LexGb::<u64> { nvars: 0, polys: vec![], staircase: vec![], shape: false };
        let big = PrimeField::new(crate::field::BENCH_PRIME).unwrap();
        assert!(matches!(find_roots(&big, &gb), Err(Error::FieldTooLarge(_))));
        let gbq = LexGb { nvars: 0, polys: vec![], staircase: vec![], shape: false };
        assert!(matches!(find_roots(&crate::field::RationalField, &gbq), Err(Error::RootsNeedPrimeField)));
    }
}
