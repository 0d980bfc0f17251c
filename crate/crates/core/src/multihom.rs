//! Square multihomogeneous systems over `P^{n_1} × ... × P^{n_r}`.
//!
//! Monomials are flattened exponent vectors: block `i` occupies the
//! `n_i + 1` consecutive slots `x_{i,0}, ..., x_{i,n_i}`. Dehomogenizing
//! sets every `x_{i,0}` to one and leaves `N = Σ n_i` affine variables.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use itertools::Itertools;
use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::macaulay::{rref_rows, Echelon, MacaulayMatrix, RowLabel};
use crate::orders::{BaseOrder, MonomialOrder};
use crate::poly::{SparsePoly, Term};

/// Exponent vector of a monomial in `K[x]` (or in the affine chart).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exps(pub Vec<u32>);

impl fmt::Debug for Exps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{:?}", self.0)
    }
}

impl Term for Exps {
    fn mul(&self, other: &Self) -> Self {
        Exps(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

pub type MultiPoly<E> = SparsePoly<Exps, E>;

/// A base order acting on flattened exponent vectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiOrder(pub BaseOrder);

impl MonomialOrder<Exps> for MultiOrder {
    fn key(&self, m: &Exps) -> Vec<i64> {
        let v: Vec<i64> = m.0.iter().map(|&e| e as i64).collect();
        self.0.key(&v, None)
    }
}

/// Lexicographic order with the first variable largest.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lex;

impl MonomialOrder<Exps> for Lex {
    fn key(&self, m: &Exps) -> Vec<i64> {
        m.0.iter().map(|&e| e as i64).collect()
    }
}

/// `D_k = Σ deg(f_i) − n`, componentwise; may be negative.
pub fn macaulay_bound(degrees: &[Vec<u32>], blocks: &[usize]) -> Vec<i64> {
    (0..blocks.len())
        .map(|i| degrees.iter().map(|d| d[i] as i64).sum::<i64>() - blocks[i] as i64)
        .collect()
}

/// Exponent vectors of all monomials of multidegree `d`.
pub fn monomials_of_degree(blocks: &[usize], d: &[u32]) -> Vec<Exps> {
    let per_block: Vec<Vec<Vec<u32>>> = blocks.iter().zip(d).map(|(&n, &k)| compositions(k, n + 1)).collect();
    per_block
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| Exps(parts.concat()))
        .collect()
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .rev()
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MultihomSystem<E> {
    pub blocks: Vec<usize>,
    pub polys: Vec<MultiPoly<E>>,
    pub degrees: Vec<Vec<u32>>,
}

impl<E: Clone + PartialEq + fmt::Debug> MultihomSystem<E> {
    /// Validate that every term has the declared multidegree.
    pub fn new(blocks: Vec<usize>, polys: Vec<MultiPoly<E>>, degrees: Vec<Vec<u32>>) -> Result<Self> {
        let width: usize = blocks.iter().map(|n| n + 1).sum();
        if polys.len() != degrees.len() {
            return Err(Error::Document(format!("{} polynomials but {} multidegrees", polys.len(), degrees.len())));
        }
        let sys = MultihomSystem { blocks, polys, degrees };
        for (i, (p, d)) in sys.polys.iter().zip(&sys.degrees).enumerate() {
            if d.len() != sys.blocks.len() {
                return Err(Error::NotMultihomogeneous {
                    poly: i,
                    term: 0,
                    expected: d.clone(),
                    detail: format!("multidegree has {} entries for {} blocks", d.len(), sys.blocks.len()),
                });
            }
            if p.is_zero() {
                return Err(Error::ZeroPolynomial("multidegree"));
            }
            for (t, m) in p.monomials().enumerate() {
                if m.0.len() != width {
                    return Err(Error::NotMultihomogeneous {
                        poly: i,
                        term: t,
                        expected: d.clone(),
                        detail: format!("exponent vector has {} entries, expected {width}", m.0.len()),
                    });
                }
                let got = sys.block_degree(m);
                if &got != d {
                    return Err(Error::NotMultihomogeneous {
                        poly: i,
                        term: t,
                        expected: d.clone(),
                        detail: format!("term {m:?} has multidegree {got:?}"),
                    });
                }
            }
        }
        Ok(sys)
    }

    /// Number of affine variables `N = Σ n_i`.
    pub fn n(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn width(&self) -> usize {
        self.blocks.iter().map(|n| n + 1).sum()
    }

    /// Offset of `x_{i,0}` in the flattened vector.
    pub fn offset(&self, block: usize) -> usize {
        self.blocks[..block].iter().map(|n| n + 1).sum()
    }

    pub fn block_degree(&self, m: &Exps) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut at = 0;
        for &n in &self.blocks {
            out.push(m.0[at..at + n + 1].iter().sum());
            at += n + 1;
        }
        out
    }

    pub fn is_square(&self) -> bool {
        self.polys.len() == self.n()
    }

    pub fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare { polys: self.polys.len(), vars: self.n() })
        }
    }

    pub fn monomials(&self, d: &[u32]) -> Vec<Exps> {
        monomials_of_degree(&self.blocks, d)
    }

    /// A copy with one more polynomial appended.
    pub fn with(&self, p: MultiPoly<E>, degree: Vec<u32>) -> Self {
        let mut out = self.clone();
        out.polys.push(p);
        out.degrees.push(degree);
        out
    }

    /// `x_h = Π_i x_{i,0}`.
    pub fn x_h<F: Field<Elem = E>>(&self, field: &F) -> MultiPoly<E> {
        let mut e = vec![0; self.width()];
        for b in 0..self.blocks.len() {
            e[self.offset(b)] = 1;
        }
        SparsePoly::monomial(field, Exps(e), field.one())
    }

    /// The multilinear form `x_{i,j} · Π_{l≠i} x_{l,0}` that dehomogenizes
    /// to the affine variable `x̄_{i,j}`.
    pub fn variable_form<F: Field<Elem = E>>(&self, field: &F, block: usize, j: usize) -> MultiPoly<E> {
        let mut e = vec![0; self.width()];
        for b in 0..self.blocks.len() {
            e[self.offset(b)] = 1;
        }
        e[self.offset(block)] = 0;
        e[self.offset(block) + j] = 1;
        SparsePoly::monomial(field, Exps(e), field.one())
    }

    /// `(block, j)` for every affine variable, in flattened order.
    pub fn affine_variables(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().enumerate().flat_map(|(b, &n)| (1..=n).map(move |j| (b, j))).collect()
    }

    /// Set every `x_{i,0}` to one.
    pub fn dehomogenize<F: Field<Elem = E>>(&self, field: &F, p: &MultiPoly<E>) -> MultiPoly<E> {
        let zeros: HashSet<usize> = (0..self.blocks.len()).map(|b| self.offset(b)).collect();
        p.map_monomials(field, |m| {
            Exps(m.0.iter().enumerate().filter(|(k, _)| !zeros.contains(k)).map(|(_, &e)| e).collect())
        })
    }

    pub fn bezout_number(&self) -> u128 {
        crate::oracle::bezout_count(&self.degrees, &self.blocks)
    }
}

/// Evaluate an affine polynomial at a point.
pub fn evaluate<F: Field>(field: &F, p: &MultiPoly<F::Elem>, point: &[F::Elem]) -> F::Elem {
    let mut acc = field.zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (x, &e) in point.iter().zip(&m.0) {
            if e > 0 {
                t = field.mul(&t, &field.pow(x, e as u64));
            }
        }
        acc = field.add(&acc, &t);
    }
    acc
}

type Rows<E> = Vec<(RowLabel<Exps>, MultiPoly<E>)>;

/// Memoized Algorithm 2 over the polynomials of one system.
pub struct M3h<'a, F: Field> {
    field: &'a F,
    system: &'a MultihomSystem<F::Elem>,
    order: MultiOrder,
    rows: HashMap<(usize, Vec<i64>), Rc<Rows<F::Elem>>>,
    leads: HashMap<(usize, Vec<i64>), Rc<HashSet<Exps>>>,
}

impl<'a, F: Field> M3h<'a, F> {
    pub fn new(field: &'a F, system: &'a MultihomSystem<F::Elem>, order: MultiOrder) -> Self {
        M3h { field, system, order, rows: HashMap::new(), leads: HashMap::new() }
    }

    /// Rows of `M3H({f_1..f_k}, d)`.
    pub fn rows(&mut self, k: usize, d: &[i64]) -> Rc<Rows<F::Elem>> {
        if k == 0 || d.iter().any(|&x| x < 0) {
            return Rc::new(Vec::new());
        }
        let key = (k, d.to_vec());
        if let Some(r) = self.rows.get(&key) {
            return r.clone();
        }
        let mut out: Rows<F::Elem> = self.rows(k - 1, d).as_ref().clone();
        let deg = &self.system.degrees[k - 1];
        let e: Vec<i64> = d.iter().zip(deg).map(|(&a, &b)| a - b as i64).collect();
        if e.iter().all(|&x| x >= 0) {
            let skip = self.leading(k - 1, &e);
            let ue: Vec<u32> = e.iter().map(|&x| x as u32).collect();
            for beta in self.system.monomials(&ue) {
                if skip.contains(&beta) {
                    continue;
                }
                let row = self.system.polys[k - 1].mul_term(self.field, &beta, &self.field.one());
                out.push((RowLabel::Multiple { generator: k - 1, multiplier: beta }, row));
            }
        }
        let out = Rc::new(out);
        self.rows.insert(key, out.clone());
        out
    }

    /// Leading monomials of the reduced matrix `M3H({f_1..f_k}, d)`.
    pub fn leading(&mut self, k: usize, d: &[i64]) -> Rc<HashSet<Exps>> {
        if k == 0 || d.iter().any(|&x| x < 0) {
            return Rc::new(HashSet::new());
        }
        let key = (k, d.to_vec());
        if let Some(l) = self.leads.get(&key) {
            return l.clone();
        }
        let e = self.matrix(k, d).rref(self.field);
        let l: Rc<HashSet<Exps>> = Rc::new(e.leading_monomials().cloned().collect());
        self.leads.insert(key, l.clone());
        l
    }

    /// The Macaulay matrix with columns all of `K[x]_d` in decreasing order.
    pub fn matrix(&mut self, k: usize, d: &[i64]) -> MacaulayMatrix<Exps, F::Elem> {
        let rows = self.rows(k, d).as_ref().clone();
        let cols = self.columns(d);
        MacaulayMatrix::with_columns(self.field, cols, rows).expect("rows have degree d")
    }

    pub fn columns(&self, d: &[i64]) -> Vec<Exps> {
        if d.iter().any(|&x| x < 0) {
            return Vec::new();
        }
        let ud: Vec<u32> = d.iter().map(|&x| x as u32).collect();
        let mut cols = self.system.monomials(&ud);
        cols.sort_by_cached_key(|m| std::cmp::Reverse(self.order.key(m)));
        cols
    }
}

/// `M3H({f_1..f_k}, d, <)`.
pub fn m3h<F: Field>(
    field: &F,
    system: &MultihomSystem<F::Elem>,
    k: usize,
    d: &[i64],
    order: &MultiOrder,
) -> MacaulayMatrix<Exps, F::Elem> {
    M3h::new(field, system, order.clone()).matrix(k, d)
}

fn to_i64(d: &[u32]) -> Vec<i64> {
    d.iter().map(|&x| x as i64).collect()
}

fn bound_degrees(system: &MultihomSystem<impl Clone>) -> Result<(Vec<u32>, Vec<u32>)> {
    let dn = macaulay_bound(&system.degrees, &system.blocks);
    if dn.iter().any(|&x| x < 0) {
        return Err(Error::NotZeroDimensional { at_dn: 0, at_dn1: 0 });
    }
    let dn: Vec<u32> = dn.iter().map(|&x| x as u32).collect();
    let dn1 = dn.iter().map(|x| x + 1).collect();
    Ok((dn, dn1))
}

/// Whether `(f_1, ..., f_N, x_h)` has no common zero, via the rank of its
/// Macaulay matrix at `D_{N+1}`.
pub fn check_no_infinity<F: Field>(field: &F, system: &MultihomSystem<F::Elem>, order: &MultiOrder) -> Result<bool> {
    system.ensure_square()?;
    let (_, dn1) = bound_degrees(system)?;
    let ext = system.with(system.x_h(field), vec![1; system.blocks.len()]);
    let mut m = M3h::new(field, &ext, order.clone());
    let mat = m.matrix(ext.polys.len(), &to_i64(&dn1));
    Ok(mat.rref(field).rank() == mat.ncols())
}

#[derive(Debug, Clone, Serialize)]
pub struct MonomialBasis {
    /// `D_N`.
    pub degree: Vec<u32>,
    /// Degree-`D_N` monomials outside the leading monomials, decreasing.
    pub monomials: Vec<Exps>,
    /// Number of leading monomials at `D_N`.
    pub leading: usize,
}

/// Multiplication by a multilinear form in the basis `𝔟̄`, row convention:
/// `vec(p · f̄_0) = vec(p) · M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulMatrix<E> {
    pub form: String,
    pub rows: Vec<Vec<E>>,
}

/// `M̌^{f_0}` with the `x_h·𝔟` columns last and the `f_0` rows last.
#[derive(Debug, Clone)]
pub struct BlockedMatrix<E> {
    pub matrix: MacaulayMatrix<Exps, E>,
    /// Rows coming from `f_1, ..., f_N`.
    pub top: usize,
    /// Columns not of the form `x_h · b`.
    pub left: usize,
}

impl<E: Clone + PartialEq + fmt::Debug> BlockedMatrix<E> {
    /// Dense block `(i, j)` with `i, j ∈ {1, 2}`.
    pub fn block<F: Field<Elem = E>>(&self, field: &F, i: usize, j: usize) -> Vec<Vec<E>> {
        let rows = if i == 1 { 0..self.top } else { self.top..self.matrix.nrows() };
        let cols = if j == 1 { 0..self.left } else { self.left..self.matrix.ncols() };
        rows.map(|r| {
            let mut out = vec![field.zero(); cols.len()];
            for (c, v) in &self.matrix.rows[r] {
                if cols.contains(c) {
                    out[c - cols.start] = v.clone();
                }
            }
            out
        })
        .collect()
    }
}

/// The shared elimination behind every multiplication map of one system.
pub struct Solver<F: Field> {
    pub field: F,
    pub system: MultihomSystem<F::Elem>,
    pub order: MultiOrder,
    pub basis: MonomialBasis,
    /// `D_{N+1}`.
    pub top_degree: Vec<u32>,
    /// Permuted columns: non-`x_h·𝔟` first, then `x_h·b_j` in basis order.
    columns: Vec<Exps>,
    top_rows: Vec<(RowLabel<Exps>, MultiPoly<F::Elem>)>,
    top: Echelon<Exps, F::Elem>,
    low: Echelon<Exps, F::Elem>,
}

impl<F: Field> Solver<F> {
    pub fn new(field: F, system: MultihomSystem<F::Elem>, order: MultiOrder) -> Result<Self> {
        system.ensure_square()?;
        let (dn, dn1) = bound_degrees(&system)?;
        let n = system.polys.len();
        let (low, rows_top) = {
            let mut m3 = M3h::new(&field, &system, order.clone());
            let low = m3.matrix(n, &to_i64(&dn)).rref(&field);
            let rows_top = m3.rows(n, &to_i64(&dn1)).as_ref().clone();
            (low, rows_top)
        };
        let pivots: HashSet<usize> = low.pivots.iter().copied().collect();
        let monomials: Vec<Exps> =
            (0..low.columns.len()).filter(|j| !pivots.contains(j)).map(|j| low.columns[j].clone()).collect();
        let basis = MonomialBasis { degree: dn.clone(), monomials, leading: low.rank() };
        info!("monomial basis at D_N = {dn:?}: {} elements", basis.monomials.len());

        let xh = system.x_h(&field);
        let xh_mono = xh.monomials().next().expect("monomial").clone();
        let tail: Vec<Exps> = basis.monomials.iter().map(|b| b.mul(&xh_mono)).collect();
        let tail_set: HashSet<&Exps> = tail.iter().collect();
        let mut all = system.monomials(&dn1);
        all.sort_by_cached_key(|m| std::cmp::Reverse(order.key(m)));
        let mut columns: Vec<Exps> = all.into_iter().filter(|m| !tail_set.contains(m)).collect();
        let left = columns.len();
        columns.extend(tail.iter().cloned());

        let top = MacaulayMatrix::with_columns(&field, columns.clone(), rows_top.clone())?.rref(&field);
        let expected = columns.len() - basis.monomials.len();
        debug!("top matrix {}x{} rank {}", rows_top.len(), columns.len(), top.rank());
        if top.rank() != expected {
            return Err(Error::NotZeroDimensional { at_dn: basis.monomials.len(), at_dn1: columns.len() - top.rank() });
        }
        if top.pivots.iter().any(|&p| p >= left) {
            return Err(Error::SolutionsAtInfinity);
        }
        Ok(Solver { field, system, order, basis, top_degree: dn1, columns, top_rows: rows_top, top, low })
    }

    pub fn dimension(&self) -> usize {
        self.basis.monomials.len()
    }

    fn check_form(&self, f0: &MultiPoly<F::Elem>) -> Result<()> {
        let ones = vec![1; self.system.blocks.len()];
        for (t, m) in f0.monomials().enumerate() {
            let got = self.system.block_degree(m);
            if got != ones {
                return Err(Error::NotMultihomogeneous {
                    poly: self.system.polys.len(),
                    term: t,
                    expected: ones,
                    detail: format!("term {m:?} has multidegree {got:?}"),
                });
            }
        }
        Ok(())
    }

    /// `M̌^{f_0}`.
    pub fn blocked_matrix(&self, f0: &MultiPoly<F::Elem>) -> Result<BlockedMatrix<F::Elem>> {
        self.check_form(f0)?;
        let mut rows = self.top_rows.clone();
        let top = rows.len();
        for b in &self.basis.monomials {
            let row = f0.mul_term(&self.field, b, &self.field.one());
            rows.push((RowLabel::Multiple { generator: self.system.polys.len(), multiplier: b.clone() }, row));
        }
        let matrix = MacaulayMatrix::with_columns(&self.field, self.columns.clone(), rows)?;
        Ok(BlockedMatrix { matrix, top, left: self.columns.len() - self.dimension() })
    }

    /// The Schur complement of `M̌^{f_0}`: each `b_i · f_0` reduced by the
    /// `f_1..f_N` rows, read on the `x_h·𝔟` columns.
    pub fn mul_matrix(&self, f0: &MultiPoly<F::Elem>, name: &str) -> Result<MulMatrix<F::Elem>> {
        self.check_form(f0)?;
        let left = self.columns.len() - self.dimension();
        let mut out = Vec::with_capacity(self.dimension());
        for b in &self.basis.monomials {
            let row = f0.mul_term(&self.field, b, &self.field.one());
            let red = self.top.reduce(&self.field, &row);
            let mut v = vec![self.field.zero(); self.dimension()];
            for (m, c) in red.terms() {
                let j = self.columns.iter().position(|x| x == m).expect("column of degree D_N+1");
                if j < left {
                    return Err(Error::SolutionsAtInfinity);
                }
                v[j - left] = c.clone();
            }
            out.push(v);
        }
        Ok(MulMatrix { form: name.to_string(), rows: out })
    }

    /// Multiplication matrices of all affine variables, in flattened order.
    pub fn variable_matrices(&self) -> Result<Vec<MulMatrix<F::Elem>>> {
        self.system
            .affine_variables()
            .into_iter()
            .map(|(b, j)| self.mul_matrix(&self.system.variable_form(&self.field, b, j), &format!("x{}_{}", b + 1, j)))
            .collect()
    }

    /// Coordinates of `1` in the basis `𝔟̄`.
    pub fn unit_vector(&self) -> Vec<F::Elem> {
        let mut e = vec![0; self.system.width()];
        for (b, d) in self.basis.degree.iter().enumerate() {
            e[self.system.offset(b)] = *d;
        }
        let one = SparsePoly::monomial(&self.field, Exps(e), self.field.one());
        let red = self.low.reduce(&self.field, &one);
        self.basis
            .monomials
            .iter()
            .map(|b| red.coeff(b).cloned().unwrap_or_else(|| self.field.zero()))
            .collect()
    }

    /// Dehomogenized basis monomials `𝔟̄`.
    pub fn affine_basis(&self) -> Vec<Exps> {
        self.basis
            .monomials
            .iter()
            .map(|b| {
                let p = SparsePoly::monomial(&self.field, b.clone(), self.field.one());
                self.system.dehomogenize(&self.field, &p).monomials().next().expect("monomial").clone()
            })
            .collect()
    }
}

/// Dense matrix helpers in the row convention.
pub fn mat_mul<F: Field>(field: &F, a: &[Vec<F::Elem>], b: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = vec![field.zero(); n];
            for (k, x) in row.iter().enumerate() {
                if field.is_zero(x) {
                    continue;
                }
                for (o, y) in out.iter_mut().zip(&b[k]) {
                    *o = field.add(o, &field.mul(x, y));
                }
            }
            out
        })
        .collect()
}

pub fn identity<F: Field>(field: &F, n: usize) -> Vec<Vec<F::Elem>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect()
}

/// `p(M_1, ..., M_N)` for commuting matrices.
pub fn eval_at_matrices<F: Field>(field: &F, p: &MultiPoly<F::Elem>, mats: &[MulMatrix<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let n = mats.first().map_or(0, |m| m.rows.len());
    let mut acc = vec![vec![field.zero(); n]; n];
    for (m, c) in p.terms() {
        let mut t = identity(field, n);
        for (v, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                t = mat_mul(field, &t, &mats[v].rows);
            }
        }
        for (ar, tr) in acc.iter_mut().zip(&t) {
            for (a, x) in ar.iter_mut().zip(tr) {
                *a = field.add(a, &field.mul(c, x));
            }
        }
    }
    acc
}

/// A per-block linear substitution `x_{i,a} ↦ Σ_b A_i[a][b] x_{i,b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateChange<E> {
    pub seed: u64,
    pub matrices: Vec<Vec<Vec<E>>>,
}

impl<E: Clone + PartialEq + fmt::Debug> CoordinateChange<E> {
    pub fn identity<F: Field<Elem = E>>(field: &F, blocks: &[usize]) -> Self {
        CoordinateChange { seed: 0, matrices: blocks.iter().map(|&n| identity(field, n + 1)).collect() }
    }

    /// Map an affine point of the transformed system back to the original
    /// chart; `None` if it lands at infinity there.
    pub fn map_back<F: Field<Elem = E>>(&self, field: &F, blocks: &[usize], point: &[E]) -> Option<Vec<E>> {
        let mut out = Vec::new();
        let mut at = 0;
        for (b, &n) in blocks.iter().enumerate() {
            let mut y = vec![field.one()];
            y.extend(point[at..at + n].iter().cloned());
            at += n;
            let a = &self.matrices[b];
            let x: Vec<E> = (0..=n)
                .map(|r| (0..=n).fold(field.zero(), |s, c| field.add(&s, &field.mul(&a[r][c], &y[c]))))
                .collect();
            let inv = field.inv(&x[0]).ok()?;
            out.extend(x[1..].iter().map(|v| field.mul(v, &inv)));
        }
        Some(out)
    }
}

/// Apply a substitution to every polynomial of the system.
pub fn substitute<F: Field>(
    field: &F,
    system: &MultihomSystem<F::Elem>,
    change: &CoordinateChange<F::Elem>,
) -> MultihomSystem<F::Elem> {
    let width = system.width();
    // image of every variable as a linear form
    let mut images: Vec<MultiPoly<F::Elem>> = Vec::with_capacity(width);
    for (b, &n) in system.blocks.iter().enumerate() {
        let off = system.offset(b);
        for a in 0..=n {
            let terms = (0..=n).map(|c| {
                let mut e = vec![0; width];
                e[off + c] = 1;
                (Exps(e), change.matrices[b][a][c].clone())
            });
            images.push(SparsePoly::from_terms(field, terms));
        }
    }
    let polys = system
        .polys
        .iter()
        .map(|p| {
            let mut out = SparsePoly::zero();
            for (m, c) in p.terms() {
                let mut t = SparsePoly::monomial(field, Exps(vec![0; width]), c.clone());
                for (v, &e) in m.0.iter().enumerate() {
                    for _ in 0..e {
                        t = t.mul(field, &images[v]);
                    }
                }
                out = out.add(field, &t);
            }
            out
        })
        .collect();
    MultihomSystem { blocks: system.blocks.clone(), polys, degrees: system.degrees.clone() }
}

/// Maximum number of resamples in [`change_coords`].
pub const CHANGE_RETRIES: usize = 16;

/// Random invertible per-block change of coordinates derived from `seed`.
pub fn change_coords<F: Field>(
    field: &F,
    system: &MultihomSystem<F::Elem>,
    seed: u64,
) -> Result<(MultihomSystem<F::Elem>, CoordinateChange<F::Elem>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrices = Vec::new();
    for &n in &system.blocks {
        let mut found = None;
        for _ in 0..CHANGE_RETRIES {
            let a: Vec<Vec<F::Elem>> = (0..=n).map(|_| (0..=n).map(|_| field.random(&mut rng)).collect()).collect();
            let sparse: Vec<Vec<(usize, F::Elem)>> = a
                .iter()
                .map(|r| r.iter().cloned().enumerate().filter(|(_, v)| !field.is_zero(v)).collect())
                .collect();
            if rref_rows(field, n + 1, &sparse).0.len() == n + 1 {
                found = Some(a);
                break;
            }
        }
        matrices.push(found.ok_or(Error::SingularChange(CHANGE_RETRIES))?);
    }
    let change = CoordinateChange { seed, matrices };
    debug!("coordinate change seed {seed}: {:?}", change.matrices);
    Ok((substitute(field, system, &change), change))
}
