//! Pointed affine semigroups generated by lattice polytopes.
//!
//! A [`SemigroupContext`] holds the polytopes `M_1, ..., M_k` as explicit
//! lattice-point lists. Monomials of `K[S]` are exponent points; monomials of
//! the homogenized algebra `K[S^h]` carry an additional degree. The affine
//! degree of a point is the least number of polytope points summing to it,
//! computed here for the single-polytope view `M = M_1 ∪ ... ∪ M_k` by a
//! breadth-first expansion over degree levels.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Sub};
use std::sync::RwLock;

use num::integer::Integer;
use num::rational::BigRational;
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on affine degrees explored by the level expansion.
pub const DEFAULT_DEGREE_CAP: u32 = 64;

/// A lattice point in `Z^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn zero(dim: usize) -> Self {
        Point(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dot(&self, w: &[i64]) -> i64 {
        self.0.iter().zip(w).map(|(a, b)| a * b).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for Point {
    fn from(v: Vec<i64>) -> Self {
        Point(v)
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Monomial `X^s` of `K[S]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial {
    pub point: Point,
}

impl Monomial {
    pub fn new(point: impl Into<Point>) -> Self {
        Monomial { point: point.into() }
    }

    pub fn one(dim: usize) -> Self {
        Monomial { point: Point::zero(dim) }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{:?}", self.point)
    }
}

/// Monomial `X^(s,d)` of `K[S^h]` in the single-polytope view.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomMonomial {
    pub point: Point,
    pub degree: u32,
}

impl HomMonomial {
    pub fn new(point: impl Into<Point>, degree: u32) -> Self {
        HomMonomial { point: point.into(), degree }
    }

    pub fn one(dim: usize) -> Self {
        HomMonomial { point: Point::zero(dim), degree: 0 }
    }

    /// `χ`: forget the degree.
    pub fn dehomogenize(&self) -> Monomial {
        Monomial { point: self.point.clone() }
    }
}

impl fmt::Debug for HomMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^({:?},{})", self.point, self.degree)
    }
}

struct DeltaCache {
    delta: HashMap<Point, u32>,
    /// `levels[d]` holds the points of affine degree exactly `d`.
    levels: Vec<Vec<Point>>,
}

/// Polytopes, their generators, and memoized affine degrees.
pub struct SemigroupContext {
    dim: usize,
    polytopes: Vec<Vec<Point>>,
    generators: Vec<Point>,
    grading: Vec<i64>,
    min_weight: i64,
    degree_cap: u32,
    cache: RwLock<DeltaCache>,
}

impl fmt::Debug for SemigroupContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemigroupContext")
            .field("dim", &self.dim)
            .field("polytopes", &self.polytopes)
            .field("grading", &self.grading)
            .finish()
    }
}

impl SemigroupContext {
    pub fn new(polytopes: Vec<Vec<Point>>) -> Result<Self> {
        Self::with_degree_cap(polytopes, DEFAULT_DEGREE_CAP)
    }

    /// Build a context, checking the origin condition and pointedness.
    pub fn with_degree_cap(polytopes: Vec<Vec<Point>>, degree_cap: u32) -> Result<Self> {
        if polytopes.is_empty() {
            return Err(Error::EmptyInput("no polytopes"));
        }
        let dim = polytopes[0].first().map(Point::dim).unwrap_or(0);
        let mut generators = Vec::new();
        for (index, poly) in polytopes.iter().enumerate() {
            for p in poly {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch { point: p.0.clone(), got: p.dim(), expected: dim });
                }
                if !p.is_zero() {
                    generators.push(p.clone());
                }
            }
            if !poly.iter().any(Point::is_zero) {
                return Err(Error::MissingOrigin { index });
            }
        }
        generators.sort();
        generators.dedup();

        let grading = if generators.iter().all(Point::is_nonnegative) {
            vec![1; dim]
        } else {
            positive_functional(&generators).map_err(|lambda| Error::NotPointed {
                witness: describe_witness(&generators, &lambda),
            })?
        };
        let min_weight = generators.iter().map(|g| g.dot(&grading)).min().unwrap_or(1);
        debug_assert!(min_weight > 0);

        let mut delta = HashMap::new();
        delta.insert(Point::zero(dim), 0);
        Ok(SemigroupContext {
            dim,
            polytopes,
            generators,
            grading,
            min_weight,
            degree_cap,
            cache: RwLock::new(DeltaCache { delta, levels: vec![vec![Point::zero(dim)]] }),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn polytopes(&self) -> &[Vec<Point>] {
        &self.polytopes
    }

    /// Nonzero points of `M_1 ∪ ... ∪ M_k`, sorted.
    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    /// Integer functional strictly positive on every nonzero generator.
    pub fn grading(&self) -> &[i64] {
        &self.grading
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    fn expand_to(&self, level: u32) {
        {
            let cache = self.cache.read().unwrap();
            if cache.levels.len() > level as usize {
                return;
            }
        }
        let mut guard = self.cache.write().unwrap();
        let cache = &mut *guard;
        while cache.levels.len() <= level as usize {
            let d = cache.levels.len() as u32;
            let mut next = Vec::new();
            for p in &cache.levels[d as usize - 1] {
                for g in &self.generators {
                    let q = p + g;
                    if !cache.delta.contains_key(&q) {
                        cache.delta.insert(q.clone(), d);
                        next.push(q);
                    }
                }
            }
            next.sort();
            cache.levels.push(next);
        }
    }

    /// Affine degree `δ^A(X^s)`: minimal number of polytope points summing to `s`.
    pub fn affine_degree(&self, s: &Point) -> Result<u32> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch { point: s.0.clone(), got: s.dim(), expected: self.dim });
        }
        if let Some(&d) = self.cache.read().unwrap().delta.get(s) {
            return Ok(d);
        }
        let w = s.dot(&self.grading);
        if w <= 0 || self.generators.is_empty() {
            return Err(Error::NotInSemigroup(s.0.clone()));
        }
        // every generator weighs at least min_weight, so δ^A(s) ≤ w / min_weight
        let bound = (w / self.min_weight) as u64;
        let level = bound.min(self.degree_cap as u64) as u32;
        self.expand_to(level);
        match self.cache.read().unwrap().delta.get(s) {
            Some(&d) => Ok(d),
            None if bound > self.degree_cap as u64 => {
                Err(Error::DegreeCapExceeded { point: s.0.clone(), cap: self.degree_cap })
            }
            None => Err(Error::NotInSemigroup(s.0.clone())),
        }
    }

    pub fn contains(&self, s: &Point) -> bool {
        self.affine_degree(s).is_ok()
    }

    /// Sparse degree `δ(X^(s,d)) = δ^A(X^s)`.
    pub fn sparse_degree(&self, m: &HomMonomial) -> Result<u32> {
        self.affine_degree(&m.point)
    }

    /// `(s, d)` lies in `S^h` iff `δ^A(s) ≤ d`.
    pub fn contains_hom(&self, m: &HomMonomial) -> bool {
        self.affine_degree(&m.point).map(|d| d <= m.degree).unwrap_or(false)
    }

    /// All points of affine degree at most `d`, sorted; these index the
    /// monomials of `K[S^h]_d`.
    pub fn points_up_to(&self, d: u32) -> Vec<Point> {
        self.expand_to(d);
        let cache = self.cache.read().unwrap();
        let mut out: Vec<Point> = cache.levels[..=d as usize].iter().flatten().cloned().collect();
        out.sort();
        out
    }

    /// Monomials of `K[S^h]_d`.
    pub fn hom_monomials(&self, d: u32) -> Vec<HomMonomial> {
        self.points_up_to(d).into_iter().map(|p| HomMonomial { point: p, degree: d }).collect()
    }

    /// `χ⁻¹` on a single monomial: `X^s ↦ X^(s, δ^A(s))`.
    pub fn homogenize_monomial(&self, m: &Monomial) -> Result<HomMonomial> {
        Ok(HomMonomial { point: m.point.clone(), degree: self.affine_degree(&m.point)? })
    }

    /// Restricted division: `a | b` iff `a·t = b` for some `t ∈ S^h` with
    /// `δ(a) + δ(t) = δ(b)`. Returns the quotient `t`.
    pub fn divides(&self, a: &HomMonomial, b: &HomMonomial) -> Option<HomMonomial> {
        if b.degree < a.degree {
            return None;
        }
        let t = &b.point - &a.point;
        let dt = self.affine_degree(&t).ok()?;
        if dt > b.degree - a.degree {
            return None;
        }
        let da = self.affine_degree(&a.point).ok()?;
        let db = self.affine_degree(&b.point).ok()?;
        if da + dt != db {
            return None;
        }
        Some(HomMonomial { point: t, degree: b.degree - a.degree })
    }

    /// Affine division: `X^s | X^r` iff `χ⁻¹(X^s) | χ⁻¹(X^r)`.
    pub fn divides_affine(&self, a: &Monomial, b: &Monomial) -> Option<Monomial> {
        let ah = self.homogenize_monomial(a).ok()?;
        let bh = self.homogenize_monomial(b).ok()?;
        self.divides(&ah, &bh).map(|t| t.dehomogenize())
    }

    /// Membership of `(s, d_1, ..., d_k)` in the multigraded semigroup
    /// `S^h_{M_1..M_k}`: `s` is a sum of `d_i` points of each `M_i`.
    pub fn contains_multigraded(&self, s: &Point, degrees: &[u32]) -> bool {
        if degrees.len() != self.polytopes.len() {
            return false;
        }
        let mut reach: HashSet<Point> = HashSet::from([Point::zero(self.dim)]);
        for (poly, &d) in self.polytopes.iter().zip(degrees) {
            for _ in 0..d {
                reach = reach.iter().flat_map(|p| poly.iter().map(move |q| p + q)).collect();
            }
        }
        reach.contains(s)
    }
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[derive(Clone)]
struct Inequality {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
    /// Nonnegative multipliers of the original constraints.
    mult: Vec<BigRational>,
}

impl Inequality {
    fn normalized(mut self) -> Self {
        if let Some(scale) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in self.coeffs.iter_mut().chain(self.mult.iter_mut()) {
                *c = &*c / &scale;
            }
            self.rhs = &self.rhs / &scale;
        }
        self
    }
}

/// Find an integer `w` with `w·g ≥ 1` for every generator, by
/// Fourier–Motzkin elimination. On failure returns the nonnegative
/// multipliers `λ` (not all zero) with `Σ λ_i g_i = 0`.
pub fn positive_functional(generators: &[Point]) -> std::result::Result<Vec<i64>, Vec<u64>> {
    let m = generators.len();
    let n = generators.first().map(Point::dim).unwrap_or(0);
    let initial: Vec<Inequality> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut mult = vec![BigRational::zero(); m];
            mult[i] = BigRational::one();
            Inequality { coeffs: g.0.iter().map(|&c| rat(c)).collect(), rhs: BigRational::one(), mult }
        })
        .collect();

    // systems[j] involves only variables 0..j
    let mut systems = vec![Vec::new(); n + 1];
    systems[n] = initial;
    for j in (0..n).rev() {
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for ineq in &systems[j + 1] {
            if ineq.coeffs[j].is_positive() {
                pos.push(ineq);
            } else if ineq.coeffs[j].is_negative() {
                neg.push(ineq);
            } else {
                next.push(ineq.clone());
            }
        }
        for p in &pos {
            for q in &neg {
                let a = p.coeffs[j].clone();
                let b = -q.coeffs[j].clone();
                let combine = |x: &BigRational, y: &BigRational| x * &b + y * &a;
                next.push(
                    Inequality {
                        coeffs: p.coeffs.iter().zip(&q.coeffs).map(|(x, y)| combine(x, y)).collect(),
                        rhs: combine(&p.rhs, &q.rhs),
                        mult: p.mult.iter().zip(&q.mult).map(|(x, y)| combine(x, y)).collect(),
                    }
                    .normalized(),
                );
            }
        }
        let mut seen = HashSet::new();
        next.retain(|ineq| seen.insert((ineq.coeffs.clone(), ineq.rhs.clone())));
        systems[j] = next;
    }
    if let Some(bad) = systems[0].iter().find(|ineq| ineq.rhs.is_positive()) {
        return Err(integer_vector(&bad.mult).into_iter().map(|v| v.to_u64().unwrap_or(0)).collect());
    }

    let mut w: Vec<BigRational> = Vec::with_capacity(n);
    for j in 0..n {
        let (mut lo, mut hi): (Option<BigRational>, Option<BigRational>) = (None, None);
        for ineq in &systems[j + 1] {
            let a = &ineq.coeffs[j];
            if a.is_zero() {
                continue;
            }
            let rest: BigRational = (0..j).map(|l| &ineq.coeffs[l] * &w[l]).sum();
            let bound = (&ineq.rhs - rest) / a;
            if a.is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound.clone())));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound.clone())));
            }
        }
        let value = match (lo, hi) {
            (Some(l), Some(h)) => {
                let c = l.ceil();
                if c <= h {
                    c
                } else {
                    l
                }
            }
            (Some(l), None) => l.ceil(),
            (None, Some(h)) => h.floor(),
            (None, None) => BigRational::zero(),
        };
        w.push(value);
    }
    Ok(integer_vector(&w).into_iter().map(|v| v.to_i64().expect("functional fits in i64")).collect())
}

/// Scale a rational vector by the lcm of its denominators, then divide by
/// the gcd of the numerators.
fn integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

fn describe_witness(generators: &[Point], lambda: &[u64]) -> String {
    let terms: Vec<String> = generators
        .iter()
        .zip(lambda)
        .filter(|(_, &l)| l > 0)
        .map(|(g, l)| format!("{l}*{:?}", g.0))
        .collect();
    format!("{} = 0", terms.join(" + "))
}
