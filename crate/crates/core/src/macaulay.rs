//! Macaulay matrices: rows are polynomial multiples, columns are monomials
//! listed from largest to smallest, so the pivot of a row in echelon form is
//! its leading monomial.

use std::collections::HashMap;
use std::fmt::Debug;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::orders::MonomialOrder;
use crate::poly::{SparsePoly, Term};

/// Sparse row: `(column, nonzero coefficient)` with increasing columns.
pub type SparseRow<E> = Vec<(usize, E)>;

/// Where a row came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowLabel<M> {
    /// `multiplier · generator`.
    Multiple { generator: usize, multiplier: M },
    Reduced,
}

#[derive(Debug, Clone)]
pub struct MacaulayMatrix<M, E> {
    pub columns: Vec<M>,
    pub rows: Vec<SparseRow<E>>,
    pub labels: Vec<RowLabel<M>>,
    col_index: HashMap<M, usize>,
}

/// Reduced row echelon form of a Macaulay matrix.
#[derive(Debug, Clone)]
pub struct Echelon<M, E> {
    pub columns: Vec<M>,
    /// Nonzero rows sorted by pivot column, each with pivot coefficient one.
    pub rows: Vec<SparseRow<E>>,
    pub pivots: Vec<usize>,
    /// Input rows that reduced to zero.
    pub zero_rows: usize,
}

impl<M: Term, E: Clone + PartialEq + Debug> MacaulayMatrix<M, E> {
    /// Matrix with the given column order; every row monomial must be a column.
    pub fn with_columns<F: Field<Elem = E>>(
        field: &F,
        columns: Vec<M>,
        rows: Vec<(RowLabel<M>, SparsePoly<M, E>)>,
    ) -> Result<Self> {
        let col_index: HashMap<M, usize> = columns.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut out = MacaulayMatrix { columns, rows: Vec::new(), labels: Vec::new(), col_index };
        for (label, p) in rows {
            let mut row: SparseRow<E> = Vec::with_capacity(p.len());
            for (m, c) in p.terms() {
                let j = *out
                    .col_index
                    .get(m)
                    .ok_or_else(|| Error::MixedDegrees(format!("monomial {m:?} is not a column")))?;
                if !field.is_zero(c) {
                    row.push((j, c.clone()));
                }
            }
            row.sort_by_key(|e| e.0);
            out.rows.push(row);
            out.labels.push(label);
        }
        Ok(out)
    }

    /// Matrix whose columns are the union of row supports in decreasing
    /// `order`. All monomials must share one `grade`.
    pub fn build<F, O, G>(
        field: &F,
        rows: Vec<(RowLabel<M>, SparsePoly<M, E>)>,
        order: &O,
        grade: impl Fn(&M) -> G,
    ) -> Result<Self>
    where
        F: Field<Elem = E>,
        O: MonomialOrder<M>,
        G: PartialEq + Debug,
    {
        let mut seen: HashMap<M, Vec<i64>> = HashMap::new();
        let mut common: Option<G> = None;
        for (_, p) in &rows {
            for m in p.monomials() {
                let g = grade(m);
                match &common {
                    Some(c) if *c != g => return Err(Error::MixedDegrees(format!("{c:?} and {g:?}"))),
                    Some(_) => {}
                    None => common = Some(g),
                }
                if !seen.contains_key(m) {
                    seen.insert(m.clone(), order.key(m));
                }
            }
        }
        let mut cols: Vec<(Vec<i64>, M)> = seen.into_iter().map(|(m, k)| (k, m)).collect();
        cols.sort_by(|a, b| b.0.cmp(&a.0));
        Self::with_columns(field, cols.into_iter().map(|(_, m)| m).collect(), rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn column_of(&self, m: &M) -> Option<usize> {
        self.col_index.get(m).copied()
    }

    pub fn row_poly<F: Field<Elem = E>>(&self, field: &F, i: usize) -> SparsePoly<M, E> {
        SparsePoly::from_terms(field, self.rows[i].iter().map(|(j, c)| (self.columns[*j].clone(), c.clone())))
    }

    pub fn rref<F: Field<Elem = E>>(&self, field: &F) -> Echelon<M, E> {
        let (rows, pivots) = rref_rows(field, self.ncols(), &self.rows);
        let zero_rows = self.rows.len() - rows.len();
        Echelon { columns: self.columns.clone(), rows, pivots, zero_rows }
    }

    /// Sparse triplet form with row labels and column monomials.
    pub fn to_json<F: Field<Elem = E>>(&self, field: &F) -> Value
    where
        M: Serialize,
    {
        let entries: Vec<Value> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, c)| json!([i, j, field.format(c)])))
            .collect();
        json!({
            "rows": self.nrows(),
            "cols": self.ncols(),
            "entries": entries,
            "labels": self.labels,
            "columns": self.columns,
        })
    }
}

impl<M: Term, E: Clone + PartialEq> Echelon<M, E> {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &M> {
        self.pivots.iter().map(|&j| &self.columns[j])
    }

    pub fn row_poly<F: Field<Elem = E>>(&self, field: &F, i: usize) -> SparsePoly<M, E> {
        SparsePoly::from_terms(field, self.rows[i].iter().map(|(j, c)| (self.columns[*j].clone(), c.clone())))
    }

    pub fn polys<F: Field<Elem = E>>(&self, field: &F) -> Vec<SparsePoly<M, E>> {
        (0..self.rows.len()).map(|i| self.row_poly(field, i)).collect()
    }

    /// Reduce a polynomial by the echelon rows. Monomials outside the
    /// column set are left untouched.
    pub fn reduce<F: Field<Elem = E>>(&self, field: &F, p: &SparsePoly<M, E>) -> SparsePoly<M, E> {
        let index: HashMap<&M, usize> = self.columns.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut outside = SparsePoly::zero();
        let mut acc = vec![field.zero(); self.columns.len()];
        for (m, c) in p.terms() {
            match index.get(m) {
                Some(&j) => acc[j] = c.clone(),
                None => outside.add_term(field, m.clone(), c.clone()),
            }
        }
        let pivot_row: HashMap<usize, usize> = self.pivots.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        for j in 0..acc.len() {
            if field.is_zero(&acc[j]) {
                continue;
            }
            if let Some(&r) = pivot_row.get(&j) {
                let f = acc[j].clone();
                for (k, c) in &self.rows[r] {
                    acc[*k] = field.sub(&acc[*k], &field.mul(&f, c));
                }
            }
        }
        let inside = SparsePoly::from_terms(field, acc.into_iter().enumerate().map(|(j, c)| (self.columns[j].clone(), c)));
        inside.add(field, &outside)
    }
}

/// Reduced row echelon form of sparse rows over `ncols` columns.
/// Returns the nonzero rows sorted by pivot together with their pivots.
pub fn rref_rows<F: Field>(field: &F, ncols: usize, rows: &[SparseRow<F::Elem>]) -> (Vec<SparseRow<F::Elem>>, Vec<usize>) {
    let mut pivot_of: Vec<Option<usize>> = vec![None; ncols];
    let mut basis: Vec<SparseRow<F::Elem>> = Vec::new();
    let mut acc: Vec<F::Elem> = vec![field.zero(); ncols];

    // sparser rows first keeps fill-in low
    let mut order: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].is_empty()).collect();
    order.sort_by_key(|&i| (rows[i][0].0, rows[i].len()));

    for i in order {
        let row = &rows[i];
        let start = row[0].0;
        let mut end = start;
        for (j, c) in row {
            acc[*j] = c.clone();
            end = end.max(*j);
        }
        let mut lead = None;
        let mut j = start;
        while j <= end {
            if !field.is_zero(&acc[j]) {
                match pivot_of[j] {
                    Some(b) => {
                        let f = acc[j].clone();
                        for (k, c) in &basis[b] {
                            acc[*k] = field.sub(&acc[*k], &field.mul(&f, c));
                            end = end.max(*k);
                        }
                    }
                    None => {
                        if lead.is_none() {
                            lead = Some(j);
                        }
                    }
                }
            }
            j += 1;
        }
        let Some(p) = lead else {
            continue;
        };
        let inv = field.inv(&acc[p]).expect("pivot is nonzero");
        let mut new_row = Vec::new();
        for (k, slot) in acc.iter_mut().enumerate().take(end + 1).skip(p) {
            if !field.is_zero(slot) {
                new_row.push((k, field.mul(slot, &inv)));
            }
            *slot = field.zero();
        }
        for slot in acc.iter_mut().take(p).skip(start) {
            *slot = field.zero();
        }
        pivot_of[p] = Some(basis.len());
        basis.push(new_row);
    }

    // back-reduction, rightmost pivots first
    let mut by_pivot: Vec<(usize, usize)> = basis.iter().enumerate().map(|(b, r)| (r[0].0, b)).collect();
    by_pivot.sort();
    for &(p, b) in by_pivot.iter().rev() {
        let row = std::mem::take(&mut basis[b]);
        let end = row.last().map_or(p, |e| e.0);
        for (j, c) in &row {
            acc[*j] = c.clone();
        }
        // rows to the right are already reduced, so fill-in never lands on a pivot
        let mut max = end;
        for j in p + 1..=end {
            if field.is_zero(&acc[j]) {
                continue;
            }
            if let Some(o) = pivot_of[j] {
                let f = acc[j].clone();
                for (k, c) in &basis[o] {
                    acc[*k] = field.sub(&acc[*k], &field.mul(&f, c));
                    max = max.max(*k);
                }
            }
        }
        let mut new_row = Vec::new();
        for (k, slot) in acc.iter_mut().enumerate().take(max + 1).skip(p) {
            if !field.is_zero(slot) {
                new_row.push((k, slot.clone()));
            }
            *slot = field.zero();
        }
        basis[b] = new_row;
    }
    let pivots: Vec<usize> = by_pivot.iter().map(|&(p, _)| p).collect();
    let rows = by_pivot.into_iter().map(|(_, b)| std::mem::take(&mut basis[b])).collect();
    (rows, pivots)
}
