//! Input documents (schema v1) and their typed problems.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::multihom::{Exps, MultihomSystem};
use crate::poly::{AffinePoly, SparsePoly};
use crate::semigroup::{Monomial, Point, SemigroupContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sparse,
    Multihomogeneous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub field: FieldSpec,
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparse: Option<SparseDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multihom: Option<MultihomDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseDoc {
    pub ambient_dim: usize,
    pub polytopes: Vec<Vec<Vec<i64>>>,
    pub polynomials: Vec<SparsePolyDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparsePolyDoc {
    pub terms: Vec<SparseTermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseTermDoc {
    pub point: Vec<i64>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultihomDoc {
    pub blocks: Vec<usize>,
    pub polynomials: Vec<MultihomPolyDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultihomPolyDoc {
    pub multidegree: Vec<u32>,
    pub terms: Vec<MultihomTermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultihomTermDoc {
    pub exponents: Vec<Vec<u32>>,
    pub coeff: String,
}

/// Polytopes and generators of a sparse problem.
#[derive(Debug, Clone)]
pub struct SparseProblem<E> {
    pub ctx: Arc<SemigroupContext>,
    pub polys: Vec<AffinePoly<E>>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Document(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn sparse(&self) -> Result<&SparseDoc> {
        match (&self.model, &self.sparse) {
            (Model::Sparse, Some(s)) => Ok(s),
            _ => Err(Error::Document("model \"sparse\" with a \"sparse\" section expected".into())),
        }
    }

    pub fn multihom(&self) -> Result<&MultihomDoc> {
        match (&self.model, &self.multihom) {
            (Model::Multihomogeneous, Some(m)) => Ok(m),
            _ => Err(Error::Document("model \"multihomogeneous\" with a \"multihom\" section expected".into())),
        }
    }
}

impl SparseDoc {
    pub fn context(&self) -> Result<SemigroupContext> {
        let polytopes: Vec<Vec<Point>> = self
            .polytopes
            .iter()
            .map(|p| p.iter().map(|q| self.point(q)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        SemigroupContext::new(polytopes)
    }

    fn point(&self, q: &[i64]) -> Result<Point> {
        if q.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { point: q.to_vec(), got: q.len(), expected: self.ambient_dim });
        }
        Ok(Point(q.to_vec()))
    }

    pub fn problem<F: Field>(&self, field: &F) -> Result<SparseProblem<F::Elem>> {
        let ctx = Arc::new(self.context()?);
        let mut polys = Vec::with_capacity(self.polynomials.len());
        for p in &self.polynomials {
            let mut terms = Vec::with_capacity(p.terms.len());
            for t in &p.terms {
                let point = self.point(&t.point)?;
                if !ctx.contains(&point) {
                    return Err(Error::NotInSemigroup(point.0));
                }
                terms.push((Monomial { point }, field.parse(&t.coeff)?));
            }
            let poly = SparsePoly::from_terms(field, terms);
            if poly.is_zero() {
                return Err(Error::ZeroPolynomial("terms"));
            }
            polys.push(poly);
        }
        Ok(SparseProblem { ctx, polys })
    }

    pub fn from_problem<F: Field>(field: &F, problem: &SparseProblem<F::Elem>) -> Self {
        SparseDoc {
            ambient_dim: problem.ctx.dim(),
            polytopes: problem.ctx.polytopes().iter().map(|p| p.iter().map(|q| q.0.clone()).collect()).collect(),
            polynomials: problem.polys.iter().map(|p| sparse_poly_doc(field, p)).collect(),
        }
    }
}

pub fn sparse_poly_doc<F: Field>(field: &F, p: &AffinePoly<F::Elem>) -> SparsePolyDoc {
    SparsePolyDoc {
        terms: p.terms().map(|(m, c)| SparseTermDoc { point: m.point.0.clone(), coeff: field.format(c) }).collect(),
    }
}

impl MultihomDoc {
    pub fn system<F: Field>(&self, field: &F) -> Result<MultihomSystem<F::Elem>> {
        let mut polys = Vec::with_capacity(self.polynomials.len());
        let mut degrees = Vec::with_capacity(self.polynomials.len());
        for (i, p) in self.polynomials.iter().enumerate() {
            let mut terms = Vec::with_capacity(p.terms.len());
            for (t, term) in p.terms.iter().enumerate() {
                let shape_ok = term.exponents.len() == self.blocks.len()
                    && term.exponents.iter().zip(&self.blocks).all(|(e, &n)| e.len() == n + 1);
                if !shape_ok {
                    return Err(Error::NotMultihomogeneous {
                        poly: i,
                        term: t,
                        expected: p.multidegree.clone(),
                        detail: format!("exponents {:?} do not match blocks {:?}", term.exponents, self.blocks),
                    });
                }
                terms.push((Exps(term.exponents.concat()), field.parse(&term.coeff)?));
            }
            polys.push(SparsePoly::from_terms(field, terms));
            degrees.push(p.multidegree.clone());
        }
        MultihomSystem::new(self.blocks.clone(), polys, degrees)
    }

    pub fn from_system<F: Field>(field: &F, system: &MultihomSystem<F::Elem>) -> Self {
        let polynomials = system
            .polys
            .iter()
            .zip(&system.degrees)
            .map(|(p, d)| MultihomPolyDoc {
                multidegree: d.clone(),
                terms: p
                    .terms()
                    .map(|(m, c)| MultihomTermDoc { exponents: split_blocks(&system.blocks, m), coeff: field.format(c) })
                    .collect(),
            })
            .collect();
        MultihomDoc { blocks: system.blocks.clone(), polynomials }
    }
}

/// Flattened exponents back to one vector per block.
pub fn split_blocks(blocks: &[usize], m: &Exps) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut at = 0;
    for &n in blocks {
        out.push(m.0[at..at + n + 1].to_vec());
        at += n + 1;
    }
    out
}
