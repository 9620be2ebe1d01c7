//! Tuple expressions of degree at most two in PL functions, such as
//! `f + v * g`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{MeshPoint, SimplicialMesh, TransferMap};
use crate::pl::{check_compatible, PlFunction, PlTuple};
use crate::scalar::{Field, C64};

/// `scale * f_1 * ... * f_k` with `k <= 2`.
#[derive(Clone, Debug)]
pub struct Term {
    pub scale: C64,
    pub factors: Vec<PlFunction>,
}

/// One component: a sum of terms.
#[derive(Clone, Debug, Default)]
pub struct ExprComponent {
    pub terms: Vec<Term>,
}

/// A tuple whose components are polynomials of degree at most two in PL
/// functions over a common mesh.
#[derive(Clone, Debug)]
pub struct TupleExpr {
    mesh: Arc<SimplicialMesh>,
    field: Field,
    components: Vec<ExprComponent>,
    description: String,
}

/// Symmetric `(d+1) x (d+1)` matrix `B` with `p(l) = l^T B l` on a simplex.
/// Its entries are the degree-two Bernstein coefficients of `p`.
pub type QuadForm = Vec<Vec<C64>>;

impl TupleExpr {
    pub fn new(
        mesh: Arc<SimplicialMesh>,
        field: Field,
        components: Vec<ExprComponent>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("an expression needs a component".into()));
        }
        let probe = PlFunction::zero(mesh.clone(), field);
        for c in &components {
            for t in &c.terms {
                if t.factors.len() > 2 {
                    return Err(Error::InvalidParameter("terms have degree at most two".into()));
                }
                for f in &t.factors {
                    check_compatible(&probe, f)?;
                }
            }
        }
        Ok(TupleExpr { mesh, field, components, description: description.into() })
    }

    /// The tuple itself, read as an expression.
    pub fn from_tuple(t: &PlTuple) -> TupleExpr {
        let components = t
            .components()
            .iter()
            .map(|f| ExprComponent { terms: vec![Term { scale: C64::new(1.0, 0.0), factors: vec![f.clone()] }] })
            .collect();
        TupleExpr { mesh: t.mesh().clone(), field: t.field(), components, description: "f".into() }
    }

    /// `(f_j + v_j * g)_j`.
    pub fn reduced(f: &PlTuple, v: &PlTuple, g: &PlFunction) -> Result<TupleExpr> {
        if f.len() != v.len() {
            return Err(Error::InvalidParameter(format!(
                "multiplier has {} components, tuple has {}",
                v.len(),
                f.len()
            )));
        }
        check_compatible(f.component(0), g)?;
        check_compatible(f.component(0), v.component(0))?;
        let one = C64::new(1.0, 0.0);
        let components = f
            .components()
            .iter()
            .zip(v.components())
            .map(|(fj, vj)| ExprComponent {
                terms: vec![
                    Term { scale: one, factors: vec![fj.clone()] },
                    Term { scale: one, factors: vec![vj.clone(), g.clone()] },
                ],
            })
            .collect();
        Ok(TupleExpr { mesh: f.mesh().clone(), field: f.field(), components, description: "f + v*g".into() })
    }

    /// The scalar `sum_j u_j a_j + y b`.
    pub fn dot_plus(u: &PlTuple, a: &PlTuple, y: &PlFunction, b: &PlFunction) -> Result<TupleExpr> {
        if u.len() != a.len() {
            return Err(Error::InvalidParameter("dot product of tuples of different lengths".into()));
        }
        check_compatible(u.component(0), a.component(0))?;
        check_compatible(u.component(0), y)?;
        check_compatible(u.component(0), b)?;
        let one = C64::new(1.0, 0.0);
        let mut terms: Vec<Term> = u
            .components()
            .iter()
            .zip(a.components())
            .map(|(uj, aj)| Term { scale: one, factors: vec![uj.clone(), aj.clone()] })
            .collect();
        terms.push(Term { scale: one, factors: vec![y.clone(), b.clone()] });
        Ok(TupleExpr {
            mesh: u.mesh().clone(),
            field: u.field(),
            components: vec![ExprComponent { terms }],
            description: "u.a + y*b".into(),
        })
    }

    /// Scalar product `scale * f * g`.
    pub fn product(f: &PlFunction, g: &PlFunction, scale: C64) -> Result<TupleExpr> {
        check_compatible(f, g)?;
        Ok(TupleExpr {
            mesh: f.mesh().clone(),
            field: f.field(),
            components: vec![ExprComponent { terms: vec![Term { scale, factors: vec![f.clone(), g.clone()] }] }],
            description: "f*g".into(),
        })
    }

    /// Constant tuple.
    pub fn constant(mesh: Arc<SimplicialMesh>, field: Field, values: &[C64]) -> TupleExpr {
        let components = values
            .iter()
            .map(|&c| ExprComponent { terms: vec![Term { scale: c, factors: vec![] }] })
            .collect();
        TupleExpr { mesh, field, components, description: "const".into() }
    }

    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.description = d.into();
        self
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn mesh(&self) -> &Arc<SimplicialMesh> {
        &self.mesh
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[ExprComponent] {
        &self.components
    }

    /// Highest degree among terms with a nonzero scale.
    pub fn degree(&self) -> usize {
        self.components
            .iter()
            .flat_map(|c| c.terms.iter())
            .filter(|t| t.scale != C64::new(0.0, 0.0))
            .map(|t| t.factors.len())
            .max()
            .unwrap_or(0)
    }

    /// Vertex values of every component when the expression is affine, which
    /// makes it exactly a PL tuple.
    pub fn as_pl(&self) -> Option<PlTuple> {
        if self.degree() > 1 {
            return None;
        }
        let nv = self.mesh.num_vertices();
        let comps = self
            .components
            .iter()
            .map(|c| {
                let vals = (0..nv).map(|v| eval_component_vertex(c, v)).collect();
                PlFunction::new(self.mesh.clone(), Field::Complex, vals)
            })
            .collect::<Result<Vec<_>>>()
            .ok()?;
        PlTuple::new(comps).ok()
    }

    /// Component values at a point.
    pub fn eval(&self, p: &MeshPoint) -> Vec<C64> {
        self.components
            .iter()
            .map(|c| {
                c.terms
                    .iter()
                    .map(|t| t.factors.iter().fold(t.scale, |acc, f| acc * f.eval(p)))
                    .sum()
            })
            .collect()
    }

    /// Euclidean magnitude at a point.
    pub fn magnitude_at(&self, p: &MeshPoint) -> f64 {
        self.eval(p).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Component values at a vertex.
    pub fn eval_vertex(&self, v: usize) -> Vec<C64> {
        self.components.iter().map(|c| eval_component_vertex(c, v)).collect()
    }

    /// Quadratic forms of every component on one top simplex.
    pub fn quad_forms(&self, simplex: usize) -> Vec<QuadForm> {
        let verts = &self.mesh.simplices()[simplex];
        let k = verts.len();
        self.components
            .iter()
            .map(|c| {
                let mut b = vec![vec![C64::new(0.0, 0.0); k]; k];
                for t in &c.terms {
                    for i in 0..k {
                        for j in 0..k {
                            let e = match t.factors.as_slice() {
                                [] => t.scale,
                                [f] => t.scale * (f.value(verts[i]) + f.value(verts[j])) * 0.5,
                                [f, g] => {
                                    t.scale
                                        * (f.value(verts[i]) * g.value(verts[j])
                                            + f.value(verts[j]) * g.value(verts[i]))
                                        * 0.5
                                }
                                _ => unreachable!("degree checked at construction"),
                            };
                            b[i][j] += e;
                        }
                    }
                }
                b
            })
            .collect()
    }

    /// The same expression with every factor transferred to a refined mesh.
    pub fn transfer(&self, map: &TransferMap) -> TupleExpr {
        TupleExpr {
            mesh: map.target().clone(),
            field: self.field,
            components: self
                .components
                .iter()
                .map(|c| ExprComponent {
                    terms: c
                        .terms
                        .iter()
                        .map(|t| Term { scale: t.scale, factors: t.factors.iter().map(|f| f.transfer(map)).collect() })
                        .collect(),
                })
                .collect(),
            description: self.description.clone(),
        }
    }
}

fn eval_component_vertex(c: &ExprComponent, v: usize) -> C64 {
    c.terms
        .iter()
        .map(|t| t.factors.iter().fold(t.scale, |acc, f| acc * f.value(v)))
        .sum()
}
